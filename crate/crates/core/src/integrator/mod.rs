//! Adaptive integration of the complex equations of motion on the
//! Riemann surface.
//!
//! The integration variables are the Cartesian `x` and `p`; the unwrapped
//! angle of `x` is accumulated step by step from principal-value increments
//! and selects the branch of `(ix)^eps`. Boundary events are located by
//! bisection on re-integrated sub-steps of the last accepted step.

mod dop853;
mod equations;
mod launch;
mod polar;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::{
    energy, nearest_tower_index, potential, Epsilon, MomentumPolar, PhaseState, SurfacePoint,
    TurningPointId,
};
use dop853::Cartesian;

pub use equations::{derivative, polar_derivative, PhaseVelocity, PolarRates};
pub use launch::{launch_from_turning_point, launch_on_shell, Heading};
pub use polar::integrate_polar;

/// Time resolution of event location.
pub const EVENT_TIME_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest tolerated `|E - 1|`, measured relative to `max(1, |V|)`.
    pub energy_tol: f64,
    pub max_time: f64,
    pub escape_radius: f64,
    pub closure_tol: f64,
    pub turning_tol: f64,
    /// Cap on `|log(x_new / x_old)|` per step; bounds the angle increment.
    pub max_step_angle: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            energy_tol: 1e-8,
            max_time: 100.0,
            escape_radius: 1e6,
            closure_tol: 1e-6,
            turning_tol: 1e-3,
            max_step_angle: 0.25,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("energy_tol", self.energy_tol),
            ("max_time", self.max_time),
            ("escape_radius", self.escape_radius),
            ("closure_tol", self.closure_tol),
            ("turning_tol", self.turning_tol),
            ("max_step_angle", self.max_step_angle),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.max_step_angle >= PI {
            return Err(Error::Config(format!(
                "max_step_angle must be below pi, got {}",
                self.max_step_angle
            )));
        }
        Ok(())
    }

    pub fn with_max_time(mut self, max_time: f64) -> Self {
        self.max_time = max_time;
        self
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutDirection {
    /// Counter-clockwise, onto the sheet above.
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    BranchCutCrossing {
        direction: CutDirection,
        sheet_from: i64,
        sheet_to: i64,
    },
    /// Crossing of `x = -i y` with `y > 0`; `im` is the (negative) imaginary part.
    NegativeImagAxisCrossing {
        sheet: i64,
        im: f64,
    },
    Closure {
        period: f64,
    },
    TurningTermination {
        turning_point: TurningPointId,
    },
    Escape {
        theta: f64,
    },
    EnergyFault {
        error: f64,
    },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::BranchCutCrossing { .. } => "branch_cut_crossing",
            EventKind::NegativeImagAxisCrossing { .. } => "negative_imag_axis_crossing",
            EventKind::Closure { .. } => "closure",
            EventKind::TurningTermination { .. } => "turning_termination",
            EventKind::Escape { .. } => "escape",
            EventKind::EnergyFault { .. } => "energy_fault",
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(
            self,
            EventKind::Closure { .. }
                | EventKind::TurningTermination { .. }
                | EventKind::Escape { .. }
                | EventKind::EnergyFault { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub time: f64,
    pub state: PhaseState,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// A terminal event, the last entry of the event log.
    Event,
    MaxTime,
    Observer,
    StepUnderflow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub epsilon: Epsilon,
    pub launch: PhaseState,
    pub samples: Vec<PhaseState>,
    pub events: Vec<Event>,
    pub stop: StopReason,
}

impl Trajectory {
    pub fn terminal_event(&self) -> Option<&Event> {
        match self.stop {
            StopReason::Event => self.events.last(),
            _ => None,
        }
    }

    pub fn period(&self) -> Option<f64> {
        match self.terminal_event()?.kind {
            EventKind::Closure { period } => Some(period),
            _ => None,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.period().is_some()
    }

    pub fn end_time(&self) -> f64 {
        self.samples.last().map_or(self.launch.time, |s| s.time)
    }

    /// `|E - 1|` at each sample, relative to the largest `max(1, |V|)` reached so far.
    pub fn energy_errors(&self) -> Vec<f64> {
        let mut scale: f64 = 1.0;
        self.samples
            .iter()
            .map(|s| {
                scale = scale.max(potential(&s.position, self.epsilon).norm());
                (energy(s, self.epsilon) - 1.0).norm() / scale
            })
            .collect()
    }

    pub fn max_energy_error(&self) -> f64 {
        self.energy_errors().into_iter().fold(0.0, f64::max)
    }

    /// Physical sheets touched by the samples.
    pub fn sheets_visited(&self) -> std::collections::BTreeSet<i64> {
        self.samples
            .iter()
            .map(|s| self.epsilon.sheet_of(s.position.theta()))
            .collect()
    }

    pub fn max_radius(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.position.r())
            .fold(0.0, f64::max)
    }

    pub fn axis_crossings(&self) -> impl Iterator<Item = (&Event, i64, f64)> {
        self.events.iter().filter_map(|e| match e.kind {
            EventKind::NegativeImagAxisCrossing { sheet, im } => Some((e, sheet, im)),
            _ => None,
        })
    }
}

/// `|E - 1|` relative to the size of the potential term. Along a trajectory
/// the scale is the largest one reached so far: roundoff picked up at large
/// `|V|` persists in absolute terms after the path returns.
pub fn energy_error(state: &PhaseState, eps: Epsilon) -> f64 {
    let scale = potential(&state.position, eps).norm().max(1.0);
    (energy(state, eps) - 1.0).norm() / scale
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

/// Hooks that may end an integration early.
pub trait Observer {
    fn on_event(&mut self, _event: &Event) -> Flow {
        Flow::Continue
    }

    fn on_step(&mut self, _state: &PhaseState) -> Flow {
        Flow::Continue
    }
}

/// Runs only to terminal events or the time budget.
pub struct Unobserved;

impl Observer for Unobserved {}

/// Stops at the first event accepted by the predicate.
pub struct StopOn<F>(pub F);

impl<F: FnMut(&Event) -> bool> Observer for StopOn<F> {
    fn on_event(&mut self, event: &Event) -> Flow {
        if (self.0)(event) {
            Flow::Stop
        } else {
            Flow::Continue
        }
    }
}

/// One untested DOP853 step of length `tau` from `state`; accurate when
/// `tau` does not exceed an accepted step length through the same region.
pub(crate) fn advance(state: &PhaseState, tau: f64, eps: Epsilon) -> PhaseState {
    let y = Cartesian {
        x: state.x(),
        p: state.p(),
    };
    let node = Node::new(state.time, y, state.position.theta(), eps);
    if tau == 0.0 {
        return node.state();
    }
    let res = dop853::step(&node.y, node.theta, &node.f, tau, eps);
    Node::new(state.time + tau, res.y, res.theta, eps).state()
}

/// Integrates from `launch` until a terminal event or `max_time`.
pub fn integrate(
    launch: &PhaseState,
    eps: Epsilon,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    integrate_observed(launch, eps, config, &mut Unobserved)
}

#[derive(Debug, Clone, Copy)]
struct Node {
    t: f64,
    y: Cartesian,
    theta: f64,
    f: Cartesian,
}

impl Node {
    fn new(t: f64, y: Cartesian, theta: f64, eps: Epsilon) -> Self {
        Self {
            t,
            y,
            theta,
            f: dop853::rhs(&y, theta, eps),
        }
    }

    fn state(&self) -> PhaseState {
        PhaseState::new(
            SurfacePoint::unchecked(self.y.x.norm(), self.theta),
            MomentumPolar::from_cartesian(self.y.p),
            self.t,
        )
    }

    fn r(&self) -> f64 {
        self.y.x.norm()
    }
}

struct Driver<'a> {
    eps: Epsilon,
    config: &'a IntegratorConfig,
    launch: Cartesian,
    launch_theta: f64,
    t_launch: f64,
}

#[derive(Debug, Clone, Copy)]
enum Candidate {
    Cut {
        boundary: f64,
        up: bool,
        from: i64,
        to: i64,
    },
    Axis {
        line: f64,
        sheet: i64,
    },
    Closure,
    Turning,
    Escape,
}

impl Driver<'_> {
    fn substep(&self, from: &Node, tau: f64) -> Node {
        if tau == 0.0 {
            return *from;
        }
        let res = dop853::step(&from.y, from.theta, &from.f, tau, self.eps);
        Node::new(from.t + tau, res.y, res.theta, self.eps)
    }

    fn closure_rate(&self, n: &Node) -> f64 {
        let dx = n.y.x - self.launch.x;
        let dp = n.y.p - self.launch.p;
        (dx.conj() * n.f.x).re + (dp.conj() * n.f.p).re
    }

    fn closure_distance(&self, n: &Node) -> f64 {
        ((n.y.x - self.launch.x).norm_sqr() + (n.y.p - self.launch.p).norm_sqr()).sqrt()
    }

    fn speed_rate(n: &Node) -> f64 {
        (n.y.p.conj() * n.f.p).re
    }

    fn value(&self, c: &Candidate, n: &Node) -> f64 {
        match *c {
            Candidate::Cut { boundary, .. } => n.theta - boundary,
            Candidate::Axis { line, .. } => n.theta - line,
            Candidate::Closure => self.closure_rate(n),
            Candidate::Turning => Self::speed_rate(n),
            Candidate::Escape => n.r() - self.config.escape_radius,
        }
    }

    /// Bisects the sign change of a candidate's event function inside the step.
    fn locate(&self, c: &Candidate, from: &Node, to: &Node) -> Node {
        let g0 = self.value(c, from);
        let (mut lo, mut hi) = (0.0, to.t - from.t);
        let mut at_hi = *to;
        while hi - lo > EVENT_TIME_TOL {
            let mid = 0.5 * (lo + hi);
            let n = self.substep(from, mid);
            if (self.value(c, &n) > 0.0) == (g0 > 0.0) {
                lo = mid;
            } else {
                hi = mid;
                at_hi = n;
            }
        }
        at_hi
    }

    fn candidates(&self, from: &Node, to: &Node) -> Vec<Candidate> {
        let mut out = Vec::new();
        if !self.eps.is_single_sheeted() {
            let (k0, k1) = (
                crate::surface::sheet_index(from.theta),
                crate::surface::sheet_index(to.theta),
            );
            if k0 != k1 {
                let boundary = -1.5 * PI + TAU * k0.max(k1) as f64;
                if from.theta != boundary {
                    out.push(Candidate::Cut {
                        boundary,
                        up: k1 > k0,
                        from: k0,
                        to: k1,
                    });
                }
            }
        }
        let axis_index = |theta: f64| ((theta + FRAC_PI_2) / TAU).floor() as i64;
        let (q0, q1) = (axis_index(from.theta), axis_index(to.theta));
        if q0 != q1 {
            let m = q0.max(q1);
            let line = -FRAC_PI_2 + TAU * m as f64;
            if from.theta != line {
                out.push(Candidate::Axis {
                    line,
                    sheet: self.eps.sheet_of(line),
                });
            }
        }
        if self.closure_rate(from) < 0.0 && self.closure_rate(to) >= 0.0 {
            out.push(Candidate::Closure);
        }
        if Self::speed_rate(from) < 0.0 && Self::speed_rate(to) >= 0.0 {
            out.push(Candidate::Turning);
        }
        if from.r() < self.config.escape_radius && to.r() >= self.config.escape_radius {
            out.push(Candidate::Escape);
        }
        out
    }

    /// Turns a located candidate into an event, if it qualifies.
    fn qualify(&self, c: &Candidate, at: &Node) -> Option<EventKind> {
        match *c {
            Candidate::Cut { up, from, to, .. } => Some(EventKind::BranchCutCrossing {
                direction: if up {
                    CutDirection::Up
                } else {
                    CutDirection::Down
                },
                sheet_from: from,
                sheet_to: to,
            }),
            Candidate::Axis { sheet, .. } => {
                // Angle is pinned to the axis; the ordinate is the modulus.
                Some(EventKind::NegativeImagAxisCrossing { sheet, im: -at.r() })
            }
            Candidate::Closure => {
                let same_sheet =
                    self.eps.is_single_sheeted() || (at.theta - self.launch_theta).abs() < PI;
                (same_sheet && self.closure_distance(at) < self.config.closure_tol).then_some({
                    EventKind::Closure {
                        period: at.t - self.t_launch,
                    }
                })
            }
            Candidate::Turning => {
                (at.y.p.norm() < self.config.turning_tol).then(|| EventKind::TurningTermination {
                    turning_point: TurningPointId::from_tower_index(nearest_tower_index(
                        at.theta, self.eps,
                    )),
                })
            }
            Candidate::Escape => Some(EventKind::Escape { theta: at.theta }),
        }
    }
}

/// Integrates from `launch`, consulting `observer` after every event and
/// accepted step.
pub fn integrate_observed(
    launch: &PhaseState,
    eps: Epsilon,
    config: &IntegratorConfig,
    observer: &mut dyn Observer,
) -> Result<Trajectory> {
    config.validate()?;
    eps.require_above_minus_two()?;
    let drift = energy_error(launch, eps);
    if drift > config.energy_tol {
        return Err(Error::OffShell(drift));
    }

    let y0 = Cartesian {
        x: launch.x(),
        p: launch.p(),
    };
    let driver = Driver {
        eps,
        config,
        launch: y0,
        launch_theta: launch.position.theta(),
        t_launch: launch.time,
    };
    let t_end = launch.time + config.max_time;
    let mut node = Node::new(launch.time, y0, launch.position.theta(), eps);
    let mut samples = vec![*launch];
    let mut events = Vec::new();
    let mut energy_scale = potential(&launch.position, eps).norm().max(1.0);

    // Initial step from the local time scales of position and velocity.
    let speed = node.f.x.norm().max(1e-300);
    let accel = node.f.p.norm().max(1e-300);
    let mut h = (0.01 * node.r().max(1e-3) / speed)
        .min(0.01 / accel.sqrt())
        .min(0.01)
        .min(config.max_time);

    let stop = 'outer: loop {
        if node.t >= t_end {
            break StopReason::MaxTime;
        }
        h = h.min(t_end - node.t);
        if h <= 1e-15 * node.t.abs().max(1.0) {
            break StopReason::StepUnderflow;
        }

        let res = dop853::step(&node.y, node.theta, &node.f, h, eps);
        let err = dop853::error_norm(&res, &node.y, h, config.rel_tol, config.abs_tol);
        let log_step = {
            let ratio = res.y.x / node.y.x;
            Complex64::new(ratio.norm().ln(), ratio.arg()).norm()
        };
        if !(err <= 1.0) || !(log_step <= config.max_step_angle) {
            let by_err = if err.is_finite() {
                (0.9 * err.powf(-1.0 / 8.0)).clamp(0.2, 0.9)
            } else {
                0.2
            };
            let by_angle = if log_step.is_finite() {
                (0.9 * config.max_step_angle / log_step).clamp(0.1, 0.9)
            } else {
                0.1
            };
            h *= by_err.min(by_angle);
            continue;
        }
        let next = Node::new(node.t + h, res.y, res.theta, eps);
        let growth = if err == 0.0 {
            10.0
        } else {
            (0.9 * err.powf(-1.0 / 8.0)).clamp(0.2, 10.0)
        };

        let mut located: Vec<(Node, EventKind)> = driver
            .candidates(&node, &next)
            .iter()
            .filter_map(|c| {
                let at = driver.locate(c, &node, &next);
                driver.qualify(c, &at).map(|k| (at, k))
            })
            .collect();
        located.sort_by(|a, b| a.0.t.total_cmp(&b.0.t));

        for (at, kind) in located {
            let event = Event {
                kind,
                time: at.t,
                state: at.state(),
            };
            let terminal = kind.is_terminal();
            let flow = observer.on_event(&event);
            events.push(event);
            if terminal || flow == Flow::Stop {
                samples.push(at.state());
                break 'outer if terminal {
                    StopReason::Event
                } else {
                    StopReason::Observer
                };
            }
        }

        let state = next.state();
        energy_scale = energy_scale.max(potential(&state.position, eps).norm());
        let drift = (energy(&state, eps) - 1.0).norm() / energy_scale;
        if drift > config.energy_tol {
            events.push(Event {
                kind: EventKind::EnergyFault { error: drift },
                time: next.t,
                state,
            });
            samples.push(state);
            break StopReason::Event;
        }
        samples.push(state);
        node = next;
        h *= growth;
        if observer.on_step(&state) == Flow::Stop {
            break StopReason::Observer;
        }
    };

    Ok(Trajectory {
        epsilon: eps,
        launch: *launch,
        samples,
        events,
        stop,
    })
}
