//! PT symmetry of a sampled trajectory as a point set.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::interp::Interpolant;
use crate::integrator::{advance, Trajectory};
use crate::surface::{pt_reflect, Epsilon, PhaseState};

/// Point-set tolerance relative to the orbit diameter.
pub const PT_TOLERANCE: f64 = 1e-6;

const COARSE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryDefect {
    /// Largest distance from a reflected sample to the original curve.
    pub distance: f64,
    /// Bounding-box diagonal of the samples.
    pub diameter: f64,
}

impl SymmetryDefect {
    pub fn relative(&self) -> f64 {
        if self.diameter > 0.0 {
            self.distance / self.diameter
        } else {
            0.0
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.distance <= PT_TOLERANCE * self.diameter
    }
}

struct Curve<'a> {
    samples: &'a [PhaseState],
    interp: Interpolant<'a>,
    /// Bounding box of each segment's coarse polyline, padded by a quarter of its size.
    boxes: Vec<(Complex64, Complex64)>,
    cell: f64,
    grid: HashMap<(i64, i64), Vec<usize>>,
    eps: Epsilon,
    /// Coarse distances below this are accepted without refinement.
    resolved: f64,
}

impl<'a> Curve<'a> {
    fn new(traj: &'a Trajectory, diameter: f64) -> Self {
        let samples = &traj.samples[..];
        let mut chords: Vec<f64> = samples
            .windows(2)
            .map(|w| (w[1].x() - w[0].x()).norm())
            .collect();
        chords.sort_by(f64::total_cmp);
        let median = chords.get(chords.len() / 2).copied().unwrap_or(0.0);
        let cell = median.max(diameter * 1e-4).max(f64::MIN_POSITIVE);
        // Each segment is registered in every cell its interpolant passes through.
        let interp = Interpolant::new(samples, traj.epsilon);
        let mut grid: HashMap<_, Vec<usize>> = HashMap::new();
        let mut boxes = Vec::with_capacity(interp.segments());
        for i in 0..interp.segments() {
            let mut last = None;
            let mut prev = interp.at(i, 0.0);
            let (mut lo, mut hi) = (prev, prev);
            for k in 1..=COARSE {
                let next = interp.at(i, k as f64 / COARSE as f64);
                lo = Complex64::new(lo.re.min(next.re), lo.im.min(next.im));
                hi = Complex64::new(hi.re.max(next.re), hi.im.max(next.im));
                let pieces = ((next - prev).norm() / (0.5 * cell)).ceil().min(1e4) as usize + 1;
                for m in 0..=pieces {
                    let key = Self::key(prev + (next - prev) * (m as f64 / pieces as f64), cell);
                    if last != Some(key) {
                        grid.entry(key).or_default().push(i);
                        last = Some(key);
                    }
                }
                prev = next;
            }
            let pad = 0.25 * (hi - lo).norm();
            boxes.push((lo - Complex64::new(pad, pad), hi + Complex64::new(pad, pad)));
        }
        Self {
            samples,
            interp,
            boxes,
            cell,
            grid,
            eps: traj.epsilon,
            resolved: 0.01 * PT_TOLERANCE * diameter,
        }
    }

    fn key(z: Complex64, cell: f64) -> (i64, i64) {
        ((z.re / cell).floor() as i64, (z.im / cell).floor() as i64)
    }

    /// Segments on a compatible sheet registered within two cells of `z`.
    fn near(&self, z: Complex64, theta: f64) -> Vec<usize> {
        let (kx, ky) = Self::key(z, self.cell);
        let mut out = Vec::new();
        for dx in -2..=2 {
            for dy in -2..=2 {
                if let Some(v) = self.grid.get(&(kx + dx, ky + dy)) {
                    out.extend(v.iter().copied().filter(|&i| {
                        let compatible =
                            |j: usize| (self.samples[j].position.theta() - theta).abs() < PI;
                        self.eps.is_single_sheeted() || compatible(i) || compatible(i + 1)
                    }));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Distance from `z` to the curve, searched near samples on a compatible sheet.
    /// Distance from `z` to the curve, or any value at most `floor` when the
    /// coarse estimate already shows it cannot exceed `floor`.
    fn distance(&self, z: Complex64, theta: f64, floor: f64) -> f64 {
        let idx = self.near(z, theta);
        if idx.is_empty() {
            return self
                .samples
                .iter()
                .map(|s| (s.x() - z).norm())
                .fold(f64::INFINITY, f64::min);
        }
        // Coarse Hermite minimum per segment, then exact refinement of the best few.
        let mut coarse: Vec<(f64, usize, f64)> = Vec::new();
        let mut order: Vec<(f64, usize)> = idx
            .into_iter()
            .map(|i| (self.box_distance(i, z), i))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (lower, seg) in order {
            if coarse.len() >= 2 && lower > coarse.iter().map(|c| c.0).fold(f64::INFINITY, f64::min)
            {
                break;
            }
            let best = (0..=COARSE)
                .map(|k| {
                    let s = k as f64 / COARSE as f64;
                    ((self.interp.at(seg, s) - z).norm(), seg, s)
                })
                .min_by(|x, y| x.0.total_cmp(&y.0))
                .unwrap();
            coarse.push(best);
        }
        coarse.sort_by(|x, y| x.0.total_cmp(&y.0));
        if coarse
            .first()
            .is_some_and(|c| c.0 <= self.resolved.max(floor))
        {
            return coarse[0].0;
        }
        coarse
            .iter()
            .take(2)
            .map(|&(d, seg, s)| d.min(self.refine(z, seg, s)))
            .fold(f64::INFINITY, f64::min)
    }

    fn box_distance(&self, i: usize, z: Complex64) -> f64 {
        let (lo, hi) = self.boxes[i];
        let dx = (lo.re - z.re).max(z.re - hi.re).max(0.0);
        let dy = (lo.im - z.im).max(z.im - hi.im).max(0.0);
        dx.hypot(dy)
    }

    fn refine(&self, z: Complex64, seg: usize, s: f64) -> f64 {
        let a = &self.samples[seg];
        let h = self.samples[seg + 1].time - a.time;
        let (mut lo, mut hi) = (
            ((s - 1.0 / COARSE as f64) * h).max(0.0),
            ((s + 1.0 / COARSE as f64) * h).min(h),
        );
        let f = |tau: f64| (advance(a, tau, self.eps).x() - z).norm();
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = hi - g * (hi - lo);
        let mut d = lo + g * (hi - lo);
        let (mut fc, mut fd) = (f(c), f(d));
        for _ in 0..30 {
            if fc < fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - g * (hi - lo);
                fc = f(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + g * (hi - lo);
                fd = f(d);
            }
        }
        fc.min(fd)
    }
}

/// Distance between the sample set and its PT image, measured against the
/// interpolated curve.
pub fn pt_symmetry_defect(traj: &Trajectory) -> SymmetryDefect {
    let (mut lo, mut hi) = (
        Complex64::new(f64::INFINITY, f64::INFINITY),
        Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
    );
    for s in &traj.samples {
        let z = s.x();
        lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    let diameter = (hi - lo).norm();
    if traj.samples.len() < 2 {
        return SymmetryDefect {
            distance: 0.0,
            diameter,
        };
    }
    let curve = Curve::new(traj, diameter);
    let distance = traj.samples.iter().fold(0.0, |worst: f64, s| {
        let image = pt_reflect(&s.position);
        worst.max(curve.distance(image.to_cartesian(), image.theta(), worst))
    });
    SymmetryDefect { distance, diameter }
}
