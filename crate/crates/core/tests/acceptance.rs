//! Acceptance criteria, one pass/fail line each.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use riemann_flow::analysis::{
    analytic_period, classify, critical_point, dense_path, escape_angles, escape_phase_residual,
    fit_escape, launch_on_ray, numeric_period, principal_region_edge, terminating_start,
    OrbitClassification, Verdict,
};
use riemann_flow::integrator::{
    integrate, integrate_polar, launch_from_turning_point, launch_on_shell, EventKind, Heading,
    IntegratorConfig, StopReason,
};
use riemann_flow::surface::{pt_reflect, sheet_index, turning_point, MomentumPolar, Side};
use riemann_flow::sweep::{
    critical_point_search, find_s0_minimum, gap_table, GapOptions, GapOutcome,
};
use riemann_flow::{Epsilon, PhaseState, SurfacePoint, Trajectory};

type Outcome = Result<String, String>;

fn eps(v: f64) -> Epsilon {
    Epsilon::new(v).unwrap()
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn axis(y: f64) -> SurfacePoint {
    SurfacePoint::on_negative_imaginary_axis(y).unwrap()
}

fn orbit(e: f64, y: f64, cfg: &IntegratorConfig) -> Trajectory {
    integrate(
        &launch_on_shell(axis(y), Heading::Positive, eps(e)),
        eps(e),
        cfg,
    )
    .unwrap()
}

fn golden() -> f64 {
    1.0 + 2f64.sqrt()
}

fn c1_analytic_period() -> Outcome {
    let t0 = analytic_period(eps(0.0)).map_err(err)?;
    let t1 = analytic_period(eps(1.0 / PI)).map_err(err)?;
    check(
        (t0 - PI).abs() <= 1e-12 && (t1 - 2.93702).abs() <= 5e-5,
        format!("T(0) = {t0:.15}, T(1/pi) = {t1:.7}"),
    )
}

fn c2_numeric_period() -> Outcome {
    let cfg = IntegratorConfig::default();
    let mut worst: f64 = 0.0;
    for e in [0.0, 0.1, 1.0 / PI, 0.5, 1.0] {
        let ta = analytic_period(eps(e)).map_err(err)?;
        // R0 ends at x0, which shrinks to zero with eps; sheet 0 is the whole surface at eps = 0.
        // The terminating start s0 sits near x0 / 2.
        let x0 = if e == 0.0 {
            2.0
        } else {
            critical_point_search(eps(e), 0, 1e-6, &cfg).map_err(err)?
        };
        for y in [0.2 * x0, 0.7 * x0, 0.9 * x0] {
            let c = classify(axis(y), eps(e), &cfg).map_err(err)?;
            if !matches!(&c.verdict, Verdict::Closed { enclosed_pairs, .. } if *enclosed_pairs == BTreeSet::from([0]))
            {
                return Err(format!(
                    "eps={e} y={y} is not in the principal region: {:?}",
                    c.verdict
                ));
            }
            let tn = numeric_period(axis(y), eps(e), &cfg).map_err(err)?;
            worst = worst.max((tn - ta).abs() / ta);
        }
    }
    check(
        worst <= 1e-6,
        format!("max relative period error {worst:.2e} over 15 launches"),
    )
}

fn c3_harmonic() -> Outcome {
    let cfg = IntegratorConfig::default();
    let mut worst: f64 = 0.0;
    for y in [0.5, 1.0, 1.5, 2.0] {
        let t = orbit(0.0, y, &cfg);
        let p = t.period().ok_or(format!("y={y} did not close"))?;
        if t.sheets_visited() != BTreeSet::from([0]) {
            return Err(format!("y={y} left sheet 0"));
        }
        worst = worst.max((p - PI).abs());
    }
    check(worst <= 1e-8, format!("max |T - pi| = {worst:.2e}"))
}

fn c4_slope() -> Outcome {
    let e = eps(1.0 / PI);
    let t = terminating_start(0, e, &IntegratorConfig::default()).map_err(err)?;
    let want = PI / (2.0 + 4.0 * PI);
    let d = (t.departure_angle - want).abs();
    check(
        d <= 1e-3,
        format!(
            "departure {:.6} rad vs {want:.6}, diff {d:.1e}",
            t.departure_angle
        ),
    )
}

fn c5_critical_eps_one() -> Outcome {
    let cfg = IntegratorConfig::default();
    let c = critical_point(eps(1.0), 0, 1.0, 3.0, 1e-6, &cfg).map_err(err)?;
    let t = orbit(1.0, 2.0, &cfg);
    let closest = dense_path(&t.samples, eps(1.0), 32)
        .iter()
        .map(|(z, _)| z.norm())
        .fold(f64::INFINITY, f64::min);
    check(
        (c.y - 2.0).abs() <= 1e-3 && closest <= 1e-3,
        format!(
            "x0 = -{:.6}i, orbit from -2i passes {closest:.1e} from the origin",
            c.y
        ),
    )
}

fn c6_x1() -> Outcome {
    let cfg = IntegratorConfig::default();
    let t = orbit(1.0 / PI, 0.68, &cfg.with_max_time(60.0));
    let recross = t
        .axis_crossings()
        .filter(|(_, sheet, _)| *sheet == 0)
        .map(|(_, _, im)| -im)
        .find(|y| (y - 0.68).abs() > 1e-3)
        .ok_or("no second principal-axis crossing")?;
    let c = critical_point(eps(1.0 / PI), 1, 7.0, 7.8, 1e-6, &cfg).map_err(err)?;
    let want = 7.389098;
    check(
        (recross - want).abs() <= 1e-2 && (c.y - want).abs() <= 1e-2,
        format!(
            "re-crossing -{recross:.5}i, boundary-1 critical point -{:.6}i",
            c.y
        ),
    )
}

fn c7_s0_anchors() -> Outcome {
    let cfg = IntegratorConfig::default();
    let a = terminating_start(0, eps(1.0 / PI), &cfg)
        .map_err(err)?
        .s_value;
    let b = terminating_start(0, eps(2.0), &cfg).map_err(err)?.s_value;
    let c = terminating_start(1, eps(1.0 / PI), &cfg)
        .map_err(err)?
        .s_value;
    check(
        (a - 0.325235).abs() <= 1e-4 && (b - 1.0).abs() <= 1e-4 && (c - 2.31061).abs() <= 1e-3,
        format!("s0(1/pi) = -{a:.6}i, s0(2) = -{b:.7}i, s1(1/pi) = -{c:.5}i"),
    )
}

fn c8_s0_minimum() -> Outcome {
    let (e, y) = find_s0_minimum(3.0, 12.0, &IntegratorConfig::default()).map_err(err)?;
    check(
        (e - 7.62547).abs() <= 0.05 && (y - 1.21188).abs() <= 1e-3,
        format!("eps* = {e:.5}, ordinate {y:.6}"),
    )
}

fn c9_table() -> Outcome {
    let cfg = IntegratorConfig::default()
        .with_tolerances(1e-12, 1e-12)
        .with_max_time(400.0);
    let table = gap_table(eps(golden()), 8, &cfg, &GapOptions::default()).map_err(err)?;
    let expected = [
        (0, 1.05872),
        (4, 0.191947),
        (1, 0.0958837),
        (7, 0.0469295),
        (5, 0.0312037),
        (3, 0.0167618),
        (6, 0.00378715),
    ];
    let mut notes = vec![];
    let mut ok = true;
    for (n, want) in expected {
        let got = table.rows[n].s_value();
        let good = got.is_some_and(|g| (g - want).abs() <= 1e-3f64.max(0.01 * want));
        ok &= good;
        notes.push(format!(
            "s{n}={}",
            got.map_or("none".into(), |g| format!("{g:.6}"))
        ));
    }
    for n in [2, 8] {
        let spirals = matches!(
            &table.rows[n].outcome,
            GapOutcome::NoTermination { path: Some(p), .. } if p.spirals_outward
        );
        ok &= spirals;
        notes.push(format!(
            "n={n} {}",
            if spirals {
                "spirals outward"
            } else {
                "unexpected outcome"
            }
        ));
    }
    ok &= table.in_gap_order == vec![4, 1, 7, 5, 3, 6];
    notes.push(format!("gap order {:?}", table.in_gap_order));
    check(ok, notes.join(", "))
}

fn c10_escape_rays() -> Outcome {
    let e = eps(1.0);
    let tp = turning_point(1, Side::Right, e).map_err(err)?;
    let launch = launch_from_turning_point(&tp, e, 1e-4).map_err(err)?;
    let t = integrate(&launch, e, &IntegratorConfig::default()).map_err(err)?;
    let Some(EventKind::Escape { theta }) = t.terminal_event().map(|ev| ev.kind) else {
        return Err("launch from i did not escape".into());
    };
    let drift = t
        .samples
        .iter()
        .map(|s| s.x().re.abs() / s.position.r())
        .fold(0.0, f64::max);
    let a1 = escape_angles(e, 1..=1).map_err(err)?[0].theta;
    let a2 = escape_angles(eps(2.0), 0..=1).map_err(err)?;
    let residual = escape_phase_residual(theta, e);
    let ok = drift < 1e-6
        && (a1 - FRAC_PI_2).abs() < 1e-12
        && a2[0].theta.abs().min((a2[0].theta + PI).abs()) < 1e-12
        && a2[1].theta.abs().min((a2[1].theta + PI).abs()) < 1e-12
        && a2[0].theta != a2[1].theta
        && residual < 1e-3;
    check(
        ok,
        format!("max |Re x|/r = {drift:.1e}, escape angle {theta:.9}, residual {residual:.1e}"),
    )
}

fn c11_blowup() -> Outcome {
    let mut notes = vec![];
    let mut ok = true;
    for e in [1.0 / PI, 1.0, 2.0] {
        let ray = escape_angles(eps(e), 1..=1).map_err(err)?[0];
        let launch = launch_on_ray(&ray, 2.0, eps(e)).map_err(err)?;
        let t = integrate(&launch, eps(e), &IntegratorConfig::default()).map_err(err)?;
        let fit = fit_escape(&t, eps(e)).map_err(err)?;
        ok &= fit.accepted && fit.relative_exponent_error() <= 0.02 && fit.t_star.is_finite();
        notes.push(format!(
            "eps={e:.4}: k={:.5} (want {:.5}), t*={:.4}",
            fit.fitted_exponent, fit.expected_exponent, fit.t_star
        ));
    }
    check(ok, notes.join("; "))
}

struct Corpus {
    trajectories: Vec<Trajectory>,
    classified: Vec<(f64, f64, OrbitClassification)>,
}

fn corpus(cfg: &IntegratorConfig) -> Result<Corpus, String> {
    let mut trajectories = vec![];
    let mut classified = vec![];
    for e in [0.0, 0.1, 1.0 / PI, 0.5, 1.0, 1.5, 2.0, 3.0, golden()] {
        for y in [0.25, 0.5, 1.0, 1.5, 2.0, 3.0] {
            trajectories.push(orbit(e, y, cfg));
            classified.push((e, y, classify(axis(y), eps(e), cfg).map_err(err)?));
        }
    }
    trajectories.push(orbit(1.0 / PI, 0.68, cfg));
    classified.push((
        1.0 / PI,
        0.68,
        classify(axis(0.68), eps(1.0 / PI), cfg).map_err(err)?,
    ));
    Ok(Corpus {
        trajectories,
        classified,
    })
}

fn c12_properties() -> Outcome {
    let cfg = IntegratorConfig::default();
    let corpus = corpus(&cfg)?;
    let mut notes = vec![];
    let mut ok = true;

    let accepted: Vec<&Trajectory> = corpus
        .trajectories
        .iter()
        .filter(|t| {
            !matches!(
                t.terminal_event().map(|e| e.kind),
                Some(EventKind::EnergyFault { .. })
            )
        })
        .collect();
    let drift = accepted
        .iter()
        .map(|t| t.max_energy_error())
        .fold(0.0, f64::max);
    ok &= drift <= cfg.energy_tol;
    notes.push(format!(
        "energy drift {drift:.1e} on {} runs",
        accepted.len()
    ));

    let tight = IntegratorConfig::default().with_tolerances(1e-13, 1e-13);
    let mut polar_gap: f64 = 0.0;
    for (e, y) in [(1.0 / PI, 0.5), (0.5, 0.4), (1.0, 1.0), (0.1, 0.8)] {
        let t = orbit(e, y, &tight);
        let slowest = t
            .samples
            .iter()
            .map(|s| s.momentum.a())
            .fold(f64::INFINITY, f64::min);
        if slowest <= 1e-3 {
            return Err(format!("segment eps={e} y={y} passes near a turning point"));
        }
        let end = t.samples.last().unwrap();
        let p = integrate_polar(&t.launch, eps(e), end.time, 1e-13, 1e-13).map_err(err)?;
        polar_gap = polar_gap
            .max((p.position.r() - end.position.r()).abs())
            .max((p.position.theta() - end.position.theta()).abs());
    }
    ok &= polar_gap <= 1e-8;
    notes.push(format!("polar vs Cartesian {polar_gap:.1e}"));

    let mut reversal: f64 = 0.0;
    for (e, y, span) in [
        (1.0 / PI, 0.5, 2.0),
        (1.0 / PI, 0.68, 5.0),
        (0.0, 1.0, 2.5),
        (1.0, 1.5, 1.0),
    ] {
        let fwd = orbit(e, y, &cfg.with_max_time(span));
        if fwd.stop != StopReason::MaxTime {
            return Err(format!("forward run eps={e} y={y} stopped early"));
        }
        let end = fwd.samples.last().unwrap();
        let back_launch =
            PhaseState::new(end.position, MomentumPolar::from_cartesian(-end.p()), 0.0);
        let back = integrate(&back_launch, eps(e), &cfg.with_max_time(span)).map_err(err)?;
        let home = back.samples.last().unwrap();
        let d = ((home.x() - fwd.launch.x()).norm_sqr() + (home.p() + fwd.launch.p()).norm_sqr())
            .sqrt();
        reversal = reversal.max(d);
    }
    ok &= reversal <= 10.0 * cfg.closure_tol;
    notes.push(format!("time reversal {reversal:.1e}"));

    let closed: Vec<_> = corpus
        .classified
        .iter()
        .filter_map(|(e, y, c)| match &c.verdict {
            Verdict::Closed { enclosed, .. } => Some((*e, *y, enclosed.len(), c.pt_symmetric)),
            _ => None,
        })
        .collect();
    let bad_enclosure: Vec<_> = closed
        .iter()
        .filter(|c| c.2 != 2)
        .map(|c| (c.0, c.1))
        .collect();
    let asymmetric: Vec<_> = closed.iter().filter(|c| !c.3).map(|c| (c.0, c.1)).collect();
    ok &= bad_enclosure.is_empty() && asymmetric.is_empty() && !closed.is_empty();
    notes.push(format!(
        "{} closed orbits, two turning points enclosed except {bad_enclosure:?}, PT-symmetric except {asymmetric:?}",
        closed.len()
    ));

    let mut involution = true;
    for k in -400..=400 {
        let theta = k as f64 * 0.05 + 0.0123;
        let p = SurfacePoint::new(1.0 + 0.01 * (k as f64).abs(), theta).map_err(err)?;
        let q = pt_reflect(&p);
        involution &= pt_reflect(&q) == p;
        let on_cut = ((theta + 1.5 * PI) / (2.0 * PI)).fract().abs() < 1e-9;
        involution &= on_cut || sheet_index(q.theta()) == -sheet_index(p.theta());
    }
    ok &= involution;
    notes.push(format!(
        "PT involution and sheet map {}",
        if involution { "hold" } else { "fail" }
    ));
    check(ok, notes.join(", "))
}

fn c13_topology_flip() -> Outcome {
    let cfg = IntegratorConfig::default();
    let e = eps(golden());
    let upper = classify(axis(0.2), e, &cfg).map_err(err)?;
    let lower = classify(axis(0.25), e, &cfg).map_err(err)?;
    let edge = principal_region_edge(e, 0.05, 0.5, 1e-4, &cfg).map_err(err)?;
    let upper_ok = match &upper.verdict {
        Verdict::Closed {
            sheets_visited,
            enclosed_pairs,
            ..
        } => {
            upper.pt_symmetric
                && *sheets_visited == BTreeSet::from([-1, 0, 1])
                && !enclosed_pairs.contains(&0)
        }
        _ => false,
    };
    let lower_ok = matches!(
        &lower.verdict,
        Verdict::Closed { enclosed_pairs, sheets_visited, .. }
            if *enclosed_pairs == BTreeSet::from([0]) && *sheets_visited == BTreeSet::from([0])
    ) && lower.pt_symmetric;
    let pairs = match &upper.verdict {
        Verdict::Closed { enclosed_pairs, .. } => format!("{enclosed_pairs:?}"),
        v => format!("{v:?}"),
    };
    check(
        upper_ok && lower_ok && 0.2 < edge.y,
        format!("-0.2i closed on sheets -1..1 around pair {pairs}; -0.25i closed in R0; R0 edge at -{:.5}i", edge.y),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("analytic period", c1_analytic_period),
        ("numeric vs analytic period", c2_numeric_period),
        ("harmonic baseline", c3_harmonic),
        ("turning-point slope", c4_slope),
        ("critical point at eps = 1", c5_critical_eps_one),
        ("x1 at eps = 1/pi", c6_x1),
        ("s0 anchors", c7_s0_anchors),
        ("s0 minimum", c8_s0_minimum),
        ("gap table at eps = 1 + sqrt 2", c9_table),
        ("escape rays", c10_escape_rays),
        ("blowup law", c11_blowup),
        ("property suite", c12_properties),
        ("topology flip at eps > 2", c13_topology_flip),
    ];
    let mut failed = vec![];
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(d) => println!("PASS {:>2} {name} ({secs:.1}s): {d}", i + 1),
            Err(d) => {
                println!("FAIL {:>2} {name} ({secs:.1}s): {d}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
