//! Dormand-Prince 8(5,3) explicit Runge-Kutta pair.
//!
//! Coefficients follow Hairer, Norsett & Wanner's DOP853. The error
//! estimate blends the fifth- and third-order embedded solutions.

use num_complex::Complex64;

use crate::surface::{Epsilon, SurfacePoint};

#[cfg(test)]
pub(crate) const C: [f64; 12] = [
    0.0,
    0.05260015195876773,
    0.0789002279381516,
    0.1183503419072274,
    0.2816496580927726,
    0.3333333333333333,
    0.25,
    0.3076923076923077,
    0.6512820512820513,
    0.6,
    0.8571428571428571,
    1.0,
];

pub(crate) const A: [[f64; 12]; 12] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [
        0.05260015195876773,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.0197250569845379,
        0.0591751709536137,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.02958758547680685,
        0.0,
        0.08876275643042054,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.2413651341592667,
        0.0,
        -0.8845494793282861,
        0.924834003261792,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.037037037037037035,
        0.0,
        0.0,
        0.17082860872947386,
        0.12546768756682242,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.037109375,
        0.0,
        0.0,
        0.17025221101954405,
        0.06021653898045596,
        -0.017578125,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.03709200011850479,
        0.0,
        0.0,
        0.17038392571223998,
        0.10726203044637328,
        -0.015319437748624402,
        0.008273789163814023,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.6241109587160757,
        0.0,
        0.0,
        -3.3608926294469414,
        -0.868219346841726,
        27.59209969944671,
        20.154067550477894,
        -43.48988418106996,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.47766253643826434,
        0.0,
        0.0,
        -2.4881146199716677,
        -0.590290826836843,
        21.230051448181193,
        15.279233632882423,
        -33.28821096898486,
        -0.020331201708508627,
        0.0,
        0.0,
        0.0,
    ],
    [
        -0.9371424300859873,
        0.0,
        0.0,
        5.186372428844064,
        1.0914373489967295,
        -8.149787010746927,
        -18.52006565999696,
        22.739487099350505,
        2.4936055526796523,
        -3.0467644718982196,
        0.0,
        0.0,
    ],
    [
        2.273310147516538,
        0.0,
        0.0,
        -10.53449546673725,
        -2.0008720582248625,
        -17.9589318631188,
        27.94888452941996,
        -2.8589982771350235,
        -8.87285693353063,
        12.360567175794303,
        0.6433927460157636,
        0.0,
    ],
];

pub(crate) const B: [f64; 12] = [
    0.054293734116568765,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    0.3111643669578199,
    -0.1521609496625161,
    0.20136540080403034,
    0.04471061572777259,
];

pub(crate) const E3: [f64; 12] = [
    -0.18980075407240762,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    -0.4226823213237919,
    -0.1521609496625161,
    0.20136540080403034,
    0.02265179219836082,
];

pub(crate) const E5: [f64; 12] = [
    0.01312004499419488,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.2251564463762044,
    -0.4957589496572502,
    1.6643771824549864,
    -0.35032884874997366,
    0.3341791187130175,
    0.08192320648511571,
    -0.022355307863886294,
];

/// Cartesian phase-space vector `(x, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cartesian {
    pub x: Complex64,
    pub p: Complex64,
}

impl Cartesian {
    fn components(&self) -> [f64; 4] {
        [self.x.re, self.x.im, self.p.re, self.p.im]
    }
}

/// Right-hand side `(2p, -(2+eps) x (ix)^eps)` with the power taken on the
/// branch selected by `theta`.
pub(crate) fn rhs(y: &Cartesian, theta: f64, eps: Epsilon) -> Cartesian {
    let e = eps.value();
    let force =
        SurfacePoint::unchecked(y.x.norm(), theta).power(1.0 + e, e * std::f64::consts::FRAC_PI_2);
    Cartesian {
        x: 2.0 * y.p,
        p: -(2.0 + e) * force,
    }
}

/// Unwrapped angle of `x`, continued from the base point `(x0, theta0)`.
pub(crate) fn continue_angle(x0: Complex64, theta0: f64, x: Complex64) -> f64 {
    theta0 + (x / x0).arg()
}

pub(crate) struct StepResult {
    pub y: Cartesian,
    pub theta: f64,
    /// Blended error estimate per component, unscaled, without the factor h.
    pub err5: [f64; 4],
    pub err3: [f64; 4],
}

/// One DOP853 step of length `h` from `y0` (angle `theta0`), given `f0 = rhs(y0)`.
pub(crate) fn step(
    y0: &Cartesian,
    theta0: f64,
    f0: &Cartesian,
    h: f64,
    eps: Epsilon,
) -> StepResult {
    let mut k = [Cartesian {
        x: Complex64::default(),
        p: Complex64::default(),
    }; 12];
    k[0] = *f0;
    for s in 1..12 {
        let mut x = y0.x;
        let mut p = y0.p;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                x += h * a * kj.x;
                p += h * a * kj.p;
            }
        }
        let theta = continue_angle(y0.x, theta0, x);
        k[s] = rhs(&Cartesian { x, p }, theta, eps);
    }

    let mut x = y0.x;
    let mut p = y0.p;
    let mut e5 = Cartesian {
        x: Complex64::default(),
        p: Complex64::default(),
    };
    let mut e3 = e5;
    for (j, kj) in k.iter().enumerate() {
        x += h * B[j] * kj.x;
        p += h * B[j] * kj.p;
        e5.x += E5[j] * kj.x;
        e5.p += E5[j] * kj.p;
        e3.x += E3[j] * kj.x;
        e3.p += E3[j] * kj.p;
    }
    let y = Cartesian { x, p };
    StepResult {
        y,
        theta: continue_angle(y0.x, theta0, x),
        err5: e5.components(),
        err3: e3.components(),
    }
}

/// Scaled error norm; a step is acceptable when this is at most 1.
pub(crate) fn error_norm(
    res: &StepResult,
    y0: &Cartesian,
    h: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> f64 {
    let a = y0.components();
    let b = res.y.components();
    let mut n5 = 0.0;
    let mut n3 = 0.0;
    for i in 0..4 {
        let scale = abs_tol + rel_tol * a[i].abs().max(b[i].abs());
        n5 += (res.err5[i] / scale).powi(2);
        n3 += (res.err3[i] / scale).powi(2);
    }
    if n5 == 0.0 && n3 == 0.0 {
        return 0.0;
    }
    h.abs() * n5 / ((n5 + 0.01 * n3) * 4.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tableau_is_consistent() {
        for s in 0..12 {
            let row: f64 = A[s].iter().sum();
            assert!((row - C[s]).abs() < 1e-13, "row {s}");
        }
        assert!((B.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(E5.iter().sum::<f64>().abs() < 1e-13);
        assert!(E3.iter().sum::<f64>().abs() < 1e-13);
    }

    #[test]
    fn eighth_order_on_harmonic_oscillator() {
        // eps = 0: x'' = -4x, x(0) = 1, p(0) = 0 => x = cos 2t.
        let eps = Epsilon::new(0.0).unwrap();
        let y0 = Cartesian {
            x: Complex64::new(1.0, 0.0),
            p: Complex64::default(),
        };
        let f0 = rhs(&y0, 0.0, eps);
        let err = |h: f64| (step(&y0, 0.0, &f0, h, eps).y.x.re - (2.0 * h).cos()).abs();
        let ratio = err(0.4) / err(0.2);
        // Local error scales as h^9.
        assert!(ratio > 2f64.powi(8), "ratio {ratio}");
    }
}
