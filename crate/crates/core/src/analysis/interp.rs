use num_complex::Complex64;

use crate::surface::{acceleration, Epsilon, PhaseState};

/// Quintic Hermite interpolation of the position between consecutive
/// samples, from position, velocity `2p` and acceleration at both ends.
pub(crate) struct Interpolant<'a> {
    pub samples: &'a [PhaseState],
    accel: Vec<Complex64>,
}

impl<'a> Interpolant<'a> {
    pub fn new(samples: &'a [PhaseState], eps: Epsilon) -> Self {
        Self {
            samples,
            accel: samples
                .iter()
                .map(|s| acceleration(&s.position, eps))
                .collect(),
        }
    }

    pub fn segments(&self) -> usize {
        self.samples.len().saturating_sub(1)
    }

    /// Position at fraction `s` of segment `i`.
    pub fn at(&self, i: usize, s: f64) -> Complex64 {
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        let h = b.time - a.time;
        let (s2, s3) = (s * s, s * s * s);
        let (s4, s5) = (s3 * s, s3 * s2);
        let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
        let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
        let h2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
        let h3 = 0.5 * s3 - s4 + 0.5 * s5;
        let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
        let h5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
        h0 * a.x()
            + h1 * h * 2.0 * a.p()
            + h2 * h * h * self.accel[i]
            + h3 * h * h * self.accel[i + 1]
            + h4 * h * 2.0 * b.p()
            + h5 * b.x()
    }
}

/// Positions with unwrapped angles at `per_segment` evenly spaced points of
/// each sampling interval, ending at the last sample.
pub fn dense_path(
    samples: &[PhaseState],
    eps: Epsilon,
    per_segment: usize,
) -> Vec<(Complex64, f64)> {
    let interp = Interpolant::new(samples, eps);
    let k = per_segment.max(1);
    let mut out = Vec::with_capacity(k * interp.segments() + 1);
    for i in 0..interp.segments() {
        let a = &samples[i];
        for j in 0..k {
            let z = interp.at(i, j as f64 / k as f64);
            out.push((z, a.position.theta() + (z / a.x()).arg()));
        }
    }
    if let Some(last) = samples.last() {
        out.push((last.x(), last.position.theta()));
    }
    out
}
