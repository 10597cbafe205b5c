//! Polynomial approximations: Chebyshev constructions for 1/x and
//! (1 + nu x)^{-1}, degree bounds for e^{-x} on an interval, and empirical
//! near-minimax degree measurement.

mod exp;
mod inverse;

pub use exp::{
    cheb_interpolate_exp, cheb_truncate_exp, lower_bound_witness, minimal_degree_empirical,
    DEFAULT_DEGREE_CAP,
};
pub use inverse::{q_inverse, q_star};

use serde::Serialize;

/// What a [`PolynomialApprox`] approximates, which fixes how its error is measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// e^{-x}; error is sup |e^{-x} - p(x)| / e^{-a}.
    NegExp,
    /// 1/x; error is sup |x p(x) - 1|.
    Inverse,
    /// 1/(1 + nu x); error is sup |(1 + nu x) p(x) - 1|.
    ShiftedInverse { nu: f64 },
}

#[derive(Debug, Clone, PartialEq)]
enum Evaluator {
    /// e^{log_scale} times a Chebyshev series in t = (2x - a - b)/(b - a).
    Series { coeffs: Vec<f64>, log_scale: f64 },
    /// (1/x)(1 - T_{k+1}(xi(x)) / T_{k+1}(xi(0))) on [lo, hi], evaluated at `shift + slope * x`.
    InverseCheb { lo: f64, hi: f64, k: usize, shift: f64, slope: f64 },
}

/// An evaluable polynomial on [a, b] with its degree and grid-measured error.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialApprox {
    pub interval: (f64, f64),
    pub degree: usize,
    pub measured_error: f64,
    pub grid_size: usize,
    pub target: Target,
    evaluator: Evaluator,
}

impl PolynomialApprox {
    /// A Chebyshev series on [a, b] approximating e^{-x}; error measured on
    /// the standard grid for its degree.
    pub fn from_chebyshev(a: f64, b: f64, coeffs: Vec<f64>) -> Self {
        let degree = coeffs.len().saturating_sub(1);
        let mut p = PolynomialApprox {
            interval: (a, b),
            degree,
            measured_error: 0.0,
            grid_size: grid_size(degree),
            target: Target::NegExp,
            evaluator: Evaluator::Series { coeffs, log_scale: 0.0 },
        };
        p.measured_error = p.grid_error(p.grid_size);
        p
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.interval;
        match &self.evaluator {
            Evaluator::Series { coeffs, log_scale } => log_scale.exp() * clenshaw(coeffs, cheb_arg(a, b, x)),
            Evaluator::InverseCheb { lo, hi, k, shift, slope } => {
                inverse::eval_inverse(*lo, *hi, *k, shift + slope * x)
            }
        }
    }

    /// Error of this approximant at one point, in the convention of its target.
    pub fn error_at(&self, x: f64) -> f64 {
        match self.target {
            Target::NegExp => self.relative_residual(x).abs(),
            Target::Inverse => (x * self.eval(x) - 1.0).abs(),
            Target::ShiftedInverse { nu } => ((1.0 + nu * x) * self.eval(x) - 1.0).abs(),
        }
    }

    /// e^{-x} - p(x), without scaling.
    pub fn residual(&self, x: f64) -> f64 {
        (-x).exp() - self.eval(x)
    }

    /// (e^{-x} - p(x)) / e^{-a}, computed without forming e^{-a} when the
    /// series already carries that scale.
    pub fn relative_residual(&self, x: f64) -> f64 {
        let a = self.interval.0;
        match &self.evaluator {
            Evaluator::Series { coeffs, log_scale } => {
                (a - x).exp() - (log_scale + a).exp() * clenshaw(coeffs, cheb_arg(a, self.interval.1, x))
            }
            _ => self.residual(x) / (-a).exp(),
        }
    }

    /// Sum of |coefficients| relative to e^{-a}, a bound on evaluation noise.
    pub(crate) fn coefficient_mass(&self) -> f64 {
        match &self.evaluator {
            Evaluator::Series { coeffs, log_scale } => {
                (log_scale + self.interval.0).exp() * coeffs.iter().map(|c| c.abs()).sum::<f64>()
            }
            _ => 1.0,
        }
    }

    /// Max of `error_at` over `points` equispaced points including both ends.
    pub fn grid_error(&self, points: usize) -> f64 {
        grid(self.interval, points).map(|x| self.error_at(x)).fold(0.0, f64::max)
    }
}

/// Validation grid size for degree d: 10 (d + 1) + 1000.
pub fn grid_size(d: usize) -> usize {
    10 * (d + 1) + 1000
}

pub(crate) fn grid((a, b): (f64, f64), points: usize) -> impl Iterator<Item = f64> {
    let points = points.max(2);
    (0..points).map(move |i| if i + 1 == points { b } else { a + (b - a) * i as f64 / (points - 1) as f64 })
}

fn cheb_arg(a: f64, b: f64, x: f64) -> f64 {
    if b > a {
        (2.0 * x - a - b) / (b - a)
    } else {
        0.0
    }
}

/// Sum_m c_m T_m(t).
pub(crate) fn clenshaw(c: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &cm in c.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + cm;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(0.0) + t * b1 - b2
}

/// ceil(sqrt(max(ln^2(1/delta), (b - a) ln(1/delta))) ln(1/delta) max(1, ln ln max(1/delta, 3))).
/// A scaling guide with unit constants, not a certified bound.
pub fn degree_upper_bound(a: f64, b: f64, delta: f64) -> usize {
    let width = (b - a).max(0.0);
    let l = (1.0 / delta).ln().max(0.0);
    let lnln = (1.0 / delta).max(3.0).ln().ln().max(1.0);
    let v = (l * l).max(width * l).sqrt() * l * lnln;
    // guard against 0.9999999 style rounding just under an integer
    (v - 1e-9 * v.max(1.0)).ceil().max(0.0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LowerBound {
    pub degree: usize,
    pub applicable: bool,
}

/// ceil(sqrt(b - a) / 2), valid when b - a >= ln 4 and delta <= 1/8.
pub fn degree_lower_bound(a: f64, b: f64, delta: f64) -> LowerBound {
    let width = b - a;
    if !(width >= 4f64.ln()) || !(delta > 0.0 && delta <= 0.125) {
        return LowerBound { degree: 0, applicable: false };
    }
    LowerBound { degree: (0.5 * width.sqrt()).ceil() as usize, applicable: true }
}
