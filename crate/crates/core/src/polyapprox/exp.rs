use std::f64::consts::PI;

use super::{grid, grid_size, Evaluator, PolynomialApprox, Target};
use crate::error::{Error, Result};

pub const DEFAULT_DEGREE_CAP: usize = 4096;

/// e^{-a} must stay representable for the absolute evaluation.
const MIN_LEFT_END: f64 = -700.0;

/// Degree-d interpolant of e^{-x} at the d + 1 Chebyshev points of [a, b].
///
/// Interpolates g(x) = e^{-(x - a)} and keeps e^{-a} as a separate scale, so
/// the relative error is the same on [a, a + W] for every a.
pub fn cheb_interpolate_exp(a: f64, b: f64, d: usize) -> Result<PolynomialApprox> {
    if !(a.is_finite() && b.is_finite() && b >= a) {
        return Err(Error::InvalidParameter(format!("need finite b >= a, got [{a}, {b}]")));
    }
    if a < MIN_LEFT_END {
        return Err(Error::Overflow(format!("e^{{-a}} overflows for a = {a}")));
    }
    let coeffs = if b == a {
        let mut c = vec![0.0; d + 1];
        c[0] = 1.0;
        c
    } else {
        interpolation_coeffs(a, b, d)
    };
    let mut p = PolynomialApprox {
        interval: (a, b),
        degree: d,
        measured_error: 0.0,
        grid_size: grid_size(d),
        target: Target::NegExp,
        evaluator: Evaluator::Series { coeffs, log_scale: -a },
    };
    p.measured_error = p.grid_error(p.grid_size);
    Ok(p)
}

/// Degree-d truncation of the Chebyshev series of e^{-x} on [a, b].
///
/// The series is read off a high-degree interpolant whose trailing
/// coefficients have dropped to rounding noise, so aliasing is negligible.
/// Far below the minimal degree its residual alternates with much more even
/// peaks than the interpolant's, whose error decays like e^{-x} to the right,
/// which makes it the better probe for [`lower_bound_witness`].
pub fn cheb_truncate_exp(a: f64, b: f64, d: usize) -> Result<PolynomialApprox> {
    let mut p = cheb_interpolate_exp(a, b, d)?;
    if b == a {
        return Ok(p);
    }
    let mut big = (2 * d + 16).max(32);
    let coeffs = loop {
        let c = interpolation_coeffs(a, b, big);
        if c[big - 2..].iter().all(|x| x.abs() < 64.0 * f64::EPSILON) || big >= 1 << 14 {
            break c;
        }
        big *= 2;
    };
    p.evaluator = Evaluator::Series { coeffs: coeffs[..=d].to_vec(), log_scale: -a };
    p.measured_error = p.grid_error(p.grid_size);
    Ok(p)
}

fn interpolation_coeffs(a: f64, b: f64, d: usize) -> Vec<f64> {
    let n = d + 1;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let theta: Vec<f64> = (0..n).map(|j| PI * (j as f64 + 0.5) / n as f64).collect();
    let g: Vec<f64> = theta.iter().map(|th| (a - (mid + half * th.cos())).exp()).collect();
    (0..n)
        .map(|m| {
            let s: f64 = theta.iter().zip(&g).map(|(th, gj)| gj * (m as f64 * th).cos()).sum();
            let c = 2.0 * s / n as f64;
            if m == 0 {
                0.5 * c
            } else {
                c
            }
        })
        .collect()
}

/// Smallest d <= `cap` whose Chebyshev interpolant, and the next two, have
/// relative error at most delta. The three-wide window smooths the small
/// non-monotone wiggles so that bisection is sound.
pub fn minimal_degree_empirical(a: f64, b: f64, delta: f64, cap: usize) -> Result<usize> {
    if !(b > a) {
        return Err(Error::InvalidParameter(format!("need b > a, got [{a}, {b}]")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {delta}")));
    }
    let ok = |d: usize| -> Result<bool> {
        for e in d..d + 3 {
            if cheb_interpolate_exp(a, b, e)?.measured_error > delta {
                return Ok(false);
            }
        }
        Ok(true)
    };
    if ok(0)? {
        return Ok(0);
    }
    let mut lo = 0;
    let mut hi = 1;
    while !ok(hi)? {
        if hi >= cap {
            return Err(Error::DegreeCap { needed: hi + 1, cap });
        }
        lo = hi;
        hi = (2 * hi).min(cap);
    }
    // ok(hi) and !ok(lo)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Alternation lower bound on the best degree-d uniform error of e^{-x} on
/// p's interval, in absolute units.
///
/// Scans e^{-x} - p(x) on a fine grid, groups it into runs of constant sign
/// (values within rounding noise count as zero and are skipped) and takes the
/// peak of each run. Any d + 2 consecutive runs give alternating points, so the
/// smallest of their peaks bounds the best error from below; the result is the
/// best such window. Returns 0 when fewer than d + 2 runs exist or when p has
/// degree above d, since then the alternation certifies nothing.
pub fn lower_bound_witness(p: &PolynomialApprox, d: usize) -> f64 {
    if p.degree > d || p.target != Target::NegExp {
        return 0.0;
    }
    let points = 20 * (d + 2) + 2000;
    let floor = 64.0 * f64::EPSILON * p.coefficient_mass().max(1.0);
    let mut peaks: Vec<f64> = Vec::new();
    let mut sign = 0.0;
    for x in grid(p.interval, points) {
        let r = p.relative_residual(x);
        if r.abs() <= floor {
            continue;
        }
        if r.signum() == sign {
            let last = peaks.last_mut().expect("run in progress");
            *last = last.max(r.abs());
        } else {
            sign = r.signum();
            peaks.push(r.abs());
        }
    }
    let w = d + 2;
    if peaks.len() < w {
        return 0.0;
    }
    let best =
        peaks.windows(w).map(|win| win.iter().copied().fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    best * (-p.interval.0).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_matches_interpolant_when_converged() {
        let t = cheb_truncate_exp(0.0, 1.0, 14).unwrap();
        let i = cheb_interpolate_exp(0.0, 1.0, 14).unwrap();
        assert!(t.measured_error < 1e-14 && i.measured_error < 1e-14);
        assert_eq!(t.degree, 14);
    }

    #[test]
    fn truncation_gives_stronger_witness_far_below_minimal_degree() {
        // the interpolant's error is tiny near b where e^{-x} is, so its
        // alternation peaks are uneven; the truncation's are not
        for (w, d) in [(16.0, 1), (64.0, 3), (256.0, 7)] {
            let t = lower_bound_witness(&cheb_truncate_exp(0.0, w, d).unwrap(), d);
            let i = lower_bound_witness(&cheb_interpolate_exp(0.0, w, d).unwrap(), d);
            assert!(t > 5.0 * i, "W = {w}: {t} vs {i}");
            // still a lower bound on what a degree-d polynomial achieves
            assert!(t <= cheb_truncate_exp(0.0, w, d).unwrap().measured_error);
            assert!(t <= cheb_interpolate_exp(0.0, w, d).unwrap().measured_error);
        }
    }

    #[test]
    fn degenerate_interval_is_constant() {
        let p = cheb_interpolate_exp(2.0, 2.0, 0).unwrap();
        assert_eq!(p.measured_error, 0.0);
        assert!((p.eval(2.0) - (-2f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn unit_interval_degree_eight() {
        let p = cheb_interpolate_exp(0.0, 1.0, 8).unwrap();
        assert!(p.measured_error <= 1e-8, "{}", p.measured_error);
        assert_eq!(p.grid_size, 1090);
    }

    #[test]
    fn interpolates_at_nodes() {
        let (a, b, d) = (1.0, 7.0, 5);
        let p = cheb_interpolate_exp(a, b, d).unwrap();
        for j in 0..=d {
            let x = 0.5 * (a + b) + 0.5 * (b - a) * (PI * (j as f64 + 0.5) / (d + 1) as f64).cos();
            assert!((p.eval(x) - (-x).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn error_decreases_on_wide_interval() {
        let mut last = f64::INFINITY;
        for d in (2..60).step_by(4) {
            let e = cheb_interpolate_exp(0.0, 64.0, d).unwrap().measured_error;
            if last < 1e-12 {
                // rounding floor reached
                break;
            }
            assert!(e < last, "d={d}: {e} !< {last}");
            last = e;
        }
    }

    #[test]
    fn overflow_guard() {
        assert!(matches!(cheb_interpolate_exp(-800.0, 0.0, 4), Err(Error::Overflow(_))));
        assert!(cheb_interpolate_exp(1.0, 0.0, 4).is_err());
    }

    #[test]
    fn minimal_degree_examples() {
        let d: Vec<usize> = [16.0, 64.0, 256.0]
            .iter()
            .map(|&w| minimal_degree_empirical(0.0, w, 1e-3, DEFAULT_DEGREE_CAP).unwrap())
            .collect();
        for pair in d.windows(2) {
            let r = pair[1] as f64 / pair[0] as f64;
            assert!((1.7..=2.6).contains(&r), "{d:?}");
        }
        let d16 = minimal_degree_empirical(0.0, 16.0, 0.125, DEFAULT_DEGREE_CAP).unwrap();
        assert!(d16 >= super::super::degree_lower_bound(0.0, 16.0, 0.125).degree);
    }

    #[test]
    fn minimal_degree_is_minimal() {
        let (a, b, delta) = (0.0, 40.0, 1e-4);
        let d = minimal_degree_empirical(a, b, delta, DEFAULT_DEGREE_CAP).unwrap();
        for e in d..d + 3 {
            assert!(cheb_interpolate_exp(a, b, e).unwrap().measured_error <= delta);
        }
        assert!(cheb_interpolate_exp(a, b, d - 1).unwrap().measured_error > delta);
    }

    #[test]
    fn shift_invariance() {
        for &a in &[3.0, 25.0, 300.0] {
            for &w in &[16.0, 64.0] {
                let base = minimal_degree_empirical(0.0, w, 1e-3, DEFAULT_DEGREE_CAP).unwrap();
                assert_eq!(minimal_degree_empirical(a, a + w, 1e-3, DEFAULT_DEGREE_CAP).unwrap(), base);
            }
        }
    }

    #[test]
    fn cap_is_reported() {
        assert!(matches!(minimal_degree_empirical(0.0, 4096.0, 1e-10, 16), Err(Error::DegreeCap { .. })));
    }

    #[test]
    fn witness_for_best_constant() {
        let c = 0.5 * (1.0 + (-1f64).exp());
        let p = PolynomialApprox::from_chebyshev(0.0, 1.0, vec![c]);
        let w = lower_bound_witness(&p, 0);
        assert!((w - 0.5 * (1.0 - (-1f64).exp())).abs() < 1e-15, "{w}");
    }

    #[test]
    fn witness_positive_for_interpolant() {
        for &(b, d) in &[(4.0, 3), (16.0, 1), (64.0, 5), (256.0, 10)] {
            let p = cheb_interpolate_exp(0.0, b, d).unwrap();
            let w = lower_bound_witness(&p, d);
            assert!(w > 0.0);
            assert!(w <= p.measured_error, "b={b} d={d}: {w} > {}", p.measured_error);
        }
    }

    #[test]
    fn witness_sound_across_family() {
        // the witness from one degree-d candidate must not exceed the error of any other
        for d in 1..8 {
            let base = cheb_interpolate_exp(0.0, 8.0, d).unwrap();
            let w = lower_bound_witness(&base, d);
            let Evaluator::Series { coeffs, log_scale } = base.evaluator.clone() else { unreachable!() };
            for k in 0..=d {
                for delta in [-1e-3, 1e-4, 2e-2] {
                    let mut c: Vec<f64> = coeffs.iter().map(|c| c * log_scale.exp()).collect();
                    c[k] += delta;
                    let q = PolynomialApprox::from_chebyshev(0.0, 8.0, c);
                    assert!(w <= q.measured_error, "d={d}: witness {w} > error {}", q.measured_error);
                }
            }
        }
    }

    #[test]
    fn witness_zero_when_nothing_alternates() {
        let p = cheb_interpolate_exp(0.0, 1.0, 20).unwrap();
        assert_eq!(lower_bound_witness(&p, 20), 0.0);
        // degree above d certifies nothing
        let p = cheb_interpolate_exp(0.0, 16.0, 4).unwrap();
        assert_eq!(lower_bound_witness(&p, 3), 0.0);
    }
}
