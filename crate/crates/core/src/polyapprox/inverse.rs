use super::{grid_size, Evaluator, PolynomialApprox, Target};
use crate::error::{Error, Result};

/// Degree k = ceil(sqrt(b/a) ln(2/eps)) polynomial q with sup_{[a,b]} |x q(x) - 1| <= eps.
pub fn q_inverse(a: f64, b: f64, eps: f64) -> Result<PolynomialApprox> {
    check(a > 0.0 && a.is_finite(), format!("lower end must be positive, got {a}"))?;
    check(b > a && b.is_finite(), format!("need b > a, got [{a}, {b}]"))?;
    check(eps > 0.0 && eps < 1.0, format!("eps must lie in (0, 1), got {eps}"))?;
    let k = inverse_degree(a, b, eps);
    let evaluator = Evaluator::InverseCheb { lo: a, hi: b, k, shift: 0.0, slope: 1.0 };
    Ok(finish((a, b), k, Target::Inverse, evaluator))
}

/// q*(x) = q_inverse(1 + nu a, 1 + nu b, eps) evaluated at 1 + nu x, so
/// sup_{[a,b]} |(1 + nu x) q*(x) - 1| <= eps.
pub fn q_star(nu: f64, a: f64, b: f64, eps: f64) -> Result<PolynomialApprox> {
    check(nu > 0.0 && nu.is_finite(), format!("nu must be positive, got {nu}"))?;
    check(a >= 0.0, format!("lower end must be >= 0, got {a}"))?;
    let inner = q_inverse(1.0 + nu * a, 1.0 + nu * b, eps)?;
    let Evaluator::InverseCheb { lo, hi, k, .. } = inner.evaluator else { unreachable!() };
    let evaluator = Evaluator::InverseCheb { lo, hi, k, shift: 1.0, slope: nu };
    Ok(finish((a, b), k, Target::ShiftedInverse { nu }, evaluator))
}

fn check(ok: bool, msg: String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg))
    }
}

fn inverse_degree(a: f64, b: f64, eps: f64) -> usize {
    ((b / a).sqrt() * (2.0 / eps).ln()).ceil() as usize
}

fn finish(interval: (f64, f64), k: usize, target: Target, evaluator: Evaluator) -> PolynomialApprox {
    let mut p = PolynomialApprox {
        interval,
        degree: k,
        measured_error: 0.0,
        grid_size: grid_size(k),
        target,
        evaluator,
    };
    p.measured_error = p.grid_error(p.grid_size);
    p
}

/// (1/y)(1 - T_{k+1}(xi(y)) / T_{k+1}(xi0)) with xi(y) = (hi + lo - 2y)/(hi - lo).
///
/// Writes the numerator as a divided difference: with
/// D_n = (T_n(xi0) - T_n(xi)) / (xi0 - xi), D_{n+1} = 2 T_n(xi0) + 2 xi D_n - D_{n-1}.
/// Since xi0 - xi = 2y/(hi - lo), q(y) = 2 D_{k+1} / ((hi - lo) T_{k+1}(xi0)),
/// which never divides by y and at y = 0 reduces to the derivative.
pub(crate) fn eval_inverse(lo: f64, hi: f64, k: usize, y: f64) -> f64 {
    let w = hi - lo;
    let xi0 = (hi + lo) / w;
    let xi = (hi + lo - 2.0 * y) / w;
    let (mut t_prev, mut t) = (1.0, xi0);
    let (mut d_prev, mut d) = (0.0, 1.0);
    for _ in 1..=k {
        let t_next = 2.0 * xi0 * t - t_prev;
        let d_next = 2.0 * t + 2.0 * xi * d - d_prev;
        t_prev = t;
        t = t_next;
        d_prev = d;
        d = d_next;
        // the recurrence is linear in the whole state, so it can be rescaled freely
        if t.abs() > 1e200 {
            let s = 1.0 / t.abs();
            t *= s;
            t_prev *= s;
            d *= s;
            d_prev *= s;
        }
    }
    2.0 * d / (w * t)
}
