use crate::error::{Error, Result};
use crate::linalg::{axpy, norm};
use crate::operators::{estimate_norm, LinearOperator};

pub const DEFAULT_TAYLOR_CAP: usize = 100_000;

/// Number of series terms: ceil(max(e^2 |A| / 2, ln(1/delta))), at least 1.
pub fn taylor_order(a_norm: f64, delta: f64) -> usize {
    let e2 = std::f64::consts::E * std::f64::consts::E;
    let k = (e2 * a_norm / 2.0).max((1.0 / delta).ln());
    if k.is_finite() {
        (k.ceil() as usize).max(1)
    } else {
        usize::MAX
    }
}

/// exp(-A) v by a truncated series around the midpoint of [0, |A|]:
/// exp(-A) = exp(-c) exp(-(A - cI)) with c = |A|/2, so the shifted series
/// only sees a spectrum of radius c.
pub fn expmv_taylor<A: LinearOperator + ?Sized>(
    a: &A,
    v: &[f64],
    delta: f64,
    cap: usize,
) -> Result<Vec<f64>> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, 1], got {delta}")));
    }
    if v.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: v.len() });
    }
    if norm(v) == 0.0 {
        return Ok(vec![0.0; v.len()]);
    }
    let a_norm = estimate_norm(a)?.value;
    let k = taylor_order(a_norm, delta);
    if k > cap {
        return Err(Error::DegreeCap { needed: k, cap });
    }
    let c = a_norm / 2.0;
    let mut term = v.to_vec();
    let mut sum = v.to_vec();
    let mut next = vec![0.0; v.len()];
    for i in 1..=k {
        a.apply_into(&term, &mut next);
        let s = -1.0 / i as f64;
        for (t, x) in term.iter_mut().zip(&next) {
            // (-(A - cI))^i v / i! from the previous term
            *t = s * (x - c * *t);
        }
        axpy(1.0, &term, &mut sum);
    }
    let ec = (-c).exp();
    Ok(sum.into_iter().map(|x| x * ec).collect())
}
