use super::{choose_params, ExpmParams, KrylovFactorization};
use crate::error::{Error, Result};
use crate::linalg::{all_finite, axpy, dot, norm};
use crate::operators::{sym_eig, ShiftedInverse, SmallSymmetric, DEFAULT_ORDER_CAP};

const BREAKDOWN: f64 = 1e-12;

/// Arnoldi on B = (I + A/k)^{-1} applied through `inv`, with two passes of
/// full Gram-Schmidt per step. Produces k + 1 columns of the Hessenberg matrix
/// (the last one needs one extra inversion) unless the process breaks down.
pub fn rational_factorize<I: ShiftedInverse + ?Sized>(
    inv: &I,
    v: &[f64],
    k: usize,
    eps1: f64,
) -> Result<KrylovFactorization> {
    let n = inv.dim();
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.len() });
    }
    let vn = norm(v);
    if !(vn > 0.0 && vn.is_finite()) {
        return Err(Error::InvalidParameter("start vector must be finite and nonzero".into()));
    }
    let dim = k + 1;
    let mut h = vec![0.0; dim * dim];
    let mut basis: Vec<Vec<f64>> = vec![v.iter().map(|x| x / vn).collect()];
    let mut breakdown = false;
    for i in 0..=k {
        let mut w = inv.invert(k, eps1, &basis[i])?;
        if !all_finite(&w) {
            return Err(Error::NonFinite);
        }
        let w_norm = norm(&w);
        for _pass in 0..2 {
            for (j, vj) in basis.iter().enumerate() {
                let c = dot(vj, &w);
                h[j * dim + i] += c;
                axpy(-c, vj, &mut w);
            }
        }
        if i == k {
            break;
        }
        let next = norm(&w);
        if !(next > BREAKDOWN * w_norm) {
            breakdown = true;
            break;
        }
        h[(i + 1) * dim + i] = next;
        basis.push(w.iter().map(|x| x / next).collect());
    }
    let r = basis.len();
    let mut t = vec![0.0; r * r];
    for a in 0..r {
        for b in 0..r {
            t[a * r + b] = h[a * dim + b];
        }
    }
    Ok(KrylovFactorization {
        effective_order: r - 1,
        basis,
        coeff: SmallSymmetric::symmetrized(r, &t),
        hessenberg: Some(t),
        breakdown,
    })
}

/// Diagnostics from one rational-Krylov evaluation.
#[derive(Debug, Clone)]
pub struct RationalReport {
    pub vector: Vec<f64>,
    pub params: ExpmParams,
    pub order: usize,
    /// Smallest eigenvalue of the symmetrized coefficient matrix before clamping.
    pub min_eigenvalue: f64,
    pub clamped: usize,
}

/// u with |exp(-A) v - u| <= delta |v|, where `inv` applies (I + A/k)^{-1}.
pub fn exprational<I: ShiftedInverse + ?Sized>(inv: &I, v: &[f64], delta: f64) -> Result<Vec<f64>> {
    let params = choose_params(inv.operator_norm(), delta)?;
    Ok(exprational_with(inv, v, &params)?.vector)
}

/// Evaluates exp(k (I - That^{-1})) e_0 in the basis, with That's spectrum
/// clamped below at (1 + |A|/k)^{-1} / 2. Eigenvalues under the window
/// (1 + |A|/k)^{-1} - eps_obs sqrt(r + 1) are rejected.
pub fn exprational_with<I: ShiftedInverse + ?Sized>(
    inv: &I,
    v: &[f64],
    params: &ExpmParams,
) -> Result<RationalReport> {
    let n = inv.dim();
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.len() });
    }
    let scale = norm(v);
    if !scale.is_finite() {
        return Err(Error::NonFinite);
    }
    if scale == 0.0 {
        return Ok(RationalReport {
            vector: vec![0.0; n],
            params: *params,
            order: 0,
            min_eigenvalue: 1.0,
            clamped: 0,
        });
    }
    let k = params.k;
    let fact = rational_factorize(inv, v, k, params.eps1)?;
    let eig = sym_eig(&fact.coeff, DEFAULT_ORDER_CAP)?;
    let r = fact.effective_order + 1;
    let kf = k as f64;
    let top = 1.0 / (1.0 + inv.operator_norm() / kf);
    let eps_obs = params.eps1 + 64.0 * f64::EPSILON * r as f64;
    let lower = top - eps_obs * (r as f64).sqrt();
    let floor = 0.5 * top;
    let min_eigenvalue = eig.values[0];
    if min_eigenvalue < lower {
        return Err(Error::SpectrumWindow { value: min_eigenvalue, lower });
    }
    let clamped = eig.values.iter().filter(|&&t| t < floor).count();
    let coef = eig.apply_fn_e0(|t| (kf * (1.0 - 1.0 / t.max(floor))).exp());
    let mut out = fact.combine(&coef);
    out.iter_mut().for_each(|x| *x *= scale);
    Ok(RationalReport { vector: out, params: *params, order: fact.effective_order, min_eigenvalue, clamped })
}
