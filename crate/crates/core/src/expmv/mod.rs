//! exp(-A) v for symmetric PSD A: Lanczos, a rational Krylov method built on
//! (I + A/k)^{-1}, a Taylor baseline and a dense eigendecomposition oracle.

mod lanczos;
mod rational;
mod taylor;

pub use lanczos::{
    expmv_lanczos, expmv_lanczos_with, lanczos_factorize, lanczos_fv, lanczos_order, LanczosConfig,
    LanczosReport,
};
pub use rational::{exprational, exprational_with, rational_factorize, RationalReport};
pub use taylor::{expmv_taylor, taylor_order, DEFAULT_TAYLOR_CAP};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::{sym_eig, DenseSymmetric, LinearOperator, SmallSymmetric, DEFAULT_ORDER_CAP};

/// Orthonormal Krylov basis with the projected coefficient matrix.
#[derive(Debug, Clone)]
pub struct KrylovFactorization {
    /// Columns v_0..v_r.
    pub basis: Vec<Vec<f64>>,
    /// Tridiagonal T for Lanczos; the symmetrized (T + T^T)/2 for the rational method.
    pub coeff: SmallSymmetric,
    /// Raw upper-Hessenberg coefficients (row-major), rational method only.
    pub hessenberg: Option<Vec<f64>>,
    /// r, the order actually reached.
    pub effective_order: usize,
    pub breakdown: bool,
}

impl KrylovFactorization {
    /// max |V^T V - I|.
    pub fn orthogonality_defect(&self) -> f64 {
        let r = self.basis.len();
        let mut worst: f64 = 0.0;
        for a in 0..r {
            for b in a..r {
                let s = crate::linalg::dot(&self.basis[a], &self.basis[b]);
                worst = worst.max((s - if a == b { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }

    /// V c.
    pub fn combine(&self, coef: &[f64]) -> Vec<f64> {
        let n = self.basis.first().map_or(0, |v| v.len());
        let mut out = vec![0.0; n];
        for (v, &c) in self.basis.iter().zip(coef) {
            crate::linalg::axpy(c, v, &mut out);
        }
        out
    }
}

/// Krylov order and inner tolerance for the rational method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpmParams {
    pub k: usize,
    pub eps1: f64,
    pub delta: f64,
    /// log10 of the unfloored tolerance, which underflows f64 for moderate k.
    pub eps1_log10_theory: f64,
    pub eps1_floored: bool,
}

pub const K_FLOOR: usize = 8;
pub const EPS_MACHINE_GUARD: f64 = 1e-14;

/// k = max(8, ceil(log2(8/delta) + 2 log2 log2(max(8/delta, 4)))) and
/// eps1 = delta/32 (k+1)^{-5/2} (1 + |A|/k)^{-1} (2k)^{-(k+1)}, floored at 1e-14
/// and never above delta.
pub fn choose_params(a_norm: f64, delta: f64) -> Result<ExpmParams> {
    if !(a_norm >= 0.0 && a_norm.is_finite()) {
        return Err(Error::InvalidParameter(format!("operator norm must be finite and >= 0, got {a_norm}")));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, 1], got {delta}")));
    }
    let x = 8.0 / delta;
    let raw = x.log2() + 2.0 * x.max(4.0).log2().log2();
    let k = K_FLOOR.max(raw.ceil() as usize);
    let kf = k as f64;
    let log10 = delta.log10()
        - 32f64.log10()
        - 2.5 * (kf + 1.0).log10()
        - (1.0 + a_norm / kf).log10()
        - (kf + 1.0) * (2.0 * kf).log10();
    let theory = 10f64.powf(log10);
    let floored = theory < EPS_MACHINE_GUARD;
    let eps1 = theory.max(EPS_MACHINE_GUARD).min(delta);
    Ok(ExpmParams { k, eps1, delta, eps1_log10_theory: log10, eps1_floored: floored })
}

/// exp(-A) v through a dense eigendecomposition of A (Jacobi sweeps).
pub fn expmv_dense<A: LinearOperator + ?Sized>(a: &A, v: &[f64]) -> Result<Vec<f64>> {
    fv_dense(a, v, |x| (-x).exp())
}

/// f(A) v through a dense eigendecomposition of A.
pub fn fv_dense<A: LinearOperator + ?Sized>(a: &A, v: &[f64], f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    if v.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: v.len() });
    }
    let dense = DenseSymmetric::from_operator(a);
    let t = SmallSymmetric::symmetrized(dense.order(), dense.data());
    Ok(sym_eig(&t, DEFAULT_ORDER_CAP)?.apply_fn(f, v))
}
