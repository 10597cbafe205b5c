//! Linear operators, CG-based inverses, the projected exponent operator and a
//! small dense symmetric eigensolver.

mod cg;
mod eig;
mod projected;

pub use cg::{cg_solve, invert_shifted, CgOptions, CgOutcome, CgShiftedInverse, ConjugateGradient};
pub use eig::{sym_eig, tridiagonal_eig_first_row, SmallSymmetric, SymEig, DEFAULT_ORDER_CAP};
pub use projected::{AhkGenerator, ProjectedExponent};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{all_finite, axpy, dot, norm, scale};

/// Where an operator norm bound came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormSource {
    Exact,
    Gershgorin,
    PowerIteration,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormHint {
    pub value: f64,
    pub source: NormSource,
}

/// A symmetric linear map on R^n.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    fn apply_into(&self, x: &[f64], y: &mut [f64]);

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y);
        y
    }

    /// Diagonal entries, when cheap to produce. Enables Jacobi preconditioning.
    fn diagonal(&self) -> Option<Vec<f64>> {
        None
    }

    /// A known upper bound on the spectral norm.
    fn norm_hint(&self) -> Option<NormHint> {
        None
    }

    /// Max absolute row sum, when available.
    fn gershgorin_bound(&self) -> Option<f64> {
        None
    }

    /// A known positive lower bound on the smallest eigenvalue.
    fn spectrum_floor(&self) -> Option<f64> {
        None
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply_into(x, y)
    }
    fn diagonal(&self) -> Option<Vec<f64>> {
        (**self).diagonal()
    }
    fn norm_hint(&self) -> Option<NormHint> {
        (**self).norm_hint()
    }
    fn gershgorin_bound(&self) -> Option<f64> {
        (**self).gershgorin_bound()
    }
    fn spectrum_floor(&self) -> Option<f64> {
        (**self).spectrum_floor()
    }
}

/// Approximate application of (I + A/k)^{-1} for some PSD operator A:
/// returns u with ||(I + A/k)^{-1} y - u|| <= eps1 ||y||.
pub trait ShiftedInverse: Sync {
    fn dim(&self) -> usize;
    fn invert(&self, k: usize, eps1: f64, y: &[f64]) -> Result<Vec<f64>>;
    /// Upper bound on ||A||.
    fn operator_norm(&self) -> f64;
}

/// The combinatorial Laplacian D - A.
impl LinearOperator for Graph {
    fn dim(&self) -> usize {
        self.n()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.laplacian_apply_into(x, y)
    }
    fn diagonal(&self) -> Option<Vec<f64>> {
        Some(self.degrees())
    }
    fn gershgorin_bound(&self) -> Option<f64> {
        (0..self.n()).map(|i| 2.0 * self.degree(i) as f64).reduce(f64::max)
    }
}

/// Dense row-major symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymmetric {
    n: usize,
    data: Vec<f64>,
}

impl DenseSymmetric {
    /// Takes the symmetric part of a row-major `n x n` matrix.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: data.len() });
        }
        let mut data = data;
        for i in 0..n {
            for j in 0..i {
                let s = 0.5 * (data[i * n + j] + data[j * n + i]);
                data[i * n + j] = s;
                data[j * n + i] = s;
            }
        }
        Ok(DenseSymmetric { n, data })
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut data = vec![0.0; n * n];
        for (i, &v) in d.iter().enumerate() {
            data[i * n + i] = v;
        }
        DenseSymmetric { n, data }
    }

    /// Materializes any operator column by column.
    pub fn from_operator<A: LinearOperator + ?Sized>(op: &A) -> Self {
        let n = op.dim();
        let mut data = vec![0.0; n * n];
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            op.apply_into(&e, &mut col);
            e[j] = 0.0;
            for i in 0..n {
                data[i * n + j] = col[i];
            }
        }
        DenseSymmetric::new(n, data).expect("square by construction")
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

impl LinearOperator for DenseSymmetric {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(&self.data[i * self.n..(i + 1) * self.n], x);
        }
    }
    fn diagonal(&self) -> Option<Vec<f64>> {
        Some((0..self.n).map(|i| self.get(i, i)).collect())
    }
    fn gershgorin_bound(&self) -> Option<f64> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().map(|v| v.abs()).sum::<f64>())
            .reduce(f64::max)
    }
}

/// Diagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagonal(pub Vec<f64>);

impl LinearOperator for Diagonal {
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for ((yi, xi), di) in y.iter_mut().zip(x).zip(&self.0) {
            *yi = di * xi;
        }
    }
    fn diagonal(&self) -> Option<Vec<f64>> {
        Some(self.0.clone())
    }
    fn norm_hint(&self) -> Option<NormHint> {
        let value = self.0.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        Some(NormHint { value, source: NormSource::Exact })
    }
    fn gershgorin_bound(&self) -> Option<f64> {
        self.norm_hint().map(|h| h.value)
    }
    fn spectrum_floor(&self) -> Option<f64> {
        let lo = self.0.iter().copied().fold(f64::INFINITY, f64::min);
        (lo > 0.0).then_some(lo)
    }
}

/// I + A/k for a PSD operator A.
pub struct Shifted<'a, A: ?Sized> {
    pub op: &'a A,
    pub k: f64,
}

impl<A: LinearOperator + ?Sized> LinearOperator for Shifted<'_, A> {
    fn dim(&self) -> usize {
        self.op.dim()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.op.apply_into(x, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = xi + *yi / self.k;
        }
    }
    fn diagonal(&self) -> Option<Vec<f64>> {
        self.op.diagonal().map(|d| d.into_iter().map(|v| 1.0 + v / self.k).collect())
    }
    fn gershgorin_bound(&self) -> Option<f64> {
        self.op.gershgorin_bound().map(|g| 1.0 + g / self.k)
    }
    fn spectrum_floor(&self) -> Option<f64> {
        Some(1.0)
    }
}

const POWER_STEPS: usize = 20;
const POWER_INFLATION: f64 = 1.05;
const POWER_SEED: u64 = 0x005e_ed0f_9041;

/// Upper estimate of the spectral norm: an exact hint if the operator has one,
/// otherwise the largest Ritz value from 20 deterministic Krylov steps inflated
/// by 1.05, capped by the Gershgorin bound when that is known.
pub fn estimate_norm<A: LinearOperator + ?Sized>(op: &A) -> Result<NormHint> {
    if let Some(h) = op.norm_hint() {
        return Ok(h);
    }
    let power = krylov_norm(op, POWER_STEPS)? * POWER_INFLATION;
    match op.gershgorin_bound() {
        Some(g) if g <= power => Ok(NormHint { value: g, source: NormSource::Gershgorin }),
        _ => Ok(NormHint { value: power, source: NormSource::PowerIteration }),
    }
}

/// Largest |Ritz value| over the Krylov space of the first `steps` power
/// iterates (Lanczos with full reorthogonalization).
pub fn krylov_norm<A: LinearOperator + ?Sized>(op: &A, steps: usize) -> Result<f64> {
    let n = op.dim();
    if n == 0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_SEED);
    let mut x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let nx = norm(&x);
    scale(&mut x, 1.0 / nx);
    let mut basis = vec![x];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    for _ in 0..steps.clamp(1, n) {
        let v = basis.last().unwrap();
        let mut w = op.apply(v);
        if !all_finite(&w) {
            return Err(Error::NormEstimate("Krylov iteration produced a non-finite value".into()));
        }
        alpha.push(dot(v, &w));
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                axpy(-c, b, &mut w);
            }
        }
        let nw = norm(&w);
        if nw <= 1e-12 * (alpha.last().unwrap().abs() + beta.last().copied().unwrap_or(0.0)) || nw == 0.0 {
            break;
        }
        beta.push(nw);
        scale(&mut w, 1.0 / nw);
        basis.push(w);
    }
    beta.truncate(alpha.len() - 1);
    let (vals, _) = tridiagonal_eig_first_row(&alpha, &beta)?;
    Ok(vals.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_psd, random_vec, rng};
    use proptest::prelude::*;

    #[test]
    fn diagonal_norm_is_exact() {
        let h = estimate_norm(&Diagonal(vec![1.0, -5.0, 2.0])).unwrap();
        assert_eq!(h, NormHint { value: 5.0, source: NormSource::Exact });
    }

    #[test]
    fn norm_estimate_bracketed() {
        let mut r = rng(3);
        for trial in 0..20 {
            let n = 10 + 3 * trial;
            let (a, eigs) = random_psd(&mut r, n, 1.0 + trial as f64 * 7.0);
            let top = eigs.iter().copied().fold(0.0, f64::max);
            let h = estimate_norm(&a).unwrap();
            let g = a.gershgorin_bound().unwrap();
            assert!(h.value >= top * (1.0 - 1e-3), "trial {trial}: {} < {top}", h.value);
            assert!(h.value <= g * (1.0 + 1e-12));
        }
    }

    #[test]
    fn zero_operator_norm() {
        assert_eq!(krylov_norm(&DenseSymmetric::from_diagonal(&[0.0; 4]), 5).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn operators_are_linear_and_symmetric(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let mut r = rng(seed);
            let g = crate::graph::generate(&crate::graph::Generator::Regular { n: 12, d: 3 }, seed).unwrap();
            let (dense, _) = random_psd(&mut r, 12, 4.0);
            let beta = random_vec(&mut r, 12).iter().map(|v| v.abs()).collect::<Vec<_>>();
            let ahk = ProjectedExponent::ahk(&g, &beta, 0.7).unwrap();
            let ops: [&dyn LinearOperator; 3] = [&g, &dense, &ahk];
            for op in ops {
                let x = random_vec(&mut r, 12);
                let y = random_vec(&mut r, 12);
                let comb: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
                let lhs = op.apply(&comb);
                let (ax, ay) = (op.apply(&x), op.apply(&y));
                for i in 0..12 {
                    let rhs = a * ax[i] + b * ay[i];
                    prop_assert!((lhs[i] - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
                }
                let s1 = dot(&x, &ay);
                let s2 = dot(&y, &ax);
                prop_assert!((s1 - s2).abs() <= 1e-10 * (1.0 + s1.abs()));
            }
        }
    }
}
