use super::{cg_solve, estimate_norm, CgOptions, LinearOperator, NormHint, ShiftedInverse};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{dot, norm};

/// The SDD part of the walk exponent:
/// tau * (L + s D + diag(beta_i d_i)) with s = sum_i beta_i d_i / 2m.
///
/// Each weighted star L(S_i) contributes (d_i/2m) D + d_i e_i e_i^T inside the
/// projection, which is where the diagonal terms come from.
pub struct AhkGenerator<'g> {
    graph: &'g Graph,
    tau: f64,
    extra: Vec<f64>,
}

impl<'g> AhkGenerator<'g> {
    pub fn new(graph: &'g Graph, beta: &[f64], tau: f64) -> Result<Self> {
        let n = graph.n();
        if beta.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: beta.len() });
        }
        if !(tau >= 0.0 && tau.is_finite()) || beta.iter().any(|&b| !(b >= 0.0 && b.is_finite())) {
            return Err(Error::InvalidParameter("tau and beta must be finite and nonnegative".into()));
        }
        let d = graph.degrees();
        let s = beta.iter().zip(&d).map(|(b, d)| b * d).sum::<f64>() / graph.total_volume() as f64;
        let extra = d.iter().zip(beta).map(|(d, b)| tau * (s * d + b * d)).collect();
        Ok(AhkGenerator { graph, tau, extra })
    }
}

impl LinearOperator for AhkGenerator<'_> {
    fn dim(&self) -> usize {
        self.graph.n()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.graph.laplacian_apply_into(x, y);
        for ((yi, xi), ei) in y.iter_mut().zip(x).zip(&self.extra) {
            *yi = self.tau * *yi + ei * xi;
        }
    }
    fn diagonal(&self) -> Option<Vec<f64>> {
        Some((0..self.dim()).map(|i| self.tau * self.graph.degree(i) as f64 + self.extra[i]).collect())
    }
    fn gershgorin_bound(&self) -> Option<f64> {
        (0..self.dim()).map(|i| 2.0 * self.tau * self.graph.degree(i) as f64 + self.extra[i]).reduce(f64::max)
    }
}

/// A = Pi H M H Pi with H diagonal positive, M symmetric PSD and
/// Pi = I - w w^T for a unit vector w.
pub struct ProjectedExponent<M> {
    h: Vec<f64>,
    m: M,
    w: Vec<f64>,
    hmh_norm: NormHint,
}

/// H M H.
struct Conjugated<'a, M> {
    h: &'a [f64],
    m: &'a M,
}

impl<M: LinearOperator> LinearOperator for Conjugated<'_, M> {
    fn dim(&self) -> usize {
        self.h.len()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let hx: Vec<f64> = x.iter().zip(self.h).map(|(a, b)| a * b).collect();
        self.m.apply_into(&hx, y);
        for (yi, hi) in y.iter_mut().zip(self.h) {
            *yi *= hi;
        }
    }
    fn gershgorin_bound(&self) -> Option<f64> {
        // rows of HMH are bounded by max(h)^2 times rows of M
        let hmax = self.h.iter().copied().fold(0.0, f64::max);
        self.m.gershgorin_bound().map(|g| g * hmax * hmax)
    }
}

/// H^{-2} + M/k, the system behind (I + HMH/k)^{-1} = H^{-1} (H^{-2} + M/k)^{-1} H^{-1}.
struct ConjugatedShift<'a, M> {
    inv_h2: Vec<f64>,
    m: &'a M,
    k: f64,
}

impl<M: LinearOperator> LinearOperator for ConjugatedShift<'_, M> {
    fn dim(&self) -> usize {
        self.inv_h2.len()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.m.apply_into(x, y);
        for ((yi, xi), di) in y.iter_mut().zip(x).zip(&self.inv_h2) {
            *yi = di * xi + *yi / self.k;
        }
    }
    fn diagonal(&self) -> Option<Vec<f64>> {
        let md = self.m.diagonal()?;
        Some(self.inv_h2.iter().zip(md).map(|(d, m)| d + m / self.k).collect())
    }
    fn spectrum_floor(&self) -> Option<f64> {
        // M is PSD
        Some(self.inv_h2.iter().copied().fold(f64::INFINITY, f64::min))
    }
}

impl<'g> ProjectedExponent<AhkGenerator<'g>> {
    /// tau * C for the walk with acceleration beta: H = D^{-1/2},
    /// w = D^{1/2} 1 / sqrt(2m).
    pub fn ahk(graph: &'g Graph, beta: &[f64], tau: f64) -> Result<Self> {
        let two_m = graph.total_volume() as f64;
        let d = graph.degrees();
        let h = d.iter().map(|d| 1.0 / d.sqrt()).collect();
        let w = d.iter().map(|d| (d / two_m).sqrt()).collect();
        ProjectedExponent::new(h, AhkGenerator::new(graph, beta, tau)?, w)
    }
}

impl<M: LinearOperator> ProjectedExponent<M> {
    pub fn new(h: Vec<f64>, m: M, w: Vec<f64>) -> Result<Self> {
        let n = m.dim();
        for len in [h.len(), w.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, got: len });
            }
        }
        if h.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter("H must be strictly positive".into()));
        }
        if (norm(&w) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("w must be a unit vector, |w| = {}", norm(&w))));
        }
        let hmh_norm = estimate_norm(&Conjugated { h: &h, m: &m })?;
        Ok(ProjectedExponent { h, m, w, hmh_norm })
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// Upper estimate of ||H M H||, which also bounds ||A||.
    pub fn hmh_norm(&self) -> NormHint {
        self.hmh_norm
    }

    fn project(&self, x: &mut [f64]) {
        let c = dot(&self.w, x);
        for (xi, wi) in x.iter_mut().zip(&self.w) {
            *xi -= c * wi;
        }
    }

    /// (1/k) H M H x.
    fn m1_apply(&self, k: f64, x: &[f64]) -> Vec<f64> {
        let mut y = Conjugated { h: &self.h, m: &self.m }.apply(x);
        y.iter_mut().for_each(|v| *v /= k);
        y
    }

    /// beta with ||beta - (I + M1)^{-1} z||_{I+M1} <= tol ||(I + M1)^{-1} z||_{I+M1},
    /// via CG on H^{-2} + M/k. The conjugation by H maps the (I + M1)-norm
    /// onto the norm of the inner system, so the relative bound carries over.
    fn solve_m1(&self, k: f64, z: &[f64], tol: f64) -> Result<Vec<f64>> {
        let sys = ConjugatedShift { inv_h2: self.h.iter().map(|h| 1.0 / (h * h)).collect(), m: &self.m, k };
        let rhs: Vec<f64> = z.iter().zip(&self.h).map(|(z, h)| z / h).collect();
        let x = cg_solve(&sys, &rhs, &CgOptions { tol, ..CgOptions::default() })?.x;
        Ok(x.iter().zip(&self.h).map(|(x, h)| x / h).collect())
    }

    /// u approximating (I + A/k)^{-1} y with ||error|| <= eps1 ||y||.
    ///
    /// Splits off the w-component (an eigenvector with eigenvalue 1), then
    /// inverts the rank-one modified matrix (I + M1) - w (M1 w)^T on the rest by
    /// Sherman-Morrison, using two solves against I + M1 with M1 = HMH/k.
    pub fn invert_projected(&self, k: usize, eps1: f64, y: &[f64]) -> Result<Vec<f64>> {
        self.invert_with_tolerance(k, eps1, y, None)
    }

    pub(crate) fn invert_with_tolerance(
        &self,
        k: usize,
        eps1: f64,
        y: &[f64],
        inner_tol: Option<f64>,
    ) -> Result<Vec<f64>> {
        let n = self.h.len();
        if y.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: y.len() });
        }
        if k == 0 || !(eps1 > 0.0 && eps1 < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need k >= 1 and eps1 in (0,1), got k={k}, eps1={eps1}"
            )));
        }
        let kf = k as f64;
        let m1_norm = self.hmh_norm.value / kf;
        if !m1_norm.is_finite() {
            return Err(Error::NormEstimate("non-finite estimate of ||M1||".into()));
        }
        let tol = inner_tol.unwrap_or(eps1 / (6.0 * (1.0 + m1_norm)));

        let wy = dot(&self.w, y);
        let mut z = y.to_vec();
        self.project(&mut z);
        let beta1 = self.solve_m1(kf, &z, tol)?;
        let beta2 = self.solve_m1(kf, &self.w, tol)?;
        let num = dot(&self.w, &self.m1_apply(kf, &beta1));
        let den = 1.0 - dot(&self.w, &self.m1_apply(kf, &beta2));
        let coef = num / den;
        Ok((0..n).map(|i| beta1[i] + coef * beta2[i] + wy * self.w[i]).collect())
    }
}

impl<M: LinearOperator> LinearOperator for ProjectedExponent<M> {
    fn dim(&self) -> usize {
        self.h.len()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let mut px = x.to_vec();
        self.project(&mut px);
        Conjugated { h: &self.h, m: &self.m }.apply_into(&px, y);
        self.project(y);
    }
    fn norm_hint(&self) -> Option<NormHint> {
        Some(self.hmh_norm)
    }
}

impl<M: LinearOperator> ShiftedInverse for ProjectedExponent<M> {
    fn dim(&self) -> usize {
        self.h.len()
    }
    fn invert(&self, k: usize, eps1: f64, y: &[f64]) -> Result<Vec<f64>> {
        self.invert_projected(k, eps1, y)
    }
    fn operator_norm(&self) -> f64 {
        self.hmh_norm.value
    }
}
