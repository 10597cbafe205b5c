use super::ShiftedInverse;
use super::{estimate_norm, LinearOperator, Shifted};
use crate::error::{Error, Result};
use crate::linalg::{all_finite, axpy, dot, norm};

#[derive(Debug, Clone, Copy)]
pub struct CgOptions {
    /// Relative tolerance. M-norm when the operator reports a spectrum
    /// floor, Euclidean residual otherwise.
    pub tol: f64,
    pub max_iter: usize,
    /// Use the operator diagonal as a preconditioner when available.
    pub jacobi: bool,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions { tol: 1e-10, max_iter: 20_000, jacobi: true }
    }
}

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final ||r|| / ||b||.
    pub relative_residual: f64,
    /// True when the stop was certified in the M-norm through a spectrum floor.
    pub certified: bool,
}

/// Preconditioned conjugate gradient, one step at a time.
pub struct ConjugateGradient<'a, M: LinearOperator + ?Sized> {
    op: &'a M,
    b_norm: f64,
    x: Vec<f64>,
    r: Vec<f64>,
    z: Vec<f64>,
    p: Vec<f64>,
    q: Vec<f64>,
    rz: f64,
    inv_diag: Option<Vec<f64>>,
    iterations: usize,
}

impl<'a, M: LinearOperator + ?Sized> ConjugateGradient<'a, M> {
    pub fn new(op: &'a M, b: &[f64], jacobi: bool) -> Result<Self> {
        let n = op.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: b.len() });
        }
        if !all_finite(b) {
            return Err(Error::NonFinite);
        }
        let inv_diag = if jacobi {
            op.diagonal()
                .filter(|d| d.iter().all(|&v| v > 0.0 && v.is_finite()))
                .map(|d| d.into_iter().map(|v| 1.0 / v).collect::<Vec<_>>())
        } else {
            None
        };
        let r = b.to_vec();
        let z = precondition(&inv_diag, &r);
        let rz = dot(&r, &z);
        Ok(ConjugateGradient {
            op,
            b_norm: norm(b),
            x: vec![0.0; n],
            p: z.clone(),
            q: vec![0.0; n],
            z,
            r,
            rz,
            inv_diag,
            iterations: 0,
        })
    }

    /// Advances one iteration. Returns false if the search direction has no
    /// positive curvature (converged exactly or operator not PD).
    pub fn step(&mut self) -> bool {
        self.op.apply_into(&self.p, &mut self.q);
        let pq = dot(&self.p, &self.q);
        if !(pq > 0.0) || self.rz == 0.0 {
            return false;
        }
        let alpha = self.rz / pq;
        axpy(alpha, &self.p, &mut self.x);
        axpy(-alpha, &self.q, &mut self.r);
        self.z = precondition(&self.inv_diag, &self.r);
        let rz_new = dot(&self.r, &self.z);
        let beta = rz_new / self.rz;
        self.rz = rz_new;
        for (pi, zi) in self.p.iter_mut().zip(&self.z) {
            *pi = zi + beta * *pi;
        }
        self.iterations += 1;
        true
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn residual_norm(&self) -> f64 {
        norm(&self.r)
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// x^T M x, using the recurrence residual: x^T (b - r).
    fn energy(&self, b: &[f64]) -> f64 {
        self.x.iter().zip(b).zip(&self.r).map(|((x, b), r)| x * (b - r)).sum()
    }

    fn into_outcome(self, certified: bool) -> CgOutcome {
        let rel = if self.b_norm > 0.0 { norm(&self.r) / self.b_norm } else { 0.0 };
        CgOutcome { x: self.x, iterations: self.iterations, relative_residual: rel, certified }
    }
}

fn precondition(inv_diag: &Option<Vec<f64>>, r: &[f64]) -> Vec<f64> {
    match inv_diag {
        Some(d) => r.iter().zip(d).map(|(a, b)| a * b).collect(),
        None => r.to_vec(),
    }
}

/// Solves M x = b for symmetric positive definite M.
///
/// With a spectrum floor `lo`, the M-norm error is at most ||r|| / sqrt(lo),
/// and iteration stops once that is below tol/(1+tol) * ||x_k||_M, which
/// implies ||x_k - x*||_M <= tol * ||x*||_M. Without a floor the stop is on the
/// relative Euclidean residual.
pub fn cg_solve<M: LinearOperator + ?Sized>(op: &M, b: &[f64], opts: &CgOptions) -> Result<CgOutcome> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("CG tolerance must be positive, got {}", opts.tol)));
    }
    let mut cg = ConjugateGradient::new(op, b, opts.jacobi)?;
    if cg.b_norm == 0.0 {
        return Ok(cg.into_outcome(true));
    }
    let floor = op.spectrum_floor().filter(|&f| f > 0.0);
    let done = |cg: &ConjugateGradient<M>| -> bool {
        let rn = cg.residual_norm();
        match floor {
            Some(lo) => {
                let energy = cg.energy(b).max(0.0).sqrt();
                rn / lo.sqrt() <= opts.tol / (1.0 + opts.tol) * energy
            }
            None => rn <= opts.tol * cg.b_norm,
        }
    };
    loop {
        if cg.iterations > 0 && done(&cg) {
            return Ok(cg.into_outcome(floor.is_some()));
        }
        if cg.iterations >= opts.max_iter || !cg.step() {
            if cg.residual_norm() == 0.0 || done(&cg) {
                return Ok(cg.into_outcome(floor.is_some()));
            }
            return Err(Error::NoConvergence {
                iterations: cg.iterations,
                residual: cg.residual_norm() / cg.b_norm,
            });
        }
    }
}

/// u with ||(I + A/k)^{-1} y - u|| <= eps1 ||y|| for PSD A. Since
/// I + A/k has smallest eigenvalue >= 1, an M-norm relative error of eps1
/// bounds the Euclidean error by eps1 ||y||.
pub fn invert_shifted<A: LinearOperator + ?Sized>(a: &A, k: usize, eps1: f64, y: &[f64]) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidParameter("shift order k must be positive".into()));
    }
    let shifted = Shifted { op: a, k: k as f64 };
    let opts = CgOptions { tol: eps1, ..CgOptions::default() };
    Ok(cg_solve(&shifted, y, &opts)?.x)
}

/// Invert_A through plain CG on I + A/k.
pub struct CgShiftedInverse<'a, A: ?Sized> {
    op: &'a A,
    norm: f64,
}

impl<'a, A: LinearOperator + ?Sized> CgShiftedInverse<'a, A> {
    pub fn new(op: &'a A) -> Result<Self> {
        Ok(CgShiftedInverse { op, norm: estimate_norm(op)?.value })
    }
}

impl<A: LinearOperator + ?Sized> ShiftedInverse for CgShiftedInverse<'_, A> {
    fn dim(&self) -> usize {
        self.op.dim()
    }
    fn invert(&self, k: usize, eps1: f64, y: &[f64]) -> Result<Vec<f64>> {
        invert_shifted(self.op, k, eps1, y)
    }
    fn operator_norm(&self) -> f64 {
        self.norm
    }
}
