//! Dense oracles built on nalgebra, independent of the crate's own eigensolver.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::operators::{DenseSymmetric, LinearOperator};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(r)).collect()
}

pub fn random_unit(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v = random_vec(r, n);
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / s).collect()
}

/// Random PSD matrix with spectrum uniform in [0, top] and top attained.
pub fn random_psd(r: &mut ChaCha8Rng, n: usize, top: f64) -> (DenseSymmetric, Vec<f64>) {
    let g: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(r));
    let q = g.qr().q();
    let u = Uniform::new(0.0, top).unwrap();
    let mut eigs: Vec<f64> = (0..n).map(|_| u.sample(r)).collect();
    eigs[0] = top;
    let a: DMatrix<f64> = &q * DMatrix::from_diagonal(&DVector::from_vec(eigs.clone())) * q.transpose();
    (DenseSymmetric::new(n, a.transpose().as_slice().to_vec()).unwrap(), eigs)
}

pub fn to_nalgebra<A: LinearOperator + ?Sized>(op: &A) -> DMatrix<f64> {
    let d = DenseSymmetric::from_operator(op);
    let n = d.order();
    DMatrix::from_fn(n, n, |i, j| d.get(i, j))
}

/// f(A) v through a full symmetric eigendecomposition.
pub fn dense_fv(a: &DMatrix<f64>, v: &[f64], f: impl Fn(f64) -> f64) -> Vec<f64> {
    let e = a.clone().symmetric_eigen();
    let fd = DVector::from_iterator(e.eigenvalues.len(), e.eigenvalues.iter().map(|&l| f(l)));
    let q = &e.eigenvectors;
    let out = q * DMatrix::from_diagonal(&fd) * q.transpose() * DVector::from_column_slice(v);
    out.as_slice().to_vec()
}

pub fn dense_solve(a: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    a.clone().lu().solve(&DVector::from_column_slice(b)).unwrap().as_slice().to_vec()
}

pub fn eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}
