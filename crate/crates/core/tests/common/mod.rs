//! Dense nalgebra oracles. They rebuild every matrix from the graph directly
//! and never go through the crate's operators or eigensolver.

#![allow(dead_code)]

use heatcut::graph::Graph;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unit(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(r)).collect();
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / s).collect()
}

/// Log-uniform draw from [lo, hi].
pub fn log_uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    Uniform::new_inclusive(lo.ln(), hi.ln()).unwrap().sample(r).exp()
}

/// Random PSD matrix, row-major, with spectrum uniform in [0, top] and top attained.
pub fn random_psd(r: &mut ChaCha8Rng, n: usize, top: f64) -> DMatrix<f64> {
    let g: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(r));
    let q = g.qr().q();
    let u = Uniform::new(0.0, top).unwrap();
    let mut eigs: Vec<f64> = (0..n).map(|_| u.sample(r)).collect();
    eigs[0] = top;
    let a = &q * DMatrix::from_diagonal(&DVector::from_vec(eigs)) * q.transpose();
    // exact symmetry, so the row-major copy handed to the crate is symmetric bit for bit
    (&a + a.transpose()) * 0.5
}

pub fn row_major(a: &DMatrix<f64>) -> Vec<f64> {
    a.transpose().as_slice().to_vec()
}

/// f(A) for symmetric A.
pub fn matrix_fn(a: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let e = a.clone().symmetric_eigen();
    let fd = DVector::from_iterator(e.eigenvalues.len(), e.eigenvalues.iter().map(|&l| f(l)));
    &e.eigenvectors * DMatrix::from_diagonal(&fd) * e.eigenvectors.transpose()
}

pub fn mat_vec(a: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (a * DVector::from_column_slice(v)).as_slice().to_vec()
}

pub fn solve(a: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    a.clone().lu().solve(&DVector::from_column_slice(b)).unwrap().as_slice().to_vec()
}

pub fn sorted_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let mut l = DMatrix::zeros(n, n);
    for (i, j) in g.edges() {
        l[(i, j)] -= 1.0;
        l[(j, i)] -= 1.0;
        l[(i, i)] += 1.0;
        l[(j, j)] += 1.0;
    }
    l
}

/// D^{-1/2} L D^{-1/2}.
pub fn normalized_laplacian(g: &Graph) -> DMatrix<f64> {
    let s: Vec<f64> = (0..g.n()).map(|i| 1.0 / (g.degree(i) as f64).sqrt()).collect();
    let l = laplacian(g);
    DMatrix::from_fn(g.n(), g.n(), |i, j| s[i] * l[(i, j)] * s[j])
}

/// tau Pi H (L + s D + diag(beta_i d_i)) H Pi with H = D^{-1/2},
/// s = sum_i beta_i d_i / 2m and Pi projecting out D^{1/2} 1.
pub fn ahk_exponent(g: &Graph, beta: &[f64], tau: f64) -> DMatrix<f64> {
    let n = g.n();
    let d: Vec<f64> = (0..n).map(|i| g.degree(i) as f64).collect();
    let two_m: f64 = d.iter().sum();
    let s = beta.iter().zip(&d).map(|(b, d)| b * d).sum::<f64>() / two_m;
    let mut m = laplacian(g);
    for i in 0..n {
        m[(i, i)] += s * d[i] + beta[i] * d[i];
    }
    let h = DMatrix::from_diagonal(&DVector::from_iterator(n, d.iter().map(|x| 1.0 / x.sqrt())));
    let w = DVector::from_iterator(n, d.iter().map(|x| (x / two_m).sqrt()));
    let pi = DMatrix::identity(n, n) - &w * w.transpose();
    let a = &pi * &h * m * &h * &pi * tau;
    (&a + a.transpose()) * 0.5
}

/// Tr(exp(-2A)) - 1: the deviation of the exact (unsketched) embedding.
pub fn exact_potential(g: &Graph, beta: &[f64], tau: f64) -> f64 {
    sorted_eigenvalues(&ahk_exponent(g, beta, tau)).iter().map(|l| (-2.0 * l).exp()).sum::<f64>() - 1.0
}
