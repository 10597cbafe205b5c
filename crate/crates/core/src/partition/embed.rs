use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::AhkState;
use crate::error::{Error, Result};
use crate::expmv::{expmv_lanczos, exprational};
use crate::graph::Graph;
use crate::linalg::{axpy, dot, norm};
use crate::operators::{sym_eig, DenseSymmetric, ProjectedExponent, SmallSymmetric, DEFAULT_ORDER_CAP};

/// How exp(-tau C) u is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Rational Krylov over the projected shifted inverse.
    #[default]
    Rational,
    Lanczos,
    /// One dense eigendecomposition per iteration; small graphs only.
    Dense,
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(Backend::Rational),
            "lanczos" => Ok(Backend::Lanczos),
            "dense" => Ok(Backend::Dense),
            _ => Err(Error::InvalidParameter(format!("unknown backend {s:?} (rational, lanczos, dense)"))),
        }
    }
}

/// Per-call accuracy of the exponential: 1/n^3, floored at 1e-12.
pub fn expmv_delta(n: usize) -> f64 {
    (1.0 / (n as f64).powi(3)).max(1e-12)
}

/// One vector per vertex with its degree-weighted mean and deviation.
#[derive(Debug, Clone)]
pub struct Embedding {
    /// Row i is v_i.
    pub vectors: Vec<Vec<f64>>,
    /// sum_i (d_i / 2m) v_i.
    pub mean: Vec<f64>,
    /// |v_i - mean|.
    pub radii: Vec<f64>,
    /// sum_i d_i r_i^2.
    pub psi: f64,
    degrees: Vec<f64>,
}

impl Embedding {
    pub fn from_vectors(g: &Graph, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if vectors.len() != g.n() {
            return Err(Error::DimensionMismatch { expected: g.n(), got: vectors.len() });
        }
        let k = vectors[0].len();
        if let Some(v) = vectors.iter().find(|v| v.len() != k) {
            return Err(Error::DimensionMismatch { expected: k, got: v.len() });
        }
        if vectors.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let degrees = g.degrees();
        let two_m = g.total_volume() as f64;
        let mut mean = vec![0.0; k];
        for (v, d) in vectors.iter().zip(&degrees) {
            axpy(d / two_m, v, &mut mean);
        }
        let radii: Vec<f64> = vectors
            .iter()
            .map(|v| v.iter().zip(&mean).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
            .collect();
        let psi = radii.iter().zip(&degrees).map(|(r, d)| d * r * r).sum();
        Ok(Embedding { vectors, mean, radii, psi, degrees })
    }

    /// Embedding dimension k.
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// sum over edges of |v_i - v_j|^2.
    pub fn edge_energy(&self, g: &Graph) -> f64 {
        g.edges()
            .map(|(i, j)| {
                self.vectors[i].iter().zip(&self.vectors[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
            })
            .sum()
    }

    /// sum_{i in set} d_i |v_i - mu|^2 with mu the degree-weighted mean over the set.
    pub fn deviation_within(&self, set: &[usize]) -> f64 {
        let vol: f64 = set.iter().map(|&i| self.degrees[i]).sum();
        if vol == 0.0 {
            return 0.0;
        }
        let mut mu = vec![0.0; self.dim()];
        for &i in set {
            axpy(self.degrees[i] / vol, &self.vectors[i], &mut mu);
        }
        set.iter()
            .map(|&i| {
                self.degrees[i] * self.vectors[i].iter().zip(&mu).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
            })
            .sum()
    }
}

/// sum_i d_i |v_i - v_avg|^2, recomputed from the vectors.
pub fn total_deviation(e: &Embedding) -> f64 {
    e.vectors
        .iter()
        .zip(&e.degrees)
        .map(|(v, d)| d * v.iter().zip(&e.mean).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        .sum()
}

/// k orthonormal columns of length n from Gaussian draws (two passes of
/// modified Gram-Schmidt). Each column is uniform on the sphere; the frame
/// keeps the sketch exact when k = n.
pub fn random_frame<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("frame size must lie in [1, {n}], got {k}")));
    }
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(k);
    while cols.len() < k {
        let mut u: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let before = norm(&u);
        for _ in 0..2 {
            for q in &cols {
                let c = dot(q, &u);
                axpy(-c, q, &mut u);
            }
        }
        let len = norm(&u);
        // a draw almost inside the span so far has probability zero; redraw it
        if len <= 1e-8 * before {
            continue;
        }
        u.iter_mut().for_each(|x| *x /= len);
        cols.push(u);
    }
    Ok(cols)
}

/// v_i with (v_i)_j = sqrt(n/k) (exp(-tau C) u_j)_i / sqrt(d_i) for a random
/// orthonormal frame u_1..u_k, one exponential per column, run in parallel.
pub fn embed<R: Rng + ?Sized>(
    g: &Graph,
    state: &AhkState,
    k: usize,
    rng: &mut R,
    backend: Backend,
) -> Result<Embedding> {
    let n = g.n();
    let frame = random_frame(n, k, rng)?;
    let a = ProjectedExponent::ahk(g, &state.beta, state.tau)?;
    let delta = expmv_delta(n);
    let columns: Vec<Vec<f64>> = match backend {
        Backend::Rational => frame.par_iter().map(|u| exprational(&a, u, delta)).collect::<Result<_>>()?,
        Backend::Lanczos => frame.par_iter().map(|u| expmv_lanczos(&a, u, delta)).collect::<Result<_>>()?,
        Backend::Dense => {
            let dense = DenseSymmetric::from_operator(&a);
            let eig = sym_eig(&SmallSymmetric::symmetrized(n, dense.data()), DEFAULT_ORDER_CAP)?;
            frame.par_iter().map(|u| eig.apply_fn(|x| (-x).exp(), u)).collect()
        }
    };
    let scale = (n as f64 / k as f64).sqrt();
    let inv_sqrt_d: Vec<f64> = g.degrees().iter().map(|d| 1.0 / d.sqrt()).collect();
    let vectors =
        (0..n).map(|i| columns.iter().map(|col| scale * col[i] * inv_sqrt_d[i]).collect()).collect();
    Embedding::from_vectors(g, vectors)
}
