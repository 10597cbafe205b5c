use crate::error::{Error, Result};

pub const DEFAULT_ORDER_CAP: usize = 1024;
const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_TOL: f64 = 1e-14;
const QL_MAX_ITER: usize = 60;

/// Small dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallSymmetric {
    order: usize,
    data: Vec<f64>,
    tridiagonal: bool,
}

impl SmallSymmetric {
    /// Symmetric tridiagonal matrix from its diagonal and off-diagonal.
    pub fn tridiagonal(diag: &[f64], off: &[f64]) -> Self {
        let n = diag.len();
        assert_eq!(off.len() + 1, n.max(1), "off-diagonal must have n-1 entries");
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = diag[i];
            if i + 1 < n {
                data[i * n + i + 1] = off[i];
                data[(i + 1) * n + i] = off[i];
            }
        }
        SmallSymmetric { order: n, data, tridiagonal: true }
    }

    /// (T + T^T) / 2 of a row-major square matrix.
    pub fn symmetrized(order: usize, t: &[f64]) -> Self {
        assert_eq!(t.len(), order * order);
        let mut data = vec![0.0; order * order];
        for i in 0..order {
            for j in 0..order {
                data[i * order + j] = 0.5 * (t[i * order + j] + t[j * order + i]);
            }
        }
        SmallSymmetric { order, data, tridiagonal: false }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    pub fn is_tridiagonal(&self) -> bool {
        self.tridiagonal
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// T = Q diag(values) Q^T with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: Vec<f64>,
    /// Row-major; column j is the eigenvector for `values[j]`.
    pub vectors: Vec<f64>,
}

impl SymEig {
    pub fn order(&self) -> usize {
        self.values.len()
    }

    pub fn vector_entry(&self, i: usize, j: usize) -> f64 {
        self.vectors[i * self.order() + j]
    }

    /// f(T) x.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64, x: &[f64]) -> Vec<f64> {
        let n = self.order();
        let mut coef = vec![0.0; n];
        for (j, c) in coef.iter_mut().enumerate() {
            let proj: f64 = (0..n).map(|i| self.vector_entry(i, j) * x[i]).sum();
            *c = f(self.values[j]) * proj;
        }
        (0..n).map(|i| (0..n).map(|j| self.vector_entry(i, j) * coef[j]).sum()).collect()
    }

    /// f(T) e_0, the first column of f(T).
    pub fn apply_fn_e0(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let n = self.order();
        let w: Vec<f64> = (0..n).map(|j| f(self.values[j]) * self.vector_entry(0, j)).collect();
        (0..n).map(|i| (0..n).map(|j| self.vector_entry(i, j) * w[j]).sum()).collect()
    }
}

/// Eigendecomposition of a small symmetric matrix: implicit QL for
/// tridiagonal input, cyclic Jacobi otherwise.
pub fn sym_eig(t: &SmallSymmetric, cap: usize) -> Result<SymEig> {
    if t.order > cap {
        return Err(Error::OrderCap { order: t.order, cap });
    }
    if t.tridiagonal {
        let n = t.order;
        let diag: Vec<f64> = (0..n).map(|i| t.get(i, i)).collect();
        let off: Vec<f64> = (0..n.saturating_sub(1)).map(|i| t.get(i, i + 1)).collect();
        tridiagonal_eig(&diag, &off)
    } else {
        jacobi(t)
    }
}

fn jacobi(t: &SmallSymmetric) -> Result<SymEig> {
    let n = t.order;
    let mut a = t.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let target = JACOBI_REL_TOL * t.frobenius();
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].powi(2))
            .sum::<f64>()
            .sqrt();
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let tan = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (tan * tan + 1.0).sqrt();
                let s = tan * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::EigenNoConvergence(JACOBI_MAX_SWEEPS));
    }
    let values: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    Ok(sorted(values, v))
}

fn sorted(values: Vec<f64>, v: Vec<f64>) -> SymEig {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut vectors = vec![0.0; n * n];
    for (new, &old) in idx.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + new] = v[i * n + old];
        }
    }
    SymEig { values: idx.iter().map(|&i| values[i]).collect(), vectors }
}

/// Implicit QL on a symmetric tridiagonal matrix (the EISPACK tql2 scheme),
/// accumulating rotations into `rows` rows of the eigenvector matrix.
fn tql2(diag: &[f64], off: &[f64], rows: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e: Vec<f64> = off.iter().copied().chain(std::iter::once(0.0)).collect();
    let mut z = vec![0.0; rows * n];
    for i in 0..rows {
        z[i * n + i] = 1.0;
    }
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_MAX_ITER {
                    return Err(Error::EigenNoConvergence(QL_MAX_ITER));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..rows {
                        let h = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * h;
                        z[k * n + i] = c * z[k * n + i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok((d, z))
}

fn tridiagonal_eig(diag: &[f64], off: &[f64]) -> Result<SymEig> {
    let n = diag.len();
    let (d, z) = tql2(diag, off, n)?;
    Ok(sorted(d, z))
}

/// Eigenvalues of a symmetric tridiagonal matrix together with the first
/// component of each eigenvector (Gauss quadrature nodes and weights).
pub fn tridiagonal_eig_first_row(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    let (d, z) = tql2(diag, off, 1.min(n))?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    Ok((idx.iter().map(|&i| d[i]).collect(), idx.iter().map(|&i| z[i]).collect()))
}
