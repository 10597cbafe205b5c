use super::KrylovFactorization;
use crate::error::{Error, Result};
use crate::linalg::{all_finite, axpy, dot, norm};
use crate::operators::{estimate_norm, sym_eig, LinearOperator, SmallSymmetric, DEFAULT_ORDER_CAP};

const BREAKDOWN: f64 = 1e-12;

/// Lanczos three-term recurrence without reorthogonalization, run to order k
/// (k + 1 basis vectors) unless it breaks down earlier. The last diagonal
/// entry costs one extra product with B.
pub fn lanczos_factorize<B: LinearOperator + ?Sized>(
    b: &B,
    v: &[f64],
    k: usize,
) -> Result<KrylovFactorization> {
    let mut run = LanczosRun::new(b, v)?;
    while run.order() < k && run.extend() {}
    Ok(run.factorization())
}

/// V f(T) V^T v for unit v.
pub fn lanczos_fv<B: LinearOperator + ?Sized>(
    b: &B,
    v: &[f64],
    k: usize,
    f: impl Fn(f64) -> f64,
) -> Result<Vec<f64>> {
    let run = {
        let mut run = LanczosRun::new(b, v)?;
        while run.order() < k && run.extend() {}
        run
    };
    let coef = run.fn_coefficients(&f)?;
    Ok(run.combine(&coef))
}

/// Incremental Lanczos state. `alpha.len() == basis.len()` at all times.
struct LanczosRun<'a, B: ?Sized> {
    op: &'a B,
    basis: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// B v_last - beta_last v_{last-1} - alpha_last v_last, not yet normalized.
    residual: Vec<f64>,
    residual_ref: f64,
    breakdown: bool,
}

impl<'a, B: LinearOperator + ?Sized> LanczosRun<'a, B> {
    fn new(op: &'a B, v: &[f64]) -> Result<Self> {
        if v.len() != op.dim() {
            return Err(Error::DimensionMismatch { expected: op.dim(), got: v.len() });
        }
        if !all_finite(v) {
            return Err(Error::NonFinite);
        }
        let mut run = LanczosRun {
            op,
            basis: vec![v.to_vec()],
            alpha: Vec::new(),
            beta: Vec::new(),
            residual: Vec::new(),
            residual_ref: 0.0,
            breakdown: false,
        };
        run.close_column(None);
        Ok(run)
    }

    fn order(&self) -> usize {
        self.basis.len() - 1
    }

    /// Computes alpha and the residual for the newest basis vector.
    fn close_column(&mut self, prev: Option<(f64, usize)>) {
        let last = self.basis.last().unwrap();
        let mut w = self.op.apply(last);
        if let Some((b, idx)) = prev {
            axpy(-b, &self.basis[idx], &mut w);
        }
        let a = dot(last, &w);
        self.residual_ref = norm(&w);
        axpy(-a, last, &mut w);
        self.alpha.push(a);
        self.residual = w;
    }

    /// Adds one basis vector. Returns false on breakdown.
    fn extend(&mut self) -> bool {
        if self.breakdown {
            return false;
        }
        let b = norm(&self.residual);
        if !(b > BREAKDOWN * self.residual_ref) {
            self.breakdown = true;
            return false;
        }
        let next: Vec<f64> = self.residual.iter().map(|x| x / b).collect();
        self.beta.push(b);
        self.basis.push(next);
        let idx = self.basis.len() - 2;
        self.close_column(Some((b, idx)));
        true
    }

    fn coeff(&self) -> SmallSymmetric {
        SmallSymmetric::tridiagonal(&self.alpha, &self.beta)
    }

    /// f(T) e_0.
    fn fn_coefficients(&self, f: &impl Fn(f64) -> f64) -> Result<Vec<f64>> {
        let eig = sym_eig(&self.coeff(), DEFAULT_ORDER_CAP)?;
        let c = eig.apply_fn_e0(f);
        if !all_finite(&c) {
            return Err(Error::NonFinite);
        }
        Ok(c)
    }

    fn smallest_ritz(&self) -> Result<f64> {
        Ok(sym_eig(&self.coeff(), DEFAULT_ORDER_CAP)?.values[0])
    }

    fn combine(&self, coef: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.op.dim()];
        for (v, &c) in self.basis.iter().zip(coef) {
            axpy(c, v, &mut out);
        }
        out
    }

    fn factorization(self) -> KrylovFactorization {
        let coeff = self.coeff();
        KrylovFactorization {
            effective_order: self.basis.len() - 1,
            basis: self.basis,
            coeff,
            hessenberg: None,
            breakdown: self.breakdown,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosConfig {
    /// Constant in front of the order formula.
    pub c0: f64,
    /// Stop once successive checkpoint approximations differ by less than delta/4.
    pub early_stop: bool,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        LanczosConfig { c0: 1.0, early_stop: true }
    }
}

/// ceil(c0 sqrt(max(ln^2(1/delta), width ln(1/delta))) ln(1/delta) max(1, ln ln max(1/delta, 3))),
/// at least 1.
pub fn lanczos_order(width: f64, delta: f64, c0: f64) -> usize {
    let l = (1.0 / delta).ln();
    let lnln = (1.0 / delta).max(3.0).ln().ln().max(1.0);
    let k = c0 * (l * l).max(width * l).sqrt() * l * lnln;
    if k.is_finite() {
        (k.ceil() as usize).max(1)
    } else {
        usize::MAX
    }
}

/// Outcome of [`expmv_lanczos_with`].
#[derive(Debug, Clone)]
pub struct LanczosReport {
    pub vector: Vec<f64>,
    pub planned_order: usize,
    pub order: usize,
    pub early_stop: bool,
}

/// u with |exp(-A) v - u| <= delta |exp(-A)| |v| for PSD A.
pub fn expmv_lanczos<A: LinearOperator + ?Sized>(a: &A, v: &[f64], delta: f64) -> Result<Vec<f64>> {
    Ok(expmv_lanczos_with(a, v, delta, &LanczosConfig::default())?.vector)
}

pub fn expmv_lanczos_with<A: LinearOperator + ?Sized>(
    a: &A,
    v: &[f64],
    delta: f64,
    cfg: &LanczosConfig,
) -> Result<LanczosReport> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, 1], got {delta}")));
    }
    let n = a.dim();
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.len() });
    }
    let scale = norm(v);
    if !scale.is_finite() {
        return Err(Error::NonFinite);
    }
    if scale == 0.0 {
        return Ok(LanczosReport { vector: vec![0.0; n], planned_order: 0, order: 0, early_stop: false });
    }
    let width = estimate_norm(a)?.value;
    let cap = n.saturating_sub(1).min(DEFAULT_ORDER_CAP - 1);
    let planned = lanczos_order(width, delta, cfg.c0).min(cap);
    let unit: Vec<f64> = v.iter().map(|x| x / scale).collect();
    let f = |x: f64| (-x).exp();

    let mut run = LanczosRun::new(a, &unit)?;
    let mut prev: Option<Vec<f64>> = None;
    let mut checkpoint = 8usize;
    let mut early = false;
    loop {
        let at_end = run.order() >= planned || run.breakdown;
        if cfg.early_stop && (run.order() >= checkpoint || at_end) {
            let c = run.fn_coefficients(&f)?;
            if let Some(p) = &prev {
                let diff: f64 = c
                    .iter()
                    .enumerate()
                    .map(|(i, x)| (x - p.get(i).unwrap_or(&0.0)).powi(2))
                    .sum::<f64>()
                    .sqrt();
                // exp(-theta_min) <= |exp(-A)| since Ritz values lie inside the spectrum
                let floor = (-run.smallest_ritz()?.max(0.0)).exp();
                if diff < 0.25 * delta * floor {
                    early = !at_end;
                    return Ok(LanczosReport {
                        vector: scaled(run.combine(&c), scale),
                        planned_order: planned,
                        order: run.order(),
                        early_stop: early,
                    });
                }
            }
            prev = Some(c);
            checkpoint = checkpoint + (checkpoint / 2).max(4);
        }
        if at_end || !run.extend() {
            break;
        }
    }
    let c = run.fn_coefficients(&f)?;
    Ok(LanczosReport {
        vector: scaled(run.combine(&c), scale),
        planned_order: planned,
        order: run.order(),
        early_stop: early,
    })
}

fn scaled(mut v: Vec<f64>, s: f64) -> Vec<f64> {
    v.iter_mut().for_each(|x| *x *= s);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Generator};
    use crate::linalg::dist;
    use crate::operators::{DenseSymmetric, Diagonal};
    use crate::testutil::{dense_fv, eigenvalues, random_psd, random_unit, random_vec, rng, to_nalgebra};
    use proptest::prelude::*;

    #[test]
    fn order_zero_is_rayleigh_quotient() {
        let (a, _) = random_psd(&mut rng(1), 7, 3.0);
        let v = random_unit(&mut rng(2), 7);
        let u = lanczos_fv(&a, &v, 0, |x| (-x).exp()).unwrap();
        let q = dot(&v, &a.apply(&v));
        let expect: Vec<f64> = v.iter().map(|x| (-q).exp() * x).collect();
        assert!(dist(&u, &expect) < 1e-15);
    }

    #[test]
    fn eigenvector_start_breaks_down() {
        let b = Diagonal(vec![0.5, 2.0, 3.0, 7.0]);
        let e2 = [0.0, 0.0, 1.0, 0.0];
        let fact = lanczos_factorize(&b, &e2, 3).unwrap();
        assert!(fact.breakdown);
        assert_eq!(fact.effective_order, 0);
        let u = lanczos_fv(&b, &e2, 3, |x| x.sqrt()).unwrap();
        assert_eq!(u, vec![0.0, 0.0, 3f64.sqrt(), 0.0]);
    }

    #[test]
    fn full_order_path_laplacian() {
        let g = generate(&Generator::Path { n: 6 }, 0).unwrap();
        let v = random_unit(&mut rng(3), 6);
        let u = lanczos_fv(&g, &v, 5, |x| (-x).exp()).unwrap();
        let exact = dense_fv(&to_nalgebra(&g), &v, |x| (-x).exp());
        assert!(dist(&u, &exact) < 1e-12);
    }

    #[test]
    fn exact_at_full_order() {
        let mut r = rng(4);
        for n in 2..=12 {
            let (a, _) = random_psd(&mut r, n, 5.0);
            let v = random_unit(&mut r, n);
            let u = lanczos_fv(&a, &v, n - 1, |x| (1.0 + x).ln()).unwrap();
            let exact = dense_fv(&to_nalgebra(&a), &v, |x| (1.0 + x).ln());
            assert!(dist(&u, &exact) < 1e-11, "n={n}");
        }
    }

    #[test]
    fn factorization_invariants() {
        let mut r = rng(5);
        let (a, _) = random_psd(&mut r, 80, 30.0);
        let v = random_unit(&mut r, 80);
        let fact = lanczos_factorize(&a, &v, 20).unwrap();
        assert_eq!(fact.effective_order, 20);
        assert!(fact.orthogonality_defect() < 1e-10);
        let t = &fact.coeff;
        for i in 0..t.order() {
            for j in 0..t.order() {
                if i.abs_diff(j) > 1 {
                    assert_eq!(t.get(i, j), 0.0);
                }
                if j == i + 1 {
                    assert!(t.get(i, j) >= 0.0);
                }
            }
        }
        let spec = eigenvalues(&to_nalgebra(&a));
        let ritz = sym_eig(t, DEFAULT_ORDER_CAP).unwrap().values;
        assert!(ritz[0] >= spec[0] - 1e-10 && *ritz.last().unwrap() <= spec.last().unwrap() + 1e-10);
    }

    #[test]
    fn expmv_examples() {
        let v = random_vec(&mut rng(6), 5);
        let zero = DenseSymmetric::from_diagonal(&[0.0; 5]);
        assert!(dist(&expmv_lanczos(&zero, &v, 1e-8).unwrap(), &v) < 1e-14);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = expmv_lanczos(&Diagonal(vec![1.0, 2.0]), &[h, h], 1e-10).unwrap();
        assert!(dist(&u, &[(-1f64).exp() * h, (-2f64).exp() * h]) < 1e-14);

        let mut r = rng(7);
        let (a, _) = random_psd(&mut r, 100, 50.0);
        let v = random_unit(&mut r, 100);
        let u = expmv_lanczos(&a, &v, 1e-8).unwrap();
        let exact = dense_fv(&to_nalgebra(&a), &v, |x| (-x).exp());
        assert!(dist(&u, &exact) < 1e-8);
    }

    #[test]
    fn error_decays_with_order() {
        let mut r = rng(8);
        let (a, _) = random_psd(&mut r, 150, 200.0);
        let v = random_unit(&mut r, 150);
        let exact = dense_fv(&to_nalgebra(&a), &v, |x| (-x).exp());
        let mut last = f64::INFINITY;
        for k in (2..=80).step_by(6) {
            let err = dist(&lanczos_fv(&a, &v, k, |x| (-x).exp()).unwrap(), &exact);
            assert!(err <= last * 1.5 + 1e-13, "k={k}: {err} after {last}");
            last = last.min(err);
        }
        assert!(last < 1e-12);
    }

    #[test]
    fn order_formula() {
        assert_eq!(lanczos_order(0.0, (-1f64).exp(), 1.0), 1);
        assert_eq!(lanczos_order(100.0, 1e-3, 1.0), 351);
        assert!(lanczos_order(100.0, 1e-6, 1.0) > lanczos_order(10.0, 1e-6, 1.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn homogeneous_in_v(seed in any::<u64>(), alpha in -50.0f64..50.0) {
            let mut r = rng(seed);
            let (a, _) = random_psd(&mut r, 20, 10.0);
            let v = random_vec(&mut r, 20);
            let av: Vec<f64> = v.iter().map(|x| alpha * x).collect();
            let u = expmv_lanczos(&a, &v, 1e-10).unwrap();
            let ua = expmv_lanczos(&a, &av, 1e-10).unwrap();
            let expect: Vec<f64> = u.iter().map(|x| alpha * x).collect();
            prop_assert!(dist(&ua, &expect) <= 1e-12 * (1.0 + norm(&expect)));
        }
    }
}
