//! Balanced separator search: accelerated heat-kernel walks embedded through
//! a random sketch, a three-way cut finder, and the outer loop that either
//! returns a balanced sparse cut or reports that the walk mixes well enough
//! to rule one out.

mod embed;
mod findcut;
mod sweep;

pub use embed::{embed, expmv_delta, random_frame, total_deviation, Backend, Embedding};
pub use findcut::{find_cut, CutCase, FailReason, FindCut, FindCutDiagnostics, FindCutOptions};
pub use sweep::{proj_round, sweep_cut, sweep_order};

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{cut_stats, Cut, Graph};

/// Sketch distortion; (1 + eps)/(1 - eps) = 4/3.
pub const EPS: f64 = 1.0 / 7.0;

/// Walk parameters carried between iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct AhkState {
    pub beta: Vec<f64>,
    pub tau: f64,
    pub t: usize,
    /// Union of the cuts found so far.
    pub removed: Vec<bool>,
    pub gamma: f64,
    pub b: f64,
}

impl AhkState {
    /// beta = 0 and tau = ln n / (12 gamma), with b in (0, 1/2] and gamma in [1/n^2, 1).
    pub fn new(g: &Graph, b: f64, gamma: f64) -> Result<Self> {
        let n = g.n() as f64;
        if !(b > 0.0 && b <= 0.5) {
            return Err(Error::InvalidParameter(format!("balance b must lie in (0, 1/2], got {b}")));
        }
        // a hair of slack so that gamma = 1/n^2 computed in floating point is accepted
        if !(gamma >= (1.0 - 1e-12) / (n * n) && gamma < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in [1/n^2, 1) = [{}, 1), got {gamma}",
                1.0 / (n * n)
            )));
        }
        Ok(AhkState {
            beta: vec![0.0; g.n()],
            tau: n.ln() / (12.0 * gamma),
            t: 0,
            removed: vec![false; g.n()],
            gamma,
            b,
        })
    }

    /// Overrides the walk time; used to probe limiting cases.
    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn removed_side(&self) -> Vec<usize> {
        (0..self.removed.len()).filter(|&i| self.removed[i]).collect()
    }

    pub fn removed_volume(&self, g: &Graph) -> usize {
        (0..g.n()).filter(|&i| self.removed[i]).map(|i| g.degree(i)).sum()
    }

    pub fn max_beta(&self) -> f64 {
        self.beta.iter().copied().fold(0.0, f64::max)
    }
}

/// T = ceil(12 ln n).
pub fn iteration_limit(n: usize) -> usize {
    (12.0 * (n as f64).ln()).ceil() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalsepConfig {
    pub alpha_factor: f64,
    pub c_factor: f64,
    /// Sketch size is ceil(c_jl ln n / eps^2), capped at n.
    pub c_jl: f64,
    pub backend: Backend,
    pub seed: u64,
    /// Random directions per rounding; `None` means ceil(4 ln n).
    pub directions: Option<usize>,
    /// Fixed sketch size instead of the formula.
    pub k_jl: Option<usize>,
    /// Record wall-clock time per iteration. Off by default so reports are reproducible.
    pub timing: bool,
}

impl Default for BalsepConfig {
    fn default() -> Self {
        BalsepConfig {
            alpha_factor: 48.0,
            c_factor: 0.01,
            c_jl: 24.0,
            backend: Backend::Rational,
            seed: 0,
            directions: None,
            k_jl: None,
            timing: false,
        }
    }
}

impl BalsepConfig {
    pub fn sketch_size(&self, n: usize) -> usize {
        self.k_jl.unwrap_or_else(|| (self.c_jl * (n as f64).ln() / (EPS * EPS)).ceil() as usize).clamp(1, n)
    }

    fn find_cut_options(&self) -> FindCutOptions {
        FindCutOptions {
            alpha_factor: self.alpha_factor,
            c_factor: self.c_factor,
            directions: self.directions,
        }
    }
}

/// A ChaCha8 stream for one purpose within one run.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutSource {
    /// The cut found in the final iteration.
    Single,
    /// The union of all cuts found so far.
    Union,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoCertReason {
    /// The deviation fell to (1 + eps)/n.
    Mixed,
    /// T iterations ran without a balanced cut.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum PartitionResult {
    BalancedCut {
        iteration: usize,
        case: CutCase,
        source: CutSource,
        cut: Cut,
        conductance_bound: f64,
        /// The bound holds with high probability, not always; it is checked, not assumed.
        within_bound: bool,
    },
    NoCert {
        iteration: usize,
        reason: NoCertReason,
        psi: f64,
        threshold: f64,
        /// -ln(psi) / (2 tau): what psi implies for the second eigenvalue of the
        /// normalized walk generator, up to sketch error.
        lambda2_lower_estimate: Option<f64>,
        removed_volume: usize,
        beta: Vec<f64>,
    },
    Fail {
        iteration: usize,
        reason: FailReason,
        diagnostics: FindCutDiagnostics,
    },
}

impl PartitionResult {
    pub fn kind(&self) -> &'static str {
        match self {
            PartitionResult::BalancedCut { .. } => "balanced_cut",
            PartitionResult::NoCert { .. } => "no_cert",
            PartitionResult::Fail { .. } => "fail",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationReport {
    pub iteration: usize,
    pub psi: f64,
    pub threshold: f64,
    pub diagnostics: Option<FindCutDiagnostics>,
    pub case: Option<CutCase>,
    pub cut: Option<Cut>,
    /// Balance of the union of cuts after this iteration.
    pub union_balance: Option<f64>,
    pub max_beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunParams {
    pub n: usize,
    pub m: usize,
    pub b: f64,
    pub gamma: f64,
    pub c: f64,
    pub alpha: f64,
    pub tau: f64,
    pub max_iterations: usize,
    pub k_jl: usize,
    pub eps: f64,
    pub delta_expmv: f64,
    pub directions: usize,
    pub config: BalsepConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionReport {
    pub params: RunParams,
    pub iterations: Vec<IterationReport>,
    #[serde(flatten)]
    pub result: PartitionResult,
}

/// Runs up to T = ceil(12 ln n) rounds of: embed, stop with no certificate
/// once psi <= (1 + eps)/n, find a cut, stop if it or the union so far is
/// (c_factor b)-balanced, otherwise raise beta by 72 gamma / T on the cut.
pub fn balsep(g: &Graph, b: f64, gamma: f64, cfg: &BalsepConfig) -> Result<PartitionReport> {
    let n = g.n();
    let mut state = AhkState::new(g, b, gamma)?;
    if !(cfg.alpha_factor > 0.0 && cfg.c_factor > 0.0 && cfg.c_factor <= 1.0 && cfg.c_jl > 0.0) {
        return Err(Error::InvalidParameter(
            "alpha_factor, c_factor in (0, 1] and c_jl must be positive".into(),
        ));
    }
    let big_t = iteration_limit(n);
    let k = cfg.sketch_size(n);
    let c = cfg.c_factor * b;
    let step = 72.0 * gamma / big_t as f64;
    let threshold = (1.0 + EPS) / n as f64;
    let opts = cfg.find_cut_options();
    let params = RunParams {
        n,
        m: g.m(),
        b,
        gamma,
        c,
        alpha: cfg.alpha_factor * gamma,
        tau: state.tau,
        max_iterations: big_t,
        k_jl: k,
        eps: EPS,
        delta_expmv: expmv_delta(n),
        directions: opts.directions_for(n),
        config: cfg.clone(),
    };
    let mut iterations = Vec::new();
    let mut last_psi = f64::NAN;

    for t in 0..big_t {
        state.t = t;
        let start = Instant::now();
        let e = embed(g, &state, k, &mut stream_rng(cfg.seed, 2 * t as u64), cfg.backend)
            .map_err(|err| err.at_iteration(t))?;
        let psi = e.psi;
        last_psi = psi;
        let mut rec = IterationReport {
            iteration: t,
            psi,
            threshold,
            diagnostics: None,
            case: None,
            cut: None,
            union_balance: None,
            max_beta: state.max_beta(),
            seconds: None,
        };
        let elapsed = |rec: &mut IterationReport| {
            if cfg.timing {
                rec.seconds = Some(start.elapsed().as_secs_f64());
            }
        };
        if psi <= threshold {
            elapsed(&mut rec);
            iterations.push(rec);
            let result = no_cert(g, &state, t, NoCertReason::Mixed, psi, threshold);
            return Ok(PartitionReport { params, iterations, result });
        }
        let found = find_cut(g, b, gamma, &e, &mut stream_rng(cfg.seed, 2 * t as u64 + 1), &opts)
            .map_err(|err| err.at_iteration(t))?;
        let (cut, case, diagnostics) = match found {
            FindCut::Fail { reason, diagnostics } => {
                rec.diagnostics = Some(diagnostics);
                elapsed(&mut rec);
                iterations.push(rec);
                let result = PartitionResult::Fail { iteration: t, reason, diagnostics };
                return Ok(PartitionReport { params, iterations, result });
            }
            FindCut::Cut { cut, case, diagnostics } => (cut, case, diagnostics),
        };
        rec.diagnostics = Some(diagnostics);
        rec.case = Some(case);
        rec.cut = Some(cut.clone());

        let bound = diagnostics.conductance_bound;
        if cut.is_balanced(c) {
            elapsed(&mut rec);
            iterations.push(rec);
            let result = balanced(t, case, CutSource::Single, cut, bound, c);
            return Ok(PartitionReport { params, iterations, result });
        }
        for &i in &cut.side {
            state.removed[i] = true;
        }
        let union = state.removed_side();
        let union_cut = if union.len() < n { Some(cut_stats(g, &union)?) } else { None };
        rec.union_balance = Some(union_cut.as_ref().map_or(0.0, |u| u.balance));
        if let Some(u) = union_cut.filter(|u| u.is_balanced(c)) {
            elapsed(&mut rec);
            iterations.push(rec);
            let result = balanced(t, case, CutSource::Union, u, bound, c);
            return Ok(PartitionReport { params, iterations, result });
        }
        for &i in &cut.side {
            state.beta[i] += step;
        }
        assert!(state.max_beta() <= 72.0 * gamma * (1.0 + 1e-12), "acceleration exceeded 72 gamma");
        rec.max_beta = state.max_beta();
        elapsed(&mut rec);
        iterations.push(rec);
    }
    let result = no_cert(g, &state, big_t - 1, NoCertReason::Exhausted, last_psi, threshold);
    Ok(PartitionReport { params, iterations, result })
}

fn balanced(
    iteration: usize,
    case: CutCase,
    source: CutSource,
    cut: Cut,
    bound: f64,
    c: f64,
) -> PartitionResult {
    assert!(cut.balance >= c, "emitted cut is less balanced than c");
    let within_bound = cut.conductance <= bound;
    PartitionResult::BalancedCut { iteration, case, source, cut, conductance_bound: bound, within_bound }
}

fn no_cert(
    g: &Graph,
    state: &AhkState,
    iteration: usize,
    reason: NoCertReason,
    psi: f64,
    threshold: f64,
) -> PartitionResult {
    let lambda2_lower_estimate =
        (psi > 0.0 && psi < 1.0 && state.tau > 0.0).then(|| -psi.ln() / (2.0 * state.tau));
    PartitionResult::NoCert {
        iteration,
        reason,
        psi,
        threshold,
        lambda2_lower_estimate,
        removed_volume: state.removed_volume(g),
        beta: state.beta.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Generator};

    #[test]
    fn state_validation() {
        let g = generate(&Generator::Path { n: 10 }, 0).unwrap();
        assert!(AhkState::new(&g, 0.0, 0.1).is_err());
        assert!(AhkState::new(&g, 0.6, 0.1).is_err());
        assert!(AhkState::new(&g, 0.25, 1.0).is_err());
        assert!(AhkState::new(&g, 0.25, 0.001).is_err());
        let s = AhkState::new(&g, 0.25, 0.01).unwrap();
        assert!((s.tau - 10f64.ln() / 0.12).abs() < 1e-12);
        assert_eq!(iteration_limit(200), 64);
    }

    #[test]
    fn sketch_size_is_capped() {
        let cfg = BalsepConfig::default();
        assert_eq!(cfg.sketch_size(64), 64);
        assert_eq!(cfg.sketch_size(100_000), (24.0 * 100_000f64.ln() * 49.0).ceil() as usize);
        assert_eq!(BalsepConfig { k_jl: Some(5), ..cfg }.sketch_size(64), 5);
    }

    #[test]
    fn planted_bisection_is_found() {
        let g = generate(&Generator::Planted { n: 60, d: 3, cross: 2 }, 3).unwrap();
        let planted: Vec<usize> = (0..30).collect();
        let gamma = 2.0 * cut_stats(&g, &planted).unwrap().conductance;
        let report = balsep(&g, 0.25, gamma, &BalsepConfig { seed: 5, ..Default::default() }).unwrap();
        match &report.result {
            PartitionResult::BalancedCut { cut, within_bound, .. } => {
                assert!(cut.balance >= 0.0025);
                assert!(*within_bound);
            }
            other => panic!("expected a balanced cut, got {other:?}"),
        }
        assert!(report.iterations.len() <= iteration_limit(60));
    }

    #[test]
    fn clique_mixes_and_certifies() {
        let g = generate(&Generator::Clique { n: 12 }, 0).unwrap();
        let report = balsep(&g, 0.25, 0.05, &BalsepConfig::default()).unwrap();
        match report.result {
            PartitionResult::NoCert { reason, psi, threshold, .. } => {
                assert_eq!(reason, NoCertReason::Mixed);
                assert!(psi <= threshold);
            }
            other => panic!("expected no certificate, got {other:?}"),
        }
    }

    #[test]
    fn pendant_run_accelerates_removed_vertices() {
        let g = generate(&Generator::Dumbbell { left: 21, right: 3, bridge: 1 }, 0).unwrap();
        let gamma = 0.035;
        let cfg = BalsepConfig { backend: Backend::Dense, ..Default::default() };
        let report = balsep(&g, 0.5, gamma, &cfg).unwrap();
        let first = &report.iterations[0];
        assert_eq!(first.case, Some(CutCase::RadialSweep));
        if report.iterations.len() > 1 {
            assert!(report.iterations[1].max_beta > 0.0);
        }
        for it in &report.iterations {
            assert!(it.max_beta <= 72.0 * gamma * (1.0 + 1e-12));
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let g = generate(&Generator::Planted { n: 40, d: 3, cross: 2 }, 1).unwrap();
        let cfg = BalsepConfig { seed: 11, ..Default::default() };
        let a = balsep(&g, 0.25, 0.1, &cfg).unwrap();
        let b = balsep(&g, 0.25, 0.1, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
