use rand::Rng;
use serde::Serialize;

use super::sweep::{prefix_profile, proj_round, sweep_order};
use super::Embedding;
use crate::error::{Error, Result};
use crate::graph::{Cut, Graph};

/// How a cut was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutCase {
    /// Random projections of a well-spread core, swept in the balanced window.
    Projection,
    /// Sweep over radii; the cut holds a large share of the deviation but may be small.
    RadialSweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailReason {
    /// Edge energy exceeds alpha times the deviation: the walk is not mixing
    /// slowly enough for gamma to be the right scale.
    EdgeEnergy,
    /// No radial prefix below the volume limit met the conductance bound.
    NoSparseSweep,
}

/// The quantities each test compared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FindCutDiagnostics {
    pub psi: f64,
    /// sum over edges of |v_i - v_j|^2.
    pub edge_energy: f64,
    pub alpha: f64,
    /// Number of vertices whose squared radius is under the core threshold.
    pub core_size: usize,
    /// Deviation of the core around its own mean.
    pub core_deviation: f64,
    pub conductance_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FindCut {
    Cut { cut: Cut, case: CutCase, diagnostics: FindCutDiagnostics },
    Fail { reason: FailReason, diagnostics: FindCutDiagnostics },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FindCutOptions {
    /// alpha = alpha_factor * gamma.
    pub alpha_factor: f64,
    /// c = c_factor * b, the balance window of the projection step.
    pub c_factor: f64,
    /// Number of random directions; `None` means ceil(4 ln n).
    pub directions: Option<usize>,
}

impl Default for FindCutOptions {
    fn default() -> Self {
        FindCutOptions { alpha_factor: 48.0, c_factor: 0.01, directions: None }
    }
}

impl FindCutOptions {
    pub fn directions_for(&self, n: usize) -> usize {
        self.directions.unwrap_or_else(|| (4.0 * (n as f64).ln()).ceil() as usize).max(1)
    }
}

/// Either a cut that is balanced or carries much of the embedding's
/// deviation, or a failure showing gamma is inconsistent with the embedding.
///
/// 1. Edge energy above alpha psi fails.
/// 2. With R = {i : r_i^2 <= 32 (1 - b)/b psi/2m}, if R's own deviation is at
///    least psi/128 the embedding is spread out inside the core and
///    projection rounding finds a balanced cut.
/// 3. Otherwise the deviation sits on few far-out vertices: sweep by radius and
///    return the most balanced prefix below volume (b/4) 2m with conductance at
///    most 40 sqrt(gamma).
pub fn find_cut<R: Rng + ?Sized>(
    g: &Graph,
    b: f64,
    gamma: f64,
    e: &Embedding,
    rng: &mut R,
    opts: &FindCutOptions,
) -> Result<FindCut> {
    if e.vectors.len() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: e.vectors.len() });
    }
    let two_m = g.total_volume() as f64;
    let psi = e.psi;
    let alpha = opts.alpha_factor * gamma;
    let bound = 40.0 * gamma.sqrt();
    let mut diag = FindCutDiagnostics {
        psi,
        edge_energy: e.edge_energy(g),
        alpha,
        core_size: 0,
        core_deviation: 0.0,
        conductance_bound: bound,
    };
    if diag.edge_energy > alpha * psi {
        return Ok(FindCut::Fail { reason: FailReason::EdgeEnergy, diagnostics: diag });
    }

    let core_limit = 32.0 * (1.0 - b) / b * psi / two_m;
    let core: Vec<usize> = (0..g.n()).filter(|&i| e.radii[i] * e.radii[i] <= core_limit).collect();
    diag.core_size = core.len();
    diag.core_deviation = e.deviation_within(&core);
    if diag.core_deviation >= psi / 128.0 {
        let c = opts.c_factor * b;
        let cut = proj_round(g, e, c, opts.directions_for(g.n()), rng)?;
        return Ok(FindCut::Cut { cut, case: CutCase::Projection, diagnostics: diag });
    }

    let order = sweep_order(&e.radii)?;
    let limit = b / 4.0 * two_m;
    let total = g.total_volume();
    let mut best: Option<(usize, usize, usize)> = None;
    for (idx, &(vol, boundary)) in prefix_profile(g, &order).iter().enumerate() {
        if vol as f64 >= limit {
            break;
        }
        let phi = boundary as f64 / vol.min(total - vol) as f64;
        // prefixes only grow, and stay under half the volume here, so the last
        // qualifying one is the most balanced
        if phi <= bound {
            best = Some((idx, vol, boundary));
        }
    }
    match best {
        Some((idx, vol, boundary)) => {
            let cut = Cut::from_parts(order[..=idx].to_vec(), vol, boundary, total);
            assert!(cut.conductance <= bound, "radial sweep returned conductance above its bound");
            Ok(FindCut::Cut { cut, case: CutCase::RadialSweep, diagnostics: diag })
        }
        None => Ok(FindCut::Fail { reason: FailReason::NoSparseSweep, diagnostics: diag }),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{embed, AhkState, Backend};
    use super::*;
    use crate::graph::{cut_stats, generate, Generator};
    use crate::testutil::rng;

    #[test]
    fn expander_with_tiny_gamma_fails_on_edge_energy() {
        // the 8-vertex expander mixes far faster than gamma claims, so the
        // remaining deviation is dominated by edge energy
        let g = generate(&Generator::Regular { n: 8, d: 3 }, 1).unwrap();
        let gamma = 1.0 / 64.0;
        let s = AhkState::new(&g, 0.25, gamma).unwrap().with_tau(0.5);
        let e = embed(&g, &s, 8, &mut rng(2), Backend::Dense).unwrap();
        let out = find_cut(&g, 0.25, gamma, &e, &mut rng(3), &FindCutOptions::default()).unwrap();
        match out {
            FindCut::Fail { reason, diagnostics } => {
                assert_eq!(reason, FailReason::EdgeEnergy);
                assert!(diagnostics.edge_energy > diagnostics.alpha * diagnostics.psi);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn planted_bisection_takes_projection_route() {
        let n = 40;
        let g = generate(&Generator::Planted { n, d: 3, cross: 2 }, 7).unwrap();
        let planted: Vec<usize> = (0..n / 2).collect();
        let gamma = 2.0 * cut_stats(&g, &planted).unwrap().conductance;
        let s = AhkState::new(&g, 0.25, gamma).unwrap();
        let e = embed(&g, &s, n, &mut rng(1), Backend::Dense).unwrap();
        let out = find_cut(&g, 0.25, gamma, &e, &mut rng(2), &FindCutOptions::default()).unwrap();
        match out {
            FindCut::Cut { cut, case, .. } => {
                assert_eq!(case, CutCase::Projection);
                assert!(cut.balance >= 0.25 / 100.0);
            }
            other => panic!("expected a cut, got {other:?}"),
        }
    }

    #[test]
    fn pendant_cluster_takes_radial_route() {
        // a triangle hanging off a 21-clique by one edge carries almost all deviation;
        // the core's own spread stays under psi/128 for gamma in about [0.03, 0.05]
        let g = generate(&Generator::Dumbbell { left: 21, right: 3, bridge: 1 }, 0).unwrap();
        let pendant: Vec<usize> = (21..24).collect();
        let gamma = 0.035;
        let s = AhkState::new(&g, 0.5, gamma).unwrap();
        let e = embed(&g, &s, g.n(), &mut rng(1), Backend::Dense).unwrap();
        let out = find_cut(&g, 0.5, gamma, &e, &mut rng(2), &FindCutOptions::default()).unwrap();
        match out {
            FindCut::Cut { cut, case, diagnostics } => {
                assert_eq!(case, CutCase::RadialSweep);
                assert!(pendant.iter().all(|v| cut.side.contains(v)), "{:?}", cut.side);
                assert!(cut.conductance <= diagnostics.conductance_bound);
            }
            other => panic!("expected a cut, got {other:?}"),
        }
    }
}
