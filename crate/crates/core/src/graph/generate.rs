use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

use super::Graph;
use crate::error::{Error, Result};

const MAX_ATTEMPTS: usize = 10_000;

/// Test-graph families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Clique {
        n: usize,
    },
    Path {
        n: usize,
    },
    /// Random d-regular graph from the configuration model.
    Regular {
        n: usize,
        d: usize,
    },
    /// Two random d-regular halves on `0..n/2` and `n/2..n` plus `cross`
    /// distinct edges between them.
    Planted {
        n: usize,
        d: usize,
        cross: usize,
    },
    /// Cliques of sizes `left` and `right` joined by a path with `bridge`
    /// edges (so `bridge - 1` interior vertices). Vertices of the left clique
    /// come first, then the path interior, then the right clique.
    Dumbbell {
        left: usize,
        right: usize,
        bridge: usize,
    },
}

impl Generator {
    pub fn vertex_count(&self) -> usize {
        match *self {
            Generator::Clique { n }
            | Generator::Path { n }
            | Generator::Regular { n, .. }
            | Generator::Planted { n, .. } => n,
            Generator::Dumbbell { left, right, bridge } => left + right + bridge.saturating_sub(1),
        }
    }
}

/// Builds the graph described by `spec`. Output depends only on `spec` and `seed`.
pub fn generate(spec: &Generator, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match *spec {
        Generator::Clique { n } => Graph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))),
        Generator::Path { n } => Graph::from_edges(n, (1..n).map(|i| (i - 1, i))),
        Generator::Regular { n, d } => {
            let edges = regular_edges(n, d, &mut rng)?;
            Graph::from_edges(n, edges)
        }
        Generator::Planted { n, d, cross } => {
            if n % 2 != 0 {
                return Err(Error::Infeasible(format!("planted bisection needs even n, got {n}")));
            }
            let h = n / 2;
            if cross == 0 || cross > h * h {
                return Err(Error::Infeasible(format!("cross edge count {cross} not in 1..={}", h * h)));
            }
            let mut edges = regular_edges(h, d, &mut rng)?;
            edges.extend(regular_edges(h, d, &mut rng)?.into_iter().map(|(u, v)| (u + h, v + h)));
            let mut chosen = HashSet::new();
            while chosen.len() < cross {
                chosen.insert((rng.random_range(0..h), h + rng.random_range(0..h)));
            }
            let mut cross_edges: Vec<_> = chosen.into_iter().collect();
            cross_edges.sort_unstable();
            edges.extend(cross_edges);
            Graph::from_edges(n, edges)
        }
        Generator::Dumbbell { left, right, bridge } => {
            if left < 2 || right < 2 || bridge == 0 {
                return Err(Error::Infeasible("dumbbell needs cliques of size >= 2 and bridge >= 1".into()));
            }
            let n = spec.vertex_count();
            let r0 = left + bridge - 1;
            let mut edges: Vec<(usize, usize)> =
                (0..left).flat_map(|i| (i + 1..left).map(move |j| (i, j))).collect();
            edges.extend((r0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))));
            edges.extend((left - 1..r0).map(|i| (i, i + 1)));
            Graph::from_edges(n, edges)
        }
    }
}

/// Configuration model: pair shuffled stubs, restart on any self-loop,
/// repeated pair, or disconnected result.
fn regular_edges<R: Rng>(n: usize, d: usize, rng: &mut R) -> Result<Vec<(usize, usize)>> {
    if n < 2 || d == 0 || d >= n || !(n * d).is_multiple_of(2) {
        return Err(Error::Infeasible(format!("no connected simple {d}-regular graph on {n} vertices")));
    }
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'attempt: for _ in 0..MAX_ATTEMPTS {
        stubs.shuffle(rng);
        let mut seen = HashSet::with_capacity(stubs.len() / 2);
        let mut edges = Vec::with_capacity(stubs.len() / 2);
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        if Graph::from_edges(n, edges.iter().copied()).is_ok() {
            return Ok(edges);
        }
    }
    Err(Error::Infeasible(format!(
        "no connected simple {d}-regular graph on {n} vertices after {MAX_ATTEMPTS} attempts"
    )))
}
