//! Simple undirected graphs in CSR form, Laplacian products and cut statistics.

mod generate;
mod io;

pub use generate::{generate, Generator};
pub use io::{load_edge_list, parse_edge_list, write_edge_list};

use serde::Serialize;
use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Unweighted, connected, simple graph. Every edge is stored in both
/// endpoints' neighbor lists, which are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    labels: Vec<u64>,
    m: usize,
}

impl Graph {
    /// Builds a graph on `0..n` from an edge list. Duplicate edges are merged,
    /// self-loops and disconnected inputs are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::with_labels((0..n as u64).collect(), edges)
    }

    pub(crate) fn with_labels<I>(labels: Vec<u64>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = labels.len();
        if n < 2 {
            return Err(Error::TooSmall(n));
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::DimensionMismatch { expected: n, got: u.max(v) + 1 });
            }
            if u == v {
                return Err(Error::SelfLoop(labels[u]));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            neighbors.extend_from_slice(list);
            offsets.push(neighbors.len());
        }
        let g = Graph { offsets, m: neighbors.len() / 2, neighbors, labels };
        let components = g.component_count();
        if components > 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(g)
    }

    fn component_count(&self) -> usize {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        let mut components = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            components += 1;
            seen[s] = true;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        components
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Sum of all degrees, 2m.
    pub fn total_volume(&self) -> usize {
        2 * self.m
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.degree(i) as f64).collect()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Original vertex ids, indexed by dense id.
    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Each edge once, as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n())
            .flat_map(move |i| self.neighbors(i).iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn volume(&self, side: &[usize]) -> usize {
        side.iter().map(|&i| self.degree(i)).sum()
    }

    /// y = (D - A) x.
    pub fn laplacian_apply_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let nb = self.neighbors(i);
            let s: f64 = nb.iter().map(|&j| x[j]).sum();
            *yi = nb.len() as f64 * x[i] - s;
        }
    }

    pub fn laplacian_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: x.len() });
        }
        let mut y = vec![0.0; x.len()];
        self.laplacian_apply_into(x, &mut y);
        Ok(y)
    }

    /// x^T L x as a sum over edges.
    pub fn laplacian_quadratic(&self, x: &[f64]) -> f64 {
        self.edges().map(|(i, j)| (x[i] - x[j]).powi(2)).sum()
    }

    /// Membership mask for a vertex subset, validating ids.
    pub(crate) fn mask(&self, side: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.n()];
        for &i in side {
            if i >= self.n() {
                return Err(Error::InvalidCut(format!("vertex {i} out of range")));
            }
            mask[i] = true;
        }
        Ok(mask)
    }
}

/// A nonempty proper vertex subset with its cached statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cut {
    pub side: Vec<usize>,
    #[serde(skip)]
    pub vol: usize,
    pub boundary: usize,
    pub conductance: f64,
    pub balance: f64,
}

impl Cut {
    pub(crate) fn from_parts(mut side: Vec<usize>, vol: usize, boundary: usize, total: usize) -> Self {
        side.sort_unstable();
        let small = vol.min(total - vol) as f64;
        Cut { side, vol, boundary, conductance: boundary as f64 / small, balance: small / total as f64 }
    }

    pub fn is_balanced(&self, c: f64) -> bool {
        self.balance >= c
    }
}

/// Exact boundary, volume, conductance and balance of `side`.
pub fn cut_stats(g: &Graph, side: &[usize]) -> Result<Cut> {
    let mask = g.mask(side)?;
    let size = mask.iter().filter(|&&b| b).count();
    if size == 0 || size == g.n() {
        return Err(Error::InvalidCut(format!(
            "side must be a nonempty proper subset (size {size} of {})",
            g.n()
        )));
    }
    let mut vol = 0;
    let mut boundary = 0;
    let mut members = Vec::with_capacity(size);
    for i in (0..g.n()).filter(|&i| mask[i]) {
        members.push(i);
        vol += g.degree(i);
        boundary += g.neighbors(i).iter().filter(|&&j| !mask[j]).count();
    }
    Ok(Cut::from_parts(members, vol, boundary, g.total_volume()))
}
