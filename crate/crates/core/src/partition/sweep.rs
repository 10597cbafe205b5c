use rand::Rng;
use rand_distr::StandardNormal;

use super::Embedding;
use crate::error::{Error, Result};
use crate::graph::{Cut, Graph};
use crate::linalg::dot;

/// Vertices by score descending, ties by id ascending.
pub fn sweep_order(score: &[f64]) -> Result<Vec<usize>> {
    if score.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut order: Vec<usize> = (0..score.len()).collect();
    order.sort_by(|&i, &j| score[j].total_cmp(&score[i]).then(i.cmp(&j)));
    Ok(order)
}

/// (volume, boundary) of every proper prefix of `order`, maintained incrementally.
pub(crate) fn prefix_profile(g: &Graph, order: &[usize]) -> Vec<(usize, usize)> {
    let mut inside = vec![false; g.n()];
    let mut vol = 0;
    let mut boundary = 0isize;
    let mut out = Vec::with_capacity(order.len().saturating_sub(1));
    for &i in &order[..order.len().saturating_sub(1)] {
        let into = g.neighbors(i).iter().filter(|&&j| inside[j]).count() as isize;
        boundary += g.degree(i) as isize - 2 * into;
        inside[i] = true;
        vol += g.degree(i);
        out.push((vol, boundary as usize));
    }
    out
}

/// Minimum-conductance prefix of the score order whose volume lies in
/// `window` (all proper prefixes when `None`). Earlier prefixes win ties.
pub fn sweep_cut(g: &Graph, score: &[f64], window: Option<(f64, f64)>) -> Result<Cut> {
    if score.len() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: score.len() });
    }
    let order = sweep_order(score)?;
    best_prefix(g, &order, window).ok_or(Error::EmptyWindow)
}

fn best_prefix(g: &Graph, order: &[usize], window: Option<(f64, f64)>) -> Option<Cut> {
    let total = g.total_volume();
    let (lo, hi) = window.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let mut best: Option<(f64, usize, usize, usize)> = None;
    for (idx, &(vol, boundary)) in prefix_profile(g, order).iter().enumerate() {
        let v = vol as f64;
        if v < lo || v > hi {
            continue;
        }
        let phi = boundary as f64 / vol.min(total - vol) as f64;
        if best.is_none_or(|(b, ..)| phi < b) {
            best = Some((phi, idx, vol, boundary));
        }
    }
    let (_, idx, vol, boundary) = best?;
    Some(Cut::from_parts(order[..=idx].to_vec(), vol, boundary, total))
}

/// Random-direction rounding of an embedding: for each of `directions`
/// Gaussian unit vectors u, sweep x_i = sqrt(k) u.v_i inside the volume window
/// [c 2m, (1 - c) 2m] and keep the least-conductance cut.
pub fn proj_round<R: Rng + ?Sized>(
    g: &Graph,
    e: &Embedding,
    c: f64,
    directions: usize,
    rng: &mut R,
) -> Result<Cut> {
    if e.vectors.len() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: e.vectors.len() });
    }
    let first = &e.vectors[0];
    if e.vectors.iter().all(|v| v == first) {
        return Err(Error::Degenerate("all embedding vectors coincide".into()));
    }
    let k = e.dim();
    let total = g.total_volume() as f64;
    let window = Some((c * total, (1.0 - c) * total));
    let mut best: Option<Cut> = None;
    for _ in 0..directions.max(1) {
        let mut u: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        let len = dot(&u, &u).sqrt();
        u.iter_mut().for_each(|x| *x /= len);
        let scale = (k as f64).sqrt();
        let x: Vec<f64> = e.vectors.iter().map(|v| scale * dot(&u, v)).collect();
        if x.iter().all(|&xi| xi == x[0]) {
            continue;
        }
        let Some(cut) = best_prefix(g, &sweep_order(&x)?, window) else { continue };
        if best.as_ref().is_none_or(|b| cut.conductance < b.conductance) {
            best = Some(cut);
        }
    }
    best.ok_or_else(|| Error::Degenerate("no projection produced a cut inside the volume window".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cut_stats, generate, Generator};
    use crate::testutil::rng;
    use proptest::prelude::*;
    use rand::Rng;

    fn path(n: usize) -> Graph {
        generate(&Generator::Path { n }, 0).unwrap()
    }

    #[test]
    fn path_of_four() {
        let cut = sweep_cut(&path(4), &[3.0, 2.0, 1.0, 0.0], None).unwrap();
        assert_eq!(cut.side, vec![0, 1]);
        assert_eq!(cut.boundary, 1);
        assert!((cut.conductance - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn constant_score_uses_id_order() {
        assert_eq!(sweep_order(&[1.0; 5]).unwrap(), vec![0, 1, 2, 3, 4]);
        let g = path(5);
        let prof = prefix_profile(&g, &[0, 1, 2, 3, 4]);
        assert_eq!(prof, vec![(1, 1), (3, 1), (5, 1), (7, 1)]);
    }

    #[test]
    fn window_restricts_and_can_be_empty() {
        let g = path(6);
        let score = [5.0, 4.0, 3.0, 2.0, 1.0, 0.0];
        // volumes of prefixes: 1, 3, 5, 7, 9 out of 10
        let cut = sweep_cut(&g, &score, Some((6.0, 10.0))).unwrap();
        assert_eq!(cut.side, vec![0, 1, 2, 3]);
        assert!(matches!(sweep_cut(&g, &score, Some((3.5, 4.5))), Err(Error::EmptyWindow)));
        assert!(matches!(sweep_cut(&g, &[f64::NAN; 6], None), Err(Error::NonFinite)));
    }

    proptest! {
        #[test]
        fn clique_sweep_matches_brute_force(n in 3usize..10, seed in 0u64..1000) {
            let g = generate(&Generator::Clique { n }, 0).unwrap();
            let mut r = rng(seed);
            let score: Vec<f64> = (0..n).map(|_| r.random::<f64>()).collect();
            let cut = sweep_cut(&g, &score, None).unwrap();
            let order = sweep_order(&score).unwrap();
            let brute = (1..n)
                .map(|p| cut_stats(&g, &order[..p]).unwrap().conductance)
                .fold(f64::INFINITY, f64::min);
            prop_assert!((cut.conductance - brute).abs() < 1e-12);
        }

        #[test]
        fn incremental_boundary_is_exact(seed in 0u64..500) {
            let g = generate(&Generator::Regular { n: 16, d: 3 }, seed).unwrap();
            let mut r = rng(seed);
            let score: Vec<f64> = (0..16).map(|_| r.random::<f64>()).collect();
            let order = sweep_order(&score).unwrap();
            for (p, &(vol, boundary)) in prefix_profile(&g, &order).iter().enumerate() {
                let direct = cut_stats(&g, &order[..=p]).unwrap();
                prop_assert_eq!(vol, direct.vol);
                prop_assert_eq!(boundary, direct.boundary);
            }
        }
    }

    #[test]
    fn degenerate_embedding_is_rejected() {
        let g = path(5);
        let e = Embedding::from_vectors(&g, vec![vec![1.0, 2.0]; 5]).unwrap();
        assert!(matches!(proj_round(&g, &e, 0.01, 4, &mut rng(1)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn monotone_path_projection_gives_middle_cut() {
        let g = path(8);
        let e = Embedding::from_vectors(&g, (0..8).map(|i| vec![i as f64]).collect()).unwrap();
        let cut = proj_round(&g, &e, 0.25 / 100.0, 1, &mut rng(3)).unwrap();
        let mut side = cut.side.clone();
        if side[0] != 0 {
            side = (0..8).filter(|i| !side.contains(i)).collect();
        }
        assert_eq!(side, vec![0, 1, 2, 3]);
        assert_eq!(cut.boundary, 1);
    }

    #[test]
    fn antipodal_clusters_recover_planted_cut() {
        let n = 40;
        let g = generate(&Generator::Planted { n, d: 3, cross: 2 }, 5).unwrap();
        let planted: Vec<usize> = (0..n / 2).collect();
        let target = cut_stats(&g, &planted).unwrap().conductance;
        let mut r = rng(9);
        let vectors = (0..n)
            .map(|i| {
                let s = if i < n / 2 { 1.0 } else { -1.0 };
                (0..6).map(|_| s + 0.1 * r.sample::<f64, _>(StandardNormal)).collect()
            })
            .collect();
        let e = Embedding::from_vectors(&g, vectors).unwrap();
        let cut = proj_round(&g, &e, 0.0025, 15, &mut rng(4)).unwrap();
        assert!(cut.conductance <= 2.0 * target, "{} vs {}", cut.conductance, target);
    }
}
