//! Shared helpers for unit and integration tests: random fixtures and the
//! independent oracles (traversal counts, double sums, exhaustive cuts,
//! principal angles) that implementation results are checked against.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{DataMatrix, NeighborhoodSpec, WeightKind, WeightedGraph};
use crate::linalg::{eig_sym, SortOrder};

pub fn graph_from(weights: Array2<f64>) -> WeightedGraph {
    WeightedGraph::from_weights(weights, NeighborhoodSpec::Full, WeightKind::Binary).unwrap()
}

/// Random symmetric weights in [0, 1) with a light ring that keeps the graph
/// connected without dominating its structure.
pub fn random_connected_graph(n: usize, rng: &mut ChaCha8Rng) -> WeightedGraph {
    let mut w = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(0.5) {
                let v: f64 = rng.random_range(0.05..1.0);
                w[[i, j]] = v;
                w[[j, i]] = v;
            }
        }
    }
    for i in 0..n {
        let j = (i + 1) % n;
        if n > 1 && w[[i, j]] == 0.0 {
            w[[i, j]] = 0.05;
            w[[j, i]] = 0.05;
        }
    }
    graph_from(w)
}

pub fn random_data(d: usize, n: usize, rng: &mut ChaCha8Rng) -> DataMatrix {
    let mut m = Array2::<f64>::zeros((d, n));
    for v in m.iter_mut() {
        *v = rng.random_range(-2.0..2.0);
    }
    DataMatrix::new(m).unwrap()
}

/// Breadth-first connected-component count; the traversal oracle for the
/// spectral count.
pub fn bfs_components(w: &WeightedGraph) -> usize {
    let n = w.n();
    let mut seen = vec![false; n];
    let mut count = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut queue = vec![start];
        seen[start] = true;
        while let Some(v) = queue.pop() {
            for j in 0..n {
                if !seen[j] && w.weights()[[v, j]] > 0.0 {
                    seen[j] = true;
                    queue.push(j);
                }
            }
        }
    }
    count
}

/// `Σᵢ Σⱼ wᵢⱼ (fᵢ - fⱼ)²`, the scalar double-sum oracle.
pub fn double_sum_scalar(w: &WeightedGraph, f: &[f64]) -> f64 {
    let n = w.n();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = f[i] - f[j];
            s += w.weights()[[i, j]] * d * d;
        }
    }
    s
}

/// `Σᵢ Σⱼ wᵢⱼ ‖yᵢ - yⱼ‖²` for row-wise embeddings (n×p).
pub fn double_sum_rows(w: &WeightedGraph, y: &Array2<f64>) -> f64 {
    let n = w.n();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut d2 = 0.0;
            for k in 0..y.ncols() {
                let d = y[[i, k]] - y[[j, k]];
                d2 += d * d;
            }
            s += w.weights()[[i, j]] * d2;
        }
    }
    s
}

/// Exhaustive minimum ratio cut over every bipartition (n ≤ 20).
/// Returns the minimum value and one achieving subset.
pub fn brute_force_min_ratio_cut(w: &WeightedGraph) -> (f64, Vec<usize>) {
    let n = w.n();
    assert!((2..=20).contains(&n));
    let mut best = f64::INFINITY;
    let mut best_subset = Vec::new();
    // vertex n-1 stays on the complement side so each partition appears once
    for mask in 1u32..(1 << (n - 1)) {
        let subset: Vec<usize> = (0..n - 1).filter(|&i| mask & (1 << i) != 0).collect();
        let value = crate::cluster::ratio_cut(w, &subset).unwrap();
        if value < best {
            best = value;
            best_subset = subset;
        }
    }
    (best, best_subset)
}

/// Gram–Schmidt orthonormalization of the columns of `a`.
pub fn orthonormalize(a: &Array2<f64>) -> Array2<f64> {
    let (n, p) = a.dim();
    let mut q = a.clone();
    for j in 0..p {
        for prev in 0..j {
            let mut dot = 0.0;
            for i in 0..n {
                dot += q[[i, prev]] * q[[i, j]];
            }
            for i in 0..n {
                let qp = q[[i, prev]];
                q[[i, j]] -= dot * qp;
            }
        }
        let norm = (0..n).map(|i| q[[i, j]] * q[[i, j]]).sum::<f64>().sqrt();
        assert!(norm > 1e-12, "rank-deficient basis in orthonormalize");
        for i in 0..n {
            q[[i, j]] /= norm;
        }
    }
    q
}

/// Sine of the largest principal angle between the column spaces of `a` and
/// `b` (must have equal column counts).
pub fn max_principal_angle_sin(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    assert_eq!(a.ncols(), b.ncols());
    let qa = orthonormalize(a);
    let qb = orthonormalize(b);
    // residual of qa after projecting onto span(qb): R = qa - qb (qbᵀ qa)
    let proj = qb.t().dot(&qa);
    let r = &qa - &qb.dot(&proj);
    let gram = r.t().dot(&r);
    let basis = eig_sym(&gram, SortOrder::Descending).unwrap();
    basis.eigenvalues()[0].max(0.0).sqrt()
}

/// Deterministic RNG for fixtures.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
