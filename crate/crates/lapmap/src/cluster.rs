//! Spectral clustering: graph cuts, the relaxed ratio-cut eigenproblem, the
//! sign split for two clusters, and k-means for the multi-cluster pipeline.
//!
//! Exact combinatorial ratio-cut minimization is intractable; what is solved
//! here is the relaxation `min tr(FᵀLF)` under `FᵀF = I` (plain) or
//! `FᵀDF = I` (degree-constrained), after which rows of F are clustered. The
//! exhaustive minimizer exists only as a test oracle on tiny graphs.

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::laplacian::{self, LaplacianMatrix};
use crate::linalg::{self, SortOrder};

/// Hard cluster labels in `[0, c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    c: usize,
}

impl ClusterAssignment {
    pub fn new(labels: Vec<usize>, c: usize) -> Result<Self> {
        if c == 0 {
            return Err(Error::InvalidParameter("cluster count must be positive".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= c) {
            return Err(Error::IndexOutOfRange { index: bad, bound: c });
        }
        Ok(ClusterAssignment { labels, c })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn cluster_count(&self) -> usize {
        self.c
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Constraint flavor of the spectral embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingVariant {
    /// `FᵀF = I`.
    Plain,
    /// `FᵀDF = I`.
    DegreeConstrained,
}

/// Rows are the spectrally embedded points.
#[derive(Debug, Clone)]
pub struct SpectralEmbedding {
    coordinates: Array2<f64>,
    variant: EmbeddingVariant,
    eigenvalues: Vec<f64>,
}

impl SpectralEmbedding {
    /// n×c matrix; row i is the embedded point i.
    pub fn coordinates(&self) -> &Array2<f64> {
        &self.coordinates
    }

    pub fn variant(&self) -> EmbeddingVariant {
        self.variant
    }

    /// Retained (nonzero) eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }
}

/// Which rule turns a two-cluster embedding into labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoClusterRule {
    /// Sign of the Fiedler vector; the faithful two-cluster path.
    SignSplit,
    /// k-means on the embedding rows, as in the multi-cluster pipeline.
    KMeans,
}

fn validated_subset(w: &WeightedGraph, subset: &[usize]) -> Result<Vec<bool>> {
    let n = w.n();
    let mut in_a = vec![false; n];
    for &i in subset {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, bound: n });
        }
        in_a[i] = true;
    }
    let size = in_a.iter().filter(|&&b| b).count();
    if size == 0 || size == n {
        return Err(Error::EmptySide);
    }
    Ok(in_a)
}

/// Total weight crossing from `subset` to its complement.
pub fn cut(w: &WeightedGraph, subset: &[usize]) -> Result<f64> {
    let in_a = validated_subset(w, subset)?;
    let n = w.n();
    let mut total = 0.0;
    for i in 0..n {
        if !in_a[i] {
            continue;
        }
        for j in 0..n {
            if !in_a[j] {
                total += w.weights()[[i, j]];
            }
        }
    }
    Ok(total)
}

/// `cut/|A| + cut/|A'|`: the cut normalized by both cluster cardinalities,
/// penalizing outlier singletons.
pub fn ratio_cut(w: &WeightedGraph, subset: &[usize]) -> Result<f64> {
    let in_a = validated_subset(w, subset)?;
    let size_a = in_a.iter().filter(|&&b| b).count();
    let size_b = w.n() - size_a;
    let cut_value = cut(w, subset)?;
    Ok(cut_value / size_a as f64 + cut_value / size_b as f64)
}

fn laplacian_and_basis(
    w: &WeightedGraph,
    variant: EmbeddingVariant,
) -> Result<(LaplacianMatrix, linalg::EigenBasis)> {
    let l = laplacian::unnormalized(w)?;
    let basis = match variant {
        EmbeddingVariant::Plain => linalg::eig_sym(l.matrix(), SortOrder::Ascending)?,
        EmbeddingVariant::DegreeConstrained => {
            let d = l.degree_matrix();
            linalg::eig_gen_sym(l.matrix(), &d, SortOrder::Ascending)?
        }
    };
    Ok((l, basis))
}

/// The c smallest nonzero eigenvectors of `L` (plain) or of the pencil
/// `(L, D)` (degree-constrained), rows giving the embedded points.
///
/// Rejects disconnected graphs: their zero eigenspace is multi-dimensional
/// and "drop the first eigenvector" is ill-posed.
pub fn spectral_embed(
    w: &WeightedGraph,
    c: usize,
    variant: EmbeddingVariant,
) -> Result<SpectralEmbedding> {
    let n = w.n();
    if c == 0 || c > n.saturating_sub(1) {
        return Err(Error::TooManyClusters {
            requested: c,
            samples: n,
        });
    }
    let (_, basis) = laplacian_and_basis(w, variant)?;
    let near_zero = linalg::count_near_zero(basis.eigenvalues(), linalg::DEFAULT_ZERO_TOL);
    if near_zero > 1 {
        return Err(Error::DisconnectedGraph(near_zero));
    }
    let nontrivial = linalg::drop_trivial(&basis, 1, linalg::DEFAULT_ZERO_TOL)?;
    let truncated = nontrivial.truncated(c)?;
    Ok(SpectralEmbedding {
        coordinates: truncated.eigenvectors().clone(),
        variant,
        eigenvalues: truncated.eigenvalues().to_vec(),
    })
}

/// Splits by sign: label 0 where `fᵢ > 0`, label 1 where `fᵢ < 0`. Entries
/// within 1e-12 of zero go to the positive side (deterministic tie policy).
pub fn two_way_split(f: ArrayView1<'_, f64>) -> Result<ClusterAssignment> {
    let labels: Vec<usize> = f
        .iter()
        .map(|&v| if v > 0.0 || v.abs() < 1e-12 { 0 } else { 1 })
        .collect();
    let zeros = labels.iter().filter(|&&l| l == 0).count();
    if zeros == 0 || zeros == labels.len() {
        return Err(Error::DegenerateVector);
    }
    ClusterAssignment::new(labels, 2)
}

/// Lloyd's iteration with k-means++ seeding, deterministic for a given seed.
///
/// Runs until the largest centroid movement drops below 1e-8 or 300
/// iterations. Empty clusters are repaired by moving in the point farthest
/// from its current centroid, so every returned cluster is nonempty.
pub fn kmeans(points: ArrayView2<'_, f64>, c: usize, seed: u64) -> Result<ClusterAssignment> {
    let n = points.nrows();
    let dim = points.ncols();
    if c == 0 || c > n {
        return Err(Error::TooManyClusters {
            requested: c,
            samples: n,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = Array2::<f64>::zeros((c, dim));
    let mut chosen = vec![false; n];

    // k-means++ seeding: first uniform, then proportional to squared distance
    // from the nearest centroid already picked.
    let first = rng.random_range(0..n);
    chosen[first] = true;
    for k in 0..dim {
        centroids[[0, k]] = points[[first, k]];
    }
    let mut min_dist = vec![0.0f64; n];
    for next in 1..c {
        for i in 0..n {
            let mut best = f64::INFINITY;
            for ci in 0..next {
                let mut d2 = 0.0;
                for k in 0..dim {
                    let diff = points[[i, k]] - centroids[[ci, k]];
                    d2 += diff * diff;
                }
                best = best.min(d2);
            }
            min_dist[i] = best;
        }
        let total: f64 = min_dist.iter().sum();
        let pick = if total > 0.0 {
            let r: f64 = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut picked = None;
            for (i, &d) in min_dist.iter().enumerate() {
                acc += d;
                if r < acc {
                    picked = Some(i);
                    break;
                }
            }
            picked.unwrap_or_else(|| {
                // r landed on the accumulated boundary; take the last point
                // that still carries weight
                (0..n).rev().find(|&i| min_dist[i] > 0.0).unwrap_or(n - 1)
            })
        } else {
            // all points coincide with existing centroids
            (0..n).find(|&i| !chosen[i]).unwrap_or(0)
        };
        chosen[pick] = true;
        for k in 0..dim {
            centroids[[next, k]] = points[[pick, k]];
        }
    }

    let mut labels = vec![0usize; n];
    for _iter in 0..300 {
        // assignment step, ties to the lowest centroid index
        for i in 0..n {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for ci in 0..c {
                let mut d2 = 0.0;
                for k in 0..dim {
                    let diff = points[[i, k]] - centroids[[ci, k]];
                    d2 += diff * diff;
                }
                if d2 < best_d {
                    best_d = d2;
                    best = ci;
                }
            }
            labels[i] = best;
        }

        // repair empty clusters with the farthest point from its centroid
        let mut counts = vec![0usize; c];
        for &l in &labels {
            counts[l] += 1;
        }
        for empty in 0..c {
            if counts[empty] > 0 {
                continue;
            }
            let mut far_i = usize::MAX;
            let mut far_d = -1.0;
            for i in 0..n {
                if counts[labels[i]] <= 1 {
                    continue;
                }
                let mut d2 = 0.0;
                for k in 0..dim {
                    let diff = points[[i, k]] - centroids[[labels[i], k]];
                    d2 += diff * diff;
                }
                if d2 > far_d {
                    far_d = d2;
                    far_i = i;
                }
            }
            if far_i != usize::MAX {
                counts[labels[far_i]] -= 1;
                labels[far_i] = empty;
                counts[empty] += 1;
            }
        }

        // update step
        let mut new_centroids = Array2::<f64>::zeros((c, dim));
        let mut sizes = vec![0usize; c];
        for i in 0..n {
            sizes[labels[i]] += 1;
            for k in 0..dim {
                new_centroids[[labels[i], k]] += points[[i, k]];
            }
        }
        for ci in 0..c {
            if sizes[ci] > 0 {
                for k in 0..dim {
                    new_centroids[[ci, k]] /= sizes[ci] as f64;
                }
            } else {
                for k in 0..dim {
                    new_centroids[[ci, k]] = centroids[[ci, k]];
                }
            }
        }

        let mut movement = 0.0f64;
        for ci in 0..c {
            let mut d2 = 0.0;
            for k in 0..dim {
                let diff = new_centroids[[ci, k]] - centroids[[ci, k]];
                d2 += diff * diff;
            }
            movement = movement.max(d2.sqrt());
        }
        centroids = new_centroids;
        if movement < 1e-8 {
            break;
        }
    }

    ClusterAssignment::new(labels, c)
}

/// The full pipeline: spectral embedding followed by clustering in the
/// embedding space. For `c = 2` the default is the sign rule on the Fiedler
/// vector; see [`spectral_cluster_with`] to force k-means instead.
pub fn spectral_cluster(
    w: &WeightedGraph,
    c: usize,
    variant: EmbeddingVariant,
    seed: u64,
) -> Result<ClusterAssignment> {
    spectral_cluster_with(w, c, variant, seed, TwoClusterRule::SignSplit)
}

/// [`spectral_cluster`] with the two-cluster rule made explicit.
pub fn spectral_cluster_with(
    w: &WeightedGraph,
    c: usize,
    variant: EmbeddingVariant,
    seed: u64,
    rule: TwoClusterRule,
) -> Result<ClusterAssignment> {
    if c == 2 && rule == TwoClusterRule::SignSplit {
        let embedding = spectral_embed(w, 1, variant)?;
        two_way_split(embedding.coordinates().column(0))
    } else {
        let embedding = spectral_embed(w, c, variant)?;
        kmeans(embedding.coordinates().view(), c, seed)
    }
}

/// Fraction of matching labels under the best permutation of predicted
/// cluster ids (brute force; intended for small c).
pub fn matching_accuracy(predicted: &[usize], truth: &[usize], c: usize) -> f64 {
    assert_eq!(predicted.len(), truth.len());
    assert!(c <= 8, "permutation matching is exponential in c");
    let mut perm: Vec<usize> = (0..c).collect();
    let mut best = 0usize;
    permute_accuracy(&mut perm, 0, predicted, truth, &mut best);
    best as f64 / predicted.len().max(1) as f64
}

fn permute_accuracy(
    perm: &mut Vec<usize>,
    depth: usize,
    predicted: &[usize],
    truth: &[usize],
    best: &mut usize,
) {
    if depth == perm.len() {
        let matches = predicted
            .iter()
            .zip(truth)
            .filter(|&(&p, &t)| p < perm.len() && perm[p] == t)
            .count();
        *best = (*best).max(matches);
        return;
    }
    for i in depth..perm.len() {
        perm.swap(depth, i);
        permute_accuracy(perm, depth + 1, predicted, truth, best);
        perm.swap(depth, i);
    }
}
