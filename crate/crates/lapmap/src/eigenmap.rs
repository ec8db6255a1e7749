//! Laplacian eigenmap: nonlinear embedding from the graph Laplacian, plus
//! the eigenfunction (Nyström) extension for embedding unseen points.
//!
//! Training solves `min tr(YᵀLY)` under `YᵀY = I` (plain) or `YᵀDY = I`
//! (degree-constrained). Out-of-sample embedding always goes through the
//! spectrum of the symmetric-normalized kernel `W(i,j)/√(dᵢdⱼ)`, whose
//! eigenpairs `(δ_k, v_k)` are equivalent to the degree-constrained solution
//! via `λ = 1 - δ` and a `D^{1/2}` change of basis; the model stores that
//! spectrum next to whichever training embedding was requested, and the
//! transform output lives in this Nyström space.
//!
//! Unseen points need a dense similarity against the whole training set: the
//! test kernel is never sparsified to the training neighborhoods (they are
//! unknown for a new point, and the normalization needs full rows). For the
//! same reason a model trained on *binary* weights falls back to the RBF
//! kernel with the stored σ² when embedding test points — binary similarity
//! against a point outside the training graph is ill-defined.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::graph::{
    cross_sq_dists, DataMatrix, NeighborhoodSpec, WeightKind, WeightedGraph, DEFAULT_SIGMA_SQ,
};
use crate::laplacian;
use crate::linalg::{self, EigenBasis, SortOrder};

/// Which constraint produced the training embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum LeApproach {
    /// `YᵀY = I`.
    Plain,
    /// `YᵀDY = I`.
    DegreeConstrained,
}

/// Kernel settings remembered for out-of-sample evaluation.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KernelParams {
    pub weight_kind: WeightKind,
    /// Bandwidth used for test kernels; equals the training σ² for RBF
    /// graphs and the default σ² for binary graphs.
    pub sigma_sq: f64,
    pub spec: NeighborhoodSpec,
}

/// Everything needed to reproduce a Laplacian-eigenmap embedding and extend
/// it to unseen points.
#[derive(Debug, Clone)]
pub struct EmbeddingModel {
    training_points: DataMatrix,
    embedding: Array2<f64>,
    basis: EigenBasis,
    kernel_eigenvalues: Vec<f64>,
    kernel_eigenvectors: Array2<f64>,
    train_degrees: Array1<f64>,
    approach: LeApproach,
    kernel_params: KernelParams,
}

impl EmbeddingModel {
    /// n×p training embedding, one row per training point.
    pub fn embedding(&self) -> &Array2<f64> {
        &self.embedding
    }

    pub fn training_points(&self) -> &DataMatrix {
        &self.training_points
    }

    /// Eigenbasis of the training problem after the trivial pair was dropped.
    pub fn basis(&self) -> &EigenBasis {
        &self.basis
    }

    /// δ_k: leading nontrivial eigenvalues of the symmetric-normalized
    /// kernel, descending.
    pub fn kernel_eigenvalues(&self) -> &[f64] {
        &self.kernel_eigenvalues
    }

    /// v_k: unit eigenvectors matching [`kernel_eigenvalues`](Self::kernel_eigenvalues), n×p.
    pub fn kernel_eigenvectors(&self) -> &Array2<f64> {
        &self.kernel_eigenvectors
    }

    pub fn train_degrees(&self) -> &Array1<f64> {
        &self.train_degrees
    }

    pub fn approach(&self) -> LeApproach {
        self.approach
    }

    pub fn kernel_params(&self) -> &KernelParams {
        &self.kernel_params
    }

    pub fn sample_count(&self) -> usize {
        self.embedding.nrows()
    }

    pub fn dims(&self) -> usize {
        self.embedding.ncols()
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        training_points: DataMatrix,
        embedding: Array2<f64>,
        basis: EigenBasis,
        kernel_eigenvalues: Vec<f64>,
        kernel_eigenvectors: Array2<f64>,
        train_degrees: Array1<f64>,
        approach: LeApproach,
        kernel_params: KernelParams,
    ) -> Self {
        EmbeddingModel {
            training_points,
            embedding,
            basis,
            kernel_eigenvalues,
            kernel_eigenvectors,
            train_degrees,
            approach,
            kernel_params,
        }
    }
}

/// Fits a Laplacian eigenmap on a connected graph.
///
/// The embedding rows are the p smallest-nonzero eigenvectors of `L`
/// (plain) or of the pencil `(L, D)` (degree-constrained). The spectrum of
/// the symmetric-normalized kernel is computed alongside and stored for
/// out-of-sample use regardless of the chosen approach.
pub fn fit(
    w: &WeightedGraph,
    x: &DataMatrix,
    p: usize,
    approach: LeApproach,
) -> Result<EmbeddingModel> {
    let n = w.n();
    if x.sample_count() != n {
        return Err(Error::DimensionMismatch {
            what: "training samples vs graph vertices",
            expected: n,
            got: x.sample_count(),
        });
    }
    if p == 0 || p > n.saturating_sub(1) {
        return Err(Error::TooManyDimensions {
            requested: p,
            available: n.saturating_sub(1),
        });
    }

    let l = laplacian::unnormalized(w)?;
    let full = match approach {
        LeApproach::Plain => linalg::eig_sym(l.matrix(), SortOrder::Ascending)?,
        LeApproach::DegreeConstrained => {
            let d = l.degree_matrix();
            linalg::eig_gen_sym(l.matrix(), &d, SortOrder::Ascending)?
        }
    };
    let near_zero = linalg::count_near_zero(full.eigenvalues(), linalg::DEFAULT_ZERO_TOL);
    if near_zero > 1 {
        return Err(Error::DisconnectedGraph(near_zero));
    }
    let basis = linalg::drop_trivial(&full, 1, linalg::DEFAULT_ZERO_TOL)?.truncated(p)?;
    let embedding = basis.eigenvectors().clone();

    // kernel spectrum for the Nyström extension: descending, trivial δ≈1
    // pair (the D^{1/2}·1 direction) removed
    let kernel = laplacian::symmetric_normalized_kernel(w)?;
    let kernel_full = linalg::eig_sym(kernel.matrix(), SortOrder::Descending)?;
    let kernel_basis = kernel_full.truncated(p + 1)?;
    let kernel_eigenvalues = kernel_basis.eigenvalues()[1..].to_vec();
    let kernel_eigenvectors = kernel_basis
        .eigenvectors()
        .slice(ndarray::s![.., 1..])
        .to_owned();

    let sigma_sq = match w.weight_kind() {
        WeightKind::Rbf { sigma_sq } => sigma_sq,
        WeightKind::Binary => DEFAULT_SIGMA_SQ,
    };

    Ok(EmbeddingModel {
        training_points: x.clone(),
        embedding,
        basis,
        kernel_eigenvalues,
        kernel_eigenvectors,
        train_degrees: l.degrees().clone(),
        approach,
        kernel_params: KernelParams {
            weight_kind: w.weight_kind(),
            sigma_sq,
            spec: w.spec(),
        },
    })
}

/// Normalized train–test kernel, n×n_t.
///
/// Entry (i, j) is `(1/n) k_t(xᵢ, x_j) / √(Ê[K_t(xᵢ,·)] · Ê[K_t(·,x_j)])`
/// where the first expectation is the mean of row i over test points and the
/// second the mean of column j over training points. The raw kernel `k_t` is
/// the dense RBF with the model's σ², evaluated on every train–test pair.
pub fn oos_kernel(model: &EmbeddingModel, test: &DataMatrix) -> Result<Array2<f64>> {
    let raw = raw_test_kernel(model, test)?;
    let n = raw.nrows();
    let nt = raw.ncols();

    // Ê[K_t(xᵢ, ·)]: column mean over test points, one per training point
    let mut train_expect = vec![0.0f64; n];
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..nt {
            s += raw[[i, j]];
        }
        train_expect[i] = s / nt as f64;
    }
    // Ê[K_t(·, x)]: row mean over training points, one per test point
    let mut test_expect = vec![0.0f64; nt];
    for j in 0..nt {
        let mut s = 0.0;
        for i in 0..n {
            s += raw[[i, j]];
        }
        test_expect[j] = s / n as f64;
        if test_expect[j] <= 0.0 {
            return Err(Error::ZeroExpectation(j));
        }
    }

    let mut normalized = Array2::<f64>::zeros((n, nt));
    for i in 0..n {
        if train_expect[i] <= 0.0 {
            // the whole row is zero similarity; leave the entries at zero
            continue;
        }
        for j in 0..nt {
            normalized[[i, j]] =
                raw[[i, j]] / (n as f64 * (train_expect[i] * test_expect[j]).sqrt());
        }
    }
    Ok(normalized)
}

/// Embeds test points through the stored kernel eigenfunctions:
/// `y_k(x) = (1/√δ_k) Σᵢ v_{ki} k̆_t(xᵢ, x)`. Returns n_t×p rows.
pub fn transform(model: &EmbeddingModel, test: &DataMatrix) -> Result<Array2<f64>> {
    for (k, &delta) in model.kernel_eigenvalues.iter().enumerate() {
        if delta <= 1e-12 {
            return Err(Error::NearZeroEigenvalue {
                index: k,
                value: delta,
            });
        }
    }
    let normalized = oos_kernel(model, test)?;
    let n = normalized.nrows();
    let nt = normalized.ncols();
    let p = model.kernel_eigenvalues.len();
    let mut out = Array2::<f64>::zeros((nt, p));
    for k in 0..p {
        let scale = 1.0 / model.kernel_eigenvalues[k].sqrt();
        for j in 0..nt {
            let mut s = 0.0;
            for i in 0..n {
                s += model.kernel_eigenvectors[[i, k]] * normalized[[i, j]];
            }
            out[[j, k]] = scale * s;
        }
    }
    Ok(out)
}

fn raw_test_kernel(model: &EmbeddingModel, test: &DataMatrix) -> Result<Array2<f64>> {
    let dists = cross_sq_dists(&model.training_points, test)?;
    let sigma_sq = model.kernel_params.sigma_sq;
    Ok(dists.mapv(|d2| (-d2 / (2.0 * sigma_sq)).exp()))
}
