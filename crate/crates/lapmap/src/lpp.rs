//! Locality preserving projection: the linear (and kernelized) approximation
//! of the Laplacian eigenmap.
//!
//! Plain LPP solves the pencil `(X L Xᵀ, X D Xᵀ)` for projection directions;
//! kernel LPP solves `(K L K, K D K)` for coefficient vectors with embedding
//! `ΘᵀK`. The right-hand matrices are singular whenever d ≥ n (or K is
//! rank-deficient), so the ridge policy of [`crate::linalg`] applies and the
//! ridge actually used is recorded on the model.
//!
//! Data enters exactly as given — LPP as formulated is not translation
//! invariant and no centering is applied here; callers that want centered
//! inputs must center beforehand.
//!
//! Near-zero eigenvalues of these pencils do not automatically carry the
//! constant-eigenvector meaning they have for `(L, D)`: a pair is discarded
//! only when its projected embedding is degenerate (sample variance below
//! 1e-12), otherwise it is kept.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::graph::{DataMatrix, WeightedGraph};
use crate::laplacian;
use crate::linalg::{self, EigenBasis, SortOrder};

/// Linear projection directions found by LPP.
#[derive(Debug, Clone)]
pub struct ProjectionModel {
    directions: Array2<f64>,
    generalized_eigenvalues: Vec<f64>,
    ridge_used: f64,
}

impl ProjectionModel {
    /// d×p matrix of projection directions (generalized-eigenvector columns).
    pub fn directions(&self) -> &Array2<f64> {
        &self.directions
    }

    pub fn generalized_eigenvalues(&self) -> &[f64] {
        &self.generalized_eigenvalues
    }

    /// Ridge added to `X D Xᵀ` before factorization, 0.0 when none.
    pub fn ridge_used(&self) -> f64 {
        self.ridge_used
    }

    pub fn feature_dim(&self) -> usize {
        self.directions.nrows()
    }

    pub fn dims(&self) -> usize {
        self.directions.ncols()
    }

    /// Projects samples: `Y = UᵀX`, p×n.
    pub fn embed(&self, x: &DataMatrix) -> Result<Array2<f64>> {
        if x.feature_dim() != self.feature_dim() {
            return Err(Error::DimensionMismatch {
                what: "feature dimension",
                expected: self.feature_dim(),
                got: x.feature_dim(),
            });
        }
        Ok(project(&self.directions, x))
    }

    pub(crate) fn from_parts(
        directions: Array2<f64>,
        generalized_eigenvalues: Vec<f64>,
        ridge_used: f64,
    ) -> Self {
        ProjectionModel {
            directions,
            generalized_eigenvalues,
            ridge_used,
        }
    }
}

/// Kernel-space projection coefficients found by kernel LPP.
#[derive(Debug, Clone)]
pub struct KernelProjectionModel {
    coefficients: Array2<f64>,
    training_kernel: Array2<f64>,
    generalized_eigenvalues: Vec<f64>,
    ridge_used: f64,
}

impl KernelProjectionModel {
    /// n×p coefficient matrix Θ.
    pub fn coefficients(&self) -> &Array2<f64> {
        &self.coefficients
    }

    pub fn training_kernel(&self) -> &Array2<f64> {
        &self.training_kernel
    }

    pub fn generalized_eigenvalues(&self) -> &[f64] {
        &self.generalized_eigenvalues
    }

    pub fn ridge_used(&self) -> f64 {
        self.ridge_used
    }

    pub fn dims(&self) -> usize {
        self.coefficients.ncols()
    }

    pub(crate) fn from_parts(
        coefficients: Array2<f64>,
        training_kernel: Array2<f64>,
        generalized_eigenvalues: Vec<f64>,
        ridge_used: f64,
    ) -> Self {
        KernelProjectionModel {
            coefficients,
            training_kernel,
            generalized_eigenvalues,
            ridge_used,
        }
    }
}

/// `X̃ = UᵀX`: projection of samples onto the column space of U.
///
/// No orthonormality requirement — LPP directions are `XDXᵀ`-orthonormal,
/// not Euclidean-orthonormal, and only use this direction of the pair.
pub fn project(u: &Array2<f64>, x: &DataMatrix) -> Array2<f64> {
    u.t().dot(x.values())
}

/// `X̂ = UUᵀX`: reconstruction from the projection. Requires `UᵀU = I`.
pub fn reconstruct(u: &Array2<f64>, x: &DataMatrix) -> Result<Array2<f64>> {
    let gram = u.t().dot(u);
    let mut deviation = 0.0f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let expected = if i == j { 1.0 } else { 0.0 };
            deviation = deviation.max((gram[[i, j]] - expected).abs());
        }
    }
    if deviation > 1e-8 {
        return Err(Error::NonOrthonormal(deviation));
    }
    Ok(u.dot(&u.t().dot(x.values())))
}

/// Smallest nondegenerate directions of an ascending generalized basis.
///
/// Eigenpairs with `λ < 1e-8·λ_max` are kept only when their projected
/// embedding `dirᵀ·sample_map` has variance at least 1e-12; used by both LPP
/// paths and the graph-embedding framework so the two stay consistent.
pub(crate) fn select_smallest_nondegenerate(
    basis: &EigenBasis,
    p: usize,
    sample_map: &Array2<f64>,
) -> Result<(Array2<f64>, Vec<f64>)> {
    let m = basis.len();
    let dim = basis.dim();
    let lambda_max = basis.eigenvalues().last().copied().unwrap_or(0.0);
    let threshold = 1e-8 * lambda_max;
    let n_samples = sample_map.ncols();

    let mut kept = Vec::with_capacity(p);
    for idx in 0..m {
        if kept.len() == p {
            break;
        }
        let lambda = basis.eigenvalues()[idx];
        if lambda < threshold {
            // candidate trivial pair: degenerate iff its embedding is flat
            let mut mean = 0.0;
            let mut row = vec![0.0; n_samples];
            for (j, r) in row.iter_mut().enumerate() {
                let mut s = 0.0;
                for i in 0..dim {
                    s += basis.eigenvectors()[[i, idx]] * sample_map[[i, j]];
                }
                *r = s;
                mean += s;
            }
            mean /= n_samples as f64;
            let variance =
                row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n_samples as f64;
            if variance < 1e-12 {
                continue;
            }
        }
        kept.push(idx);
    }
    if kept.len() < p {
        return Err(Error::TooManyDimensions {
            requested: p,
            available: kept.len(),
        });
    }

    let mut directions = Array2::<f64>::zeros((dim, p));
    let mut eigenvalues = Vec::with_capacity(p);
    for (out, &idx) in kept.iter().enumerate() {
        eigenvalues.push(basis.eigenvalues()[idx]);
        for i in 0..dim {
            directions[[i, out]] = basis.eigenvectors()[[i, idx]];
        }
    }
    Ok((directions, eigenvalues))
}

/// Fits LPP: the p smallest nondegenerate generalized eigenvectors of
/// `(X L Xᵀ, X D Xᵀ + ridge)`.
pub fn fit(x: &DataMatrix, w: &WeightedGraph, p: usize) -> Result<ProjectionModel> {
    let n = w.n();
    let d = x.feature_dim();
    if x.sample_count() != n {
        return Err(Error::DimensionMismatch {
            what: "samples vs graph vertices",
            expected: n,
            got: x.sample_count(),
        });
    }
    let available = d.min(n.saturating_sub(1));
    if p == 0 || p > available {
        return Err(Error::TooManyDimensions {
            requested: p,
            available,
        });
    }
    if laplacian::count_components_default(w) != 1 {
        return Err(Error::DisconnectedGraph(
            laplacian::count_components_default(w),
        ));
    }

    let l = laplacian::unnormalized(w)?;
    let xv = x.values();
    let a = xv.dot(l.matrix()).dot(&xv.t());
    let b = scaled_gram(xv, l.degrees());
    let (basis, ridge_used) =
        linalg::eig_gen_sym_ridged(&a, &b, SortOrder::Ascending, linalg::DEFAULT_RIDGE_EPS)?;
    let (directions, generalized_eigenvalues) = select_smallest_nondegenerate(&basis, p, xv)?;
    Ok(ProjectionModel {
        directions,
        generalized_eigenvalues,
        ridge_used,
    })
}

/// Fits kernel LPP: the p smallest nondegenerate generalized eigenvectors of
/// `(K L K, K D K + ridge)` for a symmetric PSD training kernel.
pub fn fit_kernel(
    kernel: &Array2<f64>,
    w: &WeightedGraph,
    p: usize,
) -> Result<KernelProjectionModel> {
    let n = w.n();
    if kernel.nrows() != n || kernel.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "kernel size vs graph vertices",
            expected: n,
            got: kernel.nrows(),
        });
    }
    validate_psd(kernel)?;
    let available = n.saturating_sub(1);
    if p == 0 || p > available {
        return Err(Error::TooManyDimensions {
            requested: p,
            available,
        });
    }
    if laplacian::count_components_default(w) != 1 {
        return Err(Error::DisconnectedGraph(
            laplacian::count_components_default(w),
        ));
    }

    let l = laplacian::unnormalized(w)?;
    let a = kernel.dot(l.matrix()).dot(kernel);
    let b = scaled_gram(kernel, l.degrees());
    let (basis, ridge_used) =
        linalg::eig_gen_sym_ridged(&a, &b, SortOrder::Ascending, linalg::DEFAULT_RIDGE_EPS)?;
    let (coefficients, generalized_eigenvalues) =
        select_smallest_nondegenerate(&basis, p, kernel)?;
    Ok(KernelProjectionModel {
        coefficients,
        training_kernel: kernel.clone(),
        generalized_eigenvalues,
        ridge_used,
    })
}

/// Embedded training data of a kernel model: `Y = ΘᵀK`, p×n.
pub fn embed_kernel(model: &KernelProjectionModel) -> Array2<f64> {
    model.coefficients.t().dot(&model.training_kernel)
}

/// `M diag(d) Mᵀ` without materializing the diagonal matrix.
fn scaled_gram(m: &Array2<f64>, diag: &Array1<f64>) -> Array2<f64> {
    let mut scaled = m.clone();
    for (j, mut col) in scaled.columns_mut().into_iter().enumerate() {
        for v in col.iter_mut() {
            *v *= diag[j];
        }
    }
    scaled.dot(&m.t())
}

fn validate_psd(kernel: &Array2<f64>) -> Result<()> {
    let mut max_abs = 0.0f64;
    for &v in kernel.iter() {
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
        max_abs = max_abs.max(v.abs());
    }
    let tol = 1e-8 * max_abs.max(1.0);
    for i in 0..kernel.nrows() {
        for j in (i + 1)..kernel.ncols() {
            if (kernel[[i, j]] - kernel[[j, i]]).abs() > tol {
                return Err(Error::NotPSD(f64::NAN));
            }
        }
    }
    let basis = linalg::eig_sym(kernel, SortOrder::Ascending)?;
    let min = basis.eigenvalues()[0];
    let max = basis.eigenvalues().last().copied().unwrap_or(0.0);
    if min < -1e-8 * max.abs().max(1.0) {
        return Err(Error::NotPSD(min));
    }
    Ok(())
}
