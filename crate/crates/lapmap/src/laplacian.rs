//! Degree vectors, Laplacian variants, and component counting via the zero
//! spectrum.
//!
//! Two families live here. `L = D - W` is the difference-type Laplacian:
//! positive semi-definite, zero row sums, paired with *minimization*. The
//! α-normalized family `D^{-α} W D^{-α}` (the symmetric-normalized kernel is
//! its α = 1/2 member) keeps W un-negated, acts as a similarity operator, and
//! must be paired with *maximization* instead. The pairing is part of the
//! variant, not a caller decision.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::graph::{row_sums, WeightedGraph};
use crate::linalg::{self, SortOrder};

/// Extremum a Laplacian variant must be paired with in optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

impl Direction {
    /// Sort order that puts the wanted eigenpairs first.
    pub fn sort_order(self) -> SortOrder {
        match self {
            Direction::Minimize => SortOrder::Ascending,
            Direction::Maximize => SortOrder::Descending,
        }
    }
}

/// Which Laplacian was built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LaplacianVariant {
    /// `L = D - W`.
    Unnormalized,
    /// `D^{-α} W D^{-α}`, a similarity-type operator.
    AlphaNormalized(f64),
    /// `W(i,j) / √(dᵢ dⱼ)`, identical to α = 1/2.
    SymmetricNormalizedKernel,
}

impl LaplacianVariant {
    /// Difference-type Laplacians are minimized, similarity-type maximized.
    pub fn direction(self) -> Direction {
        match self {
            LaplacianVariant::Unnormalized => Direction::Minimize,
            LaplacianVariant::AlphaNormalized(_) | LaplacianVariant::SymmetricNormalizedKernel => {
                Direction::Maximize
            }
        }
    }
}

/// A variant-tagged Laplacian together with the degree vector of the graph
/// it came from.
#[derive(Debug, Clone)]
pub struct LaplacianMatrix {
    matrix: Array2<f64>,
    variant: LaplacianVariant,
    degrees: Array1<f64>,
}

impl LaplacianMatrix {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn variant(&self) -> LaplacianVariant {
        self.variant
    }

    pub fn degrees(&self) -> &Array1<f64> {
        &self.degrees
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// Degree vector as a diagonal matrix.
    pub fn degree_matrix(&self) -> Array2<f64> {
        linalg::diag_matrix(&self.degrees)
    }
}

/// Row sums of the adjacency matrix. Errors on isolated vertices, which
/// would put a zero in the denominators of every normalized variant.
pub fn degree_vector(w: &WeightedGraph) -> Result<Array1<f64>> {
    let d = row_sums(w.weights());
    for (i, &di) in d.iter().enumerate() {
        if di <= 0.0 {
            return Err(Error::IsolatedVertex(i));
        }
    }
    Ok(d)
}

/// `L = D - W`: zero row sums, positive semi-definite.
pub fn unnormalized(w: &WeightedGraph) -> Result<LaplacianMatrix> {
    let degrees = degree_vector(w)?;
    let n = w.n();
    let mut l = -w.weights().clone();
    for i in 0..n {
        l[[i, i]] = degrees[i];
    }
    Ok(LaplacianMatrix {
        matrix: l,
        variant: LaplacianVariant::Unnormalized,
        degrees,
    })
}

/// `L(i,j) = wᵢⱼ dᵢ^{-α} dⱼ^{-α}` for α ≥ 0; α = 0 returns W itself.
pub fn alpha_normalized(w: &WeightedGraph, alpha: f64) -> Result<LaplacianMatrix> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be >= 0, got {alpha}"
        )));
    }
    let degrees = degree_vector(w)?;
    let n = w.n();
    let scale: Vec<f64> = degrees.iter().map(|&d| d.powf(-alpha)).collect();
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            l[[i, j]] = w.weights()[[i, j]] * scale[i] * scale[j];
        }
    }
    Ok(LaplacianMatrix {
        matrix: l,
        variant: LaplacianVariant::AlphaNormalized(alpha),
        degrees,
    })
}

/// The entrywise `W(i,j)/√(dᵢ dⱼ)` kernel; shares the α = 1/2 code path so
/// the two are equal to the last bit.
pub fn symmetric_normalized_kernel(w: &WeightedGraph) -> Result<LaplacianMatrix> {
    let half = alpha_normalized(w, 0.5)?;
    Ok(LaplacianMatrix {
        matrix: half.matrix,
        variant: LaplacianVariant::SymmetricNormalizedKernel,
        degrees: half.degrees,
    })
}

/// Number of connected components, counted as near-zero eigenvalues of the
/// unnormalized Laplacian.
///
/// Isolated vertices are split off by a pre-scan (each is its own component)
/// so the spectral count runs on a graph with positive degrees. `tol` is
/// relative: an eigenvalue is zero when `|λ| < tol · max(1, λ_max)`.
pub fn count_components(w: &WeightedGraph, tol: f64) -> usize {
    let n = w.n();
    let degrees = row_sums(w.weights());
    let active: Vec<usize> = (0..n).filter(|&i| degrees[i] > 0.0).collect();
    let isolated = n - active.len();
    if active.is_empty() {
        return isolated;
    }

    let m = active.len();
    let mut l = Array2::<f64>::zeros((m, m));
    for (a, &i) in active.iter().enumerate() {
        let mut deg = 0.0;
        for (b, &j) in active.iter().enumerate() {
            if a != b {
                l[[a, b]] = -w.weights()[[i, j]];
            }
            deg += w.weights()[[i, j]];
        }
        l[[a, a]] = deg;
    }
    let basis = linalg::eig_sym(&l, SortOrder::Ascending)
        .expect("Laplacian of a validated graph is symmetric and finite");
    isolated + linalg::count_near_zero(basis.eigenvalues(), tol)
}

/// [`count_components`] with the default zero tolerance.
pub fn count_components_default(w: &WeightedGraph) -> usize {
    count_components(w, linalg::DEFAULT_ZERO_TOL)
}
