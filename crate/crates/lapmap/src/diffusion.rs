//! Diffusion maps: random walks on the data graph, time-scaled spectral
//! embeddings, and diffusion distances.
//!
//! The transition operator is `M = (D^{(α)})⁻¹ L^{(α)}` where
//! `L^{(α)} = D^{-α} W D^{-α}` and `D^{(α)}` is its degree matrix. M is
//! row-stochastic but not symmetric; its spectrum is computed exclusively
//! through the symmetric conjugation
//! `S = (D^{(α)})^{-1/2} L^{(α)} (D^{(α)})^{-1/2}`, which guarantees real
//! eigenvalues and right eigenvectors that are orthonormal in the stationary
//! measure π. Under that convention the leading eigenvector is the constant
//! one-vector (λ₁ = 1), π is the left fixed point, and the two diffusion
//! distance forms below agree exactly.
//!
//! The probability-form distance weights each coordinate by `1/π(ℓ)`. With
//! π-orthonormal eigenvectors the constant leading eigenvector has entries 1
//! rather than forming a distribution, so the stationary distribution π is
//! the denominator under which the equivalence theorem holds; the spectral
//! form `√(Σ λ^{2t} (ψ(i)-ψ(j))²)` is its exact counterpart.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::graph::{row_sums, WeightedGraph};
use crate::laplacian;
use crate::linalg::{self, SortOrder};

/// Default anisotropic normalization exponent.
pub const DEFAULT_ALPHA: f64 = 0.5;

/// Which diffusion-distance formula to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceForm {
    /// `√(Σ_ℓ (P(ℓ,t|i) - P(ℓ,t|j))² / π(ℓ))` from rows of `M^t`.
    Probability,
    /// `√(Σ_ℓ λ_ℓ^{2t} (ψ_ℓ(i) - ψ_ℓ(j))²)` over the full spectrum.
    Spectral,
}

/// Transition operator with its full spectrum and stationary distribution.
#[derive(Debug, Clone)]
pub struct DiffusionModel {
    transition: Array2<f64>,
    alpha: f64,
    eigenvalues: Vec<f64>,
    right_eigenvectors: Array2<f64>,
    stationary: Array1<f64>,
    drop_stationary: bool,
}

impl DiffusionModel {
    /// Row-stochastic transition matrix M.
    pub fn transition(&self) -> &Array2<f64> {
        &self.transition
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Eigenvalues of M, descending, λ₁ = 1.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Right eigenvectors ψ (columns), π-orthonormal; the first column is
    /// the constant one-vector.
    pub fn right_eigenvectors(&self) -> &Array2<f64> {
        &self.right_eigenvectors
    }

    /// Stationary distribution π (positive, sums to one).
    pub fn stationary(&self) -> &Array1<f64> {
        &self.stationary
    }

    /// Whether [`embed`](Self::embed) skips the constant stationary
    /// coordinate (the default).
    pub fn drop_stationary(&self) -> bool {
        self.drop_stationary
    }

    /// Returns the model with the paper-literal behavior of keeping the
    /// constant ψ₁ coordinate in embeddings.
    pub fn with_drop_stationary(mut self, drop: bool) -> Self {
        self.drop_stationary = drop;
        self
    }

    pub fn n(&self) -> usize {
        self.transition.nrows()
    }

    /// `M^t` by repeated squaring; `M⁰` is the identity.
    pub fn transition_probabilities(&self, t: u64) -> Array2<f64> {
        let n = self.n();
        let mut result = Array2::<f64>::eye(n);
        let mut base = self.transition.clone();
        let mut exp = t;
        while exp > 0 {
            if exp & 1 == 1 {
                result = result.dot(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.dot(&base);
            }
        }
        result
    }

    /// Time-t diffusion embedding: coordinate k of point i is
    /// `λ_k^t ψ_k(i)` over the leading eigenpairs, the stationary constant
    /// coordinate excluded unless configured otherwise.
    pub fn embed(&self, t: u64, p: usize) -> Result<Array2<f64>> {
        let n = self.n();
        let available = if self.drop_stationary { n - 1 } else { n };
        if p == 0 || p > available {
            return Err(Error::TooManyDimensions {
                requested: p,
                available,
            });
        }
        let offset = usize::from(self.drop_stationary);
        let mut out = Array2::<f64>::zeros((n, p));
        for k in 0..p {
            let scale = powi_u(self.eigenvalues[offset + k], t);
            for i in 0..n {
                out[[i, k]] = scale * self.right_eigenvectors[[i, offset + k]];
            }
        }
        Ok(out)
    }

    /// Diffusion distance between points i and j at time t.
    pub fn distance(&self, i: usize, j: usize, t: u64, form: DistanceForm) -> Result<f64> {
        let n = self.n();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, bound: n });
        }
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, bound: n });
        }
        match form {
            DistanceForm::Probability => {
                let mt = self.transition_probabilities(t);
                let mut sum = 0.0;
                for l in 0..n {
                    let diff = mt[[i, l]] - mt[[j, l]];
                    sum += diff * diff / self.stationary[l];
                }
                Ok(sum.sqrt())
            }
            DistanceForm::Spectral => {
                let mut sum = 0.0;
                for l in 0..n {
                    let diff = self.right_eigenvectors[[i, l]] - self.right_eigenvectors[[j, l]];
                    let scale = powi_u(self.eigenvalues[l], t);
                    sum += scale * scale * diff * diff;
                }
                Ok(sum.sqrt())
            }
        }
    }
}

/// Builds the diffusion operator of a connected graph for exponent α ≥ 0,
/// computing the spectrum via the symmetric conjugation.
pub fn diffusion_operator(w: &WeightedGraph, alpha: f64) -> Result<DiffusionModel> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be >= 0, got {alpha}"
        )));
    }
    let n = w.n();
    // degree check (IsolatedVertex) happens inside the Laplacian build
    let l_alpha = laplacian::alpha_normalized(w, alpha)?;
    if laplacian::count_components_default(w) != 1 {
        return Err(Error::DisconnectedGraph(
            laplacian::count_components_default(w),
        ));
    }

    let alpha_degrees = row_sums(l_alpha.matrix());
    for (i, &d) in alpha_degrees.iter().enumerate() {
        if d <= 0.0 {
            return Err(Error::IsolatedVertex(i));
        }
    }
    let total: f64 = alpha_degrees.sum();
    let stationary = alpha_degrees.mapv(|d| d / total);

    // M = (D^{(α)})⁻¹ L^{(α)}: divide each row by its degree
    let mut transition = l_alpha.matrix().clone();
    for (i, mut row) in transition.rows_mut().into_iter().enumerate() {
        for v in row.iter_mut() {
            *v /= alpha_degrees[i];
        }
    }

    // S = (D^{(α)})^{-1/2} L^{(α)} (D^{(α)})^{-1/2}, then ψ = √T · D^{-1/2} u
    // giving Σ π ψ_a ψ_b = δ_ab and ψ₁ = 1
    let inv_sqrt = alpha_degrees.mapv(|d| 1.0 / d.sqrt());
    let mut s = l_alpha.matrix().clone();
    for i in 0..n {
        for j in 0..n {
            s[[i, j]] *= inv_sqrt[i] * inv_sqrt[j];
        }
    }
    let basis = linalg::eig_sym(&s, SortOrder::Descending)?;
    let sqrt_total = total.sqrt();
    let mut right = Array2::<f64>::zeros((n, n));
    for k in 0..n {
        for i in 0..n {
            right[[i, k]] = sqrt_total * inv_sqrt[i] * basis.eigenvectors()[[i, k]];
        }
    }

    Ok(DiffusionModel {
        transition,
        alpha,
        eigenvalues: basis.eigenvalues().to_vec(),
        right_eigenvectors: right,
        stationary,
        drop_stationary: true,
    })
}

/// [`diffusion_operator`] with the default α = 0.5.
pub fn diffusion_operator_default(w: &WeightedGraph) -> Result<DiffusionModel> {
    diffusion_operator(w, DEFAULT_ALPHA)
}

fn powi_u(base: f64, exp: u64) -> f64 {
    // deterministic integer power by squaring, exact for exp = 0 and 1
    let mut result = 1.0;
    let mut b = base;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= b;
        }
        e >>= 1;
        if e > 0 {
            b *= b;
        }
    }
    result
}
