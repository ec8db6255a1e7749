//! The generalized graph-embedding framework: one eigenproblem template,
//! `extremize tr(YᵀLY)` under a pluggable orthogonality constraint, in
//! direct, linearized, and kernelized form.
//!
//! Choosing the pair `(L, B)`, the form, and the extremum direction
//! reproduces ten classical methods:
//!
//! | Method | Form | L | constraint | direction |
//! |--------|------|---|------------|-----------|
//! | Laplacian eigenmap (plain) | direct | graph Laplacian | I | min |
//! | Laplacian eigenmap (degree) | direct | graph Laplacian | D | min |
//! | LPP | linearized | graph Laplacian | D | min |
//! | kernel LPP | kernelized | graph Laplacian | D | min |
//! | PCA | linearized | I | `UᵀU = I` | max |
//! | kernel PCA | kernelized | I | `ΘᵀKΘ = I` | max |
//! | FDA | linearized | I | `I - Σⱼ (1/nⱼ) eⱼeⱼᵀ` | max |
//! | kernel FDA | kernelized | same | max |
//! | MDS / Isomap | direct | `-½HDH` | I | max |
//! | LLE | direct | `(I-W)ᵀ(I-W)` | `(1/n)I` | min |
//!
//! The MDS kernel and the LLE matrix qualify as "Laplacians" through their
//! zero row sums. A trivial near-zero pair is dropped only on the minimize
//! side (LLE and the graph-Laplacian cases, where the null direction is the
//! constant embedding); the maximize cases keep every leading pair.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::{pairwise_sq_dists, DataMatrix, WeightedGraph};
pub use crate::laplacian::Direction;
use crate::laplacian::{self};
use crate::linalg::{self, SortOrder};
use crate::lpp::select_smallest_nondegenerate;

/// Which optimization variable the problem is written in.
#[derive(Debug, Clone)]
pub enum GeForm {
    /// Embedding coordinates directly: Y n×p.
    Direct,
    /// A projection matrix applied to data: U d×p with `Y = UᵀX`.
    Linearized(DataMatrix),
    /// Coefficients over kernel rows: Θ n×p with `Y = ΘᵀK`.
    Kernelized(Array2<f64>),
}

/// Right-hand side of the orthogonality constraint.
#[derive(Debug, Clone)]
pub enum Constraint {
    /// An explicit symmetric PSD matrix B: `YᵀBY = I`, `UᵀXBXᵀU = I`, or
    /// `ΘᵀKBKΘ = I` depending on the form.
    Matrix(Array2<f64>),
    /// The marker constraint: `YᵀY = I` (direct), `UᵀU = I` (linearized),
    /// `ΘᵀKΘ = I` (kernelized).
    Identity,
}

/// A fully specified graph-embedding eigenproblem.
#[derive(Debug, Clone)]
pub struct GeProblem {
    form: GeForm,
    l_matrix: Array2<f64>,
    constraint: Constraint,
    direction: Direction,
    p: usize,
    drop_trivial_pair: bool,
}

impl GeProblem {
    /// Validates shapes and symmetry. `drop_trivial_pair` marks L as a
    /// graph-Laplacian-like matrix whose near-zero pair must be discarded
    /// when minimizing.
    pub fn new(
        form: GeForm,
        l_matrix: Array2<f64>,
        constraint: Constraint,
        direction: Direction,
        p: usize,
        drop_trivial_pair: bool,
    ) -> Result<Self> {
        let n = l_matrix.nrows();
        if l_matrix.ncols() != n || n == 0 {
            return Err(Error::DimensionMismatch {
                what: "square L matrix",
                expected: n.max(1),
                got: l_matrix.ncols(),
            });
        }
        check_symmetric(&l_matrix, 1e-10)?;
        if let Constraint::Matrix(b) = &constraint {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::DimensionMismatch {
                    what: "constraint matrix size",
                    expected: n,
                    got: b.nrows(),
                });
            }
            check_symmetric(b, 1e-10)?;
        }
        match &form {
            GeForm::Direct => {}
            GeForm::Linearized(x) => {
                if x.sample_count() != n {
                    return Err(Error::DimensionMismatch {
                        what: "samples vs L size",
                        expected: n,
                        got: x.sample_count(),
                    });
                }
            }
            GeForm::Kernelized(k) => {
                if k.nrows() != n || k.ncols() != n {
                    return Err(Error::DimensionMismatch {
                        what: "kernel size vs L size",
                        expected: n,
                        got: k.nrows(),
                    });
                }
            }
        }
        if p == 0 {
            return Err(Error::InvalidParameter(
                "embedding dimension must be positive".into(),
            ));
        }
        Ok(GeProblem {
            form,
            l_matrix,
            constraint,
            direction,
            p,
            drop_trivial_pair,
        })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn dims(&self) -> usize {
        self.p
    }
}

/// Output of [`solve`]; the variant matches the problem form.
#[derive(Debug, Clone)]
pub enum GeSolution {
    /// Direct embedding, rows are points (n×p).
    Direct {
        embedding: Array2<f64>,
        eigenvalues: Vec<f64>,
    },
    /// Projection directions (d×p) and the projected training data (p×n).
    Linearized {
        directions: Array2<f64>,
        embedding: Array2<f64>,
        eigenvalues: Vec<f64>,
        ridge_used: f64,
    },
    /// Kernel coefficients (n×p) and the embedded training data (p×n).
    Kernelized {
        coefficients: Array2<f64>,
        embedding: Array2<f64>,
        eigenvalues: Vec<f64>,
        ridge_used: f64,
    },
}

impl GeSolution {
    /// Training embedding with rows = points (n×p), whatever the form.
    pub fn point_rows(&self) -> Array2<f64> {
        match self {
            GeSolution::Direct { embedding, .. } => embedding.clone(),
            GeSolution::Linearized { embedding, .. }
            | GeSolution::Kernelized { embedding, .. } => embedding.t().to_owned(),
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        match self {
            GeSolution::Direct { eigenvalues, .. }
            | GeSolution::Linearized { eigenvalues, .. }
            | GeSolution::Kernelized { eigenvalues, .. } => eigenvalues,
        }
    }
}

/// Solves a graph-embedding problem: the p extreme eigenvectors of the
/// standard or generalized problem selected by form and constraint.
pub fn solve(problem: &GeProblem) -> Result<GeSolution> {
    let order = problem.direction.sort_order();
    let minimize_with_drop =
        problem.drop_trivial_pair && problem.direction == Direction::Minimize;

    match &problem.form {
        GeForm::Direct => {
            let basis = match &problem.constraint {
                Constraint::Identity => linalg::eig_sym(&problem.l_matrix, order)?,
                Constraint::Matrix(b) => linalg::eig_gen_sym(&problem.l_matrix, b, order)?,
            };
            let truncated = if minimize_with_drop {
                let near_zero =
                    linalg::count_near_zero(basis.eigenvalues(), linalg::DEFAULT_ZERO_TOL);
                if near_zero > 1 {
                    return Err(Error::DisconnectedGraph(near_zero));
                }
                linalg::drop_trivial(&basis, 1, linalg::DEFAULT_ZERO_TOL)?.truncated(problem.p)?
            } else {
                basis.truncated(problem.p)?
            };
            Ok(GeSolution::Direct {
                embedding: truncated.eigenvectors().clone(),
                eigenvalues: truncated.eigenvalues().to_vec(),
            })
        }
        GeForm::Linearized(x) => {
            if minimize_with_drop {
                reject_disconnected(&problem.l_matrix)?;
            }
            let xv = x.values();
            let a = xv.dot(&problem.l_matrix).dot(&xv.t());
            let (basis, ridge_used) = match &problem.constraint {
                Constraint::Matrix(b) => {
                    let rhs = xv.dot(b).dot(&xv.t());
                    linalg::eig_gen_sym_ridged(&a, &rhs, order, linalg::DEFAULT_RIDGE_EPS)?
                }
                Constraint::Identity => (linalg::eig_sym(&a, order)?, 0.0),
            };
            let (directions, eigenvalues) = if minimize_with_drop {
                select_smallest_nondegenerate(&basis, problem.p, xv)?
            } else {
                let t = basis.truncated(problem.p)?;
                (t.eigenvectors().clone(), t.eigenvalues().to_vec())
            };
            let embedding = directions.t().dot(xv);
            Ok(GeSolution::Linearized {
                directions,
                embedding,
                eigenvalues,
                ridge_used,
            })
        }
        GeForm::Kernelized(k) => {
            if minimize_with_drop {
                reject_disconnected(&problem.l_matrix)?;
            }
            let a = k.dot(&problem.l_matrix).dot(k);
            let (basis, ridge_used) = match &problem.constraint {
                Constraint::Matrix(b) => {
                    let rhs = k.dot(b).dot(k);
                    linalg::eig_gen_sym_ridged(&a, &rhs, order, linalg::DEFAULT_RIDGE_EPS)?
                }
                Constraint::Identity => {
                    linalg::eig_gen_sym_ridged(&a, k, order, linalg::DEFAULT_RIDGE_EPS)?
                }
            };
            let (coefficients, eigenvalues) = if minimize_with_drop {
                select_smallest_nondegenerate(&basis, problem.p, k)?
            } else {
                let t = basis.truncated(problem.p)?;
                (t.eigenvectors().clone(), t.eigenvalues().to_vec())
            };
            let embedding = coefficients.t().dot(k);
            Ok(GeSolution::Kernelized {
                coefficients,
                embedding,
                eigenvalues,
                ridge_used,
            })
        }
    }
}

/// A graph-Laplacian-like L with a multi-dimensional null space means the
/// underlying graph is disconnected and the trivial-pair rule is ill-posed.
fn reject_disconnected(l_matrix: &Array2<f64>) -> Result<()> {
    let basis = linalg::eig_sym(l_matrix, SortOrder::Ascending)?;
    let near_zero = linalg::count_near_zero(basis.eigenvalues(), linalg::DEFAULT_ZERO_TOL);
    if near_zero > 1 {
        return Err(Error::DisconnectedGraph(near_zero));
    }
    Ok(())
}

/// The ten special cases, with their method-specific parameters.
#[derive(Debug, Clone)]
pub enum MethodConfig {
    /// Direct GE, graph Laplacian, `YᵀY = I`, minimize.
    LaplacianEigenmap1,
    /// Direct GE, graph Laplacian, `YᵀDY = I`, minimize.
    LaplacianEigenmap2,
    /// Linearized GE, graph Laplacian, B = D, minimize.
    Lpp,
    /// Kernelized GE, graph Laplacian, B = D, minimize.
    KernelLpp,
    /// Linearized GE, L = I, `UᵀU = I`, maximize. Center the data first.
    Pca,
    /// Kernelized GE, L = I, `ΘᵀKΘ = I`, maximize.
    KernelPca,
    /// Linearized GE, L = I, B removes class means, maximize.
    Fda { labels: Vec<usize> },
    /// Kernelized FDA with the same constraint matrix.
    KernelFda { labels: Vec<usize> },
    /// Direct GE on the double-centered distance kernel, maximize. With
    /// `squared_distances: None` the Euclidean distances of the data are
    /// used; supplying a matrix (e.g. geodesic distances) gives Isomap.
    MdsIsomap { squared_distances: Option<Array2<f64>> },
    /// Direct GE on `M = (I-W)ᵀ(I-W)` from precomputed unit-row-sum
    /// reconstruction weights, B = (1/n)I, minimize.
    Lle { reconstruction_weights: Array2<f64> },
}

/// Data/graph/kernel inputs a method configuration may draw from.
#[derive(Debug, Clone, Copy, Default)]
pub struct GeInputs<'a> {
    pub graph: Option<&'a WeightedGraph>,
    pub data: Option<&'a DataMatrix>,
    pub kernel: Option<&'a Array2<f64>>,
}

/// Translates a method configuration into the explicit `(form, L, B,
/// direction)` tuple it corresponds to.
pub fn config_to_problem(
    config: &MethodConfig,
    inputs: GeInputs<'_>,
    p: usize,
) -> Result<GeProblem> {
    match config {
        MethodConfig::LaplacianEigenmap1 => {
            let w = require_graph(&inputs)?;
            let l = laplacian::unnormalized(w)?;
            GeProblem::new(
                GeForm::Direct,
                l.matrix().clone(),
                Constraint::Identity,
                Direction::Minimize,
                p,
                true,
            )
        }
        MethodConfig::LaplacianEigenmap2 => {
            let w = require_graph(&inputs)?;
            let l = laplacian::unnormalized(w)?;
            let d = l.degree_matrix();
            GeProblem::new(
                GeForm::Direct,
                l.matrix().clone(),
                Constraint::Matrix(d),
                Direction::Minimize,
                p,
                true,
            )
        }
        MethodConfig::Lpp => {
            let w = require_graph(&inputs)?;
            let x = require_data(&inputs)?;
            let l = laplacian::unnormalized(w)?;
            let d = l.degree_matrix();
            GeProblem::new(
                GeForm::Linearized(x.clone()),
                l.matrix().clone(),
                Constraint::Matrix(d),
                Direction::Minimize,
                p,
                true,
            )
        }
        MethodConfig::KernelLpp => {
            let w = require_graph(&inputs)?;
            let k = require_kernel(&inputs)?;
            let l = laplacian::unnormalized(w)?;
            let d = l.degree_matrix();
            GeProblem::new(
                GeForm::Kernelized(k.clone()),
                l.matrix().clone(),
                Constraint::Matrix(d),
                Direction::Minimize,
                p,
                true,
            )
        }
        MethodConfig::Pca => {
            let x = require_data(&inputs)?;
            let n = x.sample_count();
            GeProblem::new(
                GeForm::Linearized(x.clone()),
                Array2::eye(n),
                Constraint::Identity,
                Direction::Maximize,
                p,
                false,
            )
        }
        MethodConfig::KernelPca => {
            let k = require_kernel(&inputs)?;
            let n = k.nrows();
            GeProblem::new(
                GeForm::Kernelized(k.clone()),
                Array2::eye(n),
                Constraint::Identity,
                Direction::Maximize,
                p,
                false,
            )
        }
        MethodConfig::Fda { labels } => {
            let x = require_data(&inputs)?;
            let n = x.sample_count();
            let b = fda_constraint(labels, n, p)?;
            GeProblem::new(
                GeForm::Linearized(x.clone()),
                Array2::eye(n),
                Constraint::Matrix(b),
                Direction::Maximize,
                p,
                false,
            )
        }
        MethodConfig::KernelFda { labels } => {
            let k = require_kernel(&inputs)?;
            let n = k.nrows();
            let b = fda_constraint(labels, n, p)?;
            GeProblem::new(
                GeForm::Kernelized(k.clone()),
                Array2::eye(n),
                Constraint::Matrix(b),
                Direction::Maximize,
                p,
                false,
            )
        }
        MethodConfig::MdsIsomap { squared_distances } => {
            let sq = match squared_distances {
                Some(d) => d.clone(),
                None => pairwise_sq_dists(require_data(&inputs)?),
            };
            let k = mds_kernel(&sq)?;
            GeProblem::new(
                GeForm::Direct,
                k,
                Constraint::Identity,
                Direction::Maximize,
                p,
                false,
            )
        }
        MethodConfig::Lle { reconstruction_weights } => {
            let m = lle_m_matrix(reconstruction_weights)?;
            let n = m.nrows();
            let b = Array2::<f64>::eye(n) / n as f64;
            GeProblem::new(
                GeForm::Direct,
                m,
                Constraint::Matrix(b),
                Direction::Minimize,
                p,
                true,
            )
        }
    }
}

/// One-call convenience: configure and solve.
pub fn run_method(config: &MethodConfig, inputs: GeInputs<'_>, p: usize) -> Result<GeSolution> {
    let problem = config_to_problem(config, inputs, p)?;
    solve(&problem)
}

/// Double-centered distance kernel `K = -½ H D H` with `H = I - (1/n)11ᵀ`.
///
/// Every row of K sums to zero, which is what lets the framework treat it as
/// the Laplacian-like matrix of MDS and Isomap.
pub fn mds_kernel(squared_distances: &Array2<f64>) -> Result<Array2<f64>> {
    let n = squared_distances.nrows();
    if squared_distances.ncols() != n || n == 0 {
        return Err(Error::BadDistanceMatrix(format!(
            "matrix must be square and nonempty, got {}x{}",
            n,
            squared_distances.ncols()
        )));
    }
    let mut max_abs = 0.0f64;
    for &v in squared_distances.iter() {
        if !v.is_finite() {
            return Err(Error::BadDistanceMatrix("non-finite entry".into()));
        }
        max_abs = max_abs.max(v.abs());
    }
    let tol = 1e-8 * max_abs.max(1.0);
    for i in 0..n {
        if squared_distances[[i, i]].abs() > tol {
            return Err(Error::BadDistanceMatrix(format!(
                "diagonal entry ({i},{i}) = {} is not zero",
                squared_distances[[i, i]]
            )));
        }
        for j in 0..n {
            let v = squared_distances[[i, j]];
            if v < -tol {
                return Err(Error::BadDistanceMatrix(format!(
                    "negative squared distance at ({i},{j}): {v}"
                )));
            }
            if (v - squared_distances[[j, i]]).abs() > tol {
                return Err(Error::BadDistanceMatrix(format!(
                    "asymmetry at ({i},{j})"
                )));
            }
        }
    }

    let nf = n as f64;
    let mut row_mean = vec![0.0f64; n];
    let mut col_mean = vec![0.0f64; n];
    let mut grand = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let v = squared_distances[[i, j]];
            row_mean[i] += v;
            col_mean[j] += v;
            grand += v;
        }
    }
    for v in row_mean.iter_mut() {
        *v /= nf;
    }
    for v in col_mean.iter_mut() {
        *v /= nf;
    }
    grand /= nf * nf;

    let mut k = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            k[[i, j]] = -0.5 * (squared_distances[[i, j]] - row_mean[i] - col_mean[j] + grand);
        }
    }
    Ok(k)
}

/// `M = (I - W)ᵀ(I - W)` for a reconstruction-weight matrix whose rows sum
/// to one. Row sums of M are zero, its Laplacian-like property.
///
/// Note the factor order: with unit *row* sums, `(I-W)1 = 0`, so zero row
/// sums require `(I-W)ᵀ` on the left — the opposite order only has the
/// property for doubly stochastic weights.
pub fn lle_m_matrix(reconstruction_weights: &Array2<f64>) -> Result<Array2<f64>> {
    let n = reconstruction_weights.nrows();
    if reconstruction_weights.ncols() != n || n == 0 {
        return Err(Error::DimensionMismatch {
            what: "square reconstruction-weight matrix",
            expected: n.max(1),
            got: reconstruction_weights.ncols(),
        });
    }
    for (i, row) in reconstruction_weights.rows().into_iter().enumerate() {
        let sum: f64 = row.sum();
        if (sum - 1.0).abs() > 1e-8 {
            return Err(Error::RowSumViolation {
                row: i,
                sum,
                expected: 1.0,
            });
        }
    }
    let mut i_minus_w = -reconstruction_weights.clone();
    for i in 0..n {
        i_minus_w[[i, i]] += 1.0;
    }
    Ok(i_minus_w.t().dot(&i_minus_w))
}

fn fda_constraint(labels: &[usize], n: usize, p: usize) -> Result<Array2<f64>> {
    if labels.len() != n {
        return Err(Error::LabelMismatch {
            labels: labels.len(),
            samples: n,
        });
    }
    let classes = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut counts = vec![0usize; classes];
    for &l in labels {
        counts[l] += 1;
    }
    if counts.iter().any(|&c| c == 0) {
        return Err(Error::InvalidParameter(
            "class labels must be contiguous (every class in 0..c occupied)".into(),
        ));
    }
    if classes >= 2 && p > classes - 1 {
        log::warn!(
            "requested {p} dimensions but FDA has only {} informative directions; \
             trailing directions are noise",
            classes - 1
        );
    }
    // B = I - Σⱼ (1/nⱼ) eⱼeⱼᵀ
    let mut b = Array2::<f64>::eye(n);
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                b[[i, j]] -= 1.0 / counts[labels[i]] as f64;
            }
        }
    }
    Ok(b)
}

fn check_symmetric(m: &Array2<f64>, rel_tol: f64) -> Result<()> {
    let mut max_abs = 0.0f64;
    for &v in m.iter() {
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
        max_abs = max_abs.max(v.abs());
    }
    let tol = rel_tol * max_abs.max(1.0);
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            let asym = (m[[i, j]] - m[[j, i]]).abs();
            if asym > tol {
                return Err(Error::NonSymmetric {
                    asymmetry: asym,
                    tolerance: tol,
                });
            }
        }
    }
    Ok(())
}

fn require_graph<'a>(inputs: &GeInputs<'a>) -> Result<&'a WeightedGraph> {
    inputs.graph.ok_or(Error::MissingParameter("graph"))
}

fn require_data<'a>(inputs: &GeInputs<'a>) -> Result<&'a DataMatrix> {
    inputs.data.ok_or(Error::MissingParameter("data"))
}

fn require_kernel<'a>(inputs: &GeInputs<'a>) -> Result<&'a Array2<f64>> {
    inputs.kernel.ok_or(Error::MissingParameter("kernel"))
}
