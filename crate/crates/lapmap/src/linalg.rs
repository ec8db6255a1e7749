//! Dense symmetric and generalized-symmetric eigendecomposition.
//!
//! The solvers here are deliberately plain: Householder tridiagonalization
//! followed by implicit-shift QL for the standard problem, and a triangular
//! (Cholesky) reduction `B = C Cᵀ` for the generalized problem `A v = λ B v`.
//! No LAPACK, no iterative refinement, no internal threading — identical
//! inputs give bit-identical results on every run and under every thread
//! count, which the rest of the crate relies on for reproducible embeddings.
//!
//! Eigenpairs come back sorted (ties keep their pre-sort order) with a fixed
//! sign convention: the entry of largest magnitude in each eigenvector is
//! nonnegative, lowest index winning ties.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Sort direction for eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SortOrder {
    Ascending,
    Descending,
}

/// Which eigenproblem produced a basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// `A v = λ v`, columns have unit Euclidean norm.
    Standard,
    /// `A v = λ B v`, columns have unit B-norm `vᵀBv = 1`.
    Generalized,
}

/// Relative tolerance below which an eigenvalue counts as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-8;

/// Ridge multiplier ε applied as `ε · (trace(B)/n) · I` when the constraint
/// matrix is not safely positive definite.
pub const DEFAULT_RIDGE_EPS: f64 = 1e-10;

/// Sorted eigenpairs of a symmetric or generalized-symmetric problem.
///
/// Column `j` of [`eigenvectors`](Self::eigenvectors) pairs with
/// `eigenvalues()[j]`.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    eigenvalues: Vec<f64>,
    eigenvectors: Array2<f64>,
    order: SortOrder,
    problem: ProblemKind,
}

impl EigenBasis {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// n×m matrix of eigenvector columns.
    pub fn eigenvectors(&self) -> &Array2<f64> {
        &self.eigenvectors
    }

    pub fn order(&self) -> SortOrder {
        self.order
    }

    pub fn problem(&self) -> ProblemKind {
        self.problem
    }

    /// Dimension n of the underlying space.
    pub fn dim(&self) -> usize {
        self.eigenvectors.nrows()
    }

    /// Number of retained eigenpairs.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Reassembles a basis from stored parts (persistence path); shapes must
    /// already agree.
    pub(crate) fn from_raw_parts(
        eigenvalues: Vec<f64>,
        eigenvectors: Array2<f64>,
        order: SortOrder,
        problem: ProblemKind,
    ) -> Result<EigenBasis> {
        if eigenvectors.ncols() != eigenvalues.len() {
            return Err(Error::DimensionMismatch {
                what: "eigenvector columns vs eigenvalues",
                expected: eigenvalues.len(),
                got: eigenvectors.ncols(),
            });
        }
        Ok(EigenBasis {
            eigenvalues,
            eigenvectors,
            order,
            problem,
        })
    }

    /// Keeps the leading `p` eigenpairs.
    pub fn truncated(&self, p: usize) -> Result<EigenBasis> {
        if p > self.len() {
            return Err(Error::TooManyDimensions {
                requested: p,
                available: self.len(),
            });
        }
        Ok(EigenBasis {
            eigenvalues: self.eigenvalues[..p].to_vec(),
            eigenvectors: self.eigenvectors.slice(ndarray::s![.., ..p]).to_owned(),
            order: self.order,
            problem: self.problem,
        })
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// Rejects non-finite input and asymmetry beyond `1e-10` relative to the
/// largest entry magnitude. Returns the full basis of n pairs.
pub fn eig_sym(a: &Array2<f64>, order: SortOrder) -> Result<EigenBasis> {
    validate_symmetric(a)?;
    let m = symmetrized(a);
    let (mut vals, mut vecs) = solve_standard_raw(&m)?;
    sort_pairs(&mut vals, &mut vecs, order);
    for j in 0..vals.len() {
        let norm = euclidean_norm(&vecs, j);
        scale_column(&mut vecs, j, 1.0 / norm);
        fix_column_sign(&mut vecs, j);
    }
    Ok(EigenBasis {
        eigenvalues: vals,
        eigenvectors: vecs,
        order,
        problem: ProblemKind::Standard,
    })
}

/// Generalized eigendecomposition `A v = λ B v` with `B` symmetric positive
/// definite, via the reduction `B = C Cᵀ`, `C⁻¹ A C⁻ᵀ y = λ y`, `v = C⁻ᵀ y`.
///
/// Uses the default ridge policy; see [`eig_gen_sym_ridged`] for control over
/// the ridge and for the amount actually applied.
pub fn eig_gen_sym(a: &Array2<f64>, b: &Array2<f64>, order: SortOrder) -> Result<EigenBasis> {
    eig_gen_sym_ridged(a, b, order, DEFAULT_RIDGE_EPS).map(|(basis, _)| basis)
}

/// [`eig_gen_sym`] with an explicit ridge multiplier.
///
/// If factorizing `B` fails or its smallest pivot drops below
/// `1e-12 · trace(B)/n`, retries on `B + ridge_eps · (trace(B)/n) · I` and
/// reports the ridge that was added (0.0 when none was needed).
pub fn eig_gen_sym_ridged(
    a: &Array2<f64>,
    b: &Array2<f64>,
    order: SortOrder,
    ridge_eps: f64,
) -> Result<(EigenBasis, f64)> {
    validate_symmetric(a)?;
    validate_symmetric(b)?;
    let n = a.nrows();
    if b.nrows() != n {
        return Err(Error::DimensionMismatch {
            what: "constraint matrix size",
            expected: n,
            got: b.nrows(),
        });
    }

    let avg_diag = b.diag().sum() / n as f64;
    let pivot_floor = (1e-12 * avg_diag).max(0.0);
    let (chol, ridge_used, b_eff) = match cholesky_lower(b, pivot_floor) {
        Some(c) => (c, 0.0, symmetrized(b)),
        None => {
            let ridge = ridge_eps * avg_diag;
            let mut b_r = symmetrized(b);
            for i in 0..n {
                b_r[[i, i]] += ridge;
            }
            let c = cholesky_lower(&b_r, 0.0).ok_or(Error::NotPositiveDefinite)?;
            (c, ridge, b_r)
        }
    };

    let reduced = reduce_to_standard(a, &chol);
    let (mut vals, mut vecs) = solve_standard_raw(&reduced)?;
    sort_pairs(&mut vals, &mut vecs, order);

    // Back-transform v = C⁻ᵀ y column by column, then enforce vᵀBv = 1.
    let mut buf = vec![0.0; n];
    for j in 0..vals.len() {
        for i in 0..n {
            buf[i] = vecs[[i, j]];
        }
        solve_lower_transposed(&chol, &mut buf);
        for i in 0..n {
            vecs[[i, j]] = buf[i];
        }
        let b_norm = b_inner_norm(&vecs, j, &b_eff);
        scale_column(&mut vecs, j, 1.0 / b_norm);
        fix_column_sign(&mut vecs, j);
    }

    Ok((
        EigenBasis {
            eigenvalues: vals,
            eigenvectors: vecs,
            order,
            problem: ProblemKind::Generalized,
        },
        ridge_used,
    ))
}

/// Removes `count` near-zero eigenpairs from a basis.
///
/// A pair is eligible when `|λ| < tol · max(1, max|λ|)`; the `count` smallest
/// in magnitude among the eligible ones are removed, everything else keeps
/// its order.
pub fn drop_trivial(basis: &EigenBasis, count: usize, tol: f64) -> Result<EigenBasis> {
    if count == 0 {
        return Ok(basis.clone());
    }
    let threshold = near_zero_threshold(&basis.eigenvalues, tol);
    let mut eligible: Vec<usize> = (0..basis.eigenvalues.len())
        .filter(|&i| basis.eigenvalues[i].abs() < threshold)
        .collect();
    eligible.sort_by(|&i, &j| basis.eigenvalues[i].abs().total_cmp(&basis.eigenvalues[j].abs()));
    if eligible.len() < count {
        return Err(Error::NotEnoughTrivialPairs {
            requested: count,
            available: eligible.len(),
        });
    }
    let removed: std::collections::HashSet<usize> = eligible[..count].iter().copied().collect();
    let keep: Vec<usize> = (0..basis.eigenvalues.len())
        .filter(|i| !removed.contains(i))
        .collect();

    let n = basis.dim();
    let mut vals = Vec::with_capacity(keep.len());
    let mut vecs = Array2::<f64>::zeros((n, keep.len()));
    for (out, &idx) in keep.iter().enumerate() {
        vals.push(basis.eigenvalues[idx]);
        for i in 0..n {
            vecs[[i, out]] = basis.eigenvectors[[i, idx]];
        }
    }
    Ok(EigenBasis {
        eigenvalues: vals,
        eigenvectors: vecs,
        order: basis.order,
        problem: basis.problem,
    })
}

/// Number of eigenvalues with `|λ| < tol · max(1, max|λ|)`.
pub fn count_near_zero(eigenvalues: &[f64], tol: f64) -> usize {
    let threshold = near_zero_threshold(eigenvalues, tol);
    eigenvalues.iter().filter(|v| v.abs() < threshold).count()
}

fn near_zero_threshold(eigenvalues: &[f64], tol: f64) -> f64 {
    let max_abs = eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    tol * max_abs.max(1.0)
}

// ---------------------------------------------------------------------------
// validation and small helpers
// ---------------------------------------------------------------------------

fn validate_symmetric(a: &Array2<f64>) -> Result<()> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "square matrix",
            expected: n.max(1),
            got: a.ncols(),
        });
    }
    let mut max_abs = 0.0_f64;
    for &v in a.iter() {
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
        max_abs = max_abs.max(v.abs());
    }
    let tolerance = 1e-10 * max_abs.max(1.0);
    let mut asymmetry = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            asymmetry = asymmetry.max((a[[i, j]] - a[[j, i]]).abs());
        }
    }
    if asymmetry > tolerance {
        return Err(Error::NonSymmetric {
            asymmetry,
            tolerance,
        });
    }
    Ok(())
}

fn symmetrized(a: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    let mut m = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        m[[i, i]] = a[[i, i]];
        for j in (i + 1)..n {
            let v = (a[[i, j]] + a[[j, i]]) / 2.0;
            m[[i, j]] = v;
            m[[j, i]] = v;
        }
    }
    m
}

fn euclidean_norm(vecs: &Array2<f64>, col: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..vecs.nrows() {
        s += vecs[[i, col]] * vecs[[i, col]];
    }
    s.sqrt()
}

fn b_inner_norm(vecs: &Array2<f64>, col: usize, b: &Array2<f64>) -> f64 {
    let n = vecs.nrows();
    let mut s = 0.0;
    for i in 0..n {
        let mut bv = 0.0;
        for j in 0..n {
            bv += b[[i, j]] * vecs[[j, col]];
        }
        s += vecs[[i, col]] * bv;
    }
    s.sqrt()
}

fn scale_column(vecs: &mut Array2<f64>, col: usize, factor: f64) {
    for i in 0..vecs.nrows() {
        vecs[[i, col]] *= factor;
    }
}

/// Largest-magnitude entry nonnegative; lowest index wins ties.
fn fix_column_sign(vecs: &mut Array2<f64>, col: usize) {
    let n = vecs.nrows();
    let mut best = 0;
    let mut best_abs = vecs[[0, col]].abs();
    for i in 1..n {
        let v = vecs[[i, col]].abs();
        if v > best_abs {
            best = i;
            best_abs = v;
        }
    }
    if vecs[[best, col]] < 0.0 {
        for i in 0..n {
            vecs[[i, col]] = -vecs[[i, col]];
        }
    }
}

fn sort_pairs(vals: &mut Vec<f64>, vecs: &mut Array2<f64>, order: SortOrder) {
    let m = vals.len();
    let mut idx: Vec<usize> = (0..m).collect();
    match order {
        SortOrder::Ascending => idx.sort_by(|&i, &j| vals[i].total_cmp(&vals[j])),
        SortOrder::Descending => idx.sort_by(|&i, &j| vals[j].total_cmp(&vals[i])),
    }
    let sorted_vals: Vec<f64> = idx.iter().map(|&i| vals[i]).collect();
    let n = vecs.nrows();
    let mut sorted_vecs = Array2::<f64>::zeros((n, m));
    for (out, &src) in idx.iter().enumerate() {
        for r in 0..n {
            sorted_vecs[[r, out]] = vecs[[r, src]];
        }
    }
    *vals = sorted_vals;
    *vecs = sorted_vecs;
}

// ---------------------------------------------------------------------------
// Householder tridiagonalization + implicit-shift QL
// ---------------------------------------------------------------------------

/// Unsorted eigenpairs of a symmetric matrix; columns of the returned matrix
/// are orthonormal eigenvectors in the solver's natural order.
fn solve_standard_raw(m: &Array2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = m.nrows();
    let mut z = m.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut z, &mut d, &mut e);
    ql_implicit(&mut d, &mut e, &mut z)?;
    Ok((d, z))
}

/// Householder reduction to tridiagonal form, accumulating the orthogonal
/// transformation in `z`. On return `d` holds the diagonal and `e` the
/// subdiagonal with `e[0] = 0`.
fn tridiagonalize(z: &mut Array2<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..i {
                scale += z[[i, k]].abs();
            }
            if scale == 0.0 {
                e[i] = z[[i, l]];
            } else {
                for k in 0..i {
                    z[[i, k]] /= scale;
                    h += z[[i, k]] * z[[i, k]];
                }
                let f = z[[i, l]];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                z[[i, l]] = f - g;
                let mut f_acc = 0.0;
                for j in 0..i {
                    z[[j, i]] = z[[i, j]] / h;
                    let mut g_acc = 0.0;
                    for k in 0..=j {
                        g_acc += z[[j, k]] * z[[i, k]];
                    }
                    for k in (j + 1)..i {
                        g_acc += z[[k, j]] * z[[i, k]];
                    }
                    e[j] = g_acc / h;
                    f_acc += e[j] * z[[i, j]];
                }
                let hh = f_acc / (h + h);
                for j in 0..i {
                    let f = z[[i, j]];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        z[[j, k]] -= f * e[k] + g * z[[i, k]];
                    }
                }
            }
        } else {
            e[i] = z[[i, l]];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += z[[i, k]] * z[[k, j]];
                }
                for k in 0..i {
                    z[[k, j]] -= g * z[[k, i]];
                }
            }
        }
        d[i] = z[[i, i]];
        z[[i, i]] = 1.0;
        for j in 0..i {
            z[[j, i]] = 0.0;
            z[[i, j]] = 0.0;
        }
    }
}

/// QL iteration with implicit shifts on a symmetric tridiagonal matrix,
/// rotating the eigenvector columns of `z` along.
fn ql_implicit(d: &mut [f64], e: &mut [f64], z: &mut Array2<f64>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iter == 50 {
                return Err(Error::ConvergenceFailure);
            }
            iter += 1;

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = stable_hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + sign_of(r, g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = stable_hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..z.nrows() {
                    let f = z[[k, i + 1]];
                    z[[k, i + 1]] = s * z[[k, i]] + c * f;
                    z[[k, i]] = c * z[[k, i]] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn stable_hypot(a: f64, b: f64) -> f64 {
    let (absa, absb) = (a.abs(), b.abs());
    if absa > absb {
        let q = absb / absa;
        absa * (1.0 + q * q).sqrt()
    } else if absb == 0.0 {
        0.0
    } else {
        let q = absa / absb;
        absb * (1.0 + q * q).sqrt()
    }
}

fn sign_of(magnitude: f64, sign_source: f64) -> f64 {
    if sign_source >= 0.0 {
        magnitude.abs()
    } else {
        -magnitude.abs()
    }
}

// ---------------------------------------------------------------------------
// Cholesky reduction for the generalized problem
// ---------------------------------------------------------------------------

/// Lower Cholesky factor of a symmetric matrix, or `None` if any pivot is
/// non-finite or not above `pivot_floor`.
fn cholesky_lower(b: &Array2<f64>, pivot_floor: f64) -> Option<Array2<f64>> {
    let n = b.nrows();
    let mut c = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mut pivot = b[[j, j]];
        for k in 0..j {
            pivot -= c[[j, k]] * c[[j, k]];
        }
        if !pivot.is_finite() || pivot <= pivot_floor {
            return None;
        }
        let cjj = pivot.sqrt();
        c[[j, j]] = cjj;
        for i in (j + 1)..n {
            let mut s = b[[i, j]];
            for k in 0..j {
                s -= c[[i, k]] * c[[j, k]];
            }
            c[[i, j]] = s / cjj;
        }
    }
    Some(c)
}

/// Forward substitution: solves `C x = rhs` in place for lower-triangular C.
fn solve_lower(c: &Array2<f64>, rhs: &mut [f64]) {
    let n = rhs.len();
    for i in 0..n {
        let mut v = rhs[i];
        for j in 0..i {
            v -= c[[i, j]] * rhs[j];
        }
        rhs[i] = v / c[[i, i]];
    }
}

/// Back substitution: solves `Cᵀ x = rhs` in place for lower-triangular C.
fn solve_lower_transposed(c: &Array2<f64>, rhs: &mut [f64]) {
    let n = rhs.len();
    for i in (0..n).rev() {
        let mut v = rhs[i];
        for j in (i + 1)..n {
            v -= c[[j, i]] * rhs[j];
        }
        rhs[i] = v / c[[i, i]];
    }
}

/// Forms `C⁻¹ A C⁻ᵀ` via two rounds of triangular solves, symmetrized.
fn reduce_to_standard(a: &Array2<f64>, chol: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    // V = C⁻¹ A, column by column.
    let mut v = Array2::<f64>::zeros((n, n));
    let mut buf = vec![0.0; n];
    for col in 0..n {
        for i in 0..n {
            buf[i] = a[[i, col]];
        }
        solve_lower(chol, &mut buf);
        for i in 0..n {
            v[[i, col]] = buf[i];
        }
    }
    // Row i of M solves C mᵢ = (row i of V)ᵀ, i.e. M = V C⁻ᵀ.
    let mut m = Array2::<f64>::zeros((n, n));
    for row in 0..n {
        for i in 0..n {
            buf[i] = v[[row, i]];
        }
        solve_lower(chol, &mut buf);
        for i in 0..n {
            m[[row, i]] = buf[i];
        }
    }
    symmetrized(&m)
}

/// Builds a diagonal matrix from a vector.
pub fn diag_matrix(values: &Array1<f64>) -> Array2<f64> {
    let n = values.len();
    let mut m = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        m[[i, i]] = values[i];
    }
    m
}
