//! Neighborhood graphs and weighted adjacency matrices from raw data points.
//!
//! Distances are exact pairwise squared Euclidean distances, O(n²d), computed
//! entry-wise so the result is exactly symmetric and independent of how many
//! threads rayon happens to use.

use ndarray::{Array1, Array2, ArrayView1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default RBF bandwidth σ².
pub const DEFAULT_SIGMA_SQ: f64 = 1.0;

/// Column-major sample matrix: d×n, one sample per column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMatrix {
    values: Array2<f64>,
}

impl DataMatrix {
    /// Wraps a d×n matrix whose columns are samples. Entries must be finite.
    pub fn new(values: Array2<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::InvalidParameter(
                "data matrix must have at least one feature and one sample".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(DataMatrix { values })
    }

    /// Builds from sample rows (the CSV layout), transposing into columns.
    pub fn from_rows(rows: &Array2<f64>) -> Result<Self> {
        Self::new(rows.t().to_owned())
    }

    pub fn feature_dim(&self) -> usize {
        self.values.nrows()
    }

    pub fn sample_count(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn sample(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.column(i)
    }
}

/// How the neighborhood graph is constructed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NeighborhoodSpec {
    /// Connect i and j when the squared distance is at most ε.
    Epsilon(f64),
    /// Connect i and j when either is among the k nearest of the other
    /// (union symmetrization); ties broken by ascending sample index.
    Knn(usize),
    /// Connect every distinct pair.
    Full,
}

impl NeighborhoodSpec {
    fn validate(&self, n: usize) -> Result<()> {
        if n < 2 {
            return Err(Error::InvalidSpec(format!(
                "graph construction needs at least 2 samples, got {n}"
            )));
        }
        match *self {
            NeighborhoodSpec::Epsilon(eps) => {
                if !(eps >= 0.0) {
                    return Err(Error::InvalidSpec(format!("epsilon must be >= 0, got {eps}")));
                }
            }
            NeighborhoodSpec::Knn(k) => {
                if k == 0 || k > n - 1 {
                    return Err(Error::InvalidSpec(format!(
                        "k must lie in 1..={}, got {k}",
                        n - 1
                    )));
                }
            }
            NeighborhoodSpec::Full => {}
        }
        Ok(())
    }
}

/// Weighting applied on top of the connectivity structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WeightKind {
    /// Heat-kernel weights `exp(-‖xᵢ-xⱼ‖² / 2σ²)`.
    Rbf { sigma_sq: f64 },
    /// 1 for connected pairs, 0 otherwise.
    Binary,
}

/// Boolean neighborhood structure together with the spec that produced it.
#[derive(Debug, Clone)]
pub struct Connectivity {
    matrix: Array2<bool>,
    spec: NeighborhoodSpec,
}

impl Connectivity {
    pub fn matrix(&self) -> &Array2<bool> {
        &self.matrix
    }

    pub fn spec(&self) -> NeighborhoodSpec {
        self.spec
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_connected_pair(&self, i: usize, j: usize) -> bool {
        self.matrix[[i, j]]
    }
}

/// Symmetric nonnegative adjacency with neighborhood provenance; the
/// universal input of every method in this crate.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    weights: Array2<f64>,
    spec: NeighborhoodSpec,
    weight_kind: WeightKind,
}

impl WeightedGraph {
    /// Validates and wraps an adjacency matrix: square, exactly symmetric,
    /// zero diagonal, entries in [0, 1].
    pub fn from_weights(
        weights: Array2<f64>,
        spec: NeighborhoodSpec,
        weight_kind: WeightKind,
    ) -> Result<Self> {
        let n = weights.nrows();
        if weights.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "adjacency matrix",
                expected: n,
                got: weights.ncols(),
            });
        }
        for i in 0..n {
            if weights[[i, i]] != 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "adjacency diagonal must be zero, entry ({i},{i}) = {}",
                    weights[[i, i]]
                )));
            }
            for j in 0..n {
                let w = weights[[i, j]];
                if !w.is_finite() {
                    return Err(Error::NonFinite);
                }
                if !(0.0..=1.0).contains(&w) {
                    return Err(Error::InvalidSpec(format!(
                        "adjacency weights must lie in [0, 1], entry ({i},{j}) = {w}"
                    )));
                }
                if weights[[i, j]] != weights[[j, i]] {
                    return Err(Error::InvalidSpec(format!(
                        "adjacency must be exactly symmetric, mismatch at ({i},{j})"
                    )));
                }
            }
        }
        Ok(WeightedGraph {
            weights,
            spec,
            weight_kind,
        })
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn spec(&self) -> NeighborhoodSpec {
        self.spec
    }

    pub fn weight_kind(&self) -> WeightKind {
        self.weight_kind
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }
}

/// Exact pairwise squared Euclidean distances between sample columns.
///
/// Each entry is an independent fixed-order sum over features, so the matrix
/// is exactly symmetric and bit-identical for any rayon thread count.
pub fn pairwise_sq_dists(x: &DataMatrix) -> Array2<f64> {
    let n = x.sample_count();
    let d = x.feature_dim();
    let values = x.values();
    let buf: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let mut s = 0.0;
            for k in 0..d {
                let diff = values[[k, i]] - values[[k, j]];
                s += diff * diff;
            }
            s
        })
        .collect();
    Array2::from_shape_vec((n, n), buf).expect("shape matches by construction")
}

/// Squared distances between training columns and test columns (n×n_t).
pub fn cross_sq_dists(train: &DataMatrix, test: &DataMatrix) -> Result<Array2<f64>> {
    if train.feature_dim() != test.feature_dim() {
        return Err(Error::DimensionMismatch {
            what: "feature dimension",
            expected: train.feature_dim(),
            got: test.feature_dim(),
        });
    }
    let n = train.sample_count();
    let nt = test.sample_count();
    let d = train.feature_dim();
    let (xt, xs) = (train.values(), test.values());
    let buf: Vec<f64> = (0..n * nt)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / nt, idx % nt);
            let mut s = 0.0;
            for k in 0..d {
                let diff = xt[[k, i]] - xs[[k, j]];
                s += diff * diff;
            }
            s
        })
        .collect();
    Ok(Array2::from_shape_vec((n, nt), buf).expect("shape matches by construction"))
}

/// Builds the boolean neighborhood structure for a dataset.
pub fn build_neighborhood(x: &DataMatrix, spec: NeighborhoodSpec) -> Result<Connectivity> {
    let n = x.sample_count();
    spec.validate(n)?;
    let dists = pairwise_sq_dists(x);
    let mut conn = Array2::<bool>::from_elem((n, n), false);
    match spec {
        NeighborhoodSpec::Epsilon(eps) => {
            for i in 0..n {
                for j in 0..n {
                    if i != j && dists[[i, j]] <= eps {
                        conn[[i, j]] = true;
                    }
                }
            }
        }
        NeighborhoodSpec::Knn(k) => {
            for i in 0..n {
                let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                order.sort_by(|&a, &b| {
                    dists[[i, a]]
                        .total_cmp(&dists[[i, b]])
                        .then(a.cmp(&b))
                });
                for &j in order.iter().take(k) {
                    // union symmetrization: an edge in either direction connects both
                    conn[[i, j]] = true;
                    conn[[j, i]] = true;
                }
            }
        }
        NeighborhoodSpec::Full => {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        conn[[i, j]] = true;
                    }
                }
            }
        }
    }
    Ok(Connectivity { matrix: conn, spec })
}

/// Heat-kernel adjacency on a connectivity structure.
pub fn rbf_weights(x: &DataMatrix, conn: &Connectivity, sigma_sq: f64) -> Result<WeightedGraph> {
    if !(sigma_sq > 0.0) {
        return Err(Error::InvalidSigma(sigma_sq));
    }
    let n = x.sample_count();
    if conn.n() != n {
        return Err(Error::DimensionMismatch {
            what: "connectivity size",
            expected: n,
            got: conn.n(),
        });
    }
    let dists = pairwise_sq_dists(x);
    let mut w = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if i != j && conn.is_connected_pair(i, j) {
                w[[i, j]] = (-dists[[i, j]] / (2.0 * sigma_sq)).exp();
            }
        }
    }
    Ok(WeightedGraph {
        weights: w,
        spec: conn.spec(),
        weight_kind: WeightKind::Rbf { sigma_sq },
    })
}

/// 0/1 adjacency on a connectivity structure.
pub fn binary_weights(conn: &Connectivity) -> WeightedGraph {
    let n = conn.n();
    let mut w = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if i != j && conn.is_connected_pair(i, j) {
                w[[i, j]] = 1.0;
            }
        }
    }
    WeightedGraph {
        weights: w,
        spec: conn.spec(),
        weight_kind: WeightKind::Binary,
    }
}

/// Convenience: neighborhood construction plus weighting in one call.
pub fn build_graph(
    x: &DataMatrix,
    spec: NeighborhoodSpec,
    kind: WeightKind,
) -> Result<WeightedGraph> {
    let conn = build_neighborhood(x, spec)?;
    match kind {
        WeightKind::Rbf { sigma_sq } => rbf_weights(x, &conn, sigma_sq),
        WeightKind::Binary => Ok(binary_weights(&conn)),
    }
}

/// Degree-style row sums of an arbitrary nonnegative matrix.
pub(crate) fn row_sums(m: &Array2<f64>) -> Array1<f64> {
    let n = m.nrows();
    let mut d = Array1::<f64>::zeros(n);
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..m.ncols() {
            s += m[[i, j]];
        }
        d[i] = s;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line_points() -> DataMatrix {
        // samples at coordinates 0, 1, 10 on a line
        DataMatrix::new(array![[0.0, 1.0, 10.0]]).unwrap()
    }

    fn random_data(d: usize, n: usize, seed: u64) -> DataMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Array2::<f64>::zeros((d, n));
        for v in m.iter_mut() {
            *v = rng.random_range(-3.0..3.0);
        }
        DataMatrix::new(m).unwrap()
    }

    #[test]
    fn epsilon_connects_only_close_pairs() {
        let x = line_points();
        let conn = build_neighborhood(&x, NeighborhoodSpec::Epsilon(1.0)).unwrap();
        // squared distances: (0,1)=1 <= 1; (1,10)=81 and (0,10)=100 exceed it
        assert!(conn.is_connected_pair(0, 1));
        assert!(conn.is_connected_pair(1, 0));
        assert!(!conn.is_connected_pair(1, 2));
        assert!(!conn.is_connected_pair(0, 2));
        assert!(!conn.is_connected_pair(0, 0));
    }

    #[test]
    fn knn_union_symmetrization() {
        let x = line_points();
        let conn = build_neighborhood(&x, NeighborhoodSpec::Knn(1)).unwrap();
        // brute-force nearest neighbors: 0→1, 1→0, 2→1; union gives edges {0,1} and {1,2}
        let mut expected = Array2::<bool>::from_elem((3, 3), false);
        for &(a, b) in &[(0usize, 1usize), (1, 2)] {
            expected[[a, b]] = true;
            expected[[b, a]] = true;
        }
        assert_eq!(conn.matrix(), &expected);
    }

    #[test]
    fn full_connects_everything_off_diagonal() {
        let x = line_points();
        let conn = build_neighborhood(&x, NeighborhoodSpec::Full).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(conn.is_connected_pair(i, j), i != j);
            }
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        let x = line_points();
        assert!(matches!(
            build_neighborhood(&x, NeighborhoodSpec::Knn(0)),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            build_neighborhood(&x, NeighborhoodSpec::Knn(3)),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            build_neighborhood(&x, NeighborhoodSpec::Epsilon(-0.5)),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn rbf_weight_values() {
        // coincident pair plus one at squared distance 2: exp(0)=1, exp(-1)
        let x = DataMatrix::new(array![[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]]).unwrap();
        let conn = build_neighborhood(&x, NeighborhoodSpec::Full).unwrap();
        let g = rbf_weights(&x, &conn, 1.0).unwrap();
        assert_eq!(g.weights()[[0, 1]], 1.0);
        assert!((g.weights()[[0, 2]] - (-1.0_f64).exp()).abs() < 1e-12);
        assert!((g.weights()[[0, 2]] - 0.367_879_441_171_442_33).abs() < 1e-12);
    }

    #[test]
    fn rbf_disconnected_pair_weight_zero() {
        let x = line_points();
        let conn = build_neighborhood(&x, NeighborhoodSpec::Epsilon(1.0)).unwrap();
        let g = rbf_weights(&x, &conn, 100.0).unwrap();
        assert_eq!(g.weights()[[0, 2]], 0.0);
        assert_eq!(g.weights()[[1, 2]], 0.0);
        assert!(g.weights()[[0, 1]] > 0.0);
    }

    #[test]
    fn rbf_rejects_bad_sigma() {
        let x = line_points();
        let conn = build_neighborhood(&x, NeighborhoodSpec::Full).unwrap();
        assert!(matches!(
            rbf_weights(&x, &conn, 0.0),
            Err(Error::InvalidSigma(_))
        ));
    }

    #[test]
    fn binary_weights_path() {
        let x = line_points();
        let conn = build_neighborhood(&x, NeighborhoodSpec::Knn(1)).unwrap();
        let g = binary_weights(&conn);
        let expected = array![[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]];
        assert_eq!(g.weights(), &expected);
    }

    #[test]
    fn binary_weights_empty_and_full() {
        let x = line_points();
        let empty = build_neighborhood(&x, NeighborhoodSpec::Epsilon(0.5)).unwrap();
        assert_eq!(binary_weights(&empty).weights().sum(), 0.0);
        let full = build_neighborhood(&x, NeighborhoodSpec::Full).unwrap();
        assert_eq!(binary_weights(&full).weights().sum(), 6.0);
    }

    #[test]
    fn symmetry_is_exact_on_random_data() {
        let x = random_data(4, 25, 99);
        for spec in [
            NeighborhoodSpec::Full,
            NeighborhoodSpec::Knn(5),
            NeighborhoodSpec::Epsilon(3.0),
        ] {
            let conn = build_neighborhood(&x, spec).unwrap();
            let g = rbf_weights(&x, &conn, 1.0).unwrap();
            let w = g.weights();
            for i in 0..25 {
                assert_eq!(w[[i, i]], 0.0);
                for j in 0..25 {
                    assert_eq!(w[[i, j]].to_bits(), w[[j, i]].to_bits());
                }
            }
        }
    }

    #[test]
    fn rbf_monotone_in_distance() {
        let x = random_data(3, 20, 7);
        let conn = build_neighborhood(&x, NeighborhoodSpec::Full).unwrap();
        let g = rbf_weights(&x, &conn, 0.7).unwrap();
        let dists = pairwise_sq_dists(&x);
        let mut pairs: Vec<(f64, f64)> = Vec::new();
        for i in 0..20 {
            for j in (i + 1)..20 {
                pairs.push((dists[[i, j]], g.weights()[[i, j]]));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in pairs.windows(2) {
            if w[1].0 > w[0].0 {
                assert!(w[1].1 < w[0].1, "larger distance must give smaller weight");
            }
        }
    }

    #[test]
    fn coincident_points_weight_one_for_any_sigma() {
        let x = DataMatrix::new(array![[2.0, 2.0], [1.0, 1.0]]).unwrap();
        let conn = build_neighborhood(&x, NeighborhoodSpec::Full).unwrap();
        for sigma_sq in [0.01, 1.0, 250.0] {
            let g = rbf_weights(&x, &conn, sigma_sq).unwrap();
            assert_eq!(g.weights()[[0, 1]], 1.0);
        }
    }

    #[test]
    fn from_weights_validation() {
        let ok = array![[0.0, 0.4], [0.4, 0.0]];
        assert!(WeightedGraph::from_weights(ok, NeighborhoodSpec::Full, WeightKind::Binary).is_ok());
        let bad_diag = array![[0.1, 0.4], [0.4, 0.0]];
        assert!(
            WeightedGraph::from_weights(bad_diag, NeighborhoodSpec::Full, WeightKind::Binary)
                .is_err()
        );
        let asymmetric = array![[0.0, 0.4], [0.3, 0.0]];
        assert!(
            WeightedGraph::from_weights(asymmetric, NeighborhoodSpec::Full, WeightKind::Binary)
                .is_err()
        );
    }

    proptest! {
        #[test]
        fn prop_knn_graph_symmetric_with_min_degree(seed in 0u64..200, n in 3usize..15, k in 1usize..5) {
            let k = k.min(n - 1);
            let x = random_data(2, n, seed);
            let conn = build_neighborhood(&x, NeighborhoodSpec::Knn(k)).unwrap();
            for i in 0..n {
                prop_assert!(!conn.is_connected_pair(i, i));
                let mut degree = 0;
                for j in 0..n {
                    prop_assert_eq!(conn.is_connected_pair(i, j), conn.is_connected_pair(j, i));
                    if conn.is_connected_pair(i, j) {
                        degree += 1;
                    }
                }
                // every vertex keeps at least its own k outgoing edges
                prop_assert!(degree >= k);
            }
        }
    }
}
