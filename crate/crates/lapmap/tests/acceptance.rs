//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured numbers. Every tolerance is pinned in the assertions.
//!
//! Run with `cargo test --test acceptance` (add `-- --nocapture` to see the
//! per-criterion summaries).

use std::time::Instant;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lapmap::cluster::{self, EmbeddingVariant, TwoClusterRule};
use lapmap::datasets::{self, SyntheticDataset};
use lapmap::diffusion::{self, DistanceForm};
use lapmap::eigenmap::{self, LeApproach};
use lapmap::ge::{self, GeInputs, GeSolution, MethodConfig};
use lapmap::graph::{
    build_graph, pairwise_sq_dists, DataMatrix, NeighborhoodSpec, WeightKind,
};
use lapmap::laplacian;
use lapmap::linalg::{self, SortOrder};
use lapmap::lpp;
use lapmap::testutil::{
    bfs_components, brute_force_min_ratio_cut, double_sum_scalar, graph_from,
    max_principal_angle_sin, random_connected_graph,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Criterion 1: zero row sums for the unnormalized Laplacian, the MDS
/// kernel, and the LLE M-matrix on 100 random inputs each (n ≤ 50), < 5 s.
#[test]
fn criterion_01_row_sum_laws() {
    let start = Instant::now();
    let mut r = rng(101);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let n = r.random_range(2..=50usize);

        let g = random_connected_graph(n, &mut r);
        let l = laplacian::unnormalized(&g).unwrap();
        let d_max = l.degrees().iter().fold(0.0f64, |m, &v| m.max(v));
        for i in 0..n {
            let s: f64 = (0..n).map(|j| l.matrix()[[i, j]]).sum();
            let rel = s.abs() / d_max.max(1.0);
            worst = worst.max(rel);
            assert!(rel <= 1e-8, "case {case}: Laplacian row {i} sums to {s}");
        }

        let mut pts = Array2::<f64>::zeros((3, n));
        for v in pts.iter_mut() {
            *v = r.random_range(-5.0..5.0);
        }
        let x = DataMatrix::new(pts).unwrap();
        let k = ge::mds_kernel(&pairwise_sq_dists(&x)).unwrap();
        let k_scale = k.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        for i in 0..n {
            let s: f64 = (0..n).map(|j| k[[i, j]]).sum();
            let rel = s.abs() / k_scale.max(1.0);
            worst = worst.max(rel);
            assert!(rel <= 1e-8, "case {case}: MDS kernel row {i} sums to {s}");
        }

        let mut recon = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            let mut row: Vec<f64> = (0..n)
                .map(|j| if i == j { 0.0 } else { r.random_range(0.0..1.0) })
                .collect();
            let sum: f64 = row.iter().sum();
            if sum <= 0.0 {
                row[(i + 1) % n] = 1.0;
            }
            let sum: f64 = row.iter().sum();
            for v in row.iter_mut() {
                *v /= sum;
            }
            for j in 0..n {
                recon[[i, j]] = row[j];
            }
        }
        let m = ge::lle_m_matrix(&recon).unwrap();
        let m_scale = m.iter().fold(0.0f64, |mx, &v| mx.max(v.abs()));
        for i in 0..n {
            let s: f64 = (0..n).map(|j| m[[i, j]]).sum();
            let rel = s.abs() / m_scale.max(1.0);
            worst = worst.max(rel);
            assert!(rel <= 1e-8, "case {case}: LLE M row {i} sums to {s}");
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 01 row-sum laws: PASS (100 cases x 3 matrices, worst rel {worst:.2e}, {elapsed:?})"
    );
}

/// Criterion 2: spectral component count equals breadth-first traversal
/// count exactly on 100 random graphs with 1–5 planted components (n ≤ 60),
/// < 10 s.
#[test]
fn criterion_02_component_counting() {
    let start = Instant::now();
    let mut r = rng(202);
    for case in 0..100 {
        let blocks = r.random_range(1..=5usize);
        let mut weights_blocks = Vec::new();
        let mut total = 0usize;
        for _ in 0..blocks {
            let size = r.random_range(1..=(60 - (blocks - weights_blocks.len())) .min(12).max(1));
            if total + size > 60 {
                break;
            }
            total += size;
            weights_blocks.push(size);
        }
        while weights_blocks.len() < blocks {
            weights_blocks.push(1);
            total += 1;
        }
        let n = total;
        let mut w = Array2::<f64>::zeros((n, n));
        let mut offset = 0;
        for &size in &weights_blocks {
            // spanning ring plus random chords inside the block
            for i in 0..size {
                let j = (i + 1) % size;
                if size > 1 && i != j {
                    let v: f64 = r.random_range(0.1..1.0);
                    w[[offset + i, offset + j]] = v;
                    w[[offset + j, offset + i]] = v;
                }
            }
            for i in 0..size {
                for j in (i + 1)..size {
                    if r.random_bool(0.3) {
                        let v: f64 = r.random_range(0.1..1.0);
                        w[[offset + i, offset + j]] = v;
                        w[[offset + j, offset + i]] = v;
                    }
                }
            }
            offset += size;
        }
        let g = graph_from(w);
        let spectral = laplacian::count_components_default(&g);
        let traversal = bfs_components(&g);
        assert_eq!(
            spectral, traversal,
            "case {case}: spectral {spectral} vs traversal {traversal}"
        );
        assert_eq!(spectral, weights_blocks.len(), "case {case}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!("ACCEPTANCE 02 component counting: PASS (100 graphs, exact match, {elapsed:?})");
}

/// Criterion 3: the quadratic-form identities `fᵀLf = ½ΣΣw(fᵢ-fⱼ)²` and
/// `uᵀXLXᵀu = ½ΣΣw(uᵀxᵢ-uᵀxⱼ)²` hold within 1e-8 relative on 200 random
/// instances each.
#[test]
fn criterion_03_quadratic_form_identities() {
    let mut r = rng(303);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let n = r.random_range(3..=20usize);
        let g = random_connected_graph(n, &mut r);
        let l = laplacian::unnormalized(&g).unwrap();
        let f: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let fv = Array1::from(f.clone());
        let quad = fv.dot(&l.matrix().dot(&fv));
        let half_sum = 0.5 * double_sum_scalar(&g, &f);
        let rel = (quad - half_sum).abs() / quad.abs().max(1.0);
        worst = worst.max(rel);
        assert!(rel <= 1e-8, "case {case} scalar identity: rel {rel:e}");
    }
    for case in 0..200 {
        let n = r.random_range(3..=15usize);
        let d = r.random_range(2..=5usize);
        let g = random_connected_graph(n, &mut r);
        let l = laplacian::unnormalized(&g).unwrap();
        let mut pts = Array2::<f64>::zeros((d, n));
        for v in pts.iter_mut() {
            *v = r.random_range(-2.0..2.0);
        }
        let u = Array1::from_shape_fn(d, |_| r.random_range(-1.0..1.0));
        let xlx = pts.dot(l.matrix()).dot(&pts.t());
        let quad = u.dot(&xlx.dot(&u));
        let proj = pts.t().dot(&u);
        let mut double_sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                let diff = proj[i] - proj[j];
                double_sum += g.weights()[[i, j]] * diff * diff;
            }
        }
        let rel = (quad - 0.5 * double_sum).abs() / quad.abs().max(1.0);
        worst = worst.max(rel);
        assert!(rel <= 1e-8, "case {case} projected identity: rel {rel:e}");
    }
    println!("ACCEPTANCE 03 quadratic-form identities: PASS (200+200 instances, worst rel {worst:.2e})");
}

/// Criterion 4: against exhaustive bipartition enumeration on 30 random
/// weighted graphs (n ≤ 10), the Fiedler sign split achieves a ratio cut
/// within 1.5× of optimal on at least 27, and is exactly optimal on planted
/// two-block graphs. < 30 s.
#[test]
fn criterion_04_ratio_cut_oracle() {
    let start = Instant::now();
    let mut r = rng(404);
    let mut within = 0usize;
    for _ in 0..30 {
        // random geometric graphs: full RBF adjacency on random planar points
        let n = r.random_range(4..=10usize);
        let mut pts = Array2::<f64>::zeros((2, n));
        for v in pts.iter_mut() {
            *v = r.random_range(-1.5..1.5);
        }
        let x = DataMatrix::new(pts).unwrap();
        let g = build_graph(&x, NeighborhoodSpec::Full, WeightKind::Rbf { sigma_sq: 0.25 })
            .unwrap();
        let (best, _) = brute_force_min_ratio_cut(&g);
        let assignment = cluster::spectral_cluster(&g, 2, EmbeddingVariant::Plain, 0).unwrap();
        let side: Vec<usize> = (0..n).filter(|&i| assignment.labels()[i] == 0).collect();
        let achieved = cluster::ratio_cut(&g, &side).unwrap();
        assert!(achieved >= best - 1e-12, "relaxation beat the exhaustive optimum");
        if achieved <= 1.5 * best + 1e-12 {
            within += 1;
        }
    }
    assert!(within >= 27, "only {within}/30 within 1.5x of optimal");

    // planted two-block graphs: intra weight 1, inter at most 0.1
    for case in 0..10 {
        let half = r.random_range(2..=5usize);
        let n = 2 * half;
        let mut w = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in (i + 1)..n {
                let same = (i < half) == (j < half);
                let v = if same { 1.0 } else { r.random_range(0.01..0.1) };
                w[[i, j]] = v;
                w[[j, i]] = v;
            }
        }
        let g = graph_from(w);
        let (best, _) = brute_force_min_ratio_cut(&g);
        let assignment = cluster::spectral_cluster(&g, 2, EmbeddingVariant::Plain, 0).unwrap();
        let side: Vec<usize> = (0..n).filter(|&i| assignment.labels()[i] == 0).collect();
        let achieved = cluster::ratio_cut(&g, &side).unwrap();
        assert!(
            (achieved - best).abs() <= 1e-10,
            "case {case}: planted blocks not recovered exactly ({achieved} vs {best})"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 04 ratio-cut oracle: PASS ({within}/30 within 1.5x, planted blocks exact, {elapsed:?})"
    );
}

/// Criterion 5: spectral clustering of two moons (n=200, noise 0.05, kNN 10,
/// binary weights) reaches ≥ 0.95 matched accuracy while plain k-means on
/// the raw coordinates stays ≤ 0.90. < 10 s.
#[test]
fn criterion_05_two_moons_end_to_end() {
    let start = Instant::now();
    let (x, truth) = datasets::generate(SyntheticDataset::TwoMoons, 200, 0.05, 7).unwrap();
    let w = build_graph(&x, NeighborhoodSpec::Knn(10), WeightKind::Binary).unwrap();
    assert_eq!(laplacian::count_components_default(&w), 1, "moons graph disconnected");

    let assignment = cluster::spectral_cluster(&w, 2, EmbeddingVariant::Plain, 0).unwrap();
    let spectral_acc = cluster::matching_accuracy(assignment.labels(), &truth, 2);
    assert!(
        spectral_acc >= 0.95,
        "spectral accuracy {spectral_acc} below 0.95"
    );

    let raw_points = x.values().t().to_owned();
    let km = cluster::kmeans(raw_points.view(), 2, 0).unwrap();
    let kmeans_acc = cluster::matching_accuracy(km.labels(), &truth, 2);
    assert!(
        kmeans_acc <= 0.90,
        "raw k-means accuracy {kmeans_acc} above 0.90"
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 05 two-moons clustering: PASS (spectral {spectral_acc:.3} vs k-means {kmeans_acc:.3}, {elapsed:?})"
    );
}

/// Criterion 6: on 50 random connected graphs the generalized eigenpairs of
/// (L, D) and the eigenpairs of the symmetric-normalized kernel satisfy
/// λ = 1 - δ within 1e-8 with D^{1/2}-related eigenvectors (cosine ≥ 1-1e-8
/// after sign alignment).
#[test]
fn criterion_06_le_equivalence_lemma() {
    let mut r = rng(606);
    let mut worst_gap: f64 = 0.0;
    let mut worst_cos: f64 = 1.0;
    for case in 0..50 {
        let n = r.random_range(3..=14usize);
        let g = random_connected_graph(n, &mut r);
        let l = laplacian::unnormalized(&g).unwrap();
        let d = l.degree_matrix();
        let gen = linalg::eig_gen_sym(l.matrix(), &d, SortOrder::Ascending).unwrap();
        let kernel = laplacian::symmetric_normalized_kernel(&g).unwrap();
        let sym = linalg::eig_sym(kernel.matrix(), SortOrder::Descending).unwrap();
        for k in 0..n {
            let gap = (gen.eigenvalues()[k] - (1.0 - sym.eigenvalues()[k])).abs();
            worst_gap = worst_gap.max(gap);
            assert!(gap <= 1e-8, "case {case} pair {k}: |λ-(1-δ)| = {gap:e}");

            let mut u = vec![0.0; n];
            let mut norm = 0.0;
            for i in 0..n {
                u[i] = l.degrees()[i].sqrt() * gen.eigenvectors()[[i, k]];
                norm += u[i] * u[i];
            }
            let norm = norm.sqrt();
            let mut dot = 0.0;
            for i in 0..n {
                dot += (u[i] / norm) * sym.eigenvectors()[[i, k]];
            }
            let cos = dot.abs();
            worst_cos = worst_cos.min(cos);
            assert!(
                cos >= 1.0 - 1e-8,
                "case {case} pair {k}: eigenvector cosine {cos}"
            );
        }
    }
    println!(
        "ACCEPTANCE 06 LE equivalence lemma: PASS (50 graphs, worst |λ-(1-δ)| {worst_gap:.2e}, worst cosine 1-{:.2e})",
        1.0 - worst_cos
    );
}

/// Criterion 7: re-feeding training points reproduces `√δ_k·v_ki` within 5%
/// relative per column; a test point between mirror-symmetric clusters lands
/// on the embedding midpoint within 1e-6.
#[test]
fn criterion_07_out_of_sample_consistency() {
    // three-blob fixture with large degrees so the empirical normalization
    // stays close to the training normalization
    let mut r = rng(707);
    let centers = [(-2.0, 0.0), (2.0, 0.0), (0.0, 2.6)];
    let per = 40;
    let n = per * 3;
    let mut data = Array2::<f64>::zeros((2, n));
    for (b, &(cx, cy)) in centers.iter().enumerate() {
        for i in 0..per {
            let idx = b * per + i;
            data[[0, idx]] = cx + r.random_range(-0.4..0.4);
            data[[1, idx]] = cy + r.random_range(-0.4..0.4);
        }
    }
    let x = DataMatrix::new(data).unwrap();
    let w = build_graph(&x, NeighborhoodSpec::Full, WeightKind::Rbf { sigma_sq: 4.0 }).unwrap();
    let model = eigenmap::fit(&w, &x, 2, LeApproach::DegreeConstrained).unwrap();
    let out = eigenmap::transform(&model, &x).unwrap();
    let mut worst_rel: f64 = 0.0;
    for k in 0..2 {
        let delta = model.kernel_eigenvalues()[k];
        let mut err2 = 0.0;
        let mut ref2 = 0.0;
        for i in 0..n {
            let reference = delta.sqrt() * model.kernel_eigenvectors()[[i, k]];
            let diff = out[[i, k]] - reference;
            err2 += diff * diff;
            ref2 += reference * reference;
        }
        let rel = (err2 / ref2).sqrt();
        worst_rel = worst_rel.max(rel);
        assert!(rel <= 0.05, "column {k}: relative error {rel}");
    }

    // symmetric-configuration midpoint
    let mirror = ndarray::array![
        [-5.0, -5.0, -4.7, 5.0, 5.0, 4.7],
        [0.3, -0.3, 0.0, 0.3, -0.3, 0.0]
    ];
    let xm = DataMatrix::new(mirror).unwrap();
    let wm = build_graph(&xm, NeighborhoodSpec::Full, WeightKind::Rbf { sigma_sq: 4.0 }).unwrap();
    let mm = eigenmap::fit(&wm, &xm, 1, LeApproach::DegreeConstrained).unwrap();
    let midpoint = DataMatrix::new(ndarray::array![[0.0], [0.0]]).unwrap();
    let image = eigenmap::transform(&mm, &midpoint).unwrap();
    let left: f64 = (0..3).map(|i| mm.embedding()[[i, 0]]).sum::<f64>() / 3.0;
    let right: f64 = (3..6).map(|i| mm.embedding()[[i, 0]]).sum::<f64>() / 3.0;
    let gap = (image[[0, 0]] - (left + right) / 2.0).abs();
    assert!(gap < 1e-6, "midpoint deviation {gap:e}");
    println!(
        "ACCEPTANCE 07 out-of-sample consistency: PASS (worst column rel {worst_rel:.4}, midpoint gap {gap:.2e})"
    );
}

/// Independent eigensolver for the PCA oracle: cyclic Jacobi rotations,
/// entirely separate from the production Householder+QL path.
fn jacobi_eigendecomposition(matrix: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = matrix.nrows();
    let mut a = matrix.clone();
    let mut v = Array2::<f64>::eye(n);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(a[[i, j]].abs());
            }
        }
        if off < 1e-13 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[[p, q]].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * a[[p, q]]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let vals: Vec<f64> = (0..n).map(|i| a[[i, i]]).collect();
    (vals, v)
}

/// Criterion 8: the GE configurations match their dedicated modules
/// (principal angles < 1e-6), GE-PCA matches an independent covariance
/// eigensolve, and GE-FDA beats a random direction's Fisher ratio by ≥ 100×.
/// < 20 s.
#[test]
fn criterion_08_ge_specialization_suite() {
    let start = Instant::now();
    let mut r = rng(808);
    let mut pts = Array2::<f64>::zeros((4, 14));
    for v in pts.iter_mut() {
        *v = r.random_range(-2.0..2.0);
    }
    let x = DataMatrix::new(pts).unwrap();
    let w = build_graph(&x, NeighborhoodSpec::Full, WeightKind::Rbf { sigma_sq: 2.0 }).unwrap();
    let p = 2;

    // LE1 / LE2
    let le1 = ge::run_method(
        &MethodConfig::LaplacianEigenmap1,
        GeInputs { graph: Some(&w), ..Default::default() },
        p,
    )
    .unwrap();
    let le1_dedicated = eigenmap::fit(&w, &x, p, LeApproach::Plain).unwrap();
    let a1 = max_principal_angle_sin(&le1.point_rows(), le1_dedicated.embedding());
    assert!(a1 < 1e-6, "LE1 angle {a1:e}");

    let le2 = ge::run_method(
        &MethodConfig::LaplacianEigenmap2,
        GeInputs { graph: Some(&w), ..Default::default() },
        p,
    )
    .unwrap();
    let le2_dedicated = eigenmap::fit(&w, &x, p, LeApproach::DegreeConstrained).unwrap();
    let a2 = max_principal_angle_sin(&le2.point_rows(), le2_dedicated.embedding());
    assert!(a2 < 1e-6, "LE2 angle {a2:e}");

    // LPP / kernel LPP
    let lpp_ge = ge::run_method(
        &MethodConfig::Lpp,
        GeInputs { graph: Some(&w), data: Some(&x), ..Default::default() },
        p,
    )
    .unwrap();
    let lpp_dedicated = lpp::fit(&x, &w, p).unwrap();
    let a3 = match &lpp_ge {
        GeSolution::Linearized { directions, .. } => {
            max_principal_angle_sin(directions, lpp_dedicated.directions())
        }
        other => panic!("unexpected solution {other:?}"),
    };
    assert!(a3 < 1e-6, "LPP angle {a3:e}");

    let kernel = x.values().t().dot(x.values());
    let klpp_ge = ge::run_method(
        &MethodConfig::KernelLpp,
        GeInputs { graph: Some(&w), kernel: Some(&kernel), ..Default::default() },
        p,
    )
    .unwrap();
    let klpp_dedicated = lpp::fit_kernel(&kernel, &w, p).unwrap();
    let a4 = match &klpp_ge {
        GeSolution::Kernelized { coefficients, .. } => {
            max_principal_angle_sin(coefficients, klpp_dedicated.coefficients())
        }
        other => panic!("unexpected solution {other:?}"),
    };
    assert!(a4 < 1e-6, "kernel LPP angle {a4:e}");

    // PCA vs an independent covariance eigensolve (cyclic Jacobi)
    let mut centered = Array2::<f64>::zeros((3, 30));
    for v in centered.iter_mut() {
        *v = r.random_range(-3.0..3.0);
    }
    for dim in 0..3 {
        let mean: f64 = (0..30).map(|i| centered[[dim, i]]).sum::<f64>() / 30.0;
        for i in 0..30 {
            centered[[dim, i]] -= mean;
        }
    }
    let xc = DataMatrix::new(centered.clone()).unwrap();
    let pca = ge::run_method(
        &MethodConfig::Pca,
        GeInputs { data: Some(&xc), ..Default::default() },
        p,
    )
    .unwrap();
    let covariance = centered.dot(&centered.t());
    let (vals, vecs) = jacobi_eigendecomposition(&covariance);
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    let mut oracle = Array2::<f64>::zeros((3, p));
    for (out, &idx) in order.iter().take(p).enumerate() {
        for i in 0..3 {
            oracle[[i, out]] = vecs[[i, idx]];
        }
    }
    let a5 = match &pca {
        GeSolution::Linearized { directions, .. } => max_principal_angle_sin(directions, &oracle),
        other => panic!("unexpected solution {other:?}"),
    };
    assert!(a5 < 1e-6, "PCA vs Jacobi oracle angle {a5:e}");

    // FDA on two separated labeled blobs with anisotropic nuisance variance
    let nf = 60;
    let mut fda_data = Array2::<f64>::zeros((2, nf));
    let mut labels = vec![0usize; nf];
    for i in 0..nf {
        let class = usize::from(i >= nf / 2);
        labels[i] = class;
        fda_data[[0, i]] = if class == 0 { -5.0 } else { 5.0 } + r.random_range(-0.2..0.2);
        fda_data[[1, i]] = r.random_range(-5.0..5.0);
    }
    for dim in 0..2 {
        let mean: f64 = (0..nf).map(|i| fda_data[[dim, i]]).sum::<f64>() / nf as f64;
        for i in 0..nf {
            fda_data[[dim, i]] -= mean;
        }
    }
    let xf = DataMatrix::new(fda_data.clone()).unwrap();
    let fda = ge::run_method(
        &MethodConfig::Fda { labels: labels.clone() },
        GeInputs { data: Some(&xf), ..Default::default() },
        1,
    )
    .unwrap();
    let y_fda = match &fda {
        GeSolution::Linearized { embedding, .. } => embedding.clone(),
        other => panic!("unexpected solution {other:?}"),
    };
    let angle: f64 = r.random_range(0.0..std::f64::consts::TAU);
    let random_dir = [angle.cos(), angle.sin()];
    let mut y_rand = Array2::<f64>::zeros((1, nf));
    for i in 0..nf {
        y_rand[[0, i]] = random_dir[0] * fda_data[[0, i]] + random_dir[1] * fda_data[[1, i]];
    }
    let ratio_fda = fisher_ratio(&y_fda, &labels);
    let ratio_rand = fisher_ratio(&y_rand, &labels);
    assert!(
        ratio_fda >= 100.0 * ratio_rand,
        "FDA ratio {ratio_fda} vs random-direction ratio {ratio_rand}"
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 20.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 08 GE specializations: PASS (angles {a1:.1e}/{a2:.1e}/{a3:.1e}/{a4:.1e}, PCA {a5:.1e}, FDA {ratio_fda:.0}x vs {ratio_rand:.2}x, {elapsed:?})"
    );
}

fn fisher_ratio(y: &Array2<f64>, labels: &[usize]) -> f64 {
    let n = labels.len();
    let classes = labels.iter().copied().max().unwrap() + 1;
    let grand: f64 = (0..n).map(|i| y[[0, i]]).sum::<f64>() / n as f64;
    let mut between = 0.0;
    let mut within = 0.0;
    for c in 0..classes {
        let members: Vec<usize> = (0..n).filter(|&i| labels[i] == c).collect();
        let mean: f64 = members.iter().map(|&i| y[[0, i]]).sum::<f64>() / members.len() as f64;
        between += members.len() as f64 * (mean - grand) * (mean - grand);
        for &i in &members {
            within += (y[[0, i]] - mean) * (y[[0, i]] - mean);
        }
    }
    between / within.max(1e-300)
}

/// Criterion 9: probability-form and spectral-form diffusion distances agree
/// within 1e-8 relative on 50 random connected graphs (n ≤ 12, t ∈
/// {1,2,4,8}); the p-truncated spectral distance equals the embedding
/// distance within 1e-10.
#[test]
fn criterion_09_diffusion_theorem_oracle() {
    let mut r = rng(909);
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let n = r.random_range(3..=12usize);
        let g = random_connected_graph(n, &mut r);
        let model = diffusion::diffusion_operator(&g, 0.5).unwrap();
        for &t in &[1u64, 2, 4, 8] {
            for i in 0..n {
                for j in (i + 1)..n {
                    let a = model.distance(i, j, t, DistanceForm::Probability).unwrap();
                    let b = model.distance(i, j, t, DistanceForm::Spectral).unwrap();
                    let rel = (a - b).abs() / a.abs().max(1.0);
                    worst = worst.max(rel);
                    assert!(rel <= 1e-8, "case {case} t={t} ({i},{j}): {a} vs {b}");
                }
            }
        }

        let p = (n - 1).min(3);
        let t = 3u64;
        let emb = model.embed(t, p).unwrap();
        for i in 0..n {
            for j in 0..n {
                let mut truncated = 0.0;
                for k in 0..p {
                    let lambda: f64 = model.eigenvalues()[k + 1];
                    let scale = lambda.powi(t as i32);
                    let diff = model.right_eigenvectors()[[i, k + 1]]
                        - model.right_eigenvectors()[[j, k + 1]];
                    truncated += scale * scale * diff * diff;
                }
                let truncated = truncated.sqrt();
                let mut emb_dist = 0.0;
                for k in 0..p {
                    let diff = emb[[i, k]] - emb[[j, k]];
                    emb_dist += diff * diff;
                }
                let emb_dist = emb_dist.sqrt();
                assert!(
                    (truncated - emb_dist).abs() <= 1e-10,
                    "case {case} ({i},{j}): truncated {truncated} vs embedding {emb_dist}"
                );
            }
        }
    }
    println!("ACCEPTANCE 09 diffusion distance theorem: PASS (50 graphs, worst rel {worst:.2e})");
}

/// Digest of a representative pipeline battery: every method family runs and
/// contributes its raw output bits.
fn pipeline_digest() -> Vec<u64> {
    let (x, _) = datasets::generate(SyntheticDataset::TwoMoons, 80, 0.05, 3).unwrap();
    let w = build_graph(&x, NeighborhoodSpec::Knn(8), WeightKind::Rbf { sigma_sq: 1.0 }).unwrap();
    let mut digest: Vec<u64> = Vec::new();
    let mut push = |m: &Array2<f64>| {
        for v in m.iter() {
            digest.push(v.to_bits());
        }
    };

    push(w.weights());
    let embedding = cluster::spectral_embed(&w, 2, EmbeddingVariant::Plain).unwrap();
    push(embedding.coordinates());
    let le = eigenmap::fit(&w, &x, 2, LeApproach::DegreeConstrained).unwrap();
    push(le.embedding());
    let (test, _) = datasets::generate(SyntheticDataset::TwoMoons, 10, 0.05, 5).unwrap();
    push(&eigenmap::transform(&le, &test).unwrap());
    let lpp_model = lpp::fit(&x, &w, 2).unwrap();
    push(&lpp_model.embed(&x).unwrap());
    let mds = ge::run_method(
        &MethodConfig::MdsIsomap { squared_distances: None },
        GeInputs { data: Some(&x), ..Default::default() },
        2,
    )
    .unwrap();
    push(&mds.point_rows());
    let diff = diffusion::diffusion_operator(&w, 0.5).unwrap();
    push(&diff.embed(2, 2).unwrap());
    push(&diff.transition_probabilities(4));

    let assignment =
        cluster::spectral_cluster_with(&w, 2, EmbeddingVariant::Plain, 11, TwoClusterRule::KMeans)
            .unwrap();
    for &l in assignment.labels() {
        digest.push(l as u64);
    }
    digest
}

/// Criterion 10: the pipeline battery produces bit-identical outputs across
/// repeated runs and across thread-pool sizes 1 and max.
#[test]
fn criterion_10_determinism() {
    let first = pipeline_digest();
    let second = pipeline_digest();
    assert_eq!(first, second, "repeated runs diverged");

    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(pipeline_digest);
    let max_threads = std::thread::available_parallelism().map_or(4, |v| v.get());
    let many = rayon::ThreadPoolBuilder::new()
        .num_threads(max_threads)
        .build()
        .unwrap()
        .install(pipeline_digest);
    assert_eq!(first, single, "single-thread run diverged");
    assert_eq!(first, many, "{max_threads}-thread run diverged");
    println!(
        "ACCEPTANCE 10 determinism: PASS (bit-identical across 2 runs and thread counts 1 and {max_threads})"
    );
}
