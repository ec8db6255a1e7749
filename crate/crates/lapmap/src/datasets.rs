//! Synthetic manifold-learning fixtures: two moons, Gaussian blobs, the
//! swiss roll, and the S-curve. Deterministic for a given seed.

use std::str::FromStr;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::graph::DataMatrix;

/// Number of arc-length quantile bins used to label the roll datasets.
pub const ROLL_LABEL_BINS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticDataset {
    /// Two interleaved half-circles in 2-D; labels are the moon index.
    TwoMoons,
    /// Two isotropic Gaussian blobs centered at ±(5, 5); labels are the
    /// blob index.
    Blobs,
    /// The classic 3-D spiral sheet; labels are arc-length quantiles.
    SwissRoll,
    /// The 3-D S-shaped sheet; labels are arc-length quantiles.
    SCurve,
}

impl FromStr for SyntheticDataset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two_moons" => Ok(SyntheticDataset::TwoMoons),
            "blobs" => Ok(SyntheticDataset::Blobs),
            "swiss_roll" => Ok(SyntheticDataset::SwissRoll),
            "s_curve" => Ok(SyntheticDataset::SCurve),
            other => Err(Error::UnknownDataset(other.to_string())),
        }
    }
}

impl SyntheticDataset {
    pub fn name(&self) -> &'static str {
        match self {
            SyntheticDataset::TwoMoons => "two_moons",
            SyntheticDataset::Blobs => "blobs",
            SyntheticDataset::SwissRoll => "swiss_roll",
            SyntheticDataset::SCurve => "s_curve",
        }
    }
}

/// Generates `n` points of the chosen dataset with Gaussian noise of the
/// given standard deviation, plus ground-truth labels.
pub fn generate(
    dataset: SyntheticDataset,
    n: usize,
    noise: f64,
    seed: u64,
) -> Result<(DataMatrix, Vec<usize>)> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!(
            "dataset needs at least 4 samples, got {n}"
        )));
    }
    if !(noise >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise must be >= 0, got {noise}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut values, labels) = match dataset {
        SyntheticDataset::TwoMoons => two_moons(n),
        SyntheticDataset::Blobs => blobs(n),
        SyntheticDataset::SwissRoll => swiss_roll(n, &mut rng),
        SyntheticDataset::SCurve => s_curve(n, &mut rng),
    };
    if noise > 0.0 {
        let normal = Normal::new(0.0, noise).expect("validated noise");
        for v in values.iter_mut() {
            *v += normal.sample(&mut rng);
        }
    }
    Ok((DataMatrix::new(values)?, labels))
}

fn two_moons(n: usize) -> (Array2<f64>, Vec<usize>) {
    let n_outer = n / 2;
    let n_inner = n - n_outer;
    let mut values = Array2::<f64>::zeros((2, n));
    let mut labels = Vec::with_capacity(n);
    for (k, theta) in linspace(0.0, std::f64::consts::PI, n_outer).enumerate() {
        values[[0, k]] = theta.cos();
        values[[1, k]] = theta.sin();
        labels.push(0);
    }
    for (k, theta) in linspace(0.0, std::f64::consts::PI, n_inner).enumerate() {
        values[[0, n_outer + k]] = 1.0 - theta.cos();
        values[[1, n_outer + k]] = 0.5 - theta.sin();
        labels.push(1);
    }
    (values, labels)
}

fn blobs(n: usize) -> (Array2<f64>, Vec<usize>) {
    let first = n.div_ceil(2);
    let mut values = Array2::<f64>::zeros((2, n));
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let (center, label) = if i < first { (5.0, 0) } else { (-5.0, 1) };
        values[[0, i]] = center;
        values[[1, i]] = center;
        labels.push(label);
    }
    (values, labels)
}

fn swiss_roll(n: usize, rng: &mut ChaCha8Rng) -> (Array2<f64>, Vec<usize>) {
    let mut values = Array2::<f64>::zeros((3, n));
    let mut arc = Vec::with_capacity(n);
    for i in 0..n {
        let phi: f64 = rng.random::<f64>();
        let t = 1.5 * std::f64::consts::PI * (1.0 + 2.0 * phi);
        let height: f64 = 21.0 * rng.random::<f64>();
        values[[0, i]] = t * t.cos();
        values[[1, i]] = height;
        values[[2, i]] = t * t.sin();
        arc.push(t);
    }
    (values, quantile_labels(&arc))
}

fn s_curve(n: usize, rng: &mut ChaCha8Rng) -> (Array2<f64>, Vec<usize>) {
    let mut values = Array2::<f64>::zeros((3, n));
    let mut arc = Vec::with_capacity(n);
    for i in 0..n {
        let phi: f64 = rng.random::<f64>();
        let t = 3.0 * std::f64::consts::PI * (phi - 0.5);
        let height: f64 = 2.0 * rng.random::<f64>();
        values[[0, i]] = t.sin();
        values[[1, i]] = height;
        values[[2, i]] = t.signum() * (t.cos() - 1.0);
        arc.push(t);
    }
    (values, quantile_labels(&arc))
}

/// Rank-based quantile bins over the arc-length parameter.
fn quantile_labels(arc: &[f64]) -> Vec<usize> {
    let n = arc.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| arc[a].total_cmp(&arc[b]).then(a.cmp(&b)));
    let mut labels = vec![0usize; n];
    for (rank, &idx) in order.iter().enumerate() {
        labels[idx] = (rank * ROLL_LABEL_BINS / n).min(ROLL_LABEL_BINS - 1);
    }
    labels
}

fn linspace(start: f64, end: f64, count: usize) -> impl Iterator<Item = f64> {
    let step = if count > 1 {
        (end - start) / (count - 1) as f64
    } else {
        0.0
    };
    (0..count).map(move |i| start + step * i as f64)
}
