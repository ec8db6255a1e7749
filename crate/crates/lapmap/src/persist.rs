//! Versioned flat-file persistence for fitted models.
//!
//! One self-describing JSON format covers the Laplacian-eigenmap model and
//! both LPP models: an envelope with a format tag and version number, then a
//! kind-tagged payload holding dimensions, kernel parameters, degrees, the
//! kernel spectrum, eigenvector matrices, the training embedding, and — for
//! the eigenmap model — the training points themselves, without which no
//! out-of-sample kernel could ever be evaluated against the model.
//!
//! Floats are written in shortest round-trip decimal form, so a save/load
//! cycle reproduces every value bit-exactly.

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::eigenmap::{EmbeddingModel, KernelParams, LeApproach};
use crate::error::{Error, Result};
use crate::graph::DataMatrix;
use crate::linalg::{EigenBasis, ProblemKind, SortOrder};
use crate::lpp::{KernelProjectionModel, ProjectionModel};

const FORMAT_TAG: &str = "lapmap-model";
const FORMAT_VERSION: u32 = 1;

/// A model loaded back from disk.
#[derive(Debug, Clone)]
pub enum ModelFile {
    Embedding(EmbeddingModel),
    Projection(ProjectionModel),
    KernelProjection(KernelProjectionModel),
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    format: String,
    version: u32,
    model: StoredModel,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum StoredModel {
    LaplacianEigenmap {
        sample_count: usize,
        feature_dim: usize,
        dims: usize,
        approach: LeApproach,
        kernel_params: KernelParams,
        train_degrees: Array1<f64>,
        kernel_eigenvalues: Vec<f64>,
        kernel_eigenvectors: Array2<f64>,
        basis_eigenvalues: Vec<f64>,
        basis_eigenvectors: Array2<f64>,
        basis_generalized: bool,
        embedding: Array2<f64>,
        training_points: DataMatrix,
    },
    LppProjection {
        feature_dim: usize,
        dims: usize,
        directions: Array2<f64>,
        generalized_eigenvalues: Vec<f64>,
        ridge_used: f64,
    },
    KernelLppProjection {
        sample_count: usize,
        dims: usize,
        coefficients: Array2<f64>,
        training_kernel: Array2<f64>,
        generalized_eigenvalues: Vec<f64>,
        ridge_used: f64,
    },
}

/// Writes an eigenmap model to `path` as versioned JSON.
pub fn save_embedding_model(model: &EmbeddingModel, path: &Path) -> Result<()> {
    let stored = StoredModel::LaplacianEigenmap {
        sample_count: model.sample_count(),
        feature_dim: model.training_points().feature_dim(),
        dims: model.dims(),
        approach: model.approach(),
        kernel_params: model.kernel_params().clone(),
        train_degrees: model.train_degrees().clone(),
        kernel_eigenvalues: model.kernel_eigenvalues().to_vec(),
        kernel_eigenvectors: model.kernel_eigenvectors().clone(),
        basis_eigenvalues: model.basis().eigenvalues().to_vec(),
        basis_eigenvectors: model.basis().eigenvectors().clone(),
        basis_generalized: model.basis().problem() == ProblemKind::Generalized,
        embedding: model.embedding().clone(),
        training_points: model.training_points().clone(),
    };
    write_envelope(stored, path)
}

/// Writes an LPP projection model to `path`.
pub fn save_projection_model(model: &ProjectionModel, path: &Path) -> Result<()> {
    let stored = StoredModel::LppProjection {
        feature_dim: model.feature_dim(),
        dims: model.dims(),
        directions: model.directions().clone(),
        generalized_eigenvalues: model.generalized_eigenvalues().to_vec(),
        ridge_used: model.ridge_used(),
    };
    write_envelope(stored, path)
}

/// Writes a kernel-LPP model to `path`.
pub fn save_kernel_projection_model(model: &KernelProjectionModel, path: &Path) -> Result<()> {
    let stored = StoredModel::KernelLppProjection {
        sample_count: model.training_kernel().nrows(),
        dims: model.dims(),
        coefficients: model.coefficients().clone(),
        training_kernel: model.training_kernel().clone(),
        generalized_eigenvalues: model.generalized_eigenvalues().to_vec(),
        ridge_used: model.ridge_used(),
    };
    write_envelope(stored, path)
}

/// Loads any model kind previously written by the save functions.
pub fn load_model(path: &Path) -> Result<ModelFile> {
    let text = fs::read_to_string(path)?;
    let envelope: Envelope = serde_json::from_str(&text)
        .map_err(|e| Error::PersistenceFormat(format!("malformed model file: {e}")))?;
    if envelope.format != FORMAT_TAG {
        return Err(Error::PersistenceFormat(format!(
            "unexpected format tag {:?}",
            envelope.format
        )));
    }
    if envelope.version != FORMAT_VERSION {
        return Err(Error::PersistenceFormat(format!(
            "unsupported version {} (supported: {FORMAT_VERSION})",
            envelope.version
        )));
    }
    match envelope.model {
        StoredModel::LaplacianEigenmap {
            sample_count,
            feature_dim,
            dims,
            approach,
            kernel_params,
            train_degrees,
            kernel_eigenvalues,
            kernel_eigenvectors,
            basis_eigenvalues,
            basis_eigenvectors,
            basis_generalized,
            embedding,
            training_points,
        } => {
            if training_points.sample_count() != sample_count
                || training_points.feature_dim() != feature_dim
                || embedding.dim() != (sample_count, dims)
                || kernel_eigenvectors.dim() != (sample_count, dims)
                || kernel_eigenvalues.len() != dims
            {
                return Err(Error::PersistenceFormat(
                    "inconsistent dimensions in stored eigenmap model".into(),
                ));
            }
            let problem = if basis_generalized {
                ProblemKind::Generalized
            } else {
                ProblemKind::Standard
            };
            let basis = EigenBasis::from_raw_parts(
                basis_eigenvalues,
                basis_eigenvectors,
                SortOrder::Ascending,
                problem,
            )?;
            Ok(ModelFile::Embedding(EmbeddingModel::from_parts(
                training_points,
                embedding,
                basis,
                kernel_eigenvalues,
                kernel_eigenvectors,
                train_degrees,
                approach,
                kernel_params,
            )))
        }
        StoredModel::LppProjection {
            feature_dim,
            dims,
            directions,
            generalized_eigenvalues,
            ridge_used,
        } => {
            if directions.dim() != (feature_dim, dims)
                || generalized_eigenvalues.len() != dims
            {
                return Err(Error::PersistenceFormat(
                    "inconsistent dimensions in stored projection model".into(),
                ));
            }
            Ok(ModelFile::Projection(ProjectionModel::from_parts(
                directions,
                generalized_eigenvalues,
                ridge_used,
            )))
        }
        StoredModel::KernelLppProjection {
            sample_count,
            dims,
            coefficients,
            training_kernel,
            generalized_eigenvalues,
            ridge_used,
        } => {
            if coefficients.dim() != (sample_count, dims)
                || training_kernel.dim() != (sample_count, sample_count)
                || generalized_eigenvalues.len() != dims
            {
                return Err(Error::PersistenceFormat(
                    "inconsistent dimensions in stored kernel projection model".into(),
                ));
            }
            Ok(ModelFile::KernelProjection(KernelProjectionModel::from_parts(
                coefficients,
                training_kernel,
                generalized_eigenvalues,
                ridge_used,
            )))
        }
    }
}

fn write_envelope(model: StoredModel, path: &Path) -> Result<()> {
    let envelope = Envelope {
        format: FORMAT_TAG.to_string(),
        version: FORMAT_VERSION,
        model,
    };
    let text = serde_json::to_string_pretty(&envelope)
        .map_err(|e| Error::PersistenceFormat(format!("serialization failed: {e}")))?;
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenmap;
    use crate::graph::{build_graph, NeighborhoodSpec, WeightKind};
    use crate::lpp;
    use crate::testutil::{random_data, rng};

    fn bits_equal(a: &Array2<f64>, b: &Array2<f64>) -> bool {
        a.dim() == b.dim()
            && a.iter()
                .zip(b.iter())
                .all(|(x, y)| x.to_bits() == y.to_bits())
    }

    #[test]
    fn embedding_model_round_trips_bit_exactly() {
        let mut r = rng(1);
        let x = random_data(3, 10, &mut r);
        let w = build_graph(&x, NeighborhoodSpec::Full, WeightKind::Rbf { sigma_sq: 2.0 })
            .unwrap();
        let model = eigenmap::fit(&w, &x, 2, eigenmap::LeApproach::DegreeConstrained).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_embedding_model(&model, &path).unwrap();
        let loaded = match load_model(&path).unwrap() {
            ModelFile::Embedding(m) => m,
            other => panic!("wrong kind: {other:?}"),
        };

        assert!(bits_equal(model.embedding(), loaded.embedding()));
        assert!(bits_equal(model.kernel_eigenvectors(), loaded.kernel_eigenvectors()));
        assert!(bits_equal(
            model.training_points().values(),
            loaded.training_points().values()
        ));
        assert!(bits_equal(
            model.basis().eigenvectors(),
            loaded.basis().eigenvectors()
        ));
        for (a, b) in model
            .kernel_eigenvalues()
            .iter()
            .zip(loaded.kernel_eigenvalues())
        {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in model.train_degrees().iter().zip(loaded.train_degrees()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(model.approach(), loaded.approach());
        assert_eq!(model.kernel_params(), loaded.kernel_params());

        // the loaded model transforms identically
        let test = random_data(3, 3, &mut r);
        let a = eigenmap::transform(&model, &test).unwrap();
        let b = eigenmap::transform(&loaded, &test).unwrap();
        assert!(bits_equal(&a, &b));
    }

    #[test]
    fn projection_models_round_trip() {
        let mut r = rng(2);
        let x = random_data(4, 9, &mut r);
        let w = build_graph(&x, NeighborhoodSpec::Full, WeightKind::Rbf { sigma_sq: 2.0 })
            .unwrap();
        let dir = tempfile::tempdir().unwrap();

        let plain = lpp::fit(&x, &w, 2).unwrap();
        let path = dir.path().join("lpp.json");
        save_projection_model(&plain, &path).unwrap();
        match load_model(&path).unwrap() {
            ModelFile::Projection(m) => {
                assert!(bits_equal(plain.directions(), m.directions()));
                assert_eq!(plain.ridge_used().to_bits(), m.ridge_used().to_bits());
            }
            other => panic!("wrong kind: {other:?}"),
        }

        let kernel = x.values().t().dot(x.values());
        let kmodel = lpp::fit_kernel(&kernel, &w, 2).unwrap();
        let kpath = dir.path().join("klpp.json");
        save_kernel_projection_model(&kmodel, &kpath).unwrap();
        match load_model(&kpath).unwrap() {
            ModelFile::KernelProjection(m) => {
                assert!(bits_equal(kmodel.coefficients(), m.coefficients()));
                assert!(bits_equal(kmodel.training_kernel(), m.training_kernel()));
            }
            other => panic!("wrong kind: {other:?}"),
        }
    }

    #[test]
    fn rejects_foreign_and_future_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, "{\"format\":\"something-else\",\"version\":1,\"model\":null}")
            .unwrap();
        assert!(matches!(
            load_model(&path),
            Err(Error::PersistenceFormat(_))
        ));
        std::fs::write(&path, "not json at all").unwrap();
        assert!(matches!(
            load_model(&path),
            Err(Error::PersistenceFormat(_))
        ));
    }
}
