//! Initial fields: the Gaussian tumour bump, uniform random tissue, and
//! structured fixtures for invariant experiments.
//!
//! Random tissue uses ChaCha8 (`rand_chacha`) seeded through
//! `SeedableRng::seed_from_u64`, drawing one `Open01` `f64` per cell in cell
//! order. The same seed and mesh always give the same field.

use std::path::PathBuf;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::FileError;
use crate::mesh::TriMesh;
use crate::scalar::Scalar;
use crate::state::CellField;

#[derive(Debug, Error)]
pub enum InitError {
    #[error("invalid initial-condition spec: {0}")]
    Invalid(String),
    #[error("field file has {found} values, mesh has {expected} cells")]
    CellCount { found: usize, expected: usize },
    #[error(transparent)]
    File(#[from] FileError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitSpec {
    /// `exp(-|x - center|^2 / (2 width^2))` at cell centroids.
    GaussianC {
        center: [f64; 2],
        width: f64,
    },
    /// Independent `U(0, 1)` samples per cell.
    UniformRandomV {
        seed: u64,
    },
    Constant {
        value: f64,
    },
    /// Zero on the annulus `inner <= |x - center| <= outer`, `value` elsewhere.
    AnnularGapV {
        center: [f64; 2],
        inner: f64,
        outer: f64,
        value: f64,
    },
    /// One value per line, in mesh cell order.
    FromFile {
        path: PathBuf,
    },
}

impl InitSpec {
    /// Gaussian bump of width 0.08 centred in the unit square.
    pub fn reference_c() -> Self {
        InitSpec::GaussianC {
            center: [0.5, 0.5],
            width: 0.08,
        }
    }

    pub fn validate(&self) -> Result<(), InitError> {
        match self {
            InitSpec::GaussianC { width, .. } if !(*width > 0.0) => Err(InitError::Invalid(
                format!("gaussian width must be positive, got {width}"),
            )),
            InitSpec::AnnularGapV { inner, outer, .. } if !(0.0 <= *inner && inner < outer) => {
                Err(InitError::Invalid(format!(
                    "annulus radii must satisfy 0 <= inner < outer, got {inner}, {outer}"
                )))
            }
            _ => Ok(()),
        }
    }
}

pub fn build_field<T: Scalar>(
    mesh: &TriMesh<T>,
    spec: &InitSpec,
) -> Result<CellField<T>, InitError> {
    spec.validate()?;
    let values: Vec<T> = match spec {
        InitSpec::GaussianC { center, width } => {
            let (cx, cy) = (T::lit(center[0]), T::lit(center[1]));
            let denom = T::lit(2.0 * width * width);
            mesh.cell_centroids()
                .iter()
                .map(|p| {
                    let (dx, dy) = (p[0] - cx, p[1] - cy);
                    (-(dx * dx + dy * dy) / denom).exp()
                })
                .collect()
        }
        InitSpec::UniformRandomV { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..mesh.n_cells())
                .map(|_| T::lit(rng.sample::<f64, _>(Open01)))
                .collect()
        }
        InitSpec::Constant { value } => vec![T::lit(*value); mesh.n_cells()],
        InitSpec::AnnularGapV {
            center,
            inner,
            outer,
            value,
        } => {
            let (cx, cy) = (T::lit(center[0]), T::lit(center[1]));
            let (r0, r1) = (T::lit(*inner), T::lit(*outer));
            mesh.cell_centroids()
                .iter()
                .map(|p| {
                    let r = (p[0] - cx).hypot(p[1] - cy);
                    if r >= r0 && r <= r1 {
                        T::zero()
                    } else {
                        T::lit(*value)
                    }
                })
                .collect()
        }
        InitSpec::FromFile { path } => {
            let raw = crate::simio::field_file::load_field(path)?;
            if raw.len() != mesh.n_cells() {
                return Err(InitError::CellCount {
                    found: raw.len(),
                    expected: mesh.n_cells(),
                });
            }
            raw.into_iter().map(T::lit).collect()
        }
    };
    Ok(values.into())
}
