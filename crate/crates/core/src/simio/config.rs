//! Run configuration files (TOML, unknown keys rejected).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::initial_conditions::InitSpec;
use crate::model::ModelParams;
use crate::solver::{EdgeAveraging, GradientScheme};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "HAPTOFV_OUT_DIR";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("invalid config field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    /// Target edge length of a generated mesh.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_relaxation_iters")]
    pub relaxation_iters: usize,
    /// Mesh file to load instead of generating.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

fn default_relaxation_iters() -> usize {
    2000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub c: InitSpec,
    pub v: InitSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DtMode {
    Adaptive { cfl_safety: f64 },
    Fixed { dt: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
    pub dt: DtMode,
    #[serde(default = "default_dt_max")]
    pub dt_max: f64,
}

fn default_dt_max() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_gradient")]
    pub gradient: GradientScheme,
    #[serde(default)]
    pub diffusion_averaging: EdgeAveraging,
}

fn default_gradient() -> GradientScheme {
    GradientScheme::TwoPoint
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gradient: default_gradient(),
            diffusion_averaging: EdgeAveraging::Arithmetic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default = "default_c_tol")]
    pub c_tol: f64,
    /// Reference point for the front radius.
    #[serde(default = "default_center")]
    pub center: [f64; 2],
}

fn default_c_tol() -> f64 {
    1e-6
}

fn default_center() -> [f64; 2] {
    [0.5, 0.5]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            c_tol: default_c_tol(),
            center: default_center(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mesh: MeshConfig,
    pub model: ModelParams<f64>,
    pub initial: InitialConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(0);
            ConfigError::Parse {
                path: path.into(),
                line,
                msg: e.message().to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn save(&self, path: &Path) -> Result<(), ConfigError> {
        fs::write(path, self.to_toml_string()).map_err(|source| ConfigError::Io {
            path: path.into(),
            source,
        })
    }

    /// Makes relative file references relative to `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(f) = self.mesh.file.as_mut() {
            fix(f);
        }
        for spec in [&mut self.initial.c, &mut self.initial.v] {
            if let InitSpec::FromFile { path } = spec {
                fix(path);
            }
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match (&self.mesh.h, &self.mesh.file) {
            (Some(_), Some(_)) => {
                return Err(invalid("mesh", "`h` and `file` are mutually exclusive"))
            }
            (None, None) => return Err(invalid("mesh", "one of `h` or `file` is required")),
            (Some(h), None) if !(*h > 0.0 && *h <= 0.5) => {
                return Err(invalid("mesh.h", format!("must lie in (0, 0.5], got {h}")))
            }
            _ => {}
        }
        self.model
            .validate()
            .map_err(|e| invalid("model", e.to_string()))?;
        self.initial
            .c
            .validate()
            .map_err(|e| invalid("initial.c", e.to_string()))?;
        self.initial
            .v
            .validate()
            .map_err(|e| invalid("initial.v", e.to_string()))?;
        let t = &self.time;
        if !(t.t_end >= 0.0 && t.t_end.is_finite()) {
            return Err(invalid(
                "time.t_end",
                format!("must be finite and >= 0, got {}", t.t_end),
            ));
        }
        if t.snapshot_times.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(invalid("time.snapshot_times", "must be sorted ascending"));
        }
        if let Some(&bad) = t
            .snapshot_times
            .iter()
            .find(|&&s| !(0.0..=t.t_end).contains(&s))
        {
            return Err(invalid(
                "time.snapshot_times",
                format!("{bad} outside [0, t_end = {}]", t.t_end),
            ));
        }
        match t.dt {
            DtMode::Adaptive { cfl_safety } if !(cfl_safety > 0.0 && cfl_safety <= 1.0) => {
                return Err(invalid(
                    "time.dt.cfl_safety",
                    format!("must lie in (0, 1], got {cfl_safety}"),
                ))
            }
            DtMode::Fixed { dt } if !(dt > 0.0) => {
                return Err(invalid("time.dt.dt", format!("must be positive, got {dt}")))
            }
            _ => {}
        }
        if !(t.dt_max > 0.0) {
            return Err(invalid("time.dt_max", "must be positive"));
        }
        if !(self.output.c_tol >= 0.0) {
            return Err(invalid("output.c_tol", "must be >= 0"));
        }
        Ok(())
    }

    /// Output directory: explicit override, then the config, then
    /// `$HAPTOFV_OUT_DIR`, then `./out`.
    pub fn output_dir(&self, override_dir: Option<&Path>) -> PathBuf {
        override_dir
            .map(Path::to_path_buf)
            .or_else(|| self.output.dir.clone())
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

/// Reads, validates and path-resolves a config file.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.into(),
        source,
    })?;
    let mut cfg = RunConfig::from_toml_str(&text, path)?;
    cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
    Ok(cfg)
}
