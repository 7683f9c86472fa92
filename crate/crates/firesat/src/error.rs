use std::path::PathBuf;

use firesat_core::constellation::ConstellationError;
use firesat_core::coverage::CoverageError;
use firesat_core::edgesim::EdgeError;
use firesat_core::firedetect::FireError;
use firesat_core::kepler::KeplerError;
use firesat_core::optimizer::FitnessError;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("fixture missing or unreadable: {}", path.display())]
    FixtureMissing { path: PathBuf },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("scene file: {0}")]
    SceneFormat(String),
    #[error("output directory {} is locked by another run", .0.display())]
    Locked(PathBuf),
    #[error(transparent)]
    Kepler(#[from] KeplerError),
    #[error(transparent)]
    Constellation(#[from] ConstellationError),
    #[error(transparent)]
    Coverage(#[from] CoverageError),
    #[error(transparent)]
    Fire(#[from] FireError),
    #[error(transparent)]
    Edge(#[from] EdgeError),
    #[error("optimizer: {0}")]
    Optimizer(String),
}

impl From<FitnessError> for AppError {
    fn from(e: FitnessError) -> Self {
        match e {
            FitnessError::Constellation(e) => e.into(),
            FitnessError::Coverage(e) => e.into(),
        }
    }
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }

    /// Stable machine-readable error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            AppError::FixtureMissing { .. } => "fixture_missing",
            AppError::Io { .. } => "io",
            AppError::Parse { .. } => "parse",
            AppError::Config(_) => "config",
            AppError::SceneFormat(_) => "scene_format",
            AppError::Locked(_) => "locked",
            AppError::Kepler(_) => "kepler",
            AppError::Constellation(_) => "constellation",
            AppError::Coverage(_) => "coverage",
            AppError::Fire(_) => "fire_detection",
            AppError::Edge(_) => "edge",
            AppError::Optimizer(_) => "optimizer",
        }
    }

    pub fn path(&self) -> Option<&PathBuf> {
        match self {
            AppError::FixtureMissing { path } | AppError::Io { path, .. } | AppError::Parse { path, .. } => Some(path),
            AppError::Locked(p) => Some(p),
            _ => None,
        }
    }

    /// One-line JSON for stderr.
    pub fn to_json_line(&self) -> String {
        let mut v = json!({ "error": self.kind(), "message": self.to_string() });
        if let Some(p) = self.path() {
            v["path"] = json!(p.display().to_string());
        }
        v.to_string()
    }
}

pub type Result<T, E = AppError> = std::result::Result<T, E>;
