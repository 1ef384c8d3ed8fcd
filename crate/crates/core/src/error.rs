use thiserror::Error;

pub type Result<T> = std::result::Result<T, GlabError>;

#[derive(Debug, Error)]
pub enum GlabError {
    #[error("box d={dim}, N={radius} has {volume} sites, above the volume cap {cap}")]
    VolumeCap {
        dim: usize,
        radius: usize,
        volume: u128,
        cap: usize,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("site {site:?} lies outside the box of radius {radius}")]
    OutOfBox { site: Vec<i64>, radius: usize },

    #[error("geometry mismatch: expected d={expected_dim}, N={expected_radius}; got d={dim}, N={radius}")]
    GeometryMismatch {
        expected_dim: usize,
        expected_radius: usize,
        dim: usize,
        radius: usize,
    },

    #[error("lattice sum diverges: d={dim} must exceed 2*alpha={}", 2.0 * alpha)]
    Divergent { dim: usize, alpha: f64 },

    #[error("no convergence to tol={tol:e} before radius cap {radius}: best {value} +/- {error:e}")]
    NonConvergence {
        value: f64,
        error: f64,
        radius: usize,
        tol: f64,
    },

    #[error("operation requires a stretched-exponential or Gaussian tail, got {0}")]
    WrongTailClass(String),

    #[error("empty sample stream")]
    EmptyStream,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl GlabError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        GlabError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
