use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("mixed polynomial orders: expected all kernels at order 2, found order {0}")]
    MixedOrder(u32),

    /// An unsafe sample sits outside the kernel cover of the first layer.
    /// Its largest kernel coordinate is too small for the cutting-surface
    /// constraints to be well posed.
    #[error(
        "unsafe point {index} is not covered by the first layer \
         (max kernel coordinate {max_coord:.3e} < threshold {threshold:.3e}); \
         add centers or pass the cover override"
    )]
    NotCovered {
        index: usize,
        max_coord: f64,
        threshold: f64,
    },

    #[error("dataset has no unsafe points")]
    EmptyUnsafe,

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
