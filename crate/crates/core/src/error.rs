use thiserror::Error;

/// Errors raised by grid construction, solvers, metrics and the experiment driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid initial data: {0}")]
    InvalidInitialData(String),

    #[error("time step dt = {dt:.6e} violates the CFL bound {bound:.6e} (cfl * dx / v_max)")]
    Cfl { dt: f64, bound: f64 },

    #[error("numerical failure at t = {t:.6e}: {detail}")]
    Numerical { t: f64, detail: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("metric error: {0}")]
    Metric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
