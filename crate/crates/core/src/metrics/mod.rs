//! Distances and entropy functionals comparing kinetic and hydrodynamic states.

pub mod entropy;
pub mod rates;
pub mod wasserstein;

pub use entropy::{
    monokinetic_deviation, relative_entropy, relative_entropy_density, relative_flux_components,
    relative_flux_norm, MonokineticDeviation,
};
pub use rates::{fit_loglog_slope, ConvergenceRecord, ConvergenceRow, LogLogFit};
pub use wasserstein::{wasserstein1_1d, Measure1d};
