//! Simulation and analysis toolkit for non-autonomous dissipative dynamics.
//!
//! The crate evolves Galerkin-truncated reaction-diffusion equations
//!
//! ```text
//!     du/dt + A u = f(u) + g(t),    u(x, t) = sum_k u_k(t) sin(k pi x / L)
//! ```
//!
//! over hulls of translated forcing paths, approximates pullback / uniform /
//! exponential attractors by explicit covering constructions, estimates
//! box-counting dimensions from greedy covers, and evaluates closed-form
//! dimension bounds from measured hypothesis constants.
//!
//! Modules mirror the pipeline:
//!
//! * [`space`] - sine-mode state vectors, norms, point clouds, greedy covers;
//! * [`symbol`] - forcing paths, the weighted Frechet metric, hulls, generators;
//! * [`dynamics`] - the exponential semi-implicit Euler process and the
//!   hypothesis-constant estimators (smoothing, Hoelder, symbol-Lipschitz);
//! * [`attractor`] - absorbing sets, pullback/uniform attractor approximation,
//!   semicontinuity rate fits;
//! * [`dimension`] - box-counting estimates, the discrete exponential-attractor
//!   construction, and the closed-form dimension bounds;
//! * [`io`] - CSV/JSON serialization with reproducible formatting.
//!
//! With the default `parallel` feature the data-parallel kernels (ensemble
//! evolution, pairwise distances, per-radius covers) run on rayon; disabling
//! it swaps in sequential loops with identical results, reductions are
//! performed in a fixed order either way.

pub mod attractor;
pub mod dimension;
pub mod dynamics;
pub mod error;
mod exec;
mod fit;
pub mod io;
pub mod space;
pub mod symbol;

pub use dimension::{DimensionReport, ExpAttractorBuild, ExpAttractorParams};
pub use error::{Error, Result};
pub use space::{CoverResult, PointCloud, SpatialDiscretization, StateVector};
pub use symbol::{FrechetConfig, HullApproximation, SymbolPath};
