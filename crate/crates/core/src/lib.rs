//! Numerical laboratory for finite-time blow-up and lifespan scaling in the
//! weakly coupled system
//!
//! ```text
//! u_tt - Lu + b u_t + m^2 u = |v|^p
//! v_tt - Lv             = |u|^q
//! ```
//!
//! on flat tori `(R/2piZ)^n`, `n = 1..3`, with data scaled by a small
//! amplitude `eps` and dominant damping `b^2 >= 4 m^2`.
//!
//! The crate is organized around five building blocks:
//!
//! * [`model`] — parameters, characteristic roots, theoretical lifespan
//!   exponents and the scalar formulas of the linear theory;
//! * [`iteration`] — slicing sequences, iterative lower-bound sequences,
//!   explicit constants/thresholds and proof-side blow-up deadlines;
//! * [`oracle`] — exact functional-ODE reduction for spatially homogeneous
//!   data, adaptive integration with dense output and blow-up time
//!   measurement;
//! * [`spectral`] — pseudo-spectral solver on tori with exact per-mode
//!   linear propagators, plus empirical checks of the linear decay
//!   estimates and the Gagliardo-Nirenberg inequality;
//! * [`sweep`] — epsilon sweeps, log-log exponent fits, theory comparison
//!   and report emission (CSV / JSON / plot data / SVG).

pub mod error;
pub mod iteration;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod spectral;
pub mod sweep;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
