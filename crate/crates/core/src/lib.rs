//! Sum-rate maximization for a multi-user MISO downlink served through a
//! passive intelligent mirror.
//!
//! The base station zero-forces the cascaded channel `H2 diag(e^{j theta}) H1`.
//! Mirror phases and per-user powers are then optimized alternately:
//! a majorization-minimization step lowers the transmit-power cost of the
//! current powers ([`phase_mm`]), and a QoS-constrained water-filling step
//! spends the freed budget ([`power_wf`]). [`alternating::solve`] runs the loop.
//!
//! ```
//! use pim_core::{alternating, scenario};
//!
//! let dims = scenario::Dims::new(2, 4, 4);
//! let cfg = scenario::snr_config(dims, 10.0, scenario::RateFloorMode::Fixed { value: 0.5 })?;
//! let seed = scenario::RngSeed::new(7, 0);
//! let ch = scenario::generate_channels(&cfg, seed);
//! let sol = alternating::solve(&ch, &cfg, seed, &alternating::SolveOptions::default())?;
//! assert!(sol.sum_rate > 0.0);
//! # Ok::<(), pim_core::Error>(())
//! ```

pub mod alternating;
pub mod baselines;
mod error;
pub mod experiments;
pub mod linalg;
pub mod phase_mm;
pub mod power_wf;
pub mod scenario;
pub mod zf;

pub use error::{Error, Result};

// The book chapters run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/system_model.md")]
    mod system_model {}
    #[doc = include_str!("../../../book/src/phase_optimization.md")]
    mod phase_optimization {}
    #[doc = include_str!("../../../book/src/power_allocation.md")]
    mod power_allocation {}
    #[doc = include_str!("../../../book/src/alternating.md")]
    mod alternating {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
