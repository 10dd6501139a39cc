//! Differential amplify-and-forward (D-AF) relaying over time-varying
//! Rayleigh fading channels.
//!
//! The crate is organised bottom-up:
//!
//! - [`special`]: Bessel `J0`/`K0`, exponential integral `E1`, Gaussian `Q`.
//! - [`quadrature`]: Gauss-Legendre rules used by the analysis.
//! - [`channel`]: AR(1) and sum-of-sinusoids fading generators, the cascaded
//!   (double-Rayleigh) relay channel and its statistical validators.
//! - [`link`]: differential M-PSK and the two-phase source/relay transmit chain.
//! - [`receiver`]: combining weights (CDD, TVD, genie-optimum), the linear
//!   combiner and minimum-distance differential detection.
//! - [`analysis`]: pairwise error probability, BER approximation, upper bound
//!   and high-SNR error floor.
//! - [`montecarlo`]: the end-to-end BER estimator.

pub mod analysis;
pub mod channel;
mod error;
pub mod link;
pub mod montecarlo;
pub mod quadrature;
pub mod receiver;
pub mod rng;
pub mod special;

pub use error::{Error, Result};

/// Baseband complex amplitude.
pub type ComplexSample = num_complex::Complex64;

pub use analysis::{PepParams, PepPoint};
pub use channel::{CascadedModelKind, ChannelStats, FadingSpec, Generator, Lag, Scenario};
pub use link::{Constellation, LinkObservation, PowerAllocation};
pub use montecarlo::{BerEstimate, RunConfig};
pub use receiver::{CombinerWeights, GenieIndex, NoiseVariances, WeightScheme};
