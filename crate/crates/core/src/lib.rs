//! Localization of sparse radar targets in range and angle from heavily
//! quantized, dithered observations of a two-antenna FMCW radar.
//!
//! The pipeline is
//!
//! 1. [`radar_model`]: build the sensing matrix Φ and synthesize the raw
//!    two-antenna samples Γ = Φ(x, Gx) of a scene,
//! 2. [`quantizer`]: quantize Γ (down to one bit per part) after adding a
//!    weighted uniform dither,
//! 3. [`pbp`]: back-project and keep the K strongest joint rows, then read
//!    each target's angle from the inter-antenna phase,
//! 4. [`metrics`] and [`montecarlo`]: score estimates and aggregate polar
//!    error maps, decay curves and dither sweeps,
//! 5. [`analysis`]: sampled isometry and distortion constants.
//!
//! ```
//! use qbr::prelude::*;
//!
//! let cfg = RadarConfig::default();
//! let scene = Scene::new(vec![Target { range_bin: 40, angle: 0.3, amplitude: 1.0, phase: 0.0 }]);
//! let (gamma, _x) = synthesize(&cfg, &scene).unwrap();
//! let z = AdaptiveQuantizer::default().quantize(&gamma, 7).unwrap();
//! let est = localize(&build_phi(&cfg), z.z.view(), 1, &cfg).unwrap();
//! assert_eq!(est.targets[0].range_bin, 40);
//! ```

pub mod analysis;
pub mod cli;
pub mod error;
pub mod metrics;
pub mod montecarlo;
pub mod pbp;
pub mod quantizer;
pub mod radar_model;
pub mod seed;

pub use error::{Error, Result};

/// The types and functions most programs need.
pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::metrics::{position_error, ErrorMap};
    pub use crate::montecarlo::{run_experiment, Experiment, ExperimentSpec, Profile};
    pub use crate::pbp::{localize, pbp, Estimate};
    pub use crate::quantizer::{AdaptiveQuantizer, DitherMode, QuantizerConfig};
    pub use crate::radar_model::{build_phi, synthesize, RadarConfig, Scene, SignalMatrix, Target};
}
