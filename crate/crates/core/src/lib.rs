//! mmWave grid-of-beams sector simulator and mobility classification stack.
//!
//! The crate is organized along the data path:
//!
//! - [`paam`] — phased array model and grid-of-beams (GoB) synthesis
//! - [`scene`] — site geometry and labeled UE populations
//! - [`link`] — LOS link budget (per-beam RSRP)
//! - [`beam_mgmt`] — beam tracking loop and L2 measurement reports
//! - [`learn`] — fingerprints, scaling, PCA, K-means, tSNE, tree ensembles
//!
//! All numeric code is generic over the scalar type through [`num::Real`]
//! (f32 or f64); the `*64` aliases below are the concrete types used by the
//! CLI and by most tests.

pub mod beam_mgmt;
pub mod error;
pub mod geom;
pub mod learn;
pub mod link;
pub mod matrix;
pub mod num;
pub mod paam;
pub mod scene;

pub use error::{Error, Result};
pub use num::Real;

/// f64 instantiations of the main domain types.
pub type Matrix64 = matrix::Matrix<f64>;
pub type ArrayConfig64 = paam::ArrayConfig<f64>;
pub type GobLayout64 = paam::GobLayout<f64>;
pub type GridOfBeams64 = paam::GridOfBeams<f64>;
pub type Beam64 = paam::Beam<f64>;
pub type SiteConfig64 = scene::SiteConfig<f64>;
pub type Site64 = scene::Site<f64>;
pub type UeTrack64 = scene::UeTrack<f64>;
pub type LinkBudgetConfig64 = link::LinkBudgetConfig<f64>;
pub type MeasurementReport64 = beam_mgmt::MeasurementReport<f64>;
pub type SimulationConfig64 = beam_mgmt::SimulationConfig<f64>;
pub type ScalingModel64 = learn::ScalingModel<f64>;
pub type PcaModel64 = learn::PcaModel<f64>;
pub type KMeansModel64 = learn::KMeansModel<f64>;
pub type TsneEmbedding64 = learn::TsneEmbedding<f64>;
pub type TreeEnsemble64 = learn::TreeEnsemble<f64>;
