//! LOS link budget: free-space path loss and per-beam RSRP.

use crate::error::{Error, Result};
use crate::geom::{az_el_deg, Vec3};
use crate::num::Real;
use crate::paam::{beam_gain, ArrayConfig, Beam};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Speed of light in m/s.
pub const C_M_S: f64 = 299_792_458.0;

/// Transmit-side and receiver-side power terms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinkBudgetConfig<R> {
    /// Per-beam transmit power in dBm.
    pub tx_power_dbm_per_beam: R,
    /// Receiver noise figure in dB, part of the thermal noise floor.
    pub noise_figure_db: R,
    /// Log-normal shadowing standard deviation in dB (0 disables shadowing).
    pub shadow_sigma_db: R,
    /// UE antenna gain in dBi.
    pub ue_gain_dbi: R,
    /// Extra power term for the co-located cross-polarized element pair.
    pub polarization_gain_db: R,
}

impl<R: Real> Default for LinkBudgetConfig<R> {
    fn default() -> Self {
        Self {
            tx_power_dbm_per_beam: R::of(30.0),
            noise_figure_db: R::of(9.0),
            shadow_sigma_db: R::zero(),
            ue_gain_dbi: R::zero(),
            polarization_gain_db: R::zero(),
        }
    }
}

impl<R: Real> LinkBudgetConfig<R> {
    pub fn validate(&self) -> Result<()> {
        if self.shadow_sigma_db < R::zero() {
            return Err(Error::config("shadow_sigma_db must be >= 0"));
        }
        Ok(())
    }

    /// Thermal noise floor in dBm: -174 + 10 log10(bandwidth) + noise figure.
    pub fn noise_floor_dbm(&self, bandwidth_hz: R) -> R {
        R::of(-174.0) + R::of(10.0) * bandwidth_hz.log10() + self.noise_figure_db
    }
}

/// One measured narrow beam inside a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamMeasurement<R> {
    pub nb_index: u32,
    pub rsrp_dbm: R,
}

/// Friis free-space path loss in dB: 20 log10(4 pi d f / c).
pub fn fspl_db<R: Real>(distance_m: R, freq_hz: R) -> Result<R> {
    if distance_m <= R::zero() {
        return Err(Error::data("fspl requires a positive distance"));
    }
    if freq_hz <= R::zero() {
        return Err(Error::data("fspl requires a positive frequency"));
    }
    let four_pi = R::of(4.0 * std::f64::consts::PI);
    Ok(R::of(20.0) * (four_pi * distance_m * freq_hz / R::of(C_M_S)).log10())
}

/// Deterministic RSRP component (no shadowing) of a beam at a UE position.
pub fn rsrp_mean_dbm<R: Real>(
    array: &ArrayConfig<R>,
    link: &LinkBudgetConfig<R>,
    beam: &Beam<R>,
    bs_pos: Vec3<R>,
    ue_pos: Vec3<R>,
) -> Result<R> {
    let (az, el) = az_el_deg(bs_pos, ue_pos);
    let dist = bs_pos.distance(ue_pos);
    let loss = fspl_db(dist, array.carrier_freq_hz)?;
    Ok(link.tx_power_dbm_per_beam
        + beam_gain(array, beam, az, el)
        + link.polarization_gain_db
        + link.ue_gain_dbi
        - loss)
}

/// Measured RSRP of one beam, with an optional zero-mean shadowing term
/// drawn from `rng`. With `shadow_sigma_db == 0` no random value is drawn,
/// so the rng state is untouched and the result is a pure function of the
/// geometry.
pub fn rsrp<R: Real, G: Rng + ?Sized>(
    array: &ArrayConfig<R>,
    link: &LinkBudgetConfig<R>,
    beam: &Beam<R>,
    bs_pos: Vec3<R>,
    ue_pos: Vec3<R>,
    rng: &mut G,
) -> Result<BeamMeasurement<R>> {
    let mut value = rsrp_mean_dbm(array, link, beam, bs_pos, ue_pos)?;
    if link.shadow_sigma_db > R::zero() {
        let z: f64 = StandardNormal.sample(rng);
        value += link.shadow_sigma_db * R::of(z);
    }
    Ok(BeamMeasurement { nb_index: beam.id, rsrp_dbm: value })
}
