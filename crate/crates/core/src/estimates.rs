//! Order-of-magnitude estimate, in SI units, of how far quantum uncertainty
//! spreads a calcium ion between a channel exit and its trigger site.
//!
//! Conventions: `Δp·Δx = ħ`, thermal speed `sqrt(3kT/m)`, ballistic flight.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_07e-27;

pub const CALCIUM_MASS_U: f64 = 40.078;
pub const BODY_TEMPERATURE_K: f64 = 310.0;
pub const CHANNEL_DIAMETER_M: f64 = 1e-9;
pub const TRANSIT_DISTANCE_M: f64 = 50e-9;
pub const CALCIUM_ION_DIAMETER_M: f64 = 0.2e-9;

pub const UNCERTAINTY_CONVENTION: &str = "dp*dx = hbar";
pub const THERMAL_VELOCITY_CONVENTION: &str = "v = sqrt(3kT/m)";
pub const SPREAD_MODEL: &str = "ballistic: spread = dv * transit_distance / v_thermal";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IonParameters {
    /// kg
    pub mass: f64,
    /// K
    pub temperature: f64,
    /// m, the channel diameter Δx
    pub confinement_width: f64,
    /// m
    pub transit_distance: f64,
    /// m
    pub ion_diameter: f64,
}

impl IonParameters {
    /// Validates that mass, temperature, width and diameter are positive and
    /// the transit distance is non-negative.
    pub fn new(
        mass: f64,
        temperature: f64,
        confinement_width: f64,
        transit_distance: f64,
        ion_diameter: f64,
    ) -> Result<Self> {
        let positive = [
            ("mass", mass),
            ("temperature", temperature),
            ("confinement_width", confinement_width),
            ("ion_diameter", ion_diameter),
        ];
        for (field, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(field, format!("{v} must be positive")));
            }
        }
        if !(transit_distance >= 0.0 && transit_distance.is_finite()) {
            return Err(Error::invalid(
                "transit_distance",
                format!("{transit_distance} must be >= 0"),
            ));
        }
        Ok(IonParameters {
            mass,
            temperature,
            confinement_width,
            transit_distance,
            ion_diameter,
        })
    }

    /// Ca²⁺ at body temperature in a 1 nm channel, 50 nm from the trigger.
    pub fn calcium() -> Self {
        IonParameters {
            mass: CALCIUM_MASS_U * ATOMIC_MASS_UNIT,
            temperature: BODY_TEMPERATURE_K,
            confinement_width: CHANNEL_DIAMETER_M,
            transit_distance: TRANSIT_DISTANCE_M,
            ion_diameter: CALCIUM_ION_DIAMETER_M,
        }
    }
}

impl Default for IonParameters {
    fn default() -> Self {
        Self::calcium()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VelocityEstimate {
    /// m/s
    pub delta_v: f64,
    /// m/s
    pub v_thermal: f64,
    pub velocity_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub delta_v: f64,
    pub v_thermal: f64,
    pub velocity_ratio: f64,
    /// s
    pub transit_time: f64,
    /// m
    pub spread_at_trigger: f64,
    pub spread_to_ion_size: f64,
    pub conventions: Conventions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub uncertainty: String,
    pub thermal_velocity: String,
    pub spread_model: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            uncertainty: UNCERTAINTY_CONVENTION.into(),
            thermal_velocity: THERMAL_VELOCITY_CONVENTION.into(),
            spread_model: SPREAD_MODEL.into(),
        }
    }
}

pub fn velocity_ratio(p: &IonParameters) -> VelocityEstimate {
    let delta_v = HBAR / (p.mass * p.confinement_width);
    let v_thermal = (3.0 * BOLTZMANN * p.temperature / p.mass).sqrt();
    VelocityEstimate {
        delta_v,
        v_thermal,
        velocity_ratio: v_thermal / delta_v,
    }
}

pub fn spread_at_trigger(p: &IonParameters) -> EstimateReport {
    let v = velocity_ratio(p);
    let transit_time = p.transit_distance / v.v_thermal;
    let spread = v.delta_v * transit_time;
    EstimateReport {
        delta_v: v.delta_v,
        v_thermal: v.v_thermal,
        velocity_ratio: v.velocity_ratio,
        transit_time,
        spread_at_trigger: spread,
        spread_to_ion_size: spread / p.ion_diameter,
        conventions: Conventions::default(),
    }
}
