//! Propulsion power and energy models for both UAV types.
//!
//! The rotary-wing model decomposes power into blade profile, induced and
//! parasite terms and depends on flying speed and centrifugal acceleration.
//! The fixed-wing model combines a parasitic `V³` term and an induced `1/V`
//! term, with a centrifugal correction for turns. Both close over circular
//! motion, where the centrifugal acceleration is `V²/r`.

mod integrate;
mod speed;

pub use integrate::{
    constant_speed_circle, constant_speed_line, integrate_fixed_energy, integrate_rotary_energy,
    PathSample, SampledPath,
};
pub use speed::{optimal_speed, SpeedBounds, SPEED_TOLERANCE_MPS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::{Segment, Trajectory, TrajectoryKind};

/// Coefficients of the rotary-wing power model.
///
/// Defaults reproduce the reference multirotor configuration; the last five
/// fields document the airframe the hover powers were derived from and do not
/// enter the power formula directly (except `weight_n`/`gravity_mps2`, which
/// set the equivalent mass of the kinetic correction term).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RotaryWingParams {
    /// Blade profile power in hover, W.
    pub blade_profile_power_w: f64,
    /// Induced power in hover, W.
    pub induced_power_w: f64,
    /// Rotor blade tip speed, m/s.
    pub tip_speed_mps: f64,
    /// Mean rotor induced velocity in hover, m/s.
    pub induced_velocity_mps: f64,
    /// Fuselage drag ratio, dimensionless.
    pub fuselage_drag_ratio: f64,
    /// Rotor solidity, dimensionless.
    pub rotor_solidity: f64,
    /// Air density, kg/m³.
    pub air_density_kgm3: f64,
    /// Rotor disc area, m².
    pub rotor_disc_area_m2: f64,
    /// Gravitational acceleration, m/s².
    pub gravity_mps2: f64,
    /// Aircraft weight, N.
    pub weight_n: f64,
    /// Rotor radius, m.
    pub rotor_radius_m: f64,
    /// Blade angular velocity, rad/s.
    pub blade_angular_velocity_rads: f64,
    /// Incremental correction factor to induced power.
    pub induced_power_factor: f64,
    /// Profile drag coefficient.
    pub profile_drag_coefficient: f64,
}

impl Default for RotaryWingParams {
    fn default() -> Self {
        Self {
            blade_profile_power_w: 79.86,
            induced_power_w: 88.63,
            tip_speed_mps: 120.0,
            induced_velocity_mps: 4.03,
            fuselage_drag_ratio: 0.6,
            rotor_solidity: 0.05,
            air_density_kgm3: 1.225,
            rotor_disc_area_m2: 0.503,
            gravity_mps2: 9.8,
            weight_n: 20.0,
            rotor_radius_m: 0.4,
            blade_angular_velocity_rads: 300.0,
            induced_power_factor: 0.1,
            profile_drag_coefficient: 0.012,
        }
    }
}

impl RotaryWingParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("blade_profile_power_w", self.blade_profile_power_w),
            ("induced_power_w", self.induced_power_w),
            ("tip_speed_mps", self.tip_speed_mps),
            ("induced_velocity_mps", self.induced_velocity_mps),
            ("air_density_kgm3", self.air_density_kgm3),
            ("rotor_disc_area_m2", self.rotor_disc_area_m2),
            ("gravity_mps2", self.gravity_mps2),
            ("weight_n", self.weight_n),
            ("rotor_radius_m", self.rotor_radius_m),
            ("blade_angular_velocity_rads", self.blade_angular_velocity_rads),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and positive, got {v}"),
                });
            }
        }
        let unit_interval = [
            ("fuselage_drag_ratio", self.fuselage_drag_ratio),
            ("rotor_solidity", self.rotor_solidity),
            ("induced_power_factor", self.induced_power_factor),
            ("profile_drag_coefficient", self.profile_drag_coefficient),
        ];
        for (name, v) in unit_interval {
            if !(v.is_finite() && v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must lie in (0, 1), got {v}"),
                });
            }
        }
        Ok(())
    }

    /// Equivalent mass for the kinetic correction term, kg.
    pub fn equivalent_mass_kg(&self) -> f64 {
        self.weight_n / self.gravity_mps2
    }
}

/// Coefficients of the fixed-wing power model.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct FixedWingParams {
    /// Parasitic coefficient, kg/m.
    pub parasitic_coefficient: f64,
    /// Induced coefficient, kg·m³/s⁴.
    pub induced_coefficient: f64,
    /// Gravitational acceleration, m/s².
    pub gravity_mps2: f64,
    /// Minimum turn radius, m.
    pub min_turn_radius_m: f64,
    /// Airframe mass for the kinetic correction term, kg. Irrelevant for
    /// closed constant-speed laps, where the term vanishes.
    pub mass_kg: Option<f64>,
}

impl Default for FixedWingParams {
    fn default() -> Self {
        Self {
            parasitic_coefficient: 9.26e-4,
            induced_coefficient: 2250.0,
            gravity_mps2: 9.8,
            min_turn_radius_m: 5.0,
            mass_kg: None,
        }
    }
}

impl FixedWingParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("parasitic_coefficient", self.parasitic_coefficient),
            ("induced_coefficient", self.induced_coefficient),
            ("gravity_mps2", self.gravity_mps2),
            ("min_turn_radius_m", self.min_turn_radius_m),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and positive, got {v}"),
                });
            }
        }
        if let Some(m) = self.mass_kg {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "mass_kg",
                    reason: format!("must be finite and positive, got {m}"),
                });
            }
        }
        Ok(())
    }
}

/// Turn radius of a flight segment. Straight flight is an explicit variant
/// rather than an infinite sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Radius {
    Straight,
    Turn(f64),
}

impl Radius {
    fn checked(self) -> Result<Self> {
        match self {
            Radius::Turn(r) if !(r.is_finite() && r > 0.0) => Err(Error::InvalidRadius(r)),
            other => Ok(other),
        }
    }

    /// Squared centrifugal-over-gravity ratio `(V²/r / g)²` for speed `v`.
    fn centrifugal_sq(self, v: f64, gravity: f64) -> f64 {
        match self {
            Radius::Straight => 0.0,
            Radius::Turn(r) => {
                let ac = v * v / r;
                (ac / gravity).powi(2)
            }
        }
    }
}

impl std::fmt::Display for Radius {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Radius::Straight => write!(f, "inf"),
            Radius::Turn(r) => write!(f, "{r}"),
        }
    }
}

/// The two supported airframes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UavKind {
    Rotary,
    Fixed,
}

impl std::fmt::Display for UavKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UavKind::Rotary => write!(f, "rotary"),
            UavKind::Fixed => write!(f, "fixed"),
        }
    }
}

/// An airframe model: the UAV type together with its coefficient set.
#[derive(Debug, Clone)]
pub enum UavModel {
    Rotary(RotaryWingParams),
    Fixed(FixedWingParams),
}

impl UavModel {
    pub fn kind(&self) -> UavKind {
        match self {
            UavModel::Rotary(_) => UavKind::Rotary,
            UavModel::Fixed(_) => UavKind::Fixed,
        }
    }

    /// Propulsion power at constant speed `v` on a segment of the given radius.
    pub fn power(&self, v: f64, radius: Radius) -> Result<f64> {
        match self {
            UavModel::Rotary(p) => rotary_power(v, radius, p),
            UavModel::Fixed(p) => fixed_power(v, radius, p),
        }
    }
}

/// Rotary-wing propulsion power at constant speed `v` with a given turn radius.
///
/// Blade profile, induced and parasite terms; the centrifugal acceleration
/// `V²/r` enters the induced term and vanishes for straight flight.
pub fn rotary_power(v: f64, radius: Radius, params: &RotaryWingParams) -> Result<f64> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::InvalidSpeed(v));
    }
    let radius = radius.checked()?;
    let v2 = v * v;
    let blade = params.blade_profile_power_w * (1.0 + 3.0 * v2 / params.tip_speed_mps.powi(2));
    let k = 1.0 + radius.centrifugal_sq(v, params.gravity_mps2);
    let v0_sq = params.induced_velocity_mps * params.induced_velocity_mps;
    let inner = (k + v2 * v2 / (4.0 * v0_sq * v0_sq)).sqrt() - v2 / (2.0 * v0_sq);
    let induced = params.induced_power_w * k.sqrt() * inner.sqrt();
    let parasite = 0.5
        * params.fuselage_drag_ratio
        * params.air_density_kgm3
        * params.rotor_solidity
        * params.rotor_disc_area_m2
        * v2
        * v;
    Ok(blade + induced + parasite)
}

/// Hover power: the `V = 0` case of the rotary model, independent of radius.
pub fn rotary_hover_power(params: &RotaryWingParams) -> f64 {
    rotary_power(0.0, Radius::Straight, params).expect("hover power is always defined")
}

/// Fixed-wing propulsion power at constant speed `v > 0` with a given turn radius.
pub fn fixed_power(v: f64, radius: Radius, params: &FixedWingParams) -> Result<f64> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::InvalidSpeed(v));
    }
    let radius = radius.checked()?;
    let g2 = params.gravity_mps2 * params.gravity_mps2;
    let curve = match radius {
        Radius::Straight => 0.0,
        Radius::Turn(r) => params.induced_coefficient / (g2 * r * r),
    };
    Ok((params.parasitic_coefficient + curve) * v.powi(3) + params.induced_coefficient / v)
}

/// Per-segment outcome of a trajectory energy evaluation.
#[derive(Debug, Clone)]
pub struct SegmentEnergy {
    pub length_m: f64,
    pub radius: Radius,
    pub speed_mps: f64,
    pub power_w: f64,
    pub duration_s: f64,
}

/// Average power and hourly energy along a closed trajectory, with the speed
/// optimized separately for each segment.
#[derive(Debug, Clone)]
pub struct TrajectoryEnergy {
    pub avg_power_w: f64,
    pub energy_per_hour_j: f64,
    pub lap_time_s: f64,
    pub per_segment: Vec<SegmentEnergy>,
}

/// Evaluates a trajectory for the given airframe: each segment flies at the
/// speed minimizing its power (straight segments treat the radius as
/// infinite), the lap time weights the per-segment powers, and the hourly
/// energy is the time-averaged power times 3600 s.
///
/// Speed changes at segment junctions are treated as instantaneous, an
/// approximation consistent with reporting time-averaged power for closed
/// laps.
pub fn trajectory_energy(traj: &Trajectory, model: &UavModel) -> Result<TrajectoryEnergy> {
    match traj {
        Trajectory::Hover { .. } => match model {
            UavModel::Rotary(p) => {
                let power = rotary_hover_power(p);
                Ok(TrajectoryEnergy {
                    avg_power_w: power,
                    energy_per_hour_j: power * 3600.0,
                    lap_time_s: 0.0,
                    per_segment: Vec::new(),
                })
            }
            UavModel::Fixed(_) => Err(Error::FixedWingHover),
        },
        Trajectory::Circuit { segments, .. } => {
            if let UavModel::Fixed(p) = model {
                for seg in segments {
                    if let Radius::Turn(r) = seg.radius() {
                        if r < p.min_turn_radius_m {
                            return Err(Error::InfeasibleRadius {
                                radius_m: r,
                                r_min_m: p.min_turn_radius_m,
                            });
                        }
                    }
                }
            }
            let mut per_segment = Vec::with_capacity(segments.len());
            let mut power_time = 0.0;
            let mut total_time = 0.0;
            for seg in segments {
                let radius = seg.radius();
                let (speed, power) = optimal_speed(model, radius, SpeedBounds::default())?;
                let length = seg.length();
                let duration = length / speed;
                power_time += power * duration;
                total_time += duration;
                per_segment.push(SegmentEnergy {
                    length_m: length,
                    radius,
                    speed_mps: speed,
                    power_w: power,
                    duration_s: duration,
                });
            }
            let avg_power_w = power_time / total_time;
            Ok(TrajectoryEnergy {
                avg_power_w,
                energy_per_hour_j: avg_power_w * 3600.0,
                lap_time_s: total_time,
                per_segment,
            })
        }
    }
}

/// True when the airframe can fly the trajectory: fixed-wing aircraft cannot
/// hover and cannot turn tighter than their minimum radius.
pub fn fixed_wing_feasible(traj: &Trajectory, r_min: f64) -> bool {
    match traj {
        Trajectory::Hover { .. } => false,
        Trajectory::Circuit { segments, .. } => segments.iter().all(|seg| match seg {
            Segment::Arc { radius, .. } => *radius >= r_min,
            Segment::Line { .. } => true,
        }),
    }
}

/// Kind order used to break energy ties: Circular preferred, Hover last.
pub fn kind_rank(kind: TrajectoryKind) -> u8 {
    match kind {
        TrajectoryKind::Circular => 0,
        TrajectoryKind::InnerElliptic => 1,
        TrajectoryKind::Elliptic => 2,
        TrajectoryKind::Hover => 3,
    }
}
