//! Trajectory energy integration from sampled kinematics.
//!
//! These integrators evaluate the full trajectory energy functionals by
//! trapezoidal quadrature over `(t, q, v, a)` samples. They serve as the
//! general path route; the closed-form circular models are their oracle for
//! constant-speed laps.

use crate::error::{Error, Result};

use super::{FixedWingParams, RotaryWingParams};

/// One kinematic sample along a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct PathSample {
    pub t: f64,
    pub position: [f64; 2],
    pub velocity: [f64; 2],
    pub acceleration: [f64; 2],
}

/// An ordered, validated sequence of kinematic samples.
#[derive(Debug, Clone)]
pub struct SampledPath {
    samples: Vec<PathSample>,
}

impl SampledPath {
    /// Timestamps must increase strictly; velocities and accelerations must be
    /// finite.
    pub fn new(samples: Vec<PathSample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::TooFewSamples(samples.len()));
        }
        for pair in samples.windows(2) {
            if !(pair[1].t > pair[0].t) {
                return Err(Error::Validation(format!(
                    "timestamps must increase strictly: {} then {}",
                    pair[0].t, pair[1].t
                )));
            }
        }
        for s in &samples {
            let finite = s.t.is_finite()
                && s.velocity.iter().all(|v| v.is_finite())
                && s.acceleration.iter().all(|a| a.is_finite())
                && s.position.iter().all(|p| p.is_finite());
            if !finite {
                return Err(Error::Validation(format!(
                    "non-finite sample at t = {}",
                    s.t
                )));
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[PathSample] {
        &self.samples
    }

    fn speed_sq_change(&self) -> f64 {
        let first = self.samples.first().unwrap();
        let last = self.samples.last().unwrap();
        norm_sq(last.velocity) - norm_sq(first.velocity)
    }
}

fn norm_sq(v: [f64; 2]) -> f64 {
    v[0] * v[0] + v[1] * v[1]
}

/// Velocity-orthogonal component of the acceleration (the centrifugal part).
/// With no velocity to project against, all acceleration counts.
fn centripetal(v: [f64; 2], a: [f64; 2]) -> f64 {
    let v2 = norm_sq(v);
    if v2 < 1e-24 {
        return norm_sq(a).sqrt();
    }
    let along = (a[0] * v[0] + a[1] * v[1]) / v2;
    let orth = [a[0] - along * v[0], a[1] - along * v[1]];
    norm_sq(orth).sqrt()
}

fn trapezoid(samples: &[PathSample], integrand: impl Fn(&PathSample) -> Result<f64>) -> Result<f64> {
    let mut acc = 0.0;
    let mut prev = integrand(&samples[0])?;
    for pair in samples.windows(2) {
        let next = integrand(&pair[1])?;
        acc += 0.5 * (prev + next) * (pair[1].t - pair[0].t);
        prev = next;
    }
    Ok(acc)
}

/// Integrates the rotary-wing energy functional over a sampled path, plus the
/// kinetic correction `½·(W/g)·(‖v(T)‖² − ‖v(0)‖²)`, which vanishes on closed
/// constant-speed laps.
pub fn integrate_rotary_energy(path: &SampledPath, params: &RotaryWingParams) -> Result<f64> {
    let v0_sq = params.induced_velocity_mps * params.induced_velocity_mps;
    let g = params.gravity_mps2;
    let integral = trapezoid(path.samples(), |s| {
        let v2 = norm_sq(s.velocity);
        let ac = centripetal(s.velocity, s.acceleration);
        let blade =
            params.blade_profile_power_w * (1.0 + 3.0 * v2 / params.tip_speed_mps.powi(2));
        let k = 1.0 + (ac / g).powi(2);
        let inner = (k + v2 * v2 / (4.0 * v0_sq * v0_sq)).sqrt() - v2 / (2.0 * v0_sq);
        let induced = params.induced_power_w * k.sqrt() * inner.sqrt();
        let parasite = 0.5
            * params.fuselage_drag_ratio
            * params.air_density_kgm3
            * params.rotor_solidity
            * params.rotor_disc_area_m2
            * v2
            * v2.sqrt();
        Ok(blade + induced + parasite)
    })?;
    Ok(integral + 0.5 * params.equivalent_mass_kg() * path.speed_sq_change())
}

/// Integrates the fixed-wing energy functional over a sampled path, plus the
/// kinetic term `½·m·(‖v(T)‖² − ‖v(0)‖²)` when a mass is configured.
pub fn integrate_fixed_energy(path: &SampledPath, params: &FixedWingParams) -> Result<f64> {
    let g2 = params.gravity_mps2 * params.gravity_mps2;
    let integral = trapezoid(path.samples(), |s| {
        let speed = norm_sq(s.velocity).sqrt();
        if speed <= 0.0 {
            return Err(Error::InvalidSpeed(speed));
        }
        let ac = centripetal(s.velocity, s.acceleration);
        Ok(params.parasitic_coefficient * speed.powi(3)
            + params.induced_coefficient / speed * (1.0 + ac * ac / g2))
    })?;
    let mass = params.mass_kg.unwrap_or(0.0);
    Ok(integral + 0.5 * mass * path.speed_sq_change())
}

/// Builds a constant-speed circular lap sampled every `dt` seconds.
/// Used by traces and by the integrator-oracle tests.
pub fn constant_speed_circle(v: f64, r: f64, laps: f64, dt: f64) -> SampledPath {
    let omega = v / r;
    let total = laps * 2.0 * std::f64::consts::PI / omega;
    let steps = (total / dt).ceil() as usize;
    let mut samples = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let t = (i as f64 / steps as f64) * total;
        let th = omega * t;
        samples.push(PathSample {
            t,
            position: [r * th.cos(), r * th.sin()],
            velocity: [-v * th.sin(), v * th.cos()],
            acceleration: [-v * omega * th.cos(), -v * omega * th.sin()],
        });
    }
    SampledPath::new(samples).expect("circle path is valid")
}

/// Straight constant-speed leg along x, sampled every `dt` seconds.
pub fn constant_speed_line(v: f64, duration: f64, dt: f64) -> SampledPath {
    let steps = (duration / dt).ceil() as usize;
    let samples = (0..=steps)
        .map(|i| {
            let t = (i as f64 / steps as f64) * duration;
            PathSample {
                t,
                position: [v * t, 0.0],
                velocity: [v, 0.0],
                acceleration: [0.0, 0.0],
            }
        })
        .collect();
    SampledPath::new(samples).expect("line path is valid")
}
