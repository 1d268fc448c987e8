//! Per-radius optimal cruise speed.
//!
//! Both power models are unimodal in speed over the search interval (verified
//! empirically by the grid-sweep oracle in the test suite), so a bounded
//! golden-section search suffices.

use crate::error::{Error, Result};

use super::{Radius, UavModel};

/// Absolute speed tolerance of the search, m/s.
pub const SPEED_TOLERANCE_MPS: f64 = 1e-3;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Speed search interval, m/s.
#[derive(Debug, Clone, Copy)]
pub struct SpeedBounds {
    pub min_mps: f64,
    pub max_mps: f64,
}

impl Default for SpeedBounds {
    /// Brackets both airframes' optima (≈10.2 m/s rotary, 30 m/s fixed)
    /// with a wide margin.
    fn default() -> Self {
        Self {
            min_mps: 0.1,
            max_mps: 80.0,
        }
    }
}

/// Finds the speed minimizing propulsion power for the given turn radius.
/// Returns `(V_opt, P_min)`. Fixed-wing requests below the minimum turn
/// radius are rejected.
pub fn optimal_speed(model: &UavModel, radius: Radius, bounds: SpeedBounds) -> Result<(f64, f64)> {
    if let UavModel::Fixed(p) = model {
        if let Radius::Turn(r) = radius {
            if r < p.min_turn_radius_m {
                return Err(Error::InfeasibleRadius {
                    radius_m: r,
                    r_min_m: p.min_turn_radius_m,
                });
            }
        }
    }
    if !(bounds.min_mps.is_finite() && bounds.max_mps.is_finite())
        || bounds.min_mps <= 0.0
        || bounds.max_mps <= bounds.min_mps
    {
        return Err(Error::InvalidParameter {
            name: "speed_bounds",
            reason: format!("invalid interval [{}, {}]", bounds.min_mps, bounds.max_mps),
        });
    }
    // Power evaluation cannot fail inside validated bounds and radius.
    let f = |v: f64| model.power(v, radius).expect("power defined on bounds");
    Ok(golden_section_min(f, bounds.min_mps, bounds.max_mps, SPEED_TOLERANCE_MPS))
}

fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - (b - a) * INV_PHI;
    let mut d = a + (b - a) * INV_PHI;
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * INV_PHI;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * INV_PHI;
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}
