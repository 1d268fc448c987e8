//! Ground-user scenarios: the reference set, seeded random generation, and
//! the batch comparison harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::planner::{plan, GroundUser};
use crate::radio::McsTable;

/// A bounded area with ground users. Randomly generated scenarios regenerate
/// bit-identically from `(seed, index)`.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub width_m: f64,
    pub height_m: f64,
    pub gus: Vec<GroundUser>,
    pub seed: u64,
    pub grid_res_m: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.width_m > 0.0 && self.height_m > 0.0) {
            return Err(Error::Validation(format!(
                "area must be positive, got {} x {}",
                self.width_m, self.height_m
            )));
        }
        if !(self.grid_res_m > 0.0) {
            return Err(Error::Validation(format!(
                "grid_res must be positive, got {}",
                self.grid_res_m
            )));
        }
        if self.gus.is_empty() {
            return Err(Error::Validation("scenario has no ground users".into()));
        }
        for (i, gu) in self.gus.iter().enumerate() {
            let p = gu.position;
            let inside = p.x >= 0.0
                && p.x <= self.width_m
                && p.y >= 0.0
                && p.y <= self.height_m
                && p.z >= 0.0;
            if !inside {
                return Err(Error::Validation(format!(
                    "gu {i} at ({}, {}, {}) lies outside the {} x {} area",
                    p.x, p.y, p.z, self.width_m, self.height_m
                )));
            }
            if !(gu.load_mbps.is_finite() && gu.load_mbps >= 0.0) {
                return Err(Error::Validation(format!(
                    "gu {i} offered load must be non-negative, got {}",
                    gu.load_mbps
                )));
            }
        }
        Ok(())
    }
}

fn gu(x: f64, y: f64, load_mbps: f64) -> GroundUser {
    GroundUser {
        position: Point3 { x, y, z: 0.0 },
        load_mbps,
    }
}

/// The three reference scenarios (2, 5 and 10 ground users in a 100 x 100 m
/// area).
pub fn reference_scenarios() -> Vec<Scenario> {
    let make = |gus: Vec<GroundUser>| Scenario {
        width_m: 100.0,
        height_m: 100.0,
        gus,
        seed: 0,
        grid_res_m: 1.0,
    };
    vec![
        make(vec![gu(47.0, 32.0, 200.0), gu(52.0, 71.0, 117.0)]),
        make(vec![
            gu(19.0, 62.0, 36.0),
            gu(85.0, 46.0, 27.0),
            gu(86.0, 53.0, 19.0),
            gu(2.0, 9.0, 14.0),
            gu(52.0, 88.0, 23.0),
        ]),
        make(vec![
            gu(69.0, 83.0, 9.0),
            gu(68.0, 91.0, 6.0),
            gu(26.0, 16.0, 1.0),
            gu(67.0, 8.0, 5.0),
            gu(38.0, 21.0, 3.0),
            gu(23.0, 71.0, 6.0),
            gu(60.0, 34.0, 7.0),
            gu(8.0, 31.0, 5.0),
            gu(59.0, 59.0, 8.0),
            gu(20.0, 79.0, 6.0),
        ]),
    ]
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generates scenario number `index` of the stream named by `master_seed`:
/// positions uniform over 100 x 100 m, loads uniform over `load_range`.
///
/// The per-scenario stream is ChaCha8 seeded with
/// `splitmix64(master_seed XOR index·0x9E3779B97F4A7C15)`; draws are x then y
/// per user, then all loads. The scheme is fixed so results reproduce across
/// runs and implementations.
pub fn generate_random(
    n: usize,
    master_seed: u64,
    index: u64,
    load_range: (f64, f64),
) -> Scenario {
    let stream = splitmix64(master_seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    let mut gus = Vec::with_capacity(n);
    let mut positions = Vec::with_capacity(n);
    for _ in 0..n {
        let x: f64 = rng.gen_range(0.0..100.0);
        let y: f64 = rng.gen_range(0.0..100.0);
        positions.push((x, y));
    }
    for &(x, y) in &positions {
        let load = if load_range.1 > load_range.0 {
            rng.gen_range(load_range.0..load_range.1)
        } else {
            load_range.0
        };
        gus.push(gu(x, y, load));
    }
    Scenario {
        width_m: 100.0,
        height_m: 100.0,
        gus,
        seed: master_seed,
        grid_res_m: 1.0,
    }
}

/// Offered-load interval for batch experiments, Mbit/s.
pub const BATCH_LOAD_RANGE_MBPS: (f64, f64) = (0.0, 500.0);

/// Outcome of planning one random scenario.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioOutcome {
    pub index: u64,
    pub planned: bool,
    pub fap_count: usize,
    pub rotary_j_per_h: Option<f64>,
    pub fixed_j_per_h: Option<f64>,
    pub percent_increase: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Percentiles {
    pub p5: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p95: f64,
}

/// Aggregated comparison of the two airframes over a batch of random
/// scenarios with a fixed user count.
#[derive(Debug, Clone, Serialize)]
pub struct BatchStats {
    pub gu_count: usize,
    pub scenario_count: usize,
    pub seed: u64,
    /// Scenarios where both airframes could be deployed.
    pub both_feasible_count: usize,
    /// Scenarios where some FAP had no feasible fixed-wing trajectory.
    pub infeasible_fixed_count: usize,
    /// Scenarios where even rotary planning failed; excluded from statistics.
    pub rotary_failed_count: usize,
    /// Per-scenario hourly-energy increase of fixed over rotary, percent,
    /// only for both-feasible scenarios, in scenario order.
    pub percent_increase: Vec<f64>,
    pub percentiles: Option<Percentiles>,
    pub outcomes: Vec<ScenarioOutcome>,
}

/// Linear-interpolation percentile of an ascending sample vector.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let idx = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = idx.floor() as usize;
    let hi = idx.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let f = idx - lo as f64;
        sorted[lo] * (1.0 - f) + sorted[hi] * f
    }
}

/// Plans `count` random scenarios with `n` users each and aggregates the
/// airframe comparison. Per-scenario failures are recorded, never thrown.
pub fn run_batch(
    n: usize,
    count: usize,
    seed: u64,
    config: &SimConfig,
    table: &McsTable,
) -> BatchStats {
    let mut outcomes = Vec::with_capacity(count);
    let mut percent_increase = Vec::new();
    let mut both = 0usize;
    let mut infeasible_fixed = 0usize;
    let mut rotary_failed = 0usize;

    for index in 0..count as u64 {
        let scenario = generate_random(n, seed, index, BATCH_LOAD_RANGE_MBPS);
        let plans = match plan(&scenario, config, table) {
            Ok(p) => p,
            Err(_) => {
                rotary_failed += 1;
                outcomes.push(ScenarioOutcome {
                    index,
                    planned: false,
                    fap_count: 0,
                    rotary_j_per_h: None,
                    fixed_j_per_h: None,
                    percent_increase: None,
                });
                continue;
            }
        };
        let rotary: f64 = plans
            .iter()
            .filter_map(|p| p.rotary.as_ref())
            .map(|s| s.energy_per_hour_j)
            .sum();
        let fixed_total: Option<f64> = plans
            .iter()
            .map(|p| p.fixed.as_ref().map(|s| s.energy_per_hour_j))
            .sum();
        let pct = fixed_total.map(|f| 100.0 * (f - rotary) / rotary);
        match pct {
            Some(v) => {
                both += 1;
                percent_increase.push(v);
            }
            None => infeasible_fixed += 1,
        }
        outcomes.push(ScenarioOutcome {
            index,
            planned: true,
            fap_count: plans.len(),
            rotary_j_per_h: Some(rotary),
            fixed_j_per_h: fixed_total,
            percent_increase: pct,
        });
    }

    let percentiles = if percent_increase.is_empty() {
        None
    } else {
        let mut sorted = percent_increase.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Some(Percentiles {
            p5: percentile(&sorted, 5.0),
            p25: percentile(&sorted, 25.0),
            p50: percentile(&sorted, 50.0),
            p75: percentile(&sorted, 75.0),
            p95: percentile(&sorted, 95.0),
        })
    };
    BatchStats {
        gu_count: n,
        scenario_count: count,
        seed,
        both_feasible_count: both,
        infeasible_fixed_count: infeasible_fixed,
        rotary_failed_count: rotary_failed,
        percent_increase,
        percentiles,
        outcomes,
    }
}
