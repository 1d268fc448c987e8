//! End-to-end FAP placement planning.
//!
//! The pipeline: rate matrix over a candidate position grid, ground-user
//! grouping that minimizes the number of FAPs, per-group target MCS and
//! coverage spheres, intersection areas with overlap removal in creation
//! order, the three candidate trajectories (plus hover for rotary wings), and
//! selection of the most energy-efficient feasible trajectory per UAV type.

use serde::Serialize;

use crate::config::SimConfig;
use crate::energy::{
    fixed_wing_feasible, trajectory_energy, TrajectoryEnergy, UavKind, UavModel,
};
use crate::error::{Error, Result};
use crate::geometry::{
    build_circular, build_elliptic, build_inner_elliptic, centroid_and_boundary, intersect_discs,
    sphere_to_disc, subtract_overlaps, IntersectionArea, Point3,
};
use crate::radio::{capacity_for_snr, max_distance_for_snr, snr_at, LinkBudget, McsTable};
use crate::scenario::Scenario;
use crate::trajectory::{Point, Trajectory, TrajectoryKind};

/// FAPs fly at a fixed altitude above the ground users.
pub const FAP_ALTITUDE_M: f64 = 6.0;

/// A terminal on the ground with an offered traffic demand.
#[derive(Debug, Clone, Serialize)]
pub struct GroundUser {
    pub position: Point3,
    pub load_mbps: f64,
}

/// Candidate FAP positions: a square lattice over the scenario area at flight
/// altitude, `spacing` meters apart, borders included. Index order is
/// row-major (y outer, x inner), which defines the deterministic tie-break.
pub fn candidate_positions(width_m: f64, height_m: f64, spacing: f64) -> Vec<Point3> {
    let nx = (width_m / spacing).floor() as i32;
    let ny = (height_m / spacing).floor() as i32;
    let mut out = Vec::with_capacity(((nx + 1) * (ny + 1)) as usize);
    for iy in 0..=ny {
        for ix in 0..=nx {
            out.push(Point3 {
                x: ix as f64 * spacing,
                y: iy as f64 * spacing,
                z: FAP_ALTITUDE_M,
            });
        }
    }
    out
}

/// Achievable data rate and link distance for every (position, ground user)
/// pair.
pub struct LinkMatrix {
    pub positions: Vec<Point3>,
    n_gus: usize,
    rates: Vec<f64>,
    dists: Vec<f64>,
}

impl LinkMatrix {
    pub fn rate_mbps(&self, pos: usize, gu: usize) -> f64 {
        self.rates[pos * self.n_gus + gu]
    }

    pub fn dist_m(&self, pos: usize, gu: usize) -> f64 {
        self.dists[pos * self.n_gus + gu]
    }
}

pub fn link_matrix(
    gus: &[GroundUser],
    positions: Vec<Point3>,
    budget: &LinkBudget,
    table: &McsTable,
) -> LinkMatrix {
    let n = gus.len();
    let mut rates = Vec::with_capacity(positions.len() * n);
    let mut dists = Vec::with_capacity(positions.len() * n);
    for p in &positions {
        for gu in gus {
            let d = p.dist(gu.position).max(1e-9);
            let snr = snr_at(d, budget).expect("distance is positive");
            rates.push(capacity_for_snr(snr, table));
            dists.push(d);
        }
    }
    LinkMatrix {
        positions,
        n_gus: n,
        rates,
        dists,
    }
}

/// Per-subset feasibility data for every subset of up to 16 ground users.
///
/// A subset is feasible when some candidate position carries the combined
/// load (airtime at most 1 with every member connected) and some candidate
/// position lies inside every member's uniform-target-MCS coverage sphere,
/// so the group has a non-empty placement area.
pub struct SubsetAnalysis {
    pub n: usize,
    pub best_airtime: Vec<f64>,
    pub best_position: Vec<u32>,
    pub min_max_dist: Vec<f64>,
    pub target_mcs: Vec<i16>,
    pub sphere_radius: Vec<f64>,
    pub feasible: Vec<bool>,
}

pub fn analyze_subsets(
    gus: &[GroundUser],
    lm: &LinkMatrix,
    budget: &LinkBudget,
    table: &McsTable,
) -> SubsetAnalysis {
    let n = gus.len();
    assert!(n <= 16, "exact subset analysis is limited to 16 users");
    let nm = 1usize << n;
    let npos = lm.positions.len();

    // total offered load and target MCS per subset
    let mut load_sum = vec![0.0f64; nm];
    for m in 1..nm {
        let low = m.trailing_zeros() as usize;
        load_sum[m] = load_sum[m & (m - 1)] + gus[low].load_mbps;
    }
    let dmax_by_mcs: Vec<f64> = table
        .entries()
        .iter()
        .map(|e| max_distance_for_snr(e.min_snr_db, budget).unwrap_or(0.0))
        .collect();
    let mut target_mcs = vec![-1i16; nm];
    let mut sphere_radius = vec![0.0f64; nm];
    for m in 1..nm {
        for (i, e) in table.entries().iter().enumerate() {
            if load_sum[m] <= e.rate_mbps {
                target_mcs[m] = i as i16;
                sphere_radius[m] = dmax_by_mcs[i];
                break;
            }
        }
    }

    let mut best_airtime = vec![f64::INFINITY; nm];
    let mut best_position = vec![0u32; nm];
    let mut min_max_dist = vec![f64::INFINITY; nm];
    best_airtime[0] = 0.0;
    min_max_dist[0] = 0.0;

    let mut airtime = vec![0.0f64; nm];
    let mut max_dist = vec![0.0f64; nm];
    let mut cost = vec![0.0f64; n];
    for p in 0..npos {
        for i in 0..n {
            let rate = lm.rate_mbps(p, i);
            cost[i] = if rate > 0.0 {
                gus[i].load_mbps / rate
            } else {
                f64::INFINITY
            };
        }
        for m in 1..nm {
            let low = m.trailing_zeros() as usize;
            let rest = m & (m - 1);
            airtime[m] = airtime[rest] + cost[low];
            max_dist[m] = max_dist[rest].max(lm.dist_m(p, low));
        }
        for m in 1..nm {
            if airtime[m] < best_airtime[m] {
                best_airtime[m] = airtime[m];
                best_position[m] = p as u32;
            }
            if max_dist[m] < min_max_dist[m] {
                min_max_dist[m] = max_dist[m];
            }
        }
    }

    let feasible = (0..nm)
        .map(|m| {
            m != 0
                && best_airtime[m] <= 1.0
                && target_mcs[m] >= 0
                && min_max_dist[m] <= sphere_radius[m]
        })
        .collect();
    SubsetAnalysis {
        n,
        best_airtime,
        best_position,
        min_max_dist,
        target_mcs,
        sphere_radius,
        feasible,
    }
}

/// Best candidate position index for a feasible subset (minimum airtime,
/// lowest grid index on ties), or `None` when the subset is infeasible.
pub fn subset_feasible(subset: u32, analysis: &SubsetAnalysis) -> Option<usize> {
    let m = subset as usize;
    if m < analysis.feasible.len() && analysis.feasible[m] {
        Some(analysis.best_position[m] as usize)
    } else {
        None
    }
}

/// Partitions all ground users into the minimum number of feasible groups.
///
/// Exact for up to 16 users via dynamic programming over the subset lattice,
/// with the lexicographically smallest mask sequence on ties. Groups are
/// returned in creation order, which also fixes the overlap-removal order.
pub fn min_partition(analysis: &SubsetAnalysis) -> Result<Vec<u32>> {
    let n = analysis.n;
    for i in 0..n {
        if !analysis.feasible[1 << i] {
            return Err(Error::InfeasibleSingleton { gu: i });
        }
    }
    let full = (1usize << n) - 1;
    let mut dp = vec![u32::MAX; full + 1];
    dp[0] = 0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let mut best = u32::MAX;
        let mut s = mask;
        while s != 0 {
            if s & low != 0 && analysis.feasible[s] && dp[mask ^ s] != u32::MAX {
                best = best.min(dp[mask ^ s] + 1);
            }
            s = (s - 1) & mask;
        }
        dp[mask] = best;
    }

    let mut groups = Vec::with_capacity(dp[full] as usize);
    let mut rem = full;
    while rem != 0 {
        let low = rem & rem.wrapping_neg();
        let mut pick = usize::MAX;
        let mut s = rem;
        while s != 0 {
            if s & low != 0
                && analysis.feasible[s]
                && dp[rem ^ s] != u32::MAX
                && dp[rem ^ s] + 1 == dp[rem]
                && s < pick
            {
                pick = s;
            }
            s = (s - 1) & rem;
        }
        groups.push(pick as u32);
        rem ^= pick;
    }
    Ok(groups)
}

/// Greedy grouping for instances too large for the exact lattice: grow each
/// group from the lowest-index uncovered user, always adding the user that
/// keeps the group feasible with the least airtime.
fn greedy_partition(
    gus: &[GroundUser],
    lm: &LinkMatrix,
    budget: &LinkBudget,
    table: &McsTable,
) -> Result<Vec<Vec<usize>>> {
    let n = gus.len();
    let npos = lm.positions.len();
    let dmax_by_mcs: Vec<f64> = table
        .entries()
        .iter()
        .map(|e| max_distance_for_snr(e.min_snr_db, budget).unwrap_or(0.0))
        .collect();
    let sphere = |total_load: f64| -> Option<f64> {
        table
            .entries()
            .iter()
            .position(|e| total_load <= e.rate_mbps)
            .map(|i| dmax_by_mcs[i])
    };
    let feasible_with = |members: &[usize]| -> Option<f64> {
        let total: f64 = members.iter().map(|&i| gus[i].load_mbps).sum();
        let radius = sphere(total)?;
        let mut best = f64::INFINITY;
        let mut geo_ok = false;
        for p in 0..npos {
            let mut airtime = 0.0;
            let mut maxd = 0.0f64;
            for &i in members {
                let rate = lm.rate_mbps(p, i);
                if rate <= 0.0 {
                    airtime = f64::INFINITY;
                    break;
                }
                airtime += gus[i].load_mbps / rate;
                maxd = maxd.max(lm.dist_m(p, i));
            }
            if airtime < best {
                best = airtime;
            }
            if airtime <= 1.0 && maxd <= radius {
                geo_ok = true;
            }
        }
        (best <= 1.0 && geo_ok).then_some(best)
    };

    let mut covered = vec![false; n];
    let mut groups = Vec::new();
    for seed in 0..n {
        if covered[seed] {
            continue;
        }
        if feasible_with(&[seed]).is_none() {
            return Err(Error::InfeasibleSingleton { gu: seed });
        }
        let mut members = vec![seed];
        covered[seed] = true;
        loop {
            let mut best: Option<(f64, usize)> = None;
            for j in 0..n {
                if covered[j] {
                    continue;
                }
                let mut trial = members.clone();
                trial.push(j);
                trial.sort_unstable();
                if let Some(airtime) = feasible_with(&trial) {
                    if best.map_or(true, |(a, _)| airtime < a) {
                        best = Some((airtime, j));
                    }
                }
            }
            match best {
                Some((_, j)) => {
                    members.push(j);
                    members.sort_unstable();
                    covered[j] = true;
                }
                None => break,
            }
        }
        groups.push(members);
    }
    Ok(groups)
}

/// Smallest uniform MCS able to carry the group's combined load, and its SNR
/// threshold: the per-group target SNR.
pub fn group_target_snr(member_loads: &[f64], table: &McsTable) -> Result<(u8, f64)> {
    let total: f64 = member_loads.iter().sum();
    for e in table.entries() {
        if total <= e.rate_mbps {
            return Ok((e.mcs, e.min_snr_db));
        }
    }
    Err(Error::GroupOverCapacity { total_mbps: total })
}

/// Energy outcome of one trajectory candidate for both airframes. `None`
/// marks an airframe that cannot fly the candidate.
#[derive(Debug, Clone)]
pub struct CandidateEval {
    pub trajectory: Trajectory,
    pub rotary: Option<TrajectoryEnergy>,
    pub fixed: Option<TrajectoryEnergy>,
}

impl CandidateEval {
    pub fn kind(&self) -> TrajectoryKind {
        self.trajectory.kind()
    }

    fn energy(&self, uav: UavKind) -> Option<&TrajectoryEnergy> {
        match uav {
            UavKind::Rotary => self.rotary.as_ref(),
            UavKind::Fixed => self.fixed.as_ref(),
        }
    }
}

/// The chosen trajectory for one airframe.
#[derive(Debug, Clone, Serialize)]
pub struct Selection {
    pub kind: TrajectoryKind,
    pub avg_power_w: f64,
    pub energy_per_hour_j: f64,
}

/// Picks the feasible candidate with the lowest hourly energy; exact ties go
/// to the earlier kind in the order Circular, InnerElliptic, Elliptic, Hover.
pub fn select_trajectory(candidates: &[CandidateEval], uav: UavKind) -> Option<Selection> {
    let mut best: Option<(f64, u8, Selection)> = None;
    for c in candidates {
        let Some(e) = c.energy(uav) else { continue };
        let rank = crate::energy::kind_rank(c.kind());
        let better = match &best {
            None => true,
            Some((be, br, _)) => {
                e.energy_per_hour_j < *be || (e.energy_per_hour_j == *be && rank < *br)
            }
        };
        if better {
            best = Some((
                e.energy_per_hour_j,
                rank,
                Selection {
                    kind: c.kind(),
                    avg_power_w: e.avg_power_w,
                    energy_per_hour_j: e.energy_per_hour_j,
                },
            ));
        }
    }
    best.map(|(_, _, sel)| sel)
}

/// Deployment plan for one FAP: its group, placement-area summary, candidate
/// trajectories with per-airframe energies, and the per-airframe selection.
#[derive(Debug, Clone)]
pub struct FapPlan {
    pub group: Vec<usize>,
    pub target_mcs: u8,
    pub target_snr_db: f64,
    pub max_link_distance_m: f64,
    pub best_position: Point3,
    pub area_cells: usize,
    pub centroid: Option<Point>,
    pub circular_radius_m: Option<f64>,
    pub candidates: Vec<CandidateEval>,
    pub rotary: Option<Selection>,
    pub fixed: Option<Selection>,
}

impl FapPlan {
    pub fn selection(&self, uav: UavKind) -> Option<&Selection> {
        match uav {
            UavKind::Rotary => self.rotary.as_ref(),
            UavKind::Fixed => self.fixed.as_ref(),
        }
    }

    pub fn candidate(&self, kind: TrajectoryKind) -> Option<&CandidateEval> {
        self.candidates.iter().find(|c| c.kind() == kind)
    }
}

/// Runs the full placement pipeline for a scenario.
pub fn plan(scenario: &Scenario, config: &SimConfig, table: &McsTable) -> Result<Vec<FapPlan>> {
    scenario.validate()?;
    config.validate()?;
    let gus = &scenario.gus;
    let res = scenario.grid_res_m;
    let positions = candidate_positions(scenario.width_m, scenario.height_m, res);
    let lm = link_matrix(gus, positions, &config.link, table);

    let groups: Vec<Vec<usize>> = if gus.len() <= 16 {
        let analysis = analyze_subsets(gus, &lm, &config.link, table);
        min_partition(&analysis)?
            .into_iter()
            .map(|mask| (0..gus.len()).filter(|i| mask >> i & 1 == 1).collect())
            .collect()
    } else {
        greedy_partition(gus, &lm, &config.link, table)?
    };

    let rotary_model = UavModel::Rotary(config.rotary.clone());
    let fixed_model = UavModel::Fixed(config.fixed.clone());
    let mut earlier: Vec<IntersectionArea> = Vec::new();
    let mut plans = Vec::with_capacity(groups.len());

    for members in groups {
        let loads: Vec<f64> = members.iter().map(|&i| gus[i].load_mbps).collect();
        let (target_mcs, target_snr_db) = group_target_snr(&loads, table)?;
        let d_max = max_distance_for_snr(target_snr_db, &config.link)?;

        let mut discs = Vec::with_capacity(members.len());
        let mut sphere_below_altitude = false;
        for &i in &members {
            match sphere_to_disc(gus[i].position, d_max, FAP_ALTITUDE_M) {
                Some(d) => discs.push(d),
                None => {
                    sphere_below_altitude = true;
                    break;
                }
            }
        }
        let area = if sphere_below_altitude {
            IntersectionArea::from_cells(res, [])
        } else {
            let bounds = discs
                .iter()
                .skip(1)
                .fold(discs[0].bbox(), |acc, d| acc.intersect(d.bbox()));
            let raw = intersect_discs(&discs, bounds, res)?;
            subtract_overlaps(raw, &earlier)
        };
        earlier.push(area.clone());

        let best_position = best_group_position(&members, gus, &lm);
        let plan = build_fap_plan(
            members,
            target_mcs,
            target_snr_db,
            d_max,
            best_position,
            &area,
            &rotary_model,
            &fixed_model,
        )?;
        plans.push(plan);
    }
    Ok(plans)
}

fn best_group_position(members: &[usize], gus: &[GroundUser], lm: &LinkMatrix) -> Point3 {
    let mut best = (f64::INFINITY, 0usize);
    for p in 0..lm.positions.len() {
        let mut airtime = 0.0;
        for &i in members {
            let rate = lm.rate_mbps(p, i);
            if rate <= 0.0 {
                airtime = f64::INFINITY;
                break;
            }
            airtime += gus[i].load_mbps / rate;
        }
        if airtime < best.0 {
            best = (airtime, p);
        }
    }
    lm.positions[best.1]
}

#[allow(clippy::too_many_arguments)]
fn build_fap_plan(
    group: Vec<usize>,
    target_mcs: u8,
    target_snr_db: f64,
    max_link_distance_m: f64,
    best_position: Point3,
    area: &IntersectionArea,
    rotary_model: &UavModel,
    fixed_model: &UavModel,
) -> Result<FapPlan> {
    let res = area.res();
    let hover_fallback = |hover_at: Point, centroid, radius, cells| -> Result<FapPlan> {
        let hover = Trajectory::hover(hover_at);
        let eval = evaluate_candidate(hover, rotary_model, fixed_model)?;
        let candidates = vec![eval];
        let rotary = select_trajectory(&candidates, UavKind::Rotary);
        Ok(FapPlan {
            group: group.clone(),
            target_mcs,
            target_snr_db,
            max_link_distance_m,
            best_position,
            area_cells: cells,
            centroid,
            circular_radius_m: radius,
            candidates,
            rotary,
            fixed: None,
        })
    };

    if area.is_empty() {
        // no placement area left: rotary hovers at the group's best candidate
        // position, fixed-wing cannot serve the group
        return hover_fallback(best_position.ground(), None, None, 0);
    }
    let shape = centroid_and_boundary(area)?;
    if !area.contains_point(shape.centroid) {
        return hover_fallback(best_position.ground(), Some(shape.centroid), None, area.cell_count());
    }
    if shape.min_dist < res {
        return hover_fallback(
            shape.centroid,
            Some(shape.centroid),
            Some(shape.min_dist),
            area.cell_count(),
        );
    }

    let mut candidates = Vec::with_capacity(4);
    candidates.push(evaluate_candidate(
        build_circular(&shape)?,
        rotary_model,
        fixed_model,
    )?);
    if let Some(inner) = build_inner_elliptic(&shape, res) {
        candidates.push(evaluate_candidate(inner, rotary_model, fixed_model)?);
    }
    candidates.push(evaluate_candidate(
        build_elliptic(area, &shape),
        rotary_model,
        fixed_model,
    )?);
    candidates.push(evaluate_candidate(
        Trajectory::hover(shape.centroid),
        rotary_model,
        fixed_model,
    )?);

    let rotary = select_trajectory(&candidates, UavKind::Rotary);
    let fixed = select_trajectory(&candidates, UavKind::Fixed);
    Ok(FapPlan {
        group,
        target_mcs,
        target_snr_db,
        max_link_distance_m,
        best_position,
        area_cells: area.cell_count(),
        centroid: Some(shape.centroid),
        circular_radius_m: Some(shape.min_dist),
        candidates,
        rotary,
        fixed,
    })
}

fn evaluate_candidate(
    trajectory: Trajectory,
    rotary_model: &UavModel,
    fixed_model: &UavModel,
) -> Result<CandidateEval> {
    let rotary = Some(trajectory_energy(&trajectory, rotary_model)?);
    let r_min = match fixed_model {
        UavModel::Fixed(p) => p.min_turn_radius_m,
        UavModel::Rotary(_) => unreachable!("fixed model expected"),
    };
    let fixed = if fixed_wing_feasible(&trajectory, r_min) {
        Some(trajectory_energy(&trajectory, fixed_model)?)
    } else {
        None
    };
    Ok(CandidateEval {
        trajectory,
        rotary,
        fixed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::reference_scenarios;

    fn setup() -> (SimConfig, McsTable) {
        (SimConfig::default(), McsTable::default_table())
    }

    fn small_scenario(gus: Vec<GroundUser>) -> Scenario {
        Scenario {
            width_m: 100.0,
            height_m: 100.0,
            gus,
            seed: 0,
            grid_res_m: 1.0,
        }
    }

    fn gu(x: f64, y: f64, load: f64) -> GroundUser {
        GroundUser {
            position: Point3 { x, y, z: 0.0 },
            load_mbps: load,
        }
    }

    #[test]
    fn grid_has_expected_size_and_order() {
        let grid = candidate_positions(100.0, 100.0, 1.0);
        assert_eq!(grid.len(), 101 * 101);
        assert_eq!(grid[0], Point3 { x: 0.0, y: 0.0, z: FAP_ALTITUDE_M });
        assert_eq!(grid[1].x, 1.0);
        assert_eq!(grid[101].y, 1.0);
    }

    #[test]
    fn link_matrix_reference_points() {
        let (cfg, table) = setup();
        let gus = vec![gu(50.0, 50.0, 10.0)];
        let lm = link_matrix(&gus, candidate_positions(100.0, 100.0, 1.0), &cfg.link, &table);
        // directly overhead: 6 m link gets the top MCS rate
        let overhead = 50 * 101 + 50;
        assert_eq!(lm.rate_mbps(overhead, 0), 866.7);
        assert!((lm.dist_m(overhead, 0) - 6.0).abs() < 1e-12);
        // a user beyond the link budget has no rate anywhere near the far corner
        let gus = vec![gu(295.0, 295.0, 10.0)];
        let lm = link_matrix(&gus, candidate_positions(300.0, 300.0, 1.0), &cfg.link, &table);
        let corner = 0;
        assert!(lm.dist_m(corner, 0) > 200.0);
        assert_eq!(lm.rate_mbps(corner, 0), 0.0);
    }

    #[test]
    fn link_rate_monotone_in_distance() {
        let (cfg, table) = setup();
        let gus = vec![gu(0.0, 0.0, 10.0)];
        let lm = link_matrix(&gus, candidate_positions(100.0, 100.0, 1.0), &cfg.link, &table);
        let mut prev = f64::INFINITY;
        for ix in 0..=100usize {
            let rate = lm.rate_mbps(ix, 0);
            assert!(rate <= prev, "rate must not grow with distance");
            prev = rate;
        }
    }

    #[test]
    fn singleton_feasibility() {
        let (cfg, table) = setup();
        let gus = vec![gu(50.0, 50.0, 500.0)];
        let lm = link_matrix(&gus, candidate_positions(100.0, 100.0, 1.0), &cfg.link, &table);
        let analysis = analyze_subsets(&gus, &lm, &cfg.link, &table);
        assert!(subset_feasible(1, &analysis).is_some());

        // offered load beyond the top MCS rate is infeasible everywhere
        let gus = vec![gu(50.0, 50.0, 900.0)];
        let lm = link_matrix(&gus, candidate_positions(100.0, 100.0, 1.0), &cfg.link, &table);
        let analysis = analyze_subsets(&gus, &lm, &cfg.link, &table);
        assert!(subset_feasible(1, &analysis).is_none());
    }

    #[test]
    fn colocated_pair_feasible_under_top_rate() {
        let (cfg, table) = setup();
        let gus = vec![gu(50.0, 50.0, 200.0), gu(50.0, 50.0, 117.0)];
        let lm = link_matrix(&gus, candidate_positions(100.0, 100.0, 1.0), &cfg.link, &table);
        let analysis = analyze_subsets(&gus, &lm, &cfg.link, &table);
        assert!(subset_feasible(0b11, &analysis).is_some());
        let p = analysis.best_position[0b11] as usize;
        assert!(analysis.best_airtime[0b11] <= 317.0 / 866.7 + 1e-9);
        assert!((lm.positions[p].x - 50.0).abs() <= 1.0);
    }

    #[test]
    fn two_gu_reference_is_one_group() {
        let (cfg, table) = setup();
        let sc = &reference_scenarios()[0];
        let lm = link_matrix(
            &sc.gus,
            candidate_positions(sc.width_m, sc.height_m, sc.grid_res_m),
            &cfg.link,
            &table,
        );
        let analysis = analyze_subsets(&sc.gus, &lm, &cfg.link, &table);
        let groups = min_partition(&analysis).unwrap();
        assert_eq!(groups, vec![0b11]);
    }

    #[test]
    fn opposite_corners_with_heavy_loads_split() {
        let (cfg, table) = setup();
        let gus = vec![gu(0.0, 0.0, 500.0), gu(100.0, 100.0, 500.0)];
        let lm = link_matrix(&gus, candidate_positions(100.0, 100.0, 1.0), &cfg.link, &table);
        let analysis = analyze_subsets(&gus, &lm, &cfg.link, &table);
        let groups = min_partition(&analysis).unwrap();
        assert_eq!(groups.len(), 2, "no common feasible position");
    }

    #[test]
    fn colocated_tiny_loads_merge() {
        let (cfg, table) = setup();
        let gus = (0..6).map(|_| gu(50.0, 50.0, 1.0)).collect::<Vec<_>>();
        let lm = link_matrix(&gus, candidate_positions(100.0, 100.0, 1.0), &cfg.link, &table);
        let analysis = analyze_subsets(&gus, &lm, &cfg.link, &table);
        let groups = min_partition(&analysis).unwrap();
        assert_eq!(groups.len(), 1);
    }

    #[test]
    fn infeasible_singleton_is_reported() {
        let (cfg, table) = setup();
        let gus = vec![gu(50.0, 50.0, 10.0), gu(60.0, 60.0, 2000.0)];
        let lm = link_matrix(&gus, candidate_positions(100.0, 100.0, 1.0), &cfg.link, &table);
        let analysis = analyze_subsets(&gus, &lm, &cfg.link, &table);
        match min_partition(&analysis) {
            Err(Error::InfeasibleSingleton { gu }) => assert_eq!(gu, 1),
            other => panic!("expected infeasible singleton, got {other:?}"),
        }
    }

    #[test]
    fn target_snr_for_mixed_loads() {
        let table = McsTable::default_table();
        let (mcs, snr) = group_target_snr(&[200.0, 117.0], &table).unwrap();
        assert_eq!(mcs, 4, "317 Mbit/s needs the 390 Mbit/s rate");
        assert_eq!(snr, 25.0);
        let (mcs, _) = group_target_snr(&[64.0], &table).unwrap();
        assert_eq!(mcs, 0);
        assert!(matches!(
            group_target_snr(&[500.0, 500.0], &table),
            Err(Error::GroupOverCapacity { .. })
        ));
    }

    #[test]
    fn selection_prefers_lowest_energy_then_kind_order() {
        let (cfg, _) = setup();
        let rotary_model = UavModel::Rotary(cfg.rotary.clone());
        let fixed_model = UavModel::Fixed(cfg.fixed.clone());
        let circle = |kind, r| {
            evaluate_candidate(
                Trajectory::circle(kind, Point { x: 0.0, y: 0.0 }, r).unwrap(),
                &rotary_model,
                &fixed_model,
            )
            .unwrap()
        };
        // identical geometry under two kinds: tie goes to Circular
        let cands = vec![
            circle(TrajectoryKind::Elliptic, 50.0),
            circle(TrajectoryKind::Circular, 50.0),
        ];
        let sel = select_trajectory(&cands, UavKind::Rotary).unwrap();
        assert_eq!(sel.kind, TrajectoryKind::Circular);
        // a clearly cheaper candidate wins regardless of order
        let cands = vec![circle(TrajectoryKind::Circular, 10.0), circle(TrajectoryKind::Elliptic, 80.0)];
        let sel = select_trajectory(&cands, UavKind::Fixed).unwrap();
        assert_eq!(sel.kind, TrajectoryKind::Elliptic);
    }

    #[test]
    fn tight_pair_leaves_fixed_wing_out() {
        // heavy combined load forces a small coverage sphere; every arc of
        // every candidate stays under the minimum turn radius
        let (cfg, table) = setup();
        let sc = small_scenario(vec![gu(46.0, 50.0, 430.0), gu(54.0, 50.0, 430.0)]);
        let plans = plan(&sc, &cfg, &table).unwrap();
        assert_eq!(plans.len(), 1);
        let p = &plans[0];
        let r_c = p.circular_radius_m.unwrap();
        assert!(r_c < 5.0, "lens waist must be tight, got {r_c}");
        assert!(p.fixed.is_none(), "fixed-wing should be infeasible");
        assert!(p.rotary.is_some(), "rotary still flies");
    }

    #[test]
    fn degenerate_area_falls_back_to_hover() {
        // sphere intersection shrinks below one raster cell
        let (cfg, table) = setup();
        let sc = small_scenario(vec![gu(44.0, 50.0, 430.0), gu(56.0, 50.0, 430.0)]);
        let plans = plan(&sc, &cfg, &table).unwrap();
        assert_eq!(plans.len(), 1);
        let p = &plans[0];
        assert!(p.fixed.is_none());
        assert_eq!(p.rotary.as_ref().unwrap().kind, TrajectoryKind::Hover);
        let hover_e = p.rotary.as_ref().unwrap().energy_per_hour_j;
        assert!((hover_e - 168.49 * 3600.0).abs() < 1e-6);
    }

    #[test]
    fn groups_partition_all_users() {
        let (cfg, table) = setup();
        let sc = &reference_scenarios()[2];
        let plans = plan(sc, &cfg, &table).unwrap();
        let mut seen = vec![false; sc.gus.len()];
        for p in &plans {
            for &i in &p.group {
                assert!(!seen[i], "user {i} in two groups");
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s), "every user must be covered");
    }

    #[test]
    fn selected_energy_is_minimal_among_feasible() {
        let (cfg, table) = setup();
        for sc in reference_scenarios() {
            for p in plan(&sc, &cfg, &table).unwrap() {
                for uav in [UavKind::Rotary, UavKind::Fixed] {
                    if let Some(sel) = p.selection(uav) {
                        for c in &p.candidates {
                            if let Some(e) = match uav {
                                UavKind::Rotary => c.rotary.as_ref(),
                                UavKind::Fixed => c.fixed.as_ref(),
                            } {
                                assert!(
                                    sel.energy_per_hour_j <= e.energy_per_hour_j + 1e-9,
                                    "{uav}: {} not minimal",
                                    sel.kind
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn greedy_partition_handles_large_instances() {
        let (cfg, table) = setup();
        let gus: Vec<GroundUser> = (0..18)
            .map(|i| gu(30.0 + (i % 6) as f64, 40.0 + (i / 6) as f64, 2.0))
            .collect();
        let sc = small_scenario(gus);
        let plans = plan(&sc, &cfg, &table).unwrap();
        let covered: usize = plans.iter().map(|p| p.group.len()).sum();
        assert_eq!(covered, 18);
        assert_eq!(plans.len(), 1, "co-located light users fit one FAP");
    }
}
