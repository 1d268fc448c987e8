//! Scenario file parsing and output emission: JSON reports, CSV tables, SVG
//! charts, and waypoint traces.
//!
//! All numeric output is locale-independent and the pipeline is
//! deterministic, so identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::energy::{trajectory_energy, TrajectoryEnergy, UavKind, UavModel};
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::planner::{FapPlan, GroundUser, FAP_ALTITUDE_M};
use crate::scenario::{BatchStats, Scenario};
use crate::trajectory::TrajectoryKind;

// ---------------------------------------------------------------------------
// scenario files

#[derive(Debug, Serialize, Deserialize)]
struct ScenarioFile {
    area: AreaSpec,
    gus: Vec<GuSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grid_res: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct AreaSpec {
    width: f64,
    height: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct GuSpec {
    x: f64,
    y: f64,
    z: f64,
    load_mbps: f64,
}

pub fn parse_scenario_json(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("scenario: {e}")))?;
    let scenario = Scenario {
        width_m: file.area.width,
        height_m: file.area.height,
        gus: file
            .gus
            .into_iter()
            .map(|g| GroundUser {
                position: Point3 { x: g.x, y: g.y, z: g.z },
                load_mbps: g.load_mbps,
            })
            .collect(),
        seed: 0,
        grid_res_m: file.grid_res.unwrap_or(1.0),
    };
    scenario.validate()?;
    Ok(scenario)
}

pub fn parse_scenario_file(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario_json(&text)
}

pub fn scenario_to_json(scenario: &Scenario) -> String {
    let file = ScenarioFile {
        area: AreaSpec {
            width: scenario.width_m,
            height: scenario.height_m,
        },
        gus: scenario
            .gus
            .iter()
            .map(|g| GuSpec {
                x: g.position.x,
                y: g.position.y,
                z: g.position.z,
                load_mbps: g.load_mbps,
            })
            .collect(),
        grid_res: Some(scenario.grid_res_m),
    };
    serde_json::to_string_pretty(&file).expect("scenario serializes")
}

// ---------------------------------------------------------------------------
// run reports

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub gu_count: usize,
    pub area_m: [f64; 2],
    pub grid_res_m: f64,
    pub faps: Vec<FapReport>,
}

#[derive(Debug, Serialize)]
pub struct FapReport {
    pub fap: usize,
    pub group: Vec<usize>,
    pub target_mcs: u8,
    pub target_snr_db: f64,
    pub max_link_distance_m: f64,
    pub area_cells: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centroid_m: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circular_radius_m: Option<f64>,
    pub candidates: Vec<CandidateReport>,
    pub rotary: Option<SelectionReport>,
    pub fixed: Option<SelectionReport>,
}

#[derive(Debug, Serialize)]
pub struct CandidateReport {
    pub kind: String,
    pub rotary: Option<EnergyFigures>,
    pub fixed: Option<EnergyFigures>,
}

#[derive(Debug, Serialize)]
pub struct EnergyFigures {
    pub avg_power_w: f64,
    pub energy_per_hour_kj: f64,
}

#[derive(Debug, Serialize)]
pub struct SelectionReport {
    pub kind: String,
    pub avg_power_w: f64,
    pub energy_per_hour_kj: f64,
}

impl EnergyFigures {
    fn from_energy(e: &TrajectoryEnergy) -> Self {
        Self {
            avg_power_w: e.avg_power_w,
            energy_per_hour_kj: e.energy_per_hour_j / 1000.0,
        }
    }
}

/// Which airframes a report should cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UavFilter {
    Rotary,
    Fixed,
    Both,
}

impl UavFilter {
    pub fn rotary(self) -> bool {
        matches!(self, UavFilter::Rotary | UavFilter::Both)
    }

    pub fn fixed(self) -> bool {
        matches!(self, UavFilter::Fixed | UavFilter::Both)
    }
}

pub fn run_report(scenario: &Scenario, plans: &[FapPlan], filter: UavFilter) -> RunReport {
    let faps = plans
        .iter()
        .enumerate()
        .map(|(i, p)| FapReport {
            fap: i,
            group: p.group.clone(),
            target_mcs: p.target_mcs,
            target_snr_db: p.target_snr_db,
            max_link_distance_m: p.max_link_distance_m,
            area_cells: p.area_cells,
            centroid_m: p.centroid.map(|c| [c.x, c.y]),
            circular_radius_m: p.circular_radius_m,
            candidates: p
                .candidates
                .iter()
                .map(|c| CandidateReport {
                    kind: c.kind().to_string(),
                    rotary: c
                        .rotary
                        .as_ref()
                        .filter(|_| filter.rotary())
                        .map(EnergyFigures::from_energy),
                    fixed: c
                        .fixed
                        .as_ref()
                        .filter(|_| filter.fixed())
                        .map(EnergyFigures::from_energy),
                })
                .collect(),
            rotary: p
                .rotary
                .as_ref()
                .filter(|_| filter.rotary())
                .map(|s| SelectionReport {
                    kind: s.kind.to_string(),
                    avg_power_w: s.avg_power_w,
                    energy_per_hour_kj: s.energy_per_hour_j / 1000.0,
                }),
            fixed: p
                .fixed
                .as_ref()
                .filter(|_| filter.fixed())
                .map(|s| SelectionReport {
                    kind: s.kind.to_string(),
                    avg_power_w: s.avg_power_w,
                    energy_per_hour_kj: s.energy_per_hour_j / 1000.0,
                }),
        })
        .collect();
    RunReport {
        gu_count: scenario.gus.len(),
        area_m: [scenario.width_m, scenario.height_m],
        grid_res_m: scenario.grid_res_m,
        faps,
    }
}

/// One row per (FAP, airframe, candidate kind); infeasible combinations carry
/// the literal `infeasible` in the numeric cells.
pub fn run_results_csv(plans: &[FapPlan], filter: UavFilter) -> String {
    let mut out = String::from("fap,uav,kind,avg_power_w,energy_kj_per_h,selected\n");
    for (i, p) in plans.iter().enumerate() {
        for uav in [UavKind::Rotary, UavKind::Fixed] {
            let included = match uav {
                UavKind::Rotary => filter.rotary(),
                UavKind::Fixed => filter.fixed(),
            };
            if !included {
                continue;
            }
            for c in &p.candidates {
                let energy = match uav {
                    UavKind::Rotary => c.rotary.as_ref(),
                    UavKind::Fixed => c.fixed.as_ref(),
                };
                let selected = p
                    .selection(uav)
                    .map(|s| s.kind == c.kind())
                    .unwrap_or(false);
                match energy {
                    Some(e) => {
                        let _ = writeln!(
                            out,
                            "{},{},{},{:.3},{:.3},{}",
                            i,
                            uav,
                            c.kind(),
                            e.avg_power_w,
                            e.energy_per_hour_j / 1000.0,
                            if selected { "yes" } else { "no" }
                        );
                    }
                    None => {
                        let _ = writeln!(
                            out,
                            "{},{},{},infeasible,infeasible,no",
                            i,
                            uav,
                            c.kind()
                        );
                    }
                }
            }
        }
    }
    out
}

/// Grouped bar chart of selected hourly energy per FAP and airframe.
/// Infeasible airframes simply have no bar.
pub fn energy_svg(plans: &[FapPlan], filter: UavFilter) -> String {
    let mut bars: Vec<(usize, UavKind, f64)> = Vec::new();
    for (i, p) in plans.iter().enumerate() {
        if filter.rotary() {
            if let Some(s) = &p.rotary {
                bars.push((i, UavKind::Rotary, s.energy_per_hour_j / 1000.0));
            }
        }
        if filter.fixed() {
            if let Some(s) = &p.fixed {
                bars.push((i, UavKind::Fixed, s.energy_per_hour_j / 1000.0));
            }
        }
    }
    let max_kj = bars.iter().map(|b| b.2).fold(1.0_f64, f64::max);
    let (w, h, margin, plot_h) = (80 + plans.len().max(1) * 120, 320, 50.0, 240.0);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">Energy per hour by FAP (kJ)</text>"#,
        w / 2
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{margin}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        margin + plot_h,
        w as f64 - 20.0,
        margin + plot_h
    );
    for (i, uav, kj) in &bars {
        let group_x = margin + 20.0 + *i as f64 * 120.0;
        let (dx, fill) = match uav {
            UavKind::Rotary => (0.0, "#4878cf"),
            UavKind::Fixed => (42.0, "#d65f5f"),
        };
        let bh = kj / max_kj * plot_h;
        let x = group_x + dx;
        let y = margin + plot_h - bh;
        let _ = writeln!(
            svg,
            r#"<rect x="{x:.1}" y="{y:.1}" width="36" height="{bh:.1}" fill="{fill}"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="10">{kj:.0}</text>"#,
            x + 18.0,
            y - 4.0
        );
    }
    for i in 0..plans.len() {
        let x = margin + 20.0 + i as f64 * 120.0 + 39.0;
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">FAP {i}</text>"#,
            margin + plot_h + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r##"<rect x="{margin}" y="{}" width="12" height="12" fill="#4878cf"/><text x="{}" y="{}">rotary</text>"##,
        h as f64 - 24.0,
        margin + 16.0,
        h as f64 - 14.0
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{}" y="{}" width="12" height="12" fill="#d65f5f"/><text x="{}" y="{}">fixed</text>"##,
        margin + 80.0,
        h as f64 - 24.0,
        margin + 96.0,
        h as f64 - 14.0
    );
    svg.push_str("</svg>\n");
    svg
}

/// Writes report.json, results.csv and energy.svg for a planning run.
pub fn write_run_outputs(
    dir: &Path,
    scenario: &Scenario,
    plans: &[FapPlan],
    filter: UavFilter,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let report = run_report(scenario, plans, filter);
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(dir.join("report.json"), json + "\n")?;
    std::fs::write(dir.join("results.csv"), run_results_csv(plans, filter))?;
    std::fs::write(dir.join("energy.svg"), energy_svg(plans, filter))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// batch reports

#[derive(Debug, Serialize)]
pub struct BatchReport<'a> {
    pub gu_count: usize,
    pub scenario_count: usize,
    pub seed: u64,
    pub both_feasible_count: usize,
    pub infeasible_fixed_count: usize,
    pub rotary_failed_count: usize,
    pub infeasible_fixed_percent: f64,
    pub percentiles: &'a Option<crate::scenario::Percentiles>,
}

pub fn batch_results_csv(stats: &BatchStats) -> String {
    let mut out =
        String::from("scenario,fap_count,rotary_kj_per_h,fixed_kj_per_h,percent_increase\n");
    for o in &stats.outcomes {
        let rot = o
            .rotary_j_per_h
            .map(|v| format!("{:.3}", v / 1000.0))
            .unwrap_or_else(|| "failed".into());
        let fix = o
            .fixed_j_per_h
            .map(|v| format!("{:.3}", v / 1000.0))
            .unwrap_or_else(|| {
                if o.planned {
                    "infeasible".into()
                } else {
                    "failed".into()
                }
            });
        let pct = o
            .percent_increase
            .map(|v| format!("{v:.2}"))
            .unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{},{}", o.index, o.fap_count, rot, fix, pct);
    }
    out
}

/// Writes report.json and results.csv for a batch run.
pub fn write_batch_outputs(dir: &Path, stats: &BatchStats) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let report = BatchReport {
        gu_count: stats.gu_count,
        scenario_count: stats.scenario_count,
        seed: stats.seed,
        both_feasible_count: stats.both_feasible_count,
        infeasible_fixed_count: stats.infeasible_fixed_count,
        rotary_failed_count: stats.rotary_failed_count,
        infeasible_fixed_percent: 100.0 * stats.infeasible_fixed_count as f64
            / stats.scenario_count as f64,
        percentiles: &stats.percentiles,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(dir.join("report.json"), json + "\n")?;
    std::fs::write(dir.join("results.csv"), batch_results_csv(stats))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// movement traces

/// Samples the selected trajectory of one FAP every `dt` seconds for
/// `duration` seconds (both endpoints included): `t,x,y,z,speed` rows with
/// the per-segment optimized speeds and constant flight altitude.
pub fn trace_csv(
    plan: &FapPlan,
    fap_index: usize,
    uav: UavKind,
    config: &SimConfig,
    duration: f64,
    dt: f64,
) -> Result<String> {
    if !(duration >= 0.0 && dt > 0.0) {
        return Err(Error::Validation(format!(
            "need duration >= 0 and dt > 0, got {duration} and {dt}"
        )));
    }
    let selection = plan.selection(uav).ok_or(Error::InfeasibleSelection {
        uav: match uav {
            UavKind::Rotary => "rotary",
            UavKind::Fixed => "fixed",
        },
        fap: fap_index,
    })?;
    let candidate = plan
        .candidate(selection.kind)
        .expect("selected kind is among candidates");
    let trajectory = &candidate.trajectory;

    let model = match uav {
        UavKind::Rotary => UavModel::Rotary(config.rotary.clone()),
        UavKind::Fixed => UavModel::Fixed(config.fixed.clone()),
    };
    let mut out = String::from("t,x,y,z,speed\n");
    let steps = (duration / dt + 1e-9).floor() as usize;

    if selection.kind == TrajectoryKind::Hover {
        let p = match trajectory {
            crate::trajectory::Trajectory::Hover { position } => *position,
            _ => unreachable!("hover selection carries a hover trajectory"),
        };
        for k in 0..=steps {
            let t = k as f64 * dt;
            let _ = writeln!(
                out,
                "{t:.3},{:.6},{:.6},{FAP_ALTITUDE_M:.6},0.000000",
                p.x, p.y
            );
        }
        return Ok(out);
    }

    let energy = trajectory_energy(trajectory, &model)?;
    let lap = energy.lap_time_s;
    // cumulative segment end times and start arc lengths
    let mut seg_end_t = Vec::with_capacity(energy.per_segment.len());
    let mut acc = 0.0;
    for s in &energy.per_segment {
        acc += s.duration_s;
        seg_end_t.push(acc);
    }
    let segments = trajectory.segments();
    for k in 0..=steps {
        let t = k as f64 * dt;
        let mut tau = t % lap;
        if tau < 0.0 {
            tau = 0.0;
        }
        let mut idx = seg_end_t
            .iter()
            .position(|&end| tau <= end + 1e-12)
            .unwrap_or(segments.len() - 1);
        if idx >= segments.len() {
            idx = segments.len() - 1;
        }
        let seg_start_t = if idx == 0 { 0.0 } else { seg_end_t[idx - 1] };
        let se = &energy.per_segment[idx];
        let s_in_seg = ((tau - seg_start_t) * se.speed_mps).clamp(0.0, se.length_m);
        let p = segments[idx].point_at(s_in_seg);
        let _ = writeln!(
            out,
            "{t:.3},{:.6},{:.6},{FAP_ALTITUDE_M:.6},{:.6}",
            p.x, p.y, se.speed_mps
        );
    }
    Ok(out)
}
