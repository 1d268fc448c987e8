//! Closed flight trajectories built from line and arc segments.

use serde::{Deserialize, Serialize};

use crate::energy::Radius;
use crate::error::{Error, Result};

/// Planar position, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn dist(self, other: Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

/// A trajectory segment. Arcs are parameterized by center, radius, start
/// angle, and signed sweep (positive counterclockwise).
#[derive(Debug, Clone, Copy)]
pub enum Segment {
    Line {
        start: Point,
        end: Point,
    },
    Arc {
        center: Point,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
}

impl Segment {
    pub fn length(&self) -> f64 {
        match self {
            Segment::Line { start, end } => start.dist(*end),
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    pub fn radius(&self) -> Radius {
        match self {
            Segment::Line { .. } => Radius::Straight,
            Segment::Arc { radius, .. } => Radius::Turn(*radius),
        }
    }

    pub fn start_point(&self) -> Point {
        match self {
            Segment::Line { start, .. } => *start,
            Segment::Arc {
                center,
                radius,
                start_angle,
                ..
            } => Point {
                x: center.x + radius * start_angle.cos(),
                y: center.y + radius * start_angle.sin(),
            },
        }
    }

    pub fn end_point(&self) -> Point {
        match self {
            Segment::Line { end, .. } => *end,
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let th = start_angle + sweep;
                Point {
                    x: center.x + radius * th.cos(),
                    y: center.y + radius * th.sin(),
                }
            }
        }
    }

    /// Position after travelling arc length `s` from the segment start.
    pub fn point_at(&self, s: f64) -> Point {
        match self {
            Segment::Line { start, end } => {
                let len = self.length();
                let f = if len > 0.0 { (s / len).clamp(0.0, 1.0) } else { 0.0 };
                Point {
                    x: start.x + f * (end.x - start.x),
                    y: start.y + f * (end.y - start.y),
                }
            }
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let th = start_angle + sweep.signum() * (s / radius);
                Point {
                    x: center.x + radius * th.cos(),
                    y: center.y + radius * th.sin(),
                }
            }
        }
    }

    /// Unit tangent in the travel direction after arc length `s`.
    pub fn tangent_at(&self, s: f64) -> Point {
        match self {
            Segment::Line { start, end } => {
                let len = self.length();
                Point {
                    x: (end.x - start.x) / len,
                    y: (end.y - start.y) / len,
                }
            }
            Segment::Arc {
                radius,
                start_angle,
                sweep,
                ..
            } => {
                let th = start_angle + sweep.signum() * (s / radius);
                let sign = sweep.signum();
                Point {
                    x: -sign * th.sin(),
                    y: sign * th.cos(),
                }
            }
        }
    }
}

/// The trajectory families the placement algorithm emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrajectoryKind {
    Circular,
    InnerElliptic,
    Elliptic,
    Hover,
}

impl std::fmt::Display for TrajectoryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TrajectoryKind::Circular => "circular",
            TrajectoryKind::InnerElliptic => "inner_elliptic",
            TrajectoryKind::Elliptic => "elliptic",
            TrajectoryKind::Hover => "hover",
        };
        write!(f, "{s}")
    }
}

/// A closed flight path, or a hover at a fixed point.
#[derive(Debug, Clone)]
pub enum Trajectory {
    Hover { position: Point },
    Circuit { kind: TrajectoryKind, segments: Vec<Segment> },
}

const CLOSURE_TOL_M: f64 = 1e-6;

impl Trajectory {
    pub fn hover(position: Point) -> Self {
        Trajectory::Hover { position }
    }

    /// Builds a closed circuit, validating loop closure and segment lengths.
    pub fn circuit(kind: TrajectoryKind, segments: Vec<Segment>) -> Result<Self> {
        if kind == TrajectoryKind::Hover {
            return Err(Error::Validation("hover takes no segments".into()));
        }
        if segments.is_empty() {
            return Err(Error::Validation("circuit needs at least one segment".into()));
        }
        for (i, seg) in segments.iter().enumerate() {
            if !(seg.length() > 0.0) {
                return Err(Error::Validation(format!(
                    "segment {i} has non-positive length"
                )));
            }
            if let Segment::Arc { radius, .. } = seg {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidRadius(*radius));
                }
            }
        }
        for i in 0..segments.len() {
            let next = (i + 1) % segments.len();
            let gap = segments[i].end_point().dist(segments[next].start_point());
            if gap > CLOSURE_TOL_M {
                return Err(Error::Validation(format!(
                    "segments {i} and {next} leave a {gap} m gap"
                )));
            }
        }
        Ok(Trajectory::Circuit { kind, segments })
    }

    /// Single full-circle trajectory.
    pub fn circle(kind: TrajectoryKind, center: Point, radius: f64) -> Result<Self> {
        Trajectory::circuit(
            kind,
            vec![Segment::Arc {
                center,
                radius,
                start_angle: 0.0,
                sweep: 2.0 * std::f64::consts::PI,
            }],
        )
    }

    /// Stadium: two straight sides of length `straight_len` joined by two
    /// half-circles of radius `rho`, oriented along the unit vector `axis`
    /// and centered at `center`. Degenerates to a circle at `straight_len = 0`.
    pub fn stadium(
        kind: TrajectoryKind,
        center: Point,
        axis: Point,
        rho: f64,
        straight_len: f64,
    ) -> Result<Self> {
        if straight_len <= 0.0 {
            return Trajectory::circle(kind, center, rho);
        }
        let u = axis;
        let w = Point { x: -u.y, y: u.x };
        let half = straight_len / 2.0;
        let e1 = Point {
            x: center.x - half * u.x,
            y: center.y - half * u.y,
        };
        let e2 = Point {
            x: center.x + half * u.x,
            y: center.y + half * u.y,
        };
        let off = |p: Point, sgn: f64| Point {
            x: p.x + sgn * rho * w.x,
            y: p.y + sgn * rho * w.y,
        };
        let ang_minus_w = (-w.y).atan2(-w.x);
        let ang_plus_w = w.y.atan2(w.x);
        let pi = std::f64::consts::PI;
        Trajectory::circuit(
            kind,
            vec![
                Segment::Line {
                    start: off(e1, -1.0),
                    end: off(e2, -1.0),
                },
                Segment::Arc {
                    center: e2,
                    radius: rho,
                    start_angle: ang_minus_w,
                    sweep: pi,
                },
                Segment::Line {
                    start: off(e2, 1.0),
                    end: off(e1, 1.0),
                },
                Segment::Arc {
                    center: e1,
                    radius: rho,
                    start_angle: ang_plus_w,
                    sweep: pi,
                },
            ],
        )
    }

    pub fn kind(&self) -> TrajectoryKind {
        match self {
            Trajectory::Hover { .. } => TrajectoryKind::Hover,
            Trajectory::Circuit { kind, .. } => *kind,
        }
    }

    pub fn segments(&self) -> &[Segment] {
        match self {
            Trajectory::Hover { .. } => &[],
            Trajectory::Circuit { segments, .. } => segments,
        }
    }

    pub fn total_length(&self) -> f64 {
        self.segments().iter().map(Segment::length).sum()
    }

    /// Position after travelling `s` meters from the loop start (wraps).
    pub fn point_at_arclength(&self, s: f64) -> Point {
        match self {
            Trajectory::Hover { position } => *position,
            Trajectory::Circuit { segments, .. } => {
                let total = self.total_length();
                let mut rem = s.rem_euclid(total);
                for seg in segments {
                    let len = seg.length();
                    if rem <= len {
                        return seg.point_at(rem);
                    }
                    rem -= len;
                }
                segments.last().unwrap().end_point()
            }
        }
    }

    /// Evenly spaced points along the loop (or the hover point).
    pub fn sample_points(&self, spacing: f64) -> Vec<Point> {
        match self {
            Trajectory::Hover { position } => vec![*position],
            Trajectory::Circuit { .. } => {
                let total = self.total_length();
                let n = (total / spacing).ceil().max(4.0) as usize;
                (0..n)
                    .map(|i| self.point_at_arclength(i as f64 * total / n as f64))
                    .collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> Point {
        Point { x, y }
    }

    #[test]
    fn circle_is_closed_and_measured() {
        let c = Trajectory::circle(TrajectoryKind::Circular, pt(3.0, -1.0), 10.0).unwrap();
        assert!((c.total_length() - 2.0 * std::f64::consts::PI * 10.0).abs() < 1e-9);
        let start = c.point_at_arclength(0.0);
        let back = c.point_at_arclength(c.total_length());
        assert!(start.dist(back) < 1e-9);
    }

    #[test]
    fn stadium_structure_and_closure() {
        let axis = pt(1.0, 0.0);
        let t = Trajectory::stadium(TrajectoryKind::Elliptic, pt(0.0, 0.0), axis, 5.0, 10.0)
            .unwrap();
        let segs = t.segments();
        assert_eq!(segs.len(), 4);
        let lines: Vec<_> = segs.iter().filter(|s| matches!(s, Segment::Line { .. })).collect();
        let arcs: Vec<_> = segs.iter().filter(|s| matches!(s, Segment::Arc { .. })).collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(arcs.len(), 2);
        for a in &arcs {
            if let Segment::Arc { radius, sweep, .. } = a {
                assert!((radius - 5.0).abs() < 1e-12);
                assert!((sweep.abs() - std::f64::consts::PI).abs() < 1e-12);
            }
        }
        let expected = 2.0 * 10.0 + 2.0 * std::f64::consts::PI * 5.0;
        assert!((t.total_length() - expected).abs() < 1e-9);
    }

    #[test]
    fn stadium_junctions_are_tangent() {
        let inv = 1.0 / 5.0_f64.sqrt();
        let axis = pt(2.0 * inv, 1.0 * inv);
        let t = Trajectory::stadium(TrajectoryKind::Elliptic, pt(4.0, 7.0), axis, 3.0, 8.0)
            .unwrap();
        let segs = t.segments();
        for i in 0..segs.len() {
            let next = (i + 1) % segs.len();
            let out = segs[i].tangent_at(segs[i].length());
            let inc = segs[next].tangent_at(0.0);
            let cross = (out.x * inc.y - out.y * inc.x).abs();
            let dot = out.x * inc.x + out.y * inc.y;
            assert!(cross < 1e-6 && dot > 0.0, "junction {i}: cross={cross}");
        }
    }

    #[test]
    fn zero_straight_degenerates_to_circle() {
        let t = Trajectory::stadium(TrajectoryKind::Elliptic, pt(1.0, 1.0), pt(1.0, 0.0), 7.0, 0.0)
            .unwrap();
        assert_eq!(t.segments().len(), 1);
        assert_eq!(t.kind(), TrajectoryKind::Elliptic);
        assert!((t.total_length() - 2.0 * std::f64::consts::PI * 7.0).abs() < 1e-9);
    }

    #[test]
    fn open_loops_are_rejected() {
        let open = vec![
            Segment::Line {
                start: pt(0.0, 0.0),
                end: pt(1.0, 0.0),
            },
            Segment::Line {
                start: pt(1.0, 0.0),
                end: pt(1.0, 1.0),
            },
        ];
        assert!(Trajectory::circuit(TrajectoryKind::Elliptic, open).is_err());
    }

    #[test]
    fn arc_sampling_stays_on_radius() {
        let t = Trajectory::circle(TrajectoryKind::Circular, pt(0.0, 0.0), 20.0).unwrap();
        for p in t.sample_points(0.25) {
            let r = (p.x * p.x + p.y * p.y).sqrt();
            assert!((r - 20.0).abs() < 1e-9);
        }
    }
}
