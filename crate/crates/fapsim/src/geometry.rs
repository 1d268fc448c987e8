//! Feasible-placement geometry: coverage discs, rasterized intersection
//! areas, and construction of the candidate trajectories inside an area.
//!
//! Areas live on a global square lattice (cell `(ix, iy)` has its center at
//! `((ix+0.5)·res, (iy+0.5)·res)`), so areas from different groups can be
//! compared and subtracted cell-by-cell.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::{Point, Trajectory, TrajectoryKind};

/// 3-D position, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn dist(self, other: Point3) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + (self.z - other.z).powi(2))
            .sqrt()
    }

    pub fn ground(self) -> Point {
        Point { x: self.x, y: self.y }
    }
}

/// Horizontal slice of a ground user's coverage sphere at FAP altitude.
#[derive(Debug, Clone, Copy)]
pub struct CoverageDisc {
    pub center: Point,
    pub radius: f64,
}

impl CoverageDisc {
    pub fn contains(&self, p: Point) -> bool {
        let dx = p.x - self.center.x;
        let dy = p.y - self.center.y;
        dx * dx + dy * dy <= self.radius * self.radius
    }

    pub fn bbox(&self) -> Rect {
        Rect {
            x0: self.center.x - self.radius,
            y0: self.center.y - self.radius,
            x1: self.center.x + self.radius,
            y1: self.center.y + self.radius,
        }
    }
}

/// Slices the sphere of radius `d_max` around a ground user at the FAP flight
/// altitude. `None` when the sphere stays below (or above) the flight plane.
pub fn sphere_to_disc(gu: Point3, d_max: f64, fap_altitude: f64) -> Option<CoverageDisc> {
    let dz = fap_altitude - gu.z;
    let r_sq = d_max * d_max - dz * dz;
    if r_sq < 0.0 {
        return None;
    }
    Some(CoverageDisc {
        center: gu.ground(),
        radius: r_sq.sqrt(),
    })
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn intersect(self, other: Rect) -> Rect {
        Rect {
            x0: self.x0.max(other.x0),
            y0: self.y0.max(other.y0),
            x1: self.x1.min(other.x1),
            y1: self.y1.min(other.y1),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.x0 > self.x1 || self.y0 > self.y1
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }
}

/// Rasterized placement region: the set of lattice cells whose centers lie in
/// every coverage disc (minus any cells handed to earlier FAPs).
#[derive(Debug, Clone)]
pub struct IntersectionArea {
    res: f64,
    cells: BTreeSet<(i32, i32)>,
}

impl IntersectionArea {
    pub fn from_cells(res: f64, cells: impl IntoIterator<Item = (i32, i32)>) -> Self {
        Self {
            res,
            cells: cells.into_iter().collect(),
        }
    }

    pub fn res(&self) -> f64 {
        self.res
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        self.cells.iter().copied()
    }

    pub fn contains_cell(&self, cell: (i32, i32)) -> bool {
        self.cells.contains(&cell)
    }

    pub fn cell_center(&self, cell: (i32, i32)) -> Point {
        Point {
            x: (cell.0 as f64 + 0.5) * self.res,
            y: (cell.1 as f64 + 0.5) * self.res,
        }
    }

    pub fn cell_of(&self, p: Point) -> (i32, i32) {
        (
            (p.x / self.res).floor() as i32,
            (p.y / self.res).floor() as i32,
        )
    }

    /// True when the point falls in one of the area's cells.
    pub fn contains_point(&self, p: Point) -> bool {
        self.cells.contains(&self.cell_of(p))
    }
}

/// Rasterizes the common intersection of the discs, clipped to `bounds`.
/// An empty result signals an infeasible group.
pub fn intersect_discs(
    discs: &[CoverageDisc],
    bounds: Rect,
    res: f64,
) -> Result<IntersectionArea> {
    if !(res.is_finite() && res > 0.0) {
        return Err(Error::InvalidParameter {
            name: "res",
            reason: format!("must be positive, got {res}"),
        });
    }
    if discs.is_empty() {
        return Err(Error::InvalidParameter {
            name: "discs",
            reason: "at least one disc required".into(),
        });
    }
    let mut window = bounds;
    for d in discs {
        window = window.intersect(d.bbox());
    }
    let mut cells = BTreeSet::new();
    if window.is_empty() {
        return Ok(IntersectionArea { res, cells });
    }
    let ix0 = (window.x0 / res).floor() as i32 - 1;
    let ix1 = (window.x1 / res).ceil() as i32 + 1;
    let iy0 = (window.y0 / res).floor() as i32 - 1;
    let iy1 = (window.y1 / res).ceil() as i32 + 1;
    for iy in iy0..=iy1 {
        let cy = (iy as f64 + 0.5) * res;
        for ix in ix0..=ix1 {
            let cx = (ix as f64 + 0.5) * res;
            let p = Point { x: cx, y: cy };
            if bounds.contains(p) && discs.iter().all(|d| d.contains(p)) {
                cells.insert((ix, iy));
            }
        }
    }
    Ok(IntersectionArea { res, cells })
}

/// Removes every cell already claimed by an earlier FAP's area, so placement
/// regions stay disjoint.
pub fn subtract_overlaps(
    mut area: IntersectionArea,
    earlier: &[IntersectionArea],
) -> IntersectionArea {
    for other in earlier {
        debug_assert_eq!(area.res, other.res, "areas must share one lattice");
        for cell in &other.cells {
            area.cells.remove(cell);
        }
    }
    area
}

/// Shape summary of an area: centroid, boundary cells, inscribed radius at
/// the centroid, and the elongation direction.
#[derive(Debug, Clone)]
pub struct AreaShape {
    pub centroid: Point,
    pub boundary: Vec<(i32, i32)>,
    pub boundary_centers: Vec<Point>,
    /// Distance from the centroid to the nearest boundary cell center.
    pub min_dist: f64,
    /// Unit direction of maximum second moment of the cell set.
    pub principal_axis: Point,
}

pub fn centroid_and_boundary(area: &IntersectionArea) -> Result<AreaShape> {
    if area.is_empty() {
        return Err(Error::EmptyArea);
    }
    let n = area.cell_count() as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    for cell in area.cells() {
        let c = area.cell_center(cell);
        sx += c.x;
        sy += c.y;
    }
    let centroid = Point { x: sx / n, y: sy / n };

    let neighbors = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    let mut boundary = Vec::new();
    let mut boundary_centers = Vec::new();
    for cell in area.cells() {
        let interior = neighbors
            .iter()
            .all(|(dx, dy)| area.contains_cell((cell.0 + dx, cell.1 + dy)));
        if !interior {
            boundary_centers.push(area.cell_center(cell));
            boundary.push(cell);
        }
    }
    let min_dist = boundary_centers
        .iter()
        .map(|c| c.dist(centroid))
        .fold(f64::INFINITY, f64::min);

    // principal axis from the 2x2 second-moment matrix
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for cell in area.cells() {
        let c = area.cell_center(cell);
        let dx = c.x - centroid.x;
        let dy = c.y - centroid.y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    sxx /= n;
    sxy /= n;
    syy /= n;
    let lambda = 0.5 * (sxx + syy) + (0.25 * (sxx - syy).powi(2) + sxy * sxy).sqrt();
    let (mut ax, mut ay) = if sxy.abs() > 1e-12 {
        (lambda - syy, sxy)
    } else if sxx >= syy {
        (1.0, 0.0)
    } else {
        (0.0, 1.0)
    };
    let norm = (ax * ax + ay * ay).sqrt();
    ax /= norm;
    ay /= norm;
    if ax < 0.0 || (ax == 0.0 && ay < 0.0) {
        ax = -ax;
        ay = -ay;
    }
    Ok(AreaShape {
        centroid,
        boundary,
        boundary_centers,
        min_dist,
        principal_axis: Point { x: ax, y: ay },
    })
}

/// Circular trajectory: a circle around the centroid with radius equal to the
/// minimum centroid-to-perimeter distance. Degenerate areas (radius under one
/// cell) are the caller's business.
pub fn build_circular(shape: &AreaShape) -> Result<Trajectory> {
    Trajectory::circle(TrajectoryKind::Circular, shape.centroid, shape.min_dist)
}

/// Inner elliptic trajectory: a stadium confined to the circular trajectory's
/// disc, with arc radius half its radius and straight sections of the same
/// length (so the apexes touch the circle). `None` when the arcs would fall
/// under the raster resolution.
pub fn build_inner_elliptic(shape: &AreaShape, res: f64) -> Option<Trajectory> {
    let r_c = shape.min_dist;
    let rho = r_c / 2.0;
    if rho < res {
        return None;
    }
    Some(
        Trajectory::stadium(
            TrajectoryKind::InnerElliptic,
            shape.centroid,
            shape.principal_axis,
            rho,
            r_c,
        )
        .expect("inner stadium construction is valid"),
    )
}

/// Elliptic trajectory: a stadium with arc radius equal to the circular
/// radius, stretched along the principal axis as far as the area allows and
/// centered on the midpoint of the feasible axial extent.
///
/// The feasible extent is the connected interval (through the centroid) of
/// axis points whose clearance to the boundary cells is at least the circular
/// radius, located by marching and bisection at res/4 granularity. Extents
/// below the raster noise floor `2·sqrt(r_c·res)` are quantization artifacts
/// of curved boundaries and collapse to the circular trajectory.
pub fn build_elliptic(area: &IntersectionArea, shape: &AreaShape) -> Trajectory {
    let r_c = shape.min_dist;
    let res = area.res();
    let (lo, hi) = axial_extent(shape, r_c, res);
    let mut straight_len = hi - lo;
    if straight_len < 2.0 * (r_c * res).sqrt() {
        straight_len = 0.0;
    }
    let mid = 0.5 * (hi + lo);
    let center = Point {
        x: shape.centroid.x + mid * shape.principal_axis.x,
        y: shape.centroid.y + mid * shape.principal_axis.y,
    };
    let center = if straight_len > 0.0 { center } else { shape.centroid };
    Trajectory::stadium(
        TrajectoryKind::Elliptic,
        center,
        shape.principal_axis,
        r_c,
        straight_len,
    )
    .expect("elliptic stadium construction is valid")
}

/// Connected interval around the centroid (as signed axis offsets) where the
/// boundary clearance stays at least `level`.
///
/// The clearance to discrete boundary-cell centers wobbles by up to
/// `res²/(8·level)` along a straight wall (closest above a cell center,
/// farthest between two); the feasibility threshold absorbs that so grazing a
/// wall does not cut the extent short.
fn axial_extent(shape: &AreaShape, level: f64, res: f64) -> (f64, f64) {
    let clearance = |s: f64| -> f64 {
        let q = Point {
            x: shape.centroid.x + s * shape.principal_axis.x,
            y: shape.centroid.y + s * shape.principal_axis.y,
        };
        shape
            .boundary_centers
            .iter()
            .map(|c| c.dist(q))
            .fold(f64::INFINITY, f64::min)
    };
    let wobble = 0.15 * res * res / level.max(res);
    let feasible = |s: f64| clearance(s) >= level - wobble - 1e-9;
    // min_dist is measured to boundary centers, so clearance(0) == level
    debug_assert!(feasible(0.0));
    let step = 0.25 * res; // res/4 marching granularity along the axis
    let span_cap = 10_000.0;
    let march = |dir: f64| -> f64 {
        let mut s = 0.0;
        while feasible(s + dir * step) {
            s += dir * step;
            if s.abs() > span_cap {
                return s;
            }
        }
        let (mut lo, mut hi) = (s, s + dir * step);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if feasible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    (march(-1.0), march(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> Point {
        Point { x, y }
    }

    fn disc_area(cx: f64, cy: f64, r: f64, res: f64) -> IntersectionArea {
        intersect_discs(
            &[CoverageDisc { center: pt(cx, cy), radius: r }],
            Rect { x0: cx - r - 2.0, y0: cy - r - 2.0, x1: cx + r + 2.0, y1: cy + r + 2.0 },
            res,
        )
        .unwrap()
    }

    fn rect_area(w: i32, h: i32) -> IntersectionArea {
        IntersectionArea::from_cells(
            1.0,
            (0..h).flat_map(|iy| (0..w).map(move |ix| (ix, iy))),
        )
    }

    #[test]
    fn sphere_slicing() {
        let gu = Point3 { x: 10.0, y: 20.0, z: 0.0 };
        let d = sphere_to_disc(gu, 10.0, 6.0).unwrap();
        assert!((d.radius - 8.0).abs() < 1e-12, "6-8-10 triangle");
        assert_eq!(d.center, pt(10.0, 20.0));
        let tangent = sphere_to_disc(gu, 6.0, 6.0).unwrap();
        assert_eq!(tangent.radius, 0.0);
        assert!(sphere_to_disc(gu, 5.0, 6.0).is_none());
    }

    #[test]
    fn single_disc_raster_area() {
        let area = disc_area(50.0, 50.0, 8.0, 1.0);
        let analytic = std::f64::consts::PI * 64.0;
        let count = area.cell_count() as f64;
        assert!(
            (count - analytic).abs() / analytic < 0.04,
            "count {count} vs {analytic}"
        );
    }

    #[test]
    fn raster_area_converges_with_resolution() {
        let analytic = std::f64::consts::PI * 64.0;
        let mut prev_err = f64::INFINITY;
        for res in [1.0, 0.5, 0.25] {
            let area = disc_area(50.0, 50.0, 8.0, res);
            let measured = area.cell_count() as f64 * res * res;
            let err = (measured - analytic).abs() / analytic;
            assert!(err < prev_err + 1e-12, "res {res}: err {err} vs {prev_err}");
            prev_err = err;
        }
        assert!(prev_err < 0.01);
    }

    #[test]
    fn disjoint_discs_give_empty() {
        let discs = [
            CoverageDisc { center: pt(0.0, 0.0), radius: 3.0 },
            CoverageDisc { center: pt(100.0, 0.0), radius: 3.0 },
        ];
        let area = intersect_discs(
            &discs,
            Rect { x0: -10.0, y0: -10.0, x1: 110.0, y1: 10.0 },
            1.0,
        )
        .unwrap();
        assert!(area.is_empty());
    }

    #[test]
    fn identical_discs_idempotent() {
        let one = disc_area(20.0, 20.0, 8.0, 1.0);
        let discs = [
            CoverageDisc { center: pt(20.0, 20.0), radius: 8.0 },
            CoverageDisc { center: pt(20.0, 20.0), radius: 8.0 },
        ];
        let two = intersect_discs(
            &discs,
            Rect { x0: 10.0, y0: 10.0, x1: 30.0, y1: 30.0 },
            1.0,
        )
        .unwrap();
        assert_eq!(one.cell_count(), two.cell_count());
    }

    #[test]
    fn overlap_subtraction() {
        let a = rect_area(10, 10);
        // no earlier areas: unchanged
        let same = subtract_overlaps(a.clone(), &[]);
        assert_eq!(same.cell_count(), 100);
        // half-overlapping square: brute-force set difference as oracle
        let earlier = IntersectionArea::from_cells(
            1.0,
            (0..10).flat_map(|iy| (5..15).map(move |ix| (ix, iy))),
        );
        let cut = subtract_overlaps(a.clone(), std::slice::from_ref(&earlier));
        let expected: BTreeSet<_> = a
            .cells()
            .filter(|c| !earlier.contains_cell(*c))
            .collect();
        assert_eq!(cut.cells().collect::<BTreeSet<_>>(), expected);
        assert_eq!(cut.cell_count(), 50);
        for c in cut.cells() {
            assert!(!earlier.contains_cell(c), "result overlaps earlier area");
        }
        // superset swallows everything
        let superset = rect_area(20, 20);
        let gone = subtract_overlaps(rect_area(10, 10), std::slice::from_ref(&superset));
        assert!(gone.is_empty());
    }

    #[test]
    fn disc_shape_summary() {
        let area = disc_area(50.0, 50.0, 8.0, 1.0);
        let shape = centroid_and_boundary(&area).unwrap();
        assert!(shape.centroid.dist(pt(50.0, 50.0)) <= 0.5);
        assert!((shape.min_dist - 8.0).abs() <= 1.0, "r_c = {}", shape.min_dist);
    }

    #[test]
    fn single_cell_area_is_degenerate() {
        let area = IntersectionArea::from_cells(1.0, [(5, 5)]);
        let shape = centroid_and_boundary(&area).unwrap();
        assert_eq!(shape.min_dist, 0.0);
    }

    #[test]
    fn empty_area_errors() {
        let area = IntersectionArea::from_cells(1.0, []);
        assert!(matches!(centroid_and_boundary(&area), Err(Error::EmptyArea)));
    }

    #[test]
    fn rectangle_principal_axis_is_x() {
        let area = rect_area(20, 4);
        let shape = centroid_and_boundary(&area).unwrap();
        let angle = shape.principal_axis.y.atan2(shape.principal_axis.x).abs();
        assert!(angle < 1f64.to_radians(), "axis angle {angle} rad");
    }

    #[test]
    fn circular_trajectory_radius() {
        let area = disc_area(50.0, 50.0, 8.0, 1.0);
        let shape = centroid_and_boundary(&area).unwrap();
        let traj = build_circular(&shape).unwrap();
        assert_eq!(traj.kind(), TrajectoryKind::Circular);
        match traj.segments()[0] {
            crate::trajectory::Segment::Arc { radius, .. } => {
                assert!((radius - 8.0).abs() <= 1.0)
            }
            _ => panic!("expected arc"),
        }
    }

    #[test]
    fn inner_elliptic_proportions() {
        let shape = AreaShape {
            centroid: pt(0.0, 0.0),
            boundary: vec![],
            boundary_centers: vec![],
            min_dist: 10.0,
            principal_axis: pt(1.0, 0.0),
        };
        let traj = build_inner_elliptic(&shape, 1.0).unwrap();
        // apex distance = L/2 + rho = 10 = r_c
        let mut max_dist = 0.0_f64;
        for p in traj.sample_points(0.05) {
            max_dist = max_dist.max(p.dist(pt(0.0, 0.0)));
        }
        assert!((max_dist - 10.0).abs() < 0.01, "apex at {max_dist}");
        // entirely inside the circular disc
        assert!(max_dist <= 10.0 + 1e-6);
        // arcs at half the circular radius
        for seg in traj.segments() {
            if let crate::trajectory::Segment::Arc { radius, .. } = seg {
                assert!((radius - 5.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn inner_elliptic_omitted_when_too_small() {
        let shape = AreaShape {
            centroid: pt(0.0, 0.0),
            boundary: vec![],
            boundary_centers: vec![],
            min_dist: 1.5,
            principal_axis: pt(1.0, 0.0),
        };
        assert!(build_inner_elliptic(&shape, 1.0).is_none());
    }

    #[test]
    fn elliptic_on_disc_degenerates_to_circle() {
        let area = disc_area(50.0, 50.0, 8.0, 1.0);
        let shape = centroid_and_boundary(&area).unwrap();
        let traj = build_elliptic(&area, &shape);
        assert_eq!(traj.kind(), TrajectoryKind::Elliptic);
        assert_eq!(traj.segments().len(), 1, "rotationally symmetric area");
    }

    #[test]
    fn elliptic_spans_rectangle() {
        let area = rect_area(40, 16);
        let shape = centroid_and_boundary(&area).unwrap();
        let rho = shape.min_dist;
        assert!((7.4..=8.1).contains(&rho), "r_c = {rho}");
        let traj = build_elliptic(&area, &shape);
        assert_eq!(traj.segments().len(), 4);
        let straight: f64 = traj
            .segments()
            .iter()
            .filter(|s| matches!(s, crate::trajectory::Segment::Line { .. }))
            .map(|s| s.length())
            .sum::<f64>()
            / 2.0;
        assert!(
            (straight - 24.0).abs() <= 1.5,
            "straight length {straight}, expected about 24"
        );
        // containment: every sample's cell belongs to the area (within half a
        // cell of quantization slack at the grazing sides)
        for p in traj.sample_points(0.25) {
            let ok = area.contains_point(p)
                || area
                    .cells()
                    .any(|c| area.cell_center(c).dist(p) <= 0.75 * area.res());
            assert!(ok, "sample ({}, {}) left the area", p.x, p.y);
        }
    }

    #[test]
    fn elliptic_contained_in_lens_area() {
        // two offset discs: lens-shaped area, genuinely no axial extent
        let discs = [
            CoverageDisc { center: pt(30.0, 50.0), radius: 40.0 },
            CoverageDisc { center: pt(70.0, 50.0), radius: 40.0 },
        ];
        let area = intersect_discs(
            &discs,
            Rect { x0: -20.0, y0: 0.0, x1: 120.0, y1: 100.0 },
            1.0,
        )
        .unwrap();
        let shape = centroid_and_boundary(&area).unwrap();
        let traj = build_elliptic(&area, &shape);
        assert_eq!(traj.segments().len(), 1, "lens: stadium collapses to circle");
    }
}
