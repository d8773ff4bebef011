//! Reachability indices over a discretized workspace.
//!
//! The workspace is cut into equal cells (spheres in the underlying
//! theory); for each cell we sample approach directions uniformly on the
//! sphere and ask a [`ReachabilityOracle`] whether the manipulator can
//! reach the cell center from that direction. The accepted fraction,
//! scaled to [0, 100], is the reachability index D, and D classifies the
//! cell into most suitable / suitable / unsuitable work regions.
//!
//! A planar two-link arm ships as the reference oracle so the whole
//! pipeline is testable without a robotics stack; real arms plug in
//! through the trait.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{Point3, Region};
use crate::rng::SplitMix64;

/// Answers whether a target point can be reached with the end-effector
/// approaching along `approach` (a unit vector pointing into the target).
/// Implementations must be pure functions of their inputs.
pub trait ReachabilityOracle {
    fn reachable(&self, target: &Point3, approach: &Point3) -> bool;
}

/// Oracle accepting every query; handy for tests and grid sanity checks.
#[derive(Clone, Copy, Debug)]
pub struct AcceptAll;

impl ReachabilityOracle for AcceptAll {
    fn reachable(&self, _target: &Point3, _approach: &Point3) -> bool {
        true
    }
}

/// Oracle rejecting every query.
#[derive(Clone, Copy, Debug)]
pub struct RejectAll;

impl ReachabilityOracle for RejectAll {
    fn reachable(&self, _target: &Point3, _approach: &Point3) -> bool {
        false
    }
}

/// Reference oracle: a two-link arm working in the z = base.z plane.
///
/// A target is position-reachable when its planar distance d from the
/// base lies in [|l1 - l2|, l1 + l2] and it sits on the arm plane. For a
/// reachable target the two elbow solutions fix the last link's
/// direction; an approach direction is accepted when it lies within
/// `max_tilt_rad` of either solution's end-effector direction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanarTwoLinkArm {
    pub base: Point3,
    pub link1_m: f64,
    pub link2_m: f64,
    /// Half-angle of the approach cone accepted around an exact solution.
    pub max_tilt_rad: f64,
    /// Tolerance on the out-of-plane coordinate of targets.
    pub plane_tol_m: f64,
}

impl PlanarTwoLinkArm {
    pub fn new(
        base: Point3,
        link1_m: f64,
        link2_m: f64,
        max_tilt_rad: f64,
    ) -> Result<Self, CapabilityError> {
        if link1_m.is_nan() || link1_m <= 0.0 || link2_m.is_nan() || link2_m <= 0.0 {
            return Err(CapabilityError::BadArm("link lengths must be positive"));
        }
        if !(0.0..=PI).contains(&max_tilt_rad) {
            return Err(CapabilityError::BadArm("max tilt must lie in [0, pi]"));
        }
        Ok(PlanarTwoLinkArm {
            base,
            link1_m,
            link2_m,
            max_tilt_rad,
            plane_tol_m: 1e-6,
        })
    }

    pub fn reach_min(&self) -> f64 {
        (self.link1_m - self.link2_m).abs()
    }

    pub fn reach_max(&self) -> f64 {
        self.link1_m + self.link2_m
    }
}

impl ReachabilityOracle for PlanarTwoLinkArm {
    fn reachable(&self, target: &Point3, approach: &Point3) -> bool {
        if (target.z - self.base.z).abs() > self.plane_tol_m {
            return false;
        }
        let dx = target.x - self.base.x;
        let dy = target.y - self.base.y;
        let d = libm::sqrt(dx * dx + dy * dy);
        if d < self.reach_min() - 1e-12 || d > self.reach_max() + 1e-12 {
            return false;
        }
        if d <= 1e-12 {
            // Target at the base: accept anything near the arm plane.
            return libm::asin(approach.z.clamp(-1.0, 1.0).abs()) <= self.max_tilt_rad;
        }
        // Angle at the target between the last link and the outward ray,
        // from the side lengths l1, l2, d of the IK triangle.
        let cos_gamma = ((self.link2_m * self.link2_m + d * d - self.link1_m * self.link1_m)
            / (2.0 * self.link2_m * d))
            .clamp(-1.0, 1.0);
        let gamma = libm::acos(cos_gamma);
        let ray = libm::atan2(dy, dx);
        // End-effector directions of the two elbow solutions, in-plane.
        for sign in [1.0f64, -1.0] {
            let ang = ray + sign * gamma;
            let sol = Point3::new(libm::cos(ang), libm::sin(ang), 0.0);
            let dot =
                (sol.x * approach.x + sol.y * approach.y + sol.z * approach.z).clamp(-1.0, 1.0);
            if libm::acos(dot) <= self.max_tilt_rad {
                return true;
            }
        }
        false
    }
}

/// `n` unit vectors drawn uniformly on the sphere, deterministic for a
/// fixed seed. Inverse-CDF on z plus a uniform azimuth.
pub fn sample_sphere_directions(n: usize, seed: u64) -> Result<Vec<Point3>, CapabilityError> {
    if n == 0 {
        return Err(CapabilityError::EmptySample);
    }
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let z = 1.0 - 2.0 * rng.next_f64();
        let phi = 2.0 * PI * rng.next_f64();
        let r = libm::sqrt((1.0 - z * z).max(0.0));
        out.push(Point3::new(r * libm::cos(phi), r * libm::sin(phi), z));
    }
    Ok(out)
}

/// Reachability index D = (R/N) * 100 where R counts sampled approach
/// directions the oracle accepts at `center`.
pub fn reachability_index<O: ReachabilityOracle + ?Sized>(
    oracle: &O,
    center: &Point3,
    n: usize,
    seed: u64,
) -> Result<f64, CapabilityError> {
    let dirs = sample_sphere_directions(n, seed)?;
    let accepted = dirs.iter().filter(|d| oracle.reachable(center, d)).count();
    Ok(accepted as f64 / n as f64 * 100.0)
}

/// Suitability classes of workspace regions by reachability index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionClass {
    MostSuitable,
    Suitable,
    Unsuitable,
}

impl fmt::Display for RegionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionClass::MostSuitable => write!(f, "MostSuitable"),
            RegionClass::Suitable => write!(f, "Suitable"),
            RegionClass::Unsuitable => write!(f, "Unsuitable"),
        }
    }
}

/// Most suitable for D > 60, suitable for 20 < D <= 60, unsuitable for
/// D <= 20. Boundaries belong to the lower class.
pub fn classify_region(d: f64) -> Result<RegionClass, CapabilityError> {
    if !(0.0..=100.0).contains(&d) {
        return Err(CapabilityError::IndexOutOfRange(d));
    }
    Ok(if d > 60.0 {
        RegionClass::MostSuitable
    } else if d > 20.0 {
        RegionClass::Suitable
    } else {
        RegionClass::Unsuitable
    })
}

/// Per-robot grid of reachability indices over a workspace volume.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapabilityMap {
    pub robot_id: String,
    /// Min corner of the grid.
    pub origin: Point3,
    /// Cell edge length (sphere diameter), meters.
    pub cell_m: f64,
    pub dims: (usize, usize, usize),
    /// Row-major over x, then y, then z: index = (k*ny + j)*nx + i.
    pub index: Vec<f64>,
    pub n_samples: usize,
}

impl CapabilityMap {
    pub fn cell_count(&self) -> usize {
        self.dims.0 * self.dims.1 * self.dims.2
    }

    pub fn cell_center(&self, i: usize, j: usize, k: usize) -> Point3 {
        Point3::new(
            self.origin.x + (i as f64 + 0.5) * self.cell_m,
            self.origin.y + (j as f64 + 0.5) * self.cell_m,
            self.origin.z + (k as f64 + 0.5) * self.cell_m,
        )
    }

    pub fn linear(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.dims.1 + j) * self.dims.0 + i
    }
}

/// Upper bound on grid size accepted by [`build_capability_map`].
pub const DEFAULT_CELL_LIMIT: usize = 10_000_000;

/// Default sample count per cell. Resolves a D = 20 boundary with a
/// standard error of about 2.8 index points.
pub const DEFAULT_SAMPLES: usize = 200;

/// Discretize the bounding box of `bounds` into cells of edge `cell_m`
/// and compute D at every cell center. Per-cell seeds are derived as
/// seed XOR cell index so the result is independent of evaluation order.
pub fn build_capability_map<O: ReachabilityOracle + ?Sized>(
    oracle: &O,
    robot_id: &str,
    bounds: &Region,
    cell_m: f64,
    n: usize,
    seed: u64,
) -> Result<CapabilityMap, CapabilityError> {
    if cell_m.is_nan() || cell_m <= 0.0 {
        return Err(CapabilityError::BadCellSize);
    }
    let bb = bounds.bounding_box().ok_or(CapabilityError::EmptyBounds)?;
    let nx = grid_extent(bb.max.x - bb.min.x, cell_m);
    let ny = grid_extent(bb.max.y - bb.min.y, cell_m);
    let nz = grid_extent(bb.max.z - bb.min.z, cell_m);
    let cells = nx
        .checked_mul(ny)
        .and_then(|v| v.checked_mul(nz))
        .ok_or(CapabilityError::GridTooLarge)?;
    if cells > DEFAULT_CELL_LIMIT {
        return Err(CapabilityError::GridTooLarge);
    }
    let mut map = CapabilityMap {
        robot_id: robot_id.to_string(),
        origin: bb.min,
        cell_m,
        dims: (nx, ny, nz),
        index: Vec::with_capacity(cells),
        n_samples: n,
    };
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let cell = (k * ny + j) * nx + i;
                let center = map.cell_center(i, j, k);
                let d = reachability_index(oracle, &center, n, seed ^ cell as u64)?;
                map.index.push(d);
            }
        }
    }
    Ok(map)
}

fn grid_extent(span: f64, cell: f64) -> usize {
    let n = libm::ceil(span / cell) as usize;
    n.max(1)
}

/// D of the cell containing `p`. Points exactly on a shared cell face
/// resolve to the lower-index cell.
pub fn lookup_index(map: &CapabilityMap, p: &Point3) -> Result<f64, CapabilityError> {
    let i = axis_cell(p.x, map.origin.x, map.cell_m, map.dims.0)?;
    let j = axis_cell(p.y, map.origin.y, map.cell_m, map.dims.1)?;
    let k = axis_cell(p.z, map.origin.z, map.cell_m, map.dims.2)?;
    Ok(map.index[map.linear(i, j, k)])
}

fn axis_cell(v: f64, origin: f64, cell: f64, n: usize) -> Result<usize, CapabilityError> {
    let rel = (v - origin) / cell;
    if rel < 0.0 || rel > n as f64 {
        return Err(CapabilityError::OutOfMap);
    }
    let mut idx = libm::floor(rel) as usize;
    // Boundary tie: a coordinate exactly on a face belongs to the lower
    // cell; this also folds the upper map edge into the last cell.
    if rel == libm::floor(rel) && idx > 0 {
        idx -= 1;
    }
    if idx >= n {
        idx = n - 1;
    }
    Ok(idx)
}

/// Export formats for capability maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapFormat {
    Csv,
    Json,
}

impl core::str::FromStr for MapFormat {
    type Err = CapabilityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(MapFormat::Csv),
            "json" => Ok(MapFormat::Json),
            other => Err(CapabilityError::UnknownFormat(other.to_string())),
        }
    }
}

/// Serialize a map. CSV carries one `x,y,z,D,class` row per cell plus a
/// leading metadata comment so the export re-imports to an identical
/// map; JSON mirrors the struct.
pub fn export_map(map: &CapabilityMap, format: MapFormat) -> Result<String, CapabilityError> {
    match format {
        MapFormat::Json => {
            serde_json::to_string_pretty(map).map_err(|e| CapabilityError::Serialize(e.to_string()))
        }
        MapFormat::Csv => {
            let mut out = String::new();
            out.push_str(&format!(
                "# robot {} origin {} {} {} cell {} dims {} {} {} samples {}\n",
                map.robot_id,
                map.origin.x,
                map.origin.y,
                map.origin.z,
                map.cell_m,
                map.dims.0,
                map.dims.1,
                map.dims.2,
                map.n_samples
            ));
            out.push_str("x,y,z,D,class\n");
            for k in 0..map.dims.2 {
                for j in 0..map.dims.1 {
                    for i in 0..map.dims.0 {
                        let c = map.cell_center(i, j, k);
                        let d = map.index[map.linear(i, j, k)];
                        let class = classify_region(d)?;
                        out.push_str(&format!("{},{},{},{},{}\n", c.x, c.y, c.z, d, class));
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Inverse of [`export_map`] for both formats.
pub fn import_map(text: &str, format: MapFormat) -> Result<CapabilityMap, CapabilityError> {
    match format {
        MapFormat::Json => {
            serde_json::from_str(text).map_err(|e| CapabilityError::Parse(e.to_string()))
        }
        MapFormat::Csv => {
            let mut lines = text.lines();
            let meta = lines
                .next()
                .ok_or_else(|| CapabilityError::Parse("empty csv".to_string()))?;
            let fields: Vec<&str> = meta.trim_start_matches('#').split_whitespace().collect();
            // robot ID origin X Y Z cell C dims NX NY NZ samples N
            if fields.len() != 14 || fields[0] != "robot" {
                return Err(CapabilityError::Parse("bad csv metadata line".to_string()));
            }
            let fnum = |s: &str| -> Result<f64, CapabilityError> {
                s.parse()
                    .map_err(|_| CapabilityError::Parse(format!("bad number `{s}`")))
            };
            let unum = |s: &str| -> Result<usize, CapabilityError> {
                s.parse()
                    .map_err(|_| CapabilityError::Parse(format!("bad count `{s}`")))
            };
            let map = CapabilityMap {
                robot_id: fields[1].to_string(),
                origin: Point3::new(fnum(fields[3])?, fnum(fields[4])?, fnum(fields[5])?),
                cell_m: fnum(fields[7])?,
                dims: (unum(fields[9])?, unum(fields[10])?, unum(fields[11])?),
                index: Vec::new(),
                n_samples: unum(fields[13])?,
            };
            let mut map = map;
            let header = lines.next().unwrap_or("");
            if header.trim() != "x,y,z,D,class" {
                return Err(CapabilityError::Parse("missing csv header".to_string()));
            }
            for line in lines {
                if line.trim().is_empty() {
                    continue;
                }
                let cols: Vec<&str> = line.split(',').collect();
                if cols.len() != 5 {
                    return Err(CapabilityError::Parse(format!("bad csv row `{line}`")));
                }
                map.index.push(fnum(cols[3])?);
            }
            if map.index.len() != map.cell_count() {
                return Err(CapabilityError::Parse("cell count mismatch".to_string()));
            }
            Ok(map)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CapabilityError {
    EmptySample,
    BadArm(&'static str),
    BadCellSize,
    EmptyBounds,
    GridTooLarge,
    IndexOutOfRange(f64),
    OutOfMap,
    UnknownFormat(String),
    Serialize(String),
    Parse(String),
}

impl fmt::Display for CapabilityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CapabilityError::EmptySample => write!(f, "empty sample"),
            CapabilityError::BadArm(msg) => write!(f, "bad arm: {msg}"),
            CapabilityError::BadCellSize => write!(f, "cell size must be positive"),
            CapabilityError::EmptyBounds => write!(f, "bounds region is empty"),
            CapabilityError::GridTooLarge => write!(f, "grid too large"),
            CapabilityError::IndexOutOfRange(d) => write!(f, "index out of range: {d}"),
            CapabilityError::OutOfMap => write!(f, "out of map"),
            CapabilityError::UnknownFormat(s) => write!(f, "unknown format `{s}`"),
            CapabilityError::Serialize(e) => write!(f, "serialize failed: {e}"),
            CapabilityError::Parse(e) => write!(f, "parse failed: {e}"),
        }
    }
}

impl core::error::Error for CapabilityError {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Aabb;
    use alloc::boxed::Box;
    use alloc::vec;

    #[test]
    fn single_sample_is_unit_length() {
        let v = sample_sphere_directions(1, 123).unwrap()[0];
        let norm = libm::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
        assert!((norm - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_sphere_directions(200, 7).unwrap();
        let b = sample_sphere_directions(200, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_rejects_zero() {
        assert_eq!(
            sample_sphere_directions(0, 1),
            Err(CapabilityError::EmptySample)
        );
    }

    #[test]
    fn large_sample_mean_is_near_zero() {
        // Law of large numbers on the uniform sphere: the mean vector of
        // 1e5 samples has magnitude on the order of 1/sqrt(n).
        let dirs = sample_sphere_directions(100_000, 1).unwrap();
        let n = dirs.len() as f64;
        let (mut sx, mut sy, mut sz) = (0.0, 0.0, 0.0);
        for d in &dirs {
            sx += d.x;
            sy += d.y;
            sz += d.z;
        }
        let (mx, my, mz) = (sx / n, sy / n, sz / n);
        let mag = libm::sqrt(mx * mx + my * my + mz * mz);
        assert!(mag < 0.02, "mean magnitude {mag}");
    }

    #[test]
    fn index_endpoints_are_exact() {
        let p = Point3::new(0.0, 0.0, 0.0);
        assert_eq!(reachability_index(&AcceptAll, &p, 500, 3).unwrap(), 100.0);
        assert_eq!(reachability_index(&RejectAll, &p, 500, 3).unwrap(), 0.0);
    }

    #[test]
    fn index_is_monotone_in_oracle() {
        // An oracle accepting a superset of directions never scores lower.
        struct UpperHalf;
        impl ReachabilityOracle for UpperHalf {
            fn reachable(&self, _t: &Point3, a: &Point3) -> bool {
                a.z >= 0.0
            }
        }
        struct UpperCap;
        impl ReachabilityOracle for UpperCap {
            fn reachable(&self, _t: &Point3, a: &Point3) -> bool {
                a.z >= 0.5
            }
        }
        let p = Point3::new(0.0, 0.0, 0.0);
        for seed in 0..5 {
            let wide = reachability_index(&UpperHalf, &p, 400, seed).unwrap();
            let narrow = reachability_index(&UpperCap, &p, 400, seed).unwrap();
            assert!(narrow <= wide);
        }
    }

    #[test]
    fn boundary_of_reach_is_at_most_half_sphere() {
        // On the maximum-reach circle only one end-effector direction
        // exists; with tilt <= pi/2 at most a half-space of approaches
        // can be accepted. Brute-force n = 10000 run.
        let arm = PlanarTwoLinkArm::new(Point3::new(0.0, 0.0, 0.0), 0.7, 0.5, 1.2).unwrap();
        let edge = Point3::new(arm.reach_max(), 0.0, 0.0);
        let d = reachability_index(&arm, &edge, 10_000, 5).unwrap();
        assert!(d <= 50.0, "boundary index {d}");
        assert!(d > 0.0);
    }

    #[test]
    fn classify_boundaries() {
        assert_eq!(classify_region(100.0).unwrap(), RegionClass::MostSuitable);
        assert_eq!(classify_region(60.0).unwrap(), RegionClass::Suitable);
        assert_eq!(classify_region(20.0).unwrap(), RegionClass::Unsuitable);
        assert_eq!(classify_region(0.0).unwrap(), RegionClass::Unsuitable);
        assert!(classify_region(100.5).is_err());
        assert!(classify_region(-0.1).is_err());
    }

    #[test]
    fn classes_partition_the_index_range() {
        let mut d = 0.0;
        while d <= 100.0 {
            classify_region(d).unwrap();
            d += 0.37;
        }
    }

    fn one_cell_region() -> Region {
        Region::from_box(Aabb::new(Point3::new(0.0, 0.0, 0.0), Point3::new(0.1, 0.1, 0.1)).unwrap())
    }

    #[test]
    fn single_cell_map_matches_direct_index() {
        let arm = PlanarTwoLinkArm::new(Point3::new(0.0, 0.0, 0.05), 0.7, 0.5, 1.2).unwrap();
        let map = build_capability_map(&arm, "r", &one_cell_region(), 0.1, 100, 9).unwrap();
        assert_eq!(map.cell_count(), 1);
        let direct = reachability_index(&arm, &map.cell_center(0, 0, 0), 100, 9).unwrap();
        assert_eq!(map.index[0], direct);
    }

    #[test]
    fn all_accepting_oracle_fills_grid() {
        let bounds = Region::from_box(
            Aabb::new(Point3::new(0.0, 0.0, 0.0), Point3::new(0.4, 0.3, 0.1)).unwrap(),
        );
        let map = build_capability_map(&AcceptAll, "r", &bounds, 0.1, 50, 0).unwrap();
        assert_eq!(map.dims, (4, 3, 1));
        assert!(map.index.iter().all(|&d| d == 100.0));
    }

    #[test]
    fn map_build_is_reproducible() {
        let arm = PlanarTwoLinkArm::new(Point3::new(0.2, 0.2, 0.0), 0.5, 0.4, 1.0).unwrap();
        let bounds = Region::from_box(
            Aabb::new(Point3::new(-1.0, -1.0, -0.05), Point3::new(1.0, 1.0, 0.05)).unwrap(),
        );
        let a = build_capability_map(&arm, "r", &bounds, 0.25, 64, 11).unwrap();
        let b = build_capability_map(&arm, "r", &bounds, 0.25, 64, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn index_decreases_toward_the_reach_edge() {
        // Scan a ray leaving the annulus of full reach; D must trend down
        // (2-point slack absorbs sampling noise at n = 10000).
        let arm = PlanarTwoLinkArm::new(Point3::new(0.0, 0.0, 0.0), 0.7, 0.5, 1.2).unwrap();
        let mut prev = f64::INFINITY;
        let mut x = 0.9;
        while x <= 1.3 {
            let d = reachability_index(&arm, &Point3::new(x, 0.0, 0.0), 10_000, 2).unwrap();
            assert!(d <= prev + 2.0, "D rose from {prev} to {d} at x={x}");
            prev = d;
            x += 0.05;
        }
    }

    #[test]
    fn oversized_grids_are_rejected() {
        let bounds = Region::from_box(
            Aabb::new(Point3::new(0.0, 0.0, 0.0), Point3::new(100.0, 100.0, 100.0)).unwrap(),
        );
        assert_eq!(
            build_capability_map(&AcceptAll, "r", &bounds, 1e-3, 10, 0),
            Err(CapabilityError::GridTooLarge)
        );
    }

    #[test]
    fn lookup_hits_cell_centers_and_ties_low() {
        let bounds = Region::from_box(
            Aabb::new(Point3::new(0.0, 0.0, 0.0), Point3::new(0.2, 0.1, 0.1)).unwrap(),
        );
        // Hand-built 2x1x1 map with distinct values.
        let mut map = build_capability_map(&AcceptAll, "r", &bounds, 0.1, 10, 0).unwrap();
        map.index = vec![100.0, 0.0];
        let c0 = map.cell_center(0, 0, 0);
        assert_eq!(lookup_index(&map, &c0).unwrap(), 100.0);
        // Point exactly on the shared face of the two cells: lower index wins.
        let face = Point3::new(0.1, 0.05, 0.05);
        assert_eq!(lookup_index(&map, &face).unwrap(), 100.0);
        assert!(lookup_index(&map, &Point3::new(0.3, 0.05, 0.05)).is_err());
    }

    #[test]
    fn export_csv_shape_and_classes() {
        let bounds = Region::from_box(
            Aabb::new(Point3::new(0.0, 0.0, 0.0), Point3::new(0.2, 0.1, 0.1)).unwrap(),
        );
        let mut map = build_capability_map(&AcceptAll, "r", &bounds, 0.1, 10, 0).unwrap();
        map.index = vec![100.0, 0.0];
        let csv = export_map(&map, MapFormat::Csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4); // metadata + header + 2 cells
        assert_eq!(lines[1], "x,y,z,D,class");
        assert!(lines[2].ends_with("100,MostSuitable"));
        assert!(lines[3].ends_with("0,Unsuitable"));
    }

    #[test]
    fn export_import_round_trip_identity() {
        let arm = PlanarTwoLinkArm::new(Point3::new(0.0, 0.0, 0.0), 0.6, 0.4, 1.1).unwrap();
        let bounds = Region::from_box(
            Aabb::new(Point3::new(-1.0, -1.0, -0.05), Point3::new(1.0, 1.0, 0.05)).unwrap(),
        );
        let map = build_capability_map(&arm, "arm1", &bounds, 0.5, 32, 4).unwrap();
        for fmt in [MapFormat::Csv, MapFormat::Json] {
            let text = export_map(&map, fmt).unwrap();
            let back = import_map(&text, fmt).unwrap();
            assert_eq!(back.robot_id, map.robot_id);
            assert_eq!(back.dims, map.dims);
            assert_eq!(back.index, map.index);
            assert_eq!(back.origin, map.origin);
            assert_eq!(back.cell_m, map.cell_m);
            if fmt == MapFormat::Json {
                assert_eq!(back, map);
            }
        }
    }

    #[test]
    fn trait_object_oracles_work() {
        let boxed: Box<dyn ReachabilityOracle> = Box::new(AcceptAll);
        let d = reachability_index(boxed.as_ref(), &Point3::new(0.0, 0.0, 0.0), 10, 0).unwrap();
        assert_eq!(d, 100.0);
    }
}
