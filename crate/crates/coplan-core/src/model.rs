//! Shared domain vocabulary: agents, parts, locations, paths, regions and
//! grounded action identities, plus the geometric predicates the cost
//! model needs. Everything is immutable after construction. Units are
//! meters, kilograms and seconds throughout.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// A point in workspace coordinates (meters).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dist_sq(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        dx * dx + dy * dy + dz * dz
    }

    pub fn dist(&self, other: &Point3) -> f64 {
        libm::sqrt(self.dist_sq(other))
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Closed axis-aligned box, min corner to max corner.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    /// Errors if any min component exceeds the matching max component.
    pub fn new(min: Point3, max: Point3) -> Result<Self, ModelError> {
        if min.x > max.x || min.y > max.y || min.z > max.z {
            return Err(ModelError::InvertedBox);
        }
        Ok(Aabb { min, max })
    }

    pub fn contains(&self, p: &Point3) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }
}

/// A workspace region as a union of closed axis-aligned boxes. The empty
/// list is the empty region. Regions are closed sets: boundary points
/// count as inside, which is the safe reading for range and safety tests.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub boxes: Vec<Aabb>,
}

impl Region {
    pub fn empty() -> Self {
        Region { boxes: Vec::new() }
    }

    pub fn from_box(b: Aabb) -> Self {
        Region {
            boxes: alloc::vec![b],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// Membership in the closed union of boxes.
    pub fn contains(&self, p: &Point3) -> bool {
        self.boxes.iter().any(|b| b.contains(p))
    }

    /// Axis-aligned bounding box of the whole region, if non-empty.
    pub fn bounding_box(&self) -> Option<Aabb> {
        let mut it = self.boxes.iter();
        let first = *it.next()?;
        let mut min = first.min;
        let mut max = first.max;
        for b in it {
            min.x = min.x.min(b.min.x);
            min.y = min.y.min(b.min.y);
            min.z = min.z.min(b.min.z);
            max.x = max.x.max(b.max.x);
            max.y = max.y.max(b.max.y);
            max.z = max.z.max(b.max.z);
        }
        Some(Aabb { min, max })
    }
}

/// Membership test for a point in a region (closed union of boxes).
pub fn region_contains(region: &Region, p: &Point3) -> bool {
    region.contains(p)
}

/// A planned motion as a polyline of waypoints, length >= 2, consecutive
/// waypoints distinct.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    waypoints: Vec<Point3>,
}

impl Trajectory {
    pub fn new(waypoints: Vec<Point3>) -> Result<Self, ModelError> {
        if waypoints.len() < 2 {
            return Err(ModelError::TooFewWaypoints);
        }
        for w in waypoints.windows(2) {
            if w[0] == w[1] {
                return Err(ModelError::DuplicateWaypoint);
            }
        }
        Ok(Trajectory { waypoints })
    }

    pub fn waypoints(&self) -> &[Point3] {
        &self.waypoints
    }

    pub fn start(&self) -> &Point3 {
        &self.waypoints[0]
    }

    pub fn end(&self) -> &Point3 {
        &self.waypoints[self.waypoints.len() - 1]
    }

    /// The waypoint farthest from `p`. Distance to a fixed point is convex
    /// along each segment, so the polyline maximum is at a waypoint.
    pub fn farthest_waypoint_from(&self, p: &Point3) -> Point3 {
        let mut best = self.waypoints[0];
        let mut best_d = best.dist_sq(p);
        for w in &self.waypoints[1..] {
            let d = w.dist_sq(p);
            if d > best_d {
                best = *w;
                best_d = d;
            }
        }
        best
    }
}

/// True iff any segment of the polyline meets the closed region. Exact
/// segment-vs-box slab clipping; no sampling.
pub fn trajectory_intersects(t: &Trajectory, r: &Region) -> bool {
    t.waypoints.windows(2).any(|seg| {
        r.boxes
            .iter()
            .any(|b| segment_hits_box(&seg[0], &seg[1], b))
    })
}

fn segment_hits_box(a: &Point3, b: &Point3, bx: &Aabb) -> bool {
    // Clip the parameter interval [0,1] against each slab.
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    let starts = [a.x, a.y, a.z];
    let dirs = [b.x - a.x, b.y - a.y, b.z - a.z];
    let mins = [bx.min.x, bx.min.y, bx.min.z];
    let maxs = [bx.max.x, bx.max.y, bx.max.z];
    for i in 0..3 {
        if dirs[i] == 0.0 {
            if starts[i] < mins[i] || starts[i] > maxs[i] {
                return false;
            }
        } else {
            let inv = 1.0 / dirs[i];
            let mut lo = (mins[i] - starts[i]) * inv;
            let mut hi = (maxs[i] - starts[i]) * inv;
            if lo > hi {
                core::mem::swap(&mut lo, &mut hi);
            }
            t0 = t0.max(lo);
            t1 = t1.min(hi);
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

/// Whether an agent is a human worker or a robot manipulator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgentKind {
    Human,
    Robot,
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentKind::Human => write!(f, "human"),
            AgentKind::Robot => write!(f, "robot"),
        }
    }
}

/// Operating range of an agent. Humans can move anywhere in the
/// workspace, so their range is structurally unbounded rather than a
/// large box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum AgentRange {
    Unbounded,
    Within(Region),
}

impl AgentRange {
    pub fn contains(&self, p: &Point3) -> bool {
        match self {
            AgentRange::Unbounded => true,
            AgentRange::Within(r) => r.contains(p),
        }
    }
}

/// A piece of environment information a robot may need before acting,
/// e.g. the coordinate of a part moved by another agent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InfoItem(pub String);

impl fmt::Display for InfoItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An agent of the collaborative cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub id: String,
    pub kind: AgentKind,
    /// Worker strength limit, or robot indicated payload (kg).
    pub strength_limit_kg: f64,
    pub range: AgentRange,
    /// Information already available to the agent.
    pub known_info: Vec<InfoItem>,
    /// Cooperation coefficient: C_H for humans, C_R for robots.
    pub coop_coeff: f64,
    /// Station point of a worker or base of a manipulator.
    pub base: Point3,
}

impl AgentSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.strength_limit_kg.is_nan() || self.strength_limit_kg <= 0.0 {
            return Err(ModelError::NonPositiveStrength);
        }
        if self.coop_coeff < 0.0 {
            return Err(ModelError::NegativeCoopCoeff);
        }
        if self.kind == AgentKind::Human && self.range != AgentRange::Unbounded {
            return Err(ModelError::BoundedHuman);
        }
        Ok(())
    }
}

/// A workpiece.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartSpec {
    pub id: String,
    pub weight_kg: f64,
    /// Starting location; None for parts produced by assembly.
    pub initial_location: Option<String>,
}

/// A named place of the cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocationSpec {
    pub id: String,
    pub position: Point3,
    /// Explicit reachability index D per robot, overriding any capability
    /// map lookup. Values in [0, 100].
    pub reach_index: Vec<(String, f64)>,
}

impl LocationSpec {
    pub fn reach_index_for(&self, robot: &str) -> Option<f64> {
        self.reach_index
            .iter()
            .find(|(r, _)| r == robot)
            .map(|(_, d)| *d)
    }
}

/// A declared route between two locations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub id: String,
    pub from: String,
    pub to: String,
    pub trajectory: Trajectory,
}

/// The four action kinds of the cell vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActionKind {
    Pick,
    Place,
    Move,
    Cooperate,
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionKind::Pick => write!(f, "pick"),
            ActionKind::Place => write!(f, "place"),
            ActionKind::Move => write!(f, "move"),
            ActionKind::Cooperate => write!(f, "cooperate"),
        }
    }
}

/// A fully instantiated action: who does what, where, for how long.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundAction {
    pub kind: ActionKind,
    /// Ordered, non-empty. Cooperate has >= 2 agents, the rest exactly 1.
    pub agents: Vec<String>,
    pub part: Option<String>,
    /// Location id for pick/place/cooperate, path id for move.
    pub at: String,
    pub duration_s: f64,
}

impl GroundAction {
    pub fn validate(&self) -> Result<(), ModelError> {
        match self.kind {
            ActionKind::Cooperate if self.agents.len() < 2 => {
                return Err(ModelError::CooperateNeedsTwoAgents)
            }
            ActionKind::Pick | ActionKind::Place | ActionKind::Move if self.agents.len() != 1 => {
                return Err(ModelError::SoloActionAgentCount)
            }
            _ => {}
        }
        if self.duration_s.is_nan() || self.duration_s <= 0.0 {
            return Err(ModelError::NonPositiveDuration);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelError {
    InvertedBox,
    TooFewWaypoints,
    DuplicateWaypoint,
    NonPositiveStrength,
    NegativeCoopCoeff,
    BoundedHuman,
    CooperateNeedsTwoAgents,
    SoloActionAgentCount,
    NonPositiveDuration,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::InvertedBox => write!(f, "box min corner exceeds max corner"),
            ModelError::TooFewWaypoints => write!(f, "trajectory needs at least 2 waypoints"),
            ModelError::DuplicateWaypoint => write!(f, "consecutive waypoints must be distinct"),
            ModelError::NonPositiveStrength => write!(f, "strength limit must be positive"),
            ModelError::NegativeCoopCoeff => write!(f, "cooperation coefficient must be >= 0"),
            ModelError::BoundedHuman => write!(f, "human agents have unbounded range"),
            ModelError::CooperateNeedsTwoAgents => {
                write!(f, "cooperate actions need at least 2 agents")
            }
            ModelError::SoloActionAgentCount => {
                write!(f, "pick/place/move actions take exactly 1 agent")
            }
            ModelError::NonPositiveDuration => write!(f, "duration must be positive"),
        }
    }
}

impl core::error::Error for ModelError {}
