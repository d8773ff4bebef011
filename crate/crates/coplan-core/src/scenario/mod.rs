//! Declarative scenario descriptions: agents, parts, locations, paths,
//! gains, information requirements and goals, plus the built-in desk
//! assembly benchmark (two manipulators and a worker assembling
//! base-and-ring products and delivering them to a storage).

mod compile;
mod parse;

pub use compile::{compile, CompiledProblem, ScenarioCostSource};
pub use parse::load_scenario;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::cost::{CostGains, InfoRequirement, InfoRequirements};
use crate::model::{
    Aabb, ActionKind, AgentKind, AgentRange, AgentSpec, InfoItem, LocationSpec, PartSpec, PathSpec,
    Point3, Region, Trajectory,
};

/// Seconds per action kind.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Durations {
    pub pick_s: f64,
    pub place_s: f64,
    pub move_s: f64,
    pub cooperate_s: f64,
    pub assemble_s: f64,
}

impl Default for Durations {
    fn default() -> Self {
        Durations {
            pick_s: 2.0,
            place_s: 2.0,
            move_s: 10.0,
            cooperate_s: 15.0,
            assemble_s: 1.0,
        }
    }
}

/// `inputs -> output at location`: consuming the inputs at the location
/// produces the output part there. The output part is implicitly
/// declared; its weight is the sum of the input weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssembleRule {
    pub inputs: Vec<String>,
    pub output: String,
    pub at: String,
}

/// A goal fact: the part must end up at the location.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalAtom {
    pub part: String,
    pub location: String,
}

/// A derived human-guides-robot pairing.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GuidanceCombo {
    pub human: String,
    pub robot: String,
}

/// Declarative description of one planning instance; the single source
/// of truth the cost engine and the compiler work from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub agents: Vec<AgentSpec>,
    pub parts: Vec<PartSpec>,
    pub locations: Vec<LocationSpec>,
    pub paths: Vec<PathSpec>,
    pub gains: CostGains,
    pub info_reqs: InfoRequirements,
    /// Robot activity level per location, feeding the safety formula.
    pub safety_d: Vec<(String, f64)>,
    /// Pinned safety values per (agent, location-or-path), overriding
    /// the formula where a scenario fixes C_S directly.
    pub safety_override: Vec<(String, String, f64)>,
    pub durations: Durations,
    /// Initial end-effector/station location per agent.
    pub start_at: Vec<(String, String)>,
    pub goal: Vec<GoalAtom>,
    pub assemble_rules: Vec<AssembleRule>,
}

impl ScenarioConfig {
    pub fn agent(&self, id: &str) -> Option<&AgentSpec> {
        self.agents.iter().find(|a| a.id == id)
    }

    pub fn location(&self, id: &str) -> Option<&LocationSpec> {
        self.locations.iter().find(|l| l.id == id)
    }

    pub fn path(&self, id: &str) -> Option<&PathSpec> {
        self.paths.iter().find(|p| p.id == id)
    }

    pub fn declared_part(&self, id: &str) -> Option<&PartSpec> {
        self.parts.iter().find(|p| p.id == id)
    }

    /// Declared parts plus the outputs of assemble rules, in declaration
    /// order. Output weights are the sums of their input weights.
    pub fn all_parts(&self) -> Vec<PartSpec> {
        let mut out = self.parts.clone();
        for rule in &self.assemble_rules {
            if out.iter().any(|p| p.id == rule.output) {
                continue;
            }
            let weight = rule
                .inputs
                .iter()
                .map(|i| {
                    out.iter()
                        .find(|p| p.id == *i)
                        .map(|p| p.weight_kg)
                        .unwrap_or(0.0)
                })
                .sum();
            out.push(PartSpec {
                id: rule.output.clone(),
                weight_kg: weight,
                initial_location: None,
            });
        }
        out
    }

    /// First declared part stored at the location; the representative
    /// part of that location's cost-table cell.
    pub fn part_initially_at(&self, loc_id: &str) -> Option<&PartSpec> {
        self.parts
            .iter()
            .find(|p| p.initial_location.as_deref() == Some(loc_id))
    }

    pub fn location_at_point(&self, p: &Point3) -> Option<&LocationSpec> {
        self.locations.iter().find(|l| l.position.dist(p) <= 1e-6)
    }

    pub fn safety_d_for(&self, loc_id: &str) -> f64 {
        self.safety_d
            .iter()
            .find(|(id, _)| id == loc_id)
            .map(|(_, d)| *d)
            .unwrap_or(0.0)
    }

    /// Activity level along a path: the worst of its two endpoints.
    pub fn safety_d_for_path(&self, path: &PathSpec) -> f64 {
        self.safety_d_for(&path.from)
            .max(self.safety_d_for(&path.to))
    }

    pub fn safety_override_for(&self, agent_id: &str, param: &str) -> Option<f64> {
        self.safety_override
            .iter()
            .find(|(a, p, _)| a == agent_id && p == param)
            .map(|(_, _, v)| *v)
    }

    pub fn start_location_of(&self, agent_id: &str) -> Option<&str> {
        self.start_at
            .iter()
            .find(|(a, _)| a == agent_id)
            .map(|(_, l)| l.as_str())
    }

    /// Ranges of every robot in the cell.
    pub fn robot_ranges(&self) -> Vec<Region> {
        self.agents
            .iter()
            .filter(|a| a.kind == AgentKind::Robot)
            .filter_map(|a| match &a.range {
                AgentRange::Within(r) => Some(r.clone()),
                AgentRange::Unbounded => None,
            })
            .collect()
    }

    /// Human-guides-robot pairings derived from the declared information
    /// requirements: every human can guide every robot that has one.
    pub fn guidance_combos(&self) -> Vec<GuidanceCombo> {
        let mut combos: Vec<GuidanceCombo> = Vec::new();
        for req in &self.info_reqs.0 {
            for human in self.agents.iter().filter(|a| a.kind == AgentKind::Human) {
                let combo = GuidanceCombo {
                    human: human.id.clone(),
                    robot: req.agent.clone(),
                };
                if !combos.contains(&combo) {
                    combos.push(combo);
                }
            }
        }
        combos.sort();
        combos
    }

    /// Cross-reference and invariant checks; errors name a path into the
    /// document, e.g. `parts[0].weight`.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let err = |path: String, msg: String| Err(ScenarioError { path, msg });

        let mut seen: Vec<&str> = Vec::new();
        let check_id = |path: String, id: &str| -> Result<(), ScenarioError> {
            if id.is_empty()
                || !id.chars().next().unwrap().is_ascii_lowercase()
                || !id
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
            {
                return Err(ScenarioError {
                    path,
                    msg: format!(
                        "id `{id}` must be lower-case alphanumeric/underscore and start with a letter"
                    ),
                });
            }
            if id == "none" {
                return Err(ScenarioError {
                    path,
                    msg: "`none` is reserved".to_string(),
                });
            }
            Ok(())
        };

        for (i, a) in self.agents.iter().enumerate() {
            check_id(format!("agents[{i}].id"), &a.id)?;
            if a.strength_limit_kg.is_nan() || a.strength_limit_kg <= 0.0 {
                return err(format!("agents[{i}].strength"), "must be positive".into());
            }
            if a.coop_coeff < 0.0 {
                return err(format!("agents[{i}].coop"), "must be >= 0".into());
            }
            if a.kind == AgentKind::Human && a.range != AgentRange::Unbounded {
                return err(
                    format!("agents[{i}].range"),
                    "humans move anywhere; no range allowed".into(),
                );
            }
            if a.kind == AgentKind::Robot && a.range == AgentRange::Unbounded {
                return err(
                    format!("agents[{i}].range"),
                    "robots need a declared range".into(),
                );
            }
        }
        for (i, p) in self.parts.iter().enumerate() {
            check_id(format!("parts[{i}].id"), &p.id)?;
            if p.weight_kg.is_nan() || p.weight_kg <= 0.0 {
                return err(format!("parts[{i}].weight"), "must be positive".into());
            }
            match &p.initial_location {
                Some(l) if self.location(l).is_none() => {
                    return err(format!("parts[{i}].at"), format!("unknown location `{l}`"))
                }
                None => {
                    return err(
                        format!("parts[{i}].at"),
                        "declared parts need an initial location".into(),
                    )
                }
                _ => {}
            }
        }
        for (i, l) in self.locations.iter().enumerate() {
            check_id(format!("locations[{i}].id"), &l.id)?;
            if !l.position.is_finite() {
                return err(format!("locations[{i}].pos"), "must be finite".into());
            }
            for (robot, d) in &l.reach_index {
                match self.agent(robot) {
                    None => {
                        return err(
                            format!("locations[{i}].d"),
                            format!("unknown robot `{robot}`"),
                        )
                    }
                    Some(a) if a.kind != AgentKind::Robot => {
                        return err(
                            format!("locations[{i}].d"),
                            format!("`{robot}` is not a robot"),
                        )
                    }
                    _ => {}
                }
                if !(0.0..=100.0).contains(d) {
                    return err(
                        format!("locations[{i}].d"),
                        format!("index {d} outside [0, 100]"),
                    );
                }
            }
        }
        for (i, p) in self.paths.iter().enumerate() {
            check_id(format!("paths[{i}].id"), &p.id)?;
            let from = self.location(&p.from).ok_or(ScenarioError {
                path: format!("paths[{i}].from"),
                msg: format!("unknown location `{}`", p.from),
            })?;
            let to = self.location(&p.to).ok_or(ScenarioError {
                path: format!("paths[{i}].to"),
                msg: format!("unknown location `{}`", p.to),
            })?;
            if p.trajectory.start().dist(&from.position) > 1e-6
                || p.trajectory.end().dist(&to.position) > 1e-6
            {
                return err(
                    format!("paths[{i}].trajectory"),
                    "endpoints must coincide with the from/to locations".into(),
                );
            }
        }
        self.gains.validate().map_err(|e| ScenarioError {
            path: "gains".to_string(),
            msg: e.to_string(),
        })?;
        for (i, req) in self.info_reqs.0.iter().enumerate() {
            match self.agent(&req.agent) {
                None => {
                    return err(
                        format!("info[{i}].agent"),
                        format!("unknown agent `{}`", req.agent),
                    )
                }
                Some(a) if a.kind != AgentKind::Robot => {
                    return err(
                        format!("info[{i}].agent"),
                        "information requirements apply to robots only".into(),
                    )
                }
                _ => {}
            }
            if let Some(part) = &req.part {
                if !self.all_parts().iter().any(|p| &p.id == part) {
                    return err(format!("info[{i}].part"), format!("unknown part `{part}`"));
                }
            }
            if let Some(at) = &req.at {
                if self.location(at).is_none() && self.path(at).is_none() {
                    return err(format!("info[{i}].at"), format!("unknown location `{at}`"));
                }
            }
            if req.requires.is_empty() {
                return err(format!("info[{i}].requires"), "empty requirement".into());
            }
        }
        for (i, (loc, d)) in self.safety_d.iter().enumerate() {
            if self.location(loc).is_none() {
                return err(
                    format!("safety_d[{i}]"),
                    format!("unknown location `{loc}`"),
                );
            }
            if !(0.0..=100.0).contains(d) {
                return err(
                    format!("safety_d[{i}]"),
                    format!("index {d} outside [0, 100]"),
                );
            }
        }
        for (i, (agent, param, v)) in self.safety_override.iter().enumerate() {
            if self.agent(agent).is_none() {
                return err(
                    format!("safety_override[{i}]"),
                    format!("unknown agent `{agent}`"),
                );
            }
            if self.location(param).is_none() && self.path(param).is_none() {
                return err(
                    format!("safety_override[{i}]"),
                    format!("unknown location or path `{param}`"),
                );
            }
            if *v < 0.0 {
                return err(format!("safety_override[{i}]"), "must be >= 0".into());
            }
        }
        let d = &self.durations;
        for (name, v) in [
            ("pick", d.pick_s),
            ("place", d.place_s),
            ("move", d.move_s),
            ("cooperate", d.cooperate_s),
            ("assemble", d.assemble_s),
        ] {
            if v.is_nan() || v <= 0.0 {
                return err(format!("durations.{name}"), "must be positive".into());
            }
        }
        for a in &self.agents {
            match self.start_location_of(&a.id) {
                None => {
                    return err(
                        format!("agents[].at ({})", a.id),
                        "every agent needs a start location".into(),
                    )
                }
                Some(l) if self.location(l).is_none() => {
                    return err(
                        format!("agents[].at ({})", a.id),
                        format!("unknown location `{l}`"),
                    )
                }
                _ => {}
            }
        }
        let mut known_parts: Vec<&str> = self.parts.iter().map(|p| p.id.as_str()).collect();
        for (i, rule) in self.assemble_rules.iter().enumerate() {
            for input in &rule.inputs {
                if !known_parts.contains(&input.as_str()) {
                    return err(
                        format!("assemble[{i}].inputs"),
                        format!("unknown part `{input}`"),
                    );
                }
            }
            if rule.inputs.len() < 2 {
                return err(
                    format!("assemble[{i}].inputs"),
                    "need at least 2 inputs".into(),
                );
            }
            check_id(format!("assemble[{i}].output"), &rule.output)?;
            if known_parts.contains(&rule.output.as_str()) {
                return err(
                    format!("assemble[{i}].output"),
                    format!("duplicate part `{}`", rule.output),
                );
            }
            if self.location(&rule.at).is_none() {
                return err(
                    format!("assemble[{i}].at"),
                    format!("unknown location `{}`", rule.at),
                );
            }
            known_parts.push(&rule.output);
        }
        if self.goal.is_empty() {
            return err("goal".to_string(), "empty goal".into());
        }
        for (i, g) in self.goal.iter().enumerate() {
            if !known_parts.contains(&g.part.as_str()) {
                return err(
                    format!("goal[{i}].part"),
                    format!("unknown part `{}`", g.part),
                );
            }
            if self.location(&g.location).is_none() {
                return err(
                    format!("goal[{i}].location"),
                    format!("unknown location `{}`", g.location),
                );
            }
        }

        // Global id uniqueness across namespaces that meet in PDDL.
        for id in self
            .agents
            .iter()
            .map(|a| a.id.as_str())
            .chain(self.parts.iter().map(|p| p.id.as_str()))
            .chain(self.assemble_rules.iter().map(|r| r.output.as_str()))
            .chain(self.locations.iter().map(|l| l.id.as_str()))
            .chain(self.paths.iter().map(|p| p.id.as_str()))
        {
            if seen.contains(&id) {
                return err("ids".to_string(), format!("duplicate id `{id}`"));
            }
            seen.push(id);
        }
        Ok(())
    }
}

/// The desk-scale assembly benchmark: two manipulators and a worker,
/// base parts at storage_1, rings at storage_2, assembly at the shared
/// workspace, delivery to storage_3. `cycles` (1 or 2) picks how many
/// finished products the goal demands.
pub fn builtin_benchmark(cycles: usize) -> Result<ScenarioConfig, ScenarioError> {
    if !(1..=2).contains(&cycles) {
        return Err(ScenarioError {
            path: "cycles".to_string(),
            msg: format!("cycles must be 1 or 2, got {cycles}"),
        });
    }

    let storage_1 = Point3::new(-0.5, 0.4, 0.0);
    let storage_2 = Point3::new(0.5, 0.4, 0.0);
    let storage_3 = Point3::new(0.0, -0.6, 0.0);
    let workspace = Point3::new(0.0, 0.0, 0.0);

    let robot1_range = Region::from_box(
        Aabb::new(Point3::new(-0.8, -0.8, -0.2), Point3::new(0.15, 0.6, 0.5)).unwrap(),
    );
    let robot2_range = Region::from_box(
        Aabb::new(Point3::new(-0.15, -0.25, -0.2), Point3::new(0.8, 0.6, 0.5)).unwrap(),
    );

    let agents = alloc::vec![
        AgentSpec {
            id: "robot1".to_string(),
            kind: AgentKind::Robot,
            strength_limit_kg: 3.0,
            range: AgentRange::Within(robot1_range),
            known_info: Vec::new(),
            coop_coeff: 1.0,
            base: Point3::new(-0.15, 0.0, 0.0),
        },
        AgentSpec {
            id: "robot2".to_string(),
            kind: AgentKind::Robot,
            strength_limit_kg: 3.0,
            range: AgentRange::Within(robot2_range),
            known_info: Vec::new(),
            coop_coeff: 1.0,
            base: Point3::new(0.15, 0.0, 0.0),
        },
        AgentSpec {
            id: "worker".to_string(),
            kind: AgentKind::Human,
            strength_limit_kg: 3.0,
            range: AgentRange::Unbounded,
            known_info: Vec::new(),
            coop_coeff: 0.2,
            base: storage_3,
        }
    ];

    let mut parts = Vec::new();
    let mut assemble_rules = Vec::new();
    let mut goal = Vec::new();
    let mut info_reqs = Vec::new();
    for c in 1..=cycles {
        parts.push(PartSpec {
            id: format!("base_{c}"),
            weight_kg: 0.135,
            initial_location: Some("storage_1".to_string()),
        });
        parts.push(PartSpec {
            id: format!("ring_{c}"),
            weight_kg: 0.073,
            initial_location: Some("storage_2".to_string()),
        });
        assemble_rules.push(AssembleRule {
            inputs: alloc::vec![format!("base_{c}"), format!("ring_{c}")],
            output: format!("finished_{c}"),
            at: "workspace".to_string(),
        });
        goal.push(GoalAtom {
            part: format!("finished_{c}"),
            location: "storage_3".to_string(),
        });
        // Placing any ring needs the base fixture coordinate, which only
        // worker guidance provides; the item is shared across cycles.
        info_reqs.push(InfoRequirement {
            agent: "robot2".to_string(),
            kind: ActionKind::Place,
            part: Some(format!("ring_{c}")),
            at: None,
            requires: alloc::vec![InfoItem("coord_base_1".to_string())],
        });
    }

    let locations = alloc::vec![
        LocationSpec {
            id: "storage_1".to_string(),
            position: storage_1,
            reach_index: alloc::vec![("robot1".to_string(), 96.0)],
        },
        LocationSpec {
            id: "storage_2".to_string(),
            position: storage_2,
            reach_index: alloc::vec![("robot2".to_string(), 96.0)],
        },
        LocationSpec {
            id: "storage_3".to_string(),
            position: storage_3,
            reach_index: alloc::vec![("robot1".to_string(), 11.0)],
        },
        LocationSpec {
            id: "workspace".to_string(),
            position: workspace,
            reach_index: alloc::vec![("robot1".to_string(), 54.5), ("robot2".to_string(), 54.5)],
        },
    ];

    let line = |a: Point3, b: Point3| Trajectory::new(alloc::vec![a, b]).unwrap();
    let paths = alloc::vec![
        PathSpec {
            id: "path_1".to_string(),
            from: "storage_1".to_string(),
            to: "workspace".to_string(),
            trajectory: line(storage_1, workspace),
        },
        PathSpec {
            id: "path_2".to_string(),
            from: "storage_2".to_string(),
            to: "workspace".to_string(),
            trajectory: line(storage_2, workspace),
        },
        PathSpec {
            id: "path_3".to_string(),
            from: "workspace".to_string(),
            to: "storage_3".to_string(),
            trajectory: line(workspace, storage_3),
        },
    ];

    let gains = CostGains {
        c_k: alloc::vec![
            (AgentKind::Robot, ActionKind::Pick, 0.4),
            (AgentKind::Robot, ActionKind::Place, 0.4),
            (AgentKind::Robot, ActionKind::Move, 0.6),
            (AgentKind::Human, ActionKind::Pick, 0.1),
            (AgentKind::Human, ActionKind::Place, 0.1),
            (AgentKind::Human, ActionKind::Move, 0.4),
        ],
        k_c: 3.0,
        c_h: 0.2,
        c_r: 1.0,
        double_count_ci: false,
    };

    // Activity levels for the safety formula; cells the formula cannot
    // reproduce carry pinned values below.
    let safety_d = alloc::vec![
        ("storage_1".to_string(), 96.0),
        ("storage_2".to_string(), 96.0),
        ("storage_3".to_string(), 0.0),
        ("workspace".to_string(), 45.5),
    ];
    let ovr = |agent: &str, param: &str, v: f64| (agent.to_string(), param.to_string(), v);
    let safety_override = alloc::vec![
        ovr("robot1", "storage_1", 0.0),
        ovr("robot1", "path_1", 0.637),
        ovr("robot1", "path_3", 0.0),
        ovr("robot2", "storage_2", 0.0),
        ovr("robot2", "path_2", 0.637),
        ovr("worker", "storage_3", 0.404),
        ovr("worker", "workspace", 0.637),
        ovr("worker", "path_1", 2.976),
        ovr("worker", "path_2", 2.976),
        ovr("worker", "path_3", 0.637),
    ];

    let cfg = ScenarioConfig {
        name: "desk_assembly".to_string(),
        agents,
        parts,
        locations,
        paths,
        gains,
        info_reqs: InfoRequirements(info_reqs),
        safety_d,
        safety_override,
        durations: Durations::default(),
        start_at: alloc::vec![
            ("robot1".to_string(), "storage_1".to_string()),
            ("robot2".to_string(), "workspace".to_string()),
            ("worker".to_string(), "storage_3".to_string()),
        ],
        goal,
        assemble_rules,
    };
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioError {
    /// Path into the document, e.g. `parts[1].weight`.
    pub path: String,
    pub msg: String,
}

impl ScenarioError {
    pub fn new(path: impl Into<String>, msg: impl Into<String>) -> Self {
        ScenarioError {
            path: path.into(),
            msg: msg.into(),
        }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.msg)
    }
}

impl core::error::Error for ScenarioError {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmark_matches_experiment_setup() {
        let cfg = builtin_benchmark(2).unwrap();
        assert_eq!(cfg.agents.len(), 3);
        assert_eq!(
            cfg.agents
                .iter()
                .filter(|a| a.kind == AgentKind::Robot)
                .count(),
            2
        );
        // Part weights: 135 g bases, 73 g rings.
        assert_eq!(cfg.declared_part("base_1").unwrap().weight_kg, 0.135);
        assert_eq!(cfg.declared_part("ring_2").unwrap().weight_kg, 0.073);
        // Gains as configured in the experiment.
        assert_eq!(cfg.gains.ck(AgentKind::Robot, ActionKind::Pick), 0.4);
        assert_eq!(cfg.gains.ck(AgentKind::Robot, ActionKind::Move), 0.6);
        assert_eq!(cfg.gains.ck(AgentKind::Human, ActionKind::Place), 0.1);
        assert_eq!(cfg.gains.ck(AgentKind::Human, ActionKind::Move), 0.4);
        assert_eq!(cfg.gains.k_c, 3.0);
        assert_eq!(cfg.gains.c_h, 0.2);
        assert_eq!(cfg.gains.c_r, 1.0);
        // Reach indices.
        let ws = cfg.location("workspace").unwrap();
        assert_eq!(ws.reach_index_for("robot1"), Some(54.5));
        assert_eq!(ws.reach_index_for("robot2"), Some(54.5));
        assert_eq!(
            cfg.location("storage_3").unwrap().reach_index_for("robot1"),
            Some(11.0)
        );
    }

    #[test]
    fn benchmark_goals_scale_with_cycles() {
        let one = builtin_benchmark(1).unwrap();
        assert_eq!(one.goal.len(), 1);
        assert_eq!(one.goal[0].part, "finished_1");
        assert_eq!(one.goal[0].location, "storage_3");
        let two = builtin_benchmark(2).unwrap();
        assert_eq!(two.goal.len(), 2);
        assert!(builtin_benchmark(0).is_err());
        assert!(builtin_benchmark(3).is_err());
    }

    #[test]
    fn derived_parts_get_summed_weights() {
        let cfg = builtin_benchmark(1).unwrap();
        let all = cfg.all_parts();
        let fin = all.iter().find(|p| p.id == "finished_1").unwrap();
        assert!((fin.weight_kg - 0.208).abs() < 1e-12);
        assert_eq!(fin.initial_location, None);
    }

    #[test]
    fn guidance_combos_derive_from_info_reqs() {
        let cfg = builtin_benchmark(2).unwrap();
        assert_eq!(
            cfg.guidance_combos(),
            alloc::vec![GuidanceCombo {
                human: "worker".to_string(),
                robot: "robot2".to_string()
            }]
        );
    }

    #[test]
    fn validation_rejects_negative_weight() {
        let mut cfg = builtin_benchmark(1).unwrap();
        cfg.parts[0].weight_kg = -1.0;
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.path, "parts[0].weight");
        assert!(err.msg.contains("positive"));
    }

    #[test]
    fn validation_rejects_unknown_path_endpoint() {
        let mut cfg = builtin_benchmark(1).unwrap();
        cfg.paths[0].to = "nowhere".to_string();
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.path, "paths[0].to");
        assert!(err.msg.contains("nowhere"));
    }

    #[test]
    fn validation_rejects_human_info_requirements() {
        let mut cfg = builtin_benchmark(1).unwrap();
        cfg.info_reqs.0[0].agent = "worker".to_string();
        let err = cfg.validate().unwrap_err();
        assert!(err.msg.contains("robots only"));
    }

    #[test]
    fn validation_rejects_duplicate_ids() {
        let mut cfg = builtin_benchmark(1).unwrap();
        cfg.locations[0].id = "robot1".to_string();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn path_trajectories_match_location_positions() {
        let cfg = builtin_benchmark(2).unwrap();
        for p in &cfg.paths {
            let from = cfg.location(&p.from).unwrap();
            let to = cfg.location(&p.to).unwrap();
            assert!(p.trajectory.start().dist(&from.position) <= 1e-6);
            assert!(p.trajectory.end().dist(&to.position) <= 1e-6);
        }
    }
}
