//! The task-allocation cost engine.
//!
//! Every grounded (agents, action, parameters) combination gets a cost on
//! the extended non-negative reals, assembled from:
//!
//! * feasibility gates: agent strength `F_S`, information level `F_I`,
//!   range membership `F_R` (each 0 or infinity),
//! * the reachability term `R_R` driven by the capability index D,
//! * the safety term `C_S` combining the action risk gain `C_K`, the
//!   human trajectory intersection coefficient `C_I`, and the robot
//!   activity level of the action area,
//! * the cooperation criterion `C_P` scaling multi-agent actions.
//!
//! A solo action totals `1 + F_S + F_I + F_R + R_R + C_I + C_S` (the
//! standalone `C_I` term defaults to zero because the safety term already
//! consumes it; `double_count_ci` restores the literal reading). A
//! cooperative action totals `C_P` times the mean of the participants'
//! solo costs, with the guided robot's information gate waived since the
//! cooperation is what supplies the information.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::model::{
    ActionKind, AgentKind, AgentSpec, InfoItem, PartSpec, Point3, Region, Trajectory,
};
use crate::scenario::ScenarioConfig;

/// A cost value: a finite non-negative real or positive infinity.
/// Infinity marks infeasible assignments and absorbs addition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExtCost(f64);

impl ExtCost {
    pub const ZERO: ExtCost = ExtCost(0.0);
    pub const INFINITY: ExtCost = ExtCost(f64::INFINITY);

    /// Wrap a value. Panics on NaN or negative input; those are
    /// programming errors, not domain outcomes.
    pub fn new(v: f64) -> Self {
        assert!(!v.is_nan(), "cost must not be NaN");
        assert!(v >= 0.0, "cost must be non-negative, got {v}");
        ExtCost(v)
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(&self) -> bool {
        self.0.is_infinite()
    }

    /// Multiply by a non-negative factor. `inf * 0` resolves to zero so
    /// scaling an infeasible cost by "no agents" stays well defined.
    pub fn scale(&self, factor: f64) -> Self {
        assert!(factor >= 0.0 && !factor.is_nan());
        if self.0.is_infinite() {
            if factor == 0.0 {
                ExtCost::ZERO
            } else {
                ExtCost::INFINITY
            }
        } else {
            ExtCost::new(self.0 * factor)
        }
    }
}

impl Add for ExtCost {
    type Output = ExtCost;

    fn add(self, rhs: ExtCost) -> ExtCost {
        ExtCost(self.0 + rhs.0)
    }
}

impl AddAssign for ExtCost {
    fn add_assign(&mut self, rhs: ExtCost) {
        self.0 += rhs.0;
    }
}

impl Eq for ExtCost {}

impl PartialOrd for ExtCost {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtCost {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        // No NaN by invariant, so total_cmp agrees with numeric order.
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for ExtCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Gain configuration of the cost model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostGains {
    /// Risk gain `C_K` per (agent kind, action kind).
    pub c_k: Vec<(AgentKind, ActionKind, f64)>,
    /// Intersection gain `K_C` added when a worker trajectory crosses a
    /// robot range.
    pub k_c: f64,
    /// Cooperation coefficient of human agents.
    pub c_h: f64,
    /// Cooperation coefficient of robot agents.
    pub c_r: f64,
    /// Restore the literal Eq.-(6) reading where `C_I` is counted both
    /// standalone and inside the safety term.
    pub double_count_ci: bool,
}

impl CostGains {
    pub fn ck(&self, agent: AgentKind, action: ActionKind) -> f64 {
        // Cooperation is a guided place; it shares the pick/place gain.
        let action = match action {
            ActionKind::Cooperate => ActionKind::Place,
            other => other,
        };
        self.c_k
            .iter()
            .find(|(k, a, _)| *k == agent && *a == action)
            .map(|(_, _, g)| *g)
            .unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<(), CostError> {
        let all_non_negative = self.k_c >= 0.0
            && self.c_h >= 0.0
            && self.c_r >= 0.0
            && self.c_k.iter().all(|(_, _, g)| *g >= 0.0);
        if all_non_negative {
            Ok(())
        } else {
            Err(CostError::NegativeGain)
        }
    }
}

/// One information requirement: agent `agent` needs `requires` before it
/// can run actions matching (kind, part, at); `None` matches anything.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfoRequirement {
    pub agent: String,
    pub kind: ActionKind,
    pub part: Option<String>,
    pub at: Option<String>,
    pub requires: Vec<InfoItem>,
}

/// The set of declared information requirements of a scenario.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InfoRequirements(pub Vec<InfoRequirement>);

impl InfoRequirements {
    /// Union of required items over all matching declarations, sorted and
    /// duplicate-free.
    pub fn required_for(
        &self,
        agent: &str,
        kind: ActionKind,
        part: Option<&str>,
        at: Option<&str>,
    ) -> Vec<InfoItem> {
        let mut items: Vec<InfoItem> = Vec::new();
        for req in &self.0 {
            if req.agent != agent || req.kind != kind {
                continue;
            }
            if let (Some(need), Some(have)) = (req.part.as_deref(), part) {
                if need != have {
                    continue;
                }
            }
            if req.part.is_some() && part.is_none() {
                continue;
            }
            if let (Some(need), Some(have)) = (req.at.as_deref(), at) {
                if need != have {
                    continue;
                }
            }
            items.extend(req.requires.iter().cloned());
        }
        items.sort();
        items.dedup();
        items
    }
}

/// Per-action cost decomposition plus the assembled total.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub f_s: ExtCost,
    pub f_i: ExtCost,
    pub f_r: ExtCost,
    pub r_r: ExtCost,
    pub c_i: ExtCost,
    pub c_s: ExtCost,
    pub total: ExtCost,
}

impl CostBreakdown {
    pub fn assemble(
        f_s: ExtCost,
        f_i: ExtCost,
        f_r: ExtCost,
        r_r: ExtCost,
        c_i: ExtCost,
        c_s: ExtCost,
    ) -> Self {
        let total = ExtCost::new(1.0) + f_s + f_i + f_r + r_r + c_i + c_s;
        CostBreakdown {
            f_s,
            f_i,
            f_r,
            r_r,
            c_i,
            c_s,
            total,
        }
    }

    pub fn component_sum(&self) -> ExtCost {
        self.f_s + self.f_i + self.f_r + self.r_r + self.c_i + self.c_s
    }
}

/// Strength criterion `S_a = 1 - W_P / S_L`. May go negative when the
/// part outweighs the agent's limit.
pub fn strength_criterion(agent: &AgentSpec, part: &PartSpec) -> f64 {
    1.0 - part.weight_kg / agent.strength_limit_kg
}

/// Weight-loading feasibility gate `F_S`: zero when the agent has spare
/// strength, infinite otherwise. A part exactly at the limit counts as
/// infeasible; zero margin is no margin.
pub fn strength_cost(agent: &AgentSpec, part: &PartSpec) -> ExtCost {
    if strength_criterion(agent, part) > 0.0 {
        ExtCost::ZERO
    } else {
        ExtCost::INFINITY
    }
}

/// Information-level gate `F_I` from an already-resolved requirement set:
/// robots need `required` to be a subset of what they know; humans carry
/// no requirements.
pub fn information_cost_for(agent: &AgentSpec, required: &[InfoItem]) -> ExtCost {
    if agent.kind == AgentKind::Human {
        return ExtCost::ZERO;
    }
    if required.iter().all(|i| agent.known_info.contains(i)) {
        ExtCost::ZERO
    } else {
        ExtCost::INFINITY
    }
}

/// Information-level gate `F_I` for a concrete action under the declared
/// requirement set.
pub fn information_cost(
    agent: &AgentSpec,
    kind: ActionKind,
    part: Option<&str>,
    at: Option<&str>,
    reqs: &InfoRequirements,
) -> ExtCost {
    let required = reqs.required_for(&agent.id, kind, part, at);
    information_cost_for(agent, &required)
}

/// Range gate `F_R`: zero for humans, zero for robots when the target
/// lies in the declared range, infinite otherwise. For MOVE the caller
/// passes the farthest trajectory point from the robot base.
pub fn flexibility_cost(agent: &AgentSpec, target: &Point3) -> ExtCost {
    match agent.kind {
        AgentKind::Human => ExtCost::ZERO,
        AgentKind::Robot => {
            if agent.range.contains(target) {
                ExtCost::ZERO
            } else {
                ExtCost::INFINITY
            }
        }
    }
}

/// Reachability term `R_R` from the capability index D:
/// 0 above 60, `1 - D/100` on (20, 60], `100/D` at or below 20, and
/// infinity at D = 0 (no valid reach solution at all).
pub fn reachability_cost(agent: &AgentSpec, d: f64) -> Result<ExtCost, CostError> {
    if agent.kind == AgentKind::Human {
        return Ok(ExtCost::ZERO);
    }
    if !(0.0..=100.0).contains(&d) {
        return Err(CostError::IndexOutOfRange(d));
    }
    Ok(if d > 60.0 {
        ExtCost::ZERO
    } else if d > 20.0 {
        ExtCost::new(1.0 - d / 100.0)
    } else if d > 0.0 {
        ExtCost::new(100.0 / d)
    } else {
        ExtCost::INFINITY
    })
}

/// Intersection coefficient `C_I`: `k_c` when the worker trajectory
/// meets any robot range, zero otherwise. Applies to human agents only.
pub fn intersection_coefficient(
    worker_traj: &Trajectory,
    robot_ranges: &[Region],
    k_c: f64,
) -> f64 {
    if robot_ranges
        .iter()
        .any(|r| crate::model::trajectory_intersects(worker_traj, r))
    {
        k_c
    } else {
        0.0
    }
}

/// Safety term `C_S`: robots pay `(1 + C_K) * d/100`, humans pay
/// `(C_I + C_K) * d/100`, where d is the activity level of the
/// surrounding robot workspace at the action area.
pub fn safety_cost(
    agent: AgentKind,
    kind: ActionKind,
    d: f64,
    c_i: f64,
    gains: &CostGains,
) -> Result<ExtCost, CostError> {
    if !(0.0..=100.0).contains(&d) {
        return Err(CostError::IndexOutOfRange(d));
    }
    let ck = gains.ck(agent, kind);
    let v = match agent {
        AgentKind::Robot => (1.0 + ck) * d / 100.0,
        AgentKind::Human => (c_i + ck) * d / 100.0,
    };
    Ok(ExtCost::new(v))
}

/// Cooperation criterion `C_P = (1 + c)^(N-1)` with c chosen from the
/// team composition: `C_H` all-human, `C_R` all-robot, their mean when
/// mixed.
pub fn cooperation_criterion(kinds: &[AgentKind], gains: &CostGains) -> Result<f64, CostError> {
    if kinds.is_empty() {
        return Err(CostError::EmptyAgentList);
    }
    let any_human = kinds.contains(&AgentKind::Human);
    let any_robot = kinds.contains(&AgentKind::Robot);
    let coeff = match (any_human, any_robot) {
        (true, false) => gains.c_h,
        (false, true) => gains.c_r,
        _ => (gains.c_h + gains.c_r) / 2.0,
    };
    let mut c_p = 1.0;
    for _ in 1..kinds.len() {
        c_p *= 1.0 + coeff;
    }
    Ok(c_p)
}

/// Everything an agent/action cost evaluation needs besides the agent.
#[derive(Clone, Debug)]
pub struct CostContext<'a> {
    /// Involved part, if the action handles one.
    pub part: Option<&'a PartSpec>,
    /// Range-check target: the action point, or the farthest trajectory
    /// point from the agent base for MOVE.
    pub target: Point3,
    /// Capability index D at the action area for the acting robot.
    pub reach_d: f64,
    /// Robot activity level feeding the safety term.
    pub safety_d: f64,
    /// Planned trajectory when the agent is a worker (reach or walk).
    pub worker_trajectory: Option<&'a Trajectory>,
    /// Ranges of all robot manipulators in the cell.
    pub robot_ranges: &'a [Region],
    pub gains: &'a CostGains,
    /// Resolved information requirement of this (agent, action).
    pub required_info: &'a [InfoItem],
    /// Scenario-pinned safety value overriding the formula path.
    pub pinned_safety: Option<f64>,
    /// Evaluate as if the information gate were satisfied (used for the
    /// post-knowledge table entries and for guided cooperation).
    pub waive_info: bool,
}

/// Solo action cost per the total-cost composition (one agent).
pub fn agent_action_cost(
    agent: &AgentSpec,
    kind: ActionKind,
    ctx: &CostContext<'_>,
) -> Result<CostBreakdown, CostError> {
    let f_s = match ctx.part {
        Some(p) => strength_cost(agent, p),
        None => ExtCost::ZERO,
    };
    let f_i = if ctx.waive_info {
        ExtCost::ZERO
    } else {
        information_cost_for(agent, ctx.required_info)
    };
    let f_r = flexibility_cost(agent, &ctx.target);
    let r_r = reachability_cost(agent, ctx.reach_d)?;
    let c_i_raw = match (agent.kind, ctx.worker_trajectory) {
        (AgentKind::Human, Some(t)) => intersection_coefficient(t, ctx.robot_ranges, ctx.gains.k_c),
        _ => 0.0,
    };
    let c_s = match ctx.pinned_safety {
        Some(v) => ExtCost::new(v),
        None => safety_cost(agent.kind, kind, ctx.safety_d, c_i_raw, ctx.gains)?,
    };
    let c_i = if ctx.gains.double_count_ci {
        ExtCost::new(c_i_raw)
    } else {
        ExtCost::ZERO
    };
    Ok(CostBreakdown::assemble(f_s, f_i, f_r, r_r, c_i, c_s))
}

/// Cooperative action cost: the cooperation criterion times the mean of
/// the participants' solo costs, with each participant's information
/// gate waived (guidance is what supplies the information). Any solo
/// cost that is infinite for another reason keeps the total infinite.
pub fn cooperative_cost(
    agents: &[&AgentSpec],
    kind: ActionKind,
    contexts: &[CostContext<'_>],
) -> Result<ExtCost, CostError> {
    if agents.is_empty() {
        return Err(CostError::EmptyAgentList);
    }
    assert_eq!(agents.len(), contexts.len());
    let kinds: Vec<AgentKind> = agents.iter().map(|a| a.kind).collect();
    let c_p = cooperation_criterion(&kinds, contexts[0].gains)?;
    let mut sum = ExtCost::ZERO;
    for (agent, ctx) in agents.iter().zip(contexts) {
        let mut solo_ctx = ctx.clone();
        solo_ctx.waive_info = true;
        let solo = agent_action_cost(agent, kind, &solo_ctx)?;
        sum += solo.total;
    }
    Ok(sum.scale(1.0 / agents.len() as f64).scale(c_p))
}

/// Action grouping used by cost tables: pick and place share gains and
/// parameters, so they share a table cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionGroup {
    PickPlace,
    Move,
    Cooperate,
}

impl fmt::Display for ActionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionGroup::PickPlace => write!(f, "pick/place"),
            ActionGroup::Move => write!(f, "move"),
            ActionGroup::Cooperate => write!(f, "cooperate"),
        }
    }
}

/// Whether a row depends on the knowledge state of the acting robot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfoState {
    /// No information dependency.
    Always,
    /// Entry before the required information is acquired.
    BeforeKnowledge,
    /// Entry after the required information is acquired.
    AfterKnowledge,
}

/// One row of a cost table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    /// Acting agent id; cooperative rows join ids with `+`.
    pub agent: String,
    pub action: ActionGroup,
    /// Location id for pick/place/cooperate, path id for move.
    pub param: String,
    pub info_state: InfoState,
    pub breakdown: CostBreakdown,
}

/// Cost table over every (agent, action group, parameter) combination of
/// a scenario, plus derived cooperative combinations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostTable {
    pub rows: Vec<CostRow>,
}

impl CostTable {
    /// The row used for grounding: the post-knowledge entry when a cell
    /// is state-dependent, else the single entry.
    pub fn cell(&self, agent: &str, action: ActionGroup, param: &str) -> Option<&CostRow> {
        let mut found: Option<&CostRow> = None;
        for row in &self.rows {
            if row.agent == agent && row.action == action && row.param == param {
                match row.info_state {
                    InfoState::AfterKnowledge | InfoState::Always => return Some(row),
                    InfoState::BeforeKnowledge => found = Some(row),
                }
            }
        }
        found
    }

    /// CSV rendering: `agent,action,param,f_s,f_i,f_r,r_r,c_i,c_s,total`,
    /// infinities rendered `inf`. State-dependent cells appear twice
    /// (before, then after knowledge).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("agent,action,param,f_s,f_i,f_r,r_r,c_i,c_s,total\n");
        for row in &self.rows {
            let b = &row.breakdown;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                row.agent, row.action, row.param, b.f_s, b.f_i, b.f_r, b.r_r, b.c_i, b.c_s, b.total
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String, CostError> {
        serde_json::to_string_pretty(self).map_err(|e| CostError::Serialize(e.to_string()))
    }
}

/// Build the full cost table of a scenario: a row per (agent, pick/place,
/// location) and (agent, move, path), with state-dependent information
/// entries emitted twice, plus one cooperative row per guidance
/// combination and feasible location.
pub fn build_cost_table(scenario: &ScenarioConfig) -> Result<CostTable, CostError> {
    scenario
        .validate()
        .map_err(|e| CostError::BadScenario(e.to_string()))?;
    let gains = &scenario.gains;
    let robot_ranges: Vec<Region> = scenario.robot_ranges();

    let mut rows = Vec::new();

    for agent in &scenario.agents {
        // Pick/place cells per location.
        for loc in &scenario.locations {
            let part = scenario.part_initially_at(&loc.id);
            let required = scenario.info_reqs.required_for(
                &agent.id,
                ActionKind::Place,
                part.map(|p| p.id.as_str()),
                Some(&loc.id),
            );
            let reach_d = resolve_reach_d(scenario, agent, &loc.id)?;
            let traj = worker_reach_trajectory(agent, &loc.position);
            let ctx = CostContext {
                part,
                target: loc.position,
                reach_d,
                safety_d: scenario.safety_d_for(&loc.id),
                worker_trajectory: traj.as_ref(),
                robot_ranges: &robot_ranges,
                gains,
                required_info: &required,
                pinned_safety: scenario.safety_override_for(&agent.id, &loc.id),
                waive_info: false,
            };
            push_rows(
                &mut rows,
                agent,
                ActionKind::Place,
                ActionGroup::PickPlace,
                &loc.id,
                &ctx,
                &required,
            )?;
        }
        // Move cells per path.
        for path in &scenario.paths {
            let target = path.trajectory.farthest_waypoint_from(&agent.base);
            let reach_d =
                if agent.kind == AgentKind::Robot && flexibility_cost(agent, &target).is_finite() {
                    let loc = scenario.location_at_point(&target).ok_or_else(|| {
                        CostError::NoReachIndexAtPoint {
                            agent: agent.id.clone(),
                            param: path.id.clone(),
                        }
                    })?;
                    resolve_reach_d(scenario, agent, &loc.id)?
                } else {
                    100.0
                };
            let required =
                scenario
                    .info_reqs
                    .required_for(&agent.id, ActionKind::Move, None, Some(&path.id));
            let ctx = CostContext {
                part: None,
                target,
                reach_d,
                safety_d: scenario.safety_d_for_path(path),
                worker_trajectory: Some(&path.trajectory),
                robot_ranges: &robot_ranges,
                gains,
                required_info: &required,
                pinned_safety: scenario.safety_override_for(&agent.id, &path.id),
                waive_info: false,
            };
            push_rows(
                &mut rows,
                agent,
                ActionKind::Move,
                ActionGroup::Move,
                &path.id,
                &ctx,
                &required,
            )?;
        }
    }

    // Cooperative combinations derived from the information requirements:
    // each human can guide each gated robot action at each location where
    // both solo place costs are finite.
    for combo in scenario.guidance_combos() {
        let human = scenario.agent(&combo.human).expect("validated");
        let robot = scenario.agent(&combo.robot).expect("validated");
        for loc in &scenario.locations {
            let robot_cell = rows
                .iter()
                .find(|r| {
                    r.agent == robot.id
                        && r.action == ActionGroup::PickPlace
                        && r.param == loc.id
                        && r.info_state != InfoState::BeforeKnowledge
                })
                .map(|r| r.breakdown);
            let human_cell = rows
                .iter()
                .find(|r| {
                    r.agent == human.id && r.action == ActionGroup::PickPlace && r.param == loc.id
                })
                .map(|r| r.breakdown);
            let (Some(rb), Some(hb)) = (robot_cell, human_cell) else {
                continue;
            };
            if rb.total.is_infinite() || hb.total.is_infinite() {
                continue;
            }
            let c_p = cooperation_criterion(&[human.kind, robot.kind], gains)?;
            let mean = |a: ExtCost, b: ExtCost| (a + b).scale(0.5);
            let total = mean(hb.total, rb.total).scale(c_p);
            let breakdown = CostBreakdown {
                f_s: mean(hb.f_s, rb.f_s),
                f_i: ExtCost::ZERO,
                f_r: mean(hb.f_r, rb.f_r),
                r_r: mean(hb.r_r, rb.r_r),
                c_i: mean(hb.c_i, rb.c_i),
                c_s: mean(hb.c_s, rb.c_s),
                total,
            };
            rows.push(CostRow {
                agent: format!("{}+{}", human.id, robot.id),
                action: ActionGroup::Cooperate,
                param: loc.id.clone(),
                info_state: InfoState::Always,
                breakdown,
            });
        }
    }

    Ok(CostTable { rows })
}

fn push_rows(
    rows: &mut Vec<CostRow>,
    agent: &AgentSpec,
    kind: ActionKind,
    group: ActionGroup,
    param: &str,
    ctx: &CostContext<'_>,
    required: &[InfoItem],
) -> Result<(), CostError> {
    let state_dependent = agent.kind == AgentKind::Robot
        && !required.is_empty()
        && !required.iter().all(|i| agent.known_info.contains(i));
    if state_dependent {
        let before = agent_action_cost(agent, kind, ctx)?;
        rows.push(CostRow {
            agent: agent.id.clone(),
            action: group,
            param: param.to_string(),
            info_state: InfoState::BeforeKnowledge,
            breakdown: before,
        });
        let mut after_ctx = ctx.clone();
        after_ctx.waive_info = true;
        let after = agent_action_cost(agent, kind, &after_ctx)?;
        rows.push(CostRow {
            agent: agent.id.clone(),
            action: group,
            param: param.to_string(),
            info_state: InfoState::AfterKnowledge,
            breakdown: after,
        });
    } else {
        let breakdown = agent_action_cost(agent, kind, ctx)?;
        rows.push(CostRow {
            agent: agent.id.clone(),
            action: group,
            param: param.to_string(),
            info_state: InfoState::Always,
            breakdown,
        });
    }
    Ok(())
}

/// Reach index of a robot at a location: the location's declared value,
/// or an error when the location is inside the robot's range but carries
/// no index. Locations outside the range never need one.
pub fn resolve_reach_d(
    scenario: &ScenarioConfig,
    agent: &AgentSpec,
    loc_id: &str,
) -> Result<f64, CostError> {
    if agent.kind == AgentKind::Human {
        return Ok(100.0);
    }
    let loc = scenario
        .location(loc_id)
        .ok_or_else(|| CostError::UnknownId(loc_id.to_string()))?;
    if let Some(d) = loc.reach_index_for(&agent.id) {
        return Ok(d);
    }
    if agent.range.contains(&loc.position) {
        Err(CostError::NoReachIndexAtPoint {
            agent: agent.id.clone(),
            param: loc_id.to_string(),
        })
    } else {
        // Out of range: F_R is infinite anyway, the index is moot.
        Ok(100.0)
    }
}

/// Worker reach for a pick/place: the segment from the station point to
/// the target, or None when the worker already stands there.
pub fn worker_reach_trajectory(agent: &AgentSpec, target: &Point3) -> Option<Trajectory> {
    if agent.kind != AgentKind::Human || agent.base == *target {
        return None;
    }
    Trajectory::new([agent.base, *target].into()).ok()
}

#[derive(Clone, Debug, PartialEq)]
pub enum CostError {
    EmptyAgentList,
    IndexOutOfRange(f64),
    NegativeGain,
    UnknownId(String),
    NoReachIndexAtPoint { agent: String, param: String },
    BadScenario(String),
    Serialize(String),
}

impl fmt::Display for CostError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostError::EmptyAgentList => write!(f, "empty agent list"),
            CostError::IndexOutOfRange(d) => write!(f, "index out of range: {d}"),
            CostError::NegativeGain => write!(f, "gains must be non-negative"),
            CostError::UnknownId(id) => write!(f, "unknown id `{id}`"),
            CostError::NoReachIndexAtPoint { agent, param } => {
                write!(f, "no reachability index for `{agent}` at `{param}`")
            }
            CostError::BadScenario(e) => write!(f, "invalid scenario: {e}"),
            CostError::Serialize(e) => write!(f, "serialize failed: {e}"),
        }
    }
}

impl core::error::Error for CostError {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Aabb, AgentRange};
    use alloc::vec;

    fn human(id: &str) -> AgentSpec {
        AgentSpec {
            id: id.into(),
            kind: AgentKind::Human,
            strength_limit_kg: 3.0,
            range: AgentRange::Unbounded,
            known_info: vec![],
            coop_coeff: 0.2,
            base: Point3::new(0.0, -0.6, 0.0),
        }
    }

    fn robot(id: &str, range: Region) -> AgentSpec {
        AgentSpec {
            id: id.into(),
            kind: AgentKind::Robot,
            strength_limit_kg: 3.0,
            range: AgentRange::Within(range),
            known_info: vec![],
            coop_coeff: 1.0,
            base: Point3::new(0.0, 0.0, 0.0),
        }
    }

    fn part(id: &str, kg: f64) -> PartSpec {
        PartSpec {
            id: id.into(),
            weight_kg: kg,
            initial_location: None,
        }
    }

    fn experiment_gains() -> CostGains {
        CostGains {
            c_k: vec![
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
        }
    }

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} !~ {b}");
    }

    #[test]
    fn ext_cost_arithmetic() {
        assert_eq!(ExtCost::INFINITY + ExtCost::new(2.0), ExtCost::INFINITY);
        assert_eq!(ExtCost::new(1.0) + ExtCost::new(2.0), ExtCost::new(3.0));
        assert!(ExtCost::new(5.0) < ExtCost::INFINITY);
        assert_eq!(format!("{}", ExtCost::INFINITY), "inf");
        assert_eq!(ExtCost::INFINITY.scale(0.0), ExtCost::ZERO);
    }

    #[test]
    #[should_panic]
    fn ext_cost_rejects_negative() {
        let _ = ExtCost::new(-0.1);
    }

    #[test]
    fn strength_criterion_base_part() {
        // 135 g against a 3 kg limit.
        let s = strength_criterion(&human("w"), &part("base_1", 0.135));
        approx(s, 0.955, 1e-12);
    }

    #[test]
    fn strength_criterion_boundaries() {
        let a = human("w");
        assert_eq!(strength_criterion(&a, &part("p", 3.0)), 0.0);
        assert_eq!(strength_criterion(&a, &part("p", 6.0)), -1.0);
    }

    #[test]
    fn strength_cost_gate() {
        let a = human("w");
        assert_eq!(strength_cost(&a, &part("p", 0.135)), ExtCost::ZERO);
        assert_eq!(strength_cost(&a, &part("p", 6.0)), ExtCost::INFINITY);
        // Exactly at the limit: infeasible by the zero-margin rule.
        assert_eq!(strength_cost(&a, &part("p", 3.0)), ExtCost::INFINITY);
    }

    #[test]
    fn strength_cost_monotone_in_weight() {
        let a = human("w");
        let mut prev = ExtCost::ZERO;
        let mut w = 0.1;
        while w < 7.0 {
            let c = strength_cost(&a, &part("p", w));
            assert!(c >= prev);
            prev = c;
            w += 0.3;
        }
    }

    #[test]
    fn information_gate() {
        let mut r = robot("robot2", Region::empty());
        let need = vec![InfoItem("coord_base_1".into())];
        assert_eq!(information_cost_for(&r, &need), ExtCost::INFINITY);
        r.known_info.push(InfoItem("coord_base_1".into()));
        assert_eq!(information_cost_for(&r, &need), ExtCost::ZERO);
        assert_eq!(information_cost_for(&r, &[]), ExtCost::ZERO);
        // Humans carry no requirements.
        assert_eq!(information_cost_for(&human("w"), &need), ExtCost::ZERO);
    }

    #[test]
    fn knowledge_growth_never_raises_the_gate() {
        let mut r = robot("r", Region::empty());
        let need = vec![InfoItem("a".into()), InfoItem("b".into())];
        let mut prev = information_cost_for(&r, &need);
        for item in ["a", "b", "c"] {
            r.known_info.push(InfoItem(item.into()));
            let now = information_cost_for(&r, &need);
            assert!(now <= prev);
            prev = now;
        }
        assert_eq!(prev, ExtCost::ZERO);
    }

    #[test]
    fn flexibility_gate() {
        let range = Region::from_box(
            Aabb::new(Point3::new(-1.0, -1.0, -1.0), Point3::new(1.0, 1.0, 1.0)).unwrap(),
        );
        let r = robot("r", range);
        assert_eq!(
            flexibility_cost(&r, &Point3::new(0.5, 0.5, 0.0)),
            ExtCost::ZERO
        );
        assert_eq!(
            flexibility_cost(&r, &Point3::new(2.0, 0.0, 0.0)),
            ExtCost::INFINITY
        );
        assert_eq!(
            flexibility_cost(&human("w"), &Point3::new(99.0, 99.0, 99.0)),
            ExtCost::ZERO
        );
    }

    #[test]
    fn reachability_piecewise_values() {
        let r = robot("r", Region::empty());
        let cases = [
            (100.0, 0.0),
            (60.001, 0.0),
            (60.0, 0.4),
            (54.5, 0.455),
            (20.001, 0.79999),
            (20.0, 5.0),
            (11.0, 100.0 / 11.0),
        ];
        for (d, want) in cases {
            let got = reachability_cost(&r, d).unwrap();
            approx(got.value(), want, 1e-9);
        }
        assert_eq!(reachability_cost(&r, 0.0).unwrap(), ExtCost::INFINITY);
        assert!(reachability_cost(&r, 101.0).is_err());
        assert_eq!(reachability_cost(&human("w"), 11.0).unwrap(), ExtCost::ZERO);
    }

    #[test]
    fn reachability_non_increasing_in_d() {
        let r = robot("r", Region::empty());
        let mut prev = ExtCost::INFINITY;
        let mut d = 0.5;
        while d <= 100.0 {
            let c = reachability_cost(&r, d).unwrap();
            assert!(c <= prev, "R_R rose at d={d}");
            prev = c;
            d += 0.5;
        }
    }

    #[test]
    fn intersection_coefficient_cases() {
        let range = Region::from_box(
            Aabb::new(Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 1.0, 1.0)).unwrap(),
        );
        let crossing = Trajectory::new(vec![
            Point3::new(-1.0, 0.5, 0.5),
            Point3::new(2.0, 0.5, 0.5),
        ])
        .unwrap();
        let outside = Trajectory::new(vec![
            Point3::new(-1.0, 5.0, 0.5),
            Point3::new(2.0, 5.0, 0.5),
        ])
        .unwrap();
        assert_eq!(
            intersection_coefficient(&crossing, core::slice::from_ref(&range), 3.0),
            3.0
        );
        assert_eq!(intersection_coefficient(&outside, &[range], 3.0), 0.0);
        assert_eq!(intersection_coefficient(&crossing, &[], 3.0), 0.0);
    }

    #[test]
    fn safety_cost_formula() {
        let gains = experiment_gains();
        // Worker picking inside a most-suitable robot area (d = 96).
        let human_pick =
            safety_cost(AgentKind::Human, ActionKind::Pick, 96.0, 3.0, &gains).unwrap();
        approx(human_pick.value(), 2.976, 1e-9);
        // Robot picking at the shared workspace (d = 45.5).
        let robot_pick =
            safety_cost(AgentKind::Robot, ActionKind::Pick, 45.5, 0.0, &gains).unwrap();
        approx(robot_pick.value(), 0.637, 1e-9);
        // No robot activity means no safety cost for anyone.
        assert_eq!(
            safety_cost(AgentKind::Human, ActionKind::Move, 0.0, 3.0, &gains).unwrap(),
            ExtCost::ZERO
        );
    }

    #[test]
    fn cooperation_criterion_cases() {
        let gains = experiment_gains();
        let mixed = cooperation_criterion(&[AgentKind::Human, AgentKind::Robot], &gains).unwrap();
        assert_eq!(mixed, 1.6);
        let solo = cooperation_criterion(&[AgentKind::Human], &gains).unwrap();
        assert_eq!(solo, 1.0);
        let humans = cooperation_criterion(&[AgentKind::Human, AgentKind::Human], &gains).unwrap();
        approx(humans, 1.2, 1e-12);
        assert!(cooperation_criterion(&[], &gains).is_err());
    }

    #[test]
    fn solo_breakdown_composition() {
        let gains = experiment_gains();
        let range = Region::from_box(
            Aabb::new(Point3::new(-1.0, -1.0, -1.0), Point3::new(1.0, 1.0, 1.0)).unwrap(),
        );
        let r = robot("robot1", range);
        let p = part("base_1", 0.135);
        let ctx = CostContext {
            part: Some(&p),
            target: Point3::new(0.0, 0.0, 0.0),
            reach_d: 54.5,
            safety_d: 45.5,
            worker_trajectory: None,
            robot_ranges: &[],
            gains: &gains,
            required_info: &[],
            pinned_safety: None,
            waive_info: false,
        };
        let b = agent_action_cost(&r, ActionKind::Pick, &ctx).unwrap();
        approx(b.r_r.value(), 0.455, 1e-9);
        approx(b.c_s.value(), 0.637, 1e-9);
        approx(b.total.value(), 2.092, 1e-9);
        // total = 1 + component sum, exactly.
        assert_eq!(b.total, ExtCost::new(1.0) + b.component_sum());
    }

    #[test]
    fn infinite_component_forces_infinite_total() {
        let gains = experiment_gains();
        let r = robot("r", Region::empty());
        let ctx = CostContext {
            part: None,
            target: Point3::new(0.0, 0.0, 0.0),
            reach_d: 100.0,
            safety_d: 0.0,
            worker_trajectory: None,
            robot_ranges: &[],
            gains: &gains,
            required_info: &[],
            pinned_safety: None,
            waive_info: false,
        };
        let b = agent_action_cost(&r, ActionKind::Place, &ctx).unwrap();
        assert_eq!(b.f_r, ExtCost::INFINITY);
        assert_eq!(b.total, ExtCost::INFINITY);
    }

    #[test]
    fn cooperative_cost_guidance_figure() {
        // Worker guides robot2 placing at the workspace: solo costs 1.637
        // and 2.092, criterion 1.6, total 2.983.
        let gains = experiment_gains();
        let range = Region::from_box(
            Aabb::new(Point3::new(-1.0, -1.0, -1.0), Point3::new(1.0, 1.0, 1.0)).unwrap(),
        );
        let w = human("worker");
        let r = robot("robot2", range);
        let need = vec![InfoItem("coord_base_1".into())];
        let ws = Point3::new(0.0, 0.0, 0.0);
        let w_ctx = CostContext {
            part: None,
            target: ws,
            reach_d: 100.0,
            safety_d: 0.0,
            worker_trajectory: None,
            robot_ranges: &[],
            gains: &gains,
            required_info: &[],
            pinned_safety: Some(0.637),
            waive_info: false,
        };
        let r_ctx = CostContext {
            part: None,
            target: ws,
            reach_d: 54.5,
            safety_d: 45.5,
            worker_trajectory: None,
            robot_ranges: &[],
            gains: &gains,
            required_info: &need,
            pinned_safety: None,
            waive_info: false,
        };
        let total = cooperative_cost(
            &[&w, &r],
            ActionKind::Place,
            &[w_ctx.clone(), r_ctx.clone()],
        )
        .unwrap();
        approx(total.value(), 2.9832, 1e-9);

        // Without waiving, the robot's solo cost is infinite; the
        // cooperative path is what makes the action feasible.
        let solo = agent_action_cost(&r, ActionKind::Place, &r_ctx).unwrap();
        assert_eq!(solo.total, ExtCost::INFINITY);
    }

    #[test]
    fn cooperative_cost_degenerates_to_solo() {
        let gains = experiment_gains();
        let w = human("worker");
        let ctx = CostContext {
            part: None,
            target: Point3::new(0.0, 0.0, 0.0),
            reach_d: 100.0,
            safety_d: 45.5,
            worker_trajectory: None,
            robot_ranges: &[],
            gains: &gains,
            required_info: &[],
            pinned_safety: None,
            waive_info: false,
        };
        let solo = agent_action_cost(&w, ActionKind::Place, &ctx).unwrap();
        let coop = cooperative_cost(&[&w], ActionKind::Place, &[ctx]).unwrap();
        assert_eq!(coop, solo.total);
    }

    #[test]
    fn cooperative_cost_of_equal_agents_is_cp_times_solo() {
        let gains = experiment_gains();
        let w1 = human("w1");
        let w2 = human("w2");
        let ctx = CostContext {
            part: None,
            target: Point3::new(0.0, 0.0, 0.0),
            reach_d: 100.0,
            safety_d: 30.0,
            worker_trajectory: None,
            robot_ranges: &[],
            gains: &gains,
            required_info: &[],
            pinned_safety: None,
            waive_info: false,
        };
        let solo = agent_action_cost(&w1, ActionKind::Place, &ctx).unwrap();
        let coop = cooperative_cost(&[&w1, &w2], ActionKind::Place, &[ctx.clone(), ctx]).unwrap();
        approx(coop.value(), solo.total.value() * 1.2, 1e-12);
    }

    #[test]
    fn unreachable_partner_keeps_cooperation_infinite() {
        let gains = experiment_gains();
        let w = human("worker");
        let r = robot("r", Region::empty());
        let ctx_w = CostContext {
            part: None,
            target: Point3::new(0.0, 0.0, 0.0),
            reach_d: 100.0,
            safety_d: 0.0,
            worker_trajectory: None,
            robot_ranges: &[],
            gains: &gains,
            required_info: &[],
            pinned_safety: None,
            waive_info: false,
        };
        let ctx_r = ctx_w.clone();
        let total = cooperative_cost(&[&w, &r], ActionKind::Place, &[ctx_w, ctx_r]).unwrap();
        assert_eq!(total, ExtCost::INFINITY);
    }

    #[test]
    fn information_cost_resolves_requirements_per_action() {
        let reqs = InfoRequirements(vec![InfoRequirement {
            agent: "r2".into(),
            kind: ActionKind::Place,
            part: Some("ring".into()),
            at: None,
            requires: vec![InfoItem("coord".into())],
        }]);
        let mut r2 = robot("r2", Region::empty());
        let gate = information_cost(&r2, ActionKind::Place, Some("ring"), Some("ws"), &reqs);
        assert_eq!(gate, ExtCost::INFINITY);
        r2.known_info.push(InfoItem("coord".into()));
        let gate = information_cost(&r2, ActionKind::Place, Some("ring"), Some("ws"), &reqs);
        assert_eq!(gate, ExtCost::ZERO);
        // Unrelated actions pass regardless.
        assert_eq!(
            information_cost(&r2, ActionKind::Pick, Some("ring"), None, &reqs),
            ExtCost::ZERO
        );
    }

    #[test]
    fn info_requirements_matching() {
        let reqs = InfoRequirements(vec![InfoRequirement {
            agent: "robot2".into(),
            kind: ActionKind::Place,
            part: Some("ring_1".into()),
            at: None,
            requires: vec![InfoItem("coord_base_1".into())],
        }]);
        assert_eq!(
            reqs.required_for(
                "robot2",
                ActionKind::Place,
                Some("ring_1"),
                Some("anywhere")
            ),
            vec![InfoItem("coord_base_1".into())]
        );
        assert!(reqs
            .required_for("robot2", ActionKind::Place, Some("base_1"), None)
            .is_empty());
        assert!(reqs
            .required_for("robot2", ActionKind::Pick, Some("ring_1"), None)
            .is_empty());
        assert!(reqs
            .required_for("robot1", ActionKind::Place, Some("ring_1"), None)
            .is_empty());
        // A part-scoped requirement does not fire for part-less actions.
        assert!(reqs
            .required_for("robot2", ActionKind::Place, None, None)
            .is_empty());
    }
}
