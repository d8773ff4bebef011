//! Independent checker for timed plans: simulates the schedule and
//! verifies that every action's preconditions hold in the state produced
//! by all previously finished actions, that no two steps sharing an
//! agent overlap in time, and that the final state satisfies the goal.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::Serialize;

use super::{applicable, satisfies_goal, State};
use crate::pddl::{GroundedTask, TimedPlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    UnknownAction,
    PreconditionUnmet,
    AgentOverlap,
    GoalUnmet,
}

/// First problem found in a plan, with the offending step index.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub step: usize,
    pub kind: ViolationKind,
    pub detail: String,
}

impl Violation {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap_or_else(|_| String::from("{}"))
    }
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "step {}: {:?}: {}", self.step, self.kind, self.detail)
    }
}

impl core::error::Error for Violation {}

/// Validate a timed plan against a grounded task.
pub fn validate_plan(task: &GroundedTask, plan: &TimedPlan) -> Result<(), Violation> {
    // Bind steps to ops by their display name.
    let mut bound: Vec<usize> = Vec::with_capacity(plan.steps.len());
    for (i, step) in plan.steps.iter().enumerate() {
        match task.op_by_name(&step.action) {
            Some((idx, _)) => bound.push(idx),
            None => {
                return Err(Violation {
                    step: i,
                    kind: ViolationKind::UnknownAction,
                    detail: format!("no grounded action named {}", step.action),
                })
            }
        }
    }

    // Chronological order; ties resolve by position in the plan.
    let mut order: Vec<usize> = (0..plan.steps.len()).collect();
    order.sort_by(|&a, &b| {
        plan.steps[a]
            .start_s
            .total_cmp(&plan.steps[b].start_s)
            .then(a.cmp(&b))
    });

    for (pos, &i) in order.iter().enumerate() {
        let step = &plan.steps[i];
        let op = &task.ops[bound[i]];

        // Agent overlap against every earlier-starting step.
        for &j in &order[..pos] {
            let other = &plan.steps[j];
            let other_op = &task.ops[bound[j]];
            let share_agent = op.agents.iter().any(|a| other_op.agents.contains(a));
            if !share_agent {
                continue;
            }
            let overlap = step.start_s < other.finish_s() && other.start_s < step.finish_s();
            if overlap {
                return Err(Violation {
                    step: i,
                    kind: ViolationKind::AgentOverlap,
                    detail: format!(
                        "steps {} and {} share an agent and overlap in time",
                        other.action, step.action
                    ),
                });
            }
        }

        // State produced by everything that finished by this start.
        let state = state_at(task, plan, &bound, step.start_s);
        if !applicable(&state, op) {
            let missing = op
                .pre
                .iter()
                .find(|&&p| !state.contains(p))
                .map(|&p| task.propositions[p as usize].clone())
                .unwrap_or_else(|| "negative precondition violated".to_string());
            return Err(Violation {
                step: i,
                kind: ViolationKind::PreconditionUnmet,
                detail: format!("{} requires {}", step.action, missing),
            });
        }
    }

    // Final state after every step has finished.
    let horizon = plan
        .steps
        .iter()
        .map(|s| s.finish_s())
        .fold(0.0f64, f64::max);
    let final_state = state_at(task, plan, &bound, horizon);
    if !satisfies_goal(&final_state, task) {
        let missing = task
            .goal
            .iter()
            .find(|&&g| !final_state.contains(g))
            .map(|&g| task.propositions[g as usize].clone())
            .unwrap_or_default();
        return Err(Violation {
            step: plan.steps.len().saturating_sub(1),
            kind: ViolationKind::GoalUnmet,
            detail: format!("goal {missing} does not hold at the end"),
        });
    }
    Ok(())
}

/// State after applying every step that finishes at or before `t`, in
/// finish order (ties by plan position). Effects apply unconditionally;
/// precondition checking is the caller's business.
fn state_at(task: &GroundedTask, plan: &TimedPlan, bound: &[usize], t: f64) -> State {
    let mut finished: Vec<usize> = (0..plan.steps.len())
        .filter(|&i| plan.steps[i].finish_s() <= t)
        .collect();
    finished.sort_by(|&a, &b| {
        plan.steps[a]
            .finish_s()
            .total_cmp(&plan.steps[b].finish_s())
            .then(a.cmp(&b))
    });
    let mut state = State::initial(task);
    for i in finished {
        let op = &task.ops[bound[i]];
        for &d in &op.del {
            state.remove(d);
        }
        for &a in &op.add {
            state.insert(a);
        }
    }
    state
}

#[cfg(test)]
mod tests {
    use super::super::search::{plan_search, SearchResult};
    use super::super::testutil::{random_task, task};
    use super::super::timed_plan_from;
    use super::*;
    use crate::cost::ExtCost;
    use crate::pddl::{TimedPlan, TimedStep};

    #[test]
    fn planner_output_validates() {
        for seed in 0..40u64 {
            let t = random_task(seed, 10, 12);
            if let SearchResult::Plan(p) = plan_search(&t, None).unwrap() {
                let timed = timed_plan_from(&t, &p).unwrap();
                assert_eq!(validate_plan(&t, &timed), Ok(()), "seed {seed}");
            }
        }
    }

    #[test]
    fn deleting_a_step_breaks_the_plan() {
        let t = task(
            3,
            &[
                ("(make)", &[], &[0], &[], 1.0),
                ("(use)", &[0], &[1], &[], 1.0),
            ],
            &[],
            &[1],
        );
        let timed = TimedPlan::new(
            alloc::vec![TimedStep {
                start_s: 0.0,
                action: "(use)".into(),
                duration_s: 1.0,
            }],
            ExtCost::new(1.0),
        );
        let v = validate_plan(&t, &timed).unwrap_err();
        assert_eq!(v.kind, ViolationKind::PreconditionUnmet);
        assert!(v.detail.contains("(p0)"), "{}", v.detail);
    }

    #[test]
    fn agent_overlap_is_reported() {
        let mut t = task(
            3,
            &[("(a)", &[], &[0], &[], 1.0), ("(b)", &[], &[1], &[], 1.0)],
            &[],
            &[0, 1],
        );
        t.ops[0].agents = alloc::vec![String::from("r1")];
        t.ops[1].agents = alloc::vec![String::from("r1")];
        let timed = TimedPlan::new(
            alloc::vec![
                TimedStep {
                    start_s: 0.0,
                    action: "(a)".into(),
                    duration_s: 2.0,
                },
                TimedStep {
                    start_s: 1.0,
                    action: "(b)".into(),
                    duration_s: 2.0,
                },
            ],
            ExtCost::new(2.0),
        );
        let v = validate_plan(&t, &timed).unwrap_err();
        assert_eq!(v.kind, ViolationKind::AgentOverlap);
    }

    #[test]
    fn back_to_back_steps_do_not_overlap() {
        let mut t = task(
            3,
            &[("(a)", &[], &[0], &[], 1.0), ("(b)", &[0], &[1], &[], 1.0)],
            &[],
            &[0, 1],
        );
        t.ops[0].agents = alloc::vec![String::from("r1")];
        t.ops[1].agents = alloc::vec![String::from("r1")];
        let timed = TimedPlan::new(
            alloc::vec![
                TimedStep {
                    start_s: 0.0,
                    action: "(a)".into(),
                    duration_s: 2.0,
                },
                TimedStep {
                    start_s: 2.0,
                    action: "(b)".into(),
                    duration_s: 2.0,
                },
            ],
            ExtCost::new(2.0),
        );
        assert_eq!(validate_plan(&t, &timed), Ok(()));
    }

    #[test]
    fn unknown_action_is_reported() {
        let t = task(2, &[("(a)", &[], &[0], &[], 1.0)], &[], &[0]);
        let timed = TimedPlan::new(
            alloc::vec![TimedStep {
                start_s: 0.0,
                action: "(ghost)".into(),
                duration_s: 1.0,
            }],
            ExtCost::ZERO,
        );
        let v = validate_plan(&t, &timed).unwrap_err();
        assert_eq!(v.kind, ViolationKind::UnknownAction);
    }

    #[test]
    fn goal_unmet_is_reported() {
        let t = task(2, &[("(a)", &[], &[0], &[], 1.0)], &[], &[1]);
        let timed = TimedPlan::new(
            alloc::vec![TimedStep {
                start_s: 0.0,
                action: "(a)".into(),
                duration_s: 1.0,
            }],
            ExtCost::new(1.0),
        );
        let v = validate_plan(&t, &timed).unwrap_err();
        assert_eq!(v.kind, ViolationKind::GoalUnmet);
        assert!(v.detail.contains("(p1)"));
    }

    #[test]
    fn violation_serializes_to_structured_json() {
        let v = Violation {
            step: 3,
            kind: ViolationKind::AgentOverlap,
            detail: String::from("x"),
        };
        let json = v.to_json();
        assert!(json.contains("\"step\":3"));
        assert!(json.contains("agent_overlap"));
    }
}
