//! Partial-order lift of a sequential plan and the earliest-start
//! schedule over the resulting precedence graph.
//!
//! Edges come from three sources: causal links (the step that actually
//! made a precondition true, linked to its consumer), threat orderings
//! (steps deleting a linked proposition are pushed outside the link),
//! and agent mutexes (steps sharing an agent keep their sequential
//! relative order). All edges point forward in the sequential plan, so
//! the graph is acyclic by construction.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use super::search::SequentialPlan;
use super::validate::{Violation, ViolationKind};
use super::{applicable, apply, satisfies_goal, State};
use crate::cost::ExtCost;
use crate::pddl::{GroundedTask, TimedPlan, TimedStep};

/// Why two steps are ordered.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeKind {
    /// Producer feeds a precondition of the consumer.
    Causal { prop: u32 },
    /// A deleter is pushed outside a causal link.
    Threat,
    /// The steps share an agent.
    AgentMutex { agent: String },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
}

/// Precedence graph over the steps of a sequential plan.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecedenceGraph {
    pub n_steps: usize,
    pub edges: Vec<Edge>,
}

/// Lift a sequential plan into a precedence graph. The plan is validated
/// while simulating; an invalid plan reports the violating step.
pub fn partial_order_lift(
    task: &GroundedTask,
    plan: &SequentialPlan,
) -> Result<PrecedenceGraph, Violation> {
    let n = plan.ops.len();
    let n_props = task.propositions.len();

    // Provenance while simulating: which step most recently made a
    // proposition true (false), None meaning "since init". A step that
    // re-adds an already-true proposition is not an achiever.
    let mut made_true: Vec<Option<usize>> = alloc::vec![None; n_props];
    let mut made_false: Vec<Option<usize>> = alloc::vec![None; n_props];

    struct Link {
        producer: Option<usize>,
        consumer: usize,
        prop: u32,
        positive: bool,
    }
    let mut links: Vec<Link> = Vec::new();

    let mut state = State::initial(task);
    for (step, &op_idx) in plan.ops.iter().enumerate() {
        let op = &task.ops[op_idx];
        if !applicable(&state, op) {
            return Err(Violation {
                step,
                kind: ViolationKind::PreconditionUnmet,
                detail: alloc::format!("step {} `{}` is not applicable", step, op.name),
            });
        }
        for &p in &op.pre {
            links.push(Link {
                producer: made_true[p as usize],
                consumer: step,
                prop: p,
                positive: true,
            });
        }
        for &q in &op.neg_pre {
            links.push(Link {
                producer: made_false[q as usize],
                consumer: step,
                prop: q,
                positive: false,
            });
        }
        for &d in &op.del {
            if state.contains(d) {
                made_false[d as usize] = Some(step);
            }
        }
        for &a in &op.add {
            if !state.contains(a) {
                made_true[a as usize] = Some(step);
            }
        }
        state = apply(&state, op);
    }
    if !satisfies_goal(&state, task) {
        return Err(Violation {
            step: n.saturating_sub(1),
            kind: ViolationKind::GoalUnmet,
            detail: String::from("sequential plan does not reach the goal"),
        });
    }

    let mut edges: BTreeSet<Edge> = BTreeSet::new();

    // Goal atoms act as consumers of a virtual final step: every deleter
    // of a goal proposition stays before the step that finally makes it
    // true.
    for &g in &task.goal {
        let Some(producer) = made_true[g as usize] else {
            continue;
        };
        for (k, &other_idx) in plan.ops.iter().enumerate() {
            if k != producer && task.ops[other_idx].del.contains(&g) {
                edges.insert(Edge {
                    from: k,
                    to: producer,
                    kind: EdgeKind::Threat,
                });
            }
        }
    }

    for link in &links {
        if let Some(j) = link.producer {
            edges.insert(Edge {
                from: j,
                to: link.consumer,
                kind: EdgeKind::Causal { prop: link.prop },
            });
        }
        // Steps undoing the linked proposition stay outside the link:
        // before the producer, or after the consumer.
        for (k, &other_idx) in plan.ops.iter().enumerate() {
            let other = &task.ops[other_idx];
            let undoes = if link.positive {
                other.del.contains(&link.prop)
            } else {
                other.add.contains(&link.prop)
            };
            if !undoes || k == link.consumer {
                continue;
            }
            match link.producer {
                Some(j) if k == j => continue,
                Some(j) if k < j => {
                    edges.insert(Edge {
                        from: k,
                        to: j,
                        kind: EdgeKind::Threat,
                    });
                }
                _ if k > link.consumer => {
                    edges.insert(Edge {
                        from: link.consumer,
                        to: k,
                        kind: EdgeKind::Threat,
                    });
                }
                _ => {}
            }
        }
    }

    // Agent mutex: consecutive steps of each agent keep their order.
    let mut agents: BTreeSet<&str> = BTreeSet::new();
    for &op_idx in &plan.ops {
        for a in &task.ops[op_idx].agents {
            agents.insert(a);
        }
    }
    for agent in agents {
        let mut prev: Option<usize> = None;
        for (step, &op_idx) in plan.ops.iter().enumerate() {
            if !task.ops[op_idx].agents.iter().any(|a| a == agent) {
                continue;
            }
            if let Some(p) = prev {
                edges.insert(Edge {
                    from: p,
                    to: step,
                    kind: EdgeKind::AgentMutex {
                        agent: String::from(agent),
                    },
                });
            }
            prev = Some(step);
        }
    }

    Ok(PrecedenceGraph {
        n_steps: n,
        edges: edges.into_iter().collect(),
    })
}

/// Start times per step and the resulting makespan.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub starts: Vec<f64>,
    pub makespan: f64,
}

/// Earliest-start longest-path schedule: a step starts when its last
/// predecessor finishes; sources start at zero.
pub fn schedule(graph: &PrecedenceGraph, durations: &[f64]) -> Schedule {
    assert_eq!(graph.n_steps, durations.len());
    for e in &graph.edges {
        // All lift edges point forward, which is also the cycle check.
        assert!(e.from < e.to, "precedence edge must point forward");
    }
    let mut starts = alloc::vec![0.0f64; graph.n_steps];
    for i in 0..graph.n_steps {
        let mut start = 0.0f64;
        for e in graph.edges.iter().filter(|e| e.to == i) {
            start = start.max(starts[e.from] + durations[e.from]);
        }
        starts[i] = start;
    }
    let makespan = starts
        .iter()
        .zip(durations)
        .map(|(s, d)| s + d)
        .fold(0.0, f64::max);
    Schedule { starts, makespan }
}

/// Lift, schedule, and package a sequential plan as a timed plan.
pub fn timed_plan_from(task: &GroundedTask, plan: &SequentialPlan) -> Result<TimedPlan, Violation> {
    let graph = partial_order_lift(task, plan)?;
    let durations: Vec<f64> = plan.ops.iter().map(|&i| task.ops[i].duration_s).collect();
    let sched = schedule(&graph, &durations);
    let steps: Vec<TimedStep> = plan
        .ops
        .iter()
        .zip(&sched.starts)
        .map(|(&op, &start)| TimedStep {
            start_s: start,
            action: task.ops[op].name.clone(),
            duration_s: task.ops[op].duration_s,
        })
        .collect();
    Ok(TimedPlan::new(steps, ExtCost::new(plan.cost)))
}

#[cfg(test)]
mod tests {
    use super::super::search::{plan_search, SearchResult};
    use super::super::testutil::{random_task, task};
    use super::*;
    use crate::rng::SplitMix64;

    fn lift_of(t: &GroundedTask, ops: &[usize]) -> PrecedenceGraph {
        let plan = SequentialPlan {
            ops: ops.to_vec(),
            cost: ops.iter().map(|&i| t.ops[i].cost).sum(),
        };
        partial_order_lift(t, &plan).unwrap()
    }

    #[test]
    fn independent_steps_carry_no_edge() {
        let t = task(
            4,
            &[("(a)", &[], &[0], &[], 1.0), ("(b)", &[], &[1], &[], 1.0)],
            &[],
            &[0, 1],
        );
        let g = lift_of(&t, &[0, 1]);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn causal_link_orders_producer_before_consumer() {
        let t = task(
            4,
            &[
                ("(make)", &[], &[0], &[], 1.0),
                ("(use)", &[0], &[1], &[], 1.0),
            ],
            &[],
            &[1],
        );
        let g = lift_of(&t, &[0, 1]);
        assert!(g
            .edges
            .iter()
            .any(|e| e.from == 0 && e.to == 1 && matches!(e.kind, EdgeKind::Causal { .. })));
    }

    #[test]
    fn shared_agent_steps_are_mutexed() {
        let mut t = task(
            4,
            &[
                ("(pick)", &[], &[0], &[], 1.0),
                ("(move)", &[0], &[1], &[], 1.0),
            ],
            &[],
            &[1],
        );
        t.ops[0].agents = alloc::vec![String::from("robot1")];
        t.ops[1].agents = alloc::vec![String::from("robot1")];
        let g = lift_of(&t, &[0, 1]);
        assert!(g
            .edges
            .iter()
            .any(|e| matches!(&e.kind, EdgeKind::AgentMutex { agent } if agent == "robot1")));
    }

    #[test]
    fn single_step_plan_has_one_node_no_edges() {
        let t = task(2, &[("(a)", &[], &[0], &[], 1.0)], &[], &[0]);
        let g = lift_of(&t, &[0]);
        assert_eq!(g.n_steps, 1);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn invalid_plan_is_rejected_by_embedded_validation() {
        let t = task(3, &[("(a)", &[1], &[0], &[], 1.0)], &[], &[0]);
        let plan = SequentialPlan {
            ops: alloc::vec![0],
            cost: 1.0,
        };
        let err = partial_order_lift(&t, &plan).unwrap_err();
        assert_eq!(err.kind, ViolationKind::PreconditionUnmet);
    }

    #[test]
    fn chain_schedules_sequentially() {
        let g = PrecedenceGraph {
            n_steps: 3,
            edges: alloc::vec![
                Edge {
                    from: 0,
                    to: 1,
                    kind: EdgeKind::Threat
                },
                Edge {
                    from: 1,
                    to: 2,
                    kind: EdgeKind::Threat
                },
            ],
        };
        let s = schedule(&g, &[10.0, 10.0, 10.0]);
        assert_eq!(s.starts, alloc::vec![0.0, 10.0, 20.0]);
        assert_eq!(s.makespan, 30.0);
    }

    #[test]
    fn independent_steps_run_in_parallel() {
        let g = PrecedenceGraph {
            n_steps: 2,
            edges: alloc::vec![],
        };
        let s = schedule(&g, &[10.0, 4.0]);
        assert_eq!(s.starts, alloc::vec![0.0, 0.0]);
        assert_eq!(s.makespan, 10.0);
    }

    #[test]
    fn empty_plan_schedules_to_zero_makespan() {
        let g = PrecedenceGraph {
            n_steps: 0,
            edges: alloc::vec![],
        };
        let s = schedule(&g, &[]);
        assert_eq!(s.makespan, 0.0);
    }

    #[test]
    fn makespan_is_bounded_by_duration_sum_and_longest_step() {
        for seed in 0..30u64 {
            let t = random_task(seed, 9, 10);
            if let SearchResult::Plan(p) = plan_search(&t, None).unwrap() {
                if p.ops.is_empty() {
                    continue;
                }
                let timed = timed_plan_from(&t, &p).unwrap();
                let total: f64 = p.ops.iter().map(|&i| t.ops[i].duration_s).sum();
                let longest = p
                    .ops
                    .iter()
                    .map(|&i| t.ops[i].duration_s)
                    .fold(0.0, f64::max);
                assert!(timed.makespan <= total + 1e-9);
                assert!(timed.makespan >= longest - 1e-9);
            }
        }
    }

    // Any topological order of the lift executes sequentially with the
    // same cost; seeded random orders stand in for "any".
    #[test]
    fn random_topological_orders_stay_valid() {
        for seed in 0..30u64 {
            let t = random_task(seed + 500, 9, 10);
            let SearchResult::Plan(p) = plan_search(&t, None).unwrap() else {
                continue;
            };
            if p.ops.len() < 2 {
                continue;
            }
            let g = partial_order_lift(&t, &p).unwrap();
            let mut rng = SplitMix64::new(seed);
            for _ in 0..5 {
                let order = random_topo(&g, &mut rng);
                let reordered = SequentialPlan {
                    ops: order.iter().map(|&i| p.ops[i]).collect(),
                    cost: p.cost,
                };
                // Re-lift validates the reordering end to end.
                assert!(
                    partial_order_lift(&t, &reordered).is_ok(),
                    "seed {seed}: topo order broke the plan"
                );
                let cost: f64 = reordered.ops.iter().map(|&i| t.ops[i].cost).sum();
                assert_eq!(cost, p.cost);
            }
        }
    }

    fn random_topo(g: &PrecedenceGraph, rng: &mut SplitMix64) -> Vec<usize> {
        let mut indeg = alloc::vec![0usize; g.n_steps];
        for e in &g.edges {
            indeg[e.to] += 1;
        }
        let mut ready: Vec<usize> = (0..g.n_steps).filter(|&i| indeg[i] == 0).collect();
        let mut out = Vec::new();
        let mut remaining: Vec<Edge> = g.edges.clone();
        while !ready.is_empty() {
            let pick = rng.next_below(ready.len() as u64) as usize;
            let node = ready.remove(pick);
            out.push(node);
            let mut rest = Vec::new();
            for e in remaining {
                if e.from == node {
                    indeg[e.to] -= 1;
                    if indeg[e.to] == 0 {
                        ready.push(e.to);
                    }
                } else {
                    rest.push(e);
                }
            }
            remaining = rest;
        }
        out
    }
}
