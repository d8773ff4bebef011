//! Admissible h_max heuristic over the cost-annotated delete relaxation:
//! the cost of a proposition is the cheapest way to reach it ignoring
//! deletes, the cost of a set is its most expensive member, and actions
//! pay their own cost on top of their most expensive precondition.
//! Negative preconditions are assumed satisfiable, which only lowers the
//! estimate and preserves admissibility.

use alloc::vec::Vec;

use super::State;
use crate::cost::ExtCost;
use crate::pddl::GroundedTask;

pub fn heuristic(s: &State, task: &GroundedTask) -> ExtCost {
    let n = task.propositions.len();
    let mut cost: Vec<f64> = alloc::vec![f64::INFINITY; n];
    for p in s.iter_true() {
        cost[p as usize] = 0.0;
    }

    loop {
        let mut changed = false;
        for op in &task.ops {
            let mut pre_max = 0.0f64;
            for &p in &op.pre {
                pre_max = pre_max.max(cost[p as usize]);
                if pre_max.is_infinite() {
                    break;
                }
            }
            if pre_max.is_infinite() {
                continue;
            }
            let reach = pre_max + op.cost;
            for &a in &op.add {
                if reach < cost[a as usize] {
                    cost[a as usize] = reach;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut h = 0.0f64;
    for &g in &task.goal {
        h = h.max(cost[g as usize]);
    }
    if h.is_infinite() {
        ExtCost::INFINITY
    } else {
        ExtCost::new(h)
    }
}
