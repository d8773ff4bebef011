//! Cost-optimal forward state-space search over a grounded task, a
//! partial-order lift scheduling independent steps in parallel, a plan
//! validator, and a brute-force oracle for tests.

mod heuristic;
mod lift;
mod search;
mod validate;

pub use heuristic::heuristic;
pub use lift::{
    partial_order_lift, schedule, timed_plan_from, Edge, EdgeKind, PrecedenceGraph, Schedule,
};
pub use search::{
    brute_force_optimal, plan_search, BruteForceResult, SearchResult, SequentialPlan,
};
pub use validate::{validate_plan, Violation, ViolationKind};

use alloc::vec::Vec;

use crate::pddl::{GroundedOp, GroundedTask};

/// A planning state: the set of true propositions, bitset semantics over
/// the task's proposition index space.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State {
    bits: Vec<u64>,
}

impl State {
    pub fn empty(n_props: usize) -> Self {
        State {
            bits: alloc::vec![0u64; n_props.div_ceil(64)],
        }
    }

    pub fn from_indices(indices: &[u32], n_props: usize) -> Self {
        let mut s = State::empty(n_props);
        for &i in indices {
            s.insert(i);
        }
        s
    }

    pub fn initial(task: &GroundedTask) -> Self {
        State::from_indices(&task.init, task.propositions.len())
    }

    pub fn contains(&self, i: u32) -> bool {
        let (w, b) = (i as usize / 64, i as usize % 64);
        self.bits.get(w).map(|x| x >> b & 1 == 1).unwrap_or(false)
    }

    pub fn insert(&mut self, i: u32) {
        let (w, b) = (i as usize / 64, i as usize % 64);
        self.bits[w] |= 1 << b;
    }

    pub fn remove(&mut self, i: u32) {
        let (w, b) = (i as usize / 64, i as usize % 64);
        self.bits[w] &= !(1 << b);
    }

    pub fn contains_all(&self, indices: &[u32]) -> bool {
        indices.iter().all(|&i| self.contains(i))
    }

    pub fn disjoint_from(&self, indices: &[u32]) -> bool {
        indices.iter().all(|&i| !self.contains(i))
    }

    pub fn iter_true(&self) -> impl Iterator<Item = u32> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            (0..64u32)
                .filter(move |b| word >> b & 1 == 1)
                .map(move |b| w as u32 * 64 + b)
        })
    }
}

/// True iff the op's positive preconditions hold and its negative
/// preconditions are absent.
pub fn applicable(s: &State, op: &GroundedOp) -> bool {
    s.contains_all(&op.pre) && s.disjoint_from(&op.neg_pre)
}

/// Successor state `(s \ deletes) + adds`. Panics when the op is not
/// applicable; that is a programming contract violation, not a domain
/// outcome.
pub fn apply(s: &State, op: &GroundedOp) -> State {
    assert!(applicable(s, op), "apply() on inapplicable op {}", op.name);
    let mut next = s.clone();
    for &d in &op.del {
        next.remove(d);
    }
    for &a in &op.add {
        next.insert(a);
    }
    next
}

/// Goal test for a task.
pub fn satisfies_goal(s: &State, task: &GroundedTask) -> bool {
    s.contains_all(&task.goal)
}

/// Seeded random desk-scale task generator: up to `max_props`
/// propositions and `max_ops` ops, with quarter-step costs so search and
/// oracle sums compare exactly. Deterministic per seed; meant for stress
/// suites and benchmarking.
pub fn random_task(seed: u64, max_props: usize, max_ops: usize) -> GroundedTask {
    use crate::rng::SplitMix64;
    use alloc::format;

    let mut rng = SplitMix64::new(seed);
    let n_props = 3 + (rng.next_below((max_props - 3) as u64 + 1) as usize);
    let n_ops = 1 + (rng.next_below(max_ops as u64) as usize);
    let pick_set = |rng: &mut SplitMix64, max_len: u64| -> Vec<u32> {
        let len = rng.next_below(max_len + 1);
        let mut v: Vec<u32> = (0..len)
            .map(|_| rng.next_below(n_props as u64) as u32)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let ops = (0..n_ops)
        .map(|i| {
            let pre = pick_set(&mut rng, 3);
            let mut add = pick_set(&mut rng, 3);
            let del: Vec<u32> = pick_set(&mut rng, 2)
                .into_iter()
                .filter(|d| !add.contains(d))
                .collect();
            if add.is_empty() && del.is_empty() {
                add.push(rng.next_below(n_props as u64) as u32);
            }
            let cost = 0.5 + rng.next_below(31) as f64 * 0.25;
            GroundedOp {
                name: format!("(op{i})"),
                schema: format!("op{i}"),
                args: Vec::new(),
                pre,
                neg_pre: Vec::new(),
                add,
                del,
                cost,
                duration_s: 1.0 + rng.next_below(5) as f64,
                agents: Vec::new(),
            }
        })
        .collect();
    let init = pick_set(&mut rng, (n_props / 2) as u64);
    let mut goal = pick_set(&mut rng, 2);
    if goal.is_empty() {
        goal.push(rng.next_below(n_props as u64) as u32);
    }
    GroundedTask {
        propositions: (0..n_props).map(|i| format!("(p{i})")).collect(),
        ops,
        init,
        goal,
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use alloc::format;
    use alloc::string::String;
    use alloc::vec::Vec;

    pub use super::random_task;

    /// (name, preconditions, adds, deletes, cost) of one hand-built op.
    pub type OpSpec<'a> = (&'a str, &'a [u32], &'a [u32], &'a [u32], f64);

    /// Hand-build a grounded task from index sets.
    pub fn task(n_props: usize, ops: &[OpSpec<'_>], init: &[u32], goal: &[u32]) -> GroundedTask {
        GroundedTask {
            propositions: (0..n_props).map(|i| format!("(p{i})")).collect(),
            ops: ops
                .iter()
                .map(|(name, pre, add, del, cost)| GroundedOp {
                    name: String::from(*name),
                    schema: String::from(*name),
                    args: Vec::new(),
                    pre: pre.to_vec(),
                    neg_pre: Vec::new(),
                    add: add.to_vec(),
                    del: del.to_vec(),
                    cost: *cost,
                    duration_s: 1.0,
                    agents: Vec::new(),
                })
                .collect(),
            init: init.to_vec(),
            goal: goal.to_vec(),
        }
    }
}
