//! Best-first cost-optimal search (f = g + h_max) and the exhaustive
//! uniform-cost oracle it is checked against.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use super::{applicable, apply, heuristic, satisfies_goal, State};
use crate::pddl::GroundedTask;

/// Default node-expansion budget of [`plan_search`].
pub const DEFAULT_BUDGET: usize = 5_000_000;

/// A cost-optimal sequential plan: op indices into the task in execution
/// order, plus the exact total cost.
#[derive(Clone, Debug, PartialEq)]
pub struct SequentialPlan {
    pub ops: Vec<usize>,
    pub cost: f64,
}

/// Search outcome: an optimal plan or a proof that no plan exists.
#[derive(Clone, Debug, PartialEq)]
pub enum SearchResult {
    Plan(SequentialPlan),
    NoPlan,
}

/// Search failure: only the expansion budget can stop the search early.
#[derive(Clone, Debug, PartialEq)]
pub struct BudgetExhausted {
    pub expanded: usize,
    /// Lower bound on the optimal cost at the moment the budget ran out.
    pub best_bound: f64,
}

impl fmt::Display for BudgetExhausted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "budget exhausted after {} expansions; optimal cost is at least {}",
            self.expanded, self.best_bound
        )
    }
}

impl core::error::Error for BudgetExhausted {}

struct OpenEntry {
    f: f64,
    h: f64,
    /// Rank of the producing action in name-sorted order; roots use 0.
    name_rank: u32,
    seq: u64,
    node: usize,
    g: f64,
}

impl PartialEq for OpenEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for OpenEntry {}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OpenEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; reverse so the smallest pops first.
        // Tie-breaking: smaller f, then smaller h, then lexicographically
        // smallest producing action name, then insertion order.
        self.f
            .total_cmp(&other.f)
            .then(self.h.total_cmp(&other.h))
            .then(self.name_rank.cmp(&other.name_rank))
            .then(self.seq.cmp(&other.seq))
            .reverse()
    }
}

struct NodeRec {
    state: State,
    g: f64,
    parent: usize,
    op: usize,
}

/// A* with the admissible h_max heuristic. Returns a minimum-cost plan,
/// `NoPlan` when the goal is unreachable, or an error when `budget`
/// node expansions are exceeded.
pub fn plan_search(
    task: &GroundedTask,
    budget: Option<usize>,
) -> Result<SearchResult, BudgetExhausted> {
    let budget = budget.unwrap_or(DEFAULT_BUDGET);

    // Name ranks for deterministic tie-breaking.
    let mut by_name: Vec<usize> = (0..task.ops.len()).collect();
    by_name.sort_by(|&a, &b| task.ops[a].name.cmp(&task.ops[b].name));
    let mut name_rank = alloc::vec![0u32; task.ops.len()];
    for (rank, &op) in by_name.iter().enumerate() {
        name_rank[op] = rank as u32 + 1;
    }

    let init = State::initial(task);
    let h0 = heuristic(&init, task);
    if h0.is_infinite() {
        return Ok(SearchResult::NoPlan);
    }

    let mut nodes: Vec<NodeRec> = Vec::new();
    nodes.push(NodeRec {
        state: init.clone(),
        g: 0.0,
        parent: usize::MAX,
        op: usize::MAX,
    });

    let mut best_g: BTreeMap<State, f64> = BTreeMap::new();
    best_g.insert(init, 0.0);

    let mut open: BinaryHeap<OpenEntry> = BinaryHeap::new();
    let mut seq: u64 = 0;
    open.push(OpenEntry {
        f: h0.value(),
        h: h0.value(),
        name_rank: 0,
        seq,
        node: 0,
        g: 0.0,
    });

    let mut expanded = 0usize;
    let mut best_bound = 0.0f64;

    while let Some(entry) = open.pop() {
        let node = entry.node;
        if entry.g > best_g[&nodes[node].state] {
            continue; // stale entry
        }
        best_bound = best_bound.max(entry.f);

        if satisfies_goal(&nodes[node].state, task) {
            return Ok(SearchResult::Plan(extract_plan(&nodes, node)));
        }

        expanded += 1;
        if expanded > budget {
            return Err(BudgetExhausted {
                expanded: expanded - 1,
                best_bound,
            });
        }

        for (op_idx, op) in task.ops.iter().enumerate() {
            if !applicable(&nodes[node].state, op) {
                continue;
            }
            let next = apply(&nodes[node].state, op);
            let g = nodes[node].g + op.cost;
            match best_g.get(&next) {
                Some(&known) if known <= g => continue,
                _ => {}
            }
            let h = heuristic(&next, task);
            if h.is_infinite() {
                continue; // dead end under the relaxation
            }
            best_g.insert(next.clone(), g);
            nodes.push(NodeRec {
                state: next,
                g,
                parent: node,
                op: op_idx,
            });
            seq += 1;
            open.push(OpenEntry {
                f: g + h.value(),
                h: h.value(),
                name_rank: name_rank[op_idx],
                seq,
                node: nodes.len() - 1,
                g,
            });
        }
    }

    Ok(SearchResult::NoPlan)
}

fn extract_plan(nodes: &[NodeRec], mut node: usize) -> SequentialPlan {
    let cost = nodes[node].g;
    let mut ops = Vec::new();
    while nodes[node].parent != usize::MAX {
        ops.push(nodes[node].op);
        node = nodes[node].parent;
    }
    ops.reverse();
    SequentialPlan { ops, cost }
}

/// Result of the exhaustive oracle.
#[derive(Clone, Debug, PartialEq)]
pub enum BruteForceResult {
    /// Exact optimal plan cost.
    Optimal(f64),
    /// The whole reachable space was enumerated; no state satisfies the
    /// goal.
    Unreachable,
    /// The node budget ran out before the space was exhausted.
    BudgetExhausted,
}

/// Exhaustive uniform-cost enumeration with duplicate state elimination.
/// Intentionally heuristic-free so it stays independent of the search
/// path it is used to check.
pub fn brute_force_optimal(task: &GroundedTask, node_budget: usize) -> BruteForceResult {
    struct Entry {
        g: f64,
        seq: u64,
        state: State,
    }
    impl PartialEq for Entry {
        fn eq(&self, other: &Self) -> bool {
            self.cmp(other) == Ordering::Equal
        }
    }
    impl Eq for Entry {}
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> Ordering {
            self.g
                .total_cmp(&other.g)
                .then(self.seq.cmp(&other.seq))
                .reverse()
        }
    }

    let init = State::initial(task);
    let mut open: BinaryHeap<Entry> = BinaryHeap::new();
    let mut best: BTreeMap<State, f64> = BTreeMap::new();
    best.insert(init.clone(), 0.0);
    let mut seq = 0u64;
    open.push(Entry {
        g: 0.0,
        seq,
        state: init,
    });
    let mut popped = 0usize;

    while let Some(Entry { g, state, .. }) = open.pop() {
        if g > best[&state] {
            continue;
        }
        if satisfies_goal(&state, task) {
            return BruteForceResult::Optimal(g);
        }
        popped += 1;
        if popped > node_budget {
            return BruteForceResult::BudgetExhausted;
        }
        for op in &task.ops {
            if !applicable(&state, op) {
                continue;
            }
            let next = apply(&state, op);
            let ng = g + op.cost;
            match best.get(&next) {
                Some(&known) if known <= ng => continue,
                _ => {}
            }
            best.insert(next.clone(), ng);
            seq += 1;
            open.push(Entry {
                g: ng,
                seq,
                state: next,
            });
        }
    }
    BruteForceResult::Unreachable
}
