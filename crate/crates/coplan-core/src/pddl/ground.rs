//! Grounding: instantiate action schemas over typed objects, attach
//! costs and durations from a [`CostSource`], drop infinite-cost
//! instantiations, compile static predicates away, and prune
//! relaxed-unreachable operators and propositions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::*;
use super::PddlError;
use crate::cost::ExtCost;

/// Cost and duration of one grounded instantiation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostDur {
    pub cost: ExtCost,
    pub duration_s: f64,
}

/// Supplies a cost (finite or infinite) and a duration for every
/// type-consistent instantiation. Returning `None` means the source has
/// no entry for the instantiation, which grounding reports as an error.
pub trait CostSource {
    fn cost(&self, schema: &str, args: &[&str]) -> Option<CostDur>;
}

/// Source reading `(increase (total-cost) ...)` effects and the
/// problem's numeric init facts, the way an external planner would.
/// Numeric facts are closed-world: an instantiation whose cost fluent
/// has no init fact is infeasible (emitters omit infinite entries).
pub struct FluentCostSource<'a> {
    domain: &'a DomainAst,
    problem: &'a ProblemAst,
}

impl<'a> FluentCostSource<'a> {
    pub fn new(domain: &'a DomainAst, problem: &'a ProblemAst) -> Self {
        FluentCostSource { domain, problem }
    }
}

impl CostSource for FluentCostSource<'_> {
    fn cost(&self, schema: &str, args: &[&str]) -> Option<CostDur> {
        let action = self.domain.actions.iter().find(|a| a.name == schema)?;
        let mut total = 0.0f64;
        for (_, expr) in &action.increases {
            match expr {
                NumExpr::Const(v) => total += v,
                NumExpr::Fluent(fref) => {
                    let ground_terms: Vec<String> = fref
                        .terms
                        .iter()
                        .map(|t| match t {
                            Term::Const(c) => c.clone(),
                            Term::Var(v) => {
                                let pos = action.params.iter().position(|p| &p.name == v);
                                match pos {
                                    Some(i) => args[i].to_string(),
                                    None => String::new(),
                                }
                            }
                        })
                        .collect();
                    let fact = self.problem.numeric_init.iter().find(|(f, _)| {
                        f.name == fref.name
                            && f.terms.len() == ground_terms.len()
                            && f.terms.iter().zip(&ground_terms).all(|(t, g)| match t {
                                Term::Const(c) => c == g,
                                Term::Var(_) => false,
                            })
                    });
                    match fact {
                        Some((_, v)) => total += v,
                        None => {
                            return Some(CostDur {
                                cost: ExtCost::INFINITY,
                                duration_s: action.duration.unwrap_or(1.0),
                            })
                        }
                    }
                }
            }
        }
        Some(CostDur {
            cost: ExtCost::new(total.max(0.0)),
            duration_s: action.duration.unwrap_or(1.0),
        })
    }
}

/// Cost source with one flat cost/duration for everything; test helper.
pub struct UniformCost(pub f64, pub f64);

impl CostSource for UniformCost {
    fn cost(&self, _schema: &str, _args: &[&str]) -> Option<CostDur> {
        Some(CostDur {
            cost: ExtCost::new(self.0),
            duration_s: self.1,
        })
    }
}

/// A grounded operator over proposition indices. Index sets are sorted
/// and duplicate-free; costs are finite.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundedOp {
    /// Display name, e.g. `(pick robot1 base_1 storage_1)`.
    pub name: String,
    pub schema: String,
    pub args: Vec<String>,
    pub pre: Vec<u32>,
    pub neg_pre: Vec<u32>,
    pub add: Vec<u32>,
    pub del: Vec<u32>,
    pub cost: f64,
    pub duration_s: f64,
    /// Arguments whose declared type derives from `agent`, for mutex
    /// scheduling. Empty when the domain has no agent type.
    pub agents: Vec<String>,
}

/// A propositional planning task.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundedTask {
    /// Proposition display names; position is the proposition index.
    pub propositions: Vec<String>,
    pub ops: Vec<GroundedOp>,
    pub init: Vec<u32>,
    pub goal: Vec<u32>,
}

impl GroundedTask {
    pub fn op_by_name(&self, name: &str) -> Option<(usize, &GroundedOp)> {
        self.ops.iter().enumerate().find(|(_, o)| o.name == name)
    }
}

fn atom_key(pred: &str, args: &[String]) -> String {
    let mut s = String::from("(");
    s.push_str(pred);
    for a in args {
        s.push(' ');
        s.push_str(a);
    }
    s.push(')');
    s
}

fn substitute(
    atom: &Atom,
    binding: &BTreeMap<&str, &str>,
) -> Result<(String, Vec<String>), PddlError> {
    let mut args = Vec::with_capacity(atom.terms.len());
    for t in &atom.terms {
        match t {
            Term::Const(c) => args.push(c.clone()),
            Term::Var(v) => match binding.get(v.as_str()) {
                Some(val) => args.push((*val).to_string()),
                None => return Err(PddlError::msg(format!("unbound variable `?{v}` in {atom}"))),
            },
        }
    }
    Ok((atom.pred.clone(), args))
}

/// All type-consistent instantiations of a schema, with no filtering.
/// Shared by the grounder and by brute-force completeness oracles.
pub fn enumerate_substitutions<'a>(
    objects_by_type: &BTreeMap<&'a str, Vec<&'a str>>,
    schema: &ActionSchema,
) -> Vec<Vec<&'a str>> {
    let mut out: Vec<Vec<&str>> = Vec::new();
    let empty: Vec<&str> = Vec::new();
    let pools: Vec<&Vec<&str>> = schema
        .params
        .iter()
        .map(|p| objects_by_type.get(p.ty.as_str()).unwrap_or(&empty))
        .collect();
    if pools.iter().any(|p| p.is_empty()) && !schema.params.is_empty() {
        return out;
    }
    let mut idx = alloc::vec![0usize; schema.params.len()];
    loop {
        out.push(idx.iter().enumerate().map(|(i, &j)| pools[i][j]).collect());
        // Odometer increment, last parameter fastest.
        let mut k = schema.params.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < pools[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Objects grouped by every type they belong to (including ancestors).
pub fn objects_by_type<'a>(
    domain: &'a DomainAst,
    problem: &'a ProblemAst,
) -> BTreeMap<&'a str, Vec<&'a str>> {
    let mut map: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let known = domain.known_types();
    for obj in &problem.objects {
        for ty in &known {
            if domain.is_subtype(&obj.ty, ty) {
                map.entry(ty).or_default().push(&obj.name);
            }
        }
    }
    map
}

/// Ground a domain/problem pair with costs from `source`.
pub fn ground(
    domain: &DomainAst,
    problem: &ProblemAst,
    source: &dyn CostSource,
) -> Result<GroundedTask, PddlError> {
    if problem.domain != domain.name {
        return Err(PddlError::msg(format!(
            "problem targets domain `{}` but `{}` was supplied",
            problem.domain, domain.name
        )));
    }
    let known = domain.known_types();
    for obj in &problem.objects {
        if !known.contains(&obj.ty.as_str()) {
            return Err(PddlError::msg(format!(
                "object `{}` has undeclared type `{}`",
                obj.name, obj.ty
            )));
        }
    }

    // Predicates never added or deleted are static and compile away.
    let mut dynamic: BTreeSet<&str> = BTreeSet::new();
    for a in &domain.actions {
        for atom in a.adds.iter().chain(&a.dels) {
            dynamic.insert(&atom.pred);
        }
    }

    let init_facts: BTreeSet<String> = problem
        .init
        .iter()
        .map(|a| {
            let args: Vec<String> = a
                .terms
                .iter()
                .map(|t| match t {
                    Term::Const(c) => c.clone(),
                    Term::Var(_) => String::new(),
                })
                .collect();
            atom_key(&a.pred, &args)
        })
        .collect();

    let objs = objects_by_type(domain, problem);

    // Phase 1: enumerate, evaluate statics, attach costs.
    struct RawOp {
        name: String,
        schema: String,
        args: Vec<String>,
        pre: BTreeSet<String>,
        neg_pre: BTreeSet<String>,
        add: BTreeSet<String>,
        del: BTreeSet<String>,
        cost: f64,
        duration_s: f64,
        agents: Vec<String>,
    }

    let mut raw_ops: Vec<RawOp> = Vec::new();
    for schema in &domain.actions {
        for combo in enumerate_substitutions(&objs, schema) {
            let binding: BTreeMap<&str, &str> = schema
                .params
                .iter()
                .map(|p| p.name.as_str())
                .zip(combo.iter().copied())
                .collect();

            let mut pre = BTreeSet::new();
            let mut neg_pre = BTreeSet::new();
            let mut statically_false = false;
            for lit in &schema.precondition {
                let (pred, args) = substitute(&lit.atom, &binding)?;
                let key = atom_key(&pred, &args);
                if dynamic.contains(pred.as_str()) {
                    if lit.positive {
                        pre.insert(key);
                    } else {
                        neg_pre.insert(key);
                    }
                } else {
                    // Static literal: evaluate against init, drop or kill.
                    let holds = init_facts.contains(&key);
                    if holds != lit.positive {
                        statically_false = true;
                        break;
                    }
                }
            }
            if statically_false {
                continue;
            }

            let args_owned: Vec<String> = combo.iter().map(|s| s.to_string()).collect();
            let args_ref: Vec<&str> = combo.clone();
            let cd = source.cost(&schema.name, &args_ref).ok_or_else(|| {
                PddlError::msg(format!(
                    "cost table has no entry for {}",
                    atom_key(&schema.name, &args_owned)
                ))
            })?;
            if cd.cost.is_infinite() {
                continue;
            }
            if cd.duration_s.is_nan() || cd.duration_s <= 0.0 {
                return Err(PddlError::msg(format!(
                    "non-positive duration for {}",
                    atom_key(&schema.name, &args_owned)
                )));
            }

            let mut add = BTreeSet::new();
            for a in &schema.adds {
                let (pred, args) = substitute(a, &binding)?;
                add.insert(atom_key(&pred, &args));
            }
            let mut del = BTreeSet::new();
            for d in &schema.dels {
                let (pred, args) = substitute(d, &binding)?;
                del.insert(atom_key(&pred, &args));
            }

            let agents: Vec<String> = schema
                .params
                .iter()
                .zip(&combo)
                .filter(|(p, _)| domain.is_subtype(&p.ty, "agent"))
                .map(|(_, v)| v.to_string())
                .collect();

            raw_ops.push(RawOp {
                name: atom_key(&schema.name, &args_owned),
                schema: schema.name.clone(),
                args: args_owned,
                pre,
                neg_pre,
                add,
                del,
                cost: cd.cost.value(),
                duration_s: cd.duration_s,
                agents,
            });
        }
    }

    // Dynamic init facts and goal atoms; static goal atoms also become
    // propositions so an unsatisfiable static goal simply has no achiever.
    let dynamic_init: BTreeSet<String> = init_facts
        .iter()
        .filter(|k| {
            let pred = k[1..k.len() - 1].split_whitespace().next().unwrap_or("");
            dynamic.contains(pred)
        })
        .cloned()
        .collect();
    let mut goal_keys: Vec<String> = Vec::new();
    for g in &problem.goal {
        let args: Vec<String> = g
            .terms
            .iter()
            .map(|t| match t {
                Term::Const(c) => c.clone(),
                Term::Var(_) => String::new(),
            })
            .collect();
        goal_keys.push(atom_key(&g.pred, &args));
    }

    // Phase 2: relaxed reachability from the init facts (negative
    // preconditions assumed satisfiable, deletes ignored).
    let mut reachable: BTreeSet<String> = dynamic_init.clone();
    for k in &init_facts {
        reachable.insert(k.clone());
    }
    let mut kept = alloc::vec![false; raw_ops.len()];
    loop {
        let mut changed = false;
        for (i, op) in raw_ops.iter().enumerate() {
            if kept[i] {
                continue;
            }
            if op.pre.iter().all(|p| reachable.contains(p)) {
                kept[i] = true;
                changed = true;
                for a in &op.add {
                    reachable.insert(a.clone());
                }
            }
        }
        if !changed {
            break;
        }
    }

    // Proposition universe: everything mentioned by kept ops, dynamic
    // init facts, and goal atoms; sorted for stable indices.
    let mut universe: BTreeSet<String> = dynamic_init.clone();
    for k in &goal_keys {
        universe.insert(k.clone());
    }
    for (i, op) in raw_ops.iter().enumerate() {
        if !kept[i] {
            continue;
        }
        for k in op
            .pre
            .iter()
            .chain(&op.neg_pre)
            .chain(&op.add)
            .chain(&op.del)
        {
            universe.insert(k.clone());
        }
    }
    let propositions: Vec<String> = universe.into_iter().collect();
    let index_of: BTreeMap<&str, u32> = propositions
        .iter()
        .enumerate()
        .map(|(i, p)| (p.as_str(), i as u32))
        .collect();
    let to_ids =
        |set: &BTreeSet<String>| -> Vec<u32> { set.iter().map(|k| index_of[k.as_str()]).collect() };

    let mut ops: Vec<GroundedOp> = Vec::new();
    for (i, op) in raw_ops.iter().enumerate() {
        if !kept[i] {
            continue;
        }
        ops.push(GroundedOp {
            name: op.name.clone(),
            schema: op.schema.clone(),
            args: op.args.clone(),
            pre: to_ids(&op.pre),
            neg_pre: to_ids(&op.neg_pre),
            add: to_ids(&op.add),
            del: to_ids(&op.del),
            cost: op.cost,
            duration_s: op.duration_s,
            agents: op.agents.clone(),
        });
    }

    let init: Vec<u32> = dynamic_init
        .iter()
        .chain(init_facts.iter().filter(|k| goal_keys.contains(k)))
        .filter_map(|k| index_of.get(k.as_str()).copied())
        .collect::<BTreeSet<u32>>()
        .into_iter()
        .collect();
    let goal: Vec<u32> = goal_keys
        .iter()
        .map(|k| index_of[k.as_str()])
        .collect::<BTreeSet<u32>>()
        .into_iter()
        .collect();

    Ok(GroundedTask {
        propositions,
        ops,
        init,
        goal,
    })
}
