//! Lexer, parser, emitter and grounder for the cost-metric PDDL subset,
//! plus the timed plan text format.
//!
//! Subset grammar, s-expressions with `;` comments and case-insensitive
//! keywords:
//!
//! ```text
//! domain  := (define (domain NAME)
//!              (:requirements FLAG*)? (:types TYPED*)?
//!              (:predicates PRED*)? (:functions FN*)? ACTION*)
//! ACTION  := (:action NAME :parameters (TYPED-VARS)
//!              :precondition CONJ :effect EFF [:duration NUMBER])
//! EFF     := ATOM | (not ATOM) | (increase (FLUENT) EXPR) | (and EFF*)
//! problem := (define (problem NAME) (:domain NAME) (:objects TYPED*)
//!              (:init ATOM* (= (FLUENT) NUMBER)*) (:goal CONJ)
//!              (:metric minimize (total-cost))?)
//! ```
//!
//! Plan files carry one step per line: `start: (name args...) [duration]`,
//! seconds with three decimals on output.

mod ast;
mod ground;
mod lexer;
mod parser;
mod plan;

pub use ast::{
    emit_domain, emit_problem, ActionSchema, Atom, DomainAst, FluentRef, FunctionDecl, Literal,
    NumExpr, PredicateDecl, ProblemAst, Term, TypedName,
};
pub use ground::{
    enumerate_substitutions, ground, objects_by_type, CostDur, CostSource, FluentCostSource,
    GroundedOp, GroundedTask, UniformCost,
};
pub use parser::{parse_domain, parse_problem};
pub use plan::{emit_plan, parse_plan, TimedPlan, TimedStep};

use alloc::string::String;
use core::fmt;

/// Parse or grounding failure with a source position where one exists.
#[derive(Clone, Debug, PartialEq)]
pub struct PddlError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

impl PddlError {
    pub fn at(line: u32, col: u32, msg: impl Into<String>) -> Self {
        PddlError {
            line,
            col,
            msg: msg.into(),
        }
    }

    pub fn msg(msg: impl Into<String>) -> Self {
        PddlError {
            line: 0,
            col: 0,
            msg: msg.into(),
        }
    }
}

impl fmt::Display for PddlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "{}:{}: {}", self.line, self.col, self.msg)
        } else {
            write!(f, "{}", self.msg)
        }
    }
}

impl core::error::Error for PddlError {}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::borrow::ToOwned;
    use alloc::vec;
    use alloc::vec::Vec;

    const TINY_DOMAIN: &str = r#"
; a domain with one parameterless action
(define (domain tiny)
  (:predicates (done))
  (:action finish
    :parameters ()
    :precondition (and)
    :effect (done))
)
"#;

    #[test]
    fn minimal_domain_parses() {
        let d = parse_domain(TINY_DOMAIN).unwrap();
        assert_eq!(d.name, "tiny");
        assert_eq!(d.actions.len(), 1);
        assert!(d.actions[0].precondition.is_empty());
        assert_eq!(d.actions[0].adds, vec![Atom::ground("done", &[])]);
    }

    #[test]
    fn typed_parameters_parse() {
        let text = r#"
(define (domain cell)
  (:requirements :typing)
  (:types agent part location - object)
  (:predicates (at ?p - part ?l - location) (ee-at ?a - agent ?l - location))
  (:action pick
    :parameters (?a - agent ?p - part ?l - location)
    :precondition (and (at ?p ?l) (ee-at ?a ?l))
    :effect (and (not (at ?p ?l)))
  )
)
"#;
        let d = parse_domain(text).unwrap();
        let pick = &d.actions[0];
        assert_eq!(pick.params.len(), 3);
        assert_eq!(pick.params[0], TypedName::new("a", "agent"));
        assert_eq!(pick.precondition.len(), 2);
        assert_eq!(pick.dels.len(), 1);
    }

    #[test]
    fn truncated_input_reports_end_position() {
        let err = parse_domain("(define (domain d) (:action").unwrap_err();
        assert!(err.msg.contains("unexpected end of input"), "{err}");
        assert!(err.line >= 1);
    }

    #[test]
    fn unknown_requirement_flag_errors() {
        let err = parse_domain("(define (domain d) (:requirements :time))").unwrap_err();
        assert!(err.msg.contains(":time"), "{err}");
    }

    #[test]
    fn undeclared_type_errors() {
        let err = parse_domain("(define (domain d) (:predicates (p ?x - ghost)) )").unwrap_err();
        assert!(err.msg.contains("ghost"), "{err}");
    }

    #[test]
    fn unbalanced_parens_error() {
        assert!(parse_domain("(define (domain d)").is_err());
        assert!(parse_domain("(define (domain d)))").is_err());
    }

    #[test]
    fn keywords_are_case_insensitive() {
        let d = parse_domain("(DEFINE (DOMAIN Mixed) (:PREDICATES (P)))").unwrap();
        assert_eq!(d.name, "mixed");
        assert_eq!(d.predicates[0].name, "p");
    }

    #[test]
    fn problem_parses_with_numeric_init() {
        let text = r#"
(define (problem p1)
  (:domain tiny)
  (:objects a b)
  (:init (on a b) (= (total-cost) 0))
  (:goal (and (on a b)))
  (:metric minimize (total-cost))
)
"#;
        let p = parse_problem(text).unwrap();
        assert_eq!(p.objects.len(), 2);
        assert_eq!(p.numeric_init.len(), 1);
        assert_eq!(p.numeric_init[0].1, 0.0);
        assert!(p.metric_minimize_total_cost);
    }

    #[test]
    fn empty_goal_is_rejected() {
        let text = "(define (problem p) (:domain d) (:objects a) (:init) (:goal (and)))";
        let err = parse_problem(text).unwrap_err();
        assert!(err.msg.contains("empty goal"), "{err}");
    }

    #[test]
    fn goal_with_undeclared_object_is_rejected() {
        let text = "(define (problem p) (:domain d) (:objects a) (:init) (:goal (on a b)))";
        let err = parse_problem(text).unwrap_err();
        assert!(err.msg.contains('b'), "{err}");
    }

    fn sample_domain() -> DomainAst {
        parse_domain(
            r#"
(define (domain cell)
  (:requirements :typing :negative-preconditions :action-costs)
  (:types agent part - object)
  (:predicates (holds ?a - agent ?p - part) (free ?a - agent))
  (:functions (total-cost) (grab-cost ?a - agent ?p - part))
  (:action grab
    :parameters (?a - agent ?p - part)
    :precondition (and (free ?a) (not (holds ?a ?p)))
    :effect (and (holds ?a ?p) (not (free ?a)) (increase (total-cost) (grab-cost ?a ?p)))
    :duration 2.5
  )
)
"#,
        )
        .unwrap()
    }

    #[test]
    fn emit_parse_round_trip_domain() {
        let d = sample_domain();
        let text = emit_domain(&d);
        let d2 = parse_domain(&text).unwrap();
        assert_eq!(d, d2);
        // Deterministic emission.
        assert_eq!(emit_domain(&d), emit_domain(&d2));
    }

    #[test]
    fn emit_handles_empty_effect_lists() {
        let mut d = sample_domain();
        d.actions[0].adds.clear();
        d.actions[0].dels.clear();
        d.actions[0].increases.clear();
        let text = emit_domain(&d);
        let d2 = parse_domain(&text).unwrap();
        assert_eq!(d, d2);
    }

    #[test]
    fn emit_parse_round_trip_problem() {
        let p = parse_problem(
            r#"
(define (problem two)
  (:domain cell)
  (:objects r1 r2 - agent nut - part)
  (:init (free r1) (free r2) (= (grab-cost r1 nut) 1.5) (= (grab-cost r2 nut) 4))
  (:goal (and (holds r1 nut)))
  (:metric minimize (total-cost))
)
"#,
        )
        .unwrap();
        let text = emit_problem(&p);
        let p2 = parse_problem(&text).unwrap();
        assert_eq!(p, p2);
    }

    fn sample_problem() -> ProblemAst {
        parse_problem(
            r#"
(define (problem two)
  (:domain cell)
  (:objects r1 r2 - agent nut bolt - part)
  (:init (free r1) (free r2)
         (= (grab-cost r1 nut) 1.5) (= (grab-cost r2 nut) 4)
         (= (grab-cost r1 bolt) 2) (= (grab-cost r2 bolt) 2))
  (:goal (and (holds r1 nut)))
  (:metric minimize (total-cost))
)
"#,
        )
        .unwrap()
    }

    #[test]
    fn grounding_enumerates_and_prices_ops() {
        let d = sample_domain();
        let p = sample_problem();
        let src = FluentCostSource::new(&d, &p);
        let task = ground(&d, &p, &src).unwrap();
        // 2 agents x 2 parts.
        assert_eq!(task.ops.len(), 4);
        let op = task.op_by_name("(grab r1 nut)").unwrap().1;
        assert_eq!(op.cost, 1.5);
        assert_eq!(op.duration_s, 2.5);
        assert_eq!(op.agents, vec!["r1".to_owned()]);
        assert_eq!(task.goal.len(), 1);
    }

    #[test]
    fn grounding_drops_infinite_and_errors_on_missing() {
        let d = sample_domain();
        let p = sample_problem();

        struct Gate;
        impl CostSource for Gate {
            fn cost(&self, _schema: &str, args: &[&str]) -> Option<CostDur> {
                if args[1] == "bolt" {
                    Some(CostDur {
                        cost: crate::cost::ExtCost::INFINITY,
                        duration_s: 1.0,
                    })
                } else {
                    Some(CostDur {
                        cost: crate::cost::ExtCost::new(1.0),
                        duration_s: 1.0,
                    })
                }
            }
        }
        let task = ground(&d, &p, &Gate).unwrap();
        assert_eq!(task.ops.len(), 2);
        assert!(task.op_by_name("(grab r1 bolt)").is_none());

        struct Missing;
        impl CostSource for Missing {
            fn cost(&self, _schema: &str, _args: &[&str]) -> Option<CostDur> {
                None
            }
        }
        let err = ground(&d, &p, &Missing).unwrap_err();
        assert!(err.msg.contains("(grab r1 nut)"), "{err}");
    }

    #[test]
    fn grounding_with_no_objects_of_a_type_yields_no_ops() {
        let d = sample_domain();
        let p = parse_problem(
            r#"
(define (problem empty)
  (:domain cell)
  (:objects r1 - agent)
  (:init (free r1))
  (:goal (and (free r1)))
)
"#,
        )
        .unwrap();
        let task = ground(&d, &p, &UniformCost(1.0, 1.0)).unwrap();
        assert!(task.ops.is_empty());
        // Goal already satisfied by init.
        assert_eq!(task.init, task.goal);
    }

    #[test]
    fn static_preconditions_compile_away() {
        let d = parse_domain(
            r#"
(define (domain s)
  (:requirements :typing)
  (:types loc - object)
  (:predicates (adj ?a - loc ?b - loc) (here ?l - loc))
  (:action step
    :parameters (?from - loc ?to - loc)
    :precondition (and (here ?from) (adj ?from ?to))
    :effect (and (here ?to) (not (here ?from)))
  )
)
"#,
        )
        .unwrap();
        let p = parse_problem(
            r#"
(define (problem walk)
  (:domain s)
  (:objects a b c - loc)
  (:init (here a) (adj a b) (adj b c))
  (:goal (and (here c)))
)
"#,
        )
        .unwrap();
        let task = ground(&d, &p, &UniformCost(1.0, 1.0)).unwrap();
        // Only the two adjacent pairs survive; adj itself is compiled away.
        assert_eq!(task.ops.len(), 2);
        assert!(task.propositions.iter().all(|pr| !pr.starts_with("(adj")));
        for op in &task.ops {
            assert_eq!(op.pre.len(), 1);
        }
    }

    #[test]
    fn ground_soundness_ops_are_instances_of_their_schema() {
        let d = sample_domain();
        let p = sample_problem();
        let task = ground(&d, &p, &UniformCost(1.0, 1.0)).unwrap();
        for op in &task.ops {
            let schema = d.actions.iter().find(|a| a.name == op.schema).unwrap();
            assert_eq!(schema.params.len(), op.args.len());
            // Rebuild the dynamic precondition/effect sets under the
            // substitution and compare against the op's index sets.
            let binding: alloc::collections::BTreeMap<&str, &str> = schema
                .params
                .iter()
                .map(|pp| pp.name.as_str())
                .zip(op.args.iter().map(|a| a.as_str()))
                .collect();
            let subst = |atom: &Atom| -> String {
                let mut s = alloc::string::String::from("(");
                s.push_str(&atom.pred);
                for t in &atom.terms {
                    s.push(' ');
                    match t {
                        Term::Const(c) => s.push_str(c),
                        Term::Var(v) => s.push_str(binding[v.as_str()]),
                    }
                }
                s.push(')');
                s
            };
            let adds: Vec<String> = schema.adds.iter().map(subst).collect();
            for idx in &op.add {
                assert!(adds.contains(&task.propositions[*idx as usize]));
            }
        }
    }

    #[test]
    fn ground_completeness_matches_bare_enumeration() {
        // Brute-force substitution count (before static filtering and
        // pruning) equals the grounder's phase-1 enumeration.
        let d = sample_domain();
        let p = sample_problem();
        let objs = objects_by_type(&d, &p);
        let mut expected = 0usize;
        for schema in &d.actions {
            let mut combos = 1usize;
            for param in &schema.params {
                combos *= objs.get(param.ty.as_str()).map(|v| v.len()).unwrap_or(0);
            }
            expected += combos;
        }
        let listed: usize = d
            .actions
            .iter()
            .map(|s| enumerate_substitutions(&objs, s).len())
            .sum();
        assert_eq!(listed, expected);
        assert_eq!(listed, 4);
    }

    #[test]
    fn objects_of_undeclared_types_fail_grounding() {
        let d = sample_domain();
        let p = parse_problem(
            "(define (problem x) (:domain cell) (:objects g - ghost) (:init) (:goal (and (free g))))",
        )
        .unwrap();
        let err = ground(&d, &p, &UniformCost(1.0, 1.0)).unwrap_err();
        assert!(err.msg.contains("ghost"), "{err}");
    }

    #[test]
    fn grounder_op_set_matches_independent_enumeration() {
        // Nested loops over the object lists, written out independently
        // of the grounder's enumeration code.
        let d = sample_domain();
        let p = sample_problem();
        let task = ground(&d, &p, &UniformCost(1.0, 1.0)).unwrap();
        let mut expected: Vec<String> = Vec::new();
        for agent in ["r1", "r2"] {
            for part in ["nut", "bolt"] {
                expected.push(alloc::format!("(grab {agent} {part})"));
            }
        }
        let mut got: Vec<String> = task.ops.iter().map(|o| o.name.clone()).collect();
        got.sort();
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn relaxed_reachability_prunes_unreachable_ops() {
        let d = parse_domain(
            r#"
(define (domain r)
  (:predicates (a) (b) (c) (unreached))
  (:action start
    :parameters ()
    :precondition (a)
    :effect (b))
  (:action blocked
    :parameters ()
    :precondition (unreached)
    :effect (c))
)
"#,
        )
        .unwrap();
        let p = parse_problem(
            "(define (problem x) (:domain r) (:objects o) (:init (a)) (:goal (and (b))))",
        )
        .unwrap();
        let task = ground(&d, &p, &UniformCost(1.0, 1.0)).unwrap();
        assert_eq!(task.ops.len(), 1);
        assert_eq!(task.ops[0].name, "(start)");
    }
}
