//! Compilation of a scenario into the PDDL subset and a grounded task.
//!
//! The action library is pick / place / move / assemble / cooperate-guide
//! over typed objects. Information requirements become precondition
//! gating: each (agent, part, location) triple is statically bound to one
//! info object (`none` when unrestricted), `place` requires the binding
//! to be known, and `cooperate-guide` adds the knowledge while placing
//! the held part under guidance. A robot's solo place therefore carries
//! the post-knowledge cost and is simply inapplicable before the
//! knowledge exists.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{ScenarioConfig, ScenarioError};
use crate::cost::{
    agent_action_cost, build_cost_table, cooperative_cost, resolve_reach_d,
    worker_reach_trajectory, CostContext, CostTable,
};
use crate::model::{ActionKind, AgentKind, AgentSpec, InfoItem, PartSpec, Region};
use crate::pddl::{
    ground, ActionSchema, Atom, CostDur, CostSource, DomainAst, FluentRef, FunctionDecl,
    GroundedTask, Literal, NumExpr, PredicateDecl, ProblemAst, Term, TypedName,
};

/// Everything `compile` produces: the domain/problem pair, the grounded
/// task, and the cost table the grounding was priced from.
#[derive(Clone, Debug)]
pub struct CompiledProblem {
    pub domain: DomainAst,
    pub problem: ProblemAst,
    pub grounded: GroundedTask,
    pub cost_table: CostTable,
}

/// Cost source computing every grounded instantiation directly from the
/// scenario's cost model (the table's single source of truth).
pub struct ScenarioCostSource<'a> {
    cfg: &'a ScenarioConfig,
    parts: Vec<PartSpec>,
    robot_ranges: Vec<Region>,
}

impl<'a> ScenarioCostSource<'a> {
    pub fn new(cfg: &'a ScenarioConfig) -> Self {
        ScenarioCostSource {
            cfg,
            parts: cfg.all_parts(),
            robot_ranges: cfg.robot_ranges(),
        }
    }

    fn part(&self, id: &str) -> Option<&PartSpec> {
        self.parts.iter().find(|p| p.id == id)
    }

    fn place_like_context<'c>(
        &'c self,
        agent: &'c AgentSpec,
        part: Option<&'c PartSpec>,
        loc_id: &str,
        required: &'c [InfoItem],
        waive_info: bool,
        traj: Option<&'c crate::model::Trajectory>,
    ) -> Option<CostContext<'c>> {
        let loc = self.cfg.location(loc_id)?;
        let reach_d = resolve_reach_d(self.cfg, agent, loc_id).ok()?;
        Some(CostContext {
            part,
            target: loc.position,
            reach_d,
            safety_d: self.cfg.safety_d_for(loc_id),
            worker_trajectory: traj,
            robot_ranges: &self.robot_ranges,
            gains: &self.cfg.gains,
            required_info: required,
            pinned_safety: self.cfg.safety_override_for(&agent.id, loc_id),
            waive_info,
        })
    }

    fn pick_place_cost(
        &self,
        agent_id: &str,
        kind: ActionKind,
        part_id: &str,
        loc_id: &str,
        waive_info: bool,
    ) -> Option<crate::cost::ExtCost> {
        let agent = self.cfg.agent(agent_id)?;
        let part = self.part(part_id)?;
        let loc = self.cfg.location(loc_id)?;
        let required = self
            .cfg
            .info_reqs
            .required_for(agent_id, kind, Some(part_id), Some(loc_id));
        let traj = worker_reach_trajectory(agent, &loc.position);
        let ctx = self.place_like_context(
            agent,
            Some(part),
            loc_id,
            &required,
            waive_info,
            traj.as_ref(),
        )?;
        agent_action_cost(agent, kind, &ctx).ok().map(|b| b.total)
    }

    fn move_cost(&self, agent_id: &str, path_id: &str) -> Option<crate::cost::ExtCost> {
        let agent = self.cfg.agent(agent_id)?;
        let path = self.cfg.path(path_id)?;
        let target = path.trajectory.farthest_waypoint_from(&agent.base);
        let reach_d = if agent.kind == AgentKind::Robot && agent.range.contains(&target) {
            let loc = self.cfg.location_at_point(&target)?;
            resolve_reach_d(self.cfg, agent, &loc.id).ok()?
        } else {
            100.0
        };
        let required =
            self.cfg
                .info_reqs
                .required_for(agent_id, ActionKind::Move, None, Some(path_id));
        let ctx = CostContext {
            part: None,
            target,
            reach_d,
            safety_d: self.cfg.safety_d_for_path(path),
            worker_trajectory: Some(&path.trajectory),
            robot_ranges: &self.robot_ranges,
            gains: &self.cfg.gains,
            required_info: &required,
            pinned_safety: self.cfg.safety_override_for(agent_id, path_id),
            waive_info: false,
        };
        agent_action_cost(agent, ActionKind::Move, &ctx)
            .ok()
            .map(|b| b.total)
    }

    fn cooperate_cost(
        &self,
        human_id: &str,
        robot_id: &str,
        part_id: &str,
        loc_id: &str,
    ) -> Option<crate::cost::ExtCost> {
        let human = self.cfg.agent(human_id)?;
        let robot = self.cfg.agent(robot_id)?;
        let part = self.part(part_id)?;
        let loc = self.cfg.location(loc_id)?;
        let h_traj = worker_reach_trajectory(human, &loc.position);
        let h_ctx =
            self.place_like_context(human, Some(part), loc_id, &[], false, h_traj.as_ref())?;
        let r_ctx = self.place_like_context(robot, Some(part), loc_id, &[], false, None)?;
        cooperative_cost(&[human, robot], ActionKind::Place, &[h_ctx, r_ctx]).ok()
    }
}

impl CostSource for ScenarioCostSource<'_> {
    fn cost(&self, schema: &str, args: &[&str]) -> Option<CostDur> {
        let d = &self.cfg.durations;
        match schema {
            "pick" => {
                let cost =
                    self.pick_place_cost(args[0], ActionKind::Pick, args[1], args[2], false)?;
                Some(CostDur {
                    cost,
                    duration_s: d.pick_s,
                })
            }
            "place" => {
                // The knowledge gate lives in the preconditions; the op
                // carries the post-knowledge cost.
                let cost =
                    self.pick_place_cost(args[0], ActionKind::Place, args[1], args[2], true)?;
                Some(CostDur {
                    cost,
                    duration_s: d.place_s,
                })
            }
            "move" => {
                let cost = self.move_cost(args[0], args[1])?;
                Some(CostDur {
                    cost,
                    duration_s: d.move_s,
                })
            }
            "assemble" => Some(CostDur {
                cost: crate::cost::ExtCost::ZERO,
                duration_s: d.assemble_s,
            }),
            "cooperate-guide" => {
                let cost = self.cooperate_cost(args[0], args[1], args[2], args[3])?;
                Some(CostDur {
                    cost,
                    duration_s: d.cooperate_s,
                })
            }
            _ => None,
        }
    }
}

fn var(name: &str) -> Term {
    Term::Var(name.to_string())
}

fn atom(pred: &str, terms: &[Term]) -> Atom {
    Atom {
        pred: pred.to_string(),
        terms: terms.to_vec(),
    }
}

fn build_domain(cfg: &ScenarioConfig, gated: bool) -> DomainAst {
    let d = &cfg.durations;
    let a = || var("a");
    let p = || var("p");
    let l = || var("l");
    let i = || var("i");

    let mut actions = alloc::vec![
        ActionSchema {
            name: "pick".to_string(),
            params: alloc::vec![
                TypedName::new("a", "agent"),
                TypedName::new("p", "part"),
                TypedName::new("l", "location"),
            ],
            precondition: alloc::vec![
                Literal::pos(atom("ee-at", &[a(), l()])),
                Literal::pos(atom("at", &[p(), l()])),
                Literal::pos(atom("handempty", &[a()])),
            ],
            adds: alloc::vec![atom("holding", &[a(), p()])],
            dels: alloc::vec![atom("at", &[p(), l()]), atom("handempty", &[a()])],
            increases: alloc::vec![(
                FluentRef {
                    name: "total-cost".to_string(),
                    terms: alloc::vec![],
                },
                NumExpr::Fluent(FluentRef {
                    name: "pick-cost".to_string(),
                    terms: alloc::vec![a(), p(), l()],
                }),
            )],
            duration: Some(d.pick_s),
        },
        ActionSchema {
            name: "place".to_string(),
            params: {
                let mut params = alloc::vec![
                    TypedName::new("a", "agent"),
                    TypedName::new("p", "part"),
                    TypedName::new("l", "location"),
                ];
                if gated {
                    params.push(TypedName::new("i", "info"));
                }
                params
            },
            precondition: {
                let mut pre = alloc::vec![
                    Literal::pos(atom("ee-at", &[a(), l()])),
                    Literal::pos(atom("holding", &[a(), p()])),
                ];
                if gated {
                    pre.push(Literal::pos(atom("info-needed", &[a(), p(), l(), i()])));
                    pre.push(Literal::pos(atom("knows", &[a(), i()])));
                }
                pre
            },
            adds: alloc::vec![atom("at", &[p(), l()]), atom("handempty", &[a()])],
            dels: alloc::vec![atom("holding", &[a(), p()])],
            increases: alloc::vec![(
                FluentRef {
                    name: "total-cost".to_string(),
                    terms: alloc::vec![],
                },
                NumExpr::Fluent(FluentRef {
                    name: "place-cost".to_string(),
                    terms: alloc::vec![a(), p(), l()],
                }),
            )],
            duration: Some(d.place_s),
        },
        ActionSchema {
            name: "move".to_string(),
            params: alloc::vec![
                TypedName::new("a", "agent"),
                TypedName::new("w", "path"),
                TypedName::new("from", "location"),
                TypedName::new("to", "location"),
            ],
            precondition: alloc::vec![
                Literal::pos(atom("ee-at", &[a(), var("from")])),
                Literal::pos(atom("connects", &[var("w"), var("from"), var("to")])),
            ],
            adds: alloc::vec![atom("ee-at", &[a(), var("to")])],
            dels: alloc::vec![atom("ee-at", &[a(), var("from")])],
            increases: alloc::vec![(
                FluentRef {
                    name: "total-cost".to_string(),
                    terms: alloc::vec![],
                },
                NumExpr::Fluent(FluentRef {
                    name: "move-cost".to_string(),
                    terms: alloc::vec![a(), var("w")],
                }),
            )],
            duration: Some(d.move_s),
        },
        ActionSchema {
            name: "assemble".to_string(),
            params: alloc::vec![
                TypedName::new("b", "part"),
                TypedName::new("r", "part"),
                TypedName::new("f", "part"),
                TypedName::new("l", "location"),
            ],
            precondition: alloc::vec![
                Literal::pos(atom("assembly", &[var("b"), var("r"), var("f"), l()])),
                Literal::pos(atom("at", &[var("b"), l()])),
                Literal::pos(atom("at", &[var("r"), l()])),
            ],
            adds: alloc::vec![atom("at", &[var("f"), l()])],
            dels: alloc::vec![atom("at", &[var("b"), l()]), atom("at", &[var("r"), l()])],
            increases: alloc::vec![(
                FluentRef {
                    name: "total-cost".to_string(),
                    terms: alloc::vec![],
                },
                NumExpr::Fluent(FluentRef {
                    name: "assemble-cost".to_string(),
                    terms: alloc::vec![],
                }),
            )],
            duration: Some(d.assemble_s),
        },
    ];
    if gated {
        actions.push(ActionSchema {
            name: "cooperate-guide".to_string(),
            params: alloc::vec![
                TypedName::new("h", "human"),
                TypedName::new("r", "robot"),
                TypedName::new("p", "part"),
                TypedName::new("l", "location"),
                TypedName::new("i", "info"),
            ],
            precondition: alloc::vec![
                Literal::pos(atom("ee-at", &[var("h"), l()])),
                Literal::pos(atom("ee-at", &[var("r"), l()])),
                Literal::pos(atom("holding", &[var("r"), p()])),
                Literal::pos(atom("needs-guidance", &[var("r"), p(), l(), i()])),
            ],
            adds: alloc::vec![
                atom("at", &[p(), l()]),
                atom("handempty", &[var("r")]),
                atom("knows", &[var("r"), i()]),
            ],
            dels: alloc::vec![atom("holding", &[var("r"), p()])],
            increases: alloc::vec![(
                FluentRef {
                    name: "total-cost".to_string(),
                    terms: alloc::vec![],
                },
                NumExpr::Fluent(FluentRef {
                    name: "cooperate-cost".to_string(),
                    terms: alloc::vec![var("h"), var("r"), p(), l()],
                }),
            )],
            duration: Some(d.cooperate_s),
        });
    }

    let mut types = alloc::vec![
        TypedName::new("human", "agent"),
        TypedName::new("robot", "agent"),
        TypedName::new("agent", "object"),
        TypedName::new("part", "object"),
        TypedName::new("location", "object"),
        TypedName::new("path", "object"),
    ];
    if gated {
        types.push(TypedName::new("info", "object"));
    }

    DomainAst {
        name: cfg.name.clone(),
        requirements: alloc::vec![
            ":strips".to_string(),
            ":typing".to_string(),
            ":action-costs".to_string(),
        ],
        types,
        predicates: {
            let mut predicates = alloc::vec![
                PredicateDecl {
                    name: "at".to_string(),
                    params: alloc::vec![
                        TypedName::new("p", "part"),
                        TypedName::new("l", "location")
                    ],
                },
                PredicateDecl {
                    name: "ee-at".to_string(),
                    params: alloc::vec![
                        TypedName::new("a", "agent"),
                        TypedName::new("l", "location")
                    ],
                },
                PredicateDecl {
                    name: "holding".to_string(),
                    params: alloc::vec![TypedName::new("a", "agent"), TypedName::new("p", "part")],
                },
                PredicateDecl {
                    name: "handempty".to_string(),
                    params: alloc::vec![TypedName::new("a", "agent")],
                },
                PredicateDecl {
                    name: "connects".to_string(),
                    params: alloc::vec![
                        TypedName::new("w", "path"),
                        TypedName::new("from", "location"),
                        TypedName::new("to", "location"),
                    ],
                },
                PredicateDecl {
                    name: "assembly".to_string(),
                    params: alloc::vec![
                        TypedName::new("b", "part"),
                        TypedName::new("r", "part"),
                        TypedName::new("f", "part"),
                        TypedName::new("l", "location"),
                    ],
                },
            ];
            if gated {
                predicates.push(PredicateDecl {
                    name: "info-needed".to_string(),
                    params: alloc::vec![
                        TypedName::new("a", "agent"),
                        TypedName::new("p", "part"),
                        TypedName::new("l", "location"),
                        TypedName::new("i", "info"),
                    ],
                });
                predicates.push(PredicateDecl {
                    name: "needs-guidance".to_string(),
                    params: alloc::vec![
                        TypedName::new("r", "robot"),
                        TypedName::new("p", "part"),
                        TypedName::new("l", "location"),
                        TypedName::new("i", "info"),
                    ],
                });
                predicates.push(PredicateDecl {
                    name: "knows".to_string(),
                    params: alloc::vec![TypedName::new("a", "agent"), TypedName::new("i", "info")],
                });
            }
            predicates
        },
        functions: {
            let mut functions = alloc::vec![
                FunctionDecl {
                    name: "total-cost".to_string(),
                    params: alloc::vec![],
                },
                FunctionDecl {
                    name: "pick-cost".to_string(),
                    params: alloc::vec![
                        TypedName::new("a", "agent"),
                        TypedName::new("p", "part"),
                        TypedName::new("l", "location"),
                    ],
                },
                FunctionDecl {
                    name: "place-cost".to_string(),
                    params: alloc::vec![
                        TypedName::new("a", "agent"),
                        TypedName::new("p", "part"),
                        TypedName::new("l", "location"),
                    ],
                },
                FunctionDecl {
                    name: "move-cost".to_string(),
                    params: alloc::vec![TypedName::new("a", "agent"), TypedName::new("w", "path")],
                },
                FunctionDecl {
                    name: "assemble-cost".to_string(),
                    params: alloc::vec![],
                },
            ];
            if gated {
                functions.push(FunctionDecl {
                    name: "cooperate-cost".to_string(),
                    params: alloc::vec![
                        TypedName::new("h", "human"),
                        TypedName::new("r", "robot"),
                        TypedName::new("p", "part"),
                        TypedName::new("l", "location"),
                    ],
                });
            }
            functions
        },
        actions,
    }
}

/// Canonical info-object name of a requirement set: items joined by `+`,
/// `none` for the empty set.
fn info_object(set: &[InfoItem]) -> String {
    if set.is_empty() {
        "none".to_string()
    } else {
        let names: Vec<&str> = set.iter().map(|i| i.0.as_str()).collect();
        names.join("+")
    }
}

fn build_problem(
    cfg: &ScenarioConfig,
    parts: &[PartSpec],
    gated: bool,
) -> Result<ProblemAst, ScenarioError> {
    for (i, req) in cfg.info_reqs.0.iter().enumerate() {
        if req.kind != ActionKind::Place {
            return Err(ScenarioError::new(
                format!("info[{i}].action"),
                "the compiler gates place actions only",
            ));
        }
    }

    let mut objects: Vec<TypedName> = Vec::new();
    for a in &cfg.agents {
        let ty = match a.kind {
            AgentKind::Human => "human",
            AgentKind::Robot => "robot",
        };
        objects.push(TypedName::new(a.id.clone(), ty));
    }
    for p in parts {
        objects.push(TypedName::new(p.id.clone(), "part"));
    }
    for l in &cfg.locations {
        objects.push(TypedName::new(l.id.clone(), "location"));
    }
    for w in &cfg.paths {
        objects.push(TypedName::new(w.id.clone(), "path"));
    }

    let mut init: Vec<Atom> = Vec::new();
    for (agent, loc) in &cfg.start_at {
        init.push(Atom::ground("ee-at", &[agent, loc]));
    }
    for p in parts {
        if let Some(loc) = &p.initial_location {
            init.push(Atom::ground("at", &[&p.id, loc]));
        }
    }
    for a in &cfg.agents {
        init.push(Atom::ground("handempty", &[&a.id]));
    }
    for w in &cfg.paths {
        init.push(Atom::ground("connects", &[&w.id, &w.from, &w.to]));
        init.push(Atom::ground("connects", &[&w.id, &w.to, &w.from]));
    }
    for rule in &cfg.assemble_rules {
        if rule.inputs.len() != 2 {
            return Err(ScenarioError::new(
                "assemble",
                "the compiled assembly action takes exactly 2 inputs",
            ));
        }
        init.push(Atom::ground(
            "assembly",
            &[&rule.inputs[0], &rule.inputs[1], &rule.output, &rule.at],
        ));
    }

    // Information binding per (agent, part, location), plus the info
    // objects themselves and the knowledge state. Scenarios without any
    // information requirement carry none of this machinery.
    let mut info_objects: Vec<String> = Vec::new();
    let mut knows: Vec<(String, String)> = Vec::new();
    if gated {
        info_objects.push("none".to_string());
        for a in &cfg.agents {
            knows.push((a.id.clone(), "none".to_string()));
        }
    }
    for a in cfg.agents.iter().filter(|_| gated) {
        for p in parts {
            for l in &cfg.locations {
                let set =
                    cfg.info_reqs
                        .required_for(&a.id, ActionKind::Place, Some(&p.id), Some(&l.id));
                let obj = info_object(&set);
                if !info_objects.contains(&obj) {
                    info_objects.push(obj.clone());
                }
                init.push(Atom::ground("info-needed", &[&a.id, &p.id, &l.id, &obj]));
                if !set.is_empty() {
                    init.push(Atom::ground("needs-guidance", &[&a.id, &p.id, &l.id, &obj]));
                    let already_known = set.iter().all(|item| a.known_info.contains(item));
                    if already_known && !knows.contains(&(a.id.clone(), obj.clone())) {
                        knows.push((a.id.clone(), obj.clone()));
                    }
                }
            }
        }
    }
    for (agent, obj) in &knows {
        init.push(Atom::ground("knows", &[agent, obj]));
    }
    for obj in &info_objects {
        objects.push(TypedName::new(obj.clone(), "info"));
    }

    let goal: Vec<Atom> = cfg
        .goal
        .iter()
        .map(|g| Atom::ground("at", &[&g.part, &g.location]))
        .collect();

    Ok(ProblemAst {
        name: format!("{}-problem", cfg.name),
        domain: cfg.name.clone(),
        objects,
        init,
        numeric_init: Vec::new(),
        goal,
        metric_minimize_total_cost: true,
    })
}

/// Compile a scenario: cost table, domain/problem ASTs, and the grounded
/// task with infinite-cost instantiations dropped.
pub fn compile(cfg: &ScenarioConfig) -> Result<CompiledProblem, ScenarioError> {
    cfg.validate()?;
    let cost_table =
        build_cost_table(cfg).map_err(|e| ScenarioError::new("cost", e.to_string()))?;

    let parts = cfg.all_parts();
    let gated = !cfg.info_reqs.0.is_empty();
    let domain = build_domain(cfg, gated);
    let mut problem = build_problem(cfg, &parts, gated)?;

    let source = ScenarioCostSource::new(cfg);
    let grounded = ground(&domain, &problem, &source)
        .map_err(|e| ScenarioError::new("ground", e.to_string()))?;

    // Materialize the grounded costs as numeric init facts so emitted
    // files carry them for external planners.
    let mut facts: BTreeMap<String, (FluentRef, f64)> = BTreeMap::new();
    facts.insert(
        "(total-cost)".to_string(),
        (
            FluentRef {
                name: "total-cost".to_string(),
                terms: Vec::new(),
            },
            0.0,
        ),
    );
    for op in &grounded.ops {
        let (name, terms): (&str, Vec<Term>) = match op.schema.as_str() {
            "pick" => (
                "pick-cost",
                op.args
                    .iter()
                    .take(3)
                    .map(|a| Term::Const(a.clone()))
                    .collect(),
            ),
            "place" => (
                "place-cost",
                op.args
                    .iter()
                    .take(3)
                    .map(|a| Term::Const(a.clone()))
                    .collect(),
            ),
            "move" => (
                "move-cost",
                op.args
                    .iter()
                    .take(2)
                    .map(|a| Term::Const(a.clone()))
                    .collect(),
            ),
            "cooperate-guide" => (
                "cooperate-cost",
                op.args
                    .iter()
                    .take(4)
                    .map(|a| Term::Const(a.clone()))
                    .collect(),
            ),
            "assemble" => ("assemble-cost", Vec::new()),
            _ => continue,
        };
        let fluent = FluentRef {
            name: name.to_string(),
            terms,
        };
        facts.insert(format!("{fluent}"), (fluent, op.cost));
    }
    problem.numeric_init = facts.into_values().collect();

    Ok(CompiledProblem {
        domain,
        problem,
        grounded,
        cost_table,
    })
}
