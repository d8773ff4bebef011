//! Syntax trees for the cost-metric PDDL subset, plus the canonical
//! emitter. The subset is typed STRIPS with negative preconditions,
//! numeric cost fluents (`(increase (total-cost) ...)` effects), and an
//! optional constant `:duration` clause per action.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A name with a type, used for typed variables and objects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
}

impl TypedName {
    pub fn new(name: impl Into<String>, ty: impl Into<String>) -> Self {
        TypedName {
            name: name.into(),
            ty: ty.into(),
        }
    }
}

/// A term of an atom: a `?variable` or a constant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

/// A predicate applied to terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Atom {
    pub pred: String,
    pub terms: Vec<Term>,
}

impl Atom {
    pub fn ground(pred: impl Into<String>, args: &[&str]) -> Self {
        Atom {
            pred: pred.into(),
            terms: args.iter().map(|a| Term::Const((*a).into())).collect(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.terms.iter().all(|t| matches!(t, Term::Const(_)))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.pred)?;
        for t in &self.terms {
            write!(f, " {t}")?;
        }
        write!(f, ")")
    }
}

/// A possibly negated atom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal {
            positive: true,
            atom,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal {
            positive: false,
            atom,
        }
    }
}

/// Reference to a numeric fluent, e.g. `(pick-cost ?a ?l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FluentRef {
    pub name: String,
    pub terms: Vec<Term>,
}

impl fmt::Display for FluentRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for t in &self.terms {
            write!(f, " {t}")?;
        }
        write!(f, ")")
    }
}

/// Numeric expression allowed on the right of an `increase` effect.
#[derive(Clone, Debug, PartialEq)]
pub enum NumExpr {
    Const(f64),
    Fluent(FluentRef),
}

/// A lifted action.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedName>,
    pub precondition: Vec<Literal>,
    pub adds: Vec<Atom>,
    pub dels: Vec<Atom>,
    /// `(increase <fluent> <expr>)` effects, usually on `(total-cost)`.
    pub increases: Vec<(FluentRef, NumExpr)>,
    /// Constant duration in seconds, when declared.
    pub duration: Option<f64>,
}

/// A predicate declaration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<TypedName>,
}

/// A numeric fluent declaration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionDecl {
    pub name: String,
    pub params: Vec<TypedName>,
}

/// A parsed domain file.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct DomainAst {
    pub name: String,
    pub requirements: Vec<String>,
    /// (type, parent) pairs in declaration order. `object` is built in.
    pub types: Vec<TypedName>,
    pub predicates: Vec<PredicateDecl>,
    pub functions: Vec<FunctionDecl>,
    pub actions: Vec<ActionSchema>,
}

impl DomainAst {
    /// All type names usable in this domain: declared names, their
    /// parents, and the built-in root.
    pub fn known_types(&self) -> Vec<&str> {
        let mut known: Vec<&str> = Vec::new();
        known.push("object");
        for t in &self.types {
            if !known.contains(&t.name.as_str()) {
                known.push(&t.name);
            }
            if !known.contains(&t.ty.as_str()) {
                known.push(&t.ty);
            }
        }
        known
    }

    /// Whether `ty` equals `ancestor` or derives from it.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        if ty == ancestor {
            return true;
        }
        let mut cur = ty;
        // Bounded walk guards against cyclic declarations.
        for _ in 0..=self.types.len() {
            match self.types.iter().find(|t| t.name == cur) {
                Some(t) => {
                    if t.ty == ancestor {
                        return true;
                    }
                    cur = &t.ty;
                }
                None => return ancestor == "object" && cur == "object",
            }
        }
        false
    }
}

/// A parsed problem file.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ProblemAst {
    pub name: String,
    pub domain: String,
    pub objects: Vec<TypedName>,
    pub init: Vec<Atom>,
    pub numeric_init: Vec<(FluentRef, f64)>,
    /// Conjunction of ground atoms.
    pub goal: Vec<Atom>,
    pub metric_minimize_total_cost: bool,
}

fn push_typed_list(out: &mut String, list: &[TypedName]) {
    for (i, t) in list.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&format!("?{} - {}", t.name, t.ty));
    }
}

fn push_number(out: &mut String, v: f64) {
    out.push_str(&format!("{v}"));
}

fn push_conjunction(out: &mut String, lits: &[Literal], indent: &str) {
    if lits.is_empty() {
        out.push_str("(and)");
        return;
    }
    if lits.len() == 1 && lits[0].positive {
        out.push_str(&format!("{}", lits[0].atom));
        return;
    }
    out.push_str("(and");
    for l in lits {
        out.push('\n');
        out.push_str(indent);
        if l.positive {
            out.push_str(&format!("{}", l.atom));
        } else {
            out.push_str(&format!("(not {})", l.atom));
        }
    }
    out.push(')');
}

/// Canonical pretty-printed domain text; `parse_domain` of the output
/// reproduces the AST structurally.
pub fn emit_domain(ast: &DomainAst) -> String {
    let mut out = String::new();
    out.push_str(&format!("(define (domain {})\n", ast.name));
    if !ast.requirements.is_empty() {
        out.push_str("  (:requirements");
        for r in &ast.requirements {
            out.push_str(&format!(" {r}"));
        }
        out.push_str(")\n");
    }
    if !ast.types.is_empty() {
        out.push_str("  (:types");
        for t in &ast.types {
            out.push_str(&format!(" {} - {}", t.name, t.ty));
        }
        out.push_str(")\n");
    }
    if !ast.predicates.is_empty() {
        out.push_str("  (:predicates\n");
        for p in &ast.predicates {
            out.push_str(&format!("    ({}", p.name));
            if !p.params.is_empty() {
                out.push(' ');
                push_typed_list(&mut out, &p.params);
            }
            out.push_str(")\n");
        }
        out.push_str("  )\n");
    }
    if !ast.functions.is_empty() {
        out.push_str("  (:functions\n");
        for p in &ast.functions {
            out.push_str(&format!("    ({}", p.name));
            if !p.params.is_empty() {
                out.push(' ');
                push_typed_list(&mut out, &p.params);
            }
            out.push_str(")\n");
        }
        out.push_str("  )\n");
    }
    for a in &ast.actions {
        out.push_str(&format!("  (:action {}\n", a.name));
        out.push_str("    :parameters (");
        push_typed_list(&mut out, &a.params);
        out.push_str(")\n");
        out.push_str("    :precondition ");
        push_conjunction(&mut out, &a.precondition, "      ");
        out.push('\n');
        out.push_str("    :effect (and");
        for add in &a.adds {
            out.push_str(&format!("\n      {add}"));
        }
        for del in &a.dels {
            out.push_str(&format!("\n      (not {del})"));
        }
        for (fluent, expr) in &a.increases {
            out.push_str("\n      (increase ");
            out.push_str(&format!("{fluent}"));
            out.push(' ');
            match expr {
                NumExpr::Const(v) => push_number(&mut out, *v),
                NumExpr::Fluent(f) => out.push_str(&format!("{f}")),
            }
            out.push(')');
        }
        out.push_str(")\n");
        if let Some(d) = a.duration {
            out.push_str("    :duration ");
            push_number(&mut out, d);
            out.push('\n');
        }
        out.push_str("  )\n");
    }
    out.push_str(")\n");
    out
}

/// Canonical pretty-printed problem text.
pub fn emit_problem(ast: &ProblemAst) -> String {
    let mut out = String::new();
    out.push_str(&format!("(define (problem {})\n", ast.name));
    out.push_str(&format!("  (:domain {})\n", ast.domain));
    if !ast.objects.is_empty() {
        out.push_str("  (:objects\n");
        for o in &ast.objects {
            out.push_str(&format!("    {} - {}\n", o.name, o.ty));
        }
        out.push_str("  )\n");
    }
    out.push_str("  (:init\n");
    for a in &ast.init {
        out.push_str(&format!("    {a}\n"));
    }
    for (f, v) in &ast.numeric_init {
        out.push_str(&format!("    (= {f} "));
        push_number(&mut out, *v);
        out.push_str(")\n");
    }
    out.push_str("  )\n");
    out.push_str("  (:goal (and");
    for g in &ast.goal {
        out.push_str(&format!("\n    {g}"));
    }
    out.push_str("))\n");
    if ast.metric_minimize_total_cost {
        out.push_str("  (:metric minimize (total-cost))\n");
    }
    out.push_str(")\n");
    out
}
