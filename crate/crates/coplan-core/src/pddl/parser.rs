//! Recursive-descent parser for the domain and problem subset. Every
//! input either yields an AST or a positioned error; nothing panics.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};
use super::PddlError;

const KNOWN_REQUIREMENTS: &[&str] = &[
    ":strips",
    ":typing",
    ":negative-preconditions",
    ":equality",
    ":action-costs",
    ":fluents",
    ":numeric-fluents",
];

struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
}

impl Cursor {
    fn new(text: &str) -> Result<Self, PddlError> {
        Ok(Cursor {
            tokens: tokenize(text)?,
            pos: 0,
        })
    }

    fn end_pos(&self) -> (u32, u32) {
        self.tokens
            .last()
            .map(|t| (t.line, t.col + 1))
            .unwrap_or((1, 1))
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Result<Token, PddlError> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => {
                let (l, c) = self.end_pos();
                Err(PddlError::at(l, c, "unexpected end of input".to_string()))
            }
        }
    }

    fn expect_lparen(&mut self) -> Result<Token, PddlError> {
        let t = self.next()?;
        if t.kind == TokenKind::LParen {
            Ok(t)
        } else {
            Err(PddlError::at(
                t.line,
                t.col,
                format!("expected `(`, found {}", show(&t)),
            ))
        }
    }

    fn expect_rparen(&mut self) -> Result<(), PddlError> {
        let t = self.next()?;
        if t.kind == TokenKind::RParen {
            Ok(())
        } else {
            Err(PddlError::at(
                t.line,
                t.col,
                format!("expected `)`, found {}", show(&t)),
            ))
        }
    }

    fn expect_symbol(&mut self) -> Result<(String, u32, u32), PddlError> {
        let t = self.next()?;
        match t.kind {
            TokenKind::Symbol(s) => Ok((s, t.line, t.col)),
            _ => Err(PddlError::at(
                t.line,
                t.col,
                format!("expected a symbol, found {}", show(&t)),
            )),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), PddlError> {
        let (s, l, c) = self.expect_symbol()?;
        if s == kw {
            Ok(())
        } else {
            Err(PddlError::at(l, c, format!("expected `{kw}`, found `{s}`")))
        }
    }

    fn at_rparen(&self) -> bool {
        matches!(self.peek().map(|t| &t.kind), Some(TokenKind::RParen))
    }

    fn at_lparen(&self) -> bool {
        matches!(self.peek().map(|t| &t.kind), Some(TokenKind::LParen))
    }

    fn finish(&self) -> Result<(), PddlError> {
        match self.tokens.get(self.pos) {
            None => Ok(()),
            Some(t) => Err(PddlError::at(
                t.line,
                t.col,
                format!("trailing input after closing `)`: {}", show(t)),
            )),
        }
    }
}

fn show(t: &Token) -> String {
    match &t.kind {
        TokenKind::LParen => "`(`".to_string(),
        TokenKind::RParen => "`)`".to_string(),
        TokenKind::Symbol(s) => format!("`{s}`"),
    }
}

/// Parse `name name - type name - type ...` up to the closing paren.
/// Untyped trailing names default to `object`. When `variables` is set,
/// names must carry the `?` sigil (which is stripped).
fn parse_typed_list(cur: &mut Cursor, variables: bool) -> Result<Vec<TypedName>, PddlError> {
    let mut out: Vec<TypedName> = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    loop {
        if cur.at_rparen() {
            break;
        }
        let (s, l, c) = cur.expect_symbol()?;
        if s == "-" {
            let (ty, tl, tc) = cur.expect_symbol()?;
            if ty.starts_with('?') {
                return Err(PddlError::at(
                    tl,
                    tc,
                    "type may not be a variable".to_string(),
                ));
            }
            if pending.is_empty() {
                return Err(PddlError::at(
                    l,
                    c,
                    "dangling `-` without names".to_string(),
                ));
            }
            for name in pending.drain(..) {
                out.push(TypedName {
                    name,
                    ty: ty.clone(),
                });
            }
        } else {
            let name = if variables {
                match s.strip_prefix('?') {
                    Some(v) if !v.is_empty() => v.to_string(),
                    _ => {
                        return Err(PddlError::at(
                            l,
                            c,
                            format!("expected a `?variable`, found `{s}`"),
                        ))
                    }
                }
            } else {
                if s.starts_with('?') {
                    return Err(PddlError::at(
                        l,
                        c,
                        format!("expected a name, found variable `{s}`"),
                    ));
                }
                s
            };
            pending.push(name);
        }
    }
    for name in pending {
        out.push(TypedName {
            name,
            ty: "object".to_string(),
        });
    }
    Ok(out)
}

fn parse_term(s: String) -> Term {
    match s.strip_prefix('?') {
        Some(v) => Term::Var(v.to_string()),
        None => Term::Const(s),
    }
}

/// Parse an atom body after its opening paren: `name term* )`.
fn parse_atom_body(cur: &mut Cursor) -> Result<Atom, PddlError> {
    let (pred, l, c) = cur.expect_symbol()?;
    if pred.starts_with('?') {
        return Err(PddlError::at(
            l,
            c,
            "predicate name may not be a variable".to_string(),
        ));
    }
    let mut terms = Vec::new();
    while !cur.at_rparen() {
        let (s, _, _) = cur.expect_symbol()?;
        terms.push(parse_term(s));
    }
    cur.expect_rparen()?;
    Ok(Atom { pred, terms })
}

fn parse_fluent_ref(cur: &mut Cursor) -> Result<FluentRef, PddlError> {
    cur.expect_lparen()?;
    let atom = parse_atom_body(cur)?;
    Ok(FluentRef {
        name: atom.pred,
        terms: atom.terms,
    })
}

fn parse_number(cur: &mut Cursor) -> Result<f64, PddlError> {
    let (s, l, c) = cur.expect_symbol()?;
    s.parse::<f64>()
        .map_err(|_| PddlError::at(l, c, format!("expected a number, found `{s}`")))
}

/// Conjunction: atom | (not atom) | (and ...); `(and)` is empty.
fn parse_conjunction(cur: &mut Cursor) -> Result<Vec<Literal>, PddlError> {
    let open = cur.expect_lparen()?;
    let mut out = Vec::new();
    if cur.at_rparen() {
        // `()` counts as the empty conjunction.
        cur.expect_rparen()?;
        return Ok(out);
    }
    let (head, _, _) = peek_symbol(cur, &open)?;
    match head.as_str() {
        "and" => {
            cur.expect_symbol()?;
            while !cur.at_rparen() {
                let inner = cur.expect_lparen()?;
                parse_literal_into(cur, &inner, &mut out)?;
            }
            cur.expect_rparen()?;
        }
        _ => {
            parse_literal_into(cur, &open, &mut out)?;
        }
    }
    Ok(out)
}

fn peek_symbol(cur: &Cursor, open: &Token) -> Result<(String, u32, u32), PddlError> {
    match cur.peek() {
        Some(Token {
            kind: TokenKind::Symbol(s),
            line,
            col,
        }) => Ok((s.clone(), *line, *col)),
        Some(t) => Err(PddlError::at(
            t.line,
            t.col,
            format!("expected a symbol, found {}", show(t)),
        )),
        None => Err(PddlError::at(
            open.line,
            open.col,
            "unexpected end of input".to_string(),
        )),
    }
}

/// After an opening paren, parse `name ...` or `not (...)` into literals.
fn parse_literal_into(
    cur: &mut Cursor,
    open: &Token,
    out: &mut Vec<Literal>,
) -> Result<(), PddlError> {
    let (head, _, _) = peek_symbol(cur, open)?;
    if head == "not" {
        cur.expect_symbol()?;
        cur.expect_lparen()?;
        let atom = parse_atom_body(cur)?;
        cur.expect_rparen()?;
        out.push(Literal::neg(atom));
    } else {
        let atom = parse_atom_body(cur)?;
        out.push(Literal::pos(atom));
    }
    Ok(())
}

/// Effect: atom | (not atom) | (increase FLUENT EXPR) | (and EFF*).
fn parse_effect(
    cur: &mut Cursor,
    adds: &mut Vec<Atom>,
    dels: &mut Vec<Atom>,
    incs: &mut Vec<(FluentRef, NumExpr)>,
) -> Result<(), PddlError> {
    let open = cur.expect_lparen()?;
    if cur.at_rparen() {
        cur.expect_rparen()?;
        return Ok(());
    }
    let (head, _, _) = peek_symbol(cur, &open)?;
    match head.as_str() {
        "and" => {
            cur.expect_symbol()?;
            while !cur.at_rparen() {
                parse_effect(cur, adds, dels, incs)?;
            }
            cur.expect_rparen()?;
        }
        "not" => {
            cur.expect_symbol()?;
            cur.expect_lparen()?;
            let atom = parse_atom_body(cur)?;
            cur.expect_rparen()?;
            dels.push(atom);
        }
        "increase" => {
            cur.expect_symbol()?;
            let fluent = parse_fluent_ref(cur)?;
            let expr = if cur.at_lparen() {
                NumExpr::Fluent(parse_fluent_ref(cur)?)
            } else {
                NumExpr::Const(parse_number(cur)?)
            };
            cur.expect_rparen()?;
            incs.push((fluent, expr));
        }
        _ => {
            let atom = parse_atom_body(cur)?;
            adds.push(atom);
        }
    }
    Ok(())
}

fn check_vars_declared(schema: &ActionSchema, line: u32, col: u32) -> Result<(), PddlError> {
    let declared: Vec<&str> = schema.params.iter().map(|p| p.name.as_str()).collect();
    let check_terms = |terms: &[Term]| -> Result<(), PddlError> {
        for t in terms {
            if let Term::Var(v) = t {
                if !declared.contains(&v.as_str()) {
                    return Err(PddlError::at(
                        line,
                        col,
                        format!(
                            "variable `?{v}` of action `{}` is not a parameter",
                            schema.name
                        ),
                    ));
                }
            }
        }
        Ok(())
    };
    for l in &schema.precondition {
        check_terms(&l.atom.terms)?;
    }
    for a in schema.adds.iter().chain(&schema.dels) {
        check_terms(&a.terms)?;
    }
    for (f, e) in &schema.increases {
        check_terms(&f.terms)?;
        if let NumExpr::Fluent(fr) = e {
            check_terms(&fr.terms)?;
        }
    }
    Ok(())
}

/// Parse a domain file into its AST.
pub fn parse_domain(text: &str) -> Result<DomainAst, PddlError> {
    let mut cur = Cursor::new(text)?;
    let mut ast = DomainAst::default();

    cur.expect_lparen()?;
    cur.expect_keyword("define")?;
    cur.expect_lparen()?;
    cur.expect_keyword("domain")?;
    let (name, _, _) = cur.expect_symbol()?;
    ast.name = name;
    cur.expect_rparen()?;

    while !cur.at_rparen() {
        let open = cur.expect_lparen()?;
        let (section, sl, sc) = cur.expect_symbol()?;
        match section.as_str() {
            ":requirements" => {
                while !cur.at_rparen() {
                    let (flag, fl, fc) = cur.expect_symbol()?;
                    if !KNOWN_REQUIREMENTS.contains(&flag.as_str()) {
                        return Err(PddlError::at(
                            fl,
                            fc,
                            format!("unknown requirement flag `{flag}`"),
                        ));
                    }
                    ast.requirements.push(flag);
                }
                cur.expect_rparen()?;
            }
            ":types" => {
                ast.types = parse_typed_list(&mut cur, false)?;
                cur.expect_rparen()?;
            }
            ":predicates" => {
                while !cur.at_rparen() {
                    cur.expect_lparen()?;
                    let (pname, pl, pc) = cur.expect_symbol()?;
                    let params = parse_typed_list(&mut cur, true)?;
                    cur.expect_rparen()?;
                    if ast.predicates.iter().any(|p| p.name == pname) {
                        return Err(PddlError::at(
                            sl,
                            sc,
                            format!("duplicate predicate `{pname}`"),
                        ));
                    }
                    check_types_declared(&ast, &params, pl, pc, &pname)?;
                    ast.predicates.push(PredicateDecl {
                        name: pname,
                        params,
                    });
                }
                cur.expect_rparen()?;
            }
            ":functions" => {
                while !cur.at_rparen() {
                    cur.expect_lparen()?;
                    let (fname, fl, fc) = cur.expect_symbol()?;
                    let params = parse_typed_list(&mut cur, true)?;
                    cur.expect_rparen()?;
                    if ast.functions.iter().any(|f| f.name == fname) {
                        return Err(PddlError::at(
                            sl,
                            sc,
                            format!("duplicate function `{fname}`"),
                        ));
                    }
                    check_types_declared(&ast, &params, fl, fc, &fname)?;
                    ast.functions.push(FunctionDecl {
                        name: fname,
                        params,
                    });
                }
                cur.expect_rparen()?;
            }
            ":action" => {
                let (aname, al, ac) = cur.expect_symbol()?;
                let mut schema = ActionSchema {
                    name: aname,
                    params: Vec::new(),
                    precondition: Vec::new(),
                    adds: Vec::new(),
                    dels: Vec::new(),
                    increases: Vec::new(),
                    duration: None,
                };
                while !cur.at_rparen() {
                    let (key, kl, kc) = cur.expect_symbol()?;
                    match key.as_str() {
                        ":parameters" => {
                            cur.expect_lparen()?;
                            schema.params = parse_typed_list(&mut cur, true)?;
                            cur.expect_rparen()?;
                        }
                        ":precondition" => {
                            schema.precondition = parse_conjunction(&mut cur)?;
                        }
                        ":effect" => {
                            parse_effect(
                                &mut cur,
                                &mut schema.adds,
                                &mut schema.dels,
                                &mut schema.increases,
                            )?;
                        }
                        ":duration" => {
                            schema.duration = Some(parse_number(&mut cur)?);
                        }
                        other => {
                            return Err(PddlError::at(
                                kl,
                                kc,
                                format!("unknown action key `{other}`"),
                            ))
                        }
                    }
                }
                cur.expect_rparen()?;
                check_types_declared(&ast, &schema.params, al, ac, &schema.name)?;
                check_vars_declared(&schema, al, ac)?;
                for add in &schema.adds {
                    if schema.dels.contains(add) {
                        return Err(PddlError::at(
                            al,
                            ac,
                            format!("action `{}` both adds and deletes {add}", schema.name),
                        ));
                    }
                }
                if ast.actions.iter().any(|a| a.name == schema.name) {
                    return Err(PddlError::at(
                        al,
                        ac,
                        format!("duplicate action `{}`", schema.name),
                    ));
                }
                ast.actions.push(schema);
            }
            other => {
                return Err(PddlError::at(
                    open.line,
                    open.col,
                    format!("unknown domain section `{other}`"),
                ))
            }
        }
    }
    cur.expect_rparen()?;
    cur.finish()?;
    Ok(ast)
}

/// Types must be declared before use, so declarations can report the
/// offending construct's position.
fn check_types_declared(
    ast: &DomainAst,
    params: &[TypedName],
    line: u32,
    col: u32,
    what: &str,
) -> Result<(), PddlError> {
    let known = ast.known_types();
    for p in params {
        if !known.contains(&p.ty.as_str()) {
            return Err(PddlError::at(
                line,
                col,
                format!("undeclared type `{}` in `{what}`", p.ty),
            ));
        }
    }
    Ok(())
}

/// Parse a problem file into its AST.
pub fn parse_problem(text: &str) -> Result<ProblemAst, PddlError> {
    let mut cur = Cursor::new(text)?;
    let mut ast = ProblemAst::default();

    cur.expect_lparen()?;
    cur.expect_keyword("define")?;
    cur.expect_lparen()?;
    cur.expect_keyword("problem")?;
    let (name, _, _) = cur.expect_symbol()?;
    ast.name = name;
    cur.expect_rparen()?;

    while !cur.at_rparen() {
        let open = cur.expect_lparen()?;
        let (section, _, _) = cur.expect_symbol()?;
        match section.as_str() {
            ":domain" => {
                let (dname, _, _) = cur.expect_symbol()?;
                ast.domain = dname;
                cur.expect_rparen()?;
            }
            ":objects" => {
                ast.objects = parse_typed_list(&mut cur, false)?;
                cur.expect_rparen()?;
            }
            ":init" => {
                while !cur.at_rparen() {
                    let inner = cur.expect_lparen()?;
                    let (head, _, _) = peek_symbol(&cur, &inner)?;
                    if head == "=" {
                        cur.expect_symbol()?;
                        let fluent = parse_fluent_ref(&mut cur)?;
                        let v = parse_number(&mut cur)?;
                        cur.expect_rparen()?;
                        for t in &fluent.terms {
                            if matches!(t, Term::Var(_)) {
                                return Err(PddlError::at(
                                    inner.line,
                                    inner.col,
                                    "init fluent must be ground".to_string(),
                                ));
                            }
                        }
                        ast.numeric_init.push((fluent, v));
                    } else {
                        let atom = parse_atom_body(&mut cur)?;
                        if !atom.is_ground() {
                            return Err(PddlError::at(
                                inner.line,
                                inner.col,
                                format!("init atom {atom} must be ground"),
                            ));
                        }
                        ast.init.push(atom);
                    }
                }
                cur.expect_rparen()?;
            }
            ":goal" => {
                let open_goal = cur.peek().cloned().unwrap_or(open.clone());
                let lits = parse_conjunction(&mut cur)?;
                cur.expect_rparen()?;
                if lits.is_empty() {
                    return Err(PddlError::at(
                        open_goal.line,
                        open_goal.col,
                        "empty goal".to_string(),
                    ));
                }
                for l in lits {
                    if !l.positive {
                        return Err(PddlError::at(
                            open_goal.line,
                            open_goal.col,
                            "negative goals are not supported".to_string(),
                        ));
                    }
                    if !l.atom.is_ground() {
                        return Err(PddlError::at(
                            open_goal.line,
                            open_goal.col,
                            format!("goal atom {} must be ground", l.atom),
                        ));
                    }
                    // Objects precede the goal, so references check here.
                    for t in &l.atom.terms {
                        if let Term::Const(c) = t {
                            if !ast.objects.iter().any(|o| &o.name == c) {
                                return Err(PddlError::at(
                                    open_goal.line,
                                    open_goal.col,
                                    format!("goal references undeclared object `{c}`"),
                                ));
                            }
                        }
                    }
                    ast.goal.push(l.atom);
                }
            }
            ":metric" => {
                cur.expect_keyword("minimize")?;
                let f = parse_fluent_ref(&mut cur)?;
                if f.name != "total-cost" || !f.terms.is_empty() {
                    return Err(PddlError::at(
                        open.line,
                        open.col,
                        "only `minimize (total-cost)` is supported".to_string(),
                    ));
                }
                ast.metric_minimize_total_cost = true;
                cur.expect_rparen()?;
            }
            other => {
                return Err(PddlError::at(
                    open.line,
                    open.col,
                    format!("unknown problem section `{other}`"),
                ))
            }
        }
    }
    cur.expect_rparen()?;
    cur.finish()?;
    Ok(ast)
}
