//! Recursive-descent parser for the GGD text format:
//!
//! ```text
//! ggd name {
//!   source { (p:Person)-[w:worksAt]->(c:Company) }
//!   where  { absdiff(p.age, 40) <= 30; }
//!   target { (c)-[l:locatedIn]->(x:City) }
//!   having { }
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};

use super::{AttrRef, CmpOp, Constraint, DistanceFn, Ggd, GgdSet, GraphPattern, Label, PatternEdge, PatternVertex};
use crate::graph::Value;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Num(String),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 17] = [
    "->", "<=", ">=", "!=", "{", "}", "(", ")", "[", "]", ",", ";", ":", ".", "=", "<", ">",
];

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, message: String| ParseError { line, col, message };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                *i += 1;
            }
        };
        if c.is_whitespace() {
            advance(1, &mut i);
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(1, &mut i);
            }
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                advance(1, &mut i);
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: tl,
                col: tc,
            });
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(1, &mut i);
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                advance(1, &mut i);
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance(1, &mut i);
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    advance(j - i, &mut i);
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        advance(1, &mut i);
                    }
                }
            }
            out.push(Token {
                tok: Tok::Num(chars[start..i].iter().collect()),
                line: tl,
                col: tc,
            });
        } else if c == '"' {
            advance(1, &mut i);
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(err(tl, tc, "unterminated string".into())),
                    Some('"') => {
                        advance(1, &mut i);
                        break;
                    }
                    Some('\\') => {
                        let e = match chars.get(i + 1) {
                            Some('n') => '\n',
                            Some('t') => '\t',
                            Some(&e @ ('"' | '\\')) => e,
                            _ => return Err(err(line, col, "invalid escape in string".into())),
                        };
                        s.push(e);
                        advance(2, &mut i);
                    }
                    Some(&ch) => {
                        s.push(ch);
                        advance(1, &mut i);
                    }
                }
            }
            out.push(Token {
                tok: Tok::Str(s),
                line: tl,
                col: tc,
            });
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let sym = SYMBOLS
                .iter()
                .find(|s| rest.starts_with(**s))
                .copied()
                .or((c == '-').then_some("-"));
            let Some(sym) = sym else {
                return Err(err(tl, tc, format!("unexpected character `{c}`")));
            };
            advance(sym.chars().count(), &mut i);
            out.push(Token {
                tok: Tok::Sym(sym),
                line: tl,
                col: tc,
            });
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

/// A vertex mentioned in a pattern, possibly before its label is known.
struct Mention {
    var: String,
    label: Option<Label>,
    line: usize,
    col: usize,
}

enum Term {
    Attr(AttrRef),
    Const(Value),
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at<T>(&self, t: &Token, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            line: t.line,
            col: t.col,
            message: message.into(),
        })
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Num(s) => format!("number `{s}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect_sym(&mut self, s: &'static str) -> Result<Token, ParseError> {
        let t = self.next();
        if t.tok == Tok::Sym(s) {
            Ok(t)
        } else {
            self.err_at(&t, format!("expected `{s}`, found {}", Self::describe(&t.tok)))
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek().tok, Tok::Sym(x) if x == s)
    }

    fn ident(&mut self, what: &str) -> Result<(String, Token), ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.clone())),
            other => self.err_at(&t, format!("expected {what}, found {}", Self::describe(other))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(()),
            other => self.err_at(&t, format!("expected `{kw}`, found {}", Self::describe(other))),
        }
    }

    fn label(&mut self) -> Result<Label, ParseError> {
        if self.is_sym("-") {
            self.next();
            return Ok(Label::Wildcard);
        }
        let (s, _) = self.ident("a label or `-`")?;
        Ok(Label::Named(s))
    }

    fn ggd(&mut self) -> Result<(Ggd, Token), ParseError> {
        self.keyword("ggd")?;
        let (name, name_tok) = self.ident("a GGD name")?;
        self.expect_sym("{")?;
        self.keyword("source")?;
        let source = self.pattern(None)?;
        self.keyword("where")?;
        let scope: BTreeSet<String> = source.var_set();
        let source_constraints = self.constraints(&scope, "source")?;
        self.keyword("target")?;
        let target = self.pattern(Some(&source))?;
        self.keyword("having")?;
        let scope: BTreeSet<String> = scope.union(&target.var_set()).cloned().collect();
        let target_constraints = self.constraints(&scope, "source or target")?;
        self.expect_sym("}")?;
        let ggd = Ggd {
            name,
            source,
            source_constraints,
            target,
            target_constraints,
        };
        Ok((ggd, name_tok))
    }

    fn pattern(&mut self, source: Option<&GraphPattern>) -> Result<GraphPattern, ParseError> {
        self.expect_sym("{")?;
        let mut mentions: Vec<Mention> = Vec::new();
        let mut edges: Vec<(PatternEdge, Token)> = Vec::new();
        while !self.is_sym("}") {
            if !mentions.is_empty() || !edges.is_empty() {
                self.expect_sym(",")?;
            }
            let first = self.vertex_mention(&mut mentions)?;
            if self.is_sym("-") {
                self.next();
                self.expect_sym("[")?;
                let (evar, etok) = self.ident("an edge variable")?;
                self.expect_sym(":")?;
                let label = self.label()?;
                self.expect_sym("]")?;
                self.expect_sym("->")?;
                let second = self.vertex_mention(&mut mentions)?;
                edges.push((
                    PatternEdge {
                        var: evar,
                        label,
                        from: first,
                        to: second,
                    },
                    etok,
                ));
            }
        }
        self.expect_sym("}")?;
        let mut p = GraphPattern::default();
        for m in mentions {
            let label = match m.label {
                Some(l) => l,
                None => match source.and_then(|s| s.vertices.iter().find(|v| v.var == m.var)) {
                    Some(v) => v.label.clone(),
                    None => {
                        return Err(ParseError {
                            line: m.line,
                            col: m.col,
                            message: format!("undeclared vertex `{}`", m.var),
                        })
                    }
                },
            };
            p.vertices.push(PatternVertex { var: m.var, label });
        }
        let vertex_vars: BTreeSet<&str> = p.vertices.iter().map(|v| v.var.as_str()).collect();
        let mut edge_vars = BTreeSet::new();
        for (e, tok) in &edges {
            if vertex_vars.contains(e.var.as_str()) || !edge_vars.insert(e.var.clone()) {
                return self.err_at(tok, format!("variable `{}` declared twice", e.var));
            }
        }
        p.edges = edges.into_iter().map(|(e, _)| e).collect();
        if let Some(src) = source {
            for v in &p.vertices {
                if let Some(sv) = src.vertices.iter().find(|s| s.var == v.var) {
                    if !sv.label.compatible(&v.label) {
                        return Err(ParseError {
                            line: self.peek().line,
                            col: self.peek().col,
                            message: format!(
                                "label clash on shared variable `{}`: `{}` vs `{}`",
                                v.var, sv.label, v.label
                            ),
                        });
                    }
                }
            }
        }
        Ok(p)
    }

    /// Parses `(v)` or `(v:L)` and records it; returns the variable.
    fn vertex_mention(&mut self, mentions: &mut Vec<Mention>) -> Result<String, ParseError> {
        self.expect_sym("(")?;
        let (var, tok) = self.ident("a vertex variable")?;
        let label = if self.is_sym(":") {
            self.next();
            Some(self.label()?)
        } else {
            None
        };
        self.expect_sym(")")?;
        match mentions.iter_mut().find(|m| m.var == var) {
            Some(m) => match (&m.label, label) {
                (Some(a), Some(b)) if *a != b => {
                    return self.err_at(&tok, format!("vertex `{var}` declared with labels `{a}` and `{b}`"));
                }
                (None, Some(b)) => m.label = Some(b),
                _ => {}
            },
            None => mentions.push(Mention {
                var: var.clone(),
                label,
                line: tok.line,
                col: tok.col,
            }),
        }
        Ok(var)
    }

    fn constraints(&mut self, scope: &BTreeSet<String>, side: &str) -> Result<Vec<Constraint>, ParseError> {
        self.expect_sym("{")?;
        let mut out = Vec::new();
        while !self.is_sym("}") {
            out.push(self.constraint(scope, side)?);
            self.expect_sym(";")?;
        }
        self.expect_sym("}")?;
        Ok(out)
    }

    fn check_var(&self, var: &str, tok: &Token, scope: &BTreeSet<String>, side: &str) -> Result<(), ParseError> {
        if scope.contains(var) {
            Ok(())
        } else {
            self.err_at(tok, format!("undeclared variable `{var}` (not in the {side} pattern)"))
        }
    }

    fn constraint(&mut self, scope: &BTreeSet<String>, side: &str) -> Result<Constraint, ParseError> {
        let start = self.peek().clone();
        let (name, _) = self.ident("a constraint")?;
        if self.is_sym("(") {
            let Some(dist) = DistanceFn::from_name(&name) else {
                return self.err_at(&start, format!("unknown distance function `{name}`"));
            };
            self.next();
            let left = self.term(scope, side)?;
            self.expect_sym(",")?;
            let right = self.term(scope, side)?;
            self.expect_sym(")")?;
            let op = self.op()?;
            let tt = self.peek().clone();
            let threshold = match self.number()? {
                Value::Integer(i) => i as f64,
                Value::Number(x) => x,
                _ => unreachable!(),
            };
            if threshold < 0.0 {
                return self.err_at(&tt, "threshold must be non-negative");
            }
            return match (left, right) {
                (Term::Attr(a), Term::Const(c)) | (Term::Const(c), Term::Attr(a)) => Ok(Constraint::ConstVsAttr {
                    distance: dist,
                    attr: a,
                    constant: c,
                    op,
                    threshold,
                }),
                (Term::Attr(l), Term::Attr(r)) => Ok(Constraint::AttrVsAttr {
                    distance: dist,
                    left: l,
                    right: r,
                    op,
                    threshold,
                }),
                (Term::Const(_), Term::Const(_)) => self.err_at(&start, "a constraint needs at least one attribute"),
            };
        }
        self.check_var(&name, &start, scope, side)?;
        let t = self.next();
        let eq = match t.tok {
            Tok::Sym("=") => true,
            Tok::Sym("!=") => false,
            ref other => {
                return self.err_at(
                    &t,
                    format!("expected `(`, `=` or `!=`, found {}", Self::describe(other)),
                )
            }
        };
        let (other, otok) = self.ident("a variable")?;
        self.check_var(&other, &otok, scope, side)?;
        Ok(if eq {
            Constraint::IdentEq(name, other)
        } else {
            Constraint::IdentNeq(name, other)
        })
    }

    fn term(&mut self, scope: &BTreeSet<String>, side: &str) -> Result<Term, ParseError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Str(s) => {
                self.next();
                Ok(Term::Const(Value::Text(s.clone())))
            }
            Tok::Num(_) | Tok::Sym("-") => Ok(Term::Const(self.number()?)),
            Tok::Ident(b) if (b == "true" || b == "false") && *self.peek_at(1) != Tok::Sym(".") => {
                self.next();
                Ok(Term::Const(Value::Boolean(b == "true")))
            }
            Tok::Ident(var) => {
                let var = var.clone();
                self.next();
                self.check_var(&var, &t, scope, side)?;
                self.expect_sym(".")?;
                let (key, _) = self.ident("a property key")?;
                Ok(Term::Attr(AttrRef { var, key }))
            }
            other => self.err_at(&t, format!("expected a term, found {}", Self::describe(other))),
        }
    }

    fn number(&mut self) -> Result<Value, ParseError> {
        let neg = if self.is_sym("-") {
            self.next();
            true
        } else {
            false
        };
        let t = self.next();
        let Tok::Num(s) = &t.tok else {
            return self.err_at(&t, format!("expected a number, found {}", Self::describe(&t.tok)));
        };
        let s = if neg { format!("-{s}") } else { s.clone() };
        if let Ok(i) = s.parse::<i64>() {
            return Ok(Value::Integer(i));
        }
        match s.parse::<f64>().ok().and_then(Value::number) {
            Some(v) => Ok(v),
            None => self.err_at(&t, format!("number `{s}` is out of range")),
        }
    }

    fn op(&mut self) -> Result<CmpOp, ParseError> {
        let t = self.next();
        let op = match t.tok {
            Tok::Sym(s) => CmpOp::ALL.into_iter().find(|o| o.symbol() == s),
            _ => None,
        };
        match op {
            Some(op) => Ok(op),
            None => self.err_at(
                &t,
                format!("expected a comparison operator, found {}", Self::describe(&t.tok)),
            ),
        }
    }
}

/// Parses a sequence of `ggd` blocks.
pub fn parse_ggds(text: &str) -> Result<GgdSet, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let mut ggds = Vec::new();
    let mut names: BTreeMap<String, ()> = BTreeMap::new();
    while p.peek().tok != Tok::Eof {
        let (g, tok) = p.ggd()?;
        if names.insert(g.name.clone(), ()).is_some() {
            return p.err_at(&tok, format!("duplicate GGD name `{}`", g.name));
        }
        if let Err(e) = g.check() {
            return p.err_at(&tok, format!("{}: {e}", g.name));
        }
        ggds.push(g);
    }
    Ok(GgdSet { ggds })
}
