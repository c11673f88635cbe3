//! CPLEX-style LP text files.
//!
//! The writer emits exact decimal expansions, so every coefficient and bound
//! survives a round trip unchanged. The reader understands the subset the
//! writer produces plus the usual spelling variants of section headers, and
//! rebuilds the instance index when the variable names follow the
//! `x_i_j_k` / `act_i_j` convention.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::instance::Dims;
use crate::milp::{Constraint, MilpModel, Relation, VarIndex, VarKind, Variable};
use crate::rational::Rational;

const MAX_LINE: usize = 200;

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("{location}: {value} has no finite decimal expansion; scale the instance first")]
    NonDecimalRational { location: String, value: Rational },
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct LpParseError {
    pub line: usize,
    pub message: String,
}

fn decimal(value: &Rational, location: impl FnOnce() -> String) -> Result<String, ExportError> {
    value
        .to_exact_decimal()
        .ok_or_else(|| ExportError::NonDecimalRational { location: location(), value: value.clone() })
}

/// Appends `terms` to `out`, wrapping long lines with an indented
/// continuation.
fn write_terms(
    out: &mut String,
    line: &mut String,
    model: &MilpModel,
    terms: &[(usize, Rational)],
    location: &str,
) -> Result<(), ExportError> {
    let push = |out: &mut String, line: &mut String, piece: String| {
        if line.len() + piece.len() > MAX_LINE && !line.trim().is_empty() {
            out.push_str(line.trim_end());
            out.push('\n');
            line.clear();
            line.push_str("   ");
        }
        line.push_str(&piece);
    };
    let live: Vec<&(usize, Rational)> = terms.iter().filter(|(_, c)| !c.is_zero()).collect();
    if live.is_empty() {
        let first = model.variables.first().map_or("x", |v| v.name.as_str());
        push(out, line, format!(" 0 {first}"));
        return Ok(());
    }
    for (n, (v, c)) in live.into_iter().enumerate() {
        let name = &model.variables[*v].name;
        let mag = decimal(&c.abs(), || format!("{location}, coefficient of {name}"))?;
        let sign = match (n, c.is_negative()) {
            (0, false) => "",
            (0, true) => "-",
            (_, false) => "+ ",
            (_, true) => "- ",
        };
        let coef = if mag == "1" { String::new() } else { format!("{mag} ") };
        push(out, line, format!(" {sign}{coef}{name}"));
    }
    Ok(())
}

/// Renders `model` as an LP document.
pub fn write_lp(model: &MilpModel) -> Result<String, ExportError> {
    let mut out = String::new();
    writeln!(out, "\\ Problem: {}", model.name).unwrap();
    out.push_str("Minimize\n");
    let mut line = String::from(" obj:");
    write_terms(&mut out, &mut line, model, &model.objective, "objective")?;
    out.push_str(&line);
    out.push('\n');

    out.push_str("Subject To\n");
    for c in &model.constraints {
        let mut line = format!(" {}:", c.name);
        write_terms(&mut out, &mut line, model, &c.terms, &c.name)?;
        let rhs = decimal(&c.rhs, || format!("{}, right-hand side", c.name))?;
        write!(line, " {} {rhs}", c.relation).unwrap();
        out.push_str(&line);
        out.push('\n');
    }

    out.push_str("Bounds\n");
    for v in model.variables.iter().filter(|v| v.kind != VarKind::Binary) {
        let lo = decimal(&v.lower, || format!("lower bound of {}", v.name))?;
        match &v.upper {
            Some(u) if *u == v.lower => writeln!(out, " {} = {lo}", v.name).unwrap(),
            Some(u) => {
                let up = decimal(u, || format!("upper bound of {}", v.name))?;
                writeln!(out, " {lo} <= {} <= {up}", v.name).unwrap();
            }
            None => writeln!(out, " {} >= {lo}", v.name).unwrap(),
        }
    }

    for (header, kind) in [("General", VarKind::Integer), ("Binary", VarKind::Binary)] {
        let names: Vec<&str> =
            model.variables.iter().filter(|v| v.kind == kind).map(|v| v.name.as_str()).collect();
        if names.is_empty() {
            continue;
        }
        out.push_str(header);
        out.push('\n');
        for chunk in names.chunks(8) {
            writeln!(out, " {}", chunk.join(" ")).unwrap();
        }
    }
    out.push_str("End\n");
    Ok(out)
}

/// Writes `model` to `path`.
pub fn export_lp(model: &MilpModel, path: &Path) -> Result<(), ExportError> {
    let text = write_lp(model)?;
    std::fs::write(path, text).map_err(|source| ExportError::Io { path: path.display().to_string(), source })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Number(Rational),
    Colon,
    Plus,
    Minus,
    Rel(Relation),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Objective,
    Constraints,
    Bounds,
    General,
    Binary,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, LpParseError> {
    let mut toks = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('\\').next().unwrap_or("");
        let chars: Vec<char> = body.chars().collect();
        let mut p = 0;
        while p < chars.len() {
            let ch = chars[p];
            let two: String = chars[p..(p + 2).min(chars.len())].iter().collect();
            let (tok, len) = match ch {
                _ if ch.is_whitespace() => {
                    p += 1;
                    continue;
                }
                ':' => (Tok::Colon, 1),
                '+' => (Tok::Plus, 1),
                '-' => (Tok::Minus, 1),
                '<' | '>' | '=' => {
                    let (rel, len) = match two.as_str() {
                        "<=" | "=<" => (Relation::Le, 2),
                        ">=" | "=>" => (Relation::Ge, 2),
                        _ if ch == '<' => (Relation::Le, 1),
                        _ if ch == '>' => (Relation::Ge, 1),
                        _ => (Relation::Eq, 1),
                    };
                    (Tok::Rel(rel), len)
                }
                _ if ch.is_ascii_digit() || ch == '.' => {
                    let end = (p..chars.len()).find(|&q| !(chars[q].is_ascii_digit() || chars[q] == '.')).unwrap_or(chars.len());
                    let lit: String = chars[p..end].iter().collect();
                    if end < chars.len() && chars[end].is_alphabetic() {
                        return Err(LpParseError { line, message: format!("unsupported number `{lit}{}`", chars[end]) });
                    }
                    let value = lit
                        .parse::<Rational>()
                        .map_err(|_| LpParseError { line, message: format!("bad number `{lit}`") })?;
                    (Tok::Number(value), end - p)
                }
                _ if ch.is_alphabetic() || "_!\"#$%&()/,;?@'`{}|~[]".contains(ch) => {
                    let end = (p..chars.len())
                        .find(|&q| chars[q].is_whitespace() || ":+-<>=\\".contains(chars[q]))
                        .unwrap_or(chars.len());
                    (Tok::Word(chars[p..end].iter().collect()), end - p)
                }
                _ => return Err(LpParseError { line, message: format!("unexpected character `{ch}`") }),
            };
            toks.push((line, tok));
            p += len;
        }
    }
    Ok(toks)
}

struct Reader {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    names: HashMap<String, usize>,
    variables: Vec<Variable>,
    bounded: Vec<bool>,
}

/// Sparse `(variable, coefficient)` pairs.
type Terms = Vec<(usize, Rational)>;

impl Reader {
    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map_or(1, |t| t.0)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, LpParseError> {
        Err(LpParseError { line: self.line(), message: message.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn peek_at(&self, ahead: usize) -> Option<&Tok> {
        self.toks.get(self.pos + ahead).map(|t| &t.1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }

    /// The section header starting at the cursor and its token length.
    fn header(&self) -> Result<Option<(Section, usize)>, LpParseError> {
        let word = |ahead: usize| match self.peek_at(ahead) {
            Some(Tok::Word(w)) => Some(w.to_ascii_lowercase()),
            _ => None,
        };
        let Some(w) = word(0) else { return Ok(None) };
        // A name followed by a colon is a label, never a header.
        if self.peek_at(1) == Some(&Tok::Colon) {
            return Ok(None);
        }
        let joined = matches!(word(1).as_deref(), Some("to" | "that"));
        Ok(Some(match w.as_str() {
            "minimize" | "minimise" | "minimum" | "min" => (Section::Objective, 1),
            "maximize" | "maximise" | "maximum" | "max" => return self.err("maximization models are not supported"),
            "subject" | "such" if joined => (Section::Constraints, 2),
            "st" | "s.t." | "st." => (Section::Constraints, 1),
            "bounds" | "bound" => (Section::Bounds, 1),
            "general" | "generals" | "gen" | "integer" | "integers" => (Section::General, 1),
            "binary" | "binaries" | "bin" => (Section::Binary, 1),
            "end" => (Section::End, 1),
            _ => return Ok(None),
        }))
    }

    /// Consumes a section header if one starts here.
    fn section(&mut self) -> Result<Option<Section>, LpParseError> {
        let found = self.header()?;
        Ok(found.map(|(section, len)| {
            self.pos += len;
            section
        }))
    }

    fn var(&mut self, name: &str) -> usize {
        if let Some(&v) = self.names.get(name) {
            return v;
        }
        let v = self.variables.len();
        self.names.insert(name.to_string(), v);
        self.variables.push(Variable {
            name: name.to_string(),
            kind: VarKind::Continuous,
            lower: Rational::zero(),
            upper: None,
        });
        self.bounded.push(false);
        v
    }

    /// `[label:] term*` where a term is `[+|-] [number] name`.
    fn expression(&mut self) -> Result<(Option<String>, Terms), LpParseError> {
        let mut label = None;
        if let (Some(Tok::Word(w)), Some(Tok::Colon)) = (self.peek(), self.peek_at(1)) {
            label = Some(w.clone());
            self.pos += 2;
        }
        let mut terms: Vec<(usize, Rational)> = Vec::new();
        loop {
            let mut sign = Rational::one();
            let mut signed = false;
            while let Some(t @ (Tok::Plus | Tok::Minus)) = self.peek() {
                if *t == Tok::Minus {
                    sign = -sign;
                }
                signed = true;
                self.pos += 1;
            }
            if !signed && !terms.is_empty() {
                break;
            }
            let coef = match self.peek() {
                Some(Tok::Number(c)) => {
                    let c = c.clone();
                    self.pos += 1;
                    if !matches!(self.peek(), Some(Tok::Word(_))) || self.section_ahead() {
                        self.pos -= 1;
                        return self.err("constant terms are not supported in expressions");
                    }
                    Some(c)
                }
                _ => None,
            };
            match self.peek() {
                Some(Tok::Word(_)) if coef.is_none() && self.section_ahead() => {
                    if signed {
                        return self.err("dangling sign before section header");
                    }
                    break;
                }
                Some(Tok::Word(w)) => {
                    let name = w.clone();
                    self.pos += 1;
                    let v = self.var(&name);
                    let c = coef.map_or(sign.clone(), |coef| &sign * &coef);
                    match terms.iter_mut().find(|(u, _)| *u == v) {
                        Some((_, acc)) => *acc += &c,
                        None => terms.push((v, c)),
                    }
                }
                _ if signed => return self.err("expected a variable after sign"),
                _ => break,
            }
        }
        terms.retain(|(_, c)| !c.is_zero());
        Ok((label, terms))
    }

    fn section_ahead(&self) -> bool {
        !matches!(self.header(), Ok(None))
    }

    fn signed_number(&mut self) -> Result<Rational, LpParseError> {
        let mut sign = Rational::one();
        while let Some(t @ (Tok::Plus | Tok::Minus)) = self.peek() {
            if *t == Tok::Minus {
                sign = -sign;
            }
            self.pos += 1;
        }
        match self.next() {
            Some(Tok::Number(n)) => Ok(&sign * &n),
            Some(Tok::Word(w)) if w.eq_ignore_ascii_case("inf") || w.eq_ignore_ascii_case("infinity") => {
                self.pos -= 1;
                self.err("infinite bounds must be written by omission")
            }
            _ => {
                self.pos -= 1;
                self.err("expected a number")
            }
        }
    }

    fn relation(&mut self) -> Result<Relation, LpParseError> {
        match self.next() {
            Some(Tok::Rel(r)) => Ok(r),
            _ => {
                self.pos -= 1;
                self.err("expected a relation")
            }
        }
    }

    fn bound(&mut self) -> Result<(), LpParseError> {
        let set = |r: &mut Reader, v: usize, rel: Relation, value: Rational| -> Result<(), LpParseError> {
            r.bounded[v] = true;
            let var = &mut r.variables[v];
            match rel {
                Relation::Le => var.upper = Some(value),
                Relation::Ge => var.lower = value,
                Relation::Eq => {
                    var.lower = value.clone();
                    var.upper = Some(value);
                }
            }
            Ok(())
        };
        let flip = |rel: Relation| match rel {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        };
        match self.peek() {
            Some(Tok::Word(w)) => {
                let name = w.clone();
                self.pos += 1;
                let v = self.var(&name);
                if let Some(Tok::Word(f)) = self.peek() {
                    if f.eq_ignore_ascii_case("free") {
                        return self.err(format!("free variable `{name}` is not supported"));
                    }
                }
                let rel = self.relation()?;
                let value = self.signed_number()?;
                set(self, v, rel, value)
            }
            _ => {
                let lo = self.signed_number()?;
                let r1 = self.relation()?;
                let Some(Tok::Word(name)) = self.next() else {
                    self.pos -= 1;
                    return self.err("expected a variable name in bound");
                };
                let v = self.var(&name);
                set(self, v, flip(r1), lo)?;
                if let Some(Tok::Rel(_)) = self.peek() {
                    let r2 = self.relation()?;
                    let hi = self.signed_number()?;
                    set(self, v, r2, hi)?;
                }
                Ok(())
            }
        }
    }
}

/// Parses an LP document into a model. Variables default to `[0, inf)`.
pub fn parse_lp(text: &str) -> Result<MilpModel, LpParseError> {
    let mut name = String::from("model");
    for line in text.lines() {
        if let Some(rest) = line.trim_start().strip_prefix("\\ Problem:") {
            name = rest.trim().to_string();
            break;
        }
    }
    let mut r = Reader { toks: tokenize(text)?, pos: 0, names: HashMap::new(), variables: Vec::new(), bounded: Vec::new() };
    let mut objective = None;
    let mut constraints = Vec::new();
    let mut section = match r.section()? {
        Some(Section::Objective) => Section::Objective,
        _ => return r.err("expected `Minimize`"),
    };
    let mut integers = Vec::new();
    let mut binaries = Vec::new();

    while section != Section::End {
        if r.peek().is_none() {
            return r.err("missing `End`");
        }
        if let Some(next) = r.section()? {
            section = next;
            continue;
        }
        match section {
            Section::Objective => {
                if objective.is_some() {
                    return r.err("only one objective is allowed");
                }
                objective = Some(r.expression()?.1);
            }
            Section::Constraints => {
                let (label, terms) = r.expression()?;
                let relation = r.relation()?;
                let rhs = r.signed_number()?;
                let name = label.unwrap_or_else(|| format!("c{}", constraints.len() + 1));
                constraints.push(Constraint { name, terms, relation, rhs });
            }
            Section::Bounds => r.bound()?,
            Section::General | Section::Binary => match r.next() {
                Some(Tok::Word(w)) => {
                    let v = r.var(&w);
                    if section == Section::General { integers.push(v) } else { binaries.push(v) }
                }
                _ => {
                    r.pos -= 1;
                    return r.err("expected a variable name");
                }
            },
            Section::End => unreachable!(),
        }
    }
    if r.peek().is_some() {
        return r.err("content after `End`");
    }

    for v in integers {
        r.variables[v].kind = VarKind::Integer;
    }
    for v in binaries {
        let var = &mut r.variables[v];
        var.kind = VarKind::Binary;
        if !r.bounded[v] {
            var.upper = Some(Rational::one());
        }
    }
    for var in &r.variables {
        if var.lower.is_negative() {
            return Err(LpParseError { line: 0, message: format!("negative lower bound on `{}`", var.name) });
        }
    }

    let model = MilpModel {
        name,
        variables: r.variables,
        constraints,
        objective: objective.unwrap_or_default(),
        index: None,
    };
    Ok(canonicalize(model))
}

fn indices(name: &str, prefix: &str, arity: usize) -> Option<Vec<usize>> {
    let parts: Vec<usize> = name.strip_prefix(prefix)?.split('_').map(|p| p.parse().ok()).collect::<Option<_>>()?;
    (parts.len() == arity && parts.iter().all(|&p| p >= 1)).then_some(parts)
}

/// Reorders variables into the instance layout when the names form a
/// complete `x_i_j_k` / `act_i_j` family.
fn canonicalize(model: MilpModel) -> MilpModel {
    let mut dims = (0, 0, 0);
    for v in &model.variables {
        if let Some(p) = indices(&v.name, "x_", 3) {
            dims = (dims.0.max(p[0]), dims.1.max(p[1]), dims.2.max(p[2]));
        }
    }
    if dims.0 == 0 {
        return model;
    }
    let index = VarIndex { dims: Dims::new(dims.0, dims.1, dims.2) };
    if model.num_vars() != index.num_x() + index.num_act() {
        return model;
    }
    let mut perm = vec![usize::MAX; model.num_vars()];
    for (old, v) in model.variables.iter().enumerate() {
        let new = if let Some(p) = indices(&v.name, "x_", 3) {
            index.x(p[0] - 1, p[1] - 1, p[2] - 1)
        } else if let Some(p) = indices(&v.name, "act_", 2) {
            if p[0] > dims.0 || p[1] > dims.1 {
                return model;
            }
            index.act(p[0] - 1, p[1] - 1)
        } else {
            return model;
        };
        if perm.contains(&new) {
            return model;
        }
        perm[old] = new;
    }
    let mut variables = vec![None; model.num_vars()];
    for (old, v) in model.variables.into_iter().enumerate() {
        variables[perm[old]] = Some(v);
    }
    let remap = |terms: Vec<(usize, Rational)>| terms.into_iter().map(|(v, c)| (perm[v], c)).collect();
    MilpModel {
        name: model.name,
        variables: variables.into_iter().map(|v| v.expect("permutation")).collect(),
        constraints: model
            .constraints
            .into_iter()
            .map(|c| Constraint { terms: remap(c.terms), ..c })
            .collect(),
        objective: remap(model.objective),
        index: Some(index),
    }
}
