//! The sectioned `.model` text format.
//!
//! ```text
//! [model]
//! name = P3|4
//!
//! [options]
//! order = 8
//!
//! [variables]
//! z1 even
//! l1 even invertible weight 1
//! xi1 odd weight 1
//!
//! [constants]
//! c11_11
//!
//! [bivector]
//! z1 z2 := 2*l1*l2
//!
//! [relations]
//! comm z1 z2 = 2*l1*l2
//! ```
//!
//! Further sections: `[atlas]` (`factor l1 l2 : p m`), `[atlas.bivector]`,
//! `[fibration.variables]`, `[fibration.constants]`, `[fibration.relations]`,
//! `[fibration.map]` (`z1 := expr`), `[fibration.expect]`,
//! `[fibration.identities]` (`name := expr`), `[cy]` and `[aliases]`
//! (`l1 = lambda1`). `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;

use superstar::atlas::ProjectiveFactor;
use superstar::graded_ring::HBAR;
use superstar::models::{AtlasSpec, CyWeights, Fibration, ModelSpec, Relation, RelationKind};
use superstar::{GradedPoly, Parity, SuperBivector, VarTable};
use thiserror::Error;

use crate::expr::{ExprError, ExprParser};

pub const DEFAULT_ORDER: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{file}:{line}:{col}: {msg}")]
pub struct ModelFileError {
    pub file: String,
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

const SECTIONS: [&str; 16] = [
    "model",
    "options",
    "variables",
    "constants",
    "bivector",
    "relations",
    "atlas",
    "atlas.bivector",
    "fibration.variables",
    "fibration.constants",
    "fibration.relations",
    "fibration.map",
    "fibration.expect",
    "fibration.identities",
    "cy",
    "aliases",
];

/// One content line: number, column of its first character, and text.
#[derive(Clone, Debug)]
struct Line<'a> {
    no: usize,
    col: usize,
    text: &'a str,
}

struct Reader<'a> {
    file: &'a str,
    sections: BTreeMap<&'static str, (usize, Vec<Line<'a>>)>,
}

impl<'a> Reader<'a> {
    fn err(&self, line: usize, col: usize, msg: impl Into<String>) -> ModelFileError {
        ModelFileError {
            file: self.file.to_string(),
            line,
            col,
            msg: msg.into(),
        }
    }

    fn at(&self, l: &Line, offset: usize, msg: impl Into<String>) -> ModelFileError {
        self.err(l.no, l.col + offset, msg)
    }

    fn lines(&self, section: &str) -> &[Line<'a>] {
        self.sections.get(section).map(|(_, v)| v.as_slice()).unwrap_or(&[])
    }

    fn has(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn header_line(&self, section: &str) -> usize {
        self.sections.get(section).map(|(n, _)| *n).unwrap_or(1)
    }

    fn expr(&self, parser: &ExprParser, l: &Line, offset: usize, text: &str) -> Result<GradedPoly, ModelFileError> {
        parser.parse(text).map_err(|e| {
            let msg = match &e {
                ExprError::Syntax { msg, .. } => format!("syntax error: {msg}"),
                ExprError::UnknownIdentifier { name, .. } => format!("unknown identifier `{name}`"),
                ExprError::IllegalDivision { msg, .. } => format!("illegal division: {msg}"),
            };
            self.at(l, offset + e.column() - 1, msg)
        })
    }
}

/// Splits `text` on whitespace, keeping 0-based byte offsets.
fn words(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &text[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &text[s..]));
    }
    out
}

/// `(left, offset of right, right)` around the first `sep`.
fn split_once_at<'t>(text: &'t str, sep: &str) -> Option<(&'t str, usize, &'t str)> {
    let i = text.find(sep)?;
    let right = &text[i + sep.len()..];
    let lead = right.len() - right.trim_start().len();
    Some((text[..i].trim_end(), i + sep.len() + lead, right.trim()))
}

pub fn parse_model_file(path: &Path) -> Result<ModelSpec, ModelFileError> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| ModelFileError {
        file: name.clone(),
        line: 0,
        col: 0,
        msg: e.to_string(),
    })?;
    parse_model_str(&text, &name)
}

pub fn parse_model_str(text: &str, file: &str) -> Result<ModelSpec, ModelFileError> {
    let mut r = Reader {
        file,
        sections: BTreeMap::new(),
    };
    let mut current: Option<&'static str> = None;
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col = body.len() - body.trim_start().len() + 1;
        if let Some(inner) = trimmed.strip_prefix('[') {
            let Some(inner) = inner.strip_suffix(']') else {
                return Err(r.err(no, col, "unterminated section header"));
            };
            let Some(name) = SECTIONS.iter().find(|s| **s == inner.trim()) else {
                return Err(r.err(no, col, format!("unknown section `{}`", inner.trim())));
            };
            if r.sections.contains_key(name) {
                return Err(r.err(no, col, format!("section `{name}` repeated")));
            }
            r.sections.insert(name, (no, Vec::new()));
            current = Some(name);
            continue;
        }
        let Some(sec) = current else {
            return Err(r.err(no, col, "content before the first section"));
        };
        r.sections.get_mut(sec).unwrap().1.push(Line { no, col, text: trimmed });
    }
    build(&r)
}

fn key_value<'t>(r: &Reader, l: &Line<'t>) -> Result<(&'t str, usize, &'t str), ModelFileError> {
    split_once_at(l.text, "=").ok_or_else(|| r.at(l, 0, "expected `key = value`"))
}

fn build(r: &Reader) -> Result<ModelSpec, ModelFileError> {
    let mut name = None;
    for l in r.lines("model") {
        let (k, off, v) = key_value(r, l)?;
        match k {
            "name" if !v.is_empty() => name = Some(v.to_string()),
            "name" => return Err(r.at(l, off, "empty model name")),
            _ => return Err(r.at(l, 0, format!("unknown key `{k}`"))),
        }
    }
    let name = name.ok_or_else(|| r.err(r.header_line("model"), 1, "missing `name` in [model]"))?;

    let mut max_order = DEFAULT_ORDER;
    for l in r.lines("options") {
        let (k, off, v) = key_value(r, l)?;
        match k {
            "order" => max_order = v.parse().map_err(|_| r.at(l, off, "order must be a nonnegative integer"))?,
            _ => return Err(r.at(l, 0, format!("unknown option `{k}`"))),
        }
    }

    let mut weights = BTreeMap::new();
    let table = read_table(r, "variables", "constants", Some(&mut weights))?;

    let mut aliases = BTreeMap::new();
    for l in r.lines("aliases") {
        let (k, off, v) = key_value(r, l)?;
        if table.lookup(k).is_none() {
            return Err(r.at(l, 0, format!("unknown variable `{k}`")));
        }
        if v == HBAR || table.lookup(v).is_some() || !superstar::graded_ring::is_identifier(v) {
            return Err(r.at(l, off, format!("`{v}` cannot be an alias")));
        }
        aliases.insert(k.to_string(), v.to_string());
    }
    let parser = ExprParser::new(&table).with_aliases(&aliases);

    let bivector = read_bivector(r, "bivector", &table, &parser)?;
    let relations = read_relations(r, "relations", &table, &parser)?;

    let atlas = if r.has("atlas") || r.has("atlas.bivector") {
        let mut factors = Vec::new();
        for l in r.lines("atlas") {
            let ws = words(l.text);
            if ws.first().map(|w| w.1) != Some("factor") {
                return Err(r.at(l, 0, "expected `factor <coords> : <labels>`"));
            }
            let Some(colon) = ws.iter().position(|w| w.1 == ":") else {
                return Err(r.at(l, 0, "missing `:` before chart labels"));
            };
            let coords: Vec<&str> = ws[1..colon].iter().map(|w| w.1).collect();
            let labels: Vec<&str> = ws[colon + 1..].iter().map(|w| w.1).collect();
            if coords.len() < 2 || coords.len() != labels.len() {
                return Err(r.at(l, 0, "need at least two coordinates and one label per coordinate"));
            }
            for (off, c) in &ws[1..colon] {
                match table.lookup(c) {
                    Some(s) if s.invertible => {}
                    Some(_) => return Err(r.at(l, *off, format!("`{c}` must be invertible"))),
                    None => return Err(r.at(l, *off, format!("unknown variable `{c}`"))),
                }
            }
            factors.push(ProjectiveFactor::new(&coords, &labels));
        }
        let bivector = if r.has("atlas.bivector") {
            Some(read_bivector(r, "atlas.bivector", &table, &parser)?)
        } else {
            None
        };
        Some(AtlasSpec { factors, bivector })
    } else {
        None
    };

    let fib_sections = SECTIONS.iter().filter(|s| s.starts_with("fibration."));
    let fibration = if fib_sections.clone().any(|s| r.has(s)) {
        let base = read_table(r, "fibration.variables", "fibration.constants", None)?;
        let base_parser = ExprParser::new(&base);
        let base_relations = read_relations(r, "fibration.relations", &base, &base_parser)?;
        let mut map = Vec::new();
        for l in r.lines("fibration.map") {
            let (k, off, v) = split_once_at(l.text, ":=").ok_or_else(|| r.at(l, 0, "expected `var := expr`"))?;
            if table.lookup(k).is_none() {
                return Err(r.at(l, 0, format!("unknown variable `{k}`")));
            }
            map.push((k.to_string(), r.expr(&base_parser, l, off, v)?));
        }
        let expectations = read_relations(r, "fibration.expect", &table, &base_parser)?;
        let mut identities = Vec::new();
        for l in r.lines("fibration.identities") {
            let (k, off, v) = split_once_at(l.text, ":=").ok_or_else(|| r.at(l, 0, "expected `name := expr`"))?;
            if !superstar::graded_ring::is_identifier(k) {
                return Err(r.at(l, 0, format!("`{k}` is not a name")));
            }
            identities.push((k.to_string(), r.expr(&parser, l, off, v)?));
        }
        Some(Fibration {
            base,
            base_relations,
            map,
            expectations,
            identities,
        })
    } else {
        None
    };

    let mut cy = None;
    for l in r.lines("cy") {
        if cy.is_some() {
            return Err(r.at(l, 0, "only one weight declaration allowed"));
        }
        cy = Some(parse_cy_line(r, l)?);
    }

    let spec = ModelSpec {
        name,
        table,
        weights,
        bivector,
        relations,
        fibration,
        atlas,
        cy,
        max_order,
        aliases,
    };
    spec.validate().map_err(|e| r.err(r.header_line("model"), 1, e.to_string()))?;
    Ok(spec)
}

fn read_table(
    r: &Reader,
    vars: &str,
    consts: &str,
    mut weights: Option<&mut BTreeMap<String, Vec<i32>>>,
) -> Result<VarTable, ModelFileError> {
    let mut b = VarTable::builder();
    let mut seen = BTreeMap::new();
    let mut declare = |l: &Line, off: usize, name: &str| -> Result<(), ModelFileError> {
        if name == HBAR {
            return Err(r.at(l, off, "`hbar` is reserved"));
        }
        if !superstar::graded_ring::is_identifier(name) {
            return Err(r.at(l, off, format!("`{name}` is not an identifier")));
        }
        if seen.insert(name.to_string(), l.no).is_some() {
            return Err(r.at(l, off, format!("`{name}` declared twice")));
        }
        Ok(())
    };
    for l in r.lines(vars) {
        let ws = words(l.text);
        let (off, name) = ws[0];
        declare(l, off, name)?;
        let Some(&(poff, parity)) = ws.get(1) else {
            return Err(r.at(l, 0, "expected `name even|odd [invertible] [weight w,..]`"));
        };
        let parity = match parity {
            "even" => Parity::Even,
            "odd" => Parity::Odd,
            other => return Err(r.at(l, poff, format!("expected `even` or `odd`, found `{other}`"))),
        };
        let mut invertible = false;
        let mut i = 2;
        if ws.get(i).map(|w| w.1) == Some("invertible") {
            if parity == Parity::Odd {
                return Err(r.at(l, ws[i].0, "odd variables cannot be invertible"));
            }
            invertible = true;
            i += 1;
        }
        if ws.get(i).map(|w| w.1) == Some("weight") {
            let Some(&(woff, w)) = ws.get(i + 1) else {
                return Err(r.at(l, ws[i].0, "missing weight list"));
            };
            let parsed: Result<Vec<i32>, _> = w.split(',').map(str::parse).collect();
            let parsed = parsed.map_err(|_| r.at(l, woff, "weights are comma-separated integers"))?;
            match weights.as_deref_mut() {
                Some(map) => {
                    map.insert(name.to_string(), parsed);
                }
                None => return Err(r.at(l, ws[i].0, "weights are not allowed here")),
            }
            i += 2;
        }
        if let Some(&(xoff, extra)) = ws.get(i) {
            return Err(r.at(l, xoff, format!("unexpected `{extra}`")));
        }
        b = b.var(name, parity, invertible, false);
    }
    for l in r.lines(consts) {
        let ws = words(l.text);
        if ws.len() != 1 {
            return Err(r.at(l, ws[1].0, "one constant per line"));
        }
        declare(l, 0, ws[0].1)?;
        b = b.constant(ws[0].1);
    }
    b.build().map_err(|e| r.err(r.header_line(vars), 1, e.to_string()))
}

fn read_pair<'t>(r: &Reader, l: &Line, table: &VarTable, lhs: &'t str) -> Result<(&'t str, &'t str), ModelFileError> {
    let ws = words(lhs);
    if ws.len() != 2 {
        return Err(r.at(l, 0, "expected two variable names"));
    }
    for (off, v) in &ws {
        if table.lookup(v).is_none() {
            return Err(r.at(l, *off, format!("unknown variable `{v}`")));
        }
    }
    Ok((ws[0].1, ws[1].1))
}

fn read_bivector(r: &Reader, section: &str, table: &VarTable, parser: &ExprParser) -> Result<SuperBivector, ModelFileError> {
    let mut pi = SuperBivector::new(table);
    for l in r.lines(section) {
        let (lhs, off, rhs) = split_once_at(l.text, ":=").ok_or_else(|| r.at(l, 0, "expected `A B := expr`"))?;
        let (a, b) = read_pair(r, l, table, lhs)?;
        let value = r.expr(parser, l, off, rhs)?;
        pi.set(a, b, value).map_err(|e| r.at(l, 0, e.to_string()))?;
    }
    Ok(pi)
}

/// Pairs are named in `pair_table`; values are parsed with `value_parser`.
fn read_relations(
    r: &Reader,
    section: &str,
    pair_table: &VarTable,
    value_parser: &ExprParser,
) -> Result<Vec<Relation>, ModelFileError> {
    let mut out = Vec::new();
    for l in r.lines(section) {
        let (lhs, off, rhs) = split_once_at(l.text, "=").ok_or_else(|| r.at(l, 0, "expected `comm|anti A B = expr`"))?;
        let kind = match lhs.split_whitespace().next() {
            Some("comm") => RelationKind::Comm,
            Some("anti") => RelationKind::Anti,
            _ => return Err(r.at(l, 0, "expected `comm` or `anti`")),
        };
        let (a, b) = read_pair(r, l, pair_table, lhs[4..].trim_start()).map_err(|mut e| {
            e.col += lhs.len() - lhs[4..].trim_start().len();
            e
        })?;
        let want = RelationKind::for_pair(pair_table, a, b).map_err(|e| r.at(l, 0, e.to_string()))?;
        if want != kind {
            return Err(r.at(l, 0, format!("`{a} {b}` needs `{want}`")));
        }
        out.push(Relation {
            kind,
            a: a.to_string(),
            b: b.to_string(),
            value: r.expr(value_parser, l, off, rhs)?,
        });
    }
    Ok(out)
}

fn parse_cy_line(r: &Reader, l: &Line) -> Result<CyWeights, ModelFileError> {
    let ws = words(l.text);
    let int = |i: usize| -> Result<i64, ModelFileError> {
        let (off, w) = ws.get(i).copied().ok_or_else(|| r.at(l, l.text.len(), "missing number"))?;
        w.parse().map_err(|_| r.at(l, off, format!("`{w}` is not an integer")))
    };
    let nonneg = |i: usize| -> Result<u32, ModelFileError> {
        let v = int(i)?;
        u32::try_from(v).map_err(|_| r.at(l, ws[i].0, "expected a nonnegative integer"))
    };
    let arity = |n: usize| -> Result<(), ModelFileError> {
        match ws.get(n) {
            Some((off, w)) => Err(r.at(l, *off, format!("unexpected `{w}`"))),
            None => Ok(()),
        }
    };
    match ws.first().map(|w| w.1) {
        Some("projective") => {
            let w = CyWeights::Projective {
                n: nonneg(1)?,
                n_odd: nonneg(2)?,
            };
            arity(3)?;
            Ok(w)
        }
        Some("ambitwistor") => {
            let w = CyWeights::Ambitwistor { n_odd: nonneg(1)? };
            arity(2)?;
            Ok(w)
        }
        Some("weighted") => {
            let Some(sep) = ws.iter().position(|w| w.1 == "--") else {
                return Err(r.at(l, 0, "expected `weighted k.. -- l..`"));
            };
            let even = (1..sep).map(int).collect::<Result<Vec<_>, _>>()?;
            let odd = (sep + 1..ws.len()).map(int).collect::<Result<Vec<_>, _>>()?;
            Ok(CyWeights::Weighted { even, odd })
        }
        _ => Err(r.at(l, 0, "expected `projective`, `weighted` or `ambitwistor`")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot serialize model: {0}")]
pub struct SerializeError(String);

/// Canonical text; `parse_model_str(serialize_model(m)) == m`.
pub fn serialize_model(m: &ModelSpec) -> Result<String, SerializeError> {
    let mut out = String::new();
    w(&mut out, format_args!("[model]\nname = {}\n", m.name));
    w(&mut out, format_args!("\n[options]\norder = {}\n", m.max_order));
    write_table(&mut out, &m.table, "variables", "constants", Some(&m.weights))?;
    write_bivector(&mut out, "bivector", &m.bivector);
    write_relations(&mut out, "relations", &m.relations, &m.table);
    if let Some(a) = &m.atlas {
        out.push_str("\n[atlas]\n");
        for f in &a.factors {
            let standard = f.charts.len() == f.coords.len() && f.charts.iter().enumerate().all(|(i, c)| c.1 == i);
            if !standard {
                return Err(SerializeError("atlas factors need one chart per coordinate".into()));
            }
            let labels: Vec<&str> = f.charts.iter().map(|c| c.0.as_str()).collect();
            w(&mut out, format_args!("factor {} : {}\n", f.coords.join(" "), labels.join(" ")));
        }
        if let Some(pi) = &a.bivector {
            write_bivector(&mut out, "atlas.bivector", pi);
        }
    }
    if let Some(f) = &m.fibration {
        write_table(&mut out, &f.base, "fibration.variables", "fibration.constants", None)?;
        write_relations(&mut out, "fibration.relations", &f.base_relations, &f.base);
        out.push_str("\n[fibration.map]\n");
        for (k, v) in &f.map {
            w(&mut out, format_args!("{k} := {}\n", v.render(&f.base)));
        }
        write_relations(&mut out, "fibration.expect", &f.expectations, &f.base);
        if !f.identities.is_empty() {
            out.push_str("\n[fibration.identities]\n");
            for (k, v) in &f.identities {
                w(&mut out, format_args!("{k} := {}\n", v.render(&m.table)));
            }
        }
    }
    if let Some(cy) = &m.cy {
        w(&mut out, format_args!("\n[cy]\n{cy}\n"));
    }
    if !m.aliases.is_empty() {
        out.push_str("\n[aliases]\n");
        for (k, v) in &m.aliases {
            w(&mut out, format_args!("{k} = {v}\n"));
        }
    }
    Ok(out)
}

fn w(out: &mut String, args: fmt::Arguments) {
    out.write_fmt(args).expect("writing to a String");
}

fn write_table(
    out: &mut String,
    table: &VarTable,
    vars: &str,
    consts: &str,
    weights: Option<&BTreeMap<String, Vec<i32>>>,
) -> Result<(), SerializeError> {
    if table.iter().skip_while(|v| !v.constant).any(|v| !v.constant) {
        return Err(SerializeError("constants must follow all coordinates".into()));
    }
    w(out, format_args!("\n[{vars}]\n"));
    for v in table.generators() {
        let parity = if v.is_odd() { "odd" } else { "even" };
        w(out, format_args!("{} {parity}", v.name));
        if v.invertible {
            out.push_str(" invertible");
        }
        if let Some(ws) = weights.and_then(|m| m.get(&v.name)) {
            let list: Vec<String> = ws.iter().map(i32::to_string).collect();
            w(out, format_args!(" weight {}", list.join(",")));
        }
        out.push('\n');
    }
    if table.constants().next().is_some() {
        w(out, format_args!("\n[{consts}]\n"));
        for v in table.constants() {
            w(out, format_args!("{}\n", v.name));
        }
    }
    Ok(())
}

fn write_bivector(out: &mut String, section: &str, pi: &SuperBivector) {
    let t = pi.table();
    w(out, format_args!("\n[{section}]\n"));
    for (a, b, v) in pi.upper_entries() {
        w(out, format_args!("{} {} := {}\n", t.get(a).name, t.get(b).name, v.render(t)));
    }
}

fn write_relations(out: &mut String, section: &str, rels: &[Relation], values: &VarTable) {
    if rels.is_empty() {
        return;
    }
    w(out, format_args!("\n[{section}]\n"));
    for r in rels {
        w(out, format_args!("{} {} {} = {}\n", r.kind, r.a, r.b, r.value.render(values)));
    }
}
