//! Line-oriented parser for `.flag` documents.
//!
//! Errors carry a position for malformed text (`Syntax`) and a message for
//! well-formed text that names an inconsistent object (`Semantic`).

use std::collections::BTreeMap;
use std::fmt;

use genflag_core::{
    validate_pic, validate_spec, AffineLabel, BasisSpec, ChainSpec, Coloring, Error as CoreError,
    FormKind, GeneralizedFlagSpec, IndexSet, IsoColoring, IsotropicFlagSpec, PicElement,
    PositionLabel, Scalar, TailRule, TailWeights, Vector, WeightRule,
};

use crate::document::SpecDocument;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    Semantic(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Syntax {
                line,
                column,
                message,
            } => write!(f, "line {line}, column {column}: {message}"),
            CliError::Semantic(m) => write!(f, "{m}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Semantic(e.to_string())
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> CliError {
    CliError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// One meaningful line with its 1-based position in the source.
struct Line<'a> {
    no: usize,
    text: &'a str,
}

impl<'a> Line<'a> {
    fn err(&self, fragment: &str, message: impl Into<String>) -> CliError {
        let column = self.text.find(fragment).map_or(1, |i| i + 1);
        syntax(self.no, column, message)
    }
}

fn parse_int(line: &Line, word: &str) -> Result<i64, CliError> {
    word.parse()
        .map_err(|_| line.err(word, format!("expected an integer, found `{word}`")))
}

fn parse_rational(line: &Line, word: &str) -> Result<Scalar, CliError> {
    let bad = || line.err(word, format!("expected a rational `p` or `p/q`, found `{word}`"));
    match word.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Scalar::new(p, q))
        }
        None => {
            let p: i64 = word.trim().parse().map_err(|_| bad())?;
            Ok(Scalar::from_int(p))
        }
    }
}

/// `e3` names slot 3, `e^3` slot −3, `e0` the center slot.
fn parse_unit(line: &Line, word: &str) -> Result<i64, CliError> {
    let bad = || line.err(word, format!("expected a unit `eK` or `e^K`, found `{word}`"));
    let rest = word.strip_prefix('e').ok_or_else(bad)?;
    if let Some(k) = rest.strip_prefix('^') {
        let k: i64 = k.parse().map_err(|_| bad())?;
        if k <= 0 {
            return Err(bad());
        }
        Ok(-k)
    } else {
        let k: i64 = rest.parse().map_err(|_| bad())?;
        if k < 0 {
            return Err(bad());
        }
        Ok(k)
    }
}

fn parse_vector(line: &Line, text: &str) -> Result<Vector, CliError> {
    let text = text.trim();
    if text == "0" {
        return Ok(Vector::zero());
    }
    let mut v = Vector::zero();
    for term in text.split('+') {
        let term = term.trim();
        if term.is_empty() {
            return Err(line.err(text, "empty term in vector expression"));
        }
        let (coeff, unit) = match term.split_once('*') {
            Some((c, u)) => (parse_rational(line, c.trim())?, u.trim()),
            None => match term.strip_prefix('-') {
                Some(u) => (Scalar::from_int(-1), u.trim()),
                None => (Scalar::one(), term),
            },
        };
        v.add_to_slot(parse_unit(line, unit)?, coeff);
    }
    Ok(v)
}

fn parse_label(line: &Line, text: &str) -> Result<PositionLabel, CliError> {
    let bad = || line.err(text, format!("expected a label `(tier, offset)`, found `{text}`"));
    let inner = text
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(bad)?;
    let (tier, offset) = inner.split_once(',').ok_or_else(bad)?;
    let tier: i64 = tier.trim().parse().map_err(|_| bad())?;
    Ok(PositionLabel {
        tier,
        offset: parse_rational(line, offset.trim())?,
    })
}

/// Groups of the shape `0: a, b[, c] 1: a, b[, c] ...` used by affine tails
/// (three values) and affine weights (two values). Residues must cover
/// exactly `0..count`.
fn parse_residue_groups(
    line: &Line,
    words: &[&str],
    values_per_group: usize,
) -> Result<Vec<Vec<String>>, CliError> {
    let mut groups: BTreeMap<i64, Vec<String>> = BTreeMap::new();
    let mut current: Option<i64> = None;
    for word in words {
        if let Some(r) = word.strip_suffix(':') {
            let r = parse_int(line, r)?;
            if groups.insert(r, Vec::new()).is_some() {
                return Err(line.err(word, format!("residue {r} listed twice")));
            }
            current = Some(r);
        } else {
            let r = current.ok_or_else(|| line.err(word, "value before any `residue:` marker"))?;
            let group = groups.get_mut(&r).unwrap();
            for piece in word.split(',').filter(|p| !p.is_empty()) {
                group.push(piece.to_string());
            }
        }
    }
    let count = groups.len() as i64;
    for (i, (r, group)) in groups.iter().enumerate() {
        if *r != i as i64 {
            return Err(line.err(
                line.text,
                format!("residues must cover 0..{count} exactly, found {r}"),
            ));
        }
        if group.len() != values_per_group {
            return Err(line.err(
                line.text,
                format!(
                    "residue {r} needs {values_per_group} values, found {}",
                    group.len()
                ),
            ));
        }
    }
    if groups.is_empty() {
        return Err(line.err(line.text, "expected at least one residue group"));
    }
    Ok(groups.into_values().collect())
}

fn parse_member(line: &Line, rest: &str) -> Result<IndexSet, CliError> {
    let rest = rest.trim();
    if rest == "all" {
        return Ok(IndexSet::all());
    }
    if rest == "none" {
        return Ok(IndexSet::finite([]));
    }
    if rest.starts_with("from") {
        let words: Vec<&str> = rest.split_whitespace().collect();
        // from F mod M residues r[, r...] [plus e[, e...]]
        let bad = |w: &str, m: &str| line.err(w, m.to_string());
        if words.len() < 5 || words[0] != "from" || words[2] != "mod" || words[4] != "residues" {
            return Err(bad(rest, "expected `from F mod M residues R[, R] [plus E[, E]]`"));
        }
        let from = parse_int(line, words[1])?;
        let modulus = parse_int(line, words[3])?;
        let mut residues = Vec::new();
        let mut explicit = Vec::new();
        let mut target = &mut residues;
        for word in &words[5..] {
            if *word == "plus" {
                target = &mut explicit;
                continue;
            }
            for piece in word.split(',').filter(|p| !p.is_empty()) {
                target.push(parse_int(line, piece)?);
            }
        }
        if residues.is_empty() {
            return Err(bad(rest, "periodic member needs at least one residue"));
        }
        let mut set = IndexSet::periodic(from, modulus, residues);
        if !explicit.is_empty() {
            set = set.with_explicit(explicit);
        }
        return Ok(set);
    }
    let mut explicit = Vec::new();
    for word in rest.split_whitespace() {
        for piece in word.split(',').filter(|p| !p.is_empty()) {
            explicit.push(parse_int(line, piece)?);
        }
    }
    if explicit.is_empty() {
        return Err(line.err(rest, "expected `all`, `none`, indices, or `from ...`"));
    }
    Ok(IndexSet::finite(explicit))
}

/// Parse a standalone vector expression, as passed in CLI arguments.
pub fn parse_vector_expr(text: &str) -> Result<Vector, CliError> {
    parse_vector(&Line { no: 1, text }, text)
}

/// Accumulated section lines, collected before kind-specific assembly.
#[derive(Default)]
struct Sections {
    replacements: Vec<(i64, Vector)>,
    window: Vec<(usize, PositionLabel)>,
    tail: Option<TailRule>,
    members: Vec<IndexSet>,
    form: Option<FormKind>,
    weight_exceptions: Vec<(PositionLabel, i64)>,
    weights_tail: Option<TailWeights>,
}

fn parse_tail(line: &Line, words: &[&str]) -> Result<TailRule, CliError> {
    match words.first() {
        Some(&"affine") => {
            if words.get(1) != Some(&"mod") {
                return Err(line.err(line.text, "expected `tail affine mod M ...`"));
            }
            let modulus = parse_int(line, words.get(2).copied().unwrap_or(""))?;
            let groups = parse_residue_groups(line, &words[3..], 3)?;
            if groups.len() as i64 != modulus {
                return Err(line.err(
                    line.text,
                    format!("modulus {modulus} but {} residue groups", groups.len()),
                ));
            }
            let mut rules = Vec::new();
            for g in &groups {
                rules.push(AffineLabel {
                    tier: parse_int(line, &g[0])?,
                    slope: parse_rational(line, &g[1])?,
                    intercept: parse_rational(line, &g[2])?,
                });
            }
            Ok(TailRule::Affine { modulus, rules })
        }
        Some(&"dense") => {
            let tier = parse_int(line, words.get(1).copied().unwrap_or(""))?;
            let reversed = match words.get(2) {
                None => false,
                Some(&"reversed") => true,
                Some(w) => return Err(line.err(w, format!("unexpected word `{w}` after tier"))),
            };
            if words.len() > 3 {
                return Err(line.err(line.text, "trailing words after dense tail"));
            }
            Ok(TailRule::Dense { tier, reversed })
        }
        _ => Err(line.err(line.text, "expected `tail affine ...` or `tail dense ...`")),
    }
}

fn parse_section_line(line: &Line, sections: &mut Sections) -> Result<(), CliError> {
    let (keyword, rest) = line
        .text
        .split_once(char::is_whitespace)
        .unwrap_or((line.text, ""));
    let rest = rest.trim();
    match keyword {
        "basis" => {
            let rest = rest
                .strip_prefix("replace")
                .ok_or_else(|| line.err(rest, "expected `basis replace SLOT = EXPR`"))?;
            let (slot, expr) = rest
                .split_once('=')
                .ok_or_else(|| line.err(rest, "expected `=` in basis replacement"))?;
            let slot = parse_int(line, slot.trim())?;
            sections
                .replacements
                .push((slot, parse_vector(line, expr)?));
        }
        "window" => {
            let (index, label) = rest
                .split_once("->")
                .ok_or_else(|| line.err(rest, "expected `window I -> (tier, offset)`"))?;
            let index = parse_int(line, index.trim())?;
            if index < 1 {
                return Err(line.err(line.text, "window indices start at 1"));
            }
            sections
                .window
                .push((index as usize, parse_label(line, label)?));
        }
        "tail" => {
            if sections.tail.is_some() {
                return Err(line.err(line.text, "second `tail` line"));
            }
            let words: Vec<&str> = rest.split_whitespace().collect();
            sections.tail = Some(parse_tail(line, &words)?);
        }
        "member" => sections.members.push(parse_member(line, rest)?),
        "form" => {
            if sections.form.is_some() {
                return Err(line.err(line.text, "second `form` line"));
            }
            sections.form = Some(match rest {
                "B" => FormKind::B,
                "C" => FormKind::C,
                "D" => FormKind::D,
                other => return Err(line.err(other, format!("unknown form `{other}`"))),
            });
        }
        "weight" => {
            let (label, value) = rest
                .split_once('=')
                .ok_or_else(|| line.err(rest, "expected `weight (tier, offset) = W`"))?;
            let label = parse_label(line, label.trim())?;
            sections
                .weight_exceptions
                .push((label, parse_int(line, value.trim())?));
        }
        "weights" => {
            if sections.weights_tail.is_some() {
                return Err(line.err(line.text, "second `weights` line"));
            }
            let words: Vec<&str> = rest.split_whitespace().collect();
            sections.weights_tail = Some(match words.first() {
                Some(&"affine") => {
                    let groups = parse_residue_groups(line, &words[1..], 2)?;
                    let mut ws = Vec::new();
                    for g in &groups {
                        ws.push((parse_int(line, &g[0])?, parse_int(line, &g[1])?));
                    }
                    TailWeights::Affine(ws)
                }
                Some(&"constant") => {
                    TailWeights::Constant(parse_int(line, words.get(1).copied().unwrap_or(""))?)
                }
                _ => {
                    return Err(
                        line.err(line.text, "expected `weights affine ...` or `weights constant W`")
                    )
                }
            });
        }
        other => {
            return Err(line.err(other, format!("unknown keyword `{other}`")));
        }
    }
    Ok(())
}

fn assemble_coloring(sections: &Sections) -> Result<Coloring, CliError> {
    let mut window = sections.window.clone();
    window.sort_by_key(|(i, _)| *i);
    let indices: Vec<usize> = window.iter().map(|(i, _)| *i).collect();
    let expected: Vec<usize> = (1..=window.len()).collect();
    if indices != expected {
        return Err(CliError::Semantic(format!(
            "window indices must be exactly 1..={}, found {indices:?}",
            window.len()
        )));
    }
    let tail = sections
        .tail
        .clone()
        .ok_or_else(|| CliError::Semantic("missing `tail` line".into()))?;
    Ok(Coloring {
        window: window.into_iter().map(|(_, a)| a).collect(),
        tail,
    })
}

fn assemble_basis(sections: &Sections) -> BasisSpec {
    BasisSpec::with_replacements(sections.replacements.clone())
}

fn forbid(
    kind: &str,
    sections: &Sections,
    members: bool,
    form: bool,
    weights: bool,
    coloring: bool,
) -> Result<(), CliError> {
    let refuse = |what: &str| {
        Err(CliError::Semantic(format!(
            "`{what}` lines are not allowed in a {kind} document"
        )))
    };
    if members && !sections.members.is_empty() {
        return refuse("member");
    }
    if form && sections.form.is_some() {
        return refuse("form");
    }
    if weights && (sections.weights_tail.is_some() || !sections.weight_exceptions.is_empty()) {
        return refuse("weight");
    }
    if coloring && (sections.tail.is_some() || !sections.window.is_empty()) {
        return refuse("window/tail");
    }
    Ok(())
}

pub fn parse_spec(text: &str) -> Result<SpecDocument, CliError> {
    let mut lines = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        lines.push(Line {
            no: no + 1,
            text: trimmed,
        });
    }
    let header = lines
        .first()
        .ok_or_else(|| syntax(1, 1, "empty document"))?;
    let (kind, name) = header
        .text
        .split_once(char::is_whitespace)
        .ok_or_else(|| header.err(header.text, "expected `KIND NAME` header"))?;
    let name = name.trim();
    if name.is_empty() || name.split_whitespace().count() != 1 {
        return Err(header.err(name, "document name must be a single word"));
    }
    let name = name.to_string();

    let mut sections = Sections::default();
    for line in &lines[1..] {
        parse_section_line(line, &mut sections)?;
    }

    match kind {
        "flag" => {
            forbid("flag", &sections, true, true, true, false)?;
            let spec = GeneralizedFlagSpec::new(assemble_basis(&sections), assemble_coloring(&sections)?);
            validate_spec(&spec)?;
            // Keep the authored spec so printing reproduces the source.
            Ok(SpecDocument::Flag { name, spec })
        }
        "chain" => {
            forbid("chain", &sections, false, true, true, true)?;
            if sections.members.is_empty() {
                return Err(CliError::Semantic("chain needs at least one `member` line".into()));
            }
            let chain = ChainSpec::new(assemble_basis(&sections), sections.members.clone());
            chain.validated()?;
            Ok(SpecDocument::Chain { name, chain })
        }
        "isotropic-flag" => {
            forbid("isotropic-flag", &sections, true, false, true, false)?;
            let form = sections
                .form
                .ok_or_else(|| CliError::Semantic("isotropic-flag needs a `form` line".into()))?;
            let plus = assemble_coloring(&sections)?;
            plus.validate()?;
            let zero = matches!(form, FormKind::B).then(|| PositionLabel {
                tier: 0,
                offset: Scalar::zero(),
            });
            let basis = assemble_basis(&sections);
            basis.det()?;
            let spec = IsotropicFlagSpec::new(form, basis, IsoColoring::mirrored(plus, zero));
            Ok(SpecDocument::Isotropic { name, spec })
        }
        "pic-element" => {
            forbid("pic-element", &sections, true, true, false, false)?;
            let base = GeneralizedFlagSpec::new(assemble_basis(&sections), assemble_coloring(&sections)?);
            validate_spec(&base)?;
            let tail = sections
                .weights_tail
                .clone()
                .ok_or_else(|| CliError::Semantic("pic-element needs a `weights` line".into()))?;
            let mut exceptions = BTreeMap::new();
            for (a, w) in &sections.weight_exceptions {
                if exceptions.insert(a.clone(), *w).is_some() {
                    return Err(CliError::Semantic(format!(
                        "weight for ({}, {}) given twice",
                        a.tier, a.offset
                    )));
                }
            }
            let element = PicElement::new(base, WeightRule { exceptions, tail });
            validate_pic(&element)?;
            Ok(SpecDocument::Pic { name, element })
        }
        other => Err(header.err(other, format!("unknown document kind `{other}`"))),
    }
}
