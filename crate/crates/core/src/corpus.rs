//! The corpus text format.
//!
//! A corpus is a sequence of blocks
//!
//! ```text
//! # comment
//! quantale lukasiewicz3 {
//!   labels: ["0", "1/2", "1"]
//!   order: [["0", "1/2"], ["1/2", "1"]]
//!   unit: "1"
//!   mult: [["0", "0", "0"],
//!          ["0", "0", "1/2"],
//!          ["0", "1/2", "1"]]
//! }
//! ```
//!
//! Each body line is `key: <json>`; a value may continue over several lines
//! while its brackets are open. Block kinds are `quantale`, `relation`,
//! `presheaf`, `dual`, `endofunctor` and `budget`. Parsing checks syntax and
//! that every cross-reference resolves; the algebraic laws are checked when a
//! block is built, so a corpus may carry a table that fails them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::{json, Value};
use thiserror::Error;

use crate::fixpoint::PsiSpec;
use crate::lattice::{Elem, FinLattice, LatticeError};
use crate::presheaf::{instance, Endofunctor, InstanceKind, LatticePresheaf};
use crate::quantale::{FinQuantale, QuantaleError};
use crate::relbase::{FinSet, QMat};
use crate::report::Budget;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("block {block}: {law} fails at {witness}")]
    Validation { block: String, law: String, witness: String },
    #[error("unknown name {0:?}")]
    DanglingReference(String),
}

fn parse_err(line: usize, message: impl Into<String>) -> CorpusError {
    CorpusError::Parse { line, message: message.into() }
}

/// A quantale as written: labels, generating order pairs, unit and a
/// row-major multiplication grid, all by label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantaleDef {
    pub labels: Vec<String>,
    pub order: Vec<(String, String)>,
    pub unit: String,
    pub mult: Vec<Vec<String>>,
}

/// A matrix between finite sets with entries given by quantale labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationDef {
    pub quantale: String,
    pub dom: Vec<String>,
    pub cod: Vec<String>,
    pub entries: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresheafDef {
    pub instance: InstanceKind,
    /// Absent for `nuts`, which is always over the Boolean quantale.
    pub quantale: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualDef {
    pub presheaf: String,
    /// A label of `Q({*})`.
    pub omega: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctorDef {
    Identity,
    Constant(Vec<String>),
    Product(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PsiDef {
    Identity,
    Top,
    Bottom,
    /// A label of `Q(A)` for the constant set `A`.
    Constant(String),
    /// A label of the base quantale.
    Tensor(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndofunctorDef {
    pub presheaf: String,
    pub functor: FunctorDef,
    pub psi: PsiDef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockBody {
    Quantale(QuantaleDef),
    Relation(RelationDef),
    Presheaf(PresheafDef),
    Dual(DualDef),
    Endofunctor(EndofunctorDef),
    Budget(Budget),
}

impl BlockBody {
    pub fn kind(&self) -> &'static str {
        match self {
            BlockBody::Quantale(_) => "quantale",
            BlockBody::Relation(_) => "relation",
            BlockBody::Presheaf(_) => "presheaf",
            BlockBody::Dual(_) => "dual",
            BlockBody::Endofunctor(_) => "endofunctor",
            BlockBody::Budget(_) => "budget",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub name: String,
    pub body: BlockBody,
}

/// A parsed corpus with every reference resolved.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusFile {
    blocks: Vec<Block>,
}

/// The corpus shipped with the library.
pub const BUNDLED: &[(&str, &str)] = &[
    ("boolean2.q", include_str!("../corpus/boolean2.q")),
    ("godel3.q", include_str!("../corpus/godel3.q")),
    ("lukasiewicz3.q", include_str!("../corpus/lukasiewicz3.q")),
    ("lukasiewicz4.q", include_str!("../corpus/lukasiewicz4.q")),
    ("maxchain3.q", include_str!("../corpus/maxchain3.q")),
    ("powerset_z2.q", include_str!("../corpus/powerset_z2.q")),
    ("examples.q", include_str!("../corpus/examples.q")),
];

/// The bundled corpus, concatenated in the order of [`BUNDLED`].
pub fn bundled_text() -> String {
    BUNDLED.iter().map(|(_, text)| *text).collect::<Vec<_>>().join("\n")
}

/// Parses the bundled corpus; the files are fixed, so failure is a bug.
pub fn bundled() -> CorpusFile {
    CorpusFile::parse(&bundled_text()).expect("bundled corpus parses")
}

/// Parses and then builds every block, failing on the first law violation.
pub fn parse_corpus(path: &std::path::Path) -> Result<CorpusFile, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|e| parse_err(0, format!("{}: {e}", path.display())))?;
    let corpus = CorpusFile::parse(&text)?;
    corpus.validate()?;
    Ok(corpus)
}

/// Blanks out a `#` comment that is not inside a string.
fn strip_comment(line: &str) -> &str {
    let mut in_string = false;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' if in_string => escaped = true,
            '"' => in_string = !in_string,
            '#' if !in_string => return &line[..i],
            _ => {}
        }
    }
    line
}

/// Bracket depth after `text`, ignoring brackets inside strings.
fn depth_after(text: &str, mut depth: i64) -> i64 {
    let mut in_string = false;
    let mut escaped = false;
    for c in text.chars() {
        match c {
            _ if escaped => escaped = false,
            '\\' if in_string => escaped = true,
            '"' => in_string = !in_string,
            '[' | '{' if !in_string => depth += 1,
            ']' | '}' if !in_string => depth -= 1,
            _ => {}
        }
    }
    depth
}

fn is_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

struct RawBlock {
    line: usize,
    kind: String,
    name: String,
    fields: BTreeMap<String, (usize, Value)>,
}

fn lex(text: &str) -> Result<Vec<RawBlock>, CorpusError> {
    let mut blocks = Vec::new();
    let mut current: Option<RawBlock> = None;
    // An open value: its key, starting line, text so far and bracket depth.
    let mut pending: Option<(String, usize, String, i64)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if let Some((key, start, mut acc, depth)) = pending.take() {
            acc.push('\n');
            acc.push_str(line);
            let depth = depth_after(line, depth);
            if depth > 0 {
                pending = Some((key, start, acc, depth));
            } else {
                let value = serde_json::from_str(&acc).map_err(|e| parse_err(start, format!("value of {key}: {e}")))?;
                current.as_mut().expect("inside a block").fields.insert(key, (start, value));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        match current.as_mut() {
            None => {
                let header = line.strip_suffix('{').map(str::trim).ok_or_else(|| parse_err(line_no, "expected `kind name {`"))?;
                let mut words = header.split_whitespace();
                let (kind, name) = match (words.next(), words.next(), words.next()) {
                    (Some(k), Some(n), None) if is_name(n) => (k, n),
                    _ => return Err(parse_err(line_no, "expected `kind name {`")),
                };
                current = Some(RawBlock { line: line_no, kind: kind.into(), name: name.into(), fields: BTreeMap::new() });
            }
            Some(block) => {
                if line == "}" {
                    blocks.push(current.take().expect("inside a block"));
                    continue;
                }
                let (key, value) = line.split_once(':').ok_or_else(|| parse_err(line_no, "expected `key: value` or `}`"))?;
                let key = key.trim().to_string();
                if !is_name(&key) {
                    return Err(parse_err(line_no, format!("bad key {key:?}")));
                }
                if block.fields.contains_key(&key) {
                    return Err(parse_err(line_no, format!("duplicate key {key}")));
                }
                let value = value.trim();
                let depth = depth_after(value, 0);
                if depth > 0 {
                    pending = Some((key, line_no, value.to_string(), depth));
                } else {
                    let parsed = serde_json::from_str(value).map_err(|e| parse_err(line_no, format!("value of {key}: {e}")))?;
                    block.fields.insert(key, (line_no, parsed));
                }
            }
        }
    }
    if let Some((key, start, ..)) = pending {
        return Err(parse_err(start, format!("unterminated value of {key}")));
    }
    if let Some(block) = current {
        return Err(parse_err(block.line, format!("unterminated block {}", block.name)));
    }
    if blocks.is_empty() {
        return Err(parse_err(0, "no blocks"));
    }
    Ok(blocks)
}

/// Typed access to the fields of one raw block.
struct Fields<'a> {
    block: &'a RawBlock,
    used: BTreeSet<&'a str>,
}

impl<'a> Fields<'a> {
    fn new(block: &'a RawBlock) -> Self {
        Fields { block, used: BTreeSet::new() }
    }

    fn raw(&mut self, key: &'a str) -> Option<(usize, &'a Value)> {
        self.used.insert(key);
        self.block.fields.get(key).map(|(l, v)| (*l, v))
    }

    fn value(&mut self, key: &'a str) -> Result<(usize, &'a Value), CorpusError> {
        self.raw(key).ok_or_else(|| parse_err(self.block.line, format!("{} {} is missing {key}", self.block.kind, self.block.name)))
    }

    fn string(&mut self, key: &'a str) -> Result<String, CorpusError> {
        let (line, v) = self.value(key)?;
        as_string(line, key, v)
    }

    fn strings(&mut self, key: &'a str) -> Result<Vec<String>, CorpusError> {
        let (line, v) = self.value(key)?;
        as_strings(line, key, v)
    }

    fn grid(&mut self, key: &'a str) -> Result<Vec<Vec<String>>, CorpusError> {
        let (line, v) = self.value(key)?;
        let rows = v.as_array().ok_or_else(|| parse_err(line, format!("{key} must be a list of rows")))?;
        rows.iter().map(|r| as_strings(line, key, r)).collect()
    }

    fn finish(self) -> Result<(), CorpusError> {
        match self.block.fields.iter().find(|(k, _)| !self.used.contains(k.as_str())) {
            Some((k, (line, _))) => Err(parse_err(*line, format!("unknown key {k} in {} block", self.block.kind))),
            None => Ok(()),
        }
    }
}

fn as_string(line: usize, key: &str, v: &Value) -> Result<String, CorpusError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(parse_err(line, format!("{key} must be a label"))),
    }
}

fn as_strings(line: usize, key: &str, v: &Value) -> Result<Vec<String>, CorpusError> {
    v.as_array()
        .ok_or_else(|| parse_err(line, format!("{key} must be a list of labels")))?
        .iter()
        .map(|x| as_string(line, key, x))
        .collect()
}

/// A finite set written either as its size or as its element labels.
fn as_set(line: usize, key: &str, v: &Value) -> Result<Vec<String>, CorpusError> {
    match v.as_u64() {
        Some(n) => Ok(FinSet::of_size(n as usize).labels().to_vec()),
        None => as_strings(line, key, v),
    }
}

fn set_value(labels: &[String]) -> Value {
    if labels == FinSet::of_size(labels.len()).labels() {
        json!(labels.len())
    } else {
        json!(labels)
    }
}

fn parse_body(raw: &RawBlock) -> Result<BlockBody, CorpusError> {
    let mut f = Fields::new(raw);
    let body = match raw.kind.as_str() {
        "quantale" => {
            let (line, order) = f.value("order")?;
            let order = order
                .as_array()
                .ok_or_else(|| parse_err(line, "order must be a list of pairs"))?
                .iter()
                .map(|p| match as_strings(line, "order", p)?.as_slice() {
                    [a, b] => Ok((a.clone(), b.clone())),
                    _ => Err(parse_err(line, "order entries are [lower, upper] pairs")),
                })
                .collect::<Result<_, _>>()?;
            BlockBody::Quantale(QuantaleDef { labels: f.strings("labels")?, order, unit: f.string("unit")?, mult: f.grid("mult")? })
        }
        "relation" => {
            let (dl, dom) = f.value("dom")?;
            let (cl, cod) = f.value("cod")?;
            BlockBody::Relation(RelationDef {
                quantale: f.string("quantale")?,
                dom: as_set(dl, "dom", dom)?,
                cod: as_set(cl, "cod", cod)?,
                entries: f.grid("entries")?,
            })
        }
        "presheaf" => {
            let (line, kind) = f.value("instance")?;
            let kind: InstanceKind = as_string(line, "instance", kind)?.parse().map_err(|e: String| parse_err(line, e))?;
            let quantale = match f.raw("quantale") {
                Some((line, v)) => Some(as_string(line, "quantale", v)?),
                None if kind == InstanceKind::Nuts => None,
                None => return Err(parse_err(raw.line, format!("presheaf {} needs a quantale", raw.name))),
            };
            BlockBody::Presheaf(PresheafDef { instance: kind, quantale })
        }
        "dual" => BlockBody::Dual(DualDef { presheaf: f.string("presheaf")?, omega: f.string("omega")? }),
        "endofunctor" => {
            let (fl, functor) = f.value("functor")?;
            let (pl, psi) = f.value("psi")?;
            BlockBody::Endofunctor(EndofunctorDef {
                presheaf: f.string("presheaf")?,
                functor: parse_functor(fl, functor)?,
                psi: parse_psi(pl, psi)?,
            })
        }
        "budget" => {
            let mut budget = Budget::default();
            for (key, slot) in [
                ("max_obj", &mut budget.max_obj),
                ("max_hom", &mut budget.max_hom),
                ("max_pairs", &mut budget.max_pairs),
                ("max_carrier", &mut budget.max_carrier),
            ] {
                if let Some((line, v)) = f.raw(key) {
                    *slot = v.as_u64().ok_or_else(|| parse_err(line, format!("{key} must be a count")))? as usize;
                }
            }
            if let Some((line, v)) = f.raw("seed") {
                budget.seed = v.as_u64().ok_or_else(|| parse_err(line, "seed must be an integer"))?;
            }
            BlockBody::Budget(budget)
        }
        other => return Err(parse_err(raw.line, format!("unknown block kind {other}"))),
    };
    f.finish()?;
    Ok(body)
}

fn single_key(line: usize, v: &Value) -> Result<(&str, &Value), CorpusError> {
    match v.as_object() {
        Some(o) if o.len() == 1 => {
            let (k, inner) = o.iter().next().expect("one key");
            Ok((k.as_str(), inner))
        }
        _ => Err(parse_err(line, "expected a name or a one-key object")),
    }
}

fn parse_functor(line: usize, v: &Value) -> Result<FunctorDef, CorpusError> {
    if v.as_str() == Some("identity") {
        return Ok(FunctorDef::Identity);
    }
    match single_key(line, v)? {
        ("constant", set) => Ok(FunctorDef::Constant(as_set(line, "constant", set)?)),
        ("product", set) => Ok(FunctorDef::Product(as_set(line, "product", set)?)),
        (other, _) => Err(parse_err(line, format!("unknown functor {other}; expected identity, constant or product"))),
    }
}

fn parse_psi(line: usize, v: &Value) -> Result<PsiDef, CorpusError> {
    match v.as_str() {
        Some("identity") => return Ok(PsiDef::Identity),
        Some("top") => return Ok(PsiDef::Top),
        Some("bottom") => return Ok(PsiDef::Bottom),
        _ => {}
    }
    match single_key(line, v)? {
        ("constant", a) => Ok(PsiDef::Constant(as_string(line, "constant", a)?)),
        ("tensor", a) => Ok(PsiDef::Tensor(as_string(line, "tensor", a)?)),
        (other, _) => Err(parse_err(line, format!("unknown psi {other}"))),
    }
}

impl CorpusFile {
    /// Parses the text and resolves every reference between blocks.
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let corpus = CorpusFile { blocks: Self::parse_blocks(text)? };
        corpus.check_references()?;
        Ok(corpus)
    }

    /// Parses `text` on top of this corpus: its blocks shadow same-named
    /// ones here, and its references may point into this corpus.
    pub fn extended_with(&self, text: &str) -> Result<Self, CorpusError> {
        let merged = self.merged_with(&CorpusFile { blocks: Self::parse_blocks(text)? });
        merged.check_references()?;
        Ok(merged)
    }

    fn parse_blocks(text: &str) -> Result<Vec<Block>, CorpusError> {
        let mut blocks = Vec::new();
        let mut seen = BTreeSet::new();
        for raw in lex(text)? {
            if !seen.insert((raw.kind.clone(), raw.name.clone())) {
                return Err(parse_err(raw.line, format!("duplicate {} {}", raw.kind, raw.name)));
            }
            blocks.push(Block { name: raw.name.clone(), body: parse_body(&raw)? });
        }
        Ok(blocks)
    }

    fn check_references(&self) -> Result<(), CorpusError> {
        let has = |kind: &str, name: &str| self.find(kind, name).is_some();
        let need = |kind: &str, name: &str| if has(kind, name) { Ok(()) } else { Err(CorpusError::DanglingReference(name.to_string())) };
        for b in &self.blocks {
            match &b.body {
                BlockBody::Relation(r) => need("quantale", &r.quantale)?,
                BlockBody::Presheaf(p) => {
                    if let Some(q) = &p.quantale {
                        need("quantale", q)?
                    }
                }
                BlockBody::Dual(d) => need("presheaf", &d.presheaf)?,
                BlockBody::Endofunctor(e) => need("presheaf", &e.presheaf)?,
                BlockBody::Quantale(_) | BlockBody::Budget(_) => {}
            }
        }
        Ok(())
    }

    /// Appends the blocks of `other`; its blocks shadow same-named ones here.
    pub fn merged_with(&self, other: &CorpusFile) -> CorpusFile {
        let mut blocks: Vec<Block> = self
            .blocks
            .iter()
            .filter(|b| other.find(b.body.kind(), &b.name).is_none())
            .cloned()
            .collect();
        blocks.extend(other.blocks.iter().cloned());
        CorpusFile { blocks }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn find(&self, kind: &str, name: &str) -> Option<&BlockBody> {
        self.blocks.iter().find(|b| b.name == name && b.body.kind() == kind).map(|b| &b.body)
    }

    /// Names of the blocks of one kind, in file order.
    pub fn names(&self, kind: &str) -> Vec<&str> {
        self.blocks.iter().filter(|b| b.body.kind() == kind).map(|b| b.name.as_str()).collect()
    }

    /// The kind of the first block with this name.
    pub fn kind_of(&self, name: &str) -> Option<&'static str> {
        self.blocks.iter().find(|b| b.name == name).map(|b| b.body.kind())
    }

    pub fn quantale_def(&self, name: &str) -> Result<&QuantaleDef, CorpusError> {
        match self.find("quantale", name) {
            Some(BlockBody::Quantale(d)) => Ok(d),
            _ => Err(CorpusError::DanglingReference(name.into())),
        }
    }

    pub fn quantale(&self, name: &str) -> Result<Arc<FinQuantale>, CorpusError> {
        build_quantale(name, self.quantale_def(name)?).map(Arc::new)
    }

    pub fn relation(&self, name: &str) -> Result<QMat, CorpusError> {
        let Some(BlockBody::Relation(r)) = self.find("relation", name) else {
            return Err(CorpusError::DanglingReference(name.into()));
        };
        let q = self.quantale(&r.quantale)?;
        let bad = |law: &str, witness: String| CorpusError::Validation { block: name.into(), law: law.into(), witness };
        if r.entries.len() != r.dom.len() || r.entries.iter().any(|row| row.len() != r.cod.len()) {
            return Err(bad("shape", format!("{} x {} expected", r.dom.len(), r.cod.len())));
        }
        let entries = r
            .entries
            .iter()
            .flatten()
            .map(|l| q.index_of(l).ok_or_else(|| bad("entries", format!("unknown label {l:?}"))))
            .collect::<Result<Vec<Elem>, _>>()?;
        QMat::new(q, FinSet::new(r.dom.clone()), FinSet::new(r.cod.clone()), entries).map_err(|e| bad("entries", e.to_string()))
    }

    pub fn presheaf_def(&self, name: &str) -> Result<&PresheafDef, CorpusError> {
        match self.find("presheaf", name) {
            Some(BlockBody::Presheaf(d)) => Ok(d),
            _ => Err(CorpusError::DanglingReference(name.into())),
        }
    }

    pub fn presheaf(&self, name: &str) -> Result<Arc<dyn LatticePresheaf>, CorpusError> {
        let def = self.presheaf_def(name)?;
        let q = match &def.quantale {
            Some(q) => self.quantale(q)?,
            None => Arc::new(crate::quantale::examples::boolean()),
        };
        Ok(instance(def.instance, &q))
    }

    pub fn dual_def(&self, name: &str) -> Result<&DualDef, CorpusError> {
        match self.find("dual", name) {
            Some(BlockBody::Dual(d)) => Ok(d),
            _ => Err(CorpusError::DanglingReference(name.into())),
        }
    }

    /// The presheaf of a dual block with its element of `Q({*})`.
    pub fn dual(&self, name: &str) -> Result<(Arc<dyn LatticePresheaf>, Elem), CorpusError> {
        let def = self.dual_def(name)?;
        let p = self.presheaf(&def.presheaf)?;
        let omega = p.parse_element(1, &def.omega).ok_or_else(|| CorpusError::Validation {
            block: name.into(),
            law: "omega".into(),
            witness: format!("{:?} is not an element of {}(1)", def.omega, p.name()),
        })?;
        Ok((p, omega))
    }

    pub fn endofunctor_def(&self, name: &str) -> Result<&EndofunctorDef, CorpusError> {
        match self.find("endofunctor", name) {
            Some(BlockBody::Endofunctor(d)) => Ok(d),
            _ => Err(CorpusError::DanglingReference(name.into())),
        }
    }

    /// The presheaf, functor and `ψ` of an endofunctor block.
    pub fn endofunctor(&self, name: &str) -> Result<(Arc<dyn LatticePresheaf>, Endofunctor, PsiSpec), CorpusError> {
        let def = self.endofunctor_def(name)?;
        let p = self.presheaf(&def.presheaf)?;
        let functor = match &def.functor {
            FunctorDef::Identity => Endofunctor::Identity,
            FunctorDef::Constant(a) => Endofunctor::Constant(FinSet::new(a.clone())),
            FunctorDef::Product(a) => Endofunctor::ProductWith(FinSet::new(a.clone())),
        };
        let bad = |witness: String| CorpusError::Validation { block: name.into(), law: "psi".into(), witness };
        let psi = match &def.psi {
            PsiDef::Identity => PsiSpec::Identity,
            PsiDef::Top => PsiSpec::Top,
            PsiDef::Bottom => PsiSpec::Bottom,
            PsiDef::Constant(label) => {
                let size = match &functor {
                    Endofunctor::Constant(a) => a.size(),
                    _ => return Err(bad("a constant psi needs a constant functor".into())),
                };
                PsiSpec::Constant(p.parse_element(size, label).ok_or_else(|| bad(format!("{label:?} is not in Q({size})")))?)
            }
            PsiDef::Tensor(label) => PsiSpec::Tensor(p.base().index_of(label).ok_or_else(|| bad(format!("unknown label {label:?}")))?),
        };
        Ok((p, functor, psi))
    }

    pub fn budget(&self, name: &str) -> Option<Budget> {
        match self.find("budget", name) {
            Some(BlockBody::Budget(b)) => Some(b.clone()),
            _ => None,
        }
    }

    /// Builds every block, reporting the first that fails its laws.
    pub fn validate(&self) -> Result<(), CorpusError> {
        for b in &self.blocks {
            match &b.body {
                BlockBody::Quantale(_) => drop(self.quantale(&b.name)?),
                BlockBody::Relation(_) => drop(self.relation(&b.name)?),
                BlockBody::Presheaf(_) => drop(self.presheaf(&b.name)?),
                BlockBody::Dual(_) => drop(self.dual(&b.name)?),
                BlockBody::Endofunctor(_) => drop(self.endofunctor(&b.name)?),
                BlockBody::Budget(_) => {}
            }
        }
        Ok(())
    }

    /// Writes the corpus back in the text format.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            let fields: Vec<(&str, Value)> = match &b.body {
                BlockBody::Quantale(d) => vec![
                    ("labels", json!(d.labels)),
                    ("order", json!(d.order.iter().map(|(a, b)| [a, b]).collect::<Vec<_>>())),
                    ("unit", json!(d.unit)),
                    ("mult", json!(d.mult)),
                ],
                BlockBody::Relation(r) => vec![
                    ("quantale", json!(r.quantale)),
                    ("dom", set_value(&r.dom)),
                    ("cod", set_value(&r.cod)),
                    ("entries", json!(r.entries)),
                ],
                BlockBody::Presheaf(p) => {
                    let mut v = vec![("instance", json!(p.instance.to_string()))];
                    if let Some(q) = &p.quantale {
                        v.push(("quantale", json!(q)));
                    }
                    v
                }
                BlockBody::Dual(d) => vec![("presheaf", json!(d.presheaf)), ("omega", json!(d.omega))],
                BlockBody::Endofunctor(e) => {
                    let functor = match &e.functor {
                        FunctorDef::Identity => json!("identity"),
                        FunctorDef::Constant(a) => json!({ "constant": set_value(a) }),
                        FunctorDef::Product(a) => json!({ "product": set_value(a) }),
                    };
                    let psi = match &e.psi {
                        PsiDef::Identity => json!("identity"),
                        PsiDef::Top => json!("top"),
                        PsiDef::Bottom => json!("bottom"),
                        PsiDef::Constant(a) => json!({ "constant": a }),
                        PsiDef::Tensor(a) => json!({ "tensor": a }),
                    };
                    vec![("presheaf", json!(e.presheaf)), ("functor", functor), ("psi", psi)]
                }
                BlockBody::Budget(b) => vec![
                    ("max_obj", json!(b.max_obj)),
                    ("max_hom", json!(b.max_hom)),
                    ("max_pairs", json!(b.max_pairs)),
                    ("max_carrier", json!(b.max_carrier)),
                    ("seed", json!(b.seed)),
                ],
            };
            let _ = writeln!(out, "{} {} {{", b.body.kind(), b.name);
            for (k, v) in fields {
                let _ = writeln!(out, "  {k}: {v}");
            }
            out.push_str("}\n\n");
        }
        out
    }
}

fn quantale_error(block: &str, e: QuantaleError) -> CorpusError {
    let (law, witness) = match &e {
        QuantaleError::NotAssociative(a, b, c) => ("associative", format!("({a}, {b}, {c})")),
        QuantaleError::NotCommutative(a, b) => ("commutative", format!("({a}, {b})")),
        QuantaleError::UnitFails(a) => ("unit", a.clone()),
        QuantaleError::NotBilinear { a, subset } => ("bilinear", format!("{a} * join{{{}}}", subset.join(", "))),
        QuantaleError::Lattice(l) => ("lattice", l.to_string()),
        _ => ("table", e.to_string()),
    };
    CorpusError::Validation { block: block.into(), law: law.into(), witness }
}

/// Index form of a quantale block: the lattice and the multiplication grid.
pub fn quantale_tables(name: &str, def: &QuantaleDef) -> Result<(FinLattice, Elem, Vec<Vec<Elem>>), CorpusError> {
    let bad = |law: &str, witness: String| CorpusError::Validation { block: name.into(), law: law.into(), witness };
    let index: BTreeMap<&str, Elem> = def.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    if index.len() != def.labels.len() {
        return Err(bad("labels", "duplicate label".into()));
    }
    let look = |l: &str| index.get(l).copied().ok_or_else(|| bad("labels", format!("unknown label {l:?}")));
    let pairs = def.order.iter().map(|(a, b)| Ok((look(a)?, look(b)?))).collect::<Result<Vec<_>, CorpusError>>()?;
    let lat = FinLattice::from_pairs(def.labels.clone(), &pairs).map_err(|e: LatticeError| bad("lattice", e.to_string()))?;
    let n = def.labels.len();
    if def.mult.len() != n || def.mult.iter().any(|r| r.len() != n) {
        return Err(bad("mult", format!("table must be {n} x {n}")));
    }
    let mult = def.mult.iter().map(|r| r.iter().map(|l| look(l)).collect()).collect::<Result<_, _>>()?;
    Ok((lat, look(&def.unit)?, mult))
}

fn build_quantale(name: &str, def: &QuantaleDef) -> Result<FinQuantale, CorpusError> {
    let (lat, unit, mult) = quantale_tables(name, def)?;
    FinQuantale::new(name, Arc::new(lat), unit, mult).map_err(|e| quantale_error(name, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_is_a_parse_error() {
        assert!(matches!(CorpusFile::parse(""), Err(CorpusError::Parse { .. })));
        assert!(matches!(CorpusFile::parse("# only a comment\n"), Err(CorpusError::Parse { .. })));
    }

    #[test]
    fn bundled_quantales_build_except_max_chain() {
        let c = bundled();
        for name in c.names("quantale") {
            let built = c.quantale(name);
            assert_eq!(built.is_ok(), name != "maxchain3", "{name}: {built:?}");
        }
    }

    #[test]
    fn comment_inside_label_is_kept() {
        let c = CorpusFile::parse("quantale q {\n labels: [\"#\"]\n order: []\n unit: \"#\" # trailing\n mult: [[\"#\"]]\n}\n").unwrap();
        assert_eq!(c.quantale_def("q").unwrap().labels, vec!["#"]);
    }

    #[test]
    fn dangling_reference() {
        let text = "presheaf p {\n instance: \"powq\"\n quantale: \"nowhere\"\n}\n";
        assert_eq!(CorpusFile::parse(text), Err(CorpusError::DanglingReference("nowhere".into())));
    }

    #[test]
    fn unknown_key_is_reported_with_its_line() {
        let text = "budget b {\n max_obj: 1\n colour: 3\n}\n";
        assert_eq!(CorpusFile::parse(text).unwrap_err(), parse_err(3, "unknown key colour in budget block"));
    }
}
