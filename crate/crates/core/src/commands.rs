//! Command dispatch behind the `intq` binary: resolving corpus names, running
//! the checkers, and replaying stored reports.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{self, CorpusError, CorpusFile};
use crate::fixpoint::{check_lifting, EndoLift, FixpointError};
use crate::lattice::{right_adjoint_at, Elem, Lattice};
use crate::nucleus::{check_nucleus_laws, girard_agreement, iota_descends, representation_check, NucleusFamily, QjPresheaf};
use crate::presheaf::{instance, validate, InstanceKind, LatticePresheaf};
use crate::quantale::{law_verdicts, FinQuantale};
use crate::relbase::QMat;
use crate::report::{Budget, Law, Report, Status, Verdict, Witness};
use crate::total::{check_closed_structure, check_dualizing, lifted_structural_isos, pairing_twist_check};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Command {
    CheckQuantale,
    Girard,
    CheckDualizing,
    CheckClosed,
    Nucleus,
    Represent,
    Fixpoint,
    LiftCheck,
    Experiment,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::CheckQuantale,
        Command::Girard,
        Command::CheckDualizing,
        Command::CheckClosed,
        Command::Nucleus,
        Command::Represent,
        Command::Fixpoint,
        Command::LiftCheck,
        Command::Experiment,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::CheckQuantale => "check-quantale",
            Command::Girard => "girard",
            Command::CheckDualizing => "check-dualizing",
            Command::CheckClosed => "check-closed",
            Command::Nucleus => "nucleus",
            Command::Represent => "represent",
            Command::Fixpoint => "fixpoint",
            Command::LiftCheck => "lift-check",
            Command::Experiment => "experiment",
        }
    }
}

impl std::str::FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown command {s:?}"))
    }
}

impl std::fmt::Display for Command {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Check(String),
}

impl From<FixpointError> for RunError {
    fn from(e: FixpointError) -> Self {
        RunError::Check(e.to_string())
    }
}

/// One command line, normalized so that it can be stored and rerun.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Invocation {
    pub command: Option<Command>,
    /// A block name from the corpus; `None` runs over every applicable block.
    pub target: Option<String>,
    pub instance: Option<InstanceKind>,
    pub omega: Option<String>,
    pub max_obj: Option<usize>,
    /// An extra corpus file; its blocks shadow the bundled ones.
    pub corpus: Option<PathBuf>,
}

impl Invocation {
    pub fn new(command: Command) -> Self {
        Invocation { command: Some(command), ..Default::default() }
    }

    pub fn target(mut self, t: impl Into<String>) -> Self {
        self.target = Some(t.into());
        self
    }

    pub fn instance(mut self, k: InstanceKind) -> Self {
        self.instance = Some(k);
        self
    }

    pub fn omega(mut self, w: impl Into<String>) -> Self {
        self.omega = Some(w.into());
        self
    }

    pub fn max_obj(mut self, n: usize) -> Self {
        self.max_obj = Some(n);
        self
    }

    pub fn corpus(mut self, p: impl Into<PathBuf>) -> Self {
        self.corpus = Some(p.into());
        self
    }

    fn command(&self) -> Result<Command, RunError> {
        self.command.ok_or_else(|| RunError::Usage("no command given".into()))
    }

    /// The argument vector this invocation stands for.
    pub fn to_args(&self) -> Vec<String> {
        let mut args: Vec<String> = self.command.iter().map(|c| c.name().to_string()).collect();
        args.extend(self.target.clone());
        let mut flag = |name: &str, value: Option<String>| {
            if let Some(v) = value {
                args.push(format!("--{name}"));
                args.push(v);
            }
        };
        flag("instance", self.instance.map(|k| k.to_string()));
        flag("omega", self.omega.clone());
        flag("max-obj", self.max_obj.map(|n| n.to_string()));
        flag("corpus", self.corpus.as_ref().map(|p| p.display().to_string()));
        args
    }

    /// Inverse of [`Invocation::to_args`].
    pub fn from_args(args: &[String]) -> Result<Self, RunError> {
        let usage = |m: String| RunError::Usage(m);
        let mut inv = Invocation::default();
        let mut it = args.iter();
        while let Some(arg) = it.next() {
            let mut value = || it.next().cloned().ok_or_else(|| usage(format!("{arg} needs a value")));
            match arg.as_str() {
                "--instance" => inv.instance = Some(value()?.parse().map_err(usage)?),
                "--omega" => inv.omega = Some(value()?),
                "--max-obj" => inv.max_obj = Some(value()?.parse().map_err(|e| usage(format!("--max-obj: {e}")))?),
                "--corpus" => inv.corpus = Some(value()?.into()),
                flag if flag.starts_with("--") => return Err(usage(format!("unknown flag {flag}"))),
                word if inv.command.is_none() => inv.command = Some(word.parse().map_err(usage)?),
                word if inv.target.is_none() => inv.target = Some(word.to_string()),
                word => return Err(usage(format!("unexpected argument {word}"))),
            }
        }
        Ok(inv)
    }
}

/// The corpus an invocation runs against and the digest of its text.
pub struct LoadedCorpus {
    pub corpus: CorpusFile,
    pub digest: String,
}

pub fn load_corpus(inv: &Invocation) -> Result<LoadedCorpus, RunError> {
    let mut text = corpus::bundled_text();
    let mut corpus = corpus::bundled();
    if let Some(path) = &inv.corpus {
        let extra = std::fs::read_to_string(path).map_err(|e| RunError::Io { path: path.display().to_string(), message: e.to_string() })?;
        corpus = corpus.extended_with(&extra)?;
        text.push('\n');
        text.push_str(&extra);
    }
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    for arg in inv.to_args() {
        hasher.update([0]);
        hasher.update(arg.as_bytes());
    }
    Ok(LoadedCorpus { corpus, digest: hex::encode(hasher.finalize()) })
}

/// Loads the corpus, runs the command and stamps the report.
pub fn run(inv: &Invocation) -> Result<Report, RunError> {
    let loaded = load_corpus(inv)?;
    run_with(inv, &loaded)
}

pub fn run_with(inv: &Invocation, loaded: &LoadedCorpus) -> Result<Report, RunError> {
    let started = Instant::now();
    let cmd = inv.command()?;
    let ctx = Context { inv, corpus: &loaded.corpus };
    let mut out = Output::default();
    match cmd {
        Command::CheckQuantale => ctx.check_quantale(&mut out)?,
        Command::Girard => ctx.girard(&mut out)?,
        Command::CheckDualizing => ctx.check_dualizing(&mut out)?,
        Command::CheckClosed => ctx.check_closed(&mut out)?,
        Command::Nucleus => ctx.nucleus(&mut out)?,
        Command::Represent => ctx.represent(&mut out)?,
        Command::Fixpoint => ctx.fixpoint(&mut out)?,
        Command::LiftCheck => ctx.lift_check(&mut out)?,
        Command::Experiment => ctx.experiment(&mut out)?,
    }
    Ok(Report {
        command: cmd.name().into(),
        invocation: inv.to_args(),
        input_digest: loaded.digest.clone(),
        budgets: out.budgets,
        verdicts: out.verdicts,
        notes: out.notes,
        elapsed_ms: Some(started.elapsed().as_millis() as u64),
    })
}

/// Exit status of a finished or failed run.
pub fn exit_code(result: &Result<Report, RunError>) -> i32 {
    match result {
        Ok(report) => report.exit_code(),
        Err(_) => 2,
    }
}

/// Reruns the invocation stored in a report and checks that every failing
/// verdict reappears with the same witness.
///
/// The returned report carries the reproduced failures, so its exit code is
/// 1 when the violations still hold, plus one `replay.match` verdict that
/// fails if any stored witness was not reproduced exactly.
pub fn replay(stored: &Report) -> Result<Report, RunError> {
    let inv = Invocation::from_args(&stored.invocation)?;
    let fresh = run(&inv)?;
    let mut matched = Law::new("replay.match", "stored witnesses reproduce", "as stored");
    let mut verdicts = Vec::new();
    for old in stored.verdicts.iter().filter(|v| v.status == Status::Fail) {
        let same = fresh.verdicts.iter().find(|v| v.law_id == old.law_id && v.status == Status::Fail && v.witness == old.witness);
        matched.check(same.is_some(), || {
            let now = fresh.verdicts.iter().find(|v| v.law_id == old.law_id);
            Witness::new(
                "=",
                old.witness.as_ref().map(ToString::to_string).unwrap_or_default(),
                now.and_then(|v| v.witness.as_ref()).map(ToString::to_string).unwrap_or_else(|| "no violation".into()),
            )
            .bind("law", &old.law_id)
        });
        if let Some(v) = same {
            let mut v = v.clone();
            v.detail = Some("reproduced".into());
            verdicts.push(v);
        }
    }
    if matched.failed() || !verdicts.is_empty() || stored.verdicts.iter().any(|v| v.status == Status::Fail) {
        verdicts.push(matched.finish());
    } else {
        verdicts.push(Verdict::info("replay.match", "stored witnesses reproduce", "as stored", "nothing to replay"));
    }
    Ok(Report {
        command: format!("replay {}", stored.command),
        invocation: stored.invocation.clone(),
        input_digest: fresh.input_digest,
        budgets: fresh.budgets,
        verdicts,
        notes: Vec::new(),
        elapsed_ms: fresh.elapsed_ms,
    })
}

#[derive(Default)]
struct Output {
    budgets: BTreeMap<String, String>,
    verdicts: Vec<Verdict>,
    notes: Vec<String>,
}

impl Output {
    fn budget(&mut self, key: &str, b: &Budget) {
        self.budgets.insert(key.into(), b.to_string());
    }

    /// Appends verdicts, tagging each with the block it was run on.
    fn extend(&mut self, block: &str, verdicts: impl IntoIterator<Item = Verdict>) {
        for mut v in verdicts {
            v.detail = Some(match v.detail.take() {
                Some(d) => format!("{block}: {d}"),
                None => block.to_string(),
            });
            self.verdicts.push(v);
        }
    }
}

/// A presheaf resolved from a target, with the name to report it under.
struct Resolved {
    name: String,
    presheaf: Arc<dyn LatticePresheaf>,
    kind: InstanceKind,
    omega: Option<Elem>,
}

struct Context<'a> {
    inv: &'a Invocation,
    corpus: &'a CorpusFile,
}

impl Context<'_> {
    fn budget_for(&self, kind: Option<InstanceKind>) -> Budget {
        let named = kind.and_then(|k| self.corpus.budget(&k.to_string()));
        let mut b = named.or_else(|| self.corpus.budget("default")).unwrap_or_default();
        if let Some(n) = self.inv.max_obj {
            b.max_obj = n;
        }
        b
    }

    fn targets(&self, kind: &str) -> Result<Vec<String>, RunError> {
        match &self.inv.target {
            Some(t) => match self.corpus.kind_of(t) {
                Some(k) if k == kind => Ok(vec![t.clone()]),
                Some(k) => Err(RunError::Usage(format!("{t} is a {k} block; this command takes a {kind}"))),
                None => Err(CorpusError::DanglingReference(t.clone()).into()),
            },
            None => Ok(self.corpus.names(kind).into_iter().map(String::from).collect()),
        }
    }

    fn quantale_targets(&self) -> Result<Vec<(String, Arc<FinQuantale>)>, RunError> {
        self.targets("quantale")?.into_iter().map(|n| Ok((n.clone(), self.corpus.quantale(&n)?))).collect()
    }

    fn parse_omega(&self, p: &dyn LatticePresheaf, label: &str) -> Result<Elem, RunError> {
        p.parse_element(1, label)
            .ok_or_else(|| RunError::Usage(format!("--omega {label:?} is not an element of {}(1)", p.name())))
    }

    /// Resolves a quantale, presheaf or dual target to a presheaf, applying
    /// `--instance` and `--omega`.
    fn presheaf_target(&self, need_omega: bool) -> Result<Resolved, RunError> {
        let target = self.inv.target.as_deref().ok_or_else(|| RunError::Usage("this command needs a target".into()))?;
        let mut resolved = match self.corpus.kind_of(target) {
            Some("quantale") => {
                let q = self.corpus.quantale(target)?;
                let kind = self.inv.instance.unwrap_or(InstanceKind::PowQ);
                Resolved { name: format!("{kind}/{target}"), presheaf: instance(kind, &q), kind, omega: None }
            }
            Some("presheaf") => {
                let kind = self.corpus.presheaf_def(target)?.instance;
                Resolved { name: target.into(), presheaf: self.corpus.presheaf(target)?, kind, omega: None }
            }
            Some("dual") => {
                let def = self.corpus.dual_def(target)?;
                let kind = self.corpus.presheaf_def(&def.presheaf)?.instance;
                let (presheaf, omega) = self.corpus.dual(target)?;
                Resolved { name: target.into(), presheaf, kind, omega: Some(omega) }
            }
            Some(other) => return Err(RunError::Usage(format!("{target} is a {other} block"))),
            None => return Err(CorpusError::DanglingReference(target.into()).into()),
        };
        if let Some(label) = &self.inv.omega {
            resolved.omega = Some(self.parse_omega(resolved.presheaf.as_ref(), label)?);
        }
        if need_omega && resolved.omega.is_none() {
            return Err(RunError::Usage("this command needs --omega or a dual target".into()));
        }
        Ok(resolved)
    }

    fn check_quantale(&self, out: &mut Output) -> Result<(), RunError> {
        let budget = self.budget_for(None);
        out.budget("quantale", &budget);
        for name in self.targets("quantale")? {
            let def = self.corpus.quantale_def(&name)?;
            let (lat, unit, mult) = corpus::quantale_tables(&name, def)?;
            out.extend(&name, law_verdicts(&lat, unit, &mult, &budget));
        }
        Ok(())
    }

    fn girard(&self, out: &mut Output) -> Result<(), RunError> {
        let budget = self.budget_for(None);
        out.budget("quantale", &budget);
        for (name, q) in self.quantale_targets()? {
            let omegas: Vec<Elem> = match &self.inv.omega {
                Some(label) => vec![q.index_of(label).ok_or_else(|| RunError::Usage(format!("--omega {label:?} is not in {name}")))?],
                None => q.lattice().elements(),
            };
            for omega in omegas {
                let block = format!("{name} omega={}", q.label(omega));
                let (verdicts, table) = girard_verdicts(&q, omega, &budget);
                out.extend(&block, verdicts);
                out.notes.push(format!("quotient of {block}:\n{table}"));
            }
        }
        Ok(())
    }

    fn check_dualizing(&self, out: &mut Output) -> Result<(), RunError> {
        let r = self.presheaf_target(true)?;
        let budget = self.budget_for(Some(r.kind));
        out.budget(&r.name, &budget);
        let omega = r.omega.expect("checked");
        let p = r.presheaf.as_ref();
        let report = check_dualizing(p, omega, &budget);
        let block = format!("{} omega={}", r.name, p.describe(1, omega));
        out.extend(&block, report.verdicts);
        out.extend(&block, pairing_twist_check(p, omega, &budget));
        let rows: Vec<String> = report
            .objects
            .iter()
            .map(|o| format!("  |X|={}  criterion A: {}  criterion B: {}", o.size, yes(o.criterion_a), yes(o.criterion_b)))
            .collect();
        out.notes.push(format!("{block} dualizing: {}\n{}", yes(report.dualizing), rows.join("\n")));
        Ok(())
    }

    fn check_closed(&self, out: &mut Output) -> Result<(), RunError> {
        let r = self.presheaf_target(false)?;
        let budget = self.budget_for(Some(r.kind));
        out.budget(&r.name, &budget);
        let p = r.presheaf.as_ref();
        out.extend(&r.name, validate(p, &budget));
        out.extend(&r.name, lifted_structural_isos(p, &budget));
        out.extend(&r.name, check_closed_structure(p, &budget));
        Ok(())
    }

    fn lift_check(&self, out: &mut Output) -> Result<(), RunError> {
        let r = self.presheaf_target(false)?;
        let budget = self.budget_for(Some(r.kind));
        out.budget(&r.name, &budget);
        let p = r.presheaf.as_ref();
        out.extend(&r.name, validate(p, &budget));
        out.extend(&r.name, lifted_structural_isos(p, &budget));
        let mut relations = Vec::new();
        for name in self.corpus.names("relation") {
            let m = self.corpus.relation(name)?;
            if m.quantale() == p.base() {
                relations.push((name.to_string(), m));
            }
        }
        out.extend(&r.name, relation_verdicts(p, &relations, &budget));
        Ok(())
    }

    fn nucleus(&self, out: &mut Output) -> Result<(), RunError> {
        let r = self.presheaf_target(true)?;
        let budget = self.budget_for(Some(r.kind));
        out.budget(&r.name, &budget);
        let omega = r.omega.expect("checked");
        let block = format!("{} omega={}", r.name, r.presheaf.describe(1, omega));
        let family = Arc::new(NucleusFamily::new(r.presheaf.clone(), omega));
        let laws = check_nucleus_laws(&family, &budget);
        let sound = laws.iter().all(Verdict::passed);
        out.extend(&block, laws);
        if !sound {
            return Ok(());
        }
        let qj = QjPresheaf::new(family);
        out.extend(&block, validate(&qj, &budget));
        let dual = check_dualizing(&qj, omega, &budget);
        out.extend(&block, dual.verdicts);
        out.extend(&block, [iota_descends(&qj, &budget)]);
        if r.kind == InstanceKind::PowQ {
            let agreement = girard_agreement(r.presheaf.base(), omega, &budget).map_err(|e| RunError::Check(e.to_string()))?;
            out.extend(&block, agreement);
        }
        let c1 = qj.carrier(1).map_err(|e| RunError::Check(e.to_string()))?;
        let fixed: Vec<String> = c1.elements().into_iter().map(|a| qj.describe(1, a)).collect();
        out.notes.push(format!("{block} closed values at the unit object: {}", fixed.join(" ")));
        Ok(())
    }

    fn represent(&self, out: &mut Output) -> Result<(), RunError> {
        let budget = self.budget_for(Some(InstanceKind::Orth));
        out.budget("orth", &budget);
        for (name, q) in self.quantale_targets()? {
            let label = self.inv.omega.clone().unwrap_or_else(|| q.label(q.bottom()));
            let omega = q.index_of(&label).ok_or_else(|| RunError::Usage(format!("--omega {label:?} is not in {name}")))?;
            if q.is_dualizing(omega).is_err() {
                out.notes.push(format!("{name} omega={label} skipped: not dualizing"));
                continue;
            }
            let verdicts = representation_check(&q, omega, &budget).map_err(|e| RunError::Check(e.to_string()))?;
            out.extend(&format!("{name} omega={label}"), verdicts);
        }
        Ok(())
    }

    fn fixpoint(&self, out: &mut Output) -> Result<(), RunError> {
        for name in self.targets("endofunctor")? {
            let (p, functor, psi) = self.corpus.endofunctor(&name)?;
            let kind = self.corpus.presheaf_def(&self.corpus.endofunctor_def(&name)?.presheaf)?.instance;
            let budget = self.budget_for(Some(kind));
            out.budget(&name, &budget);
            match EndoLift::new(p, functor, psi, &budget) {
                Ok(lift) => out.extend(&name, check_lifting(&lift, &budget)?),
                Err(FixpointError::NotLax(w)) => {
                    let mut law = Law::new("fixpoint.psi_lax", "psi is lax natural", &budget);
                    law.check(false, || w);
                    out.extend(&name, [law.finish()]);
                }
                Err(e) => return Err(e.into()),
            }
        }
        Ok(())
    }

    /// For every `ω ∈ Q({*})`, whether `ω` is dualizing in the quantale
    /// `Q({*})` and whether `({*}, ω)` is dualizing in the total category.
    fn experiment(&self, out: &mut Output) -> Result<(), RunError> {
        let r = self.presheaf_target(false)?;
        let budget = self.budget_for(Some(r.kind));
        out.budget(&r.name, &budget);
        let p = r.presheaf.as_ref();
        let c1 = p.carrier(1).map_err(|e| RunError::Check(e.to_string()))?;
        let elems = c1.elements();
        let residual = |a: Elem, b: Elem| right_adjoint_at(&c1, &c1, |c| p.mu(1, 1, a, c), b);
        let omegas: Vec<Elem> = match r.omega {
            Some(w) => vec![w],
            None => elems.clone(),
        };
        let mut counts = BTreeMap::new();
        for omega in omegas {
            let unit_level = elems.iter().all(|&a| residual(residual(a, omega), omega) == a);
            let total_level = check_dualizing(p, omega, &budget).dualizing;
            *counts.entry((unit_level, total_level)).or_insert(0usize) += 1;
            let mut v = Verdict::info(
                "experiment.dualizing_levels",
                "dualizing at the unit object versus in the total category",
                budget.to_string(),
                format!("omega={}: unit quantale {}, total category {}", p.describe(1, omega), yes(unit_level), yes(total_level)),
            );
            v.checked = 1;
            out.verdicts.push(v);
        }
        let summary: Vec<String> =
            counts.iter().map(|((u, t), n)| format!("unit {} / total {}: {n}", yes(*u), yes(*t))).collect();
        out.notes.push(format!("{}: {}", r.name, summary.join("; ")));
        Ok(())
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Nucleus, quotient and dualizing checks for the double-negation quotient
/// of `q` at `ω`, plus a printable table of the quotient.
pub fn girard_verdicts(q: &FinQuantale, omega: Elem, budget: &Budget) -> (Vec<Verdict>, String) {
    let l = |a: Elem| q.label(a);
    let j = |a: Elem| q.double_negation(omega, a);
    let elems = q.lattice().elements();
    let mut nucleus = Law::new("girard.nucleus", "double negation is a nucleus", budget);
    let mut fixed_residual = Law::new("girard.residual_fixed", "residuals into fixed points are fixed", budget);
    for &a in &elems {
        nucleus.check(q.leq(a, j(a)) && j(j(a)) == j(a), || Witness::new("<=", l(a), l(j(a))).bind("j(j(a))", l(j(j(a)))));
        for &b in &elems {
            let (lhs, rhs) = (q.mul(j(a), j(b)), j(q.mul(a, b)));
            nucleus.check(q.leq(lhs, rhs) && (!q.leq(a, b) || q.leq(j(a), j(b))), || {
                Witness::new("<=", l(lhs), l(rhs)).bind("a", l(a)).bind("b", l(b))
            });
            if j(b) == b {
                let r = q.residual(a, b);
                fixed_residual.check(j(r) == r, || Witness::new("=", l(j(r)), l(r)).bind("a", l(a)).bind("b", l(b)));
            }
        }
    }
    let mut quotient_ok = Law::new("girard.quotient", "fixed points form a quantale", budget);
    let mut contains = Law::new("girard.contains_omega", "omega is a fixed point", budget);
    let mut dualizing = Law::new("girard.dualizing", "omega is dualizing in the quotient", budget);
    contains.check(j(omega) == omega, || Witness::new("=", l(j(omega)), l(omega)));
    let table = match q.girard_quotient(omega) {
        Ok(g) => {
            let gq = &g.quantale;
            let recheck = law_verdicts(gq.lattice(), gq.unit(), &gq.table(), budget);
            for v in recheck {
                quotient_ok.absorb(v.checked, v.witness.map(|w| w.bind("law", &v.law_id)));
            }
            let residual = |a: Elem, b: Elem| gq.residual(a, b);
            for a in gq.lattice().elements() {
                let back = residual(residual(a, g.omega), g.omega);
                dualizing.check(back == a, || Witness::new("=", gq.label(back), gq.label(a)).bind("a", gq.label(a)));
            }
            render_table(gq)
        }
        Err(e) => {
            quotient_ok.check(false, || Witness::new("is", "fixed points", e.to_string()));
            String::new()
        }
    };
    (vec![nucleus.finish(), fixed_residual.finish(), quotient_ok.finish(), contains.finish(), dualizing.finish()], table)
}

/// The multiplication grid of a quantale, labels on both axes.
pub fn render_table(q: &FinQuantale) -> String {
    let labels: Vec<String> = q.lattice().elements().into_iter().map(|a| q.label(a)).collect();
    let width = labels.iter().map(String::len).max().unwrap_or(1).max(1);
    let mut lines = vec![format!("{:>width$} | {}", "*", labels.iter().map(|s| format!("{s:>width$}")).collect::<Vec<_>>().join(" "))];
    for (a, row) in q.table().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|&c| format!("{:>width$}", q.label(c))).collect();
        lines.push(format!("{:>width$} | {}", labels[a], cells.join(" ")));
    }
    lines.push(format!("unit {}", q.label(q.unit())));
    lines.join("\n")
}

/// Functoriality and sup-preservation of `Q` on the corpus relations.
fn relation_verdicts(p: &dyn LatticePresheaf, relations: &[(String, QMat)], budget: &Budget) -> Vec<Verdict> {
    let mut sup = Law::new("lift.relation_sup_preserving", "corpus relations act by joins", budget);
    let mut functorial = Law::new("lift.relation_functorial", "corpus relations compose", budget);
    for (name, r) in relations {
        let (x, y) = (r.rows(), r.cols());
        let (Ok(cx), true) = (p.carrier(x), p.supports(y)) else { continue };
        let cy = p.carrier(y).expect("supported");
        let elems = crate::presheaf::elements_within(&cx, budget);
        for &a in &elems {
            for &b in &elems {
                let (lhs, rhs) = (p.apply(r, cx.join(a, b)), cy.join(p.apply(r, a), p.apply(r, b)));
                sup.check(lhs == rhs, || {
                    Witness::new("=", p.describe(y, lhs), p.describe(y, rhs)).bind("f", name).bind("alpha", p.describe(x, a)).bind("beta", p.describe(x, b))
                });
            }
        }
        sup.check(p.apply(r, cx.bottom()) == cy.bottom(), || Witness::new("=", p.describe(y, p.apply(r, cx.bottom())), p.describe(y, cy.bottom())).bind("f", name));
        let back = r.converse();
        let Ok(round) = r.compose(&back) else { continue };
        for &a in &elems {
            let (lhs, rhs) = (p.apply(&round, a), p.apply(&back, p.apply(r, a)));
            functorial.check(lhs == rhs, || Witness::new("=", p.describe(x, lhs), p.describe(x, rhs)).bind("f", name).bind("alpha", p.describe(x, a)));
        }
    }
    vec![sup.finish(), functorial.finish()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invocation_args_roundtrip() {
        let inv = Invocation::new(Command::CheckDualizing).target("godel3").instance(InstanceKind::PowQ).omega("0").max_obj(2);
        assert_eq!(Invocation::from_args(&inv.to_args()).unwrap(), inv);
    }

    #[test]
    fn godel_quotient_table_has_two_rows() {
        let g3 = crate::quantale::examples::godel(3);
        let (verdicts, table) = girard_verdicts(&g3, 0, &Budget::default());
        assert!(verdicts.iter().all(Verdict::passed));
        assert_eq!(table.lines().count(), 4, "{table}");
    }
}
