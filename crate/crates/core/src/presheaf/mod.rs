//! Lattice-valued presheaves on the relation base, with their lax monoidal
//! structure.
//!
//! A presheaf sends each finite set to a complete lattice, each matrix to a
//! sup-preserving map, and carries a unit in the value at `{*}` and a
//! multiplication `μ : Q(X) × Q(Y) → Q(X × Y)`. Values depend only on the size
//! of the set, so the trait works with sizes; structural maps such as the
//! double dual are still passed as explicit matrices.

mod composed;
mod laws;
mod nuts;
mod orth;
mod powq;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use thiserror::Error;

pub use composed::{compose_with_endofunctor, Composed, Endofunctor};
pub use laws::{check_lax_extranatural, validate, FnFamily, IotaFamily, LaxReport, MixedFamily, MuFamily, Naturality};
pub use nuts::{nuts_presheaf, Nuts};
pub use orth::{orth_presheaf, Orth};
pub use powq::{powq_presheaf, PowQ};

use crate::lattice::{Carrier, Elem, Lattice, LatticeError};
use crate::quantale::FinQuantale;
use crate::relbase::{ev_relation, FinSet, QMat};
use crate::report::{Budget, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresheafError {
    #[error("{instance}: carrier for a {size}-element set exceeds the bound {limit}")]
    CarrierTooLarge { instance: String, size: usize, limit: usize },
    #[error("{instance}: law {law} violated: {witness}")]
    InternalLawViolation { instance: String, law: String, witness: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl PresheafError {
    pub(crate) fn from_verdicts(instance: &str, verdicts: &[Verdict]) -> Option<Self> {
        verdicts.iter().find(|v| !v.passed()).map(|v| PresheafError::InternalLawViolation {
            instance: instance.into(),
            law: v.law_id.clone(),
            witness: v.witness.as_ref().map(ToString::to_string).unwrap_or_default(),
        })
    }
}

/// A presheaf `Q : Rel(V)^op → SLatt` with lax monoidal structure, where `V`
/// is the quantale of the base.
pub trait LatticePresheaf: Send + Sync {
    fn name(&self) -> String;

    /// The quantale valuing the base matrices.
    fn base(&self) -> &Arc<FinQuantale>;

    /// The lattice assigned to a set of the given size.
    fn carrier(&self, x: usize) -> Result<Carrier, PresheafError>;

    /// `Q(f)`, pushing a value along a matrix.
    fn apply(&self, f: &QMat, a: Elem) -> Elem;

    /// The unit, an element of `Q({*})`.
    fn unit(&self) -> Elem;

    /// `μ_{X,Y}(a, b)` in `Q(X × Y)`.
    fn mu(&self, x: usize, y: usize, a: Elem, b: Elem) -> Elem;

    /// `⟨a, b⟩_{X,Y} = Q(ev)(μ(a, b))` for `a ∈ Q(X)` and `b ∈ Q(X ⊸ Y)`.
    fn pairing(&self, x: usize, y: usize, a: Elem, b: Elem) -> Elem {
        let ev = ev_relation(self.base(), &FinSet::of_size(x), &FinSet::of_size(y));
        self.apply(&ev, self.mu(x, x * y, a, b))
    }

    /// Whether `pairing` avoids the carrier of `X × (X ⊸ Y)`.
    fn has_direct_pairing(&self) -> bool {
        false
    }

    /// A closed formula for the internal hom, where the instance has one.
    fn internal_hom_closed(&self, _x: usize, _y: usize, _a: Elem, _c: Elem) -> Option<Elem> {
        None
    }

    fn describe(&self, x: usize, a: Elem) -> String {
        self.carrier(x).map(|c| c.label(a)).unwrap_or_else(|_| a.to_string())
    }

    /// Inverse of `describe`.
    fn parse_element(&self, x: usize, text: &str) -> Option<Elem> {
        let carrier = self.carrier(x).ok()?;
        let wanted: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        carrier.elements().into_iter().find(|&a| self.describe(x, a) == wanted)
    }

    fn supports(&self, x: usize) -> bool {
        self.carrier(x).is_ok()
    }
}

/// Whether `⟨−,−⟩_{X,Y}` can be evaluated.
pub fn can_pair(p: &dyn LatticePresheaf, x: usize, y: usize) -> bool {
    p.supports(x) && p.supports(y) && p.supports(x * y) && (p.has_direct_pairing() || p.supports(x * x * y))
}

/// Every element when the carrier fits the budget; otherwise a join-dense
/// sample plus the bounds.
pub fn elements_within(carrier: &Carrier, budget: &Budget) -> Vec<Elem> {
    if carrier.len() <= budget.max_carrier {
        carrier.elements()
    } else {
        let mut v = carrier.join_dense();
        v.push(carrier.bottom());
        v.push(carrier.top());
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Per-size carrier memo shared by the instances.
#[derive(Default)]
pub(crate) struct CarrierCache(Mutex<HashMap<usize, Carrier>>);

impl CarrierCache {
    pub(crate) fn get_or(
        &self,
        x: usize,
        build: impl FnOnce() -> Result<Carrier, PresheafError>,
    ) -> Result<Carrier, PresheafError> {
        if let Some(c) = self.0.lock().expect("cache lock").get(&x) {
            return Ok(c.clone());
        }
        let c = build()?;
        self.0.lock().expect("cache lock").insert(x, c.clone());
        Ok(c)
    }
}

/// The instance name as used on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    PowQ,
    Nuts,
    Orth,
}

impl std::str::FromStr for InstanceKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "powq" => Ok(InstanceKind::PowQ),
            "nuts" => Ok(InstanceKind::Nuts),
            "orth" => Ok(InstanceKind::Orth),
            other => Err(format!("unknown instance {other:?}; expected powq, nuts or orth")),
        }
    }
}

impl std::fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InstanceKind::PowQ => "powq",
            InstanceKind::Nuts => "nuts",
            InstanceKind::Orth => "orth",
        })
    }
}

/// Builds an instance without running validation.
pub fn instance(kind: InstanceKind, q: &Arc<FinQuantale>) -> Arc<dyn LatticePresheaf> {
    match kind {
        InstanceKind::PowQ => Arc::new(PowQ::new(q.clone())),
        InstanceKind::Nuts => Arc::new(Nuts::new()),
        InstanceKind::Orth => Arc::new(Orth::new(q.clone())),
    }
}
