//! The double-negation nucleus on a presheaf and the quotient it induces.
//!
//! Given `ω ∈ Q({*})`, each object carries the closure `ȷ_X = lneg ∘ ω_X`.
//! Its fixed points form the presheaf `Q^ȷ` with action `ȷ_Y ∘ Q(f)` and
//! multiplication `ȷ ∘ μ`, whose total category is star-autonomous at `ω`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{closure_violation, Carrier, ClosedCarrier, Elem, Lattice};
use crate::presheaf::{
    can_pair, elements_within, validate, CarrierCache, LatticePresheaf, Orth, PowQ, PresheafError,
};
use crate::quantale::{FinQuantale, QuantaleError};
use crate::relbase::{morphisms, structural, FinSet, QMat, StructKind};
use crate::report::{Budget, Law, Status, Verdict, Witness};
use crate::total::{check_dualizing, internal_hom, lneg, omega_map};

/// Carriers up to this size get a memoized closure table.
const TABLE_LIMIT: usize = 1 << 16;

fn set(n: usize) -> FinSet {
    FinSet::of_size(n)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NucleusError {
    #[error("theorem violated: {law} fails with {witness}")]
    TheoremViolated { law: String, witness: String },
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error(transparent)]
    Quantale(#[from] QuantaleError),
}

impl NucleusError {
    fn from_verdicts(verdicts: &[Verdict]) -> Option<Self> {
        verdicts.iter().find(|v| v.status == Status::Fail).map(|v| NucleusError::TheoremViolated {
            law: v.law_id.clone(),
            witness: v.witness.as_ref().map(ToString::to_string).unwrap_or_default(),
        })
    }
}

/// The closures `ȷ_X` for a fixed `ω`, tabulated per object on first use.
pub struct NucleusFamily {
    presheaf: Arc<dyn LatticePresheaf>,
    omega: Elem,
    tables: Mutex<HashMap<usize, Arc<Vec<Elem>>>>,
}

impl NucleusFamily {
    pub fn new(presheaf: Arc<dyn LatticePresheaf>, omega: Elem) -> Self {
        NucleusFamily { presheaf, omega, tables: Mutex::default() }
    }

    pub fn presheaf(&self) -> &Arc<dyn LatticePresheaf> {
        &self.presheaf
    }

    pub fn omega(&self) -> Elem {
        self.omega
    }

    pub fn omega_map(&self, x: usize, a: Elem) -> Elem {
        omega_map(self.presheaf.as_ref(), self.omega, x, a)
    }

    pub fn lneg(&self, x: usize, b: Elem) -> Elem {
        lneg(self.presheaf.as_ref(), self.omega, x, b)
    }

    /// Whether `ȷ_X` can be evaluated on this object.
    pub fn supports(&self, x: usize) -> bool {
        can_pair(self.presheaf.as_ref(), x, 1)
    }

    /// `ȷ_X(α) = lneg(ω_X(α))`.
    pub fn jmath(&self, x: usize, a: Elem) -> Elem {
        match self.closure_table(x) {
            Ok(t) => t[a],
            Err(_) => self.lneg(x, self.omega_map(x, a)),
        }
    }

    /// `ȷ_X` on every element of `Q(X)`, indexed by element.
    pub fn closure_table(&self, x: usize) -> Result<Arc<Vec<Elem>>, PresheafError> {
        if let Some(t) = self.tables.lock().expect("table lock").get(&x) {
            return Ok(t.clone());
        }
        let carrier = self.presheaf.carrier(x)?;
        if carrier.len() > TABLE_LIMIT || !self.supports(x) {
            return Err(PresheafError::CarrierTooLarge { instance: self.presheaf.name(), size: x, limit: TABLE_LIMIT });
        }
        let table: Vec<Elem> = (0..carrier.len()).into_par_iter().map(|a| self.lneg(x, self.omega_map(x, a))).collect();
        let table = Arc::new(table);
        self.tables.lock().expect("table lock").insert(x, table.clone());
        Ok(table)
    }

    /// The lattice of `ȷ_X`-fixed points.
    pub fn closure_carrier(&self, x: usize) -> Result<Carrier, PresheafError> {
        let table = self.closure_table(x)?;
        Ok(Carrier::Closed(Arc::new(ClosedCarrier::new(self.presheaf.carrier(x)?, table.to_vec()))))
    }
}

/// The quotient presheaf `Q^ȷ`.
pub struct QjPresheaf {
    family: Arc<NucleusFamily>,
    carriers: CarrierCache,
}

impl QjPresheaf {
    /// The quotient without any checks; see [`build_qj`].
    pub fn new(family: Arc<NucleusFamily>) -> Self {
        QjPresheaf { family, carriers: CarrierCache::default() }
    }

    pub fn family(&self) -> &Arc<NucleusFamily> {
        &self.family
    }

    fn j(&self, x: usize, a: Elem) -> Elem {
        self.family.jmath(x, a)
    }
}

impl LatticePresheaf for QjPresheaf {
    fn name(&self) -> String {
        format!("{}/j", self.family.presheaf.name())
    }

    fn base(&self) -> &Arc<FinQuantale> {
        self.family.presheaf.base()
    }

    fn carrier(&self, x: usize) -> Result<Carrier, PresheafError> {
        self.carriers.get_or(x, || self.family.closure_carrier(x))
    }

    fn apply(&self, f: &QMat, a: Elem) -> Elem {
        self.j(f.cols(), self.family.presheaf.apply(f, a))
    }

    fn unit(&self) -> Elem {
        self.j(1, self.family.presheaf.unit())
    }

    fn mu(&self, x: usize, y: usize, a: Elem, b: Elem) -> Elem {
        self.j(x * y, self.family.presheaf.mu(x, y, a, b))
    }

    /// Closing the underlying pairing; equal to the default by the quotient law.
    fn pairing(&self, x: usize, y: usize, a: Elem, b: Elem) -> Elem {
        self.j(y, self.family.presheaf.pairing(x, y, a, b))
    }

    fn has_direct_pairing(&self) -> bool {
        self.family.presheaf.has_direct_pairing()
    }

    fn describe(&self, x: usize, a: Elem) -> String {
        self.family.presheaf.describe(x, a)
    }

    fn parse_element(&self, x: usize, text: &str) -> Option<Elem> {
        let a = self.family.presheaf.parse_element(x, text)?;
        (self.j(x, a) == a).then_some(a)
    }

    fn supports(&self, x: usize) -> bool {
        self.family.presheaf.supports(x) && self.family.closure_table(x).is_ok()
    }
}

/// Checks that `ȷ` is a nucleus compatible with the presheaf structure.
pub fn check_nucleus_laws(family: &NucleusFamily, budget: &Budget) -> Vec<Verdict> {
    let p = family.presheaf.as_ref();
    let sizes: Vec<usize> = budget.sizes().filter(|&n| family.closure_table(n).is_ok()).collect();
    let elems = |n: usize| elements_within(&p.carrier(n).expect("supported size"), budget);
    let show = |n: usize, a: Elem| p.describe(n, a);
    let j = |n: usize, a: Elem| family.jmath(n, a);
    let omega = family.omega;

    let mut closure = Law::new("nucleus.closure", "each component is a closure operator", budget);
    let mut quotient = Law::new("nucleus.quotient", "closure absorbs the action", budget);
    let mut firstgoal = Law::new("nucleus.firstgoal", "nucleus inequality for the multiplication", budget);
    let mut maingoal = Law::new("nucleus.maingoal", "closed multiplication ignores closure of arguments", budget);
    let mut double_impl = Law::new("nucleus.double_impl", "pairing against a product curries", budget);
    let mut impl_lax = Law::new("nucleus.impl_lax", "closure of the internal hom is below the hom of closures", budget);
    let mut omega_x_fixed = Law::new("nucleus.omega_x_fixed", "negations are closed", budget);
    let mut omega_fixed = Law::new("nucleus.omega_fixed", "omega is closed", budget);

    for &x in &sizes {
        let carrier = p.carrier(x).expect("supported size");
        if carrier.len() <= budget.max_carrier {
            let violation = closure_violation(&carrier, |a| j(x, a));
            closure.check(violation.is_none(), || {
                let v = violation.clone().expect("violation present");
                Witness::new("closure", v.to_string(), "closure operator").bind("|X|", x).bind("at", match v {
                    crate::lattice::ClosureViolation::NotInflationary(a)
                    | crate::lattice::ClosureViolation::NotIdempotent(a)
                    | crate::lattice::ClosureViolation::NotMonotone(a, _) => show(x, a),
                })
            });
        }
        for a in elems(x) {
            let w = family.omega_map(x, a);
            omega_x_fixed.check(j(x, w) == w, || Witness::new("=", show(x, j(x, w)), show(x, w)).bind("alpha", show(x, a)));
        }
        for &y in &sizes {
            for f in morphisms(p.base(), &set(x), &set(y), budget.max_hom, budget.seed) {
                for a in elems(x) {
                    let lhs = j(y, p.apply(&f, j(x, a)));
                    let rhs = j(y, p.apply(&f, a));
                    quotient.check(lhs == rhs, || {
                        Witness::new("=", show(y, lhs), show(y, rhs)).bind("f", f.describe()).bind("alpha", show(x, a))
                    });
                }
            }
            if !sizes.contains(&(x * y)) {
                continue;
            }
            let cxy = p.carrier(x * y).expect("supported size");
            for a in elems(x) {
                for b in elems(y) {
                    let m = p.mu(x, y, a, b);
                    let lhs = p.mu(x, y, j(x, a), b);
                    firstgoal.check(cxy.leq(lhs, j(x * y, m)), || {
                        Witness::new("<=", show(x * y, lhs), show(x * y, j(x * y, m))).bind("alpha", show(x, a)).bind("beta", show(y, b))
                    });
                    let closed = j(x * y, p.mu(x, y, j(x, a), j(y, b)));
                    maingoal.check(closed == j(x * y, m), || {
                        Witness::new("=", show(x * y, closed), show(x * y, j(x * y, m))).bind("alpha", show(x, a)).bind("beta", show(y, b))
                    });
                    if can_pair(p, x, y) {
                        let chom = p.carrier(x * y).expect("supported size");
                        let lhs = j(x * y, internal_hom(p, x, y, a, b));
                        let rhs = internal_hom(p, x, y, j(x, a), j(y, b));
                        impl_lax.check(chom.leq(lhs, rhs), || {
                            Witness::new("<=", show(x * y, lhs), show(x * y, rhs)).bind("alpha", show(x, a)).bind("beta", show(y, b))
                        });
                    }
                }
            }
        }
    }
    if sizes.contains(&1) {
        omega_fixed.check(j(1, omega) == omega, || Witness::new("=", show(1, j(1, omega)), show(1, omega)));
    }

    let bound = budget.max_obj * budget.max_obj;
    let all: Vec<usize> = budget.sizes().filter(|&n| p.supports(n)).collect();
    for &x in &all {
        for &y in &all {
            for &z in &all {
                let (xy, xz, xyz) = (x * y, x * z, x * y * z);
                if xyz > bound || !(can_pair(p, xy, z) && can_pair(p, y, xz) && can_pair(p, x, z)) {
                    continue;
                }
                let psi = structural(p.base(), StructKind::Curry, &[set(x), set(y), set(z)]);
                for a in elems(x) {
                    for b in elems(y) {
                        let m = p.mu(x, y, a, b);
                        for g in elems(xyz) {
                            let lhs = p.pairing(xy, z, m, g);
                            let inner = p.pairing(y, xz, b, p.apply(psi.mat(), g));
                            let rhs = p.pairing(x, z, a, inner);
                            double_impl.check(lhs == rhs, || {
                                Witness::new("=", show(z, lhs), show(z, rhs))
                                    .bind("alpha", show(x, a))
                                    .bind("beta", show(y, b))
                                    .bind("gamma", show(xyz, g))
                            });
                        }
                    }
                }
            }
        }
    }

    vec![
        closure.finish(),
        quotient.finish(),
        firstgoal.finish(),
        maingoal.finish(),
        double_impl.finish(),
        impl_lax.finish(),
        omega_x_fixed.finish(),
        omega_fixed.finish(),
    ]
}

/// Whether the internal hom of `Q` restricted to closed values agrees with
/// the internal hom computed inside `Q^ȷ`. Recorded, never asserted.
pub fn iota_descends(qj: &QjPresheaf, budget: &Budget) -> Verdict {
    let p = qj.family.presheaf.as_ref();
    let sizes: Vec<usize> = budget.sizes().filter(|&n| qj.supports(n)).collect();
    let mut law = Law::new("nucleus.iota_descends", "internal hom on closed values", budget);
    for &x in &sizes {
        for &y in &sizes {
            if !(can_pair(qj, x, y) && qj.supports(x * y)) {
                continue;
            }
            for a in elements_within(&qj.carrier(x).expect("supported"), budget) {
                for c in elements_within(&qj.carrier(y).expect("supported"), budget) {
                    let inside = internal_hom(qj, x, y, a, c);
                    let outside = internal_hom(p, x, y, a, c);
                    law.check(inside == outside, || {
                        Witness::new("=", p.describe(x * y, inside), p.describe(x * y, outside))
                            .bind("alpha", p.describe(x, a))
                            .bind("gamma", p.describe(y, c))
                    });
                }
            }
        }
    }
    let failed = law.failed();
    law.note(if failed { "the quotient hom differs from the restricted hom" } else { "the quotient hom is the restricted hom" });
    let mut v = law.finish();
    if v.status != Status::Skipped {
        v.status = Status::Info;
    }
    v
}

/// Builds `Q^ȷ` after checking the nucleus laws, revalidating the quotient as
/// a presheaf, and checking that `ω` is dualizing for its total category.
pub fn build_qj(family: Arc<NucleusFamily>, budget: &Budget) -> Result<Arc<QjPresheaf>, NucleusError> {
    let laws = check_nucleus_laws(&family, budget);
    if let Some(e) = NucleusError::from_verdicts(&laws) {
        return Err(e);
    }
    let omega = family.omega;
    let qj = Arc::new(QjPresheaf::new(family));
    if let Some(e) = NucleusError::from_verdicts(&validate(qj.as_ref(), budget)) {
        return Err(e);
    }
    let dual = check_dualizing(qj.as_ref(), omega, budget);
    if let Some(e) = NucleusError::from_verdicts(&dual.verdicts) {
        return Err(e);
    }
    Ok(qj)
}

/// Compares `Q^ȷ({*})` for the vector presheaf over `q` with the Girard
/// quotient of `q` at `ω`: same elements, unit and multiplication.
pub fn girard_agreement(q: &Arc<FinQuantale>, omega: Elem, budget: &Budget) -> Result<Vec<Verdict>, NucleusError> {
    let family = Arc::new(NucleusFamily::new(Arc::new(PowQ::new(q.clone())), omega));
    let qj = QjPresheaf::new(family);
    let quotient = q.girard_quotient(omega)?;
    let fixed = qj.carrier(1)?.elements();
    let label = |a: Elem| q.label(a);

    let mut elements = Law::new("nucleus.girard_elements", "fixed points at the unit object", budget);
    let mut sorted = quotient.embed.clone();
    sorted.sort_unstable();
    elements.check(fixed == sorted, || {
        Witness::new(
            "=",
            format!("{:?}", fixed.iter().map(|&a| label(a)).collect::<Vec<_>>()),
            format!("{:?}", sorted.iter().map(|&a| label(a)).collect::<Vec<_>>()),
        )
    });
    let mut unit = Law::new("nucleus.girard_unit", "closed unit", budget);
    let quotient_unit = quotient.embed[quotient.quantale.unit()];
    unit.check(qj.unit() == quotient_unit, || Witness::new("=", label(qj.unit()), label(quotient_unit)));
    let mut mult = Law::new("nucleus.girard_multiplication", "closed multiplication", budget);
    for (i, &a) in quotient.embed.iter().enumerate() {
        for (k, &b) in quotient.embed.iter().enumerate() {
            let ours = qj.mu(1, 1, a, b);
            let theirs = quotient.embed[quotient.quantale.mul(i, k)];
            mult.check(ours == theirs, || Witness::new("=", label(ours), label(theirs)).bind("a", label(a)).bind("b", label(b)));
        }
    }
    Ok(vec![elements.finish(), unit.finish(), mult.finish()])
}

/// Representation of `Q` inside the closed subsets of `P ∘ UQ`.
///
/// With `⊥⊥ = {x ∈ UQ({*}) | x <= ω}` as the dual candidate for the subset
/// presheaf, checks that the closed subsets of `P(UQ(X))` are exactly the
/// principal downsets, that `α ↦ ↓α` is an order isomorphism, and that it
/// commutes with the actions of all base matrices in budget.
pub fn representation_check(q: &Arc<FinQuantale>, omega: Elem, budget: &Budget) -> Result<Vec<Verdict>, NucleusError> {
    let vectors = PowQ::new(q.clone());
    let orth = Arc::new(Orth::with_limit(q.clone(), 10));
    let bot_bot: Elem = (0..q.len()).filter(|&x| q.leq(x, omega)).fold(0, |acc, x| acc | 1 << x);
    let family = NucleusFamily::new(orth.clone(), bot_bot);

    let sizes: Vec<usize> = budget.sizes().filter(|&n| orth.supports(n)).collect();
    let mut principal = Law::new("represent.principal", "closed subsets are principal downsets", budget);
    let mut iso = Law::new("represent.order_iso", "downset map is an order isomorphism", budget);
    let mut natural = Law::new("represent.natural", "downset map is natural", budget);

    let downset = |x: usize, a: Elem| -> Elem {
        let cx = vectors.carrier(x).expect("vector carrier");
        (0..cx.len()).filter(|&g| cx.leq(g, a)).fold(0, |acc, g| acc | 1 << g)
    };
    for &x in &sizes {
        let cx = vectors.carrier(x)?;
        let table = family.closure_table(x)?;
        let closed: Vec<Elem> = (0..table.len()).filter(|&s| table[s] == s).collect();
        let downs: Vec<Elem> = (0..cx.len()).map(|a| downset(x, a)).collect();
        for &s in &closed {
            let top = cx.join_all((0..cx.len()).filter(|g| s >> g & 1 == 1));
            principal.check(s == downs[top], || {
                Witness::new("=", orth.describe(x, s), orth.describe(x, downs[top])).bind("|X|", x)
            });
        }
        iso.check(closed.len() == downs.len(), || {
            Witness::new("=", format!("{} closed subsets", closed.len()), format!("{} elements", downs.len())).bind("|X|", x)
        });
        for a in 0..cx.len() {
            iso.check(table[downs[a]] == downs[a], || {
                Witness::new("=", orth.describe(x, table[downs[a]]), orth.describe(x, downs[a])).bind("alpha", vectors.describe(x, a))
            });
            for b in 0..cx.len() {
                let ordered = cx.leq(a, b);
                let included = downs[a] & !downs[b] == 0;
                iso.check(ordered == included, || {
                    Witness::new("iff", format!("alpha <= beta: {ordered}"), format!("inclusion: {included}"))
                        .bind("alpha", vectors.describe(x, a))
                        .bind("beta", vectors.describe(x, b))
                });
            }
        }
        for &y in &sizes {
            for f in morphisms(q, &set(x), &set(y), budget.max_hom, budget.seed) {
                for a in 0..cx.len() {
                    let lhs = family.jmath(y, orth.apply(&f, downs[a]));
                    let rhs = downset(y, vectors.apply(&f, a));
                    natural.check(lhs == rhs, || {
                        Witness::new("=", orth.describe(y, lhs), orth.describe(y, rhs)).bind("f", f.describe()).bind("alpha", vectors.describe(x, a))
                    });
                }
            }
        }
    }
    Ok(vec![principal.finish(), iso.finish(), natural.finish()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantale::examples::{godel, lukasiewicz};

    #[test]
    fn godel_half_closes_to_top() {
        let family = NucleusFamily::new(Arc::new(PowQ::new(Arc::new(godel(3)))), 0);
        let p = family.presheaf().clone();
        let half = p.parse_element(1, "(1/2)").unwrap();
        assert_eq!(p.describe(1, family.jmath(1, half)), "(1)");
    }

    #[test]
    fn lukasiewicz_closure_is_identity() {
        let family = NucleusFamily::new(Arc::new(PowQ::new(Arc::new(lukasiewicz(3)))), 0);
        let table = family.closure_table(2).unwrap();
        assert!(table.iter().enumerate().all(|(a, &b)| a == b));
    }
}
