//! The total category of a presheaf and its closed and dualizing structure.
//!
//! An object is a set `X` with a value `α ∈ Q(X)`; a matrix `f : X → Y` is a
//! morphism `(X, α) → (Y, β)` exactly when `Q(f)(α) <= β`. The monoidal
//! structure lifts along `μ`, and the internal hom on values is the right
//! adjoint `ι` of the pairing `⟨α, β⟩ = Q(ev)(μ(α, β))`.

use thiserror::Error;

use crate::lattice::{right_adjoint_at, Elem, Lattice};
use crate::presheaf::{can_pair, elements_within, LatticePresheaf, PresheafError};
use crate::relbase::{eta_relation, structural, FinSet, QMat, RelError, StructKind};
use crate::report::{Budget, Law, Verdict, Witness};

fn set(n: usize) -> FinSet {
    FinSet::of_size(n)
}

fn homs(p: &dyn LatticePresheaf, x: usize, y: usize, budget: &Budget) -> Vec<QMat> {
    crate::relbase::morphisms(p.base(), &set(x), &set(y), budget.max_hom, budget.seed)
}

/// An object of the total category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotalObj {
    pub set: FinSet,
    pub value: Elem,
}

impl TotalObj {
    pub fn new(set: FinSet, value: Elem) -> Self {
        TotalObj { set, value }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TotalError {
    #[error("not a morphism: {0}")]
    NotAMorphism(Witness),
    #[error("not an isomorphism: {0}")]
    NotAnIso(Witness),
    #[error(transparent)]
    Rel(#[from] RelError),
}

/// `Q(f)(α) <= β`, or the violated inequality.
pub fn is_morphism(p: &dyn LatticePresheaf, src: &TotalObj, f: &QMat, dst: &TotalObj) -> Result<(), Witness> {
    let (x, y) = (src.set.size(), dst.set.size());
    if f.rows() != x || f.cols() != y {
        return Err(Witness::new("shape", format!("{}x{}", f.rows(), f.cols()), format!("{x}x{y}")));
    }
    let carrier = p.carrier(y).map_err(|e| Witness::new("carrier", e.to_string(), ""))?;
    let image = p.apply(f, src.value);
    if carrier.leq(image, dst.value) {
        Ok(())
    } else {
        Err(Witness::new("<=", p.describe(y, image), p.describe(y, dst.value))
            .bind("f", f.describe())
            .bind("alpha", p.describe(x, src.value)))
    }
}

/// `f` is invertible in the base and `Q(f)(α) = β`.
pub fn is_iso(p: &dyn LatticePresheaf, src: &TotalObj, f: &QMat, dst: &TotalObj) -> Result<(), Witness> {
    let y = dst.set.size();
    if f.inverse().is_none() {
        return Err(Witness::new("invertible", f.describe(), "no inverse"));
    }
    let image = p.apply(f, src.value);
    if image == dst.value {
        Ok(())
    } else {
        Err(Witness::new("=", p.describe(y, image), p.describe(y, dst.value)).bind("f", f.describe()))
    }
}

/// A morphism of the total category, checked on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotalMor {
    src: TotalObj,
    dst: TotalObj,
    f: QMat,
}

impl TotalMor {
    pub fn new(p: &dyn LatticePresheaf, src: TotalObj, f: QMat, dst: TotalObj) -> Result<Self, TotalError> {
        is_morphism(p, &src, &f, &dst).map_err(TotalError::NotAMorphism)?;
        Ok(TotalMor { src, dst, f })
    }

    pub fn src(&self) -> &TotalObj {
        &self.src
    }
    pub fn dst(&self) -> &TotalObj {
        &self.dst
    }
    pub fn matrix(&self) -> &QMat {
        &self.f
    }

    /// Diagrammatic composite, rechecked against the presheaf.
    pub fn compose(&self, p: &dyn LatticePresheaf, then: &TotalMor) -> Result<TotalMor, TotalError> {
        let f = self.f.compose(&then.f)?;
        TotalMor::new(p, self.src.clone(), f, then.dst.clone())
    }
}

/// `(X, α) ⊗ (Y, β) = (X × Y, μ(α, β))`.
pub fn lifted_tensor(p: &dyn LatticePresheaf, a: &TotalObj, b: &TotalObj) -> TotalObj {
    TotalObj::new(a.set.product(&b.set), p.mu(a.set.size(), b.set.size(), a.value, b.value))
}

/// `({*}, u)`.
pub fn lifted_unit(p: &dyn LatticePresheaf) -> TotalObj {
    TotalObj::new(FinSet::unit(), p.unit())
}

/// Checks that the unitors, associator and symmetry lift to isomorphisms.
pub fn lifted_structural_isos(p: &dyn LatticePresheaf, budget: &Budget) -> Vec<Verdict> {
    let q = p.base();
    let sizes: Vec<usize> = budget.sizes().filter(|&n| p.supports(n)).collect();
    let elems = |n: usize| elements_within(&p.carrier(n).expect("supported size"), budget);
    let unit = lifted_unit(p);
    let mut left = Law::new("total.iso.left_unitor", "unitors lift to isomorphisms", budget);
    let mut right = Law::new("total.iso.right_unitor", "unitors lift to isomorphisms", budget);
    let mut assoc = Law::new("total.iso.associator", "associator lifts to an isomorphism", budget);
    let mut sym = Law::new("total.iso.symmetry", "symmetry lifts to an isomorphism", budget);
    for &x in &sizes {
        for a in elems(x) {
            let obj = TotalObj::new(set(x), a);
            let lam = structural(q, StructKind::LeftUnitor, &[set(x)]);
            let r = is_iso(p, &lifted_tensor(p, &unit, &obj), lam.mat(), &obj);
            left.check(r.is_ok(), || r.clone().unwrap_err().bind("|X|", x));
            let rho = structural(q, StructKind::RightUnitor, &[set(x)]);
            let r = is_iso(p, &lifted_tensor(p, &obj, &unit), rho.mat(), &obj);
            right.check(r.is_ok(), || r.clone().unwrap_err().bind("|X|", x));
        }
        for &y in &sizes {
            if !p.supports(x * y) {
                continue;
            }
            let sigma = structural(q, StructKind::Symmetry, &[set(x), set(y)]);
            for a in elems(x) {
                for b in elems(y) {
                    let (oa, ob) = (TotalObj::new(set(x), a), TotalObj::new(set(y), b));
                    let r = is_iso(p, &lifted_tensor(p, &oa, &ob), sigma.mat(), &lifted_tensor(p, &ob, &oa));
                    sym.check(r.is_ok(), || r.clone().unwrap_err());
                }
            }
            for &z in &sizes {
                if !(p.supports(y * z) && p.supports(x * y * z)) {
                    continue;
                }
                let alpha = structural(q, StructKind::Associator, &[set(x), set(y), set(z)]);
                for a in elems(x) {
                    for b in elems(y) {
                        for c in elems(z) {
                            let (oa, ob, oc) = (TotalObj::new(set(x), a), TotalObj::new(set(y), b), TotalObj::new(set(z), c));
                            let src = lifted_tensor(p, &lifted_tensor(p, &oa, &ob), &oc);
                            let dst = lifted_tensor(p, &oa, &lifted_tensor(p, &ob, &oc));
                            let r = is_iso(p, &src, alpha.mat(), &dst);
                            assoc.check(r.is_ok(), || r.clone().unwrap_err());
                        }
                    }
                }
            }
        }
    }
    vec![left.finish(), right.finish(), assoc.finish(), sym.finish()]
}

/// `⟨α, β⟩_{X,Y}` for `α ∈ Q(X)`, `β ∈ Q(X ⊸ Y)`.
pub fn pairing(p: &dyn LatticePresheaf, x: usize, y: usize, a: Elem, b: Elem) -> Elem {
    p.pairing(x, y, a, b)
}

/// `ι(α, γ)` as the join of the join-dense part of `Q(X ⊸ Y)` paired below `γ`.
pub fn internal_hom_dense(p: &dyn LatticePresheaf, x: usize, y: usize, a: Elem, c: Elem) -> Elem {
    let hom = p.carrier(x * y).expect("supported size");
    let cy = p.carrier(y).expect("supported size");
    right_adjoint_at(&hom, &cy, |b| p.pairing(x, y, a, b), c)
}

/// `ι_{X,Y}(α, γ)`, by the closed formula when the instance has one.
pub fn internal_hom(p: &dyn LatticePresheaf, x: usize, y: usize, a: Elem, c: Elem) -> Elem {
    p.internal_hom_closed(x, y, a, c).unwrap_or_else(|| internal_hom_dense(p, x, y, a, c))
}

/// `⋁{β ∈ Q(X ⊸ Y) | ⟨α, β⟩ <= γ}`, enumerating the whole carrier.
pub fn internal_hom_oracle(
    p: &dyn LatticePresheaf,
    x: usize,
    y: usize,
    a: Elem,
    c: Elem,
    budget: &Budget,
) -> Result<Elem, PresheafError> {
    let hom = p.carrier(x * y)?;
    if hom.len() > budget.max_carrier {
        return Err(PresheafError::CarrierTooLarge { instance: p.name(), size: x * y, limit: budget.max_carrier });
    }
    let cy = p.carrier(y)?;
    Ok(hom.join_all(hom.elements().into_iter().filter(|&b| cy.leq(p.pairing(x, y, a, b), c))))
}

/// Checks the lifted closed structure: the adjunction, agreement of every
/// route to `ι`, definability of `μ` from the pairing, unit and counit, and
/// naturality of `ι` and `ω` in the contravariant slot.
pub fn check_closed_structure(p: &dyn LatticePresheaf, budget: &Budget) -> Vec<Verdict> {
    let sizes: Vec<usize> = budget.sizes().filter(|&n| p.supports(n)).collect();
    let elems = |n: usize| elements_within(&p.carrier(n).expect("supported size"), budget);
    let show = |n: usize, a: Elem| p.describe(n, a);
    let q = p.base();

    let mut adjunction = Law::new("closed.adjunction", "pairing is left adjoint to the internal hom", budget);
    let mut oracle = Law::new("closed.oracle_agreement", "internal hom: closed form, dense join and oracle agree", budget);
    let mut counit = Law::new("closed.counit", "counit inequality", budget);
    let mut unit = Law::new("closed.unit", "unit inequality", budget);
    let mut definable = Law::new("closed.mu_definable", "multiplication is definable from the pairing", budget);
    let mut natural = Law::new("closed.iota_natural", "internal hom transforms along right adjoints", budget);
    let mut natural_iso = Law::new("closed.iota_natural_iso", "internal hom along invertible maps", budget);
    let mut omega_natural = Law::new("closed.omega_natural", "negation is natural", budget);

    for &x in &sizes {
        for &y in &sizes {
            if !can_pair(p, x, y) {
                continue;
            }
            let (ex, ey) = (elems(x), elems(y));
            let hom = p.carrier(x * y).expect("supported size");
            let cy = p.carrier(y).expect("supported size");
            let iota = |a, c| internal_hom(p, x, y, a, c);
            if hom.len() <= budget.max_carrier {
                let eh = hom.elements();
                for &a in &ex {
                    let paired: Vec<Elem> = eh.iter().map(|&b| p.pairing(x, y, a, b)).collect();
                    for &c in &ey {
                        let via_oracle = hom.join_all(eh.iter().zip(&paired).filter(|(_, &v)| cy.leq(v, c)).map(|(&b, _)| b));
                        let via_dense = internal_hom_dense(p, x, y, a, c);
                        let via_default = iota(a, c);
                        oracle.check(via_oracle == via_dense && via_dense == via_default, || {
                            Witness::new("=", show(x * y, via_default), show(x * y, via_oracle))
                                .bind("alpha", show(x, a))
                                .bind("gamma", show(y, c))
                                .bind("dense", show(x * y, via_dense))
                        });
                        for (&b, &v) in eh.iter().zip(&paired) {
                            let left = cy.leq(v, c);
                            let right = hom.leq(b, via_default);
                            adjunction.check(left == right, || {
                                Witness::new("iff", format!("<{},{}> <= {}: {left}", show(x, a), show(x * y, b), show(y, c)), format!("{} <= {}: {right}", show(x * y, b), show(x * y, via_default)))
                            });
                        }
                    }
                }
            }
            for &a in &ex {
                for &c in &ey {
                    let i = iota(a, c);
                    let back = p.pairing(x, y, a, i);
                    counit.check(cy.leq(back, c), || {
                        Witness::new("<=", show(y, back), show(y, c)).bind("alpha", show(x, a)).bind("gamma", show(y, c))
                    });
                }
            }
            if can_pair(p, x, x * y) {
                let eta = eta_relation(q, &set(x), &set(y));
                for &a in &ex {
                    for &b in &ey {
                        let m = p.mu(x, y, a, b);
                        let qeta = p.apply(&eta, b);
                        let via_pairing = p.pairing(x, x * y, a, qeta);
                        definable.check(m == via_pairing, || {
                            Witness::new("=", show(x * y, m), show(x * y, via_pairing)).bind("alpha", show(x, a)).bind("beta", show(y, b))
                        });
                        let target = internal_hom(p, x, x * y, a, m);
                        let chom = p.carrier(x * x * y).expect("supported size");
                        unit.check(chom.leq(qeta, target), || {
                            Witness::new("<=", show(x * x * y, qeta), show(x * x * y, target)).bind("alpha", show(x, a)).bind("beta", show(y, b))
                        });
                    }
                }
            }
        }
    }

    for &x in &sizes {
        for &x2 in &sizes {
            for &z in &sizes {
                if !(can_pair(p, x, z) && can_pair(p, x2, z)) {
                    continue;
                }
                let (src_hom, dst_hom) = (p.carrier(x2 * z).expect("supported"), p.carrier(x * z).expect("supported"));
                let id_z = QMat::identity(q, &set(z));
                for f in homs(p, x, x2, budget) {
                    let pulled = QMat::hom_map(&f, &id_z);
                    let inverse_push = f.inverse().map(|g| QMat::hom_map(&g, &id_z));
                    for a in elems(x) {
                        let fa = p.apply(&f, a);
                        for c in elems(z) {
                            let lhs = internal_hom(p, x2, z, fa, c);
                            let at = internal_hom(p, x, z, a, c);
                            let rhs = right_adjoint_at(&src_hom, &dst_hom, |b| p.apply(&pulled, b), at);
                            natural.check(lhs == rhs, || {
                                Witness::new("=", show(x2 * z, lhs), show(x2 * z, rhs))
                                    .bind("f", f.describe())
                                    .bind("alpha", show(x, a))
                                    .bind("gamma", show(z, c))
                            });
                            if let Some(push) = &inverse_push {
                                let rhs_iso = p.apply(push, at);
                                natural_iso.check(lhs == rhs_iso, || {
                                    Witness::new("=", show(x2 * z, lhs), show(x2 * z, rhs_iso)).bind("f", f.describe()).bind("alpha", show(x, a))
                                });
                            }
                            if z == 1 {
                                omega_natural.check(lhs == rhs, || {
                                    Witness::new("=", show(x2, lhs), show(x2, rhs))
                                        .bind("omega", show(1, c))
                                        .bind("f", f.describe())
                                        .bind("alpha", show(x, a))
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    vec![
        adjunction.finish(),
        oracle.finish(),
        counit.finish(),
        unit.finish(),
        definable.finish(),
        natural.finish(),
        natural_iso.finish(),
        omega_natural.finish(),
    ]
}

/// `ω_X(α) = ι_{X,0}(α, ω)`, landing in `Q(X*)`.
pub fn omega_map(p: &dyn LatticePresheaf, omega: Elem, x: usize, a: Elem) -> Elem {
    internal_hom(p, x, 1, a, omega)
}

/// `⋁{α ∈ Q(X) | ⟨α, β⟩_X <= ω}`, the adjoint of `ω_X` on the other side.
pub fn lneg(p: &dyn LatticePresheaf, omega: Elem, x: usize, b: Elem) -> Elem {
    let cx = p.carrier(x).expect("supported size");
    let c1 = p.carrier(1).expect("supported size");
    right_adjoint_at(&cx, &c1, |a| p.pairing(x, 1, a, b), omega)
}

/// Outcome of both dualizing criteria on one object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectDualizing {
    pub size: usize,
    /// `ω_X` is inverse to `lneg`.
    pub criterion_a: bool,
    /// `Q(j_X) = ω_{X*} ∘ ω_X` with `j_X` invertible.
    pub criterion_b: bool,
}

#[derive(Debug, Clone)]
pub struct DualizingReport {
    pub verdicts: Vec<Verdict>,
    pub objects: Vec<ObjectDualizing>,
    pub dualizing: bool,
}

/// Decides whether `({*}, ω)` is dualizing, by two independent criteria.
pub fn check_dualizing(p: &dyn LatticePresheaf, omega: Elem, budget: &Budget) -> DualizingReport {
    let sizes: Vec<usize> = budget.sizes().filter(|&n| can_pair(p, n, 1)).collect();
    let elems = |n: usize| elements_within(&p.carrier(n).expect("supported size"), budget);
    let show = |n: usize, a: Elem| p.describe(n, a);
    let q = p.base();
    let c1 = p.carrier(1).expect("unit carrier");

    let mut galois = Law::new("dual.galois", "negations form a Galois connection", budget);
    let mut lax = Law::new("dual.double_dual_lax", "double dual sits below double negation", budget);
    let mut crit_a = Law::new("dual.criterion_a", "dualizing: negation is invertible", budget);
    let mut crit_b = Law::new("dual.criterion_b", "dualizing: double dual equals double negation", budget);
    let mut agree = Law::new("dual.criteria_agree", "both criteria decide alike", budget);
    let mut antitone = Law::new("dual.omega_antitone", "negation reverses order", budget);
    let mut recovered = Law::new("dual.counit", "pairing a value with its left negation stays below omega", budget);
    let mut objects = Vec::new();

    for &x in &sizes {
        let cx = p.carrier(x).expect("supported size");
        let ex = elems(x);
        let neg = |a| omega_map(p, omega, x, a);
        let back = |b| lneg(p, omega, x, b);
        for &a in &ex {
            for &b in &ex {
                let by_pairing = c1.leq(p.pairing(x, 1, a, b), omega);
                let by_lneg = cx.leq(a, back(b));
                let by_omega = cx.leq(b, neg(a));
                if cx.leq(a, b) {
                    antitone.check(cx.leq(neg(b), neg(a)), || {
                        Witness::new("<=", show(x, neg(b)), show(x, neg(a))).bind("alpha", show(x, a)).bind("alpha'", show(x, b))
                    });
                }
                galois.check(by_pairing == by_lneg && by_lneg == by_omega, || {
                    Witness::new("iff", format!("pairing:{by_pairing} lneg:{by_lneg}"), format!("omega:{by_omega}"))
                        .bind("alpha", show(x, a))
                        .bind("beta", show(x, b))
                });
            }
        }
        let mut a_ok = true;
        for &a in &ex {
            let round = back(neg(a));
            a_ok &= crit_a.check(round == a, || {
                Witness::new("=", show(x, round), show(x, a)).bind("|X|", x).bind("alpha", show(x, a)).bind("omega_X(alpha)", show(x, neg(a)))
            });
        }
        for &b in &ex {
            let round = neg(back(b));
            a_ok &= crit_a.check(round == b, || {
                Witness::new("=", show(x, round), show(x, b)).bind("|X|", x).bind("beta", show(x, b)).bind("lneg(beta)", show(x, back(b)))
            });
        }

        for &b in &ex {
            let back_paired = p.pairing(x, 1, back(b), b);
            recovered.check(c1.leq(back_paired, omega), || Witness::new("<=", show(1, back_paired), show(1, omega)).bind("beta", show(x, b)));
        }
        let j = structural(q, StructKind::DoubleDual, &[set(x)]);
        let mut b_ok = crit_b.check(j.mat().inverse().is_some(), || Witness::new("invertible", j.mat().describe(), "no inverse"));
        for &a in &ex {
            let lifted = p.apply(j.mat(), a);
            let twice = omega_map(p, omega, x, neg(a));
            b_ok &= crit_b.check(lifted == twice, || {
                Witness::new("=", show(x, lifted), show(x, twice)).bind("|X|", x).bind("alpha", show(x, a))
            });
            lax.check(cx.leq(lifted, twice), || Witness::new("<=", show(x, lifted), show(x, twice)).bind("alpha", show(x, a)));
        }
        agree.check(a_ok == b_ok, || Witness::new("iff", format!("criterion A: {a_ok}"), format!("criterion B: {b_ok}")).bind("|X|", x));
        objects.push(ObjectDualizing { size: x, criterion_a: a_ok, criterion_b: b_ok });
    }
    let dualizing = !crit_a.failed() && !objects.is_empty();
    DualizingReport {
        verdicts: vec![
            galois.finish(),
            antitone.finish(),
            recovered.finish(),
            lax.finish(),
            crit_a.finish(),
            crit_b.finish(),
            agree.finish(),
        ],
        objects,
        dualizing,
    }
}

/// Checks `⟨α, β⟩_X = ⟨β, Q(j_X)(α)⟩_{X*}` and `lneg = Q(j_X^{-1}) ∘ ω_{X*}`.
pub fn pairing_twist_check(p: &dyn LatticePresheaf, omega: Elem, budget: &Budget) -> Vec<Verdict> {
    let sizes: Vec<usize> = budget.sizes().filter(|&n| can_pair(p, n, 1)).collect();
    let elems = |n: usize| elements_within(&p.carrier(n).expect("supported size"), budget);
    let show = |n: usize, a: Elem| p.describe(n, a);
    let q = p.base();
    let mut twist = Law::new("dual.pairing_twist", "pairing is symmetric through the double dual", budget);
    let mut via_dual = Law::new("dual.lneg_via_double_dual", "left negation through the double dual", budget);
    for &x in &sizes {
        let j = structural(q, StructKind::DoubleDual, &[set(x)]);
        let j_inv = j.mat().inverse().expect("structural maps are invertible");
        for a in elems(x) {
            let ja = p.apply(j.mat(), a);
            for b in elems(x) {
                let lhs = p.pairing(x, 1, a, b);
                let rhs = p.pairing(x, 1, b, ja);
                twist.check(lhs == rhs, || Witness::new("=", show(1, lhs), show(1, rhs)).bind("alpha", show(x, a)).bind("beta", show(x, b)));
            }
        }
        for b in elems(x) {
            let lhs = lneg(p, omega, x, b);
            let rhs = p.apply(&j_inv, omega_map(p, omega, x, b));
            via_dual.check(lhs == rhs, || Witness::new("=", show(x, lhs), show(x, rhs)).bind("beta", show(x, b)));
        }
    }
    vec![twist.finish(), via_dual.finish()]
}
