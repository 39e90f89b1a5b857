//! Finite commutative unital quantales, their residuals, and the quotient by
//! double negation.

use std::sync::Arc;

use thiserror::Error;

use crate::lattice::{ClosureOp, Elem, FinLattice, Lattice, LatticeError, MonoMap};
use crate::report::{Budget, Law, Verdict, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantaleError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("multiplication table must be {0} x {0} with entries in range")]
    TableShape(usize),
    #[error("unit {0} is not an element")]
    UnitOutOfRange(Elem),
    #[error("not associative at ({0}, {1}, {2})")]
    NotAssociative(String, String, String),
    #[error("not commutative at ({0}, {1})")]
    NotCommutative(String, String),
    #[error("unit fails at {0}")]
    UnitFails(String),
    #[error("multiplication by {a} does not preserve the join of {{{}}}", subset.join(", "))]
    NotBilinear { a: String, subset: Vec<String> },
    #[error("dualizing element must be an element, got index {0}")]
    OmegaOutOfRange(Elem),
    #[error("internal law violation: {0}")]
    InternalLawViolation(String),
}

/// A finite commutative unital quantale.
#[derive(Clone, Debug, PartialEq)]
pub struct FinQuantale {
    name: String,
    lat: Arc<FinLattice>,
    unit: Elem,
    mult: Vec<Elem>,
    residual: Vec<Elem>,
}

impl FinQuantale {
    /// Validates the multiplication table and precomputes residuals.
    pub fn new(
        name: impl Into<String>,
        lat: Arc<FinLattice>,
        unit: Elem,
        mult: Vec<Vec<Elem>>,
    ) -> Result<Self, QuantaleError> {
        let n = lat.len();
        if mult.len() != n || mult.iter().any(|r| r.len() != n || r.iter().any(|&v| v >= n)) {
            return Err(QuantaleError::TableShape(n));
        }
        if unit >= n {
            return Err(QuantaleError::UnitOutOfRange(unit));
        }
        let mult: Vec<Elem> = mult.into_iter().flatten().collect();
        let mut q = FinQuantale { name: name.into(), lat, unit, mult, residual: Vec::new() };
        q.check_laws()?;
        q.residual = (0..n * n)
            .map(|ab| {
                let (a, b) = (ab / n, ab % n);
                q.lat.join_all((0..n).filter(|&c| q.lat.leq(q.mul(a, c), b)))
            })
            .collect();
        Ok(q)
    }

    fn check_laws(&self) -> Result<(), QuantaleError> {
        let n = self.len();
        let l = |a: Elem| self.lat.label(a);
        for a in 0..n {
            for b in 0..n {
                if self.mul(a, b) != self.mul(b, a) {
                    return Err(QuantaleError::NotCommutative(l(a), l(b)));
                }
            }
        }
        for a in 0..n {
            if self.mul(self.unit, a) != a {
                return Err(QuantaleError::UnitFails(l(a)));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return Err(QuantaleError::NotAssociative(l(a), l(b), l(c)));
                    }
                }
            }
        }
        let subsets: Box<dyn Iterator<Item = Vec<Elem>>> = if n <= 8 {
            Box::new((0u32..1 << n).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect()))
        } else {
            Box::new(std::iter::once(vec![]).chain((0..n).flat_map(move |a| (a + 1..n).map(move |b| vec![a, b]))))
        };
        for subset in subsets {
            let joined = self.lat.join_all(subset.iter().copied());
            for a in 0..n {
                let lhs = self.mul(a, joined);
                let rhs = self.lat.join_all(subset.iter().map(|&s| self.mul(a, s)));
                if lhs != rhs {
                    return Err(QuantaleError::NotBilinear {
                        a: l(a),
                        subset: subset.iter().map(|&s| l(s)).collect(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn lattice(&self) -> &Arc<FinLattice> {
        &self.lat
    }
    pub fn len(&self) -> usize {
        self.lat.len()
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn unit(&self) -> Elem {
        self.unit
    }
    pub fn bottom(&self) -> Elem {
        self.lat.bottom()
    }
    pub fn top(&self) -> Elem {
        self.lat.top()
    }
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mult[a * self.len() + b]
    }
    /// `a ⊸ b`, the largest `c` with `a * c <= b`.
    pub fn residual(&self, a: Elem, b: Elem) -> Elem {
        self.residual[a * self.len() + b]
    }
    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.lat.join(a, b)
    }
    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.lat.leq(a, b)
    }
    pub fn label(&self, a: Elem) -> String {
        self.lat.label(a)
    }
    pub fn index_of(&self, label: &str) -> Option<Elem> {
        self.lat.index_of(label)
    }

    /// The multiplication table as rows of element indices.
    pub fn table(&self) -> Vec<Vec<Elem>> {
        self.mult.chunks(self.len()).map(<[Elem]>::to_vec).collect()
    }

    /// `a ↦ (a ⊸ omega) ⊸ omega`.
    pub fn double_negation(&self, omega: Elem, a: Elem) -> Elem {
        self.residual(self.residual(a, omega), omega)
    }

    /// `Ok` when double negation is the identity; otherwise the first element
    /// where it is not.
    pub fn is_dualizing(&self, omega: Elem) -> Result<(), Elem> {
        match (0..self.len()).find(|&a| self.double_negation(omega, a) != a) {
            Some(a) => Err(a),
            None => Ok(()),
        }
    }

    /// Double negation as a closure operator, checked to be a nucleus.
    pub fn double_negation_nucleus(&self, omega: Elem) -> Result<ClosureOp, QuantaleError> {
        if omega >= self.len() {
            return Err(QuantaleError::OmegaOutOfRange(omega));
        }
        let table: Vec<Elem> = (0..self.len()).map(|a| self.double_negation(omega, a)).collect();
        let map = MonoMap::new(self.lat.clone(), self.lat.clone(), table.clone())
            .map_err(|e| QuantaleError::InternalLawViolation(format!("double negation: {e}")))?;
        let closure =
            ClosureOp::new(map).map_err(|e| QuantaleError::InternalLawViolation(format!("double negation: {e}")))?;
        for a in 0..self.len() {
            for b in 0..self.len() {
                if !self.leq(self.mul(table[a], table[b]), table[self.mul(a, b)]) {
                    return Err(QuantaleError::InternalLawViolation(format!(
                        "nucleus law fails at ({}, {})",
                        self.label(a),
                        self.label(b)
                    )));
                }
            }
        }
        Ok(closure)
    }

    /// The quotient by the double-negation nucleus.
    pub fn girard_quotient(&self, omega: Elem) -> Result<GirardQuotient, QuantaleError> {
        let nucleus = self.double_negation_nucleus(omega)?;
        let (lat, embed) = FinLattice::sub_lattice(self.lat.as_ref(), &nucleus.fixed_points())?;
        let index = |a: Elem| embed.iter().position(|&e| e == a).expect("closure lands in fixed points");
        let k = embed.len();
        let mult = (0..k)
            .map(|i| (0..k).map(|j| index(nucleus.apply(self.mul(embed[i], embed[j])))).collect())
            .collect();
        let unit = index(nucleus.apply(self.unit));
        let quantale = FinQuantale::new(format!("{}/j", self.name), Arc::new(lat), unit, mult)
            .map_err(|e| QuantaleError::InternalLawViolation(format!("quotient is not a quantale: {e}")))?;
        let omega_q = embed
            .iter()
            .position(|&e| e == omega)
            .ok_or_else(|| QuantaleError::InternalLawViolation("omega is not closed".into()))?;
        if let Err(a) = quantale.is_dualizing(omega_q) {
            return Err(QuantaleError::InternalLawViolation(format!(
                "quotient is not dualizing at {}",
                quantale.label(a)
            )));
        }
        Ok(GirardQuotient { quantale, embed, omega: omega_q, nucleus })
    }
}

/// Every quantale law of a multiplication table over `lat`, each reported
/// separately with its first counterexample, followed by the residuation
/// adjunction for the residual computed as a join.
pub fn law_verdicts(lat: &FinLattice, unit: Elem, mult: &[Vec<Elem>], budget: &Budget) -> Vec<Verdict> {
    let n = lat.len();
    let l = |a: Elem| lat.label(a);
    let m = |a: Elem, b: Elem| mult[a][b];
    let mut shape = Law::new("quantale.table", "multiplication is total on the carrier", budget);
    shape.check(mult.len() == n && mult.iter().all(|r| r.len() == n && r.iter().all(|&v| v < n)) && unit < n, || {
        Witness::new("=", format!("{} rows", mult.len()), format!("{n} x {n} in range"))
    });
    if shape.failed() {
        return vec![shape.finish()];
    }
    let mut comm = Law::new("quantale.commutative", "a * b = b * a", budget);
    let mut unital = Law::new("quantale.unit", "e * a = a", budget);
    let mut assoc = Law::new("quantale.associative", "(a * b) * c = a * (b * c)", budget);
    let mut bilinear = Law::new("quantale.bilinear", "a * join S = join (a * S)", budget);
    let mut residuation = Law::new("quantale.residuation", "a * c <= b iff c <= a -o b", budget);
    for a in 0..n {
        unital.check(m(unit, a) == a, || Witness::new("=", l(m(unit, a)), l(a)).bind("a", l(a)));
        for b in 0..n {
            comm.check(m(a, b) == m(b, a), || Witness::new("=", l(m(a, b)), l(m(b, a))).bind("a", l(a)).bind("b", l(b)));
            for c in 0..n {
                let (lhs, rhs) = (m(m(a, b), c), m(a, m(b, c)));
                assoc.check(lhs == rhs, || Witness::new("=", l(lhs), l(rhs)).bind("a", l(a)).bind("b", l(b)).bind("c", l(c)));
            }
        }
    }
    let subsets: Box<dyn Iterator<Item = Vec<Elem>>> = if n <= 8 {
        Box::new((0u32..1 << n).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect()))
    } else {
        Box::new(std::iter::once(vec![]).chain((0..n).flat_map(move |a| (a + 1..n).map(move |b| vec![a, b]))))
    };
    for subset in subsets {
        let joined = lat.join_all(subset.iter().copied());
        for a in 0..n {
            let (lhs, rhs) = (m(a, joined), lat.join_all(subset.iter().map(|&s| m(a, s))));
            bilinear.check(lhs == rhs, || {
                let names: Vec<String> = subset.iter().map(|&s| l(s)).collect();
                Witness::new("=", l(lhs), l(rhs)).bind("a", l(a)).bind("S", format!("{{{}}}", names.join(",")))
            });
        }
    }
    for a in 0..n {
        for b in 0..n {
            let res = lat.join_all((0..n).filter(|&c| lat.leq(m(a, c), b)));
            for c in 0..n {
                let (left, right) = (lat.leq(m(a, c), b), lat.leq(c, res));
                residuation.check(left == right, || {
                    Witness::new("iff", format!("{} <= {}: {left}", l(m(a, c)), l(b)), format!("{} <= {}: {right}", l(c), l(res)))
                        .bind("a", l(a))
                        .bind("b", l(b))
                        .bind("c", l(c))
                });
            }
        }
    }
    vec![shape.finish(), comm.finish(), unital.finish(), assoc.finish(), bilinear.finish(), residuation.finish()]
}

/// The quotient of a quantale by double negation.
#[derive(Clone, Debug)]
pub struct GirardQuotient {
    pub quantale: FinQuantale,
    /// Quotient index to original index.
    pub embed: Vec<Elem>,
    /// The dualizing element, as a quotient index.
    pub omega: Elem,
    pub nucleus: ClosureOp,
}

/// Standard examples, built directly rather than parsed.
pub mod examples {
    use super::*;

    fn labels(ls: &[&str]) -> Vec<String> {
        ls.iter().map(|s| s.to_string()).collect()
    }

    /// Two-element Boolean algebra with meet.
    pub fn boolean() -> FinQuantale {
        let lat = Arc::new(FinLattice::chain(labels(&["0", "1"])).unwrap());
        FinQuantale::new("boolean2", lat, 1, vec![vec![0, 0], vec![0, 1]]).unwrap()
    }

    fn chain_labels(n: usize) -> Vec<String> {
        let d = n - 1;
        (0..n)
            .map(|i| match i {
                0 => "0".to_string(),
                i if i == d => "1".to_string(),
                i => {
                    let g = gcd(i, d);
                    format!("{}/{}", i / g, d / g)
                }
            })
            .collect()
    }

    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    /// The `n`-chain with minimum as multiplication.
    pub fn godel(n: usize) -> FinQuantale {
        let lat = Arc::new(FinLattice::chain(chain_labels(n)).unwrap());
        let mult = (0..n).map(|a| (0..n).map(|b| a.min(b)).collect()).collect();
        FinQuantale::new(format!("godel{n}"), lat, n - 1, mult).unwrap()
    }

    /// The `n`-chain with truncated addition `max(0, a + b - 1)`.
    pub fn lukasiewicz(n: usize) -> FinQuantale {
        let lat = Arc::new(FinLattice::chain(chain_labels(n)).unwrap());
        let d = n - 1;
        let mult = (0..n).map(|a| (0..n).map(|b| (a + b).saturating_sub(d)).collect()).collect();
        FinQuantale::new(format!("lukasiewicz{n}"), lat, d, mult).unwrap()
    }

    /// Subsets of the two-element group under elementwise addition.
    pub fn powerset_z2() -> FinQuantale {
        // bit 0 marks the group element 0, bit 1 marks 1
        let lat = Arc::new(FinLattice::from_relation(4, |a, b| a & !b == 0, Some(labels(&["{}", "{0}", "{1}", "{0,1}"]))).unwrap());
        let mult = (0..4usize)
            .map(|a| {
                (0..4usize)
                    .map(|b| {
                        let mut out = 0;
                        for x in 0..2 {
                            for y in 0..2 {
                                if a >> x & 1 == 1 && b >> y & 1 == 1 {
                                    out |= 1 << ((x + y) % 2);
                                }
                            }
                        }
                        out
                    })
                    .collect()
            })
            .collect();
        FinQuantale::new("powerset_z2", lat, 1, mult).unwrap()
    }

    /// The 3-chain with maximum as multiplication and the bottom as unit.
    /// This is not a quantale: multiplication fails to preserve the empty join.
    pub fn max_chain3() -> Result<FinQuantale, QuantaleError> {
        let lat = Arc::new(FinLattice::chain(labels(&["0", "1/2", "1"])).unwrap());
        let mult = (0..3).map(|a| (0..3).map(|b| a.max(b)).collect()).collect();
        FinQuantale::new("maxchain3", lat, 0, mult)
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;

    #[test]
    fn residuals_on_three_chains() {
        let l3 = lukasiewicz(3);
        assert_eq!(l3.label(l3.residual(1, 0)), "1/2");
        let g3 = godel(3);
        assert_eq!(g3.label(g3.residual(1, 0)), "0");
    }

    #[test]
    fn dualizing_elements() {
        assert!(lukasiewicz(3).is_dualizing(0).is_ok());
        assert_eq!(godel(3).is_dualizing(0), Err(1));
        assert!(boolean().is_dualizing(0).is_ok());
    }

    #[test]
    fn godel_quotient_is_boolean() {
        let g3 = godel(3);
        let n = g3.double_negation_nucleus(0).unwrap();
        assert_eq!(n.map().table(), &[0, 2, 2]);
        let gq = g3.girard_quotient(0).unwrap();
        assert_eq!(gq.embed, vec![0, 2]);
        assert_eq!(gq.quantale.table(), boolean().table());
        assert_eq!(gq.quantale.unit(), 1);
    }

    #[test]
    fn boolean_with_top_collapses() {
        let b = boolean();
        let n = b.double_negation_nucleus(1).unwrap();
        assert_eq!(n.map().table(), &[1, 1]);
        assert_eq!(b.girard_quotient(1).unwrap().quantale.len(), 1);
    }

    #[test]
    fn max_chain_fails_empty_join() {
        let err = max_chain3().unwrap_err();
        assert_eq!(err, QuantaleError::NotBilinear { a: "1/2".into(), subset: vec![] });
    }

    #[test]
    fn non_associative_table_rejected() {
        let lat = Arc::new(FinLattice::chain(vec!["0".into(), "1/2".into(), "1".into()]).unwrap());
        // 0 * 0 = 1/2 while 0 * 1/2 = 1/2 * 1/2 = 0, so (0 * 0) * 1/2 differs from 0 * (0 * 1/2).
        let mult = vec![vec![1, 0, 0], vec![0, 0, 1], vec![0, 1, 2]];
        let err = FinQuantale::new("bad", lat, 2, mult).unwrap_err();
        assert!(matches!(err, QuantaleError::NotAssociative(..)), "{err:?}");
    }

    #[test]
    fn powerset_z2_is_dualizing_at_singleton() {
        let p = powerset_z2();
        assert_eq!(p.label(p.mul(2, 2)), "{0}");
        // {1} is dualizing: negation swaps {0} and {1}.
        assert!(p.is_dualizing(2).is_ok());
    }
}
