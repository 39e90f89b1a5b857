use std::sync::Arc;

use super::{validate, LatticePresheaf, PowQ, PresheafError};
use crate::lattice::{Carrier, Elem};
use crate::quantale::FinQuantale;
use crate::relbase::{hom_count, QMat};
use crate::report::Budget;

/// Sets of global elements, `X ↦ P(Rel(Q)({*}, X))`.
///
/// Global elements are `Q`-vectors encoded as in [`PowQ`]; a value is a
/// bitmask over them. Matrices act by direct image, and the multiplication
/// collects all pointwise products.
pub struct Orth {
    globals: PowQ,
    limit: usize,
}

impl Orth {
    /// Bound on the number of global elements of a set.
    pub const DEFAULT_LIMIT: usize = 12;

    pub fn new(q: Arc<FinQuantale>) -> Self {
        Self::with_limit(q, Self::DEFAULT_LIMIT)
    }

    pub fn with_limit(q: Arc<FinQuantale>, limit: usize) -> Self {
        Orth { globals: PowQ::new(q), limit: limit.min(62) }
    }

    /// The presheaf of global elements whose subsets this instance forms.
    pub fn globals(&self) -> &PowQ {
        &self.globals
    }

    fn global_count(&self, x: usize) -> Option<usize> {
        hom_count(self.globals.quantale(), 1, x).filter(|&g| g <= self.limit)
    }

    fn bits(a: Elem) -> impl Iterator<Item = Elem> {
        (0..usize::BITS as usize).filter(move |i| a >> i & 1 == 1)
    }
}

/// The validated instance.
pub fn orth_presheaf(q: Arc<FinQuantale>, budget: &Budget) -> Result<Arc<Orth>, PresheafError> {
    let p = Arc::new(Orth::new(q));
    match PresheafError::from_verdicts(&p.name(), &validate(p.as_ref(), budget)) {
        Some(err) => Err(err),
        None => Ok(p),
    }
}

impl LatticePresheaf for Orth {
    fn name(&self) -> String {
        format!("orth({})", self.globals.quantale().name())
    }

    fn base(&self) -> &Arc<FinQuantale> {
        self.globals.quantale()
    }

    fn carrier(&self, x: usize) -> Result<Carrier, PresheafError> {
        self.global_count(x).map(Carrier::Subsets).ok_or_else(|| PresheafError::CarrierTooLarge {
            instance: self.name(),
            size: x,
            limit: self.limit,
        })
    }

    fn apply(&self, f: &QMat, a: Elem) -> Elem {
        Self::bits(a).fold(0, |acc, g| acc | 1 << self.globals.apply(f, g))
    }

    fn unit(&self) -> Elem {
        1 << self.globals.unit()
    }

    fn mu(&self, x: usize, y: usize, a: Elem, b: Elem) -> Elem {
        let mut out = 0;
        for g in Self::bits(a) {
            for h in Self::bits(b) {
                out |= 1 << self.globals.mu(x, y, g, h);
            }
        }
        out
    }

    fn pairing(&self, x: usize, y: usize, a: Elem, b: Elem) -> Elem {
        let mut out = 0;
        for g in Self::bits(a) {
            for h in Self::bits(b) {
                out |= 1 << self.globals.pairing(x, y, g, h);
            }
        }
        out
    }

    fn has_direct_pairing(&self) -> bool {
        true
    }

    fn describe(&self, x: usize, a: Elem) -> String {
        let items: Vec<String> = Self::bits(a).map(|g| self.globals.describe(x, g)).collect();
        format!("{{{}}}", items.join(","))
    }

    fn parse_element(&self, x: usize, text: &str) -> Option<Elem> {
        let count = self.global_count(x)?;
        let wanted: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        (0..1usize << count).find(|&a| self.describe(x, a) == wanted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use crate::quantale::examples::boolean;

    #[test]
    fn singleton_carrier_is_four_element_boolean_algebra() {
        let o = Orth::new(Arc::new(boolean()));
        assert_eq!(o.carrier(1).unwrap().len(), 4);
        assert_eq!(o.describe(1, o.unit()), "{(1)}");
        assert_eq!(o.mu(1, 1, 0, 0b11), 0);
    }

    #[test]
    fn bound_on_global_elements() {
        let o = Orth::new(Arc::new(boolean()));
        assert!(o.supports(3));
        assert!(!o.supports(4));
    }
}
