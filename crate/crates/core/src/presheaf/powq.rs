use std::sync::Arc;

use super::{validate, CarrierCache, LatticePresheaf, PresheafError};
use crate::lattice::{Carrier, Elem, PowerLattice};
use crate::quantale::FinQuantale;
use crate::relbase::QMat;
use crate::report::Budget;

/// `X ↦ Q^X`, the representable presheaf of global elements in `Rel(Q)`.
///
/// Values are vectors encoded in mixed radix, coordinate 0 least significant.
/// A matrix acts by `(α·ψ)(y) = ⋁_x α(x) * ψ(x, y)`.
pub struct PowQ {
    q: Arc<FinQuantale>,
    limit: usize,
    carriers: CarrierCache,
}

impl PowQ {
    pub fn new(q: Arc<FinQuantale>) -> Self {
        PowQ { q, limit: 1 << 20, carriers: CarrierCache::default() }
    }

    pub fn quantale(&self) -> &Arc<FinQuantale> {
        &self.q
    }

    pub fn decode(&self, arity: usize, mut a: Elem) -> Vec<Elem> {
        let m = self.q.len();
        (0..arity)
            .map(|_| {
                let d = a % m;
                a /= m;
                d
            })
            .collect()
    }

    pub fn encode(&self, digits: &[Elem]) -> Elem {
        let m = self.q.len();
        digits.iter().rev().fold(0, |acc, &d| acc * m + d)
    }
}

/// The validated instance.
pub fn powq_presheaf(q: Arc<FinQuantale>, budget: &Budget) -> Result<Arc<PowQ>, PresheafError> {
    let p = Arc::new(PowQ::new(q));
    match PresheafError::from_verdicts(&p.name(), &validate(p.as_ref(), budget)) {
        Some(err) => Err(err),
        None => Ok(p),
    }
}

impl LatticePresheaf for PowQ {
    fn name(&self) -> String {
        format!("powq({})", self.q.name())
    }

    fn base(&self) -> &Arc<FinQuantale> {
        &self.q
    }

    fn carrier(&self, x: usize) -> Result<Carrier, PresheafError> {
        self.carriers.get_or(x, || {
            PowerLattice::new(self.q.lattice().clone(), x, self.limit)
                .map(|p| Carrier::Power(Arc::new(p)))
                .ok_or_else(|| PresheafError::CarrierTooLarge { instance: self.name(), size: x, limit: self.limit })
        })
    }

    fn apply(&self, f: &QMat, a: Elem) -> Elem {
        let q = &self.q;
        let alpha = self.decode(f.rows(), a);
        let out: Vec<Elem> = (0..f.cols())
            .map(|y| alpha.iter().enumerate().fold(q.bottom(), |acc, (x, &v)| q.join(acc, q.mul(v, f.get(x, y)))))
            .collect();
        self.encode(&out)
    }

    fn unit(&self) -> Elem {
        self.q.unit()
    }

    fn mu(&self, x: usize, y: usize, a: Elem, b: Elem) -> Elem {
        let (va, vb) = (self.decode(x, a), self.decode(y, b));
        let out: Vec<Elem> = va.iter().flat_map(|&p| vb.iter().map(move |&r| (p, r))).map(|(p, r)| self.q.mul(p, r)).collect();
        self.encode(&out)
    }

    fn pairing(&self, x: usize, y: usize, a: Elem, b: Elem) -> Elem {
        let q = &self.q;
        let (va, vb) = (self.decode(x, a), self.decode(x * y, b));
        let out: Vec<Elem> = (0..y)
            .map(|j| (0..x).fold(q.bottom(), |acc, i| q.join(acc, q.mul(va[i], vb[i * y + j]))))
            .collect();
        self.encode(&out)
    }

    fn has_direct_pairing(&self) -> bool {
        true
    }

    fn internal_hom_closed(&self, x: usize, y: usize, a: Elem, c: Elem) -> Option<Elem> {
        let (va, vc) = (self.decode(x, a), self.decode(y, c));
        let out: Vec<Elem> = va.iter().flat_map(|&p| vc.iter().map(move |&r| (p, r))).map(|(p, r)| self.q.residual(p, r)).collect();
        Some(self.encode(&out))
    }

    fn describe(&self, x: usize, a: Elem) -> String {
        let parts: Vec<String> = self.decode(x, a).into_iter().map(|d| self.q.label(d)).collect();
        format!("({})", parts.join(","))
    }

    fn parse_element(&self, x: usize, text: &str) -> Option<Elem> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(&t);
        let parts: Vec<&str> = if inner.is_empty() { vec![] } else { inner.split(',').collect() };
        if parts.len() != x {
            return None;
        }
        let digits: Option<Vec<Elem>> = parts.iter().map(|p| self.q.index_of(p)).collect();
        digits.map(|d| self.encode(&d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use crate::quantale::examples::{boolean, lukasiewicz};
    use crate::relbase::FinSet;

    #[test]
    fn lukasiewicz_action_and_products() {
        let q = Arc::new(lukasiewicz(3));
        let p = PowQ::new(q.clone());
        let alpha = p.parse_element(2, "(1,1/2)").unwrap();
        let r = QMat::from_pairs(&q, &FinSet::of_size(2), &FinSet::of_size(1), &[(0, 0), (1, 0)]);
        assert_eq!(p.describe(1, p.apply(&r, alpha)), "(1)");
        let half = p.parse_element(1, "1/2").unwrap();
        assert_eq!(p.describe(2, p.mu(2, 1, alpha, half)), "(1/2,0)");
        assert_eq!(p.describe(2, p.internal_hom_closed(2, 1, alpha, half).unwrap()), "(1/2,1)");
    }

    #[test]
    fn carrier_size_and_unit() {
        let p = PowQ::new(Arc::new(boolean()));
        assert_eq!(p.carrier(3).unwrap().len(), 8);
        assert_eq!(p.describe(1, p.unit()), "(1)");
        assert_eq!(p.describe(0, 0), "()");
        assert_eq!(p.parse_element(0, "()"), Some(0));
    }
}
