use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::{validate, LatticePresheaf, PresheafError};
use crate::lattice::{Carrier, Elem, FinLattice};
use crate::quantale::{examples::boolean, FinQuantale};
use crate::relbase::QMat;
use crate::report::Budget;

/// Upward-closed families of subsets, `X ↦ UP(P(X))`, over crisp relations.
///
/// A subset of an `n`-element set is a bitmask below `2^n`; a family is a
/// bitmask over those subsets. Relations act by direct image followed by
/// upward closure.
pub struct Nuts {
    base: Arc<FinQuantale>,
    max_obj: usize,
    tables: Mutex<HashMap<usize, Arc<UpsetTable>>>,
}

struct UpsetTable {
    lattice: Arc<FinLattice>,
    families: Vec<u64>,
    index: HashMap<u64, Elem>,
}

impl Default for Nuts {
    fn default() -> Self {
        Self::new()
    }
}

impl Nuts {
    /// Bound on set sizes; `UP(P(4))` already has 168 elements and the next
    /// one has 7581.
    pub const DEFAULT_MAX_OBJ: usize = 4;

    pub fn new() -> Self {
        Self::with_max_obj(Self::DEFAULT_MAX_OBJ)
    }

    pub fn with_max_obj(max_obj: usize) -> Self {
        Nuts { base: Arc::new(boolean()), max_obj: max_obj.min(4), tables: Mutex::default() }
    }

    fn table(&self, n: usize) -> Result<Arc<UpsetTable>, PresheafError> {
        if n > self.max_obj {
            return Err(PresheafError::CarrierTooLarge { instance: self.name(), size: n, limit: self.max_obj });
        }
        if let Some(t) = self.tables.lock().expect("table lock").get(&n) {
            return Ok(t.clone());
        }
        let subsets = 1usize << n;
        let families: Vec<u64> = (0u64..1 << subsets).filter(|&f| up_close(f, n) == f).collect();
        let labels = families.iter().map(|&f| family_label(f, n)).collect();
        let lattice = FinLattice::from_relation(families.len(), |a, b| families[a] & !families[b] == 0, Some(labels))?;
        let index = families.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let t = Arc::new(UpsetTable { lattice: Arc::new(lattice), families, index });
        self.tables.lock().expect("table lock").insert(n, t.clone());
        Ok(t)
    }

    fn family(&self, n: usize, a: Elem) -> u64 {
        self.table(n).expect("supported size").families[a]
    }

    fn element(&self, n: usize, family: u64) -> Elem {
        self.table(n).expect("supported size").index[&up_close(family, n)]
    }
}

/// The validated instance.
pub fn nuts_presheaf(budget: &Budget) -> Result<Arc<Nuts>, PresheafError> {
    let p = Arc::new(Nuts::new());
    match PresheafError::from_verdicts(&p.name(), &validate(p.as_ref(), budget)) {
        Some(err) => Err(err),
        None => Ok(p),
    }
}

/// Adds every superset of every member.
fn up_close(mut family: u64, n: usize) -> u64 {
    for i in 0..n {
        for s in 0..1usize << n {
            if family >> s & 1 == 1 {
                family |= 1 << (s | 1 << i);
            }
        }
    }
    family
}

fn members(family: u64, n: usize) -> impl Iterator<Item = usize> {
    (0..1usize << n).filter(move |&s| family >> s & 1 == 1)
}

fn family_label(family: u64, n: usize) -> String {
    let sets: Vec<String> = members(family, n)
        .map(|s| {
            let elems: Vec<String> = (0..n).filter(|i| s >> i & 1 == 1).map(|i| i.to_string()).collect();
            format!("{{{}}}", elems.join(","))
        })
        .collect();
    format!("{{{}}}", sets.join(","))
}

/// Image of subset `s` under a relation given by row masks.
fn image(rows: &[usize], s: usize) -> usize {
    rows.iter().enumerate().filter(|(x, _)| s >> x & 1 == 1).fold(0, |acc, (_, &r)| acc | r)
}

/// Row masks of the relation `R ⊆ X × Y` encoded as a subset of `X × Y`.
fn rows_of(relation: usize, x: usize, y: usize) -> Vec<usize> {
    (0..x).map(|i| (relation >> (i * y)) & ((1 << y) - 1)).collect()
}

impl LatticePresheaf for Nuts {
    fn name(&self) -> String {
        "nuts".into()
    }

    fn base(&self) -> &Arc<FinQuantale> {
        &self.base
    }

    fn carrier(&self, x: usize) -> Result<Carrier, PresheafError> {
        Ok(Carrier::Table(self.table(x)?.lattice.clone()))
    }

    fn apply(&self, f: &QMat, a: Elem) -> Elem {
        let (x, y) = (f.rows(), f.cols());
        let bot = self.base.bottom();
        let rows: Vec<usize> = (0..x).map(|i| (0..y).filter(|&j| f.get(i, j) != bot).fold(0, |m, j| m | 1 << j)).collect();
        let out = members(self.family(x, a), x).fold(0u64, |acc, s| acc | 1 << image(&rows, s));
        self.element(y, out)
    }

    fn unit(&self) -> Elem {
        self.element(1, 0b10)
    }

    fn mu(&self, x: usize, y: usize, a: Elem, b: Elem) -> Elem {
        let (fa, fb) = (self.family(x, a), self.family(y, b));
        let mut out = 0u64;
        for s in members(fa, x) {
            for t in members(fb, y) {
                let mut prod = 0usize;
                for i in (0..x).filter(|i| s >> i & 1 == 1) {
                    prod |= t << (i * y);
                }
                out |= 1 << prod;
            }
        }
        self.element(x * y, out)
    }

    fn pairing(&self, x: usize, y: usize, a: Elem, b: Elem) -> Elem {
        let (fa, fb) = (self.family(x, a), self.family(x * y, b));
        let mut out = 0u64;
        for r in members(fb, x * y) {
            let rows = rows_of(r, x, y);
            for s in members(fa, x) {
                out |= 1 << image(&rows, s);
            }
        }
        self.element(y, out)
    }

    fn has_direct_pairing(&self) -> bool {
        true
    }

    fn internal_hom_closed(&self, x: usize, y: usize, a: Elem, c: Elem) -> Option<Elem> {
        let (fa, fc) = (self.family(x, a), self.family(y, c));
        let out = (0..1usize << (x * y))
            .filter(|&r| {
                let rows = rows_of(r, x, y);
                members(fa, x).all(|s| fc >> image(&rows, s) & 1 == 1)
            })
            .fold(0u64, |acc, r| acc | 1 << r);
        Some(self.element(x * y, out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use crate::relbase::FinSet;

    #[test]
    fn carrier_sizes_are_dedekind_numbers() {
        let n = Nuts::new();
        let sizes: Vec<usize> = (0..=4).map(|k| n.carrier(k).unwrap().len()).collect();
        assert_eq!(sizes, vec![2, 3, 6, 20, 168]);
        assert!(matches!(n.carrier(5), Err(PresheafError::CarrierTooLarge { .. })));
    }

    #[test]
    fn image_of_singleton_family() {
        let n = Nuts::new();
        let q = n.base().clone();
        let two = FinSet::of_size(2);
        let r = QMat::from_pairs(&q, &two, &two, &[(0, 1)]);
        let a = n.parse_element(2, "{{0},{0,1}}").unwrap();
        assert_eq!(n.describe(2, n.apply(&r, a)), "{{1},{0,1}}");
    }

    #[test]
    fn unit_label() {
        let n = Nuts::new();
        assert_eq!(n.describe(1, n.unit()), "{{0}}");
    }
}
