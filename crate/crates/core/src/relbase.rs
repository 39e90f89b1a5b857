//! The category of finite sets and quantale-valued matrices.
//!
//! Objects are finite sets, morphisms `X → Y` are `Q`-valued matrices, and
//! composition is matrix multiplication with join as sum. The tensor is the
//! cartesian product with row-major pairing, `(x, y) ↦ x * |Y| + y`, and the
//! internal hom `X ⊸ Y` is again `X × Y`. Structural isomorphisms are built as
//! graphs of bijections so that, for instance, `(X × 1) × 1` and `X` stay
//! distinct objects linked by an explicit map.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lattice::{Elem, Lattice};
use crate::quantale::FinQuantale;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelError {
    #[error("cannot compose {left_cod}-element codomain with {right_dom}-element domain")]
    ShapeMismatch { left_cod: usize, right_dom: usize },
    #[error("matrices are valued in different quantales")]
    QuantaleMismatch,
    #[error("matrix has {got} entries, expected {expected}")]
    EntryCount { expected: usize, got: usize },
    #[error("entry index {0} is not a quantale element")]
    EntryOutOfRange(Elem),
    #[error("structural map is not the graph of a bijection")]
    NotABijection,
}

/// A finite set with element labels.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinSet {
    labels: Arc<[String]>,
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(","))
    }
}

impl FinSet {
    pub fn new(labels: Vec<String>) -> Self {
        FinSet { labels: labels.into() }
    }

    /// A set of size `n` labelled `x0, x1, ...`.
    pub fn of_size(n: usize) -> Self {
        Self::new((0..n).map(|i| format!("x{i}")).collect())
    }

    /// The one-element tensor unit `{*}`.
    pub fn unit() -> Self {
        Self::new(vec!["*".into()])
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Cartesian product with row-major pairing.
    pub fn product(&self, other: &FinSet) -> FinSet {
        let mut labels = Vec::with_capacity(self.size() * other.size());
        for a in self.labels.iter() {
            for b in other.labels.iter() {
                labels.push(format!("({a},{b})"));
            }
        }
        FinSet::new(labels)
    }

    /// `X ⊸ Y`, represented as `X × Y`.
    pub fn hom(&self, other: &FinSet) -> FinSet {
        self.product(other)
    }

    /// `X* = X ⊸ 1`.
    pub fn dual(&self) -> FinSet {
        self.product(&FinSet::unit())
    }
}

/// A `Q`-valued matrix `dom → cod`, stored row-major.
#[derive(Clone)]
pub struct QMat {
    q: Arc<FinQuantale>,
    dom: FinSet,
    cod: FinSet,
    entries: Vec<Elem>,
}

impl PartialEq for QMat {
    fn eq(&self, other: &Self) -> bool {
        self.dom.size() == other.dom.size() && self.cod.size() == other.cod.size() && self.entries == other.entries
    }
}

impl Eq for QMat {}

impl fmt::Debug for QMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl QMat {
    pub fn new(q: Arc<FinQuantale>, dom: FinSet, cod: FinSet, entries: Vec<Elem>) -> Result<Self, RelError> {
        let expected = dom.size() * cod.size();
        if entries.len() != expected {
            return Err(RelError::EntryCount { expected, got: entries.len() });
        }
        if let Some(&bad) = entries.iter().find(|&&e| e >= q.len()) {
            return Err(RelError::EntryOutOfRange(bad));
        }
        Ok(QMat { q, dom, cod, entries })
    }

    /// The matrix with `e` where `related(x, y)` holds and `⊥` elsewhere.
    pub fn from_predicate(q: &Arc<FinQuantale>, dom: &FinSet, cod: &FinSet, related: impl Fn(usize, usize) -> bool) -> Self {
        let (e, bot) = (q.unit(), q.bottom());
        let entries = (0..dom.size())
            .flat_map(|x| (0..cod.size()).map(move |y| (x, y)))
            .map(|(x, y)| if related(x, y) { e } else { bot })
            .collect();
        QMat { q: q.clone(), dom: dom.clone(), cod: cod.clone(), entries }
    }

    /// A crisp relation from its list of related pairs.
    pub fn from_pairs(q: &Arc<FinQuantale>, dom: &FinSet, cod: &FinSet, pairs: &[(usize, usize)]) -> Self {
        Self::from_predicate(q, dom, cod, |x, y| pairs.contains(&(x, y)))
    }

    /// The graph of a function.
    pub fn graph(q: &Arc<FinQuantale>, dom: &FinSet, cod: &FinSet, f: impl Fn(usize) -> usize) -> Self {
        Self::from_predicate(q, dom, cod, |x, y| f(x) == y)
    }

    pub fn identity(q: &Arc<FinQuantale>, x: &FinSet) -> Self {
        Self::from_predicate(q, x, x, |a, b| a == b)
    }

    pub fn quantale(&self) -> &Arc<FinQuantale> {
        &self.q
    }
    pub fn dom(&self) -> &FinSet {
        &self.dom
    }
    pub fn cod(&self) -> &FinSet {
        &self.cod
    }
    pub fn rows(&self) -> usize {
        self.dom.size()
    }
    pub fn cols(&self) -> usize {
        self.cod.size()
    }
    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }
    pub fn get(&self, x: usize, y: usize) -> Elem {
        self.entries[x * self.cols() + y]
    }

    /// Diagrammatic composite: first `self`, then `then`.
    pub fn compose(&self, then: &QMat) -> Result<QMat, RelError> {
        if self.cols() != then.rows() {
            return Err(RelError::ShapeMismatch { left_cod: self.cols(), right_dom: then.rows() });
        }
        if self.q != then.q {
            return Err(RelError::QuantaleMismatch);
        }
        let q = &self.q;
        let mut entries = Vec::with_capacity(self.rows() * then.cols());
        for x in 0..self.rows() {
            for z in 0..then.cols() {
                let v = (0..self.cols()).fold(q.bottom(), |acc, y| q.join(acc, q.mul(self.get(x, y), then.get(y, z))));
                entries.push(v);
            }
        }
        Ok(QMat { q: q.clone(), dom: self.dom.clone(), cod: then.cod.clone(), entries })
    }

    /// `self ⊗ other : X × X' → Y × Y'` with entries `self(x,y) * other(x',y')`.
    pub fn tensor(&self, other: &QMat) -> QMat {
        let q = &self.q;
        let mut entries = Vec::with_capacity(self.entries.len() * other.entries.len());
        for x in 0..self.rows() {
            for x2 in 0..other.rows() {
                for y in 0..self.cols() {
                    for y2 in 0..other.cols() {
                        entries.push(q.mul(self.get(x, y), other.get(x2, y2)));
                    }
                }
            }
        }
        QMat { q: q.clone(), dom: self.dom.product(&other.dom), cod: self.cod.product(&other.cod), entries }
    }

    /// The transpose, which is the dual morphism under the compact structure.
    pub fn converse(&self) -> QMat {
        let entries = (0..self.cols())
            .flat_map(|y| (0..self.rows()).map(move |x| (x, y)))
            .map(|(x, y)| self.get(x, y))
            .collect();
        QMat { q: self.q.clone(), dom: self.cod.clone(), cod: self.dom.clone(), entries }
    }

    /// `f ⊸ g : X' ⊸ Y → X ⊸ Y'` for `f : X → X'` and `g : Y → Y'`.
    pub fn hom_map(f: &QMat, g: &QMat) -> QMat {
        f.converse().tensor(g)
    }

    pub fn is_identity(&self) -> bool {
        self.rows() == self.cols() && *self == QMat::identity(&self.q, &self.dom)
    }

    /// The two-sided inverse, if one exists.
    ///
    /// The only candidate is the largest `χ` with `self · χ <= id`, which is
    /// computed by residuation and then tested on both sides.
    pub fn inverse(&self) -> Option<QMat> {
        if self.rows() != self.cols() {
            return None;
        }
        let q = &self.q;
        let n = self.rows();
        let id = |a: usize, b: usize| if a == b { q.unit() } else { q.bottom() };
        let mut entries = Vec::with_capacity(n * n);
        for y in 0..n {
            for x2 in 0..n {
                let v = (0..n).fold(q.top(), |acc, x| q.lattice().meet(acc, q.residual(self.get(x, y), id(x, x2))));
                entries.push(v);
            }
        }
        let candidate = QMat { q: q.clone(), dom: self.cod.clone(), cod: self.dom.clone(), entries };
        let left = self.compose(&candidate).ok()?;
        let right = candidate.compose(self).ok()?;
        (left.is_identity() && right.is_identity()).then_some(candidate)
    }

    /// Entry grid using quantale labels.
    pub fn describe(&self) -> String {
        let rows: Vec<String> = (0..self.rows())
            .map(|x| {
                let cells: Vec<String> = (0..self.cols()).map(|y| self.q.label(self.get(x, y))).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        format!("{}x{}[{}]", self.rows(), self.cols(), rows.join(","))
    }
}

/// The structural isomorphisms of the monoidal structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructKind {
    /// `(X × Y) × Z → X × (Y × Z)`
    Associator,
    /// `1 × X → X`
    LeftUnitor,
    /// `X × 1 → X`
    RightUnitor,
    /// `X × Y → Y × X`
    Symmetry,
    /// `X → (X × 1) × 1`, the unit into the double dual.
    DoubleDual,
    /// `(X × Y) ⊸ Z → Y ⊸ (X ⊸ Z)`
    Curry,
}

/// A structural isomorphism, kept as the graph of an explicit bijection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructIso {
    kind: StructKind,
    mat: QMat,
}

impl StructIso {
    pub fn kind(&self) -> StructKind {
        self.kind
    }
    pub fn mat(&self) -> &QMat {
        &self.mat
    }
}

/// Builds a structural isomorphism on the given objects.
///
/// Arity: `Associator` and `Curry` take three objects, `Symmetry` two, the rest one.
pub fn structural(q: &Arc<FinQuantale>, kind: StructKind, objs: &[FinSet]) -> StructIso {
    let one = FinSet::unit();
    let mat = match kind {
        StructKind::Associator => {
            let (x, y, z) = (&objs[0], &objs[1], &objs[2]);
            let (ny, nz) = (y.size(), z.size());
            QMat::graph(q, &x.product(y).product(z), &x.product(&y.product(z)), |i| {
                let (xy, c) = (i / nz, i % nz);
                let (a, b) = (xy / ny, xy % ny);
                a * (ny * nz) + b * nz + c
            })
        }
        StructKind::LeftUnitor => QMat::graph(q, &one.product(&objs[0]), &objs[0], |i| i),
        StructKind::RightUnitor => QMat::graph(q, &objs[0].product(&one), &objs[0], |i| i),
        StructKind::Symmetry => {
            let (x, y) = (&objs[0], &objs[1]);
            let (nx, ny) = (x.size(), y.size());
            QMat::graph(q, &x.product(y), &y.product(x), |i| (i % ny) * nx + i / ny)
        }
        StructKind::DoubleDual => QMat::graph(q, &objs[0], &objs[0].dual().dual(), |i| i),
        StructKind::Curry => {
            let (x, y, z) = (&objs[0], &objs[1], &objs[2]);
            let (nx, ny, nz) = (x.size(), y.size(), z.size());
            QMat::graph(q, &x.product(y).hom(z), &y.hom(&x.hom(z)), |i| {
                let (xy, c) = (i / nz, i % nz);
                let (a, b) = (xy / ny, xy % ny);
                b * (nx * nz) + a * nz + c
            })
        }
    };
    StructIso { kind, mat }
}

/// Evaluation `X ⊗ (X ⊸ Y) → Y`: `((x, (x', y)), y') ↦ e` iff `x = x'` and `y = y'`.
pub fn ev_relation(q: &Arc<FinQuantale>, x: &FinSet, y: &FinSet) -> QMat {
    let (nx, ny) = (x.size(), y.size());
    QMat::from_predicate(q, &x.product(&x.hom(y)), y, |i, y2| {
        let (a, rest) = (i / (nx * ny), i % (nx * ny));
        let (a2, b) = (rest / ny, rest % ny);
        a == a2 && b == y2
    })
}

/// Coevaluation `Y → X ⊸ (X ⊗ Y)`: `(y, (x, (x', y'))) ↦ e` iff `x = x'` and `y = y'`.
pub fn eta_relation(q: &Arc<FinQuantale>, x: &FinSet, y: &FinSet) -> QMat {
    let (nx, ny) = (x.size(), y.size());
    QMat::from_predicate(q, y, &x.hom(&x.product(y)), |b, i| {
        let (a, rest) = (i / (nx * ny), i % (nx * ny));
        let (a2, b2) = (rest / ny, rest % ny);
        a == a2 && b == b2
    })
}

/// The transpose `Y → X ⊸ Z` of `f : X ⊗ Y → Z`.
pub fn curry(f: &QMat, x: &FinSet, y: &FinSet) -> Result<QMat, RelError> {
    let id_x = QMat::identity(f.quantale(), x);
    eta_relation(f.quantale(), x, y).compose(&id_x.tensor(f))
}

/// Number of matrices `X → Y`, or `None` on overflow.
pub fn hom_count(q: &FinQuantale, x: usize, y: usize) -> Option<usize> {
    q.len().checked_pow(u32::try_from(x * y).ok()?)
}

/// All matrices `X → Y` when there are at most `limit`; otherwise `limit`
/// deterministic pseudo-random ones, always including the empty, total and
/// (where it fits) diagonal relations.
pub fn morphisms(q: &Arc<FinQuantale>, x: &FinSet, y: &FinSet, limit: usize, seed: u64) -> Vec<QMat> {
    let cells = x.size() * y.size();
    let m = q.len();
    match hom_count(q, x.size(), y.size()) {
        Some(total) if total <= limit => (0..total)
            .map(|mut code| {
                let entries = (0..cells)
                    .map(|_| {
                        let d = code % m;
                        code /= m;
                        d
                    })
                    .collect();
                QMat { q: q.clone(), dom: x.clone(), cod: y.clone(), entries }
            })
            .collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((x.size() as u64) << 32) ^ y.size() as u64);
            let mut out = vec![
                QMat::from_predicate(q, x, y, |_, _| false),
                QMat::from_predicate(q, x, y, |_, _| true),
                QMat::from_predicate(q, x, y, |a, b| a == b),
            ];
            while out.len() < limit {
                let entries = (0..cells).map(|_| rng.gen_range(0..m)).collect();
                out.push(QMat { q: q.clone(), dom: x.clone(), cod: y.clone(), entries });
            }
            out
        }
    }
}

/// Looks up an element label, accepting either the quantale label or its index.
pub fn entry_from_label(q: &FinQuantale, label: &str) -> Option<Elem> {
    q.index_of(label)
}

impl QMat {
    /// Checks that this is the graph of a bijection with entries `e` and `⊥`.
    pub fn as_struct_iso(self, kind: StructKind) -> Result<StructIso, RelError> {
        let q = self.q.clone();
        if self.rows() != self.cols() {
            return Err(RelError::NotABijection);
        }
        for x in 0..self.rows() {
            let hits: Vec<usize> = (0..self.cols()).filter(|&y| self.get(x, y) == q.unit()).collect();
            let rest_bottom = (0..self.cols()).all(|y| self.get(x, y) == q.unit() || self.get(x, y) == q.bottom());
            if hits.len() != 1 || !rest_bottom {
                return Err(RelError::NotABijection);
            }
        }
        for y in 0..self.cols() {
            if (0..self.rows()).filter(|&x| self.get(x, y) == q.unit()).count() != 1 {
                return Err(RelError::NotABijection);
            }
        }
        Ok(StructIso { kind, mat: self })
    }
}

/// Iterates the lattice of a quantale; used to enumerate vectors and matrices.
pub fn quantale_elements(q: &FinQuantale) -> Vec<Elem> {
    q.lattice().elements()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantale::examples::{boolean, lukasiewicz};

    fn l3() -> Arc<FinQuantale> {
        Arc::new(lukasiewicz(3))
    }

    #[test]
    fn composition_of_halves() {
        let q = l3();
        let one = FinSet::of_size(1);
        let half = QMat::new(q.clone(), one.clone(), one.clone(), vec![1]).unwrap();
        assert_eq!(half.compose(&half).unwrap().entries(), &[0]);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let q = l3();
        let a = QMat::identity(&q, &FinSet::of_size(2));
        let b = QMat::identity(&q, &FinSet::of_size(3));
        assert_eq!(a.compose(&b).unwrap_err(), RelError::ShapeMismatch { left_cod: 2, right_dom: 3 });
    }

    #[test]
    fn empty_set_morphisms() {
        let q = l3();
        let empty = FinSet::of_size(0);
        let two = FinSet::of_size(2);
        let ms = morphisms(&q, &empty, &two, 100, 0);
        assert_eq!(ms.len(), 1);
        let id = QMat::identity(&q, &empty);
        assert_eq!(id.compose(&ms[0]).unwrap(), ms[0]);
    }

    #[test]
    fn symmetry_is_involutive() {
        let q = l3();
        let (x, y) = (FinSet::of_size(2), FinSet::of_size(3));
        let s = structural(&q, StructKind::Symmetry, &[x.clone(), y.clone()]);
        let back = structural(&q, StructKind::Symmetry, &[y, x]);
        assert!(s.mat().compose(back.mat()).unwrap().is_identity());
    }

    #[test]
    fn double_dual_is_curried_evaluation() {
        let q = l3();
        for n in 0..3 {
            let x = FinSet::of_size(n);
            let xs = x.dual();
            let sym = structural(&q, StructKind::Symmetry, &[xs.clone(), x.clone()]);
            let ev = ev_relation(&q, &x, &FinSet::unit());
            let transposed = curry(&sym.mat().compose(&ev).unwrap(), &xs, &x).unwrap();
            assert_eq!(transposed, *structural(&q, StructKind::DoubleDual, &[x]).mat());
        }
    }

    #[test]
    fn inverse_of_permutation_and_of_non_invertible() {
        let q = Arc::new(boolean());
        let two = FinSet::of_size(2);
        let swap = QMat::from_pairs(&q, &two, &two, &[(0, 1), (1, 0)]);
        assert_eq!(swap.inverse().unwrap(), swap);
        let total = QMat::from_predicate(&q, &two, &two, |_, _| true);
        assert!(total.inverse().is_none());
    }

    #[test]
    fn hom_map_is_converse_tensor() {
        let q = Arc::new(boolean());
        let (one, two) = (FinSet::of_size(1), FinSet::of_size(2));
        let f = QMat::from_pairs(&q, &one, &two, &[(0, 1)]);
        let g = QMat::identity(&q, &one);
        let h = QMat::hom_map(&f, &g);
        assert_eq!((h.rows(), h.cols()), (2, 1));
        assert_eq!(h.entries(), &[0, 1]);
    }
}
