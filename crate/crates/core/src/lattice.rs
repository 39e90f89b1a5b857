//! Finite complete lattices and the maps between them.
//!
//! Elements are dense indices. [`FinLattice`] stores its order and its binary
//! join and meet tables explicitly. Presheaf carriers can be much larger than a
//! table allows, so the [`Lattice`] trait also covers pointwise powers
//! ([`PowerLattice`]), bitmask powersets and closure-fixed subsets through the
//! [`Carrier`] enum.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Index of a lattice element.
pub type Elem = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("a lattice needs at least one element")]
    Empty,
    #[error("order matrix has the wrong shape: expected {expected} rows of {expected}")]
    Shape { expected: usize },
    #[error("not a partial order: {law} fails at {elements:?}")]
    NotAPoset { law: &'static str, elements: Vec<Elem> },
    #[error("no join exists for {0:?}")]
    NoJoin(Vec<Elem>),
    #[error("no meet exists for {0:?}")]
    NoMeet(Vec<Elem>),
    #[error("map table has {got} entries but the domain has {expected} elements")]
    TableLength { expected: usize, got: usize },
    #[error("map sends {0} outside its codomain")]
    OutOfRange(Elem),
    #[error("map is not monotone: {0} <= {1} but their images are not ordered")]
    NotMonotone(Elem, Elem),
    #[error("map does not preserve the join of {0:?}")]
    NotSupPreserving(Vec<Elem>),
    #[error("fixed points need an endomap")]
    NotEndo,
}

/// Read-only interface shared by every lattice representation.
pub trait Lattice {
    /// Number of elements.
    fn len(&self) -> usize;
    fn leq(&self, a: Elem, b: Elem) -> bool;
    fn join(&self, a: Elem, b: Elem) -> Elem;
    fn meet(&self, a: Elem, b: Elem) -> Elem;
    fn bottom(&self) -> Elem;
    fn top(&self) -> Elem;
    /// All elements in increasing index order.
    fn elements(&self) -> Vec<Elem>;
    /// A subset whose joins reach every element.
    fn join_dense(&self) -> Vec<Elem>;
    fn label(&self, a: Elem) -> String;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn join_all<I: IntoIterator<Item = Elem>>(&self, items: I) -> Elem
    where
        Self: Sized,
    {
        items.into_iter().fold(self.bottom(), |acc, x| self.join(acc, x))
    }

    fn meet_all<I: IntoIterator<Item = Elem>>(&self, items: I) -> Elem
    where
        Self: Sized,
    {
        items.into_iter().fold(self.top(), |acc, x| self.meet(acc, x))
    }
}

/// A finite complete lattice with precomputed order, join and meet tables.
#[derive(Clone)]
pub struct FinLattice {
    n: usize,
    leq: Vec<bool>,
    join: Vec<Elem>,
    meet: Vec<Elem>,
    bottom: Elem,
    top: Elem,
    labels: Vec<String>,
}

impl fmt::Debug for FinLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinLattice")
            .field("labels", &self.labels)
            .field("bottom", &self.bottom)
            .field("top", &self.top)
            .finish()
    }
}

impl PartialEq for FinLattice {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.leq == other.leq && self.labels == other.labels
    }
}

impl Eq for FinLattice {}

/// Validates an order matrix and builds the lattice it describes.
pub fn check_complete_lattice(
    leq: &[Vec<bool>],
    labels: Option<Vec<String>>,
) -> Result<FinLattice, LatticeError> {
    let n = leq.len();
    if n == 0 {
        return Err(LatticeError::Empty);
    }
    if leq.iter().any(|row| row.len() != n) {
        return Err(LatticeError::Shape { expected: n });
    }
    FinLattice::from_relation(n, |a, b| leq[a][b], labels)
}

impl FinLattice {
    /// Builds a lattice from an order predicate, validating every law.
    pub fn from_relation(
        n: usize,
        leq: impl Fn(Elem, Elem) -> bool,
        labels: Option<Vec<String>>,
    ) -> Result<Self, LatticeError> {
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        let mut table = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = leq(a, b);
            }
        }
        let le = |a: Elem, b: Elem| table[a * n + b];
        for a in 0..n {
            if !le(a, a) {
                return Err(LatticeError::NotAPoset { law: "reflexivity", elements: vec![a] });
            }
        }
        for a in 0..n {
            for b in (a + 1)..n {
                if le(a, b) && le(b, a) {
                    return Err(LatticeError::NotAPoset { law: "antisymmetry", elements: vec![a, b] });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if !le(a, b) {
                    continue;
                }
                for c in 0..n {
                    if le(b, c) && !le(a, c) {
                        return Err(LatticeError::NotAPoset {
                            law: "transitivity",
                            elements: vec![a, b, c],
                        });
                    }
                }
            }
        }

        let least_of = |candidates: &[Elem], below: &dyn Fn(Elem, Elem) -> bool| -> Option<Elem> {
            let mut best = *candidates.first()?;
            for &c in candidates {
                if below(c, best) {
                    best = c;
                }
            }
            candidates.iter().all(|&c| below(best, c)).then_some(best)
        };

        let mut join = vec![0; n * n];
        let mut meet = vec![0; n * n];
        for a in 0..n {
            for b in a..n {
                let uppers: Vec<Elem> = (0..n).filter(|&c| le(a, c) && le(b, c)).collect();
                let j = least_of(&uppers, &le).ok_or_else(|| LatticeError::NoJoin(vec![a, b]))?;
                join[a * n + b] = j;
                join[b * n + a] = j;
            }
        }
        for a in 0..n {
            for b in a..n {
                let lowers: Vec<Elem> = (0..n).filter(|&c| le(c, a) && le(c, b)).collect();
                let m = least_of(&lowers, &|x, y| le(y, x)).ok_or_else(|| LatticeError::NoMeet(vec![a, b]))?;
                meet[a * n + b] = m;
                meet[b * n + a] = m;
            }
        }
        let all: Vec<Elem> = (0..n).collect();
        let bottom = least_of(&all, &le).ok_or_else(|| LatticeError::NoJoin(vec![]))?;
        let top = least_of(&all, &|x, y| le(y, x)).ok_or_else(|| LatticeError::NoMeet(vec![]))?;

        let labels = labels.unwrap_or_else(|| (0..n).map(|i| i.to_string()).collect());
        if labels.len() != n {
            return Err(LatticeError::Shape { expected: n });
        }
        Ok(FinLattice { n, leq: table, join, meet, bottom, top, labels })
    }

    /// The chain `0 < 1 < ... < n-1`.
    pub fn chain(labels: Vec<String>) -> Result<Self, LatticeError> {
        let n = labels.len();
        Self::from_relation(n, |a, b| a <= b, Some(labels))
    }

    /// Builds a lattice from generating pairs `a <= b`, closed reflexively and
    /// transitively.
    pub fn from_pairs(labels: Vec<String>, pairs: &[(Elem, Elem)]) -> Result<Self, LatticeError> {
        let n = labels.len();
        let mut rel = vec![vec![false; n]; n];
        for (i, row) in rel.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(LatticeError::OutOfRange(a.max(b)));
            }
            rel[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if rel[i][k] {
                    for j in 0..n {
                        if rel[k][j] {
                            rel[i][j] = true;
                        }
                    }
                }
            }
        }
        check_complete_lattice(&rel, Some(labels))
    }

    /// The subposet on `members`, with the order inherited from `parent`.
    ///
    /// Returns the lattice together with the embedding of its indices.
    pub fn sub_lattice<L: Lattice>(parent: &L, members: &[Elem]) -> Result<(Self, Vec<Elem>), LatticeError> {
        let members: Vec<Elem> = members.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let labels = members.iter().map(|&m| parent.label(m)).collect();
        let lat = Self::from_relation(members.len(), |a, b| parent.leq(members[a], members[b]), Some(labels))?;
        Ok((lat, members))
    }

    pub fn opposite(&self) -> Self {
        let n = self.n;
        let mut leq = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                leq[a * n + b] = self.leq[b * n + a];
            }
        }
        FinLattice {
            n,
            leq,
            join: self.meet.clone(),
            meet: self.join.clone(),
            bottom: self.top,
            top: self.bottom,
            labels: self.labels.clone(),
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<Elem> {
        self.labels.iter().position(|l| l == label)
    }

    /// Elements that are not the join of the elements strictly below them.
    pub fn join_irreducibles(&self) -> Vec<Elem> {
        (0..self.n)
            .filter(|&a| {
                let below = (0..self.n).filter(|&b| b != a && self.leq(b, a));
                self.join_all(below) != a
            })
            .collect()
    }
}

impl Lattice for FinLattice {
    fn len(&self) -> usize {
        self.n
    }
    fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a * self.n + b]
    }
    fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[a * self.n + b]
    }
    fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[a * self.n + b]
    }
    fn bottom(&self) -> Elem {
        self.bottom
    }
    fn top(&self) -> Elem {
        self.top
    }
    fn elements(&self) -> Vec<Elem> {
        (0..self.n).collect()
    }
    fn join_dense(&self) -> Vec<Elem> {
        self.join_irreducibles()
    }
    fn label(&self, a: Elem) -> String {
        self.labels[a].clone()
    }
}

/// The pointwise power `base^arity`, encoded in mixed radix with coordinate 0
/// as the least significant digit.
#[derive(Clone, Debug)]
pub struct PowerLattice {
    base: Arc<FinLattice>,
    arity: usize,
    size: usize,
    join_irreducibles: Vec<Elem>,
}

impl PowerLattice {
    /// Returns `None` when `|base|^arity` exceeds `limit`.
    pub fn new(base: Arc<FinLattice>, arity: usize, limit: usize) -> Option<Self> {
        let size = (base.len()).checked_pow(u32::try_from(arity).ok()?)?;
        if size > limit {
            return None;
        }
        let join_irreducibles = base.join_irreducibles();
        Some(PowerLattice { base, arity, size, join_irreducibles })
    }

    pub fn base(&self) -> &Arc<FinLattice> {
        &self.base
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn decode(&self, mut a: Elem) -> Vec<Elem> {
        let m = self.base.len();
        (0..self.arity)
            .map(|_| {
                let d = a % m;
                a /= m;
                d
            })
            .collect()
    }

    pub fn encode(&self, digits: &[Elem]) -> Elem {
        let m = self.base.len();
        digits.iter().rev().fold(0, |acc, &d| acc * m + d)
    }

    fn zip(&self, a: Elem, b: Elem, op: impl Fn(Elem, Elem) -> Elem) -> Elem {
        let m = self.base.len();
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.arity {
            out += op(a % m, b % m) * place;
            a /= m;
            b /= m;
            place *= m;
        }
        out
    }
}

impl Lattice for PowerLattice {
    fn len(&self) -> usize {
        self.size
    }
    fn leq(&self, a: Elem, b: Elem) -> bool {
        let m = self.base.len();
        let (mut a, mut b) = (a, b);
        for _ in 0..self.arity {
            if !self.base.leq(a % m, b % m) {
                return false;
            }
            a /= m;
            b /= m;
        }
        true
    }
    fn join(&self, a: Elem, b: Elem) -> Elem {
        self.zip(a, b, |x, y| self.base.join(x, y))
    }
    fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.zip(a, b, |x, y| self.base.meet(x, y))
    }
    fn bottom(&self) -> Elem {
        self.encode(&vec![self.base.bottom(); self.arity])
    }
    fn top(&self) -> Elem {
        self.encode(&vec![self.base.top(); self.arity])
    }
    fn elements(&self) -> Vec<Elem> {
        (0..self.size).collect()
    }
    fn join_dense(&self) -> Vec<Elem> {
        let mut out = Vec::new();
        for i in 0..self.arity {
            for &c in &self.join_irreducibles {
                let mut digits = vec![self.base.bottom(); self.arity];
                digits[i] = c;
                out.push(self.encode(&digits));
            }
        }
        out
    }
    fn label(&self, a: Elem) -> String {
        let parts: Vec<String> = self.decode(a).into_iter().map(|d| self.base.label(d)).collect();
        format!("({})", parts.join(","))
    }
}

/// The subset of a dense carrier fixed by a closure operator, ordered as in
/// the parent. Joins are closures of parent joins; meets are inherited.
#[derive(Clone, Debug)]
pub struct ClosedCarrier {
    parent: Carrier,
    closure: Vec<Elem>,
    fixed: Vec<Elem>,
}

impl ClosedCarrier {
    /// `closure[a]` must be defined for every parent element `a`.
    pub fn new(parent: Carrier, closure: Vec<Elem>) -> Self {
        let fixed = parent.elements().into_iter().filter(|&a| closure[a] == a).collect();
        ClosedCarrier { parent, closure, fixed }
    }

    pub fn parent(&self) -> &Carrier {
        &self.parent
    }

    pub fn close(&self, a: Elem) -> Elem {
        self.closure[a]
    }

    pub fn fixed(&self) -> &[Elem] {
        &self.fixed
    }
}

/// Any of the lattice representations used for presheaf values.
#[derive(Clone, Debug)]
pub enum Carrier {
    Table(Arc<FinLattice>),
    Power(Arc<PowerLattice>),
    /// Subsets of `{0, .., bits-1}` as bitmasks, ordered by inclusion.
    Subsets(usize),
    Closed(Arc<ClosedCarrier>),
}

impl Carrier {
    /// Whether `a` is a valid element index of this carrier.
    pub fn contains(&self, a: Elem) -> bool {
        match self {
            Carrier::Table(l) => a < l.len(),
            Carrier::Power(p) => a < p.len(),
            Carrier::Subsets(bits) => a < (1usize << bits),
            Carrier::Closed(c) => c.parent.contains(a) && c.closure[a] == a,
        }
    }

    pub fn as_table(&self) -> Option<&Arc<FinLattice>> {
        match self {
            Carrier::Table(l) => Some(l),
            _ => None,
        }
    }
}

impl Lattice for Carrier {
    fn len(&self) -> usize {
        match self {
            Carrier::Table(l) => l.len(),
            Carrier::Power(p) => p.len(),
            Carrier::Subsets(bits) => 1 << bits,
            Carrier::Closed(c) => c.fixed.len(),
        }
    }
    fn leq(&self, a: Elem, b: Elem) -> bool {
        match self {
            Carrier::Table(l) => l.leq(a, b),
            Carrier::Power(p) => p.leq(a, b),
            Carrier::Subsets(_) => a & !b == 0,
            Carrier::Closed(c) => c.parent.leq(a, b),
        }
    }
    fn join(&self, a: Elem, b: Elem) -> Elem {
        match self {
            Carrier::Table(l) => l.join(a, b),
            Carrier::Power(p) => p.join(a, b),
            Carrier::Subsets(_) => a | b,
            Carrier::Closed(c) => c.closure[c.parent.join(a, b)],
        }
    }
    fn meet(&self, a: Elem, b: Elem) -> Elem {
        match self {
            Carrier::Table(l) => l.meet(a, b),
            Carrier::Power(p) => p.meet(a, b),
            Carrier::Subsets(_) => a & b,
            Carrier::Closed(c) => c.parent.meet(a, b),
        }
    }
    fn bottom(&self) -> Elem {
        match self {
            Carrier::Table(l) => l.bottom(),
            Carrier::Power(p) => p.bottom(),
            Carrier::Subsets(_) => 0,
            Carrier::Closed(c) => c.closure[c.parent.bottom()],
        }
    }
    fn top(&self) -> Elem {
        match self {
            Carrier::Table(l) => l.top(),
            Carrier::Power(p) => p.top(),
            Carrier::Subsets(bits) => (1 << bits) - 1,
            Carrier::Closed(c) => c.parent.top(),
        }
    }
    fn elements(&self) -> Vec<Elem> {
        match self {
            Carrier::Closed(c) => c.fixed.clone(),
            other => (0..other.len()).collect(),
        }
    }
    fn join_dense(&self) -> Vec<Elem> {
        match self {
            Carrier::Table(l) => l.join_dense(),
            Carrier::Power(p) => p.join_dense(),
            Carrier::Subsets(bits) => (0..*bits).map(|i| 1 << i).collect(),
            Carrier::Closed(c) => c
                .parent
                .join_dense()
                .into_iter()
                .map(|g| c.closure[g])
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
        }
    }
    fn label(&self, a: Elem) -> String {
        match self {
            Carrier::Table(l) => l.label(a),
            Carrier::Power(p) => p.label(a),
            Carrier::Subsets(bits) => {
                let items: Vec<String> = (0..*bits).filter(|i| a >> i & 1 == 1).map(|i| i.to_string()).collect();
                format!("{{{}}}", items.join(","))
            }
            Carrier::Closed(c) => c.parent.label(a),
        }
    }
}

/// Value of the right adjoint of a sup-preserving `f` at `y`:
/// the join of everything `f` sends below `y`.
///
/// Only the join-dense part of the domain is scanned, which is exact when `f`
/// preserves joins.
pub fn right_adjoint_at<D: Lattice, C: Lattice>(dom: &D, cod: &C, f: impl Fn(Elem) -> Elem, y: Elem) -> Elem {
    let below = dom.join_dense().into_iter().filter(|&g| cod.leq(f(g), y));
    dom.join_all(below)
}

/// Outcome of a fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fixpoint {
    pub value: Elem,
    pub iterations: usize,
}

/// Greatest fixed point of a monotone endomap, iterating down from the top.
pub fn greatest_fixpoint_of<L: Lattice>(lat: &L, f: impl Fn(Elem) -> Elem) -> Fixpoint {
    iterate_to_fixpoint(lat.top(), f)
}

/// Least fixed point of a monotone endomap, iterating up from the bottom.
pub fn least_fixpoint_of<L: Lattice>(lat: &L, f: impl Fn(Elem) -> Elem) -> Fixpoint {
    iterate_to_fixpoint(lat.bottom(), f)
}

fn iterate_to_fixpoint(start: Elem, f: impl Fn(Elem) -> Elem) -> Fixpoint {
    let mut x = start;
    let mut iterations = 0;
    loop {
        let next = f(x);
        iterations += 1;
        if next == x {
            return Fixpoint { value: x, iterations };
        }
        x = next;
    }
}

/// Ways an endomap can fail to be a closure operator.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosureViolation {
    #[error("not inflationary at {0}")]
    NotInflationary(Elem),
    #[error("not idempotent at {0}")]
    NotIdempotent(Elem),
    #[error("not monotone at {0} <= {1}")]
    NotMonotone(Elem, Elem),
}

/// Checks inflation, idempotence and monotonicity, in that order.
pub fn closure_violation<L: Lattice>(lat: &L, j: impl Fn(Elem) -> Elem) -> Option<ClosureViolation> {
    let elems = lat.elements();
    if let Some(&x) = elems.iter().find(|&&x| !lat.leq(x, j(x))) {
        return Some(ClosureViolation::NotInflationary(x));
    }
    if let Some(&x) = elems.iter().find(|&&x| j(j(x)) != j(x)) {
        return Some(ClosureViolation::NotIdempotent(x));
    }
    for &a in &elems {
        for &b in &elems {
            if lat.leq(a, b) && !lat.leq(j(a), j(b)) {
                return Some(ClosureViolation::NotMonotone(a, b));
            }
        }
    }
    None
}

/// A monotone map between table lattices.
#[derive(Clone, Debug, PartialEq)]
pub struct MonoMap {
    dom: Arc<FinLattice>,
    cod: Arc<FinLattice>,
    table: Vec<Elem>,
}

impl MonoMap {
    pub fn new(dom: Arc<FinLattice>, cod: Arc<FinLattice>, table: Vec<Elem>) -> Result<Self, LatticeError> {
        if table.len() != dom.len() {
            return Err(LatticeError::TableLength { expected: dom.len(), got: table.len() });
        }
        if let Some(&bad) = table.iter().find(|&&y| y >= cod.len()) {
            return Err(LatticeError::OutOfRange(bad));
        }
        for a in 0..dom.len() {
            for b in 0..dom.len() {
                if dom.leq(a, b) && !cod.leq(table[a], table[b]) {
                    return Err(LatticeError::NotMonotone(a, b));
                }
            }
        }
        Ok(MonoMap { dom, cod, table })
    }

    pub fn apply(&self, a: Elem) -> Elem {
        self.table[a]
    }
    pub fn dom(&self) -> &Arc<FinLattice> {
        &self.dom
    }
    pub fn cod(&self) -> &Arc<FinLattice> {
        &self.cod
    }
    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    fn endo_lattice(&self) -> Result<&FinLattice, LatticeError> {
        if self.dom != self.cod {
            return Err(LatticeError::NotEndo);
        }
        Ok(&self.dom)
    }

    pub fn greatest_fixpoint(&self) -> Result<Fixpoint, LatticeError> {
        Ok(greatest_fixpoint_of(self.endo_lattice()?, |x| self.table[x]))
    }

    pub fn least_fixpoint(&self) -> Result<Fixpoint, LatticeError> {
        Ok(least_fixpoint_of(self.endo_lattice()?, |x| self.table[x]))
    }

    /// The same table read between the opposite lattices.
    pub fn opposite(&self) -> MonoMap {
        MonoMap {
            dom: Arc::new(self.dom.opposite()),
            cod: Arc::new(self.cod.opposite()),
            table: self.table.clone(),
        }
    }

    pub fn compose(&self, then: &MonoMap) -> MonoMap {
        MonoMap {
            dom: self.dom.clone(),
            cod: then.cod.clone(),
            table: self.table.iter().map(|&y| then.table[y]).collect(),
        }
    }
}

/// A map preserving all joins, the empty one included.
#[derive(Clone, Debug, PartialEq)]
pub struct SupMap(MonoMap);

impl SupMap {
    pub fn new(map: MonoMap) -> Result<Self, LatticeError> {
        let (dom, cod) = (&map.dom, &map.cod);
        if map.table[dom.bottom()] != cod.bottom() {
            return Err(LatticeError::NotSupPreserving(vec![]));
        }
        for a in 0..dom.len() {
            for b in (a + 1)..dom.len() {
                if map.table[dom.join(a, b)] != cod.join(map.table[a], map.table[b]) {
                    return Err(LatticeError::NotSupPreserving(vec![a, b]));
                }
            }
        }
        Ok(SupMap(map))
    }

    pub fn map(&self) -> &MonoMap {
        &self.0
    }

    pub fn apply(&self, a: Elem) -> Elem {
        self.0.apply(a)
    }

    /// The right adjoint `y ↦ ⋁{x | f(x) <= y}`.
    pub fn right_adjoint(&self) -> MonoMap {
        let m = &self.0;
        let table = (0..m.cod.len())
            .map(|y| m.dom.join_all((0..m.dom.len()).filter(|&x| m.cod.leq(m.table[x], y))))
            .collect();
        MonoMap { dom: m.cod.clone(), cod: m.dom.clone(), table }
    }
}

/// An inflationary idempotent monotone endomap.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosureOp(MonoMap);

impl ClosureOp {
    pub fn new(map: MonoMap) -> Result<Self, ClosureViolation> {
        match closure_violation(map.dom.as_ref(), |x| map.table[x]) {
            Some(v) => Err(v),
            None => Ok(ClosureOp(map)),
        }
    }

    pub fn apply(&self, a: Elem) -> Elem {
        self.0.apply(a)
    }

    pub fn map(&self) -> &MonoMap {
        &self.0
    }

    pub fn fixed_points(&self) -> Vec<Elem> {
        (0..self.0.dom.len()).filter(|&a| self.0.table[a] == a).collect()
    }
}

/// Checks that an endomap is a closure operator.
pub fn is_closure_operator(map: &MonoMap) -> Result<(), ClosureViolation> {
    closure_violation(map.dom.as_ref(), |x| map.table[x]).map_or(Ok(()), Err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(ls: &[&str]) -> Vec<String> {
        ls.iter().map(|s| s.to_string()).collect()
    }

    fn chain3() -> Arc<FinLattice> {
        Arc::new(FinLattice::chain(labels(&["0", "1/2", "1"])).unwrap())
    }

    #[test]
    fn chain_tables() {
        let c = chain3();
        assert_eq!(c.join(0, 1), 1);
        assert_eq!(c.meet(1, 2), 1);
        assert_eq!((c.bottom(), c.top()), (0, 2));
        assert_eq!(c.join_irreducibles(), vec![1, 2]);
    }

    #[test]
    fn antichain_has_no_join() {
        let err = FinLattice::from_pairs(labels(&["a", "b"]), &[]).unwrap_err();
        assert_eq!(err, LatticeError::NoJoin(vec![0, 1]));
    }

    #[test]
    fn cycle_is_not_a_poset() {
        let err = FinLattice::from_relation(2, |_, _| true, None).unwrap_err();
        assert!(matches!(err, LatticeError::NotAPoset { law: "antisymmetry", .. }));
    }

    #[test]
    fn empty_rejected() {
        assert_eq!(check_complete_lattice(&[], None).unwrap_err(), LatticeError::Empty);
    }

    #[test]
    fn opposite_is_involutive() {
        let diamond = FinLattice::from_pairs(labels(&["0", "a", "b", "1"]), &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(diamond.opposite().opposite(), diamond);
        assert_eq!(diamond.opposite().bottom(), 3);
    }

    #[test]
    fn right_adjoint_of_meet_with_half() {
        let c = chain3();
        let f = SupMap::new(MonoMap::new(c.clone(), c.clone(), vec![0, 1, 1]).unwrap()).unwrap();
        assert_eq!(f.right_adjoint().table(), &[0, 2, 2]);
    }

    #[test]
    fn constant_top_is_not_sup_preserving() {
        let c = chain3();
        let f = MonoMap::new(c.clone(), c, vec![2, 2, 2]).unwrap();
        assert_eq!(SupMap::new(f).unwrap_err(), LatticeError::NotSupPreserving(vec![]));
    }

    #[test]
    fn closure_violation_reports_first_failure() {
        let c = chain3();
        let j = [1, 0, 2];
        assert_eq!(closure_violation(c.as_ref(), |x| j[x]), Some(ClosureViolation::NotInflationary(1)));
    }

    #[test]
    fn gfp_and_lfp() {
        let c = chain3();
        let f = MonoMap::new(c.clone(), c, vec![0, 1, 1]).unwrap();
        assert_eq!(f.greatest_fixpoint().unwrap().value, 1);
        assert_eq!(f.least_fixpoint().unwrap().value, 0);
    }

    #[test]
    fn power_lattice_roundtrip() {
        let p = PowerLattice::new(chain3(), 2, 100).unwrap();
        assert_eq!(p.len(), 9);
        let a = p.encode(&[2, 1]);
        assert_eq!(p.decode(a), vec![2, 1]);
        assert_eq!(p.label(a), "(1,1/2)");
        assert_eq!(p.join(p.encode(&[0, 2]), p.encode(&[1, 0])), p.encode(&[1, 2]));
        assert!(p.leq(p.encode(&[0, 1]), p.encode(&[1, 1])));
        assert!(!p.leq(p.encode(&[0, 2]), p.encode(&[1, 1])));
        assert_eq!(p.join_dense().len(), 4);
        assert!(PowerLattice::new(chain3(), 5, 100).is_none());
    }

    #[test]
    fn closed_carrier_joins() {
        let c = chain3();
        let closure = vec![0, 2, 2];
        let cc = Carrier::Closed(Arc::new(ClosedCarrier::new(Carrier::Table(c), closure)));
        assert_eq!(cc.elements(), vec![0, 2]);
        assert_eq!(cc.join_dense(), vec![2]);
        assert!(!cc.contains(1));
    }
}
