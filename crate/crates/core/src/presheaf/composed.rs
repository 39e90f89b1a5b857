use std::sync::Arc;

use super::{validate, LatticePresheaf, PresheafError};
use crate::lattice::{Carrier, Elem};
use crate::quantale::FinQuantale;
use crate::relbase::{FinSet, QMat};
use crate::report::Budget;

/// The endofunctors of the relation base supported by composition and by the
/// fixed-point constructions. Each is the relational lift of a set functor
/// that preserves weak pullbacks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endofunctor {
    Identity,
    Constant(FinSet),
    /// `X ↦ A × X`
    ProductWith(FinSet),
}

impl Endofunctor {
    pub fn on_size(&self, x: usize) -> usize {
        match self {
            Endofunctor::Identity => x,
            Endofunctor::Constant(a) => a.size(),
            Endofunctor::ProductWith(a) => a.size() * x,
        }
    }

    pub fn on_set(&self, x: &FinSet) -> FinSet {
        match self {
            Endofunctor::Identity => x.clone(),
            Endofunctor::Constant(a) => a.clone(),
            Endofunctor::ProductWith(a) => a.product(x),
        }
    }

    pub fn on_morphism(&self, f: &QMat) -> QMat {
        match self {
            Endofunctor::Identity => f.clone(),
            Endofunctor::Constant(a) => QMat::identity(f.quantale(), a),
            Endofunctor::ProductWith(a) => QMat::identity(f.quantale(), a).tensor(f),
        }
    }

    /// `F(X) ⊗ F(Y) → F(X ⊗ Y)`, the converse of the diagonal comparison map.
    pub fn multiplication(&self, q: &Arc<FinQuantale>, x: &FinSet, y: &FinSet) -> QMat {
        match self {
            Endofunctor::Identity => QMat::identity(q, &x.product(y)),
            Endofunctor::Constant(a) => {
                let n = a.size();
                QMat::from_predicate(q, &a.product(a), a, |i, b| i / n == b && i % n == b)
            }
            Endofunctor::ProductWith(a) => {
                let (nx, ny) = (x.size(), y.size());
                let dom = a.product(x).product(&a.product(y));
                QMat::from_predicate(q, &dom, &a.product(&x.product(y)), |i, j| {
                    let (left, right) = (i / (a.size() * ny), i % (a.size() * ny));
                    let (a1, xi) = (left / nx, left % nx);
                    let (a2, yi) = (right / ny, right % ny);
                    a1 == a2 && j == a1 * (nx * ny) + xi * ny + yi
                })
            }
        }
    }

    /// `1 → F(1)`, the converse of the unique map to the terminal set.
    pub fn unit_map(&self, q: &Arc<FinQuantale>) -> QMat {
        let one = FinSet::unit();
        QMat::from_predicate(q, &one, &self.on_set(&one), |_, _| true)
    }

    pub fn describe(&self) -> String {
        match self {
            Endofunctor::Identity => "identity".into(),
            Endofunctor::Constant(a) => format!("constant({})", a.size()),
            Endofunctor::ProductWith(a) => format!("product({})", a.size()),
        }
    }
}

/// `Q ∘ F` with multiplication `Q(μ^F) ∘ μ^Q` and unit `Q(u^F)(u)`.
pub struct Composed {
    inner: Arc<dyn LatticePresheaf>,
    functor: Endofunctor,
}

impl Composed {
    pub fn new(inner: Arc<dyn LatticePresheaf>, functor: Endofunctor) -> Self {
        Composed { inner, functor }
    }

    pub fn functor(&self) -> &Endofunctor {
        &self.functor
    }
}

/// The validated composite.
pub fn compose_with_endofunctor(
    inner: Arc<dyn LatticePresheaf>,
    functor: Endofunctor,
    budget: &Budget,
) -> Result<Arc<Composed>, PresheafError> {
    let p = Arc::new(Composed::new(inner, functor));
    match PresheafError::from_verdicts(&p.name(), &validate(p.as_ref(), budget)) {
        Some(err) => Err(err),
        None => Ok(p),
    }
}

impl LatticePresheaf for Composed {
    fn name(&self) -> String {
        format!("{}∘{}", self.inner.name(), self.functor.describe())
    }

    fn base(&self) -> &Arc<FinQuantale> {
        self.inner.base()
    }

    fn carrier(&self, x: usize) -> Result<Carrier, PresheafError> {
        self.inner.carrier(self.functor.on_size(x))
    }

    fn apply(&self, f: &QMat, a: Elem) -> Elem {
        self.inner.apply(&self.functor.on_morphism(f), a)
    }

    fn unit(&self) -> Elem {
        self.inner.apply(&self.functor.unit_map(self.base()), self.inner.unit())
    }

    fn mu(&self, x: usize, y: usize, a: Elem, b: Elem) -> Elem {
        let (fx, fy) = (self.functor.on_size(x), self.functor.on_size(y));
        let m = self.functor.multiplication(self.base(), &FinSet::of_size(x), &FinSet::of_size(y));
        self.inner.apply(&m, self.inner.mu(fx, fy, a, b))
    }

    fn describe(&self, x: usize, a: Elem) -> String {
        self.inner.describe(self.functor.on_size(x), a)
    }

    fn parse_element(&self, x: usize, text: &str) -> Option<Elem> {
        self.inner.parse_element(self.functor.on_size(x), text)
    }

    fn supports(&self, x: usize) -> bool {
        self.inner.supports(self.functor.on_size(x))
    }
}
