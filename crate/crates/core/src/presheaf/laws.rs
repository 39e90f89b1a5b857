//! Law checks for presheaves and for mixed-variance families of maps.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{elements_within, LatticePresheaf};
use crate::lattice::{right_adjoint_at, Elem, Lattice};
use crate::relbase::{morphisms, structural, FinSet, QMat, StructKind};
use crate::report::{Budget, Law, Verdict, Witness};
use crate::total::internal_hom;

pub(crate) fn set(n: usize) -> FinSet {
    FinSet::of_size(n)
}

pub(crate) fn homs(p: &dyn LatticePresheaf, x: usize, y: usize, budget: &Budget) -> Vec<QMat> {
    morphisms(p.base(), &set(x), &set(y), budget.max_hom, budget.seed)
}

/// All index pairs into `a × b`, or a deterministic sample of `limit` of them.
pub(crate) fn index_pairs(a: usize, b: usize, limit: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut all: Vec<(usize, usize)> = (0..a).flat_map(|i| (0..b).map(move |j| (i, j))).collect();
    if all.len() > limit {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (a as u64) << 20 ^ b as u64);
        all.shuffle(&mut rng);
        all.truncate(limit);
        all.sort_unstable();
    }
    all
}

fn join_dense_with_bottom(p: &dyn LatticePresheaf, x: usize) -> Vec<Elem> {
    let c = p.carrier(x).expect("supported size");
    let mut v = c.join_dense();
    v.push(c.bottom());
    v
}

/// Checks functoriality, sup-preservation, naturality and bilinearity of the
/// multiplication, and the unit, associativity and symmetry coherences.
pub fn validate(p: &dyn LatticePresheaf, budget: &Budget) -> Vec<Verdict> {
    let sizes: Vec<usize> = budget.sizes().filter(|&n| p.supports(n)).collect();
    let elems = |n: usize| elements_within(&p.carrier(n).expect("supported size"), budget);
    let show = |n: usize, a: Elem| p.describe(n, a);

    let mut identity = Law::new("presheaf.identity", "functoriality: identities", budget);
    let mut composition = Law::new("presheaf.composition", "functoriality: composites", budget);
    let mut sup = Law::new("presheaf.sup_preserving", "values in complete lattices and sup-maps", budget);
    for &x in &sizes {
        let id = QMat::identity(p.base(), &set(x));
        for a in elems(x) {
            identity.check(p.apply(&id, a) == a, || Witness::new("=", show(x, p.apply(&id, a)), show(x, a)).bind("|X|", x));
        }
        for &y in &sizes {
            let carrier_y = p.carrier(y).expect("supported size");
            let dense = join_dense_with_bottom(p, x);
            for f in homs(p, x, y, budget) {
                let bottom = p.carrier(x).expect("supported size").bottom();
                sup.check(p.apply(&f, bottom) == carrier_y.bottom(), || {
                    Witness::new("=", show(y, p.apply(&f, bottom)), show(y, carrier_y.bottom()))
                        .bind("f", f.describe())
                        .bind("join", "empty")
                });
                for a in elems(x) {
                    for &g in &dense {
                        let joined = p.carrier(x).expect("supported size").join(a, g);
                        let lhs = p.apply(&f, joined);
                        let rhs = carrier_y.join(p.apply(&f, a), p.apply(&f, g));
                        sup.check(lhs == rhs, || {
                            Witness::new("=", show(y, lhs), show(y, rhs))
                                .bind("f", f.describe())
                                .bind("a", show(x, a))
                                .bind("b", show(x, g))
                        });
                    }
                }
            }
            for &z in &sizes {
                let (left, right) = (homs(p, x, y, budget), homs(p, y, z, budget));
                for (i, j) in index_pairs(left.len(), right.len(), budget.max_pairs, budget.seed) {
                    let (f, g) = (&left[i], &right[j]);
                    let fg = f.compose(g).expect("shapes agree");
                    for a in elems(x) {
                        let lhs = p.apply(&fg, a);
                        let rhs = p.apply(g, p.apply(f, a));
                        composition.check(lhs == rhs, || {
                            Witness::new("=", show(z, lhs), show(z, rhs))
                                .bind("f", f.describe())
                                .bind("g", g.describe())
                                .bind("a", show(x, a))
                        });
                    }
                }
            }
        }
    }

    let mut natural = Law::new("mu.natural", "multiplication is natural", budget);
    let mut bilinear = Law::new("mu.bilinear", "multiplication preserves joins in each variable", budget);
    let mut left_unit = Law::new("fig1.left_unitor", "lax monoidal coherence: left unit", budget);
    let mut right_unit = Law::new("fig1.right_unitor", "lax monoidal coherence: right unit", budget);
    let mut assoc = Law::new("fig1.associator", "lax monoidal coherence: associativity", budget);
    let mut symmetry = Law::new("fig1.symmetry", "lax monoidal coherence: symmetry", budget);
    let q = p.base();
    let u = p.unit();
    for &x in &sizes {
        if p.supports(x) && p.supports(1) {
            let lam = structural(q, StructKind::LeftUnitor, &[set(x)]);
            let rho = structural(q, StructKind::RightUnitor, &[set(x)]);
            for a in elems(x) {
                let l = p.apply(lam.mat(), p.mu(1, x, u, a));
                left_unit.check(l == a, || Witness::new("=", show(x, l), show(x, a)).bind("|X|", x));
                let r = p.apply(rho.mat(), p.mu(x, 1, a, u));
                right_unit.check(r == a, || Witness::new("=", show(x, r), show(x, a)).bind("|X|", x));
            }
        }
        for &y in &sizes {
            if !p.supports(x * y) {
                continue;
            }
            let cx = p.carrier(x).expect("supported size");
            let cy = p.carrier(y).expect("supported size");
            let cxy = p.carrier(x * y).expect("supported size");
            let sigma = structural(q, StructKind::Symmetry, &[set(x), set(y)]);
            for a in elems(x) {
                for b in elems(y) {
                    let lhs = p.apply(sigma.mat(), p.mu(x, y, a, b));
                    let rhs = p.mu(y, x, b, a);
                    symmetry.check(lhs == rhs, || {
                        Witness::new("=", show(x * y, lhs), show(x * y, rhs)).bind("a", show(x, a)).bind("b", show(y, b))
                    });
                }
            }
            let mu_ab = |a, b| p.mu(x, y, a, b);
            for b in elems(y) {
                bilinear.check(mu_ab(cx.bottom(), b) == cxy.bottom(), || {
                    Witness::new("=", show(x * y, mu_ab(cx.bottom(), b)), show(x * y, cxy.bottom())).bind("b", show(y, b))
                });
                for a in elems(x) {
                    for g in cx.join_dense() {
                        let lhs = mu_ab(cx.join(a, g), b);
                        let rhs = cxy.join(mu_ab(a, b), mu_ab(g, b));
                        bilinear.check(lhs == rhs, || {
                            Witness::new("=", show(x * y, lhs), show(x * y, rhs))
                                .bind("a", show(x, a))
                                .bind("a'", show(x, g))
                                .bind("b", show(y, b))
                        });
                    }
                }
            }
            for a in elems(x) {
                bilinear.check(mu_ab(a, cy.bottom()) == cxy.bottom(), || {
                    Witness::new("=", show(x * y, mu_ab(a, cy.bottom())), show(x * y, cxy.bottom())).bind("a", show(x, a))
                });
                for b in elems(y) {
                    for g in cy.join_dense() {
                        let lhs = mu_ab(a, cy.join(b, g));
                        let rhs = cxy.join(mu_ab(a, b), mu_ab(a, g));
                        bilinear.check(lhs == rhs, || {
                            Witness::new("=", show(x * y, lhs), show(x * y, rhs))
                                .bind("a", show(x, a))
                                .bind("b", show(y, b))
                                .bind("b'", show(y, g))
                        });
                    }
                }
            }
            for &z in &sizes {
                if !(p.supports(y * z) && p.supports(x * y * z)) {
                    continue;
                }
                let alpha = structural(q, StructKind::Associator, &[set(x), set(y), set(z)]);
                for a in elems(x) {
                    for b in elems(y) {
                        let ab = p.mu(x, y, a, b);
                        for c in elems(z) {
                            let lhs = p.apply(alpha.mat(), p.mu(x * y, z, ab, c));
                            let rhs = p.mu(x, y * z, a, p.mu(y, z, b, c));
                            assoc.check(lhs == rhs, || {
                                Witness::new("=", show(x * y * z, lhs), show(x * y * z, rhs))
                                    .bind("a", show(x, a))
                                    .bind("b", show(y, b))
                                    .bind("c", show(z, c))
                            });
                        }
                    }
                }
            }
            for &x2 in &sizes {
                for &y2 in &sizes {
                    if !p.supports(x2 * y2) {
                        continue;
                    }
                    let (fs, gs) = (homs(p, x, x2, budget), homs(p, y, y2, budget));
                    for (i, j) in index_pairs(fs.len(), gs.len(), budget.max_pairs, budget.seed) {
                        let (f, g) = (&fs[i], &gs[j]);
                        let fg = f.tensor(g);
                        for a in elems(x) {
                            for b in elems(y) {
                                let lhs = p.apply(&fg, p.mu(x, y, a, b));
                                let rhs = p.mu(x2, y2, p.apply(f, a), p.apply(g, b));
                                natural.check(lhs == rhs, || {
                                    Witness::new("=", show(x2 * y2, lhs), show(x2 * y2, rhs))
                                        .bind("f", f.describe())
                                        .bind("g", g.describe())
                                        .bind("a", show(x, a))
                                        .bind("b", show(y, b))
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    vec![
        identity.finish(),
        composition.finish(),
        sup.finish(),
        natural.finish(),
        bilinear.finish(),
        left_unit.finish(),
        right_unit.finish(),
        assoc.finish(),
        symmetry.finish(),
    ]
}

/// A family `ψ_{X,Y} : Π Q(X_i)^op × Π Q(Y_j) → Q(F(X, Y))` indexed by
/// contravariant objects `X` and covariant objects `Y`.
pub trait MixedFamily: Sync {
    fn name(&self) -> String;
    fn presheaf(&self) -> &dyn LatticePresheaf;
    /// Number of contravariant and covariant arguments.
    fn arity(&self) -> (usize, usize);
    fn object(&self, xs: &[usize], ys: &[usize]) -> usize;
    /// `F(f, g) : F(X', Y) → F(X, Y')` for `f_i : X_i → X'_i` and `g_j : Y_j → Y'_j`.
    fn morphism(&self, fs: &[QMat], gs: &[QMat]) -> QMat;
    fn component(&self, xs: &[usize], ys: &[usize], a: &[Elem], b: &[Elem]) -> Elem;
}

/// The multiplication as a family natural in two covariant arguments.
pub struct MuFamily<'a>(pub &'a dyn LatticePresheaf);

impl MixedFamily for MuFamily<'_> {
    fn name(&self) -> String {
        format!("mu[{}]", self.0.name())
    }
    fn presheaf(&self) -> &dyn LatticePresheaf {
        self.0
    }
    fn arity(&self) -> (usize, usize) {
        (0, 2)
    }
    fn object(&self, _: &[usize], ys: &[usize]) -> usize {
        ys[0] * ys[1]
    }
    fn morphism(&self, _: &[QMat], gs: &[QMat]) -> QMat {
        gs[0].tensor(&gs[1])
    }
    fn component(&self, _: &[usize], ys: &[usize], _: &[Elem], b: &[Elem]) -> Elem {
        self.0.mu(ys[0], ys[1], b[0], b[1])
    }
}

/// The internal hom `ι_{X,Y} : Q(X)^op × Q(Y) → Q(X ⊸ Y)`.
pub struct IotaFamily<'a>(pub &'a dyn LatticePresheaf);

impl MixedFamily for IotaFamily<'_> {
    fn name(&self) -> String {
        format!("iota[{}]", self.0.name())
    }
    fn presheaf(&self) -> &dyn LatticePresheaf {
        self.0
    }
    fn arity(&self) -> (usize, usize) {
        (1, 1)
    }
    fn object(&self, xs: &[usize], ys: &[usize]) -> usize {
        xs[0] * ys[0]
    }
    fn morphism(&self, fs: &[QMat], gs: &[QMat]) -> QMat {
        QMat::hom_map(&fs[0], &gs[0])
    }
    fn component(&self, xs: &[usize], ys: &[usize], a: &[Elem], b: &[Elem]) -> Elem {
        internal_hom(self.0, xs[0], ys[0], a[0], b[0])
    }
}

type ObjectFn<'a> = Box<dyn Fn(&[usize], &[usize]) -> usize + Sync + 'a>;
type MorphismFn<'a> = Box<dyn Fn(&[QMat], &[QMat]) -> QMat + Sync + 'a>;
type ComponentFn<'a> = Box<dyn Fn(&[usize], &[usize], &[Elem], &[Elem]) -> Elem + Sync + 'a>;

/// A family given by closures.
pub struct FnFamily<'a> {
    pub name: String,
    pub presheaf: &'a dyn LatticePresheaf,
    pub arity: (usize, usize),
    pub object: ObjectFn<'a>,
    pub morphism: MorphismFn<'a>,
    pub component: ComponentFn<'a>,
}

impl MixedFamily for FnFamily<'_> {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn presheaf(&self) -> &dyn LatticePresheaf {
        self.presheaf
    }
    fn arity(&self) -> (usize, usize) {
        self.arity
    }
    fn object(&self, xs: &[usize], ys: &[usize]) -> usize {
        (self.object)(xs, ys)
    }
    fn morphism(&self, fs: &[QMat], gs: &[QMat]) -> QMat {
        (self.morphism)(fs, gs)
    }
    fn component(&self, xs: &[usize], ys: &[usize], a: &[Elem], b: &[Elem]) -> Elem {
        (self.component)(xs, ys, a, b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Naturality {
    /// Both legs agree everywhere checked.
    Natural,
    /// The inequality holds and is strict somewhere.
    StrictlyLax(Witness),
    /// The inequality fails.
    Violated(Witness),
}

#[derive(Debug, Clone)]
pub struct LaxReport {
    pub naturality: Naturality,
    /// The lax square with `Q(f)` replaced by its right adjoint on the
    /// contravariant slots.
    pub adjoint_square: Verdict,
    pub verdict: Verdict,
}

fn tuples(sizes: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|t| sizes.iter().map(move |&s| [t.clone(), vec![s]].concat())).collect();
    }
    out
}

fn product_of(lists: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    lists.iter().fold(vec![vec![]], |acc, list| {
        acc.into_iter().flat_map(|t| list.iter().map(move |&e| [t.clone(), vec![e]].concat())).collect()
    })
}

/// Checks the lax (extra)naturality inequality of a family, and whether it is
/// in fact natural.
pub fn check_lax_extranatural(family: &dyn MixedFamily, budget: &Budget) -> LaxReport {
    let p = family.presheaf();
    let (n, m) = family.arity();
    let sizes: Vec<usize> = budget.sizes().filter(|&s| p.supports(s)).collect();
    let elems = |s: usize| elements_within(&p.carrier(s).expect("supported size"), budget);
    let mut lax = Law::new("lax.inequality", "lax extranaturality square", budget);
    let mut adjoint = Law::new("lax.adjoint_square", "lax square through right adjoints", budget);
    let mut strict: Option<Witness> = None;

    for xs in tuples(&sizes, n) {
        for xs2 in tuples(&sizes, n) {
            for ys in tuples(&sizes, m) {
                for ys2 in tuples(&sizes, m) {
                    let src = family.object(&xs2, &ys);
                    let dst = family.object(&xs, &ys2);
                    if !(p.supports(src) && p.supports(dst)) {
                        continue;
                    }
                    let cdst = p.carrier(dst).expect("supported size");
                    let hom_lists: Vec<Vec<QMat>> = xs
                        .iter()
                        .zip(&xs2)
                        .chain(ys.iter().zip(&ys2))
                        .map(|(&a, &b)| homs(p, a, b, budget))
                        .collect();
                    let mut choices: Vec<Vec<usize>> = vec![vec![]];
                    for list in &hom_lists {
                        choices = choices.into_iter().flat_map(|t| (0..list.len()).map(move |i| [t.clone(), vec![i]].concat())).collect();
                    }
                    if choices.len() > budget.max_pairs {
                        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed ^ (src as u64) << 16 ^ dst as u64);
                        choices.shuffle(&mut rng);
                        choices.truncate(budget.max_pairs);
                    }
                    let contra_elems: Vec<Vec<Elem>> = xs.iter().map(|&s| elems(s)).collect();
                    let contra2_elems: Vec<Vec<Elem>> = xs2.iter().map(|&s| elems(s)).collect();
                    let co_elems: Vec<Vec<Elem>> = ys.iter().map(|&s| elems(s)).collect();
                    let args_x = product_of(&contra_elems);
                    let args_x2 = product_of(&contra2_elems);
                    let args_y = product_of(&co_elems);
                    for choice in choices {
                        let fs: Vec<QMat> = (0..n).map(|i| hom_lists[i][choice[i]].clone()).collect();
                        let gs: Vec<QMat> = (0..m).map(|j| hom_lists[n + j][choice[n + j]].clone()).collect();
                        let fmap = family.morphism(&fs, &gs);
                        let bind = |w: Witness| {
                            let w = fs.iter().fold(w, |w, f| w.bind("f", f.describe()));
                            gs.iter().fold(w, |w, g| w.bind("g", g.describe()))
                        };
                        for b in &args_y {
                            let gb: Vec<Elem> = gs.iter().zip(b).map(|(g, &v)| p.apply(g, v)).collect();
                            for a in &args_x {
                                let fa: Vec<Elem> = fs.iter().zip(a).map(|(f, &v)| p.apply(f, v)).collect();
                                let lower = p.apply(&fmap, family.component(&xs2, &ys, &fa, b));
                                let upper = family.component(&xs, &ys2, a, &gb);
                                let ok = lax.check(cdst.leq(lower, upper), || {
                                    bind(Witness::new("<=", p.describe(dst, lower), p.describe(dst, upper)))
                                        .bind("x", format!("{a:?}"))
                                        .bind("y", format!("{b:?}"))
                                });
                                if ok && lower != upper && strict.is_none() {
                                    strict = Some(
                                        bind(Witness::new("<", p.describe(dst, lower), p.describe(dst, upper)))
                                            .bind("x", format!("{a:?}"))
                                            .bind("y", format!("{b:?}")),
                                    );
                                }
                            }
                            for a2 in &args_x2 {
                                let radj: Vec<Elem> = fs
                                    .iter()
                                    .zip(a2)
                                    .zip(xs.iter().zip(&xs2))
                                    .map(|((f, &v), (&s, &s2))| {
                                        let (cs, cs2) = (p.carrier(s).expect("supported"), p.carrier(s2).expect("supported"));
                                        right_adjoint_at(&cs, &cs2, |g| p.apply(f, g), v)
                                    })
                                    .collect();
                                let lower = p.apply(&fmap, family.component(&xs2, &ys, a2, b));
                                let upper = family.component(&xs, &ys2, &radj, &gb);
                                adjoint.check(cdst.leq(lower, upper), || {
                                    bind(Witness::new("<=", p.describe(dst, lower), p.describe(dst, upper)))
                                        .bind("x'", format!("{a2:?}"))
                                        .bind("y", format!("{b:?}"))
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    let naturality = match (lax.failed(), strict) {
        (true, _) => Naturality::Violated(Witness::new("<=", "", "")),
        (false, Some(w)) => Naturality::StrictlyLax(w),
        (false, None) => Naturality::Natural,
    };
    let mut verdict = lax.finish();
    verdict.law_id = format!("lax.{}", family.name());
    let naturality = match naturality {
        Naturality::Violated(_) => Naturality::Violated(verdict.witness.clone().expect("failure has a witness")),
        other => other,
    };
    verdict.detail = Some(match &naturality {
        Naturality::Natural => "natural".into(),
        Naturality::StrictlyLax(_) => "strictly lax".into(),
        Naturality::Violated(_) => "violated".into(),
    });
    LaxReport { naturality, adjoint_square: adjoint.finish(), verdict }
}
