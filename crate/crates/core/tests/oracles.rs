//! Worked examples checked against oracles written independently of the
//! library: chain arithmetic, set-based relations, label-level vectors and
//! direct counts.

use std::collections::BTreeSet;
use std::sync::Arc;

use intq::lattice::{greatest_fixpoint_of, least_fixpoint_of, Lattice};
use intq::presheaf::{LatticePresheaf, Nuts, PowQ};
use intq::quantale::examples::{boolean, godel, lukasiewicz, powerset_z2};
use intq::quantale::FinQuantale;
use intq::relbase::{FinSet, QMat};
use intq::report::Budget;
use intq::total::{check_dualizing, internal_hom};

/// Residual on the `n`-chain read as `0..=d`, for the Lukasiewicz product.
fn lukasiewicz_residual(d: usize, a: usize, b: usize) -> usize {
    (d + b).saturating_sub(a).min(d)
}

fn godel_residual(d: usize, a: usize, b: usize) -> usize {
    if a <= b {
        d
    } else {
        b
    }
}

#[test]
fn chain_residuals_match_arithmetic() {
    for n in 2..=7 {
        let d = n - 1;
        let (l, g) = (lukasiewicz(n), godel(n));
        for a in 0..n {
            for b in 0..n {
                assert_eq!(l.residual(a, b), lukasiewicz_residual(d, a, b), "L{n} {a} -o {b}");
                assert_eq!(g.residual(a, b), godel_residual(d, a, b), "G{n} {a} -o {b}");
            }
        }
    }
}

#[test]
fn residual_examples() {
    let l3 = lukasiewicz(3);
    assert_eq!(l3.label(l3.residual(l3.index_of("1/2").unwrap(), 0)), "1/2");
    let g3 = godel(3);
    assert_eq!(g3.label(g3.residual(g3.index_of("1/2").unwrap(), 0)), "0");
    for q in [boolean(), godel(3), lukasiewicz(4), powerset_z2()] {
        for b in q.lattice().elements() {
            assert_eq!(q.residual(q.unit(), b), b);
        }
    }
}

fn labels_of(q: &FinQuantale, f: impl Fn(usize) -> usize) -> Vec<String> {
    q.lattice().elements().into_iter().map(|a| q.label(f(a))).collect()
}

#[test]
fn double_negation_examples() {
    let g3 = godel(3);
    assert_eq!(labels_of(&g3, |a| g3.double_negation(0, a)), ["0", "1", "1"]);
    let l3 = lukasiewicz(3);
    assert_eq!(labels_of(&l3, |a| l3.double_negation(0, a)), ["0", "1/2", "1"]);
    let b2 = boolean();
    assert_eq!(labels_of(&b2, |a| b2.double_negation(1, a)), ["1", "1"]);
}

#[test]
fn girard_quotient_examples() {
    let g = godel(3).girard_quotient(0).unwrap();
    assert_eq!(g.quantale.lattice().labels(), ["0", "1"]);
    assert_eq!(g.quantale.table(), vec![vec![0, 0], vec![0, 1]]);
    let l = lukasiewicz(3).girard_quotient(0).unwrap();
    assert_eq!(l.quantale.table(), lukasiewicz(3).table());
    assert_eq!(boolean().girard_quotient(1).unwrap().quantale.len(), 1);
}

#[test]
fn dualizing_examples() {
    assert!(lukasiewicz(3).is_dualizing(0).is_ok());
    assert!(boolean().is_dualizing(0).is_ok());
    let g3 = godel(3);
    assert_eq!(g3.is_dualizing(0).map_err(|a| g3.label(a)), Err("1/2".to_string()));
}

/// Boolean relations as sets of pairs.
fn as_pairs(m: &QMat) -> BTreeSet<(usize, usize)> {
    (0..m.rows()).flat_map(|x| (0..m.cols()).map(move |y| (x, y))).filter(|&(x, y)| m.get(x, y) == 1).collect()
}

#[test]
fn boolean_composition_is_relational_composition() {
    let b2 = Arc::new(boolean());
    let (x, y, z) = (FinSet::of_size(2), FinSet::of_size(3), FinSet::of_size(2));
    for r_bits in 0u32..1 << 6 {
        for s_bits in [0u32, 0b000111, 0b101010, 0b110011, 0b111111, 0b010100] {
            let r = QMat::from_predicate(&b2, &x, &y, |i, j| r_bits >> (i * 3 + j) & 1 == 1);
            let s = QMat::from_predicate(&b2, &y, &z, |j, k| s_bits >> (j * 2 + k) & 1 == 1);
            let (rp, sp) = (as_pairs(&r), as_pairs(&s));
            let expected: BTreeSet<(usize, usize)> =
                rp.iter().flat_map(|&(a, b)| sp.iter().filter(move |&&(c, _)| c == b).map(move |&(_, d)| (a, d))).collect();
            assert_eq!(as_pairs(&r.compose(&s).unwrap()), expected);
        }
    }
}

/// A vector of `Q(X)` as quantale labels, read back from its description.
fn vector(p: &PowQ, x: usize, a: usize) -> Vec<String> {
    let text = p.describe(x, a);
    let inner = text.trim_start_matches('(').trim_end_matches(')');
    if inner.is_empty() {
        vec![]
    } else {
        inner.split(',').map(String::from).collect()
    }
}

#[test]
fn vector_action_is_matrix_product() {
    let q = Arc::new(lukasiewicz(3));
    let p = PowQ::new(q.clone());
    let (x, y) = (FinSet::of_size(2), FinSet::of_size(2));
    let f = QMat::new(q.clone(), x.clone(), y.clone(), vec![2, 1, 0, 1]).unwrap();
    for a in p.carrier(2).unwrap().elements() {
        let alpha: Vec<usize> = vector(&p, 2, a).iter().map(|l| q.index_of(l).unwrap()).collect();
        let expected: Vec<String> = (0..2)
            .map(|j| {
                let v = (0..2).map(|i| (alpha[i] + f.get(i, j)).saturating_sub(2)).max().unwrap();
                q.label(v)
            })
            .collect();
        assert_eq!(vector(&p, 2, p.apply(&f, a)), expected);
    }
}

#[test]
fn internal_hom_is_pointwise_residual() {
    for q in [lukasiewicz(3), godel(3), boolean()] {
        let q = Arc::new(q);
        let p = PowQ::new(q.clone());
        for a in p.carrier(2).unwrap().elements() {
            for c in p.carrier(1).unwrap().elements() {
                let alpha = vector(&p, 2, a);
                let gamma = vector(&p, 1, c);
                let hom = vector(&p, 2, internal_hom(&p, 2, 1, a, c));
                let expected: Vec<String> = alpha
                    .iter()
                    .map(|l| q.label(q.residual(q.index_of(l).unwrap(), q.index_of(&gamma[0]).unwrap())))
                    .collect();
                assert_eq!(hom, expected, "{} alpha={alpha:?} gamma={gamma:?}", q.name());
            }
        }
    }
}

/// Up-closed families of subsets of an `n`-set, counted directly.
fn count_upsets(n: usize) -> usize {
    let subsets = 1usize << n;
    (0u64..1 << subsets)
        .filter(|&family| {
            (0..subsets).all(|s| family >> s & 1 == 0 || (0..subsets).filter(|t| t & s == s).all(|t| family >> t & 1 == 1))
        })
        .count()
}

#[test]
fn nuts_carriers_count_upsets() {
    let nuts = Nuts::new();
    for n in 0..=3 {
        assert_eq!(nuts.carrier(n).unwrap().len(), count_upsets(n), "|X|={n}");
    }
    assert_eq!(nuts.carrier(4).unwrap().len(), 168);
}

#[test]
fn godel_total_category_witness() {
    let p = PowQ::new(Arc::new(godel(3)));
    let report = check_dualizing(&p, 0, &Budget::default());
    assert!(!report.dualizing);
    let w = report.verdicts.iter().find(|v| v.law_id == "dual.criterion_a").and_then(|v| v.witness.clone()).unwrap();
    assert!(w.bindings.contains(&("alpha".to_string(), "(1/2)".to_string())), "{w}");
    let l3 = PowQ::new(Arc::new(lukasiewicz(3)));
    assert!(check_dualizing(&l3, 0, &Budget::default()).dualizing);
}

#[test]
fn fixpoints_of_constant_and_identity_maps() {
    let l4 = lukasiewicz(4);
    let lat = l4.lattice().as_ref();
    for theta in lat.elements() {
        assert_eq!(greatest_fixpoint_of(lat, |_| theta).value, theta);
        assert_eq!(least_fixpoint_of(lat, |_| theta).value, theta);
    }
    assert_eq!(greatest_fixpoint_of(lat, |a| a).value, lat.top());
    assert_eq!(least_fixpoint_of(lat, |a| a).value, lat.bottom());
}

#[test]
fn bundled_tables_match_the_builders() {
    let corpus = intq::corpus::bundled();
    for built in [boolean(), godel(3), lukasiewicz(3), lukasiewicz(4), powerset_z2()] {
        let parsed = corpus.quantale(built.name()).unwrap();
        assert_eq!(parsed.table(), built.table(), "{}", built.name());
        assert_eq!(parsed.unit(), built.unit());
        assert_eq!(parsed.lattice().labels(), built.lattice().labels());
        for a in built.lattice().elements() {
            for b in built.lattice().elements() {
                assert_eq!(parsed.leq(a, b), built.leq(a, b));
            }
        }
    }
}
