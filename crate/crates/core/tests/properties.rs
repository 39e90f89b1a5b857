//! Randomized algebraic properties.

use std::sync::Arc;

use proptest::prelude::*;

use intq::corpus::CorpusFile;
use intq::lattice::Lattice;
use intq::presheaf::{LatticePresheaf, PowQ};
use intq::quantale::examples::lukasiewicz;
use intq::quantale::FinQuantale;
use intq::relbase::{FinSet, QMat};
use intq::total::{is_morphism, TotalObj};

fn l3() -> Arc<FinQuantale> {
    Arc::new(lukasiewicz(3))
}

fn matrix(q: &Arc<FinQuantale>, rows: usize, cols: usize, entries: &[usize]) -> QMat {
    let entries = entries.iter().take(rows * cols).map(|e| e % q.len()).collect();
    QMat::new(q.clone(), FinSet::of_size(rows), FinSet::of_size(cols), entries).unwrap()
}

fn entries() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..16, 9)
}

proptest! {
    #[test]
    fn composition_is_associative(dims in prop::array::uniform4(1usize..=3), a in entries(), b in entries(), c in entries()) {
        let q = l3();
        let (f, g, h) = (matrix(&q, dims[0], dims[1], &a), matrix(&q, dims[1], dims[2], &b), matrix(&q, dims[2], dims[3], &c));
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&g.compose(&h).unwrap()).unwrap();
        prop_assert_eq!(left.entries(), right.entries());
    }

    #[test]
    fn action_is_functorial(dims in prop::array::uniform3(1usize..=2), a in entries(), b in entries(), seed in 0usize..81) {
        let q = l3();
        let p = PowQ::new(q.clone());
        let (f, g) = (matrix(&q, dims[0], dims[1], &a), matrix(&q, dims[1], dims[2], &b));
        let alpha = seed % p.carrier(dims[0]).unwrap().len();
        prop_assert_eq!(p.apply(&f.compose(&g).unwrap(), alpha), p.apply(&g, p.apply(&f, alpha)));
    }

    /// Morphisms of the total category compose.
    #[test]
    fn total_morphisms_compose(dims in prop::array::uniform3(1usize..=2), a in entries(), b in entries(), seeds in prop::array::uniform3(0usize..81)) {
        let q = l3();
        let p = PowQ::new(q.clone());
        let (f, g) = (matrix(&q, dims[0], dims[1], &a), matrix(&q, dims[1], dims[2], &b));
        let (cx, cy, cz) = (p.carrier(dims[0]).unwrap(), p.carrier(dims[1]).unwrap(), p.carrier(dims[2]).unwrap());
        let alpha = seeds[0] % cx.len();
        let beta = cy.join(p.apply(&f, alpha), seeds[1] % cy.len());
        let gamma = cz.join(p.apply(&g, beta), seeds[2] % cz.len());
        let (x, y, z) = (
            TotalObj::new(FinSet::of_size(dims[0]), alpha),
            TotalObj::new(FinSet::of_size(dims[1]), beta),
            TotalObj::new(FinSet::of_size(dims[2]), gamma),
        );
        prop_assert!(is_morphism(&p, &x, &f, &y).is_ok());
        prop_assert!(is_morphism(&p, &y, &g, &z).is_ok());
        prop_assert!(is_morphism(&p, &x, &f.compose(&g).unwrap(), &z).is_ok());
    }

    #[test]
    fn residuation_on_lukasiewicz_chains(n in 2usize..=8, a in 0usize..8, b in 0usize..8, c in 0usize..8) {
        let q = lukasiewicz(n);
        let (a, b, c) = (a % n, b % n, c % n);
        prop_assert_eq!(q.leq(q.mul(a, c), b), q.leq(c, q.residual(a, b)));
    }

    /// Writing a chain quantale out and reading it back gives the same quantale.
    #[test]
    fn chain_quantales_roundtrip(n in 2usize..=6, min_product in any::<bool>()) {
        let labels: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let mult: Vec<Vec<String>> = (0..n)
            .map(|a| (0..n).map(|b| labels[if min_product { a.min(b) } else { (a + b).saturating_sub(n - 1) }].clone()).collect())
            .collect();
        let order: Vec<[String; 2]> = labels.windows(2).map(|w| [w[0].clone(), w[1].clone()]).collect();
        let text = format!(
            "quantale q {{\n  labels: {}\n  order: {}\n  unit: \"c{}\"\n  mult: {}\n}}\n",
            serde_json::to_string(&labels).unwrap(),
            serde_json::to_string(&order).unwrap(),
            n - 1,
            serde_json::to_string(&mult).unwrap(),
        );
        let parsed = CorpusFile::parse(&text).unwrap();
        let again = CorpusFile::parse(&parsed.serialize()).unwrap();
        prop_assert_eq!(&again, &parsed);
        prop_assert_eq!(again.quantale("q").unwrap().table(), parsed.quantale("q").unwrap().table());
    }
}
