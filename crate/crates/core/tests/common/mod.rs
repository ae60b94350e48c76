#![allow(dead_code)]

use cdsite::cdstructures::CdStructure;
use cdsite::fincat::{FinCategory, Square};
use cdsite::fixtures::poset;
use proptest::prelude::*;

/// A random poset on `n` objects named `x0..`, with order compatible with the index order.
pub fn random_poset(max: usize) -> impl Strategy<Value = FinCategory> {
    (1usize..=max).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| poset_from_bits(n, &bits))
    })
}

pub fn poset_from_bits(n: usize, bits: &[bool]) -> FinCategory {
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut rel = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if bits[i * n + j] {
                rel.push((refs[i], refs[j]));
            }
        }
    }
    poset(&refs, &rel)
}

/// Every commuting square of a category, by brute force.
pub fn all_squares(c: &FinCategory) -> Vec<Square> {
    let mut out = Vec::new();
    for top in c.morphisms() {
        for &left in c.outgoing(c.src(top)) {
            for &p in c.outgoing(c.tgt(top)) {
                for &e in c.hom(c.tgt(left), c.tgt(p)) {
                    if c.compose(p, top) == c.compose(e, left) {
                        out.push(Square { top, left, p, e });
                    }
                }
            }
        }
    }
    out
}

/// A random poset with a random subset of its commuting squares.
pub fn random_site(max: usize) -> impl Strategy<Value = (FinCategory, CdStructure)> {
    random_poset(max).prop_flat_map(|c| {
        let sqs = all_squares(&c);
        let k = sqs.len();
        proptest::collection::vec(proptest::bool::weighted(0.15), k).prop_map(move |pick| {
            let chosen: Vec<Square> = sqs.iter().zip(&pick).filter(|(_, &b)| b).map(|(s, _)| *s).collect();
            let p = CdStructure::new(&c, chosen).unwrap();
            (c.clone(), p)
        })
    })
}
