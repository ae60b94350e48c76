mod common;

use std::collections::BTreeSet;

use cdsite::cdstructures::*;
use cdsite::fincat::*;
use cdsite::fixtures::*;
use cdsite::sheaves::*;
use cdsite::topology::*;
use common::*;
use proptest::prelude::*;

/// Every functor `C^op -> Set` with small carriers, by trying every table for
/// every non-identity morphism and keeping the functorial ones.
fn brute_presheaves(c: &FinCategory, max_card: usize, pointed: bool) -> BTreeSet<Presheaf> {
    let n = c.num_objects();
    let lo = usize::from(pointed);
    let mut out = BTreeSet::new();
    let mut sizes = vec![lo; n];
    loop {
        let tables: Vec<Vec<Vec<usize>>> = c
            .morphisms()
            .map(|f| {
                if c.is_identity(f) {
                    return vec![(0..sizes[c.tgt(f)]).collect()];
                }
                let (from, to) = (sizes[c.tgt(f)], sizes[c.src(f)]);
                let mut all = vec![vec![]];
                for _ in 0..from {
                    all = all.into_iter().flat_map(|t: Vec<usize>| (0..to).map(move |v| [t.clone(), vec![v]].concat())).collect();
                }
                all.retain(|t| !pointed || t.first().is_none_or(|&v| v == 0));
                all
            })
            .collect();
        let mut pick = vec![0usize; tables.len()];
        'outer: loop {
            if tables.iter().all(|t| !t.is_empty()) {
                let f = Presheaf {
                    sizes: sizes.clone(),
                    actions: pick.iter().zip(&tables).map(|(&i, t)| t[i].clone()).collect(),
                    pointed,
                };
                if validate_presheaf(c, &f).ok() {
                    out.insert(f);
                }
            } else {
                break;
            }
            for k in 0..pick.len() {
                pick[k] += 1;
                if pick[k] < tables[k].len() {
                    continue 'outer;
                }
                pick[k] = 0;
            }
            break;
        }
        let mut k = 0;
        while k < n {
            sizes[k] += 1;
            if sizes[k] <= max_card {
                break;
            }
            sizes[k] = lo;
            k += 1;
        }
        if k == n {
            return out;
        }
    }
}

fn brute_iso_classes(c: &FinCategory, fs: &BTreeSet<Presheaf>) -> usize {
    let mut reps: Vec<&Presheaf> = Vec::new();
    for f in fs {
        // Isomorphic presheaves are exactly those with an invertible natural map.
        let iso = |g: &Presheaf| {
            f.sizes == g.sizes
                && natural_transformations(c, f, g, usize::MAX).iter().any(|phi| {
                    phi.components.iter().all(|comp| comp.iter().collect::<BTreeSet<_>>().len() == comp.len())
                })
        };
        if !reps.iter().any(|g| iso(g)) {
            reps.push(f);
        }
    }
    reps.len()
}

#[test]
fn basic_presheaves_validate() {
    let c = sq();
    for x in c.objects() {
        let y = Presheaf::representable(&c, x);
        assert!(validate_presheaf(&c, &y).ok());
        for z in c.objects() {
            assert_eq!(y.sizes[z], c.hom(z, x).len());
        }
    }
    assert!(validate_presheaf(&c, &Presheaf::constant(&c, 3)).ok());
    let mut broken = Presheaf::constant(&c, 2);
    broken.actions[c.morphism_id("ab").unwrap()] = vec![1, 0];
    assert!(!validate_presheaf(&c, &broken).ok());
    let coll = collapsing();
    for x in coll.objects() {
        assert!(validate_presheaf(&coll, &Presheaf::representable(&coll, x)).ok());
    }
}

#[test]
fn enumeration_matches_brute_force() {
    for (c, card) in [(sq(), 2), (collapsing(), 2), (sub_abc(), 3), (terminal(), 3)] {
        for pointed in [false, true] {
            let opts = if pointed { EnumOptions::pointed(card) } else { EnumOptions::new(card) };
            let ours = enumerate_presheaves(&c, SheafCondition::None, opts).unwrap();
            let set: BTreeSet<Presheaf> = ours.iter().cloned().collect();
            assert_eq!(set.len(), ours.len(), "enumeration repeats a presheaf");
            let brute = brute_presheaves(&c, card, pointed);
            assert_eq!(set, brute);
            let classes = enumerate_sheaves(&c, SheafCondition::None, opts).unwrap();
            assert_eq!(classes.len(), brute_iso_classes(&c, &brute));
        }
    }
}

#[test]
fn enumeration_respects_cap_and_min_card() {
    let c = sq();
    let mut opts = EnumOptions::new(2);
    opts.cap = 10;
    assert!(matches!(enumerate_presheaves(&c, SheafCondition::None, opts), Err(SheafError::CapExceeded { .. })));
    let mut opts = EnumOptions::new(2);
    opts.min_card = 2;
    let all = enumerate_presheaves(&c, SheafCondition::None, opts).unwrap();
    assert!(all.iter().all(|f| f.sizes.iter().all(|&s| s == 2)));
    assert!(!all.is_empty());
}

#[test]
fn sheaf_count_on_the_square() {
    let c = sq();
    let p = p_sq(&c);
    let squares = enumerate_sheaves(&c, SheafCondition::Squares { p: &p, require_empty: false }, EnumOptions::new(1)).unwrap();
    // Independent count: subterminal presheaves are down-closed supports; drop those failing the square.
    let brute: Vec<Presheaf> = brute_presheaves(&c, 1, false)
        .into_iter()
        .filter(|f| p.squares().iter().all(|sq| square_is_pullback_of_sets(&c, f, sq)))
        .collect();
    assert_eq!(squares.len(), brute.len());
    assert_eq!(squares.len(), 5);

    let t = generate_topology(&c, &p, Mode::Coarse).unwrap();
    let sieves = enumerate_sheaves(&c, SheafCondition::Sieves(&t), EnumOptions::new(1)).unwrap();
    assert_eq!(sieves.len(), 5);
    let full = generate_topology(&c, &p, Mode::Full).unwrap();
    let with_empty = enumerate_sheaves(&c, SheafCondition::Squares { p: &p, require_empty: true }, EnumOptions::new(1)).unwrap();
    let full_sieves = enumerate_sheaves(&c, SheafCondition::Sieves(&full), EnumOptions::new(1)).unwrap();
    assert_eq!(with_empty.len(), 4);
    assert_eq!(with_empty, full_sieves);
    assert!(is_sheaf_squares(&discrete(&["x", "y"]), &CdStructure::empty(), &Presheaf::constant(&discrete(&["x", "y"]), 1), true).is_err());
}

#[test]
fn square_pullback_condition_by_hand() {
    let c = sq();
    let sq0 = p_sq(&c).squares()[0];
    // F(d) = 1 with F(b) = F(c) = 2 over F(a) = 1 fails: the fibre product has 4 points.
    let f = Presheaf::from_sections(&c, vec![vec![0], vec![0, 1], vec![0, 1], vec![0]], false, |g, &s| {
        if c.is_identity(g) { s } else { 0 }
    });
    assert!(validate_presheaf(&c, &f).ok());
    assert!(!square_is_pullback_of_sets(&c, &f, &sq0));
    assert!(square_is_pullback_of_sets(&c, &Presheaf::representable(&c, c.object_id("d").unwrap()), &sq0));
}

#[test]
fn natural_transformations_count() {
    let c = sq();
    // Yoneda: maps out of a representable are sections.
    let all = enumerate_presheaves(&c, SheafCondition::None, EnumOptions::new(2)).unwrap();
    for x in c.objects() {
        let y = Presheaf::representable(&c, x);
        for g in all.iter().step_by(11) {
            assert_eq!(count_natural_transformations(&c, &y, g), g.sizes[x]);
            for phi in natural_transformations(&c, &y, g, usize::MAX) {
                assert!(is_natural(&c, &y, g, &phi));
            }
        }
    }
    let k2 = Presheaf::constant(&c, 2);
    assert_eq!(count_natural_transformations(&c, &k2, &k2), 4);
    assert_eq!(natural_transformations(&c, &k2, &k2, 3).len(), 3);
}

#[test]
fn isomorphism_and_canonical_forms() {
    let c = sq();
    let all = enumerate_presheaves(&c, SheafCondition::None, EnumOptions::new(2)).unwrap();
    let classes = dedup_isomorphic(&c, all.clone());
    let canon: BTreeSet<Presheaf> = all.iter().map(|f| canonical_form(&c, f)).collect();
    assert_eq!(canon.len(), classes.len());
    for f in all.iter().step_by(9) {
        let perms: Vec<Vec<usize>> = f.sizes.iter().map(|&s| (0..s).rev().collect()).collect();
        let g = relabel(&c, f, &perms);
        assert!(validate_presheaf(&c, &g).ok());
        let iso = find_isomorphism(&c, f, &g).unwrap();
        assert!(is_natural(&c, f, &g, &iso));
        assert_eq!(canonical_form(&c, f), canonical_form(&c, &g));
    }
}

#[test]
fn restriction_along_functors() {
    let c = sq();
    let sub = sub_abc();
    let incl = FinFunctor::inclusion_by_name(&sub, &c).unwrap();
    let yd = Presheaf::representable(&c, c.object_id("d").unwrap());
    let r = restrict(&sub, &incl, &yd);
    assert!(validate_presheaf(&sub, &r).ok());
    assert_eq!(r.sizes, vec![1, 1, 1]);
    let id = FinFunctor::identity(&c);
    for f in enumerate_presheaves(&c, SheafCondition::None, EnumOptions::new(2)).unwrap().iter().step_by(5) {
        assert_eq!(&restrict(&c, &id, f), f);
        let sw = swap(&c);
        let back = restrict(&c, &sw, &restrict(&c, &sw, f));
        assert_eq!(&back, f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn enumeration_matches_brute_force_on_random_posets(c in random_poset(4)) {
        let ours: BTreeSet<Presheaf> = enumerate_presheaves(&c, SheafCondition::None, EnumOptions::new(2)).unwrap().into_iter().collect();
        prop_assert_eq!(ours, brute_presheaves(&c, 2, false));
    }

    #[test]
    fn filtered_enumeration_is_the_filter((c, p) in random_site(4)) {
        let t = generate_topology(&c, &p, Mode::Coarse).unwrap();
        let all = enumerate_presheaves(&c, SheafCondition::None, EnumOptions::new(2)).unwrap();
        let by_sieves: BTreeSet<Presheaf> = enumerate_presheaves(&c, SheafCondition::Sieves(&t), EnumOptions::new(2)).unwrap().into_iter().collect();
        let want: BTreeSet<Presheaf> = all.iter().filter(|f| is_sheaf_sieves(&t, &c, f)).cloned().collect();
        prop_assert_eq!(by_sieves, want);
        let by_squares: BTreeSet<Presheaf> = enumerate_presheaves(&c, SheafCondition::Squares { p: &p, require_empty: false }, EnumOptions::new(2)).unwrap().into_iter().collect();
        let want: BTreeSet<Presheaf> = all.iter().filter(|f| is_sheaf_squares(&c, &p, f, false).unwrap()).cloned().collect();
        prop_assert_eq!(by_squares, want);
    }
}

fn inclusion_abc() -> (FinCategory, FinCategory, FinFunctor) {
    let (sub, c) = (sub_abc(), sq());
    let f = FinFunctor::inclusion_by_name(&sub, &c).unwrap();
    (sub, c, f)
}

#[test]
fn right_kan_extension_is_right_adjoint() {
    let (sub, c, f) = inclusion_abc();
    let gs = enumerate_presheaves(&sub, SheafCondition::None, EnumOptions::new(2)).unwrap();
    let fs = enumerate_presheaves(&c, SheafCondition::None, EnumOptions::new(2)).unwrap();
    for g in gs.iter().step_by(3) {
        let ran = right_kan_extension(&sub, &c, &f, g);
        assert!(validate_presheaf(&c, &ran).ok());
        // The value at d is the fibre product over a.
        let d = c.object_id("d").unwrap();
        let (b, cc) = (sub.object_id("b").unwrap(), sub.object_id("c").unwrap());
        let fibre = (0..g.sizes[b])
            .flat_map(|s| (0..g.sizes[cc]).map(move |t| (s, t)))
            .filter(|&(s, t)| g.act(sub.morphism_id("ab").unwrap(), s) == g.act(sub.morphism_id("ac").unwrap(), t))
            .count();
        assert_eq!(ran.sizes[d], fibre);
        for h in fs.iter().step_by(29) {
            // Nat(f*H, G) ≅ Nat(H, f_*G).
            assert_eq!(
                count_natural_transformations(&sub, &restrict(&sub, &f, h), g),
                count_natural_transformations(&c, h, &ran)
            );
        }
    }
    for g in enumerate_presheaves(&sub, SheafCondition::None, EnumOptions::pointed(2)).unwrap() {
        let ran = right_kan_extension(&sub, &c, &f, &g);
        assert!(ran.pointed && validate_presheaf(&c, &ran).ok());
    }
}

#[test]
fn restriction_to_the_cospan_is_an_equivalence() {
    let (sub, c, f) = inclusion_abc();
    let p = p_sq(&c);
    let t = generate_topology(&c, &p, Mode::Coarse).unwrap();
    let r = equivalence_report(&sub, &c, &f, SheafCondition::None, SheafCondition::Sieves(&t), EnumOptions::new(2)).unwrap();
    assert!(r.fully_faithful, "{:?}", r.faithfulness_witness);
    assert!(r.essentially_surjective_within_bound, "{:?}", r.surjectivity_witness);
    assert_eq!(r.bound, 2);
    // Two-element carriers on b and c over a point at a need four sections at d.
    assert!(!r.preimages_within_bound);
    let squares = SheafCondition::Squares { p: &p, require_empty: false };
    let r2 = equivalence_report(&sub, &c, &f, SheafCondition::None, squares, EnumOptions::new(2)).unwrap();
    assert_eq!(r, r2);
}

#[test]
fn identity_is_an_equivalence() {
    let c = sq();
    let id = FinFunctor::identity(&c);
    let p = p_sq(&c);
    let cond = SheafCondition::Squares { p: &p, require_empty: false };
    let r = equivalence_report(&c, &c, &id, cond, cond, EnumOptions::new(2)).unwrap();
    assert!(r.fully_faithful && r.essentially_surjective_within_bound && r.preimages_within_bound);
    assert_eq!(r.target_sheaves, r.source_sheaves);
}

#[test]
fn constant_functors_are_not_equivalences() {
    let c = sq();
    let one = terminal();
    // Picking out d forgets everything else, so it is not faithful on sheaves.
    let pick = FinFunctor::from_names(&one, &c, &[("*", "d")], &[]).unwrap();
    let r = equivalence_report(&one, &c, &pick, SheafCondition::None, SheafCondition::None, EnumOptions::new(2)).unwrap();
    assert!(!r.fully_faithful);
    let (a, b) = r.faithfulness_witness.clone().unwrap();
    let nats = count_natural_transformations(&c, &a, &b);
    let restricted = count_natural_transformations(&one, &restrict(&one, &pick, &a), &restrict(&one, &pick, &b));
    assert_ne!(nats, restricted);
    // Collapsing sq to a point is fully faithful (sq is connected) but misses non-constant presheaves.
    let collapse = FinFunctor {
        obj_map: vec![0; c.num_objects()],
        mor_map: vec![0; c.num_morphisms()],
    };
    let r = equivalence_report(&c, &one, &collapse, SheafCondition::None, SheafCondition::None, EnumOptions::new(2)).unwrap();
    assert!(r.fully_faithful);
    assert!(!r.essentially_surjective_within_bound);
    let w = r.surjectivity_witness.unwrap();
    assert!(w.actions.iter().any(|a| a.iter().enumerate().any(|(i, &v)| i != v)) || w.sizes.iter().any(|&s| s != w.sizes[0]));
}
