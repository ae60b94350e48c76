mod common;

use std::collections::BTreeSet;

use cdsite::cdstructures::*;
use cdsite::fincat::*;
use cdsite::fixtures::*;
use cdsite::monoidal::*;
use common::*;
use fixedbitset::FixedBitSet;
use proptest::prelude::*;

fn fam(c: &FinCategory, x: &str, legs: &[&str]) -> CoverFamily {
    CoverFamily::from_names(c, x, legs).unwrap()
}

fn bits(c: &FinCategory, legs: &[Mor]) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(c.num_morphisms());
    for &f in legs {
        b.insert(f);
    }
    b
}

/// Iterates depth-bounded generation until no object gains a family.
fn stable_covers(c: &FinCategory, p: &CdStructure) -> Vec<BTreeSet<CoverFamily>> {
    let mut prev: Vec<BTreeSet<CoverFamily>> = c.objects().map(|x| generate_simple_covers(c, p, x, 0).unwrap()).collect();
    for depth in 1..12 {
        let next: Vec<BTreeSet<CoverFamily>> =
            c.objects().map(|x| generate_simple_covers(c, p, x, depth).unwrap()).collect();
        if next == prev {
            return next;
        }
        prev = next;
    }
    panic!("generation did not stabilize");
}

#[test]
fn normalization() {
    let c = sq();
    let n0 = normalize_cd(&c, &CdStructure::empty());
    assert_eq!(n0.len(), 4);
    assert!(n0.squares().iter().all(|s| s.is_degenerate(&c)));
    let n1 = normalize_cd(&c, &p_sq(&c));
    assert_eq!(n1.len(), 5);
    assert_eq!(normalize_cd(&c, &n1), n1);
}

#[test]
fn forward_generation_examples() {
    let c = sq();
    let p = normalize_cd(&c, &p_sq(&c));
    let d = c.object_id("d").unwrap();
    let d0 = generate_simple_covers(&c, &p, d, 0).unwrap();
    assert_eq!(d0, BTreeSet::from([fam(&c, "d", &["id_d"])]));
    let d1 = generate_simple_covers(&c, &p, d, 1).unwrap();
    assert_eq!(d1, BTreeSet::from([fam(&c, "d", &["id_d"]), fam(&c, "d", &["bd", "cd"])]));
    let b = c.object_id("b").unwrap();
    for k in 0..5 {
        assert_eq!(generate_simple_covers(&c, &p, b, k).unwrap(), BTreeSet::from([fam(&c, "b", &["id_b"])]));
    }
}

#[test]
fn backward_generation_examples() {
    let c = sq();
    let p = normalize_cd(&c, &p_sq(&c));
    let d = c.object_id("d").unwrap();
    assert_eq!(generate_simple_covers_alt(&c, &p, d, 1).unwrap(), generate_simple_covers(&c, &p, d, 1).unwrap());
    let a = c.object_id("a").unwrap();
    for k in 0..4 {
        assert_eq!(generate_simple_covers_alt(&c, &p, a, k).unwrap(), BTreeSet::from([fam(&c, "a", &["id_a"])]));
    }
    assert_eq!(generate_simple_covers_alt(&c, &p, d, 0).unwrap(), BTreeSet::from([fam(&c, "d", &["id_d"])]));
}

#[test]
fn both_generations_agree_on_sq() {
    let c = sq();
    let p = normalize_cd(&c, &p_sq(&c));
    for x in c.objects() {
        for depth in 0..=3 {
            assert_eq!(
                generate_simple_covers(&c, &p, x, depth).unwrap(),
                generate_simple_covers_alt(&c, &p, x, depth).unwrap()
            );
        }
    }
}

#[test]
fn exact_searches_match_generation_on_sq() {
    let c = sq();
    let p = normalize_cd(&c, &p_sq(&c));
    let stable = stable_covers(&c, &p);
    let d = c.object_id("d").unwrap();
    let all: Vec<Mor> = c.incoming(d).to_vec();
    for mask in 0u32..(1 << all.len()) {
        let legs: Vec<Mor> = (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| all[i]).collect();
        let allowed = bits(&c, &legs);
        let within = simple_covers_within(&c, &p, d, &allowed, DEFAULT_SEARCH_CAP).unwrap();
        let expected: BTreeSet<CoverFamily> =
            stable[d].iter().filter(|f| f.legs.iter().all(|&l| allowed.contains(l))).cloned().collect();
        assert_eq!(within, expected);
        let found = contains_simple_cover(&c, &p, d, &allowed, DEFAULT_SEARCH_CAP);
        assert_eq!(found.found(), !expected.is_empty());
        if let Search::Found(w) = found {
            assert!(stable[d].contains(&w));
        }
        let f = CoverFamily::new(d, legs);
        assert_eq!(is_simple_cover(&c, &p, &f).unwrap(), stable[d].contains(&f));
    }
}

#[test]
fn tensor_stability() {
    let m = sq_meet();
    let c = &m.base;
    let p = normalize_cd(c, &p_sq(c));
    let bad = tensor_counterexamples(&p, &m);
    let names: Vec<&str> = bad.iter().map(|&(_, z)| c.object_name(z)).collect();
    assert!(names.contains(&"c") && names.contains(&"b"), "{names:?}");
    assert!(!is_tensor_stable(&p, &m));
    // Tensoring by the unit never produces a counterexample.
    assert!(bad.iter().all(|&(_, z)| z != m.unit));

    let sat = tensor_saturate(&p, &m);
    assert!(is_tensor_stable(&sat, &m));
    let expected = normalize_cd(
        c,
        &CdStructure::from_names(c, &[["ab", "ac", "bd", "cd"], ["id_a", "ac", "ac", "id_c"], ["ab", "id_a", "id_b", "ab"]])
            .unwrap(),
    );
    assert_eq!(sat, expected);
    assert_eq!(tensor_saturate(&sat, &m), sat);
    assert_eq!(tensor_saturate(&CdStructure::empty(), &m), normalize_cd(c, &CdStructure::empty()));
}

fn random_cd_on_sq_meet() -> impl Strategy<Value = CdStructure> {
    let c = sq();
    let sqs = all_squares(&c);
    proptest::collection::vec(proptest::bool::weighted(0.2), sqs.len()).prop_map(move |pick| {
        CdStructure::new(&c, sqs.iter().zip(&pick).filter(|(_, &b)| b).map(|(s, _)| *s)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]
    #[test]
    fn saturation_is_a_closure_operator(p in random_cd_on_sq_meet(), q in random_cd_on_sq_meet()) {
        let m = sq_meet();
        let c = &m.base;
        let sp = tensor_saturate(&p, &m);
        prop_assert!(p.is_subset(&sp));
        prop_assert_eq!(tensor_saturate(&sp, &m), sp.clone());
        let pq = p.union(&q);
        prop_assert!(sp.is_subset(&tensor_saturate(&pq, &m)));
        prop_assert!(is_tensor_stable(&sp, &m));
        let _ = c;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn both_generations_agree_on_random_posets((c, p) in random_site(5)) {
        let p = normalize_cd(&c, &p);
        for x in c.objects() {
            for depth in 0..=2 {
                prop_assert_eq!(
                    generate_simple_covers(&c, &p, x, depth).unwrap(),
                    generate_simple_covers_alt(&c, &p, x, depth).unwrap()
                );
            }
        }
    }

    #[test]
    fn containment_search_matches_generation((c, p) in random_site(5), seed in any::<u64>()) {
        let p = normalize_cd(&c, &p);
        let stable = stable_covers(&c, &p);
        for x in c.objects() {
            let inc = c.incoming(x);
            let legs: Vec<Mor> = inc.iter().enumerate().filter(|(i, _)| seed >> (i % 64) & 1 == 1).map(|(_, &f)| f).collect();
            let allowed = bits(&c, &legs);
            let expected = stable[x].iter().any(|f| f.legs.iter().all(|&l| allowed.contains(l)));
            prop_assert_eq!(contains_simple_cover(&c, &p, x, &allowed, DEFAULT_SEARCH_CAP).found(), expected);
            for f in &stable[x] {
                prop_assert!(is_simple_cover(&c, &p, f).unwrap());
            }
        }
    }
}

#[test]
fn tuple_cd_structure() {
    let m = sq_meet();
    let c = &m.base;
    let t = build_tuple_category(&m, 2).unwrap();
    let p = normalize_cd(c, &p_sq(c));
    let pt = monoidal_cd(&p, &t);
    let nd: Vec<&Square> = pt.non_degenerate(&t.cat).collect();
    assert_eq!(nd.len(), 1 + 2 * 4);
    assert_eq!(pt.len(), nd.len() + t.cat.num_objects());
    let id = |x: &str| c.identity(c.object_id(x).unwrap());
    let mid = |x: &str| c.morphism_id(x).unwrap();
    for x in ["a", "b", "c", "d"] {
        let xo = c.object_id(x).unwrap();
        for first in [true, false] {
            let obj = |o: &str| {
                let oo = c.object_id(o).unwrap();
                t.tuple_id(&if first { [oo, xo] } else { [xo, oo] }).unwrap()
            };
            let arrow = |f: &str, s: &str, g: &str| {
                let comps = if first { [mid(f), id(x)] } else { [id(x), mid(f)] };
                t.coordinatewise(obj(s), obj(g), &comps).unwrap()
            };
            let sq = Square { top: arrow("ab", "a", "b"), left: arrow("ac", "a", "c"), p: arrow("bd", "b", "d"), e: arrow("cd", "c", "d") };
            assert!(pt.contains(&sq));
        }
    }
    // Two non-degenerate coordinates at once are excluded.
    let (a, b, cc, d) = (c.object_id("a").unwrap(), c.object_id("b").unwrap(), c.object_id("c").unwrap(), c.object_id("d").unwrap());
    let tt = |x: Obj, y: Obj| t.tuple_id(&[x, y]).unwrap();
    let both = Square {
        top: t.coordinatewise(tt(a, a), tt(b, b), &[mid("ab"), mid("ab")]).unwrap(),
        left: t.coordinatewise(tt(a, a), tt(cc, cc), &[mid("ac"), mid("ac")]).unwrap(),
        p: t.coordinatewise(tt(b, b), tt(d, d), &[mid("bd"), mid("bd")]).unwrap(),
        e: t.coordinatewise(tt(cc, cc), tt(d, d), &[mid("cd"), mid("cd")]).unwrap(),
    };
    assert!(both.check(&t.cat).is_ok());
    assert!(!pt.contains(&both));
    let empty = monoidal_cd(&CdStructure::empty(), &t);
    assert!(empty.squares().iter().all(|s| s.is_degenerate(&t.cat)));
}

#[test]
fn tuple_covers() {
    let m = sq_meet();
    let c = &m.base;
    let t = build_tuple_category(&m, 2).unwrap();
    let p = tensor_saturate(&p_sq(c), &m);
    let pt = monoidal_cd(&p, &t);
    let o = |x: &str| c.object_id(x).unwrap();
    let dd = t.tuple_id(&[o("d"), o("d")]).unwrap();
    let two = fam(c, "d", &["bd", "cd"]);
    let one = fam(c, "d", &["id_d"]);

    let v = product_cover(&t, &p, dd, &[two.clone(), one.clone()]).unwrap();
    assert_eq!(v.legs.len(), 2);
    let v4 = product_cover(&t, &p, dd, &[two.clone(), two.clone()]).unwrap();
    assert_eq!(v4.legs.len(), 4);
    let vid = product_cover(&t, &p, dd, &[one.clone(), one.clone()]).unwrap();
    assert_eq!(vid.legs, vec![t.cat.identity(dd)]);
    // Every choice of coordinate legs appears.
    for &u in &two.legs {
        for &w in &two.legs {
            let leg = t.coordinatewise(t.tuple_id(&[c.src(u), c.src(w)]).unwrap(), dd, &[u, w]).unwrap();
            assert!(v4.legs.contains(&leg));
        }
    }
    for cover in [&v, &v4, &vid] {
        assert!(is_simple_cover(&t.cat, &pt, cover).unwrap());
        assert!(project_cover_check(&t, &p, &pt, cover).unwrap());
    }

    let db = t.tuple_id(&[o("d"), o("b")]).unwrap();
    let cv = coordinate_cover(&t, &p, db, 0, &two).unwrap();
    let names: BTreeSet<String> = cv.names(&t.cat).into_iter().collect();
    assert_eq!(names, BTreeSet::from(["(b,b)->(d,b)[1,2;bd,id_b]".to_string(), "(c,b)->(d,b)[1,2;cd,id_b]".to_string()]));
    assert!(is_simple_cover(&t.cat, &pt, &cv).unwrap());
    assert!(project_cover_check(&t, &p, &pt, &cv).unwrap());
    assert!(matches!(coordinate_cover(&t, &p, db, 2, &two), Err(CdError::CoordinateOutOfRange { .. })));
    let d1 = t.singleton(o("d"));
    let c1 = coordinate_cover(&t, &p, d1, 0, &two).unwrap();
    let names: Vec<String> = c1.names(&t.cat);
    assert_eq!(names, vec!["(b)->(d)[1;bd]".to_string(), "(c)->(d)[1;cd]".to_string()]);
    assert!(matches!(
        coordinate_cover(&t, &p, db, 0, &fam(c, "d", &["bd"])),
        Err(CdError::NotSimple(_))
    ));
    assert!(project_cover_check(&t, &p, &pt, &CoverFamily::new(dd, vec![t.cat.identity(dd)])).unwrap());
}

#[test]
fn dimension_functions() {
    let c = sq();
    let d = sq_dims(&c);
    assert!(check_dimension_function(&c, &d).unwrap());
    let mut d0 = d.clone();
    d0.values[c.object_id("a").unwrap()] = 0;
    assert!(!check_dimension_function(&c, &d0).unwrap());
    let mut db = d.clone();
    db.values[c.object_id("b").unwrap()] = -1;
    assert!(!check_dimension_function(&c, &db).unwrap());
    assert!(check_dimension_function(&discrete(&["x", "y"]), &DimensionFunction { values: vec![0, 0] }).is_err());

    let comp = check_dim_compatible(&c, &p_sq(&c), &d);
    assert_eq!(comp.witness, Some(normalize_cd(&c, &p_sq(&c))));
    let empty = check_dim_compatible(&c, &CdStructure::empty(), &d);
    assert_eq!(empty.witness, Some(normalize_cd(&c, &CdStructure::empty())));
    // With dim(b) = 3 the square is dropped from the candidate, and then d has no cover inside <bd, cd>.
    let mut d3 = d.clone();
    d3.values[c.object_id("b").unwrap()] = 3;
    assert!(check_dim_compatible(&c, &p_sq(&c), &d3).witness.is_none());

    let m = sq_meet();
    let t = build_tuple_category(&m, 2).unwrap();
    let d1 = induced_dimension(&d, &t);
    let o = |x: &str| c.object_id(x).unwrap();
    assert_eq!(d1.get(t.tuple_id(&[]).unwrap()), -1);
    assert_eq!(d1.get(t.tuple_id(&[o("b"), o("c")]).unwrap()), 4);
    assert_eq!(d1.get(t.tuple_id(&[o("a")]).unwrap()), 0);
    assert!(check_dimension_function(&t.cat, &d1).unwrap());
    let sat = tensor_saturate(&p_sq(&c), &m);
    assert!(check_dim_compatible(&c, &sat, &d).witness.is_some());
    assert!(check_dim_compatible(&t.cat, &monoidal_cd(&sat, &t), &d1).witness.is_some());
}
