mod common;

use std::collections::BTreeSet;

use cdsite::cdstructures::*;
use cdsite::fincat::*;
use cdsite::fixtures::*;
use cdsite::sheaves::*;
use cdsite::topology::*;
use common::*;
use proptest::prelude::*;

fn names(c: &FinCategory, s: &Sieve) -> BTreeSet<String> {
    s.names(c).into_iter().collect()
}

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn gen(c: &FinCategory, x: &str, legs: &[&str]) -> Sieve {
    let legs: Vec<Mor> = legs.iter().map(|l| c.morphism_id(l).unwrap()).collect();
    Sieve::generate(c, c.object_id(x).unwrap(), &legs).unwrap()
}

/// Covering sieves by naive closure over the whole sieve lattice: seed,
/// then close under supersets, pullback and transitivity until stable.
fn naive_covers(c: &FinCategory, p: &CdStructure, mode: Mode) -> Vec<Vec<Sieve>> {
    let sieves: Vec<Vec<Sieve>> = c.objects().map(|x| all_sieves(c, x)).collect();
    let mut cov: Vec<Vec<bool>> = sieves.iter().map(|ss| ss.iter().map(|s| s.is_maximal(c)).collect()).collect();
    let idx = |x: Obj, s: &Sieve| sieves[x].iter().position(|t| t == s).unwrap();
    for sq in p.squares() {
        let s = Sieve::generate(c, sq.lr(c), &[sq.e, sq.p]).unwrap();
        let i = idx(sq.lr(c), &s);
        cov[sq.lr(c)][i] = true;
    }
    if mode == Mode::Full {
        for &i in &classify_initial(c).initial {
            let e = idx(i, &Sieve::empty(c, i));
            cov[i][e] = true;
        }
    }
    loop {
        let mut changed = false;
        for x in c.objects() {
            for i in 0..sieves[x].len() {
                if !cov[x][i] {
                    continue;
                }
                let s = sieves[x][i].clone();
                for j in 0..sieves[x].len() {
                    if !cov[x][j] && s.is_subset(&sieves[x][j]) {
                        cov[x][j] = true;
                        changed = true;
                    }
                }
                for &f in c.incoming(x) {
                    let pb = s.pullback(c, f).unwrap();
                    let k = idx(c.src(f), &pb);
                    if !cov[c.src(f)][k] {
                        cov[c.src(f)][k] = true;
                        changed = true;
                    }
                }
                for j in 0..sieves[x].len() {
                    if cov[x][j] {
                        continue;
                    }
                    let r = &sieves[x][j];
                    if s.iter().all(|f| {
                        let pb = r.pullback(c, f).unwrap();
                        cov[c.src(f)][idx(c.src(f), &pb)]
                    }) {
                        cov[x][j] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    sieves
        .into_iter()
        .zip(cov)
        .map(|(ss, cv)| ss.into_iter().zip(cv).filter(|(_, b)| *b).map(|(s, _)| s).collect())
        .collect()
}

#[test]
fn sieve_generation_and_pullback() {
    let c = sq();
    assert_eq!(names(&c, &gen(&c, "d", &["id_d"])), set(&["id_d", "ad", "bd", "cd"]));
    assert_eq!(names(&c, &gen(&c, "d", &["bd", "cd"])), set(&["ad", "bd", "cd"]));
    assert!(gen(&c, "d", &[]).is_empty());
    assert!(Sieve::generate(&c, c.object_id("b").unwrap(), &[c.morphism_id("cd").unwrap()]).is_none());
    let s = gen(&c, "d", &["bd", "cd"]);
    assert_eq!(s.pullback(&c, c.identity(c.object_id("d").unwrap())).unwrap(), s);
    let pb = s.pullback(&c, c.morphism_id("bd").unwrap()).unwrap();
    assert!(pb.is_maximal(&c));
    let m = Sieve::maximal(&c, c.object_id("d").unwrap());
    assert!(m.pullback(&c, c.morphism_id("ad").unwrap()).unwrap().is_maximal(&c));
    assert!(sieve_pullback(&c, c.morphism_id("ab").unwrap(), &s).is_none());
}

#[test]
fn sq_topologies() {
    let c = sq();
    let p = p_sq(&c);
    let t = generate_topology(&c, &p, Mode::Coarse).unwrap();
    let d = c.object_id("d").unwrap();
    let covers: BTreeSet<BTreeSet<String>> = covering_sieves(&c, &t, d).unwrap().iter().map(|s| names(&c, s)).collect();
    assert_eq!(covers, BTreeSet::from([set(&["id_d", "ad", "bd", "cd"]), set(&["ad", "bd", "cd"])]));
    for x in ["a", "b", "c"] {
        let x = c.object_id(x).unwrap();
        assert_eq!(covering_sieves(&c, &t, x).unwrap(), vec![Sieve::maximal(&c, x)]);
    }
    assert!(is_covering(&t, &gen(&c, "d", &["bd", "cd"])));
    assert!(!is_covering(&t, &gen(&c, "d", &["ad"])));
    assert!(check_topology(&c, &t).ok());

    let full = generate_topology(&c, &p, Mode::Full).unwrap();
    let a = c.object_id("a").unwrap();
    assert!(full.least_cover(a).is_empty());
    assert_eq!(covering_sieves(&c, &full, a).unwrap().len(), 2);
    // Through a, the cover {ad} of d becomes covering in full mode.
    assert!(is_covering(&full, &gen(&c, "d", &["bd", "cd"])));
    assert!(check_topology(&c, &full).ok());
    assert!(generate_topology(&discrete(&["x", "y"]), &CdStructure::empty(), Mode::Full).is_err());

    let trivial = generate_topology(&c, &CdStructure::empty(), Mode::Coarse).unwrap();
    assert!(c.objects().all(|x| trivial.least_cover(x).is_maximal(&c)));
    assert_eq!(trivial, Topology::trivial(&c));
}

#[test]
fn normalization_does_not_change_the_topology() {
    let c = sq();
    for mode in [Mode::Coarse, Mode::Full] {
        assert_eq!(
            generate_topology(&c, &p_sq(&c), mode).unwrap(),
            generate_topology(&c, &normalize_cd(&c, &p_sq(&c)), mode).unwrap()
        );
    }
}

#[test]
fn naive_closure_agrees_on_fixtures() {
    for c in [sq(), sq_with_tail(), sq_extra_cone()] {
        let p = p_sq(&c);
        for mode in [Mode::Coarse, Mode::Full] {
            if mode == Mode::Full && classify_initial(&c).initial.is_empty() {
                continue;
            }
            let t = generate_topology(&c, &p, mode).unwrap();
            let naive = naive_covers(&c, &p, mode);
            for x in c.objects() {
                let ours: BTreeSet<Vec<usize>> = covering_sieves(&c, &t, x).unwrap().iter().map(|s| s.iter().collect()).collect();
                let theirs: BTreeSet<Vec<usize>> = naive[x].iter().map(|s| s.iter().collect()).collect();
                assert_eq!(ours, theirs);
            }
        }
    }
}

#[test]
fn simple_covers_generate_covering_sieves() {
    let c = sq();
    let p = normalize_cd(&c, &p_sq(&c));
    let t = generate_topology(&c, &p, Mode::Coarse).unwrap();
    for x in c.objects() {
        for f in generate_simple_covers(&c, &p, x, 3).unwrap() {
            assert!(is_covering(&t, &f.sieve(&c)));
        }
    }
}

#[test]
fn completeness() {
    let c = sq();
    let r = is_c_complete(&c, &p_sq(&c));
    assert!(r.holds());
    assert!(is_c_complete(&c, &CdStructure::empty()).holds());
    assert!(is_complete(&c, &p_sq(&c)).unwrap().holds());

    let tail = sq_with_tail();
    let r = is_c_complete(&tail, &p_sq(&tail));
    assert_eq!(r.verdict, Search::NotFound);
    let w = r.counterexample.unwrap();
    assert_eq!(tail.object_name(w.target), "z");
    assert_eq!(names(&tail, &w), set(&["az"]));
    // The witness re-verifies: it covers and holds no simple cover.
    let t = generate_topology(&tail, &p_sq(&tail), Mode::Coarse).unwrap();
    assert!(is_covering(&t, &w));
    assert!(!contains_simple_cover(&tail, &normalize_cd(&tail, &p_sq(&tail)), w.target, &w.members, DEFAULT_SEARCH_CAP).found());
}

#[test]
fn separation_and_local_surjectivity() {
    let c = sq();
    let t = generate_topology(&c, &p_sq(&c), Mode::Coarse).unwrap();
    for x in c.objects() {
        assert!(is_separated(&c, &t, &Presheaf::representable(&c, x)));
    }
    let full = generate_topology(&c, &p_sq(&c), Mode::Full).unwrap();
    assert!(!is_separated(&c, &full, &Presheaf::constant(&c, 2)));
    let triv = Topology::trivial(&c);
    assert!(is_separated(&c, &triv, &Presheaf::constant(&c, 2)));

    let d = c.object_id("d").unwrap();
    let yd = Presheaf::representable(&c, d);
    let sub = Presheaf::of_sieve(&c, &gen(&c, "d", &["bd", "cd"]));
    assert!(validate_presheaf(&c, &sub).ok());
    // Inclusion: sections of the sieve presheaf are morphisms, positioned within Hom(-, d).
    let incl = PresheafMorphism {
        components: c
            .objects()
            .map(|y| {
                let all = c.hom(y, d);
                all.iter().filter(|&&f| f != c.identity(d)).map(|f| all.iter().position(|g| g == f).unwrap()).collect()
            })
            .collect(),
    };
    assert!(is_natural(&c, &sub, &yd, &incl));
    assert!(is_locally_surjective(&c, &t, &sub, &yd, &incl).unwrap());
    assert!(!is_locally_surjective(&c, &triv, &sub, &yd, &incl).unwrap());
    assert!(is_locally_surjective(&c, &triv, &yd, &yd, &PresheafMorphism::identity(&yd)).unwrap());
    let mut bad = incl.clone();
    bad.components[c.object_id("b").unwrap()] = vec![];
    assert!(is_locally_surjective(&c, &t, &sub, &yd, &bad).is_err());

    // Plus construction glues the missing section.
    let plus = plus_construction(&c, &t, &sub);
    assert!(validate_presheaf(&c, &plus).ok());
    assert!(find_isomorphism(&c, &plus, &yd).is_some());
    assert!(find_isomorphism(&c, &plus_construction(&c, &t, &yd), &yd).is_some());
    let k = Presheaf::constant(&c, 2);
    assert!(find_isomorphism(&c, &plus_construction(&c, &triv, &k), &k).is_some());
}

#[test]
fn plus_twice_is_a_sheaf() {
    for c in [sq(), sq_with_tail()] {
        let p = p_sq(&c);
        for mode in [Mode::Coarse, Mode::Full] {
            let t = generate_topology(&c, &p, mode).unwrap();
            for f in enumerate_presheaves(&c, SheafCondition::None, EnumOptions::new(2)).unwrap().iter().step_by(7) {
                let once = plus_construction(&c, &t, f);
                assert!(validate_presheaf(&c, &once).ok());
                if is_separated(&c, &t, f) {
                    assert!(is_sheaf_sieves(&t, &c, &once));
                }
                assert!(is_sheaf_sieves(&t, &c, &plus_construction(&c, &t, &once)));
            }
        }
    }
}

/// The sheaf condition at every covering sieve, checked one by one.
fn sheaf_on_all_covers(c: &FinCategory, t: &Topology, f: &Presheaf) -> bool {
    c.objects().all(|x| covering_sieves(c, t, x).unwrap().iter().all(|s| is_sheaf_for_sieve(c, f, s)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn generated_topology_matches_naive_closure((c, p) in random_site(4), full in any::<bool>()) {
        let mode = if full && !classify_initial(&c).initial.is_empty() { Mode::Full } else { Mode::Coarse };
        let t = generate_topology(&c, &p, mode).unwrap();
        prop_assert!(check_topology(&c, &t).ok());
        let naive = naive_covers(&c, &p, mode);
        for x in c.objects() {
            let ours: BTreeSet<Vec<usize>> = sieves_containing(&c, t.least_cover(x), usize::MAX).unwrap().iter().map(|s| s.iter().collect()).collect();
            let theirs: BTreeSet<Vec<usize>> = naive[x].iter().map(|s| s.iter().collect()).collect();
            prop_assert_eq!(ours, theirs);
        }
    }

    #[test]
    fn least_cover_sheaf_check_matches_all_covers((c, p) in random_site(4), seed in 0usize..1000) {
        let t = generate_topology(&c, &p, Mode::Coarse).unwrap();
        let all = enumerate_presheaves(&c, SheafCondition::None, EnumOptions::new(2)).unwrap();
        for f in all.iter().skip(seed % 5).step_by(5) {
            prop_assert_eq!(is_sheaf_sieves(&t, &c, f), sheaf_on_all_covers(&c, &t, f));
        }
    }
}

#[test]
fn locally_surjective_maps_stay_locally_surjective_after_plus() {
    let c = sq();
    let t = generate_topology(&c, &p_sq(&c), Mode::Coarse).unwrap();
    let ps = enumerate_presheaves(&c, SheafCondition::None, EnumOptions::new(2)).unwrap();
    let mut checked = 0;
    for f in ps.iter().step_by(13) {
        for g in ps.iter().step_by(17) {
            for phi in natural_transformations(&c, f, g, 8) {
                if !is_locally_surjective(&c, &t, f, g, &phi).unwrap() {
                    continue;
                }
                checked += 1;
                // Push phi through two plus steps by matching families.
                let (f1, uf1) = plus_with_unit(&c, &t, f);
                let (g1, ug1) = plus_with_unit(&c, &t, g);
                let phi1 = plus_map(&c, &t, f, g, &phi, &f1, &g1);
                let (f2, _) = plus_with_unit(&c, &t, &f1);
                let (g2, _) = plus_with_unit(&c, &t, &g1);
                let phi2 = plus_map(&c, &t, &f1, &g1, &phi1, &f2, &g2);
                assert!(is_natural(&c, &f1, &g1, &phi1));
                assert!(is_natural(&c, &f2, &g2, &phi2));
                assert!(is_locally_surjective(&c, &t, &f2, &g2, &phi2).unwrap());
                // Units are natural in phi.
                let ufg = uf1.then(&phi1);
                let gu = phi.then(&ug1);
                assert_eq!(ufg, gu);
            }
        }
    }
    assert!(checked > 0);
}

/// The map `F⁺ -> G⁺` induced by `phi`, computed on matching families.
fn plus_map(
    c: &FinCategory,
    t: &Topology,
    f: &Presheaf,
    g: &Presheaf,
    phi: &PresheafMorphism,
    f1: &Presheaf,
    g1: &Presheaf,
) -> PresheafMorphism {
    let _ = (f1, g1);
    PresheafMorphism {
        components: c
            .objects()
            .map(|x| {
                let mf = matching_families(c, f, t.least_cover(x));
                let mg = matching_families(c, g, t.least_cover(x));
                mf.families
                    .iter()
                    .map(|fam| {
                        let pushed: Vec<usize> =
                            mf.members.iter().zip(fam).map(|(&h, &v)| phi.components[c.src(h)][v]).collect();
                        mg.families.iter().position(|w| *w == pushed).unwrap()
                    })
                    .collect()
            })
            .collect(),
    }
}
