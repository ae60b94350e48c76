mod common;

use cdsite::cdstructures::*;
use cdsite::fincat::*;
use cdsite::fixtures::*;
use cdsite::monoidal::*;
use cdsite::sheaves::*;
use cdsite::topology::*;
use common::*;
use proptest::prelude::*;

fn saturated(m: &MonoidalData) -> CdStructure {
    tensor_saturate(&p_sq(&m.base), m)
}

#[test]
fn square_is_c_regular() {
    let c = sq();
    let r = is_c_regular(&c, &p_sq(&c));
    assert_eq!(r.squares.len(), 1);
    let s = &r.squares[0];
    assert!(s.pullback && s.e_mono && s.locally_surjective && s.locally_surjective_right);
    assert!(r.holds());
    assert!(is_regular(&c, &p_sq(&c)).unwrap().holds());
    let m = sq_meet();
    assert!(is_c_regular(&c, &saturated(&m)).holds());
    assert!(is_c_regular(&c, &CdStructure::empty()).holds());
}

#[test]
fn non_pullback_square_fails_condition_one() {
    // In sq_extra_cone the meet of b and c does not exist, so the square is no pullback.
    let c = sq_extra_cone();
    let r = is_c_regular(&c, &p_sq(&c));
    assert!(!r.squares[0].pullback);
    assert!(!r.holds());
    assert_eq!(r.failures().count(), 1);
}

#[test]
fn non_mono_bottom_fails() {
    // A square with e = w, which identifies u and v.
    let c = collapsing();
    let id = |x: &str| c.identity(c.object_id(x).unwrap());
    let m = |x: &str| c.morphism_id(x).unwrap();
    let sq2 = Square::new(&c, id("Y"), id("Y"), m("w"), m("w")).unwrap();
    let p2 = CdStructure::new(&c, [sq2]).unwrap();
    let r = is_c_regular(&c, &p2);
    assert!(!r.squares[0].e_mono);
    assert!(!r.holds());
    let d = check_criterion_3_1_5(&c, &p2);
    assert!(!d.squares[0].e_mono);
    assert!(!d.holds());
}

#[test]
fn derived_square_criterion() {
    let m = sq_meet();
    let c = &m.base;
    let before = check_criterion_3_1_5(c, &p_sq(c));
    assert!(!before.holds());
    assert!(before.squares[0].pullback && before.squares[0].e_mono && before.squares[0].fibre_products_exist);
    assert!(before.squares[0].derived.is_none());
    let after = check_criterion_3_1_5(c, &saturated(&m));
    assert!(after.holds());
    let want = CdStructure::from_names(c, &[["id_a", "ac", "ac", "id_c"]]).unwrap().squares()[0];
    let base_sq = p_sq(c).squares()[0];
    let row = after.squares.iter().find(|r| r.square == base_sq).unwrap();
    assert_eq!(row.derived, Some(want));
    assert!(check_criterion_3_1_5(c, &CdStructure::empty()).holds());
}

#[test]
fn tuple_criterion() {
    let m = sq_meet();
    let sat = saturated(&m);
    let r = check_criterion_3_1_7(&sat, &m);
    assert!(r.tensor_stable && r.c_complete.found() && r.unseparated.is_empty() && r.squares.holds());
    assert!(r.holds());
    let r = check_criterion_3_1_7(&p_sq(&m.base), &m);
    assert!(!r.tensor_stable);
    assert!(!r.holds());
    assert!(check_criterion_3_1_7(&CdStructure::empty(), &m).holds());
}

#[test]
fn licensed_verdicts_hold_on_tuple_sites() {
    let m = sq_meet();
    for n in 1..=2 {
        let t = build_tuple_category(&m, n).unwrap();
        for p in [p_sq(&m.base), saturated(&m)] {
            let licensed = check_criterion_3_1_5(&m.base, &p).holds() || check_criterion_3_1_7(&p, &m).holds();
            let pt = monoidal_cd(&p, &t);
            let direct = is_c_regular(&t.cat, &pt);
            if licensed {
                assert!(direct.holds(), "licensed but not c-regular: {:?}", direct.failures().next());
            }
        }
    }
}

#[test]
fn regularity_map_right_leg_detects_non_mono_fibres() {
    // The right leg w identifies u and v, so its fibre square has the
    // off-diagonal section (u, v) at X, which nothing maps onto.
    let c = collapsing();
    let id = |x: &str| c.identity(c.object_id(x).unwrap());
    let m = |x: &str| c.morphism_id(x).unwrap();
    let sq = Square::new(&c, m("u"), id("X"), m("w"), m("wu")).unwrap();
    let t = Topology::trivial(&c);
    assert!(regularity_map_locally_surjective(&c, &t, &sq, RegularityLeg::Bottom));
    assert!(!regularity_map_locally_surjective(&c, &t, &sq, RegularityLeg::Right));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn sheaf_conditions_agree_on_regular_complete_sites((c, p) in random_site(4)) {
        let p = normalize_cd(&c, &p);
        prop_assume!(is_c_complete(&c, &p).holds() && is_c_regular(&c, &p).holds());
        let t = generate_topology(&c, &p, Mode::Coarse).unwrap();
        for f in enumerate_presheaves(&c, SheafCondition::None, EnumOptions::new(2)).unwrap() {
            prop_assert_eq!(is_sheaf_sieves(&t, &c, &f), is_sheaf_squares(&c, &p, &f, false).unwrap(), "{:?}", p.describe(&c));
        }
    }
}
