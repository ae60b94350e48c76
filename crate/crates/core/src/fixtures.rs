//! Shipped example sites. All are small posets or close relatives.

use crate::cdstructures::{CdStructure, DimensionFunction};
use crate::fincat::{CategoryBuilder, FinCategory, FinFunctor};
use crate::monoidal::{meet_monoidal, MonoidalData};

/// The commuting square `a → b, c → d` as a poset; `a` is strict initial.
pub fn sq() -> FinCategory {
    CategoryBuilder::new()
        .objects(&["a", "b", "c", "d"])
        .morphism("ab", "a", "b")
        .morphism("ac", "a", "c")
        .morphism("ad", "a", "d")
        .morphism("bd", "b", "d")
        .morphism("cd", "c", "d")
        .compose("bd", "ab", "ad")
        .compose("cd", "ac", "ad")
        .build()
        .expect("fixture is well formed")
}

/// `sq` with meet as tensor and unit `d`.
pub fn sq_meet() -> MonoidalData {
    let c = sq();
    let d = c.object_id("d").expect("fixture object");
    meet_monoidal(&c, d).expect("sq has all meets")
}

/// Builds a poset category from a strict order relation given as covering-free
/// pairs `(lower, upper)`; the order is closed transitively. Morphisms are
/// named by concatenating endpoint names.
#[allow(clippy::needless_range_loop)]
pub fn poset(objects: &[&str], less: &[(&str, &str)]) -> FinCategory {
    let n = objects.len();
    let idx = |s: &str| objects.iter().position(|&o| o == s).expect("object in list");
    let mut le = vec![vec![false; n]; n];
    for (i, row) in le.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(x, y) in less {
        le[idx(x)][idx(y)] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if le[i][k] && le[k][j] {
                    le[i][j] = true;
                }
            }
        }
    }
    let name = |i: usize, j: usize| {
        if i == j {
            format!("id_{}", objects[i])
        } else {
            format!("{}{}", objects[i], objects[j])
        }
    };
    let mut b = CategoryBuilder::new().objects(objects);
    for i in 0..n {
        for j in 0..n {
            if i != j && le[i][j] {
                b.push_morphism(&name(i, j), objects[i], objects[j]);
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i != j && j != k && le[i][j] && le[j][k] {
                    b.push_compose(&name(j, k), &name(i, j), &name(i, k));
                }
            }
        }
    }
    b.build().expect("order relation is antisymmetric")
}

/// Full subcategory of `sq` on `{a, b, c}`.
pub fn sub_abc() -> FinCategory {
    poset(&["a", "b", "c"], &[("a", "b"), ("a", "c")])
}

/// Full subcategory of `sq` on `{a, b, d}`; meet-closed with unit `d`.
pub fn sub_abd() -> FinCategory {
    poset(&["a", "b", "d"], &[("a", "b"), ("b", "d")])
}

pub fn sub_abd_meet() -> MonoidalData {
    let c = sub_abd();
    let d = c.object_id("d").expect("fixture object");
    meet_monoidal(&c, d).expect("chain has all meets")
}

/// The automorphism of `sq` exchanging `b` and `c`.
pub fn swap(c: &FinCategory) -> FinFunctor {
    FinFunctor::from_names(
        c,
        c,
        &[("a", "a"), ("b", "c"), ("c", "b"), ("d", "d")],
        &[("ab", "ac"), ("ac", "ab"), ("ad", "ad"), ("bd", "cd"), ("cd", "bd")],
    )
    .expect("swap is defined on every morphism of sq")
}

/// Two parallel arrows `u, v: X → Y` identified by `w: Y → Z`.
pub fn collapsing() -> FinCategory {
    CategoryBuilder::new()
        .objects(&["X", "Y", "Z"])
        .morphism("u", "X", "Y")
        .morphism("v", "X", "Y")
        .morphism("w", "Y", "Z")
        .morphism("wu", "X", "Z")
        .compose("w", "u", "wu")
        .compose("w", "v", "wu")
        .build()
        .expect("fixture is well formed")
}

/// `sq` with an extra object `a2` below `b` and `c` but not below `a`.
pub fn sq_extra_cone() -> FinCategory {
    poset(
        &["a", "b", "c", "d", "a2"],
        &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d"), ("a2", "b"), ("a2", "c")],
    )
}

/// A bottom `a` below `b, c, z`, which all lie below `d`.
pub fn sq_with_tail() -> FinCategory {
    poset(
        &["a", "b", "c", "d", "z"],
        &[("a", "b"), ("a", "c"), ("a", "z"), ("b", "d"), ("c", "d"), ("z", "d")],
    )
}

pub fn terminal() -> FinCategory {
    CategoryBuilder::new().object("*").build().expect("one object")
}

pub fn discrete(names: &[&str]) -> FinCategory {
    CategoryBuilder::new().objects(names).build().expect("no morphisms to compose")
}

/// The single square `ab, ac, bd, cd`, valid on any fixture containing those arrows.
pub fn p_sq(c: &FinCategory) -> CdStructure {
    CdStructure::from_names(c, &[["ab", "ac", "bd", "cd"]]).expect("fixture contains the square")
}

/// Dimensions `a: -1, b: 1, c: 1, d: 2` on `sq`.
pub fn sq_dims(c: &FinCategory) -> DimensionFunction {
    DimensionFunction::from_names(c, &[("a", -1), ("b", 1), ("c", 1), ("d", 2)]).expect("fixture objects")
}
