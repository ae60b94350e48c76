//! The five conditions for restriction along a functor to be an equivalence
//! of sheaf categories, their transfer to tuple categories, zero completion
//! and the functor collapsing zero components.

use thiserror::Error;

use crate::cdstructures::{check_dim_compatible, is_tensor_stable, monoidal_cd, CdStructure, DimensionFunction};
use crate::fincat::{check_functor, classify_initial, validate_category, CategoryError, FinCategory, FinFunctor, Mor, MorphismData, Obj};
use crate::monoidal::{
    build_tuple_category, check_strict_monoidal, induced_tensor_functor, validate_monoidal, MonoidalData, MonoidalError,
    PartialMap, TupleCategory,
};
use crate::sheaves::{
    enumerate_presheaves, find_isomorphism, is_weak_cartesian, lax_structures_over, product_extension, restrict,
    validate_presheaf, EnumOptions, Presheaf, SheafCondition, SheafError, DEFAULT_ENUM_CAP,
};
use crate::topology::{
    check_criterion_3_1_5, check_criterion_3_1_7, generate_topology, is_c_complete, Mode, Sieve, Topology, TopologyError,
};

#[derive(Debug, Error)]
pub enum ComparisonError {
    #[error("no strict initial object")]
    NoStrictInitial,
    #[error("the monoidal unit must be terminal")]
    UnitNotTerminal,
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Monoidal(#[from] MonoidalError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
}

/// Per-condition outcome; each witness names what fails.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComparisonReport {
    pub cover_preserving: Option<String>,
    pub locally_full: Option<String>,
    pub locally_faithful: Option<String>,
    pub locally_surjective_on_objects: Option<String>,
    pub cocontinuous: Option<String>,
}

impl ComparisonReport {
    /// Truth values of conditions 1 to 5 in order.
    pub fn flags(&self) -> [bool; 5] {
        [
            self.cover_preserving.is_none(),
            self.locally_full.is_none(),
            self.locally_faithful.is_none(),
            self.locally_surjective_on_objects.is_none(),
            self.cocontinuous.is_none(),
        ]
    }

    pub fn holds(&self) -> bool {
        self.flags().iter().all(|&b| b)
    }

    /// Indices (1 to 5) of the failing conditions.
    pub fn failing(&self) -> Vec<usize> {
        self.flags().iter().enumerate().filter(|(_, &b)| !b).map(|(i, _)| i + 1).collect()
    }
}

/// The sieve of morphisms into `x` satisfying `pred`; `pred` must be closed
/// under precomposition for the result to be a sieve.
fn sieve_where(c: &FinCategory, x: Obj, mut pred: impl FnMut(Mor) -> bool) -> Sieve {
    let mut s = Sieve::empty(c, x);
    for &u in c.incoming(x) {
        if pred(u) {
            s.members.insert(u);
        }
    }
    s
}

/// Decides the five conditions against principal topologies. Every condition
/// is upward closed in the cover, so testing the least covers is exhaustive.
pub fn check_comparison(
    src: &FinCategory,
    tgt: &FinCategory,
    f: &FinFunctor,
    t_src: &Topology,
    t_tgt: &Topology,
) -> ComparisonReport {
    let mut r = ComparisonReport::default();
    for x in src.objects() {
        let legs: Vec<Mor> = t_src.least_cover(x).iter().map(|u| f.mor(u)).collect();
        let image = Sieve::generate(tgt, f.obj(x), &legs).expect("images land in f(x)");
        if !t_tgt.least_cover(f.obj(x)).is_subset(&image) {
            r.cover_preserving = Some(format!("the image of the least cover of {} does not cover", src.object_name(x)));
            break;
        }
    }
    'full: for x in src.objects() {
        for y in src.objects() {
            for &a in tgt.hom(f.obj(x), f.obj(y)) {
                let s = sieve_where(src, x, |u| {
                    let au = tgt.compose(a, f.mor(u));
                    src.hom(src.src(u), y).iter().any(|&b| f.mor(b) == au)
                });
                if !t_src.least_cover(x).is_subset(&s) {
                    r.locally_full = Some(format!("{} is not locally in the image", tgt.morphism_name(a)));
                    break 'full;
                }
            }
        }
    }
    'faithful: for x in src.objects() {
        for y in src.objects() {
            let hom = src.hom(x, y);
            for (i, &a) in hom.iter().enumerate() {
                for &b in &hom[i + 1..] {
                    if f.mor(a) != f.mor(b) {
                        continue;
                    }
                    let s = sieve_where(src, x, |u| src.compose(a, u) == src.compose(b, u));
                    if !t_src.least_cover(x).is_subset(&s) {
                        r.locally_faithful =
                            Some(format!("{} and {} are not locally equal", src.morphism_name(a), src.morphism_name(b)));
                        break 'faithful;
                    }
                }
            }
        }
    }
    for x2 in tgt.objects() {
        let s = sieve_where(tgt, x2, |v| f.obj_map.contains(&tgt.src(v)));
        let s = Sieve::generate(tgt, x2, &s.iter().collect::<Vec<_>>()).expect("legs into x2");
        if !t_tgt.least_cover(x2).is_subset(&s) {
            r.locally_surjective_on_objects = Some(tgt.object_name(x2).to_string());
            break;
        }
    }
    for x in src.objects() {
        let cover = t_tgt.least_cover(f.obj(x));
        let s = sieve_where(src, x, |v| cover.contains(f.mor(v)));
        if !t_src.least_cover(x).is_subset(&s) {
            r.cocontinuous = Some(src.object_name(x).to_string());
            break;
        }
    }
    r
}

/// `check_comparison` with both topologies generated from cd-structures.
pub fn check_comparison_sites(
    src: &FinCategory,
    tgt: &FinCategory,
    f: &FinFunctor,
    (p, mode): (&CdStructure, Mode),
    (p2, mode2): (&CdStructure, Mode),
) -> Result<ComparisonReport, TopologyError> {
    let t = generate_topology(src, p, mode)?;
    let t2 = generate_topology(tgt, p2, mode2)?;
    Ok(check_comparison(src, tgt, f, &t, &t2))
}

/// One side of the tuple-transfer harness.
#[derive(Clone, Copy, Debug)]
pub struct MonoidalSite<'a> {
    pub m: &'a MonoidalData,
    pub p: &'a CdStructure,
    pub dim: &'a DimensionFunction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransferVerdict {
    /// Some hypothesis fails; the transfer is not asserted.
    HypothesisFailure(Vec<String>),
    /// Hypotheses hold; the report is for the induced functor on tuples.
    Transfer(ComparisonReport),
}

impl TransferVerdict {
    /// Hypotheses hold and all five conditions transfer.
    pub fn transferred(&self) -> bool {
        matches!(self, TransferVerdict::Transfer(r) if r.holds())
    }
}

fn site_hypotheses(name: &str, s: MonoidalSite<'_>, out: &mut Vec<String>) {
    let c = &s.m.base;
    if !is_tensor_stable(s.p, s.m) {
        out.push(format!("{name}: not tensor stable"));
    }
    if !is_c_complete(c, s.p).holds() {
        out.push(format!("{name}: not c-complete"));
    }
    if !check_criterion_3_1_5(c, s.p).holds() && !check_criterion_3_1_7(s.p, s.m).holds() {
        out.push(format!("{name}: neither regularity criterion holds"));
    }
    if check_dim_compatible(c, s.p, s.dim).witness.is_none() {
        out.push(format!("{name}: not compatible with the dimension function"));
    }
}

/// Checks the hypotheses on both sites and on `f`, then checks all five
/// conditions for the induced functor between tuple categories of arity `n`.
/// Passing at one arity is evidence for that truncation only.
pub fn harness_4_0_3(
    f: &FinFunctor,
    src: MonoidalSite<'_>,
    tgt: MonoidalSite<'_>,
    n: usize,
) -> Result<TransferVerdict, ComparisonError> {
    let mut failures = Vec::new();
    site_hypotheses("source", src, &mut failures);
    site_hypotheses("target", tgt, &mut failures);
    let monoidal = check_strict_monoidal(src.m, tgt.m, f);
    if !monoidal.ok() {
        failures.push(format!("functor is not strictly monoidal: {monoidal}"));
    }
    let base = check_comparison_sites(&src.m.base, &tgt.m.base, f, (src.p, Mode::Coarse), (tgt.p, Mode::Coarse))?;
    if !base.holds() {
        failures.push(format!("base functor fails conditions {:?}", base.failing()));
    }
    if !failures.is_empty() {
        return Ok(TransferVerdict::HypothesisFailure(failures));
    }
    let ts = build_tuple_category(src.m, n)?;
    let tt = build_tuple_category(tgt.m, n)?;
    let ft = induced_tensor_functor(&ts, &tt, f)?;
    let report = check_comparison_sites(
        &ts.cat,
        &tt.cat,
        &ft,
        (&monoidal_cd(src.p, &ts), Mode::Coarse),
        (&monoidal_cd(tgt.p, &tt), Mode::Coarse),
    )?;
    Ok(TransferVerdict::Transfer(report))
}

/// A category with a zero morphism freely added between every pair of
/// objects whose source is not initial. Morphisms of the original category
/// keep their ids; the added ones follow.
#[derive(Clone, Debug)]
pub struct ZeroCompleted {
    pub cat: FinCategory,
    pub monoidal: Option<MonoidalData>,
    /// The strict initial object of the original category.
    pub initial: Obj,
    /// Number of morphisms inherited from the original category.
    pub inherited: usize,
    zero: Vec<Mor>,
}

impl ZeroCompleted {
    /// The designated zero morphism `x -> y`; out of the initial object it is the unique map.
    pub fn zero(&self, x: Obj, y: Obj) -> Mor {
        self.zero[x * self.cat.num_objects() + y]
    }

    pub fn is_zero(&self, f: Mor) -> bool {
        self.zero(self.cat.src(f), self.cat.tgt(f)) == f
    }

    pub fn is_added(&self, f: Mor) -> bool {
        f >= self.inherited
    }
}

pub fn zero_completion(c: &FinCategory, m: Option<&MonoidalData>) -> Result<ZeroCompleted, ComparisonError> {
    let init = classify_initial(c);
    let initial = match (init.first(), init.strict) {
        (Some(i), true) => i,
        _ => return Err(ComparisonError::NoStrictInitial),
    };
    let n = c.num_objects();
    let mut morphisms: Vec<MorphismData> = c.morphisms().map(|f| c.morphism(f).clone()).collect();
    let identities: Vec<Mor> = c.objects().map(|x| c.identity(x)).collect();
    let mut zero = vec![0; n * n];
    for x in c.objects() {
        for y in c.objects() {
            zero[x * n + y] = if c.isomorphic(x, initial) {
                c.hom(x, y)[0]
            } else {
                morphisms.push(MorphismData { name: format!("0_{}{}", c.object_name(x), c.object_name(y)), src: x, tgt: y });
                morphisms.len() - 1
            };
        }
    }
    let inherited = c.num_morphisms();
    let objects = c.object_names().to_vec();
    let is_zero = |f: Mor, zero: &[Mor], morphisms: &[MorphismData]| zero[morphisms[f].src * n + morphisms[f].tgt] == f;
    let srcs: Vec<Obj> = morphisms.iter().map(|d| d.src).collect();
    let tgts: Vec<Obj> = morphisms.iter().map(|d| d.tgt).collect();
    let cat = FinCategory::from_fn(objects, morphisms.clone(), identities, |g, f| {
        if g < inherited && f < inherited && !is_zero(g, &zero, &morphisms) && !is_zero(f, &zero, &morphisms) {
            Some(c.compose(g, f))
        } else {
            Some(zero[srcs[f] * n + tgts[g]])
        }
    })?;
    let monoidal = match m {
        None => None,
        Some(m) => {
            let md = MonoidalData::from_fn(
                cat.clone(),
                m.unit,
                |x, y| m.tensor(x, y),
                |f, g| {
                    let zf = zero[srcs[f] * n + tgts[f]] == f;
                    let zg = zero[srcs[g] * n + tgts[g]] == g;
                    if zf || zg {
                        zero[m.tensor(srcs[f], srcs[g]) * n + m.tensor(tgts[f], tgts[g])]
                    } else {
                        m.tensor_mor(f, g)
                    }
                },
            );
            let r = validate_monoidal(&md);
            if !r.ok() {
                return Err(MonoidalError::Invalid(r.to_string()).into());
            }
            Some(md)
        }
    };
    let r = validate_category(&cat);
    if !r.ok() {
        return Err(MonoidalError::Invalid(r.to_string()).into());
    }
    Ok(ZeroCompleted { cat, monoidal, initial, inherited, zero })
}

/// The inclusion of tuples over the original category into tuples over its zero completion.
pub fn tuple_inclusion(t: &TupleCategory, t0: &TupleCategory) -> FinFunctor {
    let c = &t.cat;
    FinFunctor {
        obj_map: c.objects().map(|x| t0.tuple_id(t.tuple(x)).expect("same objects and arity")).collect(),
        mor_map: c
            .morphisms()
            .map(|f| {
                let d = t.decode(f);
                let (s, g) = (t0.tuple_id(t.tuple(c.src(f))).expect("tuple"), t0.tuple_id(t.tuple(c.tgt(f))).expect("tuple"));
                t0.lookup(s, g, &d.alpha, &d.components).expect("inherited morphisms keep their ids")
            })
            .collect(),
    }
}

/// Drops every index whose component is an added zero morphism and replaces
/// that component by the map to the unit. Requires the unit to be terminal.
/// Maps out of the initial object are kept: dropping them would move the
/// identity of `(∅)`. So `j ∘ i` is the identity, but `j` is only functorial
/// up to morphisms with a component out of the initial object, which a
/// structure with a one-point value there cannot distinguish.
pub fn collapse_functor_j(z: &ZeroCompleted, t0: &TupleCategory, t: &TupleCategory) -> Result<FinFunctor, ComparisonError> {
    let base = &t.base.base;
    let unit = t.base.unit;
    if base.objects().any(|x| base.hom(x, unit).len() != 1) {
        return Err(ComparisonError::UnitNotTerminal);
    }
    let c0 = &t0.cat;
    let obj_map: Vec<Obj> = c0.objects().map(|x| t.tuple_id(t0.tuple(x)).expect("same objects and arity")).collect();
    let mor_map = c0
        .morphisms()
        .map(|f| {
            let d = t0.decode(f);
            let mut assign = d.alpha.assign.clone();
            let comps: Vec<Mor> = d
                .components
                .iter()
                .enumerate()
                .map(|(i, &phi)| {
                    if !z.is_added(phi) {
                        return phi;
                    }
                    for a in assign.iter_mut() {
                        if *a == Some(i) {
                            *a = None;
                        }
                    }
                    base.hom(z.cat.src(phi), unit)[0]
                })
                .collect();
            let alpha = PartialMap::new(d.alpha.target, assign);
            t.lookup(obj_map[c0.src(f)], obj_map[c0.tgt(f)], &alpha, &comps)
                .expect("collapsed morphism is well typed")
        })
        .collect();
    Ok(FinFunctor { obj_map, mor_map })
}

/// Outcome of the collapse-functor check.
#[derive(Clone, Debug)]
pub struct CollapseReport {
    /// `j` is a functor on the nose; informational, see `collapse_functor_j`.
    pub functorial: bool,
    /// Every restriction along `j` of an enumerated structure is a presheaf.
    pub restrictions_valid: bool,
    /// `j ∘ i` is the identity functor on the nose.
    pub j_after_i_identity: bool,
    /// Lax structures on the original tuples, and those among them fixed by `i*j*`.
    pub lax_original: usize,
    pub restored_exactly: usize,
    /// Lax structures on the completed tuples, and those isomorphic to `j*i*G`.
    pub lax_completed: usize,
    pub restored_up_to_iso: usize,
    /// A structure on the completed tuples not isomorphic to `j*i*G`.
    pub witness: Option<Presheaf>,
}

impl CollapseReport {
    pub fn holds(&self) -> bool {
        self.restrictions_valid
            && self.j_after_i_identity
            && self.restored_exactly == self.lax_original
            && self.restored_up_to_iso == self.lax_completed
    }
}

/// Pointed lax cartesian structures on `t` with a one-point value at `initial`.
fn pointed_lax_with_point(t: &TupleCategory, initial: Obj, max_card: usize) -> Result<Vec<Presheaf>, SheafError> {
    let bases: Vec<Presheaf> = enumerate_presheaves(&t.base.base, SheafCondition::None, EnumOptions::pointed(max_card))?
        .into_iter()
        .filter(|g| g.sizes[initial] == 1)
        .collect();
    let bases = crate::sheaves::dedup_isomorphic(&t.base.base, bases);
    Ok(lax_structures_over(t, &bases, DEFAULT_ENUM_CAP)?.iter().map(|s| product_extension(t, s)).collect())
}

/// Restriction along the inclusion of tuple categories, with `j` as inverse:
/// `i*j*` fixes every lax structure and `j*i*G ≅ G`.
pub fn check_5_2_2(x: &FinCategory, m: &MonoidalData, n: usize, max_card: usize) -> Result<CollapseReport, ComparisonError> {
    let z = zero_completion(x, Some(m))?;
    let m0 = z.monoidal.as_ref().expect("built with monoidal data");
    let t = build_tuple_category(m, n)?;
    let t0 = build_tuple_category(m0, n)?;
    let i = tuple_inclusion(&t, &t0);
    let j = collapse_functor_j(&z, &t0, &t)?;
    let functorial = check_functor(&t0.cat, &t.cat, &j)?.report.ok();
    let ji = i.then(&j);
    let j_after_i_identity = ji == FinFunctor::identity(&t.cat);
    let originals = pointed_lax_with_point(&t, z.initial, max_card)?;
    let mut restrictions_valid = true;
    let mut restored_exactly = 0;
    for f in &originals {
        let up = restrict(&t0.cat, &j, f);
        restrictions_valid &= validate_presheaf(&t0.cat, &up).ok();
        restored_exactly += usize::from(restrict(&t.cat, &i, &up) == *f);
    }
    let completed = pointed_lax_with_point(&t0, z.initial, max_card)?;
    let mut restored_up_to_iso = 0;
    let mut witness = None;
    for g in &completed {
        let back = restrict(&t0.cat, &j, &restrict(&t.cat, &i, g));
        restrictions_valid &= validate_presheaf(&t0.cat, &back).ok();
        if find_isomorphism(&t0.cat, &back, g).is_some() {
            restored_up_to_iso += 1;
        } else if witness.is_none() {
            witness = Some(g.clone());
        }
    }
    Ok(CollapseReport {
        functorial,
        restrictions_valid,
        j_after_i_identity,
        lax_original: originals.len(),
        restored_exactly,
        lax_completed: completed.len(),
        restored_up_to_iso,
        witness,
    })
}

#[derive(Clone, Debug)]
pub struct TrivialityReport {
    pub weak_structures: usize,
    /// Lax structures with some carrier larger than a point.
    pub nontrivial_lax: usize,
    /// A weak structure with a carrier larger than a point.
    pub witness: Option<Presheaf>,
}

impl TrivialityReport {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// Every pointed weak cartesian structure on the completed tuples with a
/// point at the initial object has only one-point carriers.
pub fn check_remark_5_2_3(z: &ZeroCompleted, n: usize, max_card: usize) -> Result<TrivialityReport, ComparisonError> {
    let m0 = z.monoidal.as_ref().ok_or(ComparisonError::Monoidal(MonoidalError::Invalid("monoidal data required".into())))?;
    let t0 = build_tuple_category(m0, n)?;
    let all = pointed_lax_with_point(&t0, z.initial, max_card)?;
    let trivial = |f: &Presheaf| f.sizes.iter().all(|&s| s == 1);
    let weak: Vec<&Presheaf> = all.iter().filter(|f| is_weak_cartesian(&t0, f)).collect();
    Ok(TrivialityReport {
        weak_structures: weak.len(),
        nontrivial_lax: all.iter().filter(|f| !trivial(f)).count(),
        witness: weak.into_iter().find(|f| !trivial(f)).cloned(),
    })
}
