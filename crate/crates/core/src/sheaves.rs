//! Presheaves of finite (pointed) sets, sheaf conditions, exhaustive
//! enumeration up to isomorphism, and natural transformations.

use std::collections::HashMap;
use std::hash::Hash;

use thiserror::Error;

use crate::cdstructures::CdStructure;
use crate::fincat::{classify_initial, FinCategory, FinFunctor, Mor, Obj, Report, Square};
use crate::topology::{Sieve, Topology};

mod cartesian;
pub use cartesian::*;

/// Default bound on presheaves visited during one enumeration.
pub const DEFAULT_ENUM_CAP: usize = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SheafError {
    #[error("enumeration cap of {cap} exceeded")]
    CapExceeded { cap: usize },
    #[error("category has no initial object")]
    NoInitial,
    #[error("presheaf is invalid: {0}")]
    Invalid(String),
    #[error("pointed sets are required here")]
    PointedRequired,
}

/// A presheaf of finite sets with carriers `{0..k}`. The action of
/// `f: X -> Y` maps `F(Y)` to `F(X)` and is stored as a lookup table.
/// In pointed mode every carrier is nonempty with basepoint `0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Presheaf {
    pub sizes: Vec<usize>,
    pub actions: Vec<Vec<usize>>,
    pub pointed: bool,
}

impl Presheaf {
    /// Builds a presheaf from explicit sections per object and an action on them.
    pub fn from_sections<T, A>(c: &FinCategory, sections: Vec<Vec<T>>, pointed: bool, mut act: A) -> Self
    where
        T: Clone + Eq + Hash,
        A: FnMut(Mor, &T) -> T,
    {
        let index: Vec<HashMap<T, usize>> = sections
            .iter()
            .map(|s| s.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect())
            .collect();
        let actions = c
            .morphisms()
            .map(|f| {
                sections[c.tgt(f)]
                    .iter()
                    .map(|s| *index[c.src(f)].get(&act(f, s)).expect("action lands in the source sections"))
                    .collect()
            })
            .collect();
        Presheaf { sizes: sections.iter().map(Vec::len).collect(), actions, pointed }
    }

    pub fn constant(c: &FinCategory, n: usize) -> Self {
        Presheaf {
            sizes: vec![n; c.num_objects()],
            actions: c.morphisms().map(|_| (0..n).collect()).collect(),
            pointed: false,
        }
    }

    /// `Hom(-, x)` with sections ordered as the hom-set lists.
    pub fn representable(c: &FinCategory, x: Obj) -> Self {
        let sections: Vec<Vec<Mor>> = c.objects().map(|y| c.hom(y, x).to_vec()).collect();
        Self::from_sections(c, sections, false, |f, &s| c.compose(s, f))
    }

    /// The subpresheaf of `Hom(-, target)` given by a sieve.
    pub fn of_sieve(c: &FinCategory, s: &Sieve) -> Self {
        let sections: Vec<Vec<Mor>> =
            c.objects().map(|y| c.hom(y, s.target).iter().copied().filter(|&f| s.contains(f)).collect()).collect();
        Self::from_sections(c, sections, false, |f, &g| c.compose(g, f))
    }

    pub fn act(&self, f: Mor, s: usize) -> usize {
        self.actions[f][s]
    }

    pub fn total_size(&self) -> usize {
        self.sizes.iter().sum()
    }
}

/// Functoriality, ranges, and basepoints in pointed mode.
pub fn validate_presheaf(c: &FinCategory, f: &Presheaf) -> Report {
    let mut r = Report::default();
    if f.sizes.len() != c.num_objects() || f.actions.len() != c.num_morphisms() {
        r.push("shape does not match the category".into());
        return r;
    }
    for m in c.morphisms() {
        let a = &f.actions[m];
        if a.len() != f.sizes[c.tgt(m)] || a.iter().any(|&v| v >= f.sizes[c.src(m)]) {
            r.push(format!("action of {} has the wrong type", c.morphism_name(m)));
        }
    }
    if !r.ok() {
        return r;
    }
    if f.pointed {
        for x in c.objects() {
            if f.sizes[x] == 0 {
                r.push(format!("pointed carrier at {} is empty", c.object_name(x)));
            }
        }
        for m in c.morphisms() {
            if f.sizes[c.tgt(m)] > 0 && f.actions[m][0] != 0 {
                r.push(format!("action of {} moves the basepoint", c.morphism_name(m)));
            }
        }
    }
    for x in c.objects() {
        let id = &f.actions[c.identity(x)];
        if id.iter().enumerate().any(|(i, &v)| i != v) {
            r.push(format!("identity of {} acts nontrivially", c.object_name(x)));
        }
    }
    for y in c.objects() {
        for &g in c.outgoing(y) {
            for &h in c.incoming(y) {
                let gh = c.compose(g, h);
                for s in 0..f.sizes[c.tgt(g)] {
                    if f.act(gh, s) != f.act(h, f.act(g, s)) {
                        r.push(format!("composition fails on pair ({}, {})", c.morphism_name(g), c.morphism_name(h)));
                        break;
                    }
                }
            }
        }
    }
    r
}

/// Componentwise maps `F(X) -> G(X)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PresheafMorphism {
    pub components: Vec<Vec<usize>>,
}

impl PresheafMorphism {
    pub fn identity(f: &Presheaf) -> Self {
        PresheafMorphism { components: f.sizes.iter().map(|&n| (0..n).collect()).collect() }
    }

    pub fn then(&self, other: &PresheafMorphism) -> PresheafMorphism {
        PresheafMorphism {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.iter().map(|&v| b[v]).collect())
                .collect(),
        }
    }
}

pub fn is_natural(c: &FinCategory, f: &Presheaf, g: &Presheaf, phi: &PresheafMorphism) -> bool {
    if phi.components.len() != c.num_objects() {
        return false;
    }
    for x in c.objects() {
        let comp = &phi.components[x];
        if comp.len() != f.sizes[x] || comp.iter().any(|&v| v >= g.sizes[x]) {
            return false;
        }
    }
    c.morphisms().all(|m| {
        let (x, y) = (c.src(m), c.tgt(m));
        (0..f.sizes[y]).all(|s| phi.components[x][f.act(m, s)] == g.act(m, phi.components[y][s]))
    })
}

/// Matching families on a sieve: one value per member, compatible with precomposition.
#[derive(Clone, Debug)]
pub struct MatchingFamilies {
    pub members: Vec<Mor>,
    pub families: Vec<Vec<usize>>,
}

pub fn matching_families(c: &FinCategory, f: &Presheaf, s: &Sieve) -> MatchingFamilies {
    let members: Vec<Mor> = s.iter().collect();
    let pos: HashMap<Mor, usize> = members.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut families = Vec::new();
    let mut cur: Vec<Option<usize>> = vec![None; members.len()];
    #[allow(clippy::too_many_arguments)]
    fn assign(
        c: &FinCategory,
        f: &Presheaf,
        members: &[Mor],
        pos: &HashMap<Mor, usize>,
        cur: &mut [Option<usize>],
        i: usize,
        v: usize,
        trail: &mut Vec<usize>,
    ) -> bool {
        // Setting member i to v forces every precomposite.
        let m = members[i];
        for &g in c.incoming(c.src(m)) {
            let j = pos[&c.compose(m, g)];
            let w = f.act(g, v);
            match cur[j] {
                Some(x) if x != w => return false,
                Some(_) => {}
                None => {
                    cur[j] = Some(w);
                    trail.push(j);
                }
            }
        }
        true
    }
    fn go(
        c: &FinCategory,
        f: &Presheaf,
        members: &[Mor],
        pos: &HashMap<Mor, usize>,
        cur: &mut Vec<Option<usize>>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let Some(i) = cur.iter().position(Option::is_none) else {
            // Forced values were propagated from each chosen member; recheck all constraints.
            let full: Vec<usize> = cur.iter().map(|v| v.expect("complete")).collect();
            let ok = members.iter().enumerate().all(|(k, &m)| {
                c.incoming(c.src(m)).iter().all(|&g| full[pos[&c.compose(m, g)]] == f.act(g, full[k]))
            });
            if ok {
                out.push(full);
            }
            return;
        };
        for v in 0..f.sizes[c.src(members[i])] {
            let mut trail = Vec::new();
            if assign(c, f, members, pos, cur, i, v, &mut trail) {
                go(c, f, members, pos, cur, out);
            }
            for j in trail {
                cur[j] = None;
            }
        }
    }
    go(c, f, &members, &pos, &mut cur, &mut families);
    MatchingFamilies { members, families }
}

/// The restriction map `F(X) -> Match(S)` is a bijection.
pub fn is_sheaf_for_sieve(c: &FinCategory, f: &Presheaf, s: &Sieve) -> bool {
    let m = matching_families(c, f, s);
    let mut images: Vec<Vec<usize>> =
        (0..f.sizes[s.target]).map(|v| m.members.iter().map(|&g| f.act(g, v)).collect()).collect();
    images.sort();
    let before = images.len();
    images.dedup();
    images.len() == before && before == m.families.len()
}

/// Sheaf condition for a topology; checking the least covering sieve of
/// each object is equivalent to checking every covering sieve.
pub fn is_sheaf_sieves(t: &Topology, c: &FinCategory, f: &Presheaf) -> bool {
    c.objects().all(|x| is_sheaf_for_sieve(c, f, t.least_cover(x)))
}

/// `F(LR) -> F(UR) ×_{F(UL)} F(LL)` is a bijection.
pub fn square_is_pullback_of_sets(c: &FinCategory, f: &Presheaf, sq: &Square) -> bool {
    let (ur, ll, lr) = (sq.ur(c), sq.ll(c), sq.lr(c));
    let mut pairs: Vec<(usize, usize)> = (0..f.sizes[lr]).map(|s| (f.act(sq.p, s), f.act(sq.e, s))).collect();
    pairs.sort_unstable();
    let n = pairs.len();
    pairs.dedup();
    if pairs.len() != n {
        return false;
    }
    let mut fiber = 0;
    for u in 0..f.sizes[ur] {
        for v in 0..f.sizes[ll] {
            if f.act(sq.top, u) == f.act(sq.left, v) {
                fiber += 1;
            }
        }
    }
    fiber == n
}

pub fn is_sheaf_squares(c: &FinCategory, p: &CdStructure, f: &Presheaf, require_empty: bool) -> Result<bool, SheafError> {
    if require_empty {
        let init = classify_initial(c).first().ok_or(SheafError::NoInitial)?;
        if f.sizes[init] != 1 {
            return Ok(false);
        }
    }
    Ok(p.squares().iter().all(|sq| square_is_pullback_of_sets(c, f, sq)))
}

/// `(f*F)(X) = F(fX)`.
pub fn restrict(src: &FinCategory, f: &FinFunctor, g: &Presheaf) -> Presheaf {
    Presheaf {
        sizes: src.objects().map(|x| g.sizes[f.obj(x)]).collect(),
        actions: src.morphisms().map(|m| g.actions[f.mor(m)].clone()).collect(),
        pointed: g.pointed,
    }
}

fn all_functions(domain: usize, codomain: usize, pointed: bool) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for i in 0..domain {
        out = out
            .into_iter()
            .flat_map(|v: Vec<usize>| {
                let choices: Vec<usize> = if pointed && i == 0 { vec![0] } else { (0..codomain).collect() };
                choices.into_iter().map(move |w| {
                    let mut u = v.clone();
                    u.push(w);
                    u
                })
            })
            .collect();
    }
    out
}

/// Every natural transformation `F -> G`, by backtracking over objects.
pub fn natural_transformations(c: &FinCategory, f: &Presheaf, g: &Presheaf, limit: usize) -> Vec<PresheafMorphism> {
    let pointed = f.pointed && g.pointed;
    let mut out = Vec::new();
    let mut comps: Vec<Option<Vec<usize>>> = vec![None; c.num_objects()];
    fn consistent(c: &FinCategory, f: &Presheaf, g: &Presheaf, comps: &[Option<Vec<usize>>], x: Obj) -> bool {
        let check = |m: Mor| {
            let (Some(cs), Some(ct)) = (&comps[c.src(m)], &comps[c.tgt(m)]) else { return true };
            (0..f.sizes[c.tgt(m)]).all(|s| cs[f.act(m, s)] == g.act(m, ct[s]))
        };
        c.incoming(x).iter().all(|&m| check(m)) && c.outgoing(x).iter().all(|&m| check(m))
    }
    #[allow(clippy::too_many_arguments)]
    fn go(
        c: &FinCategory,
        f: &Presheaf,
        g: &Presheaf,
        pointed: bool,
        comps: &mut Vec<Option<Vec<usize>>>,
        x: Obj,
        out: &mut Vec<PresheafMorphism>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if x == c.num_objects() {
            out.push(PresheafMorphism { components: comps.iter().map(|v| v.clone().expect("assigned")).collect() });
            return;
        }
        for cand in all_functions(f.sizes[x], g.sizes[x], pointed) {
            comps[x] = Some(cand);
            if consistent(c, f, g, comps, x) {
                go(c, f, g, pointed, comps, x + 1, out, limit);
            }
        }
        comps[x] = None;
    }
    go(c, f, g, pointed, &mut comps, 0, &mut out, limit);
    out
}

pub fn count_natural_transformations(c: &FinCategory, f: &Presheaf, g: &Presheaf) -> usize {
    natural_transformations(c, f, g, usize::MAX).len()
}

fn permutations(n: usize, fix_zero: bool) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                go(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    if fix_zero {
        out.retain(|p| p.first().is_none_or(|&z| z == 0));
    }
    out
}

/// A natural isomorphism `F -> G`, if any.
pub fn find_isomorphism(c: &FinCategory, f: &Presheaf, g: &Presheaf) -> Option<PresheafMorphism> {
    if f.sizes != g.sizes || f.pointed != g.pointed {
        return None;
    }
    let mut comps: Vec<Option<Vec<usize>>> = vec![None; c.num_objects()];
    fn go(c: &FinCategory, f: &Presheaf, g: &Presheaf, comps: &mut Vec<Option<Vec<usize>>>, x: Obj) -> bool {
        if x == c.num_objects() {
            return true;
        }
        for perm in permutations(f.sizes[x], f.pointed) {
            comps[x] = Some(perm);
            let ok = c.incoming(x).iter().chain(c.outgoing(x)).all(|&m| {
                let (Some(cs), Some(ct)) = (&comps[c.src(m)], &comps[c.tgt(m)]) else { return true };
                (0..f.sizes[c.tgt(m)]).all(|s| cs[f.act(m, s)] == g.act(m, ct[s]))
            });
            if ok && go(c, f, g, comps, x + 1) {
                return true;
            }
        }
        comps[x] = None;
        false
    }
    go(c, f, g, &mut comps, 0)
        .then(|| PresheafMorphism { components: comps.into_iter().map(|v| v.expect("assigned")).collect() })
}

/// Applies carrier relabelings `perms[x]: old -> new`.
pub fn relabel(c: &FinCategory, f: &Presheaf, perms: &[Vec<usize>]) -> Presheaf {
    let mut actions = vec![Vec::new(); c.num_morphisms()];
    for m in c.morphisms() {
        let (x, y) = (c.src(m), c.tgt(m));
        let mut a = vec![0; f.sizes[y]];
        for s in 0..f.sizes[y] {
            a[perms[y][s]] = perms[x][f.act(m, s)];
        }
        actions[m] = a;
    }
    Presheaf { sizes: f.sizes.clone(), actions, pointed: f.pointed }
}

/// Least relabeling in the derived ordering; isomorphic presheaves get equal forms.
/// Exhaustive over products of carrier permutations, so meant for small sites.
pub fn canonical_form(c: &FinCategory, f: &Presheaf) -> Presheaf {
    let choices: Vec<Vec<Vec<usize>>> = f.sizes.iter().map(|&n| permutations(n, f.pointed)).collect();
    let mut idx = vec![0usize; choices.len()];
    let mut best: Option<Presheaf> = None;
    loop {
        let perms: Vec<Vec<usize>> = idx.iter().zip(&choices).map(|(&i, ch)| ch[i].clone()).collect();
        let cand = relabel(c, f, &perms);
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return best.expect("at least one relabeling");
            }
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Isomorphism-invariant data used to bucket candidates before pairwise search.
fn invariant(c: &FinCategory, f: &Presheaf) -> Vec<usize> {
    let mut inv = f.sizes.clone();
    for m in c.morphisms() {
        let mut img = f.actions[m].clone();
        img.sort_unstable();
        img.dedup();
        inv.push(img.len());
    }
    inv
}

/// Keeps the first member of each isomorphism class, preserving order.
pub fn dedup_isomorphic(c: &FinCategory, items: Vec<Presheaf>) -> Vec<Presheaf> {
    let mut buckets: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    let mut out: Vec<Presheaf> = Vec::new();
    for f in items {
        let key = invariant(c, &f);
        let bucket = buckets.entry(key).or_default();
        if bucket.iter().any(|&i| find_isomorphism(c, &out[i], &f).is_some()) {
            continue;
        }
        bucket.push(out.len());
        out.push(f);
    }
    out
}

/// Which sheaf condition an enumeration filters by.
#[derive(Clone, Copy, Debug)]
pub enum SheafCondition<'a> {
    /// Every presheaf.
    None,
    Sieves(&'a Topology),
    Squares { p: &'a CdStructure, require_empty: bool },
}

#[derive(Clone, Copy, Debug)]
pub struct EnumOptions {
    pub max_card: usize,
    pub min_card: usize,
    pub pointed: bool,
    pub cap: usize,
}

impl EnumOptions {
    pub fn new(max_card: usize) -> Self {
        EnumOptions { max_card, min_card: 0, pointed: false, cap: DEFAULT_ENUM_CAP }
    }

    pub fn pointed(max_card: usize) -> Self {
        EnumOptions { max_card, min_card: 1, pointed: true, cap: DEFAULT_ENUM_CAP }
    }
}

/// Every presheaf (not deduplicated) with carrier sizes in range that meets
/// the condition, visited in a fixed deterministic order.
pub fn enumerate_presheaves(
    c: &FinCategory,
    cond: SheafCondition<'_>,
    opts: EnumOptions,
) -> Result<Vec<Presheaf>, SheafError> {
    let mut out = Vec::new();
    let mut visited = 0usize;
    let nobj = c.num_objects();
    let lo = if opts.pointed { opts.min_card.max(1) } else { opts.min_card };
    if lo > opts.max_card {
        return Ok(out);
    }
    let (order, triples_at, squares_at, static_squares, empty_obj) = prepare(c, cond)?;
    let plan = Plan { c, cond, order: &order, triples_at: &triples_at, squares_at: &squares_at, static_squares: &static_squares };
    let mut sizes = vec![lo; nobj];
    loop {
        if empty_obj.is_none_or(|e| sizes[e] == 1) {
            plan.run(&sizes, opts.pointed, opts.cap, &mut visited, &mut out)?;
        }
        let mut k = nobj;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if sizes[k] < opts.max_card {
                sizes[k] += 1;
                for s in sizes.iter_mut().skip(k + 1) {
                    *s = lo;
                }
                break;
            }
        }
    }
}

/// Every presheaf with exactly the given carrier sizes that meets the condition.
pub fn enumerate_presheaves_with_sizes(
    c: &FinCategory,
    cond: SheafCondition<'_>,
    sizes: &[usize],
    pointed: bool,
    cap: usize,
) -> Result<Vec<Presheaf>, SheafError> {
    assert_eq!(sizes.len(), c.num_objects(), "one size per object");
    if pointed && sizes.contains(&0) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut visited = 0;
    let (order, triples_at, squares_at, static_squares, empty_obj) = prepare(c, cond)?;
    if empty_obj.is_some_and(|e| sizes[e] != 1) {
        return Ok(out);
    }
    let plan = Plan { c, cond, order: &order, triples_at: &triples_at, squares_at: &squares_at, static_squares: &static_squares };
    plan.run(sizes, pointed, cap, &mut visited, &mut out)?;
    Ok(out)
}

fn prepare(c: &FinCategory, cond: SheafCondition<'_>) -> Result<Prepared, SheafError> {
    let squares: Vec<Square> = match cond {
        SheafCondition::Squares { p, .. } => p.squares().to_vec(),
        _ => Vec::new(),
    };
    let empty_obj = match cond {
        SheafCondition::Squares { require_empty: true, .. } => Some(classify_initial(c).first().ok_or(SheafError::NoInitial)?),
        _ => None,
    };
    // Non-identity morphisms in order; each composable triple is checked once all three are set.
    let order: Vec<Mor> = c.morphisms().filter(|&m| !c.is_identity(m)).collect();
    let mut rank = vec![usize::MAX; c.num_morphisms()];
    for (i, &m) in order.iter().enumerate() {
        rank[m] = i;
    }
    let mut triples_at: Vec<Vec<(Mor, Mor, Mor)>> = vec![Vec::new(); order.len()];
    for y in c.objects() {
        for &g in c.outgoing(y) {
            for &f in c.incoming(y) {
                let h = c.compose(g, f);
                let last = [g, f, h].iter().map(|&m| if c.is_identity(m) { 0 } else { rank[m] }).max().unwrap_or(0);
                if [g, f, h].iter().all(|&m| c.is_identity(m)) {
                    continue;
                }
                triples_at[last].push((g, f, h));
            }
        }
    }
    let mut squares_at: Vec<Vec<Square>> = vec![Vec::new(); order.len()];
    let mut static_squares = Vec::new();
    for sq in &squares {
        let arrows = [sq.top, sq.left, sq.p, sq.e];
        if arrows.iter().all(|&m| c.is_identity(m)) {
            static_squares.push(*sq);
            continue;
        }
        let last = arrows.iter().filter(|&&m| !c.is_identity(m)).map(|&m| rank[m]).max().expect("non-identity arrow");
        squares_at[last].push(*sq);
    }
    Ok((order, triples_at, squares_at, static_squares, empty_obj))
}

type Prepared = (Vec<Mor>, Vec<Vec<(Mor, Mor, Mor)>>, Vec<Vec<Square>>, Vec<Square>, Option<Obj>);

struct Plan<'a> {
    c: &'a FinCategory,
    cond: SheafCondition<'a>,
    order: &'a [Mor],
    triples_at: &'a [Vec<(Mor, Mor, Mor)>],
    squares_at: &'a [Vec<Square>],
    static_squares: &'a [Square],
}

impl Plan<'_> {
    fn run(
        &self,
        sizes: &[usize],
        pointed: bool,
        cap: usize,
        visited: &mut usize,
        out: &mut Vec<Presheaf>,
    ) -> Result<(), SheafError> {
        let c = self.c;
        let mut f = Presheaf {
            sizes: sizes.to_vec(),
            actions: c.morphisms().map(|m| if c.is_identity(m) { (0..sizes[c.tgt(m)]).collect() } else { Vec::new() }).collect(),
            pointed,
        };
        if !self.static_squares.iter().all(|sq| square_is_pullback_of_sets(c, &f, sq)) {
            return Ok(());
        }
        let ctx = Ctx { c, order: self.order, triples_at: self.triples_at, squares_at: self.squares_at, pointed };
        let cond = self.cond;
        ctx.fill(&mut f, 0, &mut |g: &Presheaf| {
            *visited += 1;
            if *visited > cap {
                return Err(SheafError::CapExceeded { cap });
            }
            let keep = match cond {
                SheafCondition::Sieves(t) => is_sheaf_sieves(t, c, g),
                _ => true,
            };
            if keep {
                out.push(g.clone());
            }
            Ok(())
        })
    }
}

struct Ctx<'a> {
    c: &'a FinCategory,
    order: &'a [Mor],
    triples_at: &'a [Vec<(Mor, Mor, Mor)>],
    squares_at: &'a [Vec<Square>],
    pointed: bool,
}

impl Ctx<'_> {
    fn fill(
        &self,
        f: &mut Presheaf,
        i: usize,
        emit: &mut dyn FnMut(&Presheaf) -> Result<(), SheafError>,
    ) -> Result<(), SheafError> {
        if i == self.order.len() {
            return emit(f);
        }
        let c = self.c;
        let m = self.order[i];
        let (x, y) = (c.src(m), c.tgt(m));
        // A decomposition through earlier morphisms forces the action.
        let forced = self.triples_at[i].iter().find(|&&(g, h, comp)| comp == m && g != m && h != m).map(|&(g, h, _)| {
            (0..f.sizes[y]).map(|s| f.act(h, f.act(g, s))).collect::<Vec<usize>>()
        });
        let candidates = match forced {
            Some(a) => vec![a],
            None => all_functions(f.sizes[y], f.sizes[x], self.pointed),
        };
        for cand in candidates {
            f.actions[m] = cand;
            let triples_ok = self.triples_at[i].iter().all(|&(g, h, comp)| {
                (0..f.sizes[c.tgt(g)]).all(|s| f.act(comp, s) == f.act(h, f.act(g, s)))
            });
            if triples_ok && self.squares_at[i].iter().all(|sq| square_is_pullback_of_sets(c, f, sq)) {
                self.fill(f, i + 1, emit)?;
            }
        }
        f.actions[m] = Vec::new();
        Ok(())
    }
}

/// Sheaves with carriers of size at most `opts.max_card`, one per isomorphism class.
pub fn enumerate_sheaves(c: &FinCategory, cond: SheafCondition<'_>, opts: EnumOptions) -> Result<Vec<Presheaf>, SheafError> {
    Ok(dedup_isomorphic(c, enumerate_presheaves(c, cond, opts)?))
}

/// Whether `f` meets the condition an enumeration would filter by.
pub fn satisfies(c: &FinCategory, cond: SheafCondition<'_>, f: &Presheaf) -> Result<bool, SheafError> {
    match cond {
        SheafCondition::None => Ok(true),
        SheafCondition::Sieves(t) => Ok(is_sheaf_sieves(t, c, f)),
        SheafCondition::Squares { p, require_empty } => is_sheaf_squares(c, p, f, require_empty),
    }
}

/// `f*φ` for `φ: F -> G` on the target category.
pub fn restrict_morphism(src: &FinCategory, f: &FinFunctor, phi: &PresheafMorphism) -> PresheafMorphism {
    PresheafMorphism { components: src.objects().map(|x| phi.components[f.obj(x)].clone()).collect() }
}

/// The right adjoint of restriction: `(f_* G)(Y) = Nat(f* y_Y, G)`.
/// In pointed mode the constant-basepoint transformation is placed first.
pub fn right_kan_extension(src: &FinCategory, tgt: &FinCategory, f: &FinFunctor, g: &Presheaf) -> Presheaf {
    let reps: Vec<Presheaf> = tgt.objects().map(|y| restrict(src, f, &Presheaf::representable(tgt, y))).collect();
    let sections: Vec<Vec<Vec<Vec<usize>>>> = tgt
        .objects()
        .map(|y| {
            let mut plain = g.clone();
            plain.pointed = false;
            let mut nats: Vec<Vec<Vec<usize>>> =
                natural_transformations(src, &reps[y], &plain, usize::MAX).into_iter().map(|n| n.components).collect();
            if g.pointed {
                let base = nats.iter().position(|n| n.iter().all(|v| v.iter().all(|&s| s == 0)));
                nats.swap(0, base.expect("the basepoint transformation exists"));
            }
            nats
        })
        .collect();
    // A section over Y is a family indexed by `Hom(f x, Y)`; restricting along
    // `h: Y' -> Y` reads the entry at `h ∘ u` for each `u: f x -> Y'`.
    Presheaf::from_sections(tgt, sections, g.pointed, |h, nat| {
        let y2 = tgt.src(h);
        src.objects()
            .map(|x| {
                let fx = f.obj(x);
                let into_y2 = tgt.hom(fx, y2);
                let into_y = tgt.hom(fx, tgt.tgt(h));
                into_y2
                    .iter()
                    .map(|&u| {
                        let pos = into_y.iter().position(|&w| w == tgt.compose(h, u)).expect("composite in hom-set");
                        nat[x][pos]
                    })
                    .collect()
            })
            .collect()
    })
}

/// Outcome of the brute-force equivalence certification for restriction
/// along `f` between two sites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub fully_faithful: bool,
    /// Every enumerated source sheaf is isomorphic to the restriction of a
    /// target sheaf, namely its right Kan extension.
    pub essentially_surjective_within_bound: bool,
    /// Carrier bound of the enumerated sheaves on both sides.
    pub bound: usize,
    /// Every enumerated source sheaf has a preimage among the enumerated target
    /// sheaves, that is, without exceeding the bound on the target side.
    pub preimages_within_bound: bool,
    pub target_sheaves: usize,
    pub source_sheaves: usize,
    /// Target sheaves `F, G` on which `Nat(F, G) -> Nat(f*F, f*G)` is not a bijection.
    pub faithfulness_witness: Option<(Presheaf, Presheaf)>,
    /// A source sheaf with no preimage.
    pub surjectivity_witness: Option<Presheaf>,
}

pub fn equivalence_report(
    src: &FinCategory,
    tgt: &FinCategory,
    f: &FinFunctor,
    src_cond: SheafCondition<'_>,
    tgt_cond: SheafCondition<'_>,
    opts: EnumOptions,
) -> Result<EquivalenceReport, SheafError> {
    let targets = enumerate_sheaves(tgt, tgt_cond, opts)?;
    let sources = enumerate_sheaves(src, src_cond, opts)?;
    let mut faithfulness_witness = None;
    'pairs: for a in &targets {
        for b in &targets {
            let nats = natural_transformations(tgt, a, b, usize::MAX);
            let restricted: std::collections::HashSet<PresheafMorphism> =
                nats.iter().map(|phi| restrict_morphism(src, f, phi)).collect();
            let (ra, rb) = (restrict(src, f, a), restrict(src, f, b));
            if restricted.len() != nats.len() || restricted.len() != count_natural_transformations(src, &ra, &rb) {
                faithfulness_witness = Some((a.clone(), b.clone()));
                break 'pairs;
            }
        }
    }
    let restricted_targets: Vec<Presheaf> = targets.iter().map(|a| restrict(src, f, a)).collect();
    let mut surjectivity_witness = None;
    let mut preimages_within_bound = true;
    for g in &sources {
        if !restricted_targets.iter().any(|r| find_isomorphism(src, r, g).is_some()) {
            preimages_within_bound = false;
        }
        let ran = right_kan_extension(src, tgt, f, g);
        let ok = satisfies(tgt, tgt_cond, &ran)? && find_isomorphism(src, &restrict(src, f, &ran), g).is_some();
        if !ok && surjectivity_witness.is_none() {
            surjectivity_witness = Some(g.clone());
        }
    }
    Ok(EquivalenceReport {
        fully_faithful: faithfulness_witness.is_none(),
        essentially_surjective_within_bound: surjectivity_witness.is_none(),
        bound: opts.max_card,
        preimages_within_bound,
        target_sheaves: targets.len(),
        source_sheaves: sources.len(),
        faithfulness_witness,
        surjectivity_witness,
    })
}
