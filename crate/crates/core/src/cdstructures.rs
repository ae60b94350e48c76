//! Cd-structures, simple covers, tensor stability, tuple cd-structures and
//! dimension functions.

use std::collections::{BTreeSet, HashMap, HashSet};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::fincat::{classify_initial, CategoryError, FinCategory, Mor, Obj, Square};
use crate::monoidal::{MonoidalData, TupleCategory};
use crate::topology::Sieve;

/// Default bound on derivation height for explicit simple-cover generation.
pub const DEFAULT_DEPTH: usize = 3;
/// Default bound on the number of families or search states held at once.
pub const DEFAULT_SEARCH_CAP: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CdError {
    #[error("search cap of {cap} {what} exceeded")]
    CapExceeded { what: &'static str, cap: usize },
    #[error("family is not a simple cover: {0}")]
    NotSimple(String),
    #[error("coordinate {index} out of range for arity {arity}")]
    CoordinateOutOfRange { index: usize, arity: usize },
    #[error("category has no initial object")]
    NoInitial,
    #[error("dimension function has {got} values for {expected} objects")]
    DimensionLength { got: usize, expected: usize },
    #[error(transparent)]
    Category(#[from] CategoryError),
}

/// A family of morphisms into `target`, kept sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoverFamily {
    pub target: Obj,
    pub legs: Vec<Mor>,
}

impl CoverFamily {
    pub fn new(target: Obj, mut legs: Vec<Mor>) -> Self {
        legs.sort_unstable();
        legs.dedup();
        CoverFamily { target, legs }
    }

    pub fn from_names(c: &FinCategory, target: &str, legs: &[&str]) -> Result<Self, CategoryError> {
        let target = c.object_id(target)?;
        let legs = legs.iter().map(|l| c.morphism_id(l)).collect::<Result<_, _>>()?;
        Ok(Self::new(target, legs))
    }

    pub fn names(&self, c: &FinCategory) -> Vec<String> {
        self.legs.iter().map(|&f| c.morphism_name(f).to_string()).collect()
    }

    pub fn sieve(&self, c: &FinCategory) -> Sieve {
        Sieve::generate(c, self.target, &self.legs).expect("legs end at target")
    }
}

/// A set of commuting squares, kept sorted and duplicate-free.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CdStructure {
    squares: Vec<Square>,
}

impl CdStructure {
    pub fn new(c: &FinCategory, squares: impl IntoIterator<Item = Square>) -> Result<Self, CategoryError> {
        let mut squares: Vec<Square> = squares.into_iter().collect();
        for sq in &squares {
            sq.check(c)?;
        }
        squares.sort_unstable();
        squares.dedup();
        Ok(CdStructure { squares })
    }

    /// Squares named `[top, left, p, e]`.
    pub fn from_names(c: &FinCategory, squares: &[[&str; 4]]) -> Result<Self, CategoryError> {
        let sqs = squares
            .iter()
            .map(|[t, l, p, e]| {
                Ok(Square { top: c.morphism_id(t)?, left: c.morphism_id(l)?, p: c.morphism_id(p)?, e: c.morphism_id(e)? })
            })
            .collect::<Result<Vec<_>, CategoryError>>()?;
        Self::new(c, sqs)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn squares(&self) -> &[Square] {
        &self.squares
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    pub fn contains(&self, sq: &Square) -> bool {
        self.squares.binary_search(sq).is_ok()
    }

    pub fn non_degenerate<'a>(&'a self, c: &'a FinCategory) -> impl Iterator<Item = &'a Square> + 'a {
        self.squares.iter().filter(move |s| !s.is_degenerate(c))
    }

    /// Squares grouped by lower-right corner.
    pub fn by_target(&self, c: &FinCategory) -> Vec<Vec<Square>> {
        let mut out = vec![Vec::new(); c.num_objects()];
        for sq in &self.squares {
            out[sq.lr(c)].push(*sq);
        }
        out
    }

    pub fn union(&self, other: &CdStructure) -> CdStructure {
        let mut squares: Vec<Square> = self.squares.iter().chain(&other.squares).copied().collect();
        squares.sort_unstable();
        squares.dedup();
        CdStructure { squares }
    }

    pub fn is_subset(&self, other: &CdStructure) -> bool {
        self.squares.iter().all(|s| other.contains(s))
    }

    pub fn describe(&self, c: &FinCategory) -> Vec<String> {
        self.squares.iter().map(|s| s.describe(c)).collect()
    }

    fn from_sorted(mut squares: Vec<Square>) -> Self {
        squares.sort_unstable();
        squares.dedup();
        CdStructure { squares }
    }
}

/// Adds the degenerate square on every object.
pub fn normalize_cd(c: &FinCategory, p: &CdStructure) -> CdStructure {
    CdStructure::from_sorted(p.squares.iter().copied().chain(c.objects().map(|x| Square::degenerate(c, x))).collect())
}

fn iso_set(c: &FinCategory) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(c.num_morphisms());
    for f in c.morphisms() {
        if c.is_iso(f) {
            s.insert(f);
        }
    }
    s
}

fn union_legs(c: &FinCategory, sq: &Square, u: &[Mor], v: &[Mor]) -> Vec<Mor> {
    let mut legs: Vec<Mor> = u.iter().map(|&f| c.compose(sq.p, f)).chain(v.iter().map(|&g| c.compose(sq.e, g))).collect();
    legs.sort_unstable();
    legs.dedup();
    legs
}

/// Simple covers of `x` with derivation height at most `depth`, built
/// bottom-up: isomorphisms first, then one square on top of two covers.
pub fn generate_simple_covers(
    c: &FinCategory,
    p: &CdStructure,
    x: Obj,
    depth: usize,
) -> Result<BTreeSet<CoverFamily>, CdError> {
    let by_lr = p.by_target(c);
    let isos = iso_set(c);
    let mut memo: HashMap<(Obj, usize), BTreeSet<Vec<Mor>>> = HashMap::new();
    let fams = gen_forward(c, &by_lr, &isos, x, depth, &mut memo)?;
    Ok(fams.into_iter().map(|legs| CoverFamily { target: x, legs }).collect())
}

fn gen_forward(
    c: &FinCategory,
    by_lr: &[Vec<Square>],
    isos: &FixedBitSet,
    y: Obj,
    depth: usize,
    memo: &mut HashMap<(Obj, usize), BTreeSet<Vec<Mor>>>,
) -> Result<BTreeSet<Vec<Mor>>, CdError> {
    if let Some(v) = memo.get(&(y, depth)) {
        return Ok(v.clone());
    }
    let mut out: BTreeSet<Vec<Mor>> = c.incoming(y).iter().filter(|&&f| isos.contains(f)).map(|&f| vec![f]).collect();
    if depth > 0 {
        out.extend(gen_forward(c, by_lr, isos, y, depth - 1, memo)?);
        for sq in &by_lr[y] {
            let us = gen_forward(c, by_lr, isos, sq.ur(c), depth - 1, memo)?;
            let vs = gen_forward(c, by_lr, isos, sq.ll(c), depth - 1, memo)?;
            for u in &us {
                for v in &vs {
                    out.insert(union_legs(c, sq, u, v));
                    if out.len() > DEFAULT_SEARCH_CAP {
                        return Err(CdError::CapExceeded { what: "families", cap: DEFAULT_SEARCH_CAP });
                    }
                }
            }
        }
    }
    memo.insert((y, depth), out.clone());
    Ok(out)
}

/// Simple covers of `x` built top-down: start from an isomorphism and
/// repeatedly replace one leg `U -> x` by its two composites through a
/// square with lower-right corner `U`. A leg introduced by `k` replacements
/// has level `k`, and levels are bounded by `depth`.
pub fn generate_simple_covers_alt(
    c: &FinCategory,
    p: &CdStructure,
    x: Obj,
    depth: usize,
) -> Result<BTreeSet<CoverFamily>, CdError> {
    let by_lr = p.by_target(c);
    let isos = iso_set(c);
    let mut seen: HashSet<Vec<(Mor, usize)>> = HashSet::new();
    let mut stack: Vec<Vec<(Mor, usize)>> = Vec::new();
    for &f in c.incoming(x) {
        if isos.contains(f) {
            let s = vec![(f, 0)];
            seen.insert(s.clone());
            stack.push(s);
        }
    }
    while let Some(state) = stack.pop() {
        for (i, &(leg, level)) in state.iter().enumerate() {
            if level >= depth {
                continue;
            }
            for sq in &by_lr[c.src(leg)] {
                let mut next = state.clone();
                next.remove(i);
                next.push((c.compose(leg, sq.p), level + 1));
                next.push((c.compose(leg, sq.e), level + 1));
                next.sort_unstable();
                if seen.insert(next.clone()) {
                    if seen.len() > DEFAULT_SEARCH_CAP {
                        return Err(CdError::CapExceeded { what: "frontiers", cap: DEFAULT_SEARCH_CAP });
                    }
                    stack.push(next);
                }
            }
        }
    }
    Ok(seen
        .into_iter()
        .map(|s| CoverFamily::new(x, s.into_iter().map(|(f, _)| f).collect()))
        .collect())
}

/// Outcome of a capped existential search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Search<W> {
    Found(W),
    NotFound,
    Inconclusive(String),
}

impl<W> Search<W> {
    pub fn found(&self) -> bool {
        matches!(self, Search::Found(_))
    }
}

#[derive(Clone, Copy, Debug)]
enum Justification {
    Iso(Mor),
    Square(usize),
}

/// Reachable states `(object, allowed legs)` of a containment search, with
/// for each state the squares into its object and the two child states.
struct StateGraph {
    states: Vec<(Obj, FixedBitSet)>,
    children: Vec<Vec<(Square, usize, usize)>>,
}

fn pull_allowed(c: &FinCategory, allowed: &FixedBitSet, f: Mor) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(c.num_morphisms());
    for &u in c.incoming(c.src(f)) {
        if allowed.contains(c.compose(f, u)) {
            out.insert(u);
        }
    }
    out
}

fn explore(
    c: &FinCategory,
    by_lr: &[Vec<Square>],
    x: Obj,
    allowed: FixedBitSet,
    cap: usize,
) -> Result<StateGraph, String> {
    let mut index: HashMap<(Obj, FixedBitSet), usize> = HashMap::new();
    let mut g = StateGraph { states: vec![(x, allowed.clone())], children: vec![Vec::new()] };
    index.insert((x, allowed), 0);
    let mut next = 0;
    while next < g.states.len() {
        let (y, a) = g.states[next].clone();
        let mut kids = Vec::new();
        for sq in &by_lr[y] {
            let mut ids = [0usize; 2];
            for (slot, arrow) in [sq.p, sq.e].into_iter().enumerate() {
                let key = (c.src(arrow), pull_allowed(c, &a, arrow));
                ids[slot] = match index.get(&key) {
                    Some(&i) => i,
                    None => {
                        let i = g.states.len();
                        if i >= cap {
                            return Err(format!("more than {cap} search states"));
                        }
                        index.insert(key.clone(), i);
                        g.states.push(key);
                        g.children.push(Vec::new());
                        i
                    }
                };
            }
            kids.push((*sq, ids[0], ids[1]));
        }
        g.children[next] = kids;
        next += 1;
    }
    Ok(g)
}

/// Decides whether `allowed` (a set of morphisms into `x`) contains a simple
/// cover of `x`, as a least fixpoint over reachable states. Exact up to the
/// state cap; returns a witness cover when one exists.
pub fn contains_simple_cover(
    c: &FinCategory,
    p: &CdStructure,
    x: Obj,
    allowed: &FixedBitSet,
    cap: usize,
) -> Search<CoverFamily> {
    let by_lr = p.by_target(c);
    let isos = iso_set(c);
    contains_simple_cover_with(c, &by_lr, &isos, x, allowed, cap)
}

pub(crate) fn contains_simple_cover_with(
    c: &FinCategory,
    by_lr: &[Vec<Square>],
    isos: &FixedBitSet,
    x: Obj,
    allowed: &FixedBitSet,
    cap: usize,
) -> Search<CoverFamily> {
    let g = match explore(c, by_lr, x, allowed.clone(), cap) {
        Ok(g) => g,
        Err(msg) => return Search::Inconclusive(msg),
    };
    let n = g.states.len();
    let mut just: Vec<Option<Justification>> = vec![None; n];
    let mut changed = true;
    while changed {
        changed = false;
        for s in 0..n {
            if just[s].is_some() {
                continue;
            }
            let (y, a) = &g.states[s];
            if let Some(&f) = c.incoming(*y).iter().find(|&&f| isos.contains(f) && a.contains(f)) {
                just[s] = Some(Justification::Iso(f));
                changed = true;
                continue;
            }
            if let Some(k) = g.children[s].iter().position(|&(_, i, j)| just[i].is_some() && just[j].is_some()) {
                just[s] = Some(Justification::Square(k));
                changed = true;
            }
        }
    }
    if just[0].is_none() {
        return Search::NotFound;
    }
    // Justifications only point to states justified strictly earlier, so this terminates.
    fn legs(c: &FinCategory, g: &StateGraph, just: &[Option<Justification>], s: usize) -> Vec<Mor> {
        match just[s].expect("justified") {
            Justification::Iso(f) => vec![f],
            Justification::Square(k) => {
                let (sq, i, j) = g.children[s][k];
                union_legs(c, &sq, &legs(c, g, just, i), &legs(c, g, just, j))
            }
        }
    }
    Search::Found(CoverFamily { target: x, legs: legs(c, &g, &just, 0) })
}

/// Every simple cover of `x` all of whose legs lie in `allowed`, with no depth bound.
pub fn simple_covers_within(
    c: &FinCategory,
    p: &CdStructure,
    x: Obj,
    allowed: &FixedBitSet,
    cap: usize,
) -> Result<BTreeSet<CoverFamily>, CdError> {
    let by_lr = p.by_target(c);
    let isos = iso_set(c);
    let g = explore(c, &by_lr, x, allowed.clone(), cap).map_err(|_| CdError::CapExceeded { what: "search states", cap })?;
    let n = g.states.len();
    let mut vals: Vec<BTreeSet<Vec<Mor>>> = g
        .states
        .iter()
        .map(|(y, a)| c.incoming(*y).iter().filter(|&&f| isos.contains(f) && a.contains(f)).map(|&f| vec![f]).collect())
        .collect();
    let mut total: usize = vals.iter().map(BTreeSet::len).sum();
    let mut changed = true;
    while changed {
        changed = false;
        for s in 0..n {
            let mut fresh = Vec::new();
            for &(sq, i, j) in &g.children[s] {
                for u in &vals[i] {
                    for v in &vals[j] {
                        let fam = union_legs(c, &sq, u, v);
                        if !vals[s].contains(&fam) {
                            fresh.push(fam);
                        }
                    }
                }
            }
            for fam in fresh {
                if vals[s].insert(fam) {
                    changed = true;
                    total += 1;
                    if total > cap {
                        return Err(CdError::CapExceeded { what: "families", cap });
                    }
                }
            }
        }
    }
    Ok(vals.swap_remove(0).into_iter().map(|legs| CoverFamily { target: x, legs }).collect())
}

/// Exact membership in the class of simple covers.
pub fn is_simple_cover(c: &FinCategory, p: &CdStructure, family: &CoverFamily) -> Result<bool, CdError> {
    if family.legs.iter().any(|&f| c.tgt(f) != family.target) {
        return Ok(false);
    }
    let mut allowed = FixedBitSet::with_capacity(c.num_morphisms());
    for &f in &family.legs {
        allowed.insert(f);
    }
    Ok(simple_covers_within(c, p, family.target, &allowed, DEFAULT_SEARCH_CAP)?.contains(family))
}

/// The square with every arrow tensored by `id_z`.
pub fn tensor_square(m: &MonoidalData, sq: &Square, z: Obj) -> Square {
    let iz = m.base.identity(z);
    Square {
        top: m.tensor_mor(sq.top, iz),
        left: m.tensor_mor(sq.left, iz),
        p: m.tensor_mor(sq.p, iz),
        e: m.tensor_mor(sq.e, iz),
    }
}

/// Every `(square, Z)` whose tensored square is missing from `p`; empty iff stable.
pub fn tensor_counterexamples(p: &CdStructure, m: &MonoidalData) -> Vec<(Square, Obj)> {
    let c = &m.base;
    let mut out = Vec::new();
    for sq in p.squares() {
        for z in c.objects() {
            let t = tensor_square(m, sq, z);
            if !p.contains(&t) && !t.is_degenerate(c) {
                out.push((*sq, z));
            }
        }
    }
    out
}

pub fn is_tensor_stable(p: &CdStructure, m: &MonoidalData) -> bool {
    tensor_counterexamples(p, m).is_empty()
}

/// Smallest tensor-stable normalized cd-structure containing `p`.
pub fn tensor_saturate(p: &CdStructure, m: &MonoidalData) -> CdStructure {
    let c = &m.base;
    let mut cur = normalize_cd(c, p);
    loop {
        let extra: Vec<Square> = tensor_counterexamples(&cur, m).into_iter().map(|(sq, z)| tensor_square(m, &sq, z)).collect();
        if extra.is_empty() {
            return cur;
        }
        cur = CdStructure::from_sorted(cur.squares.iter().copied().chain(extra).collect());
    }
}

/// Squares of the tuple site whose coordinates are squares of `p` over the
/// identity partial map, with at most one non-degenerate coordinate.
pub fn monoidal_cd(p: &CdStructure, t: &TupleCategory) -> CdStructure {
    let c = &t.base.base;
    let nd: Vec<Square> = p.non_degenerate(c).copied().collect();
    let mut out = Vec::new();
    for (x, tuple) in t.tuples().iter().enumerate() {
        out.push(Square::degenerate(&t.cat, x));
        for i0 in 0..tuple.len() {
            for sq in &nd {
                // `tuple` supplies the other coordinates; its entry at i0 is
                // ignored unless it equals the lower-right corner, so each
                // placement is produced exactly once.
                if tuple[i0] != sq.lr(c) {
                    continue;
                }
                let corner = |o: Obj| {
                    let mut u = tuple.clone();
                    u[i0] = o;
                    t.tuple_id(&u).expect("same arity")
                };
                let arrow = |f: Mor| {
                    let comps: Vec<Mor> =
                        tuple.iter().enumerate().map(|(i, &o)| if i == i0 { f } else { c.identity(o) }).collect();
                    t.coordinatewise(corner(c.src(f)), corner(c.tgt(f)), &comps).expect("coordinatewise arrow exists")
                };
                out.push(Square { top: arrow(sq.top), left: arrow(sq.left), p: arrow(sq.p), e: arrow(sq.e) });
            }
        }
    }
    CdStructure::from_sorted(out)
}

/// Legs `(X_1, .., U^k, .., X_n) -> (X_i)` for a cover `U` of coordinate `i0`.
pub fn coordinate_cover(
    t: &TupleCategory,
    p: &CdStructure,
    x: Obj,
    i0: usize,
    u: &CoverFamily,
) -> Result<CoverFamily, CdError> {
    let tuple = t.tuple(x).to_vec();
    if i0 >= tuple.len() {
        return Err(CdError::CoordinateOutOfRange { index: i0, arity: tuple.len() });
    }
    let c = &t.base.base;
    if u.target != tuple[i0] || !is_simple_cover(c, p, u)? {
        return Err(CdError::NotSimple(u.names(c).join(", ")));
    }
    Ok(CoverFamily::new(x, coordinate_legs(t, &tuple, i0, &u.legs)))
}

fn coordinate_legs(t: &TupleCategory, tuple: &[Obj], i0: usize, legs: &[Mor]) -> Vec<Mor> {
    let c = &t.base.base;
    let target = t.tuple_id(tuple).expect("tuple in range");
    legs.iter()
        .map(|&f| {
            let mut src = tuple.to_vec();
            src[i0] = c.src(f);
            let comps: Vec<Mor> = tuple.iter().enumerate().map(|(i, &o)| if i == i0 { f } else { c.identity(o) }).collect();
            t.coordinatewise(t.tuple_id(&src).expect("same arity"), target, &comps).expect("coordinatewise leg")
        })
        .collect()
}

/// All tuples of legs, one from each coordinate cover, assembled by refining
/// one coordinate at a time: after step `i` every leg has been composed with
/// a coordinate cover of its `i`-th entry.
pub fn product_cover(
    t: &TupleCategory,
    p: &CdStructure,
    x: Obj,
    covers: &[CoverFamily],
) -> Result<CoverFamily, CdError> {
    let tuple = t.tuple(x).to_vec();
    let c = &t.base.base;
    if covers.len() != tuple.len() {
        return Err(CdError::CoordinateOutOfRange { index: covers.len(), arity: tuple.len() });
    }
    for (i, u) in covers.iter().enumerate() {
        if u.target != tuple[i] || !is_simple_cover(c, p, u)? {
            return Err(CdError::NotSimple(u.names(c).join(", ")));
        }
    }
    let mut legs = vec![t.cat.identity(x)];
    for (i, u) in covers.iter().enumerate() {
        legs = legs
            .iter()
            .flat_map(|&leg| {
                let src = t.tuple(t.cat.src(leg)).to_vec();
                coordinate_legs(t, &src, i, &u.legs).into_iter().map(move |r| t.cat.compose(leg, r))
            })
            .collect();
    }
    Ok(CoverFamily::new(x, legs))
}

/// For a simple tuple cover, checks that each coordinate's components
/// contain a simple cover of that coordinate.
pub fn project_cover_check(
    t: &TupleCategory,
    p: &CdStructure,
    p_tuple: &CdStructure,
    v: &CoverFamily,
) -> Result<bool, CdError> {
    if !is_simple_cover(&t.cat, p_tuple, v)? {
        return Err(CdError::NotSimple(v.names(&t.cat).join(", ")));
    }
    let c = &t.base.base;
    let tuple = t.tuple(v.target);
    for (i, &xi) in tuple.iter().enumerate() {
        let mut allowed = FixedBitSet::with_capacity(c.num_morphisms());
        for &leg in &v.legs {
            allowed.insert(t.decode(leg).components[i]);
        }
        match contains_simple_cover(c, p, xi, &allowed, DEFAULT_SEARCH_CAP) {
            Search::Found(_) => {}
            Search::NotFound => return Ok(false),
            Search::Inconclusive(_) => return Err(CdError::CapExceeded { what: "search states", cap: DEFAULT_SEARCH_CAP }),
        }
    }
    Ok(true)
}

/// Integer dimensions per object; `-1` marks objects isomorphic to the initial one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionFunction {
    pub values: Vec<i64>,
}

impl DimensionFunction {
    pub fn from_names(c: &FinCategory, values: &[(&str, i64)]) -> Result<Self, CategoryError> {
        let mut v = vec![0; c.num_objects()];
        for (name, d) in values {
            v[c.object_id(name)?] = *d;
        }
        Ok(DimensionFunction { values: v })
    }

    pub fn get(&self, x: Obj) -> i64 {
        self.values[x]
    }
}

pub fn check_dimension_function(c: &FinCategory, d: &DimensionFunction) -> Result<bool, CdError> {
    if d.values.len() != c.num_objects() {
        return Err(CdError::DimensionLength { got: d.values.len(), expected: c.num_objects() });
    }
    let init = classify_initial(c).first().ok_or(CdError::NoInitial)?;
    Ok(c.objects().all(|x| d.values[x] >= -1 && (d.values[x] == -1) == c.isomorphic(x, init)))
}

pub fn satisfies_dim_inequalities(c: &FinCategory, d: &DimensionFunction, sq: &Square) -> bool {
    let lr = d.get(sq.lr(c));
    d.get(sq.ll(c)) <= lr && d.get(sq.ur(c)) <= lr && d.get(sq.ul(c)) < lr
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimCompatibility {
    /// The subset used as witness when compatible.
    pub witness: Option<CdStructure>,
    /// Squares whose generated sieve contains no simple cover from the candidate subset.
    pub failures: Vec<Square>,
    pub inconclusive: bool,
}

/// The candidate subset keeps every degenerate square and each non-degenerate
/// square meeting the inequalities. Containing a simple cover is monotone in
/// the cd-structure, so if any subset works this maximal one does.
pub fn check_dim_compatible(c: &FinCategory, p: &CdStructure, d: &DimensionFunction) -> DimCompatibility {
    let p = normalize_cd(c, p);
    let candidate = CdStructure::from_sorted(
        p.squares()
            .iter()
            .copied()
            .filter(|sq| sq.is_degenerate(c) || satisfies_dim_inequalities(c, d, sq))
            .collect(),
    );
    let by_lr = candidate.by_target(c);
    let isos = iso_set(c);
    let mut failures = Vec::new();
    let mut inconclusive = false;
    for sq in p.squares() {
        let sieve = Sieve::generate(c, sq.lr(c), &[sq.e, sq.p]).expect("square arrows end at LR");
        match contains_simple_cover_with(c, &by_lr, &isos, sq.lr(c), &sieve.members, DEFAULT_SEARCH_CAP) {
            Search::Found(_) => {}
            Search::NotFound => failures.push(*sq),
            Search::Inconclusive(_) => {
                inconclusive = true;
                failures.push(*sq);
            }
        }
    }
    let witness = failures.is_empty().then_some(candidate);
    DimCompatibility { witness, failures, inconclusive }
}

/// Sum of coordinate dimensions plus arity; the empty tuple gets `-1`.
pub fn induced_dimension(d: &DimensionFunction, t: &TupleCategory) -> DimensionFunction {
    DimensionFunction {
        values: t
            .tuples()
            .iter()
            .map(|u| if u.is_empty() { -1 } else { u.iter().map(|&x| d.get(x)).sum::<i64>() + u.len() as i64 })
            .collect(),
    }
}
