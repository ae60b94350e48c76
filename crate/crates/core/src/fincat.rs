//! Finite categories given by complete composition tables.
//!
//! Objects and morphisms are dense indices. Names are kept only for
//! diagnostics and serialization; every predicate works on indices.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

pub type Obj = usize;
pub type Mor = usize;

const UNDEFINED: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CategoryError {
    #[error("duplicate object name `{0}`")]
    DuplicateObject(String),
    #[error("duplicate morphism name `{0}`")]
    DuplicateMorphism(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("no composite given for `{g}` after `{f}`")]
    MissingComposite { g: String, f: String },
    #[error("`{g}` after `{f}` is not a composable pair")]
    NotComposable { g: String, f: String },
    #[error("square does not commute: {0}")]
    NonCommutingSquare(String),
    #[error("malformed square: {0}")]
    MalformedSquare(String),
    #[error("functor map is incomplete or dangling: {0}")]
    DanglingFunctor(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismData {
    pub name: String,
    pub src: Obj,
    pub tgt: Obj,
}

/// A finite category with a total composition table.
///
/// Composition is stored per middle object: for `f: X -> Y` and
/// `g: Y -> Z` the composite lives at `table[Y][out_pos(g) * in(Y) + in_pos(f)]`,
/// so storage is exactly the number of composable pairs.
#[derive(Clone, Debug)]
pub struct FinCategory {
    objects: Vec<String>,
    morphisms: Vec<MorphismData>,
    identities: Vec<Mor>,
    incoming: Vec<Vec<Mor>>,
    outgoing: Vec<Vec<Mor>>,
    in_pos: Vec<u32>,
    out_pos: Vec<u32>,
    hom: Vec<Vec<Mor>>,
    hom_pos: Vec<u32>,
    table: Vec<Vec<u32>>,
    obj_index: HashMap<String, Obj>,
    mor_index: HashMap<String, Mor>,
}

/// Pass/fail report with human-readable witnesses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub violations: Vec<String>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn push(&mut self, msg: String) {
        self.violations.push(msg);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return write!(f, "pass");
        }
        writeln!(f, "fail")?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

impl FinCategory {
    /// Builds a category from explicit data. `compose(g, f)` is called for
    /// every composable pair and may return a morphism with wrong endpoints;
    /// such tables are representable so that `validate_category` can report them.
    pub fn from_fn<F>(
        objects: Vec<String>,
        morphisms: Vec<MorphismData>,
        identities: Vec<Mor>,
        mut compose: F,
    ) -> Result<Self, CategoryError>
    where
        F: FnMut(Mor, Mor) -> Option<Mor>,
    {
        let mut cat = Self::skeleton(objects, morphisms, identities)?;
        for y in 0..cat.objects.len() {
            let (ins, outs) = (cat.incoming[y].clone(), cat.outgoing[y].clone());
            for &g in &outs {
                for &f in &ins {
                    match compose(g, f) {
                        Some(h) => cat.set(g, f, h),
                        None => {
                            return Err(CategoryError::MissingComposite {
                                g: cat.morphisms[g].name.clone(),
                                f: cat.morphisms[f].name.clone(),
                            })
                        }
                    }
                }
            }
        }
        Ok(cat)
    }

    fn skeleton(
        objects: Vec<String>,
        morphisms: Vec<MorphismData>,
        identities: Vec<Mor>,
    ) -> Result<Self, CategoryError> {
        let n = objects.len();
        let mut obj_index = HashMap::with_capacity(n);
        for (i, o) in objects.iter().enumerate() {
            if obj_index.insert(o.clone(), i).is_some() {
                return Err(CategoryError::DuplicateObject(o.clone()));
            }
        }
        let mut mor_index = HashMap::with_capacity(morphisms.len());
        for (i, m) in morphisms.iter().enumerate() {
            if mor_index.insert(m.name.clone(), i).is_some() {
                return Err(CategoryError::DuplicateMorphism(m.name.clone()));
            }
            if m.src >= n || m.tgt >= n {
                return Err(CategoryError::UnknownObject(format!("endpoint of `{}`", m.name)));
            }
        }
        if identities.len() != n {
            return Err(CategoryError::MalformedSquare("identity list length".into()));
        }
        let mut incoming = vec![Vec::new(); n];
        let mut outgoing = vec![Vec::new(); n];
        let mut hom = vec![Vec::new(); n * n];
        let mut in_pos = vec![0u32; morphisms.len()];
        let mut out_pos = vec![0u32; morphisms.len()];
        let mut hom_pos = vec![0u32; morphisms.len()];
        for (i, m) in morphisms.iter().enumerate() {
            in_pos[i] = incoming[m.tgt].len() as u32;
            incoming[m.tgt].push(i);
            out_pos[i] = outgoing[m.src].len() as u32;
            outgoing[m.src].push(i);
            let h = &mut hom[m.src * n + m.tgt];
            hom_pos[i] = h.len() as u32;
            h.push(i);
        }
        let table = (0..n)
            .map(|y| vec![UNDEFINED; incoming[y].len() * outgoing[y].len()])
            .collect();
        Ok(FinCategory {
            objects,
            morphisms,
            identities,
            incoming,
            outgoing,
            in_pos,
            out_pos,
            hom,
            hom_pos,
            table,
            obj_index,
            mor_index,
        })
    }

    fn slot(&self, g: Mor, f: Mor) -> Option<(usize, usize)> {
        let y = self.morphisms[f].tgt;
        if self.morphisms[g].src != y {
            return None;
        }
        let width = self.incoming[y].len();
        Some((y, self.out_pos[g] as usize * width + self.in_pos[f] as usize))
    }

    fn set(&mut self, g: Mor, f: Mor, h: Mor) {
        let (y, i) = self.slot(g, f).expect("composable");
        self.table[y][i] = h as u32;
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = Obj> {
        0..self.objects.len()
    }

    pub fn morphisms(&self) -> impl Iterator<Item = Mor> {
        0..self.morphisms.len()
    }

    pub fn object_name(&self, x: Obj) -> &str {
        &self.objects[x]
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn morphism_name(&self, f: Mor) -> &str {
        &self.morphisms[f].name
    }

    pub fn morphism(&self, f: Mor) -> &MorphismData {
        &self.morphisms[f]
    }

    pub fn object_id(&self, name: &str) -> Result<Obj, CategoryError> {
        self.obj_index
            .get(name)
            .copied()
            .ok_or_else(|| CategoryError::UnknownObject(name.to_string()))
    }

    pub fn morphism_id(&self, name: &str) -> Result<Mor, CategoryError> {
        self.mor_index
            .get(name)
            .copied()
            .ok_or_else(|| CategoryError::UnknownMorphism(name.to_string()))
    }

    pub fn src(&self, f: Mor) -> Obj {
        self.morphisms[f].src
    }

    pub fn tgt(&self, f: Mor) -> Obj {
        self.morphisms[f].tgt
    }

    pub fn identity(&self, x: Obj) -> Mor {
        self.identities[x]
    }

    pub fn is_identity(&self, f: Mor) -> bool {
        self.identities[self.src(f)] == f
    }

    /// Morphisms with target `x`; the identity is among them.
    pub fn incoming(&self, x: Obj) -> &[Mor] {
        &self.incoming[x]
    }

    pub fn outgoing(&self, x: Obj) -> &[Mor] {
        &self.outgoing[x]
    }

    pub fn hom(&self, x: Obj, y: Obj) -> &[Mor] {
        &self.hom[x * self.objects.len() + y]
    }

    /// Position of `f` inside its hom-set.
    pub fn hom_position(&self, f: Mor) -> usize {
        self.hom_pos[f] as usize
    }

    /// `g ∘ f`, or `None` when the pair is not composable.
    pub fn try_compose(&self, g: Mor, f: Mor) -> Option<Mor> {
        let (y, i) = self.slot(g, f)?;
        let h = self.table[y][i];
        (h != UNDEFINED).then_some(h as usize)
    }

    /// `g ∘ f` for a composable pair.
    #[inline]
    pub fn compose(&self, g: Mor, f: Mor) -> Mor {
        let y = self.morphisms[f].tgt;
        debug_assert_eq!(self.morphisms[g].src, y, "composing non-composable pair");
        let width = self.incoming[y].len();
        self.table[y][self.out_pos[g] as usize * width + self.in_pos[f] as usize] as usize
    }

    pub fn is_iso(&self, f: Mor) -> bool {
        self.inverse(f).is_some()
    }

    pub fn inverse(&self, f: Mor) -> Option<Mor> {
        let (x, y) = (self.src(f), self.tgt(f));
        self.hom(y, x)
            .iter()
            .copied()
            .find(|&g| self.compose(g, f) == self.identity(x) && self.compose(f, g) == self.identity(y))
    }

    pub fn isomorphic(&self, x: Obj, y: Obj) -> bool {
        x == y || self.hom(x, y).iter().any(|&f| self.is_iso(f))
    }

    /// Isomorphisms with target `x`.
    pub fn isos_into(&self, x: Obj) -> Vec<Mor> {
        self.incoming(x).iter().copied().filter(|&f| self.is_iso(f)).collect()
    }

    pub fn find_morphism(&self, x: Obj, y: Obj) -> Option<Mor> {
        self.hom(x, y).first().copied()
    }
}

/// Incremental construction from names. Identities are implicit and named
/// `id_<object>`; compositions with an identity are filled in automatically.
#[derive(Default, Debug, Clone)]
pub struct CategoryBuilder {
    objects: Vec<String>,
    morphisms: Vec<(String, String, String)>,
    composites: Vec<(String, String, String)>,
}

impl CategoryBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn object(mut self, name: &str) -> Self {
        self.objects.push(name.to_string());
        self
    }

    pub fn objects(mut self, names: &[&str]) -> Self {
        self.objects.extend(names.iter().map(|s| s.to_string()));
        self
    }

    pub fn morphism(mut self, name: &str, src: &str, tgt: &str) -> Self {
        self.morphisms.push((name.into(), src.into(), tgt.into()));
        self
    }

    /// Declares `g ∘ f = h`.
    pub fn compose(mut self, g: &str, f: &str, h: &str) -> Self {
        self.composites.push((g.into(), f.into(), h.into()));
        self
    }

    pub fn push_object(&mut self, name: &str) {
        self.objects.push(name.to_string());
    }

    pub fn push_morphism(&mut self, name: &str, src: &str, tgt: &str) {
        self.morphisms.push((name.into(), src.into(), tgt.into()));
    }

    pub fn push_compose(&mut self, g: &str, f: &str, h: &str) {
        self.composites.push((g.into(), f.into(), h.into()));
    }

    pub fn build(self) -> Result<FinCategory, CategoryError> {
        let mut obj_index = HashMap::new();
        for (i, o) in self.objects.iter().enumerate() {
            if obj_index.insert(o.as_str(), i).is_some() {
                return Err(CategoryError::DuplicateObject(o.clone()));
            }
        }
        let mut morphisms = Vec::new();
        let mut identities = Vec::new();
        for (i, o) in self.objects.iter().enumerate() {
            identities.push(morphisms.len());
            morphisms.push(MorphismData { name: format!("id_{o}"), src: i, tgt: i });
        }
        for (name, s, t) in &self.morphisms {
            let src = *obj_index.get(s.as_str()).ok_or_else(|| CategoryError::UnknownObject(s.clone()))?;
            let tgt = *obj_index.get(t.as_str()).ok_or_else(|| CategoryError::UnknownObject(t.clone()))?;
            morphisms.push(MorphismData { name: name.clone(), src, tgt });
        }
        let mut mor_index = HashMap::new();
        for (i, m) in morphisms.iter().enumerate() {
            if mor_index.insert(m.name.clone(), i).is_some() {
                return Err(CategoryError::DuplicateMorphism(m.name.clone()));
            }
        }
        let lookup = |n: &str| mor_index.get(n).copied().ok_or_else(|| CategoryError::UnknownMorphism(n.to_string()));
        let mut given: HashMap<(Mor, Mor), Mor> = HashMap::new();
        for (g, f, h) in &self.composites {
            let (gi, fi, hi) = (lookup(g)?, lookup(f)?, lookup(h)?);
            if morphisms[gi].src != morphisms[fi].tgt {
                return Err(CategoryError::NotComposable { g: g.clone(), f: f.clone() });
            }
            given.insert((gi, fi), hi);
        }
        let ids = identities.clone();
        let is_id = |m: Mor| ids.contains(&m);
        FinCategory::from_fn(self.objects, morphisms, identities, |g, f| {
            if let Some(&h) = given.get(&(g, f)) {
                Some(h)
            } else if is_id(g) {
                Some(f)
            } else if is_id(f) {
                Some(g)
            } else {
                None
            }
        })
    }
}

/// Checks endpoints, identity laws and associativity exhaustively.
pub fn validate_category(c: &FinCategory) -> Report {
    let mut r = Report::default();
    for x in c.objects() {
        let i = c.identity(x);
        if c.src(i) != x || c.tgt(i) != x {
            r.push(format!("identity of {} has wrong endpoints", c.object_name(x)));
        }
    }
    for y in c.objects() {
        for &g in c.outgoing(y) {
            for &f in c.incoming(y) {
                let Some(h) = c.try_compose(g, f) else {
                    r.push(format!("missing composite ({}, {})", c.morphism_name(g), c.morphism_name(f)));
                    continue;
                };
                if c.src(h) != c.src(f) || c.tgt(h) != c.tgt(g) {
                    r.push(format!(
                        "composite of pair ({}, {}) is {} with wrong endpoints",
                        c.morphism_name(g),
                        c.morphism_name(f),
                        c.morphism_name(h)
                    ));
                }
            }
        }
    }
    if !r.ok() {
        return r;
    }
    for f in c.morphisms() {
        let (x, y) = (c.src(f), c.tgt(f));
        if c.compose(c.identity(y), f) != f {
            r.push(format!("left identity fails on pair ({}, {})", c.morphism_name(c.identity(y)), c.morphism_name(f)));
        }
        if c.compose(f, c.identity(x)) != f {
            r.push(format!("right identity fails on pair ({}, {})", c.morphism_name(f), c.morphism_name(c.identity(x))));
        }
    }
    for g in c.morphisms() {
        let y = c.src(g);
        for &f in c.incoming(y) {
            let gf = c.compose(g, f);
            for &h in c.outgoing(c.tgt(g)) {
                if c.compose(h, gf) != c.compose(c.compose(h, g), f) {
                    r.push(format!(
                        "associativity fails on triple ({}, {}, {})",
                        c.morphism_name(h),
                        c.morphism_name(g),
                        c.morphism_name(f)
                    ));
                    if r.violations.len() > 32 {
                        return r;
                    }
                }
            }
        }
    }
    r
}

/// `f` is mono iff postcomposition with `f` is injective on every `Hom(Z, src f)`.
pub fn is_mono(c: &FinCategory, f: Mor) -> bool {
    let x = c.src(f);
    c.objects().all(|z| {
        let mut seen = std::collections::HashSet::new();
        c.hom(z, x).iter().all(|&g| seen.insert(c.compose(f, g)))
    })
}

/// A commuting square, named by its four arrows.
///
/// ```text
/// UL --top--> UR
///  |           |
/// left         p
///  v           v
/// LL ---e---> LR
/// ```
/// The bottom arrow `e` is the one written `i` in some sources.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Square {
    pub top: Mor,
    pub left: Mor,
    pub p: Mor,
    pub e: Mor,
}

impl Square {
    /// Checks shape and commutativity.
    pub fn new(c: &FinCategory, top: Mor, left: Mor, p: Mor, e: Mor) -> Result<Self, CategoryError> {
        let sq = Square { top, left, p, e };
        sq.check(c)?;
        Ok(sq)
    }

    pub fn check(&self, c: &FinCategory) -> Result<(), CategoryError> {
        let shape_ok = c.src(self.top) == c.src(self.left)
            && c.tgt(self.top) == c.src(self.p)
            && c.tgt(self.left) == c.src(self.e)
            && c.tgt(self.p) == c.tgt(self.e);
        if !shape_ok {
            return Err(CategoryError::MalformedSquare(self.describe(c)));
        }
        if c.compose(self.p, self.top) != c.compose(self.e, self.left) {
            return Err(CategoryError::NonCommutingSquare(self.describe(c)));
        }
        Ok(())
    }

    pub fn degenerate(c: &FinCategory, x: Obj) -> Self {
        let i = c.identity(x);
        Square { top: i, left: i, p: i, e: i }
    }

    pub fn is_degenerate(&self, c: &FinCategory) -> bool {
        [self.top, self.left, self.p, self.e].iter().all(|&m| c.is_identity(m))
    }

    pub fn ul(&self, c: &FinCategory) -> Obj {
        c.src(self.top)
    }

    pub fn ur(&self, c: &FinCategory) -> Obj {
        c.tgt(self.top)
    }

    pub fn ll(&self, c: &FinCategory) -> Obj {
        c.tgt(self.left)
    }

    pub fn lr(&self, c: &FinCategory) -> Obj {
        c.tgt(self.p)
    }

    pub fn corners(&self, c: &FinCategory) -> [Obj; 4] {
        [self.ul(c), self.ur(c), self.ll(c), self.lr(c)]
    }

    pub fn describe(&self, c: &FinCategory) -> String {
        format!(
            "({} {} {} {})",
            c.morphism_name(self.top),
            c.morphism_name(self.left),
            c.morphism_name(self.p),
            c.morphism_name(self.e)
        )
    }
}

/// Number of mediating maps for a cone `(u, v)` over the cospan of `sq`.
fn mediators(c: &FinCategory, sq: &Square, z: Obj, u: Mor, v: Mor) -> usize {
    c.hom(z, sq.ul(c))
        .iter()
        .filter(|&&w| c.compose(sq.top, w) == u && c.compose(sq.left, w) == v)
        .count()
}

/// Universal property checked over every cone.
pub fn is_pullback(c: &FinCategory, sq: &Square) -> Result<bool, CategoryError> {
    sq.check(c)?;
    Ok(is_pullback_unchecked(c, sq))
}

pub(crate) fn is_pullback_unchecked(c: &FinCategory, sq: &Square) -> bool {
    let (ur, ll) = (sq.ur(c), sq.ll(c));
    for z in c.objects() {
        for &u in c.hom(z, ur) {
            let pu = c.compose(sq.p, u);
            for &v in c.hom(z, ll) {
                if pu == c.compose(sq.e, v) && mediators(c, sq, z, u, v) != 1 {
                    return false;
                }
            }
        }
    }
    true
}

/// A pullback cone `(apex, to the domain of the first leg, to the domain of the second)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PullbackCone {
    pub apex: Obj,
    pub first: Mor,
    pub second: Mor,
}

/// All pullbacks of the cospan `f: A -> X <- B: g`.
pub fn pullback_cones(c: &FinCategory, f: Mor, g: Mor) -> Vec<PullbackCone> {
    assert_eq!(c.tgt(f), c.tgt(g), "not a cospan");
    let mut out = Vec::new();
    for w in c.objects() {
        for &u in c.hom(w, c.src(f)) {
            for &v in c.hom(w, c.src(g)) {
                let sq = Square { top: u, left: v, p: f, e: g };
                if c.compose(f, u) == c.compose(g, v) && is_pullback_unchecked(c, &sq) {
                    out.push(PullbackCone { apex: w, first: u, second: v });
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialReport {
    /// Every initial object (they are pairwise isomorphic).
    pub initial: Vec<Obj>,
    /// Every morphism into an initial object is an isomorphism.
    pub strict: bool,
    /// The initial object is also terminal.
    pub zero: bool,
}

impl InitialReport {
    pub fn first(&self) -> Option<Obj> {
        self.initial.first().copied()
    }
}

pub fn is_initial(c: &FinCategory, x: Obj) -> bool {
    c.objects().all(|y| c.hom(x, y).len() == 1)
}

pub fn is_terminal(c: &FinCategory, x: Obj) -> bool {
    c.objects().all(|y| c.hom(y, x).len() == 1)
}

pub fn classify_initial(c: &FinCategory) -> InitialReport {
    let initial: Vec<Obj> = c.objects().filter(|&x| is_initial(c, x)).collect();
    let strict = !initial.is_empty()
        && initial
            .iter()
            .all(|&i| c.incoming(i).iter().all(|&f| c.is_iso(f)));
    let zero = initial.first().is_some_and(|&i| is_terminal(c, i));
    InitialReport { initial, strict, zero }
}

/// A functor given by explicit object and morphism maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinFunctor {
    pub obj_map: Vec<Obj>,
    pub mor_map: Vec<Mor>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorReport {
    pub report: Report,
    pub full: bool,
    pub faithful: bool,
    pub essentially_surjective: bool,
}

impl FunctorReport {
    pub fn ok(&self) -> bool {
        self.report.ok()
    }
}

impl FinFunctor {
    pub fn identity(c: &FinCategory) -> Self {
        FinFunctor { obj_map: c.objects().collect(), mor_map: c.morphisms().collect() }
    }

    /// Builds a functor from name pairs; identities map to identities implicitly.
    pub fn from_names(
        src: &FinCategory,
        tgt: &FinCategory,
        objects: &[(&str, &str)],
        morphisms: &[(&str, &str)],
    ) -> Result<Self, CategoryError> {
        let mut obj_map = vec![usize::MAX; src.num_objects()];
        for (a, b) in objects {
            obj_map[src.object_id(a)?] = tgt.object_id(b)?;
        }
        if let Some(x) = obj_map.iter().position(|&o| o == usize::MAX) {
            return Err(CategoryError::DanglingFunctor(format!("object `{}` unmapped", src.object_name(x))));
        }
        let mut mor_map = vec![usize::MAX; src.num_morphisms()];
        for x in src.objects() {
            mor_map[src.identity(x)] = tgt.identity(obj_map[x]);
        }
        for (a, b) in morphisms {
            mor_map[src.morphism_id(a)?] = tgt.morphism_id(b)?;
        }
        if let Some(f) = mor_map.iter().position(|&m| m == usize::MAX) {
            return Err(CategoryError::DanglingFunctor(format!("morphism `{}` unmapped", src.morphism_name(f))));
        }
        Ok(FinFunctor { obj_map, mor_map })
    }

    /// Full-subcategory inclusion, matching objects and morphisms by name.
    pub fn inclusion_by_name(src: &FinCategory, tgt: &FinCategory) -> Result<Self, CategoryError> {
        let obj_map = src
            .objects()
            .map(|x| tgt.object_id(src.object_name(x)))
            .collect::<Result<_, _>>()?;
        let mor_map = src
            .morphisms()
            .map(|f| tgt.morphism_id(src.morphism_name(f)))
            .collect::<Result<_, _>>()?;
        Ok(FinFunctor { obj_map, mor_map })
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &FinFunctor) -> FinFunctor {
        FinFunctor {
            obj_map: self.obj_map.iter().map(|&x| other.obj_map[x]).collect(),
            mor_map: self.mor_map.iter().map(|&f| other.mor_map[f]).collect(),
        }
    }

    pub fn obj(&self, x: Obj) -> Obj {
        self.obj_map[x]
    }

    pub fn mor(&self, f: Mor) -> Mor {
        self.mor_map[f]
    }
}

/// Functoriality plus full / faithful / essentially-surjective flags.
pub fn check_functor(src: &FinCategory, tgt: &FinCategory, f: &FinFunctor) -> Result<FunctorReport, CategoryError> {
    if f.obj_map.len() != src.num_objects() || f.mor_map.len() != src.num_morphisms() {
        return Err(CategoryError::DanglingFunctor("map length does not match source".into()));
    }
    if let Some(&o) = f.obj_map.iter().find(|&&o| o >= tgt.num_objects()) {
        return Err(CategoryError::DanglingFunctor(format!("object index {o} out of range")));
    }
    if let Some(&m) = f.mor_map.iter().find(|&&m| m >= tgt.num_morphisms()) {
        return Err(CategoryError::DanglingFunctor(format!("morphism index {m} out of range")));
    }
    let mut r = Report::default();
    for g in src.morphisms() {
        let fg = f.mor(g);
        if tgt.src(fg) != f.obj(src.src(g)) || tgt.tgt(fg) != f.obj(src.tgt(g)) {
            r.push(format!("endpoints not preserved at {}", src.morphism_name(g)));
        }
    }
    for x in src.objects() {
        if f.mor(src.identity(x)) != tgt.identity(f.obj(x)) {
            r.push(format!("identity not preserved at {}", src.object_name(x)));
        }
    }
    if r.ok() {
        'outer: for y in src.objects() {
            for &g in src.outgoing(y) {
                for &h in src.incoming(y) {
                    if f.mor(src.compose(g, h)) != tgt.compose(f.mor(g), f.mor(h)) {
                        r.push(format!(
                            "composition not preserved on pair ({}, {})",
                            src.morphism_name(g),
                            src.morphism_name(h)
                        ));
                        if r.violations.len() > 32 {
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    let mut full = true;
    let mut faithful = true;
    for x in src.objects() {
        for y in src.objects() {
            let mut image: Vec<Mor> = src.hom(x, y).iter().map(|&g| f.mor(g)).collect();
            let n = image.len();
            image.sort_unstable();
            image.dedup();
            if image.len() != n {
                faithful = false;
            }
            if image.len() != tgt.hom(f.obj(x), f.obj(y)).len() {
                full = false;
            }
        }
    }
    let essentially_surjective = tgt
        .objects()
        .all(|y| src.objects().any(|x| tgt.isomorphic(f.obj(x), y)));
    Ok(FunctorReport { report: r, full, faithful, essentially_surjective })
}
