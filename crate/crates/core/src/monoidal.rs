//! Partial maps of finite sets, strict symmetric monoidal tables, and the
//! arity-truncated category of tuples over a monoidal category.

use std::fmt;

use thiserror::Error;

use crate::fincat::{check_functor, CategoryError, FinCategory, FinFunctor, MorphismData, Mor, Obj, Report};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonoidalError {
    #[error("maximal arity must be positive")]
    ZeroArity,
    #[error("monoidal data is invalid: {0}")]
    Invalid(String),
    #[error("functor is not strictly monoidal: {0}")]
    NotStrictlyMonoidal(String),
    #[error("category has no meet for ({0}, {1})")]
    NoMeet(String, String),
    #[error("category is not a poset")]
    NotPoset,
    #[error(transparent)]
    Category(#[from] CategoryError),
}

/// A partial map `{0..source} ⇀ {0..target}`, stored as one optional image per source element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialMap {
    pub target: usize,
    pub assign: Vec<Option<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartialMapKind {
    Inert,
    Active,
    Both,
    Neither,
}

impl PartialMap {
    pub fn new(target: usize, assign: Vec<Option<usize>>) -> Self {
        debug_assert!(assign.iter().flatten().all(|&i| i < target));
        PartialMap { target, assign }
    }

    pub fn identity(n: usize) -> Self {
        PartialMap { target: n, assign: (0..n).map(Some).collect() }
    }

    pub fn source(&self) -> usize {
        self.assign.len()
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.assign.iter().enumerate().filter_map(|(j, a)| a.map(|_| j))
    }

    /// Elements sent to `i`, increasing.
    pub fn fiber(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.assign.iter().enumerate().filter_map(move |(j, a)| (*a == Some(i)).then_some(j))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn after(&self, other: &PartialMap) -> PartialMap {
        debug_assert_eq!(other.target, self.source());
        PartialMap {
            target: self.target,
            assign: other.assign.iter().map(|a| a.and_then(|j| self.assign[j])).collect(),
        }
    }

    pub fn is_total(&self) -> bool {
        self.assign.iter().all(Option::is_some)
    }

    /// Bijective from its domain onto the whole target.
    pub fn is_inert(&self) -> bool {
        let mut hit = vec![false; self.target];
        for &i in self.assign.iter().flatten() {
            if std::mem::replace(&mut hit[i], true) {
                return false;
            }
        }
        hit.into_iter().all(|h| h)
    }

    pub fn classify(&self) -> PartialMapKind {
        match (self.is_inert(), self.is_total()) {
            (true, true) => PartialMapKind::Both,
            (true, false) => PartialMapKind::Inert,
            (false, true) => PartialMapKind::Active,
            (false, false) => PartialMapKind::Neither,
        }
    }

    /// Mixed-radix code in `0..(target+1)^source`; undefined is digit 0.
    pub fn code(&self) -> usize {
        self.assign
            .iter()
            .rev()
            .fold(0, |acc, a| acc * (self.target + 1) + a.map_or(0, |i| i + 1))
    }

    pub fn from_code(source: usize, target: usize, mut code: usize) -> Self {
        let assign = (0..source)
            .map(|_| {
                let d = code % (target + 1);
                code /= target + 1;
                d.checked_sub(1)
            })
            .collect();
        PartialMap { target, assign }
    }
}

impl fmt::Display for PartialMap {
    /// One-based images separated by commas, `-` for undefined.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, a) in self.assign.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            match a {
                Some(i) => write!(f, "{}", i + 1)?,
                None => write!(f, "-")?,
            }
        }
        Ok(())
    }
}

pub fn classify_partial_map(alpha: &PartialMap) -> PartialMapKind {
    alpha.classify()
}

/// Direct enumeration, independent of the closed form `(n+1)^m`.
pub fn enumerate_partial_maps(m: usize, n: usize) -> Vec<PartialMap> {
    let mut out = vec![PartialMap { target: n, assign: Vec::new() }];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|pm| {
                std::iter::once(None).chain((0..n).map(Some)).map(move |a| {
                    let mut next = pm.clone();
                    next.assign.push(a);
                    next
                })
            })
            .collect();
    }
    out
}

pub fn count_partial_maps(m: usize, n: usize) -> usize {
    enumerate_partial_maps(m, n).len()
}

/// A strict symmetric monoidal structure given by total tables.
#[derive(Clone, Debug)]
pub struct MonoidalData {
    pub base: FinCategory,
    pub unit: Obj,
    tensor_obj: Vec<Obj>,
    tensor_mor: Vec<Mor>,
}

impl MonoidalData {
    /// Tables are taken as given; run `validate_monoidal` before relying on them.
    pub fn from_fn(
        base: FinCategory,
        unit: Obj,
        mut obj: impl FnMut(Obj, Obj) -> Obj,
        mut mor: impl FnMut(Mor, Mor) -> Mor,
    ) -> Self {
        let (n, m) = (base.num_objects(), base.num_morphisms());
        let mut tensor_obj = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                tensor_obj.push(obj(x, y));
            }
        }
        let mut tensor_mor = Vec::with_capacity(m * m);
        for f in 0..m {
            for g in 0..m {
                tensor_mor.push(mor(f, g));
            }
        }
        MonoidalData { base, unit, tensor_obj, tensor_mor }
    }

    pub fn tensor(&self, x: Obj, y: Obj) -> Obj {
        self.tensor_obj[x * self.base.num_objects() + y]
    }

    pub fn tensor_mor(&self, f: Mor, g: Mor) -> Mor {
        self.tensor_mor[f * self.base.num_morphisms() + g]
    }

    /// Tensor of a list in order; the empty list gives the unit.
    pub fn tensor_all(&self, xs: impl IntoIterator<Item = Obj>) -> Obj {
        xs.into_iter().fold(self.unit, |acc, x| self.tensor(acc, x))
    }

    pub fn tensor_all_mor(&self, fs: impl IntoIterator<Item = Mor>) -> Mor {
        fs.into_iter()
            .fold(self.base.identity(self.unit), |acc, f| self.tensor_mor(acc, f))
    }

    pub fn with_unit(&self, unit: Obj) -> Self {
        MonoidalData { unit, ..self.clone() }
    }
}

/// Meets as tensor on a poset whose binary meets all exist.
pub fn meet_monoidal(c: &FinCategory, unit: Obj) -> Result<MonoidalData, MonoidalError> {
    if c.objects().any(|x| c.objects().any(|y| c.hom(x, y).len() > 1)) {
        return Err(MonoidalError::NotPoset);
    }
    let le = |x: Obj, y: Obj| !c.hom(x, y).is_empty();
    let n = c.num_objects();
    let mut meet = vec![0; n * n];
    for x in 0..n {
        for y in 0..n {
            let lower: Vec<Obj> = c.objects().filter(|&z| le(z, x) && le(z, y)).collect();
            let m = lower
                .iter()
                .copied()
                .find(|&z| lower.iter().all(|&w| le(w, z)))
                .ok_or_else(|| MonoidalError::NoMeet(c.object_name(x).into(), c.object_name(y).into()))?;
            meet[x * n + y] = m;
        }
    }
    let morph = |x: Obj, y: Obj| c.hom(x, y).first().copied();
    let mut bad = None;
    let md = MonoidalData::from_fn(
        c.clone(),
        unit,
        |x, y| meet[x * n + y],
        |f, g| {
            let s = meet[c.src(f) * n + c.src(g)];
            let t = meet[c.tgt(f) * n + c.tgt(g)];
            morph(s, t).unwrap_or_else(|| {
                bad = Some((f, g));
                0
            })
        },
    );
    match bad {
        Some(_) => Err(MonoidalError::NotPoset),
        None => Ok(md),
    }
}

/// Checks strict associativity, commutativity, unitality, functoriality and
/// endpoint compatibility exhaustively.
pub fn validate_monoidal(m: &MonoidalData) -> Report {
    let c = &m.base;
    let mut r = Report::default();
    let cap = |r: &Report| r.violations.len() > 32;
    for x in c.objects() {
        if m.tensor(m.unit, x) != x || m.tensor(x, m.unit) != x {
            r.push(format!("unit law fails at {}", c.object_name(x)));
        }
        for y in c.objects() {
            if m.tensor(x, y) != m.tensor(y, x) {
                r.push(format!("commutativity fails at ({}, {})", c.object_name(x), c.object_name(y)));
            }
            for z in c.objects() {
                if m.tensor(m.tensor(x, y), z) != m.tensor(x, m.tensor(y, z)) {
                    r.push(format!(
                        "associativity fails at ({}, {}, {})",
                        c.object_name(x),
                        c.object_name(y),
                        c.object_name(z)
                    ));
                }
            }
        }
    }
    if cap(&r) {
        return r;
    }
    for f in c.morphisms() {
        for g in c.morphisms() {
            let h = m.tensor_mor(f, g);
            if h >= c.num_morphisms()
                || c.src(h) != m.tensor(c.src(f), c.src(g))
                || c.tgt(h) != m.tensor(c.tgt(f), c.tgt(g))
            {
                r.push(format!("tensor of ({}, {}) has wrong endpoints", c.morphism_name(f), c.morphism_name(g)));
            }
        }
    }
    if !r.ok() {
        return r;
    }
    for x in c.objects() {
        for y in c.objects() {
            if m.tensor_mor(c.identity(x), c.identity(y)) != c.identity(m.tensor(x, y)) {
                r.push(format!("identities not preserved at ({}, {})", c.object_name(x), c.object_name(y)));
            }
        }
    }
    for f in c.morphisms() {
        if m.tensor_mor(c.identity(m.unit), f) != f {
            r.push(format!("unit law fails on morphism {}", c.morphism_name(f)));
        }
        for g in c.morphisms() {
            if m.tensor_mor(f, g) != m.tensor_mor(g, f) {
                r.push(format!("symmetry fails at ({}, {})", c.morphism_name(f), c.morphism_name(g)));
            }
            for h in c.morphisms() {
                if m.tensor_mor(m.tensor_mor(f, g), h) != m.tensor_mor(f, m.tensor_mor(g, h)) {
                    r.push(format!(
                        "associativity fails at ({}, {}, {})",
                        c.morphism_name(f),
                        c.morphism_name(g),
                        c.morphism_name(h)
                    ));
                }
                if cap(&r) {
                    return r;
                }
            }
        }
    }
    // Interchange law over all pairs of composable pairs.
    for y in c.objects() {
        for y2 in c.objects() {
            for &g in c.outgoing(y) {
                for &f in c.incoming(y) {
                    let gf = c.compose(g, f);
                    for &g2 in c.outgoing(y2) {
                        for &f2 in c.incoming(y2) {
                            let lhs = m.tensor_mor(gf, c.compose(g2, f2));
                            let rhs = c.compose(m.tensor_mor(g, g2), m.tensor_mor(f, f2));
                            if lhs != rhs {
                                r.push(format!(
                                    "interchange fails at ({}, {}) with ({}, {})",
                                    c.morphism_name(g),
                                    c.morphism_name(f),
                                    c.morphism_name(g2),
                                    c.morphism_name(f2)
                                ));
                                if cap(&r) {
                                    return r;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    r
}

/// Decoded tuple-category morphism: the partial map on indices (from target
/// positions to source positions) and one base component per source position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleMorphism {
    pub alpha: PartialMap,
    pub components: Vec<Mor>,
}

/// Tuples of length `0..=max_arity` over a strict symmetric monoidal category.
///
/// A morphism `(X_i) -> (Y_j)` is a partial map `α` from target positions to
/// source positions together with maps `X_i -> ⊗_{α(j) = i} Y_j`.
/// Morphisms are laid out in blocks per (source, target, α) and within a
/// block in mixed radix over the component hom-sets, so lookup is arithmetic.
#[derive(Clone, Debug)]
pub struct TupleCategory {
    pub base: MonoidalData,
    pub max_arity: usize,
    pub cat: FinCategory,
    tuples: Vec<Vec<Obj>>,
    arity_offset: Vec<usize>,
    decoded: Vec<TupleMorphism>,
    /// Per (source, target) pair: start of each α block, indexed by α code.
    blocks: Vec<Vec<usize>>,
}

fn tuple_name(base: &FinCategory, t: &[Obj]) -> String {
    let parts: Vec<&str> = t.iter().map(|&x| base.object_name(x)).collect();
    format!("({})", parts.join(","))
}

impl TupleCategory {
    pub fn tuple(&self, x: Obj) -> &[Obj] {
        &self.tuples[x]
    }

    pub fn tuples(&self) -> &[Vec<Obj>] {
        &self.tuples
    }

    pub fn decode(&self, f: Mor) -> &TupleMorphism {
        &self.decoded[f]
    }

    /// Object index of a tuple, if its arity is within range.
    pub fn tuple_id(&self, t: &[Obj]) -> Option<Obj> {
        if t.len() > self.max_arity {
            return None;
        }
        let n = self.base.base.num_objects();
        let mut idx = 0;
        for &x in t {
            idx = idx * n + x;
        }
        Some(self.arity_offset[t.len()] + idx)
    }

    /// The singleton tuple `(x)`.
    pub fn singleton(&self, x: Obj) -> Obj {
        self.arity_offset[1] + x
    }

    fn target_of_position(&self, alpha: &PartialMap, tgt: &[Obj], i: usize) -> Obj {
        self.base.tensor_all(alpha.fiber(i).map(|j| tgt[j]))
    }

    /// Looks up the morphism with the given data, or `None` if the data is ill-typed.
    pub fn lookup(&self, src: Obj, tgt: Obj, alpha: &PartialMap, components: &[Mor]) -> Option<Mor> {
        let (s, t) = (&self.tuples[src], &self.tuples[tgt]);
        if alpha.source() != t.len() || alpha.target != s.len() || components.len() != s.len() {
            return None;
        }
        let c = &self.base.base;
        let start = self.blocks[src * self.tuples.len() + tgt][alpha.code()];
        let mut offset = 0;
        for (i, &comp) in components.iter().enumerate() {
            let want = self.target_of_position(alpha, t, i);
            if c.src(comp) != s[i] || c.tgt(comp) != want {
                return None;
            }
            offset = offset * c.hom(s[i], want).len() + c.hom_position(comp);
        }
        Some(start + offset)
    }

    /// The morphism over the identity partial map with the given components.
    pub fn coordinatewise(&self, src: Obj, tgt: Obj, components: &[Mor]) -> Option<Mor> {
        self.lookup(src, tgt, &PartialMap::identity(components.len()), components)
    }

    fn compose_decoded(&self, g: &TupleMorphism, f: &TupleMorphism) -> (PartialMap, Vec<Mor>) {
        let m = &self.base;
        let c = &m.base;
        let gamma = f.alpha.after(&g.alpha);
        let comps = f
            .components
            .iter()
            .enumerate()
            .map(|(i, &phi)| {
                let psi = m.tensor_all_mor(f.alpha.fiber(i).map(|j| g.components[j]));
                c.compose(psi, phi)
            })
            .collect();
        (gamma, comps)
    }
}

pub fn build_tuple_category(m: &MonoidalData, max_arity: usize) -> Result<TupleCategory, MonoidalError> {
    if max_arity == 0 {
        return Err(MonoidalError::ZeroArity);
    }
    let c = &m.base;
    let n = c.num_objects();
    let mut tuples: Vec<Vec<Obj>> = vec![Vec::new()];
    let mut arity_offset = vec![0];
    let mut layer: Vec<Vec<Obj>> = vec![Vec::new()];
    for _ in 0..max_arity {
        arity_offset.push(tuples.len());
        layer = layer
            .iter()
            .flat_map(|t| {
                (0..n).map(move |x| {
                    let mut u = t.clone();
                    u.push(x);
                    u
                })
            })
            .collect();
        tuples.extend(layer.iter().cloned());
    }
    let objects: Vec<String> = tuples.iter().map(|t| tuple_name(c, t)).collect();
    let k = tuples.len();
    let mut morphisms = Vec::new();
    let mut decoded = Vec::new();
    let mut blocks = Vec::with_capacity(k * k);
    for (si, s) in tuples.iter().enumerate() {
        for (ti, t) in tuples.iter().enumerate() {
            let maps = enumerate_partial_maps(t.len(), s.len());
            let mut starts = vec![usize::MAX; maps.len()];
            // `enumerate_partial_maps` does not emit in code order; index by code.
            for alpha in &maps {
                starts[alpha.code()] = decoded.len();
                let homs: Vec<&[Mor]> = (0..s.len())
                    .map(|i| c.hom(s[i], m.tensor_all(alpha.fiber(i).map(|j| t[j]))))
                    .collect();
                let total: usize = homs.iter().map(|h| h.len()).product();
                for mut code in 0..total {
                    let mut comps = vec![0; s.len()];
                    for i in (0..s.len()).rev() {
                        comps[i] = homs[i][code % homs[i].len()];
                        code /= homs[i].len();
                    }
                    let names: Vec<&str> = comps.iter().map(|&f| c.morphism_name(f)).collect();
                    morphisms.push(MorphismData {
                        name: format!("{}->{}[{};{}]", objects[si], objects[ti], alpha, names.join(",")),
                        src: si,
                        tgt: ti,
                    });
                    decoded.push(TupleMorphism { alpha: alpha.clone(), components: comps });
                }
            }
            blocks.push(starts);
        }
    }
    let identities: Vec<Mor> = tuples
        .iter()
        .enumerate()
        .map(|(x, t)| {
            let alpha = PartialMap::identity(t.len());
            let start = blocks[x * k + x][alpha.code()];
            let mut offset = 0;
            for &o in t {
                let id = c.identity(o);
                offset = offset * c.hom(o, o).len() + c.hom_position(id);
            }
            start + offset
        })
        .collect();
    let ends: Vec<(Obj, Obj)> = morphisms.iter().map(|d| (d.src, d.tgt)).collect();
    let mut tc = TupleCategory {
        base: m.clone(),
        max_arity,
        // Placeholder until the composition table below is assembled.
        cat: FinCategory::from_fn(Vec::new(), Vec::new(), Vec::new(), |_, _| None)?,
        tuples,
        arity_offset,
        decoded,
        blocks,
    };
    let cat = FinCategory::from_fn(objects, morphisms, identities, |g, f| {
        let (gamma, comps) = tc.compose_decoded(&tc.decoded[g], &tc.decoded[f]);
        tc.lookup(ends[f].0, ends[g].1, &gamma, &comps)
    })?;
    tc.cat = cat;
    Ok(tc)
}

/// Checks that `f` preserves unit, object tensor and morphism tensor on the nose.
pub fn check_strict_monoidal(src: &MonoidalData, tgt: &MonoidalData, f: &FinFunctor) -> Report {
    let c = &src.base;
    let mut r = Report::default();
    if f.obj(src.unit) != tgt.unit {
        r.push("unit not preserved".into());
    }
    for x in c.objects() {
        for y in c.objects() {
            if f.obj(src.tensor(x, y)) != tgt.tensor(f.obj(x), f.obj(y)) {
                r.push(format!("tensor not preserved at ({}, {})", c.object_name(x), c.object_name(y)));
            }
        }
    }
    for g in c.morphisms() {
        for h in c.morphisms() {
            if f.mor(src.tensor_mor(g, h)) != tgt.tensor_mor(f.mor(g), f.mor(h)) {
                r.push(format!("tensor not preserved at ({}, {})", c.morphism_name(g), c.morphism_name(h)));
            }
        }
    }
    r
}

/// The coordinatewise functor between tuple categories induced by a strictly
/// monoidal functor of bases.
pub fn induced_tensor_functor(
    src: &TupleCategory,
    tgt: &TupleCategory,
    f: &FinFunctor,
) -> Result<FinFunctor, MonoidalError> {
    let functor = check_functor(&src.base.base, &tgt.base.base, f)?;
    if !functor.ok() {
        return Err(MonoidalError::NotStrictlyMonoidal(functor.report.to_string()));
    }
    let strict = check_strict_monoidal(&src.base, &tgt.base, f);
    if !strict.ok() {
        return Err(MonoidalError::NotStrictlyMonoidal(strict.to_string()));
    }
    if src.max_arity > tgt.max_arity {
        return Err(MonoidalError::Invalid("target arity bound is smaller than source".into()));
    }
    let obj_map: Vec<Obj> = src
        .tuples()
        .iter()
        .map(|t| {
            let image: Vec<Obj> = t.iter().map(|&x| f.obj(x)).collect();
            tgt.tuple_id(&image).expect("arity within bound")
        })
        .collect();
    let mor_map = src
        .cat
        .morphisms()
        .map(|g| {
            let dg = src.decode(g);
            let comps: Vec<Mor> = dg.components.iter().map(|&h| f.mor(h)).collect();
            tgt.lookup(obj_map[src.cat.src(g)], obj_map[src.cat.tgt(g)], &dg.alpha, &comps)
                .expect("strictly monoidal functors preserve component types")
        })
        .collect();
    Ok(FinFunctor { obj_map, mor_map })
}

/// The projection to partial maps reverses composition: `α(g∘f) = α(f)∘α(g)`.
pub fn check_projection_functorial(t: &TupleCategory) -> Report {
    let c = &t.cat;
    let mut r = Report::default();
    for y in c.objects() {
        for &g in c.outgoing(y) {
            for &f in c.incoming(y) {
                let composite = &t.decode(c.compose(g, f)).alpha;
                if *composite != t.decode(f).alpha.after(&t.decode(g).alpha) {
                    r.push(format!("projection fails on pair ({}, {})", c.morphism_name(g), c.morphism_name(f)));
                    return r;
                }
            }
        }
    }
    r
}
