//! Lax and weak cartesian structures on truncated tuple categories.
//!
//! A lax cartesian `F` is determined by its restriction `G` to singletons,
//! the image `e ∈ G(1)` of the unique point of `F(())`, and for arity 2 the
//! multiplication `m: G(X) × G(Y) -> G(X ⊗ Y)`. Functoriality of the
//! extension `F(X_1, .., X_k) = ∏ G(X_i)` forces unitality, commutativity
//! and naturality of `m`; those are used to prune, and every candidate is
//! validated on the tuple category before it is returned.

use std::collections::HashSet;

use crate::cdstructures::{monoidal_cd, CdStructure};
use crate::fincat::{FinFunctor, Mor, Obj};
use crate::monoidal::{PartialMap, TupleCategory};

use super::{
    enumerate_sheaves, is_sheaf_squares, natural_transformations, restrict, validate_presheaf, EnumOptions, Presheaf,
    SheafCondition, SheafError,
};

/// `G`, the unit section and the binary multiplication tables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaxStructure {
    pub base: Presheaf,
    pub unit: usize,
    /// `mult[x * n + y][s * |G(y)| + t] = m(s, t)`; empty below arity 2.
    pub mult: Vec<Vec<usize>>,
}

impl LaxStructure {
    /// Product of a list of sections, folded from the left; the empty product is the unit.
    pub fn multiply(&self, t: &TupleCategory, objs: &[Obj], secs: &[usize]) -> usize {
        let m = &t.base;
        let n = m.base.num_objects();
        let Some((&first, rest)) = secs.split_first() else { return self.unit };
        let mut acc_obj = objs[0];
        let mut acc = first;
        for (&y, &s) in objs[1..].iter().zip(rest) {
            acc = self.mult[acc_obj * n + y][acc * self.base.sizes[y] + s];
            acc_obj = m.tensor(acc_obj, y);
        }
        acc
    }
}

fn decode(sizes: &[usize], mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for i in (0..sizes.len()).rev() {
        out[i] = idx % sizes[i];
        idx /= sizes[i];
    }
    out
}

fn encode(sizes: &[usize], secs: &[usize]) -> usize {
    secs.iter().zip(sizes).fold(0, |acc, (&s, &n)| acc * n + s)
}

/// The presheaf `F(X_1, .., X_k) = ∏ G(X_i)` on the tuple category, with
/// sections encoded in mixed radix (first coordinate most significant).
pub fn product_extension(t: &TupleCategory, s: &LaxStructure) -> Presheaf {
    let c = &t.cat;
    let g = &s.base;
    let sizes: Vec<Vec<usize>> = t.tuples().iter().map(|tp| tp.iter().map(|&x| g.sizes[x]).collect()).collect();
    let actions = c
        .morphisms()
        .map(|f| {
            let d = t.decode(f);
            let tgt = t.tuple(c.tgt(f));
            let tsz = &sizes[c.tgt(f)];
            let total: usize = tsz.iter().product();
            (0..total)
                .map(|idx| {
                    let secs = decode(tsz, idx);
                    let out: Vec<usize> = d
                        .components
                        .iter()
                        .enumerate()
                        .map(|(i, &phi)| {
                            let fib: Vec<usize> = d.alpha.fiber(i).collect();
                            let objs: Vec<Obj> = fib.iter().map(|&j| tgt[j]).collect();
                            let vals: Vec<usize> = fib.iter().map(|&j| secs[j]).collect();
                            g.act(phi, s.multiply(t, &objs, &vals))
                        })
                        .collect();
                    encode(&sizes[c.src(f)], &out)
                })
                .collect()
        })
        .collect();
    Presheaf { sizes: sizes.iter().map(|v| v.iter().product()).collect(), actions, pointed: g.pointed }
}

/// The morphism `(X_i) -> (X_0, .., X_{k-1})` picking out position `i` with identity component.
fn projection(t: &TupleCategory, tuple: Obj, i: usize) -> Mor {
    let tp = t.tuple(tuple);
    let x = tp[i];
    let assign = (0..tp.len()).map(|j| (j == i).then_some(0)).collect();
    t.lookup(t.singleton(x), tuple, &PartialMap::new(1, assign), &[t.base.base.identity(x)])
        .expect("projections exist in every tuple category")
}

/// The morphism `(⊗ X_i) -> (X_0, .., X_{k-1})` over the active map with identity component.
fn multiplication(t: &TupleCategory, tuple: Obj) -> Mor {
    let tp = t.tuple(tuple);
    let x = t.base.tensor_all(tp.iter().copied());
    t.lookup(t.singleton(x), tuple, &PartialMap::new(1, vec![Some(0); tp.len()]), &[t.base.base.identity(x)])
        .expect("multiplication maps exist in every tuple category")
}

/// A tuple whose Segal map `F(X_i) -> ∏ F((X_i))` is not a bijection.
pub fn lax_cartesian_failure(t: &TupleCategory, f: &Presheaf) -> Option<Obj> {
    t.cat.objects().find(|&x| {
        let k = t.tuple(x).len();
        let projs: Vec<Mor> = (0..k).map(|i| projection(t, x, i)).collect();
        let sizes: Vec<usize> = projs.iter().map(|&p| f.sizes[t.cat.src(p)]).collect();
        if f.sizes[x] != sizes.iter().product::<usize>() {
            return true;
        }
        let mut seen = HashSet::new();
        !(0..f.sizes[x]).all(|s| seen.insert(projs.iter().map(|&p| f.act(p, s)).collect::<Vec<usize>>()))
    })
}

pub fn is_lax_cartesian(t: &TupleCategory, f: &Presheaf) -> bool {
    lax_cartesian_failure(t, f).is_none()
}

/// A tuple whose multiplication map `F(X_i) -> F((⊗ X_i))` is not a bijection.
pub fn weak_cartesian_failure(t: &TupleCategory, f: &Presheaf) -> Option<Obj> {
    t.cat.objects().find(|&x| {
        let mu = multiplication(t, x);
        let n = f.sizes[x];
        if f.sizes[t.cat.src(mu)] != n {
            return true;
        }
        let mut img: Vec<usize> = (0..n).map(|s| f.act(mu, s)).collect();
        img.sort_unstable();
        img.dedup();
        img.len() != n
    })
}

/// Lax cartesian, and every multiplication map is a bijection.
pub fn is_weak_cartesian(t: &TupleCategory, f: &Presheaf) -> bool {
    is_lax_cartesian(t, f) && weak_cartesian_failure(t, f).is_none()
}

/// The inclusion of the base as singleton tuples.
pub fn singleton_inclusion(t: &TupleCategory) -> FinFunctor {
    let c = &t.base.base;
    FinFunctor {
        obj_map: c.objects().map(|x| t.singleton(x)).collect(),
        mor_map: c
            .morphisms()
            .map(|f| {
                t.coordinatewise(t.singleton(c.src(f)), t.singleton(c.tgt(f)), &[f])
                    .expect("base morphisms are singleton morphisms")
            })
            .collect(),
    }
}

/// Restriction of a presheaf on the tuple category to the base.
pub fn restrict_to_base(t: &TupleCategory, f: &Presheaf) -> Presheaf {
    restrict(&t.base.base, &singleton_inclusion(t), f)
}

struct MultSearch<'a> {
    t: &'a TupleCategory,
    g: &'a Presheaf,
    unit: usize,
    /// Unordered pairs `x <= y` in assignment order.
    pairs: Vec<(Obj, Obj)>,
    tables: Vec<Option<Vec<usize>>>,
    out: Vec<Vec<Vec<usize>>>,
    visited: usize,
    cap: usize,
}

impl MultSearch<'_> {
    fn n(&self) -> usize {
        self.t.base.base.num_objects()
    }

    fn get(&self, x: Obj, y: Obj, s: usize, u: usize) -> Option<usize> {
        let n = self.n();
        if x <= y {
            self.tables[x * n + y].as_ref().map(|tb| tb[s * self.g.sizes[y] + u])
        } else {
            self.tables[y * n + x].as_ref().map(|tb| tb[u * self.g.sizes[x] + s])
        }
    }

    /// Naturality in the first variable along `f: a -> b`, second variable fixed at `y`.
    fn natural(&self, f: Mor, y: Obj) -> bool {
        let (m, c) = (&self.t.base, &self.t.base.base);
        let (a, b) = (c.src(f), c.tgt(f));
        let fy = m.tensor_mor(f, c.identity(y));
        (0..self.g.sizes[b]).all(|s| {
            (0..self.g.sizes[y]).all(|u| match (self.get(b, y, s, u), self.get(a, y, self.g.act(f, s), u)) {
                (Some(top), Some(bottom)) => self.g.act(fy, top) == bottom,
                _ => true,
            })
        })
    }

    fn consistent(&self, x: Obj, y: Obj) -> bool {
        let c = &self.t.base.base;
        [(x, y), (y, x)].iter().all(|&(a, b)| {
            c.incoming(a).iter().chain(c.outgoing(a)).all(|&f| c.is_identity(f) || self.natural(f, b))
        })
    }

    fn candidates(&self, x: Obj, y: Obj) -> Vec<Vec<usize>> {
        let m = &self.t.base;
        let (nx, ny, nz) = (self.g.sizes[x], self.g.sizes[y], self.g.sizes[m.tensor(x, y)]);
        let mut out = vec![Vec::new()];
        for idx in 0..nx * ny {
            let (s, u) = (idx / ny, idx % ny);
            let mut forced = None;
            if x == m.unit && s == self.unit && m.tensor(x, y) == y {
                forced = Some(u);
            }
            if y == m.unit && u == self.unit && m.tensor(x, y) == x {
                if forced.is_some_and(|v| v != s) {
                    return Vec::new();
                }
                forced = Some(s);
            }
            if self.g.pointed && s == 0 && u == 0 {
                if forced.is_some_and(|v| v != 0) {
                    return Vec::new();
                }
                forced = Some(0);
            }
            out = out
                .into_iter()
                .flat_map(|v: Vec<usize>| {
                    let choices: Vec<usize> = match (x == y && u < s, forced) {
                        (true, Some(w)) if v[u * ny + s] != w => vec![],
                        (true, _) => vec![v[u * ny + s]],
                        (false, Some(w)) => vec![w],
                        (false, None) => (0..nz).collect(),
                    };
                    choices.into_iter().map(move |w| {
                        let mut v = v.clone();
                        v.push(w);
                        v
                    })
                })
                .collect();
        }
        out
    }

    fn go(&mut self, k: usize) -> Result<(), SheafError> {
        self.visited += 1;
        if self.visited > self.cap {
            return Err(SheafError::CapExceeded { cap: self.cap });
        }
        if k == self.pairs.len() {
            let n = self.n();
            let full = (0..n * n)
                .map(|i| {
                    let (x, y) = (i / n, i % n);
                    (0..self.g.sizes[x] * self.g.sizes[y])
                        .map(|j| self.get(x, y, j / self.g.sizes[y], j % self.g.sizes[y]).expect("all tables assigned"))
                        .collect()
                })
                .collect();
            self.out.push(full);
            return Ok(());
        }
        let (x, y) = self.pairs[k];
        let slot = x * self.n() + y;
        for cand in self.candidates(x, y) {
            self.tables[slot] = Some(cand);
            if self.consistent(x, y) {
                self.go(k + 1)?;
            }
        }
        self.tables[slot] = None;
        Ok(())
    }
}

/// Every lax structure whose base is one of `bases`, one per isomorphism class.
/// Candidates that fail to extend to a functor are dropped.
pub fn lax_structures_over(
    t: &TupleCategory,
    bases: &[Presheaf],
    cap: usize,
) -> Result<Vec<LaxStructure>, SheafError> {
    let c = &t.base.base;
    let n = c.num_objects();
    let unit_obj = t.base.unit;
    let mut out = Vec::new();
    for g in bases {
        let units: Vec<usize> = if g.pointed { vec![0] } else { (0..g.sizes[unit_obj]).collect() };
        let autos: Vec<Vec<Vec<usize>>> = natural_transformations(c, g, g, usize::MAX)
            .into_iter()
            .filter(|phi| phi.components.iter().all(|v| v.iter().collect::<HashSet<_>>().len() == v.len()))
            .map(|phi| phi.components)
            .collect();
        let mut seen: HashSet<(usize, Vec<Vec<usize>>)> = HashSet::new();
        for unit in units {
            let tables = if t.max_arity >= 2 {
                let mut pairs: Vec<(Obj, Obj)> = (0..n).flat_map(|x| (x..n).map(move |y| (x, y))).collect();
                // Smaller tables first prunes earlier.
                pairs.sort_by_key(|&(x, y)| (g.sizes[x] * g.sizes[y], x, y));
                let mut search = MultSearch { t, g, unit, pairs, tables: vec![None; n * n], out: Vec::new(), visited: 0, cap };
                search.go(0)?;
                search.out
            } else {
                vec![Vec::new()]
            };
            for mult in tables {
                // Canonical representative of the orbit under automorphisms of G.
                let key = autos
                    .iter()
                    .map(|sigma| {
                        let mut m2 = mult.clone();
                        for x in 0..n {
                            for y in 0..n {
                                if mult.is_empty() {
                                    continue;
                                }
                                let z = t.base.tensor(x, y);
                                for s in 0..g.sizes[x] {
                                    for u in 0..g.sizes[y] {
                                        let v = mult[x * n + y][s * g.sizes[y] + u];
                                        m2[x * n + y][sigma[x][s] * g.sizes[y] + sigma[y][u]] = sigma[z][v];
                                    }
                                }
                            }
                        }
                        (sigma[unit_obj][unit], m2)
                    })
                    .min()
                    .expect("the identity is an automorphism");
                if !seen.insert(key) {
                    continue;
                }
                let s = LaxStructure { base: g.clone(), unit, mult };
                if validate_presheaf(&t.cat, &product_extension(t, &s)).ok() {
                    out.push(s);
                }
            }
        }
    }
    Ok(out)
}

/// Lax structures whose base satisfies `cond`, with base carriers bounded by `opts`.
pub fn enumerate_lax_structures(
    t: &TupleCategory,
    cond: SheafCondition<'_>,
    opts: EnumOptions,
) -> Result<Vec<LaxStructure>, SheafError> {
    let bases = enumerate_sheaves(&t.base.base, cond, opts)?;
    lax_structures_over(t, &bases, opts.cap)
}

/// What Lemma-style characterization a tuple-category presheaf meets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CartesianVerdict {
    /// A sheaf that is lax but not weak cartesian.
    LaxMonoidalSheaf,
    /// A sheaf that is weak cartesian.
    StrongMonoidalSheaf,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterizationReport {
    /// From the sheaf condition for the tuple structure on the tuple category.
    pub via_tuple_site: CartesianVerdict,
    /// From the sheaf condition on the base after restricting to singletons.
    pub via_base: CartesianVerdict,
}

impl CharacterizationReport {
    pub fn agree(&self) -> bool {
        self.via_tuple_site == self.via_base
    }
}

fn verdict(sheaf: bool, lax: bool, weak: bool) -> CartesianVerdict {
    match (sheaf && lax, weak) {
        (false, _) => CartesianVerdict::Neither,
        (true, true) => CartesianVerdict::StrongMonoidalSheaf,
        (true, false) => CartesianVerdict::LaxMonoidalSheaf,
    }
}

/// Classifies `f` both ways: as a sheaf for the tuple structure of `p`, and
/// by its restriction to the base being a sheaf for `p`.
pub fn check_char_3_2_1(p: &CdStructure, t: &TupleCategory, f: &Presheaf) -> CharacterizationReport {
    let lax = is_lax_cartesian(t, f);
    let weak = lax && weak_cartesian_failure(t, f).is_none();
    let pt = monoidal_cd(p, t);
    let on_tuples = is_sheaf_squares(&t.cat, &pt, f, false).expect("no initial object needed");
    let on_base = is_sheaf_squares(&t.base.base, p, &restrict_to_base(t, f), false).expect("no initial object needed");
    CharacterizationReport { via_tuple_site: verdict(on_tuples, lax, weak), via_base: verdict(on_base, lax, weak) }
}
