//! Line-oriented site and functor documents.
//!
//! One statement per line, tokens separated by whitespace, `#` at the start
//! of a token comments out the rest of the line. Identities are implicit and
//! named `id_<object>`.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use cdsite::cdstructures::{check_dimension_function, CdStructure, DimensionFunction};
use cdsite::fincat::{validate_category, CategoryBuilder, CategoryError, FinCategory, FinFunctor, Mor, Obj, Square};
use cdsite::monoidal::{meet_monoidal, validate_monoidal, MonoidalData, MonoidalError};
use cdsite::sheaves::{validate_presheaf, Presheaf};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Monoidal(#[from] MonoidalError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismDecl {
    pub name: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonoidalBlock {
    pub unit: String,
    /// The tensor is the meet of a poset; explicit entries are then ignored.
    pub meet: bool,
    pub tensor_objects: Vec<[String; 3]>,
    pub tensor_morphisms: Vec<[String; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresheafBlock {
    pub name: String,
    pub pointed: bool,
    pub sizes: Vec<(String, usize)>,
    /// Image of each element of the value at the target, in order.
    pub actions: Vec<(String, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteDocument {
    pub format_version: u32,
    pub name: String,
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismDecl>,
    /// `[g, f, h]` declares `g ∘ f = h`.
    pub compositions: Vec<[String; 3]>,
    pub monoidal: Option<MonoidalBlock>,
    /// Corners `ul ur ll lr` then arrows `top left p e`.
    pub squares: Vec<[String; 8]>,
    pub dimension: Vec<(String, i64)>,
    pub presheaves: Vec<PresheafBlock>,
}

struct Token<'a> {
    text: &'a str,
    col: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => {
                if ch == '#' {
                    break;
                }
                start = Some(i);
            }
            (true, Some(s)) => {
                out.push(Token { text: &line[s..i], col: line[..s].chars().count() + 1 });
                start = None;
            }
            _ => {}
        }
    }
    out
}

struct Cursor<'a> {
    line: usize,
    tokens: Vec<Token<'a>>,
}

impl<'a> Cursor<'a> {
    fn err(&self, idx: usize, msg: impl Into<String>) -> InputError {
        let col = self.tokens.get(idx).or(self.tokens.last()).map_or(1, |t| t.col);
        InputError::Syntax { line: self.line, col, msg: msg.into() }
    }

    fn arity(&self, n: usize) -> Result<(), InputError> {
        let got = self.tokens.len() - 1;
        if got != n {
            let idx = if got > n { n + 1 } else { got };
            return Err(self.err(idx, format!("`{}` takes {n} arguments, found {got}", self.tokens[0].text)));
        }
        Ok(())
    }

    fn arg(&self, i: usize) -> String {
        self.tokens[i].text.to_string()
    }

    fn number<T: std::str::FromStr>(&self, i: usize) -> Result<T, InputError> {
        self.tokens[i].text.parse().map_err(|_| self.err(i, format!("expected a number, found `{}`", self.tokens[i].text)))
    }
}

/// Names known to the document, for reference checks with positions.
struct Names {
    objects: HashSet<String>,
    morphisms: HashSet<String>,
}

impl Names {
    fn object(&self, c: &Cursor<'_>, i: usize) -> Result<String, InputError> {
        let s = c.arg(i);
        if self.objects.contains(&s) {
            Ok(s)
        } else {
            Err(c.err(i, format!("unknown object `{s}`")))
        }
    }

    fn morphism(&self, c: &Cursor<'_>, i: usize) -> Result<String, InputError> {
        let s = c.arg(i);
        if self.morphisms.contains(&s) || s.strip_prefix("id_").is_some_and(|o| self.objects.contains(o)) {
            Ok(s)
        } else {
            Err(c.err(i, format!("unknown morphism `{s}`")))
        }
    }
}

fn cursors(text: &str) -> Vec<Cursor<'_>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| Cursor { line: i + 1, tokens: tokenize(l) })
        .filter(|c| !c.tokens.is_empty())
        .collect()
}

fn expect_format(lines: &[Cursor<'_>]) -> Result<(), InputError> {
    let Some(first) = lines.first() else {
        return Err(InputError::Syntax { line: 1, col: 1, msg: "empty document".into() });
    };
    if first.tokens[0].text != "format" {
        return Err(first.err(0, "document must start with `format`"));
    }
    first.arity(1)?;
    let v: u32 = first.number(1)?;
    if v != FORMAT_VERSION {
        return Err(first.err(1, format!("unsupported format version {v}")));
    }
    Ok(())
}

pub fn parse_site(text: &str) -> Result<SiteDocument, InputError> {
    let lines = cursors(text);
    expect_format(&lines)?;
    let mut doc = SiteDocument {
        format_version: FORMAT_VERSION,
        name: String::new(),
        objects: Vec::new(),
        morphisms: Vec::new(),
        compositions: Vec::new(),
        monoidal: None,
        squares: Vec::new(),
        dimension: Vec::new(),
        presheaves: Vec::new(),
    };
    // Declarations first so that references may precede them.
    let mut names = Names { objects: HashSet::new(), morphisms: HashSet::new() };
    for c in &lines[1..] {
        match c.tokens[0].text {
            "objects" => {
                for i in 1..c.tokens.len() {
                    let o = c.arg(i);
                    if !names.objects.insert(o.clone()) {
                        return Err(c.err(i, format!("duplicate object `{o}`")));
                    }
                    doc.objects.push(o);
                }
            }
            "morphism" => {
                c.arity(3)?;
                let m = c.arg(1);
                if m.starts_with("id_") {
                    return Err(c.err(1, "names starting with `id_` are reserved for identities"));
                }
                if !names.morphisms.insert(m.clone()) {
                    return Err(c.err(1, format!("duplicate morphism `{m}`")));
                }
            }
            _ => {}
        }
    }
    let mut open: Option<PresheafBlock> = None;
    for c in &lines[1..] {
        let key = c.tokens[0].text;
        if let Some(block) = open.as_mut() {
            match key {
                "size" => {
                    c.arity(2)?;
                    block.sizes.push((names.object(c, 1)?, c.number(2)?));
                }
                "action" => {
                    if c.tokens.len() < 2 {
                        return Err(c.err(0, "`action` needs a morphism"));
                    }
                    let m = names.morphism(c, 1)?;
                    let img = (2..c.tokens.len()).map(|i| c.number(i)).collect::<Result<_, _>>()?;
                    block.actions.push((m, img));
                }
                "end" => {
                    c.arity(0)?;
                    doc.presheaves.push(open.take().expect("inside a block"));
                }
                _ => return Err(c.err(0, format!("`{key}` is not allowed inside a presheaf block"))),
            }
            continue;
        }
        match key {
            "objects" => {}
            "site" => {
                c.arity(1)?;
                doc.name = c.arg(1);
            }
            "morphism" => {
                c.arity(3)?;
                doc.morphisms.push(MorphismDecl { name: c.arg(1), src: names.object(c, 2)?, tgt: names.object(c, 3)? });
            }
            "compose" => {
                c.arity(3)?;
                doc.compositions.push([names.morphism(c, 1)?, names.morphism(c, 2)?, names.morphism(c, 3)?]);
            }
            "unit" => {
                c.arity(1)?;
                let unit = names.object(c, 1)?;
                match doc.monoidal.as_mut() {
                    Some(m) if !m.unit.is_empty() => return Err(c.err(0, "unit declared twice")),
                    Some(m) => m.unit = unit,
                    None => doc.monoidal = Some(MonoidalBlock { unit, ..Default::default() }),
                }
            }
            "meet" => {
                c.arity(0)?;
                doc.monoidal.get_or_insert_with(Default::default).meet = true;
            }
            "tensor" => {
                c.arity(3)?;
                let e = [names.object(c, 1)?, names.object(c, 2)?, names.object(c, 3)?];
                doc.monoidal.get_or_insert_with(Default::default).tensor_objects.push(e);
            }
            "tensor_mor" => {
                c.arity(3)?;
                let e = [names.morphism(c, 1)?, names.morphism(c, 2)?, names.morphism(c, 3)?];
                doc.monoidal.get_or_insert_with(Default::default).tensor_morphisms.push(e);
            }
            "square" => {
                c.arity(8)?;
                let mut sq: [String; 8] = Default::default();
                for (i, slot) in sq.iter_mut().enumerate() {
                    *slot = if i < 4 { names.object(c, i + 1)? } else { names.morphism(c, i + 1)? };
                }
                doc.squares.push(sq);
            }
            "dim" => {
                c.arity(2)?;
                doc.dimension.push((names.object(c, 1)?, c.number(2)?));
            }
            "presheaf" => {
                let pointed = match c.tokens.len() {
                    2 => false,
                    3 if c.tokens[2].text == "pointed" => true,
                    _ => return Err(c.err(2, "expected `presheaf NAME [pointed]`")),
                };
                open = Some(PresheafBlock { name: c.arg(1), pointed, sizes: Vec::new(), actions: Vec::new() });
            }
            "format" => return Err(c.err(0, "`format` may only appear once, first")),
            _ => return Err(c.err(0, format!("unknown key `{key}`"))),
        }
    }
    if let Some(b) = open {
        return Err(InputError::Invalid(format!("presheaf `{}` is missing `end`", b.name)));
    }
    if doc.name.is_empty() {
        return Err(InputError::Invalid("missing `site` name".into()));
    }
    if doc.monoidal.as_ref().is_some_and(|m| m.unit.is_empty()) {
        return Err(InputError::Invalid("monoidal data without a `unit`".into()));
    }
    Ok(doc)
}

pub fn emit_site(doc: &SiteDocument) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "format {}", doc.format_version);
    let _ = writeln!(s, "site {}", doc.name);
    if !doc.objects.is_empty() {
        let _ = writeln!(s, "objects {}", doc.objects.join(" "));
    }
    for m in &doc.morphisms {
        let _ = writeln!(s, "morphism {} {} {}", m.name, m.src, m.tgt);
    }
    for [g, f, h] in &doc.compositions {
        let _ = writeln!(s, "compose {g} {f} {h}");
    }
    if let Some(m) = &doc.monoidal {
        let _ = writeln!(s, "unit {}", m.unit);
        if m.meet {
            let _ = writeln!(s, "meet");
        }
        for [x, y, z] in &m.tensor_objects {
            let _ = writeln!(s, "tensor {x} {y} {z}");
        }
        for [f, g, h] in &m.tensor_morphisms {
            let _ = writeln!(s, "tensor_mor {f} {g} {h}");
        }
    }
    for sq in &doc.squares {
        let _ = writeln!(s, "square {}", sq.join(" "));
    }
    for (x, d) in &doc.dimension {
        let _ = writeln!(s, "dim {x} {d}");
    }
    for p in &doc.presheaves {
        s.push_str(&emit_presheaf_block(p));
    }
    s
}

pub fn emit_presheaf_block(p: &PresheafBlock) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "presheaf {}{}", p.name, if p.pointed { " pointed" } else { "" });
    for (x, n) in &p.sizes {
        let _ = writeln!(s, "size {x} {n}");
    }
    for (m, img) in &p.actions {
        let _ = write!(s, "action {m}");
        for v in img {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    s.push_str("end\n");
    s
}

/// A document resolved against the library's structures.
#[derive(Clone, Debug)]
pub struct Site {
    pub doc: SiteDocument,
    pub cat: FinCategory,
    pub monoidal: Option<MonoidalData>,
    pub p: CdStructure,
    pub dim: Option<DimensionFunction>,
    pub presheaves: Vec<(String, Presheaf)>,
}

impl Site {
    pub fn presheaf(&self, name: &str) -> Result<&Presheaf, InputError> {
        self.presheaves
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| p)
            .ok_or_else(|| InputError::Invalid(format!("no presheaf named `{name}`")))
    }

    pub fn require_monoidal(&self) -> Result<&MonoidalData, InputError> {
        self.monoidal.as_ref().ok_or_else(|| InputError::Invalid(format!("site `{}` has no monoidal data", self.doc.name)))
    }

    pub fn require_dim(&self) -> Result<&DimensionFunction, InputError> {
        self.dim.as_ref().ok_or_else(|| InputError::Invalid(format!("site `{}` has no dimension function", self.doc.name)))
    }
}

pub fn build_site(doc: SiteDocument) -> Result<Site, InputError> {
    let mut b = CategoryBuilder::new();
    for o in &doc.objects {
        b.push_object(o);
    }
    for m in &doc.morphisms {
        b.push_morphism(&m.name, &m.src, &m.tgt);
    }
    for [g, f, h] in &doc.compositions {
        b.push_compose(g, f, h);
    }
    let cat = b.build()?;
    let report = validate_category(&cat);
    if !report.ok() {
        return Err(InputError::Invalid(format!("category is invalid: {report}")));
    }
    let monoidal = doc.monoidal.as_ref().map(|m| build_monoidal(&cat, m)).transpose()?;
    let mut squares = Vec::new();
    for sq in &doc.squares {
        let id = |i: usize| cat.morphism_id(&sq[i]);
        let square = Square { top: id(4)?, left: id(5)?, p: id(6)?, e: id(7)? };
        square.check(&cat)?;
        let corners = [square.ul(&cat), square.ur(&cat), square.ll(&cat), square.lr(&cat)];
        for (i, &x) in corners.iter().enumerate() {
            if cat.object_name(x) != sq[i] {
                return Err(InputError::Invalid(format!(
                    "square {} has corner {} where `{}` is declared",
                    sq[4..].join(" "),
                    cat.object_name(x),
                    sq[i]
                )));
            }
        }
        squares.push(square);
    }
    let p = CdStructure::new(&cat, squares)?;
    let dim = if doc.dimension.is_empty() {
        None
    } else {
        let mut values = vec![None; cat.num_objects()];
        for (x, d) in &doc.dimension {
            values[cat.object_id(x)?] = Some(*d);
        }
        let values = cat
            .objects()
            .map(|x| values[x].ok_or_else(|| InputError::Invalid(format!("no dimension for `{}`", cat.object_name(x)))))
            .collect::<Result<_, _>>()?;
        let d = DimensionFunction { values };
        match check_dimension_function(&cat, &d) {
            Ok(true) => Some(d),
            Ok(false) => return Err(InputError::Invalid("dimension function is invalid".into())),
            Err(e) => return Err(InputError::Invalid(format!("dimension function: {e}"))),
        }
    };
    let presheaves = doc
        .presheaves
        .iter()
        .map(|b| Ok((b.name.clone(), build_presheaf(&cat, b)?)))
        .collect::<Result<_, InputError>>()?;
    Ok(Site { doc, cat, monoidal, p, dim, presheaves })
}

fn build_monoidal(cat: &FinCategory, m: &MonoidalBlock) -> Result<MonoidalData, InputError> {
    let unit = cat.object_id(&m.unit)?;
    if m.meet {
        return Ok(meet_monoidal(cat, unit)?);
    }
    let (n, k) = (cat.num_objects(), cat.num_morphisms());
    let mut obj: Vec<Option<Obj>> = vec![None; n * n];
    for [x, y, z] in &m.tensor_objects {
        obj[cat.object_id(x)? * n + cat.object_id(y)?] = Some(cat.object_id(z)?);
    }
    let mut missing = Vec::new();
    for x in cat.objects() {
        for y in cat.objects() {
            if obj[x * n + y].is_none() {
                missing.push(format!("{} ⊗ {}", cat.object_name(x), cat.object_name(y)));
            }
        }
    }
    if !missing.is_empty() {
        return Err(InputError::Invalid(format!("tensor missing for {}", missing.join(", "))));
    }
    let obj: Vec<Obj> = obj.into_iter().map(|o| o.expect("checked above")).collect();
    let mut mor: HashMap<(Mor, Mor), Mor> = HashMap::new();
    for [f, g, h] in &m.tensor_morphisms {
        mor.insert((cat.morphism_id(f)?, cat.morphism_id(g)?), cat.morphism_id(h)?);
    }
    let is_id = |f: Mor| cat.identity(cat.src(f)) == f;
    for f in 0..k {
        for g in 0..k {
            if !mor.contains_key(&(f, g)) && !(is_id(f) && is_id(g)) {
                missing.push(format!("{} ⊗ {}", cat.morphism_name(f), cat.morphism_name(g)));
            }
        }
    }
    if !missing.is_empty() {
        return Err(InputError::Invalid(format!("tensor missing for {}", missing.join(", "))));
    }
    let data = MonoidalData::from_fn(
        cat.clone(),
        unit,
        |x, y| obj[x * n + y],
        |f, g| mor.get(&(f, g)).copied().unwrap_or_else(|| cat.identity(obj[cat.src(f) * n + cat.src(g)])),
    );
    let r = validate_monoidal(&data);
    if !r.ok() {
        return Err(InputError::Invalid(format!("monoidal data is invalid: {r}")));
    }
    Ok(data)
}

fn build_presheaf(cat: &FinCategory, b: &PresheafBlock) -> Result<Presheaf, InputError> {
    let ctx = |msg: String| InputError::Invalid(format!("presheaf `{}`: {msg}", b.name));
    let mut sizes = vec![None; cat.num_objects()];
    for (x, n) in &b.sizes {
        sizes[cat.object_id(x)?] = Some(*n);
    }
    let sizes: Vec<usize> = cat
        .objects()
        .map(|x| sizes[x].ok_or_else(|| ctx(format!("no size for `{}`", cat.object_name(x)))))
        .collect::<Result<_, _>>()?;
    let mut actions: Vec<Option<Vec<usize>>> =
        cat.morphisms().map(|f| (cat.identity(cat.src(f)) == f).then(|| (0..sizes[cat.src(f)]).collect())).collect();
    for (m, img) in &b.actions {
        actions[cat.morphism_id(m)?] = Some(img.clone());
    }
    let actions = cat
        .morphisms()
        .map(|f| actions[f].clone().ok_or_else(|| ctx(format!("no action for `{}`", cat.morphism_name(f)))))
        .collect::<Result<_, _>>()?;
    let p = Presheaf { sizes, actions, pointed: b.pointed };
    let r = validate_presheaf(cat, &p);
    if !r.ok() {
        return Err(ctx(format!("{r}")));
    }
    Ok(p)
}

/// Name used in documents for a morphism: identities are always `id_<object>`.
fn doc_name(c: &FinCategory, f: Mor) -> String {
    if c.identity(c.src(f)) == f {
        format!("id_{}", c.object_name(c.src(f)))
    } else {
        c.morphism_name(f).to_string()
    }
}

pub fn presheaf_block(c: &FinCategory, name: &str, p: &Presheaf) -> PresheafBlock {
    PresheafBlock {
        name: name.to_string(),
        pointed: p.pointed,
        sizes: c.objects().map(|x| (c.object_name(x).to_string(), p.sizes[x])).collect(),
        actions: c
            .morphisms()
            .filter(|&f| c.identity(c.src(f)) != f)
            .map(|f| (doc_name(c, f), p.actions[f].clone()))
            .collect(),
    }
}

/// A complete document for a category with optional structure; tensors are written as explicit tables.
pub fn document_from(
    name: &str,
    c: &FinCategory,
    m: Option<&MonoidalData>,
    p: &CdStructure,
    dim: Option<&DimensionFunction>,
) -> SiteDocument {
    let is_id = |f: Mor| c.identity(c.src(f)) == f;
    let morphisms = c
        .morphisms()
        .filter(|&f| !is_id(f))
        .map(|f| MorphismDecl {
            name: doc_name(c, f),
            src: c.object_name(c.src(f)).to_string(),
            tgt: c.object_name(c.tgt(f)).to_string(),
        })
        .collect();
    let mut compositions = Vec::new();
    for y in c.objects() {
        for &f in c.incoming(y) {
            for &g in c.outgoing(y) {
                if !is_id(f) && !is_id(g) {
                    compositions.push([doc_name(c, g), doc_name(c, f), doc_name(c, c.compose(g, f))]);
                }
            }
        }
    }
    let monoidal = m.map(|m| MonoidalBlock {
        unit: c.object_name(m.unit).to_string(),
        meet: false,
        tensor_objects: c
            .objects()
            .flat_map(|x| c.objects().map(move |y| (x, y)))
            .map(|(x, y)| [x, y, m.tensor(x, y)].map(|o| c.object_name(o).to_string()))
            .collect(),
        tensor_morphisms: c
            .morphisms()
            .flat_map(|f| c.morphisms().map(move |g| (f, g)))
            .filter(|&(f, g)| !(is_id(f) && is_id(g)))
            .map(|(f, g)| [doc_name(c, f), doc_name(c, g), doc_name(c, m.tensor_mor(f, g))])
            .collect(),
    });
    SiteDocument {
        format_version: FORMAT_VERSION,
        name: name.to_string(),
        objects: c.objects().map(|x| c.object_name(x).to_string()).collect(),
        morphisms,
        compositions,
        monoidal,
        squares: p.squares().iter().map(|sq| square_entry(c, sq)).collect(),
        dimension: dim
            .map(|d| c.objects().map(|x| (c.object_name(x).to_string(), d.get(x))).collect())
            .unwrap_or_default(),
        presheaves: Vec::new(),
    }
}

pub fn square_entry(c: &FinCategory, sq: &Square) -> [String; 8] {
    let corners = [sq.ul(c), sq.ur(c), sq.ll(c), sq.lr(c)].map(|x| c.object_name(x).to_string());
    let arrows = [sq.top, sq.left, sq.p, sq.e].map(|f| doc_name(c, f));
    let mut out: [String; 8] = Default::default();
    for (slot, v) in out.iter_mut().zip(corners.into_iter().chain(arrows)) {
        *slot = v;
    }
    out
}

/// A functor between two sites: object pairs then morphism pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorDocument {
    pub objects: Vec<(String, String)>,
    pub morphisms: Vec<(String, String)>,
}

pub fn parse_functor(text: &str) -> Result<FunctorDocument, InputError> {
    let lines = cursors(text);
    expect_format(&lines)?;
    let mut doc = FunctorDocument { objects: Vec::new(), morphisms: Vec::new() };
    for c in &lines[1..] {
        match c.tokens[0].text {
            "object" => {
                c.arity(2)?;
                doc.objects.push((c.arg(1), c.arg(2)));
            }
            "morphism" => {
                c.arity(2)?;
                doc.morphisms.push((c.arg(1), c.arg(2)));
            }
            k => return Err(c.err(0, format!("unknown key `{k}`"))),
        }
    }
    Ok(doc)
}

pub fn emit_functor(doc: &FunctorDocument) -> String {
    let mut s = format!("format {FORMAT_VERSION}\n");
    for (a, b) in &doc.objects {
        let _ = writeln!(s, "object {a} {b}");
    }
    for (a, b) in &doc.morphisms {
        let _ = writeln!(s, "morphism {a} {b}");
    }
    s
}

pub fn build_functor(doc: &FunctorDocument, src: &FinCategory, tgt: &FinCategory) -> Result<FinFunctor, InputError> {
    let objs: Vec<(&str, &str)> = doc.objects.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let mors: Vec<(&str, &str)> = doc.morphisms.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    Ok(FinFunctor::from_names(src, tgt, &objs, &mors)?)
}
