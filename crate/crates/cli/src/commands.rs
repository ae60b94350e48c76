//! Subcommand definitions and their reports.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use cdsite::cdstructures::{
    check_dim_compatible, generate_simple_covers, induced_dimension, is_tensor_stable, monoidal_cd, tensor_counterexamples,
    tensor_saturate, CdError, Search,
};
use cdsite::comparison::{
    check_5_2_2, check_comparison_sites, check_remark_5_2_3, harness_4_0_3, zero_completion, ComparisonError, MonoidalSite,
    TransferVerdict,
};
use cdsite::fincat::{CategoryError, FinCategory, FinFunctor};
use cdsite::monoidal::{build_tuple_category, MonoidalError};
use cdsite::sheaves::{
    enumerate_sheaves, equivalence_report, is_weak_cartesian, lax_structures_over, product_extension, EnumOptions, Presheaf,
    SheafCondition, SheafError, DEFAULT_ENUM_CAP,
};
use cdsite::topology::{
    check_criterion_3_1_5, check_criterion_3_1_7, covering_sieves, generate_topology, is_c_complete, is_c_regular,
    is_complete, CompletenessReport, Mode, Sieve, Topology, TopologyError, SIEVE_CAP_VAR,
};

use crate::document::{
    build_functor, build_site, document_from, emit_presheaf_block, emit_site, parse_functor, parse_site, presheaf_block,
    square_entry, InputError, Site,
};
use crate::report::{Report, Verdict};

#[derive(Debug, Parser)]
#[command(
    name = "cdsite",
    version,
    about = "Checks finite sites with cd-structures",
    after_help = "Exit status: 0 pass, 1 conclusive failure, 2 inconclusive (a cap was hit), 3 input error.\n\
                  Environment: CDSITE_SIEVE_CAP overrides the cap on explicitly listed covering sieves (default 64)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Coarse,
    Full,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Coarse => Mode::Coarse,
            ModeArg::Full => Mode::Full,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Property {
    CComplete,
    Complete,
    CRegular,
    TensorStable,
    DimCompat,
    #[value(name = "criterion-3-1-5")]
    Criterion315,
    #[value(name = "criterion-3-1-7")]
    Criterion317,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ConditionArg {
    None,
    Sieves,
    Squares,
}

#[derive(Debug, Args)]
pub struct Pair {
    /// Source site.
    pub source: PathBuf,
    /// Target site.
    pub target: PathBuf,
    /// Functor map: `object` pairs then `morphism` pairs.
    #[arg(long)]
    pub functor: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parses a site and validates every block.
    Validate { site: PathBuf },
    /// Least covering sieve of each object.
    Topology {
        site: PathBuf,
        #[arg(long, value_enum, default_value = "coarse")]
        mode: ModeArg,
        /// Also list every covering sieve, up to the sieve cap.
        #[arg(long)]
        list: bool,
    },
    /// Simple covers of one object up to a nesting depth.
    Covers {
        site: PathBuf,
        #[arg(long)]
        object: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Decides one property of the site's cd-structure.
    Check {
        #[arg(value_enum)]
        property: Property,
        site: PathBuf,
    },
    /// Emits the site with its cd-structure closed under tensoring.
    Saturate { site: PathBuf },
    /// Emits the tuple site of the given arity with its tuple cd-structure and dimensions.
    Tensorize {
        site: PathBuf,
        #[arg(long, default_value_t = 2)]
        arity: usize,
    },
    /// Enumerates sheaves up to isomorphism.
    Sheaves {
        site: PathBuf,
        #[arg(long, default_value_t = 1)]
        max_card: usize,
        #[arg(long, value_enum, default_value = "squares")]
        condition: ConditionArg,
        #[arg(long, value_enum, default_value = "coarse")]
        mode: ModeArg,
        #[arg(long)]
        pointed: bool,
        #[arg(long, conflicts_with = "list")]
        count: bool,
        #[arg(long)]
        list: bool,
    },
    /// Cartesian structures over a presheaf declared in the site.
    Cartesian {
        site: PathBuf,
        #[arg(long)]
        presheaf: String,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        /// Pass when some structure exists (the default).
        #[arg(long, conflicts_with = "weak")]
        lax: bool,
        /// Pass when some structure is weak cartesian.
        #[arg(long)]
        weak: bool,
    },
    /// The five comparison conditions for a functor between sites.
    Compare {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_enum, default_value = "coarse")]
        mode: ModeArg,
    },
    /// Restriction of sheaves along a functor, checked by enumeration.
    VerifyEquivalence {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 2)]
        max_card: usize,
    },
    /// Hypotheses on both sites, then the comparison conditions on tuple sites.
    #[command(name = "harness-4-0-3")]
    Harness403 {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 2)]
        arity: usize,
    },
    /// Emits the site with a zero morphism added for every pair whose source is not initial.
    ZeroComplete { site: PathBuf },
    /// Restriction along the inclusion into the zero completion on lax structures.
    #[command(name = "check-5-2-2")]
    Check522 {
        site: PathBuf,
        #[arg(long, default_value_t = 1)]
        arity: usize,
        #[arg(long, default_value_t = 2)]
        max_card: usize,
    },
    /// Weak structures on the zero completion with a point at the initial object are trivial.
    #[command(name = "check-remark-5-2-3")]
    CheckRemark523 {
        site: PathBuf,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[arg(long, default_value_t = 2)]
        max_card: usize,
    },
}

/// Why a command could not produce a verdict from its search.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Cap(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<CategoryError> for Failure {
    fn from(e: CategoryError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<MonoidalError> for Failure {
    fn from(e: MonoidalError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<SheafError> for Failure {
    fn from(e: SheafError) -> Self {
        match e {
            SheafError::CapExceeded { .. } => Failure::Cap(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<TopologyError> for Failure {
    fn from(e: TopologyError) -> Self {
        match e {
            TopologyError::TooManySieves { .. } => Failure::Cap(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<CdError> for Failure {
    fn from(e: CdError) -> Self {
        match e {
            CdError::CapExceeded { .. } => Failure::Cap(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<ComparisonError> for Failure {
    fn from(e: ComparisonError) -> Self {
        match e {
            ComparisonError::Sheaf(e) => e.into(),
            ComparisonError::Topology(e) => e.into(),
            e => Failure::Input(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path, text: &str) -> Result<Site, Failure> {
    let doc = parse_site(text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    build_site(doc).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Runs a command to a report; `Err` means an input error.
pub fn execute(cli: &Cli) -> Result<Report, String> {
    let paths = input_paths(&cli.command);
    let texts = paths.iter().map(|p| read(p)).collect::<Result<Vec<_>, _>>().map_err(|f| match f {
        Failure::Input(m) | Failure::Cap(m) => m,
    })?;
    let bytes: Vec<&[u8]> = texts.iter().map(|t| t.as_bytes()).collect();
    let mut report = Report::new(command_line(&cli.command), &bytes);
    match run(&cli.command, &paths, &texts, &mut report) {
        Ok(()) => Ok(report),
        Err(Failure::Cap(msg)) => {
            report.verdict = Verdict::Inconclusive;
            report.document = None;
            report.field("reason", msg);
            Ok(report)
        }
        Err(Failure::Input(msg)) => Err(msg),
    }
}

fn input_paths(cmd: &Command) -> Vec<PathBuf> {
    match cmd {
        Command::Validate { site }
        | Command::Topology { site, .. }
        | Command::Covers { site, .. }
        | Command::Check { site, .. }
        | Command::Saturate { site }
        | Command::Tensorize { site, .. }
        | Command::Sheaves { site, .. }
        | Command::Cartesian { site, .. }
        | Command::ZeroComplete { site }
        | Command::Check522 { site, .. }
        | Command::CheckRemark523 { site, .. } => vec![site.clone()],
        Command::Compare { pair, .. } | Command::VerifyEquivalence { pair, .. } | Command::Harness403 { pair, .. } => {
            vec![pair.source.clone(), pair.target.clone(), pair.functor.clone()]
        }
    }
}

fn command_line(cmd: &Command) -> String {
    let name = match cmd {
        Command::Validate { .. } => "validate".to_string(),
        Command::Topology { mode, .. } => format!("topology --mode {}", mode_name(*mode)),
        Command::Covers { object, depth, .. } => format!("covers --object {object} --depth {depth}"),
        Command::Check { property, .. } => format!("check {}", property.to_possible_value().expect("named").get_name()),
        Command::Saturate { .. } => "saturate".to_string(),
        Command::Tensorize { arity, .. } => format!("tensorize --arity {arity}"),
        Command::Sheaves { max_card, condition, .. } => {
            format!("sheaves --max-card {max_card} --condition {}", condition.to_possible_value().expect("named").get_name())
        }
        Command::Cartesian { presheaf, arity, weak, .. } => {
            format!("cartesian --presheaf {presheaf} --arity {arity} --{}", if *weak { "weak" } else { "lax" })
        }
        Command::Compare { mode, .. } => format!("compare --mode {}", mode_name(*mode)),
        Command::VerifyEquivalence { max_card, .. } => format!("verify-equivalence --max-card {max_card}"),
        Command::Harness403 { arity, .. } => format!("harness-4-0-3 --arity {arity}"),
        Command::ZeroComplete { .. } => "zero-complete".to_string(),
        Command::Check522 { arity, max_card, .. } => format!("check-5-2-2 --arity {arity} --max-card {max_card}"),
        Command::CheckRemark523 { arity, max_card, .. } => {
            format!("check-remark-5-2-3 --arity {arity} --max-card {max_card}")
        }
    };
    name
}

fn mode_name(m: ModeArg) -> &'static str {
    match m {
        ModeArg::Coarse => "coarse",
        ModeArg::Full => "full",
    }
}

fn sieve_text(c: &FinCategory, s: &Sieve) -> String {
    format!("{{{}}}", s.names(c).join(", "))
}

fn legs_text(c: &FinCategory, legs: &[usize]) -> String {
    let names: Vec<&str> = legs.iter().map(|&f| c.morphism_name(f)).collect();
    format!("{{{}}}", names.join(", "))
}

fn square_text(c: &FinCategory, sq: &cdsite::fincat::Square) -> String {
    square_entry(c, sq)[4..].join(" ")
}

/// Sizes then non-identity actions on one line.
fn presheaf_text(c: &FinCategory, p: &Presheaf) -> String {
    let sizes: Vec<String> = c.objects().map(|x| format!("{}={}", c.object_name(x), p.sizes[x])).collect();
    let actions: Vec<String> = c
        .morphisms()
        .filter(|&f| c.identity(c.src(f)) != f)
        .map(|f| {
            let img: Vec<String> = p.actions[f].iter().map(usize::to_string).collect();
            format!("{}=[{}]", c.morphism_name(f), img.join(","))
        })
        .collect();
    format!("{} | {}", sizes.join(" "), actions.join(" "))
}

fn run(cmd: &Command, paths: &[PathBuf], texts: &[String], r: &mut Report) -> Result<(), Failure> {
    match cmd {
        Command::Validate { .. } => validate(&paths[0], &texts[0], r),
        Command::Topology { mode, list, .. } => {
            let s = load(&paths[0], &texts[0])?;
            let t = generate_topology(&s.cat, &s.p, (*mode).into())?;
            for x in s.cat.objects() {
                r.field(&format!("least_cover {}", s.cat.object_name(x)), sieve_text(&s.cat, t.least_cover(x)));
            }
            if *list {
                for x in s.cat.objects() {
                    for sv in covering_sieves(&s.cat, &t, x)? {
                        r.field(&format!("covering_sieve {}", s.cat.object_name(x)), sieve_text(&s.cat, &sv));
                    }
                }
            }
            Ok(())
        }
        Command::Covers { object, depth, .. } => {
            let s = load(&paths[0], &texts[0])?;
            let x = s.cat.object_id(object)?;
            let covers = generate_simple_covers(&s.cat, &s.p, x, *depth)?;
            r.field("count", covers.len());
            for u in &covers {
                r.field("cover", legs_text(&s.cat, &u.legs));
            }
            Ok(())
        }
        Command::Check { property, .. } => {
            let s = load(&paths[0], &texts[0])?;
            check(*property, &s, r)
        }
        Command::Saturate { .. } => {
            let s = load(&paths[0], &texts[0])?;
            let m = s.require_monoidal()?;
            let sat = tensor_saturate(&s.p, m);
            let mut doc = s.doc.clone();
            doc.squares = sat.squares().iter().map(|sq| square_entry(&s.cat, sq)).collect();
            r.field("squares", doc.squares.len());
            r.document = Some(emit_site(&doc));
            Ok(())
        }
        Command::Tensorize { arity, .. } => {
            let s = load(&paths[0], &texts[0])?;
            let m = s.require_monoidal()?;
            let t = build_tuple_category(m, *arity)?;
            let pt = monoidal_cd(&s.p, &t);
            let dim = s.dim.as_ref().map(|d| induced_dimension(d, &t));
            let doc = document_from(&format!("{}_tuples_{arity}", s.doc.name), &t.cat, None, &pt, dim.as_ref());
            r.field("objects", t.cat.num_objects());
            r.field("morphisms", t.cat.num_morphisms());
            r.field("squares", pt.len());
            r.document = Some(emit_site(&doc));
            Ok(())
        }
        Command::Sheaves { max_card, condition, mode, pointed, list, .. } => {
            let s = load(&paths[0], &texts[0])?;
            let t;
            let cond = match condition {
                ConditionArg::None => SheafCondition::None,
                ConditionArg::Sieves => {
                    t = generate_topology(&s.cat, &s.p, (*mode).into())?;
                    SheafCondition::Sieves(&t)
                }
                ConditionArg::Squares => SheafCondition::Squares { p: &s.p, require_empty: matches!(mode, ModeArg::Full) },
            };
            let opts = if *pointed { EnumOptions::pointed(*max_card) } else { EnumOptions::new(*max_card) };
            let found = enumerate_sheaves(&s.cat, cond, opts)?;
            r.field("count", found.len());
            if *list {
                let blocks: String =
                    found.iter().enumerate().map(|(i, f)| emit_presheaf_block(&presheaf_block(&s.cat, &format!("F{i}"), f))).collect();
                r.document = Some(blocks);
            }
            Ok(())
        }
        Command::Cartesian { presheaf, arity, weak, .. } => {
            let s = load(&paths[0], &texts[0])?;
            let m = s.require_monoidal()?;
            let base = s.presheaf(presheaf)?.clone();
            let t = build_tuple_category(m, *arity)?;
            let structures = lax_structures_over(&t, &[base], DEFAULT_ENUM_CAP)?;
            let weak_count = structures.iter().filter(|st| is_weak_cartesian(&t, &product_extension(&t, st))).count();
            r.field("lax_structures", structures.len());
            r.field("weak_structures", weak_count);
            r.verdict = Verdict::from_bool(if *weak { weak_count > 0 } else { !structures.is_empty() });
            Ok(())
        }
        Command::Compare { mode, .. } => {
            let (src, tgt, f) = load_pair(paths, texts)?;
            let mode: Mode = (*mode).into();
            let rep = check_comparison_sites(&src.cat, &tgt.cat, &f, (&src.p, mode), (&tgt.p, mode))?;
            comparison_fields(&rep, r);
            r.verdict = Verdict::from_bool(rep.holds());
            Ok(())
        }
        Command::VerifyEquivalence { max_card, .. } => {
            let (src, tgt, f) = load_pair(paths, texts)?;
            let ts: Topology = generate_topology(&src.cat, &src.p, Mode::Coarse)?;
            let tt: Topology = generate_topology(&tgt.cat, &tgt.p, Mode::Coarse)?;
            let e = equivalence_report(
                &src.cat,
                &tgt.cat,
                &f,
                SheafCondition::Sieves(&ts),
                SheafCondition::Sieves(&tt),
                EnumOptions::new(*max_card),
            )?;
            r.field("fully_faithful", e.fully_faithful);
            r.field("essentially_surjective_within_bound", e.essentially_surjective_within_bound);
            r.field("preimages_within_bound", e.preimages_within_bound);
            r.field("bound", e.bound);
            r.field("target_sheaves", e.target_sheaves);
            r.field("source_sheaves", e.source_sheaves);
            if let Some((a, b)) = &e.faithfulness_witness {
                r.field("faithfulness_witness_first", presheaf_text(&tgt.cat, a));
                r.field("faithfulness_witness_second", presheaf_text(&tgt.cat, b));
            }
            if let Some(w) = &e.surjectivity_witness {
                r.field("surjectivity_witness", presheaf_text(&src.cat, w));
            }
            r.verdict = Verdict::from_bool(e.fully_faithful && e.essentially_surjective_within_bound);
            Ok(())
        }
        Command::Harness403 { arity, .. } => {
            let (src, tgt, f) = load_pair(paths, texts)?;
            let side = |s: &Site| -> Result<(), Failure> {
                s.require_monoidal()?;
                s.require_dim()?;
                Ok(())
            };
            side(&src)?;
            side(&tgt)?;
            let ms = MonoidalSite { m: src.monoidal.as_ref().expect("checked"), p: &src.p, dim: src.dim.as_ref().expect("checked") };
            let mt = MonoidalSite { m: tgt.monoidal.as_ref().expect("checked"), p: &tgt.p, dim: tgt.dim.as_ref().expect("checked") };
            match harness_4_0_3(&f, ms, mt, *arity)? {
                TransferVerdict::HypothesisFailure(why) => {
                    r.field("hypotheses", "fail");
                    for w in why {
                        r.field("hypothesis_failure", w);
                    }
                    r.verdict = Verdict::Fail;
                }
                TransferVerdict::Transfer(rep) => {
                    r.field("hypotheses", "pass");
                    comparison_fields(&rep, r);
                    r.verdict = Verdict::from_bool(rep.holds());
                }
            }
            Ok(())
        }
        Command::ZeroComplete { .. } => {
            let s = load(&paths[0], &texts[0])?;
            let z = zero_completion(&s.cat, s.monoidal.as_ref())?;
            r.field("inherited", z.inherited);
            r.field("added", z.cat.num_morphisms() - z.inherited);
            let doc = document_from(&format!("{}_zero", s.doc.name), &z.cat, z.monoidal.as_ref(), &s.p, None);
            r.document = Some(emit_site(&doc));
            Ok(())
        }
        Command::Check522 { arity, max_card, .. } => {
            let s = load(&paths[0], &texts[0])?;
            let m = s.require_monoidal()?;
            let rep = check_5_2_2(&s.cat, m, *arity, *max_card)?;
            r.field("j_after_i_identity", rep.j_after_i_identity);
            r.field("functorial", rep.functorial);
            r.field("restrictions_valid", rep.restrictions_valid);
            r.field("lax_original", rep.lax_original);
            r.field("restored_exactly", rep.restored_exactly);
            r.field("lax_completed", rep.lax_completed);
            r.field("restored_up_to_iso", rep.restored_up_to_iso);
            if let Some(w) = &rep.witness {
                r.field("witness_sizes", format!("{:?}", w.sizes));
            }
            r.verdict = Verdict::from_bool(rep.holds());
            Ok(())
        }
        Command::CheckRemark523 { arity, max_card, .. } => {
            let s = load(&paths[0], &texts[0])?;
            let m = s.require_monoidal()?;
            let z = zero_completion(&s.cat, Some(m))?;
            let rep = check_remark_5_2_3(&z, *arity, *max_card)?;
            r.field("weak_structures", rep.weak_structures);
            r.field("nontrivial_lax", rep.nontrivial_lax);
            if let Some(w) = &rep.witness {
                r.field("witness_sizes", format!("{:?}", w.sizes));
            }
            r.verdict = Verdict::from_bool(rep.holds());
            Ok(())
        }
    }
}

fn validate(path: &Path, text: &str, r: &mut Report) -> Result<(), Failure> {
    let doc = parse_site(text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    match build_site(doc) {
        Ok(s) => {
            r.field("site", &s.doc.name);
            r.field("objects", s.cat.num_objects());
            r.field("morphisms", s.cat.num_morphisms());
            r.field("squares", s.p.len());
            r.field("monoidal", s.monoidal.is_some());
            r.field("dimension", s.dim.is_some());
            r.field("presheaves", s.presheaves.len());
        }
        Err(e) => {
            r.verdict = Verdict::Fail;
            r.field("violation", e);
        }
    }
    Ok(())
}

fn load_pair(paths: &[PathBuf], texts: &[String]) -> Result<(Site, Site, FinFunctor), Failure> {
    let src = load(&paths[0], &texts[0])?;
    let tgt = load(&paths[1], &texts[1])?;
    let doc = parse_functor(&texts[2]).map_err(|e| Failure::Input(format!("{}: {e}", paths[2].display())))?;
    let f = build_functor(&doc, &src.cat, &tgt.cat)?;
    let check = cdsite::fincat::check_functor(&src.cat, &tgt.cat, &f)?;
    if !check.report.ok() {
        return Err(Failure::Input(format!("{}: not a functor: {}", paths[2].display(), check.report)));
    }
    Ok((src, tgt, f))
}

fn comparison_fields(rep: &cdsite::comparison::ComparisonReport, r: &mut Report) {
    let named = [
        ("cover_preserving", &rep.cover_preserving),
        ("locally_full", &rep.locally_full),
        ("locally_faithful", &rep.locally_faithful),
        ("locally_surjective_on_objects", &rep.locally_surjective_on_objects),
        ("cocontinuous", &rep.cocontinuous),
    ];
    for (k, w) in named {
        r.field(k, w.is_none());
    }
    for (k, w) in named {
        if let Some(w) = w {
            r.field(&format!("{k}_witness"), w);
        }
    }
}

fn completeness_fields(s: &Site, rep: CompletenessReport, r: &mut Report) {
    r.field("witnesses", rep.witnesses.len());
    if let Some(cex) = &rep.counterexample {
        r.field("counterexample", format!("{} {}", s.cat.object_name(cex.target), sieve_text(&s.cat, cex)));
    }
    r.verdict = match rep.verdict {
        Search::Found(()) => Verdict::Pass,
        Search::NotFound => Verdict::Fail,
        Search::Inconclusive(why) => {
            r.field("reason", why);
            Verdict::Inconclusive
        }
    };
}

fn check(property: Property, s: &Site, r: &mut Report) -> Result<(), Failure> {
    let c = &s.cat;
    match property {
        Property::CComplete => completeness_fields(s, is_c_complete(c, &s.p), r),
        Property::Complete => completeness_fields(s, is_complete(c, &s.p)?, r),
        Property::CRegular => {
            let rep = is_c_regular(c, &s.p);
            r.field("squares", rep.squares.len());
            for f in rep.failures() {
                r.field(
                    "failure",
                    format!(
                        "{} pullback={} e_mono={} locally_surjective={}",
                        square_text(c, &f.square),
                        f.pullback,
                        f.e_mono,
                        f.locally_surjective
                    ),
                );
            }
            r.verdict = Verdict::from_bool(rep.holds());
        }
        Property::TensorStable => {
            let m = s.require_monoidal()?;
            let stable = is_tensor_stable(&s.p, m);
            for (sq, z) in tensor_counterexamples(&s.p, m) {
                r.field("counterexample", format!("{} tensor {}", square_text(c, &sq), c.object_name(z)));
            }
            r.verdict = Verdict::from_bool(stable);
        }
        Property::DimCompat => {
            let d = s.require_dim()?;
            let rep = check_dim_compatible(c, &s.p, d);
            if let Some(w) = &rep.witness {
                r.field("witness_squares", w.len());
            }
            for sq in &rep.failures {
                r.field("failure", square_text(c, sq));
            }
            r.verdict = if rep.witness.is_some() {
                Verdict::Pass
            } else if rep.inconclusive {
                Verdict::Inconclusive
            } else {
                Verdict::Fail
            };
        }
        Property::Criterion315 => {
            let rep = check_criterion_3_1_5(c, &s.p);
            for sq in &rep.squares {
                let derived = sq.derived.as_ref().map_or("none".to_string(), |d| square_text(c, d));
                r.field("square", format!("{} derived={}", square_text(c, &sq.square), derived));
            }
            r.verdict = Verdict::from_bool(rep.holds());
        }
        Property::Criterion317 => {
            let m = s.require_monoidal()?;
            let rep = check_criterion_3_1_7(&s.p, m);
            r.field("tensor_stable", rep.tensor_stable);
            r.field("c_complete", rep.c_complete.found());
            r.field("unseparated", rep.unseparated.len());
            r.field("c_regular", rep.squares.holds());
            r.verdict = match (&rep.c_complete, rep.holds()) {
                (Search::Inconclusive(_), _) => Verdict::Inconclusive,
                (_, ok) => Verdict::from_bool(ok),
            };
        }
    }
    Ok(())
}

/// Name of the cap variable, re-exported for `--help` consistency checks.
pub const CAP_VARIABLE: &str = SIEVE_CAP_VAR;
