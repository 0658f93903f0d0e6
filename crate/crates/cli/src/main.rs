use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use effectus::cps::{check_cps_correct, cps_comp, cps_config, cps_value, normalize_arities, normalize_value, CheckConfig};
use effectus::effects::{parse_family, ObservationFamily, Verdict};
use effectus::equivalence::{bisim_comp, bisim_value, ctx_test, parse_contexts, EquivReport};
use effectus::logic::{parse_formula, sat_value, QuantConfig};
use effectus::semantics::{ecps_tree, epcf_tree};
use effectus::syntax::parse::{parse_ecps_value_list, parse_program, parse_program_list, Program, SourceFile};
use effectus::syntax::print::pretty_ecps_value;
use effectus::syntax::typing::{type_of_ecps_value, typecheck_ecps, typecheck_epcf, EcpsJudgement};
use effectus::syntax::{ecps, epcf, EcpsType, TypeEnv};
use effectus::trees::{to_snapshot, Compat, TreeParams};

#[derive(Parser)]
#[command(name = "effectus", version, about = "Effect trees, CPS translation and program logics for EPCF and ECPS")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Step budget per tree
    #[arg(long, global = true, default_value_t = 2000)]
    budget: u64,
    /// Tree depth (effect nodes per path)
    #[arg(long, global = true, default_value_t = 6)]
    depth: usize,
    /// Children forced at nodes with infinitely many
    #[arg(long, global = true, default_value_t = 8)]
    width: usize,
    /// Effect family, overriding the file's `#effects` line
    #[arg(long, global = true)]
    family: Option<String>,
    /// Values per store location
    #[arg(long, global = true, default_value_t = 4)]
    range: u64,
    /// Largest numeral tried for nat arguments
    #[arg(long, global = true, default_value_t = 5)]
    numerals: u64,
    /// Extra argument values: a `;;`-separated list of closed ECPS values
    #[arg(long, global = true)]
    pool: Vec<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Shorthand for `--format json`
    #[arg(long, global = true, value_enum)]
    report: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Type a program
    Typecheck { file: PathBuf },
    /// Print the effect tree of a computation
    Tree { file: PathBuf },
    /// Print the CPS image of an EPCF program
    Translate { file: PathBuf },
    /// Compare the tree of an EPCF computation with that of its CPS image
    CpsCheck { file: PathBuf },
    /// Check a value against a formula
    Check { file: PathBuf, formula: PathBuf },
    /// Compare two programs by their observable behaviour. With one file,
    /// compares the first two of its `;;`-separated programs.
    Bisim { left: PathBuf, right: Option<PathBuf> },
    /// Compare two programs inside each context of a file
    Ctxtest { left: PathBuf, right: PathBuf, contexts: PathBuf },
}

enum Failure {
    Parse(String),
    Type(String),
    Io(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 10,
            Failure::Type(_) => 11,
            Failure::Io(_) => 12,
            Failure::Other(_) => 13,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Type(m) | Failure::Io(m) | Failure::Other(m) => m,
        }
    }
}

fn context(path: &Path) -> impl Fn(String) -> String + '_ {
    move |m| format!("{}: {m}", path.display())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

struct Loaded {
    file: SourceFile,
    program: Program,
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    let src = read(path)?;
    let (file, program) = parse_program(&src).map_err(|e| Failure::Parse(context(path)(e.to_string())))?;
    Ok(Loaded { file, program })
}

fn family_of(run: &RunArgs, file: Option<&SourceFile>) -> Result<ObservationFamily, Failure> {
    let name = run
        .family
        .clone()
        .or_else(|| file.and_then(|f| f.effects.clone()))
        .unwrap_or_else(|| "pure".into());
    parse_family(&name, run.range).map_err(Failure::Other)
}

fn params(run: &RunArgs) -> Result<TreeParams, Failure> {
    if run.width < 2 {
        return Err(Failure::Other("the width must be at least 2".into()));
    }
    if run.budget == 0 {
        return Err(Failure::Other("the budget must be positive".into()));
    }
    Ok(TreeParams { depth: run.depth, width: run.width })
}

fn quant(run: &RunArgs, family: ObservationFamily) -> Result<QuantConfig, Failure> {
    let mut cfg = QuantConfig::new(family);
    cfg.budget = run.budget;
    cfg.params = params(run)?;
    cfg.numeral_bound = run.numerals;
    let sig = cfg.sig();
    for path in &run.pool {
        let values = parse_ecps_value_list(&read(path)?).map_err(|e| Failure::Parse(context(path)(e.to_string())))?;
        for v in values {
            let ty = type_of_ecps_value(&sig, &TypeEnv::new(), &v).map_err(|e| Failure::Type(context(path)(e.to_string())))?;
            match cfg.pools.iter_mut().find(|(t, _)| *t == ty) {
                Some((_, vs)) => vs.push(v),
                None => cfg.pools.push((ty, vec![v])),
            }
        }
    }
    Ok(cfg)
}

fn json(run: &RunArgs) -> bool {
    run.format == Format::Json || run.report == Some(Format::Json)
}

fn emit<T: Serialize>(run: &RunArgs, value: &T, text: impl FnOnce() -> String) {
    if json(run) {
        println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
    } else {
        print!("{}", text());
    }
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Holds => 0,
        Verdict::Fails => 1,
        Verdict::Unknown => 2,
    }
}

fn type_err(path: &Path) -> impl Fn(effectus::syntax::TypeError) -> Failure + '_ {
    move |e| Failure::Type(context(path)(e.to_string()))
}

/// An ECPS term for a loaded program: EPCF values and computations are
/// translated, computations run against the empty stack.
fn as_ecps(path: &Path, l: &Loaded, family: &ObservationFamily) -> Result<ecps::Term, Failure> {
    let sig = family.signature();
    let env = TypeEnv::new();
    Ok(match &l.program {
        Program::Ecps(t) => t.clone(),
        Program::Epcf(epcf::Term::Value(v)) => {
            let v = normalize_value(&sig, &env, v).map_err(type_err(path))?;
            ecps::Term::Value(cps_value(&sig, &env, &v).map_err(type_err(path))?)
        }
        Program::Epcf(epcf::Term::Comp(m)) => {
            let m = normalize_arities(&sig, &env, m).map_err(type_err(path))?;
            ecps::Term::Comp(cps_config(&sig, &epcf::Stack::id(), &m).map_err(type_err(path))?)
        }
    })
}

#[derive(Serialize)]
struct TypeReport {
    file: String,
    language: &'static str,
    kind: &'static str,
    #[serde(rename = "type")]
    ty: Option<String>,
}

fn cmd_typecheck(run: &RunArgs, path: &Path) -> Result<u8, Failure> {
    let l = load(path)?;
    let family = family_of(run, Some(&l.file))?;
    let sig = family.signature();
    let report = match &l.program {
        Program::Epcf(t) => {
            let ty = typecheck_epcf(&sig, &TypeEnv::new(), t).map_err(type_err(path))?;
            let kind = if matches!(t, epcf::Term::Value(_)) { "value" } else { "computation" };
            TypeReport { file: path.display().to_string(), language: "epcf", kind, ty: Some(ty.to_string()) }
        }
        Program::Ecps(t) => match typecheck_ecps(&sig.to_ecps(), &TypeEnv::new(), t).map_err(type_err(path))? {
            EcpsJudgement::Value(ty) => {
                TypeReport { file: path.display().to_string(), language: "ecps", kind: "value", ty: Some(ty.to_string()) }
            }
            EcpsJudgement::Computation => {
                TypeReport { file: path.display().to_string(), language: "ecps", kind: "computation", ty: None }
            }
        },
    };
    emit(run, &report, || match &report.ty {
        Some(t) => format!("{}: {} {} : {t}\n", report.file, report.language, report.kind),
        None => format!("{}: {} {}, well formed\n", report.file, report.language, report.kind),
    });
    Ok(0)
}

#[derive(Serialize)]
struct TreeReport {
    file: String,
    depth: usize,
    width: usize,
    snapshot: String,
}

fn cmd_tree(run: &RunArgs, path: &Path) -> Result<u8, Failure> {
    let l = load(path)?;
    let family = family_of(run, Some(&l.file))?;
    let sig = family.signature();
    let params = params(run)?;
    let tree = match &l.program {
        Program::Epcf(epcf::Term::Comp(m)) => {
            typecheck_epcf(&sig, &TypeEnv::new(), &epcf::Term::Comp(m.clone())).map_err(type_err(path))?;
            epcf_tree(&epcf::Stack::id(), m, run.budget, params).map_err(|e| Failure::Other(e.to_string()))?
        }
        Program::Ecps(ecps::Term::Comp(t)) => {
            typecheck_ecps(&sig.to_ecps(), &TypeEnv::new(), &ecps::Term::Comp(t.clone())).map_err(type_err(path))?;
            ecps_tree(t, run.budget, params).map_err(|e| Failure::Other(e.to_string()))?
        }
        _ => return Err(Failure::Other(context(path)("a tree needs a computation".into()))),
    };
    let report =
        TreeReport { file: path.display().to_string(), depth: params.depth, width: params.width, snapshot: to_snapshot(&tree.root) };
    emit(run, &report, || report.snapshot.clone());
    Ok(0)
}

#[derive(Serialize)]
struct TranslateReport {
    file: String,
    source: String,
}

fn cmd_translate(run: &RunArgs, path: &Path) -> Result<u8, Failure> {
    let l = load(path)?;
    let family = family_of(run, Some(&l.file))?;
    let sig = family.signature();
    let env = TypeEnv::new();
    let body = match &l.program {
        Program::Epcf(epcf::Term::Value(v)) => {
            let v = normalize_value(&sig, &env, v).map_err(type_err(path))?;
            pretty_ecps_value(&cps_value(&sig, &env, &v).map_err(type_err(path))?)
        }
        Program::Epcf(epcf::Term::Comp(m)) => {
            let m = normalize_arities(&sig, &env, m).map_err(type_err(path))?;
            pretty_ecps_value(&cps_comp(&sig, &env, &m).map_err(type_err(path))?)
        }
        Program::Ecps(_) => return Err(Failure::Other(context(path)("already an ECPS program".into()))),
    };
    let source = format!("#lang ecps\n#effects {family}\n{body}\n");
    let report = TranslateReport { file: path.display().to_string(), source };
    emit(run, &report, || report.source.clone());
    Ok(0)
}

fn cmd_cps_check(run: &RunArgs, path: &Path) -> Result<u8, Failure> {
    let l = load(path)?;
    let family = family_of(run, Some(&l.file))?;
    let sig = family.signature();
    let Program::Epcf(epcf::Term::Comp(m)) = &l.program else {
        return Err(Failure::Other(context(path)("cps-check needs an EPCF computation".into())));
    };
    let p = params(run)?;
    let cfg = CheckConfig::new(run.budget, p.depth, p.width);
    let report = check_cps_correct(&sig, m, &epcf::Stack::id(), cfg).map_err(|e| match e {
        effectus::cps::CpsError::Type(e) => type_err(path)(e),
        other => Failure::Other(other.to_string()),
    })?;
    emit(run, &report, || {
        let mut out = match &report.result {
            Compat::Equal => "equal\n".to_string(),
            Compat::Unresolved => "unresolved: the trees agree as far as they were forced\n".to_string(),
            Compat::Divergent { path, left, right } => format!("divergent at {path:?}: {left} vs {right}\n"),
        };
        out.push_str("-- EPCF tree, values relabelled\n");
        out.push_str(&to_snapshot(&report.epcf_tree.root));
        out.push_str("-- ECPS tree\n");
        out.push_str(&to_snapshot(&report.ecps_tree.root));
        out
    });
    Ok(match report.result {
        Compat::Equal => 0,
        Compat::Divergent { .. } => 1,
        Compat::Unresolved => 2,
    })
}

#[derive(Serialize)]
struct SatReport {
    file: String,
    formula: String,
    family: String,
    verdict: Verdict,
    pool_relative: bool,
    tuples: usize,
    witness: Option<SatWitness>,
}

#[derive(Serialize)]
struct SatWitness {
    arguments: Vec<String>,
    observation: String,
}

fn cmd_check(run: &RunArgs, path: &Path, formula: &Path) -> Result<u8, Failure> {
    let l = load(path)?;
    let family = family_of(run, Some(&l.file))?;
    let cfg = quant(run, family.clone())?;
    let v = match as_ecps(path, &l, &family)? {
        ecps::Term::Value(v) => v,
        ecps::Term::Comp(_) => return Err(Failure::Other(context(path)("formulas describe values".into()))),
    };
    let body = effectus::syntax::parse::split_header(&read(formula)?)
        .map_err(|e| Failure::Parse(context(formula)(e.to_string())))?
        .body;
    let phi = parse_formula(&body).map_err(|e| Failure::Parse(context(formula)(e.to_string())))?;
    let sat = sat_value(&v, &phi, &cfg).map_err(|e| match e {
        effectus::logic::LogicError::TypeMismatch { .. } | effectus::logic::LogicError::Type(_) => {
            Failure::Type(context(path)(e.to_string()))
        }
        other => Failure::Other(other.to_string()),
    })?;
    let report = SatReport {
        file: path.display().to_string(),
        formula: phi.to_string(),
        family: family.to_string(),
        verdict: sat.verdict,
        pool_relative: sat.pool_relative,
        tuples: sat.tuples,
        witness: sat.witness.as_ref().map(|(args, p)| SatWitness {
            arguments: args.iter().map(|a| a.to_string()).collect(),
            observation: p.to_string(),
        }),
    };
    emit(run, &report, || {
        let mut out = format!("{}", report.verdict);
        if report.pool_relative && report.verdict == Verdict::Holds {
            out.push_str(&format!(" over the argument pool ({} tuples)", report.tuples));
        }
        out.push('\n');
        if let Some(w) = &report.witness {
            out.push_str(&format!("refuted at ({}) for {}\n", w.arguments.join(", "), w.observation));
        }
        out
    });
    Ok(verdict_code(report.verdict))
}

fn equiv_text(r: &EquivReport) -> String {
    let mut out = match r.verdict {
        Verdict::Holds if r.pool_relative => format!("equivalent over {} argument tuples or contexts\n", r.exercised),
        Verdict::Holds => "equivalent\n".to_string(),
        Verdict::Fails => "distinguished\n".to_string(),
        Verdict::Unknown => "unknown: the budget or depth ran out before a difference was found\n".to_string(),
    };
    if let Some(w) = &r.witness {
        if !w.arguments.is_empty() {
            out.push_str(&format!("arguments: ({})\n", w.arguments.join(", ")));
        }
        if let Some(c) = &w.context {
            out.push_str(&format!("context: {c}\n"));
        }
        out.push_str(&format!("observation: {} (left {}, right {})\n", w.observation, w.left, w.right));
    }
    out
}

fn load_pair(left: &Path, right: Option<&Path>) -> Result<(Loaded, Loaded), Failure> {
    if let Some(right) = right {
        return Ok((load(left)?, load(right)?));
    }
    let (file, programs) =
        parse_program_list(&read(left)?).map_err(|e| Failure::Parse(context(left)(e.to_string())))?;
    let [a, b]: [Program; 2] = programs
        .try_into()
        .map_err(|_| Failure::Other(context(left)("expected exactly two `;;`-separated programs".into())))?;
    Ok((Loaded { file: file.clone(), program: a }, Loaded { file, program: b }))
}

fn cmd_bisim(run: &RunArgs, left: &Path, right_file: Option<&Path>) -> Result<u8, Failure> {
    let (a, b) = load_pair(left, right_file)?;
    let right = right_file.unwrap_or(left);
    let family = family_of(run, Some(&a.file))?;
    let cfg = quant(run, family.clone())?;
    let (s, t) = (as_ecps(left, &a, &family)?, as_ecps(right, &b, &family)?);
    let sig = cfg.sig();
    typecheck_ecps(&sig, &TypeEnv::new(), &s).map_err(type_err(left))?;
    typecheck_ecps(&sig, &TypeEnv::new(), &t).map_err(type_err(right))?;
    let report = match (&s, &t) {
        (ecps::Term::Comp(s), ecps::Term::Comp(t)) => bisim_comp(s, t, &cfg),
        (ecps::Term::Value(v), ecps::Term::Value(w)) => bisim_value(v, w, &cfg),
        _ => return Err(Failure::Type("cannot compare a value with a computation".into())),
    }
    .map_err(equiv_failure)?;
    emit(run, &report, || equiv_text(&report));
    Ok(verdict_code(report.verdict))
}

fn equiv_failure(e: effectus::equivalence::EquivError) -> Failure {
    use effectus::equivalence::{ContextError, EquivError};
    match e {
        EquivError::Type(_) | EquivError::TypeMismatch { .. } | EquivError::Context(ContextError::Type(_)) => {
            Failure::Type(e.to_string())
        }
        EquivError::Context(ContextError::Parse(_)) => Failure::Parse(e.to_string()),
        other => Failure::Other(other.to_string()),
    }
}

fn cmd_ctxtest(run: &RunArgs, left: &Path, right: &Path, contexts: &Path) -> Result<u8, Failure> {
    let (a, b) = (load(left)?, load(right)?);
    let family = family_of(run, Some(&a.file))?;
    let cfg = quant(run, family.clone())?;
    let (s, t) = (as_ecps(left, &a, &family)?, as_ecps(right, &b, &family)?);
    let ctxs = parse_contexts(&read(contexts)?).map_err(|e| match e {
        effectus::equivalence::ContextError::Parse(p) => Failure::Parse(context(contexts)(p.to_string())),
        other => Failure::Other(context(contexts)(other.to_string())),
    })?;
    let ctxs: Vec<_> = ctxs.into_iter().map(|(c, _)| c).collect();
    let report = ctx_test(&s, &t, &TypeEnv::<EcpsType>::new(), &ctxs, &cfg).map_err(equiv_failure)?;
    emit(run, &report, || equiv_text(&report));
    Ok(verdict_code(report.verdict))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = &cli.run;
    let result = match &cli.command {
        Command::Typecheck { file } => cmd_typecheck(run, file),
        Command::Tree { file } => cmd_tree(run, file),
        Command::Translate { file } => cmd_translate(run, file),
        Command::CpsCheck { file } => cmd_cps_check(run, file),
        Command::Check { file, formula } => cmd_check(run, file, formula),
        Command::Bisim { left, right } => cmd_bisim(run, left, right.as_deref()),
        Command::Ctxtest { left, right, contexts } => cmd_ctxtest(run, left, right, contexts),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
