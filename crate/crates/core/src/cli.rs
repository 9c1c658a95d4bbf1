//! Command-line front end. Exit codes: 0 pass, 1 failed check, 2 input error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::audit::{enumerate_instances, run_audit, AuditConfig, Suite, BUDGET_ENV};
use crate::dsl::{
    self, category_block, check_block, functor_block, parse, presheaf_block, run_check, serialize, serialize_blocks,
    site_block, topology_block, Block, CheckKind, CheckOutcome, Decl, Document,
};
use crate::fincat::{same, FinCategory};
use crate::sites::{comma_site, giraud_topology};
use crate::presheaf::sheafify;
use crate::report::CheckReport;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "finsite", version, about = "Decide properties of finite sites, fibrations and local fibrations")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one check on a document.
    Check(CheckArgs),
    /// Run every `check` declaration of a document after validating it.
    Run {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Print a document in canonical form.
    Fmt {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Add the Giraud topology of a fibration over a base topology.
    Giraud {
        file: PathBuf,
        #[arg(long)]
        fibration: String,
        #[arg(long)]
        base: String,
        #[arg(long, default_value = "Giraud")]
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build the comma site of a comorphism with its projection.
    CommaSite {
        file: PathBuf,
        #[arg(long)]
        site: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Add the sheafification of a presheaf.
    Sheafify {
        file: PathBuf,
        #[arg(long)]
        presheaf: String,
        #[arg(long)]
        topology: String,
        #[arg(long)]
        name: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a theorem-audit suite over generated instances.
    Audit(AuditArgs),
    /// Print the deterministic stream of generated instance documents.
    Enumerate {
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stop after this many documents.
        #[arg(long)]
        limit: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// One of: topology, comorphism, continuous, morphism-of-sites, loccart, locfib, k-cartesian,
    /// factorization, cofinal, cofinality-equiv, topos-fibration, morphism-locfib, sheaf.
    kind: String,
    file: PathBuf,
    #[arg(long)]
    topology: Option<String>,
    #[arg(long)]
    site: Option<String>,
    #[arg(long)]
    arrow: Option<String>,
    /// Source object for `cofinal`; makes `--arrow` a base arrow.
    #[arg(long)]
    object: Option<String>,
    #[arg(long)]
    presheaf: Option<String>,
    #[arg(long)]
    functor: Option<String>,
    /// Source site for `morphism-locfib`.
    #[arg(long)]
    source: Option<String>,
    /// Target site for `morphism-locfib`.
    #[arg(long)]
    target: Option<String>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args, Debug, Default)]
struct BoundArgs {
    #[arg(long)]
    max_objects: Option<usize>,
    #[arg(long)]
    max_arrows: Option<usize>,
    #[arg(long)]
    max_fiber_objects: Option<usize>,
    #[arg(long)]
    max_topologies: Option<usize>,
    #[arg(long)]
    max_elements: Option<usize>,
    /// Allow non-identity endomorphisms in base categories.
    #[arg(long)]
    endomorphisms: bool,
}

impl BoundArgs {
    fn apply(&self, b: &mut crate::audit::Bounds) {
        let set = |slot: &mut usize, v: Option<usize>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut b.max_objects, self.max_objects);
        set(&mut b.max_arrows, self.max_arrows);
        set(&mut b.max_fiber_objects, self.max_fiber_objects);
        set(&mut b.max_topologies, self.max_topologies);
        set(&mut b.max_elements, self.max_elements);
        b.endomorphisms |= self.endomorphisms;
    }
}

#[derive(Args, Debug)]
struct AuditArgs {
    /// Suite name, or `all`.
    #[arg(long)]
    suite: String,
    #[command(flatten)]
    bounds: BoundArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-clock budget in seconds; the environment variable takes precedence.
    #[arg(long)]
    budget: Option<f64>,
    /// Work items beyond the exhaustive core run in full up to this count, else a sample of it.
    #[arg(long)]
    ceiling: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

/// An input problem; reported on stderr with exit code 2.
#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type CliResult = Result<i32, InputError>;

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
    }
}

fn dispatch(command: Command) -> CliResult {
    match command {
        Command::Check(args) => check(args),
        Command::Run { file, format } => run_document(&file, format),
        Command::Fmt { file, output } => {
            let doc = load(&file)?;
            emit(output.as_deref(), &serialize(&doc))?;
            Ok(EXIT_PASS)
        }
        Command::Giraud { file, fibration, base, name, output } => giraud(&file, &fibration, &base, &name, output.as_deref()),
        Command::CommaSite { file, site, output } => comma(&file, site, output.as_deref()),
        Command::Sheafify { file, presheaf, topology, name, output } => {
            sheafify_cmd(&file, &presheaf, &topology, name, output.as_deref())
        }
        Command::Audit(args) => audit(args),
        Command::Enumerate { bounds, seed, limit } => {
            let mut b = crate::audit::Bounds::default();
            bounds.apply(&mut b);
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            for (i, doc) in enumerate_instances(b, seed).take(limit.unwrap_or(usize::MAX)).enumerate() {
                if writeln!(out, "# instance {i}\n{doc}").is_err() {
                    break;
                }
            }
            Ok(EXIT_PASS)
        }
    }
}

fn load(path: &Path) -> Result<Document, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|diags| {
        InputError(diags.0.iter().map(|d| format!("{}:{d}", path.display())).collect::<Vec<_>>().join("\n"))
    })
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), InputError> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| InputError(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// The only declared name of a kind, when the flag is omitted.
fn sole<'a, V>(map: &'a std::collections::BTreeMap<String, V>, what: &str, flag: &str) -> Result<&'a str, InputError> {
    let mut keys = map.keys();
    match (keys.next(), keys.next()) {
        (Some(k), None) => Ok(k),
        (None, _) => Err(InputError(format!("the document declares no {what}"))),
        _ => Err(InputError(format!("the document declares several {what}s; pass --{flag}"))),
    }
}

fn required<'a>(v: &'a Option<String>, flag: &str, kind: CheckKind) -> Result<&'a str, InputError> {
    v.as_deref().ok_or_else(|| InputError(format!("`check {}` needs --{flag} ({})", kind.name(), kind.usage())))
}

#[derive(Serialize)]
struct CheckRun {
    exit_code: i32,
    outcomes: Vec<CheckOutcome>,
}

fn check(args: CheckArgs) -> CliResult {
    let kind = CheckKind::from_name(&args.kind).ok_or_else(|| {
        let names: Vec<_> = CheckKind::ALL.iter().map(|k| k.name()).collect();
        InputError(format!("unknown check `{}`; expected one of {}", args.kind, names.join(", ")))
    })?;
    let doc = load(&args.file)?;
    let site = || args.site.as_deref().map_or_else(|| sole(&doc.sites, "site", "site"), Ok);
    let requests: Vec<(String, Vec<String>)> = match kind {
        CheckKind::Topology => match &args.topology {
            Some(t) => vec![(t.clone(), vec![])],
            None if doc.topologies.is_empty() => return Err(InputError("the document declares no topology".into())),
            None => doc.topologies.keys().map(|t| (t.clone(), vec![])).collect(),
        },
        CheckKind::Loccart | CheckKind::KCartesian | CheckKind::Factorization | CheckKind::CofinalityEquiv => {
            vec![(site()?.to_string(), vec![required(&args.arrow, "arrow", kind)?.to_string()])]
        }
        CheckKind::Cofinal => {
            let mut a = vec![required(&args.arrow, "arrow", kind)?.to_string()];
            a.extend(args.object.clone());
            vec![(site()?.to_string(), a)]
        }
        CheckKind::MorphismLocfib => {
            let f = args.functor.as_deref().map_or_else(|| sole(&doc.functors, "functor", "functor"), Ok)?;
            let s = required(&args.source, "source", kind)?;
            let t = required(&args.target, "target", kind)?;
            vec![(f.to_string(), vec![s.to_string(), t.to_string()])]
        }
        CheckKind::Sheaf => {
            let p = args.presheaf.as_deref().map_or_else(|| sole(&doc.presheaves, "presheaf", "presheaf"), Ok)?;
            let t = args.topology.as_deref().map_or_else(|| sole(&doc.topologies, "topology", "topology"), Ok)?;
            vec![(p.to_string(), vec![t.to_string()])]
        }
        _ => vec![(site()?.to_string(), vec![])],
    };
    let mut outcomes = Vec::new();
    for (target, rest) in &requests {
        let refs: Vec<&str> = rest.iter().map(String::as_str).collect();
        let block = check_block(kind.name(), target, &refs);
        let Decl::Check(c) = &block.decl else { unreachable!("check_block builds a check") };
        outcomes.push(run_check(&doc, c)?);
    }
    let code = if outcomes.iter().all(|o| o.passed) { EXIT_PASS } else { EXIT_FAIL };
    print_outcomes(&outcomes, code, args.format);
    Ok(code)
}

fn print_outcomes(outcomes: &[CheckOutcome], code: i32, format: Format) {
    match format {
        Format::Json => {
            let run = CheckRun { exit_code: code, outcomes: outcomes.to_vec() };
            println!("{}", serde_json::to_string_pretty(&run).expect("outcomes serialize"));
        }
        Format::Text => {
            for o in outcomes {
                println!("{} {} {}", if o.passed { "PASS" } else { "FAIL" }, o.kind.name(), o.target);
                for r in &o.reports {
                    print_report(r);
                }
            }
        }
    }
}

fn print_report(r: &CheckReport) {
    println!("  {} {}: {}", if r.passed { "ok  " } else { "fail" }, r.check, r.detail);
    for (k, v) in &r.witness {
        println!("      {k}: {v}");
    }
}

fn run_document(file: &Path, format: Format) -> CliResult {
    let doc = load(file)?;
    let invalid: Vec<_> = dsl::validate(&doc).into_iter().filter(|(_, r)| !r.passed).collect();
    if !invalid.is_empty() {
        for (span, r) in &invalid {
            eprintln!("{}:{span}: {r}", file.display());
        }
        return Err(InputError(format!("{} declaration(s) fail their axioms", invalid.len())));
    }
    let mut outcomes = Vec::new();
    for (c, span) in doc.checks() {
        outcomes.push(run_check(&doc, c).map_err(|e| InputError(format!("{}:{span}: {e}", file.display())))?);
    }
    let code = if outcomes.iter().all(|o| o.passed) { EXIT_PASS } else { EXIT_FAIL };
    print_outcomes(&outcomes, code, format);
    Ok(code)
}

/// The label under which `c` is declared.
fn label_of(doc: &Document, c: &Arc<FinCategory>) -> Result<String, InputError> {
    doc.categories
        .iter()
        .find(|(_, d)| same(d, c))
        .map(|(k, _)| k.clone())
        .ok_or_else(|| InputError(format!("category {} is not declared", c.name())))
}

fn fresh(doc: &Document, name: &str) -> Result<(), InputError> {
    if doc.blocks.iter().any(|b| b.decl.name().node == name) {
        return Err(InputError(format!("`{name}` is already declared; pass --name")));
    }
    Ok(())
}

fn giraud(file: &Path, fibration: &str, base: &str, name: &str, output: Option<&Path>) -> CliResult {
    let doc = load(file)?;
    let p = doc.functors.get(fibration).ok_or_else(|| InputError(format!("no functor named `{fibration}`")))?;
    let j = doc.topologies.get(base).ok_or_else(|| InputError(format!("no topology named `{base}`")))?;
    if !same(j.base(), p.target()) {
        return Err(InputError(format!("`{base}` is not a topology on the target of `{fibration}`")));
    }
    fresh(&doc, name)?;
    let k = giraud_topology(p, j)?;
    let mut blocks = doc.blocks.clone();
    blocks.push(topology_block(name, &label_of(&doc, p.source())?, &k));
    emit(output, &serialize_blocks(&blocks))?;
    Ok(EXIT_PASS)
}

fn comma(file: &Path, site: Option<String>, output: Option<&Path>) -> CliResult {
    let doc = load(file)?;
    let name = match site {
        Some(s) => s,
        None => sole(&doc.sites, "site", "site")?.to_string(),
    };
    let s = doc.sites.get(&name).ok_or_else(|| InputError(format!("no site named `{name}`")))?;
    let cs = comma_site(s)?;
    let (cat, base, pi) = (format!("{name}Comma"), format!("{name}Base"), format!("{name}Pi"));
    let (k, j) = (format!("{name}K"), format!("{name}J"));
    let blocks: Vec<Block> = vec![
        category_block(&cat, &cs.comma.category),
        category_block(&base, cs.comma.right.target()),
        functor_block(&pi, &cat, &base, &cs.comma.right),
        topology_block(&k, &cat, &cs.topology),
        topology_block(&j, &base, &cs.j0),
        site_block(&format!("{name}Projection"), &pi, &k, &j),
        check_block("topology", &k, &[]),
        check_block("comorphism", &format!("{name}Projection"), &[]),
    ];
    emit(output, &serialize_blocks(&blocks))?;
    Ok(EXIT_PASS)
}

fn sheafify_cmd(file: &Path, presheaf: &str, topology: &str, name: Option<String>, output: Option<&Path>) -> CliResult {
    let doc = load(file)?;
    let p = doc.presheaves.get(presheaf).ok_or_else(|| InputError(format!("no presheaf named `{presheaf}`")))?;
    let j = doc.topologies.get(topology).ok_or_else(|| InputError(format!("no topology named `{topology}`")))?;
    if !same(j.base(), p.base()) {
        return Err(InputError(format!("`{topology}` is not a topology on the base of `{presheaf}`")));
    }
    let name = name.unwrap_or_else(|| format!("{presheaf}Sheaf"));
    fresh(&doc, &name)?;
    let a = sheafify(p, j);
    let mut blocks = doc.blocks.clone();
    blocks.push(presheaf_block(&name, &label_of(&doc, p.base())?, &a.sheaf));
    blocks.push(check_block("sheaf", &name, &[topology]));
    emit(output, &serialize_blocks(&blocks))?;
    Ok(EXIT_PASS)
}

fn audit(args: AuditArgs) -> CliResult {
    let suites: Vec<Suite> = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::from_name(&args.suite).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
            InputError(format!("unknown suite `{}`; expected `all` or one of {}", args.suite, names.join(", ")))
        })?]
    };
    let mut code = EXIT_PASS;
    let mut reports = Vec::new();
    for suite in suites {
        let mut config = AuditConfig::new(suite);
        args.bounds.apply(&mut config.bounds);
        config.seed = args.seed;
        if let Some(secs) = args.budget {
            if secs < 0.0 || !secs.is_finite() {
                return Err(InputError(format!("--budget must be a nonnegative number of seconds, got {secs}")));
            }
            config.budget = Some(Duration::from_secs_f64(secs));
        }
        if let Ok(v) = std::env::var(BUDGET_ENV) {
            if v.trim().parse::<f64>().map_or(true, |s| s < 0.0 || !s.is_finite()) {
                return Err(InputError(format!("{BUDGET_ENV} must be a nonnegative number of seconds, got `{v}`")));
            }
        }
        let config = config.with_env_budget();
        let config = AuditConfig { ceiling: args.ceiling.unwrap_or(config.ceiling), ..config };
        let report = run_audit(&config);
        code = code.max(report.exit_code());
        match args.format {
            Format::Text => print!("{}", report.text()),
            Format::Json => reports.push(report),
        }
    }
    if args.format == Format::Json {
        let json = if reports.len() == 1 {
            serde_json::to_string_pretty(&reports[0])
        } else {
            serde_json::to_string_pretty(&reports)
        };
        println!("{}", json.expect("reports serialize"));
    }
    Ok(code)
}
