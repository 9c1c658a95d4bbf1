//! Theorem audit: property suites run over enumerated small instances, with
//! seeded sampling beyond an exhaustive core and greedy shrinking of failures.

mod instances;
mod shrink;
mod suites;

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use instances::{
    base_fits, categories, enumerate_instances, fiber_categories, fibration_fits, fibrations, functor_sites, topologies, Bounds,
    SiteInstance,
};
pub use shrink::{drop_arrow, drop_object, shrink_site, site_candidates};
pub use suites::{correspondence_sites, FIXTURES, MALFORMED, MINIMALITY_SIEVES};

/// Failures beyond this many are counted but not shrunk or printed.
pub const MAX_COUNTEREXAMPLES: usize = 5;

/// Environment variable overriding the wall-clock budget, in seconds.
pub const BUDGET_ENV: &str = "FINSITE_BUDGET_SECS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    LoccartDualRoute,
    CartesianLoccart,
    CanonicalCollapse,
    GiraudMinimality,
    LocalFactorization,
    KCartesian,
    Cofinality,
    ComparisonCells,
    CriterionEquivalence,
    CommaSite,
    Correspondence,
    Sheafification,
    Dsl,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::LoccartDualRoute,
        Suite::CartesianLoccart,
        Suite::CanonicalCollapse,
        Suite::GiraudMinimality,
        Suite::LocalFactorization,
        Suite::KCartesian,
        Suite::Cofinality,
        Suite::ComparisonCells,
        Suite::CriterionEquivalence,
        Suite::CommaSite,
        Suite::Correspondence,
        Suite::Sheafification,
        Suite::Dsl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::LoccartDualRoute => "loccart-dual-route",
            Suite::CartesianLoccart => "cartesian-loccart",
            Suite::CanonicalCollapse => "canonical-collapse",
            Suite::GiraudMinimality => "giraud-minimality",
            Suite::LocalFactorization => "local-factorization",
            Suite::KCartesian => "k-cartesian",
            Suite::Cofinality => "cofinality",
            Suite::ComparisonCells => "comparison-cells",
            Suite::CriterionEquivalence => "criterion-equivalence",
            Suite::CommaSite => "comma-site",
            Suite::Correspondence => "correspondence",
            Suite::Sheafification => "sheafification",
            Suite::Dsl => "dsl",
        }
    }

    pub fn from_name(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }

    /// Position in the acceptance list.
    pub fn criterion(self) -> usize {
        Suite::ALL.iter().position(|&x| x == self).unwrap() + 1
    }

    pub fn title(self) -> &'static str {
        match self {
            Suite::LoccartDualRoute => "combinatorial and oracle locally-cartesian verdicts agree",
            Suite::CartesianLoccart => "cartesian arrows are locally cartesian for every topology",
            Suite::CanonicalCollapse => "under the canonical topology, locally cartesian = cartesian",
            Suite::GiraudMinimality => "the Giraud topology is a topology, a comorphism, and minimal",
            Suite::LocalFactorization => "local factorizations exist and re-verify",
            Suite::KCartesian => "K-cartesian = locally cartesian on cartesian local fibrations",
            Suite::Cofinality => "cofinality characterizations agree",
            Suite::ComparisonCells => "comparison cells are natural and satisfy the cocycle identity",
            Suite::CriterionEquivalence => "three criteria for morphisms of local fibrations agree",
            Suite::CommaSite => "comma sites are sites and their projections comorphisms",
            Suite::Correspondence => "triplets and comma sheaves correspond",
            Suite::Sheafification => "sheafification is a sheaf, locally iso unit, idempotent",
            Suite::Dsl => "text format round-trips and reports spans",
        }
    }

    /// The exhaustive core of the suite; always run in full.
    pub fn default_bounds(self) -> Bounds {
        let b = Bounds::default();
        match self {
            Suite::CanonicalCollapse => Bounds { max_objects: 3, max_arrows: 3, endomorphisms: false, ..b },
            Suite::LocalFactorization
            | Suite::KCartesian
            | Suite::Cofinality
            | Suite::CommaSite
            | Suite::CartesianLoccart => Bounds { endomorphisms: false, ..b },
            Suite::ComparisonCells => b,
            Suite::CriterionEquivalence => Bounds { max_arrows: 1, endomorphisms: false, max_topologies: 4, ..b },
            Suite::Sheafification | Suite::Correspondence => Bounds { max_elements: 2, ..b },
            _ => b,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AuditConfig {
    pub suite: Suite,
    pub bounds: Bounds,
    pub seed: u64,
    /// Wall-clock cap; instances not started before it are skipped and the report is marked truncated.
    pub budget: Option<Duration>,
    /// Largest number of instances beyond the core run exhaustively; above it a seeded sample of this size is taken.
    pub ceiling: usize,
}

impl AuditConfig {
    pub fn new(suite: Suite) -> Self {
        AuditConfig { suite, bounds: suite.default_bounds(), seed: 0, budget: None, ceiling: 500 }
    }

    /// Applies `FINSITE_BUDGET_SECS` if set.
    pub fn with_env_budget(mut self) -> Self {
        if let Some(secs) = std::env::var(BUDGET_ENV).ok().and_then(|v| v.trim().parse::<f64>().ok()) {
            self.budget = Some(Duration::from_secs_f64(secs.max(0.0)));
        }
        self
    }
}

/// One property evaluated on one instance.
#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub property: String,
    pub instance: String,
    pub passed: bool,
    /// Elementary checks behind the verdict (arrows, morphisms, sieves, ...).
    pub checks: usize,
    pub detail: String,
    /// The failing instance as a document, shrunk when the suite supports it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub micros: u64,
}

impl Record {
    pub(crate) fn new(property: &str, instance: impl Into<String>, passed: bool, checks: usize, detail: impl Into<String>) -> Self {
        Record {
            property: property.into(),
            instance: instance.into(),
            passed,
            checks,
            detail: detail.into(),
            witness: None,
            micros: 0,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PropertySummary {
    pub property: String,
    pub instances: usize,
    pub checks: usize,
    pub failures: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub suite: &'static str,
    pub criterion: usize,
    pub title: &'static str,
    pub mode: Mode,
    pub bounds: Bounds,
    pub seed: u64,
    /// Work items within the bounds.
    pub population: usize,
    /// Work items actually evaluated.
    pub evaluated: usize,
    pub passed: bool,
    pub truncated: bool,
    pub properties: Vec<PropertySummary>,
    pub counterexamples: Vec<Record>,
    pub notes: Vec<String>,
    pub elapsed_ms: u64,
    pub records: Vec<Record>,
}

impl AuditReport {
    /// Evaluated (property, instance) pairs.
    pub fn instances(&self) -> usize {
        self.records.len()
    }

    pub fn checks(&self) -> usize {
        self.records.iter().map(|r| r.checks).sum()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{verdict} suite {} (criterion {}): {}", self.suite, self.criterion, self.title);
        let mode = match self.mode {
            Mode::Exhaustive => "exhaustive".to_string(),
            Mode::Sampled => format!("exhaustive core + seeded sample (seed {})", self.seed),
        };
        let _ = writeln!(
            s,
            "  mode: {mode}; work items {}/{}; {} instances, {} checks, {} ms{}",
            self.evaluated,
            self.population,
            self.instances(),
            self.checks(),
            self.elapsed_ms,
            if self.truncated { "; budget exhausted" } else { "" }
        );
        for p in &self.properties {
            let _ = writeln!(
                s,
                "  {} {}: {} instances, {} checks, {} failures",
                if p.failures == 0 { "ok  " } else { "FAIL" },
                p.property,
                p.instances,
                p.checks,
                p.failures
            );
        }
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        for c in &self.counterexamples {
            let _ = writeln!(s, "  counterexample to {} on {}: {}", c.property, c.instance, c.detail);
            if let Some(w) = &c.witness {
                for line in w.lines() {
                    let _ = writeln!(s, "    {line}");
                }
            }
        }
        let failures: usize = self.properties.iter().map(|p| p.failures).sum();
        if failures > self.counterexamples.len() {
            let _ = writeln!(s, "  ({} further failures in the records)", failures - self.counterexamples.len());
        }
        s
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// A record with the instance it came from, when that instance can be shrunk.
pub(crate) struct Outcome {
    pub record: Record,
    pub site: Option<SiteInstance>,
}

impl From<Record> for Outcome {
    fn from(record: Record) -> Self {
        Outcome { record, site: None }
    }
}

pub(crate) struct Ctx {
    pub bounds: Bounds,
    pub core: Bounds,
    pub seed: u64,
    ceiling: usize,
    deadline: Option<Instant>,
}

/// What a suite hands back to the harness.
#[derive(Default)]
pub(crate) struct Run {
    pub outcomes: Vec<Outcome>,
    pub population: usize,
    pub evaluated: usize,
    pub sampled: bool,
    pub truncated: bool,
    pub notes: Vec<String>,
}

impl Run {
    pub fn merge(mut self, other: Run) -> Run {
        self.outcomes.extend(other.outcomes);
        self.population += other.population;
        self.evaluated += other.evaluated;
        self.sampled |= other.sampled;
        self.truncated |= other.truncated;
        self.notes.extend(other.notes);
        self
    }
}

impl Ctx {
    pub fn over_budget(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    /// Evaluates every core item, and the rest either all or a seeded sample of `ceiling`.
    pub fn run<T: Sync>(&self, items: Vec<(T, bool)>, eval: impl Fn(&T) -> Vec<Outcome> + Sync) -> Run {
        let population = items.len();
        let (core, rest): (Vec<_>, Vec<_>) = items.into_iter().partition(|(_, c)| *c);
        let mut chosen: Vec<T> = core.into_iter().map(|(t, _)| t).collect();
        let sampled = rest.len() > self.ceiling;
        if sampled {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            let mut idx = sample(&mut rng, rest.len(), self.ceiling).into_vec();
            idx.sort_unstable();
            let mut rest: Vec<Option<T>> = rest.into_iter().map(|(t, _)| Some(t)).collect();
            chosen.extend(idx.into_iter().map(|i| rest[i].take().unwrap()));
        } else {
            chosen.extend(rest.into_iter().map(|(t, _)| t));
        }
        let results: Vec<Option<Vec<Outcome>>> = chosen
            .par_iter()
            .map(|t| {
                if self.over_budget() {
                    return None;
                }
                let start = Instant::now();
                let mut out = eval(t);
                let micros = start.elapsed().as_micros() as u64;
                for o in &mut out {
                    o.record.micros = micros;
                }
                Some(out)
            })
            .collect();
        let truncated = results.iter().any(|r| r.is_none());
        let evaluated = results.iter().filter(|r| r.is_some()).count();
        Run {
            outcomes: results.into_iter().flatten().flatten().collect(),
            population,
            evaluated,
            sampled,
            truncated,
            notes: Vec::new(),
        }
    }
}

/// Runs one suite.
pub fn run_audit(config: &AuditConfig) -> AuditReport {
    let start = Instant::now();
    let ctx = Ctx {
        bounds: config.bounds,
        core: config.suite.default_bounds(),
        seed: config.seed,
        ceiling: config.ceiling,
        deadline: config.budget.map(|b| start + b),
    };
    let mut run = suites::run_suite(config.suite, &ctx);
    run.outcomes.sort_by(|a, b| (&a.record.property, &a.record.instance).cmp(&(&b.record.property, &b.record.instance)));
    let refails = suites::refail(config.suite);
    let mut records = Vec::with_capacity(run.outcomes.len());
    let mut counterexamples = Vec::new();
    for o in run.outcomes {
        let mut r = o.record;
        if !r.passed && counterexamples.len() < MAX_COUNTEREXAMPLES {
            let mut cx = r.clone();
            match (&o.site, refails) {
                (Some(site), Some(fails)) => {
                    let small = shrink_site(site, |s| fails(s, &r.property));
                    let small = suites::normalize(config.suite, small.clone()).unwrap_or(small);
                    let doc = small.document();
                    if doc != site.document() {
                        cx.instance = format!("{}, shrunk to {}", r.instance, small.shape());
                    }
                    cx.witness = Some(doc);
                }
                (Some(site), None) => cx.witness = Some(site.document()),
                _ => {}
            }
            r.witness = cx.witness.clone();
            counterexamples.push(cx);
        }
        records.push(r);
    }
    let failures = records.iter().filter(|r| !r.passed).count();
    let mut properties: Vec<PropertySummary> = Vec::new();
    for r in &records {
        let p = match properties.iter_mut().find(|p| p.property == r.property) {
            Some(p) => p,
            None => {
                properties.push(PropertySummary { property: r.property.clone(), ..Default::default() });
                properties.last_mut().unwrap()
            }
        };
        p.instances += 1;
        p.checks += r.checks;
        p.failures += usize::from(!r.passed);
    }
    AuditReport {
        suite: config.suite.name(),
        criterion: config.suite.criterion(),
        title: config.suite.title(),
        mode: if run.sampled { Mode::Sampled } else { Mode::Exhaustive },
        bounds: config.bounds,
        seed: config.seed,
        population: run.population,
        evaluated: run.evaluated,
        passed: failures == 0,
        truncated: run.truncated,
        properties,
        counterexamples,
        notes: run.notes,
        elapsed_ms: start.elapsed().as_millis() as u64,
        records,
    }
}
