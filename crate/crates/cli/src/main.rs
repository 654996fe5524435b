//! `dmbl`: batch front end for dmbl-core.
//!
//! Exit codes: 0 success or true verdict, 1 false verdict, 2 error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dmbl_core::eval::{assign, decide, diagnose_b6, independent, lewis_escape, EvalError};
use dmbl_core::formula::{expand, is_box_free, parse_in, Formula, ParseError};
use dmbl_core::model::{Base, Limits, ModelConfig, ModelError, ModelState, ScheduleMode, SeedOrder};
use dmbl_core::prob::{
    bayes_check, decimal, init_measure, limit_prob, parse_rational, prob, BaseMeasure, ProbError,
};
use dmbl_core::proof::{check, cross_validate, parse_script, Logic};
use dmbl_core::worlds::{PropSet, WorldId};
use num_rational::BigRational;
use serde::Deserialize;
use serde_json::{json, Map, Value};

#[derive(Parser, Debug)]
#[command(name = "dmbl", version, about = "Free conditional models, exact probabilities and proof checking")]
struct Cli {
    /// Engine configuration file (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    schedule: Option<Schedule>,
    #[arg(long, global = true)]
    max_levels: Option<usize>,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Schedule {
    Canonical,
    Demand,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a formula and print its normal form.
    Parse { formula: String },
    /// Decide theoremhood of a box-free formula.
    Decide { formula: String },
    /// Dump the assignment of a formula and its subformulas.
    Eval { formula: String },
    /// Whether F1 is independent of F2, i.e. (F1|F2) = F1.
    Indep { f1: String, f2: String },
    /// Probability of a formula under the configured measure.
    Prob { formula: String },
    /// Compare P((F2|F1))·P(F1) with P(F1 /\ F2).
    Bayes { f1: String, f2: String },
    /// Check that (B|A) escapes the base algebra for every ∅ ⊊ B ⊊ A ⊊ Ω_0.
    LewisDemo,
    /// Independence in both directions for phi=F1, psi=F2, and the nested
    /// conditional law for eta=F3.
    B6Diag { f1: String, f2: String, f3: Option<String> },
    /// Check a proof script.
    CheckProof { file: PathBuf },
    /// Build a model and print its world tables.
    DumpModel {
        /// Formulas to evaluate first.
        formulas: Vec<String>,
        /// Canonical steps to run before dumping.
        #[arg(long, default_value_t = 0)]
        steps: usize,
    },
    /// Run the three-world golden scenario.
    Fixtures,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct EngineConfig {
    atoms: Option<Vec<String>>,
    worlds: Option<Vec<String>>,
    #[serde(default)]
    valuation: BTreeMap<String, Vec<String>>,
    measure: Option<BTreeMap<String, String>>,
    schedule: Option<Schedule>,
    seed_order: Option<SeedSpec>,
    max_levels: Option<usize>,
    max_worlds: Option<usize>,
    output: Option<Output>,
}

#[derive(Deserialize, Debug)]
#[serde(untagged)]
enum SeedSpec {
    Named(SeedName),
    Explicit(Vec<Vec<String>>),
}

#[derive(Deserialize, Debug, Clone, Copy)]
#[serde(rename_all = "kebab-case")]
enum SeedName {
    CardinalityLex,
    AtomsFirst,
}

#[derive(Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Output {
    Text,
    Json,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Config(String),
    Io(String),
    Parse(String),
    Cap(String),
    Model(String),
    Prob(String),
    Proof(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Parse(_) => "parse",
            CliError::Cap(_) => "cap",
            CliError::Model(_) => "model",
            CliError::Prob(_) => "probability",
            CliError::Proof(_) => "proof",
        }
    }

    fn prefix(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage error",
            CliError::Config(_) => "config error",
            CliError::Io(_) => "io error",
            CliError::Parse(_) => "parse error",
            CliError::Cap(_) => "cap exceeded",
            CliError::Model(_) => "model error",
            CliError::Prob(_) => "probability error",
            CliError::Proof(_) => "proof error",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m)
            | CliError::Config(m)
            | CliError::Io(m)
            | CliError::Parse(m)
            | CliError::Cap(m)
            | CliError::Model(m)
            | CliError::Prob(m)
            | CliError::Proof(m) => m,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::LevelCap { .. } | ModelError::WorldCap { .. } | ModelError::Exhausted => {
                CliError::Cap(e.to_string())
            }
            _ => CliError::Model(e.to_string()),
        }
    }
}

impl From<dmbl_core::worlds::AlgebraError> for CliError {
    fn from(e: dmbl_core::worlds::AlgebraError) -> Self {
        ModelError::from(e).into()
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Model(m) => m.into(),
            EvalError::UnknownAtom(_) => CliError::Parse(e.to_string()),
            EvalError::Precondition(_) => CliError::Model(e.to_string()),
        }
    }
}

impl From<ProbError> for CliError {
    fn from(e: ProbError) -> Self {
        match e {
            ProbError::Eval(e) => e.into(),
            _ => CliError::Prob(e.to_string()),
        }
    }
}

/// A finished command: its report and whether the verdict was true.
struct Report {
    body: Map<String, Value>,
    ok: bool,
}

impl Report {
    fn new(command: &str, ok: bool) -> Report {
        let mut body = Map::new();
        body.insert("command".into(), json!(command));
        Report { body, ok }
    }

    fn with(mut self, key: &str, value: impl Into<Value>) -> Report {
        self.body.insert(key.into(), value.into());
        self
    }
}

/// Resolved configuration: the base, model settings and measure.
struct Engine {
    base: Base,
    names: Vec<String>,
    atoms: Vec<String>,
    config: ModelConfig,
    measure: Option<BTreeMap<String, String>>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("usage error: {first}");
            return ExitCode::from(2);
        }
    };
    let (result, json_out) = match load_config(&cli) {
        Ok(cfg) => {
            let json_out = cli.json || cfg.output == Some(Output::Json);
            (run(&cli, cfg), json_out)
        }
        Err(e) => (Err(e), cli.json),
    };
    match result {
        Ok(report) => {
            if json_out {
                println!("{}", Value::Object(report.body));
            } else {
                print_text(&report.body);
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{}: {}", e.prefix(), e.message());
            if json_out {
                println!("{}", json!({"error": {"kind": e.kind(), "message": e.message()}}));
            }
            ExitCode::from(2)
        }
    }
}

fn print_text(body: &Map<String, Value>) {
    for (k, v) in body {
        match v {
            Value::String(s) => println!("{k}: {s}"),
            Value::Array(items) if items.iter().all(|i| i.is_object()) && !items.is_empty() => {
                println!("{k}:");
                for i in items {
                    println!("  {i}");
                }
            }
            other => println!("{k}: {other}"),
        }
    }
}

fn load_config(cli: &Cli) -> Result<EngineConfig, CliError> {
    let mut cfg = match &cli.config {
        None => EngineConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
    };
    if cli.schedule.is_some() {
        cfg.schedule = cli.schedule;
    }
    if cli.max_levels.is_some() {
        cfg.max_levels = cli.max_levels;
    }
    for (name, cap) in [("max_levels", cfg.max_levels), ("max_worlds", cfg.max_worlds)] {
        if cap == Some(0) {
            return Err(CliError::Config(format!("{name} must be positive")));
        }
    }
    Ok(cfg)
}

/// Builds the engine; `formulas` supply the atoms when the config has none.
fn engine(cfg: &EngineConfig, formulas: &[&str]) -> Result<Engine, CliError> {
    let base = match (&cfg.atoms, &cfg.worlds) {
        (Some(_), Some(_)) => return Err(CliError::Config("give either atoms or worlds, not both".into())),
        (Some(atoms), None) => {
            if !cfg.valuation.is_empty() {
                return Err(CliError::Config("valuation needs an explicit world list".into()));
            }
            Base::Atoms(atoms.clone())
        }
        (None, Some(worlds)) => Base::Worlds {
            names: worlds.clone(),
            valuation: cfg.valuation.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        },
        (None, None) => {
            let mut atoms = std::collections::BTreeSet::new();
            for text in formulas {
                let f = dmbl_core::formula::parse(text).map_err(|e| parse_error(text, e))?;
                atoms.extend(f.atoms());
            }
            if atoms.is_empty() {
                atoms.extend(["p".to_string(), "q".to_string()]);
            }
            Base::Atoms(atoms.into_iter().collect())
        }
    };
    let probe = ModelState::new(&base, &ModelConfig::default())?;
    let names = probe.tower().base_names().to_vec();
    let atoms = probe.model().atoms().to_vec();
    let schedule = match cfg.schedule.unwrap_or(Schedule::Demand) {
        Schedule::Canonical => ScheduleMode::Canonical,
        Schedule::Demand => ScheduleMode::Demand,
    };
    let seed = match &cfg.seed_order {
        None | Some(SeedSpec::Named(SeedName::AtomsFirst)) => SeedOrder::AtomsFirst,
        Some(SeedSpec::Named(SeedName::CardinalityLex)) => SeedOrder::CardinalityLex,
        Some(SeedSpec::Explicit(sets)) => {
            let mut out = Vec::new();
            for set in sets {
                let mut members = Vec::new();
                for w in set {
                    let i = names
                        .iter()
                        .position(|n| normalize(n) == normalize(w))
                        .ok_or_else(|| CliError::Config(format!("seed_order: unknown world `{w}`")))?;
                    members.push(i);
                }
                out.push(PropSet::from_indices(0, names.len(), members));
            }
            SeedOrder::Explicit(out)
        }
    };
    let defaults = Limits::default();
    let config = ModelConfig {
        schedule,
        seed,
        limits: Limits {
            max_levels: cfg.max_levels.unwrap_or(defaults.max_levels),
            max_worlds: cfg.max_worlds.unwrap_or(defaults.max_worlds),
        },
    };
    ModelState::new(&base, &config)?;
    Ok(Engine {
        base,
        names,
        atoms,
        config,
        measure: cfg.measure.clone(),
    })
}

fn normalize(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

fn parse_error(text: &str, e: ParseError) -> CliError {
    CliError::Parse(format!("`{text}` at offset {}: {e}", e.offset()))
}

impl Engine {
    fn state(&self) -> Result<ModelState, CliError> {
        Ok(ModelState::new(&self.base, &self.config)?)
    }

    fn formula(&self, text: &str) -> Result<Formula, CliError> {
        parse_in(text, &self.atoms).map_err(|e| parse_error(text, e))
    }

    fn schedule_name(&self) -> &'static str {
        match self.config.schedule {
            ScheduleMode::Canonical => "canonical",
            ScheduleMode::Demand => "demand",
        }
    }

    /// Uniform when the config has no measure.
    fn base_measure(&self) -> Result<BaseMeasure, CliError> {
        let Some(map) = &self.measure else {
            return Ok(BaseMeasure::uniform(self.names.len()));
        };
        let mut weights = vec![None; self.names.len()];
        for (key, value) in map {
            let i = self
                .names
                .iter()
                .position(|n| normalize(n) == normalize(key))
                .ok_or_else(|| CliError::Config(format!("measure: unknown world `{key}`")))?;
            let r = parse_rational(value)
                .ok_or_else(|| CliError::Config(format!("measure: `{value}` is not a rational p/q")))?;
            weights[i] = Some(r);
        }
        let weights: Vec<BigRational> = weights
            .into_iter()
            .enumerate()
            .map(|(i, w)| w.ok_or_else(|| CliError::Config(format!("measure: no weight for world `{}`", self.names[i]))))
            .collect::<Result<_, _>>()?;
        BaseMeasure::new(weights).map_err(|e| CliError::Config(format!("measure: {e}")))
    }
}

fn rat(r: &BigRational) -> Value {
    json!(r.to_string())
}

fn run(cli: &Cli, cfg: EngineConfig) -> Result<Report, CliError> {
    match &cli.command {
        Command::Parse { formula } => {
            let f = dmbl_core::formula::parse(formula).map_err(|e| parse_error(formula, e))?;
            Ok(Report::new("parse", true)
                .with("formula", f.to_string())
                .with("expanded", expand(&f).to_string())
                .with("atoms", f.atoms())
                .with("box_free", is_box_free(&f))
                .with("conditional_depth", f.cond_depth()))
        }
        Command::Decide { formula } => {
            let e = engine(&cfg, &[formula])?;
            let f = e.formula(formula)?;
            let d = decide(&mut e.state()?, &f)?;
            let verdict = match (d.box_free, d.valid) {
                (true, true) => "theorem",
                (true, false) => "not-a-theorem",
                (false, true) => "valid-in-model",
                (false, false) => "not-valid-in-model",
            };
            Ok(Report::new("decide", d.valid)
                .with("formula", f.to_string())
                .with("verdict", verdict)
                .with("box_free", d.box_free)
                .with("level", d.level)
                .with("worlds", d.worlds)
                .with("schedule", e.schedule_name()))
        }
        Command::Eval { formula } => {
            let e = engine(&cfg, &[formula])?;
            let f = e.formula(formula)?;
            let mut s = e.state()?;
            let mut subs = Vec::new();
            collect_subformulas(&f, &mut subs);
            let mut rows = Vec::new();
            for g in &subs {
                let v = assign(&mut s, g)?;
                rows.push(json!({
                    "formula": g.to_string(),
                    "level": v.level,
                    "members": v.value.to_vec(),
                }));
            }
            let v = assign(&mut s, &f)?;
            Ok(Report::new("eval", true)
                .with("formula", f.to_string())
                .with("level", v.level)
                .with("worlds", v.value.universe())
                .with("members", v.value.to_vec())
                .with("valid", v.value.is_full())
                .with("subformulas", rows)
                .with("schedule", e.schedule_name()))
        }
        Command::Indep { f1, f2 } => {
            let e = engine(&cfg, &[f1, f2])?;
            let (psi, phi) = (e.formula(f1)?, e.formula(f2)?);
            let holds = independent(&mut e.state()?, &phi, &psi)?;
            Ok(Report::new("indep", holds)
                .with("formula", Formula::indep(psi, phi).to_string())
                .with("independent", holds))
        }
        Command::Prob { formula } => {
            let e = engine(&cfg, &[formula])?;
            let f = e.formula(formula)?;
            let pi = e.base_measure()?;
            let mut s = e.state()?;
            let mut m = init_measure(s.model(), &pi)?;
            let (p, method) = match prob(&mut s, &mut m, &f) {
                Ok(p) => (p, "exact"),
                Err(ProbError::ZeroBlock { .. }) => (limit_prob(&mut e.state()?, &pi, &f, None)?, "limit"),
                Err(err) => return Err(err.into()),
            };
            Ok(Report::new("prob", true)
                .with("formula", f.to_string())
                .with("probability", rat(&p))
                .with("decimal", decimal(&p, 12))
                .with("method", method))
        }
        Command::Bayes { f1, f2 } => {
            let e = engine(&cfg, &[f1, f2])?;
            let (phi, psi) = (e.formula(f1)?, e.formula(f2)?);
            let pi = e.base_measure()?;
            let mut s = e.state()?;
            let mut m = init_measure(s.model(), &pi)?;
            let c = bayes_check(&mut s, &mut m, &phi, &psi)?;
            Ok(Report::new("bayes", c.equal)
                .with("phi", phi.to_string())
                .with("psi", psi.to_string())
                .with("lhs", rat(&c.lhs))
                .with("rhs", rat(&c.rhs))
                .with("equal", c.equal))
        }
        Command::LewisDemo => lewis_demo(&engine(&cfg, &[])?),
        Command::B6Diag { f1, f2, f3 } => {
            let mut texts = vec![f1.as_str(), f2.as_str()];
            texts.extend(f3.as_deref());
            let e = engine(&cfg, &texts)?;
            let (phi, psi) = (e.formula(f1)?, e.formula(f2)?);
            let eta = f3.as_deref().map(|t| e.formula(t)).transpose()?;
            let r = diagnose_b6(&mut e.state()?, &phi, &psi, eta.as_ref())?;
            let mut report = Report::new("b6-diag", true)
                .with("phi", phi.to_string())
                .with("psi", psi.to_string())
                .with("forward", r.forward)
                .with("backward", r.backward)
                .with("symmetric", r.symmetric);
            if let (Some(eta), Some(star)) = (eta, r.star) {
                report = report.with("eta", eta.to_string()).with("star", star);
            }
            Ok(report)
        }
        Command::CheckProof { file } => check_proof(&cfg, file),
        Command::DumpModel { formulas, steps } => {
            let texts: Vec<&str> = formulas.iter().map(String::as_str).collect();
            let e = engine(&cfg, &texts)?;
            let mut s = e.state()?;
            for text in &texts {
                assign(&mut s, &e.formula(text)?)?;
            }
            for _ in 0..*steps {
                if e.config.schedule != ScheduleMode::Canonical {
                    return Err(CliError::Usage("--steps needs the canonical schedule".into()));
                }
                s.step(None)?;
            }
            let dump = serde_json::to_value(s.model().dump()).expect("dump serializes");
            let mut report = Report::new("dump-model", true).with("schedule", e.schedule_name());
            if let Value::Object(fields) = dump {
                report.body.extend(fields);
            }
            Ok(report)
        }
        Command::Fixtures => fixtures(&cfg),
    }
}

fn collect_subformulas(f: &Formula, out: &mut Vec<Formula>) {
    for c in f.children() {
        collect_subformulas(c, out);
    }
    if !f.children().is_empty() && !out.contains(f) {
        out.push(f.clone());
    }
}

fn lewis_demo(e: &Engine) -> Result<Report, CliError> {
    let n = e.names.len();
    if n > 8 {
        return Err(CliError::Config(format!("lewis-demo needs at most 8 base worlds, got {n}")));
    }
    let mut pairs = 0;
    let mut escaped = 0;
    let mut example = None;
    for am in 1u64..(1 << n) - 1 {
        let a = PropSet::from_mask(0, n, am);
        // Nonempty proper submasks of am.
        let mut bm = (am - 1) & am;
        while bm != 0 {
            let b = PropSet::from_mask(0, n, bm);
            pairs += 1;
            let mut s = ModelState::new(&e.base, &ModelConfig { schedule: ScheduleMode::Demand, ..e.config.clone() })?;
            if lewis_escape(&mut s, &a, &b)? {
                escaped += 1;
                if example.is_none() {
                    let names = |x: &PropSet| x.members().map(|i| e.names[i].clone()).collect::<Vec<_>>();
                    example = Some(json!({"a": names(&a), "b": names(&b)}));
                }
            }
            bm = (bm - 1) & am;
        }
    }
    let mut report = Report::new("lewis-demo", pairs > 0 && escaped == pairs)
        .with("pairs", pairs)
        .with("escaped", escaped);
    if let Some(x) = example {
        report = report.with("example", x);
    }
    Ok(report)
}

fn check_proof(cfg: &EngineConfig, file: &PathBuf) -> Result<Report, CliError> {
    let text = std::fs::read_to_string(file).map_err(|e| CliError::Io(format!("{}: {e}", file.display())))?;
    let script = parse_script(&text).map_err(|e| CliError::Proof(e.to_string()))?;
    let d = script.to_derivation().map_err(|e| CliError::Proof(e.to_string()))?;
    let v = check(&d).map_err(|e| CliError::Proof(e.to_string()))?;
    let logic = match d.logic {
        Logic::DmBL => "DmBL",
        Logic::DmBLStar => "DmBL*",
    };
    let mut report = Report::new("check-proof", v.accepted)
        .with("target", d.target.to_string())
        .with("logic", logic)
        .with("lines", d.lines.len())
        .with("accepted", v.accepted);
    if let Some(f) = &v.failure {
        report = report.with("failure", json!({"line": f.line, "reason": f.reason}));
    }
    if v.accepted && d.logic == Logic::DmBLStar {
        let target_text = d.target.to_string();
        let e = engine(cfg, &[&target_text])?;
        let rep = cross_validate(&d, &mut e.state()?).map_err(|err| match err {
            dmbl_core::proof::CrossError::Eval(ev) => ev.into(),
            other => CliError::Proof(other.to_string()),
        })?;
        report = report.with(
            "model_check",
            json!({"target_valid": rep.target_valid, "violations": rep.violations}),
        );
    }
    Ok(report)
}

/// Three worlds a, b, c; seed ⟨{a,b},{c},{b,c},{a},{c,a},{b}⟩; one canonical
/// step; π = (1/5, 3/10, 1/2).
fn fixtures(cfg: &EngineConfig) -> Result<Report, CliError> {
    if cfg.atoms.is_some() || cfg.worlds.is_some() || cfg.measure.is_some() {
        return Err(CliError::Usage("fixtures uses a built-in base; drop atoms, worlds and measure".into()));
    }
    let base = Base::Worlds {
        names: vec!["a".into(), "b".into(), "c".into()],
        valuation: vec![],
    };
    let set = |m: &[usize]| PropSet::from_indices(0, 3, m.iter().copied());
    let config = ModelConfig {
        schedule: ScheduleMode::Canonical,
        seed: SeedOrder::Explicit(vec![set(&[0, 1]), set(&[2]), set(&[1, 2]), set(&[0]), set(&[0, 2]), set(&[1])]),
        limits: Limits::default(),
    };
    let mut s = ModelState::new(&base, &config)?;
    s.step(None)?;
    let t = s.tower();
    let label = |i: usize| t.label(WorldId { level: 1, index: i });
    let size = s.model().size(1);
    let pi = BaseMeasure::new(vec![
        parse_rational("1/5").unwrap(),
        parse_rational("3/10").unwrap(),
        parse_rational("1/2").unwrap(),
    ])?;
    let m = init_measure(s.model(), &pi)?;
    let worlds: Vec<Value> = (0..size)
        .map(|i| json!({"index": i, "world": label(i), "weight": rat(&m.level(1)[i])}))
        .collect();
    let mut conditionals = Vec::new();
    let mut matches = size == 4;
    let expected: [(&[usize], &[usize], &[&str]); 3] = [
        (&[0], &[0, 1], &["(a,c)", "(c,a)"]),
        (&[1], &[0, 1], &["(b,c)", "(c,b)"]),
        (&[2], &[2], &["(a,c)", "(b,c)", "(c,a)", "(c,b)"]),
    ];
    for (b, a, want) in expected {
        let v = s.f_eval(&t.lift(&set(b), 1)?, &t.lift(&set(a), 1)?)?;
        let mut got: Vec<String> = v.members().map(label).collect();
        got.sort();
        matches &= got == want;
        let names = |x: &[usize]| x.iter().map(|&i| ["a", "b", "c"][i]).collect::<Vec<_>>();
        conditionals.push(json!({"b": names(b), "a": names(a), "value": got}));
    }
    let want_weights = [("(a,c)", "1/5"), ("(b,c)", "3/10"), ("(c,a)", "1/5"), ("(c,b)", "3/10")];
    for (w, p) in want_weights {
        matches &= (0..size).any(|i| label(i) == w && m.level(1)[i].to_string() == p);
    }
    Ok(Report::new("fixtures", matches)
        .with("worlds", worlds)
        .with("conditionals", conditionals)
        .with("matches_expected", matches))
}
