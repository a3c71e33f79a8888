//! Experiment configuration: a plain `key=value` format, one or more
//! assignments per line, `#` starting a comment.
//!
//! Parsing fills in the defaults of the chosen experiment kind and checks
//! every precondition eagerly, so a config that parses will run. The
//! resolved config prints back with [`ExperimentConfig::to_text`], which
//! parses to the same value.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use richardson_core::calibration::Calibration;
use richardson_core::estimators::{Engine, SurvivalSpec};
use richardson_core::lattice::{Domain, SeedConfig, SeedRegion, MAX_DIM};
use richardson_core::weights::{ClockMode, WeightField};

/// Where a setting came from, for diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Text { line: usize, col: usize },
    /// Position among the command-line overrides, from 1.
    Arg(usize),
    /// A default or a requirement of the experiment kind.
    Kind,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Text { line, col } => write!(f, "line {line}, column {col}"),
            Location::Arg(i) => write!(f, "override {i}"),
            Location::Kind => f.write_str("experiment kind"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{at}: {message}")]
pub struct ConfigError {
    pub at: Location,
    pub message: String,
}

fn fail<T>(at: Location, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        at,
        message: message.into(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Mu,
    MuHyperplane,
    MuHampered,
    Descent,
    Records,
    Shape,
    SurvivalCurve,
    CoexistenceScan,
    Simulate,
}

impl Kind {
    pub const ALL: [Kind; 9] = [
        Kind::Mu,
        Kind::MuHyperplane,
        Kind::MuHampered,
        Kind::Descent,
        Kind::Records,
        Kind::Shape,
        Kind::SurvivalCurve,
        Kind::CoexistenceScan,
        Kind::Simulate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Mu => "mu",
            Kind::MuHyperplane => "mu_hyperplane",
            Kind::MuHampered => "mu_hampered",
            Kind::Descent => "descent",
            Kind::Records => "records",
            Kind::Shape => "shape",
            Kind::SurvivalCurve => "survival_curve",
            Kind::CoexistenceScan => "coexistence_scan",
            Kind::Simulate => "simulate",
        }
    }

    /// Keys this kind accepts besides `kind`, `dim`, `seed`, `reps`, `out`.
    fn keys(self) -> &'static [&'static str] {
        match self {
            Kind::Mu => &["lambda", "n"],
            Kind::MuHyperplane => &["lambda", "n", "W", "ks"],
            Kind::MuHampered => &["lambda", "n", "bs", "x1_max"],
            Kind::Descent => &["b", "W", "overshoot"],
            Kind::Records => &["mode", "t", "mu", "k_guard", "n", "k"],
            Kind::Shape => &["lambda", "t", "mu"],
            Kind::SurvivalCurve => &["cfg", "cfg2", "lambda1", "lambda2", "R", "M", "engine", "mu", "horizon_factor"],
            Kind::CoexistenceScan => &["R", "ns", "swapped", "mu"],
            Kind::Simulate => &[
                "cfg",
                "cfg2",
                "lambda1",
                "lambda2",
                "clock_mode",
                "M",
                "R",
                "rep",
                "engine",
                "horizon",
                "emit_events",
            ],
        }
    }

    fn min_reps(self) -> u64 {
        match self {
            Kind::SurvivalCurve | Kind::CoexistenceScan | Kind::Simulate => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown experiment kind {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordMode {
    /// `Y(t)/t` and `Y→(t)/t`.
    Rates,
    /// Probability that `n·e1` is reached no later than the next `k` axis sites.
    Probability,
}

/// Conversion between a setting's text and its value.
trait Field: Sized {
    const EXPECTED: &'static str;
    fn parse_field(raw: &str) -> Result<Self, String>;
    fn show(&self) -> String;
}

macro_rules! numeric_field {
    ($($t:ty => $what:literal),*) => {$(
        impl Field for $t {
            const EXPECTED: &'static str = $what;
            fn parse_field(raw: &str) -> Result<Self, String> {
                raw.parse().map_err(|_| format!("expected {}, got {raw:?}", $what))
            }
            fn show(&self) -> String {
                self.to_string()
            }
        }
    )*};
}

numeric_field!(u32 => "a non-negative integer", u64 => "a non-negative integer", usize => "a non-negative integer", f64 => "a number");

impl Field for bool {
    const EXPECTED: &'static str = "true or false";
    fn parse_field(raw: &str) -> Result<Self, String> {
        raw.parse().map_err(|_| format!("expected true or false, got {raw:?}"))
    }
    fn show(&self) -> String {
        self.to_string()
    }
}

impl Field for Vec<u32> {
    const EXPECTED: &'static str = "a comma-separated list of non-negative integers";
    fn parse_field(raw: &str) -> Result<Self, String> {
        raw.split(',')
            .map(|v| v.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| format!("expected {}, got {raw:?}", Self::EXPECTED))
    }
    fn show(&self) -> String {
        self.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }
}

impl Field for SeedRegion {
    const EXPECTED: &'static str = "a region descriptor";
    fn parse_field(raw: &str) -> Result<Self, String> {
        raw.parse().map_err(|e: richardson_core::Error| e.to_string())
    }
    fn show(&self) -> String {
        self.to_string()
    }
}

impl Field for Engine {
    const EXPECTED: &'static str = "weights or markov";
    fn parse_field(raw: &str) -> Result<Self, String> {
        match raw {
            "weights" => Ok(Engine::Weights),
            "markov" => Ok(Engine::Markov),
            _ => Err(format!("expected weights or markov, got {raw:?}")),
        }
    }
    fn show(&self) -> String {
        match self {
            Engine::Weights => "weights",
            Engine::Markov => "markov",
        }
        .into()
    }
}

impl Field for ClockMode {
    const EXPECTED: &'static str = "single or two";
    fn parse_field(raw: &str) -> Result<Self, String> {
        match raw {
            "single" => Ok(ClockMode::Single),
            "two" => Ok(ClockMode::Two),
            _ => Err(format!("expected single or two, got {raw:?}")),
        }
    }
    fn show(&self) -> String {
        match self {
            ClockMode::Single => "single",
            ClockMode::Two => "two",
        }
        .into()
    }
}

impl Field for RecordMode {
    const EXPECTED: &'static str = "rates or probability";
    fn parse_field(raw: &str) -> Result<Self, String> {
        match raw {
            "rates" => Ok(RecordMode::Rates),
            "probability" => Ok(RecordMode::Probability),
            _ => Err(format!("expected rates or probability, got {raw:?}")),
        }
    }
    fn show(&self) -> String {
        match self {
            RecordMode::Rates => "rates",
            RecordMode::Probability => "probability",
        }
        .into()
    }
}

macro_rules! params {
    ($($field:ident: $ty:ty = $key:literal, $doc:literal;)*) => {
        /// Experiment parameters; after parsing, exactly the keys of the
        /// config's kind are set.
        #[derive(Clone, Debug, Default, PartialEq)]
        pub struct Params {
            $(#[doc = $doc] pub $field: Option<$ty>,)*
        }

        impl Params {
            const KEYS: &'static [&'static str] = &[$($key),*];

            fn set(&mut self, key: &str, raw: &str) -> Result<(), String> {
                match key {
                    $($key => self.$field = Some(<$ty as Field>::parse_field(raw)?),)*
                    _ => unreachable!("checked against KEYS"),
                }
                Ok(())
            }

            fn is_set(&self, key: &str) -> bool {
                match key {
                    $($key => self.$field.is_some(),)*
                    _ => false,
                }
            }

            fn write(&self, out: &mut String) {
                $(if let Some(v) = &self.$field {
                    let _ = writeln!(out, "{}={}", $key, Field::show(v));
                })*
            }
        }
    };
}

params! {
    lambda: f64 = "lambda", "Rate of one-type growth.";
    lambda1: f64 = "lambda1", "Rate of type 1.";
    lambda2: f64 = "lambda2", "Rate of type 2.";
    clock_mode: ClockMode = "clock_mode", "One shared clock per edge or one per type.";
    n: u32 = "n", "Axis distance.";
    w: u32 = "W", "Hyperplane truncation half-width.";
    bs: Vec<u32> = "bs", "Tube radii.";
    b: u32 = "b", "Hyperplane offset for descent counts.";
    x1_max: u32 = "x1_max", "Tube length.";
    overshoot: u32 = "overshoot", "How far past the hyperplane descent paths may run.";
    t: f64 = "t", "Observation time.";
    mu: f64 = "mu", "Time constant used to size horizons.";
    k_guard: usize = "k_guard", "Guard band below the axis horizon.";
    mode: RecordMode = "mode", "Which record quantity to estimate.";
    k: u32 = "k", "Look-ahead for record probabilities.";
    cfg: SeedRegion = "cfg", "Type-1 seed region.";
    cfg2: SeedRegion = "cfg2", "Type-2 seed region.";
    radii: Vec<u32> = "R", "Survival radii (a single radius where one is needed).";
    m: u32 = "M", "Box half-width.";
    engine: Engine = "engine", "Competition engine.";
    horizon_factor: f64 = "horizon_factor", "Safety horizon in units of R·mu/min lambda.";
    ns: Vec<u32> = "ns", "Seed separations.";
    swapped: bool = "swapped", "Exchange the two types.";
    ks: bool = "ks", "Also test the hyperplane distributional identity.";
    rep: u64 = "rep", "Replication index.";
    horizon: f64 = "horizon", "Time limit.";
    emit_events: bool = "emit_events", "Write the infection log.";
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub dim: usize,
    pub seed: u64,
    pub reps: u64,
    pub out: PathBuf,
    pub params: Params,
}

impl ExperimentConfig {
    /// Canonical text form: the global keys, then every parameter.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kind={}", self.kind);
        let _ = writeln!(s, "dim={}", self.dim);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "reps={}", self.reps);
        let _ = writeln!(s, "out={}", self.out.display());
        self.params.write(&mut s);
        s
    }

    /// `(key, value)` pairs in canonical order.
    pub fn entries(&self) -> Vec<(String, String)> {
        self.to_text()
            .lines()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    pub fn seed_config(&self) -> SeedConfig {
        let p = &self.params;
        SeedConfig::new(
            self.dim,
            p.cfg.clone().unwrap_or(SeedRegion::Empty),
            p.cfg2.clone().unwrap_or(SeedRegion::Origin),
        )
    }

    /// Survival experiment described by a `survival_curve` config.
    pub fn survival_spec(&self) -> SurvivalSpec {
        let p = &self.params;
        let mut spec = SurvivalSpec::new(
            self.seed_config(),
            p.lambda2.unwrap_or(1.0),
            p.radii.clone().unwrap_or_default(),
            p.mu.unwrap_or(1.0),
        );
        spec.lambda1 = p.lambda1.unwrap_or(1.0);
        spec.half_width = p.m;
        spec.engine = p.engine.unwrap_or(Engine::Weights);
        spec.horizon_factor = p.horizon_factor.unwrap_or(10.0);
        spec
    }
}

struct Assignment {
    key: String,
    value: String,
    at: Location,
}

fn tokenize(text: &str) -> Result<Vec<Assignment>, ConfigError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let mut rest = line;
        while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
            let col = line.len() - rest.len() + start + 1;
            let tail = &rest[start..];
            let end = tail.find(char::is_whitespace).unwrap_or(tail.len());
            let at = Location::Text { line: i + 1, col };
            out.push(split_assignment(&tail[..end], at)?);
            rest = &tail[end..];
        }
    }
    Ok(out)
}

fn split_assignment(token: &str, at: Location) -> Result<Assignment, ConfigError> {
    match token.split_once('=') {
        Some((k, v)) if !k.is_empty() => Ok(Assignment {
            key: k.to_string(),
            value: v.to_string(),
            at,
        }),
        _ => fail(at, format!("expected key=value, got {token:?}")),
    }
}

const GLOBAL_KEYS: [&str; 5] = ["kind", "dim", "seed", "reps", "out"];

/// Parses a config text on its own.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    parse_config_with(text, &[], None)
}

/// Parses `text`, then applies `overrides` (each `key=value`), which win
/// over the text. `kind`, when given, is the experiment the caller asked
/// for; a config naming a different kind is rejected.
pub fn parse_config_with(text: &str, overrides: &[String], kind: Option<Kind>) -> Result<ExperimentConfig, ConfigError> {
    let mut assignments = tokenize(text)?;
    let mut seen: HashMap<String, Location> = HashMap::new();
    for a in &assignments {
        if let Some(first) = seen.insert(a.key.clone(), a.at) {
            return fail(a.at, format!("duplicate key `{}` (first set at {first})", a.key));
        }
    }
    for (i, o) in overrides.iter().enumerate() {
        let a = split_assignment(o, Location::Arg(i + 1))?;
        assignments.retain(|b| b.key != a.key);
        assignments.push(a);
    }

    let mut where_: HashMap<&str, Location> = HashMap::new();
    let mut values: HashMap<&str, &str> = HashMap::new();
    for a in &assignments {
        let known = GLOBAL_KEYS.contains(&a.key.as_str()) || Params::KEYS.contains(&a.key.as_str());
        if !known {
            return fail(a.at, format!("unknown key `{}`", a.key));
        }
        where_.insert(&a.key, a.at);
        values.insert(&a.key, &a.value);
    }
    let loc = |key: &str| where_.get(key).copied().unwrap_or(Location::Kind);

    let named = values
        .get("kind")
        .map(|v| v.parse::<Kind>().or_else(|e| fail(loc("kind"), e)))
        .transpose()?;
    let kind = match (named, kind) {
        (Some(a), Some(b)) if a != b => {
            return fail(loc("kind"), format!("config is for kind={a} but {b} was requested"))
        }
        (Some(k), _) | (None, Some(k)) => k,
        (None, None) => return fail(Location::Kind, "missing key `kind`"),
    };
    let global = |key: &str, default: u64| -> Result<u64, ConfigError> {
        values
            .get(key)
            .map_or(Ok(default), |v| u64::parse_field(v).or_else(|e| fail(loc(key), format!("{key}: {e}"))))
    };
    let dim = global("dim", 2)? as usize;
    let seed = global("seed", 0)?;
    let reps = global("reps", 100)?;
    let out = PathBuf::from(values.get("out").copied().unwrap_or("results"));

    let mut params = Params::default();
    for a in &assignments {
        if GLOBAL_KEYS.contains(&a.key.as_str()) {
            continue;
        }
        if !kind.keys().contains(&a.key.as_str()) {
            return fail(a.at, format!("key `{}` does not apply to kind={kind}", a.key));
        }
        params.set(&a.key, &a.value).or_else(|e| fail(a.at, format!("{}: {e}", a.key)))?;
    }

    let mut cfg = ExperimentConfig {
        kind,
        dim,
        seed,
        reps,
        out,
        params,
    };
    fill_defaults(&mut cfg).or_else(|(key, msg)| fail(loc(key), msg))?;
    validate(&cfg).or_else(|(key, msg)| fail(loc(key), msg))?;
    Ok(cfg)
}

type Check = Result<(), (&'static str, String)>;

fn fill_defaults(cfg: &mut ExperimentConfig) -> Check {
    let cal = Calibration::defaults();
    let mu_pilot = || cal.mu_pilot(cfg.dim).map_err(|e| ("dim", e.to_string()));
    let p = &mut cfg.params;
    match cfg.kind {
        Kind::Mu => {
            p.lambda.get_or_insert(1.0);
            p.n.get_or_insert(64);
        }
        Kind::MuHyperplane => {
            p.lambda.get_or_insert(1.0);
            let n = *p.n.get_or_insert(32);
            p.w.get_or_insert(n.saturating_mul(4));
            p.ks.get_or_insert(false);
        }
        Kind::MuHampered => {
            p.lambda.get_or_insert(1.0);
            let n = *p.n.get_or_insert(256);
            p.bs.get_or_insert_with(|| vec![2, 4, 8, 16, 32]);
            p.x1_max.get_or_insert(n.saturating_add(16));
        }
        Kind::Descent => {
            let b = *p.b.get_or_insert(8);
            p.w.get_or_insert(b.saturating_mul(16));
            p.overshoot.get_or_insert(b);
        }
        Kind::Records => {
            let mode = *p.mode.get_or_insert(RecordMode::Rates);
            match mode {
                RecordMode::Rates => {
                    for key in ["n", "k"] {
                        if p.is_set(key) {
                            return Err((key, format!("key `{key}` needs mode=probability")));
                        }
                    }
                    p.t.get_or_insert(200.0);
                    let mu = mu_pilot()?;
                    cfg.params.mu.get_or_insert(mu);
                    cfg.params.k_guard.get_or_insert(cal.truncation.k_guard);
                }
                RecordMode::Probability => {
                    for key in ["t", "mu", "k_guard"] {
                        if p.is_set(key) {
                            return Err((key, format!("key `{key}` needs mode=rates")));
                        }
                    }
                    p.n.get_or_insert(64);
                    p.k.get_or_insert(64);
                }
            }
        }
        Kind::Shape => {
            p.lambda.get_or_insert(1.0);
            p.t.get_or_insert(150.0);
            let mu = mu_pilot()?;
            cfg.params.mu.get_or_insert(mu);
        }
        Kind::SurvivalCurve => {
            if p.cfg.is_none() {
                return Err(("cfg", "missing key `cfg` (type-1 seed region)".into()));
            }
            let radii = p.radii.as_ref().ok_or(("R", "missing key `R` (survival radii)".to_string()))?;
            let r_max = radii.iter().copied().max().unwrap_or(0);
            p.m.get_or_insert(r_max.saturating_mul(2));
            p.cfg2.get_or_insert(SeedRegion::Origin);
            p.lambda1.get_or_insert(1.0);
            p.lambda2.get_or_insert(1.0);
            p.engine.get_or_insert(Engine::Weights);
            p.horizon_factor.get_or_insert(cal.truncation.horizon_factor);
            let mu = mu_pilot()?;
            cfg.params.mu.get_or_insert(mu);
        }
        Kind::CoexistenceScan => {
            p.radii.get_or_insert_with(|| vec![64]);
            p.ns.get_or_insert_with(|| vec![1, 4, 16, 32]);
            p.swapped.get_or_insert(false);
            let mu = mu_pilot()?;
            cfg.params.mu.get_or_insert(mu);
        }
        Kind::Simulate => {
            if p.cfg.is_none() {
                return Err(("cfg", "missing key `cfg` (type-1 seed region)".into()));
            }
            p.cfg2.get_or_insert(SeedRegion::Origin);
            p.lambda1.get_or_insert(1.0);
            p.lambda2.get_or_insert(1.0);
            p.clock_mode.get_or_insert(ClockMode::Two);
            p.m.get_or_insert(32);
            p.rep.get_or_insert(0);
            p.engine.get_or_insert(Engine::Weights);
            p.emit_events.get_or_insert(false);
        }
    }
    Ok(())
}

fn positive(key: &'static str, v: Option<f64>) -> Check {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => {
            let what = if key.starts_with("lambda") { "lambda > 0" } else { "a positive finite value" };
            Err((key, format!("{key} must satisfy {what}, got {x}")))
        }
        _ => Ok(()),
    }
}

fn at_least(key: &'static str, v: Option<u32>, min: u32) -> Check {
    match v {
        Some(x) if x < min => Err((key, format!("{key} must be at least {min}, got {x}"))),
        _ => Ok(()),
    }
}

fn core(key: &'static str) -> impl Fn(richardson_core::Error) -> (&'static str, String) {
    move |e| (key, e.to_string())
}

fn validate(cfg: &ExperimentConfig) -> Check {
    if !(1..=MAX_DIM).contains(&cfg.dim) {
        return Err(("dim", format!("dim must be between 1 and {MAX_DIM}, got {}", cfg.dim)));
    }
    if cfg.reps < cfg.kind.min_reps() {
        return Err(("reps", format!("reps must be at least {}, got {}", cfg.kind.min_reps(), cfg.reps)));
    }
    let out = cfg.out.to_string_lossy();
    if out.is_empty() || out.contains(|c: char| c.is_whitespace() || c == '#') {
        return Err(("out", format!("output directory {out:?} must be nonempty, without spaces or '#'")));
    }
    let p = &cfg.params;
    for (key, v) in [
        ("lambda", p.lambda),
        ("lambda1", p.lambda1),
        ("lambda2", p.lambda2),
        ("t", p.t),
        ("mu", p.mu),
        ("horizon_factor", p.horizon_factor),
        ("horizon", p.horizon),
    ] {
        positive(key, v)?;
    }
    match cfg.kind {
        Kind::Mu => at_least("n", p.n, 1)?,
        Kind::MuHyperplane => {
            at_least("n", p.n, 1)?;
            let n = p.n.unwrap();
            if (p.w.unwrap() as u64) < 4 * n as u64 {
                return Err(("W", format!("W must be at least 4n = {}, got {}", 4 * n as u64, p.w.unwrap())));
            }
        }
        Kind::MuHampered => {
            at_least("n", p.n, 1)?;
            if p.bs.as_ref().unwrap().is_empty() {
                return Err(("bs", "bs must list at least one tube radius".into()));
            }
            if p.x1_max.unwrap() < p.n.unwrap() {
                return Err(("x1_max", format!("x1_max must be at least n={}", p.n.unwrap())));
            }
        }
        Kind::Descent => {
            at_least("b", p.b, 1)?;
            if p.w.unwrap() < p.b.unwrap() {
                return Err(("W", format!("W must be at least b={}", p.b.unwrap())));
            }
        }
        Kind::Records => {}
        Kind::Shape => {
            if cfg.dim != 2 {
                return Err(("dim", "shape diagnostics need dim=2".into()));
            }
        }
        Kind::SurvivalCurve => {
            let spec = cfg.survival_spec();
            spec.validate().map_err(|e| {
                let key = match e.to_string() {
                    m if m.contains("lambda1") => "lambda1",
                    m if m.contains("lambda") => "lambda2",
                    _ => "R",
                };
                (key, e.to_string())
            })?;
            spec.seeds.enumerate_within(&Domain::cube(cfg.dim, spec.box_half_width()).map_err(core("M"))?).map_err(core("cfg"))?;
        }
        Kind::CoexistenceScan => {
            if p.radii.as_ref().unwrap().len() != 1 {
                return Err(("R", "coexistence_scan takes a single radius R".into()));
            }
            let ns = p.ns.as_ref().unwrap();
            if ns.is_empty() || ns.contains(&0) {
                return Err(("ns", "ns must list positive separations".into()));
            }
        }
        Kind::Simulate => {
            WeightField::new(cfg.seed, p.rep.unwrap(), p.clock_mode.unwrap(), p.lambda1.unwrap(), p.lambda2.unwrap())
                .map_err(core("clock_mode"))?;
            if p.engine == Some(Engine::Markov) && p.clock_mode == Some(ClockMode::Single) {
                return Err(("engine", "the Markov engine has no shared clocks; use clock_mode=two".into()));
            }
            let m = p.m.unwrap();
            if let Some(radii) = &p.radii {
                if radii.len() != 1 {
                    return Err(("R", "simulate takes a single stop radius R".into()));
                }
                if 2 * radii[0] as u64 > m as u64 {
                    return Err(("R", format!("R={} exceeds the domain rule M=2R with M={m}", radii[0])));
                }
            }
            let dom = Domain::cube(cfg.dim, m).map_err(core("M"))?;
            cfg.seed_config().enumerate_within(&dom).map_err(core("cfg"))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn survival_example_parses() {
        let c = parse_config("kind=survival_curve cfg=hyperplane:W=256 lambda2=1.0 R=16,32,64 reps=2000 seed=7").unwrap();
        assert_eq!(c.kind, Kind::SurvivalCurve);
        assert_eq!(c.reps, 2000);
        assert_eq!(c.seed, 7);
        assert_eq!(c.params.radii, Some(vec![16, 32, 64]));
        assert_eq!(c.params.m, Some(128));
        assert_eq!(c.params.cfg, Some(SeedRegion::Hyperplane { half_width: 256 }));
    }

    #[test]
    fn negative_rate_names_the_precondition() {
        let e = parse_config("kind=survival_curve cfg=hyperplane:W=256 R=16\nlambda2=-1").unwrap_err();
        assert_eq!(e.at, Location::Text { line: 2, col: 1 });
        assert!(e.message.contains("lambda > 0"), "{e}");
    }

    #[test]
    fn short_half_axis_breaks_the_domain_rule() {
        let e = parse_config("kind=survival_curve cfg=halfaxis:L=64 R=128").unwrap_err();
        assert!(e.message.contains("exceeds the domain rule M=2R"), "{e}");
        assert_eq!(e.at, Location::Text { line: 1, col: 39 });
    }

    #[test]
    fn diagnostics_carry_positions() {
        let e = parse_config("kind=mu\n  bogus=1").unwrap_err();
        assert_eq!(e.at, Location::Text { line: 2, col: 3 });
        assert!(e.message.contains("unknown key"));
        let e = parse_config("kind=mu n=abc").unwrap_err();
        assert_eq!(e.at, Location::Text { line: 1, col: 9 });
        assert!(e.message.contains("integer"));
        let e = parse_config("kind=mu R=3").unwrap_err();
        assert!(e.message.contains("does not apply"));
        let e = parse_config("kind=mu n=3 n=4").unwrap_err();
        assert!(e.message.contains("duplicate"));
        let e = parse_config("kind=mu oops").unwrap_err();
        assert!(e.message.contains("key=value"));
        assert!(parse_config("n=3").unwrap_err().message.contains("missing key `kind`"));
    }

    #[test]
    fn zero_reps_is_rejected() {
        let e = parse_config("kind=mu reps=0").unwrap_err();
        assert!(e.message.contains("reps must be at least"));
    }

    #[test]
    fn comments_and_overrides() {
        let text = "kind=mu # time constant\n# whole-line comment\nn=32 seed=1\n";
        let c = parse_config_with(text, &["seed=9".into()], Some(Kind::Mu)).unwrap();
        assert_eq!((c.seed, c.params.n), (9, Some(32)));
        let e = parse_config_with(text, &[], Some(Kind::Descent)).unwrap_err();
        assert!(e.message.contains("was requested"));
        let e = parse_config_with("", &["lambda=0".into()], Some(Kind::Mu)).unwrap_err();
        assert_eq!(e.at, Location::Arg(1));
    }

    #[test]
    fn record_modes_take_their_own_keys() {
        let c = parse_config("kind=records mode=probability").unwrap();
        assert_eq!((c.params.n, c.params.k, c.params.t), (Some(64), Some(64), None));
        assert!(parse_config("kind=records n=3").is_err());
        assert!(parse_config("kind=records mode=probability t=3").is_err());
    }

    #[test]
    fn single_clock_needs_equal_rates() {
        let e = parse_config("kind=simulate cfg=origin cfg2=empty clock_mode=single lambda2=2").unwrap_err();
        assert!(e.message.to_lowercase().contains("single"), "{e}");
        assert!(parse_config("kind=simulate cfg=halfaxis:L=8 clock_mode=single M=8").is_ok());
    }

    #[test]
    fn defaults_are_explicit_in_the_text() {
        let c = parse_config("kind=descent").unwrap();
        let text = c.to_text();
        assert!(text.contains("W=128\n") && text.contains("overshoot=8\n"), "{text}");
        assert_eq!(parse_config(&text).unwrap(), c);
    }
}
