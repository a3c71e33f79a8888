//! Running a parsed experiment and writing its artifacts.
//!
//! Every run writes into the output directory:
//! - `config.txt`, the resolved config;
//! - the result tables (`per_rep.csv`, `summary.csv`, or the kind's own table);
//! - `summary.json` with parameters, estimates, seeds and truncation settings;
//! - `manifest.json` with the config, build id, thread count and a timestamp.
//!
//! A `PARTIAL` marker exists while the run is in progress and is removed
//! only after everything has been written. Result files never contain
//! timestamps, so reruns of one config are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use richardson_core::competition::{run_two_type_markov_seeds, run_two_type_seeds, StopRule, Termination};
use richardson_core::estimators::{
    coexistence_scan, descent_statistics, estimate_mu, estimate_mu_hyperplane, hyperplane_identity, mu_hampered,
    record_probability, record_statistics, shape_check, survival_curve, Engine, Plan, SampleEstimate,
};
use richardson_core::exec::with_threads;
use richardson_core::lattice::Domain;
use richardson_core::stats::Estimate;
use richardson_core::weights::{stream_key, WeightField};
use serde_json::{json, Map, Value};

use crate::config::{ExperimentConfig, Kind, RecordMode};

pub const BUILD_ID: &str = env!("RICHARDSON_BUILD_ID");
pub const PARTIAL_MARKER: &str = "PARTIAL";
const MARKOV_SIMULATE_STREAM: u64 = 0x5349_4d55_4c41;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] richardson_core::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("cannot encode {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

/// How to run, without influence on the results.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; the global pool when absent.
    pub threads: Option<usize>,
    /// The command line, recorded in the manifest.
    pub command: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    /// Replications stopped by a safety horizon or truncation guard.
    pub horizon_hits: u64,
}

struct Output {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Output {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.files.push(p.clone());
        p
    }

    fn text(&mut self, name: &str, body: &str) -> Result<(), RunError> {
        let path = self.path(name);
        fs::write(&path, body).map_err(|source| RunError::Io { path, source })
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), RunError> {
        let path = self.path(name);
        let err = |source| RunError::Csv { path: path.clone(), source };
        let mut w = csv::Writer::from_path(&path).map_err(err)?;
        w.write_record(header).map_err(err)?;
        for r in rows {
            w.write_record(r).map_err(err)?;
        }
        w.flush().map_err(|source| RunError::Io { path: path.clone(), source })
    }

    fn json(&mut self, name: &str, value: &Value) -> Result<(), RunError> {
        let path = self.path(name);
        let mut body =
            serde_json::to_string_pretty(value).map_err(|source| RunError::Json { path: path.clone(), source })?;
        body.push('\n');
        fs::write(&path, body).map_err(|source| RunError::Io { path, source })
    }
}

/// Rows and summaries accumulated by one experiment.
#[derive(Default)]
struct Tables {
    per_rep: Vec<Vec<String>>,
    summary: Vec<Vec<String>>,
    results: Map<String, Value>,
    horizon_hits: u64,
}

impl Tables {
    fn sample(&mut self, quantity: &str, s: &SampleEstimate) {
        for (rep, v) in s.samples.iter().enumerate() {
            self.per_rep.push(vec![rep.to_string(), quantity.to_string(), v.to_string()]);
        }
        self.estimate(quantity, &s.estimate);
    }

    fn estimate(&mut self, quantity: &str, e: &Estimate) {
        self.summary.push(vec![
            quantity.to_string(),
            e.mean.to_string(),
            e.ci_lo.to_string(),
            e.ci_hi.to_string(),
            e.n.to_string(),
        ]);
        self.results.insert(quantity.to_string(), json!(e));
    }
}

fn plan(cfg: &ExperimentConfig) -> Plan {
    Plan::new(cfg.dim, cfg.seed, cfg.reps)
}

/// Runs `cfg` and writes its artifacts.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunReport, RunError> {
    let dir = cfg.out.clone();
    fs::create_dir_all(&dir).map_err(|source| RunError::Io { path: dir.clone(), source })?;
    let marker = dir.join(PARTIAL_MARKER);
    fs::write(&marker, format!("kind={}\n", cfg.kind)).map_err(|source| RunError::Io { path: marker.clone(), source })?;
    let mut out = Output { dir: dir.clone(), files: Vec::new() };

    let tables = match opts.threads {
        Some(n) => with_threads(n, || Ok(compute(cfg, &mut out)))?,
        None => compute(cfg, &mut out),
    }?;

    out.text("config.txt", &cfg.to_text())?;
    if !tables.per_rep.is_empty() {
        out.csv("per_rep.csv", &["rep", "quantity", "value"], &tables.per_rep)?;
    }
    if !tables.summary.is_empty() {
        out.csv("summary.csv", &["quantity", "mean", "ci_lo", "ci_hi", "n"], &tables.summary)?;
    }
    let config: Map<String, Value> = cfg.entries().into_iter().map(|(k, v)| (k, Value::String(v))).collect();
    let truncation: Map<String, Value> = cfg
        .entries()
        .into_iter()
        .filter(|(k, _)| ["W", "M", "overshoot", "x1_max", "k_guard", "horizon_factor", "horizon", "cfg", "cfg2"].contains(&k.as_str()))
        .map(|(k, v)| (k, Value::String(v)))
        .collect();
    out.json(
        "summary.json",
        &json!({
            "kind": cfg.kind.name(),
            "build": BUILD_ID,
            "seed": cfg.seed,
            "reps": cfg.reps,
            "config": config,
            "truncation": truncation,
            "horizon_hits": tables.horizon_hits,
            "results": tables.results,
        }),
    )?;
    let mut files: Vec<String> = out.files.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect();
    files.push("manifest.json".into());
    out.json(
        "manifest.json",
        &json!({
            "build": BUILD_ID,
            "version": env!("CARGO_PKG_VERSION"),
            "timestamp": chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            "threads": opts.threads,
            "command": opts.command,
            "config_text": cfg.to_text(),
            "files": files,
        }),
    )?;
    fs::remove_file(&marker).map_err(|source| RunError::Io { path: marker, source })?;
    Ok(RunReport {
        dir,
        files: out.files,
        horizon_hits: tables.horizon_hits,
    })
}

fn compute(cfg: &ExperimentConfig, out: &mut Output) -> Result<Tables, RunError> {
    let p = &cfg.params;
    let plan = plan(cfg);
    let mut t = Tables::default();
    match cfg.kind {
        Kind::Mu => {
            let s = estimate_mu(&plan, p.lambda.unwrap(), p.n.unwrap())?;
            t.sample("mu", &s);
        }
        Kind::MuHyperplane => {
            let (lambda, n, w) = (p.lambda.unwrap(), p.n.unwrap(), p.w.unwrap());
            let e = estimate_mu_hyperplane(&plan, lambda, n, w)?;
            t.sample("mu_hyperplane", &e.hyperplane);
            t.sample("mu_origin", &e.origin);
            if p.ks == Some(true) {
                let id = hyperplane_identity(&plan, lambda, n, w)?;
                t.results.insert("ks".into(), json!(id.ks));
            }
        }
        Kind::MuHampered => {
            let rows = mu_hampered(&plan, p.lambda.unwrap(), p.n.unwrap(), p.bs.as_ref().unwrap(), p.x1_max.unwrap())
                ?;
            for (b, s) in rows {
                t.sample(&format!("mu_b{b}"), &s);
            }
        }
        Kind::Descent => {
            let s = descent_statistics(&plan, p.b.unwrap(), p.w.unwrap(), p.overshoot.unwrap())?;
            t.sample("x_b", &s.x_b);
            t.sample("x_b_star", &s.x_b_star);
            t.results.insert("violations".into(), json!(s.violations));
        }
        Kind::Records => match p.mode.unwrap() {
            RecordMode::Rates => {
                let s = record_statistics(&plan, p.t.unwrap(), p.mu.unwrap(), p.k_guard.unwrap())?;
                t.sample("infected_rate", &s.infected_rate);
                t.sample("record_rate", &s.record_rate);
                t.results.insert("n_max".into(), json!(s.n_max));
                t.results.insert("truncated".into(), json!(s.truncated));
                t.horizon_hits = s.truncated;
            }
            RecordMode::Probability => {
                let r = record_probability(&plan, p.n.unwrap(), p.k.unwrap())?;
                t.estimate("record_probability", &r.estimate);
                t.results.insert("successes".into(), json!(r.successes));
            }
        },
        Kind::Shape => {
            let s = shape_check(&plan, p.lambda.unwrap(), p.t.unwrap(), p.mu.unwrap())?;
            t.sample("deficiency", &s.deficiency);
            t.sample("deviation", &s.deviation);
            t.results.insert("half_width".into(), json!(s.half_width));
        }
        Kind::SurvivalCurve => {
            let curve = survival_curve(&plan, &cfg.survival_spec())?;
            let rows: Vec<Vec<String>> = curve
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.radius.to_string(),
                        r.survived.to_string(),
                        r.reps.to_string(),
                        r.estimate.mean.to_string(),
                        r.estimate.ci_lo.to_string(),
                        r.estimate.ci_hi.to_string(),
                    ]
                })
                .collect();
            out.csv("survival.csv", &["R", "survived", "reps", "p_hat", "ci_lo", "ci_hi"], &rows)
                ?;
            for (rep, d) in curve.max_distance.iter().enumerate() {
                t.per_rep.push(vec![rep.to_string(), "max_type2_distance".into(), d.to_string()]);
            }
            t.results.insert("rows".into(), json!(curve.rows));
            t.results.insert("half_width".into(), json!(curve.half_width));
            t.horizon_hits = curve.horizon_hits;
        }
        Kind::CoexistenceScan => {
            let r = p.radii.as_ref().unwrap()[0];
            let rows = coexistence_scan(&plan, p.ns.as_ref().unwrap(), r, p.swapped.unwrap(), p.mu.unwrap())?;
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.both.to_string(),
                        r.reps.to_string(),
                        r.estimate.mean.to_string(),
                        r.estimate.ci_lo.to_string(),
                        r.estimate.ci_hi.to_string(),
                        r.horizon_hits.to_string(),
                    ]
                })
                .collect();
            out.csv(
                "coexistence.csv",
                &["n", "both", "reps", "p_hat", "ci_lo", "ci_hi", "horizon_hits"],
                &table,
            )
            ?;
            t.results.insert("rows".into(), json!(rows));
            t.horizon_hits = rows.iter().map(|r| r.horizon_hits).sum();
        }
        Kind::Simulate => simulate(cfg, out, &mut t)?,
    }
    Ok(t)
}

fn simulate(cfg: &ExperimentConfig, out: &mut Output, t: &mut Tables) -> Result<(), RunError> {
    let p = &cfg.params;
    let dom = Domain::cube(cfg.dim, p.m.unwrap())?;
    let (one, two) = cfg.seed_config().enumerate_within(&dom)?;
    let mut stop = match &p.radii {
        Some(r) => StopRule::type2_escapes(r[0]),
        None => StopRule::exhaust(),
    };
    stop.horizon = p.horizon;
    let rep = p.rep.unwrap();
    let (map, outcome) = match p.engine.unwrap() {
        Engine::Weights => {
            let f = WeightField::new(cfg.seed, rep, p.clock_mode.unwrap(), p.lambda1.unwrap(), p.lambda2.unwrap())
                ?;
            run_two_type_seeds(&dom, &one, &two, &f, &stop)?
        }
        Engine::Markov => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(stream_key(cfg.seed, rep, MARKOV_SIMULATE_STREAM));
            run_two_type_markov_seeds(&dom, &one, &two, p.lambda1.unwrap(), p.lambda2.unwrap(), &mut rng, &stop)
                ?
        }
    };
    let count = |ty| map.count(ty).to_string();
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    let termination = match outcome.termination {
        Termination::ReachedRadius => "reached_radius",
        Termination::Enclosed => "enclosed",
        Termination::Horizon => "horizon",
        Termination::Exhausted => "exhausted",
    };
    let rows: Vec<Vec<String>> = [
        ("termination", termination.to_string()),
        ("type1_sites", count(richardson_core::weights::InfectionType::One)),
        ("type2_sites", count(richardson_core::weights::InfectionType::Two)),
        ("max_distance_type1", outcome.max_distance[0].to_string()),
        ("max_distance_type2", outcome.max_distance[1].to_string()),
        ("survived_to_r", outcome.survived_to_r.to_string()),
        ("type2_enclosure_time", opt(outcome.enclosure_time)),
        ("type1_enclosure_time", opt(outcome.type1_enclosure_time)),
        ("events", outcome.event_count.to_string()),
        ("final_time", outcome.final_time.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| vec![k.to_string(), v])
    .collect();
    out.csv("outcome.csv", &["quantity", "value"], &rows)?;
    if p.emit_events == Some(true) {
        let mut header: Vec<String> = vec!["time".into()];
        header.extend((1..=cfg.dim).map(|i| format!("x{i}")));
        header.push("type".into());
        let rows: Vec<Vec<String>> = map
            .events()
            .map(|e| {
                let mut r = vec![e.time.to_string()];
                r.extend(e.site.coords().iter().map(i32::to_string));
                r.push(e.ty.label().to_string());
                r
            })
            .collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        out.csv("events.csv", &header, &rows)?;
    }
    t.results.insert("termination".into(), json!(termination));
    t.results.insert("events".into(), json!(outcome.event_count));
    t.horizon_hits = (outcome.termination == Termination::Horizon) as u64;
    Ok(())
}

/// Whether `dir` holds the marker of an unfinished run.
pub fn is_partial(dir: &Path) -> bool {
    dir.join(PARTIAL_MARKER).exists()
}
