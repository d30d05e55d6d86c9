//! Named, reproducible checks with JSON reports.
//!
//! Every check returns a [`CheckReport`]; errors raised while a check runs are
//! recorded as failures with the error as witness, so a suite never aborts.
//! Groups are built once per [`Workbench`] and shared between checks.

mod appendix;
mod structure;
mod theorems;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::cache::Cache;
use crate::collect::{derive_collector, Collector, NfIndex};
use crate::construct::{construct, BuildConfig, Constructed};
use crate::error::{Error, Result};
use crate::iso::SearchBudget;
use crate::params::FamilyParams;

pub use appendix::{cong_lr, verify_appendix, AppendixGrid, GridPoint, APPENDIX_IDENTITIES};
pub use structure::{verify_series_factors, verify_structure};
pub use theorems::{
    decide_isomorphism, verify_necj2, verify_stretch_j2_m3, verify_sufficiency_grid, verify_theorem, verify_theorem_a, SufficiencyCase,
    IsoVerdict, Theorem,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Timeout,
    Skipped,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Timeout => "timeout",
            Status::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub parameters: Value,
    pub status: Status,
    /// Verified quantities; on failure `failures` lists concrete witnesses.
    pub evidence: Value,
    /// Seconds.
    pub elapsed: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// The report with every timing field zeroed, for reproducibility
    /// comparisons.
    pub fn canonical(&self) -> CheckReport {
        fn strip(v: &mut Value) {
            match v {
                Value::Object(m) => {
                    for (k, x) in m.iter_mut() {
                        if k == "elapsed" {
                            *x = json!(0.0);
                        } else {
                            strip(x);
                        }
                    }
                }
                Value::Array(a) => a.iter_mut().for_each(strip),
                _ => {}
            }
        }
        let mut r = self.clone();
        r.elapsed = 0.0;
        strip(&mut r.evidence);
        r
    }
}

/// Accumulates evidence for one check.
pub(crate) struct Evidence {
    map: Map<String, Value>,
    failures: Vec<Value>,
    timeouts: Vec<String>,
    skipped: bool,
}

impl Evidence {
    fn new() -> Self {
        Evidence {
            map: Map::new(),
            failures: Vec::new(),
            timeouts: Vec::new(),
            skipped: false,
        }
    }

    pub(crate) fn record(&mut self, key: &str, v: impl Serialize) {
        self.map.insert(key.to_string(), to_value(v));
    }

    /// Records `v` under `key`; a false `ok` also files it as a failure.
    pub(crate) fn check(&mut self, key: &str, ok: bool, v: impl Serialize) -> bool {
        let v = to_value(v);
        if !ok {
            self.failures.push(json!({ "check": key, "witness": v.clone() }));
        }
        self.map.insert(key.to_string(), v);
        ok
    }

    pub(crate) fn expect_eq<T: Serialize + PartialEq>(&mut self, key: &str, got: T, want: T) -> bool {
        let ok = got == want;
        self.check(key, ok, json!({ "got": to_value(&got), "expected": to_value(&want) }))
    }

    pub(crate) fn timeout(&mut self, key: &str, v: impl Serialize) {
        self.timeouts.push(key.to_string());
        self.record(key, v);
    }

    pub(crate) fn skip(&mut self, reason: &str) {
        self.skipped = true;
        self.record("skipped", reason);
    }

    fn finish(mut self, id: &str, parameters: Value, start: Instant) -> CheckReport {
        let status = if !self.failures.is_empty() {
            Status::Fail
        } else if !self.timeouts.is_empty() {
            Status::Timeout
        } else if self.skipped {
            Status::Skipped
        } else {
            Status::Pass
        };
        if !self.failures.is_empty() {
            self.map.insert("failures".into(), Value::Array(self.failures));
        }
        if !self.timeouts.is_empty() {
            self.map.insert("timeouts".into(), json!(self.timeouts));
        }
        CheckReport {
            id: id.to_string(),
            parameters,
            status,
            evidence: Value::Object(self.map),
            elapsed: start.elapsed().as_secs_f64(),
        }
    }
}

pub(crate) fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or_else(|e| json!({ "unserializable": e.to_string() }))
}

/// Runs `body`; an error becomes a failure with the error text as witness.
pub(crate) fn run_check(id: &str, parameters: Value, body: impl FnOnce(&mut Evidence) -> Result<()>) -> CheckReport {
    let start = Instant::now();
    let mut ev = Evidence::new();
    if let Err(e) = body(&mut ev) {
        ev.check("error", false, e.to_string());
    }
    ev.finish(id, parameters, start)
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub build: BuildConfig,
    pub budget: SearchBudget,
    /// Random products checked when validating a collector above 2^11 elements.
    pub collector_samples: usize,
    /// Persistent group cache; `None` builds everything in memory.
    pub cache_dir: Option<PathBuf>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            build: BuildConfig::default(),
            budget: SearchBudget::default(),
            collector_samples: 1 << 16,
            cache_dir: None,
        }
    }
}

type Slot<T> = Arc<OnceLock<std::result::Result<Arc<T>, Error>>>;

/// Builds groups and collectors on first use and shares them across checks
/// and threads.
pub struct Workbench {
    pub config: VerifyConfig,
    cache: Option<Cache>,
    groups: Mutex<HashMap<String, Slot<Constructed>>>,
    collectors: Mutex<HashMap<String, Slot<(Collector, NfIndex)>>>,
}

fn slot<T>(map: &Mutex<HashMap<String, Slot<T>>>, key: String) -> Slot<T> {
    map.lock().unwrap().entry(key).or_default().clone()
}

fn memo_key(p: &FamilyParams) -> String {
    format!("{:?}/{}/{}/{}", p.family, p.p, p.m, p.alpha)
}

impl Workbench {
    pub fn new(config: VerifyConfig) -> Self {
        let cache = config.cache_dir.clone().map(Cache::new);
        Workbench {
            config,
            cache,
            groups: Mutex::new(HashMap::new()),
            collectors: Mutex::new(HashMap::new()),
        }
    }

    pub fn group(&self, params: &FamilyParams) -> Result<Arc<Constructed>> {
        let s = slot(&self.groups, memo_key(params));
        s.get_or_init(|| {
            let c = match &self.cache {
                Some(cache) => cache.get_or_build(params, &self.config.build).map(|(c, _)| c),
                None => construct(params, &self.config.build),
            };
            c.map(Arc::new)
        })
        .clone()
    }

    pub fn collector(&self, params: &FamilyParams) -> Result<Arc<(Collector, NfIndex)>> {
        let s = slot(&self.collectors, memo_key(params));
        s.get_or_init(|| {
            let g = self.group(params)?;
            derive_collector(params, &g.group, self.config.collector_samples).map(Arc::new)
        })
        .clone()
    }
}

/// The checks that make up the default suite, in a fixed order.
pub fn default_suite(wb: &Workbench) -> Vec<CheckReport> {
    use crate::params::Family;
    use rayon::prelude::*;
    type Job<'a> = Box<dyn Fn() -> CheckReport + Send + Sync + 'a>;
    let fp = |f, p, m, l| FamilyParams::new(f, p, m, l).expect("valid suite parameters");
    let jobs: Vec<Job> = vec![
        Box::new(|| verify_structure(wb, &fp(Family::J2, 2, 1, 1))),
        Box::new(|| verify_structure(wb, &fp(Family::J2, 2, 2, 1))),
        Box::new(|| verify_structure(wb, &fp(Family::J2, 2, 3, 1))),
        Box::new(|| verify_structure(wb, &fp(Family::J1, 3, 1, 1))),
        Box::new(|| verify_structure(wb, &fp(Family::J1, 5, 1, 1))),
        Box::new(|| verify_structure(wb, &fp(Family::J3, 3, 1, 2))),
        Box::new(|| verify_theorem(wb, Theorem::A)),
        Box::new(|| verify_theorem(wb, Theorem::B)),
        Box::new(|| verify_theorem(wb, Theorem::C)),
        Box::new(|| verify_theorem(wb, Theorem::D)),
        Box::new(|| verify_theorem(wb, Theorem::E)),
        Box::new(|| verify_series_factors(wb, &fp(Family::J1, 5, 1, 1), &fp(Family::J1, 5, 1, 2))),
        Box::new(|| verify_series_factors(wb, &fp(Family::J2, 2, 3, 1), &fp(Family::J2, 2, 3, 3))),
        Box::new(|| verify_appendix(wb, &AppendixGrid::default())),
        Box::new(|| verify_necj2(wb, 1, 3)),
        Box::new(|| verify_necj2(wb, 1, 7)),
        Box::new(|| verify_sufficiency_grid(wb, SufficiencyCase::Case1)),
        Box::new(|| verify_sufficiency_grid(wb, SufficiencyCase::Case2)),
        Box::new(|| verify_sufficiency_grid(wb, SufficiencyCase::Case3)),
        Box::new(|| verify_sufficiency_grid(wb, SufficiencyCase::K)),
        Box::new(|| verify_sufficiency_grid(wb, SufficiencyCase::H2)),
    ];
    jobs.par_iter().map(|j| j()).collect()
}

/// Fixed-width table: id, status, seconds and a short parameter summary.
pub fn summary_table(reports: &[CheckReport]) -> String {
    let w = reports.iter().map(|r| r.id.len()).max().unwrap_or(2).max(5);
    let mut out = String::new();
    let _ = writeln!(out, "{:<w$}  {:<7}  {:>9}  parameters", "check", "status", "seconds");
    for r in reports {
        let _ = writeln!(
            out,
            "{:<w$}  {:<7}  {:>9.3}  {}",
            r.id,
            r.status.to_string(),
            r.elapsed,
            r.parameters
        );
    }
    let pass = reports.iter().filter(|r| r.passed()).count();
    let _ = writeln!(out, "{pass}/{} passed", reports.len());
    out
}

/// The report bundle: a JSON array of reports.
pub fn bundle_json(reports: &[CheckReport]) -> String {
    serde_json::to_string_pretty(reports).unwrap_or_else(|_| "[]".into())
}
