use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use mcdw::cache::{cache_key, default_cache_dir, Cache};
use mcdw::construct::BuildConfig;
use mcdw::enumerate::EnumLimits;
use mcdw::iso::SearchBudget;
use mcdw::params::{Family, FamilyParams};
use mcdw::verify::{
    bundle_json, decide_isomorphism, default_suite, summary_table, verify_appendix, verify_necj2,
    verify_series_factors, verify_stretch_j2_m3, verify_structure, verify_sufficiency_grid, verify_theorem,
    AppendixGrid, CheckReport, IsoVerdict, Status, SufficiencyCase, Theorem, VerifyConfig, Workbench,
};
use mcdw::Error;

const EXIT_FAIL: u8 = 1;
const EXIT_TIMEOUT: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "mcdw", version, about = "Macdonald-group workbench")]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct ConfigArgs {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Group cache directory (default: $MCDW_CACHE, else ~/.cache/mcdw).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Build everything in memory.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Worker threads for searches (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    /// Live-coset limit of the enumerator.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    max_cosets: Option<u64>,
    /// Largest group held as a dense table.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    dense_cap: Option<u64>,
    /// Time budget per isomorphism search, in seconds.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_secs: Option<u64>,
}

#[derive(Args, Clone)]
struct GroupArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    ell: Option<i64>,
    /// Parameter of G(β).
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<i64>,
}

#[derive(Args, Clone)]
struct PairArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long = "ellA", allow_hyphen_values = true)]
    ell_a: i64,
    #[arg(long = "ellB", allow_hyphen_values = true)]
    ell_b: i64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build (or load) a group and print its order and class.
    Construct(GroupArgs),
    /// Upper central series with factor invariants.
    Series(GroupArgs),
    /// Decide whether two members of a family are isomorphic.
    Iso {
        #[command(flatten)]
        pair: PairArgs,
        /// Where to write the certificate (default: <cache>/certificates/).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run named checks; with no selector, the default suite.
    Verify(VerifyArgs),
    /// Evaluate the collection identities for J_2, m = 3.
    Appendix {
        #[arg(long, value_delimiter = ',', default_values_t = vec![1i64, 3])]
        ell: Vec<i64>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    theorem: Option<Theorem>,
    #[arg(long, value_enum)]
    sufficiency: Option<SufficiencyCase>,
    /// Structure of one group (needs --family and its parameters).
    #[arg(long)]
    structure: bool,
    /// Termwise series comparison (needs --family, --ellA, --ellB).
    #[arg(long)]
    series: bool,
    /// The m = 2 residue system between --ellA and --ellB.
    #[arg(long)]
    necj2: bool,
    /// Opt-in: exhausted search J_2(9) vs J_2(25).
    #[arg(long)]
    stretch: bool,
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    ell: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<i64>,
    #[arg(long = "ellA", allow_hyphen_values = true)]
    ell_a: Option<i64>,
    #[arg(long = "ellB", allow_hyphen_values = true)]
    ell_b: Option<i64>,
    /// Also write the report bundle to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    Family::ALL
        .iter()
        .copied()
        .find(|f| f.to_string().eq_ignore_ascii_case(s))
        .ok_or_else(|| format!("unknown family {s}"))
}

/// The prime and exponent implied by the family when not given.
fn default_pm(family: Family, p: Option<u64>, m: Option<u32>) -> Result<(u64, u32), String> {
    use mcdw::params::Case;
    let p = match (p, family.case()) {
        (Some(p), _) => p,
        (None, Some(Case::Case2)) => 2,
        (None, Some(Case::Case3)) => 3,
        _ => return Err(format!("--p is required for {family}")),
    };
    Ok((p, m.unwrap_or(1)))
}

fn group_params(family: Family, p: Option<u64>, m: Option<u32>, ell: Option<i64>, beta: Option<i64>) -> Result<FamilyParams, String> {
    if family == Family::G {
        return beta.map(FamilyParams::macdonald).ok_or_else(|| "--beta is required for G".into());
    }
    let (p, m) = default_pm(family, p, m)?;
    let ell = ell.ok_or("--ell is required")?;
    FamilyParams::new(family, p, m, ell).map_err(|e| e.to_string())
}

struct Ctx {
    json: bool,
    cache: Option<Cache>,
    config: VerifyConfig,
}

impl Ctx {
    fn new(a: &ConfigArgs) -> Ctx {
        let mut build = BuildConfig::default();
        if let Some(c) = a.max_cosets {
            build.limits = EnumLimits {
                max_cosets: c as usize,
                ..build.limits
            };
        }
        if let Some(c) = a.dense_cap {
            build.dense_cap = c as usize;
        }
        let mut budget = SearchBudget::default();
        if let Some(w) = a.workers {
            budget.workers = w as usize;
        }
        if let Some(s) = a.budget_secs {
            budget.time_limit = Duration::from_secs(s);
        }
        let dir = (!a.no_cache).then(|| a.cache_dir.clone().unwrap_or_else(default_cache_dir));
        Ctx {
            json: a.json,
            cache: dir.clone().map(Cache::new),
            config: VerifyConfig {
                build,
                budget,
                cache_dir: dir,
                ..VerifyConfig::default()
            },
        }
    }

    fn emit(&self, v: &Value, text: impl FnOnce() -> String) {
        if self.json {
            println!("{}", serde_json::to_string_pretty(v).unwrap_or_default());
        } else {
            print!("{}", text());
        }
    }
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn failure(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::InvalidParams(_) | Error::Parse(_) => ExitCode::from(EXIT_USAGE),
        _ => ExitCode::from(EXIT_FAIL),
    }
}

fn construct_cmd(ctx: &Ctx, g: &GroupArgs) -> ExitCode {
    let params = match group_params(g.family, g.p, g.m, g.ell, g.beta) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let built = match &ctx.cache {
        Some(c) => c.get_or_build(&params, &ctx.config.build).map(|(x, hit)| (x, Some(hit))),
        None => mcdw::construct::construct(&params, &ctx.config.build).map(|x| (x, None)),
    };
    let (c, hit) = match built {
        Ok(x) => x,
        Err(e) => return failure(e),
    };
    let class = match c.group.nilpotency_class() {
        Ok(k) => k,
        Err(e) => return failure(e),
    };
    let path = ctx.cache.as_ref().map(|cache| cache.paths(&params).0);
    let v = json!({
        "group": params.label(),
        "order": c.group.order(),
        "class": class,
        "method": c.method,
        "cache_hit": hit,
        "cache_path": path,
    });
    ctx.emit(&v, || {
        let mut s = format!("{}\norder {}\nclass {}\n", params.label(), c.group.order(), class);
        if let Some(p) = &path {
            s += &format!("cached at {}\n", p.display());
        }
        s
    });
    ExitCode::SUCCESS
}

fn series_cmd(ctx: &Ctx, g: &GroupArgs) -> ExitCode {
    let params = match group_params(g.family, g.p, g.m, g.ell, g.beta) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let wb = Workbench::new(ctx.config.clone());
    let report = wb.group(&params).and_then(|c| c.group.upper_central_series().map(|(_, r)| r));
    let report = match report {
        Ok(r) => r,
        Err(e) => return failure(e),
    };
    let terms: Vec<Value> = report
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| json!({ "term": i + 1, "order": t.order, "factor_invariants": t.factor_invariants }))
        .collect();
    let v = json!({ "group": params.label(), "class": report.class, "terms": terms });
    ctx.emit(&v, || {
        let mut s = format!("{}  class {}\n", params.label(), report.class);
        for (i, t) in report.terms.iter().enumerate() {
            s += &format!("Z{}  order {:>8}  factor {:?}\n", i + 1, t.order, t.factor_invariants);
        }
        s
    });
    ExitCode::SUCCESS
}

fn iso_cmd(ctx: &Ctx, pair: &PairArgs, out: Option<&PathBuf>) -> ExitCode {
    let (pa, pb) = match default_pm(pair.family, pair.p, pair.m).and_then(|(p, m)| {
        let a = FamilyParams::new(pair.family, p, m, pair.ell_a).map_err(|e| e.to_string())?;
        let b = FamilyParams::new(pair.family, p, m, pair.ell_b).map_err(|e| e.to_string())?;
        Ok((a, b))
    }) {
        Ok(x) => x,
        Err(e) => return usage(e),
    };
    let wb = Workbench::new(ctx.config.clone());
    let verdict = match decide_isomorphism(&wb, &pa, &pb) {
        Ok(v) => v,
        Err(e) => return failure(e),
    };
    let (word, evidence, code) = match verdict {
        IsoVerdict::Isomorphic(v) => ("isomorphic", v, ExitCode::SUCCESS),
        IsoVerdict::NotIsomorphic(v) => ("NOT isomorphic", v, ExitCode::from(EXIT_FAIL)),
        IsoVerdict::Undecided(v) => ("undecided (budget exhausted)", v, ExitCode::from(EXIT_TIMEOUT)),
    };
    let mut cert_path = None;
    if word == "isomorphic" {
        let path = out.cloned().or_else(|| {
            ctx.config.cache_dir.as_ref().map(|d| {
                d.join("certificates")
                    .join(format!("{}__{}.json", cache_key(&pb), cache_key(&pa)))
            })
        });
        if let Some(path) = path {
            let write = path
                .parent()
                .map_or(Ok(()), std::fs::create_dir_all)
                .and_then(|_| std::fs::write(&path, serde_json::to_vec_pretty(&evidence).unwrap_or_default()));
            if let Err(e) = write {
                return failure(Error::Cache(format!("{}: {e}", path.display())));
            }
            cert_path = Some(path);
        }
    }
    let v = json!({
        "a": pa.label(),
        "b": pb.label(),
        "verdict": word,
        "certificate_path": cert_path,
        "evidence": evidence,
    });
    ctx.emit(&v, || {
        let mut s = format!("{} vs {}: {word}\n", pa.label(), pb.label());
        if let Some(p) = &cert_path {
            s += &format!("certificate: {}\n", p.display());
        }
        s
    });
    code
}

fn exit_for(reports: &[CheckReport]) -> ExitCode {
    if reports.iter().any(|r| r.status == Status::Fail) {
        ExitCode::from(EXIT_FAIL)
    } else if reports.iter().any(|r| r.status == Status::Timeout) {
        ExitCode::from(EXIT_TIMEOUT)
    } else {
        ExitCode::SUCCESS
    }
}

fn report_out(ctx: &Ctx, reports: &[CheckReport], out: Option<&PathBuf>) -> ExitCode {
    let bundle = bundle_json(reports);
    if let Some(path) = out {
        if let Err(e) = std::fs::write(path, &bundle) {
            return failure(Error::Cache(format!("{}: {e}", path.display())));
        }
    }
    if ctx.json {
        println!("{bundle}");
    } else {
        print!("{}", summary_table(reports));
    }
    exit_for(reports)
}

fn verify_cmd(ctx: &Ctx, a: &VerifyArgs) -> ExitCode {
    let wb = Workbench::new(ctx.config.clone());
    let pair = || -> Result<(FamilyParams, FamilyParams), String> {
        let family = a.family.ok_or("--family is required")?;
        let (p, m) = default_pm(family, a.p, a.m)?;
        let la = a.ell_a.ok_or("--ellA is required")?;
        let lb = a.ell_b.ok_or("--ellB is required")?;
        let pa = FamilyParams::new(family, p, m, la).map_err(|e| e.to_string())?;
        let pb = FamilyParams::new(family, p, m, lb).map_err(|e| e.to_string())?;
        Ok((pa, pb))
    };
    let mut reports = Vec::new();
    if let Some(t) = a.theorem {
        reports.push(verify_theorem(&wb, t));
    }
    if let Some(c) = a.sufficiency {
        reports.push(verify_sufficiency_grid(&wb, c));
    }
    if a.structure {
        let family = match a.family {
            Some(f) => f,
            None => return usage("--structure needs --family"),
        };
        match group_params(family, a.p, a.m, a.ell, a.beta) {
            Ok(p) => reports.push(verify_structure(&wb, &p)),
            Err(e) => return usage(e),
        }
    }
    if a.series {
        match pair() {
            Ok((pa, pb)) => reports.push(verify_series_factors(&wb, &pa, &pb)),
            Err(e) => return usage(e),
        }
    }
    if a.necj2 {
        match (a.ell_a, a.ell_b) {
            (Some(x), Some(y)) => reports.push(verify_necj2(&wb, x, y)),
            _ => return usage("--necj2 needs --ellA and --ellB"),
        }
    }
    if a.stretch {
        let secs = ctx.config.budget.time_limit.as_secs();
        let limit = if secs == SearchBudget::default().time_limit.as_secs() { 4 * 3600 } else { secs };
        reports.push(verify_stretch_j2_m3(&wb, Duration::from_secs(limit)));
    }
    if reports.is_empty() {
        reports = default_suite(&wb);
    }
    report_out(ctx, &reports, a.out.as_ref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
            let _ = e.print();
            return code;
        }
    };
    let ctx = Ctx::new(&cli.config);
    match &cli.cmd {
        Cmd::Construct(g) => construct_cmd(&ctx, g),
        Cmd::Series(g) => series_cmd(&ctx, g),
        Cmd::Iso { pair, out } => iso_cmd(&ctx, pair, out.as_ref()),
        Cmd::Verify(a) => verify_cmd(&ctx, a),
        Cmd::Appendix { ell } => {
            let wb = Workbench::new(ctx.config.clone());
            let grid = AppendixGrid {
                ells: ell.clone(),
                ..AppendixGrid::default()
            };
            let r = verify_appendix(&wb, &grid);
            report_out(&ctx, &[r], None)
        }
    }
}
