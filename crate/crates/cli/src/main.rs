//! `surfsing`: command-line front end. Exit codes: 0 ok, 1 input error,
//! 2 claim violation.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

// stdout may be closed early (e.g. piped into `head`); that is not an error
macro_rules! out {
    ($($t:tt)*) => {{
        let _ = writeln!(io::stdout(), $($t)*);
    }};
}

use surfsing::fan_census::{census as fan_census, FanNdFile};
use surfsing::harness::{
    fan_record, golden_suite_on, scan, write_records, ScanConfig, VerificationRecord, CLAIMS,
};
use surfsing::lattice::fmt_rational;
use surfsing::surface::scenario::{
    scenario_double_blowup_on, scenario_fiber_contraction_on, ScenarioReport, VPattern,
};
use surfsing::surface::{SurfaceModel, SurfaceModelFile};
use surfsing::toric::{
    census, hj_expand, resolve_singularity, toric_mmp, Fan2, FanFile, QuotientSingularity,
};
use surfsing::wps::{audit, audit_family, StratumCount, VertexMembership, WeightedFamily};

#[derive(Parser)]
#[command(
    name = "surfsing",
    version,
    about = "Exact checks of singular point bounds on klt surfaces"
)]
struct Cli {
    /// Output style: JSON lines or a human-readable table.
    #[arg(long, value_enum, global = true, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Records,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Census of a fan file and the singular point bounds that apply to it.
    FanCheck { path: PathBuf },
    /// Exhaustive enumeration plus seeded random fans.
    Scan(ScanArgs),
    /// Every registered claim against its golden checks.
    PaperSuite {
        /// Surface model file to build the surface scenarios on.
        #[arg(long)]
        base: Option<PathBuf>,
    },
    /// Hirzebruch-Jung chain and discrepancies of 1/r(1,a).
    Hj { r: u64, a: u64 },
    /// Singular points of a general hypersurface in weighted projective space.
    Wps {
        /// Comma-separated weights, e.g. 1,3,3,4,5.
        #[arg(value_delimiter = ',', required = true)]
        weights: Vec<u64>,
        degree: u64,
    },
    /// Cone counts and identities of a simplicial fan file.
    Census { path: PathBuf },
    /// Greedy toric MMP on a fan file.
    Mmp { path: PathBuf },
    /// Blow-up and contraction scenarios on the quadric.
    Scenario {
        #[command(subcommand)]
        which: Scenario,
        /// Surface model file to use instead of the quadric.
        #[arg(long, global = true)]
        base: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Scenario {
    /// Double blow-up at n points, contracted to A1 points.
    DoubleBlowup {
        /// Which points share a horizontal fiber, e.g. "1,3|2,4".
        pattern: String,
    },
    /// The same with all points on one fiber, then that fiber contracted.
    FiberContraction { n: usize },
}

#[derive(Args)]
struct ScanArgs {
    /// TOML file with scan settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    bound: Option<i64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    dedupe: bool,
    /// Write records here as JSON lines.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of random fans to draw.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long)]
    max_rays: Option<usize>,
    #[arg(long)]
    random_bound: Option<i64>,
}

enum Status {
    Ok,
    Violation,
}

type Run = Result<Status, String>;

fn status(pass: bool) -> Status {
    if pass {
        Status::Ok
    } else {
        Status::Violation
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    serde_json::from_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_fan(path: &Path) -> Result<Fan2, String> {
    let file: FanFile = parse_json(path)?;
    file.to_fan()
        .map_err(|e| format!("{}: field `rays`: {e}", path.display()))
}

fn load_base(path: Option<&Path>) -> Result<SurfaceModel, String> {
    match path {
        None => Ok(SurfaceModel::start_quadric()),
        Some(p) => {
            let file: SurfaceModelFile = parse_json(p)?;
            file.to_model().map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

fn emit<T: Serialize>(value: &T) {
    out!(
        "{}",
        serde_json::to_string(value).expect("reports serialize")
    );
}

fn fan_check(path: &Path, format: Format) -> Run {
    let fan = load_fan(path)?;
    let report = census(&fan);
    let (record, _, _) = fan_record(&fan, &path.display().to_string());
    if format == Format::Records {
        emit(&json!({ "census": report, "record": record }));
    } else {
        out!("fan {fan}");
        out!(
            "positivity: {}",
            serde_json::to_value(report.positivity)
                .expect("enum")
                .as_str()
                .unwrap_or_default()
        );
        out!("picard number: {}", report.picard_number);
        out!("singular points: {}", report.singular_count());
        for p in &report.singular_points {
            out!("  1/{}(1,{}) at cone {:?}", p.r, p.a, p.cone_rays);
        }
        for id in [
            "fano-singular-bound",
            "nef-singular-bound",
            "mmp-singular-drop",
        ] {
            match record.checks.iter().find(|c| c.claim == id) {
                Some(c) => out!(
                    "{id}: {}{}",
                    c.witness,
                    if c.pass { "" } else { "  VIOLATED" }
                ),
                None => out!("{id}: not applicable"),
            }
        }
    }
    Ok(status(record.passed()))
}

fn scan_config(args: &ScanArgs) -> Result<ScanConfig, String> {
    let mut cfg = match &args.config {
        Some(p) => toml::from_str(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))?,
        None => ScanConfig::default(),
    };
    if let Some(v) = args.bound {
        cfg.bound = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.workers {
        cfg.workers = v;
    }
    if args.dedupe {
        cfg.dedupe = true;
    }
    if let Some(v) = &args.out {
        cfg.out = Some(v.clone());
    }
    if let Some(v) = args.random {
        cfg.random = v;
    }
    if let Some(v) = args.max_rays {
        cfg.max_rays = v;
    }
    if let Some(v) = args.random_bound {
        cfg.random_bound = v;
    }
    Ok(cfg)
}

fn run_scan(args: &ScanArgs, format: Format) -> Run {
    let cfg = scan_config(args)?;
    let out = scan(&cfg).map_err(|e| e.to_string())?;
    let s = &out.summary;
    if format == Format::Records {
        if cfg.out.is_none() {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_records(&out.records, &mut lock).map_err(|e| e.to_string())?;
            lock.flush().map_err(|e| e.to_string())?;
        }
        emit(&json!({ "summary": s }));
    } else {
        out!("bound B = {}: {} fans enumerated", s.bound, s.enumerated);
        out!(
            "random: {} drawn, {} with -K nef",
            s.random_sampled,
            s.random_nef
        );
        out!(
            "records: {}, checks: {}, violations: {}",
            s.records,
            s.checks,
            s.violations
        );
        if !s.violated_claims.is_empty() {
            out!("violated claims: {}", s.violated_claims.join(", "));
        }
        match s.max_excess {
            Some(e) => out!("max n - 2 rho: {e}"),
            None => out!("max n - 2 rho: none"),
        }
        out!("mmp steps: {}", s.mmp_steps);
        if let Some(p) = &cfg.out {
            out!("records written to {}", p.display());
        }
        if s.violations > 0 {
            for r in out.records.iter().filter(|r| !r.passed()).take(5) {
                print_failing(r);
            }
        }
    }
    Ok(status(s.violations == 0))
}

fn print_failing(r: &VerificationRecord) {
    for c in r.checks.iter().filter(|c| !c.pass) {
        out!("  {} ({}): {}: {}", r.subject, r.source, c.claim, c.witness);
    }
}

fn golden_suite(base: Option<&Path>, format: Format) -> Run {
    let base = load_base(base)?;
    let report = golden_suite_on(&base);
    if format == Format::Records {
        emit(&report);
    } else {
        for o in &report.outcomes {
            let mark = if o.pass { "PASS" } else { "FAIL" };
            out!(
                "{mark} {:<32} {:>6} cases  {}",
                o.claim,
                o.cases,
                o.relation
            );
            for w in &o.witnesses {
                out!("       {w}");
            }
        }
        let passed = report.outcomes.iter().filter(|o| o.pass).count();
        out!("{passed}/{} claims pass", CLAIMS.len());
    }
    if !report.all_pass {
        eprintln!("failing claims: {}", report.failing_claims().join(", "));
    }
    Ok(status(report.all_pass))
}

fn hj(r: u64, a: u64, format: Format) -> Run {
    let q = QuotientSingularity::new(r, a).map_err(|e| e.to_string())?;
    let res = resolve_singularity(&q).map_err(|e| format!("{q}: {e}"))?;
    let chain = hj_expand(r, a).map_err(|e| e.to_string())?;
    let disc: Vec<String> = res.discrepancies.iter().map(fmt_rational).collect();
    let chain_text = format!(
        "[{}]",
        chain
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",")
    );
    if format == Format::Records {
        emit(&json!({
            "singularity": q.to_string(),
            "r": q.r,
            "a": q.a,
            "chain": chain,
            "discrepancies": disc,
            "log_discrepancies": res.log_discrepancies().iter().map(fmt_rational).collect::<Vec<_>>(),
            "canonical": res.is_canonical(),
        }));
    } else {
        out!("{q}");
        out!("chain: {chain_text}");
        out!("discrepancies: [{}]", disc.join(","));
        out!(
            "canonical: {}",
            if res.is_canonical() { "yes" } else { "no" }
        );
    }
    Ok(Status::Ok)
}

fn wps(weights: &[u64], degree: u64, format: Format) -> Run {
    let f = WeightedFamily::new(weights.to_vec(), degree).map_err(|e| e.to_string())?;
    // recognise the family whose singularity types are known
    let k = weights.get(3).map_or(0, |w| w.saturating_sub(1) / 3);
    let report = match WeightedFamily::series(k) {
        Ok(p) if p == f => audit_family(k).map_err(|e| e.to_string())?,
        _ => audit(&f),
    };
    if format == Format::Records {
        emit(&report);
    } else {
        out!("degree {} in P({:?})", report.degree, report.weights);
        for v in &report.vertices {
            let m = match v.membership {
                VertexMembership::OnMember { stabilizer } => {
                    format!("on member, order {stabilizer}")
                }
                VertexMembership::OffMember => "off member".to_string(),
            };
            out!("  vertex {} (weight {}): {m}", v.index, v.weight);
        }
        for s in &report.strata {
            let c = match &s.count {
                StratumCount::Points { count, order } => format!("{count} points of order {order}"),
                StratumCount::Flagged { reason } => format!("flagged: {reason}"),
            };
            out!("  line {:?} (weights {:?}): {c}", s.indices, s.weights);
        }
        out!(
            "total: {} singular points, orders {:?}",
            report.total,
            report.orders
        );
        if report.flagged > 0 {
            out!("flagged strata: {}", report.flagged);
        }
        if !report.quoted_types.is_empty() {
            out!(
                "types ({}): {}",
                report.provenance.types,
                report.quoted_types.join(", ")
            );
        }
    }
    Ok(Status::Ok)
}

fn run_census(path: &Path, format: Format) -> Run {
    let file: FanNdFile = parse_json(path)?;
    let f = file
        .to_fan()
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let r = fan_census(&f);
    if format == Format::Records {
        emit(&r);
    } else {
        out!("dimension {}", r.dimension);
        for (k, c) in r.counts.iter().enumerate() {
            out!(
                "  |Sigma({})| = {c}, singular {}, minimal singular {}",
                k + 1,
                r.singular_counts[k],
                r.minimal_singular_counts[k]
            );
        }
        out!(
            "euler characteristic: {} ({})",
            r.euler_characteristic,
            ok(r.euler_ok)
        );
        out!("binomial bounds: {}", ok(r.binomial_ok));
        out!(
            "picard number: {} ({})",
            r.picard_number,
            ok(r.picard_identity)
        );
    }
    Ok(status(r.euler_ok && r.binomial_ok && r.picard_identity))
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

fn mmp(path: &Path, format: Format) -> Run {
    let fan = load_fan(path)?;
    let run = toric_mmp(&fan);
    if format == Format::Records {
        emit(&json!({
            "input": fan.rays(),
            "steps": run.steps,
            "output": run.output.rays(),
            "invariant_holds": run.invariant_holds(),
        }));
    } else {
        out!("start {fan}, rho = {}", fan.picard_number());
        for s in &run.steps {
            out!(
                "  contract {:?}: D^2 = {}, K.D = {}, singular {} -> {}, {} on the curve ({})",
                s.contracted_ray,
                s.self_intersection,
                s.canonical_degree,
                s.singular_before,
                s.singular_after,
                s.adjacent_singular,
                ok(s.invariant_holds())
            );
        }
        out!("end {}, rho = {}", run.output, run.output.picard_number());
    }
    Ok(status(run.invariant_holds()))
}

fn scenario(which: &Scenario, base: Option<&Path>, format: Format) -> Run {
    let base = load_base(base)?;
    let report = match which {
        Scenario::DoubleBlowup { pattern } => {
            let p: VPattern = pattern
                .parse()
                .map_err(|e| format!("pattern {pattern:?}: {e}"))?;
            scenario_double_blowup_on(&base, &p)
                .map_err(|e| e.to_string())?
                .2
        }
        Scenario::FiberContraction { n } => {
            scenario_fiber_contraction_on(&base, *n).map_err(|e| e.to_string())?
        }
    };
    if format == Format::Records {
        emit(&report);
    } else {
        print_scenario(&report);
    }
    Ok(status(report.all_hold()))
}

fn print_scenario(r: &ScenarioReport) {
    out!("{} with n = {}, pattern {}", r.scenario, r.n, r.pattern);
    out!(
        "picard number: {}, {} singular points, {}",
        r.picard_number,
        r.components.len(),
        r.classification
    );
    for (label, d) in &r.discrepancies {
        out!("  a({label}) = {d}");
    }
    for (name, v) in &r.quantities {
        out!("  {name} = {v}");
    }
    for i in &r.identities {
        let rel = if i.equal { "==" } else { "!=" };
        out!("  [{}] {}: {} {rel} {}", ok(i.equal), i.group, i.lhs, i.rhs);
    }
}

fn run(cli: &Cli) -> Run {
    let f = cli.format;
    match &cli.command {
        Command::FanCheck { path } => fan_check(path, f),
        Command::Scan(args) => run_scan(args, f),
        Command::PaperSuite { base } => golden_suite(base.as_deref(), f),
        Command::Hj { r, a } => hj(*r, *a, f),
        Command::Wps { weights, degree } => wps(weights, *degree, f),
        Command::Census { path } => run_census(path, f),
        Command::Mmp { path } => mmp(path, f),
        Command::Scenario { which, base } => scenario(which, base.as_deref(), f),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Violation) => ExitCode::from(2),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
