use std::io::Write;
use std::path::Path;

use imo::bench::{
    self, performance_profile, run_campaign, stats_table, CampaignFile, CampaignSpec, Metric,
    Profile,
};
use imo::problems::{
    self, bk1_weighted_solution, get_problem, portfolio_problem, sample_feasible_region, BK1_START,
    BK1_WEIGHTED_TABLE, PORTFOLIO_TABLE,
};
use imo::solver::{mutual_nondominance, solve, DirectionKind, SolveReport, Termination};
use imo::{DominanceRelation, Interval};

use crate::config::{Config, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MAX_ITERS: i32 = 2;
pub const EXIT_LINE_SEARCH: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

/// Failure that maps to an exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<imo::BenchError> for Failure {
    fn from(e: imo::BenchError) -> Self {
        Failure::usage(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    bench::write_file(path, bytes)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn fmt_g(g: &[Interval]) -> String {
    let parts: Vec<String> = g.iter().map(|i| format!("{i:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn print_iterates(report: &SolveReport) {
    println!(
        "{:>4}  {:<28} {:<50} {:>14} {:>10}",
        "k", "x", "G(x)", "xi", "t"
    );
    for it in &report.iterates {
        let t = it.t.map_or("-".to_string(), |t| format!("{t}"));
        println!(
            "{:>4}  {:<28} {:<50} {:>14.6e} {:>10}",
            it.k,
            fmt_vec(&it.x),
            fmt_g(&it.g_values),
            it.xi,
            t
        );
    }
}

fn exit_code(status: Termination) -> i32 {
    match status {
        Termination::Critical => EXIT_OK,
        Termination::MaxIterations => EXIT_MAX_ITERS,
        Termination::LineSearchFailed => EXIT_LINE_SEARCH,
    }
}

pub fn solve_cmd(cfg: &Config) -> Outcome {
    let name = cfg
        .problem
        .as_deref()
        .ok_or_else(|| Failure::usage("solve requires --problem"))?;
    let problem = get_problem(name).map_err(|e| Failure::usage(e.to_string()))?;
    let x0 = match &cfg.x0 {
        Some(x0) => x0.clone(),
        None => problem.sample(&mut bench::run_rng(cfg.seed, &problem.name, 0)),
    };
    if !problem.in_box(&x0) {
        eprintln!("warning: x0 lies outside the problem box");
    }
    let report = solve(&problem, &x0, &cfg.params).map_err(|e| Failure::usage(e.to_string()))?;
    print_iterates(&report);
    println!(
        "status: {:?}  iterations: {}  final x: {}",
        report.status,
        report.iterations(),
        fmt_vec(&problem.reported_solution(&report.final_x))
    );

    let stem = cfg.out_dir.join(format!("solve-{}", problem.name));
    if cfg.wants(Format::Json) {
        write(&stem.with_extension("json"), &bench::to_json(&report)?)?;
    }
    if cfg.wants(Format::Csv) {
        write(&stem.with_extension("csv"), &bench::iterates_csv(&report)?)?;
    }
    if cfg.wants(Format::Svg) && problem.m >= 2 {
        let region = sample_feasible_region(&problem, 5000, cfg.seed);
        let svg = bench::rectangles_svg(&problem.name, Some(&region), Some(&report));
        write(&stem.with_extension("svg"), svg.as_bytes())?;
    }
    Ok(exit_code(report.status))
}

fn campaign(
    cfg: &Config,
    solvers: Vec<DirectionKind>,
) -> Result<(CampaignSpec, Vec<bench::RunRecord>), Failure> {
    let problems = match (&cfg.problems, &cfg.problem) {
        (Some(ps), _) => ps.clone(),
        (None, Some(p)) => vec![p.clone()],
        (None, None) => problems::names()[..20]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    };
    let mut spec = CampaignSpec::new(problems, solvers, cfg.runs, cfg.seed);
    spec.params = cfg.params;
    spec.x0_override = cfg.x0.clone();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| Failure::usage(e.to_string()))?;
    let records = pool.install(|| run_campaign(&spec))?;
    Ok((spec, records))
}

pub fn bench_cmd(cfg: &Config) -> Outcome {
    let (spec, records) = campaign(cfg, vec![cfg.params.direction_kind])?;
    let stats = stats_table(&records);
    print!("{}", bench::stats_text(&stats));
    let dir = &cfg.out_dir;
    if cfg.wants(Format::Csv) {
        write(&dir.join("records.csv"), &bench::records_csv(&records)?)?;
        write(&dir.join("stats.csv"), &bench::stats_csv(&stats)?)?;
    }
    if cfg.wants(Format::Json) {
        let file = CampaignFile {
            spec: &spec,
            records: &records,
            stats: &stats,
            profiles: &[],
        };
        write(&dir.join("campaign.json"), &bench::to_json(&file)?)?;
    }
    Ok(EXIT_OK)
}

pub fn profile_cmd(cfg: &Config) -> Outcome {
    let (spec, records) = campaign(
        cfg,
        vec![DirectionKind::Newton, DirectionKind::SteepestDescent],
    )?;
    let stats = stats_table(&records);
    print!("{}", bench::stats_text(&stats));
    let profiles: Vec<Profile> = [Metric::Iterations, Metric::CpuTime]
        .into_iter()
        .map(|m| performance_profile(&records, m))
        .collect::<Result<_, _>>()?;
    for p in &profiles {
        if !p.excluded.is_empty() {
            eprintln!(
                "warning: {} problem(s) excluded from the profile: {}",
                p.excluded.len(),
                p.excluded.join(", ")
            );
        }
        for c in &p.curves {
            println!(
                "{} {:<9} rho(1) = {:.3}",
                c.metric.label(),
                c.solver.label(),
                c.rho[0]
            );
        }
    }
    let dir = &cfg.out_dir;
    if cfg.wants(Format::Csv) {
        write(&dir.join("profiles.csv"), &bench::profiles_csv(&profiles)?)?;
        write(&dir.join("stats.csv"), &bench::stats_csv(&stats)?)?;
    }
    if cfg.wants(Format::Svg) {
        for p in &profiles {
            let metric = p.curves[0].metric.label();
            write(
                &dir.join(format!("profile-{metric}.svg")),
                bench::profile_svg(p).as_bytes(),
            )?;
        }
    }
    if cfg.wants(Format::Json) {
        let file = CampaignFile {
            spec: &spec,
            records: &records,
            stats: &stats,
            profiles: &profiles,
        };
        write(&dir.join("campaign.json"), &bench::to_json(&file)?)?;
    }
    Ok(EXIT_OK)
}

pub fn verify_cmd(cfg: &Config) -> Outcome {
    let tol = cfg.tolerance;
    let bk1 = get_problem("I-BK1").expect("registry");
    let mut ok = true;
    println!("weighted-sum table, tolerance {tol:e}");
    println!(
        "{:>5}  {:<24} {:<24} {:>10}  result",
        "alpha", "x (printed)", "x (closed form)", "max |dG|"
    );
    for (alpha, x, g_printed) in BK1_WEIGHTED_TABLE {
        let sol = bk1_weighted_solution(alpha).map_err(|e| Failure {
            code: EXIT_MISMATCH,
            message: e.to_string(),
        })?;
        let g = bk1.eval(&x).expect("box point");
        let dev = g
            .iter()
            .zip(g_printed)
            .flat_map(|(gi, [lo, hi])| [(gi.lo() - lo).abs(), (gi.hi() - hi).abs()])
            .fold(0.0, f64::max);
        let pass = dev <= tol;
        ok &= pass;
        let note = if (sol.x[0] - x[0]).abs().max((sol.x[1] - x[1]).abs()) > tol {
            "  (printed x differs from the closed form)"
        } else {
            ""
        };
        println!(
            "{alpha:>5.1}  {:<24} {:<24} {dev:>10.2e}  {}{note}",
            fmt_vec(&x),
            fmt_vec(&sol.x),
            if pass { "PASS" } else { "FAIL" }
        );
    }

    let report = solve(&bk1, &BK1_START, &cfg.params).map_err(|e| Failure::usage(e.to_string()))?;
    let x_star = report.final_x.clone();
    println!(
        "Algorithm output x* = {} after {} iterations",
        fmt_vec(&x_star),
        report.iterations()
    );
    let mut points = vec![x_star];
    points.extend(BK1_WEIGHTED_TABLE.iter().map(|(_, x, _)| x.to_vec()));
    let rel = mutual_nondominance(&bk1, &points).expect("box points");
    for (i, (alpha, _, _)) in BK1_WEIGHTED_TABLE.iter().enumerate() {
        let r = rel[0][i + 1];
        let pass = r.is_nondominated() && r != DominanceRelation::Equal;
        ok &= pass;
        println!(
            "x* vs alpha = {alpha:.1}: {r:?}  {}",
            if pass { "PASS" } else { "FAIL" }
        );
    }
    if report.status != Termination::Critical {
        ok = false;
        println!("solver status {:?}  FAIL", report.status);
    }
    println!("{}", if ok { "verify: PASS" } else { "verify: FAIL" });
    Ok(if ok { EXIT_OK } else { EXIT_MISMATCH })
}

pub fn portfolio_cmd(cfg: &Config) -> Outcome {
    let p = portfolio_problem();
    let mut ok = true;
    let mut reports = Vec::new();
    println!(
        "{:>6}  {:<20} {:<20} {:>5}  result",
        "x1(0)", "solution", "printed", "iters"
    );
    for (start, printed) in PORTFOLIO_TABLE {
        let report = solve(&p, &[start], &cfg.params).map_err(|e| Failure::usage(e.to_string()))?;
        let x = p.reported_solution(&report.final_x);
        let pass = report.status == Termination::Critical
            && x.iter().zip(printed).all(|(a, b)| (a - b).abs() <= 1e-4);
        ok &= pass;
        println!(
            "{start:>6.2}  {:<20} {:<20} {:>5}  {}",
            fmt_vec(&x),
            fmt_vec(&printed),
            report.iterations(),
            if pass { "PASS" } else { "FAIL" }
        );
        reports.push(report);
    }
    if cfg.wants(Format::Json) {
        write(
            &cfg.out_dir.join("portfolio.json"),
            &bench::to_json(&reports)?,
        )?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_MISMATCH })
}

pub fn list_cmd() -> Outcome {
    let entries: Vec<_> = problems::names()
        .iter()
        .map(|n| get_problem(n).expect("registry").catalogue_entry())
        .collect();
    let text = serde_json::to_string_pretty(&entries).expect("serializable");
    // A closed pipe (`imo list | head`) is not an error worth a panic.
    let _ = writeln!(std::io::stdout(), "{text}");
    Ok(EXIT_OK)
}
