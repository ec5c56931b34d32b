//! Multi-start campaigns, summary statistics, performance profiles, and
//! CSV/JSON/SVG output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, SolveError};
use crate::problems::{get_problem, ProblemDef, RegionSample};
use crate::solver::{solve, DirectionKind, SolveReport, SolverParams, Termination};

/// Number of points on the ζ grid of a performance profile.
pub const PROFILE_POINTS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSpec {
    pub problems: Vec<String>,
    pub solvers: Vec<DirectionKind>,
    pub runs_per_problem: usize,
    pub seed: u64,
    pub params: SolverParams,
    /// Use this start point for every run instead of sampling the box.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0_override: Option<Vec<f64>>,
}

impl CampaignSpec {
    pub fn new(
        problems: Vec<String>,
        solvers: Vec<DirectionKind>,
        runs_per_problem: usize,
        seed: u64,
    ) -> Self {
        CampaignSpec {
            problems,
            solvers,
            runs_per_problem,
            seed,
            params: SolverParams::default(),
            x0_override: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RunStatus {
    Critical,
    MaxIterations,
    LineSearchFailed,
    /// The solve returned an error; see [`RunRecord::error`].
    Error,
}

impl From<Termination> for RunStatus {
    fn from(t: Termination) -> Self {
        match t {
            Termination::Critical => RunStatus::Critical,
            Termination::MaxIterations => RunStatus::MaxIterations,
            Termination::LineSearchFailed => RunStatus::LineSearchFailed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: String,
    pub solver: DirectionKind,
    pub run_index: usize,
    pub x0: Vec<f64>,
    pub iterations: usize,
    pub cpu_seconds: f64,
    pub status: RunStatus,
    pub final_x: Vec<f64>,
    pub final_xi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunRecord {
    /// Equality ignoring timing.
    pub fn same_outcome(&self, other: &RunRecord) -> bool {
        let strip = |r: &RunRecord| RunRecord {
            cpu_seconds: 0.0,
            ..r.clone()
        };
        strip(self) == strip(other)
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Independent generator for one `(seed, problem, run)` triple.
pub fn run_rng(seed: u64, problem: &str, run_index: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&fnv1a(problem).to_le_bytes());
    key[16..24].copy_from_slice(&(run_index as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Start point of run `run_index`; shared by every solver.
pub fn start_point(spec: &CampaignSpec, problem: &ProblemDef, run_index: usize) -> Vec<f64> {
    match &spec.x0_override {
        Some(x0) => x0.clone(),
        None => problem.sample(&mut run_rng(spec.seed, &problem.name, run_index)),
    }
}

fn run_one(
    problem: &ProblemDef,
    solver: DirectionKind,
    run_index: usize,
    x0: Vec<f64>,
    params: &SolverParams,
) -> RunRecord {
    let params = params.with_direction(solver);
    let mut rec = RunRecord {
        problem: problem.name.clone(),
        solver,
        run_index,
        x0,
        iterations: 0,
        cpu_seconds: 0.0,
        status: RunStatus::Error,
        final_x: Vec::new(),
        final_xi: f64::NAN,
        error: None,
    };
    match solve(problem, &rec.x0, &params) {
        Ok(r) => {
            rec.iterations = r.iterations();
            rec.cpu_seconds = r.wall_time;
            rec.status = r.status.into();
            rec.final_xi = r.final_xi();
            rec.final_x = r.final_x;
        }
        Err(e) => {
            if let SolveError::Evaluation { k, .. } | SolveError::Subproblem { k } = e {
                rec.iterations = k;
            }
            rec.error = Some(e.to_string());
        }
    }
    rec
}

/// Runs every `(problem, run, solver)` combination, in parallel on the
/// current rayon pool. Records come back sorted by problem order in the
/// spec, then solver, then run index.
pub fn run_campaign(spec: &CampaignSpec) -> Result<Vec<RunRecord>, BenchError> {
    if spec.problems.is_empty() {
        return Err(BenchError::InvalidSpec("no problems".into()));
    }
    if spec.solvers.is_empty() {
        return Err(BenchError::InvalidSpec("no solvers".into()));
    }
    if spec.runs_per_problem == 0 {
        return Err(BenchError::InvalidSpec(
            "runs_per_problem must be at least 1".into(),
        ));
    }
    spec.params
        .validate()
        .map_err(|e| BenchError::InvalidSpec(e.to_string()))?;
    let problems: Vec<ProblemDef> = spec
        .problems
        .iter()
        .map(|n| get_problem(n))
        .collect::<Result<_, _>>()?;
    if let Some(x0) = &spec.x0_override {
        if let Some(p) = problems.iter().find(|p| p.n != x0.len()) {
            return Err(BenchError::InvalidSpec(format!(
                "x0 override has dimension {}, {} has {}",
                x0.len(),
                p.name,
                p.n
            )));
        }
    }

    let mut solvers = spec.solvers.clone();
    solvers.sort();
    solvers.dedup();
    let jobs: Vec<(usize, usize)> = (0..problems.len())
        .flat_map(|p| (0..spec.runs_per_problem).map(move |r| (p, r)))
        .collect();
    let mut records: Vec<(usize, RunRecord)> = jobs
        .par_iter()
        .flat_map_iter(|&(p, r)| {
            let problem = &problems[p];
            let x0 = start_point(spec, problem, r);
            solvers
                .iter()
                .map(|&s| (p, run_one(problem, s, r, x0.clone(), &spec.params)))
                .collect::<Vec<_>>()
        })
        .collect();
    records
        .sort_by(|(pa, a), (pb, b)| (pa, a.solver, a.run_index).cmp(&(pb, b.solver, b.run_index)));
    Ok(records.into_iter().map(|(_, r)| r).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Iterations,
    CpuTime,
}

impl Metric {
    pub fn of(self, r: &RunRecord) -> f64 {
        match self {
            Metric::Iterations => r.iterations as f64,
            Metric::CpuTime => r.cpu_seconds,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Metric::Iterations => "iterations",
            Metric::CpuTime => "cpu_time",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    pub mode: f64,
    pub std_dev: f64,
}

/// Min, max, mean, median, mode (smallest most frequent value) and sample
/// standard deviation.
pub fn summarize_values(values: &[f64]) -> Result<SummaryStats, BenchError> {
    if values.is_empty() {
        return Err(BenchError::Empty);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let mean = v.iter().sum::<f64>() / n as f64;
    let median = if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    };
    let (mut mode, mut best, mut i) = (v[0], 0, 0);
    while i < n {
        let j = v[i..].iter().take_while(|&&x| x == v[i]).count();
        if j > best {
            (mode, best) = (v[i], j);
        }
        i += j;
    }
    let std_dev = if n > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(SummaryStats {
        min: v[0],
        max: v[n - 1],
        mean: mean.clamp(v[0], v[n - 1]),
        median,
        mode,
        std_dev,
    })
}

pub fn summarize(records: &[RunRecord], metric: Metric) -> Result<SummaryStats, BenchError> {
    summarize_values(&records.iter().map(|r| metric.of(r)).collect::<Vec<_>>())
}

/// Records whose run reached a critical point.
pub fn successful(records: &[RunRecord]) -> Vec<RunRecord> {
    records
        .iter()
        .filter(|r| r.status == RunStatus::Critical)
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsRow {
    pub problem: String,
    pub solver: DirectionKind,
    pub runs: usize,
    pub failures: usize,
    pub iterations: SummaryStats,
    pub cpu_time: SummaryStats,
}

/// One row per `(problem, solver)` pair, in order of first appearance.
pub fn stats_table(records: &[RunRecord]) -> Vec<StatsRow> {
    group(records)
        .into_iter()
        .map(|((problem, solver), rs)| StatsRow {
            problem,
            solver,
            runs: rs.len(),
            failures: rs
                .iter()
                .filter(|r| r.status != RunStatus::Critical)
                .count(),
            iterations: summarize(&rs, Metric::Iterations).expect("nonempty group"),
            cpu_time: summarize(&rs, Metric::CpuTime).expect("nonempty group"),
        })
        .collect()
}

fn group(records: &[RunRecord]) -> Vec<((String, DirectionKind), Vec<RunRecord>)> {
    let mut out: Vec<((String, DirectionKind), Vec<RunRecord>)> = Vec::new();
    for r in records {
        match out
            .iter_mut()
            .find(|((p, s), _)| *p == r.problem && *s == r.solver)
        {
            Some((_, rs)) => rs.push(r.clone()),
            None => out.push(((r.problem.clone(), r.solver), vec![r.clone()])),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileCurve {
    pub solver: DirectionKind,
    pub metric: Metric,
    pub zeta: Vec<f64>,
    pub rho: Vec<f64>,
    /// Performance ratio per represented problem.
    pub ratios: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    pub curves: Vec<ProfileCurve>,
    /// Problems dropped because some solver never reached a critical point.
    pub excluded: Vec<String>,
}

/// Performance profiles over per-problem averages. Averages include failed
/// runs. A ratio against a zero best average is infinite when the solver's
/// own average is positive; such ratios are replaced by twice the largest
/// finite ratio (at least 2) so that the curve can still reach one.
pub fn performance_profile(records: &[RunRecord], metric: Metric) -> Result<Profile, BenchError> {
    let mut solvers: Vec<DirectionKind> = records.iter().map(|r| r.solver).collect();
    solvers.sort();
    solvers.dedup();
    if solvers.len() < 2 {
        return Err(BenchError::TooFewSolvers(solvers.len()));
    }
    let mut problems: Vec<String> = Vec::new();
    for r in records {
        if !problems.contains(&r.problem) {
            problems.push(r.problem.clone());
        }
    }
    let groups = group(records);
    let mut excluded = Vec::new();
    let mut averages: Vec<(String, Vec<f64>)> = Vec::new();
    for p in &problems {
        let mut avg = Vec::new();
        let mut keep = true;
        for &s in &solvers {
            let rs = groups
                .iter()
                .find(|((gp, gs), _)| gp == p && *gs == s)
                .map(|(_, rs)| rs)
                .ok_or_else(|| BenchError::MissingPair {
                    problem: p.clone(),
                    solver: s.label().into(),
                })?;
            keep &= rs.iter().any(|r| r.status == RunStatus::Critical);
            avg.push(rs.iter().map(|r| metric.of(r)).sum::<f64>() / rs.len() as f64);
        }
        if keep {
            averages.push((p.clone(), avg));
        } else {
            excluded.push(p.clone());
        }
    }

    let mut ratios: Vec<Vec<f64>> = averages
        .iter()
        .map(|(_, avg)| {
            let best = avg.iter().cloned().fold(f64::INFINITY, f64::min);
            avg.iter()
                .map(|&a| if a == best { 1.0 } else { a / best })
                .collect()
        })
        .collect();
    let finite_max = ratios
        .iter()
        .flatten()
        .filter(|r| r.is_finite())
        .fold(1.0f64, |a, &b| a.max(b));
    let cap = 2.0 * finite_max;
    ratios
        .iter_mut()
        .flatten()
        .filter(|r| !r.is_finite())
        .for_each(|r| *r = cap);
    let zmax = ratios.iter().flatten().fold(1.0f64, |a, &b| a.max(b));
    let zeta: Vec<f64> = (0..PROFILE_POINTS)
        .map(|i| {
            if i + 1 == PROFILE_POINTS {
                zmax
            } else {
                1.0 + (zmax - 1.0) * i as f64 / (PROFILE_POINTS - 1) as f64
            }
        })
        .collect();
    let np = averages.len();
    let curves = solvers
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            let rs: Vec<f64> = ratios.iter().map(|r| r[j]).collect();
            let rho = zeta
                .iter()
                .map(|&z| {
                    if np == 0 {
                        0.0
                    } else {
                        rs.iter().filter(|&&r| r <= z).count() as f64 / np as f64
                    }
                })
                .collect();
            ProfileCurve {
                solver: s,
                metric,
                zeta: zeta.clone(),
                rho,
                ratios: averages
                    .iter()
                    .zip(&rs)
                    .map(|((p, _), &r)| (p.clone(), r))
                    .collect(),
            }
        })
        .collect();
    Ok(Profile { curves, excluded })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `contents`, creating parent directories.
pub fn write_file(path: &Path, contents: &[u8]) -> Result<(), BenchError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, contents).map_err(io_err(path))
}

fn csv_bytes(
    header: &[String],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<Vec<u8>, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| BenchError::Io {
        path: "<csv buffer>".into(),
        source: e.into_error(),
    })
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn join(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

pub fn records_csv(records: &[RunRecord]) -> Result<Vec<u8>, BenchError> {
    let header = strings(&[
        "problem",
        "solver",
        "run_index",
        "x0",
        "iterations",
        "cpu_seconds",
        "status",
        "final_x",
        "final_xi",
    ]);
    csv_bytes(
        &header,
        records.iter().map(|r| {
            vec![
                r.problem.clone(),
                r.solver.label().into(),
                r.run_index.to_string(),
                join(&r.x0),
                r.iterations.to_string(),
                r.cpu_seconds.to_string(),
                format!("{:?}", r.status),
                join(&r.final_x),
                r.final_xi.to_string(),
            ]
        }),
    )
}

const STAT_NAMES: [&str; 6] = ["min", "max", "mean", "median", "mode", "std_dev"];

fn stat_cells(s: &SummaryStats) -> [f64; 6] {
    [s.min, s.max, s.mean, s.median, s.mode, s.std_dev]
}

pub fn stats_csv(rows: &[StatsRow]) -> Result<Vec<u8>, BenchError> {
    let mut header = strings(&["problem", "solver", "runs", "failures"]);
    for m in ["iterations", "cpu_time"] {
        header.extend(STAT_NAMES.iter().map(|s| format!("{m}_{s}")));
    }
    csv_bytes(
        &header,
        rows.iter().map(|r| {
            let mut row = vec![
                r.problem.clone(),
                r.solver.label().into(),
                r.runs.to_string(),
                r.failures.to_string(),
            ];
            row.extend(stat_cells(&r.iterations).iter().map(|x| x.to_string()));
            row.extend(stat_cells(&r.cpu_time).iter().map(|x| x.to_string()));
            row
        }),
    )
}

/// Human-readable statistics table in the `(Min, Max, Mean, Median, Mode,
/// Std. Dev.)` layout.
pub fn stats_text(rows: &[StatsRow]) -> String {
    let fmt = |s: &SummaryStats, p: usize| {
        format!(
            "({:.0}, {:.0}, {:.p$}, {:.p$}, {:.0}, {:.p$})",
            s.min, s.max, s.mean, s.median, s.mode, s.std_dev
        )
    };
    let tfmt = |s: &SummaryStats| {
        format!(
            "({:.4}, {:.4}, {:.4}, {:.4}, {:.4}, {:.4})",
            s.min, s.max, s.mean, s.median, s.mode, s.std_dev
        )
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:<9} {:<48} CPU time (Min, Max, Mean, Median, Mode, Std. Dev.)",
        "Problem", "Solver", "Iterations (Min, Max, Mean, Median, Mode, Std. Dev.)"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<10} {:<9} {:<48} {}",
            r.problem,
            r.solver.label(),
            fmt(&r.iterations, 4),
            tfmt(&r.cpu_time)
        );
    }
    out
}

pub fn profiles_csv(profiles: &[Profile]) -> Result<Vec<u8>, BenchError> {
    let header = strings(&["metric", "solver", "zeta", "rho"]);
    let rows = profiles.iter().flat_map(|p| &p.curves).flat_map(|c| {
        c.zeta.iter().zip(&c.rho).map(move |(z, r)| {
            vec![
                c.metric.label().into(),
                c.solver.label().into(),
                z.to_string(),
                r.to_string(),
            ]
        })
    });
    csv_bytes(&header, rows)
}

/// `k, x1..xn, G1_lo, G1_hi, …, xi, t` with one row per iterate record.
pub fn iterates_csv(report: &SolveReport) -> Result<Vec<u8>, BenchError> {
    let first = &report.iterates[0];
    let mut header = vec!["k".to_string()];
    header.extend((1..=first.x.len()).map(|i| format!("x{i}")));
    for i in 1..=first.g_values.len() {
        header.push(format!("G{i}_lo"));
        header.push(format!("G{i}_hi"));
    }
    header.extend(strings(&["xi", "t", "backtracks", "left_box"]));
    csv_bytes(
        &header,
        report.iterates.iter().map(|it| {
            let mut row = vec![it.k.to_string()];
            row.extend(it.x.iter().map(|x| x.to_string()));
            for g in &it.g_values {
                row.push(g.lo().to_string());
                row.push(g.hi().to_string());
            }
            row.push(it.xi.to_string());
            row.push(it.t.map(|t| t.to_string()).unwrap_or_default());
            row.push(it.backtracks.to_string());
            row.push(it.left_box.to_string());
            row
        }),
    )
}

/// `x1..xn, G1_lo, G1_hi, …` for each sampled point.
pub fn region_csv(n: usize, m: usize, sample: &RegionSample) -> Result<Vec<u8>, BenchError> {
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    for i in 1..=m {
        header.push(format!("G{i}_lo"));
        header.push(format!("G{i}_hi"));
    }
    csv_bytes(
        &header,
        sample.points.iter().map(|(x, g)| {
            let mut row: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            for gi in g {
                row.push(gi.lo().to_string());
                row.push(gi.hi().to_string());
            }
            row
        }),
    )
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let span = |it: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = it
                .filter(|v| v.is_finite())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                    (a.min(v), b.max(v))
                });
            if lo.is_finite() {
                if hi > lo {
                    (lo, hi)
                } else {
                    (lo - 0.5, hi + 0.5)
                }
            } else {
                (0.0, 1.0)
            }
        };
        let (x0, x1) = span(&mut xs.clone());
        let (y0, y1) = span(&mut ys.clone());
        Frame { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        H - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * MARGIN)
    }

    fn axes(&self, out: &mut String, xlabel: &str, ylabel: &str) {
        let _ = writeln!(
            out,
            r#"<rect x="{m}" y="{m}" width="{w}" height="{h}" fill="none" stroke="black"/>"#,
            m = MARGIN,
            w = W - 2.0 * MARGIN,
            h = H - 2.0 * MARGIN
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            W / 2.0,
            H - 10.0,
            escape(xlabel)
        );
        let _ = writeln!(
            out,
            r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">{}</text>"#,
            H / 2.0,
            H / 2.0,
            escape(ylabel)
        );
        for (v, anchor_x, anchor_y) in [
            (self.x0, self.px(self.x0), H - MARGIN + 15.0),
            (self.x1, self.px(self.x1), H - MARGIN + 15.0),
        ] {
            let _ = writeln!(
                out,
                r#"<text x="{anchor_x:.2}" y="{anchor_y:.2}" font-size="10" text-anchor="middle">{v:.3}</text>"#
            );
        }
        for v in [self.y0, self.y1] {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{v:.3}</text>"#,
                MARGIN - 4.0,
                self.py(v)
            );
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn svg_open(title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    out
}

/// Step curves of one profile, one polyline per solver.
pub fn profile_svg(profile: &Profile) -> String {
    let metric = profile.curves.first().map_or("", |c| c.metric.label());
    let mut out = svg_open(&format!("performance profile ({metric})"));
    let zs = profile.curves.iter().flat_map(|c| c.zeta.iter().copied());
    let frame = Frame::new(zs, [0.0, 1.0].into_iter());
    frame.axes(&mut out, "zeta", "rho");
    for (i, c) in profile.curves.iter().enumerate() {
        let mut pts = String::new();
        let mut prev: Option<f64> = None;
        for (&z, &r) in c.zeta.iter().zip(&c.rho) {
            if let Some(p) = prev {
                let _ = write!(pts, "{:.2},{:.2} ", frame.px(z), frame.py(p));
            }
            let _ = write!(pts, "{:.2},{:.2} ", frame.px(z), frame.py(r));
            prev = Some(r);
        }
        let color = COLORS[i % COLORS.len()];
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            pts.trim_end()
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" fill="{color}">{}</text>"#,
            W - MARGIN - 80.0,
            MARGIN + 20.0 + 18.0 * i as f64,
            c.solver.label()
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Objective rectangles `G₁ × G₂` of a region sample and of a solver
/// trajectory, with the path through the rectangle centres. Only the first
/// two objectives are drawn.
pub fn rectangles_svg(
    title: &str,
    region: Option<&RegionSample>,
    report: Option<&SolveReport>,
) -> String {
    let mut out = svg_open(title);
    let mut rects: Vec<[f64; 4]> = Vec::new();
    let to_rect = |g: &[crate::interval::Interval]| [g[0].lo(), g[0].hi(), g[1].lo(), g[1].hi()];
    if let Some(r) = region {
        rects.extend(
            r.points
                .iter()
                .filter(|(_, g)| g.len() >= 2)
                .map(|(_, g)| to_rect(g)),
        );
    }
    let path: Vec<[f64; 4]> = report
        .map(|r| {
            r.iterates
                .iter()
                .filter(|it| it.g_values.len() >= 2)
                .map(|it| to_rect(&it.g_values))
                .collect()
        })
        .unwrap_or_default();
    let all = rects.iter().chain(&path);
    let frame = Frame::new(
        all.clone().flat_map(|r| [r[0], r[1]]),
        all.flat_map(|r| [r[2], r[3]]),
    );
    frame.axes(&mut out, "G1", "G2");
    let rect = |out: &mut String, r: &[f64; 4], fill: &str, opacity: f64| {
        let (x, y) = (frame.px(r[0]), frame.py(r[3]));
        let (w, h) = (frame.px(r[1]) - x, frame.py(r[2]) - y);
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}" fill-opacity="{opacity}" stroke="none"/>"#
        );
    };
    if !rects.is_empty() {
        out.push_str("<g id=\"region\">\n");
        for r in &rects {
            rect(&mut out, r, "#9ecae1", 0.3);
        }
        out.push_str("</g>\n");
    }
    if !path.is_empty() {
        out.push_str("<g id=\"iterates\">\n");
        for r in &path {
            rect(&mut out, r, "#93c572", 0.6);
        }
        let pts: Vec<String> = path
            .iter()
            .map(|r| {
                format!(
                    "{:.2},{:.2}",
                    frame.px(0.5 * (r[0] + r[1])),
                    frame.py(0.5 * (r[2] + r[3]))
                )
            })
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="magenta" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Everything a campaign produced, as written to `campaign.json`.
#[derive(Debug, Clone, Serialize)]
pub struct CampaignFile<'a> {
    pub spec: &'a CampaignSpec,
    pub records: &'a [RunRecord],
    pub stats: &'a [StatsRow],
    pub profiles: &'a [Profile],
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, BenchError> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(problem: &str, solver: DirectionKind, run: usize, iterations: usize) -> RunRecord {
        RunRecord {
            problem: problem.into(),
            solver,
            run_index: run,
            x0: vec![0.0],
            iterations,
            cpu_seconds: 0.0,
            status: RunStatus::Critical,
            final_x: vec![0.0],
            final_xi: 0.0,
            error: None,
        }
    }

    #[test]
    fn statistics() {
        let s = summarize_values(&[7.0]).unwrap();
        assert_eq!(stat_cells(&s), [7.0, 7.0, 7.0, 7.0, 7.0, 0.0]);
        let s = summarize_values(&[1.0, 2.0, 2.0, 9.0]).unwrap();
        assert_eq!(
            (s.min, s.max, s.mean, s.median, s.mode),
            (1.0, 9.0, 3.5, 2.0, 2.0)
        );
        // Sample variance: (6.25 + 2.25 + 2.25 + 30.25) / 3
        assert!((s.std_dev - (41.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(summarize_values(&[5.0, 3.0, 5.0, 3.0]).unwrap().mode, 3.0);
        assert!(matches!(summarize_values(&[]), Err(BenchError::Empty)));
    }

    #[test]
    fn profile_two_problems() {
        use DirectionKind::*;
        let records = vec![
            rec("p", Newton, 0, 2),
            rec("q", Newton, 0, 10),
            rec("p", SteepestDescent, 0, 4),
            rec("q", SteepestDescent, 0, 5),
        ];
        let prof = performance_profile(&records, Metric::Iterations).unwrap();
        let a = &prof.curves[0];
        assert_eq!(a.solver, Newton);
        assert_eq!(
            a.ratios.values().cloned().collect::<Vec<_>>(),
            vec![1.0, 2.0]
        );
        assert_eq!(a.rho[0], 0.5);
        assert_eq!(*a.zeta.last().unwrap(), 2.0);
        assert_eq!(*a.rho.last().unwrap(), 1.0);
        assert_eq!(
            prof.curves[1].ratios.values().cloned().collect::<Vec<_>>(),
            vec![2.0, 1.0]
        );
    }

    #[test]
    fn identical_solvers_give_unit_profile() {
        let records = vec![
            rec("p", DirectionKind::Newton, 0, 3),
            rec("p", DirectionKind::SteepestDescent, 0, 3),
        ];
        let prof = performance_profile(&records, Metric::Iterations).unwrap();
        assert!(prof.curves.iter().all(|c| c.rho[0] == 1.0));
    }

    #[test]
    fn zero_best_average_is_capped() {
        use DirectionKind::*;
        let records = vec![
            rec("p", Newton, 0, 0),
            rec("p", SteepestDescent, 0, 4),
            rec("q", Newton, 0, 3),
            rec("q", SteepestDescent, 0, 6),
        ];
        let prof = performance_profile(&records, Metric::Iterations).unwrap();
        assert_eq!(prof.curves[1].ratios["p"], 4.0);
        assert_eq!(*prof.curves[1].rho.last().unwrap(), 1.0);
    }

    #[test]
    fn profile_errors_and_exclusions() {
        use DirectionKind::*;
        assert!(matches!(
            performance_profile(&[rec("p", Newton, 0, 1)], Metric::Iterations),
            Err(BenchError::TooFewSolvers(1))
        ));
        let missing = vec![rec("p", Newton, 0, 1), rec("q", SteepestDescent, 0, 1)];
        assert!(matches!(
            performance_profile(&missing, Metric::Iterations),
            Err(BenchError::MissingPair { .. })
        ));
        let mut failed = rec("q", SteepestDescent, 0, 500);
        failed.status = RunStatus::MaxIterations;
        let records = vec![
            rec("p", Newton, 0, 1),
            rec("p", SteepestDescent, 0, 2),
            rec("q", Newton, 0, 1),
            failed,
        ];
        let prof = performance_profile(&records, Metric::Iterations).unwrap();
        assert_eq!(prof.excluded, vec!["q".to_string()]);
    }

    #[test]
    fn rng_streams_differ() {
        use rand::Rng;
        let a: u64 = run_rng(1, "I-BK1", 0).random();
        assert_eq!(a, run_rng(1, "I-BK1", 0).random::<u64>());
        assert_ne!(a, run_rng(1, "I-BK1", 1).random::<u64>());
        assert_ne!(a, run_rng(1, "I-VU2", 0).random::<u64>());
        assert_ne!(a, run_rng(2, "I-BK1", 0).random::<u64>());
    }

    #[test]
    fn empty_records_csv_is_header_only() {
        let bytes = records_csv(&[]).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap().lines().count(), 1);
    }
}
