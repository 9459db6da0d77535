//! Executes a configuration and persists its artifacts.
//!
//! Layout of a run directory:
//! `checkpoints/run_NNNN.csv` per trajectory, `summary.json` with results
//! and assertion verdicts, and `manifest.json` with the effective config,
//! seeds and SHA-256 digests of every other file. Only the manifest holds
//! timing, so all other files replay byte for byte.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use sublil_core::inequalities::{smallo_checks, MartingaleSetup};
use sublil_core::sublinear::{default_c_grid, DEFAULT_LIMIT_TOL};
use sublil_core::{
    choquet, conditional_dominance_check, estimate_cluster, mixture_weight, run_trajectory,
    series_diagnostic, verify_exp_ineq, verify_martingale_ineq, ClusterEstimate, Distribution,
    ExpIneqInputs, MeasureFamily, Policy, SeedPair, Side, Trajectory, Transform,
};

use crate::config::{
    load, AxiomParams, BandCheck, ChoquetParams, ClusterParams, DiagnosticsParams, Experiment,
    ExperimentConfig, IneqCheck, LlnParams, SigmaParams, TransformName,
};
use crate::error::CliError;

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn assertion(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Assertion {
    Assertion {
        name: name.into(),
        pass,
        detail: detail.into(),
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub summary: Value,
    pub assertions: Vec<Assertion>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn failures(&self) -> Vec<&Assertion> {
        self.assertions.iter().filter(|a| !a.pass).collect()
    }
}

#[derive(Default)]
struct Output {
    results: Value,
    assertions: Vec<Assertion>,
    trajectories: Vec<Trajectory>,
    seeds: Vec<SeedPair>,
}

pub fn run(config_path: &Path, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    let cfg = load(config_path)?;
    run_config(cfg, opts)
}

pub fn run_config(mut cfg: ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &opts.out {
        cfg.output_dir = out.clone();
    }
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let clock = Instant::now();
    let output = match opts.workers {
        Some(w) => {
            if w == 0 {
                return Err(CliError::Config("--workers must be >= 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| CliError::Config(format!("cannot start {w} workers: {e}")))?;
            pool.install(|| execute(&cfg))?
        }
        None => execute(&cfg)?,
    };
    let wall = clock.elapsed().as_secs_f64();
    persist(&cfg, output, started, wall)
}

fn execute(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    match &cfg.experiment {
        Experiment::Axioms(p) => axioms(cfg, p),
        Experiment::Choquet(p) => choquet_experiment(cfg, p),
        Experiment::Sigma(p) => sigma(cfg, p),
        Experiment::Lln(p) => lln(cfg, p),
        Experiment::SelfnormLil(p) => cluster(cfg, p, true),
        Experiment::Cluster(p) => cluster(cfg, p, false),
        Experiment::VerifyIneq(v) => verify(cfg, &v.checks),
        Experiment::Diagnostics(p) => diagnostics(cfg, p),
    }
}

fn write_file(
    dir: &Path,
    rel: &str,
    bytes: &[u8],
    digests: &mut Vec<(String, String)>,
) -> Result<(), CliError> {
    let path = dir.join(rel);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent.display(), e))?;
    }
    fs::write(&path, bytes).map_err(|e| CliError::io(path.display(), e))?;
    digests.push((rel.to_string(), hex::encode(Sha256::digest(bytes))));
    Ok(())
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s.into_bytes()
}

fn persist(
    cfg: &ExperimentConfig,
    out: Output,
    started: u64,
    wall: f64,
) -> Result<RunOutcome, CliError> {
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| CliError::io(dir.display(), e))?;
    let stale = dir.join("checkpoints");
    if stale.exists() {
        fs::remove_dir_all(&stale).map_err(|e| CliError::io(stale.display(), e))?;
    }
    let mut digests = Vec::new();
    for (k, tr) in out.trajectories.iter().enumerate() {
        let mut buf = Vec::new();
        tr.write_csv(&mut buf)
            .map_err(|e| CliError::io("checkpoint csv", e))?;
        write_file(
            &dir,
            &format!("checkpoints/run_{k:04}.csv"),
            &buf,
            &mut digests,
        )?;
    }
    let pass = out.assertions.iter().all(|a| a.pass);
    let summary = json!({
        "experiment": cfg.experiment.name(),
        "results": out.results,
        "assertions": out.assertions,
        "pass": pass,
    });
    write_file(&dir, "summary.json", &pretty(&summary), &mut digests)?;
    let manifest = json!({
        "library_version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "started_unix_seconds": started,
        "wall_clock_seconds": wall,
        "seeds": out.seeds,
        "files": digests.iter().map(|(p, d)| json!({"path": p, "sha256": d})).collect::<Vec<_>>(),
    });
    let manifest_path = dir.join("manifest.json");
    fs::write(&manifest_path, pretty(&manifest))
        .map_err(|e| CliError::io(manifest_path.display(), e))?;
    Ok(RunOutcome {
        dir,
        summary,
        assertions: out.assertions,
    })
}

/// Recomputes the digests listed in a run's manifest; returns mismatching
/// paths.
pub fn verify_digests(dir: &Path) -> Result<Vec<String>, CliError> {
    let path = dir.join("manifest.json");
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(path.display(), e))?;
    let manifest: Value =
        serde_json::from_str(&text).map_err(|e| CliError::io(path.display(), e))?;
    let mut bad = Vec::new();
    for f in manifest["files"].as_array().into_iter().flatten() {
        let rel = f["path"].as_str().unwrap_or_default();
        let bytes = fs::read(dir.join(rel)).map_err(|e| CliError::io(rel, e))?;
        if hex::encode(Sha256::digest(&bytes)) != f["sha256"].as_str().unwrap_or_default() {
            bad.push(rel.to_string());
        }
    }
    Ok(bad)
}

fn normalised_weights<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0f64)).collect();
    let total: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|v| v / total).collect();
    let drift = 1.0 - w.iter().sum::<f64>();
    w[k - 1] += drift;
    w
}

fn axioms(cfg: &ExperimentConfig, p: &AxiomParams) -> Result<Output, CliError> {
    let seeds = SeedPair::new(cfg.seed, 0);
    let mut rng = seeds.draw_stream();
    let tol = p.tolerance;
    let mut violations = [0u32; 5];
    let mut worst = 0.0f64;
    for _ in 0..p.cases {
        let k = rng.gen_range(1..=p.max_atoms);
        let m = rng.gen_range(1..=p.max_members);
        let mut pool: Vec<f64> = (0..k).map(|_| rng.gen_range(-10.0..10.0)).collect();
        pool.sort_by(f64::total_cmp);
        pool.dedup();
        let k = pool.len();
        let members = (0..m)
            .map(|_| {
                let w = normalised_weights(&mut rng, k);
                let atoms: Vec<(f64, f64)> = pool.iter().copied().zip(w).collect();
                Distribution::discrete(&atoms)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let fam = MeasureFamily::new(members)?;
        let f: Vec<f64> = (0..k).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let g: Vec<f64> = (0..k).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let c: f64 = rng.gen_range(-5.0..5.0);
        let lambda: f64 = rng.gen_range(0.0..5.0);
        let idx = |x: f64| pool.iter().position(|v| *v == x).expect("atom from pool");
        let phi = |x: f64| f[idx(x)];
        let psi = |x: f64| g[idx(x)];
        let e_phi = fam.upper_expect(phi)?;
        let e_psi = fam.upper_expect(psi)?;
        let e_max = fam.upper_expect(|x| phi(x).max(psi(x)))?;
        let gaps = [
            (e_phi - e_max).max(e_psi - e_max),
            (fam.upper_expect(|_| c)? - c).abs(),
            fam.upper_expect(|x| phi(x) + psi(x))? - e_phi - e_psi,
            (fam.upper_expect(|x| lambda * phi(x))? - lambda * e_phi).abs()
                / (1.0 + lambda * e_phi.abs()),
            (fam.lower_expect(phi)? + fam.upper_expect(|x| -phi(x))?).abs(),
        ];
        for (v, gap) in violations.iter_mut().zip(gaps) {
            worst = worst.max(gap);
            if gap > tol {
                *v += 1;
            }
        }
        // conjugacy must hold exactly
        if fam.lower_expect(phi)? != -fam.upper_expect(|x| -phi(x))? {
            violations[4] += 1;
        }
    }
    let names = [
        "monotonicity",
        "constant_preservation",
        "sub_additivity",
        "positive_homogeneity",
        "conjugacy",
    ];
    let by_name: serde_json::Map<String, Value> = names
        .iter()
        .zip(violations)
        .map(|(n, v)| (n.to_string(), json!(v)))
        .collect();
    let assertions = names
        .iter()
        .zip(violations)
        .map(|(n, v)| assertion(*n, v == 0, format!("{v} violations in {} cases", p.cases)))
        .collect();
    Ok(Output {
        results: json!({"cases": p.cases, "violations": by_name, "largest_gap": worst}),
        assertions,
        seeds: vec![seeds],
        ..Default::default()
    })
}

fn choquet_experiment(cfg: &ExperimentConfig, p: &ChoquetParams) -> Result<Output, CliError> {
    let fam = cfg.family();
    let transform = match p.transform {
        TransformName::Identity => Transform::Identity,
        TransformName::Square => Transform::Square,
        TransformName::SquareOverLoglog => Transform::SquareOverLogLog,
    };
    let mut results = serde_json::Map::new();
    let mut assertions = Vec::new();
    for (side, name, expected) in [
        (Side::Upper, "upper", p.expected_upper),
        (Side::Lower, "lower", p.expected_lower),
    ] {
        let r = choquet(fam, transform, side);
        match &r {
            Ok(v) => results.insert(name.into(), json!(v)),
            Err(e) => results.insert(name.into(), json!({"error": e.to_string()})),
        };
        if let Some(want) = expected {
            let got = r.as_ref().map(|v| v.value).unwrap_or(f64::NAN);
            assertions.push(assertion(
                format!("{name}_matches"),
                (got - want).abs() <= p.tolerance || got == want,
                format!("{got} vs {want}"),
            ));
        }
    }
    Ok(Output {
        results: Value::Object(results),
        assertions,
        ..Default::default()
    })
}

fn sigma(cfg: &ExperimentConfig, p: &SigmaParams) -> Result<Output, CliError> {
    let fam = cfg.family();
    let r = fam.sigma_bounds(&default_c_grid(), DEFAULT_LIMIT_TOL);
    let results = match &r {
        Ok(b) => json!({"lower": b.lower, "upper": b.upper}),
        Err(e) => json!({"error": e.to_string()}),
    };
    let mut assertions = Vec::new();
    if let Some((lo, hi)) = p.expected {
        let pass = matches!(&r, Ok(b) if (b.lower - lo).abs() <= p.tolerance && (b.upper - hi).abs() <= p.tolerance);
        assertions.push(assertion(
            "sigma_band",
            pass,
            format!("{results} vs ({lo}, {hi})"),
        ));
    }
    Ok(Output {
        results,
        assertions,
        ..Default::default()
    })
}

fn trajectories(
    cfg: &ExperimentConfig,
    policy: &Policy,
) -> Result<(Vec<Trajectory>, Vec<SeedPair>), CliError> {
    let seeds: Vec<SeedPair> = (0..cfg.repetitions)
        .map(|r| SeedPair::new(cfg.seed, r))
        .collect();
    let fam = cfg.family();
    let trs = seeds
        .par_iter()
        .map(|s| run_trajectory(fam, policy, &cfg.schedule, cfg.horizon, *s, cfg.checkpoints))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((trs, seeds))
}

fn lln(cfg: &ExperimentConfig, p: &LlnParams) -> Result<Output, CliError> {
    let fam = cfg.family();
    let bounds = fam.sigma_bounds(&default_c_grid(), DEFAULT_LIMIT_TOL)?;
    let alpha = mixture_weight(p.target_variance, bounds)?;
    let policy = Policy::Mixture {
        weight: alpha,
        low: p.low,
        high: p.high,
    };
    let (trs, seeds) = trajectories(cfg, &policy)?;
    let n = cfg.horizon as f64;
    let ratios: Vec<f64> = trs.iter().map(|t| t.last().v2 / n).collect();
    let hits = ratios
        .iter()
        .filter(|r| (*r - p.target_variance).abs() <= p.band)
        .count();
    let fraction = hits as f64 / ratios.len() as f64;
    let results = json!({
        "sigma_bounds": {"lower": bounds.lower, "upper": bounds.upper},
        "mixture_weight": alpha,
        "policy": policy,
        "v2_over_n": ratios,
        "u2_over_n": trs.iter().map(|t| t.last().u2 / n).collect::<Vec<_>>(),
        "within_band": hits,
    });
    let assertions = vec![assertion(
        "lln_band",
        fraction >= p.min_pass_fraction,
        format!(
            "{hits}/{} runs within ±{} of {}",
            ratios.len(),
            p.band,
            p.target_variance
        ),
    )];
    Ok(Output {
        results,
        assertions,
        trajectories: trs,
        seeds,
    })
}

fn band_assertions(label: &str, est: &ClusterEstimate, band: &BandCheck) -> Vec<Assertion> {
    let (contains, within) = match est.covered_interval {
        Some((lo, hi)) => (
            lo <= band.contains.0 && hi >= band.contains.1,
            lo >= band.within.0 && hi <= band.within.1,
        ),
        None => (false, false),
    };
    let shown = format!("{:?}", est.covered_interval);
    vec![
        assertion(
            format!("{label}_contains"),
            contains,
            format!("{shown} ⊇ {:?}", band.contains),
        ),
        assertion(
            format!("{label}_within"),
            within,
            format!("{shown} ⊆ {:?}", band.within),
        ),
    ]
}

fn cluster(
    cfg: &ExperimentConfig,
    p: &ClusterParams,
    self_normalized: bool,
) -> Result<Output, CliError> {
    let policy = cfg.trajectory_policy();
    let (trs, seeds) = trajectories(cfg, &policy)?;
    let mut runs = Vec::new();
    let mut assertions = Vec::new();
    for (k, tr) in trs.iter().enumerate() {
        let r_target = p.r.and_then(|b| b.target);
        let t_target = p.t.and_then(|b| b.target);
        let r_est = estimate_cluster(&tr.r_series(), p.window_start, p.epsilon, r_target)?;
        let t_est = estimate_cluster(&tr.t_series(), p.window_start, p.epsilon, t_target)?;
        if !self_normalized {
            if let Some(b) = &p.r {
                assertions.extend(band_assertions(&format!("run{k}_R"), &r_est, b));
            }
        }
        if let Some(b) = &p.t {
            assertions.extend(band_assertions(&format!("run{k}_T"), &t_est, b));
        }
        if self_normalized {
            assertions.push(assertion(
                format!("run{k}_boundedness"),
                tr.check_invariants(),
                "|T_n| <= sum|Y| / (V_n t_n)",
            ));
        }
        let last = tr.last();
        runs.push(json!({
            "seeds": tr.seeds,
            "final": last,
            "t_untruncated": last.t_untruncated(),
            "max_abs_y": tr.max_abs_y,
            "checkpoints": tr.checkpoints.len(),
            "r_cluster": r_est,
            "t_cluster": t_est,
        }));
    }
    Ok(Output {
        results: json!({"policy": policy, "runs": runs}),
        assertions,
        trajectories: trs,
        seeds,
    })
}

fn verify(cfg: &ExperimentConfig, checks: &[IneqCheck]) -> Result<Output, CliError> {
    let fam = cfg.family();
    let mut reports = Vec::new();
    let mut assertions = Vec::new();
    let mut seeds = Vec::new();
    for (k, check) in checks.iter().enumerate() {
        let s = SeedPair::new(cfg.seed, k as u64);
        seeds.push(s);
        let report = match check {
            IneqCheck::Exponential {
                n,
                x,
                y,
                p,
                delta,
                policies,
            } => {
                let inputs = ExpIneqInputs::from_family(fam, *n, *x, *y, *p, *delta)?;
                verify_exp_ineq(fam, policies, &inputs, cfg.repetitions, s)?
            }
            IneqCheck::Martingale {
                c,
                x,
                y,
                horizon,
                policies,
            } => {
                let setup = MartingaleSetup {
                    c: *c,
                    x: *x,
                    y: *y,
                    horizon: *horizon,
                };
                verify_martingale_ineq(fam, policies, &setup, cfg.repetitions, s)?
            }
        };
        assertions.push(assertion(
            format!("check{k}"),
            report.pass,
            format!(
                "{} ± {} <= {}",
                report.lhs_estimate, report.lhs_stderr, report.rhs_bound
            ),
        ));
        reports.push(report);
    }
    Ok(Output {
        results: json!({"reports": reports}),
        assertions,
        seeds,
        ..Default::default()
    })
}

fn diagnostics(cfg: &ExperimentConfig, p: &DiagnosticsParams) -> Result<Output, CliError> {
    let fam = cfg.family();
    let mut assertions = Vec::new();
    let mut seeds = Vec::new();
    let series = series_diagnostic(fam, p.delta, p.n_max, p.p)?;
    assertions.push(assertion(
        "series_consistent",
        series.consistent(),
        format!(
            "{:?} vs loglog moment finite = {:?}",
            series.classification, series.loglog_moment_finite
        ),
    ));
    if let Some(want) = p.expected {
        assertions.push(assertion(
            "series_class",
            series.classification == want,
            format!("{:?} vs expected {want:?}", series.classification),
        ));
    }
    let smallo = match &p.smallo_grid {
        Some(grid) => match smallo_checks(fam, p.delta, grid) {
            Ok(r) => {
                assertions.push(assertion(
                    "smallo_decreasing",
                    r.pass,
                    "ratios nonincreasing on the last grid points",
                ));
                json!(r)
            }
            Err(e @ sublil_core::Error::Precondition(_)) => json!({"refused": e.to_string()}),
            Err(e) => return Err(e.into()),
        },
        None => Value::Null,
    };
    let mut dominance = Vec::new();
    if let Some(d) = &p.dominance {
        for (k, policy) in d.policies.iter().enumerate() {
            let s = SeedPair::new(cfg.seed, 1000 + k as u64);
            seeds.push(s);
            let phi = d.phi;
            let rep = conditional_dominance_check(
                fam,
                policy,
                |x| phi.apply(x),
                d.horizon,
                d.repetitions,
                &d.bin_edges,
                s,
            )?;
            assertions.push(assertion(
                format!("dominance{k}"),
                rep.pass,
                format!(
                    "{} bins against bound {}",
                    rep.bins.len(),
                    rep.upper_expectation
                ),
            ));
            dominance.push(json!({"policy": policy, "report": rep}));
        }
    }
    Ok(Output {
        results: json!({"series": series, "smallo": smallo, "dominance": dominance}),
        assertions,
        seeds,
        ..Default::default()
    })
}
