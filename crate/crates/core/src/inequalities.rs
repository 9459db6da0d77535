//! Exponential bounds for maximal partial sums, Monte-Carlo verifiers that
//! compare them with simulated upper capacities, and tail-series
//! diagnostics.
//!
//! The union bound `n · V(X > y)` stands in for the capacity that the
//! largest single draw exceeds `y`; it over-approximates, so every bound
//! reported here stays valid.

use serde::{Deserialize, Serialize};

use crate::capacity::{capacity, loglog_moment, Side, ThresholdEvent};
use crate::distributions::{Distribution, ParametricDistribution};
use crate::error::{invalid, Error, Result};
use crate::rng::SeedPair;
use crate::schedules::loglog;
use crate::simulate::{frequency_over_policies, Policy, CAPACITY_LABEL};
use crate::sublinear::{default_c_grid, MeasureFamily, DEFAULT_LIMIT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpIneqInputs {
    pub n: u64,
    pub x: f64,
    pub y: f64,
    pub p: f64,
    pub delta: f64,
    /// `n · Ê[(X⁺ ∧ y)^p]`
    pub a: f64,
    /// `n · Ĕ[(X ∧ y)²]`
    pub b_breve: f64,
    /// `n · V(X > y)`
    pub tail: f64,
}

impl ExpIneqInputs {
    /// Builds the sums for `n` draws that are identically distributed under
    /// the family.
    pub fn from_family(
        fam: &MeasureFamily,
        n: u64,
        x: f64,
        y: f64,
        p: f64,
        delta: f64,
    ) -> Result<Self> {
        check_xy(x, y)?;
        check_p_delta(p, delta)?;
        if n == 0 {
            return Err(invalid("n must be positive"));
        }
        let nf = n as f64;
        let a = nf * fam.upper_expect(|v| v.max(0.0).min(y).powf(p))?;
        let b = fam.breve_expect(|v| v.min(y).powi(2), &default_c_grid(), DEFAULT_LIMIT_TOL)?;
        if !b.converged {
            return Err(Error::NotConverged(format!(
                "truncated second moment of X ∧ {y} did not settle (last value {})",
                b.value
            )));
        }
        let tail = nf * capacity(fam, ThresholdEvent::Greater(y)).upper;
        Ok(Self {
            n,
            x,
            y,
            p,
            delta,
            a,
            b_breve: nf * b.value,
            tail,
        })
    }

    pub fn with_x(self, x: f64) -> Self {
        Self { x, ..self }
    }
}

fn check_xy(x: f64, y: f64) -> Result<()> {
    if !(x > 0.0 && y > 0.0) {
        return Err(invalid(format!(
            "x and y must be positive, got x = {x}, y = {y}"
        )));
    }
    Ok(())
}

fn check_p_delta(p: f64, delta: f64) -> Result<()> {
    if !(p >= 2.0) {
        return Err(invalid(format!("p must be >= 2, got {p}")));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1], got {delta}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimpleBound {
    pub tail: f64,
    pub exponential: f64,
    pub total: f64,
}

impl SimpleBound {
    pub fn vacuous(&self) -> bool {
        self.total >= 1.0
    }

    pub fn capped(&self) -> f64 {
        self.total.min(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinedBound {
    pub tail: f64,
    pub middle: f64,
    /// Natural log of `middle`; stays finite where `middle` overflows.
    pub log_middle: f64,
    pub exponential: f64,
    pub total: f64,
}

impl RefinedBound {
    pub fn vacuous(&self) -> bool {
        self.total >= 1.0
    }

    pub fn capped(&self) -> f64 {
        self.total.min(1.0)
    }
}

/// `tail + exp{−x² / (2(xy + B̆))}`
pub fn exp_bound_simple(inp: &ExpIneqInputs) -> SimpleBound {
    let exponential = (-inp.x * inp.x / (2.0 * (inp.x * inp.y + inp.b_breve))).exp();
    SimpleBound {
        tail: inp.tail,
        exponential,
        total: inp.tail + exponential,
    }
}

/// `tail + 2 e^{p^p} (A / y^p)^{δx/(10y)} + exp{−x² / (2B̆(1 + δ))}`
pub fn exp_bound_refined(inp: &ExpIneqInputs) -> RefinedBound {
    let (p, x, y, delta) = (inp.p, inp.x, inp.y, inp.delta);
    let log_middle = if inp.a == 0.0 {
        f64::NEG_INFINITY
    } else {
        std::f64::consts::LN_2 + p.powf(p) + delta * x / (10.0 * y) * (inp.a.ln() - p * y.ln())
    };
    let middle = log_middle.exp();
    let exponential = (-x * x / (2.0 * inp.b_breve * (1.0 + delta))).exp();
    RefinedBound {
        tail: inp.tail,
        middle,
        log_middle,
        exponential,
        total: inp.tail + middle + exponential,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTerm {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub statement: String,
    pub lhs_estimate: f64,
    pub lhs_stderr: f64,
    pub lhs_label: String,
    pub rhs_bound: f64,
    pub terms: Vec<BoundTerm>,
    pub pass: bool,
    pub repetitions: u64,
    pub horizon: u64,
    pub policies: Vec<Policy>,
    pub seeds: SeedPair,
}

fn term(name: &str, value: f64) -> BoundTerm {
    BoundTerm {
        name: name.into(),
        value,
    }
}

/// Upper capacity of `max_{k≤n} Σ_{i≤k} (X_i − Ĕ[X]) ≥ x` against the
/// smaller of the two exponential bounds.
pub fn verify_exp_ineq(
    fam: &MeasureFamily,
    policies: &[Policy],
    inputs: &ExpIneqInputs,
    repetitions: u64,
    seeds: SeedPair,
) -> Result<VerificationReport> {
    check_xy(inputs.x, inputs.y)?;
    let centre = fam.breve_expect(|v| v, &default_c_grid(), DEFAULT_LIMIT_TOL)?;
    if !centre.converged {
        return Err(Error::NotConverged(format!(
            "centering mean did not settle (last value {})",
            centre.value
        )));
    }
    let centre = centre.value;
    let x = inputs.x;
    let est = frequency_over_policies(
        fam,
        |path: &[(usize, f64)]| {
            let mut s = 0.0;
            path.iter().any(|&(_, y)| {
                s += y - centre;
                s >= x
            })
        },
        policies,
        inputs.n,
        repetitions,
        seeds,
    )?;
    let simple = exp_bound_simple(inputs);
    let refined = exp_bound_refined(inputs);
    let rhs = simple.total.min(refined.total);
    Ok(VerificationReport {
        statement: "maximal centred partial sum".into(),
        lhs_estimate: est.estimate,
        lhs_stderr: est.stderr,
        lhs_label: CAPACITY_LABEL.into(),
        rhs_bound: rhs,
        terms: vec![
            term("centre", centre),
            term("a", inputs.a),
            term("b_breve", inputs.b_breve),
            term("tail", simple.tail),
            term("simple_exponential", simple.exponential),
            term("simple_total", simple.total),
            term("refined_middle", refined.middle),
            term("refined_log_middle", refined.log_middle),
            term("refined_exponential", refined.exponential),
            term("refined_total", refined.total),
        ],
        pass: est.estimate <= rhs + 3.0 * est.stderr,
        repetitions,
        horizon: inputs.n,
        policies: policies.to_vec(),
        seeds,
    })
}

/// `exp{−x² / (2(xc + y))}`
pub fn martingale_bound(c: f64, x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    (-x * x / (2.0 * (x * c + y))).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MartingaleSetup {
    /// Bound on the absolute differences.
    pub c: f64,
    pub x: f64,
    /// Bound on the accumulated conditional variance.
    pub y: f64,
    pub horizon: u64,
}

/// Frequency of `S_n ≥ x` together with `Σ_{i≤n} E[X_i² | past] ≤ y` for
/// some `1 ≤ n ≤ horizon`. Differences come from mean-zero atomic members
/// supported in `[−c, c]`; the conditional variance of step `i` is the
/// second moment of the member the policy picked.
pub fn verify_martingale_ineq(
    fam: &MeasureFamily,
    policies: &[Policy],
    setup: &MartingaleSetup,
    repetitions: u64,
    seeds: SeedPair,
) -> Result<VerificationReport> {
    let MartingaleSetup { c, x, y, horizon } = *setup;
    if !(c > 0.0) || x < 0.0 || y < 0.0 {
        return Err(invalid(format!(
            "need c > 0, x >= 0, y >= 0; got c = {c}, x = {x}, y = {y}"
        )));
    }
    let mut second = Vec::with_capacity(fam.len());
    for (k, m) in fam.members().iter().enumerate() {
        let atoms = m
            .atoms()
            .ok_or_else(|| Error::Precondition(format!("member {k} ({m}) is not atomic")))?;
        let (lo, hi) = m.support();
        if lo < -c || hi > c {
            return Err(Error::Precondition(format!(
                "member {k} ({m}) is not bounded by {c}"
            )));
        }
        let mean: f64 = atoms.iter().map(|(v, p)| v * p).sum();
        if mean.abs() > 1e-12 {
            return Err(Error::Precondition(format!(
                "member {k} ({m}) has mean {mean}"
            )));
        }
        second.push(atoms.iter().map(|(v, p)| v * v * p).sum::<f64>());
    }
    let est = frequency_over_policies(
        fam,
        |path: &[(usize, f64)]| {
            let (mut s, mut q) = (0.0, 0.0);
            for &(theta, d) in path {
                s += d;
                q += second[theta];
                if q > y {
                    return false;
                }
                if s >= x {
                    return true;
                }
            }
            false
        },
        policies,
        horizon,
        repetitions,
        seeds,
    )?;
    let bound = martingale_bound(c, x, y);
    Ok(VerificationReport {
        statement: "martingale partial sum with bounded conditional variance".into(),
        lhs_estimate: est.estimate,
        lhs_stderr: est.stderr,
        lhs_label: CAPACITY_LABEL.into(),
        rhs_bound: bound,
        terms: vec![
            term("c", c),
            term("x", x),
            term("y", y),
            term("bound", bound),
        ],
        pass: est.estimate <= bound + 3.0 * est.stderr,
        repetitions,
        horizon,
        policies: policies.to_vec(),
        seeds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesClass {
    Convergent,
    Divergent,
    Undecided,
}

/// Local slope below which partial-sum increments count as decaying.
pub const CONVERGENT_SLOPE: f64 = -0.1;
/// Local slope above which increments count as not decaying.
pub const DIVERGENT_SLOPE: f64 = -0.02;
const SLOPE_RUN: usize = 3;

/// Classifies a series from partial sums at geometrically spaced indices by
/// the log-log slope of the increments between consecutive checkpoints.
/// Returns the class and the slopes.
pub fn classify_partial_sums(points: &[(u64, f64)]) -> (SeriesClass, Vec<f64>) {
    let incs: Vec<(f64, f64)> = points
        .windows(2)
        .map(|w| {
            (
                ((w[0].0 as f64) * (w[1].0 as f64)).sqrt().ln(),
                w[1].1 - w[0].1,
            )
        })
        .collect();
    if let Some(last) = incs.last() {
        if last.1 <= 0.0 {
            let class = if incs.len() >= 2 && incs[incs.len() - 2].1 <= 0.0 {
                SeriesClass::Convergent
            } else {
                SeriesClass::Undecided
            };
            return (class, Vec::new());
        }
    }
    let slopes: Vec<f64> = incs
        .windows(2)
        .map(|w| {
            if w[0].1 > 0.0 && w[1].1 > 0.0 {
                (w[1].1.ln() - w[0].1.ln()) / (w[1].0 - w[0].0)
            } else {
                f64::NAN
            }
        })
        .collect();
    if slopes.len() < SLOPE_RUN {
        return (SeriesClass::Undecided, slopes);
    }
    let tail = &slopes[slopes.len() - SLOPE_RUN..];
    let class = if tail.iter().all(|s| *s < CONVERGENT_SLOPE) {
        SeriesClass::Convergent
    } else if tail.iter().all(|s| *s > DIVERGENT_SLOPE) {
        SeriesClass::Divergent
    } else {
        SeriesClass::Undecided
    };
    (class, slopes)
}

/// Geometric checkpoints `10³ · 10^{k/2}` up to and including `n_max`.
fn series_checkpoints(n_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut k = 0;
    loop {
        let n = (1e3 * 10f64.powf(k as f64 / 2.0)).round() as u64;
        if n >= n_max {
            break;
        }
        out.push(n);
        k += 1;
    }
    out.push(n_max);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesTrack {
    /// `(N, Σ_{n≤N} term_n)`
    pub partial_sums: Vec<(u64, f64)>,
    pub slopes: Vec<f64>,
    pub class: SeriesClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDiagnostic {
    pub delta: f64,
    pub p: u32,
    /// `Σ V(|X| ≥ δ sqrt(n loglog n))`
    pub capacity_series: SeriesTrack,
    /// `Σ Ê[(|X| ∧ δ sqrt(n loglog n))^p] / (n loglog n)^{p/2}`
    pub moment_series: SeriesTrack,
    pub classification: SeriesClass,
    /// Finiteness of `C_V[X² / loglog|X|]`; `None` when undecidable.
    pub loglog_moment_finite: Option<bool>,
}

impl SeriesDiagnostic {
    /// False only when a decided classification contradicts a decided
    /// Choquet verdict.
    pub fn consistent(&self) -> bool {
        !matches!(
            (self.classification, self.loglog_moment_finite),
            (SeriesClass::Convergent, Some(false)) | (SeriesClass::Divergent, Some(true))
        )
    }
}

/// `E[(|X| ∧ c)^k]` along increasing `c`, reusing the bulk of the Gaussian
/// integral once `c` passes twelve standard deviations.
struct MomentCurve<'a> {
    dist: &'a Distribution,
    k: u32,
    saturated: Option<(f64, f64)>,
}

impl<'a> MomentCurve<'a> {
    fn new(dist: &'a Distribution, k: u32) -> Result<Self> {
        let saturated = match dist {
            Distribution::Parametric(ParametricDistribution::Gaussian { mean, variance }) => {
                let cut = mean.abs() + 12.0 * variance.sqrt();
                let full = dist.truncated_moment(k, cut)?;
                Some((cut, full - cut.powi(k as i32) * dist.abs_prob_greater(cut)))
            }
            _ => None,
        };
        Ok(Self { dist, k, saturated })
    }

    fn at(&self, c: f64) -> Result<f64> {
        match self.saturated {
            Some((cut, bulk)) if c > cut => {
                Ok(bulk + c.powi(self.k as i32) * self.dist.abs_prob_greater(c))
            }
            _ => self.dist.truncated_moment(self.k, c),
        }
    }
}

/// Partial sums of the two tail series up to `n_max`, classified by the
/// increment slope test and cross-checked with the loglog Choquet moment.
pub fn series_diagnostic(
    fam: &MeasureFamily,
    delta: f64,
    n_max: u64,
    p: u32,
) -> Result<SeriesDiagnostic> {
    if !(delta > 0.0) {
        return Err(invalid(format!("delta must be positive, got {delta}")));
    }
    if p < 1 {
        return Err(invalid("p must be >= 1"));
    }
    if n_max < 2 {
        return Err(invalid(format!("n_max must be >= 2, got {n_max}")));
    }
    let curves = fam
        .members()
        .iter()
        .map(|m| MomentCurve::new(m, p))
        .collect::<Result<Vec<_>>>()?;
    let checkpoints = series_checkpoints(n_max);
    let (mut cap_sum, mut mom_sum) = (0.0, 0.0);
    let (mut cap_pts, mut mom_pts) = (Vec::new(), Vec::new());
    let mut next = 0;
    for n in 1..=n_max {
        let nl = n as f64 * loglog(n as f64);
        let level = delta * nl.sqrt();
        cap_sum += capacity(fam, ThresholdEvent::AbsAtLeast(level)).upper;
        let mut m = f64::NEG_INFINITY;
        for c in &curves {
            m = m.max(c.at(level)?);
        }
        mom_sum += m / nl.powf(p as f64 / 2.0);
        if n == checkpoints[next] {
            cap_pts.push((n, cap_sum));
            mom_pts.push((n, mom_sum));
            next += 1;
        }
    }
    let (cap_class, cap_slopes) = classify_partial_sums(&cap_pts);
    let (mom_class, mom_slopes) = classify_partial_sums(&mom_pts);
    let classification = if cap_class == mom_class {
        cap_class
    } else {
        SeriesClass::Undecided
    };
    let loglog_moment_finite = match loglog_moment(fam, Side::Upper) {
        Ok(r) => Some(r.is_finite()),
        Err(Error::BoundaryUndecided(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(SeriesDiagnostic {
        delta,
        p,
        capacity_series: SeriesTrack {
            partial_sums: cap_pts,
            slopes: cap_slopes,
            class: cap_class,
        },
        moment_series: SeriesTrack {
            partial_sums: mom_pts,
            slopes: mom_slopes,
            class: mom_class,
        },
        classification,
        loglog_moment_finite,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallOReport {
    pub delta: f64,
    pub grid: Vec<u64>,
    /// `Ê[X² ∧ (2δ n loglog n)] / loglog n`
    pub second_moment_ratio: Vec<f64>,
    /// `Ĕ[(|X| − δ sqrt(2 n loglog n))⁺] / sqrt(loglog n / n)`
    pub excess_ratio: Vec<f64>,
    pub second_moment_decreasing: bool,
    pub excess_decreasing: bool,
    pub pass: bool,
}

fn nonincreasing_tail(v: &[f64]) -> bool {
    let tail = &v[v.len().saturating_sub(3)..];
    tail.windows(2).all(|w| w[1] <= w[0])
}

/// Evaluates the two ratios that vanish when the loglog moment is finite.
/// Refuses families whose loglog moment is infinite or undecided.
pub fn smallo_checks(fam: &MeasureFamily, delta: f64, grid: &[u64]) -> Result<SmallOReport> {
    if !(delta > 0.0) {
        return Err(invalid(format!("delta must be positive, got {delta}")));
    }
    if grid.len() < 3 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("grid needs at least 3 strictly increasing points"));
    }
    match loglog_moment(fam, Side::Upper) {
        Ok(r) if r.is_finite() => {}
        Ok(_) => return Err(Error::Precondition("loglog moment is infinite".into())),
        Err(Error::BoundaryUndecided(m)) => {
            return Err(Error::Precondition(format!("loglog moment undecided: {m}")))
        }
        Err(e) => return Err(e),
    }
    let c_grid = default_c_grid();
    let mut r1 = Vec::with_capacity(grid.len());
    let mut r2 = Vec::with_capacity(grid.len());
    for &n in grid {
        let nf = n as f64;
        let ll = loglog(nf);
        let cap = (2.0 * delta * nf * ll).sqrt();
        let mut m = f64::NEG_INFINITY;
        for d in fam.members() {
            m = m.max(d.truncated_moment(2, cap)?);
        }
        r1.push(m / ll);
        let shift = delta * (2.0 * nf * ll).sqrt();
        let ex = fam.breve_expect(|v| (v.abs() - shift).max(0.0), &c_grid, DEFAULT_LIMIT_TOL)?;
        if !ex.converged {
            return Err(Error::NotConverged(format!(
                "excess expectation at n = {n} did not settle"
            )));
        }
        r2.push(ex.value / (ll / nf).sqrt());
    }
    let a = nonincreasing_tail(&r1);
    let b = nonincreasing_tail(&r2);
    Ok(SmallOReport {
        delta,
        grid: grid.to_vec(),
        second_moment_ratio: r1,
        excess_ratio: r2,
        second_moment_decreasing: a,
        excess_decreasing: b,
        pass: a && b,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BorelCantelliReport {
    pub class: SeriesClass,
    pub partial_sums: Vec<(u64, f64)>,
    pub verdict: String,
}

/// Summability of per-index capacities `V(A_n)` and what it implies for
/// `V(A_n i.o.)`.
pub fn borel_cantelli_diag(capacities: &[f64], independent: bool) -> Result<BorelCantelliReport> {
    if let Some(v) = capacities.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(invalid(format!("capacity {v} not in [0,1]")));
    }
    let len = capacities.len() as u64;
    let mut marks = Vec::new();
    let mut k = 0;
    loop {
        let n = (10.0 * 10f64.powf(k as f64 / 2.0)).round() as u64;
        if n >= len {
            break;
        }
        marks.push(n);
        k += 1;
    }
    if len > 0 {
        marks.push(len);
    }
    let mut sum = 0.0;
    let mut pts = Vec::with_capacity(marks.len());
    let mut next = 0;
    for (i, v) in capacities.iter().enumerate() {
        sum += v;
        if next < marks.len() && (i + 1) as u64 == marks[next] {
            pts.push((marks[next], sum));
            next += 1;
        }
    }
    let (class, _) = classify_partial_sums(&pts);
    let verdict = match (class, independent) {
        (SeriesClass::Convergent, _) => "i.o. capacity 0",
        (SeriesClass::Divergent, true) => "upper i.o. capacity 1 candidate",
        (SeriesClass::Divergent, false) => "divergent; no verdict without independence",
        (SeriesClass::Undecided, _) => "undecided",
    };
    Ok(BorelCantelliReport {
        class,
        partial_sums: pts,
        verdict: verdict.into(),
    })
}
