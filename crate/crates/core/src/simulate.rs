//! Scenario simulation of sequences that are i.i.d. under the upper
//! expectation of a [`MeasureFamily`].
//!
//! Each step a [`Policy`] picks a member `θ_i`, possibly looking at the
//! running sum, and the draw `Y_i` comes from that member. Every policy
//! yields one probability measure in the representing family, so
//! frequencies observed under a finite set of policies bound the upper
//! capacity from below.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{self, Write};

use crate::distributions::open01;
use crate::error::{invalid, Result};
use crate::rng::SeedPair;
use crate::schedules::{d, t, TruncationSchedule};
use crate::sublinear::{MeasureFamily, SigmaBounds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Maximize,
    Minimize,
}

/// Per-step member selection rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Policy {
    Constant {
        theta: usize,
    },
    /// Holds each listed member for `period` consecutive steps, cycling.
    Cyclic {
        thetas: Vec<usize>,
        period: u64,
    },
    /// Independently each step: `low` with probability `weight`, else `high`.
    Mixture {
        weight: f64,
        low: usize,
        high: usize,
    },
    /// Picks the member with the best mean for the objective; ties are
    /// broken toward the widest member when the running sum is on the wrong
    /// side of zero and toward the narrowest otherwise.
    Greedy {
        objective: Objective,
    },
    Scripted {
        thetas: Vec<usize>,
    },
}

impl Policy {
    pub fn validate(&self, family_size: usize) -> Result<()> {
        let check = |th: usize| {
            if th >= family_size {
                Err(invalid(format!(
                    "member index {th} out of range for a family of {family_size}"
                )))
            } else {
                Ok(())
            }
        };
        match self {
            Policy::Constant { theta } => check(*theta),
            Policy::Cyclic { thetas, period } => {
                if thetas.is_empty() || *period == 0 {
                    return Err(invalid("cyclic policy needs members and a positive period"));
                }
                thetas.iter().try_for_each(|t| check(*t))
            }
            Policy::Mixture { weight, low, high } => {
                if !(0.0..=1.0).contains(weight) {
                    return Err(invalid(format!("mixture weight {weight} not in [0,1]")));
                }
                check(*low)?;
                check(*high)
            }
            Policy::Greedy { .. } => Ok(()),
            Policy::Scripted { thetas } => thetas.iter().try_for_each(|t| check(*t)),
        }
    }

    fn validate_horizon(&self, horizon: u64) -> Result<()> {
        if let Policy::Scripted { thetas } = self {
            if (thetas.len() as u64) < horizon {
                return Err(invalid(format!(
                    "scripted policy has {} steps, horizon is {horizon}",
                    thetas.len()
                )));
            }
        }
        Ok(())
    }
}

/// Member summaries the greedy rule ranks on.
#[derive(Debug, Clone)]
struct MemberScores {
    means: Vec<f64>,
    spreads: Vec<f64>,
}

impl MemberScores {
    fn new(fam: &MeasureFamily) -> Result<Self> {
        Ok(Self {
            means: fam.member_expectations(|x| x.clamp(-1e3, 1e3))?,
            spreads: fam.member_expectations(|x| (x * x).min(1e6))?,
        })
    }
}

/// Evaluation of a policy along a trajectory.
pub(crate) struct Decider<'a> {
    policy: &'a Policy,
    scores: Option<MemberScores>,
}

impl<'a> Decider<'a> {
    pub(crate) fn new(fam: &MeasureFamily, policy: &'a Policy, horizon: u64) -> Result<Self> {
        policy.validate(fam.len())?;
        policy.validate_horizon(horizon)?;
        let scores = match policy {
            Policy::Greedy { .. } => Some(MemberScores::new(fam)?),
            _ => None,
        };
        Ok(Self { policy, scores })
    }

    #[inline]
    fn choose<R: RngCore>(&self, i: u64, running_sum: f64, rng: &mut R) -> usize {
        match self.policy {
            Policy::Constant { theta } => *theta,
            Policy::Cyclic { thetas, period } => {
                thetas[(((i - 1) / period) % thetas.len() as u64) as usize]
            }
            Policy::Mixture { weight, low, high } => {
                if open01(rng) < *weight {
                    *low
                } else {
                    *high
                }
            }
            Policy::Scripted { thetas } => thetas[(i - 1) as usize],
            Policy::Greedy { objective } => {
                let s = self
                    .scores
                    .as_ref()
                    .expect("greedy policy needs member scores");
                let sign = match objective {
                    Objective::Maximize => 1.0,
                    Objective::Minimize => -1.0,
                };
                let best = s
                    .means
                    .iter()
                    .map(|m| sign * m)
                    .fold(f64::NEG_INFINITY, f64::max);
                let behind = sign * running_sum <= 0.0;
                let mut pick = usize::MAX;
                for (k, m) in s.means.iter().enumerate() {
                    if sign * m < best - 1e-12 {
                        continue;
                    }
                    let better = pick == usize::MAX
                        || (behind && s.spreads[k] > s.spreads[pick])
                        || (!behind && s.spreads[k] < s.spreads[pick]);
                    if better {
                        pick = k;
                    }
                }
                pick
            }
        }
    }
}

/// Which indices are recorded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckpointRule {
    /// `n_{next} = max(n + 1, ceil(n · ratio))`, starting at 1; the horizon
    /// is always recorded.
    Geometric {
        ratio: f64,
    },
    All,
}

impl Default for CheckpointRule {
    fn default() -> Self {
        CheckpointRule::Geometric { ratio: 1.01 }
    }
}

impl CheckpointRule {
    fn validate(&self) -> Result<()> {
        match self {
            CheckpointRule::Geometric { ratio } if !(ratio.is_finite() && *ratio > 1.0) => Err(
                invalid(format!("checkpoint ratio must be > 1, got {ratio}")),
            ),
            _ => Ok(()),
        }
    }

    fn next_after(&self, n: u64) -> u64 {
        match self {
            CheckpointRule::All => n + 1,
            CheckpointRule::Geometric { ratio } => ((n as f64 * ratio).ceil() as u64).max(n + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: u64,
    pub s: f64,
    /// `Σ_{j≤n} min(Y_j², b_j²)`
    pub v2: f64,
    /// `Σ_{j≤n} Y_j²`
    pub u2: f64,
    /// `S_n / sqrt(2 n loglog n)`
    pub r: f64,
    /// `S_n / (V_n sqrt(2 loglog n))`, undefined while `V_n = 0`.
    pub t: Option<f64>,
    pub abs_sum: f64,
}

impl Checkpoint {
    /// Self-normalization by the untruncated `U_n`.
    pub fn t_untruncated(&self) -> Option<f64> {
        (self.u2 > 0.0).then(|| self.s / (self.u2.sqrt() * t(self.n)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub horizon: u64,
    pub seeds: SeedPair,
    pub checkpoints: Vec<Checkpoint>,
    pub max_abs_y: f64,
}

pub const CSV_HEADER: &str = "n,S,V2,U2,R,T";

impl Trajectory {
    pub fn last(&self) -> &Checkpoint {
        self.checkpoints
            .last()
            .expect("trajectory has at least the horizon checkpoint")
    }

    /// `(n, R_n)` pairs.
    pub fn r_series(&self) -> Vec<(u64, f64)> {
        self.checkpoints.iter().map(|c| (c.n, c.r)).collect()
    }

    /// `(n, T_n)` pairs where `T_n` is defined.
    pub fn t_series(&self) -> Vec<(u64, f64)> {
        self.checkpoints
            .iter()
            .filter_map(|c| c.t.map(|t| (c.n, t)))
            .collect()
    }

    /// Checks the accumulator invariants and `|T_n| ≤ Σ|Y_i| / (V_n t_n)`
    /// at every checkpoint.
    pub fn check_invariants(&self) -> bool {
        let mut prev: Option<&Checkpoint> = None;
        for c in &self.checkpoints {
            if c.v2 > c.u2 * (1.0 + 1e-12) {
                return false;
            }
            if let Some(p) = prev {
                if c.v2 < p.v2 || c.u2 < p.u2 || c.n <= p.n {
                    return false;
                }
            }
            if let Some(tn) = c.t {
                let bound = c.abs_sum / (c.v2.sqrt() * t(c.n));
                if tn.abs() > bound * (1.0 + 1e-12) {
                    return false;
                }
            }
            prev = Some(c);
        }
        true
    }

    /// Writes the checkpoint table: `n,S,V2,U2,R,T` with `T` blank when
    /// undefined. Floats use the shortest representation that round-trips.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for c in &self.checkpoints {
            match c.t {
                Some(tn) => writeln!(
                    w,
                    "{},{:?},{:?},{:?},{:?},{:?}",
                    c.n, c.s, c.v2, c.u2, c.r, tn
                )?,
                None => writeln!(w, "{},{:?},{:?},{:?},{:?},", c.n, c.s, c.v2, c.u2, c.r)?,
            }
        }
        Ok(())
    }
}

/// Streams one trajectory of length `horizon`, keeping only checkpoints.
pub fn run_trajectory(
    fam: &MeasureFamily,
    policy: &Policy,
    schedule: &TruncationSchedule,
    horizon: u64,
    seeds: SeedPair,
    rule: CheckpointRule,
) -> Result<Trajectory> {
    if horizon < 2 {
        return Err(invalid(format!("horizon must be >= 2, got {horizon}")));
    }
    rule.validate()?;
    let decider = Decider::new(fam, policy, horizon)?;
    let mut draws = seeds.draw_stream();
    let mut coins = seeds.policy_stream();

    let (mut s, mut v2, mut u2, mut abs_sum, mut max_abs, mut b) =
        (0.0, 0.0, 0.0, 0.0, 0.0f64, 0.0f64);
    let mut next = 1u64;
    let mut checkpoints = Vec::new();
    for i in 1..=horizon {
        let theta = decider.choose(i, s, &mut coins);
        let y = fam.member(theta).sample_one(&mut draws);
        b = b.max(schedule.b_raw(i));
        let y2 = y * y;
        s += y;
        u2 += y2;
        v2 += y2.min(b * b);
        abs_sum += y.abs();
        max_abs = max_abs.max(y.abs());
        if i == next || i == horizon {
            let tn = (v2 > 0.0).then(|| s / (v2.sqrt() * t(i)));
            checkpoints.push(Checkpoint {
                n: i,
                s,
                v2,
                u2,
                r: s / d(i),
                t: tn,
                abs_sum,
            });
            next = rule.next_after(i);
        }
    }
    Ok(Trajectory {
        horizon,
        seeds,
        checkpoints,
        max_abs_y: max_abs,
    })
}

/// All draws `Y_1..Y_n` of one trajectory.
pub fn run_path(fam: &MeasureFamily, policy: &Policy, n: u64, seeds: SeedPair) -> Result<Vec<f64>> {
    let decider = Decider::new(fam, policy, n)?;
    Ok(path_with(fam, &decider, n, seeds))
}

/// Draws together with the member that produced each of them.
pub fn run_scenario(
    fam: &MeasureFamily,
    policy: &Policy,
    n: u64,
    seeds: SeedPair,
) -> Result<Vec<(usize, f64)>> {
    let decider = Decider::new(fam, policy, n)?;
    let mut out = Vec::with_capacity(n as usize);
    scenario_into(fam, &decider, n, seeds, &mut out);
    Ok(out)
}

fn scenario_into(
    fam: &MeasureFamily,
    decider: &Decider<'_>,
    n: u64,
    seeds: SeedPair,
    out: &mut Vec<(usize, f64)>,
) {
    let mut draws = seeds.draw_stream();
    let mut coins = seeds.policy_stream();
    let mut s = 0.0;
    out.clear();
    for i in 1..=n {
        let theta = decider.choose(i, s, &mut coins);
        let y = fam.member(theta).sample_one(&mut draws);
        s += y;
        out.push((theta, y));
    }
}

fn path_with(fam: &MeasureFamily, decider: &Decider<'_>, n: u64, seeds: SeedPair) -> Vec<f64> {
    let mut buf = Vec::with_capacity(n as usize);
    scenario_into(fam, decider, n, seeds, &mut buf);
    buf.into_iter().map(|p| p.1).collect()
}

/// Largest event frequency over `policies`; path `r` of policy `k` uses the
/// seed child `(k << 40) | r`.
pub(crate) fn frequency_over_policies<E>(
    fam: &MeasureFamily,
    event: E,
    policies: &[Policy],
    horizon: u64,
    repetitions: u64,
    seeds: SeedPair,
) -> Result<CapacityEstimate>
where
    E: Fn(&[(usize, f64)]) -> bool + Sync,
{
    if policies.is_empty() {
        return Err(invalid("policy set is empty"));
    }
    if repetitions == 0 {
        return Err(invalid("repetitions must be positive"));
    }
    let deciders = policies
        .iter()
        .map(|p| Decider::new(fam, p, horizon))
        .collect::<Result<Vec<_>>>()?;
    let mut per_policy = Vec::with_capacity(policies.len());
    for (pi, decider) in deciders.iter().enumerate() {
        let hits = (0..repetitions)
            .into_par_iter()
            .map_init(Vec::new, |buf, r| {
                scenario_into(
                    fam,
                    decider,
                    horizon,
                    seeds.child(((pi as u64) << 40) | r),
                    buf,
                );
                event(buf) as u64
            })
            .sum::<u64>();
        let frequency = hits as f64 / repetitions as f64;
        per_policy.push(PolicyFrequency {
            policy: policies[pi].clone(),
            hits,
            repetitions,
            frequency,
            stderr: (frequency * (1.0 - frequency) / repetitions as f64).sqrt(),
        });
    }
    let best_policy = per_policy.iter().enumerate().fold(0, |best, (k, p)| {
        if p.frequency > per_policy[best].frequency {
            k
        } else {
            best
        }
    });
    Ok(CapacityEstimate {
        estimate: per_policy[best_policy].frequency,
        stderr: per_policy[best_policy].stderr,
        best_policy,
        per_policy,
        label: CAPACITY_LABEL.into(),
    })
}

/// Predicates on the draws of a finite path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathEvent {
    /// `S_n ≥ level`
    FinalSumAtLeast { level: f64 },
    /// `S_n > level`
    FinalSumGreater { level: f64 },
    /// `max_{k≤n} Σ_{i≤k} (Y_i − center) ≥ level`
    MaxCenteredSumAtLeast { center: f64, level: f64 },
}

impl PathEvent {
    pub fn holds(&self, ys: &[f64]) -> bool {
        match *self {
            PathEvent::FinalSumAtLeast { level } => ys.iter().sum::<f64>() >= level,
            PathEvent::FinalSumGreater { level } => ys.iter().sum::<f64>() > level,
            PathEvent::MaxCenteredSumAtLeast { center, level } => {
                let mut s = 0.0;
                ys.iter().any(|y| {
                    s += y - center;
                    s >= level
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyFrequency {
    pub policy: Policy,
    pub hits: u64,
    pub repetitions: u64,
    pub frequency: f64,
    pub stderr: f64,
}

/// Max-over-policies event frequency. Always a lower bound of the upper
/// capacity: a finite policy set cannot certify the supremum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub best_policy: usize,
    pub per_policy: Vec<PolicyFrequency>,
    pub label: String,
}

pub const CAPACITY_LABEL: &str = "lower bound of upper capacity";
pub const MIN_CAPACITY_REPETITIONS: u64 = 1000;

/// Estimates `sup_P P(event)` by the largest empirical frequency over the
/// given policies, `repetitions` independent paths of length `horizon` each.
pub fn empirical_upper_capacity<E>(
    fam: &MeasureFamily,
    event: E,
    policies: &[Policy],
    horizon: u64,
    repetitions: u64,
    seeds: SeedPair,
) -> Result<CapacityEstimate>
where
    E: Fn(&[f64]) -> bool + Sync,
{
    if repetitions < MIN_CAPACITY_REPETITIONS {
        return Err(invalid(format!(
            "need at least {MIN_CAPACITY_REPETITIONS} repetitions, got {repetitions}"
        )));
    }
    frequency_over_policies(
        fam,
        |path: &[(usize, f64)]| {
            let ys: Vec<f64> = path.iter().map(|p| p.1).collect();
            event(&ys)
        },
        policies,
        horizon,
        repetitions,
        seeds,
    )
}

/// `α` with `α σ̲² + (1 − α) σ̄² = target`.
pub fn mixture_weight(target: f64, bounds: SigmaBounds) -> Result<f64> {
    let (lo, hi) = (bounds.lower, bounds.upper);
    if !(target >= lo && target <= hi) {
        return Err(invalid(format!(
            "target variance {target} outside the band [{lo}, {hi}]"
        )));
    }
    if hi == lo {
        return Ok(0.0);
    }
    Ok((hi - target) / (hi - lo))
}

/// ε-net summary of the values a sequence visits over `[n0, N]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEstimate {
    pub window: (u64, u64),
    pub epsilon: f64,
    pub covered_interval: Option<(f64, f64)>,
    pub observed_range: Option<(f64, f64)>,
    pub hausdorff_to_target: Option<f64>,
    pub target: Option<(f64, f64)>,
    pub sample_points: usize,
    /// At least [`MIN_CLUSTER_POINTS`] points fell in the window.
    pub sufficient: bool,
}

pub const MIN_CLUSTER_POINTS: usize = 100;

/// Largest interval, inside the observed range, in which consecutive sorted
/// values are at most `epsilon` apart, so that every length-`epsilon`
/// subinterval holds an observation. Ties prefer the run containing 0.
pub fn estimate_cluster(
    points: &[(u64, f64)],
    n0: u64,
    epsilon: f64,
    target: Option<(f64, f64)>,
) -> Result<ClusterEstimate> {
    if !(epsilon > 0.0) {
        return Err(invalid(format!("epsilon must be > 0, got {epsilon}")));
    }
    let n_max = points.iter().map(|p| p.0).max().unwrap_or(n0);
    let mut values: Vec<f64> = points
        .iter()
        .filter(|p| p.0 >= n0 && p.1.is_finite())
        .map(|p| p.1)
        .collect();
    values.sort_by(f64::total_cmp);
    let sample_points = values.len();
    let mut est = ClusterEstimate {
        window: (n0, n_max),
        epsilon,
        covered_interval: None,
        observed_range: None,
        hausdorff_to_target: None,
        target,
        sample_points,
        sufficient: sample_points >= MIN_CLUSTER_POINTS,
    };
    if values.is_empty() {
        return Ok(est);
    }
    est.observed_range = Some((values[0], values[sample_points - 1]));
    let mut best = (values[0], values[0]);
    let mut start = values[0];
    let score = |iv: (f64, f64)| (iv.1 - iv.0, (iv.0 <= 0.0 && 0.0 <= iv.1) as u8);
    for w in values.windows(2) {
        if w[1] - w[0] > epsilon {
            let run = (start, w[0]);
            if score(run) > score(best) {
                best = run;
            }
            start = w[1];
        }
    }
    let run = (start, values[sample_points - 1]);
    if score(run) > score(best) {
        best = run;
    }
    est.covered_interval = Some(best);
    est.hausdorff_to_target = target.map(|(a, b)| (best.0 - a).abs().max((best.1 - b).abs()));
    Ok(est)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BinStats {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl BinStats {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(&mut self, other: &BinStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        let mean = if other.mean == self.mean {
            self.mean
        } else {
            self.mean + delta * other.count as f64 / n
        };
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.mean = mean;
        self.count += other.count;
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            f64::NAN
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn stderr(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceBin {
    /// Range of the previous running sum `S_{n-1}` routed to this bin.
    pub range: (f64, f64),
    pub stats: BinStats,
    pub stderr: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub upper_expectation: f64,
    pub bins: Vec<DominanceBin>,
    pub pass: bool,
}

/// Numerical floor on the slack of the dominance test.
const DOMINANCE_FLOOR: f64 = 1e-12;
const DOMINANCE_CHUNK: u64 = 1024;

/// Compares `E[phi(Y_n) | S_{n-1} ∈ bin]` with `Ê[phi]` across bins of the
/// previous running sum; a bin fails when its mean exceeds the bound by more
/// than three standard errors.
pub fn conditional_dominance_check<F>(
    fam: &MeasureFamily,
    policy: &Policy,
    phi: F,
    horizon: u64,
    repetitions: u64,
    bin_edges: &[f64],
    seeds: SeedPair,
) -> Result<DominanceReport>
where
    F: Fn(f64) -> f64 + Sync,
{
    if bin_edges.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("bin edges must be strictly increasing"));
    }
    let decider = Decider::new(fam, policy, horizon)?;
    let upper = fam.upper_expect(&phi)?;
    let nbins = bin_edges.len() + 1;
    let chunks = repetitions.div_ceil(DOMINANCE_CHUNK);
    let partials: Vec<Vec<BinStats>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut bins = vec![BinStats::default(); nbins];
            let end = ((c + 1) * DOMINANCE_CHUNK).min(repetitions);
            for r in c * DOMINANCE_CHUNK..end {
                let ys = path_with(fam, &decider, horizon, seeds.child(r));
                let mut s = 0.0;
                for y in ys {
                    let k = bin_edges.partition_point(|e| *e <= s);
                    bins[k].push(phi(y));
                    s += y;
                }
            }
            bins
        })
        .collect();
    let mut totals = vec![BinStats::default(); nbins];
    for part in &partials {
        for (t, p) in totals.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    let bins: Vec<DominanceBin> = totals
        .into_iter()
        .enumerate()
        .map(|(k, stats)| {
            let lo = if k == 0 {
                f64::NEG_INFINITY
            } else {
                bin_edges[k - 1]
            };
            let hi = if k == nbins - 1 {
                f64::INFINITY
            } else {
                bin_edges[k]
            };
            let se = if stats.count >= 2 {
                stats.stderr()
            } else {
                0.0
            };
            let pass = stats.count == 0 || stats.mean <= upper + 3.0 * se + DOMINANCE_FLOOR;
            DominanceBin {
                range: (lo, hi),
                stats,
                stderr: se,
                pass,
            }
        })
        .collect();
    let pass = bins.iter().all(|b| b.pass);
    Ok(DominanceReport {
        upper_expectation: upper,
        bins,
        pass,
    })
}
