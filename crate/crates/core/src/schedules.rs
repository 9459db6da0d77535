//! Deterministic normalizing sequences and geometric block structure.
//!
//! Throughout, `log x = ln max(e, x)`, so `loglog x ≥ 1` for every `x`.

use serde::{Deserialize, Serialize};
use std::f64::consts::E;

use crate::error::{invalid, Result};

/// `ln max(e, x)`.
#[inline]
pub fn log_conv(x: f64) -> f64 {
    x.max(E).ln()
}

/// `log log x` under the clamped logarithm.
#[inline]
pub fn loglog(x: f64) -> f64 {
    log_conv(log_conv(x))
}

/// `t_j = sqrt(2 loglog j)`.
#[inline]
pub fn t(j: u64) -> f64 {
    (2.0 * loglog(j as f64)).sqrt()
}

/// `d_n = sqrt(2 n loglog n) = sqrt(n) t_n`.
#[inline]
pub fn d(n: u64) -> f64 {
    (n as f64).sqrt() * t(n)
}

/// How `α_j` is produced from `t_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlphaRule {
    /// `α_j = t_j^{-1/2}`.
    InverseSqrtT,
    /// `α_j = t_j^{-exponent}`; needs `0 < exponent < 2/(p-1)`.
    PowerOfT { exponent: f64 },
}

impl AlphaRule {
    pub fn exponent(&self) -> f64 {
        match *self {
            AlphaRule::InverseSqrtT => 0.5,
            AlphaRule::PowerOfT { exponent } => exponent,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AlphaRule::InverseSqrtT => "inverse_sqrt_t",
            AlphaRule::PowerOfT { .. } => "power_of_t",
        }
    }
}

/// The truncation levels `b_j = α_j sqrt(j) / t_j`, made nondecreasing by a
/// running maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleSpec", into = "ScheduleSpec")]
pub struct TruncationSchedule {
    p: f64,
    alpha_rule: AlphaRule,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_alpha_rule")]
    pub alpha_rule: AlphaRule,
}

fn default_p() -> f64 {
    3.0
}

fn default_alpha_rule() -> AlphaRule {
    AlphaRule::InverseSqrtT
}

impl TryFrom<ScheduleSpec> for TruncationSchedule {
    type Error = crate::error::Error;
    fn try_from(spec: ScheduleSpec) -> Result<Self> {
        TruncationSchedule::new(spec.p, spec.alpha_rule)
    }
}

impl From<TruncationSchedule> for ScheduleSpec {
    fn from(s: TruncationSchedule) -> Self {
        ScheduleSpec {
            p: s.p,
            alpha_rule: s.alpha_rule,
        }
    }
}

impl Default for TruncationSchedule {
    fn default() -> Self {
        Self {
            p: 3.0,
            alpha_rule: AlphaRule::InverseSqrtT,
        }
    }
}

impl TruncationSchedule {
    pub fn new(p: f64, alpha_rule: AlphaRule) -> Result<Self> {
        if !(p.is_finite() && p > 2.0) {
            return Err(invalid(format!("p must be > 2, got {p}")));
        }
        let g = alpha_rule.exponent();
        // α^{1-p} t^{-2} = t^{g(p-1)-2} → 0 iff g(p-1) < 2; α → 0 iff g > 0.
        if !(g > 0.0 && g * (p - 1.0) < 2.0) {
            return Err(invalid(format!(
                "alpha exponent {g} must lie in (0, {}) for p = {p}",
                2.0 / (p - 1.0)
            )));
        }
        Ok(Self { p, alpha_rule })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn alpha_rule(&self) -> AlphaRule {
        self.alpha_rule
    }

    pub fn alpha(&self, j: u64) -> f64 {
        t(j).powf(-self.alpha_rule.exponent())
    }

    /// `b_j` before the running maximum.
    pub fn b_raw(&self, j: u64) -> f64 {
        self.alpha(j) * (j as f64).sqrt() / t(j)
    }

    /// Nondecreasing `b_j`; O(j) per call. Prefer [`BIter`] or
    /// [`TruncationSchedule::table`] for sequences.
    pub fn b(&self, j: u64) -> f64 {
        assert!(j >= 1, "b_j is indexed from 1");
        self.iter().take(j as usize).last().unwrap()
    }

    /// `b_1, b_2, ...` streamed with the running maximum applied.
    pub fn iter(&self) -> BIter {
        BIter {
            schedule: *self,
            j: 0,
            running: 0.0,
        }
    }

    /// `b_1..=b_n`; entry `i` holds `b_{i+1}`.
    pub fn table(&self, n: usize) -> Vec<f64> {
        self.iter().take(n).collect()
    }

    /// `α_j^{1-p} t_j^{-2}`.
    pub fn residual(&self, j: u64) -> f64 {
        self.alpha(j).powf(1.0 - self.p) * t(j).powi(-2)
    }

    /// Checks on a probe grid that `α_j` and the residual decrease toward 0
    /// while `b_j` grows.
    pub fn check_constraints(&self, grid: &[u64]) -> ConstraintReport {
        let alphas: Vec<f64> = grid.iter().map(|&j| self.alpha(j)).collect();
        let residuals: Vec<f64> = grid.iter().map(|&j| self.residual(j)).collect();
        let bs: Vec<f64> = grid.iter().map(|&j| self.b_raw(j)).collect();
        let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
        ConstraintReport {
            alpha_decreasing: decreasing(&alphas),
            residual_decreasing: decreasing(&residuals),
            b_increasing: bs.windows(2).all(|w| w[1] > w[0]),
            alphas,
            residuals,
            bs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub alphas: Vec<f64>,
    pub residuals: Vec<f64>,
    pub bs: Vec<f64>,
    pub alpha_decreasing: bool,
    pub residual_decreasing: bool,
    pub b_increasing: bool,
}

impl ConstraintReport {
    pub fn ok(&self) -> bool {
        self.alpha_decreasing && self.residual_decreasing && self.b_increasing
    }
}

#[derive(Debug, Clone)]
pub struct BIter {
    schedule: TruncationSchedule,
    j: u64,
    running: f64,
}

impl Iterator for BIter {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.j += 1;
        self.running = self.running.max(self.schedule.b_raw(self.j));
        Some(self.running)
    }
}

/// `n_k = floor(λ^k)` (deduplicated) and the blocks `I(k) = {n_k+1..n_{k+1}}`
/// clipped at the horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockSchedule {
    pub lambda: f64,
    pub horizon: u64,
    pub n: Vec<u64>,
    /// Inclusive `(first, last)` index ranges.
    pub blocks: Vec<(u64, u64)>,
}

pub fn blocks(lambda: f64, horizon: u64) -> Result<BlockSchedule> {
    if !(lambda.is_finite() && lambda > 1.0) {
        return Err(invalid(format!("lambda must be > 1, got {lambda}")));
    }
    if horizon < 2 {
        return Err(invalid(format!("horizon must be >= 2, got {horizon}")));
    }
    let mut n: Vec<u64> = Vec::new();
    let mut k = 1i32;
    loop {
        let v = lambda.powi(k).floor();
        if v > horizon as f64 {
            break;
        }
        let v = v as u64;
        if v >= 1 && n.last() != Some(&v) {
            n.push(v);
        }
        k += 1;
    }
    let mut blocks: Vec<(u64, u64)> = n.windows(2).map(|w| (w[0] + 1, w[1])).collect();
    if let Some(&last) = n.last() {
        if last < horizon {
            blocks.push((last + 1, horizon));
        }
    }
    Ok(BlockSchedule {
        lambda,
        horizon,
        n,
        blocks,
    })
}
