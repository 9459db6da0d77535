//! Single-draw probability laws.
//!
//! Finite-discrete laws and the two-point Rademacher law are integrated
//! exactly by enumeration. Gaussian and symmetric Pareto laws use adaptive
//! Gauss–Kronrod quadrature; the Pareto tail is walked shell by shell so
//! that divergent integrals are reported instead of silently truncated.

use rand::RngCore;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use std::f64::consts::{PI, SQRT_2};

use crate::error::{invalid, Error, Result};
use crate::quad::{integrate, integrate_shells, Tail};

/// Finite law with strictly increasing atoms and positive probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    values: Vec<f64>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DiscreteDistribution {
    /// Builds the law from `(value, probability)` pairs. Duplicate values are
    /// merged and zero-probability atoms dropped.
    pub fn new(atoms: &[(f64, f64)]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        let mut sorted: Vec<(f64, f64)> = atoms.to_vec();
        for &(v, p) in &sorted {
            if !v.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "atom value {v} is not finite"
                )));
            }
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "probability {p} is not in [0,1]"
                )));
            }
        }
        let total: f64 = sorted.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut probs: Vec<f64> = Vec::with_capacity(sorted.len());
        for (v, p) in sorted {
            if p == 0.0 {
                continue;
            }
            match values.last() {
                Some(&last) if last == v => *probs.last_mut().unwrap() += p,
                _ => {
                    values.push(v);
                    probs.push(p);
                }
            }
        }
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(Self {
            values,
            probs,
            cumulative,
        })
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    fn sum<F: Fn(f64) -> f64>(&self, phi: F) -> f64 {
        self.atoms().map(|(v, p)| p * phi(v)).sum()
    }

    fn inverse_cdf(&self, u: f64) -> f64 {
        let total = *self.cumulative.last().unwrap();
        let target = u * total;
        let idx = self.cumulative.partition_point(|&c| c <= target);
        self.values[idx.min(self.values.len() - 1)]
    }
}

/// Parametric law families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParametricDistribution {
    Gaussian {
        mean: f64,
        variance: f64,
    },
    /// Symmetric about 0 with `P(|X| > u) = min(1, (u/scale)^(-tail_index))`.
    SymmetricPareto {
        tail_index: f64,
        scale: f64,
    },
    /// `±magnitude` with probability 1/2 each.
    ScaledRademacher {
        magnitude: f64,
    },
}

impl ParametricDistribution {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidDistribution(m));
        match *self {
            Self::Gaussian { mean, variance } => {
                if !mean.is_finite() {
                    return bad(format!("gaussian mean {mean} is not finite"));
                }
                if !(variance.is_finite() && variance > 0.0) {
                    return bad(format!("gaussian variance must be > 0, got {variance}"));
                }
            }
            Self::SymmetricPareto { tail_index, scale } => {
                if !(tail_index.is_finite() && tail_index > 0.0) {
                    return bad(format!("pareto tail index must be > 0, got {tail_index}"));
                }
                if !(scale.is_finite() && scale > 0.0) {
                    return bad(format!("pareto scale must be > 0, got {scale}"));
                }
            }
            Self::ScaledRademacher { magnitude } => {
                if !(magnitude.is_finite() && magnitude > 0.0) {
                    return bad(format!("rademacher magnitude must be > 0, got {magnitude}"));
                }
            }
        }
        Ok(())
    }
}

/// A law for one draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionSpec", into = "DistributionSpec")]
pub enum Distribution {
    Discrete(DiscreteDistribution),
    Parametric(ParametricDistribution),
}

/// JSON literal form of a [`Distribution`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    Discrete { atoms: Vec<(f64, f64)> },
    Gaussian { mean: f64, variance: f64 },
    Pareto { tail_index: f64, scale: f64 },
    Rademacher { magnitude: f64 },
}

impl TryFrom<DistributionSpec> for Distribution {
    type Error = Error;

    fn try_from(spec: DistributionSpec) -> Result<Self> {
        match spec {
            DistributionSpec::Discrete { atoms } => Distribution::discrete(&atoms),
            DistributionSpec::Gaussian { mean, variance } => Distribution::gaussian(mean, variance),
            DistributionSpec::Pareto { tail_index, scale } => {
                Distribution::symmetric_pareto(tail_index, scale)
            }
            DistributionSpec::Rademacher { magnitude } => Distribution::rademacher(magnitude),
        }
    }
}

impl From<Distribution> for DistributionSpec {
    fn from(d: Distribution) -> Self {
        match d {
            Distribution::Discrete(dd) => DistributionSpec::Discrete {
                atoms: dd.atoms().collect(),
            },
            Distribution::Parametric(ParametricDistribution::Gaussian { mean, variance }) => {
                DistributionSpec::Gaussian { mean, variance }
            }
            Distribution::Parametric(ParametricDistribution::SymmetricPareto {
                tail_index,
                scale,
            }) => DistributionSpec::Pareto { tail_index, scale },
            Distribution::Parametric(ParametricDistribution::ScaledRademacher { magnitude }) => {
                DistributionSpec::Rademacher { magnitude }
            }
        }
    }
}

impl std::fmt::Display for Distribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Distribution::Discrete(d) => {
                write!(f, "Discrete{{")?;
                for (i, (v, p)) in d.atoms().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "({v},{p})")?;
                }
                write!(f, "}}")
            }
            Distribution::Parametric(ParametricDistribution::Gaussian { mean, variance }) => {
                write!(f, "Gaussian({mean},{variance})")
            }
            Distribution::Parametric(ParametricDistribution::SymmetricPareto {
                tail_index,
                scale,
            }) => {
                write!(f, "SymmetricPareto(a={tail_index},scale={scale})")
            }
            Distribution::Parametric(ParametricDistribution::ScaledRademacher { magnitude }) => {
                write!(f, "Rademacher({magnitude})")
            }
        }
    }
}

/// Uniform draw from the open interval (0, 1).
#[inline]
pub(crate) fn open01<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn normal_upper_tail(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

fn standard_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Standardized core half-width for Gaussian quadrature.
const GAUSS_CORE: f64 = 8.0;

impl Distribution {
    pub fn discrete(atoms: &[(f64, f64)]) -> Result<Self> {
        Ok(Self::Discrete(DiscreteDistribution::new(atoms)?))
    }

    pub fn gaussian(mean: f64, variance: f64) -> Result<Self> {
        let p = ParametricDistribution::Gaussian { mean, variance };
        p.validate()?;
        Ok(Self::Parametric(p))
    }

    pub fn symmetric_pareto(tail_index: f64, scale: f64) -> Result<Self> {
        let p = ParametricDistribution::SymmetricPareto { tail_index, scale };
        p.validate()?;
        Ok(Self::Parametric(p))
    }

    pub fn rademacher(magnitude: f64) -> Result<Self> {
        let p = ParametricDistribution::ScaledRademacher { magnitude };
        p.validate()?;
        Ok(Self::Parametric(p))
    }

    /// Finite atoms, when the law is purely atomic.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            Self::Discrete(d) => Some(d.atoms().collect()),
            Self::Parametric(ParametricDistribution::ScaledRademacher { magnitude }) => {
                Some(vec![(-magnitude, 0.5), (*magnitude, 0.5)])
            }
            Self::Parametric(_) => None,
        }
    }

    /// Smallest interval containing the support.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Discrete(d) => (d.values[0], *d.values.last().unwrap()),
            Self::Parametric(ParametricDistribution::ScaledRademacher { magnitude }) => {
                (-magnitude, *magnitude)
            }
            Self::Parametric(_) => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// `E[phi(X)]`, with absolute error at most `tol` for quadrature-backed
    /// laws. Divergent integrals come back as `±inf`; an integral whose
    /// positive and negative parts both diverge is an error.
    pub fn expect<F: Fn(f64) -> f64>(&self, phi: F, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(invalid(format!("tolerance must be > 0, got {tol}")));
        }
        match self {
            Self::Discrete(d) => Ok(d.sum(phi)),
            Self::Parametric(p) => match *p {
                ParametricDistribution::ScaledRademacher { magnitude } => {
                    Ok(0.5 * phi(-magnitude) + 0.5 * phi(magnitude))
                }
                ParametricDistribution::Gaussian { mean, variance } => {
                    let sd = variance.sqrt();
                    let g = |z: f64| phi(mean + sd * z) * standard_normal_pdf(z);
                    let core = integrate(g, -GAUSS_CORE, GAUSS_CORE, tol / 2.0);
                    if !core.value.is_finite() {
                        return Err(Error::NonIntegrable(format!(
                            "integrand is not finite on the core of {self}"
                        )));
                    }
                    let up = integrate_shells(g, GAUSS_CORE, 2.0, tol / 4.0);
                    let down = integrate_shells(|z| g(-z), GAUSS_CORE, 2.0, tol / 4.0);
                    combine(core.value, up, down, self)
                }
                ParametricDistribution::SymmetricPareto {
                    tail_index: a,
                    scale: s,
                } => {
                    let norm = 0.5 * a * s.powf(a);
                    let density = move |u: f64| norm * u.powf(-a - 1.0);
                    let up = integrate_shells(|u| phi(u) * density(u), s, 2.0, tol / 2.0);
                    let down = integrate_shells(|u| phi(-u) * density(u), s, 2.0, tol / 2.0);
                    combine(0.0, up, down, self)
                }
            },
        }
    }

    /// `E[(|X| ∧ c)^k]`.
    pub fn truncated_moment(&self, k: u32, c: f64) -> Result<f64> {
        if k == 0 {
            return Err(invalid("moment order must be >= 1"));
        }
        if !(c > 0.0) {
            return Err(invalid(format!("truncation level must be > 0, got {c}")));
        }
        let kf = k as f64;
        let tm = |x: f64| x.abs().min(c).powi(k as i32);
        match self {
            Self::Discrete(d) => Ok(d.sum(tm)),
            Self::Parametric(p) => match *p {
                ParametricDistribution::ScaledRademacher { magnitude } => Ok(tm(magnitude)),
                ParametricDistribution::SymmetricPareto {
                    tail_index: a,
                    scale: s,
                } => {
                    if c <= s {
                        return Ok(c.powi(k as i32));
                    }
                    // s^k + ∫_s^c k u^(k-1) (u/s)^(-a) du
                    let base = s.powi(k as i32);
                    let tail = if (kf - a).abs() < 1e-12 {
                        kf * s.powf(a) * (c / s).ln()
                    } else {
                        kf * s.powf(a) * (c.powf(kf - a) - s.powf(kf - a)) / (kf - a)
                    };
                    Ok(base + tail)
                }
                ParametricDistribution::Gaussian { mean, variance } => {
                    let sd = variance.sqrt();
                    let lo = (mean - 12.0 * sd).max(-c);
                    let hi = (mean + 12.0 * sd).min(c);
                    let scale = c.powi(k as i32);
                    let tol = 1e-13 * (mean.abs() + sd).powi(k as i32).max(1.0);
                    let dens = |x: f64| {
                        let z = (x - mean) / sd;
                        x.abs().powi(k as i32) * standard_normal_pdf(z) / sd
                    };
                    let mut inner = 0.0;
                    if lo < hi {
                        if lo < 0.0 && hi > 0.0 {
                            inner += integrate(dens, lo, 0.0, tol / 2.0).value;
                            inner += integrate(dens, 0.0, hi, tol / 2.0).value;
                        } else {
                            inner += integrate(dens, lo, hi, tol).value;
                        }
                    }
                    let outside =
                        normal_upper_tail((c - mean) / sd) + normal_upper_tail((c + mean) / sd);
                    Ok(inner + scale * outside)
                }
            },
        }
    }

    /// One draw by inverse CDF (atomic and Pareto laws) or Box–Muller
    /// (Gaussian).
    pub fn sample_one<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Discrete(d) => d.inverse_cdf(open01(rng)),
            Self::Parametric(p) => match *p {
                ParametricDistribution::ScaledRademacher { magnitude } => {
                    if open01(rng) < 0.5 {
                        -magnitude
                    } else {
                        magnitude
                    }
                }
                ParametricDistribution::SymmetricPareto { tail_index, scale } => {
                    let u = open01(rng);
                    if u < 0.5 {
                        -scale * (2.0 * u).powf(-1.0 / tail_index)
                    } else {
                        scale * (2.0 * (1.0 - u)).powf(-1.0 / tail_index)
                    }
                }
                ParametricDistribution::Gaussian { mean, variance } => {
                    let u1 = open01(rng);
                    let u2 = open01(rng);
                    let z = (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos();
                    mean + variance.sqrt() * z
                }
            },
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.prob_greater(x)
    }

    /// `P(X ≥ t)`.
    pub fn prob_at_least(&self, t: f64) -> f64 {
        match self.atoms() {
            Some(atoms) => atoms.iter().filter(|a| a.0 >= t).map(|a| a.1).sum(),
            None => self.continuous_survival(t),
        }
    }

    /// `P(X > t)`.
    pub fn prob_greater(&self, t: f64) -> f64 {
        match self.atoms() {
            Some(atoms) => atoms.iter().filter(|a| a.0 > t).map(|a| a.1).sum(),
            None => self.continuous_survival(t),
        }
    }

    /// `P(|X| ≥ u)`.
    pub fn abs_prob_at_least(&self, u: f64) -> f64 {
        match self.atoms() {
            Some(atoms) => atoms.iter().filter(|a| a.0.abs() >= u).map(|a| a.1).sum(),
            None => self.continuous_abs_survival(u),
        }
    }

    /// `P(|X| > u)`.
    pub fn abs_prob_greater(&self, u: f64) -> f64 {
        match self.atoms() {
            Some(atoms) => atoms.iter().filter(|a| a.0.abs() > u).map(|a| a.1).sum(),
            None => self.continuous_abs_survival(u),
        }
    }

    fn continuous_survival(&self, t: f64) -> f64 {
        match *self {
            Self::Parametric(ParametricDistribution::Gaussian { mean, variance }) => {
                normal_upper_tail((t - mean) / variance.sqrt())
            }
            Self::Parametric(ParametricDistribution::SymmetricPareto { tail_index, scale }) => {
                let half_tail = |u: f64| 0.5 * (u / scale).powf(-tail_index).min(1.0);
                if t > 0.0 {
                    half_tail(t)
                } else {
                    1.0 - half_tail(-t)
                }
            }
            _ => unreachable!("atomic laws are enumerated"),
        }
    }

    fn continuous_abs_survival(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 1.0;
        }
        match *self {
            Self::Parametric(ParametricDistribution::Gaussian { mean, variance }) => {
                let sd = variance.sqrt();
                normal_upper_tail((u - mean) / sd) + normal_upper_tail((u + mean) / sd)
            }
            Self::Parametric(ParametricDistribution::SymmetricPareto { tail_index, scale }) => {
                (u / scale).powf(-tail_index).min(1.0)
            }
            _ => unreachable!("atomic laws are enumerated"),
        }
    }

    pub fn pareto_tail(&self) -> Option<(f64, f64)> {
        match *self {
            Self::Parametric(ParametricDistribution::SymmetricPareto { tail_index, scale }) => {
                Some((tail_index, scale))
            }
            _ => None,
        }
    }
}

fn combine(core: f64, up: Tail, down: Tail, dist: &Distribution) -> Result<f64> {
    match (up, down) {
        (Tail::Finite(a), Tail::Finite(b)) => Ok(core + a + b),
        (Tail::Divergent(s), Tail::Finite(_)) | (Tail::Finite(_), Tail::Divergent(s)) => {
            Ok(s * f64::INFINITY)
        }
        (Tail::Divergent(s1), Tail::Divergent(s2)) if s1 == s2 => Ok(s1 * f64::INFINITY),
        (Tail::Divergent(_), Tail::Divergent(_)) => Err(Error::NonIntegrable(format!(
            "both tails of the integral diverge with opposite signs under {dist}"
        ))),
    }
}

/// Free-function form of [`Distribution::expect`].
pub fn expect<F: Fn(f64) -> f64>(dist: &Distribution, phi: F, tol: f64) -> Result<f64> {
    dist.expect(phi, tol)
}

/// Free-function form of [`Distribution::truncated_moment`].
pub fn truncated_moment(dist: &Distribution, k: u32, c: f64) -> Result<f64> {
    dist.truncated_moment(k, c)
}

/// Free-function form of [`Distribution::sample`].
pub fn sample<R: RngCore + ?Sized>(dist: &Distribution, rng: &mut R, n: usize) -> Vec<f64> {
    dist.sample(rng, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedPair;

    fn rad(m: f64) -> Distribution {
        Distribution::rademacher(m).unwrap()
    }

    #[test]
    fn discrete_merges_and_sorts() {
        let d = DiscreteDistribution::new(&[(2.0, 0.25), (-1.0, 0.5), (2.0, 0.25), (5.0, 0.0)])
            .unwrap();
        assert_eq!(d.values(), &[-1.0, 2.0]);
        assert_eq!(d.probabilities(), &[0.5, 0.5]);
    }

    #[test]
    fn discrete_rejects_bad_input() {
        assert!(DiscreteDistribution::new(&[]).is_err());
        assert!(DiscreteDistribution::new(&[(0.0, 0.5)]).is_err());
        assert!(DiscreteDistribution::new(&[(0.0, -0.5), (1.0, 1.5)]).is_err());
        assert!(DiscreteDistribution::new(&[(f64::NAN, 1.0)]).is_err());
    }

    #[test]
    fn parametric_validation() {
        assert!(Distribution::gaussian(0.0, 0.0).is_err());
        assert!(Distribution::symmetric_pareto(-1.0, 1.0).is_err());
        assert!(Distribution::symmetric_pareto(2.0, 0.0).is_err());
        assert!(Distribution::rademacher(0.0).is_err());
    }

    #[test]
    fn expect_examples() {
        let d = Distribution::discrete(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        assert_eq!(d.expect(|x| x * x, 1e-9).unwrap(), 1.0);
        let g = Distribution::gaussian(0.0, 4.0).unwrap();
        assert!(g.expect(|x| x, 1e-9).unwrap().abs() < 1e-9);
        let g1 = Distribution::gaussian(0.0, 1.0).unwrap();
        assert!(g1.expect(|x| x, 0.0).is_err());
        assert!(g1.expect(|x| x, -1.0).is_err());
    }

    #[test]
    fn gaussian_moments() {
        let g = Distribution::gaussian(1.0, 4.0).unwrap();
        assert!((g.expect(|x| x, 1e-10).unwrap() - 1.0).abs() < 1e-9);
        assert!((g.expect(|x| x * x, 1e-10).unwrap() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn pareto_divergence_is_reported() {
        let p = Distribution::symmetric_pareto(1.5, 1.0).unwrap();
        assert_eq!(p.expect(|x| x * x, 1e-9).unwrap(), f64::INFINITY);
        assert_eq!(p.expect(|x| -x * x, 1e-9).unwrap(), f64::NEG_INFINITY);
        let heavy = Distribution::symmetric_pareto(0.5, 1.0).unwrap();
        assert!(matches!(
            heavy.expect(|x| x, 1e-9),
            Err(Error::NonIntegrable(_))
        ));
        // finite second moment for a = 3: 1 + 2∫_1^∞ u^-2 du = 3
        let p3 = Distribution::symmetric_pareto(3.0, 1.0).unwrap();
        assert!((p3.expect(|x| x * x, 1e-9).unwrap() - 3.0).abs() < 1e-7);
    }

    #[test]
    fn truncated_moment_examples() {
        let d = Distribution::discrete(&[(-3.0, 0.5), (3.0, 0.5)]).unwrap();
        assert_eq!(d.truncated_moment(2, 2.0).unwrap(), 4.0);
        assert!(d.truncated_moment(2, 0.0).is_err());
        assert!(d.truncated_moment(0, 1.0).is_err());
        for dist in [
            d,
            Distribution::gaussian(0.0, 1.0).unwrap(),
            Distribution::symmetric_pareto(3.0, 1.0).unwrap(),
        ] {
            let c = 1e-6;
            assert!(dist.truncated_moment(2, c).unwrap() <= c * c * (1.0 + 1e-9));
        }
    }

    #[test]
    fn gaussian_truncated_moment_matches_expect() {
        let g = Distribution::gaussian(0.5, 2.0).unwrap();
        for c in [0.3, 1.0, 2.5, 10.0, 1e6] {
            let a = g.truncated_moment(2, c).unwrap();
            let b = g.expect(|x| x.abs().min(c).powi(2), 1e-11).unwrap();
            assert!((a - b).abs() < 1e-9, "c={c} {a} {b}");
        }
    }

    #[test]
    fn sampling_reproducible_and_empty() {
        let g = Distribution::gaussian(0.0, 1.0).unwrap();
        let s = SeedPair::new(1, 2);
        assert!(g.sample(&mut s.draw_stream(), 0).is_empty());
        assert_eq!(
            g.sample(&mut s.draw_stream(), 5),
            g.sample(&mut s.draw_stream(), 5)
        );
    }

    #[test]
    fn rademacher_is_atomic() {
        let r = rad(3.0);
        assert_eq!(r.atoms().unwrap(), vec![(-3.0, 0.5), (3.0, 0.5)]);
        assert_eq!(r.prob_at_least(3.0), 0.5);
        assert_eq!(r.prob_greater(3.0), 0.0);
        assert_eq!(r.abs_prob_at_least(3.0), 1.0);
    }

    #[test]
    fn pareto_tails() {
        let p = Distribution::symmetric_pareto(2.0, 2.0).unwrap();
        assert_eq!(p.abs_prob_greater(1.0), 1.0);
        assert!((p.abs_prob_greater(4.0) - 0.25).abs() < 1e-15);
        assert!((p.prob_at_least(4.0) - 0.125).abs() < 1e-15);
        assert!((p.prob_at_least(-4.0) - 0.875).abs() < 1e-15);
        assert_eq!(p.prob_at_least(0.5), 0.5);
        assert!((p.cdf(-4.0) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn json_literals() {
        let d: Distribution =
            serde_json::from_str(r#"{"kind":"gaussian","mean":0,"variance":4}"#).unwrap();
        assert_eq!(d, Distribution::gaussian(0.0, 4.0).unwrap());
        let bad: std::result::Result<Distribution, _> =
            serde_json::from_str(r#"{"kind":"gaussian","mean":0,"variance":-4}"#);
        assert!(bad.is_err());
        let unknown: std::result::Result<Distribution, _> =
            serde_json::from_str(r#"{"kind":"rademacher","magnitude":1,"extra":2}"#);
        assert!(unknown.is_err());
        let rt =
            serde_json::to_string(&Distribution::discrete(&[(0.0, 0.25), (1.0, 0.75)]).unwrap())
                .unwrap();
        assert_eq!(rt, r#"{"kind":"discrete","atoms":[[0.0,0.25],[1.0,0.75]]}"#);
    }
}
