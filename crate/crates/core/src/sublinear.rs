//! Upper and lower expectations over a finite family of laws, their
//! truncation limits, and the variance band.

use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{invalid, Error, Result};

/// Default quadrature tolerance for parametric members.
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-10;
/// Default tolerance of the two-successive-values convergence test.
pub const DEFAULT_LIMIT_TOL: f64 = 1e-6;

/// The index set Θ together with one law per index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilySpec", into = "FamilySpec")]
pub struct MeasureFamily {
    members: Vec<Distribution>,
    quadrature_tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub members: Vec<Distribution>,
    #[serde(default = "default_quadrature_tol")]
    pub quadrature_tol: f64,
}

fn default_quadrature_tol() -> f64 {
    DEFAULT_QUADRATURE_TOL
}

impl TryFrom<FamilySpec> for MeasureFamily {
    type Error = Error;
    fn try_from(spec: FamilySpec) -> Result<Self> {
        MeasureFamily::with_tolerance(spec.members, spec.quadrature_tol)
    }
}

impl From<MeasureFamily> for FamilySpec {
    fn from(f: MeasureFamily) -> Self {
        FamilySpec {
            members: f.members,
            quadrature_tol: f.quadrature_tol,
        }
    }
}

impl MeasureFamily {
    pub fn new(members: Vec<Distribution>) -> Result<Self> {
        Self::with_tolerance(members, DEFAULT_QUADRATURE_TOL)
    }

    pub fn with_tolerance(members: Vec<Distribution>, quadrature_tol: f64) -> Result<Self> {
        if members.is_empty() {
            return Err(invalid("measure family needs at least one member"));
        }
        if !(quadrature_tol > 0.0) {
            return Err(invalid(format!(
                "quadrature tolerance must be > 0, got {quadrature_tol}"
            )));
        }
        Ok(Self {
            members,
            quadrature_tol,
        })
    }

    pub fn singleton(d: Distribution) -> Self {
        Self {
            members: vec![d],
            quadrature_tol: DEFAULT_QUADRATURE_TOL,
        }
    }

    pub fn members(&self) -> &[Distribution] {
        &self.members
    }

    pub fn member(&self, theta: usize) -> &Distribution {
        &self.members[theta]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn quadrature_tol(&self) -> f64 {
        self.quadrature_tol
    }

    /// `E_θ[phi]` for every member, in index order.
    pub fn member_expectations<F: Fn(f64) -> f64>(&self, phi: F) -> Result<Vec<f64>> {
        self.members
            .iter()
            .map(|m| m.expect(&phi, self.quadrature_tol))
            .collect()
    }

    /// `Ê[phi(X)] = max_θ E_θ[phi(X)]`.
    pub fn upper_expect<F: Fn(f64) -> f64>(&self, phi: F) -> Result<f64> {
        Ok(self
            .member_expectations(phi)?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// `Ê̲[phi(X)] = -Ê[-phi(X)] = min_θ E_θ[phi(X)]`.
    pub fn lower_expect<F: Fn(f64) -> f64>(&self, phi: F) -> Result<f64> {
        Ok(self
            .member_expectations(phi)?
            .into_iter()
            .fold(f64::INFINITY, f64::min))
    }

    /// Limit of `Ê[phi(X)^(c)]` as `c → ∞`, where `y^(c) = (-c) ∨ y ∧ c`.
    pub fn breve_expect<F: Fn(f64) -> f64>(
        &self,
        phi: F,
        c_grid: &[f64],
        tol: f64,
    ) -> Result<TruncationLimit> {
        self.truncation_limit(phi, c_grid, tol, Bound::Upper)
    }

    fn truncation_limit<F: Fn(f64) -> f64>(
        &self,
        phi: F,
        c_grid: &[f64],
        tol: f64,
        bound: Bound,
    ) -> Result<TruncationLimit> {
        validate_grid(c_grid)?;
        let mut values = Vec::with_capacity(c_grid.len());
        for &c in c_grid {
            let clamped = |x: f64| phi(x).clamp(-c, c);
            let v = match bound {
                Bound::Upper => self.upper_expect(clamped)?,
                Bound::Lower => self.lower_expect(clamped)?,
            };
            values.push(v);
        }
        let n = values.len();
        let converged = (values[n - 1] - values[n - 2]).abs() < tol;
        Ok(TruncationLimit {
            value: values[n - 1],
            converged,
            c_grid: c_grid.to_vec(),
            values,
        })
    }

    /// `(σ̲², σ̄²)`: limits of the lower and upper expectations of `X² ∧ c`.
    pub fn sigma_bounds(&self, c_grid: &[f64], tol: f64) -> Result<SigmaBounds> {
        let upper = self.truncation_limit(|x| x * x, c_grid, tol, Bound::Upper)?;
        if !upper.converged {
            return Err(Error::InfiniteUpperVariance {
                last_value: upper.value,
                last_c: *c_grid.last().unwrap(),
            });
        }
        let lower = self.truncation_limit(|x| x * x, c_grid, tol, Bound::Lower)?;
        Ok(SigmaBounds {
            lower: lower.value.min(upper.value),
            upper: upper.value,
        })
    }

    /// Checks `Ĕ[X] = Ĕ[-X] = 0` within `tol`.
    pub fn check_mean_zero(&self, c_grid: &[f64], tol: f64) -> Result<MeanZeroReport> {
        let plus = self.breve_expect(|x| x, c_grid, tol)?;
        let minus = self.breve_expect(|x| -x, c_grid, tol)?;
        let holds =
            plus.converged && minus.converged && plus.value.abs() < tol && minus.value.abs() < tol;
        Ok(MeanZeroReport {
            upper_mean: plus,
            upper_negated_mean: minus,
            holds,
        })
    }
}

#[derive(Clone, Copy)]
enum Bound {
    Upper,
    Lower,
}

fn validate_grid(c_grid: &[f64]) -> Result<()> {
    if c_grid.len() < 3 {
        return Err(invalid("truncation grid needs at least 3 points"));
    }
    if c_grid.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
        return Err(invalid("truncation levels must be finite and > 0"));
    }
    if c_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("truncation grid must be strictly increasing"));
    }
    Ok(())
}

/// `c = 2^k`, `k = 0..=40`.
pub fn default_c_grid() -> Vec<f64> {
    (0..=40).map(|k| 2f64.powi(k)).collect()
}

/// Sequence of truncated values and whether it settled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationLimit {
    pub value: f64,
    pub converged: bool,
    pub c_grid: Vec<f64>,
    /// Truncated value at each grid point.
    pub values: Vec<f64>,
}

/// Variance band, in variance units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaBounds {
    pub lower: f64,
    pub upper: f64,
}

impl SigmaBounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(0.0 <= lower && lower <= upper && upper.is_finite()) {
            return Err(invalid(format!(
                "need 0 <= lower <= upper < inf, got ({lower}, {upper})"
            )));
        }
        Ok(Self { lower, upper })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanZeroReport {
    pub upper_mean: TruncationLimit,
    pub upper_negated_mean: TruncationLimit,
    pub holds: bool,
}

pub fn upper_expect<F: Fn(f64) -> f64>(fam: &MeasureFamily, phi: F) -> Result<f64> {
    fam.upper_expect(phi)
}

pub fn lower_expect<F: Fn(f64) -> f64>(fam: &MeasureFamily, phi: F) -> Result<f64> {
    fam.lower_expect(phi)
}

pub fn breve_expect<F: Fn(f64) -> f64>(
    fam: &MeasureFamily,
    phi: F,
    c_grid: &[f64],
    tol: f64,
) -> Result<TruncationLimit> {
    fam.breve_expect(phi, c_grid, tol)
}

pub fn sigma_bounds(fam: &MeasureFamily, c_grid: &[f64], tol: f64) -> Result<SigmaBounds> {
    fam.sigma_bounds(c_grid, tol)
}

pub fn check_mean_zero(fam: &MeasureFamily, c_grid: &[f64], tol: f64) -> Result<MeanZeroReport> {
    fam.check_mean_zero(c_grid, tol)
}
