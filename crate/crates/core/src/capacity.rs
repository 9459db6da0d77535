//! Upper/lower capacities of threshold events and Choquet integrals.
//!
//! For purely atomic families the Choquet integral is evaluated exactly:
//! the capacity `t ↦ V(g(X) ≥ t)` is constant between consecutive
//! transformed atom values, so the integral is a finite sum. Families with
//! Gaussian or Pareto members go through quadrature, with Pareto tails
//! classified analytically before anything is integrated.

use serde::{Deserialize, Serialize};
use std::f64::consts::E;

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_shells, Tail};
use crate::schedules::loglog;
use crate::sublinear::MeasureFamily;

/// Single-draw threshold events.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", content = "t", rename_all = "snake_case")]
pub enum ThresholdEvent {
    /// `X ≥ t`
    AtLeast(f64),
    /// `X > t`
    Greater(f64),
    /// `|X| ≥ t`
    AbsAtLeast(f64),
    /// `|X| > t`
    AbsGreater(f64),
}

impl ThresholdEvent {
    pub fn probability(&self, dist: &Distribution) -> f64 {
        match *self {
            ThresholdEvent::AtLeast(t) => dist.prob_at_least(t),
            ThresholdEvent::Greater(t) => dist.prob_greater(t),
            ThresholdEvent::AbsAtLeast(t) => dist.abs_prob_at_least(t),
            ThresholdEvent::AbsGreater(t) => dist.abs_prob_greater(t),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        match *self {
            ThresholdEvent::AtLeast(t) => x >= t,
            ThresholdEvent::Greater(t) => x > t,
            ThresholdEvent::AbsAtLeast(t) => x.abs() >= t,
            ThresholdEvent::AbsGreater(t) => x.abs() > t,
        }
    }
}

/// `(V(A), 𝒱(A))` with `𝒱(A) = 1 - V(Aᶜ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityValue {
    pub upper: f64,
    pub lower: f64,
}

/// Upper capacity `max_θ P_θ(A)` and lower capacity `min_θ P_θ(A)`.
pub fn capacity(fam: &MeasureFamily, ev: ThresholdEvent) -> CapacityValue {
    let probs = fam
        .members()
        .iter()
        .map(|m| ev.probability(m).clamp(0.0, 1.0));
    let (upper, lower) = probs.fold((0.0f64, 1.0f64), |(u, l), p| (u.max(p), l.min(p)));
    CapacityValue { upper, lower }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    fn aggregate(self, probs: impl Iterator<Item = f64>) -> f64 {
        match self {
            Side::Upper => probs.fold(0.0, f64::max),
            Side::Lower => probs.fold(1.0, f64::min),
        }
    }
}

/// Map applied to `X` before integrating.
#[derive(Debug, Clone, Copy)]
pub enum Transform {
    Identity,
    Square,
    /// `x² / loglog|x|` under the clamped logarithm.
    SquareOverLogLog,
    /// Arbitrary map; only valid on purely atomic families.
    Custom(fn(f64) -> f64),
}

impl Transform {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Transform::Identity => x,
            Transform::Square => x * x,
            Transform::SquareOverLogLog => x * x / loglog(x.abs()),
            Transform::Custom(f) => f(x),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Transform::Identity => "identity",
            Transform::Square => "square",
            Transform::SquareOverLogLog => "square_over_loglog",
            Transform::Custom(_) => "custom",
        }
    }

    /// Derivative in `u ≥ 0` of the even transforms.
    fn even_derivative(&self, u: f64) -> f64 {
        match self {
            Transform::Square => 2.0 * u,
            Transform::SquareOverLogLog => {
                let ee = E.powf(E);
                if u <= ee {
                    2.0 * u
                } else {
                    let lu = u.ln();
                    let l = lu.ln();
                    2.0 * u / l - u / (l * l * lu)
                }
            }
            _ => unreachable!(),
        }
    }
}

/// `C_V[g(X)]` split into its two parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChoquetResult {
    /// `+inf` when the positive part diverges.
    pub value: f64,
    pub positive_part: f64,
    pub negative_part: f64,
}

impl ChoquetResult {
    fn new(positive_part: f64, negative_part: f64) -> Self {
        Self {
            value: positive_part + negative_part,
            positive_part,
            negative_part,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// `C_V[g(X)] = ∫_0^∞ V(g(X) ≥ t) dt + ∫_{-∞}^0 [V(g(X) ≥ t) − 1] dt` with
/// `V` the upper or lower capacity of the family.
pub fn choquet(fam: &MeasureFamily, transform: Transform, side: Side) -> Result<ChoquetResult> {
    let atomic: Option<Vec<Vec<(f64, f64)>>> = fam.members().iter().map(|m| m.atoms()).collect();
    match atomic {
        Some(members) => Ok(choquet_atomic(&members, transform, side)),
        None => choquet_parametric(fam, transform, side),
    }
}

fn choquet_atomic(members: &[Vec<(f64, f64)>], transform: Transform, side: Side) -> ChoquetResult {
    let mapped: Vec<Vec<(f64, f64)>> = members
        .iter()
        .map(|atoms| {
            atoms
                .iter()
                .map(|&(v, p)| (transform.apply(v), p))
                .collect()
        })
        .collect();
    let mut thresholds: Vec<f64> = mapped.iter().flatten().map(|a| a.0).collect();
    thresholds.push(0.0);
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    let capacity_at = |t: f64| {
        side.aggregate(
            mapped
                .iter()
                .map(|atoms| atoms.iter().filter(|a| a.0 >= t).map(|a| a.1).sum()),
        )
    };
    let mut positive = 0.0;
    let mut negative = 0.0;
    for w in thresholds.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let v = capacity_at(hi);
        if lo >= 0.0 {
            positive += (hi - lo) * v;
        } else {
            negative += (hi - lo) * (v - 1.0);
        }
    }
    ChoquetResult::new(positive, negative)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum TailClass {
    Light,
    Heavy,
    Boundary,
}

/// Whether `∫^∞ u^{q-1} V(|X| ≥ u) du` diverges, where `V` aggregates the
/// members' tails by max (`any = true`) or by min.
fn tail_class(fam: &MeasureFamily, q: f64, any: bool) -> TailClass {
    let classify = |a: f64| {
        if a > q {
            TailClass::Light
        } else if a < q {
            TailClass::Heavy
        } else {
            TailClass::Boundary
        }
    };
    let tails: Vec<Option<f64>> = fam
        .members()
        .iter()
        .map(|m| m.pareto_tail().map(|t| t.0))
        .collect();
    if any {
        let min_a = tails
            .iter()
            .flatten()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_a.is_finite() {
            classify(min_a)
        } else {
            TailClass::Light
        }
    } else if tails.iter().any(|t| t.is_none()) {
        TailClass::Light
    } else {
        classify(tails.iter().flatten().cloned().fold(0.0, f64::max))
    }
}

fn choquet_parametric(
    fam: &MeasureFamily,
    transform: Transform,
    side: Side,
) -> Result<ChoquetResult> {
    if let Transform::Custom(_) = transform {
        let member = fam
            .members()
            .iter()
            .position(|m| m.atoms().is_none())
            .unwrap_or(0);
        return Err(Error::UnsupportedTransform {
            transform: transform.name().into(),
            member,
        });
    }
    let tol = fam.quadrature_tol();
    let mut breaks: Vec<f64> = Vec::new();
    for m in fam.members() {
        if let Some(atoms) = m.atoms() {
            breaks.extend(atoms.iter().map(|a| a.0.abs()));
        }
        if let Some((_, s)) = m.pareto_tail() {
            breaks.push(s);
        }
    }
    breaks.push(1.0);
    if let Transform::SquareOverLogLog = transform {
        breaks.push(E.powf(E));
    }
    match transform {
        Transform::Identity => {
            // Right tail drives the positive part; the left tail of the
            // complementary aggregate drives the negative part.
            let (pos_any, neg_any) = match side {
                Side::Upper => (true, false),
                Side::Lower => (false, true),
            };
            let pos_class = tail_class(fam, 1.0, pos_any);
            let neg_class = tail_class(fam, 1.0, neg_any);
            let heavy = |c| c != TailClass::Light;
            if heavy(pos_class) && heavy(neg_class) {
                return Err(Error::NonIntegrable(
                    "both parts of the Choquet integral of X diverge".into(),
                ));
            }
            let pos = if heavy(pos_class) {
                f64::INFINITY
            } else {
                half_line(&breaks, tol, |t| {
                    side.aggregate(fam.members().iter().map(|m| m.prob_at_least(t)))
                })
            };
            let neg = if heavy(neg_class) {
                f64::NEG_INFINITY
            } else {
                -half_line(&breaks, tol, |t| {
                    1.0 - side.aggregate(fam.members().iter().map(|m| m.prob_at_least(-t)))
                })
            };
            Ok(ChoquetResult::new(pos, neg))
        }
        Transform::Square | Transform::SquareOverLogLog => {
            let class = tail_class(fam, 2.0, side == Side::Upper);
            match (class, transform) {
                (TailClass::Boundary, Transform::SquareOverLogLog) => {
                    return Err(Error::BoundaryUndecided(
                        "Pareto tail index 2 sits on the finiteness boundary of E[X²/loglog|X|]"
                            .into(),
                    ))
                }
                (TailClass::Light, _) => {}
                _ => return Ok(ChoquetResult::new(f64::INFINITY, 0.0)),
            }
            let pos = half_line(&breaks, tol, |u| {
                side.aggregate(fam.members().iter().map(|m| m.abs_prob_at_least(u)))
                    * transform.even_derivative(u)
            });
            Ok(ChoquetResult::new(pos, 0.0))
        }
        Transform::Custom(_) => unreachable!(),
    }
}

/// `∫_0^∞ f`, splitting at the breakpoints and walking geometric shells past
/// the last one. The caller has already ruled out divergence.
fn half_line<F: Fn(f64) -> f64>(breaks: &[f64], tol: f64, f: F) -> f64 {
    let mut pts: Vec<f64> = breaks
        .iter()
        .cloned()
        .filter(|b| *b > 0.0 && b.is_finite())
        .collect();
    pts.push(0.0);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let pieces = pts.len().max(1) as f64;
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += integrate(&f, w[0], w[1], tol / (2.0 * pieces)).value;
    }
    let start = *pts.last().unwrap();
    match integrate_shells(&f, start, 2.0, tol / 2.0) {
        Tail::Finite(v) => total + v,
        Tail::Divergent(s) => s * f64::INFINITY,
    }
}

/// `C_V[X² / loglog|X|]`.
///
/// Pareto members are classified analytically (finite iff tail index > 2);
/// tail index exactly 2 is reported as [`Error::BoundaryUndecided`].
pub fn loglog_moment(fam: &MeasureFamily, side: Side) -> Result<ChoquetResult> {
    choquet(fam, Transform::SquareOverLogLog, side)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point_family() -> MeasureFamily {
        MeasureFamily::new(vec![
            Distribution::discrete(&[(0.0, 0.7), (2.0, 0.3)]).unwrap(),
            Distribution::discrete(&[(0.0, 0.4), (2.0, 0.6)]).unwrap(),
        ])
        .unwrap()
    }

    fn rad_pair() -> MeasureFamily {
        MeasureFamily::new(vec![
            Distribution::rademacher(1.0).unwrap(),
            Distribution::rademacher(3.0).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn capacity_examples() {
        let fam = two_point_family();
        let c = capacity(&fam, ThresholdEvent::AtLeast(1.0));
        assert!((c.upper - 0.6).abs() < 1e-15 && (c.lower - 0.3).abs() < 1e-15);
        let c = capacity(&fam, ThresholdEvent::AtLeast(-1e300));
        assert_eq!((c.upper, c.lower), (1.0, 1.0));
        let c = capacity(&fam, ThresholdEvent::Greater(2.0));
        assert_eq!((c.upper, c.lower), (0.0, 0.0));
    }

    #[test]
    fn strict_and_weak_thresholds() {
        let fam = rad_pair();
        assert_eq!(capacity(&fam, ThresholdEvent::AbsAtLeast(3.0)).upper, 1.0);
        assert_eq!(capacity(&fam, ThresholdEvent::AbsGreater(3.0)).upper, 0.0);
        assert_eq!(capacity(&fam, ThresholdEvent::AbsGreater(2.0)).lower, 0.0);
        let g = MeasureFamily::singleton(Distribution::gaussian(0.0, 1.0).unwrap());
        let a = capacity(&g, ThresholdEvent::AtLeast(1.0));
        let b = capacity(&g, ThresholdEvent::Greater(1.0));
        assert_eq!(a, b);
    }

    #[test]
    fn choquet_examples() {
        let fam = two_point_family();
        let up = choquet(&fam, Transform::Identity, Side::Upper).unwrap();
        assert!((up.value - 1.2).abs() < 1e-12);
        let lo = choquet(&fam, Transform::Identity, Side::Lower).unwrap();
        assert!((lo.value - 0.6).abs() < 1e-12);
        let sym = MeasureFamily::singleton(
            Distribution::discrete(&[(-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)]).unwrap(),
        );
        assert_eq!(
            choquet(&sym, Transform::Identity, Side::Upper)
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn negative_support() {
        let fam =
            MeasureFamily::singleton(Distribution::discrete(&[(-3.0, 0.5), (-1.0, 0.5)]).unwrap());
        let r = choquet(&fam, Transform::Identity, Side::Upper).unwrap();
        assert_eq!(r.positive_part, 0.0);
        assert!((r.value + 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_member_matches_expectation() {
        let d = Distribution::discrete(&[(-1.5, 0.2), (0.5, 0.3), (4.0, 0.5)]).unwrap();
        let e = d.expect(|x| x, 1e-12).unwrap();
        let c = choquet(
            &MeasureFamily::singleton(d),
            Transform::Identity,
            Side::Upper,
        )
        .unwrap();
        assert!((c.value - e).abs() < 1e-12);
    }

    #[test]
    fn loglog_moment_rademacher() {
        // loglog 3 = ln max(e, ln max(e, 3)) = ln e = 1, so the transform is x².
        let r = loglog_moment(&rad_pair(), Side::Upper).unwrap();
        assert_eq!(r.value, 9.0);
        let r = loglog_moment(&rad_pair(), Side::Lower).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn loglog_moment_pareto() {
        let p3 = MeasureFamily::singleton(Distribution::symmetric_pareto(3.0, 1.0).unwrap());
        assert!(loglog_moment(&p3, Side::Upper).unwrap().is_finite());
        let p15 = MeasureFamily::singleton(Distribution::symmetric_pareto(1.5, 1.0).unwrap());
        assert_eq!(
            loglog_moment(&p15, Side::Upper).unwrap().value,
            f64::INFINITY
        );
        let p2 = MeasureFamily::singleton(Distribution::symmetric_pareto(2.0, 1.0).unwrap());
        assert!(matches!(
            loglog_moment(&p2, Side::Upper),
            Err(Error::BoundaryUndecided(_))
        ));
        let mixed = MeasureFamily::new(vec![
            Distribution::symmetric_pareto(1.5, 1.0).unwrap(),
            Distribution::gaussian(0.0, 1.0).unwrap(),
        ])
        .unwrap();
        assert_eq!(
            loglog_moment(&mixed, Side::Upper).unwrap().value,
            f64::INFINITY
        );
        assert!(loglog_moment(&mixed, Side::Lower).unwrap().is_finite());
    }

    #[test]
    fn pareto_square_choquet_is_second_moment() {
        // Single member: C[X²] = E[X²] = 1 + 2/(a-2) for scale 1.
        let p = MeasureFamily::singleton(Distribution::symmetric_pareto(4.0, 1.0).unwrap());
        let r = choquet(&p, Transform::Square, Side::Upper).unwrap();
        assert!((r.value - 2.0).abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn gaussian_choquet_matches_moments() {
        let g = MeasureFamily::singleton(Distribution::gaussian(0.5, 2.0).unwrap());
        let r = choquet(&g, Transform::Identity, Side::Upper).unwrap();
        assert!((r.value - 0.5).abs() < 1e-8, "{r:?}");
        let r = choquet(&g, Transform::Square, Side::Upper).unwrap();
        assert!((r.value - 2.25).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn mixed_family_choquet_bounds() {
        let fam = MeasureFamily::new(vec![
            Distribution::gaussian(0.0, 1.0).unwrap(),
            Distribution::rademacher(2.0).unwrap(),
        ])
        .unwrap();
        let up = choquet(&fam, Transform::Square, Side::Upper).unwrap().value;
        let lo = choquet(&fam, Transform::Square, Side::Lower).unwrap().value;
        // Choquet upper dominates each member's linear expectation.
        assert!(up >= 4.0 - 1e-8 && lo <= 1.0 + 1e-8 && lo <= up);
    }

    #[test]
    fn custom_transform_rejected_on_parametric() {
        let g = MeasureFamily::singleton(Distribution::gaussian(0.0, 1.0).unwrap());
        let err = choquet(&g, Transform::Custom(|x| x.abs()), Side::Upper).unwrap_err();
        assert!(matches!(err, Error::UnsupportedTransform { member: 0, .. }));
        let ok = choquet(&rad_pair(), Transform::Custom(|x| x.abs()), Side::Upper).unwrap();
        assert_eq!(ok.value, 3.0);
    }

    #[test]
    fn heavy_identity_is_non_integrable() {
        let p = MeasureFamily::singleton(Distribution::symmetric_pareto(0.8, 1.0).unwrap());
        assert!(matches!(
            choquet(&p, Transform::Identity, Side::Upper),
            Err(Error::NonIntegrable(_))
        ));
    }
}
