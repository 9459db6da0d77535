//! Adaptive Gauss–Kronrod (7/15) quadrature and a shell-wise integrator for
//! half-infinite ranges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy)]
pub(crate) struct QuadResult {
    pub value: f64,
    pub error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> QuadResult {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    QuadResult {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

struct Piece {
    a: f64,
    b: f64,
    r: QuadResult,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.r.error == other.r.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.r.error.total_cmp(&other.r.error)
    }
}

/// Globally adaptive integration of `f` over `[a, b]` to absolute error `tol`.
///
/// Bisects the piece with the largest error estimate until the summed
/// estimate drops below `tol` or the interval budget runs out. A non-finite
/// integrand value propagates into the result.
pub(crate) fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            error: 0.0,
        };
    }
    let first = gk15(&f, a, b);
    if !first.value.is_finite() {
        return first;
    }
    let mut heap = BinaryHeap::new();
    let mut total_err = first.error;
    heap.push(Piece { a, b, r: first });
    let mut count = 1;
    while total_err > tol && count < MAX_INTERVALS {
        let Some(p) = heap.pop() else { break };
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            heap.push(p);
            break;
        }
        let left = gk15(&f, p.a, mid);
        let right = gk15(&f, mid, p.b);
        if !left.value.is_finite() || !right.value.is_finite() {
            return QuadResult {
                value: left.value + right.value,
                error: f64::INFINITY,
            };
        }
        total_err += left.error + right.error - p.r.error;
        heap.push(Piece {
            a: p.a,
            b: mid,
            r: left,
        });
        heap.push(Piece {
            a: mid,
            b: p.b,
            r: right,
        });
        count += 1;
        // Recompute to shed accumulated cancellation in the running sum.
        if count % 256 == 0 {
            total_err = heap.iter().map(|p| p.r.error).sum();
        }
    }
    let mut pieces: Vec<Piece> = heap.into_vec();
    pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
    QuadResult {
        value: pieces.iter().map(|p| p.r.value).sum(),
        error: pieces.iter().map(|p| p.r.error).sum(),
    }
}

/// Outcome of integrating over `[start, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Tail {
    Finite(f64),
    /// Diverges; the sign is that of the dominant shells.
    Divergent(f64),
}

const MAX_SHELLS: usize = 1000;

/// Integrates `f` over `[start, ∞)` on geometric shells
/// `[start·r^k, start·r^(k+1)]`, `start > 0`.
///
/// Stops once at least [`MIN_SHELLS`] shells are done and a shell and the
/// geometric extrapolation of the remaining shells are both below
/// `tol / 10`. Declares divergence when shell
/// magnitudes stop decreasing or become non-finite while still large.
pub(crate) fn integrate_shells<F: Fn(f64) -> f64>(f: F, start: f64, ratio: f64, tol: f64) -> Tail {
    debug_assert!(start > 0.0 && ratio > 1.0);
    let mut total = 0.0;
    let mut lo = start;
    let mut history: Vec<f64> = Vec::new();
    for k in 0..MAX_SHELLS {
        let hi = lo * ratio;
        if !hi.is_finite() {
            break;
        }
        let shell_tol = tol / 4.0 * 0.5f64.powi(k.min(60) as i32);
        let r = integrate(&f, lo, hi, shell_tol);
        if !r.value.is_finite() {
            return extrapolate_or_diverge(total, &history, r.value.signum());
        }
        total += r.value;
        history.push(r.value);
        let mag = r.value.abs();
        if mag > tol / 10.0 && growing(&history) {
            return Tail::Divergent(r.value.signum());
        }
        if mag < tol / 10.0 && k + 1 >= MIN_SHELLS {
            if let Some(rho) = recent_ratio(&history) {
                if rho < 1.0 {
                    let rest = mag * rho / (1.0 - rho);
                    if rest < tol / 10.0 {
                        return Tail::Finite(total + r.value.signum() * rest);
                    }
                }
            } else if mag == 0.0
                && history.iter().rev().take(4).all(|v| *v == 0.0)
                && history.len() >= 4
            {
                return Tail::Finite(total);
            }
        }
        lo = hi;
    }
    let sign = history.last().map(|v| v.signum()).unwrap_or(1.0);
    extrapolate_or_diverge(total, &history, sign)
}

/// Shell magnitudes have not decreased over the last `GROWTH_RUN` shells.
fn growing(history: &[f64]) -> bool {
    history.len() > GROWTH_RUN
        && history[history.len() - GROWTH_RUN - 1..]
            .windows(2)
            .all(|w| w[0] != 0.0 && (w[1] / w[0]).abs() >= 1.0 - 1e-9)
}

const GROWTH_RUN: usize = 30;

/// Integrands that vanish near `start` and switch on further out must still
/// be seen; with ratio 2 this reaches `start · 2^40`.
pub(crate) const MIN_SHELLS: usize = 40;

/// Geometric ratio of the last few shell magnitudes, when they are strictly
/// positive and consistent.
fn recent_ratio(history: &[f64]) -> Option<f64> {
    if history.len() < 4 {
        return None;
    }
    let tail = &history[history.len() - 4..];
    if tail.contains(&0.0) {
        return None;
    }
    let ratios: Vec<f64> = tail.windows(2).map(|w| (w[1] / w[0]).abs()).collect();
    Some(ratios.iter().cloned().fold(0.0, f64::max))
}

fn extrapolate_or_diverge(total: f64, history: &[f64], sign: f64) -> Tail {
    match recent_ratio(history) {
        Some(rho) if rho < 1.0 - 1e-9 => {
            let last = *history.last().unwrap();
            Tail::Finite(total + last * rho / (1.0 - rho))
        }
        _ if history.iter().rev().take(4).all(|v| *v == 0.0) && history.len() >= 4 => {
            Tail::Finite(total)
        }
        _ => Tail::Divergent(if sign == 0.0 { 1.0 } else { sign }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12);
        // [x^4/4 - x^2 + x] from -1 to 3 = 14.25 + 1.75
        assert!((r.value - 16.0).abs() < 1e-12);
    }

    #[test]
    fn kinked_integrand() {
        let r = integrate(|x: f64| x.abs().min(0.5), -1.0, 1.0, 1e-12);
        assert!((r.value - 0.75).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn shells_converge_and_diverge() {
        match integrate_shells(|x: f64| x.powi(-3), 1.0, 2.0, 1e-10) {
            Tail::Finite(v) => assert!((v - 0.5).abs() < 1e-8, "{v}"),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            integrate_shells(|x: f64| x.powf(-0.5), 1.0, 2.0, 1e-10),
            Tail::Divergent(1.0)
        );
        assert_eq!(
            integrate_shells(|x: f64| -1.0 / x, 1.0, 2.0, 1e-10),
            Tail::Divergent(-1.0)
        );
    }

    #[test]
    fn late_switch_on() {
        // ∫_1^∞ (u − 1000)⁺ u⁻⁴ du = 1 / (6 · 1000²)
        let r = integrate_shells(|u| (u - 1000.0).max(0.0) * u.powi(-4), 1.0, 2.0, 1e-14);
        match r {
            Tail::Finite(v) => assert!((v - 1.0 / 6e6).abs() < 1e-12, "{v}"),
            Tail::Divergent(_) => panic!("diverged"),
        }
    }
}
