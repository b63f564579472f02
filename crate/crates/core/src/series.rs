//! Convergence drivers for nonnegative series and improper integrals.
//!
//! Finiteness is numerically undecidable in general, so the drivers combine
//! three explicit signals:
//!
//! 1. geometric decay of block increments (ratio < 1/2 over three doublings);
//! 2. a certified tail: for series with a nonincreasing continuous term model
//!    the remainder is bounded by the tail integral, and for integrals the
//!    tail is computed directly through the `1/t` transform — if that
//!    quadrature settles, the object is finite by monotone comparison;
//! 3. non-decreasing increments over four doublings, which flags divergence.
//!
//! Anything else is reported as inconclusive. Closed forms in the calling
//! modules bypass the drivers entirely.

use crate::quad;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesVerdict {
    Convergent,
    Divergent,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralVerdict {
    Finite,
    Divergent,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesOutcome {
    pub verdict: SeriesVerdict,
    /// Best value estimate (partial sum plus midpoint tail when convergent).
    pub value: f64,
    pub partial: f64,
    /// Upper bound on the dropped tail (0 for exact finite sums).
    pub remainder_bound: f64,
    pub terms_used: u64,
    pub last_increment: f64,
    pub quad_fault: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralOutcome {
    pub verdict: IntegralVerdict,
    pub value: f64,
    pub upper_limit: f64,
    pub blocks: u32,
    pub last_increment: f64,
    pub quad_fault: bool,
}

const RATIO_GEOMETRIC: f64 = 0.5;
const RATIO_FLAT: f64 = 1.0 - 1e-6;
const GEOMETRIC_RUN: usize = 3;
const FLAT_RUN: usize = 4;

fn ratios_certify_geometric(increments: &[f64]) -> bool {
    if increments.len() < GEOMETRIC_RUN + 1 {
        return false;
    }
    increments
        .windows(2)
        .rev()
        .take(GEOMETRIC_RUN)
        .all(|w| w[1].abs() < RATIO_GEOMETRIC * w[0].abs() && w[0].abs() > 0.0)
}

fn ratios_certify_flat(increments: &[f64]) -> bool {
    if increments.len() < FLAT_RUN + 1 {
        return false;
    }
    let tail_positive = increments.iter().rev().take(FLAT_RUN + 1).all(|v| v.abs() > 0.0);
    tail_positive
        && increments
            .windows(2)
            .rev()
            .take(FLAT_RUN)
            .all(|w| w[1].abs() >= RATIO_FLAT * w[0].abs())
}

/// Sum `Σ_{m≥start} term(m)` of a nonnegative sequence.
///
/// `tail_model`, when present, must be a nonincreasing continuous function
/// with `tail_model(x) ≥ term(m)` for all `m ≥ x`; it certifies convergence
/// through the integral remainder and supplies the midpoint tail correction
/// used for the value estimate.
pub fn sum_series<T, M>(
    term: T,
    start: u64,
    tail_model: Option<M>,
    rel_tol: f64,
    max_panels: u32,
    max_terms: u64,
) -> SeriesOutcome
where
    T: Fn(u64) -> f64 + Sync,
    M: Fn(f64) -> f64 + Sync,
{
    let block_sum = |lo: u64, hi: u64| {
        let vals = crate::exec::map_range((hi - lo) as usize, |i| term(lo + i as u64));
        crate::exec::pairwise_sum(&vals)
    };

    // Head up to the first power-of-two boundary, then exact-doubling blocks
    // [K, 2K): those make constant increments of a log-divergent sum visible.
    let k0 = 64u64.max((start.max(1)).next_power_of_two());
    let mut partial = block_sum(start, k0);
    let mut increments: Vec<f64> = Vec::new();
    let mut m = k0;
    let mut quad_fault = false;

    loop {
        let hi = m * 2;
        let inc = block_sum(m, hi);
        partial += inc;
        increments.push(inc);
        m = hi;

        if !partial.is_finite() || partial > 1e300 || ratios_certify_flat(&increments) {
            return SeriesOutcome {
                verdict: SeriesVerdict::Divergent,
                value: f64::INFINITY,
                partial,
                remainder_bound: f64::INFINITY,
                terms_used: m - start,
                last_increment: inc,
                quad_fault,
            };
        }

        // Certified tail through the integral remainder of the model.
        if let Some(model) = &tail_model {
            let last_ratio = increments
                .windows(2)
                .last()
                .map(|w| if w[0].abs() > 0.0 { w[1].abs() / w[0].abs() } else { 0.0 })
                .unwrap_or(1.0);
            let should_try = last_ratio < 0.9 || increments.len() >= 4 || inc == 0.0;
            if should_try {
                let bound = quad::upper_tail(&|x| model(x).max(0.0), m as f64, rel_tol, max_panels / 4);
                if bound.converged && bound.value.is_finite() {
                    let rem = bound.value.max(0.0);
                    // Midpoint-rule tail error shrinks like |g'(m)|/24, far
                    // faster than the plain remainder bound.
                    let em_err = (model(m as f64 + 1.0) - model(m as f64)).abs() / 24.0;
                    if em_err <= 1e-9 * partial.abs().max(1e-9) || m - start >= max_terms {
                        let em = quad::upper_tail(
                            &|x| model(x).max(0.0),
                            m as f64 - 0.5,
                            rel_tol,
                            max_panels / 4,
                        );
                        quad_fault |= !em.converged;
                        return SeriesOutcome {
                            verdict: SeriesVerdict::Convergent,
                            value: partial + em.value.max(0.0),
                            partial,
                            remainder_bound: rem,
                            terms_used: m - start,
                            last_increment: inc,
                            quad_fault,
                        };
                    }
                    // Finite for sure; keep doubling to sharpen the value.
                } else if increments.len() > GEOMETRIC_RUN && ratios_certify_geometric(&increments) {
                    // Geometric decay without a usable tail integral.
                    let rho = last_ratio.min(0.49);
                    return SeriesOutcome {
                        verdict: SeriesVerdict::Convergent,
                        value: partial + inc * rho / (1.0 - rho),
                        partial,
                        remainder_bound: inc,
                        terms_used: m - start,
                        last_increment: inc,
                        quad_fault: true,
                    };
                }
            }
        } else if ratios_certify_geometric(&increments) {
            let rho = increments
                .windows(2)
                .last()
                .map(|w| (w[1].abs() / w[0].abs()).min(0.49))
                .unwrap_or(0.49);
            return SeriesOutcome {
                verdict: SeriesVerdict::Convergent,
                value: partial + inc * rho / (1.0 - rho),
                partial,
                remainder_bound: inc,
                terms_used: m - start,
                last_increment: inc,
                quad_fault,
            };
        }

        if m - start >= max_terms {
            return SeriesOutcome {
                verdict: SeriesVerdict::Inconclusive,
                value: partial,
                partial,
                remainder_bound: f64::INFINITY,
                terms_used: m - start,
                last_increment: inc,
                quad_fault,
            };
        }
    }
}

/// Decide `∫_a^∞ g` for a (sign-stable) integrand by doubling the upper
/// limit and applying the increment rules; a successful transform tail
/// certifies finiteness and supplies the exact remainder.
pub fn improper_integral<G>(
    g: G,
    a: f64,
    splits: &[f64],
    rel_tol: f64,
    max_panels: u32,
) -> IntegralOutcome
where
    G: Fn(f64) -> f64 + Sync,
{
    assert!(a > 0.0, "improper integrals start at a positive abscissa");
    let mut lo = a;
    let mut partial = 0.0f64;
    let mut increments: Vec<f64> = Vec::new();
    let mut quad_fault = false;

    for block in 0..44u32 {
        let hi = lo * 2.0;
        let r = quad::integrate(&g, lo, hi, splits, rel_tol, max_panels / 4);
        quad_fault |= !r.converged;
        partial += r.value;
        increments.push(r.value);
        lo = hi;

        if !partial.is_finite() || partial.abs() > 1e300 {
            return IntegralOutcome {
                verdict: IntegralVerdict::Divergent,
                value: if partial >= 0.0 { f64::INFINITY } else { f64::NEG_INFINITY },
                upper_limit: lo,
                blocks: block + 1,
                last_increment: r.value,
                quad_fault,
            };
        }

        if ratios_certify_flat(&increments) {
            return IntegralOutcome {
                verdict: IntegralVerdict::Divergent,
                value: if r.value >= 0.0 { f64::INFINITY } else { f64::NEG_INFINITY },
                upper_limit: lo,
                blocks: block + 1,
                last_increment: r.value,
                quad_fault,
            };
        }

        let last_ratio = increments
            .windows(2)
            .last()
            .map(|w| if w[0].abs() > 0.0 { w[1].abs() / w[0].abs() } else { 0.0 })
            .unwrap_or(1.0);
        if last_ratio < 0.9 || block >= 6 || r.value == 0.0 {
            let tail = quad::upper_tail(&g, lo, rel_tol, max_panels / 4);
            if tail.converged && tail.value.is_finite() {
                return IntegralOutcome {
                    verdict: IntegralVerdict::Finite,
                    value: partial + tail.value,
                    upper_limit: lo,
                    blocks: block + 1,
                    last_increment: r.value,
                    quad_fault,
                };
            }
        }

        if ratios_certify_geometric(&increments) {
            let rho = last_ratio.min(0.49);
            return IntegralOutcome {
                verdict: IntegralVerdict::Finite,
                value: partial + increments.last().unwrap() * rho / (1.0 - rho),
                upper_limit: lo,
                blocks: increments.len() as u32,
                last_increment: *increments.last().unwrap(),
                quad_fault,
            };
        }
    }

    IntegralOutcome {
        verdict: IntegralVerdict::Inconclusive,
        value: partial,
        upper_limit: lo,
        blocks: increments.len() as u32,
        last_increment: *increments.last().unwrap_or(&f64::NAN),
        quad_fault: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn p_series_three_halves_converges() {
        let out = sum_series(
            |k| (k as f64).powf(-1.5),
            1,
            Some(|x: f64| x.powf(-1.5)),
            1e-9,
            1 << 18,
            1 << 22,
        );
        assert_eq!(out.verdict, SeriesVerdict::Convergent);
        // ζ(3/2) = 2.612375348685488...
        assert_abs_diff_eq!(out.value, 2.612_375_348_685_488, epsilon = 1e-5);
    }

    #[test]
    fn harmonic_series_diverges() {
        let out = sum_series(
            |k| 1.0 / k as f64,
            1,
            Some(|x: f64| 1.0 / x),
            1e-9,
            1 << 16,
            1 << 22,
        );
        assert_eq!(out.verdict, SeriesVerdict::Divergent);
    }

    #[test]
    fn growing_terms_diverge() {
        let out = sum_series(
            |k| (k as f64).powf(-0.75),
            1,
            Some(|x: f64| x.powf(-0.75)),
            1e-9,
            1 << 16,
            1 << 22,
        );
        assert_eq!(out.verdict, SeriesVerdict::Divergent);
    }

    #[test]
    fn quadratic_tail_integral_is_finite() {
        let out = improper_integral(|t| t.powi(-2), 1.0, &[], 1e-9, 1 << 18);
        assert_eq!(out.verdict, IntegralVerdict::Finite);
        assert_abs_diff_eq!(out.value, 1.0, epsilon = 1e-7);
    }

    #[test]
    fn harmonic_integral_diverges() {
        let out = improper_integral(|t| 2.0 / t, 1.0, &[], 1e-9, 1 << 16);
        assert_eq!(out.verdict, IntegralVerdict::Divergent);
    }

    #[test]
    fn log_squared_integral_diverges() {
        let out = improper_integral(|t| 1.0 / t.ln().powi(2), std::f64::consts::E, &[], 1e-9, 1 << 16);
        assert_eq!(out.verdict, IntegralVerdict::Divergent);
    }
}
