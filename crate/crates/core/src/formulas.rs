//! Closed-form quantities used across the toolkit: the growth functional
//! that controls percolation survival on graphs with anchored expansion, the
//! binomial large-deviation rate function, exact binomial tails, and the
//! derived retention/threshold bounds.

use crate::stats::kahan_sum;
use statrs::function::gamma::ln_gamma;

/// `psi(h) = (1 + h)^(1 + 1/h) / h` for `h > 0`.
///
/// This is the exponential growth rate of the number of connected
/// edge-subsets of a given size that can touch a fixed vertex in a graph
/// whose anchored expansion constant is at least `h`; its reciprocal is a
/// retention threshold above which a cluster survives with positive
/// probability.
pub fn psi(h: f64) -> f64 {
    assert!(h > 0.0 && h.is_finite(), "psi requires h > 0, got {h}");
    (1.0 + h).powf(1.0 + 1.0 / h) / h
}

/// Binomial rate function
/// `I_p(alpha) = alpha ln(alpha/p) + (1 - alpha) ln((1-alpha)/(1-p))`
/// for `alpha, p in [0, 1]`, with the conventional continuous limits at the
/// endpoints (`0 ln 0 = 0`). Infinite when the event is impossible.
pub fn rate_function(p: f64, alpha: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "p must lie in [0, 1], got {p}");
    assert!((0.0..=1.0).contains(&alpha), "alpha must lie in [0, 1], got {alpha}");
    let term = |a: f64, b: f64| -> f64 {
        if a == 0.0 {
            0.0
        } else if b == 0.0 {
            f64::INFINITY
        } else {
            a * (a / b).ln()
        }
    };
    term(alpha, p) + term(1.0 - alpha, 1.0 - p)
}

/// Exact lower binomial tail `P(Binom(n, p) <= floor(alpha n))`, computed by
/// a multiplicative term recurrence with compensated summation, falling back
/// to log-space terms when the recurrence underflows.
pub fn binomial_tail(n: u64, p: f64, alpha: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p));
    assert!((0.0..=1.0).contains(&alpha));
    if p == 0.0 {
        return 1.0;
    }
    let m = (alpha * n as f64).floor() as u64;
    if p == 1.0 {
        return if m >= n { 1.0 } else { 0.0 };
    }
    let nf = n as f64;
    let ratio = p / (1.0 - p);
    // term(0) = (1-p)^n; term(k+1) = term(k) * (n-k)/(k+1) * p/(1-p).
    let mut term = (1.0 - p).powf(nf);
    if term > 0.0 && term.is_finite() {
        let mut terms = Vec::with_capacity((m + 1) as usize);
        terms.push(term);
        for k in 0..m {
            term *= (nf - k as f64) / (k as f64 + 1.0) * ratio;
            terms.push(term);
        }
        return kahan_sum(terms).min(1.0);
    }
    // Underflow path: accumulate exp(log term) with compensation.
    let log_terms = (0..=m).map(|k| {
        let kf = k as f64;
        ln_gamma(nf + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(nf - kf + 1.0)
            + kf * p.ln()
            + (nf - kf) * (1.0 - p).ln()
    });
    kahan_sum(log_terms.map(f64::exp)).min(1.0)
}

/// Retention thresholds implied by an anchored expansion constant `h > 0`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Thresholds {
    /// Upper bound on the critical probability: `1/(1 + h)`.
    pub pc_bound: f64,
    /// Threshold of the counting argument, `1 - h/(1+h)^(1+1/h) = 1 - 1/psi(h)`:
    /// above it, the expected number of fully-closed connected edge-sets of
    /// each size through the anchor decays geometrically.
    pub counting_bound: f64,
    /// Threshold of the cluster-growth argument, `1/(1 + h)`: above it, the
    /// anchored cluster is infinite with positive probability. Always at
    /// most `counting_bound`.
    pub exploration_bound: f64,
}

/// Retention thresholds implied by anchored expansion constant `h`.
pub fn thresholds(h: f64) -> Thresholds {
    assert!(h > 0.0 && h.is_finite(), "thresholds require h > 0, got {h}");
    Thresholds {
        pc_bound: 1.0 / (1.0 + h),
        counting_bound: 1.0 - 1.0 / psi(h),
        exploration_bound: 1.0 / (1.0 + h),
    }
}
