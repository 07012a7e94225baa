//! Small statistical helpers shared by the experiment drivers: compensated
//! summation, normal-approximation confidence intervals, least-squares line
//! fits for log-tail slopes, and a two-sample chi-square test for comparing
//! empirical shape distributions.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Kahan-compensated sum; the binomial tails and long Monte Carlo reductions
/// go through this so that results do not depend on accumulation luck.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Sample mean and 95% confidence half-width (normal approximation).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MeanCi {
    pub mean: f64,
    pub half_width: f64,
    pub n: usize,
}

pub fn mean_ci(values: &[f64]) -> MeanCi {
    let n = values.len();
    if n == 0 {
        return MeanCi { mean: f64::NAN, half_width: f64::NAN, n: 0 };
    }
    let mean = kahan_sum(values.iter().copied()) / n as f64;
    if n == 1 {
        return MeanCi { mean, half_width: f64::INFINITY, n };
    }
    let var = kahan_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n as f64 - 1.0);
    MeanCi { mean, half_width: Z95 * (var / n as f64).sqrt(), n }
}

/// Binomial proportion with a 95% normal-approximation half-width.
pub fn proportion_ci(successes: u64, trials: u64) -> MeanCi {
    let n = trials as f64;
    let p = successes as f64 / n;
    MeanCi {
        mean: p,
        half_width: Z95 * (p * (1.0 - p) / n).sqrt(),
        n: trials as usize,
    }
}

/// Ordinary least squares fit of `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope estimate.
    pub slope_se: f64,
    pub points: usize,
}

impl LineFit {
    /// 95% confidence interval for the slope.
    pub fn slope_ci95(&self) -> (f64, f64) {
        (self.slope - Z95 * self.slope_se, self.slope + Z95 * self.slope_se)
    }
}

/// Fits a line through `(x, y)` pairs. Requires at least three points so the
/// residual variance estimate is defined.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 3 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = kahan_sum(xs.iter().copied()) / nf;
    let my = kahan_sum(ys.iter().copied()) / nf;
    let sxx = kahan_sum(xs.iter().map(|x| (x - mx) * (x - mx)));
    if sxx == 0.0 {
        return None;
    }
    let sxy = kahan_sum(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = kahan_sum(
        xs.iter()
            .zip(ys)
            .map(|(x, y)| {
                let r = y - (intercept + slope * x);
                r * r
            }),
    );
    let slope_se = (ss_res / (nf - 2.0) / sxx).sqrt();
    Some(LineFit { slope, intercept, slope_se, points: n })
}

/// Two-sample chi-square homogeneity test over categorical counts.
///
/// Cells are pooled greedily (rarest first) until every cell's expected count
/// under the pooled estimate is at least `min_expected` in both samples.
/// Returns `None` when fewer than two cells survive pooling.
pub fn chi_square_two_sample(
    counts_a: &[u64],
    counts_b: &[u64],
    min_expected: f64,
) -> Option<f64> {
    assert_eq!(counts_a.len(), counts_b.len());
    let total_a: u64 = counts_a.iter().sum();
    let total_b: u64 = counts_b.iter().sum();
    if total_a == 0 || total_b == 0 {
        return None;
    }
    let ta = total_a as f64;
    let tb = total_b as f64;

    // Keep cells whose expected counts are large enough on both sides and
    // pool the remainder into one bucket; a still-too-small pool is merged
    // into the smallest kept cell.
    let share = ta.min(tb) / (ta + tb);
    let mut order: Vec<usize> = (0..counts_a.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(counts_a[i] + counts_b[i]));
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut pool = (0.0f64, 0.0f64);
    for &i in &order {
        let (a, b) = (counts_a[i] as f64, counts_b[i] as f64);
        if (a + b) * share >= min_expected {
            cells.push((a, b));
        } else {
            pool.0 += a;
            pool.1 += b;
        }
    }
    if pool.0 + pool.1 > 0.0 {
        if (pool.0 + pool.1) * share >= min_expected || cells.is_empty() {
            cells.push(pool);
        } else {
            let last = cells.last_mut().expect("nonempty");
            last.0 += pool.0;
            last.1 += pool.1;
        }
    }
    if cells.len() < 2 {
        return None;
    }

    let mut stat = 0.0f64;
    for &(a, b) in &cells {
        let pooled = a + b;
        let ea = pooled * ta / (ta + tb);
        let eb = pooled * tb / (ta + tb);
        stat += (a - ea) * (a - ea) / ea + (b - eb) * (b - eb) / eb;
    }
    let dof = (cells.len() - 1) as f64;
    let dist = ChiSquared::new(dof).ok()?;
    Some(1.0 - dist.cdf(stat))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_handles_adverse_ordering() {
        let mut values = vec![1.0e16];
        values.extend(std::iter::repeat_n(1.0, 10_000));
        values.push(-1.0e16);
        assert_eq!(kahan_sum(values), 10_000.0);
    }

    #[test]
    fn mean_ci_matches_hand_computation() {
        let ci = mean_ci(&[1.0, 2.0, 3.0, 4.0]);
        assert!((ci.mean - 2.5).abs() < 1e-12);
        // sd = sqrt(5/3), half width = 1.96 * sd / 2
        let expect = Z95 * (5.0f64 / 3.0).sqrt() / 2.0;
        assert!((ci.half_width - expect).abs() < 1e-12);
    }

    #[test]
    fn fit_line_recovers_exact_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x).collect();
        let fit = fit_line(&xs, &ys).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3.0).abs() < 1e-12);
        assert!(fit.slope_se < 1e-9);
    }

    #[test]
    fn chi_square_accepts_identical_distributions() {
        let a = [500u64, 300, 200];
        let b = [510u64, 290, 200];
        let p = chi_square_two_sample(&a, &b, 5.0).unwrap();
        assert!(p > 0.05, "p = {p}");
    }

    #[test]
    fn chi_square_rejects_disjoint_distributions() {
        let a = [1000u64, 0];
        let b = [0u64, 1000];
        let p = chi_square_two_sample(&a, &b, 5.0).unwrap();
        assert!(p < 1e-6);
    }
}
