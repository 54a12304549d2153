//! Sampling primitives: truncated-normal onset times and day-rounded
//! exponential episode durations.

use crate::real::{real, Real};
use crate::rng::RngStream;

/// One draw from the standard normal via Box–Muller (second variate
/// discarded so the stream layout stays simple).
fn standard_normal<F: Real>(rng: &mut RngStream) -> F {
    let u1 = F::one() - rng.next_unit::<F>(); // (0, 1], keeps ln finite
    let u2 = rng.next_unit::<F>();
    let r = (-(real::<F>(2.0)) * u1.ln()).sqrt();
    r * (real::<F>(std::f64::consts::TAU) * u2).cos()
}

/// Draw from `Normal(mu, sigma)` left-truncated at 0.
///
/// Plain rejection is used while the acceptance region keeps reasonable
/// mass; when the truncation point sits deep in the upper tail the sampler
/// switches to Robert's shifted-exponential proposal, which accepts in
/// O(1) draws regardless of how far the tail is.
pub fn sample_truncated_normal<F: Real>(mu: F, sigma: F, rng: &mut RngStream) -> F {
    assert!(sigma >= F::zero(), "sigma must be nonnegative");
    if sigma == F::zero() {
        return mu.max(F::zero());
    }
    let alpha = (F::zero() - mu) / sigma; // standardized truncation point
    if alpha < real(2.0) {
        loop {
            let x = mu + sigma * standard_normal(rng);
            if x >= F::zero() {
                return x;
            }
        }
    }
    // Robert (1995): proposal alpha + Exp(lambda), lambda = (alpha + sqrt(alpha^2 + 4)) / 2.
    let lambda = (alpha + (alpha * alpha + real(4.0)).sqrt()) * real(0.5);
    loop {
        let e = -(F::one() - rng.next_unit::<F>()).ln() / lambda;
        let z = alpha + e;
        let d = z - lambda;
        let accept = (-(d * d) * real::<F>(0.5)).exp();
        if rng.next_unit::<F>() < accept {
            return mu + sigma * z;
        }
    }
}

/// Onset day: the truncated-normal draw rounded to the nearest whole day.
pub fn sample_onset_day<F: Real>(mu: F, sigma: F, rng: &mut RngStream) -> usize {
    let x = sample_truncated_normal(mu, sigma, rng);
    // x >= 0; a draw beyond usize range is past any horizon anyway.
    x.round().to_usize().unwrap_or(usize::MAX)
}

/// Exponential(rate) draw.
pub fn sample_exponential<F: Real>(rate: F, rng: &mut RngStream) -> F {
    assert!(rate > F::zero(), "rate must be positive");
    -(F::one() - rng.next_unit::<F>()).ln() / rate
}

/// Episode length in whole days: the exponential draw rounded up, at
/// least one day so the episode is visible at daily resolution.
pub fn sample_episode_days<F: Real>(rate: F, rng: &mut RngStream) -> usize {
    let x = sample_exponential(rate, rng);
    x.ceil().to_usize().unwrap_or(usize::MAX).max(1)
}

#[cfg(test)]
pub(crate) mod oracles {
    //! Independent numerical oracles used by tests. These integrate or sum
    //! the target densities directly and never touch the samplers.

    /// Standard normal density.
    fn phi(x: f64) -> f64 {
        (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
    }

    /// Composite Simpson integration of `f` over `[a, b]`.
    pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
        assert!(steps.is_multiple_of(2) && steps > 0);
        let h = (b - a) / steps as f64;
        let mut acc = f(a) + f(b);
        for i in 1..steps {
            let w = if i % 2 == 0 { 2.0 } else { 4.0 };
            acc += w * f(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    /// Mean of `Normal(mu, sigma)` left-truncated at 0, by quadrature.
    pub fn truncated_normal_mean(mu: f64, sigma: f64) -> f64 {
        let density = |x: f64| phi((x - mu) / sigma) / sigma;
        let hi = mu + 12.0 * sigma;
        let mass = simpson(density, 0.0, hi, 40_000);
        let first = simpson(|x| x * density(x), 0.0, hi, 40_000);
        first / mass
    }

    /// Mean of `round(X)` where `X ~ Normal(mu, sigma)` truncated at 0:
    /// each integer day accumulates its rounding bin's mass.
    pub fn truncated_normal_day_mean(mu: f64, sigma: f64) -> f64 {
        let density = |x: f64| phi((x - mu) / sigma) / sigma;
        let hi = mu + 12.0 * sigma;
        let mass = simpson(density, 0.0, hi, 40_000);
        let mut acc = 0.0;
        let mut day = 1usize;
        loop {
            let lo = day as f64 - 0.5;
            if lo > hi {
                break;
            }
            let bin = simpson(density, lo, (day as f64 + 0.5).min(hi), 2_000);
            acc += day as f64 * bin;
            day += 1;
        }
        acc / mass
    }

    /// Exact mean of `max(1, ceil(Exp(rate)))` by series summation.
    pub fn ceil_exponential_mean(rate: f64) -> f64 {
        let mut acc = 0.0;
        let mut k = 1u32;
        loop {
            let p = (-rate * (k as f64 - 1.0)).exp() - (-rate * k as f64).exp();
            acc += k as f64 * p;
            if (-rate * k as f64).exp() * (k as f64 + 2.0) < 1e-15 {
                break;
            }
            k += 1;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::oracles::*;
    use super::*;
    use crate::rng::RngStream;

    fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn degenerate_sigma_returns_mu() {
        let mut rng = RngStream::new(1);
        for _ in 0..100 {
            assert_eq!(sample_onset_day(10.0f64, 0.0, &mut rng), 10);
        }
    }

    #[test]
    fn onset_day_mean_matches_quadrature_at_zero_mu() {
        let mut rng = RngStream::new(20_240_001);
        let n = 200_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| sample_onset_day(0.0f64, 1.0, &mut rng) as f64)
            .collect();
        let (mean, se) = mean_and_stderr(&draws);
        let expected = truncated_normal_day_mean(0.0, 1.0);
        assert!(
            (mean - expected).abs() < 3.0 * se,
            "mean {mean} vs oracle {expected} (3se {})",
            3.0 * se
        );
    }

    #[test]
    fn continuous_sampler_mean_matches_quadrature() {
        let mut rng = RngStream::new(77);
        let n = 200_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| sample_truncated_normal(0.0f64, 1.0, &mut rng))
            .collect();
        let (mean, se) = mean_and_stderr(&draws);
        let expected = truncated_normal_mean(0.0, 1.0); // ~0.7979
        assert!((expected - 0.7979).abs() < 1e-3);
        assert!((mean - expected).abs() < 3.0 * se);
    }

    #[test]
    fn truncation_negligible_far_from_zero() {
        let mut rng = RngStream::new(3);
        let n = 100_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| sample_truncated_normal(100.0f64, 1.0, &mut rng))
            .collect();
        let (mean, se) = mean_and_stderr(&draws);
        assert!((mean - 100.0).abs() < 3.0 * se);
    }

    #[test]
    fn tail_sampler_agrees_with_quadrature() {
        // mu far below zero forces the shifted-exponential branch.
        let mut rng = RngStream::new(9);
        let n = 100_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| sample_truncated_normal(-5.0f64, 1.0, &mut rng))
            .collect();
        assert!(draws.iter().all(|&x| x >= 0.0));
        let (mean, se) = mean_and_stderr(&draws);
        let expected = truncated_normal_mean(-5.0, 1.0);
        assert!(
            (mean - expected).abs() < 3.0 * se,
            "mean {mean} vs {expected}"
        );
    }

    #[test]
    fn episode_days_mean_matches_series() {
        // mean on-duration 5 days -> rate 0.2
        let rate = 0.2f64;
        let mut rng = RngStream::new(11);
        let n = 100_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| sample_episode_days(rate, &mut rng) as f64)
            .collect();
        let (mean, se) = mean_and_stderr(&draws);
        let expected = ceil_exponential_mean(rate);
        // cross-check the series against the geometric closed form
        assert!((expected - 1.0 / (1.0 - (-rate).exp())).abs() < 1e-12);
        assert!(
            (mean - expected).abs() < 3.0 * se,
            "mean {mean} vs series {expected}"
        );
    }

    #[test]
    fn episode_days_at_least_one() {
        let mut rng = RngStream::new(13);
        for _ in 0..10_000 {
            assert!(sample_episode_days(50.0f64, &mut rng) >= 1);
        }
    }

    #[test]
    fn f32_instantiation_stays_in_support() {
        let mut rng = RngStream::new(21);
        for _ in 0..10_000 {
            let x: f32 = sample_truncated_normal(0.5f32, 2.0, &mut rng);
            assert!(x >= 0.0);
        }
    }
}
