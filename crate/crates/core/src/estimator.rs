//! Randomized integration by restriction to a random subspace.
//!
//! Each trial samples a Haar-random `k`-dimensional subspace `L`, integrates
//! the restricted polynomial exactly on `L` and multiplies by
//! `(n/k)^{exponent}`; the report's estimate is the median over an odd number
//! of trials. The exponent is `m/2` for Gaussian integrals and `m` for the
//! complex pairing.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{integrate_gaussian_capped, sphere_factor};
use crate::matching::DEFAULT_HAFNIAN_CAP;
use crate::poly::FocusedPolynomial;
use crate::rng::RngSeed;
use crate::scalar::Real;
use crate::subspace::{sample_subspace, Subspace};

pub const DEFAULT_GAMMA: f64 = 64.0;
pub const DEFAULT_TRIALS: usize = 11;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimatorConfig {
    pub epsilon: f64,
    pub gamma: f64,
    pub trials: usize,
    pub k_override: Option<usize>,
    pub seed: u64,
    pub hafnian_cap: usize,
}

impl EstimatorConfig {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        Self {
            epsilon,
            gamma: DEFAULT_GAMMA,
            trials: DEFAULT_TRIALS,
            k_override: None,
            seed,
            hafnian_cap: DEFAULT_HAFNIAN_CAP,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k_override = Some(k);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidConfig(format!("epsilon {} must lie in (0, 1)", self.epsilon)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidConfig(format!("gamma {} must be positive", self.gamma)));
        }
        if self.trials == 0 || self.trials.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!("trials {} must be odd and positive", self.trials)));
        }
        if self.k_override == Some(0) {
            return Err(Error::InvalidConfig("k override must be positive".into()));
        }
        Ok(())
    }
}

/// Subspace dimension actually used and where it came from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KChoice {
    pub k: usize,
    /// `γ ε^{-2} δ^{-2} ln(N + 2)` before rounding and clamping.
    pub bound: f64,
    pub clamped: bool,
    pub overridden: bool,
}

/// `k = min(n, ceil(γ ε^{-2} δ^{-2} ln(N+2)))`, or the override.
pub fn choose_k(n: usize, generators: usize, delta: f64, cfg: &EstimatorConfig) -> Result<KChoice> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidConfig(format!("delta {delta} must lie in (0, 1]")));
    }
    let bound = cfg.gamma / (cfg.epsilon * cfg.epsilon * delta * delta) * ((generators + 2) as f64).ln();
    if let Some(k) = cfg.k_override {
        if k == 0 || k > n {
            return Err(Error::BadSubspaceDimension { k, n });
        }
        return Ok(KChoice { k, bound, clamped: false, overridden: true });
    }
    let wanted = bound.ceil().max(1.0);
    if wanted >= n as f64 {
        Ok(KChoice { k: n, bound, clamped: wanted > n as f64, overridden: false })
    } else {
        Ok(KChoice { k: wanted as usize, bound, clamped: false, overridden: false })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport<T> {
    /// Median of `per_trial`.
    pub estimate: T,
    /// Scaled per-subspace values in trial order.
    pub per_trial: Vec<T>,
    pub k_used: usize,
    pub k_bound: f64,
    pub k_clamped: bool,
    pub delta_used: T,
    pub epsilon: f64,
    pub gamma: f64,
    /// `(n/k)^scaling_exponent`.
    pub scaling: T,
    pub scaling_exponent: f64,
    pub seed: u64,
}

/// Middle element of an odd-length slice.
pub fn median<T: Real>(values: &[T]) -> T {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    sorted[sorted.len() / 2]
}

/// Subspace for trial `index`. At `k = n` every subspace is the whole
/// space, so the identity frame is used directly.
pub fn trial_subspace<T: Real>(n: usize, k: usize, seed: u64, index: usize) -> Result<Subspace<T>> {
    if k == n {
        return Ok(Subspace::identity(n));
    }
    sample_subspace(n, k, RngSeed::trial(seed, index as u64))
}

/// Runs `cfg.trials` independent trials (in parallel) and assembles the report.
///
/// `exact_on` computes the unscaled restricted quantity on one subspace.
pub fn run_trials<T, F>(
    n: usize,
    choice: KChoice,
    delta: T,
    scaling_exponent: f64,
    cfg: &EstimatorConfig,
    exact_on: F,
) -> Result<EstimateReport<T>>
where
    T: Real,
    F: Fn(&Subspace<T>) -> Result<T> + Sync,
{
    cfg.validate()?;
    let scaling = T::of((n as f64 / choice.k as f64).powf(scaling_exponent));
    let per_trial = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let l = trial_subspace(n, choice.k, cfg.seed, t)?;
            Ok(scaling * exact_on(&l)?)
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(EstimateReport {
        estimate: median(&per_trial),
        per_trial,
        k_used: choice.k,
        k_bound: choice.bound,
        k_clamped: choice.clamped,
        delta_used: delta,
        epsilon: cfg.epsilon,
        gamma: cfg.gamma,
        scaling,
        scaling_exponent,
        seed: cfg.seed,
    })
}

/// Median-of-trials estimate of `∫ f dμ_n`.
pub fn estimate_gaussian_integral<T: Real>(poly: &FocusedPolynomial<T>, cfg: &EstimatorConfig) -> Result<EstimateReport<T>> {
    cfg.validate()?;
    let cert = poly.certificate()?;
    let n = poly.dimension();
    let m = poly.degree();
    if m > cfg.hafnian_cap {
        return Err(Error::OrderCapExceeded { order: m, cap: cfg.hafnian_cap });
    }
    let choice = choose_k(n, poly.generators().len(), cert.delta.as_f64(), cfg)?;
    run_trials(n, choice, cert.delta, m as f64 / 2.0, cfg, |l| {
        integrate_gaussian_capped(&poly.restrict(l)?, cfg.hafnian_cap)
    })
}

/// Median-of-trials estimate of the sphere average of `f`.
///
/// Odd degree gives zero without sampling.
pub fn estimate_sphere_integral<T: Real>(poly: &FocusedPolynomial<T>, cfg: &EstimatorConfig) -> Result<EstimateReport<T>> {
    cfg.validate()?;
    let n = poly.dimension();
    let m = poly.degree();
    if m % 2 == 1 {
        let cert = poly.certificate()?;
        let choice = choose_k(n, poly.generators().len(), cert.delta.as_f64(), cfg)?;
        return Ok(EstimateReport {
            estimate: T::zero(),
            per_trial: vec![T::zero(); cfg.trials],
            k_used: choice.k,
            k_bound: choice.bound,
            k_clamped: choice.clamped,
            delta_used: cert.delta,
            epsilon: cfg.epsilon,
            gamma: cfg.gamma,
            scaling: T::of((n as f64 / choice.k as f64).powf(m as f64 / 2.0)),
            scaling_exponent: m as f64 / 2.0,
            seed: cfg.seed,
        });
    }
    let factor = T::of(sphere_factor(n, m)?);
    let mut report = estimate_gaussian_integral(poly, cfg)?;
    for v in &mut report.per_trial {
        *v = *v * factor;
    }
    report.estimate = median(&report.per_trial);
    Ok(report)
}

/// Whether `value` lies in `[(1-ε)^e truth, (1-ε)^{-e} truth]`.
pub fn within_bracket(value: f64, truth: f64, epsilon: f64, exponent: f64) -> bool {
    let shrink = (1.0 - epsilon).powf(exponent);
    shrink * truth <= value && value <= truth / shrink
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::integrate_gaussian;

    #[test]
    fn choose_k_examples() {
        let cfg = EstimatorConfig::new(0.5, 0);
        let c = choose_k(1000, 1, 1.0, &cfg).unwrap();
        assert_eq!(c.k, 282);
        assert!((c.bound - 256.0 * 3f64.ln()).abs() < 1e-12);
        let small = choose_k(10, 1, 1.0, &cfg).unwrap();
        assert_eq!(small.k, 10);
        assert!(small.clamped);
        assert_eq!(choose_k(10, 1, 1.0, &cfg.clone().with_k(3)).unwrap().k, 3);
        assert!(choose_k(10, 1, 1.0, &cfg.clone().with_k(11)).is_err());
        assert!(choose_k(10, 1, 0.0, &cfg).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(EstimatorConfig::new(0.0, 0).validate().is_err());
        assert!(EstimatorConfig::new(1.0, 0).validate().is_err());
        assert!(EstimatorConfig::new(0.5, 0).with_trials(4).validate().is_err());
        assert!(EstimatorConfig::new(0.5, 0).with_gamma(-1.0).validate().is_err());
        assert!(EstimatorConfig::new(0.5, 0).validate().is_ok());
    }

    #[test]
    fn median_of_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[5.0]), 5.0);
    }

    #[test]
    fn full_space_is_exact() {
        let f = FocusedPolynomial::new(
            3,
            4,
            vec![vec![1.0, 0.2, 0.1], vec![0.8, 0.5, 0.0]],
            vec![crate::poly::Term::new(vec![0, 0, 1, 1], 2.0), crate::poly::Term::new(vec![0, 1, 1, 1], 0.5)],
        )
        .unwrap();
        let truth: f64 = integrate_gaussian(&f).unwrap();
        let report = estimate_gaussian_integral(&f, &EstimatorConfig::new(0.5, 1)).unwrap();
        assert_eq!(report.k_used, 3);
        assert_eq!(report.scaling, 1.0);
        for v in &report.per_trial {
            assert!((v - truth).abs() <= 1e-9 * truth);
        }
    }

    #[test]
    fn sphere_estimates() {
        let f = FocusedPolynomial::<f64>::coordinate_power(3, 0, 2).unwrap();
        let r = estimate_sphere_integral(&f, &EstimatorConfig::new(0.5, 2)).unwrap();
        assert!((r.estimate - 1.0 / 3.0).abs() < 1e-15);
        let odd = FocusedPolynomial::<f64>::coordinate_power(3, 0, 3).unwrap();
        let r = estimate_sphere_integral(&odd, &EstimatorConfig::new(0.5, 2)).unwrap();
        assert_eq!(r.estimate, 0.0);
        assert_eq!(r.per_trial.len(), DEFAULT_TRIALS);
    }

    #[test]
    fn bracket_helper() {
        assert!(within_bracket(1.0, 1.0, 0.5, 2.0));
        assert!(within_bracket(0.25, 1.0, 0.5, 2.0));
        assert!(!within_bracket(0.24, 1.0, 0.5, 2.0));
        assert!(within_bracket(4.0, 1.0, 0.5, 2.0));
        assert!(!within_bracket(4.1, 1.0, 0.5, 2.0));
    }

    #[test]
    fn not_focused_rejected() {
        let f = FocusedPolynomial::new(
            2,
            2,
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![crate::poly::Term::new(vec![0, 1], 1.0)],
        )
        .unwrap();
        assert!(matches!(estimate_gaussian_integral(&f, &EstimatorConfig::new(0.5, 0)), Err(Error::NotFocused { .. })));
    }
}
