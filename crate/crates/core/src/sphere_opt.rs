//! Maximization on the unit sphere by restriction to a random subspace.
//!
//! The restricted polynomial is maximized on `S^{k-1}` by multi-start
//! projected gradient ascent: move along the tangent component of the
//! analytic gradient, renormalize, and accept only increases, doubling the
//! step after a success and halving it after a failure. Reported maxima are
//! the best values found; no global optimality certificate is attempted.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::{choose_k, trial_subspace, EstimatorConfig, KChoice, DEFAULT_GAMMA};
use crate::gaussian::{integrate_gaussian_capped, sphere_factor};
use crate::matching::DEFAULT_HAFNIAN_CAP;
use crate::poly::{FocusedPolynomial, DEFAULT_TERM_CAP};
use crate::rng::{GaussianStream, RngSeed};
use crate::scalar::{dot, norm, Real};

/// Stream offset for restart points, kept clear of the per-trial streams.
const RESTART_STREAM: u64 = 1 << 32;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptConfig {
    pub epsilon: f64,
    pub gamma: f64,
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    pub step_tolerance: f64,
    /// Stop when the tangent gradient is below this fraction of `|f|`.
    pub gradient_tolerance: f64,
    pub k_override: Option<usize>,
    pub hafnian_cap: usize,
    pub term_cap: usize,
}

impl OptConfig {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        Self {
            epsilon,
            gamma: DEFAULT_GAMMA,
            seed,
            restarts: 32,
            max_iters: 500,
            step_tolerance: 1e-10,
            gradient_tolerance: 1e-8,
            k_override: None,
            hafnian_cap: DEFAULT_HAFNIAN_CAP,
            term_cap: DEFAULT_TERM_CAP,
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k_override = Some(k);
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    fn estimator(&self) -> EstimatorConfig {
        EstimatorConfig {
            epsilon: self.epsilon,
            gamma: self.gamma,
            trials: 1,
            k_override: self.k_override,
            seed: self.seed,
            hafnian_cap: self.hafnian_cap,
        }
    }

    fn validate(&self) -> Result<()> {
        self.estimator().validate()?;
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestartOutcome<T> {
    pub value: T,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptReport<T> {
    /// `(n/k)^{m/2}` times the best restricted value.
    pub max_estimate: T,
    /// Best restricted value on `S^{k-1}`; equals `f(argmax_ambient)`.
    pub restricted_max: T,
    /// `frame · y*`, a unit vector in `R^n`.
    pub argmax_ambient: Vec<T>,
    pub k_used: usize,
    pub k_bound: f64,
    pub k_clamped: bool,
    pub delta_used: T,
    pub scaling: T,
    pub restarts: Vec<RestartOutcome<T>>,
    /// Set when no restart met a convergence criterion.
    pub warning: bool,
    pub seed: u64,
}

/// Value and Euclidean gradient of `f` at `y`.
pub fn value_and_gradient<T: Real>(poly: &FocusedPolynomial<T>, y: &[T]) -> (T, Vec<T>) {
    let gens = poly.generators();
    let forms: Vec<T> = gens.iter().map(|c| dot(c, y)).collect();
    let mut value = T::zero();
    let mut grad = vec![T::zero(); y.len()];
    let mut prefix = Vec::new();
    for term in poly.terms() {
        let idx = term.indices();
        // prefix[s] = Π_{t<s} forms, built forward; suffix folded backward
        prefix.clear();
        let mut p = T::one();
        for &i in idx {
            prefix.push(p);
            p = p * forms[i];
        }
        value = value + term.weight() * p;
        let mut suffix = T::one();
        for s in (0..idx.len()).rev() {
            let coef = term.weight() * prefix[s] * suffix;
            for (g, &c) in grad.iter_mut().zip(&gens[idx[s]]) {
                *g = *g + coef * c;
            }
            suffix = suffix * forms[idx[s]];
        }
    }
    (value, grad)
}

fn normalized<T: Real>(mut v: Vec<T>) -> Vec<T> {
    let r = norm(&v);
    for x in &mut v {
        *x = *x / r;
    }
    v
}

/// Projected gradient ascent on the unit sphere from `start`.
fn ascend<T: Real>(poly: &FocusedPolynomial<T>, start: Vec<T>, cfg: &OptConfig) -> (Vec<T>, RestartOutcome<T>) {
    let mut y = normalized(start);
    let (mut f, mut g) = value_and_gradient(poly, &y);
    let mut step = T::of(0.5);
    let step_tol = T::of(cfg.step_tolerance);
    let grad_tol = T::of(cfg.gradient_tolerance);
    for iter in 0..cfg.max_iters {
        let radial = dot(&g, &y);
        let tangent: Vec<T> = g.iter().zip(&y).map(|(&gi, &yi)| gi - radial * yi).collect();
        let tangent_norm = norm(&tangent);
        if tangent_norm <= grad_tol * f.abs() || tangent_norm == T::zero() {
            return (y, RestartOutcome { value: f, iterations: iter, converged: true });
        }
        let direction: Vec<T> = tangent.iter().map(|&t| t / tangent_norm).collect();
        loop {
            let candidate = normalized(y.iter().zip(&direction).map(|(&yi, &di)| yi + step * di).collect());
            let (fc, gc) = value_and_gradient(poly, &candidate);
            if fc > f {
                y = candidate;
                f = fc;
                g = gc;
                step = (step + step).min(T::one());
                break;
            }
            step = step / T::of(2.0);
            if step < step_tol {
                return (y, RestartOutcome { value: f, iterations: iter + 1, converged: true });
            }
        }
    }
    (y, RestartOutcome { value: f, iterations: cfg.max_iters, converged: false })
}

/// Starting points on `S^{k-1}`: restart 0 is the normalized sum of the unit
/// generators (every linear form is positive there for a focused family);
/// the rest are uniform draws, each from its own stream.
fn starting_points<T: Real>(poly: &FocusedPolynomial<T>, seed: u64, restarts: usize) -> Vec<Vec<T>> {
    let k = poly.dimension();
    let mut centroid = vec![T::zero(); k];
    for c in poly.generators() {
        let r = norm(c);
        for (s, &x) in centroid.iter_mut().zip(c) {
            *s = *s + x / r;
        }
    }
    let mut points = Vec::with_capacity(restarts);
    if norm(&centroid) > T::zero() {
        points.push(centroid);
    }
    let mut r = 0u64;
    while points.len() < restarts {
        let mut stream = GaussianStream::new(RngSeed::new(seed, RESTART_STREAM + r));
        points.push(stream.unit_vector(k).into_iter().map(T::of).collect());
        r += 1;
    }
    points
}

/// Best local maximum of `poly` on its own unit sphere.
pub fn local_maximize<T: Real>(poly: &FocusedPolynomial<T>, cfg: &OptConfig) -> (Vec<T>, Vec<RestartOutcome<T>>) {
    let odd = poly.degree() % 2 == 1;
    let results: Vec<(Vec<T>, RestartOutcome<T>)> = starting_points(poly, cfg.seed, cfg.restarts)
        .into_par_iter()
        .map(|mut start| {
            // f(-y) = -f(y) for odd degree; start on the non-negative side
            if odd && value_and_gradient(poly, &start).0 < T::zero() {
                start.iter_mut().for_each(|x| *x = -*x);
            }
            ascend(poly, start, cfg)
        })
        .collect();
    let mut best = 0;
    for (i, (_, outcome)) in results.iter().enumerate() {
        if outcome.value > results[best].1.value {
            best = i;
        }
    }
    let argmax = results[best].0.clone();
    (argmax, results.into_iter().map(|(_, o)| o).collect())
}

fn subspace_choice<T: Real>(poly: &FocusedPolynomial<T>, cfg: &OptConfig) -> Result<(KChoice, T)> {
    cfg.validate()?;
    let cert = poly.certificate()?;
    let choice = choose_k(poly.dimension(), poly.generators().len(), cert.delta.as_f64(), &cfg.estimator())?;
    Ok((choice, cert.delta))
}

/// Scaled maximum of `poly` over the unit sphere of a random subspace.
///
/// The subspace is trial 0 of the estimator's seeding scheme, so
/// [`max_via_norms`] with the same configuration sees the same subspace.
pub fn maximize_on_sphere<T: Real>(poly: &FocusedPolynomial<T>, cfg: &OptConfig) -> Result<OptReport<T>> {
    let (choice, delta) = subspace_choice(poly, cfg)?;
    let n = poly.dimension();
    let l = trial_subspace::<T>(n, choice.k, cfg.seed, 0)?;
    let restricted = poly.restrict(&l)?;
    let (y, restarts) = local_maximize(&restricted, cfg);
    let best = restarts.iter().map(|r| r.value).fold(T::neg_infinity(), T::max);
    let scaling = T::of((n as f64 / choice.k as f64).powf(poly.degree() as f64 / 2.0));
    let warning = restarts.iter().all(|r| !r.converged);
    Ok(OptReport {
        max_estimate: scaling * best,
        restricted_max: best,
        argmax_ambient: l.lift(&y)?,
        k_used: choice.k,
        k_bound: choice.bound,
        k_clamped: choice.clamped,
        delta_used: delta,
        scaling,
        restarts,
        warning,
        seed: cfg.seed,
    })
}

/// `(n/k)^{m/2} (∫_{S^{k-1}} f_L^{2p})^{1/(2p)}`, the scaled `L^{2p}` norm of
/// the restriction, which increases to the scaled maximum as `p` grows.
pub fn max_via_norms<T: Real>(poly: &FocusedPolynomial<T>, p: usize, cfg: &OptConfig) -> Result<T> {
    if p == 0 {
        return Err(Error::InvalidConfig("p must be positive".into()));
    }
    let (choice, _) = subspace_choice(poly, cfg)?;
    let n = poly.dimension();
    let m = poly.degree();
    let degree = 2 * p * m;
    if degree > cfg.hafnian_cap {
        return Err(Error::OrderCapExceeded { order: degree, cap: cfg.hafnian_cap });
    }
    let l = trial_subspace::<T>(n, choice.k, cfg.seed, 0)?;
    let raised = poly.restrict(&l)?.power(2 * p, cfg.term_cap)?;
    let gaussian = integrate_gaussian_capped(&raised, cfg.hafnian_cap)?;
    let sphere = gaussian.as_f64() * sphere_factor(choice.k, degree)?;
    let scaling = (n as f64 / choice.k as f64).powf(m as f64 / 2.0);
    Ok(T::of(scaling * sphere.max(0.0).powf(1.0 / (2 * p) as f64)))
}
