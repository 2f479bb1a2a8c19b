//! Exact integrals against the standard Gaussian measure and the uniform
//! probability measure on the unit sphere.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::matching::{hafnian_capped, SymMatrix, DEFAULT_HAFNIAN_CAP};
use crate::poly::FocusedPolynomial;
use crate::scalar::{dot, Accumulator, Real};

/// `∫ Π <a_i, x> dμ_n`, the hafnian of the Gram matrix of `vectors`.
pub fn wick_integral<T: Real>(vectors: &[Vec<T>]) -> Result<T> {
    wick_integral_capped(vectors, DEFAULT_HAFNIAN_CAP)
}

pub fn wick_integral_capped<T: Real>(vectors: &[Vec<T>], cap: usize) -> Result<T> {
    if vectors.len() % 2 == 1 {
        return Ok(T::zero());
    }
    if let Some(first) = vectors.first() {
        if let Some(v) = vectors.iter().find(|v| v.len() != first.len()) {
            return Err(Error::DimensionMismatch { expected: first.len(), found: v.len() });
        }
    }
    if vectors.len() > cap {
        return Err(Error::OrderCapExceeded { order: vectors.len(), cap });
    }
    let gram = SymMatrix::from_fn(vectors.len(), |i, j| dot(&vectors[i], &vectors[j]));
    hafnian_capped(&gram, cap)
}

/// `∫ f dμ_n` as `Σ_I α_I haf(C_I)`.
pub fn integrate_gaussian<T: Real>(poly: &FocusedPolynomial<T>) -> Result<T> {
    integrate_gaussian_capped(poly, DEFAULT_HAFNIAN_CAP)
}

pub fn integrate_gaussian_capped<T: Real>(poly: &FocusedPolynomial<T>, cap: usize) -> Result<T> {
    let m = poly.degree();
    if m % 2 == 1 {
        return Ok(T::zero());
    }
    if m > cap {
        return Err(Error::OrderCapExceeded { order: m, cap });
    }
    let gram = poly.gram();
    let mut acc = Accumulator::new();
    for term in poly.terms() {
        if term.weight() == T::zero() {
            continue;
        }
        acc.add(term.weight() * hafnian_capped(&gram.select(term.indices()), cap)?);
    }
    Ok(acc.value())
}

/// `∫ x^α dμ_n`: zero unless every exponent is even, otherwise
/// `Π 2^{α_i/2} Γ((α_i+1)/2) / Γ(1/2)`, evaluated in log space.
pub fn monomial_gaussian_integral<T: Real>(alpha: &[u32]) -> T {
    if alpha.iter().any(|a| a % 2 == 1) {
        return T::zero();
    }
    let log_half = ln_gamma(0.5);
    let log_value: f64 = alpha
        .iter()
        .filter(|&&a| a > 0)
        .map(|&a| {
            let a = a as f64;
            0.5 * a * std::f64::consts::LN_2 + ln_gamma((a + 1.0) / 2.0) - log_half
        })
        .sum();
    T::of(log_value.exp())
}

/// Ratio `Γ(n/2) / (2^{m/2} Γ(n/2 + m/2))` turning a Gaussian integral of a
/// degree-`m` form into its average over the unit sphere in `R^n`.
pub fn sphere_factor(n: usize, m: usize) -> Result<f64> {
    if m % 2 == 1 {
        return Err(Error::OddOrder(m));
    }
    if n == 0 {
        return Err(Error::InvalidConfig("dimension must be positive".into()));
    }
    let half_n = n as f64 / 2.0;
    let half_m = m as f64 / 2.0;
    Ok((ln_gamma(half_n) - half_m * std::f64::consts::LN_2 - ln_gamma(half_n + half_m)).exp())
}

/// Sphere average of a homogeneous degree-`m` form from its Gaussian integral.
pub fn sphere_from_gaussian<T: Real>(gaussian_value: T, n: usize, m: usize) -> Result<T> {
    Ok(gaussian_value * T::of(sphere_factor(n, m)?))
}

/// `∫_{S^{n-1}} x_1^{2k} dx = Γ(n/2) Γ(1/2 + k) / (√π Γ(n/2 + k))`.
pub fn needle_sphere_integral(n: usize, k: usize) -> f64 {
    let half_n = n as f64 / 2.0;
    let k = k as f64;
    (ln_gamma(half_n) + ln_gamma(0.5 + k) - ln_gamma(0.5) - ln_gamma(half_n + k)).exp()
}
