//! Scalar product of real polynomials under the complex Gaussian measure,
//! `<f, g> = ∫_{C^n} f(z) conj(g(z)) dν_n`.
//!
//! Monomials are orthogonal with `<x^α, x^α> = α_1! ··· α_n!`. For products of
//! linear forms the pairing is a permanent of cross inner products, which is
//! what the exact and randomized routes here compute.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::estimator::{choose_k, run_trials, EstimateReport, EstimatorConfig};
use crate::matching::{permanent_capped, Matrix, DEFAULT_PERMANENT_CAP};
use crate::poly::{FocusedPair, FocusedPolynomial};
use crate::scalar::{dot, Accumulator, Field, Real};

/// Polynomial in monomial form; exponent vectors map to coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialPolynomial<T> {
    n: usize,
    terms: BTreeMap<Vec<u32>, T>,
}

impl<T: Field> MonomialPolynomial<T> {
    /// Equal exponent vectors are merged; zero coefficients dropped.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (Vec<u32>, T)>) -> Result<Self> {
        let mut p = Self { n, terms: BTreeMap::new() };
        for (alpha, c) in terms {
            if alpha.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: alpha.len() });
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    pub fn one(n: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; n], T::one());
        Self { n, terms }
    }

    fn add_term(&mut self, alpha: Vec<u32>, c: T) {
        let total = self.coefficient(&alpha) + c;
        if total.is_zero() {
            self.terms.remove(&alpha);
        } else {
            self.terms.insert(alpha, total);
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, alpha: &[u32]) -> T {
        self.terms.get(alpha).copied().unwrap_or(T::zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], T)> {
        self.terms.iter().map(|(a, &c)| (a.as_slice(), c))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        let mut out = Self { n: self.n, terms: BTreeMap::new() };
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let alpha = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(alpha, ca * cb);
            }
        }
        Ok(out)
    }

    /// Multiplies by the linear form `<c, x>`.
    pub fn mul_linear(&self, c: &[T]) -> Result<Self> {
        if c.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: c.len() });
        }
        let mut out = Self { n: self.n, terms: BTreeMap::new() };
        for (a, &ca) in &self.terms {
            for (i, &ci) in c.iter().enumerate() {
                if ci.is_zero() {
                    continue;
                }
                let mut alpha = a.clone();
                alpha[i] += 1;
                out.add_term(alpha, ca * ci);
            }
        }
        Ok(out)
    }
}

impl<T: Real> MonomialPolynomial<T> {
    /// Monomial expansion of `Σ α_I Π_{i∈I} <c_i, x>`.
    pub fn from_focused(poly: &FocusedPolynomial<T>) -> Result<Self> {
        let n = poly.dimension();
        let mut total = Self { n, terms: BTreeMap::new() };
        for term in poly.terms() {
            let mut product = Self::one(n);
            for &i in term.indices() {
                product = product.mul_linear(&poly.generators()[i])?;
            }
            for (alpha, c) in product.terms {
                total.add_term(alpha, c * term.weight());
            }
        }
        Ok(total)
    }
}

fn factorial<T: Field>(k: u32) -> T {
    (2..=k).fold(T::one(), |acc, i| acc * T::from_u32(i).expect("small integers convert"))
}

/// `Σ_{α ∈ F∩G} a_α b_α α_1! ··· α_n!`.
pub fn pairing_exact_monomial<T: Field>(f: &MonomialPolynomial<T>, g: &MonomialPolynomial<T>) -> Result<T> {
    if f.n != g.n {
        return Err(Error::DimensionMismatch { expected: f.n, found: g.n });
    }
    let mut acc = Accumulator::new();
    for (alpha, &a) in &f.terms {
        if let Some(&b) = g.terms.get(alpha) {
            let weight = alpha.iter().fold(T::one(), |w, &e| w * factorial::<T>(e));
            acc.add(a * b * weight);
        }
    }
    Ok(acc.value())
}

/// `Σ_{I,J} α_I β_J per(C_IJ)` with `(C_IJ)_st = <a_{i_s}, b_{j_t}>`.
pub fn pairing_exact_permanent<T: Real>(pair: &FocusedPair<T>) -> Result<T> {
    pairing_exact_permanent_capped(pair, DEFAULT_PERMANENT_CAP)
}

pub fn pairing_exact_permanent_capped<T: Real>(pair: &FocusedPair<T>, cap: usize) -> Result<T> {
    let m = pair.degree();
    if m > cap {
        return Err(Error::OrderCapExceeded { order: m, cap });
    }
    let a = pair.f().generators();
    let b = pair.g().generators();
    let cross: Vec<Vec<T>> = a.iter().map(|ai| b.iter().map(|bj| dot(ai, bj)).collect()).collect();
    let mut acc = Accumulator::new();
    for ft in pair.f().terms() {
        for gt in pair.g().terms() {
            let w = ft.weight() * gt.weight();
            if w == T::zero() {
                continue;
            }
            let (is, js) = (ft.indices(), gt.indices());
            let c = Matrix::from_fn(m, |s, t| cross[is[s]][js[t]]);
            acc.add(w * permanent_capped(&c, cap)?);
        }
    }
    Ok(acc.value())
}

/// Median-of-trials estimate of `<f, g>` with scaling `(n/k)^m`.
pub fn pairing_randomized<T: Real>(pair: &FocusedPair<T>, cfg: &EstimatorConfig) -> Result<EstimateReport<T>> {
    cfg.validate()?;
    let cert = pair.certificate()?;
    let n = pair.dimension();
    let m = pair.degree();
    if m > DEFAULT_PERMANENT_CAP {
        return Err(Error::OrderCapExceeded { order: m, cap: DEFAULT_PERMANENT_CAP });
    }
    let generators = pair.f().generators().len().max(pair.g().generators().len());
    let choice = choose_k(n, generators, cert.delta.as_f64(), cfg)?;
    run_trials(n, choice, cert.delta, m as f64, cfg, |l| pairing_exact_permanent(&pair.restrict(l)?))
}

/// Brute-force limit on `(M + 1)^N` for the partition routines.
pub const PARTITION_ENUMERATION_CAP: u128 = 10_000_000;

/// Counting instance: solutions of `Σ k_i a_i = b` with `0 <= k_i <= M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionInstance {
    vectors: Vec<Vec<u32>>,
    target: Vec<u32>,
    max_coeff: u32,
}

impl PartitionInstance {
    pub fn new(vectors: Vec<Vec<u32>>, target: Vec<u32>, max_coeff: u32) -> Result<Self> {
        let n = target.len();
        if n == 0 {
            return Err(Error::InvalidConfig("target vector is empty".into()));
        }
        if vectors.is_empty() {
            return Err(Error::InvalidConfig("no vectors".into()));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        if max_coeff == 0 {
            return Err(Error::InvalidConfig("coefficient cap must be positive".into()));
        }
        Ok(Self { vectors, target, max_coeff })
    }

    pub fn vectors(&self) -> &[Vec<u32>] {
        &self.vectors
    }

    pub fn target(&self) -> &[u32] {
        &self.target
    }

    pub fn max_coeff(&self) -> u32 {
        self.max_coeff
    }

    fn check_size(&self) -> Result<()> {
        let base = self.max_coeff as u128 + 1;
        let mut size: u128 = 1;
        for _ in &self.vectors {
            size = size.saturating_mul(base);
            if size > PARTITION_ENUMERATION_CAP {
                return Err(Error::EnumerationCapExceeded { size, cap: PARTITION_ENUMERATION_CAP });
            }
        }
        Ok(())
    }
}

/// Counts solutions through the scalar product: with
/// `f = Π_i Σ_{k=0}^M x^{k a_i}` and `g = x^b`, `<f, g> / b!` is the count.
pub fn vector_partition_demo(inst: &PartitionInstance) -> Result<u64> {
    inst.check_size()?;
    let n = inst.target.len();
    // the pairing is count · b!, and count <= (M+1)^N <= the enumeration cap
    let norm = inst
        .target
        .iter()
        .try_fold(1_i128, |acc, &b| (2..=b as i128).try_fold(acc, |p, i| p.checked_mul(i)))
        .filter(|&v| v <= i128::MAX / PARTITION_ENUMERATION_CAP as i128)
        .ok_or_else(|| Error::Overflow(format!("target {:?} is too large for exact 128-bit counting", inst.target)))?;
    let mut f = MonomialPolynomial::<i128>::one(n);
    for a in &inst.vectors {
        let factor = MonomialPolynomial::new(
            n,
            (0..=inst.max_coeff).map(|k| (a.iter().map(|&x| k * x).collect::<Vec<u32>>(), 1_i128)),
        )?;
        f = f.mul(&factor)?;
    }
    let g = MonomialPolynomial::new(n, [(inst.target.clone(), 1_i128)])?;
    let scaled = pairing_exact_monomial(&f, &g)?;
    if scaled % norm != 0 {
        return Err(Error::Overflow(format!("pairing {scaled} not divisible by {norm}")));
    }
    u64::try_from(scaled / norm).map_err(|_| Error::Overflow("count exceeds u64".into()))
}

/// Counts solutions by walking every coefficient vector.
pub fn vector_partition_enumerate(inst: &PartitionInstance) -> Result<u64> {
    inst.check_size()?;
    let n = inst.target.len();
    let mut coeffs = vec![0u32; inst.vectors.len()];
    let mut count = 0u64;
    loop {
        let hits = (0..n).all(|d| {
            let total: u64 = coeffs.iter().zip(&inst.vectors).map(|(&k, a)| k as u64 * a[d] as u64).sum();
            total == inst.target[d] as u64
        });
        if hits {
            count += 1;
        }
        let mut pos = 0;
        loop {
            if pos == coeffs.len() {
                return Ok(count);
            }
            if coeffs[pos] < inst.max_coeff {
                coeffs[pos] += 1;
                break;
            }
            coeffs[pos] = 0;
            pos += 1;
        }
    }
}
