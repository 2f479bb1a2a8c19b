//! Focused polynomials: non-negative combinations of products of linear forms
//! whose generator vectors are pairwise at acute angles.
//!
//! A term is a multiset of `m` generator indices. Repeated indices are
//! allowed; a term with a repeat is the same polynomial as the subset form
//! over a generator list with that vector duplicated, so both encodings
//! describe the same class. Indices are 0-based here and 1-based in JSON.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matching::SymMatrix;
use crate::scalar::{dot, norm, Real};
use crate::subspace::Subspace;

/// Projected generators shorter than this fraction of their original length
/// make a restriction degenerate.
pub const DEGENERATE_PROJECTION: f64 = 1e-12;

pub const DEFAULT_TERM_CAP: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq)]
pub struct Term<T> {
    indices: Vec<usize>,
    weight: T,
}

impl<T: Real> Term<T> {
    /// Indices are sorted on construction.
    pub fn new(mut indices: Vec<usize>, weight: T) -> Self {
        indices.sort_unstable();
        Self { indices, weight }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn weight(&self) -> T {
        self.weight
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FocusedPolynomial<T> {
    n: usize,
    m: usize,
    generators: Vec<Vec<T>>,
    terms: Vec<Term<T>>,
}

/// Minimum pairwise cosine together with the pair attaining it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FocusCertificate<T> {
    pub delta: T,
    pub witness: (usize, usize),
}

impl<T: Real> FocusCertificate<T> {
    /// Fails when the certified delta is below what the caller claimed.
    pub fn check_claim(&self, claimed: T) -> Result<()> {
        if self.delta < claimed {
            return Err(Error::DeltaBelowClaim { actual: self.delta.as_f64(), claimed: claimed.as_f64() });
        }
        Ok(())
    }
}

/// Which vector pairs a focus certificate ranges over.
#[derive(Clone, Copy, Debug)]
pub enum Pairing<'a, T> {
    /// All pairs within one family, `i == j` included (cosine exactly 1).
    Within(&'a [Vec<T>]),
    /// Every `(a_i, b_j)` across two families.
    Cross(&'a [Vec<T>], &'a [Vec<T>]),
}

/// Smallest cosine of the angle over the required pairs.
///
/// Errors on zero vectors, and with [`Error::NotFocused`] when the minimum is
/// not strictly positive.
pub fn compute_delta<T: Real>(pairing: Pairing<'_, T>) -> Result<FocusCertificate<T>> {
    let norms = |vs: &[Vec<T>], offset: usize| -> Result<Vec<T>> {
        vs.iter()
            .enumerate()
            .map(|(i, v)| {
                let r = norm(v);
                if r > T::zero() && r.is_finite() {
                    Ok(r)
                } else {
                    Err(Error::ZeroGenerator { index: i + offset })
                }
            })
            .collect()
    };
    let mut best = FocusCertificate { delta: T::one(), witness: (0, 0) };
    let mut seen_pair = false;
    let mut consider = |cos: T, i: usize, j: usize| {
        if !seen_pair || cos < best.delta {
            best = FocusCertificate { delta: cos, witness: (i, j) };
            seen_pair = true;
        }
    };
    match pairing {
        Pairing::Within(vs) => {
            if vs.is_empty() {
                return Err(Error::InvalidPolynomial("no generators".into()));
            }
            let r = norms(vs, 0)?;
            for i in 0..vs.len() {
                for j in i + 1..vs.len() {
                    consider(dot(&vs[i], &vs[j]) / (r[i] * r[j]), i, j);
                }
            }
        }
        Pairing::Cross(a, b) => {
            if a.is_empty() || b.is_empty() {
                return Err(Error::InvalidPolynomial("no generators".into()));
            }
            let ra = norms(a, 0)?;
            let rb = norms(b, a.len())?;
            for i in 0..a.len() {
                for j in 0..b.len() {
                    consider(dot(&a[i], &b[j]) / (ra[i] * rb[j]), i, j);
                }
            }
        }
    }
    if best.delta <= T::zero() {
        return Err(Error::NotFocused { min_cosine: best.delta.as_f64(), witness: best.witness });
    }
    best.delta = best.delta.min(T::one());
    Ok(best)
}

impl<T: Real> FocusedPolynomial<T> {
    pub fn new(n: usize, m: usize, generators: Vec<Vec<T>>, terms: Vec<Term<T>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPolynomial("dimension n must be positive".into()));
        }
        if m == 0 {
            return Err(Error::InvalidPolynomial("degree m must be positive".into()));
        }
        if generators.is_empty() {
            return Err(Error::InvalidPolynomial("no generators".into()));
        }
        for (i, c) in generators.iter().enumerate() {
            if c.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: c.len() });
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidPolynomial(format!("generator {i} has a non-finite entry")));
            }
            if norm(c) <= T::zero() {
                return Err(Error::ZeroGenerator { index: i });
            }
        }
        let mut any_positive = false;
        for (t, term) in terms.iter().enumerate() {
            if term.indices.len() != m {
                return Err(Error::InvalidPolynomial(format!(
                    "term {t} has {} indices, expected {m}",
                    term.indices.len()
                )));
            }
            if let Some(&bad) = term.indices.iter().find(|&&i| i >= generators.len()) {
                return Err(Error::InvalidPolynomial(format!("term {t} references generator {bad} out of range")));
            }
            if !(term.weight >= T::zero()) || !term.weight.is_finite() {
                return Err(Error::InvalidPolynomial(format!("term {t} has a negative or non-finite weight")));
            }
            any_positive |= term.weight > T::zero();
        }
        if !any_positive {
            return Err(Error::InvalidPolynomial("no term has positive weight".into()));
        }
        Ok(Self { n, m, generators, terms })
    }

    /// `<c, x>^power` as a one-term polynomial.
    pub fn linear_power(c: Vec<T>, power: usize, weight: T) -> Result<Self> {
        let n = c.len();
        Self::new(n, power, vec![c], vec![Term::new(vec![0; power], weight)])
    }

    /// `x_axis^power`, the coordinate monomial along basis vector `axis`.
    pub fn coordinate_power(n: usize, axis: usize, power: usize) -> Result<Self> {
        if axis >= n {
            return Err(Error::DimensionMismatch { expected: n, found: axis + 1 });
        }
        let mut e = vec![T::zero(); n];
        e[axis] = T::one();
        Self::linear_power(e, power, T::one())
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn generators(&self) -> &[Vec<T>] {
        &self.generators
    }

    pub fn terms(&self) -> &[Term<T>] {
        &self.terms
    }

    pub fn evaluate(&self, x: &[T]) -> Result<T> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        let forms: Vec<T> = self.generators.iter().map(|c| dot(c, x)).collect();
        Ok(crate::scalar::sum(
            self.terms
                .iter()
                .map(|t| t.indices.iter().fold(t.weight, |acc, &i| acc * forms[i])),
        ))
    }

    pub fn certificate(&self) -> Result<FocusCertificate<T>> {
        compute_delta(Pairing::Within(&self.generators))
    }

    /// Gram matrix of the generators.
    pub fn gram(&self) -> SymMatrix<T> {
        SymMatrix::from_fn(self.generators.len(), |i, j| dot(&self.generators[i], &self.generators[j]))
    }

    /// Restriction to `subspace`, written in the subspace's orthonormal
    /// coordinates: generator `c` becomes `B^T c`.
    pub fn restrict(&self, subspace: &Subspace<T>) -> Result<Self> {
        if subspace.ambient() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: subspace.ambient() });
        }
        let threshold = T::of(DEGENERATE_PROJECTION);
        let mut generators = Vec::with_capacity(self.generators.len());
        for (i, c) in self.generators.iter().enumerate() {
            let (coords, projected) = subspace.project(c)?;
            if !(projected >= threshold * norm(c)) {
                return Err(Error::DegenerateRestriction { index: i });
            }
            generators.push(coords);
        }
        Ok(Self { n: subspace.dim(), m: self.m, generators, terms: self.terms.clone() })
    }

    /// `f^p` over the same generators, with equal multisets merged.
    ///
    /// `cap` bounds the number of products formed at each multiplication step.
    pub fn power(&self, p: usize, cap: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidPolynomial("power must be positive".into()));
        }
        let degree = self
            .m
            .checked_mul(p)
            .ok_or_else(|| Error::Overflow(format!("degree {} * {p}", self.m)))?;
        let mut current: BTreeMap<Vec<usize>, T> = BTreeMap::new();
        for t in &self.terms {
            let slot = current.entry(t.indices.clone()).or_insert(T::zero());
            *slot = *slot + t.weight;
        }
        let base = current.clone();
        for _ in 1..p {
            let products = current.len().saturating_mul(base.len());
            if products > cap {
                return Err(Error::TermCapExceeded { terms: products, cap });
            }
            let mut next: BTreeMap<Vec<usize>, T> = BTreeMap::new();
            for (left, &wl) in &current {
                for (right, &wr) in &base {
                    let mut key = Vec::with_capacity(left.len() + right.len());
                    key.extend_from_slice(left);
                    key.extend_from_slice(right);
                    key.sort_unstable();
                    let slot = next.entry(key).or_insert(T::zero());
                    *slot = *slot + wl * wr;
                }
            }
            current = next;
        }
        let terms = current.into_iter().map(|(indices, weight)| Term { indices, weight }).collect();
        Ok(Self { n: self.n, m: degree, generators: self.generators.clone(), terms })
    }

    /// Same polynomial with every weight multiplied by `factor > 0`.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        let terms = self.terms.iter().map(|t| Term { indices: t.indices.clone(), weight: t.weight * factor }).collect();
        Self::new(self.n, self.m, self.generators.clone(), terms)
    }

    /// Same terms over new generators (e.g. a rotated copy).
    pub fn with_generators(&self, generators: Vec<Vec<T>>) -> Result<Self> {
        let n = generators.first().map_or(self.n, Vec::len);
        Self::new(n, self.m, generators, self.terms.clone())
    }
}

/// Two focused polynomials of equal dimension and degree, paired through the
/// complex Gaussian scalar product.
#[derive(Clone, Debug, PartialEq)]
pub struct FocusedPair<T> {
    f: FocusedPolynomial<T>,
    g: FocusedPolynomial<T>,
}

impl<T: Real> FocusedPair<T> {
    pub fn new(f: FocusedPolynomial<T>, g: FocusedPolynomial<T>) -> Result<Self> {
        if f.n != g.n {
            return Err(Error::DimensionMismatch { expected: f.n, found: g.n });
        }
        if f.m != g.m {
            return Err(Error::InvalidPolynomial(format!("degrees differ: {} vs {}", f.m, g.m)));
        }
        Ok(Self { f, g })
    }

    pub fn f(&self) -> &FocusedPolynomial<T> {
        &self.f
    }

    pub fn g(&self) -> &FocusedPolynomial<T> {
        &self.g
    }

    pub fn dimension(&self) -> usize {
        self.f.n
    }

    pub fn degree(&self) -> usize {
        self.f.m
    }

    /// Cross certificate over all `(a_i, b_j)`.
    pub fn certificate(&self) -> Result<FocusCertificate<T>> {
        compute_delta(Pairing::Cross(&self.f.generators, &self.g.generators))
    }

    pub fn restrict(&self, subspace: &Subspace<T>) -> Result<Self> {
        Ok(Self { f: self.f.restrict(subspace)?, g: self.g.restrict(subspace)? })
    }

    pub fn swapped(&self) -> Self {
        Self { f: self.g.clone(), g: self.f.clone() }
    }
}
