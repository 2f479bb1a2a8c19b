//! Haar-random subspaces and projection diagnostics.
//!
//! A subspace is stored as an `n x k` frame with orthonormal columns. Random
//! frames are built from `k` independent standard Gaussian vectors
//! (drawn column by column from [`GaussianStream`]) orthonormalized by
//! modified Gram–Schmidt with one re-orthogonalization pass. If a column
//! loses all but `1e-10` of its length the whole draw is discarded and
//! repeated from the same stream.

use crate::error::{Error, Result};
use crate::rng::{GaussianStream, RngSeed};
use crate::scalar::{dot, Real};

/// Relative residual below which a sampled column counts as dependent.
pub const RANK_DEFICIENCY: f64 = 1e-10;

/// Tolerance on `frame^T frame = I` accepted by [`Subspace::from_frame`].
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<T> {
    n: usize,
    k: usize,
    /// Column-major `n x k`.
    frame: Vec<T>,
}

impl<T: Real> Subspace<T> {
    /// The whole space with the standard basis.
    pub fn identity(n: usize) -> Self {
        let mut frame = vec![T::zero(); n * n];
        for i in 0..n {
            frame[i * n + i] = T::one();
        }
        Self { n, k: n, frame }
    }

    /// Wraps a column-major frame after checking orthonormality.
    pub fn from_frame(n: usize, k: usize, frame: Vec<T>) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::BadSubspaceDimension { k, n });
        }
        if frame.len() != n * k {
            return Err(Error::DimensionMismatch { expected: n * k, found: frame.len() });
        }
        let tol = T::of(ORTHONORMAL_TOLERANCE).max(T::epsilon() * T::of(64.0));
        let s = Self { n, k, frame };
        for a in 0..k {
            for b in 0..=a {
                let target = if a == b { T::one() } else { T::zero() };
                if (dot(s.column(a), s.column(b)) - target).abs() > tol {
                    return Err(Error::InvalidMatrix(format!("frame columns {b} and {a} are not orthonormal")));
                }
            }
        }
        Ok(s)
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.frame[j * self.n..(j + 1) * self.n]
    }

    /// Column-major frame entries.
    pub fn frame(&self) -> &[T] {
        &self.frame
    }

    /// Frame as `n` rows of `k` entries.
    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| (0..self.k).map(|j| self.frame[j * self.n + i]).collect()).collect()
    }

    /// Coordinates `frame^T x` of the orthogonal projection and its length.
    pub fn project(&self, x: &[T]) -> Result<(Vec<T>, T)> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        let coords: Vec<T> = (0..self.k).map(|j| dot(self.column(j), x)).collect();
        let length = dot(&coords, &coords).sqrt();
        Ok((coords, length))
    }

    /// Maps subspace coordinates back into `R^n`.
    pub fn lift(&self, coords: &[T]) -> Result<Vec<T>> {
        if coords.len() != self.k {
            return Err(Error::DimensionMismatch { expected: self.k, found: coords.len() });
        }
        let mut out = vec![T::zero(); self.n];
        for (j, &y) in coords.iter().enumerate() {
            for (o, &b) in out.iter_mut().zip(self.column(j)) {
                *o = *o + b * y;
            }
        }
        Ok(out)
    }
}

/// Haar-random `k`-dimensional subspace of `R^n`.
pub fn sample_subspace<T: Real>(n: usize, k: usize, seed: RngSeed) -> Result<Subspace<T>> {
    if k == 0 || k > n {
        return Err(Error::BadSubspaceDimension { k, n });
    }
    let threshold = RANK_DEFICIENCY.max(10.0 * T::epsilon().as_f64());
    let mut stream = GaussianStream::new(seed);
    'draw: loop {
        let mut frame: Vec<T> = Vec::with_capacity(n * k);
        for j in 0..k {
            let mut v: Vec<T> = (0..n).map(|_| T::of(stream.normal())).collect();
            let original = dot(&v, &v).sqrt();
            for _pass in 0..2 {
                for q in frame.chunks_exact(n).take(j) {
                    let r = dot(q, &v);
                    for (x, &qi) in v.iter_mut().zip(q) {
                        *x = *x - r * qi;
                    }
                }
            }
            let residual = dot(&v, &v).sqrt();
            if !(residual > T::of(threshold) * original) {
                continue 'draw;
            }
            frame.extend(v.into_iter().map(|x| x / residual));
        }
        return Ok(Subspace { n, k, frame });
    }
}

/// Failure probability bound `4 exp(-eps^2 k / 4)` for the norm bracket.
pub fn jl_failure_bound(k: usize, eps: f64) -> f64 {
    4.0 * (-eps * eps * k as f64 / 4.0).exp()
}

/// True when `(1 - eps)|x| <= sqrt(n/k) |x'| <= |x| / (1 - eps)`.
pub fn norm_in_bracket(n: usize, k: usize, eps: f64, length: f64, projected: f64) -> bool {
    let scaled = (n as f64 / k as f64).sqrt() * projected;
    (1.0 - eps) * length <= scaled && scaled <= length / (1.0 - eps)
}

/// Fraction of `trials` random subspaces on which the projection of a fixed
/// unit vector violates the scaled-norm bracket.
///
/// Trial `t` uses [`RngSeed::trial`]`(seed, t)`. The fixed vector is
/// `(1, ..., 1) / sqrt(n)`.
pub fn jl_empirical_check(n: usize, k: usize, eps: f64, trials: usize, seed: u64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidConfig(format!("epsilon {eps} must lie in (0, 1)")));
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be positive".into()));
    }
    if k == 0 || k > n {
        return Err(Error::BadSubspaceDimension { k, n });
    }
    let x = vec![1.0 / (n as f64).sqrt(); n];
    let mut failures = 0usize;
    for t in 0..trials {
        let l: Subspace<f64> = sample_subspace(n, k, RngSeed::trial(seed, t as u64))?;
        let (_, projected) = l.project(&x)?;
        if !norm_in_bracket(n, k, eps, 1.0, projected) {
            failures += 1;
        }
    }
    Ok(failures as f64 / trials as f64)
}

/// Whether `(1-eps)<a',b'> <= (k/n)<a,b> <= <a',b'>/(1-eps)` holds for every
/// cross pair, with projections taken in frame coordinates.
pub fn pairwise_gram_check<T: Real>(a: &[Vec<T>], b: &[Vec<T>], subspace: &Subspace<T>, eps: T) -> Result<bool> {
    let ratio = T::of(subspace.dim() as f64 / subspace.ambient() as f64);
    let project = |vs: &[Vec<T>]| -> Result<Vec<Vec<T>>> { vs.iter().map(|v| subspace.project(v).map(|p| p.0)).collect() };
    let pa = project(a)?;
    let pb = project(b)?;
    let lower = T::one() - eps;
    for (ai, pai) in a.iter().zip(&pa) {
        for (bj, pbj) in b.iter().zip(&pb) {
            let full = ratio * dot(ai, bj);
            let proj = dot(pai, pbj);
            if !(lower * proj <= full && full <= proj / lower) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
