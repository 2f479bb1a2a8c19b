//! Hafnian of a matrix with positive off-diagonal entries, approximated
//! through the Gaussian integral of a product of linear forms.
//!
//! The hafnian never reads the diagonal, so the diagonal is replaced to make
//! the matrix positive semidefinite. A Gram factorization `C = [<c_i, c_j>]`
//! then gives `haf C = ∫ Π <c_i, x> dμ_m`, which the subspace estimator
//! approximates. The cosine between `c_i` and `c_j` is
//! `C_ij / sqrt(C_ii C_jj)`, so the smallest admissible diagonal is best.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::{choose_k, run_trials, EstimateReport, EstimatorConfig};
use crate::gaussian::integrate_gaussian_capped;
use crate::matching::SymMatrix;
use crate::poly::{FocusedPolynomial, Term};
use crate::scalar::Real;

/// Eigenvalues down to `-PSD_TOLERANCE * max(1, max |C_ij|)` count as zero.
pub const PSD_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "policy", content = "lambda")]
pub enum ShiftPolicy {
    /// Use the diagonal as given; the matrix must already be PSD.
    PsdAsGiven,
    /// Set every diagonal entry to `max(0, -λ_min)` of the zero-diagonal matrix.
    MinEigenvalueShift,
    /// Set every diagonal entry to the given value.
    Explicit(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct HafnianInstance<T> {
    matrix: SymMatrix<T>,
    shift: ShiftPolicy,
}

impl<T: Real> HafnianInstance<T> {
    /// Requires even order and strictly positive off-diagonal entries.
    pub fn new(matrix: SymMatrix<T>, shift: ShiftPolicy) -> Result<Self> {
        let m = matrix.order();
        if m == 0 || m % 2 == 1 {
            return Err(Error::OddOrder(m));
        }
        for i in 0..m {
            for j in i + 1..m {
                let v = matrix.get(i, j);
                if !(v > T::zero()) || !v.is_finite() {
                    return Err(Error::InvalidMatrix(format!(
                        "off-diagonal entry ({i},{j}) = {v} is not strictly positive"
                    )));
                }
            }
        }
        if let ShiftPolicy::Explicit(lambda) = shift {
            if !lambda.is_finite() {
                return Err(Error::InvalidConfig("explicit diagonal must be finite".into()));
            }
        }
        Ok(Self { matrix, shift })
    }

    pub fn matrix(&self) -> &SymMatrix<T> {
        &self.matrix
    }

    pub fn shift(&self) -> ShiftPolicy {
        self.shift
    }
}

fn to_dmatrix<T: Real>(c: &SymMatrix<T>) -> DMatrix<f64> {
    let m = c.order();
    DMatrix::from_fn(m, m, |i, j| c.get(i, j).as_f64())
}

/// Vectors `c_1..c_m` in `R^m` whose Gram matrix is `c`, from the symmetric
/// eigendecomposition `C = V Λ V^T` as the rows of `V Λ^{1/2}`. Computed in
/// double precision.
pub fn gram_decompose<T: Real>(c: &SymMatrix<T>) -> Result<Vec<Vec<T>>> {
    let m = c.order();
    if m == 0 {
        return Ok(Vec::new());
    }
    let dense = to_dmatrix(c);
    let scale = dense.iter().fold(1.0_f64, |s, x| s.max(x.abs()));
    let eig = SymmetricEigen::new(dense);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -PSD_TOLERANCE * scale {
        return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
    }
    let roots: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    Ok((0..m)
        .map(|i| (0..m).map(|j| T::of(eig.eigenvectors[(i, j)] * roots[j])).collect())
        .collect())
}

/// Smallest eigenvalue of a symmetric matrix (double precision).
pub fn min_eigenvalue<T: Real>(c: &SymMatrix<T>) -> f64 {
    SymmetricEigen::new(to_dmatrix(c)).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreparedInstance<T> {
    /// Matrix with the diagonal actually used.
    pub shifted: SymMatrix<T>,
    pub vectors: Vec<Vec<T>>,
    /// `min_{i≠j} C'_ij / sqrt(C'_ii C'_jj)`, capped at 1.
    pub delta: T,
    /// Diagonal value installed by the shift policy (`None` when kept).
    pub lambda: Option<T>,
}

/// Applies the shift policy, factors the result and certifies the cosines.
pub fn prepare_instance<T: Real>(inst: &HafnianInstance<T>) -> Result<PreparedInstance<T>> {
    let m = inst.matrix.order();
    let lambda = match inst.shift {
        ShiftPolicy::PsdAsGiven => None,
        ShiftPolicy::Explicit(l) => Some(T::of(l)),
        ShiftPolicy::MinEigenvalueShift => {
            let mut hollow = inst.matrix.clone();
            for i in 0..m {
                hollow.set(i, i, T::zero());
            }
            Some(T::of((-min_eigenvalue(&hollow)).max(0.0)))
        }
    };
    let mut shifted = inst.matrix.clone();
    if let Some(l) = lambda {
        for i in 0..m {
            shifted.set(i, i, l);
        }
    }
    let mut delta = T::infinity();
    for i in 0..m {
        for j in i + 1..m {
            let denom = (shifted.get(i, i) * shifted.get(j, j)).sqrt();
            if !(denom > T::zero()) {
                return Err(Error::Inapplicable(format!(
                    "diagonal entries {i} and {j} leave a zero Gram vector"
                )));
            }
            delta = delta.min(shifted.get(i, j) / denom);
        }
    }
    if !(delta > T::zero()) {
        return Err(Error::Inapplicable(format!("cosine bound {delta} is not positive")));
    }
    let vectors = gram_decompose(&shifted).map_err(|e| match e {
        Error::NotPositiveSemidefinite { min_eigenvalue } => Error::Inapplicable(format!(
            "shifted matrix is not positive semidefinite (eigenvalue {min_eigenvalue})"
        )),
        other => other,
    })?;
    Ok(PreparedInstance { shifted, vectors, delta: delta.min(T::one()), lambda })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HafnianReport<T> {
    pub report: EstimateReport<T>,
    pub delta: T,
    pub lambda: Option<T>,
    pub k: usize,
}

/// `Π_i <c_i, x>` over the Gram vectors, a one-term focused polynomial.
pub fn product_polynomial<T: Real>(vectors: Vec<Vec<T>>) -> Result<FocusedPolynomial<T>> {
    let m = vectors.len();
    let n = vectors.first().map_or(0, Vec::len);
    FocusedPolynomial::new(n, m, vectors, vec![Term::new((0..m).collect(), T::one())])
}

/// Randomized hafnian estimate; the target is `haf C`.
pub fn approx_hafnian<T: Real>(inst: &HafnianInstance<T>, cfg: &EstimatorConfig) -> Result<HafnianReport<T>> {
    cfg.validate()?;
    let prepared = prepare_instance(inst)?;
    let m = inst.matrix.order();
    if m > cfg.hafnian_cap {
        return Err(Error::OrderCapExceeded { order: m, cap: cfg.hafnian_cap });
    }
    let poly = product_polynomial(prepared.vectors)?;
    let choice = choose_k(m, m, prepared.delta.as_f64(), cfg)?;
    let report = run_trials(m, choice, prepared.delta, m as f64 / 2.0, cfg, |l| {
        integrate_gaussian_capped(&poly.restrict(l)?, cfg.hafnian_cap)
    })?;
    Ok(HafnianReport { k: report.k_used, report, delta: prepared.delta, lambda: prepared.lambda })
}
