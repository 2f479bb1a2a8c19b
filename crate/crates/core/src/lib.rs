//! Integration and optimization of focused polynomials.
//!
//! A focused polynomial is a non-negative combination of products of linear
//! forms `<c_i, x>` whose generators `c_i` are pairwise at acute angles (all
//! cosines at least some `δ > 0`). For this class the library offers
//!
//! - exact Gaussian and sphere integrals through the Wick formula
//!   (hafnians of Gram matrices), see [`gaussian`];
//! - a randomized estimator that restricts the polynomial to a random
//!   subspace of dimension `O(δ^{-2} ε^{-2} log N)`, integrates exactly there
//!   and rescales, see [`estimator`];
//! - the same reduction for maximization on the unit sphere, see
//!   [`sphere_opt`];
//! - hafnian approximation for matrices with positive off-diagonal entries,
//!   see [`hafnian_approx`];
//! - scalar products under the complex Gaussian measure through permanents,
//!   see [`complex_pairing`].
//!
//! The numeric types are generic over [`Real`] (`f32`, `f64`); exact
//! combinatorial kernels work over any [`Field`], including `i64`/`i128`.
//! The `*64` aliases below fix the scalar to `f64`.

pub mod complex_pairing;
pub mod error;
pub mod estimator;
pub mod gaussian;
pub mod hafnian_approx;
pub mod io;
pub mod matching;
pub mod poly;
pub mod rng;
pub mod scalar;
pub mod sphere_opt;
pub mod subspace;

pub use complex_pairing::{
    pairing_exact_monomial, pairing_exact_permanent, pairing_randomized, vector_partition_demo,
    vector_partition_enumerate, MonomialPolynomial, PartitionInstance,
};
pub use error::{Error, Result};
pub use estimator::{
    choose_k, estimate_gaussian_integral, estimate_sphere_integral, EstimateReport, EstimatorConfig, KChoice,
};
pub use gaussian::{integrate_gaussian, monomial_gaussian_integral, sphere_from_gaussian, wick_integral};
pub use hafnian_approx::{approx_hafnian, gram_decompose, prepare_instance, HafnianInstance, HafnianReport, ShiftPolicy};
pub use matching::{hafnian, hafnian_oracle, permanent, permanent_oracle, Matrix, SymMatrix};
pub use poly::{compute_delta, FocusCertificate, FocusedPair, FocusedPolynomial, Pairing, Term};
pub use rng::RngSeed;
pub use scalar::{Field, Real};
pub use sphere_opt::{max_via_norms, maximize_on_sphere, OptConfig, OptReport};
pub use subspace::{jl_empirical_check, pairwise_gram_check, sample_subspace, Subspace};

pub type FocusedPolynomial64 = FocusedPolynomial<f64>;
pub type FocusedPair64 = FocusedPair<f64>;
pub type Term64 = Term<f64>;
pub type FocusCertificate64 = FocusCertificate<f64>;
pub type SymMatrix64 = SymMatrix<f64>;
pub type Matrix64 = Matrix<f64>;
pub type Subspace64 = Subspace<f64>;
pub type MonomialPolynomial64 = MonomialPolynomial<f64>;
pub type EstimateReport64 = EstimateReport<f64>;
pub type OptReport64 = OptReport<f64>;
pub type HafnianInstance64 = HafnianInstance<f64>;
pub type HafnianReport64 = HafnianReport<f64>;

pub type FocusedPolynomial32 = FocusedPolynomial<f32>;
pub type Subspace32 = Subspace<f32>;
