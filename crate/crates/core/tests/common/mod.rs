#![allow(dead_code)]

use focuspoly::rng::GaussianStream;
use focuspoly::{sample_subspace, FocusedPolynomial, RngSeed, Term};

pub fn stream(seed: u64) -> GaussianStream {
    GaussianStream::new(RngSeed::new(seed, 0))
}

/// Vectors with entries in `[lo, lo + 1)`; all pairwise cosines are positive.
pub fn positive_vectors(rng: &mut GaussianStream, count: usize, n: usize, lo: f64) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..n).map(|_| lo + rng.uniform()).collect()).collect()
}

/// Unit vectors within a narrow cone around `(1, ..., 1)/sqrt(n)`.
pub fn clustered(rng: &mut GaussianStream, count: usize, n: usize, spread: f64) -> Vec<Vec<f64>> {
    let centre = 1.0 / (n as f64).sqrt();
    (0..count)
        .map(|_| {
            let v: Vec<f64> = (0..n).map(|_| centre + spread * rng.normal() / (n as f64).sqrt()).collect();
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / r).collect()
        })
        .collect()
}

pub fn random_terms(rng: &mut GaussianStream, generators: usize, m: usize, count: usize) -> Vec<Term<f64>> {
    (0..count)
        .map(|_| {
            let idx = (0..m).map(|_| (rng.uniform() * generators as f64) as usize % generators).collect();
            Term::new(idx, 0.25 + rng.uniform())
        })
        .collect()
}

pub fn random_poly(rng: &mut GaussianStream, n: usize, generators: usize, m: usize, terms: usize) -> FocusedPolynomial<f64> {
    let gens = positive_vectors(rng, generators, n, 0.1);
    let terms = random_terms(rng, generators, m, terms);
    FocusedPolynomial::new(n, m, gens, terms).unwrap()
}

/// Haar-random orthogonal matrix as a list of rows.
pub fn rotation(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let frame = sample_subspace::<f64>(n, n, RngSeed::new(seed, 99)).unwrap();
    frame.rows()
}

pub fn apply(u: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    u.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Standard error of a frequency estimate at success rate `p`.
pub fn binomial_se(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
