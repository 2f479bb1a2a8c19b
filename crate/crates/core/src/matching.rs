//! Hafnians and permanents.
//!
//! Both kernels are exact (up to floating-point rounding) and generic over
//! [`Field`], so they also run over `i64`/`i128` where the answer is an exact
//! count. Each has a brute-force oracle that walks the matchings or
//! permutations one by one.

use crate::error::{Error, Result};
use crate::scalar::{Accumulator, Field};

pub const DEFAULT_HAFNIAN_CAP: usize = 20;
pub const DEFAULT_PERMANENT_CAP: usize = 16;
pub const HAFNIAN_ORACLE_CAP: usize = 12;
pub const PERMANENT_ORACLE_CAP: usize = 8;

/// Dense symmetric matrix. Stored in full; `get(i, j) == get(j, i)` always.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<T> {
    order: usize,
    entries: Vec<T>,
}

impl<T: Field> SymMatrix<T> {
    /// Builds the matrix from `f(i, j)` evaluated on the upper triangle.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = vec![T::zero(); order * order];
        for i in 0..order {
            for j in i..order {
                let v = f(i, j);
                entries[i * order + j] = v;
                entries[j * order + i] = v;
            }
        }
        Self { order, entries }
    }

    /// Row-major input. Rows must be square and exactly symmetric.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let order = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {order}",
                    row.len()
                )));
            }
        }
        for i in 0..order {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::InvalidMatrix(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(Self::from_fn(order, |i, j| rows[i][j]))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.order + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.entries[i * self.order + j] = value;
        self.entries[j * self.order + i] = value;
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.entries.chunks(self.order.max(1)).take(self.order).map(|r| r.to_vec()).collect()
    }

    /// Principal submatrix on `indices` (repeats allowed).
    pub fn select(&self, indices: &[usize]) -> Self {
        Self::from_fn(indices.len(), |a, b| self.get(indices[a], indices[b]))
    }

    /// Same matrix with row/column `i` moved to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut inverse = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        Self::from_fn(self.order, |a, b| self.get(inverse[a], inverse[b]))
    }
}

/// Dense square matrix without symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    order: usize,
    entries: Vec<T>,
}

impl<T: Field> Matrix<T> {
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(order * order);
        for i in 0..order {
            for j in 0..order {
                entries.push(f(i, j));
            }
        }
        Self { order, entries }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let order = rows.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != order) {
            return Err(Error::InvalidMatrix(format!(
                "row {i} has {} entries, expected {order}",
                row.len()
            )));
        }
        Ok(Self::from_fn(order, |i, j| rows[i][j]))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.order + j]
    }
}

/// Hafnian with the default order cap.
pub fn hafnian<T: Field>(c: &SymMatrix<T>) -> Result<T> {
    hafnian_capped(c, DEFAULT_HAFNIAN_CAP)
}

/// Sum over perfect matchings of the product of matched entries.
///
/// Dynamic programming over vertex subsets: the lowest remaining vertex is
/// matched with every other remaining vertex, so the table has `2^m` slots
/// and the work is `O(m 2^m)`. Diagonal entries are never read.
pub fn hafnian_capped<T: Field>(c: &SymMatrix<T>, cap: usize) -> Result<T> {
    let m = c.order();
    if m % 2 == 1 {
        return Err(Error::OddOrder(m));
    }
    if m > cap {
        return Err(Error::OrderCapExceeded { order: m, cap });
    }
    if m == 0 {
        return Ok(T::one());
    }
    let full: usize = (1 << m) - 1;
    let mut table = vec![T::zero(); full + 1];
    table[0] = T::one();
    for mask in 1..=full {
        if mask.count_ones() % 2 == 1 {
            continue;
        }
        let low = mask.trailing_zeros() as usize;
        let rest = mask ^ (1 << low);
        let mut acc = Accumulator::new();
        let mut bits = rest;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            acc.add(c.get(low, j) * table[rest ^ (1 << j)]);
        }
        table[mask] = acc.value();
    }
    Ok(table[full])
}

/// Brute-force hafnian: walks every perfect matching explicitly.
///
/// Kept as an independent check on [`hafnian`]; limited to order 12
/// (10395 matchings).
pub fn hafnian_oracle<T: Field>(c: &SymMatrix<T>) -> Result<T> {
    let m = c.order();
    if m % 2 == 1 {
        return Err(Error::OddOrder(m));
    }
    if m > HAFNIAN_ORACLE_CAP {
        return Err(Error::OrderCapExceeded { order: m, cap: HAFNIAN_ORACLE_CAP });
    }
    fn walk<T: Field>(c: &SymMatrix<T>, free: &mut Vec<usize>, product: T, acc: &mut Accumulator<T>) {
        if free.is_empty() {
            acc.add(product);
            return;
        }
        let first = free.remove(0);
        for pos in 0..free.len() {
            let partner = free.remove(pos);
            walk(c, free, product * c.get(first, partner), acc);
            free.insert(pos, partner);
        }
        free.insert(0, first);
    }
    let mut acc = Accumulator::new();
    walk(c, &mut (0..m).collect(), T::one(), &mut acc);
    Ok(acc.value())
}

/// Permanent with the default order cap.
pub fn permanent<T: Field>(c: &Matrix<T>) -> Result<T> {
    permanent_capped(c, DEFAULT_PERMANENT_CAP)
}

/// Ryser's inclusion-exclusion formula,
/// `per C = (-1)^m sum_S (-1)^|S| prod_i sum_{j in S} c_ij`.
///
/// Row sums are recomputed for each column subset rather than updated along a
/// Gray code, so float rounding does not drift across the `2^m` subsets.
pub fn permanent_capped<T: Field>(c: &Matrix<T>, cap: usize) -> Result<T> {
    let m = c.order();
    if m > cap {
        return Err(Error::OrderCapExceeded { order: m, cap });
    }
    if m == 0 {
        return Ok(T::one());
    }
    let mut acc = Accumulator::new();
    let mut columns = Vec::with_capacity(m);
    for subset in 1usize..(1 << m) {
        columns.clear();
        columns.extend((0..m).filter(|j| subset >> j & 1 == 1));
        let mut product = T::one();
        for i in 0..m {
            let row_sum = columns.iter().fold(T::zero(), |s, &j| s + c.get(i, j));
            product = product * row_sum;
        }
        if (m - columns.len()) % 2 == 1 {
            acc.add(T::zero() - product);
        } else {
            acc.add(product);
        }
    }
    Ok(acc.value())
}

/// Factorial-sum permanent over all `m!` permutations (Heap's algorithm).
pub fn permanent_oracle<T: Field>(c: &Matrix<T>) -> Result<T> {
    let m = c.order();
    if m > PERMANENT_ORACLE_CAP {
        return Err(Error::OrderCapExceeded { order: m, cap: PERMANENT_ORACLE_CAP });
    }
    let mut perm: Vec<usize> = (0..m).collect();
    let term = |p: &[usize]| (0..m).fold(T::one(), |acc, i| acc * c.get(i, p[i]));
    let mut acc = Accumulator::new();
    acc.add(term(&perm));
    let mut counters = vec![0usize; m];
    let mut i = 1;
    while i < m {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            acc.add(term(&perm));
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    Ok(acc.value())
}
