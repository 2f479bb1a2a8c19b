//! JSON documents for polynomials, pairs, matrices and partition instances.
//!
//! Reals may be written as JSON numbers or as decimal strings; term indices
//! are 1-based. Output documents carry `"schema": 1`.

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::complex_pairing::PartitionInstance;
use crate::error::{Error, Result};
use crate::matching::{Matrix, SymMatrix};
use crate::poly::{FocusedPair, FocusedPolynomial, Term};
use crate::scalar::Real;

pub const SCHEMA_VERSION: u32 = 1;

/// Real number accepted as a JSON number or a decimal string.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Decimal(pub f64);

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct DecimalVisitor;
        impl Visitor<'_> for DecimalVisitor {
            type Value = Decimal;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or a decimal string")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Decimal, E> {
                Ok(Decimal(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Decimal, E> {
                Ok(Decimal(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Decimal, E> {
                Ok(Decimal(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Decimal, E> {
                let x: f64 = v.trim().parse().map_err(|_| E::invalid_value(de::Unexpected::Str(v), &self))?;
                if x.is_finite() {
                    Ok(Decimal(x))
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }
        d.deserialize_any(DecimalVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermDoc {
    pub indices: Vec<usize>,
    pub weight: Decimal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialDoc {
    pub n: usize,
    pub m: usize,
    pub generators: Vec<Vec<Decimal>>,
    pub terms: Vec<TermDoc>,
    /// Optional claimed focus level, checked against the certificate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Decimal>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDoc {
    pub f: PolynomialDoc,
    pub g: PolynomialDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionDoc {
    pub vectors: Vec<Vec<u32>>,
    pub target: Vec<u32>,
    pub max_coeff: u32,
}

impl PolynomialDoc {
    pub fn to_polynomial<T: Real>(&self) -> Result<FocusedPolynomial<T>> {
        let generators = self.generators.iter().map(|g| g.iter().map(|x| T::of(x.0)).collect()).collect();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (t, doc) in self.terms.iter().enumerate() {
            if doc.indices.contains(&0) {
                return Err(Error::InvalidPolynomial(format!("term {t} uses index 0; indices are 1-based")));
            }
            terms.push(Term::new(doc.indices.iter().map(|i| i - 1).collect(), T::of(doc.weight.0)));
        }
        let poly = FocusedPolynomial::new(self.n, self.m, generators, terms)?;
        if let Some(claimed) = self.delta {
            poly.certificate()?.check_claim(T::of(claimed.0))?;
        }
        Ok(poly)
    }

    pub fn from_polynomial<T: Real>(poly: &FocusedPolynomial<T>) -> Self {
        Self {
            n: poly.dimension(),
            m: poly.degree(),
            generators: poly.generators().iter().map(|g| g.iter().map(|x| Decimal(x.as_f64())).collect()).collect(),
            terms: poly
                .terms()
                .iter()
                .map(|t| TermDoc { indices: t.indices().iter().map(|i| i + 1).collect(), weight: Decimal(t.weight().as_f64()) })
                .collect(),
            delta: None,
        }
    }
}

impl PairDoc {
    pub fn to_pair<T: Real>(&self) -> Result<FocusedPair<T>> {
        FocusedPair::new(self.f.to_polynomial()?, self.g.to_polynomial()?)
    }
}

impl PartitionDoc {
    pub fn to_instance(&self) -> Result<PartitionInstance> {
        PartitionInstance::new(self.vectors.clone(), self.target.clone(), self.max_coeff)
    }
}

fn parse<'a, D: Deserialize<'a>>(text: &'a str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::InvalidPolynomial(format!("malformed JSON: {e}")))
}

pub fn parse_polynomial<T: Real>(text: &str) -> Result<FocusedPolynomial<T>> {
    parse::<PolynomialDoc>(text)?.to_polynomial()
}

pub fn parse_pair<T: Real>(text: &str) -> Result<FocusedPair<T>> {
    parse::<PairDoc>(text)?.to_pair()
}

pub fn parse_partition(text: &str) -> Result<PartitionInstance> {
    parse::<PartitionDoc>(text)?.to_instance()
}

/// Row-major JSON array of arrays.
pub fn parse_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let rows: Vec<Vec<Decimal>> = serde_json::from_str(text).map_err(|e| Error::InvalidMatrix(format!("malformed JSON: {e}")))?;
    Ok(rows.into_iter().map(|r| r.into_iter().map(|x| x.0).collect()).collect())
}

pub fn parse_sym_matrix<T: Real>(text: &str) -> Result<SymMatrix<T>> {
    let rows = parse_rows(text)?;
    SymMatrix::from_rows(&rows.iter().map(|r| r.iter().map(|&x| T::of(x)).collect()).collect::<Vec<_>>())
}

pub fn parse_matrix<T: Real>(text: &str) -> Result<Matrix<T>> {
    let rows = parse_rows(text)?;
    Matrix::from_rows(&rows.iter().map(|r| r.iter().map(|&x| T::of(x)).collect()).collect::<Vec<_>>())
}
