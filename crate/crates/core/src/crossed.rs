//! Exact arithmetic in the crossed product `A ⋊ ℤ`.
//!
//! An element of `A` is a coefficient vector, one constant per piece. The
//! automorphism induced by the dynamics is `f ↦ f ∘ σ⁻¹`; on vectors it moves
//! the value sitting on piece `Q` over to piece `σ(Q)`. Elements of the
//! crossed product are finite sums `Σ f_n δ^n` multiplied by
//! `(f_n δ^n)(g_m δ^m) = f_n σ̃^n(g_m) δ^{n+m}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::commutant::CommutantDescription;
use crate::dynamics::PieceMap;
use crate::linalg;
use crate::rational::{format_rational, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrossedError {
    #[error("operands live on partitions of different sizes ({expected} vs {found} pieces)")]
    PartitionMismatch { expected: usize, found: usize },
}

fn check_len(expected: usize, found: usize) -> Result<(), CrossedError> {
    if expected == found {
        Ok(())
    } else {
        Err(CrossedError::PartitionMismatch { expected, found })
    }
}

/// A piecewise constant function: its value on every piece.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoefficientVector(Vec<Rational>);

impl CoefficientVector {
    pub fn new(values: Vec<Rational>) -> CoefficientVector {
        CoefficientVector(values)
    }

    pub fn zeros(len: usize) -> CoefficientVector {
        CoefficientVector(vec![Rational::zero(); len])
    }

    pub fn ones(len: usize) -> CoefficientVector {
        CoefficientVector(vec![Rational::one(); len])
    }

    /// Characteristic function of a set of pieces.
    pub fn indicator<'a>(len: usize, ids: impl IntoIterator<Item = &'a usize>) -> CoefficientVector {
        let mut v = CoefficientVector::zeros(len);
        for &id in ids {
            v.0[id] = Rational::one();
        }
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn get(&self, piece: usize) -> &Rational {
        &self.0[piece]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    fn zip_with(
        &self,
        other: &CoefficientVector,
        op: impl Fn(&Rational, &Rational) -> Rational,
    ) -> Result<CoefficientVector, CrossedError> {
        check_len(self.len(), other.len())?;
        Ok(CoefficientVector(
            self.0.iter().zip(&other.0).map(|(a, b)| op(a, b)).collect(),
        ))
    }

    pub fn add(&self, other: &CoefficientVector) -> Result<CoefficientVector, CrossedError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CoefficientVector) -> Result<CoefficientVector, CrossedError> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product, i.e. the product of the two functions.
    pub fn mul(&self, other: &CoefficientVector) -> Result<CoefficientVector, CrossedError> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, factor: &Rational) -> CoefficientVector {
        CoefficientVector(self.0.iter().map(|v| v * factor).collect())
    }

    /// Value on each piece after moving values along `perm`: the result on
    /// piece `P` is the current value on `perm(P)`.
    fn pull_back(&self, perm: &PieceMap) -> CoefficientVector {
        CoefficientVector((0..self.len()).map(|p| self.0[perm.apply(p)].clone()).collect())
    }
}

impl fmt::Display for CoefficientVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// `σ̃^n(f) = f ∘ σ^{-n}` for any integer `n`.
pub fn sigma_tilde_pow(
    f: &CoefficientVector,
    map: &PieceMap,
    n: i64,
) -> Result<CoefficientVector, CrossedError> {
    check_len(map.len(), f.len())?;
    Ok(f.pull_back(&map.pow(-n)))
}

/// A finite sum `Σ f_n δ^n`; zero coefficients are never stored, so equal
/// elements compare equal structurally.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CrossedElement {
    pieces: usize,
    terms: BTreeMap<i64, CoefficientVector>,
}

impl CrossedElement {
    pub fn zero(pieces: usize) -> CrossedElement {
        CrossedElement {
            pieces,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(degree: i64, coefficient: CoefficientVector) -> CrossedElement {
        let mut e = CrossedElement::zero(coefficient.len());
        if !coefficient.is_zero() {
            e.terms.insert(degree, coefficient);
        }
        e
    }

    /// Embeds a function of `A` in degree zero.
    pub fn from_function(coefficient: CoefficientVector) -> CrossedElement {
        CrossedElement::monomial(0, coefficient)
    }

    pub fn from_terms(
        pieces: usize,
        terms: impl IntoIterator<Item = (i64, CoefficientVector)>,
    ) -> Result<CrossedElement, CrossedError> {
        let mut e = CrossedElement::zero(pieces);
        for (degree, coefficient) in terms {
            check_len(pieces, coefficient.len())?;
            e.accumulate(degree, coefficient);
        }
        Ok(e)
    }

    pub fn pieces(&self) -> usize {
        self.pieces
    }

    pub fn terms(&self) -> &BTreeMap<i64, CoefficientVector> {
        &self.terms
    }

    pub fn coefficient(&self, degree: i64) -> Option<&CoefficientVector> {
        self.terms.get(&degree)
    }

    pub fn degrees(&self) -> BTreeSet<i64> {
        self.terms.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn accumulate(&mut self, degree: i64, coefficient: CoefficientVector) {
        let merged = match self.terms.remove(&degree) {
            Some(existing) => existing.add(&coefficient).expect("lengths checked"),
            None => coefficient,
        };
        if !merged.is_zero() {
            self.terms.insert(degree, merged);
        }
    }

    pub fn add(&self, other: &CrossedElement) -> Result<CrossedElement, CrossedError> {
        check_len(self.pieces, other.pieces)?;
        let mut out = self.clone();
        for (&degree, coefficient) in &other.terms {
            out.accumulate(degree, coefficient.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &CrossedElement) -> Result<CrossedElement, CrossedError> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, factor: &Rational) -> CrossedElement {
        if factor.is_zero() {
            return CrossedElement::zero(self.pieces);
        }
        CrossedElement {
            pieces: self.pieces,
            terms: self
                .terms
                .iter()
                .map(|(&d, c)| (d, c.scale(factor)))
                .collect(),
        }
    }
}

/// Twisted convolution `f * g`.
pub fn multiply(
    f: &CrossedElement,
    g: &CrossedElement,
    map: &PieceMap,
) -> Result<CrossedElement, CrossedError> {
    check_len(f.pieces, g.pieces)?;
    check_len(map.len(), f.pieces)?;
    let mut out = CrossedElement::zero(f.pieces);
    for (&n, f_n) in &f.terms {
        let back = map.pow(-n);
        for (&m, g_m) in &g.terms {
            let product = f_n.mul(&g_m.pull_back(&back))?;
            out.accumulate(n + m, product);
        }
    }
    Ok(out)
}

pub fn graded_component_dim(support_mask: &BTreeSet<usize>) -> usize {
    support_mask.len()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum GradingVerdict {
    /// Every product of components inside the window spans its target.
    StronglyGraded { window: i64 },
    /// `A'_n · A'_m` spans a proper subspace of `A'_{n+m}`.
    NotStronglyGraded {
        n: i64,
        m: i64,
        product_rank: usize,
        component_dim: usize,
    },
}

impl GradingVerdict {
    pub fn is_strong(&self) -> bool {
        matches!(self, GradingVerdict::StronglyGraded { .. })
    }

    pub fn witness(&self) -> Option<(i64, i64)> {
        match self {
            GradingVerdict::StronglyGraded { .. } => None,
            GradingVerdict::NotStronglyGraded { n, m, .. } => Some((*n, *m)),
        }
    }
}

impl fmt::Display for GradingVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GradingVerdict::StronglyGraded { window } => {
                write!(f, "strongly graded within |n|,|m| <= {window}")
            }
            GradingVerdict::NotStronglyGraded {
                n,
                m,
                product_rank,
                component_dim,
            } => write!(
                f,
                "not strongly graded, witness ({n},{m}): products span dimension {product_rank} < {component_dim}"
            ),
        }
    }
}

/// Degrees `0, 1, -1, 2, -2, ...` up to `n_max`.
fn window_order(n_max: i64) -> Vec<i64> {
    let mut out = vec![0];
    for d in 1..=n_max {
        out.push(d);
        out.push(-d);
    }
    out
}

/// Compares the span of `A'_n · A'_m` with `A'_{n+m}` by exact rank for all
/// `|n|, |m| <= n_max`, returning the first pair that falls short. Only a
/// "no" is conclusive; "yes" holds within the window.
pub fn is_strongly_graded(
    commutant: &CommutantDescription,
    map: &PieceMap,
    n_max: i64,
) -> Result<GradingVerdict, CrossedError> {
    let pieces = commutant.ambient_len();
    check_len(pieces, map.len())?;
    let basis = |degree: i64| -> Vec<CrossedElement> {
        commutant
            .allowed(degree)
            .iter()
            .map(|&p| CrossedElement::monomial(degree, CoefficientVector::indicator(pieces, [&p])))
            .collect()
    };
    let degrees = window_order(n_max.max(1));
    for &n in &degrees {
        let left = basis(n);
        for &m in &degrees {
            let right = basis(m);
            let mut rows = Vec::with_capacity(left.len() * right.len());
            for a in &left {
                for b in &right {
                    let product = multiply(a, b, map)?;
                    rows.push(match product.coefficient(n + m) {
                        Some(c) => c.values().to_vec(),
                        None => vec![Rational::zero(); pieces],
                    });
                }
            }
            let product_rank = linalg::rank(&rows);
            let component_dim = graded_component_dim(&commutant.allowed(n + m));
            if product_rank < component_dim {
                return Ok(GradingVerdict::NotStronglyGraded {
                    n,
                    m,
                    product_rank,
                    component_dim,
                });
            }
        }
    }
    Ok(GradingVerdict::StronglyGraded { window: n_max })
}

#[derive(Serialize, Deserialize)]
struct CrossedElementJson {
    terms: BTreeMap<String, Vec<String>>,
}

impl Serialize for CrossedElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CrossedElementJson {
            terms: self
                .terms
                .iter()
                .map(|(d, c)| (d.to_string(), c.values().iter().map(format_rational).collect()))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CrossedElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = CrossedElementJson::deserialize(deserializer)?;
        let mut pieces = None;
        let mut terms = Vec::new();
        for (degree, values) in raw.terms {
            let degree: i64 = degree
                .parse()
                .map_err(|_| D::Error::custom(format!("degree {degree:?} is not an integer")))?;
            let values = values
                .iter()
                .map(|v| parse_rational(v))
                .collect::<Result<Vec<_>, _>>()
                .map_err(D::Error::custom)?;
            if *pieces.get_or_insert(values.len()) != values.len() {
                return Err(D::Error::custom("coefficient vectors differ in length"));
            }
            terms.push((degree, CoefficientVector::new(values)));
        }
        CrossedElement::from_terms(pieces.unwrap_or(0), terms).map_err(D::Error::custom)
    }
}
