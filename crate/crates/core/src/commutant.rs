//! Separation sets and commutants.
//!
//! `Sep^n` is the set of points where some function of the subalgebra
//! differs from its `σ̃^n` image. For piecewise constant functions it is the
//! union of the cycle classes `C_k` with `k ∤ n`, and an element
//! `Σ f_n δ^n` commutes with the subalgebra exactly when every `f_n`
//! vanishes on `Sep^n`. Both routes are implemented here: the divisibility
//! formula ([`sep_set`]) and a literal scan over the generators of the
//! subalgebra ([`brute_force_sep`]).
//!
//! A [`SubalgebraView`] fixes which subalgebra is meant: functions constant
//! on the pieces of a coarse partition, seen inside the crossed product of a
//! finer one.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, RngExt};
use thiserror::Error;

use crate::crossed::{multiply, sigma_tilde_pow, CoefficientVector, CrossedElement, CrossedError};
use crate::dynamics::{
    cycle_classes, refined_cycle_classes, CycleClassification, DynamicsError, PieceMap,
    RefinedCycleClassification,
};
use crate::partition::{Partition, Refinement};
use crate::rational::ratio;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CommutantError {
    #[error("map has {found} entries but the ambient partition has {expected} pieces")]
    LengthMismatch { expected: usize, found: usize },
    #[error("embedding is not a surjection onto the coarse pieces: {0}")]
    InvalidEmbedding(String),
    #[error("map does not descend to the coarse partition: pieces {first} and {second} share coarse piece {coarse} but land in different coarse pieces")]
    MapDoesNotDescend {
        coarse: usize,
        first: usize,
        second: usize,
    },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Crossed(#[from] CrossedError),
}

/// The subalgebra of functions constant on the pieces of `sub`, sitting
/// inside the algebra of functions constant on the pieces of `ambient`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubalgebraView {
    ambient: Partition,
    sub: Partition,
    embed: Vec<usize>,
}

impl SubalgebraView {
    pub fn new(
        ambient: Partition,
        sub: Partition,
        embed: Vec<usize>,
    ) -> Result<SubalgebraView, CommutantError> {
        if embed.len() != ambient.len() {
            return Err(CommutantError::InvalidEmbedding(format!(
                "{} entries for {} ambient pieces",
                embed.len(),
                ambient.len()
            )));
        }
        let mut hit = vec![false; sub.len()];
        for &coarse in &embed {
            match hit.get_mut(coarse) {
                Some(slot) => *slot = true,
                None => {
                    return Err(CommutantError::InvalidEmbedding(format!(
                        "coarse piece {coarse} does not exist"
                    )))
                }
            }
        }
        if let Some(missed) = hit.iter().position(|&h| !h) {
            return Err(CommutantError::InvalidEmbedding(format!(
                "coarse piece {missed} contains no ambient piece"
            )));
        }
        Ok(SubalgebraView {
            ambient,
            sub,
            embed,
        })
    }

    /// The partition's own algebra inside its own crossed product.
    pub fn full(partition: &Partition) -> SubalgebraView {
        SubalgebraView {
            ambient: partition.clone(),
            sub: partition.clone(),
            embed: (0..partition.len()).collect(),
        }
    }

    /// The coarse algebra inside the crossed product of the refined one.
    pub fn coarse_in_refined(refinement: &Refinement) -> SubalgebraView {
        SubalgebraView {
            ambient: refinement.refined().clone(),
            sub: refinement.base().clone(),
            embed: refinement.parent_of().to_vec(),
        }
    }

    /// The bottom partition of a refinement chain, seen inside the top one.
    pub fn across_chain(chain: &[Refinement]) -> Option<SubalgebraView> {
        let (first, rest) = chain.split_first()?;
        let mut embed = first.parent_of().to_vec();
        for step in rest {
            embed = step.parent_of().iter().map(|&mid| embed[mid]).collect();
        }
        Some(SubalgebraView {
            ambient: chain.last()?.refined().clone(),
            sub: first.base().clone(),
            embed,
        })
    }

    pub fn ambient(&self) -> &Partition {
        &self.ambient
    }

    pub fn sub(&self) -> &Partition {
        &self.sub
    }

    pub fn embed(&self) -> &[usize] {
        &self.embed
    }

    /// Characteristic function of a coarse piece, as an ambient vector.
    pub fn generator(&self, coarse: usize) -> CoefficientVector {
        let ids: Vec<usize> = (0..self.ambient.len())
            .filter(|&p| self.embed[p] == coarse)
            .collect();
        CoefficientVector::indicator(self.ambient.len(), &ids)
    }

    /// Lifts a coarse function to the ambient pieces.
    pub fn lift(&self, coarse_values: &CoefficientVector) -> CoefficientVector {
        CoefficientVector::new(
            self.embed
                .iter()
                .map(|&c| coarse_values.get(c).clone())
                .collect(),
        )
    }

    /// The permutation of coarse pieces induced by an ambient one.
    pub fn descend(&self, map: &PieceMap) -> Result<PieceMap, CommutantError> {
        if map.len() != self.ambient.len() {
            return Err(CommutantError::LengthMismatch {
                expected: self.ambient.len(),
                found: map.len(),
            });
        }
        let mut coarse: Vec<Option<(usize, usize)>> = vec![None; self.sub.len()];
        for piece in 0..map.len() {
            let from = self.embed[piece];
            let to = self.embed[map.apply(piece)];
            match coarse[from] {
                None => coarse[from] = Some((to, piece)),
                Some((seen, _)) if seen == to => {}
                Some((_, first)) => {
                    return Err(CommutantError::MapDoesNotDescend {
                        coarse: from,
                        first,
                        second: piece,
                    })
                }
            }
        }
        let perm = coarse
            .into_iter()
            .map(|c| c.expect("embedding is surjective").0)
            .collect();
        Ok(PieceMap::new(perm)?)
    }
}

/// `Sep^n` by the divisibility rule: an ambient piece separates at degree
/// `n` iff the period `k` of its coarse piece does not divide `n`.
pub fn sep_set(
    view: &SubalgebraView,
    map: &PieceMap,
    n: i64,
) -> Result<BTreeSet<usize>, CommutantError> {
    let coarse = cycle_classes(&view.descend(map)?);
    Ok((0..view.ambient.len())
        .filter(|&p| n % coarse.period(view.embed[p]) as i64 != 0)
        .collect())
}

/// `Sep^n` straight from its definition: compare every generator `χ_Q` of
/// the subalgebra with `σ̃^n(χ_Q)` piece by piece.
pub fn brute_force_sep(
    view: &SubalgebraView,
    map: &PieceMap,
    n: i64,
) -> Result<BTreeSet<usize>, CommutantError> {
    view.descend(map)?;
    let mut separated = BTreeSet::new();
    for coarse in 0..view.sub.len() {
        let h = view.generator(coarse);
        let shifted = sigma_tilde_pow(&h, map, n)?;
        for piece in 0..h.len() {
            if h.get(piece) != shifted.get(piece) {
                separated.insert(piece);
            }
        }
    }
    Ok(separated)
}

/// The commutant of a subalgebra, held as the coarse cycle classes plus the
/// rule "degree-`n` coefficients may live on `C_k` iff `k | n`". Exact for
/// every `n`; [`CommutantDescription::table`] materialises a window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutantDescription {
    view: SubalgebraView,
    coarse: CycleClassification,
    /// `k` to the ambient pieces lying over coarse pieces of period `k`.
    classes: BTreeMap<usize, BTreeSet<usize>>,
}

impl CommutantDescription {
    pub fn view(&self) -> &SubalgebraView {
        &self.view
    }

    pub fn ambient_len(&self) -> usize {
        self.view.ambient.len()
    }

    pub fn coarse_classes(&self) -> &CycleClassification {
        &self.coarse
    }

    /// Ambient pieces grouped by the period of their coarse piece.
    pub fn classes(&self) -> &BTreeMap<usize, BTreeSet<usize>> {
        &self.classes
    }

    /// Pieces where a degree-`n` coefficient may be nonzero.
    pub fn allowed(&self, n: i64) -> BTreeSet<usize> {
        self.classes
            .iter()
            .filter(|(&k, _)| n % k as i64 == 0)
            .flat_map(|(_, pieces)| pieces.iter().copied())
            .collect()
    }

    pub fn sep(&self, n: i64) -> BTreeSet<usize> {
        self.classes
            .iter()
            .filter(|(&k, _)| n % k as i64 != 0)
            .flat_map(|(_, pieces)| pieces.iter().copied())
            .collect()
    }

    pub fn table(&self, n_max: i64) -> BTreeMap<i64, BTreeSet<usize>> {
        (-n_max..=n_max).map(|n| (n, self.allowed(n))).collect()
    }
}

pub fn commutant_description(
    view: &SubalgebraView,
    map: &PieceMap,
) -> Result<CommutantDescription, CommutantError> {
    let coarse = cycle_classes(&view.descend(map)?);
    let mut classes: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (piece, &coarse_piece) in view.embed.iter().enumerate() {
        classes
            .entry(coarse.period(coarse_piece))
            .or_default()
            .insert(piece);
    }
    Ok(CommutantDescription {
        view: view.clone(),
        coarse,
        classes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Member,
    /// First offending `(degree, piece)` in lexicographic order.
    NotMember { degree: i64, piece: usize },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member)
    }
}

pub fn is_in_commutant(
    elem: &CrossedElement,
    desc: &CommutantDescription,
) -> Result<Membership, CrossedError> {
    if elem.pieces() != desc.ambient_len() {
        return Err(CrossedError::PartitionMismatch {
            expected: desc.ambient_len(),
            found: elem.pieces(),
        });
    }
    for (&degree, coefficient) in elem.terms() {
        let allowed = desc.allowed(degree);
        if let Some(piece) = coefficient.support().into_iter().find(|p| !allowed.contains(p)) {
            return Ok(Membership::NotMember { degree, piece });
        }
    }
    Ok(Membership::Member)
}

/// A coarse piece `Q` whose characteristic function fails to commute with
/// `elem`, scanning `Q` in increasing order. `None` means `elem` commutes
/// with every generator, hence with the whole subalgebra.
pub fn find_noncommuting_witness(
    elem: &CrossedElement,
    view: &SubalgebraView,
    map: &PieceMap,
) -> Result<Option<usize>, CommutantError> {
    for coarse in 0..view.sub.len() {
        let g = CrossedElement::from_function(view.generator(coarse));
        if multiply(elem, &g, map)? != multiply(&g, elem, map)? {
            return Ok(Some(coarse));
        }
    }
    Ok(None)
}

/// Random function of the subalgebra with small rational values.
pub fn random_subalgebra_element<R: Rng + ?Sized>(view: &SubalgebraView, rng: &mut R) -> CrossedElement {
    let coarse = CoefficientVector::new(
        (0..view.sub.len())
            .map(|_| ratio(rng.random_range(-9..=9), rng.random_range(1..=4)))
            .collect(),
    );
    CrossedElement::from_function(view.lift(&coarse))
}

/// Checks that `elem` commutes with `samples` random subalgebra elements.
pub fn commutes_with_sample<R: Rng + ?Sized>(
    elem: &CrossedElement,
    view: &SubalgebraView,
    map: &PieceMap,
    rng: &mut R,
    samples: usize,
) -> Result<bool, CommutantError> {
    for _ in 0..samples {
        let a = random_subalgebra_element(view, rng);
        if multiply(elem, &a, map)? != multiply(&a, elem, map)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn refined_sep_from_classes(rcc: &RefinedCycleClassification, parent_of: &[usize], n: i64) -> BTreeSet<usize> {
    (0..parent_of.len())
        .filter(|&piece| {
            let k = rcc.base_period_of[parent_of[piece]] as i64;
            let l = rcc.multiplier(piece) as i64;
            n % k != 0 || (n / k) % l != 0
        })
        .collect()
}

/// `Sep^n` of the refined algebra assembled from the coarse one: the coarse
/// separation set (as refined pieces) plus, for parents of period `k | n`,
/// the children with multiplier `l ∤ n/k`.
pub fn refined_sep(
    refinement: &Refinement,
    base_map: &PieceMap,
    refined_map: &PieceMap,
    n: i64,
) -> Result<BTreeSet<usize>, CommutantError> {
    let rcc = refined_cycle_classes(refinement, base_map, refined_map)?;
    Ok(refined_sep_from_classes(&rcc, refinement.parent_of(), n))
}

/// What refining the algebra removes from the commutant: degree-`n`
/// coefficients allowed on `C~_{kl}` for the coarse subalgebra but forbidden
/// for the refined one, which happens iff `k | n` and `l ∤ n/k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutantDifference {
    pub tilde: RefinedCycleClassification,
    /// Classes `C~_{kl}` with `l >= 2`; only these can ever be forbidden.
    pub entries: BTreeMap<(usize, usize), BTreeSet<usize>>,
    /// Commutant of the coarse algebra inside the refined crossed product.
    pub coarse: CommutantDescription,
    /// Commutant of the refined algebra.
    pub fine: CommutantDescription,
}

impl CommutantDifference {
    pub fn at(&self, n: i64) -> BTreeSet<usize> {
        self.entries
            .iter()
            .filter(|(&(k, l), _)| {
                let (k, l) = (k as i64, l as i64);
                n % k == 0 && (n / k) % l != 0
            })
            .flat_map(|(_, pieces)| pieces.iter().copied())
            .collect()
    }

    pub fn table(&self, n_max: i64) -> BTreeMap<i64, BTreeSet<usize>> {
        (-n_max..=n_max).map(|n| (n, self.at(n))).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Whether `elem` lies in the coarse commutant but not the refined one.
    pub fn separates(&self, elem: &CrossedElement) -> Result<bool, CrossedError> {
        Ok(is_in_commutant(elem, &self.coarse)?.is_member()
            && !is_in_commutant(elem, &self.fine)?.is_member())
    }
}

pub fn commutant_difference(
    refinement: &Refinement,
    base_map: &PieceMap,
    refined_map: &PieceMap,
) -> Result<CommutantDifference, CommutantError> {
    let tilde = refined_cycle_classes(refinement, base_map, refined_map)?;
    let entries = tilde
        .tilde_classes
        .iter()
        .filter(|(&(_, l), _)| l >= 2)
        .map(|(&key, pieces)| (key, pieces.clone()))
        .collect();
    let coarse = commutant_description(&SubalgebraView::coarse_in_refined(refinement), refined_map)?;
    let fine = commutant_description(&SubalgebraView::full(refinement.refined()), refined_map)?;
    Ok(CommutantDifference {
        tilde,
        entries,
        coarse,
        fine,
    })
}
