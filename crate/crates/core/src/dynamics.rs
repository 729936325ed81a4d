//! The dynamics, stored only as the permutation it induces on pieces.
//!
//! A bijection of the underlying set leaves the piecewise constant algebra
//! invariant exactly when it carries pieces onto pieces of the same kind,
//! so nothing finer than a kind-preserving permutation of piece ids is ever
//! needed. This module validates such permutations (alone and as lifts
//! through a refinement), computes their cycle classes `C_k`, the refined
//! classes `C~_{kl}`, and the per-interval multiplier profiles `pi(l)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::partition::{
    build_real_line_partition, refine_real_line, PartitionError, PieceKind, Refinement,
};
use crate::rational::{int, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("map acts on {found} pieces but the partition has {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("refined map is not an admissible lift: {0}")]
    InvalidLift(InvarianceReport),
    #[error("refined piece {piece} has period {refined} which is not a multiple of its parent's period {parent}")]
    LiftInconsistent {
        piece: usize,
        refined: usize,
        parent: usize,
    },
    #[error("empty cycle")]
    EmptyCycle,
    #[error("the cycle contains no interval pieces")]
    NoIntervals,
    #[error("pieces of the cycle have different periods")]
    MixedPeriods,
    #[error("intervals {first} and {second} received different numbers of points ({first_count} vs {second_count})")]
    UnequalChildCounts {
        first: usize,
        second: usize,
        first_count: usize,
        second_count: usize,
    },
    #[error("intervals {first} and {second} have different multiplier profiles")]
    NonUniformProfile { first: usize, second: usize },
    #[error("profile is not realizable: {}", render_pi_violations(.0))]
    InfeasibleProfile(Vec<PiViolation>),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// A permutation of piece ids; `apply(i)` is the piece that piece `i` is
/// carried onto.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PieceMap {
    perm: Vec<usize>,
}

impl PieceMap {
    pub fn new(perm: Vec<usize>) -> Result<PieceMap, DynamicsError> {
        let mut seen = vec![false; perm.len()];
        for (i, &image) in perm.iter().enumerate() {
            if image >= perm.len() {
                return Err(DynamicsError::NotAPermutation(format!(
                    "image {image} of piece {i} is out of range"
                )));
            }
            if std::mem::replace(&mut seen[image], true) {
                return Err(DynamicsError::NotAPermutation(format!(
                    "piece {image} is hit twice"
                )));
            }
        }
        Ok(PieceMap { perm })
    }

    pub fn identity(len: usize) -> PieceMap {
        PieceMap {
            perm: (0..len).collect(),
        }
    }

    /// Builds a permutation from disjoint cycles; unmentioned pieces are fixed.
    pub fn from_cycles(len: usize, cycles: &[&[usize]]) -> Result<PieceMap, DynamicsError> {
        let mut perm: Vec<usize> = (0..len).collect();
        let mut touched = BTreeSet::new();
        for cycle in cycles {
            for (i, &from) in cycle.iter().enumerate() {
                if from >= len || !touched.insert(from) {
                    return Err(DynamicsError::NotAPermutation(format!(
                        "cycle entry {from} is out of range or repeated"
                    )));
                }
                perm[from] = cycle[(i + 1) % cycle.len()];
            }
        }
        PieceMap::new(perm)
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.perm
    }

    #[inline]
    pub fn apply(&self, piece: usize) -> usize {
        self.perm[piece]
    }

    pub fn inverse(&self) -> PieceMap {
        let mut inv = vec![0; self.perm.len()];
        for (i, &image) in self.perm.iter().enumerate() {
            inv[image] = i;
        }
        PieceMap { perm: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &PieceMap) -> PieceMap {
        assert_eq!(self.len(), other.len());
        PieceMap {
            perm: other.perm.iter().map(|&i| self.perm[i]).collect(),
        }
    }

    /// The `n`-th power, `n` of any sign.
    pub fn pow(&self, n: i64) -> PieceMap {
        let mut out = vec![0; self.perm.len()];
        for cycle in self.cycles() {
            let len = cycle.len() as i64;
            let shift = n.rem_euclid(len) as usize;
            for (pos, &piece) in cycle.iter().enumerate() {
                out[piece] = cycle[(pos + shift) % cycle.len()];
            }
        }
        PieceMap { perm: out }
    }

    /// Disjoint cycles, each starting at its smallest element, ordered by
    /// that element. Fixed points are included as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.perm.len()];
        let mut cycles = Vec::new();
        for start in 0..self.perm.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut next = self.perm[start];
            while next != start {
                seen[next] = true;
                cycle.push(next);
                next = self.perm[next];
            }
            cycles.push(cycle);
        }
        cycles
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j)
    }
}

impl fmt::Display for PieceMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<String> = self
            .cycles()
            .into_iter()
            .filter(|c| c.len() > 1)
            .map(|c| {
                let items: Vec<String> = c.iter().map(ToString::to_string).collect();
                format!("({})", items.join(" "))
            })
            .collect();
        if cycles.is_empty() {
            f.write_str("()")
        } else {
            f.write_str(&cycles.join(""))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Base,
    Refined,
}

/// One failed invariance condition. `rule()` names the lemma it breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    LengthMismatch {
        level: Level,
        expected: usize,
        found: usize,
    },
    KindMismatch {
        level: Level,
        piece: usize,
        from: PieceKind,
        image: usize,
        to: PieceKind,
    },
    /// An interval that received points is carried onto one that did not.
    RefinedSetNotInvariant { interval: usize, image: usize },
    /// A base piece and its image were split into different numbers of
    /// children.
    UnequalChildCounts {
        piece: usize,
        image: usize,
        piece_count: usize,
        image_count: usize,
        real_line: bool,
    },
    /// `parent(refined(c)) != base(parent(c))`.
    LiftBroken {
        piece: usize,
        expected_parent: usize,
        actual_parent: usize,
    },
}

impl Violation {
    pub fn rule(&self) -> &'static str {
        match self {
            Violation::LengthMismatch { .. } => "shape",
            Violation::KindMismatch { .. } => "Lemma 1",
            Violation::RefinedSetNotInvariant { .. } => "Lemma 2",
            Violation::UnequalChildCounts { real_line: true, .. } => "Lemma 3",
            Violation::UnequalChildCounts { real_line: false, .. } => "Lemma 6",
            Violation::LiftBroken { .. } => "lift law",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scope = |level: &Level| match level {
            Level::Base => "",
            Level::Refined => " (refined)",
        };
        match self {
            Violation::LengthMismatch {
                level,
                expected,
                found,
            } => write!(
                f,
                "shape violated{}: map has {found} entries, partition has {expected} pieces",
                scope(level)
            ),
            Violation::KindMismatch {
                level,
                piece,
                from,
                image,
                to,
            } => write!(
                f,
                "{} violated{}: piece {piece} ({from}) ↦ piece {image} ({to})",
                self.rule(),
                scope(level)
            ),
            Violation::RefinedSetNotInvariant { interval, image } => write!(
                f,
                "{} violated: interval {interval} received points but its image {image} did not",
                self.rule()
            ),
            Violation::UnequalChildCounts {
                piece,
                image,
                piece_count,
                image_count,
                ..
            } => write!(
                f,
                "{} violated: piece {piece} splits into {piece_count} pieces but its image {image} into {image_count}",
                self.rule()
            ),
            Violation::LiftBroken {
                piece,
                expected_parent,
                actual_parent,
            } => write!(
                f,
                "{} violated: refined piece {piece} lands in base piece {actual_parent}, expected {expected_parent}",
                self.rule()
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InvarianceReport {
    pub violations: Vec<Violation>,
}

impl InvarianceReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn mentions(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule() == rule)
    }
}

impl fmt::Display for InvarianceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        let lines: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        f.write_str(&lines.join("; "))
    }
}

fn kind_violations(
    partition: &crate::partition::Partition,
    map: &PieceMap,
    level: Level,
) -> Vec<Violation> {
    if map.len() != partition.len() {
        return vec![Violation::LengthMismatch {
            level,
            expected: partition.len(),
            found: map.len(),
        }];
    }
    (0..map.len())
        .filter_map(|piece| {
            let image = map.apply(piece);
            let (from, to) = (partition.kind(piece), partition.kind(image));
            (from != to).then_some(Violation::KindMismatch {
                level,
                piece,
                from,
                image,
                to,
            })
        })
        .collect()
}

/// Checks that `map` is an admissible dynamics on `partition`: on the real
/// line it must carry intervals to intervals and jump points to jump
/// points; on an abstract partition any bijection of pieces is admissible.
pub fn validate_invariance(
    partition: &crate::partition::Partition,
    map: &PieceMap,
) -> InvarianceReport {
    InvarianceReport {
        violations: kind_violations(partition, map, Level::Base),
    }
}

/// Checks that `refined_map` is a lift of `base_map` through the refinement,
/// so that both the coarse and the fine algebra are invariant.
pub fn validate_refined_invariance(
    refinement: &Refinement,
    base_map: &PieceMap,
    refined_map: &PieceMap,
) -> InvarianceReport {
    let mut violations = kind_violations(refinement.base(), base_map, Level::Base);
    violations.extend(kind_violations(
        refinement.refined(),
        refined_map,
        Level::Refined,
    ));
    if violations
        .iter()
        .any(|v| matches!(v, Violation::LengthMismatch { .. }))
    {
        return InvarianceReport { violations };
    }

    let base = refinement.base();
    let real_line = base.is_real_line();
    if real_line {
        let receiving = refinement.added_points();
        for &interval in receiving.keys() {
            let image = base_map.apply(interval);
            if !receiving.contains_key(&image) {
                violations.push(Violation::RefinedSetNotInvariant { interval, image });
            }
        }
    }
    let children = refinement.child_table();
    for piece in 0..base.len() {
        let image = base_map.apply(piece);
        let (piece_count, image_count) = (children[piece].len(), children[image].len());
        if piece_count != image_count {
            violations.push(Violation::UnequalChildCounts {
                piece,
                image,
                piece_count,
                image_count,
                real_line,
            });
        }
    }
    let parent_of = refinement.parent_of();
    for piece in 0..refined_map.len() {
        let expected_parent = base_map.apply(parent_of[piece]);
        let actual_parent = parent_of[refined_map.apply(piece)];
        if expected_parent != actual_parent {
            violations.push(Violation::LiftBroken {
                piece,
                expected_parent,
                actual_parent,
            });
        }
    }
    InvarianceReport { violations }
}

/// Period of every piece and the classes `C_k` of pieces with period `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleClassification {
    pub period_of: Vec<usize>,
    pub classes: BTreeMap<usize, BTreeSet<usize>>,
}

impl CycleClassification {
    pub fn period(&self, piece: usize) -> usize {
        self.period_of[piece]
    }

    pub fn class(&self, k: usize) -> Option<&BTreeSet<usize>> {
        self.classes.get(&k)
    }
}

pub fn cycle_classes(map: &PieceMap) -> CycleClassification {
    let mut period_of = vec![0; map.len()];
    let mut classes: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for cycle in map.cycles() {
        let k = cycle.len();
        for &piece in &cycle {
            period_of[piece] = k;
        }
        classes.entry(k).or_default().extend(cycle);
    }
    CycleClassification { period_of, classes }
}

/// For each refined piece: its parent's period `k`, its own period `k·l`
/// and the multiplier `l`, grouped into classes `C~_{kl}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinedCycleClassification {
    pub base_period_of: Vec<usize>,
    pub refined_period_of: Vec<usize>,
    pub multiplier_of: Vec<usize>,
    pub tilde_classes: BTreeMap<(usize, usize), BTreeSet<usize>>,
}

impl RefinedCycleClassification {
    /// Works on bare data so that callers can relabel pieces freely. The lift
    /// law must already hold.
    pub fn from_parts(
        parent_of: &[usize],
        base_map: &PieceMap,
        refined_map: &PieceMap,
    ) -> Result<RefinedCycleClassification, DynamicsError> {
        let base = cycle_classes(base_map);
        let refined = cycle_classes(refined_map);
        let mut multiplier_of = Vec::with_capacity(refined_map.len());
        let mut tilde_classes: BTreeMap<(usize, usize), BTreeSet<usize>> = BTreeMap::new();
        for (piece, &period) in refined.period_of.iter().enumerate() {
            let k = base.period_of[parent_of[piece]];
            if period % k != 0 {
                return Err(DynamicsError::LiftInconsistent {
                    piece,
                    refined: period,
                    parent: k,
                });
            }
            let l = period / k;
            multiplier_of.push(l);
            tilde_classes.entry((k, l)).or_default().insert(piece);
        }
        Ok(RefinedCycleClassification {
            base_period_of: base.period_of,
            refined_period_of: refined.period_of,
            multiplier_of,
            tilde_classes,
        })
    }

    pub fn multiplier(&self, refined_piece: usize) -> usize {
        self.multiplier_of[refined_piece]
    }
}

pub fn refined_cycle_classes(
    refinement: &Refinement,
    base_map: &PieceMap,
    refined_map: &PieceMap,
) -> Result<RefinedCycleClassification, DynamicsError> {
    let report = validate_refined_invariance(refinement, base_map, refined_map);
    if !report.is_ok() {
        return Err(DynamicsError::InvalidLift(report));
    }
    RefinedCycleClassification::from_parts(refinement.parent_of(), base_map, refined_map)
}

/// `pi[l]` = number of child intervals of one parent interval whose
/// multiplier is `l`. Zero counts are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PiProfile {
    pub k: usize,
    pub p: usize,
    pub pi: BTreeMap<usize, usize>,
}

impl PiProfile {
    pub fn new(k: usize, p: usize, pi: impl IntoIterator<Item = (usize, usize)>) -> PiProfile {
        PiProfile {
            k,
            p,
            pi: pi.into_iter().filter(|&(_, count)| count > 0).collect(),
        }
    }
}

impl fmt::Display for PiProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pi
            .iter()
            .map(|(l, c)| format!("π({l})={c}"))
            .collect();
        write!(f, "k={} p={} [{}]", self.k, self.p, parts.join(", "))
    }
}

/// Profile of one parent cycle. Every interval member must carry the same
/// number of points and show the same profile; point members are ignored.
pub fn pi_profile(
    refinement: &Refinement,
    rcc: &RefinedCycleClassification,
    base_cycle: &BTreeSet<usize>,
) -> Result<PiProfile, DynamicsError> {
    let first = *base_cycle.first().ok_or(DynamicsError::EmptyCycle)?;
    let k = rcc.base_period_of[first];
    if base_cycle.iter().any(|&m| rcc.base_period_of[m] != k) {
        return Err(DynamicsError::MixedPeriods);
    }
    let base = refinement.base();
    let mut reference: Option<(usize, PiProfile)> = None;
    for &member in base_cycle {
        if base.kind(member) != PieceKind::Interval {
            continue;
        }
        let p = refinement.children_of_kind(member, PieceKind::Point).len();
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for child in refinement.children_of_kind(member, PieceKind::Interval) {
            *counts.entry(rcc.multiplier(child)).or_default() += 1;
        }
        let profile = PiProfile::new(k, p, counts);
        match &reference {
            None => reference = Some((member, profile)),
            Some((first, seen)) if seen.p != p => {
                return Err(DynamicsError::UnequalChildCounts {
                    first: *first,
                    second: member,
                    first_count: seen.p,
                    second_count: p,
                })
            }
            Some((first, seen)) if *seen != profile => {
                return Err(DynamicsError::NonUniformProfile {
                    first: *first,
                    second: member,
                })
            }
            Some(_) => {}
        }
    }
    reference
        .map(|(_, profile)| profile)
        .ok_or(DynamicsError::NoIntervals)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PiViolation {
    /// `l` outside `1..=p+1`.
    OutOfRange { l: usize },
    NotDivisible { l: usize, count: usize },
    WrongTotal { total: usize, expected: usize },
}

impl fmt::Display for PiViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PiViolation::OutOfRange { l } => write!(f, "multiplier {l} out of range"),
            PiViolation::NotDivisible { l, count } => write!(f, "{l} does not divide π({l})={count}"),
            PiViolation::WrongTotal { total, expected } => {
                write!(f, "Σπ(l)={total}, expected {expected}")
            }
        }
    }
}

fn render_pi_violations(violations: &[PiViolation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Admissibility of a profile: `l | pi(l)` for every `l`, and the counts sum
/// to the `p + 1` child intervals of a parent. Empty result means admissible.
pub fn check_pi(profile: &PiProfile) -> Vec<PiViolation> {
    let mut violations = Vec::new();
    for (&l, &count) in &profile.pi {
        if l == 0 || l > profile.p + 1 {
            violations.push(PiViolation::OutOfRange { l });
        } else if count % l != 0 {
            violations.push(PiViolation::NotDivisible { l, count });
        }
    }
    let total: usize = profile.pi.values().sum();
    if total != profile.p + 1 {
        violations.push(PiViolation::WrongTotal {
            total,
            expected: profile.p + 1,
        });
    }
    violations
}

/// A concrete real-line instance built to exhibit a given profile.
#[derive(Debug, Clone)]
pub struct RealizedProfile {
    pub refinement: Refinement,
    pub base_map: PieceMap,
    pub refined_map: PieceMap,
    /// The base intervals forming the single `k`-cycle.
    pub cycle: BTreeSet<usize>,
}

/// `p` distinct rationals strictly inside `(left, right)`.
pub fn interior_points(left: Option<&Rational>, right: Option<&Rational>, p: usize) -> Vec<Rational> {
    (1..=p)
        .map(|j| match (left, right) {
            (Some(a), Some(b)) => a + (b - a) * ratio(j as i64, p as i64 + 1),
            (Some(a), None) => a + int(j as i64),
            (None, Some(b)) => b - int((p + 1 - j) as i64),
            (None, None) => int(j as i64),
        })
        .collect()
}

/// `k` intervals `I_0 -> I_1 -> ... -> I_{k-1} -> I_0` in one cycle (the
/// `k - 1` jump points stay fixed), with `p` points inserted into each.
pub fn interval_cycle(k: usize, p: usize) -> Result<(Refinement, PieceMap), DynamicsError> {
    if k == 0 {
        return Err(DynamicsError::EmptyCycle);
    }
    let base = build_real_line_partition((0..k as i64 - 1).map(int).collect())?;
    let mut base_perm: Vec<usize> = (0..base.len()).collect();
    for (i, slot) in base_perm.iter_mut().enumerate().take(k) {
        *slot = (i + 1) % k;
    }
    let base_map = PieceMap::new(base_perm)?;

    let mut additions = BTreeMap::new();
    for interval in 0..k {
        let (left, right) = base.interval_bounds(interval)?;
        additions.insert(interval, interior_points(left, right, p));
    }
    Ok((refine_real_line(&base, &additions)?, base_map))
}

/// Builds `k` intervals permuted in one cycle, inserts `p` points into each,
/// and lifts the cycle so that child intervals realise `profile`.
///
/// Child interval slots are grouped into consecutive blocks of `l` slots,
/// `pi(l)/l` blocks per multiplier, and each block is wired into one
/// `k·l`-cycle that walks through all `k` parents before advancing a slot.
/// Added points follow their parents slot for slot, so they have multiplier 1.
pub fn realize_pi(profile: &PiProfile) -> Result<RealizedProfile, DynamicsError> {
    let mut violations = check_pi(profile);
    if profile.k == 0 {
        violations.push(PiViolation::OutOfRange { l: 0 });
    }
    if !violations.is_empty() {
        return Err(DynamicsError::InfeasibleProfile(violations));
    }
    let (k, p) = (profile.k, profile.p);
    let (refinement, base_map) = interval_cycle(k, p)?;

    let sub: Vec<Vec<usize>> = (0..k)
        .map(|i| refinement.children_of_kind(i, PieceKind::Interval))
        .collect();
    let pts: Vec<Vec<usize>> = (0..k)
        .map(|i| refinement.children_of_kind(i, PieceKind::Point))
        .collect();

    let mut slot_next = vec![0; p + 1];
    let mut start = 0;
    for (&l, &count) in &profile.pi {
        for _ in 0..count / l {
            for j in start..start + l {
                slot_next[j] = start + (j - start + 1) % l;
            }
            start += l;
        }
    }

    let mut refined_perm: Vec<usize> = (0..refinement.refined().len()).collect();
    for i in 0..k {
        let last = i + 1 == k;
        for j in 0..=p {
            refined_perm[sub[i][j]] = if last {
                sub[0][slot_next[j]]
            } else {
                sub[i + 1][j]
            };
        }
        for j in 0..p {
            refined_perm[pts[i][j]] = pts[(i + 1) % k][j];
        }
    }
    let refined_map = PieceMap::new(refined_perm)?;
    Ok(RealizedProfile {
        refinement,
        base_map,
        refined_map,
        cycle: (0..k).collect(),
    })
}
