//! Exhaustive enumeration of lifted dynamics, classification of the
//! resulting commutants, and the partition counts behind the case analysis.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{
    check_pi, interior_points, interval_cycle, pi_profile, realize_pi, refined_cycle_classes, DynamicsError,
    PiProfile, PieceMap, RefinedCycleClassification,
};
use crate::instance::{Instance, InstanceFile};
use crate::partition::{build_real_line_partition, refine_real_line, PieceKind, Refinement};
use crate::rational::{int, Rational};

/// One bijection to choose: the children of `from` of one kind onto the
/// children of its image of the same kind.
#[derive(Debug, Clone)]
struct Block {
    domain: Vec<usize>,
    codomain: Vec<usize>,
}

fn lift_blocks(refinement: &Refinement, base_map: &PieceMap) -> Option<Vec<Block>> {
    let refined = refinement.refined();
    let mut blocks = Vec::new();
    for b in 0..refinement.base().len() {
        let image = base_map.apply(b);
        for kind in [PieceKind::Interval, PieceKind::Point, PieceKind::Cell] {
            let domain = refinement.children_of_kind(b, kind);
            let codomain = refinement.children_of_kind(image, kind);
            if domain.len() != codomain.len() {
                return None;
            }
            if !domain.is_empty() {
                blocks.push(Block { domain, codomain });
            }
        }
    }
    debug_assert_eq!(
        blocks.iter().map(|b| b.domain.len()).sum::<usize>(),
        refined.len()
    );
    Some(blocks)
}

/// Number of refined maps lifting `base_map`: one bijection per base piece
/// and kind, so the product of `c!` over those blocks (0 if some block has
/// mismatched sizes).
pub fn lift_count(refinement: &Refinement, base_map: &PieceMap) -> u128 {
    let Some(blocks) = lift_blocks(refinement, base_map) else {
        return 0;
    };
    blocks
        .iter()
        .map(|b| (1..=b.domain.len() as u128).product::<u128>())
        .product()
}

/// Every lift of `base_map`, lazily, in lexicographic order of the
/// per-block permutations.
pub fn enumerate_refined_maps(
    refinement: &Refinement,
    base_map: &PieceMap,
) -> impl Iterator<Item = PieceMap> {
    let len = refinement.refined().len();
    let blocks = lift_blocks(refinement, base_map);
    let feasible = blocks.is_some();
    let blocks = blocks.unwrap_or_default();
    let choices = blocks
        .iter()
        .map(|b| (0..b.domain.len()).permutations(b.domain.len()))
        .multi_cartesian_product()
        .take_while(move |_| feasible);
    choices
        .map(move |choice: Vec<Vec<usize>>| {
            let mut perm = vec![0; len];
            for (block, order) in blocks.iter().zip(&choice) {
                for (slot, &target) in order.iter().enumerate() {
                    perm[block.domain[slot]] = block.codomain[target];
                }
            }
            PieceMap::new(perm).expect("block bijections assemble into a permutation")
        })
}

/// Multiset of `(k, l, |C~_{kl}|)` over the classes with `l ≥ 2`: exactly the
/// data the commutant difference depends on, up to relabelling.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CaseSignature(pub Vec<(usize, usize, usize)>);

impl CaseSignature {
    pub fn from_classes(rcc: &RefinedCycleClassification) -> CaseSignature {
        let mut entries: Vec<_> = rcc
            .tilde_classes
            .iter()
            .filter(|((_, l), _)| *l >= 2)
            .map(|(&(k, l), set)| (k, l, set.len()))
            .collect();
        entries.sort_unstable();
        CaseSignature(entries)
    }

    pub fn of(instance: &Instance) -> Result<CaseSignature, DynamicsError> {
        let rcc = refined_cycle_classes(&instance.refinement, &instance.base_map, &instance.refined_map)?;
        Ok(CaseSignature::from_classes(&rcc))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for CaseSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(k, l, c)| format!("C~_{{{k},{l}}}×{c}"))
            .collect();
        if parts.is_empty() {
            write!(f, "∅")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseClass {
    pub representative: Instance,
    pub count: usize,
}

/// Instances grouped by signature. `merge` is commutative and associative,
/// so partial classifications can be combined in any order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Classification {
    pub classes: BTreeMap<CaseSignature, CaseClass>,
}

impl Classification {
    pub fn insert(&mut self, signature: CaseSignature, instance: Instance) {
        self.absorb(signature, CaseClass { representative: instance, count: 1 });
    }

    fn absorb(&mut self, signature: CaseSignature, incoming: CaseClass) {
        match self.classes.get_mut(&signature) {
            None => {
                self.classes.insert(signature, incoming);
            }
            Some(class) => {
                class.count += incoming.count;
                if incoming.representative.order_key() < class.representative.order_key() {
                    class.representative = incoming.representative;
                }
            }
        }
    }

    pub fn merge(mut self, other: Classification) -> Classification {
        for (signature, class) in other.classes {
            self.absorb(signature, class);
        }
        self
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn total(&self) -> usize {
        self.classes.values().map(|c| c.count).sum()
    }

    pub fn rows(&self) -> Vec<AtlasRow> {
        self.classes
            .iter()
            .map(|(signature, class)| AtlasRow {
                signature: signature.clone(),
                count: class.count,
                representative: class.representative.to_file(None),
            })
            .collect()
    }
}

pub fn classify_cases(
    instances: impl IntoIterator<Item = Instance>,
) -> Result<Classification, DynamicsError> {
    let mut out = Classification::default();
    for instance in instances {
        let signature = CaseSignature::of(&instance)?;
        out.insert(signature, instance);
    }
    Ok(out)
}

pub const MAX_ATLAS_PIECES: usize = 15;
pub const MAX_ATLAS_LIFTS: u128 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtlasError {
    #[error("scale exceeded: {what} is {value}, bound is {bound}")]
    ScaleExceeded {
        what: &'static str,
        value: u128,
        bound: u128,
    },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Base partition with `base_points` jump points, into whose intervals
/// `added_points` new points are distributed in every possible way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtlasConfig {
    pub base_points: usize,
    pub added_points: usize,
}

impl AtlasConfig {
    /// Smallest base where points can go into one interval or two.
    pub fn minimal_for(added_points: usize) -> AtlasConfig {
        AtlasConfig {
            base_points: usize::from(added_points >= 2),
            added_points,
        }
    }

    pub fn refined_pieces(&self) -> usize {
        2 * self.base_points + 1 + 2 * self.added_points
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtlasRow {
    pub signature: CaseSignature,
    pub count: usize,
    pub representative: InstanceFile,
}

/// Ordered `parts`-tuples of non-negative integers summing to `total`.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Kind-preserving permutations of a real-line base with `n` jump points.
fn kind_preserving_maps(n: usize) -> Vec<PieceMap> {
    let intervals: Vec<usize> = (0..=n).collect();
    let points: Vec<usize> = (n + 1..=2 * n).collect();
    let mut out = Vec::new();
    for pi in intervals.iter().copied().permutations(intervals.len()) {
        for pp in points.iter().copied().permutations(points.len()) {
            let perm: Vec<usize> = pi.iter().chain(&pp).copied().collect();
            out.push(PieceMap::new(perm).expect("concatenated permutations"));
        }
    }
    out
}

fn placement_refinement(base_points: usize, counts: &[usize]) -> Result<Refinement, DynamicsError> {
    let base = build_real_line_partition((0..base_points as i64).map(|t| int(10 * t)).collect())?;
    let mut additions: BTreeMap<usize, Vec<Rational>> = BTreeMap::new();
    for (interval, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let (left, right) = base.interval_bounds(interval)?;
        let pts = interior_points(left, right, c);
        additions.insert(interval, pts);
    }
    Ok(refine_real_line(&base, &additions)?)
}

/// Every (placement, base map, lift) triple for the configuration, checked
/// against the scale bounds before anything is enumerated.
pub fn atlas_instances(config: AtlasConfig) -> Result<Vec<Instance>, AtlasError> {
    let pieces = config.refined_pieces();
    if pieces > MAX_ATLAS_PIECES {
        return Err(AtlasError::ScaleExceeded {
            what: "refined piece count",
            value: pieces as u128,
            bound: MAX_ATLAS_PIECES as u128,
        });
    }
    let maps = kind_preserving_maps(config.base_points);
    let mut plan = Vec::new();
    let mut total: u128 = 0;
    for counts in compositions(config.added_points, config.base_points + 1) {
        let refinement = placement_refinement(config.base_points, &counts)?;
        for base_map in &maps {
            let lifts = lift_count(&refinement, base_map);
            if lifts == 0 {
                continue;
            }
            total += lifts;
            if total > MAX_ATLAS_LIFTS {
                return Err(AtlasError::ScaleExceeded {
                    what: "lift count",
                    value: total,
                    bound: MAX_ATLAS_LIFTS,
                });
            }
            plan.push((refinement.clone(), base_map.clone()));
        }
    }
    Ok(plan
        .into_iter()
        .flat_map(|(refinement, base_map)| {
            enumerate_refined_maps(&refinement, &base_map)
                .map(|refined_map| Instance {
                    refinement: refinement.clone(),
                    base_map: base_map.clone(),
                    refined_map,
                })
                .collect::<Vec<_>>()
        })
        .collect())
}

pub fn atlas(config: AtlasConfig) -> Result<Classification, AtlasError> {
    Ok(classify_cases(atlas_instances(config)?)?)
}

/// Number of partitions of `n` into positive parts.
pub fn integer_partition_count(n: usize) -> u128 {
    let mut ways = vec![0u128; n + 1];
    ways[0] = 1;
    for part in 1..=n {
        for total in part..=n {
            ways[total] += ways[total - part];
        }
    }
    ways[n]
}

/// Sorted cycle lengths of a permutation restricted to `pieces` (which it
/// must leave invariant).
pub fn cycle_type(map: &PieceMap, pieces: &[usize]) -> Vec<usize> {
    let mut seen = BTreeSet::new();
    let mut lengths = Vec::new();
    for &start in pieces {
        if !seen.insert(start) {
            continue;
        }
        let mut len = 1;
        let mut cur = map.apply(start);
        while cur != start {
            seen.insert(cur);
            cur = map.apply(cur);
            len += 1;
        }
        lengths.push(len);
    }
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    lengths
}

/// Formula value next to the count obtained by enumerating every lift.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubcaseCount {
    pub k: usize,
    pub formula: u128,
    pub machine: u128,
    pub agrees: bool,
}

/// Sub-cases when `k` points go into one fixed interval: pairs of
/// (cycle type on the points, cycle type on the `k + 1` subintervals).
pub fn c1_subcase_count(k: usize) -> Result<SubcaseCount, DynamicsError> {
    let formula = integer_partition_count(k) * integer_partition_count(k + 1);
    let (refinement, base_map) = interval_cycle(1, k)?;
    let intervals = refinement.children_of_kind(0, PieceKind::Interval);
    let points = refinement.children_of_kind(0, PieceKind::Point);
    let pairs: BTreeSet<(Vec<usize>, Vec<usize>)> = enumerate_refined_maps(&refinement, &base_map)
        .map(|m| (cycle_type(&m, &points), cycle_type(&m, &intervals)))
        .collect();
    let machine = pairs.len() as u128;
    Ok(SubcaseCount {
        k,
        formula,
        machine,
        agrees: formula == machine,
    })
}

/// Outcome of the exhaustive check for one `(k, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepCell {
    pub k: usize,
    pub p: usize,
    pub lifts: u128,
    /// Distinct profiles produced by the lifts.
    pub observed: BTreeSet<PiProfile>,
    /// Observed profiles that fail the admissibility conditions.
    pub inadmissible: Vec<PiProfile>,
    /// All profiles passing the admissibility conditions.
    pub admissible: BTreeSet<PiProfile>,
    /// Admissible profiles no lift produced.
    pub unhit: Vec<PiProfile>,
    /// Admissible profiles that `realize_pi` fails to reproduce.
    pub realize_failures: Vec<PiProfile>,
}

impl SweepCell {
    pub fn passed(&self) -> bool {
        self.inadmissible.is_empty() && self.unhit.is_empty() && self.realize_failures.is_empty()
    }
}

/// Every `l -> count` map over `1..=p+1` with counts summing to `p + 1`.
fn candidate_profiles(k: usize, p: usize) -> Vec<PiProfile> {
    let ls: Vec<usize> = (1..=p + 1).collect();
    compositions(p + 1, ls.len())
        .into_iter()
        .map(|counts| PiProfile::new(k, p, ls.iter().copied().zip(counts)))
        .collect()
}

/// Profile of parent interval 0 computed straight from periods; the sweep
/// touches millions of lifts so this avoids the allocating general path.
fn fast_profile(
    k: usize,
    p: usize,
    children: &[Vec<usize>],
    refined: &[usize],
    period: &mut [usize],
) -> Result<PiProfile, (usize, usize)> {
    period.iter_mut().for_each(|x| *x = 0);
    let mut reference: Option<BTreeMap<usize, usize>> = None;
    for (parent, kids) in children.iter().enumerate() {
        let mut counts = BTreeMap::new();
        for &c in kids {
            if period[c] == 0 {
                let mut len = 1;
                let mut cur = refined[c];
                while cur != c {
                    cur = refined[cur];
                    len += 1;
                }
                let mut cur = c;
                loop {
                    period[cur] = len;
                    cur = refined[cur];
                    if cur == c {
                        break;
                    }
                }
            }
            *counts.entry(period[c] / k).or_insert(0) += 1;
        }
        match &reference {
            None => reference = Some(counts),
            Some(seen) if *seen != counts => return Err((0, parent)),
            Some(_) => {}
        }
    }
    Ok(PiProfile::new(k, p, reference.unwrap_or_default()))
}

/// Both directions of the admissibility characterisation for one cycle of
/// `k` intervals with `p` points added to each.
pub fn profile_cell(k: usize, p: usize) -> Result<SweepCell, DynamicsError> {
    let (refinement, base_map) = interval_cycle(k, p)?;
    let children: Vec<Vec<usize>> = (0..k)
        .map(|i| refinement.children_of_kind(i, PieceKind::Interval))
        .collect();
    let mut period = vec![0; refinement.refined().len()];
    let mut observed = BTreeSet::new();
    let mut lifts = 0u128;
    for map in enumerate_refined_maps(&refinement, &base_map) {
        lifts += 1;
        let profile = fast_profile(k, p, &children, map.as_slice(), &mut period).map_err(
            |(first, second)| DynamicsError::NonUniformProfile { first, second },
        )?;
        observed.insert(profile);
    }
    let inadmissible = observed.iter().filter(|pr| !check_pi(pr).is_empty()).cloned().collect();
    let admissible: BTreeSet<PiProfile> = candidate_profiles(k, p)
        .into_iter()
        .filter(|pr| check_pi(pr).is_empty())
        .collect();
    let unhit = admissible.difference(&observed).cloned().collect();
    let cycle: BTreeSet<usize> = (0..k).collect();
    let realize_failures = admissible
        .iter()
        .filter(|pr| {
            let Ok(real) = realize_pi(pr) else { return true };
            refined_cycle_classes(&real.refinement, &real.base_map, &real.refined_map)
                .and_then(|rcc| pi_profile(&real.refinement, &rcc, &cycle))
                .map_or(true, |back| back != **pr)
        })
        .cloned()
        .collect();
    Ok(SweepCell {
        k,
        p,
        lifts,
        observed,
        inadmissible,
        admissible,
        unhit,
        realize_failures,
    })
}

pub fn profile_sweep(max_k: usize, max_p: usize) -> Result<Vec<SweepCell>, DynamicsError> {
    let mut cells = Vec::new();
    for k in 1..=max_k {
        for p in 0..=max_p {
            cells.push(profile_cell(k, p)?);
        }
    }
    Ok(cells)
}
