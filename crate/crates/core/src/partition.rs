//! Finite partitions of the real line or of an abstract set, and refinements
//! of them.
//!
//! Pieces are the atoms of everything downstream: a piecewise constant
//! function is a vector indexed by piece id, and the dynamics is a
//! permutation of piece ids. A real-line partition with jump points
//! `t_1 < ... < t_N` has `2N + 1` pieces, ordered as the open intervals
//! `I_0 .. I_N` from left to right followed by the jump points `{t_1} ..
//! {t_N}` (each jump point is a zero-length piece).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("jump points must be strictly increasing (position {index}: {value} does not exceed its predecessor)")]
    NonIncreasingPoints { index: usize, value: String },
    #[error("an abstract partition needs at least one piece")]
    EmptyPartition,
    #[error("piece {0} does not exist")]
    UnknownPiece(usize),
    #[error("piece {0} is not an interval")]
    NotAnInterval(usize),
    #[error("point {point} does not lie strictly inside interval {interval}")]
    PointOutsideInterval { interval: usize, point: String },
    #[error("point {0} is added twice")]
    DuplicatePoint(String),
    #[error("piece {0} is split into zero cells")]
    ZeroCellCount(usize),
    #[error("real-line refinement requested on an abstract partition")]
    NotRealLine,
    #[error("cell refinement requested on a real-line partition")]
    NotAbstract,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PieceKind {
    Interval,
    Point,
    /// A cell of an abstract partition; carries no geometry.
    Cell,
}

impl fmt::Display for PieceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PieceKind::Interval => "Interval",
            PieceKind::Point => "Point",
            PieceKind::Cell => "Cell",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub id: usize,
    pub kind: PieceKind,
    /// Id of the coarse piece this one refines; `None` on a base partition.
    pub parent: Option<usize>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Geometry {
    RealLine { jump_points: Vec<Rational> },
    Abstract,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pieces: Vec<Piece>,
    geometry: Geometry,
    /// Number of refinement steps separating this partition from a base one.
    depth: usize,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn piece(&self, id: usize) -> &Piece {
        &self.pieces[id]
    }

    pub fn kind(&self, id: usize) -> PieceKind {
        self.pieces[id].kind
    }

    pub fn label(&self, id: usize) -> &str {
        &self.pieces[id].label
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_real_line(&self) -> bool {
        matches!(self.geometry, Geometry::RealLine { .. })
    }

    pub fn jump_points(&self) -> Option<&[Rational]> {
        match &self.geometry {
            Geometry::RealLine { jump_points } => Some(jump_points),
            Geometry::Abstract => None,
        }
    }

    pub fn ids_of_kind(&self, kind: PieceKind) -> impl Iterator<Item = usize> + '_ {
        self.pieces
            .iter()
            .filter(move |p| p.kind == kind)
            .map(|p| p.id)
    }

    /// Open bounds `(left, right)` of a real-line interval piece, `None`
    /// standing for an infinite end.
    pub fn interval_bounds(
        &self,
        id: usize,
    ) -> Result<(Option<&Rational>, Option<&Rational>), PartitionError> {
        let points = self.jump_points().ok_or(PartitionError::NotRealLine)?;
        if id >= self.len() {
            return Err(PartitionError::UnknownPiece(id));
        }
        if id > points.len() {
            return Err(PartitionError::NotAnInterval(id));
        }
        let left = id.checked_sub(1).map(|i| &points[i]);
        Ok((left, points.get(id)))
    }

    /// Space-separated labels of a set of pieces.
    pub fn render_ids<'a>(&self, ids: impl IntoIterator<Item = &'a usize>) -> String {
        let labels: Vec<&str> = ids.into_iter().map(|&i| self.label(i)).collect();
        format!("{{{}}}", labels.join(", "))
    }
}

/// Builds the canonical `2N + 1` piece partition of the line cut at the
/// given jump points.
pub fn build_real_line_partition(jump_points: Vec<Rational>) -> Result<Partition, PartitionError> {
    for (index, pair) in jump_points.windows(2).enumerate() {
        if pair[0] >= pair[1] {
            return Err(PartitionError::NonIncreasingPoints {
                index: index + 1,
                value: format_rational(&pair[1]),
            });
        }
    }
    let n = jump_points.len();
    let mut pieces = Vec::with_capacity(2 * n + 1);
    for alpha in 0..=n {
        pieces.push(Piece {
            id: alpha,
            kind: PieceKind::Interval,
            parent: None,
            label: format!("I_{alpha}"),
        });
    }
    for alpha in 1..=n {
        pieces.push(Piece {
            id: n + alpha,
            kind: PieceKind::Point,
            parent: None,
            label: format!("{{t_{alpha}}}"),
        });
    }
    Ok(Partition {
        pieces,
        geometry: Geometry::RealLine { jump_points },
        depth: 0,
    })
}

pub fn build_abstract_partition(cardinality: usize) -> Result<Partition, PartitionError> {
    if cardinality == 0 {
        return Err(PartitionError::EmptyPartition);
    }
    let pieces = (0..cardinality)
        .map(|i| Piece {
            id: i,
            kind: PieceKind::Cell,
            parent: None,
            label: format!("X_{i}"),
        })
        .collect();
    Ok(Partition {
        pieces,
        geometry: Geometry::Abstract,
        depth: 0,
    })
}

/// A fine partition together with the coarse one it refines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    base: Partition,
    refined: Partition,
    parent_of: Vec<usize>,
    /// Real-line flavor only: base interval id to the points inserted there.
    added_points: BTreeMap<usize, Vec<Rational>>,
}

impl Refinement {
    /// The trivial refinement, every piece its own child.
    pub fn identity(base: &Partition) -> Refinement {
        let mut refined = base.clone();
        refined.depth += 1;
        for piece in &mut refined.pieces {
            piece.parent = Some(piece.id);
        }
        Refinement {
            base: base.clone(),
            refined,
            parent_of: (0..base.len()).collect(),
            added_points: BTreeMap::new(),
        }
    }

    pub fn base(&self) -> &Partition {
        &self.base
    }

    pub fn refined(&self) -> &Partition {
        &self.refined
    }

    pub fn parent_of(&self) -> &[usize] {
        &self.parent_of
    }

    pub fn added_points(&self) -> &BTreeMap<usize, Vec<Rational>> {
        &self.added_points
    }

    /// Children of a base piece, in increasing refined id.
    pub fn children_of(&self, base_id: usize) -> Vec<usize> {
        self.parent_of
            .iter()
            .enumerate()
            .filter(|&(_, &parent)| parent == base_id)
            .map(|(child, _)| child)
            .collect()
    }

    pub fn children_of_kind(&self, base_id: usize, kind: PieceKind) -> Vec<usize> {
        self.children_of(base_id)
            .into_iter()
            .filter(|&c| self.refined.kind(c) == kind)
            .collect()
    }

    /// All children grouped by base piece.
    pub fn child_table(&self) -> Vec<Vec<usize>> {
        let mut table = vec![Vec::new(); self.base.len()];
        for (child, &parent) in self.parent_of.iter().enumerate() {
            table[parent].push(child);
        }
        table
    }

    pub fn is_identity(&self) -> bool {
        self.base.len() == self.refined.len()
    }
}

fn point_symbol(depth: usize) -> &'static str {
    match depth {
        0 => "t",
        1 => "s",
        2 => "u",
        3 => "v",
        _ => "w",
    }
}

/// Inserts points into intervals of a real-line partition.
///
/// A base interval receiving `p` points splits into `p + 1` child intervals
/// labelled `I_a^1 .. I_a^{p+1}` from left to right and `p` child points.
/// Untouched pieces keep their labels.
pub fn refine_real_line(
    base: &Partition,
    additions: &BTreeMap<usize, Vec<Rational>>,
) -> Result<Refinement, PartitionError> {
    let base_points = base.jump_points().ok_or(PartitionError::NotRealLine)?;
    let n = base_points.len();

    let mut added_points: BTreeMap<usize, Vec<Rational>> = BTreeMap::new();
    for (&interval, points) in additions {
        if interval >= base.len() {
            return Err(PartitionError::UnknownPiece(interval));
        }
        if base.kind(interval) != PieceKind::Interval {
            return Err(PartitionError::NotAnInterval(interval));
        }
        let (left, right) = base.interval_bounds(interval)?;
        for point in points {
            let inside = left.is_none_or(|l| l < point) && right.is_none_or(|r| point < r);
            if !inside {
                return Err(PartitionError::PointOutsideInterval {
                    interval,
                    point: format_rational(point),
                });
            }
        }
        let mut sorted = points.clone();
        sorted.sort();
        if let Some(dup) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(PartitionError::DuplicatePoint(format_rational(&dup[0])));
        }
        if !sorted.is_empty() {
            added_points.insert(interval, sorted);
        }
    }

    let mut merged: Vec<Rational> = base_points.to_vec();
    merged.extend(added_points.values().flatten().cloned());
    merged.sort();
    let total = merged.len();

    // Number of base jump points `<= x` (resp. `< x`).
    let base_le = |x: &Rational| base_points.partition_point(|t| t <= x);
    let base_lt = |x: &Rational| base_points.partition_point(|t| t < x);

    let mut added_rank: BTreeMap<&Rational, usize> = BTreeMap::new();
    for (rank, point) in merged
        .iter()
        .filter(|x| base_points.binary_search(x).is_err())
        .enumerate()
    {
        added_rank.insert(point, rank + 1);
    }

    let symbol = point_symbol(base.depth() + 1);
    let mut pieces = Vec::with_capacity(2 * total + 1);
    let mut parent_of = Vec::with_capacity(2 * total + 1);
    let mut sub_index: BTreeMap<usize, usize> = BTreeMap::new();
    for j in 0..=total {
        let parent = if j == 0 { 0 } else { base_le(&merged[j - 1]) };
        let label = if added_points.contains_key(&parent) {
            let counter = sub_index.entry(parent).or_insert(0);
            *counter += 1;
            format!("{}^{}", base.label(parent), counter)
        } else {
            base.label(parent).to_string()
        };
        pieces.push(Piece {
            id: j,
            kind: PieceKind::Interval,
            parent: Some(parent),
            label,
        });
        parent_of.push(parent);
    }
    for (j, x) in merged.iter().enumerate() {
        let id = total + 1 + j;
        let (parent, label) = match base_points.binary_search(x) {
            Ok(alpha) => (n + 1 + alpha, base.label(n + 1 + alpha).to_string()),
            Err(_) => (base_lt(x), format!("{{{symbol}_{}}}", added_rank[x])),
        };
        pieces.push(Piece {
            id,
            kind: PieceKind::Point,
            parent: Some(parent),
            label,
        });
        parent_of.push(parent);
    }

    Ok(Refinement {
        base: base.clone(),
        refined: Partition {
            pieces,
            geometry: Geometry::RealLine {
                jump_points: merged,
            },
            depth: base.depth() + 1,
        },
        parent_of,
        added_points,
    })
}

/// Splits each listed abstract piece into the given number of cells;
/// unlisted pieces stay whole. Children are ordered by parent.
pub fn refine_abstract(
    base: &Partition,
    cell_counts: &BTreeMap<usize, usize>,
) -> Result<Refinement, PartitionError> {
    if base.is_real_line() {
        return Err(PartitionError::NotAbstract);
    }
    for (&id, &count) in cell_counts {
        if id >= base.len() {
            return Err(PartitionError::UnknownPiece(id));
        }
        if count == 0 {
            return Err(PartitionError::ZeroCellCount(id));
        }
    }
    let mut pieces = Vec::new();
    let mut parent_of = Vec::new();
    for parent in 0..base.len() {
        let count = cell_counts.get(&parent).copied().unwrap_or(1);
        for r in 1..=count {
            let label = if count == 1 {
                base.label(parent).to_string()
            } else {
                format!("{}^{r}", base.label(parent))
            };
            pieces.push(Piece {
                id: pieces.len(),
                kind: PieceKind::Cell,
                parent: Some(parent),
                label,
            });
            parent_of.push(parent);
        }
    }
    Ok(Refinement {
        base: base.clone(),
        refined: Partition {
            pieces,
            geometry: Geometry::Abstract,
            depth: base.depth() + 1,
        },
        parent_of,
        added_points: BTreeMap::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn kinds(p: &Partition) -> String {
        p.pieces()
            .iter()
            .map(|piece| match piece.kind {
                PieceKind::Interval => 'I',
                PieceKind::Point => 'P',
                PieceKind::Cell => 'X',
            })
            .collect()
    }

    #[test]
    fn empty_line_is_one_interval() {
        let p = build_real_line_partition(vec![]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.kind(0), PieceKind::Interval);
        assert_eq!(p.label(0), "I_0");
        assert_eq!(p.interval_bounds(0).unwrap(), (None, None));
    }

    #[test]
    fn two_jump_points_give_five_pieces() {
        let p = build_real_line_partition(vec![int(0), int(1)]).unwrap();
        let labels: Vec<_> = p.pieces().iter().map(|x| x.label.as_str()).collect();
        assert_eq!(labels, ["I_0", "I_1", "I_2", "{t_1}", "{t_2}"]);
    }

    #[test]
    fn three_jump_points_give_seven_pieces() {
        let p = build_real_line_partition(vec![int(0), int(1), int(2)]).unwrap();
        assert_eq!(p.len(), 7);
        assert_eq!(kinds(&p), "IIIIPPP");
        assert!(p.pieces().iter().enumerate().all(|(i, x)| x.id == i));
    }

    #[test]
    fn rejects_unsorted_points() {
        let err = build_real_line_partition(vec![int(1), int(1)]).unwrap_err();
        assert!(matches!(err, PartitionError::NonIncreasingPoints { index: 1, .. }));
        assert!(build_real_line_partition(vec![int(2), int(1)]).is_err());
    }

    #[test]
    fn interval_bounds_follow_jump_points() {
        let p = build_real_line_partition(vec![int(0), int(10)]).unwrap();
        assert_eq!(p.interval_bounds(0).unwrap(), (None, Some(&int(0))));
        assert_eq!(p.interval_bounds(1).unwrap(), (Some(&int(0)), Some(&int(10))));
        assert_eq!(p.interval_bounds(2).unwrap(), (Some(&int(10)), None));
        assert_eq!(p.interval_bounds(3), Err(PartitionError::NotAnInterval(3)));
    }

    #[test]
    fn two_points_in_one_interval_split_it_in_three() {
        let base = build_real_line_partition(vec![int(0), int(10)]).unwrap();
        let additions = BTreeMap::from([(1, vec![int(7), int(3)])]);
        let r = refine_real_line(&base, &additions).unwrap();
        let refined = r.refined();
        assert_eq!(refined.len(), 9);
        let labels: Vec<_> = refined.pieces().iter().map(|x| x.label.as_str()).collect();
        assert_eq!(
            labels,
            ["I_0", "I_1^1", "I_1^2", "I_1^3", "I_2", "{t_1}", "{s_1}", "{s_2}", "{t_2}"]
        );
        assert_eq!(r.parent_of(), &[0, 1, 1, 1, 2, 3, 1, 1, 4]);
        assert_eq!(r.added_points()[&1], vec![int(3), int(7)]);
        assert_eq!(r.children_of_kind(1, PieceKind::Interval), vec![1, 2, 3]);
        assert_eq!(r.children_of_kind(1, PieceKind::Point), vec![6, 7]);
    }

    #[test]
    fn one_jump_point_plus_two_added() {
        let base = build_real_line_partition(vec![int(0)]).unwrap();
        let additions = BTreeMap::from([(1, vec![int(3), int(7)])]);
        let r = refine_real_line(&base, &additions).unwrap();
        assert_eq!(r.refined().len(), 7);
        assert_eq!(r.children_of(1).len(), 5);
        assert_eq!(r.children_of(0), vec![0]);
        assert_eq!(r.children_of(2), vec![4]);
    }

    #[test]
    fn empty_additions_are_identity() {
        let base = build_real_line_partition(vec![int(0), int(1)]).unwrap();
        let r = refine_real_line(&base, &BTreeMap::new()).unwrap();
        assert_eq!(r.parent_of(), &[0, 1, 2, 3, 4]);
        assert_eq!(r.refined().pieces().len(), base.len());
        assert!(r.is_identity());
        assert_eq!(r.refined().label(3), "{t_1}");
    }

    #[test]
    fn refinement_errors() {
        let base = build_real_line_partition(vec![int(0), int(10)]).unwrap();
        let outside = BTreeMap::from([(1, vec![int(11)])]);
        assert!(matches!(
            refine_real_line(&base, &outside),
            Err(PartitionError::PointOutsideInterval { interval: 1, .. })
        ));
        let on_boundary = BTreeMap::from([(1, vec![int(10)])]);
        assert!(refine_real_line(&base, &on_boundary).is_err());
        let dup = BTreeMap::from([(1, vec![int(5), int(5)])]);
        assert!(matches!(
            refine_real_line(&base, &dup),
            Err(PartitionError::DuplicatePoint(_))
        ));
        let into_point = BTreeMap::from([(3, vec![int(0)])]);
        assert_eq!(
            refine_real_line(&base, &into_point),
            Err(PartitionError::NotAnInterval(3))
        );
    }

    #[test]
    fn unbounded_ends_accept_any_outer_point() {
        let base = build_real_line_partition(vec![int(0)]).unwrap();
        let additions = BTreeMap::from([(0, vec![int(-1000)]), (1, vec![int(1000)])]);
        let r = refine_real_line(&base, &additions).unwrap();
        assert_eq!(r.refined().len(), 7);
        assert_eq!(r.parent_of(), &[0, 0, 1, 1, 0, 2, 1]);
    }

    #[test]
    fn second_level_refinement_uses_fresh_symbol() {
        let base = build_real_line_partition(vec![int(0)]).unwrap();
        let r1 = refine_real_line(&base, &BTreeMap::from([(1, vec![int(5)])])).unwrap();
        let r2 =
            refine_real_line(r1.refined(), &BTreeMap::from([(2, vec![int(9)])])).unwrap();
        assert_eq!(r2.refined().depth(), 2);
        assert!(r2.refined().pieces().iter().any(|p| p.label == "{u_1}"));
        assert!(r2.refined().pieces().iter().any(|p| p.label == "I_1^2^1"));
    }

    #[test]
    fn abstract_refinements() {
        let base = build_abstract_partition(2).unwrap();
        let r = refine_abstract(&base, &BTreeMap::from([(0, 3), (1, 3)])).unwrap();
        assert_eq!(r.refined().len(), 6);
        assert_eq!(r.parent_of(), &[0, 0, 0, 1, 1, 1]);

        let one = build_abstract_partition(1).unwrap();
        let r = refine_abstract(&one, &BTreeMap::from([(0, 5)])).unwrap();
        assert_eq!(r.refined().len(), 5);
        assert!(r.parent_of().iter().all(|&p| p == 0));

        let ident = refine_abstract(&base, &BTreeMap::new()).unwrap();
        assert!(ident.is_identity());
        assert_eq!(ident.parent_of(), &[0, 1]);

        assert_eq!(
            refine_abstract(&base, &BTreeMap::from([(1, 0)])),
            Err(PartitionError::ZeroCellCount(1))
        );
        assert_eq!(build_abstract_partition(0), Err(PartitionError::EmptyPartition));
    }

    #[test]
    fn rebuilding_is_stable() {
        let base = build_real_line_partition(vec![int(-2), int(4)]).unwrap();
        let adds = BTreeMap::from([(0, vec![int(-9)]), (2, vec![int(6), int(5)])]);
        assert_eq!(
            refine_real_line(&base, &adds).unwrap(),
            refine_real_line(&base, &adds).unwrap()
        );
    }
}
