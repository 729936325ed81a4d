//! Seeded random instances: a base partition and map, up to two refinement
//! steps, and a random lift at each step.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, RngExt};

use crate::commutant::SubalgebraView;
use crate::dynamics::{interior_points, PieceMap};
use crate::instance::Instance;
use crate::partition::{
    build_abstract_partition, build_real_line_partition, refine_abstract, refine_real_line,
    Partition, PieceKind, Refinement,
};
use crate::rational::int;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomConfig {
    pub max_pieces: usize,
    pub max_levels: usize,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            max_pieces: 11,
            max_levels: 2,
        }
    }
}

/// A partition chain `P_0 ⊑ P_1 ⊑ ...` with a map on every level, each map
/// lifting the one below.
#[derive(Debug, Clone)]
pub struct RandomSystem {
    pub base: Partition,
    pub steps: Vec<Refinement>,
    pub maps: Vec<PieceMap>,
}

impl RandomSystem {
    pub fn finest(&self) -> &Partition {
        self.steps.last().map_or(&self.base, Refinement::refined)
    }

    pub fn finest_map(&self) -> &PieceMap {
        self.maps.last().expect("at least the base map")
    }

    /// The last refinement step as an instance, or the unrefined base.
    pub fn last_step(&self) -> Instance {
        match self.steps.last() {
            None => Instance::unrefined(&self.base, self.maps[0].clone()),
            Some(step) => Instance {
                refinement: step.clone(),
                base_map: self.maps[self.maps.len() - 2].clone(),
                refined_map: self.finest_map().clone(),
            },
        }
    }

    /// Every level's algebra seen inside the finest crossed product.
    pub fn views(&self) -> Vec<SubalgebraView> {
        let mut views = vec![SubalgebraView::full(self.finest())];
        for start in 0..self.steps.len() {
            if let Some(view) = SubalgebraView::across_chain(&self.steps[start..]) {
                views.push(view);
            }
        }
        views
    }
}

/// A uniformly random lift of `base_map`, or `None` if child counts differ
/// along some orbit.
pub fn random_lift<R: Rng + ?Sized>(
    refinement: &Refinement,
    base_map: &PieceMap,
    rng: &mut R,
) -> Option<PieceMap> {
    let mut perm = vec![usize::MAX; refinement.refined().len()];
    for b in 0..refinement.base().len() {
        let image = base_map.apply(b);
        for kind in [PieceKind::Interval, PieceKind::Point, PieceKind::Cell] {
            let domain = refinement.children_of_kind(b, kind);
            let mut codomain = refinement.children_of_kind(image, kind);
            if domain.len() != codomain.len() {
                return None;
            }
            codomain.shuffle(rng);
            for (d, c) in domain.into_iter().zip(codomain) {
                perm[d] = c;
            }
        }
    }
    PieceMap::new(perm).ok()
}

fn random_kind_preserving<R: Rng + ?Sized>(partition: &Partition, rng: &mut R) -> PieceMap {
    let mut perm: Vec<usize> = (0..partition.len()).collect();
    for kind in [PieceKind::Interval, PieceKind::Point, PieceKind::Cell] {
        let ids: Vec<usize> = partition.ids_of_kind(kind).collect();
        let mut images = ids.clone();
        images.shuffle(rng);
        for (i, img) in ids.into_iter().zip(images) {
            perm[i] = img;
        }
    }
    PieceMap::new(perm).expect("shuffles of disjoint kind classes")
}

/// One refinement step that keeps child counts constant along every cycle
/// of `map`, never growing past `max_pieces`.
fn random_refinement<R: Rng + ?Sized>(
    partition: &Partition,
    map: &PieceMap,
    max_pieces: usize,
    rng: &mut R,
) -> Refinement {
    let mut size = partition.len();
    let mut cycles = map.cycles();
    cycles.shuffle(rng);
    if partition.is_real_line() {
        let mut additions = BTreeMap::new();
        for cycle in cycles {
            if partition.kind(cycle[0]) != PieceKind::Interval || rng.random_bool(0.5) {
                continue;
            }
            let count: usize = rng.random_range(1..=2);
            let growth = 2 * count * cycle.len();
            if size + growth > max_pieces {
                continue;
            }
            size += growth;
            for &interval in &cycle {
                let (left, right) = partition.interval_bounds(interval).expect("interval piece");
                additions.insert(interval, interior_points(left, right, count));
            }
        }
        refine_real_line(partition, &additions).expect("points lie inside their intervals")
    } else {
        let mut cells = BTreeMap::new();
        for cycle in cycles {
            if rng.random_bool(0.5) {
                continue;
            }
            let count: usize = rng.random_range(2..=3);
            let growth = (count - 1) * cycle.len();
            if size + growth > max_pieces {
                continue;
            }
            size += growth;
            for &cell in &cycle {
                cells.insert(cell, count);
            }
        }
        refine_abstract(partition, &cells).expect("counts are positive")
    }
}

pub fn random_system<R: Rng + ?Sized>(config: RandomConfig, rng: &mut R) -> RandomSystem {
    let budget = config.max_pieces.max(1);
    let base = if rng.random_bool(0.5) {
        let n = rng.random_range(0..=((budget - 1) / 2).min(3));
        build_real_line_partition((0..n as i64).map(|t| int(10 * t)).collect()).expect("increasing points")
    } else {
        build_abstract_partition(rng.random_range(1..=budget.min(6))).expect("non-empty")
    };
    let mut maps = vec![random_kind_preserving(&base, rng)];
    let mut steps: Vec<Refinement> = Vec::new();
    let levels = rng.random_range(0..=config.max_levels);
    for _ in 0..levels {
        let current = steps.last().map_or(&base, Refinement::refined).clone();
        let map = maps.last().expect("non-empty");
        let step = random_refinement(&current, map, budget, rng);
        let lift = random_lift(&step, map, rng).expect("counts are constant along cycles");
        maps.push(lift);
        steps.push(step);
    }
    RandomSystem { base, steps, maps }
}
