// Piece permutations, their cycle classes, and what the validator rejects.

use std::collections::BTreeMap;

use crossed_commutant::dynamics::{cycle_classes, validate_invariance, validate_refined_invariance, PieceMap};
use crossed_commutant::partition::{build_real_line_partition, refine_real_line};
use crossed_commutant::rational::int;

fn main() {
    let line = build_real_line_partition(vec![int(0), int(10)]).unwrap();
    // I_0 <-> I_2 and {t_1} <-> {t_2}; I_1 stays put.
    let swap = PieceMap::from_cycles(5, &[&[0, 2], &[3, 4]]).unwrap();
    println!("map {swap}: {}", validate_invariance(&line, &swap));
    for (k, class) in &cycle_classes(&swap).classes {
        println!("  C_{k} = {}", line.render_ids(class));
    }

    let bad = PieceMap::from_cycles(5, &[&[0, 4]]).unwrap();
    println!("map {bad}: {}", validate_invariance(&line, &bad));

    // I_0 gets one point, I_2 none: swapping them cannot lift.
    let refinement = refine_real_line(&line, &BTreeMap::from([(0, vec![int(-1)])])).unwrap();
    let lift = PieceMap::from_cycles(7, &[&[0, 3], &[1, 2], &[4, 6]]).unwrap();
    println!("lift {lift}: {}", validate_refined_invariance(&refinement, &swap, &lift));
}
