// Strong grading of the commutant, decided by exact ranks of products of
// homogeneous components.

use crossed_commutant::commutant::{commutant_description, SubalgebraView};
use crossed_commutant::crossed::is_strongly_graded;
use crossed_commutant::dynamics::PieceMap;
use crossed_commutant::partition::build_real_line_partition;
use crossed_commutant::rational::int;

fn main() {
    let line = build_real_line_partition(vec![int(0), int(1)]).unwrap();
    let view = SubalgebraView::full(&line);
    for (name, map) in [
        ("identity", PieceMap::identity(5)),
        ("swap", PieceMap::from_cycles(5, &[&[0, 2], &[3, 4]]).unwrap()),
        ("all intervals cycled", PieceMap::from_cycles(5, &[&[0, 1, 2]]).unwrap()),
    ] {
        let desc = commutant_description(&view, &map).unwrap();
        println!("{name}: {}", is_strongly_graded(&desc, &map, 3).unwrap());
    }
}
