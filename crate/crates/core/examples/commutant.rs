// The commutant of the piecewise constant functions: which degrees may
// carry which pieces, membership checks, and non-commuting witnesses.

use crossed_commutant::commutant::{
    brute_force_sep, commutant_description, find_noncommuting_witness, is_in_commutant, sep_set,
    SubalgebraView,
};
use crossed_commutant::crossed::{CoefficientVector, CrossedElement};
use crossed_commutant::dynamics::PieceMap;
use crossed_commutant::partition::build_real_line_partition;
use crossed_commutant::rational::int;

fn main() {
    let line = build_real_line_partition(vec![int(0), int(10)]).unwrap();
    let map = PieceMap::from_cycles(5, &[&[0, 2], &[3, 4]]).unwrap();
    let view = SubalgebraView::full(&line);
    let desc = commutant_description(&view, &map).unwrap();

    for n in 0..=4 {
        let sep = sep_set(&view, &map, n).unwrap();
        assert_eq!(sep, brute_force_sep(&view, &map, n).unwrap());
        println!(
            "n={n}: Sep = {:<24} allowed = {}",
            line.render_ids(&sep),
            line.render_ids(&desc.allowed(n))
        );
    }

    let on = |pieces: &[usize]| CoefficientVector::indicator(5, pieces);
    let member = CrossedElement::monomial(1, on(&[1]));
    let outsider = CrossedElement::monomial(1, on(&[0]));
    for (name, elem) in [("χ_{I_1} δ", &member), ("χ_{I_0} δ", &outsider)] {
        println!(
            "{name}: {:?}, fails to commute with χ of {:?}",
            is_in_commutant(elem, &desc).unwrap(),
            find_noncommuting_witness(elem, &view, &map)
                .unwrap()
                .map(|q| line.label(q).to_string())
        );
    }
}
