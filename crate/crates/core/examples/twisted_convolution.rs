// Arithmetic in the crossed product: sums of `f_n δ^n` multiplied by the
// twisted rule `(f δ^n)(g δ^m) = f σ̃^n(g) δ^{n+m}`.

use crossed_commutant::crossed::{multiply, sigma_tilde_pow, CoefficientVector, CrossedElement};
use crossed_commutant::dynamics::PieceMap;
use crossed_commutant::rational::{int, ratio};

fn main() {
    let cycle = PieceMap::from_cycles(3, &[&[0, 1, 2]]).unwrap();
    let f = CoefficientVector::new(vec![int(1), int(2), int(3)]);
    for n in 0..=3 {
        println!("σ̃^{n}(f) = {}", sigma_tilde_pow(&f, &cycle, n).unwrap());
    }

    let a = CrossedElement::monomial(1, f.clone());
    let b = CrossedElement::monomial(-1, CoefficientVector::new(vec![ratio(1, 2), int(0), int(-1)]));
    let ab = multiply(&a, &b, &cycle).unwrap();
    let ba = multiply(&b, &a, &cycle).unwrap();
    println!("a·b = {}", serde_json::to_string(&ab).unwrap());
    println!("b·a = {}", serde_json::to_string(&ba).unwrap());
    println!("commute: {}", ab == ba);
}
