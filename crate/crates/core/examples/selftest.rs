// A short seeded run of the randomized oracle and law suites.

use crossed_commutant::selftest::run_selftest;

fn main() {
    println!("{}", run_selftest(42, 200));
}
