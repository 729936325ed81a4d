// Partition numbers, and the sub-cases of putting `k` points into one
// fixed interval counted by machine.

use crossed_commutant::enumerate::{c1_subcase_count, integer_partition_count};

fn main() {
    let row: Vec<String> = (0..=12).map(|n| integer_partition_count(n).to_string()).collect();
    println!("p(0..=12) = {}", row.join(", "));
    for k in 1..=4 {
        let c = c1_subcase_count(k).unwrap();
        println!("k={k}: p(k)p(k+1) = {}, enumerated cycle-type pairs = {}, agree: {}", c.formula, c.machine, c.agrees);
    }
}
