// How adding jump points shrinks the commutant: refined cycle classes and
// the degrees at which each class becomes forbidden.

use crossed_commutant::commutant::{commutant_difference, refined_sep};
use crossed_commutant::fixtures::builtin_cases;

fn main() {
    for fixture in builtin_cases() {
        let inst = &fixture.instance;
        let refined = inst.refinement.refined();
        let diff = commutant_difference(&inst.refinement, &inst.base_map, &inst.refined_map).unwrap();
        println!("{} ({})", fixture.name, fixture.summary);
        for (&(k, l), pieces) in &diff.entries {
            println!("  C~_{{{k},{l}}} = {} forbidden when {k} | n, {l} ∤ n/{k}", refined.render_ids(pieces));
        }
        let row: Vec<String> = (1..=6)
            .map(|n| {
                let sep = refined_sep(&inst.refinement, &inst.base_map, &inst.refined_map, n).unwrap();
                format!("{n}:{}", sep.len())
            })
            .collect();
        println!("  |Sep^n| for n=1..6: {}", row.join(" "));
    }
}
