// Multiplier profiles of subintervals over one cycle of intervals: which
// ones are admissible, and a concrete lift realizing each.

use std::collections::BTreeSet;

use crossed_commutant::dynamics::{check_pi, pi_profile, realize_pi, refined_cycle_classes, PiProfile};

fn main() {
    let candidates = [
        PiProfile::new(2, 3, [(1, 2), (2, 2)]),
        PiProfile::new(2, 3, [(4, 4)]),
        PiProfile::new(1, 2, [(3, 3)]),
        PiProfile::new(1, 2, [(2, 3)]),
        PiProfile::new(3, 1, [(1, 1)]),
    ];
    for profile in candidates {
        let violations = check_pi(&profile);
        if !violations.is_empty() {
            let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
            println!("{profile}: rejected ({})", text.join("; "));
            continue;
        }
        let real = realize_pi(&profile).unwrap();
        let rcc = refined_cycle_classes(&real.refinement, &real.base_map, &real.refined_map).unwrap();
        let back = pi_profile(&real.refinement, &rcc, &real.cycle).unwrap();
        let classes: BTreeSet<_> = rcc.tilde_classes.keys().collect();
        println!("{profile}: realized by {}, classes {classes:?}, round trip {}", real.refined_map, back == profile);
    }
}
