//! One line per acceptance criterion; exits non-zero if any fails.

use std::collections::BTreeSet;
use std::time::Instant;

use crossed_commutant::commutant::{commutant_description, sep_set, SubalgebraView};
use crossed_commutant::crossed::is_strongly_graded;
use crossed_commutant::dynamics::PieceMap;
use crossed_commutant::enumerate::{
    atlas, atlas_instances, c1_subcase_count, integer_partition_count, profile_sweep, AtlasConfig,
    CaseSignature,
};
use crossed_commutant::fixtures::{builtin_case, builtin_cases};
use crossed_commutant::commutant::refined_sep;
use crossed_commutant::partition::build_real_line_partition;
use crossed_commutant::rational::int;
use crossed_commutant::selftest::{
    instance_stream, resolve_seed, run_selftest, sep_oracle_suite, SelftestReport,
};

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn oracle_equivalence(seed: u64) -> Outcome {
    let start = Instant::now();
    let systems = instance_stream(seed, 1000);
    let max_pieces = systems.iter().map(|s| s.finest().len()).max().unwrap_or(0);
    let max_levels = systems.iter().map(|s| s.steps.len()).max().unwrap_or(0);
    let suite = sep_oracle_suite(&systems);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        suite.ok() && suite.total >= 1000 && max_pieces <= 11 && max_levels <= 2 && secs < 10.0,
        format!("{suite}, |n| <= 12, max {max_pieces} pieces, {max_levels} refinement steps, {secs:.2}s"),
    )
}

fn builtin_case_rules() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for f in builtin_cases() {
        let bad = f.mismatches(12).expect("fixtures are valid");
        if !bad.is_empty() {
            pass = false;
            notes.push(format!("{} differs at n={bad:?}", f.name));
        }
    }
    // The three-way case split for a 3-cycle plus swapped points.
    let f = builtin_case("one-interval-three-cycle-point-swap").unwrap();
    let inst = &f.instance;
    let base_view = SubalgebraView::full(inst.refinement.base());
    let extra = |n: i64| -> BTreeSet<String> {
        let coarse = sep_set(&base_view, &inst.base_map, n).unwrap();
        refined_sep(&inst.refinement, &inst.base_map, &inst.refined_map, n)
            .unwrap()
            .into_iter()
            .filter(|&r| !coarse.contains(&inst.refinement.parent_of()[r]))
            .map(|r| inst.refinement.refined().label(r).to_string())
            .collect()
    };
    let set = |labels: &[&str]| labels.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    let subintervals = set(&["I_1^1", "I_1^2", "I_1^3"]);
    for n in -12i64..=12 {
        let e = extra(n);
        let ok = if n % 2 != 0 && n % 3 == 0 {
            e == set(&["{s_1}", "{s_2}"])
        } else if n % 3 != 0 {
            e.is_superset(&subintervals)
        } else {
            e.is_empty()
        };
        if !ok {
            pass = false;
            notes.push(format!("three-way split fails at n={n}: {e:?}"));
        }
    }
    let exchanged = builtin_case("two-intervals-exchanged").unwrap();
    if !exchanged.rules.is_empty() || !exchanged.mismatches(12).unwrap().is_empty() {
        pass = false;
        notes.push("exchanged intervals should leave Sep unchanged".into());
    }
    let detail = if notes.is_empty() {
        format!("{} built-in cases match their divisibility rules for |n| <= 12", builtin_cases().len())
    } else {
        notes.join("; ")
    };
    outcome(pass, detail)
}

fn case_count() -> Outcome {
    let config = AtlasConfig::minimal_for(2);
    let classes = atlas(config).expect("desk scale");
    let instances = atlas_instances(config).unwrap();
    // Which placements (one interval vs two) reach the empty signature.
    let mut placements = BTreeSet::new();
    for inst in &instances {
        if CaseSignature::of(inst).unwrap().is_empty() {
            let split = inst.refinement.child_table().iter().filter(|c| c.len() > 1).count();
            placements.insert(split);
        }
    }
    let fixtures_agree = CaseSignature::of(&builtin_case("one-interval-fixed").unwrap().instance).unwrap()
        == CaseSignature::of(&builtin_case("two-intervals-fixed").unwrap().instance).unwrap();
    let shared = placements.contains(&1) && placements.contains(&2) && fixtures_agree;
    let sigs: Vec<String> = classes.classes.keys().map(ToString::to_string).collect();
    outcome(
        classes.len() == 6 && shared,
        format!(
            "{} signatures over {} instances [{}]; fixed cases share a signature: {shared}",
            classes.len(),
            classes.total(),
            sigs.join(" | ")
        ),
    )
}

fn profile_characterisation() -> Outcome {
    let start = Instant::now();
    let cells = profile_sweep(3, 3).expect("sweep runs");
    let secs = start.elapsed().as_secs_f64();
    let lifts: u128 = cells.iter().map(|c| c.lifts).sum();
    let admissible: usize = cells.iter().map(|c| c.admissible.len()).sum();
    let failed: Vec<String> = cells.iter().filter(|c| !c.passed()).map(|c| format!("k={} p={}", c.k, c.p)).collect();
    outcome(
        failed.is_empty() && secs < 30.0,
        format!(
            "{} cells, {lifts} lifts, {admissible} admissible profiles all hit and realized, {secs:.2}s{}",
            cells.len(),
            if failed.is_empty() { String::new() } else { format!("; failing {failed:?}") }
        ),
    )
}

/// Independent count: non-increasing sequences of positive parts.
fn brute_partitions(n: usize, max_part: usize) -> u128 {
    if n == 0 {
        return 1;
    }
    (1..=max_part.min(n)).map(|first| brute_partitions(n - first, first)).sum()
}

fn counting() -> Outcome {
    let partitions_ok = (0..=12).all(|n| integer_partition_count(n) == brute_partitions(n, n));
    let mut pairs = Vec::new();
    let mut subcases_ok = true;
    for (k, expected) in [(1, 2), (2, 6), (3, 15), (4, 35)] {
        let c = c1_subcase_count(k).expect("desk scale");
        subcases_ok &= c.agrees && c.machine == expected && c.formula == expected;
        pairs.push(format!("k={k}: {}/{}", c.machine, c.formula));
    }
    outcome(
        partitions_ok && subcases_ok,
        format!("p(n) = brute force for n <= 12: {partitions_ok}; machine/formula {}", pairs.join(", ")),
    )
}

fn laws(report: &SelftestReport) -> Outcome {
    let get = |name| report.suite(name).expect("suite exists");
    let names = ["associativity", "bilinearity", "group action", "commutant commutativity", "maximality witness"];
    let pass = names.iter().all(|n| get(*n).ok())
        && get("associativity").total >= 500
        && get("bilinearity").total >= 500
        && get("commutant commutativity").total >= 500
        && get("maximality witness").total > 0;
    outcome(pass, names.iter().map(|n| get(*n).to_string()).collect::<Vec<_>>().join(", "))
}

fn grading() -> Outcome {
    let p = build_real_line_partition(vec![int(0), int(1)]).unwrap();
    let view = SubalgebraView::full(&p);
    let swap = PieceMap::from_cycles(5, &[&[0, 2], &[3, 4]]).unwrap();
    let swap_verdict = is_strongly_graded(&commutant_description(&view, &swap).unwrap(), &swap, 3).unwrap();
    let id = PieceMap::identity(5);
    let id_verdict = is_strongly_graded(&commutant_description(&view, &id).unwrap(), &id, 3).unwrap();
    outcome(
        swap_verdict.witness() == Some((1, 1)) && id_verdict.is_strong(),
        format!("swap: {swap_verdict}; identity: {id_verdict}"),
    )
}

fn monotonicity(report: &SelftestReport) -> Outcome {
    let mono = report.suite("refinement monotonicity").unwrap();
    let decomp = report.suite("decomposition identity").unwrap();
    outcome(
        mono.ok() && decomp.ok() && mono.total >= 1000,
        format!("{mono}, {decomp}"),
    )
}

fn main() {
    let seed = match resolve_seed(None) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let report = run_selftest(seed, 1000);
    let criteria: Vec<(&str, Check)> = vec![
        ("oracle equivalence", Box::new(|| oracle_equivalence(seed))),
        ("built-in case rules", Box::new(builtin_case_rules)),
        ("case count", Box::new(case_count)),
        ("admissible profiles, both directions", Box::new(profile_characterisation)),
        ("counting", Box::new(counting)),
        ("algebraic laws", Box::new(|| laws(&report))),
        ("grading", Box::new(grading)),
        ("refinement monotonicity", Box::new(|| monotonicity(&report))),
    ];
    println!("acceptance (seed {seed})");
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failures += usize::from(!o.pass);
        println!("{} {}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
