//! Randomized oracle-equivalence and algebraic-law suites over seeded
//! random systems.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::commutant::{
    brute_force_sep, commutant_description, commutant_difference, commutes_with_sample,
    find_noncommuting_witness, is_in_commutant, refined_sep, sep_set, CommutantDescription,
    CommutantError, SubalgebraView,
};
use crate::crossed::{multiply, sigma_tilde_pow, CoefficientVector, CrossedElement};
use crate::dynamics::{PieceMap, RefinedCycleClassification};
use crate::enumerate::CaseSignature;
use crate::random::{random_lift, random_system, RandomConfig, RandomSystem};
use crate::rational::{ratio, Rational};

pub const SEED_ENV: &str = "CROSSED_COMMUTANT_SEED";
pub const DEFAULT_SEED: u64 = 2024;
pub const DEFAULT_ITERATIONS: usize = 1000;
pub const SEP_WINDOW: i64 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: usize,
    pub total: usize,
    pub counterexample: Option<String>,
}

impl SuiteResult {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}/{}", self.name, self.passed, self.total)?;
        if let Some(c) = &self.counterexample {
            write!(f, "\n  first counterexample: {c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub iterations: usize,
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn ok(&self) -> bool {
        self.suites.iter().all(SuiteResult::ok)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {} iterations {}", self.seed, self.iterations)?;
        for suite in &self.suites {
            writeln!(f, "{suite}")?;
        }
        write!(f, "{}", if self.ok() { "all suites passed" } else { "FAILED" })
    }
}

/// The seed to use: the environment variable wins over the flag.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, String> {
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| format!("{SEED_ENV}={text:?} is not an unsigned integer")),
        Err(_) => Ok(flag.unwrap_or(DEFAULT_SEED)),
    }
}

/// The random systems the suites draw, in order, for a given seed.
pub fn instance_stream(seed: u64, count: usize) -> Vec<RandomSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_system(RandomConfig::default(), &mut rng)).collect()
}

fn small_rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    ratio(rng.random_range(-9..=9), rng.random_range(1..=4))
}

fn random_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> CoefficientVector {
    CoefficientVector::new((0..len).map(|_| small_rational(rng)).collect())
}

/// Random element with up to three terms of degree in `-3..=3`.
pub fn random_element<R: Rng + ?Sized>(pieces: usize, rng: &mut R) -> CrossedElement {
    let mut out = CrossedElement::zero(pieces);
    for _ in 0..rng.random_range(1..=3) {
        let term = CrossedElement::monomial(rng.random_range(-3..=3), random_vector(pieces, rng));
        out = out.add(&term).expect("same length");
    }
    out
}

/// Random element of the commutant: each term supported where allowed.
pub fn random_member<R: Rng + ?Sized>(desc: &CommutantDescription, rng: &mut R) -> CrossedElement {
    let pieces = desc.ambient_len();
    let mut out = CrossedElement::zero(pieces);
    for _ in 0..rng.random_range(1..=3) {
        let degree = rng.random_range(-6..=6);
        let allowed = desc.allowed(degree);
        let coeff = CoefficientVector::new(
            (0..pieces)
                .map(|p| if allowed.contains(&p) { small_rational(rng) } else { ratio(0, 1) })
                .collect(),
        );
        out = out.add(&CrossedElement::monomial(degree, coeff)).expect("same length");
    }
    out
}

/// A commutant member plus one term on a forbidden `(degree, piece)`, or
/// `None` when the commutant allows every piece at every tried degree.
pub fn random_non_member<R: Rng + ?Sized>(desc: &CommutantDescription, rng: &mut R) -> Option<CrossedElement> {
    let pieces = desc.ambient_len();
    let forbidden: Vec<(i64, usize)> = (-6..=6)
        .flat_map(|n| {
            let allowed = desc.allowed(n);
            (0..pieces).filter(move |p| !allowed.contains(p)).map(move |p| (n, p))
        })
        .collect();
    if forbidden.is_empty() {
        return None;
    }
    let (degree, piece) = forbidden[rng.random_range(0..forbidden.len())];
    let mut value = small_rational(rng);
    if value == ratio(0, 1) {
        value = ratio(1, 1);
    }
    let mut coeff = vec![ratio(0, 1); pieces];
    coeff[piece] = value;
    let bad = CrossedElement::monomial(degree, CoefficientVector::new(coeff));
    Some(random_member(desc, rng).add(&bad).expect("same length"))
}

struct Tally {
    name: &'static str,
    passed: usize,
    total: usize,
    counterexample: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Tally {
        Tally {
            name,
            passed: 0,
            total: 0,
            counterexample: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.total += 1;
        if ok {
            self.passed += 1;
        } else if self.counterexample.is_none() {
            self.counterexample = Some(describe());
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name.to_string(),
            passed: self.passed,
            total: self.total,
            counterexample: self.counterexample,
        }
    }
}

fn describe(sys: &RandomSystem) -> String {
    format!(
        "{} pieces {:?}, {} refinement step(s), map {}",
        sys.finest().len(),
        sys.finest().pieces().iter().map(|p| p.label.as_str()).collect::<Vec<_>>(),
        sys.steps.len(),
        sys.finest_map()
    )
}

fn suite_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// `Sep^n` by the divisibility rule against the generator scan, every view.
pub fn sep_oracle_suite(systems: &[RandomSystem]) -> SuiteResult {
    let mut t = Tally::new("sep formula = oracle");
    for sys in systems {
        let mut failure = None;
        'views: for view in sys.views() {
            for n in -SEP_WINDOW..=SEP_WINDOW {
                let fast = sep_set(&view, sys.finest_map(), n);
                let slow = brute_force_sep(&view, sys.finest_map(), n);
                if fast.is_err() || fast != slow {
                    failure = Some(format!("n={n}: rule {fast:?} vs generators {slow:?}"));
                    break 'views;
                }
            }
        }
        t.record(failure.is_none(), || format!("{}; {}", describe(sys), failure.unwrap_or_default()));
    }
    t.finish()
}

fn refinement_checks(sys: &RandomSystem) -> Result<(bool, bool, bool), CommutantError> {
    let inst = sys.last_step();
    let coarse = SubalgebraView::coarse_in_refined(&inst.refinement);
    let fine = SubalgebraView::full(inst.refinement.refined());
    let diff = commutant_difference(&inst.refinement, &inst.base_map, &inst.refined_map)?;
    let (mut mono, mut decomp, mut assembled) = (true, true, true);
    for n in -SEP_WINDOW..=SEP_WINDOW {
        let s_coarse = sep_set(&coarse, &inst.refined_map, n)?;
        let s_fine = sep_set(&fine, &inst.refined_map, n)?;
        mono &= s_coarse.is_subset(&s_fine);
        let union: BTreeSet<usize> = s_coarse.union(&diff.at(n)).copied().collect();
        decomp &= union == s_fine;
        assembled &= refined_sep(&inst.refinement, &inst.base_map, &inst.refined_map, n)? == s_fine;
    }
    Ok((mono, decomp, assembled))
}

/// Coarse `Sep^n ⊆` refined `Sep^n`, the decomposition of the refined set
/// into coarse set plus commutant difference, and the assembled refined set.
pub fn refinement_suites(systems: &[RandomSystem]) -> Vec<SuiteResult> {
    let mut mono = Tally::new("refinement monotonicity");
    let mut decomp = Tally::new("decomposition identity");
    let mut assembled = Tally::new("refined sep formula = sep");
    for sys in systems {
        match refinement_checks(sys) {
            Ok((a, b, c)) => {
                mono.record(a, || describe(sys));
                decomp.record(b, || describe(sys));
                assembled.record(c, || describe(sys));
            }
            Err(e) => {
                for t in [&mut mono, &mut decomp, &mut assembled] {
                    t.record(false, || format!("{}; {e}", describe(sys)));
                }
            }
        }
    }
    vec![mono.finish(), decomp.finish(), assembled.finish()]
}

pub fn algebra_suites(systems: &[RandomSystem], rng: &mut ChaCha8Rng) -> Vec<SuiteResult> {
    let mut assoc = Tally::new("associativity");
    let mut bilinear = Tally::new("bilinearity");
    let mut action = Tally::new("group action");
    for sys in systems {
        let map = sys.finest_map();
        let len = map.len();
        let (f, g, h) = (random_element(len, rng), random_element(len, rng), random_element(len, rng));
        let c = small_rational(rng);
        let mul = |a: &CrossedElement, b: &CrossedElement| multiply(a, b, map).expect("same length");

        let ok = mul(&mul(&f, &g), &h) == mul(&f, &mul(&g, &h));
        assoc.record(ok, || format!("{}; f={f:?} g={g:?} h={h:?}", describe(sys)));

        let gh = g.add(&h).expect("same length");
        let ok = mul(&f, &gh) == mul(&f, &g).add(&mul(&f, &h)).expect("same length")
            && mul(&gh, &f) == mul(&g, &f).add(&mul(&h, &f)).expect("same length")
            && mul(&f.scale(&c), &g) == mul(&f, &g).scale(&c)
            && mul(&f, &g.scale(&c)) == mul(&f, &g).scale(&c);
        bilinear.record(ok, || format!("{}; f={f:?} g={g:?} h={h:?}", describe(sys)));

        action.record(group_action_holds(map, rng), || describe(sys));
    }
    vec![assoc.finish(), bilinear.finish(), action.finish()]
}

fn group_action_holds(map: &PieceMap, rng: &mut ChaCha8Rng) -> bool {
    let len = map.len();
    let (a, b) = (random_vector(len, rng), random_vector(len, rng));
    let (n, m) = (rng.random_range(-5..=5), rng.random_range(-5..=5));
    let act = |v: &CoefficientVector, k: i64| sigma_tilde_pow(v, map, k).expect("same length");
    let composed = act(&act(&a, m), n) == act(&a, n + m);
    let unit = act(&a, 0) == a;
    let multiplicative = act(&a.mul(&b).expect("same length"), n)
        == act(&a, n).mul(&act(&b, n)).expect("same length");
    let one = CoefficientVector::ones(len);
    let conj = multiply(
        &multiply(&CrossedElement::monomial(n, one.clone()), &CrossedElement::from_function(a.clone()), map)
            .expect("same length"),
        &CrossedElement::monomial(-n, one),
        map,
    )
    .expect("same length");
    let inner = conj == CrossedElement::from_function(act(&a, n));
    composed && unit && multiplicative && inner
}

/// Pairwise commutativity of the commutant of the finest algebra, members
/// commuting with the subalgebra for every view, and a non-commuting
/// generator for every non-member.
pub fn commutant_suites(systems: &[RandomSystem], rng: &mut ChaCha8Rng) -> Vec<SuiteResult> {
    let mut commutative = Tally::new("commutant commutativity");
    let mut centralizes = Tally::new("members commute with subalgebra");
    let mut maximal = Tally::new("maximality witness");
    for sys in systems {
        let map = sys.finest_map();
        let Ok(full) = commutant_description(&SubalgebraView::full(sys.finest()), map) else {
            commutative.record(false, || describe(sys));
            continue;
        };
        let (a, b) = (random_member(&full, rng), random_member(&full, rng));
        let ok = multiply(&a, &b, map).ok() == multiply(&b, &a, map).ok();
        commutative.record(ok, || format!("{}; a={a:?} b={b:?}", describe(sys)));

        for view in sys.views() {
            let Ok(desc) = commutant_description(&view, map) else {
                centralizes.record(false, || describe(sys));
                continue;
            };
            let member = random_member(&desc, rng);
            let ok = commutes_with_sample(&member, &view, map, rng, 3).unwrap_or(false)
                && matches!(find_noncommuting_witness(&member, &view, map), Ok(None));
            centralizes.record(ok, || format!("{}; member {member:?}", describe(sys)));

            if let Some(bad) = random_non_member(&desc, rng) {
                let flagged = matches!(is_in_commutant(&bad, &desc), Ok(m) if !m.is_member());
                let witness = matches!(find_noncommuting_witness(&bad, &view, map), Ok(Some(_)));
                maximal.record(flagged && witness, || format!("{}; non-member {bad:?}", describe(sys)));
            }
        }
    }
    vec![commutative.finish(), centralizes.finish(), maximal.finish()]
}

/// Random lifts pass the validator, and relabelling every piece leaves the
/// case signature unchanged.
pub fn lift_suites(systems: &[RandomSystem], rng: &mut ChaCha8Rng) -> Vec<SuiteResult> {
    let mut valid = Tally::new("lift validity");
    let mut stable = Tally::new("signature relabelling");
    for sys in systems {
        let inst = sys.last_step();
        let lift = random_lift(&inst.refinement, &inst.base_map, rng);
        let ok = lift.as_ref().is_some_and(|m| {
            crate::dynamics::validate_refined_invariance(&inst.refinement, &inst.base_map, m).is_ok()
        });
        valid.record(ok, || describe(sys));

        let ok = match CaseSignature::of(&inst) {
            Ok(sig) => relabelled_signature(&inst, rng) == Some(sig),
            Err(_) => false,
        };
        stable.record(ok, || describe(sys));
    }
    vec![valid.finish(), stable.finish()]
}

fn shuffled(len: usize, rng: &mut ChaCha8Rng) -> PieceMap {
    let mut perm: Vec<usize> = (0..len).collect();
    for i in (1..len).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    PieceMap::new(perm).expect("shuffle of the identity")
}

/// Signature after renaming base pieces by `ρ` and refined pieces by `τ`:
/// maps are conjugated and the parent table transported.
pub fn relabelled_signature(inst: &crate::instance::Instance, rng: &mut ChaCha8Rng) -> Option<CaseSignature> {
    let rho = shuffled(inst.base_map.len(), rng);
    let tau = shuffled(inst.refined_map.len(), rng);
    let conj = |s: &PieceMap, m: &PieceMap| s.compose(m).compose(&s.inverse());
    let mut parent_of = vec![0; tau.len()];
    for (r, &p) in inst.refinement.parent_of().iter().enumerate() {
        parent_of[tau.apply(r)] = rho.apply(p);
    }
    RefinedCycleClassification::from_parts(&parent_of, &conj(&rho, &inst.base_map), &conj(&tau, &inst.refined_map))
        .ok()
        .map(|rcc| CaseSignature::from_classes(&rcc))
}

pub fn run_selftest(seed: u64, iterations: usize) -> SelftestReport {
    let systems = instance_stream(seed, iterations);
    let mut suites = vec![sep_oracle_suite(&systems)];
    suites.extend(refinement_suites(&systems));
    suites.extend(algebra_suites(&systems, &mut suite_rng(seed, 1)));
    suites.extend(commutant_suites(&systems, &mut suite_rng(seed, 2)));
    suites.extend(lift_suites(&systems, &mut suite_rng(seed, 3)));
    SelftestReport {
        seed,
        iterations,
        suites,
    }
}
