//! The worked two-point cases as ready-made instances, each paired with the
//! divisibility rules its extra separation set is expected to follow.
//!
//! One-interval cases sit on a base with jump points 0 and 10 whose outer
//! intervals and jump points are swapped, points 3 and 7 added to the fixed
//! middle interval. Two-interval cases add -5 to `I_0` and 15 to `I_2`.

use std::collections::{BTreeMap, BTreeSet};

use crate::commutant::{refined_sep, sep_set, CommutantError, SubalgebraView};
use crate::dynamics::PieceMap;
use crate::instance::Instance;
use crate::partition::{build_real_line_partition, refine_real_line, Refinement};
use crate::rational::int;

/// Refined pieces (by label) that join the separation set exactly at the
/// degrees `n` with `modulus ∤ n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedRule {
    pub labels: Vec<&'static str>,
    pub modulus: i64,
}

impl ExpectedRule {
    pub fn applies(&self, n: i64) -> bool {
        n % self.modulus != 0
    }

    pub fn describe(&self) -> String {
        let when = if self.modulus == 2 {
            "n is odd".to_string()
        } else {
            format!("{}∤n", self.modulus)
        };
        format!("{{{}}} if {when}", self.labels.join(", "))
    }
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub summary: &'static str,
    pub instance: Instance,
    pub rules: Vec<ExpectedRule>,
}

impl Fixture {
    fn ids(&self, labels: &[&str]) -> BTreeSet<usize> {
        let refined = self.instance.refinement.refined();
        labels
            .iter()
            .map(|l| {
                (0..refined.len())
                    .find(|&id| refined.label(id) == *l)
                    .unwrap_or_else(|| panic!("fixture {} has no piece {l}", self.name))
            })
            .collect()
    }

    /// Coarse separation set pulled back to refined pieces, plus every rule
    /// that fires at `n`.
    pub fn expected_sep(&self, n: i64) -> Result<BTreeSet<usize>, CommutantError> {
        let coarse = sep_set(
            &SubalgebraView::full(self.instance.refinement.base()),
            &self.instance.base_map,
            n,
        )?;
        let parent_of = self.instance.refinement.parent_of();
        let mut out: BTreeSet<usize> = (0..parent_of.len())
            .filter(|r| coarse.contains(&parent_of[*r]))
            .collect();
        for rule in self.rules.iter().filter(|r| r.applies(n)) {
            out.extend(self.ids(&rule.labels));
        }
        Ok(out)
    }

    /// Degrees in `-window..=window` where the computed refined separation
    /// set differs from the expected one.
    pub fn mismatches(&self, window: i64) -> Result<Vec<i64>, CommutantError> {
        let mut bad = Vec::new();
        for n in -window..=window {
            let got = refined_sep(
                &self.instance.refinement,
                &self.instance.base_map,
                &self.instance.refined_map,
                n,
            )?;
            if got != self.expected_sep(n)? {
                bad.push(n);
            }
        }
        Ok(bad)
    }
}

fn one_interval_refinement() -> Refinement {
    let base = build_real_line_partition(vec![int(0), int(10)]).expect("fixed base");
    refine_real_line(&base, &BTreeMap::from([(1, vec![int(3), int(7)])])).expect("fixed refinement")
}

fn two_interval_refinement() -> Refinement {
    let base = build_real_line_partition(vec![int(0), int(10)]).expect("fixed base");
    refine_real_line(&base, &BTreeMap::from([(0, vec![int(-5)]), (2, vec![int(15)])]))
        .expect("fixed refinement")
}

fn map(len: usize, cycles: &[&[usize]]) -> PieceMap {
    PieceMap::from_cycles(len, cycles).expect("fixture cycles are disjoint")
}

fn rule(labels: &[&'static str], modulus: i64) -> ExpectedRule {
    ExpectedRule {
        labels: labels.to_vec(),
        modulus,
    }
}

// One-interval ids: 0 I_0, 1-3 I_1^1..I_1^3, 4 I_2, 5 {t_1}, 6 {s_1}, 7 {s_2}, 8 {t_2}.
fn one_interval(name: &'static str, summary: &'static str, extra: &[&[usize]], rules: Vec<ExpectedRule>) -> Fixture {
    let mut cycles: Vec<&[usize]> = vec![&[0, 4], &[5, 8]];
    cycles.extend_from_slice(extra);
    Fixture {
        name,
        summary,
        instance: Instance {
            refinement: one_interval_refinement(),
            base_map: map(5, &[&[0, 2], &[3, 4]]),
            refined_map: map(9, &cycles),
        },
        rules,
    }
}

// Two-interval ids: 0 I_0^1, 1 I_0^2, 2 I_1, 3 I_2^1, 4 I_2^2, 5 {s_1}, 6 {t_1}, 7 {t_2}, 8 {s_2}.
fn two_intervals(
    name: &'static str,
    summary: &'static str,
    base: &[&[usize]],
    refined: &[&[usize]],
    rules: Vec<ExpectedRule>,
) -> Fixture {
    Fixture {
        name,
        summary,
        instance: Instance {
            refinement: two_interval_refinement(),
            base_map: map(5, base),
            refined_map: map(9, refined),
        },
        rules,
    }
}

pub fn builtin_cases() -> Vec<Fixture> {
    vec![
        one_interval("one-interval-fixed", "every new piece fixed", &[], vec![]),
        one_interval(
            "one-interval-subinterval-swap",
            "I_1^1 and I_1^2 swapped",
            &[&[1, 2]],
            vec![rule(&["I_1^1", "I_1^2"], 2)],
        ),
        one_interval(
            "one-interval-point-swap",
            "{s_1} and {s_2} swapped",
            &[&[6, 7]],
            vec![rule(&["{s_1}", "{s_2}"], 2)],
        ),
        one_interval(
            "one-interval-three-cycle",
            "I_1^1 -> I_1^2 -> I_1^3 -> I_1^1",
            &[&[1, 2, 3]],
            vec![rule(&["I_1^1", "I_1^2", "I_1^3"], 3)],
        ),
        one_interval(
            "one-interval-three-cycle-point-swap",
            "subintervals in a 3-cycle, added points swapped",
            &[&[1, 2, 3], &[6, 7]],
            vec![
                rule(&["I_1^1", "I_1^2", "I_1^3"], 3),
                rule(&["{s_1}", "{s_2}"], 2),
            ],
        ),
        two_intervals(
            "two-intervals-fixed",
            "added points and subintervals fixed",
            &[&[3, 4]],
            &[&[6, 7]],
            vec![],
        ),
        two_intervals(
            "two-intervals-one-swap",
            "subintervals of I_0 swapped, the rest fixed",
            &[&[3, 4]],
            &[&[6, 7], &[0, 1]],
            vec![rule(&["I_0^1", "I_0^2"], 2)],
        ),
        two_intervals(
            "two-intervals-exchanged",
            "I_0 and I_2 exchanged child for child",
            &[&[0, 2]],
            &[&[0, 3], &[1, 4], &[5, 8]],
            vec![],
        ),
        two_intervals(
            "two-intervals-four-cycle",
            "I_0^1 -> I_2^1 -> I_0^2 -> I_2^2 -> I_0^1",
            &[&[0, 2]],
            &[&[0, 3, 1, 4], &[5, 8]],
            vec![rule(&["I_0^1", "I_0^2", "I_2^1", "I_2^2"], 4)],
        ),
    ]
}

pub fn builtin_case(name: &str) -> Option<Fixture> {
    builtin_cases().into_iter().find(|f| f.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_is_a_valid_lift() {
        for f in builtin_cases() {
            assert!(f.instance.validate().is_ok(), "{}: {}", f.name, f.instance.validate());
        }
    }

    #[test]
    fn every_fixture_matches_its_rules() {
        for f in builtin_cases() {
            assert_eq!(f.mismatches(12).unwrap(), Vec::<i64>::new(), "{}", f.name);
        }
    }

    #[test]
    fn a_wrong_rule_is_detected() {
        let mut f = builtin_case("one-interval-three-cycle").unwrap();
        f.rules[0].modulus = 2;
        assert!(!f.mismatches(6).unwrap().is_empty());
    }

    #[test]
    fn rule_descriptions() {
        assert_eq!(rule(&["I_1^1", "I_1^2"], 2).describe(), "{I_1^1, I_1^2} if n is odd");
        assert_eq!(rule(&["a"], 3).describe(), "{a} if 3∤n");
    }
}
