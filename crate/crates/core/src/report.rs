//! Full analysis of one instance, as JSON or as a labelled text table.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::commutant::{
    commutant_description, commutant_difference, sep_set, CommutantError, SubalgebraView,
};
use crate::crossed::{is_strongly_graded, GradingVerdict};
use crate::dynamics::cycle_classes;
use crate::enumerate::CaseSignature;
use crate::instance::Instance;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub flavor: String,
    pub window: i64,
    pub base_labels: Vec<String>,
    pub labels: Vec<String>,
    /// `C_k` of the base map, as base pieces.
    pub classes: BTreeMap<usize, Vec<usize>>,
    /// `C~_{kl}` keyed `"k,l"`, as refined pieces.
    pub tilde_classes: BTreeMap<String, Vec<usize>>,
    pub rule: Vec<String>,
    /// `Sep^n` of the base algebra, as base pieces.
    pub base_sep: BTreeMap<i64, Vec<usize>>,
    /// `Sep^n` of the refined algebra.
    pub sep: BTreeMap<i64, Vec<usize>>,
    /// Pieces where a degree-`n` coefficient of a commutant element may live.
    pub allowed: BTreeMap<i64, Vec<usize>>,
    /// Pieces allowed for the base commutant but not the refined one.
    pub difference: BTreeMap<i64, Vec<usize>>,
    pub signature: CaseSignature,
    pub grading: GradingVerdict,
}

fn window_table(window: i64, f: impl Fn(i64) -> Result<BTreeSet<usize>, CommutantError>) -> Result<BTreeMap<i64, Vec<usize>>, CommutantError> {
    (-window..=window)
        .map(|n| Ok((n, f(n)?.into_iter().collect())))
        .collect()
}

pub fn build_report(instance: &Instance, window: i64) -> Result<Report, CommutantError> {
    let refinement = &instance.refinement;
    let base = refinement.base();
    let refined = refinement.refined();
    let diff = commutant_difference(refinement, &instance.base_map, &instance.refined_map)?;
    let base_view = SubalgebraView::full(base);
    let fine_view = SubalgebraView::full(refined);
    let fine = commutant_description(&fine_view, &instance.refined_map)?;

    let classes: BTreeMap<usize, Vec<usize>> = cycle_classes(&instance.base_map)
        .classes
        .into_iter()
        .map(|(k, set)| (k, set.into_iter().collect()))
        .collect();
    let tilde_classes = diff
        .tilde
        .tilde_classes
        .iter()
        .map(|(&(k, l), set)| (format!("{k},{l}"), set.iter().copied().collect()))
        .collect();

    let mut rule = vec!["Sep^n is the union of the classes C_k with k ∤ n".to_string()];
    for (k, pieces) in &classes {
        rule.push(format!(
            "C_{k} = {}: separated iff {k} ∤ n, commutant coefficients allowed iff {k} | n",
            base.render_ids(pieces)
        ));
    }
    for (&(k, l), pieces) in &diff.entries {
        rule.push(format!(
            "C~_{{{k},{l}}} = {}: additionally separated iff {k} | n and {l} ∤ n/{k}",
            refined.render_ids(pieces)
        ));
    }

    Ok(Report {
        flavor: if base.is_real_line() { "real_line" } else { "abstract" }.to_string(),
        window,
        base_labels: base.pieces().iter().map(|p| p.label.clone()).collect(),
        labels: refined.pieces().iter().map(|p| p.label.clone()).collect(),
        classes,
        tilde_classes,
        rule,
        base_sep: window_table(window, |n| sep_set(&base_view, &instance.base_map, n))?,
        sep: window_table(window, |n| sep_set(&fine_view, &instance.refined_map, n))?,
        allowed: window_table(window, |n| Ok(fine.allowed(n)))?,
        difference: window_table(window, |n| Ok(diff.at(n)))?,
        signature: CaseSignature::from_classes(&diff.tilde),
        grading: is_strongly_graded(&fine, &instance.refined_map, window)?,
    })
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(text: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(text)
    }

    fn render(labels: &[String], ids: &[usize]) -> String {
        let names: Vec<&str> = ids.iter().map(|&i| labels[i].as_str()).collect();
        format!("{{{}}}", names.join(", "))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "pieces ({}): {}", self.flavor, self.labels.join(" "));
        if self.base_labels != self.labels {
            let _ = writeln!(out, "base pieces: {}", self.base_labels.join(" "));
        }
        let _ = writeln!(out, "\ncycle classes");
        for (k, ids) in &self.classes {
            let _ = writeln!(out, "  C_{k} = {}", Self::render(&self.base_labels, ids));
        }
        for (key, ids) in &self.tilde_classes {
            let _ = writeln!(out, "  C~_{{{key}}} = {}", Self::render(&self.labels, ids));
        }
        let _ = writeln!(out, "\nrule");
        for line in &self.rule {
            let _ = writeln!(out, "  {line}");
        }
        let _ = writeln!(out, "\n{:>4}  {:<28} {:<28} {:<28} forbidden by refinement", "n", "Sep^n (base)", "Sep^n", "allowed(n)");
        for n in -self.window..=self.window {
            let _ = writeln!(
                out,
                "{n:>4}  {:<28} {:<28} {:<28} {}",
                Self::render(&self.base_labels, &self.base_sep[&n]),
                Self::render(&self.labels, &self.sep[&n]),
                Self::render(&self.labels, &self.allowed[&n]),
                Self::render(&self.labels, &self.difference[&n]),
            );
        }
        let _ = writeln!(out, "\nsignature: {}", self.signature);
        let _ = writeln!(out, "grading: {}", self.grading);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::PieceMap;
    use crate::fixtures::builtin_case;
    use crate::partition::build_real_line_partition;
    use crate::rational::int;

    #[test]
    fn three_cycle_table() {
        let f = builtin_case("one-interval-three-cycle").unwrap();
        let r = build_report(&f.instance, 3).unwrap();
        let cycle = vec![1, 2, 3];
        assert!(cycle.iter().all(|p| r.sep[&1].contains(p)));
        assert!(cycle.iter().all(|p| !r.sep[&3].contains(p)));
        assert_eq!(r.difference[&1], cycle);
        assert!(r.difference[&3].is_empty());
        assert!(r.to_text().contains("C~_{1,3} = {I_1^1, I_1^2, I_1^3}"));
    }

    #[test]
    fn identity_allows_everything() {
        let p = build_real_line_partition(vec![int(0)]).unwrap();
        let inst = Instance::unrefined(&p, PieceMap::identity(3));
        let r = build_report(&inst, 2).unwrap();
        assert!(r.allowed.values().all(|ids| ids.len() == 3));
        assert!(r.sep.values().all(Vec::is_empty));
        assert!(r.grading.is_strong());
    }

    #[test]
    fn swap_is_not_strongly_graded() {
        let p = build_real_line_partition(vec![int(0), int(1)]).unwrap();
        let inst = Instance::unrefined(&p, PieceMap::from_cycles(5, &[&[0, 2], &[3, 4]]).unwrap());
        let r = build_report(&inst, 3).unwrap();
        assert_eq!(r.grading.witness(), Some((1, 1)));
    }

    #[test]
    fn json_round_trip() {
        let f = builtin_case("two-intervals-four-cycle").unwrap();
        let r = build_report(&f.instance, 4).unwrap();
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    }
}
