//! Concrete instances (a refinement with a base map and a lifted map) and
//! the JSON file format they are loaded from.
//!
//! ```json
//! {
//!   "type": "real_line",
//!   "jump_points": ["0", "10"],
//!   "additions": {"1": ["3", "7"]},
//!   "base_perm": [0, 1, 2, 3, 4],
//!   "refined_perm": [0, 2, 1, 3, 4, 5, 6, 7, 8],
//!   "window": 6
//! }
//! ```
//!
//! Abstract instances use `"type": "abstract"`, `"pieces": <count>` and
//! `"cells": {"<piece-id>": <count>}` instead of jump points and additions.
//! An unrefined instance may give a single `"perm"`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{validate_invariance, validate_refined_invariance, InvarianceReport, PieceMap};
use crate::partition::{
    build_abstract_partition, build_real_line_partition, refine_abstract, refine_real_line,
    Partition, PartitionError, Refinement,
};
use crate::rational::{format_rational, parse_rational, ParseRationalError};

pub const DEFAULT_WINDOW: i64 = 6;

/// A refinement together with a base dynamics and its lift. An unrefined
/// system is the identity refinement with equal maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub refinement: Refinement,
    pub base_map: PieceMap,
    pub refined_map: PieceMap,
}

impl Instance {
    pub fn unrefined(partition: &Partition, map: PieceMap) -> Instance {
        Instance {
            refinement: Refinement::identity(partition),
            base_map: map.clone(),
            refined_map: map,
        }
    }

    pub fn validate(&self) -> InvarianceReport {
        if self.refinement.is_identity() && self.base_map == self.refined_map {
            return validate_invariance(self.refinement.base(), &self.base_map);
        }
        validate_refined_invariance(&self.refinement, &self.base_map, &self.refined_map)
    }

    /// Total order used to pick canonical representatives.
    pub fn order_key(&self) -> (usize, Vec<usize>, Vec<usize>, Vec<usize>) {
        (
            self.refinement.refined().len(),
            self.refinement.parent_of().to_vec(),
            self.base_map.as_slice().to_vec(),
            self.refined_map.as_slice().to_vec(),
        )
    }

    pub fn to_file(&self, window: Option<i64>) -> InstanceFile {
        let base = self.refinement.base();
        let refined = !self.refinement.is_identity() || self.base_map != self.refined_map;
        let mut file = InstanceFile {
            kind: if base.is_real_line() {
                FlavorTag::RealLine
            } else {
                FlavorTag::Abstract
            },
            jump_points: base
                .jump_points()
                .map(|pts| pts.iter().map(format_rational).collect()),
            additions: None,
            pieces: (!base.is_real_line()).then_some(base.len()),
            cells: None,
            perm: None,
            base_perm: None,
            refined_perm: None,
            window,
        };
        if !refined {
            file.perm = Some(self.base_map.as_slice().to_vec());
            return file;
        }
        if base.is_real_line() {
            file.additions = Some(
                self.refinement
                    .added_points()
                    .iter()
                    .map(|(id, pts)| (id.to_string(), pts.iter().map(format_rational).collect()))
                    .collect(),
            );
        } else {
            let table = self.refinement.child_table();
            file.cells = Some(
                table
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.len() > 1)
                    .map(|(id, c)| (id.to_string(), c.len()))
                    .collect(),
            );
        }
        file.base_perm = Some(self.base_map.as_slice().to_vec());
        file.refined_perm = Some(self.refined_map.as_slice().to_vec());
        file
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlavorTag {
    RealLine,
    Abstract,
}

/// Raw, unvalidated contents of an instance file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(rename = "type")]
    pub kind: FlavorTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jump_points: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub additions: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pieces: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<BTreeMap<String, usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perm: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_perm: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refined_perm: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<i64>,
}

/// One problem found while turning a file into an [`Instance`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}", render_field_errors(.0))]
    Fields(Vec<FieldError>),
}

fn render_field_errors(errors: &[FieldError]) -> String {
    errors
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("\n")
}

/// A map that is either a bijection or a description of why not; an
/// ill-formed permutation is a domain violation, not an input error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadedMap {
    Valid(PieceMap),
    NotBijective { field: &'static str, message: String },
}

/// Result of loading: the instance, or the partition data with a broken
/// permutation that validation should report.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub refinement: Refinement,
    pub base_map: LoadedMap,
    pub refined_map: LoadedMap,
    pub window: i64,
}

impl Loaded {
    pub fn instance(&self) -> Option<Instance> {
        match (&self.base_map, &self.refined_map) {
            (LoadedMap::Valid(b), LoadedMap::Valid(r)) => Some(Instance {
                refinement: self.refinement.clone(),
                base_map: b.clone(),
                refined_map: r.clone(),
            }),
            _ => None,
        }
    }

    pub fn map_errors(&self) -> Vec<String> {
        [&self.base_map, &self.refined_map]
            .into_iter()
            .filter_map(|m| match m {
                LoadedMap::Valid(_) => None,
                LoadedMap::NotBijective { field, message } => Some(format!("{field}: {message}")),
            })
            .collect()
    }
}

fn field_error(field: impl Into<String>, message: impl ToString) -> FieldError {
    FieldError {
        field: field.into(),
        message: message.to_string(),
    }
}

fn parse_points(field: &str, raw: &[String], errors: &mut Vec<FieldError>) -> Vec<crate::rational::Rational> {
    raw.iter()
        .enumerate()
        .filter_map(|(i, text)| {
            parse_rational(text)
                .map_err(|e: ParseRationalError| errors.push(field_error(format!("{field}[{i}]"), e)))
                .ok()
        })
        .collect()
}

fn parse_key(field: &str, key: &str, errors: &mut Vec<FieldError>) -> Option<usize> {
    key.parse()
        .map_err(|_| errors.push(field_error(format!("{field}.{key}"), "key is not a piece id")))
        .ok()
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<InstanceFile, LoadError> {
        serde_json::from_str(text).map_err(|e| LoadError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn read(path: &std::path::Path) -> Result<InstanceFile, LoadError> {
        let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        InstanceFile::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize")
    }

    /// Builds the partitions, collecting every field-level problem.
    pub fn load(&self) -> Result<Loaded, LoadError> {
        let mut errors = Vec::new();
        let base = match self.kind {
            FlavorTag::RealLine => {
                if self.pieces.is_some() || self.cells.is_some() {
                    errors.push(field_error("type", "real_line instances take jump_points/additions, not pieces/cells"));
                }
                let points = parse_points("jump_points", self.jump_points.as_deref().unwrap_or(&[]), &mut errors);
                build_real_line_partition(points)
                    .map_err(|e| errors.push(field_error("jump_points", e)))
                    .ok()
            }
            FlavorTag::Abstract => {
                if self.jump_points.is_some() || self.additions.is_some() {
                    errors.push(field_error("type", "abstract instances take pieces/cells, not jump_points/additions"));
                }
                match self.pieces {
                    Some(n) => build_abstract_partition(n)
                        .map_err(|e| errors.push(field_error("pieces", e)))
                        .ok(),
                    None => {
                        errors.push(field_error("pieces", "missing piece count"));
                        None
                    }
                }
            }
        };

        let refinement = base.as_ref().and_then(|base| {
            let result: Result<Refinement, PartitionError> = match self.kind {
                FlavorTag::RealLine => {
                    let mut additions = BTreeMap::new();
                    for (key, pts) in self.additions.iter().flatten() {
                        if let Some(id) = parse_key("additions", key, &mut errors) {
                            additions.insert(id, parse_points(&format!("additions.{key}"), pts, &mut errors));
                        }
                    }
                    refine_real_line(base, &additions)
                }
                FlavorTag::Abstract => {
                    let mut cells = BTreeMap::new();
                    for (key, &count) in self.cells.iter().flatten() {
                        if let Some(id) = parse_key("cells", key, &mut errors) {
                            cells.insert(id, count);
                        }
                    }
                    refine_abstract(base, &cells)
                }
            };
            let field = if self.kind == FlavorTag::RealLine { "additions" } else { "cells" };
            result.map_err(|e| errors.push(field_error(field, e))).ok()
        });

        let window = self.window.unwrap_or(DEFAULT_WINDOW);
        if window < 1 {
            errors.push(field_error("window", "must be at least 1"));
        }
        let refined_given = self.base_perm.is_some() || self.refined_perm.is_some();
        let (base_perm, refined_perm) = match (&self.perm, refined_given) {
            (Some(_), true) => {
                errors.push(field_error("perm", "give either perm or base_perm/refined_perm"));
                (None, None)
            }
            (Some(perm), false) => (Some(perm.clone()), Some(perm.clone())),
            (None, _) => {
                if self.base_perm.is_none() {
                    errors.push(field_error("base_perm", "missing"));
                }
                if self.refined_perm.is_none() {
                    errors.push(field_error("refined_perm", "missing"));
                }
                (self.base_perm.clone(), self.refined_perm.clone())
            }
        };
        if let Some(r) = &refinement {
            if self.perm.is_some() && !r.is_identity() {
                errors.push(field_error("perm", "a refined instance needs base_perm and refined_perm"));
            }
        }

        match (refinement, base_perm, refined_perm) {
            (Some(refinement), Some(b), Some(r)) if errors.is_empty() => {
                let as_map = |field: &'static str, perm: Vec<usize>| match PieceMap::new(perm) {
                    Ok(m) => LoadedMap::Valid(m),
                    Err(e) => LoadedMap::NotBijective {
                        field,
                        message: e.to_string(),
                    },
                };
                Ok(Loaded {
                    refinement,
                    base_map: as_map("base_perm", b),
                    refined_map: as_map("refined_perm", r),
                    window,
                })
            }
            _ => Err(LoadError::Fields(errors)),
        }
    }
}
