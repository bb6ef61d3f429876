//! Integrity checks for exported cubes: every observation belongs to exactly
//! one dataset with a structure, has exactly one value per dimension and a
//! value for each measure, and no two observations share a dimension key.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::vocab;
use super::{CubeGraph, Term};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: String,
    pub node: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CubeCheckReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl CubeCheckReport {
    pub fn has_code(&self, code: &str) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }
}

fn node(term: &Term) -> String {
    match term {
        Term::Iri(iri) => iri.clone(),
        Term::Blank(label) => format!("_:{label}"),
        Term::Literal(lit) => lit.lexical.clone(),
    }
}

struct Structure {
    dimensions: BTreeSet<String>,
    measures: BTreeSet<String>,
}

fn component_properties(graph: &CubeGraph, dsd: &Term, kind: &str) -> BTreeSet<String> {
    graph
        .objects(dsd, vocab::QB_COMPONENT)
        .flat_map(|spec| graph.objects(spec, kind))
        .filter_map(|p| p.as_iri().map(str::to_owned))
        .collect()
}

fn declared(graph: &CubeGraph, class: &str) -> BTreeSet<String> {
    graph
        .subjects_of_type(class)
        .filter_map(|p| p.as_iri().map(str::to_owned))
        .collect()
}

fn structure_of(graph: &CubeGraph, dataset: &Term) -> Option<Structure> {
    let dsd = graph.objects(dataset, vocab::QB_STRUCTURE).next()?;
    let mut dimensions = component_properties(graph, dsd, vocab::QB_DIMENSION);
    let mut measures = component_properties(graph, dsd, vocab::QB_MEASURE);
    if dimensions.is_empty() {
        dimensions = declared(graph, vocab::QB_DIMENSION_PROPERTY);
    }
    if measures.is_empty() {
        measures = declared(graph, vocab::QB_MEASURE_PROPERTY);
    }
    Some(Structure { dimensions, measures })
}

/// Checks observation-level integrity of a cube graph.
pub fn check_cube(graph: &CubeGraph) -> CubeCheckReport {
    let mut violations = Vec::new();
    let mut push = |code: &str, node: String, message: String| {
        violations.push(Violation {
            code: code.to_owned(),
            node,
            message,
        })
    };

    let observations: BTreeSet<&Term> = graph.subjects_of_type(vocab::QB_OBSERVATION).collect();
    let mut structures: BTreeMap<&Term, Option<Structure>> = BTreeMap::new();
    let mut keys: BTreeMap<(&Term, Vec<&Term>), &Term> = BTreeMap::new();

    for obs in observations {
        let datasets: Vec<&Term> = graph.objects(obs, vocab::QB_DATA_SET).collect();
        let [dataset] = datasets[..] else {
            push(
                "dataset-link",
                node(obs),
                format!("observation has {} qb:dataSet links, expected 1", datasets.len()),
            );
            continue;
        };
        let structure = structures
            .entry(dataset)
            .or_insert_with(|| structure_of(graph, dataset));
        let Some(structure) = structure else {
            push(
                "missing-structure",
                node(dataset),
                "dataset has no qb:structure".to_owned(),
            );
            continue;
        };

        let mut key = Vec::with_capacity(structure.dimensions.len());
        let mut complete = true;
        for dim in &structure.dimensions {
            let values: Vec<&Term> = graph.objects(obs, dim).collect();
            match values[..] {
                [] => {
                    complete = false;
                    push("missing-dimension", node(obs), format!("no value for dimension <{dim}>"));
                }
                [value] => key.push(value),
                _ => {
                    complete = false;
                    push(
                        "multiple-dimension-values",
                        node(obs),
                        format!("{} values for dimension <{dim}>", values.len()),
                    );
                }
            }
        }
        for measure in &structure.measures {
            if graph.objects(obs, measure).next().is_none() {
                push("missing-measure", node(obs), format!("no value for measure <{measure}>"));
            }
        }
        if complete {
            if let Some(first) = keys.insert((dataset, key), obs) {
                push(
                    "duplicate-key",
                    node(obs),
                    format!("same dimension values as {}", node(first)),
                );
            }
        }
    }

    CubeCheckReport {
        ok: violations.is_empty(),
        violations,
    }
}
