//! Compliance score series as an RDF Data Cube.
//!
//! Each organisation gets one dataset whose observations are keyed by month
//! and GDPR section (plus the reserved `overall` section for the total). The
//! single measure is the compliance ratio as an `xsd:decimal`; compliant and
//! applicable counts ride along as attributes. Section codes may carry a
//! `dct:subject` link to a privacy-vocabulary concept taken from the
//! checklist.

mod build;
mod check;
mod turtle;
pub mod vocab;

use std::collections::BTreeSet;

pub use build::{build_cube, decimal_literal};
pub use check::{check_cube, CubeCheckReport, Violation};
pub use turtle::serialize_turtle;

use crate::error::{Error, Result};
use crate::validation::is_absolute_iri;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(String),
    Blank(String),
    Literal(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub lexical: String,
    pub datatype: String,
    pub language: Option<String>,
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Self {
        Term::Iri(iri.into())
    }

    pub fn typed(lexical: impl Into<String>, datatype: &str) -> Self {
        Term::Literal(Literal {
            lexical: lexical.into(),
            datatype: datatype.to_owned(),
            language: None,
        })
    }

    pub fn string(value: impl Into<String>) -> Self {
        Self::typed(value, vocab::XSD_STRING)
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: String,
    pub object: Term,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeGraph {
    base_iri: String,
    statements: BTreeSet<Triple>,
}

impl CubeGraph {
    /// Empty graph minting under `base_iri`. A trailing `/` is dropped; the
    /// base must be an absolute IRI without query or fragment.
    pub fn new(base_iri: &str) -> Result<Self> {
        let base = base_iri.trim_end_matches('/');
        if !is_absolute_iri(base) || base.contains(['?', '#']) {
            return Err(Error::InvalidBaseIri(base_iri.to_owned()));
        }
        Ok(Self {
            base_iri: base.to_owned(),
            statements: BTreeSet::new(),
        })
    }

    pub fn base_iri(&self) -> &str {
        &self.base_iri
    }

    /// Adds a statement; returns false if it was already present.
    pub fn insert(&mut self, subject: Term, predicate: &str, object: Term) -> bool {
        self.statements.insert(Triple {
            subject,
            predicate: predicate.to_owned(),
            object,
        })
    }

    pub fn remove(&mut self, triple: &Triple) -> bool {
        self.statements.remove(triple)
    }

    pub fn statements(&self) -> &BTreeSet<Triple> {
        &self.statements
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn objects<'a, 'p>(&'a self, subject: &'p Term, predicate: &'p str) -> impl Iterator<Item = &'a Term> + use<'a, 'p> {
        self.statements
            .iter()
            .filter(move |t| &t.subject == subject && t.predicate == predicate)
            .map(|t| &t.object)
    }

    pub fn subjects_of_type<'a>(&'a self, class: &'a str) -> impl Iterator<Item = &'a Term> {
        self.statements
            .iter()
            .filter(move |t| t.predicate == vocab::RDF_TYPE && t.object.as_iri() == Some(class))
            .map(|t| &t.subject)
    }

    pub fn observation_count(&self) -> usize {
        self.subjects_of_type(vocab::QB_OBSERVATION).count()
    }
}
