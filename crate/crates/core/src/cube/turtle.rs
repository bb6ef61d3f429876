//! Deterministic Turtle writer.
//!
//! Subjects appear in lexicographic order, predicates in the fixed
//! vocabulary order, objects sorted. IRIs under a declared namespace are
//! compacted when the local part is a plain name; everything else is written
//! in full.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::vocab::{self, predicate_rank};
use super::{CubeGraph, Literal, Term, Triple};

struct Prefixes {
    // (prefix, namespace), longest namespace first for matching
    entries: Vec<(&'static str, String)>,
}

impl Prefixes {
    fn for_base(base: &str) -> Self {
        let mut entries = vec![
            ("dct", vocab::DCT.to_owned()),
            ("dpv", vocab::DPV.to_owned()),
            ("gdpr", format!("{base}/def/")),
            ("qb", vocab::QB.to_owned()),
            ("rdf", vocab::RDF.to_owned()),
            ("rdfs", vocab::RDFS.to_owned()),
            ("section", format!("{base}/code/section/")),
            ("skos", vocab::SKOS.to_owned()),
            ("xsd", vocab::XSD.to_owned()),
        ];
        entries.sort_by(|a, b| a.0.cmp(b.0));
        Self { entries }
    }

    fn header(&self) -> String {
        self.entries
            .iter()
            .map(|(prefix, ns)| format!("@prefix {prefix}: {} .\n", iri_ref(ns)))
            .collect()
    }

    fn iri(&self, iri: &str) -> String {
        self.entries
            .iter()
            .filter_map(|(prefix, ns)| {
                let local = iri.strip_prefix(ns.as_str())?;
                is_plain_local(local).then(|| (ns.len(), format!("{prefix}:{local}")))
            })
            .max_by_key(|(len, _)| *len)
            .map(|(_, compact)| compact)
            .unwrap_or_else(|| iri_ref(iri))
    }

    fn term(&self, term: &Term) -> String {
        match term {
            Term::Iri(iri) => self.iri(iri),
            Term::Blank(label) => blank(label),
            Term::Literal(lit) => self.literal(lit),
        }
    }

    fn literal(&self, lit: &Literal) -> String {
        let quoted = format!("\"{}\"", escape_string(&lit.lexical));
        match &lit.language {
            Some(lang) => format!("{quoted}@{lang}"),
            None if lit.datatype == vocab::XSD_STRING => quoted,
            None => format!("{quoted}^^{}", self.iri(&lit.datatype)),
        }
    }
}

fn is_plain_local(local: &str) -> bool {
    let mut chars = local.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn iri_ref(iri: &str) -> String {
    let mut out = String::with_capacity(iri.len() + 2);
    out.push('<');
    for c in iri.chars() {
        if c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') {
            let _ = write!(out, "\\u{:04X}", c as u32);
        } else {
            out.push(c);
        }
    }
    out.push('>');
    out
}

fn blank(label: &str) -> String {
    let mut out = String::from("_:");
    for (i, c) in label.chars().enumerate() {
        let ok = c.is_ascii_alphanumeric() || c == '_' || (i > 0 && c == '-');
        out.push(if ok { c } else { '_' });
    }
    if label.is_empty() {
        out.push('b');
    }
    out
}

fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

/// Writes the graph as Turtle (UTF-8, LF line endings). Byte-identical for
/// equal graphs.
pub fn serialize_turtle(graph: &CubeGraph) -> String {
    let prefixes = Prefixes::for_base(graph.base_iri());
    let mut out = prefixes.header();

    let mut by_subject: BTreeMap<&Term, Vec<&Triple>> = BTreeMap::new();
    for triple in graph.statements() {
        by_subject.entry(&triple.subject).or_default().push(triple);
    }

    for (subject, mut triples) in by_subject {
        triples.sort_by(|a, b| {
            let key = |t: &Triple| (predicate_rank(graph.base_iri(), &t.predicate).unwrap_or(usize::MAX), t.predicate.clone());
            key(a).cmp(&key(b)).then_with(|| a.object.cmp(&b.object))
        });

        out.push('\n');
        out.push_str(&prefixes.term(subject));
        let mut groups: Vec<(&str, Vec<&Term>)> = Vec::new();
        for t in triples {
            match groups.last_mut() {
                Some((p, objects)) if *p == t.predicate => objects.push(&t.object),
                _ => groups.push((&t.predicate, vec![&t.object])),
            }
        }
        for (i, (predicate, objects)) in groups.iter().enumerate() {
            out.push_str(if i == 0 { "\n    " } else { " ;\n    " });
            if *predicate == vocab::RDF_TYPE {
                out.push('a');
            } else {
                out.push_str(&prefixes.iri(predicate));
            }
            out.push(' ');
            let rendered: Vec<String> = objects.iter().map(|o| prefixes.term(o)).collect();
            out.push_str(&rendered.join(" , "));
        }
        out.push_str(" .\n");
    }
    out
}
