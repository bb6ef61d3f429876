//! Parse-back through an independent Turtle parser.

use compliance_core::cube::vocab::RDF_LANG_STRING;
use compliance_core::cube::{CubeGraph, Literal, Term};
use oxrdf::{NamedOrBlankNode, Term as OxTerm};
use oxttl::TurtleParser;

fn subject(s: NamedOrBlankNode) -> Term {
    match s {
        NamedOrBlankNode::NamedNode(n) => Term::Iri(n.into_string()),
        NamedOrBlankNode::BlankNode(b) => Term::Blank(b.into_string()),
    }
}

fn object(o: OxTerm) -> Result<Term, String> {
    Ok(match o {
        OxTerm::NamedNode(n) => Term::Iri(n.into_string()),
        OxTerm::BlankNode(b) => Term::Blank(b.into_string()),
        OxTerm::Literal(l) => {
            let (lexical, datatype, language) = l.destruct();
            match language {
                Some(language) => Term::Literal(Literal {
                    lexical,
                    datatype: RDF_LANG_STRING.to_owned(),
                    language: Some(language),
                }),
                None => Term::typed(
                    lexical,
                    datatype.as_ref().map_or(compliance_core::cube::vocab::XSD_STRING, |d| d.as_str()),
                ),
            }
        }
        #[allow(unreachable_patterns)]
        other => return Err(format!("unsupported term {other}")),
    })
}

/// Parses Turtle into a graph minting under `base_iri`.
pub fn parse_turtle(text: &str, base_iri: &str) -> Result<CubeGraph, String> {
    let mut graph = CubeGraph::new(base_iri).map_err(|e| e.to_string())?;
    for triple in TurtleParser::new().for_slice(text.as_bytes()) {
        let triple = triple.map_err(|e| e.to_string())?;
        graph.insert(subject(triple.subject), triple.predicate.as_str(), object(triple.object)?);
    }
    Ok(graph)
}
