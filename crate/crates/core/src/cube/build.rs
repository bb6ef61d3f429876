use std::collections::BTreeSet;

use super::vocab::{self, Minter};
use super::{CubeGraph, Term};
use crate::checklist::Checklist;
use crate::error::{Error, Result};
use crate::scoring::{ComplianceReport, Ratio};
use crate::validation::is_identifier;

/// Decimal rendering of a ratio with at most six fractional digits, rounded
/// half away from zero, trailing zeros trimmed (`1/2` is `0.5`, `2/3` is
/// `0.666667`, `1/1` is `1.0`).
pub fn decimal_literal(r: Ratio) -> String {
    const SCALE: u64 = 1_000_000;
    let n = u64::from(r.numerator());
    let d = u64::from(r.denominator());
    let scaled = (2 * SCALE * n + d) / (2 * d);
    let fraction = format!("{:06}", scaled % SCALE);
    let fraction = fraction.trim_end_matches('0');
    let fraction = if fraction.is_empty() { "0" } else { fraction };
    format!("{}.{fraction}", scaled / SCALE)
}

/// Builds the cube for one organisation's reports against `checklist`.
pub fn build_cube(
    org_id: &str,
    reports: &[ComplianceReport],
    checklist: &Checklist,
    base_iri: &str,
) -> Result<CubeGraph> {
    let mut graph = CubeGraph::new(base_iri)?;
    if !is_identifier(org_id) {
        return Err(Error::BadOrgId(org_id.to_owned()));
    }
    if reports.iter().any(|r| r.org_id != org_id) {
        return Err(Error::MixedOrg);
    }
    let known_sections: BTreeSet<&str> = checklist.sections.iter().map(|s| s.id.as_str()).collect();
    let foreign = |r: &ComplianceReport| {
        r.checklist_id != checklist.id
            || r.sections
                .iter()
                .any(|s| !known_sections.contains(s.section_id.as_str()))
    };
    if reports.iter().any(foreign) {
        return Err(Error::MixedChecklist);
    }
    let mut periods = BTreeSet::new();
    if let Some(dup) = reports.iter().find(|r| !periods.insert(r.period)) {
        return Err(Error::DuplicatePeriod(dup.period));
    }

    let base = graph.base_iri().to_owned();
    let mint = Minter::new(&base);
    let iri = |s: String| Term::Iri(s);
    let class = |c: &str| Term::iri(c);

    let dataset = iri(mint.dataset(org_id));
    let structure = iri(mint.structure());
    let code_list = iri(mint.code_list());

    graph.insert(dataset.clone(), vocab::RDF_TYPE, class(vocab::QB_DATA_SET_CLASS));
    graph.insert(
        dataset.clone(),
        vocab::RDFS_LABEL,
        Term::string(format!("GDPR compliance of {org_id} ({})", checklist.key())),
    );
    graph.insert(dataset.clone(), vocab::QB_STRUCTURE, structure.clone());

    graph.insert(structure.clone(), vocab::RDF_TYPE, class(vocab::QB_DATA_STRUCTURE_DEFINITION));

    let period_prop = mint.def(vocab::REF_PERIOD);
    let section_prop = mint.def(vocab::SECTION);
    let ratio_prop = mint.def(vocab::COMPLIANCE_RATIO);
    let compliant_prop = mint.def(vocab::COMPLIANT_COUNT);
    let applicable_prop = mint.def(vocab::APPLICABLE_COUNT);

    let components = [
        ("period", vocab::QB_DIMENSION, &period_prop, Some(1)),
        ("section", vocab::QB_DIMENSION, &section_prop, Some(2)),
        ("ratio", vocab::QB_MEASURE, &ratio_prop, None),
        ("compliant", vocab::QB_ATTRIBUTE, &compliant_prop, None),
        ("applicable", vocab::QB_ATTRIBUTE, &applicable_prop, None),
    ];
    for (local, role, property, order) in components {
        let component = iri(mint.component(local));
        graph.insert(structure.clone(), vocab::QB_COMPONENT, component.clone());
        graph.insert(component.clone(), vocab::RDF_TYPE, class(vocab::QB_COMPONENT_SPECIFICATION));
        graph.insert(component.clone(), role, iri(property.clone()));
        if let Some(order) = order {
            graph.insert(component, vocab::QB_ORDER, Term::typed(order.to_string(), vocab::XSD_INTEGER));
        }
    }

    let properties = [
        (&period_prop, vocab::QB_DIMENSION_PROPERTY, "reference period", vocab::XSD_G_YEAR_MONTH),
        (&section_prop, vocab::QB_DIMENSION_PROPERTY, "GDPR section", vocab::SKOS_CONCEPT),
        (&ratio_prop, vocab::QB_MEASURE_PROPERTY, "compliance ratio", vocab::XSD_DECIMAL),
        (&compliant_prop, vocab::QB_ATTRIBUTE_PROPERTY, "compliant answers", vocab::XSD_INTEGER),
        (&applicable_prop, vocab::QB_ATTRIBUTE_PROPERTY, "applicable answers", vocab::XSD_INTEGER),
    ];
    for (property, kind, label, range) in properties {
        let node = iri(property.clone());
        graph.insert(node.clone(), vocab::RDF_TYPE, class(vocab::RDF_PROPERTY));
        graph.insert(node.clone(), vocab::RDF_TYPE, class(kind));
        graph.insert(node.clone(), vocab::RDFS_LABEL, Term::string(label));
        graph.insert(node, vocab::RDFS_RANGE, class(range));
    }
    let section_node = iri(section_prop.clone());
    graph.insert(section_node.clone(), vocab::RDF_TYPE, class(vocab::QB_CODED_PROPERTY));
    graph.insert(section_node, vocab::QB_CODE_LIST, code_list.clone());

    graph.insert(code_list.clone(), vocab::RDF_TYPE, class(vocab::SKOS_CONCEPT_SCHEME));
    graph.insert(
        code_list.clone(),
        vocab::SKOS_PREF_LABEL,
        Term::string(format!("Sections of {}", checklist.title)),
    );
    let codes = checklist
        .sections
        .iter()
        .map(|s| (s.id.as_str(), s.title.as_str(), s.dpv_concept.as_deref()))
        .chain([(vocab::OVERALL_CODE, "Overall", None)]);
    for (code, title, concept) in codes {
        let node = iri(mint.section_code(code));
        graph.insert(code_list.clone(), vocab::SKOS_HAS_TOP_CONCEPT, node.clone());
        graph.insert(node.clone(), vocab::RDF_TYPE, class(vocab::SKOS_CONCEPT));
        graph.insert(node.clone(), vocab::SKOS_IN_SCHEME, code_list.clone());
        graph.insert(node.clone(), vocab::SKOS_NOTATION, Term::string(code));
        graph.insert(node.clone(), vocab::SKOS_PREF_LABEL, Term::string(title));
        if let Some(concept) = concept {
            graph.insert(node, vocab::DCT_SUBJECT, Term::iri(concept));
        }
    }

    for report in reports {
        let period = report.period.to_string();
        let cells = report
            .sections
            .iter()
            .filter_map(|s| s.ratio.map(|r| (s.section_id.as_str(), r)))
            .chain(report.total.map(|r| (vocab::OVERALL_CODE, r)));
        for (code, ratio) in cells {
            let obs = iri(mint.observation(org_id, &period, code));
            graph.insert(obs.clone(), vocab::RDF_TYPE, class(vocab::QB_OBSERVATION));
            graph.insert(obs.clone(), vocab::QB_DATA_SET, dataset.clone());
            graph.insert(obs.clone(), &period_prop, Term::typed(&period, vocab::XSD_G_YEAR_MONTH));
            graph.insert(obs.clone(), &section_prop, iri(mint.section_code(code)));
            graph.insert(obs.clone(), &ratio_prop, Term::typed(decimal_literal(ratio), vocab::XSD_DECIMAL));
            graph.insert(
                obs.clone(),
                &compliant_prop,
                Term::typed(ratio.numerator().to_string(), vocab::XSD_INTEGER),
            );
            graph.insert(
                obs,
                &applicable_prop,
                Term::typed(ratio.denominator().to_string(), vocab::XSD_INTEGER),
            );
        }
    }

    Ok(graph)
}
