use compliance_core::checklist::{default_checklist, Checklist};
use compliance_core::cube::vocab;
use compliance_core::cube::{build_cube, check_cube, serialize_turtle, CubeGraph, Term, Triple};
use compliance_core::scoring::{score_assessment, ComplianceReport};
use compliance_testkit::fixtures::six_month_assessments;
use compliance_testkit::gen;
use compliance_testkit::rdf::parse_turtle;
use proptest::prelude::*;

const BASE: &str = "https://compliance.example.org/gdpr";

fn six_month_reports(c: &Checklist) -> Vec<ComplianceReport> {
    six_month_assessments(c, "orgA")
        .iter()
        .map(|a| score_assessment(a, c).unwrap())
        .collect()
}

fn six_month_cube() -> CubeGraph {
    let c = default_checklist();
    build_cube("orgA", &six_month_reports(&c), &c, BASE).unwrap()
}

#[test]
fn six_months_round_trip_through_independent_parser() {
    let graph = six_month_cube();
    assert_eq!(graph.observation_count(), 6 * 9);
    assert!(check_cube(&graph).ok);

    let text = serialize_turtle(&graph);
    let parsed = parse_turtle(&text, BASE).unwrap();
    assert_eq!(parsed.statements(), graph.statements());
    assert!(check_cube(&parsed).ok);
    assert_eq!(serialize_turtle(&parsed), text);
    assert_eq!(serialize_turtle(&six_month_cube()), text);
}

#[test]
fn minted_subjects_live_under_base() {
    let graph = six_month_cube();
    for t in graph.statements() {
        let Term::Iri(s) = &t.subject else {
            panic!("blank subject {:?}", t.subject)
        };
        assert!(s.starts_with(BASE), "{s}");
    }
}

#[test]
fn turtle_is_lf_only_and_declares_prefixes() {
    let text = serialize_turtle(&six_month_cube());
    assert!(!text.contains('\r'));
    assert!(text.starts_with("@prefix "));
    for prefix in ["qb:", "dct:", "dpv:", "skos:", "xsd:", "gdpr:"] {
        assert!(text.contains(&format!("@prefix {prefix} ")), "{prefix}");
    }
    assert!(text.contains("gdpr:refPeriod \"2019-01\"^^xsd:gYearMonth"));
    assert!(text.contains("^^xsd:decimal"));
}

fn observation(graph: &CubeGraph, period: &str, section: &str) -> Term {
    Term::iri(format!("{}/obs/orgA/{period}/{section}", graph.base_iri()))
}

fn triples_of(graph: &CubeGraph, subject: &Term) -> Vec<Triple> {
    graph
        .statements()
        .iter()
        .filter(|t| &t.subject == subject)
        .cloned()
        .collect()
}

#[test]
fn missing_section_dimension_is_reported() {
    let mut graph = six_month_cube();
    let obs = observation(&graph, "2019-03", "data-breach");
    let section_prop = format!("{BASE}/def/section");
    let dim = triples_of(&graph, &obs)
        .into_iter()
        .find(|t| t.predicate == section_prop)
        .unwrap();
    graph.remove(&dim);
    let report = check_cube(&graph);
    assert!(!report.ok);
    assert_eq!(report.violations.len(), 1);
    assert_eq!(report.violations[0].code, "missing-dimension");
    assert_eq!(report.violations[0].node, obs.as_iri().unwrap());
}

#[test]
fn duplicated_observation_is_reported() {
    let mut graph = six_month_cube();
    let obs = observation(&graph, "2019-02", "personal-data");
    let copy = Term::iri(format!("{BASE}/obs/orgA/copy"));
    for t in triples_of(&graph, &obs) {
        graph.insert(copy.clone(), &t.predicate, t.object.clone());
    }
    let report = check_cube(&graph);
    assert_eq!(
        report.violations.iter().map(|v| v.code.as_str()).collect::<Vec<_>>(),
        ["duplicate-key"]
    );
}

#[test]
fn dataset_link_and_measure_are_required() {
    let mut graph = six_month_cube();
    let obs = observation(&graph, "2019-01", "overall");
    for t in triples_of(&graph, &obs) {
        if t.predicate == vocab::QB_DATA_SET {
            graph.remove(&t);
        }
    }
    assert!(check_cube(&graph).has_code("dataset-link"));

    let mut graph = six_month_cube();
    let ratio_prop = format!("{BASE}/def/complianceRatio");
    for t in triples_of(&graph, &obs) {
        if t.predicate == ratio_prop {
            graph.remove(&t);
        }
    }
    assert!(check_cube(&graph).has_code("missing-measure"));

    let mut graph = six_month_cube();
    graph.insert(obs, &format!("{BASE}/def/refPeriod"), Term::typed("2020-01", vocab::XSD_G_YEAR_MONTH));
    assert!(check_cube(&graph).has_code("multiple-dimension-values"));
}

#[test]
fn dpv_annotations_survive_parse_back() {
    let mut c = default_checklist();
    c.sections[6].dpv_concept = Some("https://w3id.org/dpv#DataBreach".into());
    let graph = build_cube("orgA", &[], &c, BASE).unwrap();
    let text = serialize_turtle(&graph);
    assert!(text.contains("dct:subject dpv:DataBreach"));
    assert_eq!(parse_turtle(&text, BASE).unwrap().statements(), graph.statements());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_series_build_check_and_round_trip((c, assessments) in gen::series_case()) {
        let reports: Vec<_> = assessments.iter().map(|a| score_assessment(a, &c).unwrap()).collect();
        let graph = build_cube("org-a", &reports, &c, BASE).unwrap();
        prop_assert!(check_cube(&graph).ok);

        let expected: usize = reports
            .iter()
            .map(|r| r.sections.iter().filter(|s| s.ratio.is_some()).count() + usize::from(r.total.is_some()))
            .sum();
        prop_assert_eq!(graph.observation_count(), expected);

        let text = serialize_turtle(&graph);
        let parsed = parse_turtle(&text, BASE).map_err(TestCaseError::fail)?;
        prop_assert_eq!(parsed.statements(), graph.statements());
        prop_assert_eq!(serialize_turtle(&parsed), text);
    }
}
