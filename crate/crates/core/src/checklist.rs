//! Versioned self-assessment checklists: the document model, its file format
//! and its structural invariants.
//!
//! A checklist is an ordered list of sections, each an ordered list of yes/no
//! style questions. Every question carries equal weight when scored.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json;
use crate::validation::{is_absolute_iri, is_code, is_dotted_version, is_identifier, IssueCollector, ValidationReport};

/// The shipped default checklist document (8 sections, 54 questions).
pub const DEFAULT_CHECKLIST_JSON: &str = include_str!("../checklists/default.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checklist {
    pub id: String,
    pub version: String,
    pub jurisdiction: String,
    pub title: String,
    pub sections: Vec<Section>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Section {
    pub id: String,
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dpv_concept: Option<String>,
    pub questions: Vec<Question>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Question {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guidance: Option<String>,
}

/// Parses and validates a checklist document.
pub fn parse_checklist(document: &[u8]) -> Result<Checklist> {
    let checklist: Checklist = json::decode(document)?;
    let report = validate_checklist(&checklist);
    if report.ok {
        Ok(checklist)
    } else {
        Err(Error::InvalidChecklist(report))
    }
}

pub fn default_checklist() -> Checklist {
    parse_checklist(DEFAULT_CHECKLIST_JSON.as_bytes()).expect("shipped checklist is valid")
}

pub fn validate_checklist(c: &Checklist) -> ValidationReport {
    let mut issues = IssueCollector::default();

    if !is_identifier(&c.id) {
        issues.error("bad-id", "id", format!("checklist id {:?} is not a valid identifier", c.id));
    }
    if !is_dotted_version(&c.version) {
        issues.error(
            "bad-version",
            "version",
            format!("version {:?} is not a dotted numeric version", c.version),
        );
    }
    if c.sections.is_empty() {
        issues.error("empty-checklist", "sections", "checklist has no sections");
    }

    let mut section_ids = HashSet::new();
    let mut section_titles = HashSet::new();
    let mut question_ids: HashMap<&str, String> = HashMap::new();

    for (si, section) in c.sections.iter().enumerate() {
        let path = format!("sections[{si}]");
        if !is_code(&section.id) {
            issues.error(
                "bad-id",
                format!("{path}.id"),
                format!("section id {:?} must be 1-64 lowercase letters, digits or hyphens", section.id),
            );
        }
        if section.id == crate::cube::vocab::OVERALL_CODE {
            issues.error(
                "reserved-id",
                format!("{path}.id"),
                "section id \"overall\" is reserved for the checklist total",
            );
        }
        if !section_ids.insert(section.id.as_str()) {
            issues.error(
                "duplicate-section-id",
                format!("{path}.id"),
                format!("section id {:?} is used more than once", section.id),
            );
        }
        if section.title.trim().is_empty() {
            issues.error("empty-title", format!("{path}.title"), "section title is empty");
        } else if !section_titles.insert(section.title.as_str()) {
            issues.warning(
                "duplicate-title",
                format!("{path}.title"),
                format!("section title {:?} is used more than once", section.title),
            );
        }
        if let Some(iri) = &section.dpv_concept {
            if !is_absolute_iri(iri) {
                issues.error(
                    "bad-iri",
                    format!("{path}.dpv_concept"),
                    format!("{iri:?} is not an absolute IRI"),
                );
            }
        }
        if section.questions.is_empty() {
            issues.error(
                "empty-section",
                format!("{path}.questions"),
                format!("section {:?} has no questions", section.id),
            );
        }

        for (qi, question) in section.questions.iter().enumerate() {
            let qpath = format!("{path}.questions[{qi}]");
            if !is_code(&question.id) {
                issues.error(
                    "bad-id",
                    format!("{qpath}.id"),
                    format!("question id {:?} must be 1-64 lowercase letters, digits or hyphens", question.id),
                );
            }
            if let Some(first) = question_ids.get(question.id.as_str()) {
                issues.question_error(
                    "duplicate-question-id",
                    format!("{qpath}.id"),
                    &question.id,
                    format!("question id {:?} already used at {first}", question.id),
                );
            } else {
                question_ids.insert(&question.id, format!("{qpath}.id"));
            }
            if question.text.trim().is_empty() {
                issues.question_error("empty-text", format!("{qpath}.text"), &question.id, "question text is empty");
            }
        }
    }

    issues.finish()
}

impl Checklist {
    /// Canonical file form: keys in schema order, document order preserved.
    pub fn to_canonical_json(&self) -> String {
        json::canonical(self)
    }

    /// Owning section and question for a question id.
    pub fn question_lookup(&self, question_id: &str) -> Result<(&Section, &Question)> {
        self.sections
            .iter()
            .find_map(|section| {
                section
                    .questions
                    .iter()
                    .find(|q| q.id == question_id)
                    .map(|q| (section, q))
            })
            .ok_or_else(|| Error::UnknownQuestion(question_id.to_owned()))
    }

    pub fn section(&self, section_id: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.id == section_id)
    }

    pub fn question_count(&self) -> usize {
        self.sections.iter().map(|s| s.questions.len()).sum()
    }

    pub fn questions(&self) -> impl Iterator<Item = (&Section, &Question)> {
        self.sections
            .iter()
            .flat_map(|s| s.questions.iter().map(move |q| (s, q)))
    }

    /// `id@version`, the registry key and file stem.
    pub fn key(&self) -> String {
        format!("{}@{}", self.id, self.version)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE2_TITLES: [&str; 8] = [
        "Personal data",
        "Data subject rights",
        "Accuracy and retention",
        "Transparency requirements",
        "Other data controller obligations",
        "Data security",
        "Data breach",
        "International data transfers",
    ];

    fn minimal() -> &'static str {
        r#"{"id":"mini","version":"1.0","jurisdiction":"IE","title":"Mini",
            "sections":[{"id":"s","title":"S","questions":[{"id":"q","text":"Q?"}]}]}"#
    }

    #[test]
    fn default_checklist_shape() {
        let c = default_checklist();
        assert_eq!(c.sections.len(), 8);
        assert_eq!(c.question_count(), 54);
        let titles: Vec<_> = c.sections.iter().map(|s| s.title.as_str()).collect();
        assert_eq!(titles, TABLE2_TITLES);
        assert!(validate_checklist(&c).ok);
        assert!(validate_checklist(&c).issues.is_empty());
    }

    #[test]
    fn default_file_is_canonical() {
        assert_eq!(default_checklist().to_canonical_json(), DEFAULT_CHECKLIST_JSON);
    }

    #[test]
    fn minimal_document() {
        let c = parse_checklist(minimal().as_bytes()).unwrap();
        assert_eq!(c.sections.len(), 1);
        let (s, q) = c.question_lookup("q").unwrap();
        assert_eq!((s.id.as_str(), q.id.as_str()), ("s", "q"));
    }

    #[test]
    fn duplicate_question_id_names_path() {
        let doc = r#"{"id":"c","version":"1","jurisdiction":"","title":"",
            "sections":[
              {"id":"a","title":"A","questions":[{"id":"db-1","text":"x"}]},
              {"id":"b","title":"B","questions":[{"id":"q","text":"y"},{"id":"db-1","text":"z"}]}]}"#;
        let Err(Error::InvalidChecklist(report)) = parse_checklist(doc.as_bytes()) else {
            panic!("expected invariant error");
        };
        let issue = report.issues.iter().find(|i| i.code == "duplicate-question-id").unwrap();
        assert_eq!(issue.path, "sections[1].questions[1].id");
        assert_eq!(issue.question_id.as_deref(), Some("db-1"));
    }

    #[test]
    fn syntax_and_schema_errors() {
        assert!(matches!(parse_checklist(b"{\"id\":"), Err(Error::Syntax(_))));
        assert!(matches!(parse_checklist(b"{} trailing"), Err(Error::Syntax(_))));
        assert!(matches!(parse_checklist(&[0xff, 0xfe]), Err(Error::Syntax(_))));

        let missing = r#"{"id":"c","version":"1","jurisdiction":"","title":""}"#;
        assert!(matches!(parse_checklist(missing.as_bytes()), Err(Error::Schema { .. })));

        let unknown = minimal().replace(r#""text":"Q?""#, r#""text":"Q?","weight":2"#);
        let Err(Error::Schema { path, .. }) = parse_checklist(unknown.as_bytes()) else {
            panic!("unknown key must be a schema error");
        };
        assert_eq!(path, "sections[0].questions[0].weight");
    }

    #[test]
    fn empty_section_and_bad_iri() {
        let mut c = parse_checklist(minimal().as_bytes()).unwrap();
        c.sections.push(Section {
            id: "empty".into(),
            title: "Empty".into(),
            dpv_concept: Some("not a iri".into()),
            questions: vec![],
        });
        let report = validate_checklist(&c);
        assert!(!report.ok);
        assert!(report.has_code("empty-section"));
        assert!(report.has_code("bad-iri"));
    }

    #[test]
    fn other_invariants() {
        let mut c = parse_checklist(minimal().as_bytes()).unwrap();
        c.sections.push(c.sections[0].clone());
        c.sections[1].questions[0].id = "Q 2".into();
        c.sections[1].questions[0].text = "  ".into();
        c.version = "v1".into();
        let report = validate_checklist(&c);
        for code in ["duplicate-section-id", "bad-id", "empty-text", "bad-version", "duplicate-title"] {
            assert!(report.has_code(code), "{code}");
        }

        c.sections[1].id = "overall".into();
        assert!(validate_checklist(&c).has_code("reserved-id"));

        c.sections.clear();
        assert!(validate_checklist(&c).has_code("empty-checklist"));
    }

    #[test]
    fn lookup_unknown_question() {
        let c = default_checklist();
        assert!(matches!(c.question_lookup("zzz"), Err(Error::UnknownQuestion(_))));
    }

    #[test]
    fn lookup_matches_enumeration() {
        let c = default_checklist();
        for section in &c.sections {
            for question in &section.questions {
                let (s, q) = c.question_lookup(&question.id).unwrap();
                assert_eq!(s.id, section.id);
                assert_eq!(q, question);
            }
        }
        let (s, q) = c.question_lookup("db-3").unwrap();
        assert_eq!(s.title, "Data breach");
        assert_eq!(q.text, "Are all data breaches fully documented?");
    }
}
