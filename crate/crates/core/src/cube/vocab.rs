//! Vocabulary terms used by the cube export, and the IRI minting scheme.

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const QB: &str = "http://purl.org/linked-data/cube#";
pub const SKOS: &str = "http://www.w3.org/2004/02/skos/core#";
pub const DCT: &str = "http://purl.org/dc/terms/";
pub const DPV: &str = "https://w3id.org/dpv#";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_PROPERTY: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Property";
pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const RDFS_RANGE: &str = "http://www.w3.org/2000/01/rdf-schema#range";

pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
pub const XSD_G_YEAR_MONTH: &str = "http://www.w3.org/2001/XMLSchema#gYearMonth";

pub const QB_DATA_SET_CLASS: &str = "http://purl.org/linked-data/cube#DataSet";
pub const QB_DATA_STRUCTURE_DEFINITION: &str = "http://purl.org/linked-data/cube#DataStructureDefinition";
pub const QB_COMPONENT_SPECIFICATION: &str = "http://purl.org/linked-data/cube#ComponentSpecification";
pub const QB_OBSERVATION: &str = "http://purl.org/linked-data/cube#Observation";
pub const QB_DIMENSION_PROPERTY: &str = "http://purl.org/linked-data/cube#DimensionProperty";
pub const QB_MEASURE_PROPERTY: &str = "http://purl.org/linked-data/cube#MeasureProperty";
pub const QB_ATTRIBUTE_PROPERTY: &str = "http://purl.org/linked-data/cube#AttributeProperty";
pub const QB_CODED_PROPERTY: &str = "http://purl.org/linked-data/cube#CodedProperty";
pub const QB_STRUCTURE: &str = "http://purl.org/linked-data/cube#structure";
pub const QB_COMPONENT: &str = "http://purl.org/linked-data/cube#component";
pub const QB_DIMENSION: &str = "http://purl.org/linked-data/cube#dimension";
pub const QB_MEASURE: &str = "http://purl.org/linked-data/cube#measure";
pub const QB_ATTRIBUTE: &str = "http://purl.org/linked-data/cube#attribute";
pub const QB_ORDER: &str = "http://purl.org/linked-data/cube#order";
pub const QB_CODE_LIST: &str = "http://purl.org/linked-data/cube#codeList";
pub const QB_DATA_SET: &str = "http://purl.org/linked-data/cube#dataSet";

pub const SKOS_CONCEPT_SCHEME: &str = "http://www.w3.org/2004/02/skos/core#ConceptScheme";
pub const SKOS_CONCEPT: &str = "http://www.w3.org/2004/02/skos/core#Concept";
pub const SKOS_PREF_LABEL: &str = "http://www.w3.org/2004/02/skos/core#prefLabel";
pub const SKOS_NOTATION: &str = "http://www.w3.org/2004/02/skos/core#notation";
pub const SKOS_IN_SCHEME: &str = "http://www.w3.org/2004/02/skos/core#inScheme";
pub const SKOS_HAS_TOP_CONCEPT: &str = "http://www.w3.org/2004/02/skos/core#hasTopConcept";

/// Annotation link from a section code to its privacy-vocabulary concept.
pub const DCT_SUBJECT: &str = "http://purl.org/dc/terms/subject";

/// Section-dimension code for the whole-checklist total.
pub const OVERALL_CODE: &str = "overall";

/// Fixed predicate order used when writing Turtle. Predicates not listed
/// follow, sorted by IRI.
pub(crate) fn predicate_rank(base: &str, predicate: &str) -> Option<usize> {
    const FIXED: [&str; 16] = [
        RDF_TYPE,
        RDFS_LABEL,
        SKOS_PREF_LABEL,
        SKOS_NOTATION,
        SKOS_IN_SCHEME,
        SKOS_HAS_TOP_CONCEPT,
        DCT_SUBJECT,
        QB_STRUCTURE,
        QB_COMPONENT,
        QB_DIMENSION,
        QB_MEASURE,
        QB_ATTRIBUTE,
        QB_ORDER,
        QB_CODE_LIST,
        RDFS_RANGE,
        QB_DATA_SET,
    ];
    if let Some(i) = FIXED.iter().position(|p| *p == predicate) {
        return Some(i);
    }
    let local = predicate.strip_prefix(base)?.strip_prefix("/def/")?;
    [REF_PERIOD, SECTION, COMPLIANCE_RATIO, COMPLIANT_COUNT, APPLICABLE_COUNT]
        .iter()
        .position(|p| *p == local)
        .map(|i| FIXED.len() + i)
}

// Local names of the minted component properties, under `{base}/def/`.
pub const REF_PERIOD: &str = "refPeriod";
pub const SECTION: &str = "section";
pub const COMPLIANCE_RATIO: &str = "complianceRatio";
pub const COMPLIANT_COUNT: &str = "compliantCount";
pub const APPLICABLE_COUNT: &str = "applicableCount";

/// Minted IRIs, all under the configured base.
pub struct Minter<'a> {
    base: &'a str,
}

impl<'a> Minter<'a> {
    pub fn new(base: &'a str) -> Self {
        Self { base }
    }

    pub fn def(&self, local: &str) -> String {
        format!("{}/def/{local}", self.base)
    }

    pub fn dataset(&self, org: &str) -> String {
        format!("{}/dataset/{org}", self.base)
    }

    pub fn structure(&self) -> String {
        format!("{}/structure/compliance", self.base)
    }

    pub fn component(&self, local: &str) -> String {
        format!("{}/structure/compliance/{local}", self.base)
    }

    pub fn code_list(&self) -> String {
        format!("{}/code/section", self.base)
    }

    pub fn section_code(&self, section: &str) -> String {
        format!("{}/code/section/{section}", self.base)
    }

    pub fn observation(&self, org: &str, period: &str, section: &str) -> String {
        format!("{}/obs/{org}/{period}/{section}", self.base)
    }
}
