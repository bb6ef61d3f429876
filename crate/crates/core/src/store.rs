//! Append-only, file-backed storage for checklists and assessment
//! submissions.
//!
//! Layout of a data directory:
//!
//! ```text
//! {data_dir}/journal.ndjson                    one event per line
//! {data_dir}/checklists/{id}@{version}.json    canonical checklist files
//! ```
//!
//! Every journal line is a JSON object tagged by `kind`:
//!
//! ```text
//! {"kind":"checklist","seq":1,"id":"...","version":"...","sha256":"...","received_at":"..."}
//! {"kind":"submission","seq":2,"revision":1,"received_at":"...","assessment":{...}}
//! ```
//!
//! The store state is rebuilt on open by replaying the journal. A record
//! counts iff its line parses; a torn final line left by a crash is sealed
//! with a newline and skipped. Existing lines are never rewritten.
//!
//! Writes are serialized through one writer lock. Readers take an
//! [`Arc<StoreSnapshot>`] that never changes underneath them.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, PoisonError, RwLock};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::assessment::{format_timestamp, parse_timestamp, validate_assessment, Assessment, AssessmentDoc};
use crate::checklist::{parse_checklist, validate_checklist, Checklist};
use crate::cube::{build_cube, CubeGraph};
use crate::error::{Error, Result};
use crate::period::Period;
use crate::scoring::{score_assessment, ComplianceReport};
use crate::trend::{build_trend, TrendSeries};

pub const JOURNAL_FILE: &str = "journal.ndjson";
pub const CHECKLIST_DIR: &str = "checklists";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmissionRecord {
    pub sequence_no: u64,
    pub revision: u32,
    pub assessment: Assessment,
    pub received_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Registration {
    Created,
    AlreadyRegistered,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StoreSnapshot {
    checklists: BTreeMap<(String, String), Arc<Checklist>>,
    history: BTreeMap<(String, Period), Vec<Arc<SubmissionRecord>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum JournalEntry {
    Checklist {
        seq: u64,
        id: String,
        version: String,
        sha256: String,
        received_at: String,
    },
    Submission {
        seq: u64,
        revision: u32,
        received_at: String,
        assessment: AssessmentDoc,
    },
}

impl JournalEntry {
    fn seq(&self) -> u64 {
        match self {
            JournalEntry::Checklist { seq, .. } | JournalEntry::Submission { seq, .. } => *seq,
        }
    }
}

pub struct Store {
    dir: PathBuf,
    writer: Mutex<Writer>,
    current: RwLock<Arc<StoreSnapshot>>,
}

struct Writer {
    journal: File,
    last_seq: u64,
}

impl Store {
    /// Opens (creating if needed) the data directory and replays its journal.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(dir.join(CHECKLIST_DIR))?;
        let mut journal = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(dir.join(JOURNAL_FILE))?;

        let mut contents = Vec::new();
        journal.read_to_end(&mut contents)?;
        let (snapshot, last_seq) = replay(&dir, &contents)?;

        if !contents.is_empty() && !contents.ends_with(b"\n") {
            tracing::warn!("sealing torn final journal line");
            journal.write_all(b"\n")?;
            journal.sync_data()?;
        }

        Ok(Self {
            dir,
            writer: Mutex::new(Writer { journal, last_seq }),
            current: RwLock::new(Arc::new(snapshot)),
        })
    }

    pub fn data_dir(&self) -> &Path {
        &self.dir
    }

    pub fn snapshot(&self) -> Arc<StoreSnapshot> {
        Arc::clone(&self.current.read().unwrap_or_else(PoisonError::into_inner))
    }

    fn publish(&self, next: StoreSnapshot) {
        *self.current.write().unwrap_or_else(PoisonError::into_inner) = Arc::new(next);
    }

    /// Registers a checklist version. Identical re-registration is a no-op;
    /// different content under an existing `(id, version)` is refused.
    pub fn register_checklist(&self, checklist: &Checklist) -> Result<Registration> {
        let report = validate_checklist(checklist);
        if !report.ok {
            return Err(Error::InvalidChecklist(report));
        }
        let canonical = checklist.to_canonical_json();

        let mut writer = self.writer.lock().unwrap_or_else(PoisonError::into_inner);
        let mut next = StoreSnapshot::clone(&self.snapshot());
        if let Some(existing) = next.checklist(&checklist.id, &checklist.version) {
            return if existing.to_canonical_json() == canonical {
                Ok(Registration::AlreadyRegistered)
            } else {
                Err(Error::VersionConflict {
                    id: checklist.id.clone(),
                    version: checklist.version.clone(),
                })
            };
        }

        write_atomically(&self.dir.join(CHECKLIST_DIR).join(checklist_file_name(checklist)), canonical.as_bytes())?;
        let seq = writer.last_seq + 1;
        writer.append(&JournalEntry::Checklist {
            seq,
            id: checklist.id.clone(),
            version: checklist.version.clone(),
            sha256: sha256_hex(canonical.as_bytes()),
            received_at: format_timestamp(&Utc::now()),
        })?;
        writer.last_seq = seq;

        next.checklists.insert(
            (checklist.id.clone(), checklist.version.clone()),
            Arc::new(checklist.clone()),
        );
        self.publish(next);
        Ok(Registration::Created)
    }

    /// Appends a submission and returns its revision for `(org, period)`.
    pub fn submit_assessment(&self, assessment: Assessment) -> Result<u32> {
        let mut writer = self.writer.lock().unwrap_or_else(PoisonError::into_inner);
        let mut next = StoreSnapshot::clone(&self.snapshot());

        let checklist = next
            .checklist(&assessment.checklist_id, &assessment.checklist_version)
            .ok_or_else(|| Error::UnknownChecklist {
                id: assessment.checklist_id.clone(),
                version: assessment.checklist_version.clone(),
            })?;
        let report = validate_assessment(&assessment, checklist)?;
        if !report.ok {
            return Err(Error::InvalidAssessment(report));
        }

        let key = (assessment.org_id.clone(), assessment.period);
        let revision = next.history.get(&key).map_or(0, Vec::len) as u32 + 1;
        let seq = writer.last_seq + 1;
        let received_at = Utc::now();
        writer.append(&JournalEntry::Submission {
            seq,
            revision,
            received_at: format_timestamp(&received_at),
            assessment: AssessmentDoc::from(&assessment),
        })?;
        writer.last_seq = seq;

        next.history.entry(key).or_default().push(Arc::new(SubmissionRecord {
            sequence_no: seq,
            revision,
            assessment,
            received_at,
        }));
        self.publish(next);
        Ok(revision)
    }

    pub fn load_latest(&self, org_id: &str, period: Period) -> Result<Assessment> {
        self.snapshot().load_latest(org_id, period).cloned()
    }

    pub fn list_periods(&self, org_id: &str) -> Vec<Period> {
        self.snapshot().list_periods(org_id)
    }
}

impl Writer {
    fn append(&mut self, entry: &JournalEntry) -> Result<()> {
        let mut line = serde_json::to_string(entry).expect("journal entries serialize infallibly");
        line.push('\n');
        if let Err(e) = self.journal.write_all(line.as_bytes()) {
            // a partial line must not swallow the next record
            let _ = self.journal.write_all(b"\n");
            return Err(e.into());
        }
        self.journal.sync_data()?;
        Ok(())
    }
}

fn checklist_file_name(c: &Checklist) -> String {
    format!("{}.json", c.key())
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    {
        let mut file = File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn replay(dir: &Path, contents: &[u8]) -> Result<(StoreSnapshot, u64)> {
    let mut snapshot = StoreSnapshot::default();
    let mut last_seq = 0;

    for (index, raw) in contents.split(|&b| b == b'\n').enumerate() {
        let line_no = index + 1;
        if raw.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        let entry: JournalEntry = match serde_json::from_slice(raw) {
            Ok(entry) => entry,
            Err(e) => {
                tracing::warn!(line = line_no, error = %e, "skipping incomplete journal record");
                continue;
            }
        };
        let corrupt = |message: String| Error::CorruptJournal {
            line: line_no,
            message,
        };
        if entry.seq() <= last_seq {
            return Err(corrupt(format!("sequence {} does not follow {last_seq}", entry.seq())));
        }
        last_seq = entry.seq();

        match entry {
            JournalEntry::Checklist {
                id, version, sha256, ..
            } => {
                let path = dir.join(CHECKLIST_DIR).join(format!("{id}@{version}.json"));
                let bytes = fs::read(&path)
                    .map_err(|e| corrupt(format!("cannot read {}: {e}", path.display())))?;
                if sha256_hex(&bytes) != sha256 {
                    return Err(corrupt(format!("{} does not match its registered digest", path.display())));
                }
                let checklist = parse_checklist(&bytes).map_err(|e| corrupt(e.to_string()))?;
                if checklist.id != id || checklist.version != version {
                    return Err(corrupt(format!("{} holds {}", path.display(), checklist.key())));
                }
                snapshot.checklists.insert((id, version), Arc::new(checklist));
            }
            JournalEntry::Submission {
                seq,
                revision,
                received_at,
                assessment,
            } => {
                let assessment = Assessment::try_from(assessment).map_err(|e| corrupt(e.to_string()))?;
                let received_at = parse_timestamp(&received_at).map_err(|e| corrupt(e.to_string()))?;
                let checklist = snapshot
                    .checklist(&assessment.checklist_id, &assessment.checklist_version)
                    .ok_or_else(|| corrupt(format!("checklist {} not registered", assessment.checklist_key())))?;
                let ok = validate_assessment(&assessment, checklist)
                    .map(|report| report.ok)
                    .unwrap_or(false);
                if !ok {
                    return Err(corrupt("stored assessment does not validate".into()));
                }
                let key = (assessment.org_id.clone(), assessment.period);
                let revisions = snapshot.history.entry(key).or_default();
                if revision as usize != revisions.len() + 1 {
                    return Err(corrupt(format!(
                        "revision {revision} follows {}",
                        revisions.len()
                    )));
                }
                revisions.push(Arc::new(SubmissionRecord {
                    sequence_no: seq,
                    revision,
                    assessment,
                    received_at,
                }));
            }
        }
    }
    Ok((snapshot, last_seq))
}

impl StoreSnapshot {
    pub fn checklist(&self, id: &str, version: &str) -> Option<&Checklist> {
        self.checklists
            .get(&(id.to_owned(), version.to_owned()))
            .map(Arc::as_ref)
    }

    pub fn checklists(&self) -> impl Iterator<Item = &Checklist> {
        self.checklists.values().map(Arc::as_ref)
    }

    /// All revisions for `(org, period)`, oldest first.
    pub fn history(&self, org_id: &str, period: Period) -> &[Arc<SubmissionRecord>] {
        self.history
            .get(&(org_id.to_owned(), period))
            .map_or(&[], Vec::as_slice)
    }

    pub fn latest(&self, org_id: &str, period: Period) -> Option<&SubmissionRecord> {
        self.history(org_id, period).last().map(Arc::as_ref)
    }

    pub fn load_latest(&self, org_id: &str, period: Period) -> Result<&Assessment> {
        self.latest(org_id, period)
            .map(|record| &record.assessment)
            .ok_or_else(|| Error::NotFound(format!("assessment for {org_id} in {period}")))
    }

    /// Periods with at least one submission, ascending.
    pub fn list_periods(&self, org_id: &str) -> Vec<Period> {
        self.history
            .keys()
            .filter(|(org, _)| org == org_id)
            .map(|(_, period)| *period)
            .collect()
    }

    pub fn orgs(&self) -> Vec<&str> {
        let mut orgs: Vec<&str> = self.history.keys().map(|(org, _)| org.as_str()).collect();
        orgs.dedup();
        orgs
    }

    /// Scores the latest revision for `(org, period)`.
    pub fn report(&self, org_id: &str, period: Period) -> Result<ComplianceReport> {
        let assessment = self.load_latest(org_id, period)?;
        let checklist = self
            .checklist(&assessment.checklist_id, &assessment.checklist_version)
            .ok_or_else(|| Error::UnknownChecklist {
                id: assessment.checklist_id.clone(),
                version: assessment.checklist_version.clone(),
            })?;
        score_assessment(assessment, checklist)
    }

    /// One report per period for the organisation, ascending.
    pub fn reports(&self, org_id: &str) -> Result<Vec<ComplianceReport>> {
        self.list_periods(org_id)
            .into_iter()
            .map(|period| self.report(org_id, period))
            .collect()
    }

    /// Report for the organisation's most recent period, if any.
    pub fn latest_report(&self, org_id: &str) -> Result<Option<ComplianceReport>> {
        self.list_periods(org_id)
            .last()
            .map(|&period| self.report(org_id, period))
            .transpose()
    }

    pub fn trend(&self, org_id: &str) -> Result<TrendSeries> {
        build_trend(org_id, &self.reports(org_id)?)
    }

    /// The organisation's score series as a Data Cube, coded against the
    /// checklist version of its latest report.
    pub fn cube(&self, org_id: &str, base_iri: &str) -> Result<CubeGraph> {
        let reports = self.reports(org_id)?;
        let latest = reports
            .last()
            .ok_or_else(|| Error::NotFound(format!("assessments for {org_id}")))?;
        let checklist = self
            .checklist(&latest.checklist_id, &latest.checklist_version)
            .ok_or_else(|| Error::UnknownChecklist {
                id: latest.checklist_id.clone(),
                version: latest.checklist_version.clone(),
            })?;
        build_cube(org_id, &reports, checklist, base_iri)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assessment::{Answer, AnswerStatus};
    use crate::checklist::default_checklist;

    fn assessment(org: &str, period: &str, compliant: usize) -> Assessment {
        let c = default_checklist();
        Assessment {
            org_id: org.into(),
            checklist_id: c.id.clone(),
            checklist_version: c.version.clone(),
            period: period.parse().unwrap(),
            submitted_at: parse_timestamp("2019-06-30T10:00:00Z").unwrap(),
            answers: c
                .questions()
                .enumerate()
                .map(|(i, (_, q))| {
                    let status = if i < compliant {
                        AnswerStatus::Compliant
                    } else {
                        AnswerStatus::NonCompliant
                    };
                    Answer::new(&q.id, status)
                })
                .collect(),
        }
    }

    fn open_with_default(dir: &Path) -> Store {
        let store = Store::open(dir).unwrap();
        store.register_checklist(&default_checklist()).unwrap();
        store
    }

    #[test]
    fn register_is_idempotent_and_immutable() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let c = default_checklist();
        assert_eq!(store.register_checklist(&c).unwrap(), Registration::Created);
        assert_eq!(store.register_checklist(&c).unwrap(), Registration::AlreadyRegistered);

        let mut altered = c.clone();
        altered.sections[0].questions[0].text.push_str(" (amended)");
        assert!(matches!(store.register_checklist(&altered), Err(Error::VersionConflict { .. })));

        altered.version = "1.1.0".into();
        assert_eq!(store.register_checklist(&altered).unwrap(), Registration::Created);
        let snap = store.snapshot();
        assert_eq!(snap.checklist(&c.id, "1.0.0"), Some(&c));
        assert_eq!(snap.checklist(&c.id, "1.1.0"), Some(&altered));
        assert!(dir.path().join("checklists/ie-dpc-gdpr-self-assessment@1.1.0.json").exists());
    }

    #[test]
    fn invalid_checklist_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let mut c = default_checklist();
        c.sections[0].questions.clear();
        assert_eq!(store.register_checklist(&c).unwrap_err().code(), "empty-section");
    }

    #[test]
    fn revisions_and_latest() {
        let dir = tempfile::tempdir().unwrap();
        let store = open_with_default(dir.path());
        let period: Period = "2019-01".parse().unwrap();

        assert_eq!(store.submit_assessment(assessment("orgA", "2019-01", 10)).unwrap(), 1);
        assert_eq!(store.load_latest("orgA", period).unwrap(), assessment("orgA", "2019-01", 10));
        assert_eq!(store.submit_assessment(assessment("orgA", "2019-01", 20)).unwrap(), 2);
        assert_eq!(store.load_latest("orgA", period).unwrap(), assessment("orgA", "2019-01", 20));
        assert_eq!(store.snapshot().history("orgA", period).len(), 2);

        assert!(matches!(store.load_latest("nobody", period), Err(Error::NotFound(_))));
    }

    #[test]
    fn unknown_checklist_and_invalid_submission() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let err = store.submit_assessment(assessment("orgA", "2019-01", 0)).unwrap_err();
        assert_eq!(err.code(), "unknown-checklist");

        store.register_checklist(&default_checklist()).unwrap();
        let mut a = assessment("orgA", "2019-01", 0);
        a.answers.pop();
        assert_eq!(store.submit_assessment(a).unwrap_err().code(), "missing-answer");
        assert!(store.list_periods("orgA").is_empty());
    }

    #[test]
    fn periods_ascending() {
        let dir = tempfile::tempdir().unwrap();
        let store = open_with_default(dir.path());
        assert!(store.list_periods("orgA").is_empty());
        for period in ["2019-04", "2019-01", "2019-06", "2019-02", "2019-05", "2019-03", "2019-01"] {
            store.submit_assessment(assessment("orgA", period, 30)).unwrap();
        }
        store.submit_assessment(assessment("orgB", "2018-12", 30)).unwrap();
        let periods: Vec<_> = store.list_periods("orgA").iter().map(ToString::to_string).collect();
        assert_eq!(periods, ["2019-01", "2019-02", "2019-03", "2019-04", "2019-05", "2019-06"]);
        assert_eq!(store.snapshot().orgs(), ["orgA", "orgB"]);
    }

    #[test]
    fn replay_reproduces_snapshot() {
        let dir = tempfile::tempdir().unwrap();
        let before = {
            let store = open_with_default(dir.path());
            store.submit_assessment(assessment("orgA", "2019-01", 10)).unwrap();
            store.submit_assessment(assessment("orgA", "2019-01", 11)).unwrap();
            store.submit_assessment(assessment("orgB", "2019-02", 12)).unwrap();
            store.snapshot()
        };
        let reopened = Store::open(dir.path()).unwrap();
        assert_eq!(*reopened.snapshot(), *before);
        assert_eq!(reopened.submit_assessment(assessment("orgA", "2019-01", 3)).unwrap(), 3);
    }

    #[test]
    fn cube_uses_latest_revisions() {
        let dir = tempfile::tempdir().unwrap();
        let store = open_with_default(dir.path());
        assert!(matches!(store.snapshot().cube("orgA", "http://x.example"), Err(Error::NotFound(_))));
        store.submit_assessment(assessment("orgA", "2019-01", 10)).unwrap();
        store.submit_assessment(assessment("orgA", "2019-02", 10)).unwrap();
        store.submit_assessment(assessment("orgA", "2019-02", 54)).unwrap();
        let cube = store.snapshot().cube("orgA", "http://x.example").unwrap();
        assert!(crate::cube::check_cube(&cube).ok);
        let total = crate::cube::Term::iri("http://x.example/obs/orgA/2019-02/overall");
        let ratio: Vec<_> = cube.objects(&total, "http://x.example/def/complianceRatio").collect();
        assert_eq!(ratio, [&crate::cube::Term::typed("1.0", crate::cube::vocab::XSD_DECIMAL)]);
    }

    #[test]
    fn torn_tail_is_skipped_and_sealed() {
        let dir = tempfile::tempdir().unwrap();
        let journal = dir.path().join(JOURNAL_FILE);
        let before = {
            let store = open_with_default(dir.path());
            store.submit_assessment(assessment("orgA", "2019-01", 10)).unwrap();
            store.snapshot()
        };
        let mut file = OpenOptions::new().append(true).open(&journal).unwrap();
        file.write_all(br#"{"kind":"submission","seq":3,"revis"#).unwrap();
        drop(file);

        let store = Store::open(dir.path()).unwrap();
        assert_eq!(*store.snapshot(), *before);
        assert_eq!(store.submit_assessment(assessment("orgA", "2019-01", 5)).unwrap(), 2);
        let after = store.snapshot();
        drop(store);
        assert_eq!(*Store::open(dir.path()).unwrap().snapshot(), *after);
    }

    #[test]
    fn journal_is_append_only() {
        let dir = tempfile::tempdir().unwrap();
        let journal = dir.path().join(JOURNAL_FILE);
        let store = open_with_default(dir.path());
        let mut previous = fs::read(&journal).unwrap();
        for compliant in [1, 2, 3] {
            store.submit_assessment(assessment("orgA", "2019-01", compliant)).unwrap();
            let _ = store.register_checklist(&default_checklist());
            let current = fs::read(&journal).unwrap();
            assert!(current.starts_with(&previous));
            previous = current;
        }
        let lines: Vec<serde_json::Value> = fs::read_to_string(&journal)
            .unwrap()
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0]["kind"], "checklist");
        assert_eq!(lines[3]["kind"], "submission");
        let seqs: Vec<_> = lines.iter().map(|l| l["seq"].as_u64().unwrap()).collect();
        assert_eq!(seqs, [1, 2, 3, 4]);
    }

    #[test]
    fn tampered_checklist_file_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        drop(open_with_default(dir.path()));
        let path = dir.path().join(CHECKLIST_DIR).join("ie-dpc-gdpr-self-assessment@1.0.0.json");
        let text = fs::read_to_string(&path).unwrap().replace("Data breach", "Breaches");
        fs::write(&path, text).unwrap();
        assert!(matches!(Store::open(dir.path()), Err(Error::CorruptJournal { line: 1, .. })));
    }

    #[test]
    fn revision_gap_is_corruption() {
        let dir = tempfile::tempdir().unwrap();
        {
            let store = open_with_default(dir.path());
            store.submit_assessment(assessment("orgA", "2019-01", 10)).unwrap();
        }
        let journal = dir.path().join(JOURNAL_FILE);
        let text = fs::read_to_string(&journal).unwrap();
        let line = text
            .lines()
            .nth(1)
            .unwrap()
            .replace(r#""seq":2,"revision":1"#, r#""seq":3,"revision":3"#);
        fs::write(&journal, format!("{text}{line}\n")).unwrap();
        assert!(matches!(Store::open(dir.path()), Err(Error::CorruptJournal { line: 3, .. })));
    }

    #[test]
    fn concurrent_submissions_get_distinct_revisions() {
        let dir = tempfile::tempdir().unwrap();
        let store = Arc::new(open_with_default(dir.path()));
        let handles: Vec<_> = (0..8)
            .map(|i| {
                let store = Arc::clone(&store);
                std::thread::spawn(move || store.submit_assessment(assessment("orgA", "2019-03", i)).unwrap())
            })
            .collect();
        let mut revisions: Vec<u32> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        revisions.sort_unstable();
        assert_eq!(revisions, (1..=8).collect::<Vec<_>>());
        let snapshot = store.snapshot();
        drop(store);
        assert_eq!(*Store::open(dir.path()).unwrap().snapshot(), *snapshot);
    }
}
