//! Team coding of candidates: per-coder verdicts across rounds, discrepancy
//! detection, round resolution and the validated-form export.
//!
//! All state derives from an append-only journal of [`JournalEntry`] lines.
//! [`ValidationState::replay`] rebuilds the state from the journal alone, and
//! [`Codebook`] is the journaled writer used by the CLI and serve mode.
//!
//! Consensus is unanimity-or-override: a candidate is valid (or invalid) when
//! every required coder's latest verdict agrees, or when a resolution entry
//! overrides it. Required coders are the registered coders when the policy
//! names any, otherwise everyone who has decided on the candidate.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::NGramCandidate;
use crate::forms::ValidatedFormSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Valid,
    Invalid,
    Discuss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Consensus {
    Valid,
    Invalid,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodingDecision {
    /// Candidate tokens joined by single spaces.
    pub term: String,
    pub coder_id: String,
    pub round: u32,
    pub verdict: Verdict,
    #[serde(default)]
    pub comment: String,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JournalEntry {
    Decision(CodingDecision),
    Override {
        term: String,
        verdict: Verdict,
        note: String,
        round: u32,
        /// Set when the verdict was imported from a published list rather
        /// than resolved in a coding round.
        #[serde(default)]
        imported: bool,
    },
    Deferral {
        term: String,
        round: u32,
        #[serde(default)]
        note: String,
    },
    RoundClosed {
        round: u32,
        codebook_version: u32,
        #[serde(default)]
        note: String,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsensusPolicy {
    /// Coders whose verdicts are all required; empty means "everyone who
    /// has decided on the candidate".
    pub registered_coders: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatestVerdict {
    pub round: u32,
    pub verdict: Verdict,
    pub comment: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundVerdict {
    pub round: u32,
    pub coder_id: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverrideEntry {
    pub verdict: Verdict,
    pub note: String,
    pub round: u32,
    pub imported: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateState {
    pub latest: BTreeMap<String, LatestVerdict>,
    pub history: Vec<RoundVerdict>,
    #[serde(rename = "override")]
    pub override_entry: Option<OverrideEntry>,
    pub deferred_in: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangelogEntry {
    pub codebook_version: u32,
    pub round: u32,
    pub overrides: usize,
    pub deferrals: usize,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationState {
    known: BTreeSet<String>,
    policy: ConsensusPolicy,
    candidates: BTreeMap<String, CandidateState>,
    current_round: u32,
    codebook_version: u32,
    changelog: Vec<ChangelogEntry>,
    pending_overrides: usize,
    pending_deferrals: usize,
}

/// A moderator's call on one candidate when closing a round. `None` defers
/// the candidate to the next round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub term: String,
    pub verdict: Option<Verdict>,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progress {
    pub current_round: u32,
    pub codebook_version: u32,
    pub candidates: usize,
    pub undecided: usize,
    pub consensus: BTreeMap<Consensus, usize>,
    pub decisions_per_coder: BTreeMap<String, usize>,
    pub discrepancies: usize,
}

impl ValidationState {
    pub fn new<I, S>(known_terms: I, policy: ConsensusPolicy) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ValidationState {
            known: known_terms.into_iter().map(Into::into).collect(),
            policy,
            candidates: BTreeMap::new(),
            current_round: 1,
            codebook_version: 1,
            changelog: Vec::new(),
            pending_overrides: 0,
            pending_deferrals: 0,
        }
    }

    /// Rebuilds state from journal entries, validating each one in order.
    pub fn replay<'a, 'e>(
        known_terms: impl IntoIterator<Item = &'a str>,
        policy: ConsensusPolicy,
        entries: impl IntoIterator<Item = &'e JournalEntry>,
    ) -> Result<Self> {
        let mut state = Self::new(known_terms, policy);
        for entry in entries {
            state.validate(entry)?;
            state.apply_valid(entry);
        }
        Ok(state)
    }

    pub fn current_round(&self) -> u32 {
        self.current_round
    }

    pub fn codebook_version(&self) -> u32 {
        self.codebook_version
    }

    pub fn changelog(&self) -> &[ChangelogEntry] {
        &self.changelog
    }

    pub fn policy(&self) -> &ConsensusPolicy {
        &self.policy
    }

    pub fn known_terms(&self) -> impl Iterator<Item = &str> {
        self.known.iter().map(String::as_str)
    }

    pub fn is_known(&self, term: &str) -> bool {
        self.known.contains(term)
    }

    pub fn candidate(&self, term: &str) -> Option<&CandidateState> {
        self.candidates.get(term)
    }

    fn require_known(&self, term: &str) -> Result<()> {
        if self.known.contains(term) {
            Ok(())
        } else {
            Err(Error::UnknownCandidate(term.to_owned()))
        }
    }

    /// Checks that `entry` may be appended to the journal now.
    pub fn validate(&self, entry: &JournalEntry) -> Result<()> {
        match entry {
            JournalEntry::Decision(d) => {
                self.require_known(&d.term)?;
                if d.round != self.current_round {
                    return Err(Error::RoundNotOpen {
                        submitted: d.round,
                        current: self.current_round,
                    });
                }
                if d.coder_id.trim().is_empty() {
                    return Err(Error::InvalidArgument("coder_id is empty".into()));
                }
                Ok(())
            }
            JournalEntry::Override { term, verdict, .. } => {
                self.require_known(term)?;
                if *verdict == Verdict::Discuss {
                    return Err(Error::InvalidVerdict("an override must be valid or invalid".into()));
                }
                Ok(())
            }
            JournalEntry::Deferral { term, .. } => self.require_known(term),
            JournalEntry::RoundClosed {
                round,
                codebook_version,
                ..
            } => {
                if *round != self.current_round || *codebook_version != self.codebook_version + 1 {
                    return Err(Error::InvalidArgument(format!(
                        "round close out of sequence: round {round} version {codebook_version}"
                    )));
                }
                Ok(())
            }
        }
    }

    fn apply_valid(&mut self, entry: &JournalEntry) {
        match entry {
            JournalEntry::Decision(d) => {
                let c = self.candidates.entry(d.term.clone()).or_default();
                c.history.push(RoundVerdict {
                    round: d.round,
                    coder_id: d.coder_id.clone(),
                    verdict: d.verdict,
                });
                c.latest.insert(
                    d.coder_id.clone(),
                    LatestVerdict {
                        round: d.round,
                        verdict: d.verdict,
                        comment: d.comment.clone(),
                    },
                );
            }
            JournalEntry::Override {
                term,
                verdict,
                note,
                round,
                imported,
            } => {
                self.candidates.entry(term.clone()).or_default().override_entry = Some(OverrideEntry {
                    verdict: *verdict,
                    note: note.clone(),
                    round: *round,
                    imported: *imported,
                });
                self.pending_overrides += 1;
            }
            JournalEntry::Deferral { term, round, .. } => {
                self.candidates.entry(term.clone()).or_default().deferred_in.push(*round);
                self.pending_deferrals += 1;
            }
            JournalEntry::RoundClosed {
                round,
                codebook_version,
                note,
            } => {
                self.changelog.push(ChangelogEntry {
                    codebook_version: *codebook_version,
                    round: *round,
                    overrides: self.pending_overrides,
                    deferrals: self.pending_deferrals,
                    note: note.clone(),
                });
                self.pending_overrides = 0;
                self.pending_deferrals = 0;
                self.codebook_version = *codebook_version;
                self.current_round = round + 1;
            }
        }
    }

    /// Consensus for one candidate.
    pub fn consensus(&self, term: &str) -> Consensus {
        let Some(c) = self.candidates.get(term) else {
            return Consensus::Unresolved;
        };
        if let Some(o) = &c.override_entry {
            return match o.verdict {
                Verdict::Valid => Consensus::Valid,
                Verdict::Invalid => Consensus::Invalid,
                Verdict::Discuss => Consensus::Unresolved,
            };
        }
        let verdicts: Vec<Option<Verdict>> = if self.policy.registered_coders.is_empty() {
            c.latest.values().map(|l| Some(l.verdict)).collect()
        } else {
            self.policy
                .registered_coders
                .iter()
                .map(|coder| c.latest.get(coder).map(|l| l.verdict))
                .collect()
        };
        if verdicts.is_empty() {
            Consensus::Unresolved
        } else if verdicts.iter().all(|v| *v == Some(Verdict::Valid)) {
            Consensus::Valid
        } else if verdicts.iter().all(|v| *v == Some(Verdict::Invalid)) {
            Consensus::Invalid
        } else {
            Consensus::Unresolved
        }
    }

    /// Candidates without an override whose latest verdicts disagree or
    /// include "discuss", sorted by term.
    pub fn detect_discrepancies(&self) -> Vec<String> {
        self.candidates
            .iter()
            .filter(|(_, c)| c.override_entry.is_none())
            .filter(|(_, c)| {
                let mut verdicts = c.latest.values().map(|l| l.verdict);
                let first = verdicts.next();
                first == Some(Verdict::Discuss)
                    || verdicts.any(|v| Some(v) != first || v == Verdict::Discuss)
            })
            .map(|(t, _)| t.clone())
            .collect()
    }

    /// Journal entries that close the current round with `resolutions`.
    pub fn plan_resolution(&self, resolutions: &[Resolution], note: &str) -> Result<Vec<JournalEntry>> {
        let mut addressed = BTreeSet::new();
        let mut entries = Vec::new();
        for r in resolutions {
            self.require_known(&r.term)?;
            addressed.insert(r.term.as_str());
            entries.push(match r.verdict {
                Some(Verdict::Discuss) => {
                    return Err(Error::InvalidVerdict(format!(
                        "{}: a resolution must be valid, invalid or a deferral",
                        r.term
                    )))
                }
                Some(verdict) => JournalEntry::Override {
                    term: r.term.clone(),
                    verdict,
                    note: r.note.clone(),
                    round: self.current_round,
                    imported: false,
                },
                None => JournalEntry::Deferral {
                    term: r.term.clone(),
                    round: self.current_round,
                    note: r.note.clone(),
                },
            });
        }
        let missing: Vec<String> = self
            .detect_discrepancies()
            .into_iter()
            .filter(|t| !addressed.contains(t.as_str()))
            .collect();
        if !missing.is_empty() {
            return Err(Error::UnaddressedDiscrepancies(missing));
        }
        entries.push(JournalEntry::RoundClosed {
            round: self.current_round,
            codebook_version: self.codebook_version + 1,
            note: note.to_owned(),
        });
        Ok(entries)
    }

    pub fn progress(&self) -> Progress {
        let mut p = Progress {
            current_round: self.current_round,
            codebook_version: self.codebook_version,
            candidates: self.known.len(),
            discrepancies: self.detect_discrepancies().len(),
            ..Default::default()
        };
        for term in &self.known {
            *p.consensus.entry(self.consensus(term)).or_default() += 1;
            let decided = self.candidates.get(term).is_some_and(|c| !c.latest.is_empty());
            if !decided {
                p.undecided += 1;
            }
        }
        for c in self.candidates.values() {
            for coder in c.latest.keys() {
                *p.decisions_per_coder.entry(coder.clone()).or_default() += 1;
            }
        }
        p
    }
}

/// Candidates with valid consensus, joined with their extraction aggregates.
/// Single-document forms are kept.
pub fn export_validated(state: &ValidationState, candidates: &[NGramCandidate]) -> ValidatedFormSet {
    ValidatedFormSet::new(
        candidates
            .iter()
            .filter(|c| state.consensus(&c.term()) == Consensus::Valid)
            .cloned()
            .collect(),
    )
}

/// Append-only JSON-lines journal.
#[derive(Debug, Clone)]
pub struct Journal {
    path: PathBuf,
}

impl Journal {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Journal { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Entries in file order; a missing file is an empty journal.
    pub fn read(&self) -> Result<Vec<JournalEntry>> {
        let file = match fs::File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(Error::io(&self.path, e)),
        };
        let mut out = Vec::new();
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::io(&self.path, e))?;
            if !line.trim().is_empty() {
                out.push(serde_json::from_str(&line)?);
            }
        }
        Ok(out)
    }

    /// Appends entries as one write and syncs before returning.
    pub fn append(&self, entries: &[JournalEntry]) -> Result<()> {
        let mut buf = Vec::new();
        for e in entries {
            serde_json::to_writer(&mut buf, e)?;
            buf.push(b'\n');
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| Error::io(&self.path, e))?;
        file.write_all(&buf).map_err(|e| Error::io(&self.path, e))?;
        file.sync_data().map_err(|e| Error::io(&self.path, e))
    }
}

/// Validation state plus its journal. Every accepted write reaches the
/// journal before the in-memory state changes.
#[derive(Debug, Clone)]
pub struct Codebook {
    state: ValidationState,
    journal: Option<Journal>,
    entries: Vec<JournalEntry>,
}

impl Codebook {
    pub fn in_memory(state: ValidationState) -> Self {
        Codebook {
            state,
            journal: None,
            entries: Vec::new(),
        }
    }

    /// Opens (or starts) a journal and replays it.
    pub fn open<'a>(
        journal: Journal,
        known_terms: impl IntoIterator<Item = &'a str>,
        policy: ConsensusPolicy,
    ) -> Result<Self> {
        let entries = journal.read()?;
        let state = ValidationState::replay(known_terms, policy, &entries)?;
        Ok(Codebook {
            state,
            journal: Some(journal),
            entries,
        })
    }

    pub fn state(&self) -> &ValidationState {
        &self.state
    }

    pub fn entries(&self) -> &[JournalEntry] {
        &self.entries
    }

    fn commit(&mut self, entries: Vec<JournalEntry>) -> Result<()> {
        if let Some(j) = &self.journal {
            j.append(&entries)?;
        }
        for e in &entries {
            self.state.apply_valid(e);
        }
        self.entries.extend(entries);
        Ok(())
    }

    /// Stores a decision; a same-round resubmission by the same coder
    /// supersedes the earlier one.
    pub fn record_decision(&mut self, decision: CodingDecision) -> Result<()> {
        let entry = JournalEntry::Decision(decision);
        self.state.validate(&entry)?;
        self.commit(vec![entry])
    }

    /// Records overrides and deferrals, bumps the codebook version and opens
    /// the next round. Returns the new version.
    pub fn resolve_round(&mut self, resolutions: &[Resolution], note: &str) -> Result<u32> {
        let entries = self.state.plan_resolution(resolutions, note)?;
        self.commit(entries)?;
        Ok(self.state.codebook_version())
    }

    /// Marks terms valid from a published list, flagged as imported.
    pub fn import_validated(&mut self, terms: &[String], note: &str) -> Result<usize> {
        let mut entries = Vec::new();
        for t in terms {
            let e = JournalEntry::Override {
                term: t.clone(),
                verdict: Verdict::Valid,
                note: note.to_owned(),
                round: self.state.current_round(),
                imported: true,
            };
            self.state.validate(&e)?;
            entries.push(e);
        }
        let n = entries.len();
        self.commit(entries)?;
        Ok(n)
    }
}
