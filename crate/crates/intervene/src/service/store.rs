//! Session registry with an append-only event log per session.
//!
//! Each session owns `<id>.events.jsonl` (one event per line: created,
//! proposed, outcome, closed) and `<id>.snapshot.json`, rewritten after
//! every closed round. On start-up the log is replayed through the same
//! code paths that produced it and the result is checked against the
//! snapshot.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};

use intervene_core::planner::{Proposal, RoundLog};
use intervene_core::{InterventionSet, TestOutcome};

use super::session::{
    CreateRequest, ErrorCode, ProposalView, ServiceError, Session, SessionView, SubmitResult, WhatIf,
};
use crate::formats::PkgDocument;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "lowercase")]
pub enum Event {
    Created {
        id: String,
        request: Box<CreateRequest>,
    },
    Proposed {
        proposal: Proposal,
    },
    Outcome {
        outcomes: Vec<TestOutcome>,
        accept_contradictions: bool,
    },
    Closed {
        round: usize,
        pkg: PkgDocument,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Snapshot {
    pub session: SessionView,
    pub history: Vec<RoundLog>,
}

type Shared = Arc<Mutex<Session>>;

#[derive(Debug, Default)]
pub struct Store {
    dir: Option<PathBuf>,
    sessions: RwLock<HashMap<String, Shared>>,
}

fn internal(e: impl std::fmt::Display) -> ServiceError {
    ServiceError::new(ErrorCode::InternalError, e.to_string())
}

impl Store {
    /// A store that keeps nothing on disk.
    pub fn in_memory() -> Self {
        Store::default()
    }

    /// Opens (creating if needed) `dir` and replays every session in it.
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let mut sessions = HashMap::new();
        for entry in fs::read_dir(&dir)? {
            let path = entry?.path();
            let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
                continue;
            };
            if let Some(id) = name.strip_suffix(".events.jsonl") {
                let session =
                    replay(&path).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{name}: {e}")))?;
                check_snapshot(&dir, id, &session)?;
                sessions.insert(id.to_owned(), Arc::new(Mutex::new(session)));
            }
        }
        Ok(Store {
            dir: Some(dir),
            sessions: RwLock::new(sessions),
        })
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.read().expect("lock").keys().cloned().collect();
        ids.sort();
        ids
    }

    fn get(&self, id: &str) -> Result<Shared, ServiceError> {
        self.sessions
            .read()
            .expect("lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::new(ErrorCode::NotFoundError, format!("no session {id}")))
    }

    fn append(&self, id: &str, event: &Event) -> Result<(), ServiceError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let mut line = serde_json::to_string(event).map_err(internal)?;
        line.push('\n');
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(dir.join(format!("{id}.events.jsonl")))
            .map_err(internal)?;
        f.write_all(line.as_bytes()).map_err(internal)?;
        f.sync_data().map_err(internal)
    }

    fn snapshot(&self, session: &Session) -> Result<(), ServiceError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let snap = Snapshot {
            session: session.view(),
            history: session.history().to_vec(),
        };
        let tmp = dir.join(format!("{}.snapshot.json.tmp", session.id));
        fs::write(&tmp, serde_json::to_vec_pretty(&snap).map_err(internal)?).map_err(internal)?;
        fs::rename(&tmp, dir.join(format!("{}.snapshot.json", session.id))).map_err(internal)
    }

    pub fn create(&self, request: CreateRequest) -> Result<SessionView, ServiceError> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = Session::create(id.clone(), request.clone())?;
        self.append(
            &id,
            &Event::Created {
                id: id.clone(),
                request: Box::new(request),
            },
        )?;
        self.snapshot(&session)?;
        let view = session.view();
        self.sessions
            .write()
            .expect("lock")
            .insert(id, Arc::new(Mutex::new(session)));
        Ok(view)
    }

    pub fn view(&self, id: &str) -> Result<SessionView, ServiceError> {
        Ok(self.get(id)?.lock().expect("lock").view())
    }

    pub fn history(&self, id: &str) -> Result<Vec<RoundLog>, ServiceError> {
        Ok(self.get(id)?.lock().expect("lock").history().to_vec())
    }

    pub fn proposal(&self, id: &str) -> Result<ProposalView, ServiceError> {
        let shared = self.get(id)?;
        let mut s = shared.lock().expect("lock");
        let (view, fresh) = s.proposal()?;
        if let Some(proposal) = fresh {
            self.append(id, &Event::Proposed { proposal })?;
        }
        Ok(view)
    }

    pub fn submit(
        &self,
        id: &str,
        outcomes: &[TestOutcome],
        accept_contradictions: bool,
    ) -> Result<SubmitResult, ServiceError> {
        let shared = self.get(id)?;
        let mut s = shared.lock().expect("lock");
        self.submit_locked(&mut s, outcomes, accept_contradictions)
    }

    fn submit_locked(
        &self,
        s: &mut Session,
        outcomes: &[TestOutcome],
        accept: bool,
    ) -> Result<SubmitResult, ServiceError> {
        // validate before logging so the log only holds accepted submissions
        s.check(outcomes, accept)?;
        self.append(
            &s.id,
            &Event::Outcome {
                outcomes: outcomes.to_vec(),
                accept_contradictions: accept,
            },
        )?;
        let result = s.submit(outcomes, accept)?;
        if result.closed {
            self.append(
                &s.id,
                &Event::Closed {
                    round: s.round(),
                    pkg: result.pkg.clone(),
                },
            )?;
            self.snapshot(s)?;
        }
        Ok(result)
    }

    /// Answers the open round from the demo truth and closes it.
    pub fn autoanswer(&self, id: &str) -> Result<SubmitResult, ServiceError> {
        let shared = self.get(id)?;
        let mut s = shared.lock().expect("lock");
        let (_, fresh) = s.proposal()?;
        if let Some(proposal) = fresh {
            self.append(id, &Event::Proposed { proposal })?;
        }
        let answers = s.auto_answers()?;
        self.submit_locked(&mut s, &answers, false)
    }

    pub fn whatif(&self, id: &str, set: &InterventionSet) -> Result<WhatIf, ServiceError> {
        self.get(id)?.lock().expect("lock").whatif(set)
    }
}

fn replay(path: &Path) -> Result<Session, ServiceError> {
    let reader = BufReader::new(File::open(path).map_err(internal)?);
    let mut session: Option<Session> = None;
    for (k, line) in reader.lines().enumerate() {
        let line = line.map_err(internal)?;
        if line.trim().is_empty() {
            continue;
        }
        let event: Event = serde_json::from_str(&line).map_err(|e| internal(format!("line {}: {e}", k + 1)))?;
        match (event, session.as_mut()) {
            (Event::Created { id, request }, None) => session = Some(Session::create(id, *request)?),
            (Event::Proposed { proposal }, Some(s)) => s.install(proposal),
            (
                Event::Outcome {
                    outcomes,
                    accept_contradictions,
                },
                Some(s),
            ) => {
                s.submit(&outcomes, accept_contradictions)?;
            }
            (Event::Closed { round, pkg }, Some(s)) => {
                if s.round() != round || PkgDocument::from_pkg(s.pkg()) != pkg {
                    return Err(internal(format!("replay diverged at round {round}")));
                }
            }
            (_, _) => return Err(internal(format!("line {}: event out of order", k + 1))),
        }
    }
    session.ok_or_else(|| internal("empty event log"))
}

fn check_snapshot(dir: &Path, id: &str, session: &Session) -> io::Result<()> {
    let path = dir.join(format!("{id}.snapshot.json"));
    let Ok(text) = fs::read_to_string(&path) else {
        return Ok(());
    };
    let snap: Snapshot = serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    // the snapshot trails the log by at most the open round
    if snap.session.round == session.round() && snap.session.pkg != PkgDocument::from_pkg(session.pkg()) {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("{id}: snapshot disagrees with the replayed log"),
        ));
    }
    Ok(())
}
