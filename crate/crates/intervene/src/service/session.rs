//! Session state machine, independent of transport and storage.

use serde::{Deserialize, Serialize};

use intervene_core::graph::cpdag_of;
use intervene_core::ip::{build_instance, gain, terms_for, CostModel, TermKind};
use intervene_core::oracle::{answer_simulated, OracleError, PendingRound};
use intervene_core::planner::{close_round, propose, tests_for, PlanError, PlannerConfig, Proposal, RoundLog};
use intervene_core::{Dag, EdgeClass, InterventionSet, Pkg, Test, TestOutcome};

use crate::formats::{DagDocument, PkgDocument};

/// Error codes returned to clients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorCode {
    ValidationError,
    NotFoundError,
    SessionDoneError,
    UnknownTestError,
    DuplicateSubmissionError,
    NotViableError,
    ContradictionWarning,
    InfeasibleError,
    InternalError,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{code:?}: {message}")]
pub struct ServiceError {
    pub code: ErrorCode,
    pub message: String,
}

impl ServiceError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        ServiceError {
            code,
            message: message.into(),
        }
    }
}

impl From<PlanError> for ServiceError {
    fn from(e: PlanError) -> Self {
        let code = match &e {
            PlanError::NothingToDo => ErrorCode::SessionDoneError,
            PlanError::Ip(intervene_core::ip::IpError::Infeasible) | PlanError::Stalled => ErrorCode::InfeasibleError,
            PlanError::Ip(_) | PlanError::UnexpectedOutcome { .. } | PlanError::MissingOutcome { .. } => {
                ErrorCode::ValidationError
            }
            PlanError::Graph(_) => ErrorCode::ValidationError,
            _ => ErrorCode::InternalError,
        };
        ServiceError::new(code, e.to_string())
    }
}

impl From<OracleError> for ServiceError {
    fn from(e: OracleError) -> Self {
        let code = match &e {
            OracleError::UnknownTest { .. } => ErrorCode::UnknownTestError,
            OracleError::DuplicateSubmission { .. } => ErrorCode::DuplicateSubmissionError,
            _ => ErrorCode::ValidationError,
        };
        ServiceError::new(code, e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Mode {
    Interactive,
    /// Answers can be checked against (and generated from) a known truth.
    Demo {
        truth: DagDocument,
        #[serde(default)]
        accept_contradictions: bool,
    },
}

/// Body of a session-creation request.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CreateRequest {
    #[serde(default)]
    pub pkg: Option<PkgDocument>,
    #[serde(default)]
    pub truth: Option<DagDocument>,
    #[serde(default)]
    pub config: Option<PlannerConfig>,
    #[serde(default)]
    pub accept_contradictions: bool,
}

#[derive(Debug, Clone)]
struct OpenRound {
    proposal: Proposal,
    answers: PendingRound,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub mode: Mode,
    pub config: PlannerConfig,
    pkg: Pkg,
    truth: Option<Dag>,
    open: Option<OpenRound>,
    history: Vec<RoundLog>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposalView {
    pub round: usize,
    pub interventions: Vec<InterventionSet>,
    pub tests: Vec<Vec<Test>>,
    pub gain: f64,
    pub unanswered: Vec<Test>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub mode: Mode,
    pub round: usize,
    pub pkg: PkgDocument,
    pub ambiguity: usize,
    pub done: bool,
    pub pending: Option<ProposalView>,
    pub config: PlannerConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmitResult {
    /// True once every issued test has an answer and the round is folded in.
    pub closed: bool,
    pub unanswered: Vec<Test>,
    pub round: Option<RoundLog>,
    pub pkg: PkgDocument,
    pub ambiguity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairBreakdown {
    pub a: usize,
    pub b: usize,
    pub class: EdgeClass,
    pub weight: f64,
    pub tests: Vec<Test>,
    pub counted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhatIf {
    pub interventions: InterventionSet,
    pub gain: f64,
    pub pairs: Vec<PairBreakdown>,
}

impl Session {
    pub fn create(id: String, req: CreateRequest) -> Result<Session, ServiceError> {
        let invalid = |e: &dyn std::fmt::Display| ServiceError::new(ErrorCode::ValidationError, e.to_string());
        let truth = match &req.truth {
            Some(doc) => Some(doc.to_dag().map_err(|e| invalid(&e))?),
            None => None,
        };
        let pkg = match (&req.pkg, &truth) {
            (Some(doc), _) => doc.to_pkg().map_err(|e| invalid(&e))?,
            (None, Some(t)) => cpdag_of(t),
            (None, None) => {
                return Err(ServiceError::new(
                    ErrorCode::ValidationError,
                    "need a pkg or a truth dag",
                ))
            }
        };
        if let Some(t) = &truth {
            if t.n() != pkg.n() {
                return Err(ServiceError::new(
                    ErrorCode::ValidationError,
                    "truth and pkg sizes differ",
                ));
            }
        }
        let config = req.config.unwrap_or_default();
        let costs = config.costs.clone().unwrap_or_else(|| CostModel::zero(pkg.n()));
        build_instance(&pkg, &costs, &config.ip_config(0)).map_err(|e| invalid(&e))?;
        let mode = match &req.truth {
            Some(doc) => Mode::Demo {
                truth: doc.clone(),
                accept_contradictions: req.accept_contradictions,
            },
            None => Mode::Interactive,
        };
        Ok(Session {
            id,
            mode,
            config,
            pkg,
            truth,
            open: None,
            history: Vec::new(),
        })
    }

    pub fn pkg(&self) -> &Pkg {
        &self.pkg
    }

    pub fn history(&self) -> &[RoundLog] {
        &self.history
    }

    pub fn round(&self) -> usize {
        self.history.len()
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            id: self.id.clone(),
            mode: self.mode.clone(),
            round: self.round(),
            pkg: PkgDocument::from_pkg(&self.pkg),
            ambiguity: self.pkg.ambiguity(),
            done: self.pkg.is_resolved(),
            pending: self.open.as_ref().map(proposal_view),
            config: self.config.clone(),
        }
    }

    /// The open round's plan, computing it if no round is open. Returns
    /// whether a new proposal was made.
    pub fn proposal(&mut self) -> Result<(ProposalView, Option<Proposal>), ServiceError> {
        if let Some(open) = &self.open {
            return Ok((proposal_view(open), None));
        }
        if self.pkg.is_resolved() {
            return Err(ServiceError::new(ErrorCode::SessionDoneError, "every pair is resolved"));
        }
        let proposal = propose(&self.pkg, &self.config, self.round())?;
        self.install(proposal.clone());
        Ok((
            proposal_view(self.open.as_ref().expect("just installed")),
            Some(proposal),
        ))
    }

    /// Reinstates a proposal read back from storage.
    pub fn install(&mut self, proposal: Proposal) {
        let answers = PendingRound::issue(proposal.all_tests());
        self.open = Some(OpenRound { proposal, answers });
    }

    /// Checks a submission without applying it.
    pub fn check(&self, outcomes: &[TestOutcome], accept_contradictions: bool) -> Result<(), ServiceError> {
        let Some(open) = &self.open else {
            let test = outcomes.first().map(|o| o.test.to_string()).unwrap_or_default();
            return Err(ServiceError::new(
                ErrorCode::UnknownTestError,
                format!("no round is open; {test} was never issued"),
            ));
        };
        let mut trial = open.answers.clone();
        for o in outcomes {
            trial.submit(o.test, o.result)?;
        }
        if let (
            Some(truth),
            Mode::Demo {
                accept_contradictions: allowed,
                ..
            },
        ) = (&self.truth, &self.mode)
        {
            if !(accept_contradictions || *allowed) {
                for o in outcomes {
                    let batch = open
                        .proposal
                        .tests
                        .iter()
                        .position(|ts| ts.contains(&o.test))
                        .expect("issued tests belong to a batch");
                    let set = &open.proposal.batches[batch];
                    let expected = answer_simulated(truth, set, &[o.test])?;
                    if expected[0].result != o.result {
                        return Err(ServiceError::new(
                            ErrorCode::ContradictionWarning,
                            format!("{} = {:?} contradicts the demo truth", o.test, o.result),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Records answers; closes the round once all issued tests are answered.
    pub fn submit(
        &mut self,
        outcomes: &[TestOutcome],
        accept_contradictions: bool,
    ) -> Result<SubmitResult, ServiceError> {
        self.check(outcomes, accept_contradictions)?;
        let open = self.open.as_mut().expect("checked above");
        for o in outcomes {
            open.answers.submit(o.test, o.result)?;
        }
        let Some(all) = open.answers.complete_answer() else {
            return Ok(SubmitResult {
                closed: false,
                unanswered: open.answers.unanswered(),
                round: None,
                pkg: PkgDocument::from_pkg(&self.pkg),
                ambiguity: self.pkg.ambiguity(),
            });
        };
        let (pkg, log) = close_round(&self.pkg, &open.proposal, &all)?;
        self.pkg = pkg;
        self.open = None;
        self.history.push(log.clone());
        Ok(SubmitResult {
            closed: true,
            unanswered: Vec::new(),
            round: Some(log),
            pkg: PkgDocument::from_pkg(&self.pkg),
            ambiguity: self.pkg.ambiguity(),
        })
    }

    /// Truthful answers to the unanswered tests of the open round (demo
    /// sessions only).
    pub fn auto_answers(&mut self) -> Result<Vec<TestOutcome>, ServiceError> {
        let Some(truth) = self.truth.clone() else {
            return Err(ServiceError::new(
                ErrorCode::ValidationError,
                "session has no truth to answer from",
            ));
        };
        self.proposal()?;
        let open = self.open.as_ref().expect("proposal opens a round");
        let unanswered = open.answers.unanswered();
        let mut out = Vec::new();
        for (set, tests) in open.proposal.batches.iter().zip(&open.proposal.tests) {
            let mine: Vec<Test> = tests
                .iter()
                .filter(|t| unanswered.contains(t) && !out.iter().any(|o: &TestOutcome| o.test == **t))
                .copied()
                .collect();
            out.extend(answer_simulated(&truth, set, &mine)?);
        }
        Ok(out)
    }

    /// Scores a hand-picked intervention set without touching the session.
    pub fn whatif(&self, set: &InterventionSet) -> Result<WhatIf, ServiceError> {
        let viable = self.pkg.viable_vertices();
        if let Some(v) = set.iter().find(|v| viable.binary_search(v).is_err()) {
            return Err(ServiceError::new(
                ErrorCode::NotViableError,
                format!("vertex {v} is not incident to any uncertain pair"),
            ));
        }
        let ipc = self.config.ip_config(self.round());
        let costs = self
            .config
            .costs
            .clone()
            .unwrap_or_else(|| CostModel::zero(self.pkg.n()));
        let tests = tests_for(&self.pkg, set);
        let pairs = terms_for(&self.pkg, &ipc.objective)
            .into_iter()
            .map(|t| {
                let (lo, hi) = (t.a.min(t.b), t.a.max(t.b));
                PairBreakdown {
                    a: t.a,
                    b: t.b,
                    class: match t.kind {
                        TermKind::SemiDirected => self.pkg.class(t.a, t.b),
                        _ => self.pkg.class(lo, hi),
                    },
                    weight: t.weight,
                    tests: tests.iter().filter(|x| x.pair() == (lo, hi)).copied().collect(),
                    counted: t.counted(|v| set.contains(v)),
                }
            })
            .collect();
        Ok(WhatIf {
            interventions: set.clone(),
            gain: gain(&self.pkg, set.members(), &ipc.objective, &costs),
            pairs,
        })
    }
}

fn proposal_view(open: &OpenRound) -> ProposalView {
    ProposalView {
        round: open.proposal.round,
        interventions: open.proposal.batches.clone(),
        tests: open.proposal.tests.clone(),
        gain: open.proposal.gain,
        unanswered: open.answers.unanswered(),
    }
}
