//! The discovery search: pull candidate input tuples from a choice
//! function, run the program on each, and report the ones that succeed.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::eval::{EvalError, Evaluator, Outcome};
use crate::imprat::{free_variables, validate, Diagnostic, Stmt};
use crate::relation::Dataset;
use crate::repository::{LookupError, Repository};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("invalid program: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    UnknownDataset(#[from] LookupError),
}

/// A validated program paired with the repository it searches. Dataset
/// literals are resolved once, here, so unknown names surface before any
/// candidate runs.
#[derive(Debug, Clone)]
pub struct DiscoveryProgram {
    program: Stmt,
    resolved: Stmt,
    repo: Repository,
    free: Vec<String>,
}

impl DiscoveryProgram {
    pub fn new(program: Stmt, repo: Repository) -> Result<Self, ProgramError> {
        let diags = validate(&program);
        if !diags.is_empty() {
            return Err(ProgramError::Invalid(diags));
        }
        let free = free_variables(&program).expect("validate rejects duplicate declarations");
        let resolved = program.resolve_literals(&mut |name| repo.lookup(name).cloned())?;
        Ok(DiscoveryProgram {
            program,
            resolved,
            repo,
            free,
        })
    }

    /// The program as given, with literals unresolved.
    pub fn program(&self) -> &Stmt {
        &self.program
    }

    /// The program with every literal replaced by its dataset.
    pub fn resolved(&self) -> &Stmt {
        &self.resolved
    }

    pub fn repo(&self) -> &Repository {
        &self.repo
    }

    pub fn free_variables(&self) -> &[String] {
        &self.free
    }

    pub fn arity(&self) -> usize {
        self.free.len()
    }

    /// Number of distinct candidate tuples, `None` on overflow.
    pub fn candidate_count(&self) -> Option<usize> {
        self.repo
            .len()
            .checked_pow(u32::try_from(self.arity()).ok()?)
    }

    /// The datasets a candidate names, in order.
    pub fn bind(&self, c: &CandidateInput) -> Result<Vec<Arc<Dataset>>, SolveError> {
        if c.len() != self.arity() {
            return Err(SolveError::InvalidCandidate {
                input: c.clone(),
                reason: format!("expected {} datasets", self.arity()),
            });
        }
        c.names()
            .iter()
            .map(|n| {
                self.repo
                    .get(n)
                    .cloned()
                    .ok_or_else(|| SolveError::InvalidCandidate {
                        input: c.clone(),
                        reason: format!("no dataset named \"{n}\""),
                    })
            })
            .collect()
    }

    pub fn run(&self, evaluator: &Evaluator, c: &CandidateInput) -> Result<Outcome, SolveError> {
        let inputs = self.bind(c)?;
        evaluator
            .run(&self.resolved, &inputs)
            .map_err(|source| SolveError::EngineFault {
                input: c.clone(),
                source,
            })
    }
}

/// An ordered tuple of dataset names; position i binds the i-th free
/// variable. Names may repeat.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CandidateInput(Vec<String>);

impl CandidateInput {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        CandidateInput(names.into_iter().map(Into::into).collect())
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for CandidateInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.join(", "))
    }
}

/// The candidates that have failed so far in one solve. Only grows.
#[derive(Debug, Clone, Default)]
pub struct Feedback {
    failed: HashSet<CandidateInput>,
}

impl Feedback {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false if `c` was already recorded.
    pub fn insert(&mut self, c: CandidateInput) -> bool {
        self.failed.insert(c)
    }

    pub fn contains(&self, c: &CandidateInput) -> bool {
        self.failed.contains(c)
    }

    pub fn len(&self) -> usize {
        self.failed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.failed.is_empty()
    }
}

/// A source of candidate inputs for one solve.
///
/// Implementations must never yield a candidate already in `feedback` and
/// never yield the same candidate twice; `None` means no candidates remain.
pub trait ChoiceFunction {
    fn name(&self) -> &str;

    fn next_candidate(
        &mut self,
        dp: &DiscoveryProgram,
        feedback: &Feedback,
    ) -> Option<CandidateInput>;
}

/// Depth-first enumeration of all `|repo|^n` tuples in catalog order: the
/// last position varies fastest, so `[A, B]` with n = 2 gives
/// `(A,A), (A,B), (B,A), (B,B)`.
#[derive(Debug, Clone, Default)]
pub struct Backtracking {
    // Catalog indices of the next tuple; `None` before the first call.
    next: Option<Vec<usize>>,
    done: bool,
}

impl Backtracking {
    pub fn new() -> Self {
        Self::default()
    }

    fn advance(&mut self, width: usize) {
        let Some(pos) = self.next.as_mut() else {
            return;
        };
        for i in (0..pos.len()).rev() {
            pos[i] += 1;
            if pos[i] < width {
                return;
            }
            pos[i] = 0;
        }
        // Wrapped around every position (including n = 0): enumeration is over.
        self.done = true;
    }
}

impl ChoiceFunction for Backtracking {
    fn name(&self) -> &str {
        "backtracking"
    }

    fn next_candidate(
        &mut self,
        dp: &DiscoveryProgram,
        feedback: &Feedback,
    ) -> Option<CandidateInput> {
        let names: Vec<&str> = dp.repo().names().collect();
        if self.next.is_none() {
            if dp.arity() > 0 && names.is_empty() {
                self.done = true;
            }
            self.next = Some(vec![0; dp.arity()]);
        }
        while !self.done {
            let pos = self.next.as_ref().expect("initialised above");
            let c = CandidateInput::new(pos.iter().map(|&i| names[i]));
            self.advance(names.len());
            if !feedback.contains(&c) {
                return Some(c);
            }
        }
        None
    }
}

/// Names accepted by [`choice_function`].
pub const CHOICE_FUNCTIONS: &[&str] = &["backtracking"];

/// Looks up a choice function by name.
pub fn choice_function(name: &str) -> Option<Box<dyn ChoiceFunction>> {
    match name {
        "backtracking" => Some(Box::new(Backtracking::new())),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub output: Arc<Dataset>,
    pub input: CandidateInput,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveResult {
    Success(Solution),
    /// Every candidate was tried and none succeeded.
    Exhausted,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("engine fault on input {input}: {source}")]
    EngineFault {
        input: CandidateInput,
        #[source]
        source: EvalError,
    },
    #[error("choice function yielded invalid input {input}: {reason}")]
    InvalidCandidate {
        input: CandidateInput,
        reason: String,
    },
}

/// Counters for one solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Evaluator runs.
    pub evaluations: u64,
    pub successes: u64,
    /// Candidates ending in ⊥.
    pub failures: u64,
    /// Candidates ending in ⊤, i.e. without reaching a return. Counted as
    /// failures too.
    pub completed_without_return: u64,
}

#[derive(Debug, Clone, Default)]
pub struct Solver {
    evaluator: Evaluator,
}

impl Solver {
    pub fn new(evaluator: Evaluator) -> Self {
        Solver { evaluator }
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    /// Returns the first successful candidate.
    pub fn solve(
        &self,
        dp: &DiscoveryProgram,
        choice: &mut dyn ChoiceFunction,
    ) -> Result<SolveResult, SolveError> {
        self.solve_with_stats(dp, choice).0
    }

    pub fn solve_with_stats(
        &self,
        dp: &DiscoveryProgram,
        choice: &mut dyn ChoiceFunction,
    ) -> (Result<SolveResult, SolveError>, SolveStats) {
        let mut all = self.solve_all(dp, choice);
        let result = match all.next() {
            Some(Ok(s)) => Ok(SolveResult::Success(s)),
            Some(Err(e)) => Err(e),
            None => Ok(SolveResult::Exhausted),
        };
        (result, all.stats())
    }

    /// Every successful candidate, lazily, in the choice function's order.
    pub fn solve_all<'a>(
        &'a self,
        dp: &'a DiscoveryProgram,
        choice: &'a mut dyn ChoiceFunction,
    ) -> Solutions<'a> {
        Solutions {
            solver: self,
            dp,
            choice,
            feedback: Feedback::new(),
            evaluated: HashSet::new(),
            stats: SolveStats::default(),
            finished: false,
        }
    }
}

/// Iterator returned by [`Solver::solve_all`]. Stops after the first error.
pub struct Solutions<'a> {
    solver: &'a Solver,
    dp: &'a DiscoveryProgram,
    choice: &'a mut dyn ChoiceFunction,
    feedback: Feedback,
    evaluated: HashSet<CandidateInput>,
    stats: SolveStats,
    finished: bool,
}

impl Solutions<'_> {
    pub fn stats(&self) -> SolveStats {
        self.stats
    }

    pub fn feedback(&self) -> &Feedback {
        &self.feedback
    }
}

impl Iterator for Solutions<'_> {
    type Item = Result<Solution, SolveError>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.finished {
            let Some(c) = self.choice.next_candidate(self.dp, &self.feedback) else {
                self.finished = true;
                break;
            };
            // A misbehaving choice function must not make us run a candidate twice.
            if !self.evaluated.insert(c.clone()) {
                continue;
            }
            self.stats.evaluations += 1;
            match self.dp.run(&self.solver.evaluator, &c) {
                Ok(Outcome::Success(output)) => {
                    self.stats.successes += 1;
                    return Some(Ok(Solution { output, input: c }));
                }
                Ok(Outcome::Failure) => {
                    self.stats.failures += 1;
                    self.feedback.insert(c);
                }
                Ok(Outcome::CompletedWithoutReturn) => {
                    self.stats.failures += 1;
                    self.stats.completed_without_return += 1;
                    self.feedback.insert(c);
                }
                Err(e) => {
                    self.finished = true;
                    return Some(Err(e));
                }
            }
        }
        None
    }
}
