use alloc::vec::Vec;
use core::fmt;

use super::{apply_axiom, CIStatement, CiError, Determinism, Rule, VarSet};

/// Where a proof step takes a premise from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepInput {
    /// Index into [`Proof::base`].
    Base(usize),
    /// Index of an earlier step.
    Step(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub rule: Rule,
    pub inputs: Vec<StepInput>,
    pub selection: VarSet,
    pub output: CIStatement,
}

/// An ordered trace of rule applications from base statements to a goal.
///
/// `base` lists only the base statements the trace actually uses. A proof
/// with no steps certifies a goal that is itself a base statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub base: Vec<CIStatement>,
    pub steps: Vec<ProofStep>,
    pub goal: CIStatement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplayError {
    /// A step refers to a base statement or step that is not before it.
    DanglingInput { step: usize },
    /// The rule rejected the recorded premises.
    Rejected { step: usize, error: CiError },
    /// The rule produced something other than the recorded output.
    OutputMismatch { step: usize },
    /// The trace does not end in the goal.
    GoalMismatch,
}

impl fmt::Display for ReplayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplayError::DanglingInput { step } => write!(f, "step {step} uses a later or missing premise"),
            ReplayError::Rejected { step, error } => write!(f, "step {step} does not apply: {error}"),
            ReplayError::OutputMismatch { step } => write!(f, "step {step} does not reproduce its output"),
            ReplayError::GoalMismatch => f.write_str("trace does not conclude the goal"),
        }
    }
}

impl core::error::Error for ReplayError {}

impl Proof {
    /// Re-applies every step through [`apply_axiom`] and checks that each
    /// recorded output, and finally the goal, is reproduced exactly.
    pub fn replay(&self, det: &Determinism) -> Result<(), ReplayError> {
        let mut outputs: Vec<CIStatement> = Vec::with_capacity(self.steps.len());
        for (i, step) in self.steps.iter().enumerate() {
            let premises = step
                .inputs
                .iter()
                .map(|input| match *input {
                    StepInput::Base(k) => self.base.get(k).copied(),
                    StepInput::Step(k) if k < i => Some(outputs[k]),
                    StepInput::Step(_) => None,
                })
                .collect::<Option<Vec<_>>>()
                .ok_or(ReplayError::DanglingInput { step: i })?;
            let out = apply_axiom(step.rule, &premises, step.selection, det)
                .map_err(|error| ReplayError::Rejected { step: i, error })?;
            if out != step.output {
                return Err(ReplayError::OutputMismatch { step: i });
            }
            outputs.push(out);
        }
        let concluded = match outputs.last() {
            Some(last) => *last == self.goal,
            None => self.base.contains(&self.goal),
        };
        if concluded {
            Ok(())
        } else {
            Err(ReplayError::GoalMismatch)
        }
    }

    /// Base statements followed by every step output, in trace order.
    pub fn statements(&self) -> impl Iterator<Item = &CIStatement> + '_ {
        self.base.iter().chain(self.steps.iter().map(|s| &s.output))
    }

    pub fn mentions(&self, s: &CIStatement) -> bool {
        self.statements().any(|t| t == s)
    }
}
