//! Derivations routed through intermediate lemmas.

use alloc::vec::Vec;

use hashbrown::HashMap;

use super::{saturate_towards, CIStatement, DeriveError, Determinism, Proof, ProofStep, StepInput};

/// Proves `goal` by first proving each of `lemmas` in order, making every
/// proved lemma available as a premise for the later ones. The sub-proofs
/// are stitched into a single trace, and steps that do not contribute to
/// the goal are pruned, so a lemma survives only if the goal's derivation
/// actually uses it.
pub fn derive_via(
    base: &[CIStatement],
    det: &Determinism,
    lemmas: &[CIStatement],
    goal: &CIStatement,
    budget: usize,
) -> Result<Proof, DeriveError> {
    let universe = base
        .iter()
        .chain(lemmas)
        .fold(goal.symbols().union(det.symbols()), |u, s| u.union(s.symbols()));

    let mut premises: Vec<CIStatement> = base.to_vec();
    premises.sort_unstable();
    premises.dedup();

    let mut trace = Trace::default();
    for target in lemmas.iter().chain(core::iter::once(goal)) {
        let sat = saturate_towards(&premises, det, universe, core::slice::from_ref(target), budget)?;
        let proof = match sat.proof_of(target) {
            Some(p) => p,
            None if sat.is_saturated() => {
                return Err(DeriveError::NotDerivable {
                    closure_size: sat.len(),
                })
            }
            None => return Err(DeriveError::BudgetExhausted { explored: sat.len() }),
        };
        trace.append(&proof);
        if let Err(at) = premises.binary_search(target) {
            premises.insert(at, *target);
        }
    }
    Ok(trace.finish(*goal))
}

#[derive(Default)]
struct Trace {
    base: Vec<CIStatement>,
    steps: Vec<ProofStep>,
    // Where each known statement is available: a base slot or a step.
    at: HashMap<CIStatement, StepInput>,
}

impl Trace {
    fn locate(&mut self, s: CIStatement) -> StepInput {
        if let Some(&input) = self.at.get(&s) {
            return input;
        }
        let input = StepInput::Base(self.base.len());
        self.base.push(s);
        self.at.insert(s, input);
        input
    }

    fn append(&mut self, proof: &Proof) {
        let base_inputs: Vec<StepInput> = proof.base.iter().map(|&s| self.locate(s)).collect();
        let mut step_inputs: Vec<StepInput> = Vec::with_capacity(proof.steps.len());
        for step in &proof.steps {
            if let Some(&known) = self.at.get(&step.output) {
                step_inputs.push(known);
                continue;
            }
            let inputs = step
                .inputs
                .iter()
                .map(|i| match *i {
                    StepInput::Base(k) => base_inputs[k],
                    StepInput::Step(k) => step_inputs[k],
                })
                .collect();
            let here = StepInput::Step(self.steps.len());
            self.steps.push(ProofStep {
                rule: step.rule,
                inputs,
                selection: step.selection,
                output: step.output,
            });
            self.at.insert(step.output, here);
            step_inputs.push(here);
        }
    }

    fn finish(self, goal: CIStatement) -> Proof {
        let mut used_base = alloc::vec![false; self.base.len()];
        let mut used_step = alloc::vec![false; self.steps.len()];
        let mut stack = alloc::vec![self.at[&goal]];
        while let Some(input) = stack.pop() {
            match input {
                StepInput::Base(k) => used_base[k] = true,
                StepInput::Step(k) => {
                    if !core::mem::replace(&mut used_step[k], true) {
                        stack.extend_from_slice(&self.steps[k].inputs);
                    }
                }
            }
        }
        let mut base_pos = alloc::vec![usize::MAX; self.base.len()];
        let mut base = Vec::new();
        for (k, s) in self.base.into_iter().enumerate() {
            if used_base[k] {
                base_pos[k] = base.len();
                base.push(s);
            }
        }
        let mut step_pos = alloc::vec![usize::MAX; self.steps.len()];
        let mut steps = Vec::new();
        for (k, mut step) in self.steps.into_iter().enumerate() {
            if !used_step[k] {
                continue;
            }
            for input in &mut step.inputs {
                *input = match *input {
                    StepInput::Base(j) => StepInput::Base(base_pos[j]),
                    StepInput::Step(j) => StepInput::Step(step_pos[j]),
                };
            }
            step_pos[k] = steps.len();
            steps.push(step);
        }
        Proof { base, steps, goal }
    }
}
