use std::collections::HashSet;

use thiserror::Error;

use super::{Clause, CnfFormula, Literal, ResolutionProof};

/// Why a proof was rejected. Step numbers are 0-based positions in the step
/// list; clause ids are as in the proof.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProofFault {
    #[error("input clause {id} is not a clause of the formula")]
    ForeignInput { id: usize },

    #[error("step {step} (id {id}): operand {operand} is not an earlier clause")]
    BadOperand {
        step: usize,
        id: usize,
        operand: usize,
    },

    #[error("step {step} (id {id}): {left} and {right} do not clash on variable {pivot}")]
    BadPivot {
        step: usize,
        id: usize,
        left: usize,
        right: usize,
        pivot: u32,
    },

    #[error("step {step} (id {id}): resolving {left} and {right} on {pivot} gives a tautology")]
    Tautology {
        step: usize,
        id: usize,
        left: usize,
        right: usize,
        pivot: u32,
    },

    #[error("step {step} (id {id}): declared resolvent differs from the resolvent of {left} and {right} on {pivot}")]
    WrongResolvent {
        step: usize,
        id: usize,
        left: usize,
        right: usize,
        pivot: u32,
    },

    #[error("the proof does not end with the empty clause")]
    NotRefutation,
}

/// Checks that `p` refutes `f`: every input is a formula clause, every step
/// is a resolution on its declared pivot between earlier clauses with the
/// declared resolvent, and the last resolvent is empty.
pub fn check_proof(f: &CnfFormula, p: &ResolutionProof) -> Result<(), ProofFault> {
    let formula: HashSet<&Clause> = f.clauses().iter().collect();
    if let Some(id) = p.inputs.iter().position(|c| !formula.contains(c)) {
        return Err(ProofFault::ForeignInput { id });
    }
    let m = p.inputs.len();
    let fetch = |id: usize| -> Option<&Clause> {
        if id < m {
            p.inputs.get(id)
        } else {
            p.steps.get(id - m).map(|s| &s.resolvent)
        }
    };
    for (step, s) in p.steps.iter().enumerate() {
        let id = m + step;
        let (left, right, pivot) = (s.left, s.right, s.pivot);
        let mut operands = [None, None];
        for (slot, operand) in operands.iter_mut().zip([left, right]) {
            if operand >= id {
                return Err(ProofFault::BadOperand { step, id, operand });
            }
            *slot = fetch(operand);
        }
        let [Some(a), Some(b)] = operands else {
            unreachable!("operands below the current id exist");
        };
        let has = |c: &Clause, positive: bool| {
            c.literals()
                .iter()
                .any(|l| l.var() == pivot && l.is_positive() == positive)
        };
        let oriented = (has(a, true) && has(b, false)) || (has(a, false) && has(b, true));
        if pivot == 0 || !oriented {
            return Err(ProofFault::BadPivot {
                step,
                id,
                left,
                right,
                pivot,
            });
        }
        let rest: Vec<Literal> = a
            .literals()
            .iter()
            .chain(b.literals())
            .copied()
            .filter(|l| l.var() != pivot)
            .collect();
        let Some(resolvent) = Clause::new(rest) else {
            return Err(ProofFault::Tautology {
                step,
                id,
                left,
                right,
                pivot,
            });
        };
        if resolvent != s.resolvent {
            return Err(ProofFault::WrongResolvent {
                step,
                id,
                left,
                right,
                pivot,
            });
        }
    }
    match p.steps.last() {
        Some(s) if s.resolvent.is_empty() => Ok(()),
        _ => Err(ProofFault::NotRefutation),
    }
}
