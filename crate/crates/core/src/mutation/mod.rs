//! First-order mutants and the assertion × mutant kill matrix.

mod operators;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::assertions::Assertion;
use crate::chromosome::TestCase;
use crate::runtime::{observe, run, Limits};
use crate::subject::{GoalIndex, SubjectUnit};

pub use operators::{apply, generate_mutants, mutant_unit, revert, Mutant, Operator, Replacement, Undo};

/// The mutants of a unit, each with its mutated copy ready to run.
#[derive(Debug, Clone)]
pub struct MutantSet {
    pub mutants: Vec<Mutant>,
    pub units: Vec<SubjectUnit>,
}

impl MutantSet {
    pub fn new(unit: &SubjectUnit) -> Self {
        Self::with_operators(unit, &Operator::ALL)
    }

    /// Only the mutants of the given operators. Ids stay those of the full
    /// set; columns of a kill matrix follow the order here.
    pub fn with_operators(unit: &SubjectUnit, ops: &[Operator]) -> Self {
        let mutants: Vec<Mutant> = generate_mutants(unit).into_iter().filter(|m| ops.contains(&m.operator)).collect();
        let units = mutants.iter().map(|m| mutant_unit(unit, m)).collect();
        MutantSet { mutants, units }
    }

    pub fn len(&self) -> usize {
        self.mutants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mutants.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cell {
    Kills,
    Survives,
    /// The observation point was never reached on the mutant.
    Divergent,
}

/// Kill matrix of one test: rows are its assertions, columns the mutants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KillMatrix {
    pub rows: usize,
    pub cols: usize,
    cells: Vec<Cell>,
    /// The mutant run hit the step limit.
    pub timeout: Vec<bool>,
    /// Some assertion could not be evaluated on the mutant because an
    /// exception or timeout came first.
    pub divergence: Vec<bool>,
}

impl KillMatrix {
    pub fn from_cells(rows: usize, cols: usize, cells: Vec<Cell>, timeout: Vec<bool>) -> Self {
        assert_eq!(cells.len(), rows * cols);
        let divergence = (0..cols).map(|m| (0..rows).any(|a| cells[a * cols + m] == Cell::Divergent)).collect();
        KillMatrix { rows, cols, cells, timeout, divergence }
    }

    pub fn cell(&self, assertion: usize, mutant: usize) -> Cell {
        self.cells[assertion * self.cols + mutant]
    }

    /// Mutants assertion `a` kills outright.
    pub fn kills(&self, a: usize) -> BTreeSet<usize> {
        (0..self.cols).filter(|&m| self.cell(a, m) == Cell::Kills).collect()
    }

    /// Whether the test, restricted to the given rows, detects mutant `m`:
    /// by an assertion, by diverging before one, or by timing out.
    pub fn detects(&self, rows: &[usize], m: usize) -> bool {
        self.timeout[m] || rows.iter().any(|&a| self.cell(a, m) != Cell::Survives)
    }

    /// The matrix restricted to some rows, in the order given.
    pub fn select(&self, rows: &[usize]) -> KillMatrix {
        let mut cells = Vec::with_capacity(rows.len() * self.cols);
        for &a in rows {
            cells.extend_from_slice(&self.cells[a * self.cols..(a + 1) * self.cols]);
        }
        KillMatrix::from_cells(rows.len(), self.cols, cells, self.timeout.clone())
    }
}

/// Runs `test` on every mutant and checks each assertion against the
/// mutant run. Timed-out runs leave every cell divergent.
pub fn run_kill_analysis(
    goals: &GoalIndex,
    test: &TestCase,
    assertions: &[Assertion],
    mutants: &MutantSet,
    limits: Limits,
) -> KillMatrix {
    let cols = mutants.len();
    let mut cells = alloc::vec![Cell::Survives; assertions.len() * cols];
    let mut timeout = alloc::vec![false; cols];
    for (m, unit) in mutants.units.iter().enumerate() {
        let mut exec = run(unit, goals, test, limits);
        if exec.trace.timeout {
            timeout[m] = true;
            for a in 0..assertions.len() {
                cells[a * cols + m] = Cell::Divergent;
            }
            continue;
        }
        for (a, asr) in assertions.iter().enumerate() {
            cells[a * cols + m] = match observe(&mut exec, &asr.at) {
                None => Cell::Divergent,
                Some(o) if asr.holds(&o) => Cell::Survives,
                Some(_) => Cell::Kills,
            };
        }
    }
    KillMatrix::from_cells(assertions.len(), cols, cells, timeout)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub total: usize,
    pub killed: usize,
    pub score: f64,
    /// Set when there are no mutants; the score is then 1.0.
    pub no_mutants: bool,
}

/// Killed / total over a suite, each test contributing its matrix over all
/// its rows.
pub fn mutation_score(matrices: &[KillMatrix], total: usize) -> Score {
    if total == 0 {
        return Score { total, killed: 0, score: 1.0, no_mutants: true };
    }
    let killed = (0..total)
        .filter(|&m| {
            matrices.iter().any(|k| {
                let rows: Vec<usize> = (0..k.rows).collect();
                k.detects(&rows, m)
            })
        })
        .count();
    Score { total, killed, score: killed as f64 / total as f64, no_mutants: false }
}
