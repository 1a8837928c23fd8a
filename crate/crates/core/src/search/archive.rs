use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::Serialize;

use crate::chromosome::{Representation, TestCase};
use crate::subject::{GoalId, GoalIndex, SubjectUnit};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArchiveEntry {
    #[serde(skip)]
    pub test: TestCase,
    /// Statement whose execution covered the goal, 0-based.
    pub stmt: usize,
    /// Evaluation number at which the entry was stored, 1-based.
    pub evaluation: u64,
}

/// Best covering test per goal.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Archive {
    entries: BTreeMap<GoalId, ArchiveEntry>,
}

impl Archive {
    pub fn get(&self, goal: GoalId) -> Option<&ArchiveEntry> {
        self.entries.get(&goal)
    }

    pub fn covers(&self, goal: GoalId) -> bool {
        self.entries.contains_key(&goal)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (GoalId, &ArchiveEntry)> {
        self.entries.iter().map(|(g, e)| (*g, e))
    }

    /// Offers a test that covers `goal`. A stored entry is replaced only by
    /// a strictly better test: under the focal shape a test whose focal
    /// method owns the goal beats one that reaches it through a callee,
    /// then fewer statements win. Returns whether the offer was taken.
    pub fn offer(&mut self, unit: &SubjectUnit, goals: &GoalIndex, goal: GoalId, test: &TestCase, stmt: usize, evaluation: u64) -> bool {
        let key = |t: &TestCase| {
            let foreign = t.repr == Representation::Focal
                && t.focal_method.as_deref() != Some(unit.callable(goals.goal(goal).callable).name.as_str());
            (foreign, t.len())
        };
        if let Some(old) = self.entries.get(&goal) {
            if key(test) >= key(&old.test) {
                return false;
            }
        }
        self.entries.insert(goal, ArchiveEntry { test: test.clone(), stmt, evaluation });
        true
    }

    /// Distinct archived tests, ordered by the first goal each one holds.
    pub fn tests(&self) -> Vec<TestCase> {
        let mut out: Vec<TestCase> = Vec::new();
        for e in self.entries.values() {
            if !out.contains(&e.test) {
                out.push(e.test.clone());
            }
        }
        out
    }
}
