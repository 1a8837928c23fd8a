use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ast::*;

pub type GoalId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GoalKind {
    MethodEntry,
    BranchTrue,
    BranchFalse,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageGoal {
    pub id: GoalId,
    pub method: String,
    #[serde(skip)]
    pub callable: CallableId,
    pub kind: GoalKind,
    /// Conditional the branch goal belongs to; absent for method entries.
    pub branch_node: Option<CondId>,
    pub cdg_depth: u32,
}

impl CoverageGoal {
    pub fn label(&self) -> String {
        match (self.kind, self.branch_node) {
            (GoalKind::MethodEntry, _) => alloc::format!("{}:entry", self.method),
            (GoalKind::BranchTrue, Some(c)) => alloc::format!("{}:c{c}:true", self.method),
            (GoalKind::BranchFalse, Some(c)) => alloc::format!("{}:c{c}:false", self.method),
            _ => alloc::format!("{}:?", self.method),
        }
    }
}

/// Control dependencies among the branch goals of one callable: `parent[g]`
/// is the branch outcome goal `g` is nested under, `None` for roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlDependencyGraph {
    pub callable: CallableId,
    pub goals: Vec<GoalId>,
    pub parent: BTreeMap<GoalId, Option<GoalId>>,
}

impl ControlDependencyGraph {
    pub fn roots(&self) -> impl Iterator<Item = GoalId> + '_ {
        self.goals.iter().copied().filter(|g| self.parent[g].is_none())
    }

    pub fn edges(&self) -> impl Iterator<Item = (GoalId, GoalId)> + '_ {
        self.parent.iter().filter_map(|(c, p)| p.map(|p| (p, *c)))
    }

    pub fn children(&self, outcome: GoalId) -> impl Iterator<Item = GoalId> + '_ {
        self.parent.iter().filter(move |(_, p)| **p == Some(outcome)).map(|(c, _)| *c)
    }
}

/// Every goal of a unit plus the lookup tables the runtime and search need.
#[derive(Debug, Clone)]
pub struct GoalIndex {
    pub goals: Vec<CoverageGoal>,
    entry: Vec<GoalId>,
    branch: BTreeMap<CondId, (GoalId, GoalId)>,
    parent: Vec<Option<GoalId>>,
    pub cdgs: Vec<ControlDependencyGraph>,
}

/// Goals in declaration order, then AST preorder: per callable, the entry
/// goal followed by a (true, false) pair per conditional.
pub fn extract_goals(unit: &SubjectUnit) -> Vec<CoverageGoal> {
    GoalIndex::new(unit).goals
}

/// Control dependencies of one callable by nesting.
pub fn build_cdg(unit: &SubjectUnit, callable: CallableId) -> ControlDependencyGraph {
    GoalIndex::new(unit).cdgs.swap_remove(callable)
}

impl GoalIndex {
    pub fn new(unit: &SubjectUnit) -> Self {
        let mut idx = GoalIndex {
            goals: Vec::new(),
            entry: Vec::new(),
            branch: BTreeMap::new(),
            parent: Vec::new(),
            cdgs: Vec::new(),
        };
        for (cid, m) in unit.callables() {
            let entry = idx.push(cid, &m.name, GoalKind::MethodEntry, None, 0, None);
            idx.entry.push(entry);
            let mut cdg = ControlDependencyGraph { callable: cid, goals: Vec::new(), parent: BTreeMap::new() };
            idx.walk(cid, &m.name, &m.body, None, 0, &mut cdg);
            idx.cdgs.push(cdg);
        }
        idx
    }

    fn push(
        &mut self,
        callable: CallableId,
        method: &str,
        kind: GoalKind,
        node: Option<CondId>,
        depth: u32,
        parent: Option<GoalId>,
    ) -> GoalId {
        let id = self.goals.len();
        self.goals.push(CoverageGoal {
            id,
            method: String::from(method),
            callable,
            kind,
            branch_node: node,
            cdg_depth: depth,
        });
        self.parent.push(parent);
        id
    }

    fn walk(
        &mut self,
        cid: CallableId,
        name: &str,
        body: &[Stmt],
        parent: Option<GoalId>,
        parent_depth: u32,
        cdg: &mut ControlDependencyGraph,
    ) {
        for s in body {
            let (id, then_body, else_body) = match s {
                Stmt::If { id, then_body, else_body, .. } => (*id, then_body, else_body.as_deref()),
                Stmt::While { id, body, .. } => (*id, body, None),
                _ => continue,
            };
            let depth = parent_depth + 1;
            let t = self.push(cid, name, GoalKind::BranchTrue, Some(id), depth, parent);
            let f = self.push(cid, name, GoalKind::BranchFalse, Some(id), depth, parent);
            self.branch.insert(id, (t, f));
            cdg.goals.extend([t, f]);
            cdg.parent.insert(t, parent);
            cdg.parent.insert(f, parent);
            self.walk(cid, name, then_body, Some(t), depth, cdg);
            if let Some(e) = else_body {
                self.walk(cid, name, e, Some(f), depth, cdg);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.goals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.goals.is_empty()
    }

    pub fn entry_goal(&self, callable: CallableId) -> GoalId {
        self.entry[callable]
    }

    /// (true goal, false goal) of a conditional.
    pub fn branch_goals(&self, cond: CondId) -> (GoalId, GoalId) {
        self.branch[&cond]
    }

    pub fn parent(&self, goal: GoalId) -> Option<GoalId> {
        self.parent[goal]
    }

    pub fn goal(&self, id: GoalId) -> &CoverageGoal {
        &self.goals[id]
    }

    pub fn is_root(&self, goal: GoalId) -> bool {
        self.parent[goal].is_none()
    }

    pub fn children_of(&self, outcome: GoalId) -> impl Iterator<Item = GoalId> + '_ {
        self.parent.iter().enumerate().filter(move |(_, p)| **p == Some(outcome)).map(|(g, _)| g)
    }
}
