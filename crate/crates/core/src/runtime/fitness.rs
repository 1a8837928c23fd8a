use core::ops::Range;

use super::distance::normalize;
use super::ExecTrace;
use crate::subject::{GoalId, GoalIndex};

/// Fitness of `goal` given per-goal minimum distances over the counted
/// statements: 0 when covered, otherwise the number of unreached
/// conditionals on the way down from the deepest evaluated ancestor plus
/// that ancestor's normalized distance. A goal whose method was never
/// entered scores its depth + 2; entered without reaching any enclosing
/// conditional, its depth.
pub fn fitness_from(goals: &GoalIndex, goal: GoalId, dist: &[f64]) -> f64 {
    if dist[goal] == 0.0 {
        return 0.0;
    }
    let g = goals.goal(goal);
    if dist[goals.entry_goal(g.callable)] != 0.0 {
        return f64::from(g.cdg_depth) + 2.0;
    }
    let mut level = 0.0;
    let mut node = goal;
    loop {
        if dist[node].is_finite() {
            return level + normalize(dist[node]);
        }
        level += 1.0;
        match goals.parent(node) {
            Some(p) => node = p,
            None => return level,
        }
    }
}

/// Fitness over a window of statements of one trace.
pub fn fitness(goals: &GoalIndex, goal: GoalId, trace: &ExecTrace, window: Range<usize>) -> f64 {
    fitness_from(goals, goal, &trace.branch_min_distance(window))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subject::parse_subject;

    fn nested() -> GoalIndex {
        let u = parse_subject("unit A { constructor() {} method m(c1: int, c2: int) { if (c1 > 0) { if (c2 > 0) { } } } }")
            .unwrap();
        GoalIndex::new(&u)
    }

    #[test]
    fn behind_one_unreached_branch() {
        let idx = nested();
        let (t1, f1) = idx.branch_goals(0);
        let (t2, _) = idx.branch_goals(1);
        let mut d = alloc::vec![f64::INFINITY; idx.len()];
        d[idx.entry_goal(1)] = 0.0;
        d[t1] = 2.0;
        d[f1] = 0.0;
        assert!((fitness_from(&idx, t2, &d) - (1.0 + 2.0 / 3.0)).abs() < 1e-12);
        assert_eq!(fitness_from(&idx, f1, &d), 0.0);
    }

    #[test]
    fn never_entered() {
        let idx = nested();
        let d = alloc::vec![f64::INFINITY; idx.len()];
        let (t1, _) = idx.branch_goals(0);
        let (t2, _) = idx.branch_goals(1);
        assert_eq!(fitness_from(&idx, t1, &d), 3.0);
        assert_eq!(fitness_from(&idx, t2, &d), 4.0);
        assert_eq!(fitness_from(&idx, idx.entry_goal(1), &d), 2.0);
    }

    #[test]
    fn entered_without_reaching_a_conditional() {
        let idx = nested();
        let mut d = alloc::vec![f64::INFINITY; idx.len()];
        d[idx.entry_goal(1)] = 0.0;
        let (t2, _) = idx.branch_goals(1);
        assert_eq!(fitness_from(&idx, t2, &d), 2.0);
    }
}
