use alloc::vec::Vec;

/// Whether `a` Pareto-dominates `b` (minimization).
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        strictly |= x < y;
    }
    strictly
}

/// Fast non-dominated sorting of the listed individuals. Fronts hold
/// indices into `fitness`, each in ascending order.
pub fn non_dominated_fronts(fitness: &[Vec<f64>], members: &[usize]) -> Vec<Vec<usize>> {
    let n = members.len();
    let mut dominated_by = alloc::vec![0usize; n];
    let mut beats: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&fitness[members[i]], &fitness[members[j]]);
            if dominates(a, b) {
                beats[i].push(j);
                dominated_by[j] += 1;
            } else if dominates(b, a) {
                beats[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &beats[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current.iter().map(|&i| members[i]).collect());
        current = next;
    }
    fronts
}

/// Preference sorting over the active uncovered goals. `fitness[i][k]` is
/// individual `i` on goal `k`. Front 0 holds, per goal, the best
/// individual (shorter test, then lower index on ties); the rest are
/// ranked by non-dominated sorting.
#[allow(clippy::needless_range_loop)]
pub fn preference_sort(fitness: &[Vec<f64>], lens: &[usize]) -> Vec<Vec<usize>> {
    let n = fitness.len();
    let goals = fitness.first().map_or(0, Vec::len);
    let mut preferred = alloc::vec![false; n];
    for k in 0..goals {
        let best = (0..n).min_by(|&a, &b| {
            fitness[a][k].total_cmp(&fitness[b][k]).then(lens[a].cmp(&lens[b])).then(a.cmp(&b))
        });
        if let Some(b) = best {
            preferred[b] = true;
        }
    }
    let front0: Vec<usize> = (0..n).filter(|&i| preferred[i]).collect();
    let rest: Vec<usize> = (0..n).filter(|&i| !preferred[i]).collect();
    let mut fronts = Vec::new();
    if !front0.is_empty() {
        fronts.push(front0);
    }
    fronts.extend(non_dominated_fronts(fitness, &rest));
    fronts
}

/// Crowding distance of each member of one front, in front order.
/// Boundary members get infinity.
#[allow(clippy::needless_range_loop)]
pub fn crowding_distance(fitness: &[Vec<f64>], front: &[usize]) -> Vec<f64> {
    let n = front.len();
    let mut d = alloc::vec![0.0; n];
    if n <= 2 {
        return alloc::vec![f64::INFINITY; n];
    }
    let goals = fitness[front[0]].len();
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..goals {
        order.sort_by(|&a, &b| fitness[front[a]][k].total_cmp(&fitness[front[b]][k]).then(a.cmp(&b)));
        let lo = fitness[front[order[0]]][k];
        let hi = fitness[front[order[n - 1]]][k];
        d[order[0]] = f64::INFINITY;
        d[order[n - 1]] = f64::INFINITY;
        if hi - lo <= 0.0 {
            continue;
        }
        for w in 1..n - 1 {
            let gap = fitness[front[order[w + 1]]][k] - fitness[front[order[w - 1]]][k];
            d[order[w]] += gap / (hi - lo);
        }
    }
    d
}
