//! Fast non-dominated sorting and crowding distance.

use alloc::vec;
use alloc::vec::Vec;

/// `a` dominates `b` when it is no worse everywhere and strictly better somewhere (minimisation).
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Partitions `objectives` into Pareto fronts, returned as index lists.
///
/// Front 0 holds the points dominated by nobody; every member of front `k`
/// is dominated only by members of earlier fronts. Indices inside a front
/// are in ascending order.
pub fn nondominated_sort(objectives: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = objectives.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(&objectives[i], &objectives[j]) {
                dominates_list[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates(&objectives[j], &objectives[i]) {
                dominates_list[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(core::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distance of each member of one front (same order as `front`).
///
/// Per objective the extreme members get `+inf`; interior members add the
/// gap between their neighbours divided by the objective's range. An
/// objective with zero or non-finite range contributes nothing.
pub fn crowding_distance(objectives: &[Vec<f64>], front: &[usize]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let m = objectives[front[0]].len();
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..m {
        let val = |p: usize| objectives[front[p]][k];
        order.sort_by(|&a, &b| val(a).total_cmp(&val(b)).then(a.cmp(&b)));
        let (lo, hi) = (val(order[0]), val(order[n - 1]));
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if !(range.is_finite() && range > 0.0) {
            continue;
        }
        for w in 1..n - 1 {
            let gap = val(order[w + 1]) - val(order[w - 1]);
            if gap.is_finite() {
                dist[order[w]] += gap / range;
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn singleton_and_textbook() {
        assert_eq!(nondominated_sort(&[vec![1.0, 1.0]]), vec![vec![0]]);
        let pts = [vec![1.0, 2.0], vec![2.0, 1.0], vec![3.0, 3.0]];
        assert_eq!(nondominated_sort(&pts), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn duplicates_share_a_front() {
        let pts = [vec![1.0, 1.0], vec![1.0, 1.0], vec![f64::INFINITY; 2], vec![f64::INFINITY; 2]];
        assert_eq!(nondominated_sort(&pts), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn crowding_small_fronts() {
        let pts = [vec![1.0, 2.0], vec![2.0, 1.0]];
        assert_eq!(crowding_distance(&pts, &[0]), vec![f64::INFINITY]);
        assert_eq!(crowding_distance(&pts, &[0, 1]), vec![f64::INFINITY; 2]);
    }

    #[test]
    fn crowding_on_a_line() {
        // (0,3) (1,2) (2,1) (3,0): interior gap 2 over range 3 in each objective
        let pts = [vec![2.0, 1.0], vec![0.0, 3.0], vec![3.0, 0.0], vec![1.0, 2.0]];
        let d = crowding_distance(&pts, &[0, 1, 2, 3]);
        assert!(d[1].is_infinite() && d[2].is_infinite());
        assert!((d[0] - 4.0 / 3.0).abs() < 1e-12);
        assert!((d[3] - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn crowding_zero_range_contributes_nothing() {
        let pts = [vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 3.0]];
        let d = crowding_distance(&pts, &[0, 1, 2]);
        assert_eq!(d[1], 1.0);
    }
}
