use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::assembly::SparseOperator;

/// Symmetrised adjacency of a square operator, without self loops.
fn adjacency(a: &SparseOperator) -> Vec<Vec<usize>> {
    let mut adj = alloc::vec![Vec::new(); a.rows];
    for r in 0..a.rows {
        for &c in a.row(r).0 {
            if c != r {
                adj[r].push(c);
                adj[c].push(r);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// Level structure from `root` restricted to unvisited nodes; returns the
/// nodes in the last level and the depth.
fn last_level(adj: &[Vec<usize>], root: usize, visited: &[bool]) -> (Vec<usize>, usize) {
    let mut depth = alloc::vec![usize::MAX; adj.len()];
    depth[root] = 0;
    let mut queue = VecDeque::from([root]);
    let mut order = Vec::new();
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &adj[v] {
            if !visited[w] && depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let max = order.iter().map(|&v| depth[v]).max().unwrap_or(0);
    (order.into_iter().filter(|&v| depth[v] == max).collect(), max)
}

/// Reverse Cuthill-McKee permutation: `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &SparseOperator) -> Vec<usize> {
    let n = a.rows;
    let adj = adjacency(a);
    let degree = |v: usize| adj[v].len();
    let mut visited = alloc::vec![false; n];
    let mut order = Vec::with_capacity(n);
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        // pseudo-peripheral root by repeated level-structure sweeps
        let mut root = seed;
        let mut depth = 0;
        for _ in 0..4 {
            let (last, d) = last_level(&adj, root, &visited);
            let candidate = *last.iter().min_by_key(|&&v| (degree(v), v)).unwrap();
            if d <= depth && root != seed {
                break;
            }
            depth = d;
            root = candidate;
        }
        visited[root] = true;
        let start = order.len();
        order.push(root);
        let mut head = start;
        while head < order.len() {
            let v = order[head];
            head += 1;
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_unstable_by_key(|&w| (degree(w), w));
            for w in next {
                visited[w] = true;
                order.push(w);
            }
        }
    }
    order.reverse();
    order
}

/// Lower and upper bandwidth of `a` under `perm` (`perm[new] = old`).
pub fn bandwidths(a: &SparseOperator, perm: &[usize]) -> (usize, usize) {
    let mut inverse = alloc::vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inverse[old] = new;
    }
    let (mut lower, mut upper) = (0, 0);
    for r in 0..a.rows {
        let i = inverse[r];
        for &c in a.row(r).0 {
            let j = inverse[c];
            if i > j {
                lower = lower.max(i - j);
            } else {
                upper = upper.max(j - i);
            }
        }
    }
    (lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::TripletBuilder;

    fn shuffled_path(n: usize) -> SparseOperator {
        // path graph with a scrambled numbering
        let label = |i: usize| (i * 7) % n;
        let mut b = TripletBuilder::new(n, n);
        for i in 0..n {
            b.add(label(i), label(i), 2.0);
            if i + 1 < n {
                b.add(label(i), label(i + 1), -1.0);
                b.add(label(i + 1), label(i), -1.0);
            }
        }
        b.build()
    }

    #[test]
    fn permutation_is_bijective() {
        let a = shuffled_path(11);
        let mut p = reverse_cuthill_mckee(&a);
        p.sort_unstable();
        assert_eq!(p, (0..11).collect::<Vec<_>>());
    }

    #[test]
    fn path_becomes_tridiagonal() {
        let a = shuffled_path(11);
        let identity: Vec<usize> = (0..11).collect();
        assert!(bandwidths(&a, &identity).0 > 1);
        assert_eq!(bandwidths(&a, &reverse_cuthill_mckee(&a)), (1, 1));
    }

    #[test]
    fn disconnected_components_covered() {
        let mut b = TripletBuilder::new(5, 5);
        for i in 0..5 {
            b.add(i, i, 1.0);
        }
        b.add(0, 3, 1.0);
        b.add(3, 0, 1.0);
        let p = reverse_cuthill_mckee(&b.build());
        assert_eq!(p.len(), 5);
    }
}
