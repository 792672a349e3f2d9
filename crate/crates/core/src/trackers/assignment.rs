//! Minimum-cost bipartite assignment (rectangular Hungarian).
//!
//! Shortest-augmenting-path formulation over dense f64 cost matrices.
//! Solves min-cost perfect matching on the smaller side; callers apply
//! cost gates on the returned pairs.

/// Dense row-major cost matrix.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "cost matrix shape mismatch");
        CostMatrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CostMatrix { rows, cols, data }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    fn transposed(&self) -> CostMatrix {
        CostMatrix::from_fn(self.cols, self.rows, |r, c| self.at(c, r))
    }
}

/// Min-cost assignment of every row (or column, whichever side is smaller)
/// to a distinct partner. Returns (row, col) pairs sorted by row.
///
/// Costs must be finite. An empty matrix yields an empty assignment.
pub fn solve_assignment(costs: &CostMatrix) -> Vec<(usize, usize)> {
    if costs.rows == 0 || costs.cols == 0 {
        return Vec::new();
    }
    debug_assert!(costs.data.iter().all(|c| c.is_finite()), "non-finite cost");
    if costs.rows > costs.cols {
        let mut pairs: Vec<(usize, usize)> = solve_assignment(&costs.transposed())
            .into_iter()
            .map(|(r, c)| (c, r))
            .collect();
        pairs.sort_unstable();
        return pairs;
    }

    let n = costs.rows;
    let m = costs.cols;
    // Dual potentials and matching state; col 0 is a virtual unmatched slot,
    // real columns are 1-based inside the loop.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut col_to_row = vec![0usize; m + 1]; // 0 = free
    let mut way = vec![0usize; m + 1];

    for row in 1..=n {
        col_to_row[0] = row;
        let mut j0 = 0usize;
        let mut min_v = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = col_to_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = costs.at(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < min_v[j] {
                    min_v[j] = cur;
                    way[j] = j0;
                }
                if min_v[j] < delta {
                    delta = min_v[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[col_to_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_v[j] -= delta;
                }
            }
            j0 = j1;
            if col_to_row[j0] == 0 {
                break;
            }
        }
        // Augment along the alternating path back to the virtual column.
        while j0 != 0 {
            let j1 = way[j0];
            col_to_row[j0] = col_to_row[j1];
            j0 = j1;
        }
    }

    let mut pairs: Vec<(usize, usize)> = (1..=m)
        .filter(|&j| col_to_row[j] != 0)
        .map(|j| (col_to_row[j] - 1, j - 1))
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Total cost of an assignment under `costs`.
pub fn assignment_cost(costs: &CostMatrix, pairs: &[(usize, usize)]) -> f64 {
    pairs.iter().map(|&(r, c)| costs.at(r, c)).sum()
}

/// A gated assignment: matched pairs plus the rows and columns left over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_rows: Vec<usize>,
    pub unmatched_cols: Vec<usize>,
}

/// Minimum-cost assignment with pairs costing more than `gate` dropped
/// afterwards. Rows and columns freed by gating are reported unmatched.
pub fn hungarian_assign(costs: &CostMatrix, gate: f64) -> Assignment {
    let pairs: Vec<(usize, usize)> = solve_assignment(costs)
        .into_iter()
        .filter(|&(r, c)| costs.at(r, c) <= gate)
        .collect();
    let row_taken: Vec<bool> = {
        let mut taken = vec![false; costs.rows];
        for &(r, _) in &pairs {
            taken[r] = true;
        }
        taken
    };
    let col_taken: Vec<bool> = {
        let mut taken = vec![false; costs.cols];
        for &(_, c) in &pairs {
            taken[c] = true;
        }
        taken
    };
    Assignment {
        pairs,
        unmatched_rows: (0..costs.rows).filter(|&r| !row_taken[r]).collect(),
        unmatched_cols: (0..costs.cols).filter(|&c| !col_taken[c]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use rand::Rng;
    use rand::SeedableRng;

    /// Exhaustive minimum over all injections of the smaller side.
    fn brute_force_cost(costs: &CostMatrix) -> f64 {
        if costs.rows == 0 || costs.cols == 0 {
            return 0.0;
        }
        if costs.rows > costs.cols {
            return brute_force_cost(&CostMatrix::from_fn(costs.cols, costs.rows, |r, c| {
                costs.at(c, r)
            }));
        }
        (0..costs.cols)
            .permutations(costs.rows)
            .map(|perm| {
                perm.iter()
                    .enumerate()
                    .map(|(r, &c)| costs.at(r, c))
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn empty_matrix_gives_empty_assignment() {
        assert!(solve_assignment(&CostMatrix::new(0, 0, vec![])).is_empty());
        assert!(solve_assignment(&CostMatrix::new(0, 3, vec![])).is_empty());
        assert!(solve_assignment(&CostMatrix::new(2, 0, vec![])).is_empty());
    }

    #[test]
    fn one_by_one() {
        let pairs = solve_assignment(&CostMatrix::new(1, 1, vec![4.2]));
        assert_eq!(pairs, vec![(0, 0)]);
    }

    #[test]
    fn classic_three_by_three() {
        // Known optimum picks the anti-diagonal: 1 + 2 + 2 = 5.
        let costs = CostMatrix::new(3, 3, vec![4.0, 1.0, 3.0, 2.0, 0.0, 5.0, 3.0, 2.0, 2.0]);
        let pairs = solve_assignment(&costs);
        assert_eq!(assignment_cost(&costs, &pairs), brute_force_cost(&costs));
    }

    #[test]
    fn rectangular_assigns_smaller_side_fully() {
        let costs = CostMatrix::new(2, 4, vec![9.0, 1.0, 9.0, 9.0, 9.0, 9.0, 9.0, 2.0]);
        let pairs = solve_assignment(&costs);
        assert_eq!(pairs, vec![(0, 1), (1, 3)]);

        let tall = CostMatrix::new(4, 2, vec![9.0, 1.0, 2.0, 9.0, 9.0, 9.0, 9.0, 9.0]);
        let pairs = solve_assignment(&tall);
        assert_eq!(pairs, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn matches_brute_force_on_random_matrices() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(07_0417);
        for trial in 0..300 {
            let rows = rng.random_range(1..=6);
            let cols = rng.random_range(1..=6);
            let data: Vec<f64> = (0..rows * cols).map(|_| rng.random_range(0.0..10.0)).collect();
            let costs = CostMatrix::new(rows, cols, data);
            let pairs = solve_assignment(&costs);
            assert_eq!(pairs.len(), rows.min(cols), "trial {trial}: size");
            let got = assignment_cost(&costs, &pairs);
            let want = brute_force_cost(&costs);
            assert!(
                (got - want).abs() < 1e-9,
                "trial {trial}: got {got}, brute force {want}"
            );
        }
    }

    #[test]
    fn gate_drops_expensive_pairs_and_reports_leftovers() {
        let costs = CostMatrix::new(2, 2, vec![0.1, 5.0, 5.0, 9.0]);
        let a = hungarian_assign(&costs, 1.0);
        assert_eq!(a.pairs, vec![(0, 0)]);
        assert_eq!(a.unmatched_rows, vec![1]);
        assert_eq!(a.unmatched_cols, vec![1]);
    }

    #[test]
    fn identity_cost_prefers_diagonal() {
        let n = 4;
        let costs = CostMatrix::from_fn(n, n, |r, c| if r == c { 0.0 } else { 1.0 });
        let a = hungarian_assign(&costs, 0.5);
        assert_eq!(a.pairs, (0..n).map(|i| (i, i)).collect::<Vec<_>>());
        assert!(a.unmatched_rows.is_empty());
    }

    #[test]
    fn no_matched_pair_exceeds_gate() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let rows = rng.random_range(1..=6);
            let cols = rng.random_range(1..=6);
            let data: Vec<f64> = (0..rows * cols).map(|_| rng.random_range(0.0..2.0)).collect();
            let costs = CostMatrix::new(rows, cols, data);
            let gate = rng.random_range(0.0..2.0);
            let a = hungarian_assign(&costs, gate);
            for &(r, c) in &a.pairs {
                assert!(costs.at(r, c) <= gate);
            }
            assert_eq!(
                a.pairs.len() + a.unmatched_rows.len(),
                rows,
                "every row accounted for"
            );
            assert_eq!(a.pairs.len() + a.unmatched_cols.len(), cols);
        }
    }

    #[test]
    fn row_constant_shift_keeps_assignment_optimal() {
        // Adding a constant to one row changes totals but not which matching
        // is optimal; check optimality is preserved against brute force.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(55);
        for _ in 0..50 {
            let n = rng.random_range(2..=5);
            let data: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.0..10.0)).collect();
            let base = CostMatrix::new(n, n, data.clone());
            let shift_row = rng.random_range(0..n);
            let shift = rng.random_range(0.0..20.0);
            let mut shifted_data = data;
            for c in 0..n {
                shifted_data[shift_row * n + c] += shift;
            }
            let shifted = CostMatrix::new(n, n, shifted_data);
            let got = assignment_cost(&shifted, &solve_assignment(&shifted));
            let want = brute_force_cost(&shifted);
            assert!((got - want).abs() < 1e-9);
            assert!((got - (brute_force_cost(&base) + shift)).abs() < 1e-9);
        }
    }
}
