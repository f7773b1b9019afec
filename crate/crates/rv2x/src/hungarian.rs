//! Minimum-weight perfect matching on a square matrix with `+∞` entries.
//!
//! Ties between optimal permutations are broken towards the lexicographically
//! smallest assignment (lowest row first, then lowest column).

use crate::error::{Error, Result};

/// Is there a perfect matching using finite entries only (Kuhn's augmenting paths)?
fn has_finite_perfect_matching(w: &[Vec<f64>]) -> bool {
    let n = w.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn augment(r: usize, w: &[Vec<f64>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for c in 0..w.len() {
            if w[r][c].is_finite() && !seen[c] {
                seen[c] = true;
                if owner[c].is_none_or(|o| augment(o, w, seen, owner)) {
                    owner[c] = Some(r);
                    return true;
                }
            }
        }
        false
    }
    (0..n).all(|r| augment(r, w, &mut vec![false; n], &mut owner))
}

/// Shortest augmenting path Hungarian method on a finite matrix. Returns the
/// column assigned to each row and the row and column potentials (1-based).
fn solve_finite(w: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    let n = w.len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = w[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    (assignment, u, v)
}

fn cost(w: &[Vec<f64>], assignment: &[usize]) -> f64 {
    assignment.iter().enumerate().map(|(r, &c)| w[r][c]).sum()
}

/// Minimum-weight permutation of a square matrix; `result[row] = column`.
pub fn hungarian_match(weights: &[Vec<f64>]) -> Result<Vec<usize>> {
    let n = weights.len();
    if weights.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidArgument(
            "weight matrix must be square".into(),
        ));
    }
    if weights
        .iter()
        .flatten()
        .any(|x| x.is_nan() || *x == f64::NEG_INFINITY)
    {
        return Err(Error::InvalidArgument(
            "weights must be finite or +inf".into(),
        ));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if !has_finite_perfect_matching(weights) {
        return Err(Error::InfeasibleMatching);
    }
    // Infinite entries become a penalty larger than any finite permutation.
    let finite_sum: f64 = weights
        .iter()
        .flatten()
        .filter(|x| x.is_finite())
        .map(|x| x.abs())
        .sum();
    let big = 2.0 * finite_sum + 1.0;
    let w: Vec<Vec<f64>> = weights
        .iter()
        .map(|row| {
            row.iter()
                .map(|&x| if x.is_finite() { x } else { big })
                .collect()
        })
        .collect();
    let (mut current, u, v) = solve_finite(&w);
    let best = cost(&w, &current);
    // Reduced costs carry rounding on the scale of the potentials, so the
    // screen is loose; the cost comparison decides and is relative to the
    // optimum alone, since entries can span many orders of magnitude.
    let screen_tol =
        1e-9 * (1.0 + best.abs() + w.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs())));
    let cost_tol = 1e-12 * n as f64 * (1.0 + best.abs());

    // Fix rows one at a time to the smallest column that keeps an optimal
    // completion, which yields the lexicographically smallest optimum. Every
    // optimal assignment uses only edges with zero reduced cost, so other
    // columns need no test, and the column of the current optimum needs no
    // re-solve.
    let mut used = vec![false; n];
    for row in 0..n {
        let mut chosen = None;
        for col in (0..n).filter(|&c| !used[c]) {
            if !weights[row][col].is_finite() || w[row][col] - u[row + 1] - v[col + 1] > screen_tol
            {
                continue;
            }
            if col == current[row] {
                chosen = Some(col);
                break;
            }
            let rest_cols: Vec<usize> = (0..n).filter(|&c| !used[c] && c != col).collect();
            let sub: Vec<Vec<f64>> = (row + 1..n)
                .map(|r| rest_cols.iter().map(|&c| w[r][c]).collect())
                .collect();
            let prefix: f64 = (0..row).map(|r| w[r][current[r]]).sum::<f64>() + w[row][col];
            let (rest_assign, rest) = if sub.is_empty() {
                (Vec::new(), 0.0)
            } else {
                let (a, _, _) = solve_finite(&sub);
                let c = cost(&sub, &a);
                (a, c)
            };
            if prefix + rest <= best + cost_tol {
                current[row] = col;
                for (k, &j) in rest_assign.iter().enumerate() {
                    current[row + 1 + k] = rest_cols[j];
                }
                chosen = Some(col);
                break;
            }
        }
        let col = chosen.unwrap_or(current[row]);
        used[col] = true;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(
            hungarian_match(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
            vec![0, 1]
        );
        assert_eq!(
            hungarian_match(&vec![vec![5.0; 4]; 4]).unwrap(),
            vec![0, 1, 2, 3]
        );
        let inf = f64::INFINITY;
        assert_eq!(
            hungarian_match(&[vec![inf, 1.0], vec![2.0, inf]]).unwrap(),
            vec![1, 0]
        );
        assert!(matches!(
            hungarian_match(&[vec![inf, inf], vec![1.0, 2.0]]),
            Err(Error::InfeasibleMatching)
        ));
        // Two optima, [1, 0, 2] and [0, 2, 1]; the smaller one wins.
        let w = vec![
            vec![1.0, 0.0, 5.0],
            vec![0.0, 5.0, 0.0],
            vec![5.0, 0.0, 1.0],
        ];
        assert_eq!(hungarian_match(&w).unwrap(), vec![0, 2, 1]);
        // Entries spanning seventeen decades must not blur distinct costs.
        let w = vec![
            vec![1.590848e9, 3.101435e11, 3.150303e11],
            vec![1.165923e3, 5.405278e7, 1.571821e20],
            vec![3.671316e10, 6.685630e9, 3.954351e11],
        ];
        assert_eq!(hungarian_match(&w).unwrap(), vec![2, 0, 1]);
    }

    fn brute(w: &[Vec<f64>]) -> (f64, Vec<usize>) {
        fn rec(
            w: &[Vec<f64>],
            row: usize,
            used: &mut Vec<bool>,
            cur: &mut Vec<usize>,
            best: &mut (f64, Vec<usize>),
        ) {
            if row == w.len() {
                let c: f64 = cur.iter().enumerate().map(|(r, &c)| w[r][c]).sum();
                if c < best.0 - 1e-12 {
                    *best = (c, cur.clone());
                }
                return;
            }
            for c in 0..w.len() {
                if !used[c] {
                    used[c] = true;
                    cur.push(c);
                    rec(w, row + 1, used, cur, best);
                    cur.pop();
                    used[c] = false;
                }
            }
        }
        let mut best = (f64::INFINITY, Vec::new());
        rec(w, 0, &mut vec![false; w.len()], &mut Vec::new(), &mut best);
        best
    }

    #[test]
    fn matches_exhaustive_search_on_integer_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.random_range(1..=6);
            let w: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.random_range(0..4) as f64).collect())
                .collect();
            // Lexicographic enumeration with a strict improvement rule finds
            // the smallest optimal assignment.
            assert_eq!(hungarian_match(&w).unwrap(), brute(&w).1, "{w:?}");
        }
    }
}
