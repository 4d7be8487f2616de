//! Minimal dense linear solvers: exact Gaussian elimination over rationals
//! (with a solvability trichotomy) and an f64 partial-pivot solve for the
//! numeric Newton step.

use num::Zero;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Rational>),
    Inconsistent,
    /// Consistent but rank-deficient: a whole affine space of solutions.
    Underdetermined,
}

/// Solves A x = b exactly, A of size m x n (any m, n).
pub fn solve_exact(a: &[Vec<Rational>], b: &[Rational]) -> Solution {
    let m = a.len();
    assert_eq!(m, b.len());
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut rows: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), n);
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(pivot) = (rank..m).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_val = rows[rank][col].clone();
        for idx in col..=n {
            rows[rank][idx] /= &pivot_val;
        }
        let pivot_row = rows[rank].clone();
        for r in 0..m {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for idx in col..=n {
                    let delta = &factor * &pivot_row[idx];
                    rows[r][idx] -= delta;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == m {
            break;
        }
    }

    for r in rank..m {
        if !rows[r][n].is_zero() {
            return Solution::Inconsistent;
        }
    }
    if rank < n {
        return Solution::Underdetermined;
    }
    let mut x = vec![Rational::zero(); n];
    for (r, &col) in pivot_cols.iter().enumerate() {
        x[col] = rows[r][n].clone();
    }
    Solution::Unique(x)
}

/// Solves the square system A x = b in f64 with partial pivoting; None when
/// the pivot collapses (singular to working precision).
pub fn solve_f64(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(*rhs);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[pivot][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let factor = m[r][col] / m[col][col];
                for idx in col..=n {
                    m[r][idx] -= factor * m[col][idx];
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn unique_solution() {
        // x + y = 3, x - y = 1  =>  (2, 1)
        let a = vec![
            vec![rat_int(1), rat_int(1)],
            vec![rat_int(1), rat_int(-1)],
        ];
        let b = vec![rat_int(3), rat_int(1)];
        assert_eq!(
            solve_exact(&a, &b),
            Solution::Unique(vec![rat_int(2), rat_int(1)])
        );
    }

    #[test]
    fn inconsistent_system() {
        let a = vec![vec![rat_int(1), rat_int(1)], vec![rat_int(2), rat_int(2)]];
        let b = vec![rat_int(1), rat_int(3)];
        assert_eq!(solve_exact(&a, &b), Solution::Inconsistent);
    }

    #[test]
    fn underdetermined_system() {
        let a = vec![vec![rat_int(1), rat_int(1)], vec![rat_int(2), rat_int(2)]];
        let b = vec![rat_int(1), rat_int(2)];
        assert_eq!(solve_exact(&a, &b), Solution::Underdetermined);
    }

    #[test]
    fn overdetermined_but_consistent() {
        let a = vec![
            vec![rat_int(1), rat_int(0)],
            vec![rat_int(0), rat_int(1)],
            vec![rat_int(1), rat_int(1)],
        ];
        let b = vec![rat(1, 2), rat(1, 2), rat_int(1)];
        assert_eq!(
            solve_exact(&a, &b),
            Solution::Unique(vec![rat(1, 2), rat(1, 2)])
        );
    }

    #[test]
    fn f64_solve_matches() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let b = vec![5.0, 10.0];
        let x = solve_f64(&a, &b).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 3.0).abs() < 1e-12);
        assert!(solve_f64(&[vec![1.0, 1.0], vec![1.0, 1.0]], &[1.0, 2.0]).is_none());
    }
}
