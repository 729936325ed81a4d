//! Exact rank over the rationals.

use num_traits::Zero;

use crate::rational::Rational;

/// Rank of the matrix whose rows are `rows`, by fraction-exact Gaussian
/// elimination. Rows may have different lengths only if all are empty.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let lead = m[rank][col].clone();
        for c in col..cols {
            m[rank][c] = &m[rank][c] / &lead;
        }
        for r in 0..m.len() {
            if r == rank || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in col..cols {
                let delta = &factor * &m[rank][c];
                m[r][c] -= delta;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn row(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn small_ranks() {
        assert_eq!(rank(&[]), 0);
        assert_eq!(rank(&[row(&[0, 0, 0])]), 0);
        assert_eq!(rank(&[row(&[1, 2]), row(&[2, 4])]), 1);
        assert_eq!(rank(&[row(&[1, 0, 0]), row(&[0, 1, 0]), row(&[1, 1, 0])]), 2);
        assert_eq!(
            rank(&[row(&[1, 2, 3]), row(&[4, 5, 6]), row(&[7, 8, 10])]),
            3
        );
    }

    #[test]
    fn fractional_entries() {
        let rows = vec![
            vec![ratio(1, 3), ratio(1, 2)],
            vec![ratio(2, 3), int(1)],
        ];
        assert_eq!(rank(&rows), 1);
    }
}
