//! Fraction-free integer linear algebra.
//!
//! Everything here is generic over a ring with checked operations so the same
//! code runs on `i128` (fast path, `None` on overflow) and on `BigInt` (never
//! overflows).

use num_bigint::{BigInt, ToBigInt};
use num_traits::{CheckedDiv, CheckedMul, CheckedSub, One, Signed, Zero};

pub trait CheckedRing:
    Clone + Zero + One + Signed + CheckedMul + CheckedSub + CheckedDiv + PartialEq
{
}

impl<R> CheckedRing for R where
    R: Clone + Zero + One + Signed + CheckedMul + CheckedSub + CheckedDiv + PartialEq
{
}

fn cross<R: CheckedRing>(a: &R, b: &R, c: &R, d: &R, prev: &R) -> Option<R> {
    let lhs = a.checked_mul(b)?;
    let rhs = c.checked_mul(d)?;
    lhs.checked_sub(&rhs)?.checked_div(prev)
}

/// Bareiss determinant. Consumes the matrix; rows must be square.
pub fn bareiss_det<R: CheckedRing>(mut m: Vec<Vec<R>>) -> Option<R> {
    let n = m.len();
    if n == 0 {
        return Some(R::one());
    }
    let mut sign_flip = false;
    let mut prev = R::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let pivot = (k + 1..n).find(|&r| !m[r][k].is_zero());
            match pivot {
                Some(r) => {
                    m.swap(k, r);
                    sign_flip = !sign_flip;
                }
                None => return Some(R::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = cross(&m[k][k], &m[i][j], &m[i][k], &m[k][j], &prev)?;
                m[i][j] = v;
            }
            m[i][k] = R::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Some(if sign_flip { -det } else { det })
}

/// Rank via fraction-free elimination on a rectangular matrix.
pub fn bareiss_rank<R: CheckedRing>(mut m: Vec<Vec<R>>) -> Option<usize> {
    let rows = m.len();
    if rows == 0 {
        return Some(0);
    }
    let cols = m[0].len();
    let mut prev = R::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let v = cross(&m[rank][col], &m[i][j], &m[i][col], &m[rank][j], &prev)?;
                m[i][j] = v;
            }
            m[i][col] = R::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    Some(rank)
}

/// Fraction-free Gauss-Jordan inverse: returns `(d, adj)` with
/// `m * adj = d * I`. `d` is `±det(m)`; `None` on overflow or if singular.
pub fn adjugate<R: CheckedRing>(m: &[Vec<R>]) -> Option<(R, Vec<Vec<R>>)> {
    let n = m.len();
    let mut a: Vec<Vec<R>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { R::one() } else { R::zero() }));
            r
        })
        .collect();
    let mut prev = R::one();
    for k in 0..n {
        let p = (k..n).find(|&r| !a[r][k].is_zero())?;
        a.swap(k, p);
        for i in 0..n {
            if i == k {
                continue;
            }
            for j in 0..2 * n {
                if j == k {
                    continue;
                }
                let v = cross(&a[k][k], &a[i][j], &a[i][k], &a[k][j], &prev)?;
                a[i][j] = v;
            }
            a[i][k] = R::zero();
        }
        prev = a[k][k].clone();
    }
    let d = prev;
    let adj = a.into_iter().map(|row| row[n..].to_vec()).collect();
    Some((d, adj))
}

/// Exact determinant of an integer matrix, using `i128` when every
/// intermediate fits and `BigInt` otherwise.
pub fn det_exact<T: ToBigInt>(rows: &[Vec<T>]) -> BigInt {
    let small: Option<Vec<Vec<i128>>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x.to_bigint().and_then(|b| i128::try_from(b).ok())).collect())
        .collect();
    if let Some(small) = small {
        if let Some(d) = bareiss_det(small) {
            return BigInt::from(d);
        }
    }
    let big: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x.to_bigint().expect("integer scalar")).collect())
        .collect();
    bareiss_det(big).expect("BigInt arithmetic does not overflow")
}

pub fn rank_exact<T: ToBigInt>(rows: &[Vec<T>]) -> usize {
    let small: Option<Vec<Vec<i128>>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x.to_bigint().and_then(|b| i128::try_from(b).ok())).collect())
        .collect();
    if let Some(small) = small {
        if let Some(r) = bareiss_rank(small) {
            return r;
        }
    }
    let big: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x.to_bigint().expect("integer scalar")).collect())
        .collect();
    bareiss_rank(big).expect("BigInt arithmetic does not overflow")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cofactor_det(m: &[Vec<i64>]) -> i64 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * cofactor_det(&minor)
            })
            .sum()
    }

    #[test]
    fn det_of_identity_and_singular() {
        assert_eq!(det_exact(&[vec![1i64, 0], vec![0, 1]]), BigInt::from(1));
        assert_eq!(det_exact(&[vec![1i64, 2], vec![2, 4]]), BigInt::from(0));
        assert_eq!(det_exact(&[vec![0i64, 1], vec![1, 0]]), BigInt::from(-1));
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = i64::MAX;
        let m = vec![vec![big, 1, 0], vec![1, big, 0], vec![0, 0, big]];
        let expected = BigInt::from(big) * (BigInt::from(big) * BigInt::from(big) - 1);
        assert_eq!(det_exact(&m), expected);
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor_expansion(entries in proptest::collection::vec(-4i64..=4, 25)) {
            let m: Vec<Vec<i64>> = entries.chunks(5).map(|c| c.to_vec()).collect();
            prop_assert_eq!(det_exact(&m), BigInt::from(cofactor_det(&m)));
        }

        #[test]
        fn adjugate_inverts(entries in proptest::collection::vec(-3i64..=3, 16)) {
            let m: Vec<Vec<i128>> = entries.chunks(4).map(|c| c.iter().map(|&x| x as i128).collect()).collect();
            let det = bareiss_det(m.clone()).unwrap();
            match adjugate(&m) {
                None => prop_assert_eq!(det, 0),
                Some((d, adj)) => {
                    prop_assert_eq!(d.abs(), det.abs());
                    for (i, row) in m.iter().enumerate() {
                        for j in 0..4 {
                            let s: i128 = row.iter().zip(&adj).map(|(x, a)| x * a[j]).sum();
                            prop_assert_eq!(s, if i == j { d } else { 0 });
                        }
                    }
                }
            }
        }

        #[test]
        fn rank_bounded_and_consistent(entries in proptest::collection::vec(-2i64..=2, 12)) {
            let m: Vec<Vec<i64>> = entries.chunks(4).map(|c| c.to_vec()).collect();
            let r = rank_exact(&m);
            prop_assert!(r <= 3);
            let sq: Vec<Vec<i64>> = m.iter().map(|row| row[..3].to_vec()).collect();
            if det_exact(&sq) != BigInt::from(0) {
                prop_assert_eq!(r, 3);
            }
        }
    }
}
