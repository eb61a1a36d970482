//! Exact linear algebra over the integers and rationals.
//!
//! Intersection matrices and their right-hand sides are always integral, so
//! definiteness is decided by fraction-free (Bareiss) elimination and systems
//! are solved by rational Gaussian elimination. No floating point.

use crate::arith::Rat;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("singular matrix")]
    Singular,
    #[error("dimension mismatch")]
    Dimension,
}

/// Leading principal minors `det(M[..k][..k])` for `k = 1..=n`, by one-step
/// fraction-free elimination. Stops early and pads with zeros if a pivot
/// vanishes (any such matrix is not definite, which is all callers need).
pub fn leading_principal_minors(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut minors = Vec::with_capacity(n);
    let mut prev_pivot = BigInt::from(1);
    for k in 0..n {
        let pivot = a[k][k].clone();
        minors.push(pivot.clone());
        if pivot.is_zero() {
            minors.resize(n, BigInt::zero());
            return minors;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let num = &pivot * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev_pivot; // exact by Bareiss
            }
        }
        prev_pivot = pivot;
    }
    minors
}

/// Sylvester test: `m` is positive definite iff every leading principal
/// minor is positive. On failure returns the 1-based index and value of the
/// first offending minor.
pub fn positive_definite(m: &[Vec<BigInt>]) -> Result<(), (usize, BigInt)> {
    for (k, minor) in leading_principal_minors(m).iter().enumerate() {
        if !minor.is_positive() {
            return Err((k + 1, minor.clone()));
        }
    }
    Ok(())
}

/// Solves `M x = rhs` exactly over the rationals.
pub fn solve(m: &[Vec<BigInt>], rhs: &[BigInt]) -> Result<Vec<Rat>, LinalgError> {
    let n = m.len();
    if rhs.len() != n || m.iter().any(|row| row.len() != n) {
        return Err(LinalgError::Dimension);
    }
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            row.iter()
                .map(|x| Rat::from_integer(x.clone()))
                .chain(std::iter::once(Rat::from_integer(b.clone())))
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(LinalgError::Singular)?;
        a.swap(col, pivot_row);
        let pivot = a[col][col].clone();
        let lead: Vec<Rat> = a[col].clone();
        for row in a.iter_mut().skip(col + 1) {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pivot;
            for (c, lead_c) in lead.iter().enumerate().skip(col) {
                let sub = &factor * lead_c;
                row[c] -= sub;
            }
        }
    }
    let mut x = vec![Rat::zero(); n];
    for row in (0..n).rev() {
        let mut acc = a[row][n].clone();
        for c in (row + 1)..n {
            acc -= &a[row][c] * &x[c];
        }
        x[row] = acc / &a[row][row];
    }
    Ok(x)
}
