//! Exact positive-semidefiniteness test.
//!
//! The matrix is scaled to integers and reduced with fraction-free
//! (Bareiss) symmetric elimination, always pivoting on a positive diagonal
//! entry. After `t` steps every remaining entry equals the corresponding
//! Schur-complement entry times the positive leading principal minor, so
//! signs can be read off directly.

use crate::rational::{big, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PsdOutcome {
    Psd { rank: usize },
    /// A negative Schur-complement diagonal entry at `index`.
    NegativePivot { index: usize, value: Rational },
    /// Zero diagonal at `index` with a non-zero off-diagonal entry in its row.
    ZeroPivotNonzeroRow { index: usize, partner: usize, value: Rational },
    Asymmetric { row: usize, col: usize },
}

impl PsdOutcome {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdOutcome::Psd { .. })
    }
}

pub fn psd_check(matrix: &[Vec<Rational>]) -> PsdOutcome {
    let n = matrix.len();
    for i in 0..n {
        assert_eq!(matrix[i].len(), n, "matrix must be square");
        for j in 0..i {
            if matrix[i][j] != matrix[j][i] {
                return PsdOutcome::Asymmetric { row: i, col: j };
            }
        }
    }
    let lcm = matrix
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let mut a: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|row| row.iter().map(|v| (v * big(lcm.clone())).to_integer()).collect())
        .collect();
    let scale = big(lcm);
    let mut active: Vec<usize> = (0..n).collect();
    let mut prev = BigInt::one();
    let mut rank = 0;
    loop {
        let pivot = active.iter().copied().find(|&i| a[i][i].is_positive());
        let Some(p) = pivot else {
            for &i in &active {
                if a[i][i].is_negative() {
                    let value = Rational::new(a[i][i].clone(), prev.clone()) / &scale;
                    return PsdOutcome::NegativePivot { index: i, value };
                }
            }
            for &i in &active {
                for &j in &active {
                    if !a[i][j].is_zero() {
                        let value = Rational::new(a[i][j].clone(), prev.clone()) / &scale;
                        return PsdOutcome::ZeroPivotNonzeroRow { index: i, partner: j, value };
                    }
                }
            }
            return PsdOutcome::Psd { rank };
        };
        active.retain(|&i| i != p);
        let pv = a[p][p].clone();
        for &j in &active {
            for &k in &active {
                if k < j {
                    continue;
                }
                let num = &pv * &a[j][k] - &a[j][p] * &a[p][k];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                a[j][k] = q.clone();
                a[k][j] = q;
            }
        }
        prev = pv;
        rank += 1;
    }
}
