//! Generalized n-fold programs `min { c x : [A,B]^(n) x = b, x >= 0 }` and
//! their outcomes.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::linalg::{nfold_matrix, IntMatrix, IntVec};

/// One generalized n-fold program.
///
/// `rhs` is laid out as `(b^0, b^1, ..., b^n)` with `b^0` of length `s` and
/// each `b^k` of length `r`; `cost` as `(c^1, ..., c^n)` with `c^k` of
/// length `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NFoldInstance {
    a: IntMatrix,
    b: IntMatrix,
    n: usize,
    rhs: IntVec,
    cost: IntVec,
}

impl NFoldInstance {
    pub fn new(a: IntMatrix, b: IntMatrix, n: usize, rhs: IntVec, cost: IntVec) -> Result<Self> {
        if a.cols() != b.cols() {
            return Err(Error::Dimension(format!(
                "A has {} columns but B has {}",
                a.cols(),
                b.cols()
            )));
        }
        if a.cols() == 0 {
            return Err(Error::Dimension("A and B need at least one column".into()));
        }
        if n == 0 {
            return Err(Error::Dimension("n must be at least 1".into()));
        }
        let rows = b.rows() + n * a.rows();
        if rhs.len() != rows {
            return Err(Error::LengthMismatch {
                expected: rows,
                actual: rhs.len(),
            });
        }
        if cost.len() != n * a.cols() {
            return Err(Error::LengthMismatch {
                expected: n * a.cols(),
                actual: cost.len(),
            });
        }
        Ok(NFoldInstance {
            a,
            b,
            n,
            rhs,
            cost,
        })
    }

    pub fn a(&self) -> &IntMatrix {
        &self.a
    }

    pub fn b(&self) -> &IntMatrix {
        &self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Rows of `A`.
    pub fn r(&self) -> usize {
        self.a.rows()
    }

    /// Rows of `B`.
    pub fn s(&self) -> usize {
        self.b.rows()
    }

    /// Columns of `A` and `B`.
    pub fn q(&self) -> usize {
        self.a.cols()
    }

    pub fn rhs(&self) -> &IntVec {
        &self.rhs
    }

    pub fn cost(&self) -> &IntVec {
        &self.cost
    }

    /// `b^0`.
    pub fn rhs_top(&self) -> IntVec {
        self.rhs.slice(0, self.s())
    }

    /// `b^k` for `k` in `1..=n`.
    pub fn rhs_block(&self, k: usize) -> IntVec {
        let start = self.s() + (k - 1) * self.r();
        self.rhs.slice(start, start + self.r())
    }

    /// `[A,B]^(n)`.
    pub fn matrix(&self) -> IntMatrix {
        nfold_matrix(&self.a, &self.b, self.n).expect("validated at construction")
    }

    pub fn objective(&self, x: &IntVec) -> Result<BigInt> {
        self.cost.dot(x)
    }

    /// Checks `x >= 0` and `[A,B]^(n) x = b`.
    pub fn check_feasible(&self, x: &IntVec) -> Result<()> {
        if let Some(i) = x.first_negative() {
            return Err(Error::Negative(i));
        }
        let lhs = self.matrix().mul_vec(x)?;
        match lhs.iter().zip(self.rhs.iter()).position(|(l, r)| l != r) {
            None => Ok(()),
            Some(i) => Err(Error::Invalid(format!(
                "equation {i} is violated: {} != {}",
                lhs[i], self.rhs[i]
            ))),
        }
    }
}

/// Result of solving an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Infeasible,
    Unbounded,
    Optimal { x: IntVec, objective: BigInt },
}

impl SolveOutcome {
    pub fn is_optimal(&self) -> bool {
        matches!(self, SolveOutcome::Optimal { .. })
    }

    pub fn objective(&self) -> Option<&BigInt> {
        match self {
            SolveOutcome::Optimal { objective, .. } => Some(objective),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&IntVec> {
        match self {
            SolveOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            SolveOutcome::Infeasible => "infeasible",
            SolveOutcome::Unbounded => "unbounded",
            SolveOutcome::Optimal { .. } => "optimal",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_pair(rhs: &[i64]) -> Result<NFoldInstance> {
        NFoldInstance::new(
            IntMatrix::from_rows_i64(2, &[vec![1, 1]]).unwrap(),
            IntMatrix::identity(2),
            2,
            IntVec::from_i64s(rhs),
            IntVec::from([1, 2, 4, 3]),
        )
    }

    #[test]
    fn layout() {
        let inst = unit_pair(&[1, 1, 1, 1]).unwrap();
        assert_eq!((inst.r(), inst.s(), inst.q(), inst.n()), (1, 2, 2, 2));
        assert_eq!(inst.rhs_top(), IntVec::from([1, 1]));
        assert_eq!(inst.rhs_block(2), IntVec::from([1]));
        assert!(inst.check_feasible(&IntVec::from([1, 0, 0, 1])).is_ok());
        assert!(inst.check_feasible(&IntVec::from([1, 0, 1, 0])).is_err());
        assert_eq!(
            inst.check_feasible(&IntVec::from([2, -1, -1, 2])),
            Err(Error::Negative(1))
        );
        assert_eq!(inst.objective(&IntVec::from([1, 0, 0, 1])).unwrap(), BigInt::from(4));
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(unit_pair(&[1, 1, 1]).is_err());
        let a = IntMatrix::from_rows_i64(2, &[vec![1, 1]]).unwrap();
        assert!(NFoldInstance::new(
            a.clone(),
            IntMatrix::identity(3),
            1,
            IntVec::zeros(4),
            IntVec::zeros(2)
        )
        .is_err());
        assert!(NFoldInstance::new(
            a.clone(),
            IntMatrix::identity(2),
            0,
            IntVec::zeros(2),
            IntVec::zeros(0)
        )
        .is_err());
        assert!(NFoldInstance::new(
            a,
            IntMatrix::identity(2),
            1,
            IntVec::zeros(3),
            IntVec::zeros(3)
        )
        .is_err());
    }
}
