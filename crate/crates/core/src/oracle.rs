//! Exhaustive reference implementations for small instances.
//!
//! Everything here enumerates integer points of a box with a depth-first
//! search that prunes a partial assignment as soon as some equation can no
//! longer be met by the remaining coordinates. Nothing is shared with the
//! Graver machinery.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::graver::is_conformal;
use crate::linalg::{IntMatrix, IntVec};

/// The same bound on every coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxBound {
    bound: u32,
}

impl BoxBound {
    pub fn new(bound: u32) -> Self {
        BoxBound { bound }
    }

    pub fn bound(self) -> u32 {
        self.bound
    }
}

fn small(v: &BigInt) -> Result<i128> {
    v.to_i128()
        .ok_or_else(|| Error::Invalid(format!("{v} is too large for exhaustive search")))
}

/// Enumerates `x` in `[lo, hi]^cols` with `M x = b` in lexicographic order.
struct Enumerator {
    rows: usize,
    cols: usize,
    /// Column-major copy of `M`.
    columns: Vec<Vec<i128>>,
    rhs: Vec<i128>,
    lo: i128,
    hi: i128,
    /// `rest_min[j][i]`: least value coordinates `j..` can add to row `i`.
    rest_min: Vec<Vec<i128>>,
    rest_max: Vec<Vec<i128>>,
}

impl Enumerator {
    fn new(m: &IntMatrix, rhs: &[BigInt], lo: i128, hi: i128) -> Result<Self> {
        let (rows, cols) = (m.rows(), m.cols());
        let columns: Vec<Vec<i128>> = (0..cols)
            .map(|j| m.column(j).iter().map(small).collect())
            .collect::<Result<_>>()?;
        let rhs: Vec<i128> = rhs.iter().map(small).collect::<Result<_>>()?;
        let mut rest_min = vec![vec![0i128; rows]; cols + 1];
        let mut rest_max = vec![vec![0i128; rows]; cols + 1];
        for j in (0..cols).rev() {
            for i in 0..rows {
                let (p, q) = (columns[j][i] * lo, columns[j][i] * hi);
                rest_min[j][i] = rest_min[j + 1][i] + p.min(q);
                rest_max[j][i] = rest_max[j + 1][i] + p.max(q);
            }
        }
        Ok(Enumerator {
            rows,
            cols,
            columns,
            rhs,
            lo,
            hi,
            rest_min,
            rest_max,
        })
    }

    fn run(&self, mut visit: impl FnMut(&[i128])) {
        let mut x = vec![0i128; self.cols];
        let mut partial = vec![0i128; self.rows];
        self.dfs(0, &mut x, &mut partial, &mut visit);
    }

    fn dfs(
        &self,
        j: usize,
        x: &mut [i128],
        partial: &mut [i128],
        visit: &mut impl FnMut(&[i128]),
    ) {
        let reachable = (0..self.rows).all(|i| {
            let need = self.rhs[i] - partial[i];
            self.rest_min[j][i] <= need && need <= self.rest_max[j][i]
        });
        if !reachable {
            return;
        }
        if j == self.cols {
            visit(x);
            return;
        }
        for value in self.lo..=self.hi {
            x[j] = value;
            for (p, a) in partial.iter_mut().zip(&self.columns[j]) {
                *p += a * value;
            }
            self.dfs(j + 1, x, partial, visit);
            for (p, a) in partial.iter_mut().zip(&self.columns[j]) {
                *p -= a * value;
            }
        }
        x[j] = 0;
    }
}

fn to_intvec(x: &[i128]) -> IntVec {
    x.iter().map(|&e| BigInt::from(e)).collect()
}

/// A lexicographically first minimizer of `c x` over `x` in
/// `[0, bound]^cols` with `M x = b`, or `None` if there is no such point.
pub fn brute_force_solve(
    m: &IntMatrix,
    b: &IntVec,
    c: &IntVec,
    bound: BoxBound,
) -> Result<Option<(IntVec, BigInt)>> {
    if b.len() != m.rows() {
        return Err(Error::LengthMismatch {
            expected: m.rows(),
            actual: b.len(),
        });
    }
    if c.len() != m.cols() {
        return Err(Error::LengthMismatch {
            expected: m.cols(),
            actual: c.len(),
        });
    }
    let costs: Vec<i128> = c.iter().map(small).collect::<Result<_>>()?;
    let walk = Enumerator::new(m, b.as_slice(), 0, i128::from(bound.bound))?;
    let mut best: Option<(Vec<i128>, i128)> = None;
    walk.run(|x| {
        let value: i128 = x.iter().zip(&costs).map(|(a, b)| a * b).sum();
        if best.as_ref().is_none_or(|(_, v)| value < *v) {
            best = Some((x.to_vec(), value));
        }
    });
    Ok(best.map(|(x, v)| (to_intvec(&x), BigInt::from(v))))
}

/// The `⊑`-minimal nonzero kernel vectors of `M` in `[-bound, bound]^cols`,
/// in lexicographic order.
///
/// A kernel vector conformal to a boxed vector lies in the box too, so the
/// result is exactly the part of the Graver basis inside the box.
pub fn brute_force_graver(m: &IntMatrix, bound: BoxBound) -> Result<Vec<IntVec>> {
    let hi = i128::from(bound.bound);
    let zero = vec![BigInt::default(); m.rows()];
    let walk = Enumerator::new(m, &zero, -hi, hi)?;
    let mut kernel: Vec<IntVec> = Vec::new();
    walk.run(|x| {
        if x.iter().any(|&e| e != 0) {
            kernel.push(to_intvec(x));
        }
    });
    let minimal: Vec<IntVec> = kernel
        .iter()
        .filter(|v| !kernel.iter().any(|u| u != *v && is_conformal(u, v)))
        .cloned()
        .collect();
    Ok(minimal)
}

/// Fewest rolls of width `stock` that can be cut into `demands[j]` pieces of
/// width `widths[j]`, by search over multisets of cutting patterns. `None`
/// if some demanded piece is wider than a roll.
pub fn brute_force_min_rolls(widths: &[u32], demands: &[u32], stock: u32) -> Option<u32> {
    assert_eq!(widths.len(), demands.len());
    if widths
        .iter()
        .zip(demands)
        .any(|(&w, &d)| d > 0 && (w == 0 || w > stock))
    {
        return None;
    }
    // every nonzero pattern fitting on one roll
    let mut patterns: Vec<Vec<u32>> = Vec::new();
    let mut current = vec![0u32; widths.len()];
    collect_patterns(widths, demands, stock, 0, &mut current, &mut patterns);
    patterns.retain(|p| p.iter().any(|&e| e > 0));

    // fewest patterns summing exactly to each demand vector, smallest first
    let dims: Vec<usize> = demands.iter().map(|&d| d as usize + 1).collect();
    let total: usize = dims.iter().product();
    let decode = |mut idx: usize| -> Vec<u32> {
        let mut out = Vec::with_capacity(dims.len());
        for &d in &dims {
            out.push((idx % d) as u32);
            idx /= d;
        }
        out
    };
    let encode = |v: &[u32]| -> usize {
        v.iter()
            .zip(&dims)
            .rev()
            .fold(0, |acc, (&e, &d)| acc * d + e as usize)
    };
    let mut best = vec![u32::MAX; total];
    best[0] = 0;
    for idx in 1..total {
        let need = decode(idx);
        for p in &patterns {
            if p.iter().zip(&need).all(|(a, b)| a <= b) {
                let rest: Vec<u32> = need.iter().zip(p).map(|(a, b)| a - b).collect();
                let prev = best[encode(&rest)];
                if prev != u32::MAX && prev + 1 < best[idx] {
                    best[idx] = prev + 1;
                }
            }
        }
    }
    Some(best[encode(demands)])
}

fn collect_patterns(
    widths: &[u32],
    demands: &[u32],
    room: u32,
    j: usize,
    current: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if j == widths.len() {
        out.push(current.clone());
        return;
    }
    let mut count = 0;
    loop {
        current[j] = count;
        collect_patterns(widths, demands, room - count * widths[j], j + 1, current, out);
        if count == demands[j] || widths[j] == 0 || (count + 1) * widths[j] > room {
            break;
        }
        count += 1;
    }
    current[j] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::nfold_matrix;

    fn mat(cols: usize, rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows_i64(cols, rows).unwrap()
    }

    fn v(e: &[i64]) -> IntVec {
        IntVec::from_i64s(e)
    }

    fn unit_pair() -> IntMatrix {
        nfold_matrix(&mat(2, &[vec![1, 1]]), &IntMatrix::identity(2), 2).unwrap()
    }

    #[test]
    fn solve_examples() {
        let m = unit_pair();
        assert_eq!(
            brute_force_solve(&m, &v(&[1, 1, 1, 1]), &v(&[1, 2, 4, 3]), BoxBound::new(1)).unwrap(),
            Some((v(&[1, 0, 0, 1]), BigInt::from(4)))
        );
        assert_eq!(
            brute_force_solve(&m, &v(&[1, 1, 1, 2]), &v(&[1, 2, 4, 3]), BoxBound::new(3)).unwrap(),
            None
        );
        assert_eq!(
            brute_force_solve(&m, &IntVec::zeros(4), &v(&[1, 0, 2, 5]), BoxBound::new(2)).unwrap(),
            Some((IntVec::zeros(4), BigInt::from(0)))
        );
    }

    #[test]
    fn graver_examples() {
        assert_eq!(
            brute_force_graver(&mat(2, &[vec![1, 1]]), BoxBound::new(2)).unwrap(),
            vec![v(&[-1, 1]), v(&[1, -1])]
        );
        assert_eq!(
            brute_force_graver(&unit_pair(), BoxBound::new(1)).unwrap(),
            vec![v(&[-1, 1, 1, -1]), v(&[1, -1, -1, 1])]
        );
        assert!(brute_force_graver(&IntMatrix::identity(3), BoxBound::new(3))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn min_rolls_examples() {
        assert_eq!(brute_force_min_rolls(&[3, 5], &[4, 2], 7), Some(4));
        assert_eq!(brute_force_min_rolls(&[3], &[5], 7), Some(3));
        assert_eq!(brute_force_min_rolls(&[3], &[2], 7), Some(1));
        assert_eq!(brute_force_min_rolls(&[3, 4], &[0, 0], 7), Some(0));
        assert_eq!(brute_force_min_rolls(&[8], &[1], 7), None);
    }
}
