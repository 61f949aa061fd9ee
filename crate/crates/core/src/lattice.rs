//! Exact column reduction of integer matrices: lattice bases of `{x : Mx = 0}`
//! and integer solutions of `Mx = b`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::linalg::{IntMatrix, IntVec};

/// Column echelon form `M U = H` with `U` unimodular.
///
/// Row `pivots[t].0` of `H` is the first row with a nonzero entry in column
/// `t`, and columns `pivots.len()..cols` of `H` are zero.
#[derive(Debug, Clone)]
pub struct ColumnEchelon {
    h: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    pivots: Vec<(usize, usize)>,
    rows: usize,
    cols: usize,
}

impl ColumnEchelon {
    pub fn new(m: &IntMatrix) -> Self {
        let rows = m.rows();
        let cols = m.cols();
        // store column-major so column operations touch contiguous memory
        let mut h: Vec<Vec<BigInt>> = (0..cols).map(|j| m.column(j).into_inner()).collect();
        let mut u: Vec<Vec<BigInt>> = (0..cols)
            .map(|j| IntVec::unit(cols, j, 1).into_inner())
            .collect();
        let mut pivots = Vec::new();
        let mut next = 0;

        for i in 0..rows {
            if next == cols {
                break;
            }
            loop {
                let best = (next..cols)
                    .filter(|&j| !h[j][i].is_zero())
                    .min_by(|&a, &b| h[a][i].abs().cmp(&h[b][i].abs()));
                let Some(best) = best else { break };
                h.swap(next, best);
                u.swap(next, best);
                let mut done = true;
                for j in next + 1..cols {
                    if h[j][i].is_zero() {
                        continue;
                    }
                    let q = h[j][i].div_floor(&h[next][i]);
                    let (head, tail) = h.split_at_mut(j);
                    axpy(&mut tail[0], &q, &head[next]);
                    let (head, tail) = u.split_at_mut(j);
                    axpy(&mut tail[0], &q, &head[next]);
                    if !h[j][i].is_zero() {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if next < cols && !h[next][i].is_zero() {
                if h[next][i].is_negative() {
                    negate(&mut h[next]);
                    negate(&mut u[next]);
                }
                // reduce earlier pivot columns modulo the new pivot to keep entries small
                for t in 0..next {
                    let q = h[t][i].div_floor(&h[next][i]);
                    if !q.is_zero() {
                        let (head, tail) = h.split_at_mut(next);
                        axpy(&mut head[t], &q, &tail[0]);
                        let (head, tail) = u.split_at_mut(next);
                        axpy(&mut head[t], &q, &tail[0]);
                    }
                }
                pivots.push((i, next));
                next += 1;
            }
        }
        ColumnEchelon {
            h,
            u,
            pivots,
            rows,
            cols,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Rows holding the pivots, in increasing order.
    pub fn pivot_rows(&self) -> Vec<usize> {
        self.pivots.iter().map(|&(i, _)| i).collect()
    }

    /// The nonzero columns of `H`; they generate the same lattice as the
    /// columns of `M`.
    pub fn echelon_columns(&self) -> Vec<IntVec> {
        self.h[..self.rank()]
            .iter()
            .map(|c| IntVec::new(c.clone()))
            .collect()
    }

    /// A lattice basis of `{x in Z^cols : Mx = 0}`.
    pub fn kernel_basis(&self) -> Vec<IntVec> {
        self.u[self.rank()..]
            .iter()
            .map(|c| IntVec::new(c.clone()))
            .collect()
    }

    /// Some integer `x` with `Mx = b`, or `None` when no integer solution exists.
    pub fn solve(&self, b: &IntVec) -> Result<Option<IntVec>> {
        if b.len() != self.rows {
            return Err(crate::Error::LengthMismatch {
                expected: self.rows,
                actual: b.len(),
            });
        }
        let mut y: Vec<BigInt> = vec![BigInt::zero(); self.cols];
        let mut p = 0;
        for i in 0..self.rows {
            let mut residual = b[i].clone();
            for t in 0..p {
                residual -= &self.h[t][i] * &y[t];
            }
            if p < self.pivots.len() && self.pivots[p].0 == i {
                let (quot, rem) = residual.div_rem(&self.h[p][i]);
                if !rem.is_zero() {
                    return Ok(None);
                }
                y[p] = quot;
                p += 1;
            } else if !residual.is_zero() {
                return Ok(None);
            }
        }
        let mut x = vec![BigInt::zero(); self.cols];
        for (t, yt) in y.iter().enumerate().take(p) {
            if yt.is_zero() {
                continue;
            }
            for (xi, ui) in x.iter_mut().zip(&self.u[t]) {
                *xi += yt * ui;
            }
        }
        Ok(Some(IntVec::new(x)))
    }
}

/// `target -= q * source`
fn axpy(target: &mut [BigInt], q: &BigInt, source: &[BigInt]) {
    if q.is_one() {
        for (t, s) in target.iter_mut().zip(source) {
            *t -= s;
        }
    } else {
        for (t, s) in target.iter_mut().zip(source) {
            if !s.is_zero() {
                *t -= q * s;
            }
        }
    }
}

fn negate(v: &mut [BigInt]) {
    for e in v.iter_mut() {
        *e = -std::mem::take(e);
    }
}

/// Integer basis of the kernel lattice `L(M) = {x : Mx = 0}`; empty when
/// the kernel is `{0}`.
pub fn kernel_lattice_basis(m: &IntMatrix) -> Vec<IntVec> {
    ColumnEchelon::new(m).kernel_basis()
}

/// Any integer solution of `Mx = b` (entries may be negative).
pub fn integer_solution(m: &IntMatrix, b: &IntVec) -> Result<Option<IntVec>> {
    ColumnEchelon::new(m).solve(b)
}
