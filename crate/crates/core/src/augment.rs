//! Augmentation along Graver directions.
//!
//! A feasible `x` of `min { c x : M x = b, x >= 0 }` is optimal iff no Graver
//! element `g` of `M` has `x - g >= 0` and `c g > 0`. The loop here repeatedly
//! moves along the best such direction with the longest feasible step.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graver::GraverBasis;
use crate::instance::SolveOutcome;
use crate::linalg::{negative_part, positive_part, IntMatrix, IntVec};

/// One move `x -> x - step * direction`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentStep {
    pub direction: IntVec,
    pub step: BigInt,
    /// `step * c . direction`, always positive.
    pub improvement: BigInt,
}

/// Largest multiple of a direction that keeps the iterate nonnegative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepLength {
    Count(BigInt),
    Unbounded,
}

/// An optimization run together with every step it took.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Augmentation {
    pub outcome: SolveOutcome,
    pub steps: Vec<AugmentStep>,
}

fn check_len(expected: usize, v: &IntVec) -> Result<()> {
    if v.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: v.len(),
        });
    }
    Ok(())
}

fn check_nonnegative(x: &IntVec) -> Result<()> {
    match x.first_negative() {
        Some(i) => Err(Error::Negative(i)),
        None => Ok(()),
    }
}

/// `x - g >= 0`, looking only at the support of `g`.
fn applicable(x: &IntVec, g: &IntVec) -> bool {
    g.iter().zip(x.iter()).all(|(gi, xi)| !gi.is_positive() || xi >= gi)
}

/// Some `g` in `G` with `x - g >= 0` and `c1 . g+ - c2 . g- > 0`, the first
/// one in canonical order. `None` certifies that no integer direction with
/// those properties exists at all.
pub fn directed_improving_direction(
    g: &GraverBasis,
    x: &IntVec,
    c1: &IntVec,
    c2: &IntVec,
) -> Result<Option<IntVec>> {
    let cols = g.matrix_cols();
    check_len(cols, x)?;
    check_len(cols, c1)?;
    check_len(cols, c2)?;
    check_nonnegative(x)?;
    for e in g {
        if !applicable(x, e) {
            continue;
        }
        let gain = c1.dot(&positive_part(e))? - c2.dot(&negative_part(e))?;
        if gain.is_positive() {
            return Ok(Some(e.clone()));
        }
    }
    Ok(None)
}

/// `max { λ >= 1 : x - λ g >= 0 }`.
pub fn max_step(x: &IntVec, g: &IntVec) -> Result<StepLength> {
    check_len(x.len(), g)?;
    check_nonnegative(x)?;
    if let Some(i) = g.iter().zip(x.iter()).position(|(gi, xi)| gi > xi) {
        return Err(Error::StepPrecondition(i));
    }
    Ok(step_of(x, g))
}

fn step_of(x: &IntVec, g: &IntVec) -> StepLength {
    g.iter()
        .zip(x.iter())
        .filter(|(gi, _)| gi.is_positive())
        .map(|(gi, xi)| xi.div_floor(gi))
        .min()
        .map_or(StepLength::Unbounded, StepLength::Count)
}

fn check_inputs(m: &IntMatrix, g: &GraverBasis, x: &IntVec, c: &IntVec) -> Result<()> {
    if g.matrix_cols() != m.cols() {
        return Err(Error::LengthMismatch {
            expected: m.cols(),
            actual: g.matrix_cols(),
        });
    }
    check_len(m.cols(), x)?;
    check_len(m.cols(), c)?;
    check_nonnegative(x)?;
    let bad = g
        .elements()
        .par_iter()
        .any(|e| !m.annihilates(e).unwrap_or(false));
    if bad {
        return Err(Error::NotInKernel);
    }
    Ok(())
}

/// Candidate `(improvement, step, index)`; larger improvement wins, then the
/// earlier element.
type Candidate = (BigInt, StepLength, usize);

fn better(a: Candidate, b: Candidate) -> Candidate {
    match a.0.cmp(&b.0) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => {
            if a.2 <= b.2 {
                a
            } else {
                b
            }
        }
    }
}

/// Greedy augmentation from the feasible point `x`.
///
/// Returns `Unbounded` as soon as an improving direction has no positive
/// entry, and otherwise `Optimal` once no element of `G` improves `x`.
pub fn optimize(m: &IntMatrix, g: &GraverBasis, x: &IntVec, c: &IntVec) -> Result<SolveOutcome> {
    Ok(optimize_traced(m, g, x, c)?.outcome)
}

/// [`optimize`], also reporting each step.
pub fn optimize_traced(
    m: &IntMatrix,
    g: &GraverBasis,
    x: &IntVec,
    c: &IntVec,
) -> Result<Augmentation> {
    check_inputs(m, g, x, c)?;
    run_greedy(g, x.clone(), c, Vec::new())
}

fn run_greedy(
    g: &GraverBasis,
    mut x: IntVec,
    c: &IntVec,
    mut steps: Vec<AugmentStep>,
) -> Result<Augmentation> {
    // only directions with c.g > 0 can ever improve
    let gains: Vec<(usize, BigInt)> = g
        .elements()
        .par_iter()
        .enumerate()
        .filter_map(|(i, e)| {
            let gain = c.dot(e).expect("lengths checked");
            gain.is_positive().then_some((i, gain))
        })
        .collect();
    let elements = g.elements();

    let ray = gains
        .iter()
        .any(|(i, _)| !elements[*i].iter().any(Signed::is_positive));
    if ray {
        return Ok(Augmentation {
            outcome: SolveOutcome::Unbounded,
            steps,
        });
    }

    loop {
        let best = gains
            .par_iter()
            .filter(|(i, _)| applicable(&x, &elements[*i]))
            .map(|(i, gain)| match step_of(&x, &elements[*i]) {
                StepLength::Count(lambda) => (gain * &lambda, StepLength::Count(lambda), *i),
                StepLength::Unbounded => (gain.clone(), StepLength::Unbounded, *i),
            })
            .reduce_with(better);
        let Some((improvement, step, i)) = best else {
            let objective = c.dot(&x)?;
            return Ok(Augmentation {
                outcome: SolveOutcome::Optimal { x, objective },
                steps,
            });
        };
        let StepLength::Count(lambda) = step else {
            return Ok(Augmentation {
                outcome: SolveOutcome::Unbounded,
                steps,
            });
        };
        x = x.sub_scaled(&lambda, &elements[i])?;
        steps.push(AugmentStep {
            direction: elements[i].clone(),
            step: lambda,
            improvement,
        });
    }
}

/// Same contract as [`optimize`], run by cost bit-scaling: the costs
/// `floor(c / 2^k)` are optimized for `k` from the top bit of `c` down to 0,
/// each level starting where the previous one stopped.
pub fn optimize_scaled(
    m: &IntMatrix,
    g: &GraverBasis,
    x: &IntVec,
    c: &IntVec,
) -> Result<SolveOutcome> {
    Ok(optimize_scaled_traced(m, g, x, c)?.outcome)
}

/// [`optimize_scaled`], also reporting each step (taken at any level).
pub fn optimize_scaled_traced(
    m: &IntMatrix,
    g: &GraverBasis,
    x: &IntVec,
    c: &IntVec,
) -> Result<Augmentation> {
    check_inputs(m, g, x, c)?;
    let bits = c.iter().map(|e| e.bits()).max().unwrap_or(0);
    let mut current = x.clone();
    let mut steps = Vec::new();
    for k in (1..bits).rev() {
        let divisor = BigInt::one() << k;
        let ck: IntVec = c.iter().map(|e| e.div_floor(&divisor)).collect();
        let level = run_greedy(g, current.clone(), &ck, steps)?;
        steps = level.steps;
        // a ray for a truncated cost need not be a ray for c itself
        if let SolveOutcome::Optimal { x, .. } = level.outcome {
            current = x;
        }
    }
    run_greedy(g, current, c, steps)
}

/// Distance of `v` from the interval `[0, upper]`.
fn box_distance(v: &BigInt, upper: Option<&BigInt>) -> BigInt {
    if v.is_negative() {
        -v
    } else {
        match upper {
            Some(u) if v > u => v - u,
            _ => BigInt::zero(),
        }
    }
}

/// Total distance of `x` from the box `0 <= x_i <= upper_i`.
pub fn box_violation(x: &IntVec, upper: &[Option<BigInt>]) -> BigInt {
    x.iter()
        .zip(upper)
        .map(|(v, u)| box_distance(v, u.as_ref()))
        .sum()
}

/// Change of the box violation when moving from `x` to `x - λ g`.
fn violation_delta(x: &IntVec, g: &IntVec, lambda: &BigInt, upper: &[Option<BigInt>]) -> BigInt {
    let mut delta = BigInt::zero();
    for ((xi, gi), ui) in x.iter().zip(g.iter()).zip(upper) {
        if gi.is_zero() {
            continue;
        }
        let moved = xi - lambda * gi;
        delta += box_distance(&moved, ui.as_ref()) - box_distance(xi, ui.as_ref());
    }
    delta
}

/// Longest step keeping every coordinate inside `[min(x_i, 0), max(x_i, u_i)]`,
/// so that no coordinate moves further away from its interval. `None` when
/// there is no limit.
fn region_step(x: &IntVec, g: &IntVec, upper: &[Option<BigInt>]) -> Option<BigInt> {
    let mut limit: Option<BigInt> = None;
    for ((xi, gi), ui) in x.iter().zip(g.iter()).zip(upper) {
        let bound = if gi.is_positive() {
            let low = if xi.is_negative() { xi.clone() } else { BigInt::zero() };
            Some((xi - low).div_floor(gi))
        } else if gi.is_negative() {
            ui.as_ref().map(|u| {
                let high = if xi > u { xi.clone() } else { u.clone() };
                (high - xi).div_floor(&-gi)
            })
        } else {
            None
        };
        if let Some(b) = bound {
            limit = Some(match limit {
                Some(l) if l <= b => l,
                _ => b,
            });
        }
    }
    limit
}

/// Best `λ` in `[1, limit]` for the piecewise linear convex violation along
/// `g`; only breakpoints and the ends of the range need checking.
fn best_violation_step(
    x: &IntVec,
    g: &IntVec,
    upper: &[Option<BigInt>],
    limit: Option<BigInt>,
) -> (BigInt, BigInt) {
    let one = BigInt::one();
    let mut candidates = vec![one.clone()];
    let mut furthest = one.clone();
    for ((xi, gi), ui) in x.iter().zip(g.iter()).zip(upper) {
        if gi.is_zero() {
            continue;
        }
        let mut kinks = vec![xi.clone()];
        if let Some(u) = ui {
            kinks.push(xi - u);
        }
        for num in kinks {
            let (lo, hi) = (num.div_floor(gi), num.div_ceil(gi));
            for lambda in [lo, hi] {
                if lambda >= one {
                    if lambda > furthest {
                        furthest = lambda.clone();
                    }
                    candidates.push(lambda);
                }
            }
        }
    }
    let cap = limit.unwrap_or(furthest);
    candidates.push(cap.clone());
    let mut best = (BigInt::zero(), one.clone());
    for lambda in candidates {
        if lambda < one || lambda > cap {
            continue;
        }
        let delta = violation_delta(x, g, &lambda, upper);
        if delta < best.0 || (delta == best.0 && lambda < best.1) {
            best = (delta, lambda);
        }
    }
    best
}

/// Moves an integer solution `x` of `M x = b` (any signs) towards the box
/// `0 <= x_i <= upper_i` along elements of `G`, always taking the move that
/// reduces [`box_violation`] the most. Returns the final point and the
/// number of moves.
///
/// No coordinate ever moves further from its interval, so the iterates stay
/// in `[min(x, 0), max(x, upper)]` for the starting `x`. If `G` contains every
/// Graver element fitting in that range, a final point with positive
/// violation proves that `M x = b` has no solution in the box.
pub fn descend_to_box(
    g: &GraverBasis,
    x: &IntVec,
    upper: &[Option<BigInt>],
) -> Result<(IntVec, usize)> {
    check_len(g.matrix_cols(), x)?;
    if upper.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: upper.len(),
        });
    }
    let one = BigInt::one();
    let elements = g.elements();
    let mut x = x.clone();
    let mut moves = 0;
    while box_violation(&x, upper).is_positive() {
        let best = elements
            .par_iter()
            .enumerate()
            .filter_map(|(i, e)| {
                if !violation_delta(&x, e, &one, upper).is_negative() {
                    return None;
                }
                let limit = region_step(&x, e, upper);
                if limit.as_ref().is_some_and(|l| l < &one) {
                    return None;
                }
                let (delta, lambda) = best_violation_step(&x, e, upper, limit);
                Some((delta, lambda, i))
            })
            .reduce_with(|a, b| match a.0.cmp(&b.0) {
                Ordering::Less => a,
                Ordering::Greater => b,
                Ordering::Equal => {
                    if a.2 <= b.2 {
                        a
                    } else {
                        b
                    }
                }
            });
        let Some((_, lambda, i)) = best else { break };
        x = x.sub_scaled(&lambda, &elements[i])?;
        moves += 1;
    }
    Ok((x, moves))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graver::graver_basis;
    use crate::linalg::nfold_matrix;

    fn unit_pair() -> (IntMatrix, GraverBasis) {
        let a = IntMatrix::from_rows_i64(2, &[vec![1, 1]]).unwrap();
        let m = nfold_matrix(&a, &IntMatrix::identity(2), 2).unwrap();
        let g = graver_basis(&m);
        (m, g)
    }

    fn v(e: &[i64]) -> IntVec {
        IntVec::from_i64s(e)
    }

    #[test]
    fn improving_directions() {
        let (_, g) = unit_pair();
        let c = v(&[3, 1, 1, 0]);
        assert_eq!(
            directed_improving_direction(&g, &v(&[1, 0, 0, 1]), &c, &c).unwrap(),
            Some(v(&[1, -1, -1, 1]))
        );
        assert_eq!(
            directed_improving_direction(&g, &v(&[0, 0, 0, 0]), &c, &c).unwrap(),
            None
        );
        let zero = IntVec::zeros(4);
        assert_eq!(
            directed_improving_direction(&g, &v(&[1, 1, 1, 1]), &zero, &zero).unwrap(),
            None
        );
        assert!(directed_improving_direction(&g, &v(&[-1, 0, 0, 0]), &c, &c).is_err());
    }

    #[test]
    fn step_lengths() {
        assert_eq!(
            max_step(&v(&[5, 0, 0, 5]), &v(&[1, -1, -1, 1])).unwrap(),
            StepLength::Count(BigInt::from(5))
        );
        assert_eq!(
            max_step(&v(&[0, 3, 3, 0]), &v(&[-1, 1, 1, -1])).unwrap(),
            StepLength::Count(BigInt::from(3))
        );
        assert_eq!(max_step(&v(&[2, 2]), &v(&[-1, -1])).unwrap(), StepLength::Unbounded);
        assert_eq!(
            max_step(&v(&[0, 2]), &v(&[1, -1])),
            Err(Error::StepPrecondition(0))
        );
    }

    #[test]
    fn optimize_examples() {
        let (m, g) = unit_pair();
        let c = v(&[1, 2, 4, 3]);
        let run = optimize_traced(&m, &g, &v(&[0, 1, 1, 0]), &c).unwrap();
        assert_eq!(
            run.outcome,
            SolveOutcome::Optimal {
                x: v(&[1, 0, 0, 1]),
                objective: BigInt::from(4)
            }
        );
        assert_eq!(run.steps.len(), 1);
        assert_eq!(run.steps[0].improvement, BigInt::from(2));

        let x = v(&[2, 1, 0, 3]);
        assert_eq!(
            optimize(&m, &g, &x, &IntVec::zeros(4)).unwrap(),
            SolveOutcome::Optimal {
                x: x.clone(),
                objective: BigInt::zero()
            }
        );

        let zero = IntMatrix::zeros(2, 1);
        let free = GraverBasis::from_elements(&zero, vec![v(&[1]), v(&[-1])]).unwrap();
        assert_eq!(
            optimize(&zero, &free, &v(&[0]), &v(&[-1])).unwrap(),
            SolveOutcome::Unbounded
        );
    }

    #[test]
    fn scaled_agrees() {
        let (m, g) = unit_pair();
        for c in [v(&[1, 2, 4, 3]), v(&[0, 0, 0, 0]), v(&[-7, 12, 5, -30])] {
            for x in [v(&[0, 1, 1, 0]), v(&[3, 2, 1, 4])] {
                assert_eq!(
                    optimize(&m, &g, &x, &c).unwrap(),
                    optimize_scaled(&m, &g, &x, &c).unwrap()
                );
            }
        }
        let c = v(&[1, 0, 0, 1]);
        let x = v(&[4, 1, 2, 3]);
        assert_eq!(
            optimize_traced(&m, &g, &x, &c).unwrap(),
            optimize_scaled_traced(&m, &g, &x, &c).unwrap()
        );
    }

    #[test]
    fn inconsistent_basis_is_rejected() {
        let (m, _) = unit_pair();
        let wrong = GraverBasis::from_elements(
            &IntMatrix::zeros(1, 4),
            vec![v(&[1, 0, 0, 0]), v(&[-1, 0, 0, 0])],
        )
        .unwrap();
        assert_eq!(
            optimize(&m, &wrong, &v(&[1, 0, 0, 1]), &v(&[1, 1, 1, 1])),
            Err(Error::NotInKernel)
        );
    }

    #[test]
    fn descent_reaches_the_box() {
        let (_, g) = unit_pair();
        let upper = vec![Some(BigInt::from(1)); 4];
        // (-2, 3, 3, -2) solves the unit-pair system for b = ((1,1),1,1)
        let (x, moves) = descend_to_box(&g, &v(&[-2, 3, 3, -2]), &upper).unwrap();
        assert!(box_violation(&x, &upper).is_zero());
        assert_eq!(moves, 1);
        // the shortest step reaching zero violation wins
        assert_eq!(x, v(&[0, 1, 1, 0]));
    }

    #[test]
    fn descent_stalls_when_the_box_is_empty() {
        let (_, g) = unit_pair();
        let upper = vec![None; 4];
        // row sums force x1 + x2 = 1 but block sum 3: no nonnegative solution
        let (x, _) = descend_to_box(&g, &v(&[1, 0, 2, -2]), &upper).unwrap();
        assert!(box_violation(&x, &upper).is_positive());
    }
}
