//! End-to-end solving of generalized n-fold programs.
//!
//! Phase I finds a feasible point, Phase II improves it by Graver
//! augmentation. Two test sets are available: the full Graver basis of
//! `[A,B]^(n)` assembled from `G([A,B]^(g))`, or, when every variable is
//! bounded by some row of the system, only the Graver elements that fit in
//! that box, which is a complete test set for all points in the box.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::augment::{
    box_violation, descend_to_box, optimize_scaled_traced, optimize_traced, AugmentStep,
};
use crate::error::{Error, Result};
use crate::graver::{graver_basis, truncated_graver_basis, GraverBasis};
use crate::instance::{NFoldInstance, SolveOutcome};
use crate::lattice::integer_solution;
use crate::linalg::{negative_part, nfold_matrix, positive_part, IntMatrix, IntVec};
use crate::nfold::{graver_complexity, union_of_embeddings};

/// The feasibility program: slack pairs on every equation, minimizing their
/// sum. It is again an n-fold program with
/// `A' = (A, 0, 0, I_r, -I_r)` and `B' = (B, I_s, -I_s, 0, 0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxiliaryProgram {
    pub instance: NFoldInstance,
    /// A feasible point written down from the right-hand side.
    pub initial: IntVec,
    /// Position of each original variable in the auxiliary layout.
    pub original_var_index: Vec<usize>,
}

impl AuxiliaryProgram {
    /// The original variables of an auxiliary point.
    pub fn restrict(&self, z: &IntVec) -> IntVec {
        self.original_var_index
            .iter()
            .map(|&i| z[i].clone())
            .collect()
    }
}

fn check_dims(a: &IntMatrix, b: &IntMatrix, n: usize, rhs: &IntVec) -> Result<()> {
    // reuse the instance validation with a zero cost vector
    NFoldInstance::new(
        a.clone(),
        b.clone(),
        n,
        rhs.clone(),
        IntVec::zeros(n * a.cols()),
    )
    .map(|_| ())
}

/// Builds the feasibility program for `[A,B]^(n) x = rhs`.
///
/// The initial point has all original variables 0, the `B`-row slacks of
/// block 1 holding `(b^0)+` and `(b^0)-`, and in every block `k` the `A`-row
/// slacks holding `(b^k)+` and `(b^k)-`.
pub fn auxiliary_instance(
    a: &IntMatrix,
    b: &IntMatrix,
    n: usize,
    rhs: &IntVec,
) -> Result<AuxiliaryProgram> {
    check_dims(a, b, n, rhs)?;
    let (r, s, q) = (a.rows(), b.rows(), a.cols());
    let width = q + 2 * s + 2 * r;
    let eye_r = IntMatrix::identity(r);
    let eye_s = IntMatrix::identity(s);
    let a_bar = a
        .hstack(&IntMatrix::zeros(r, 2 * s))?
        .hstack(&eye_r)?
        .hstack(&eye_r.negated())?;
    let b_bar = b
        .hstack(&eye_s)?
        .hstack(&eye_s.negated())?
        .hstack(&IntMatrix::zeros(s, 2 * r))?;

    let mut cost = vec![BigInt::zero(); n * width];
    let mut z = vec![BigInt::zero(); n * width];
    for k in 0..n {
        for j in q..width {
            cost[k * width + j] = BigInt::from(1);
        }
    }
    let top = rhs.slice(0, s);
    for (i, (p, m)) in positive_part(&top)
        .iter()
        .zip(negative_part(&top).iter())
        .enumerate()
    {
        z[q + i] = p.clone();
        z[q + s + i] = m.clone();
    }
    for k in 0..n {
        let block = rhs.slice(s + k * r, s + (k + 1) * r);
        let base = k * width + q + 2 * s;
        for (i, (p, m)) in positive_part(&block)
            .iter()
            .zip(negative_part(&block).iter())
            .enumerate()
        {
            z[base + i] = p.clone();
            z[base + r + i] = m.clone();
        }
    }
    let original_var_index = (0..n)
        .flat_map(|k| (0..q).map(move |j| k * width + j))
        .collect();
    let instance = NFoldInstance::new(a_bar, b_bar, n, rhs.clone(), IntVec::new(cost))?;
    Ok(AuxiliaryProgram {
        instance,
        initial: IntVec::new(z),
        original_var_index,
    })
}

/// Feasibility through the auxiliary program: optimize it from its
/// written-down point with its n-fold Graver basis and restrict the optimum
/// when the total slack reaches zero.
pub fn find_feasible(
    a: &IntMatrix,
    b: &IntMatrix,
    n: usize,
    rhs: &IntVec,
) -> Result<Option<IntVec>> {
    Ok(default_solver().feasible_by_auxiliary(a, b, n, rhs)?.0)
}

/// How Phase I looks for a feasible point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseOne {
    /// An integer solution of the equations, pushed into `x >= 0` by Graver
    /// moves that shrink its distance to the box.
    #[default]
    Lattice,
    /// The slack-minimizing auxiliary n-fold program.
    Auxiliary,
}

/// Which test set drives the augmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TestSet {
    /// `Truncated` when every variable is bounded by the system, `NFold`
    /// otherwise.
    #[default]
    Auto,
    /// The full basis `G([A,B]^(n))`.
    NFold,
    /// Graver elements of `[A,B]^(n)` within the per-variable bounds.
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolverOptions {
    pub phase_one: PhaseOne,
    pub test_set: TestSet,
    /// Use cost bit-scaling in Phase II.
    pub scaled: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolveStats {
    /// Size of the Phase II test set.
    pub graver_size: usize,
    /// `g(A,B)` when the full n-fold basis was assembled from it.
    pub graver_complexity: Option<usize>,
    pub augmentation_steps: usize,
    pub phase1_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub outcome: SolveOutcome,
    pub stats: SolveStats,
    /// The feasible point Phase II started from.
    pub start: Option<IntVec>,
    /// Phase II steps in order.
    pub steps: Vec<AugmentStep>,
    /// The test set Phase II used.
    pub test_set: Option<Arc<GraverBasis>>,
}

/// Upper bounds `x_j <= u_j` implied by rows whose coefficients all have the
/// same sign, or `None` if such a row already rules out `x >= 0`.
pub fn variable_bounds(m: &IntMatrix, rhs: &IntVec) -> Result<Option<Vec<Option<BigInt>>>> {
    if rhs.len() != m.rows() {
        return Err(Error::LengthMismatch {
            expected: m.rows(),
            actual: rhs.len(),
        });
    }
    let mut bounds: Vec<Option<BigInt>> = vec![None; m.cols()];
    for i in 0..m.rows() {
        let row = m.row(i);
        let flip = if row.iter().all(|e| !e.is_negative()) {
            false
        } else if row.iter().all(|e| !e.is_positive()) {
            true
        } else {
            continue;
        };
        let target = if flip { -&rhs[i] } else { rhs[i].clone() };
        if target.is_negative() {
            return Ok(None);
        }
        for (j, e) in row.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            let coef = e.abs();
            let cap = target.div_floor(&coef);
            bounds[j] = Some(match bounds[j].take() {
                Some(old) if old <= cap => old,
                _ => cap,
            });
        }
    }
    Ok(Some(bounds))
}

/// Up to this many bricks the n-fold basis is completed directly.
const DIRECT_NFOLD: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum CacheKey {
    NFold(IntMatrix, IntMatrix, usize),
    Truncated(IntMatrix, Vec<Option<BigInt>>),
}

/// Solver with memoized Graver bases. Safe to share between threads.
#[derive(Debug, Default)]
pub struct Solver {
    options: SolverOptions,
    bases: Mutex<HashMap<CacheKey, Arc<GraverBasis>>>,
    complexities: Mutex<HashMap<(IntMatrix, IntMatrix), Option<usize>>>,
}

fn default_solver() -> &'static Solver {
    static SOLVER: OnceLock<Solver> = OnceLock::new();
    SOLVER.get_or_init(Solver::default)
}

/// Solves `instance` with default options and a process-wide cache.
pub fn solve(instance: &NFoldInstance) -> Result<SolveOutcome> {
    default_solver().solve(instance)
}

impl Solver {
    pub fn new(options: SolverOptions) -> Self {
        Solver {
            options,
            ..Solver::default()
        }
    }

    pub fn options(&self) -> SolverOptions {
        self.options
    }

    pub fn solve(&self, instance: &NFoldInstance) -> Result<SolveOutcome> {
        Ok(self.solve_report(instance)?.outcome)
    }

    fn cached(
        &self,
        key: CacheKey,
        build: impl FnOnce() -> Result<GraverBasis>,
    ) -> Result<Arc<GraverBasis>> {
        if let Some(g) = self.bases.lock().expect("cache lock").get(&key) {
            return Ok(g.clone());
        }
        // computed outside the lock; a concurrent duplicate is harmless
        let g = Arc::new(build()?);
        self.bases
            .lock()
            .expect("cache lock")
            .entry(key)
            .or_insert(g.clone());
        Ok(g)
    }

    /// `g(A,B)`, or `None` when it is out of reach.
    pub fn complexity(&self, a: &IntMatrix, b: &IntMatrix) -> Result<Option<usize>> {
        let key = (a.clone(), b.clone());
        if let Some(g) = self.complexities.lock().expect("cache lock").get(&key) {
            return Ok(*g);
        }
        let g = match graver_complexity(a, b) {
            Ok(g) => Some(g.value),
            Err(Error::Budget(_)) => None,
            Err(e) => return Err(e),
        };
        self.complexities
            .lock()
            .expect("cache lock")
            .insert(key, g);
        Ok(g)
    }

    /// `G([A,B]^(n))`, memoized per pair and size.
    pub fn nfold_basis(&self, a: &IntMatrix, b: &IntMatrix, n: usize) -> Result<Arc<GraverBasis>> {
        // the complexity search itself completes the 2-fold matrix
        let g = if n <= DIRECT_NFOLD { None } else { self.complexity(a, b)? };
        match g {
            Some(g) if n > g => {
                let base = self.nfold_basis(a, b, g)?;
                self.cached(CacheKey::NFold(a.clone(), b.clone(), n), || {
                    union_of_embeddings(&base, a.cols(), g, n)
                })
            }
            _ => self.cached(CacheKey::NFold(a.clone(), b.clone(), n), || {
                Ok(graver_basis(&nfold_matrix(a, b, n)?))
            }),
        }
    }

    fn truncated_basis(&self, m: &IntMatrix, bounds: &[Option<BigInt>]) -> Result<Arc<GraverBasis>> {
        self.cached(CacheKey::Truncated(m.clone(), bounds.to_vec()), || {
            truncated_graver_basis(m, bounds)
        })
    }

    /// Phase I through the auxiliary program; also returns the step count.
    pub fn feasible_by_auxiliary(
        &self,
        a: &IntMatrix,
        b: &IntMatrix,
        n: usize,
        rhs: &IntVec,
    ) -> Result<(Option<IntVec>, usize)> {
        let aux = auxiliary_instance(a, b, n, rhs)?;
        let inst = &aux.instance;
        let g = self.nfold_basis(inst.a(), inst.b(), n)?;
        let run = optimize_traced(&inst.matrix(), &g, &aux.initial, inst.cost())?;
        let steps = run.steps.len();
        match run.outcome {
            SolveOutcome::Optimal { x, objective } if objective.is_zero() => {
                Ok((Some(aux.restrict(&x)), steps))
            }
            SolveOutcome::Optimal { .. } => Ok((None, steps)),
            other => Err(Error::Invalid(format!(
                "auxiliary program is bounded below by 0 but was reported {}",
                other.status()
            ))),
        }
    }

    /// Full solve with statistics and the Phase II trace.
    pub fn solve_report(&self, instance: &NFoldInstance) -> Result<SolveReport> {
        let m = instance.matrix();
        let rhs = instance.rhs();
        let mut stats = SolveStats::default();
        let infeasible = |stats: SolveStats| SolveReport {
            outcome: SolveOutcome::Infeasible,
            stats,
            start: None,
            steps: Vec::new(),
            test_set: None,
        };

        let Some(bounds) = variable_bounds(&m, rhs)? else {
            return Ok(infeasible(stats));
        };
        let truncate = match self.options.test_set {
            TestSet::Auto => bounds.iter().all(Option::is_some),
            TestSet::NFold => false,
            TestSet::Truncated => true,
        };
        let (a, b, n) = (instance.a(), instance.b(), instance.n());
        let test_set = if truncate {
            self.truncated_basis(&m, &bounds)?
        } else {
            if n > DIRECT_NFOLD {
                stats.graver_complexity = self.complexity(a, b)?;
            }
            self.nfold_basis(a, b, n)?
        };
        stats.graver_size = test_set.len();

        let start = match self.options.phase_one {
            PhaseOne::Auxiliary => {
                let (x, steps) = self.feasible_by_auxiliary(a, b, n, rhs)?;
                stats.phase1_steps = steps;
                x
            }
            PhaseOne::Lattice => {
                let Some(x0) = integer_solution(&m, rhs)? else {
                    return Ok(infeasible(stats));
                };
                let (x, steps) = descend_to_box(&test_set, &x0, &bounds)?;
                stats.phase1_steps = steps;
                if box_violation(&x, &bounds).is_zero() {
                    Some(x)
                } else if truncate {
                    self.certify_with_wider_box(&m, &x, &bounds, &mut stats)?
                } else {
                    // the full basis is a test set for the violation itself
                    None
                }
            }
        };
        let Some(start) = start else {
            return Ok(infeasible(stats));
        };
        instance.check_feasible(&start)?;

        let run = if self.options.scaled {
            optimize_scaled_traced(&m, &test_set, &start, instance.cost())?
        } else {
            optimize_traced(&m, &test_set, &start, instance.cost())?
        };
        stats.augmentation_steps = run.steps.len();
        if let SolveOutcome::Optimal { x, objective } = &run.outcome {
            instance.check_feasible(x)?;
            debug_assert_eq!(instance.objective(x)?, *objective);
        }
        Ok(SolveReport {
            outcome: run.outcome,
            stats,
            start: Some(start),
            steps: run.steps,
            test_set: Some(test_set),
        })
    }

    /// The descent with the box-sized test set stalled outside the box. The
    /// remaining iterates live in `[min(x,0), max(x,u)]`, so the Graver
    /// elements fitting that wider range decide feasibility exactly.
    fn certify_with_wider_box(
        &self,
        m: &IntMatrix,
        x: &IntVec,
        bounds: &[Option<BigInt>],
        stats: &mut SolveStats,
    ) -> Result<Option<IntVec>> {
        let width: Vec<Option<BigInt>> = x
            .iter()
            .zip(bounds)
            .map(|(xi, u)| {
                u.as_ref().map(|u| {
                    let high = if xi > u { xi.clone() } else { u.clone() };
                    let low = if xi.is_negative() { xi.clone() } else { BigInt::zero() };
                    high - low
                })
            })
            .collect();
        let wide = truncated_graver_basis(m, &width)?;
        let (x, steps) = descend_to_box(&wide, x, bounds)?;
        stats.phase1_steps += steps;
        Ok(box_violation(&x, bounds).is_zero().then_some(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(cols: usize, rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows_i64(cols, rows).unwrap()
    }

    fn unit_pair() -> (IntMatrix, IntMatrix) {
        (mat(2, &[vec![1, 1]]), IntMatrix::identity(2))
    }

    fn v(e: &[i64]) -> IntVec {
        IntVec::from_i64s(e)
    }

    fn all_solvers() -> Vec<Solver> {
        let mut out = Vec::new();
        for phase_one in [PhaseOne::Lattice, PhaseOne::Auxiliary] {
            for test_set in [TestSet::Auto, TestSet::NFold, TestSet::Truncated] {
                for scaled in [false, true] {
                    out.push(Solver::new(SolverOptions {
                        phase_one,
                        test_set,
                        scaled,
                    }));
                }
            }
        }
        out
    }

    #[test]
    fn auxiliary_layout() {
        let (a, b) = unit_pair();
        let aux = auxiliary_instance(&a, &b, 2, &v(&[1, 1, 1, 1])).unwrap();
        let inst = &aux.instance;
        assert_eq!(inst.q(), 8);
        assert_eq!(inst.a().row_vec(0), v(&[1, 1, 0, 0, 0, 0, 1, -1]));
        assert_eq!(inst.b().row_vec(0), v(&[1, 0, 1, 0, -1, 0, 0, 0]));
        assert_eq!(inst.b().row_vec(1), v(&[0, 1, 0, 1, 0, -1, 0, 0]));
        assert_eq!(
            aux.initial,
            v(&[0, 0, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 1, 0])
        );
        inst.check_feasible(&aux.initial).unwrap();
        assert_eq!(inst.objective(&aux.initial).unwrap(), BigInt::from(4));
        assert_eq!(aux.original_var_index, vec![0, 1, 8, 9]);

        let zero = auxiliary_instance(&a, &b, 2, &IntVec::zeros(4)).unwrap();
        assert!(zero.initial.is_zero());

        let neg = auxiliary_instance(&a, &b, 2, &v(&[0, 0, -1, 0])).unwrap();
        assert_eq!(neg.initial[7], BigInt::from(1));
        neg.instance.check_feasible(&neg.initial).unwrap();
    }

    #[test]
    fn feasibility_examples() {
        let (a, b) = unit_pair();
        let x = find_feasible(&a, &b, 2, &v(&[1, 1, 1, 1])).unwrap().unwrap();
        assert!(x == v(&[1, 0, 0, 1]) || x == v(&[0, 1, 1, 0]));
        assert_eq!(find_feasible(&a, &b, 1, &v(&[1, 1, 3])).unwrap(), None);
        assert_eq!(
            find_feasible(&a, &b, 2, &IntVec::zeros(4)).unwrap(),
            Some(IntVec::zeros(4))
        );
    }

    #[test]
    fn solve_examples() {
        let (a, b) = unit_pair();
        let inst =
            NFoldInstance::new(a.clone(), b.clone(), 2, v(&[1, 1, 1, 1]), v(&[1, 2, 4, 3])).unwrap();
        let infeasible =
            NFoldInstance::new(a.clone(), b.clone(), 1, v(&[1, 1, 3]), v(&[1, 2])).unwrap();
        let free = NFoldInstance::new(
            mat(1, &[vec![0]]),
            mat(1, &[vec![0]]),
            1,
            v(&[0, 0]),
            v(&[-1]),
        )
        .unwrap();
        for solver in all_solvers() {
            let opts = solver.options();
            assert_eq!(
                solver.solve(&inst).unwrap(),
                SolveOutcome::Optimal {
                    x: v(&[1, 0, 0, 1]),
                    objective: BigInt::from(4)
                },
                "{opts:?}"
            );
            assert_eq!(solver.solve(&infeasible).unwrap(), SolveOutcome::Infeasible, "{opts:?}");
            assert_eq!(solver.solve(&free).unwrap(), SolveOutcome::Unbounded, "{opts:?}");
        }
    }

    #[test]
    fn bounds_from_sign_rows() {
        let m = mat(3, &[vec![1, 2, 0], vec![-1, 0, -3], vec![1, -1, 1]]);
        assert_eq!(
            variable_bounds(&m, &v(&[5, -7, 0])).unwrap(),
            Some(vec![
                Some(BigInt::from(5)),
                Some(BigInt::from(2)),
                Some(BigInt::from(2))
            ])
        );
        assert_eq!(variable_bounds(&m, &v(&[-1, 0, 0])).unwrap(), None);
        assert_eq!(variable_bounds(&m, &v(&[1, 1, 0])).unwrap(), None);
    }
}
