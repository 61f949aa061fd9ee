//! The applications as n-fold programs: long multiway transportation,
//! minimum cost shipment and cutting stock, each with a decoder back to its
//! natural coordinates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::instance::{NFoldInstance, SolveOutcome};
use crate::linalg::{IntMatrix, IntVec};
use crate::solve::Solver;

/// An encoded application: either a program to solve, or infeasibility that
/// is already evident from the data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Encoded {
    Program(NFoldInstance),
    Infeasible,
}

impl Encoded {
    pub fn program(&self) -> Option<&NFoldInstance> {
        match self {
            Encoded::Program(p) => Some(p),
            Encoded::Infeasible => None,
        }
    }
}

fn dim_err(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

fn check_shape<T>(name: &str, v: &[T], len: usize) -> Result<()> {
    if v.len() != len {
        return Err(dim_err(format!("{name} has {} entries, expected {len}", v.len())));
    }
    Ok(())
}

/// Row-major strides for `dims`.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut out = vec![1; dims.len()];
    for a in (0..dims.len().saturating_sub(1)).rev() {
        out[a] = out[a + 1] * dims[a + 1];
    }
    out
}

fn unravel(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for a in (0..dims.len()).rev() {
        out[a] = idx % dims[a];
        idx /= dims[a];
    }
    out
}

/// Line-sum equations of `m_1 x ... x m_e` arrays (cells in row-major order).
///
/// The families are listed by summed axis from the last to the first; inside
/// a family, rows follow the remaining indices in row-major order. For
/// `e = 2` this gives the row sums followed by the column sums.
pub fn line_sum_matrix(dims: &[usize]) -> IntMatrix {
    let cells: usize = dims.iter().product();
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for axis in (0..dims.len()).rev() {
        let rest: Vec<usize> = (0..dims.len()).filter(|&a| a != axis).map(|a| dims[a]).collect();
        let count: usize = rest.iter().product();
        let start = rows.len();
        rows.extend((0..count).map(|_| vec![0i64; cells]));
        let rest_strides = strides(&rest);
        for cell in 0..cells {
            let idx = unravel(cell, dims);
            let row: usize = idx
                .iter()
                .enumerate()
                .filter(|&(a, _)| a != axis)
                .map(|(_, &i)| i)
                .zip(&rest_strides)
                .map(|(i, s)| i * s)
                .sum();
            rows[start + row][cell] = 1;
        }
    }
    IntMatrix::from_rows_i64(cells, &rows).expect("rows have one entry per cell")
}

/// A long `m_1 x ... x m_{d-1} x l` transportation problem with all line
/// sums prescribed.
///
/// Tables and costs are flat in row-major order with the layer index `k`
/// last. `margins[a]` holds the sums over axis `a` (`a = d-1` is the layer
/// axis), flat in row-major order over the remaining axes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DWayInstance {
    dims: Vec<usize>,
    l: usize,
    cost: Vec<BigInt>,
    margins: Vec<Vec<BigInt>>,
}

impl DWayInstance {
    pub fn new(
        dims: Vec<usize>,
        l: usize,
        cost: Vec<BigInt>,
        margins: Vec<Vec<BigInt>>,
    ) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) || l == 0 {
            return Err(dim_err("all table dimensions must be positive"));
        }
        let full: Vec<usize> = dims.iter().copied().chain([l]).collect();
        let cells: usize = full.iter().product();
        check_shape("cost", &cost, cells)?;
        check_shape("margins", &margins, full.len())?;
        for (a, m) in margins.iter().enumerate() {
            check_shape(&format!("margin {a}"), m, cells / full[a])?;
        }
        Ok(DWayInstance {
            dims,
            l,
            cost,
            margins,
        })
    }

    /// `d`, the number of table axes including the layer axis.
    pub fn d(&self) -> usize {
        self.dims.len() + 1
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn cost(&self) -> &[BigInt] {
        &self.cost
    }

    pub fn margins(&self) -> &[Vec<BigInt>] {
        &self.margins
    }

    fn cells(&self) -> usize {
        self.dims.iter().product()
    }

    /// Margins of a full table, in the layout of [`DWayInstance::margins`].
    pub fn margins_of(&self, table: &[BigInt]) -> Result<Vec<Vec<BigInt>>> {
        let full: Vec<usize> = self.dims.iter().copied().chain([self.l]).collect();
        check_shape("table", table, full.iter().product())?;
        let mut out = Vec::with_capacity(full.len());
        for axis in 0..full.len() {
            let rest: Vec<usize> = (0..full.len()).filter(|&a| a != axis).map(|a| full[a]).collect();
            let rest_strides = strides(&rest);
            let mut sums = vec![BigInt::zero(); rest.iter().product()];
            for (cell, value) in table.iter().enumerate() {
                let idx = unravel(cell, &full);
                let pos: usize = idx
                    .iter()
                    .enumerate()
                    .filter(|&(a, _)| a != axis)
                    .map(|(_, &i)| i)
                    .zip(&rest_strides)
                    .map(|(i, s)| i * s)
                    .sum();
                sums[pos] += value;
            }
            out.push(sums);
        }
        Ok(out)
    }

    /// Layer-major n-fold coordinates of a natural table.
    pub fn to_nfold(&self, table: &[BigInt]) -> Result<IntVec> {
        let (q, l) = (self.cells(), self.l);
        check_shape("table", table, q * l)?;
        let mut x = vec![BigInt::zero(); q * l];
        for cell in 0..q {
            for k in 0..l {
                x[k * q + cell] = table[cell * l + k].clone();
            }
        }
        Ok(IntVec::new(x))
    }

    /// Natural table of n-fold coordinates.
    pub fn decode(&self, x: &IntVec) -> Result<Vec<BigInt>> {
        let (q, l) = (self.cells(), self.l);
        check_shape("solution", x.as_slice(), q * l)?;
        let mut table = vec![BigInt::zero(); q * l];
        for cell in 0..q {
            for k in 0..l {
                table[cell * l + k] = x[k * q + cell].clone();
            }
        }
        Ok(table)
    }
}

/// `n = l`, `A` the line-sum matrix of one layer, `B = I_q`; the layer
/// margins go to `b^k` and the sums over layers to `b^0`.
pub fn encode_dway(tp: &DWayInstance) -> Result<NFoldInstance> {
    let (q, l) = (tp.cells(), tp.l);
    let e = tp.dims.len();
    let a = line_sum_matrix(&tp.dims);
    let mut rhs: Vec<BigInt> = tp.margins[e].clone();
    for k in 0..l {
        // same family order as line_sum_matrix; margin entries carry k last
        for axis in (0..e).rev() {
            let margin = &tp.margins[axis];
            let per_layer = margin.len() / l;
            rhs.extend((0..per_layer).map(|i| margin[i * l + k].clone()));
        }
    }
    let cost = tp.to_nfold(&tp.cost)?;
    NFoldInstance::new(a, IntMatrix::identity(q), l, IntVec::new(rhs), cost)
}

/// An `r x s x l` transportation problem with line sums `u` (over layers),
/// `v` (over columns) and `w` (over rows). Arrays are nested row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeWayInstance {
    pub r: usize,
    pub s: usize,
    pub l: usize,
    /// `cost[i][j][k]`.
    pub cost: Vec<Vec<Vec<BigInt>>>,
    /// `u[i][j] = sum_k x[i][j][k]`.
    pub u: Vec<Vec<BigInt>>,
    /// `v[i][k] = sum_j x[i][j][k]`.
    pub v: Vec<Vec<BigInt>>,
    /// `w[j][k] = sum_i x[i][j][k]`.
    pub w: Vec<Vec<BigInt>>,
}

fn check_grid<T>(name: &str, grid: &[Vec<T>], rows: usize, cols: usize) -> Result<()> {
    check_shape(name, grid, rows)?;
    for row in grid {
        check_shape(name, row, cols)?;
    }
    Ok(())
}

impl ThreeWayInstance {
    pub fn new(
        cost: Vec<Vec<Vec<BigInt>>>,
        u: Vec<Vec<BigInt>>,
        v: Vec<Vec<BigInt>>,
        w: Vec<Vec<BigInt>>,
    ) -> Result<Self> {
        let r = cost.len();
        let s = cost.first().map_or(0, Vec::len);
        let l = cost.first().and_then(|c| c.first()).map_or(0, Vec::len);
        if r == 0 || s == 0 || l == 0 {
            return Err(dim_err("all table dimensions must be positive"));
        }
        for plane in &cost {
            check_grid("cost", plane, s, l)?;
        }
        check_grid("u", &u, r, s)?;
        check_grid("v", &v, r, l)?;
        check_grid("w", &w, s, l)?;
        Ok(ThreeWayInstance {
            r,
            s,
            l,
            cost,
            u,
            v,
            w,
        })
    }

    /// The same problem as a `d = 3` instance.
    pub fn as_dway(&self) -> DWayInstance {
        let flat3 = |t: &Vec<Vec<Vec<BigInt>>>| t.iter().flatten().flatten().cloned().collect();
        let flat2 = |t: &Vec<Vec<BigInt>>| t.iter().flatten().cloned().collect();
        DWayInstance {
            dims: vec![self.r, self.s],
            l: self.l,
            cost: flat3(&self.cost),
            margins: vec![flat2(&self.w), flat2(&self.v), flat2(&self.u)],
        }
    }

    /// Reindexes `x[i][j][k]` as `x^k_{i,j}`.
    pub fn to_nfold(&self, table: &[Vec<Vec<BigInt>>]) -> Result<IntVec> {
        check_shape("table", table, self.r)?;
        for plane in table {
            check_grid("table", plane, self.s, self.l)?;
        }
        let flat: Vec<BigInt> = table.iter().flatten().flatten().cloned().collect();
        self.as_dway().to_nfold(&flat)
    }

    /// `x[i][j][k]` from n-fold coordinates.
    pub fn decode(&self, x: &IntVec) -> Result<Vec<Vec<Vec<BigInt>>>> {
        let flat = self.as_dway().decode(x)?;
        Ok(flat
            .chunks(self.s * self.l)
            .map(|plane| plane.chunks(self.l).map(<[BigInt]>::to_vec).collect())
            .collect())
    }
}

/// `n = l`, `q = r s`, `A` the `(r+s) x rs` row-and-column-sum matrix,
/// `B = I_q`, `b^0 = (u_ij)`, `b^k = ((v_ik), (w_jk))`.
pub fn encode_3way(tp: &ThreeWayInstance) -> Result<NFoldInstance> {
    encode_dway(&tp.as_dway())
}

/// Items of `t` types with weights `w_j` and counts `n_j`, shipped on
/// vessels with capacities `u_k` at cost `p[j][k]` per item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShipmentInstance {
    pub weights: Vec<BigInt>,
    pub counts: Vec<BigInt>,
    pub capacities: Vec<BigInt>,
    /// `costs[j][k]`.
    pub costs: Vec<Vec<BigInt>>,
}

impl ShipmentInstance {
    pub fn new(
        weights: Vec<BigInt>,
        counts: Vec<BigInt>,
        capacities: Vec<BigInt>,
        costs: Vec<Vec<BigInt>>,
    ) -> Result<Self> {
        let (t, v) = (weights.len(), capacities.len());
        if t == 0 || v == 0 {
            return Err(dim_err("need at least one item type and one vessel"));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(dim_err("weights must be positive"));
        }
        if counts.iter().chain(&capacities).any(Signed::is_negative) {
            return Err(dim_err("counts and capacities must be nonnegative"));
        }
        check_shape("counts", &counts, t)?;
        check_grid("costs", &costs, t, v)?;
        Ok(ShipmentInstance {
            weights,
            counts,
            capacities,
            costs,
        })
    }

    pub fn types(&self) -> usize {
        self.weights.len()
    }

    pub fn vessels(&self) -> usize {
        self.capacities.len()
    }

    fn total_weight(&self) -> BigInt {
        self.weights.iter().zip(&self.counts).map(|(w, n)| w * n).sum()
    }

    /// Per-vessel loads `loads[k][j]` and unused capacities from n-fold
    /// coordinates.
    pub fn decode(&self, x: &IntVec) -> Result<ShipmentPlan> {
        let q = self.types() + 1;
        check_shape("solution", x.as_slice(), q * self.vessels())?;
        let blocks = x.as_slice().chunks(q);
        Ok(ShipmentPlan {
            loads: blocks.clone().map(|b| b[..q - 1].to_vec()).collect(),
            unused: blocks.map(|b| b[q - 1].clone()).collect(),
        })
    }

    /// n-fold coordinates of a plan.
    pub fn to_nfold(&self, plan: &ShipmentPlan) -> Result<IntVec> {
        check_grid("loads", &plan.loads, self.vessels(), self.types())?;
        check_shape("unused", &plan.unused, self.vessels())?;
        Ok(plan
            .loads
            .iter()
            .zip(&plan.unused)
            .flat_map(|(l, u)| l.iter().chain([u]).cloned())
            .collect())
    }
}

/// A shipment (or cutting) plan in natural coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShipmentPlan {
    /// `loads[k][j]`: items of type `j` on vessel `k`.
    pub loads: Vec<Vec<BigInt>>,
    /// Unused capacity of each vessel.
    pub unused: Vec<BigInt>,
}

/// `n = v`, `A = (w_1, ..., w_t, 1)`, `B = I_{t+1}`, `b^k = u_k`,
/// `b^0 = (n_1, ..., n_t, sum u_k - sum n_j w_j)`, costs `p[j][k]` and 0 on
/// the slack. A negative slack total is infeasible outright.
pub fn encode_shipment(sp: &ShipmentInstance) -> Result<Encoded> {
    let capacity: BigInt = sp.capacities.iter().sum();
    let spare = capacity - sp.total_weight();
    if spare.is_negative() {
        return Ok(Encoded::Infeasible);
    }
    let costs = (0..sp.vessels())
        .map(|k| {
            let mut c: Vec<BigInt> = (0..sp.types()).map(|j| sp.costs[j][k].clone()).collect();
            c.push(BigInt::zero());
            c
        })
        .collect();
    pack_program(&sp.weights, &sp.counts, spare, sp.capacities.clone(), costs)
}

fn pack_program(
    weights: &[BigInt],
    counts: &[BigInt],
    spare: BigInt,
    capacities: Vec<BigInt>,
    costs: Vec<Vec<BigInt>>,
) -> Result<Encoded> {
    let q = weights.len() + 1;
    let a_row: Vec<BigInt> = weights.iter().cloned().chain([BigInt::from(1)]).collect();
    let a = IntMatrix::from_rows(q, vec![a_row])?;
    let rhs: Vec<BigInt> = counts.iter().cloned().chain([spare]).chain(capacities).collect();
    let n = costs.len();
    let cost: Vec<BigInt> = costs.into_iter().flatten().collect();
    Ok(Encoded::Program(NFoldInstance::new(
        a,
        IntMatrix::identity(q),
        n,
        IntVec::new(rhs),
        IntVec::new(cost),
    )?))
}

/// Pieces of widths `w_j`, `n_j` of each, to be cut from stock rolls of
/// width `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuttingStockInstance {
    widths: Vec<BigInt>,
    demands: Vec<BigInt>,
    stock: BigInt,
}

impl CuttingStockInstance {
    pub fn new(widths: Vec<BigInt>, demands: Vec<BigInt>, stock: BigInt) -> Result<Self> {
        if widths.is_empty() {
            return Err(dim_err("need at least one width"));
        }
        check_shape("demands", &demands, widths.len())?;
        if !stock.is_positive() {
            return Err(dim_err("stock width must be positive"));
        }
        if widths.iter().any(|w| !w.is_positive() || w > &stock) {
            return Err(dim_err("widths must be positive and at most the stock width"));
        }
        if demands.iter().any(Signed::is_negative) {
            return Err(dim_err("demands must be nonnegative"));
        }
        Ok(CuttingStockInstance {
            widths,
            demands,
            stock,
        })
    }

    pub fn widths(&self) -> &[BigInt] {
        &self.widths
    }

    pub fn demands(&self) -> &[BigInt] {
        &self.demands
    }

    pub fn stock(&self) -> &BigInt {
        &self.stock
    }

    fn total_width(&self) -> BigInt {
        self.widths.iter().zip(&self.demands).map(|(w, n)| w * n).sum()
    }

    /// `ceil(sum n_j w_j / u)`: no fewer rolls can hold the pieces.
    pub fn lower_bound(&self) -> BigInt {
        self.total_width().div_ceil(&self.stock)
    }

    /// `sum_j ceil(n_j / floor(u / w_j))`: every type cut from its own rolls.
    pub fn upper_bound(&self) -> BigInt {
        self.widths
            .iter()
            .zip(&self.demands)
            .map(|(w, n)| n.div_ceil(&(&self.stock / w)))
            .sum()
    }

    /// Per-roll cuts `loads[k][j]` and waste from n-fold coordinates.
    pub fn decode(&self, x: &IntVec) -> Result<ShipmentPlan> {
        let q = self.widths.len() + 1;
        if !x.len().is_multiple_of(q) {
            return Err(dim_err("solution length is not a multiple of t + 1"));
        }
        let blocks = x.as_slice().chunks(q);
        Ok(ShipmentPlan {
            loads: blocks.clone().map(|b| b[..q - 1].to_vec()).collect(),
            unused: blocks.map(|b| b[q - 1].clone()).collect(),
        })
    }
}

/// The shipment encoding with `rolls` identical vessels of capacity `u`,
/// cost `w_j` per piece and 1 per unit of waste.
pub fn encode_cutting_stock(cs: &CuttingStockInstance, rolls: usize) -> Result<Encoded> {
    if rolls == 0 {
        return Err(dim_err("rolls must be at least 1"));
    }
    let spare = &cs.stock * BigInt::from(rolls) - cs.total_width();
    if spare.is_negative() {
        return Ok(Encoded::Infeasible);
    }
    let block: Vec<BigInt> = cs.widths.iter().cloned().chain([BigInt::from(1)]).collect();
    pack_program(
        &cs.widths,
        &cs.demands,
        spare,
        vec![cs.stock.clone(); rolls],
        vec![block; rolls],
    )
}

/// Result of [`min_rolls`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RollPlan {
    pub rolls: usize,
    /// Cuts per roll (empty when nothing is demanded).
    pub plan: ShipmentPlan,
    /// `(rolls, feasible)` for every probe, in order.
    pub trace: Vec<(usize, bool)>,
}

/// Fewest stock rolls meeting all demands, by binary search between
/// [`CuttingStockInstance::lower_bound`] and
/// [`CuttingStockInstance::upper_bound`] with the solver deciding each probe.
pub fn min_rolls(solver: &Solver, cs: &CuttingStockInstance) -> Result<RollPlan> {
    let to_count = |v: BigInt| {
        v.to_usize()
            .ok_or_else(|| dim_err(format!("{v} rolls is beyond this implementation")))
    };
    let mut lo = to_count(cs.lower_bound())?;
    let mut hi = to_count(cs.upper_bound())?;
    let mut trace = Vec::new();
    let empty = ShipmentPlan {
        loads: Vec::new(),
        unused: Vec::new(),
    };
    if hi == 0 {
        return Ok(RollPlan {
            rolls: 0,
            plan: empty,
            trace,
        });
    }
    let probe = |rolls: usize| -> Result<Option<ShipmentPlan>> {
        match encode_cutting_stock(cs, rolls)? {
            Encoded::Infeasible => Ok(None),
            Encoded::Program(p) => match solver.solve(&p)? {
                SolveOutcome::Optimal { x, .. } => Ok(Some(cs.decode(&x)?)),
                SolveOutcome::Infeasible => Ok(None),
                SolveOutcome::Unbounded => Err(dim_err("cutting stock program cannot be unbounded")),
            },
        }
    };
    let mut best: Option<ShipmentPlan> = None;
    lo = lo.max(1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let found = probe(mid)?;
        trace.push((mid, found.is_some()));
        match found {
            Some(plan) => {
                hi = mid;
                best = Some(plan);
            }
            None => lo = mid + 1,
        }
    }
    let plan = match best.filter(|p| p.loads.len() == hi) {
        Some(p) => p,
        None => {
            let p = probe(hi)?;
            trace.push((hi, p.is_some()));
            p.ok_or_else(|| dim_err(format!("the bound of {hi} rolls should be feasible")))?
        }
    };
    check_monotone(&trace)?;
    Ok(RollPlan {
        rolls: hi,
        plan,
        trace,
    })
}

/// Feasibility must be monotone in the number of rolls.
fn check_monotone(trace: &[(usize, bool)]) -> Result<()> {
    for &(k, feasible) in trace {
        if feasible {
            if let Some(&(bad, _)) = trace.iter().find(|&&(j, f)| j > k && !f) {
                return Err(Error::Invalid(format!(
                    "{k} rolls are feasible but {bad} rolls are not"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::SolveOutcome;
    use crate::solve::solve;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&e| BigInt::from(e)).collect()
    }

    fn grid(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| big(r)).collect()
    }

    fn three_way(r: usize, s: usize, l: usize) -> ThreeWayInstance {
        let zero = || vec![vec![BigInt::zero(); l]; s];
        ThreeWayInstance::new(
            (0..r).map(|_| zero()).collect(),
            vec![vec![BigInt::zero(); s]; r],
            vec![vec![BigInt::zero(); l]; r],
            vec![vec![BigInt::zero(); l]; s],
        )
        .unwrap()
    }

    #[test]
    fn line_sum_matrix_2x3x2() {
        let inst = encode_3way(&three_way(3, 3, 2)).unwrap();
        let expected = IntMatrix::from_rows_i64(
            9,
            &[
                vec![1, 1, 1, 0, 0, 0, 0, 0, 0],
                vec![0, 0, 0, 1, 1, 1, 0, 0, 0],
                vec![0, 0, 0, 0, 0, 0, 1, 1, 1],
                vec![1, 0, 0, 1, 0, 0, 1, 0, 0],
                vec![0, 1, 0, 0, 1, 0, 0, 1, 0],
                vec![0, 0, 1, 0, 0, 1, 0, 0, 1],
            ],
        )
        .unwrap();
        assert_eq!(inst.a(), &expected);
        assert_eq!(inst.b(), &IntMatrix::identity(9));
        assert_eq!(inst.n(), 2);
    }

    #[test]
    fn two_by_two_matrix() {
        let inst = encode_3way(&three_way(2, 2, 1)).unwrap();
        let expected = IntMatrix::from_rows_i64(
            4,
            &[vec![1, 1, 0, 0], vec![0, 0, 1, 1], vec![1, 0, 1, 0], vec![0, 1, 0, 1]],
        )
        .unwrap();
        assert_eq!(inst.a(), &expected);
    }

    #[test]
    fn three_way_layout_and_round_trip() {
        // x[i][j][k] = 1 + i + 2j + 3k on a 2 x 3 x 2 table
        let table: Vec<Vec<Vec<BigInt>>> = (0..2)
            .map(|i| {
                (0..3)
                    .map(|j| (0..2).map(|k| BigInt::from(1 + i + 2 * j + 3 * k)).collect())
                    .collect()
            })
            .collect();
        let sum = |f: &dyn Fn(usize, usize, usize) -> bool| -> BigInt {
            let mut acc = BigInt::zero();
            for i in 0..2 {
                for j in 0..3 {
                    for k in 0..2 {
                        if f(i, j, k) {
                            acc += &table[i][j][k];
                        }
                    }
                }
            }
            acc
        };
        let u = (0..2)
            .map(|a| (0..3).map(|b| sum(&|i, j, _| i == a && j == b)).collect())
            .collect();
        let v = (0..2)
            .map(|a| (0..2).map(|c| sum(&|i, _, k| i == a && k == c)).collect())
            .collect();
        let w = (0..3)
            .map(|b| (0..2).map(|c| sum(&|_, j, k| j == b && k == c)).collect())
            .collect();
        let tp = ThreeWayInstance::new(table.clone(), u, v, w).unwrap();
        let inst = encode_3way(&tp).unwrap();
        let x = tp.to_nfold(&table).unwrap();
        inst.check_feasible(&x).unwrap();
        assert_eq!(tp.decode(&x).unwrap(), table);
        // x^k_{i,j} sits at k q + i s + j
        assert_eq!(x[6 + 3 + 2], table[1][2][1]);
    }

    #[test]
    fn dway_three_matches_three_way() {
        let tp = three_way(2, 3, 2);
        assert_eq!(encode_dway(&tp.as_dway()).unwrap(), encode_3way(&tp).unwrap());
    }

    #[test]
    fn dway_one_dimensional_layers() {
        // 2 x l tables: A is a single all-ones row
        let tp = DWayInstance::new(
            vec![2],
            3,
            big(&[1, 2, 3, 4, 5, 6]),
            vec![big(&[3, 4, 5]), big(&[6, 6])],
        )
        .unwrap();
        let inst = encode_dway(&tp).unwrap();
        assert_eq!(inst.a(), &IntMatrix::from_rows_i64(2, &[vec![1, 1]]).unwrap());
        assert_eq!(inst.rhs(), &IntVec::from([6, 6, 3, 4, 5]));
    }

    #[test]
    fn dway_four_margins_hold() {
        // a 2 x 2 x 2 x 2 table, margins taken from a known table
        let table = big(&[1, 0, 2, 1, 0, 3, 1, 1, 2, 0, 0, 1, 1, 2, 3, 0]);
        let cost = big(&[3, -1, 2, 0, 1, 4, -2, 1, 0, 2, 1, 3, -1, 0, 2, 1]);
        let probe = DWayInstance::new(
            vec![2, 2, 2],
            2,
            cost.clone(),
            vec![vec![BigInt::zero(); 8]; 4],
        )
        .unwrap();
        let margins = probe.margins_of(&table).unwrap();
        let tp = DWayInstance::new(vec![2, 2, 2], 2, cost, margins.clone()).unwrap();
        let inst = encode_dway(&tp).unwrap();
        inst.check_feasible(&tp.to_nfold(&table).unwrap()).unwrap();
        let SolveOutcome::Optimal { x, .. } = solve(&inst).unwrap() else {
            panic!("table exists, so the program is feasible");
        };
        assert_eq!(tp.margins_of(&tp.decode(&x).unwrap()).unwrap(), margins);
    }

    #[test]
    fn shipment_examples() {
        let sp = ShipmentInstance::new(big(&[2]), big(&[3]), big(&[4, 4]), grid(&[&[1, 1]])).unwrap();
        let Encoded::Program(inst) = encode_shipment(&sp).unwrap() else {
            panic!("capacity suffices");
        };
        assert_eq!(inst.rhs(), &IntVec::from([3, 2, 4, 4]));
        let out = solve(&inst).unwrap();
        assert_eq!(out.objective(), Some(&BigInt::from(3)));
        let plan = sp.decode(out.point().unwrap()).unwrap();
        assert_eq!(plan.loads.iter().map(|l| &l[0]).sum::<BigInt>(), BigInt::from(3));
        assert_eq!(sp.to_nfold(&plan).unwrap(), *out.point().unwrap());

        let none = ShipmentInstance::new(big(&[2, 3]), big(&[0, 0]), big(&[4, 5]), grid(&[&[1, 2], &[3, 4]]))
            .unwrap();
        let out = solve(encode_shipment(&none).unwrap().program().unwrap()).unwrap();
        assert_eq!(out.objective(), Some(&BigInt::zero()));
        assert_eq!(none.decode(out.point().unwrap()).unwrap().unused, big(&[4, 5]));

        let short = ShipmentInstance::new(big(&[2]), big(&[5]), big(&[4, 4]), grid(&[&[1, 1]])).unwrap();
        assert_eq!(encode_shipment(&short).unwrap(), Encoded::Infeasible);
    }

    fn cs(widths: &[i64], demands: &[i64], stock: i64) -> CuttingStockInstance {
        CuttingStockInstance::new(big(widths), big(demands), BigInt::from(stock)).unwrap()
    }

    #[test]
    fn cutting_stock_probes() {
        let one = cs(&[3], &[5], 7);
        let Encoded::Program(inst) = encode_cutting_stock(&one, 3).unwrap() else {
            panic!("21 >= 15");
        };
        assert!(solve(&inst).unwrap().is_optimal());
        assert_eq!(encode_cutting_stock(&one, 2).unwrap(), Encoded::Infeasible);
        // three pieces of 4 fit in 14 units of width but not on two rolls of 7
        let tight = cs(&[4], &[3], 7);
        let Encoded::Program(inst) = encode_cutting_stock(&tight, 2).unwrap() else {
            panic!("total width fits");
        };
        assert_eq!(solve(&inst).unwrap(), SolveOutcome::Infeasible);
        assert!(encode_cutting_stock(&one, 0).is_err());

        let zero = cs(&[3, 4], &[0, 0], 7);
        let Encoded::Program(inst) = encode_cutting_stock(&zero, 2).unwrap() else {
            panic!("nothing demanded");
        };
        let out = solve(&inst).unwrap();
        assert_eq!(zero.decode(out.point().unwrap()).unwrap().unused, big(&[7, 7]));
    }

    #[test]
    fn min_rolls_examples() {
        let solver = Solver::default();
        let res = min_rolls(&solver, &cs(&[3, 5], &[4, 2], 7)).unwrap();
        assert_eq!(res.rolls, 4);
        assert_eq!(res.plan.loads.len(), 4);
        for load in &res.plan.loads {
            assert!(load[0].clone() * 3 + load[1].clone() * 5 <= BigInt::from(7));
        }
        assert_eq!(min_rolls(&solver, &cs(&[3], &[2], 7)).unwrap().rolls, 1);
        assert_eq!(min_rolls(&solver, &cs(&[3, 4], &[0, 0], 7)).unwrap().rolls, 0);
        assert!(CuttingStockInstance::new(big(&[8]), big(&[1]), BigInt::from(7)).is_err());
    }
}
