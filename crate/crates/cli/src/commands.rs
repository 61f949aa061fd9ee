//! The subcommands. Each returns its exit status and writes its report to
//! the given sink; failures come back as [`CliError`].

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use nfold_core::{
    encode_3way, encode_cutting_stock, Certificate, encode_dway, encode_shipment, graver_complexity,
    min_rolls, nfold_graver_basis, verify_graver_complexity, Encoded, Error as CoreError,
    GraverComplexity, IntMatrix, IntVec, NFoldInstance, SolveOutcome, Solver,
};

use crate::files::{
    grid_matrix, parse_grid, parse_json, schema_diagnostic, CutStockFile, DWayFile, Diagnostic,
    InstanceFile, SchemaError, ShipmentFile, SolutionFile, StatsFile, Status, ThreeWayFile,
};

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Error = 1,
    Infeasible = 2,
    Unbounded = 3,
    CheckFailed = 4,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn of_status(status: Status) -> Exit {
        match status {
            Status::Optimal => Exit::Success,
            Status::Infeasible => Exit::Infeasible,
            Status::Unbounded => Exit::Unbounded,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Format(Diagnostic),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// `complexity --verify-complexity` reports a disagreement as a failed
    /// check; everything else is an ordinary error.
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Core(CoreError::ComplexityMismatch { .. }) => Exit::CheckFailed,
            _ => Exit::Error,
        }
    }
}

impl From<Diagnostic> for CliError {
    fn from(d: Diagnostic) -> Self {
        CliError::Format(d)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Options shared by every command.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Cross-check `g(A,B)` by direct stabilization before using it.
    pub verify_complexity: bool,
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_err(source: io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<output>"),
        source,
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| write_err(e.into()))?;
    writeln!(out).map_err(write_err)
}

fn load<T: for<'de> serde::Deserialize<'de>, U>(
    path: &Path,
    convert: impl FnOnce(&T) -> Result<U, SchemaError>,
) -> CliResult<U> {
    let text = read(path)?;
    let parsed: T = parse_json(path, &text)?;
    convert(&parsed).map_err(|e| schema_diagnostic(path, &text, e).into())
}

pub fn load_instance(path: &Path) -> CliResult<NFoldInstance> {
    load(path, InstanceFile::to_instance)
}

pub fn load_solution(path: &Path) -> CliResult<SolutionFile> {
    load(path, |s: &SolutionFile| s.validate().map(|()| s.clone()))
}

/// Reads the `A` and `B` grid files of a pair.
pub fn load_pair(a_path: &Path, b_path: &Path) -> CliResult<(IntMatrix, IntMatrix)> {
    let a = parse_grid(a_path, &read(a_path)?)?;
    let b = parse_grid(b_path, &read(b_path)?)?;
    let cols = a.first().or(b.first()).map_or(0, Vec::len);
    if cols == 0 {
        return Err(CliError::Usage("A and B need at least one column".into()));
    }
    for (rows, path) in [(&a, a_path), (&b, b_path)] {
        if let Some(row) = rows.first() {
            if row.len() != cols {
                return Err(Diagnostic {
                    path: path.to_path_buf(),
                    line: None,
                    column: None,
                    message: format!("has {} columns, the other matrix has {cols}", row.len()),
                }
                .into());
            }
        }
    }
    Ok((grid_matrix(a, cols), grid_matrix(b, cols)))
}

fn checked_complexity(a: &IntMatrix, b: &IntMatrix, opts: RunOptions) -> CliResult<GraverComplexity> {
    let g = graver_complexity(a, b)?;
    if opts.verify_complexity {
        verify_graver_complexity(a, b, g)?;
    }
    Ok(g)
}

/// Solves an instance and wraps the result for output.
pub fn solve_instance(
    solver: &Solver,
    inst: &NFoldInstance,
    opts: RunOptions,
) -> CliResult<SolutionFile> {
    if opts.verify_complexity {
        checked_complexity(inst.a(), inst.b(), opts)?;
    }
    let start = Instant::now();
    let report = solver.solve_report(inst)?;
    let wall_ms = u64::try_from(start.elapsed().as_millis()).unwrap_or(u64::MAX);
    Ok(SolutionFile::new(
        &report.outcome,
        inst.q(),
        StatsFile::new(&report.stats, wall_ms),
    ))
}

/// `solve INSTANCE`
pub fn cmd_solve(path: &Path, opts: RunOptions, out: &mut dyn Write) -> CliResult<Exit> {
    let inst = load_instance(path)?;
    let solution = solve_instance(&Solver::default(), &inst, opts)?;
    emit_json(out, &solution)?;
    Ok(Exit::of_status(solution.status))
}

/// `graver A B N`: one basis vector per line, then a summary comment.
pub fn cmd_graver(
    a_path: &Path,
    b_path: &Path,
    n: usize,
    opts: RunOptions,
    out: &mut dyn Write,
) -> CliResult<Exit> {
    let (a, b) = load_pair(a_path, b_path)?;
    if n == 0 {
        return Err(CliError::Usage("n must be at least 1".into()));
    }
    let g = match checked_complexity(&a, &b, opts) {
        Ok(g) => Some(g.value),
        Err(CliError::Core(CoreError::Budget(_))) => None,
        Err(e) => return Err(e),
    };
    let basis = nfold_graver_basis(&a, &b, n)?;
    for v in basis.iter() {
        writeln!(out, "{v}").map_err(write_err)?;
    }
    let g = g.map_or_else(|| "unknown".to_string(), |g| g.to_string());
    writeln!(out, "# cardinality {}, graver complexity {g}", basis.len()).map_err(write_err)?;
    Ok(Exit::Success)
}

/// `complexity A B`: prints `g(A,B)` and how it was certified.
pub fn cmd_complexity(
    a_path: &Path,
    b_path: &Path,
    opts: RunOptions,
    out: &mut dyn Write,
) -> CliResult<Exit> {
    let (a, b) = load_pair(a_path, b_path)?;
    let g = checked_complexity(&a, &b, opts)?;
    writeln!(out, "{}", g.value).map_err(write_err)?;
    let how = match g.certified_by {
        Certificate::Formula => "formula",
        Certificate::DirectStabilization => "direct stabilization",
    };
    let verified = if opts.verify_complexity { ", verified by direct stabilization" } else { "" };
    writeln!(out, "# certified by {how}{verified}").map_err(write_err)?;
    Ok(Exit::Success)
}

/// Outcome of `check`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass(String),
    Fail(String),
}

/// Re-verifies a solution file against an instance with exact arithmetic.
pub fn check_solution(inst: &NFoldInstance, sol: &SolutionFile) -> Verdict {
    let (Some(blocks), Some(claimed)) = (sol.point(), sol.objective_value()) else {
        let status = serde_json::to_value(sol.status).unwrap_or(Value::Null);
        return Verdict::Pass(format!("status {status} carries no point to verify"));
    };
    if blocks.len() != inst.n() {
        return Verdict::Fail(format!("x has {} blocks, expected {}", blocks.len(), inst.n()));
    }
    if let Some(k) = blocks.iter().position(|b| b.len() != inst.q()) {
        return Verdict::Fail(format!(
            "block {k} of x has {} entries, expected {}",
            blocks[k].len(),
            inst.q()
        ));
    }
    let x: IntVec = blocks.into_iter().flatten().collect();
    if let Some(i) = x.first_negative() {
        return Verdict::Fail(format!("entry {i} of x is negative: {}", x[i]));
    }
    let lhs = inst.matrix().mul_vec(&x).expect("shape checked");
    if let Some(i) = lhs.iter().zip(inst.rhs().iter()).position(|(l, r)| l != r) {
        return Verdict::Fail(format!(
            "equation {i} is violated: {} != {}",
            lhs[i],
            inst.rhs()[i]
        ));
    }
    let value: BigInt = inst.objective(&x).expect("shape checked");
    if &value != claimed {
        return Verdict::Fail(format!("objective is {claimed} but c x = {value}"));
    }
    Verdict::Pass(format!("feasible with objective {value}"))
}

/// `check INSTANCE SOLUTION`
pub fn cmd_check(inst_path: &Path, sol_path: &Path, out: &mut dyn Write) -> CliResult<Exit> {
    let inst = load_instance(inst_path)?;
    let sol = load_solution(sol_path)?;
    let (line, exit) = match check_solution(&inst, &sol) {
        Verdict::Pass(msg) => (format!("pass: {msg}"), Exit::Success),
        Verdict::Fail(msg) => (format!("fail: {msg}"), Exit::CheckFailed),
    };
    writeln!(out, "{line}").map_err(write_err)?;
    Ok(exit)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodeKind {
    ThreeWay,
    DWay,
    Shipment,
    CutStock,
}

fn dec(v: &BigInt) -> Value {
    Value::String(v.to_string())
}

fn dec_list(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(dec).collect())
}

fn dec_grid(v: &[Vec<BigInt>]) -> Value {
    Value::Array(v.iter().map(|r| dec_list(r)).collect())
}

/// What `encode --solve` prints.
#[derive(Debug, Serialize)]
struct EncodeReport {
    schema_version: u32,
    instance: Option<InstanceFile>,
    solution: SolutionFile,
    decoded: Value,
}

fn infeasible_solution() -> SolutionFile {
    SolutionFile::new(&SolveOutcome::Infeasible, 1, StatsFile::default())
}

/// `encode KIND INPUT [--solve]`: prints the encoded instance, or with
/// `solve` the instance, its solution and the solution in natural
/// coordinates.
/// Maps a solution of the encoded program back to the input's terms.
type Decoder = Box<dyn Fn(&IntVec) -> CliResult<Value>>;

pub fn cmd_encode(
    kind: EncodeKind,
    path: &Path,
    solve: bool,
    opts: RunOptions,
    out: &mut dyn Write,
) -> CliResult<Exit> {
    let solver = Solver::default();
    if kind == EncodeKind::CutStock && solve {
        return encode_and_cut(&solver, path, opts, out);
    }
    let (encoded, decode): (Encoded, Decoder) = match kind {
        EncodeKind::ThreeWay => {
            let tp = load(path, ThreeWayFile::to_instance)?;
            let inst = encode_3way(&tp)?;
            let decode = move |x: &IntVec| -> CliResult<Value> {
                let table = tp.decode(x)?;
                Ok(json!({ "table": table.iter().map(|p| dec_grid(p)).collect::<Vec<_>>() }))
            };
            (Encoded::Program(inst), Box::new(decode))
        }
        EncodeKind::DWay => {
            let tp = load(path, DWayFile::to_instance)?;
            let inst = encode_dway(&tp)?;
            let decode = move |x: &IntVec| -> CliResult<Value> {
                Ok(json!({ "table": dec_list(&tp.decode(x)?) }))
            };
            (Encoded::Program(inst), Box::new(decode))
        }
        EncodeKind::Shipment => {
            let sp = load(path, ShipmentFile::to_instance)?;
            let encoded = encode_shipment(&sp)?;
            let decode = move |x: &IntVec| -> CliResult<Value> {
                let plan = sp.decode(x)?;
                Ok(json!({ "loads": dec_grid(&plan.loads), "unused": dec_list(&plan.unused) }))
            };
            (encoded, Box::new(decode))
        }
        EncodeKind::CutStock => {
            let (file, cs) = load(path, |f: &CutStockFile| Ok((f.clone(), f.to_instance()?)))?;
            let rolls = match file.rolls {
                Some(r) => r,
                None => usize::try_from(cs.upper_bound())
                    .map_err(|_| CliError::Usage("too many rolls".into()))?
                    .max(1),
            };
            let decode = |_: &IntVec| -> CliResult<Value> { Ok(Value::Null) };
            (encode_cutting_stock(&cs, rolls)?, Box::new(decode))
        }
    };
    let Encoded::Program(inst) = encoded else {
        if solve {
            let report = EncodeReport {
                schema_version: crate::files::SCHEMA_VERSION,
                instance: None,
                solution: infeasible_solution(),
                decoded: Value::Null,
            };
            emit_json(out, &report)?;
        } else {
            eprintln!("{}: the data admits no solution; nothing to encode", path.display());
        }
        return Ok(Exit::Infeasible);
    };
    let file = InstanceFile::from_instance(&inst);
    if !solve {
        emit_json(out, &file)?;
        return Ok(Exit::Success);
    }
    let solution = solve_instance(&solver, &inst, opts)?;
    let decoded = match &solution.point() {
        Some(blocks) => decode(&blocks.iter().flatten().cloned().collect())?,
        None => Value::Null,
    };
    let exit = Exit::of_status(solution.status);
    emit_json(
        out,
        &EncodeReport {
            schema_version: crate::files::SCHEMA_VERSION,
            instance: Some(file),
            solution,
            decoded,
        },
    )?;
    Ok(exit)
}

/// `encode cutstock --solve`: the fewest rolls and a cut list for each roll.
fn encode_and_cut(
    solver: &Solver,
    path: &Path,
    opts: RunOptions,
    out: &mut dyn Write,
) -> CliResult<Exit> {
    let cs = load(path, CutStockFile::to_instance)?;
    let best = min_rolls(solver, &cs)?;
    let trace: Vec<Value> = best.trace.iter().map(|&(k, f)| json!([k, f])).collect();
    let (instance, solution, plan) = if best.rolls == 0 {
        let empty = SolveOutcome::Optimal {
            x: IntVec::zeros(0),
            objective: BigInt::from(0),
        };
        (None, SolutionFile::new(&empty, 1, StatsFile::default()), best.plan)
    } else {
        let Encoded::Program(inst) = encode_cutting_stock(&cs, best.rolls)? else {
            unreachable!("a feasible roll count passes the width check");
        };
        let solution = solve_instance(solver, &inst, opts)?;
        let plan = match solution.point() {
            Some(blocks) => cs.decode(&blocks.into_iter().flatten().collect())?,
            None => best.plan,
        };
        (Some(InstanceFile::from_instance(&inst)), solution, plan)
    };
    let decoded = json!({
        "min_rolls": best.rolls,
        "rolls": dec_grid(&plan.loads),
        "waste": dec_list(&plan.unused),
        "trace": trace,
    });
    let exit = Exit::of_status(solution.status);
    emit_json(
        out,
        &EncodeReport {
            schema_version: crate::files::SCHEMA_VERSION,
            instance,
            solution,
            decoded,
        },
    )?;
    Ok(exit)
}
