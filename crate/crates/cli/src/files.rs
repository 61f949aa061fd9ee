//! On-disk formats. Structured artifacts are JSON with every integer written
//! as a decimal string; matrices for the `graver` and `complexity` commands
//! are plain whitespace grids.

use std::fmt;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use nfold_core::{
    CuttingStockInstance, DWayInstance, IntMatrix, IntVec, NFoldInstance, ShipmentInstance,
    SolveOutcome, SolveStats, ThreeWayInstance,
};

pub const SCHEMA_VERSION: u32 = 1;

/// A problem with an input file, pointing at the offending line when known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: PathBuf,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.path.display())?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
            if let Some(col) = self.column {
                write!(f, ":{col}")?;
            }
        }
        write!(f, ": {}", self.message)
    }
}

/// A schema violation found after parsing, tied to the field it concerns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaError {
    pub field: &'static str,
    pub message: String,
}

impl SchemaError {
    fn new(field: &'static str, message: impl Into<String>) -> Self {
        SchemaError {
            field,
            message: message.into(),
        }
    }
}

/// Parses `-?[0-9]+`; a typographic minus sign is accepted as well.
pub fn parse_decimal(s: &str) -> Option<BigInt> {
    let (negative, digits) = match s.strip_prefix('-').or_else(|| s.strip_prefix('\u{2212}')) {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let magnitude = BigInt::parse_bytes(digits.as_bytes(), 10)?;
    Some(if negative { -magnitude } else { magnitude })
}

/// An integer stored as a decimal string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dec(pub BigInt);

impl Serialize for Dec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Dec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct DecVisitor;
        impl Visitor<'_> for DecVisitor {
            type Value = Dec;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer written as a decimal string")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Dec, E> {
                parse_decimal(v)
                    .map(Dec)
                    .ok_or_else(|| E::custom(format!("{v:?} is not a decimal integer")))
            }
        }
        deserializer.deserialize_str(DecVisitor)
    }
}

fn decs(v: &[BigInt]) -> Vec<Dec> {
    v.iter().cloned().map(Dec).collect()
}

fn ints(v: &[Dec]) -> Vec<BigInt> {
    v.iter().map(|d| d.0.clone()).collect()
}

fn grid(v: &[Vec<Dec>]) -> Vec<Vec<BigInt>> {
    v.iter().map(|r| ints(r)).collect()
}

fn dec_grid(v: &[Vec<BigInt>]) -> Vec<Vec<Dec>> {
    v.iter().map(|r| decs(r)).collect()
}

fn check_version(version: u32) -> Result<(), SchemaError> {
    if version != SCHEMA_VERSION {
        return Err(SchemaError::new(
            "schema_version",
            format!("unsupported schema_version {version}, expected {SCHEMA_VERSION}"),
        ));
    }
    Ok(())
}

/// `b = (b^0, b^1, ..., b^n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhsFile {
    pub b0: Vec<Dec>,
    pub blocks: Vec<Vec<Dec>>,
}

/// A generalized n-fold program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: u32,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Dec>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<Dec>>,
    pub n: usize,
    #[serde(rename = "b")]
    pub rhs: RhsFile,
    pub c: Vec<Vec<Dec>>,
}

fn matrix(field: &'static str, rows: &[Vec<Dec>], cols: usize) -> Result<IntMatrix, SchemaError> {
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return Err(SchemaError::new(
            field,
            format!("row {i} of {field} has {} entries, expected {cols}", rows[i].len()),
        ));
    }
    IntMatrix::from_rows(cols, grid(rows)).map_err(|e| SchemaError::new(field, e.to_string()))
}

impl InstanceFile {
    pub fn from_instance(inst: &NFoldInstance) -> Self {
        InstanceFile {
            schema_version: SCHEMA_VERSION,
            a: dec_grid(&inst.a().to_rows()),
            b: dec_grid(&inst.b().to_rows()),
            n: inst.n(),
            rhs: RhsFile {
                b0: decs(inst.rhs_top().as_slice()),
                blocks: (1..=inst.n()).map(|k| decs(inst.rhs_block(k).as_slice())).collect(),
            },
            c: inst.cost().as_slice().chunks(inst.q()).map(decs).collect(),
        }
    }

    pub fn to_instance(&self) -> Result<NFoldInstance, SchemaError> {
        check_version(self.schema_version)?;
        if self.n == 0 {
            return Err(SchemaError::new("n", "n must be at least 1"));
        }
        let q = self
            .a
            .first()
            .or(self.b.first())
            .or(self.c.first())
            .map(Vec::len)
            .unwrap_or(0);
        if q == 0 {
            return Err(SchemaError::new("A", "A and B need at least one column"));
        }
        let a = matrix("A", &self.a, q)?;
        let b = matrix("B", &self.b, q)?;
        if self.rhs.b0.len() != b.rows() {
            return Err(SchemaError::new(
                "b0",
                format!("b0 has {} entries but B has {} rows", self.rhs.b0.len(), b.rows()),
            ));
        }
        if self.rhs.blocks.len() != self.n {
            return Err(SchemaError::new(
                "blocks",
                format!("b has {} blocks, expected n = {}", self.rhs.blocks.len(), self.n),
            ));
        }
        if let Some(k) = self.rhs.blocks.iter().position(|blk| blk.len() != a.rows()) {
            return Err(SchemaError::new(
                "blocks",
                format!("block {k} of b has {} entries but A has {} rows", self.rhs.blocks[k].len(), a.rows()),
            ));
        }
        if self.c.len() != self.n {
            return Err(SchemaError::new(
                "c",
                format!("c has {} blocks, expected n = {}", self.c.len(), self.n),
            ));
        }
        if let Some(k) = self.c.iter().position(|blk| blk.len() != q) {
            return Err(SchemaError::new(
                "c",
                format!("block {k} of c has {} entries, expected {q}", self.c[k].len()),
            ));
        }
        let rhs: IntVec = self
            .rhs
            .b0
            .iter()
            .chain(self.rhs.blocks.iter().flatten())
            .map(|d| d.0.clone())
            .collect();
        let cost: IntVec = self.c.iter().flatten().map(|d| d.0.clone()).collect();
        NFoldInstance::new(a, b, self.n, rhs, cost).map_err(|e| SchemaError::new("A", e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsFile {
    pub graver_size: usize,
    pub graver_complexity: Option<usize>,
    pub augmentation_steps: usize,
    pub phase1_steps: usize,
    pub wall_ms: u64,
}

impl StatsFile {
    pub fn new(stats: &SolveStats, wall_ms: u64) -> Self {
        StatsFile {
            graver_size: stats.graver_size,
            graver_complexity: stats.graver_complexity,
            augmentation_steps: stats.augmentation_steps,
            phase1_steps: stats.phase1_steps,
            wall_ms,
        }
    }
}

/// The outcome of a solve. `x` and `objective` are present exactly when the
/// status is optimal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub schema_version: u32,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<Vec<Dec>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<Dec>,
    pub stats: StatsFile,
}

impl SolutionFile {
    pub fn new(outcome: &SolveOutcome, q: usize, stats: StatsFile) -> Self {
        let (status, x, objective) = match outcome {
            SolveOutcome::Optimal { x, objective } => (
                Status::Optimal,
                Some(x.as_slice().chunks(q).map(decs).collect()),
                Some(Dec(objective.clone())),
            ),
            SolveOutcome::Infeasible => (Status::Infeasible, None, None),
            SolveOutcome::Unbounded => (Status::Unbounded, None, None),
        };
        SolutionFile {
            schema_version: SCHEMA_VERSION,
            status,
            x,
            objective,
            stats,
        }
    }

    pub fn validate(&self) -> Result<(), SchemaError> {
        check_version(self.schema_version)?;
        let optimal = self.status == Status::Optimal;
        if self.x.is_some() != optimal {
            return Err(SchemaError::new("x", "x must be present exactly when status is optimal"));
        }
        if self.objective.is_some() != optimal {
            return Err(SchemaError::new(
                "objective",
                "objective must be present exactly when status is optimal",
            ));
        }
        Ok(())
    }

    /// `x` as block arrays of integers.
    pub fn point(&self) -> Option<Vec<Vec<BigInt>>> {
        self.x.as_deref().map(grid)
    }

    pub fn objective_value(&self) -> Option<&BigInt> {
        self.objective.as_ref().map(|d| &d.0)
    }
}

/// `r x s x l` transportation data; see [`ThreeWayInstance`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreeWayFile {
    pub schema_version: u32,
    pub cost: Vec<Vec<Vec<Dec>>>,
    pub u: Vec<Vec<Dec>>,
    pub v: Vec<Vec<Dec>>,
    pub w: Vec<Vec<Dec>>,
}

impl ThreeWayFile {
    pub fn to_instance(&self) -> Result<ThreeWayInstance, SchemaError> {
        check_version(self.schema_version)?;
        ThreeWayInstance::new(
            self.cost.iter().map(|p| grid(p)).collect(),
            grid(&self.u),
            grid(&self.v),
            grid(&self.w),
        )
        .map_err(|e| SchemaError::new("cost", e.to_string()))
    }
}

/// Flat `d`-way transportation data; see [`DWayInstance`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DWayFile {
    pub schema_version: u32,
    pub dims: Vec<usize>,
    pub l: usize,
    pub cost: Vec<Dec>,
    pub margins: Vec<Vec<Dec>>,
}

impl DWayFile {
    pub fn to_instance(&self) -> Result<DWayInstance, SchemaError> {
        check_version(self.schema_version)?;
        DWayInstance::new(self.dims.clone(), self.l, ints(&self.cost), grid(&self.margins))
            .map_err(|e| SchemaError::new("dims", e.to_string()))
    }
}

/// Shipment data; `costs[j][k]` is the cost of one item of type `j` on
/// vessel `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShipmentFile {
    pub schema_version: u32,
    pub weights: Vec<Dec>,
    pub counts: Vec<Dec>,
    pub capacities: Vec<Dec>,
    pub costs: Vec<Vec<Dec>>,
}

impl ShipmentFile {
    pub fn to_instance(&self) -> Result<ShipmentInstance, SchemaError> {
        check_version(self.schema_version)?;
        ShipmentInstance::new(
            ints(&self.weights),
            ints(&self.counts),
            ints(&self.capacities),
            grid(&self.costs),
        )
        .map_err(|e| SchemaError::new("weights", e.to_string()))
    }
}

/// Cutting stock data. `rolls` fixes the number of rolls for plain encoding;
/// without it the always-sufficient one-type-per-roll count is used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutStockFile {
    pub schema_version: u32,
    pub widths: Vec<Dec>,
    pub demands: Vec<Dec>,
    pub stock: Dec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rolls: Option<usize>,
}

impl CutStockFile {
    pub fn to_instance(&self) -> Result<CuttingStockInstance, SchemaError> {
        check_version(self.schema_version)?;
        CuttingStockInstance::new(ints(&self.widths), ints(&self.demands), self.stock.0.clone())
            .map_err(|e| SchemaError::new("widths", e.to_string()))
    }
}

/// 1-based line of the first occurrence of the key `"field"` in `text`.
fn locate(text: &str, field: &str) -> Option<usize> {
    let key = format!("\"{field}\"");
    text.lines().position(|l| l.contains(&key)).map(|i| i + 1)
}

/// Parses JSON, reporting syntax and type errors with their position.
pub fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, Diagnostic> {
    serde_json::from_str(text).map_err(|e| {
        let position = format!(" at line {} column {}", e.line(), e.column());
        let message = e.to_string();
        Diagnostic {
            path: path.to_path_buf(),
            line: (e.line() > 0).then_some(e.line()),
            column: (e.column() > 0).then_some(e.column()),
            message: message.strip_suffix(&position).unwrap_or(&message).to_string(),
        }
    })
}

/// Attaches a schema error to the line holding its field.
pub fn schema_diagnostic(path: &Path, text: &str, err: SchemaError) -> Diagnostic {
    Diagnostic {
        path: path.to_path_buf(),
        line: locate(text, err.field),
        column: None,
        message: err.message,
    }
}

/// Rows of a whitespace grid. Blank lines and `#` comments are skipped; all
/// rows must have the same length.
pub fn parse_grid(path: &Path, text: &str) -> Result<Vec<Vec<BigInt>>, Diagnostic> {
    let diag = |line: usize, message: String| Diagnostic {
        path: path.to_path_buf(),
        line: Some(line),
        column: None,
        message,
    };
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let row = content
            .split_whitespace()
            .map(|tok| parse_decimal(tok).ok_or_else(|| diag(i + 1, format!("{tok:?} is not an integer"))))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(diag(
                    i + 1,
                    format!("row has {} entries, earlier rows have {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// A grid file as a matrix; an empty grid is a matrix with no rows and
/// `cols_if_empty` columns.
pub fn grid_matrix(rows: Vec<Vec<BigInt>>, cols_if_empty: usize) -> IntMatrix {
    let cols = rows.first().map_or(cols_if_empty, Vec::len);
    IntMatrix::from_rows(cols, rows).expect("grid rows have equal length")
}
