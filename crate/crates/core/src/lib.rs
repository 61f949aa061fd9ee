//! Exact solver for generalized n-fold integer programs
//! `min { c x : [A,B]^(n) x = b, x >= 0 integer }` by Graver-basis augmentation.

pub mod augment;
pub mod encoders;
pub mod error;
pub mod graver;
pub mod instance;
pub mod lattice;
pub mod linalg;
pub mod nfold;
pub mod oracle;
pub mod solve;

pub use augment::{
    directed_improving_direction, max_step, optimize, optimize_scaled, AugmentStep, StepLength,
};
pub use encoders::{
    encode_3way, encode_cutting_stock, encode_dway, encode_shipment, line_sum_matrix, min_rolls,
    CuttingStockInstance, DWayInstance, Encoded, RollPlan, ShipmentInstance, ShipmentPlan,
    ThreeWayInstance,
};
pub use error::{Error, Result};
pub use graver::{
    conformal_decompose, conformal_normal_form, graver_basis, graver_basis_bounded,
    truncated_graver_basis, GraverBasis,
};
pub use instance::{NFoldInstance, SolveOutcome};
pub use lattice::kernel_lattice_basis;
pub use nfold::{
    embed, graver_complexity, nfold_graver_basis, type_of, verify_graver_complexity, Certificate,
    GraverComplexity,
};
pub use oracle::{brute_force_graver, brute_force_min_rolls, brute_force_solve, BoxBound};
pub use solve::{
    auxiliary_instance, find_feasible, solve, AuxiliaryProgram, PhaseOne, SolveReport, SolveStats,
    Solver, SolverOptions, TestSet,
};
pub use linalg::{
    conformal_leq, negative_part, nfold_matrix, positive_part, BlockVector, IntMatrix, IntVec,
};
