//! The dimension-reducing procedure, its verifier, and the inequalities it
//! relies on.

pub mod concentration;
pub mod engine;
pub mod export;
pub mod verify;
pub mod widening;

pub use concentration::{check_concentration, ConcentrationReport};
pub use engine::{
    run_deformation, Counters, DeformationInput, DeformationOutcome, DeformationTrace, Step,
    StepKind, StepRecord, Termination, FAMILY_TRACE_LIMIT,
};
pub use verify::{initial_product_within_bound, verify_trace, TraceReport};
pub use widening::{
    default_widening_grid, sample_widening, widening_family_check, widening_numeric_check,
    FamilyWidening, WideningCell, WideningConclusions, WideningTuple,
};
