//! Real number fields, their unit groups and the integer matrices they produce.

pub mod field;
pub mod gv;
pub mod order;
pub mod units;

pub use field::RealField;
pub use gv::{
    appendix_matrices_check, basis_direction, gv_check, parse_matrix, suspension_model, AppendixReport, GvCertificate,
    SuspensionModel,
};
pub use order::{signature, unit_rank, NumberFieldOrder, OrderElement, UnitRank};
pub use units::{gv_element, mult_matrix, pell_unit, transpose_identity_residual, unit_search, PellUnit, UnitSearch};
