//! C ABI over `quasimetric`.
//!
//! Conventions:
//!
//! * Every fallible function returns a [`QmStatus`]; results go through out
//!   pointers. On failure, [`qm_last_error_message`] describes the cause.
//! * Objects are opaque handles created by `qm_*_new` (or `compose`) and
//!   released by the matching `qm_*_free`.
//! * Matrices are row-major `double` arrays; indices are `size_t`.
//! * Panics never cross the boundary; they surface as `QM_STATUS_PANIC`.
//!
//! The header `include/quasimetric.h` is generated at build time.

#![allow(clippy::missing_safety_doc)]

mod randers;
mod space;
mod status;

pub use randers::*;
pub use space::{
    qm_e_embedding_distance, qm_quasi_hausdorff, qm_space_distance, qm_space_free, qm_space_is_weightable,
    qm_space_new, qm_space_recover_weight, qm_space_size, qm_weighted_compose, qm_weighted_embedding_residual,
    qm_weighted_free, qm_weighted_matrix, qm_weighted_space, QmSpace, QmWeighted,
};
pub use status::{qm_last_error_message, qm_version, QmStatus};
