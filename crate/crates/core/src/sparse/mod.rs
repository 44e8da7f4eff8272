//! Sparse families, the constructive domination algorithm, sparse forms and
//! operators, stopping times and testing constants.

mod construct;
mod family;
mod forms;
mod stopping;
mod testing;

pub use construct::{construct_sparse, DominationParams, DominationReport, RecursionStats};
pub use family::{verify_sparseness, SparseFamily, SparsenessCheck, VerifiedFamily};
pub use forms::{
    cov_direct_norm, cov_norm_rhs, default_lambda, iterated_sparse_avg, midpoint_coefficients, sparse_form,
    sparse_operator, sparse_sum_bound, FormSide, SparseSumBound, SumCase,
};
pub use stopping::{base_candidates, stopping_family, StoppingFamily};
pub use testing::{testing_norms, LambdaRule, TestingReport, TestingRow};
