//! Numerical regular-variation toolkit: slow variation, positive increase,
//! index estimation, Stieltjes-integral limits and sequential equivalence.

pub mod detect;
pub mod handle;
pub mod sequence;

pub use detect::{
    is_positively_increasing, is_slowly_varying, karamata_rep_check, ls_slope, rv_index_estimate, stieltjes_condition_check,
    vanishing_verdict, IndexEstimate, Status, StieltjesReport, TriVerdict,
};
pub use handle::{staircase_phi, catalog_function, resolve_function, Coord, GridPolicy, Handle, Regime, CATALOG_FUNCTIONS};
pub use sequence::{inverse_equivalence_check, seq_equivalence_search, EquivalenceWitness, InverseReport, SearchConfig};
