//! Pruned dynamic program, knee selection of the number of changes, and an
//! exhaustive reference search.

mod dp;
mod exhaustive;
mod knee;

pub use dp::{
    check_recurrence, dp_iterate, h_value, max_feasible_changes, prune_step, reconstruct_cps,
    run_cp3o, run_dp, DpState,
};
pub use exhaustive::{exhaustive_best_segmentation, exhaustive_search, ExhaustiveLimits};
pub use knee::{select_num_changes, KneeSelection};
