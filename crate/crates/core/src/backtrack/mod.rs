//! Backtracking bookkeeping: the table of backtrack points, the memo cache
//! of successful partial results, and selective re-inflection.

mod memo;
mod recompute;
mod table;

pub use memo::MemoCache;
pub use recompute::RealizationCache;
pub use table::{BacktrackPoint, BtTable};
