//! Enumeration of nondegenerate simplices with integer edge lengths, one
//! representative per congruence class, organized by diameter.
//!
//! [`canonical`] fixes a unique labeling per class (the lexicographically
//! minimal distance word); [`search`] walks the labeled words with prunes
//! that never discard a class and counts a leaf only when it is its own
//! canonical form.

mod canonical;
mod search;

pub use canonical::{canonical_form, is_canonical, CanonicalForm, DistanceWordMatrix};
pub use search::{
    census_table, enumerate, CensusError, CensusResult, CensusStats, CensusTask, DiameterMode,
    SubtreeOrder, TableCell,
};
