//! Stable marriage problem: Gale–Shapley in both directions, stability checks,
//! brute-force enumeration, profile classifiers, exact counting formulas for
//! profile families, parallel censuses over all profiles and a registry of
//! integer sequences reproduced by them.

pub mod census;
pub mod classify;
pub mod error;
pub mod formulas;
pub mod latin;
pub mod matching;
pub mod perm;
pub mod profile;
pub mod registry;

pub use error::{Error, Result, Side};
pub use matching::{GsTrace, Matching, PairCost};
pub use profile::{PreferenceProfile, ProfileIndex, Ranking};
