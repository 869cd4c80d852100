//! Poverty and income-source inequality primitives for household survey
//! microdata.
//!
//! The crate covers three layers:
//!
//! - [`model`]: a validated data model for households whose income is split
//!   across a registry of income sources, plus counterfactual income bundles
//!   (subsets of sources summed per household) and the poverty-line cutoff.
//! - [`fgt`]: Foster-Greer-Thorbecke poverty indices (headcount, gap,
//!   squared gap) evaluated over income bundles, and the bundle-comparison
//!   table with percentage-change columns.
//! - [`gini`]: fractional ranks, the covariance form of the Gini
//!   coefficient, Gini correlations, and the Lerman-Yitzhaki decomposition
//!   of total inequality by income source with per-source marginal effects.
//!   An O(n²) pairwise Gini and a finite-difference marginal effect are
//!   included as independent cross-checks.
//!
//! Everything here is pure computation over immutable inputs and is safe to
//! call from concurrent readers. The crate is `no_std` compatible
//! (allocation required); IO, file formats, synthetic data generation, and
//! the command line live in the companion `dineq` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod fgt;
pub mod gini;
pub mod model;
pub mod numeric;

pub use fgt::{fgt_index, percent_change, poverty_table, FgtError, FgtIndex, FgtRow, FgtTable};
pub use gini::{
    decompose, fractional_ranks, gini, gini_correlation, gini_pairwise, marginal_effect,
    marginal_effect_numeric, relative_contribution, GiniDecomposition, GiniError, GiniSourceRow,
    RankVector,
};
pub use model::{
    canonical_bundles, canonical_sources, Dataset, DatasetOptions, HouseholdRecord, IncomeBundle,
    ModelError, PovertyLine, PovertyStatus, SourceId,
};
