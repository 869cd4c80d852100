//! Foster-Greer-Thorbecke (FGT) poverty indices and the bundle-comparison
//! poverty table.
//!
//! For a poverty line `z` and incomes `yᵢ`, the index with aversion
//! parameter `α` is the weighted mean of `((z − yᵢ)/z)^α` over the poor
//! (strictly below the line), with non-poor households contributing zero:
//!
//! `P_α = Σ_{yᵢ<z} wᵢ ((z − yᵢ)/z)^α / Σᵢ wᵢ`
//!
//! `α = 0` is the headcount ratio, `α = 1` the poverty gap (depth), and
//! `α = 2` the squared gap (severity). With unit weights this reduces to
//! the classic unweighted definition of Foster, Greer & Thorbecke (1984).

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::model::{Dataset, IncomeBundle, ModelError, PovertyLine};
use crate::numeric::CompensatedSum;

/// One FGT index value together with the counts behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FgtIndex {
    /// Poverty aversion parameter (0 = headcount, 1 = gap, 2 = squared gap).
    pub alpha: f64,
    /// Index value in [0, 1].
    pub value: f64,
    /// Number of poor records (unweighted count).
    pub poor_count: usize,
    /// Number of records (unweighted count).
    pub sample_size: usize,
}

/// Weighted FGT index over a list of incomes.
///
/// The poor are the records with income strictly below the line; a record
/// exactly on the line counts as non-poor. For `alpha = 0` every poor
/// record contributes 1 (headcount semantics, no powering). Negative
/// incomes are treated as zero shortfall-wise, which caps the normalized
/// gap at 1 and keeps the index inside [0, 1].
pub fn fgt_index(
    incomes: &[f64],
    weights: &[f64],
    line: &PovertyLine,
    alpha: f64,
) -> Result<FgtIndex, FgtError> {
    if incomes.is_empty() {
        return Err(FgtError::EmptyInput);
    }
    if incomes.len() != weights.len() {
        return Err(FgtError::LengthMismatch {
            values: incomes.len(),
            weights: weights.len(),
        });
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(FgtError::InvalidAlpha { alpha });
    }
    for w in weights {
        if !(w.is_finite() && *w >= 0.0) {
            return Err(FgtError::InvalidWeight { value: *w });
        }
    }
    for y in incomes {
        if !y.is_finite() {
            return Err(FgtError::NonFiniteIncome { value: *y });
        }
    }

    let z = line.value();
    let mut numerator = CompensatedSum::new();
    let mut total_weight = CompensatedSum::new();
    let mut poor_count = 0usize;
    for (y, w) in incomes.iter().zip(weights) {
        total_weight.add(*w);
        if line.classify(*y).is_poor() {
            poor_count += 1;
            let term = if alpha == 0.0 {
                1.0
            } else {
                let gap = ((z - y) / z).min(1.0);
                if alpha == 1.0 {
                    gap
                } else {
                    libm::pow(gap, alpha)
                }
            };
            numerator.add(w * term);
        }
    }
    let total_weight = total_weight.value();
    if total_weight <= 0.0 {
        return Err(FgtError::DegenerateWeights);
    }

    Ok(FgtIndex {
        alpha,
        value: numerator.value() / total_weight,
        poor_count,
        sample_size: incomes.len(),
    })
}

/// Percentage change of `new` relative to `base`: `100 (new − base)/base`.
/// Undefined (None) when the base is zero.
pub fn percent_change(base: f64, new: f64) -> Option<f64> {
    if base == 0.0 {
        None
    } else {
        Some(100.0 * (new - base) / base)
    }
}

/// FGT indices for every bundle at one `alpha`, plus percentage changes of
/// each non-base bundle against the base bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct FgtRow {
    pub alpha: f64,
    /// One index per bundle, aligned with [`FgtTable::bundles`].
    pub indices: Vec<FgtIndex>,
    /// Percentage change vs. the base bundle, aligned with
    /// `bundles[1..]`; None when the base index is zero.
    pub pct_changes: Vec<Option<f64>>,
}

/// The poverty-effect table: per-`alpha` FGT indices for each counterfactual
/// income bundle, with change columns against the base (first) bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct FgtTable {
    pub line: PovertyLine,
    /// Bundle labels in column order; the first is the comparison base.
    pub bundles: Vec<String>,
    pub rows: Vec<FgtRow>,
}

/// Evaluate the poverty table over a dataset.
///
/// `bundles` must be non-empty and lead with the designated base bundle
/// (conventionally farm-only); every bundled source must be registered on
/// the dataset.
pub fn poverty_table(
    data: &Dataset,
    bundles: &[IncomeBundle],
    line: &PovertyLine,
    alphas: &[f64],
) -> Result<FgtTable, FgtError> {
    if bundles.is_empty() {
        return Err(FgtError::MissingBaseBundle);
    }
    let weights = data.weights();
    let bundle_incomes: Vec<Vec<f64>> = bundles
        .iter()
        .map(|b| data.bundle_totals(b))
        .collect::<Result<_, _>>()?;

    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let indices: Vec<FgtIndex> = bundle_incomes
            .iter()
            .map(|incomes| fgt_index(incomes, &weights, line, alpha))
            .collect::<Result<_, _>>()?;
        let base = indices[0].value;
        let pct_changes = indices[1..]
            .iter()
            .map(|ix| percent_change(base, ix.value))
            .collect();
        rows.push(FgtRow {
            alpha,
            indices,
            pct_changes,
        });
    }

    Ok(FgtTable {
        line: *line,
        bundles: bundles.iter().map(|b| b.label().to_string()).collect(),
        rows,
    })
}

/// Errors from the FGT computations.
#[derive(Debug, Clone, PartialEq)]
pub enum FgtError {
    EmptyInput,
    LengthMismatch { values: usize, weights: usize },
    InvalidAlpha { alpha: f64 },
    InvalidWeight { value: f64 },
    NonFiniteIncome { value: f64 },
    DegenerateWeights,
    MissingBaseBundle,
    Model(ModelError),
}

impl fmt::Display for FgtError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FgtError::EmptyInput => write!(f, "cannot compute a poverty index over no records"),
            FgtError::LengthMismatch { values, weights } => {
                write!(f, "{values} incomes but {weights} weights")
            }
            FgtError::InvalidAlpha { alpha } => {
                write!(
                    f,
                    "poverty aversion parameter {alpha} must be finite and >= 0"
                )
            }
            FgtError::InvalidWeight { value } => {
                write!(f, "weight {value} must be finite and non-negative")
            }
            FgtError::NonFiniteIncome { value } => write!(f, "non-finite income {value}"),
            FgtError::DegenerateWeights => write!(f, "total sampling weight must be positive"),
            FgtError::MissingBaseBundle => {
                write!(f, "the bundle list must lead with the base bundle")
            }
            FgtError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for FgtError {}

impl From<ModelError> for FgtError {
    fn from(e: ModelError) -> Self {
        FgtError::Model(e)
    }
}
