//! Gini coefficient, Gini correlations, and the decomposition of total
//! income inequality by income source, following Lerman & Yitzhaki (1985).
//!
//! The total Gini is computed in covariance form, `G = 2 cov(y, F)/μ`,
//! where `F` are midpoint fractional ranks of income. With the tie and
//! weighting conventions used here this equals the pairwise form
//! `Σᵢ Σⱼ wᵢ wⱼ |yᵢ − yⱼ| / (2 W² μ)` exactly (up to rounding), which
//! [`gini_pairwise`] computes as an independent O(n²) oracle.
//!
//! For a dataset whose per-record total income is the sum of its source
//! amounts, covariance additivity yields the exact identity
//!
//! `G = Σ_k S_k G_k R_k`
//!
//! with `S_k` the source's share of total income, `G_k` the source Gini
//! (ranked by the source itself), and `R_k` the Gini correlation of the
//! source with total income. [`decompose`] reports those factors per
//! source, each source's relative contribution `S_k G_k R_k / G`, and the
//! marginal effect `S_k G_k R_k / G − S_k`, the elasticity of `G` with
//! respect to a uniform proportional change of that source, cross-checked
//! by the finite-difference oracle [`marginal_effect_numeric`].

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::model::{Dataset, ModelError, SourceId};
use crate::numeric::{weighted_mean, CompensatedSum};

/// Midpoint fractional ranks of a list of records, in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    ranks: Vec<f64>,
}

impl RankVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.ranks
    }
}

/// Weighted midpoint fractional ranks.
///
/// Each record receives `(C + W_g/2) / W`, where `C` is the cumulative
/// weight of strictly smaller values, `W_g` the weight of the record's tie
/// group, and `W` the total weight. Tied values all receive the midpoint of
/// the span their group covers, so the result does not depend on input
/// order. With unit weights and distinct values the sorted ranks are
/// `(i − 0.5)/n`, and the weighted mean of the ranks is exactly one half.
///
/// Records with zero weight take the rank of their tie group; a group with
/// zero total weight can sit on the interval boundary, but contributes
/// nothing to any weighted statistic.
pub fn fractional_ranks(values: &[f64], weights: &[f64]) -> Result<RankVector, GiniError> {
    validate_pair(values, weights)?;
    let n = values.len();
    let total = compensated_total(weights);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut ranks = vec![0.0; n];
    let mut below = CompensatedSum::new();
    let mut start = 0;
    while start < n {
        let value = values[order[start]];
        let mut end = start;
        let mut group_weight = 0.0;
        while end < n && values[order[end]] == value {
            group_weight += weights[order[end]];
            end += 1;
        }
        let midpoint = (below.value() + 0.5 * group_weight) / total;
        for &idx in &order[start..end] {
            ranks[idx] = midpoint;
        }
        below.add(group_weight);
        start = end;
    }
    Ok(RankVector { ranks })
}

/// Population-form weighted covariance `Σ wᵢ (xᵢ − x̄)(yᵢ − ȳ) / W`.
pub fn weighted_covariance(xs: &[f64], ys: &[f64], weights: &[f64]) -> Result<f64, GiniError> {
    validate_pair(xs, weights)?;
    if xs.len() != ys.len() {
        return Err(GiniError::LengthMismatch {
            values: ys.len(),
            weights: xs.len(),
        });
    }
    for y in ys {
        if !y.is_finite() {
            return Err(GiniError::NonFiniteValue { value: *y });
        }
    }
    Ok(covariance_unchecked(xs, ys, weights))
}

/// Gini coefficient in covariance form: `2 cov(y, F)/μ` with `F` the
/// fractional ranks of `values`. Requires a positive weighted mean.
pub fn gini(values: &[f64], weights: &[f64]) -> Result<f64, GiniError> {
    let ranks = fractional_ranks(values, weights)?;
    let mean = weighted_mean(values, weights);
    if mean <= 0.0 || mean.is_nan() {
        return Err(GiniError::NonPositiveMean { mean });
    }
    let cov = covariance_unchecked(values, ranks.as_slice(), weights);
    Ok(2.0 * cov / mean)
}

/// Gini coefficient by the explicit pairwise double sum
/// `Σᵢ Σⱼ wᵢ wⱼ |yᵢ − yⱼ| / (2 W² μ)`.
///
/// O(n²); kept as an independent oracle for [`gini`] in tests and in the
/// CLI verify mode.
pub fn gini_pairwise(values: &[f64], weights: &[f64]) -> Result<f64, GiniError> {
    validate_pair(values, weights)?;
    let mean = weighted_mean(values, weights);
    if mean <= 0.0 || mean.is_nan() {
        return Err(GiniError::NonPositiveMean { mean });
    }
    let total = compensated_total(weights);
    let mut acc = CompensatedSum::new();
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            acc.add(weights[i] * weights[j] * (values[i] - values[j]).abs());
        }
    }
    // the full double sum is twice the sum over i < j
    Ok(acc.value() / (total * total * mean))
}

/// Gini correlation of an income source with a reference income:
/// `R = cov(source, F_reference) / cov(source, F_source)`.
///
/// Returns `None` for a constant source, whose own-rank covariance is zero
/// and whose correlation is undefined.
pub fn gini_correlation(
    source_values: &[f64],
    reference_values: &[f64],
    weights: &[f64],
) -> Result<Option<f64>, GiniError> {
    validate_pair(source_values, weights)?;
    if source_values.len() != reference_values.len() {
        return Err(GiniError::LengthMismatch {
            values: reference_values.len(),
            weights: source_values.len(),
        });
    }
    if is_constant(source_values) {
        return Ok(None);
    }
    let reference_ranks = fractional_ranks(reference_values, weights)?;
    let own_ranks = fractional_ranks(source_values, weights)?;
    let numerator = covariance_unchecked(source_values, reference_ranks.as_slice(), weights);
    let denominator = covariance_unchecked(source_values, own_ranks.as_slice(), weights);
    if denominator == 0.0 {
        return Ok(None);
    }
    Ok(Some(numerator / denominator))
}

/// A source's fraction of total inequality: `S G_k R_k / G`.
///
/// Also usable to rebuild a decomposition table from externally reported
/// shares, source Ginis, and correlations.
pub fn relative_contribution(
    share: f64,
    source_gini: f64,
    correlation: f64,
    total_gini: f64,
) -> f64 {
    share * source_gini * correlation / total_gini
}

/// Elasticity of the total Gini with respect to a uniform proportional
/// change in one source: `S G_k R_k / G − S`. Negative marks an equalizing
/// source, positive a dis-equalizing one; across sources these sum to zero.
pub fn marginal_effect(share: f64, source_gini: f64, correlation: f64, total_gini: f64) -> f64 {
    relative_contribution(share, source_gini, correlation, total_gini) - share
}

/// Decomposition factors for one income source.
///
/// `source_gini`, `gini_correlation`, and the two derived columns are
/// `None` for degenerate sources (identically zero, or constant across
/// records), which carry no rank information.
#[derive(Debug, Clone, PartialEq)]
pub struct GiniSourceRow {
    pub source: SourceId,
    /// Share of the source in total income, `S_k = μ_k/μ`.
    pub share: f64,
    /// Source Gini `G_k`, ranked by the source's own distribution.
    pub source_gini: Option<f64>,
    /// Gini correlation `R_k` with the distribution of total income.
    pub gini_correlation: Option<f64>,
    /// `S_k G_k R_k / G`.
    pub relative_contribution: Option<f64>,
    /// `S_k G_k R_k / G − S_k`.
    pub marginal_effect: Option<f64>,
}

impl GiniSourceRow {
    /// Whether any factor of this row is undefined.
    pub fn is_degenerate(&self) -> bool {
        self.source_gini.is_none() || self.gini_correlation.is_none()
    }
}

/// Full by-source decomposition of total income inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct GiniDecomposition {
    /// Gini of total income.
    pub total_gini: f64,
    /// One row per registered source, in registry order.
    pub rows: Vec<GiniSourceRow>,
    /// `Σ_k S_k G_k R_k − G` over the non-degenerate rows; expected to be
    /// zero up to rounding whenever source amounts sum to record totals.
    pub residual: f64,
}

impl GiniDecomposition {
    /// Sources whose row fields are partly undefined and therefore excluded
    /// from the identity checks.
    pub fn degenerate_sources(&self) -> Vec<&SourceId> {
        self.rows
            .iter()
            .filter(|r| r.is_degenerate())
            .map(|r| &r.source)
            .collect()
    }

    /// Sum of the defined relative contributions; 1 up to rounding when no
    /// source is degenerate.
    pub fn contribution_sum(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for r in &self.rows {
            if let Some(c) = r.relative_contribution {
                acc.add(c);
            }
        }
        acc.value()
    }

    /// Sum of the defined marginal effects; 0 up to rounding when no source
    /// is degenerate.
    pub fn marginal_effect_sum(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for r in &self.rows {
            if let Some(m) = r.marginal_effect {
                acc.add(m);
            }
        }
        acc.value()
    }
}

/// Decompose the total-income Gini of a dataset by its registered sources.
///
/// Record totals are the sums of the registered source amounts by
/// construction, which is what makes the identity `G = Σ_k S_k G_k R_k`
/// hold. If total income is perfectly equal (`G = 0`) the relative
/// contributions and marginal effects are undefined and reported as `None`.
pub fn decompose(data: &Dataset) -> Result<GiniDecomposition, GiniError> {
    let totals = data.totals();
    let weights = data.weights();
    let mean = weighted_mean(&totals, &weights);
    if mean <= 0.0 || mean.is_nan() {
        return Err(GiniError::NonPositiveMean { mean });
    }
    let total_ranks = fractional_ranks(&totals, &weights)?;
    let total_gini = 2.0 * covariance_unchecked(&totals, total_ranks.as_slice(), &weights) / mean;

    let mut rows = Vec::with_capacity(data.sources().len());
    let mut identity = CompensatedSum::new();
    for source in data.sources() {
        let values = data.source_values(source)?;
        let source_mean = weighted_mean(&values, &weights);
        let share = source_mean / mean;

        let (source_gini, correlation) = if is_constant(&values) {
            // constant source: zero spread; all-zero additionally has no
            // defined source Gini (zero mean)
            let g = if values[0] == 0.0 { None } else { Some(0.0) };
            (g, None)
        } else {
            let own_ranks = fractional_ranks(&values, &weights)?;
            let cov_own = covariance_unchecked(&values, own_ranks.as_slice(), &weights);
            let cov_total = covariance_unchecked(&values, total_ranks.as_slice(), &weights);
            let g = (source_mean != 0.0).then(|| 2.0 * cov_own / source_mean);
            let r = (cov_own != 0.0).then(|| cov_total / cov_own);
            (g, r)
        };

        let (contribution, marginal) = match (source_gini, correlation) {
            (Some(g), Some(r)) => {
                identity.add(share * g * r);
                if total_gini == 0.0 {
                    (None, None)
                } else {
                    let c = relative_contribution(share, g, r, total_gini);
                    (Some(c), Some(c - share))
                }
            }
            _ => (None, None),
        };

        rows.push(GiniSourceRow {
            source: source.clone(),
            share,
            source_gini,
            gini_correlation: correlation,
            relative_contribution: contribution,
            marginal_effect: marginal,
        });
    }

    Ok(GiniDecomposition {
        total_gini,
        rows,
        residual: identity.value() - total_gini,
    })
}

/// Finite-difference oracle for the marginal effect of one source: scales
/// the source by `1 + epsilon`, recomputes ranks and the Gini on the
/// perturbed totals, and returns `(G' − G)/(G · epsilon)`.
///
/// Converges to the analytic `S_k G_k R_k / G − S_k` as `epsilon → 0`
/// whenever record totals are distinct (so the perturbation cannot reorder
/// ranks). `epsilon` must lie in (0, 0.01].
pub fn marginal_effect_numeric(
    data: &Dataset,
    source: &SourceId,
    epsilon: f64,
) -> Result<f64, GiniError> {
    if !(epsilon > 0.0 && epsilon <= 0.01) {
        return Err(GiniError::InvalidEpsilon { value: epsilon });
    }
    let totals = data.totals();
    let weights = data.weights();
    let source_values = data.source_values(source)?;
    let baseline = gini(&totals, &weights)?;
    if baseline == 0.0 {
        return Err(GiniError::ZeroGini);
    }
    let perturbed: Vec<f64> = totals
        .iter()
        .zip(&source_values)
        .map(|(t, s)| t + epsilon * s)
        .collect();
    let scaled = gini(&perturbed, &weights)?;
    Ok((scaled - baseline) / (baseline * epsilon))
}

fn is_constant(values: &[f64]) -> bool {
    values.iter().all(|v| *v == values[0])
}

fn compensated_total(weights: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for w in weights {
        acc.add(*w);
    }
    acc.value()
}

fn covariance_unchecked(xs: &[f64], ys: &[f64], weights: &[f64]) -> f64 {
    let mean_x = weighted_mean(xs, weights);
    let mean_y = weighted_mean(ys, weights);
    let mut acc = CompensatedSum::new();
    let mut total = CompensatedSum::new();
    for i in 0..xs.len() {
        acc.add(weights[i] * (xs[i] - mean_x) * (ys[i] - mean_y));
        total.add(weights[i]);
    }
    acc.value() / total.value()
}

fn validate_pair(values: &[f64], weights: &[f64]) -> Result<(), GiniError> {
    if values.is_empty() {
        return Err(GiniError::EmptyInput);
    }
    if values.len() != weights.len() {
        return Err(GiniError::LengthMismatch {
            values: values.len(),
            weights: weights.len(),
        });
    }
    for v in values {
        if !v.is_finite() {
            return Err(GiniError::NonFiniteValue { value: *v });
        }
    }
    let mut total = CompensatedSum::new();
    for w in weights {
        if !(w.is_finite() && *w >= 0.0) {
            return Err(GiniError::InvalidWeight { value: *w });
        }
        total.add(*w);
    }
    if total.value() <= 0.0 {
        return Err(GiniError::DegenerateWeights);
    }
    Ok(())
}

/// Errors from the rank and Gini computations.
#[derive(Debug, Clone, PartialEq)]
pub enum GiniError {
    EmptyInput,
    LengthMismatch { values: usize, weights: usize },
    NonFiniteValue { value: f64 },
    InvalidWeight { value: f64 },
    DegenerateWeights,
    NonPositiveMean { mean: f64 },
    InvalidEpsilon { value: f64 },
    ZeroGini,
    Model(ModelError),
}

impl fmt::Display for GiniError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GiniError::EmptyInput => write!(f, "cannot rank an empty list of records"),
            GiniError::LengthMismatch { values, weights } => {
                write!(
                    f,
                    "length mismatch: {values} values vs {weights} companions"
                )
            }
            GiniError::NonFiniteValue { value } => write!(f, "non-finite value {value}"),
            GiniError::InvalidWeight { value } => {
                write!(f, "weight {value} must be finite and non-negative")
            }
            GiniError::DegenerateWeights => write!(f, "total sampling weight must be positive"),
            GiniError::NonPositiveMean { mean } => {
                write!(
                    f,
                    "mean income {mean} must be positive for a Gini coefficient"
                )
            }
            GiniError::InvalidEpsilon { value } => {
                write!(f, "epsilon {value} must lie in (0, 0.01]")
            }
            GiniError::ZeroGini => {
                write!(
                    f,
                    "total Gini is zero; the marginal-effect elasticity is undefined"
                )
            }
            GiniError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for GiniError {}

impl From<ModelError> for GiniError {
    fn from(e: ModelError) -> Self {
        GiniError::Model(e)
    }
}
