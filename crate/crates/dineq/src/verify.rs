//! Internal-consistency checks on a dataset.
//!
//! Every statistic the crate reports has either an independent second
//! computation path or an exact identity it must satisfy. The battery
//! recomputes them and compares within fixed tolerances:
//!
//! - total Gini: covariance form vs. the O(n²) pairwise double sum
//! - fractional ranks: weighted mean exactly one half
//! - decomposition: `Σ share · source_gini · correlation = total_gini`,
//!   contributions summing to 1, marginal effects summing to 0
//! - marginal effects: analytic elasticity vs. a finite-difference
//!   perturbation of the source
//! - poverty indices: non-increasing in the aversion parameter
//!
//! Checks that need assumptions the data does not meet (degenerate
//! sources, tied totals, zero total Gini) are reported as skipped, not
//! passed.

use dineq_core::numeric::weighted_mean;
use dineq_core::{
    decompose, fgt_index, fractional_ranks, gini, gini_pairwise, marginal_effect_numeric, Dataset,
    GiniError, PovertyLine,
};

const GINI_FORMS_TOLERANCE: f64 = 1e-12;
const RANK_MEAN_TOLERANCE: f64 = 1e-12;
const RESIDUAL_TOLERANCE: f64 = 1e-10;
const SUM_TOLERANCE: f64 = 1e-10;
const NUMERIC_MARGINAL_TOLERANCE: f64 = 1e-4;
const NUMERIC_MARGINAL_EPSILON: f64 = 1e-6;
const FGT_MONOTONE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

/// One named check with its outcome and a short account of the evidence.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

impl Check {
    fn pass(name: &'static str, detail: String) -> Self {
        Self {
            name,
            status: CheckStatus::Pass,
            detail,
        }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        Self {
            name,
            status: CheckStatus::Fail,
            detail,
        }
    }

    fn skip(name: &'static str, detail: String) -> Self {
        Self {
            name,
            status: CheckStatus::Skip,
            detail,
        }
    }

    fn within(name: &'static str, error: f64, tolerance: f64) -> Self {
        let detail = format!("|error| = {:.2e}, tolerance {tolerance:.0e}", error.abs());
        if error.abs() <= tolerance {
            Self::pass(name, detail)
        } else {
            Self::fail(name, detail)
        }
    }
}

/// Outcome of the whole battery.
#[derive(Debug, Clone)]
pub struct Verification {
    pub checks: Vec<Check>,
}

impl Verification {
    pub fn failures(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    /// One line per check: `PASS <name>: <detail>`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for check in &self.checks {
            let status = match check.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Skip => "SKIP",
            };
            out.push_str(&format!("{status}  {}: {}\n", check.name, check.detail));
        }
        out
    }
}

/// Run the battery. FGT monotonicity is checked only when a poverty line is
/// given; `alphas` orders the comparison.
pub fn verify_dataset(
    data: &Dataset,
    line: Option<&PovertyLine>,
    alphas: &[f64],
) -> Result<Verification, GiniError> {
    let totals = data.totals();
    let weights = data.weights();
    let mut checks = Vec::new();

    let cov_form = gini(&totals, &weights)?;
    let pairwise = gini_pairwise(&totals, &weights)?;
    checks.push(Check::within(
        "gini-covariance-vs-pairwise",
        cov_form - pairwise,
        GINI_FORMS_TOLERANCE,
    ));

    let ranks = fractional_ranks(&totals, &weights)?;
    checks.push(Check::within(
        "rank-mean-one-half",
        weighted_mean(ranks.as_slice(), &weights) - 0.5,
        RANK_MEAN_TOLERANCE,
    ));

    let decomposition = decompose(data)?;
    checks.push(Check::within(
        "decomposition-residual",
        decomposition.residual,
        RESIDUAL_TOLERANCE,
    ));

    let degenerate = decomposition.degenerate_sources();
    if degenerate.is_empty() && decomposition.total_gini != 0.0 {
        checks.push(Check::within(
            "contribution-sum-is-one",
            decomposition.contribution_sum() - 1.0,
            SUM_TOLERANCE,
        ));
        checks.push(Check::within(
            "marginal-effect-sum-is-zero",
            decomposition.marginal_effect_sum(),
            SUM_TOLERANCE,
        ));
    } else {
        let reason = if decomposition.total_gini == 0.0 {
            "total income is perfectly equal".to_string()
        } else {
            format!(
                "degenerate sources: {}",
                degenerate
                    .iter()
                    .map(|s| s.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        };
        checks.push(Check::skip("contribution-sum-is-one", reason.clone()));
        checks.push(Check::skip("marginal-effect-sum-is-zero", reason));
    }

    checks.push(numeric_marginal_check(data, &decomposition, &totals)?);

    if let Some(line) = line {
        checks.push(fgt_monotonicity_check(&totals, &weights, line, alphas));
    }

    Ok(Verification { checks })
}

fn has_ties(totals: &[f64]) -> bool {
    let mut sorted = totals.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).any(|w| w[0] == w[1])
}

fn numeric_marginal_check(
    data: &Dataset,
    decomposition: &dineq_core::GiniDecomposition,
    totals: &[f64],
) -> Result<Check, GiniError> {
    const NAME: &str = "marginal-effect-vs-finite-difference";
    if decomposition.total_gini == 0.0 {
        return Ok(Check::skip(
            NAME,
            "total income is perfectly equal".to_string(),
        ));
    }
    if has_ties(totals) {
        // a perturbation can reorder tied totals, so the finite difference
        // need not approximate the analytic elasticity
        return Ok(Check::skip(NAME, "tied household totals".to_string()));
    }
    let mut worst: Option<(f64, String)> = None;
    for row in &decomposition.rows {
        let Some(analytic) = row.marginal_effect else {
            continue;
        };
        let numeric = marginal_effect_numeric(data, &row.source, NUMERIC_MARGINAL_EPSILON)?;
        let error = (numeric - analytic).abs();
        if worst.as_ref().is_none_or(|(e, _)| error > *e) {
            worst = Some((error, row.source.to_string()));
        }
    }
    Ok(match worst {
        None => Check::skip(NAME, "no source has a defined marginal effect".to_string()),
        Some((error, source)) => {
            let detail = format!(
                "worst source \"{source}\": |error| = {error:.2e}, tolerance {NUMERIC_MARGINAL_TOLERANCE:.0e}"
            );
            if error <= NUMERIC_MARGINAL_TOLERANCE {
                Check::pass(NAME, detail)
            } else {
                Check::fail(NAME, detail)
            }
        }
    })
}

fn fgt_monotonicity_check(
    totals: &[f64],
    weights: &[f64],
    line: &PovertyLine,
    alphas: &[f64],
) -> Check {
    const NAME: &str = "fgt-nonincreasing-in-alpha";
    let mut ordered = alphas.to_vec();
    ordered.sort_by(f64::total_cmp);
    ordered.dedup();
    if ordered.len() < 2 {
        return Check::skip(NAME, "fewer than two distinct alphas".to_string());
    }
    let mut previous: Option<(f64, f64)> = None;
    for alpha in ordered {
        let index = match fgt_index(totals, weights, line, alpha) {
            Ok(ix) => ix.value,
            Err(e) => return Check::fail(NAME, format!("alpha {alpha}: {e}")),
        };
        if let Some((prev_alpha, prev_value)) = previous {
            if index > prev_value + FGT_MONOTONE_TOLERANCE {
                return Check::fail(
                    NAME,
                    format!("P({alpha}) = {index} exceeds P({prev_alpha}) = {prev_value}"),
                );
            }
        }
        previous = Some((alpha, index));
    }
    Check::pass(
        NAME,
        "indices shrink as the aversion parameter grows".to_string(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use dineq_core::{HouseholdRecord, SourceId};
    use std::collections::BTreeMap;

    fn dataset(rows: &[(f64, f64, f64)]) -> Dataset {
        let sources: Vec<SourceId> = ["farm", "nonfarm", "transfer"]
            .into_iter()
            .map(|s| SourceId::new(s).unwrap())
            .collect();
        let households = rows
            .iter()
            .enumerate()
            .map(|(i, (a, b, c))| {
                let incomes = BTreeMap::from([
                    (sources[0].clone(), *a),
                    (sources[1].clone(), *b),
                    (sources[2].clone(), *c),
                ]);
                HouseholdRecord::new(format!("h{i}"), incomes)
            })
            .collect();
        Dataset::new(sources, households).unwrap()
    }

    #[test]
    fn battery_passes_on_well_formed_data() {
        let data = dataset(&[
            (353.0, 401.0, 7.0),
            (701.0, 13.0, 11.0),
            (1051.0, 203.0, 101.0),
            (141.0, 5.0, 31.0),
            (481.0, 121.0, 55.0),
            (913.0, 47.0, 3.0),
        ]);
        let line = PovertyLine::new(700.0).unwrap();
        let outcome = verify_dataset(&data, Some(&line), &[0.0, 1.0, 2.0]).unwrap();
        assert!(outcome.passed(), "{}", outcome.render());
        assert_eq!(outcome.checks.len(), 7);
        assert!(outcome.checks.iter().all(|c| c.status == CheckStatus::Pass));
    }

    #[test]
    fn degenerate_source_skips_sum_checks() {
        let data = dataset(&[(353.0, 401.0, 0.0), (701.0, 13.0, 0.0), (141.0, 5.0, 0.0)]);
        let outcome = verify_dataset(&data, None, &[]).unwrap();
        let by_name = |name: &str| {
            outcome
                .checks
                .iter()
                .find(|c| c.name == name)
                .unwrap()
                .status
        };
        assert_eq!(by_name("contribution-sum-is-one"), CheckStatus::Skip);
        assert_eq!(by_name("marginal-effect-sum-is-zero"), CheckStatus::Skip);
        assert_eq!(by_name("decomposition-residual"), CheckStatus::Pass);
        assert!(outcome.passed());
    }

    #[test]
    fn tied_totals_skip_the_finite_difference_check() {
        let data = dataset(&[(350.0, 50.0, 0.0), (300.0, 100.0, 0.0), (500.0, 0.0, 0.0)]);
        let outcome = verify_dataset(&data, None, &[]).unwrap();
        let check = outcome
            .checks
            .iter()
            .find(|c| c.name == "marginal-effect-vs-finite-difference")
            .unwrap();
        assert_eq!(check.status, CheckStatus::Skip);
        assert!(check.detail.contains("tied"));
    }

    #[test]
    fn render_lists_one_line_per_check() {
        let data = dataset(&[(353.0, 401.0, 7.0), (701.0, 13.0, 11.0), (141.0, 5.0, 31.0)]);
        let line = PovertyLine::new(700.0).unwrap();
        let outcome = verify_dataset(&data, Some(&line), &[0.0, 1.0, 2.0]).unwrap();
        let rendered = outcome.render();
        assert_eq!(rendered.lines().count(), outcome.checks.len());
        for check in &outcome.checks {
            assert!(rendered.contains(check.name));
        }
    }
}
