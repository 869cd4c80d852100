//! Deterministic synthetic survey generation.
//!
//! A [`SynthConfig`] describes household counts, a seed, per-source
//! participation and log-normal amount parameters, and optional district
//! and stratum mixes. Generation is a pure function of the config: the
//! same config (including seed) always produces the identical dataset on
//! every platform, which the tests rely on byte-for-byte.
//!
//! Two presets ship with the crate: `kedah-like`, a rice-farming survey
//! profile with farm-dominated incomes, and `concentrated-nonfarm`, where
//! nonfarm earnings are rare but large and so disequalizing.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use dineq_core::{Dataset, HouseholdRecord, ModelError, SourceId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::Deserialize;
use thiserror::Error;

pub const KEDAH_LIKE: &str = "kedah-like";
pub const CONCENTRATED_NONFARM: &str = "concentrated-nonfarm";

/// Names of the built-in presets.
pub fn preset_names() -> [&'static str; 2] {
    [KEDAH_LIKE, CONCENTRATED_NONFARM]
}

/// Full description of a synthetic survey.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub n_households: usize,
    pub seed: u64,
    pub sources: Vec<SourceSpec>,
    #[serde(default)]
    pub districts: Vec<GroupSpec>,
    #[serde(default)]
    pub strata: Vec<GroupSpec>,
}

/// One income source: how many households receive it and how amounts are
/// distributed among recipients.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub name: String,
    /// Probability that a household receives this source at all.
    pub participation: f64,
    /// Mean of log amount among recipients.
    pub log_mean: f64,
    /// Standard deviation of log amount among recipients.
    pub log_sd: f64,
}

impl SourceSpec {
    /// Expected amount per household, participation included:
    /// `p · exp(μ + σ²/2)`.
    pub fn expected_amount(&self) -> f64 {
        self.participation * (self.log_mean + 0.5 * self.log_sd * self.log_sd).exp()
    }
}

/// One label in a categorical mix (district or stratum).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub label: String,
    pub proportion: f64,
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("unknown preset \"{0}\" (available: kedah-like, concentrated-nonfarm)")]
    UnknownPreset(String),
    #[error("failed to read {path}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("at least one household is required (n_households >= 1)")]
    NoHouseholds,
    #[error("config lists no income sources")]
    NoSources,
    #[error("duplicate source \"{0}\"")]
    DuplicateSource(String),
    #[error("source \"{name}\": participation {value} must lie in [0, 1]")]
    BadParticipation { name: String, value: f64 },
    #[error("source \"{name}\": log_mean and log_sd must be finite with log_sd >= 0")]
    BadLogParams { name: String },
    #[error("{group} proportions must be non-negative and sum to 1 (got {sum})")]
    BadProportions { group: &'static str, sum: f64 },
    #[error("{group} labels must be non-empty and unique")]
    BadLabels { group: &'static str },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Load a built-in preset by name.
pub fn preset(name: &str) -> Result<SynthConfig, SynthError> {
    let text = match name {
        KEDAH_LIKE => include_str!("../presets/kedah_like.toml"),
        CONCENTRATED_NONFARM => include_str!("../presets/concentrated_nonfarm.toml"),
        other => return Err(SynthError::UnknownPreset(other.to_string())),
    };
    parse_config(text)
}

/// Parse and validate a config from TOML text.
pub fn parse_config(text: &str) -> Result<SynthConfig, SynthError> {
    let config: SynthConfig = toml::from_str(text)?;
    validate(&config)?;
    Ok(config)
}

/// Load and validate a config from a TOML file.
pub fn load_config(path: &Path) -> Result<SynthConfig, SynthError> {
    let text = fs::read_to_string(path).map_err(|source| SynthError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

fn validate(config: &SynthConfig) -> Result<(), SynthError> {
    if config.n_households == 0 {
        return Err(SynthError::NoHouseholds);
    }
    if config.sources.is_empty() {
        return Err(SynthError::NoSources);
    }
    for (i, source) in config.sources.iter().enumerate() {
        SourceId::new(source.name.clone())?;
        if config.sources[..i].iter().any(|s| s.name == source.name) {
            return Err(SynthError::DuplicateSource(source.name.clone()));
        }
        if !(source.participation.is_finite() && (0.0..=1.0).contains(&source.participation)) {
            return Err(SynthError::BadParticipation {
                name: source.name.clone(),
                value: source.participation,
            });
        }
        if !(source.log_mean.is_finite() && source.log_sd.is_finite() && source.log_sd >= 0.0) {
            return Err(SynthError::BadLogParams {
                name: source.name.clone(),
            });
        }
    }
    validate_groups("district", &config.districts)?;
    validate_groups("stratum", &config.strata)?;
    Ok(())
}

fn validate_groups(group: &'static str, specs: &[GroupSpec]) -> Result<(), SynthError> {
    if specs.is_empty() {
        return Ok(());
    }
    for (i, spec) in specs.iter().enumerate() {
        if spec.label.is_empty() || specs[..i].iter().any(|s| s.label == spec.label) {
            return Err(SynthError::BadLabels { group });
        }
    }
    let sum: f64 = specs.iter().map(|s| s.proportion).sum();
    if specs
        .iter()
        .any(|s| !(s.proportion.is_finite() && s.proportion >= 0.0))
        || (sum - 1.0).abs() > 1e-9
    {
        return Err(SynthError::BadProportions { group, sum });
    }
    Ok(())
}

/// Generate the dataset described by a validated config.
pub fn generate(config: &SynthConfig) -> Result<Dataset, SynthError> {
    validate(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let sources: Vec<SourceId> = config
        .sources
        .iter()
        .map(|s| SourceId::new(s.name.clone()))
        .collect::<Result<_, _>>()?;
    let amount_models: Vec<LogNormal<f64>> = config
        .sources
        .iter()
        .map(|s| LogNormal::new(s.log_mean, s.log_sd).expect("validated log params"))
        .collect();

    let mut households = Vec::with_capacity(config.n_households);
    for index in 0..config.n_households {
        let district = draw_group(&config.districts, &mut rng);
        let stratum = draw_group(&config.strata, &mut rng);

        let mut incomes = BTreeMap::new();
        for (spec, (source, model)) in config
            .sources
            .iter()
            .zip(sources.iter().zip(&amount_models))
        {
            let participates = rng.gen::<f64>() < spec.participation;
            let amount = if participates {
                model.sample(&mut rng)
            } else {
                0.0
            };
            incomes.insert(source.clone(), amount);
        }

        let mut household = HouseholdRecord::new(format!("hh{:04}", index + 1), incomes);
        if let Some(label) = district {
            household = household.with_district(label);
        }
        if let Some(label) = stratum {
            household = household.with_stratum(label);
        }
        households.push(household);
    }

    Ok(Dataset::new(sources, households)?)
}

fn draw_group(specs: &[GroupSpec], rng: &mut ChaCha8Rng) -> Option<String> {
    if specs.is_empty() {
        return None;
    }
    let u: f64 = rng.gen();
    let mut cumulative = 0.0;
    for spec in specs {
        cumulative += spec.proportion;
        if u < cumulative {
            return Some(spec.label.clone());
        }
    }
    // rounding can leave the last cumulative fractionally below 1
    specs.last().map(|s| s.label.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SynthConfig {
        parse_config(
            r#"
            n_households = 40
            seed = 7

            [[sources]]
            name = "farm"
            participation = 1.0
            log_mean = 6.0
            log_sd = 0.5

            [[sources]]
            name = "nonfarm"
            participation = 0.5
            log_mean = 5.5
            log_sd = 0.8

            [[sources]]
            name = "transfer"
            participation = 0.6
            log_mean = 4.0
            log_sd = 0.6

            [[districts]]
            label = "north"
            proportion = 0.5

            [[districts]]
            label = "south"
            proportion = 0.5
            "#,
        )
        .unwrap()
    }

    #[test]
    fn generation_is_deterministic() {
        let config = small_config();
        let a = generate(&config).unwrap();
        let b = generate(&config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let mut config = small_config();
        let a = generate(&config).unwrap();
        config.seed += 1;
        let b = generate(&config).unwrap();
        assert_ne!(a.totals(), b.totals());
    }

    #[test]
    fn respects_counts_ids_and_groups() {
        let config = small_config();
        let data = generate(&config).unwrap();
        assert_eq!(data.len(), 40);
        assert_eq!(data.households()[0].id, "hh0001");
        assert_eq!(data.households()[39].id, "hh0040");
        for h in data.households() {
            assert!(h.district == "north" || h.district == "south");
            assert_eq!(h.stratum, "unspecified");
            assert_eq!(h.weight, 1.0);
        }
    }

    #[test]
    fn full_participation_means_no_zeros() {
        let config = small_config();
        let data = generate(&config).unwrap();
        let farm = SourceId::new("farm").unwrap();
        assert!(data.source_values(&farm).unwrap().iter().all(|v| *v > 0.0));
    }

    #[test]
    fn partial_participation_leaves_zeros() {
        let config = small_config();
        let data = generate(&config).unwrap();
        let nonfarm = SourceId::new("nonfarm").unwrap();
        let values = data.source_values(&nonfarm).unwrap();
        assert!(values.contains(&0.0));
        assert!(values.iter().any(|v| *v > 0.0));
    }

    #[test]
    fn rejects_bad_proportions() {
        let err = parse_config(
            r#"
            n_households = 10
            seed = 1

            [[sources]]
            name = "farm"
            participation = 1.0
            log_mean = 6.0
            log_sd = 0.5

            [[districts]]
            label = "north"
            proportion = 0.7

            [[districts]]
            label = "south"
            proportion = 0.7
            "#,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            SynthError::BadProportions {
                group: "district",
                ..
            }
        ));
    }

    #[test]
    fn rejects_bad_participation() {
        let err = parse_config(
            r#"
            n_households = 10
            seed = 1

            [[sources]]
            name = "farm"
            participation = 1.5
            log_mean = 6.0
            log_sd = 0.5
            "#,
        )
        .unwrap_err();
        assert!(matches!(err, SynthError::BadParticipation { .. }));
    }

    #[test]
    fn rejects_reserved_source_name() {
        let err = parse_config(
            r#"
            n_households = 10
            seed = 1

            [[sources]]
            name = "total"
            participation = 1.0
            log_mean = 6.0
            log_sd = 0.5
            "#,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            SynthError::Model(ModelError::ReservedSourceName { .. })
        ));
    }

    #[test]
    fn rejects_unknown_config_keys() {
        let err = parse_config("n_households = 10\nseed = 1\nn_hoseholds = 3\n").unwrap_err();
        assert!(matches!(err, SynthError::Toml(_)));
    }

    #[test]
    fn unknown_preset_is_an_error() {
        assert!(matches!(
            preset("no-such-preset"),
            Err(SynthError::UnknownPreset(_))
        ));
    }

    #[test]
    fn builtin_presets_parse_and_generate() {
        for name in preset_names() {
            let config = preset(name).unwrap();
            let data = generate(&config).unwrap();
            assert_eq!(data.len(), config.n_households);
        }
    }
}
