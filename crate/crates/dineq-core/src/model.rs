//! Domain types for household survey microdata: income sources, household
//! records, validated datasets, counterfactual income bundles, and the
//! poverty-line cutoff.
//!
//! All types are immutable after construction and safe to share across
//! concurrent readers. Validation happens once, in [`Dataset::new`] /
//! [`Dataset::with_options`]; downstream statistics can then assume a
//! well-formed dataset.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::numeric::{weighted_mean, CompensatedSum};

/// Canonical source name: income from the household's own agricultural
/// activity.
pub const FARM: &str = "farm";
/// Canonical source name: remunerative work away from the household's own
/// plot.
pub const NONFARM: &str = "nonfarm";
/// Canonical source name: unearned income (transfers, remittances).
pub const TRANSFER: &str = "transfer";

/// Identifier of one income source within a dataset's source registry.
///
/// The registry is open: any non-empty name is accepted, with
/// [`canonical_sources`] providing the conventional farm / nonfarm /
/// transfer trio.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceId(String);

impl SourceId {
    pub fn new(name: impl Into<String>) -> Result<Self, ModelError> {
        let name = name.into();
        if name.is_empty() {
            return Err(ModelError::EmptySourceName);
        }
        // "total" would collide with the derived total-income bundle and
        // the summary rows in rendered output
        if name == "total" {
            return Err(ModelError::ReservedSourceName { name });
        }
        Ok(Self(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The canonical three-source registry: farm, nonfarm, transfer.
pub fn canonical_sources() -> Vec<SourceId> {
    [FARM, NONFARM, TRANSFER]
        .into_iter()
        .map(|s| SourceId::new(s).expect("canonical names are non-empty"))
        .collect()
}

/// The canonical four counterfactual bundles over the canonical sources:
/// farm only, farm + nonfarm, farm + transfer, and all three together.
///
/// The farm-only bundle comes first and serves as the comparison base in
/// [`crate::fgt::poverty_table`].
pub fn canonical_bundles() -> Vec<IncomeBundle> {
    let farm = SourceId::new(FARM).unwrap();
    let nonfarm = SourceId::new(NONFARM).unwrap();
    let transfer = SourceId::new(TRANSFER).unwrap();
    [
        IncomeBundle::new("farm", [farm.clone()]),
        IncomeBundle::new("farm+nonfarm", [farm.clone(), nonfarm.clone()]),
        IncomeBundle::new("farm+transfer", [farm.clone(), transfer.clone()]),
        IncomeBundle::new("total", [farm, nonfarm, transfer]),
    ]
    .into_iter()
    .map(|b| b.expect("canonical bundles are well-formed"))
    .collect()
}

/// A labelled subset of income sources, summed per household to form a
/// counterfactual total income.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncomeBundle {
    label: String,
    sources: Vec<SourceId>,
}

impl IncomeBundle {
    /// Build a bundle. The source list must be non-empty and free of
    /// duplicates (a duplicate would double-count that source).
    pub fn new(
        label: impl Into<String>,
        sources: impl IntoIterator<Item = SourceId>,
    ) -> Result<Self, ModelError> {
        let label = label.into();
        let sources: Vec<SourceId> = sources.into_iter().collect();
        if sources.is_empty() {
            return Err(ModelError::EmptyBundle {
                label: label.clone(),
            });
        }
        for (i, s) in sources.iter().enumerate() {
            if sources[..i].contains(s) {
                return Err(ModelError::DuplicateBundleSource {
                    label: label.clone(),
                    source: s.to_string(),
                });
            }
        }
        Ok(Self { label, sources })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn sources(&self) -> &[SourceId] {
        &self.sources
    }
}

/// Poverty-line income: the cutoff separating poor from non-poor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovertyLine(f64);

impl PovertyLine {
    pub fn new(z: f64) -> Result<Self, ModelError> {
        if !(z.is_finite() && z > 0.0) {
            return Err(ModelError::NonPositiveLine { value: z });
        }
        Ok(Self(z))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// Classify an income against the line. A household exactly on the line
    /// counts as non-poor; only incomes strictly below the line are poor.
    pub fn classify(&self, income: f64) -> PovertyStatus {
        if income < self.0 {
            PovertyStatus::Poor
        } else {
            PovertyStatus::NonPoor
        }
    }
}

/// Poor / non-poor classification of a household income.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PovertyStatus {
    Poor,
    NonPoor,
}

impl PovertyStatus {
    pub fn is_poor(&self) -> bool {
        matches!(self, PovertyStatus::Poor)
    }
}

/// One surveyed household: identifier, strata labels, per-source income
/// amounts, and a sampling weight.
#[derive(Debug, Clone, PartialEq)]
pub struct HouseholdRecord {
    pub id: String,
    /// Administrative stratum the household was sampled from.
    pub district: String,
    /// Local-economy stratum within the district.
    pub stratum: String,
    /// Income per registered source, in the dataset's currency per period.
    pub incomes: BTreeMap<SourceId, f64>,
    /// Sampling design weight; 1.0 for self-weighting samples.
    pub weight: f64,
}

impl HouseholdRecord {
    /// A record with default strata ("unspecified") and unit weight.
    pub fn new(id: impl Into<String>, incomes: BTreeMap<SourceId, f64>) -> Self {
        Self {
            id: id.into(),
            district: String::from("unspecified"),
            stratum: String::from("unspecified"),
            incomes,
            weight: 1.0,
        }
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_district(mut self, district: impl Into<String>) -> Self {
        self.district = district.into();
        self
    }

    pub fn with_stratum(mut self, stratum: impl Into<String>) -> Self {
        self.stratum = stratum.into();
        self
    }

    /// Total income across every source on the record.
    pub fn total_income(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for v in self.incomes.values() {
            acc.add(*v);
        }
        acc.value()
    }

    /// Sum of this record's incomes over the sources included in `bundle`.
    ///
    /// Every bundled source must be present on the record; a missing source
    /// is a configuration error naming that source.
    pub fn bundle_income(&self, bundle: &IncomeBundle) -> Result<f64, ModelError> {
        let mut acc = CompensatedSum::new();
        for source in bundle.sources() {
            match self.incomes.get(source) {
                Some(v) => acc.add(*v),
                None => {
                    return Err(ModelError::UnknownSource {
                        source: source.to_string(),
                    })
                }
            }
        }
        Ok(acc.value())
    }
}

/// Validation knobs for [`Dataset::with_options`].
#[derive(Debug, Clone)]
pub struct DatasetOptions {
    /// Accept negative per-source amounts (a source can be a net loss).
    /// Each record's total income must still be non-negative.
    pub allow_negative: bool,
    /// Currency label, metadata only.
    pub currency: String,
    /// Accounting period label, metadata only.
    pub period: String,
}

impl Default for DatasetOptions {
    fn default() -> Self {
        Self {
            allow_negative: false,
            currency: String::from("RM"),
            period: String::from("month"),
        }
    }
}

/// A validated, immutable collection of household records together with the
/// source registry they are keyed on.
///
/// Construction enforces: non-empty household list, unique non-empty ids,
/// a registry entry on every record for every source (zero allowed), finite
/// amounts, non-negative weights with positive total, and a strictly
/// positive weighted mean total income.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    households: Vec<HouseholdRecord>,
    sources: Vec<SourceId>,
    currency: String,
    period: String,
}

impl Dataset {
    /// Validate and build a dataset with default options (negative amounts
    /// rejected, currency "RM", period "month").
    pub fn new(
        sources: Vec<SourceId>,
        households: Vec<HouseholdRecord>,
    ) -> Result<Self, ModelError> {
        Self::with_options(sources, households, DatasetOptions::default())
    }

    pub fn with_options(
        sources: Vec<SourceId>,
        households: Vec<HouseholdRecord>,
        options: DatasetOptions,
    ) -> Result<Self, ModelError> {
        if households.is_empty() {
            return Err(ModelError::EmptyDataset);
        }
        if sources.is_empty() {
            return Err(ModelError::EmptySourceRegistry);
        }
        for (i, s) in sources.iter().enumerate() {
            if sources[..i].contains(s) {
                return Err(ModelError::DuplicateSource {
                    source: s.to_string(),
                });
            }
        }

        let mut seen_ids: Vec<&str> = Vec::with_capacity(households.len());
        for record in &households {
            if record.id.is_empty() {
                return Err(ModelError::EmptyRecordId);
            }
            if seen_ids.binary_search(&record.id.as_str()).is_ok() {
                return Err(ModelError::DuplicateId {
                    id: record.id.clone(),
                });
            }
            let pos = seen_ids
                .binary_search(&record.id.as_str())
                .unwrap_or_else(|p| p);
            seen_ids.insert(pos, record.id.as_str());

            if !(record.weight.is_finite() && record.weight >= 0.0) {
                return Err(ModelError::InvalidWeight {
                    id: record.id.clone(),
                    value: record.weight,
                });
            }
            for source in &sources {
                let Some(amount) = record.incomes.get(source) else {
                    return Err(ModelError::MissingSource {
                        id: record.id.clone(),
                        source: source.to_string(),
                    });
                };
                if !amount.is_finite() {
                    return Err(ModelError::NonFiniteAmount {
                        id: record.id.clone(),
                        source: source.to_string(),
                    });
                }
                if *amount < 0.0 && !options.allow_negative {
                    return Err(ModelError::NegativeAmount {
                        id: record.id.clone(),
                        source: source.to_string(),
                        value: *amount,
                    });
                }
            }
            // Guard against amounts for sources outside the registry, which
            // would silently disappear from totals.
            if record.incomes.len() != sources.len() {
                let unknown = record
                    .incomes
                    .keys()
                    .find(|k| !sources.contains(k))
                    .map(|k| k.to_string())
                    .unwrap_or_default();
                return Err(ModelError::UnknownSource { source: unknown });
            }
            if options.allow_negative && record.total_income() < 0.0 {
                return Err(ModelError::NegativeTotal {
                    id: record.id.clone(),
                });
            }
        }

        let total_weight: f64 = {
            let mut acc = CompensatedSum::new();
            for r in &households {
                acc.add(r.weight);
            }
            acc.value()
        };
        if total_weight <= 0.0 {
            return Err(ModelError::DegenerateWeights);
        }

        let dataset = Self {
            households,
            sources,
            currency: options.currency,
            period: options.period,
        };
        let mean = dataset.mean_total_income();
        if mean <= 0.0 || mean.is_nan() {
            return Err(ModelError::NonPositiveMean { mean });
        }
        Ok(dataset)
    }

    pub fn households(&self) -> &[HouseholdRecord] {
        &self.households
    }

    pub fn sources(&self) -> &[SourceId] {
        &self.sources
    }

    /// Number of records (n).
    pub fn len(&self) -> usize {
        self.households.len()
    }

    pub fn is_empty(&self) -> bool {
        self.households.is_empty()
    }

    pub fn currency(&self) -> &str {
        &self.currency
    }

    pub fn period(&self) -> &str {
        &self.period
    }

    /// Per-record total income, summed over the registry in registry order.
    pub fn totals(&self) -> Vec<f64> {
        self.households
            .iter()
            .map(|r| {
                let mut acc = CompensatedSum::new();
                for s in &self.sources {
                    acc.add(r.incomes[s]);
                }
                acc.value()
            })
            .collect()
    }

    /// Per-record sampling weights.
    pub fn weights(&self) -> Vec<f64> {
        self.households.iter().map(|r| r.weight).collect()
    }

    /// Per-record amounts for one registered source.
    pub fn source_values(&self, source: &SourceId) -> Result<Vec<f64>, ModelError> {
        if !self.sources.contains(source) {
            return Err(ModelError::UnknownSource {
                source: source.to_string(),
            });
        }
        Ok(self.households.iter().map(|r| r.incomes[source]).collect())
    }

    /// Per-record bundle totals.
    pub fn bundle_totals(&self, bundle: &IncomeBundle) -> Result<Vec<f64>, ModelError> {
        self.households
            .iter()
            .map(|r| r.bundle_income(bundle))
            .collect()
    }

    /// Weighted mean of per-record total income.
    pub fn mean_total_income(&self) -> f64 {
        let totals = self.totals();
        let weights = self.weights();
        weighted_mean(&totals, &weights)
    }
}

/// Validation and configuration errors for the data model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    EmptySourceName,
    ReservedSourceName {
        name: String,
    },
    EmptySourceRegistry,
    DuplicateSource {
        source: String,
    },
    EmptyBundle {
        label: String,
    },
    DuplicateBundleSource {
        label: String,
        source: String,
    },
    EmptyDataset,
    EmptyRecordId,
    DuplicateId {
        id: String,
    },
    UnknownSource {
        source: String,
    },
    MissingSource {
        id: String,
        source: String,
    },
    NonFiniteAmount {
        id: String,
        source: String,
    },
    NegativeAmount {
        id: String,
        source: String,
        value: f64,
    },
    NegativeTotal {
        id: String,
    },
    InvalidWeight {
        id: String,
        value: f64,
    },
    DegenerateWeights,
    NonPositiveMean {
        mean: f64,
    },
    NonPositiveLine {
        value: f64,
    },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::EmptySourceName => write!(f, "income source name must be non-empty"),
            ModelError::ReservedSourceName { name } => {
                write!(
                    f,
                    "\"{name}\" is reserved for the derived total; pick another source name"
                )
            }
            ModelError::EmptySourceRegistry => write!(f, "source registry must be non-empty"),
            ModelError::DuplicateSource { source } => {
                write!(f, "duplicate income source \"{source}\" in registry")
            }
            ModelError::EmptyBundle { label } => {
                write!(f, "bundle \"{label}\" must include at least one source")
            }
            ModelError::DuplicateBundleSource { label, source } => {
                write!(f, "bundle \"{label}\" lists source \"{source}\" twice")
            }
            ModelError::EmptyDataset => write!(f, "dataset contains no households"),
            ModelError::EmptyRecordId => write!(f, "household id must be non-empty"),
            ModelError::DuplicateId { id } => write!(f, "duplicate household id \"{id}\""),
            ModelError::UnknownSource { source } => {
                write!(
                    f,
                    "income source \"{source}\" is not registered on the dataset"
                )
            }
            ModelError::MissingSource { id, source } => {
                write!(
                    f,
                    "household \"{id}\" has no amount for source \"{source}\""
                )
            }
            ModelError::NonFiniteAmount { id, source } => {
                write!(
                    f,
                    "household \"{id}\": non-finite amount for source \"{source}\""
                )
            }
            ModelError::NegativeAmount { id, source, value } => write!(
                f,
                "household \"{id}\": negative amount {value} for source \"{source}\" \
                 (enable allow-negative to accept net losses)"
            ),
            ModelError::NegativeTotal { id } => {
                write!(f, "household \"{id}\": total income is negative")
            }
            ModelError::InvalidWeight { id, value } => {
                write!(
                    f,
                    "household \"{id}\": weight {value} must be finite and non-negative"
                )
            }
            ModelError::DegenerateWeights => write!(f, "total sampling weight must be positive"),
            ModelError::NonPositiveMean { mean } => {
                write!(f, "mean total income {mean} must be positive")
            }
            ModelError::NonPositiveLine { value } => {
                write!(f, "poverty line {value} must be positive")
            }
        }
    }
}

impl core::error::Error for ModelError {}
