//! CSV input and output for household survey datasets.
//!
//! The input schema has one row per household. Required columns:
//! `household_id`, `farm_income`, `nonfarm_income`, `transfer_income`.
//! Optional columns: `district`, `stratum`, `weight` (default 1.0). Any
//! further column named `<source>_income` registers `<source>` as an
//! additional income source; other columns are ignored. A `total_income`
//! column is rejected because totals are always derived. Column order is
//! free and fields are trimmed.
//!
//! [`dataset_to_csv`] writes the same schema back. Numbers are written in
//! shortest round-trip form, so write → parse reproduces a dataset
//! bit-for-bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use dineq_core::{Dataset, DatasetOptions, HouseholdRecord, ModelError, SourceId};
use thiserror::Error;

const ID_COLUMN: &str = "household_id";
const DISTRICT_COLUMN: &str = "district";
const STRATUM_COLUMN: &str = "stratum";
const WEIGHT_COLUMN: &str = "weight";
const INCOME_SUFFIX: &str = "_income";
const REQUIRED_SOURCES: [&str; 3] = ["farm", "nonfarm", "transfer"];

#[derive(Debug, Error)]
pub enum IoError {
    #[error("failed to read {path}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to write {path}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("input has no rows")]
    Empty,
    #[error("missing required column \"{0}\"")]
    MissingColumn(String),
    #[error("column \"{0}\" appears more than once")]
    DuplicateColumn(String),
    #[error(
        "column \"{0}\" is not allowed: total income is always derived from the source columns"
    )]
    ReservedColumn(String),
    #[error("line {line}, column \"{column}\": missing value")]
    MissingValue { line: u64, column: String },
    #[error("line {line}, column \"{column}\": cannot parse \"{value}\" as a number")]
    BadNumber {
        line: u64,
        column: String,
        value: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Read and validate a dataset from a CSV file.
pub fn read_dataset(path: &Path, options: DatasetOptions) -> Result<Dataset, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_csv(&text, options)
}

/// Parse and validate a dataset from CSV text.
pub fn parse_csv(text: &str, options: DatasetOptions) -> Result<Dataset, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader.headers()?.clone();
    if headers.is_empty() || headers.iter().all(|h| h.is_empty()) {
        return Err(IoError::Empty);
    }
    let layout = Layout::from_headers(&headers)?;

    let mut households = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let record = record?;
        // header occupies line 1; data rows follow
        let line = record
            .position()
            .map(|p| p.line())
            .unwrap_or(index as u64 + 2);
        households.push(layout.parse_row(&record, line)?);
    }
    if households.is_empty() {
        return Err(IoError::Empty);
    }

    let sources = layout
        .sources
        .iter()
        .map(|(name, _)| SourceId::new(name.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Dataset::with_options(sources, households, options)?)
}

/// Column positions resolved from the header row.
struct Layout {
    id: usize,
    district: Option<usize>,
    stratum: Option<usize>,
    weight: Option<usize>,
    /// Source name and its column index; canonical sources first, then
    /// extra `*_income` columns in header order.
    sources: Vec<(String, usize)>,
}

impl Layout {
    fn from_headers(headers: &csv::StringRecord) -> Result<Self, IoError> {
        let mut id = None;
        let mut district = None;
        let mut stratum = None;
        let mut weight = None;
        let mut income_columns: Vec<(String, usize)> = Vec::new();

        for (idx, name) in headers.iter().enumerate() {
            let slot = match name {
                ID_COLUMN => &mut id,
                DISTRICT_COLUMN => &mut district,
                STRATUM_COLUMN => &mut stratum,
                WEIGHT_COLUMN => &mut weight,
                _ => {
                    if let Some(source) = name.strip_suffix(INCOME_SUFFIX) {
                        if source == "total" {
                            return Err(IoError::ReservedColumn(name.to_string()));
                        }
                        if !source.is_empty() {
                            if income_columns.iter().any(|(s, _)| s == source) {
                                return Err(IoError::DuplicateColumn(name.to_string()));
                            }
                            income_columns.push((source.to_string(), idx));
                        }
                    }
                    continue;
                }
            };
            if slot.replace(idx).is_some() {
                return Err(IoError::DuplicateColumn(name.to_string()));
            }
        }

        let id = id.ok_or_else(|| IoError::MissingColumn(ID_COLUMN.to_string()))?;
        let mut sources = Vec::with_capacity(income_columns.len());
        for required in REQUIRED_SOURCES {
            match income_columns.iter().position(|(s, _)| s == required) {
                Some(pos) => sources.push(income_columns.remove(pos)),
                None => return Err(IoError::MissingColumn(format!("{required}{INCOME_SUFFIX}"))),
            }
        }
        sources.extend(income_columns);

        Ok(Self {
            id,
            district,
            stratum,
            weight,
            sources,
        })
    }

    fn parse_row(&self, record: &csv::StringRecord, line: u64) -> Result<HouseholdRecord, IoError> {
        let field = |idx: usize| record.get(idx).unwrap_or("");

        let id = field(self.id);
        if id.is_empty() {
            return Err(IoError::MissingValue {
                line,
                column: ID_COLUMN.to_string(),
            });
        }

        let mut incomes = BTreeMap::new();
        for (name, idx) in &self.sources {
            let column = format!("{name}{INCOME_SUFFIX}");
            let raw = field(*idx);
            if raw.is_empty() {
                return Err(IoError::MissingValue { line, column });
            }
            let value: f64 = raw.parse().map_err(|_| IoError::BadNumber {
                line,
                column,
                value: raw.to_string(),
            })?;
            incomes.insert(SourceId::new(name.clone())?, value);
        }

        let mut household = HouseholdRecord::new(id, incomes);
        if let Some(idx) = self.district {
            let raw = field(idx);
            if !raw.is_empty() {
                household = household.with_district(raw);
            }
        }
        if let Some(idx) = self.stratum {
            let raw = field(idx);
            if !raw.is_empty() {
                household = household.with_stratum(raw);
            }
        }
        if let Some(idx) = self.weight {
            let raw = field(idx);
            if raw.is_empty() {
                return Err(IoError::MissingValue {
                    line,
                    column: WEIGHT_COLUMN.to_string(),
                });
            }
            let weight: f64 = raw.parse().map_err(|_| IoError::BadNumber {
                line,
                column: WEIGHT_COLUMN.to_string(),
                value: raw.to_string(),
            })?;
            household = household.with_weight(weight);
        }
        Ok(household)
    }
}

/// Render a dataset as CSV text in the input schema.
pub fn dataset_to_csv(data: &Dataset) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());

    let mut header: Vec<String> = vec![
        ID_COLUMN.to_string(),
        DISTRICT_COLUMN.to_string(),
        STRATUM_COLUMN.to_string(),
    ];
    header.extend(data.sources().iter().map(|s| format!("{s}{INCOME_SUFFIX}")));
    header.push(WEIGHT_COLUMN.to_string());
    writer.write_record(&header).expect("vec writer");

    for household in data.households() {
        let mut row: Vec<String> = vec![
            household.id.clone(),
            household.district.clone(),
            household.stratum.clone(),
        ];
        for source in data.sources() {
            row.push(household.incomes[source].to_string());
        }
        row.push(household.weight.to_string());
        writer.write_record(&row).expect("vec writer");
    }

    let bytes = writer.into_inner().expect("vec writer");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

/// Write a dataset to a CSV file.
pub fn write_dataset(path: &Path, data: &Dataset) -> Result<(), IoError> {
    fs::write(path, dataset_to_csv(data)).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Dataset, IoError> {
        parse_csv(text, DatasetOptions::default())
    }

    #[test]
    fn parses_minimal_schema() {
        let data = parse(
            "household_id,farm_income,nonfarm_income,transfer_income\n\
             h1,350,400,0\n\
             h2,700,0,10\n",
        )
        .unwrap();
        assert_eq!(data.len(), 2);
        assert_eq!(data.totals(), vec![750.0, 710.0]);
        assert_eq!(data.weights(), vec![1.0, 1.0]);
        assert_eq!(data.households()[0].district, "unspecified");
    }

    #[test]
    fn parses_optional_columns_in_any_order() {
        let data = parse(
            "weight,transfer_income,household_id,district,farm_income,stratum,nonfarm_income\n\
             2.5,10,h1,Sik,350,paddy,400\n",
        )
        .unwrap();
        let h = &data.households()[0];
        assert_eq!(h.weight, 2.5);
        assert_eq!(h.district, "Sik");
        assert_eq!(h.stratum, "paddy");
        assert_eq!(data.totals(), vec![760.0]);
    }

    #[test]
    fn extra_income_column_registers_a_source() {
        let data = parse(
            "household_id,farm_income,nonfarm_income,transfer_income,fishing_income\n\
             h1,350,400,0,25\n",
        )
        .unwrap();
        let names: Vec<&str> = data.sources().iter().map(|s| s.as_str()).collect();
        assert_eq!(names, ["farm", "nonfarm", "transfer", "fishing"]);
        assert_eq!(data.totals(), vec![775.0]);
    }

    #[test]
    fn total_income_column_is_rejected() {
        let err = parse(
            "household_id,farm_income,nonfarm_income,transfer_income,total_income\n\
             h1,350,400,0,750\n",
        )
        .unwrap_err();
        assert!(matches!(err, IoError::ReservedColumn(ref c) if c == "total_income"));
    }

    #[test]
    fn unrecognized_columns_are_ignored() {
        let data = parse(
            "household_id,farm_income,nonfarm_income,transfer_income,notes\n\
             h1,350,400,0,checked twice\n",
        )
        .unwrap();
        assert_eq!(data.totals(), vec![750.0]);
    }

    #[test]
    fn missing_required_column_is_named() {
        let err = parse("household_id,farm_income,transfer_income\nh1,1,2\n").unwrap_err();
        assert!(matches!(err, IoError::MissingColumn(ref c) if c == "nonfarm_income"));
    }

    #[test]
    fn bad_number_reports_line_and_column() {
        let err = parse(
            "household_id,farm_income,nonfarm_income,transfer_income\n\
             h1,350,400,0\n\
             h2,abc,0,0\n",
        )
        .unwrap_err();
        match err {
            IoError::BadNumber {
                line,
                column,
                value,
            } => {
                assert_eq!(line, 3);
                assert_eq!(column, "farm_income");
                assert_eq!(value, "abc");
            }
            other => panic!("expected BadNumber, got {other}"),
        }
    }

    #[test]
    fn empty_income_field_reports_line_and_column() {
        let err = parse(
            "household_id,farm_income,nonfarm_income,transfer_income\n\
             h1,350,,0\n",
        )
        .unwrap_err();
        match err {
            IoError::MissingValue { line, column } => {
                assert_eq!(line, 2);
                assert_eq!(column, "nonfarm_income");
            }
            other => panic!("expected MissingValue, got {other}"),
        }
    }

    #[test]
    fn duplicate_household_id_is_rejected() {
        let err = parse(
            "household_id,farm_income,nonfarm_income,transfer_income\n\
             h1,350,400,0\n\
             h1,700,0,10\n",
        )
        .unwrap_err();
        assert!(matches!(
            err,
            IoError::Model(ModelError::DuplicateId { .. })
        ));
    }

    #[test]
    fn negative_amounts_need_opt_in() {
        let text = "household_id,farm_income,nonfarm_income,transfer_income\n\
                    h1,-50,400,0\n";
        assert!(matches!(
            parse(text),
            Err(IoError::Model(ModelError::NegativeAmount { .. }))
        ));
        let options = DatasetOptions {
            allow_negative: true,
            ..DatasetOptions::default()
        };
        let data = parse_csv(text, options).unwrap();
        assert_eq!(data.totals(), vec![350.0]);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(parse(""), Err(IoError::Empty)));
        assert!(matches!(
            parse("household_id,farm_income,nonfarm_income,transfer_income\n"),
            Err(IoError::Empty)
        ));
    }

    #[test]
    fn round_trip_preserves_every_bit() {
        let text = "household_id,farm_income,nonfarm_income,transfer_income,weight\n\
                    h1,350.125,400.0625,0,1\n\
                    h2,0.1,0.2,0.30000000000000004,2.5\n";
        let first = parse(text).unwrap();
        let rendered = dataset_to_csv(&first);
        let second = parse(&rendered).unwrap();
        assert_eq!(first, second);
        assert_eq!(rendered, dataset_to_csv(&second));
    }
}
