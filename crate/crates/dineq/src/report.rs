//! Output documents and renderers.
//!
//! Analysis results are first shaped into plain serializable documents
//! ([`FgtDoc`], [`GiniDoc`], [`ReportDoc`]) and then rendered in one of
//! three forms: an aligned text table for terminals, JSON for machines,
//! or CSV for spreadsheets. Undefined cells (degenerate sources, change
//! against a zero base) render as an em dash in tables, `null` in JSON,
//! and an empty field in CSV.

use dineq_core::{Dataset, FgtTable, GiniDecomposition};
use serde::Serialize;

const NULL_CELL: &str = "—";

/// Fixed column order of the Gini CSV form.
pub const GINI_CSV_HEADER: &str =
    "source,share,source_gini,gini_correlation,relative_contribution,marginal_effect";

/// How to render a result document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    /// Aligned human-readable table.
    Table,
    /// Pretty-printed JSON document.
    Json,
    /// Flat CSV rows.
    Csv,
}

/// Poverty-index results over counterfactual income bundles.
#[derive(Debug, Clone, Serialize)]
pub struct FgtDoc {
    pub poverty_line: f64,
    pub currency: String,
    pub period: String,
    /// Number of households.
    pub n: usize,
    /// Label of the bundle percentage changes are measured against.
    pub base_bundle: String,
    pub rows: Vec<FgtDocRow>,
}

/// One poverty index: a bundle evaluated at one aversion parameter.
#[derive(Debug, Clone, Serialize)]
pub struct FgtDocRow {
    pub alpha: f64,
    pub bundle: String,
    pub value: f64,
    /// Percentage change vs. the base bundle; `None` for the base itself
    /// and whenever the base index is zero.
    pub pct_change: Option<f64>,
}

/// By-source decomposition of the total-income Gini.
#[derive(Debug, Clone, Serialize)]
pub struct GiniDoc {
    /// Number of households.
    pub n: usize,
    pub total_gini: f64,
    /// Closure error of `Σ share · source_gini · correlation − total_gini`
    /// over the defined rows; zero up to rounding on well-formed data.
    pub residual: f64,
    pub rows: Vec<GiniDocRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GiniDocRow {
    pub source: String,
    pub share: f64,
    pub source_gini: Option<f64>,
    pub gini_correlation: Option<f64>,
    pub relative_contribution: Option<f64>,
    pub marginal_effect: Option<f64>,
}

/// Combined poverty and inequality report with a plain-language summary.
#[derive(Debug, Clone, Serialize)]
pub struct ReportDoc {
    pub fgt: FgtDoc,
    pub gini: GiniDoc,
    pub summary: ReportSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportSummary {
    /// Sources whose marginal effect is negative: growing them lowers
    /// total inequality.
    pub equalizing_sources: Vec<String>,
    /// Sources whose marginal effect is positive.
    pub disequalizing_sources: Vec<String>,
    /// Per aversion parameter, the bundle with the largest poverty drop
    /// against the base bundle.
    pub strongest_poverty_reduction: Vec<PovertyHighlight>,
    pub gini_change_from_base: GiniChange,
}

#[derive(Debug, Clone, Serialize)]
pub struct PovertyHighlight {
    pub alpha: f64,
    pub bundle: String,
    pub pct_change: f64,
}

/// Inequality of the base bundle alone against total income.
#[derive(Debug, Clone, Serialize)]
pub struct GiniChange {
    pub base_bundle: String,
    pub base_gini: f64,
    pub total_gini: f64,
    pub absolute_change: f64,
    pub relative_change_pct: f64,
}

/// Shape an FGT table into its output document.
pub fn fgt_doc(data: &Dataset, table: &FgtTable) -> FgtDoc {
    let mut rows = Vec::new();
    for row in &table.rows {
        for (i, index) in row.indices.iter().enumerate() {
            rows.push(FgtDocRow {
                alpha: row.alpha,
                bundle: table.bundles[i].clone(),
                value: index.value,
                pct_change: if i == 0 { None } else { row.pct_changes[i - 1] },
            });
        }
    }
    FgtDoc {
        poverty_line: table.line.value(),
        currency: data.currency().to_string(),
        period: data.period().to_string(),
        n: data.len(),
        base_bundle: table.bundles[0].clone(),
        rows,
    }
}

/// Shape a decomposition into its output document.
pub fn gini_doc(data: &Dataset, decomposition: &GiniDecomposition) -> GiniDoc {
    GiniDoc {
        n: data.len(),
        total_gini: decomposition.total_gini,
        residual: decomposition.residual,
        rows: decomposition
            .rows
            .iter()
            .map(|r| GiniDocRow {
                source: r.source.to_string(),
                share: r.share,
                source_gini: r.source_gini,
                gini_correlation: r.gini_correlation,
                relative_contribution: r.relative_contribution,
                marginal_effect: r.marginal_effect,
            })
            .collect(),
    }
}

/// Build the combined report document. `base_gini` is the Gini of the base
/// bundle's income alone, for the with-vs-without comparison in the summary.
pub fn report_doc(fgt: FgtDoc, gini: GiniDoc, base_gini: f64) -> ReportDoc {
    let mut equalizing = Vec::new();
    let mut disequalizing = Vec::new();
    for row in &gini.rows {
        match row.marginal_effect {
            Some(m) if m < 0.0 => equalizing.push(row.source.clone()),
            Some(m) if m > 0.0 => disequalizing.push(row.source.clone()),
            _ => {}
        }
    }

    let mut strongest = Vec::new();
    for alpha in doc_alphas(&fgt) {
        let best = fgt
            .rows
            .iter()
            .filter(|r| r.alpha == alpha)
            .filter_map(|r| r.pct_change.map(|p| (r, p)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((row, pct)) = best {
            strongest.push(PovertyHighlight {
                alpha,
                bundle: row.bundle.clone(),
                pct_change: pct,
            });
        }
    }

    let total = gini.total_gini;
    ReportDoc {
        summary: ReportSummary {
            equalizing_sources: equalizing,
            disequalizing_sources: disequalizing,
            strongest_poverty_reduction: strongest,
            gini_change_from_base: GiniChange {
                base_bundle: fgt.base_bundle.clone(),
                base_gini,
                total_gini: total,
                absolute_change: total - base_gini,
                relative_change_pct: 100.0 * (total - base_gini) / base_gini,
            },
        },
        fgt,
        gini,
    }
}

fn fmt_alpha(alpha: f64) -> String {
    if alpha.fract() == 0.0 {
        format!("{alpha:.0}")
    } else {
        format!("{alpha}")
    }
}

fn fmt_value(v: f64) -> String {
    format!("{v:.4}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_value).unwrap_or_else(|| NULL_CELL.to_string())
}

/// Align rows into columns: first column left-aligned, the rest right-aligned.
fn render_columns(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut widths = vec![0usize; columns];
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            let pad = widths[i] - cell.chars().count();
            if i == 0 {
                line.push_str(cell);
                if i + 1 < row.len() {
                    line.push_str(&" ".repeat(pad));
                }
            } else {
                line.push_str(&" ".repeat(pad));
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// Distinct alphas of an FGT document, in row order.
fn doc_alphas(doc: &FgtDoc) -> Vec<f64> {
    let mut alphas: Vec<f64> = doc.rows.iter().map(|r| r.alpha).collect();
    alphas.dedup();
    alphas
}

/// Bundle labels of an FGT document, in column order.
fn doc_bundles(doc: &FgtDoc) -> Vec<String> {
    let mut bundles = Vec::new();
    for row in &doc.rows {
        if bundles.contains(&row.bundle) {
            break;
        }
        bundles.push(row.bundle.clone());
    }
    bundles
}

fn doc_cell<'a>(doc: &'a FgtDoc, alpha: f64, bundle: &str) -> Option<&'a FgtDocRow> {
    doc.rows
        .iter()
        .find(|r| r.alpha == alpha && r.bundle == bundle)
}

/// Render an FGT document as an aligned text table.
pub fn render_fgt_table(doc: &FgtDoc) -> String {
    let bundles = doc_bundles(doc);
    let alphas = doc_alphas(doc);

    let mut out = format!(
        "Poverty indices (FGT) at line {} {} per {}, n = {}\n\n",
        doc.poverty_line, doc.currency, doc.period, doc.n
    );

    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["alpha".to_string()];
    header.extend(bundles.iter().cloned());
    rows.push(header);
    for &alpha in &alphas {
        let mut row = vec![fmt_alpha(alpha)];
        for bundle in &bundles {
            let cell = doc_cell(doc, alpha, bundle).map(|r| r.value);
            row.push(fmt_opt(cell));
        }
        rows.push(row);
    }
    out.push_str(&render_columns(&rows));

    if bundles.len() > 1 {
        out.push_str(&format!("\nChange vs {} (%)\n", doc.base_bundle));
        let mut rows: Vec<Vec<String>> = Vec::new();
        let mut header = vec!["alpha".to_string()];
        header.extend(bundles[1..].iter().cloned());
        rows.push(header);
        for &alpha in &alphas {
            let mut row = vec![fmt_alpha(alpha)];
            for bundle in &bundles[1..] {
                let cell = doc_cell(doc, alpha, bundle).and_then(|r| r.pct_change);
                row.push(fmt_opt(cell));
            }
            rows.push(row);
        }
        out.push_str(&render_columns(&rows));
    }
    out
}

/// Render an FGT document as CSV (`alpha,bundle,value,pct_change`).
pub fn render_fgt_csv(doc: &FgtDoc) -> String {
    let mut out = String::from("alpha,bundle,value,pct_change\n");
    for row in &doc.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.alpha,
            row.bundle,
            row.value,
            row.pct_change.map(|p| p.to_string()).unwrap_or_default()
        ));
    }
    out
}

/// Render a Gini document as an aligned text table.
pub fn render_gini_table(doc: &GiniDoc) -> String {
    let mut out = format!("Gini decomposition by income source, n = {}\n\n", doc.n);
    let mut rows: Vec<Vec<String>> = vec![vec![
        "source".to_string(),
        "share".to_string(),
        "source_gini".to_string(),
        "gini_correlation".to_string(),
        "relative_contribution".to_string(),
        "marginal_effect".to_string(),
    ]];
    for row in &doc.rows {
        rows.push(vec![
            row.source.clone(),
            fmt_value(row.share),
            fmt_opt(row.source_gini),
            fmt_opt(row.gini_correlation),
            fmt_opt(row.relative_contribution),
            fmt_opt(row.marginal_effect),
        ]);
    }
    rows.push(total_gini_row(doc, fmt_value, fmt_opt));
    out.push_str(&render_columns(&rows));
    out.push_str(&format!("\nresidual: {:.1e}\n", doc.residual));
    out
}

/// Render a Gini document as CSV with the fixed [`GINI_CSV_HEADER`] columns
/// and a closing total row.
pub fn render_gini_csv(doc: &GiniDoc) -> String {
    let mut out = String::from(GINI_CSV_HEADER);
    out.push('\n');
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for row in &doc.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.source,
            row.share,
            opt(row.source_gini),
            opt(row.gini_correlation),
            opt(row.relative_contribution),
            opt(row.marginal_effect),
        ));
    }
    let contribution_sum: f64 = doc
        .rows
        .iter()
        .filter_map(|r| r.relative_contribution)
        .sum();
    out.push_str(&format!(
        "total,1,{},,{},\n",
        doc.total_gini, contribution_sum
    ));
    out
}

fn total_gini_row(
    doc: &GiniDoc,
    value: impl Fn(f64) -> String,
    opt: impl Fn(Option<f64>) -> String,
) -> Vec<String> {
    let share_sum: f64 = doc.rows.iter().map(|r| r.share).sum();
    let contribution_sum: f64 = doc
        .rows
        .iter()
        .filter_map(|r| r.relative_contribution)
        .sum();
    let marginal_sum: f64 = doc.rows.iter().filter_map(|r| r.marginal_effect).sum();
    let any_defined = doc.rows.iter().any(|r| r.relative_contribution.is_some());
    vec![
        "total".to_string(),
        value(share_sum),
        value(doc.total_gini),
        opt(None),
        if any_defined {
            value(contribution_sum)
        } else {
            opt(None)
        },
        if any_defined {
            value(marginal_sum)
        } else {
            opt(None)
        },
    ]
}

/// Pretty JSON with a trailing newline.
pub fn render_json<T: Serialize>(doc: &T) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("documents serialize");
    out.push('\n');
    out
}

fn markdown_row(cells: &[String]) -> String {
    format!("| {} |\n", cells.join(" | "))
}

fn markdown_table(rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    if let Some(header) = rows.first() {
        out.push_str(&markdown_row(header));
        out.push_str(&markdown_row(
            &header.iter().map(|_| "---".to_string()).collect::<Vec<_>>(),
        ));
        for row in &rows[1..] {
            out.push_str(&markdown_row(row));
        }
    }
    out
}

/// Render the combined report as Markdown.
pub fn render_report_markdown(doc: &ReportDoc) -> String {
    let fgt = &doc.fgt;
    let gini = &doc.gini;
    let summary = &doc.summary;
    let bundles = doc_bundles(fgt);
    let alphas = doc_alphas(fgt);

    let mut out = String::from("# Poverty and inequality by income source\n\n");
    out.push_str(&format!(
        "- households: {}\n- poverty line: {} {} per {}\n- total income Gini: {}\n\n",
        fgt.n,
        fgt.poverty_line,
        fgt.currency,
        fgt.period,
        fmt_value(gini.total_gini)
    ));

    out.push_str("## Poverty indices by income bundle\n\n");
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["alpha".to_string()];
    header.extend(bundles.iter().cloned());
    rows.push(header);
    for &alpha in &alphas {
        let mut row = vec![fmt_alpha(alpha)];
        for bundle in &bundles {
            row.push(fmt_opt(doc_cell(fgt, alpha, bundle).map(|r| r.value)));
        }
        rows.push(row);
    }
    out.push_str(&markdown_table(&rows));

    if bundles.len() > 1 {
        out.push_str(&format!("\nChange vs {} (%):\n\n", fgt.base_bundle));
        let mut rows: Vec<Vec<String>> = Vec::new();
        let mut header = vec!["alpha".to_string()];
        header.extend(bundles[1..].iter().cloned());
        rows.push(header);
        for &alpha in &alphas {
            let mut row = vec![fmt_alpha(alpha)];
            for bundle in &bundles[1..] {
                row.push(fmt_opt(
                    doc_cell(fgt, alpha, bundle).and_then(|r| r.pct_change),
                ));
            }
            rows.push(row);
        }
        out.push_str(&markdown_table(&rows));
    }

    out.push_str("\n## Gini decomposition by income source\n\n");
    let mut rows: Vec<Vec<String>> = vec![vec![
        "source".to_string(),
        "share".to_string(),
        "source gini".to_string(),
        "gini correlation".to_string(),
        "relative contribution".to_string(),
        "marginal effect".to_string(),
    ]];
    for row in &gini.rows {
        rows.push(vec![
            row.source.clone(),
            fmt_value(row.share),
            fmt_opt(row.source_gini),
            fmt_opt(row.gini_correlation),
            fmt_opt(row.relative_contribution),
            fmt_opt(row.marginal_effect),
        ]);
    }
    rows.push(total_gini_row(gini, fmt_value, fmt_opt));
    out.push_str(&markdown_table(&rows));

    out.push_str("\n## Summary\n\n");
    let list = |sources: &[String]| {
        if sources.is_empty() {
            "none".to_string()
        } else {
            sources.join(", ")
        }
    };
    out.push_str(&format!(
        "- Equalizing sources (negative marginal effect): {}\n",
        list(&summary.equalizing_sources)
    ));
    out.push_str(&format!(
        "- Disequalizing sources (positive marginal effect): {}\n",
        list(&summary.disequalizing_sources)
    ));
    for highlight in &summary.strongest_poverty_reduction {
        out.push_str(&format!(
            "- Largest poverty change at alpha {}: {} ({}% vs {})\n",
            fmt_alpha(highlight.alpha),
            highlight.bundle,
            fmt_value(highlight.pct_change),
            fgt.base_bundle
        ));
    }
    let change = &summary.gini_change_from_base;
    if change.base_gini.is_finite() {
        let sign = |v: f64| if v >= 0.0 { "+" } else { "" };
        out.push_str(&format!(
            "- Gini of {} income alone is {}; with all sources it is {} \
             (change {}{}, or {}{}%)\n",
            change.base_bundle,
            fmt_value(change.base_gini),
            fmt_value(change.total_gini),
            sign(change.absolute_change),
            fmt_value(change.absolute_change),
            sign(change.relative_change_pct),
            fmt_value(change.relative_change_pct)
        ));
    }
    out
}
