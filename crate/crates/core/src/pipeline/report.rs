use std::fmt::Write as _;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::refute::{RefutationResult, RefuteMethod};

/// One estimate and its refutations, flattened; the CSV twin of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub label: String,
    pub treatment: String,
    pub outcome: String,
    pub strategy: String,
    pub ate: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_value: f64,
    pub n: usize,
    pub random_common_cause_effect: Option<f64>,
    pub random_common_cause_p: Option<f64>,
    pub placebo_treatment_effect: Option<f64>,
    pub placebo_treatment_p: Option<f64>,
    pub data_subset_effect: Option<f64>,
    pub data_subset_p: Option<f64>,
    pub aggregate_confidence: Option<f64>,
}

impl SummaryRow {
    pub fn set_refutation(&mut self, r: &RefutationResult) {
        let (e, p) = match r.method {
            RefuteMethod::RandomCommonCause => (&mut self.random_common_cause_effect, &mut self.random_common_cause_p),
            RefuteMethod::PlaceboTreatment => (&mut self.placebo_treatment_effect, &mut self.placebo_treatment_p),
            RefuteMethod::DataSubset => (&mut self.data_subset_effect, &mut self.data_subset_p),
        };
        *e = Some(r.new_effect);
        *p = Some(r.p_value);
    }
}

pub fn write_summary_csv(rows: &[SummaryRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}

pub fn read_summary_csv<R: Read>(reader: R) -> Result<Vec<SummaryRow>, csv::Error> {
    csv::Reader::from_reader(reader).deserialize().collect()
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.prec$}"))
}

/// Aligned text table, one line per row.
pub fn render_summary_table(rows: &[SummaryRow]) -> String {
    let header = [
        "Model",
        "Relation",
        "Strategy",
        "ATE",
        "Std.err",
        "p",
        "Placebo",
        "RCC",
        "Subset",
        "Confidence",
    ];
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.label.clone(),
                format!("{} -> {}", r.treatment, r.outcome),
                r.strategy.clone(),
                format!("{:.4}", r.ate),
                format!("{:.4}", r.se),
                format!("{:.3}", r.p_value),
                opt(r.placebo_treatment_p, 3),
                opt(r.random_common_cause_p, 3),
                opt(r.data_subset_p, 3),
                opt(r.aggregate_confidence, 3),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in &body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &[String]| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 1 {
                let _ = write!(s, "  {cell:>w$}");
            } else if i == 1 {
                let _ = write!(s, "  {cell:<w$}");
            } else {
                let _ = write!(s, "{cell:<w$}");
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(&mut out, &header.map(String::from));
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    line(&mut out, &rule);
    for row in &body {
        line(&mut out, row);
    }
    out
}
