//! Metrics report output: JSON for machines, a fixed-order table for humans.

use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::report::MetricsReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "text" => Ok(ReportFormat::Text),
            other => Err(crate::error::Error::invalid_argument(format!(
                "unknown report format {other:?} (expected json or text)"
            ))),
        }
    }
}

/// The fixed-order human-readable table. Scalar metrics first, then the
/// sample counts, then per-class CCC entries in label order.
pub fn render_report_text(report: &MetricsReport) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        out.push_str(&format!("{k:<18} {v}\n"));
    };
    line("auc_roc", format!("{:.6}", report.auc_roc));
    line("precision", format!("{:.6}", report.precision));
    line("recall", format!("{:.6}", report.recall));
    line("f1", format!("{:.6}", report.f1));
    line("utility", format!("{:.6}", report.utility));
    line("utility_literal", format!("{:.6}", report.utility_literal));
    line("mean_ccc", format!("{:.6}", report.mean_ccc));
    line("youden_threshold", format!("{:.6}", report.youden.threshold));
    line("youden_j", format!("{:.6}", report.youden.j));
    line("youden_f1", format!("{:.6}", report.youden.f1));
    line("known_samples", report.counts.known_samples.to_string());
    line("unseen_samples", report.counts.unseen_samples.to_string());
    line("known_classes", report.counts.known_classes.to_string());
    line("unseen_classes", report.counts.unseen_classes.to_string());
    out.push_str("per_class_ccc:\n");
    for (label, entry) in &report.per_class_ccc {
        out.push_str(&format!(
            "  {label}  best_node={}  ccc={:.6}\n",
            entry.best_node, entry.ccc
        ));
    }
    out.push_str(&format!("roc_points         {}\n", report.roc_points.len()));
    out
}

/// Write the report to a file in the requested format.
pub fn write_report(
    report: &MetricsReport,
    format: ReportFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    let text = match format {
        ReportFormat::Json => {
            let mut json = serde_json::to_string_pretty(report)?;
            json.push('\n');
            json
        }
        ReportFormat::Text => render_report_text(report),
    };
    fs::write(path.as_ref(), text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{CccEntry, RocPoint, SampleCounts, YoudenOperatingPoint};
    use tempfile::tempdir;

    fn example_report() -> MetricsReport {
        MetricsReport {
            auc_roc: 1.0,
            precision: 0.75,
            recall: 1.0,
            f1: 6.0 / 7.0,
            utility: 0.9,
            utility_literal: 0.95,
            per_class_ccc: [(
                "u1".to_string(),
                CccEntry { best_node: 4, ccc: 0.875 },
            )]
            .into_iter()
            .collect(),
            mean_ccc: 0.875,
            youden: YoudenOperatingPoint {
                threshold: -0.25,
                j: 1.0,
                precision: 1.0,
                recall: 1.0,
                f1: 1.0,
            },
            roc_points: vec![
                RocPoint { threshold: None, tpr: 0.0, fpr: 0.0 },
                RocPoint { threshold: Some(0.5), tpr: 1.0, fpr: 0.0 },
                RocPoint { threshold: Some(-1.0), tpr: 1.0, fpr: 1.0 },
            ],
            counts: SampleCounts {
                known_samples: 10,
                unseen_samples: 5,
                known_classes: 4,
                unseen_classes: 1,
            },
        }
    }

    #[test]
    fn json_report_round_trips_and_names_fields() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("report.json");
        let report = example_report();
        write_report(&report, ReportFormat::Json, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"auc_roc\": 1.0"));
        let back: MetricsReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn text_report_lists_metrics_in_fixed_order() {
        let text = render_report_text(&example_report());
        let order = [
            "auc_roc",
            "precision",
            "recall",
            "f1",
            "utility",
            "utility_literal",
            "mean_ccc",
            "youden_threshold",
            "youden_j",
            "youden_f1",
            "known_samples",
            "unseen_samples",
            "known_classes",
            "unseen_classes",
            "per_class_ccc:",
        ];
        let mut last = 0;
        for key in order {
            let pos = text.find(key).unwrap_or_else(|| panic!("missing {key}"));
            assert!(pos >= last, "{key} out of order");
            last = pos;
        }
        assert!(text.contains("u1  best_node=4  ccc=0.875000"));
    }
}
