//! Embedding CSV ingestion and export.
//!
//! Layout: a header row `sample_id,<label column>,f0,...,f{d-1}` followed by
//! one row per sample. Features must be finite; ragged rows and non-numeric
//! features are rejected with the offending line number.

use std::path::Path;

use crate::classify::ClassificationResult;
use crate::dataset::{Dataset, LabeledSample};
use crate::embedding::EmbeddingVector;
use crate::error::{Error, Result};
use crate::hierarchy::Hierarchy;

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingFileHeader {
    pub dimension: usize,
    pub sample_count: usize,
    pub label_column: String,
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn csv_line(err: &csv::Error) -> u64 {
    err.position().map(|p| p.line()).unwrap_or(0)
}

fn validate_header(path: &Path, headers: &csv::StringRecord) -> Result<String> {
    if headers.len() < 3 {
        return Err(parse_error(
            path,
            1,
            format!(
                "header must be sample_id,<label>,f0,... (got {} columns)",
                headers.len()
            ),
        ));
    }
    if headers.get(0) != Some("sample_id") {
        return Err(parse_error(
            path,
            1,
            format!("first column must be sample_id, got {:?}", headers.get(0)),
        ));
    }
    for (i, name) in headers.iter().skip(2).enumerate() {
        let expect = format!("f{i}");
        if name != expect {
            return Err(parse_error(
                path,
                1,
                format!("feature column {} must be named {expect}, got {name}", i + 2),
            ));
        }
    }
    Ok(headers.get(1).unwrap_or("label").to_string())
}

/// Read just the header and row count without materializing the samples.
pub fn read_embeddings_header(path: impl AsRef<Path>) -> Result<EmbeddingFileHeader> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| parse_error(path, csv_line(&e), e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| parse_error(path, csv_line(&e), e.to_string()))?
        .clone();
    let label_column = validate_header(path, &headers)?;
    let dimension = headers.len() - 2;
    let mut sample_count = 0usize;
    for record in reader.records() {
        record.map_err(|e| parse_error(path, csv_line(&e), e.to_string()))?;
        sample_count += 1;
    }
    Ok(EmbeddingFileHeader {
        dimension,
        sample_count,
        label_column,
    })
}

/// Load a dataset from CSV; the dimension is inferred from the header.
pub fn load_embeddings_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| parse_error(path, csv_line(&e), e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| parse_error(path, csv_line(&e), e.to_string()))?
        .clone();
    validate_header(path, &headers)?;
    let dimension = headers.len() - 2;

    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_error(path, csv_line(&e), e.to_string()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let sample_id = record
            .get(0)
            .ok_or_else(|| parse_error(path, line, "missing sample_id"))?;
        let label = record
            .get(1)
            .ok_or_else(|| parse_error(path, line, "missing label"))?;
        let mut values = Vec::with_capacity(dimension);
        for (i, field) in record.iter().skip(2).enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                parse_error(path, line, format!("non-numeric feature f{i}: {field:?}"))
            })?;
            if !value.is_finite() {
                return Err(parse_error(
                    path,
                    line,
                    format!("feature f{i} is not finite: {field}"),
                ));
            }
            values.push(value);
        }
        samples.push(LabeledSample::new(
            sample_id,
            label,
            EmbeddingVector::new(values)
                .map_err(|e| parse_error(path, line, e.to_string()))?,
        ));
    }
    Dataset::new(samples, dimension)
}

/// Write a dataset as CSV. Floats use shortest round-trip formatting, so a
/// save/load cycle reproduces the dataset exactly.
pub fn save_embeddings_csv(path: impl AsRef<Path>, dataset: &Dataset) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["sample_id".to_string(), "label".to_string()];
    header.extend((0..dataset.dimension()).map(|i| format!("f{i}")));
    writer.write_record(&header)?;
    for sample in dataset.samples() {
        let mut row = vec![sample.sample_id.clone(), sample.label.clone()];
        row.extend(sample.embedding.values().iter().map(|v| v.to_string()));
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Write classification results as CSV: one row per sample with the
/// predicted node, its class when it is a leaf, and the root-to-node path.
pub fn save_predictions_csv(
    path: impl AsRef<Path>,
    results: &[ClassificationResult],
    hierarchy: &Hierarchy,
) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    writer.write_record([
        "sample_id",
        "true_label",
        "predicted_node",
        "predicted_class",
        "is_leaf",
        "knownness_score",
        "path",
    ])?;
    for r in results {
        let predicted_class = hierarchy
            .node(r.predicted_node)?
            .leaf_class
            .clone()
            .unwrap_or_default();
        let path_text: Vec<String> = r.path.iter().map(|id| id.to_string()).collect();
        writer.write_record([
            r.sample_id.as_str(),
            r.true_label.as_deref().unwrap_or(""),
            &r.predicted_node.to_string(),
            &predicted_class,
            &r.is_leaf_prediction.to_string(),
            &r.knownness_score.to_string(),
            &path_text.join("/"),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;
    use tempfile::tempdir;

    fn write_file(dir: &tempfile::TempDir, name: &str, contents: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        path
    }

    #[test]
    fn loads_a_small_file() {
        let dir = tempdir().unwrap();
        let path = write_file(
            &dir,
            "ok.csv",
            "sample_id,label,f0,f1\ns1,cat,0.5,1.5\ns2,dog,-1,2e3\n",
        );
        let ds = load_embeddings_csv(&path).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.dimension(), 2);
        assert_eq!(ds.samples()[1].embedding.values(), &[-1.0, 2000.0]);

        let header = read_embeddings_header(&path).unwrap();
        assert_eq!(header.dimension, 2);
        assert_eq!(header.sample_count, 2);
        assert_eq!(header.label_column, "label");
    }

    #[test]
    fn rejects_nan_naming_the_line() {
        let dir = tempdir().unwrap();
        let path = write_file(
            &dir,
            "nan.csv",
            "sample_id,label,f0,f1\ns1,cat,0.5,1.5\ns2,dog,NaN,2\n",
        );
        let err = load_embeddings_csv(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(":3:"), "{msg}");
        assert!(msg.contains("f0"), "{msg}");
    }

    #[test]
    fn rejects_ragged_rows_and_bad_headers() {
        let dir = tempdir().unwrap();
        let ragged = write_file(
            &dir,
            "ragged.csv",
            "sample_id,label,f0,f1\ns1,cat,0.5\n",
        );
        let err = load_embeddings_csv(&ragged).unwrap_err();
        assert!(err.to_string().contains("2"), "{err}");

        let bad_header = write_file(&dir, "hdr.csv", "id,label,f0\ns1,cat,0.5\n");
        assert!(load_embeddings_csv(&bad_header).is_err());

        let bad_feature = write_file(&dir, "feat.csv", "sample_id,label,g0\ns1,cat,0.5\n");
        assert!(load_embeddings_csv(&bad_feature).is_err());

        let non_numeric = write_file(
            &dir,
            "text.csv",
            "sample_id,label,f0\ns1,cat,abc\n",
        );
        let err = load_embeddings_csv(&non_numeric).unwrap_err();
        assert!(err.to_string().contains("non-numeric"), "{err}");

        assert!(load_embeddings_csv(dir.path().join("missing.csv")).is_err());
    }

    #[test]
    fn predictions_csv_has_one_row_per_sample() {
        use crate::classify::{classify_batch, ClassifierConfig};
        use crate::cluster::{build_hierarchy, compute_class_embeddings, ConstraintSet};
        use crate::models::fit_node_models;

        let dir = tempdir().unwrap();
        let out = crate::synth::generate(&crate::synth::SynthConfig {
            samples_per_class: 4,
            ..crate::synth::SynthConfig::new(3, 1, 4)
        })
        .unwrap();
        let embeddings = compute_class_embeddings(&out.dataset).unwrap();
        let (hierarchy, _) = build_hierarchy(
            &embeddings,
            &ConstraintSet::empty(),
            &crate::cluster::ClusteringConfig::default(),
        )
        .unwrap();
        let models = fit_node_models(&hierarchy, &out.dataset, 95.0).unwrap();
        let results = classify_batch(
            out.dataset.samples(),
            &hierarchy,
            &models,
            &ClassifierConfig::default(),
        )
        .unwrap();
        let path = dir.path().join("predictions.csv");
        save_predictions_csv(&path, &results, &hierarchy).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), out.dataset.len() + 1);
        assert!(text.starts_with("sample_id,true_label,predicted_node"));
    }

    #[test]
    fn save_then_load_round_trips_exactly() {
        let dir = tempdir().unwrap();
        let ds = crate::synth::generate(&crate::synth::SynthConfig {
            samples_per_class: 5,
            ..crate::synth::SynthConfig::new(3, 1, 6)
        })
        .unwrap()
        .dataset;
        let path = dir.path().join("round.csv");
        save_embeddings_csv(&path, &ds).unwrap();
        let back = load_embeddings_csv(&path).unwrap();
        assert_eq!(ds, back);
    }
}
