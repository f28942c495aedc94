//! File formats: embedding CSVs, constraint JSON, hierarchy/model
//! persistence, metric reports, and DOT/Newick tree export.

mod csv;
mod export;
mod model;
mod report;

pub use csv::{
    load_embeddings_csv, read_embeddings_header, save_embeddings_csv, save_predictions_csv,
    EmbeddingFileHeader,
};
pub use export::{export_dot, export_newick};
pub use model::{
    load_constraints, load_hierarchy, load_truth, save_constraints, save_hierarchy, save_truth,
    SavedModel,
};
pub use report::{render_report_text, write_report, ReportFormat};
