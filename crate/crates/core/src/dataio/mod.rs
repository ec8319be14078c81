//! Dataset ingestion and preprocessing.

mod preprocess;
mod text;

pub use preprocess::{
    fit_pca, fit_scaler, PcaReducer, PcaSettings, Preprocessor, ScaleMode, ScalerParams,
};
pub use text::{
    format_csv, format_libsvm, format_metadata, parse_csv, parse_label, parse_labeled_csv,
    parse_libsvm, parse_metadata, read_csv, read_csv_table, read_libsvm, read_metadata, write_csv,
    write_libsvm, write_metadata, CsvTable, LabelColumn,
};
