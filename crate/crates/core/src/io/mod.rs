//! File formats: GEMB matrices, CSV import, and rendered reports.

pub mod csv_import;
pub mod gemb;
pub mod report;

pub use csv_import::import_csv;
pub use gemb::{
    decode_gemb, encode_gemb, read_gemb, read_gemb_file, write_gemb, write_gemb_file, FormatError,
    GembData, GembKind,
};
pub use report::{render_report, ModelRow, ReportFormat};
