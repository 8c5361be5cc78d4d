//! Metrics and thermodynamic consistency audits.

mod consistency;
mod metrics;
mod report;

pub use consistency::{
    consistency_certificate, gd_residual, gd_residual_embedded, gibbs_duhem_msd, records_gd_msd, Certificate,
    CriterionResult, EmbeddedComponents, SampleSpec, FD_STEP, GD_TOLERANCE,
};
pub use metrics::{cumulative_fraction, histogram, median, system_mae, HistogramBin};
pub use report::{
    build_report, load_baseline, predict_records, CumulativePoint, EvaluationReport, ReportOptions, SystemScore,
};
