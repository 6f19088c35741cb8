//! Estimators over evaluated trials: selection, rates with intervals,
//! fidelities, BV metrics, tesseract pairing and RB fits, plus the summary
//! tables and plot data built from them.

pub mod bv;
pub mod cat;
pub mod rb;
pub mod selection;
pub mod stats;
pub mod tesseract;

mod report;

pub use bv::{bv_metrics, classical_baseline, BvMetrics, ClassicalBaseline};
pub use cat::{cat_fidelity, cat_fidelity_bound, CatFidelity};
pub use rb::{fit_decay, rb_analysis, FitFailure, RbAnalysis, RbCurve, RbFit};
pub use report::{analyze, combined_error, Report, SummaryRow};
pub use selection::{apply_selection, error_rate, SelectionPolicy};
pub use stats::{binomial_ci, EstimateWithCI, Z95};
pub use tesseract::{tesseract_pairing, TesseractSummary};

/// Shots of random pairing per tesseract trial.
pub const TESSERACT_SHOTS: usize = 100;
