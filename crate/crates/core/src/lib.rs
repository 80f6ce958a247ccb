//! Integrated multi-criteria site classification.
//!
//! The library covers the full chain from raw labeled decision tables to
//! evaluated classifications:
//!
//! 1. [`dataset`] — load and validate labeled datasets organized as a
//!    two-level factor hierarchy (main factors over sub-factor columns).
//! 2. [`grey`] — derive sub-factor weights per main factor by grey
//!    relational analysis against an ideal reference sequence.
//! 3. [`aggregate`] — collapse each main factor's sub-factor matrix into a
//!    single weighted score column, assembling the ranking-score matrix.
//! 4. [`imts`] — fit one correlation-based distance model per class on the
//!    raw ranking scores and classify by least distance.
//! 5. [`metrics`] — confusion statistics, probabilistic error rates against
//!    a class-prior baseline, and stratified k-fold cross-validation.
//!
//! [`fixtures`] ships the published reference tables the test suite (and the
//! CLI's `reproduce` subcommand) check the implementation against.
//!
//! # Example
//!
//! ```
//! use imts_core::{fixtures, imts};
//!
//! let scores = fixtures::table6_scores();
//! let models = imts::fit_all_classes(&scores, imts::InversionPolicy::PseudoInverse)?;
//! let predicted = imts::classify(&models, "candidate", &scores.row(0))?;
//! assert_eq!(predicted.predicted, "paddy");
//! # Ok::<(), imts_core::Error>(())
//! ```

pub mod aggregate;
pub mod dataset;
pub mod error;
pub mod fixtures;
pub mod grey;
pub mod imts;
pub mod metrics;

pub use error::{Error, ErrorFamily, Result};

/// Render a float with a fixed number of decimals, normalizing negative
/// zero so artifacts never contain `-0.000000`.
pub fn fmt_fixed(value: f64, decimals: usize) -> String {
    let text = format!("{value:.decimals$}");
    if text.starts_with('-') && text[1..].bytes().all(|b| b == b'0' || b == b'.') {
        text[1..].to_string()
    } else {
        text
    }
}
