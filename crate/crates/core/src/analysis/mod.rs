//! Regime oracle, exponent calculator, weak-form residuals and ensemble
//! moment diagnostics.

mod moments;
mod regime;
mod weak;

pub use moments::{moment_estimate, MomentReport, ResolutionCheck, RESOLUTION_THRESHOLD};
pub use regime::{
    admissible_exponents, alpha0, regime_classify, CertificateExponents, Clause, ExponentRecord, RegimeCertificate,
    RegimeQuery, Verdict, Verdicts,
};
pub use weak::{weak_form_residual, weak_form_residual_series};
