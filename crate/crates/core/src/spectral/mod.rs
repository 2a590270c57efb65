//! Certified-compact operator families over a weight disk, their Fredholm
//! series and slopes, and a small eigencurve builder.

pub mod eigencurve;
pub mod family;
pub mod fredholm;

use crate::valuation::{int, Rational, Valuation};

pub use eigencurve::{deform_eigenform, eigencurve_points, Branch, EigenPoint, SpectralReport};
pub use family::{certify_compact, Certificate, Normalization, OperatorFamily, Rejection, TailBound};
pub use fredholm::{fredholm_series, fredholm_series_symbolic, newton_slopes, riesz_dimension, FredholmSeries, SlopeSet};

/// `slope < k − e f`; an infinite slope is never classical.
pub fn classicality_check(slope: Valuation, k: i64, e: i64, f: i64) -> bool {
    slope < Valuation::Finite(int(k - e * f))
}

/// Rational slope convenience wrapper.
pub fn is_classical(slope: Rational, k: i64, e: i64, f: i64) -> bool {
    classicality_check(Valuation::Finite(slope), k, e, f)
}
