//! Exact ϖ-adic arithmetic in towers of local fields, the valuation calculus
//! of canonical subgroups of Lubin-Tate type, and certified spectral theory
//! of compact operator families.

pub mod analytic;
pub mod canonical;
pub mod element;
pub mod error;
pub mod fp;
pub mod gauss;
pub mod ground;
pub mod polygon;
mod ring;
pub mod spectral;
pub mod tower;
pub mod valuation;
pub mod weight;

pub use element::PadicElement;
pub use ground::Ground;
pub use error::{Error, Result};
pub use polygon::NewtonPolygon;
pub use tower::{make_tower, ExtensionStep, ExtensionTower, KummerBase};
pub use valuation::{Rational, Valuation};
