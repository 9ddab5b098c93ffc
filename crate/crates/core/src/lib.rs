//! Correlations of bounded multiplicative functions at desk scale.
//!
//! A segmented factor sieve feeds logarithmically weighted scans over integer
//! windows; the Dickmann function supplies the limiting densities those scans
//! are compared against.

pub mod charsum;
pub mod config;
pub mod correlate;
pub mod dickmann;
pub mod error;
pub mod experiments;
pub mod multfunc;
pub mod quadrature;
pub mod scalar;
pub mod scan;
pub mod sieve;

pub use error::{Error, Result};
pub use multfunc::MultFuncSpec;
pub use sieve::{FactorSieve, FactoredSegment, Factorization, SieveRequest};

pub type RhoTable = dickmann::RhoTable<f64>;
pub type RhoTableF32 = dickmann::RhoTable<f32>;
pub type GaussLegendre = quadrature::GaussLegendre<f64>;
pub type GaussLegendreF32 = quadrature::GaussLegendre<f32>;
pub type Integral = dickmann::Integral<f64>;
pub type IntegralRequest = dickmann::IntegralRequest<f64>;
