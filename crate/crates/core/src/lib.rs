//! Casimir pressures and forces between real metals at finite temperature.
//!
//! Core routines are generic over the scalar type (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`, with `F32` variants for
//! low-precision work.

pub mod analytic;
pub mod constants;
pub mod dielectric;
pub mod error;
pub mod lifshitz;
pub mod metrology;
pub mod model_spec;
pub mod num;
pub mod optics;
pub mod quadrature;
pub mod superconductor;

pub use error::{Error, Result, TableError};
pub use num::Real;

pub type DielectricModel = dielectric::DielectricModel<f64>;
pub type DielectricModelF32 = dielectric::DielectricModel<f32>;
pub type ZeroFreqClass = dielectric::ZeroFreqClass<f64>;
pub type OpticalTable = optics::OpticalTable<f64>;
pub type OpticalTableF32 = optics::OpticalTable<f32>;
pub type ExtrapolationPolicy = optics::ExtrapolationPolicy<f64>;
pub type SuperconductorParams = superconductor::SuperconductorParams<f64>;
pub type SuperconductorParamsF32 = superconductor::SuperconductorParams<f32>;
pub type Geometry = lifshitz::Geometry<f64>;
pub type QuadratureConfig = lifshitz::QuadratureConfig<f64>;
pub type QuadratureConfigF32 = lifshitz::QuadratureConfig<f32>;
pub type ThermalState = lifshitz::ThermalState<f64>;
pub type RoughnessSpec = analytic::RoughnessSpec<f64>;
pub type CoefficientSet = analytic::CoefficientSet<f64>;
pub type ForceCurve = metrology::ForceCurve<f64>;
pub type MeasuredSeries = metrology::MeasuredSeries<f64>;
pub type FitConfig = metrology::FitConfig<f64>;
pub type FitResult = metrology::FitResult<f64>;
pub type CurveSpec = metrology::CurveSpec<f64>;
