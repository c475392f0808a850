use num_complex::Complex64;
use thiserror::Error;

use crate::constructor::AdmissibilityReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("pole at z = {0}")]
    PoleAt(Complex64),
    #[error("division by zero in jet arithmetic")]
    DivisionByZero,
    #[error("power or logarithm of non-positive value {0}")]
    NonPositiveBase(Complex64),
    #[error("function is identically zero")]
    IdenticallyZero,
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("metric factor is not positive at z = {0}")]
    NonPositiveMetric(Complex64),
    #[error("metric is not compatible with the chart at infinity: {0}")]
    IncompatibleMetric(String),
    #[error("the origin has no image under the chart transition")]
    OriginHasNoImage,
    #[error("non-finite integrand sample at node {0}")]
    NonFiniteSample(usize),
    #[error("point {0} is outside the chart overlap 0.5 <= |z| <= 2")]
    OutsideOverlap(Complex64),
    #[error("point {0} is too close to the zero set of the component")]
    TooCloseToZeroSet(Complex64),
    #[error("spinor magnitude {value:e} at node {node} exceeds the bound {bound:e}")]
    UnboundedSpinor { node: usize, value: f64, bound: f64 },
    #[error("too many excluded nodes: {excluded} of {total}")]
    TooManyExclusions { excluded: usize, total: usize },
    #[error("map is constant")]
    ConstantMap,
    #[error("pole conditions violated")]
    Inadmissible(Box<AdmissibilityReport>),
    #[error("a constant map only admits the zero spinor")]
    ConstantMapWithNonzeroSpinor,
    #[error("function vanishes on the winding contour")]
    ZeroOnContour,
    #[error("winding number {0} is not within 0.1 of an integer")]
    NonIntegralWinding(f64),
    #[error("candidate zeros at {0} and {1} are closer than twice the refine radius")]
    UnresolvedCluster(Complex64, Complex64),
    #[error("basis is numerically singular (smallest singular value {0:e})")]
    SingularBasis(f64),
    #[error("no spectral gap of ratio >= {required:e} (best {best:e})")]
    NoSpectralGap { required: f64, best: f64 },
    #[error("map is degenerate: {0}")]
    DegenerateMap(String),
    #[error("parameter {index} = {value:e} is outside the box")]
    ParameterOutOfBox { index: usize, value: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
