use thiserror::Error;

/// Errors raised while parsing an optical-constants table.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableError {
    #[error("line {line}: malformed numeric field `{field}`")]
    Malformed { line: usize, field: String },
    #[error("line {line}: expected 3 columns (E_eV n k), found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: photon energy {energy} eV is not strictly increasing")]
    NonMonotonic { line: usize, energy: f64 },
    #[error("line {line}: photon energy must be positive, got {energy} eV")]
    NonPositiveEnergy { line: usize, energy: f64 },
    #[error("line {line}: negative optical constant {name} = {value}")]
    Negative {
        line: usize,
        name: &'static str,
        value: f64,
    },
    #[error("line {line}: refractive index n must be positive")]
    ZeroIndex { line: usize },
    #[error("too few rows: {found} (at least {min} required)")]
    TooFewRows { found: usize, min: usize },
    #[error("input is not valid UTF-8")]
    Encoding,
    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("ideal metal has no finite permittivity; use the ideal-metal reflection short-circuit")]
    IdealMetalPermittivity,
    #[error("frequency {omega} rad/s outside table range [{min}, {max}]")]
    OutOfTableRange { omega: f64, min: f64, max: f64 },
    #[error("quadrature failed to reach tolerance {tolerance:e}: estimate {estimate:e} with error {error:e}")]
    Quadrature {
        estimate: f64,
        error: f64,
        tolerance: f64,
    },
    #[error("Matsubara sum not converged after {terms} terms (relative bound {bound:e})")]
    MatsubaraConvergence { terms: usize, bound: f64 },
    #[error("normal state: temperature {t} K is not below T_c = {t_c} K")]
    NormalState { t: f64, t_c: f64 },
    #[error("proximity-force approximation invalid: a/R = {ratio} exceeds {limit}")]
    PfaValidity { ratio: f64, limit: f64 },
    #[error("zero-T Drude limit not supported")]
    ZeroTemperatureDrude,
    #[error("small-parameter domain violated: {0}")]
    Domain(String),
    #[error("roughness validity violated: sigma/a = {ratio} exceeds {limit}")]
    Roughness { ratio: f64, limit: f64 },
    #[error("empty separation grid")]
    EmptyGrid,
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("bracket [{lo:e}, {hi:e}] m does not contain a minimum (objective monotone); widen the bracket")]
    MonotoneObjective { lo: f64, hi: f64 },
    #[error("model spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Table(#[from] TableError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
