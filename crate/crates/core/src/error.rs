use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("state ({x}, {y}) lies outside the model domain")]
    Domain { x: f64, y: f64 },

    #[error("control {u} outside [0, 1]")]
    InvalidControl { u: f64 },

    #[error("step size underflow at t = {t} (h = {h})")]
    Stiffness { t: f64, h: f64 },

    #[error("no sign change of f2 along y = {y}")]
    NoBracket { y: f64 },

    #[error("no sign change of the function on [{a}, {b}]")]
    RootNotBracketed { a: f64, b: f64 },

    #[error("initial state ({x}, {y}) is not in D+ (f2 = {f2})")]
    NotInDPlus { x: f64, y: f64, f2: f64 },

    #[error("level {level} outside [{lo}, {hi}]")]
    OutOfRange { level: f64, lo: f64, hi: f64 },

    #[error("quadrature on [{a}, {b}] did not converge (estimate {estimate}, error {error})")]
    QuadratureFailure { a: f64, b: f64, estimate: f64, error: f64 },

    #[error("delta vanishes or changes sign near ({x}, {y})")]
    SingularDelta { x: f64, y: f64 },

    #[error("g2 vanishes on the singular arc at x = {x}")]
    G2Zero { x: f64 },

    #[error("grad f2 · g vanishes at ({x}, {y})")]
    DegenerateGradient { x: f64, y: f64 },

    #[error("state ({x}, {y}) is not on the switching curve (f2 = {f2})")]
    NotOnSwitchingCurve { x: f64, y: f64, f2: f64 },

    #[error("no grid point lies in D+")]
    EmptyRegion,

    #[error("horizon {horizon} reached before the switching curve")]
    HorizonReached { horizon: f64 },

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("model `{model}` needs parameter `{param}`")]
    MissingParam { model: String, param: String },

    #[error("model `{model}` has no parameter `{param}`")]
    UnknownParam { model: String, param: String },

    #[error("parameter `{param}` = {value} is out of range ({reason})")]
    InvalidParam { param: String, value: f64, reason: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}
