use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("central charge value {0} is outside the upper half plane and negative real axis")]
    InvalidCharge(String),

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("the zero object has no phase or mass")]
    ZeroObject,

    #[error("object {0} is not semistable")]
    NotSemistable(String),

    #[error("phases differ: {0}")]
    PhaseMismatch(String),

    #[error("phases coincide: {0}")]
    PhaseCollision(String),

    #[error("central charge is not faithful")]
    NotFaithful,

    #[error("classes {0} and {1} are not positively proportional")]
    NotProportional(String, String),

    #[error("class {0} is not spherical (Euler pairing with itself must be 2)")]
    NotSpherical(String),

    #[error("object {0} is outside the domain of the twist (shifts of O(w-1)[1] and O(w) only)")]
    OutsideTwistDomain(String),

    #[error("point {0} is not representable over F_{1}")]
    PointNotRepresentable(String, u32),

    #[error("object {0} carries a nonzero shift; matrix representations need shift 0")]
    ShiftedObject(String),

    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("maximal destabilizing subobject is not unique: {0}")]
    DestabilizerTie(String),

    #[error("unsupported regime: {0}")]
    Regime(String),
}

pub type Result<T> = std::result::Result<T, Error>;
