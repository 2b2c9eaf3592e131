use thiserror::Error;

/// Error type shared by the whole engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MathError {
    #[error("the defining element is a square in the base field")]
    SquareDefect,
    #[error("precision {have} is below the required {need} base-field digits")]
    PrecisionTooLow { have: u32, need: u32 },
    #[error("operation is only defined for ramified extensions")]
    UnramifiedCase,
    #[error("zero input where a nonzero element is required")]
    ZeroInput,
    #[error("enumeration depth {depth} exceeds the precision budget {budget}")]
    DepthExceedsPrecision { depth: u32, budget: u32 },
    #[error("no measure formula for this extension case")]
    UnknownCase,
    #[error("formula does not apply to this extension case")]
    WrongCase,
    #[error("division by a structurally zero denominator")]
    DivisionByZero,
    #[error("denominator vanishes at the evaluation point")]
    PoleAtPoint,
    #[error("matrix is singular at the working precision")]
    SingularMatrix,
    #[error("invariants match {0} table entries; classification refused to guess")]
    AmbiguousClass(usize),
    #[error("representative is not in the table for this extension")]
    RepNotInTable,
    #[error("element is not invertible at the working precision")]
    NotInvertible,
    #[error("malformed element or matrix literal: {0}")]
    Parse(String),
}
