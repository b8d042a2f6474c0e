use thiserror::Error;

/// Which shooting arm an integration failure happened on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Left,
    Right,
}

impl std::fmt::Display for Arm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Arm::Left => "left",
            Arm::Right => "right",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("path passes within 1e-12 of the origin at s = {s}")]
    NearOrigin { s: f64 },
    #[error("step size underflow at s = {s} (h = {step:e})")]
    StepUnderflow { s: f64, step: f64 },
    #[error("integration exceeded {0} steps")]
    TooManySteps(usize),
    #[error("non-finite state at s = {s}")]
    NonFinite { s: f64 },
    #[error("decaying and growing WKB branches are indistinguishable at the seed point")]
    AmbiguousSeed,
    #[error("WKB guard violated: |Q| = {q:e} is below {guard:e}")]
    WeakSeed { q: f64, guard: f64 },
    #[error("{arm} arm: {source}")]
    Arm {
        arm: Arm,
        #[source]
        source: Box<Error>,
    },
    #[error("unsupported monomial power {0}")]
    UnsupportedPower(i64),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("ill-conditioned weight matrix (condition {0:e})")]
    SingularPencil(f64),
    #[error("degenerate eigenvalues {0} and {1}")]
    Degenerate(String, String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("logarithmic Frobenius solution at order {0}")]
    Logarithmic(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
