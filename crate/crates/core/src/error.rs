use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("interpolation nodes coincide: {0}")]
    SingularInterpolation(String),
    #[error("evaluation hit a pole of the Blaschke product at {0}")]
    PoleHit(String),
    #[error("colligation is not unitary (defect {defect:.3e})")]
    NotUnitaryColligation { defect: f64 },
    #[error("realization is not pure: state matrix has spectral radius {radius:.6}")]
    NotPureRealization { radius: f64 },
    #[error("resolvent I - zA is singular at z = {0}")]
    ResolventSingular(String),
    #[error("cleared denominator vanishes in the closed disc (smallest root modulus {0:.6})")]
    SpuriousFactorInDisc(f64),
    #[error("matrices do not commute (commutator norm {norm:.3e})")]
    NonCommuting { norm: f64 },
    #[error("matrix is not a contraction (norm {norm:.6})")]
    NotContractive { norm: f64 },
    #[error("matrix is not pure (spectral radius {radius:.6})")]
    NotPure { radius: f64 },
    #[error("simultaneous triangularization failed after {attempts} attempts (residual {residual:.3e})")]
    TriangularizationFailed { attempts: usize, residual: f64 },
    #[error("series truncation did not converge within {max_terms} terms")]
    TruncationNotConverged { max_terms: usize },
    #[error("no inner solution found: {0}")]
    NoInnerSolution(String),
    #[error("annihilator of T1 is trivial")]
    AnnTrivial,
    #[error("spectral points cluster too closely (separation {separation:.3e})")]
    DegenerateCluster { separation: f64 },
    #[error("denominator vanishes on the sampled variety (min modulus {0:.3e})")]
    DenominatorVanishes(f64),
    #[error("symbol must be non-constant")]
    ConstantSymbol,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
