use gpembed_core::complex::ComplexError;
use gpembed_core::fiber::FiberError;
use gpembed_core::nerve::NerveError;
use gpembed_core::perturb::{CertifyError, PerturbError};
use gpembed_core::secant::SecantError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("perturbation budget exhausted: {0}")]
    Budget(String),
    #[error("{0}")]
    ThinRegion(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) | CliError::Io { .. } => 2,
            CliError::Precondition(_) => 3,
            CliError::Budget(_) => 4,
            CliError::ThinRegion(_) => 5,
        }
    }

    pub fn io(path: &str, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_string(), source }
    }
}

impl From<ComplexError> for CliError {
    fn from(e: ComplexError) -> Self {
        match e {
            ComplexError::NonPositiveDelta | ComplexError::IterationCap { .. } => {
                CliError::Precondition(e.to_string())
            }
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<PerturbError> for CliError {
    fn from(e: PerturbError) -> Self {
        match e {
            PerturbError::Budget { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<CertifyError> for CliError {
    fn from(e: CertifyError) -> Self {
        match e {
            CertifyError::Precondition(p) => p.into(),
            CertifyError::Failed(_) => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<SecantError> for CliError {
    fn from(e: SecantError) -> Self {
        match e {
            SecantError::OnImage
            | SecantError::ExceptionalSimplex(_)
            | SecantError::ExceptionalPair(..)
            | SecantError::OutsideRegion(_)
            | SecantError::NonPositiveEpsilon
            | SecantError::NonPositiveK
            | SecantError::LineMissesBall(_) => CliError::Precondition(e.to_string()),
            SecantError::RegionTooThin { .. } => CliError::ThinRegion(e.to_string()),
            SecantError::Complex(c) => c.into(),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<NerveError> for CliError {
    fn from(e: NerveError) -> Self {
        match e {
            NerveError::NonPositiveRadius
            | NerveError::MarksTouch
            | NerveError::SeparationViolated(_)
            | NerveError::TooLarge
            | NerveError::Uncovered(_) => CliError::Precondition(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<FiberError> for CliError {
    fn from(e: FiberError) -> Self {
        let text = e.to_string();
        let inner = match e {
            FiberError::NonPositiveEta => return CliError::Precondition(text),
            FiberError::Complex { source, .. } => CliError::from(source),
            FiberError::Perturb { source, .. } => CliError::from(source),
            FiberError::Secant { source, .. } => CliError::from(source),
            _ => return CliError::Invalid(text),
        };
        match inner {
            CliError::Invalid(_) => CliError::Invalid(text),
            CliError::Precondition(_) => CliError::Precondition(text),
            CliError::Budget(_) => CliError::Budget(text),
            CliError::ThinRegion(_) => CliError::ThinRegion(text),
            io => io,
        }
    }
}
