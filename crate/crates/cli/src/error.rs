//! Exit codes: 2 invalid input, 3 domain error, 4 budget or precision
//! exhausted, 1 failed verification suite.

use lacuna_core::constructions::ConstructionError;
use lacuna_core::counterexample::CounterexampleError;
use lacuna_core::distset::SetError;
use lacuna_core::exactreal::ExactError;
use lacuna_core::orbits::OrbitError;
use lacuna_core::semigroup::SemigroupError;
use lacuna_core::sumwalk::WalkError;
use serde_json::{json, Value};

use crate::wire::WireError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    SuiteFailed,
    Input,
    Domain,
    Budget,
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub severity: Severity,
    pub module: &'static str,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(severity: Severity, module: &'static str, kind: &'static str, message: impl Into<String>) -> Self {
        CliError { severity, module, kind, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError::new(Severity::Input, "cli", "Io", message)
    }

    pub fn input(kind: &'static str, message: impl Into<String>) -> Self {
        CliError::new(Severity::Input, "cli", kind, message)
    }

    pub fn exit_code(&self) -> u8 {
        match self.severity {
            Severity::SuiteFailed => 1,
            Severity::Input => 2,
            Severity::Domain => 3,
            Severity::Budget => 4,
        }
    }

    pub fn payload(&self) -> Value {
        json!({
            "module": self.module,
            "kind": self.kind,
            "message": self.message,
            "exit_code": self.exit_code(),
        })
    }
}

impl From<WireError> for CliError {
    fn from(e: WireError) -> Self {
        CliError::input("Schema", e.to_string())
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        use Severity::*;
        let (sev, kind) = match &e {
            ExactError::AmbiguousOrder { .. } => (Budget, "AmbiguousOrder"),
            ExactError::BasisMismatch => (Input, "BasisMismatch"),
            ExactError::InvalidArgument(_) => (Input, "InvalidArgument"),
            ExactError::UnknownSymbol(_) => (Input, "UnknownSymbol"),
            ExactError::InvalidBasis(_) => (Input, "InvalidBasis"),
            ExactError::Parse(_) => (Input, "Parse"),
        };
        CliError::new(sev, "exactreal", kind, e.to_string())
    }
}

impl From<SetError> for CliError {
    fn from(e: SetError) -> Self {
        use Severity::*;
        let (sev, kind) = match &e {
            SetError::Exact(x) => return x.clone().into(),
            SetError::CutoffExceeded { .. } => (Budget, "CutoffExceeded"),
            SetError::NotLocallyFinite { .. } => (Domain, "NotLocallyFinite"),
            SetError::Inconclusive { .. } => (Domain, "Inconclusive"),
            SetError::Invalid(_) => (Input, "Invalid"),
        };
        CliError::new(sev, "distset", kind, e.to_string())
    }
}

impl From<SemigroupError> for CliError {
    fn from(e: SemigroupError) -> Self {
        use Severity::*;
        let (sev, kind) = match &e {
            SemigroupError::Exact(x) => return x.clone().into(),
            SemigroupError::Set(x) => return x.clone().into(),
            SemigroupError::NotInSemigroup(_) => (Domain, "NotInSemigroup"),
            SemigroupError::NotDense { .. } => (Domain, "NotDense"),
            SemigroupError::ValidationFailed { .. } => (Domain, "ValidationFailed"),
            SemigroupError::NoCorrection { .. } => (Domain, "NoCorrection"),
            SemigroupError::GcdNotOne { .. } => (Domain, "GcdNotOne"),
            SemigroupError::Budget(_) => (Budget, "Budget"),
        };
        CliError::new(sev, "semigroup", kind, e.to_string())
    }
}

impl From<OrbitError> for CliError {
    fn from(e: OrbitError) -> Self {
        use Severity::*;
        let (sev, kind) = match &e {
            OrbitError::Exact(x) => return x.clone().into(),
            OrbitError::Set(x) => return x.clone().into(),
            OrbitError::Degenerate => (Domain, "Degenerate"),
            OrbitError::NotApplicable => (Domain, "NotApplicable"),
            OrbitError::Invalid(_) => (Input, "Invalid"),
        };
        CliError::new(sev, "orbits", kind, e.to_string())
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        use Severity::*;
        let (sev, kind) = match &e {
            WalkError::Exact(x) => return x.clone().into(),
            WalkError::Set(x) => return x.clone().into(),
            WalkError::Semigroup(x) => return x.clone().into(),
            WalkError::BudgetExceeded { .. } => (Budget, "BudgetExceeded"),
            WalkError::CutoffExceeded { .. } => (Budget, "CutoffExceeded"),
            WalkError::NotStraddling => (Domain, "NotStraddling"),
            WalkError::HypothesisViolation(_) => (Domain, "HypothesisViolation"),
            WalkError::Invalid(_) => (Input, "Invalid"),
        };
        CliError::new(sev, "sumwalk", kind, e.to_string())
    }
}

impl From<ConstructionError> for CliError {
    fn from(e: ConstructionError) -> Self {
        use Severity::*;
        let (sev, kind) = match &e {
            ConstructionError::Exact(x) => return x.clone().into(),
            ConstructionError::Set(x) => return x.clone().into(),
            ConstructionError::Semigroup(x) => return x.clone().into(),
            ConstructionError::Orbit(x) => return x.clone().into(),
            ConstructionError::Walk(x) => return x.clone().into(),
            ConstructionError::BudgetExceeded(_) => (Budget, "BudgetExceeded"),
            ConstructionError::GapsTooSmall { .. } => (Domain, "GapsTooSmall"),
            ConstructionError::GapsOutOfRange { .. } => (Domain, "GapsOutOfRange"),
            ConstructionError::WindowTooShort { .. } => (Domain, "WindowTooShort"),
            ConstructionError::NotLambdaRegular(_) => (Domain, "NotLambdaRegular"),
            ConstructionError::NotSRegular(_) => (Domain, "NotSRegular"),
            ConstructionError::NotLatticeCompatible(_) => (Domain, "NotLatticeCompatible"),
            ConstructionError::SparsenessProxyFailed(_) => (Domain, "SparsenessProxyFailed"),
            ConstructionError::NotApplicable(_) => (Domain, "NotApplicable"),
        };
        CliError::new(sev, "constructions", kind, e.to_string())
    }
}

impl From<CounterexampleError> for CliError {
    fn from(e: CounterexampleError) -> Self {
        use Severity::*;
        let (sev, kind) = match &e {
            CounterexampleError::Exact(x) => return x.clone().into(),
            CounterexampleError::Set(x) => return x.clone().into(),
            CounterexampleError::Semigroup(x) => return x.clone().into(),
            CounterexampleError::PrecisionExhausted { .. } => (Budget, "PrecisionExhausted"),
            CounterexampleError::HypothesisViolation(_) => (Domain, "HypothesisViolation"),
            CounterexampleError::Invalid(_) => (Input, "Invalid"),
        };
        CliError::new(sev, "counterexample", kind, e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lacuna_core::{Basis, RealQ};

    #[test]
    fn nested_errors_name_the_innermost_module() {
        let b = Basis::standard();
        let e: CliError = ConstructionError::Semigroup(SemigroupError::NotInSemigroup(RealQ::integer(&b, 1))).into();
        assert_eq!((e.module, e.kind, e.exit_code()), ("semigroup", "NotInSemigroup", 3));
        let e: CliError = WalkError::Exact(ExactError::AmbiguousOrder { bits: 8 }).into();
        assert_eq!((e.module, e.exit_code()), ("exactreal", 4));
        let e: CliError = OrbitError::Invalid("x".into()).into();
        assert_eq!(e.exit_code(), 2);
    }
}
