use thiserror::Error;

/// Errors surfaced by automaton construction, composition, synthesis and
/// scenario validation.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("event `{0}` is not declared in the alphabet")]
    UnknownEvent(String),
    #[error("state `{0}` is not declared")]
    UnknownState(String),
    #[error("duplicate event name `{0}`")]
    DuplicateEvent(String),
    #[error("duplicate state name `{0}`")]
    DuplicateState(String),
    #[error("event name must be non-empty")]
    EmptyEventName,
    #[error("nondeterministic transition on `{event}` from state `{state}`")]
    Nondeterministic { state: String, event: String },
    #[error("shared event `{0}` has conflicting controllability attributes")]
    ControllabilityConflict(String),
    #[error("trace not generated: `{0}` undefined after `{1}`")]
    TraceNotGenerated(String, String),
    #[error("property alphabet is not contained in the system alphabet (missing `{0}`)")]
    AlphabetNotContained(String),
    #[error("alphabet mismatch: expected the same event set, `{0}` differs")]
    AlphabetMismatch(String),
    #[error("specification is not a sublanguage of the plant (witness `{0}`)")]
    NotSublanguage(String),
    #[error("synthesis requires observable controllables (`{0}` is controllable but unobservable)")]
    UnobservableControllable(String),
    #[error("synthesis did not converge within the iteration bound")]
    SynthesisDiverged,
    #[error("derived event name `{0}` collides with an existing event")]
    NameCollision(String),
    #[error("{0}")]
    Precondition(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("validation error: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
