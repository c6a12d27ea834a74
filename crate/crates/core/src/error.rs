use thiserror::Error;

/// Errors raised by the library. Every variant maps to a stable,
/// machine-readable code via [`Error::code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("duplicate vertex id `{0}`")]
    DuplicateId(String),
    #[error("edge references unknown vertex `{0}`")]
    DanglingEdge(String),
    #[error("duplicate edge {0} -- {1}")]
    DuplicateEdge(String, String),
    #[error("self-loop at vertex `{0}`")]
    SelfLoop(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("graph is not a valid resolution graph: {0}")]
    InvalidGraph(String),

    #[error("support is empty")]
    EmptySupport,
    #[error("support is not connected")]
    DisconnectedSupport,

    #[error("vertex `{0}` is not a node")]
    NotANode(String),
    #[error("branch does not belong to node `{0}`")]
    BranchMismatch(String),
    #[error("condition C violated at step {step}: {reason}")]
    ConditionCViolated { step: usize, reason: String },
    #[error("condition A fails at node `{node}` (branch attached at `{attach}`)")]
    ConditionAFails { node: String, attach: String },
    #[error("witness enumeration exceeded {0} candidates")]
    EnumerationLimit(usize),

    #[error("invalid coefficient scheme: {0}")]
    InvalidScheme(String),
    #[error("genericity violation: {0}")]
    GenericityViolation(String),
    #[error("leading form of the zero polynomial")]
    ZeroPolynomial,
    #[error("invalid delta vector: {0}")]
    InvalidDelta(String),
    #[error("invalid higher term: {0}")]
    InvalidPerturbation(String),

    #[error("cycle is not in the dual lattice")]
    NotInDualLattice,
    #[error("end dual cycles do not generate the discriminant group")]
    EndsDoNotGenerate,

    #[error("splice diagram has no nodes")]
    NoNodes,
    #[error("invalid splice diagram: {0}")]
    InvalidDiagram(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::MalformedInput(_) => "malformed_input",
            Error::DuplicateId(_) => "duplicate_id",
            Error::DanglingEdge(_) => "dangling_edge",
            Error::DuplicateEdge(..) => "duplicate_edge",
            Error::SelfLoop(_) => "self_loop",
            Error::UnknownVertex(_) => "unknown_vertex",
            Error::InvalidGraph(_) => "invalid_graph",
            Error::EmptySupport => "empty_support",
            Error::DisconnectedSupport => "disconnected_support",
            Error::NotANode(_) => "not_a_node",
            Error::BranchMismatch(_) => "branch_mismatch",
            Error::ConditionCViolated { .. } => "condition_c_violated",
            Error::ConditionAFails { .. } => "condition_a_fails",
            Error::EnumerationLimit(_) => "enumeration_limit",
            Error::InvalidScheme(_) => "invalid_scheme",
            Error::GenericityViolation(_) => "genericity_violation",
            Error::ZeroPolynomial => "zero_polynomial",
            Error::InvalidDelta(_) => "invalid_delta",
            Error::InvalidPerturbation(_) => "invalid_perturbation",
            Error::NotInDualLattice => "not_in_dual_lattice",
            Error::EndsDoNotGenerate => "ends_do_not_generate",
            Error::NoNodes => "no_nodes",
            Error::InvalidDiagram(_) => "invalid_diagram",
        }
    }

    /// Input errors (bad files, bad ids) as opposed to domain outcomes.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::MalformedInput(_)
                | Error::DuplicateId(_)
                | Error::DanglingEdge(_)
                | Error::DuplicateEdge(..)
                | Error::SelfLoop(_)
                | Error::UnknownVertex(_)
                | Error::InvalidGraph(_)
                | Error::InvalidScheme(_)
                | Error::InvalidDelta(_)
                | Error::InvalidPerturbation(_)
                | Error::InvalidDiagram(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
