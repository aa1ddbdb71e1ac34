use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // structures and instances
    #[error("structure domain is empty")]
    EmptyDomain,
    #[error("unknown domain element `{0}`")]
    UnknownElement(String),
    #[error("duplicate domain element `{0}`")]
    DuplicateElement(String),
    #[error("relation `{name}` has arity {expected} but a tuple of length {found}")]
    RelationArity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown relation symbol `{0}`")]
    UnknownRelation(String),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("invalid instance: {0}")]
    Instance(String),

    // team algebra
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}` in team")]
    DuplicateVariable(String),
    #[error("tuple has length {found}, team has {expected} variables")]
    TupleLength { expected: usize, found: usize },
    #[error("negative weight {0}")]
    NegativeWeight(String),
    #[error("invalid weight `{0}`")]
    InvalidWeight(String),
    #[error("duplicate tuple {0}")]
    DuplicateTuple(String),
    #[error("duplication set is empty")]
    EmptyDuplicationSet,
    #[error("not a probability distribution: {0}")]
    NotADistribution(String),
    #[error("teams have different variable lists: {0:?} vs {1:?}")]
    MismatchedVariables(Vec<String>, Vec<String>),
    #[error("scaling factor {0} outside [0,1]")]
    InvalidScale(String),
    #[error("team is not normalized (total weight {0})")]
    NotNormalized(String),

    // syntax
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("marginal identity atom needs tuples of equal length ({0} vs {1})")]
    MargArity(usize, usize),
    #[error("formula mixes FOPT-only and team-only constructs")]
    MixedDialect,
    #[error("expected a {expected} formula, found {found}")]
    WrongDialect { expected: String, found: String },

    // atoms
    #[error("not an atom: {0}")]
    NotAnAtom(String),
    #[error("entropy undefined on a team of total weight zero")]
    ZeroWeightTeam,
    #[error("marginal-independence rewrite needs an empty condition tuple: {0}")]
    ConditionNotEmpty(String),

    // evaluation
    #[error("formula has free variables {0:?}; a sentence is required")]
    OpenFormula(Vec<String>),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("formula needs witness search (split disjunction or probabilistic quantifier) at {0}")]
    SearchRequired(String),
    #[error("search budget of {0} evaluations exceeded")]
    Overflow(u64),
    #[error("witness shape mismatch: {0}")]
    WitnessShape(String),
    #[error("split witness does not reproduce the team: {0}")]
    SplitMismatch(String),
    #[error("witness cannot cover a search node below Boolean negation at {0}")]
    WitnessInsufficient(String),

    // compilation
    #[error(
        "check-mode team variables {team:?} differ from the formula's free variables {formula:?}"
    )]
    CheckTeamMismatch {
        team: Vec<String>,
        formula: Vec<String>,
    },
    #[error("check-mode team has total weight zero")]
    EmptyCheckTeam,
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("SMT-LIB2 export does not support log terms")]
    LogUnsupported,

    // solver
    #[error("system is not existential (fragment {0})")]
    NonExistentialSystem(String),
    #[error("witness misses variable `{0}`")]
    MissingVariable(String),

    // second-order translation
    #[error("atom outside the translated fragment: {0}")]
    UnsupportedAtom(String),
    #[error("independence atom tuples are not disjoint after normalization: {0}")]
    NonDisjointAtom(String),
    #[error("function quantifiers cannot be evaluated")]
    FunctionQuantifierUnsupported,
    #[error("no table for function symbol `{0}`")]
    MissingTable(String),
    #[error("function `{name}` used with arity {found}, declared {expected}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
