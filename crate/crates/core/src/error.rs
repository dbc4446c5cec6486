use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("antisymmetry violated: `{0}` <= `{1}` and `{1}` <= `{0}`")]
    AntisymmetryViolation(String, String),
    #[error("poset has {size} elements, exhaustive search bound is {bound}")]
    SizeBound { size: usize, bound: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("empty path")]
    Empty,
    #[error("`{0}` and `{1}` are not comparable")]
    NotComparable(String, String),
    #[error("step {index} starts at `{found}` but the previous step ends at `{expected}`")]
    NotComposable {
        index: usize,
        expected: String,
        found: String,
    },
    #[error("malformed step `{0}`; expected d(x,y), u(y,x) or i(x)")]
    Syntax(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomotopyError {
    #[error("poset is not path connected")]
    NotPathConnected,
    #[error("`{0}` is not below `{1}`")]
    NotComparable(String, String),
    #[error("path is not a loop at `{0}`")]
    NotALoop(String),
    #[error("poset is not upward directed")]
    NotDirected,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("missing dimension for `{0}`")]
    MissingDim(String),
    #[error("dimension of `{0}` must be positive")]
    ZeroDim(String),
    #[error("no embedding given for `{0}` <= `{1}`")]
    MissingGamma(String, String),
    #[error("embedding `{0}` <= `{1}` is malformed: {2}")]
    BadGamma(String, String, String),
    #[error("embeddings do not compose along `{0}` <= `{1}` <= `{2}`")]
    GammaComposition(String, String, String),
    #[error("`{0}` is not below `{1}`")]
    NotComparable(String, String),
    #[error("path is not a loop")]
    NotALoop,
    #[error("cycles are not over equivalent loops (or equivalence is undecided)")]
    NotComparableCycles,
    #[error("class membership needs a confluence-certified poset")]
    NotCertified,
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Path(#[from] PathError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("elements are based at different sites")]
    BasepointMismatch,
    #[error("singular value iteration did not converge")]
    NonConvergence,
    #[error("degree `{0}` is not a loop at the basepoint")]
    BadDegree(String),
    #[error("grading checks need a confluence-certified poset")]
    NotCertified,
    #[error("`{0}` is not below `{1}`")]
    NotComparable(String, String),
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoronaError {
    #[error("site `{0}` is not in block {1}")]
    NotInBlock(String, usize),
    #[error("sites `{0}` and `{1}` share no block")]
    NotComparableInCorona(String, String),
    #[error("no target block contains the image of source block {0}")]
    NoContainingBlock(usize),
    #[error("morphism is invalid: {0}")]
    MorphismInvalid(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// Errors surfaced by the JSON loaders.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("{0}")]
    Invalid(String),
}
