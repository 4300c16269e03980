use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("triangle inequality fails: d({a},{c}) > d({a},{b}) + d({b},{c})")]
    Triangle { a: u32, b: u32, c: u32 },
    #[error("metric axiom fails at ({a},{b}): {what}")]
    Axiom { a: u32, b: u32, what: &'static str },
    #[error("graph is disconnected into {} components", components.len())]
    DisconnectedGraph { components: Vec<Vec<u32>> },
    #[error("unknown point id {0}")]
    UnknownPoint(u32),
    #[error("empty point set")]
    EmptySet,
    #[error("space is not path-connected ({count} components)")]
    NotPathConnected { count: usize },
    #[error("minimal positive distance differs at points {a} and {b}")]
    NonUniformStep { a: u32, b: u32 },
    #[error("circuits have different base points ({0} and {1})")]
    BaseMismatch(u32, u32),
    #[error("not a continuous path: break at index {0}")]
    NotContinuous(usize),
    #[error("circuit does not start and end at its base point")]
    NotACircuit,
    #[error("ragged matrix: row {0} has a different length")]
    Ragged(usize),
    #[error("unsupported space shape: {0}")]
    Unsupported(String),
    #[error("circuit touches the puncture at index {0}")]
    TouchesPuncture(usize),
    #[error("map is not total or refers outside its codomain")]
    BadMap,
    #[error("map is not bijective")]
    NotBijective,
    #[error("map is not an NPP-function: {x} -> {y} breaks the inclusion")]
    NotNpp { x: u32, y: u32 },
    #[error("space is not graph-type: {0}")]
    NotGraphType(String),
    #[error("empty subset family")]
    EmptyFamily,
    #[error("no uncontaminated entry for point {0}")]
    NoUncontaminated(u32),
    #[error("need at least two points")]
    TooSmall,
    #[error("points {0} and {1} lie in different path components")]
    DifferentComponents(u32, u32),
    #[error("irrational distance where a rational one is required")]
    Irrational,
    #[error("point ({0},{1}) lies on the curve")]
    OnCurve(i64, i64),
    #[error("curve is not simple: {0}")]
    NotSimple(String),
    #[error("curve contains the unit square at ({0},{1})")]
    UnitSquare(i64, i64),
    #[error("curve is constant")]
    ConstantCurve,
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("invalid parameter: {0}")]
    Param(String),
}

pub type Result<T> = std::result::Result<T, Error>;
