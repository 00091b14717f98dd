use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("unknown degree of freedom `{0}`")]
    UnknownDof(String),
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
    #[error("frequency grids differ")]
    GridMismatch,
    #[error("reference impedances differ ({0} vs {1} ohm)")]
    ReferenceMismatch(f64, f64),
    #[error("singular conversion at {0} Hz (S21 = 0)")]
    SingularConversion(f64),
    #[error("frequency {0} Hz is not a grid point")]
    FrequencyNotOnGrid(f64),
    #[error("ill-conditioned fit: {0}")]
    IllConditionedFit(String),
    #[error("points per axis must be at least 3, got {0}")]
    TooFewPoints(usize),
    #[error("every sweep cell failed validation")]
    AllCellsInvalid,
    #[error("sweep table is empty")]
    EmptyTable,
    #[error("numerical failure: {0}")]
    Numerical(String),
}
