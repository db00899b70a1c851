use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("qubit index {index} out of range (layout has {qubit_count} qubits)")]
    QubitIndexOutOfRange { index: usize, qubit_count: usize },

    #[error("photon number {photons} not representable with fock cutoff {cutoff}")]
    PhotonOutOfRange { photons: usize, cutoff: usize },

    #[error("expected {expected} qubit levels, got {got}")]
    LevelCountMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown parameter path `{0}`")]
    UnknownParameter(String),

    #[error("qubit {qubit} is resonant with the cavity (detuning is zero)")]
    ResonantQubit { qubit: usize },

    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("grid must be strictly monotone")]
    NonMonotoneGrid,

    #[error("anticrossing branches not found in bracket: {0}")]
    BranchesNotFound(String),

    #[error("more than two levels mix with the tracked pair (levels {levels:?})")]
    DegenerateBranches { levels: Vec<usize> },

    #[error("intermediate state {state} is degenerate with the initial state (|E_i - E| = {gap:.3e}); perturbation theory is invalid here")]
    DegenerateIntermediate { state: usize, gap: f64 },

    #[error("path order {0} unsupported (expected 2..=4)")]
    UnsupportedOrder(usize),

    #[error("path amplitude has non-negligible imaginary part {0:.3e}")]
    ComplexAmplitude(f64),

    #[error("pole in closed form: {0}")]
    Pole(String),

    #[error("ambiguous dressed labels: {0}")]
    AmbiguousLabels(String),

    #[error("no dressed state carries label {0}")]
    MissingLabel(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("trace drift {drift:.3e} exceeded tolerance at t = {time}; reduce the step size (current {step:.3e})")]
    TraceDrift { drift: f64, time: f64, step: f64 },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("ancilla on wire {0} is not in |0>")]
    AncillaNotReset(usize),

    #[error("measurement on wire {wire} is not deterministic (p = {probability})")]
    NonDeterministicMeasurement { wire: usize, probability: f64 },

    #[error("invalid logical state: {0}")]
    InvalidLogicalState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
