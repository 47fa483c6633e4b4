use thiserror::Error;

/// Errors raised by the thermodynamic and solver layers.
///
/// The CLI maps `Config` to exit code 2 and everything else to exit code 3,
/// so the split between "bad input file" and "the computation broke" matters.
#[derive(Debug, Error)]
pub enum SimError {
    /// An argument lies outside the mathematical domain of the operation
    /// (negative density, mass fraction far outside [0, 1], ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The state has positive density but `p + pi(phi) <= 0`, so the sound
    /// speed is not real and the system is no longer hyperbolic.
    #[error("hyperbolicity loss: p + pi = {p_plus_pi:.6e} is not positive")]
    HyperbolicityLoss { p_plus_pi: f64 },

    /// A state vector failed validation; `field` names the offending entry.
    #[error("inadmissible state: {field} = {value:.6e}")]
    Inadmissible { field: &'static str, value: f64 },

    /// An eigenvalue of the standing wave coincides with an acoustic or
    /// transport eigenvalue while an area jump is present, or a flow state
    /// sits on the sonic line where the subsonic/supersonic branches merge.
    #[error("resonant configuration: {0}")]
    Resonance(String),

    /// A scalar equation has no root in the admissible range (for instance a
    /// duct contraction that would choke the flow).
    #[error("no admissible root: {0}")]
    NoRoot(String),

    /// The data admit no solution with positive density/pressure.
    #[error("vacuum formation: {0}")]
    Vacuum(String),

    /// An iteration exhausted its budget without meeting its tolerance.
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),

    /// The time step collapsed or a cell size became non-positive.
    #[error("time-step failure: {0}")]
    TimeStep(String),

    /// Run-configuration parse or validation failure.
    #[error("configuration error:\n{0}")]
    Config(String),

    /// Two profiles cannot be compared because their grids differ.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// An inner error tagged with where in the mesh or run it occurred.
    #[error("{location}: {source}")]
    WithLocation {
        location: String,
        #[source]
        source: Box<SimError>,
    },
}

impl SimError {
    /// Wraps an error with the cell, interface, or step where it occurred.
    pub fn at(self, location: impl std::fmt::Display) -> SimError {
        SimError::WithLocation {
            location: location.to_string(),
            source: Box::new(self),
        }
    }

    /// True for errors that indicate bad user input rather than solver failure.
    pub fn is_config(&self) -> bool {
        match self {
            SimError::Config(_) => true,
            SimError::WithLocation { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
