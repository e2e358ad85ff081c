//! Grids, units, potentials and state containers shared by every solver.

pub mod bundle;
pub mod grid;
pub mod potential;
pub mod state;
pub mod units;

pub use bundle::{load_bundle, read_bundle, save_bundle, write_bundle, StateBundle};
pub use grid::{Grid1D, PolarGrid, RadialGrid, UniformGrid};
pub use potential::{CentralPotential, Potential1D, Table};
pub use state::{
    azimuthal_samples, count_sign_changes, normalize, normalize_weighted, AzimuthalFactor,
    AzimuthalParity, MotionMode, QuantumNumbers, SeparableCentralState, StationaryState1D,
};
pub use units::Units;
