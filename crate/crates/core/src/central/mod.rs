//! Separated central-potential problem at zero momenta.
//!
//! Each factor is solved on its own lattice: the azimuthal constant in closed
//! form, the polar and radial ones by shooting. [`assemble_state`] multiplies
//! them back together after checking that they share their constants.

pub mod assemble;
pub mod azimuthal;
pub mod classical;
pub mod polar;
pub mod radial;

pub use assemble::{assemble_state, solve_central_state, CentralRequest};
pub use classical::{classical_reference, classical_reference_with, ClassicalConfig, ClassicalReport};
pub use azimuthal::{circulating_azimuthal, solve_azimuthal, AzimuthalSolution};
pub use polar::{regular_series, solve_polar, PolarSolution};
pub use radial::{coulomb_grid, frobenius, origin_curvature, solve_radial, RadialSolution};
