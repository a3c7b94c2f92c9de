//! Semiclassical `1/g` expansion of ground and excited states along
//! classical trajectories, with exact perturbation series and a
//! finite-difference eigenvalue oracle for cross-checks.

pub mod exactalg;
pub mod numeric;
pub mod oscpert;
pub mod trajectory;
pub mod gexpand;
pub mod greens;
pub mod coulomb;
pub mod oracle;
pub mod excited;
pub mod cli;
