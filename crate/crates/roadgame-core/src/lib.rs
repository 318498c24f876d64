//! Potential-game decision engine for multi-vehicle driving.
//!
//! The crate builds receding-horizon multi-player games whose structured
//! costs (own-strategy terms plus symmetric pairwise terms) admit an exact
//! potential function, solves them for pure-strategy (epsilon-)Nash
//! equilibria by best-response dynamics or by minimizing the potential, and
//! runs closed-loop lane-changing and intersection-crossing simulations on a
//! kinematic bicycle model.

pub mod costs;
pub mod sim;
pub mod error;
pub mod game;
pub mod seeding;
pub mod solve;
pub mod vehicle;

pub use error::{Error, Result};
