//! Randomized construction of n-queens configurations.
//!
//! The pipeline has two phases. [`greedy`] places queens uniformly at random
//! on a torus (rows, columns and wrapping diagonals all exclusive) until a
//! stop count is reached. [`absorption`] then fills the remaining rows and
//! columns one pair at a time by exchanging an existing queen `(x, y)` for
//! the two squares `(r, y)` and `(x, c)`, producing an ordinary n-queens
//! configuration.
//!
//! Around the pipeline sit the tools used to study it: trajectory
//! predictions and concentration reports, a per-run counting certificate for
//! a lower bound on the number of solutions, a rank-coupled variant of the
//! greedy process ([`analysis::coupling_experiment`]), and brute-force
//! [`oracles`] that every optimized routine is checked against.
//!
//! ```
//! use nqueens_absorb::{absorption, board, greedy};
//!
//! let n = 100;
//! let params = greedy::GreedyParams::new(n, 7);
//! let phase1 = greedy::run_greedy(&params).unwrap();
//! assert!(board::verify(&phase1.config, board::Rule::Toroidal));
//!
//! if let absorption::AbsorptionOutcome::Completed { config, .. } =
//!     absorption::run_absorption(&phase1.config, 7).unwrap()
//! {
//!     assert_eq!(config.len(), n);
//!     assert!(board::verify(&config, board::Rule::Classical));
//! }
//! ```

pub mod absorption;
pub mod analysis;
pub mod board;
pub mod cli;
pub mod greedy;
pub mod oracles;
pub mod seeds;

pub use board::{PartialConfig, Position, Rule};
