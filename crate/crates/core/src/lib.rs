//! Solver and simulator for the morality-guided clean-technology adoption game.
//!
//! A population of rational, herding and lethargic agents chooses between a
//! clean technology (CT) and an unclean one (UC). Rational agents weigh the
//! price gap against a social-pressure term `z(1 - z) m`, herding agents follow
//! the majority and lethargic agents never switch. The crate computes:
//!
//! * equilibrium adoption levels ([`equilibria::mt_amfe_set`]) with an
//!   independent brute-force oracle ([`equilibria::brute_force_equilibria`]),
//! * which of them are attractors of the turn-by-turn process
//!   ([`equilibria::stable_set`]),
//! * stochastic turn-by-turn trajectories and Monte Carlo convergence studies
//!   ([`dynamics`]),
//! * replicator flows and their phase line ([`dynamics::replicator`]),
//! * CO2 feedback and environment-augmented utilities ([`environment`]).

pub mod dynamics;
pub mod environment;
pub mod equilibria;
mod error;
pub mod game;
pub mod ode;

pub use error::{Error, Result};
pub use game::{Action, GameParams, PopulationMix, Roots, Support, EPS_CMP};
