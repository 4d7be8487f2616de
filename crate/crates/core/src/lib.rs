//! Misinformation games: normal-form games with exact rational payoffs, where
//! each player may hold a wrong subjective view of the game being played.
//!
//! The crate provides:
//!
//! * exact Nash equilibrium computation for 2-player games (support
//!   enumeration over rationals) and a numeric solver for 3+ players,
//! * the inflation algebra that pads games with dummy players / dominated
//!   strategies so that a misinformation game can be put in canonical form,
//! * natural misinformed equilibria (NME), position updates, and the
//!   adaptation procedure that lets players learn the actual payoffs at the
//!   positions their equilibria realize,
//! * a set-based adaptation-graph traversal (sequential and parallel) with
//!   stable-misinformed-equilibrium (SME) extraction and DOT export,
//! * a seeded Monte Carlo experiment harness.

pub mod adaptation;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod game;
pub mod inflation;
pub mod json;
pub mod linalg;
pub mod misinfo;
pub mod nash;
pub mod rational;

pub use error::{Error, Result};
pub use game::{MixedStrategy, NormalFormGame, PureProfile, StrategyProfile};
pub use misinfo::{MisinformationGame, PositionSet};
pub use rational::Rational;

/// Knobs shared by the solvers and the adaptation traversal.
#[derive(Debug, Clone)]
pub struct Options {
    /// Residual / best-response tolerance for the numeric N-player solver.
    pub tol: f64,
    /// Support threshold applied to numeric-mode probabilities.
    pub support_epsilon: f64,
    /// Seed for the numeric solver's multistart and any derived randomness.
    pub seed: u64,
    /// Skip joint supports whose size product exceeds this (numeric solver).
    pub max_support_product: usize,
    /// Accept degenerate games (equilibrium continua) instead of erroring.
    pub allow_degenerate: bool,
    /// Abort traversal after this many visited position sets.
    pub max_nodes: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tol: 1e-9,
            support_epsilon: 1e-7,
            seed: 0,
            max_support_product: 64,
            allow_degenerate: false,
            max_nodes: 1_000_000,
        }
    }
}
