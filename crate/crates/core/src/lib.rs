//! Win/draw/loss games, their intransitivity, and open-source competitions
//! between learners that read each other's code.
//!
//! - [`game`]: payoff tables and the game file format
//! - [`classify`]: domination, strong intransitivity, saddle points, cycles
//! - [`dsl`]: the strategy language and its fuel-metered evaluator
//! - [`arena`]: matches, adjudication and tournaments
//! - [`demos`]: the exploiter, the oracle winner and the defiant learner
//! - [`series`], [`mixed`], [`crosstable`]: series composition, mixed
//!   equilibria, cross-table ingestion
//! - [`cli`]: the `intransitive` command

pub mod arena;
pub mod bundled;
pub mod classify;
pub mod cli;
pub mod crosstable;
pub mod demos;
pub mod dsl;
pub mod game;
pub mod mixed;
pub mod series;
