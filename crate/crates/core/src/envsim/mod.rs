//! Seeded desk-scale text games.
//!
//! Three kinds are provided: a cooking game (rooms, a locked kitchen door,
//! ingredients, cook, eat), a corridor chain with a reward only at the far
//! end, and a full binary tree with one rewarded leaf. Rewards are sparse by
//! construction; observation texts carry phrases from fixed positive,
//! negative and neutral banks so that sentiment is learnable.
//!
//! In the chain, a step towards the goal is reported with a positive phrase
//! and a step away (or into the wall) with a negative one. In the tree,
//! staying on the rewarded branch is positive and leaving it negative.

mod rollout;
mod spec;
mod state;
pub mod templates;
mod trajectory;

use thiserror::Error;

pub use rollout::{observation_corpus, rollout, Policy, RandomPolicy, WalkthroughPolicy};
pub use spec::{
    generate_game, CookingLayout, GameKind, GameParams, GameSpec, CHAIN_RANGE, DEPTH_RANGE,
    ROOMS_RANGE, SPEC_FORMAT_VERSION,
};
pub use state::{reset, EnvState, StepOutcome};
pub use trajectory::{Label, Trajectory, Transition};

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("step called on a finished episode")]
    EpisodeOver,
    #[error("game spec format error: {0}")]
    Format(String),
}

/// The recorded solution of a game.
pub fn walkthrough(spec: &GameSpec) -> &[String] {
    &spec.solution
}
