//! Sentiment-derived dense rewards for text-game reinforcement learning.
//!
//! The crate bundles seeded text games ([`envsim`]), tokenization and
//! trajectory files ([`textcore`]), polarity scoring and reward shaping
//! ([`sentiment`]), an LSTM-DQN learner written from scratch ([`qagent`]),
//! correlation and classifier statistics ([`stats`]) and the orchestration
//! used by the `senti-shape` binary ([`harness`]).

pub mod envsim;
pub mod textcore;
pub mod sentiment;
pub mod qagent;
pub mod stats;
pub mod harness;
