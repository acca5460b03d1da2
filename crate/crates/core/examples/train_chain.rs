//! Shaped against unshaped DQN on the final-reward-only corridor, counting
//! episodes until the first win.
//!
//! cargo run --release --example train_chain -- [seeds]

use senti_shape::envsim::{templates, GameKind};
use senti_shape::harness::{train, RunConfig, TrainOptions};
use senti_shape::qagent::{AgentConfig, Optimizer};
use senti_shape::sentiment::{fit_naive_bayes, NoScorer, SentimentScorer};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seeds: u64 = std::env::args().nth(1).map_or(Ok(3), |s| s.parse())?;
    let mut model = fit_naive_bayes(templates::POSITIVE, templates::NEGATIVE, 1.0)?;
    let cfg = RunConfig {
        kind: GameKind::Chain,
        count: 1,
        intermediate: false,
        epochs: 100,
        agent: AgentConfig {
            embed_dim: 16,
            hidden_dim: 16,
            mlp_dim: 16,
            batch_size: 8,
            learning_starts: 8,
            epsilon_start: 0.5,
            zero_init_output: true,
            optimizer: Optimizer::Adam,
            learning_rate: 0.01,
            target_update: 50,
            ..AgentConfig::default()
        },
        ..RunConfig::default()
    };
    let games = cfg.resolve_games()?;
    let opts = TrainOptions { stop_on_first_win: true, ..TrainOptions::default() };
    println!("seed  unshaped  shaped   (episodes to first win, '-' = none in 100)");
    for seed in 0..seeds {
        let cfg = RunConfig { seed, ..cfg.clone() };
        let first = |scorer: &mut dyn SentimentScorer| -> Result<String, Box<dyn std::error::Error>> {
            let o = train(&cfg, &games, scorer, &opts)?;
            Ok(o.first_win_episode.map_or("-".into(), |e| e.to_string()))
        };
        let plain = first(&mut NoScorer)?;
        let shaped = first(&mut model)?;
        println!("{seed:>4}  {plain:>8}  {shaped:>6}");
    }
    Ok(())
}
