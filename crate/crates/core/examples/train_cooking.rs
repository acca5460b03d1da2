//! Trains on a few small cooking games and writes the run outputs
//! (epochs.csv, summary.csv, curve.svg, episodes.jsonl, checkpoint.json).
//!
//! cargo run --release --example train_cooking -- [out_dir]

use senti_shape::envsim::templates;
use senti_shape::harness::{cmd_train, RunConfig};
use senti_shape::qagent::AgentConfig;
use senti_shape::sentiment::{fit_naive_bayes, ScorerSpec, ShapingConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "runs/cooking".into());
    std::fs::create_dir_all(&out)?;
    let nb_path = format!("{out}/nb.json");
    fit_naive_bayes(templates::POSITIVE, templates::NEGATIVE, 1.0)?.save(nb_path.as_ref())?;

    let cfg = RunConfig {
        count: 3,
        rooms: 3,
        epochs: 10,
        shaping: ShapingConfig { scorer: ScorerSpec::Nb(nb_path.into()), ..ShapingConfig::default() },
        agent: AgentConfig { embed_dim: 16, hidden_dim: 16, mlp_dim: 16, batch_size: 8, ..AgentConfig::default() },
        out: Some(out.clone().into()),
        ..RunConfig::default()
    };
    let o = cmd_train(&cfg)?;
    for r in &o.reports {
        let per_game: Vec<String> = r.per_game.iter().map(|s| s.to_string()).collect();
        println!("epoch {:>2}  [{}]  score {}  aggregated {}", r.epoch, per_game.join(" "), r.epoch_score, r.aggregated);
    }
    println!("max epoch score {}; {} updates; outputs in {out}", o.max_score(), o.updates);
    Ok(())
}
