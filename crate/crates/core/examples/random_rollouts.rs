//! Random and walkthrough rollouts, saved as a trajectory file.
//!
//! cargo run --example random_rollouts -- [out.jsonl]

use senti_shape::envsim::{generate_game, GameKind, GameParams};
use senti_shape::harness::rollouts;
use senti_shape::textcore::save_trajectories;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let specs = (0..5)
        .map(|s| generate_game(GameKind::Chain, s, &GameParams::default()))
        .collect::<Result<Vec<_>, _>>()?;
    let random = rollouts(&specs, "random", 20, 0, None)?;
    let walk = rollouts(&specs, "walkthrough", 1, 0, None)?;
    let wins = random.iter().filter(|t| t.is_win()).count();
    println!("random: {wins}/{} wins on chain(7) with {} steps", random.len(), specs[0].max_steps);
    println!("walkthrough: {}/{} wins", walk.iter().filter(|t| t.is_win()).count(), walk.len());

    let t = &random[0];
    println!("\nfirst random episode ({:?}):", t.label);
    for s in t.steps.iter().take(4) {
        println!("  {:<9} -> {}", s.action_text, s.next_obs_text);
    }

    if let Some(path) = std::env::args().nth(1) {
        let all: Vec<_> = random.into_iter().chain(walk).collect();
        save_trajectories(path.as_ref(), &all)?;
        println!("\nsaved {} trajectories to {path}", all.len());
    }
    Ok(())
}
