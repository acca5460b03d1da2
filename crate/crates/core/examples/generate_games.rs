//! Generates one game of each kind and plays its walkthrough.
//!
//! cargo run --example generate_games

use senti_shape::envsim::{generate_game, reset, GameKind, GameParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = GameParams { rooms: 3, ..GameParams::default() };
    for kind in [GameKind::Chain, GameKind::Tree, GameKind::Cooking] {
        let spec = generate_game(kind, 7, &params)?;
        println!("== {} (max score {}, {} steps allowed)", spec.id(), spec.max_score, spec.max_steps);
        println!("commands: {}", spec.commands.join(" | "));
        let (mut state, obs) = reset(&spec);
        println!("{obs}");
        for action in &spec.solution {
            let out = state.step(action)?;
            println!("> {action}\n{}  [+{}]", out.obs_text, out.r_env);
        }
        println!("won: {}, score {}/{}\n", state.won(), state.score_so_far(), spec.max_score);
    }
    Ok(())
}
