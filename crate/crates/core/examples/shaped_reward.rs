//! Follows one chain episode and shows how each step's reward is shaped.
//!
//! cargo run --example shaped_reward

use senti_shape::envsim::{generate_game, reset, templates, GameKind, GameParams};
use senti_shape::sentiment::{fit_naive_bayes, nb_polarity, ShapingConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = generate_game(GameKind::Chain, 1, &GameParams { intermediate_rewards: false, ..GameParams::default() })?;
    let model = fit_naive_bayes(templates::POSITIVE, templates::NEGATIVE, 1.0)?;
    let gated = ShapingConfig::default();
    let raw = ShapingConfig { gate_enabled: false, ..ShapingConfig::default() };

    let (mut state, _) = reset(&spec);
    let actions = ["go left", "go right", "go left", "go right", "go right", "go right", "go right", "go right", "go right"];
    println!("{:<9} {:>6} {:>9} {:>9} {:>9}", "action", "r_env", "polarity", "gated", "no gate");
    for a in actions {
        if state.done() {
            break;
        }
        let out = state.step(a)?;
        let p = nb_polarity(&model, &out.obs_text).value;
        println!(
            "{a:<9} {:>6} {p:>+9.3} {:>+9.3} {:>+9.3}",
            out.r_env,
            gated.shaped_reward(out.r_env, p),
            raw.shaped_reward(out.r_env, p)
        );
    }
    Ok(())
}
