//! Sentiment/outcome analysis: random rollouts on the corridor, an NB
//! scorer fitted on wins against losses, then the full and last-k tables.
//!
//! cargo run --release --example analyze_trajectories

use senti_shape::envsim::{generate_game, GameKind, GameParams, Label};
use senti_shape::harness::{analyze, fit_nb, rollouts};
use senti_shape::stats::DEFAULT_KS;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let specs = (0..10)
        .map(|s| generate_game(GameKind::Chain, s, &GameParams::default()))
        .collect::<Result<Vec<_>, _>>()?;
    let trajs = rollouts(&specs, "random", 40, 0, None)?;
    let (wins, losses): (Vec<_>, Vec<_>) = trajs.iter().cloned().partition(|t| t.label == Label::Win);
    println!("{} wins, {} losses", wins.len(), losses.len());

    let fitted = fit_nb(&wins, &losses, 1.0, 0)?;
    let m = fitted.heldout;
    println!("held-out precision {:.3} recall {:.3} f1 {:.3}\n", m.precision, m.recall, m.f1);

    let mut scorer = fitted.model;
    let a = analyze(&trajs, &mut scorer, &DEFAULT_KS)?;
    print!("{}\n{}\n{}", a.full_corr_csv(), a.last_k_csv(), a.last_k_corr_csv());
    Ok(())
}
