//! Compares backpropagated gradients with central differences on a tiny
//! network.
//!
//! cargo run --example gradient_check

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use senti_shape::qagent::{loss_and_grad, AgentConfig, QParams, ReplayEntry, GROUP_NAMES};

const SEED: u64 = 3;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = AgentConfig { embed_dim: 3, hidden_dim: 4, mlp_dim: 4, ..AgentConfig::default() };
    let dims = cfg.dims(8, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let params = QParams::random(dims, 0.5, &mut rng);
    let target = QParams::random(dims, 0.5, &mut rng);
    let entries: Vec<ReplayEntry> = (0..4)
        .map(|i| ReplayEntry {
            obs: (0..4).map(|_| rng.random_range(0..8)).collect(),
            action: i % 2,
            r_total: rng.random_range(-1.0..1.0),
            next_obs: (0..3).map(|_| rng.random_range(0..8)).collect(),
            done: i == 3,
        })
        .collect();
    let batch: Vec<&ReplayEntry> = entries.iter().collect();
    let (loss, grads) = loss_and_grad(&params, &target, &batch, cfg.gamma)?;
    println!("loss {loss:.6}, {} parameters", params.num_params());

    let h = 1e-4;
    let mut probe = params.clone();
    for (g, name) in GROUP_NAMES.iter().enumerate() {
        let (mut worst, mut norm): (f64, f64) = (0.0, 0.0);
        for i in 0..params.groups()[g].len() {
            let orig = params.groups()[g][i];
            probe.groups_mut()[g][i] = orig + h;
            let up = loss_and_grad(&probe, &target, &batch, cfg.gamma)?.0;
            probe.groups_mut()[g][i] = orig - h;
            let down = loss_and_grad(&probe, &target, &batch, cfg.gamma)?.0;
            probe.groups_mut()[g][i] = orig;
            let numeric = (up - down) / (2.0 * h);
            let analytic = grads.groups()[g][i];
            norm += analytic * analytic;
            worst = worst.max((analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6));
        }
        println!("{name:<10} |grad| {:.3e}  max relative error {worst:.2e}", norm.sqrt());
    }
    Ok(())
}
