//! Two-class replay: eviction and the positive-sample quota.
//!
//! cargo run --example replay_sampling

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use senti_shape::qagent::{Priority, ReplayBuffer, ReplayEntry};

fn entry(tag: u32, r_total: f64) -> ReplayEntry {
    ReplayEntry { obs: vec![tag], action: 0, r_total, next_obs: vec![tag], done: false }
}

fn main() {
    let mut buf = ReplayBuffer::new(6);
    for tag in 0..10 {
        let r = if tag % 3 == 0 { 1.0 } else { 0.0 };
        buf.push(entry(tag, r));
        let tags = |p| buf.class(p).iter().map(|e| e.obs[0]).collect::<Vec<_>>();
        println!("push {tag} (r={r})  positive {:?}  ordinary {:?}", tags(Priority::Positive), tags(Priority::Ordinary));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for rho in [0.1, 0.25, 0.5] {
        let mut pos = 0;
        for _ in 0..1000 {
            pos += buf.sample(8, rho, &mut rng).iter().filter(|e| e.priority() == Priority::Positive).count();
        }
        println!("rho {rho}: quota {} of 8, observed positive share {:.3}", (rho * 8.0f64).ceil(), pos as f64 / 8000.0);
    }
}
