//! Independent reference implementations used by the integration and
//! acceptance tests. Nothing here calls the code under test except for
//! shared plumbing (random number generation).

#![allow(dead_code)]

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use senti_shape::qagent::{loss_and_grad, QDims, QParams, ReplayEntry, GROUP_NAMES};

/// A small random network, target network and batch (one terminal entry).
pub fn gradient_instance(seed: u64) -> (QParams, QParams, Vec<ReplayEntry>) {
    let dims = QDims {
        vocab_size: 10,
        embed_dim: 4,
        hidden_dim: 6,
        mlp_dim: 5,
        action_count: 3,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = QParams::random(dims, 0.5, &mut rng);
    let target = QParams::random(dims, 0.5, &mut rng);
    let batch = (0..3)
        .map(|i| ReplayEntry {
            obs: (0..5).map(|_| rng.random_range(0..10)).collect(),
            action: rng.random_range(0..3),
            r_total: rng.random_range(-1.0..1.0),
            next_obs: (0..5).map(|_| rng.random_range(0..10)).collect(),
            done: i == 2,
        })
        .collect();
    (params, target, batch)
}

/// Largest relative error between the analytic gradient and central
/// differences with step `h`, over every parameter of every group.
pub fn max_gradient_error(seed: u64, h: f64) -> (f64, &'static str) {
    let (params, target, entries) = gradient_instance(seed);
    let batch: Vec<&ReplayEntry> = entries.iter().collect();
    let (_, grads) = loss_and_grad(&params, &target, &batch, 0.9).unwrap();
    let loss_at = |p: &QParams| loss_and_grad(p, &target, &batch, 0.9).unwrap().0;

    let mut worst = (0.0, "");
    let mut probe = params.clone();
    for g in 0..GROUP_NAMES.len() {
        for i in 0..params.groups()[g].len() {
            let orig = params.groups()[g][i];
            probe.groups_mut()[g][i] = orig + h;
            let up = loss_at(&probe);
            probe.groups_mut()[g][i] = orig - h;
            let down = loss_at(&probe);
            probe.groups_mut()[g][i] = orig;
            let numeric = (up - down) / (2.0 * h);
            let analytic = grads.groups()[g][i];
            let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6);
            if rel > worst.0 {
                worst = (rel, GROUP_NAMES[g]);
            }
        }
    }
    worst
}

/// Brute-force multinomial naive Bayes polarity for whitespace-separated
/// lowercase documents. Counts words directly and multiplies the
/// probabilities in log space.
pub fn brute_nb_polarity<'a>(pos: &'a [String], neg: &'a [String], alpha: f64, text: &str) -> f64 {
    let mut vocab: Vec<&str> = Vec::new();
    for d in pos.iter().chain(neg) {
        for w in d.split_whitespace() {
            if !vocab.contains(&w) {
                vocab.push(w);
            }
        }
    }
    let count = |docs: &'a [String]| {
        let mut c: HashMap<&str, f64> = HashMap::new();
        let mut total = 0.0;
        for d in docs {
            for w in d.split_whitespace() {
                *c.entry(w).or_default() += 1.0;
                total += 1.0;
            }
        }
        (c, total)
    };
    let (cp, np) = count(pos);
    let (cn, nn) = count(neg);
    let v = vocab.len() as f64;
    let n_docs = (pos.len() + neg.len()) as f64;
    let mut lp = (pos.len() as f64 / n_docs).ln();
    let mut ln = (neg.len() as f64 / n_docs).ln();
    for w in text.split_whitespace() {
        lp += ((cp.get(w).copied().unwrap_or(0.0) + alpha) / (np + alpha * v)).ln();
        ln += ((cn.get(w).copied().unwrap_or(0.0) + alpha) / (nn + alpha * v)).ln();
    }
    // P(pos) = 1 / (1 + exp(ln - lp))
    let p_pos = 1.0 / (1.0 + (ln - lp).exp());
    2.0 * p_pos - 1.0
}

/// Textbook sample Pearson correlation.
pub fn pearson_def(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

/// Midrank by counting: `#{smaller} + (#{equal} + 1) / 2`.
pub fn midranks_def(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let less = xs.iter().filter(|&&y| y < x).count() as f64;
            let equal = xs.iter().filter(|&&y| y == x).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Settings of the tabular Q-learning oracle on the corridor game.
#[derive(Debug, Clone, Copy)]
pub struct ChainOracle {
    pub length: usize,
    pub max_steps: usize,
    pub episodes: usize,
    pub gamma: f64,
    pub alpha: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub decay_fraction: f64,
    /// reward added for a move right (and subtracted for a move left away
    /// from the wall); 0 disables shaping
    pub bonus: f64,
}

/// Episodes until the first win (1-based) for tabular Q-learning with the
/// same exploration rule as the agent: actions `[left, right]`, zero
/// initial values, lowest-index tie-break, linear epsilon decay over the
/// planned steps. Returns `episodes + 1` if it never wins.
pub fn tabular_first_win(o: &ChainOracle, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let last = o.length - 1;
    let mut q = vec![[0.0f64; 2]; o.length];
    let planned = (o.episodes * o.max_steps) as f64;
    let mut t = 0usize;
    for episode in 1..=o.episodes {
        let mut pos = 0usize;
        for _ in 0..o.max_steps {
            let frac = (t as f64 / (o.decay_fraction * planned)).min(1.0);
            let eps = o.epsilon_start + frac * (o.epsilon_end - o.epsilon_start);
            t += 1;
            let a = if rng.random::<f64>() < eps {
                rng.random_range(0..2)
            } else if q[pos][1] > q[pos][0] {
                1
            } else {
                0
            };
            let (next, mut r) = if a == 1 {
                (pos + 1, o.bonus)
            } else if pos == 0 {
                // wall bump: weakly negative text, removed by the gate
                (0, 0.0)
            } else {
                (pos - 1, -o.bonus)
            };
            let done = next == last;
            if done {
                r += 1.0;
            }
            let target = if done { r } else { r + o.gamma * q[next][0].max(q[next][1]) };
            q[pos][a] += o.alpha * (target - q[pos][a]);
            pos = next;
            if done {
                return episode;
            }
        }
    }
    o.episodes + 1
}

pub fn median(xs: &[usize]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_unstable();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0
    }
}
