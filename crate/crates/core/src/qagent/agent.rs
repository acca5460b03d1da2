use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::network::{backward, forward};
use super::params::{Checkpoint, QDims, QParams};
use super::replay::{ReplayBuffer, ReplayEntry};
use super::{encode_text, QError};
use crate::envsim::{EnvState, GameSpec, Policy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    Sgd,
    Adam,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentConfig {
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// fraction of the planned steps over which epsilon decays linearly
    pub epsilon_decay_fraction: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub replay_capacity: usize,
    pub rho: f64,
    pub embed_dim: usize,
    pub hidden_dim: usize,
    pub mlp_dim: usize,
    /// environment steps between target network syncs
    pub target_update: usize,
    pub init_scale: f64,
    /// start the output layer at zero so every Q value is initially 0
    pub zero_init_output: bool,
    pub train_every: usize,
    /// no updates until the buffer holds this many transitions
    pub learning_starts: usize,
    /// observations are truncated to their first `max_tokens` tokens
    pub max_tokens: usize,
    pub optimizer: Optimizer,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            gamma: 0.9,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            epsilon_decay_fraction: 0.5,
            learning_rate: 1e-3,
            batch_size: 32,
            replay_capacity: 10_000,
            rho: 0.25,
            embed_dim: 32,
            hidden_dim: 64,
            mlp_dim: 64,
            target_update: 500,
            init_scale: 0.08,
            zero_init_output: false,
            train_every: 1,
            learning_starts: 32,
            max_tokens: 64,
            optimizer: Optimizer::Sgd,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), QError> {
        let bad = |m: &str| Err(QError::Usage(m.to_string()));
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad("gamma must be in [0, 1]");
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad("rho must be in (0, 1)");
        }
        for e in [self.epsilon_start, self.epsilon_end] {
            if !(0.0..=1.0).contains(&e) {
                return bad("epsilon must be in [0, 1]");
            }
        }
        if !(0.0..=1.0).contains(&self.epsilon_decay_fraction) {
            return bad("epsilon_decay_fraction must be in [0, 1]");
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be finite and >= 0");
        }
        if self.batch_size == 0
            || self.replay_capacity == 0
            || self.target_update == 0
            || self.train_every == 0
            || self.max_tokens == 0
        {
            return bad("batch_size, replay_capacity, target_update, train_every and max_tokens must be positive");
        }
        if self.embed_dim == 0 || self.hidden_dim == 0 || self.mlp_dim == 0 {
            return bad("layer sizes must be positive");
        }
        Ok(())
    }

    pub fn dims(&self, vocab_size: usize, action_count: usize) -> QDims {
        QDims {
            vocab_size,
            embed_dim: self.embed_dim,
            hidden_dim: self.hidden_dim,
            mlp_dim: self.mlp_dim,
            action_count,
        }
    }
}

/// Linear decay from `start` to `end` over the first `fraction * total`
/// steps, flat afterwards.
pub fn epsilon_at(cfg: &AgentConfig, step: u64, total: u64) -> f64 {
    let span = cfg.epsilon_decay_fraction * total as f64;
    if span <= 0.0 {
        return cfg.epsilon_end;
    }
    let t = (step as f64 / span).min(1.0);
    cfg.epsilon_start + t * (cfg.epsilon_end - cfg.epsilon_start)
}

pub fn td_target(r_total: f64, done: bool, gamma: f64, max_next_q: f64) -> f64 {
    if done {
        r_total
    } else {
        r_total + gamma * max_next_q
    }
}

fn argmax(q: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in q.iter().enumerate() {
        if v > q[best] {
            best = i;
        }
    }
    best
}

/// Epsilon-greedy; greedy ties go to the lowest index.
pub fn select_action<R: Rng + ?Sized>(q: &[f64], epsilon: f64, rng: &mut R) -> usize {
    assert!(!q.is_empty(), "select_action on empty Q vector");
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        rng.random_range(0..q.len())
    } else {
        argmax(q)
    }
}

/// Mean squared TD error over the batch and its gradient with respect to
/// `params`. Targets come from `target`.
pub fn loss_and_grad(
    params: &QParams,
    target: &QParams,
    batch: &[&ReplayEntry],
    gamma: f64,
) -> Result<(f64, QParams), QError> {
    if batch.is_empty() {
        return Err(QError::Usage("empty batch".into()));
    }
    if params.dims != target.dims {
        return Err(QError::Usage("online and target shapes differ".into()));
    }
    let n = batch.len() as f64;
    let mut grads = QParams::zeros(params.dims);
    let mut loss = 0.0;
    let mut dq = vec![0.0; params.dims.action_count];
    for e in batch {
        if e.action >= params.dims.action_count {
            return Err(QError::Usage(format!("action index {} out of range", e.action)));
        }
        let y = if e.done {
            e.r_total
        } else {
            let next = forward(target, &e.next_obs)?;
            let best = next.q.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            td_target(e.r_total, false, gamma, best)
        };
        let fwd = forward(params, &e.obs)?;
        let err = fwd.q[e.action] - y;
        loss += err * err / n;
        dq.iter_mut().for_each(|v| *v = 0.0);
        dq[e.action] = 2.0 * err / n;
        backward(params, &fwd, &dq, &mut grads);
    }
    if !loss.is_finite() || !grads.is_finite() {
        return Err(QError::Numerical(format!("non-finite loss or gradient (loss = {loss})")));
    }
    Ok((loss, grads))
}

/// One plain gradient-descent step. Returns the updated parameters and the
/// loss measured before the update.
pub fn train_step(
    params: &QParams,
    target: &QParams,
    batch: &[&ReplayEntry],
    cfg: &AgentConfig,
) -> Result<(QParams, f64), QError> {
    let (loss, grads) = loss_and_grad(params, target, batch, cfg.gamma)?;
    let mut next = params.clone();
    next.add_scaled(-cfg.learning_rate, &grads);
    Ok((next, loss))
}

#[derive(Debug, Clone)]
struct Adam {
    m: QParams,
    v: QParams,
    t: i32,
}

impl Adam {
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(dims: QDims) -> Self {
        Adam {
            m: QParams::zeros(dims),
            v: QParams::zeros(dims),
            t: 0,
        }
    }

    fn apply(&mut self, params: &mut QParams, grads: &QParams, lr: f64) {
        self.t += 1;
        let c1 = 1.0 - Self::B1.powi(self.t);
        let c2 = 1.0 - Self::B2.powi(self.t);
        let groups = params
            .groups_mut()
            .into_iter()
            .zip(self.m.groups_mut())
            .zip(self.v.groups_mut())
            .zip(grads.groups());
        for (((p, m), v), g) in groups {
            for i in 0..p.len() {
                m[i] = Self::B1 * m[i] + (1.0 - Self::B1) * g[i];
                v[i] = Self::B2 * v[i] + (1.0 - Self::B2) * g[i] * g[i];
                p[i] -= lr * (m[i] / c1) / ((v[i] / c2).sqrt() + Self::EPS);
            }
        }
    }
}

/// Online learner: owns the online and target networks, the replay buffer,
/// the exploration schedule and its own random stream.
pub struct DqnAgent {
    pub cfg: AgentConfig,
    params: QParams,
    target: QParams,
    replay: ReplayBuffer,
    rng: ChaCha8Rng,
    adam: Option<Adam>,
    steps: u64,
    planned_steps: u64,
    updates: u64,
    last_loss: Option<f64>,
}

impl DqnAgent {
    pub fn new(cfg: AgentConfig, dims: QDims, seed: u64) -> Result<Self, QError> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = QParams::random(dims, cfg.init_scale, &mut rng);
        if cfg.zero_init_output {
            params.head_w2.fill(0.0);
            params.head_b2.fill(0.0);
        }
        Ok(Self::with_params(cfg, params, rng))
    }

    pub fn from_params(cfg: AgentConfig, params: QParams, seed: u64) -> Result<Self, QError> {
        cfg.validate()?;
        params.check_shapes()?;
        Ok(Self::with_params(cfg, params, ChaCha8Rng::seed_from_u64(seed)))
    }

    fn with_params(cfg: AgentConfig, params: QParams, rng: ChaCha8Rng) -> Self {
        DqnAgent {
            adam: (cfg.optimizer == Optimizer::Adam).then(|| Adam::new(params.dims)),
            replay: ReplayBuffer::new(cfg.replay_capacity),
            target: params.clone(),
            params,
            rng,
            steps: 0,
            planned_steps: 0,
            updates: 0,
            last_loss: None,
            cfg,
        }
    }

    /// Total number of environment steps the run expects; drives the
    /// epsilon schedule.
    pub fn plan_steps(&mut self, total: u64) {
        self.planned_steps = total;
    }

    pub fn params(&self) -> &QParams {
        &self.params
    }

    pub fn target_params(&self) -> &QParams {
        &self.target
    }

    pub fn replay(&self) -> &ReplayBuffer {
        &self.replay
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn last_loss(&self) -> Option<f64> {
        self.last_loss
    }

    pub fn epsilon(&self) -> f64 {
        epsilon_at(&self.cfg, self.steps, self.planned_steps)
    }

    pub fn q(&self, ids: &[u32]) -> Result<Vec<f64>, QError> {
        Ok(forward(&self.params, ids)?.q)
    }

    /// Epsilon-greedy action under the current schedule.
    pub fn act(&mut self, ids: &[u32]) -> Result<usize, QError> {
        let eps = self.epsilon();
        if eps > 0.0 && self.rng.random::<f64>() < eps {
            return Ok(self.rng.random_range(0..self.params.dims.action_count));
        }
        Ok(argmax(&self.q(ids)?))
    }

    /// One optimizer update on `batch` against the current target network.
    /// Returns the loss before the update.
    pub fn fit_batch(&mut self, batch: &[&ReplayEntry]) -> Result<f64, QError> {
        let (l, grads) = loss_and_grad(&self.params, &self.target, batch, self.cfg.gamma)?;
        match &mut self.adam {
            Some(adam) => adam.apply(&mut self.params, &grads, self.cfg.learning_rate),
            None => self.params.add_scaled(-self.cfg.learning_rate, &grads),
        }
        if !self.params.is_finite() {
            return Err(QError::Numerical(format!(
                "parameters diverged after update {}",
                self.updates + 1
            )));
        }
        self.updates += 1;
        self.last_loss = Some(l);
        Ok(l)
    }

    /// Stores a transition, counts one environment step, trains when due
    /// and syncs the target network every `target_update` steps. Returns
    /// the loss if an update happened.
    pub fn observe(&mut self, entry: ReplayEntry) -> Result<Option<f64>, QError> {
        if !entry.r_total.is_finite() {
            return Err(QError::Numerical(format!("non-finite reward {}", entry.r_total)));
        }
        self.replay.push(entry);
        self.steps += 1;
        let mut loss = None;
        if self.replay.len() >= self.cfg.learning_starts.max(1)
            && self.steps % self.cfg.train_every as u64 == 0
        {
            let batch: Vec<ReplayEntry> = self
                .replay
                .sample(self.cfg.batch_size, self.cfg.rho, &mut self.rng)
                .into_iter()
                .cloned()
                .collect();
            let refs: Vec<&ReplayEntry> = batch.iter().collect();
            loss = Some(self.fit_batch(&refs)?);
        }
        if self.steps % self.cfg.target_update as u64 == 0 {
            self.target.clone_from(&self.params);
        }
        Ok(loss)
    }
}

/// Plays a checkpoint with a fixed epsilon.
pub struct AgentPolicy {
    ckpt: Checkpoint,
    epsilon: f64,
    rng: ChaCha8Rng,
}

impl AgentPolicy {
    pub fn new(ckpt: Checkpoint, epsilon: f64, seed: u64) -> Self {
        AgentPolicy {
            ckpt,
            epsilon,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Policy for AgentPolicy {
    fn begin_episode(&mut self, _spec: &GameSpec) {}

    fn act(&mut self, _state: &EnvState<'_>, obs: &str) -> String {
        let ids = encode_text(&self.ckpt.vocab, obs, self.ckpt.max_tokens);
        let q = forward(&self.ckpt.params, &ids)
            .map(|f| f.q)
            .unwrap_or_else(|_| vec![0.0; self.ckpt.actions.len()]);
        let a = select_action(&q, self.epsilon, &mut self.rng);
        self.ckpt.actions[a].clone()
    }
}
