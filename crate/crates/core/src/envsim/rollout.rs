use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::spec::GameSpec;
use super::state::{reset, EnvState};
use super::templates::{NEGATIVE, NEUTRAL, POSITIVE};
use super::trajectory::{Label, Trajectory, Transition};

/// Chooses the next action text for an episode.
pub trait Policy {
    fn begin_episode(&mut self, _spec: &GameSpec) {}
    fn act(&mut self, state: &EnvState<'_>, obs: &str) -> String;
}

/// Uniform choice over the state's valid actions.
pub struct RandomPolicy {
    rng: ChaCha8Rng,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        RandomPolicy {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Policy for RandomPolicy {
    fn act(&mut self, state: &EnvState<'_>, _obs: &str) -> String {
        state
            .valid_actions()
            .choose(&mut self.rng)
            .cloned()
            .unwrap_or_else(|| "look".to_string())
    }
}

/// Replays the game's recorded solution.
#[derive(Default)]
pub struct WalkthroughPolicy {
    actions: Vec<String>,
    next: usize,
}

impl Policy for WalkthroughPolicy {
    fn begin_episode(&mut self, spec: &GameSpec) {
        self.actions = spec.solution.clone();
        self.next = 0;
    }

    fn act(&mut self, _state: &EnvState<'_>, _obs: &str) -> String {
        let a = self
            .actions
            .get(self.next)
            .cloned()
            .unwrap_or_else(|| "look".to_string());
        self.next += 1;
        a
    }
}

/// Runs one episode to termination (or `max_steps`, whichever is first).
pub fn rollout(spec: &GameSpec, policy: &mut dyn Policy, max_steps: Option<usize>) -> Trajectory {
    let cap = max_steps.unwrap_or(spec.max_steps);
    policy.begin_episode(spec);
    let (mut state, mut obs) = reset(spec);
    let mut steps = Vec::new();
    while !state.done() && steps.len() < cap {
        let action = policy.act(&state, &obs);
        let out = state.step(&action).expect("episode is not done");
        steps.push(Transition {
            obs_text: std::mem::take(&mut obs),
            action_text: action,
            r_env: out.r_env,
            next_obs_text: out.obs_text.clone(),
            done: out.done,
        });
        obs = out.obs_text;
    }
    Trajectory {
        game_id: spec.id(),
        label: if state.won() { Label::Win } else { Label::Loss },
        steps,
    }
}

/// Text a game can produce: the phrase banks, the walkthrough episode and
/// `random_episodes` seeded random episodes. Used to build agent vocabularies.
pub fn observation_corpus(spec: &GameSpec, random_episodes: usize, seed: u64) -> Vec<String> {
    let mut texts: Vec<String> = POSITIVE
        .iter()
        .chain(NEGATIVE)
        .chain(NEUTRAL)
        .map(|s| s.to_string())
        .collect();
    texts.extend(spec.commands.iter().cloned());
    let mut add = |t: Trajectory| texts.extend(t.observations().map(String::from));
    add(rollout(spec, &mut WalkthroughPolicy::default(), None));
    for i in 0..random_episodes {
        add(rollout(
            spec,
            &mut RandomPolicy::new(seed.wrapping_add(i as u64)),
            None,
        ));
    }
    texts
}
