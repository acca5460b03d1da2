use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Win,
    Loss,
    Unlabeled,
}

/// One environment step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub obs_text: String,
    pub action_text: String,
    pub r_env: f64,
    pub next_obs_text: String,
    pub done: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub game_id: String,
    pub label: Label,
    pub steps: Vec<Transition>,
}

impl Trajectory {
    pub fn total_env_reward(&self) -> f64 {
        self.steps.iter().map(|s| s.r_env).sum()
    }

    pub fn is_win(&self) -> bool {
        self.label == Label::Win
    }

    /// Every observation the player saw, in order: the first pre-action
    /// observation followed by each step's resulting observation.
    pub fn observations(&self) -> impl Iterator<Item = &str> {
        self.steps
            .first()
            .map(|s| s.obs_text.as_str())
            .into_iter()
            .chain(self.steps.iter().map(|s| s.next_obs_text.as_str()))
    }

    /// All observations joined into a single document.
    pub fn document(&self) -> String {
        self.observations().collect::<Vec<_>>().join(" ")
    }
}
