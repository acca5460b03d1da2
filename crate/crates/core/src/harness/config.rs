use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::HarnessError;
use crate::envsim::{generate_game, GameKind, GameParams, GameSpec};
use crate::qagent::AgentConfig;
use crate::sentiment::ShapingConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScorerFallback {
    /// treat the failed call as polarity 0 and keep going
    Zero,
    Abort,
}

/// Accepts `true`/`false` as well as `"on"`/`"off"`.
pub(crate) mod on_off {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Bool(bool),
        Word(String),
    }

    pub fn serialize<S: Serializer>(v: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(if *v { "on" } else { "off" })
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Bool(b) => Ok(b),
            Repr::Word(w) => parse(&w).map_err(serde::de::Error::custom),
        }
    }

    pub fn parse(w: &str) -> Result<bool, String> {
        match w {
            "on" | "true" => Ok(true),
            "off" | "false" => Ok(false),
            other => Err(format!("expected on or off, got '{other}'")),
        }
    }
}

pub use on_off::parse as parse_on_off;

/// Everything a training run needs. Serialized keys match the CLI flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// spec files to train on; when empty, `count` games are generated
    pub games: Vec<PathBuf>,
    pub kind: GameKind,
    pub count: usize,
    pub game_seed: u64,
    pub rooms: usize,
    pub chain_length: usize,
    pub tree_depth: usize,
    pub max_steps: Option<usize>,
    pub epochs: usize,
    pub episodes_per_game: usize,
    #[serde(with = "on_off")]
    pub intermediate: bool,
    #[serde(flatten)]
    pub shaping: ShapingConfig,
    pub agent: AgentConfig,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub scorer_fallback: ScorerFallback,
    /// random episodes per game mixed into the vocabulary corpus
    pub vocab_episodes: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            games: Vec::new(),
            kind: GameKind::Cooking,
            count: 10,
            game_seed: 0,
            rooms: GameParams::default().rooms,
            chain_length: GameParams::default().chain_length,
            tree_depth: GameParams::default().tree_depth,
            max_steps: None,
            epochs: 20,
            episodes_per_game: 1,
            intermediate: true,
            shaping: ShapingConfig::default(),
            agent: AgentConfig::default(),
            seed: 0,
            out: None,
            scorer_fallback: ScorerFallback::Zero,
            vocab_episodes: 20,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.epochs == 0 {
            return Err(HarnessError::Config("epochs must be >= 1".into()));
        }
        if self.episodes_per_game == 0 {
            return Err(HarnessError::Config("episodes_per_game must be >= 1".into()));
        }
        if self.games.is_empty() && self.count == 0 {
            return Err(HarnessError::Config("no games: give spec paths or count >= 1".into()));
        }
        self.shaping.validate().map_err(HarnessError::Config)?;
        self.agent.validate()?;
        Ok(())
    }

    pub fn game_params(&self) -> GameParams {
        GameParams {
            rooms: self.rooms,
            chain_length: self.chain_length,
            tree_depth: self.tree_depth,
            max_steps: self.max_steps,
            intermediate_rewards: self.intermediate,
        }
    }

    /// Loads or generates the game set, with the intermediate-reward mode
    /// of this config applied.
    pub fn resolve_games(&self) -> Result<Vec<GameSpec>, HarnessError> {
        if self.games.is_empty() {
            let params = self.game_params();
            return (0..self.count as u64)
                .map(|i| Ok(generate_game(self.kind, self.game_seed + i, &params)?))
                .collect();
        }
        self.games
            .iter()
            .map(|p| {
                let text = fs::read_to_string(p).map_err(|e| HarnessError::io(p, e))?;
                Ok(GameSpec::from_json(&text)?.with_intermediate_rewards(self.intermediate))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keys_match_flags() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"epochs": 3, "scale": 0.2, "threshold": 0.5, "gate": false,
                "scorer": "none", "intermediate": "off", "seed": 9, "out": "runs/a"}"#,
        )
        .unwrap();
        assert_eq!(cfg.epochs, 3);
        assert_eq!(cfg.shaping.scale, 0.2);
        assert_eq!(cfg.shaping.tau, 0.5);
        assert!(!cfg.shaping.gate_enabled);
        assert!(!cfg.intermediate);
        assert_eq!(cfg.out, Some(PathBuf::from("runs/a")));
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn validation() {
        assert!(RunConfig::default().validate().is_ok());
        assert!(RunConfig { epochs: 0, ..Default::default() }.validate().is_err());
        let mut c = RunConfig::default();
        c.shaping.scale = 3.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn generated_games_follow_mode() {
        let c = RunConfig { kind: GameKind::Cooking, count: 3, rooms: 3, intermediate: false, ..Default::default() };
        let games = c.resolve_games().unwrap();
        assert_eq!(games.len(), 3);
        assert!(games.iter().all(|g| g.max_score == 1 && !g.intermediate_rewards));
    }
}
