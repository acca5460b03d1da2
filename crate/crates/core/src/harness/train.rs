use std::collections::HashMap;
use std::fs;

use serde::{Deserialize, Serialize};

use super::config::{RunConfig, ScorerFallback};
use super::report::{curve_svg, epochs_csv, summary_csv};
use super::{make_scorer, HarnessError};
use crate::envsim::{observation_corpus, reset, walkthrough, GameSpec};
use crate::qagent::{encode_text, Checkpoint, DqnAgent, ReplayEntry, CHECKPOINT_VERSION};
use crate::sentiment::SentimentScorer;
use crate::textcore::{tokenize, Vocabulary};

/// Where the actions come from during training. Anything other than
/// `Agent` is a test hook; the agent still learns from the transitions.
#[derive(Debug, Clone, PartialEq)]
pub enum ActionSource {
    Agent,
    Walkthrough,
    /// the same command list replayed every episode, cycling when it runs out
    Script(Vec<String>),
}

#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub actions: ActionSource,
    /// end the run after the first winning episode
    pub stop_on_first_win: bool,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            actions: ActionSource::Agent,
            stop_on_first_win: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    pub action: String,
    pub r_env: f64,
    /// effective (post-gate) polarity of the resulting observation
    pub polarity: f64,
    pub r_total: f64,
    pub done: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub epoch: usize,
    pub game_index: usize,
    pub game_id: String,
    pub episode: usize,
    pub won: bool,
    pub steps: Vec<StepLog>,
}

impl EpisodeLog {
    pub fn env_score(&self) -> f64 {
        self.steps.iter().map(|s| s.r_env).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochReport {
    pub epoch: usize,
    pub per_game: Vec<f64>,
    pub epoch_score: f64,
    pub aggregated: f64,
    pub max_score: f64,
}

/// Rebuilds the epoch reports from episode logs. Only `r_env` is read.
/// Several episodes of one game in one epoch are summed.
pub fn reports_from_logs(logs: &[EpisodeLog], games: usize) -> Vec<EpochReport> {
    let epochs = logs.iter().map(|l| l.epoch + 1).max().unwrap_or(0);
    let mut reports = Vec::with_capacity(epochs);
    let mut aggregated = 0.0;
    let mut max_score = f64::NEG_INFINITY;
    for epoch in 0..epochs {
        let mut per_game = vec![0.0; games];
        for l in logs.iter().filter(|l| l.epoch == epoch) {
            per_game[l.game_index] += l.env_score();
        }
        let epoch_score: f64 = per_game.iter().sum();
        aggregated += epoch_score;
        max_score = max_score.max(epoch_score);
        reports.push(EpochReport {
            epoch,
            per_game,
            epoch_score,
            aggregated,
            max_score,
        });
    }
    reports
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub game_ids: Vec<String>,
    pub reports: Vec<EpochReport>,
    pub logs: Vec<EpisodeLog>,
    pub checkpoint: Checkpoint,
    pub scorer_failures: usize,
    /// 1-based index of the first winning episode over the whole run
    pub first_win_episode: Option<usize>,
    pub episodes_run: usize,
    pub updates: u64,
}

impl TrainOutcome {
    pub fn aggregated(&self) -> f64 {
        self.reports.last().map_or(0.0, |r| r.aggregated)
    }

    pub fn max_score(&self) -> f64 {
        self.reports.last().map_or(0.0, |r| r.max_score)
    }
}

/// Union of the games' commands in first-appearance order.
pub fn action_space(games: &[GameSpec]) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    games
        .iter()
        .flat_map(|g| g.commands.iter())
        .filter(|c| seen.insert(c.as_str()))
        .cloned()
        .collect()
}

pub fn build_vocabulary(games: &[GameSpec], random_episodes: usize, seed: u64) -> Vocabulary {
    let docs: Vec<Vec<String>> = games
        .iter()
        .flat_map(|g| observation_corpus(g, random_episodes, seed))
        .map(|t| tokenize(&t))
        .collect();
    Vocabulary::build(&docs, 1)
}

struct PolarityCache<'a> {
    scorer: &'a mut dyn SentimentScorer,
    fallback: ScorerFallback,
    cache: HashMap<String, f64>,
    failures: usize,
}

impl PolarityCache<'_> {
    fn get(&mut self, text: &str) -> Result<f64, HarnessError> {
        if let Some(&p) = self.cache.get(text) {
            return Ok(p);
        }
        match self.scorer.score(text) {
            Ok(s) => {
                self.cache.insert(text.to_string(), s.value);
                Ok(s.value)
            }
            Err(e) => match self.fallback {
                ScorerFallback::Zero => {
                    self.failures += 1;
                    Ok(0.0)
                }
                ScorerFallback::Abort => Err(e.into()),
            },
        }
    }
}

/// Runs the epoch/game/episode loop. Every transition's resulting
/// observation is scored, gated and folded into the replay reward; reports
/// count environment reward only.
pub fn train(
    cfg: &RunConfig,
    games: &[GameSpec],
    scorer: &mut dyn SentimentScorer,
    opts: &TrainOptions,
) -> Result<TrainOutcome, HarnessError> {
    cfg.validate()?;
    if games.is_empty() {
        return Err(HarnessError::Config("empty game set".into()));
    }
    let actions = action_space(games);
    let action_index: HashMap<&str, usize> =
        actions.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
    let vocab = build_vocabulary(games, cfg.vocab_episodes, cfg.seed);
    let mut agent = DqnAgent::new(cfg.agent.clone(), cfg.agent.dims(vocab.len(), actions.len()), cfg.seed)?;
    let planned: usize = games.iter().map(|g| g.max_steps).sum::<usize>() * cfg.epochs * cfg.episodes_per_game;
    agent.plan_steps(planned as u64);

    let mut scores = PolarityCache {
        scorer,
        fallback: cfg.scorer_fallback,
        cache: HashMap::new(),
        failures: 0,
    };
    let mut encoded: HashMap<String, Vec<u32>> = HashMap::new();
    let mut encode = |text: &str| -> Vec<u32> {
        encoded
            .entry(text.to_string())
            .or_insert_with(|| encode_text(&vocab, text, cfg.agent.max_tokens))
            .clone()
    };

    let mut logs = Vec::new();
    let mut first_win = None;
    let mut episodes_run = 0;
    'run: for epoch in 0..cfg.epochs {
        for (gi, game) in games.iter().enumerate() {
            for episode in 0..cfg.episodes_per_game {
                let (mut state, mut obs) = reset(game);
                let mut obs_ids = encode(&obs);
                let mut steps = Vec::new();
                while !state.done() {
                    let a = match &opts.actions {
                        ActionSource::Agent => agent.act(&obs_ids)?,
                        ActionSource::Walkthrough => lookup(&action_index, walkthrough(game).get(steps.len()))?,
                        ActionSource::Script(s) => lookup(&action_index, s.get(steps.len() % s.len().max(1)))?,
                    };
                    let out = state.step(&actions[a])?;
                    let polarity = cfg.shaping.effective_polarity(scores.get(&out.obs_text)?);
                    let r_total = out.r_env + cfg.shaping.scale * polarity;
                    let next_ids = encode(&out.obs_text);
                    agent.observe(ReplayEntry {
                        obs: obs_ids,
                        action: a,
                        r_total,
                        next_obs: next_ids.clone(),
                        done: out.done,
                    })?;
                    steps.push(StepLog {
                        action: actions[a].clone(),
                        r_env: out.r_env,
                        polarity,
                        r_total,
                        done: out.done,
                    });
                    obs = out.obs_text;
                    obs_ids = next_ids;
                }
                let _ = obs;
                episodes_run += 1;
                let won = state.won();
                if won && first_win.is_none() {
                    first_win = Some(episodes_run);
                }
                logs.push(EpisodeLog {
                    epoch,
                    game_index: gi,
                    game_id: game.id(),
                    episode,
                    won,
                    steps,
                });
                if won && opts.stop_on_first_win {
                    break 'run;
                }
            }
        }
    }

    Ok(TrainOutcome {
        game_ids: games.iter().map(|g| g.id()).collect(),
        reports: reports_from_logs(&logs, games.len()),
        logs,
        checkpoint: Checkpoint {
            version: CHECKPOINT_VERSION,
            vocab: vocab.clone(),
            actions: actions.clone(),
            max_tokens: cfg.agent.max_tokens,
            params: agent.params().clone(),
        },
        scorer_failures: scores.failures,
        first_win_episode: first_win,
        episodes_run,
        updates: agent.updates(),
    })
}

fn lookup(index: &HashMap<&str, usize>, action: Option<&String>) -> Result<usize, HarnessError> {
    let action = action.map(String::as_str).unwrap_or("look");
    index
        .get(action)
        .copied()
        .ok_or_else(|| HarnessError::Usage(format!("scripted action '{action}' is not in the action space")))
}

/// Full `train` command: resolves games and scorer, trains, and writes
/// `epochs.csv`, `summary.csv`, `curve.svg`, `episodes.jsonl` and
/// `checkpoint.json` when an output directory is configured.
pub fn cmd_train(cfg: &RunConfig) -> Result<TrainOutcome, HarnessError> {
    cfg.validate()?;
    let games = cfg.resolve_games()?;
    let mut scorer = make_scorer(&cfg.shaping.scorer)?;
    let outcome = train(cfg, &games, scorer.as_mut(), &TrainOptions::default())?;
    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        let write = |name: &str, body: String| {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| HarnessError::io(&p, e))
        };
        write("epochs.csv", epochs_csv(&outcome.reports, &outcome.game_ids))?;
        write("summary.csv", summary_csv(&outcome.reports, outcome.scorer_failures))?;
        write("curve.svg", curve_svg(&outcome.reports))?;
        let mut lines = String::new();
        for l in &outcome.logs {
            lines.push_str(&serde_json::to_string(l).expect("log serializes"));
            lines.push('\n');
        }
        write("episodes.jsonl", lines)?;
        write(
            "run_config.json",
            serde_json::to_string_pretty(cfg).expect("config serializes") + "\n",
        )?;
        outcome.checkpoint.save(&dir.join("checkpoint.json"))?;
    }
    Ok(outcome)
}
