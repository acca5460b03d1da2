use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use senti_shape::envsim::{GameKind, GameParams};
use senti_shape::harness::{self, parse_on_off, HarnessError, RunConfig, ScorerFallback};
use senti_shape::sentiment::ScorerSpec;
use senti_shape::stats::DEFAULT_KS;
use senti_shape::textcore::save_trajectories;

#[derive(Parser)]
#[command(name = "senti-shape", version, about = "Sentiment-shaped rewards for text games")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

fn on_off(s: &str) -> Result<bool, String> {
    parse_on_off(s)
}

#[derive(Subcommand)]
enum Cmd {
    /// Write seeded game specs
    GenGames {
        #[arg(long, default_value = "cooking")]
        kind: GameKind,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        rooms: usize,
        #[arg(long, default_value_t = 7)]
        chain_length: usize,
        #[arg(long, default_value_t = 4)]
        tree_depth: usize,
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long, default_value = "on", value_parser = on_off)]
        intermediate: bool,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Run a policy on specs and save the trajectories
    Rollout {
        #[arg(long = "spec", required = true, num_args = 1..)]
        specs: Vec<PathBuf>,
        /// random, walkthrough or agent:<checkpoint>
        #[arg(long, default_value = "random")]
        policy: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit naive Bayes on positive and negative trajectory files
    FitNb {
        #[arg(long)]
        pos: PathBuf,
        #[arg(long)]
        neg: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the DQN agent; flags override the config file
    Train(TrainArgs),
    /// Sentiment/outcome correlation tables
    Analyze {
        #[arg(long = "traj", required = true, num_args = 1..)]
        trajs: Vec<PathBuf>,
        #[arg(long, default_value = "none")]
        scorer: ScorerSpec,
        #[arg(long, value_delimiter = ',')]
        ks: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Play a game in the terminal
    Play {
        #[arg(long)]
        spec: PathBuf,
        /// where to save the trajectory
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct TrainArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "game", num_args = 1..)]
    games: Vec<PathBuf>,
    #[arg(long)]
    kind: Option<GameKind>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    game_seed: Option<u64>,
    #[arg(long)]
    rooms: Option<usize>,
    #[arg(long)]
    chain_length: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    episodes_per_game: Option<usize>,
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long, value_parser = on_off)]
    gate: Option<bool>,
    #[arg(long)]
    scorer: Option<ScorerSpec>,
    #[arg(long, value_parser = on_off)]
    intermediate: Option<bool>,
    #[arg(long)]
    scorer_fallback: Option<String>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl TrainArgs {
    fn into_config(self) -> Result<RunConfig, HarnessError> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if !self.games.is_empty() {
            c.games = self.games;
        }
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field { $target = v; })*
            };
        }
        set! {
            kind => c.kind,
            count => c.count,
            game_seed => c.game_seed,
            rooms => c.rooms,
            chain_length => c.chain_length,
            epochs => c.epochs,
            episodes_per_game => c.episodes_per_game,
            scale => c.shaping.scale,
            threshold => c.shaping.tau,
            gate => c.shaping.gate_enabled,
            scorer => c.shaping.scorer,
            intermediate => c.intermediate,
            learning_rate => c.agent.learning_rate,
            seed => c.seed,
        }
        if let Some(f) = self.scorer_fallback {
            c.scorer_fallback = match f.as_str() {
                "zero" => ScorerFallback::Zero,
                "abort" => ScorerFallback::Abort,
                other => return Err(HarnessError::Config(format!("scorer_fallback must be zero or abort, got '{other}'"))),
            };
        }
        if self.out.is_some() {
            c.out = self.out;
        }
        Ok(c)
    }
}

fn run(cmd: Cmd) -> Result<(), HarnessError> {
    match cmd {
        Cmd::GenGames { kind, count, seed, rooms, chain_length, tree_depth, max_steps, intermediate, out, force } => {
            let params = GameParams { rooms, chain_length, tree_depth, max_steps, intermediate_rewards: intermediate };
            let paths = harness::gen_games(kind, count, seed, &params, &out, force)?;
            println!("wrote {} specs to {}", paths.len(), out.display());
        }
        Cmd::Rollout { specs, policy, n, seed, max_steps, out } => {
            let trajs = harness::cmd_rollout(&specs, &policy, n, seed, max_steps, &out)?;
            let wins = trajs.iter().filter(|t| t.is_win()).count();
            println!("{} trajectories ({wins} wins) -> {}", trajs.len(), out.display());
        }
        Cmd::FitNb { pos, neg, alpha, seed, out } => {
            let r = harness::cmd_fit_nb(&pos, &neg, alpha, seed, &out)?;
            let m = r.heldout;
            println!("train {} / held out {}", r.train_docs, r.test_docs);
            println!("precision {:.4}  recall {:.4}  f1 {:.4}", m.precision, m.recall, m.f1);
            println!("model -> {}", out.display());
        }
        Cmd::Train(args) => {
            let cfg = args.into_config()?;
            let o = harness::cmd_train(&cfg)?;
            for r in &o.reports {
                println!("epoch {:>3}  score {:>6}  aggregated {:>7}  max {:>6}", r.epoch, r.epoch_score, r.aggregated, r.max_score);
            }
            if o.scorer_failures > 0 {
                eprintln!("warning: {} scorer calls failed and were scored 0", o.scorer_failures);
            }
            println!("aggregated {}  max {}", o.aggregated(), o.max_score());
        }
        Cmd::Analyze { trajs, scorer, ks, out } => {
            let ks = if ks.is_empty() { DEFAULT_KS.to_vec() } else { ks };
            let t = harness::collect_trajectories(&trajs)?;
            let mut s = harness::make_scorer(&scorer)?;
            let a = harness::analyze(&t, s.as_mut(), &ks)?;
            a.write(&t, &out)?;
            print!("{}", a.full_corr_csv());
            print!("{}", a.last_k_csv());
        }
        Cmd::Play { spec, out } => {
            let spec = harness::load_spec(&spec)?;
            let stdin = io::stdin();
            let t = harness::play(&spec, stdin.lock(), io::stdout()).map_err(|e| HarnessError::Usage(e.to_string()))?;
            if let Some(p) = out {
                save_trajectories(&p, &[t]).map_err(|e| HarnessError::io(&p, e))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
