use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::HarnessError;
use crate::envsim::{
    generate_game, rollout, GameKind, GameParams, GameSpec, Label, Policy, RandomPolicy,
    Trajectory, WalkthroughPolicy,
};
use crate::qagent::{AgentPolicy, Checkpoint};
use crate::sentiment::{fit_naive_bayes, NBModel, NbError, SentimentScorer};
use crate::stats::{
    label_correlations, last_k_table_from_polarities, mean_share, prf1, step_polarities,
    CorrelationResult, LastKEntry, MetricsReport, StatsError,
};
use crate::textcore::{load_trajectories, save_trajectories};

/// Writes `count` specs with seeds `seed..seed + count` as `<id>.json`.
pub fn gen_games(
    kind: GameKind,
    count: usize,
    seed: u64,
    params: &GameParams,
    out_dir: &Path,
    force: bool,
) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let specs: Vec<GameSpec> = (0..count as u64)
        .map(|i| generate_game(kind, seed + i, params))
        .collect::<Result<_, _>>()?;
    let mut paths = Vec::with_capacity(count);
    for spec in &specs {
        let path = out_dir.join(format!("{}.json", spec.id()));
        if path.exists() && !force {
            return Err(HarnessError::Usage(format!(
                "{} exists (use --force to overwrite)",
                path.display()
            )));
        }
        paths.push(path);
    }
    for (spec, path) in specs.iter().zip(&paths) {
        fs::write(path, spec.to_json()).map_err(|e| HarnessError::io(path, e))?;
    }
    Ok(paths)
}

pub fn load_spec(path: &Path) -> Result<GameSpec, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    Ok(GameSpec::from_json(&text)?)
}

/// `random`, `walkthrough` or `agent:<checkpoint>`.
pub fn make_policy(name: &str, seed: u64) -> Result<Box<dyn Policy>, HarnessError> {
    match name {
        "random" => Ok(Box::new(RandomPolicy::new(seed))),
        "walkthrough" => Ok(Box::new(WalkthroughPolicy::default())),
        _ => match name.strip_prefix("agent:") {
            Some(path) => {
                let ck = Checkpoint::load(Path::new(path))?;
                Ok(Box::new(AgentPolicy::new(ck, 0.0, seed)))
            }
            None => Err(HarnessError::Usage(format!(
                "unknown policy '{name}' (expected random, walkthrough or agent:<checkpoint>)"
            ))),
        },
    }
}

/// `n` rollouts per spec. Random episode `j` of spec `i` uses seed
/// `seed + i * n + j`.
pub fn rollouts(
    specs: &[GameSpec],
    policy: &str,
    n: usize,
    seed: u64,
    max_steps: Option<usize>,
) -> Result<Vec<Trajectory>, HarnessError> {
    make_policy(policy, seed)?;
    let mut out = Vec::with_capacity(specs.len() * n);
    for (i, spec) in specs.iter().enumerate() {
        for j in 0..n {
            let mut p = make_policy(policy, seed + (i * n + j) as u64)?;
            out.push(rollout(spec, p.as_mut(), max_steps));
        }
    }
    Ok(out)
}

pub fn cmd_rollout(
    spec_paths: &[PathBuf],
    policy: &str,
    n: usize,
    seed: u64,
    max_steps: Option<usize>,
    out: &Path,
) -> Result<Vec<Trajectory>, HarnessError> {
    let specs: Vec<GameSpec> = spec_paths.iter().map(|p| load_spec(p)).collect::<Result<_, _>>()?;
    let trajs = rollouts(&specs, policy, n, seed, max_steps)?;
    save_trajectories(out, &trajs).map_err(|e| HarnessError::io(out, e))?;
    Ok(trajs)
}

#[derive(Debug, Clone)]
pub struct FitNbOutcome {
    pub model: NBModel,
    pub heldout: MetricsReport,
    pub train_docs: usize,
    pub test_docs: usize,
}

/// Seeded split of each class into 80% train and 20% held out (at least one
/// held-out document per class when the class has two or more).
fn split(docs: Vec<String>, rng: &mut ChaCha8Rng) -> (Vec<String>, Vec<String>) {
    let mut docs = docs;
    docs.shuffle(rng);
    let test = if docs.len() >= 2 { ((docs.len() as f64 * 0.2).round() as usize).max(1) } else { 0 };
    let train = docs.split_off(test);
    (train, docs)
}

/// Fits NB on trajectory documents: everything in `pos_path` is positive,
/// everything in `neg_path` negative. Reports P/R/F1 on the held-out 20%
/// and returns the model fitted on the other 80%.
pub fn fit_nb(
    pos: &[Trajectory],
    neg: &[Trajectory],
    alpha: f64,
    seed: u64,
) -> Result<FitNbOutcome, HarnessError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(NbError::Config(format!("alpha must be > 0, got {alpha}")).into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let docs = |ts: &[Trajectory]| ts.iter().map(Trajectory::document).collect::<Vec<_>>();
    let (pos_train, pos_test) = split(docs(pos), &mut rng);
    let (neg_train, neg_test) = split(docs(neg), &mut rng);
    let model = fit_naive_bayes(&pos_train, &neg_train, alpha)?;
    let mut predicted = Vec::new();
    let mut truth = Vec::new();
    for (docs, label) in [(&pos_test, true), (&neg_test, false)] {
        for d in docs {
            predicted.push(model.prob_positive(d) >= 0.5);
            truth.push(label);
        }
    }
    let heldout = prf1(&predicted, &truth, &true)?;
    Ok(FitNbOutcome {
        model,
        heldout,
        train_docs: pos_train.len() + neg_train.len(),
        test_docs: truth.len(),
    })
}

pub fn cmd_fit_nb(pos_path: &Path, neg_path: &Path, alpha: f64, seed: u64, out: &Path) -> Result<FitNbOutcome, HarnessError> {
    let pos = load_trajectories(pos_path)?;
    let neg = load_trajectories(neg_path)?;
    let outcome = fit_nb(&pos, &neg, alpha, seed)?;
    outcome.model.save(out)?;
    Ok(outcome)
}

pub const SENTIMENT_MAPPING: &str = "(polarity+1)/2";

#[derive(Debug)]
pub struct AnalyzeOutcome {
    pub means: Vec<f64>,
    pub full_spearman: Result<CorrelationResult, StatsError>,
    pub full_point_biserial: Result<CorrelationResult, StatsError>,
    pub last_k: Vec<LastKEntry>,
}

pub fn analyze<S: SentimentScorer + ?Sized>(
    trajectories: &[Trajectory],
    scorer: &mut S,
    ks: &[usize],
) -> Result<AnalyzeOutcome, HarnessError> {
    let pol = step_polarities(trajectories, scorer)?;
    let means: Vec<f64> = pol.iter().map(|p| mean_share(p, None)).collect();
    let (labels, values): (Vec<u8>, Vec<f64>) = trajectories
        .iter()
        .zip(&means)
        .filter_map(|(t, &m)| match t.label {
            Label::Win => Some((1, m)),
            Label::Loss => Some((0, m)),
            Label::Unlabeled => None,
        })
        .unzip();
    let (full_spearman, full_point_biserial) = label_correlations(&labels, &values);
    let last_k = last_k_table_from_polarities(trajectories, &pol, ks)?;
    Ok(AnalyzeOutcome { means, full_spearman, full_point_biserial, last_k })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |v| format!("{v}"))
}

fn corr_cells(c: &Result<CorrelationResult, StatsError>) -> String {
    match c {
        Ok(c) => format!("{},{}", c.r, opt(c.p)),
        Err(_) => "undefined,undefined".to_string(),
    }
}

impl AnalyzeOutcome {
    pub fn full_csv(&self, trajectories: &[Trajectory]) -> String {
        let mut s = String::from("game_id,label,steps,mean_pos_sentiment,sentiment_mapping\n");
        for (t, m) in trajectories.iter().zip(&self.means) {
            let label = serde_json::to_value(t.label).expect("label serializes");
            writeln!(s, "{},{},{},{},{}", t.game_id, label.as_str().unwrap_or(""), t.steps.len(), m, SENTIMENT_MAPPING).unwrap();
        }
        s
    }

    pub fn full_corr_csv(&self) -> String {
        format!(
            "spearman_r,spearman_p,point_biserial_r,point_biserial_p\n{},{}\n",
            corr_cells(&self.full_spearman),
            corr_cells(&self.full_point_biserial)
        )
    }

    pub fn last_k_csv(&self) -> String {
        let mut s = String::from("k,n_win,n_loss,mean_pos_win,mean_pos_loss,difference,sigma\n");
        for e in &self.last_k {
            let r = &e.row;
            writeln!(s, "{},{},{},{},{},{},{}", r.k, r.n_win, r.n_loss, opt(r.mean_pos_win), opt(r.mean_pos_loss), opt(r.difference), r.sigma).unwrap();
        }
        s
    }

    pub fn last_k_corr_csv(&self) -> String {
        let mut s = String::from("k,spearman_r,spearman_p,point_biserial_r,point_biserial_p\n");
        for e in &self.last_k {
            writeln!(s, "{},{},{}", e.row.k, corr_cells(&e.spearman), corr_cells(&e.point_biserial)).unwrap();
        }
        s
    }

    /// Writes `full.csv`, `full_corr.csv`, `last_k.csv` and `last_k_corr.csv`.
    pub fn write(&self, trajectories: &[Trajectory], out_dir: &Path) -> Result<(), HarnessError> {
        fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
        for (name, body) in [
            ("full.csv", self.full_csv(trajectories)),
            ("full_corr.csv", self.full_corr_csv()),
            ("last_k.csv", self.last_k_csv()),
            ("last_k_corr.csv", self.last_k_corr_csv()),
        ] {
            let p = out_dir.join(name);
            fs::write(&p, body).map_err(|e| HarnessError::io(&p, e))?;
        }
        Ok(())
    }
}

/// Trajectory files given directly, or every `*.jsonl` in a directory.
pub fn collect_trajectories(paths: &[PathBuf]) -> Result<Vec<Trajectory>, HarnessError> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut inner: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| HarnessError::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "jsonl"))
                .collect();
            inner.sort();
            files.extend(inner);
        } else {
            files.push(p.clone());
        }
    }
    let mut out = Vec::new();
    for f in files {
        out.extend(load_trajectories(&f)?);
    }
    Ok(out)
}
