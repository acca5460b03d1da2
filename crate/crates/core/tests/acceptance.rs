//! Acceptance suite. Prints one line per criterion and exits nonzero if any
//! fails. Pass criterion numbers as arguments to run a subset, e.g.
//! `cargo test --test acceptance -- 6 7`.

mod oracles;

use std::process::ExitCode;
use std::time::Instant;

use oracles::{brute_nb_polarity, gradient_instance, max_gradient_error, median, midranks_def, pearson_def, tabular_first_win, ChainOracle};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use senti_shape::envsim::{generate_game, rollout, templates, GameKind, GameParams, GameSpec, Label, WalkthroughPolicy};
use senti_shape::harness::{epochs_csv, reports_from_logs, train, RunConfig, TrainOptions, TrainOutcome};
use senti_shape::qagent::{loss_and_grad, AgentConfig, Optimizer, Priority, ReplayBuffer, ReplayEntry};
use senti_shape::sentiment::{combine_reward, fit_naive_bayes, gate, nb_polarity, NBModel, NoScorer, SentimentScorer, ShapingConfig};
use senti_shape::stats::{point_biserial, spearman};
use senti_shape::textcore::write_trajectories;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut worst = (0.0, "");
    let mut live = 0;
    for seed in 0..20 {
        let e = max_gradient_error(seed, 1e-4);
        if e.0 > worst.0 {
            worst = e;
        }
        // instances where every parameter group receives some gradient
        let (params, target, entries) = gradient_instance(seed);
        let batch: Vec<&ReplayEntry> = entries.iter().collect();
        let grads = loss_and_grad(&params, &target, &batch, 0.9).map_err(|e| e.to_string())?.1;
        live += usize::from(grads.groups().iter().all(|g| g.iter().any(|&x| x != 0.0)));
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = format!(
        "20 instances ({live} with gradient in every group), max relative error {:.2e} ({}), {secs:.1}s",
        worst.0, worst.1
    );
    ensure(worst.0 < 1e-4 && live >= 15 && secs < 30.0, || detail.clone())?;
    Ok(detail)
}

const WORDS: &[&str] = &["good", "bad", "door", "key", "win", "lose", "dark", "lamp", "fine", "sad"];

fn random_doc(rng: &mut ChaCha8Rng) -> String {
    let n = rng.random_range(1..6);
    (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let pos: Vec<String> = (0..rng.random_range(1..5)).map(|_| random_doc(&mut rng)).collect();
        let neg: Vec<String> = (0..rng.random_range(1..5)).map(|_| random_doc(&mut rng)).collect();
        let alpha = [0.5, 1.0, 2.0][case % 3];
        let model = fit_naive_bayes(&pos, &neg, alpha).map_err(|e| e.to_string())?;
        // queries include words outside the training vocabulary
        for _ in 0..5 {
            let mut q = random_doc(&mut rng);
            if rng.random_bool(0.3) {
                q.push_str(" unseen");
            }
            let got = nb_polarity(&model, &q).value;
            let want = brute_nb_polarity(&pos, &neg, alpha, &q);
            worst = worst.max((got - want).abs());
        }
    }
    ensure(worst < 1e-10, || format!("max deviation {worst:e}"))?;

    let model = fit_naive_bayes(&["good job", "well done"], &["you died"], 1.0).map_err(|e| e.to_string())?;
    let died = nb_polarity(&model, "you died").value;
    let job = nb_polarity(&model, "good job").value;
    ensure((died + 0.515).abs() < 5e-4 && (job - 0.673).abs() < 5e-4, || {
        format!("hand examples: 'you died' {died:.4}, 'good job' {job:.4}")
    })?;
    Ok(format!("100 corpora, max deviation {worst:.1e}; 'you died' {died:.3}, 'good job' {job:+.3}"))
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_pb, mut worst_sp) = (0.0f64, 0.0f64);
    let mut checked = 0;
    while checked < 1000 {
        let n = rng.random_range(4..30);
        let labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        // integer grid values produce ties
        let xs: Vec<f64> = (0..n).map(|_| rng.random_range(0..8) as f64).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let both = labels.contains(&0) && labels.contains(&1);
        let varied = xs.iter().any(|&x| x != xs[0]);
        if !(both && varied) {
            continue;
        }
        checked += 1;
        let coded: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
        let pb = point_biserial(&labels, &ys).map_err(|e| e.to_string())?.r;
        worst_pb = worst_pb.max((pb - pearson_def(&coded, &ys)).abs());
        let sp = spearman(&xs, &ys).map_err(|e| e.to_string())?.r;
        worst_sp = worst_sp.max((sp - pearson_def(&midranks_def(&xs), &midranks_def(&ys))).abs());
    }
    ensure(worst_pb < 1e-12 && worst_sp < 1e-12, || {
        format!("point-biserial deviation {worst_pb:e}, spearman deviation {worst_sp:e}")
    })?;
    let s = spearman(&[1.0, 2.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]).map_err(|e| e.to_string())?.r;
    let pb = point_biserial(&[0, 0, 1, 1], &[1.0, 2.0, 3.0, 4.0]).map_err(|e| e.to_string())?.r;
    ensure((s - 0.9487).abs() < 5e-5 && (pb - 0.8944).abs() < 5e-5, || {
        format!("hand examples: spearman {s:.4}, point-biserial {pb:.4}")
    })?;
    Ok(format!(
        "1000 instances, deviations {worst_pb:.1e} / {worst_sp:.1e}; hand examples {s:.4} and {pb:.4}"
    ))
}

fn criterion_4() -> Check {
    let mut checked = 0;
    for kind in [GameKind::Cooking, GameKind::Chain, GameKind::Tree] {
        for seed in 0..50 {
            let params = GameParams {
                rooms: 2 + (seed as usize % 9),
                ..GameParams::default()
            };
            let spec = generate_game(kind, seed, &params).map_err(|e| e.to_string())?;
            let again = generate_game(kind, seed, &params).map_err(|e| e.to_string())?;
            ensure(spec.to_json() == again.to_json(), || format!("{} spec bytes differ", spec.id()))?;
            let t = rollout(&spec, &mut WalkthroughPolicy::default(), None);
            let score = t.total_env_reward();
            ensure(t.label == Label::Win && score == spec.max_score as f64, || {
                format!("{}: walkthrough scored {score} of {} ({:?})", spec.id(), spec.max_score, t.label)
            })?;
            let t2 = rollout(&again, &mut WalkthroughPolicy::default(), None);
            let bytes = |t| {
                let mut v = Vec::new();
                write_trajectories(&mut v, &[t]).map(|_| v)
            };
            let (a, b) = (bytes(t).map_err(|e| e.to_string())?, bytes(t2).map_err(|e| e.to_string())?);
            ensure(a == b, || format!("{} trajectory bytes differ", spec.id()))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} specs won at max score; specs and trajectories byte-identical on regeneration"))
}

fn small_agent() -> AgentConfig {
    AgentConfig {
        embed_dim: 16,
        hidden_dim: 16,
        mlp_dim: 16,
        batch_size: 8,
        learning_starts: 8,
        max_tokens: 40,
        ..AgentConfig::default()
    }
}

fn bank_model() -> NBModel {
    fit_naive_bayes(templates::POSITIVE, templates::NEGATIVE, 1.0).expect("template banks are non-empty")
}

fn criterion_5() -> Check {
    let gates = [(0.9, 0.7, 0.9), (0.5, 0.7, 0.0), (-0.7, 0.7, 0.0), (0.7, 0.7, 0.0), (-0.9, 0.7, -0.9)];
    for (p, tau, want) in gates {
        ensure(gate(p, tau) == want, || format!("gate({p}, {tau}) = {}", gate(p, tau)))?;
    }
    let combos = [(1.0, 0.8, 0.1, 1.08), (0.0, -1.0, 0.1, -0.1), (2.0, 0.5, 0.0, 2.0)];
    for (r, p, s, want) in combos {
        let got = combine_reward(r, p, s);
        ensure((got - want).abs() < 1e-12, || format!("combine_reward({r}, {p}, {s}) = {got}"))?;
    }

    // metric isolation on a shaped run
    let games: Vec<GameSpec> = (0..2)
        .map(|s| generate_game(GameKind::Cooking, s, &GameParams { rooms: 3, ..GameParams::default() }))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let cfg = RunConfig {
        epochs: 3,
        agent: small_agent(),
        shaping: ShapingConfig { scale: 0.5, gate_enabled: false, ..ShapingConfig::default() },
        ..RunConfig::default()
    };
    let mut model = bank_model();
    let shaped = train(&cfg, &games, &mut model, &TrainOptions::default()).map_err(|e| e.to_string())?;
    let shaped_steps = shaped.logs.iter().flat_map(|l| &l.steps).filter(|s| s.r_total != s.r_env).count();
    ensure(shaped_steps > 0, || "shaping never changed a reward".into())?;
    let mut zeroed = shaped.logs.clone();
    for s in zeroed.iter_mut().flat_map(|l| l.steps.iter_mut()) {
        s.polarity = 0.0;
        s.r_total = s.r_env;
    }
    let original = epochs_csv(&shaped.reports, &shaped.game_ids);
    let recomputed = epochs_csv(&reports_from_logs(&zeroed, games.len()), &shaped.game_ids);
    ensure(original == recomputed, || "epochs.csv changed after zeroing polarity".into())?;
    Ok(format!(
        "{} gate and {} combine cases exact; epochs.csv byte-identical after zeroing {shaped_steps} shaped steps",
        gates.len(),
        combos.len()
    ))
}

const CHAIN_EPISODES: usize = 100;
const SEEDS: u64 = 10;

fn chain_agent() -> AgentConfig {
    AgentConfig {
        epsilon_start: 0.5,
        zero_init_output: true,
        optimizer: Optimizer::Adam,
        learning_rate: 0.01,
        target_update: 50,
        ..small_agent()
    }
}

fn chain_run(seed: u64, scorer: &mut dyn SentimentScorer) -> Result<TrainOutcome, String> {
    let cfg = RunConfig {
        kind: GameKind::Chain,
        count: 1,
        intermediate: false,
        epochs: CHAIN_EPISODES,
        agent: chain_agent(),
        seed,
        ..RunConfig::default()
    };
    let games = cfg.resolve_games().map_err(|e| e.to_string())?;
    let opts = TrainOptions { stop_on_first_win: true, ..TrainOptions::default() };
    train(&cfg, &games, scorer, &opts).map_err(|e| e.to_string())
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let agent = chain_agent();
    let spec = generate_game(GameKind::Chain, 0, &GameParams { intermediate_rewards: false, ..GameParams::default() })
        .map_err(|e| e.to_string())?;
    let oracle = ChainOracle {
        length: spec.chain_length,
        max_steps: spec.max_steps,
        episodes: CHAIN_EPISODES,
        gamma: agent.gamma,
        alpha: 0.5,
        epsilon_start: agent.epsilon_start,
        epsilon_end: agent.epsilon_end,
        decay_fraction: agent.epsilon_decay_fraction,
        bonus: 0.0,
    };
    let shaped_oracle = ChainOracle { bonus: ShapingConfig::default().scale, ..oracle };
    let tab_plain: Vec<usize> = (0..SEEDS).map(|s| tabular_first_win(&oracle, s)).collect();
    let tab_shaped: Vec<usize> = (0..SEEDS).map(|s| tabular_first_win(&shaped_oracle, s)).collect();
    let (tp, ts) = (median(&tab_plain), median(&tab_shaped));
    ensure(ts <= 0.5 * tp, || format!("tabular oracle shows no gap: shaped {ts} vs unshaped {tp}"))?;

    let censored = CHAIN_EPISODES + 1;
    let mut plain = Vec::new();
    let mut shaped = Vec::new();
    let mut model = bank_model();
    for seed in 0..SEEDS {
        plain.push(chain_run(seed, &mut NoScorer)?.first_win_episode.unwrap_or(censored));
        shaped.push(chain_run(seed, &mut model)?.first_win_episode.unwrap_or(censored));
    }
    let (np, ns) = (median(&plain), median(&shaped));
    let secs = start.elapsed().as_secs_f64();
    let detail = format!(
        "tabular medians {ts} vs {tp}; neural medians shaped {ns} vs unshaped {np} (shaped {shaped:?}, unshaped {plain:?}), {secs:.0}s"
    );
    ensure(ns <= 0.5 * np && secs < 300.0, || detail.clone())?;
    Ok(detail)
}

fn cooking_run(seed: u64, scorer: &mut dyn SentimentScorer) -> Result<TrainOutcome, String> {
    let cfg = RunConfig {
        kind: GameKind::Cooking,
        count: 1,
        rooms: 3,
        game_seed: seed,
        intermediate: true,
        epochs: 20,
        agent: small_agent(),
        seed,
        ..RunConfig::default()
    };
    let games = cfg.resolve_games().map_err(|e| e.to_string())?;
    train(&cfg, &games, scorer, &TrainOptions::default()).map_err(|e| e.to_string())
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let mut model = bank_model();
    let (mut reach_plain, mut reach_shaped) = (0, 0);
    let mut regressions = Vec::new();
    for seed in 0..SEEDS {
        let spec = generate_game(GameKind::Cooking, seed, &GameParams { rooms: 3, ..GameParams::default() })
            .map_err(|e| e.to_string())?;
        let top = spec.max_score as f64;
        let plain = cooking_run(seed, &mut NoScorer)?.max_score();
        let shaped = cooking_run(seed, &mut model)?.max_score();
        reach_plain += usize::from(plain >= top);
        reach_shaped += usize::from(shaped >= top);
        if shaped < plain - 1.0 {
            regressions.push(format!("seed {seed}: shaped {shaped} vs vanilla {plain}"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = format!(
        "max-score epoch reached by vanilla on {reach_plain}/10, shaped on {reach_shaped}/10; {} regressions, {secs:.0}s",
        regressions.len()
    );
    ensure(regressions.is_empty(), || format!("{detail}: {}", regressions.join("; ")))?;
    Ok(detail)
}

fn entry(positive: bool, tag: u32) -> ReplayEntry {
    ReplayEntry {
        obs: vec![tag],
        action: 0,
        r_total: if positive { 1.0 } else { 0.0 },
        next_obs: vec![tag],
        done: false,
    }
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut report = Vec::new();
    for (n_pos, n_ord, rho, batch) in [(3, 7, 0.5, 10), (40, 200, 0.25, 32), (2, 300, 0.25, 32)] {
        let mut buf = ReplayBuffer::new(n_pos + n_ord);
        for i in 0..n_ord {
            buf.push(entry(false, i as u32));
        }
        for i in 0..n_pos {
            buf.push(entry(true, i as u32));
        }
        let (mut drawn, mut pos) = (0usize, 0usize);
        while drawn < 100_000 {
            let b = buf.sample(batch, rho, &mut rng);
            pos += b.iter().filter(|e| e.r_total > 0.0).count();
            drawn += b.len();
        }
        let frac = pos as f64 / drawn as f64;
        ensure((frac - rho).abs() <= 0.02, || format!("{n_pos}+{n_ord}, rho {rho}: fraction {frac:.4}"))?;
        report.push(format!("{frac:.3}"));
    }

    // eviction: random push sequences against a two-queue model
    for case in 0..200 {
        let cap = rng.random_range(1..12);
        let mut buf = ReplayBuffer::new(cap);
        let mut model: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
        for tag in 0..rng.random_range(0..60) {
            let positive = rng.random_bool(0.3);
            model[usize::from(positive)].push(tag);
            if model[0].len() + model[1].len() > cap {
                // over capacity: drop the oldest of the larger class, ordinary on a tie
                let victim = usize::from(model[1].len() > model[0].len());
                model[victim].remove(0);
            }
            buf.push(entry(positive, tag));
            for (class, want) in model.iter().enumerate() {
                let p = if class == 1 { Priority::Positive } else { Priority::Ordinary };
                let got: Vec<u32> = buf.class(p).iter().map(|e| e.obs[0]).collect();
                ensure(&got == want, || format!("case {case}: class {class} holds {got:?}, expected {want:?}"))?;
            }
        }
    }
    Ok(format!("positive fractions {} for rho 0.5/0.25/0.25; 200 eviction sequences match", report.join("/")))
}

fn main() -> ExitCode {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [(usize, &str, fn() -> Check); 8] = [
        (1, "gradient oracle", criterion_1),
        (2, "naive Bayes oracle", criterion_2),
        (3, "statistics oracle", criterion_3),
        (4, "environment oracle", criterion_4),
        (5, "gate, combination and metric isolation", criterion_5),
        (6, "chain learning check", criterion_6),
        (7, "cooking non-regression", criterion_7),
        (8, "replay sampling and eviction", criterion_8),
    ];
    let mut failed = 0;
    for (n, name, run) in criteria {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        match run() {
            Ok(detail) => println!("criterion {n} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n} FAIL  {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
