use std::io::{self, BufRead, Write};

use crate::envsim::{reset, GameSpec, Label, Trajectory, Transition};

/// Terminal episode: prints observations, reads one command per line and
/// echoes rewards. Input ending before the goal yields a loss.
pub fn play<R: BufRead, W: Write>(spec: &GameSpec, input: R, mut output: W) -> io::Result<Trajectory> {
    let (mut state, mut obs) = reset(spec);
    writeln!(output, "{obs}")?;
    let mut steps = Vec::new();
    let mut lines = input.lines();
    while !state.done() {
        write!(output, "> ")?;
        output.flush()?;
        let Some(line) = lines.next() else { break };
        let action = line?.trim().to_string();
        if action.is_empty() {
            continue;
        }
        let out = state.step(&action).expect("episode is not done");
        writeln!(output, "{}", out.obs_text)?;
        writeln!(output, "[reward {}, score {}/{}]", out.r_env, state.score_so_far(), spec.max_score)?;
        steps.push(Transition {
            obs_text: std::mem::take(&mut obs),
            action_text: action,
            r_env: out.r_env,
            next_obs_text: out.obs_text.clone(),
            done: out.done,
        });
        obs = out.obs_text;
    }
    let won = state.won();
    writeln!(output, "{}", if won { "*** You won ***" } else { "*** Episode over ***" })?;
    Ok(Trajectory {
        game_id: spec.id(),
        label: if won { Label::Win } else { Label::Loss },
        steps,
    })
}
