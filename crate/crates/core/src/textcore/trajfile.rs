//! JSON-lines trajectory files.
//!
//! Each trajectory is a header line followed by its step lines:
//!
//! ```text
//! {"game_id":"chain-7-s0","label":"win","version":1}
//! {"obs":"...","action":"go right","r_env":0.0,"done":false,"next_obs":"..."}
//! ```
//!
//! `next_obs` is optional on read; when absent it is taken from the next
//! step's `obs` (empty for the final step). A header with no steps
//! contributes no trajectory.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::envsim::{Label, Trajectory, Transition};

pub const TRAJECTORY_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum TrajFileError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed record at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("unsupported trajectory format version {found} at line {line} (expected {TRAJECTORY_FORMAT_VERSION})")]
    Version { line: usize, found: u32 },
}

#[derive(Serialize, Deserialize)]
struct Header {
    game_id: String,
    label: Label,
    version: u32,
}

#[derive(Serialize, Deserialize)]
struct StepRecord {
    obs: String,
    action: String,
    r_env: f64,
    done: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    next_obs: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Line {
    Header(Header),
    Step(StepRecord),
}

pub fn write_trajectories<W: Write>(mut out: W, trajectories: &[Trajectory]) -> io::Result<()> {
    for traj in trajectories {
        write_header(&mut out, &traj.game_id, traj.label)?;
        for step in &traj.steps {
            let rec = StepRecord {
                obs: step.obs_text.clone(),
                action: step.action_text.clone(),
                r_env: step.r_env,
                done: step.done,
                next_obs: Some(step.next_obs_text.clone()),
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub(crate) fn write_header<W: Write>(out: &mut W, game_id: &str, label: Label) -> io::Result<()> {
    let header = Header {
        game_id: game_id.to_string(),
        label,
        version: TRAJECTORY_FORMAT_VERSION,
    };
    serde_json::to_writer(&mut *out, &header)?;
    out.write_all(b"\n")
}

/// Writes `trajectories` to `path`. An empty slice still produces a file
/// with one header line, so the result is a valid (empty) trajectory file.
pub fn save_trajectories(path: &Path, trajectories: &[Trajectory]) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    if trajectories.is_empty() {
        write_header(&mut out, "", Label::Unlabeled)?;
    } else {
        write_trajectories(&mut out, trajectories)?;
    }
    out.flush()
}

pub fn load_trajectories(path: &Path) -> Result<Vec<Trajectory>, TrajFileError> {
    read_trajectories(BufReader::new(File::open(path)?))
}

pub fn read_trajectories<R: BufRead>(reader: R) -> Result<Vec<Trajectory>, TrajFileError> {
    let mut out = Vec::new();
    let mut current: Option<(Trajectory, Vec<Option<String>>)> = None;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(&line).map_err(|e| TrajFileError::Malformed {
            line: lineno,
            reason: e.to_string(),
        })?;
        match parsed {
            Line::Header(h) => {
                if h.version != TRAJECTORY_FORMAT_VERSION {
                    return Err(TrajFileError::Version {
                        line: lineno,
                        found: h.version,
                    });
                }
                finish(current.take(), &mut out);
                current = Some((
                    Trajectory {
                        game_id: h.game_id,
                        label: h.label,
                        steps: Vec::new(),
                    },
                    Vec::new(),
                ));
            }
            Line::Step(rec) => {
                let Some((traj, next)) = current.as_mut() else {
                    return Err(TrajFileError::Malformed {
                        line: lineno,
                        reason: "step record before any header".into(),
                    });
                };
                if !rec.r_env.is_finite() {
                    return Err(TrajFileError::Malformed {
                        line: lineno,
                        reason: "non-finite r_env".into(),
                    });
                }
                traj.steps.push(Transition {
                    obs_text: rec.obs,
                    action_text: rec.action,
                    r_env: rec.r_env,
                    next_obs_text: String::new(),
                    done: rec.done,
                });
                next.push(rec.next_obs);
            }
        }
    }
    finish(current, &mut out);
    Ok(out)
}

fn finish(current: Option<(Trajectory, Vec<Option<String>>)>, out: &mut Vec<Trajectory>) {
    let Some((mut traj, next)) = current else {
        return;
    };
    if traj.steps.is_empty() {
        return;
    }
    let n = traj.steps.len();
    for i in 0..n {
        traj.steps[i].next_obs_text = match &next[i] {
            Some(s) => s.clone(),
            None if i + 1 < n => traj.steps[i + 1].obs_text.clone(),
            None => String::new(),
        };
    }
    out.push(traj);
}
