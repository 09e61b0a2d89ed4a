//! Trajectory files: one JSON document holding run-length encoded moves.
//!
//! Each path is a string such as `"F2U1F1"` (two flat steps, one up, one
//! flat), listed bottom path first.

use hahn_paths::process::Trajectory;
use hahn_paths::{Configuration, ModelParams, Step};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::output::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileModel {
    pub paths: usize,
    pub rise: usize,
    pub horizon: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryFile {
    pub schema_version: u32,
    pub model: FileModel,
    pub seed: u64,
    pub trajectories: Vec<Vec<String>>,
}

impl TrajectoryFile {
    pub fn new(model: &ModelParams, seed: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            model: FileModel {
                paths: model.paths,
                rise: model.rise,
                horizon: model.horizon,
            },
            seed,
            trajectories: Vec::new(),
        }
    }

    pub fn model(&self) -> CliResult<ModelParams> {
        Ok(ModelParams::new(self.model.paths, self.model.rise, self.model.horizon)?)
    }

    /// Decodes and validates trajectory `index`.
    pub fn trajectory(&self, index: usize) -> CliResult<Trajectory> {
        let model = self.model()?;
        let paths = self.trajectories.get(index).ok_or_else(|| {
            CliError::input(format!(
                "trajectory {index} requested but the file holds {}",
                self.trajectories.len()
            ))
        })?;
        if paths.len() != model.paths {
            return Err(CliError::input(format!(
                "trajectory {index} has {} paths, the model has {}",
                paths.len(),
                model.paths
            )));
        }
        let moves = paths.iter().map(|p| decode_moves(p)).collect::<CliResult<Vec<_>>>()?;
        if moves.iter().any(|m| m.len() != model.horizon) {
            return Err(CliError::input(format!(
                "trajectory {index} does not have {} steps per path",
                model.horizon
            )));
        }
        let mut heights = model.start_positions();
        let mut configurations = vec![Configuration::new(0, heights.clone())];
        for t in 0..model.horizon {
            for (h, m) in heights.iter_mut().zip(&moves) {
                *h += (m[t] == Step::Up) as i64;
            }
            configurations.push(Configuration::new(t as i64 + 1, heights.clone()));
        }
        let traj = Trajectory { configurations };
        traj.validate(&model)
            .map_err(|e| CliError::input(format!("trajectory {index}: {e}")))?;
        Ok(traj)
    }
}

pub fn encode_moves(steps: &[Step]) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < steps.len() {
        let j = steps[i..].iter().position(|s| *s != steps[i]).map_or(steps.len(), |k| i + k);
        out.push(if steps[i] == Step::Up { 'U' } else { 'F' });
        out.push_str(&(j - i).to_string());
        i = j;
    }
    out
}

pub fn decode_moves(s: &str) -> CliResult<Vec<Step>> {
    let bad = || CliError::input(format!("malformed move string {s:?}"));
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        let step = match c {
            'U' => Step::Up,
            'F' => Step::Flat,
            _ => return Err(bad()),
        };
        let mut digits = String::new();
        while let Some(d) = chars.next_if(|d| d.is_ascii_digit()) {
            digits.push(d);
        }
        let run: usize = digits.parse().map_err(|_| bad())?;
        if run == 0 {
            return Err(bad());
        }
        out.extend(std::iter::repeat_n(step, run));
    }
    Ok(out)
}

pub fn parse(text: &str) -> CliResult<TrajectoryFile> {
    let f: TrajectoryFile =
        serde_json::from_str(text).map_err(|e| CliError::input(format!("malformed trajectory file: {e}")))?;
    if f.schema_version != SCHEMA_VERSION {
        return Err(CliError::input(format!(
            "unsupported trajectory schema version {}",
            f.schema_version
        )));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Step::{Flat, Up};

    #[test]
    fn run_length_round_trip() {
        let steps = vec![Flat, Flat, Up, Flat, Up, Up, Up];
        assert_eq!(encode_moves(&steps), "F2U1F1U3");
        assert_eq!(decode_moves("F2U1F1U3").unwrap(), steps);
        assert_eq!(encode_moves(&[]), "");
        for bad in ["X1", "U", "U0", "1U"] {
            assert!(decode_moves(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn intersecting_paths_are_rejected() {
        let model = ModelParams::new(2, 1, 2).unwrap();
        let mut f = TrajectoryFile::new(&model, 0);
        f.trajectories.push(vec!["U1F1".into(), "U1F1".into()]);
        assert!(f.trajectory(0).is_ok());
        f.trajectories.push(vec!["F1U1".into(), "U1F1".into()]);
        assert!(f.trajectory(1).is_ok());
        f.trajectories.push(vec!["U1F1".into(), "F1U1".into()]);
        assert!(f.trajectory(2).is_err());
    }
}
