//! External solver bridge: write the model to a temporary LP file, run a
//! command template, read back the solution file.

use std::process::Command;

use super::lpfile::{read_solution, write_model};
use super::{LinearModel, LpError, Solution};

/// Environment variable holding the command template, for example
/// `highs --model_file {model} --solution_file {solution} --write_solution_style 0`.
pub const EXTERNAL_ENV: &str = "CORREQ_EXTERNAL_SOLVER";

pub fn solve_external(model: &LinearModel, template: &str) -> Result<Solution, LpError> {
    if !template.contains("{model}") || !template.contains("{solution}") {
        return Err(LpError::External("command template needs {model} and {solution}".into()));
    }
    let dir = tempfile::tempdir().map_err(|e| LpError::External(e.to_string()))?;
    let model_path = dir.path().join("model.lp");
    let sol_path = dir.path().join("model.sol");
    std::fs::write(&model_path, write_model(model)?).map_err(|e| LpError::External(e.to_string()))?;
    let words: Vec<String> = template
        .split_whitespace()
        .map(|w| {
            w.replace("{model}", &model_path.to_string_lossy()).replace("{solution}", &sol_path.to_string_lossy())
        })
        .collect();
    let (prog, args) = words.split_first().ok_or_else(|| LpError::External("empty command".into()))?;
    let out = Command::new(prog)
        .args(args)
        .output()
        .map_err(|e| LpError::External(format!("cannot run {prog}: {e}")))?;
    if !out.status.success() {
        return Err(LpError::External(format!(
            "{prog} exited with {}: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr).trim()
        )));
    }
    let bytes = std::fs::read(&sol_path).map_err(|e| LpError::External(format!("no solution file: {e}")))?;
    read_solution(model, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_must_have_placeholders() {
        let m = LinearModel::new(super::super::Sense::Max);
        assert!(matches!(solve_external(&m, "true {model}"), Err(LpError::External(_))));
    }

    #[test]
    fn failing_command() {
        let m = LinearModel::new(super::super::Sense::Max);
        assert!(matches!(solve_external(&m, "false {model} {solution}"), Err(LpError::External(_))));
    }
}
