//! Artifact writers: deployment JSON, CSV tables and run manifests.
//!
//! Every artifact is written to `<name>.partial` first and renamed into
//! place once complete, so interrupted stages leave only `.partial` files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stripeplan::eval::{EvalResult, NearFieldRow, SweepRow};
use stripeplan::scene::{Deployment, ShapeTag};

use crate::AppError;

/// Received power in dBm; non-finite and failed values print as `nan`.
pub fn dbm(watts: f64) -> f64 {
    if watts > 0.0 {
        10.0 * (watts * 1e3).log10()
    } else {
        f64::NAN
    }
}

/// On-disk deployment document.
#[derive(Debug, Serialize, Deserialize)]
pub struct DeploymentDoc {
    pub shape_tag: String,
    pub n: usize,
    pub kappa: f64,
    pub elements: Vec<[f64; 3]>,
    pub powers: Vec<f64>,
    pub objective_watts: f64,
}

impl DeploymentDoc {
    pub fn to_deployment(&self) -> Result<Deployment<f64>, AppError> {
        let shape: ShapeTag = self
            .shape_tag
            .parse()
            .map_err(|e| AppError::Config(format!("deployment file: {e}")))?;
        if self.elements.is_empty() {
            return Err(AppError::Config("deployment file has no elements".into()));
        }
        Ok(Deployment {
            elements: self.elements.clone(),
            shape,
        })
    }
}

pub fn read_deployment(path: &Path) -> Result<DeploymentDoc, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| AppError::Config(format!("{}: {e}", path.display())))
}

/// Write `content` atomically under `dir/name`.
pub fn write_artifact(dir: &Path, name: &str, content: &str) -> Result<PathBuf, std::io::Error> {
    std::fs::create_dir_all(dir)?;
    let target = dir.join(name);
    let partial = dir.join(format!("{name}.partial"));
    std::fs::write(&partial, content)?;
    std::fs::rename(&partial, &target)?;
    Ok(target)
}

pub fn json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable artifact");
    s.push('\n');
    s
}

pub fn trace_csv(solution: &stripeplan::DeploymentSolution64) -> String {
    let mut out = String::from("iteration,t_w,center_x,center_y,status\n");
    for (i, p) in solution.trace.iter().enumerate() {
        let status = if i + 1 == solution.trace.len() {
            solution.status.as_str()
        } else {
            "optimal"
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            i + 1,
            p.objective_watts,
            p.center[0],
            p.center[1],
            status
        );
    }
    out
}

pub fn sweep_csv(rows: &[SweepRow<f64>]) -> String {
    let mut out =
        String::from("sweep_value,N,deployment,avg_min_power_w,avg_min_power_dbm,trials,seed\n");
    for r in rows {
        let (w, d) = match r.avg_min_power_w {
            Some(w) => (format!("{w}"), format!("{}", dbm(w))),
            None => ("nan".into(), "nan".into()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.sweep_value, r.n, r.tag, w, d, r.trials, r.seed
        );
    }
    out
}

pub fn nearfield_csv(rows: &[NearFieldRow<f64>]) -> String {
    let mut out = String::from("x_value,array_kind,N,D_m,fresnel_m,fraunhofer_m\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.x_value,
            r.kind.tag(),
            r.n,
            r.aperture,
            r.bounds.fresnel,
            r.bounds.fraunhofer
        );
    }
    out
}

pub fn eval_summary_csv(results: &[EvalResult<f64>]) -> String {
    let mut out = String::from(
        "deployment,avg_min_power_w,avg_min_power_dbm,trials,seed,policy,excluded_trials\n",
    );
    for r in results {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.tag,
            r.average_min_power,
            dbm(r.average_min_power),
            r.per_trial.len(),
            r.seed,
            r.policy.as_str(),
            r.excluded_trials
        );
    }
    out
}

pub fn eval_trials_csv(results: &[EvalResult<f64>]) -> String {
    let mut out = String::from("trial,deployment,min_power_w\n");
    for r in results {
        for (i, v) in r.per_trial.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", i, r.tag, v);
        }
    }
    out
}
