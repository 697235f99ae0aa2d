//! JSON file formats, report serialization and atomic output.

use std::fs;
use std::io::Write;
use std::path::Path;

use gentleak_core::leakage::{GentleLeakageInterval, LeakageEstimate};
use gentleak_core::measurements::{CertificationReport, CertifyMode, Povm, PovmImplementation};
use gentleak_core::sim::{ExactStats, SimReport};
use gentleak_core::{ComplexMatrix, CqEnsemble, DensityOperator, HermitianMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Complex matrix as `{"dim": d, "entries": [[[re, im], ...], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            dim: m.dim(),
            entries: m
                .rows()
                .iter()
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, String> {
        if self.entries.len() != self.dim {
            return Err(format!("dim is {} but {} rows were given", self.dim, self.entries.len()));
        }
        let rows: Vec<Vec<C64>> = self
            .entries
            .iter()
            .map(|row| row.iter().map(|[re, im]| C64::new(*re, *im)).collect())
            .collect();
        ComplexMatrix::from_rows(&rows).map_err(|e| e.to_string())
    }
}

/// Ensemble file: `{"labels": [...], "probs": [...], "states": [matrix, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleJson {
    pub labels: Vec<String>,
    pub probs: Vec<f64>,
    pub states: Vec<MatrixJson>,
}

impl EnsembleJson {
    pub fn from_ensemble(e: &CqEnsemble) -> Self {
        Self {
            labels: e.labels().to_vec(),
            probs: e.probs().to_vec(),
            states: e
                .states()
                .iter()
                .map(|s| MatrixJson::from_matrix(s.matrix().as_matrix()))
                .collect(),
        }
    }

    pub fn to_ensemble(&self) -> Result<CqEnsemble, String> {
        let mut states = Vec::with_capacity(self.states.len());
        for (i, m) in self.states.iter().enumerate() {
            let m = m.to_matrix().map_err(|e| format!("states[{i}]: {e}"))?;
            let rho = HermitianMatrix::new(m)
                .and_then(DensityOperator::new)
                .map_err(|e| format!("states[{i}]: {e}"))?;
            states.push(rho);
        }
        CqEnsemble::new(self.labels.clone(), self.probs.clone(), states).map_err(|e| e.to_string())
    }
}

/// POVM file: `{"labels": [...], "elements": [matrix, ...], "implementation": [matrix, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmJson {
    pub labels: Vec<String>,
    pub elements: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub implementation: Option<Vec<MatrixJson>>,
}

impl PovmJson {
    pub fn from_povm(p: &Povm) -> Self {
        Self {
            labels: p.labels().to_vec(),
            elements: p.elements().iter().map(|f| MatrixJson::from_matrix(f.as_matrix())).collect(),
            implementation: None,
        }
    }

    pub fn from_implementation(imp: &PovmImplementation) -> Self {
        Self {
            implementation: Some(imp.operators().iter().map(MatrixJson::from_matrix).collect()),
            ..Self::from_povm(imp.povm())
        }
    }

    pub fn to_povm(&self) -> Result<Povm, String> {
        let mut elements = Vec::with_capacity(self.elements.len());
        for (i, m) in self.elements.iter().enumerate() {
            let m = m.to_matrix().map_err(|e| format!("elements[{i}]: {e}"))?;
            elements.push(HermitianMatrix::new(m).map_err(|e| format!("elements[{i}]: {e}"))?);
        }
        Povm::new(self.labels.clone(), elements).map_err(|e| e.to_string())
    }

    /// `Ok(None)` when the file carries no implementation.
    pub fn to_implementation(&self) -> Result<Option<PovmImplementation>, String> {
        let Some(ops) = &self.implementation else {
            return Ok(None);
        };
        let povm = self.to_povm()?;
        let mut mats = Vec::with_capacity(ops.len());
        for (i, m) in ops.iter().enumerate() {
            mats.push(m.to_matrix().map_err(|e| format!("implementation[{i}]: {e}"))?);
        }
        PovmImplementation::new(povm, mats).map(Some).map_err(|e| e.to_string())
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn load_ensemble(path: &Path) -> Result<CqEnsemble, CliError> {
    let raw: EnsembleJson = read_json(path)?;
    raw.to_ensemble()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn load_povm(path: &Path) -> Result<PovmJson, CliError> {
    read_json(path)
}

fn mode_name(m: CertifyMode) -> &'static str {
    match m {
        CertifyMode::PerState => "per-state",
        CertifyMode::AverageState => "average-state",
    }
}

#[derive(Serialize)]
pub struct OptimizerJson {
    pub starts: usize,
    pub evals_per_start: usize,
    pub seed: u64,
    pub tol: f64,
}

#[derive(Serialize)]
pub struct EstimateMetaJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerJson>,
    pub evaluations: usize,
    pub converged_starts: usize,
    pub stagnated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_resolution: Option<usize>,
    pub source: String,
}

#[derive(Serialize)]
pub struct EstimateJson {
    pub bits: f64,
    pub kind: &'static str,
    pub achieving_povm: Option<PovmJson>,
    pub meta: EstimateMetaJson,
}

impl EstimateJson {
    pub fn from_estimate(e: &LeakageEstimate) -> Self {
        Self {
            bits: e.bits,
            kind: e.kind.as_str(),
            achieving_povm: e.achieving_povm.as_ref().map(PovmJson::from_povm),
            meta: EstimateMetaJson {
                optimizer: e.meta.optimizer.map(|c| OptimizerJson {
                    starts: c.starts,
                    evals_per_start: c.evals_per_start,
                    seed: c.seed,
                    tol: c.tol,
                }),
                evaluations: e.meta.evaluations,
                converged_starts: e.meta.converged_starts,
                stagnated: e.meta.stagnated,
                grid_resolution: e.meta.grid_resolution,
                source: e.meta.source.clone(),
            },
        }
    }
}

#[derive(Serialize)]
pub struct LeakageReportJson {
    #[serde(flatten)]
    pub estimate: EstimateJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_oracle: Option<EstimateJson>,
}

#[derive(Serialize)]
pub struct OutcomeJson {
    pub label: String,
    pub disturbance: Option<f64>,
    pub good: bool,
}

#[derive(Serialize)]
pub struct CertificationJson {
    pub certified: bool,
    pub alpha: f64,
    pub delta: f64,
    pub mode: &'static str,
    pub worst_prob: f64,
    pub worst_disturbance: f64,
    pub outcomes: Vec<OutcomeJson>,
}

impl CertificationJson {
    pub fn from_report(r: &CertificationReport) -> Self {
        Self {
            certified: r.certified,
            alpha: r.spec.alpha(),
            delta: r.spec.delta(),
            mode: mode_name(r.mode),
            worst_prob: r.worst_prob,
            worst_disturbance: r.worst_disturbance,
            outcomes: r
                .outcomes
                .iter()
                .map(|o| OutcomeJson {
                    label: o.label.clone(),
                    disturbance: o.disturbance,
                    good: o.good,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct ExactJson {
    pub qber: f64,
    pub eve_leakage_bits: f64,
    pub mean_disturbance: f64,
    pub disturbance_variance: f64,
}

impl From<ExactStats> for ExactJson {
    fn from(s: ExactStats) -> Self {
        Self {
            qber: s.qber,
            eve_leakage_bits: s.eve_leakage_bits,
            mean_disturbance: s.mean_disturbance,
            disturbance_variance: s.disturbance_variance,
        }
    }
}

#[derive(Serialize)]
pub struct SimReportJson {
    pub strategy: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub seed: u64,
    pub rounds: u64,
    pub sifted: u64,
    pub errors: u64,
    pub qber: f64,
    pub ci95: f64,
    pub eve_leakage_bits: f64,
    pub mean_disturbance: f64,
    pub exact: ExactJson,
}

impl SimReportJson {
    pub fn new(r: &SimReport, epsilon: Option<f64>, exact: ExactStats) -> Self {
        Self {
            strategy: r.strategy.clone(),
            epsilon,
            seed: r.seed,
            rounds: r.rounds,
            sifted: r.sifted,
            errors: r.errors,
            qber: r.qber,
            ci95: r.ci95,
            eve_leakage_bits: r.eve_leakage_bits,
            mean_disturbance: r.mean_disturbance,
            exact: exact.into(),
        }
    }
}

#[derive(Serialize)]
pub struct CloningJson {
    pub feasible: bool,
    pub p1_star: Option<f64>,
    pub p2_star: Option<f64>,
    pub lower_bits: f64,
    pub p1_cap: f64,
    pub quadratic_slack: Option<f64>,
}

#[derive(Serialize)]
pub struct IntervalJson {
    pub alpha: f64,
    pub delta: f64,
    pub mode: &'static str,
    pub lower_bits: f64,
    pub upper_bits: f64,
    pub lower_witness: &'static str,
    pub search_bits: f64,
    pub search_povm: Option<PovmJson>,
    pub cloning: CloningJson,
    pub maximal: EstimateJson,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl IntervalJson {
    pub fn new(iv: &GentleLeakageInterval, mode: CertifyMode) -> Self {
        Self {
            alpha: iv.spec.alpha(),
            delta: iv.spec.delta(),
            mode: mode_name(mode),
            lower_bits: iv.lower_bits,
            upper_bits: iv.upper_bits,
            lower_witness: iv.lower_witness.as_str(),
            search_bits: iv.search_bits,
            search_povm: iv.search_povm.as_ref().map(PovmJson::from_povm),
            cloning: CloningJson {
                feasible: iv.cloning.feasible,
                p1_star: finite(iv.cloning.p1_star),
                p2_star: finite(iv.cloning.p2_star),
                lower_bits: iv.cloning.lower_bits,
                p1_cap: iv.cloning.diagnostics.p1_cap,
                quadratic_slack: finite(iv.cloning.diagnostics.quadratic_slack),
            },
            maximal: EstimateJson::from_estimate(&iv.maximal),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Fixed six-decimal CSV cell; non-finite values print as `nan`.
pub fn csv_cell(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        "nan".to_string()
    }
}

pub fn csv(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(csv_cell).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io_err = |e: std::io::Error| CliError::Output(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
