//! Temperature sweeps and the figure pipelines built on them.
//!
//! Sweeps use the exact solvers only. Every file written goes into a
//! manifest with its SHA-256 so a later run (or [`verify_manifest`]) can
//! detect changes. Monte Carlo appears only in [`monte_carlo_validation`].

pub mod svg;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::choice::logistic;
use crate::dynamics::{empirical_distribution, run_with_rng, stream_rng, RunConfig};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::format::round_trip;
use crate::inequality::{income_distribution, lorenz_gini};
use crate::kernel::{
    solve_stationary, stationary_analytic_with, stationary_mean, Method, StateDistribution,
    DEFAULT_MAX_ITERS, DEFAULT_TOL,
};
use crate::model::{HalfRule, ModelParams};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Temperatures of the ergodic-distribution panels.
pub const ERGODIC_TEMPERATURES: [f64; 8] = [0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0];
/// Producers in every figure.
pub const FIGURE_PRODUCERS: u32 = 100;
/// Temperature of the Lorenz-curve figure.
pub const LORENZ_TEMPERATURE: f64 = 10.0;
const STAFFING_GRID_POINTS: usize = 60;
const STAFFING_GRID_RANGE: (f64, f64) = (0.05, 20.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Stationary,
    Mean,
    ChoiceFrequencies,
    Gini,
}

impl OutputKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputKind::Stationary => "stationary",
            OutputKind::Mean => "mean",
            OutputKind::ChoiceFrequencies => "choice_frequencies",
            OutputKind::Gini => "gini",
        }
    }

    fn needs_solver(self) -> bool {
        !matches!(self, OutputKind::ChoiceFrequencies)
    }
}

impl FromStr for OutputKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "stationary" => Ok(OutputKind::Stationary),
            "mean" => Ok(OutputKind::Mean),
            "choice_frequencies" | "choice" => Ok(OutputKind::ChoiceFrequencies),
            "gini" => Ok(OutputKind::Gini),
            other => Err(format!(
                "unknown output `{other}` (expected stationary, mean, choice_frequencies or gini)"
            )),
        }
    }
}

fn default_one() -> f64 {
    1.0
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_max_iters() -> usize {
    DEFAULT_MAX_ITERS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub n_producers: u32,
    /// Strictly increasing, all positive.
    pub temperatures: Vec<f64>,
    pub outputs: BTreeSet<OutputKind>,
    #[serde(default)]
    pub method: Method,
    pub output_dir: PathBuf,
    #[serde(default = "default_one")]
    pub payoff_short: f64,
    #[serde(default)]
    pub payoff_long: f64,
    #[serde(default)]
    pub half_rule: HalfRule,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

impl SweepSpec {
    pub fn new(
        n_producers: u32,
        temperatures: Vec<f64>,
        outputs: impl IntoIterator<Item = OutputKind>,
        method: Method,
        output_dir: impl Into<PathBuf>,
    ) -> Self {
        SweepSpec {
            n_producers,
            temperatures,
            outputs: outputs.into_iter().collect(),
            method,
            output_dir: output_dir.into(),
            payoff_short: 1.0,
            payoff_long: 0.0,
            half_rule: HalfRule::Half,
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.outputs.is_empty() {
            return Err(Error::InvalidSweep("no outputs requested".into()));
        }
        if self.temperatures.is_empty() {
            return Err(Error::InvalidSweep("no temperatures given".into()));
        }
        if self.temperatures.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidSweep("temperatures must be positive and finite".into()));
        }
        if self.temperatures.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSweep("temperatures must be strictly increasing".into()));
        }
        self.params_at(self.temperatures[0])?;
        Ok(())
    }

    fn params_at(&self, temperature: f64) -> Result<ModelParams> {
        ModelParams::new(self.n_producers, temperature)?.with_payoffs(self.payoff_short, self.payoff_long)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    /// Relative to the manifest's directory.
    pub path: String,
    pub kind: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub temperature: f64,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub spec: serde_json::Value,
    pub artifacts: Vec<Artifact>,
    pub failures: Vec<Failure>,
}

impl Manifest {
    pub fn artifacts_of_kind<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a Artifact> + 'a {
        self.artifacts.iter().filter(move |a| a.kind == kind)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_artifact(root: &Path, rel: &str, kind: &str, contents: &str) -> Result<Artifact> {
    let path = root.join(rel);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(Artifact {
        path: rel.to_string(),
        kind: kind.to_string(),
        sha256: sha256_hex(contents.as_bytes()),
    })
}

fn write_manifest(root: &Path, manifest: &Manifest) -> Result<()> {
    fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    let path = root.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

/// Recomputes every artifact hash listed in `dir/manifest.json`; returns a
/// description of each missing or modified file.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    let mut problems = Vec::new();
    for a in &manifest.artifacts {
        match fs::read(dir.join(&a.path)) {
            Ok(bytes) if sha256_hex(&bytes) == a.sha256 => {}
            Ok(_) => problems.push(format!("{}: content hash mismatch", a.path)),
            Err(e) => problems.push(format!("{}: {e}", a.path)),
        }
    }
    Ok(problems)
}

/// Per-temperature solver results of a sweep.
pub struct SweepOutcome {
    pub artifacts: Vec<Artifact>,
    pub failures: Vec<Failure>,
    pub cells: Vec<SweepCell>,
}

pub struct SweepCell {
    pub temperature: f64,
    pub stationary: Option<StateDistribution>,
}

fn stationary_file(temperature: f64) -> String {
    format!("stationary_T{}.csv", round_trip(temperature))
}

/// Runs the sweep and writes its files under `root/prefix`, without a
/// manifest. Paths in the returned artifacts are relative to `root`.
pub fn run_sweep(spec: &SweepSpec, root: &Path, prefix: &str, exec: Execution) -> Result<SweepOutcome> {
    spec.validate()?;
    let rel = |name: &str| {
        if prefix.is_empty() {
            name.to_string()
        } else {
            format!("{prefix}/{name}")
        }
    };
    let solve = spec.outputs.iter().any(|o| o.needs_solver());
    let write_stationary = spec.outputs.contains(&OutputKind::Stationary);

    let results = exec.map(&spec.temperatures, |_, &t| -> Result<(Option<StateDistribution>, Option<Artifact>, Option<String>)> {
        if !solve {
            return Ok((None, None, None));
        }
        let solved = spec
            .params_at(t)
            .and_then(|p| solve_stationary(&p, spec.half_rule, spec.method, spec.tol, spec.max_iters));
        match solved {
            Ok(dist) => {
                let artifact = if write_stationary {
                    Some(write_artifact(root, &rel(&stationary_file(t)), "stationary", &dist.to_csv())?)
                } else {
                    None
                };
                Ok((Some(dist), artifact, None))
            }
            Err(e) if e.is_io() => Err(e),
            Err(e) => Ok((None, None, Some(e.to_string()))),
        }
    });

    let mut artifacts = Vec::new();
    let mut failures = Vec::new();
    let mut cells = Vec::new();
    for (&t, result) in spec.temperatures.iter().zip(results) {
        let (dist, artifact, failure) = result?;
        artifacts.extend(artifact);
        if let Some(error) = failure {
            failures.push(Failure {
                temperature: t,
                error,
            });
        }
        cells.push(SweepCell {
            temperature: t,
            stationary: dist,
        });
    }

    if spec.outputs.contains(&OutputKind::Mean) {
        let mut csv = String::from("temperature,mean_corn_fraction\n");
        for c in &cells {
            if let Some(d) = &c.stationary {
                csv.push_str(&format!("{},{}\n", round_trip(c.temperature), round_trip(stationary_mean(d))));
            }
        }
        artifacts.push(write_artifact(root, &rel("mean.csv"), "mean", &csv)?);
    }
    if spec.outputs.contains(&OutputKind::ChoiceFrequencies) {
        let gap = spec.payoff_short - spec.payoff_long;
        let mut csv = String::from("temperature,f_corn_shortside,f_corn_longside\n");
        for &t in &spec.temperatures {
            csv.push_str(&format!(
                "{},{},{}\n",
                round_trip(t),
                round_trip(logistic(gap / t)),
                round_trip(logistic(-gap / t))
            ));
        }
        artifacts.push(write_artifact(root, &rel("choice_frequencies.csv"), "choice_frequencies", &csv)?);
    }
    if spec.outputs.contains(&OutputKind::Gini) {
        let mut csv = String::from("temperature,p_win,gini\n");
        for c in &cells {
            let Some(d) = &c.stationary else { continue };
            let curve = spec
                .params_at(c.temperature)
                .and_then(|p| income_distribution(&p, d))
                .and_then(|law| Ok((law.p_win, lorenz_gini(law.p_win, law.payoff_short, law.payoff_long)?)));
            match curve {
                Ok((p_win, lg)) => csv.push_str(&format!(
                    "{},{},{}\n",
                    round_trip(c.temperature),
                    round_trip(p_win),
                    round_trip(lg.gini)
                )),
                Err(e) => failures.push(Failure {
                    temperature: c.temperature,
                    error: format!("gini: {e}"),
                }),
            }
        }
        artifacts.push(write_artifact(root, &rel("gini.csv"), "gini", &csv)?);
    }
    Ok(SweepOutcome {
        artifacts,
        failures,
        cells,
    })
}

/// Runs the sweep into `spec.output_dir` and writes `manifest.json` there.
pub fn sweep(spec: &SweepSpec, exec: Execution) -> Result<Manifest> {
    let outcome = run_sweep(spec, &spec.output_dir, "", exec)?;
    let manifest = Manifest {
        spec: serde_json::to_value(spec)?,
        artifacts: outcome.artifacts,
        failures: outcome.failures,
    };
    write_manifest(&spec.output_dir, &manifest)?;
    Ok(manifest)
}

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| match i {
            0 => lo,
            i if i == points - 1 => hi,
            i => (a + (b - a) * i as f64 / (points - 1) as f64).exp(),
        })
        .collect()
}

pub fn staffing_grid() -> Vec<f64> {
    log_grid(STAFFING_GRID_RANGE.0, STAFFING_GRID_RANGE.1, STAFFING_GRID_POINTS)
}

/// Writes the staffing-vs-T, Lorenz and ergodic-distribution figures with
/// their CSVs and a top-level manifest into `output_dir`. Paths recorded in
/// the manifest are relative to `output_dir`, so identical runs in
/// different directories produce identical manifests.
pub fn reproduce_figures(output_dir: &Path, exec: Execution) -> Result<Manifest> {
    let mut artifacts = Vec::new();
    let mut failures = Vec::new();

    // Ergodic distributions across T.
    let ergodic = SweepSpec::new(
        FIGURE_PRODUCERS,
        ERGODIC_TEMPERATURES.to_vec(),
        [OutputKind::Stationary],
        Method::Analytic,
        "ergodic",
    );
    let ergodic_out = run_sweep(&ergodic, output_dir, "ergodic", exec)?;
    artifacts.extend(ergodic_out.artifacts);
    failures.extend(ergodic_out.failures);

    // Choice frequencies, mean staffing and Gini against T.
    let staffing = SweepSpec::new(
        FIGURE_PRODUCERS,
        staffing_grid(),
        [OutputKind::Mean, OutputKind::ChoiceFrequencies, OutputKind::Gini],
        Method::Analytic,
        "staffing",
    );
    let staffing_out = run_sweep(&staffing, output_dir, "staffing", exec)?;
    artifacts.extend(staffing_out.artifacts);
    failures.extend(staffing_out.failures);

    // Lorenz curve at a single temperature.
    let params = ModelParams::new(FIGURE_PRODUCERS, LORENZ_TEMPERATURE)?;
    let pi = stationary_analytic_with(&params, HalfRule::Half)?;
    let law = income_distribution(&params, &pi)?;
    let lorenz = lorenz_gini(law.p_win, law.payoff_short, law.payoff_long)?;
    artifacts.push(write_artifact(output_dir, "lorenz/lorenz.csv", "lorenz", &lorenz.to_csv())?);
    artifacts.push(write_artifact(
        output_dir,
        "lorenz/summary.json",
        "summary",
        &(lorenz.summary_json(law.p_win)? + "\n"),
    )?);

    // Figures.
    let gap = 1.0;
    let short: Vec<(f64, f64)> = staffing.temperatures.iter().map(|&t| (t, logistic(gap / t))).collect();
    let long: Vec<(f64, f64)> = staffing.temperatures.iter().map(|&t| (t, logistic(-gap / t))).collect();
    let mean: Vec<(f64, f64)> = staffing_out
        .cells
        .iter()
        .filter_map(|c| c.stationary.as_ref().map(|d| (c.temperature, stationary_mean(d))))
        .collect();
    let chart = svg::log_x_line_chart(
        "Corn choice frequency and mean staffing vs. T (N = 100)",
        "behavior scale T (log)",
        "frequency",
        &[
            svg::Series { name: "corn chosen, corn short", color: "steelblue", points: &short },
            svg::Series { name: "corn chosen, sugar short", color: "darkorange", points: &long },
            svg::Series { name: "mean corn fraction", color: "black", points: &mean },
        ],
        (0.0, 1.0),
    );
    artifacts.push(write_artifact(output_dir, "staffing.svg", "svg", &chart)?);

    let chart = svg::lorenz_chart(
        &format!("Lorenz curve at the ergodic distribution (N = 100, T = {LORENZ_TEMPERATURE})"),
        &lorenz.lorenz_points,
        lorenz.gini,
    );
    artifacts.push(write_artifact(output_dir, "lorenz.svg", "svg", &chart)?);

    let panels: Vec<(String, &[f64])> = ergodic_out
        .cells
        .iter()
        .filter_map(|c| {
            c.stationary
                .as_ref()
                .map(|d| (format!("T = {}", round_trip(c.temperature)), d.probabilities()))
        })
        .collect();
    let chart = svg::bar_panels(
        "Ergodic distribution of corn producers (N = 100)",
        "number of corn producers",
        &panels,
        4,
    );
    artifacts.push(write_artifact(output_dir, "ergodic.svg", "svg", &chart)?);

    let manifest = Manifest {
        spec: serde_json::json!({
            "figures": {
                "n_producers": FIGURE_PRODUCERS,
                "ergodic": ergodic,
                "staffing": staffing,
                "lorenz": { "temperature": LORENZ_TEMPERATURE, "method": Method::Analytic },
            }
        }),
        artifacts,
        failures,
    };
    write_manifest(output_dir, &manifest)?;
    Ok(manifest)
}

/// One cell of the Monte Carlo cross-check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationRow {
    pub n_producers: u32,
    pub temperature: f64,
    pub stream: u64,
    pub tv_distance: f64,
}

/// Simulates each `(N, T)` cell on its own ChaCha20 stream of `master_seed`
/// and reports the TV distance between the empirical and exact ergodic law.
pub fn monte_carlo_validation(
    cells: &[(u32, f64)],
    periods: usize,
    burn_in: usize,
    master_seed: u64,
    exec: Execution,
) -> Result<Vec<ValidationRow>> {
    exec.map(cells, |i, &(n, t)| {
        let params = ModelParams::new(n, t)?;
        let config = RunConfig::new(params, n / 2, periods, burn_in, master_seed);
        let traj = run_with_rng(&config, &mut stream_rng(master_seed, i as u64))?;
        let empirical = empirical_distribution(&traj)?;
        let exact = stationary_analytic_with(&params, HalfRule::Half)?;
        Ok(ValidationRow {
            n_producers: n,
            temperature: t,
            stream: i as u64,
            tv_distance: empirical.tv_distance(&exact),
        })
    })
    .into_iter()
    .collect()
}
