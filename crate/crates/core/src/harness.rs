//! Batch experiment runner: configuration, parallel execution across
//! instances and algorithms, CSV persistence, and static SVG regret charts.
//!
//! Every algorithm in a batch runs on the same generated instances. Episodes
//! are distributed over a worker pool; each worker writes its own trace CSV
//! and returns only checkpoint statistics, so memory stays flat in the
//! horizon. Seeds derive from the master seed by fixed labels, which makes
//! batch output byte-identical across reruns and worker counts.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{run_episode, AlgorithmKind, ConfidenceSpec, SolverSettings};
use crate::environment::{derive_seed, generate_instance, BanditInstance};
use crate::error::{Error, Result};
use crate::optimizer::TerminationRule;
use crate::welfare::RegretTrace;

/// Exact header of per-run trace CSVs.
pub const TRACE_HEADER: &str = "t,arm,nsw_t,cum_regret";

/// Exact header of the batch summary CSV.
pub const SUMMARY_HEADER: &str =
    "n_agents,n_arms,algorithm,checkpoint_t,mean_regret,std_regret,mean_opt_nsw,std_opt_nsw,instances";

/// Algorithm selector as it appears in configs, CLI flags, and CSV output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgoName {
    FairUcb,
    HighStartup,
    BaselineUcb,
}

impl AlgoName {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlgoName::FairUcb => "fair-ucb",
            AlgoName::HighStartup => "high-startup",
            AlgoName::BaselineUcb => "baseline-ucb",
        }
    }
}

impl fmt::Display for AlgoName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgoName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fair-ucb" => Ok(AlgoName::FairUcb),
            "high-startup" => Ok(AlgoName::HighStartup),
            "baseline-ucb" => Ok(AlgoName::BaselineUcb),
            other => Err(Error::InvalidConfig {
                field: "algorithms",
                reason: format!(
                    "unknown algorithm `{other}` (expected fair-ucb, high-startup, or baseline-ucb)"
                ),
            }),
        }
    }
}

/// Full description of a batch run.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `(N, K)` pairs to run.
    pub sizes: Vec<(usize, usize)>,
    pub horizon: u64,
    /// Instances generated per size; every algorithm sees the same set.
    pub instance_count: usize,
    pub algorithms: Vec<AlgoName>,
    pub delta: f64,
    pub width_scale: f64,
    pub bonus_scale: f64,
    pub warmup_multiplier: f64,
    pub anytime: bool,
    pub restarts: usize,
    pub step: f64,
    pub fair_termination: TerminationRule,
    pub high_startup_termination: TerminationRule,
    pub baseline_termination: TerminationRule,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// Summary checkpoints at every multiple of this round count (plus the
    /// final round); 0 records the final round only.
    pub checkpoint_every: u64,
    /// Trace rows are persisted every `stride` rounds (plus the final round).
    pub stride: u64,
    /// Worker threads; 0 uses one per core.
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sizes: vec![(4, 2)],
            horizon: 10_000,
            instance_count: 10,
            algorithms: vec![AlgoName::FairUcb],
            delta: 0.01,
            width_scale: 0.5,
            bonus_scale: 0.8,
            warmup_multiplier: 1.0,
            anytime: false,
            restarts: 1,
            step: 0.1,
            fair_termination: TerminationRule {
                min_improvement: 2e-4,
                window: 20,
                max_iters: 2_000,
            },
            high_startup_termination: TerminationRule {
                min_improvement: 2e-4,
                window: 20,
                max_iters: 2_000,
            },
            baseline_termination: TerminationRule {
                min_improvement: 1e-6,
                window: 30,
                max_iters: 5_000,
            },
            master_seed: 0,
            output_dir: PathBuf::from("out"),
            checkpoint_every: 0,
            stride: 100,
            workers: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::InvalidConfig {
                field: "sizes",
                reason: "at least one (N, K) pair is required".to_string(),
            });
        }
        for &(n, k) in &self.sizes {
            if n == 0 || k == 0 {
                return Err(Error::InvalidConfig {
                    field: "sizes",
                    reason: format!("({n}, {k}) has a zero dimension"),
                });
            }
        }
        if self.horizon == 0 {
            return Err(Error::InvalidConfig {
                field: "horizon",
                reason: "must be at least 1".to_string(),
            });
        }
        if self.instance_count == 0 {
            return Err(Error::InvalidConfig {
                field: "instance_count",
                reason: "must be at least 1".to_string(),
            });
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidConfig {
                field: "algorithms",
                reason: "at least one algorithm is required".to_string(),
            });
        }
        if self.stride == 0 {
            return Err(Error::InvalidConfig {
                field: "stride",
                reason: "must be at least 1".to_string(),
            });
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidConfig {
                field: "step",
                reason: format!("{} is not a positive finite number", self.step),
            });
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig {
                field: "restarts",
                reason: "must be at least 1".to_string(),
            });
        }
        self.confidence_spec().validate()?;
        self.fair_termination.validate()?;
        self.high_startup_termination.validate()?;
        self.baseline_termination.validate()?;
        for name in &self.algorithms {
            self.kind_of(*name).validate()?;
        }
        Ok(())
    }

    pub fn confidence_spec(&self) -> ConfidenceSpec {
        ConfidenceSpec {
            delta: self.delta,
            horizon: self.horizon,
            anytime: self.anytime,
            width_scale: self.width_scale,
        }
    }

    pub fn kind_of(&self, name: AlgoName) -> AlgorithmKind {
        match name {
            AlgoName::FairUcb => AlgorithmKind::FairUcb,
            AlgoName::HighStartup => AlgorithmKind::HighStartupUcb {
                warmup_multiplier: self.warmup_multiplier,
            },
            AlgoName::BaselineUcb => AlgorithmKind::BaselineUcb {
                bonus_scale: self.bonus_scale,
            },
        }
    }

    pub fn termination_for(&self, name: AlgoName) -> &TerminationRule {
        match name {
            AlgoName::FairUcb => &self.fair_termination,
            AlgoName::HighStartup => &self.high_startup_termination,
            AlgoName::BaselineUcb => &self.baseline_termination,
        }
    }

    fn solver_settings(&self) -> SolverSettings {
        SolverSettings {
            step: self.step,
            restarts: self.restarts,
        }
    }

    /// Checkpoint rounds: multiples of `checkpoint_every`, always including
    /// the final round.
    pub fn checkpoints(&self) -> Vec<u64> {
        let mut ts = Vec::new();
        if self.checkpoint_every > 0 {
            let mut t = self.checkpoint_every;
            while t < self.horizon {
                ts.push(t);
                t += self.checkpoint_every;
            }
        }
        ts.push(self.horizon);
        ts
    }
}

/// One line of the summary CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub n_agents: usize,
    pub n_arms: usize,
    pub algorithm: AlgoName,
    pub checkpoint_t: u64,
    pub mean_regret: f64,
    pub std_regret: f64,
    pub mean_opt_nsw: f64,
    pub std_opt_nsw: f64,
    pub instances: usize,
}

/// Aggregated results of a batch.
#[derive(Clone, Debug, Default)]
pub struct BatchSummary {
    pub rows: Vec<SummaryRow>,
}

impl BatchSummary {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SUMMARY_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.n_agents,
                r.n_arms,
                r.algorithm,
                r.checkpoint_t,
                r.mean_regret,
                r.std_regret,
                r.mean_opt_nsw,
                r.std_opt_nsw,
                r.instances
            ));
        }
        out
    }
}

impl fmt::Display for BatchSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>4} {:>4} {:>14} {:>12} {:>14} {:>12} {:>12} {:>12}",
            "N", "K", "algorithm", "checkpoint", "mean_regret", "std_regret", "opt_nsw", "std_opt"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>4} {:>4} {:>14} {:>12} {:>14.2} {:>12.2} {:>12.4} {:>12.4}",
                r.n_agents,
                r.n_arms,
                r.algorithm.as_str(),
                r.checkpoint_t,
                r.mean_regret,
                r.std_regret,
                r.mean_opt_nsw,
                r.std_opt_nsw
            )?;
        }
        Ok(())
    }
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

struct RunResult {
    checkpoint_regrets: Vec<f64>,
}

/// Runs the whole batch: generates instances, runs every configured
/// algorithm on the same instances, writes instance files, per-run trace
/// CSVs, and `summary.csv` under the output directory.
pub fn run_batch(config: &ExperimentConfig) -> Result<BatchSummary> {
    config.validate()?;
    std::fs::create_dir_all(&config.output_dir)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidConfig {
            field: "workers",
            reason: e.to_string(),
        })?;

    let spec = config.confidence_spec();
    let solver = config.solver_settings();
    let checkpoints = config.checkpoints();
    let mut rows = Vec::new();

    for &(n, k) in &config.sizes {
        let instance_label = format!("instance/N{n}K{k}");
        let instances: Vec<BanditInstance> = (0..config.instance_count)
            .map(|i| {
                generate_instance(n, k, derive_seed(config.master_seed, &instance_label, i as u64))
            })
            .collect::<Result<_>>()?;
        for (i, inst) in instances.iter().enumerate() {
            inst.save(&config.output_dir.join(format!("instance_N{n}_K{k}_i{i:02}.txt")))?;
        }

        let jobs: Vec<(AlgoName, usize)> = config
            .algorithms
            .iter()
            .flat_map(|&algo| (0..config.instance_count).map(move |i| (algo, i)))
            .collect();

        let results: Vec<Result<RunResult>> = pool.install(|| {
            jobs.par_iter()
                .map(|&(algo, i)| {
                    let kind = config.kind_of(algo);
                    let seed = derive_seed(
                        config.master_seed,
                        &format!("episode/N{n}K{k}/{}", algo.as_str()),
                        i as u64,
                    );
                    let outcome = run_episode(
                        &kind,
                        &instances[i],
                        config.horizon,
                        &spec,
                        config.termination_for(algo),
                        &solver,
                        seed,
                    )?;
                    let path = config
                        .output_dir
                        .join(format!("trace_N{n}_K{k}_{}_i{i:02}.csv", algo.as_str()));
                    write_trace_csv(&outcome.trace, config.stride, &path)?;
                    let checkpoint_regrets = checkpoints
                        .iter()
                        .map(|&t| outcome.trace.cum_regret_at(t).expect("t within horizon"))
                        .collect();
                    Ok(RunResult { checkpoint_regrets })
                })
                .collect()
        });
        let results: Vec<RunResult> = results.into_iter().collect::<Result<_>>()?;

        let opt_values: Vec<f64> = instances.iter().map(|inst| inst.opt_nsw).collect();
        let (mean_opt, std_opt) = mean_and_std(&opt_values);

        for (ai, &algo) in config.algorithms.iter().enumerate() {
            let base = ai * config.instance_count;
            for (ci, &t) in checkpoints.iter().enumerate() {
                let regrets: Vec<f64> = (0..config.instance_count)
                    .map(|i| results[base + i].checkpoint_regrets[ci])
                    .collect();
                let (mean_regret, std_regret) = mean_and_std(&regrets);
                rows.push(SummaryRow {
                    n_agents: n,
                    n_arms: k,
                    algorithm: algo,
                    checkpoint_t: t,
                    mean_regret,
                    std_regret,
                    mean_opt_nsw: mean_opt,
                    std_opt_nsw: std_opt,
                    instances: config.instance_count,
                });
            }
        }
    }

    let summary = BatchSummary { rows };
    std::fs::write(config.output_dir.join("summary.csv"), summary.to_csv())?;
    Ok(summary)
}

/// Writes a trace CSV with rows every `stride` rounds plus the final round.
/// Arms are written 1-based to match the paper's round/arm numbering.
pub fn write_trace_csv(trace: &RegretTrace, stride: u64, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "{TRACE_HEADER}")?;
    let last = trace.records.len();
    for (idx, rec) in trace.records.iter().enumerate() {
        if rec.round % stride == 0 || idx + 1 == last {
            writeln!(
                w,
                "{},{},{},{}",
                rec.round,
                rec.arm + 1,
                rec.nsw,
                rec.cum_regret
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// A labelled cumulative-regret series, as loaded from a trace CSV.
#[derive(Clone, Debug)]
pub struct RegretSeries {
    pub label: String,
    pub points: Vec<(u64, f64)>,
}

impl RegretSeries {
    pub fn from_trace(label: &str, trace: &RegretTrace) -> Self {
        Self {
            label: label.to_string(),
            points: trace
                .records
                .iter()
                .map(|r| (r.round, r.cum_regret))
                .collect(),
        }
    }
}

/// Reads `t` and `cum_regret` back out of a trace CSV.
pub fn load_trace_series(path: &Path) -> Result<RegretSeries> {
    let text = std::fs::read_to_string(path)?;
    let origin = path.display().to_string();
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse {
        path: origin.clone(),
        reason: "empty file".to_string(),
    })?;
    if header != TRACE_HEADER {
        return Err(Error::Parse {
            path: origin,
            reason: format!("unexpected header `{header}`"),
        });
    }
    let mut points = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                path: origin,
                reason: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        let t: u64 = fields[0].parse().map_err(|_| Error::Parse {
            path: origin.clone(),
            reason: format!("bad round `{}`", fields[0]),
        })?;
        let cum: f64 = fields[3].parse().map_err(|_| Error::Parse {
            path: origin.clone(),
            reason: format!("bad regret `{}`", fields[3]),
        })?;
        points.push((t, cum));
    }
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| origin.clone());
    Ok(RegretSeries { label, points })
}

/// Writes a static SVG line chart of cumulative regret vs round, one
/// polyline per trace. Polylines are downsampled to at most 2000 points.
pub fn emit_regret_chart(traces: &[(String, &RegretTrace)], path: &Path) -> Result<()> {
    let series: Vec<RegretSeries> = traces
        .iter()
        .map(|(label, trace)| RegretSeries::from_trace(label, trace))
        .collect();
    emit_chart_series(&series, path)
}

/// Chart entry point shared by the library API and the CLI `chart` command.
pub fn emit_chart_series(series: &[RegretSeries], path: &Path) -> Result<()> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::InvalidConfig {
            field: "traces",
            reason: "at least one nonempty trace is required".to_string(),
        });
    }
    const MAX_POINTS: usize = 2000;
    const WIDTH: f64 = 960.0;
    const HEIGHT: f64 = 560.0;
    const LEFT: f64 = 80.0;
    const RIGHT: f64 = 180.0;
    const TOP: f64 = 30.0;
    const BOTTOM: f64 = 60.0;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;

    let t_max = series
        .iter()
        .flat_map(|s| s.points.last())
        .map(|&(t, _)| t)
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let y_max = series
        .iter()
        .flat_map(|s| s.points.iter().map(|&(_, r)| r))
        .fold(0.0f64, f64::max)
        .max(1e-9);

    let x_px = |t: f64| LEFT + t / t_max * plot_w;
    let y_px = |r: f64| TOP + plot_h - (r / y_max * plot_h);

    const PALETTE: [&str; 6] = [
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
    ];

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Axes and ticks.
    svg.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h
    ));
    svg.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{}\" stroke=\"black\"/>\n",
        TOP + plot_h
    ));
    for i in 0..=5 {
        let frac = i as f64 / 5.0;
        let tx = x_px(frac * t_max);
        let ty = TOP + plot_h;
        svg.push_str(&format!(
            "<line x1=\"{tx:.2}\" y1=\"{ty:.2}\" x2=\"{tx:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
            ty + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{tx:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{:.0}</text>\n",
            ty + 20.0,
            frac * t_max
        ));
        let yv = frac * y_max;
        let py = y_px(yv);
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{LEFT}\" y2=\"{py:.2}\" stroke=\"black\"/>\n",
            LEFT - 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{yv:.1}</text>\n",
            LEFT - 9.0,
            py + 4.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">round t</text>\n",
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" \
         transform=\"rotate(-90 18 {:.2})\">cumulative regret</text>\n",
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    ));

    for (si, s) in series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let color = PALETTE[si % PALETTE.len()];
        let stride = s.points.len().div_ceil(MAX_POINTS).max(1);
        let mut coords = String::new();
        for (i, &(t, r)) in s.points.iter().enumerate() {
            if i % stride == 0 || i + 1 == s.points.len() {
                coords.push_str(&format!("{:.2},{:.2} ", x_px(t as f64), y_px(r)));
            }
        }
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            coords.trim_end()
        ));
        // Legend entry.
        let ly = TOP + 16.0 + 20.0 * si as f64;
        let lx = LEFT + plot_w + 14.0;
        svg.push_str(&format!(
            "<line x1=\"{lx:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" \
             stroke=\"{color}\" stroke-width=\"2\"/>\n",
            lx + 18.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">{}</text>\n",
            lx + 24.0,
            ly + 4.0,
            xml_escape(&s.label)
        ));
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg)?;
    Ok(())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algo_names_round_trip() {
        for name in [AlgoName::FairUcb, AlgoName::HighStartup, AlgoName::BaselineUcb] {
            assert_eq!(name.as_str().parse::<AlgoName>().unwrap(), name);
        }
        assert!("ucb".parse::<AlgoName>().is_err());
    }

    #[test]
    fn config_validation_names_fields() {
        let mut config = ExperimentConfig::default();
        config.horizon = 0;
        match config.validate() {
            Err(Error::InvalidConfig { field, .. }) => assert_eq!(field, "horizon"),
            other => panic!("expected config error, got {other:?}"),
        }
        let mut config = ExperimentConfig::default();
        config.algorithms.clear();
        match config.validate() {
            Err(Error::InvalidConfig { field, .. }) => assert_eq!(field, "algorithms"),
            other => panic!("expected config error, got {other:?}"),
        }
        let mut config = ExperimentConfig::default();
        config.delta = 1.5;
        assert!(config.validate().is_err());
    }

    #[test]
    fn checkpoints_include_final_round() {
        let mut config = ExperimentConfig::default();
        config.horizon = 500;
        config.checkpoint_every = 200;
        assert_eq!(config.checkpoints(), vec![200, 400, 500]);
        config.checkpoint_every = 0;
        assert_eq!(config.checkpoints(), vec![500]);
        config.checkpoint_every = 250;
        config.horizon = 500;
        assert_eq!(config.checkpoints(), vec![250, 500]);
    }

    #[test]
    fn mean_and_std_match_hand_values() {
        let (m, s) = mean_and_std(&[1.0, 2.0, 3.0]);
        assert!((m - 2.0).abs() < 1e-15);
        assert!((s - 1.0).abs() < 1e-15);
        let (m, s) = mean_and_std(&[5.0]);
        assert_eq!(m, 5.0);
        assert_eq!(s, 0.0);
    }

    #[test]
    fn config_file_round_trips_through_toml() {
        let config = ExperimentConfig {
            sizes: vec![(4, 2), (20, 4)],
            horizon: 1000,
            algorithms: vec![AlgoName::FairUcb, AlgoName::BaselineUcb],
            ..ExperimentConfig::default()
        };
        let text = toml::to_string(&config).unwrap();
        let back: ExperimentConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.sizes, config.sizes);
        assert_eq!(back.algorithms, config.algorithms);
        assert_eq!(back.horizon, 1000);

        // Partial files fall back to defaults.
        let partial: ExperimentConfig = toml::from_str("horizon = 42").unwrap();
        assert_eq!(partial.horizon, 42);
        assert_eq!(partial.instance_count, 10);
        assert!(toml::from_str::<ExperimentConfig>("unknown_field = 1").is_err());
    }
}
