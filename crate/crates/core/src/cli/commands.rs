use rayon::prelude::*;
use serde_json::{json, Map, Value as Json};

use super::config::{ExperimentConfig, Prepared};
use super::table::ResultTable;
use crate::covariance::{
    build_scenario, discrepancy_field, metric_condition_scan, CovarianceExperiment,
    COVARIANCE_TOLERANCE, DECOMPOSITION_TOLERANCE, NON_INERTIAL_THRESHOLD,
};
use crate::localization::{
    continuity_residual, localization_current, localization_density, ContinuityContract,
    QueryInterval, CONTINUITY_TOLERANCE, NORMALIZATION_TOLERANCE, POSITIVITY_TOLERANCE,
};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Localization density Π(x) per time and grid point.
    Localize,
    /// Localization current (J⁰, J¹) and its continuity residual.
    Current,
    /// Naive and linear forms on a chart's initial surface, with the separating terms.
    Discrepancy,
    /// Interval probabilities in Cartesian and chart coordinates.
    Covariance,
    /// Maximum discrepancy over a one-parameter chart family.
    Scan,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Localize => "localize",
            Command::Current => "current",
            Command::Discrepancy => "discrepancy",
            Command::Covariance => "covariance",
            Command::Scan => "scan",
        }
    }
}

fn base_metadata(
    command: Command,
    config: &ExperimentConfig,
    prepared: &Prepared,
) -> Map<String, Json> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command.name()));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("config".into(), json!(config.raw()));
    m.insert("resolved_config".into(), config.resolved());
    m.insert("chart".into(), json!(prepared.chart.label()));
    m.insert(
        "tolerances".into(),
        json!({
            "normalization": NORMALIZATION_TOLERANCE,
            "positivity": POSITIVITY_TOLERANCE,
            "continuity": CONTINUITY_TOLERANCE,
            "covariance": COVARIANCE_TOLERANCE,
            "decomposition": DECOMPOSITION_TOLERANCE,
            "non_inertial_threshold": NON_INERTIAL_THRESHOLD,
        }),
    );
    m
}

fn foliation_label(non_inertial: bool) -> &'static str {
    if non_inertial {
        "non-inertial foliation"
    } else {
        "inertial foliation"
    }
}

pub fn run(
    command: Command,
    config: &ExperimentConfig,
    prepared: &Prepared,
) -> Result<ResultTable> {
    let mut flags = Map::new();
    let mut table = match command {
        Command::Localize => {
            let fields = config
                .times
                .par_iter()
                .map(|&t| localization_density(&prepared.state, t))
                .collect::<Result<Vec<_>>>()?;
            let mut table = ResultTable::new(vec!["t", "x", "Pi"]);
            for f in &fields {
                for (x, v) in f.grid.iter().zip(&f.values) {
                    table.push(vec![f.time, *x, *v]);
                }
            }
            table
        }
        Command::Current => {
            let results = config
                .times
                .par_iter()
                .map(|&t| {
                    Ok((
                        localization_current(&prepared.state, t)?,
                        continuity_residual(&prepared.state, t)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut table = ResultTable::new(vec!["t", "x", "J0", "J1", "continuity_residual"]);
            let mut contract = ContinuityContract::Enforced;
            for ((j0, j1), report) in &results {
                contract = report.contract;
                for i in 0..j0.len() {
                    table.push(vec![
                        j0.time,
                        j0.grid[i],
                        j0.values[i],
                        j1.values[i],
                        report.residual.values[i],
                    ]);
                }
            }
            let label = match contract {
                ContinuityContract::Enforced => "enforced",
                ContinuityContract::Waived => "waived",
            };
            flags.insert("continuity_contract".into(), json!(label));
            table
        }
        Command::Discrepancy => {
            let scenario = build_scenario(prepared.chart.clone())?;
            let r = discrepancy_field(&prepared.state, &scenario)?;
            let mut table = ResultTable::new(vec![
                "x",
                "naive",
                "linear",
                "discrepancy",
                "term_phi2",
                "term_piphi",
                "term_dphiphi",
            ]);
            for j in 0..r.discrepancy.len() {
                table.push(vec![
                    r.discrepancy.grid[j],
                    r.naive_form.values[j],
                    r.linear_form.values[j],
                    r.discrepancy.values[j],
                    r.term_phi2.values[j],
                    r.term_piphi.values[j],
                    r.term_dphiphi.values[j],
                ]);
            }
            flags.insert(
                "foliation".into(),
                json!(foliation_label(scenario.is_non_inertial())),
            );
            table
        }
        Command::Covariance => {
            let scenario = build_scenario(prepared.chart.clone())?;
            let experiment = CovarianceExperiment::new(&prepared.state, &scenario)?;
            let mut table = ResultTable::new(vec![
                "interval_lo",
                "interval_hi",
                "prob_cartesian",
                "prob_naive",
                "prob_modified",
                "dev_naive",
                "dev_modified",
            ]);
            for (lo, hi) in config.effective_intervals() {
                let r = experiment.check(&QueryInterval::new(lo, hi)?)?;
                table.push(vec![
                    r.interval_lo,
                    r.interval_hi,
                    r.prob_cartesian,
                    r.prob_chart_naive,
                    r.prob_chart_modified,
                    r.dev_naive,
                    r.dev_modified,
                ]);
            }
            flags.insert(
                "foliation".into(),
                json!(foliation_label(scenario.is_non_inertial())),
            );
            table
        }
        Command::Scan => {
            let scan = config
                .scan
                .as_ref()
                .expect("scan settings are checked before dispatch");
            let rows = metric_condition_scan(scan.family, &scan.parameters, &prepared.state)?;
            let mut table =
                ResultTable::new(vec!["parameter", "max_abs_discrepancy", "max_dev_modified"]);
            let flagged: Vec<f64> = rows
                .iter()
                .filter(|r| r.non_inertial)
                .map(|r| r.parameter)
                .collect();
            for r in &rows {
                table.push(vec![r.parameter, r.max_abs_discrepancy, r.max_dev_modified]);
            }
            flags.insert("family".into(), json!(scan.family.name()));
            flags.insert(
                "foliation".into(),
                json!(foliation_label(!flagged.is_empty())),
            );
            flags.insert("non_inertial_parameters".into(), json!(flagged));
            table
        }
    };
    table.metadata = base_metadata(command, config, prepared);
    table.metadata.insert("flags".into(), Json::Object(flags));
    Ok(table)
}
