//! Evaluation of a sweep configuration, point by point.

use relaycap::analytic::{capacity_lower_bound, BoundOptions};
use relaycap::channel::ChannelModel;
use relaycap::montecarlo::{normalized_difference, run, Coupling, ExperimentSpec, Targets};
use relaycap::sinr::relay_params;

use crate::config::{Output, Point, SweepConfig};
use crate::error::CliError;

/// Results at one grid point; `None` for outputs that were not requested.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub point: Point,
    pub mc_capacity: Option<(f64, f64)>,
    pub analytic_bound: Option<f64>,
    pub normalized_difference: Option<(f64, f64)>,
}

impl Row {
    /// The value plotted for `output`.
    pub fn value(&self, output: Output) -> Option<f64> {
        match output {
            Output::McCapacity => self.mc_capacity.map(|v| v.0),
            Output::AnalyticBound => self.analytic_bound,
            Output::NormalizedDifference => self.normalized_difference.map(|v| v.0),
        }
    }
}

pub fn run_sweep(
    config: &SweepConfig,
    mut progress: impl FnMut(&Row),
) -> Result<Vec<Row>, CliError> {
    let points = config.points()?;
    let mut rows = Vec::with_capacity(points.len());
    for point in points {
        let row = evaluate(config, point)?;
        progress(&row);
        rows.push(row);
    }
    Ok(rows)
}

fn evaluate(config: &SweepConfig, point: Point) -> Result<Row, CliError> {
    let context = format!(
        "series '{}', {} = {}",
        point.series,
        config.axis.column(),
        point.axis_value
    );
    let wants = |o| config.outputs.contains(&o);
    let mut row = Row {
        point,
        mc_capacity: None,
        analytic_bound: None,
        normalized_difference: None,
    };
    let p = &row.point;
    if wants(Output::McCapacity) {
        let spec = ExperimentSpec {
            network: p.network.clone(),
            csi: p.csi.clone(),
            scheme: p.scheme,
            trials: config.trials,
            base_seed: config.seed,
            targets: Targets::default(),
        };
        let result = run(&spec).map_err(|e| CliError::numerical("montecarlo", &context, e))?;
        let capacity = result.capacity.expect("capacity target requested");
        row.mc_capacity = Some((capacity.mean, capacity.standard_error));
    }
    if wants(Output::AnalyticBound) {
        let model = ChannelModel::new(&p.network, &p.csi)
            .map_err(|e| CliError::numerical("channel", &context, e))?;
        let params = relay_params(&p.network, &p.csi)
            .map_err(|e| CliError::numerical("sinr", &context, e))?;
        let bound = capacity_lower_bound(
            &params,
            &model.scheme_stats(p.scheme),
            &BoundOptions::default(),
        )
        .map_err(|e| CliError::numerical("analytic", &context, e))?;
        row.analytic_bound = Some(bound.capacity);
    }
    if wants(Output::NormalizedDifference) {
        let diff = normalized_difference(
            &p.network,
            &p.csi,
            config.trials,
            config.seed,
            Coupling::Common,
        )
        .map_err(|e| CliError::numerical("montecarlo", &context, e))?;
        row.normalized_difference = Some((diff.value, diff.standard_error));
    }
    for v in [
        row.analytic_bound,
        row.mc_capacity.map(|v| v.0),
        row.normalized_difference.map(|v| v.0),
    ]
    .into_iter()
    .flatten()
    {
        if !v.is_finite() {
            return Err(CliError::numerical(
                "sweep",
                context,
                format!("non-finite result {v}"),
            ));
        }
    }
    Ok(row)
}
