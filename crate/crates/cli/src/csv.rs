//! CSV output with 12 significant digits.

use std::fmt::Write as _;

use crate::config::{Output, SweepConfig};
use crate::format::general;
use crate::sweep::Row;

const DIGITS: usize = 12;

pub fn header(config: &SweepConfig) -> Vec<&'static str> {
    let mut columns = vec!["series", "snr_db", "fdT", "L", "relays", "scheme"];
    for output in &config.outputs {
        columns.extend_from_slice(match output {
            Output::McCapacity => &["mc_capacity", "mc_stderr"][..],
            Output::AnalyticBound => &["analytic_bound"][..],
            Output::NormalizedDifference => {
                &["normalized_difference", "normalized_difference_stderr"][..]
            }
        });
    }
    columns
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn number(v: Option<f64>) -> String {
    v.map(|x| general(x, DIGITS)).unwrap_or_default()
}

pub fn render(config: &SweepConfig, rows: &[Row]) -> String {
    let mut out = header(config).join(",");
    out.push('\n');
    for row in rows {
        let p = &row.point;
        let mut fields = vec![
            quote(&p.series),
            number(p.snr_db),
            number(p.doppler_delay),
            p.prediction_length
                .map(|l| l.to_string())
                .unwrap_or_default(),
            p.network.relays.to_string(),
            p.scheme.name().to_string(),
        ];
        for output in &config.outputs {
            match output {
                Output::McCapacity => {
                    fields.push(number(row.mc_capacity.map(|v| v.0)));
                    fields.push(number(row.mc_capacity.map(|v| v.1)));
                }
                Output::AnalyticBound => fields.push(number(row.analytic_bound)),
                Output::NormalizedDifference => {
                    fields.push(number(row.normalized_difference.map(|v| v.0)));
                    fields.push(number(row.normalized_difference.map(|v| v.1)));
                }
            }
        }
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}
