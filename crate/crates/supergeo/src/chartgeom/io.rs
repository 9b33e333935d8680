//! JSON serialization for charts with graded metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::{superfunction_from_doc, superfunction_to_doc, SuperfunctionDoc};

use super::{Chart, GradedMetric};

/// On-disk description of a chart and its metric.
///
/// `even` and `odd` list the coordinate names (their lengths fix `n` and
/// `m`), and `metric` is the full `(n+m) × (n+m)` matrix of superfunction
/// entries in flat axis order. Entries must use exact (polynomial or
/// rational) coefficients — opaque closures cannot be serialized.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChartDoc {
    pub name: String,
    pub even: Vec<String>,
    pub odd: Vec<String>,
    pub metric: Vec<Vec<SuperfunctionDoc>>,
}

/// Parses a JSON document into a structurally validated metric.
pub fn chart_from_json(text: &str) -> Result<GradedMetric> {
    let doc: ChartDoc = serde_json::from_str(text)?;
    let chart = Chart::new(doc.name, doc.even, doc.odd);
    let (n, m, dim) = (chart.n(), chart.m(), chart.dim());
    if doc.metric.len() != dim || doc.metric.iter().any(|row| row.len() != dim) {
        return Err(Error::Format(format!(
            "metric must be a {dim}x{dim} matrix to match the coordinate lists"
        )));
    }
    let mut entries = Vec::with_capacity(dim);
    for row in &doc.metric {
        let mut out = Vec::with_capacity(dim);
        for cell in row {
            out.push(superfunction_from_doc(cell, n, m)?);
        }
        entries.push(out);
    }
    GradedMetric::new(chart, entries)
}

/// Serializes a metric to a JSON string. Fails if any entry carries an
/// opaque coefficient.
pub fn chart_to_json(metric: &GradedMetric) -> Result<String> {
    let dim = metric.dim();
    let mut rows = Vec::with_capacity(dim);
    for a in 0..dim {
        let mut row = Vec::with_capacity(dim);
        for b in 0..dim {
            row.push(superfunction_to_doc(metric.entry(a, b))?);
        }
        rows.push(row);
    }
    let doc = ChartDoc {
        name: metric.chart().name.clone(),
        even: metric.chart().even_names.clone(),
        odd: metric.chart().odd_names.clone(),
        metric: rows,
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

#[cfg(test)]
mod tests {
    use super::super::builtin::{builtin_chart, BUILTIN_CHARTS};
    use super::*;

    #[test]
    fn builtin_charts_roundtrip_through_json() {
        for name in BUILTIN_CHARTS {
            let metric = builtin_chart(name).unwrap();
            let text = chart_to_json(&metric).unwrap();
            let back = chart_from_json(&text).unwrap();
            assert_eq!(back.chart(), metric.chart(), "{name} chart data");
            // Entries must agree exactly at sample points.
            let x: Vec<f64> = (0..metric.n()).map(|i| 0.3 + 0.5 * i as f64).collect();
            for a in 0..metric.dim() {
                for b in 0..metric.dim() {
                    let diff = metric
                        .entry(a, b)
                        .sub(back.entry(a, b))
                        .unwrap()
                        .eval(&x);
                    assert_eq!(diff.max_abs(), 0.0, "{name} entry ({a},{b})");
                }
            }
        }
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let metric = builtin_chart("hyperbolic").unwrap();
        let text = chart_to_json(&metric).unwrap();
        let mut doc: ChartDoc = serde_json::from_str(&text).unwrap();
        doc.even.pop();
        let mangled = serde_json::to_string(&doc).unwrap();
        assert!(chart_from_json(&mangled).is_err());
    }
}
