//! Literature reference curves, read from `lambda,value,source` CSV files and
//! used only for side-by-side comparison.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::sweep::EnvelopePoint;
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
struct Record {
    lambda: f64,
    value: f64,
    source: String,
}

/// One named curve, sorted by rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceCurve {
    pub source: String,
    pub points: Vec<(f64, f64)>,
}

impl ReferenceCurve {
    /// Linear interpolation; `None` outside the tabulated range.
    pub fn value_at(&self, lambda: f64) -> Option<f64> {
        let first = self.points.first()?;
        let last = self.points.last()?;
        if lambda < first.0 || lambda > last.0 {
            return None;
        }
        let k = self.points.partition_point(|p| p.0 < lambda);
        let (x1, y1) = self.points[k];
        if x1 == lambda || k == 0 {
            return Some(y1);
        }
        let (x0, y0) = self.points[k - 1];
        Some(y0 + (y1 - y0) * (lambda - x0) / (x1 - x0))
    }
}

fn parse(reader: impl std::io::Read, origin: &Path) -> Result<Vec<ReferenceCurve>> {
    let bad = |msg: String| Error::InvalidParameter(format!("{}: {msg}", origin.display()));
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["lambda", "value", "source"] {
        return Err(bad(format!("expected header lambda,value,source, got {headers:?}")));
    }
    let mut curves: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for rec in rdr.deserialize::<Record>() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if !(rec.lambda.is_finite() && rec.value.is_finite()) {
            return Err(bad(format!("non-finite entry at lambda={}", rec.lambda)));
        }
        curves.entry(rec.source).or_default().push((rec.lambda, rec.value));
    }
    Ok(curves
        .into_iter()
        .map(|(source, mut points)| {
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            ReferenceCurve { source, points }
        })
        .collect())
}

pub fn load_reference_csv(path: &Path) -> Result<Vec<ReferenceCurve>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse(file, path)
}

/// Our envelope against one reference curve at one rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub lambda: f64,
    pub source: String,
    pub computed: f64,
    pub reference: f64,
    /// `100 · (reference − computed) / reference`; positive when ours is
    /// tighter.
    pub improvement_pct: f64,
}

pub fn compare(envelope: &[EnvelopePoint], curves: &[ReferenceCurve]) -> Vec<Comparison> {
    let mut out = Vec::new();
    for point in envelope {
        for curve in curves {
            if let Some(reference) = curve.value_at(point.lambda) {
                out.push(Comparison {
                    lambda: point.lambda,
                    source: curve.source.clone(),
                    computed: point.value,
                    reference,
                    improvement_pct: 100.0 * (reference - point.value) / reference,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{BlockSpec, BoundKind};

    #[test]
    fn parses_and_interpolates() {
        let text = "lambda,value,source\n0.5,0.40,UB-A\n1.0,0.60,UB-A\n0.5,0.1,LB\n";
        let curves = parse(text.as_bytes(), Path::new("mem")).unwrap();
        assert_eq!(curves.len(), 2);
        let ub = curves.iter().find(|c| c.source == "UB-A").unwrap();
        assert_eq!(ub.value_at(0.5), Some(0.40));
        assert!((ub.value_at(0.75).unwrap() - 0.50).abs() < 1e-15);
        assert_eq!(ub.value_at(1.5), None);

        let env = [EnvelopePoint {
            lambda: 0.75,
            value: 0.45,
            block: BlockSpec::new(2, None, 4),
            kind: BoundKind::LengthUpper,
        }];
        let cmp = compare(&env, &curves[1..]);
        assert_eq!(cmp.len(), 1);
        assert!((cmp[0].improvement_pct - 10.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_wrong_header() {
        assert!(parse("lam,value,source\n1,2,x\n".as_bytes(), Path::new("mem")).is_err());
        assert!(parse("lambda,value,source\n1,abc,x\n".as_bytes(), Path::new("mem")).is_err());
    }
}
