//! Goodness-of-fit and interval containment metrics.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn same_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("lengths differ: {a} vs {b}")));
    }
    Ok(())
}

/// `1 - SS_res / SS_tot`, with `SS_tot` about the mean of `y_true`.
pub fn r_squared(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    same_len(y_true.len(), y_pred.len())?;
    if y_true.len() < 2 {
        return Err(Error::EmptyData("R^2 needs at least two observations".into()));
    }
    let mean = y_true.iter().sum::<f64>() / y_true.len() as f64;
    let ss_tot: f64 = y_true.iter().map(|y| (y - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::Degenerate("R^2 is undefined for a constant response".into()));
    }
    let ss_res: f64 = y_true.iter().zip(y_pred).map(|(y, f)| (y - f).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

pub fn rmse(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    same_len(y_true.len(), y_pred.len())?;
    if y_true.is_empty() {
        return Err(Error::EmptyData("RMSE of no observations".into()));
    }
    let sse: f64 = y_true.iter().zip(y_pred).map(|(y, f)| (y - f).powi(2)).sum();
    Ok((sse / y_true.len() as f64).sqrt())
}

fn check_interval(lo: f64, hi: f64, i: usize) -> Result<()> {
    if !(lo <= hi) {
        return Err(Error::Parameter(format!("interval {i} is malformed: [{lo}, {hi}]")));
    }
    Ok(())
}

/// Number of `y_true[i]` inside `intervals[i]`, endpoints included.
pub fn interval_hits(y_true: &[f64], intervals: &[(f64, f64)]) -> Result<usize> {
    same_len(y_true.len(), intervals.len())?;
    let mut hits = 0;
    for (i, (&y, &(lo, hi))) in y_true.iter().zip(intervals).enumerate() {
        check_interval(lo, hi, i)?;
        hits += usize::from(lo <= y && y <= hi);
    }
    Ok(hits)
}

/// Number of points inside their axis-aligned rectangle.
pub fn region_hits(truth: &[[f64; 2]], regions: &[[(f64, f64); 2]]) -> Result<usize> {
    same_len(truth.len(), regions.len())?;
    let mut hits = 0;
    for (i, (t, r)) in truth.iter().zip(regions).enumerate() {
        check_interval(r[0].0, r[0].1, i)?;
        check_interval(r[1].0, r[1].1, i)?;
        hits += usize::from((0..2).all(|k| r[k].0 <= t[k] && t[k] <= r[k].1));
    }
    Ok(hits)
}

/// One model's row in a comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub model_name: String,
    pub response_names: Vec<String>,
    /// Empty when only test predictions were available.
    pub train_r2: Vec<f64>,
    pub test_r2: Vec<f64>,
    pub rmse: Vec<f64>,
    /// Empty for point-estimate models.
    pub interval_hits: Vec<usize>,
    /// Only for joint two-response models.
    pub region_hits: Option<usize>,
    pub n_test: usize,
}

impl MetricsReport {
    pub fn validate(&self) -> Result<()> {
        let m = self.response_names.len();
        let optional = |l: usize| l == 0 || l == m;
        if self.test_r2.len() != m
            || self.rmse.len() != m
            || !optional(self.train_r2.len())
            || !optional(self.interval_hits.len())
        {
            return Err(Error::Dimension("per-response metrics disagree in length".into()));
        }
        if self.interval_hits.iter().chain(self.region_hits.iter()).any(|&h| h > self.n_test) {
            return Err(Error::Consistency("more hits than test rows".into()));
        }
        if self.train_r2.iter().chain(&self.test_r2).any(|&r| r > 1.0) {
            return Err(Error::Consistency("R^2 above one".into()));
        }
        Ok(())
    }
}

/// Aligned text table with one block per response.
pub struct ReportTable<'a>(pub &'a [MetricsReport]);

impl fmt::Display for ReportTable<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(first) = self.0.first() else { return Ok(()) };
        let width = self.0.iter().map(|r| r.model_name.len()).max().unwrap_or(5).max(5);
        for (k, name) in first.response_names.iter().enumerate() {
            writeln!(f, "{name}")?;
            writeln!(
                f,
                "{:<width$}  {:>9}  {:>9}  {:>9}  {:>13}",
                "model", "train R2", "test R2", "RMSE", "interval hits"
            )?;
            for r in self.0 {
                let hits = match r.interval_hits.get(k) {
                    Some(h) => format!("{h}/{}", r.n_test),
                    None => "-".to_string(),
                };
                let num = |v: &[f64]| v.get(k).map_or("-".to_string(), |x| format!("{x:.4}"));
                writeln!(
                    f,
                    "{:<width$}  {:>9}  {:>9}  {:>9}  {:>13}",
                    r.model_name,
                    num(&r.train_r2),
                    num(&r.test_r2),
                    num(&r.rmse),
                    hits
                )?;
            }
            writeln!(f)?;
        }
        let joint: Vec<_> = self.0.iter().filter_map(|r| r.region_hits.map(|h| (r, h))).collect();
        if !joint.is_empty() {
            writeln!(f, "{:<width$}  {:>11}", "model", "region hits")?;
            for (r, h) in joint {
                writeln!(f, "{:<width$}  {:>11}", r.model_name, format!("{h}/{}", r.n_test))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_squared_examples() {
        let y = [1.0, 2.0, 4.0];
        assert_eq!(r_squared(&y, &y).unwrap(), 1.0);
        let m = [7.0 / 3.0; 3];
        assert!(r_squared(&y, &m).unwrap().abs() < 1e-15);
        assert_eq!(r_squared(&[0.0, 1.0], &[1.0, 0.0]).unwrap(), -3.0);
        assert!(matches!(r_squared(&[2.0, 2.0], &[1.0, 0.0]), Err(Error::Degenerate(_))));
        assert!(r_squared(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn rmse_examples() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), (12.5f64).sqrt());
    }

    #[test]
    fn hits_examples() {
        let y = [0.3, -4.0, 1e6];
        let wide = [(-1e300, 1e300); 3];
        assert_eq!(interval_hits(&y, &wide).unwrap(), 3);
        let point: Vec<_> = y.iter().map(|&v| (v, v)).collect();
        assert_eq!(interval_hits(&y, &point).unwrap(), 3);
        assert!(interval_hits(&[0.0], &[(1.0, 0.0)]).is_err());
        let truth = [[0.0, 0.0], [0.5, 2.0]];
        let r = [[(-1.0, 1.0), (-1.0, 1.0)]; 2];
        assert_eq!(region_hits(&truth, &r).unwrap(), 1);
    }

    #[test]
    fn table_lists_every_model() {
        let r = MetricsReport {
            model_name: "ard".into(),
            response_names: vec!["arousal".into()],
            train_r2: vec![0.5],
            test_r2: vec![0.4],
            rmse: vec![0.1],
            interval_hits: vec![9],
            region_hits: None,
            n_test: 10,
        };
        r.validate().unwrap();
        let text = ReportTable(&[r]).to_string();
        assert!(text.contains("9/10") && text.contains("arousal"), "{text}");
    }
}
