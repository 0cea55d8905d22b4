use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
    pub values: Vec<f64>,
}

/// Columns sampled on a common, strictly increasing time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    t: Vec<f64>,
    columns: Vec<Column>,
}

impl TimeSeries {
    pub fn new(t: Vec<f64>) -> Result<Self> {
        if t.windows(2).any(|w| !(w[1] > w[0])) || t.iter().any(|x| !x.is_finite()) {
            return Err(invalid("t", "must be finite and strictly increasing"));
        }
        Ok(Self { t, columns: Vec::new() })
    }

    pub fn with_column(mut self, name: &str, unit: &str, values: Vec<f64>) -> Result<Self> {
        self.push_column(name, unit, values)?;
        Ok(self)
    }

    pub fn push_column(&mut self, name: &str, unit: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.t.len() {
            return Err(invalid("columns", format!("`{name}` length differs from t")));
        }
        if self.column(name).is_some() {
            return Err(invalid("columns", format!("duplicate column `{name}`")));
        }
        self.columns.push(Column {
            name: name.to_string(),
            unit: unit.to_string(),
            values,
        });
        Ok(())
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    /// Pointwise mean and standard error over replicas sharing one grid and
    /// column layout.
    pub fn mean_of(series: &[TimeSeries]) -> Result<(TimeSeries, TimeSeries)> {
        let first = series.first().ok_or_else(|| invalid("series", "need at least one replica"))?;
        for s in series {
            if s.t != first.t || s.columns.len() != first.columns.len() {
                return Err(invalid("series", "replicas must share grid and columns"));
            }
        }
        let k = series.len() as f64;
        let mut mean = TimeSeries::new(first.t.clone())?;
        let mut se = TimeSeries::new(first.t.clone())?;
        for (ci, col) in first.columns.iter().enumerate() {
            let mut m = vec![0.0; first.len()];
            let mut e = vec![0.0; first.len()];
            for i in 0..first.len() {
                let xs: Vec<f64> = series.iter().map(|s| s.columns[ci].values[i]).collect();
                let mu = xs.iter().sum::<f64>() / k;
                m[i] = mu;
                e[i] = if series.len() > 1 {
                    (xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
                } else {
                    0.0
                };
            }
            mean.push_column(&col.name, &col.unit, m)?;
            se.push_column(&col.name, &col.unit, e)?;
        }
        Ok((mean, se))
    }
}
