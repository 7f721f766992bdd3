use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Smallest fiber norm accepted as a point of the slit tangent bundle.
pub const MIN_FIBER_NORM: f64 = 1e-8;

/// A point `(x, y)` of the slit tangent bundle in a single chart.
///
/// Variables are numbered `x¹..xⁿ` as `0..n` and `y¹..yⁿ` as `n..2n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl ChartPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.is_empty() {
            return Err(GeomError::Dimension(format!("x has {} entries, y has {}", x.len(), y.len())));
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > MIN_FIBER_NORM) {
            return Err(GeomError::Domain(format!("|y| = {norm:e} is on the zero section")));
        }
        Ok(ChartPoint { x, y })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// `(x, y)` concatenated.
    pub fn coords(&self) -> Vec<f64> {
        self.x.iter().chain(self.y.iter()).copied().collect()
    }

    pub fn from_coords(z: &[f64]) -> Result<Self> {
        let n = z.len() / 2;
        ChartPoint::new(z[..n].to_vec(), z[n..].to_vec())
    }

    /// Same base point, fiber coordinate scaled by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        ChartPoint::new(self.x.clone(), self.y.iter().map(|v| v * lambda).collect())
    }

    /// Index of the `x^i` variable.
    pub fn xv(i: usize) -> usize {
        i
    }

    /// Index of the `y^i` variable in dimension `n`.
    pub fn yv(n: usize, i: usize) -> usize {
        n + i
    }

    /// Parse `"x=0.3,0;y=1,0"`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut x = None;
        let mut y = None;
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| GeomError::Config(format!("expected key=value in '{part}'")))?;
            let vals = v
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| GeomError::Config(format!("bad number '{t}': {e}"))))
                .collect::<Result<Vec<_>>>()?;
            match k.trim() {
                "x" => x = Some(vals),
                "y" => y = Some(vals),
                other => return Err(GeomError::Config(format!("unknown key '{other}'"))),
            }
        }
        match (x, y) {
            (Some(x), Some(y)) => ChartPoint::new(x, y).map_err(|e| GeomError::Config(e.to_string())),
            _ => Err(GeomError::Config("point needs both x=... and y=...".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_section_rejected() {
        assert!(ChartPoint::new(vec![0.0, 0.0], vec![0.0, 1e-9]).is_err());
        assert!(ChartPoint::new(vec![0.0], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn parse_point() {
        let p = ChartPoint::parse("x=0.3,0; y=1,0").unwrap();
        assert_eq!(p.x(), &[0.3, 0.0]);
        assert_eq!(p.y(), &[1.0, 0.0]);
        assert!(ChartPoint::parse("x=0.3,0").is_err());
        assert!(ChartPoint::parse("x=a;y=1").is_err());
    }
}
