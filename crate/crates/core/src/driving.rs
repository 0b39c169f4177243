//! Base dynamics `σ` driving the cocycle.

use std::path::Path;

use crate::error::{Error, Result};
use crate::maps::frac;

/// Anything that can produce the fiber sequence `ω₀, σω₀, σ²ω₀, …`.
pub trait BaseDynamics: Send + Sync {
    fn orbit(&self, omega0: f64, n: usize) -> Result<Vec<f64>>;
}

/// Rigid rotation `ω ↦ ω + α (mod 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationBase {
    pub alpha: f64,
    pub origin: f64,
}

impl Default for RotationBase {
    fn default() -> Self {
        Self {
            alpha: 0.5 * std::f64::consts::SQRT_2,
            origin: 0.0,
        }
    }
}

impl RotationBase {
    pub fn new(alpha: f64, origin: f64) -> Self {
        Self { alpha, origin }
    }

    /// `σⁿω` for any integer `n`.
    pub fn advance(&self, omega: f64, n: i64) -> f64 {
        // Reduce α·n before adding ω to keep the sum small.
        frac(omega + frac(n as f64 * self.alpha))
    }
}

impl BaseDynamics for RotationBase {
    fn orbit(&self, omega0: f64, n: usize) -> Result<Vec<f64>> {
        Ok((0..n as i64).map(|j| self.advance(omega0, j)).collect())
    }
}

/// A user-supplied fiber sequence. `omega0` is ignored; the sequence starts where the file does.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitSequence {
    values: Vec<f64>,
}

impl OrbitSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("orbit sequence is empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("orbit value {v} is not finite")));
        }
        Ok(Self {
            values: values.into_iter().map(frac).collect(),
        })
    }

    /// Newline-separated ω values; blank lines and `#` comments are skipped.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let values = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                l.parse::<f64>()
                    .map_err(|e| Error::Config(format!("bad orbit value {l:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }
}

impl BaseDynamics for OrbitSequence {
    fn orbit(&self, _omega0: f64, n: usize) -> Result<Vec<f64>> {
        if n > self.values.len() {
            return Err(Error::Config(format!(
                "orbit file has {} values, {n} requested",
                self.values.len()
            )));
        }
        Ok(self.values[..n].to_vec())
    }
}

/// The base systems selectable from a config.
#[derive(Clone, Debug, PartialEq)]
pub enum Base {
    Rotation(RotationBase),
    Sequence(OrbitSequence),
}

impl BaseDynamics for Base {
    fn orbit(&self, omega0: f64, n: usize) -> Result<Vec<f64>> {
        match self {
            Base::Rotation(r) => r.orbit(omega0, n),
            Base::Sequence(s) => s.orbit(omega0, n),
        }
    }
}

impl Default for Base {
    fn default() -> Self {
        Base::Rotation(RotationBase::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_alpha() {
        assert!((RotationBase::default().alpha - 0.5f64.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn advance_examples() {
        let r = RotationBase::default();
        assert_eq!(r.advance(0.0, 0), 0.0);
        assert!((r.advance(0.0, 2) - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let q = RotationBase::new(0.25, 0.0);
        assert!((q.advance(0.9, 1) - 0.15).abs() < 1e-15);
    }

    #[test]
    fn orbit_examples() {
        let r = RotationBase::default();
        assert_eq!(r.orbit(0.3, 1).unwrap(), vec![0.3]);
        let o = r.orbit(0.0, 3).unwrap();
        assert!((o[1] - 0.5f64.sqrt()).abs() < 1e-15 && (o[2] - 0.4142136).abs() < 1e-7);
        let third = RotationBase::new(1.0 / 3.0, 0.0).orbit(0.0, 4).unwrap();
        assert!((third[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((third[2] - 2.0 / 3.0).abs() < 1e-15);
        assert!(third[3] < 1e-15 || third[3] > 1.0 - 1e-15);
    }

    #[test]
    fn invertibility() {
        let r = RotationBase::default();
        for &n in &[1_i64, 17, 999, 123_456, 1_000_000] {
            for &w in &[0.0, 0.3, 0.999] {
                let back = r.advance(r.advance(w, n), -n);
                let err = (back - w).abs().min(1.0 - (back - w).abs());
                assert!(err < 1e-12, "n={n} ω={w}: {back}");
            }
        }
    }

    #[test]
    fn equidistribution_smoke() {
        let o = RotationBase::default().orbit(0.0, 10_000).unwrap();
        let frac_low = o.iter().filter(|&&w| w < 0.5).count() as f64 / o.len() as f64;
        assert!((0.49..=0.51).contains(&frac_low), "{frac_low}");
    }

    #[test]
    fn sequence_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("orbit.txt");
        std::fs::write(&path, "0.1\n# comment\n0.5\n\n1.25\n").unwrap();
        let s = OrbitSequence::from_file(&path).unwrap();
        assert_eq!(s.orbit(0.0, 3).unwrap(), vec![0.1, 0.5, 0.25]);
        assert!(s.orbit(0.0, 4).is_err());
    }
}
