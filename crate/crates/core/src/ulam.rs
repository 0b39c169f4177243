//! Ulam discretization of fiber transfer operators.
//!
//! **Convention:** densities are *row vectors* and matrices act on the right, so one step of the
//! cocycle is `v ↦ v · M` with `M[i][j] = m(B_i ∩ T⁻¹B_j) / m(B_i)`. Composition along an orbit
//! therefore reads left to right: `v · M_ω · M_{σω} · …`.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::maps::{Interval, PiecewiseMap};

/// Unit-integral tolerance of a [`BinnedDensity`].
pub const MASS_TOL: f64 = 1e-8;
/// Matrices with at least this many bins use compressed-row storage.
pub const SPARSE_THRESHOLD: usize = 512;

/// Bin averages of `samples` over `k` equal bins (the projection `E_k`).
///
/// The sample grid must refine the bin partition, i.e. `k` must divide `samples.len()`.
pub fn conditional_expectation(samples: &[f64], k: usize) -> Result<Vec<f64>> {
    let n = samples.len();
    if k == 0 || n == 0 || !n.is_multiple_of(k) {
        return Err(Error::GridMismatch { samples: n, bins: k });
    }
    let per = n / k;
    Ok(samples
        .chunks_exact(per)
        .map(|c| c.iter().sum::<f64>() / per as f64)
        .collect())
}

/// Repeat each bin value so the step function lives on an `n`-point grid.
pub fn expand_bins(bins: &[f64], n: usize) -> Result<Vec<f64>> {
    let k = bins.len();
    if k == 0 || !n.is_multiple_of(k) {
        return Err(Error::GridMismatch { samples: n, bins: k });
    }
    let per = n / k;
    Ok(bins
        .iter()
        .flat_map(|&v| std::iter::repeat_n(v, per))
        .collect())
}

/// Nonnegative step density on `k` uniform bins with unit integral.
#[derive(Clone, Debug, PartialEq)]
pub struct BinnedDensity {
    values: Vec<f64>,
}

impl BinnedDensity {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDensity("no bins".into()));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidDensity(format!("bin value {v} is negative or not finite")));
        }
        let d = Self { values };
        let mass = d.integral();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDensity(format!("integral {mass} differs from 1")));
        }
        Ok(d)
    }

    /// Lebesgue measure: the constant density 1.
    pub fn lebesgue(k: usize) -> Self {
        Self {
            values: vec![1.0; k],
        }
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn integral(&self) -> f64 {
        integral(&self.values)
    }

    pub fn midpoints(&self) -> impl Iterator<Item = f64> + '_ {
        let k = self.k() as f64;
        (0..self.k()).map(move |j| (j as f64 + 0.5) / k)
    }

    /// Two-column CSV `x,value` at bin midpoints.
    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        crate::io::write_xy_csv(w, self.midpoints().zip(self.values.iter().copied()))
    }
}

/// `(1/k) Σ v`.
pub fn integral(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// `(1/k) Σ |v|`.
pub fn l1_norm(values: &[f64]) -> f64 {
    values.iter().map(|v| v.abs()).sum::<f64>() / values.len() as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Assembly {
    TestPoint { per_bin: usize },
    ExactPreimage,
    Product,
}

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    Dense(Vec<f64>),
    Sparse {
        row_ptr: Vec<usize>,
        cols: Vec<usize>,
        vals: Vec<f64>,
    },
}

/// Row-stochastic `k × k` Ulam matrix of one fiber.
#[derive(Clone, Debug, PartialEq)]
pub struct UlamMatrix {
    k: usize,
    storage: Storage,
    assembly: Assembly,
    fiber: f64,
}

impl UlamMatrix {
    /// Build from per-row `(column, value)` lists sorted by column. Rows are rescaled to sum to 1.
    fn from_rows(k: usize, rows: Vec<Vec<(usize, f64)>>, assembly: Assembly, fiber: f64) -> Self {
        let rows: Vec<Vec<(usize, f64)>> = rows
            .into_iter()
            .map(|r| {
                let s: f64 = r.iter().map(|e| e.1).sum();
                if s > 0.0 {
                    r.into_iter().map(|(j, v)| (j, v / s)).collect()
                } else {
                    r
                }
            })
            .collect();
        Self {
            k,
            storage: build_storage(k, rows),
            assembly,
            fiber,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assembly(&self) -> Assembly {
        self.assembly
    }

    /// Tag the matrix with the base point `ω` it was assembled at.
    pub fn with_fiber(mut self, omega: f64) -> Self {
        self.fiber = omega;
        self
    }

    pub fn fiber(&self) -> f64 {
        self.fiber
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse { .. })
    }

    /// Nonzero `(column, value)` entries of row `i`.
    pub fn row(&self, i: usize) -> Vec<(usize, f64)> {
        match &self.storage {
            Storage::Dense(d) => d[i * self.k..(i + 1) * self.k]
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(j, v)| (j, *v))
                .collect(),
            Storage::Sparse {
                row_ptr,
                cols,
                vals,
            } => (row_ptr[i]..row_ptr[i + 1])
                .map(|p| (cols[p], vals[p]))
                .collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Dense(d) => d[i * self.k + j],
            Storage::Sparse {
                row_ptr,
                cols,
                vals,
            } => {
                let r = &cols[row_ptr[i]..row_ptr[i + 1]];
                r.binary_search(&j)
                    .map(|p| vals[row_ptr[i] + p])
                    .unwrap_or(0.0)
            }
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.k * self.k];
        for i in 0..self.k {
            for (j, v) in self.row(i) {
                d[i * self.k + j] = v;
            }
        }
        d
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.k)
            .map(|i| self.row(i).iter().map(|e| e.1).sum())
            .collect()
    }

    /// `v · M` for an arbitrary (signed) row vector.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                found: v.len(),
            });
        }
        let mut out = vec![0.0; self.k];
        match &self.storage {
            Storage::Dense(d) => {
                for (i, &vi) in v.iter().enumerate() {
                    if vi == 0.0 {
                        continue;
                    }
                    let row = &d[i * self.k..(i + 1) * self.k];
                    for (o, &m) in out.iter_mut().zip(row) {
                        *o += vi * m;
                    }
                }
            }
            Storage::Sparse {
                row_ptr,
                cols,
                vals,
            } => {
                for (i, &vi) in v.iter().enumerate() {
                    for p in row_ptr[i]..row_ptr[i + 1] {
                        out[cols[p]] += vi * vals[p];
                    }
                }
            }
        }
        Ok(out)
    }

    /// The matrix of "apply `self`, then `next`" (i.e. `self · next`).
    pub fn then(&self, next: &UlamMatrix) -> Result<UlamMatrix> {
        if next.k != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                found: next.k,
            });
        }
        let k = self.k;
        let rows: Vec<Vec<(usize, f64)>> = (0..k)
            .into_par_iter()
            .map(|i| {
                let mut acc = vec![0.0; k];
                for (l, a) in self.row(i) {
                    for (j, b) in next.row(l) {
                        acc[j] += a * b;
                    }
                }
                acc.into_iter()
                    .enumerate()
                    .filter(|(_, v)| *v != 0.0)
                    .collect()
            })
            .collect();
        // Products of stochastic matrices are stochastic; no renormalization.
        Ok(UlamMatrix {
            k,
            storage: build_storage(k, rows),
            assembly: Assembly::Product,
            fiber: self.fiber,
        })
    }

    /// Dense CSV, one row per line.
    pub fn write_dense_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.k {
            let mut line = String::new();
            for j in 0..self.k {
                if j > 0 {
                    line.push(',');
                }
                write!(line, "{:.16e}", self.get(i, j)).unwrap();
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Coordinate triplets `i j value`, zero-based, one nonzero per line.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "% {} {}", self.k, self.k)?;
        for i in 0..self.k {
            for (j, v) in self.row(i) {
                writeln!(w, "{i} {j} {v:.16e}")?;
            }
        }
        Ok(())
    }
}

fn build_storage(k: usize, rows: Vec<Vec<(usize, f64)>>) -> Storage {
    if k >= SPARSE_THRESHOLD {
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in rows {
            for (j, v) in r {
                cols.push(j);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Storage::Sparse {
            row_ptr,
            cols,
            vals,
        }
    } else {
        let mut dense = vec![0.0; k * k];
        for (i, r) in rows.into_iter().enumerate() {
            for (j, v) in r {
                dense[i * k + j] = v;
            }
        }
        Storage::Dense(dense)
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("bin count {k} < 2")));
    }
    Ok(())
}

fn bin_of(y: f64, k: usize) -> usize {
    ((y * k as f64) as usize).min(k - 1)
}

/// Ulam matrix by counting where `q` test points per bin land.
///
/// Test points sit at the midpoints `(l + 1/2)/(kq)` of the `kq` subcells.
pub fn assemble_testpoints(map: &PiecewiseMap, k: usize, q: usize) -> Result<UlamMatrix> {
    check_k(k)?;
    if q == 0 {
        return Err(Error::InvalidParameter("need at least one test point per bin".into()));
    }
    let kq = (k * q) as f64;
    let rows: Vec<Vec<(usize, f64)>> = (0..k)
        .into_par_iter()
        .map(|i| {
            let mut hits: Vec<usize> = (0..q)
                .map(|l| {
                    let x = ((i * q + l) as f64 + 0.5) / kq;
                    bin_of(map.eval(x), k)
                })
                .collect();
            hits.sort_unstable();
            let mut row: Vec<(usize, f64)> = Vec::new();
            for j in hits {
                match row.last_mut() {
                    Some((last, c)) if *last == j => *c += 1.0,
                    _ => row.push((j, 1.0)),
                }
            }
            row.iter_mut().for_each(|e| e.1 /= q as f64);
            row
        })
        .collect();
    let fiber = map.branches()[0].interval().start;
    Ok(UlamMatrix::from_rows(k, rows, Assembly::TestPoint { per_bin: q }, fiber))
}

/// Ulam matrix from exact preimages of every bin.
///
/// Rows are rescaled to sum to 1 afterwards; before rescaling they are within root-finding
/// tolerance of 1.
pub fn assemble_exact(map: &PiecewiseMap, k: usize) -> Result<UlamMatrix> {
    check_k(k)?;
    let kf = k as f64;
    let columns: Vec<Vec<Interval>> = (0..k)
        .into_par_iter()
        .map(|j| map.preimage(Interval::new(j as f64 / kf, (j + 1) as f64 / kf)))
        .collect::<Result<_>>()?;
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k];
    for (j, pieces) in columns.iter().enumerate() {
        for p in pieces {
            let i0 = bin_of(p.start, k);
            let i1 = ((p.end * kf).ceil() as usize).min(k);
            for (i, row) in rows.iter_mut().enumerate().take(i1.max(i0 + 1)).skip(i0) {
                let bin = Interval::new(i as f64 / kf, (i + 1) as f64 / kf);
                let len = p.intersect(&bin).len();
                if len > 0.0 {
                    row.push((j, kf * len));
                }
            }
        }
    }
    for r in rows.iter_mut() {
        r.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(r.len());
        for &(j, v) in r.iter() {
            match merged.last_mut() {
                Some((last, acc)) if *last == j => *acc += v,
                _ => merged.push((j, v)),
            }
        }
        *r = merged;
    }
    let fiber = map.branches()[0].interval().start;
    Ok(UlamMatrix::from_rows(k, rows, Assembly::ExactPreimage, fiber))
}

/// Push a density one step: `v · M`.
pub fn push(v: &BinnedDensity, m: &UlamMatrix) -> Result<BinnedDensity> {
    let out = m.apply(v.values())?;
    Ok(BinnedDensity {
        values: out.into_iter().map(|x| x.max(0.0)).collect(),
    })
}
