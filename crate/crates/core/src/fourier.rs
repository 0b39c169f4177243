//! Fourier–Galerkin discretization of fiber operators, Cesàro weighting and Fejér smoothing.
//!
//! Coefficient vectors are indexed by mode `m ∈ [-K, K]` at position `m + K`. Galerkin matrices
//! act on *column* vectors: the coefficients of `ℒf` are `A · c`, with
//! `A[m][m'] = ⟨φ_m, ℒφ_{m'}⟩ = ∫ exp(−2πi m T(x)) exp(2πi m' x) dx`, computed through the
//! duality `⟨φ_m, ℒφ_{m'}⟩ = ⟨φ_m ∘ T, φ_{m'}⟩` so no inverse branches are needed.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::maps::{Branch, PiecewiseMap};
use crate::quadrature::GaussLegendre;

/// Absolute quadrature tolerance used when none is configured.
pub const DEFAULT_QUAD_TOL: f64 = 1e-9;
/// Mode budget used when none is configured.
pub const DEFAULT_MODES: usize = 100;
/// Panel budget per branch for the adaptive rule.
pub const MAX_PANELS: usize = 1 << 16;
const PANEL_ORDER: usize = 20;

const TWO_PI: f64 = 2.0 * PI;

#[inline]
fn cis(theta: f64) -> Complex64 {
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}

/// Real density given by its Fourier coefficients `c_m`, `|m| ≤ K`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierDensity {
    k_max: usize,
    coeffs: Vec<Complex64>,
    real: bool,
}

impl FourierDensity {
    /// Validated constructor: `c_0 = 1` and, if `real`, Hermitian symmetry.
    pub fn new(coeffs: Vec<Complex64>, real: bool) -> Result<Self> {
        let f = Self::from_coeffs(coeffs, real)?;
        let c0 = f.coeff(0);
        if (c0.re - 1.0).abs() > 1e-8 || c0.im.abs() > 1e-8 {
            return Err(Error::InvalidDensity(format!("c_0 = {c0} instead of 1")));
        }
        if real {
            let asym = f.hermitian_defect();
            if asym > 1e-12 {
                return Err(Error::InvalidDensity(format!(
                    "Hermitian symmetry violated by {asym:e}"
                )));
            }
        }
        Ok(f)
    }

    /// Any coefficient vector of odd length (no mass normalization).
    pub fn from_coeffs(coeffs: Vec<Complex64>, real: bool) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: coeffs.len() + 1,
                found: coeffs.len(),
            });
        }
        Ok(Self {
            k_max: coeffs.len() / 2,
            coeffs,
            real,
        })
    }

    pub fn lebesgue(k_max: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * k_max + 1];
        coeffs[k_max] = Complex64::new(1.0, 0.0);
        Self {
            k_max,
            coeffs,
            real: true,
        }
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn coeff(&self, m: i64) -> Complex64 {
        if m.unsigned_abs() as usize > self.k_max {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[(m + self.k_max as i64) as usize]
    }

    pub fn integral(&self) -> f64 {
        self.coeff(0).re
    }

    pub fn hermitian_defect(&self) -> f64 {
        (1..=self.k_max as i64)
            .map(|m| (self.coeff(m) - self.coeff(-m).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// `Σ c_m e^{2πimx}` at `x = (l + 1/2)/n`.
    pub fn evaluate_complex(&self, n: usize) -> Vec<Complex64> {
        // Fold modes mod n (exact for the sampled exponentials), then one inverse FFT.
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (idx, c) in self.coeffs.iter().enumerate() {
            let m = idx as i64 - self.k_max as i64;
            let slot = m.rem_euclid(n as i64) as usize;
            buf[slot] += c * cis(PI * m as f64 / n as f64);
        }
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        buf
    }

    /// Exact averages of the density over `k` equal bins.
    pub fn bin_averages(&self, k: usize) -> Vec<f64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); k];
        for (idx, c) in self.coeffs.iter().enumerate() {
            let m = idx as i64 - self.k_max as i64;
            let s = if m == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                let theta = TWO_PI * m as f64 / k as f64;
                (cis(theta) - 1.0) / Complex64::new(0.0, theta)
            };
            buf[m.rem_euclid(k as i64) as usize] += c * s;
        }
        FftPlanner::new().plan_fft_inverse(k).process(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// CSV with header `m,real,imag`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "m,real,imag")?;
        for (idx, c) in self.coeffs.iter().enumerate() {
            let m = idx as i64 - self.k_max as i64;
            writeln!(w, "{m},{:.16e},{:.16e}", c.re, c.im)?;
        }
        Ok(())
    }
}

/// Samples of `f` at the midpoints `(l + 1/2)/n`, with the largest imaginary residue.
pub fn evaluate_density(f: &FourierDensity, n: usize) -> (Vec<f64>, f64) {
    let z = f.evaluate_complex(n);
    let imag = z.iter().fold(0.0_f64, |m, v| m.max(v.im.abs()));
    (z.into_iter().map(|v| v.re).collect(), imag)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weighting {
    None,
    Cesaro,
    FejerOutput,
}

/// `(2K+1) × (2K+1)` Galerkin matrix of one fiber operator.
#[derive(Clone, Debug, PartialEq)]
pub struct GalerkinMatrix {
    k_max: usize,
    entries: Vec<Complex64>,
    weighting: Weighting,
    panels: usize,
}

impl GalerkinMatrix {
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn dim(&self) -> usize {
        2 * self.k_max + 1
    }

    pub fn weighting(&self) -> Weighting {
        self.weighting
    }

    /// Number of quadrature panels used in assembly.
    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn get(&self, m: i64, mp: i64) -> Complex64 {
        let k = self.k_max as i64;
        self.entries[((m + k) as usize) * self.dim() + (mp + k) as usize]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// `A · c`.
    pub fn apply(&self, c: &[Complex64]) -> Result<Vec<Complex64>> {
        let d = self.dim();
        if c.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: c.len(),
            });
        }
        Ok(self
            .entries
            .chunks_exact(d)
            .map(|row| row.iter().zip(c).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `self` followed by `next`, i.e. `next · self`.
    pub fn then(&self, next: &GalerkinMatrix) -> Result<GalerkinMatrix> {
        let d = self.dim();
        if next.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: next.dim(),
            });
        }
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        entries.par_chunks_mut(d).enumerate().for_each(|(i, row)| {
            for l in 0..d {
                let a = next.entries[i * d + l];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (r, b) in row.iter_mut().zip(&self.entries[l * d..(l + 1) * d]) {
                    *r += a * b;
                }
            }
        });
        Ok(GalerkinMatrix {
            k_max: self.k_max,
            entries,
            weighting: self.weighting,
            panels: 0,
        })
    }

    /// `P_j A P_j`: zero every entry with `max(|m|, |m'|) > j`.
    pub fn truncated(&self, j: usize) -> GalerkinMatrix {
        self.map_entries(|m, mp| if m.unsigned_abs().max(mp.unsigned_abs()) as usize <= j { 1.0 } else { 0.0 })
    }

    fn map_entries(&self, w: impl Fn(i64, i64) -> f64) -> GalerkinMatrix {
        let k = self.k_max as i64;
        let d = self.dim();
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(idx, a)| {
                let m = (idx / d) as i64 - k;
                let mp = (idx % d) as i64 - k;
                a * w(m, mp)
            })
            .collect();
        GalerkinMatrix {
            k_max: self.k_max,
            entries,
            weighting: self.weighting,
            panels: self.panels,
        }
    }

    /// Rows of interleaved `re,im` pairs.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let d = self.dim();
        for row in self.entries.chunks_exact(d) {
            let line: Vec<String> = row
                .iter()
                .map(|z| format!("{:.16e},{:.16e}", z.re, z.im))
                .collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

struct Panel {
    a: f64,
    b: f64,
}

/// Integrals over `[a, b]` of the probe integrands `exp(−2πi m T(x) + 2πi m' x)`.
fn probe(branch: &Branch, rule: &GaussLegendre, probes: &[(f64, f64)], a: f64, b: f64) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(0.0, 0.0); probes.len()];
    for (x, w) in rule.on(a, b) {
        let t = branch.value(x);
        for (s, &(m, mp)) in acc.iter_mut().zip(probes) {
            *s += w * cis(TWO_PI * (mp * x - m * t));
        }
    }
    acc
}

/// Adaptive panels for one branch: a panel is accepted once the rule on the whole panel and the
/// rule on its two halves agree on every probe integrand within `tol · panel length`.
fn branch_panels(branch: &Branch, k_max: usize, tol: f64, rule: &GaussLegendre) -> Result<Vec<Panel>> {
    let iv = branch.interval();
    let k = k_max as f64;
    let probes: Vec<(f64, f64)> = {
        let ms = [1.0, (k / 2.0).ceil(), k];
        let mut p = vec![(0.0, k)];
        for &m in &ms {
            for &mp in &[-k, 0.0, k] {
                p.push((m, mp));
            }
        }
        p
    };
    let slope = (0..=64)
        .map(|s| branch.derivative(iv.start + iv.len() * s as f64 / 64.0).abs())
        .fold(0.0, f64::max);
    // Start with panels spanning about two periods of the fastest probe.
    let cycles = iv.len() * (k * slope + k);
    let n0 = ((cycles / 2.0).ceil() as usize).max(1);
    let h = iv.len() / n0 as f64;
    let mut stack: Vec<Panel> = (0..n0)
        .rev()
        .map(|i| Panel {
            a: iv.start + i as f64 * h,
            b: if i + 1 == n0 { iv.end } else { iv.start + (i + 1) as f64 * h },
        })
        .collect();
    let mut accepted = Vec::new();
    while let Some(p) = stack.pop() {
        if accepted.len() + stack.len() >= MAX_PANELS {
            return Err(Error::QuadratureFailure { panels: MAX_PANELS });
        }
        let mid = 0.5 * (p.a + p.b);
        let whole = probe(branch, rule, &probes, p.a, p.b);
        let left = probe(branch, rule, &probes, p.a, mid);
        let right = probe(branch, rule, &probes, mid, p.b);
        let err = whole
            .iter()
            .zip(left.iter().zip(&right))
            .map(|(w, (l, r))| (w - l - r).norm())
            .fold(0.0, f64::max);
        if err <= tol * (p.b - p.a) || mid <= p.a || mid >= p.b {
            accepted.push(Panel { a: p.a, b: mid });
            accepted.push(Panel { a: mid, b: p.b });
        } else {
            stack.push(Panel { a: mid, b: p.b });
            stack.push(Panel { a: p.a, b: mid });
        }
    }
    Ok(accepted)
}

/// Galerkin matrix `A[m][m'] = ∫ exp(−2πi m T(x)) exp(2πi m' x) dx`, `|m|, |m'| ≤ K`.
///
/// The integral is split at the branch breakpoints and each branch is covered by adaptive
/// Gauss–Legendre panels to absolute tolerance `tol`.
pub fn galerkin_matrix(map: &PiecewiseMap, k_max: usize, tol: f64) -> Result<GalerkinMatrix> {
    if k_max < 1 {
        return Err(Error::InvalidParameter("mode count K must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("quadrature tolerance {tol} must be positive")));
    }
    let rule = GaussLegendre::new(PANEL_ORDER);
    let mut xs = Vec::new();
    let mut ts = Vec::new();
    let mut ws = Vec::new();
    let mut panels = 0;
    for branch in map.branches() {
        let ps = branch_panels(branch, k_max, tol, &rule)?;
        panels += ps.len();
        for p in ps {
            for (x, w) in rule.on(p.a, p.b) {
                xs.push(x);
                ts.push(branch.value(x));
                ws.push(w);
            }
        }
    }
    let d = 2 * k_max + 1;
    let k = k_max as i64;
    // Weighted test exponentials w_q e^{2πi m' x_q}, one row per m'.
    let cols: Vec<Vec<Complex64>> = (0..d)
        .into_par_iter()
        .map(|c| {
            let mp = (c as i64 - k) as f64;
            xs.iter()
                .zip(&ws)
                .map(|(&x, &w)| w * cis(TWO_PI * mp * x))
                .collect()
        })
        .collect();
    let rows: Vec<Vec<Complex64>> = (0..d)
        .into_par_iter()
        .map(|r| {
            let m = (r as i64 - k) as f64;
            let e: Vec<Complex64> = ts.iter().map(|&t| cis(-TWO_PI * m * t)).collect();
            cols.iter()
                .map(|col| e.iter().zip(col).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    Ok(GalerkinMatrix {
        k_max,
        entries: rows.into_iter().flatten().collect(),
        weighting: Weighting::None,
        panels,
    })
}

/// Cesàro average `(1/K) Σ_{j<K} P_j A P_j` as entrywise weights `max(0, 1 − max(|m|,|m'|)/K)`.
pub fn cesaro_weighting(a: &GalerkinMatrix) -> Result<GalerkinMatrix> {
    if a.weighting != Weighting::None {
        return Err(Error::AlreadyWeighted);
    }
    let k = a.k_max as f64;
    let mut out = a.map_entries(|m, mp| (1.0 - m.unsigned_abs().max(mp.unsigned_abs()) as f64 / k).max(0.0));
    out.weighting = Weighting::Cesaro;
    Ok(out)
}

/// Fejér smoothing of the output only: row `m` scaled by `max(0, 1 − |m|/K)`.
pub fn fejer_output_weighting(a: &GalerkinMatrix) -> Result<GalerkinMatrix> {
    if a.weighting != Weighting::None {
        return Err(Error::AlreadyWeighted);
    }
    let kernel = Kernel::fejer(a.k_max);
    let mut out = a.map_entries(|m, _| kernel.multiplier(m));
    out.weighting = Weighting::FejerOutput;
    Ok(out)
}

/// A convolution kernel on the circle given by its Fourier multiplier `ŵ(m)`, `|m| ≤ K`, and a
/// constant multiplier beyond `K` (zero except for the Dirac kernel).
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    k_max: usize,
    weights: Vec<f64>,
    tail: f64,
}

impl Kernel {
    /// Multipliers for `m = −K..=K`; `ŵ(0)` must be 1.
    pub fn from_multipliers(weights: Vec<f64>) -> Result<Self> {
        if weights.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter("multiplier table must have odd length".into()));
        }
        let k_max = weights.len() / 2;
        if (weights[k_max] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "kernel multiplier at 0 is {} instead of 1",
                weights[k_max]
            )));
        }
        Ok(Self {
            k_max,
            weights,
            tail: 0.0,
        })
    }

    /// Fejér kernel `Q_K(x) = sin²(πKx) / (K sin²(πx))`: `ŵ(m) = max(0, 1 − |m|/K)`.
    pub fn fejer(k: usize) -> Self {
        let k = k.max(1);
        let weights = (-(k as i64)..=k as i64)
            .map(|m| (1.0 - m.unsigned_abs() as f64 / k as f64).max(0.0))
            .collect();
        Self {
            k_max: k,
            weights,
            tail: 0.0,
        }
    }

    /// Identity (Dirac) kernel: `ŵ ≡ 1` at every mode; `K` only sets the stored table size.
    pub fn dirac(k: usize) -> Self {
        Self {
            k_max: k,
            weights: vec![1.0; 2 * k + 1],
            tail: 1.0,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.tail == 1.0 && self.weights.iter().all(|&w| w == 1.0)
    }

    /// Uniform noise on `[−ε, ε]`: `ŵ(m) = sin(2πmε)/(2πmε)`.
    pub fn uniform(eps: f64, k: usize) -> Self {
        let weights = (-(k as i64)..=k as i64)
            .map(|m| {
                if m == 0 {
                    1.0
                } else {
                    let th = TWO_PI * m as f64 * eps;
                    th.sin() / th
                }
            })
            .collect();
        Self {
            k_max: k,
            weights,
            tail: 0.0,
        }
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn multiplier(&self, m: i64) -> f64 {
        if m.unsigned_abs() as usize > self.k_max {
            self.tail
        } else {
            self.weights[(m + self.k_max as i64) as usize]
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// `c_m ↦ ŵ(m) c_m`.
pub fn convolve(kernel: &Kernel, f: &FourierDensity) -> FourierDensity {
    let k = f.k_max as i64;
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(idx, c)| c * kernel.multiplier(idx as i64 - k))
        .collect();
    FourierDensity {
        k_max: f.k_max,
        coeffs,
        real: f.real,
    }
}

/// Apply a real even multiplier `w(|j|)` to periodic samples through the discrete transform.
pub fn spectral_multiply(samples: &[f64], w: impl Fn(usize) -> f64) -> Vec<f64> {
    let n = samples.len();
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (j, z) in buf.iter_mut().enumerate() {
        let freq = if j <= n / 2 { j } else { n - j };
        *z *= w(freq);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.into_iter().map(|z| z.re / n as f64).collect()
}

/// Circular convolution of periodic samples (e.g. Ulam bin values) with a kernel, applied as the
/// discrete multiplier. For the Fejér kernel with `K ≤ n/2` the discrete kernel is the sampled
/// Fejér kernel, which is nonnegative, so positivity is preserved.
pub fn convolve_samples(kernel: &Kernel, samples: &[f64]) -> Vec<f64> {
    if kernel.is_identity() {
        return samples.to_vec();
    }
    spectral_multiply(samples, |j| kernel.multiplier(j as i64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!((a - b).norm() <= tol, "{a} vs {b}");
    }

    #[test]
    fn identity_matrix() {
        let a = galerkin_matrix(&PiecewiseMap::identity(), 3, 1e-10).unwrap();
        for m in -3..=3_i64 {
            for mp in -3..=3_i64 {
                let e = if m == mp { 1.0 } else { 0.0 };
                assert_close(a.get(m, mp), c(e, 0.0), 1e-10);
            }
        }
    }

    #[test]
    fn doubling_matrix() {
        let a = galerkin_matrix(&PiecewiseMap::doubling(), 2, 1e-10).unwrap();
        for m in -2..=2_i64 {
            for mp in -2..=2_i64 {
                let e = if mp == 2 * m { 1.0 } else { 0.0 };
                assert_close(a.get(m, mp), c(e, 0.0), 1e-10);
            }
        }
    }

    #[test]
    fn rotation_matrix() {
        let beta = 0.3;
        let a = galerkin_matrix(&PiecewiseMap::rotation(beta), 1, 1e-10).unwrap();
        for m in -1..=1_i64 {
            for mp in -1..=1_i64 {
                let e = if m == mp { cis(-TWO_PI * m as f64 * beta) } else { c(0.0, 0.0) };
                assert_close(a.get(m, mp), e, 1e-10);
            }
        }
    }

    #[test]
    fn example_matrix_conserves_mass() {
        let a = galerkin_matrix(&PiecewiseMap::example_family(0.37), 12, 1e-9).unwrap();
        for mp in -12..=12_i64 {
            let e = if mp == 0 { 1.0 } else { 0.0 };
            assert_close(a.get(0, mp), c(e, 0.0), 1e-8);
        }
    }

    #[test]
    fn example_matrix_matches_brute_force_quadrature() {
        // Independent route: composite midpoint rule on a fine grid, split at breakpoints.
        let t = PiecewiseMap::example_family(0.21);
        let a = galerkin_matrix(&t, 4, 1e-10).unwrap();
        let n = 400_000;
        for &(m, mp) in &[(1_i64, 2_i64), (4, -3), (-2, 0), (3, 3)] {
            let mut acc = c(0.0, 0.0);
            for b in t.branches() {
                let iv = b.interval();
                let h = iv.len() / n as f64;
                for l in 0..n {
                    let x = iv.start + (l as f64 + 0.5) * h;
                    acc += h * cis(TWO_PI * (mp as f64 * x - m as f64 * b.value(x)));
                }
            }
            assert_close(a.get(m, mp), acc, 1e-7);
        }
    }

    #[test]
    fn cesaro_weights() {
        let a = galerkin_matrix(&PiecewiseMap::example_family(0.0), 1, 1e-9).unwrap();
        let w = cesaro_weighting(&a).unwrap();
        assert_eq!(w.get(0, 0), a.get(0, 0));
        assert_eq!(w.get(1, 0), c(0.0, 0.0));
        assert_eq!(w.get(-1, 1), c(0.0, 0.0));
        assert!(matches!(cesaro_weighting(&w), Err(Error::AlreadyWeighted)));

        let a2 = galerkin_matrix(&PiecewiseMap::example_family(0.0), 2, 1e-9).unwrap();
        let w2 = cesaro_weighting(&a2).unwrap();
        assert_close(w2.get(1, 1), a2.get(1, 1) * 0.5, 1e-15);
        assert_eq!(w2.get(0, 2), c(0.0, 0.0));
    }

    #[test]
    fn cesaro_equals_explicit_average() {
        let maps = [
            PiecewiseMap::doubling(),
            PiecewiseMap::example_family(0.4),
            PiecewiseMap::rotation(0.123),
        ];
        for map in &maps {
            for k in 1..=5usize {
                let a = galerkin_matrix(map, k, 1e-9).unwrap();
                let w = cesaro_weighting(&a).unwrap();
                let d = a.dim();
                let mut avg = vec![c(0.0, 0.0); d * d];
                for j in 0..k {
                    for (s, e) in avg.iter_mut().zip(a.truncated(j).entries()) {
                        *s += e / k as f64;
                    }
                }
                for (x, y) in avg.iter().zip(w.entries()) {
                    assert!((x - y).norm() <= 1e-14);
                }
            }
        }
    }

    #[test]
    fn fejer_multiplier_matches_kernel_integral() {
        // Fourier coefficients of Q_2(x) = sin²(2πx) / (2 sin²(πx)) by quadrature.
        let k = Kernel::fejer(2);
        let expected = [0.0, 0.5, 1.0, 0.5, 0.0];
        assert_eq!(k.weights(), &expected);
        let n = 20_000;
        for m in -2..=2_i64 {
            let mut acc = 0.0;
            for l in 0..n {
                let x = (l as f64 + 0.5) / n as f64;
                let q = (TWO_PI * x).sin().powi(2) / (2.0 * (PI * x).sin().powi(2));
                acc += q * (TWO_PI * m as f64 * x).cos() / n as f64;
            }
            assert!((acc - k.multiplier(m)).abs() < 1e-9, "m={m}: {acc}");
        }
        for order in [1, 3, 17, 100] {
            assert_eq!(Kernel::fejer(order).multiplier(0), 1.0);
        }
        let k1 = Kernel::fejer(1);
        assert_eq!(k1.weights(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn convolution_examples() {
        let f = FourierDensity::new(vec![c(0.5, 0.0), c(1.0, 0.0), c(0.5, 0.0)], true).unwrap();
        assert_eq!(convolve(&Kernel::dirac(1), &f), f);
        let g = convolve(&Kernel::fejer(2), &f);
        assert_eq!(g.coeff(1), c(0.25, 0.0));
        assert_eq!(g.coeff(-1), c(0.25, 0.0));
        let leb = FourierDensity::lebesgue(3);
        assert_eq!(convolve(&Kernel::fejer(2), &leb), leb);
    }

    #[test]
    fn evaluate_examples() {
        let (v, _) = evaluate_density(&FourierDensity::lebesgue(4), 8);
        assert!(v.iter().all(|x| (x - 1.0).abs() < 1e-14));
        let f = FourierDensity::new(vec![c(0.5, 0.0), c(1.0, 0.0), c(0.5, 0.0)], true).unwrap();
        let (v, imag) = evaluate_density(&f, 4);
        let expect = [1.7071067811865475, 0.2928932188134524, 0.2928932188134524, 1.7071067811865475];
        for (a, b) in v.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(imag < 1e-10);
        // Fewer samples than modes still evaluates correctly.
        let (v, _) = evaluate_density(&f, 2);
        assert!((v[0] - (1.0 + (PI / 2.0).cos())).abs() < 1e-12);
    }

    #[test]
    fn bin_averages_exact() {
        let f = FourierDensity::new(vec![c(0.5, 0.0), c(1.0, 0.0), c(0.5, 0.0)], true).unwrap();
        // average of 1 + cos(2πx) over [0, 1/2) is 1.
        let b = f.bin_averages(2);
        assert!((b[0] - 1.0).abs() < 1e-14 && (b[1] - 1.0).abs() < 1e-14);
        let b = f.bin_averages(4);
        let first = 1.0 + (TWO_PI * 0.25).sin() / (TWO_PI * 0.25);
        assert!((b[0] - first).abs() < 1e-14);
    }

    #[test]
    fn validated_density() {
        assert!(FourierDensity::new(vec![c(0.5, 0.0), c(0.9, 0.0), c(0.5, 0.0)], true).is_err());
        assert!(FourierDensity::new(vec![c(0.5, 0.1), c(1.0, 0.0), c(0.5, 0.1)], true).is_err());
        assert!(FourierDensity::new(vec![c(1.0, 0.0), c(0.0, 0.0)], true).is_err());
    }

    #[test]
    fn fejer_keeps_samples_positive() {
        let samples: Vec<f64> = (0..1000).map(|i| if i % 97 < 3 { 50.0 } else { 0.0 }).collect();
        for k in [4, 16, 64, 500] {
            let out = convolve_samples(&Kernel::fejer(k), &samples);
            assert!(out.iter().all(|&v| v >= -1e-10), "K={k}");
            let mass: f64 = out.iter().sum::<f64>() - samples.iter().sum::<f64>();
            assert!(mass.abs() < 1e-9);
        }
    }
}
