//! Grid norms: `L^p`, bounded variation, the Strichartz square function `S_t` and the derived
//! fractional Sobolev norm, the principal-value operator `D_t`, and heat-kernel smoothing `f_ε`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::fourier::{spectral_multiply, FourierDensity};
use crate::maps::{frac, PiecewiseMap};

/// Points of the inner `y ∈ [-1, 1]` average in `S_t`.
pub const ST_INNER_POINTS: usize = 64;
/// Points of the outer log-spaced `r` grid in `S_t`.
pub const ST_RADII: usize = 128;
/// Upper truncation of the outer `r` integral.
pub const ST_R_MAX: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extension {
    /// Periodic on the circle.
    Circle,
    /// Zero outside `[0, 1)`.
    ZeroExtend,
}

/// Samples at the midpoints `(l + 1/2)/n`, read as a step function.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    samples: Vec<f64>,
    extension: Extension,
}

impl GridFunction {
    pub fn new(samples: Vec<f64>, extension: Extension) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid function needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("grid function has non-finite samples".into()));
        }
        Ok(Self { samples, extension })
    }

    pub fn from_fn(n: usize, extension: Extension, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            (0..n).map(|l| f((l as f64 + 0.5) / n as f64)).collect(),
            extension,
        )
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn with_samples(&self, samples: Vec<f64>) -> GridFunction {
        GridFunction {
            samples,
            extension: self.extension,
        }
    }

    /// Value of sample `idx`, which may lie outside `0..n`.
    #[inline]
    fn sample(&self, idx: i64) -> f64 {
        let n = self.samples.len() as i64;
        match self.extension {
            Extension::Circle => self.samples[idx.rem_euclid(n) as usize],
            Extension::ZeroExtend => {
                if (0..n).contains(&idx) {
                    self.samples[idx as usize]
                } else {
                    0.0
                }
            }
        }
    }

    /// Step-function value at an arbitrary real `x`.
    pub fn value_at(&self, x: f64) -> f64 {
        self.sample((x * self.n() as f64).floor() as i64)
    }

    pub fn scaled(&self, a: f64) -> GridFunction {
        self.with_samples(self.samples.iter().map(|v| a * v).collect())
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        if other.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        Ok(self.with_samples(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }
}

/// Smoothness parameters `(p, t, t')` with `0 < t' < t < 1/p < 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SobolevParams {
    pub p: f64,
    pub t: f64,
    pub t_weak: f64,
}

impl Default for SobolevParams {
    fn default() -> Self {
        Self {
            p: 2.0,
            t: 0.4,
            t_weak: 0.2,
        }
    }
}

impl SobolevParams {
    pub fn new(p: f64, t: f64, t_weak: f64) -> Result<Self> {
        let s = Self { p, t, t_weak };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0) {
            return Err(Error::InvalidParameter(format!("p = {} must exceed 1", self.p)));
        }
        if !(self.t > 0.0 && self.t < 1.0 / self.p) {
            return Err(Error::InvalidParameter(format!(
                "t = {} must lie in (0, 1/p)",
                self.t
            )));
        }
        if !(self.t_weak > 0.0 && self.t_weak < self.t) {
            return Err(Error::InvalidParameter(format!(
                "t' = {} must lie in (0, t)",
                self.t_weak
            )));
        }
        Ok(())
    }
}

/// `((1/n) Σ |f|^p)^{1/p}`.
pub fn lp_norm(f: &GridFunction, p: f64) -> f64 {
    lp_norm_slice(f.samples(), p)
}

pub(crate) fn lp_norm_slice(v: &[f64], p: f64) -> f64 {
    let n = v.len() as f64;
    if p == 1.0 {
        return v.iter().map(|x| x.abs()).sum::<f64>() / n;
    }
    if p == 2.0 {
        return (v.iter().map(|x| x * x).sum::<f64>() / n).sqrt();
    }
    (v.iter().map(|x| x.abs().powf(p)).sum::<f64>() / n).powf(1.0 / p)
}

/// Total variation of the step function, including the jumps created by the extension.
pub fn bv_variation(f: &GridFunction) -> f64 {
    let s = f.samples();
    let inner: f64 = s.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    let boundary = match f.extension() {
        Extension::Circle => (s[0] - s[s.len() - 1]).abs(),
        Extension::ZeroExtend => s[0].abs() + s[s.len() - 1].abs(),
    };
    inner + boundary
}

/// `Var(f) + ‖f‖₁`.
pub fn bv_norm(f: &GridFunction) -> f64 {
    bv_variation(f) + lp_norm(f, 1.0)
}

/// Square function `S_t f(x) = (∫ r^{-1-2t} (avg_{|y|≤1} |f(x+ry) − f(x)|)² dr)^{1/2}`.
///
/// The `r` integral is truncated to `[r_min, r_max]`, discretized on `n_r` log-spaced radii with
/// trapezoid weights in `log r`; the `y` average uses the midpoint rule on 64 points.
pub fn strichartz_st(f: &GridFunction, t: f64, r_min: f64, r_max: f64, n_r: usize) -> GridFunction {
    let n = f.n();
    let nf = n as f64;
    let n_r = n_r.max(2);
    let step = (r_max / r_min).ln() / (n_r - 1) as f64;
    // Per radius: weight · r^{-2t} and the cell offsets of x + r y.
    let radii: Vec<(f64, Vec<i64>)> = (0..n_r)
        .map(|a| {
            let r = r_min * (step * a as f64).exp();
            let trap = if a == 0 || a == n_r - 1 { 0.5 } else { 1.0 };
            let weight = trap * step * r.powf(-2.0 * t);
            let offsets = (0..ST_INNER_POINTS)
                .map(|b| {
                    let y = -1.0 + (b as f64 + 0.5) * 2.0 / ST_INNER_POINTS as f64;
                    (0.5 + r * y * nf).floor() as i64
                })
                .collect();
            (weight, offsets)
        })
        .collect();
    let samples: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|l| {
            let fx = f.samples()[l];
            let li = l as i64;
            radii
                .iter()
                .map(|(w, offs)| {
                    let mean = offs
                        .iter()
                        .map(|&o| (f.sample(li + o) - fx).abs())
                        .sum::<f64>()
                        / ST_INNER_POINTS as f64;
                    w * mean * mean
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    f.with_samples(samples)
}

/// `‖f‖_p + ‖S_t f‖_p` with the default truncation `r ∈ [1/(4n), 4]`, 128 radii.
pub fn hpt_norm_at(f: &GridFunction, p: f64, t: f64) -> f64 {
    let r_min = 1.0 / (4.0 * f.n() as f64);
    let s = strichartz_st(f, t, r_min, ST_R_MAX, ST_RADII);
    lp_norm(f, p) + lp_norm(&s, p)
}

/// Strong norm (smoothness `t`).
pub fn hpt_norm(f: &GridFunction, params: &SobolevParams) -> f64 {
    hpt_norm_at(f, params.p, params.t)
}

/// Weak norm (smoothness `t'`).
pub fn weak_norm(f: &GridFunction, params: &SobolevParams) -> f64 {
    hpt_norm_at(f, params.p, params.t_weak)
}

/// Truncated principal value `D_t f(x) = ∫_{|y| ≥ ε} (f(x+y) − f(x)) / |y|^{1+t} dy` on the grid.
///
/// Offsets `y = j/n` with `|y| ≥ eps_min`. For zero extension the sum runs over `|y| ≤ 1` and
/// the remaining tail `−f(x) ∫_{|y|>1} |y|^{-1-t} dy` is added in closed form; on the circle it
/// runs over one period `|y| ≤ 1/2`.
pub fn dt_operator(f: &GridFunction, t: f64, eps_min: f64) -> Result<GridFunction> {
    let n = f.n();
    let nf = n as f64;
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidParameter(format!("t = {t} not in (0, 1)")));
    }
    if !(eps_min > 0.0 && eps_min <= 1.0 / nf + 1e-15) {
        return Err(Error::InvalidParameter(format!("eps_min = {eps_min} not in (0, 1/n]")));
    }
    let j_min = ((eps_min * nf).ceil() as i64).max(1);
    let j_max = match f.extension() {
        Extension::Circle => (n / 2) as i64,
        Extension::ZeroExtend => n as i64,
    };
    let kernel: Vec<f64> = (j_min..=j_max)
        .map(|j| (j as f64 / nf).powf(-1.0 - t) / nf)
        .collect();
    let tail = match f.extension() {
        Extension::Circle => 0.0,
        Extension::ZeroExtend => 2.0 * ((j_max as f64 + 0.5) / nf).powf(-t) / t,
    };
    let samples = (0..n)
        .into_par_iter()
        .map(|l| {
            let li = l as i64;
            let fx = f.samples()[l];
            let mut acc = 0.0;
            for (idx, w) in kernel.iter().enumerate() {
                let j = j_min + idx as i64;
                acc += w * ((f.sample(li + j) - fx) + (f.sample(li - j) - fx));
            }
            acc - fx * tail
        })
        .collect();
    Ok(f.with_samples(samples))
}

/// Multiplier `exp(−ε(1 + (2πj)²))` of the smoothing `f ↦ f_ε`.
pub fn smoothing_multiplier(j: f64, eps: f64) -> f64 {
    (-eps * (1.0 + (2.0 * PI * j).powi(2))).exp()
}

/// `f_ε` of a grid function through the discrete transform of its samples.
pub fn smooth_grid(f: &GridFunction, eps: f64) -> Result<GridFunction> {
    check_eps(eps)?;
    Ok(f.with_samples(spectral_multiply(f.samples(), |j| {
        smoothing_multiplier(j as f64, eps)
    })))
}

/// `f_ε` of a trigonometric polynomial.
pub fn smooth_fourier(f: &FourierDensity, eps: f64) -> Result<FourierDensity> {
    check_eps(eps)?;
    let k = f.k_max() as i64;
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(idx, c)| c * smoothing_multiplier((idx as i64 - k) as f64, eps))
        .collect();
    FourierDensity::from_coeffs(coeffs, f.is_real())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("ε = {eps} must be positive")));
    }
    Ok(())
}

/// Constant `C(ε)` with `‖f_ε‖_{C²} ≤ C(ε) ‖f‖₁`:
/// `e^{−ε} + 2 Σ_{j≥1} e^{−ε(1+(2πj)²)} (2πj)²`, using `|a_j| ≤ ‖f‖₁`.
pub fn c2_bound_constant(eps: f64) -> f64 {
    let mut sum = (-eps).exp();
    let mut j = 1.0;
    loop {
        let w = 2.0 * PI * j;
        let term = 2.0 * smoothing_multiplier(j, eps) * w * w;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        j += 1.0;
    }
    sum
}

/// `r`-th derivative of periodic samples through the discrete transform.
pub fn spectral_derivative(samples: &[f64], order: u32) -> Vec<f64> {
    let n = samples.len();
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (j, z) in buf.iter_mut().enumerate() {
        let freq = if j < n / 2 {
            j as f64
        } else if j == n / 2 && n.is_multiple_of(2) {
            // Nyquist mode: keep even derivatives real, drop odd ones.
            if order % 2 == 1 {
                *z = Complex64::new(0.0, 0.0);
                continue;
            }
            j as f64
        } else {
            j as f64 - n as f64
        };
        *z *= Complex64::new(0.0, 2.0 * PI * freq).powu(order);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.into_iter().map(|z| z.re / n as f64).collect()
}

/// `max(sup|f|, sup|f'|, sup|f''|)` on the grid, derivatives taken spectrally.
pub fn c2_norm(f: &GridFunction) -> f64 {
    let sup = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let d1 = spectral_derivative(f.samples(), 1);
    let d2 = spectral_derivative(f.samples(), 2);
    sup(f.samples()).max(sup(&d1)).max(sup(&d2))
}

/// Fitted constants of `‖ℒf‖_BV ≤ α ‖f‖_BV + B ‖f‖₁`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LasotaYorkeFit {
    pub alpha: f64,
    pub b: f64,
}

/// One test function's `(‖f‖_BV, ‖f‖₁, ‖ℒf‖_BV)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LasotaYorkeSample {
    pub bv: f64,
    pub l1: f64,
    pub bv_image: f64,
}

impl LasotaYorkeFit {
    pub fn holds(&self, s: &LasotaYorkeSample) -> bool {
        s.bv_image <= (self.alpha * s.bv + self.b * s.l1) * (1.0 + 1e-12)
    }
}

/// `(‖f‖_BV, ‖f‖₁, ‖ℒf‖_BV)` of `f` and its transfer-operator image under `map`, both sampled
/// on `n` midpoints of the circle.
pub fn lasota_yorke_sample(
    map: &PiecewiseMap,
    f: impl Fn(f64) -> f64 + Sync,
    n: usize,
) -> Result<LasotaYorkeSample> {
    let g = GridFunction::from_fn(n, Extension::Circle, &f)?;
    let image = GridFunction::new(map.transfer_samples(|x| f(frac(x)), n)?, Extension::Circle)?;
    Ok(LasotaYorkeSample {
        bv: bv_norm(&g),
        l1: lp_norm(&g, 1.0),
        bv_image: bv_norm(&image),
    })
}

/// Least-constraining `(α, B) ≥ 0` valid for every sample: minimizes the average bound
/// `α·mean(‖f‖_BV/‖f‖₁) + B` subject to all inequalities. The optimum is a vertex of the
/// feasible set, so candidate lines through pairs of samples and the two axis cases are scanned.
pub fn fit_lasota_yorke(samples: &[LasotaYorkeSample]) -> Result<LasotaYorkeFit> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples to fit".into()));
    }
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|s| (s.bv / s.l1, s.bv_image / s.l1))
        .collect();
    let x_mean = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let feasible = |a: f64, b: f64| {
        a >= 0.0 && b >= 0.0 && pts.iter().all(|&(x, y)| y <= (a * x + b) * (1.0 + 1e-12))
    };
    let mut candidates = vec![
        (0.0, pts.iter().map(|p| p.1).fold(0.0, f64::max)),
        (pts.iter().map(|p| p.1 / p.0).fold(0.0, f64::max), 0.0),
    ];
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (xi, yi) = pts[i];
            let (xj, yj) = pts[j];
            if (xj - xi).abs() > 1e-14 {
                let a = (yj - yi) / (xj - xi);
                candidates.push((a, yi - a * xi));
            }
        }
    }
    candidates
        .into_iter()
        .filter(|&(a, b)| feasible(a, b))
        .min_by(|l, r| (l.0 * x_mean + l.1).total_cmp(&(r.0 * x_mean + r.1)))
        .map(|(alpha, b)| LasotaYorkeFit { alpha, b })
        .ok_or_else(|| Error::InvalidParameter("no feasible Lasota–Yorke constants".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(n: usize, ext: Extension) -> GridFunction {
        GridFunction::from_fn(n, ext, |x| if x < 0.5 { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn lp_examples() {
        let one = GridFunction::new(vec![1.0; 10], Extension::Circle).unwrap();
        for p in [1.0, 1.5, 2.0, 7.0] {
            assert!((lp_norm(&one, p) - 1.0).abs() < 1e-15);
        }
        let m2 = GridFunction::new(vec![-2.0; 10], Extension::Circle).unwrap();
        assert!((lp_norm(&m2, 2.0) - 2.0).abs() < 1e-15);
        let x = GridFunction::from_fn(1_000_000, Extension::ZeroExtend, |x| x).unwrap();
        assert!((lp_norm(&x, 1.0) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn bv_examples() {
        let c = GridFunction::new(vec![3.0; 100], Extension::Circle).unwrap();
        assert_eq!(bv_variation(&c), 0.0);
        assert_eq!(bv_variation(&step(1000, Extension::Circle)), 2.0);
        let s = GridFunction::from_fn(100_000, Extension::Circle, |x| (2.0 * PI * x).sin()).unwrap();
        assert!((bv_variation(&s) - 4.0).abs() < 1e-3);
    }

    #[test]
    fn st_of_constants() {
        let z = GridFunction::new(vec![0.0; 256], Extension::ZeroExtend).unwrap();
        let s = strichartz_st(&z, 0.4, 1.0 / 1024.0, 4.0, 128);
        assert!(s.samples().iter().all(|&v| v == 0.0));
        let c = GridFunction::new(vec![2.5; 256], Extension::Circle).unwrap();
        let s = strichartz_st(&c, 0.4, 1.0 / 1024.0, 4.0, 128);
        assert!(s.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hpt_norm_of_step_self_converges() {
        let params = SobolevParams::default();
        let a = hpt_norm(&step(1 << 12, Extension::ZeroExtend), &params);
        let b = hpt_norm(&step(1 << 13, Extension::ZeroExtend), &params);
        assert!(a.is_finite() && b.is_finite());
        assert!((a - b).abs() / b < 0.05, "{a} vs {b}");
    }

    #[test]
    fn hpt_norm_homogeneous_and_dominates_lp() {
        let params = SobolevParams::default();
        let f = GridFunction::from_fn(512, Extension::ZeroExtend, |x| (7.0 * x).sin() + x * x).unwrap();
        let a = hpt_norm(&f, &params);
        let b = hpt_norm(&f.scaled(2.0), &params);
        assert!((b - 2.0 * a).abs() < 1e-10 * b);
        assert!(a >= lp_norm(&f, params.p));
        let z = GridFunction::new(vec![0.0; 64], Extension::ZeroExtend).unwrap();
        assert_eq!(hpt_norm(&z, &params), 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(SobolevParams::new(2.0, 0.4, 0.2).is_ok());
        assert!(SobolevParams::new(2.0, 0.6, 0.2).is_err());
        assert!(SobolevParams::new(2.0, 0.4, 0.5).is_err());
        assert!(SobolevParams::new(1.0, 0.4, 0.2).is_err());
    }

    #[test]
    fn dt_zero_and_linear() {
        let n = 512;
        let z = GridFunction::new(vec![0.0; n], Extension::ZeroExtend).unwrap();
        let d = dt_operator(&z, 0.4, 1.0 / n as f64).unwrap();
        assert!(d.samples().iter().all(|&v| v == 0.0));

        let f = GridFunction::from_fn(n, Extension::ZeroExtend, |x| (3.0 * x).cos()).unwrap();
        let g = GridFunction::from_fn(n, Extension::ZeroExtend, |x| x * x - 0.2).unwrap();
        let (a, b) = (1.7, -0.6);
        let combo = f.with_samples(
            f.samples().iter().zip(g.samples()).map(|(x, y)| a * x + b * y).collect(),
        );
        let lhs = dt_operator(&combo, 0.3, 1.0 / n as f64).unwrap();
        let df = dt_operator(&f, 0.3, 1.0 / n as f64).unwrap();
        let dg = dt_operator(&g, 0.3, 1.0 / n as f64).unwrap();
        for l in 0..n {
            let rhs = a * df.samples()[l] + b * dg.samples()[l];
            assert!((lhs.samples()[l] - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn dt_symmetric_cancellation() {
        let n = 1024;
        let t = 0.4;
        let l0 = 300;
        let x0 = (l0 as f64 + 0.5) / n as f64;
        let f = GridFunction::from_fn(n, Extension::Circle, |x| (2.0 * PI * (x - x0)).sin()).unwrap();
        let d = dt_operator(&f, t, 1.0 / n as f64).unwrap();
        let one_sided: f64 = (1..=n / 2)
            .map(|j| (f.sample(l0 as i64 + j as i64) - f.samples()[l0]) * (j as f64 / n as f64).powf(-1.0 - t) / n as f64)
            .sum();
        let sup = 1.0;
        assert!(d.samples()[l0].abs() <= 0.1 * sup * (n as f64).powf(t));
        assert!(d.samples()[l0].abs() < 1e-9 * one_sided.abs());
    }

    #[test]
    fn smoothing_constant_and_convergence() {
        let one = GridFunction::new(vec![1.0; 64], Extension::Circle).unwrap();
        let s = smooth_grid(&one, 0.1).unwrap();
        assert!(s.samples().iter().all(|&v| (v - (-0.1f64).exp()).abs() < 1e-14));
        assert!((s.samples()[0] - 0.904837).abs() < 1e-6);

        let f = GridFunction::from_fn(256, Extension::Circle, |x| 1.0 + (2.0 * PI * x).cos() + 0.3 * (6.0 * PI * x).sin()).unwrap();
        let mut last = f64::INFINITY;
        for eps in [1e-1, 1e-2, 1e-3, 1e-4, 1e-5] {
            let d = lp_norm(&smooth_grid(&f, eps).unwrap().sub(&f).unwrap(), 1.0);
            assert!(d < last);
            last = d;
        }
        assert!(last < 1e-3);
        assert!(smooth_grid(&f, 0.0).is_err());
    }

    #[test]
    fn smoothing_c2_bound() {
        let f = step(4096, Extension::Circle);
        let l1 = lp_norm(&f, 1.0);
        for eps in [0.1, 0.01] {
            let fe = smooth_grid(&f, eps).unwrap();
            let lhs = c2_norm(&fe);
            let rhs = c2_bound_constant(eps) * l1;
            assert!(lhs <= rhs, "ε={eps}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn smoothing_fourier_matches_grid() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let f = FourierDensity::new(vec![c(0.2, -0.1), c(0.5, 0.0), c(1.0, 0.0), c(0.5, 0.0), c(0.2, 0.1)], true).unwrap();
        let fe = smooth_fourier(&f, 0.01).unwrap();
        let (v, _) = crate::fourier::evaluate_density(&fe, 64);
        let (raw, _) = crate::fourier::evaluate_density(&f, 64);
        let g = smooth_grid(&GridFunction::new(raw, Extension::Circle).unwrap(), 0.01).unwrap();
        for (a, b) in v.iter().zip(g.samples()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn lasota_yorke_fit_is_feasible_vertex() {
        let samples: Vec<LasotaYorkeSample> = [(2.0, 1.0, 3.0), (10.0, 1.0, 5.0), (40.0, 1.0, 14.0), (5.0, 0.5, 2.5)]
            .iter()
            .map(|&(bv, l1, bv_image)| LasotaYorkeSample { bv, l1, bv_image })
            .collect();
        let fit = fit_lasota_yorke(&samples).unwrap();
        assert!(samples.iter().all(|s| fit.holds(s)));
        assert!(fit.alpha < 1.0);
    }
}
