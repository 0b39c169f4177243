//! Cocycles of fiber operators along base orbits: pushforward of Lebesgue measure, Lyapunov
//! exponent estimates, density comparison and the stability studies.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::driving::{Base, BaseDynamics};
use crate::error::{Error, Result};
use crate::fourier::{
    cesaro_weighting, convolve_samples, evaluate_density, galerkin_matrix, FourierDensity,
    GalerkinMatrix, Kernel,
};
use crate::maps::{d_ly, MapFamily};
use crate::sobolev::{hpt_norm_at, lp_norm_slice, Extension, GridFunction, SobolevParams};
use crate::ulam::{
    assemble_exact, assemble_testpoints, conditional_expectation, l1_norm, push, BinnedDensity,
    UlamMatrix, MASS_TOL,
};

/// Sample count used to measure Fourier densities in `L¹` and to write them out.
pub const FOURIER_SAMPLES: usize = 4096;
/// Grid points per branch for the `d_LY` hypothesis check.
pub const DLY_GRID: usize = 2000;

/// Discretization of the fiber transfer operators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scheme {
    /// Ulam matrix from `q` test points per bin.
    Ulam { k: usize, q: usize },
    /// Ulam matrix from exact preimage lengths.
    UlamExact { k: usize },
    /// Galerkin matrix on modes `|m| ≤ K` with Cesàro weighting.
    GalerkinCesaro { modes: usize, tol: f64 },
    /// Unweighted Galerkin matrix.
    GalerkinPlain { modes: usize, tol: f64 },
}

impl Scheme {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Scheme::Ulam { k, q } => k >= 1 && q >= 1,
            Scheme::UlamExact { k } => k >= 1,
            Scheme::GalerkinCesaro { modes, tol } | Scheme::GalerkinPlain { modes, tol } => {
                modes >= 1 && tol > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("scheme parameters must be positive: {self:?}")))
        }
    }

    pub fn is_ulam(&self) -> bool {
        matches!(self, Scheme::Ulam { .. } | Scheme::UlamExact { .. })
    }

    /// Same scheme kind at a different resolution.
    pub fn with_resolution(&self, n: usize) -> Scheme {
        match *self {
            Scheme::Ulam { q, .. } => Scheme::Ulam { k: n, q },
            Scheme::UlamExact { .. } => Scheme::UlamExact { k: n },
            Scheme::GalerkinCesaro { tol, .. } => Scheme::GalerkinCesaro { modes: n, tol },
            Scheme::GalerkinPlain { tol, .. } => Scheme::GalerkinPlain { modes: n, tol },
        }
    }

    pub fn lebesgue(&self) -> Density {
        match *self {
            Scheme::Ulam { k, .. } | Scheme::UlamExact { k } => {
                Density::Binned(BinnedDensity::lebesgue(k))
            }
            Scheme::GalerkinCesaro { modes, .. } | Scheme::GalerkinPlain { modes, .. } => {
                Density::Fourier(FourierDensity::lebesgue(modes))
            }
        }
    }
}

/// A random dynamical system `(σ, T_ω)` together with its discretization.
#[derive(Clone, Debug, PartialEq)]
pub struct CocycleSpec {
    pub family: MapFamily,
    pub base: Base,
    pub scheme: Scheme,
    pub steps: usize,
    pub omega0: f64,
}

impl CocycleSpec {
    pub fn new(family: MapFamily, base: Base, scheme: Scheme, steps: usize, omega0: f64) -> Result<Self> {
        let s = Self {
            family,
            base,
            scheme,
            steps,
            omega0,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 1 {
            return Err(Error::InvalidParameter("steps must be at least 1".into()));
        }
        if !self.omega0.is_finite() {
            return Err(Error::InvalidParameter(format!("ω₀ = {} is not finite", self.omega0)));
        }
        self.scheme.validate()
    }

    pub fn with_scheme(&self, scheme: Scheme) -> Self {
        Self {
            scheme,
            ..self.clone()
        }
    }

    pub fn with_family(&self, family: MapFamily) -> Self {
        Self {
            family,
            ..self.clone()
        }
    }

    pub fn with_steps(&self, steps: usize) -> Self {
        Self {
            steps,
            ..self.clone()
        }
    }

    /// `ω₀, σω₀, …, σ^{n−1}ω₀`.
    pub fn fibers(&self, n: usize) -> Result<Vec<f64>> {
        self.base.orbit(self.omega0, n)
    }

    /// Operator of the fiber at base point `omega`.
    pub fn assemble(&self, omega: f64) -> Result<FiberOperator> {
        let map = self.family.at(omega)?;
        Ok(match self.scheme {
            Scheme::Ulam { k, q } => FiberOperator::Ulam(assemble_testpoints(&map, k, q)?.with_fiber(omega)),
            Scheme::UlamExact { k } => FiberOperator::Ulam(assemble_exact(&map, k)?.with_fiber(omega)),
            Scheme::GalerkinCesaro { modes, tol } => {
                FiberOperator::Galerkin(cesaro_weighting(&galerkin_matrix(&map, modes, tol)?)?)
            }
            Scheme::GalerkinPlain { modes, tol } => {
                FiberOperator::Galerkin(galerkin_matrix(&map, modes, tol)?)
            }
        })
    }

    /// Operators of the first `n` fibers, assembled in parallel.
    pub fn assemble_all(&self, n: usize) -> Result<Vec<FiberOperator>> {
        self.fibers(n)?
            .into_par_iter()
            .map(|w| self.assemble(w))
            .collect()
    }

    /// Visit the operators of the first `n` fibers in orbit order. Assembly runs in parallel
    /// batches so that only a few operators are held at once.
    pub fn for_each_fiber(
        &self,
        n: usize,
        mut visit: impl FnMut(usize, f64, &FiberOperator) -> Result<()>,
    ) -> Result<()> {
        let fibers = self.fibers(n)?;
        let batch = (2 * rayon::current_num_threads()).max(4);
        for (c, chunk) in fibers.chunks(batch).enumerate() {
            let ops: Vec<FiberOperator> = chunk
                .par_iter()
                .map(|&w| self.assemble(w))
                .collect::<Result<_>>()?;
            for (i, op) in ops.iter().enumerate() {
                visit(c * batch + i, chunk[i], op)?;
            }
        }
        Ok(())
    }
}

/// One discretized fiber transfer operator.
#[derive(Clone, Debug, PartialEq)]
pub enum FiberOperator {
    Ulam(UlamMatrix),
    Galerkin(GalerkinMatrix),
}

impl FiberOperator {
    /// Push a density one step.
    pub fn apply_density(&self, f: &Density) -> Result<Density> {
        match (self, f) {
            (FiberOperator::Ulam(m), Density::Binned(v)) => Ok(Density::Binned(push(v, m)?)),
            (FiberOperator::Galerkin(a), Density::Fourier(c)) => {
                let out = a.apply(c.coeffs())?;
                Ok(Density::Fourier(FourierDensity::from_coeffs(out, c.is_real())?))
            }
            _ => Err(Error::IncompatibleRepresentations(
                "operator and density use different discretizations".into(),
            )),
        }
    }

    /// Composition `next ∘ self` as a single operator.
    pub fn then(&self, next: &FiberOperator) -> Result<FiberOperator> {
        match (self, next) {
            (FiberOperator::Ulam(a), FiberOperator::Ulam(b)) => Ok(FiberOperator::Ulam(a.then(b)?)),
            (FiberOperator::Galerkin(a), FiberOperator::Galerkin(b)) => {
                Ok(FiberOperator::Galerkin(a.then(b)?))
            }
            _ => Err(Error::IncompatibleRepresentations(
                "cannot compose Ulam and Galerkin operators".into(),
            )),
        }
    }
}

/// A density in one of the two representations.
#[derive(Clone, Debug, PartialEq)]
pub enum Density {
    Binned(BinnedDensity),
    Fourier(FourierDensity),
}

impl Density {
    pub fn integral(&self) -> f64 {
        match self {
            Density::Binned(b) => b.integral(),
            Density::Fourier(f) => f.integral(),
        }
    }

    /// `|∫f − 1|`, including any imaginary part of `c₀`.
    pub fn mass_drift(&self) -> f64 {
        match self {
            Density::Binned(b) => (b.integral() - 1.0).abs(),
            Density::Fourier(f) => (f.coeff(0) - Complex64::new(1.0, 0.0)).norm(),
        }
    }

    /// `∫|f|`: exact for bins, sampled on [`FOURIER_SAMPLES`] midpoints for Fourier densities.
    pub fn l1_norm(&self) -> f64 {
        match self {
            Density::Binned(b) => l1_norm(b.values()),
            Density::Fourier(f) => l1_norm(&evaluate_density(f, FOURIER_SAMPLES).0),
        }
    }

    /// `(x, value)` pairs: bin midpoints, or [`FOURIER_SAMPLES`] sample midpoints.
    pub fn points(&self) -> Vec<(f64, f64)> {
        match self {
            Density::Binned(b) => b.midpoints().zip(b.values().iter().copied()).collect(),
            Density::Fourier(f) => {
                let (v, _) = evaluate_density(f, FOURIER_SAMPLES);
                crate::io::midpoints(FOURIER_SAMPLES).zip(v).collect()
            }
        }
    }

    /// Averages over `k` uniform bins.
    pub fn bin_averages(&self, k: usize) -> Result<Vec<f64>> {
        match self {
            Density::Binned(b) => conditional_expectation(b.values(), k),
            Density::Fourier(f) => Ok(f.bin_averages(k)),
        }
    }

    pub fn min_value(&self) -> f64 {
        self.points().iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
    }

    /// Two-column `x,value` CSV.
    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        crate::io::write_xy_csv(w, self.points())
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Number of bins both densities are compared on: the finest common coarsening of two binnings,
/// the binning of the binned side, or [`FOURIER_SAMPLES`] bins for two Fourier densities.
pub fn common_bins(a: &Density, b: &Density) -> Result<usize> {
    let k = match (a, b) {
        (Density::Binned(x), Density::Binned(y)) => gcd(x.k(), y.k()),
        (Density::Binned(x), Density::Fourier(_)) | (Density::Fourier(_), Density::Binned(x)) => x.k(),
        (Density::Fourier(_), Density::Fourier(_)) => FOURIER_SAMPLES,
    };
    if k < 2 {
        return Err(Error::IncompatibleRepresentations(
            "the binnings have no common partition finer than one bin".into(),
        ));
    }
    Ok(k)
}

/// Distance used to compare densities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DistanceNorm {
    L1,
    Lp(f64),
    /// Fractional Sobolev norm at smoothness `t'`.
    WeakHpt(SobolevParams),
}

/// Distance between two densities after projecting both onto their common bins.
pub fn compare_densities(a: &Density, b: &Density, norm: DistanceNorm) -> Result<f64> {
    let k = common_bins(a, b)?;
    let diff: Vec<f64> = a
        .bin_averages(k)?
        .iter()
        .zip(b.bin_averages(k)?)
        .map(|(x, y)| x - y)
        .collect();
    Ok(match norm {
        DistanceNorm::L1 => l1_norm(&diff),
        DistanceNorm::Lp(p) => lp_norm_slice(&diff, p),
        DistanceNorm::WeakHpt(params) => {
            let g = GridFunction::new(diff, Extension::Circle)?;
            hpt_norm_at(&g, params.p, params.t_weak)
        }
    })
}

/// Per-step bookkeeping of a pushforward.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepDiagnostics {
    pub step: usize,
    pub omega: f64,
    /// `‖f_step − f_{step−1}‖₁`.
    pub l1_change: f64,
    pub mass_drift: f64,
}

/// Densities recorded along a pushforward of Lebesgue measure.
#[derive(Clone, Debug, PartialEq)]
pub struct PushforwardResult {
    /// `(step, density)` in increasing step order.
    pub densities: Vec<(usize, Density)>,
    /// `σ^j ω₀` for `j = 0..=steps`.
    pub fibers: Vec<f64>,
    /// One entry per step `1..=steps`.
    pub diagnostics: Vec<StepDiagnostics>,
}

impl PushforwardResult {
    pub fn at(&self, step: usize) -> Option<&Density> {
        self.densities.iter().find(|(s, _)| *s == step).map(|(_, d)| d)
    }
}

/// Push Lebesgue measure through `spec.steps` fibers, recording the densities at `record_at`.
pub fn push_forward(spec: &CocycleSpec, record_at: &[usize]) -> Result<PushforwardResult> {
    spec.validate()?;
    push_forward_with(spec, record_at, |_, f| Ok(f))
}

/// [`push_forward`] with an extra map applied to the density after every fiber step.
pub fn push_forward_with(
    spec: &CocycleSpec,
    record_at: &[usize],
    mut post: impl FnMut(usize, Density) -> Result<Density>,
) -> Result<PushforwardResult> {
    if let Some(&s) = record_at.iter().find(|&&s| s > spec.steps) {
        return Err(Error::InvalidParameter(format!(
            "record step {s} exceeds the {} steps of the run",
            spec.steps
        )));
    }
    let fibers = spec.fibers(spec.steps + 1)?;
    let mut f = spec.scheme.lebesgue();
    let mut densities = Vec::new();
    if record_at.contains(&0) {
        densities.push((0, f.clone()));
    }
    let mut diagnostics = Vec::with_capacity(spec.steps);
    spec.for_each_fiber(spec.steps, |j, _, op| {
        let step = j + 1;
        let next = post(step, op.apply_density(&f)?)?;
        let drift = next.mass_drift();
        if !(drift <= MASS_TOL) {
            return Err(Error::MassDrift { step, drift });
        }
        let l1_change = compare_densities(&next, &f, DistanceNorm::L1)?;
        diagnostics.push(StepDiagnostics {
            step,
            omega: fibers[step],
            l1_change,
            mass_drift: drift,
        });
        f = next;
        if record_at.contains(&step) {
            densities.push((step, f.clone()));
        }
        Ok(())
    })?;
    Ok(PushforwardResult {
        densities,
        fibers,
        diagnostics,
    })
}

/// `L¹` distance at the fiber `σ^{n+1}ω₀` between the densities obtained from Lebesgue measure
/// after `n` and after `n + 1` steps. The random invariant density differs from fiber to fiber,
/// so the change of the burn-in at a fixed fiber measures how far the transient has decayed.
pub fn stationarity_defect(spec: &CocycleSpec, n: usize) -> Result<f64> {
    spec.validate()?;
    if n < 1 {
        return Err(Error::InvalidParameter("burn-in must be at least 1 step".into()));
    }
    let mut long = spec.scheme.lebesgue();
    let mut short = spec.scheme.lebesgue();
    spec.for_each_fiber(n + 1, |j, _, op| {
        long = op.apply_density(&long)?;
        if j >= 1 {
            short = op.apply_density(&short)?;
        }
        Ok(())
    })?;
    compare_densities(&long, &short, DistanceNorm::L1)
}

/// Top and second Lyapunov exponent estimates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LyapunovReport {
    pub lambda1_hat: f64,
    pub lambda2_hat: f64,
    pub n_used: usize,
    pub trials: usize,
    /// Per-trial second-exponent estimates.
    pub trial_estimates: Vec<f64>,
    pub seed: u64,
}

/// `(1/n) log(‖ℒ^{(n)} 1‖₁ / ‖1‖₁)`.
pub fn estimate_lambda1(spec: &CocycleSpec, n: usize) -> Result<f64> {
    estimate_lambda1_scaled(spec, n, 1.0)
}

/// [`estimate_lambda1`] started from the constant density `scale`.
pub fn estimate_lambda1_scaled(spec: &CocycleSpec, n: usize, scale: f64) -> Result<f64> {
    spec.validate()?;
    if n < 50 {
        return Err(Error::InvalidParameter(format!("λ₁ estimate needs n ≥ 50, got {n}")));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale {scale} must be positive")));
    }
    let mut v = initial_vector(&spec.scheme, scale);
    let start = v.l1_norm();
    spec.for_each_fiber(n, |_, _, op| {
        v = v.apply(op)?;
        Ok(())
    })?;
    Ok((v.l1_norm().ln() - start.ln()) / n as f64)
}

/// Signed iterate used by the exponent estimates.
#[derive(Clone, Debug)]
enum Vector {
    Real(Vec<f64>),
    Modes(Vec<Complex64>),
}

fn initial_vector(scheme: &Scheme, scale: f64) -> Vector {
    match *scheme {
        Scheme::Ulam { k, .. } | Scheme::UlamExact { k } => Vector::Real(vec![scale; k]),
        Scheme::GalerkinCesaro { modes, .. } | Scheme::GalerkinPlain { modes, .. } => {
            let mut c = vec![Complex64::new(0.0, 0.0); 2 * modes + 1];
            c[modes] = Complex64::new(scale, 0.0);
            Vector::Modes(c)
        }
    }
}

impl Vector {
    fn apply(&self, op: &FiberOperator) -> Result<Vector> {
        match (self, op) {
            (Vector::Real(v), FiberOperator::Ulam(m)) => Ok(Vector::Real(m.apply(v)?)),
            (Vector::Modes(c), FiberOperator::Galerkin(a)) => Ok(Vector::Modes(a.apply(c)?)),
            _ => Err(Error::IncompatibleRepresentations(
                "operator and vector use different discretizations".into(),
            )),
        }
    }

    /// `L¹` norm of the represented function.
    fn l1_norm(&self) -> f64 {
        match self {
            Vector::Real(v) => l1_norm(v),
            Vector::Modes(c) => {
                let f = FourierDensity::from_coeffs(c.clone(), true)
                    .expect("coefficient vector has odd length");
                l1_norm(&evaluate_density(&f, FOURIER_SAMPLES).0)
            }
        }
    }

    /// Norm used for renormalization in the second-exponent estimate.
    fn trial_norm(&self) -> f64 {
        match self {
            Vector::Real(v) => l1_norm(v),
            Vector::Modes(c) => c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        }
    }

    fn remove_mean(&mut self) {
        match self {
            Vector::Real(v) => {
                let m = v.iter().sum::<f64>() / v.len() as f64;
                v.iter_mut().for_each(|x| *x -= m);
            }
            Vector::Modes(c) => {
                let k = (c.len() - 1) / 2;
                c[k] = Complex64::new(0.0, 0.0);
            }
        }
    }

    fn scale(&mut self, a: f64) {
        match self {
            Vector::Real(v) => v.iter_mut().for_each(|x| *x *= a),
            Vector::Modes(c) => c.iter_mut().for_each(|z| *z *= a),
        }
    }
}

fn random_vector(scheme: &Scheme, rng: &mut ChaCha8Rng) -> Vector {
    match *scheme {
        Scheme::Ulam { k, .. } | Scheme::UlamExact { k } => {
            Vector::Real((0..k).map(|_| rng.gen_range(-1.0..1.0)).collect())
        }
        Scheme::GalerkinCesaro { modes, .. } | Scheme::GalerkinPlain { modes, .. } => {
            // Hermitian coefficients, so the vector is a real function.
            let mut c = vec![Complex64::new(0.0, 0.0); 2 * modes + 1];
            for m in 1..=modes {
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                c[modes + m] = z;
                c[modes - m] = z.conj();
            }
            Vector::Modes(c)
        }
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Median over `trials` zero-mean random vectors of `(1/n) log` of their growth under the
/// cocycle. The mean is removed again after every step so that rounding cannot feed the
/// invariant direction; a vector that collapses to exactly zero contributes `−∞`.
pub fn estimate_lambda2(
    spec: &CocycleSpec,
    n: usize,
    trials: usize,
    renorm_every: usize,
    seed: u64,
) -> Result<(f64, Vec<f64>)> {
    spec.validate()?;
    if trials < 5 {
        return Err(Error::InvalidParameter(format!("λ₂ estimate needs at least 5 trials, got {trials}")));
    }
    if n < 100 {
        return Err(Error::InvalidParameter(format!("λ₂ estimate needs n ≥ 100, got {n}")));
    }
    if renorm_every < 1 {
        return Err(Error::InvalidParameter("renorm_every must be at least 1".into()));
    }
    let mut vectors = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
        let mut v = random_vector(&spec.scheme, &mut rng);
        v.remove_mean();
        let norm = v.trial_norm();
        if !(norm > 0.0) {
            return Err(Error::DegenerateVector { trial });
        }
        v.scale(1.0 / norm);
        vectors.push(Some(v));
    }
    let mut logs = vec![0.0; trials];
    spec.for_each_fiber(n, |j, _, op| {
        let renorm = (j + 1) % renorm_every == 0 || j + 1 == n;
        for (slot, log) in vectors.iter_mut().zip(logs.iter_mut()) {
            let Some(v) = slot else { continue };
            let mut next = v.apply(op)?;
            next.remove_mean();
            if renorm {
                let norm = next.trial_norm();
                if norm == 0.0 {
                    *log = f64::NEG_INFINITY;
                    *slot = None;
                    continue;
                }
                *log += norm.ln();
                next.scale(1.0 / norm);
            }
            *v = next;
        }
        Ok(())
    })?;
    let estimates: Vec<f64> = logs.iter().map(|l| l / n as f64).collect();
    Ok((median(&estimates), estimates))
}

/// Both exponent estimates over `n` steps.
pub fn lyapunov(
    spec: &CocycleSpec,
    n: usize,
    trials: usize,
    renorm_every: usize,
    seed: u64,
) -> Result<LyapunovReport> {
    let lambda1_hat = estimate_lambda1(spec, n)?;
    let (lambda2_hat, trial_estimates) = estimate_lambda2(spec, n, trials, renorm_every, seed)?;
    Ok(LyapunovReport {
        lambda1_hat,
        lambda2_hat,
        n_used: n,
        trials,
        trial_estimates,
        seed,
    })
}

/// A named table of numbers.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        crate::io::write_table_csv(w, &self.columns, &self.rows)
    }
}

/// Outcome of a thresholded check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub description: String,
}

impl Check {
    pub fn at_most(value: f64, threshold: f64, description: &str) -> Self {
        Self {
            passed: value <= threshold,
            value,
            threshold,
            description: description.to_string(),
        }
    }

    pub fn at_least(value: f64, threshold: f64, description: &str) -> Self {
        Self {
            passed: value >= threshold,
            value,
            threshold,
            description: description.to_string(),
        }
    }
}

/// Diagnostics of one experiment run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunSummary {
    pub experiment: String,
    pub timestamp: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub tables: BTreeMap<String, Table>,
    pub scalars: BTreeMap<String, f64>,
    pub checks: BTreeMap<String, Check>,
    pub diagnostics: BTreeMap<String, Vec<f64>>,
    pub notes: Vec<String>,
}

impl RunSummary {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            ..Default::default()
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.values().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|(_, c)| !c.passed)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary is serializable")
    }
}

fn final_density(spec: &CocycleSpec) -> Result<Density> {
    let r = push_forward(spec, &[spec.steps])?;
    Ok(r.densities.into_iter().next().expect("final step recorded").1)
}

fn check_increasing(values: &[f64], what: &str) -> Result<()> {
    if values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter(format!("{what} must be strictly increasing")));
    }
    Ok(())
}

/// Distance of the step-`steps` density at each `k` to the density at `reference_k`.
pub fn ulam_convergence_study(template: &CocycleSpec, ks: &[usize], reference_k: usize) -> Result<RunSummary> {
    if !template.scheme.is_ulam() {
        return Err(Error::InvalidParameter("the convergence study needs an Ulam scheme".into()));
    }
    if ks.is_empty() {
        return Err(Error::InvalidParameter("empty k list".into()));
    }
    let k_f: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    check_increasing(&k_f, "k list")?;
    if reference_k < 2 * ks[ks.len() - 1] {
        return Err(Error::InvalidParameter(format!(
            "reference k = {reference_k} must be at least twice the largest k"
        )));
    }
    let reference = final_density(&template.with_scheme(template.scheme.with_resolution(reference_k)))?;
    let distances = ks
        .par_iter()
        .map(|&k| {
            let f = final_density(&template.with_scheme(template.scheme.with_resolution(k)))?;
            compare_densities(&f, &reference, DistanceNorm::L1)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut table = Table::new(&["k", "distance"]);
    for (&k, &d) in ks.iter().zip(&distances) {
        table.rows.push(vec![k as f64, d]);
    }
    let mut s = RunSummary::new("ulam-sweep");
    s.scalars.insert("reference_k".into(), reference_k as f64);
    s.scalars.insert("step".into(), template.steps as f64);
    if ks.len() >= 2 {
        let (first, last) = (distances[0], distances[distances.len() - 1]);
        s.checks.insert(
            "finest_beats_coarsest".into(),
            Check::at_most(last - first, 0.0, "d(k_max) − d(k_min) ≤ 0"),
        );
    }
    s.tables.insert("distance".into(), table);
    Ok(s)
}

/// Step-`steps` density of the Ulam cocycle with every step followed by convolution with
/// `kernel`, and the smallest convolved sample seen along the way.
pub fn convolved_density(template: &CocycleSpec, kernel: &Kernel) -> Result<(Density, f64)> {
    if !template.scheme.is_ulam() {
        return Err(Error::InvalidParameter("the convolution study needs an Ulam scheme".into()));
    }
    let mut min_sample = f64::INFINITY;
    let r = push_forward_with(template, &[template.steps], |_, f| {
        let Density::Binned(b) = f else {
            unreachable!("Ulam schemes produce binned densities")
        };
        let v = convolve_samples(kernel, b.values());
        min_sample = v.iter().copied().fold(min_sample, f64::min);
        Ok(Density::Binned(BinnedDensity::new(v.into_iter().map(|x| x.max(0.0)).collect())?))
    })?;
    let d = r.densities.into_iter().next().expect("final step recorded").1;
    Ok((d, min_sample))
}

/// Distance between the Fejér-convolved and the plain step-`steps` density for each order `K`.
pub fn convolution_stability_study(template: &CocycleSpec, orders: &[usize]) -> Result<RunSummary> {
    if orders.is_empty() {
        return Err(Error::InvalidParameter("empty Fejér order list".into()));
    }
    let k_f: Vec<f64> = orders.iter().map(|&k| k as f64).collect();
    check_increasing(&k_f, "Fejér order list")?;
    let reference = final_density(template)?;
    let rows = orders
        .par_iter()
        .map(|&k| {
            let (f, min_sample) = convolved_density(template, &Kernel::fejer(k))?;
            Ok(vec![k as f64, compare_densities(&f, &reference, DistanceNorm::L1)?, min_sample])
        })
        .collect::<Result<Vec<_>>>()?;
    let min_sample = rows.iter().map(|r| r[2]).fold(f64::INFINITY, f64::min);
    let (first, last) = (rows[0][1], rows[rows.len() - 1][1]);
    let mut s = RunSummary::new("convolution-study");
    s.checks.insert(
        "positivity".into(),
        Check::at_least(min_sample, -1e-10, "min convolved sample ≥ −1e−10"),
    );
    if rows.len() >= 2 {
        s.checks.insert(
            "highest_order_beats_lowest".into(),
            Check::at_most(last - first, 0.0, "d(K_max) − d(K_min) ≤ 0"),
        );
    }
    s.scalars.insert("step".into(), template.steps as f64);
    s.tables.insert(
        "distance".into(),
        Table {
            columns: vec!["K".into(), "distance".into(), "min_sample".into()],
            rows,
        },
    );
    Ok(s)
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Stability under the translations `T_ω + ρ`: the step-`steps` distance `d(ρ)` to the
/// unperturbed density, the `d_LY(T_{ρ,ω}, T_ω) = ρ` check at the first five fibers, and the
/// slope of `log d` against `log ρ`.
pub fn static_stability_study(template: &CocycleSpec, rhos: &[f64]) -> Result<RunSummary> {
    if rhos.is_empty() || rhos.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::InvalidParameter("ρ list must be nonempty and nonnegative".into()));
    }
    let reference = final_density(template)?;
    let check_fibers = template.fibers(5)?;
    let rows = rhos
        .par_iter()
        .map(|&rho| {
            let family = template.family.translated(rho);
            let mut dly_err: f64 = 0.0;
            for &w in &check_fibers {
                let d = d_ly(&family.at(w)?, &template.family.at(w)?, DLY_GRID);
                dly_err = dly_err.max((d - rho).abs());
            }
            let d = if rho == 0.0 {
                0.0
            } else {
                compare_densities(&final_density(&template.with_family(family))?, &reference, DistanceNorm::L1)?
            };
            Ok(vec![rho, d, dly_err])
        })
        .collect::<Result<Vec<_>>>()?;
    let (lx, ly): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r[0] > 0.0 && r[1] > 0.0)
        .map(|r| (r[0].ln(), r[1].ln()))
        .unzip();
    let mut s = RunSummary::new("static-study");
    let worst = rows.iter().map(|r| r[2]).fold(0.0, f64::max);
    s.checks.insert(
        "dly_equals_rho".into(),
        Check::at_most(worst, 1e-6, "max |d_LY(T_ρ, T) − ρ| over 5 fibers ≤ 1e−6"),
    );
    if lx.len() >= 2 {
        let beta = fit_slope(&lx, &ly);
        s.scalars.insert("slope".into(), beta);
        s.checks.insert("positive_slope".into(), Check::at_least(beta, f64::MIN_POSITIVE, "β > 0"));
    }
    s.scalars.insert("step".into(), template.steps as f64);
    s.tables.insert(
        "distance".into(),
        Table {
            columns: vec!["rho".into(), "distance".into(), "dly_error".into()],
            rows,
        },
    );
    Ok(s)
}
