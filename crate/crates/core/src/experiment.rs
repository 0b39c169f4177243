//! Experiment driver: runs a configured experiment and writes its CSV tables, SVG figures and
//! JSON run summary to the output directory.

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cocycle::{
    compare_densities, convolution_stability_study, fit_slope, lyapunov, push_forward,
    static_stability_study, stationarity_defect, ulam_convergence_study, Check, Density,
    DistanceNorm, RunSummary, Scheme, Table,
};
use crate::config::{Experiment, ExperimentConfig};
use crate::error::{Error, Result};
use crate::fourier::{cesaro_weighting, FourierDensity};
use crate::maps::MapBounds;
use crate::plot::{render_grid, Panel, Series};
use crate::sobolev::{
    bv_variation, fit_lasota_yorke, hpt_norm, lasota_yorke_sample, lp_norm, smooth_grid, weak_norm,
    Extension, GridFunction,
};
use crate::ulam::{conditional_expectation, expand_bins, MASS_TOL};

/// Name of the lock file guarding an output directory.
pub const LOCK_FILE: &str = ".rand-acim.lock";
/// Grid points per branch used by `validate-map`.
pub const VALIDATION_GRID: usize = 2000;

const ULAM_COLOR: &str = "#1f77b4";
const FEJER_COLOR: &str = "#d62728";
const PLAIN_COLOR: &str = "#7f7f7f";

/// Result of a completed run.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub summary: RunSummary,
    /// Files written, in creation order; the summary is last.
    pub artifacts: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.summary.all_passed()
    }
}

/// Exclusive claim on an output directory, released on drop.
struct DirLock {
    path: PathBuf,
}

impl DirLock {
    fn acquire(dir: &Path) -> Result<Self> {
        let path = dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(Self { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Config(format!(
                "output directory {} is in use by another run (remove {} if stale)",
                dir.display(),
                path.display()
            ))),
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// Tracks written files and removes them unless the run completes.
struct Artifacts {
    dir: PathBuf,
    written: Vec<PathBuf>,
    keep: bool,
}

impl Artifacts {
    fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            keep: false,
        }
    }

    fn write(&mut self, name: &str, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
        let path = self.dir.join(name);
        self.written.push(path.clone());
        let mut w = BufWriter::new(File::create(&path)?);
        body(&mut w)?;
        w.flush()?;
        Ok(())
    }

    fn density(&mut self, name: &str, d: &Density) -> Result<()> {
        self.write(name, |w| d.write_csv(w))
    }

    fn table(&mut self, name: &str, t: &Table) -> Result<()> {
        self.write(name, |w| t.write_csv(w))
    }

    fn text(&mut self, name: &str, s: &str) -> Result<()> {
        self.write(name, |w| w.write_all(s.as_bytes()))
    }
}

impl Drop for Artifacts {
    fn drop(&mut self) {
        if !self.keep {
            for p in &self.written {
                let _ = fs::remove_file(p);
            }
        }
    }
}

/// Run the configured experiment. Returns `Err` for invalid input or a numerical failure (in
/// which case files written so far are removed); threshold checks are reported in the summary.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    fs::create_dir_all(&config.output_dir)?;
    let _lock = DirLock::acquire(&config.output_dir)?;
    let mut out = Artifacts::new(&config.output_dir);
    let mut summary = match config.experiment {
        Experiment::ReproduceFigure => reproduce_figure(config, &mut out)?,
        Experiment::UlamSweep => ulam_sweep(config, &mut out)?,
        Experiment::FourierSweep => fourier_sweep(config, &mut out)?,
        Experiment::ConvolutionStudy => convolution_study(config, &mut out)?,
        Experiment::StaticStudy => static_study(config, &mut out)?,
        Experiment::Lyapunov => lyapunov_experiment(config, &mut out)?,
        Experiment::ValidateMap => validate_map(config, &mut out)?,
        Experiment::NormsLab => norms_lab(config, &mut out)?,
    };
    summary.experiment = config.experiment.name().to_string();
    summary.seed = config.seed;
    summary.config = serde_json::to_value(config).map_err(|e| Error::Config(e.to_string()))?;
    summary.timestamp = timestamp();
    out.text("summary.json", &(summary.to_json() + "\n"))?;
    out.keep = true;
    Ok(RunOutcome {
        summary,
        artifacts: out.written.clone(),
    })
}

/// Current UTC time as `YYYY-MM-DDTHH:MM:SSZ`.
fn timestamp() -> String {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0) as i64;
    let (days, rem) = (secs.div_euclid(86_400), secs.rem_euclid(86_400));
    // Civil date from days since 1970-01-01.
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = yoe + era * 400 + i64::from(m <= 2);
    format!(
        "{y:04}-{m:02}-{d:02}T{:02}:{:02}:{:02}Z",
        rem / 3600,
        rem % 3600 / 60,
        rem % 60
    )
}

fn recorded(cfg: &ExperimentConfig) -> Vec<usize> {
    let s = cfg.scheme.steps;
    vec![s, s + 1, s + 2]
}

/// Densities recorded at selected steps.
type Recorded = Vec<(usize, Density)>;

/// Cesàro-weighted and plain Galerkin pushforwards sharing one matrix assembly per fiber.
fn galerkin_pair(
    cfg: &ExperimentConfig,
    modes: usize,
    steps: usize,
    record: &[usize],
) -> Result<(Recorded, Recorded)> {
    let spec = cfg.cocycle(
        Scheme::GalerkinPlain {
            modes,
            tol: cfg.scheme.quad_tol,
        },
        steps,
    )?;
    let mut cesaro = Density::Fourier(FourierDensity::lebesgue(modes));
    let mut plain = cesaro.clone();
    let (mut rec_c, mut rec_p) = (Vec::new(), Vec::new());
    spec.for_each_fiber(steps, |j, _, op| {
        let step = j + 1;
        let crate::cocycle::FiberOperator::Galerkin(a) = op else {
            unreachable!("Galerkin scheme")
        };
        let weighted = crate::cocycle::FiberOperator::Galerkin(cesaro_weighting(a)?);
        cesaro = weighted.apply_density(&cesaro)?;
        plain = op.apply_density(&plain)?;
        for d in [&cesaro, &plain] {
            let drift = d.mass_drift();
            if !(drift <= MASS_TOL) {
                return Err(Error::MassDrift { step, drift });
            }
        }
        if record.contains(&step) {
            rec_c.push((step, cesaro.clone()));
            rec_p.push((step, plain.clone()));
        }
        Ok(())
    })?;
    Ok((rec_c, rec_p))
}

fn reproduce_figure(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<RunSummary> {
    let record = recorded(cfg);
    let last = record[record.len() - 1];
    let spec = cfg.cocycle(cfg.scheme.ulam(), last)?;
    let ulam = push_forward(&spec, &record)?;
    let mut s = RunSummary::new("reproduce-figure");

    let mut min_value = f64::INFINITY;
    let mut max_drift: f64 = 0.0;
    for (step, d) in &ulam.densities {
        out.density(&format!("ulam_step{step}.csv"), d)?;
        min_value = min_value.min(d.min_value());
        max_drift = max_drift.max(d.mass_drift());
    }
    s.checks.insert("ulam_nonnegative".into(), Check::at_least(min_value, 0.0, "min Ulam density ≥ 0"));
    s.checks.insert("ulam_mass".into(), Check::at_most(max_drift, MASS_TOL, "|∫f − 1| ≤ 1e−8"));
    s.diagnostics.insert("ulam_l1_change".into(), ulam.diagnostics.iter().map(|d| d.l1_change).collect());
    s.diagnostics.insert("ulam_mass_drift".into(), ulam.diagnostics.iter().map(|d| d.mass_drift).collect());
    s.diagnostics.insert("fibers".into(), ulam.fibers.clone());

    let n_stat = cfg.study.stationarity_steps;
    let defect = stationarity_defect(&spec, n_stat)?;
    s.checks.insert(
        "stationarity".into(),
        Check::at_most(
            defect,
            cfg.study.stationarity_threshold,
            &format!("L¹ change at a fixed fiber between burn-in {n_stat} and {}", n_stat + 1),
        ),
    );

    let mut panels: Vec<Panel> = ulam
        .densities
        .iter()
        .map(|(step, d)| Panel {
            title: format!("Ulam k={}, step {step}", cfg.scheme.ulam_k),
            series: vec![Series::new("Ulam", ULAM_COLOR, d.points())],
        })
        .collect();

    if cfg.scheme.modes > 0 {
        let (cesaro, plain) = galerkin_pair(cfg, cfg.scheme.modes, last, &record)?;
        for ((step, c), (_, p)) in cesaro.iter().zip(&plain) {
            out.density(&format!("fejer_step{step}.csv"), c)?;
            out.density(&format!("galerkin_step{step}.csv"), p)?;
            panels.push(Panel {
                title: format!("Galerkin K={}, step {step}", cfg.scheme.modes),
                series: vec![
                    Series::new("Fejér", FEJER_COLOR, c.points()),
                    Series::new("plain", PLAIN_COLOR, p.points()),
                ],
            });
        }
        let first = record[0];
        let u = ulam.at(first).expect("recorded");
        let c = &cesaro[0].1;
        let cross = compare_densities(u, c, DistanceNorm::L1)?;
        s.checks.insert(
            "cross_scheme".into(),
            Check::at_most(
                cross,
                cfg.study.cross_scheme_threshold,
                &format!("L¹ distance between Ulam and Cesàro–Galerkin densities at step {first}"),
            ),
        );
        s.scalars.insert(
            "plain_galerkin_distance".into(),
            compare_densities(u, &plain[0].1, DistanceNorm::L1)?,
        );
    }
    if cfg.plot {
        let rows = panels.len() / 3;
        out.text("figure.svg", &render_grid(rows, 3, &panels))?;
    }
    s.notes.push("thresholds are implementation regression values".into());
    Ok(s)
}

fn log_log_panel(title: &str, x_name: &str, t: &Table, x_col: &str, y_col: &str) -> Panel {
    let xs = t.column(x_col).unwrap_or_default();
    let ys = t.column(y_col).unwrap_or_default();
    let pts = xs
        .iter()
        .zip(&ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    Panel {
        title: format!("{title} (log10 {y_col} vs log10 {x_name})"),
        series: vec![Series::new(y_col, ULAM_COLOR, pts)],
    }
}

fn ulam_sweep(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<RunSummary> {
    let spec = cfg.cocycle(cfg.scheme.ulam(), cfg.scheme.steps)?;
    let s = ulam_convergence_study(&spec, &cfg.study.ks, cfg.study.reference_k)?;
    let t = &s.tables["distance"];
    out.table("ulam_sweep.csv", t)?;
    if cfg.plot {
        out.text("ulam_sweep.svg", &render_grid(1, 1, &[log_log_panel("Ulam convergence", "k", t, "k", "distance")]))?;
    }
    Ok(s)
}

fn fourier_sweep(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<RunSummary> {
    let steps = cfg.scheme.steps;
    let reference = push_forward(
        &cfg.cocycle(cfg.scheme.ulam().with_resolution(cfg.study.reference_k), steps)?,
        &[steps],
    )?;
    let reference = reference.at(steps).expect("recorded");
    let mut t = Table::new(&["K", "cesaro_distance", "plain_distance"]);
    for &k in &cfg.study.mode_list {
        let (c, p) = galerkin_pair(cfg, k, steps, &[steps])?;
        t.rows.push(vec![
            k as f64,
            compare_densities(&c[0].1, reference, DistanceNorm::L1)?,
            compare_densities(&p[0].1, reference, DistanceNorm::L1)?,
        ]);
    }
    let mut s = RunSummary::new("fourier-sweep");
    s.scalars.insert("reference_k".into(), cfg.study.reference_k as f64);
    s.scalars.insert("step".into(), steps as f64);
    out.table("fourier_sweep.csv", &t)?;
    if cfg.plot {
        out.text(
            "fourier_sweep.svg",
            &render_grid(1, 1, &[log_log_panel("Cesàro–Galerkin vs Ulam reference", "K", &t, "K", "cesaro_distance")]),
        )?;
    }
    s.tables.insert("distance".into(), t);
    Ok(s)
}

fn convolution_study(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<RunSummary> {
    let spec = cfg.cocycle(cfg.scheme.ulam(), cfg.scheme.steps)?;
    let s = convolution_stability_study(&spec, &cfg.study.fejer_orders)?;
    let t = &s.tables["distance"];
    out.table("convolution_study.csv", t)?;
    if cfg.plot {
        out.text("convolution_study.svg", &render_grid(1, 1, &[log_log_panel("Fejér convolution", "K", t, "K", "distance")]))?;
    }
    Ok(s)
}

fn static_study(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<RunSummary> {
    let spec = cfg.cocycle(cfg.scheme.ulam(), cfg.scheme.steps)?;
    let s = static_stability_study(&spec, &cfg.study.rhos)?;
    let t = &s.tables["distance"];
    out.table("static_study.csv", t)?;
    if cfg.plot {
        out.text("static_study.svg", &render_grid(1, 1, &[log_log_panel("Translation perturbation", "rho", t, "rho", "distance")]))?;
    }
    Ok(s)
}

fn lyapunov_experiment(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<RunSummary> {
    let spec = cfg.cocycle(cfg.scheme.ulam(), 1)?;
    let st = &cfg.study;
    let report = lyapunov(&spec, st.lyapunov_steps, st.trials, st.renorm_every, cfg.seed)?;
    let mut t = Table::new(&["trial", "lambda2"]);
    for (i, l) in report.trial_estimates.iter().enumerate() {
        t.rows.push(vec![i as f64, *l]);
    }
    out.table("lyapunov_trials.csv", &t)?;
    let mut s = RunSummary::new("lyapunov");
    s.scalars.insert("lambda1_hat".into(), report.lambda1_hat);
    s.scalars.insert("lambda2_hat".into(), report.lambda2_hat);
    s.scalars.insert("n_used".into(), report.n_used as f64);
    s.scalars.insert("trials".into(), report.trials as f64);
    s.checks.insert(
        "lambda1_zero".into(),
        Check::at_most(report.lambda1_hat.abs(), 1e-12, "|λ̂₁| ≤ 1e−12 for row-stochastic matrices"),
    );
    s.checks.insert(
        "lambda2_below_lambda1".into(),
        Check::at_most(report.lambda2_hat - report.lambda1_hat, 0.0, "λ̂₂ ≤ λ̂₁"),
    );
    if report.lambda2_hat == f64::NEG_INFINITY {
        s.notes.push("λ̂₂ = −∞: zero-mean vectors collapse to 0 exactly".into());
    }
    s.tables.insert("trials".into(), t);
    Ok(s)
}

fn validate_map(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<RunSummary> {
    let family = cfg.map_family()?;
    let bounds = MapBounds::default();
    let fibers = cfg.cocycle(cfg.scheme.ulam(), 1)?.fibers(cfg.study.validate_fibers.max(1))?;
    let mut t = Table::new(&[
        "omega",
        "branch_count",
        "min_abs_derivative",
        "c1_gamma_norm",
        "monotone",
        "passed",
    ]);
    let mut s = RunSummary::new("validate-map");
    let mut min_slope = f64::INFINITY;
    let mut failures = 0;
    for &w in &fibers {
        let r = family.at(w)?.validate(VALIDATION_GRID, &bounds);
        min_slope = min_slope.min(r.min_abs_derivative);
        if !r.passed() {
            failures += 1;
            for f in &r.failures {
                s.notes.push(format!("ω = {w}: {f}"));
            }
        }
        t.rows.push(vec![
            w,
            r.branch_count as f64,
            r.min_abs_derivative,
            r.c1_gamma_norm,
            f64::from(u8::from(r.monotone)),
            f64::from(u8::from(r.passed())),
        ]);
    }
    s.scalars.insert("min_abs_derivative".into(), min_slope);
    s.checks.insert(
        "min_slope".into(),
        Check::at_least(min_slope, bounds.mu, "min |DT| over all fibers ≥ μ"),
    );
    s.checks.insert(
        "all_fibers_valid".into(),
        Check::at_most(failures as f64, 0.0, "every sampled fiber satisfies the map bounds"),
    );
    out.table("validate_map.csv", &t)?;
    s.tables.insert("fibers".into(), t);
    Ok(s)
}

/// Random step function on the circle with up to 20 jumps.
fn random_step_function(rng: &mut ChaCha8Rng) -> impl Fn(f64) -> f64 + Sync {
    let m = rng.gen_range(1..=20);
    let mut cuts: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
    cuts.sort_by(f64::total_cmp);
    let values: Vec<f64> = (0..=m).map(|_| rng.gen_range(0.0..2.0)).collect();
    move |x: f64| values[cuts.partition_point(|&c| c <= x)]
}

fn norms_lab(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<RunSummary> {
    let params = cfg.sobolev.params()?;
    let n = cfg.sobolev.grid_n;
    let mut s = RunSummary::new("norms-lab");
    let two_pi = 2.0 * std::f64::consts::PI;
    let step = GridFunction::from_fn(n, Extension::ZeroExtend, |x| if x < 0.5 { 1.0 } else { 0.0 })?;
    let abs_sin = GridFunction::from_fn(n, Extension::Circle, |x| (two_pi * x).sin().abs())?;
    let sin = GridFunction::from_fn(n, Extension::Circle, |x| (two_pi * x).sin())?;

    let mut norms = Table::new(&["function", "lp", "bv", "hpt", "weak"]);
    for (i, g) in [&step, &abs_sin, &sin].into_iter().enumerate() {
        norms.rows.push(vec![i as f64, lp_norm(g, params.p), bv_variation(g), hpt_norm(g, &params), weak_norm(g, &params)]);
    }
    s.notes.push("norms.csv function index: 0 = indicator of [0, 1/2), 1 = |sin 2πx|, 2 = sin 2πx".into());
    out.table("norms.csv", &norms)?;
    s.tables.insert("norms".into(), norms);

    // Smoothing rate.
    let mut smoothing = Table::new(&["eps", "weak_norm"]);
    for j in 4..=10 {
        let eps = 2f64.powi(-j);
        let d = smooth_grid(&step, eps)?.sub(&step)?;
        smoothing.rows.push(vec![eps, weak_norm(&d, &params)]);
    }
    let slope = table_slope(&smoothing, "eps", "weak_norm");
    let target = (params.t - params.t_weak) / 2.0 - 0.05;
    s.scalars.insert("smoothing_slope".into(), slope);
    s.checks.insert("smoothing_rate".into(), Check::at_least(slope, target, "log-log slope of ‖f_ε − f‖ vs ε"));
    out.table("smoothing_rate.csv", &smoothing)?;
    s.tables.insert("smoothing_rate".into(), smoothing);

    // Bin-averaging error rate and uniform bound.
    let ks: Vec<usize> = (2..=10).map(|e| 1usize << e).filter(|&k| n.is_multiple_of(k) && k <= n / 4).collect();
    let mut err = Table::new(&["inv_k", "weak_norm"]);
    let mut bound = Table::new(&["k", "ratio"]);
    let base = hpt_norm(&sin, &params);
    for &k in &ks {
        let e = abs_sin.with_samples(expand_bins(&conditional_expectation(abs_sin.samples(), k)?, n)?);
        err.rows.push(vec![1.0 / k as f64, weak_norm(&e.sub(&abs_sin)?, &params)]);
        let p = sin.with_samples(expand_bins(&conditional_expectation(sin.samples(), k)?, n)?);
        bound.rows.push(vec![k as f64, hpt_norm(&p, &params) / base]);
    }
    if ks.len() >= 2 {
        let slope = table_slope(&err, "inv_k", "weak_norm");
        s.scalars.insert("ulam_error_slope".into(), slope);
        s.checks.insert(
            "ulam_error_rate".into(),
            Check::at_least(slope, 1.0 - params.t_weak - 0.1, "log-log slope of ‖(E_k − I)g‖ vs 1/k"),
        );
    }
    let ratios = bound.column("ratio").unwrap_or_default();
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    s.checks.insert("ek_bound".into(), Check::at_most(max_ratio, 3.0, "max_k ‖E_k f‖ / ‖f‖ for sin 2πx"));
    out.table("ulam_error_rate.csv", &err)?;
    out.table("ek_bound.csv", &bound)?;
    s.tables.insert("ulam_error_rate".into(), err);
    s.tables.insert("ek_bound".into(), bound);

    // BV Lasota–Yorke constants of the first fiber map.
    let map = cfg.map_family()?.at(cfg.base.omega0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let samples = (0..20)
        .map(|_| lasota_yorke_sample(&map, random_step_function(&mut rng), n))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_lasota_yorke(&samples)?;
    s.scalars.insert("ly_alpha".into(), fit.alpha);
    s.scalars.insert("ly_b".into(), fit.b);
    s.checks.insert("ly_alpha_below_one".into(), Check::at_most(fit.alpha, 1.0 - 1e-12, "fitted BV contraction α < 1"));
    let mut ly = Table::new(&["bv", "l1", "bv_image"]);
    ly.rows = samples.iter().map(|x| vec![x.bv, x.l1, x.bv_image]).collect();
    out.table("lasota_yorke.csv", &ly)?;
    s.tables.insert("lasota_yorke".into(), ly);
    Ok(s)
}

fn table_slope(t: &Table, x: &str, y: &str) -> f64 {
    let (lx, ly): (Vec<f64>, Vec<f64>) = t
        .column(x)
        .unwrap_or_default()
        .iter()
        .zip(t.column(y).unwrap_or_default())
        .map(|(a, b)| (a.ln(), b.ln()))
        .unzip();
    fit_slope(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timestamp_shape() {
        let t = timestamp();
        assert_eq!(t.len(), 20);
        assert!(t.ends_with('Z') && t.as_bytes()[10] == b'T');
    }

    #[test]
    fn lock_is_exclusive_and_released() {
        let dir = tempfile::tempdir().unwrap();
        let a = DirLock::acquire(dir.path()).unwrap();
        assert!(matches!(DirLock::acquire(dir.path()), Err(Error::Config(_))));
        drop(a);
        assert!(DirLock::acquire(dir.path()).is_ok());
    }

    #[test]
    fn partial_artifacts_removed() {
        let dir = tempfile::tempdir().unwrap();
        {
            let mut out = Artifacts::new(dir.path());
            out.text("a.csv", "x").unwrap();
            assert!(dir.path().join("a.csv").exists());
        }
        assert!(!dir.path().join("a.csv").exists());
    }

    #[test]
    fn failing_run_leaves_no_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig {
            output_dir: dir.path().to_path_buf(),
            ..Default::default()
        };
        cfg.base.orbit_file = Some(dir.path().join("missing.txt"));
        assert!(run(&cfg).is_err());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn small_figure_run() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig {
            output_dir: dir.path().to_path_buf(),
            ..Default::default()
        };
        cfg.scheme.ulam_k = 100;
        cfg.scheme.test_points = 20;
        cfg.scheme.modes = 8;
        cfg.plot = true;
        let o = run(&cfg).unwrap();
        for name in ["ulam_step20.csv", "ulam_step22.csv", "fejer_step21.csv", "galerkin_step20.csv", "figure.svg", "summary.json"] {
            assert!(dir.path().join(name).exists(), "{name}");
        }
        assert!(!dir.path().join(LOCK_FILE).exists());
        assert!(o.summary.checks["ulam_nonnegative"].passed);
    }
}
