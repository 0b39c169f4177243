//! Piecewise expanding circle maps.
//!
//! A [`PiecewiseMap`] is an ordered list of polynomial branches whose domains tile the circle
//! `[0, 1)`. Domains are stored in *lifted* coordinates: the first branch starts at some
//! `s0 ∈ [0, 1)` and the last one ends at exactly `s0 + 1`, so a branch may straddle the point
//! `0 ≡ 1`. Branch values are kept unreduced (a descending branch may run from `0` down to `-1`)
//! and are reduced mod 1 only when the map is evaluated as a circle map.
//!
//! Each branch polynomial is written in the local coordinate `u = x - a`, where `a` is the left
//! end of the branch domain.

use crate::error::{Error, Result};

/// Guaranteed accuracy of branch inversion; bisection continues to floating-point resolution.
pub const ROOT_TOL: f64 = 1e-12;
/// Iteration cap for bisection.
pub const ROOT_MAX_ITER: usize = 200;

/// Reduce to `[0, 1)`.
#[inline]
pub fn frac(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Dense polynomial `c0 + c1 u + c2 u^2 + ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }

    pub fn derivative(&self) -> Polynomial {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| i as f64 * c)
            .collect();
        Polynomial::new(coeffs)
    }

    fn shifted(&self, rho: f64) -> Polynomial {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] += rho;
        Polynomial { coeffs }
    }
}

/// Half-open interval `[start, end)`, possibly in lifted circle coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> f64 {
        (self.end - self.start).max(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval::new(self.start.max(other.start), self.end.min(other.end))
    }

    /// Hausdorff distance between the closures of two intervals on the line.
    pub fn hausdorff(&self, other: &Interval) -> f64 {
        (self.start - other.start)
            .abs()
            .max((self.end - other.end).abs())
    }

    fn shifted(&self, n: f64) -> Interval {
        Interval::new(self.start + n, self.end + n)
    }
}

/// One monotone expanding branch.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    interval: Interval,
    value: Polynomial,
    derivative: Polynomial,
}

impl Branch {
    pub fn new(interval: Interval, value: Polynomial) -> Self {
        let derivative = value.derivative();
        Self {
            interval,
            value,
            derivative,
        }
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.value
    }

    /// Unreduced branch value at a lifted point.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        self.value.eval(x - self.interval.start)
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        self.derivative.eval(x - self.interval.start)
    }

    #[inline]
    fn local_value(&self, u: f64) -> f64 {
        self.value.eval(u)
    }

    /// Values at the two ends of the domain (right end as a one-sided limit), in domain order.
    pub fn end_values(&self) -> (f64, f64) {
        (self.local_value(0.0), self.local_value(self.interval.len()))
    }

    /// `(min, max)` of the branch image in unreduced value coordinates.
    pub fn image_bounds(&self) -> (f64, f64) {
        let (a, b) = self.end_values();
        (a.min(b), a.max(b))
    }

    pub fn is_increasing(&self) -> bool {
        let (a, b) = self.end_values();
        b >= a
    }

    /// Lifted point `x` in the domain with `value(x) = y`, by bisection.
    pub fn invert(&self, y: f64) -> Result<f64> {
        let len = self.interval.len();
        let (va, vb) = self.end_values();
        if y == va {
            return Ok(self.interval.start);
        }
        if y == vb {
            return Ok(self.interval.end);
        }
        let (mut lo, mut hi) = (0.0, len);
        let mut g_lo = va - y;
        if g_lo * (vb - y) > 0.0 {
            return Err(Error::ConvergenceFailure { iterations: 0 });
        }
        for _ in 0..ROOT_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                return Ok(self.interval.start + mid);
            }
            let g_mid = self.local_value(mid) - y;
            if g_mid == 0.0 {
                return Ok(self.interval.start + mid);
            }
            if (g_mid < 0.0) == (g_lo < 0.0) {
                lo = mid;
                g_lo = g_mid;
            } else {
                hi = mid;
            }
        }
        if hi - lo <= ROOT_TOL {
            return Ok(self.interval.start + 0.5 * (lo + hi));
        }
        Err(Error::ConvergenceFailure {
            iterations: ROOT_MAX_ITER,
        })
    }

    /// Grid proxy of the C^{1+γ} norm: the largest of `sup|T|`, `sup|DT|` and the γ-Hölder
    /// quotient of `DT`, all over `n` equispaced points of `domain` (closed).
    fn c1_gamma_norm_on(&self, domain: Interval, gamma: f64, n: usize) -> f64 {
        c1_gamma_norm(
            |x| self.value(x),
            |x| self.derivative(x),
            domain,
            gamma,
            n,
        )
    }
}

fn grid_points(domain: Interval, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    let h = domain.len() / (n - 1) as f64;
    (0..n).map(move |l| {
        if l == n - 1 {
            domain.end
        } else {
            domain.start + l as f64 * h
        }
    })
}

fn c1_gamma_norm(
    value: impl Fn(f64) -> f64,
    derivative: impl Fn(f64) -> f64,
    domain: Interval,
    gamma: f64,
    n: usize,
) -> f64 {
    let xs: Vec<f64> = grid_points(domain, n).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| value(x)).collect();
    let ders: Vec<f64> = xs.iter().map(|&x| derivative(x)).collect();
    let sup_v = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let sup_d = ders.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    // Hölder quotient over pairs at dyadic separations.
    let mut holder = 0.0_f64;
    let mut stride = 1;
    while stride < xs.len() {
        for l in 0..xs.len() - stride {
            let dx = xs[l + stride] - xs[l];
            if dx > 0.0 {
                holder = holder.max((ders[l + stride] - ders[l]).abs() / dx.powf(gamma));
            }
        }
        stride *= 2;
    }
    sup_v.max(sup_d).max(holder)
}

/// Uniform bounds (M1)–(M3) a map is validated against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapBounds {
    /// Lower bound on `|DT|`.
    pub mu: f64,
    /// Upper bound on the branch C^{1+γ} norm.
    pub d: f64,
    /// Upper bound on the number of branches.
    pub max_branches: usize,
}

impl Default for MapBounds {
    fn default() -> Self {
        Self {
            mu: 2.0,
            d: 10.0,
            max_branches: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub branch_count: usize,
    pub min_abs_derivative: f64,
    pub c1_gamma_norm: f64,
    pub monotone: bool,
    pub bounds: MapBounds,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A piecewise C^{1+γ} circle map.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseMap {
    branches: Vec<Branch>,
    gamma: f64,
}

impl PiecewiseMap {
    /// Build a map from branches whose domains must tile one full turn of the circle.
    pub fn new(branches: Vec<Branch>, gamma: f64) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::InvalidMap("a map needs at least one branch".into()));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidMap(format!("Hölder exponent {gamma} not in (0, 1]")));
        }
        let first = branches[0].interval.start;
        if !(0.0..1.0).contains(&first) {
            return Err(Error::InvalidMap(format!(
                "first breakpoint {first} not in [0, 1)"
            )));
        }
        for (i, b) in branches.iter().enumerate() {
            if !(b.interval.end > b.interval.start) {
                return Err(Error::InvalidMap(format!("branch {i} has an empty domain")));
            }
            if let Some(next) = branches.get(i + 1) {
                if next.interval.start != b.interval.end {
                    return Err(Error::InvalidMap(format!(
                        "gap or overlap between branches {i} and {}",
                        i + 1
                    )));
                }
            }
            if b.value.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidMap(format!("branch {i} has non-finite coefficients")));
            }
        }
        let last = branches[branches.len() - 1].interval.end;
        if last != first + 1.0 {
            return Err(Error::InvalidMap(format!(
                "branches cover [{first}, {last}) instead of one full turn"
            )));
        }
        Ok(Self { branches, gamma })
    }

    /// Build from `b + 1` breakpoints and `b` coefficient lists (local coordinate per branch).
    pub fn from_breakpoints(breakpoints: &[f64], coefficients: &[Vec<f64>], gamma: f64) -> Result<Self> {
        if breakpoints.len() != coefficients.len() + 1 {
            return Err(Error::InvalidMap(format!(
                "{} breakpoints for {} branches",
                breakpoints.len(),
                coefficients.len()
            )));
        }
        let branches = coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| {
                Branch::new(
                    Interval::new(breakpoints[i], breakpoints[i + 1]),
                    Polynomial::new(c.clone()),
                )
            })
            .collect();
        Self::new(branches, gamma)
    }

    pub fn identity() -> Self {
        Self::from_breakpoints(&[0.0, 1.0], &[vec![0.0, 1.0]], 1.0).unwrap()
    }

    pub fn doubling() -> Self {
        Self::from_breakpoints(&[0.0, 0.5, 1.0], &[vec![0.0, 2.0], vec![0.0, 2.0]], 1.0).unwrap()
    }

    /// Rigid rotation `x ↦ x + beta` (slope one, test use).
    pub fn rotation(beta: f64) -> Self {
        Self::from_breakpoints(&[0.0, 1.0], &[vec![beta, 1.0]], 1.0).unwrap()
    }

    /// The three-branch fiber map `T_ω` of the demonstration family.
    ///
    /// Branches live on `[ω, ω+1/3)`, `[ω+1/3, ω+2/3)`, `[ω+2/3, ω+1)`:
    ///
    /// ```text
    /// 3u − 2.9u(u − 1/3)                 u = x − ω
    /// −3u + 1 − 2.9(u − 1/3)(u − 2/3)
    /// 7/3 (u − 2/3) + 2ω/9
    /// ```
    pub fn example_family(omega: f64) -> Self {
        let omega = frac(omega);
        let third = 1.0 / 3.0;
        let c = 2.9;
        let breaks = [omega, omega + third, omega + 2.0 * third, omega + 1.0];
        let coeffs = vec![
            // 3u − 2.9u(u − 1/3) = (3 + 2.9/3)u − 2.9u²
            vec![0.0, 3.0 + c * third, -c],
            // v = u − 1/3: −3v − 2.9v(v − 1/3) = (−3 + 2.9/3)v − 2.9v²
            vec![0.0, -3.0 + c * third, -c],
            // w = u − 2/3: 7/3 w + 2ω/9
            vec![2.0 * omega / 9.0, 7.0 / 3.0],
        ];
        Self::from_breakpoints(&breaks, &coeffs, 1.0).expect("example family is well formed")
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn lift(&self, x: f64) -> f64 {
        let s0 = self.branches[0].interval.start;
        if x < s0 {
            x + 1.0
        } else {
            x
        }
    }

    /// Branch index and lifted coordinate of a circle point.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let xl = self.lift(frac(x));
        let i = self
            .branches
            .partition_point(|b| b.interval.end <= xl)
            .min(self.branches.len() - 1);
        (i, xl)
    }

    /// `T(x)` reduced mod 1.
    pub fn eval(&self, x: f64) -> f64 {
        let (i, xl) = self.locate(x);
        frac(self.branches[i].value(xl))
    }

    pub fn is_breakpoint(&self, x: f64) -> bool {
        let x = frac(x);
        self.branches.iter().any(|b| frac(b.interval.start) == x)
    }

    /// `DT(x)`; an error on breakpoints where the derivative is two-valued.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        if self.is_breakpoint(x) {
            return Err(Error::BranchBoundary { x });
        }
        let (i, xl) = self.locate(x);
        Ok(self.branches[i].derivative(xl))
    }

    /// Left limit of `DT` at `x` (equal to `DT(x)` away from breakpoints).
    pub fn derivative_left(&self, x: f64) -> f64 {
        let x = frac(x);
        for (i, b) in self.branches.iter().enumerate() {
            if frac(b.interval.start) == x {
                let prev = &self.branches[(i + self.branches.len() - 1) % self.branches.len()];
                return prev.derivative(prev.interval.end);
            }
        }
        let (i, xl) = self.locate(x);
        self.branches[i].derivative(xl)
    }

    /// `T⁻¹(target)` as disjoint intervals inside `[0, 1)`.
    ///
    /// `target` must satisfy `0 ≤ start ≤ end ≤ 1`.
    pub fn preimage(&self, target: Interval) -> Result<Vec<Interval>> {
        let mut out = Vec::new();
        if target.is_empty() {
            return Ok(out);
        }
        for branch in &self.branches {
            let (lo, hi) = branch.image_bounds();
            let increasing = branch.is_increasing();
            let n_min = (lo - target.end).floor() as i64;
            let n_max = (hi - target.start).ceil() as i64;
            let mut pieces = Vec::new();
            for n in n_min..=n_max {
                let y0 = (target.start + n as f64).max(lo);
                let y1 = (target.end + n as f64).min(hi);
                if y1 <= y0 {
                    continue;
                }
                let (x0, x1) = if increasing {
                    (branch.invert(y0)?, branch.invert(y1)?)
                } else {
                    (branch.invert(y1)?, branch.invert(y0)?)
                };
                if x1 > x0 {
                    pieces.push(Interval::new(x0, x1));
                }
            }
            if !increasing {
                pieces.reverse();
            }
            for p in pieces {
                push_reduced(&mut out, p);
            }
        }
        Ok(out)
    }

    /// Check (M1)–(M3), monotonicity and sign consistency on a grid of each branch.
    pub fn validate(&self, grid_points_per_branch: usize, bounds: &MapBounds) -> ValidationReport {
        let n = grid_points_per_branch.max(2);
        let mut failures = Vec::new();
        let mut min_abs = f64::INFINITY;
        let mut norm = 0.0_f64;
        let mut monotone = true;
        for (i, b) in self.branches.iter().enumerate() {
            let xs: Vec<f64> = grid_points(b.interval, n).collect();
            let ders: Vec<f64> = xs.iter().map(|&x| b.derivative(x)).collect();
            let vals: Vec<f64> = xs.iter().map(|&x| b.value(x)).collect();
            let positive = ders[ders.len() / 2] > 0.0;
            if ders.iter().any(|&d| (d > 0.0) != positive || d == 0.0) {
                monotone = false;
                failures.push(format!("branch {i}: derivative changes sign"));
            }
            let strictly = vals
                .windows(2)
                .all(|w| if positive { w[1] > w[0] } else { w[1] < w[0] });
            if !strictly {
                monotone = false;
                failures.push(format!("branch {i}: values not monotone on the grid"));
            }
            min_abs = ders.iter().fold(min_abs, |m, d| m.min(d.abs()));
            norm = norm.max(b.c1_gamma_norm_on(b.interval, self.gamma, n));
        }
        if self.branches.len() > bounds.max_branches {
            failures.push(format!(
                "(M1) {} branches exceed bound {}",
                self.branches.len(),
                bounds.max_branches
            ));
        }
        if norm > bounds.d {
            failures.push(format!("(M2) C^(1+γ) norm {norm} exceeds bound {}", bounds.d));
        }
        if !(min_abs >= bounds.mu && min_abs > 1.0) {
            failures.push(format!(
                "(M3) min |DT| = {min_abs} below expansion bound {}",
                bounds.mu
            ));
        }
        ValidationReport {
            branch_count: self.branches.len(),
            min_abs_derivative: min_abs,
            c1_gamma_norm: norm,
            monotone,
            bounds: *bounds,
            failures,
        }
    }

    /// Same map with every branch value shifted by `+rho` (mod 1 on evaluation).
    pub fn translated(&self, rho: f64) -> PiecewiseMap {
        let branches = self
            .branches
            .iter()
            .map(|b| Branch::new(b.interval, b.value.shifted(rho)))
            .collect();
        PiecewiseMap {
            branches,
            gamma: self.gamma,
        }
    }

    /// Samples of `ℒf = Σ_i 1_{T(I_i)} (f / |DT|)∘ξ_i` at the midpoints `(l + 1/2)/n`.
    pub fn transfer_samples(&self, f: impl Fn(f64) -> f64 + Sync, n: usize) -> Result<Vec<f64>> {
        (0..n)
            .map(|l| {
                let y = (l as f64 + 0.5) / n as f64;
                let mut acc = 0.0;
                for b in &self.branches {
                    let (lo, hi) = b.image_bounds();
                    let n_min = (lo - y).ceil() as i64;
                    let n_max = (hi - y).floor() as i64;
                    for shift in n_min..=n_max {
                        let target = y + shift as f64;
                        if target < lo || target > hi {
                            continue;
                        }
                        let x = b.invert(target)?;
                        acc += f(frac(x)) / b.derivative(x).abs();
                    }
                }
                Ok(acc)
            })
            .collect()
    }
}

/// Split a lifted interval at integers and append its pieces inside `[0, 1)`.
fn push_reduced(out: &mut Vec<Interval>, piece: Interval) {
    let shift = piece.start.floor();
    let p = piece.shifted(-shift);
    if p.end > 1.0 {
        out.push(Interval::new(p.start, 1.0));
        out.push(Interval::new(0.0, p.end - 1.0));
    } else {
        out.push(p);
    }
}

/// The branch-matched distance `d_LY` between two maps.
///
/// Returns 1 when the branch counts differ or a pair of matched domains is disjoint. Otherwise
/// sums the largest C^{1+γ} norm of `S_i − T_i` on the common domain, the largest difference of
/// branch norms, and the largest Hausdorff distance between matched domains. Norms are grid
/// proxies with `grid_points_per_branch` points. Exactly symmetric in its arguments.
pub fn d_ly(s: &PiecewiseMap, t: &PiecewiseMap, grid_points_per_branch: usize) -> f64 {
    if canonical_le(s, t) {
        d_ly_ordered(s, t, grid_points_per_branch)
    } else {
        d_ly_ordered(t, s, grid_points_per_branch)
    }
}

fn canonical_le(s: &PiecewiseMap, t: &PiecewiseMap) -> bool {
    for (a, b) in s.branches.iter().zip(&t.branches) {
        let ka = [a.interval.start, a.interval.end];
        let kb = [b.interval.start, b.interval.end];
        for (x, y) in ka.iter().zip(&kb) {
            if x != y {
                return x < y;
            }
        }
        for (x, y) in a.value.coeffs.iter().zip(&b.value.coeffs) {
            if x != y {
                return x < y;
            }
        }
        if a.value.coeffs.len() != b.value.coeffs.len() {
            return a.value.coeffs.len() < b.value.coeffs.len();
        }
    }
    true
}

fn d_ly_ordered(s: &PiecewiseMap, t: &PiecewiseMap, n: usize) -> f64 {
    if s.branch_count() != t.branch_count() {
        return 1.0;
    }
    let gamma = t.gamma.min(s.gamma);
    let mut diff_norm = 0.0_f64;
    let mut norm_gap = 0.0_f64;
    let mut hausdorff = 0.0_f64;
    for (bs, bt) in s.branches.iter().zip(&t.branches) {
        // Align S's lift with T's.
        let shift = (bt.interval.start - bs.interval.start).round();
        let is = bs.interval.shifted(shift);
        let it = bt.interval;
        let common = is.intersect(&it);
        if common.is_empty() {
            return 1.0;
        }
        let mid = 0.5 * (common.start + common.end);
        let offset = (bs.value(mid - shift) - bt.value(mid)).round();
        let h = |x: f64| bs.value(x - shift) - bt.value(x) - offset;
        let dh = |x: f64| bs.derivative(x - shift) - bt.derivative(x);
        diff_norm = diff_norm.max(c1_gamma_norm(h, dh, common, gamma, n));
        let ns = bs.c1_gamma_norm_on(bs.interval, gamma, n);
        let nt = bt.c1_gamma_norm_on(bt.interval, gamma, n);
        norm_gap = norm_gap.max((ns - nt).abs());
        hausdorff = hausdorff.max(is.hausdorff(&it));
    }
    diff_norm + norm_gap + hausdorff
}

/// A measurable rule `ω ↦ T_ω`.
#[derive(Clone, Debug, PartialEq)]
pub enum MapFamily {
    Example,
    Doubling,
    Identity,
    Rotation { beta: f64 },
    CustomPolynomial {
        breakpoints: Vec<f64>,
        coefficients: Vec<Vec<f64>>,
        gamma: f64,
    },
    /// Static perturbation: every fiber map's values shifted by `rho`.
    Translated { base: Box<MapFamily>, rho: f64 },
}

impl MapFamily {
    pub fn at(&self, omega: f64) -> Result<PiecewiseMap> {
        Ok(match self {
            MapFamily::Example => PiecewiseMap::example_family(omega),
            MapFamily::Doubling => PiecewiseMap::doubling(),
            MapFamily::Identity => PiecewiseMap::identity(),
            MapFamily::Rotation { beta } => PiecewiseMap::rotation(*beta),
            MapFamily::CustomPolynomial {
                breakpoints,
                coefficients,
                gamma,
            } => PiecewiseMap::from_breakpoints(breakpoints, coefficients, *gamma)?,
            MapFamily::Translated { base, rho } => base.at(omega)?.translated(*rho),
        })
    }

    pub fn translated(&self, rho: f64) -> MapFamily {
        MapFamily::Translated {
            base: Box::new(self.clone()),
            rho,
        }
    }

    pub fn name(&self) -> String {
        match self {
            MapFamily::Example => "example35".into(),
            MapFamily::Doubling => "doubling".into(),
            MapFamily::Identity => "identity".into(),
            MapFamily::Rotation { .. } => "rotation".into(),
            MapFamily::CustomPolynomial { .. } => "custom-polynomial".into(),
            MapFamily::Translated { base, rho } => format!("{}+{rho}", base.name()),
        }
    }
}
