//! Measures entering the functionals, represented by their monotone
//! counting/distribution functions.
//!
//! A measure on the line carries the signed distribution with the two-branch
//! normalisation at the origin (`-ν([t,0))` for `t < 0`, `ν([0,t])` for
//! `t ≥ 0`); a radial measure carries the counting function `n(t)` on
//! `[0, ∞)`. Both interpolate either as steps (atoms) or linearly
//! (absolutely continuous with piecewise-constant density); mixed measures
//! are handled as a sum of one of each. Atoms sitting exactly at the origin
//! are never integrated: the functionals all live on the punctured plane.

mod grid;
mod sequence;

pub use grid::{ClusterMass, GridFunction, RieszMasses};
pub use sequence::{GenRule, RadialModel, Zero, ZeroSequence};

use crate::error::{Error, Result};
use crate::series::{self, IntegralOutcome, IntegralVerdict};
use crate::{exec, quad};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interp {
    Step,
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    Finite,
    Growing,
}

/// Validated monotone function given by breakpoints and values.
#[derive(Clone, Debug)]
struct Monotone {
    t: Vec<f64>,
    v: Vec<f64>,
    interp: Interp,
}

impl Monotone {
    fn new(t: Vec<f64>, v: Vec<f64>, interp: Interp) -> Result<Self> {
        if t.len() != v.len() || t.is_empty() {
            return Err(Error::InvalidMeasure(
                "breakpoints and values must be nonempty and of equal length".into(),
            ));
        }
        if t.iter().any(|x| !x.is_finite()) || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMeasure("non-finite breakpoint or value".into()));
        }
        if t.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMeasure("breakpoints must be strictly increasing".into()));
        }
        if v.windows(2).any(|w| w[0] > w[1] + 1e-15 * w[0].abs().max(1.0)) {
            return Err(Error::InvalidMeasure("values must be nondecreasing".into()));
        }
        Ok(Monotone { t, v, interp })
    }

    /// Right-continuous evaluation; constant beyond the ends.
    fn value_right(&self, x: f64) -> f64 {
        if x < self.t[0] {
            return self.v[0];
        }
        let n = self.t.len();
        if x >= self.t[n - 1] {
            return self.v[n - 1];
        }
        let idx = match self.t.partition_point(|&b| b <= x) {
            0 => 0,
            k => k - 1,
        };
        match self.interp {
            Interp::Step => self.v[idx],
            Interp::Linear => {
                let (t0, t1) = (self.t[idx], self.t[idx + 1]);
                let (v0, v1) = (self.v[idx], self.v[idx + 1]);
                v0 + (v1 - v0) * (x - t0) / (t1 - t0)
            }
        }
    }

    fn atoms(&self) -> Vec<(f64, f64)> {
        match self.interp {
            Interp::Step => self
                .t
                .iter()
                .zip(self.v.iter())
                .skip(1)
                .zip(self.v.iter())
                .map(|((&t, &v), &vp)| (t, v - vp))
                .filter(|&(_, w)| w > 0.0)
                .collect(),
            Interp::Linear => Vec::new(),
        }
    }

    /// Piecewise-constant density segments (linear interpolation only).
    fn segments(&self) -> Vec<(f64, f64, f64)> {
        match self.interp {
            Interp::Step => Vec::new(),
            Interp::Linear => self
                .t
                .windows(2)
                .zip(self.v.windows(2))
                .map(|(ts, vs)| (ts[0], ts[1], (vs[1] - vs[0]) / (ts[1] - ts[0])))
                .filter(|&(_, _, d)| d > 0.0)
                .collect(),
        }
    }

    fn last_slope(&self) -> f64 {
        let n = self.t.len();
        if n < 2 || self.interp == Interp::Step {
            return 0.0;
        }
        (self.v[n - 1] - self.v[n - 2]) / (self.t[n - 1] - self.t[n - 2])
    }
}

#[derive(Clone, Copy, Debug)]
pub struct StieltjesResult {
    pub value: f64,
    pub converged: bool,
    pub panels: u32,
}

fn stieltjes_against<F: Fn(f64) -> f64 + Sync>(
    mono: &Monotone,
    tail: Tail,
    f: &F,
    window: (f64, f64),
    splits: &[f64],
    rel_tol: f64,
    max_panels: u32,
) -> StieltjesResult {
    let (lo, hi) = window;
    let mut value_parts: Vec<f64> = Vec::new();
    let mut converged = true;
    let mut panels = 0;

    // Atoms inside the window, excluding any sitting exactly at the origin.
    let atom_terms: Vec<f64> = mono
        .atoms()
        .into_iter()
        .filter(|&(t, _)| t >= lo && t <= hi && t != 0.0)
        .map(|(t, w)| w * f(t))
        .collect();
    value_parts.push(exec::pairwise_sum(&atom_terms));

    // Density segments clipped to the window, plus the growing extension.
    let mut segs = mono.segments();
    let t_last = *mono.t.last().unwrap();
    if tail == Tail::Growing && hi > t_last {
        let slope = mono.last_slope();
        if slope > 0.0 {
            segs.push((t_last, hi, slope));
        }
    }
    let seg_results = exec::map_slice(&segs, |&(a, b, density)| {
        let a = a.max(lo);
        let b = b.min(hi);
        if a >= b {
            return quad::QuadResult::zero();
        }
        let mut r = quad::integrate(f, a, b, splits, rel_tol, max_panels);
        r.value *= density;
        r
    });
    for r in &seg_results {
        value_parts.push(r.value);
        converged &= r.converged;
        panels += r.panels;
    }

    StieltjesResult { value: exec::pairwise_sum(&value_parts), converged, panels }
}

/// Signed distribution function of a measure on the line.
#[derive(Clone, Debug)]
pub struct LineMeasure {
    mono: Monotone,
}

impl LineMeasure {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, interp: Interp) -> Result<Self> {
        let mono = Monotone::new(breakpoints, values, interp)?;
        for (&t, &v) in mono.t.iter().zip(mono.v.iter()) {
            if t < 0.0 && v > 1e-12 {
                return Err(Error::InvalidMeasure(format!(
                    "distribution must be <= 0 for t < 0, got {v} at {t}"
                )));
            }
            if t >= 0.0 && v < -1e-12 {
                return Err(Error::InvalidMeasure(format!(
                    "distribution must be >= 0 for t >= 0, got {v} at {t}"
                )));
            }
        }
        Ok(LineMeasure { mono })
    }

    /// Distribution of a finite set of point masses.
    pub fn from_point_masses(masses: &[(f64, f64)]) -> Result<Self> {
        for &(t, w) in masses {
            if !t.is_finite() {
                return Err(Error::InvalidMeasure(format!("non-finite location {t}")));
            }
            if w < 0.0 || !w.is_finite() {
                return Err(Error::NegativeWeight { location: t, weight: w });
            }
        }
        let mut sorted: Vec<(f64, f64)> = masses.iter().copied().filter(|&(_, w)| w > 0.0).collect();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        // merge duplicates
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
        for (t, w) in sorted {
            match merged.last_mut() {
                Some(last) if last.0 == t => last.1 += w,
                _ => merged.push((t, w)),
            }
        }
        if merged.is_empty() {
            return LineMeasure::new(vec![0.0], vec![0.0], Interp::Step);
        }
        let neg_total: f64 = merged.iter().filter(|&&(t, _)| t < 0.0).map(|&(_, w)| w).sum();
        let mut t = Vec::with_capacity(merged.len() + 1);
        let mut v = Vec::with_capacity(merged.len() + 1);
        let mut cum = -neg_total;
        // leading breakpoint keeps the pre-mass baseline explicit
        let first = merged[0].0;
        t.push(first - 1.0);
        v.push(cum);
        for (loc, w) in merged {
            cum += w;
            t.push(loc);
            v.push(cum);
        }
        let mono = Monotone::new(t, v, Interp::Step)?;
        Ok(LineMeasure { mono })
    }

    /// Distribution of a density, anchored at the origin, on piecewise-linear
    /// cells spanning `support`.
    pub fn from_density<F: Fn(f64) -> f64>(
        density: &F,
        support: (f64, f64),
        cells: usize,
        rel_tol: f64,
        max_panels: u32,
    ) -> Result<Self> {
        let (a, b) = support;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidMeasure("density support must be a finite interval".into()));
        }
        let cells = cells.max(1);
        let mut grid: Vec<f64> = (0..=cells).map(|i| a + (b - a) * i as f64 / cells as f64).collect();
        if a < 0.0 && b > 0.0 && !grid.contains(&0.0) {
            grid.push(0.0);
            grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
        }
        let cums: Vec<f64> = {
            let mut masses = Vec::with_capacity(grid.len() - 1);
            for w in grid.windows(2) {
                let r = quad::integrate(density, w[0], w[1], &[], rel_tol, max_panels);
                if r.value < -1e-12 {
                    return Err(Error::NegativeWeight { location: w[0], weight: r.value });
                }
                masses.push(r.value.max(0.0));
            }
            let anchor = grid.partition_point(|&t| t < 0.0);
            let mut v = vec![0.0; grid.len()];
            // cumulative from the origin outwards in both directions
            for i in anchor..grid.len() - 1 {
                v[i + 1] = v[i] + masses[i];
            }
            for i in (0..anchor).rev() {
                v[i] = v[i + 1] - masses[i];
            }
            v
        };
        let mono = Monotone::new(grid, cums, Interp::Linear)?;
        Ok(LineMeasure { mono })
    }

    /// Exact distribution `ν(t) = c·t` of a uniform density on `support`.
    pub fn uniform_density(c: f64, support: (f64, f64)) -> Result<Self> {
        let (a, b) = support;
        if c < 0.0 {
            return Err(Error::NegativeWeight { location: a, weight: c });
        }
        let mut t = vec![a, b];
        let mut v = vec![c * a, c * b];
        if a < 0.0 && b > 0.0 {
            t.insert(1, 0.0);
            v.insert(1, 0.0);
        }
        LineMeasure::new(t, v, Interp::Linear)
    }

    /// Two-branch evaluation: `-ν([t,0))` for `t < 0`, `ν([0,t])` for `t ≥ 0`.
    pub fn eval(&self, t: f64) -> f64 {
        let right = self.mono.value_right(t);
        if t >= 0.0 {
            return right;
        }
        // On the negative axis the atom at `t` itself belongs to [t, 0).
        let atom: f64 = self
            .mono
            .atoms()
            .into_iter()
            .filter(|&(loc, _)| loc == t)
            .map(|(_, w)| w)
            .sum();
        right - atom
    }

    /// ∫ f dν over `window`, which must cover `f_support`. Atoms exactly at
    /// the origin are excluded (the integrals live on ℝ∖{0}).
    pub fn stieltjes<F: Fn(f64) -> f64 + Sync>(
        &self,
        f: &F,
        f_support: (f64, f64),
        window: (f64, f64),
        splits: &[f64],
        rel_tol: f64,
        max_panels: u32,
    ) -> Result<StieltjesResult> {
        let slack = 1e-12 * (f_support.1 - f_support.0).abs().max(1.0);
        if window.0 > f_support.0 + slack || window.1 < f_support.1 - slack {
            return Err(Error::WindowCoverage {
                window_lo: window.0,
                window_hi: window.1,
                support_lo: f_support.0,
                support_hi: f_support.1,
            });
        }
        Ok(stieltjes_against(&self.mono, Tail::Finite, f, window, splits, rel_tol, max_panels))
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.mono.t
    }
    pub fn values(&self) -> &[f64] {
        &self.mono.v
    }
    pub fn interp(&self) -> Interp {
        self.mono.interp
    }
}

/// Counting function `n(t)` of a rotation-invariant measure.
#[derive(Clone, Debug)]
pub struct RadialMeasure {
    mono: Monotone,
    tail: Tail,
}

impl RadialMeasure {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, interp: Interp, tail: Tail) -> Result<Self> {
        if breakpoints.first().map_or(false, |&t| t < 0.0) {
            return Err(Error::InvalidMeasure("counting function lives on [0, inf)".into()));
        }
        if values.first().map_or(false, |&v| v < 0.0) {
            return Err(Error::InvalidMeasure("counting function must be nonnegative".into()));
        }
        if tail == Tail::Growing && interp == Interp::Step {
            return Err(Error::InvalidMeasure("a growing tail requires linear interpolation".into()));
        }
        let mono = Monotone::new(breakpoints, values, interp)?;
        Ok(RadialMeasure { mono, tail })
    }

    /// Counting function `n(t) = c·t` up to `t_max`, growing beyond.
    pub fn linear_counting(c: f64, t_max: f64) -> Result<Self> {
        RadialMeasure::new(vec![0.0, t_max], vec![0.0, c * t_max], Interp::Linear, Tail::Growing)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t_last = *self.mono.t.last().unwrap();
        if t > t_last && self.tail == Tail::Growing {
            let n = self.mono.v.last().unwrap();
            return n + self.mono.last_slope() * (t - t_last);
        }
        self.mono.value_right(t)
    }

    /// ∫ g dn over a finite window (the origin atom, if declared through
    /// `n(0) > 0`, never enters).
    pub fn stieltjes<G: Fn(f64) -> f64 + Sync>(
        &self,
        g: &G,
        g_support: (f64, f64),
        window: (f64, f64),
        splits: &[f64],
        rel_tol: f64,
        max_panels: u32,
    ) -> Result<StieltjesResult> {
        let slack = 1e-12 * (g_support.1 - g_support.0).abs().max(1.0);
        if window.0 > g_support.0 + slack || window.1 < g_support.1 - slack {
            return Err(Error::WindowCoverage {
                window_lo: window.0,
                window_hi: window.1,
                support_lo: g_support.0,
                support_hi: g_support.1,
            });
        }
        let window = (window.0.max(0.0), window.1);
        Ok(stieltjes_against(&self.mono, self.tail, g, window, splits, rel_tol, max_panels))
    }

    /// ∫_from^∞ g dn with the tail decided by the convergence driver.
    pub fn stieltjes_improper<G: Fn(f64) -> f64 + Sync>(
        &self,
        g: &G,
        from: f64,
        splits: &[f64],
        rel_tol: f64,
        max_panels: u32,
    ) -> IntegralOutcome {
        let t_last = *self.mono.t.last().unwrap();
        let finite_hi = t_last.max(from);
        let head = if finite_hi > from {
            stieltjes_against(&self.mono, Tail::Finite, g, (from.max(0.0), finite_hi), splits, rel_tol, max_panels)
        } else {
            StieltjesResult { value: 0.0, converged: true, panels: 0 }
        };
        match self.tail {
            Tail::Finite => IntegralOutcome {
                verdict: IntegralVerdict::Finite,
                value: head.value,
                upper_limit: finite_hi,
                blocks: 0,
                last_increment: 0.0,
                quad_fault: !head.converged,
            },
            Tail::Growing => {
                let slope = self.mono.last_slope();
                let start = finite_hi.max(1e-12);
                let tail = series::improper_integral(
                    |t| g(t) * slope,
                    start,
                    splits,
                    rel_tol,
                    max_panels,
                );
                IntegralOutcome {
                    verdict: tail.verdict,
                    value: head.value + tail.value,
                    upper_limit: tail.upper_limit,
                    blocks: tail.blocks,
                    last_increment: tail.last_increment,
                    quad_fault: tail.quad_fault || !head.converged,
                }
            }
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.mono.t
    }
    pub fn values(&self) -> &[f64] {
        &self.mono.v
    }
    pub fn interp(&self) -> Interp {
        self.mono.interp
    }
    pub fn tail(&self) -> Tail {
        self.tail
    }
}

/// Increasing radial profile `m(t)` with left-derivative access.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadialProfile {
    /// `m(t) = a·t^ρ + b`
    Power { a: f64, rho: f64, b: f64 },
    /// `m(t) = ln t`
    Log,
    /// piecewise-linear increasing samples
    Sampled { breakpoints: Vec<f64>, values: Vec<f64> },
}

impl RadialProfile {
    pub fn linear(sigma: f64) -> Self {
        RadialProfile::Power { a: sigma, rho: 1.0, b: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RadialProfile::Power { a, rho, .. } => {
                if *a <= 0.0 || *rho <= 0.0 {
                    return Err(Error::NonMonotone("power profile needs a > 0, rho > 0".into()));
                }
            }
            RadialProfile::Log => {}
            RadialProfile::Sampled { breakpoints, values } => {
                Monotone::new(breakpoints.clone(), values.clone(), Interp::Linear)?;
                if values.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::NonMonotone("sampled profile must be strictly increasing".into()));
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            RadialProfile::Power { a, rho, b } => a * t.powf(*rho) + b,
            RadialProfile::Log => t.ln(),
            RadialProfile::Sampled { breakpoints, values } => {
                let n = breakpoints.len();
                if t <= breakpoints[0] {
                    return values[0];
                }
                if t >= breakpoints[n - 1] {
                    let slope = (values[n - 1] - values[n - 2]) / (breakpoints[n - 1] - breakpoints[n - 2]);
                    return values[n - 1] + slope * (t - breakpoints[n - 1]);
                }
                let idx = breakpoints.partition_point(|&b| b <= t) - 1;
                let (t0, t1) = (breakpoints[idx], breakpoints[idx + 1]);
                let (v0, v1) = (values[idx], values[idx + 1]);
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// Left-hand derivative; analytic for closed forms, the slope of the
    /// segment ending at `t` for samples.
    pub fn left_derivative(&self, t: f64) -> f64 {
        match self {
            RadialProfile::Power { a, rho, .. } => a * rho * t.powf(rho - 1.0),
            RadialProfile::Log => 1.0 / t,
            RadialProfile::Sampled { breakpoints, values } => {
                let n = breakpoints.len();
                // segment whose right end is the first breakpoint >= t
                let idx = breakpoints.partition_point(|&b| b < t).clamp(1, n - 1);
                (values[idx] - values[idx - 1]) / (breakpoints[idx] - breakpoints[idx - 1])
            }
        }
    }

    /// Backward-difference estimate with halving until two successive values
    /// agree within `tol_deriv`. `t - h` must stay above `t_lo` at the
    /// coarsest step.
    pub fn left_derivative_numeric(&self, t: f64, t_lo: f64, h0: f64, tol_deriv: f64) -> Result<f64> {
        if t - h0 <= t_lo {
            return Err(Error::NonMonotone(format!(
                "backward step {h0} at {t} falls below the domain start {t_lo}"
            )));
        }
        let mut h = h0;
        let mut prev = (self.value(t) - self.value(t - h)) / h;
        for _ in 0..60 {
            h *= 0.5;
            let cur = (self.value(t) - self.value(t - h)) / h;
            if (cur - prev).abs() < tol_deriv {
                return Ok(cur);
            }
            prev = cur;
        }
        Ok(prev)
    }
}

/// Counting function `n(t) = t·m'_left(t)` of an increasing radial profile,
/// sampled on `count` breakpoints over `[t_lo, t_hi]`. Rejects profiles whose
/// `t·m'_left` fails to be nondecreasing on the samples.
pub fn counting_from_profile(
    profile: &RadialProfile,
    t_lo: f64,
    t_hi: f64,
    count: usize,
    tail: Tail,
) -> Result<RadialMeasure> {
    profile.validate()?;
    if !(t_lo >= 0.0 && t_hi > t_lo) {
        return Err(Error::InvalidMeasure("profile range must satisfy 0 <= t_lo < t_hi".into()));
    }
    let count = count.max(2);
    let ts: Vec<f64> = if t_lo > 0.0 {
        let (llo, lhi) = (t_lo.ln(), t_hi.ln());
        (0..count).map(|i| (llo + (lhi - llo) * i as f64 / (count - 1) as f64).exp()).collect()
    } else {
        (0..count)
            .map(|i| {
                let s = i as f64 / (count - 1) as f64;
                t_lo + (t_hi - t_lo) * s * s
            })
            .collect()
    };
    let ns: Vec<f64> = ts.iter().map(|&t| if t == 0.0 { 0.0 } else { t * profile.left_derivative(t) }).collect();
    for w in ns.windows(2) {
        if w[1] < w[0] - 1e-9 * w[0].abs().max(1.0) {
            return Err(Error::NonMonotone(format!(
                "t * m'_left(t) decreases from {} to {}",
                w[0], w[1]
            )));
        }
    }
    // enforce exact monotonicity after the check
    let mut ns_fixed = ns.clone();
    for i in 1..ns_fixed.len() {
        if ns_fixed[i] < ns_fixed[i - 1] {
            ns_fixed[i] = ns_fixed[i - 1];
        }
    }
    let mut ts = ts;
    dedup_breakpoints(&mut ts, &mut ns_fixed);
    RadialMeasure::new(ts, ns_fixed, Interp::Linear, tail)
}

fn dedup_breakpoints(t: &mut Vec<f64>, v: &mut Vec<f64>) {
    let mut i = 1;
    while i < t.len() {
        if t[i] <= t[i - 1] {
            t.remove(i);
            v.remove(i);
        } else {
            i += 1;
        }
    }
}

// --- serialised form -------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureRepr {
    kind: String,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    interp: Interp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<Tail>,
}

impl Serialize for LineMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureRepr {
            kind: "line".into(),
            breakpoints: self.mono.t.clone(),
            values: self.mono.v.clone(),
            interp: self.mono.interp,
            tail: None,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LineMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MeasureRepr::deserialize(d)?;
        if repr.kind != "line" {
            return Err(serde::de::Error::custom(format!("expected kind \"line\", got {:?}", repr.kind)));
        }
        LineMeasure::new(repr.breakpoints, repr.values, repr.interp).map_err(serde::de::Error::custom)
    }
}

impl Serialize for RadialMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureRepr {
            kind: "radial".into(),
            breakpoints: self.mono.t.clone(),
            values: self.mono.v.clone(),
            interp: self.mono.interp,
            tail: Some(self.tail),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RadialMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MeasureRepr::deserialize(d)?;
        if repr.kind != "radial" {
            return Err(serde::de::Error::custom(format!("expected kind \"radial\", got {:?}", repr.kind)));
        }
        RadialMeasure::new(repr.breakpoints, repr.values, repr.interp, repr.tail.unwrap_or(Tail::Finite))
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const TOL: f64 = 1e-9;
    const CAP: u32 = 1 << 20;

    #[test]
    fn point_mass_distribution_two_branch() {
        let nu = LineMeasure::from_point_masses(&[(-1.0, 1.0), (1.0, 1.0)]).unwrap();
        assert_abs_diff_eq!(nu.eval(-1.0), -1.0);
        assert_abs_diff_eq!(nu.eval(-0.5), 0.0);
        assert_abs_diff_eq!(nu.eval(1.0), 1.0);
        assert_abs_diff_eq!(nu.eval(-2.0), -1.0);
        assert_abs_diff_eq!(nu.eval(0.5), 0.0);
    }

    #[test]
    fn empty_mass_list_is_the_zero_measure() {
        let nu = LineMeasure::from_point_masses(&[]).unwrap();
        assert_eq!(nu.eval(-3.0), 0.0);
        assert_eq!(nu.eval(4.0), 0.0);
    }

    #[test]
    fn negative_weight_rejected() {
        assert!(LineMeasure::from_point_masses(&[(0.5, -1.0)]).is_err());
    }

    #[test]
    fn uniform_density_matches_identity() {
        let nu = LineMeasure::uniform_density(1.0, (-50.0, 50.0)).unwrap();
        for t in [-20.0, -3.5, 0.0, 0.25, 17.0] {
            assert_abs_diff_eq!(nu.eval(t), t, epsilon = 1e-12);
        }
    }

    #[test]
    fn density_constructor_agrees_with_uniform() {
        let nu = LineMeasure::from_density(&|_| 1.0, (-8.0, 8.0), 32, TOL, CAP).unwrap();
        for t in [-7.5, -1.0, 2.25, 6.0] {
            assert_abs_diff_eq!(nu.eval(t), t, epsilon = 1e-9);
        }
    }

    #[test]
    fn stieltjes_of_indicator_is_the_mass() {
        let nu = LineMeasure::uniform_density(1.0, (-10.0, 10.0)).unwrap();
        let r = nu.stieltjes(&|_| 1.0, (0.0, 5.0), (0.0, 5.0), &[], TOL, CAP).unwrap();
        assert_abs_diff_eq!(r.value, 5.0, epsilon = 1e-8);
    }

    #[test]
    fn stieltjes_log_cusp_closed_form() {
        // ∫_{-R}^{R} log(R/|x|) dx = 2R with R = 10
        let nu = LineMeasure::uniform_density(1.0, (-10.0, 10.0)).unwrap();
        let f = |x: f64| if x == 0.0 { f64::INFINITY } else { (10.0 / x.abs()).ln().max(0.0) };
        let r = nu.stieltjes(&f, (-10.0, 10.0), (-10.0, 10.0), &[0.0], TOL, CAP).unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(r.value, 20.0, epsilon = 1e-6);
    }

    #[test]
    fn stieltjes_zero_function() {
        let nu = LineMeasure::uniform_density(1.0, (-10.0, 10.0)).unwrap();
        let r = nu.stieltjes(&|_| 0.0, (-1.0, 1.0), (-2.0, 2.0), &[], TOL, CAP).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn window_must_cover_support() {
        let nu = LineMeasure::uniform_density(1.0, (-10.0, 10.0)).unwrap();
        let err = nu.stieltjes(&|_| 1.0, (-5.0, 5.0), (-1.0, 5.0), &[], TOL, CAP);
        assert!(matches!(err, Err(Error::WindowCoverage { .. })));
    }

    #[test]
    fn stieltjes_point_masses_exact() {
        let nu = LineMeasure::from_point_masses(&[(-2.0, 1.0), (0.5, 2.0), (3.0, 0.25)]).unwrap();
        let f = |x: f64| x * x + 1.0;
        let r = nu.stieltjes(&f, (-3.0, 4.0), (-3.0, 4.0), &[], TOL, CAP).unwrap();
        let expect = 1.0 * f(-2.0) + 2.0 * f(0.5) + 0.25 * f(3.0);
        assert_abs_diff_eq!(r.value, expect, epsilon = 1e-13);
    }

    #[test]
    fn origin_atom_is_excluded() {
        let nu = LineMeasure::from_point_masses(&[(0.0, 3.0), (1.0, 1.0)]).unwrap();
        let r = nu.stieltjes(&|_| 1.0, (-1.0, 2.0), (-1.0, 2.0), &[], TOL, CAP).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn radial_indicator_mass() {
        let nu = RadialMeasure::linear_counting(1.0, 10.0).unwrap();
        let r = nu.stieltjes(&|_| 1.0, (0.0, 3.0), (0.0, 3.0), &[], TOL, CAP).unwrap();
        assert_abs_diff_eq!(r.value, 3.0, epsilon = 1e-9);
    }

    #[test]
    fn radial_improper_inverse_square() {
        // ∫_1^∞ t^{-2} dn with n(t) = t equals 1
        let nu = RadialMeasure::linear_counting(1.0, 4.0).unwrap();
        let out = nu.stieltjes_improper(&|t| t.powi(-2), 1.0, &[], TOL, CAP);
        assert_eq!(out.verdict, IntegralVerdict::Finite);
        assert_abs_diff_eq!(out.value, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn radial_log_cusp_closed_form() {
        // ∫_0^R log(R/t) dn with n(t)=t equals R, R = 10
        let nu = RadialMeasure::linear_counting(1.0, 16.0).unwrap();
        let g = |t: f64| if t == 0.0 { f64::INFINITY } else { (10.0 / t).ln().max(0.0) };
        let r = nu.stieltjes(&g, (0.0, 10.0), (0.0, 10.0), &[0.0], TOL, CAP).unwrap();
        assert_abs_diff_eq!(r.value, 10.0, epsilon = 1e-6);
    }

    #[test]
    fn counting_from_log_profile_is_unit() {
        let nu = counting_from_profile(&RadialProfile::Log, 0.1, 50.0, 64, Tail::Finite).unwrap();
        for t in [0.2, 1.0, 7.0, 40.0] {
            assert_abs_diff_eq!(nu.eval(t), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn counting_from_linear_profile() {
        let p = RadialProfile::linear(std::f64::consts::PI);
        let nu = counting_from_profile(&p, 0.0, 32.0, 128, Tail::Growing).unwrap();
        for t in [0.5, 4.0, 31.0, 100.0] {
            assert_abs_diff_eq!(nu.eval(t), std::f64::consts::PI * t, epsilon = 1e-8);
        }
    }

    #[test]
    fn counting_from_quadratic_profile() {
        let p = RadialProfile::Power { a: 1.0, rho: 2.0, b: 0.0 };
        let nu = counting_from_profile(&p, 0.0, 8.0, 512, Tail::Growing).unwrap();
        // n(t) = 2 t^2 exactly at breakpoints
        for t in nu.breakpoints().iter().copied().filter(|&t| t > 0.0).take(20) {
            assert_abs_diff_eq!(nu.eval(t), 2.0 * t * t, epsilon = 1e-10);
        }
    }

    #[test]
    fn decreasing_t_mprime_rejected() {
        // m(t) = sampled concave kink where t·m' drops
        let p = RadialProfile::Sampled {
            breakpoints: vec![1.0, 2.0, 4.0],
            values: vec![0.0, 10.0, 10.5],
        };
        assert!(counting_from_profile(&p, 1.0, 4.0, 16, Tail::Finite).is_err());
    }

    #[test]
    fn left_derivative_examples() {
        let lin = RadialProfile::linear(std::f64::consts::PI);
        assert_abs_diff_eq!(lin.left_derivative(3.0), std::f64::consts::PI);
        let sq = RadialProfile::Power { a: 1.0, rho: 2.0, b: 0.0 };
        let num = sq.left_derivative_numeric(3.0, 0.0, 0.5, 1e-6).unwrap();
        assert_abs_diff_eq!(num, 6.0, epsilon = 1e-5);
        // two-slope sample: the left slope at the kink wins
        let kinked = RadialProfile::Sampled {
            breakpoints: vec![0.0, 1.0, 2.0],
            values: vec![0.0, 1.0, 3.0],
        };
        assert_abs_diff_eq!(kinked.left_derivative(1.0), 1.0);
        assert_abs_diff_eq!(kinked.left_derivative(1.5), 2.0);
    }

    #[test]
    fn serde_round_trip() {
        let nu = RadialMeasure::linear_counting(2.0, 3.0).unwrap();
        let s = serde_json::to_string(&nu).unwrap();
        assert!(s.contains("\"kind\":\"radial\""));
        let back: RadialMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back.eval(2.0), nu.eval(2.0));

        let lm = LineMeasure::from_point_masses(&[(1.0, 1.0)]).unwrap();
        let s = serde_json::to_string(&lm).unwrap();
        assert!(s.contains("\"kind\":\"line\""));
        let back: LineMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back.eval(1.5), 1.0);
    }
}
