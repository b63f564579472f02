//! Jensen potentials: nonnegative functions on the punctured plane squeezed
//! under `log⁺(R_V/|z|)`, with sampled membership verification.
//!
//! Two families are exposed. `RadialLog` combinations are members by
//! construction whenever the weights sum to at most one. `AveragedGreen`
//! smooths a disk Green pole over a ring; it is subharmonic everywhere off
//! that ring, so the default verification circles are placed clear of it and
//! the report records what was actually sampled.

use crate::error::{Error, Result};
use crate::quad;
use crate::Tolerances;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Green function of the disk `D(0, radius)`, extended by zero outside.
pub fn green_disk(z: Complex64, w: Complex64, radius: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::NonPositiveRadius(radius));
    }
    if w.norm() >= radius {
        return Err(Error::PoleOutsideDisk { w: format!("{w}"), radius });
    }
    if z.norm() >= radius {
        return Ok(0.0);
    }
    if z == w {
        return Ok(f64::INFINITY);
    }
    let num = Complex64::new(radius * radius, 0.0) - z * w.conj();
    Ok(num.norm().ln() - (radius * (z - w).norm()).ln())
}

#[derive(Clone, Debug)]
pub enum JensenPotential {
    /// `V(z) = Σ λ_j · log⁺(R_j / |z|)`
    RadialLog { terms: Vec<(f64, f64)>, r_v: f64 },
    /// `V(z) = λ · mean_α g_{D(R)}(z, w + ρ e^{iα})`, zero outside `D(R)`
    AveragedGreen {
        disk_radius: f64,
        center: Complex64,
        ring_radius: f64,
        lambda: f64,
        r_v: f64,
    },
}

impl JensenPotential {
    pub fn radial_log(terms: Vec<(f64, f64)>) -> Result<Self> {
        let r_v = terms.iter().fold(0.0f64, |a, &(_, r)| a.max(r));
        Self::radial_log_with_bound(terms, r_v)
    }

    pub fn radial_log_with_bound(terms: Vec<(f64, f64)>, r_v: f64) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidPotential("at least one (λ, R) term".into()));
        }
        for &(l, r) in &terms {
            if !(l >= 0.0) || !l.is_finite() {
                return Err(Error::InvalidPotential(format!("weight must be >= 0, got {l}")));
            }
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::InvalidPotential(format!("radius must be > 0, got {r}")));
            }
            if r_v < r {
                return Err(Error::InvalidPotential(format!(
                    "declared bound radius {r_v} is below a term radius {r}"
                )));
            }
        }
        Ok(JensenPotential::RadialLog { terms, r_v })
    }

    pub fn averaged_green(
        disk_radius: f64,
        center: Complex64,
        ring_radius: f64,
        lambda: f64,
        r_v: f64,
    ) -> Result<Self> {
        if !(disk_radius > 0.0) {
            return Err(Error::NonPositiveRadius(disk_radius));
        }
        if center == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidPotential("ring center must avoid the origin".into()));
        }
        if center.norm() >= disk_radius {
            return Err(Error::PoleOutsideDisk { w: format!("{center}"), radius: disk_radius });
        }
        let clearance = disk_radius - center.norm();
        if !(ring_radius > 0.0 && ring_radius < clearance) {
            return Err(Error::InvalidPotential(format!(
                "ring radius must lie in (0, {clearance}), got {ring_radius}"
            )));
        }
        if !(lambda > 0.0) {
            return Err(Error::InvalidPotential("weight must be positive".into()));
        }
        if r_v < disk_radius {
            return Err(Error::InvalidPotential(
                "declared bound radius must dominate the disk radius".into(),
            ));
        }
        Ok(JensenPotential::AveragedGreen { disk_radius, center, ring_radius, lambda, r_v })
    }

    /// Radius beyond which the potential vanishes identically.
    pub fn bound_radius(&self) -> f64 {
        match self {
            JensenPotential::RadialLog { r_v, .. } => *r_v,
            JensenPotential::AveragedGreen { r_v, .. } => *r_v,
        }
    }

    pub fn is_radial(&self) -> bool {
        matches!(self, JensenPotential::RadialLog { .. })
    }

    /// Evaluate at `z ≠ 0`.
    pub fn eval(&self, z: Complex64, tol: &Tolerances) -> Result<f64> {
        if z == Complex64::new(0.0, 0.0) {
            return Err(Error::EvalAtOrigin);
        }
        match self {
            JensenPotential::RadialLog { terms, .. } => Ok(Self::radial_value(terms, z.norm())),
            JensenPotential::AveragedGreen { disk_radius, center, ring_radius, lambda, .. } => {
                if z.norm() >= *disk_radius {
                    return Ok(0.0);
                }
                let mean = quad::periodic_mean(
                    &|alpha| {
                        let zeta = center + Complex64::from_polar(*ring_radius, alpha);
                        green_disk(z, zeta, *disk_radius).unwrap_or(f64::INFINITY)
                    },
                    tol.tol_quad,
                    1 << 14,
                );
                Ok(lambda * mean.value)
            }
        }
    }

    fn radial_value(terms: &[(f64, f64)], t: f64) -> f64 {
        terms
            .iter()
            .map(|&(l, r)| if t < r { l * (r / t).ln() } else { 0.0 })
            .sum()
    }

    /// Non-subharmonic circles of the variant (the averaging ring).
    fn singular_rings(&self) -> Vec<(Complex64, f64)> {
        match self {
            JensenPotential::RadialLog { .. } => Vec::new(),
            JensenPotential::AveragedGreen { center, ring_radius, .. } => {
                vec![(*center, *ring_radius)]
            }
        }
    }

    /// Default evaluation grid: log-spaced moduli up to slightly past the
    /// bound radius, several rays.
    pub fn default_grid(&self) -> Vec<Complex64> {
        let r_v = self.bound_radius();
        let mut grid = Vec::new();
        let n_rad = 28;
        let n_ang = 12;
        for i in 0..n_rad {
            let t = r_v * 10f64.powf(-3.0 + 3.08 * i as f64 / (n_rad - 1) as f64);
            for j in 0..n_ang {
                let theta = std::f64::consts::TAU * (j as f64 + 0.37) / n_ang as f64;
                grid.push(Complex64::from_polar(t, theta));
            }
        }
        grid
    }

    /// Default sub-mean-value circles: 32 circles with log-spaced center
    /// moduli; each radius stays under half the center modulus (the disk must
    /// avoid the origin) and clear of the variant's singular rings.
    pub fn default_circles(&self) -> Vec<(Complex64, f64)> {
        let r_v = self.bound_radius();
        let rings = self.singular_rings();
        let mut out = Vec::new();
        for i in 0..8 {
            let t = r_v * 10f64.powf(-1.7 + 1.75 * i as f64 / 7.0);
            for j in 0..4 {
                let theta = std::f64::consts::TAU * (j as f64 + 0.23) / 4.0;
                let c = Complex64::from_polar(t, theta);
                let mut radius = 0.45 * t;
                for &(rc, rr) in &rings {
                    let d = ((c - rc).norm() - rr).abs();
                    radius = radius.min(0.8 * d);
                }
                if radius > 1e-9 * r_v {
                    out.push((c, radius));
                }
            }
        }
        out
    }
}

/// Worst sampled violations of the two-sided bound and the sub-mean-value
/// inequality.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JensenMembership {
    pub worst_lower: f64,
    pub worst_upper: f64,
    pub worst_submean: f64,
    pub skipped_circles: u32,
    pub tol_member: f64,
    pub pass: bool,
}

impl JensenPotential {
    /// Sampled membership check: `0 ≤ V(z) ≤ log⁺(R_V/|z|)` on the grid and
    /// `V(c) ≤ circle mean` on the supplied circles. Circles whose disk
    /// reaches the origin are skipped with a count (the inequality is only a
    /// valid test on disks inside the punctured plane).
    pub fn verify_membership(
        &self,
        grid: &[Complex64],
        circles: &[(Complex64, f64)],
        tol: &Tolerances,
    ) -> JensenMembership {
        let r_v = self.bound_radius();
        let mut worst_lower = 0.0f64;
        let mut worst_upper = 0.0f64;
        for &z in grid {
            let v = match self.eval(z, tol) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let bound = (r_v / z.norm()).ln().max(0.0);
            worst_lower = worst_lower.max(-v);
            worst_upper = worst_upper.max(v - bound);
        }

        let mut worst_submean = 0.0f64;
        let mut skipped = 0u32;
        let defects = crate::exec::map_slice(circles, |&(c, s)| {
            if s >= c.norm() || s <= 0.0 {
                return f64::NAN; // disk touches the origin: not a valid test
            }
            let vc = match self.eval(c, tol) {
                Ok(v) => v,
                Err(_) => return f64::NAN,
            };
            let mean = quad::periodic_mean(
                &|theta| {
                    let z = c + Complex64::from_polar(s, theta);
                    if z.norm() >= r_v {
                        0.0
                    } else {
                        self.eval(z, tol).unwrap_or(0.0)
                    }
                },
                tol.tol_quad.max(1e-10),
                1 << 12,
            );
            vc - mean.value
        });
        for d in defects {
            if d.is_nan() {
                skipped += 1;
            } else {
                worst_submean = worst_submean.max(d);
            }
        }

        let pass = worst_lower <= tol.tol_member
            && worst_upper <= tol.tol_member
            && worst_submean <= tol.tol_member;
        JensenMembership {
            worst_lower,
            worst_upper,
            worst_submean,
            skipped_circles: skipped,
            tol_member: tol.tol_member,
            pass,
        }
    }

    /// Gate used by the functionals: default samples, error on failure.
    pub fn verified(&self, tol: &Tolerances) -> Result<VerifiedPotential<'_>> {
        let report = self.verify_membership(&self.default_grid(), &self.default_circles(), tol);
        if !report.pass {
            return Err(Error::MembershipRejected(format!(
                "lower {:.3e}, upper {:.3e}, submean {:.3e} against tol {:.1e}",
                report.worst_lower, report.worst_upper, report.worst_submean, tol.tol_member
            )));
        }
        Ok(VerifiedPotential { potential: self, report })
    }
}

/// A potential that passed the membership gate, with its report attached.
#[derive(Clone, Debug)]
pub struct VerifiedPotential<'a> {
    pub potential: &'a JensenPotential,
    pub report: JensenMembership,
}

// --- serialised form -------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
enum PotentialRepr {
    RadialLog {
        terms: Vec<(f64, f64)>,
        #[serde(default, rename = "R_V", skip_serializing_if = "Option::is_none")]
        r_v: Option<f64>,
    },
    AvgGreen {
        #[serde(rename = "R")]
        disk_radius: f64,
        w: [f64; 2],
        rho: f64,
        lambda: f64,
        #[serde(default, rename = "R_V", skip_serializing_if = "Option::is_none")]
        r_v: Option<f64>,
    },
}

impl Serialize for JensenPotential {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            JensenPotential::RadialLog { terms, r_v } => PotentialRepr::RadialLog {
                terms: terms.clone(),
                r_v: Some(*r_v),
            }
            .serialize(s),
            JensenPotential::AveragedGreen { disk_radius, center, ring_radius, lambda, r_v } => {
                PotentialRepr::AvgGreen {
                    disk_radius: *disk_radius,
                    w: [center.re, center.im],
                    rho: *ring_radius,
                    lambda: *lambda,
                    r_v: Some(*r_v),
                }
                .serialize(s)
            }
        }
    }
}

impl<'de> Deserialize<'de> for JensenPotential {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match PotentialRepr::deserialize(d)? {
            PotentialRepr::RadialLog { terms, r_v } => match r_v {
                Some(rv) => JensenPotential::radial_log_with_bound(terms, rv),
                None => JensenPotential::radial_log(terms),
            }
            .map_err(serde::de::Error::custom),
            PotentialRepr::AvgGreen { disk_radius, w, rho, lambda, r_v } => {
                JensenPotential::averaged_green(
                    disk_radius,
                    Complex64::new(w[0], w[1]),
                    rho,
                    lambda,
                    r_v.unwrap_or(disk_radius),
                )
                .map_err(serde::de::Error::custom)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn green_disk_values() {
        let w = Complex64::new(0.5, 0.3);
        let r = 2.0;
        let at0 = green_disk(Complex64::new(0.0, 0.0), w, r).unwrap();
        assert_abs_diff_eq!(at0, (r / w.norm()).ln(), epsilon = 1e-14);
        let boundary = green_disk(Complex64::from_polar(r, 1.1), w, r).unwrap();
        assert_eq!(boundary, 0.0);
        assert!(green_disk(Complex64::new(0.1, 0.0), Complex64::new(3.0, 0.0), r).is_err());
    }

    #[test]
    fn green_disk_symmetry() {
        let r = 3.0;
        for i in 0..10 {
            for j in 0..10 {
                let z = Complex64::from_polar(0.29 * (i as f64 + 0.5), 0.63 * i as f64);
                let w = Complex64::from_polar(0.27 * (j as f64 + 0.5), 1.17 * j as f64 + 0.4);
                if z == w || z.norm() >= r || w.norm() >= r {
                    continue;
                }
                let a = green_disk(z, w, r).unwrap();
                let b = green_disk(w, z, r).unwrap();
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn radial_log_eval() {
        let v = JensenPotential::radial_log(vec![(1.0, 4.0)]).unwrap();
        assert_abs_diff_eq!(v.eval(Complex64::new(4.0, 0.0), &tol()).unwrap(), 0.0);
        let at = v.eval(Complex64::new(4.0 / std::f64::consts::E, 0.0), &tol()).unwrap();
        assert_abs_diff_eq!(at, 1.0, epsilon = 1e-14);
        assert!(v.eval(Complex64::new(0.0, 0.0), &tol()).is_err());
    }

    #[test]
    fn averaged_green_near_origin_mean_value() {
        // ring around w = 1 with ρ = 1/2 inside D(2): near the origin the
        // mean over the ring of log(R/|ζ|) collapses to log 2
        let v = JensenPotential::averaged_green(2.0, Complex64::new(1.0, 0.0), 0.5, 1.0, 4.0)
            .unwrap();
        let got = v.eval(Complex64::new(1e-9, 0.0), &tol()).unwrap();
        assert_abs_diff_eq!(got, 2.0f64.ln(), epsilon = 1e-7);
    }

    #[test]
    fn averaged_green_vanishes_outside() {
        let v = JensenPotential::averaged_green(2.0, Complex64::new(1.0, 0.0), 0.5, 1.0, 4.0)
            .unwrap();
        assert_eq!(v.eval(Complex64::new(2.0, 0.1), &tol()).unwrap(), 0.0);
        assert_eq!(v.eval(Complex64::new(5.0, 0.0), &tol()).unwrap(), 0.0);
    }

    #[test]
    fn radial_log_membership_passes() {
        let v = JensenPotential::radial_log(vec![(0.5, 1.0), (0.5, 4.0)]).unwrap();
        let rep = v.verify_membership(&v.default_grid(), &v.default_circles(), &tol());
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn overweight_radial_log_fails_upper_bound() {
        let v = JensenPotential::radial_log(vec![(1.5, 2.0)]).unwrap();
        let rep = v.verify_membership(&v.default_grid(), &v.default_circles(), &tol());
        assert!(!rep.pass);
        assert!(rep.worst_upper > 1.0);
        assert!(v.verified(&tol()).is_err());
    }

    #[test]
    fn averaged_green_membership_with_generous_bound() {
        // off-center rings need a declared bound radius above the disk; with
        // R_V = 2R this instance passes every sampled inequality
        let v = JensenPotential::averaged_green(2.0, Complex64::new(1.0, 0.0), 0.5, 1.0, 4.0)
            .unwrap();
        let rep = v.verify_membership(&v.default_grid(), &v.default_circles(), &tol());
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn averaged_green_tight_bound_fails() {
        // with R_V = R the upper bound is breached between the ring and the
        // boundary on the center's side
        let v = JensenPotential::averaged_green(2.0, Complex64::new(1.0, 0.0), 0.5, 1.0, 2.0)
            .unwrap();
        let rep = v.verify_membership(&v.default_grid(), &v.default_circles(), &tol());
        assert!(!rep.pass);
        assert!(rep.worst_upper > 0.1, "{rep:?}");
    }

    #[test]
    fn averaged_green_overweight_fails() {
        let v = JensenPotential::averaged_green(2.0, Complex64::new(1.0, 0.0), 0.5, 40.0, 4.0)
            .unwrap();
        let rep = v.verify_membership(&v.default_grid(), &v.default_circles(), &tol());
        assert!(!rep.pass);
    }

    #[test]
    fn convex_mixture_of_members_passes() {
        let a = JensenPotential::radial_log(vec![(0.8, 2.0)]).unwrap();
        let b = JensenPotential::radial_log(vec![(0.6, 8.0)]).unwrap();
        let (ta, tb) = (match a { JensenPotential::RadialLog { ref terms, .. } => terms.clone(), _ => unreachable!() },
                        match b { JensenPotential::RadialLog { ref terms, .. } => terms.clone(), _ => unreachable!() });
        let mixed: Vec<(f64, f64)> = ta
            .iter()
            .map(|&(l, r)| (0.5 * l, r))
            .chain(tb.iter().map(|&(l, r)| (0.5 * l, r)))
            .collect();
        let m = JensenPotential::radial_log(mixed).unwrap();
        assert!(m.verified(&tol()).is_ok());
    }

    #[test]
    fn monotone_in_term_radius() {
        let z = Complex64::new(0.7, 0.4);
        let mut prev = 0.0;
        for r in [1.0, 2.0, 4.0, 8.0] {
            let v = JensenPotential::radial_log(vec![(0.9, r)]).unwrap();
            let val = v.eval(z, &tol()).unwrap();
            assert!(val >= prev);
            prev = val;
        }
    }

    #[test]
    fn serde_round_trip() {
        let v = JensenPotential::radial_log(vec![(0.5, 1.0), (0.5, 4.0)]).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains("radial_log"));
        let back: JensenPotential = serde_json::from_str(&s).unwrap();
        assert_eq!(back.bound_radius(), 4.0);

        let g = JensenPotential::averaged_green(2.0, Complex64::new(1.0, 0.0), 0.5, 1.0, 4.0)
            .unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("avg_green"));
        let back: JensenPotential = serde_json::from_str(&s).unwrap();
        assert_eq!(back.bound_radius(), 4.0);
    }
}
