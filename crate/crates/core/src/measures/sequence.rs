//! Candidate zero sequences: finite point lists and deterministic generators.

use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zero {
    pub z: Complex64,
    pub mult: u32,
}

/// Generator rules. All of them produce real points, enumerated in
/// nondecreasing modulus, and reproducible for a fixed prefix length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GenRule {
    /// ±1, ±2, ±3, …
    Integers,
    /// ±1/2, ±3/2, ±5/2, …
    HalfIntegers,
    /// k + shift for all k ∈ ℤ, with shift ∈ (0, 1)
    IntegersShifted { shift: f64 },
    /// k^gamma for k = 1, 2, … on the positive axis
    Power { gamma: f64 },
}

/// Continuous radial model of a generator: the m-th modulus with its weight,
/// plus the monotone interpolation used for tail bounds.
#[derive(Clone, Copy, Debug)]
pub enum RadialModel {
    Arithmetic { start: f64, step: f64, weight: f64 },
    PowerLaw { gamma: f64, weight: f64 },
}

impl RadialModel {
    pub fn modulus(&self, m: u64) -> f64 {
        self.modulus_cont(m as f64)
    }

    pub fn modulus_cont(&self, x: f64) -> f64 {
        match *self {
            RadialModel::Arithmetic { start, step, .. } => start + step * (x - 1.0),
            RadialModel::PowerLaw { gamma, .. } => x.powf(gamma),
        }
    }

    pub fn weight(&self) -> f64 {
        match *self {
            RadialModel::Arithmetic { weight, .. } => weight,
            RadialModel::PowerLaw { weight, .. } => weight,
        }
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Explicit(Vec<Zero>),
    Generator { rule: GenRule, mult: u32 },
}

/// A candidate zero set: points in ℂ∖{0} with multiplicities.
#[derive(Clone, Debug)]
pub struct ZeroSequence {
    kind: Kind,
}

impl ZeroSequence {
    pub fn explicit(points: Vec<(Complex64, u32)>) -> Result<Self> {
        let mut zs = Vec::with_capacity(points.len());
        for (z, mult) in points {
            if z == Complex64::new(0.0, 0.0) {
                return Err(Error::InvalidSequence("points must avoid the origin".into()));
            }
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidSequence("points must be finite".into()));
            }
            if mult == 0 {
                return Err(Error::InvalidSequence("multiplicities must be >= 1".into()));
            }
            zs.push(Zero { z, mult });
        }
        zs.sort_by(|a, b| {
            (a.z.norm(), a.z.re, a.z.im)
                .partial_cmp(&(b.z.norm(), b.z.re, b.z.im))
                .unwrap()
        });
        Ok(ZeroSequence { kind: Kind::Explicit(zs) })
    }

    pub fn real_points(points: &[f64], mult: u32) -> Result<Self> {
        Self::explicit(points.iter().map(|&x| (Complex64::new(x, 0.0), mult)).collect())
    }

    pub fn generator(rule: GenRule, mult: u32) -> Result<Self> {
        if mult == 0 {
            return Err(Error::InvalidSequence("multiplicities must be >= 1".into()));
        }
        match rule {
            GenRule::IntegersShifted { shift } => {
                if !(shift > 0.0 && shift < 1.0) {
                    return Err(Error::InvalidSequence(
                        "shift must lie strictly inside (0, 1) so no point hits the origin".into(),
                    ));
                }
            }
            GenRule::Power { gamma } => {
                if !(gamma > 0.0) {
                    return Err(Error::InvalidSequence("power generator needs gamma > 0".into()));
                }
            }
            _ => {}
        }
        Ok(ZeroSequence { kind: Kind::Generator { rule, mult } })
    }

    pub fn integers(mult: u32) -> Self {
        Self::generator(GenRule::Integers, mult).unwrap()
    }

    pub fn half_integers(mult: u32) -> Self {
        Self::generator(GenRule::HalfIntegers, mult).unwrap()
    }

    pub fn power(gamma: f64, mult: u32) -> Result<Self> {
        Self::generator(GenRule::Power { gamma }, mult)
    }

    pub fn shifted_integers(shift: f64, mult: u32) -> Result<Self> {
        Self::generator(GenRule::IntegersShifted { shift }, mult)
    }

    pub fn is_generator(&self) -> bool {
        matches!(self.kind, Kind::Generator { .. })
    }

    pub fn explicit_points(&self) -> Option<&[Zero]> {
        match &self.kind {
            Kind::Explicit(v) => Some(v),
            Kind::Generator { .. } => None,
        }
    }

    /// All points with |z| < r (strict), in nondecreasing modulus.
    pub fn points_below(&self, r: f64) -> Vec<Zero> {
        match &self.kind {
            Kind::Explicit(v) => v.iter().copied().filter(|p| p.z.norm() < r).collect(),
            Kind::Generator { rule, mult } => {
                let mut out = Vec::new();
                match *rule {
                    GenRule::Integers => {
                        let mut k = 1.0f64;
                        while k < r {
                            out.push(Zero { z: Complex64::new(k, 0.0), mult: *mult });
                            out.push(Zero { z: Complex64::new(-k, 0.0), mult: *mult });
                            k += 1.0;
                        }
                    }
                    GenRule::HalfIntegers => {
                        let mut t = 0.5f64;
                        while t < r {
                            out.push(Zero { z: Complex64::new(t, 0.0), mult: *mult });
                            out.push(Zero { z: Complex64::new(-t, 0.0), mult: *mult });
                            t += 1.0;
                        }
                    }
                    GenRule::IntegersShifted { shift } => {
                        let k_lo = (-r - shift).floor() as i64;
                        let k_hi = (r - shift).ceil() as i64;
                        for k in k_lo..=k_hi {
                            let x = k as f64 + shift;
                            if x.abs() < r && x != 0.0 {
                                out.push(Zero { z: Complex64::new(x, 0.0), mult: *mult });
                            }
                        }
                        out.sort_by(|a, b| {
                            (a.z.norm(), a.z.re).partial_cmp(&(b.z.norm(), b.z.re)).unwrap()
                        });
                    }
                    GenRule::Power { gamma } => {
                        let mut k = 1.0f64;
                        loop {
                            let t = k.powf(gamma);
                            if t >= r {
                                break;
                            }
                            out.push(Zero { z: Complex64::new(t, 0.0), mult: *mult });
                            k += 1.0;
                        }
                    }
                }
                out
            }
        }
    }

    /// Total multiplicity of points with |z| <= r.
    pub fn count_within(&self, r: f64) -> u64 {
        match &self.kind {
            Kind::Explicit(v) => v.iter().filter(|p| p.z.norm() <= r).map(|p| p.mult as u64).sum(),
            Kind::Generator { .. } => {
                // generous strictness slack keeps generator counts exact
                self.points_below(r * (1.0 + 1e-12) + 1e-12)
                    .iter()
                    .map(|p| p.mult as u64)
                    .sum()
            }
        }
    }

    /// Monotone radial models of the generator (one per arithmetic branch),
    /// or `None` for explicit finite sequences.
    pub fn radial_models(&self) -> Option<Vec<RadialModel>> {
        match &self.kind {
            Kind::Explicit(_) => None,
            Kind::Generator { rule, mult } => {
                let w = *mult as f64;
                Some(match *rule {
                    GenRule::Integers => {
                        vec![RadialModel::Arithmetic { start: 1.0, step: 1.0, weight: 2.0 * w }]
                    }
                    GenRule::HalfIntegers => {
                        vec![RadialModel::Arithmetic { start: 0.5, step: 1.0, weight: 2.0 * w }]
                    }
                    GenRule::IntegersShifted { shift } => vec![
                        RadialModel::Arithmetic { start: shift, step: 1.0, weight: w },
                        RadialModel::Arithmetic { start: 1.0 - shift, step: 1.0, weight: w },
                    ],
                    GenRule::Power { gamma } => {
                        vec![RadialModel::PowerLaw { gamma, weight: w }]
                    }
                })
            }
        }
    }

    /// Same sequence with every multiplicity scaled by `k`.
    pub fn with_multiplicity_scaled(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSequence("multiplicity scale must be >= 1".into()));
        }
        Ok(match &self.kind {
            Kind::Explicit(v) => ZeroSequence {
                kind: Kind::Explicit(
                    v.iter().map(|p| Zero { z: p.z, mult: p.mult * k }).collect(),
                ),
            },
            Kind::Generator { rule, mult } => {
                ZeroSequence { kind: Kind::Generator { rule: *rule, mult: mult * k } }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integer_prefix_is_deterministic() {
        let z = ZeroSequence::half_integers(1);
        let pts = z.points_below(3.0);
        let moduli: Vec<f64> = pts.iter().map(|p| p.z.norm()).collect();
        assert_eq!(moduli, vec![0.5, 0.5, 1.5, 1.5, 2.5, 2.5]);
        assert_eq!(z.count_within(2.5), 6);
    }

    #[test]
    fn origin_points_rejected() {
        assert!(ZeroSequence::explicit(vec![(Complex64::new(0.0, 0.0), 1)]).is_err());
        assert!(ZeroSequence::shifted_integers(0.0, 1).is_err());
    }

    #[test]
    fn explicit_points_sorted_by_modulus() {
        let z = ZeroSequence::explicit(vec![
            (Complex64::new(3.0, 0.0), 1),
            (Complex64::new(0.0, 1.0), 2),
            (Complex64::new(-2.0, 0.0), 1),
        ])
        .unwrap();
        let pts = z.points_below(10.0);
        assert_eq!(pts[0].z, Complex64::new(0.0, 1.0));
        assert_eq!(pts[1].z, Complex64::new(-2.0, 0.0));
        assert_eq!(pts[2].z, Complex64::new(3.0, 0.0));
    }

    #[test]
    fn shifted_integers_enumeration() {
        let z = ZeroSequence::shifted_integers(0.25, 1).unwrap();
        let pts = z.points_below(2.0);
        let xs: Vec<f64> = pts.iter().map(|p| p.z.re).collect();
        assert_eq!(xs, vec![0.25, -0.75, 1.25, -1.75]);
        let models = z.radial_models().unwrap();
        assert_eq!(models.len(), 2);
        assert!((models[0].modulus(2) - 1.25).abs() < 1e-15);
        assert!((models[1].modulus(1) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn power_generator_moduli() {
        let z = ZeroSequence::power(0.5, 1).unwrap();
        let pts = z.points_below(2.5);
        let xs: Vec<f64> = pts.iter().map(|p| p.z.re).collect();
        // sqrt(k) for k = 1..6 stays below 2.5
        assert_eq!(xs.len(), 6);
        assert!((xs[3] - 2.0).abs() < 1e-15);
    }
}
