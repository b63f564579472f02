//! Ground-truth entire functions evaluated through `log|f|` only.
//!
//! Built-ins use overflow-free branch combinations (e.g. `log|cos πz| =
//! π|Im z| − log 2 + log|1 + e^{2πiz̄-combined}|`), valid for imaginary parts
//! up to 1e4 and beyond. Canonical products sum primary-factor logs over a
//! reproducible zero prefix and report a truncation bound.

use crate::error::{Error, Result};
use crate::measures::{RadialModel, ZeroSequence};
use crate::quad::{self, MeanResult};
use crate::{exec, Tolerances};
use num_complex::Complex64;
use std::f64::consts::{LN_2, PI};

#[derive(Clone, Debug)]
pub enum EntireOracle {
    /// cos πz, zeros at ±(k − 1/2)
    CosPi,
    /// sin πz, zeros at all integers including 0
    SinPi,
    /// exp(p(z)) for a polynomial p, no zeros
    ExpPoly { coeffs: Vec<Complex64> },
    /// canonical product over the declared zeros with primary factors E_p
    Product { zeros: ZeroSequence, genus: u8, truncation_radius: f64 },
}

/// reduce x modulo 2 into [-1, 1) exactly for moderate magnitudes
fn reduce_mod2(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    if r < -1.0 {
        r + 2.0
    } else if r >= 1.0 {
        r - 2.0
    } else {
        r
    }
}

fn log_abs_cos_pi(z: Complex64) -> f64 {
    let (x, y) = (z.re, z.im);
    if y == 0.0 {
        if (x - 0.5).fract() == 0.0 {
            return f64::NEG_INFINITY;
        }
        let xr = reduce_mod2(x);
        return (PI * xr).cos().abs().ln();
    }
    let a = y.abs();
    let xr = reduce_mod2(x);
    let q = (-2.0 * PI * a).exp();
    // |cos πz| = e^{πa}/2 · |1 + e^{2πi x} e^{-2πa}|
    PI * a - LN_2 + 0.5 * (2.0 * q * (2.0 * PI * xr).cos() + q * q).ln_1p()
}

fn log_abs_sin_pi(z: Complex64) -> f64 {
    let (x, y) = (z.re, z.im);
    if y == 0.0 {
        if x.fract() == 0.0 {
            return f64::NEG_INFINITY;
        }
        let xr = reduce_mod2(x);
        return (PI * xr).sin().abs().ln();
    }
    let a = y.abs();
    let xr = reduce_mod2(x);
    let q = (-2.0 * PI * a).exp();
    PI * a - LN_2 + 0.5 * (-2.0 * q * (2.0 * PI * xr).cos() + q * q).ln_1p()
}

fn log_abs_primary(w: Complex64, genus: u8) -> f64 {
    let one_minus = Complex64::new(1.0 - w.re, -w.im);
    let mut v = 0.5 * one_minus.norm_sqr().ln();
    if genus >= 1 {
        v += w.re;
    }
    if genus >= 2 {
        v += 0.5 * (w.re * w.re - w.im * w.im);
    }
    v
}

impl EntireOracle {
    pub fn cos_pi() -> Self {
        EntireOracle::CosPi
    }

    pub fn sin_pi() -> Self {
        EntireOracle::SinPi
    }

    pub fn exp_poly(coeffs: Vec<Complex64>) -> Self {
        EntireOracle::ExpPoly { coeffs }
    }

    /// Canonical product with the smallest-genus rule enforced: the declared
    /// genus must make `Σ |z_k|^{-p-1}` summable for the sequence's model.
    pub fn product(zeros: ZeroSequence, genus: u8, truncation_radius: f64) -> Result<Self> {
        if genus > 2 {
            return Err(Error::InvalidOracle("genus must be 0, 1 or 2".into()));
        }
        if let Some(models) = zeros.radial_models() {
            for m in &models {
                let ok = match *m {
                    RadialModel::Arithmetic { .. } => genus >= 1,
                    RadialModel::PowerLaw { gamma, .. } => gamma * (genus as f64 + 1.0) > 1.0,
                };
                if !ok {
                    return Err(Error::InvalidOracle(format!(
                        "genus {genus} is too small for the declared zero growth"
                    )));
                }
            }
            if !(truncation_radius > 0.0) {
                return Err(Error::InvalidOracle("generator products need a truncation radius".into()));
            }
        }
        Ok(EntireOracle::Product { zeros, genus, truncation_radius })
    }

    /// The zero set with multiplicities (empty for zero-free functions).
    /// `sin πz` additionally vanishes at the origin, which the sequence type
    /// cannot carry; see [`EntireOracle::vanishes_at_origin`].
    pub fn zeros(&self) -> ZeroSequence {
        match self {
            EntireOracle::CosPi => ZeroSequence::half_integers(1),
            EntireOracle::SinPi => ZeroSequence::integers(1),
            EntireOracle::ExpPoly { .. } => ZeroSequence::explicit(vec![]).unwrap(),
            EntireOracle::Product { zeros, .. } => zeros.clone(),
        }
    }

    pub fn vanishes_at_origin(&self) -> bool {
        matches!(self, EntireOracle::SinPi)
    }

    /// log|f(z)|; exactly -inf on declared zeros.
    pub fn log_abs(&self, z: Complex64) -> f64 {
        match self {
            EntireOracle::CosPi => log_abs_cos_pi(z),
            EntireOracle::SinPi => log_abs_sin_pi(z),
            EntireOracle::ExpPoly { coeffs } => {
                let mut p = Complex64::new(0.0, 0.0);
                for c in coeffs.iter().rev() {
                    p = p * z + c;
                }
                p.re
            }
            EntireOracle::Product { zeros, genus, truncation_radius } => {
                let pts = match zeros.explicit_points() {
                    Some(p) => p.to_vec(),
                    None => zeros.points_below(*truncation_radius),
                };
                let terms = exec::map_slice(&pts, |p| {
                    if p.z == z {
                        return f64::NEG_INFINITY;
                    }
                    p.mult as f64 * log_abs_primary(z / p.z, *genus)
                });
                if terms.iter().any(|t| *t == f64::NEG_INFINITY) {
                    return f64::NEG_INFINITY;
                }
                exec::pairwise_sum(&terms)
            }
        }
    }

    /// Upper bound on the log-modulus error from truncating the product at
    /// its declared radius; zero for built-ins and finite products. Valid for
    /// `|z|` at most half the truncation radius.
    pub fn truncation_bound(&self, z: Complex64) -> f64 {
        match self {
            EntireOracle::Product { zeros, genus, truncation_radius } => {
                let models = match zeros.radial_models() {
                    Some(m) => m,
                    None => return 0.0,
                };
                let p1 = *genus as f64 + 1.0;
                let r = z.norm();
                if r > truncation_radius / 2.0 {
                    return f64::INFINITY;
                }
                let mut bound = 0.0;
                for m in &models {
                    // index of the first modulus at or past the radius
                    let k_cut = match *m {
                        RadialModel::Arithmetic { start, step, .. } => {
                            ((truncation_radius - start) / step).ceil().max(1.0)
                        }
                        RadialModel::PowerLaw { gamma, .. } => {
                            truncation_radius.powf(1.0 / gamma).ceil().max(1.0)
                        }
                    };
                    let tail = quad::upper_tail(
                        &|x| m.modulus_cont(x).powf(-p1),
                        k_cut,
                        1e-6,
                        1 << 14,
                    );
                    bound += 2.0 * m.weight() * r.powf(p1) * tail.value.max(0.0);
                }
                bound
            }
            _ => 0.0,
        }
    }

    /// Trapezoid circle mean of log|f| at radius `r`, node-doubling with the
    /// half-step nudge on zeros that land on a node.
    pub fn circle_mean_log(&self, r: f64, tol: &Tolerances) -> Result<MeanResult> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveRadius(r));
        }
        Ok(quad::periodic_mean(
            &|theta| self.log_abs(Complex64::from_polar(r, theta)),
            tol.tol_quad,
            1 << 16,
        ))
    }
}

/// Both sides of the classical circle-mean identity for `log|f|`.
#[derive(Clone, Copy, Debug)]
pub struct JensenCheck {
    pub circle_mean: f64,
    pub counting_side: f64,
    pub gap: f64,
    pub mean_nodes: u32,
}

/// Compare the circle mean of log|f| at radius `r` against
/// `log|f(0)| + Σ mult·log(r/|z_k|)` over the zeros inside.
pub fn jensen_check(f: &EntireOracle, r: f64, tol: &Tolerances) -> Result<JensenCheck> {
    if f.vanishes_at_origin() {
        return Err(Error::ZeroAtBasePoint(
            "the base point is a zero; use a shifted instance".into(),
        ));
    }
    let at0 = f.log_abs(Complex64::new(0.0, 0.0));
    if at0 == f64::NEG_INFINITY {
        return Err(Error::ZeroAtBasePoint("f(0) = 0".into()));
    }
    let zeros = f.zeros();
    let inside = zeros.points_below(r * (1.0 + 1e-15));
    let log_terms: Vec<f64> = inside
        .iter()
        .map(|p| p.mult as f64 * (r / p.z.norm()).ln())
        .collect();
    let counting_side = at0 + exec::pairwise_sum(&log_terms);
    let mean = f.circle_mean_log(r, tol)?;
    Ok(JensenCheck {
        circle_mean: mean.value,
        counting_side,
        gap: (mean.value - counting_side).abs(),
        mean_nodes: mean.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerances {
        Tolerances { tol_quad: 1e-10, ..Tolerances::default() }
    }

    #[test]
    fn cos_at_origin_and_zeros() {
        let f = EntireOracle::cos_pi();
        assert_eq!(f.log_abs(Complex64::new(0.0, 0.0)), 0.0);
        assert_eq!(f.log_abs(Complex64::new(0.5, 0.0)), f64::NEG_INFINITY);
        assert_eq!(f.log_abs(Complex64::new(-1.5, 0.0)), f64::NEG_INFINITY);
        assert_eq!(f.log_abs(Complex64::new(1.0, 0.0)), 0.0);
    }

    #[test]
    fn cos_large_imaginary_asymptotics() {
        let f = EntireOracle::cos_pi();
        let y = 50.0;
        let got = f.log_abs(Complex64::new(0.3, y));
        assert_abs_diff_eq!(got, PI * y - LN_2, epsilon = 1e-12);
        // no overflow far up the axis
        let huge = f.log_abs(Complex64::new(0.0, 1e4));
        assert!(huge.is_finite());
        assert_abs_diff_eq!(huge, PI * 1e4 - LN_2, epsilon = 1e-6);
    }

    #[test]
    fn cos_envelope_below_imabs() {
        let f = EntireOracle::cos_pi();
        for i in 0..40 {
            for j in 0..10 {
                let z = Complex64::new(-7.3 + 0.37 * i as f64, -2.0 + 0.41 * j as f64);
                assert!(f.log_abs(z) <= PI * z.im.abs() + 1e-12, "violated at {z}");
            }
        }
    }

    #[test]
    fn sin_zero_detection() {
        let f = EntireOracle::sin_pi();
        assert_eq!(f.log_abs(Complex64::new(0.0, 0.0)), f64::NEG_INFINITY);
        assert_eq!(f.log_abs(Complex64::new(-3.0, 0.0)), f64::NEG_INFINITY);
        assert!(f.log_abs(Complex64::new(0.5, 0.0)).abs() < 1e-15);
    }

    #[test]
    fn product_over_half_integers_matches_cos() {
        // genus-1 product over ±(k-1/2) equals cos πz; the truncated product
        // differs by ~|z|²·tail, absorbed by an affine fit in (x, y).
        let zeros = ZeroSequence::half_integers(1);
        let prod = EntireOracle::product(zeros, 1, 8192.0).unwrap();
        let cos = EntireOracle::cos_pi();
        let mut pts = Vec::new();
        for i in 0..10 {
            for j in 0..5 {
                let z = Complex64::new(-1.9 + 0.4 * i as f64 + 0.13, -0.9 + 0.45 * j as f64 + 0.07);
                pts.push(z);
            }
        }
        let diffs: Vec<f64> = pts.iter().map(|&z| prod.log_abs(z) - cos.log_abs(z)).collect();
        // least-squares affine fit diff ≈ a + b·x + c·y
        let n = diffs.len() as f64;
        let (mut sx, mut sy, mut sd) = (0.0, 0.0, 0.0);
        for (z, d) in pts.iter().zip(&diffs) {
            sx += z.re;
            sy += z.im;
            sd += d;
        }
        let (mx, my, md) = (sx / n, sy / n, sd / n);
        let (mut sxx, mut syy, mut sxd, mut syd) = (0.0, 0.0, 0.0, 0.0);
        for (z, d) in pts.iter().zip(&diffs) {
            sxx += (z.re - mx).powi(2);
            syy += (z.im - my).powi(2);
            sxd += (z.re - mx) * (d - md);
            syd += (z.im - my) * (d - md);
        }
        let b = sxd / sxx;
        let c = syd / syy;
        let var: f64 = pts
            .iter()
            .zip(&diffs)
            .map(|(z, d)| (d - md - b * (z.re - mx) - c * (z.im - my)).powi(2))
            .sum::<f64>()
            / n;
        assert!(var < 1e-6, "variance after affine fit {var}");
    }

    #[test]
    fn product_truncation_bound_reported() {
        let prod = EntireOracle::product(ZeroSequence::half_integers(1), 1, 1024.0).unwrap();
        let b = prod.truncation_bound(Complex64::new(2.0, 1.0));
        assert!(b > 0.0 && b < 1e-1, "bound {b}");
        assert!(prod.truncation_bound(Complex64::new(1000.0, 0.0)).is_infinite());
    }

    #[test]
    fn genus_too_small_is_a_config_error() {
        assert!(EntireOracle::product(ZeroSequence::half_integers(1), 0, 100.0).is_err());
        assert!(EntireOracle::product(ZeroSequence::power(0.4, 1).unwrap(), 1, 100.0).is_err());
        assert!(EntireOracle::product(ZeroSequence::power(0.4, 1).unwrap(), 2, 100.0).is_ok());
    }

    #[test]
    fn circle_mean_constant_function() {
        let f = EntireOracle::exp_poly(vec![Complex64::new(0.7, 0.0)]);
        let m = f.circle_mean_log(3.0, &tol()).unwrap();
        assert_abs_diff_eq!(m.value, 0.7, epsilon = 1e-12);
    }

    #[test]
    fn cos_circle_mean_closed_form() {
        // mean at r = 2 equals 2 ln 4 + 2 ln(4/3) by the counting identity
        let f = EntireOracle::cos_pi();
        let m = f.circle_mean_log(2.0, &tol()).unwrap();
        let expect = 2.0 * 4.0f64.ln() + 2.0 * (4.0f64 / 3.0).ln();
        assert_abs_diff_eq!(m.value, expect, epsilon = 1e-9);
    }

    #[test]
    fn circle_mean_nondecreasing_in_radius() {
        let f = EntireOracle::cos_pi();
        let mut prev = f64::NEG_INFINITY;
        for r in [0.3, 0.7, 1.2, 2.0, 3.3, 5.0] {
            let m = f.circle_mean_log(r, &tol()).unwrap().value;
            assert!(m >= prev - 1e-10, "mean dropped at r = {r}");
            prev = m;
        }
    }

    #[test]
    fn jensen_identity_for_constants_and_cos() {
        let c = EntireOracle::exp_poly(vec![Complex64::new(1.3, 0.2)]);
        let j = jensen_check(&c, 2.0, &tol()).unwrap();
        assert!(j.gap < 1e-12);

        let f = EntireOracle::cos_pi();
        for r in [0.7, 2.0, 5.0, 20.0] {
            let j = jensen_check(&f, r, &tol()).unwrap();
            assert!(j.gap < 1e-8, "gap {} at r = {r}", j.gap);
        }
    }

    #[test]
    fn jensen_identity_for_finite_product() {
        let zeros = ZeroSequence::real_points(&[2.0, 3.0, 4.0], 1).unwrap();
        let f = EntireOracle::product(zeros, 0, f64::INFINITY).unwrap();
        let j = jensen_check(&f, 5.0, &tol()).unwrap();
        assert!(j.gap < 1e-8, "gap {}", j.gap);
    }

    #[test]
    fn jensen_rejects_vanishing_base_point() {
        assert!(jensen_check(&EntireOracle::sin_pi(), 2.0, &tol()).is_err());
    }
}
