//! Cartesian grid samples and the five-point discrete-Laplacian mass grid.

use super::LineMeasure;
use crate::error::{Error, Result};
use crate::exec;
use std::f64::consts::TAU;

/// Real values sampled on a uniform grid; `-inf` marks poles of `log|f|`.
#[derive(Clone, Debug)]
pub struct GridFunction {
    x0: f64,
    y0: f64,
    h: f64,
    nx: usize,
    ny: usize,
    vals: Vec<f64>,
}

impl GridFunction {
    pub fn from_fn<F: Fn(f64, f64) -> f64 + Sync>(
        x_range: (f64, f64),
        y_range: (f64, f64),
        h: f64,
        f: F,
    ) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::Grid(format!("spacing must be positive, got {h}")));
        }
        let nx = ((x_range.1 - x_range.0) / h).round() as i64 + 1;
        let ny = ((y_range.1 - y_range.0) / h).round() as i64 + 1;
        if nx < 2 || ny < 2 {
            return Err(Error::Grid("grid needs at least 2 nodes per axis".into()));
        }
        let (nx, ny) = (nx as usize, ny as usize);
        let (x0, y0) = (x_range.0, y_range.0);
        let vals = exec::map_range(nx * ny, |idx| {
            let i = idx % nx;
            let j = idx / nx;
            let v = f(x0 + i as f64 * h, y0 + j as f64 * h);
            if v.is_nan() || v == f64::INFINITY {
                f64::NAN
            } else {
                v
            }
        });
        if vals.iter().any(|v| v.is_nan()) {
            return Err(Error::Grid("sampled values must be finite or -inf".into()));
        }
        Ok(GridFunction { x0, y0, h, nx, ny, vals })
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }
    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.h
    }
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.h
    }
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.vals[j * self.nx + i]
    }

    fn cubic_weights(s: f64) -> [f64; 4] {
        // Keys cubic convolution (a = -1/2): exact on quadratics.
        let s2 = s * s;
        let s3 = s2 * s;
        [
            -0.5 * s3 + s2 - 0.5 * s,
            1.5 * s3 - 2.5 * s2 + 1.0,
            -1.5 * s3 + 2.0 * s2 + 0.5 * s,
            0.5 * s3 - 0.5 * s2,
        ]
    }

    /// Bicubic interpolation. Returns `-inf` when the 4×4 stencil touches a
    /// pole; errors when the point is outside the interpolable interior.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let gx = (x - self.x0) / self.h;
        let gy = (y - self.y0) / self.h;
        let i1 = gx.floor() as i64;
        let j1 = gy.floor() as i64;
        if i1 < 1 || i1 + 2 > self.nx as i64 - 1 || j1 < 1 || j1 + 2 > self.ny as i64 - 1 {
            return Err(Error::Grid(format!("point ({x}, {y}) outside the interpolable region")));
        }
        let (i1, j1) = (i1 as usize, j1 as usize);
        let wx = Self::cubic_weights(gx - i1 as f64);
        let wy = Self::cubic_weights(gy - j1 as f64);
        let mut acc = 0.0;
        for (dj, wyj) in wy.iter().enumerate() {
            let j = j1 + dj - 1;
            for (di, wxi) in wx.iter().enumerate() {
                let i = i1 + di - 1;
                let v = self.value(i, j);
                if v == f64::NEG_INFINITY {
                    return Ok(f64::NEG_INFINITY);
                }
                acc += wyj * wxi * v;
            }
        }
        Ok(acc)
    }

    /// Cell masses of `(1/2π)·Δu` from the five-point stencil. Nodes at the
    /// boundary carry no mass; `-inf` nodes are excluded, with the mass of
    /// each `-inf` cluster recovered from the discrete flux through a box
    /// around it.
    pub fn riesz_masses(&self) -> RieszMasses {
        let (nx, ny) = (self.nx, self.ny);
        let mut consumed = vec![false; nx * ny];
        let mut clusters = Vec::new();

        // flood-fill -inf clusters
        let mut seen = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let idx = j * nx + i;
                if seen[idx] || self.vals[idx] != f64::NEG_INFINITY {
                    continue;
                }
                let mut stack = vec![(i, j)];
                let mut members = Vec::new();
                seen[idx] = true;
                while let Some((ci, cj)) = stack.pop() {
                    members.push((ci, cj));
                    for (di, dj) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                        let (ni, nj) = (ci as i64 + di, cj as i64 + dj);
                        if ni < 0 || nj < 0 || ni >= nx as i64 || nj >= ny as i64 {
                            continue;
                        }
                        let nidx = nj as usize * nx + ni as usize;
                        if !seen[nidx] && self.vals[nidx] == f64::NEG_INFINITY {
                            seen[nidx] = true;
                            stack.push((ni as usize, nj as usize));
                        }
                    }
                }
                let i_lo = members.iter().map(|&(i, _)| i).min().unwrap();
                let i_hi = members.iter().map(|&(i, _)| i).max().unwrap();
                let j_lo = members.iter().map(|&(_, j)| j).min().unwrap();
                let j_hi = members.iter().map(|&(_, j)| j).max().unwrap();
                let (mass, ring) = self.cluster_flux(i_lo, i_hi, j_lo, j_hi);
                // consume the box so pointwise masses are not double counted
                let (bi_lo, bi_hi) = (i_lo.saturating_sub(ring), (i_hi + ring).min(nx - 1));
                let (bj_lo, bj_hi) = (j_lo.saturating_sub(ring), (j_hi + ring).min(ny - 1));
                for j in bj_lo..=bj_hi {
                    for i in bi_lo..=bi_hi {
                        consumed[j * nx + i] = true;
                    }
                }
                clusters.push(ClusterMass {
                    x_center: 0.5 * (self.x(i_lo) + self.x(i_hi)),
                    y_center: 0.5 * (self.y(j_lo) + self.y(j_hi)),
                    mass,
                    nodes: members.len(),
                });
            }
        }

        let masses = exec::map_range(nx * ny, |idx| {
            let i = idx % nx;
            let j = idx / nx;
            if i == 0 || j == 0 || i == nx - 1 || j == ny - 1 || consumed[idx] {
                return f64::NAN;
            }
            let c = self.vals[idx];
            let e = self.vals[idx + 1];
            let w = self.vals[idx - 1];
            let n = self.vals[idx + nx];
            let s = self.vals[idx - nx];
            if !(c.is_finite() && e.is_finite() && w.is_finite() && n.is_finite() && s.is_finite()) {
                return f64::NAN;
            }
            (e + w + n + s - 4.0 * c) / TAU
        });

        RieszMasses {
            x0: self.x0,
            y0: self.y0,
            h: self.h,
            nx,
            ny,
            masses,
            clusters,
        }
    }

    /// Discrete flux of the gradient through a box around the cluster's
    /// bounding rectangle, two rings out when the grid allows (the wider
    /// contour roughly quarters the discretisation error near a pole).
    /// Returns the mass and the ring width actually used.
    fn cluster_flux(&self, i_lo: usize, i_hi: usize, j_lo: usize, j_hi: usize) -> (f64, usize) {
        for ring in [2usize, 1] {
            let (nx, ny) = (self.nx, self.ny);
            let bi_lo = i_lo as i64 - ring as i64;
            let bi_hi = i_hi as i64 + ring as i64;
            let bj_lo = j_lo as i64 - ring as i64;
            let bj_hi = j_hi as i64 + ring as i64;
            if bi_lo < 1 || bj_lo < 1 || bi_hi > nx as i64 - 2 || bj_hi > ny as i64 - 2 {
                continue;
            }
            let inside = |i: i64, j: i64| i >= bi_lo && i <= bi_hi && j >= bj_lo && j <= bj_hi;
            let mut flux = 0.0;
            let mut ok = true;
            'outer: for j in bj_lo..=bj_hi {
                for i in bi_lo..=bi_hi {
                    for (di, dj) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                        let (oi, oj) = (i + di, j + dj);
                        if inside(oi, oj) {
                            continue;
                        }
                        let u_in = self.value(i as usize, j as usize);
                        let u_out = self.value(oi as usize, oj as usize);
                        if !(u_in.is_finite() && u_out.is_finite()) {
                            ok = false;
                            break 'outer;
                        }
                        flux += u_out - u_in;
                    }
                }
            }
            if ok {
                return (flux / TAU, ring);
            }
        }
        (f64::NAN, 1)
    }
}

/// Mass of a cluster of excluded `-inf` nodes, aggregated over its box.
#[derive(Clone, Copy, Debug)]
pub struct ClusterMass {
    pub x_center: f64,
    pub y_center: f64,
    pub mass: f64,
    pub nodes: usize,
}

/// Node-indexed Riesz cell masses plus excluded-cluster totals.
#[derive(Clone, Debug)]
pub struct RieszMasses {
    x0: f64,
    y0: f64,
    h: f64,
    nx: usize,
    ny: usize,
    masses: Vec<f64>,
    clusters: Vec<ClusterMass>,
}

impl RieszMasses {
    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn node_mass(&self, i: usize, j: usize) -> Option<f64> {
        let m = self.masses[j * self.nx + i];
        if m.is_nan() {
            None
        } else {
            Some(m)
        }
    }

    pub fn clusters(&self) -> &[ClusterMass] {
        &self.clusters
    }

    /// Sum of masses whose nodes lie within distance `r` of `(cx, cy)`.
    pub fn total_in_disk(&self, cx: f64, cy: f64, r: f64) -> f64 {
        let mut parts: Vec<f64> = Vec::new();
        for j in 0..self.ny {
            let y = self.y0 + j as f64 * self.h;
            for i in 0..self.nx {
                let x = self.x0 + i as f64 * self.h;
                let m = self.masses[j * self.nx + i];
                if !m.is_nan() && (x - cx).hypot(y - cy) <= r {
                    parts.push(m);
                }
            }
        }
        for c in &self.clusters {
            if (c.x_center - cx).hypot(c.y_center - cy) <= r && c.mass.is_finite() {
                parts.push(c.mass);
            }
        }
        exec::pairwise_sum(&parts)
    }

    /// Pointwise iterator over valid (x, y, mass) entries.
    pub fn iter_masses(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.nx * self.ny).filter_map(move |idx| {
            let m = self.masses[idx];
            if m.is_nan() {
                return None;
            }
            let i = idx % self.nx;
            let j = idx / self.nx;
            Some((self.x0 + i as f64 * self.h, self.y0 + j as f64 * self.h, m))
        })
    }

    pub fn max_abs_mass(&self) -> f64 {
        self.masses.iter().filter(|m| !m.is_nan()).fold(0.0f64, |a, &b| a.max(b.abs()))
    }

    /// Aggregate column masses into a distribution on the line. Small
    /// negative masses (discretisation noise up to `clamp_tol`) are clamped.
    pub fn project_to_line(&self, clamp_tol: f64) -> Result<LineMeasure> {
        let mut cols: Vec<(f64, f64)> = Vec::with_capacity(self.nx);
        for i in 0..self.nx {
            let mut col: Vec<f64> = Vec::new();
            for j in 0..self.ny {
                let m = self.masses[j * self.nx + i];
                if !m.is_nan() {
                    col.push(m);
                }
            }
            let mut total = exec::pairwise_sum(&col);
            if total < 0.0 {
                if total < -clamp_tol {
                    return Err(Error::Grid(format!(
                        "column at x = {} carries negative mass {total}",
                        self.x0 + i as f64 * self.h
                    )));
                }
                total = 0.0;
            }
            cols.push((self.x0 + i as f64 * self.h, total));
        }
        LineMeasure::from_point_masses(&cols)
    }

    /// A grid is too coarse when the spacing cannot resolve `feature_scale`.
    pub fn coarser_than(&self, feature_scale: f64) -> bool {
        self.h > feature_scale / 8.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bicubic_reproduces_quadratics() {
        let g = GridFunction::from_fn((-2.0, 2.0), (-2.0, 2.0), 0.25, |x, y| x * x + y * y).unwrap();
        for &(x, y) in &[(0.3, -0.7), (1.1, 0.45), (-0.95, 0.2)] {
            assert_abs_diff_eq!(g.eval(x, y).unwrap(), x * x + y * y, epsilon = 1e-12);
        }
    }

    #[test]
    fn harmonic_grid_has_no_mass() {
        let g = GridFunction::from_fn((-1.0, 1.0), (-1.0, 1.0), 0.1, |x, _| x).unwrap();
        let m = g.riesz_masses();
        assert!(m.max_abs_mass() < 1e-13);
    }

    #[test]
    fn quadratic_grid_density() {
        // Δ|z|² = 4, so each cell mass is (4/2π)h² = (2/π)h².
        let h = 0.05;
        let g = GridFunction::from_fn((-1.0, 1.0), (-1.0, 1.0), h, |x, y| x * x + y * y).unwrap();
        let m = g.riesz_masses();
        let expect = 2.0 / std::f64::consts::PI * h * h;
        let got = m.node_mass(10, 10).unwrap();
        assert_abs_diff_eq!(got, expect, epsilon = 1e-12);
    }

    #[test]
    fn log_modulus_unit_mass() {
        // grid offset so the origin is not a node
        let h = 0.05;
        let g = GridFunction::from_fn(
            (-1.025, 0.975),
            (-1.025, 0.975),
            h,
            |x, y| 0.5 * (x * x + y * y).ln(),
        )
        .unwrap();
        let m = g.riesz_masses();
        let total = m.total_in_disk(-0.025, -0.025, 0.5);
        assert!((total - 1.0).abs() < 0.02, "disk mass {total}");
    }

    #[test]
    fn log_modulus_mass_converges_under_refinement() {
        let mut errs = Vec::new();
        for &h in &[0.1, 0.05, 0.025] {
            let g = GridFunction::from_fn(
                (-1.0 - h / 2.0, 1.0 - h / 2.0),
                (-1.0 - h / 2.0, 1.0 - h / 2.0),
                h,
                |x, y| 0.5 * (x * x + y * y).ln(),
            )
            .unwrap();
            let total = g.riesz_masses().total_in_disk(-h / 2.0, -h / 2.0, 0.6);
            errs.push((total - 1.0).abs());
        }
        assert!(errs[1] <= errs[0] && errs[2] <= errs[1], "errors {errs:?}");
    }

    #[test]
    fn flux_recovers_pole_mass() {
        // log|z| with the origin exactly on a node: the -inf cluster's flux
        // box carries the unit mass.
        let g = GridFunction::from_fn((-1.0, 1.0), (-1.0, 1.0), 0.1, |x, y| {
            let r2 = x * x + y * y;
            if r2 == 0.0 {
                f64::NEG_INFINITY
            } else {
                0.5 * r2.ln()
            }
        })
        .unwrap();
        let m = g.riesz_masses();
        assert_eq!(m.clusters().len(), 1);
        assert!((m.clusters()[0].mass - 1.0).abs() < 0.02);
    }

    #[test]
    fn line_projection_of_imabs() {
        // π|Im z| has unit line density on the real axis.
        let h = 0.04;
        let g = GridFunction::from_fn((-3.4, 3.4), (-0.6, 0.6), h, |_, y| {
            std::f64::consts::PI * y.abs()
        })
        .unwrap();
        let nu = g.riesz_masses().project_to_line(1e-9).unwrap();
        for t in [-2.98, -1.98, 1.98, 2.98] {
            let got = nu.eval(t);
            assert!(
                (got - t).abs() <= 0.02 * t.abs(),
                "nu({t}) = {got}"
            );
        }
    }
}
