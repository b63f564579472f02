//! Numerical machinery for deciding when a point sequence can be the zero set
//! of an entire function dominated by a subharmonic majorant.
//!
//! The crate is organised around the objects the tests consume:
//!
//! * [`measures`] — monotone counting/distribution functions, Riemann–Stieltjes
//!   integration, discrete-Laplacian Riesz masses, zero sequences;
//! * [`potentials`] — Jensen potentials with numerically verified membership;
//! * [`testfns`] — the kernel-inequality test-function class on the line and
//!   its Poisson extension;
//! * [`criteria`] — the sum-minus-integral functionals, supremum scans with
//!   bounded/diverging verdicts, and circle-mean smoothing of majorants;
//! * [`radial`] — fully radial integral and tail-sum tests;
//! * [`uniqueness`] — exterior mass-balance components and uniqueness verdicts;
//! * [`oracle`] — closed-form entire functions and canonical products used as
//!   ground truth.
//!
//! Everything is pure and deterministic: parallel sections (feature
//! `parallel`, on by default) collect in index order and reduce pairwise, so
//! results are bit-identical to the sequential fallback.

pub mod criteria;
pub mod error;
pub mod exec;
pub mod measures;
pub mod oracle;
pub mod potentials;
pub mod quad;
pub mod radial;
pub mod series;
pub mod testfns;
pub mod uniqueness;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Numeric tolerances threaded through every operation.
///
/// Defaults follow the library-wide conventions: relative quadrature tolerance
/// `1e-8` with interval-halving capped at 2^20 panels, membership slack
/// tolerance `1e-6`, and the slope thresholds used by scan verdicts.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub tol_quad: f64,
    pub tol_member: f64,
    pub tol_deriv: f64,
    pub slope_tol: f64,
    pub slope_min: f64,
    pub i_max: u32,
    pub max_panels: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_quad: 1e-8,
            tol_member: 1e-6,
            tol_deriv: 1e-6,
            slope_tol: 0.05,
            slope_min: 0.5,
            i_max: 14,
            max_panels: 1 << 20,
        }
    }
}

impl Tolerances {
    /// Copy with a tightened membership tolerance (used before a Diverging
    /// verdict is allowed to stand).
    pub fn tightened_membership(&self) -> Self {
        let mut t = self.clone();
        t.tol_member /= 10.0;
        t
    }
}
