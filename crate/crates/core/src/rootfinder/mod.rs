//! Transmission eigenvalues of radially symmetric disks.
//!
//! For each angular mode `m` the eigenvalues are the zeros of the Wronskian
//! `W_m(λ) = u₁(R)u₂′(R) − u₂(R)u₁′(R)` of the two regular radial solutions.
//! Zeros are counted with the argument principle on rectangles, isolated by
//! subdivision and polished by Newton's method.

mod search;
mod winding;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::radialode::{regular_solution, ContactFamily, OdeError, RadialProfile};

pub use search::{
    find_eigenvalues, find_eigenvalues_with, m_max_auto, EigenvalueRecord, ModeCount, SearchOptions, Spectrum,
    UnresolvedBox,
};
pub use winding::{box_winding, Sample, SampleCache, WindingOptions, JITTER};

/// Eigenvalues are excluded from the disk `|λ| < EXCLUDED_RADIUS`.
pub const EXCLUDED_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RootError {
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("zero on the box boundary near λ = {lambda} (relative magnitude {magnitude:e}) persists after jittering")]
    BoundaryZero { lambda: Complex64, magnitude: f64 },
    #[error("degenerate problem: the Wronskian vanishes identically (n1 and n2 coincide)")]
    Degenerate,
    #[error("inconsistent count: {0}")]
    Inconsistent(String),
}

/// Axis-parallel rectangle in the λ-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self, RootError> {
        let b = Self { re_min, re_max, im_min, im_max };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), RootError> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite());
        if !finite || !(self.re_min > 0.0) || !(self.re_max > self.re_min) || !(self.im_max > self.im_min) {
            return Err(RootError::InvalidBox(format!(
                "need 0 < reMin < reMax and imMin < imMax, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    /// Whether `z` lies in the box enlarged by `tol` on every side.
    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        z.re >= self.re_min - tol && z.re <= self.re_max + tol && z.im >= self.im_min - tol && z.im <= self.im_max + tol
    }

    /// Largest `|λ|` over the box.
    pub fn max_modulus(&self) -> f64 {
        let re = self.re_min.abs().max(self.re_max.abs());
        let im = self.im_min.abs().max(self.im_max.abs());
        re.hypot(im)
    }

    /// Smallest `|λ|` over the box.
    pub fn min_modulus(&self) -> f64 {
        let re = if self.re_min <= 0.0 && self.re_max >= 0.0 { 0.0 } else { self.re_min.abs().min(self.re_max.abs()) };
        let im = if self.im_min <= 0.0 && self.im_max >= 0.0 { 0.0 } else { self.im_min.abs().min(self.im_max.abs()) };
        re.hypot(im)
    }

    /// The box grown by `frac` of its width and height on every side.
    pub fn expanded(&self, frac: f64) -> Self {
        let (dw, dh) = (frac * self.width(), frac * self.height());
        Self { re_min: self.re_min - dw, re_max: self.re_max + dw, im_min: self.im_min - dh, im_max: self.im_max + dh }
    }

    /// Splits the longer side at `frac`.
    pub fn split(&self, frac: f64) -> (Self, Self) {
        if self.width() >= self.height() {
            let x = self.re_min + frac * self.width();
            (Self { re_max: x, ..*self }, Self { re_min: x, ..*self })
        } else {
            let y = self.im_min + frac * self.height();
            (Self { im_max: y, ..*self }, Self { im_min: y, ..*self })
        }
    }
}

/// Pair of refraction indices on a common disk.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DiskProblem {
    pub radius: f64,
    pub n1: RadialProfile,
    pub n2: RadialProfile,
    /// First `s` with `∂_r^s n₁(R) ≠ ∂_r^s n₂(R)`; `None` when the profiles coincide.
    pub contact_order: Option<u32>,
}

/// Relative size below which a boundary derivative difference counts as zero.
const CONTACT_TOL: f64 = 1e-10;

impl DiskProblem {
    pub fn new(n1: RadialProfile, n2: RadialProfile) -> Result<Self, RootError> {
        n1.validate()?;
        n2.validate()?;
        if n1.radius != n2.radius {
            return Err(RootError::InvalidProblem(format!("radii differ: {} vs {}", n1.radius, n2.radius)));
        }
        let contact_order = contact_order(&n1, &n2);
        Ok(Self { radius: n1.radius, n1, n2, contact_order })
    }

    pub fn from_family(f: &ContactFamily) -> Result<Self, RootError> {
        f.validate()?;
        let (n1, n2) = f.profiles();
        Self::new(n1, n2)
    }

    pub fn max_index(&self) -> f64 {
        self.n1.max_value().max(self.n2.max_value())
    }
}

fn contact_order(n1: &RadialProfile, n2: &RadialProfile) -> Option<u32> {
    let r = n1.radius;
    let len = n1.coeffs.len().max(n2.coeffs.len());
    let coeff = |p: &RadialProfile, t: usize| p.coeffs.get(t).copied().unwrap_or(0.0);
    for s in 0..=(2 * len as u32) {
        let mut diff = 0.0;
        let mut size = 0.0;
        for t in 0..len {
            let p = 2 * t as u32;
            if p < s {
                continue;
            }
            let falling: f64 = (0..s).map(|i| f64::from(p - i)).product();
            let w = falling * r.powi((p - s) as i32);
            let (a, b) = (coeff(n1, t), coeff(n2, t));
            diff += (a - b) * w;
            size += (a.abs() + b.abs()) * w;
        }
        if diff.abs() > CONTACT_TOL * size {
            return Some(s);
        }
    }
    None
}

/// `W_m(λ)` and `∂_λ W_m(λ)` in scaled form; the true values carry the factor
/// `e^{log_scale}`. `scale = |u₁u₂′| + |u₂u₁′|` is the size of the two products
/// whose difference is `W`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WronskianValue {
    pub value: Complex64,
    pub dvalue: Complex64,
    pub log_scale: f64,
    pub scale: f64,
}

impl WronskianValue {
    /// `|W| / (|u₁u₂′| + |u₂u₁′|)`.
    pub fn residual(&self) -> f64 {
        if self.scale > 0.0 {
            self.value.norm() / self.scale
        } else {
            0.0
        }
    }

    pub fn sample(&self) -> Sample {
        Sample { value: self.value, dvalue: self.dvalue, scale: self.scale }
    }
}

pub fn wronskian(p: &DiskProblem, m: u32, lambda: Complex64) -> Result<WronskianValue, RootError> {
    if lambda.norm() == 0.0 {
        return Err(RootError::InvalidBox("the Wronskian is not evaluated at λ = 0".into()));
    }
    let a = regular_solution(&p.n1, m, lambda)?;
    let b = regular_solution(&p.n2, m, lambda)?;
    let (sa, sda) = a.du_dlambda.expect("sensitivities requested");
    let (sb, sdb) = b.du_dlambda.expect("sensitivities requested");
    let (x, y) = (a.u * b.du, b.u * a.du);
    Ok(WronskianValue {
        value: x - y,
        dvalue: sa * b.du + a.u * sdb - sb * a.du - b.u * sda,
        log_scale: a.log_scale + b.log_scale,
        scale: x.norm() + y.norm(),
    })
}

/// Winding options suited to `W_m`: the lattice spacing follows the phase rate
/// `R(√max n₁ + √max n₂)` of the Wronskian along the real axis.
pub fn wronskian_winding_options(p: &DiskProblem) -> WindingOptions {
    let rate = p.radius * (p.n1.max_value().sqrt() + p.n2.max_value().sqrt());
    WindingOptions { base_spacing: 1.0 / rate, conjugate_symmetric: true, ..WindingOptions::default() }
}

/// Number of mode-`m` eigenvalues in `b` counted with multiplicity. Boundary
/// zeros are avoided by growing the box by up to 1%.
pub fn winding_count(p: &DiskProblem, m: u32, b: &SearchBox) -> Result<i64, RootError> {
    let opts = wronskian_winding_options(p);
    let mut cache = SampleCache::new(|l| wronskian(p, m, l).map(|w| w.sample()), true);
    winding_count_jittered(&mut cache, b, &opts).map(|(n, _)| n)
}

/// Winding count of a cached function, retrying on slightly larger boxes after
/// a boundary zero. Returns the count and the box it refers to.
pub fn winding_count_jittered<F>(
    cache: &mut SampleCache<F>,
    b: &SearchBox,
    opts: &WindingOptions,
) -> Result<(i64, SearchBox), RootError>
where
    F: FnMut(Complex64) -> Result<Sample, RootError>,
{
    b.validate()?;
    let mut last = match box_winding(cache, b, opts) {
        Ok(n) => return Ok((n, *b)),
        Err(e @ RootError::BoundaryZero { .. }) => e,
        Err(e) => return Err(e),
    };
    for frac in JITTER {
        let jb = b.expanded(frac);
        match box_winding(cache, &jb, opts) {
            Ok(n) => return Ok((n, jb)),
            Err(e @ RootError::BoundaryZero { .. }) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}
