//! Argument-principle zero counting on axis-parallel rectangles.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::{RootError, SearchBox};

/// A function value with its derivative and a reference magnitude. A sample is
/// treated as a zero when `|value| < floor · scale`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub value: Complex64,
    pub dvalue: Complex64,
    pub scale: f64,
}

impl Sample {
    pub fn relative_magnitude(&self) -> f64 {
        if self.scale > 0.0 {
            self.value.norm() / self.scale
        } else {
            0.0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindingOptions {
    /// Boundary samples per unit length before adaptive refinement.
    pub base_spacing: f64,
    /// Multiplies the sampling density (lattice and refinement thresholds).
    pub density: f64,
    /// Relative magnitude below which a boundary sample counts as a zero.
    pub floor: f64,
    /// Whether `f(conj λ) = conj f(λ)`, which lets samples be shared across the real axis.
    pub conjugate_symmetric: bool,
}

impl Default for WindingOptions {
    fn default() -> Self {
        Self { base_spacing: 0.25, density: 1.0, floor: 1e-12, conjugate_symmetric: false }
    }
}

/// Edge jitter fractions tried after a boundary zero.
pub const JITTER: [f64; 3] = [0.0033, 0.0067, 0.01];
/// Refinement stops (with a boundary-zero error) below this relative segment length.
const MIN_SEGMENT: f64 = 1e-13;
/// Hard cap on samples along one edge.
const MAX_EDGE_SAMPLES: usize = 2_000_000;

/// Memoized evaluation of `f` keyed by the exact bits of `λ`.
pub struct SampleCache<F> {
    f: F,
    map: HashMap<(u64, u64), Sample>,
    conjugate_symmetric: bool,
    evaluations: usize,
}

impl<F> SampleCache<F>
where
    F: FnMut(Complex64) -> Result<Sample, RootError>,
{
    pub fn new(f: F, conjugate_symmetric: bool) -> Self {
        Self { f, map: HashMap::new(), conjugate_symmetric, evaluations: 0 }
    }

    /// Number of calls that reached `f`.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub fn get(&mut self, lambda: Complex64) -> Result<Sample, RootError> {
        let flip = self.conjugate_symmetric && lambda.im < 0.0;
        let key_point = if flip { lambda.conj() } else { lambda };
        // +0.0 folds −0.0 into the same key
        let key = ((key_point.re + 0.0).to_bits(), (key_point.im + 0.0).to_bits());
        let s = match self.map.get(&key) {
            Some(s) => *s,
            None => {
                let s = (self.f)(key_point)?;
                self.evaluations += 1;
                self.map.insert(key, s);
                s
            }
        };
        Ok(if flip { Sample { value: s.value.conj(), dvalue: s.dvalue.conj(), ..s } } else { s })
    }

    /// Evaluates without caching.
    pub fn direct(&mut self, lambda: Complex64) -> Result<Sample, RootError> {
        self.evaluations += 1;
        (self.f)(lambda)
    }
}

/// Winding number of `f` around `b`, counterclockwise.
pub fn box_winding<F>(cache: &mut SampleCache<F>, b: &SearchBox, opts: &WindingOptions) -> Result<i64, RootError>
where
    F: FnMut(Complex64) -> Result<Sample, RootError>,
{
    let corners = [
        Complex64::new(b.re_min, b.im_min),
        Complex64::new(b.re_max, b.im_min),
        Complex64::new(b.re_max, b.im_max),
        Complex64::new(b.re_min, b.im_max),
    ];
    let mut total = 0.0;
    for i in 0..4 {
        total += edge_phase(cache, corners[i], corners[(i + 1) % 4], i % 2 == 0, opts)?;
    }
    let turns = total / (2.0 * PI);
    let count = turns.round();
    if (turns - count).abs() > 0.05 {
        return Err(RootError::Inconsistent(format!("winding {turns} is not an integer on {b:?}")));
    }
    Ok(count as i64)
}

/// Largest power of two not above `spacing`.
fn lattice_step(spacing: f64) -> f64 {
    2f64.powi(spacing.log2().floor() as i32)
}

/// Total phase change of `f` from `a` to `b` along a horizontal or vertical edge.
fn edge_phase<F>(
    cache: &mut SampleCache<F>,
    a: Complex64,
    b: Complex64,
    horizontal: bool,
    opts: &WindingOptions,
) -> Result<f64, RootError>
where
    F: FnMut(Complex64) -> Result<Sample, RootError>,
{
    let coord = |z: Complex64| if horizontal { z.re } else { z.im };
    let point = |x: f64| if horizontal { Complex64::new(x, a.im) } else { Complex64::new(a.re, x) };
    let (xa, xb) = (coord(a), coord(b));
    let step = lattice_step(opts.base_spacing / opts.density);
    let (lo, hi) = (xa.min(xb), xa.max(xb));
    let k_lo = (lo / step).floor() as i64 + 1;
    let k_hi = (hi / step).ceil() as i64 - 1;
    if k_hi - k_lo > MAX_EDGE_SAMPLES as i64 {
        return Err(RootError::Inconsistent(format!("edge from {a} to {b} needs too many samples")));
    }
    let mut xs = Vec::with_capacity((k_hi - k_lo + 3).max(2) as usize);
    xs.push(xa);
    let interior = (k_lo..=k_hi).map(|k| k as f64 * step).filter(|x| *x > lo && *x < hi);
    if xb > xa {
        xs.extend(interior);
    } else {
        xs.extend(interior.rev());
    }
    xs.push(xb);

    let max_phase = PI / (3.0 * opts.density);
    let max_log_deriv = 1.0 / opts.density;
    let check = |s: &Sample, at: Complex64| -> Result<(), RootError> {
        if s.relative_magnitude() < opts.floor {
            return Err(RootError::BoundaryZero { lambda: at, magnitude: s.relative_magnitude() });
        }
        Ok(())
    };

    let mut total = 0.0;
    let mut prev = cache.get(point(xs[0]))?;
    check(&prev, point(xs[0]))?;
    for w in xs.windows(2) {
        let end = cache.get(point(w[1]))?;
        check(&end, point(w[1]))?;
        // depth-first refinement of [w0, w1]
        let mut stack = vec![(w[1], end)];
        let mut x0 = w[0];
        let mut s0 = prev;
        while let Some(&(x1, s1)) = stack.last() {
            let len = (x1 - x0).abs();
            let dphase = (s1.value / s0.value).arg();
            let ok = dphase.abs() < max_phase
                && (s0.dvalue / s0.value).norm() * len <= max_log_deriv
                && (s1.dvalue / s1.value).norm() * len <= max_log_deriv;
            if ok {
                total += dphase;
                x0 = x1;
                s0 = s1;
                stack.pop();
                continue;
            }
            if len <= MIN_SEGMENT * (1.0 + x0.abs().max(x1.abs())) {
                return Err(RootError::BoundaryZero { lambda: point(x0), magnitude: s0.relative_magnitude() });
            }
            let xm = 0.5 * (x0 + x1);
            let sm = cache.get(point(xm))?;
            check(&sm, point(xm))?;
            stack.push((xm, sm));
        }
        prev = end;
    }
    Ok(total)
}
