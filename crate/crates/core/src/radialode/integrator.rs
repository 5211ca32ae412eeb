use num_complex::Complex64;

use super::seed::ScaledState;
use super::{BoundaryData, OdeError, RadialProfile};

/// Integrator settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub rtol: f64,
    pub atol: f64,
    /// The state is rescaled by a power of two whenever `max(|f|, R|f′|)` leaves
    /// `[1/threshold, threshold]`.
    pub overflow_threshold: f64,
    pub sensitivities: bool,
    pub max_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { rtol: 1e-11, atol: 1e-13, overflow_threshold: 1e100, sensitivities: true, max_steps: 500_000 }
    }
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// PI controller (Hairer–Wanner DOPRI5 defaults).
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

type State<const N: usize> = [Complex64; N];

struct Rhs<'a> {
    profile: &'a RadialProfile,
    a: f64,
    lambda: Complex64,
    lambda2: Complex64,
}

impl Rhs<'_> {
    /// `f″ = −a f′/r − λ²n f`, `g″ = −a g′/r − λ²n g − 2λ n f` with `a = 2m+1`.
    #[inline]
    fn eval<const N: usize>(&self, r: f64, y: &State<N>) -> State<N> {
        let n = self.profile.eval(r);
        let ar = self.a / r;
        let k2n = self.lambda2 * n;
        let mut out = [Complex64::new(0.0, 0.0); N];
        out[0] = y[1];
        out[1] = -ar * y[1] - k2n * y[0];
        if N == 4 {
            out[2] = y[3];
            out[3] = -ar * y[3] - k2n * y[2] - 2.0 * n * self.lambda * y[0];
        }
        out
    }
}

#[inline]
fn combine<const N: usize, const K: usize>(y: &State<N>, h: f64, c: [f64; K], k: [&State<N>; K]) -> State<N> {
    let mut out = *y;
    for i in 0..N {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..K {
            acc += c[j] * k[j][i];
        }
        out[i] += h * acc;
    }
    out
}

/// Integrates the scaled state from `r0` to `R` and converts to `u = r^m f`.
pub(super) fn integrate(
    p: &RadialProfile,
    m: u32,
    lambda: Complex64,
    r0: f64,
    seed: ScaledState,
    opts: &SolverOptions,
) -> Result<BoundaryData, OdeError> {
    let (y, log_scale) = if opts.sensitivities {
        run::<4>(p, m, lambda, r0, seed, opts)?
    } else {
        let (y, l) = run::<2>(p, m, lambda, r0, [seed[0], seed[1]], opts)?;
        ([y[0], y[1], Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)], l)
    };
    let big_r = p.radius;
    let mr = f64::from(m) / big_r;
    Ok(BoundaryData {
        u: y[0],
        du: y[1] + mr * y[0],
        log_scale: log_scale + f64::from(m) * big_r.ln(),
        du_dlambda: opts.sensitivities.then(|| (y[2], y[3] + mr * y[2])),
    })
}

fn run<const N: usize>(
    p: &RadialProfile,
    m: u32,
    lambda: Complex64,
    r0: f64,
    seed: State<N>,
    opts: &SolverOptions,
) -> Result<(State<N>, f64), OdeError> {
    let rhs = Rhs { profile: p, a: 2.0 * f64::from(m) + 1.0, lambda, lambda2: lambda * lambda };
    let big_r = p.radius;
    let mut r = r0;
    let mut y = seed;
    let mut log_scale = 0.0;
    rescale(&mut y, big_r, opts.overflow_threshold, &mut log_scale);

    let freq = lambda.norm() * p.max_value().sqrt() + rhs.a / r0;
    let mut h = ((big_r - r0) / 20.0).min(0.5 / freq);
    let mut k1 = rhs.eval(r, &y);
    let mut err_old: f64 = 1e-4;
    let (mut steps, mut rejected) = (0usize, 0usize);
    let mut reject_last = false;
    let h_min = 1e-14 * big_r;

    while r < big_r {
        let last = r + h >= big_r;
        if last {
            h = big_r - r;
        }
        if h < h_min && !last {
            return Err(OdeError::Stiffness { r, h, steps, rejected, m, lambda });
        }
        if steps + rejected >= opts.max_steps {
            return Err(OdeError::Stiffness { r, h, steps, rejected, m, lambda });
        }

        let k2 = rhs.eval(r + C2 * h, &combine(&y, h, [A21], [&k1]));
        let k3 = rhs.eval(r + C3 * h, &combine(&y, h, [A31, A32], [&k1, &k2]));
        let k4 = rhs.eval(r + C4 * h, &combine(&y, h, [A41, A42, A43], [&k1, &k2, &k3]));
        let k5 = rhs.eval(r + C5 * h, &combine(&y, h, [A51, A52, A53, A54], [&k1, &k2, &k3, &k4]));
        let k6 = rhs.eval(r + h, &combine(&y, h, [A61, A62, A63, A64, A65], [&k1, &k2, &k3, &k4, &k5]));
        let y_new = combine(&y, h, [A71, A73, A74, A75, A76], [&k1, &k3, &k4, &k5, &k6]);
        let r_new = if last { big_r } else { r + h };
        let k7 = rhs.eval(r_new, &y_new);

        // error on (f, R f′) only, measured against the size of the state so
        // that the accept/reject sequence is invariant under rescaling
        let mut err: f64 = 0.0;
        let size = y[0].norm().max(big_r * y[1].norm()).max(y_new[0].norm()).max(big_r * y_new[1].norm());
        for i in 0..2 {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let w = if i == 0 { 1.0 } else { big_r };
            let sc = opts.atol * size + opts.rtol * w * y[i].norm().max(y_new[i].norm());
            err = err.max(w * e.norm() / sc);
        }
        if !err.is_finite() {
            err = 1e10;
        }

        let fac11 = err.powf(EXPO1);
        if err <= 1.0 {
            let fac = (fac11 / err_old.powf(BETA) / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            if reject_last {
                h_new = h_new.min(h);
            }
            err_old = err.max(1e-4);
            r = r_new;
            y = y_new;
            k1 = k7;
            steps += 1;
            reject_last = false;
            if rescale(&mut y, big_r, opts.overflow_threshold, &mut log_scale) {
                k1 = rhs.eval(r, &y);
            }
            if last {
                break;
            }
            h = h_new;
        } else {
            h /= (fac11 / SAFE).min(1.0 / FAC_MIN);
            rejected += 1;
            reject_last = true;
        }
    }
    Ok((y, log_scale))
}

/// Multiplies the state by `2^{−k}` when its size leaves the allowed range.
fn rescale<const N: usize>(y: &mut State<N>, big_r: f64, threshold: f64, log_scale: &mut f64) -> bool {
    let size = y[0].norm().max(big_r * y[1].norm());
    if size > threshold || (size < 1.0 / threshold && size > 0.0) {
        let k = size.log2().floor() as i32;
        let s = 2f64.powi(-k);
        for v in y.iter_mut() {
            *v *= s;
        }
        *log_scale += f64::from(k) * std::f64::consts::LN_2;
        return true;
    }
    false
}
