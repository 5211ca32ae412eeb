//! Bessel functions of the first kind `J_m` for integer order and complex argument.
//!
//! Small arguments use the Maclaurin series with compensated summation. Larger
//! arguments, or small ones where the series loses too many digits to
//! cancellation, use Miller's backward recurrence normalized by the generating
//! function identity `e^{∓ix} = J_0(x) + 2 Σ_{n≥1} (∓i)^n J_n(x)`, picking the sign
//! for which `|e^{∓ix}| = e^{|Im x|}` so the normalization sum does not cancel.

use num_complex::Complex64;

/// Largest supported order.
pub const MAX_ORDER: u32 = 200;
/// Largest supported `|x|`.
pub const MAX_ABS_ARG: f64 = 500.0;
/// Series/recurrence split radius.
pub const SERIES_RADIUS: f64 = 12.0;
/// The series is abandoned when `Σ|terms| / |sum|` exceeds this.
const SERIES_CANCELLATION_LIMIT: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BesselError {
    #[error("J_{order}({arg}) outside the supported envelope (order <= 200, |x| <= 500)")]
    Domain { order: u32, arg: Complex64 },
}

/// `J_m(x)` and `J_m'(x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselPair {
    pub value: Complex64,
    pub derivative: Complex64,
}

/// Start order of the backward recurrence.
///
/// `m + 15 + ⌈1.2|x|⌉` alone leaves `J_N(|x|) ≈ 1e−9` for `|x|` around 20–30, which
/// is the size of the truncation error; the second bound pushes `J_N` below `1e−17`
/// using the transition-region width `|x|^{1/3}`.
pub fn miller_start_order(m: u32, abs_x: f64) -> u32 {
    let base = m + 15 + (1.2 * abs_x).ceil() as u32;
    let transition = abs_x.ceil() as u32 + 25 + (8.0 * abs_x.cbrt()).ceil() as u32;
    base.max(transition)
}

fn check_domain(m: u32, x: Complex64) -> Result<(), BesselError> {
    if m > MAX_ORDER || !(x.norm() <= MAX_ABS_ARG) {
        return Err(BesselError::Domain { order: m, arg: x });
    }
    Ok(())
}

/// `J_m(x)` together with `J_m'(x) = (J_{m−1}(x) − J_{m+1}(x))/2`, `J_{−1} = −J_1`.
pub fn bessel_j_pair(m: u32, x: Complex64) -> Result<BesselPair, BesselError> {
    check_domain(m, x)?;
    let (lower, value, upper) = bessel_triple(m, x);
    Ok(BesselPair { value, derivative: (lower - upper) * 0.5 })
}

/// `J_m(x)` alone.
pub fn bessel_j(m: u32, x: Complex64) -> Result<Complex64, BesselError> {
    check_domain(m, x)?;
    if let Some(v) = series_if_accurate(m, x) {
        return Ok(v);
    }
    Ok(miller(m, x)[m as usize])
}

/// `(J_{m−1}, J_m, J_{m+1})` with `J_{−1} = −J_1`.
fn bessel_triple(m: u32, x: Complex64) -> (Complex64, Complex64, Complex64) {
    let series = || -> Option<(Complex64, Complex64, Complex64)> {
        let value = series_if_accurate(m, x)?;
        let upper = series_if_accurate(m + 1, x)?;
        let lower = if m == 0 { -upper } else { series_if_accurate(m - 1, x)? };
        Some((lower, value, upper))
    };
    if let Some(t) = series() {
        return t;
    }
    let j = miller(m + 1, x);
    let m = m as usize;
    let lower = if m == 0 { -j[1] } else { j[m - 1] };
    (lower, j[m], j[m + 1])
}

/// Maclaurin series `Σ (−x²/4)^k / (k! (k+m)!) · (x/2)^m`, or `None` when it is
/// outside the series radius or too ill-conditioned.
fn series_if_accurate(m: u32, x: Complex64) -> Option<Complex64> {
    if x.norm() > SERIES_RADIUS {
        return None;
    }
    let (sum, abs_sum) = maclaurin(m, x);
    if abs_sum > SERIES_CANCELLATION_LIMIT * sum.norm() {
        return None;
    }
    Some(sum)
}

/// Series value and `Σ|terms|`, with Neumaier-compensated summation.
fn maclaurin(m: u32, x: Complex64) -> (Complex64, f64) {
    let half = x * 0.5;
    let mut lead = Complex64::new(1.0, 0.0);
    for k in 1..=m {
        lead *= half / f64::from(k);
    }
    if lead == Complex64::new(0.0, 0.0) {
        return (lead, 0.0);
    }
    let w = -(half * half);
    let mut term = lead;
    let (mut sum, mut comp) = (term, Complex64::new(0.0, 0.0));
    let mut abs_sum = term.norm();
    for k in 1..400u32 {
        term *= w / (f64::from(k) * f64::from(k + m));
        neumaier(&mut sum, &mut comp, term);
        let t = term.norm();
        abs_sum += t;
        if t <= 1e-18 * (sum + comp).norm() && f64::from(k) > w.norm().sqrt() {
            break;
        }
    }
    (sum + comp, abs_sum)
}

fn neumaier(sum: &mut Complex64, comp: &mut Complex64, term: Complex64) {
    fn step(s: &mut f64, c: &mut f64, t: f64) {
        let new = *s + t;
        if s.abs() >= t.abs() {
            *c += (*s - new) + t;
        } else {
            *c += (t - new) + *s;
        }
        *s = new;
    }
    step(&mut sum.re, &mut comp.re, term.re);
    step(&mut sum.im, &mut comp.im, term.im);
}

/// `J_0 .. J_top` by backward recurrence.
fn miller(top: u32, x: Complex64) -> Vec<Complex64> {
    let n_top = top as usize;
    let zero = Complex64::new(0.0, 0.0);
    if x.norm() == 0.0 {
        let mut out = vec![zero; n_top + 1];
        out[0] = Complex64::new(1.0, 0.0);
        return out;
    }
    let start = miller_start_order(top, x.norm()) as usize;
    // normalization phase: (−i)^n when Im x ≥ 0, i^n otherwise
    let unit = if x.im >= 0.0 { Complex64::new(0.0, -1.0) } else { Complex64::new(0.0, 1.0) };
    let target = if x.im >= 0.0 { (-Complex64::i() * x).exp() } else { (Complex64::i() * x).exp() };

    let mut vals = vec![zero; n_top + 1];
    let mut next = zero; // f_{n+1}
    let mut cur = Complex64::new(1.0, 0.0); // f_n
    let two_over_x = 2.0 / x;
    let mut norm = zero;
    let mut phase = unit.powu(start as u32);
    let unit_inv = unit.inv();
    for n in (0..=start).rev() {
        if n <= n_top {
            vals[n] = cur;
        }
        norm += if n == 0 { cur } else { 2.0 * phase * cur };
        if n == 0 {
            break;
        }
        let prev = two_over_x * (n as f64) * cur - next;
        next = cur;
        cur = prev;
        phase *= unit_inv;
        let big = cur.norm().max(next.norm());
        if big > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            norm *= s;
            for v in vals.iter_mut() {
                *v *= s;
            }
        }
    }
    // target / norm without forming |norm|², which overflows for large |Im x|
    let s = norm.norm();
    let factor = (target / s) * (norm.conj() / s);
    vals.iter().map(|v| v * factor).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn values_at_origin() {
        let p = bessel_j_pair(0, c(0.0, 0.0)).unwrap();
        assert_eq!(p.value, c(1.0, 0.0));
        assert_eq!(p.derivative, c(0.0, 0.0));
        let p = bessel_j_pair(1, c(0.0, 0.0)).unwrap();
        assert_eq!(p.value, c(0.0, 0.0));
        assert_eq!(p.derivative, c(0.5, 0.0));
        let p = bessel_j_pair(3, c(0.0, 0.0)).unwrap();
        assert_eq!(p.value, c(0.0, 0.0));
    }

    #[test]
    fn first_zero_of_j0() {
        let v = bessel_j(0, c(2.404825557695773, 0.0)).unwrap();
        assert!(v.norm() <= 1e-11, "{v}");
    }

    #[test]
    fn known_values() {
        // J_0(1), J_1(1), J_0(30), J_5(100)
        let cases = [
            (0, 1.0, 0.7651976865579666),
            (1, 1.0, 0.4400505857449335),
            (0, 30.0, -0.08636798358104),
            (5, 100.0, -0.07419573696451),
        ];
        for (m, x, want) in cases {
            let got = bessel_j(m, c(x, 0.0)).unwrap();
            assert!((got.re - want).abs() <= 1e-12 * want.abs().max(1.0) + 1e-13, "J_{m}({x}) = {got}");
            assert!(got.im.abs() <= 1e-14);
        }
    }

    #[test]
    fn imaginary_argument_is_modified_bessel() {
        // J_1(2i) = i I_1(2), I_1(2) = 1.590636854637329
        let got = bessel_j(1, c(0.0, 2.0)).unwrap();
        assert!((got - c(0.0, 1.590636854637329)).norm() <= 1e-14);
        // J_0(40i) = I_0(40) = 1.4894774793419899e16
        let got = bessel_j(0, c(0.0, 40.0)).unwrap();
        assert!((got.re / 1.4894774793419899e16 - 1.0).abs() <= 1e-12, "{got}");
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_j_pair(201, c(1.0, 0.0)).is_err());
        assert!(bessel_j_pair(3, c(400.0, 400.0)).is_err());
        assert!(bessel_j_pair(3, c(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn large_argument_envelope_is_finite() {
        for x in [c(500.0, 0.0), c(0.0, 499.0), c(-300.0, 200.0)] {
            for m in [0, 37, 200] {
                let p = bessel_j_pair(m, x).unwrap();
                assert!(p.value.is_finite() && p.derivative.is_finite(), "J_{m}({x})");
            }
        }
    }

    #[test]
    fn conjugate_symmetry_exact_branching() {
        for &(m, x) in &[(0, c(13.0, 4.0)), (7, c(3.0, -2.0)), (30, c(45.0, 9.5))] {
            let a = bessel_j(m, x).unwrap();
            let b = bessel_j(m, x.conj()).unwrap();
            assert!((a.conj() - b).norm() <= 1e-12 * a.norm());
        }
    }
}
