use num_complex::Complex64;

use super::{check_envelope, BoundaryData, OdeError, RadialProfile};

const MAX_TERMS: usize = 400;
const TAIL_TOL: f64 = 1e-17;
/// `Σ|terms| / |sum|` above this means the seed lost too many digits.
const CANCELLATION_LIMIT: f64 = 1e6;

/// `(f, f′, ∂_λ f, ∂_λ f′)` at the seed radius for `f = r^{−m} u`.
pub(super) type ScaledState = [Complex64; 4];

/// Frobenius seed at `r0`: `u = r^m Σ_t b_t r^{2t}` with `b₀ = 1` and
/// `b_t = −λ² Σ_{p+s=t−1} c_p b_s / (4t(t+m))`.
pub fn frobenius_seed(p: &RadialProfile, m: u32, lambda: Complex64, r0: f64) -> Result<BoundaryData, OdeError> {
    check_envelope(m, lambda)?;
    let max = p.radius / 10.0;
    if !(r0 > 0.0 && r0 <= max) {
        return Err(OdeError::SeedRadius { r0, max });
    }
    let [f, df, g, dg] = scaled_seed(p, m, lambda, r0)?;
    let mr = f64::from(m) / r0;
    Ok(BoundaryData {
        u: f,
        du: df + mr * f,
        log_scale: f64::from(m) * r0.ln(),
        du_dlambda: Some((g, dg + mr * g)),
    })
}

/// Sums the series in the variable `T_t = b_t r0^{2t}`, whose recurrence is
/// `T_t = −(λ r0)² Σ_{p+s=t−1} c_p r0^{2p} T_s / (4t(t+m))`, together with its
/// λ-derivative.
pub(super) fn scaled_seed(p: &RadialProfile, m: u32, lambda: Complex64, r0: f64) -> Result<ScaledState, OdeError> {
    let r2 = r0 * r0;
    let mut cp = Vec::with_capacity(p.coeffs.len());
    let mut pow = 1.0;
    for c in &p.coeffs {
        cp.push(c * pow);
        pow *= r2;
    }
    let w = lambda * lambda * r2;
    let dw = 2.0 * lambda * r2;
    let zero = Complex64::new(0.0, 0.0);

    let mut t_terms = vec![Complex64::new(1.0, 0.0)];
    let mut d_terms = vec![zero];
    let (mut f, mut rf1, mut g, mut rg1) = (t_terms[0], zero, zero, zero);
    let (mut abs_f, mut abs_g) = (1.0, 0.0);
    let mut quiet = 0;
    for t in 1..=MAX_TERMS {
        let (mut conv, mut dconv) = (zero, zero);
        for (pi, c) in cp.iter().enumerate().take(t) {
            let s = t - 1 - pi;
            conv += c * t_terms[s];
            dconv += c * d_terms[s];
        }
        let denom = 4.0 * t as f64 * (t as f64 + f64::from(m));
        let tt = -w * conv / denom;
        let dt = -(dw * conv + w * dconv) / denom;
        t_terms.push(tt);
        d_terms.push(dt);
        let two_t = 2.0 * t as f64;
        f += tt;
        rf1 += two_t * tt;
        g += dt;
        rg1 += two_t * dt;
        abs_f += tt.norm();
        abs_g += dt.norm();
        if !(abs_f.is_finite() && abs_g.is_finite()) {
            return Err(OdeError::SeedDivergence { r0, terms: t });
        }
        let small = tt.norm() <= TAIL_TOL * abs_f && dt.norm() <= TAIL_TOL * abs_g.max(f64::MIN_POSITIVE);
        quiet = if small { quiet + 1 } else { 0 };
        if quiet >= 2 {
            if abs_f > CANCELLATION_LIMIT * f.norm() {
                return Err(OdeError::SeedDivergence { r0, terms: t });
            }
            return Ok([f, rf1 / r0, g, rg1 / r0]);
        }
    }
    Err(OdeError::SeedDivergence { r0, terms: MAX_TERMS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfn::bessel_j_pair;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lambda_zero_gives_monomial() {
        let p = RadialProfile::new(1.0, vec![3.0, 1.0]).unwrap();
        for m in [0u32, 1, 4] {
            let bd = frobenius_seed(&p, m, c(0.0, 0.0), 0.08).unwrap();
            let s = bd.log_scale.exp();
            assert!((bd.u * s - c(0.08f64.powi(m as i32), 0.0)).norm() <= 1e-15);
            let want = f64::from(m) * 0.08f64.powi(m as i32 - 1);
            assert!((bd.du * s - c(want, 0.0)).norm() <= 1e-14 * want.max(1.0));
        }
    }

    #[test]
    fn first_coefficient() {
        // n = 1, m = 0: f = 1 − λ²r²/4 + O(r⁴); isolate b₁ from two radii
        let p = RadialProfile::constant(1.0, 1.0).unwrap();
        let lambda = c(1.3, 0.4);
        let r0 = 1e-3;
        let bd = frobenius_seed(&p, 0, lambda, r0).unwrap();
        let b1 = (bd.u - 1.0) / (r0 * r0);
        assert!((b1 + lambda * lambda / 4.0).norm() <= 1e-6);
    }

    #[test]
    fn matches_scaled_bessel_pair() {
        for &(m, lambda, n) in &[(0u32, c(5.0, 0.0), 1.0), (2, c(8.0, 3.0), 2.0), (9, c(40.0, -10.0), 4.0)] {
            let p = RadialProfile::constant(1.0, n).unwrap();
            let r0 = 0.5 / (lambda.norm() * f64::sqrt(n) + 1.0);
            let bd = frobenius_seed(&p, m, lambda, r0).unwrap();
            let k = lambda * n.sqrt();
            let j = bessel_j_pair(m, k * r0).unwrap();
            let fact: f64 = (1..=m).map(f64::from).product();
            let pre = (k / 2.0).powi(-(m as i32)) * fact;
            let s = bd.log_scale.exp();
            let (u, du) = (bd.u * s, bd.du * s);
            let (ju, jdu) = (pre * j.value, pre * k * j.derivative);
            assert!((u - ju).norm() <= 1e-11 * ju.norm(), "m={m}: {u} vs {ju}");
            assert!((du - jdu).norm() <= 1e-11 * jdu.norm().max(u.norm() / r0), "m={m}: {du} vs {jdu}");
        }
    }

    #[test]
    fn rejects_large_seed_radius() {
        let p = RadialProfile::constant(1.0, 1.0).unwrap();
        assert!(matches!(frobenius_seed(&p, 0, c(1.0, 0.0), 0.2), Err(OdeError::SeedRadius { .. })));
        assert!(matches!(frobenius_seed(&p, 0, c(1.0, 0.0), 0.0), Err(OdeError::SeedRadius { .. })));
    }

    #[test]
    fn divergent_tail_is_reported() {
        let p = RadialProfile::constant(1000.0, 1.0).unwrap();
        let r = frobenius_seed(&p, 0, c(0.0, 30.0), 100.0);
        assert!(matches!(r, Err(OdeError::SeedDivergence { .. })), "{r:?}");
    }
}
