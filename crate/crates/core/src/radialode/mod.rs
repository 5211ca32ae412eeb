//! Regular solutions of the radial Helmholtz equation
//! `u″ + u′/r + (λ²n(r) − m²/r²)u = 0` on `[0, R]`.
//!
//! The solver works with `f = r^{−m} u`, which is smooth at the origin and solves
//! `f″ + (2m+1) f′/r + λ²n f = 0`. A Frobenius series supplies `f` near the origin
//! and an embedded Dormand–Prince 5(4) pair carries it to `R`, optionally together
//! with the λ-derivative `g = ∂_λ f`. The state is kept in range by exact
//! power-of-two rescaling, recorded in [`BoundaryData::log_scale`].

mod integrator;
mod profile;
mod seed;

use num_complex::Complex64;
use serde::Serialize;

pub use integrator::SolverOptions;
pub use profile::{ContactFamily, RadialProfile};
pub use seed::frobenius_seed;

/// Largest supported `|λ|`.
pub const MAX_ABS_LAMBDA: f64 = 200.0;
/// Largest supported `|Im λ|`.
pub const MAX_ABS_IM_LAMBDA: f64 = 30.0;
/// Largest supported angular mode.
pub const MAX_MODE: u32 = 250;
/// Seed radius attempts before giving up.
pub const SEED_ATTEMPTS: usize = 5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OdeError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("(m = {m}, λ = {lambda}) outside the supported envelope (m <= 250, |λ| <= 200, |Im λ| <= 30)")]
    Envelope { m: u32, lambda: Complex64 },
    #[error("invalid seed radius {r0} (need 0 < r0 <= R/10 = {max})")]
    SeedRadius { r0: f64, max: f64 },
    #[error("Frobenius series did not converge at r0 = {r0} after {terms} terms")]
    SeedDivergence { r0: f64, terms: usize },
    #[error("step size underflow at r = {r} (h = {h}, {steps} steps, {rejected} rejected) for m = {m}, λ = {lambda}")]
    Stiffness { r: f64, h: f64, steps: usize, rejected: usize, m: u32, lambda: Complex64 },
}

/// Solution data at a radius. The true values are `e^{log_scale}·(u, du)`, and
/// `du_dlambda` holds `(∂_λ u, ∂_λ u′)` under the same scale when requested.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryData {
    pub u: Complex64,
    pub du: Complex64,
    pub log_scale: f64,
    pub du_dlambda: Option<(Complex64, Complex64)>,
}

impl BoundaryData {
    /// `(u, du)`.
    pub fn pair(&self) -> [Complex64; 2] {
        [self.u, self.du]
    }
}

/// Distance between the rays `R₊·a` and `R₊·b`, i.e. `‖a/‖a‖ − b/‖b‖‖`.
pub fn direction_distance(a: [Complex64; 2], b: [Complex64; 2]) -> f64 {
    let na = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
    let nb = (b[0].norm_sqr() + b[1].norm_sqr()).sqrt();
    if na == 0.0 || nb == 0.0 {
        return if na == nb { 0.0 } else { f64::INFINITY };
    }
    let d0 = a[0] / na - b[0] / nb;
    let d1 = a[1] / na - b[1] / nb;
    (d0.norm_sqr() + d1.norm_sqr()).sqrt()
}

fn check_envelope(m: u32, lambda: Complex64) -> Result<(), OdeError> {
    if m > MAX_MODE
        || !(lambda.norm() <= MAX_ABS_LAMBDA)
        || !(lambda.im.abs() <= MAX_ABS_IM_LAMBDA)
    {
        return Err(OdeError::Envelope { m, lambda });
    }
    Ok(())
}

/// Default seed radius `min(0.05 R, 0.5 / (|λ|·√max n + 1))`.
pub fn default_seed_radius(p: &RadialProfile, lambda: Complex64) -> f64 {
    (0.05 * p.radius).min(0.5 / (lambda.norm() * p.max_value().sqrt() + 1.0))
}

/// Regular solution at `r = R` with λ-sensitivities and default options.
pub fn regular_solution(p: &RadialProfile, m: u32, lambda: Complex64) -> Result<BoundaryData, OdeError> {
    regular_solution_with(p, m, lambda, &SolverOptions::default())
}

/// Regular solution at `r = R`.
pub fn regular_solution_with(
    p: &RadialProfile,
    m: u32,
    lambda: Complex64,
    opts: &SolverOptions,
) -> Result<BoundaryData, OdeError> {
    check_envelope(m, lambda)?;
    let mut r0 = default_seed_radius(p, lambda);
    let mut last_err = None;
    for _ in 0..SEED_ATTEMPTS {
        match seed::scaled_seed(p, m, lambda, r0) {
            Ok(state) => return integrator::integrate(p, m, lambda, r0, state, opts),
            Err(e @ OdeError::SeedDivergence { .. }) => {
                last_err = Some(e);
                r0 *= 0.25;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfn::bessel_j_pair;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Bessel pair `e^{−im·arg(λ√n)}·(J_m(kR), k J_m′(kR))`, `k = λ√n`, which is a
    /// positive multiple of the regular solution normalized by `f(0) = 1`.
    fn bessel_direction(m: u32, lambda: Complex64, n: f64, r: f64) -> [Complex64; 2] {
        let k = lambda * n.sqrt();
        let j = bessel_j_pair(m, k * r).unwrap();
        let phase = Complex64::from_polar(1.0, -(m as f64) * k.arg());
        [phase * j.value, phase * k * j.derivative]
    }

    #[test]
    fn constant_index_matches_bessel() {
        let p = RadialProfile::constant(1.0, 2.0).unwrap();
        for &(m, lambda) in &[(0, c(3.0, 0.0)), (1, c(10.0, 2.0)), (7, c(25.0, -6.0)), (40, c(55.0, 11.0)), (100, c(60.0, 0.5))] {
            let bd = regular_solution(&p, m, lambda).unwrap();
            let d = direction_distance(bd.pair(), bessel_direction(m, lambda, 2.0, 1.0));
            assert!(d <= 1e-9, "m={m} λ={lambda} d={d:e}");
        }
    }

    #[test]
    fn lambda_zero_is_power() {
        let p = RadialProfile::new(2.0, vec![1.0, 0.3]).unwrap();
        let bd = regular_solution(&p, 3, c(0.0, 0.0)).unwrap();
        let u = bd.u * bd.log_scale.exp();
        let du = bd.du * bd.log_scale.exp();
        assert!((u - c(8.0, 0.0)).norm() < 1e-10, "{u}");
        assert!((du - c(12.0, 0.0)).norm() < 1e-10, "{du}");
    }

    #[test]
    fn even_and_conjugate_symmetry() {
        let p = RadialProfile::new(1.0, vec![2.0, -0.5, 0.1]).unwrap();
        for &(m, lambda) in &[(0, c(7.3, 1.1)), (5, c(31.0, -4.0))] {
            let a = regular_solution(&p, m, lambda).unwrap();
            let b = regular_solution(&p, m, -lambda).unwrap();
            assert_eq!((a.u, a.du, a.log_scale), (b.u, b.du, b.log_scale));
            let (su, sdu) = a.du_dlambda.unwrap();
            assert_eq!(b.du_dlambda, Some((-su, -sdu)));
            let cj = regular_solution(&p, m, lambda.conj()).unwrap();
            assert_eq!((cj.u, cj.du, cj.log_scale), (a.u.conj(), a.du.conj(), a.log_scale));
        }
    }

    #[test]
    fn rescale_threshold_invariance() {
        let p = RadialProfile::constant(1.0, 4.0).unwrap();
        let lambda = c(40.0, 12.0);
        let lo = SolverOptions { overflow_threshold: 1e50, ..SolverOptions::default() };
        let hi = SolverOptions { overflow_threshold: 1e100, ..SolverOptions::default() };
        for m in [0, 30, 120] {
            let a = regular_solution_with(&p, m, lambda, &lo).unwrap();
            let b = regular_solution_with(&p, m, lambda, &hi).unwrap();
            assert!(direction_distance(a.pair(), b.pair()) <= 1e-12);
            let la = a.log_scale + a.u.norm().ln();
            let lb = b.log_scale + b.u.norm().ln();
            assert!((la - lb).abs() <= 1e-9 * la.abs().max(1.0));
        }
    }

    #[test]
    fn sensitivity_matches_finite_differences() {
        let p = RadialProfile::new(1.0, vec![2.0, -0.5]).unwrap();
        for &(m, lambda) in &[(0, c(5.0, 0.7)), (3, c(17.0, -2.0)), (12, c(30.0, 5.0))] {
            let bd = regular_solution(&p, m, lambda).unwrap();
            let h = 1e-6 * (1.0 + lambda.norm());
            let plus = regular_solution(&p, m, lambda + h).unwrap();
            let minus = regular_solution(&p, m, lambda - h).unwrap();
            let at = |b: &BoundaryData| b.u * (b.log_scale - bd.log_scale).exp();
            let fd = (at(&plus) - at(&minus)) / (2.0 * h);
            let (su, _) = bd.du_dlambda.unwrap();
            assert!((fd - su).norm() <= 1e-6 * su.norm(), "m={m} fd={fd} an={su}");
        }
    }

    #[test]
    fn sensitivities_do_not_change_the_value() {
        let p = RadialProfile::new(1.0, vec![1.5, 0.5]).unwrap();
        let with = regular_solution(&p, 4, c(22.0, 3.0)).unwrap();
        let opts = SolverOptions { sensitivities: false, ..SolverOptions::default() };
        let without = regular_solution_with(&p, 4, c(22.0, 3.0), &opts).unwrap();
        assert_eq!((with.u, with.du, with.log_scale), (without.u, without.du, without.log_scale));
        assert!(without.du_dlambda.is_none());
    }

    #[test]
    fn envelope_errors() {
        let p = RadialProfile::constant(1.0, 1.0).unwrap();
        assert!(matches!(regular_solution(&p, 251, c(1.0, 0.0)), Err(OdeError::Envelope { .. })));
        assert!(matches!(regular_solution(&p, 0, c(1.0, 31.0)), Err(OdeError::Envelope { .. })));
        assert!(matches!(regular_solution(&p, 0, c(201.0, 0.0)), Err(OdeError::Envelope { .. })));
    }
}
