//! Exact checks of the recursion output.
//!
//! The residuals are recomputed through truncated power series in `x_1`
//! (products of whole series) rather than by replaying the solve step, so a
//! mistake in the solve indexing shows up as a nonzero coefficient.

use serde::Serialize;

use crate::exactarith::{GaussianRational, Generator, SymbolExpr};

use super::tables::{qf, qs, r, two_i, EikonalTable, ParametrixTables, Variant};
use super::ParametrixError;

/// Polynomial in `x_1` with symbol coefficients, truncated at a fixed degree.
#[derive(Clone, Debug)]
struct XSeries {
    coeffs: Vec<SymbolExpr>,
}

impl XSeries {
    fn new(mut coeffs: Vec<SymbolExpr>, degree: usize) -> Self {
        coeffs.resize(degree + 1, SymbolExpr::zero());
        Self { coeffs }
    }

    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn coeff(&self, k: usize) -> &SymbolExpr {
        &self.coeffs[k]
    }

    fn derivative(&self) -> XSeries {
        let d = self.degree();
        let coeffs = (0..d).map(|k| self.coeffs[k + 1].scale_int(k as i64 + 1)).collect();
        XSeries::new(coeffs, d.saturating_sub(1))
    }

    fn add(&self, other: &XSeries) -> XSeries {
        let d = self.degree().min(other.degree());
        XSeries::new((0..=d).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect(), d)
    }

    fn sub(&self, other: &XSeries) -> XSeries {
        let d = self.degree().min(other.degree());
        XSeries::new((0..=d).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect(), d)
    }

    fn mul(&self, other: &XSeries) -> XSeries {
        let d = self.degree().min(other.degree());
        let coeffs = (0..=d)
            .map(|k| {
                (0..=k).fold(SymbolExpr::zero(), |acc, i| {
                    let (a, b) = (&self.coeffs[i], &other.coeffs[k - i]);
                    if a.is_zero() || b.is_zero() {
                        acc
                    } else {
                        acc + a * b
                    }
                })
            })
            .collect();
        XSeries::new(coeffs, d)
    }

    fn scale(&self, c: &GaussianRational) -> XSeries {
        XSeries::new(self.coeffs.iter().map(|e| e.scale(c)).collect(), self.degree())
    }

    fn from_fn(degree: usize, f: impl Fn(usize) -> SymbolExpr) -> XSeries {
        XSeries::new((0..=degree).map(f).collect(), degree)
    }
}

fn phase_series(eikonal: &EikonalTable) -> XSeries {
    let n = eikonal.order();
    XSeries::from_fn(n, |k| if k == 0 { SymbolExpr::zero() } else { eikonal.phi(k).cloned().unwrap_or_default() })
}

/// `x_1^K` coefficients of `(∂_{x1}φ)² + <R∇φ, ∇φ> − z n` for `0 ≤ K ≤ N−1`.
///
/// Entry `K = 0` is `ρ² + r_0 − z n_0`, nonzero because ρ is kept free; it is
/// returned, not checked. Every later entry must vanish.
pub fn eikonal_residual(eikonal: &EikonalTable) -> Result<Vec<SymbolExpr>, ParametrixError> {
    let variant = eikonal.variant();
    let dphi = phase_series(eikonal).derivative();
    let square = dphi.mul(&dphi);
    let out: Vec<SymbolExpr> =
        (0..eikonal.order()).map(|k| square.coeff(k) + &r(k) - variant.z_n(k)).collect();
    if let Some(k) = out.iter().skip(1).position(|e| !e.is_zero()) {
        return Err(ParametrixError::RecursionBug { what: "eikonal residual".into(), k: k + 1 });
    }
    Ok(out)
}

/// The expected `K = 0` eikonal residual.
pub fn leading_eikonal_defect(variant: Variant) -> SymbolExpr {
    SymbolExpr::rho_pow(2) + r(0) - variant.z_n(0)
}

/// Residual of the transport relation at every `(k, j)` with `0 ≤ j ≤ s`, `0 ≤ k ≤ s − j`.
///
/// Returned as `((k, j), residual)`; all must be exactly zero.
pub fn transport_residual(tables: &ParametrixTables) -> Result<Vec<((usize, usize), SymbolExpr)>, ParametrixError> {
    let s = tables.order();
    let deg = s + 1;
    let phase = phase_series(&tables.eikonal);
    let dphi = phase.derivative();
    let d2phi = dphi.derivative();
    let q_sharp = XSeries::from_fn(deg, qs);
    let q_flat = XSeries::from_fn(deg, qf);
    let lap_phi = d2phi.add(&q_sharp.mul(&dphi)).sub(&q_flat);
    let amp = |j: usize| XSeries::new(tables.transport.row(j).to_vec(), deg + 1);
    let i = GaussianRational::i();

    let mut out = Vec::new();
    for j in 0..=s {
        let a = amp(j);
        let mut lhs = dphi.mul(&a.derivative()).scale(&two_i(1)).add(&lap_phi.mul(&a).scale(&i));
        if j > 0 {
            let prev = amp(j - 1);
            let dprev = prev.derivative();
            lhs = lhs.add(&dprev.derivative().add(&q_sharp.mul(&dprev)));
        }
        for k in 0..=(s - j) {
            out.push(((k, j), lhs.coeff(k).clone()));
        }
    }
    if let Some(((k, j), _)) = out.iter().find(|(_, e)| !e.is_zero()) {
        return Err(ParametrixError::RecursionBug { what: format!("transport residual at j={j}"), k: *k });
    }
    Ok(out)
}

/// One verified identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub k: usize,
    pub j: Option<usize>,
    pub ell: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct NDependenceReport {
    pub phase_checks: Vec<IdentityCheck>,
    pub amplitude_checks: Vec<IdentityCheck>,
}

impl NDependenceReport {
    pub fn total(&self) -> usize {
        self.phase_checks.len() + self.amplitude_checks.len()
    }
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// `((k+j)!/k!) z ψ (−2iρ)^{−j−2}`.
pub fn amplitude_n_derivative(k: usize, j: usize) -> Result<SymbolExpr, ParametrixError> {
    let ratio = factorial(k + j) / factorial(k);
    let minus_two_i = GaussianRational::from_parts((0, 1), (-2, 1));
    let c = minus_two_i.pow(-(j as i32) - 2)?.scale_int(ratio);
    let zpsi = SymbolExpr::gen(Generator::Z) * SymbolExpr::gen(Generator::PSI);
    Ok(zpsi.scale(&c).shift_rho(-(j as i32) - 2))
}

/// `z / (2(k+1)ρ)`.
pub fn phase_n_derivative(k: usize) -> SymbolExpr {
    SymbolExpr::gen(Generator::Z).scale(&GaussianRational::from_ratio(1, 2 * (k as i64 + 1))).shift_rho(-1)
}

/// Checks, exactly, how the phase and amplitude coefficients depend on the `n_ℓ`:
///
/// * `∂φ_{k+1}/∂n_k = z/(2(k+1)ρ)` and `∂φ_{k+1}/∂n_ℓ = 0` for `ℓ > k`;
/// * `∂a_{k,j}/∂n_{k+j} = ((k+j)!/k!) z ψ (−2iρ)^{−j−2}` and `∂a_{k,j}/∂n_ℓ = 0` for `ℓ > k+j`.
pub fn verify_n_dependence(tables: &ParametrixTables) -> Result<NDependenceReport, ParametrixError> {
    let mut report = NDependenceReport::default();
    let n_max = tables.eikonal.order() + 1;
    for k in 1..tables.eikonal.order() {
        let phi = tables.eikonal.phi(k + 1)?;
        for ell in k..=n_max {
            let expected = if ell == k { phase_n_derivative(k) } else { SymbolExpr::zero() };
            if phi.partial_derivative(Generator::n(ell as u32)) != expected {
                return Err(ParametrixError::IdentityFailure { identity: "phase n-dependence", k: k + 1, j: None, ell });
            }
            report.phase_checks.push(IdentityCheck { name: format!("d phi_{} / d n_{ell}", k + 1), k: k + 1, j: None, ell });
        }
    }
    for (k, j, a) in tables.transport.entries() {
        for ell in (k + j)..=n_max {
            let expected = if ell == k + j { amplitude_n_derivative(k, j)? } else { SymbolExpr::zero() };
            if a.partial_derivative(Generator::n(ell as u32)) != expected {
                return Err(ParametrixError::IdentityFailure { identity: "amplitude n-dependence", k, j: Some(j), ell });
            }
            report.amplitude_checks.push(IdentityCheck { name: format!("d a_{k},{j} / d n_{ell}"), k, j: Some(j), ell });
        }
    }
    Ok(report)
}

/// `c_s = −i s! (−2i)^{−s−1}`.
pub fn c_constant_value(s: usize) -> Result<GaussianRational, ParametrixError> {
    if s < 1 {
        return Err(ParametrixError::InvalidOrder { what: "c_s index", got: s, min: 1 });
    }
    let minus_two_i = GaussianRational::from_parts((0, 1), (-2, 1));
    let c = &(-GaussianRational::i()).scale_int(factorial(s)) * &minus_two_i.pow(-(s as i32) - 1)?;
    Ok(c)
}

/// `c_s`, cross-checked against the `h^s n_s` part of the DN symbol in `tables`.
pub fn c_constant_checked(s: usize, tables: &ParametrixTables) -> Result<GaussianRational, ParametrixError> {
    let c = c_constant_value(s)?;
    if tables.order() + 1 < s {
        return Err(ParametrixError::TableUnderflow { what: "dn symbol h-order", index: s, available: tables.order() + 1 });
    }
    let n_s = Generator::n(s as u32);
    let h_part = tables.dn.coefficient_of(Generator::H, s as u32);
    let linear = h_part.partial_derivative(n_s);
    let zpsi = SymbolExpr::gen(Generator::Z) * SymbolExpr::gen(Generator::PSI);
    let expected = zpsi.scale(&c).shift_rho(-(s as i32) - 1);
    if linear != expected || !linear.partial_derivative(n_s).is_zero() {
        return Err(ParametrixError::RecursionBug { what: "h^s n_s coefficient of the DN symbol".into(), k: s });
    }
    Ok(c)
}

/// `c_s`, cross-checked against freshly computed tables of order `s`.
pub fn c_constant(s: usize) -> Result<GaussianRational, ParametrixError> {
    let tables = super::parametrix_tables(s.max(1))?;
    c_constant_checked(s, &tables)
}

/// One Laurent-order bound `ord ≥ bound`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeEntry {
    pub name: String,
    pub min_exponent: Option<i32>,
    pub bound: i32,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DegreeReport {
    pub entries: Vec<DegreeEntry>,
}

/// Minimum ρ-exponents against `4 − 3k` for `φ_k` (`k ≥ 2`) and `−3k − 4j` for `a_{k,j}`.
pub fn degree_report(tables: &ParametrixTables) -> Result<DegreeReport, ParametrixError> {
    let mut report = DegreeReport::default();
    let phases = tables.eikonal.iter().skip(1).map(|(k, p)| (format!("phi_{k}"), p, 4 - 3 * k as i32));
    let amps = tables
        .transport
        .entries()
        .map(|(k, j, a)| (format!("a_{k},{j}"), a, -3 * k as i32 - 4 * j as i32));
    for (name, expr, bound) in phases.chain(amps) {
        let min_exponent = expr.min_rho_exponent();
        if min_exponent.is_some_and(|m| m < bound) {
            return Err(ParametrixError::DegreeViolation { entry: name, min_exponent: min_exponent.unwrap_or(0), bound });
        }
        report.entries.push(DegreeEntry { name, min_exponent, bound });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parametrix::{parametrix_tables, tilde_tables};

    #[test]
    fn eikonal_residual_zero_beyond_leading() {
        let t = EikonalTable::compute(6, Variant::Standard).unwrap();
        let res = eikonal_residual(&t).unwrap();
        assert_eq!(res.len(), 6);
        assert_eq!(res[0], leading_eikonal_defect(Variant::Standard));
        assert!(res[1..].iter().all(SymbolExpr::is_zero));
    }

    #[test]
    fn transport_residual_zero() {
        let tables = parametrix_tables(3).unwrap();
        let res = transport_residual(&tables).unwrap();
        assert!(res.iter().any(|((k, j), _)| (*k, *j) == (0, 0)));
        assert!(res.iter().any(|((k, j), _)| (*k, *j) == (1, 1)));
        assert!(res.iter().all(|(_, e)| e.is_zero()));
        assert_eq!(res.len(), (0..=3).map(|j| 3 - j + 1).sum::<usize>());
    }

    #[test]
    fn residuals_catch_a_corrupted_table() {
        let mut tables = parametrix_tables(2).unwrap();
        let bogus = crate::parametrix::EikonalTable::compute(5, Variant::FreeCase).unwrap();
        tables.eikonal = bogus;
        assert!(transport_residual(&tables).is_err());
    }

    #[test]
    fn n_dependence_examples() {
        let tables = parametrix_tables(2).unwrap();
        let d = tables.eikonal.phi(2).unwrap().partial_derivative(Generator::n(1));
        assert_eq!(d, phase_n_derivative(1));
        assert_eq!(
            tables.transport.a(1, 0).unwrap().partial_derivative(Generator::n(1)),
            (SymbolExpr::gen(Generator::Z) * SymbolExpr::gen(Generator::PSI)).scale(&GaussianRational::from_ratio(-1, 4)).shift_rho(-2)
        );
        assert!(tables.transport.a(2, 1).unwrap().partial_derivative(Generator::n(4)).is_zero());
        let report = verify_n_dependence(&tables).unwrap();
        assert!(report.total() > 0);
    }

    #[test]
    fn c_constant_small_values() {
        assert_eq!(c_constant(1).unwrap(), GaussianRational::from_parts((0, 1), (1, 4)));
        assert_eq!(c_constant(2).unwrap(), GaussianRational::from_ratio(-1, 4));
        assert_eq!(c_constant(3).unwrap(), GaussianRational::from_parts((0, 1), (-3, 8)));
        assert!(c_constant_value(0).is_err());
    }

    #[test]
    fn degree_examples() {
        let tables = parametrix_tables(2).unwrap();
        let report = degree_report(&tables).unwrap();
        let find = |n: &str| report.entries.iter().find(|e| e.name == n).unwrap().clone();
        assert_eq!(find("phi_2").min_exponent, Some(-1));
        assert_eq!(find("phi_2").bound, -2);
        assert_eq!(find("phi_3").min_exponent, Some(-3));
        assert_eq!(find("a_1,0").min_exponent, Some(-2));
    }

    #[test]
    fn free_case_residuals() {
        let tables = tilde_tables(2).unwrap();
        let res = eikonal_residual(&tables.eikonal).unwrap();
        assert_eq!(res[0], leading_eikonal_defect(Variant::FreeCase));
        assert!(transport_residual(&tables).is_ok());
    }
}
