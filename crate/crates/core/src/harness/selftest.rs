use num_complex::Complex64;
use serde::Serialize;

use crate::exactarith::{GaussianRational, Generator, SymbolExpr};
use crate::parametrix::{
    c_constant_checked, degree_report, eikonal_residual, parametrix_tables, transport_residual, verify_n_dependence,
};
use crate::radialode::{direction_distance, regular_solution, RadialProfile};
use crate::specialfn::{bessel_j, bessel_j_pair};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfTestItem {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn item(name: &'static str, r: Result<String, String>) -> SelfTestItem {
    match r {
        Ok(detail) => SelfTestItem { name, passed: true, detail },
        Err(detail) => SelfTestItem { name, passed: false, detail },
    }
}

/// Quick consistency checks of the exact, special-function and ODE layers.
pub fn selftest() -> Vec<SelfTestItem> {
    vec![
        item("exactarith", exactarith_checks()),
        item("parametrix", parametrix_checks()),
        item("specialfn", specialfn_checks()),
        item("radialode", radialode_checks()),
    ]
}

fn exactarith_checks() -> Result<String, String> {
    let a = SymbolExpr::gen(Generator::Z).shift_rho(-1) + SymbolExpr::gen(Generator::n(2)).scale(&GaussianRational::i());
    let b = SymbolExpr::gen(Generator::PSI) - SymbolExpr::int(3).shift_rho(2);
    let c = SymbolExpr::gen(Generator::r(1));
    if &(&a + &b) * &c != &(&a * &c) + &(&b * &c) {
        return Err("distributivity fails".into());
    }
    let text = (&a * &b).to_text("rho");
    let back = SymbolExpr::parse(&text, "rho").map_err(|e| e.to_string())?;
    if back != &a * &b {
        return Err(format!("text round trip fails for {text}"));
    }
    Ok("ring identity and text round trip".into())
}

fn parametrix_checks() -> Result<String, String> {
    let s = 3;
    let t = parametrix_tables(s).map_err(|e| e.to_string())?;
    eikonal_residual(&t.eikonal).map_err(|e| e.to_string())?;
    transport_residual(&t).map_err(|e| e.to_string())?;
    let n = verify_n_dependence(&t).map_err(|e| e.to_string())?;
    for k in 1..=s {
        c_constant_checked(k, &t).map_err(|e| e.to_string())?;
    }
    degree_report(&t).map_err(|e| e.to_string())?;
    Ok(format!("order {s}: residuals zero, {} n-identities, c_1..c_{s}, degree bounds", n.total()))
}

fn specialfn_checks() -> Result<String, String> {
    let z = bessel_j(0, Complex64::new(2.404825557695773, 0.0)).map_err(|e| e.to_string())?;
    if z.norm() > 1e-11 {
        return Err(format!("J0 at its first zero is {z}"));
    }
    // J_0 + 2 Σ J_{2k} = 1
    let x = Complex64::new(7.5, 2.0);
    let mut sum = bessel_j(0, x).map_err(|e| e.to_string())?;
    for k in 1..40 {
        sum += 2.0 * bessel_j(2 * k, x).map_err(|e| e.to_string())?;
    }
    if (sum - 1.0).norm() > 1e-10 {
        return Err(format!("normalization sum is {sum}"));
    }
    Ok("zero of J0 and normalization identity".into())
}

fn radialode_checks() -> Result<String, String> {
    let p = RadialProfile::constant(1.0, 2.0).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (m, l) in [(0u32, Complex64::new(5.0, 0.5)), (6, Complex64::new(21.0, -3.0))] {
        let bd = regular_solution(&p, m, l).map_err(|e| e.to_string())?;
        let k = l * 2f64.sqrt();
        let j = bessel_j_pair(m, k).map_err(|e| e.to_string())?;
        let phase = Complex64::from_polar(1.0, -(m as f64) * k.arg());
        worst = worst.max(direction_distance(bd.pair(), [phase * j.value, phase * k * j.derivative]));
    }
    if worst > 1e-9 {
        return Err(format!("direction error {worst:e}"));
    }
    Ok(format!("Bessel agreement {worst:.1e}"))
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_pass() {
        for it in super::selftest() {
            assert!(it.passed, "{}: {}", it.name, it.detail);
        }
    }
}
