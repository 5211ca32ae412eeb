use crate::exactarith::{GaussianRational, Generator, SymbolExpr, Tag, RHO};

use super::ParametrixError;

/// Which recursion is run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// The eikonal/transport recursions with the refraction-index coefficients `n_k`.
    Standard,
    /// The n-free variant: every `n_k` is zero and the Laurent variable stands for `rho_t`.
    FreeCase,
}

impl Variant {
    /// Name of the Laurent variable in text output.
    pub fn variable_name(self) -> &'static str {
        match self {
            Variant::Standard => RHO,
            Variant::FreeCase => "rho_t",
        }
    }

    /// `z·n_k`, or zero in the free case.
    pub(crate) fn z_n(self, k: usize) -> SymbolExpr {
        match self {
            Variant::Standard => SymbolExpr::gen(Generator::Z) * SymbolExpr::gen(Generator::n(k as u32)),
            Variant::FreeCase => SymbolExpr::zero(),
        }
    }
}

pub(crate) fn r(k: usize) -> SymbolExpr {
    SymbolExpr::gen(Generator::r(k as u32))
}

pub(crate) fn qs(k: usize) -> SymbolExpr {
    SymbolExpr::gen(Generator::qs(k as u32))
}

pub(crate) fn qf(k: usize) -> SymbolExpr {
    SymbolExpr::gen(Generator::qf(k as u32))
}

pub(crate) fn two_i(k: i64) -> GaussianRational {
    GaussianRational::from_parts((0, 1), (2 * k, 1))
}

/// Phase coefficients `φ_1 .. φ_N` of the boundary-layer expansion.
///
/// `φ_0 = −<x', ξ'>` is implicit; its tangential gradient enters only through the
/// contractions `r_k` and `qf_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct EikonalTable {
    variant: Variant,
    phi: Vec<SymbolExpr>,
}

impl EikonalTable {
    /// Runs the eikonal recursion up to `φ_N`.
    pub fn compute(order: usize, variant: Variant) -> Result<Self, ParametrixError> {
        if order < 2 {
            return Err(ParametrixError::InvalidOrder { what: "eikonal order", got: order, min: 2 });
        }
        let mut phi: Vec<SymbolExpr> = Vec::with_capacity(order);
        phi.push(SymbolExpr::rho());
        for big_k in 1..order {
            // φ_{K+1} = [z n_K − r_K − Σ_{k+j=K; k,j≥1} (k+1)(j+1) φ_{k+1} φ_{j+1}] / (2(K+1)ρ)
            let mut num = variant.z_n(big_k) - r(big_k);
            for k in 1..big_k {
                let j = big_k - k;
                let prod = &phi[k] * &phi[j];
                num = num - prod.scale_int(((k + 1) * (j + 1)) as i64);
            }
            let c = GaussianRational::from_int(2 * (big_k as i64 + 1));
            phi.push(num.divide_by_rho_monomial(&c, 1)?);
        }
        Ok(Self { variant, phi })
    }

    pub fn order(&self) -> usize {
        self.phi.len()
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// `φ_k` for `1 ≤ k ≤ N`.
    pub fn phi(&self, k: usize) -> Result<&SymbolExpr, ParametrixError> {
        if k == 0 || k > self.phi.len() {
            return Err(ParametrixError::TableUnderflow { what: "phi", index: k, available: self.phi.len() });
        }
        Ok(&self.phi[k - 1])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &SymbolExpr)> {
        self.phi.iter().enumerate().map(|(i, p)| (i + 1, p))
    }
}

/// `φ_k^Δ`, the `x_1^k` coefficient of the Laplacian of the phase.
///
/// `φ_k^Δ = (k+1)(k+2) φ_{k+2} + Σ_{ℓ+ν=k} qs_ℓ (ν+1) φ_{ν+1} − qf_k`.
pub fn phi_delta(k: usize, table: &EikonalTable) -> Result<SymbolExpr, ParametrixError> {
    let mut out = table.phi(k + 2)?.scale_int(((k + 1) * (k + 2)) as i64);
    for nu in 0..=k {
        let ell = k - nu;
        out = out + (qs(ell) * table.phi(nu + 1)?).scale_int(nu as i64 + 1);
    }
    Ok(out - qf(k))
}

/// Amplitude coefficients `a_{k,j}` on the dependency-closed triangle
/// `0 ≤ j ≤ s`, `0 ≤ k ≤ s − j + 1`, seeded by `a_{0,0} = ψ`, `a_{0,j} = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransportTable {
    s: usize,
    rows: Vec<Vec<SymbolExpr>>,
}

impl TransportTable {
    /// Runs the transport recursion, rows `j` ascending, `k` ascending within a row.
    pub fn compute(s: usize, eikonal: &EikonalTable) -> Result<Self, ParametrixError> {
        if s < 1 {
            return Err(ParametrixError::InvalidOrder { what: "transport order", got: s, min: 1 });
        }
        if eikonal.order() < s + 3 {
            return Err(ParametrixError::TableUnderflow { what: "phi", index: s + 3, available: eikonal.order() });
        }
        let phi_deltas = (0..=s).map(|k| phi_delta(k, eikonal)).collect::<Result<Vec<_>, _>>()?;
        let mut rows: Vec<Vec<SymbolExpr>> = Vec::with_capacity(s + 1);
        for j in 0..=s {
            let seed = if j == 0 { SymbolExpr::gen(Generator::PSI) } else { SymbolExpr::zero() };
            let mut row = vec![seed];
            for big_k in 0..=(s - j) {
                let mut num = match j {
                    0 => SymbolExpr::zero(),
                    _ => -amplitude_delta(big_k, &rows[j - 1])?,
                };
                for k1 in 1..=big_k {
                    let k2 = big_k - k1;
                    let term = eikonal.phi(k1 + 1)? * &row[k2 + 1];
                    num = num - term.scale(&two_i(((k1 + 1) * (k2 + 1)) as i64));
                }
                for k1 in 0..=big_k {
                    let k2 = big_k - k1;
                    let term = &phi_deltas[k1] * &row[k2];
                    num = num - term.scale(&GaussianRational::i());
                }
                row.push(num.divide_by_rho_monomial(&two_i(big_k as i64 + 1), 1)?);
            }
            rows.push(row);
        }
        Ok(Self { s, rows })
    }

    pub fn order(&self) -> usize {
        self.s
    }

    /// Largest `k` stored in row `j`.
    pub fn row_len(&self, j: usize) -> usize {
        self.rows.get(j).map_or(0, |r| r.len() - 1)
    }

    pub fn a(&self, k: usize, j: usize) -> Result<&SymbolExpr, ParametrixError> {
        self.rows
            .get(j)
            .and_then(|row| row.get(k))
            .ok_or(ParametrixError::TableUnderflow { what: "a", index: k, available: self.row_len(j) })
    }

    /// Entries `(k, j, a_{k,j})` with `k ≥ 1`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &SymbolExpr)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(j, row)| row.iter().enumerate().skip(1).map(move |(k, a)| (k, j, a)))
    }

    pub(crate) fn row(&self, j: usize) -> &[SymbolExpr] {
        &self.rows[j]
    }
}

/// `a^Δ_{k,j-1} = (k+1)(k+2) a_{k+2,j-1} + Σ_{ℓ+ν=k} qs_ℓ (ν+1) a_{ν+1,j-1}` from the previous row.
fn amplitude_delta(k: usize, prev: &[SymbolExpr]) -> Result<SymbolExpr, ParametrixError> {
    let get = |i: usize| {
        prev.get(i)
            .ok_or(ParametrixError::TableUnderflow { what: "a", index: i, available: prev.len().saturating_sub(1) })
    };
    let mut out = get(k + 2)?.scale_int(((k + 1) * (k + 2)) as i64);
    for nu in 0..=k {
        out = out + (qs(k - nu) * get(nu + 1)?).scale_int(nu as i64 + 1);
    }
    Ok(out)
}

/// Eikonal table, transport table and DN symbol for one truncation order.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametrixTables {
    pub eikonal: EikonalTable,
    pub transport: TransportTable,
    pub dn: SymbolExpr,
}

impl ParametrixTables {
    /// Builds everything needed to certify `a_{1,j}` for `j ≤ s` (eikonal order `s + 3`).
    pub fn compute(s: usize, variant: Variant) -> Result<Self, ParametrixError> {
        if s < 1 {
            return Err(ParametrixError::InvalidOrder { what: "symbol order", got: s, min: 1 });
        }
        let eikonal = EikonalTable::compute(s + 3, variant)?;
        let transport = TransportTable::compute(s, &eikonal)?;
        let dn = dn_symbol(&transport)?;
        Ok(Self { eikonal, transport, dn })
    }

    pub fn order(&self) -> usize {
        self.transport.order()
    }

    pub fn variant(&self) -> Variant {
        self.eikonal.variant()
    }
}

/// `ρψ − i Σ_{j=0}^{s} h^{j+1} a_{1,j}`.
pub fn dn_symbol(transport: &TransportTable) -> Result<SymbolExpr, ParametrixError> {
    let psi = SymbolExpr::gen(Generator::PSI);
    let h = SymbolExpr::gen(Generator::H);
    let mut out = SymbolExpr::rho() * psi;
    let mut h_pow = h.clone();
    let minus_i = -GaussianRational::i();
    for j in 0..=transport.order() {
        out = out + (&h_pow * transport.a(1, j)?).scale(&minus_i);
        h_pow = &h_pow * &h;
    }
    Ok(out)
}

/// Standard tables for order `s`.
pub fn parametrix_tables(s: usize) -> Result<ParametrixTables, ParametrixError> {
    ParametrixTables::compute(s, Variant::Standard)
}

/// The n-free tables: same recursions with every `n_k ↦ 0` and ρ read as `rho_t`.
pub fn tilde_tables(s: usize) -> Result<ParametrixTables, ParametrixError> {
    let tables = ParametrixTables::compute(s, Variant::FreeCase)?;
    let offending = tables
        .eikonal
        .iter()
        .map(|(k, p)| (format!("phi_{k}"), p))
        .chain(tables.transport.entries().map(|(k, j, a)| (format!("a_{k},{j}"), a)))
        .chain(std::iter::once(("dn".to_string(), &tables.dn)))
        .find(|(_, e)| e.contains_tag(Tag::N));
    if let Some((name, _)) = offending {
        return Err(ParametrixError::RecursionBug { what: format!("free-case entry {name} depends on n_k"), k: 0 });
    }
    Ok(tables)
}
