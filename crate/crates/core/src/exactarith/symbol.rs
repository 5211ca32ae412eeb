use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{ArithError, GaussianRational, Generator, Monomial, MultiPoly, Tag};

/// Name of the distinguished Laurent variable in text form.
pub const RHO: &str = "rho";

/// Laurent polynomial in the distinguished variable ρ with [`MultiPoly`] coefficients.
///
/// ρ is an independent transcendental: no relation such as `ρ² = z n₀ − r₀` is
/// imposed. Zero coefficient polynomials are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SymbolExpr {
    coeffs: BTreeMap<i32, MultiPoly>,
}

impl SymbolExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_poly(MultiPoly::constant(c), 0)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(GaussianRational::from_int(n))
    }

    /// `ρ^d`.
    pub fn rho_pow(d: i32) -> Self {
        Self::from_poly(MultiPoly::constant(GaussianRational::one()), d)
    }

    pub fn rho() -> Self {
        Self::rho_pow(1)
    }

    pub fn gen(g: Generator) -> Self {
        Self::from_poly(MultiPoly::var(g), 0)
    }

    /// `p · ρ^d`.
    pub fn from_poly(p: MultiPoly, d: i32) -> Self {
        let mut coeffs = BTreeMap::new();
        if !p.is_zero() {
            coeffs.insert(d, p);
        }
        Self { coeffs }
    }

    /// Single term `c · m · ρ^d`.
    pub fn term(c: GaussianRational, m: Monomial, d: i32) -> Self {
        Self::from_poly(MultiPoly::term(m, c), d)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient polynomials keyed by ρ-exponent, ascending.
    pub fn rho_coefficients(&self) -> impl DoubleEndedIterator<Item = (i32, &MultiPoly)> {
        self.coeffs.iter().map(|(d, p)| (*d, p))
    }

    pub fn rho_coefficient(&self, d: i32) -> Option<&MultiPoly> {
        self.coeffs.get(&d)
    }

    pub fn min_rho_exponent(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_rho_exponent(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.values().map(MultiPoly::len).sum()
    }

    fn combine(&self, other: &SymbolExpr, f: impl Fn(&MultiPoly, &MultiPoly) -> MultiPoly) -> SymbolExpr {
        let zero = MultiPoly::zero();
        let mut coeffs = BTreeMap::new();
        for d in self.coeffs.keys().chain(other.coeffs.keys()) {
            if coeffs.contains_key(d) {
                continue;
            }
            let p = f(self.coeffs.get(d).unwrap_or(&zero), other.coeffs.get(d).unwrap_or(&zero));
            if !p.is_zero() {
                coeffs.insert(*d, p);
            }
        }
        SymbolExpr { coeffs }
    }

    fn map_polys(&self, f: impl Fn(&MultiPoly) -> MultiPoly) -> SymbolExpr {
        SymbolExpr {
            coeffs: self
                .coeffs
                .iter()
                .map(|(d, p)| (*d, f(p)))
                .filter(|(_, p)| !p.is_zero())
                .collect(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> SymbolExpr {
        self.map_polys(|p| p.scale(c))
    }

    pub fn scale_int(&self, k: i64) -> SymbolExpr {
        self.scale(&GaussianRational::from_int(k))
    }

    /// Multiplies by `ρ^d`.
    pub fn shift_rho(&self, d: i32) -> SymbolExpr {
        SymbolExpr { coeffs: self.coeffs.iter().map(|(e, p)| (e + d, p.clone())).collect() }
    }

    /// Exact quotient by the monomial `c · ρ^d`.
    pub fn divide_by_rho_monomial(&self, c: &GaussianRational, d: i32) -> Result<SymbolExpr, ArithError> {
        let inv = c.inv()?;
        Ok(self.scale(&inv).shift_rho(-d))
    }

    /// Formal partial derivative with respect to a generator (ρ held fixed).
    pub fn partial_derivative(&self, g: Generator) -> SymbolExpr {
        self.map_polys(|p| p.partial_derivative(g))
    }

    /// Sets every listed generator to zero.
    pub fn substitute_zero(&self, gens: &[Generator]) -> SymbolExpr {
        self.map_polys(|p| p.drop_terms_with(|g| gens.contains(g)))
    }

    /// Sets every generator of the given family (all indices) to zero.
    pub fn substitute_zero_tag(&self, tag: Tag) -> SymbolExpr {
        self.map_polys(|p| p.drop_terms_with(|g| g.tag == tag))
    }

    /// Part of the expression carrying exactly `g^power`, with `g` removed.
    pub fn coefficient_of(&self, g: Generator, power: u32) -> SymbolExpr {
        self.map_polys(|p| p.coefficient_of(g, power))
    }

    pub fn contains_tag(&self, tag: Tag) -> bool {
        self.coeffs.values().any(|p| p.generators().any(|g| g.tag == tag))
    }

    pub fn contains_generator(&self, g: Generator) -> bool {
        self.coeffs.values().any(|p| p.generators().any(|h| h == g))
    }

    /// Deterministic text form using `var` as the name of the Laurent variable.
    ///
    /// Terms run by descending ρ-exponent, then ascending monomial order;
    /// coefficients print as `(a/b+c/d*i)`.
    pub fn to_text(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::with_capacity(self.term_count());
        for (d, p) in self.coeffs.iter().rev() {
            for (m, c) in p.terms() {
                let mut s = format!("({c})");
                if !m.is_one() {
                    s.push('*');
                    s.push_str(&m.to_string());
                }
                if *d != 0 {
                    s.push_str(&format!("*{var}^{d}"));
                }
                parts.push(s);
            }
        }
        parts.join(" + ")
    }

    /// Parses the output of [`SymbolExpr::to_text`].
    pub fn parse(text: &str, var: &str) -> Result<SymbolExpr, ArithError> {
        let text = text.trim();
        let mut out = SymbolExpr::zero();
        if text == "0" {
            return Ok(out);
        }
        for raw in text.split(" + ") {
            let raw = raw.trim();
            let inner_end = raw
                .find(')')
                .filter(|_| raw.starts_with('('))
                .ok_or_else(|| ArithError::Parse(format!("term `{raw}` must start with a parenthesized coefficient")))?;
            let coeff: GaussianRational = raw[1..inner_end].parse()?;
            let mut rho_exp = 0i32;
            let mut factors = Vec::new();
            let rest = &raw[inner_end + 1..];
            if !rest.is_empty() {
                let rest = rest
                    .strip_prefix('*')
                    .ok_or_else(|| ArithError::Parse(format!("malformed term `{raw}`")))?;
                for factor in rest.split('*') {
                    let (name, exp) = match factor.split_once('^') {
                        Some((n, e)) => (n, e),
                        None => (factor, "1"),
                    };
                    if name == var {
                        rho_exp += exp
                            .parse::<i32>()
                            .map_err(|_| ArithError::Parse(format!("bad exponent in `{factor}`")))?;
                    } else {
                        let g: Generator = name.parse()?;
                        let e = exp
                            .parse::<u32>()
                            .map_err(|_| ArithError::Parse(format!("bad exponent in `{factor}`")))?;
                        factors.push((g, e));
                    }
                }
            }
            out = &out + &SymbolExpr::term(coeff, Monomial::from_factors(factors), rho_exp);
        }
        Ok(out)
    }
}

impl fmt::Display for SymbolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(RHO))
    }
}

impl Add for &SymbolExpr {
    type Output = SymbolExpr;
    fn add(self, rhs: &SymbolExpr) -> SymbolExpr {
        self.combine(rhs, MultiPoly::add)
    }
}

impl Sub for &SymbolExpr {
    type Output = SymbolExpr;
    fn sub(self, rhs: &SymbolExpr) -> SymbolExpr {
        self.combine(rhs, MultiPoly::sub)
    }
}

impl Mul for &SymbolExpr {
    type Output = SymbolExpr;
    fn mul(self, rhs: &SymbolExpr) -> SymbolExpr {
        let mut coeffs: BTreeMap<i32, MultiPoly> = BTreeMap::new();
        for (da, pa) in &self.coeffs {
            for (db, pb) in &rhs.coeffs {
                let prod = pa.mul(pb);
                let slot = coeffs.entry(da + db).or_default();
                *slot = slot.add(&prod);
            }
        }
        coeffs.retain(|_, p| !p.is_zero());
        SymbolExpr { coeffs }
    }
}

impl Neg for &SymbolExpr {
    type Output = SymbolExpr;
    fn neg(self) -> SymbolExpr {
        self.map_polys(MultiPoly::neg)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for SymbolExpr {
            type Output = SymbolExpr;
            fn $m(self, rhs: SymbolExpr) -> SymbolExpr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&SymbolExpr> for SymbolExpr {
            type Output = SymbolExpr;
            fn $m(self, rhs: &SymbolExpr) -> SymbolExpr {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for SymbolExpr {
    type Output = SymbolExpr;
    fn neg(self) -> SymbolExpr {
        -(&self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> GaussianRational {
        GaussianRational::from_ratio(n, d)
    }

    fn z() -> SymbolExpr {
        SymbolExpr::gen(Generator::Z)
    }

    fn n(k: u32) -> SymbolExpr {
        SymbolExpr::gen(Generator::n(k))
    }

    fn r(k: u32) -> SymbolExpr {
        SymbolExpr::gen(Generator::r(k))
    }

    #[test]
    fn difference_of_squares() {
        let rho = SymbolExpr::rho();
        let one = SymbolExpr::one();
        let lhs = (&rho + &one) * (&rho - &one);
        assert_eq!(lhs, SymbolExpr::rho_pow(2) - one);
    }

    #[test]
    fn monomial_product() {
        let a = z() * n(1) * SymbolExpr::rho_pow(-1);
        let b = SymbolExpr::constant(q(1, 4)) * SymbolExpr::rho_pow(-1);
        assert_eq!(&a * &b, (z() * n(1)).scale(&q(1, 4)).shift_rho(-2));
    }

    #[test]
    fn divide_by_rho_monomial_examples() {
        let a = z() * n(1) - r(1);
        let got = a.divide_by_rho_monomial(&GaussianRational::from_int(4), 1).unwrap();
        assert_eq!(got, a.scale(&q(1, 4)).shift_rho(-1));

        let got = SymbolExpr::rho_pow(2).divide_by_rho_monomial(&GaussianRational::one(), 2).unwrap();
        assert_eq!(got, SymbolExpr::one());

        let err = a.divide_by_rho_monomial(&GaussianRational::zero(), 1);
        assert_eq!(err, Err(ArithError::DivisionByZero));
    }

    #[test]
    fn derivative_examples() {
        let a = z() * n(1) * SymbolExpr::rho_pow(-1);
        assert_eq!(a.partial_derivative(Generator::n(1)), z() * SymbolExpr::rho_pow(-1));
        assert!(a.partial_derivative(Generator::n(2)).is_zero());
    }

    #[test]
    fn substitute_zero_examples() {
        let a = (z() * n(1) + r(1)) * SymbolExpr::rho_pow(-1);
        assert_eq!(a.substitute_zero_tag(Tag::N), r(1) * SymbolExpr::rho_pow(-1));
        assert_eq!(a.substitute_zero(&[Generator::qs(0)]), a);
        assert_eq!(a.substitute_zero(&[Generator::n(1), Generator::r(1)]), SymbolExpr::zero());
    }

    #[test]
    fn coefficient_extraction() {
        let h = SymbolExpr::gen(Generator::H);
        let a = &h * &z() + &h * &h * &n(2) + SymbolExpr::rho();
        assert_eq!(a.coefficient_of(Generator::H, 1), z());
        assert_eq!(a.coefficient_of(Generator::H, 2), n(2));
        assert_eq!(a.coefficient_of(Generator::H, 0), SymbolExpr::rho());
    }

    #[test]
    fn text_form_is_sorted_and_parses() {
        let a = (z() * n(1) - r(1)).scale(&q(1, 4)).shift_rho(-1) + SymbolExpr::rho().scale(&GaussianRational::i());
        let text = a.to_text(RHO);
        assert_eq!(text, "(0/1+1/1*i)*rho^1 + (1/4+0/1*i)*z*n1*rho^-1 + (-1/4+0/1*i)*r1*rho^-1");
        assert_eq!(SymbolExpr::parse(&text, RHO).unwrap(), a);
        assert_eq!(SymbolExpr::zero().to_text(RHO), "0");
        assert!(SymbolExpr::parse("(1/1+0/1*i)*foo3", RHO).is_err());
    }
}
