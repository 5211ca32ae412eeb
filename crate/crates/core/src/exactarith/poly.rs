use std::collections::BTreeMap;
use std::fmt;

use super::{GaussianRational, Generator};

/// Power product of generators, kept sorted by generator with no zero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Generator, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(g: Generator) -> Self {
        Self(vec![(g, 1)])
    }

    /// Builds a monomial from arbitrary factors, merging repeats.
    pub fn from_factors<I: IntoIterator<Item = (Generator, u32)>>(factors: I) -> Self {
        let mut map = BTreeMap::new();
        for (g, e) in factors {
            *map.entry(g).or_insert(0) += e;
        }
        Self(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Generator, u32)] {
        &self.0
    }

    pub fn exponent(&self, g: Generator) -> u32 {
        self.0.iter().find(|(h, _)| *h == g).map_or(0, |&(_, e)| e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Lowers the exponent of `g` by one; `None` when `g` is absent.
    fn lower(&self, g: Generator) -> Option<(u32, Monomial)> {
        let pos = self.0.iter().position(|(h, _)| *h == g)?;
        let e = self.0[pos].1;
        let mut v = self.0.clone();
        if e == 1 {
            v.remove(pos);
        } else {
            v[pos].1 -= 1;
        }
        Some((e, Monomial(v)))
    }

    fn without(&self, g: Generator) -> Monomial {
        Monomial(self.0.iter().copied().filter(|(h, _)| *h != g).collect())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (g, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Multivariate polynomial over the generators with Gaussian-rational coefficients.
///
/// Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn var(g: Generator) -> Self {
        Self::term(Monomial::var(g), GaussianRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &GaussianRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly { terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn partial_derivative(&self, g: Generator) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            if let Some((e, lowered)) = m.lower(g) {
                out.add_term(lowered, c.scale_int(i64::from(e)));
            }
        }
        out
    }

    /// Drops every term containing a generator for which `pred` holds.
    pub fn drop_terms_with<F: Fn(&Generator) -> bool>(&self, pred: F) -> MultiPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !m.factors().iter().any(|(g, _)| pred(g)))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Terms with exactly `g^power`, with `g` removed.
    pub fn coefficient_of(&self, g: Generator, power: u32) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            if m.exponent(g) == power {
                out.add_term(m.without(g), c.clone());
            }
        }
        out
    }

    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        self.terms.keys().flat_map(|m| m.factors().iter().map(|(g, _)| *g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_removes_terms() {
        let x = MultiPoly::var(Generator::n(1));
        assert!(x.sub(&x).is_zero());
        assert_eq!(x.sub(&x).len(), 0);
    }

    #[test]
    fn monomial_product_merges() {
        let a = Monomial::from_factors([(Generator::Z, 1), (Generator::n(1), 2)]);
        let b = Monomial::from_factors([(Generator::n(1), 1), (Generator::PSI, 1)]);
        assert_eq!(a.mul(&b), Monomial::from_factors([(Generator::Z, 1), (Generator::PSI, 1), (Generator::n(1), 3)]));
        assert_eq!(a.mul(&b).to_string(), "z*psi*n1^3");
    }

    #[test]
    fn derivative_of_power() {
        let n1 = MultiPoly::var(Generator::n(1));
        let cube = n1.mul(&n1).mul(&n1);
        let d = cube.partial_derivative(Generator::n(1));
        assert_eq!(d, n1.mul(&n1).scale(&GaussianRational::from_int(3)));
    }
}
