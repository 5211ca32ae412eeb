use std::fmt;
use std::str::FromStr;

use super::ArithError;

/// Family of a formal generator. The declaration order fixes the monomial ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    /// Rescaled spectral parameter.
    Z,
    /// Semiclassical parameter.
    H,
    /// Boundary cutoff symbol multiplying the amplitude.
    Psi,
    /// Normal Taylor coefficient of the refraction index.
    N,
    /// Contraction `<R_k xi', xi'>` of the metric Taylor coefficient.
    R,
    /// Scalar first-order coefficient of the Laplacian.
    Qs,
    /// Contraction `<q_k, xi'>` of the vector first-order coefficient.
    Qf,
    /// Free-case principal symbol `i sqrt(r_0)`.
    RhoT,
}

impl Tag {
    pub fn is_indexed(self) -> bool {
        matches!(self, Tag::N | Tag::R | Tag::Qs | Tag::Qf)
    }

    fn prefix(self) -> &'static str {
        match self {
            Tag::Z => "z",
            Tag::H => "h",
            Tag::Psi => "psi",
            Tag::N => "n",
            Tag::R => "r",
            Tag::Qs => "qs",
            Tag::Qf => "qf",
            Tag::RhoT => "rho_t",
        }
    }
}

/// A formal commuting generator `tag(index)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub tag: Tag,
    pub index: u32,
}

impl Generator {
    pub const Z: Generator = Generator { tag: Tag::Z, index: 0 };
    pub const H: Generator = Generator { tag: Tag::H, index: 0 };
    pub const PSI: Generator = Generator { tag: Tag::Psi, index: 0 };
    pub const RHO_T: Generator = Generator { tag: Tag::RhoT, index: 0 };

    pub fn n(k: u32) -> Self {
        Self { tag: Tag::N, index: k }
    }

    pub fn r(k: u32) -> Self {
        Self { tag: Tag::R, index: k }
    }

    pub fn qs(k: u32) -> Self {
        Self { tag: Tag::Qs, index: k }
    }

    pub fn qf(k: u32) -> Self {
        Self { tag: Tag::Qf, index: k }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tag.is_indexed() {
            write!(f, "{}{}", self.tag.prefix(), self.index)
        } else {
            f.write_str(self.tag.prefix())
        }
    }
}

impl FromStr for Generator {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || ArithError::UnknownGenerator(s.to_string());
        match s {
            "z" => return Ok(Self::Z),
            "h" => return Ok(Self::H),
            "psi" => return Ok(Self::PSI),
            "rho_t" => return Ok(Self::RHO_T),
            _ => {}
        }
        let digits = s.find(|c: char| c.is_ascii_digit()).ok_or_else(unknown)?;
        let (prefix, index) = s.split_at(digits);
        let tag = match prefix {
            "n" => Tag::N,
            "r" => Tag::R,
            "qs" => Tag::Qs,
            "qf" => Tag::Qf,
            _ => return Err(unknown()),
        };
        if index.len() > 1 && index.starts_with('0') {
            return Err(unknown());
        }
        let index = index.parse::<u32>().map_err(|_| unknown())?;
        Ok(Self { tag, index })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for g in [Generator::Z, Generator::H, Generator::PSI, Generator::RHO_T, Generator::n(0), Generator::r(12), Generator::qs(3), Generator::qf(7)] {
            assert_eq!(g.to_string().parse::<Generator>().unwrap(), g);
        }
    }

    #[test]
    fn unknown_tags_rejected() {
        for s in ["x", "n", "q3", "rho", "n-1", "n01", "psi2", ""] {
            assert!(s.parse::<Generator>().is_err(), "{s}");
        }
    }

    #[test]
    fn ordering_follows_tag_then_index() {
        assert!(Generator::Z < Generator::n(5));
        assert!(Generator::n(1) < Generator::n(2));
        assert!(Generator::n(9) < Generator::r(0));
    }
}
