use serde::{Deserialize, Serialize};

use super::OdeError;

/// Number of sample points used for the positivity check.
const POSITIVITY_SAMPLES: usize = 4096;

/// Radial refraction index `n(r) = Σ_t c_t r^{2t}` on the disk of radius `R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub radius: f64,
    pub coeffs: Vec<f64>,
}

impl RadialProfile {
    /// Validates radius, coefficients and positivity on `[0, R]`.
    pub fn new(radius: f64, coeffs: Vec<f64>) -> Result<Self, OdeError> {
        let p = Self { radius, coeffs };
        p.validate()?;
        Ok(p)
    }

    pub fn constant(radius: f64, value: f64) -> Result<Self, OdeError> {
        Self::new(radius, vec![value])
    }

    pub fn validate(&self) -> Result<(), OdeError> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(OdeError::InvalidProfile(format!("radius must be positive, got {}", self.radius)));
        }
        if self.coeffs.is_empty() || self.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(OdeError::InvalidProfile("coefficients must be a nonempty list of finite numbers".into()));
        }
        let r_max = self.radius;
        for i in 0..=POSITIVITY_SAMPLES {
            let r = r_max * i as f64 / POSITIVITY_SAMPLES as f64;
            let v = self.eval(r);
            if !(v > 0.0) {
                return Err(OdeError::InvalidProfile(format!("n({r}) = {v} is not positive")));
            }
        }
        let h = r_max / POSITIVITY_SAMPLES as f64;
        let v_end = self.eval(r_max);
        if v_end - h * self.derivative(r_max).abs() <= 0.0 {
            return Err(OdeError::InvalidProfile("n too close to zero near r = R".into()));
        }
        Ok(())
    }

    /// `n(r)`.
    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        let r2 = r * r;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r2 + c)
    }

    /// `n'(r)`.
    pub fn derivative(&self, r: f64) -> f64 {
        let r2 = r * r;
        let mut acc = 0.0;
        for (t, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * r2 + 2.0 * t as f64 * c;
        }
        r * acc
    }

    /// `max n` on `[0, R]` from dense sampling.
    pub fn max_value(&self) -> f64 {
        (0..=256)
            .map(|i| self.eval(self.radius * i as f64 / 256.0))
            .fold(f64::MIN, f64::max)
    }

    /// `∫_disk n dA = 2π Σ_t c_t R^{2t+2} / (2t+2)`.
    pub fn area_integral(&self) -> f64 {
        let r2 = self.radius * self.radius;
        let mut pow = r2;
        let mut acc = 0.0;
        for (t, c) in self.coeffs.iter().enumerate() {
            acc += c * pow / (2.0 * t as f64 + 2.0);
            pow *= r2;
        }
        2.0 * std::f64::consts::PI * acc
    }

    /// `d^s/dr^s n(r)` at `r`, via the monomial expansion.
    pub fn radial_derivative(&self, s: u32, r: f64) -> f64 {
        let mut acc = 0.0;
        for (t, c) in self.coeffs.iter().enumerate() {
            let p = 2 * t as u32;
            if p < s {
                continue;
            }
            let falling: f64 = (0..s).map(|i| f64::from(p - i)).product();
            acc += c * falling * r.powi((p - s) as i32);
        }
        acc
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().skip(1).all(|c| *c == 0.0)
    }
}

/// Pair of indices `n₁ = n₂ + c (R² − r²)^j` with boundary contact of exact order `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactFamily {
    pub base: RadialProfile,
    pub amplitude: f64,
    pub order: u32,
}

impl ContactFamily {
    pub fn new(base: RadialProfile, amplitude: f64, order: u32) -> Result<Self, OdeError> {
        let f = Self { base, amplitude, order };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), OdeError> {
        self.base.validate()?;
        if self.order < 1 {
            return Err(OdeError::InvalidProfile("contact order must be at least 1".into()));
        }
        if !(self.amplitude.is_finite() && self.amplitude != 0.0) {
            return Err(OdeError::InvalidProfile("contact amplitude must be finite and nonzero".into()));
        }
        self.perturbed().validate()
    }

    /// `n₁ = n₂ + c (R² − r²)^j` expanded in powers of `r²`.
    pub fn perturbed(&self) -> RadialProfile {
        let j = self.order as usize;
        let r2 = self.base.radius * self.base.radius;
        let mut coeffs = self.base.coeffs.clone();
        coeffs.resize(coeffs.len().max(j + 1), 0.0);
        let mut binom = 1.0;
        for t in 0..=j {
            if t > 0 {
                binom = binom * (j - t + 1) as f64 / t as f64;
            }
            let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[t] += self.amplitude * binom * sign * r2.powi((j - t) as i32);
        }
        RadialProfile { radius: self.base.radius, coeffs }
    }

    /// `(n₁, n₂)`.
    pub fn profiles(&self) -> (RadialProfile, RadialProfile) {
        (self.perturbed(), self.base.clone())
    }
}
