//! Plate geometry and material constants.

use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Half-width, Poisson ratio and stiffening strength of the plate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlateConfig {
    /// Half-width `ell` of `Omega = ]0, pi[ x ]-ell, ell[`.
    pub ell: f64,
    /// Poisson ratio, strictly between 0 and 1.
    pub sigma: f64,
    /// Stiffening strength `d >= 0` of the reinforcement.
    pub d: f64,
}

impl PlateConfig {
    /// Preset half-width `pi / 150`.
    pub const PRESET_ELL: f64 = PI / 150.0;
    /// Preset Poisson ratio.
    pub const PRESET_SIGMA: f64 = 0.2;
    /// Preset stiffening strength.
    pub const PRESET_D: f64 = 2.0;

    /// Validated configuration.
    pub fn new(ell: f64, sigma: f64, d: f64) -> Result<Self> {
        let cfg = Self { ell, sigma, d };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `ell = pi/150`, `sigma = 0.2`, `d = 2`.
    pub const fn preset() -> Self {
        Self {
            ell: Self::PRESET_ELL,
            sigma: Self::PRESET_SIGMA,
            d: Self::PRESET_D,
        }
    }

    /// Same plate with a different stiffening strength.
    pub fn with_d(self, d: f64) -> Self {
        Self { d, ..self }
    }

    /// Checks `ell > 0`, `0 < sigma < 1` and `d >= 0`.
    pub fn validate(&self) -> Result<()> {
        if !(self.ell.is_finite() && self.ell > 0.0) {
            return Err(Error::domain(alloc::format!(
                "ell must be positive, got {}",
                self.ell
            )));
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(Error::domain(alloc::format!(
                "sigma must lie in ]0, 1[, got {}",
                self.sigma
            )));
        }
        if !(self.d.is_finite() && self.d >= 0.0) {
            return Err(Error::domain(alloc::format!(
                "d must be nonnegative, got {}",
                self.d
            )));
        }
        Ok(())
    }
}

impl Default for PlateConfig {
    fn default() -> Self {
        Self::preset()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_is_valid() {
        let c = PlateConfig::default();
        assert!(c.validate().is_ok());
        assert_eq!(c.ell, PI / 150.0);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(PlateConfig::new(-1.0, 0.2, 2.0).is_err());
        assert!(PlateConfig::new(0.1, 1.0, 2.0).is_err());
        assert!(PlateConfig::new(0.1, 0.0, 2.0).is_err());
        assert!(PlateConfig::new(0.1, 0.3, -0.5).is_err());
        assert!(PlateConfig::new(0.1, 0.3, 0.0).is_ok());
    }
}
