//! Protocol parameters: pre-selected system state, post-selected state and
//! coupling.
//!
//! These types carry no protocol logic so that both the Kraus-map path and
//! the brute-force [`oracle`](crate::oracle) can be driven from the same
//! inputs without the oracle depending on [`protocol`](crate::protocol).

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, C64};

const ANGLE_SLACK: f64 = 1e-12;

/// System prepared as `cos θ|0> + sin θ|1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemPreparation {
    theta: f64,
}

impl SystemPreparation {
    pub fn new(theta: f64) -> Result<Self> {
        if !(-ANGLE_SLACK..=FRAC_PI_2 + ANGLE_SLACK).contains(&theta) {
            return Err(Error::InvalidArgument(format!(
                "theta = {theta} outside [0, pi/2]"
            )));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn ket(&self) -> [C64; 2] {
        [c64(self.theta.cos(), 0.0), c64(self.theta.sin(), 0.0)]
    }
}

/// Post-selected state `cos φ|0> + e^{iα} sin φ|1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PostSelection {
    phi: f64,
    alpha: f64,
}

impl PostSelection {
    /// `alpha` is reduced into `[0, 2π)`.
    pub fn new(phi: f64, alpha: f64) -> Result<Self> {
        if !(-ANGLE_SLACK..=PI + ANGLE_SLACK).contains(&phi) {
            return Err(Error::InvalidArgument(format!("phi = {phi} outside [0, pi]")));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidArgument("alpha must be finite".into()));
        }
        Ok(Self {
            phi,
            alpha: alpha.rem_euclid(TAU),
        })
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn ket(&self) -> [C64; 2] {
        let s = self.phi.sin();
        [
            c64(self.phi.cos(), 0.0),
            C64::from_polar(1.0, self.alpha) * s,
        ]
    }
}

/// Interaction strength and duration; only the product `gt` enters the
/// dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    strength: f64,
    time: f64,
    product: f64,
}

impl CouplingSpec {
    pub fn new(strength: f64, time: f64) -> Result<Self> {
        let product = strength * time;
        if !product.is_finite() || product < 0.0 || strength < 0.0 || time < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "coupling g = {strength}, t = {time} must be finite and non-negative"
            )));
        }
        Ok(Self {
            strength,
            time,
            product,
        })
    }

    /// Coupling given directly as the dimensionless product, with `t = 1`.
    pub fn from_product(gt: f64) -> Result<Self> {
        Self::new(gt, 1.0)
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Dimensionless `gt`.
    pub fn product(&self) -> f64 {
        self.product
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kets_are_normalized() {
        let p = SystemPreparation::new(0.3).unwrap();
        let f = PostSelection::new(2.0, 1.1).unwrap();
        let n = |v: [C64; 2]| v[0].norm_sqr() + v[1].norm_sqr();
        assert!((n(p.ket()) - 1.0).abs() < 1e-15);
        assert!((n(f.ket()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn range_checks() {
        assert!(SystemPreparation::new(2.0).is_err());
        assert!(PostSelection::new(-0.1, 0.0).is_err());
        assert!(PostSelection::new(3.5, 0.0).is_err());
        assert!(CouplingSpec::new(-1.0, 1.0).is_err());
        assert!((PostSelection::new(1.0, -0.5).unwrap().alpha() - (TAU - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn product_is_cached() {
        let c = CouplingSpec::new(0.01, 2.0).unwrap();
        assert_eq!(c.product(), 0.02);
    }
}
