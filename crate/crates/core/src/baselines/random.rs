use crate::error::{PricingError, Result};
use crate::policy::PricingPolicy;
use crate::rng::{open_unit, SimRng};

/// Prices drawn uniformly from `(0, p_max)`.
#[derive(Debug)]
pub struct RandomPolicy {
    p_max: f64,
    rng: SimRng,
}

impl RandomPolicy {
    pub fn new(p_max: f64, rng: SimRng) -> Result<Self> {
        if !(p_max > 0.0 && p_max.is_finite()) {
            return Err(PricingError::InvalidParameter(format!("p_max must be positive, got {p_max}")));
        }
        Ok(Self { p_max, rng })
    }
}

impl PricingPolicy for RandomPolicy {
    fn name(&self) -> &str {
        "random"
    }

    fn price(&mut self, _x: &[f64]) -> Result<f64> {
        Ok(self.p_max * open_unit(&mut self.rng))
    }

    fn observe(&mut self, _x: &[f64], _price: f64, _purchased: bool) -> Result<()> {
        Ok(())
    }
}
