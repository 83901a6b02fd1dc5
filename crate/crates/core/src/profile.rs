use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite bounds standing in for every limit: ball radius, power bound,
/// exponent bound, end threshold and RNG seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationProfile {
    pub horizon: usize,
    pub power_bound: usize,
    pub exponent_bound: usize,
    pub end_threshold: u64,
    pub seed: u64,
}

impl Default for TruncationProfile {
    fn default() -> Self {
        TruncationProfile {
            horizon: 8,
            power_bound: 40,
            exponent_bound: 64,
            end_threshold: 5,
            seed: 0,
        }
    }
}

impl TruncationProfile {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 || self.exponent_bound == 0 || self.end_threshold == 0 {
            return Err(Error::InvalidProfile(
                "horizon, exponent bound and threshold must be positive".into(),
            ));
        }
        if self.power_bound < 4 {
            return Err(Error::InvalidProfile(format!(
                "power bound must be at least 4, got {}",
                self.power_bound
            )));
        }
        Ok(())
    }

    pub fn with_power_bound(mut self, n: usize) -> Self {
        self.power_bound = n;
        self
    }

    pub fn with_horizon(mut self, r: usize) -> Self {
        self.horizon = r;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// First index of the upper half window `[ceil(N/2), N]`.
    pub fn upper_half_start(&self) -> usize {
        self.power_bound.div_ceil(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let p = TruncationProfile::default();
        p.validate().unwrap();
        assert_eq!(p.upper_half_start(), 20);
        assert_eq!(p.with_power_bound(5).upper_half_start(), 3);
    }

    #[test]
    fn small_power_bound_rejected() {
        let p = TruncationProfile::default().with_power_bound(3);
        assert!(matches!(p.validate(), Err(Error::InvalidProfile(_))));
    }
}
