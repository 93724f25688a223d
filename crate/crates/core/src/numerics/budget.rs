use serde::Serialize;

use crate::error::{Error, Result};

/// Working precision and the absolute error a caller is asking for.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrecisionBudget {
    pub working_bits: u32,
    pub target_abs_error: f64,
}

impl PrecisionBudget {
    pub fn new(working_bits: u32, target_abs_error: f64) -> Result<Self> {
        if working_bits < 64 {
            return Err(Error::Domain(format!("working_bits must be >= 64, got {working_bits}")));
        }
        if !(target_abs_error > 0.0) {
            return Err(Error::Domain("target_abs_error must be positive".into()));
        }
        Ok(PrecisionBudget { working_bits, target_abs_error })
    }

    /// `working_bits = ceil(3.33 * digits) + 64`, target `10^-digits`.
    pub fn from_digits(digits: u32) -> Self {
        let digits = digits.clamp(1, 280);
        PrecisionBudget {
            working_bits: (digits as f64 * 3.33).ceil() as u32 + 64,
            target_abs_error: 10f64.powi(-(digits as i32)),
        }
    }

    /// Decimal digits this budget targets.
    pub fn digits(&self) -> u32 {
        (-self.target_abs_error.log10()).round().max(1.0) as u32
    }

    pub fn with_target(&self, target_abs_error: f64) -> Self {
        PrecisionBudget { working_bits: self.working_bits, target_abs_error }
    }

    /// Same target with `extra` guard bits.
    pub fn with_extra_bits(&self, extra: u32) -> Self {
        PrecisionBudget { working_bits: self.working_bits + extra, target_abs_error: self.target_abs_error }
    }

    /// Budget for `factor` times as many digits.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_digits((self.digits() as f64 * factor).ceil() as u32)
    }
}
