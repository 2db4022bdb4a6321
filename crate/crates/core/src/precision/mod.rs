//! Working precision, the scalar abstraction over hardware and multiple
//! precision floats, and complex helpers built on top of it.

mod cmath;
mod mp;
mod real;

pub use cmath::*;
pub use mp::Mp;
pub use real::Real;

use crate::error::{contract, Result};

/// Decimal working precision. Digits ≤ 15 selects the hardware (`f64`) path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    digits: u32,
    bits: usize,
}

impl PrecisionContext {
    pub const MAX_DIGITS: u32 = 1000;

    pub fn new(digits: u32) -> Result<Self> {
        if !(15..=Self::MAX_DIGITS).contains(&digits) {
            return contract(alloc::format!("digits must lie in 15..={}, got {digits}", Self::MAX_DIGITS));
        }
        let bits = if digits <= 15 {
            53
        } else {
            // log2(10) ≈ 3.3219 plus guard bits, rounded up to whole words
            let raw = libm::ceil(digits as f64 * core::f64::consts::LOG2_10) as usize + 8;
            raw.div_ceil(64) * 64
        };
        Ok(Self { digits, bits })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Mantissa bits used by the multiple precision backend.
    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Unit roundoff, 10^(1−digits).
    pub fn epsilon(&self) -> f64 {
        libm::pow(10.0, 1.0 - self.digits as f64)
    }

    pub fn is_hardware(&self) -> bool {
        self.digits <= 15
    }
}

/// A precision context paired with the backend's constant cache. Everything
/// that creates constants or evaluates transcendental functions goes through
/// this, so values are always born at the working precision.
pub struct Numeric<R: Real> {
    pub ctx: PrecisionContext,
    pub cache: R::Cache,
}

impl<R: Real> Numeric<R> {
    pub fn new(ctx: PrecisionContext) -> Self {
        Self { ctx, cache: R::new_cache() }
    }

    pub fn real(&self, v: f64) -> R {
        R::from_f64(v, self.ctx.bits())
    }

    pub fn int(&self, v: i64) -> R {
        R::from_int(v, self.ctx.bits())
    }

    pub fn zero(&self) -> R {
        self.int(0)
    }

    pub fn one(&self) -> R {
        self.int(1)
    }

    pub fn complex(&self, re: f64, im: f64) -> Complex<R> {
        Complex::new(self.real(re), self.real(im))
    }

    pub fn czero(&self) -> Complex<R> {
        Complex::new(self.zero(), self.zero())
    }

    pub fn cone(&self) -> Complex<R> {
        Complex::new(self.one(), self.zero())
    }

    pub fn lift(&self, v: R) -> Complex<R> {
        Complex::new(v, self.zero())
    }

    pub fn pi(&mut self) -> R {
        R::pi(self.ctx.bits(), &mut self.cache)
    }

    pub fn eps(&self) -> R {
        self.real(self.ctx.epsilon())
    }

    pub fn parse(&mut self, s: &str) -> Option<R> {
        R::parse_decimal(s, self.ctx.bits(), &mut self.cache)
    }

    pub fn decimal(&mut self, v: &R, significant: usize) -> alloc::string::String {
        v.to_decimal(significant, &mut self.cache)
    }
}

impl<R: Real> Clone for Numeric<R> {
    fn clone(&self) -> Self {
        Self::new(self.ctx)
    }
}

impl<R: Real> core::fmt::Debug for Numeric<R> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Numeric").field("ctx", &self.ctx).finish()
    }
}

pub type Complex<R> = num_complex::Complex<R>;
