use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Rem, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_traits::{Num, One, Zero};

use super::real::{render_scientific, Real};

const RM: RoundingMode = RoundingMode::ToEven;
const MIN_BITS: usize = 64;

/// Multiple precision real backed by `astro_float::BigFloat`.
#[derive(Clone)]
pub struct Mp(BigFloat);

impl Mp {
    pub fn inner(&self) -> &BigFloat {
        &self.0
    }

    #[inline]
    fn prec(&self) -> usize {
        self.0.precision().unwrap_or(0)
    }

    #[inline]
    fn joint(&self, o: &Self) -> usize {
        self.prec().max(o.prec()).max(MIN_BITS)
    }
}

impl fmt::Debug for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mp({:e})", self.to_f64())
    }
}

impl PartialEq for Mp {
    fn eq(&self, o: &Self) -> bool {
        self.0 == o.0
    }
}

impl PartialOrd for Mp {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&o.0)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Mp {
            type Output = Mp;
            #[inline]
            fn $m(self, o: Mp) -> Mp {
                let p = self.joint(&o);
                Mp(self.0.$m(&o.0, p, RM))
            }
        }
        impl<'a> $tr<&'a Mp> for &'a Mp {
            type Output = Mp;
            #[inline]
            fn $m(self, o: &'a Mp) -> Mp {
                let p = self.joint(o);
                Mp(self.0.$m(&o.0, p, RM))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Rem for Mp {
    type Output = Mp;
    fn rem(self, o: Mp) -> Mp {
        Mp(self.0.rem(&o.0))
    }
}

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(-self.0)
    }
}

impl Zero for Mp {
    fn zero() -> Self {
        Mp(BigFloat::from_word(0, MIN_BITS))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Mp {
    fn one() -> Self {
        Mp(BigFloat::from_word(1, MIN_BITS))
    }
}

impl Num for Mp {
    type FromStrRadixErr = ();
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, ()> {
        if radix != 10 {
            return Err(());
        }
        let mut cc = Consts::new().map_err(|_| ())?;
        let v = BigFloat::parse(s, Radix::Dec, 128, RM, &mut cc);
        if v.is_nan() {
            Err(())
        } else {
            Ok(Mp(v))
        }
    }
}

impl Real for Mp {
    type Cache = Consts;

    fn new_cache() -> Consts {
        Consts::new().expect("constant cache allocation")
    }
    fn from_f64(v: f64, bits: usize) -> Self {
        Mp(BigFloat::from_f64(v, bits.max(MIN_BITS)))
    }
    fn from_int(v: i64, bits: usize) -> Self {
        Mp(BigFloat::from_i64(v, bits.max(MIN_BITS)))
    }
    fn parse_decimal(s: &str, bits: usize, cache: &mut Consts) -> Option<Self> {
        let t = s.trim();
        if t.is_empty() {
            return None;
        }
        let v = BigFloat::parse(t, Radix::Dec, bits.max(MIN_BITS), RM, cache);
        if v.is_nan() || v.is_inf() {
            None
        } else {
            Some(Mp(v))
        }
    }
    fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf() {
            return if self.0.is_inf_pos() { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        match self.0.as_raw_parts() {
            Some((words, _, sign, e, _)) => {
                if self.0.is_zero() || words.is_empty() {
                    return 0.0;
                }
                let top = words[words.len() - 1] as f64;
                let next = if words.len() > 1 { words[words.len() - 2] as f64 } else { 0.0 };
                // value = 0.m × 2^e with the top word most significant
                let m = top * libm::ldexp(1.0, -64) + next * libm::ldexp(1.0, -128);
                let v = libm::ldexp(m, e);
                if sign == Sign::Neg {
                    -v
                } else {
                    v
                }
            }
            None => f64::NAN,
        }
    }
    fn to_decimal(&self, significant: usize, cache: &mut Consts) -> String {
        if !self.is_finite() {
            return alloc::format!("{}", self.to_f64());
        }
        let s = match self.0.format(Radix::Dec, RM, cache) {
            Ok(s) => s,
            Err(_) => return alloc::format!("{:e}", self.to_f64()),
        };
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.as_str()),
        };
        let (mant, exp) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], body[i + 1..].parse::<i64>().unwrap_or(0)),
            None => (body, 0),
        };
        let int_len = mant.find('.').unwrap_or(mant.len()) as i64;
        let digits: Vec<u8> = mant.bytes().filter(u8::is_ascii_digit).map(|c| c - b'0').collect();
        render_scientific(negative, &digits, exp + int_len - 1, significant)
    }

    #[inline]
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    #[inline]
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    #[inline]
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    #[inline]
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }

    fn abs(&self) -> Self {
        Mp(self.0.abs())
    }
    fn sqrt(&self) -> Self {
        Mp(self.0.sqrt(self.prec().max(MIN_BITS), RM))
    }
    fn powi(&self, n: i32) -> Self {
        let p = self.prec().max(MIN_BITS);
        let v = self.0.powi(n.unsigned_abs() as usize, p, RM);
        if n < 0 {
            Mp(v.reciprocal(p, RM))
        } else {
            Mp(v)
        }
    }
    fn is_finite(&self) -> bool {
        !(self.0.is_nan() || self.0.is_inf())
    }
    fn log2_abs(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        if !self.is_finite() {
            return f64::INFINITY;
        }
        match self.0.as_raw_parts() {
            Some((words, _, _, e, _)) if !words.is_empty() => {
                let top = words[words.len() - 1] as f64 * libm::ldexp(1.0, -64);
                libm::log2(top) + e as f64
            }
            _ => f64::NEG_INFINITY,
        }
    }
    fn ldexp(&self, k: i32) -> Self {
        if self.0.is_zero() || !self.is_finite() {
            return self.clone();
        }
        let mut v = self.0.clone();
        let e = v.exponent().unwrap_or(0);
        v.set_exponent(e + k);
        Mp(v)
    }

    fn pi(bits: usize, cache: &mut Consts) -> Self {
        Mp(cache.pi(bits.max(MIN_BITS), RM))
    }
    fn sin(&self, cache: &mut Consts) -> Self {
        Mp(self.0.sin(self.prec().max(MIN_BITS), RM, cache))
    }
    fn cos(&self, cache: &mut Consts) -> Self {
        Mp(self.0.cos(self.prec().max(MIN_BITS), RM, cache))
    }
    fn exp(&self, cache: &mut Consts) -> Self {
        Mp(self.0.exp(self.prec().max(MIN_BITS), RM, cache))
    }
    fn ln(&self, cache: &mut Consts) -> Self {
        Mp(self.0.ln(self.prec().max(MIN_BITS), RM, cache))
    }
    fn atan(&self, cache: &mut Consts) -> Self {
        Mp(self.0.atan(self.prec().max(MIN_BITS), RM, cache))
    }
    fn sinh(&self, cache: &mut Consts) -> Self {
        Mp(self.0.sinh(self.prec().max(MIN_BITS), RM, cache))
    }
    fn cosh(&self, cache: &mut Consts) -> Self {
        Mp(self.0.cosh(self.prec().max(MIN_BITS), RM, cache))
    }
    fn bits(&self) -> usize {
        self.prec()
    }
}
