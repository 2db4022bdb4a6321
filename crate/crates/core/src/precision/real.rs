use alloc::format;
use alloc::string::String;
use core::fmt::Debug;
use core::ops::Neg;

use num_traits::Num;

/// Scalar field used by all numerics. Implemented for `f64` (hardware path)
/// and [`super::Mp`] (multiple precision path).
///
/// Precision is carried by values: constants are created with an explicit
/// bit count and binary operations keep the wider operand's precision.
pub trait Real: Clone + Debug + PartialOrd + Send + Sync + Num + Neg<Output = Self> + 'static {
    /// Cached constants (π, ln 2, …) reused across transcendental calls.
    type Cache: Send;

    fn new_cache() -> Self::Cache;
    fn from_f64(v: f64, bits: usize) -> Self;
    fn from_int(v: i64, bits: usize) -> Self;
    fn parse_decimal(s: &str, bits: usize, cache: &mut Self::Cache) -> Option<Self>;
    fn to_f64(&self) -> f64;
    /// Scientific notation with `significant` digits, e.g. `1.5198658211e0`.
    fn to_decimal(&self, significant: usize, cache: &mut Self::Cache) -> String;

    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn div_ref(&self, o: &Self) -> Self;

    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn powi(&self, n: i32) -> Self;
    fn is_finite(&self) -> bool;
    /// log2|x| as an `f64`, valid far outside the `f64` exponent range.
    /// Returns −∞ for zero.
    fn log2_abs(&self) -> f64;
    /// Multiply by 2^k exactly.
    fn ldexp(&self, k: i32) -> Self;

    fn pi(bits: usize, cache: &mut Self::Cache) -> Self;
    fn sin(&self, cache: &mut Self::Cache) -> Self;
    fn cos(&self, cache: &mut Self::Cache) -> Self;
    fn exp(&self, cache: &mut Self::Cache) -> Self;
    fn ln(&self, cache: &mut Self::Cache) -> Self;
    fn atan(&self, cache: &mut Self::Cache) -> Self;
    fn sinh(&self, cache: &mut Self::Cache) -> Self;
    fn cosh(&self, cache: &mut Self::Cache) -> Self;

    fn atan2(&self, x: &Self, cache: &mut Self::Cache) -> Self {
        let y = self;
        let zero = Self::from_int(0, 64);
        if x.is_zero() {
            if y.is_zero() {
                return zero;
            }
            let half = Self::pi(y.bits(), cache).ldexp(-1);
            return if *y > zero { half } else { -half };
        }
        let base = y.div_ref(x).atan(cache);
        if *x > zero {
            base
        } else if *y >= zero {
            base + Self::pi(y.bits().max(x.bits()), cache)
        } else {
            base - Self::pi(y.bits().max(x.bits()), cache)
        }
    }

    /// Precision in bits carried by this value.
    fn bits(&self) -> usize;

    fn max_of(self, o: Self) -> Self {
        if o > self {
            o
        } else {
            self
        }
    }
}

impl Real for f64 {
    type Cache = ();

    fn new_cache() {}
    fn from_f64(v: f64, _bits: usize) -> Self {
        v
    }
    fn from_int(v: i64, _bits: usize) -> Self {
        v as f64
    }
    fn parse_decimal(s: &str, _bits: usize, _cache: &mut ()) -> Option<Self> {
        s.trim().parse::<f64>().ok()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_decimal(&self, significant: usize, _cache: &mut ()) -> String {
        format!("{:.*e}", significant.max(1) - 1, self)
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
        libm::fabs(*self)
    }
    fn sqrt(&self) -> Self {
        libm::sqrt(*self)
    }
    fn powi(&self, n: i32) -> Self {
        let mut base = if n < 0 { 1.0 / self } else { *self };
        let mut e = n.unsigned_abs();
        let mut acc = 1.0;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn log2_abs(&self) -> f64 {
        libm::log2(libm::fabs(*self))
    }
    fn ldexp(&self, k: i32) -> Self {
        libm::ldexp(*self, k)
    }

    fn pi(_bits: usize, _cache: &mut ()) -> Self {
        core::f64::consts::PI
    }
    fn sin(&self, _: &mut ()) -> Self {
        libm::sin(*self)
    }
    fn cos(&self, _: &mut ()) -> Self {
        libm::cos(*self)
    }
    fn exp(&self, _: &mut ()) -> Self {
        libm::exp(*self)
    }
    fn ln(&self, _: &mut ()) -> Self {
        libm::log(*self)
    }
    fn atan(&self, _: &mut ()) -> Self {
        libm::atan(*self)
    }
    fn sinh(&self, _: &mut ()) -> Self {
        libm::sinh(*self)
    }
    fn cosh(&self, _: &mut ()) -> Self {
        libm::cosh(*self)
    }
    fn atan2(&self, x: &Self, _: &mut ()) -> Self {
        libm::atan2(*self, *x)
    }
    fn bits(&self) -> usize {
        53
    }
}

/// Round a decimal mantissa/exponent pair to `significant` digits and render
/// it as `d.ddde±x` (Rust `{:e}` style, no plus sign).
pub(crate) fn render_scientific(negative: bool, digits: &[u8], exp10: i64, significant: usize) -> String {
    let significant = significant.max(1);
    let mut d: alloc::vec::Vec<u8> = digits.iter().copied().skip_while(|&c| c == 0).collect();
    // leading zeros shift the exponent
    let lead = digits.iter().take_while(|&&c| c == 0).count() as i64;
    let mut exp10 = exp10 - lead;
    if d.is_empty() {
        let mut s = String::from("0.");
        for _ in 1..significant {
            s.push('0');
        }
        if significant == 1 {
            s.pop();
        }
        s.push_str("e0");
        return s;
    }
    if d.len() > significant {
        let round_up = d[significant] >= 5;
        d.truncate(significant);
        if round_up {
            let mut i = significant;
            loop {
                if i == 0 {
                    d.insert(0, 1);
                    d.truncate(significant);
                    exp10 += 1;
                    break;
                }
                i -= 1;
                if d[i] == 9 {
                    d[i] = 0;
                } else {
                    d[i] += 1;
                    break;
                }
            }
        }
    }
    while d.len() < significant {
        d.push(0);
    }
    let mut s = String::new();
    if negative {
        s.push('-');
    }
    s.push((b'0' + d[0]) as char);
    if d.len() > 1 {
        s.push('.');
        for &c in &d[1..] {
            s.push((b'0' + c) as char);
        }
    }
    s.push_str(&format!("e{exp10}"));
    s
}
