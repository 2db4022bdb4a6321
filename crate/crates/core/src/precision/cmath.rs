//! Complex arithmetic on [`Real`] scalars. The `c*` arithmetic helpers work
//! by reference to avoid clones on the multiple precision path; the
//! elementary functions return `None` at poles and branch points.

use super::{Complex, Numeric, Real};

#[inline]
pub fn cadd<R: Real>(a: &Complex<R>, b: &Complex<R>) -> Complex<R> {
    Complex::new(a.re.add_ref(&b.re), a.im.add_ref(&b.im))
}

#[inline]
pub fn csub<R: Real>(a: &Complex<R>, b: &Complex<R>) -> Complex<R> {
    Complex::new(a.re.sub_ref(&b.re), a.im.sub_ref(&b.im))
}

#[inline]
pub fn cmul<R: Real>(a: &Complex<R>, b: &Complex<R>) -> Complex<R> {
    Complex::new(a.re.mul_ref(&b.re).sub_ref(&a.im.mul_ref(&b.im)), a.re.mul_ref(&b.im).add_ref(&a.im.mul_ref(&b.re)))
}

/// a·b + c
#[inline]
pub fn cmul_add<R: Real>(a: &Complex<R>, b: &Complex<R>, c: &Complex<R>) -> Complex<R> {
    Complex::new(
        a.re.mul_ref(&b.re).sub_ref(&a.im.mul_ref(&b.im)).add_ref(&c.re),
        a.re.mul_ref(&b.im).add_ref(&a.im.mul_ref(&b.re)).add_ref(&c.im),
    )
}

#[inline]
pub fn cscale<R: Real>(a: &Complex<R>, s: &R) -> Complex<R> {
    Complex::new(a.re.mul_ref(s), a.im.mul_ref(s))
}

/// a / b, scaled to avoid spurious overflow. Division by an exact zero gives
/// non-finite components.
pub fn cdiv<R: Real>(a: &Complex<R>, b: &Complex<R>) -> Complex<R> {
    if b.im.is_zero() {
        return Complex::new(a.re.div_ref(&b.re), a.im.div_ref(&b.re));
    }
    if b.re.is_zero() {
        return Complex::new(a.im.div_ref(&b.im), -a.re.div_ref(&b.im));
    }
    if b.re.abs() >= b.im.abs() {
        let t = b.im.div_ref(&b.re);
        let d = b.re.add_ref(&b.im.mul_ref(&t));
        Complex::new(a.re.add_ref(&a.im.mul_ref(&t)).div_ref(&d), a.im.sub_ref(&a.re.mul_ref(&t)).div_ref(&d))
    } else {
        let t = b.re.div_ref(&b.im);
        let d = b.re.mul_ref(&t).add_ref(&b.im);
        Complex::new(a.re.mul_ref(&t).add_ref(&a.im).div_ref(&d), a.im.mul_ref(&t).sub_ref(&a.re).div_ref(&d))
    }
}

pub fn cinv<R: Real>(b: &Complex<R>) -> Complex<R> {
    let one = Complex::new(R::from_int(1, b.re.bits()), R::from_int(0, 64));
    cdiv(&one, b)
}

pub fn cis_finite<R: Real>(z: &Complex<R>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub fn cis_zero<R: Real>(z: &Complex<R>) -> bool {
    z.re.is_zero() && z.im.is_zero()
}

/// |z| computed without overflow.
pub fn cabs<R: Real>(z: &Complex<R>) -> R {
    let a = z.re.abs();
    let b = z.im.abs();
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    if big.is_zero() {
        return big;
    }
    let t = small.div_ref(&big);
    let one = R::from_int(1, big.bits());
    big.mul_ref(&one.add_ref(&t.mul_ref(&t)).sqrt())
}

/// log2|z| as `f64`, usable when |z| is far outside the `f64` range.
pub fn clog2_abs<R: Real>(z: &Complex<R>) -> f64 {
    let a = z.re.log2_abs();
    let b = z.im.log2_abs();
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + 0.5 * libm::log2(1.0 + libm::exp2(2.0 * (lo - hi)))
}

/// |z| as `f64` (saturating).
pub fn cabs_f64<R: Real>(z: &Complex<R>) -> f64 {
    libm::exp2(clog2_abs(z))
}

pub fn cexp<R: Real>(z: &Complex<R>, n: &mut Numeric<R>) -> Complex<R> {
    let m = z.re.exp(&mut n.cache);
    if z.im.is_zero() {
        return Complex::new(m, n.zero());
    }
    let c = z.im.cos(&mut n.cache);
    let s = z.im.sin(&mut n.cache);
    Complex::new(m.mul_ref(&c), m.mul_ref(&s))
}

/// Principal logarithm; `None` at zero.
pub fn cln<R: Real>(z: &Complex<R>, n: &mut Numeric<R>) -> Option<Complex<R>> {
    if cis_zero(z) {
        return None;
    }
    let zero = n.zero();
    if z.im.is_zero() && z.re > zero {
        return Some(Complex::new(z.re.ln(&mut n.cache), zero));
    }
    let r = cabs(z).ln(&mut n.cache);
    let t = z.im.atan2(&z.re, &mut n.cache);
    Some(Complex::new(r, t))
}

pub fn csin<R: Real>(z: &Complex<R>, n: &mut Numeric<R>) -> Complex<R> {
    if z.im.is_zero() {
        return Complex::new(z.re.sin(&mut n.cache), n.zero());
    }
    let (s, c) = (z.re.sin(&mut n.cache), z.re.cos(&mut n.cache));
    let (sh, ch) = (z.im.sinh(&mut n.cache), z.im.cosh(&mut n.cache));
    Complex::new(s.mul_ref(&ch), c.mul_ref(&sh))
}

pub fn ccos<R: Real>(z: &Complex<R>, n: &mut Numeric<R>) -> Complex<R> {
    if z.im.is_zero() {
        return Complex::new(z.re.cos(&mut n.cache), n.zero());
    }
    let (s, c) = (z.re.sin(&mut n.cache), z.re.cos(&mut n.cache));
    let (sh, ch) = (z.im.sinh(&mut n.cache), z.im.cosh(&mut n.cache));
    Complex::new(c.mul_ref(&ch), -s.mul_ref(&sh))
}

/// tan z; `None` when cos z vanishes to working precision.
pub fn ctan<R: Real>(z: &Complex<R>, n: &mut Numeric<R>) -> Option<Complex<R>> {
    let s = csin(z, n);
    let c = ccos(z, n);
    let tiny = n.real(16.0 * n.ctx.epsilon());
    let scale = cabs(&s).max_of(n.one());
    if cabs(&c) <= tiny.mul_ref(&scale) {
        return None;
    }
    Some(cdiv(&s, &c))
}

pub fn csinh<R: Real>(z: &Complex<R>, n: &mut Numeric<R>) -> Complex<R> {
    if z.im.is_zero() {
        return Complex::new(z.re.sinh(&mut n.cache), n.zero());
    }
    // sinh(a+ib) = sinh a cos b + i cosh a sin b
    let (sh, ch) = (z.re.sinh(&mut n.cache), z.re.cosh(&mut n.cache));
    let (s, c) = (z.im.sin(&mut n.cache), z.im.cos(&mut n.cache));
    Complex::new(sh.mul_ref(&c), ch.mul_ref(&s))
}

pub fn ccosh<R: Real>(z: &Complex<R>, n: &mut Numeric<R>) -> Complex<R> {
    if z.im.is_zero() {
        return Complex::new(z.re.cosh(&mut n.cache), n.zero());
    }
    let (sh, ch) = (z.re.sinh(&mut n.cache), z.re.cosh(&mut n.cache));
    let (s, c) = (z.im.sin(&mut n.cache), z.im.cos(&mut n.cache));
    Complex::new(ch.mul_ref(&c), sh.mul_ref(&s))
}

pub fn ctanh<R: Real>(z: &Complex<R>, n: &mut Numeric<R>) -> Option<Complex<R>> {
    let c = ccosh(z, n);
    if cis_zero(&c) {
        return None;
    }
    Some(cdiv(&csinh(z, n), &c))
}

/// Principal square root.
pub fn csqrt<R: Real>(z: &Complex<R>, n: &mut Numeric<R>) -> Complex<R> {
    let zero = n.zero();
    if z.im.is_zero() {
        return if z.re >= zero { Complex::new(z.re.sqrt(), zero) } else { Complex::new(zero, (-z.re.clone()).sqrt()) };
    }
    let r = cabs(z);
    let re = r.add_ref(&z.re).ldexp(-1).sqrt();
    let im = r.sub_ref(&z.re).ldexp(-1).sqrt();
    if z.im < zero {
        Complex::new(re, -im)
    } else {
        Complex::new(re, im)
    }
}

/// z^k by repeated squaring; `None` for 0^negative.
pub fn cpowi<R: Real>(z: &Complex<R>, k: i64, n: &Numeric<R>) -> Option<Complex<R>> {
    if k < 0 && cis_zero(z) {
        return None;
    }
    let mut base = if k < 0 { cinv(z) } else { z.clone() };
    let mut e = k.unsigned_abs();
    let mut acc = n.cone();
    while e > 0 {
        if e & 1 == 1 {
            acc = cmul(&acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = cmul(&base, &base);
        }
    }
    Some(acc)
}

/// Principal z^w. Integer real exponents use exact repeated multiplication.
pub fn cpow<R: Real>(z: &Complex<R>, w: &Complex<R>, n: &mut Numeric<R>) -> Option<Complex<R>> {
    if w.im.is_zero() {
        let wf = w.re.to_f64();
        if libm::fabs(wf) <= 1e6 && libm::floor(wf) == wf && w.re == n.real(wf) {
            return cpowi(z, wf as i64, n);
        }
        // real base, real exponent: stay on the real line when possible
        if z.im.is_zero() && z.re > n.zero() {
            let l = z.re.ln(&mut n.cache);
            let v = w.re.mul_ref(&l).exp(&mut n.cache);
            return Some(n.lift(v));
        }
    }
    if cis_zero(z) {
        return if w.re > n.zero() { Some(n.czero()) } else { None };
    }
    let l = cln(z, n)?;
    Some(cexp(&cmul(w, &l), n))
}

#[cfg(test)]
mod tests {
    use super::super::{Mp, PrecisionContext};
    use super::*;

    fn num15() -> Numeric<f64> {
        Numeric::new(PrecisionContext::new(15).unwrap())
    }

    #[test]
    fn division_matches_num_complex() {
        let a = Complex::new(1.5, -2.0);
        let b = Complex::new(-0.25, 3.0);
        let d = cdiv(&a, &b) - a / b;
        assert!(cabs(&d) < 1e-15);
    }

    #[test]
    fn elementary_identities() {
        let mut n = num15();
        let z = Complex::new(0.3, -0.7);
        let s = csin(&z, &mut n);
        let c = ccos(&z, &mut n);
        assert!(cabs(&(s * s + c * c - Complex::new(1.0, 0.0))) < 1e-14);
        let e = cexp(&z, &mut n);
        let l = cln(&e, &mut n).unwrap();
        assert!(cabs(&(l - z)) < 1e-14);
        let r = csqrt(&Complex::new(-4.0, 0.0), &mut n);
        assert!(cabs(&(r - Complex::new(0.0, 2.0))) < 1e-15);
    }

    #[test]
    fn tan_pole_is_flagged() {
        let mut n: Numeric<Mp> = Numeric::new(PrecisionContext::new(40).unwrap());
        let half_pi = n.pi().ldexp(-1);
        let z = n.lift(half_pi);
        assert!(ctan(&z, &mut n).is_none());
        assert!(ctan(&n.complex(0.5, 0.0), &mut n).is_some());
    }

    #[test]
    fn integer_power_is_exact() {
        let n = num15();
        let z = Complex::new(2.0, 0.0);
        assert_eq!(cpowi(&z, 10, &n).unwrap().re, 1024.0);
        assert_eq!(cpowi(&z, -2, &n).unwrap().re, 0.25);
    }
}
