//! Polynomial roots by Aberth–Ehrlich simultaneous iteration with
//! Newton-polygon starting points, followed by Newton polishing.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::precision::{cabs_f64, cadd, cdiv, cinv, cis_finite, cis_zero, clog2_abs, cmul, cmul_add, csub, Complex, Numeric, Real};

pub const MAX_SWEEPS: usize = 500;

/// p(z) and p′(z) by Horner's rule, plus log₂ Σ|aₘ||z|ᵐ for the rounding
/// bound (in double precision; only its order of magnitude matters).
fn horner<R: Real>(a: &[Complex<R>], z: &Complex<R>, num: &Numeric<R>) -> (Complex<R>, Complex<R>, f64) {
    let n = a.len() - 1;
    let lz = clog2_abs(z);
    let mut p = a[n].clone();
    let mut dp = num.czero();
    for m in (0..n).rev() {
        dp = cmul_add(&dp, z, &p);
        p = cmul_add(&p, z, &a[m]);
    }
    let terms: Vec<f64> = a
        .iter()
        .enumerate()
        .map(|(m, c)| if m == 0 { clog2_abs(c) } else { clog2_abs(c) + m as f64 * lz })
        .filter(|t| !t.is_nan())
        .collect();
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s = if top.is_finite() { top + libm::log2(terms.iter().map(|t| libm::exp2(t - top)).sum::<f64>()) } else { top };
    (p, dp, s)
}

/// Newton correction p/p′ and whether p(z) is at the rounding level. For
/// |z| > 1 the reversed polynomial is used so nothing overflows.
fn newton_ratio<R: Real>(a: &[Complex<R>], rev: &[Complex<R>], z: &Complex<R>, slack: f64, num: &Numeric<R>) -> (Complex<R>, bool) {
    let n = a.len() - 1;
    if clog2_abs(z) <= 0.0 {
        let (p, dp, s) = horner(a, z, num);
        let small = clog2_abs(&p) <= s + slack;
        (cdiv(&p, &dp), small)
    } else {
        let y = cinv(z);
        let (q, dq, s) = horner(rev, &y, num);
        let small = clog2_abs(&q) <= s + slack;
        // p/p′ = z·q / (N q − y q′)
        let den = csub(&cmul(&num.complex(n as f64, 0.0), &q), &cmul(&y, &dq));
        (cdiv(&cmul(z, &q), &den), small)
    }
}

fn hull(l: &[f64]) -> Vec<usize> {
    // upper convex hull of (m, lₘ), skipping zero coefficients
    let mut h: Vec<usize> = Vec::new();
    for (m, &v) in l.iter().enumerate() {
        if v == f64::NEG_INFINITY {
            continue;
        }
        while h.len() >= 2 {
            let (i, j) = (h[h.len() - 2], h[h.len() - 1]);
            let cross = (j - i) as f64 * (v - l[i]) - (m - i) as f64 * (l[j] - l[i]);
            if cross >= 0.0 {
                h.pop();
            } else {
                break;
            }
        }
        h.push(m);
    }
    h
}

/// Starting points on circles whose radii come from the Newton polygon of
/// log₂|aₘ|.
fn initial_guesses<R: Real>(a: &[Complex<R>], num: &Numeric<R>) -> Vec<Complex<R>> {
    let n = a.len() - 1;
    let l: Vec<f64> = a.iter().map(clog2_abs).collect();
    let h = hull(&l);
    let mut z = Vec::with_capacity(n);
    let tau = 2.0 * core::f64::consts::PI;
    for (i, w) in h.windows(2).enumerate() {
        let (k0, k1) = (w[0], w[1]);
        let cnt = k1 - k0;
        let log_r = (l[k0] - l[k1]) / cnt as f64;
        let whole = libm::floor(log_r);
        let frac = libm::exp2(log_r - whole);
        for j in 0..cnt {
            let th = tau * j as f64 / cnt as f64 + tau * i as f64 / n as f64 + 0.7;
            let c = num.complex(frac * libm::cos(th), frac * libm::sin(th));
            let k = whole.clamp(-1e6, 1e6) as i32;
            z.push(Complex::new(c.re.ldexp(k), c.im.ldexp(k)));
        }
    }
    z
}

/// All roots of Σ aₘ zᵐ. Exact zero leading coefficients are dropped and
/// exact zero trailing ones become roots at 0.
pub fn polynomial_roots<R: Real>(coeffs: &[Complex<R>], num: &Numeric<R>) -> Result<Vec<Complex<R>>> {
    let mut a: Vec<Complex<R>> = coeffs.to_vec();
    while a.last().map_or(false, cis_zero) {
        a.pop();
    }
    if a.is_empty() {
        return Err(Error::Contract("polynomial is identically zero".into()));
    }
    let zeros = a.iter().take_while(|c| cis_zero(c)).count();
    let a: Vec<Complex<R>> = a[zeros..].to_vec();
    let mut out = vec![num.czero(); zeros];
    let n = a.len() - 1;
    if n == 0 {
        return Ok(out);
    }
    let rev: Vec<Complex<R>> = a.iter().rev().cloned().collect();
    let slack = libm::log2(8.0 * (n + 1) as f64 * num.ctx.epsilon());
    let mut z = initial_guesses(&a, num);
    let to_f64 = |c: &Complex<R>| {
        let (x, y) = (c.re.to_f64(), c.im.to_f64());
        (x.is_finite() && y.is_finite() && libm::hypot(x, y) < 1e150).then_some((x, y))
    };
    let mut zf: Vec<Option<(f64, f64)>> = z.iter().map(to_f64).collect();
    let mut done = vec![false; n];
    let mut sweeps = 0;
    while done.iter().any(|d| !d) {
        if sweeps == MAX_SWEEPS {
            let partial = z.iter().zip(&done).filter(|(_, d)| **d).map(|(r, _)| (r.re.to_f64(), r.im.to_f64())).collect();
            return Err(Error::RootFinding { sweeps, partial });
        }
        sweeps += 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (ratio, small) = newton_ratio(&a, &rev, &z[i], slack, num);
            if small || !cis_finite(&ratio) {
                done[i] = true;
                continue;
            }
            // Σ 1/(zᵢ − zⱼ) only steers the iteration; double precision is
            // enough unless a root is beyond its range
            let s = match zf[i] {
                Some((xi, yi)) if zf.iter().all(Option::is_some) => {
                    let (mut sr, mut si) = (0.0, 0.0);
                    for (j, w) in zf.iter().enumerate() {
                        let (xj, yj) = w.unwrap();
                        let (dr, di) = (xi - xj, yi - yj);
                        let d2 = dr * dr + di * di;
                        if j != i && d2 > 0.0 {
                            sr += dr / d2;
                            si -= di / d2;
                        }
                    }
                    num.complex(sr, si)
                }
                _ => {
                    let mut s = num.czero();
                    for j in 0..n {
                        if j != i {
                            let d = csub(&z[i], &z[j]);
                            if !cis_zero(&d) {
                                s = cadd(&s, &cinv(&d));
                            }
                        }
                    }
                    s
                }
            };
            let den = csub(&num.cone(), &cmul(&ratio, &s));
            let step = cdiv(&ratio, &den);
            if !cis_finite(&step) {
                done[i] = true;
                continue;
            }
            z[i] = csub(&z[i], &step);
            zf[i] = to_f64(&z[i]);
        }
    }
    out.extend(z);
    Ok(out)
}

/// A few Newton steps on Σ aₘ zᵐ; stops once the correction no longer
/// shrinks.
pub fn polish<R: Real>(a: &[Complex<R>], z: &Complex<R>, num: &Numeric<R>) -> Complex<R> {
    let mut z = z.clone();
    let mut last = f64::INFINITY;
    for _ in 0..8 {
        let (p, dp, _) = horner(a, &z, num);
        if cis_zero(&dp) {
            break;
        }
        let step = cdiv(&p, &dp);
        let sz = cabs_f64(&step);
        if !(sz < last) || !cis_finite(&step) {
            break;
        }
        z = csub(&z, &step);
        last = sz;
        if sz <= num.ctx.epsilon() * cabs_f64(&z) {
            break;
        }
    }
    z
}

/// |p(z)|, |p′(z)| and Σ|aₘ||z|ᵐ, each as log₂.
pub fn evaluate_log2<R: Real>(a: &[Complex<R>], z: &Complex<R>, num: &Numeric<R>) -> (f64, f64, f64) {
    let (p, dp, s) = horner(a, z, num);
    (clog2_abs(&p), clog2_abs(&dp), s)
}
