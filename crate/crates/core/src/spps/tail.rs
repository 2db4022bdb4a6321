//! A priori truncation bounds for the series solutions.

use super::particular::ParticularSolution;
use crate::precision::{cabs_f64, cis_finite, Complex, Real};

/// c = |λ − λ₀|·max|r u₀²|·max|1/(p u₀²)|·(b − a)² and the resulting bounds
/// on |u₁ − u₁,N| and |u₂ − u₂,N|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    pub c: f64,
    pub bound_u1: f64,
    pub bound_u2: f64,
    /// False when 1/(p u₀²) is unbounded on the grid.
    pub available: bool,
}

impl TailBound {
    pub fn unavailable() -> Self {
        Self { c: f64::INFINITY, bound_u1: f64::INFINITY, bound_u2: f64::INFINITY, available: false }
    }
}

/// Σ_{k>N} cᵏ/(2k)! (or /(2k+1)! when `odd`), evaluated in log space so it
/// stays meaningful for large c.
pub fn series_tail(c: f64, n: usize, odd: bool) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    if !c.is_finite() {
        return f64::INFINITY;
    }
    let lc = libm::log(c);
    let s = if odd { 1.0 } else { 0.0 };
    let log_term = |k: usize| k as f64 * lc - libm::lgamma(2.0 * k as f64 + 1.0 + s);
    // terms peak near k ≈ √c/2
    let peak = (libm::sqrt(c) / 2.0) as usize;
    let first = n + 1;
    let top = log_term(first.max(peak));
    if top > 700.0 {
        return f64::INFINITY;
    }
    let mut sum = 0.0;
    let mut k = first;
    loop {
        let t = libm::exp(log_term(k) - top);
        sum += t;
        if k > peak && t < 1e-18 * sum {
            break;
        }
        k += 1;
    }
    sum * libm::exp(top)
}

pub fn tail_bound<R: Real>(base: &ParticularSolution<R>, lambda: &Complex<R>, n: usize) -> TailBound {
    let max_of = |v: &[Complex<R>]| v.iter().map(cabs_f64).fold(0.0, f64::max);
    if !base.aux_pinv.values().iter().all(cis_finite) {
        return TailBound::unavailable();
    }
    let m_rw = max_of(base.aux_rw.values());
    let m_pinv = max_of(base.aux_pinv.values());
    let m_u0 = max_of(base.u0.values());
    let g = base.grid();
    let len = g.b().to_f64() - g.a().to_f64();
    let shift = cabs_f64(&(lambda - &base.lambda0));
    let c = shift * m_rw * m_pinv * len * len;
    let bound_u1 = m_u0 * series_tail(c, n, false);
    // |X⁽²ᵏ⁺¹⁾| ≤ max|1/(pu₀²)|·L·cᵏ/(2k+1)! with c taken per unit |λ − λ₀|
    let bound_u2 = m_u0 * m_pinv * len * series_tail(c, n, true);
    TailBound { c, bound_u1, bound_u2, available: true }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_matches_cosh_remainder() {
        // cosh(1) − Σ_{k≤3} 1/(2k)!
        let partial = 1.0 + 0.5 + 1.0 / 24.0 + 1.0 / 720.0;
        let want = libm::cosh(1.0) - partial;
        assert!((series_tail(1.0, 3, false) - want).abs() < 1e-15);
        let partial_odd = 1.0 + 1.0 / 6.0 + 1.0 / 120.0 + 1.0 / 5040.0;
        assert!((series_tail(1.0, 3, true) - (libm::sinh(1.0) - partial_odd)).abs() < 1e-15);
    }

    #[test]
    fn tail_is_monotone_in_n() {
        for c in [0.5, 10.0, 1e3] {
            let mut prev = f64::INFINITY;
            for n in 0..60 {
                let t = series_tail(c, n, false);
                assert!(t <= prev && t >= 0.0);
                prev = t;
            }
        }
        assert_eq!(series_tail(0.0, 5, false), 0.0);
        assert_eq!(series_tail(1e12, 5, false), f64::INFINITY);
    }
}
