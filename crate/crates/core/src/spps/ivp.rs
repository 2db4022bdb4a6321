//! Initial value problems, subdividing the interval when the series tail at
//! λ is too large for one segment.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::particular::{particular_for, ParticularSolution};
use super::powers::{evaluate_combinations, Combination, PowerPlan};
use super::tail::series_tail;
use crate::error::{contract, Error, Result};
use crate::grid::{Grid, SampledFunction};
use crate::precision::{cabs_f64, cdiv, cis_finite, cis_zero, cmul, csub, Complex, Numeric, Real};
use crate::problem::SturmLiouvilleProblem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chunking {
    /// Absolute bound on the truncation error of u.
    pub tolerance: f64,
    pub max_chunks: usize,
}

impl Default for Chunking {
    fn default() -> Self {
        Self { tolerance: 1e-12, max_chunks: 100_000 }
    }
}

/// u with u(x₀) = A, u′(x₀) = B for the problem's equation at λ.
#[allow(clippy::too_many_arguments)]
pub fn solve_ivp<R: Real>(
    prob: &SturmLiouvilleProblem,
    grid: &Arc<Grid<R>>,
    lambda: &Complex<R>,
    x0_index: usize,
    a: &Complex<R>,
    b: &Complex<R>,
    n: usize,
    chunking: Chunking,
    num: &mut Numeric<R>,
) -> Result<(SampledFunction<R>, SampledFunction<R>)> {
    let base = particular_for(prob, grid, num)?;
    solve_ivp_with(&base, lambda, x0_index, a, b, n, chunking, num)
}

struct Magnitudes {
    rw: Vec<f64>,
    pinv: Vec<f64>,
    u0: Vec<f64>,
    x: Vec<f64>,
}

impl Magnitudes {
    /// |c₁|·bound(u₁) + |c₂|·bound(u₂) on nodes [lo, hi].
    fn bound(&self, lo: usize, hi: usize, shift: f64, n: usize, c1: f64, c2: f64) -> f64 {
        let mx = |v: &[f64]| v[lo..=hi].iter().cloned().fold(0.0, f64::max);
        let (rw, pinv, u0) = (mx(&self.rw), mx(&self.pinv), mx(&self.u0));
        let len = self.x[hi] - self.x[lo];
        let c = shift * rw * pinv * len * len;
        let b1 = if c1 == 0.0 { 0.0 } else { c1 * u0 * series_tail(c, n, false) };
        let b2 = if c2 == 0.0 { 0.0 } else { c2 * u0 * pinv * len * series_tail(c, n, true) };
        b1 + b2
    }
}

#[allow(clippy::too_many_arguments)]
pub fn solve_ivp_with<R: Real>(
    base: &ParticularSolution<R>,
    lambda: &Complex<R>,
    x0_index: usize,
    a: &Complex<R>,
    b: &Complex<R>,
    n: usize,
    chunking: Chunking,
    num: &Numeric<R>,
) -> Result<(SampledFunction<R>, SampledFunction<R>)> {
    let grid = base.grid().clone();
    let m = grid.cells();
    if x0_index > m {
        return contract("x0 outside grid");
    }
    let mag = Magnitudes {
        rw: base.aux_rw.values().iter().map(cabs_f64).collect(),
        pinv: base.aux_pinv.values().iter().map(cabs_f64).collect(),
        u0: base.u0.values().iter().map(cabs_f64).collect(),
        x: grid.nodes().iter().map(Real::to_f64).collect(),
    };
    let bounded = base.aux_pinv.values().iter().all(cis_finite);
    let shift = cabs_f64(&(lambda - &base.lambda0));
    let mut u = vec![num.czero(); m + 1];
    let mut du = vec![num.czero(); m + 1];
    u[x0_index] = a.clone();
    du[x0_index] = b.clone();
    let mut chunks = 0usize;

    for dir in [1isize, -1] {
        let mut s = x0_index;
        loop {
            let done = if dir > 0 { s >= m } else { s == 0 };
            if done {
                break;
            }
            let u0s = base.u0.at(s);
            if cis_zero(u0s) {
                return contract("u₀ vanishes at the initial point");
            }
            let c1 = cdiv(&u[s], u0s);
            let c2 = cmul(&csub(&du[s], &cmul(&c1, base.du0.at(s))), &cmul(u0s, base.p.at(s)));
            let (m1, m2) = (cabs_f64(&c1), cabs_f64(&c2));
            let room = if dir > 0 { m - s } else { s };
            let mut len = room.min(2);
            if bounded {
                let span = |l: usize| if dir > 0 { (s, s + l) } else { (s - l, s) };
                let (lo, hi) = span(len);
                let first = mag.bound(lo, hi, shift, n, m1, m2);
                if first > chunking.tolerance {
                    return Err(Error::Accuracy { requested: chunking.tolerance, achieved: first });
                }
                while len < room {
                    let next = (len + 2).min(room);
                    let (lo, hi) = span(next);
                    if mag.bound(lo, hi, shift, n, m1, m2) > chunking.tolerance {
                        break;
                    }
                    len = next;
                }
            } else {
                len = room;
            }
            chunks += 1;
            if chunks > chunking.max_chunks {
                let (lo, hi) = if dir > 0 { (s, s + len) } else { (s - len, s) };
                let achieved = mag.bound(lo, hi, shift, n, m1, m2);
                return Err(Error::Accuracy { requested: chunking.tolerance, achieved });
            }
            // a one-cell remainder borrows a node from the solved side
            let (lo, hi, anchor) = if dir > 0 {
                if len == 1 {
                    (s - 1, s + 1, 1)
                } else {
                    (s, s + len, 0)
                }
            } else if len == 1 {
                (s - 1, s + 1, 1)
            } else {
                (s - len, s, len)
            };
            let piece = if lo == 0 && hi == m { base.clone() } else { base.restrict(lo, hi)? };
            let plan = PowerPlan::new(&piece, n, anchor, num)?;
            let combo = Combination { lambda: lambda.clone(), c1, c2 };
            let (pu, pdu) = evaluate_combinations(&plan, &piece, &[combo], num)?.remove(0);
            let range: Vec<usize> = if dir > 0 { (s + 1..=s + len).collect() } else { (s - len..s).collect() };
            for j in range {
                u[j] = pu.at(j - lo).clone();
                du[j] = pdu.at(j - lo).clone();
            }
            s = if dir > 0 { s + len } else { s - len };
        }
    }
    Ok((SampledFunction::new(grid.clone(), u)?, SampledFunction::new(grid, du)?))
}
