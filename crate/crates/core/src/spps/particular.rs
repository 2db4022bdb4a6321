//! Particular solutions u₀ of the equation at a fixed spectral value λ₀.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::powers::{evaluate_combinations, run_recursion, Combination, Families, PowerSource};
use super::tail::series_tail;
use crate::error::{contract, Error, Result};
use crate::grid::{Grid, SampledFunction};
use crate::precision::{cabs_f64, cadd, cdiv, cinv, cis_finite, cis_zero, clog2_abs, cmul, csub, Complex, Numeric, Real};
use crate::problem::{sample_coefficients, SturmLiouvilleProblem};
use crate::quadrature::Cumulator;

const RETRIES: usize = 8;

/// u₀ and u₀′ on a grid together with the two integrands of the power
/// recursion, r·u₀² and 1/(u₀²p).
#[derive(Debug, Clone)]
pub struct ParticularSolution<R: Real> {
    pub u0: SampledFunction<R>,
    pub du0: SampledFunction<R>,
    pub lambda0: Complex<R>,
    pub aux_pinv: SampledFunction<R>,
    pub aux_rw: SampledFunction<R>,
    pub p: SampledFunction<R>,
    pub r: SampledFunction<R>,
    /// Node ranges [j, k] over which u₀ was synthesised piecewise.
    pub segments: Vec<(usize, usize)>,
}

impl<R: Real> ParticularSolution<R> {
    /// Validates that u₀ does not vanish. A zero is tolerated only at an
    /// endpoint where p vanishes too (a regular-singular endpoint).
    pub fn new(
        u0: SampledFunction<R>,
        du0: SampledFunction<R>,
        lambda0: Complex<R>,
        p: SampledFunction<R>,
        r: SampledFunction<R>,
        num: &Numeric<R>,
    ) -> Result<Self> {
        if !(u0.same_grid(&du0) && u0.same_grid(&p) && u0.same_grid(&r)) {
            return contract("particular solution and coefficients live on different grids");
        }
        check_nonvanishing(&u0, &p, num)?;
        let aux_rw = u0.zip_with(&r, |u, r| cmul(&cmul(u, u), r))?;
        let aux_pinv = u0.zip_with(&p, |u, p| {
            let d = cmul(&cmul(u, u), p);
            if cis_zero(&d) {
                Complex::new(num.real(f64::NAN), num.real(f64::NAN))
            } else {
                cinv(&d)
            }
        })?;
        let m = u0.grid().cells();
        Ok(Self { u0, du0, lambda0, aux_pinv, aux_rw, p, r, segments: vec![(0, m)] })
    }

    pub fn grid(&self) -> &Arc<Grid<R>> {
        self.u0.grid()
    }

    /// The same data on nodes j..=k.
    pub fn restrict(&self, j: usize, k: usize) -> Result<Self> {
        let g = Arc::new(self.grid().slice(j, k)?);
        let cut = |f: &SampledFunction<R>| SampledFunction::new(g.clone(), f.values()[j..=k].to_vec());
        Ok(Self {
            u0: cut(&self.u0)?,
            du0: cut(&self.du0)?,
            lambda0: self.lambda0.clone(),
            aux_pinv: cut(&self.aux_pinv)?,
            aux_rw: cut(&self.aux_rw)?,
            p: cut(&self.p)?,
            r: cut(&self.r)?,
            segments: vec![(0, k - j)],
        })
    }
}

fn check_nonvanishing<R: Real>(u0: &SampledFunction<R>, p: &SampledFunction<R>, num: &Numeric<R>) -> Result<()> {
    let v = u0.values();
    let m = v.len() - 1;
    let grid = u0.grid();
    // relative to the neighbours: u₀ may legitimately span many orders of
    // magnitude across the interval
    let floor = libm::log2(100.0 * num.ctx.epsilon());
    for j in 0..=m {
        let here = clog2_abs(&v[j]);
        let endpoint_singular = (j == 0 || j == m) && cis_zero(&p.values()[j]);
        if endpoint_singular && cis_zero(&v[j]) {
            continue;
        }
        let left = if j > 0 { clog2_abs(&v[j - 1]) } else { f64::NEG_INFINITY };
        let right = if j < m { clog2_abs(&v[j + 1]) } else { f64::NEG_INFINITY };
        let nb = left.max(right);
        if cis_zero(&v[j]) || !cis_finite(&v[j]) || here <= nb + floor {
            return Err(Error::Vanishing { node: j, x: grid.node(j).to_f64() });
        }
    }
    Ok(())
}

/// A solution on the grid in f64, scaled by 2^−k so that huge or tiny values
/// survive the conversion, with the running maximum of |v| along the
/// direction it was integrated in.
struct Scaled {
    v: Vec<(f64, f64)>,
    k: i32,
    reach: Vec<f64>,
    /// Σ ℓ⁴ over the log steps: how well the grid resolves this solution
    res: f64,
}

impl Scaled {
    fn new<R: Real>(v: &[Complex<R>], backward: bool) -> Self {
        let top = v.iter().map(clog2_abs).fold(f64::NEG_INFINITY, f64::max);
        let k = if top.is_finite() { libm::ceil(top) as i32 } else { 0 };
        let v: Vec<(f64, f64)> = v.iter().map(|z| (z.re.ldexp(-k).to_f64(), z.im.ldexp(-k).to_f64())).collect();
        let mut reach: Vec<f64> = v.iter().map(|z| libm::hypot(z.0, z.1)).collect();
        if backward {
            for j in (0..reach.len() - 1).rev() {
                reach[j] = reach[j].max(reach[j + 1]);
            }
        } else {
            for j in 1..reach.len() {
                reach[j] = reach[j].max(reach[j - 1]);
            }
        }
        let res = v
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let re = b.0 * a.0 + b.1 * a.1;
                let im = b.1 * a.0 - b.0 * a.1;
                let step = libm::hypot(libm::log(libm::hypot(b.0, b.1) / libm::hypot(a.0, a.1)), libm::atan2(im, re));
                if step.is_finite() {
                    step.min(1.0).powi(4)
                } else {
                    0.0
                }
            })
            .sum();
        Self { v, k, reach, res }
    }
}

/// Estimated relative error of the powers built from u = a + (t + is)·b,
/// as ln(δ·A + Σ ℓ⁴). A is the worst error amplification: errors in a and b
/// (relative size δ, mostly from the grid) are relative to the largest
/// values met on the way, so a node where |u| has fallen far below them (u₀
/// decaying after a barrier, or two solutions cancelling) is inaccurate. ℓ is the complex
/// log step of u between neighbouring nodes; the quadrature error of
/// 1/(p u₀²) grows like ℓ⁴, which penalises a u₀ with a zero just outside
/// the interval. With `stride` = 1 a step above 0.25 (u₀ passing near zero
/// between nodes) is rejected outright.
fn combination_cost(a: &Scaled, b: &Scaled, t: f64, s: f64, stride: usize, delta: f64) -> f64 {
    let cmag = libm::hypot(t, s);
    let at = |j: usize| (a.v[j].0 + t * b.v[j].0 - s * b.v[j].1, a.v[j].1 + t * b.v[j].1 + s * b.v[j].0);
    let last = a.v.len() - 1;
    let mut worst = f64::NEG_INFINITY;
    let mut resolution = 0.0;
    let mut prev = at(0);
    let mut j = 0;
    loop {
        let u = at(j);
        let mag = libm::hypot(u.0, u.1);
        let amp = libm::log((a.reach[j] + cmag * b.reach[j]) / mag);
        if !amp.is_finite() {
            return f64::INFINITY;
        }
        worst = worst.max(amp);
        if j > 0 {
            let re = u.0 * prev.0 + u.1 * prev.1;
            let im = u.1 * prev.0 - u.0 * prev.1;
            let step = libm::hypot(libm::log(mag / libm::hypot(prev.0, prev.1)), libm::atan2(im, re));
            if stride == 1 && !(step <= 0.25) {
                return f64::INFINITY;
            }
            let per_cell = step / stride as f64;
            resolution += stride as f64 * per_cell.powi(4);
        }
        prev = u;
        if j == last {
            return libm::log(delta * libm::exp(worst.min(700.0)) + resolution);
        }
        j = (j + stride).min(last);
    }
}

fn by_cost(x: &(f64, f64, f64), y: &(f64, f64, f64)) -> core::cmp::Ordering {
    x.0.partial_cmp(&y.0).unwrap_or(core::cmp::Ordering::Equal)
}

/// Candidates (cost, t, s) for c = t + is, best first: a coarse scan on a
/// log grid, then a pattern search on the full grid from the best two.
fn combination_candidates(a: &Scaled, b: &Scaled, delta: f64) -> Vec<(f64, f64, f64)> {
    let stride = (a.v.len() / 256).max(1);
    let mags: Vec<f64> = (-24..=24).map(|k| libm::pow(10.0, k as f64 / 2.0)).collect();
    let ts: Vec<f64> = core::iter::once(0.0).chain(mags.iter().flat_map(|&m| [m, -m])).collect();
    let ss: Vec<f64> = core::iter::once(0.0).chain(mags.iter().cloned()).collect();
    let mut coarse = Vec::with_capacity(ts.len() * ss.len());
    for &t in &ts {
        for &s in &ss {
            coarse.push((combination_cost(a, b, t, s, stride, delta), t, s));
        }
    }
    coarse.sort_by(by_cost);
    let cost = |t: f64, s: f64| combination_cost(a, b, t, s, 1, delta);
    let mut refined: Vec<(f64, f64, f64)> = coarse
        .iter()
        .take(2)
        .map(|&(_, mut t, mut s)| {
            let mut best = cost(t, s);
            let mut dt = 0.5 * t.abs().max(s).max(1e-6);
            let mut f = 2.0f64;
            for _ in 0..60 {
                let mut moved = false;
                let s_try = if s == 0.0 { [dt, 0.1 * dt] } else { [s * f, s / f] };
                for (tt, st) in [(t + dt, s), (t - dt, s), (t, s_try[0]), (t, s_try[1])] {
                    let c = cost(tt, st);
                    if c < best {
                        (best, t, s, moved) = (c, tt, st, true);
                    }
                }
                if !moved {
                    dt *= 0.5;
                    f = libm::sqrt(f);
                    if f < 1.0 + 1e-3 {
                        break;
                    }
                }
            }
            (best, t, s)
        })
        .collect();
    // the coarse scan skips nodes, so every survivor is re-scored in full
    refined.extend(coarse.iter().skip(2).take(4 * RETRIES).map(|&(_, t, s)| (cost(t, s), t, s)));
    refined.retain(|c| c.0.is_finite());
    refined.sort_by(by_cost);
    refined
}

/// u₀ = a + c·b over the given pairs of solutions, choosing the pair and c
/// that keep u₀ clear of zero and least amplify integration errors. The
/// textbook c = i fails when the two solutions have become almost collinear
/// (as after crossing a barrier): u₀ then nearly vanishes between nodes and
/// 1/u₀² has a spike no grid resolves. `sols` carry (v, v′, integrated
/// from b).
fn combine_best<R: Real>(
    sols: &[(Vec<Complex<R>>, Vec<Complex<R>>, bool)],
    pairs: &[(usize, usize)],
    lambda0: Complex<R>,
    p: &SampledFunction<R>,
    r: &SampledFunction<R>,
    num: &Numeric<R>,
) -> Result<ParticularSolution<R>> {
    let grid = p.grid().clone();
    let scaled: Vec<Scaled> = sols.iter().map(|(v, _, back)| Scaled::new(v, *back)).collect();
    let eps = num.ctx.epsilon();
    let mut ranked = Vec::new();
    for &(i, j) in pairs {
        // the grid error of the better resolved solution, not rounding, is
        // what amplification magnifies
        let delta = scaled[i].res.min(scaled[j].res).max(eps);
        for (cost, t, s) in combination_candidates(&scaled[i], &scaled[j], delta).into_iter().take(RETRIES) {
            ranked.push((cost, i, j, t, s));
        }
    }
    ranked.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(core::cmp::Ordering::Equal));
    let mut last = None;
    for (_, i, j, t, s) in ranked.into_iter().take(RETRIES) {
        let k = scaled[i].k - scaled[j].k;
        let c = num.complex(t, s);
        let c = Complex::new(c.re.ldexp(k), c.im.ldexp(k));
        let ((a, da, _), (b, db, _)) = (&sols[i], &sols[j]);
        let u: Vec<Complex<R>> = a.iter().zip(b).map(|(x, y)| cadd(x, &cmul(&c, y))).collect();
        let du: Vec<Complex<R>> = da.iter().zip(db).map(|(x, y)| cadd(x, &cmul(&c, y))).collect();
        let cand = ParticularSolution::new(
            SampledFunction::new(grid.clone(), u)?,
            SampledFunction::new(grid.clone(), du)?,
            lambda0.clone(),
            p.clone(),
            r.clone(),
            num,
        );
        match cand {
            Ok(s) => return Ok(s),
            Err(e @ Error::Vanishing { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(Error::Contract("nonvanishing combination not found".into())))
}

/// Splits [0, M] into node ranges of an even number of cells on which
/// `cost(j, k)` stays ≤ target; ranges have at least two cells.
pub(crate) fn segment_grid(m: usize, target: f64, mut cost: impl FnMut(usize, usize) -> f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut s = 0;
    while s < m {
        let mut e = (s + 2).min(m);
        while e + 2 <= m && cost(s, e + 2) <= target {
            e += 2;
        }
        if m - e == 1 {
            e = m;
        }
        out.push((s, e));
        s = e;
    }
    out
}

/// Smallest N with Σ_{k>N} cᵏ/(2k)! below `tol`.
pub(crate) fn terms_for(c: f64, tol: f64) -> usize {
    let mut n = 1;
    while n < 2000 && series_tail(c, n, false) > tol {
        n += 1;
    }
    n
}

/// Builds a nonvanishing solution of (p u′)′ + q u = 0 from the series with
/// u₀ ≡ 1, λ = 1 and r replaced by −q, applied on segments short enough that
/// the local convergence constant stays below `chunk_target`.
pub fn build_u0_regular<R: Real>(
    prob: &SturmLiouvilleProblem,
    grid: &Arc<Grid<R>>,
    num: &mut Numeric<R>,
    chunk_target: f64,
) -> Result<ParticularSolution<R>> {
    let zero = num.czero();
    build_u0_regular_at(prob, grid, &zero, num, chunk_target)
}

/// As [`build_u0_regular`] for (p u′)′ + (q − λ₀r) u = 0. Used for spectral
/// shifts: unlike evaluating the previous series at λ₀, nothing here
/// cancels, so the shifted base keeps full working precision.
pub fn build_u0_regular_at<R: Real>(
    prob: &SturmLiouvilleProblem,
    grid: &Arc<Grid<R>>,
    lambda0: &Complex<R>,
    num: &mut Numeric<R>,
    chunk_target: f64,
) -> Result<ParticularSolution<R>> {
    let (p, q, r) = sample_coefficients(prob, grid, num)?;
    let q: Vec<Complex<R>> = q.values().iter().zip(r.values()).map(|(q, r)| csub(q, &cmul(lambda0, r))).collect();
    if let Some(j) = p.values().iter().position(cis_zero) {
        return contract(alloc::format!("p vanishes at node {j}"));
    }
    let m = grid.cells();
    let qa: Vec<f64> = q.iter().map(cabs_f64).collect();
    let pa: Vec<f64> = p.values().iter().map(|v| 1.0 / cabs_f64(v)).collect();
    let xs: Vec<f64> = grid.nodes().iter().map(Real::to_f64).collect();
    let local_c = |s: usize, e: usize| {
        let mq = qa[s..=e].iter().cloned().fold(0.0, f64::max);
        let mp = pa[s..=e].iter().cloned().fold(0.0, f64::max);
        mq * mp * (xs[e] - xs[s]) * (xs[e] - xs[s])
    };
    let segments = segment_grid(m, chunk_target, local_c);
    let eps = num.ctx.epsilon();
    let rw: Vec<Complex<R>> = q.iter().map(|v| -v.clone()).collect();
    let pinv: Vec<Complex<R>> = p.values().iter().map(cinv).collect();
    // per segment: Σ X̃⁽²ᵏ⁾, Σ X̃⁽²ᵏ⁻¹⁾, Σ X⁽²ᵏ⁺¹⁾, Σ X⁽²ᵏ⁾ anchored at either end
    let sums = |s: usize, e: usize, anchor: usize, num: &Numeric<R>| -> Result<[Vec<Complex<R>>; 4]> {
        let sub = Arc::new(grid.slice(s, e)?);
        let cum = Cumulator::new(sub, num);
        let n = terms_for(local_c(s, e), eps * 1e-3);
        let len = e - s + 1;
        let mut acc: [Vec<Complex<R>>; 4] = core::array::from_fn(|_| vec![num.czero(); len]);
        run_recursion(&cum, &rw[s..=e], &pinv[s..=e], anchor, n, Families::Both, num, &mut |k, t, x| {
            let mut add = |slot: usize, v: &[Complex<R>]| {
                for (a, b) in acc[slot].iter_mut().zip(v) {
                    *a = cadd(a, b);
                }
            };
            if let Some(t) = t {
                add(if k % 2 == 0 { 0 } else { 1 }, t);
            }
            if let Some(x) = x {
                add(if k % 2 == 0 { 3 } else { 2 }, x);
            }
            Ok(())
        })?;
        Ok(acc)
    };
    // (v, pv′) for v = 1, pv′ = 0 and v = 0, pv′ = 1 at a (forward) or at b
    let propagate = |backward: bool, num: &Numeric<R>| -> Result<[(Vec<Complex<R>>, Vec<Complex<R>>); 2]> {
        let mut out: [(Vec<Complex<R>>, Vec<Complex<R>>); 2] =
            core::array::from_fn(|_| (vec![num.czero(); m + 1], vec![num.czero(); m + 1]));
        let start = if backward { m } else { 0 };
        out[0].0[start] = num.cone();
        out[1].1[start] = num.cone();
        let order: Vec<(usize, usize)> = if backward { segments.iter().rev().cloned().collect() } else { segments.clone() };
        for (s, e) in order {
            let anchor = if backward { e - s } else { 0 };
            let [a, fa, b, fb] = sums(s, e, anchor, num)?;
            for (v, f) in out.iter_mut() {
                let (vs, fs) = (v[s + anchor].clone(), f[s + anchor].clone());
                for i in 0..=e - s {
                    if i != anchor {
                        v[s + i] = cadd(&cmul(&vs, &a[i]), &cmul(&fs, &b[i]));
                        f[s + i] = cadd(&cmul(&vs, &fa[i]), &cmul(&fs, &fb[i]));
                    }
                }
            }
        }
        Ok(out)
    };
    let from_a = propagate(false, num)?;
    let from_b = propagate(true, num)?;
    let deriv = |f: &[Complex<R>]| -> Vec<Complex<R>> { f.iter().zip(p.values()).map(|(f, p)| cdiv(f, p)).collect() };
    let sols: Vec<(Vec<Complex<R>>, Vec<Complex<R>>, bool)> =
        from_a.iter().map(|(v, f)| (v.clone(), deriv(f), false)).chain(from_b.iter().map(|(v, f)| (v.clone(), deriv(f), true))).collect();
    // a solution integrated past a barrier picks up the mode growing with it,
    // so pairs started from opposite ends are tried as well
    let pairs = [(0, 1), (2, 3), (0, 2), (1, 3)];
    let mut sol = combine_best(&sols, &pairs, lambda0.clone(), &p, &r, num)?;
    sol.segments = segments;
    Ok(sol)
}

/// u₀ from closed-form expressions (e.g. at a regular-singular endpoint
/// where the series construction does not apply).
pub fn particular_from_expressions<R: Real>(
    prob: &SturmLiouvilleProblem,
    grid: &Arc<Grid<R>>,
    num: &mut Numeric<R>,
) -> Result<ParticularSolution<R>> {
    let Some(an) = &prob.particular else {
        return contract("problem has no closed-form particular solution");
    };
    // q is not needed (and may be singular at an endpoint node)
    let c = prob.compile(num)?;
    let p = SampledFunction::new(grid.clone(), c.p.eval_many(grid.nodes(), num)?)?;
    let r = SampledFunction::new(grid.clone(), c.r.eval_many(grid.nodes(), num)?)?;
    let u0 = an.u0.compile(num)?.eval_many(grid.nodes(), num)?;
    let du0 = an.du0.compile(num)?.eval_many(grid.nodes(), num)?;
    ParticularSolution::new(SampledFunction::new(grid.clone(), u0)?, SampledFunction::new(grid.clone(), du0)?, num.czero(), p, r, num)
}

/// The particular solution the solver uses for `prob`: closed form when
/// given, otherwise synthesised with segments of local constant ≤ 1.
pub fn particular_for<R: Real>(prob: &SturmLiouvilleProblem, grid: &Arc<Grid<R>>, num: &mut Numeric<R>) -> Result<ParticularSolution<R>> {
    if prob.particular.is_some() {
        particular_from_expressions(prob, grid, num)
    } else {
        build_u0_regular(prob, grid, num, 1.0)
    }
}

/// Moves the base to λ*: U₀ = u₁ + i·u₂ evaluated at λ*, so that powers
/// rebuilt from U₀ give series in λ − λ*.
pub fn shift_base<R: Real>(
    src: &dyn PowerSource<R>,
    base: &ParticularSolution<R>,
    lambda_star: &Complex<R>,
    num: &Numeric<R>,
) -> Result<ParticularSolution<R>> {
    let one = num.cone();
    let zero = num.czero();
    let combos = [
        Combination { lambda: lambda_star.clone(), c1: one.clone(), c2: zero.clone() },
        Combination { lambda: lambda_star.clone(), c1: zero, c2: one },
    ];
    let mut r = evaluate_combinations(src, base, &combos, num)?;
    let (u2, du2) = r.pop().unwrap();
    let (u1, du1) = r.pop().unwrap();
    let sols = [(u1.values().to_vec(), du1.values().to_vec(), false), (u2.values().to_vec(), du2.values().to_vec(), false)];
    combine_best(&sols, &[(0, 1)], lambda_star.clone(), &base.p, &base.r, num)
}
