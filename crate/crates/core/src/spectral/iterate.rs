//! The eigenvalue driver: polynomial roots, spectral shifting and
//! eigenfunctions with their quality diagnostics.

use alloc::sync::Arc;
use alloc::vec::Vec;

use super::charpoly::{characteristic, characteristic_periodic_singular, CharacteristicPolynomial, EndData};
use super::roots::{evaluate_log2, polish, polynomial_roots};
use crate::error::{contract, Error, Result};
use crate::grid::{Grid, SampledFunction};
use crate::precision::{cabs, cabs_f64, cadd, ccos, cdiv, cinv, cis_zero, cmul, csin, csub, Complex, Numeric, Real};
use crate::problem::{ResolvedBoundary, SturmLiouvilleProblem};
use crate::spps::{
    build_formal_powers_singular, build_u0_regular_at, evaluate_combinations, particular_for, shift_base, tail_bound, Combination,
    Families, ParticularSolution, PowerPlan, PowerSource,
};

#[derive(Debug, Clone, PartialEq)]
pub enum ShiftMode {
    /// Shift to the largest trusted eigenvalue until `count` are found.
    Auto,
    /// A single polynomial.
    None,
    /// Shift to each listed value in turn.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOptions {
    /// Grid cells M.
    pub grid: usize,
    /// Truncation N.
    pub powers: usize,
    /// Relative accuracy demanded of accepted roots.
    pub tolerance: f64,
    pub shift: ShiftMode,
    pub max_rounds: usize,
    /// Index of the lowest eigenvalue in the problem's numbering.
    pub first_index: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self { grid: 2000, powers: 60, tolerance: 1e-8, shift: ShiftMode::Auto, max_rounds: 20, first_index: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpair<R: Real> {
    pub lambda: Complex<R>,
    pub u: SampledFunction<R>,
    pub du: SampledFunction<R>,
    /// |λ|·|last series term at b| of the normalised eigenfunction
    pub delta1: f64,
    /// boundary-condition residual of the normalised eigenfunction
    pub delta2: f64,
    /// a priori truncation bound at λ (∞ when unavailable)
    pub tail: f64,
    pub index_hint: usize,
    /// shifting round (0 = unshifted) that produced the eigenvalue
    pub round: usize,
}

/// A root accepted from one polynomial.
#[derive(Debug, Clone)]
struct Accepted<R: Real> {
    lambda: Complex<R>,
    round: usize,
}

/// Trusted roots of κ_N as eigenvalues λ = λ₀ + Λ, sorted by real part.
/// A root is kept when |Λ| is inside the trust radius and its estimated
/// error relative to max(1, |λ|) is below `tolerance`. The estimate adds the
/// rounding level ε·Σ|aₘ||Λ|ᵐ and the last kept term |a_N||Λ|ᴺ (a proxy for
/// the first omitted one) and divides by |κ′(Λ)|.
pub fn find_roots<R: Real>(cp: &CharacteristicPolynomial<R>, tolerance: f64, num: &Numeric<R>) -> Result<Vec<(Complex<R>, f64)>> {
    let raw = polynomial_roots(&cp.coeffs, num)?;
    let log_eps = libm::log2(num.ctx.epsilon());
    let log_tol = libm::log2(tolerance);
    let n = cp.coeffs.len() - 1;
    let log_last = crate::precision::clog2_abs(&cp.coeffs[n]);
    let mut out = Vec::new();
    for z in raw {
        if !(cabs_f64(&z) <= cp.trust_radius) {
            continue;
        }
        let z = polish(&cp.coeffs, &z, num);
        if !(cabs_f64(&z) <= cp.trust_radius) {
            continue;
        }
        let (lp, ldp, ls) = evaluate_log2(&cp.coeffs, &z, num);
        let lambda = cadd(&cp.lambda0, &z);
        let scale = libm::log2(cabs_f64(&lambda).max(1.0));
        let rounding = log_eps + ls;
        let truncation = log_last + n as f64 * crate::precision::clog2_abs(&z);
        let err = rounding.max(truncation) + 1.0 - ldp - scale;
        if err > log_tol {
            continue;
        }
        out.push((lambda, libm::exp2(lp)));
    }
    out.sort_by(|a, b| a.0.re.partial_cmp(&b.0.re).unwrap_or(core::cmp::Ordering::Equal));
    Ok(out)
}

struct Round<R: Real> {
    base: ParticularSolution<R>,
    cp: CharacteristicPolynomial<R>,
}

fn boundary_residual<R: Real>(
    bc: &ResolvedBoundary<R>,
    lambda: &Complex<R>,
    ub: &Complex<R>,
    dub: &Complex<R>,
    num: &mut Numeric<R>,
) -> f64 {
    let robin = |t: &R, num: &mut Numeric<R>| {
        let z = num.lift(t.clone());
        cadd(&cmul(ub, &ccos(&z, num)), &cmul(dub, &csin(&z, num)))
    };
    let r = match bc {
        ResolvedBoundary::Dirichlet | ResolvedBoundary::PeriodicSingular => ub.clone(),
        ResolvedBoundary::Robin { beta, .. } | ResolvedBoundary::RegularAtLeft { beta } => robin(beta, num),
        ResolvedBoundary::LambdaDependent { beta1, beta2, beta1p, beta2p, phi, .. } => {
            let mut f = num.czero();
            for c in phi.iter().rev() {
                f = cadd(&cmul(&f, lambda), c);
            }
            let lhs = csub(&cmul(beta1, ub), &cmul(beta2, dub));
            let rhs = cmul(&f, &csub(&cmul(beta1p, ub), &cmul(beta2p, dub)));
            csub(&lhs, &rhs)
        }
    };
    cabs_f64(&r)
}

/// Scales u to max-abs 1 with the first non-negligible value real positive;
/// returns the applied factor.
fn normalise<R: Real>(u: &SampledFunction<R>, num: &Numeric<R>) -> Complex<R> {
    let mags: Vec<R> = u.values().iter().map(cabs).collect();
    let mut top = num.zero();
    for m in &mags {
        if *m > top {
            top = m.clone();
        }
    }
    if top.is_zero() {
        return num.cone();
    }
    let floor = top.mul_ref(&num.real(num.ctx.epsilon()));
    let first = mags.iter().position(|m| *m > floor).unwrap_or(0);
    let v = &u.values()[first];
    // conj(v)/(|v|·top)
    let phase = cdiv(&Complex::new(v.re.clone(), -v.im.clone()), &num.lift(mags[first].clone()));
    cdiv(&phase, &num.lift(top))
}

fn regular_pairs<R: Real>(
    round: &Round<R>,
    accepted: &[Accepted<R>],
    bc: &ResolvedBoundary<R>,
    n: usize,
    num: &mut Numeric<R>,
) -> Result<Vec<Eigenpair<R>>> {
    let plan = PowerPlan::new(&round.base, n, 0, num)?;
    let combos: Vec<Combination<R>> = accepted
        .iter()
        .map(|a| {
            let (c1, c2) = round.cp.shape.coefficients(num);
            Combination { lambda: a.lambda.clone(), c1, c2 }
        })
        .collect();
    let sols = evaluate_combinations(&plan, &round.base, &combos, num)?;
    // last series terms at b for δ₁
    let end = EndData::collect(&plan, &round.base)?;
    let mut out = Vec::with_capacity(accepted.len());
    for ((a, c), (u, du)) in accepted.iter().zip(&combos).zip(sols) {
        let k = normalise(&u, num);
        let u = u.map(|v| cmul(v, &k));
        let du = du.map(|v| cmul(v, &k));
        let shift = csub(&a.lambda, &round.base.lambda0);
        let mut pw = num.cone();
        for _ in 0..n {
            pw = cmul(&pw, &shift);
        }
        let mut last = cmul(&c.c1, &end.tilde[2 * n]);
        if !cis_zero(&c.c2) {
            last = cadd(&last, &cmul(&c.c2, &end.plain[2 * n + 1]));
        }
        let last = cmul(&cmul(&cmul(&last, &pw), &end.u0[1]), &k);
        let delta1 = cabs_f64(&a.lambda) * cabs_f64(&last);
        let delta2 = boundary_residual(bc, &a.lambda, u.last(), du.last(), num);
        let tb = tail_bound(&round.base, &a.lambda, n);
        let tail = if tb.available { cabs_f64(&c.c1) * tb.bound_u1 + cabs_f64(&c.c2) * tb.bound_u2 } else { f64::INFINITY };
        out.push(Eigenpair { lambda: a.lambda.clone(), u, du, delta1, delta2, tail: tail * cabs_f64(&k), index_hint: 0, round: a.round });
    }
    Ok(out)
}

fn merge<R: Real>(old: Vec<Accepted<R>>, new: Vec<Accepted<R>>, star: f64) -> Vec<Accepted<R>> {
    let below = old.iter().map(|a| a.lambda.re.to_f64()).filter(|&v| v < star).fold(f64::NEG_INFINITY, f64::max);
    let cut = if below.is_finite() { (star + below) / 2.0 } else { star };
    let mut out: Vec<Accepted<R>> = old.into_iter().filter(|a| a.lambda.re.to_f64() < cut).collect();
    out.extend(new.into_iter().filter(|a| a.lambda.re.to_f64() >= cut));
    out.sort_by(|a, b| a.lambda.re.partial_cmp(&b.lambda.re).unwrap_or(core::cmp::Ordering::Equal));
    out
}

/// Eigenpairs of a problem with a regular boundary condition or the
/// periodic-singular one.
pub fn eigen_iterate<R: Real>(
    prob: &SturmLiouvilleProblem,
    count: usize,
    opts: &SpectralOptions,
    num: &mut Numeric<R>,
) -> Result<Vec<Eigenpair<R>>> {
    if count == 0 {
        return contract("count must be at least 1");
    }
    let bc = prob.boundary.resolve(num)?;
    let grid = prob.grid(opts.grid, num)?;
    if matches!(bc, ResolvedBoundary::PeriodicSingular) {
        return periodic(prob, &grid, count, opts, num);
    }
    let n = opts.powers;
    let base = particular_for(prob, &grid, num)?;
    let mut rounds: Vec<Round<R>> = Vec::new();
    let mut found: Vec<Accepted<R>> = Vec::new();
    let mut targets: Vec<f64> = match &opts.shift {
        ShiftMode::Explicit(v) => v.iter().rev().cloned().collect(),
        _ => Vec::new(),
    };
    let mut current = base;
    loop {
        let r = rounds.len();
        let plan = PowerPlan::new(&current, n, 0, num)?;
        let end = EndData::collect(&plan, &current)?;
        let cp = characteristic(&end, &bc, num)?;
        let roots = find_roots(&cp, opts.tolerance, num)?;
        let new: Vec<Accepted<R>> = roots.into_iter().map(|(lambda, _)| Accepted { lambda, round: r }).collect();
        if r == 0 {
            if new.is_empty() {
                return Err(Error::Stagnation { round: 0 });
            }
            found = new;
        } else {
            let top = found.iter().map(|a| a.lambda.re.to_f64()).fold(f64::NEG_INFINITY, f64::max);
            let star = current.lambda0.re.to_f64();
            let gains = new.iter().any(|a| a.lambda.re.to_f64() > top);
            found = merge(found, new, star);
            if !gains && opts.shift == ShiftMode::Auto {
                return Err(Error::Stagnation { round: r });
            }
        }
        let families = plan.families();
        drop(plan);
        rounds.push(Round { base: current.clone(), cp });
        if rounds.len() >= opts.max_rounds {
            break;
        }
        let star = match &opts.shift {
            ShiftMode::None => break,
            ShiftMode::Explicit(_) => match targets.pop() {
                Some(t) => num.complex(t, 0.0),
                None => break,
            },
            ShiftMode::Auto => {
                if found.len() >= count || families == Families::TildeOnly {
                    break;
                }
                // largest trusted eigenvalue that is not the current centre
                let centre = &current.lambda0;
                let tol = 1e-6 * (1.0 + cabs_f64(centre));
                match found.iter().rev().find(|a| cabs_f64(&csub(&a.lambda, centre)) > tol) {
                    Some(a) => num.lift(a.lambda.re.clone()),
                    None => return Err(Error::Stagnation { round: r }),
                }
            }
        };
        current = if prob.particular.is_none() && prob.weight.is_none() {
            build_u0_regular_at(prob, &grid, &star, num, 1.0)?
        } else {
            let plan = PowerPlan::new(&current, n, 0, num)?;
            shift_base(&plan, &current, &star, num)?
        };
    }
    found.truncate(count);
    let mut pairs: Vec<Eigenpair<R>> = Vec::with_capacity(found.len());
    for (r, round) in rounds.iter().enumerate() {
        let mine: Vec<Accepted<R>> = found.iter().filter(|a| a.round == r).cloned().collect();
        if !mine.is_empty() {
            pairs.extend(regular_pairs(round, &mine, &bc, n, num)?);
        }
    }
    pairs.sort_by(|a, b| a.lambda.re.partial_cmp(&b.lambda.re).unwrap_or(core::cmp::Ordering::Equal));
    // a shift may leave a gap below its trust region, so prefer oscillation
    // counts whenever the eigenfunctions are real
    let counted: Option<Vec<usize>> = match bc {
        ResolvedBoundary::Dirichlet | ResolvedBoundary::Robin { .. } | ResolvedBoundary::RegularAtLeft { .. } => {
            pairs.iter().map(|p| sign_changes(&p.u)).collect()
        }
        _ => None,
    };
    match counted {
        Some(z) if z.windows(2).all(|w| w[0] < w[1]) => {
            for (p, z) in pairs.iter_mut().zip(z) {
                p.index_hint = opts.first_index + z;
            }
        }
        _ => {
            for (i, p) in pairs.iter_mut().enumerate() {
                p.index_hint = opts.first_index + i;
            }
        }
    }
    Ok(pairs)
}

/// Interior sign changes of a (numerically) real eigenfunction.
fn sign_changes<R: Real>(u: &SampledFunction<R>) -> Option<usize> {
    let re: Vec<f64> = u.values().iter().map(|v| v.re.to_f64()).collect();
    let top = re.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let im = u.values().iter().fold(0.0f64, |m, v| m.max(v.im.to_f64().abs()));
    if !(top > 0.0) || im > 1e-6 * top {
        return None;
    }
    let mut last = 0.0;
    let mut count = 0;
    // the end values are boundary residuals whose sign means nothing
    for &v in &re[1..re.len() - 1] {
        if v.abs() <= 1e-12 * top {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    Some(count)
}

fn periodic<R: Real>(
    prob: &SturmLiouvilleProblem,
    grid: &Arc<Grid<R>>,
    count: usize,
    opts: &SpectralOptions,
    num: &mut Numeric<R>,
) -> Result<Vec<Eigenpair<R>>> {
    let Some(wd) = &prob.weight else {
        return contract("periodic-singular boundary requires a singular weight");
    };
    let w = wd.resolve(num)?;
    let n = opts.powers;
    let sp = build_formal_powers_singular(&w, grid, n, num)?;
    let cp = characteristic_periodic_singular(&sp, num);
    let roots = find_roots(&cp, opts.tolerance, num)?;
    let eps = num.ctx.epsilon();
    // the spectrum is symmetric under λ ↦ −λ; report Re λ > 0, dropping λ = 0
    let mut kept: Vec<Complex<R>> = roots.into_iter().map(|r| r.0).filter(|z| z.re.to_f64() > 1e3 * eps * (1.0 + cabs_f64(z))).collect();
    if kept.is_empty() {
        return Err(Error::Stagnation { round: 0 });
    }
    kept.truncate(count);
    let origin = grid.nearest(&num.zero());
    let origin = if grid.node(origin).to_f64() < 0.0 { origin + 1 } else { origin };
    let mut out = Vec::with_capacity(kept.len());
    for (i, lambda) in kept.into_iter().enumerate() {
        let (u, du) = sp.solution(&lambda, num)?;
        let k = cinv(u.at(origin));
        let u = u.map(|v| cmul(v, &k));
        let du = du.map(|v| cmul(v, &k));
        let (left, right) = sp.endpoint_values(&lambda, num);
        let delta2 = cabs_f64(&cmul(&csub(&right, &left), &k));
        let mut pw = num.cone();
        for _ in 0..n {
            pw = cmul(&pw, &lambda);
        }
        let last = cmul(&cmul(&pw, &sp.right[n]), &k);
        let delta1 = cabs_f64(&lambda) * cabs_f64(&last);
        out.push(Eigenpair { lambda, u, du, delta1, delta2, tail: f64::INFINITY, index_hint: opts.first_index + i, round: 0 });
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
