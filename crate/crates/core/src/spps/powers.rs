//! Formal powers X̃⁽ⁿ⁾, X⁽ⁿ⁾ and the series solutions built from them.
//!
//! X̃⁽⁰⁾ = X⁽⁰⁾ = 1; X̃ integrates against r·u₀² on odd steps and against
//! 1/(u₀²p) on even steps, X the other way round. All integrals start at the
//! anchor x₀, so every power of order ≥ 1 vanishes there exactly.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::particular::ParticularSolution;
use crate::error::{contract, Error, Result};
use crate::grid::{Grid, SampledFunction};
use crate::precision::{cadd, cdiv, cis_finite, cis_zero, cmul, cmul_add, Complex, Numeric, Real};
use crate::quadrature::Cumulator;

/// Which families a recursion produces. The X family needs 1/(u₀²p) at
/// the anchor, which does not exist at a regular-singular endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Families {
    Both,
    TildeOnly,
}

type Visitor<'v, R> = dyn FnMut(usize, Option<&[Complex<R>]>, Option<&[Complex<R>]>) -> Result<()> + 'v;

/// Anything that can replay the powers order by order: X̃⁽ⁿ⁾ for n ≤ 2N and
/// X⁽ⁿ⁾ for n ≤ 2N+1.
pub trait PowerSource<R: Real> {
    fn truncation(&self) -> usize;
    fn anchor(&self) -> usize;
    fn grid(&self) -> &Arc<Grid<R>>;
    fn families(&self) -> Families;
    fn visit(&self, f: &mut Visitor<'_, R>) -> Result<()>;
}

fn ones<R: Real>(n: usize, num: &Numeric<R>) -> Vec<Complex<R>> {
    vec![num.cone(); n]
}

/// Runs the alternating recursion once, handing each order to `f` and
/// keeping only the current order of each family in memory.
pub(crate) fn run_recursion<R: Real>(
    cum: &Cumulator<R>,
    rw: &[Complex<R>],
    pinv: &[Complex<R>],
    anchor: usize,
    n_max: usize,
    families: Families,
    num: &Numeric<R>,
    f: &mut Visitor<'_, R>,
) -> Result<()> {
    let len = rw.len();
    let mut t = ones(len, num);
    let mut x = if families == Families::Both { Some(ones(len, num)) } else { None };
    f(0, Some(&t), x.as_deref())?;
    let zero = num.czero();
    let product = |prev: &[Complex<R>], aux: &[Complex<R>], n: usize| -> Vec<Complex<R>> {
        let mut g: Vec<Complex<R>> = prev.iter().zip(aux).map(|(a, b)| cmul(a, b)).collect();
        if n >= 2 {
            // prev vanishes at the anchor; keep 0·∞ out of the integrand
            g[anchor] = zero.clone();
        }
        g
    };
    for n in 1..=2 * n_max + 1 {
        let odd = n % 2 == 1;
        let tn = if n <= 2 * n_max {
            let g = product(&t, if odd { rw } else { pinv }, n);
            t = cum.integrate(&g, anchor);
            if !cis_finite(&t[len - 1]) || !cis_finite(&t[0]) {
                return Err(Error::NonFinite(alloc::format!("formal power X̃({n})")));
            }
            Some(t.as_slice())
        } else {
            None
        };
        let xn = match x.as_mut() {
            Some(xv) => {
                let g = product(xv, if odd { pinv } else { rw }, n);
                *xv = cum.integrate(&g, anchor);
                if !cis_finite(&xv[len - 1]) || !cis_finite(&xv[0]) {
                    return Err(Error::NonFinite(alloc::format!("formal power X({n})")));
                }
                Some(xv.as_slice())
            }
            None => None,
        };
        f(n, tn, xn)?;
    }
    Ok(())
}

/// Powers regenerated on demand from a particular solution.
pub struct PowerPlan<'a, R: Real> {
    base: &'a ParticularSolution<R>,
    cum: Cumulator<R>,
    anchor: usize,
    n: usize,
    families: Families,
    num: Numeric<R>,
}

impl<'a, R: Real> PowerPlan<'a, R> {
    pub fn new(base: &'a ParticularSolution<R>, n: usize, anchor: usize, num: &Numeric<R>) -> Result<Self> {
        let grid = base.grid().clone();
        if anchor > grid.cells() {
            return contract("anchor outside grid");
        }
        let families = if base.aux_pinv.values().iter().all(cis_finite) { Families::Both } else { Families::TildeOnly };
        Ok(Self { base, cum: Cumulator::new(grid, num), anchor, n, families, num: num.clone() })
    }

    pub fn base(&self) -> &ParticularSolution<R> {
        self.base
    }
}

impl<R: Real> PowerSource<R> for PowerPlan<'_, R> {
    fn truncation(&self) -> usize {
        self.n
    }
    fn anchor(&self) -> usize {
        self.anchor
    }
    fn grid(&self) -> &Arc<Grid<R>> {
        self.base.grid()
    }
    fn families(&self) -> Families {
        self.families
    }
    fn visit(&self, f: &mut Visitor<'_, R>) -> Result<()> {
        run_recursion(&self.cum, self.base.aux_rw.values(), self.base.aux_pinv.values(), self.anchor, self.n, self.families, &self.num, f)
    }
}

/// All powers kept as sampled arrays.
#[derive(Debug, Clone)]
pub struct FormalPowers<R: Real> {
    pub n: usize,
    pub x0_index: usize,
    /// X̃⁽⁰⁾..X̃⁽²ᴺ⁾
    pub xt: Vec<SampledFunction<R>>,
    /// X⁽⁰⁾..X⁽²ᴺ⁺¹⁾; empty when only the X̃ family exists.
    pub x: Vec<SampledFunction<R>>,
    pub lambda0: Complex<R>,
}

pub fn build_formal_powers<R: Real>(base: &ParticularSolution<R>, n: usize, x0_index: usize, num: &Numeric<R>) -> Result<FormalPowers<R>> {
    let plan = PowerPlan::new(base, n, x0_index, num)?;
    let grid = base.grid().clone();
    let mut xt = Vec::with_capacity(2 * n + 1);
    let mut x = Vec::new();
    plan.visit(&mut |_, t, xx| {
        if let Some(t) = t {
            xt.push(SampledFunction::new(grid.clone(), t.to_vec())?);
        }
        if let Some(xx) = xx {
            x.push(SampledFunction::new(grid.clone(), xx.to_vec())?);
        }
        Ok(())
    })?;
    Ok(FormalPowers { n, x0_index, xt, x, lambda0: base.lambda0.clone() })
}

impl<R: Real> PowerSource<R> for FormalPowers<R> {
    fn truncation(&self) -> usize {
        self.n
    }
    fn anchor(&self) -> usize {
        self.x0_index
    }
    fn grid(&self) -> &Arc<Grid<R>> {
        self.xt[0].grid()
    }
    fn families(&self) -> Families {
        if self.x.is_empty() {
            Families::TildeOnly
        } else {
            Families::Both
        }
    }
    fn visit(&self, f: &mut Visitor<'_, R>) -> Result<()> {
        for k in 0..=2 * self.n + 1 {
            f(k, self.xt.get(k).map(|s| s.values()), self.x.get(k).map(|s| s.values()))?;
        }
        Ok(())
    }
}

/// Values of every power at selected nodes.
#[derive(Debug, Clone)]
pub struct NodePowers<R: Real> {
    pub nodes: Vec<usize>,
    /// tilde[i][n] = X̃⁽ⁿ⁾ at nodes[i]
    pub tilde: Vec<Vec<Complex<R>>>,
    /// plain[i][n] = X⁽ⁿ⁾ at nodes[i] (empty without the X family)
    pub plain: Vec<Vec<Complex<R>>>,
}

pub fn node_powers<R: Real>(src: &dyn PowerSource<R>, nodes: &[usize]) -> Result<NodePowers<R>> {
    let mut tilde = vec![Vec::new(); nodes.len()];
    let mut plain = vec![Vec::new(); nodes.len()];
    src.visit(&mut |_, t, x| {
        for (i, &j) in nodes.iter().enumerate() {
            if let Some(t) = t {
                tilde[i].push(t[j].clone());
            }
            if let Some(x) = x {
                plain[i].push(x[j].clone());
            }
        }
        Ok(())
    })?;
    Ok(NodePowers { nodes: nodes.to_vec(), tilde, plain })
}

/// u₁, u₂ and their derivatives at one λ.
#[derive(Debug, Clone)]
pub struct SolutionPair<R: Real> {
    pub lambda: Complex<R>,
    pub u1: SampledFunction<R>,
    pub u2: SampledFunction<R>,
    pub du1: SampledFunction<R>,
    pub du2: SampledFunction<R>,
}

/// The solution c₁u₁ + c₂u₂ at spectral value λ.
#[derive(Debug, Clone)]
pub struct Combination<R: Real> {
    pub lambda: Complex<R>,
    pub c1: Complex<R>,
    pub c2: Complex<R>,
}

/// u and u′ for each requested combination in a single replay of the powers.
pub fn evaluate_combinations<R: Real>(
    src: &dyn PowerSource<R>,
    base: &ParticularSolution<R>,
    combos: &[Combination<R>],
    num: &Numeric<R>,
) -> Result<Vec<(SampledFunction<R>, SampledFunction<R>)>> {
    let grid = src.grid().clone();
    let len = grid.cells() + 1;
    let n_max = src.truncation();
    if src.families() == Families::TildeOnly && combos.iter().any(|c| !cis_zero(&c.c2)) {
        return contract("u₂ is unavailable when 1/(u₀²p) is singular at a node");
    }
    // series sums S (values) and D (fluxes) per combination
    let mut s: Vec<Vec<Complex<R>>> = vec![vec![num.czero(); len]; combos.len()];
    let mut d: Vec<Vec<Complex<R>>> = vec![vec![num.czero(); len]; combos.len()];
    let shifts: Vec<Complex<R>> = combos.iter().map(|c| &c.lambda - &base.lambda0).collect();
    // pw[i] = Λᵢ^k for the current k
    let mut pw_t: Vec<Complex<R>> = vec![num.cone(); combos.len()];
    let mut pw_x: Vec<Complex<R>> = vec![num.cone(); combos.len()];
    let axpy = |acc: &mut Vec<Complex<R>>, w: &Complex<R>, v: &[Complex<R>]| {
        for (a, b) in acc.iter_mut().zip(v) {
            *a = cmul_add(w, b, a);
        }
    };
    src.visit(&mut |n, t, x| {
        for (i, c) in combos.iter().enumerate() {
            let skip_t = cis_zero(&c.c1);
            let skip_x = cis_zero(&c.c2);
            if n % 2 == 0 {
                // X̃⁽²ᵏ⁾ → u₁ with Λᵏ; X⁽²ᵏ⁾ → u₂′ with Λᵏ
                if n > 0 {
                    pw_t[i] = cmul(&pw_t[i], &shifts[i]);
                }
                if let (Some(t), false) = (t, skip_t) {
                    axpy(&mut s[i], &cmul(&c.c1, &pw_t[i]), t);
                }
                if let (Some(x), false) = (x, skip_x) {
                    if n / 2 <= n_max {
                        axpy(&mut d[i], &cmul(&c.c2, &pw_t[i]), x);
                    }
                }
            } else {
                // X̃⁽²ᵏ⁻¹⁾ → u₁′ with Λᵏ; X⁽²ᵏ⁺¹⁾ → u₂ with Λᵏ
                if let (Some(t), false) = (t, skip_t) {
                    let w = cmul(&pw_t[i], &shifts[i]);
                    axpy(&mut d[i], &cmul(&c.c1, &w), t);
                }
                if let (Some(x), false) = (x, skip_x) {
                    axpy(&mut s[i], &cmul(&c.c2, &pw_x[i]), x);
                    pw_x[i] = cmul(&pw_x[i], &shifts[i]);
                }
            }
        }
        Ok(())
    })?;
    let u0 = base.u0.values();
    let du0 = base.du0.values();
    let p = base.p.values();
    let mut out = Vec::with_capacity(combos.len());
    for (si, di) in s.into_iter().zip(d) {
        let u: Vec<Complex<R>> = si.iter().zip(u0).map(|(a, b)| cmul(a, b)).collect();
        let mut du: Vec<Complex<R>> = Vec::with_capacity(len);
        let mut bad = Vec::new();
        for j in 0..len {
            let up = cmul(&u0[j], &p[j]);
            if cis_zero(&up) {
                bad.push(j);
                du.push(num.czero());
            } else {
                du.push(cadd(&cmul(&si[j], &du0[j]), &cdiv(&di[j], &up)));
            }
        }
        // at a regular-singular endpoint u₀p = 0: extrapolate linearly
        for j in bad {
            let v = if j == 0 && len > 2 {
                &du[1] + &du[1] - du[2].clone()
            } else if j + 1 == len && len > 2 {
                &du[len - 2] + &du[len - 2] - du[len - 3].clone()
            } else {
                num.czero()
            };
            du[j] = v;
        }
        out.push((SampledFunction::new(grid.clone(), u)?, SampledFunction::new(grid.clone(), du)?));
    }
    Ok(out)
}

/// u₁ = u₀ΣΛᵏX̃⁽²ᵏ⁾, u₂ = u₀ΣΛᵏX⁽²ᵏ⁺¹⁾ and their derivatives, Λ = λ − λ₀.
pub fn evaluate_solutions<R: Real>(
    src: &dyn PowerSource<R>,
    base: &ParticularSolution<R>,
    lambda: &Complex<R>,
    num: &Numeric<R>,
) -> Result<SolutionPair<R>> {
    let one = num.cone();
    let zero = num.czero();
    if src.families() == Families::TildeOnly {
        let mut r = evaluate_combinations(src, base, &[Combination { lambda: lambda.clone(), c1: one, c2: zero }], num)?;
        let (u1, du1) = r.remove(0);
        let nan = SampledFunction::constant(src.grid().clone(), Complex::new(num.real(f64::NAN), num.real(f64::NAN)));
        return Ok(SolutionPair { lambda: lambda.clone(), u1, du1, u2: nan.clone(), du2: nan });
    }
    let combos = [
        Combination { lambda: lambda.clone(), c1: one.clone(), c2: zero.clone() },
        Combination { lambda: lambda.clone(), c1: zero, c2: one },
    ];
    let mut r = evaluate_combinations(src, base, &combos, num)?;
    let (u2, du2) = r.pop().unwrap();
    let (u1, du1) = r.pop().unwrap();
    Ok(SolutionPair { lambda: lambda.clone(), u1, u2, du1, du2 })
}
