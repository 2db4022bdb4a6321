//! Sturm–Liouville problems `(p u′)′ + q u = λ r u` on [a, b].

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{contract, Error, Result};
use crate::expr::{Compiled, Expression};
use crate::grid::{Grid, SampledFunction};
use crate::precision::{Complex, Numeric, Real};
use crate::quadrature::Weight;

/// Points where the weight |tan(x/2)|^ν is singular or degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SingularPoints {
    pub a: bool,
    pub origin: bool,
    pub b: bool,
}

/// Interior-singular integrating factor w(x) = |tan(x/2)|^ν.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDescriptor {
    /// ν as a constant expression (e.g. `1/0.1`).
    pub exponent: Expression,
    pub singular: SingularPoints,
}

impl WeightDescriptor {
    pub fn resolve<R: Real>(&self, num: &mut Numeric<R>) -> Result<Weight<R>> {
        let nu = real_constant(&self.exponent, num, "weight exponent")?;
        Weight::new(nu, num)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryCondition {
    /// u(a) = u(b) = 0.
    Dirichlet,
    /// u(a)cos α + u′(a)sin α = 0 and u(b)cos β + u′(b)sin β = 0.
    Robin { alpha: Expression, beta: Expression },
    /// u(a)cos α + u′(a)sin α = 0 and
    /// β₁u(b) − β₂u′(b) = φ(λ)(β₁′u(b) − β₂′u′(b)) with polynomial φ.
    LambdaDependent {
        alpha: Expression,
        beta1: Expression,
        beta2: Expression,
        beta1_prime: Expression,
        beta2_prime: Expression,
        /// φ(λ) = Σ phi[k] λ^k
        phi: Vec<Expression>,
    },
    /// Matching of the solution regular at the interior singular point at
    /// both ends of [−π, π].
    PeriodicSingular,
    /// Left endpoint is regular-singular: only the solution u₁ that is
    /// regular there is admissible. Right: u(b)cos β + u′(b)sin β = 0.
    RegularAtLeft { beta: Expression },
}

impl BoundaryCondition {
    pub fn name(&self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Robin { .. } => "robin",
            BoundaryCondition::LambdaDependent { .. } => "lambda-dependent",
            BoundaryCondition::PeriodicSingular => "periodic-singular",
            BoundaryCondition::RegularAtLeft { .. } => "regular-at-left",
        }
    }
}

/// A particular solution of the λ = 0 equation given in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticParticular {
    pub u0: Expression,
    pub du0: Expression,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SturmLiouvilleProblem {
    pub name: String,
    pub a: Expression,
    pub b: Expression,
    pub p: Expression,
    pub q: Expression,
    pub r: Expression,
    pub boundary: BoundaryCondition,
    pub weight: Option<WeightDescriptor>,
    pub particular: Option<AnalyticParticular>,
}

/// Coefficients compiled at one precision.
#[derive(Debug, Clone)]
pub struct Coefficients<R: Real> {
    pub a: R,
    pub b: R,
    pub p: Compiled<R>,
    pub q: Compiled<R>,
    pub r: Compiled<R>,
}

pub(crate) fn real_constant<R: Real>(e: &Expression, num: &mut Numeric<R>, what: &str) -> Result<R> {
    let v = e.constant_value(num)?;
    if !v.im.is_zero() {
        return contract(alloc::format!("{what} must be real"));
    }
    Ok(v.re)
}

impl SturmLiouvilleProblem {
    /// Problem with r ≡ 1 and no weight or analytic particular solution.
    pub fn new(name: &str, a: Expression, b: Expression, p: Expression, q: Expression, boundary: BoundaryCondition) -> Self {
        Self { name: name.into(), a, b, p, q, r: Expression::number(1), boundary, weight: None, particular: None }
    }

    pub fn compile<R: Real>(&self, num: &mut Numeric<R>) -> Result<Coefficients<R>> {
        let a = real_constant(&self.a, num, "left endpoint")?;
        let b = real_constant(&self.b, num, "right endpoint")?;
        if !(a < b) {
            return contract("interval requires a < b");
        }
        if matches!(self.boundary, BoundaryCondition::PeriodicSingular) && self.weight.is_none() {
            return contract("periodic-singular boundary requires a singular weight");
        }
        Ok(Coefficients { a, b, p: self.p.compile(num)?, q: self.q.compile(num)?, r: self.r.compile(num)? })
    }

    /// The grid the solver uses for M cells. With a singular weight, the
    /// nodes are the midpoints of M equal cells on [a, b] so that no node
    /// falls on a, 0 or b.
    pub fn grid<R: Real>(&self, m: usize, num: &mut Numeric<R>) -> Result<Arc<Grid<R>>> {
        let c = self.compile(num)?;
        let grid = match &self.weight {
            None => Grid::uniform(&c.a, &c.b, m, num)?,
            Some(w) => {
                if w.singular.origin && m % 2 != 0 {
                    return contract("offset grid needs an even cell count so that 0 is a cell boundary");
                }
                if m < 3 {
                    return contract("offset grid needs at least 3 cells");
                }
                let h = c.b.sub_ref(&c.a).div_ref(&num.int(m as i64));
                let lo = c.a.add_ref(&h.ldexp(-1));
                let hi = c.b.sub_ref(&h.ldexp(-1));
                Grid::uniform(&lo, &hi, m - 1, num)?
            }
        };
        Ok(Arc::new(grid))
    }
}

/// (p, q, r) sampled at the nodes of `grid`.
pub fn sample_coefficients<R: Real>(
    prob: &SturmLiouvilleProblem,
    grid: &Arc<Grid<R>>,
    num: &mut Numeric<R>,
) -> Result<(SampledFunction<R>, SampledFunction<R>, SampledFunction<R>)> {
    let c = prob.compile(num)?;
    if let Some(w) = &prob.weight {
        let tol = grid.step().mul_ref(&num.real(1e-3));
        let mut flagged: Vec<R> = Vec::new();
        if w.singular.a {
            flagged.push(c.a.clone());
        }
        if w.singular.origin {
            flagged.push(num.zero());
        }
        if w.singular.b {
            flagged.push(c.b.clone());
        }
        for (j, x) in grid.nodes().iter().enumerate() {
            if flagged.iter().any(|s| x.sub_ref(s).abs() <= tol) {
                return Err(Error::NodeSingularity { node: j, x: x.to_f64() });
            }
        }
    }
    let xs = grid.nodes();
    let p = SampledFunction::new(grid.clone(), c.p.eval_many(xs, num)?)?;
    let q = SampledFunction::new(grid.clone(), c.q.eval_many(xs, num)?)?;
    let r = SampledFunction::new(grid.clone(), c.r.eval_many(xs, num)?)?;
    Ok((p, q, r))
}

/// Boundary parameters evaluated at one precision.
#[derive(Debug, Clone)]
pub enum ResolvedBoundary<R: Real> {
    Dirichlet,
    Robin { alpha: R, beta: R },
    LambdaDependent { alpha: R, beta1: Complex<R>, beta2: Complex<R>, beta1p: Complex<R>, beta2p: Complex<R>, phi: Vec<Complex<R>> },
    PeriodicSingular,
    RegularAtLeft { beta: R },
}

impl BoundaryCondition {
    pub fn resolve<R: Real>(&self, num: &mut Numeric<R>) -> Result<ResolvedBoundary<R>> {
        let angle = |e: &Expression, num: &mut Numeric<R>, what: &str| -> Result<R> {
            let v = real_constant(e, num, what)?;
            let pi = num.pi();
            if v < num.zero() || v >= pi {
                return contract(alloc::format!("{what} must lie in [0, π)"));
            }
            Ok(v)
        };
        Ok(match self {
            BoundaryCondition::Dirichlet => ResolvedBoundary::Dirichlet,
            BoundaryCondition::PeriodicSingular => ResolvedBoundary::PeriodicSingular,
            BoundaryCondition::Robin { alpha, beta } => {
                ResolvedBoundary::Robin { alpha: angle(alpha, num, "alpha")?, beta: angle(beta, num, "beta")? }
            }
            BoundaryCondition::RegularAtLeft { beta } => ResolvedBoundary::RegularAtLeft { beta: angle(beta, num, "beta")? },
            BoundaryCondition::LambdaDependent { alpha, beta1, beta2, beta1_prime, beta2_prime, phi } => {
                if phi.is_empty() {
                    return contract("phi needs at least one coefficient");
                }
                ResolvedBoundary::LambdaDependent {
                    alpha: angle(alpha, num, "alpha")?,
                    beta1: beta1.constant_value(num)?,
                    beta2: beta2.constant_value(num)?,
                    beta1p: beta1_prime.constant_value(num)?,
                    beta2p: beta2_prime.constant_value(num)?,
                    phi: phi.iter().map(|e| e.constant_value(num)).collect::<Result<_>>()?,
                }
            }
        })
    }
}
