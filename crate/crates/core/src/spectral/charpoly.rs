//! Characteristic polynomials κ_N(Λ), Λ = λ − λ₀, for each boundary
//! condition.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{contract, Error, Result};
use crate::precision::{cadd, ccos, cdiv, cis_zero, cmul, csin, Complex, Numeric, Real};
use crate::problem::ResolvedBoundary;
use crate::spps::{node_powers, NodePowers, ParticularSolution, PowerSource, SingularPowers};

/// Which solution (c₁u₁ + c₂u₂) an eigenfunction is.
#[derive(Debug, Clone)]
pub enum Shape<R: Real> {
    /// u₁ alone
    Regular,
    /// u₂ alone
    Second,
    /// u₁ + γu₂
    Mixed(Complex<R>),
    /// the series regular at the interior singular point
    Singular,
}

impl<R: Real> Shape<R> {
    pub fn coefficients(&self, num: &Numeric<R>) -> (Complex<R>, Complex<R>) {
        match self {
            Shape::Regular | Shape::Singular => (num.cone(), num.czero()),
            Shape::Second => (num.czero(), num.cone()),
            Shape::Mixed(g) => (num.cone(), g.clone()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CharacteristicPolynomial<R: Real> {
    pub coeffs: Vec<Complex<R>>,
    pub lambda0: Complex<R>,
    /// Largest |λ − λ₀| over which the truncated series is trusted.
    pub trust_radius: f64,
    pub gamma: Option<Complex<R>>,
    pub shape: Shape<R>,
}

/// Coefficient-based trust radius: inside it the last series term stays
/// below 10⁻³ of some earlier one, i.e.
/// |Λ| ≤ max_{m<N} (|aₘ| / (10³|a_N|))^{1/(N−m)}.
pub fn trust_radius<R: Real>(coeffs: &[Complex<R>]) -> f64 {
    let l: Vec<f64> = coeffs.iter().map(crate::precision::clog2_abs).collect();
    let n = l.len() - 1;
    if l[n] == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    let shift = libm::log2(1e3);
    let best =
        (0..n).filter(|&m| l[m] > f64::NEG_INFINITY).map(|m| (l[m] - l[n] - shift) / (n - m) as f64).fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        0.0
    } else {
        libm::exp2(best.min(1000.0))
    }
}

/// u₀, u₀′, p at both ends and every power at b.
#[derive(Debug, Clone)]
pub struct EndData<R: Real> {
    pub u0: [Complex<R>; 2],
    pub du0: [Complex<R>; 2],
    pub p: [Complex<R>; 2],
    pub lambda0: Complex<R>,
    /// X̃⁽ⁿ⁾(b), n = 0..=2N
    pub tilde: Vec<Complex<R>>,
    /// X⁽ⁿ⁾(b), n = 0..=2N+1 (empty without the X family)
    pub plain: Vec<Complex<R>>,
}

impl<R: Real> EndData<R> {
    pub fn collect(src: &dyn PowerSource<R>, base: &ParticularSolution<R>) -> Result<Self> {
        let m = src.grid().cells();
        if src.anchor() != 0 {
            return contract("characteristic polynomials need powers anchored at a");
        }
        let NodePowers { mut tilde, mut plain, .. } = node_powers(src, &[m])?;
        let at = |f: &crate::grid::SampledFunction<R>| [f.at(0).clone(), f.at(m).clone()];
        Ok(Self {
            u0: at(&base.u0),
            du0: at(&base.du0),
            p: at(&base.p),
            lambda0: base.lambda0.clone(),
            tilde: tilde.pop().unwrap_or_default(),
            plain: plain.pop().unwrap_or_default(),
        })
    }

    fn n(&self) -> usize {
        (self.tilde.len() - 1) / 2
    }

    fn need_plain(&self) -> Result<()> {
        if self.plain.is_empty() {
            return Err(Error::Unsupported("boundary condition needs u₂, which is singular at a".into()));
        }
        Ok(())
    }
}

fn finish<R: Real>(coeffs: Vec<Complex<R>>, d: &EndData<R>, gamma: Option<Complex<R>>, shape: Shape<R>) -> CharacteristicPolynomial<R> {
    let trust_radius = trust_radius(&coeffs);
    CharacteristicPolynomial { coeffs, lambda0: d.lambda0.clone(), trust_radius, gamma, shape }
}

pub fn characteristic_dirichlet<R: Real>(d: &EndData<R>) -> Result<CharacteristicPolynomial<R>> {
    d.need_plain()?;
    let coeffs = (0..=d.n()).map(|m| cmul(&d.u0[1], &d.plain[2 * m + 1])).collect();
    Ok(finish(coeffs, d, None, Shape::Second))
}

fn angle<R: Real>(t: &R, num: &mut Numeric<R>) -> (Complex<R>, Complex<R>) {
    let z = num.lift(t.clone());
    (ccos(&z, num), csin(&z, num))
}

pub fn characteristic_robin<R: Real>(d: &EndData<R>, alpha: &R, beta: &R, num: &mut Numeric<R>) -> Result<CharacteristicPolynomial<R>> {
    d.need_plain()?;
    let n = d.n();
    let (ca, sa) = angle(alpha, num);
    let (cb, sb) = angle(beta, num);
    let [u0a, u0b] = &d.u0;
    let [du0a, du0b] = &d.du0;
    let [pa, pb] = &d.p;
    // value and flux weights at b
    let wv = cadd(&cmul(u0b, &cb), &cmul(du0b, &sb));
    let wf = cdiv(&sb, &cmul(u0b, pb));
    if alpha.is_zero() {
        let coeffs = (0..=n).map(|m| cadd(&cmul(&wv, &d.plain[2 * m + 1]), &cmul(&wf, &d.plain[2 * m]))).collect();
        return Ok(finish(coeffs, d, None, Shape::Second));
    }
    // γ = −u₀(a)p(a)(u₀(a)cot α + u₀′(a))
    let cot = cdiv(&ca, &sa);
    let gamma = -cmul(&cmul(u0a, pa), &cadd(&cmul(u0a, &cot), du0a));
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(cadd(&cmul(&wv, &cadd(&num.cone(), &cmul(&gamma, &d.plain[1]))), &cmul(&gamma, &wf)));
    for m in 1..=n {
        let val = cadd(&d.tilde[2 * m], &cmul(&gamma, &d.plain[2 * m + 1]));
        let flux = cadd(&d.tilde[2 * m - 1], &cmul(&gamma, &d.plain[2 * m]));
        coeffs.push(cadd(&cmul(&wv, &val), &cmul(&wf, &flux)));
    }
    Ok(finish(coeffs, d, Some(gamma.clone()), Shape::Mixed(gamma)))
}

/// Only u₁ is admissible at a; u(b)cos β + u′(b)sin β = 0.
pub fn characteristic_regular_at_left<R: Real>(d: &EndData<R>, beta: &R, num: &mut Numeric<R>) -> Result<CharacteristicPolynomial<R>> {
    let n = d.n();
    let (cb, sb) = angle(beta, num);
    let wv = cadd(&cmul(&d.u0[1], &cb), &cmul(&d.du0[1], &sb));
    let wf = cdiv(&sb, &cmul(&d.u0[1], &d.p[1]));
    let mut coeffs = vec![cmul(&wv, &d.tilde[0])];
    for m in 1..=n {
        coeffs.push(cadd(&cmul(&wv, &d.tilde[2 * m]), &cmul(&wf, &d.tilde[2 * m - 1])));
    }
    Ok(finish(coeffs, d, None, Shape::Regular))
}

fn poly_mul<R: Real>(a: &[Complex<R>], b: &[Complex<R>], num: &Numeric<R>) -> Vec<Complex<R>> {
    let mut out = vec![num.czero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if cis_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = cadd(&out[i + j], &cmul(x, y));
        }
    }
    out
}

/// Coefficients of φ(λ₀ + Λ) in Λ.
pub fn taylor_shift<R: Real>(phi: &[Complex<R>], lambda0: &Complex<R>, num: &Numeric<R>) -> Vec<Complex<R>> {
    let mut out = vec![num.czero(); phi.len()];
    // Horner in polynomial arithmetic: out ← out·(Λ + λ₀) + φₖ
    for c in phi.iter().rev() {
        let mut next = vec![num.czero(); phi.len()];
        for (m, v) in out.iter().enumerate() {
            next[m] = cadd(&next[m], &cmul(v, lambda0));
            if m + 1 < next.len() {
                next[m + 1] = cadd(&next[m + 1], v);
            }
        }
        next[0] = cadd(&next[0], c);
        out = next;
    }
    out
}

/// α = 0 at a; β₁u(b) − β₂u′(b) = φ(λ)(β₁′u(b) − β₂′u′(b)).
pub fn characteristic_lambda_dependent<R: Real>(
    d: &EndData<R>,
    bc: &ResolvedBoundary<R>,
    num: &Numeric<R>,
) -> Result<CharacteristicPolynomial<R>> {
    let ResolvedBoundary::LambdaDependent { alpha, beta1, beta2, beta1p, beta2p, phi } = bc else {
        return contract("not a λ-dependent boundary condition");
    };
    if !alpha.is_zero() {
        return Err(Error::Unsupported("λ-dependent condition at b requires α = 0 at a".into()));
    }
    d.need_plain()?;
    let n = d.n();
    let phi = taylor_shift(phi, &d.lambda0, num);
    // φ₁ = β₁ − β₁′φ, φ₂ = β₂ − β₂′φ as polynomials in Λ
    let lin = |b: &Complex<R>, bp: &Complex<R>| -> Vec<Complex<R>> {
        let mut v: Vec<Complex<R>> = phi.iter().map(|c| -cmul(bp, c)).collect();
        v[0] = cadd(&v[0], b);
        v
    };
    let phi1 = lin(beta1, beta1p);
    let phi2 = lin(beta2, beta2p);
    let u0b = &d.u0[1];
    let inv = cdiv(&num.cone(), &cmul(u0b, &d.p[1]));
    let value: Vec<Complex<R>> = phi1.iter().zip(&phi2).map(|(a, b)| cadd(&cmul(u0b, a), &-cmul(&d.du0[1], b))).collect();
    let flux: Vec<Complex<R>> = phi2.iter().map(|b| -cmul(&inv, b)).collect();
    let s1: Vec<Complex<R>> = (0..=n).map(|k| d.plain[2 * k + 1].clone()).collect();
    let s0: Vec<Complex<R>> = (0..=n).map(|k| d.plain[2 * k].clone()).collect();
    let a = poly_mul(&value, &s1, num);
    let b = poly_mul(&flux, &s0, num);
    let coeffs = a.iter().zip(&b).map(|(x, y)| cadd(x, y)).collect();
    Ok(finish(coeffs, d, None, Shape::Second))
}

/// Δₖ = X̃⁽²ᵏ⁾(π) − X̃⁽²ᵏ⁾(−π).
pub fn characteristic_periodic_singular<R: Real>(sp: &SingularPowers<R>, num: &Numeric<R>) -> CharacteristicPolynomial<R> {
    let coeffs: Vec<Complex<R>> = sp.right.iter().zip(&sp.left).map(|(r, l)| r - l).collect();
    let trust_radius = trust_radius(&coeffs);
    CharacteristicPolynomial { coeffs, lambda0: num.czero(), trust_radius, gamma: None, shape: Shape::Singular }
}

/// The polynomial for a regular boundary condition.
pub fn characteristic<R: Real>(d: &EndData<R>, bc: &ResolvedBoundary<R>, num: &mut Numeric<R>) -> Result<CharacteristicPolynomial<R>> {
    match bc {
        ResolvedBoundary::Dirichlet => characteristic_dirichlet(d),
        ResolvedBoundary::Robin { alpha, beta } => characteristic_robin(d, alpha, beta, num),
        ResolvedBoundary::RegularAtLeft { beta } => characteristic_regular_at_left(d, beta, num),
        ResolvedBoundary::LambdaDependent { .. } => characteristic_lambda_dependent(d, bc, num),
        ResolvedBoundary::PeriodicSingular => contract("periodic-singular problems use the singular powers"),
    }
}
