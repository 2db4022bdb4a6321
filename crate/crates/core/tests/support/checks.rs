//! Identities that must hold at every working precision. Each case runs on
//! the hardware path (15 digits) and at 34 digits and panics on failure.
//! Shared by the property tests and the acceptance runner.

use std::sync::Arc;

use proptest::prelude::*;
use spps_core::expr::{parse_expression, Expression};
use spps_core::grid::Grid;
use spps_core::precision::{cabs_f64, cmul, csub, Complex, Mp, Numeric, PrecisionContext, Real};
use spps_core::problem::{AnalyticParticular, BoundaryCondition, SturmLiouvilleProblem};
use spps_core::quadrature::Cumulator;
use spps_core::spectral::{eigen_iterate, ShiftMode, SpectralOptions};
use spps_core::spps::{build_formal_powers, evaluate_solutions, particular_for, solve_ivp, tail_bound, Chunking};

fn e(s: &str) -> Expression {
    parse_expression(s).unwrap()
}

fn num<R: Real>(digits: u32) -> Numeric<R> {
    Numeric::new(PrecisionContext::new(digits).unwrap())
}

fn potential_problem(c0: f64, c1: f64) -> SturmLiouvilleProblem {
    SturmLiouvilleProblem::new("linear", e("0"), e("1"), e("-1"), e(&format!("{c0}+{c1}*x")), BoundaryCondition::Dirichlet)
}

fn wronskian<R: Real>(digits: u32, c0: f64, c1: f64, lam: (f64, f64), anchor: usize) -> f64 {
    let mut n = num::<R>(digits);
    let pr = potential_problem(c0, c1);
    let g = pr.grid(200, &mut n).unwrap();
    let base = particular_for(&pr, &g, &mut n).unwrap();
    let fp = build_formal_powers(&base, 40, anchor, &n).unwrap();
    let s = evaluate_solutions(&fp, &base, &n.complex(lam.0, lam.1), &n).unwrap();
    let w: Vec<Complex<R>> = (0..=200)
        .map(|j| {
            let t = csub(&cmul(s.u1.at(j), s.du2.at(j)), &cmul(s.du1.at(j), s.u2.at(j)));
            cmul(&t, base.p.at(j))
        })
        .collect();
    let scale = w.iter().map(cabs_f64).fold(0.0, f64::max);
    w.iter().map(|v| cabs_f64(&csub(v, &w[0])) / scale).fold(0.0, f64::max)
}

fn anchored_zeros<R: Real>(digits: u32, c0: f64, anchor: usize, lam: f64) {
    let mut n = num::<R>(digits);
    let pr = potential_problem(c0, 1.0);
    let g = pr.grid(100, &mut n).unwrap();
    let base = particular_for(&pr, &g, &mut n).unwrap();
    let fp = build_formal_powers(&base, 10, anchor, &n).unwrap();
    for k in 1..fp.xt.len() {
        assert!(cabs_f64(fp.xt[k].at(anchor)) == 0.0, "X̃^{k}");
    }
    for k in 1..fp.x.len() {
        assert!(cabs_f64(fp.x[k].at(anchor)) == 0.0, "X^{k}");
    }
    let (u, du) = solve_ivp(&pr, &g, &n.complex(lam, 0.0), anchor, &n.czero(), &n.cone(), 20, Chunking::default(), &mut n).unwrap();
    assert!(cabs_f64(u.at(anchor)) < 1e-13, "u(x0) = {}", cabs_f64(u.at(anchor)));
    assert!(cabs_f64(&csub(du.at(anchor), &n.cone())) < 1e-10);
}

/// −u″ = λu with u₀ ≡ 1: the truncated series must stay within the a priori
/// tail of the converged one.
fn tail_sound<R: Real>(digits: u32, lam: (f64, f64), powers: usize) -> (f64, f64) {
    let mut n = num::<R>(digits);
    let mut pr = SturmLiouvilleProblem::new("free", e("0"), e("pi"), e("-1"), e("0"), BoundaryCondition::Dirichlet);
    pr.particular = Some(AnalyticParticular { u0: e("1"), du0: e("0") });
    let g = pr.grid(100, &mut n).unwrap();
    let base = particular_for(&pr, &g, &mut n).unwrap();
    let lambda = n.complex(lam.0, lam.1);
    let short = build_formal_powers(&base, powers, 0, &n).unwrap();
    let long = build_formal_powers(&base, 120, 0, &n).unwrap();
    let a = evaluate_solutions(&short, &base, &lambda, &n).unwrap();
    let b = evaluate_solutions(&long, &base, &lambda, &n).unwrap();
    let tb = tail_bound(&base, &lambda, powers);
    assert!(tb.available);
    let err1 = (0..=100).map(|j| cabs_f64(&csub(a.u1.at(j), b.u1.at(j)))).fold(0.0, f64::max);
    let err2 = (0..=100).map(|j| cabs_f64(&csub(a.u2.at(j), b.u2.at(j)))).fold(0.0, f64::max);
    let floor = 1e-12 * (1.0 + lam.0.abs() + lam.1.abs()).powi(2);
    assert!(err1 <= tb.bound_u1 * (1.0 + 1e-9) + floor, "u1: {err1:e} > {:e}", tb.bound_u1);
    assert!(err2 <= tb.bound_u2 * (1.0 + 1e-9) + floor, "u2: {err2:e} > {:e}", tb.bound_u2);
    (err1, tb.bound_u1)
}

fn quadrature<R: Real>(digits: u32, cells: usize, anchor: usize, coef: [f64; 4], alpha: f64, beta: f64, seed: u64) {
    let n = num::<R>(digits);
    let anchor = anchor % (cells + 1);
    let g = Arc::new(Grid::uniform(&n.real(-0.5), &n.real(1.5), cells, &n).unwrap());
    let cum = Cumulator::new(g.clone(), &n);
    let xs: Vec<f64> = g.nodes().iter().map(|x| x.to_f64()).collect();
    let poly = |x: f64| coef[0] + x * (coef[1] + x * (coef[2] + x * coef[3]));
    let prim = |x: f64| x * (coef[0] + x * (coef[1] / 2.0 + x * (coef[2] / 3.0 + x * coef[3] / 4.0)));
    let f: Vec<Complex<R>> = xs.iter().map(|&x| n.complex(poly(x), 0.0)).collect();
    let fi = cum.integrate(&f, anchor);
    for (j, &x) in xs.iter().enumerate() {
        let want = prim(x) - prim(xs[anchor]);
        assert!((fi[j].re.to_f64() - want).abs() < 1e-12 * (1.0 + want.abs()), "cubic exactness at {j}");
    }
    // linearity on arbitrary data
    let mut state = seed | 1;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let u: Vec<Complex<R>> = xs.iter().map(|_| n.complex(next(), next())).collect();
    let v: Vec<Complex<R>> = xs.iter().map(|_| n.complex(next(), next())).collect();
    let (ca, cb) = (n.complex(alpha, 0.0), n.complex(beta, 0.0));
    let mix: Vec<Complex<R>> = u.iter().zip(&v).map(|(a, b)| &cmul(&ca, a) + &cmul(&cb, b)).collect();
    let (iu, iv, im) = (cum.integrate(&u, anchor), cum.integrate(&v, anchor), cum.integrate(&mix, anchor));
    let scale = 1.0 + alpha.abs() + beta.abs();
    for j in 0..xs.len() {
        let want = &cmul(&ca, &iu[j]) + &cmul(&cb, &iv[j]);
        assert!(cabs_f64(&csub(&im[j], &want)) < 1e-13 * scale * cells as f64, "linearity at {j}");
    }
}

fn paine() -> SturmLiouvilleProblem {
    SturmLiouvilleProblem::new("paine", e("0"), e("pi"), e("-1"), e("1/(x+0.1)^2"), BoundaryCondition::Dirichlet)
}

/// λ₇, λ₈ of the Paine problem from a single shift to λ*.
fn paine_upper<R: Real>(digits: u32, star: f64) -> Vec<(f64, f64)> {
    let mut n = num::<R>(digits);
    let opts = SpectralOptions { grid: 2000, powers: 60, shift: ShiftMode::Explicit(vec![star]), ..SpectralOptions::default() };
    let pairs = eigen_iterate(&paine(), 9, &opts, &mut n).unwrap();
    pairs.iter().filter(|p| (7..=8).contains(&p.index_hint)).map(|p| (p.lambda.re.to_f64(), p.delta1)).collect()
}

pub type WronskianCase = (f64, f64, f64, f64, usize);

pub fn wronskian_inputs() -> impl Strategy<Value = WronskianCase> {
    (-3.0..3.0f64, -3.0..3.0f64, -10.0..40.0f64, -5.0..5.0f64, 0usize..=200)
}

pub fn wronskian_case((c0, c1, re, im, anchor): WronskianCase) {
    let d15 = wronskian::<f64>(15, c0, c1, (re, im), anchor);
    assert!(d15 < 1e-7, "15 digits: {d15:e}");
    let d34 = wronskian::<Mp>(34, c0, c1, (re, im), anchor);
    assert!(d34 < 1e-7, "34 digits: {d34:e}");
}

pub type AnchorCase = (f64, usize, f64);

pub fn anchor_inputs() -> impl Strategy<Value = AnchorCase> {
    (-3.0..3.0f64, 0usize..=100, -5.0..30.0f64)
}

pub fn anchor_case((c0, anchor, lam): AnchorCase) {
    anchored_zeros::<f64>(15, c0, anchor, lam);
    anchored_zeros::<Mp>(34, c0, anchor, lam);
}

pub type TailCase = (f64, f64, usize);

pub fn tail_inputs() -> impl Strategy<Value = TailCase> {
    (0.0..60.0f64, -10.0..10.0f64, 5usize..40)
}

pub fn tail_case((re, im, powers): TailCase) {
    tail_sound::<f64>(15, (re, im), powers);
    tail_sound::<Mp>(34, (re, im), powers);
}

pub type QuadratureCase = (usize, usize, [f64; 4], f64, f64, u64);

pub fn quadrature_inputs() -> impl Strategy<Value = QuadratureCase> {
    (2usize..60, 0usize..61, prop::array::uniform4(-3.0..3.0f64), -4.0..4.0f64, -4.0..4.0f64, any::<u64>())
}

pub fn quadrature_case((cells, anchor, coef, alpha, beta, seed): QuadratureCase) {
    quadrature::<f64>(15, cells, anchor, coef, alpha, beta, seed);
    quadrature::<Mp>(34, cells, anchor, coef, alpha, beta, seed);
}

pub fn shift_inputs() -> impl Strategy<Value = f64> {
    55.0..95.0f64
}

/// λ₇, λ₈ from a shift to λ* agree with those from λ* = 66 up to their own
/// error estimates, and with the reference values.
pub fn shift_case(star: f64) {
    for digits in [15u32, 34] {
        let a = if digits == 15 { paine_upper::<f64>(digits, 66.0) } else { paine_upper::<Mp>(digits, 66.0) };
        let b = if digits == 15 { paine_upper::<f64>(digits, star) } else { paine_upper::<Mp>(digits, star) };
        assert_eq!(a.len(), 2, "{digits} digits, λ* = 66");
        assert_eq!(b.len(), 2, "{digits} digits, λ* = {star}");
        for ((la, da), (lb, db)) in a.iter().zip(&b) {
            let allowed = 1e-8 * la.abs() + da + db;
            assert!((la - lb).abs() <= allowed, "{digits} digits, λ* = {star}: {la} vs {lb}");
        }
        for ((l, _), want) in a.iter().zip([66.23644770359, 83.33896237419]) {
            assert!((l - want).abs() < 1e-5, "{digits} digits: {l}");
        }
    }
}
