use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::expr::{parse_expression, Expression};
use crate::precision::{Mp, PrecisionContext};
use crate::problem::{AnalyticParticular, BoundaryCondition, SingularPoints, WeightDescriptor};

fn e(s: &str) -> Expression {
    parse_expression(s).unwrap()
}

fn num(d: u32) -> Numeric<f64> {
    Numeric::new(PrecisionContext::new(d).unwrap())
}

fn laplace(bc: BoundaryCondition) -> SturmLiouvilleProblem {
    SturmLiouvilleProblem::new("c", e("0"), e("pi"), e("-1"), e("0"), bc)
}

fn opts(m: usize, n: usize) -> SpectralOptions {
    SpectralOptions { grid: m, powers: n, ..SpectralOptions::default() }
}

fn values<R: Real>(p: &[Eigenpair<R>]) -> Vec<f64> {
    p.iter().map(|e| e.lambda.re.to_f64()).collect()
}

#[test]
fn sine_spectrum() {
    let mut n = num(15);
    let pairs = eigen_iterate(&laplace(BoundaryCondition::Dirichlet), 5, &opts(2000, 40), &mut n).unwrap();
    let v = values(&pairs);
    assert_eq!(v.len(), 5);
    for (k, l) in v.iter().enumerate() {
        let want = ((k + 1) * (k + 1)) as f64;
        assert!((l - want).abs() < 1e-8 * want, "{v:?}");
    }
    for p in &pairs {
        assert!(p.delta2 < 1e-6, "{}", p.delta2);
        assert!(p.lambda.im.abs() < 1e-8);
    }
}

#[test]
fn dirichlet_neumann_and_neumann_neumann() {
    let mut n = num(15);
    let half = e("pi/2");
    let dn = BoundaryCondition::Robin { alpha: e("0"), beta: half.clone() };
    let v = values(&eigen_iterate(&laplace(dn), 4, &opts(400, 40), &mut n).unwrap());
    for (k, l) in v.iter().enumerate() {
        let want = (k as f64 + 0.5).powi(2);
        assert!((l - want).abs() < 1e-8 * want, "{v:?}");
    }
    let nn = BoundaryCondition::Robin { alpha: half.clone(), beta: half };
    let v = values(&eigen_iterate(&laplace(nn), 4, &opts(400, 40), &mut n).unwrap());
    assert!(v[0].abs() < 1e-9, "{v:?}");
    for (k, l) in v.iter().enumerate().skip(1) {
        assert!((l - (k * k) as f64).abs() < 1e-8 * (k * k) as f64, "{v:?}");
    }
}

#[test]
fn robin_with_zero_angles_matches_dirichlet() {
    let mut n = num(15);
    let pr = laplace(BoundaryCondition::Dirichlet);
    let grid = pr.grid(100, &mut n).unwrap();
    let base = particular_for(&pr, &grid, &mut n).unwrap();
    let plan = PowerPlan::new(&base, 12, 0, &n).unwrap();
    let end = EndData::collect(&plan, &base).unwrap();
    let d = super::super::characteristic_dirichlet(&end).unwrap();
    let r = super::super::characteristic_robin(&end, &0.0, &0.0, &mut n).unwrap();
    for (a, b) in d.coeffs.iter().zip(&r.coeffs) {
        assert!(cabs_f64(&csub(a, b)) <= 1e-15 * cabs_f64(a));
    }
}

fn tan_problem(phi: Vec<Expression>) -> SturmLiouvilleProblem {
    let bc =
        BoundaryCondition::LambdaDependent { alpha: e("0"), beta1: e("0"), beta2: e("-1"), beta1_prime: e("1"), beta2_prime: e("0"), phi };
    SturmLiouvilleProblem::new("tan", e("0"), e("1"), e("-1"), e("0"), bc)
}

/// smallest z > 0 with tan z = 1/z, by bisection
fn tan_oracle() -> f64 {
    let (mut lo, mut hi) = (0.1f64, 1.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if libm::tan(mid) - 1.0 / mid > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo * lo
}

#[test]
fn lambda_dependent_condition() {
    let mut n = num(15);
    let want = tan_oracle();
    let pairs = eigen_iterate(&tan_problem(vec![e("0"), e("1")]), 1, &opts(400, 30), &mut n).unwrap();
    assert!((pairs[0].lambda.re - want).abs() < 1e-9, "{} vs {want}", pairs[0].lambda);
    assert!(pairs[0].delta2 < 1e-9);
}

#[test]
fn lambda_dependent_shift_of_phi() {
    let n = num(15);
    let phi = vec![n.complex(1.0, 0.0), n.complex(2.0, 0.0), n.complex(3.0, 0.0)];
    let s = super::super::taylor_shift(&phi, &n.complex(2.0, 0.0), &n);
    // 1 + 2(Λ+2) + 3(Λ+2)² = 17 + 14Λ + 3Λ²
    assert_eq!(values_c(&s), vec![17.0, 14.0, 3.0]);
}

fn values_c(v: &[Complex<f64>]) -> Vec<f64> {
    v.iter().map(|z| z.re).collect()
}

#[test]
fn lambda_dependent_rejects_left_angle() {
    let mut n = num(15);
    let mut pr = tan_problem(vec![e("0"), e("1")]);
    if let BoundaryCondition::LambdaDependent { alpha, .. } = &mut pr.boundary {
        *alpha = e("1");
    }
    assert!(matches!(eigen_iterate(&pr, 1, &opts(100, 10), &mut n), Err(Error::Unsupported(_))));
}

fn bessel() -> SturmLiouvilleProblem {
    let mut p = SturmLiouvilleProblem::new("bessel", e("0"), e("1"), e("x"), e("-1/x"), BoundaryCondition::RegularAtLeft { beta: e("0") });
    p.r = e("-x");
    p.particular = Some(AnalyticParticular { u0: e("x/2"), du0: e("1/2") });
    p
}

#[test]
fn bessel_first_zero() {
    let mut n = num(15);
    let pairs = eigen_iterate(&bessel(), 2, &opts(1000, 40), &mut n).unwrap();
    let v = values(&pairs);
    assert!((v[0] - 14.681970642123893).abs() < 1e-7, "{v:?}");
    assert!((v[1] - 49.21845632333).abs() < 1e-5, "{v:?}");
}

#[test]
fn paine_shift_round_trip() {
    let mut n = num(15);
    let pr = SturmLiouvilleProblem::new("paine", e("0"), e("pi"), e("-1"), e("1/(x+0.1)^2"), BoundaryCondition::Dirichlet);
    let pairs = eigen_iterate(&pr, 8, &opts(1000, 40), &mut n).unwrap();
    let v = values(&pairs);
    let want = [1.519865821099, 4.943309822144, 10.28466264509, 17.55995774633, 26.78286315899, 37.96442587941];
    for (a, b) in v.iter().zip(&want) {
        assert!((a - b).abs() < 1e-6 * b, "{v:?}");
    }
    assert!(pairs.iter().any(|p| p.round > 0));
}

fn benilov(eps: &str) -> SturmLiouvilleProblem {
    let mut p = SturmLiouvilleProblem::new("benilov", e("-pi"), e("pi"), e("0"), e("0"), BoundaryCondition::PeriodicSingular);
    p.weight =
        Some(WeightDescriptor { exponent: e(&alloc::format!("1/{eps}")), singular: SingularPoints { a: true, origin: true, b: true } });
    p
}

#[test]
fn benilov_half() {
    let mut n = num(15);
    let pairs = eigen_iterate(&benilov("0.5"), 4, &opts(2000, 40), &mut n).unwrap();
    let v = values(&pairs);
    let want = [1.16723, 2.96844, 5.48268, 8.71354];
    for (a, b) in v.iter().zip(&want) {
        assert!((a - b).abs() < 5e-4, "{v:?}");
    }
}

#[test]
fn multiple_precision_sine_spectrum() {
    let mut n = Numeric::<Mp>::new(PrecisionContext::new(34).unwrap());
    let pairs = eigen_iterate(&laplace(BoundaryCondition::Dirichlet), 3, &opts(200, 30), &mut n).unwrap();
    for (k, p) in pairs.iter().enumerate() {
        let want = ((k + 1) * (k + 1)) as f64;
        assert!((p.lambda.re.to_f64() - want).abs() < 1e-7 * want);
    }
}
