//! Problems with known spectra, used as regression fixtures.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{contract, Result};
use crate::expr::{parse_expression, Expression};
use crate::problem::{AnalyticParticular, BoundaryCondition, SingularPoints, SturmLiouvilleProblem, WeightDescriptor};

#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub n: usize,
    /// Decimal text, kept verbatim.
    pub lambda: String,
    pub source: String,
    pub tol: f64,
    pub delta1: Option<String>,
    pub delta2: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Recommended {
    pub grid: usize,
    pub powers: usize,
    pub digits: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub problem: SturmLiouvilleProblem,
    pub references: Vec<Reference>,
    pub recommended: Recommended,
    /// Index of the lowest eigenvalue.
    pub first_index: usize,
}

impl CatalogEntry {
    /// The tightest reference for index n.
    pub fn reference(&self, n: usize) -> Option<&Reference> {
        self.references.iter().filter(|r| r.n == n).min_by(|a, b| a.tol.total_cmp(&b.tol))
    }
}

fn e(s: &str) -> Expression {
    parse_expression(s).expect("catalog expression")
}

fn refs(source: &str, tol: f64, rows: &[(usize, &str)]) -> Vec<Reference> {
    rows.iter().map(|&(n, v)| Reference { n, lambda: v.into(), source: source.into(), tol, delta1: None, delta2: None }).collect()
}

/// −u″ + u/(x + 0.1)² = λu, u(0) = u(π) = 0.
pub fn paine() -> CatalogEntry {
    let problem = SturmLiouvilleProblem::new("paine", e("0"), e("pi"), e("-1"), e("1/(x+0.1)^2"), BoundaryCondition::Dirichlet);
    let mut references = refs(
        "single polynomial, N = 100",
        1e-8,
        &[
            (0, "1.519865821099"),
            (1, "4.943309822144"),
            (2, "10.28466264509"),
            (3, "17.55995774633"),
            (4, "26.78286315899"),
            (5, "37.96442587941"),
            (6, "51.11335707578"),
        ],
    );
    // the larger roots of the unshifted polynomial are poor
    references.extend(refs(
        "single polynomial, N = 100",
        1e-2,
        &[(7, "66.23646092491"), (8, "83.33879073183"), (9, "102.4259718823"), (10, "123.512483827")],
    ));
    references.extend(refs(
        "shifted to 66, N = 100",
        1e-6,
        &[(7, "66.23644770359"), (8, "83.33896237419"), (9, "102.42498839828"), (10, "123.49770680101"), (11, "146.55960605783")],
    ));
    references.extend(refs("shifted to 66, N = 100", 1e-2, &[(12, "171.61265439928")]));
    // these differ from independent results (146.55960608, 171.61264485,
    // 198.658375) from the sixth significant digit on
    references.extend(refs(
        "shifted to 146, N = 150",
        1e-2,
        &[(11, "146.55586199495330"), (12, "171.60875781110985"), (13, "198.65416389844202")],
    ));
    CatalogEntry { problem, references, recommended: Recommended { grid: 10000, powers: 100, digits: 100 }, first_index: 0 }
}

/// −u″ + (−2β cos 2x + β² sin² 2x)u = λu on [−π/2, π/2], Dirichlet.
pub fn coffey_evans(beta: f64) -> Result<CatalogEntry> {
    if !(beta > 0.0 && beta.is_finite()) {
        return contract("β must be positive");
    }
    let b = format!("{beta}");
    let q = format!("-2*{b}*cos(2*x)+{b}^2*sin(2*x)^2");
    let problem = SturmLiouvilleProblem {
        name: format!("coffey-evans-{b}"),
        ..SturmLiouvilleProblem::new("", e("-pi/2"), e("pi/2"), e("-1"), e(&q), BoundaryCondition::Dirichlet)
    };
    let src = "N = 180";
    let (references, powers) = match b.as_str() {
        "20" => (
            refs(
                src,
                1e-8,
                &[
                    (0, "0.0000000000000003"),
                    (1, "77.9161956771439703"),
                    (2, "151.4627783464566396"),
                    (3, "151.4632236576586490"),
                    (4, "151.4636689883516575"),
                    (5, "220.1542298352599497"),
                    (6, "283.0948146954014377"),
                    (7, "283.2507437431126800"),
                    (8, "283.4087354034293064"),
                ],
            ),
            180,
        ),
        "30" => (
            refs(
                "N = 150",
                1e-8,
                &[
                    (0, "0.000000000000000002"),
                    (1, "117.94630766206876"),
                    (2, "231.664928928423790"),
                    (3, "231.664928928423791"),
                    (4, "231.664930082035462"),
                    (5, "340.888299091685489"),
                    (6, "403.219684016171863"),
                    (7, "403.219684016171917"),
                ],
            ),
            150,
        ),
        "50" => {
            let mut r = refs("N = 150", 1e-8, &[(0, "0.000000000000000003"), (1, "197.96872651650729")]);
            r.extend(refs("N = 150, low resolution", 1e-2, &[(2, "391.807"), (3, "391.810"), (4, "547.1397060")]));
            (r, 150)
        }
        _ => (Vec::new(), 150),
    };
    Ok(CatalogEntry { problem, references, recommended: Recommended { grid: 10000, powers, digits: 100 }, first_index: 0 })
}

/// (x u′)′ − u/x = −λ x u on [0, 1] with only the solution regular at 0
/// admissible and u(1) = 0: eigenvalues are squared zeros of J₁.
pub fn bessel() -> CatalogEntry {
    let mut problem =
        SturmLiouvilleProblem::new("bessel", e("0"), e("1"), e("x"), e("-1/x"), BoundaryCondition::RegularAtLeft { beta: e("0") });
    problem.r = e("-x");
    problem.particular = Some(AnalyticParticular { u0: e("x/2"), du0: e("1/2") });
    let references =
        refs("squared zeros of J1", 1e-6, &[(1, "14.681970642123893257"), (2, "49.21845632169460367"), (3, "103.49945389513658033")]);
    CatalogEntry { problem, references, recommended: Recommended { grid: 2000, powers: 40, digits: 34 }, first_index: 1 }
}

/// −iε(sin x·u′)′ = λu on [−π, π], written with the integrating factor
/// w = |tan(x/2)|^{1/ε} as (p u′)′ = λ w u, p = −iε sin x·w, and solved for
/// the solution regular at 0 with u(−π) = u(π).
pub fn benilov(epsilon: f64) -> Result<CatalogEntry> {
    if !(epsilon > 0.0 && epsilon < 2.0) {
        return contract("ε must lie in (0, 2)");
    }
    let eps = format!("{epsilon}");
    let w = format!("abs(tan(x/2))^(1/{eps})");
    let mut problem = SturmLiouvilleProblem::new(
        &format!("benilov-{eps}"),
        e("-pi"),
        e("pi"),
        e(&format!("-i*{eps}*sin(x)*{w}")),
        e("0"),
        BoundaryCondition::PeriodicSingular,
    );
    problem.r = e(&w);
    problem.weight =
        Some(WeightDescriptor { exponent: e(&format!("1/{eps}")), singular: SingularPoints { a: true, origin: true, b: true } });
    problem.particular = Some(AnalyticParticular { u0: e("1"), du0: e("0") });
    let (references, recommended) = match eps.as_str() {
        "0.5" => (
            refs(
                "midpoint rule",
                5e-3,
                &[
                    (1, "1.16723"),
                    (2, "2.96844"),
                    (3, "5.48268"),
                    (4, "8.71354"),
                    (5, "12.6618"),
                    (6, "17.3275"),
                    (7, "22.7110"),
                    (8, "28.8122"),
                    (9, "35.6311"),
                    (10, "43.1677"),
                ],
            ),
            Recommended { grid: 2000, powers: 60, digits: 34 },
        ),
        "0.1" => (
            refs(
                "midpoint rule",
                5e-4,
                &[
                    (1, "1.00968"),
                    (2, "2.07334"),
                    (3, "3.22978"),
                    (4, "4.50134"),
                    (5, "5.89993"),
                    (6, "7.43194"),
                    (7, "9.10097"),
                    (8, "10.9092"),
                    (9, "12.8578"),
                    (10, "14.9478"),
                    (15, "27.5331"),
                    (20, "43.6923"),
                ],
            ),
            Recommended { grid: 2000, powers: 60, digits: 34 },
        ),
        "0.01" => {
            let rows = [
                (1, "1.0001", "1.0e-14", "3.8e-16"),
                (2, "2.0008", "1.5e-13", "1.7e-14"),
                (3, "3.00269", "3.0e-12", "7.3e-14"),
                (4, "4.00638", "4.9e-11", "2.9e-12"),
                (5, "5.01243", "6.8e-10", "1.3e-11"),
                (6, "6.02143", "8.8e-9", "6.5e-9"),
                (7, "7.03393", "3.2e-7", "6.7e-8"),
                (8, "8.05048", "6.2e-6", "3.4e-7"),
                (9, "9.07162", "0.000090", "4.0e-6"),
                (10, "10.098", "0.014", "0.00027"),
                (11, "11.0223", "10.8", "0.0011"),
            ];
            let r = rows
                .iter()
                .map(|&(n, l, d1, d2)| Reference {
                    n,
                    lambda: l.into(),
                    source: "midpoint rule, with diagnostics".into(),
                    tol: if n <= 9 { 1e-3 } else { 1e-2 },
                    delta1: Some(d1.into()),
                    delta2: Some(d2.into()),
                })
                .collect();
            (r, Recommended { grid: 4000, powers: 90, digits: 34 })
        }
        _ => (Vec::new(), Recommended { grid: 2000, powers: 60, digits: 34 }),
    };
    Ok(CatalogEntry { problem, references, recommended, first_index: 1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantKind {
    Dirichlet,
    DirichletNeumann,
    NeumannDirichlet,
    NeumannNeumann,
}

impl ConstantKind {
    pub const ALL: [ConstantKind; 4] =
        [ConstantKind::Dirichlet, ConstantKind::DirichletNeumann, ConstantKind::NeumannDirichlet, ConstantKind::NeumannNeumann];

    pub fn name(self) -> &'static str {
        match self {
            ConstantKind::Dirichlet => "constant-dirichlet",
            ConstantKind::DirichletNeumann => "constant-dirichlet-neumann",
            ConstantKind::NeumannDirichlet => "constant-neumann-dirichlet",
            ConstantKind::NeumannNeumann => "constant-neumann-neumann",
        }
    }
}

/// −u″ = λu on [0, π] with closed-form spectra.
pub fn constant_coefficient(kind: ConstantKind) -> CatalogEntry {
    let (alpha, beta) = match kind {
        ConstantKind::Dirichlet => ("0", "0"),
        ConstantKind::DirichletNeumann => ("0", "pi/2"),
        ConstantKind::NeumannDirichlet => ("pi/2", "0"),
        ConstantKind::NeumannNeumann => ("pi/2", "pi/2"),
    };
    let boundary = if kind == ConstantKind::Dirichlet {
        BoundaryCondition::Dirichlet
    } else {
        BoundaryCondition::Robin { alpha: e(alpha), beta: e(beta) }
    };
    let problem = SturmLiouvilleProblem::new(kind.name(), e("0"), e("pi"), e("-1"), e("0"), boundary);
    let (first, half) = match kind {
        ConstantKind::Dirichlet => (1, false),
        ConstantKind::NeumannNeumann => (0, false),
        _ => (0, true),
    };
    let references = (first..first + 8)
        .map(|n| {
            let lambda = if half { format!("{}", (n as f64 + 0.5) * (n as f64 + 0.5)) } else { (n * n).to_string() };
            Reference { n, lambda, source: "closed form".into(), tol: 1e-10, delta1: None, delta2: None }
        })
        .collect();
    CatalogEntry { problem, references, recommended: Recommended { grid: 2000, powers: 60, digits: 34 }, first_index: first }
}

/// Every named entry.
pub fn names() -> Vec<&'static str> {
    let mut v = alloc::vec![
        "paine",
        "coffey-evans-20",
        "coffey-evans-30",
        "coffey-evans-50",
        "bessel",
        "benilov-0.5",
        "benilov-0.1",
        "benilov-0.01",
    ];
    v.extend(ConstantKind::ALL.iter().map(|k| k.name()));
    v
}

pub fn by_name(name: &str) -> Result<CatalogEntry> {
    if name == "paine" {
        return Ok(paine());
    }
    if name == "bessel" {
        return Ok(bessel());
    }
    if let Some(k) = ConstantKind::ALL.iter().find(|k| k.name() == name) {
        return Ok(constant_coefficient(*k));
    }
    let num = |s: &str| s.parse::<f64>().ok();
    if let Some(b) = name.strip_prefix("coffey-evans-").and_then(num) {
        return coffey_evans(b);
    }
    if let Some(eps) = name.strip_prefix("benilov-").and_then(num) {
        return benilov(eps);
    }
    contract(format!("unknown catalog entry '{name}'"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::{Numeric, PrecisionContext};
    use crate::problem::sample_coefficients;

    #[test]
    fn every_name_resolves() {
        for n in names() {
            let entry = by_name(n).unwrap();
            assert!(!entry.references.is_empty(), "{n}");
        }
        assert!(by_name("nope").is_err());
        assert!(benilov(2.5).is_err());
        assert!(coffey_evans(-1.0).is_err());
    }

    #[test]
    fn reference_values_parse() {
        for n in names() {
            for r in by_name(n).unwrap().references {
                assert!(r.lambda.parse::<f64>().is_ok(), "{n}: {}", r.lambda);
            }
        }
        assert_eq!(paine().reference(10).unwrap().lambda, "123.49770680101");
        assert_eq!(coffey_evans(20.0).unwrap().reference(5).unwrap().lambda, "220.1542298352599497");
        assert_eq!(benilov(0.1).unwrap().reference(15).unwrap().lambda, "27.5331");
        assert_eq!(benilov(0.01).unwrap().reference(3).unwrap().delta1.as_deref(), Some("3.0e-12"));
    }

    #[test]
    fn coffey_evans_potential() {
        let entry = coffey_evans(20.0).unwrap();
        let mut num = Numeric::<f64>::new(PrecisionContext::new(15).unwrap());
        let g = entry.problem.grid(4, &mut num).unwrap();
        let (_, q, _) = sample_coefficients(&entry.problem, &g, &mut num).unwrap();
        // q(0) = −2β
        assert!((q.at(2).re + 40.0).abs() < 1e-12);
    }

    #[test]
    fn benilov_grid_avoids_singular_points() {
        let entry = benilov(0.1).unwrap();
        let mut num = Numeric::<f64>::new(PrecisionContext::new(15).unwrap());
        let g = entry.problem.grid(8, &mut num).unwrap();
        assert_eq!(g.cells(), 7);
        let h = core::f64::consts::PI / 4.0;
        assert!((g.node(0) + core::f64::consts::PI - h / 2.0).abs() < 1e-15);
        assert!(entry.problem.grid(7, &mut num).is_err());
    }
}
