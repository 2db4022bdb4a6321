//! JSON problem files. The same document describes a user problem and a
//! catalog fixture: the catalog can be exported with `spps catalog NAME`
//! and fed back through `--problem`.

use serde::{Deserialize, Serialize};
use spps_core::catalog::{CatalogEntry, Recommended, Reference};
use spps_core::expr::{parse_expression, Expression};
use spps_core::problem::{AnalyticParticular, BoundaryCondition, SingularPoints, SturmLiouvilleProblem, WeightDescriptor};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub name: String,
    pub interval: [String; 2],
    pub p: String,
    pub q: String,
    #[serde(default = "one")]
    pub r: String,
    pub boundary: BoundaryFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub particular: Option<ParticularFile>,
    #[serde(default)]
    pub references: Vec<ReferenceFile>,
    #[serde(default)]
    pub recommended: RecommendedFile,
    #[serde(default)]
    pub first_index: usize,
}

fn one() -> String {
    "1".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BoundaryFile {
    Dirichlet,
    Robin {
        alpha: String,
        beta: String,
    },
    LambdaDependent {
        #[serde(default = "zero")]
        alpha: String,
        beta1: String,
        beta2: String,
        beta1_prime: String,
        beta2_prime: String,
        phi: Vec<String>,
    },
    PeriodicSingular,
    RegularAtLeft {
        #[serde(default = "zero")]
        beta: String,
    },
}

fn zero() -> String {
    "0".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightFile {
    pub exponent: String,
    /// Any of "a", "origin", "b".
    #[serde(default)]
    pub singular: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticularFile {
    pub u0: String,
    pub du0: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceFile {
    pub n: usize,
    pub lambda: String,
    #[serde(default)]
    pub source: String,
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta2: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecommendedFile {
    #[serde(rename = "M")]
    pub grid: usize,
    #[serde(rename = "N")]
    pub powers: usize,
    pub digits: u32,
}

impl Default for RecommendedFile {
    fn default() -> Self {
        Self { grid: 2000, powers: 60, digits: 34 }
    }
}

fn expr(field: &str, text: &str) -> Result<Expression, CliError> {
    parse_expression(text).map_err(|e| CliError::Config(format!("{field}: {e}")))
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("problem file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem file serializes")
    }

    pub fn from_entry(entry: &CatalogEntry) -> Self {
        let pr = &entry.problem;
        let s = |e: &Expression| e.to_string();
        let boundary = match &pr.boundary {
            BoundaryCondition::Dirichlet => BoundaryFile::Dirichlet,
            BoundaryCondition::Robin { alpha, beta } => BoundaryFile::Robin { alpha: s(alpha), beta: s(beta) },
            BoundaryCondition::LambdaDependent { alpha, beta1, beta2, beta1_prime, beta2_prime, phi } => BoundaryFile::LambdaDependent {
                alpha: s(alpha),
                beta1: s(beta1),
                beta2: s(beta2),
                beta1_prime: s(beta1_prime),
                beta2_prime: s(beta2_prime),
                phi: phi.iter().map(s).collect(),
            },
            BoundaryCondition::PeriodicSingular => BoundaryFile::PeriodicSingular,
            BoundaryCondition::RegularAtLeft { beta } => BoundaryFile::RegularAtLeft { beta: s(beta) },
        };
        let weight = pr.weight.as_ref().map(|w| {
            let sp = w.singular;
            let singular =
                [("a", sp.a), ("origin", sp.origin), ("b", sp.b)].iter().filter(|(_, on)| *on).map(|(k, _)| k.to_string()).collect();
            WeightFile { exponent: s(&w.exponent), singular }
        });
        let references = entry
            .references
            .iter()
            .map(|r| ReferenceFile {
                n: r.n,
                lambda: r.lambda.clone(),
                source: r.source.clone(),
                tol: r.tol,
                delta1: r.delta1.clone(),
                delta2: r.delta2.clone(),
            })
            .collect();
        let rec = entry.recommended;
        Self {
            name: pr.name.clone(),
            interval: [s(&pr.a), s(&pr.b)],
            p: s(&pr.p),
            q: s(&pr.q),
            r: s(&pr.r),
            boundary,
            weight,
            particular: pr.particular.as_ref().map(|u| ParticularFile { u0: s(&u.u0), du0: s(&u.du0) }),
            references,
            recommended: RecommendedFile { grid: rec.grid, powers: rec.powers, digits: rec.digits },
            first_index: entry.first_index,
        }
    }

    pub fn to_entry(&self) -> Result<CatalogEntry, CliError> {
        let boundary = match &self.boundary {
            BoundaryFile::Dirichlet => BoundaryCondition::Dirichlet,
            BoundaryFile::Robin { alpha, beta } => {
                BoundaryCondition::Robin { alpha: expr("boundary.alpha", alpha)?, beta: expr("boundary.beta", beta)? }
            }
            BoundaryFile::LambdaDependent { alpha, beta1, beta2, beta1_prime, beta2_prime, phi } => BoundaryCondition::LambdaDependent {
                alpha: expr("boundary.alpha", alpha)?,
                beta1: expr("boundary.beta1", beta1)?,
                beta2: expr("boundary.beta2", beta2)?,
                beta1_prime: expr("boundary.beta1_prime", beta1_prime)?,
                beta2_prime: expr("boundary.beta2_prime", beta2_prime)?,
                phi: phi.iter().map(|c| expr("boundary.phi", c)).collect::<Result<_, _>>()?,
            },
            BoundaryFile::PeriodicSingular => BoundaryCondition::PeriodicSingular,
            BoundaryFile::RegularAtLeft { beta } => BoundaryCondition::RegularAtLeft { beta: expr("boundary.beta", beta)? },
        };
        let weight = match &self.weight {
            None => None,
            Some(w) => {
                let mut singular = SingularPoints::default();
                for k in &w.singular {
                    match k.as_str() {
                        "a" => singular.a = true,
                        "origin" => singular.origin = true,
                        "b" => singular.b = true,
                        other => return Err(CliError::Config(format!("weight.singular: unknown point '{other}'"))),
                    }
                }
                Some(WeightDescriptor { exponent: expr("weight.exponent", &w.exponent)?, singular })
            }
        };
        let particular = match &self.particular {
            None => None,
            Some(u) => Some(AnalyticParticular { u0: expr("particular.u0", &u.u0)?, du0: expr("particular.du0", &u.du0)? }),
        };
        let problem = SturmLiouvilleProblem {
            name: self.name.clone(),
            a: expr("interval[0]", &self.interval[0])?,
            b: expr("interval[1]", &self.interval[1])?,
            p: expr("p", &self.p)?,
            q: expr("q", &self.q)?,
            r: expr("r", &self.r)?,
            boundary,
            weight,
            particular,
        };
        let mut references = Vec::with_capacity(self.references.len());
        for r in &self.references {
            if r.lambda.trim().parse::<f64>().is_err() {
                return Err(CliError::Config(format!("reference {}: '{}' is not a number", r.n, r.lambda)));
            }
            references.push(Reference {
                n: r.n,
                lambda: r.lambda.clone(),
                source: r.source.clone(),
                tol: r.tol,
                delta1: r.delta1.clone(),
                delta2: r.delta2.clone(),
            });
        }
        let rec = self.recommended;
        if rec.grid == 0 || rec.powers == 0 {
            return Err(CliError::Config("recommended M and N must be positive".into()));
        }
        Ok(CatalogEntry {
            problem,
            references,
            recommended: Recommended { grid: rec.grid, powers: rec.powers, digits: rec.digits },
            first_index: self.first_index,
        })
    }
}
