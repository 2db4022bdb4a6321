use std::path::PathBuf;

use spps::ProblemFile;
use spps_core::catalog;
use spps_core::precision::{Mp, Numeric, PrecisionContext};
use spps_core::problem::sample_coefficients;

fn load(name: &str) -> ProblemFile {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    ProblemFile::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn handwritten_paine_samples_like_the_catalog() {
    let file = load("paine.json").to_entry().unwrap();
    let built = catalog::paine();
    let mut num = Numeric::<Mp>::new(PrecisionContext::new(34).unwrap());
    let g1 = file.problem.grid(500, &mut num).unwrap();
    let g2 = built.problem.grid(500, &mut num).unwrap();
    assert_eq!(g1.nodes(), g2.nodes());
    let (p1, q1, r1) = sample_coefficients(&file.problem, &g1, &mut num).unwrap();
    let (p2, q2, r2) = sample_coefficients(&built.problem, &g2, &mut num).unwrap();
    assert_eq!(p1.values(), p2.values());
    assert_eq!(q1.values(), q2.values());
    assert_eq!(r1.values(), r2.values());
    for r in &file.references {
        let c = built.reference(r.n).unwrap();
        assert_eq!(r.lambda, c.lambda);
        assert_eq!(r.tol.to_bits(), c.tol.to_bits());
    }
}

#[test]
fn exported_json_is_stable() {
    for name in catalog::names() {
        let entry = catalog::by_name(name).unwrap();
        let once = ProblemFile::from_entry(&entry).to_json();
        let twice = ProblemFile::from_entry(&ProblemFile::from_json(&once).unwrap().to_entry().unwrap()).to_json();
        assert_eq!(once, twice, "{name}");
    }
}
