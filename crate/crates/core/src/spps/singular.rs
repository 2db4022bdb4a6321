//! Powers for (p u′)′ = λ w u with p = −iε·sin x·w, w = |tan(x/2)|^ν,
//! ν = 1/ε, on [−π, π] with u₀ ≡ 1 anchored at the interior singular point 0.
//!
//! Since w′/w = ν/sin x, 1/p = −i·(w⁻¹)′, and one integration by parts turns
//! the double integral into
//!
//!   X̃⁽²ᵏ⁾(x) = i·[−w(x)⁻¹∫₀ˣ w X̃⁽²ᵏ⁻²⁾ + ∫₀ˣ X̃⁽²ᵏ⁻²⁾],
//!
//! so X̃⁽²ᵏ⁾ = iᵏYₖ with Yₖ real for real data. Integrals use the midpoint
//! rule on the cells [(j−1)h, jh] whose midpoints are the grid nodes, with
//! exact weight integrals per half cell. At ±π the first term vanishes in the
//! limit, leaving X̃⁽²ᵏ⁾(±π) = i·∫₀^{±π} X̃⁽²ᵏ⁻²⁾.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{contract, Result};
use crate::grid::{Grid, SampledFunction};
use crate::precision::{Complex, Numeric, Real};
use crate::quadrature::{weighted_cell_integrals, Weight};

#[derive(Debug, Clone)]
pub struct SingularPowers<R: Real> {
    pub n: usize,
    pub grid: Arc<Grid<R>>,
    /// X̃⁽²ᵏ⁾ at the nodes, k = 0..=N
    pub even: Vec<SampledFunction<R>>,
    /// X̃⁽²ᵏ⁻¹⁾/p at the nodes, k = 1..=N (index k − 1)
    pub odd_over_p: Vec<SampledFunction<R>>,
    /// X̃⁽²ᵏ⁾(−π), k = 0..=N
    pub left: Vec<Complex<R>>,
    /// X̃⁽²ᵏ⁾(π), k = 0..=N
    pub right: Vec<Complex<R>>,
}

/// iᵏ·v for real v.
fn rotate<R: Real>(k: usize, v: &R, num: &Numeric<R>) -> Complex<R> {
    match k % 4 {
        0 => Complex::new(v.clone(), num.zero()),
        1 => Complex::new(num.zero(), v.clone()),
        2 => Complex::new(-v.clone(), num.zero()),
        _ => Complex::new(num.zero(), -v.clone()),
    }
}

/// `grid` must be the offset grid: nodes ±(j − ½)h, j = 1..K, h = π/K.
pub fn build_formal_powers_singular<R: Real>(
    w: &Weight<R>,
    grid: &Arc<Grid<R>>,
    n: usize,
    num: &mut Numeric<R>,
) -> Result<SingularPowers<R>> {
    let nodes = grid.nodes().len();
    if nodes % 2 != 0 || !grid.is_uniform() {
        return contract("singular recursion needs a uniform offset grid with an even node count");
    }
    let k_half = nodes / 2;
    let h = grid.step();
    let halfh = h.ldexp(-1);
    let tol = h.mul_ref(&num.real(1e-6));
    if grid.node(k_half).sub_ref(&halfh).abs() > tol || grid.node(k_half - 1).add_ref(&halfh).abs() > tol {
        return contract("singular recursion needs nodes at ±h/2 around the origin");
    }
    // half cells [0, h/2], [h/2, h], …, up to the last node (2K − 1)h/2
    let top = num.int(2 * k_half as i64 - 1).mul_ref(&halfh);
    let half_grid = Grid::uniform(&num.zero(), &top, 2 * k_half - 1, num)?;
    let cells = weighted_cell_integrals(w, &half_grid, num)?;
    let wm: Vec<R> = (1..=k_half).map(|j| w.at(grid.node(k_half + j - 1), num)).collect();
    // weights normalised by w at the cell midpoint, and w(m_j)/w(m_{j+1})
    let an: Vec<R> = (0..k_half).map(|j| cells[2 * j].div_ref(&wm[j])).collect();
    let bn: Vec<R> = (0..k_half - 1).map(|j| cells[2 * j + 1].div_ref(&wm[j])).collect();
    let ratio: Vec<R> = (0..k_half - 1).map(|j| wm[j].div_ref(&wm[j + 1])).collect();
    let eps_sin: Vec<R> = {
        let eps = num.one().div_ref(w.nu());
        grid.nodes().iter().map(|x| eps.mul_ref(&x.sin(&mut num.cache))).collect()
    };

    let idx = |side: isize, j: usize| if side > 0 { k_half + j - 1 } else { k_half - j };
    let mut y: Vec<R> = vec![num.one(); nodes];
    let mut even = vec![SampledFunction::constant(grid.clone(), num.cone())];
    let mut odd_over_p = Vec::with_capacity(n);
    let mut left = vec![num.cone()];
    let mut right = vec![num.cone()];
    for k in 1..=n {
        let mut next = vec![num.zero(); nodes];
        let mut z = vec![num.zero(); nodes];
        let mut ends = [num.zero(), num.zero()];
        for (si, side) in [1isize, -1].into_iter().enumerate() {
            let mut t = num.zero();
            let mut i1 = num.zero();
            for j in 1..=k_half {
                let yj = &y[idx(side, j)];
                let t_node = t.add_ref(&yj.mul_ref(&an[j - 1]));
                let i1_node = i1.add_ref(&yj.mul_ref(&halfh));
                let val = i1_node.sub_ref(&t_node);
                let (val, tz) = if side > 0 { (val, t_node.clone()) } else { (-val, -t_node.clone()) };
                next[idx(side, j)] = val;
                z[idx(side, j)] = tz;
                if j < k_half {
                    t = t_node.add_ref(&yj.mul_ref(&bn[j - 1])).mul_ref(&ratio[j - 1]);
                    i1 = i1_node.add_ref(&yj.mul_ref(&halfh));
                } else {
                    let end = i1_node.add_ref(&yj.mul_ref(&halfh));
                    ends[si] = if side > 0 { end } else { -end };
                }
            }
        }
        let [plus, minus] = ends;
        right.push(rotate(k, &plus, num));
        left.push(rotate(k, &minus, num));
        even.push(SampledFunction::new(grid.clone(), next.iter().map(|v| rotate(k, v, num)).collect())?);
        // X̃⁽²ᵏ⁻¹⁾/p = iᵏ·(∫₀ˣ w Yₖ₋₁ / w)/(ε sin x)
        let dz: Vec<Complex<R>> = z.iter().zip(&eps_sin).map(|(zv, es)| rotate(k, &zv.div_ref(es), num)).collect();
        odd_over_p.push(SampledFunction::new(grid.clone(), dz)?);
        y = next;
    }
    Ok(SingularPowers { n, grid: grid.clone(), even, odd_over_p, left, right })
}

impl<R: Real> SingularPowers<R> {
    /// u = Σ λᵏX̃⁽²ᵏ⁾ and u′ = Σ λᵏX̃⁽²ᵏ⁻¹⁾/p at the nodes.
    pub fn solution(&self, lambda: &Complex<R>, num: &Numeric<R>) -> Result<(SampledFunction<R>, SampledFunction<R>)> {
        use crate::precision::{cmul, cmul_add};
        let len = self.grid.cells() + 1;
        let mut u = vec![num.czero(); len];
        let mut du = vec![num.czero(); len];
        let mut pw = num.cone();
        for k in 0..=self.n {
            for (a, b) in u.iter_mut().zip(self.even[k].values()) {
                *a = cmul_add(&pw, b, a);
            }
            if k >= 1 {
                for (a, b) in du.iter_mut().zip(self.odd_over_p[k - 1].values()) {
                    *a = cmul_add(&pw, b, a);
                }
            }
            pw = cmul(&pw, lambda);
        }
        Ok((SampledFunction::new(self.grid.clone(), u)?, SampledFunction::new(self.grid.clone(), du)?))
    }

    /// (u(−π), u(π)) from the endpoint limits.
    pub fn endpoint_values(&self, lambda: &Complex<R>, num: &Numeric<R>) -> (Complex<R>, Complex<R>) {
        use crate::precision::{cmul, cmul_add};
        let mut pw = num.cone();
        let (mut l, mut r) = (num.czero(), num.czero());
        for k in 0..=self.n {
            l = cmul_add(&pw, &self.left[k], &l);
            r = cmul_add(&pw, &self.right[k], &r);
            pw = cmul(&pw, lambda);
        }
        (l, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::{cabs_f64, PrecisionContext};

    fn setup(nu: f64, m: usize, n: usize) -> SingularPowers<f64> {
        let mut num = Numeric::new(PrecisionContext::new(15).unwrap());
        let pi = core::f64::consts::PI;
        let h = 2.0 * pi / m as f64;
        let grid = Arc::new(Grid::uniform(&(-pi + h / 2.0), &(pi - h / 2.0), m - 1, &num).unwrap());
        let w = Weight::new(nu, &num).unwrap();
        build_formal_powers_singular(&w, &grid, n, &mut num).unwrap()
    }

    #[test]
    fn first_power_for_unit_exponent() {
        // w = |tan(x/2)|: ∫₀ˣ w = −2 ln cos(x/2) on x > 0, and Y₀ ≡ 1 makes
        // the midpoint rule with exact weights exact
        let sp = setup(1.0, 64, 2);
        for (j, x) in sp.grid.nodes().iter().enumerate() {
            let ax = x.abs();
            let y = ax + 2.0 * libm::log(libm::cos(ax / 2.0)) / libm::tan(ax / 2.0);
            let want = if *x > 0.0 { y } else { -y };
            let got = sp.even[1].at(j);
            assert!(got.re.abs() < 1e-15 && (got.im - want).abs() < 1e-13, "{x}: {got} vs {want}");
        }
        let pi = core::f64::consts::PI;
        assert!((sp.right[1].im - pi).abs() < 1e-13 && (sp.left[1].im + pi).abs() < 1e-13);
        assert!(cabs_f64(&sp.even[1].values()[32]) < 0.05);
    }

    #[test]
    fn powers_alternate_between_real_and_imaginary() {
        let sp = setup(10.0, 200, 4);
        for k in 0..=4 {
            for v in sp.even[k].values() {
                let (main, other) = if k % 2 == 0 { (v.re, v.im) } else { (v.im, v.re) };
                assert!(other == 0.0 && main.is_finite());
            }
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let sp = setup(2.0, 4000, 20);
        let num = Numeric::<f64>::new(PrecisionContext::new(15).unwrap());
        let lambda = Complex::new(1.5, 0.0);
        let (u, du) = sp.solution(&lambda, &num).unwrap();
        let h = sp.grid.step();
        for j in [500, 1500, 2600, 3400] {
            let fd = (u.at(j + 1) - u.at(j - 1)) / (2.0 * h);
            assert!(cabs_f64(&(fd - du.at(j))) < 1e-4 * (1.0 + cabs_f64(du.at(j))), "node {j}");
        }
    }

    #[test]
    fn rejects_grids_through_the_origin() {
        let mut num = Numeric::new(PrecisionContext::new(15).unwrap());
        let grid = Arc::new(Grid::uniform(&-1.0, &1.0, 10, &num).unwrap());
        let w = Weight::new(3.0, &num).unwrap();
        assert!(build_formal_powers_singular(&w, &grid, 3, &mut num).is_err());
    }
}
