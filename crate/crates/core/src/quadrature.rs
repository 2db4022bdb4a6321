//! Cumulative integration on grids and per-cell integrals of the singular
//! weight |tan(s/2)|^ν.
//!
//! Uniform grids use composite Simpson from the anchor; nodes an odd number
//! of cells away from the anchor get one extra cell integrated with the
//! cubic-exact four-point rule, so every node carries a fourth-order value.
//! Nonuniform grids fall back to the trapezoid rule.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{contract, Error, Result};
use crate::grid::{Grid, SampledFunction};
use crate::precision::{cadd, cscale, csub, Complex, Numeric, Real};

/// Precomputed stencil constants for repeated integrations on one grid.
#[derive(Debug, Clone)]
pub struct Cumulator<R: Real> {
    grid: Arc<Grid<R>>,
    h3: R,
    h12: R,
    h24: R,
    half_widths: Vec<R>,
    k: [R; 6],
}

impl<R: Real> Cumulator<R> {
    pub fn new(grid: Arc<Grid<R>>, num: &Numeric<R>) -> Self {
        let h = grid.step();
        let h3 = h.div_ref(&num.int(3));
        let h12 = h.div_ref(&num.int(12));
        let h24 = h.div_ref(&num.int(24));
        let half_widths = if grid.is_uniform() { Vec::new() } else { (0..grid.cells()).map(|c| grid.width(c).ldexp(-1)).collect() };
        let k = [num.int(4), num.int(5), num.int(8), num.int(9), num.int(13), num.int(19)];
        Self { grid, h3, h12, h24, half_widths, k }
    }

    pub fn grid(&self) -> &Arc<Grid<R>> {
        &self.grid
    }

    /// ∫ over the cell [x_c, x_{c+1}] of the interpolant through nearby nodes.
    fn cell(&self, f: &[Complex<R>], c: usize) -> Complex<R> {
        let m = self.grid.cells();
        let [k4, k5, k8, k9, k13, k19] = &self.k;
        let _ = k4;
        if m == 2 {
            // quadratic through all three nodes
            let (a, b, d) = if c == 0 { (&f[0], &f[1], &f[2]) } else { (&f[2], &f[1], &f[0]) };
            let s = csub(&cadd(&cscale(a, k5), &cscale(b, k8)), d);
            return cscale(&s, &self.h12);
        }
        let s = if c >= 1 && c + 2 <= m {
            let inner = cscale(&cadd(&f[c], &f[c + 1]), k13);
            csub(&csub(&inner, &f[c - 1]), &f[c + 2])
        } else if c == 0 {
            let t = cadd(&cscale(&f[0], k9), &cscale(&f[1], k19));
            cadd(&csub(&t, &cscale(&f[2], k5)), &f[3])
        } else {
            let t = cadd(&cscale(&f[c + 1], k9), &cscale(&f[c], k19));
            cadd(&csub(&t, &cscale(&f[c - 1], k5)), &f[c - 2])
        };
        cscale(&s, &self.h24)
    }

    fn pair(&self, f: &[Complex<R>], j: usize) -> Complex<R> {
        let s = cadd(&cadd(&f[j], &f[j + 2]), &cscale(&f[j + 1], &self.k[0]));
        cscale(&s, &self.h3)
    }

    /// F(x_j) ≈ ∫_{x_anchor}^{x_j} f, with F(x_anchor) = 0 exactly.
    pub fn integrate(&self, f: &[Complex<R>], anchor: usize) -> Vec<Complex<R>> {
        let n = f.len();
        let zero = Complex::new(R::from_int(0, 64), R::from_int(0, 64));
        let mut out = vec![zero.clone(); n];
        if !self.grid.is_uniform() {
            for j in anchor + 1..n {
                let t = cscale(&cadd(&f[j - 1], &f[j]), &self.half_widths[j - 1]);
                out[j] = cadd(&out[j - 1], &t);
            }
            for j in (0..anchor).rev() {
                let t = cscale(&cadd(&f[j], &f[j + 1]), &self.half_widths[j]);
                out[j] = csub(&out[j + 1], &t);
            }
            return out;
        }
        let mut j = anchor;
        while j + 2 < n {
            out[j + 2] = cadd(&out[j], &self.pair(f, j));
            j += 2;
        }
        let mut j = anchor + 1;
        while j < n {
            out[j] = cadd(&out[j - 1], &self.cell(f, j - 1));
            j += 2;
        }
        let mut j = anchor;
        while j >= 2 {
            out[j - 2] = csub(&out[j], &self.pair(f, j - 2));
            j -= 2;
        }
        if anchor >= 1 {
            let mut j = anchor - 1;
            loop {
                out[j] = csub(&out[j + 1], &self.cell(f, j));
                if j < 2 {
                    break;
                }
                j -= 2;
            }
        }
        out
    }
}

/// Signed cumulative integral of `f` from the anchor node.
pub fn cumulative_integral<R: Real>(f: &SampledFunction<R>, anchor: usize, num: &Numeric<R>) -> Result<SampledFunction<R>> {
    if anchor > f.grid().cells() {
        return contract(alloc::format!("anchor {anchor} outside grid of {} cells", f.grid().cells()));
    }
    let c = Cumulator::new(f.grid().clone(), num);
    SampledFunction::new(f.grid().clone(), c.integrate(f.values(), anchor))
}

/// The weight w(s) = |tan(s/2)|^ν with ν > 0.
#[derive(Debug, Clone)]
pub struct Weight<R: Real> {
    nu: R,
    int_nu: Option<i32>,
}

impl<R: Real> Weight<R> {
    pub fn new(nu: R, num: &Numeric<R>) -> Result<Self> {
        if !(nu > num.zero()) || !nu.is_finite() {
            return contract("weight exponent must be positive");
        }
        let nf = nu.to_f64();
        let rounded = libm::round(nf);
        let int_nu = if rounded.abs() < 1e6 && nu.sub_ref(&num.real(rounded)).abs() <= nu.mul_ref(&num.real(100.0 * num.ctx.epsilon())) {
            Some(rounded as i32)
        } else {
            None
        };
        Ok(Self { nu, int_nu })
    }

    pub fn nu(&self) -> &R {
        &self.nu
    }

    /// |t|^ν
    pub fn tpow(&self, t: &R, num: &mut Numeric<R>) -> R {
        let a = t.abs();
        if a.is_zero() {
            return a;
        }
        match self.int_nu {
            Some(k) => a.powi(k),
            None => self.nu.mul_ref(&a.ln(&mut num.cache)).exp(&mut num.cache),
        }
    }

    /// w(s) evaluated directly.
    pub fn at(&self, s: &R, num: &mut Numeric<R>) -> R {
        let t = half_tan(s, num);
        self.tpow(&t, num)
    }
}

/// tan(s/2); non-finite when cos(s/2) vanishes to working precision.
pub(crate) fn half_tan<R: Real>(s: &R, num: &mut Numeric<R>) -> R {
    let h = s.ldexp(-1);
    let c = h.cos(&mut num.cache);
    if c.abs() <= num.real(16.0 * num.ctx.epsilon()) {
        return num.one().div_ref(&num.zero());
    }
    h.sin(&mut num.cache).div_ref(&c)
}

/// Gauss–Legendre nodes and weights on [−1, 1] at working precision.
fn gauss_legendre<R: Real>(n: usize, num: &mut Numeric<R>) -> (Vec<R>, Vec<R>) {
    let one = num.one();
    let two = num.int(2);
    let tol = num.real(num.ctx.epsilon() * 0.1);
    let mut xs = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for i in 1..=n {
        let guess = libm::cos(core::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5));
        let mut x = num.real(guess);
        let mut dp = one.clone();
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by the three-term recurrence
            let mut p0 = one.clone();
            let mut p1 = x.clone();
            for k in 2..=n {
                let kk = num.int(k as i64);
                let a = num.int(2 * k as i64 - 1).mul_ref(&x).mul_ref(&p1);
                let b = num.int(k as i64 - 1).mul_ref(&p0);
                let p2 = a.sub_ref(&b).div_ref(&kk);
                p0 = p1;
                p1 = p2;
            }
            let nn = num.int(n as i64);
            dp = nn.mul_ref(&x.mul_ref(&p1).sub_ref(&p0)).div_ref(&x.mul_ref(&x).sub_ref(&one));
            let dx = p1.div_ref(&dp);
            x = x.sub_ref(&dx);
            if dx.abs() <= tol {
                break;
            }
        }
        let w = two.div_ref(&one.sub_ref(&x.mul_ref(&x)).mul_ref(&dp).mul_ref(&dp));
        xs.push(x);
        ws.push(w);
    }
    (xs, ws)
}

struct WeightRule<R: Real> {
    xs: Vec<R>,
    ws: Vec<R>,
    tol: R,
}

impl<R: Real> WeightRule<R> {
    fn new(num: &mut Numeric<R>) -> Self {
        let n = (num.ctx.digits() as usize / 2).clamp(8, 64);
        let (xs, ws) = gauss_legendre(n, num);
        Self { xs, ws, tol: num.real(num.ctx.epsilon()) }
    }

    /// ∫_{t0}^{t1} |t|^ν · 2/(1+t²) dt
    fn fixed(&self, w: &Weight<R>, t0: &R, t1: &R, num: &mut Numeric<R>) -> R {
        let half = t1.sub_ref(t0).ldexp(-1);
        let mid = t1.add_ref(t0).ldexp(-1);
        let one = num.one();
        let mut acc = num.zero();
        for (x, wt) in self.xs.iter().zip(&self.ws) {
            let t = mid.add_ref(&half.mul_ref(x));
            let g = w.tpow(&t, num).ldexp(1).div_ref(&one.add_ref(&t.mul_ref(&t)));
            acc = acc.add_ref(&wt.mul_ref(&g));
        }
        acc.mul_ref(&half)
    }

    fn adaptive(&self, w: &Weight<R>, t0: &R, t1: &R, whole: R, depth: u32, num: &mut Numeric<R>) -> R {
        let mid = t0.add_ref(t1).ldexp(-1);
        let left = self.fixed(w, t0, &mid, num);
        let right = self.fixed(w, &mid, t1, num);
        let sum = left.add_ref(&right);
        if depth >= 40 || sum.sub_ref(&whole).abs() <= self.tol.mul_ref(&sum.abs()) {
            return sum;
        }
        self.adaptive(w, t0, &mid, left, depth + 1, num).add_ref(&self.adaptive(w, &mid, t1, right, depth + 1, num))
    }
}

/// W_j ≈ ∫ over cell j of |tan(s/2)|^ν ds, integrated in t = tan(s/2).
pub fn weighted_cell_integrals<R: Real>(w: &Weight<R>, grid: &Grid<R>, num: &mut Numeric<R>) -> Result<Vec<R>> {
    let rule = WeightRule::new(num);
    let ts: Vec<R> = grid.nodes().iter().map(|s| half_tan(s, num)).collect();
    let zero = num.zero();
    let mut out = Vec::with_capacity(grid.cells());
    for c in 0..grid.cells() {
        let (t0, t1) = (&ts[c], &ts[c + 1]);
        if !t0.is_finite() || !t1.is_finite() {
            return Err(Error::SingularCell { cell: c });
        }
        let v = if *t0 < zero && *t1 > zero {
            // |t|^ν has a kink at the origin
            let a = rule.fixed(w, t0, &zero, num);
            let b = rule.fixed(w, &zero, t1, num);
            rule.adaptive(w, t0, &zero, a, 0, num).add_ref(&rule.adaptive(w, &zero, t1, b, 0, num))
        } else {
            let whole = rule.fixed(w, t0, t1, num);
            rule.adaptive(w, t0, t1, whole, 0, num)
        };
        if !v.is_finite() {
            return Err(Error::SingularCell { cell: c });
        }
        out.push(v);
    }
    Ok(out)
}
