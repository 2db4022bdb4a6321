use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{contract, Result};
use crate::precision::{cadd, cscale, csub, Complex, Numeric, Real};

/// Strictly increasing nodes x₀ = a < … < x_M = b.
#[derive(Debug, Clone)]
pub struct Grid<R: Real> {
    nodes: Vec<R>,
    uniform: bool,
}

impl<R: Real> Grid<R> {
    /// M equal cells on [a, b].
    pub fn uniform(a: &R, b: &R, m: usize, num: &Numeric<R>) -> Result<Self> {
        if m < 2 {
            return contract("grid needs at least 2 cells");
        }
        if !(a < b) {
            return contract("grid requires a < b");
        }
        let len = b.sub_ref(a);
        let mm = num.int(m as i64);
        let mut nodes = Vec::with_capacity(m + 1);
        for j in 0..m {
            // a + j(b−a)/M keeps the error from accumulating along the grid
            nodes.push(a.add_ref(&len.mul_ref(&num.int(j as i64)).div_ref(&mm)));
        }
        nodes.push(b.clone());
        Ok(Self { nodes, uniform: true })
    }

    /// Arbitrary strictly increasing nodes; `uniform` is detected to within
    /// `epsilon` relative to the mean width.
    pub fn from_nodes(nodes: Vec<R>, num: &Numeric<R>) -> Result<Self> {
        if nodes.len() < 3 {
            return contract("grid needs at least 2 cells");
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return contract("grid nodes must be strictly increasing");
        }
        let m = nodes.len() - 1;
        let mean = nodes[m].sub_ref(&nodes[0]).div_ref(&num.int(m as i64));
        let tol = mean.mul_ref(&num.real(10.0 * num.ctx.epsilon()));
        let uniform = nodes.windows(2).all(|w| w[1].sub_ref(&w[0]).sub_ref(&mean).abs() <= tol);
        Ok(Self { nodes, uniform })
    }

    pub fn a(&self) -> &R {
        &self.nodes[0]
    }

    pub fn b(&self) -> &R {
        &self.nodes[self.nodes.len() - 1]
    }

    /// Number of cells M.
    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[R] {
        &self.nodes
    }

    pub fn node(&self, j: usize) -> &R {
        &self.nodes[j]
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// Cell width (exact for uniform grids).
    pub fn step(&self) -> R {
        let m = self.cells();
        self.b().sub_ref(self.a()).div_ref(&R::from_int(m as i64, self.a().bits()))
    }

    pub fn width(&self, cell: usize) -> R {
        self.nodes[cell + 1].sub_ref(&self.nodes[cell])
    }

    /// Index of the node closest to `x`.
    pub fn nearest(&self, x: &R) -> usize {
        let mut best = 0;
        let mut dist = self.nodes[0].sub_ref(x).abs();
        for (j, n) in self.nodes.iter().enumerate().skip(1) {
            let d = n.sub_ref(x).abs();
            if d < dist {
                dist = d;
                best = j;
            }
        }
        best
    }

    /// Nodes j..=k as a new grid.
    pub fn slice(&self, j: usize, k: usize) -> Result<Self> {
        if k <= j || k - j < 2 || k >= self.nodes.len() {
            return contract("grid slice needs at least 2 cells");
        }
        Ok(Self { nodes: self.nodes[j..=k].to_vec(), uniform: self.uniform })
    }
}

/// Complex values at the nodes of a shared grid.
#[derive(Debug, Clone)]
pub struct SampledFunction<R: Real> {
    grid: Arc<Grid<R>>,
    values: Vec<Complex<R>>,
}

impl<R: Real> SampledFunction<R> {
    pub fn new(grid: Arc<Grid<R>>, values: Vec<Complex<R>>) -> Result<Self> {
        if values.len() != grid.cells() + 1 {
            return contract(alloc::format!("sampled function has {} values for a grid of {} nodes", values.len(), grid.cells() + 1));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: Arc<Grid<R>>, v: Complex<R>) -> Self {
        let values = alloc::vec![v; grid.cells() + 1];
        Self { grid, values }
    }

    pub fn from_fn(grid: Arc<Grid<R>>, mut f: impl FnMut(usize, &R) -> Complex<R>) -> Self {
        let values = grid.nodes().iter().enumerate().map(|(j, x)| f(j, x)).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<Grid<R>> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<R>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex<R>> {
        self.values
    }

    pub fn at(&self, j: usize) -> &Complex<R> {
        &self.values[j]
    }

    pub fn last(&self) -> &Complex<R> {
        &self.values[self.values.len() - 1]
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid.nodes() == other.grid.nodes()
    }

    /// Piecewise linear interpolation; clamps outside [a, b].
    pub fn eval(&self, x: &R) -> Complex<R> {
        let nodes = self.grid.nodes();
        if x <= &nodes[0] {
            return self.values[0].clone();
        }
        let last = nodes.len() - 1;
        if x >= &nodes[last] {
            return self.values[last].clone();
        }
        let k = nodes.partition_point(|n| n <= x) - 1;
        let t = x.sub_ref(&nodes[k]).div_ref(&nodes[k + 1].sub_ref(&nodes[k]));
        let d = csub(&self.values[k + 1], &self.values[k]);
        cadd(&self.values[k], &cscale(&d, &t))
    }

    pub fn map(&self, f: impl FnMut(&Complex<R>) -> Complex<R>) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(f).collect() }
    }

    pub fn zip_with(&self, o: &Self, mut f: impl FnMut(&Complex<R>, &Complex<R>) -> Complex<R>) -> Result<Self> {
        if !self.same_grid(o) {
            return contract("sampled functions live on different grids");
        }
        let values = self.values.iter().zip(&o.values).map(|(a, b)| f(a, b)).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }
}
