//! One side of a two-sided inequality restricted to step functions on a fixed grid.
//!
//! A side is either a plain Lebesgue functional `(sum f_j^rho M_j)^(1/rho)` or an
//! iterated one `(int (int f^rho V)^(q/rho) U)^(1/q)` whose inner integral runs
//! from `a` (forward) or to `b` (backward).

use crate::quad::GaussLegendre;
use crate::scalar::{pow0, Scalar};
use crate::weights::Weight;

/// Description of a side before discretization.
#[derive(Clone, Debug)]
pub(crate) struct SideShape<T> {
    pub rho: T,
    /// `None` for a Lebesgue side.
    pub outer: Option<Outer<T>>,
    pub inner: Weight<T>,
    pub inner_exp: T,
}

#[derive(Clone, Debug)]
pub(crate) struct Outer<T> {
    pub q: T,
    pub weight: Weight<T>,
    pub exp: T,
    pub backward: bool,
}

#[derive(Clone, Debug)]
pub(crate) struct SideGrid<T> {
    rho: T,
    q: T,
    lebesgue: bool,
    /// Processing order of the cells (reversed for a backward side).
    order: Vec<usize>,
    /// Inner mass of each processed cell.
    mass: Vec<T>,
    /// Per node: inner mass from the entry edge of its cell up to the node.
    part: Vec<T>,
    /// Per node: quadrature weight times outer weight.
    omega: Vec<T>,
    nodes_per_cell: usize,
    /// Outer weight over the region where the inner integral is complete.
    tail: T,
}

impl<T: Scalar> SideGrid<T> {
    pub fn build(shape: &SideShape<T>, grid: &[T], a: T, b: T, gl: &GaussLegendre<T>) -> Self {
        let n = grid.len() - 1;
        let backward = shape.outer.as_ref().is_some_and(|o| o.backward);
        let order: Vec<usize> = if backward { (0..n).rev().collect() } else { (0..n).collect() };
        let e = shape.inner_exp;
        let mass: Vec<T> = order.iter().map(|&i| shape.inner.integral_raw(e, grid[i], grid[i + 1])).collect();
        let Some(outer) = &shape.outer else {
            return Self {
                rho: shape.rho,
                q: shape.rho,
                lebesgue: true,
                order,
                mass,
                part: Vec::new(),
                omega: Vec::new(),
                nodes_per_cell: 0,
                tail: T::zero(),
            };
        };
        let k = gl.order();
        let mut part = Vec::with_capacity(n * k);
        let mut omega = Vec::with_capacity(n * k);
        for &i in &order {
            let (lo, hi) = (grid[i], grid[i + 1]);
            for (t, wt) in gl.mapped(lo, hi) {
                let m = if backward { shape.inner.integral_raw(e, t, hi) } else { shape.inner.integral_raw(e, lo, t) };
                part.push(m);
                omega.push(wt * pow0(outer.weight.eval(t), outer.exp));
            }
        }
        let tail = if backward {
            outer.weight.integral_raw(outer.exp, a, grid[0])
        } else {
            outer.weight.integral_raw(outer.exp, grid[n], b)
        };
        Self { rho: shape.rho, q: outer.q, lebesgue: false, order, mass, part, omega, nodes_per_cell: k, tail }
    }

    pub fn cells(&self) -> usize {
        self.order.len()
    }

    /// `ln S(f)` for cell values `f` (zeros allowed).
    pub fn log_value(&self, f: &[T]) -> T {
        self.eval(f, None)
    }

    /// `ln S(f)` and `d ln S / d ln f_j`, written into `grad`.
    pub fn log_value_grad(&self, f: &[T], grad: &mut [T]) -> T {
        self.eval(f, Some(grad))
    }

    fn eval(&self, f: &[T], grad: Option<&mut [T]>) -> T {
        let n = self.cells();
        let fr: Vec<T> = self.order.iter().map(|&i| pow0(f[i], self.rho)).collect();
        if self.lebesgue {
            let phi = fr.iter().zip(&self.mass).fold(T::zero(), |acc, (&x, &m)| acc + x * m);
            if let Some(g) = grad {
                for (k, &i) in self.order.iter().enumerate() {
                    g[i] = if phi > T::zero() { fr[k] * self.mass[k] / phi } else { T::zero() };
                }
            }
            return phi.ln() / self.rho;
        }
        let s = self.q / self.rho;
        let s1 = s - T::one();
        let want_grad = grad.is_some();
        let mut d = vec![T::zero(); if want_grad { n } else { 0 }];
        let mut ed = vec![T::zero(); if want_grad { n } else { 0 }];
        let mut phi = T::zero();
        let mut acc = T::zero();
        let kpc = self.nodes_per_cell;
        for k in 0..n {
            let base = k * kpc;
            for j in 0..kpc {
                let g = acc + fr[k] * self.part[base + j];
                if g > T::zero() {
                    let w = self.omega[base + j];
                    let gs1 = g.powf(s1);
                    phi = phi + w * gs1 * g;
                    if want_grad {
                        d[k] = d[k] + w * gs1;
                        ed[k] = ed[k] + w * gs1 * self.part[base + j];
                    }
                }
            }
            acc = acc + fr[k] * self.mass[k];
        }
        let mut tail_d = T::zero();
        if acc > T::zero() && self.tail > T::zero() {
            let gs1 = acc.powf(s1);
            phi = phi + self.tail * gs1 * acc;
            tail_d = self.tail * gs1;
        }
        if let Some(g) = grad {
            let mut suffix = tail_d;
            for k in (0..n).rev() {
                let i = self.order[k];
                g[i] = if phi > T::zero() && phi.is_finite() {
                    fr[k] * (self.mass[k] * suffix + ed[k]) / phi
                } else {
                    T::zero()
                };
                suffix = suffix + d[k];
            }
        }
        phi.ln() / self.q
    }
}
