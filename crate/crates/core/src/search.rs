//! Global supremum search: dense graded sampling followed by golden-section
//! refinement around the best samples.

use crate::scalar::{lit, Scalar};

#[derive(Clone, Copy, Debug)]
pub struct SupSearch<T> {
    /// Number of mesh cells sampled (interior points only).
    pub samples: usize,
    /// Golden-section iterations per refined bracket.
    pub refine_iters: usize,
    /// Relative bracket width at which refinement stops.
    pub tol: T,
    /// How many of the top samples get a refinement pass.
    pub top: usize,
}

impl<T: Scalar> SupSearch<T> {
    pub fn new(samples: usize, refine_iters: usize, tol: T) -> Self {
        Self { samples, refine_iters, tol, top: 3 }
    }

    /// Supremum of `f` over the open range spanned by `mesh` (interior mesh
    /// points are sampled). Returns `+inf` as soon as any sample is `+inf`.
    pub fn run_on_mesh<F: FnMut(T) -> T>(&self, mesh: &[T], mut f: F) -> T {
        let n = mesh.len();
        if n < 3 {
            if n == 2 {
                return clean(f(mesh[0] + (mesh[1] - mesh[0]) / lit(2.0)));
            }
            return T::zero();
        }
        let mut vals = Vec::with_capacity(n);
        vals.push(T::neg_infinity());
        for &x in &mesh[1..n - 1] {
            let v = clean(f(x));
            if v == T::infinity() {
                return T::infinity();
            }
            vals.push(v);
        }
        vals.push(T::neg_infinity());
        let mut order: Vec<usize> = (1..n - 1).collect();
        order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap_or(std::cmp::Ordering::Equal));
        let mut best = vals[order[0]];
        for &i in order.iter().take(self.top) {
            let v = self.golden(mesh[i - 1], mesh[i + 1], vals[i], &mut f);
            if v == T::infinity() {
                return v;
            }
            if v > best {
                best = v;
            }
        }
        best
    }

    /// Golden-section maximisation on `[l, r]` seeded with a known sample.
    fn golden<F: FnMut(T) -> T>(&self, l: T, r: T, f0: T, f: &mut F) -> T {
        let invphi: T = lit(0.618_033_988_749_894_9);
        let mut best = f0;
        let (mut a, mut b) = (l, r);
        let width0 = b - a;
        let scale = a.abs().max(b.abs());
        let mut c = b - invphi * (b - a);
        let mut d = a + invphi * (b - a);
        let mut fc = clean(f(c));
        let mut fd = clean(f(d));
        for _ in 0..self.refine_iters {
            best = best.max(fc).max(fd);
            if fc == T::infinity() || fd == T::infinity() {
                return T::infinity();
            }
            if b - a <= self.tol * width0 || b - a <= T::epsilon() * scale * lit(4.0) {
                break;
            }
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - invphi * (b - a);
                fc = clean(f(c));
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + invphi * (b - a);
                fd = clean(f(d));
            }
        }
        best.max(fc).max(fd)
    }
}

#[inline]
fn clean<T: Scalar>(v: T) -> T {
    if v.is_nan() {
        T::zero()
    } else {
        v
    }
}
