//! Nested sup/integral evaluation of C1..C7 on one truncated domain.

use crate::quad::{graded_mesh, GaussLegendre};
use crate::reduce::CanonicalProblem;
use crate::scalar::{lit, mul0, pow0, Scalar};
use crate::search::SupSearch;
use crate::weights::VrKernel;

use super::{ConstantId, ConstantsConfig};

pub(super) struct Nested<'a, T> {
    c: &'a CanonicalProblem<T>,
    p: T,
    q: T,
    r: T,
    a: T,
    b: T,
    lo: T,
    hi: T,
    vr: VrKernel<T>,
    cfg: &'a ConstantsConfig<T>,
    gl_outer: GaussLegendre<T>,
    gl_inner: GaussLegendre<T>,
}

impl<'a, T: Scalar> Nested<'a, T> {
    pub fn new(c: &'a CanonicalProblem<T>, lo: T, hi: T, cfg: &'a ConstantsConfig<T>) -> Self {
        let (p, q, r) = c.exponents();
        Self {
            c,
            p,
            q,
            r,
            a: c.interval.a,
            b: c.interval.b,
            lo,
            hi,
            vr: VrKernel::new(r),
            cfg,
            gl_outer: GaussLegendre::new(cfg.outer_order),
            gl_inner: GaussLegendre::new(cfg.inner_order),
        }
    }

    pub fn eval(&self, id: ConstantId) -> T {
        match id {
            ConstantId::C1 => self.c1(),
            ConstantId::C2 => self.c2(),
            ConstantId::C3 => self.c3(),
            ConstantId::C4 => self.c4(),
            ConstantId::C5 => self.c5(),
            ConstantId::C6 => self.c6(),
            ConstantId::C7 => self.c7(),
        }
    }

    fn cap_u(&self, t: T) -> T {
        self.c.cap_u(t)
    }

    fn cap_w(&self, t: T) -> T {
        self.c.cap_w(t)
    }

    fn v_r(&self, x: T, t: T) -> T {
        self.vr.eval(self.c.v(), x, t)
    }

    /// `lim_{t -> x+} V_r(x, t)`.
    fn v_r_limit(&self, x: T) -> T {
        self.vr.right_limit(self.c.v(), x)
    }

    fn gaps(&self, lo: T, hi: T) -> (T, T) {
        let rho: T = lit(1e-4);
        let span = hi - lo;
        let d_lo = if lo > self.a { lo - self.a } else { span };
        let d_hi = if self.b.is_finite() && hi < self.b { self.b - hi } else { span };
        let floor = T::epsilon() * lit(8.0) * lo.abs().max(hi.abs());
        ((rho * span.min(d_lo)).max(floor), (rho * span.min(d_hi)).max(floor))
    }

    fn sup(&self, lo: T, hi: T, cells: usize, tol: T, f: impl FnMut(T) -> T) -> T {
        if !(lo < hi) {
            return T::zero();
        }
        let (g_lo, g_hi) = self.gaps(lo, hi);
        let mesh = graded_mesh(lo, hi, cells, g_lo, g_hi);
        SupSearch::new(cells, self.cfg.refine_iters, tol).run_on_mesh(&mesh, f)
    }

    fn outer_sup(&self, f: impl FnMut(T) -> T) -> T {
        self.sup(self.lo, self.hi, self.cfg.outer_samples, self.cfg.sup_tol, f)
    }

    fn inner_sup(&self, lo: T, hi: T, f: impl FnMut(T) -> T) -> T {
        self.sup(lo, hi, self.cfg.inner_samples, self.cfg.inner_sup_tol, f)
    }

    fn integral(&self, lo: T, hi: T, cells: usize, gl: &GaussLegendre<T>, mut f: impl FnMut(T) -> T) -> T {
        if !(lo < hi) {
            return T::zero();
        }
        let (g_lo, g_hi) = self.gaps(lo, hi);
        let mesh = graded_mesh(lo, hi, cells, g_lo, g_hi);
        let mut acc = T::zero();
        for cell in mesh.windows(2) {
            for (t, wt) in gl.mapped(cell[0], cell[1]) {
                let v = f(t);
                if v.is_nan() {
                    continue;
                }
                if v.is_infinite() {
                    return T::infinity();
                }
                acc = acc + wt * v;
            }
        }
        acc
    }

    fn outer_integral(&self, f: impl FnMut(T) -> T) -> T {
        self.integral(self.lo, self.hi, self.cfg.outer_cells, &self.gl_outer, f)
    }

    fn inner_integral(&self, lo: T, hi: T, f: impl FnMut(T) -> T) -> T {
        self.integral(lo, hi, self.cfg.inner_cells, &self.gl_inner, f)
    }

    fn c1(&self) -> T {
        let (p, q) = (self.p, self.q);
        let one = T::one();
        self.outer_sup(|x| {
            let inner = self.inner_sup(x, self.hi, |t| mul0(pow0(self.cap_u(t), one / q), self.v_r(x, t)));
            let inner = inner.max(mul0(pow0(self.cap_u(x), one / q), self.v_r_limit(x)));
            mul0(pow0(self.cap_w(x), -one / p), inner)
        })
    }

    fn c2(&self) -> T {
        let (p, q) = (self.p, self.q);
        let one = T::one();
        let e = q / (one - q);
        let u = self.c.u();
        self.outer_sup(|x| {
            let inner = self.inner_integral(x, self.hi, |t| {
                mul0(mul0(pow0(self.cap_u(t), e), u.eval(t)), pow0(self.v_r(x, t), e))
            });
            mul0(pow0(self.cap_w(x), -one / p), pow0(inner, one / e))
        })
    }

    /// `int_lo^y W^(-p/(p-r)) w V_r(t,y)^(pr/(p-r)) dt`
    fn w_block(&self, y: T) -> T {
        let (p, r) = (self.p, self.r);
        let w = self.c.w();
        let ew = -p / (p - r);
        let ev = p * r / (p - r);
        self.inner_integral(self.lo, y, |t| mul0(mul0(pow0(self.cap_w(t), ew), w.eval(t)), pow0(self.v_r(t, y), ev)))
    }

    fn c3(&self) -> T {
        let (p, q, r) = (self.p, self.q, self.r);
        let one = T::one();
        self.outer_sup(|x| mul0(pow0(self.cap_u(x), one / q), pow0(self.w_block(x), (p - r) / (p * r))))
    }

    fn c4(&self) -> T {
        let (p, q) = (self.p, self.q);
        let u = self.c.u();
        let d = p - q;
        let total = self.outer_integral(|x| {
            let s = self.inner_sup(self.lo, x, |t| mul0(pow0(self.cap_w(t), -q / d), pow0(self.v_r(t, x), p * q / d)));
            mul0(mul0(pow0(self.cap_u(x), q / d), u.eval(x)), s)
        });
        pow0(total, d / (p * q))
    }

    fn c5(&self) -> T {
        let (p, q) = (self.p, self.q);
        let one = T::one();
        let (u, w) = (self.c.u(), self.c.w());
        let d = p - q;
        let e = q / (one - q);
        let total = self.outer_integral(|x| {
            let s = self.inner_sup(self.lo, x, |y| {
                let inner = self.inner_integral(y, x, |t| {
                    mul0(mul0(pow0(u.integral_raw(one, t, x), e), u.eval(t)), pow0(self.v_r(y, t), e))
                });
                mul0(pow0(self.cap_w(y), -p / d), pow0(inner, p * (one - q) / d))
            });
            mul0(w.eval(x), s)
        });
        pow0(total, d / (p * q))
    }

    fn c6(&self) -> T {
        let (p, q, r) = (self.p, self.q, self.r);
        let one = T::one();
        let w = self.c.w();
        let d = p - q;
        let m1 = q / d + one;
        let kappa = (p - r) * q / (d * r);
        let total = self.outer_integral(|x| {
            let ux = pow0(self.cap_u(x), m1);
            let s = self.inner_sup(self.lo, x, |y| {
                // int_y^x U^(q/(p-q)) u = (U(y)^m1 - U(x)^m1) / m1
                let mid = ((pow0(self.cap_u(y), m1) - ux) / m1).max(T::zero());
                mul0(mul0(pow0(self.cap_w(y), -one), mid), pow0(self.w_block(y), kappa))
            });
            mul0(w.eval(x), s)
        });
        pow0(total, d / (p * q))
    }

    fn c7(&self) -> T {
        let (p, q) = (self.p, self.q);
        let one = T::one();
        let (u, w) = (self.c.u(), self.c.w());
        let d = p - q;
        let total = self.outer_integral(|x| {
            let s = self.inner_sup(self.lo, x, |y| {
                let t_sup = self.inner_sup(y, x, |t| {
                    mul0(pow0(u.integral_raw(one, t, x), p / d), pow0(self.v_r(y, t), p * q / d))
                });
                let t_sup = t_sup.max(mul0(pow0(u.integral_raw(one, y, x), p / d), pow0(self.v_r_limit(y), p * q / d)));
                mul0(pow0(self.cap_w(y), -p / d), t_sup)
            });
            mul0(w.eval(x), s)
        });
        pow0(total, d / (p * q))
    }
}

