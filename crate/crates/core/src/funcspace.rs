//! Weighted Lebesgue, Cesàro and Copson quasi-norms of step functions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{ratio_to_scalar, Exponent};
use crate::extreal::ExtReal;
use crate::interval::Interval;
use crate::quad::{graded_mesh, tanh_sinh, Abscissa};
use crate::scalar::{lit, mul0, pow0, Scalar};
use crate::search::SupSearch;
use crate::weights::{TailSide, Weight, WeightExpr};

const NORM_TOL: f64 = 1e-13;

/// Nonnegative piecewise-constant function: `values[i]` on `(breaks[i], breaks[i+1])`,
/// zero elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepRaw<T>", bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct StepFunction<T> {
    breaks: Vec<T>,
    values: Vec<T>,
}

#[derive(Deserialize)]
struct StepRaw<T> {
    breaks: Vec<T>,
    values: Vec<T>,
}

impl<T: Scalar> TryFrom<StepRaw<T>> for StepFunction<T> {
    type Error = Error;
    fn try_from(raw: StepRaw<T>) -> Result<Self> {
        StepFunction::new(raw.breaks, raw.values)
    }
}

impl<T: Scalar> StepFunction<T> {
    pub fn new(breaks: Vec<T>, values: Vec<T>) -> Result<Self> {
        if breaks.len() < 2 || values.len() + 1 != breaks.len() {
            return Err(Error::Domain(format!(
                "step function needs n+1 breaks for n values, got {} and {}",
                breaks.len(),
                values.len()
            )));
        }
        if breaks.iter().any(|b| !b.is_finite()) || breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Domain("breaks must be finite and strictly increasing".into()));
        }
        if values.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return Err(Error::Domain("values must be finite and nonnegative".into()));
        }
        Ok(Self { breaks, values })
    }

    /// Indicator of `(x, y)`.
    pub fn indicator(x: T, y: T) -> Result<Self> {
        Self::new(vec![x, y], vec![T::one()])
    }

    pub fn breaks(&self) -> &[T] {
        &self.breaks
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(lo, hi, value)` per cell.
    pub fn cells(&self) -> impl Iterator<Item = (T, T, T)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.breaks[i], self.breaks[i + 1], v))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn eval(&self, t: T) -> T {
        if !(t >= self.breaks[0]) || t >= *self.breaks.last().unwrap() {
            return T::zero();
        }
        let i = self.breaks.partition_point(|b| *b <= t) - 1;
        self.values[i]
    }

    pub fn scaled(&self, c: T) -> Self {
        Self { breaks: self.breaks.clone(), values: self.values.iter().map(|v| *v * c).collect() }
    }

    pub fn map_values(&self, f: impl Fn(T) -> T) -> Self {
        Self { breaks: self.breaks.clone(), values: self.values.iter().map(|v| f(*v)).collect() }
    }

    /// Splits every cell into `k` equal cells.
    pub fn refined(&self, k: usize) -> Self {
        let k = k.max(1);
        let mut breaks = vec![self.breaks[0]];
        let mut values = Vec::with_capacity(self.len() * k);
        for (lo, hi, v) in self.cells() {
            for j in 1..=k {
                breaks.push(if j == k { hi } else { lo + (hi - lo) * lit(j as f64) / lit(k as f64) });
                values.push(v);
            }
        }
        Self { breaks, values }
    }

    /// `t -> f(center - t)`.
    pub fn reflected(&self, center: T) -> Self {
        Self {
            breaks: self.breaks.iter().rev().map(|b| center - *b).collect(),
            values: self.values.iter().rev().copied().collect(),
        }
    }

    /// `t -> f(origin + 1/(t - origin))`; every break must exceed `origin`.
    pub fn inverted(&self, origin: T) -> Result<Self> {
        if self.breaks[0] <= origin {
            return Err(Error::Domain(format!("inversion needs support above {origin}")));
        }
        Ok(Self {
            breaks: self.breaks.iter().rev().map(|b| origin + T::one() / (*b - origin)).collect(),
            values: self.values.iter().rev().copied().collect(),
        })
    }

    /// `(breaks[0], breaks[n])`.
    pub fn support(&self) -> Interval<T> {
        Interval { a: self.breaks[0], b: *self.breaks.last().unwrap() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Ces,
    Cop,
    Leb,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceKind::Ces => "ces",
            SpaceKind::Cop => "cop",
            SpaceKind::Leb => "leb",
        })
    }
}

/// One side of an embedding: `Ces_{p,q}(u,v)`, `Cop_{p,q}(u,v)` or `L_p(v)` on an interval.
///
/// For `Leb` the outer exponent equals `p` and `u` is the unit weight.
#[derive(Clone, Debug)]
pub struct SpaceSpec<T> {
    pub kind: SpaceKind,
    pub p: Exponent,
    pub q: Exponent,
    pub interval: Interval<T>,
    u: Weight<T>,
    v: Weight<T>,
}

impl<T: Scalar> PartialEq for SpaceSpec<T> {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.p == other.p
            && self.q == other.q
            && self.interval == other.interval
            && self.u.expr() == other.u.expr()
            && self.v.expr() == other.v.expr()
    }
}

impl<T: Scalar> SpaceSpec<T> {
    /// Builds and validates a Cesàro or Copson spec, including the quasi-norm condition.
    pub fn new(
        kind: SpaceKind,
        p: Exponent,
        q: Exponent,
        u: WeightExpr<T>,
        v: WeightExpr<T>,
        interval: Interval<T>,
    ) -> Result<Self> {
        if kind == SpaceKind::Leb {
            return Self::lebesgue(p, v, interval);
        }
        let s = Self { kind, p, q, interval, u: Weight::compile(&u)?, v: Weight::compile(&v)? };
        s.u.check_covers(interval.a, interval.b)?;
        s.v.check_covers(interval.a, interval.b)?;
        s.check_quasi_norm()?;
        Ok(s)
    }

    pub fn lebesgue(p: Exponent, v: WeightExpr<T>, interval: Interval<T>) -> Result<Self> {
        let s = Self {
            kind: SpaceKind::Leb,
            p,
            q: p,
            interval,
            u: Weight::compile(&WeightExpr::one())?,
            v: Weight::compile(&v)?,
        };
        s.v.check_covers(interval.a, interval.b)?;
        Ok(s)
    }

    pub fn u(&self) -> &Weight<T> {
        &self.u
    }

    pub fn v(&self) -> &Weight<T> {
        &self.v
    }

    pub fn u_expr(&self) -> &WeightExpr<T> {
        self.u.expr()
    }

    pub fn v_expr(&self) -> &WeightExpr<T> {
        self.v.expr()
    }

    /// Same space with the inner weight replaced.
    pub fn with_v(&self, v: WeightExpr<T>) -> Result<Self> {
        Self::new(self.kind, self.p, self.q, self.u.expr().clone(), v, self.interval)
    }

    /// `0 < ||u||_{q,(t,b)} < inf` (Cesàro) or `0 < ||u||_{q,(a,t)} < inf` (Copson) for all `t`.
    fn check_quasi_norm(&self) -> Result<()> {
        let Interval { a, b } = self.interval;
        let q: T = self.q.to_scalar();
        let tol = lit(1e-10);
        for t in probe_points(self.interval) {
            let (lo, hi) = match self.kind {
                SpaceKind::Ces => (t, b),
                _ => (a, t),
            };
            let val = if q.is_infinite() {
                self.u.extremum_raw(lo, hi, true, tol)
            } else {
                self.u.integral_tol(q, lo, hi, tol)
            };
            if val.is_infinite() {
                let end = if self.kind == SpaceKind::Ces { format!("b = {}", fmt_end(b)) } else { format!("a = {a}") };
                return Err(Error::Spec(format!(
                    "||u||_(q,{}) is infinite at t = {t} ({} space, toward {end})",
                    if self.kind == SpaceKind::Ces { "(t,b)" } else { "(a,t)" },
                    self.kind
                )));
            }
            if !(val > T::zero()) {
                return Err(Error::Spec(format!("||u|| vanishes at t = {t} ({} space)", self.kind)));
            }
        }
        Ok(())
    }
}

fn fmt_end<T: Scalar>(b: T) -> String {
    if b.is_infinite() {
        "inf".into()
    } else {
        b.to_string()
    }
}

/// Interior sample points used for hypothesis checks on `(a, b)`.
pub(crate) fn probe_points<T: Scalar>(iv: Interval<T>) -> Vec<T> {
    let Interval { a, b } = iv;
    if b.is_finite() {
        let len = b - a;
        [1e-6, 0.25, 0.5, 0.75, 1.0 - 1e-6].iter().map(|&s| a + len * lit(s)).collect()
    } else {
        let s = a.abs().max(T::one());
        [1e-6, 0.5, 1.0, 1e3, 1e6].iter().map(|&k| a + s * lit(k)).collect()
    }
}

impl<T: Scalar> fmt::Display for SpaceSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SpaceKind::Leb => write!(f, "leb:{}:{}@{}", self.p, self.v.expr(), self.interval),
            k => write!(f, "{k}:{},{}:{},{}@{}", self.p, self.q, self.u.expr(), self.v.expr(), self.interval),
        }
    }
}

/// `(int_sub f^p w^p)^(1/p)`, or `ess sup_sub f w` for `p = inf`.
pub fn lebesgue_norm<T: Scalar>(
    f: &StepFunction<T>,
    p: Exponent,
    w: &Weight<T>,
    sub: Interval<T>,
) -> Result<ExtReal<T>> {
    w.check_covers(sub.a, sub.b)?;
    Ok(ExtReal::new(lebesgue_raw(f, p.to_scalar(), w, sub.a, sub.b)))
}

pub(crate) fn lebesgue_raw<T: Scalar>(f: &StepFunction<T>, p: T, w: &Weight<T>, a: T, b: T) -> T {
    let tol = lit(NORM_TOL);
    let mut acc = T::zero();
    for (lo, hi, c) in f.cells() {
        let (lo, hi) = (lo.max(a), hi.min(b));
        if !(lo < hi) || c.is_zero() {
            continue;
        }
        if p.is_infinite() {
            acc = acc.max(c * w.extremum_raw(lo, hi, true, lit(1e-10)));
        } else {
            acc = acc + c.powf(p) * w.integral_tol(p, lo, hi, tol);
        }
    }
    if p.is_infinite() {
        acc
    } else {
        pow0(acc, T::one() / p)
    }
}

/// Quasi-norm of `f` in the space `s`.
pub fn space_norm<T: Scalar>(f: &StepFunction<T>, s: &SpaceSpec<T>) -> Result<ExtReal<T>> {
    let Interval { a, b } = s.interval;
    let sup = f.support();
    if sup.a < a || sup.b > b {
        return Err(Error::Domain(format!("step function support {} leaves {}", sup, s.interval)));
    }
    if f.is_zero() {
        return Ok(ExtReal::zero());
    }
    let p: T = s.p.to_scalar();
    let q: T = s.q.to_scalar();
    let value = match s.kind {
        SpaceKind::Leb => lebesgue_raw(f, p, &s.v, a, b),
        kind => iterated_norm(f, kind, p, q, &s.u, &s.v, a, b),
    };
    Ok(ExtReal::new(value))
}

/// Inner norm profile `t -> ||f||_{p,v,(a,t)}` (or over `(t,b)`), piecewise in closed form.
struct Profile<'a, T> {
    f: &'a StepFunction<T>,
    v: &'a Weight<T>,
    p: T,
    upper: bool,
    /// Inner mass accumulated strictly before cell `i` (Cesàro) or strictly after it (Copson).
    carried: Vec<T>,
    total: T,
}

impl<'a, T: Scalar> Profile<'a, T> {
    fn new(f: &'a StepFunction<T>, v: &'a Weight<T>, p: T, upper: bool) -> Self {
        let masses: Vec<T> = f
            .cells()
            .map(|(lo, hi, c)| {
                if c.is_zero() {
                    T::zero()
                } else if p.is_infinite() {
                    c * v.extremum_raw(lo, hi, true, lit(1e-10))
                } else {
                    c.powf(p) * v.integral_tol(p, lo, hi, lit(NORM_TOL))
                }
            })
            .collect();
        let join = |x: T, y: T| if p.is_infinite() { x.max(y) } else { x + y };
        let n = masses.len();
        let mut carried = vec![T::zero(); n];
        let mut acc = T::zero();
        if upper {
            for i in (0..n).rev() {
                carried[i] = acc;
                acc = join(acc, masses[i]);
            }
        } else {
            for i in 0..n {
                carried[i] = acc;
                acc = join(acc, masses[i]);
            }
        }
        Self { f, v, p, upper, carried, total: acc }
    }

    fn finish(&self, raw: T) -> T {
        if self.p.is_infinite() {
            raw
        } else {
            pow0(raw, T::one() / self.p)
        }
    }

    fn total(&self) -> T {
        self.finish(self.total)
    }

    /// Norm at `t` inside cell `i`.
    fn at(&self, i: usize, t: T) -> T {
        let lo = self.f.breaks[i];
        let hi = self.f.breaks[i + 1];
        let c = self.f.values[i];
        let (x, y) = if self.upper { (t, hi) } else { (lo, t) };
        let part = if c.is_zero() {
            T::zero()
        } else if self.p.is_infinite() {
            c * self.v.extremum_raw(x, y, true, lit(1e-10))
        } else {
            c.powf(self.p) * self.v.integral_raw(self.p, x, y)
        };
        let raw = if self.p.is_infinite() { self.carried[i].max(part) } else { self.carried[i] + part };
        self.finish(raw)
    }
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn iterated_norm<T: Scalar>(
    f: &StepFunction<T>,
    kind: SpaceKind,
    p: T,
    q: T,
    u: &Weight<T>,
    v: &Weight<T>,
    a: T,
    b: T,
) -> T {
    let upper = kind == SpaceKind::Cop;
    let prof = Profile::new(f, v, p, upper);
    let total = prof.total();
    let first = f.breaks[0];
    let last = *f.breaks.last().unwrap();
    // region where the inner norm is the full total
    let (flat_lo, flat_hi) = if upper { (a, first) } else { (last, b) };
    let sup_tol = lit(1e-10);
    if q.is_infinite() {
        let mut best = if flat_lo < flat_hi { mul0(total, u.extremum_raw(flat_lo, flat_hi, true, sup_tol)) } else { T::zero() };
        let search = SupSearch::new(64, 80, lit(1e-12));
        for i in 0..f.len() {
            for (lo, hi) in split_at_breaks(f.breaks[i], f.breaks[i + 1], &[u, v]) {
                let span = hi - lo;
                let mesh = graded_mesh(lo, hi, 64, span * lit(1e-6), span * lit(1e-6));
                let s = search.run_on_mesh(&mesh, |t| mul0(prof.at(i, t), u.eval(t)));
                best = best.max(s);
            }
        }
        return best;
    }
    let tol = lit(NORM_TOL);
    let mut acc = T::zero();
    if flat_lo < flat_hi && !total.is_zero() {
        acc = acc + mul0(pow0(total, q), u.integral_tol(q, flat_lo, flat_hi, tol));
    }
    for i in 0..f.len() {
        for (lo, hi) in split_at_breaks(f.breaks[i], f.breaks[i + 1], &[u, v]) {
            let part = tanh_sinh(lo, hi, tol, |x: Abscissa<T>| {
                let uu = u.eval_abscissa(x, lo, hi);
                mul0(pow0(prof.at(i, x.t), q), pow0(uu, q))
            });
            acc = acc + part;
        }
    }
    pow0(acc, T::one() / q)
}

/// `(lo, hi)` cut at the breakpoints of the given weights.
pub(crate) fn split_at_breaks<T: Scalar>(lo: T, hi: T, ws: &[&Weight<T>]) -> Vec<(T, T)> {
    let mut cuts: Vec<T> = ws.iter().flat_map(|w| w.breakpoints_in(lo, hi)).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut prev = lo;
    for c in cuts {
        out.push((prev, c));
        prev = c;
    }
    out.push((prev, hi));
    out
}

/// Weight `w` with `Ces_{p,p}(u,v) = L_p(w)` (or the Copson analogue):
/// `w(x) = v(x) ||u||_{p,(x,b)}` resp. `v(x) ||u||_{p,(a,x)}`.
pub fn pp_weight<T: Scalar>(s: &SpaceSpec<T>) -> Result<WeightExpr<T>> {
    if s.kind == SpaceKind::Leb {
        return Err(Error::Parameter("pp_weight needs a Cesàro or Copson space".into()));
    }
    if s.p != s.q {
        return Err(Error::Parameter(format!("pp_weight needs p = q, got p = {}, q = {}", s.p, s.q)));
    }
    let p: T = ratio_to_scalar(s.p.require_finite("p")?);
    let Interval { a, b } = s.interval;
    let tail = monomial_tail(s, p).unwrap_or_else(|| WeightExpr::NormTail {
        u: Box::new(s.u.expr().clone()),
        p,
        side: if s.kind == SpaceKind::Ces { TailSide::Upper } else { TailSide::Lower },
        endpoint: if s.kind == SpaceKind::Ces { b } else { a },
    });
    Ok(if s.v.expr().is_unit() { tail } else { s.v.expr().clone().times(tail) })
}

/// Closed form of the tail norm when `u` is a single affine power anchored at the right end.
fn monomial_tail<T: Scalar>(s: &SpaceSpec<T>, p: T) -> Option<WeightExpr<T>> {
    let Interval { a, b } = s.interval;
    let (c, root, above, gamma) = s.u.single_power_on(a, b)?;
    let beta = gamma * p;
    let one = T::one();
    // c * (±(x - root))^k * scale^(-1/p)
    let build = |root: T, reflect: bool, k: T, scale: T| {
        let base = WeightExpr::power(k);
        let placed = if reflect {
            base.reflect(root)
        } else if root.is_zero() {
            base
        } else {
            base.shift(root)
        };
        let coef = c * scale.powf(-one / p);
        if coef == one {
            placed
        } else {
            placed.scaled(coef)
        }
    };
    let k = (beta + one) / p;
    match s.kind {
        SpaceKind::Ces => {
            if gamma.is_zero() && b.is_finite() {
                Some(build(b, true, one / p, one))
            } else if b.is_infinite() && above && root <= a && beta < -one {
                Some(build(root, false, k, -beta - one))
            } else if b.is_finite() && !above && root == b && beta > -one {
                Some(build(b, true, k, beta + one))
            } else {
                None
            }
        }
        _ => {
            if gamma.is_zero() {
                Some(build(a, false, one / p, one))
            } else if above && root == a && beta > -one {
                Some(build(a, false, k, beta + one))
            } else {
                None
            }
        }
    }
}
