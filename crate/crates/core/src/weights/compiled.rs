//! Normal form of a weight: a sorted list of pieces, each a coefficient times
//! a product of affine power factors `(±(t - root))^exp`, log factors
//! `log(e ± (t - root))^exp`, and opaque norm-tail factors.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::quad::{exp_sinh, graded_mesh, tanh_sinh, Abscissa};
use crate::scalar::{lit, pow0, Scalar};
use crate::search::SupSearch;

use super::expr::{TailSide, WeightExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Side {
    /// `(t - root)`, positive for `t > root`.
    Above,
    /// `(root - t)`, positive for `t < root`.
    Below,
}

impl Side {
    fn flip(self) -> Self {
        match self {
            Side::Above => Side::Below,
            Side::Below => Side::Above,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Factor<T> {
    pub root: T,
    pub side: Side,
    pub exp: T,
}

impl<T: Scalar> Factor<T> {
    /// Factor base at `t`, using exact end offsets when the root sits on an end.
    #[inline]
    fn base(&self, at: &Point<T>) -> T {
        match self.side {
            Side::Above => {
                if self.root == at.lo {
                    at.from_lo
                } else {
                    at.t - self.root
                }
            }
            Side::Below => {
                if self.root == at.hi {
                    at.from_hi
                } else {
                    self.root - at.t
                }
            }
        }
    }
}

#[derive(Debug)]
pub(crate) struct Tail<T> {
    /// Compiled `u^p`.
    pub integrand: Weight<T>,
    pub inv_p: T,
    pub side: TailSide,
    pub endpoint: T,
}

impl<T: Scalar> Tail<T> {
    fn eval(&self, t: T) -> T {
        let raw = match self.side {
            TailSide::Upper => self.integrand.integral_raw(T::one(), t, self.endpoint),
            TailSide::Lower => self.integrand.integral_raw(T::one(), self.endpoint, t),
        };
        pow0(raw, self.inv_p)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Term<T> {
    pub coef: T,
    pub pows: Vec<Factor<T>>,
    pub logs: Vec<Factor<T>>,
    pub tails: Vec<(Arc<Tail<T>>, T)>,
}

/// Evaluation point carrying exact offsets from the ends of the current range.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Point<T> {
    pub t: T,
    pub lo: T,
    pub from_lo: T,
    pub hi: T,
    pub from_hi: T,
}

impl<T: Scalar> Point<T> {
    fn plain(t: T) -> Self {
        Self { t, lo: T::nan(), from_lo: T::nan(), hi: T::nan(), from_hi: T::nan() }
    }
}

impl<T: Scalar> Term<T> {
    fn constant(c: T) -> Self {
        Self { coef: c, pows: vec![], logs: vec![], tails: vec![] }
    }

    fn is_elementary(&self) -> bool {
        self.logs.is_empty() && self.tails.is_empty() && self.pows.len() <= 1
    }

    fn push_factor(list: &mut Vec<Factor<T>>, f: Factor<T>) {
        if f.exp.is_zero() {
            return;
        }
        if let Some(g) = list.iter_mut().find(|g| g.root == f.root && g.side == f.side) {
            g.exp = g.exp + f.exp;
        } else {
            list.push(f);
        }
        list.retain(|g| !g.exp.is_zero());
    }

    fn times(&self, other: &Term<T>) -> Term<T> {
        let mut out = self.clone();
        out.coef = out.coef * other.coef;
        for f in &other.pows {
            Self::push_factor(&mut out.pows, *f);
        }
        for f in &other.logs {
            Self::push_factor(&mut out.logs, *f);
        }
        out.tails.extend(other.tails.iter().cloned());
        out
    }

    fn powered(&self, e: T) -> Term<T> {
        if e == T::one() {
            return self.clone();
        }
        let scale = |v: &Vec<Factor<T>>| -> Vec<Factor<T>> {
            v.iter()
                .map(|f| Factor { exp: f.exp * e, ..*f })
                .filter(|f| !f.exp.is_zero())
                .collect()
        };
        Term {
            coef: pow0(self.coef, e),
            pows: scale(&self.pows),
            logs: scale(&self.logs),
            tails: self.tails.iter().map(|(t, x)| (t.clone(), *x * e)).collect(),
        }
    }

    #[inline]
    fn eval_at(&self, at: &Point<T>, e: T) -> T {
        let mut v = pow0(self.coef, e);
        for f in &self.pows {
            v = v * pow0(f.base(at), f.exp * e);
        }
        for f in &self.logs {
            let b = f.base(at);
            v = v * pow0((T::E() + b).ln(), f.exp * e);
        }
        for (tail, x) in &self.tails {
            v = v * pow0(tail.eval(at.t), *x * e);
        }
        v
    }

    /// Exponent of the factors that vanish at the finite end `end`.
    fn vanishing_exponent(&self, end: T, side_inside: Side) -> T {
        self.pows
            .iter()
            .filter(|f| f.root == end && f.side == side_inside)
            .fold(T::zero(), |acc, f| acc + f.exp)
    }

    /// Total power and log exponent governing growth at `+inf`.
    fn growth_at_infinity(&self) -> (T, T) {
        let p = self.pows.iter().fold(T::zero(), |acc, f| acc + f.exp);
        let l = self.logs.iter().fold(T::zero(), |acc, f| acc + f.exp);
        (p, l)
    }

    /// `int_lo^hi term^e dt` with `lo < hi` inside the piece.
    fn integral(&self, e: T, lo: T, hi: T, tol: T) -> T {
        if !(lo < hi) {
            return T::zero();
        }
        let coef = pow0(self.coef, e);
        if coef.is_zero() {
            return T::zero();
        }
        if self.is_elementary() {
            let Some(f) = self.pows.first() else {
                return coef * (hi - lo);
            };
            let gamma = f.exp * e;
            // substitute s = ±(t - root)
            let (s1, s2) = match f.side {
                Side::Above => (lo - f.root, hi - f.root),
                Side::Below => (f.root - hi, f.root - lo),
            };
            return coef * power_integral(gamma, s1.max(T::zero()), s2, hi - lo);
        }
        if self.tails.is_empty() {
            let at_lo = self.vanishing_exponent(lo, Side::Above) * e;
            if at_lo <= -T::one() {
                return T::infinity();
            }
            if hi.is_finite() {
                let at_hi = self.vanishing_exponent(hi, Side::Below) * e;
                if at_hi <= -T::one() {
                    return T::infinity();
                }
            } else {
                let (p, l) = self.growth_at_infinity();
                let (p, l) = (p * e, l * e);
                if p > -T::one() || (p == -T::one() && l >= -T::one()) {
                    return T::infinity();
                }
            }
        }
        let f = |x: Abscissa<T>| {
            let at = Point { t: x.t, lo, from_lo: x.from_lo, hi, from_hi: x.from_hi };
            self.eval_at(&at, e)
        };
        if hi.is_finite() {
            tanh_sinh(lo, hi, tol, f)
        } else {
            let scale = lo.abs().max(T::one());
            if !self.tails.is_empty() && truncation_grows(self, e, lo, scale, tol) {
                return T::infinity();
            }
            exp_sinh(lo, scale, tol, f)
        }
    }

    /// Limit of the term at a finite end `end` approached from the side
    /// where `t` lies relative to `end`.
    fn limit_at(&self, end: T, from_above: bool) -> T {
        let mut v = self.coef;
        let mut zero = false;
        let mut inf = false;
        for f in &self.pows {
            let vanishes = f.root == end
                && ((from_above && f.side == Side::Above) || (!from_above && f.side == Side::Below));
            if vanishes {
                if f.exp > T::zero() {
                    zero = true;
                } else {
                    inf = true;
                }
            } else {
                let b = match f.side {
                    Side::Above => end - f.root,
                    Side::Below => f.root - end,
                };
                v = v * pow0(b, f.exp);
            }
        }
        for f in &self.logs {
            let b = match f.side {
                Side::Above => end - f.root,
                Side::Below => f.root - end,
            };
            v = v * pow0((T::E() + b.max(T::zero())).ln(), f.exp);
        }
        for (tail, x) in &self.tails {
            v = v * pow0(tail.eval(end), *x);
        }
        if zero {
            T::zero()
        } else if inf {
            T::infinity()
        } else {
            v
        }
    }

    fn limit_at_infinity(&self) -> T {
        if !self.tails.is_empty() {
            return self.eval_at(&Point::plain(lit(1e15)), T::one());
        }
        let (p, l) = self.growth_at_infinity();
        if p > T::zero() || (p.is_zero() && l > T::zero()) {
            T::infinity()
        } else if p < T::zero() || (p.is_zero() && l < T::zero()) {
            T::zero()
        } else {
            self.coef
        }
    }

    /// Supremum (`upper = true`) or infimum of the term over `(lo, hi)`.
    fn extremum(&self, lo: T, hi: T, upper: bool, tol: T) -> T {
        let end_lo = self.limit_at(lo, true);
        let end_hi = if hi.is_finite() { self.limit_at(hi, false) } else { self.limit_at_infinity() };
        let pick = |a: T, b: T| if upper { a.max(b) } else { a.min(b) };
        let ends = pick(end_lo, end_hi);
        if self.is_elementary() {
            // a single affine power is monotone
            return ends;
        }
        let top = if hi.is_finite() { hi } else { lo + (lo.abs().max(T::one())) * lit(1e12) };
        let span = top - lo;
        let gap_lo = span * lit(1e-9) + lo.abs() * T::epsilon() * lit(16.0);
        let gap_hi = span * lit(1e-9) + top.abs() * T::epsilon() * lit(16.0);
        let mesh = graded_mesh(lo, top, 96, gap_lo, gap_hi);
        let search = SupSearch::new(96, 80, tol);
        let eval = |t: T| self.eval_at(&Point::plain(t), T::one());
        let inner = if upper {
            search.run_on_mesh(&mesh, eval)
        } else {
            -search.run_on_mesh(&mesh, |t| -eval(t))
        };
        pick(ends, inner)
    }
}

fn truncation_grows<T: Scalar>(term: &Term<T>, e: T, lo: T, scale: T, tol: T) -> bool {
    let f = |base: T| {
        move |x: Abscissa<T>| {
            let at = Point { t: x.t, lo, from_lo: x.from_lo, hi: base, from_hi: x.from_hi };
            term.eval_at(&at, e)
        }
    };
    let mut prev = T::zero();
    let mut grows = 0;
    for k in 1..=6 {
        let top = lo + scale * lit(10f64.powi(2 * k));
        let v = tanh_sinh(lo, top, tol, f(top));
        if k > 1 && v >= prev * lit(10.0) {
            grows += 1;
        } else {
            grows = 0;
        }
        prev = v;
    }
    grows >= 2
}

/// `int_{s1}^{s2} s^gamma ds` for `0 <= s1 < s2 <= inf`, where `width = s2 - s1`
/// (passed separately so that narrow ranges keep full precision).
pub(crate) fn power_integral<T: Scalar>(gamma: T, s1: T, s2: T, width: T) -> T {
    let beta = gamma + T::one();
    if s2.is_infinite() {
        if beta >= T::zero() {
            return T::infinity();
        }
        if s1.is_zero() {
            return T::infinity();
        }
        return -pow0(s1, beta) / beta;
    }
    if s1.is_zero() {
        if beta <= T::zero() {
            return T::infinity();
        }
        return pow0(s2, beta) / beta;
    }
    let rel = width / s1;
    if beta.is_zero() {
        return rel.ln_1p();
    }
    // s1^beta * ((1 + rel)^beta - 1) / beta
    s1.powf(beta) * (beta * rel.ln_1p()).exp_m1() / beta
}

#[derive(Clone, Debug)]
pub(crate) struct Piece<T> {
    pub lo: T,
    pub hi: T,
    pub term: Term<T>,
}

/// A compiled weight in normal form.
#[derive(Clone, Debug)]
pub struct Weight<T> {
    pub(crate) pieces: Vec<Piece<T>>,
    source: WeightExpr<T>,
}

impl<T: Scalar> Weight<T> {
    pub fn compile(expr: &WeightExpr<T>) -> Result<Self> {
        let mut pieces = compile_pieces(expr)?;
        pieces.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap_or(std::cmp::Ordering::Equal));
        for w in pieces.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(Error::Domain(format!(
                    "weight pieces overlap near {} in {expr}",
                    w[1].lo
                )));
            }
        }
        Ok(Self { pieces, source: expr.clone() })
    }

    pub fn expr(&self) -> &WeightExpr<T> {
        &self.source
    }

    /// Checks that `(x, y)` lies inside the union of the pieces.
    pub fn check_covers(&self, x: T, y: T) -> Result<()> {
        if !(x < y) {
            return Ok(());
        }
        let mut cursor = x;
        for p in &self.pieces {
            if p.hi <= cursor {
                continue;
            }
            if p.lo > cursor {
                break;
            }
            cursor = p.hi;
            if cursor >= y {
                return Ok(());
            }
        }
        Err(Error::Domain(format!(
            "sub-interval ({x}, {y}) leaves the domain of weight {}",
            self.source
        )))
    }

    pub fn eval(&self, t: T) -> T {
        match self.piece_at(t) {
            Some(p) => p.term.eval_at(&Point::plain(t), T::one()),
            None => T::zero(),
        }
    }

    /// Evaluates at a double-exponential abscissa of `(lo, hi)`, which must
    /// lie inside one piece; factors rooted at `lo` or `hi` use the exact offsets.
    pub(crate) fn eval_abscissa(&self, x: Abscissa<T>, lo: T, hi: T) -> T {
        let probe = if hi.is_finite() { lo + (hi - lo) / lit(2.0) } else { lo + lo.abs().max(T::one()) };
        match self.piece_at(probe) {
            Some(p) => p.term.eval_at(&Point { t: x.t, lo, from_lo: x.from_lo, hi, from_hi: x.from_hi }, T::one()),
            None => T::zero(),
        }
    }

    /// A single affine power `coef * (±(t - root))^exp` covering `(x, y)`.
    pub(crate) fn single_power_on(&self, x: T, y: T) -> Option<(T, T, bool, T)> {
        let mut hits = self.pieces.iter().filter(|p| p.lo < y && p.hi > x);
        let p = hits.next()?;
        if hits.next().is_some() || p.lo > x || p.hi < y || !p.term.is_elementary() {
            return None;
        }
        Some(match p.term.pows.first() {
            None => (p.term.coef, T::zero(), true, T::zero()),
            Some(f) => (p.term.coef, f.root, f.side == Side::Above, f.exp),
        })
    }

    fn piece_at(&self, t: T) -> Option<&Piece<T>> {
        let idx = self.pieces.partition_point(|p| p.hi <= t);
        let p = self.pieces.get(idx)?;
        if p.lo <= t && t < p.hi {
            Some(p)
        } else {
            None
        }
    }

    /// `int_x^y w^e`, no domain checks; `x >= y` gives 0.
    pub(crate) fn integral_raw(&self, e: T, x: T, y: T) -> T {
        self.integral_tol(e, x, y, lit(1e-12))
    }

    pub(crate) fn integral_tol(&self, e: T, x: T, y: T, tol: T) -> T {
        if !(x < y) {
            return T::zero();
        }
        if self.pieces.len() == 1 {
            let p = &self.pieces[0];
            return p.term.integral(e, x.max(p.lo), y.min(p.hi), tol);
        }
        let mut acc = T::zero();
        for p in &self.pieces {
            let lo = x.max(p.lo);
            let hi = y.min(p.hi);
            if lo < hi {
                acc = acc + p.term.integral(e, lo, hi, tol);
            }
        }
        acc
    }

    pub(crate) fn extremum_raw(&self, x: T, y: T, upper: bool, tol: T) -> T {
        if !(x < y) {
            return T::zero();
        }
        let mut acc: Option<T> = None;
        for p in &self.pieces {
            let lo = x.max(p.lo);
            let hi = y.min(p.hi);
            if lo < hi {
                let v = p.term.extremum(lo, hi, upper, tol);
                acc = Some(match acc {
                    None => v,
                    Some(a) => {
                        if upper {
                            a.max(v)
                        } else {
                            a.min(v)
                        }
                    }
                });
            }
        }
        acc.unwrap_or(T::zero())
    }

    /// Hull of the domain.
    pub fn domain(&self) -> Option<Interval<T>> {
        let lo = self.pieces.first()?.lo;
        let hi = self.pieces.last()?.hi;
        Some(Interval::raw(lo, hi))
    }

    /// Breakpoints of the piecewise structure inside `(x, y)`.
    pub(crate) fn breakpoints_in(&self, x: T, y: T) -> Vec<T> {
        let mut out = Vec::new();
        for p in &self.pieces {
            for b in [p.lo, p.hi] {
                if b > x && b < y && !out.contains(&b) {
                    out.push(b);
                }
            }
        }
        out
    }
}

fn compile_pieces<T: Scalar>(expr: &WeightExpr<T>) -> Result<Vec<Piece<T>>> {
    use WeightExpr as W;
    let half_line = |term: Term<T>| vec![Piece { lo: T::zero(), hi: T::infinity(), term }];
    Ok(match expr {
        W::Power { alpha } => {
            let mut term = Term::constant(T::one());
            Term::push_factor(&mut term.pows, Factor { root: T::zero(), side: Side::Above, exp: *alpha });
            half_line(term)
        }
        W::PowerLog { alpha, beta } => {
            let mut term = Term::constant(T::one());
            Term::push_factor(&mut term.pows, Factor { root: T::zero(), side: Side::Above, exp: *alpha });
            Term::push_factor(&mut term.logs, Factor { root: T::zero(), side: Side::Above, exp: *beta });
            half_line(term)
        }
        W::Scaled { c, inner } => {
            if !(*c >= T::zero()) || !c.is_finite() {
                return Err(Error::Parameter(format!("scale factor {c} must be nonnegative and finite")));
            }
            let mut out = compile_pieces(inner)?;
            for p in &mut out {
                p.term.coef = p.term.coef * *c;
            }
            out
        }
        W::PowerOf { inner, e } => {
            if !e.is_finite() {
                return Err(Error::Parameter("weight power must be finite".into()));
            }
            compile_pieces(inner)?
                .into_iter()
                .map(|p| Piece { lo: p.lo, hi: p.hi, term: p.term.powered(*e) })
                .collect()
        }
        W::Product(l, r) => {
            let left = compile_pieces(l)?;
            let right = compile_pieces(r)?;
            let mut out = Vec::new();
            for pl in &left {
                for pr in &right {
                    let lo = pl.lo.max(pr.lo);
                    let hi = pl.hi.min(pr.hi);
                    if lo < hi {
                        out.push(Piece { lo, hi, term: pl.term.times(&pr.term) });
                    }
                }
            }
            out
        }
        W::Piecewise(list) => {
            let mut out = Vec::new();
            for (i, pe) in list.iter().enumerate() {
                if !(pe.lo < pe.hi) {
                    return Err(Error::Domain(format!("empty piece ({}, {})", pe.lo, pe.hi)));
                }
                if i > 0 && list[i - 1].hi != pe.lo {
                    return Err(Error::Domain(format!(
                        "pieces must tile: ({}, {}) followed by ({}, {})",
                        list[i - 1].lo,
                        list[i - 1].hi,
                        pe.lo,
                        pe.hi
                    )));
                }
                for p in compile_pieces(&pe.expr)? {
                    let lo = p.lo.max(pe.lo);
                    let hi = p.hi.min(pe.hi);
                    if lo < hi {
                        out.push(Piece { lo, hi, term: p.term });
                    }
                }
            }
            out
        }
        W::Reflect { center, inner } => {
            let c = *center;
            compile_pieces(inner)?
                .into_iter()
                .map(|p| {
                    if !p.term.tails.is_empty() {
                        return Err(Error::UnsupportedWeight("reflection of a norm tail".into()));
                    }
                    let map = |f: &Factor<T>| Factor { root: c - f.root, side: f.side.flip(), exp: f.exp };
                    Ok(Piece {
                        lo: c - p.hi,
                        hi: c - p.lo,
                        term: Term {
                            coef: p.term.coef,
                            pows: p.term.pows.iter().map(map).collect(),
                            logs: p.term.logs.iter().map(map).collect(),
                            tails: vec![],
                        },
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
        W::Shift { by, inner } => {
            let d = *by;
            compile_pieces(inner)?
                .into_iter()
                .map(|p| {
                    if !p.term.tails.is_empty() {
                        return Err(Error::UnsupportedWeight("shift of a norm tail".into()));
                    }
                    let map = |f: &Factor<T>| Factor { root: f.root + d, ..*f };
                    Ok(Piece {
                        lo: p.lo + d,
                        hi: p.hi + d,
                        term: Term {
                            coef: p.term.coef,
                            pows: p.term.pows.iter().map(map).collect(),
                            logs: p.term.logs.iter().map(map).collect(),
                            tails: vec![],
                        },
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
        W::Invert { origin, inner } => {
            let o = *origin;
            let mut out = Vec::new();
            for p in compile_pieces(inner)? {
                if !p.term.logs.is_empty() {
                    return Err(Error::UnsupportedWeight(
                        "logarithmic factor under inversion leaves the closed-form family".into(),
                    ));
                }
                if !p.term.tails.is_empty() {
                    return Err(Error::UnsupportedWeight("inversion of a norm tail".into()));
                }
                let s_lo = p.lo.max(o);
                let s_hi = p.hi;
                if !(s_lo < s_hi) {
                    continue;
                }
                // s = o + 1/(t - o) is decreasing in t
                let t_lo = if s_hi.is_infinite() { o } else { o + T::one() / (s_hi - o) };
                let t_hi = if s_lo == o { T::infinity() } else { o + T::one() / (s_lo - o) };
                let mut term = Term::constant(p.term.coef);
                for f in &p.term.pows {
                    let d = o - f.root;
                    if d.is_zero() {
                        if f.side == Side::Below {
                            return Err(Error::Domain("inverted factor is not positive".into()));
                        }
                        Term::push_factor(&mut term.pows, Factor { root: o, side: Side::Above, exp: -f.exp });
                        continue;
                    }
                    let k = if f.side == Side::Above { d } else { -d };
                    term.coef = term.coef * pow0(k.abs(), f.exp);
                    let side = if k > T::zero() { Side::Above } else { Side::Below };
                    Term::push_factor(&mut term.pows, Factor { root: o - T::one() / d, side, exp: f.exp });
                    Term::push_factor(&mut term.pows, Factor { root: o, side: Side::Above, exp: -f.exp });
                }
                out.push(Piece { lo: t_lo, hi: t_hi, term });
            }
            out
        }
        W::NormTail { u, p, side, endpoint } => {
            if !(*p > T::zero()) || !p.is_finite() {
                return Err(Error::Parameter(format!("tail exponent {p} must be positive and finite")));
            }
            let integrand = Weight::compile(&WeightExpr::PowerOf { inner: u.clone(), e: *p })?;
            let (lo, hi) = match integrand.domain() {
                Some(d) => (d.a, d.b),
                None => return Ok(vec![]),
            };
            let tail = Arc::new(Tail { integrand, inv_p: T::one() / *p, side: *side, endpoint: *endpoint });
            let mut term = Term::constant(T::one());
            term.tails.push((tail, T::one()));
            vec![Piece { lo, hi, term }]
        }
    })
}
