//! Rewriting embeddings into the canonical three-weight inequality
//!
//! ```text
//! (int (int_a^t f^r v)^(q/r) u dt)^(1/q) <= C (int (int_a^t f)^p w dt)^(1/p)
//! ```

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::{ratio_to_scalar, Exponent, Rational};
use crate::funcspace::{pp_weight, probe_points, SpaceKind, SpaceSpec};
use crate::interval::Interval;
use crate::scalar::{lit, Scalar};
use crate::weights::{Weight, WeightExpr};

/// Data of the canonical inequality.
#[derive(Clone, Debug)]
pub struct CanonicalProblem<T> {
    pub p: Rational,
    pub q: Rational,
    pub r: Rational,
    pub interval: Interval<T>,
    u: Weight<T>,
    v: Weight<T>,
    w: Weight<T>,
}

impl<T: Scalar> CanonicalProblem<T> {
    /// Builds the problem and checks `0 < int_x^b w < inf` for all `x`.
    pub fn new(
        p: Rational,
        q: Rational,
        r: Rational,
        u: WeightExpr<T>,
        v: WeightExpr<T>,
        w: WeightExpr<T>,
        interval: Interval<T>,
    ) -> Result<Self> {
        let c = Self::unchecked(p, q, r, u, v, w, interval)?;
        c.check_hypothesis()?;
        Ok(c)
    }

    /// Builds the problem without the tail hypothesis on `w` (the oracle does not need it).
    pub fn unchecked(
        p: Rational,
        q: Rational,
        r: Rational,
        u: WeightExpr<T>,
        v: WeightExpr<T>,
        w: WeightExpr<T>,
        interval: Interval<T>,
    ) -> Result<Self> {
        for (name, x) in [("p", p), ("q", q), ("r", r)] {
            if x <= Rational::zero() {
                return Err(Error::Parameter(format!("{name} = {x} must be positive")));
            }
        }
        let compile = |e: &WeightExpr<T>| -> Result<Weight<T>> {
            let w = Weight::compile(e)?;
            w.check_covers(interval.a, interval.b)?;
            Ok(w)
        };
        Ok(Self { p, q, r, interval, u: compile(&u)?, v: compile(&v)?, w: compile(&w)? })
    }

    pub fn check_hypothesis(&self) -> Result<()> {
        for x in probe_points(self.interval) {
            let tail = self.cap_w(x);
            if tail.is_infinite() {
                return Err(Error::Hypothesis(format!("int_x^b w is infinite at x = {x}")));
            }
            if !(tail > T::zero()) {
                return Err(Error::Hypothesis(format!("int_x^b w vanishes at x = {x}")));
            }
        }
        Ok(())
    }

    pub fn u(&self) -> &Weight<T> {
        &self.u
    }

    pub fn v(&self) -> &Weight<T> {
        &self.v
    }

    pub fn w(&self) -> &Weight<T> {
        &self.w
    }

    /// `(p, q, r)` in the working scalar.
    pub fn exponents(&self) -> (T, T, T) {
        (ratio_to_scalar(self.p), ratio_to_scalar(self.q), ratio_to_scalar(self.r))
    }

    /// `U(t) = int_t^b u`.
    pub fn cap_u(&self, t: T) -> T {
        self.u.integral_tol(T::one(), t, self.interval.b, lit(1e-12))
    }

    /// `W(t) = int_t^b w`.
    pub fn cap_w(&self, t: T) -> T {
        self.w.integral_tol(T::one(), t, self.interval.b, lit(1e-12))
    }

    /// Same problem with `(w, u, v)` replaced by `(lambda w, mu u, nu v)`.
    pub fn scaled(&self, lambda: T, mu: T, nu: T) -> Result<Self> {
        Self::unchecked(
            self.p,
            self.q,
            self.r,
            self.u.expr().clone().scaled(mu),
            self.v.expr().clone().scaled(nu),
            self.w.expr().clone().scaled(lambda),
            self.interval,
        )
    }

    pub fn summary(&self) -> CanonicalSummary {
        CanonicalSummary {
            p: Exponent::Finite(self.p).to_string(),
            q: Exponent::Finite(self.q).to_string(),
            r: Exponent::Finite(self.r).to_string(),
            u: self.u.expr().to_string(),
            v: self.v.expr().to_string(),
            w: self.w.expr().to_string(),
            interval: self.interval.to_string(),
        }
    }
}

/// Printable form of a canonical problem.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CanonicalSummary {
    pub p: String,
    pub q: String,
    pub r: String,
    pub u: String,
    pub v: String,
    pub w: String,
    pub interval: String,
}

/// `source -> target`.
#[derive(Clone, Debug)]
pub struct EmbeddingProblem<T> {
    pub source: SpaceSpec<T>,
    pub target: SpaceSpec<T>,
}

impl<T: Scalar> PartialEq for EmbeddingProblem<T> {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target
    }
}

impl<T: Scalar> EmbeddingProblem<T> {
    pub fn new(source: SpaceSpec<T>, target: SpaceSpec<T>) -> Result<Self> {
        if source.interval != target.interval {
            return Err(Error::Spec(format!(
                "source lives on {} but target on {}",
                source.interval, target.interval
            )));
        }
        Ok(Self { source, target })
    }

    pub fn interval(&self) -> Interval<T> {
        self.source.interval
    }
}

impl<T: Scalar> fmt::Display for EmbeddingProblem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.source, self.target)
    }
}

/// `e^k`, skipping trivial powers.
fn pow_expr<T: Scalar>(e: &WeightExpr<T>, k: T) -> WeightExpr<T> {
    if e.is_unit() {
        WeightExpr::one()
    } else if k == T::one() {
        e.clone()
    } else {
        e.clone().pow(k)
    }
}

fn product<T: Scalar>(l: WeightExpr<T>, r: WeightExpr<T>) -> WeightExpr<T> {
    match (l.is_unit(), r.is_unit()) {
        (true, _) => r,
        (_, true) => l,
        _ => l.times(r),
    }
}

/// Reduces `Ces_{p1,q1}(u1,v1) -> Ces_{p2,q2}(u2,v2)` to the canonical inequality.
///
/// Returns the problem and `p1`; best constants satisfy `c^p1 = C`.
pub fn canonicalize<T: Scalar>(e: &EmbeddingProblem<T>) -> Result<(CanonicalProblem<T>, Rational)> {
    let (s, t) = (&e.source, &e.target);
    if s.kind != SpaceKind::Ces || t.kind != SpaceKind::Ces {
        return Err(Error::Unsupported(format!(
            "canonicalize needs Ces -> Ces, got {} -> {}",
            s.kind, t.kind
        )));
    }
    let p1 = s.p.require_finite("p1")?;
    let q1 = s.q.require_finite("q1")?;
    let p2 = t.p.require_finite("p2")?;
    let q2 = t.q.require_finite("q2")?;
    let sc = ratio_to_scalar::<T>;
    let u = pow_expr(t.u_expr(), sc(q2));
    let v = product(pow_expr(s.v_expr(), -sc(p2)), pow_expr(t.v_expr(), sc(p2)));
    let w = pow_expr(s.u_expr(), sc(q1));
    let c = CanonicalProblem::new(q1 / p1, q2 / p1, p2 / p1, u, v, w, e.interval())?;
    Ok((c, p1))
}

/// Change of variables taking `Cop -> Cop` to `Ces -> Ces` and `Ces -> Cop` to `Cop -> Ces`.
///
/// On a bounded interval the weights are reflected, `u~(t) = u(a + b - t)`. On
/// `(a, inf)` the map is `t -> a + 1/(t - a)` with Jacobian factors
/// `u~(t) = (t-a)^(-2/q) u(a + 1/(t-a))` and `v~(t) = (t-a)^(-2/p) v(a + 1/(t-a))`,
/// where `p, q` are the exponents of the space the weight belongs to.
pub fn tilde_transform<T: Scalar>(e: &EmbeddingProblem<T>) -> Result<EmbeddingProblem<T>> {
    if e.target.kind != SpaceKind::Cop || e.source.kind == SpaceKind::Leb {
        return Err(Error::Unsupported(format!(
            "tilde transform applies to Cop -> Cop and Ces -> Cop, got {} -> {}",
            e.source.kind, e.target.kind
        )));
    }
    EmbeddingProblem::new(tilde_space(&e.source)?, tilde_space(&e.target)?)
}

fn tilde_space<T: Scalar>(s: &SpaceSpec<T>) -> Result<SpaceSpec<T>> {
    let Interval { a, b } = s.interval;
    let kind = match s.kind {
        SpaceKind::Ces => SpaceKind::Cop,
        SpaceKind::Cop => SpaceKind::Ces,
        SpaceKind::Leb => SpaceKind::Leb,
    };
    let map = |w: &WeightExpr<T>, exponent: Exponent| -> WeightExpr<T> {
        if b.is_finite() {
            return if w.is_unit() { WeightExpr::one() } else { w.clone().reflect(a + b) };
        }
        let inverted = if w.is_unit() { WeightExpr::one() } else { w.clone().invert(a) };
        let jac = match exponent {
            Exponent::Infinite => WeightExpr::one(),
            Exponent::Finite(x) => {
                let k = -lit::<T>(2.0) / ratio_to_scalar::<T>(x);
                if a.is_zero() {
                    WeightExpr::power(k)
                } else {
                    WeightExpr::power(k).shift(a)
                }
            }
        };
        product(jac, inverted)
    };
    if kind == SpaceKind::Leb {
        return SpaceSpec::lebesgue(s.p, map(s.v_expr(), s.p), s.interval);
    }
    SpaceSpec::new(kind, s.p, s.q, map(s.u_expr(), s.q), map(s.v_expr(), s.p), s.interval)
}

/// `X -> Y_g` with `||h||_{Y_g} = ||g h||_Y`; its best constant is the multiplier norm of `g`.
pub fn multiplier_to_embedding<T: Scalar>(
    base: &EmbeddingProblem<T>,
    g: &WeightExpr<T>,
) -> Result<EmbeddingProblem<T>> {
    if g.is_unit() {
        return Ok(base.clone());
    }
    let target = base.target.with_v(product(base.target.v_expr().clone(), g.clone()))?;
    EmbeddingProblem::new(base.source.clone(), target)
}

/// Replaces every side with `p = q` by the equivalent weighted Lebesgue space.
pub fn detect_degenerate<T: Scalar>(e: &EmbeddingProblem<T>) -> Result<Option<EmbeddingProblem<T>>> {
    let reduce = |s: &SpaceSpec<T>| -> Result<Option<SpaceSpec<T>>> {
        if s.kind == SpaceKind::Leb || s.p != s.q || !s.p.is_finite() {
            return Ok(None);
        }
        Ok(Some(SpaceSpec::lebesgue(s.p, pp_weight(s)?, s.interval)?))
    };
    let source = reduce(&e.source)?;
    let target = reduce(&e.target)?;
    if source.is_none() && target.is_none() {
        return Ok(None);
    }
    Ok(Some(EmbeddingProblem::new(
        source.unwrap_or_else(|| e.source.clone()),
        target.unwrap_or_else(|| e.target.clone()),
    )?))
}

/// Outcome of the `r > 1` test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Triviality {
    /// `r > 1`: the inequality holds only for `f = 0` a.e.
    Trivial,
    Proceed,
}

pub fn triviality_check<T: Scalar>(c: &CanonicalProblem<T>) -> Triviality {
    if c.r > Rational::one() {
        Triviality::Trivial
    } else {
        Triviality::Proceed
    }
}

impl fmt::Display for Triviality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Triviality::Trivial => f.write_str("inequality holds only for f = 0 a.e. (r > 1)"),
            Triviality::Proceed => f.write_str("r <= 1"),
        }
    }
}
