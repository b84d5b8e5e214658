//! Regime classification and the constants C1..C7 that decide the canonical inequality.

mod nested;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::interval::Interval;
use crate::reduce::CanonicalProblem;
use crate::scalar::{lit, Scalar};

use nested::Nested;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ConstantId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
}

impl ConstantId {
    pub const ALL: [ConstantId; 7] = [
        ConstantId::C1,
        ConstantId::C2,
        ConstantId::C3,
        ConstantId::C4,
        ConstantId::C5,
        ConstantId::C6,
        ConstantId::C7,
    ];
}

impl fmt::Display for ConstantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// The seven parameter regimes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
}

impl Regime {
    pub const ALL: [Regime; 7] = [Regime::I, Regime::II, Regime::III, Regime::IV, Regime::V, Regime::VI, Regime::VII];

    pub fn id(self) -> &'static str {
        match self {
            Regime::I => "i",
            Regime::II => "ii",
            Regime::III => "iii",
            Regime::IV => "iv",
            Regime::V => "v",
            Regime::VI => "vi",
            Regime::VII => "vii",
        }
    }

    pub fn required(self) -> &'static [ConstantId] {
        use ConstantId::*;
        match self {
            Regime::I => &[C1],
            Regime::II => &[C2],
            Regime::III => &[C1, C3],
            Regime::IV => &[C2, C3],
            Regime::V => &[C4, C5],
            Regime::VI => &[C1, C5, C6],
            Regime::VII => &[C1, C6, C7],
        }
    }

    /// Whether `(p, q, r)` satisfies this regime's defining inequalities.
    pub fn admits<X: PartialOrd + Zero + One + Copy>(self, p: X, q: X, r: X) -> bool {
        let one = X::one();
        let min = |x: X, y: X| if x < y { x } else { y };
        let max = |x: X, y: X| if x < y { y } else { x };
        match self {
            Regime::I => p <= r && one <= q,
            Regime::II => p <= min(q, r) && q < one,
            Regime::III => r < p && p <= q && one <= q,
            Regime::IV => r < p && p <= q && q < one,
            Regime::V => q < p && p <= r && q < one,
            Regime::VI => max(q, r) < p && q < one,
            Regime::VII => one <= q && q < p,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl Serialize for Regime {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.id())
    }
}

/// Regime of `(p, q, r)`; exact when called with rationals.
pub fn classify_regime<X>(p: X, q: X, r: X) -> Result<Regime>
where
    X: PartialOrd + Zero + One + Copy + fmt::Display,
{
    for (name, x) in [("p", p), ("q", q), ("r", r)] {
        if !(x > X::zero()) {
            return Err(Error::Parameter(format!("{name} = {x} must be positive")));
        }
    }
    if r > X::one() {
        return Err(Error::Regime(format!("r = {r} > 1: use the triviality check")));
    }
    let one = X::one();
    let regime = if q >= one {
        if p <= r {
            Regime::I
        } else if p <= q {
            Regime::III
        } else {
            Regime::VII
        }
    } else {
        let lo = if q < r { q } else { r };
        let hi = if q < r { r } else { q };
        if p <= lo {
            Regime::II
        } else if r < p && p <= q {
            Regime::IV
        } else if q < p && p <= r {
            Regime::V
        } else {
            debug_assert!(hi < p);
            Regime::VI
        }
    };
    Ok(regime)
}

/// Numerical settings for the nested evaluations.
#[derive(Clone, Debug)]
pub struct ConstantsConfig<T> {
    /// Relative truncation depths: `(a + d L, b - d L)` on bounded intervals,
    /// `(a + d s, a + s / d)` with `s = max(1, |a|)` on half-lines.
    pub ladder: Vec<T>,
    /// Consecutive growth by this factor twice in a row is read as divergence.
    pub growth_factor: T,
    pub outer_samples: usize,
    pub inner_samples: usize,
    pub outer_cells: usize,
    pub inner_cells: usize,
    pub outer_order: usize,
    pub inner_order: usize,
    pub refine_iters: usize,
    pub sup_tol: T,
    pub inner_sup_tol: T,
}

impl<T: Scalar> Default for ConstantsConfig<T> {
    fn default() -> Self {
        Self {
            ladder: vec![lit(1e-6), lit(1e-9), lit(1e-12)],
            growth_factor: lit(10.0),
            outer_samples: 256,
            inner_samples: 48,
            outer_cells: 48,
            inner_cells: 16,
            outer_order: 8,
            inner_order: 8,
            refine_iters: 60,
            sup_tol: lit(1e-8),
            inner_sup_tol: lit(1e-6),
        }
    }
}

impl<T: Scalar> ConstantsConfig<T> {
    /// Coarser grids for quick checks.
    pub fn fast() -> Self {
        Self { outer_samples: 96, inner_samples: 24, outer_cells: 24, inner_cells: 10, ..Self::default() }
    }
}

/// Truncated domain for ladder depth `d`.
pub fn truncate<T: Scalar>(iv: Interval<T>, d: T) -> (T, T) {
    let Interval { a, b } = iv;
    if b.is_finite() {
        let len = b - a;
        (a + d * len, b - d * len)
    } else {
        let s = a.abs().max(T::one());
        (a + d * s, a + s / d)
    }
}

/// One constant with its ladder trace.
#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct ConstantValue<T> {
    pub value: ExtReal<T>,
    pub ladder: Vec<ExtReal<T>>,
}

/// Theorem-side verdict.
#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct ConstantsReport<T> {
    pub regime: Regime,
    pub required: Vec<ConstantId>,
    pub values: BTreeMap<ConstantId, ExtReal<T>>,
    pub estimate: ExtReal<T>,
    pub finite: bool,
    /// Required constants found infinite.
    pub infinite: Vec<ConstantId>,
    pub ladders: BTreeMap<ConstantId, Vec<ExtReal<T>>>,
}

fn check_constraints<T: Scalar>(id: ConstantId, c: &CanonicalProblem<T>) -> Result<()> {
    let (p, q, r) = (c.p, c.q, c.r);
    let one = num_rational::Ratio::one();
    if r > one {
        return Err(Error::Regime(format!("{id} needs r <= 1, got r = {r}")));
    }
    let (ok, need) = match id {
        ConstantId::C1 => (true, ""),
        ConstantId::C2 => (q < one, "q < 1"),
        ConstantId::C3 => (r < p, "r < p"),
        ConstantId::C4 => (q < p, "q < p"),
        ConstantId::C5 => (q < one && q < p, "q < 1 and q < p"),
        ConstantId::C6 => (r < p && q < p, "r < p and q < p"),
        ConstantId::C7 => (q >= one && q < p, "1 <= q < p"),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Regime(format!("{id} needs {need}, got p = {p}, q = {q}, r = {r}")))
    }
}

/// Evaluates one constant on the truncation ladder with explicit settings.
pub fn eval_constant<T: Scalar>(
    id: ConstantId,
    c: &CanonicalProblem<T>,
    cfg: &ConstantsConfig<T>,
) -> Result<ConstantValue<T>> {
    check_constraints(id, c)?;
    c.check_hypothesis()?;
    let mut ladder = Vec::with_capacity(cfg.ladder.len());
    for &d in &cfg.ladder {
        let (lo, hi) = truncate(c.interval, d);
        let v = ExtReal::new(Nested::new(c, lo, hi, cfg).eval(id));
        ladder.push(v);
        if v.is_infinite() {
            break;
        }
    }
    let value = settle(&ladder, cfg.growth_factor);
    Ok(ConstantValue { value, ladder })
}

/// Infinite when any rung is, or when values grow by `factor` twice in a row.
pub(crate) fn settle<T: Scalar>(ladder: &[ExtReal<T>], factor: T) -> ExtReal<T> {
    if ladder.iter().any(|v| v.is_infinite()) {
        return ExtReal::infinity();
    }
    let mut streak = 0;
    for w in ladder.windows(2) {
        let (x, y) = (w[0].value(), w[1].value());
        if y > T::zero() && y >= x * factor {
            streak += 1;
            if streak >= 2 {
                return ExtReal::infinity();
            }
        } else {
            streak = 0;
        }
    }
    ladder.last().copied().unwrap_or_else(ExtReal::zero)
}

macro_rules! eval_fns {
    ($($name:ident => $id:ident),*) => {
        $(
            pub fn $name<T: Scalar>(c: &CanonicalProblem<T>) -> Result<ExtReal<T>> {
                Ok(eval_constant(ConstantId::$id, c, &ConstantsConfig::default())?.value)
            }
        )*
    };
}

eval_fns!(eval_c1 => C1, eval_c2 => C2, eval_c3 => C3, eval_c4 => C4, eval_c5 => C5, eval_c6 => C6, eval_c7 => C7);

/// Classifies and evaluates exactly the constants the regime requires.
pub fn theorem_verdict<T: Scalar>(c: &CanonicalProblem<T>) -> Result<ConstantsReport<T>> {
    theorem_verdict_with(c, &ConstantsConfig::default())
}

pub fn theorem_verdict_with<T: Scalar>(
    c: &CanonicalProblem<T>,
    cfg: &ConstantsConfig<T>,
) -> Result<ConstantsReport<T>> {
    let regime = classify_regime(c.p, c.q, c.r)?;
    let mut values = BTreeMap::new();
    let mut ladders = BTreeMap::new();
    let mut estimate = ExtReal::zero();
    let mut infinite = Vec::new();
    for &id in regime.required() {
        let cv = eval_constant(id, c, cfg)?;
        if cv.value.is_infinite() {
            infinite.push(id);
        }
        estimate = estimate + cv.value;
        values.insert(id, cv.value);
        ladders.insert(id, cv.ladder);
    }
    Ok(ConstantsReport {
        regime,
        required: regime.required().to_vec(),
        values,
        estimate,
        finite: infinite.is_empty(),
        infinite,
        ladders,
    })
}
