//! Brute-force best constant of the canonical (or original) inequality over step functions.

mod grid;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::ratio_to_scalar;
use crate::extreal::ExtReal;
use crate::funcspace::{iterated_norm, space_norm, SpaceKind, SpaceSpec, StepFunction};
use crate::interval::Interval;
use crate::quad::{graded_mesh, GaussLegendre};
use crate::reduce::{CanonicalProblem, EmbeddingProblem};
use crate::scalar::{lit, Scalar};
use crate::weights::{Weight, WeightExpr};

use grid::{Outer, SideGrid, SideShape};

/// Values below `exp(-Z_FLOOR)` relative to the largest cell are frozen.
const Z_FLOOR: f64 = 600.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar + Serialize"))]
pub struct OracleConfig<T> {
    pub grid_size: usize,
    /// Relative truncations `delta`; rung `k` searches `(a + delta L, b - delta L)`,
    /// or `(a + delta s, a + s / delta)` on a half-line with `s = max(1, |a|)`.
    pub ladder: Vec<T>,
    pub restarts: usize,
    pub ascent_iters: usize,
    pub growth_factor_infinite: T,
    pub seed: u64,
    /// Gauss-Legendre nodes per cell for the outer integrals.
    pub quad_order: usize,
    /// Number of grid points used for the indicator witnesses.
    pub witness_points: usize,
}

impl<T: Scalar> Default for OracleConfig<T> {
    fn default() -> Self {
        Self {
            grid_size: 128,
            ladder: vec![lit(1e-3), lit(1e-6), lit(1e-9), lit(1e-12)],
            restarts: 16,
            ascent_iters: 500,
            growth_factor_infinite: lit(10.0),
            seed: 0,
            quad_order: 10,
            witness_points: 32,
        }
    }
}

impl<T: Scalar> OracleConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.grid_size < 8 {
            return Err(Error::Parameter(format!("grid_size = {} must be at least 8", self.grid_size)));
        }
        if self.ladder.is_empty() {
            return Err(Error::Parameter("truncation ladder is empty".into()));
        }
        let half: T = lit(0.5);
        for w in self.ladder.windows(2) {
            if !(w[1] < w[0]) {
                return Err(Error::Parameter("truncation ladder must shrink strictly".into()));
            }
        }
        if !self.ladder.iter().all(|&d| d > T::zero() && d < half) {
            return Err(Error::Parameter("ladder entries must lie in (0, 1/2)".into()));
        }
        if !(self.growth_factor_infinite > T::one()) {
            return Err(Error::Parameter("growth_factor_infinite must exceed 1".into()));
        }
        if self.quad_order < 2 || self.witness_points < 2 {
            return Err(Error::Parameter("quad_order and witness_points must be at least 2".into()));
        }
        Ok(())
    }

    /// Truncated domain of rung `k`.
    pub fn domain(&self, iv: Interval<T>, k: usize) -> Interval<T> {
        let d = self.ladder[k];
        if iv.is_bounded() {
            let len = iv.length();
            Interval::raw(iv.a + d * len, iv.b - d * len)
        } else {
            let s = iv.a.abs().max(T::one());
            Interval::raw(iv.a + d * s, iv.a + s / d)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar + Serialize"))]
pub struct LadderStep<T> {
    pub domain: Interval<T>,
    pub grid: usize,
    pub ratio: ExtReal<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar + Serialize"))]
pub struct OracleResult<T> {
    pub best_ratio: ExtReal<T>,
    pub argmax: StepFunction<T>,
    pub ladder_trace: Vec<LadderStep<T>>,
    pub diverging: bool,
}

/// `LHS / RHS` of the canonical inequality at `f`.
pub fn ratio<T: Scalar>(c: &CanonicalProblem<T>, f: &StepFunction<T>) -> Result<ExtReal<T>> {
    check_support(f, c.interval)?;
    if f.is_zero() {
        return Err(Error::UndefinedRatio("test function vanishes identically".into()));
    }
    let (p, q, r) = c.exponents();
    let one = T::one();
    let Interval { a, b } = c.interval;
    let u = Weight::compile(&c.u().expr().clone().pow(one / q))?;
    let v = Weight::compile(&c.v().expr().clone().pow(one / r))?;
    let w = Weight::compile(&c.w().expr().clone().pow(one / p))?;
    let unit = Weight::compile(&WeightExpr::one())?;
    let lhs = iterated_norm(f, SpaceKind::Ces, r, q, &u, &v, a, b);
    let rhs = iterated_norm(f, SpaceKind::Ces, one, p, &w, &unit, a, b);
    quotient(lhs, rhs)
}

/// `||f||_target / ||f||_source` for an embedding problem.
pub fn embedding_ratio<T: Scalar>(e: &EmbeddingProblem<T>, f: &StepFunction<T>) -> Result<ExtReal<T>> {
    if f.is_zero() {
        return Err(Error::UndefinedRatio("test function vanishes identically".into()));
    }
    let top = space_norm(f, &e.target)?;
    let bottom = space_norm(f, &e.source)?;
    quotient(top.value(), bottom.value())
}

fn quotient<T: Scalar>(top: T, bottom: T) -> Result<ExtReal<T>> {
    if bottom > T::zero() {
        Ok(ExtReal::new(top / bottom))
    } else if top > T::zero() {
        Ok(ExtReal::infinity())
    } else {
        Err(Error::UndefinedRatio("both sides vanish".into()))
    }
}

fn check_support<T: Scalar>(f: &StepFunction<T>, iv: Interval<T>) -> Result<()> {
    let s = f.support();
    if s.a < iv.a || s.b > iv.b {
        return Err(Error::Domain(format!("step function support {s} leaves {iv}")));
    }
    Ok(())
}

/// Best ratio over indicator-type witnesses on the finest default grid.
pub fn witness_lower_bound<T: Scalar>(c: &CanonicalProblem<T>) -> ExtReal<T> {
    let cfg = OracleConfig::default();
    let problem = Problem::canonical(c);
    let k = cfg.ladder.len() - 1;
    let grid = problem.grid(&cfg, k);
    let disc = problem.discretize(&grid, cfg.quad_order);
    let best = disc
        .witnesses(&grid, cfg.witness_points)
        .into_iter()
        .map(|f| disc.objective(&f))
        .fold(T::neg_infinity(), T::max);
    ExtReal::new(best.exp())
}

/// Estimates the best constant of the canonical inequality.
pub fn estimate_best_constant<T: Scalar>(c: &CanonicalProblem<T>, cfg: &OracleConfig<T>) -> Result<OracleResult<T>> {
    cfg.validate()?;
    Problem::canonical(c).run(cfg)
}

/// Estimates the best embedding constant `sup ||f||_target / ||f||_source` directly.
pub fn estimate_original_constant<T: Scalar>(e: &EmbeddingProblem<T>, cfg: &OracleConfig<T>) -> Result<OracleResult<T>> {
    cfg.validate()?;
    Problem::embedding(e)?.run(cfg)
}

/// Ratio `num / den` of two sides on a common interval.
struct Problem<T> {
    num: SideShape<T>,
    den: SideShape<T>,
    interval: Interval<T>,
    breaks: Vec<T>,
    /// Weight `g` and exponent `e` for the extra witnesses `g^e chi`.
    profile: Option<(Weight<T>, T)>,
}

impl<T: Scalar> Problem<T> {
    fn canonical(c: &CanonicalProblem<T>) -> Self {
        let (p, q, r) = c.exponents();
        let one = T::one();
        let unit = Weight::compile(&WeightExpr::one()).expect("unit weight compiles");
        let num = SideShape {
            rho: r,
            outer: Some(Outer { q, weight: c.u().clone(), exp: one, backward: false }),
            inner: c.v().clone(),
            inner_exp: one,
        };
        let den = SideShape {
            rho: one,
            outer: Some(Outer { q: p, weight: c.w().clone(), exp: one, backward: false }),
            inner: unit,
            inner_exp: one,
        };
        let Interval { a, b } = c.interval;
        let mut breaks: Vec<T> = [c.u(), c.v(), c.w()].iter().flat_map(|w| w.breakpoints_in(a, b)).collect();
        breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let profile = (ratio_to_scalar::<T>(c.r) < one).then(|| (c.v().clone(), one / (one - r)));
        Self { num, den, interval: c.interval, breaks, profile }
    }

    fn embedding(e: &EmbeddingProblem<T>) -> Result<Self> {
        let side = |s: &SpaceSpec<T>| -> Result<SideShape<T>> {
            let (Some(p), Some(q)) = (s.p.ratio(), s.q.ratio()) else {
                return Err(Error::Unsupported(format!("oracle needs finite exponents, got {s}")));
            };
            let (p, q) = (ratio_to_scalar::<T>(p), ratio_to_scalar::<T>(q));
            let outer = match s.kind {
                SpaceKind::Leb => None,
                kind => Some(Outer { q, weight: s.u().clone(), exp: q, backward: kind == SpaceKind::Cop }),
            };
            Ok(SideShape { rho: p, outer, inner: s.v().clone(), inner_exp: p })
        };
        let iv = e.interval();
        let mut breaks: Vec<T> = [e.source.u(), e.source.v(), e.target.u(), e.target.v()]
            .iter()
            .flat_map(|w| w.breakpoints_in(iv.a, iv.b))
            .collect();
        breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
        Ok(Self { num: side(&e.target)?, den: side(&e.source)?, interval: iv, breaks, profile: embedding_profile(e) })
    }

    fn grid(&self, cfg: &OracleConfig<T>, k: usize) -> Vec<T> {
        let iv = self.interval;
        let dom = cfg.domain(iv, k);
        let n = cfg.grid_size;
        let mut pts = if iv.is_bounded() {
            graded_mesh(dom.a, dom.b, n, dom.a - iv.a, iv.b - dom.b)
        } else {
            let (l0, l1) = ((dom.a - iv.a).ln(), (dom.b - iv.a).ln());
            (0..=n).map(|j| iv.a + (l0 + (l1 - l0) * lit(j as f64) / lit(n as f64)).exp()).collect()
        };
        let last = pts.len() - 1;
        pts[0] = dom.a;
        pts[last] = dom.b;
        pts.extend(self.breaks.iter().copied().filter(|&x| x > dom.a && x < dom.b));
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        pts.dedup_by(|x, y| !(*x > *y));
        pts
    }

    fn discretize(&self, grid: &[T], order: usize) -> Discrete<T> {
        let gl = GaussLegendre::new(order);
        let Interval { a, b } = self.interval;
        Discrete {
            num: SideGrid::build(&self.num, grid, a, b, &gl),
            den: SideGrid::build(&self.den, grid, a, b, &gl),
            profile: self.profile.as_ref().map(|(g, e)| {
                grid.windows(2).map(|c| (g.integral_raw(*e, c[0], c[1]) / (c[1] - c[0])).max(T::zero())).collect()
            }),
        }
    }

    fn run(&self, cfg: &OracleConfig<T>) -> Result<OracleResult<T>> {
        let mut trace = Vec::with_capacity(cfg.ladder.len());
        let mut best: Option<(T, StepFunction<T>)> = None;
        for k in 0..cfg.ladder.len() {
            let grid = self.grid(cfg, k);
            let disc = self.discretize(&grid, cfg.quad_order);
            let (j, z) = disc.maximize(&grid, cfg, k as u64);
            let m = z.iter().copied().fold(T::neg_infinity(), T::max);
            let values: Vec<T> = z.iter().map(|&x| (x - m).exp()).collect();
            let argmax = StepFunction::new(grid.clone(), values)?;
            let value = if j.is_nan() { T::zero() } else { j.exp() };
            trace.push(LadderStep { domain: cfg.domain(self.interval, k), grid: grid.len() - 1, ratio: ExtReal::new(value) });
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, argmax));
            }
        }
        let (value, argmax) = best.expect("ladder is nonempty");
        let ratios: Vec<T> = trace.iter().map(|s| s.ratio.value()).collect();
        Ok(OracleResult {
            best_ratio: ExtReal::new(value),
            argmax,
            diverging: diverging(&ratios, cfg.growth_factor_infinite),
            ladder_trace: trace,
        })
    }
}

/// Canonical profile `v^(1/(1-r))` pulled back through `f_c = (f v1)^p1`,
/// i.e. `(v1^(-p1) v2^p2)^(1/(p1-p2))`, for `Ces -> Ces` with `p2 < p1`.
fn embedding_profile<T: Scalar>(e: &EmbeddingProblem<T>) -> Option<(Weight<T>, T)> {
    if e.source.kind != SpaceKind::Ces || e.target.kind != SpaceKind::Ces {
        return None;
    }
    let p1: T = ratio_to_scalar(e.source.p.ratio()?);
    let p2: T = ratio_to_scalar(e.target.p.ratio()?);
    if !(p2 < p1) {
        return None;
    }
    let g = e.source.v_expr().clone().pow(-p1).times(e.target.v_expr().clone().pow(p2));
    Some((Weight::compile(&g).ok()?, T::one() / (p1 - p2)))
}

/// Infinite somewhere, or growth by at least `growth` on two consecutive rungs.
pub(crate) fn diverging<T: Scalar>(ratios: &[T], growth: T) -> bool {
    if ratios.iter().any(|r| r.is_infinite()) {
        return true;
    }
    let grew: Vec<bool> = ratios.windows(2).map(|w| w[0] > T::zero() && w[1] >= growth * w[0]).collect();
    grew.windows(2).any(|g| g[0] && g[1])
}

struct Discrete<T> {
    num: SideGrid<T>,
    den: SideGrid<T>,
    /// Cell averages of the witness profile.
    profile: Option<Vec<T>>,
}

impl<T: Scalar> Discrete<T> {
    fn cells(&self) -> usize {
        self.num.cells()
    }

    /// `ln(num / den)`; `-inf` when undefined.
    fn objective(&self, f: &[T]) -> T {
        let j = self.num.log_value(f) - self.den.log_value(f);
        if j.is_nan() {
            T::neg_infinity()
        } else {
            j
        }
    }

    fn objective_grad(&self, z: &[T], g: &mut [T], scratch: &mut [T]) -> T {
        let f: Vec<T> = z.iter().map(|&x| x.exp()).collect();
        let ln = self.num.log_value_grad(&f, g);
        let ld = self.den.log_value_grad(&f, scratch);
        for (gi, si) in g.iter_mut().zip(scratch.iter()) {
            *gi = *gi - *si;
        }
        let j = ln - ld;
        if j.is_nan() {
            T::neg_infinity()
        } else {
            j
        }
    }

    /// Indicators of `(x_i, x_j)` for subsampled grid pairs and of every single cell,
    /// plus the same shapes multiplied by the witness profile.
    fn witnesses(&self, grid: &[T], points: usize) -> Vec<Vec<T>> {
        let n = grid.len() - 1;
        let mut idx: Vec<usize> = (0..=points).map(|k| (k * n + points / 2) / points).collect();
        idx.dedup();
        let mut shapes: Vec<(usize, usize)> = (0..n).map(|i| (i, i + 1)).collect();
        for (s, &i) in idx.iter().enumerate() {
            for &j in &idx[s + 1..] {
                if j > i + 1 {
                    shapes.push((i, j));
                }
            }
        }
        let mut out = Vec::with_capacity(shapes.len() * 2);
        for &(i, j) in &shapes {
            let mut f = vec![T::zero(); n];
            f[i..j].iter_mut().for_each(|x| *x = T::one());
            if let Some(prof) = &self.profile {
                let g: Vec<T> = (0..n).map(|k| if k >= i && k < j { prof[k] } else { T::zero() }).collect();
                if g.iter().any(|&x| x > T::zero()) {
                    out.push(g);
                }
            }
            out.push(f);
        }
        out
    }

    fn maximize(&self, grid: &[T], cfg: &OracleConfig<T>, rung: u64) -> (T, Vec<T>) {
        let n = self.cells();
        let mut scored: Vec<(T, Vec<T>)> =
            self.witnesses(grid, cfg.witness_points).into_iter().map(|f| (self.objective(&f), f)).collect();
        scored.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));
        let to_log = |f: &[T]| -> Vec<T> {
            let m = f.iter().copied().fold(T::zero(), T::max);
            let floor = lit::<T>(1e-6) * m;
            f.iter().map(|&x| x.max(floor).ln()).collect()
        };
        let mut best = (T::neg_infinity(), vec![T::zero(); n]);
        if let Some((j, f)) = scored.first() {
            best = (*j, to_log(f));
            if j.is_infinite() && *j > T::zero() {
                return best;
            }
        }
        let seeds: Vec<Vec<T>> = scored.iter().take(3).map(|(_, f)| to_log(f)).collect();
        let spread = Normal::new(0.0, 1.0).expect("unit normal");
        for restart in 0..cfg.restarts {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(restart as u64).wrapping_add(rung << 32));
            let z0: Vec<T> = match restart {
                0..=2 if restart < seeds.len() => seeds[restart].clone(),
                3 => vec![T::zero(); n],
                _ if restart % 2 == 0 && !seeds.is_empty() => {
                    seeds[0].iter().map(|&z| z + lit(spread.sample(&mut rng))).collect()
                }
                _ => (0..n).map(|_| lit(2.0 * spread.sample(&mut rng))).collect(),
            };
            let (j, z) = self.ascend(z0, cfg.ascent_iters);
            if j > best.0 {
                best = (j, z);
            }
        }
        best
    }

    /// Normalized-gradient ascent on `ln ratio` in log-coordinates, halving the step on failure.
    fn ascend(&self, mut z: Vec<T>, iters: usize) -> (T, Vec<T>) {
        let n = z.len();
        let (mut g, mut scratch) = (vec![T::zero(); n], vec![T::zero(); n]);
        let mut j = self.objective_grad(&z, &mut g, &mut scratch);
        if !j.is_finite() {
            return (j, z);
        }
        let (mut eta, max_eta, min_eta): (T, T, T) = (T::one(), lit(16.0), lit(1e-9));
        let floor = lit::<T>(-Z_FLOOR);
        let mut trial = vec![T::zero(); n];
        let mut g_trial = vec![T::zero(); n];
        for _ in 0..iters {
            let m = g.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
            if !(m > lit(1e-14)) {
                break;
            }
            for i in 0..n {
                trial[i] = z[i] + eta * g[i] / m;
            }
            let top = trial.iter().copied().fold(T::neg_infinity(), T::max);
            trial.iter_mut().for_each(|x| *x = (*x - top).max(floor));
            let jt = self.objective_grad(&trial, &mut g_trial, &mut scratch);
            if jt > j {
                std::mem::swap(&mut z, &mut trial);
                std::mem::swap(&mut g, &mut g_trial);
                j = jt;
                eta = (eta + eta).min(max_eta);
                if !j.is_finite() {
                    break;
                }
            } else {
                eta = eta / lit(2.0);
                if eta < min_eta {
                    break;
                }
            }
        }
        (j, z)
    }
}
