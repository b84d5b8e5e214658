//! Quadrature rules and graded meshes shared by the norm, constant and
//! oracle evaluators.

use crate::scalar::{lit, Scalar};

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> GaussLegendre<T> {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess followed by Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0f64, x);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                let pn = if n == 1 { x } else { p1 };
                let pnm1 = if n == 1 { 1.0 } else { p0 };
                dp = n as f64 * (x * pn - pnm1) / (x * x - 1.0);
                let dx = pn / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self {
            nodes: nodes.into_iter().map(lit).collect(),
            weights: weights.into_iter().map(lit).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (b - a) / lit(2.0);
        let mid = a + half;
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        self.mapped(a, b).fold(T::zero(), |acc, (t, w)| acc + w * f(t))
    }
}

/// Abscissa handed to double-exponential integrands: the point and its
/// distances to both interval ends, the smaller of which is exact.
#[derive(Clone, Copy, Debug)]
pub struct Abscissa<T> {
    pub t: T,
    pub from_lo: T,
    pub from_hi: T,
}

const DE_MAX_LEVEL: usize = 10;

/// Tanh-sinh quadrature on a finite `(a, b)`; tolerates integrable endpoint
/// singularities. Non-finite integrand values are dropped.
pub fn tanh_sinh<T: Scalar, F: FnMut(Abscissa<T>) -> T>(a: T, b: T, tol: T, mut f: F) -> T {
    if !(a < b) {
        return T::zero();
    }
    let half = (b - a) / lit(2.0);
    let pi2 = T::FRAC_PI_2();
    let two = lit::<T>(2.0);
    let u_max: T = lit(6.5);
    let centre = {
        let x = Abscissa { t: a + half, from_lo: half, from_hi: half };
        let v = f(x) * pi2 * half;
        if v.is_finite() { v } else { T::zero() }
    };
    let mut eval = |u: T| -> T {
        // Symmetric pair at +-u.
        let s = pi2 * u.sinh();
        let e = (-two * s).exp();
        let c = two * e / (T::one() + e); // 1 - tanh(s)
        let w = pi2 * u.cosh() * lit::<T>(4.0) * e / ((T::one() + e) * (T::one() + e));
        let d = half * c;
        if d.is_zero() || w.is_zero() {
            return T::zero();
        }
        let mut acc = T::zero();
        let left = Abscissa { t: a + d, from_lo: d, from_hi: (b - a) - d };
        let right = Abscissa { t: b - d, from_lo: (b - a) - d, from_hi: d };
        for x in [left, right] {
            let v = f(x) * w * half;
            if v.is_finite() {
                acc = acc + v;
            }
        }
        acc
    };
    let mut h = T::one();
    let mut sum = centre;
    let mut k = 1;
    loop {
        let u = h * lit(k as f64);
        if u > u_max {
            break;
        }
        sum = sum + eval(u);
        k += 1;
    }
    let mut estimate = sum * h;
    for _level in 1..DE_MAX_LEVEL {
        h = h / two;
        let mut k = 1;
        loop {
            let u = h * lit(k as f64);
            if u > u_max {
                break;
            }
            sum = sum + eval(u);
            k += 2;
        }
        let next = sum * h;
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= tol * next.abs() || next.is_zero() {
            break;
        }
    }
    estimate
}

/// Exp-sinh quadrature on `(a, inf)`.
pub fn exp_sinh<T: Scalar, F: FnMut(Abscissa<T>) -> T>(a: T, scale: T, tol: T, mut f: F) -> T {
    let pi2 = T::FRAC_PI_2();
    let two = lit::<T>(2.0);
    let u_max: T = lit(6.0);
    let mut eval = |u: T| -> T {
        let s = pi2 * u.sinh();
        if s > lit(700.0) || s < lit(-700.0) {
            return T::zero();
        }
        let d = scale * s.exp();
        let w = pi2 * u.cosh() * d;
        if d.is_zero() || !d.is_finite() {
            return T::zero();
        }
        let v = f(Abscissa { t: a + d, from_lo: d, from_hi: T::infinity() }) * w;
        if v.is_finite() { v } else { T::zero() }
    };
    let mut h = T::one() / two;
    let mut sum = eval(T::zero());
    let mut k = 1i64;
    loop {
        let u = h * lit(k as f64);
        if u > u_max {
            break;
        }
        sum = sum + eval(u) + eval(-u);
        k += 1;
    }
    let mut estimate = sum * h;
    for _level in 1..DE_MAX_LEVEL {
        h = h / two;
        let mut k = 1i64;
        loop {
            let u = h * lit(k as f64);
            if u > u_max {
                break;
            }
            sum = sum + eval(u) + eval(-u);
            k += 2;
        }
        let next = sum * h;
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= tol * next.abs() || next.is_zero() {
            break;
        }
    }
    estimate
}

/// Mesh on `[lo, hi]` graded geometrically toward both ends.
///
/// The first cell next to `lo` has width `gap_lo` (similarly `gap_hi`), and
/// cell widths grow geometrically up to the midpoint. Returns `cells + 1`
/// strictly increasing points including both ends.
pub fn graded_mesh<T: Scalar>(lo: T, hi: T, cells: usize, gap_lo: T, gap_hi: T) -> Vec<T> {
    assert!(lo < hi && hi.is_finite(), "graded mesh needs a bounded nonempty range");
    let cells = cells.max(2);
    let half = (hi - lo) / lit(2.0);
    let g_lo = gap_lo.min(half).max(half * T::epsilon());
    let g_hi = gap_hi.min(half).max(half * T::epsilon());
    let span_lo = (half / g_lo).ln().max(T::zero());
    let span_hi = (half / g_hi).ln().max(T::zero());
    let total = span_lo + span_hi;
    let mut n_lo = if total.is_zero() {
        cells / 2
    } else {
        (lit::<T>(cells as f64) * span_lo / total).round().to_usize().unwrap_or(1)
    };
    n_lo = n_lo.clamp(1, cells - 1);
    let n_hi = cells - n_lo;

    let offsets = |n: usize, g: T| -> Vec<T> {
        // offsets 0 = o_0 < o_1 = g < ... < o_n = half
        let mut out = Vec::with_capacity(n + 1);
        out.push(T::zero());
        if n == 1 || g >= half {
            for k in 1..=n {
                out.push(half * lit(k as f64) / lit(n as f64));
            }
            return out;
        }
        let ratio = ((half / g).ln() / lit((n - 1) as f64)).exp();
        let mut o = g;
        for _ in 1..n {
            out.push(o);
            o = o * ratio;
        }
        out.push(half);
        out
    };
    let left = offsets(n_lo, g_lo);
    let right = offsets(n_hi, g_hi);
    let mid = lo + half;
    let mut pts = Vec::with_capacity(cells + 1);
    for &o in &left[..left.len() - 1] {
        pts.push(lo + o);
    }
    pts.push(mid);
    for &o in right[..right.len() - 1].iter().rev() {
        pts.push(hi - o);
    }
    pts.dedup_by(|x, y| !(*y < *x));
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = GaussLegendre::<f64>::new(8);
        let v = gl.integrate(0.0, 2.0, |x| x.powi(15));
        assert_relative_eq!(v, 2f64.powi(16) / 16.0, max_relative = 1e-13);
        let gl16 = GaussLegendre::<f64>::new(16);
        let w: f64 = gl16.mapped(-1.0, 1.0).map(|(_, w)| w).sum();
        assert_relative_eq!(w, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        let v = tanh_sinh(0.0, 1.0, 1e-12, |x: Abscissa<f64>| x.from_lo.powf(-0.9));
        assert_relative_eq!(v, 10.0, max_relative = 1e-8);
        let v = tanh_sinh(1.0, 2.0, 1e-12, |x: Abscissa<f64>| x.from_hi.powf(-0.5));
        assert_relative_eq!(v, 2.0, max_relative = 1e-10);
    }

    #[test]
    fn exp_sinh_on_half_line() {
        let v = exp_sinh(1.0, 1.0, 1e-12, |x: Abscissa<f64>| x.t.powi(-2));
        assert_relative_eq!(v, 1.0, max_relative = 1e-10);
        let v = exp_sinh(0.0, 1.0, 1e-12, |x: Abscissa<f64>| (-x.t).exp());
        assert_relative_eq!(v, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn graded_mesh_shape() {
        let m = graded_mesh(0.0f64, 1.0, 32, 1e-6, 1e-3);
        assert_eq!(m.first(), Some(&0.0));
        assert_eq!(m.last(), Some(&1.0));
        assert!(m.windows(2).all(|w| w[0] < w[1]));
        assert_relative_eq!(m[1], 1e-6, max_relative = 1e-12);
        assert_relative_eq!(1.0 - m[m.len() - 2], 1e-3, max_relative = 1e-9);
    }
}
