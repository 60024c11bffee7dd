//! Adaptive Gauss–Kronrod quadrature.
//!
//! Global adaptive bisection driven by a 7-point Gauss / 15-point Kronrod
//! pair with the usual QUADPACK error rescaling. Refinement is deterministic:
//! the same integrand and settings always produce the same subdivision.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and limits shared by every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth of any single segment.
    pub max_refinement_depth: u32,
    /// Spatial dimension of the envelope integrals (1 or 2).
    pub dimension: usize,
    /// Initial number of uniform angular panels for `d = 2`.
    pub angular_points: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_refinement_depth: 100,
            dimension: 1,
            angular_points: 8,
        }
    }
}

impl QuadratureSettings {
    pub fn with_dimension(mut self, d: usize) -> Self {
        self.dimension = d;
        self
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(crate::Error::invalid(
                "quadrature settings",
                "tolerances must be positive",
            ));
        }
        if !(1..=2).contains(&self.dimension) {
            return Err(crate::Error::invalid(
                "quadrature settings",
                format!("dimension {} not supported (1 or 2)", self.dimension),
            ));
        }
        if self.angular_points < 4 {
            return Err(crate::Error::invalid(
                "quadrature settings",
                "angular rule needs at least 4 points",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    /// `false` when the tolerance was not met within the refinement limits.
    pub converged: bool,
    pub evaluations: usize,
}

impl QuadResult {
    pub fn zero() -> Self {
        Self {
            value: 0.0,
            abs_error: 0.0,
            converged: true,
            evaluations: 0,
        }
    }

    /// Combine two results over disjoint domains.
    pub fn merge(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            abs_error: self.abs_error + other.abs_error,
            converged: self.converged && other.converged,
            evaluations: self.evaluations + other.evaluations,
        }
    }

    pub fn scale(self, c: f64) -> QuadResult {
        QuadResult {
            value: self.value * c,
            abs_error: self.abs_error * c.abs(),
            ..self
        }
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One Gauss–Kronrod panel on `[a, b]`: (integral, error estimate).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_k = f_center * WGK[7];
    let mut res_g = f_center * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let integral = res_k * half;
    let err = rescale_error(
        (res_k - res_g) * half,
        res_abs * half.abs(),
        res_asc * half.abs(),
    );
    (integral, err)
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
    order: u64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.order.cmp(&self.order))
    }
}

const MAX_SEGMENTS: usize = 4000;

/// Integrate `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, s: &QuadratureSettings) -> QuadResult {
    integrate_with_breaks(f, &[a, b], s)
}

/// Integrate over `[points[0], points[last]]`, starting from the given
/// subdivision. Interior points should sit on kinks or singularities.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    s: &QuadratureSettings,
) -> QuadResult {
    let mut pts: Vec<f64> = points.iter().copied().filter(|p| p.is_finite()).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if pts.len() < 2 {
        return QuadResult::zero();
    }

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut evals = 0usize;
    let mut order = 0u64;
    let mut finished_err = 0.0;
    let mut finished_val = 0.0;

    for w in pts.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1]);
        evals += 15;
        total += v;
        total_err += e;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
            depth: 0,
            order,
        });
        order += 1;
    }

    let tol = |total: f64| s.abs_tol.max(s.rel_tol * total.abs());
    let mut converged = total_err <= tol(total);

    while !converged && heap.len() < MAX_SEGMENTS {
        let Some(seg) = heap.pop() else { break };
        let mid = 0.5 * (seg.a + seg.b);
        if seg.depth >= s.max_refinement_depth || mid <= seg.a || mid >= seg.b {
            finished_err += seg.error;
            finished_val += seg.value;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let (v1, e1) = gk15(&f, seg.a, mid);
        let (v2, e2) = gk15(&f, mid, seg.b);
        evals += 30;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        for (a, b, v, e) in [(seg.a, mid, v1, e1), (mid, seg.b, v2, e2)] {
            heap.push(Segment {
                a,
                b,
                value: v,
                error: e,
                depth: seg.depth + 1,
                order,
            });
            order += 1;
        }
        converged = total_err <= tol(total);
    }

    // Recompute the sums from the segments to shed accumulated rounding.
    let value = heap.iter().map(|s| s.value).sum::<f64>() + finished_val;
    let abs_error = heap.iter().map(|s| s.error).sum::<f64>() + finished_err;
    QuadResult {
        value,
        abs_error,
        converged: abs_error <= tol(value),
        evaluations: evals,
    }
}

/// `∫_a^∞ f`, via the substitution `r = a + (1 - u)/u` onto `(0, 1]`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    s: &QuadratureSettings,
) -> QuadResult {
    let g = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let r = a + (1.0 - u) / u;
        let v = f(r) / (u * u);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, s)
}

/// Partial integrals over geometrically expanding shells `[R_k, 2 R_k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellStudy {
    /// Outer radius of every shell.
    pub radii: Vec<f64>,
    /// Cumulative integral up to each radius.
    pub partial_sums: Vec<f64>,
    pub converged: bool,
    /// Geometric projection of the remainder beyond the last shell
    /// (`+∞` when the increments do not decay).
    pub tail_estimate: f64,
    pub rel_tol: f64,
}

impl ShellStudy {
    pub fn limit_estimate(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0) + self.tail_estimate
    }

    /// Increments `S_k - S_{k-1}` between consecutive shells.
    pub fn increments(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.partial_sums
            .iter()
            .map(|&s| {
                let d = s - prev;
                prev = s;
                d
            })
            .collect()
    }
}

/// Shell-doubling convergence study of `∫_start^∞`.
///
/// `shell(a, b)` must return the integral over `[a, b]`. The integral is
/// declared convergent once the shell increments decay geometrically and
/// the projected remainder drops below `rel_tol` times the partial sum.
pub fn shell_study<F: FnMut(f64, f64) -> f64>(
    mut shell: F,
    start: f64,
    rel_tol: f64,
    max_doublings: usize,
) -> ShellStudy {
    const MIN_DOUBLINGS: usize = 4;
    let mut radii = Vec::new();
    let mut sums = Vec::new();
    let mut incs: Vec<f64> = Vec::new();
    let mut total = 0.0;
    let mut a = start;
    let mut converged = false;
    let mut tail = f64::INFINITY;
    for k in 0..max_doublings {
        let b = 2.0 * a;
        let inc = shell(a, b);
        total += inc;
        radii.push(b);
        sums.push(total);
        incs.push(inc);
        a = b;
        if k + 1 < MIN_DOUBLINGS || !total.is_finite() {
            continue;
        }
        let n = incs.len();
        let last = &incs[n - 3..];
        let ratios: Vec<f64> = last.windows(2).map(|w| w[1] / w[0]).collect();
        let inc_last = incs[n - 1];
        if inc_last.abs() <= f64::EPSILON * total.abs() {
            converged = true;
            tail = 0.0;
            break;
        }
        if ratios.iter().all(|r| r.is_finite() && *r >= 0.0 && *r < 1.0) {
            let rho = ratios.iter().copied().fold(0.0, f64::max);
            let projected = inc_last * rho / (1.0 - rho);
            if projected.abs() <= rel_tol * total.abs() {
                converged = true;
                tail = projected;
                break;
            }
        }
    }
    ShellStudy {
        radii,
        partial_sums: sums,
        converged,
        tail_estimate: tail,
        rel_tol,
    }
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums; returns
/// the accelerated limit estimate.
pub fn wynn_epsilon(partial_sums: &[f64]) -> f64 {
    let n = partial_sums.len();
    if n < 3 {
        return partial_sums.last().copied().unwrap_or(0.0);
    }
    // eps[k] holds column k of the epsilon table for the current diagonal.
    let mut prev: Vec<f64> = vec![0.0; n + 1];
    let mut cur: Vec<f64> = partial_sums.to_vec();
    let mut best = partial_sums[n - 1];
    let mut best_delta = f64::INFINITY;
    let mut column = 0usize;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            let p = if column == 0 { 0.0 } else { prev[i + 1] };
            if diff == 0.0 {
                next.push(f64::INFINITY);
            } else {
                next.push(p + 1.0 / diff);
            }
        }
        column += 1;
        // Even columns carry limit estimates.
        if column % 2 == 0 && next.len() >= 2 {
            let m = next.len();
            let delta = (next[m - 1] - next[m - 2]).abs();
            if next[m - 1].is_finite() && delta < best_delta {
                best_delta = delta;
                best = next[m - 1];
            }
        }
        if next.iter().any(|v| !v.is_finite()) {
            break;
        }
        prev = cur;
        cur = next;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_rule_is_exact_for_degree_22() {
        for deg in [0, 1, 2, 7, 13, 22] {
            let (v, _) = gk15(&|x: f64| x.powi(deg), 0.0, 1.0);
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((v - exact).abs() < 1e-14, "degree {deg}: {v} vs {exact}");
        }
        let wsum: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        assert!((wsum - 2.0).abs() < 1e-15);
        let gsum: f64 = WG[3] + 2.0 * (WG[0] + WG[1] + WG[2]);
        assert!((gsum - 2.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let s = QuadratureSettings::default();
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &s);
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn kinks_at_breakpoints() {
        let s = QuadratureSettings::default();
        let r = integrate_with_breaks(|x: f64| (x - 0.3).abs(), &[0.0, 0.3, 1.0], &s);
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-14);
        assert_eq!(r.evaluations, 30);
    }

    #[test]
    fn semi_infinite_substitution() {
        let s = QuadratureSettings::default();
        let r = integrate_to_infinity(|x: f64| 1.0 / (x * x), 2.0, &s);
        assert!((r.value - 0.5).abs() < 1e-10);
        let r = integrate_to_infinity(|x: f64| (-x).exp(), 0.0, &s);
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn shells_separate_convergent_and_divergent_tails() {
        let s = QuadratureSettings::default();
        let conv = shell_study(
            |a, b| integrate(|x: f64| x.powf(-1.5), a, b, &s).value,
            1.0,
            1e-3,
            200,
        );
        assert!(conv.converged);
        assert!((conv.limit_estimate() - 2.0).abs() < 2e-3 * 2.0);

        let div = shell_study(
            |a, b| integrate(|x: f64| 1.0 / x, a, b, &s).value,
            1.0,
            1e-3,
            60,
        );
        assert!(!div.converged);
        assert!(div.increments().windows(2).all(|w| w[1] > 0.0 && w[0] > 0.0));
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // log 2 = 1 - 1/2 + 1/3 - ...
        let mut s = 0.0;
        let sums: Vec<f64> = (1..=20)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                s
            })
            .collect();
        let acc = wynn_epsilon(&sums);
        assert!((acc - 2f64.ln()).abs() < 1e-10, "{acc}");
    }
}
