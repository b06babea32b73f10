//! Exponential loss `L_c(x) = Σ exp(−c x_i)`, the softmax potential
//! `H_c(q) = (1/c) log L_c(Mq)`, near-minimizer certification, and the
//! Frank–Wolfe and multiplicative-weights solvers over simplex weights.
//!
//! Losses are handled in log space throughout; `c` up to 50 with components
//! in `[−1, 1]` would otherwise underflow.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::csv::fmt_f64;
use crate::error::{Error, Result};
use crate::filling::SolveBudget;
use crate::lexcore::{distortion_full, sorted_values, Point};
use crate::setrep::{check_simplex, FiniteSet, GroundSet, PolyPath, VPolytope};

/// Largest finite value of `ln(f64::MAX)`.
const LN_MAX: f64 = 709.782_712_893_384;

/// Inverse temperature and near-minimizer slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParams {
    pub c: f64,
    pub gamma: f64,
}

impl LossParams {
    pub fn new(c: f64, gamma: f64) -> Result<Self> {
        check_c(c)?;
        check_gamma(gamma)?;
        Ok(Self { c, gamma })
    }
}

fn check_c(c: f64) -> Result<()> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("c must be finite and >= 0, got {c}")));
    }
    Ok(())
}

fn check_positive_c(c: f64) -> Result<()> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("c must be finite and > 0, got {c}")));
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("gamma must lie in [0,1), got {gamma}")));
    }
    Ok(())
}

/// `ln L_c(x)`, shifted by the smallest component. Terms are summed in
/// sorted order so the result does not depend on the coordinate order.
pub fn log_exp_loss(x: &[f64], c: f64) -> f64 {
    let sorted = sorted_values(x);
    let m = sorted[0];
    // largest components give the smallest terms; add those first
    let total: f64 = sorted.iter().rev().map(|v| (-c * (v - m)).exp()).sum();
    -c * m + total.ln()
}

/// `L_c(x)`. Fails with [`Error::Overflow`] when the value is not
/// representable; tiny values underflow to 0.
pub fn exp_loss(x: &Point, c: f64) -> Result<f64> {
    check_c(c)?;
    if c == 0.0 {
        return Ok(x.dim() as f64);
    }
    let ln = log_exp_loss(x.coords(), c);
    if ln > LN_MAX {
        return Err(Error::Overflow(ln));
    }
    Ok(ln.exp())
}

/// Softmax of `−c·y`, shifted by the largest exponent.
pub(crate) fn softmin_weights(y: &[f64], c: f64) -> Vec<f64> {
    let m = y.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = y.iter().map(|v| (-c * (v - m)).exp()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// `H_c(q) = (1/c) log Σ exp(−c eᵢᵀMq)`.
pub fn softmax_potential(poly: &VPolytope, q: &[f64], c: f64) -> Result<f64> {
    check_positive_c(c)?;
    check_simplex(q, poly.cols())?;
    Ok(potential_unchecked(poly, q, c))
}

fn potential_unchecked(poly: &VPolytope, q: &[f64], c: f64) -> f64 {
    log_exp_loss(&mq(poly, q), c) / c
}

fn mq(poly: &VPolytope, q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; poly.rows()];
    poly.apply_unchecked(q, &mut out);
    out
}

/// `∇H_c(q) = −Mᵀp` with `p = softmax(−cMq)`.
pub fn softmax_gradient(poly: &VPolytope, q: &[f64], c: f64) -> Result<Vec<f64>> {
    check_positive_c(c)?;
    check_simplex(q, poly.cols())?;
    Ok(gradient_unchecked(poly, q, c))
}

fn gradient_unchecked(poly: &VPolytope, q: &[f64], c: f64) -> Vec<f64> {
    let p = softmin_weights(&mq(poly, q), c);
    poly.apply_transpose(&p).into_iter().map(|g| -g).collect()
}

/// `γ·exp(−c·‖X‖∞)`.
pub fn near_min_threshold(c: f64, gamma: f64, norm_bound: f64) -> Result<f64> {
    check_c(c)?;
    check_gamma(gamma)?;
    if !(norm_bound >= 0.0) {
        return Err(Error::InvalidParameter(format!("norm bound must be >= 0, got {norm_bound}")));
    }
    Ok(gamma * (-c * norm_bound).exp())
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of a convex function on `[lo, hi]` down to an
/// interval of width `tol`.
pub(crate) fn golden_min(lo: f64, hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn segment_coords(path: &PolyPath, seg: usize, lambda: f64) -> Vec<f64> {
    let a = path.vertices()[seg].coords();
    let b = path.vertices()[seg + 1].coords();
    a.iter()
        .zip(b)
        .map(|(x, y)| lambda * y + (1.0 - lambda) * x)
        .collect()
}

/// `ln Σ exp(−c v)` over a possibly empty list (−∞ when empty).
fn log_sum(values: &[f64], c: f64) -> f64 {
    if values.is_empty() {
        f64::NEG_INFINITY
    } else {
        log_exp_loss(values, c)
    }
}

/// Components of `x` and `z` left over after removing the values the two
/// share (as multisets).
fn unshared(x: &[f64], z: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (xs, zs) = (sorted_values(x), sorted_values(z));
    let (mut i, mut j) = (0, 0);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    while i < xs.len() || j < zs.len() {
        match (xs.get(i), zs.get(j)) {
            (Some(u), Some(v)) if u == v => {
                i += 1;
                j += 1;
            }
            (Some(u), Some(v)) if u < v => {
                a.push(*u);
                i += 1;
            }
            (Some(_), Some(v)) => {
                b.push(*v);
                j += 1;
            }
            (Some(u), None) => {
                a.push(*u);
                i += 1;
            }
            (None, Some(v)) => {
                b.push(*v);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    (a, b)
}

/// Compares `L_c(x)` with `L_c(z)`. Shared components cancel before
/// summing, so a difference in a large component is not swamped by equal
/// small ones.
pub fn cmp_exp_loss(x: &[f64], z: &[f64], c: f64) -> Ordering {
    let (a, b) = unshared(x, z);
    log_sum(&a, c).total_cmp(&log_sum(&b, c))
}

/// `L_c(x) ≤ L_c(z) + exp(log_slack)`, with shared components cancelled.
pub fn loss_within(x: &[f64], z: &[f64], c: f64, log_slack: f64) -> bool {
    let (a, b) = unshared(x, z);
    log_sum(&a, c) <= log_add_exp(log_sum(&b, c), log_slack)
}

/// Sign-carrying derivative of `L_c` along a segment: positive when the loss
/// decreases as λ grows.
fn descent_direction(a: &[f64], b: &[f64], lambda: f64, c: f64) -> f64 {
    let x: Vec<f64> = a.iter().zip(b).map(|(u, v)| lambda * v + (1.0 - lambda) * u).collect();
    let m = x.iter().copied().fold(f64::INFINITY, f64::min);
    x.iter()
        .zip(a.iter().zip(b))
        .map(|(xi, (u, v))| (v - u) * (-c * (xi - m)).exp())
        .sum()
}

/// Global minimizer of `L_c` over a path. The loss is convex along each
/// segment, so the minimizer is found by bisecting on the sign of its
/// derivative (golden-section search stalls near 1e-8 on flat minima).
/// Endpoints win ties against interior points, earlier segments against
/// later ones.
pub fn minimize_on_path(path: &PolyPath, c: f64) -> Result<Point> {
    check_positive_c(c)?;
    let mut best: Option<Vec<f64>> = None;
    for seg in 0..path.segments() {
        let a = path.vertices()[seg].coords();
        let b = path.vertices()[seg + 1].coords();
        let mut candidates = vec![0.0, 1.0];
        if descent_direction(a, b, 0.0, c) > 0.0 && descent_direction(a, b, 1.0, c) < 0.0 {
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            loop {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if descent_direction(a, b, mid, c) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            candidates.push(lo);
            candidates.push(hi);
        }
        for lambda in candidates {
            let x = segment_coords(path, seg, lambda);
            if best.as_ref().is_none_or(|b| cmp_exp_loss(&x, b, c) == Ordering::Less) {
                best = Some(x);
            }
        }
    }
    Ok(Point::from_finite(best.expect("path has a segment")))
}

/// Index of the `L_c` minimizer of a finite set; ties go to the lowest index.
pub fn argmin_on_finite(set: &FiniteSet, c: f64) -> Result<usize> {
    check_c(c)?;
    let pts = set.points();
    let mut best = 0;
    for (i, p) in pts.iter().enumerate().skip(1) {
        if cmp_exp_loss(p.coords(), pts[best].coords(), c) == Ordering::Less {
            best = i;
        }
    }
    Ok(best)
}

pub fn minimize_on_finite(set: &FiniteSet, c: f64) -> Result<Point> {
    Ok(set.points()[argmin_on_finite(set, c)?].clone())
}

/// Minimizes `H_c` over the simplex: best lattice point at `resolution`,
/// then `sweeps` rounds of exact line searches moving mass between pairs of
/// columns. Returns the weights and the potential value.
pub fn minimize_potential(
    poly: &VPolytope,
    c: f64,
    resolution: usize,
    sweeps: usize,
) -> Result<(Vec<f64>, f64)> {
    check_positive_c(c)?;
    let set = GroundSet::Polytope(poly.clone());
    let mut best: Option<(Vec<f64>, f64)> = None;
    set.for_each_grid_point(resolution, |y, param| {
        let v = log_exp_loss(y, c) / c;
        if best.as_ref().is_none_or(|b| v < b.1) {
            if let crate::setrep::GridParam::Simplex(q) = param {
                best = Some((q.to_vec(), v));
            }
        }
    })?;
    let (mut q, mut val) = best.expect("simplex lattice is nonempty");
    let cols = poly.cols();
    for _ in 0..sweeps {
        let before = val;
        for i in 0..cols {
            for j in 0..cols {
                if i == j || q[i] <= 0.0 {
                    continue;
                }
                let base = q.clone();
                let shift = |t: f64| {
                    let mut w = base.clone();
                    w[i] -= t;
                    w[j] += t;
                    w[i] = w[i].max(0.0);
                    w
                };
                let (t, v) = golden_min(0.0, base[i], 1e-13, |t| {
                    potential_unchecked(poly, &shift(t), c)
                });
                if v < val {
                    q = shift(t);
                    val = v;
                }
            }
        }
        if before - val <= 1e-15 {
            break;
        }
    }
    Ok((q, val))
}

/// Realizes a near minimizer `x_{c,γ}`: exact on finite sets and paths; on
/// polytopes the better of a Frank–Wolfe run and the refined lattice
/// minimizer; on the curved set the best grid point.
pub fn realize_near_min(set: &GroundSet, params: LossParams, budget: SolveBudget) -> Result<Point> {
    match set {
        GroundSet::Finite(s) => minimize_on_finite(s, params.c),
        GroundSet::Path(p) => {
            if params.c == 0.0 {
                return Ok(p.vertices()[0].clone());
            }
            minimize_on_path(p, params.c)
        }
        GroundSet::Polytope(poly) => {
            if params.c == 0.0 {
                return Ok(poly.columns()[0].clone());
            }
            let run = frank_wolfe(poly, params.c, 2000)?;
            let fw = mq(poly, &run.q_bar);
            let (q, _) = minimize_potential(poly, params.c, budget.resolution, 50)?;
            let lattice = mq(poly, &q);
            let pick = if cmp_exp_loss(&lattice, &fw, params.c) != Ordering::Greater {
                lattice
            } else {
                fw
            };
            Ok(Point::from_finite(pick))
        }
        GroundSet::Curved(_) => {
            let mut best: Option<Vec<f64>> = None;
            set.for_each_grid_point(budget.resolution, |y, _| {
                if best.as_ref().is_none_or(|b| cmp_exp_loss(y, b, params.c) == Ordering::Less) {
                    best = Some(y.to_vec());
                }
            })?;
            Ok(Point::from_finite(best.expect("grid is nonempty")))
        }
    }
}

/// Outcome of a near-minimizer check. Values are kept in log space as
/// well, since the losses themselves often underflow.
#[derive(Debug, Clone, PartialEq)]
pub struct NearMinCert {
    pub x: Point,
    pub loss: f64,
    pub inf_estimate: f64,
    pub threshold: f64,
    pub log_loss: f64,
    pub log_inf_estimate: f64,
    pub passed: bool,
}

pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(γ e^{−c·norm})`, −∞ for γ = 0.
pub fn log_threshold(c: f64, gamma: f64, norm: f64) -> f64 {
    if gamma == 0.0 {
        f64::NEG_INFINITY
    } else {
        gamma.ln() - c * norm
    }
}

/// Checks `L_c(x) ≤ inf L_c + γ exp(−c‖X‖∞)`, with the infimum estimated by
/// [`realize_near_min`] (exact on finite sets and paths).
pub fn certify_near_min(
    set: &GroundSet,
    x: &Point,
    params: LossParams,
    budget: SolveBudget,
) -> Result<NearMinCert> {
    if set.contains(x) == Some(false) {
        return Err(Error::NotInSet);
    }
    let c = params.c;
    let log_loss = log_exp_loss(x.coords(), c);
    let minimizer = realize_near_min(set, LossParams { gamma: 0.0, ..params }, budget)?;
    let log_inf = log_exp_loss(minimizer.coords(), c).min(log_loss);
    let norm = set.linf_norm();
    let threshold = near_min_threshold(c, params.gamma, norm)?;
    let passed = loss_within(x.coords(), minimizer.coords(), c, log_threshold(c, params.gamma, norm));
    Ok(NearMinCert {
        x: x.clone(),
        loss: log_loss.exp(),
        inf_estimate: log_inf.exp(),
        threshold,
        log_loss,
        log_inf_estimate: log_inf,
        passed,
    })
}

/// Learning-rate rule for multiplicative weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    /// `η_t = η` for every round.
    Constant(f64),
    /// `η_t = c/t`.
    OverT(f64),
    /// Frank–Wolfe on `H_c` with step `1/t`.
    FrankWolfe(f64),
}

impl Schedule {
    pub fn tag(&self) -> &'static str {
        match self {
            Schedule::Constant(_) => "constant",
            Schedule::OverT(_) => "c/t",
            Schedule::FrankWolfe(_) => "fw",
        }
    }

    /// The `c` whose potential `H_c` measures progress for this run; for a
    /// constant rate the rate itself.
    pub fn temperature(&self) -> f64 {
        match *self {
            Schedule::Constant(v) | Schedule::OverT(v) | Schedule::FrankWolfe(v) => v,
        }
    }
}

/// Iterates and diagnostics of a solver run (rounds are 1-based in the
/// text, 0-based in the vectors).
#[derive(Debug, Clone, PartialEq)]
pub struct SolverRun {
    /// Column chosen in each round; `q_t` is the matching simplex vertex.
    pub q_index: Vec<usize>,
    /// Row distribution used in each round.
    pub p_iterates: Vec<Vec<f64>>,
    /// Running average `q̄_t` after each round.
    pub q_bar_history: Vec<Vec<f64>>,
    pub q_bar: Vec<f64>,
    pub p_bar: Vec<f64>,
    /// `H_c(q̄_t)` minus the best Frank–Wolfe lower bound seen so far.
    pub gap_history: Vec<f64>,
    pub schedule: Schedule,
}

impl SolverRun {
    pub fn rounds(&self) -> usize {
        self.q_index.len()
    }

    /// Weight vector `q_t` of round `t` (1-based).
    pub fn q_iterate(&self, t: usize) -> Vec<f64> {
        let mut q = vec![0.0; self.q_bar.len()];
        q[self.q_index[t - 1]] = 1.0;
        q
    }

    /// `Mq̄_T`.
    pub fn output(&self, poly: &VPolytope) -> Point {
        Point::from_finite(mq(poly, &self.q_bar))
    }

    /// One row per round: `t,q_index,gap,linf_to_lexmax,distortion,schedule`.
    /// Distance columns stay empty without a reference point.
    pub fn to_csv(&self, poly: &VPolytope, reference: Option<&Point>) -> String {
        let mut out = String::from("t,q_index,gap,linf_to_lexmax,distortion,schedule\n");
        for t in 0..self.rounds() {
            let y = Point::from_finite(mq(poly, &self.q_bar_history[t]));
            let (dist, dist_k) = match reference {
                Some(r) => (
                    r.linf_distance(&y).map(fmt_f64).unwrap_or_default(),
                    distortion_full(r, &y).map(fmt_f64).unwrap_or_default(),
                ),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                t + 1,
                self.q_index[t] + 1,
                fmt_f64(self.gap_history[t]),
                dist,
                dist_k,
                self.schedule.tag()
            );
        }
        out
    }
}

fn check_rounds(t: usize) -> Result<()> {
    if t == 0 {
        return Err(Error::InvalidParameter("T must be at least 1".into()));
    }
    Ok(())
}

/// Index of the largest entry; ties go to the lowest index.
fn argmax_first(v: &[f64]) -> usize {
    let mut best = 0;
    for (j, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = j;
        }
    }
    best
}

/// Gap bookkeeping shared by both solvers: after each round, `H_c(q̄_t)`
/// minus the best linearization lower bound from the points `q̄_0 … q̄_{t−1}`.
struct GapTracker<'a> {
    poly: &'a VPolytope,
    c: f64,
    lower: f64,
}

impl GapTracker<'_> {
    fn observe(&mut self, q_prev: &[f64], q_now: &[f64]) -> f64 {
        let h_prev = potential_unchecked(self.poly, q_prev, self.c);
        let g = gradient_unchecked(self.poly, q_prev, self.c);
        let inner: f64 = g.iter().zip(q_prev).map(|(a, b)| a * b).sum();
        let min_g = g.iter().copied().fold(f64::INFINITY, f64::min);
        self.lower = self.lower.max(h_prev + min_g - inner);
        potential_unchecked(self.poly, q_now, self.c) - self.lower
    }
}

/// Frank–Wolfe on `H_c` over the simplex with step `1/t`. Round 1 uses the
/// uniform row distribution (the softmax of an empty sum), so the iterates
/// coincide with multiplicative weights under `η_t = c/t`.
pub fn frank_wolfe(poly: &VPolytope, c: f64, rounds: usize) -> Result<SolverRun> {
    check_positive_c(c)?;
    check_rounds(rounds)?;
    let (m, n) = (poly.rows(), poly.cols());
    let mut q_bar = vec![1.0 / n as f64; n];
    let mut gap = GapTracker {
        poly,
        c,
        lower: f64::NEG_INFINITY,
    };
    let mut run = SolverRun {
        q_index: Vec::with_capacity(rounds),
        p_iterates: Vec::with_capacity(rounds),
        q_bar_history: Vec::with_capacity(rounds),
        q_bar: Vec::new(),
        p_bar: vec![0.0; m],
        gap_history: Vec::with_capacity(rounds),
        schedule: Schedule::FrankWolfe(c),
    };
    for t in 1..=rounds {
        let p = if t == 1 {
            vec![1.0 / m as f64; m]
        } else {
            softmin_weights(&mq(poly, &q_bar), c)
        };
        let grad: Vec<f64> = poly.apply_transpose(&p).into_iter().map(|g| -g).collect();
        // argmin of the gradient, lowest index on ties
        let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
        let j = argmax_first(&neg);
        let prev = q_bar.clone();
        let step = 1.0 / t as f64;
        for (i, w) in q_bar.iter_mut().enumerate() {
            *w *= 1.0 - step;
            if i == j {
                *w += step;
            }
        }
        run.gap_history.push(gap.observe(&prev, &q_bar));
        for (a, b) in run.p_bar.iter_mut().zip(&p) {
            *a += (b - *a) / t as f64;
        }
        run.q_index.push(j);
        run.p_iterates.push(p);
        run.q_bar_history.push(q_bar.clone());
    }
    run.q_bar = q_bar;
    Ok(run)
}

/// Multiplicative weights for the zero-sum game with payoff `M`: the column
/// player best-responds to `p_t`, the row player plays
/// `p_{t+1} ∝ exp(−η_t M Σ_{s≤t} q_s)` starting from uniform.
pub fn multiplicative_weights(poly: &VPolytope, schedule: Schedule, rounds: usize) -> Result<SolverRun> {
    check_rounds(rounds)?;
    let rate = match schedule {
        Schedule::Constant(eta) | Schedule::OverT(eta) => eta,
        Schedule::FrankWolfe(_) => {
            return Err(Error::InvalidParameter(
                "multiplicative weights needs a constant or c/t schedule".into(),
            ))
        }
    };
    check_positive_c(rate)?;
    let (m, n) = (poly.rows(), poly.cols());
    let mut counts = vec![0u64; n];
    let mut p = vec![1.0 / m as f64; m];
    let mut gap = GapTracker {
        poly,
        c: rate,
        lower: f64::NEG_INFINITY,
    };
    let mut prev_bar = vec![1.0 / n as f64; n];
    let mut run = SolverRun {
        q_index: Vec::with_capacity(rounds),
        p_iterates: Vec::with_capacity(rounds),
        q_bar_history: Vec::with_capacity(rounds),
        q_bar: Vec::new(),
        p_bar: vec![0.0; m],
        gap_history: Vec::with_capacity(rounds),
        schedule,
    };
    for t in 1..=rounds {
        let payoff = poly.apply_transpose(&p);
        let j = argmax_first(&payoff);
        counts[j] += 1;
        let bar: Vec<f64> = counts.iter().map(|&k| k as f64 / t as f64).collect();
        run.gap_history.push(gap.observe(&prev_bar, &bar));
        for (a, b) in run.p_bar.iter_mut().zip(&p) {
            *a += (b - *a) / t as f64;
        }
        run.q_index.push(j);
        run.p_iterates.push(p);
        run.q_bar_history.push(bar.clone());
        let eta = match schedule {
            Schedule::OverT(c) => c / t as f64,
            _ => rate,
        };
        let total: Vec<f64> = counts.iter().map(|&k| k as f64).collect();
        p = softmin_weights(&mq(poly, &total), eta);
        prev_bar = bar;
    }
    run.q_bar = prev_bar;
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    fn sharp(n: usize) -> (Point, Point, Point) {
        let mut star = vec![0.0; n];
        star[n - 1] = 1.0;
        let mut prime = vec![0.0; n];
        prime[n - 1] = 0.5;
        let mut dd = vec![0.25; n];
        dd[0] = -0.5;
        dd[n - 1] = 0.5;
        (p(&dd), p(&prime), p(&star))
    }

    #[test]
    fn exp_loss_examples() {
        let (dd, _, star) = sharp(8);
        let e = std::f64::consts::E;
        assert_relative_eq!(exp_loss(&star, 2.0).unwrap(), 7.0 + (-2.0f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(
            exp_loss(&dd, 2.0).unwrap(),
            e + 6.0 * (-0.5f64).exp() + (-1.0f64).exp(),
            max_relative = 1e-14
        );
        assert!(exp_loss(&dd, 2.0).unwrap() < exp_loss(&star, 2.0).unwrap());
        assert_eq!(exp_loss(&p(&[3.0, -7.0, 0.5]), 0.0).unwrap(), 3.0);
        assert!(matches!(exp_loss(&p(&[-1.0]), 800.0), Err(Error::Overflow(_))));
        assert_eq!(exp_loss(&p(&[1.0]), 800.0).unwrap(), 0.0);
        assert!(exp_loss(&p(&[1.0]), -1.0).is_err());
    }

    #[test]
    fn potential_examples() {
        let id = VPolytope::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        for c in [0.5, 1.0, 7.0] {
            let v = softmax_potential(&id, &[0.5, 0.5], c).unwrap();
            assert_relative_eq!(v, 2f64.ln() / c - 0.5, epsilon = 1e-14);
        }
        let row = VPolytope::from_rows(&[vec![2.0, -1.0, 4.0]]).unwrap();
        let v = softmax_potential(&row, &[0.2, 0.3, 0.5], 3.0).unwrap();
        assert_relative_eq!(v, -(0.4 - 0.3 + 2.0), epsilon = 1e-14);
        let two = VPolytope::new(vec![p(&[5.0, 2.0, 4.0]), p(&[2.0, 6.0, 3.0])]).unwrap();
        let v = softmax_potential(&two, &[1.0, 0.0], 10.0).unwrap();
        let oracle = 0.1 * ((-50.0f64).exp() + (-20.0f64).exp() + (-40.0f64).exp()).ln();
        assert_relative_eq!(v, oracle, epsilon = 1e-12);
        assert!(softmax_potential(&two, &[1.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert_relative_eq!(near_min_threshold(2.0, 0.5, 1.0).unwrap(), 0.5 * (-2.0f64).exp());
        assert_eq!(near_min_threshold(3.0, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(near_min_threshold(0.0, 0.9, 12.0).unwrap(), 0.9);
        assert!(near_min_threshold(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn path_minimizer_sits_on_bad_segment() {
        let (dd, prime, star) = sharp(8);
        let path = PolyPath::new(vec![dd, prime, star]).unwrap();
        let x = minimize_on_path(&path, 2.0).unwrap();
        assert_eq!(x.coords()[7], 0.5);
        assert!(x.coords()[0] < 0.0);
    }

    #[test]
    fn finite_minimizer_examples() {
        let intro = FiniteSet::new(vec![p(&[5.0, 2.0, 4.0]), p(&[2.0, 6.0, 3.0]), p(&[8.0, 7.0, 1.0])]).unwrap();
        assert_eq!(minimize_on_finite(&intro, 10.0).unwrap(), p(&[5.0, 2.0, 4.0]));
        assert_eq!(argmin_on_finite(&intro, 0.0).unwrap(), 0);
        let (dd, _, star) = sharp(8);
        let pair = FiniteSet::new(vec![star, dd.clone()]).unwrap();
        assert_eq!(minimize_on_finite(&pair, 2.0).unwrap(), dd);
    }

    #[test]
    fn certification_examples() {
        let intro = GroundSet::Finite(
            FiniteSet::new(vec![p(&[5.0, 2.0, 4.0]), p(&[2.0, 6.0, 3.0]), p(&[8.0, 7.0, 1.0])]).unwrap(),
        );
        let b = SolveBudget::new(10, 10).unwrap();
        let bad = certify_near_min(&intro, &p(&[2.0, 6.0, 3.0]), LossParams::new(10.0, 0.9).unwrap(), b).unwrap();
        assert!(!bad.passed);
        let good = certify_near_min(&intro, &p(&[5.0, 2.0, 4.0]), LossParams::new(10.0, 0.0).unwrap(), b).unwrap();
        assert!(good.passed);
        let (dd, prime, star) = sharp(8);
        let path = GroundSet::Path(PolyPath::new(vec![dd, prime, star.clone()]).unwrap());
        let cert = certify_near_min(&path, &star, LossParams::new(2.0, 0.0).unwrap(), b).unwrap();
        assert!(!cert.passed);
        assert!(certify_near_min(&intro, &p(&[0.0, 0.0, 0.0]), LossParams::new(1.0, 0.0).unwrap(), b).is_err());
    }

    #[test]
    fn fw_first_round_and_symmetry() {
        let id = VPolytope::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let run = frank_wolfe(&id, 1.0, 4000).unwrap();
        assert!((run.q_bar[0] - 0.5).abs() < 1e-3);
        let one = frank_wolfe(&id, 1.0, 1).unwrap();
        assert_eq!(one.rounds(), 1);
        assert_eq!(one.q_bar, one.q_iterate(1));
        assert!(frank_wolfe(&id, 1.0, 0).is_err());
        assert!(frank_wolfe(&id, 0.0, 5).is_err());
        assert!(multiplicative_weights(&id, Schedule::Constant(-1.0), 5).is_err());
        assert!(multiplicative_weights(&id, Schedule::FrankWolfe(1.0), 5).is_err());
    }

    #[test]
    fn fw_matches_mw_on_small_matrix() {
        let poly = VPolytope::from_rows(&[
            vec![0.3, -0.2, 0.9, 0.1],
            vec![-0.5, 0.7, 0.0, 0.4],
            vec![0.2, 0.2, -0.8, 0.6],
        ])
        .unwrap();
        let fw = frank_wolfe(&poly, 2.0, 200).unwrap();
        let mw = multiplicative_weights(&poly, Schedule::OverT(2.0), 200).unwrap();
        assert_eq!(fw.q_index, mw.q_index);
        for (a, b) in fw.p_iterates.iter().zip(&mw.p_iterates) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn fw_tracks_dense_grid_minimizer() {
        let two = VPolytope::new(vec![p(&[5.0, 2.0, 4.0]), p(&[2.0, 6.0, 3.0])]).unwrap();
        let run = frank_wolfe(&two, 5.0, 500).unwrap();
        let y = run.output(&two);
        // dense λ-grid minimizer of H_5 on the segment
        let oracle = (0..=100_000)
            .map(|i| i as f64 / 100_000.0)
            .min_by(|a, b| {
                let f = |w: f64| softmax_potential(&two, &[w, 1.0 - w], 5.0).unwrap();
                f(*a).total_cmp(&f(*b))
            })
            .unwrap();
        let target = polytope_point_of(&two, oracle);
        assert!(y.linf_distance(&target).unwrap() <= 0.05, "{y} vs {target}");
        let csv = run.to_csv(&two, Some(&p(&[3.8, 3.6, 3.6])));
        assert_eq!(csv.lines().count(), 501);
        assert!(csv.lines().nth(1).unwrap().ends_with(",fw"));
    }

    fn polytope_point_of(two: &VPolytope, w: f64) -> Point {
        crate::setrep::polytope_point(two, &[w, 1.0 - w]).unwrap()
    }

    #[test]
    fn potential_minimizer_beats_lattice() {
        let two = VPolytope::new(vec![p(&[5.0, 2.0, 4.0]), p(&[2.0, 6.0, 3.0])]).unwrap();
        let (q, v) = minimize_potential(&two, 5.0, 20, 30).unwrap();
        let grid_best = (0..=20)
            .map(|i| {
                let w = i as f64 / 20.0;
                softmax_potential(&two, &[w, 1.0 - w], 5.0).unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(v <= grid_best);
        assert_relative_eq!(q.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }
}
