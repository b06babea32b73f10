//! Stability and convergence sweeps.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::Result;
use crate::expmin::{realize_near_min, LossParams};
use crate::filling::{is_possible_output, run_fill, Selector, SolveBudget};
use crate::lab::RECORD_TOL;
use crate::lexcore::{cmp_sorted, distortion, distortion_full, sorted_values, IndexSet, Point, TOL};
use crate::setrep::{enumerate_grid, GroundSet};

/// Direction of the inequality a record is checked against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expectation {
    None,
    AtLeast(f64),
    AtMost(f64),
}

impl Expectation {
    pub fn bound(&self) -> Option<f64> {
        match *self {
            Expectation::None => None,
            Expectation::AtLeast(b) | Expectation::AtMost(b) => Some(b),
        }
    }

    pub fn holds(&self, measured: f64) -> bool {
        match *self {
            Expectation::None => true,
            Expectation::AtLeast(b) => measured >= b - RECORD_TOL,
            Expectation::AtMost(b) => measured <= b + RECORD_TOL,
        }
    }
}

/// One measured cell of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub set: String,
    pub n: usize,
    pub k: Option<usize>,
    pub a: Option<f64>,
    pub c: Option<f64>,
    pub eps: Option<f64>,
    pub gamma: Option<f64>,
    pub d_total: f64,
    pub d_k: Option<f64>,
    pub bound: Option<f64>,
    pub pass: bool,
    pub grid_slack: f64,
}

impl ExperimentRecord {
    fn blank(set: &str, n: usize, grid_slack: f64) -> Self {
        Self {
            set: set.to_string(),
            n,
            k: None,
            a: None,
            c: None,
            eps: None,
            gamma: None,
            d_total: 0.0,
            d_k: None,
            bound: None,
            pass: true,
            grid_slack,
        }
    }

    fn judge(mut self, expect: Expectation) -> Self {
        let measured = self.d_k.unwrap_or(self.d_total);
        self.bound = expect.bound();
        self.pass = expect.holds(measured);
        self
    }
}

/// Among the points of a finite grid that are possible outputs of the grid
/// itself at tolerance `eps`, the one farthest (in distortion) from `x_star`.
/// Ties go to the earlier point.
pub fn worst_possible_output(points: &[Point], x_star: &Point, eps: f64) -> Result<Option<(Point, f64)>> {
    let sorted: Vec<Vec<f64>> = points.iter().map(|p| sorted_values(p.coords())).collect();
    let mut dist = Vec::with_capacity(points.len());
    for p in points {
        dist.push(distortion_full(x_star, p)?);
    }
    // scanning lexicographically large points first finds violations early
    let mut scan: Vec<usize> = (0..points.len()).collect();
    scan.sort_by(|&a, &b| cmp_sorted(&sorted[b], &sorted[a]).then(a.cmp(&b)));
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]).then(a.cmp(&b)));
    let tol = if eps == 0.0 { 0.0 } else { TOL };
    let n = x_star.dim();
    let admissible = |xi: usize| {
        let xs = &sorted[xi];
        scan.iter().all(|&zi| {
            let zs = &sorted[zi];
            let prefix = zs
                .iter()
                .zip(xs)
                .take(n - 1)
                .take_while(|(z, x)| z >= x)
                .count();
            (0..=prefix.min(n - 1)).all(|k| zs[k] <= xs[k] + eps + tol)
        })
    };
    let hit = order.par_iter().position_first(|&i| admissible(i));
    Ok(hit.map(|pos| {
        let i = order[pos];
        (points[i].clone(), dist[i])
    }))
}

/// Settings for [`stability_curve`].
#[derive(Debug, Clone)]
pub struct StabilityOptions {
    pub name: String,
    /// Known lexmax; computed by filling with ε = 0 when absent.
    pub lexmax: Option<Point>,
    /// Catalogued possible output for each ε, checked before use.
    pub witness: Option<fn(f64) -> Point>,
    pub expect: Expectation,
}

/// For each ε, the largest distortion from the lexmax found among possible
/// outputs: the adversarial filling run, the worst admissible grid point,
/// and the catalogued witness if any. This is a certified lower bound on
/// the sup over all possible outputs.
pub fn stability_curve(
    set: &GroundSet,
    eps_list: &[f64],
    budget: SolveBudget,
    opts: &StabilityOptions,
) -> Result<Vec<ExperimentRecord>> {
    let budget = budget.uncertified();
    let x_star = match &opts.lexmax {
        Some(x) => x.clone(),
        None => run_fill(set, 0.0, budget, Selector::Best)?.last().clone(),
    };
    let grid = enumerate_grid(set, budget.resolution)?;
    let slack = if set.is_finite() {
        0.0
    } else {
        set.grid_slack(budget.resolution)
    };
    let mut records = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let fill = run_fill(set, eps, budget, Selector::Adversarial)?;
        let mut d = distortion_full(&x_star, fill.last())?;
        if let Some((_, dg)) = worst_possible_output(grid.points(), &x_star, eps)? {
            d = d.max(dg);
        }
        if let Some(w) = opts.witness {
            let x = w(eps);
            if is_possible_output(set, &x, eps, budget)? {
                d = d.max(distortion_full(&x_star, &x)?);
            }
        }
        let mut r = ExperimentRecord::blank(&opts.name, set.dim(), slack);
        r.eps = Some(eps);
        r.d_total = d;
        records.push(r.judge(opts.expect));
    }
    Ok(records)
}

/// Which inequality a convergence sweep checks.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvergenceCheck {
    /// Record distortions only.
    Trend,
    /// `σ_k(x*) − σ_k(x_{c,γ}) ≤ (1/c) log((n−k+1)/(1−γ)) + 2 × grid slack`.
    Upper { ks: Vec<usize> },
    /// `d_k ≥ (1/3) min{1, a/c}` on a rate segment.
    RateLower { k: usize, a: f64 },
    /// `d_n ≥ 1/2` on the sharp-lower path.
    SharpLower,
}

#[derive(Debug, Clone)]
pub struct ConvergenceOptions {
    pub name: String,
    pub lexmax: Option<Point>,
    pub check: ConvergenceCheck,
}

/// Upper bound on the shortfall of `σ_k` at a near minimizer.
pub fn upper_bound(c: f64, gamma: f64, n: usize, k: usize) -> f64 {
    ((n - k + 1) as f64 / (1.0 - gamma)).ln() / c
}

/// For each `c`, realizes `x_{c,γ}` and records its distortion from the
/// lexmax, per index where the check asks for it.
pub fn convergence_curve(
    set: &GroundSet,
    c_list: &[f64],
    gamma: f64,
    budget: SolveBudget,
    opts: &ConvergenceOptions,
) -> Result<Vec<ExperimentRecord>> {
    let budget = budget.uncertified();
    let n = set.dim();
    let x_star = match &opts.lexmax {
        Some(x) => x.clone(),
        None => run_fill(set, 0.0, budget, Selector::Best)?.last().clone(),
    };
    let slack = match set {
        GroundSet::Finite(_) | GroundSet::Path(_) => 0.0,
        _ => set.grid_slack(budget.resolution),
    };
    let mut records = Vec::new();
    for &c in c_list {
        let x = realize_near_min(set, LossParams::new(c, gamma)?, budget)?;
        let d_total = distortion_full(&x_star, &x)?;
        let base = || {
            let mut r = ExperimentRecord::blank(&opts.name, n, slack);
            r.c = Some(c);
            r.gamma = Some(gamma);
            r.d_total = d_total;
            r
        };
        let d_at = |k: usize| distortion(&x_star, &x, &IndexSet::single(k)?);
        match &opts.check {
            ConvergenceCheck::Trend => records.push(base()),
            ConvergenceCheck::Upper { ks } => {
                for &k in ks.iter().filter(|&&k| k <= n) {
                    let mut r = base();
                    r.k = Some(k);
                    r.d_k = Some(d_at(k)?);
                    let bound = upper_bound(c, gamma, n, k) + 2.0 * slack;
                    records.push(r.judge(Expectation::AtMost(bound)));
                }
            }
            ConvergenceCheck::RateLower { k, a } => {
                let mut r = base();
                r.k = Some(*k);
                r.a = Some(*a);
                r.d_k = Some(d_at(*k)?);
                let bound = (1.0f64).min(a / c) / 3.0;
                records.push(r.judge(Expectation::AtLeast(bound)));
            }
            ConvergenceCheck::SharpLower => {
                let mut r = base();
                r.k = Some(n);
                r.d_k = Some(d_at(n)?);
                records.push(r.judge(Expectation::AtLeast(0.5)));
            }
        }
    }
    Ok(records)
}

/// True when each value is at most the previous one plus `slack`.
pub fn non_increasing_within(values: &[f64], slack: f64) -> bool {
    values
        .windows(2)
        .all(|w| w[1].partial_cmp(&(w[0] + slack)) != Some(Ordering::Greater))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::constructions::*;
    use crate::setrep::FiniteSet;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn worst_output_on_intro_set() {
        let pts = vec![p(&[5.0, 2.0, 4.0]), p(&[2.0, 6.0, 3.0]), p(&[8.0, 7.0, 1.0])];
        let star = p(&[5.0, 2.0, 4.0]);
        let (x, d) = worst_possible_output(&pts, &star, 0.0).unwrap().unwrap();
        assert_eq!((x, d), (star.clone(), 0.0));
        // at ε = 1, (2,6,3) becomes admissible: σ_2 = 3 ≥ 4 − 1
        let (x, d) = worst_possible_output(&pts, &star, 1.0).unwrap().unwrap();
        assert_eq!(x, p(&[2.0, 6.0, 3.0]));
        assert_eq!(d, 1.0);
    }

    #[test]
    fn sharp_lower_plateau() {
        let set = GroundSet::Path(make_sharp_lower_set(8).unwrap());
        let opts = StabilityOptions {
            name: "sharp_lower".into(),
            lexmax: None,
            witness: None,
            expect: Expectation::AtLeast(0.5),
        };
        let recs = stability_curve(&set, &[0.2, 0.1, 0.05, 0.01], SolveBudget::new(400, 30).unwrap(), &opts)
            .unwrap();
        assert_eq!(recs.len(), 4);
        assert!(recs.iter().all(|r| r.pass), "{recs:?}");
    }

    #[test]
    fn curved_witness_keeps_distortion() {
        let set = GroundSet::Curved(crate::setrep::CurvedSet3);
        let opts = StabilityOptions {
            name: "curved3".into(),
            lexmax: Some(curved_lexmax()),
            witness: Some(curved_witness),
            expect: Expectation::AtLeast(0.25),
        };
        let recs = stability_curve(&set, &[0.5, 0.1], SolveBudget::new(40, 10).unwrap(), &opts).unwrap();
        assert!(recs.iter().all(|r| r.pass), "{recs:?}");
    }

    #[test]
    fn rate_segment_convergence() {
        let seg = make_rate_segment(3, 3, 4.0).unwrap();
        let set = GroundSet::Path(seg.path.clone());
        let opts = ConvergenceOptions {
            name: "rate_segment".into(),
            lexmax: Some(seg.x_star.clone()),
            check: ConvergenceCheck::RateLower { k: 3, a: 4.0 },
        };
        let recs = convergence_curve(&set, &[1.0, 2.0, 4.0, 8.0, 16.0], 0.0, SolveBudget::new(10, 10).unwrap(), &opts)
            .unwrap();
        assert!(recs.iter().all(|r| r.pass), "{recs:?}");
    }

    #[test]
    fn sharp_lower_convergence_and_finite_upper() {
        let set = GroundSet::Path(make_sharp_lower_set(8).unwrap());
        let opts = ConvergenceOptions {
            name: "sharp_lower".into(),
            lexmax: None,
            check: ConvergenceCheck::SharpLower,
        };
        let recs = convergence_curve(&set, &[2.0, 4.0, 8.0], 0.0, SolveBudget::new(100, 10).unwrap(), &opts).unwrap();
        assert!(recs.iter().all(|r| r.pass), "{recs:?}");

        let fin = GroundSet::Finite(
            FiniteSet::new(vec![p(&[5.0, 2.0, 4.0]), p(&[2.0, 6.0, 3.0]), p(&[8.0, 7.0, 1.0])]).unwrap(),
        );
        let opts = ConvergenceOptions {
            name: "intro".into(),
            lexmax: None,
            check: ConvergenceCheck::Upper { ks: vec![1, 2] },
        };
        let recs = convergence_curve(&fin, &[0.5, 1.0, 5.0], 0.5, SolveBudget::new(1, 1).unwrap(), &opts).unwrap();
        assert_eq!(recs.len(), 6);
        assert!(recs.iter().all(|r| r.pass), "{recs:?}");
    }

    #[test]
    fn trend_helper() {
        assert!(non_increasing_within(&[0.5, 0.4, 0.45, 0.1], 0.06));
        assert!(!non_increasing_within(&[0.1, 0.5], 0.06));
    }
}
