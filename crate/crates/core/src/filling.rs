//! Progressive filling with tolerance ε, the sup-value functions `H_k` and
//! `G_I`, and the pointwise test for possible outputs.
//!
//! Continuous sets are searched on the grids of [`crate::setrep`]; finite
//! sets are enumerated exactly.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lexcore::{check_index, cmp_sorted, sorted_values, IndexSet, Point, TOL};
use crate::setrep::{FiniteSet, GridParam, GroundSet, PolyPath, VPolytope};

/// Tolerance on the equality constraints `z_i = x_i` inside `G_I`.
pub const EQ_TOL: f64 = 1e-9;

/// One round of progressive filling: maximize `σ_k` over the set subject to
/// `σ_i(x) ≥ floor[i−1]` for `i < k`.
#[derive(Debug, Clone)]
pub struct InnerProblem<'a> {
    pub k: usize,
    pub floor: Vec<f64>,
    pub set: &'a GroundSet,
    /// A point known to satisfy the floor (the previous iterate). It joins
    /// the candidate pool so a feasible answer exists even when no grid
    /// point meets the floor exactly.
    pub incumbent: Option<Point>,
}

/// Grid resolution and refinement effort for the inner searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveBudget {
    pub resolution: usize,
    pub refine_iters: usize,
    /// Reject continuous runs whose grid cannot certify ε-optimality
    /// (coordinate error above ε/6).
    pub certify: bool,
}

impl SolveBudget {
    pub fn new(resolution: usize, refine_iters: usize) -> Result<Self> {
        if resolution == 0 || refine_iters == 0 {
            return Err(Error::InvalidParameter(
                "resolution and refine_iters must be positive".into(),
            ));
        }
        Ok(Self {
            resolution,
            refine_iters,
            certify: true,
        })
    }

    /// Same budget without the ε/6 certification requirement.
    pub fn uncertified(self) -> Self {
        Self {
            certify: false,
            ..self
        }
    }

    /// Smallest resolution whose coordinate error on `set` is at most
    /// `eps/6`, with the given refinement effort.
    pub fn for_eps(set: &GroundSet, eps: f64, refine_iters: usize) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter("eps must be positive to size a grid".into()));
        }
        let at_one = set.grid_coord_error(1);
        let resolution = ((at_one * 6.0 / eps).ceil() as usize).max(1);
        Self::new(resolution, refine_iters)
    }

    fn check(&self, set: &GroundSet, eps: f64) -> Result<()> {
        if !self.certify || set.is_finite() {
            return Ok(());
        }
        let coord = set.grid_coord_error(self.resolution);
        if coord > eps / 6.0 {
            return Err(Error::BudgetInsufficient {
                resolution: self.resolution,
                slack: 3.0 * coord,
                eps,
            });
        }
        Ok(())
    }
}

/// How a round picks among ε-admissible candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selector {
    /// The candidate with the largest `σ_k`.
    #[default]
    Best,
    /// Among candidates with `σ_k ≥ sup − ε`, the one with the smallest
    /// `σ_n`; ties go to the smaller sorted view, then to the earlier grid
    /// point.
    Adversarial,
}

/// Record of one progressive-filling run.
#[derive(Debug, Clone, PartialEq)]
pub struct FillTrace {
    pub iterates: Vec<Point>,
    pub inner_values: Vec<f64>,
    pub inner_sups: Vec<f64>,
    pub epsilon: f64,
    /// σ-value error bound of the grid used (0 for finite sets).
    pub grid_slack: f64,
}

impl FillTrace {
    pub fn last(&self) -> &Point {
        self.iterates.last().expect("a trace has one iterate per round")
    }

    /// One row per round: `k,sigma_k,sup_estimate,eps`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,sigma_k,sup_estimate,eps\n");
        for (i, (v, s)) in self.inner_values.iter().zip(&self.inner_sups).enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                i + 1,
                crate::csv::fmt_f64(*v),
                crate::csv::fmt_f64(*s),
                crate::csv::fmt_f64(self.epsilon)
            );
        }
        out
    }
}

fn feasibility_tol(set: &GroundSet) -> f64 {
    if set.is_finite() {
        0.0
    } else {
        TOL
    }
}

fn meets_floor(sorted: &[f64], floor: &[f64], tol: f64) -> bool {
    sorted.iter().zip(floor).all(|(s, f)| *s >= f - tol)
}

fn sort_into(coords: &[f64], buf: &mut Vec<f64>) {
    buf.clear();
    buf.extend_from_slice(coords);
    buf.sort_unstable_by(f64::total_cmp);
}

/// Candidate position inside a grid, used by local refinement.
#[derive(Debug, Clone)]
enum Anchor {
    None,
    Path { seg: usize, lambda: f64 },
    Simplex(Vec<f64>),
}

struct Candidate {
    coords: Vec<f64>,
    value: f64,
    anchor: Anchor,
}

/// Solves one round; returns the chosen point and the estimated sup.
pub fn solve_inner(p: &InnerProblem<'_>, eps: f64, budget: SolveBudget) -> Result<(Point, f64)> {
    solve_inner_with(p, eps, budget, Selector::Best)
}

pub fn solve_inner_with(
    p: &InnerProblem<'_>,
    eps: f64,
    budget: SolveBudget,
    selector: Selector,
) -> Result<(Point, f64)> {
    let n = p.set.dim();
    check_index(p.k, n)?;
    if p.floor.len() != p.k - 1 {
        return Err(Error::DimensionMismatch {
            expected: p.k - 1,
            got: p.floor.len(),
        });
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be non-negative, got {eps}")));
    }
    budget.check(p.set, eps)?;
    let tol = feasibility_tol(p.set);
    let k = p.k;

    // Pass 1: the best grid point.
    let mut best: Option<Candidate> = None;
    let mut buf = Vec::with_capacity(n);
    p.set.for_each_grid_point(budget.resolution, |c, param| {
        sort_into(c, &mut buf);
        if !meets_floor(&buf, &p.floor, tol) {
            return;
        }
        let v = buf[k - 1];
        if best.as_ref().is_none_or(|b| v > b.value) {
            best = Some(Candidate {
                coords: c.to_vec(),
                value: v,
                anchor: match param {
                    GridParam::Path { seg, lambda } => Anchor::Path { seg, lambda },
                    GridParam::Simplex(q) => Anchor::Simplex(q.to_vec()),
                    _ => Anchor::None,
                },
            });
        }
    })?;
    let incumbent = p.incumbent.as_ref().and_then(|x| {
        sort_into(x.coords(), &mut buf);
        meets_floor(&buf, &p.floor, tol).then(|| Candidate {
            coords: x.coords().to_vec(),
            value: buf[k - 1],
            anchor: Anchor::None,
        })
    });
    let mut best = match (best, incumbent.as_ref()) {
        (Some(b), Some(i)) if i.value > b.value => Candidate {
            coords: i.coords.clone(),
            value: i.value,
            anchor: Anchor::None,
        },
        (Some(b), _) => b,
        (None, Some(i)) => Candidate {
            coords: i.coords.clone(),
            value: i.value,
            anchor: Anchor::None,
        },
        (None, None) => return Err(Error::Infeasible { round: k }),
    };
    refine(p, budget, tol, &mut best);
    let sup = best.value;

    let chosen = match selector {
        Selector::Best => best.coords,
        Selector::Adversarial => {
            let mut pick: Option<(Vec<f64>, Vec<f64>)> = None;
            let threshold = sup - eps - TOL;
            let mut consider = |c: &[f64], buf: &mut Vec<f64>| {
                sort_into(c, buf);
                if !meets_floor(buf, &p.floor, tol) || buf[k - 1] < threshold {
                    return;
                }
                let better = match &pick {
                    None => true,
                    Some((_, s)) => match buf[n - 1].total_cmp(&s[n - 1]) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => cmp_sorted(buf, s) == Ordering::Less,
                    },
                };
                if better {
                    pick = Some((c.to_vec(), buf.clone()));
                }
            };
            let mut scratch = Vec::with_capacity(n);
            p.set
                .for_each_grid_point(budget.resolution, |c, _| consider(c, &mut scratch))?;
            consider(&best.coords, &mut scratch);
            if let Some(i) = &incumbent {
                consider(&i.coords, &mut scratch);
            }
            pick.map(|(c, _)| c).unwrap_or(best.coords)
        }
    };
    Ok((Point::from_finite(chosen), sup))
}

/// Golden-section refinement of the best candidate inside its lattice cell.
fn refine(p: &InnerProblem<'_>, budget: SolveBudget, tol: f64, best: &mut Candidate) {
    let k = p.k;
    let mut buf = Vec::new();
    let mut eval = |c: &[f64]| -> Option<f64> {
        sort_into(c, &mut buf);
        meets_floor(&buf, &p.floor, tol).then(|| buf[k - 1])
    };
    let h = 1.0 / budget.resolution as f64;
    match (&p.set, best.anchor.clone()) {
        (GroundSet::Path(path), Anchor::Path { seg, lambda }) => {
            let lo = (lambda - h).max(0.0);
            let hi = (lambda + h).min(1.0);
            let f = |t: f64| path_coords(path, seg, t);
            if let Some((c, v)) = golden_max(lo, hi, budget.refine_iters, |t| {
                let c = f(t);
                eval(&c).map(|v| (c, v))
            }) {
                if v > best.value {
                    best.coords = c;
                    best.value = v;
                }
            }
        }
        (GroundSet::Polytope(poly), Anchor::Simplex(mut q)) => {
            let cols = poly.cols();
            for i in 0..cols {
                for j in 0..cols {
                    if i == j || q[i] <= 0.0 {
                        continue;
                    }
                    let reach = q[i].min(h);
                    let base = q.clone();
                    let step = |t: f64| {
                        let mut w = base.clone();
                        w[i] -= t;
                        w[j] += t;
                        w[i] = w[i].max(0.0);
                        w
                    };
                    if let Some((w, v)) = golden_max(0.0, reach, budget.refine_iters, |t| {
                        let w = step(t);
                        eval(&polytope_coords(poly, &w)).map(|v| (w, v))
                    }) {
                        if v > best.value {
                            best.coords = polytope_coords(poly, &w);
                            best.value = v;
                            q = w;
                        }
                    }
                }
            }
        }
        _ => {}
    }
}

fn path_coords(path: &PolyPath, seg: usize, lambda: f64) -> Vec<f64> {
    let a = path.vertices()[seg].coords();
    let b = path.vertices()[seg + 1].coords();
    a.iter()
        .zip(b)
        .map(|(x, y)| lambda * y + (1.0 - lambda) * x)
        .collect()
}

fn polytope_coords(poly: &VPolytope, q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; poly.rows()];
    poly.apply_unchecked(q, &mut out);
    out
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`; infeasible
/// evaluations count as −∞. Returns the best feasible evaluation seen.
fn golden_max<T>(
    lo: f64,
    hi: f64,
    iters: usize,
    mut f: impl FnMut(f64) -> Option<(T, f64)>,
) -> Option<(T, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut best: Option<(T, f64)> = None;
    let mut score = |t: f64, best: &mut Option<(T, f64)>| -> f64 {
        match f(t) {
            Some((x, v)) => {
                let s = v;
                if best.as_ref().is_none_or(|b| v > b.1) {
                    *best = Some((x, v));
                }
                s
            }
            None => f64::NEG_INFINITY,
        }
    };
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = score(c, &mut best);
    let mut fd = score(d, &mut best);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = score(c, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = score(d, &mut best);
        }
    }
    score(lo, &mut best);
    score(hi, &mut best);
    best
}

/// Runs progressive filling for all `n` rounds.
pub fn run_fill(
    set: &GroundSet,
    eps: f64,
    budget: SolveBudget,
    selector: Selector,
) -> Result<FillTrace> {
    let n = set.dim();
    let mut iterates: Vec<Point> = Vec::with_capacity(n);
    let mut inner_values = Vec::with_capacity(n);
    let mut inner_sups = Vec::with_capacity(n);
    for k in 1..=n {
        let prev = iterates.last().cloned();
        let floor = prev
            .as_ref()
            .map(|x| sorted_values(x.coords())[..k - 1].to_vec())
            .unwrap_or_default();
        let problem = InnerProblem {
            k,
            floor,
            set,
            incumbent: prev,
        };
        let (x, sup) = solve_inner_with(&problem, eps, budget, selector)?;
        inner_values.push(sorted_values(x.coords())[k - 1]);
        inner_sups.push(sup);
        iterates.push(x);
    }
    let grid_slack = if set.is_finite() {
        0.0
    } else {
        set.grid_slack(budget.resolution)
    };
    Ok(FillTrace {
        iterates,
        inner_values,
        inner_sups,
        epsilon: eps,
        grid_slack,
    })
}

/// `H_1(x) … H_n(x)` in one pass over the grid. The point `x` itself is
/// counted as a member of the set.
pub fn h_all(set: &GroundSet, x: &Point, budget: SolveBudget) -> Result<Vec<f64>> {
    let n = set.dim();
    if x.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.dim(),
        });
    }
    let xs = sorted_values(x.coords());
    let tol = feasibility_tol(set);
    let mut h = xs.clone();
    let mut buf = Vec::with_capacity(n);
    set.for_each_grid_point(budget.resolution, |c, _| {
        sort_into(c, &mut buf);
        // z is feasible for round k iff its first k−1 sorted values dominate x's
        let prefix = buf
            .iter()
            .zip(&xs)
            .take(n - 1)
            .take_while(|(z, f)| **z >= **f - tol)
            .count();
        for k in 0..=prefix.min(n - 1) {
            if buf[k] > h[k] {
                h[k] = buf[k];
            }
        }
    })?;
    Ok(h)
}

/// `H_k(x) = sup{σ_k(z) : z ∈ X, σ_i(z) ≥ σ_i(x), i < k}`; exact on finite sets.
pub fn h_k(set: &GroundSet, x: &Point, k: usize, budget: SolveBudget) -> Result<f64> {
    check_index(k, set.dim())?;
    Ok(h_all(set, x, budget)?[k - 1])
}

/// `G_I(x) = sup{min_{i∉I} z_i : z ∈ X, z_i = x_i for i ∈ I}`, or −∞ when no
/// grid point matches.
pub fn g_i(set: &GroundSet, x: &Point, index_set: &IndexSet, budget: SolveBudget) -> Result<f64> {
    let n = set.dim();
    if x.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.dim(),
        });
    }
    index_set.check_within(n)?;
    if index_set.len() >= n {
        return Err(Error::InvalidIndexSet("I must be a proper subset of [n]".into()));
    }
    let pinned: Vec<usize> = index_set.iter().map(|i| i - 1).collect();
    let free: Vec<usize> = (0..n).filter(|i| !index_set.contains(i + 1)).collect();
    let xc = x.coords();
    let mut g = f64::NEG_INFINITY;
    set.for_each_grid_point(budget.resolution, |z, _| {
        if pinned.iter().all(|&i| (z[i] - xc[i]).abs() <= EQ_TOL) {
            let m = free.iter().map(|&i| z[i]).fold(f64::INFINITY, f64::min);
            g = g.max(m);
        }
    })?;
    Ok(g)
}

/// True iff `σ_k(x) ≥ H_k(x) − ε` for every `k`.
pub fn is_possible_output(set: &GroundSet, x: &Point, eps: f64, budget: SolveBudget) -> Result<bool> {
    if set.contains(x) == Some(false) {
        return Err(Error::NotInSet);
    }
    let h = h_all(set, x, budget)?;
    Ok(admissible(&sorted_values(x.coords()), &h, eps))
}

fn admissible(xs: &[f64], h: &[f64], eps: f64) -> bool {
    let tol = if eps == 0.0 { 0.0 } else { TOL };
    xs.iter().zip(h).all(|(s, h)| *s >= h - eps - tol)
}

/// All points of a finite set that are possible outputs at tolerance `eps`,
/// by exact enumeration.
pub fn possible_output_set(set: &GroundSet, eps: f64) -> Result<FiniteSet> {
    let GroundSet::Finite(fin) = set else {
        return Err(Error::NotFinite);
    };
    let sorted: Vec<Vec<f64>> = fin.points().iter().map(|p| sorted_values(p.coords())).collect();
    let n = fin.dim();
    let keep = sorted
        .iter()
        .zip(fin.points())
        .filter(|(xs, _)| {
            let mut h = (*xs).clone();
            for z in &sorted {
                let prefix = z
                    .iter()
                    .zip(xs.iter())
                    .take(n - 1)
                    .take_while(|(a, b)| a >= b)
                    .count();
                for k in 0..=prefix.min(n - 1) {
                    h[k] = h[k].max(z[k]);
                }
            }
            admissible(xs, &h, eps)
        })
        .map(|(_, p)| p.clone())
        .collect();
    FiniteSet::new(keep)
}
