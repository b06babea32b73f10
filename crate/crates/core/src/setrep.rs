//! Representations of the feasible set and their desk-scale grids.
//!
//! Every representation can be walked as a deterministic grid through
//! [`GroundSet::for_each_grid_point`]. Materializing the grid with
//! [`enumerate_grid`] yields a [`FiniteSet`].

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::lexcore::{check_dims, Point, TOL};

/// Lattice size above which [`enumerate_grid`] refuses to materialize.
pub const DEFAULT_GRID_CAP: u128 = 2_000_000;

/// Lipschitz constant of the sorting functions under the ℓ∞ norm, used to
/// turn coordinate error into σ-value error.
pub const SORT_LIPSCHITZ: f64 = 3.0;

/// A nonempty list of distinct points of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSet {
    points: Vec<Point>,
}

fn point_key(coords: &[f64]) -> Vec<u64> {
    // +0.0 folds -0.0 into 0.0 so both hash alike
    coords.iter().map(|v| (v + 0.0).to_bits()).collect()
}

impl FiniteSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput("finite set needs a point"))?;
        let mut seen = HashSet::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            check_dims(first, p)?;
            if !seen.insert(point_key(p.coords())) {
                return Err(Error::DuplicatePoint(i));
            }
        }
        Ok(Self { points })
    }

    /// Builds a set from points, dropping exact duplicates (first one wins).
    pub fn dedup(points: Vec<Point>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(points.len());
        let kept: Vec<Point> = points
            .into_iter()
            .filter(|p| seen.insert(point_key(p.coords())))
            .collect();
        Self::new(kept)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }
}

/// Convex hull of generator points, `X = {Mq : q ∈ Δ}`; the generators are
/// the columns of `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct VPolytope {
    columns: Vec<Point>,
}

impl VPolytope {
    pub fn new(columns: Vec<Point>) -> Result<Self> {
        let first = columns
            .first()
            .ok_or(Error::EmptyInput("polytope needs a generator"))?;
        for c in &columns {
            check_dims(first, c)?;
        }
        Ok(Self { columns })
    }

    /// Builds the polytope from a row-major `rows × cols` matrix.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map(Vec::len).unwrap_or(0);
        if m == 0 || n == 0 {
            return Err(Error::EmptyInput("matrix has no entries"));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        let columns = (0..n)
            .map(|j| Point::new(rows.iter().map(|r| r[j]).collect()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(columns)
    }

    pub fn columns(&self) -> &[Point] {
        &self.columns
    }

    /// Ambient dimension (rows of `M`).
    pub fn rows(&self) -> usize {
        self.columns[0].dim()
    }

    /// Number of generators (columns of `M`).
    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    /// Entry `M[i][j]`, 0-based.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.columns[j].coords()[i]
    }

    /// `Mq` without simplex validation.
    pub(crate) fn apply_unchecked(&self, q: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (col, &w) in self.columns.iter().zip(q) {
            if w == 0.0 {
                continue;
            }
            for (o, c) in out.iter_mut().zip(col.coords()) {
                *o += w * c;
            }
        }
    }

    /// `Mᵀp`.
    pub(crate) fn apply_transpose(&self, p: &[f64]) -> Vec<f64> {
        self.columns
            .iter()
            .map(|c| c.coords().iter().zip(p).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Union of the closed segments joining consecutive vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPath {
    vertices: Vec<Point>,
}

impl PolyPath {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidParameter(
                "a path needs at least two vertices".into(),
            ));
        }
        for w in vertices.windows(2) {
            check_dims(&w[0], &w[1])?;
            if w[0] == w[1] {
                return Err(Error::InvalidParameter(
                    "consecutive path vertices must differ".into(),
                ));
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn segments(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }
}

/// The fixed compact convex set
/// `{x ∈ [−1,0]×[0,1]×[0,1] : x_1 (x_3 − 1) ≥ x_2²}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CurvedSet3;

impl CurvedSet3 {
    /// Upper end of the feasible `x_2` range for fixed `x_1, x_3`.
    pub fn x2_ceiling(x1: f64, x3: f64) -> f64 {
        (x1 * (x3 - 1.0)).max(0.0).sqrt()
    }
}

/// The feasible set handed to the optimizers.
#[derive(Debug, Clone, PartialEq)]
pub enum GroundSet {
    Finite(FiniteSet),
    Polytope(VPolytope),
    Path(PolyPath),
    Curved(CurvedSet3),
}

/// Parameters locating a grid point inside its representation.
#[derive(Debug, Clone, Copy)]
pub enum GridParam<'a> {
    /// Index into a finite set.
    Index(usize),
    /// Segment (0-based) and λ.
    Path { seg: usize, lambda: f64 },
    /// Simplex weights.
    Simplex(&'a [f64]),
    /// Box lattice point of the curved set.
    Lattice,
}

impl GroundSet {
    pub fn dim(&self) -> usize {
        match self {
            GroundSet::Finite(s) => s.dim(),
            GroundSet::Polytope(p) => p.rows(),
            GroundSet::Path(p) => p.dim(),
            GroundSet::Curved(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            GroundSet::Finite(_) => "finite",
            GroundSet::Polytope(_) => "polytope",
            GroundSet::Path(_) => "path",
            GroundSet::Curved(_) => "curved3",
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GroundSet::Finite(_))
    }

    /// Generator, vertex, or point list. For the curved set, the corners of
    /// the box that belong to the set.
    pub fn vertices(&self) -> Vec<Point> {
        match self {
            GroundSet::Finite(s) => s.points().to_vec(),
            GroundSet::Polytope(p) => p.columns().to_vec(),
            GroundSet::Path(p) => p.vertices().to_vec(),
            GroundSet::Curved(_) => [[-1.0, 0.0, 0.0], [-1.0, 0.0, 1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]]
                .iter()
                .map(|c| Point::from_finite(c.to_vec()))
                .collect(),
        }
    }

    /// `‖X‖∞`.
    pub fn linf_norm(&self) -> f64 {
        match self {
            // (−1, 1, 0) is in the set
            GroundSet::Curved(_) => 1.0,
            _ => self.vertices().iter().map(Point::linf_norm).fold(0.0, f64::max),
        }
    }

    /// Number of lattice points visited at this resolution (before
    /// filtering or deduplication).
    pub fn grid_size(&self, resolution: usize) -> u128 {
        let r = resolution as u128;
        match self {
            GroundSet::Finite(s) => s.len() as u128,
            GroundSet::Path(p) => p.segments() as u128 * r + 1,
            GroundSet::Polytope(p) => binomial(r + p.cols() as u128 - 1, p.cols() as u128 - 1),
            GroundSet::Curved(_) => (r + 1).pow(3),
        }
    }

    /// Bound on the ℓ∞ distance from any point of the set to the nearest
    /// grid point.
    pub fn grid_coord_error(&self, resolution: usize) -> f64 {
        let r = resolution.max(1) as f64;
        match self {
            GroundSet::Finite(_) => 0.0,
            GroundSet::Path(p) => {
                let longest = p
                    .vertices()
                    .windows(2)
                    .map(|w| w[0].linf_distance(&w[1]).expect("same dim"))
                    .fold(0.0, f64::max);
                longest / (2.0 * r)
            }
            GroundSet::Polytope(p) => {
                let row_range = (0..p.rows())
                    .map(|i| {
                        let (lo, hi) = (0..p.cols()).fold((f64::MAX, f64::MIN), |(lo, hi), j| {
                            let v = p.entry(i, j);
                            (lo.min(v), hi.max(v))
                        });
                        hi - lo
                    })
                    .fold(0.0, f64::max);
                row_range * (p.cols() / 2) as f64 / r
            }
            GroundSet::Curved(_) => 1.0 / r,
        }
    }

    /// Certified σ-value error of the grid: `3 × coordinate error`.
    pub fn grid_slack(&self, resolution: usize) -> f64 {
        SORT_LIPSCHITZ * self.grid_coord_error(resolution)
    }

    /// Membership test. `None` means membership is not decidable without a
    /// linear program (polytopes).
    pub fn contains(&self, x: &Point) -> Option<bool> {
        if x.dim() != self.dim() {
            return Some(false);
        }
        const MEMBER_TOL: f64 = 1e-9;
        match self {
            GroundSet::Finite(s) => Some(s.points().iter().any(|p| {
                p.linf_distance(x).map(|d| d <= MEMBER_TOL).unwrap_or(false)
            })),
            GroundSet::Path(p) => Some(p.vertices().windows(2).any(|w| {
                segment_distance(&w[0], &w[1], x) <= MEMBER_TOL
            })),
            GroundSet::Curved(_) => curved_membership(x).ok(),
            GroundSet::Polytope(_) => None,
        }
    }

    /// Walks the grid in deterministic lattice order. Paths emit each shared
    /// vertex once; the curved set emits feasible box-lattice points plus,
    /// in each `(x_1, x_3)` column, the boundary point `x_2 = sqrt(x_1(x_3−1))`
    /// when it falls strictly between two lattice values.
    pub fn for_each_grid_point<F>(&self, resolution: usize, mut f: F) -> Result<()>
    where
        F: FnMut(&[f64], GridParam<'_>),
    {
        if resolution == 0 {
            return Err(Error::InvalidParameter("grid resolution must be positive".into()));
        }
        let r = resolution;
        match self {
            GroundSet::Finite(s) => {
                for (i, p) in s.points().iter().enumerate() {
                    f(p.coords(), GridParam::Index(i));
                }
            }
            GroundSet::Path(path) => {
                let mut buf = vec![0.0; path.dim()];
                for seg in 0..path.segments() {
                    let start = if seg == 0 { 0 } else { 1 };
                    for i in start..=r {
                        let lambda = i as f64 / r as f64;
                        segment_point_into(path, seg, lambda, &mut buf);
                        f(&buf, GridParam::Path { seg, lambda });
                    }
                }
            }
            GroundSet::Polytope(poly) => {
                let mut counts = vec![0usize; poly.cols()];
                let mut q = vec![0.0; poly.cols()];
                let mut out = vec![0.0; poly.rows()];
                compositions(r, &mut counts, 0, &mut |c| {
                    for (w, &k) in q.iter_mut().zip(c.iter()) {
                        *w = k as f64 / r as f64;
                    }
                    poly.apply_unchecked(&q, &mut out);
                    f(&out, GridParam::Simplex(&q));
                });
            }
            GroundSet::Curved(_) => {
                let rf = r as f64;
                for i in 0..=r {
                    let x1 = -((r - i) as f64) / rf;
                    for l in 0..=r {
                        let x3 = l as f64 / rf;
                        let room = x1 * (x3 - 1.0);
                        for j in 0..=r {
                            let x2 = j as f64 / rf;
                            if room >= x2 * x2 {
                                f(&[x1, x2, x3], GridParam::Lattice);
                                continue;
                            }
                            let ceiling = room.max(0.0).sqrt();
                            let prev = (j as f64 - 1.0) / rf;
                            // sqrt may round up to the lattice value itself
                            if j > 0 && prev < ceiling {
                                f(&[x1, ceiling.min(x2), x3], GridParam::Lattice);
                            }
                            break;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Calls `f` with every composition of `total` into `counts.len()` parts, in
/// increasing lexicographic order.
fn compositions(total: usize, counts: &mut [usize], pos: usize, f: &mut dyn FnMut(&[usize])) {
    let last = counts.len() - 1;
    if pos == last {
        counts[pos] = total;
        f(counts);
        return;
    }
    for k in 0..=total {
        counts[pos] = k;
        compositions(total - k, counts, pos + 1, f);
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn segment_point_into(path: &PolyPath, seg: usize, lambda: f64, out: &mut [f64]) {
    let near = path.vertices[seg].coords();
    let far = path.vertices[seg + 1].coords();
    for ((o, a), b) in out.iter_mut().zip(near).zip(far) {
        *o = lambda * b + (1.0 - lambda) * a;
    }
}

fn segment_distance(a: &Point, b: &Point, x: &Point) -> f64 {
    let (a, b, x) = (a.coords(), b.coords(), x.coords());
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..a.len() {
        num += (x[i] - a[i]) * (b[i] - a[i]);
        den += (b[i] - a[i]).powi(2);
    }
    let t = if den > 0.0 { (num / den).clamp(0.0, 1.0) } else { 0.0 };
    (0..a.len())
        .map(|i| (x[i] - (a[i] + t * (b[i] - a[i]))).abs())
        .fold(0.0, f64::max)
}

/// `λ·v_{seg+1} + (1−λ)·v_seg`; `seg` is 0-based.
pub fn path_point(path: &PolyPath, seg: usize, lambda: f64) -> Result<Point> {
    if seg >= path.segments() {
        return Err(Error::InvalidParameter(format!(
            "segment {seg} out of range (path has {})",
            path.segments()
        )));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("lambda {lambda} outside [0,1]")));
    }
    let mut out = vec![0.0; path.dim()];
    segment_point_into(path, seg, lambda, &mut out);
    Ok(Point::from_finite(out))
}

/// Checks that `q` is a probability vector with `len` entries.
pub(crate) fn check_simplex(q: &[f64], len: usize) -> Result<()> {
    if q.len() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            got: q.len(),
        });
    }
    if let Some(w) = q.iter().find(|w| !w.is_finite() || **w < -TOL) {
        return Err(Error::NotInSimplex(format!("entry {w}")));
    }
    let total: f64 = q.iter().sum();
    if (total - 1.0).abs() > TOL {
        return Err(Error::NotInSimplex(format!("weights sum to {total}")));
    }
    Ok(())
}

/// `Mq` for simplex weights `q`.
pub fn polytope_point(poly: &VPolytope, q: &[f64]) -> Result<Point> {
    check_simplex(q, poly.cols())?;
    let mut out = vec![0.0; poly.rows()];
    poly.apply_unchecked(q, &mut out);
    Ok(Point::from_finite(out))
}

/// Membership in the curved set, within `1e-12` on every constraint.
pub fn curved_membership(x: &Point) -> Result<bool> {
    if x.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: x.dim(),
        });
    }
    let c = x.coords();
    let in_box = (-1.0 - TOL..=TOL).contains(&c[0])
        && (-TOL..=1.0 + TOL).contains(&c[1])
        && (-TOL..=1.0 + TOL).contains(&c[2]);
    Ok(in_box && c[0] * (c[2] - 1.0) >= c[1] * c[1] - TOL)
}

/// Materializes the grid of `set` as a finite set, refusing lattices larger
/// than [`DEFAULT_GRID_CAP`].
pub fn enumerate_grid(set: &GroundSet, resolution: usize) -> Result<FiniteSet> {
    enumerate_grid_capped(set, resolution, DEFAULT_GRID_CAP)
}

pub fn enumerate_grid_capped(set: &GroundSet, resolution: usize, cap: u128) -> Result<FiniteSet> {
    if resolution == 0 {
        return Err(Error::InvalidParameter("grid resolution must be positive".into()));
    }
    if let GroundSet::Finite(s) = set {
        return Ok(s.clone());
    }
    let size = set.grid_size(resolution);
    if size > cap {
        return Err(Error::GridTooLarge { size, cap });
    }
    let mut points = Vec::with_capacity(size.min(1 << 20) as usize);
    set.for_each_grid_point(resolution, |c, _| points.push(Point::from_finite(c.to_vec())))?;
    FiniteSet::dedup(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    fn sharp_path() -> PolyPath {
        let mut star = vec![0.0; 8];
        star[7] = 1.0;
        let mut prime = vec![0.0; 8];
        prime[7] = 0.5;
        let mut dd = vec![0.25; 8];
        dd[0] = -0.5;
        dd[7] = 0.5;
        PolyPath::new(vec![p(&dd), p(&prime), p(&star)]).unwrap()
    }

    #[test]
    fn finite_set_validation() {
        assert!(FiniteSet::new(vec![]).is_err());
        assert_eq!(
            FiniteSet::new(vec![p(&[1.0, 2.0]), p(&[1.0, 2.0])]),
            Err(Error::DuplicatePoint(1))
        );
        assert!(FiniteSet::new(vec![p(&[0.0]), p(&[-0.0])]).is_err());
        assert_eq!(FiniteSet::dedup(vec![p(&[1.0]), p(&[1.0])]).unwrap().len(), 1);
    }

    #[test]
    fn path_point_examples() {
        let path = sharp_path();
        let mut star = vec![0.0; 8];
        star[7] = 1.0;
        assert_eq!(path_point(&path, 1, 1.0).unwrap(), p(&star));
        assert_eq!(path_point(&path, 0, 0.0).unwrap(), path.vertices()[0]);
        let eps = (1.0 / 3.0) / ((2.0f64 / 3.0).exp() + 1.0);
        let seg = PolyPath::new(vec![p(&[0.0, 2.0 / 3.0, 2.0 / 3.0]), p(&[eps, eps, 1.0])]).unwrap();
        let mid = path_point(&seg, 0, 0.5).unwrap();
        let expect = [eps / 2.0, 1.0 / 3.0 + eps / 2.0, 5.0 / 6.0];
        for (a, b) in mid.coords().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(path_point(&path, 2, 0.5).is_err());
        assert!(path_point(&path, 0, 1.5).is_err());
        assert!(path_point(&path, 0, -0.1).is_err());
    }

    #[test]
    fn polytope_point_examples() {
        let id = VPolytope::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(polytope_point(&id, &[1.0, 0.0]).unwrap(), p(&[1.0, 0.0]));
        let two = VPolytope::new(vec![p(&[5.0, 2.0, 4.0]), p(&[2.0, 6.0, 3.0])]).unwrap();
        assert_eq!(polytope_point(&two, &[0.5, 0.5]).unwrap(), p(&[3.5, 4.0, 3.5]));
        assert!(matches!(
            polytope_point(&two, &[0.6, 0.6]),
            Err(Error::NotInSimplex(_))
        ));
        assert!(polytope_point(&two, &[1.5, -0.5]).is_err());
        assert!(polytope_point(&two, &[1.0]).is_err());
        // uniform weights give the row means
        let three = VPolytope::from_rows(&[vec![1.0, 2.0, 6.0], vec![-3.0, 0.0, 0.0]]).unwrap();
        let avg = polytope_point(&three, &[1.0 / 3.0; 3]).unwrap();
        assert!((avg.coords()[0] - 3.0).abs() < 1e-15 && (avg.coords()[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn curved_membership_examples() {
        assert!(curved_membership(&p(&[-0.01, 0.05, 0.75])).unwrap());
        assert!(curved_membership(&p(&[0.0, 0.0, 1.0])).unwrap());
        assert!(!curved_membership(&p(&[0.0, 0.5, 1.0])).unwrap());
        assert!(!curved_membership(&p(&[0.5, 0.0, 0.0])).unwrap());
        assert!(curved_membership(&p(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn grid_counts() {
        let fin = GroundSet::Finite(FiniteSet::new(vec![p(&[1.0]), p(&[2.0])]).unwrap());
        assert_eq!(enumerate_grid(&fin, 7).unwrap().len(), 2);
        let seg = GroundSet::Path(PolyPath::new(vec![p(&[0.0, 0.0]), p(&[1.0, 2.0])]).unwrap());
        let g = enumerate_grid(&seg, 2).unwrap();
        assert_eq!(g.points(), &[p(&[0.0, 0.0]), p(&[0.5, 1.0]), p(&[1.0, 2.0])]);
        let poly = GroundSet::Polytope(VPolytope::new(vec![p(&[0.0, 1.0]), p(&[1.0, 0.0])]).unwrap());
        assert_eq!(enumerate_grid(&poly, 4).unwrap().len(), 5);
        assert_eq!(poly.grid_size(4), 5);
        assert!(enumerate_grid(&poly, 0).is_err());
        let big = GroundSet::Polytope(
            VPolytope::new((0..6).map(|i| p(&[i as f64])).collect()).unwrap(),
        );
        assert!(matches!(
            enumerate_grid_capped(&big, 50, 1000),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn shared_path_vertex_emitted_once() {
        let g = enumerate_grid(&GroundSet::Path(sharp_path()), 4).unwrap();
        assert_eq!(g.len(), 9);
    }

    #[test]
    fn curved_grid_hits_boundary_witness() {
        // x_ε for ε = 0.1 lies on the boundary and on the r = 100 lattice columns
        let g = enumerate_grid(&GroundSet::Curved(CurvedSet3), 100).unwrap();
        let hit = g.points().iter().any(|q| {
            let c = q.coords();
            (c[0] + 0.01).abs() < 1e-15 && (c[1] - 0.05).abs() < 1e-12 && (c[2] - 0.75).abs() < 1e-15
        });
        assert!(hit);
        for q in g.points() {
            assert!(curved_membership(q).unwrap());
        }
    }

    #[test]
    fn binomial_matches_counts() {
        assert_eq!(binomial(5, 1), 5);
        assert_eq!(binomial(34, 4), 46376);
        assert_eq!(binomial(4, 0), 1);
    }
}
