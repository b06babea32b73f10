//! Sorting functions, the lexicographic order on sorted views, and
//! lexicographic distortion.
//!
//! Indices handed to [`sigma`] and stored in an [`IndexSet`] are 1-based,
//! so `sigma(x, 1)` is the smallest component of `x`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Absolute tolerance for comparing reals in invariant checks.
pub const TOL: f64 = 1e-12;

/// A vector in R^n with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyPoint);
        }
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self(coords))
    }

    /// Builds a point from coordinates already known to be finite.
    ///
    /// Panics on non-finite input; meant for internal constructions.
    pub(crate) fn from_finite(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty() && coords.iter().all(|v| v.is_finite()));
        Self(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn sorted(&self) -> SortedView {
        sort_components(self)
    }

    /// `max_i |x_i|`.
    pub fn linf_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max_i |x_i - y_i|`.
    pub fn linf_distance(&self, other: &Point) -> Result<f64> {
        check_dims(self, other)?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

/// Non-decreasing rearrangement of a point together with the permutation
/// that produced it. `source_perm[i]` is the 0-based original index of the
/// value stored at sorted position `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedView {
    pub values: Vec<f64>,
    pub source_perm: Vec<usize>,
}

impl SortedView {
    /// `σ_k` with 1-based `k`.
    pub fn sigma(&self, k: usize) -> Result<f64> {
        check_index(k, self.values.len())?;
        Ok(self.values[k - 1])
    }
}

/// A subset of `{1..n}` (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IndexSet(BTreeSet<usize>);

impl IndexSet {
    pub fn new<I: IntoIterator<Item = usize>>(members: I) -> Result<Self> {
        let set: BTreeSet<usize> = members.into_iter().collect();
        if set.contains(&0) {
            return Err(Error::InvalidIndexSet("indices are 1-based".into()));
        }
        Ok(Self(set))
    }

    pub fn empty() -> Self {
        Self(BTreeSet::new())
    }

    /// `[n] = {1..n}`.
    pub fn all(n: usize) -> Self {
        Self((1..=n).collect())
    }

    pub fn single(k: usize) -> Result<Self> {
        Self::new([k])
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// Ensures every member lies in `1..=n`.
    pub fn check_within(&self, n: usize) -> Result<()> {
        match self.max() {
            Some(m) if m > n => Err(Error::IndexOutOfRange { index: m, n }),
            _ => Ok(()),
        }
    }
}

pub(crate) fn check_dims(x: &Point, y: &Point) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    Ok(())
}

pub(crate) fn check_index(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, n });
    }
    Ok(())
}

/// Sorts components ascending; ties keep the lower original index first.
pub fn sort_components(x: &Point) -> SortedView {
    let mut perm: Vec<usize> = (0..x.dim()).collect();
    // stable sort keeps equal values in original index order
    perm.sort_by(|&a, &b| x.0[a].total_cmp(&x.0[b]));
    let values = perm.iter().map(|&i| x.0[i]).collect();
    SortedView {
        values,
        source_perm: perm,
    }
}

/// Sorted copy of raw coordinates, used on hot paths that never need the
/// permutation.
pub(crate) fn sorted_values(coords: &[f64]) -> Vec<f64> {
    let mut v = coords.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// The k-th smallest component (1-based).
pub fn sigma(x: &Point, k: usize) -> Result<f64> {
    check_index(k, x.dim())?;
    Ok(sorted_values(&x.0)[k - 1])
}

/// Compares two sorted slices lexicographically.
pub(crate) fn cmp_sorted(a: &[f64], b: &[f64]) -> Ordering {
    for (u, v) in a.iter().zip(b) {
        match u.total_cmp(v) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Ordering of `x` relative to `y` under `≥_σ`. Points with equal sorted
/// views compare `Equal`.
pub fn lex_cmp(x: &Point, y: &Point) -> Result<Ordering> {
    check_dims(x, y)?;
    Ok(cmp_sorted(&sorted_values(&x.0), &sorted_values(&y.0)))
}

/// `x ≥_σ y`.
pub fn lex_ge(x: &Point, y: &Point) -> Result<bool> {
    Ok(lex_cmp(x, y)? != Ordering::Less)
}

/// All lexicographic maxima of a finite list, in input order.
pub fn lexmax_finite(points: &[Point]) -> Result<Vec<Point>> {
    let first = points.first().ok_or(Error::EmptyInput("lexmax of no points"))?;
    for p in points {
        check_dims(first, p)?;
    }
    let sorted: Vec<Vec<f64>> = points.iter().map(|p| sorted_values(&p.0)).collect();
    let best = sorted
        .iter()
        .max_by(|a, b| cmp_sorted(a, b))
        .expect("nonempty");
    Ok(points
        .iter()
        .zip(&sorted)
        .filter(|(_, s)| cmp_sorted(s, best) == Ordering::Equal)
        .map(|(p, _)| p.clone())
        .collect())
}

/// `d_I(x*, x) = max_{k∈I} max(0, σ_k(x*) − σ_k(x))`. Not symmetric.
pub fn distortion(x_star: &Point, x: &Point, index_set: &IndexSet) -> Result<f64> {
    check_dims(x_star, x)?;
    if index_set.is_empty() {
        return Err(Error::InvalidIndexSet("distortion needs a nonempty index set".into()));
    }
    index_set.check_within(x.dim())?;
    let s_star = sorted_values(&x_star.0);
    let s = sorted_values(&x.0);
    Ok(index_set
        .iter()
        .map(|k| (s_star[k - 1] - s[k - 1]).max(0.0))
        .fold(0.0, f64::max))
}

/// Distortion over all of `[n]`.
pub fn distortion_full(x_star: &Point, x: &Point) -> Result<f64> {
    distortion(x_star, x, &IndexSet::all(x_star.dim()))
}

/// Largest ℓ∞ norm over the given points. For a convex set given by its
/// vertices this equals the norm of the whole set.
pub fn linf_bound(points: &[Point]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyInput("linf bound of no points"));
    }
    Ok(points.iter().map(Point::linf_norm).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    fn sharp_pair() -> (Point, Point) {
        let mut star = vec![0.0; 8];
        star[7] = 1.0;
        let mut dd = vec![0.25; 8];
        dd[0] = -0.5;
        dd[7] = 0.5;
        (p(&star), p(&dd))
    }

    #[test]
    fn rejects_bad_points() {
        assert_eq!(Point::new(vec![]), Err(Error::EmptyPoint));
        assert!(matches!(
            Point::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1, .. })
        ));
        assert!(Point::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn sorts_with_stable_ties() {
        let s = sort_components(&p(&[2.0, 1.0, 2.0]));
        assert_eq!(s.values, vec![1.0, 2.0, 2.0]);
        assert_eq!(s.source_perm, vec![1, 0, 2]);
        assert_eq!(sort_components(&p(&[7.0])).values, vec![7.0]);
        assert_eq!(sort_components(&p(&[5.0, 2.0, 4.0])).values, vec![2.0, 4.0, 5.0]);
    }

    #[test]
    fn sigma_examples() {
        let x = p(&[2.0, 1.0, 2.0]);
        assert_eq!(sigma(&x, 1).unwrap(), 1.0);
        assert_eq!(sigma(&x, 2).unwrap(), 2.0);
        assert_eq!(sigma(&x, 3).unwrap(), 2.0);
        assert!(matches!(sigma(&x, 0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(sigma(&x, 4), Err(Error::IndexOutOfRange { .. })));
        let c = p(&[3.5; 5]);
        for k in 1..=5 {
            assert_eq!(sigma(&c, k).unwrap(), 3.5);
        }
        let (_, dd) = sharp_pair();
        assert_eq!(sigma(&dd, 1).unwrap(), -0.5);
    }

    #[test]
    fn lex_ge_examples() {
        let x1 = p(&[5.0, 2.0, 4.0]);
        let x2 = p(&[2.0, 6.0, 3.0]);
        let x3 = p(&[8.0, 7.0, 1.0]);
        assert!(lex_ge(&x1, &x2).unwrap());
        assert!(!lex_ge(&x2, &x1).unwrap());
        assert!(lex_ge(&x1, &x1).unwrap());
        assert!(!lex_ge(&x3, &x1).unwrap());
        assert!(matches!(
            lex_ge(&x1, &p(&[1.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lexmax_examples() {
        let intro = vec![p(&[5.0, 2.0, 4.0]), p(&[2.0, 6.0, 3.0]), p(&[8.0, 7.0, 1.0])];
        assert_eq!(lexmax_finite(&intro).unwrap(), vec![p(&[5.0, 2.0, 4.0])]);
        assert_eq!(lexmax_finite(&intro[..1]).unwrap(), vec![intro[0].clone()]);
        let swapped = vec![p(&[1.0, 2.0]), p(&[2.0, 1.0])];
        assert_eq!(lexmax_finite(&swapped).unwrap(), swapped);
        assert!(matches!(lexmax_finite(&[]), Err(Error::EmptyInput(_))));
        assert!(lexmax_finite(&[p(&[1.0]), p(&[1.0, 2.0])]).is_err());
    }

    #[test]
    fn distortion_examples() {
        let (star, dd) = sharp_pair();
        let all = IndexSet::all(8);
        assert_eq!(distortion(&star, &dd, &all).unwrap(), 0.5);
        assert_eq!(distortion(&dd, &star, &all).unwrap(), 0.25);
        assert_eq!(distortion(&dd, &dd, &IndexSet::single(3).unwrap()).unwrap(), 0.0);
        assert!(distortion(&star, &dd, &IndexSet::empty()).is_err());
        assert!(distortion(&star, &dd, &IndexSet::single(9).unwrap()).is_err());
        assert!(IndexSet::new([0]).is_err());
    }

    #[test]
    fn linf_examples() {
        assert_eq!(linf_bound(&[p(&[0.0, 0.0])]).unwrap(), 0.0);
        assert_eq!(linf_bound(&[p(&[-2.0, 1.0]), p(&[0.0, 3.0])]).unwrap(), 3.0);
        assert!(linf_bound(&[]).is_err());
    }

    #[test]
    fn display_is_compact() {
        assert_eq!(p(&[5.0, 2.0, 4.0]).to_string(), "(5,2,4)");
        assert_eq!(p(&[-0.5, 0.25]).to_string(), "(-0.5,0.25)");
    }
}
