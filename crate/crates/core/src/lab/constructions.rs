//! The catalogued sets on which the stability and convergence claims are
//! tested, plus the two closeness predicates compared on the three-point set.

use crate::error::{Error, Result};
use crate::lexcore::{distortion_full, sorted_values, Point};
use crate::setrep::{FiniteSet, PolyPath};

/// `β` in the rate-segment construction.
pub const RATE_BETA: f64 = 2.0 / 3.0;

/// The three vertices `(x*, x′, x″)` of the sharp-lower path in `R^n`.
pub fn sharp_lower_points(n: usize) -> Result<(Point, Point, Point)> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!("sharp-lower set needs n >= 8, got {n}")));
    }
    let mut star = vec![0.0; n];
    star[n - 1] = 1.0;
    let mut prime = vec![0.0; n];
    prime[n - 1] = 0.5;
    let mut second = vec![0.25; n];
    second[0] = -0.5;
    second[n - 1] = 0.5;
    Ok((
        Point::from_finite(star),
        Point::from_finite(prime),
        Point::from_finite(second),
    ))
}

/// Two segments `conv{x″, x′} ∪ conv{x′, x*}` sharing `x′`, listed as
/// `[x″, x′, x*]` so that `λ = 1` on the last segment is the lexmax `x*`.
pub fn make_sharp_lower_set(n: usize) -> Result<PolyPath> {
    let (star, prime, second) = sharp_lower_points(n)?;
    PolyPath::new(vec![second, prime, star])
}

/// Segment whose exact `L_c` minimizer keeps `σ_k` a constant fraction below
/// the lexmax for all `c` up to `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSegment {
    /// Vertices `[x′, x*]`.
    pub path: PolyPath,
    pub epsilon: f64,
    pub x_star: Point,
    pub x_prime: Point,
    pub k: usize,
    pub a: f64,
}

/// `ε` solving `a = (1/β) log((2β − 1 − ε)/ε)` for `β = 2/3`.
pub fn rate_epsilon(a: f64) -> f64 {
    (2.0 * RATE_BETA - 1.0) / ((a * RATE_BETA).exp() + 1.0)
}

pub fn make_rate_segment(n: usize, k: usize, a: f64) -> Result<RateSegment> {
    if !(3 <= k && k <= n) {
        return Err(Error::InvalidParameter(format!("need n >= k >= 3, got n={n}, k={k}")));
    }
    if !(a >= 1.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("need finite a >= 1, got {a}")));
    }
    let eps = rate_epsilon(a);
    assert!(eps > 0.0 && eps <= 0.125, "epsilon {eps} outside (0, 1/8]");
    // 1-based positions: x* has ε before k and 1 from k on; x′ has 0, then ε,
    // then β at k−1 and k, then 1.
    let x_star: Vec<f64> = (1..=n).map(|i| if i < k { eps } else { 1.0 }).collect();
    let x_prime: Vec<f64> = (1..=n)
        .map(|i| match i {
            1 => 0.0,
            i if i < k - 1 => eps,
            i if i <= k => RATE_BETA,
            _ => 1.0,
        })
        .collect();
    let x_star = Point::from_finite(x_star);
    let x_prime = Point::from_finite(x_prime);
    Ok(RateSegment {
        path: PolyPath::new(vec![x_prime.clone(), x_star.clone()])?,
        epsilon: eps,
        x_star,
        x_prime,
        k,
        a,
    })
}

/// `{(10,1,1), (10−ε,1−ε,1−ε), (5,5,1−ε)}`.
pub fn make_hartman_set(eps: f64) -> Result<FiniteSet> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0,1), got {eps}")));
    }
    FiniteSet::new(vec![
        Point::from_finite(vec![10.0, 1.0, 1.0]),
        Point::from_finite(vec![10.0 - eps, 1.0 - eps, 1.0 - eps]),
        Point::from_finite(vec![5.0, 5.0, 1.0 - eps]),
    ])
}

/// The curved-set point `(−ε², ε/2, 3/4)`, a possible output at tolerance ε
/// that stays `1/4` below the lexmax `(0,0,1)` in its largest component.
pub fn curved_witness(eps: f64) -> Point {
    Point::from_finite(vec![-eps * eps, eps / 2.0, 0.75])
}

pub fn curved_lexmax() -> Point {
    Point::from_finite(vec![0.0, 0.0, 1.0])
}

/// ε-close in the distortion sense: `σ_i(x) ≥ σ_i(x*) − ε` for all `i`.
pub fn close_ours(x: &Point, x_star: &Point, eps: f64) -> Result<bool> {
    Ok(distortion_full(x_star, x)? <= eps)
}

/// ε-close in the domination sense: no `y` in the set beats `x` by more than
/// `ε` at the first index where it is not at least as large.
pub fn close_hartman(x: &Point, set: &FiniteSet, eps: f64) -> Result<bool> {
    if !set.points().contains(x) {
        return Err(Error::NotInSet);
    }
    let xs = sorted_values(x.coords());
    let dominated = set.points().iter().any(|y| {
        let ys = sorted_values(y.coords());
        (0..xs.len()).any(|k| ys[..k].iter().zip(&xs).all(|(a, b)| a >= b) && ys[k] > xs[k] + eps)
    });
    Ok(!dominated)
}

/// Both closeness verdicts for one point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosenessVerdict {
    pub ours: bool,
    pub hartman: bool,
}

pub fn closeness(x: &Point, set: &FiniteSet, x_star: &Point, eps: f64) -> Result<ClosenessVerdict> {
    Ok(ClosenessVerdict {
        ours: close_ours(x, x_star, eps)?,
        hartman: close_hartman(x, set, eps)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexcore::{lexmax_finite, linf_bound};

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sharp_lower_vertices() {
        let path = make_sharp_lower_set(8).unwrap();
        let v = path.vertices();
        assert_eq!(v[2], p(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]));
        assert_eq!(v[1], p(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5]));
        assert_eq!(v[0], p(&[-0.5, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.5]));
        assert_eq!(linf_bound(v).unwrap(), 1.0);
        assert!(make_sharp_lower_set(7).is_err());
    }

    #[test]
    fn rate_segment_examples() {
        let r = make_rate_segment(3, 3, 1.0).unwrap();
        let e = r.epsilon;
        assert!((e - 0.113_081_2).abs() < 1e-7, "{e}");
        assert_eq!(r.x_star, p(&[e, e, 1.0]));
        assert_eq!(r.x_prime, p(&[0.0, 2.0 / 3.0, 2.0 / 3.0]));
        let r = make_rate_segment(5, 4, 2.0).unwrap();
        let closed = (1.0 / 3.0) / ((4.0f64 / 3.0).exp() + 1.0);
        assert!((r.epsilon - closed).abs() < 1e-15);
        let e = r.epsilon;
        let b = RATE_BETA;
        assert_eq!(r.x_star, p(&[e, e, e, 1.0, 1.0]));
        assert_eq!(r.x_prime, p(&[0.0, e, b, b, 1.0]));
        assert!(make_rate_segment(3, 4, 1.0).is_err());
        assert!(make_rate_segment(4, 3, 0.5).is_err());
    }

    #[test]
    fn rate_epsilon_decreases_in_a() {
        let mut prev = rate_epsilon(1.0);
        for a in [1.5, 2.0, 4.0, 8.0, 32.0, 200.0] {
            let e = rate_epsilon(a);
            assert!(e < prev && e > 0.0);
            prev = e;
        }
        assert!(rate_epsilon(1000.0) < 1e-200);
    }

    #[test]
    fn hartman_set_and_closeness() {
        let s = make_hartman_set(0.5).unwrap();
        assert_eq!(s.points()[1], p(&[9.5, 0.5, 0.5]));
        assert_eq!(s.points()[2], p(&[5.0, 5.0, 0.5]));
        let lex = lexmax_finite(s.points()).unwrap();
        assert_eq!(lex, vec![p(&[10.0, 1.0, 1.0])]);
        let star = &lex[0];
        let verdicts: Vec<_> = s
            .points()
            .iter()
            .map(|x| closeness(x, &s, star, 0.5).unwrap())
            .collect();
        assert_eq!(verdicts.iter().map(|v| v.ours).collect::<Vec<_>>(), [true, true, false]);
        assert_eq!(verdicts.iter().map(|v| v.hartman).collect::<Vec<_>>(), [true, false, true]);
        assert!(close_hartman(&p(&[0.0, 0.0, 0.0]), &s, 0.5).is_err());
        assert!(make_hartman_set(1.0).is_err());
        assert!(close_ours(&p(&[1.0]), &p(&[1.0, 2.0]), 0.1).is_err());
    }
}
