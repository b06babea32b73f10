//! Library results checked against slow, independently written references.

use lexopt::expmin::{exp_loss, minimize_on_finite, minimize_on_path};
use lexopt::filling::possible_output_set;
use lexopt::lab::corpus::{random_finite_set, rng};
use lexopt::lab::{make_rate_segment, make_sharp_lower_set, sharp_lower_points};
use lexopt::setrep::path_point;
use lexopt::{lexmax_finite, FiniteSet, GroundSet, Point, PolyPath};

fn sorted(p: &Point) -> Vec<f64> {
    let mut v = p.coords().to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Lexmax by pairwise comparison of sorted views.
fn lexmax_reference(points: &[Point]) -> Vec<Point> {
    points
        .iter()
        .filter(|x| points.iter().all(|y| sorted(y) <= sorted(x)))
        .cloned()
        .collect()
}

/// Possible outputs straight from the definition: for each round `k`, the
/// best `σ_k` among points whose first `k−1` sorted values dominate `x`'s.
fn outputs_reference(points: &[Point], eps: f64) -> Vec<Point> {
    points
        .iter()
        .filter(|x| {
            let xs = sorted(x);
            (0..xs.len()).all(|k| {
                let best = points
                    .iter()
                    .map(sorted)
                    .filter(|ys| (0..k).all(|i| ys[i] >= xs[i]))
                    .map(|ys| ys[k])
                    .fold(xs[k], f64::max);
                xs[k] >= best - eps - if eps == 0.0 { 0.0 } else { 1e-12 }
            })
        })
        .cloned()
        .collect()
}

/// Smallest loss over a dense λ grid on every segment.
fn path_grid_min(path: &PolyPath, c: f64, steps: usize) -> f64 {
    (0..path.segments())
        .flat_map(|s| (0..=steps).map(move |i| (s, i as f64 / steps as f64)))
        .map(|(s, l)| exp_loss(&path_point(path, s, l).unwrap(), c).unwrap())
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn lexmax_matches_pairwise_reference() {
    let mut r = rng(101);
    for _ in 0..300 {
        let s = random_finite_set(&mut r, 5, 30);
        assert_eq!(lexmax_finite(s.points()).unwrap(), lexmax_reference(s.points()));
    }
}

#[test]
fn possible_outputs_match_definition() {
    let mut r = rng(202);
    for i in 0..300 {
        let s = random_finite_set(&mut r, 4, 25);
        let eps = [0.0, 0.1, 0.5, 1.0, 2.5][i % 5];
        let got = possible_output_set(&GroundSet::Finite(s.clone()), eps).unwrap();
        assert_eq!(got.points(), outputs_reference(s.points(), eps).as_slice(), "eps {eps}");
    }
}

#[test]
fn intro_set_outputs() {
    let p = |v: &[f64]| Point::new(v.to_vec()).unwrap();
    let set = FiniteSet::new(vec![p(&[5.0, 2.0, 4.0]), p(&[2.0, 6.0, 3.0]), p(&[8.0, 7.0, 1.0])]).unwrap();
    let ground = GroundSet::Finite(set);
    assert_eq!(possible_output_set(&ground, 0.0).unwrap().points(), [p(&[5.0, 2.0, 4.0])]);
    assert_eq!(possible_output_set(&ground, 1.0).unwrap().len(), 3);
}

#[test]
fn path_minimizer_beats_dense_grid() {
    let path = make_sharp_lower_set(8).unwrap();
    for c in [0.5, 2.0, 8.0, 16.0, 50.0] {
        let x = minimize_on_path(&path, c).unwrap();
        let got = exp_loss(&x, c).unwrap();
        let grid = path_grid_min(&path, c, 20_000);
        assert!(got <= grid * (1.0 + 1e-12), "c={c}: {got} vs grid {grid}");
    }
    // at c = 2 the loss still prefers the far corner to the lexmax
    let (star, _, second) = sharp_lower_points(8).unwrap();
    assert!(exp_loss(&second, 2.0).unwrap() < exp_loss(&star, 2.0).unwrap());
}

#[test]
fn rate_segment_minimizer_beats_dense_grid() {
    for (n, k, a) in [(3, 3, 1.0), (5, 4, 2.0), (6, 5, 4.0)] {
        let seg = make_rate_segment(n, k, a).unwrap();
        for c in [0.5, 1.0, a, 2.0 * a, 8.0] {
            let x = minimize_on_path(&seg.path, c).unwrap();
            let got = exp_loss(&x, c).unwrap();
            let grid = path_grid_min(&seg.path, c, 20_000);
            assert!(got <= grid * (1.0 + 1e-12), "a={a} c={c}: {got} vs grid {grid}");
        }
    }
}

#[test]
fn finite_minimizer_matches_brute_force() {
    let mut r = rng(303);
    for i in 0..200 {
        let s = random_finite_set(&mut r, 5, 20);
        let c = [0.1, 1.0, 3.0][i % 3];
        let x = minimize_on_finite(&s, c).unwrap();
        let losses: Vec<f64> = s.points().iter().map(|p| exp_loss(p, c).unwrap()).collect();
        let best = losses.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(exp_loss(&x, c).unwrap() <= best * (1.0 + 1e-12));
    }
}

#[test]
fn loss_of_known_points() {
    let p = |v: &[f64]| Point::new(v.to_vec()).unwrap();
    assert_eq!(exp_loss(&p(&[0.0, 0.0]), 3.0).unwrap(), 2.0);
    assert_eq!(exp_loss(&p(&[1.0, 2.0, 3.0]), 0.0).unwrap(), 3.0);
    let want = (-1.0f64).exp() + (-2.0f64).exp();
    assert!((exp_loss(&p(&[1.0, 2.0]), 1.0).unwrap() - want).abs() < 1e-15);
}
