use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use simplexity::geometry::{affine_rank, ambient_normalized_volume, normalized_volume, ConfigLabel, Point, PointConfiguration};
use simplexity::linalg::{det_exact, rank_exact};

/// Determinant by rational Gaussian elimination.
fn rational_det(rows: &[Vec<i64>]) -> BigRational {
    let n = rows.len();
    let mut a: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect();
    let mut det = BigRational::from_integer(1.into());
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c].clone();
        for r in c + 1..n {
            let f = &a[r][c] / &a[c][c];
            let pivot = a[c].clone();
            for (x, p) in a[r].iter_mut().zip(&pivot).skip(c) {
                *x -= p * &f;
            }
        }
    }
    det
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

#[test]
fn label_volumes_and_sizes() {
    for (label, points, volume) in [
        ("cube(3)", 8, 6u64),
        ("simplex(4)", 5, 1),
        ("product(cube(2),simplex(2))", 12, 6 * 2),
        ("product(simplex(2),simplex(2))", 9, 6),
        ("minkowski-sum(cube(2),3)", 16, 2 * 9),
    ] {
        let l: ConfigLabel = label.parse().unwrap();
        assert_eq!(l.to_string(), label);
        let c = PointConfiguration::<i64>::from_label(&l).unwrap();
        assert_eq!(c.len(), points, "{label}");
        assert_eq!(ambient_normalized_volume(&l).unwrap(), volume, "{label}");
    }
    assert!("cube(x)".parse::<ConfigLabel>().is_err());
}

#[test]
fn cube_boundary_facets() {
    let c = PointConfiguration::<i64>::cube(3);
    assert!(c.lies_in_boundary_facet(&[0, 1, 2, 3]));
    assert!(c.lies_in_boundary_facet(&[0, 1, 3]));
    assert!(!c.lies_in_boundary_facet(&[0, 3, 5]));
    assert!(!c.lies_in_boundary_facet(&[1, 2, 4]));
}

#[test]
fn duplicate_points_rejected() {
    let pts: Vec<Point<i64>> = vec![Point::from_i64(&[0, 0]), Point::from_i64(&[0, 0]), Point::from_i64(&[1, 0])];
    assert!(PointConfiguration::new(ConfigLabel::Custom("dup".into()), pts).is_err());
}

#[test]
fn big_coordinates_fall_back_exactly() {
    let big = 1i64 << 62;
    let rows = vec![vec![big, 1, 0], vec![1, big, 1], vec![0, 1, big]];
    assert_eq!(BigRational::from_integer(det_exact(&rows)), rational_det(&rows));
}

proptest! {
    #[test]
    fn determinant_matches_rational_elimination(rows in prop::collection::vec(prop::collection::vec(-9i64..=9, 4), 4)) {
        let d = det_exact(&rows);
        prop_assert_eq!(BigRational::from_integer(d.clone()), rational_det(&rows));
        prop_assert_eq!(rank_exact(&rows) == 4, !d.is_zero());
    }

    #[test]
    fn volume_invariant_under_translation_and_order(
        pts in prop::collection::vec(prop::collection::vec(-5i64..=5, 3), 4),
        shift in prop::collection::vec(-100i64..=100, 3),
    ) {
        let p: Vec<Point<i64>> = pts.iter().map(|c| Point::from_i64(c)).collect();
        let refs: Vec<&Point<i64>> = p.iter().collect();
        let v = normalized_volume(&refs).unwrap();
        let rows: Vec<Vec<i64>> = (1..4).map(|i| (0..3).map(|j| pts[i][j] - pts[0][j]).collect()).collect();
        prop_assert_eq!(BigInt::from(v.value().clone()), rational_det(&rows).abs().to_integer());
        let moved: Vec<Point<i64>> = pts.iter().rev().map(|c| Point::from_i64(&[c[0] + shift[0], c[1] + shift[1], c[2] + shift[2]])).collect();
        let mrefs: Vec<&Point<i64>> = moved.iter().collect();
        prop_assert_eq!(normalized_volume(&mrefs).unwrap(), v.clone());
        prop_assert_eq!(affine_rank(&refs).unwrap() == 3, !v.is_zero());
    }

    #[test]
    fn unit_simplex_volume_is_one(k in 1usize..7) {
        let c = PointConfiguration::<i64>::simplex(k);
        let refs: Vec<&Point<i64>> = c.points().iter().collect();
        prop_assert_eq!(normalized_volume(&refs).unwrap(), 1u64);
        prop_assert_eq!(ambient_normalized_volume(c.label()).unwrap(), 1u64);
        prop_assert_eq!(ambient_normalized_volume(&ConfigLabel::Cube(k)).unwrap(), factorial(k));
    }
}
