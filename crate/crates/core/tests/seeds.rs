use num_rational::BigRational;
use simplexity::cayley::{
    count_area2_squares, mixed_to_triangulation, mixed_weighted_size, square_orientations, summand_projection,
    triangulation_to_mixed, validate_mixed_partition,
};
use simplexity::complex::{validate_face_to_face, weighted_size};
use simplexity::seeds::{seed_i3d1, seed_i3d2, square_family};

fn r(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

#[test]
fn i3d1_verified() {
    let s = seed_i3d1().unwrap();
    assert_eq!(s.len(), 16);
    assert_eq!(mixed_weighted_size(&s), r(14, 3));
    let t = mixed_to_triangulation(&s).unwrap();
    assert_eq!(weighted_size(&t).unwrap(), r(14, 3));
    assert!(validate_face_to_face(&t).is_face_to_face);
    let back = triangulation_to_mixed(&t).unwrap();
    assert_eq!(back.cells, s.cells);
    for i in 0..2 {
        let p = summand_projection(&s, i).unwrap();
        assert!(p.len() == 5 || p.len() == 6, "{}", p.len());
        assert!(validate_face_to_face(&p).is_face_to_face);
    }
}

#[test]
fn i3d2_verified() {
    let s = seed_i3d2().unwrap();
    assert_eq!(s.len(), 38);
    assert_eq!(mixed_weighted_size(&s), r(44, 3));
    assert!(validate_mixed_partition(&s).is_dissection);
}

#[test]
fn square_family_values() {
    for m in 1..=10usize {
        let s = square_family::<i64>(m).unwrap();
        let ws = mixed_weighted_size(&s);
        assert_eq!(ws, BigRational::from_integer(((3 * m * m).div_ceil(4) as i64).into()), "m={m}");
        let sq = count_area2_squares(&s).unwrap();
        assert_eq!(sq, m * m / 4);
        assert_eq!(ws, BigRational::from_integer(((m * m - sq) as i64).into()));
        let (a, b) = square_orientations(&s).unwrap();
        assert_eq!(a + b, m);
        assert_eq!(a * b, sq);
        assert!(validate_mixed_partition(&s).is_dissection, "m={m}");
        if m <= 4 {
            let t = mixed_to_triangulation(&s).unwrap();
            assert!(validate_face_to_face(&t).is_face_to_face, "m={m}");
        }
    }
}
