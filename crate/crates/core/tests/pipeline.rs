use simplexity::complex::{efficiency, validate_face_to_face, Triangulation};
use simplexity::pipeline::{
    build_cube_haiman, build_cube_recursive, haiman_size, report_rows, rows_to_csv, PipelineColoring, PipelineSpec, SeedChoice,
    CSV_HEADER,
};
use simplexity::seeds::{hadamard_lower, minimal_cube};

#[test]
fn four_cube_from_i3d1_has_sixteen_simplices() {
    let spec = PipelineSpec {
        m: 2,
        seed: SeedChoice::I3d1,
        coloring: PipelineColoring::Balanced,
        ..PipelineSpec::new(4)
    };
    let out = build_cube_recursive(&spec).unwrap();
    let t = out.triangulation.unwrap();
    assert_eq!(t.len(), 16);
    assert!(out.report.validation.unwrap().passed());
    let back = Triangulation::<i64>::from_json(&t.to_json().unwrap()).unwrap();
    assert!(validate_face_to_face(&back).is_face_to_face);
}

#[test]
fn small_builds_are_deterministic_and_valid() {
    for d in 1..=6 {
        let a = build_cube_recursive(&PipelineSpec::new(d)).unwrap();
        let b = build_cube_recursive(&PipelineSpec::new(d)).unwrap();
        let (ta, tb) = (a.triangulation.unwrap(), b.triangulation.unwrap());
        assert_eq!(ta.simplices(), tb.simplices());
        let v = a.report.validation.clone().unwrap();
        assert!(v.passed() && v.face_to_face_checked, "d={d}");
        assert!(a.report.steps_within_bound());
        assert!(efficiency(ta.len() as u128, d) >= hadamard_lower(d));
    }
}

#[test]
fn other_seeds_build_valid_cubes() {
    for spec in [
        PipelineSpec { l: 2, m: 2, seed: SeedChoice::SquareFamily, ..PipelineSpec::new(5) },
        PipelineSpec { l: 2, m: 3, seed: SeedChoice::Unimodular, coloring: PipelineColoring::Balanced, ..PipelineSpec::new(4) },
    ] {
        let out = build_cube_recursive(&spec).unwrap();
        assert!(out.report.validation.as_ref().unwrap().passed(), "{spec:?}");
        assert!(out.report.steps_within_bound());
    }
}

#[test]
fn haiman_products_and_submultiplicativity() {
    let t1 = minimal_cube::<i64>(1).unwrap();
    assert_eq!(build_cube_haiman(1, 1, &t1, &t1).unwrap().len(), 2);
    let t2 = minimal_cube::<i64>(2).unwrap();
    let t3 = minimal_cube::<i64>(3).unwrap();
    let t5 = build_cube_haiman(2, 3, &t2, &t3).unwrap();
    assert_eq!(t5.len(), 2 * 5 * 10);
    assert!(validate_face_to_face(&t5).is_face_to_face);
    assert!(build_cube_haiman(3, 2, &t2, &t3).is_err());
    // rho^(k+l) <= rho_k^k rho_l^l on constructed data
    let rho = |size: usize, d: usize| efficiency(size as u128, d).powi(d as i32);
    assert!(rho(t5.len(), 5) <= rho(t2.len(), 2) * rho(t3.len(), 3) + 1e-12);
    assert_eq!(haiman_size(6).unwrap(), 500);
}

#[test]
fn report_rows_cover_every_dimension() {
    let rows = report_rows(8, &PipelineSpec::new(8)).unwrap();
    assert_eq!(rows.iter().map(|r| r.d).collect::<Vec<_>>(), (1..=8).collect::<Vec<_>>());
    assert!(rows.iter().all(|r| r.efficiency >= r.hadamard));
    assert_eq!(rows[6].rho_known, Some(0.840));
    assert!(rows[6].size >= 1493);
    let csv = rows_to_csv(&rows);
    assert!(csv.starts_with(CSV_HEADER));
    assert_eq!(csv.lines().count(), 9);
    assert!(report_rows(0, &PipelineSpec::new(1)).is_err());
}
