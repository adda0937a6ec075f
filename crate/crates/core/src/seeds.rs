//! Explicit small triangulations and mixed subdivisions used as seeds, plus
//! the table of known cube constants.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{CheckedAdd, One, Zero};
use rayon::prelude::*;

use crate::cayley::{
    decompose_cell, mixed_to_triangulation, mixed_weighted_size, refine_cell, triangulation_to_mixed,
    validate_mixed_partition, MixedCell, MixedSubdivision,
};
use crate::complex::{simplices_meet_properly, validate_face_to_face, Simplex, Triangulation};
use crate::error::{Error, Result};
use crate::geometry::{ambient_normalized_volume, LatticeScalar, Point, PointConfiguration};
use crate::linalg::{adjugate, bareiss_det, CheckedRing};
use crate::lp::{maximize, LpOutcome};
use crate::staircase::{lift_triangulation, KVector};

/// Known values for the `d`-cube.
#[derive(Clone, Debug, PartialEq)]
pub struct KnownConstants {
    pub d: usize,
    /// Smallest triangulation size, or the best known upper bound.
    pub phi: u64,
    pub phi_is_upper_bound: bool,
    /// Smallest efficiency (three decimals), or an upper bound.
    pub rho: f64,
    /// `2 / (d+1)^((d+1)/(2d))`.
    pub hadamard_lower: f64,
    /// Three-decimal lower bounds from the hyperbolic volume argument.
    pub smith_lower: f64,
}

// Smallest triangulations of I^1..I^7 and the best known for I^8, with the
// rounded efficiencies and the hyperbolic-volume lower bounds.
const PHI: [u64; 8] = [1, 2, 5, 16, 67, 308, 1493, 11944];
const RHO: [f64; 8] = [1.0, 1.0, 0.941, 0.904, 0.890, 0.868, 0.840, 0.859];
const SMITH: [f64; 8] = [1.0, 1.0, 0.941, 0.889, 0.833, 0.789, 0.751, 0.718];

/// Asymptotic efficiency targets of the two three-dimensional seeds.
pub const TARGET_I3D1: f64 = 0.8355;
pub const TARGET_I3D2: f64 = 0.8159;

pub fn hadamard_lower(d: usize) -> f64 {
    let d = d as f64;
    2.0 / (d + 1.0).powf((d + 1.0) / (2.0 * d))
}

pub fn known_constants(d: usize) -> Result<KnownConstants> {
    if !(1..=8).contains(&d) {
        return Err(Error::DimensionOutOfRange(d));
    }
    Ok(KnownConstants {
        d,
        phi: PHI[d - 1],
        phi_is_upper_bound: d == 8,
        rho: RHO[d - 1],
        hadamard_lower: hadamard_lower(d),
        smith_lower: SMITH[d - 1],
    })
}

/// Largest `d` for which [`unimodular_cube`] materializes `d!` simplices.
pub const UNIMODULAR_CUBE_LIMIT: usize = 8;

fn permutations(d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(d - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, d - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// The `d!` simplices `0 ≤ x_{π(1)} ≤ ⋯` of the standard triangulation.
pub fn unimodular_cube<T: LatticeScalar>(d: usize) -> Result<Triangulation<T>> {
    if d == 0 || d > UNIMODULAR_CUBE_LIMIT {
        return Err(Error::GuardExceeded { what: "unimodular cube dimension", value: d as u128, limit: UNIMODULAR_CUBE_LIMIT as u128 });
    }
    let simplices = permutations(d)
        .into_iter()
        .map(|perm| {
            let mut v = 0u32;
            let mut verts = vec![0u32];
            for &axis in &perm {
                v |= 1 << axis;
                verts.push(v);
            }
            Simplex::new(verts)
        })
        .collect();
    Triangulation::new(Arc::new(PointConfiguration::cube(d)), simplices)
}

/// Smallest triangulations of `I^1`, `I^2`, `I^3` (1, 2 and 5 simplices).
pub fn minimal_cube<T: LatticeScalar>(d: usize) -> Result<Triangulation<T>> {
    let simplices: Vec<Simplex> = match d {
        1 => vec![Simplex::from([0, 1])],
        2 => vec![Simplex::from([0, 1, 3]), Simplex::from([0, 2, 3])],
        // the even-weight vertices 1,2,4,7 span the central tetrahedron
        3 => vec![
            Simplex::from([0, 1, 2, 4]),
            Simplex::from([1, 2, 3, 7]),
            Simplex::from([1, 2, 4, 7]),
            Simplex::from([1, 4, 5, 7]),
            Simplex::from([2, 4, 6, 7]),
        ],
        _ => return Err(Error::DimensionOutOfRange(d)),
    };
    Triangulation::new(Arc::new(PointConfiguration::cube(d)), simplices)
}

/// Views a triangulation of `I^l` as one of `I^l × Δ^0`.
pub fn as_simplex_product<T: LatticeScalar>(t: &Triangulation<T>) -> Result<Triangulation<T>> {
    let l = t.dim();
    Triangulation::new(Arc::new(PointConfiguration::cube_times_simplex(l, 1)), t.simplices().to_vec())
}

/// A unimodular triangulation of `I^l × Δ^{m-1}` (weighted size `m^l`).
pub fn unimodular_seed<T: LatticeScalar>(l: usize, m: usize) -> Result<Triangulation<T>> {
    let base = as_simplex_product(&unimodular_cube::<T>(l)?)?;
    lift_triangulation(&base, &KVector::new(vec![m])?)
}

/// Regular triangulation induced by integer heights: all full-dimensional
/// `(d+1)`-subsets whose lifted affine hull lies strictly below every other
/// lifted point. Heights must be generic (checked through the volume sum).
pub fn regular_triangulation<T: LatticeScalar>(
    config: Arc<PointConfiguration<T>>,
    heights: &[i64],
) -> Result<Triangulation<T>> {
    let n = config.len();
    let d = config.dim();
    if heights.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: heights.len() });
    }
    let coords: Vec<Vec<i128>> = config
        .points()
        .iter()
        .map(|p| p.coords.iter().map(|c| c.to_i128()).collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Internal("coordinates exceed i128".into()))?;
    let chosen: Vec<Simplex> = k_subsets(n, d + 1)
        .par_iter()
        .filter_map(|s| lower_facet(&coords, heights, s).then(|| Simplex::new(s.iter().map(|&i| i as u32))))
        .collect();
    let t = Triangulation::new(config, chosen)?;
    if let Ok(expected) = ambient_normalized_volume(t.config().label()) {
        if t.volume_total() != expected {
            return Err(Error::SeedVerification("heights are not generic".into()));
        }
    }
    Ok(t)
}

/// Whether the lifted affine hull of `s` lies strictly below all other
/// lifted points.
fn lower_facet(coords: &[Vec<i128>], heights: &[i64], s: &[usize]) -> bool {
    fn check<R: CheckedRing + CheckedAdd + From<i64>>(coords: &[Vec<R>], heights: &[i64], s: &[usize]) -> Option<bool> {
        let d = coords[0].len();
        // rows (p, 1); m * adj = det * I, so (a, b) = adj * h / det
        let m: Vec<Vec<R>> =
            s.iter().map(|&i| coords[i].iter().cloned().chain(std::iter::once(R::one())).collect()).collect();
        if bareiss_det(m.clone())?.is_zero() {
            return Some(false);
        }
        let (det, adj) = adjugate(&m)?;
        let h: Vec<R> = s.iter().map(|&i| R::from(heights[i])).collect();
        let mut sol = Vec::with_capacity(d + 1);
        for row in &adj {
            let mut acc = R::zero();
            for (a, b) in row.iter().zip(&h) {
                acc = acc.checked_add(&a.checked_mul(b)?)?;
            }
            sol.push(acc);
        }
        let sign = det.signum();
        for (j, x) in coords.iter().enumerate() {
            if s.contains(&j) {
                continue;
            }
            let mut plane = sol[d].clone();
            for (c, a) in x.iter().zip(&sol) {
                plane = plane.checked_add(&c.checked_mul(a)?)?;
            }
            let above = R::from(heights[j]).checked_mul(&det)?.checked_sub(&plane)?.checked_mul(&sign)?;
            if !above.is_positive() {
                return Some(false);
            }
        }
        Some(true)
    }
    check(coords, heights, s).unwrap_or_else(|| {
        let big: Vec<Vec<BigInt>> = coords.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        check(&big, heights, s).expect("BigInt arithmetic does not overflow")
    })
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    if k <= n {
        go(0, n, k, &mut cur, &mut out);
    }
    out
}

/// The optimal fine mixed subdivision of `I² + I²`: one diagonal square and
/// four corner triangles.
fn square_pair<T: LatticeScalar>() -> MixedSubdivision<T> {
    let cells = vec![
        MixedCell::new(vec![vec![0, 3], vec![1, 2]]),
        MixedCell::new(vec![vec![0], vec![0, 1, 2]]),
        MixedCell::new(vec![vec![3], vec![1, 2, 3]]),
        MixedCell::new(vec![vec![0, 1, 3], vec![1]]),
        MixedCell::new(vec![vec![0, 2, 3], vec![2]]),
    ];
    MixedSubdivision::new(Arc::new(PointConfiguration::cube(2)), 2, cells).expect("two summands per cell")
}

/// Fine mixed subdivision of `m I²` with `⌊m²/4⌋` diagonal squares and
/// weighted size `⌈3m²/4⌉`: the first `⌈m/2⌉` summands use one diagonal
/// triangulation of the square, the rest the other.
pub fn square_family<T: LatticeScalar>(m: usize) -> Result<MixedSubdivision<T>> {
    if m == 0 {
        return Err(Error::InvalidSpec("m must be positive".into()));
    }
    let base = square_pair::<T>();
    if m == 1 {
        let cells = base
            .cells
            .iter()
            .filter(|c| c.summands[1].len() == 1)
            .map(|c| MixedCell::new(vec![c.summands[0].clone()]))
            .collect();
        return MixedSubdivision::new(base.base.clone(), 1, cells);
    }
    let k = KVector::new(vec![m.div_ceil(2), m / 2])?;
    let mut cells = Vec::new();
    for c in &base.cells {
        cells.extend(refine_cell(c, &k)?);
    }
    MixedSubdivision::new(base.base.clone(), m, cells)
}

/// Vertices of the convex hull of a lattice point set (exact LP test).
fn hull_vertices<T: LatticeScalar>(points: &[Point<T>]) -> Vec<Point<T>> {
    let rat = |x: &T| BigRational::from_integer(x.to_bigint().expect("integer scalar"));
    points
        .iter()
        .enumerate()
        .filter(|(i, p)| {
            let others: Vec<&Point<T>> = points.iter().enumerate().filter(|(j, _)| j != i).map(|(_, q)| q).collect();
            if others.is_empty() {
                return true;
            }
            let d = p.dim();
            let mut a: Vec<Vec<BigRational>> =
                (0..d).map(|r| others.iter().map(|q| rat(&q.coords[r])).collect()).collect();
            let mut b: Vec<BigRational> = p.coords.iter().map(rat).collect();
            a.push(vec![BigRational::one(); others.len()]);
            b.push(BigRational::one());
            let c = vec![BigRational::zero(); others.len()];
            matches!(maximize(&a, &b, &c), LpOutcome::Infeasible)
        })
        .map(|(_, p)| p.clone())
        .collect()
}

/// The sixteen regions of `[0,2]³`: eight corner tetrahedra and the
/// cubeoctahedron cut by three of its four hexagonal planes.
fn i3d1_regions() -> Vec<Vec<Point<i64>>> {
    let grid: Vec<[i64; 3]> =
        (0..27).map(|i| [i % 3, (i / 3) % 3, i / 9]).collect();
    let mut regions = Vec::new();
    for c in 0..8 {
        let corner = [2 * (c & 1), (c >> 1 & 1) * 2, (c >> 2 & 1) * 2];
        let mut verts = vec![Point::from_i64(&corner)];
        for axis in 0..3 {
            let mut q = corner;
            q[axis] += if corner[axis] == 0 { 1 } else { -1 };
            verts.push(Point::from_i64(&q));
        }
        regions.push(verts);
    }
    let planes: [fn(&[i64; 3]) -> i64; 3] =
        [|x| x[0] + x[1] + x[2] - 3, |x| x[0] + x[1] - x[2] - 1, |x| x[0] - x[1] + x[2] - 1];
    for signs in 0..8 {
        let pts: Vec<Point<i64>> = grid
            .iter()
            .filter(|x| x.iter().map(|c| (c - 1).abs()).sum::<i64>() <= 2)
            .filter(|x| {
                planes.iter().enumerate().all(|(j, f)| {
                    let v = f(x);
                    if signs >> j & 1 == 1 { v >= 0 } else { v <= 0 }
                })
            })
            .map(|x| Point::from_i64(x))
            .collect();
        let verts = hull_vertices(&pts);
        if verts.len() >= 4 {
            regions.push(verts);
        }
    }
    regions
}

fn cayley_simplex(cell: &MixedCell) -> Simplex {
    let m = cell.summands.len() as u32;
    Simplex::new(cell.summands.iter().enumerate().flat_map(|(i, b)| b.iter().map(move |&p| p * m + i as u32)))
}

/// The fine mixed subdivision of `I³ + I³` with 10 tetrahedra and 6
/// triangular prisms (weighted size 14/3). Self-verified.
pub fn seed_i3d1() -> Result<MixedSubdivision<i64>> {
    let base = Arc::new(PointConfiguration::<i64>::cube(3));
    let regions = i3d1_regions();
    if regions.len() != 16 {
        return Err(Error::SeedVerification(format!("expected 16 regions, found {}", regions.len())));
    }
    let options: Vec<Vec<MixedCell>> = regions.iter().map(|r| decompose_cell(&base, r, 2)).collect();
    if let Some(i) = options.iter().position(|o| o.is_empty()) {
        return Err(Error::SeedVerification(format!("region {i} is not a fine mixed cell")));
    }
    // choose a summand order per region so the Cayley simplices fit together
    let product = PointConfiguration::<i64>::cube_times_simplex(3, 2);
    let mut chosen: Vec<MixedCell> = Vec::new();
    fn search(
        i: usize,
        options: &[Vec<MixedCell>],
        product: &PointConfiguration<i64>,
        chosen: &mut Vec<MixedCell>,
    ) -> bool {
        if i == options.len() {
            return true;
        }
        for cell in &options[i] {
            let s = cayley_simplex(cell);
            if chosen.iter().all(|c| simplices_meet_properly(product, &cayley_simplex(c), &s)) {
                chosen.push(cell.clone());
                if search(i + 1, options, product, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    if !search(0, &options, &product, &mut chosen) {
        return Err(Error::SeedVerification("no compatible choice of summand orders".into()));
    }
    chosen.sort();
    let s = MixedSubdivision::new(base, 2, chosen)?;
    verify_seed(&s, &[(vec![3, 0], 10), (vec![2, 1], 6)], BigRational::new(14.into(), 3.into()))?;
    Ok(s)
}

/// Heights on `I³ × Δ²` (index `cube_vertex * 3 + simplex_vertex`) whose
/// regular triangulation is the 38-cell subdivision of `I³ + I³ + I³`.
pub const I3D2_HEIGHTS: [i64; 24] =
    [48, 50, 24, 59, 23, 54, 7, 27, 33, 56, 39, 29, 49, 24, 41, 20, 41, 28, 17, 29, 0, 40, 13, 39];

/// The fine mixed subdivision of `I³ + I³ + I³` with 20 triangular prisms,
/// 16 tetrahedra and 2 parallelepipeds (weighted size 44/3). Self-verified.
pub fn seed_i3d2() -> Result<MixedSubdivision<i64>> {
    let config = Arc::new(PointConfiguration::<i64>::cube_times_simplex(3, 3));
    let t = regular_triangulation(config, &I3D2_HEIGHTS)?.sorted();
    let s = triangulation_to_mixed(&t)?;
    verify_seed(
        &s,
        &[(vec![1, 1, 1], 2), (vec![2, 1, 0], 20), (vec![3, 0, 0], 16)],
        BigRational::new(44.into(), 3.into()),
    )?;
    Ok(s)
}

fn verify_seed(s: &MixedSubdivision<i64>, census: &[(Vec<usize>, usize)], weighted: BigRational) -> Result<()> {
    let got = s.census();
    let want: std::collections::BTreeMap<Vec<usize>, usize> = census.iter().cloned().collect();
    if got != want {
        return Err(Error::SeedVerification(format!("census {got:?}, expected {want:?}")));
    }
    let ws = mixed_weighted_size(s);
    if ws != weighted {
        return Err(Error::SeedVerification(format!("weighted size {ws}, expected {weighted}")));
    }
    let partition = validate_mixed_partition(s);
    if !partition.is_dissection {
        return Err(Error::SeedVerification(format!("not a partition: {:?}", partition.violations)));
    }
    let t = mixed_to_triangulation(s)?;
    let report = validate_face_to_face(&t);
    if !report.is_face_to_face {
        return Err(Error::SeedVerification(format!("Cayley triangulation not face-to-face: {:?}", report.violations)));
    }
    Ok(())
}

/// Names accepted by [`seed_triangulation`].
pub const SEED_NAMES: [&str; 5] = ["i3d1", "i3d2", "square_family", "minimal3", "unimodular3"];

/// A seed in the form the product construction consumes: a triangulation of
/// `I^l × Δ^{m-1}`.
pub fn seed_triangulation(name: &str, m: usize) -> Result<Triangulation<i64>> {
    match name {
        "i3d2" => mixed_to_triangulation(&seed_i3d2()?),
        "i3d1" => mixed_to_triangulation(&seed_i3d1()?),
        "square_family" => mixed_to_triangulation(&square_family(m)?),
        "minimal3" => as_simplex_product(&minimal_cube(3)?),
        "unimodular3" => unimodular_seed(3, m),
        _ => Err(Error::InvalidSpec(format!("unknown seed {name:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::efficiency;

    #[test]
    fn constants() {
        let c = known_constants(7).unwrap();
        assert_eq!(c.phi, 1493);
        assert_eq!(c.rho, 0.840);
        assert!((c.hadamard_lower - 0.610).abs() < 5e-4);
        assert_eq!(c.smith_lower, 0.751);
        assert!((known_constants(2).unwrap().hadamard_lower - 0.877).abs() < 5e-4);
        let one = known_constants(1).unwrap();
        assert_eq!((one.phi, one.rho, one.hadamard_lower, one.smith_lower), (1, 1.0, 1.0, 1.0));
        assert!(known_constants(9).is_err());
        for d in 1..=7 {
            assert!((efficiency(PHI[d - 1] as u128, d) - RHO[d - 1]).abs() < 5e-4);
        }
    }

    #[test]
    fn unimodular_cubes() {
        assert_eq!(unimodular_cube::<i64>(2).unwrap().len(), 2);
        let t = unimodular_cube::<i64>(3).unwrap();
        assert_eq!(t.len(), 6);
        assert!(t.is_unimodular());
        assert!(validate_face_to_face(&t).is_face_to_face);
        assert!(unimodular_cube::<i64>(9).is_err());
    }

    #[test]
    fn minimal_cubes() {
        for (d, n) in [(1, 1), (2, 2), (3, 5)] {
            let t = minimal_cube::<i64>(d).unwrap();
            assert_eq!(t.len(), n);
            assert!(validate_face_to_face(&t).is_face_to_face);
        }
        assert!(minimal_cube::<i64>(4).is_err());
    }

    #[test]
    fn square_pair_is_optimal_shape() {
        let s = square_pair::<i64>();
        assert!(validate_mixed_partition(&s).is_dissection);
        assert_eq!(mixed_weighted_size(&s), BigRational::from_integer(3.into()));
    }

    #[test]
    fn regular_triangulation_of_square() {
        let cfg = Arc::new(PointConfiguration::<i64>::cube(2));
        let t = regular_triangulation(cfg.clone(), &[0, 0, 0, 1]).unwrap();
        assert_eq!(t.simplices(), &[Simplex::from([0, 1, 2]), Simplex::from([1, 2, 3])]);
        assert!(regular_triangulation(cfg, &[0, 0, 0, 0]).is_err());
    }

    #[test]
    fn i3d1_regions_are_sixteen() {
        let r = i3d1_regions();
        assert_eq!(r.len(), 16);
        let sizes: Vec<usize> = r.iter().map(Vec::len).collect();
        assert_eq!(sizes.iter().filter(|&&s| s == 4).count(), 10);
        assert_eq!(sizes.iter().filter(|&&s| s == 6).count(), 6);
    }
}
