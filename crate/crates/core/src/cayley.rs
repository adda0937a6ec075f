//! The Cayley trick for `P × Δ^{m-1}`: triangulations correspond to fine
//! mixed subdivisions of `P + ⋯ + P`.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::factorial;
use crate::complex::{interiors_overlap, Simplex, Triangulation, ValidityReport, Violation, ViolationKind};
use crate::error::{Error, Result};
use crate::geometry::{ambient_normalized_volume, ConfigLabel, LatticeScalar, NormalizedVolume, Point, PointConfiguration};
use crate::linalg::{det_exact, rank_exact};
use crate::staircase::{lift_cell, multi_staircases, KVector};

/// `B₁ + ⋯ + B_m`, each summand a sorted set of base-vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MixedCell {
    pub summands: Vec<Vec<u32>>,
}

impl MixedCell {
    pub fn new(summands: Vec<Vec<u32>>) -> Self {
        let summands = summands
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        MixedCell { summands }
    }

    /// `(dim B₁, …, dim B_m)`; the simplex type of the Cayley simplex.
    pub fn type_vector(&self) -> Vec<usize> {
        self.summands.iter().map(|b| b.len().saturating_sub(1)).collect()
    }

    /// `∏ 1/(dim Bᵢ)!`.
    pub fn weight(&self) -> BigRational {
        let denom: BigInt = self.type_vector().into_iter().map(|t| BigInt::from(factorial(t))).product();
        BigRational::new(BigInt::one(), denom)
    }

    /// All sums `b₁ + ⋯ + b_m`, deduplicated.
    pub fn realize<T: LatticeScalar>(&self, base: &PointConfiguration<T>) -> Vec<Point<T>> {
        let d = base.dim();
        let mut acc: BTreeSet<Vec<T>> = BTreeSet::new();
        acc.insert(vec![T::zero(); d]);
        for b in &self.summands {
            acc = acc
                .iter()
                .flat_map(|s| {
                    b.iter().map(move |&v| {
                        s.iter().zip(&base.point(v).coords).map(|(x, y)| x.clone() + y.clone()).collect::<Vec<T>>()
                    })
                })
                .collect();
        }
        acc.into_iter().map(Point::new).collect()
    }
}

/// Distinct summands with multiplicities, in first-appearance order.
fn grouped(cell: &MixedCell) -> Vec<(&Vec<u32>, usize)> {
    let mut out: Vec<(&Vec<u32>, usize)> = Vec::new();
    for b in &cell.summands {
        match out.iter_mut().find(|(x, _)| *x == b) {
            Some(e) => e.1 += 1,
            None => out.push((b, 1)),
        }
    }
    out
}

fn edge_rows<T: LatticeScalar>(base: &PointConfiguration<T>, summands: &[&Vec<u32>]) -> Vec<Vec<T>> {
    summands
        .iter()
        .filter(|b| !b.is_empty())
        .flat_map(|b| {
            let p0 = base.point(b[0]);
            b[1..].iter().map(move |&v| base.point(v).sub(p0))
        })
        .collect()
}

/// Fine: summands non-empty, dimensions add up to `dim P`, and all edge
/// directions together are linearly independent.
pub fn check_fine<T: LatticeScalar>(base: &PointConfiguration<T>, cell: &MixedCell) -> Result<()> {
    let l = base.dim();
    if cell.summands.iter().any(|b| b.is_empty()) {
        return Err(Error::NonFineCell(format!("{:?} has an empty summand", cell.summands)));
    }
    if let Some(&bad) = cell.summands.iter().flatten().find(|&&v| v as usize >= base.len()) {
        return Err(Error::NonFineCell(format!("vertex {bad} out of range")));
    }
    let total: usize = cell.type_vector().iter().sum();
    if total != l {
        return Err(Error::NonFineCell(format!("{:?}: summand dimensions add to {total}, not {l}", cell.summands)));
    }
    let rows = edge_rows(base, &cell.summands.iter().collect::<Vec<_>>());
    if rank_exact(&rows) != l {
        return Err(Error::NonFineCell(format!("{:?}: summands are not complementary simplices", cell.summands)));
    }
    Ok(())
}

pub fn is_fine<T: LatticeScalar>(base: &PointConfiguration<T>, cell: &MixedCell) -> bool {
    check_fine(base, cell).is_ok()
}

/// Normalized volume of the realized cell. Repeated summands are treated as
/// dilations, so scaled cells are accepted as long as their distinct
/// summands form a fine cell.
pub fn mixed_cell_volume<T: LatticeScalar>(base: &PointConfiguration<T>, cell: &MixedCell) -> Result<NormalizedVolume> {
    let groups = grouped(cell);
    let distinct = MixedCell { summands: groups.iter().map(|(b, _)| (*b).clone()).collect() };
    check_fine(base, &distinct)?;
    let det = det_exact(&edge_rows(base, &groups.iter().map(|(b, _)| *b).collect::<Vec<_>>()));
    let mut v: BigUint = det.magnitude() * factorial(base.dim());
    for (b, c) in &groups {
        let t = b.len() - 1;
        v = v * BigUint::from(*c).pow(t as u32) / factorial(t);
    }
    Ok(NormalizedVolume(v))
}

/// Cells of a mixed subdivision of `P + ⋯ + P` (`m` summands).
#[derive(Clone, Debug)]
pub struct MixedSubdivision<T> {
    pub base: Arc<PointConfiguration<T>>,
    pub m: usize,
    pub cells: Vec<MixedCell>,
}

impl<T: LatticeScalar> MixedSubdivision<T> {
    pub fn new(base: Arc<PointConfiguration<T>>, m: usize, cells: Vec<MixedCell>) -> Result<Self> {
        if let Some(c) = cells.iter().find(|c| c.summands.len() != m) {
            return Err(Error::LengthMismatch { expected: m, found: c.summands.len() });
        }
        Ok(MixedSubdivision { base, m, cells })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Number of cells per type vector (sorted decreasingly), e.g. `[3,0]`.
    pub fn census(&self) -> std::collections::BTreeMap<Vec<usize>, usize> {
        let mut out = std::collections::BTreeMap::new();
        for c in &self.cells {
            let mut t = c.type_vector();
            t.sort_unstable_by(|a, b| b.cmp(a));
            *out.entry(t).or_insert(0) += 1;
        }
        out
    }
}

pub fn triangulation_to_mixed<T: LatticeScalar>(t: &Triangulation<T>) -> Result<MixedSubdivision<T>> {
    let (p, m) = t
        .config()
        .simplex_product_factor()
        .ok_or_else(|| Error::NotProduct(t.config().label().to_string()))?;
    let cells = t
        .simplices()
        .iter()
        .map(|s| {
            let mut summands = vec![Vec::new(); m];
            for &v in s.vertices() {
                summands[v as usize % m].push(v / m as u32);
            }
            MixedCell::new(summands)
        })
        .collect();
    MixedSubdivision::new(Arc::new(p), m, cells)
}

pub fn mixed_to_triangulation<T: LatticeScalar>(s: &MixedSubdivision<T>) -> Result<Triangulation<T>> {
    for c in &s.cells {
        check_fine(&s.base, c)?;
    }
    let config = PointConfiguration::product(&s.base, &PointConfiguration::simplex(s.m - 1));
    let m = s.m as u32;
    let simplices = s
        .cells
        .iter()
        .map(|c| {
            Simplex::new(c.summands.iter().enumerate().flat_map(|(i, b)| b.iter().map(move |&p| p * m + i as u32)))
        })
        .collect();
    Triangulation::new(Arc::new(config), simplices)
}

/// Replaces each summand `Bᵢ` by `kᵢ` copies of itself.
pub fn scale_mixed<T: LatticeScalar>(s: &MixedSubdivision<T>, kvec: &KVector) -> Result<MixedSubdivision<T>> {
    if kvec.m() != s.m {
        return Err(Error::LengthMismatch { expected: s.m, found: kvec.m() });
    }
    let cells = s
        .cells
        .iter()
        .map(|c| MixedCell {
            summands: c
                .summands
                .iter()
                .zip(kvec.as_slice())
                .flat_map(|(b, &k)| std::iter::repeat_n(b.clone(), k))
                .collect(),
        })
        .collect();
    MixedSubdivision::new(s.base.clone(), kvec.n(), cells)
}

/// The fine cells refining one scaled cell: the multi-staircases of the
/// lifted Cayley simplex, read back as mixed cells with `n` summands.
pub fn refine_cell(cell: &MixedCell, kvec: &KVector) -> Result<Vec<MixedCell>> {
    let m = cell.summands.len();
    let simplex = Simplex::new(cell.summands.iter().enumerate().flat_map(|(i, b)| b.iter().map(move |&p| p * m as u32 + i as u32)));
    let lifted = lift_cell(&simplex, m, kvec)?;
    let n = kvec.n();
    Ok(multi_staircases(&lifted, n)
        .into_iter()
        .map(|s| {
            let mut summands = vec![Vec::new(); n];
            for &v in s.vertices() {
                summands[v as usize % n].push(v / n as u32);
            }
            MixedCell::new(summands)
        })
        .collect())
}

pub fn mixed_weighted_size<T>(s: &MixedSubdivision<T>) -> BigRational {
    s.cells.iter().map(MixedCell::weight).fold(BigRational::zero(), |a, b| a + b)
}

fn require_square<T: LatticeScalar>(s: &MixedSubdivision<T>) -> Result<()> {
    if s.base.label() != &ConfigLabel::Cube(2) || !s.base.is_canonical() {
        return Err(Error::BaseNotSquare(s.base.label().to_string()));
    }
    Ok(())
}

/// Cells containing both diagonals of the unit square as summands.
pub fn count_area2_squares<T: LatticeScalar>(s: &MixedSubdivision<T>) -> Result<usize> {
    require_square(s)?;
    Ok(s.cells
        .iter()
        .filter(|c| c.summands.iter().any(|b| b == &[0, 3]) && c.summands.iter().any(|b| b == &[1, 2]))
        .count())
}

/// The distinct full-dimensional `i`-th summands as a triangulation of `P`.
pub fn summand_projection<T: LatticeScalar>(s: &MixedSubdivision<T>, i: usize) -> Result<Triangulation<T>> {
    if i >= s.m {
        return Err(Error::LengthMismatch { expected: s.m, found: i + 1 });
    }
    let full = s.base.dim() + 1;
    let cells: BTreeSet<Vec<u32>> =
        s.cells.iter().map(|c| c.summands[i].clone()).filter(|b| b.len() == full).collect();
    Triangulation::new(s.base.clone(), cells.into_iter().map(Simplex::from).collect())
}

/// For base `I²`: how many summand positions use the main diagonal (`a`) and
/// the anti-diagonal (`b`) triangulation.
pub fn square_orientations<T: LatticeScalar>(s: &MixedSubdivision<T>) -> Result<(usize, usize)> {
    require_square(s)?;
    let mut a = 0;
    let mut b = 0;
    for i in 0..s.m {
        let t = summand_projection(s, i)?;
        let uses = |x: u32, y: u32| t.simplices().iter().any(|sx| sx.contains(x) && sx.contains(y));
        if uses(0, 3) {
            a += 1;
        } else if uses(1, 2) {
            b += 1;
        }
    }
    Ok((a, b))
}

/// Exact check that the realized cells tile `P + ⋯ + P`: fineness, volume sum
/// and pairwise interior disjointness.
pub fn validate_mixed_partition<T: LatticeScalar>(s: &MixedSubdivision<T>) -> ValidityReport {
    let mut violations = Vec::new();
    let vols: Vec<Option<NormalizedVolume>> = s.cells.iter().map(|c| mixed_cell_volume(&s.base, c).ok()).collect();
    for (i, (c, v)) in s.cells.iter().zip(&vols).enumerate() {
        if v.is_none() || !is_fine(&s.base, c) {
            violations.push(Violation { simplices: vec![i], kind: ViolationKind::Degenerate });
        }
    }
    let volume_total: NormalizedVolume = vols.iter().flatten().cloned().sum();
    let expected = ambient_normalized_volume(&ConfigLabel::minkowski(s.base.label().clone(), s.m))
        .unwrap_or_else(|_| NormalizedVolume(BigUint::from(s.m).pow(s.base.dim() as u32) * factorial(s.base.dim())));
    if volume_total != expected {
        violations.push(Violation {
            simplices: vec![],
            kind: ViolationKind::VolumeMismatch { found: volume_total.clone(), expected },
        });
    }
    let realized: Vec<Vec<Point<T>>> = s.cells.par_iter().map(|c| c.realize(&s.base)).collect();
    let pairs: Vec<Violation> = (0..s.cells.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let realized = &realized;
            (i + 1..s.cells.len()).filter_map(move |j| {
                let a: Vec<&Point<T>> = realized[i].iter().collect();
                let b: Vec<&Point<T>> = realized[j].iter().collect();
                if separated_by_axis(&a, &b) || !interiors_overlap(&a, &b) {
                    None
                } else {
                    Some(Violation { simplices: vec![i, j], kind: ViolationKind::Overlap })
                }
            })
        })
        .collect();
    violations.extend(pairs);
    let ok = violations.is_empty();
    ValidityReport { is_dissection: ok, is_face_to_face: false, face_to_face_checked: false, volume_total, violations }
}

fn separated_by_axis<T: LatticeScalar>(a: &[&Point<T>], b: &[&Point<T>]) -> bool {
    let d = a[0].dim();
    (0..d).any(|r| {
        let amax = a.iter().map(|p| &p.coords[r]).max();
        let amin = a.iter().map(|p| &p.coords[r]).min();
        let bmax = b.iter().map(|p| &p.coords[r]).max();
        let bmin = b.iter().map(|p| &p.coords[r]).min();
        amax <= bmin || bmax <= amin
    })
}

/// All ways of writing a lattice polytope, given by its vertex set, as a fine
/// mixed cell `B₁ + ⋯ + B_m` over `base`.
pub fn decompose_cell<T: LatticeScalar>(base: &PointConfiguration<T>, vertices: &[Point<T>], m: usize) -> Vec<MixedCell> {
    let l = base.dim();
    let target: BTreeSet<Vec<T>> = vertices.iter().map(|p| p.coords.clone()).collect();
    // affinely independent subsets of the base, by dimension
    let nb = base.len();
    let mut candidates: Vec<Vec<u32>> = Vec::new();
    for mask in 1u64..(1u64 << nb) {
        let set: Vec<u32> = (0..nb as u32).filter(|&v| mask >> v & 1 == 1).collect();
        if set.len() > l + 1 {
            continue;
        }
        let rows = edge_rows(base, &[&set]);
        if rank_exact(&rows) == set.len() - 1 {
            candidates.push(set);
        }
    }
    let mut out = Vec::new();
    let mut current: Vec<Vec<u32>> = Vec::new();
    fn go<T: LatticeScalar>(
        base: &PointConfiguration<T>,
        candidates: &[Vec<u32>],
        target: &BTreeSet<Vec<T>>,
        m: usize,
        budget: usize,
        current: &mut Vec<Vec<u32>>,
        out: &mut Vec<MixedCell>,
    ) {
        if current.len() == m {
            if budget != 0 {
                return;
            }
            let cell = MixedCell { summands: current.clone() };
            let pts: BTreeSet<Vec<T>> = cell.realize(base).into_iter().map(|p| p.coords).collect();
            if &pts == target && is_fine(base, &cell) {
                out.push(cell);
            }
            return;
        }
        for c in candidates {
            let t = c.len() - 1;
            if t > budget {
                continue;
            }
            current.push(c.clone());
            go(base, candidates, target, m, budget - t, current, out);
            current.pop();
        }
    }
    go(base, &candidates, &target, m, l, &mut current, &mut out);
    out
}

#[derive(Serialize, Deserialize)]
struct MixedFile {
    base: String,
    m: usize,
    cells: Vec<Vec<Vec<u32>>>,
}

impl MixedSubdivision<i64> {
    pub fn to_json(&self) -> Result<String> {
        let file = MixedFile {
            base: self.base.label().to_string(),
            m: self.m,
            cells: self.cells.iter().map(|c| c.summands.clone()).collect(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MixedFile = serde_json::from_str(text)?;
        let label: ConfigLabel = file.base.parse()?;
        let base = PointConfiguration::from_label(&label)?;
        MixedSubdivision::new(Arc::new(base), file.m, file.cells.into_iter().map(MixedCell::new).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::validate_face_to_face;

    fn segment_prism() -> Triangulation<i64> {
        let cfg = Arc::new(PointConfiguration::cube_times_simplex(1, 2));
        Triangulation::new(cfg, vec![Simplex::from([0, 2, 3]), Simplex::from([0, 1, 3])]).unwrap()
    }

    #[test]
    fn segment_case() {
        let s = triangulation_to_mixed(&segment_prism()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.cells[0].summands, vec![vec![0, 1], vec![1]]);
        assert_eq!(s.cells[1].summands, vec![vec![0], vec![0, 1]]);
        let back = mixed_to_triangulation(&s).unwrap();
        assert_eq!(back.simplices(), segment_prism().simplices());
        let r = validate_mixed_partition(&s);
        assert!(r.is_dissection, "{:?}", r.violations);
        assert_eq!(mixed_weighted_size(&s), BigRational::from_integer(2.into()));
    }

    #[test]
    fn non_fine_rejected() {
        let base = Arc::new(PointConfiguration::<i64>::cube(2));
        // the whole square is not a simplex
        let s = MixedSubdivision::new(base.clone(), 1, vec![MixedCell::new(vec![vec![0, 1, 2, 3]])]).unwrap();
        assert!(matches!(mixed_to_triangulation(&s), Err(Error::NonFineCell(_))));
        // parallel segments are not complementary
        let s = MixedSubdivision::new(base, 2, vec![MixedCell::new(vec![vec![0, 1], vec![2, 3]])]).unwrap();
        assert!(mixed_to_triangulation(&s).is_err());
    }

    #[test]
    fn scaling_identity_and_volumes() {
        let s = triangulation_to_mixed(&segment_prism()).unwrap();
        let same = scale_mixed(&s, &KVector::ones(2)).unwrap();
        assert_eq!(same.cells, s.cells);
        let k = KVector::new(vec![2, 1]).unwrap();
        let scaled = scale_mixed(&s, &k).unwrap();
        assert_eq!(scaled.m, 3);
        let total: NormalizedVolume = scaled.cells.iter().map(|c| mixed_cell_volume(&s.base, c).unwrap()).sum();
        assert_eq!(total, 3);
        for (coarse, fine_src) in scaled.cells.iter().zip(&s.cells) {
            let fine = refine_cell(fine_src, &k).unwrap();
            let v: NormalizedVolume = fine.iter().map(|c| mixed_cell_volume(&s.base, c).unwrap()).sum();
            assert_eq!(v, mixed_cell_volume(&s.base, coarse).unwrap());
        }
    }

    #[test]
    fn decompose_square_cells() {
        let base = PointConfiguration::<i64>::cube(2);
        // the diagonal square of [0,2]^2 with vertices (1,0),(0,1),(2,1),(1,2)
        let verts: Vec<Point<i64>> = [[1, 0], [0, 1], [2, 1], [1, 2]].iter().map(|c| Point::from_i64(c)).collect();
        let found = decompose_cell(&base, &verts, 2);
        assert_eq!(found.len(), 2);
        assert!(found.contains(&MixedCell::new(vec![vec![0, 3], vec![1, 2]])));
        assert!(found.contains(&MixedCell::new(vec![vec![1, 2], vec![0, 3]])));
    }

    #[test]
    fn projection_of_trivial_subdivision() {
        let base = Arc::new(PointConfiguration::<i64>::cube(2));
        let s = MixedSubdivision::new(base, 1, vec![MixedCell::new(vec![vec![0, 1, 3]]), MixedCell::new(vec![vec![0, 2, 3]])]).unwrap();
        let t = summand_projection(&s, 0).unwrap();
        assert_eq!(t.len(), 2);
        assert!(validate_face_to_face(&t).is_face_to_face);
        assert_eq!(square_orientations(&s).unwrap(), (1, 0));
        assert_eq!(count_area2_squares(&s).unwrap(), 0);
    }

    #[test]
    fn json_round_trip() {
        let s = triangulation_to_mixed(&segment_prism()).unwrap();
        let back = MixedSubdivision::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back.cells, s.cells);
        assert_eq!(back.m, 2);
    }
}
