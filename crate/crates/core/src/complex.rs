//! Triangulations over a point configuration: exact validity checks, simplex
//! types, weights and efficiencies, and the JSON file format.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::Path;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, ToBigInt};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::geometry::{
    ambient_normalized_volume, ConfigLabel, LatticeScalar, NormalizedVolume, Point, PointConfiguration,
};
use crate::linalg::{adjugate, det_exact};
use crate::lp::{maximize, LpOutcome};

/// Sorted vertex indices into a configuration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Simplex(SmallVec<[u32; 12]>);

impl Simplex {
    /// Sorts the indices. Repeated indices are kept so that
    /// [`Triangulation::new`] can reject them.
    pub fn new(indices: impl IntoIterator<Item = u32>) -> Self {
        let mut v: SmallVec<[u32; 12]> = indices.into_iter().collect();
        v.sort_unstable();
        Simplex(v)
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// The facet obtained by dropping the `j`-th vertex.
    pub fn facet(&self, j: usize) -> Simplex {
        let mut v = self.0.clone();
        v.remove(j);
        Simplex(v)
    }
}

impl From<Vec<u32>> for Simplex {
    fn from(v: Vec<u32>) -> Self {
        Simplex::new(v)
    }
}

impl<const N: usize> From<[u32; N]> for Simplex {
    fn from(v: [u32; N]) -> Self {
        Simplex::new(v)
    }
}

/// A list of full-dimensional simplices over a shared configuration.
///
/// Construction only checks the shape of each simplex; overlaps, duplicates
/// and degeneracies are the business of the validators.
#[derive(Clone, Debug)]
pub struct Triangulation<T> {
    config: Arc<PointConfiguration<T>>,
    simplices: Vec<Simplex>,
}

impl<T: LatticeScalar> Triangulation<T> {
    pub fn new(config: Arc<PointConfiguration<T>>, simplices: Vec<Simplex>) -> Result<Self> {
        let n = config.len() as u32;
        let want = config.dim() + 1;
        for s in &simplices {
            if s.len() != want {
                return Err(Error::MalformedSimplex(format!("{:?} has {} vertices, expected {want}", s.0, s.len())));
            }
            if s.0.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::MalformedSimplex(format!("{:?} repeats a vertex", s.0)));
            }
            if let Some(&bad) = s.0.iter().find(|&&v| v >= n) {
                return Err(Error::MalformedSimplex(format!("index {bad} out of range for {n} points")));
            }
        }
        Ok(Triangulation { config, simplices })
    }

    pub fn config(&self) -> &PointConfiguration<T> {
        &self.config
    }

    pub fn config_arc(&self) -> &Arc<PointConfiguration<T>> {
        &self.config
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn into_simplices(self) -> Vec<Simplex> {
        self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.config.dim()
    }

    /// Sorts the simplices into canonical order.
    pub fn sorted(mut self) -> Self {
        self.simplices.par_sort_unstable();
        self
    }

    pub fn simplex_volume(&self, s: &Simplex) -> NormalizedVolume {
        NormalizedVolume(signed_volume(&self.config, s).magnitude().clone())
    }

    pub fn volume_total(&self) -> NormalizedVolume {
        let total: BigUint = self
            .simplices
            .par_iter()
            .map(|s| signed_volume(&self.config, s).magnitude().clone())
            .reduce(BigUint::zero, |a, b| a + b);
        NormalizedVolume(total)
    }

    /// Every simplex has normalized volume 1.
    pub fn is_unimodular(&self) -> bool {
        self.simplices.par_iter().all(|s| signed_volume(&self.config, s).magnitude().is_one())
    }
}

fn signed_volume<T: LatticeScalar>(config: &PointConfiguration<T>, s: &Simplex) -> BigInt {
    let p0 = config.point(s.0[0]);
    let rows: Vec<Vec<T>> = s.0[1..].iter().map(|&v| config.point(v).sub(p0)).collect();
    det_exact(&rows)
}

// ---------------------------------------------------------------------------
// Validity

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// Zero normalized volume.
    Degenerate,
    /// The same vertex set listed twice.
    Duplicate,
    /// Interiors intersect.
    Overlap,
    /// Interiors are disjoint but the intersection is not a common face.
    NotFaceToFace,
    /// Volumes do not add up to the expected total.
    VolumeMismatch { found: NormalizedVolume, expected: NormalizedVolume },
    /// A facet belongs to more than two simplices.
    FacetOvercrowded,
    /// Two simplices sharing a facet lie on the same side of it.
    SameSide,
    /// A facet in only one simplex does not lie on the boundary.
    InteriorFreeFacet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Indices into the triangulation's simplex list (empty for global issues).
    pub simplices: Vec<usize>,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug)]
pub struct ValidityReport {
    pub is_dissection: bool,
    pub is_face_to_face: bool,
    /// Whether face-to-face was actually decided (the facet-adjacency mode
    /// only certifies a dissection).
    pub face_to_face_checked: bool,
    pub volume_total: NormalizedVolume,
    pub violations: Vec<Violation>,
}

/// How pairwise properties are certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    /// Exact test on every pair of simplices.
    Pairwise,
    /// Facet-adjacency certificate plus the volume sum. Proves a dissection
    /// in near-linear time; does not decide face-to-face.
    FacetAdjacency,
}

/// Volume sum plus pairwise interior disjointness.
pub fn validate_dissection<T: LatticeScalar>(t: &Triangulation<T>, expected: &NormalizedVolume) -> ValidityReport {
    validate_dissection_with(t, expected, CheckMode::Pairwise)
}

pub fn validate_dissection_with<T: LatticeScalar>(
    t: &Triangulation<T>,
    expected: &NormalizedVolume,
    mode: CheckMode,
) -> ValidityReport {
    match mode {
        CheckMode::Pairwise => pairwise_report(t, Some(expected), false),
        CheckMode::FacetAdjacency => facet_adjacency_report(t, expected),
    }
}

/// Full face-to-face check. The volume sum is compared against the ambient
/// volume of the configuration label when it is known.
pub fn validate_face_to_face<T: LatticeScalar>(t: &Triangulation<T>) -> ValidityReport {
    let expected = ambient_normalized_volume(t.config().label()).ok();
    pairwise_report(t, expected.as_ref(), true)
}

/// Face-to-face check against an explicit total volume.
pub fn validate_face_to_face_with<T: LatticeScalar>(
    t: &Triangulation<T>,
    expected: &NormalizedVolume,
) -> ValidityReport {
    pairwise_report(t, Some(expected), true)
}

/// Precomputed data for pair tests.
struct SimplexGeom {
    coords: Vec<Vec<i128>>,
    lo: Vec<i128>,
    hi: Vec<i128>,
    bary: Option<Bary>,
}

/// Scaled barycentric coordinates: `sign * adj * (x - p0)` with `|det|`.
struct Bary {
    sign: i128,
    abs_det: i128,
    adj: Vec<Vec<i128>>,
}

impl SimplexGeom {
    fn new<T: LatticeScalar>(config: &PointConfiguration<T>, s: &Simplex) -> Option<Self> {
        let coords: Vec<Vec<i128>> = s
            .vertices()
            .iter()
            .map(|&v| config.point(v).coords.iter().map(|c| c.to_i128()).collect::<Option<Vec<_>>>())
            .collect::<Option<_>>()?;
        let d = config.dim();
        let lo = (0..d).map(|r| coords.iter().map(|c| c[r]).min().unwrap_or(0)).collect();
        let hi = (0..d).map(|r| coords.iter().map(|c| c[r]).max().unwrap_or(0)).collect();
        // columns are edge vectors: A[r][c] = p_{c+1}[r] - p0[r]
        let a: Vec<Vec<i128>> =
            (0..d).map(|r| (1..=d).map(|c| coords[c][r].checked_sub(coords[0][r])).collect::<Option<Vec<_>>>()).collect::<Option<_>>()?;
        let bary = adjugate(&a).and_then(|(det, adj)| {
            // adj * A = det * I as well, since A is invertible.
            Some(Bary { sign: det.signum(), abs_det: det.checked_abs()?, adj })
        });
        Some(SimplexGeom { coords, lo, hi, bary })
    }

    /// Scaled barycentric coordinates of `x`; all zero-or-positive iff x in conv.
    fn barycentric(&self, x: &[i128]) -> Option<SmallVec<[i128; 12]>> {
        let b = self.bary.as_ref()?;
        let p0 = &self.coords[0];
        let diff: SmallVec<[i128; 12]> = x.iter().zip(p0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<_>>()?;
        let mut out: SmallVec<[i128; 12]> = SmallVec::with_capacity(diff.len() + 1);
        out.push(0);
        let mut sum: i128 = 0;
        for row in &b.adj {
            let mut acc: i128 = 0;
            for (a, v) in row.iter().zip(&diff) {
                acc = acc.checked_add(a.checked_mul(*v)?)?;
            }
            let s = acc.checked_mul(b.sign)?;
            sum = sum.checked_add(s)?;
            out.push(s);
        }
        out[0] = b.abs_det.checked_sub(sum)?;
        Some(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PairRelation {
    Proper,
    DisjointOnly,
    Overlap,
}

fn is_subset(small: &[u32], big: &[u32]) -> bool {
    small.iter().all(|v| big.binary_search(v).is_ok())
}

fn common_vertices(a: &[u32], b: &[u32]) -> SmallVec<[u32; 12]> {
    a.iter().copied().filter(|v| b.binary_search(v).is_ok()).collect()
}

/// Looks for a facet hyperplane of `g1` weakly separating `g2`.
/// Returns `Some(proper)` when one is found.
fn facet_separation(
    s1: &Simplex,
    g1: &SimplexGeom,
    s2: &Simplex,
    g2: &SimplexGeom,
    common: &[u32],
) -> Option<Option<bool>> {
    let bars: Vec<SmallVec<[i128; 12]>> = g2.coords.iter().map(|q| g1.barycentric(q)).collect::<Option<_>>()?;
    let mut result: Option<bool> = None;
    for i in 0..g1.coords.len() {
        if bars.iter().all(|b| b[i] <= 0) {
            let on_plane: SmallVec<[u32; 12]> =
                s2.vertices().iter().zip(&bars).filter(|(_, b)| b[i] == 0).map(|(&v, _)| v).collect();
            let facet = s1.facet(i);
            let proper = is_subset(&on_plane, common) || is_subset(facet.vertices(), common);
            if proper {
                return Some(Some(true));
            }
            result = Some(false);
        }
    }
    Some(result)
}

fn classify_pair<T: LatticeScalar>(
    config: &PointConfiguration<T>,
    s1: &Simplex,
    g1: &SimplexGeom,
    s2: &Simplex,
    g2: &SimplexGeom,
    want_face: bool,
) -> PairRelation {
    let common = common_vertices(s1.vertices(), s2.vertices());
    let mut disjoint = false;

    // axis-parallel separation from the bounding boxes
    for r in 0..g1.lo.len() {
        for (ga, sa, gb, sb) in [(g1, s1, g2, s2), (g2, s2, g1, s1)] {
            if ga.hi[r] <= gb.lo[r] {
                if !want_face {
                    return PairRelation::DisjointOnly;
                }
                let c = ga.hi[r];
                let on_a: SmallVec<[u32; 12]> =
                    sa.vertices().iter().zip(&ga.coords).filter(|(_, p)| p[r] == c).map(|(&v, _)| v).collect();
                let on_b: SmallVec<[u32; 12]> =
                    sb.vertices().iter().zip(&gb.coords).filter(|(_, p)| p[r] == c).map(|(&v, _)| v).collect();
                if is_subset(&on_a, &common) || is_subset(&on_b, &common) {
                    return PairRelation::Proper;
                }
                disjoint = true;
            }
        }
    }

    for (sa, ga, sb, gb) in [(s1, g1, s2, g2), (s2, g2, s1, g1)] {
        match facet_separation(sa, ga, sb, gb, &common) {
            Some(Some(true)) => return PairRelation::Proper,
            Some(Some(false)) => {
                if !want_face {
                    return PairRelation::DisjointOnly;
                }
                disjoint = true;
            }
            Some(None) => {}
            None => {}
        }
    }

    if !disjoint && interiors_overlap_lp(config, s1, s2) {
        return PairRelation::Overlap;
    }
    if !want_face {
        return PairRelation::DisjointOnly;
    }
    if meets_in_common_face_lp(config, s1, s2, &common) {
        PairRelation::Proper
    } else {
        PairRelation::DisjointOnly
    }
}

/// Whether two full-dimensional simplices meet in a common face (possibly
/// empty). Exact.
pub fn simplices_meet_properly<T: LatticeScalar>(config: &PointConfiguration<T>, s1: &Simplex, s2: &Simplex) -> bool {
    if s1 == s2 {
        return false;
    }
    match (SimplexGeom::new(config, s1), SimplexGeom::new(config, s2)) {
        (Some(g1), Some(g2)) => classify_pair(config, s1, &g1, s2, &g2, true) == PairRelation::Proper,
        _ => {
            !interiors_overlap_lp(config, s1, s2)
                && meets_in_common_face_lp(config, s1, s2, &common_vertices(s1.vertices(), s2.vertices()))
        }
    }
}

fn rat<T: ToBigInt>(x: &T) -> BigRational {
    BigRational::from_integer(x.to_bigint().expect("integer scalar"))
}

fn interiors_overlap_lp<T: LatticeScalar>(config: &PointConfiguration<T>, s1: &Simplex, s2: &Simplex) -> bool {
    interiors_overlap(&config.select(s1.vertices()), &config.select(s2.vertices()))
}

/// Whether the interiors of two full-dimensional polytopes, given as
/// convex hulls, intersect. Solves `max t` subject to `λ = λ' + t`,
/// `μ = μ' + t`, `Σλa = Σμb`, `Σλ = Σμ = 1`, `λ', μ' ≥ 0`.
pub fn interiors_overlap<T: LatticeScalar>(pa: &[&Point<T>], pb: &[&Point<T>]) -> bool {
    let d = pa.first().map(|p| p.dim()).unwrap_or(0);
    let n1 = pa.len();
    let n2 = pb.len();
    let cols = n1 + n2 + 1;
    let mut a = Vec::with_capacity(d + 2);
    let mut b = Vec::with_capacity(d + 2);
    for r in 0..d {
        let mut row = vec![BigRational::zero(); cols];
        let mut tcoef = BigRational::zero();
        for (i, p) in pa.iter().enumerate() {
            let x = rat(&p.coords[r]);
            tcoef += &x;
            row[i] = x;
        }
        for (j, p) in pb.iter().enumerate() {
            let x = rat(&p.coords[r]);
            tcoef -= &x;
            row[n1 + j] = -x;
        }
        row[cols - 1] = tcoef;
        a.push(row);
        b.push(BigRational::zero());
    }
    let mut r1 = vec![BigRational::zero(); cols];
    let mut r2 = vec![BigRational::zero(); cols];
    for x in r1.iter_mut().take(n1) {
        *x = BigRational::one();
    }
    for x in r2.iter_mut().skip(n1).take(n2) {
        *x = BigRational::one();
    }
    r1[cols - 1] = BigRational::from_integer(BigInt::from(n1));
    r2[cols - 1] = BigRational::from_integer(BigInt::from(n2));
    a.push(r1);
    a.push(r2);
    b.push(BigRational::one());
    b.push(BigRational::one());
    let mut c = vec![BigRational::zero(); cols];
    c[cols - 1] = BigRational::one();
    matches!(maximize(&a, &b, &c), LpOutcome::Optimal(v) if v.is_positive())
}

/// Whether every point of `conv(s1) ∩ conv(s2)` has its barycentric support
/// in the common vertices, i.e. the intersection is `conv(common)`.
fn meets_in_common_face_lp<T: LatticeScalar>(
    config: &PointConfiguration<T>,
    s1: &Simplex,
    s2: &Simplex,
    common: &[u32],
) -> bool {
    let d = config.dim();
    let n1 = s1.len();
    let n2 = s2.len();
    let cols = n1 + n2;
    let mut a = Vec::with_capacity(d + 2);
    let mut b = Vec::with_capacity(d + 2);
    for r in 0..d {
        let mut row = vec![BigRational::zero(); cols];
        for (i, &v) in s1.vertices().iter().enumerate() {
            row[i] = rat(&config.point(v).coords[r]);
        }
        for (j, &v) in s2.vertices().iter().enumerate() {
            row[n1 + j] = -rat(&config.point(v).coords[r]);
        }
        a.push(row);
        b.push(BigRational::zero());
    }
    let mut r1 = vec![BigRational::zero(); cols];
    let mut r2 = vec![BigRational::zero(); cols];
    for x in r1.iter_mut().take(n1) {
        *x = BigRational::one();
    }
    for x in r2.iter_mut().skip(n1) {
        *x = BigRational::one();
    }
    a.push(r1);
    a.push(r2);
    b.push(BigRational::one());
    b.push(BigRational::one());
    let c: Vec<BigRational> = s1
        .vertices()
        .iter()
        .map(|v| if common.binary_search(v).is_ok() { BigRational::zero() } else { BigRational::one() })
        .chain((0..n2).map(|_| BigRational::zero()))
        .collect();
    match maximize(&a, &b, &c) {
        LpOutcome::Infeasible => true,
        LpOutcome::Optimal(v) => v.is_zero(),
        LpOutcome::Unbounded => false,
    }
}

fn pairwise_report<T: LatticeScalar>(
    t: &Triangulation<T>,
    expected: Option<&NormalizedVolume>,
    want_face: bool,
) -> ValidityReport {
    let config = t.config();
    let simplices = t.simplices();
    let mut violations = Vec::new();

    let vols: Vec<BigUint> = simplices.par_iter().map(|s| signed_volume(config, s).magnitude().clone()).collect();
    let volume_total = NormalizedVolume(vols.iter().sum());
    let alive: Vec<bool> = vols.iter().map(|v| !v.is_zero()).collect();
    for (i, ok) in alive.iter().enumerate() {
        if !ok {
            violations.push(Violation { simplices: vec![i], kind: ViolationKind::Degenerate });
        }
    }
    let volume_ok = match expected {
        Some(e) if *e != volume_total => {
            violations.push(Violation {
                simplices: vec![],
                kind: ViolationKind::VolumeMismatch { found: volume_total.clone(), expected: e.clone() },
            });
            false
        }
        _ => true,
    };

    let geoms: Vec<Option<SimplexGeom>> = simplices.par_iter().map(|s| SimplexGeom::new(config, s)).collect();

    let pair_violations: Vec<Violation> = (0..simplices.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut out = Vec::new();
            if !alive[i] {
                return out;
            }
            for j in i + 1..simplices.len() {
                if !alive[j] {
                    continue;
                }
                let (s1, s2) = (&simplices[i], &simplices[j]);
                if s1 == s2 {
                    out.push(Violation { simplices: vec![i, j], kind: ViolationKind::Duplicate });
                    continue;
                }
                let rel = match (&geoms[i], &geoms[j]) {
                    (Some(g1), Some(g2)) => classify_pair(config, s1, g1, s2, g2, want_face),
                    _ => {
                        if interiors_overlap_lp(config, s1, s2) {
                            PairRelation::Overlap
                        } else if !want_face || meets_in_common_face_lp(config, s1, s2, &common_vertices(s1.vertices(), s2.vertices())) {
                            PairRelation::Proper
                        } else {
                            PairRelation::DisjointOnly
                        }
                    }
                };
                match rel {
                    PairRelation::Overlap => out.push(Violation { simplices: vec![i, j], kind: ViolationKind::Overlap }),
                    PairRelation::DisjointOnly if want_face => {
                        out.push(Violation { simplices: vec![i, j], kind: ViolationKind::NotFaceToFace })
                    }
                    _ => {}
                }
            }
            out
        })
        .collect();

    let overlap = pair_violations.iter().any(|v| matches!(v.kind, ViolationKind::Overlap | ViolationKind::Duplicate));
    let improper = pair_violations.iter().any(|v| v.kind == ViolationKind::NotFaceToFace);
    violations.extend(pair_violations);
    let degenerate = alive.iter().any(|a| !a);
    let is_dissection = volume_ok && !overlap && !degenerate;
    ValidityReport {
        is_dissection,
        is_face_to_face: want_face && is_dissection && !improper,
        face_to_face_checked: want_face,
        volume_total,
        violations,
    }
}

/// Certificate: every facet lies in at most two simplices, shared facets
/// separate their two apexes, unshared facets lie on the boundary, and the
/// volumes add up. Together these force covering degree one everywhere.
fn facet_adjacency_report<T: LatticeScalar>(t: &Triangulation<T>, expected: &NormalizedVolume) -> ValidityReport {
    let config = t.config();
    let simplices = t.simplices();
    let d = config.dim();
    let mut violations = Vec::new();

    let signed: Vec<BigInt> = simplices.par_iter().map(|s| signed_volume(config, s)).collect();
    let volume_total = NormalizedVolume(signed.iter().map(|v| v.magnitude().clone()).sum());
    for (i, v) in signed.iter().enumerate() {
        if v.is_zero() {
            violations.push(Violation { simplices: vec![i], kind: ViolationKind::Degenerate });
        }
    }
    if volume_total != *expected {
        violations.push(Violation {
            simplices: vec![],
            kind: ViolationKind::VolumeMismatch { found: volume_total.clone(), expected: expected.clone() },
        });
    }

    // (hash, simplex, dropped position)
    let mut entries: Vec<(u64, u32, u8)> = simplices
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, s)| {
            (0..s.len()).map(move |j| {
                let mut h = DefaultHasher::new();
                for (k, v) in s.vertices().iter().enumerate() {
                    if k != j {
                        v.hash(&mut h);
                    }
                }
                (h.finish(), i as u32, j as u8)
            })
        })
        .collect();
    entries.par_sort_unstable();

    let facet_of = |e: &(u64, u32, u8)| simplices[e.1 as usize].facet(e.2 as usize);
    // side of the apex relative to the facet listed in sorted order
    let side = |e: &(u64, u32, u8)| {
        let o = signed[e.1 as usize].signum();
        if (d - e.2 as usize).is_multiple_of(2) { o } else { -o }
    };

    let groups: Vec<&[(u64, u32, u8)]> = entries.chunk_by(|a, b| a.0 == b.0).collect();
    let found: Vec<Violation> = groups
        .par_iter()
        .flat_map_iter(|group| {
            let mut out = Vec::new();
            let mut items: Vec<(Simplex, &(u64, u32, u8))> = group.iter().map(|e| (facet_of(e), e)).collect();
            items.sort_by(|a, b| a.0.cmp(&b.0));
            for same in items.chunk_by(|a, b| a.0 == b.0) {
                match same {
                    [(f, e)] => {
                        if !config.lies_in_boundary_facet(f.vertices()) {
                            out.push(Violation { simplices: vec![e.1 as usize], kind: ViolationKind::InteriorFreeFacet });
                        }
                    }
                    [(_, e1), (_, e2)] => {
                        if side(e1) == side(e2) {
                            let kind = if simplices[e1.1 as usize] == simplices[e2.1 as usize] {
                                ViolationKind::Duplicate
                            } else {
                                ViolationKind::SameSide
                            };
                            out.push(Violation { simplices: vec![e1.1 as usize, e2.1 as usize], kind });
                        }
                    }
                    many => out.push(Violation {
                        simplices: many.iter().map(|(_, e)| e.1 as usize).collect(),
                        kind: ViolationKind::FacetOvercrowded,
                    }),
                }
            }
            out
        })
        .collect();
    violations.extend(found);
    ValidityReport {
        is_dissection: violations.is_empty(),
        is_face_to_face: false,
        face_to_face_checked: false,
        volume_total,
        violations,
    }
}

// ---------------------------------------------------------------------------
// Sizes, types and weights

/// `(size / d!)^(1/d)`, for reporting only.
pub fn efficiency(size: u128, d: usize) -> f64 {
    let ln_fact: f64 = (1..=d).map(|i| (i as f64).ln()).sum();
    (((size as f64).ln() - ln_fact) / d as f64).exp()
}

/// `(weighted_size / m^l)^(1/l)`, for reporting only.
pub fn weighted_efficiency(weighted_size: &BigRational, m: usize, l: usize) -> f64 {
    let ws = weighted_size.to_f64().unwrap_or(f64::NAN);
    (ws / (m as f64).powi(l as i32)).powf(1.0 / l as f64)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplexType {
    pub t: Vec<usize>,
}

impl SimplexType {
    /// `1 / ∏ tᵢ!`.
    pub fn weight(&self) -> BigRational {
        let denom: BigInt = self.t.iter().map(|&ti| (1..=ti).map(BigInt::from).product::<BigInt>()).product();
        BigRational::new(BigInt::one(), denom)
    }
}

/// Splits `τ` by simplex vertex: `tᵢ = |τᵢ| − 1`. Requires a configuration
/// labeled `P × Δ^{m-1}` in canonical order.
pub fn simplex_type<T: LatticeScalar>(tau: &Simplex, config: &PointConfiguration<T>) -> Result<SimplexType> {
    let (_, m) = config
        .label()
        .as_simplex_product()
        .ok_or_else(|| Error::NotProduct(config.label().to_string()))?;
    simplex_type_m(tau, m)
}

/// Same as [`simplex_type`] for index `p * m + i` layouts.
pub fn simplex_type_m(tau: &Simplex, m: usize) -> Result<SimplexType> {
    let mut counts = vec![0usize; m];
    for &v in tau.vertices() {
        counts[v as usize % m] += 1;
    }
    if let Some(i) = counts.iter().position(|&c| c == 0) {
        return Err(Error::MalformedSimplex(format!("no vertex over simplex vertex {i}")));
    }
    Ok(SimplexType { t: counts.into_iter().map(|c| c - 1).collect() })
}

pub fn weighted_size<T: LatticeScalar>(t: &Triangulation<T>) -> Result<BigRational> {
    let (_, m) = t
        .config()
        .label()
        .as_simplex_product()
        .ok_or_else(|| Error::NotProduct(t.config().label().to_string()))?;
    let mut total = BigRational::zero();
    for s in t.simplices() {
        total += simplex_type_m(s, m)?.weight();
    }
    Ok(total)
}

/// Weighted efficiency of a triangulation of `I^l × Δ^{m-1}`.
pub fn triangulation_weighted_efficiency<T: LatticeScalar>(t: &Triangulation<T>) -> Result<f64> {
    let label = t.config().label();
    let (p, m) = label.as_simplex_product().ok_or_else(|| Error::NotProduct(label.to_string()))?;
    let l = p.dim().ok_or_else(|| Error::UnsupportedLabel(label.to_string()))?;
    Ok(weighted_efficiency(&weighted_size(t)?, m, l))
}

/// Census of simplex types.
pub fn type_census<T: LatticeScalar>(t: &Triangulation<T>) -> Result<std::collections::BTreeMap<SimplexType, usize>> {
    let label = t.config().label();
    let (_, m) = label.as_simplex_product().ok_or_else(|| Error::NotProduct(label.to_string()))?;
    let mut census = std::collections::BTreeMap::new();
    for s in t.simplices() {
        *census.entry(simplex_type_m(s, m)?).or_insert(0) += 1;
    }
    Ok(census)
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Serialize, Deserialize)]
struct TriangulationFile {
    dim: usize,
    label: String,
    points: Vec<Vec<i64>>,
    simplices: Vec<Vec<u32>>,
}

impl Triangulation<i64> {
    pub fn to_json(&self) -> Result<String> {
        let file = TriangulationFile {
            dim: self.dim(),
            label: self.config().label().to_string(),
            points: self.config().points().iter().map(|p| p.coords.clone()).collect(),
            simplices: self.simplices.iter().map(|s| s.vertices().to_vec()).collect(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TriangulationFile = serde_json::from_str(text)?;
        let label: ConfigLabel = file.label.parse()?;
        let points: Vec<Point<i64>> = file.points.into_iter().map(Point::new).collect();
        let config = PointConfiguration::new(label, points)?;
        if config.dim() != file.dim {
            return Err(Error::DimensionMismatch { expected: file.dim, found: config.dim() });
        }
        if !matches!(config.label(), ConfigLabel::Custom(_)) && !config.is_canonical() {
            return Err(Error::Format(format!("points are not in the canonical order of {}", config.label())));
        }
        Triangulation::new(Arc::new(config), file.simplices.into_iter().map(Simplex::from).collect())
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(points: &[[i64; 2]], simplices: &[[u32; 3]]) -> Triangulation<i64> {
        let cfg = PointConfiguration::new(
            ConfigLabel::Custom("square".into()),
            points.iter().map(|p| Point::from_i64(p)).collect(),
        )
        .unwrap();
        Triangulation::new(Arc::new(cfg), simplices.iter().map(|s| Simplex::from(*s)).collect()).unwrap()
    }

    const UNIT: [[i64; 2]; 4] = [[0, 0], [1, 0], [0, 1], [1, 1]];

    #[test]
    fn diagonal_split_is_valid() {
        let t = square(&UNIT, &[[0, 1, 3], [0, 2, 3]]);
        let r = validate_dissection(&t, &NormalizedVolume::from(2));
        assert!(r.is_dissection, "{:?}", r.violations);
        let r = validate_face_to_face_with(&t, &NormalizedVolume::from(2));
        assert!(r.is_face_to_face);
        let r = validate_dissection_with(&t, &NormalizedVolume::from(2), CheckMode::FacetAdjacency);
        assert!(r.is_dissection, "{:?}", r.violations);
    }

    #[test]
    fn duplicate_is_overlap() {
        let t = square(&UNIT, &[[0, 1, 3], [0, 2, 3], [0, 1, 3]]);
        for mode in [CheckMode::Pairwise, CheckMode::FacetAdjacency] {
            let r = validate_dissection_with(&t, &NormalizedVolume::from(2), mode);
            assert!(!r.is_dissection);
            assert!(r.violations.iter().any(|v| v.kind == ViolationKind::Duplicate || v.kind == ViolationKind::FacetOvercrowded));
        }
    }

    #[test]
    fn missing_triangle_is_deficit() {
        let t = square(&UNIT, &[[0, 1, 3]]);
        let r = validate_dissection(&t, &NormalizedVolume::from(2));
        assert!(!r.is_dissection);
        assert!(matches!(r.violations[0].kind, ViolationKind::VolumeMismatch { .. }));
        let r = validate_dissection_with(&t, &NormalizedVolume::from(2), CheckMode::FacetAdjacency);
        assert!(!r.is_dissection);
    }

    #[test]
    fn crossing_diagonals_overlap() {
        let t = square(&UNIT, &[[0, 1, 3], [1, 2, 3]]);
        let r = validate_dissection(&t, &NormalizedVolume::from(2));
        assert!(r.violations.iter().any(|v| v.kind == ViolationKind::Overlap));
    }

    #[test]
    fn t_vertex_is_not_face_to_face() {
        let pts = [[0, 0], [2, 0], [0, 2], [2, 2], [1, 1]];
        // (1,1) sits in the middle of the edge (0,0)-(2,2) of the first triangle
        let t = square(&pts, &[[0, 1, 3], [0, 4, 2], [2, 4, 3]]);
        let r = validate_face_to_face_with(&t, &NormalizedVolume::from(8));
        assert!(r.is_dissection, "{:?}", r.violations);
        assert!(!r.is_face_to_face);
        assert_eq!(r.violations.len(), 2);
        assert!(r.violations.iter().all(|v| v.kind == ViolationKind::NotFaceToFace));
        // splitting that triangle at (1,1) repairs it
        let t = square(&pts, &[[0, 1, 4], [1, 3, 4], [0, 4, 2], [2, 4, 3]]);
        let r = validate_face_to_face_with(&t, &NormalizedVolume::from(8));
        assert!(r.is_face_to_face, "{:?}", r.violations);
    }

    #[test]
    fn degenerate_reported() {
        let pts = [[0, 0], [1, 0], [2, 0], [0, 1]];
        let t = square(&pts, &[[0, 1, 2]]);
        let r = validate_dissection(&t, &NormalizedVolume::from(1));
        assert!(r.violations.iter().any(|v| v.kind == ViolationKind::Degenerate));
    }

    #[test]
    fn efficiency_values() {
        assert!((efficiency(5, 3) - 0.941).abs() < 5e-4);
        assert!((efficiency(2, 2) - 1.0).abs() < 1e-12);
        for d in 1..10usize {
            let f: u128 = (1..=d as u128).product();
            assert!((efficiency(f, d) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn types_and_weights() {
        let prism = PointConfiguration::<i64>::cube_times_simplex(1, 2);
        // indices p*2 + i: (0,v1)=0,(0,v2)=1,(1,v1)=2,(1,v2)=3
        let t = simplex_type(&Simplex::from([0, 2, 3]), &prism).unwrap();
        assert_eq!(t.t, vec![1, 0]);
        assert_eq!(t.weight(), BigRational::one());
        let cube = PointConfiguration::<i64>::cube_times_simplex(3, 1);
        let t = simplex_type(&Simplex::from([0, 1, 2, 4]), &cube).unwrap();
        assert_eq!(t.t, vec![3]);
        assert_eq!(t.weight(), BigRational::new(1.into(), 6.into()));
        let c2 = PointConfiguration::<i64>::cube_times_simplex(3, 2);
        let t = simplex_type(&Simplex::from([0, 2, 4, 1, 3]), &c2).unwrap();
        assert_eq!(t.t, vec![2, 1]);
        assert_eq!(t.weight(), BigRational::new(1.into(), 2.into()));
        assert!(simplex_type(&Simplex::from([0, 2, 4]), &prism).is_err());
        assert!(simplex_type(&Simplex::from([0, 1]), &PointConfiguration::<i64>::cube(1)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let cfg = Arc::new(PointConfiguration::<i64>::cube(2));
        let t = Triangulation::new(cfg, vec![Simplex::from([0, 1, 3]), Simplex::from([0, 2, 3])]).unwrap();
        let back = Triangulation::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(back.simplices(), t.simplices());
        let broken = r#"{"dim":2,"label":"cube(2)","points":[[1,0],[0,0],[0,1],[1,1]],"simplices":[]}"#;
        assert!(Triangulation::from_json(broken).is_err());
    }
}
