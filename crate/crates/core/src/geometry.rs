//! Lattice points, point configurations and exact volume/rank primitives.

use std::collections::HashMap;
use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::iter::Sum;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, ToBigInt};
use num_integer::Integer;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::combinatorics::factorial;
use crate::error::{Error, Result};
use crate::linalg::{det_exact, rank_exact};

/// Integer scalar usable as a lattice coordinate.
pub trait LatticeScalar:
    Integer + Signed + Clone + Debug + Display + Hash + Send + Sync + FromPrimitive + ToPrimitive + ToBigInt + 'static
{
}

impl<T> LatticeScalar for T where
    T: Integer
        + Signed
        + Clone
        + Debug
        + Display
        + Hash
        + Send
        + Sync
        + FromPrimitive
        + ToPrimitive
        + ToBigInt
        + 'static
{
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point<T> {
    pub coords: Vec<T>,
}

impl<T: LatticeScalar> Point<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        Point { coords: coords.iter().map(|&c| T::from_i64(c).expect("coordinate fits scalar")).collect() }
    }

    pub fn sub(&self, other: &Self) -> Vec<T> {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() - b.clone()).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        Point { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() + b.clone()).collect() }
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut coords = self.coords.clone();
        coords.extend(other.coords.iter().cloned());
        Point { coords }
    }
}

impl<T: Display> Display for Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Structured description of a configuration; determines its canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConfigLabel {
    /// `I^l`, vertices in binary-counter order (first coordinate fastest).
    Cube(usize),
    /// `Δ^k`: the origin followed by the unit vectors.
    Simplex(usize),
    /// `P × Q`, vertices ordered lexicographically by (P index, Q index).
    Product(Box<ConfigLabel>, Box<ConfigLabel>),
    /// `P + ⋯ + P` with `m` summands: all lattice sums of vertices.
    MinkowskiSum(Box<ConfigLabel>, usize),
    /// Anything else; no canonical order and no known volume.
    Custom(String),
}

impl ConfigLabel {
    pub fn product(p: ConfigLabel, q: ConfigLabel) -> Self {
        ConfigLabel::Product(Box::new(p), Box::new(q))
    }

    /// `I^l × Δ^{m-1}`.
    pub fn cube_times_simplex(l: usize, m: usize) -> Self {
        Self::product(ConfigLabel::Cube(l), ConfigLabel::Simplex(m - 1))
    }

    pub fn minkowski(base: ConfigLabel, m: usize) -> Self {
        ConfigLabel::MinkowskiSum(Box::new(base), m)
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            ConfigLabel::Cube(l) => Some(*l),
            ConfigLabel::Simplex(k) => Some(*k),
            ConfigLabel::Product(p, q) => Some(p.dim()? + q.dim()?),
            ConfigLabel::MinkowskiSum(p, _) => p.dim(),
            ConfigLabel::Custom(_) => None,
        }
    }

    pub fn vertex_count(&self) -> Option<usize> {
        match self {
            ConfigLabel::Cube(l) => Some(1usize << l),
            ConfigLabel::Simplex(k) => Some(k + 1),
            ConfigLabel::Product(p, q) => Some(p.vertex_count()? * q.vertex_count()?),
            ConfigLabel::MinkowskiSum(..) | ConfigLabel::Custom(_) => None,
        }
    }

    /// For `P × Δ^{m-1}`, returns `(P, m)`.
    pub fn as_simplex_product(&self) -> Option<(&ConfigLabel, usize)> {
        match self {
            ConfigLabel::Product(p, q) => match q.as_ref() {
                ConfigLabel::Simplex(k) => Some((p.as_ref(), k + 1)),
                _ => None,
            },
            _ => None,
        }
    }
}

impl Display for ConfigLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigLabel::Cube(l) => write!(f, "cube({l})"),
            ConfigLabel::Simplex(k) => write!(f, "simplex({k})"),
            ConfigLabel::Product(p, q) => write!(f, "product({p},{q})"),
            ConfigLabel::MinkowskiSum(p, m) => write!(f, "minkowski-sum({p},{m})"),
            ConfigLabel::Custom(s) => write!(f, "custom({s})"),
        }
    }
}

fn split_top_level(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

impl FromStr for ConfigLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::BadLabel(s.to_string());
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let head = &s[..open];
        let inner = &s[open + 1..s.len() - 1];
        let int = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        match head {
            "cube" => Ok(ConfigLabel::Cube(int(inner)?)),
            "simplex" => Ok(ConfigLabel::Simplex(int(inner)?)),
            "product" => {
                let (a, b) = split_top_level(inner).ok_or_else(bad)?;
                Ok(ConfigLabel::product(a.parse()?, b.parse()?))
            }
            "minkowski-sum" => {
                let (a, b) = split_top_level(inner).ok_or_else(bad)?;
                Ok(ConfigLabel::minkowski(a.parse()?, int(b)?))
            }
            "custom" => Ok(ConfigLabel::Custom(inner.to_string())),
            _ => Err(bad()),
        }
    }
}

/// Normalized volume: `d!` times Euclidean volume, i.e. `|det|` of the edge
/// vectors of a lattice simplex.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalizedVolume(pub BigUint);

impl NormalizedVolume {
    pub fn zero() -> Self {
        NormalizedVolume(BigUint::zero())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_unimodular(&self) -> bool {
        self.0.is_one()
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
}

impl From<u64> for NormalizedVolume {
    fn from(v: u64) -> Self {
        NormalizedVolume(BigUint::from(v))
    }
}

impl PartialEq<u64> for NormalizedVolume {
    fn eq(&self, other: &u64) -> bool {
        self.0 == BigUint::from(*other)
    }
}

impl Add for NormalizedVolume {
    type Output = NormalizedVolume;
    fn add(self, rhs: Self) -> Self {
        NormalizedVolume(self.0 + rhs.0)
    }
}

impl Sum for NormalizedVolume {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        NormalizedVolume(iter.map(|v| v.0).sum())
    }
}

impl Display for NormalizedVolume {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn edge_matrix<T: LatticeScalar>(points: &[&Point<T>]) -> Vec<Vec<T>> {
    points[1..].iter().map(|p| p.sub(points[0])).collect()
}

/// `|det(p₁−p₀, …, p_d−p₀)|` for `d+1` points in dimension `d`.
pub fn normalized_volume<T: LatticeScalar>(vertices: &[&Point<T>]) -> Result<NormalizedVolume> {
    let Some(first) = vertices.first() else {
        return Err(Error::EmptyInput);
    };
    let d = first.dim();
    if let Some(bad) = vertices.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: bad.dim() });
    }
    if vertices.len() != d + 1 {
        return Err(Error::WrongPointCount { expected: d + 1, found: vertices.len() });
    }
    let det = det_exact(&edge_matrix(vertices));
    Ok(NormalizedVolume(det.magnitude().clone()))
}

/// Signed determinant of the edge vectors; its sign is the orientation.
pub fn orientation<T: LatticeScalar>(vertices: &[&Point<T>]) -> BigInt {
    det_exact(&edge_matrix(vertices))
}

/// Dimension of the affine hull.
pub fn affine_rank<T: LatticeScalar>(points: &[&Point<T>]) -> Result<usize> {
    let Some(first) = points.first() else {
        return Err(Error::EmptyInput);
    };
    let d = first.dim();
    if let Some(bad) = points.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: bad.dim() });
    }
    if points.len() == 1 {
        return Ok(0);
    }
    Ok(rank_exact(&edge_matrix(points)))
}

/// Exact normalized volume of a labeled polytope in its own dimension.
pub fn ambient_normalized_volume(label: &ConfigLabel) -> Result<NormalizedVolume> {
    fn go(label: &ConfigLabel) -> Result<(usize, BigUint)> {
        match label {
            ConfigLabel::Cube(l) => Ok((*l, factorial(*l))),
            ConfigLabel::Simplex(k) => Ok((*k, BigUint::one())),
            ConfigLabel::Product(p, q) => {
                let (dp, vp) = go(p)?;
                let (dq, vq) = go(q)?;
                // vol(P×Q) = vol(P)·vol(Q), so normalized volumes pick up C(dp+dq, dp).
                let binom = factorial(dp + dq) / (factorial(dp) * factorial(dq));
                Ok((dp + dq, binom * vp * vq))
            }
            ConfigLabel::MinkowskiSum(p, m) => match p.as_ref() {
                ConfigLabel::MinkowskiSum(..) | ConfigLabel::Custom(_) => {
                    Err(Error::UnsupportedLabel(label.to_string()))
                }
                base => {
                    let (d, v) = go(base)?;
                    Ok((d, BigUint::from(*m).pow(d as u32) * v))
                }
            },
            ConfigLabel::Custom(_) => Err(Error::UnsupportedLabel(label.to_string())),
        }
    }
    go(label).map(|(_, v)| NormalizedVolume(v))
}

/// An indexed, labeled list of distinct lattice points of equal dimension.
#[derive(Clone, Debug)]
pub struct PointConfiguration<T> {
    dim: usize,
    points: Vec<Point<T>>,
    label: ConfigLabel,
    index: HashMap<Point<T>, u32>,
}

impl<T: LatticeScalar> PointConfiguration<T> {
    pub fn new(label: ConfigLabel, points: Vec<Point<T>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::EmptyInput);
        };
        let dim = first.dim();
        let mut index = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
            }
            if index.insert(p.clone(), i as u32).is_some() {
                return Err(Error::DuplicatePoint(i));
            }
        }
        Ok(PointConfiguration { dim, points, label, index })
    }

    /// Builds the canonical configuration of a structured label.
    pub fn from_label(label: &ConfigLabel) -> Result<Self> {
        let points = canonical_points::<T>(label)?;
        Self::new(label.clone(), points)
    }

    pub fn cube(l: usize) -> Self {
        Self::from_label(&ConfigLabel::Cube(l)).expect("cube label is canonical")
    }

    pub fn simplex(k: usize) -> Self {
        Self::from_label(&ConfigLabel::Simplex(k)).expect("simplex label is canonical")
    }

    pub fn cube_times_simplex(l: usize, m: usize) -> Self {
        Self::from_label(&ConfigLabel::cube_times_simplex(l, m)).expect("product label is canonical")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }

    pub fn point(&self, i: u32) -> &Point<T> {
        &self.points[i as usize]
    }

    pub fn label(&self) -> &ConfigLabel {
        &self.label
    }

    pub fn index_of(&self, p: &Point<T>) -> Option<u32> {
        self.index.get(p).copied()
    }

    pub fn select(&self, indices: &[u32]) -> Vec<&Point<T>> {
        indices.iter().map(|&i| &self.points[i as usize]).collect()
    }

    /// `P × Q` with vertices ordered by (P index, Q index).
    pub fn product(p: &Self, q: &Self) -> Self {
        let points = p.points.iter().flat_map(|a| q.points.iter().map(move |b| a.concat(b))).collect();
        Self::new(ConfigLabel::product(p.label.clone(), q.label.clone()), points)
            .expect("product of distinct point sets is distinct")
    }

    /// For a configuration labeled `P × Δ^{m-1}`, recovers `P` and `m`.
    pub fn simplex_product_factor(&self) -> Option<(Self, usize)> {
        let (p_label, m) = self.label.as_simplex_product()?;
        if !self.points.len().is_multiple_of(m) {
            return None;
        }
        let pd = self.dim + 1 - m;
        let points = self.points.iter().step_by(m).map(|x| Point::new(x.coords[..pd].to_vec())).collect();
        Self::new(p_label.clone(), points).ok().map(|p| (p, m))
    }

    /// True when the label's canonical order matches the stored points.
    pub fn is_canonical(&self) -> bool {
        match canonical_points::<T>(&self.label) {
            Ok(pts) => pts == self.points,
            Err(_) => false,
        }
    }

    /// Whether the given points (indices) all lie in one facet of conv(config).
    /// Used on facets of full-dimensional simplices.
    pub fn lies_in_boundary_facet(&self, indices: &[u32]) -> bool {
        if matches!(self.label, ConfigLabel::Cube(_) | ConfigLabel::Product(..)) {
            let idx: Vec<usize> = indices.iter().map(|&i| i as usize).collect();
            if let Some(ans) = label_set_in_facet(&self.label, &idx) {
                return ans;
            }
        }
        self.supporting_hyperplane_test(indices)
    }

    fn supporting_hyperplane_test(&self, indices: &[u32]) -> bool {
        let pts = self.select(indices);
        if pts.len() < self.dim || self.dim == 0 {
            return false;
        }
        let base = pts[0];
        let rows: Vec<Vec<T>> = pts[1..].iter().map(|p| p.sub(base)).collect();
        if rank_exact(&rows) != self.dim - 1 {
            return false;
        }
        // pick dim-1 independent rows
        let mut chosen: Vec<Vec<T>> = Vec::new();
        for r in rows {
            let mut trial = chosen.clone();
            trial.push(r);
            if rank_exact(&trial) == trial.len() {
                chosen = trial;
            }
            if chosen.len() == self.dim - 1 {
                break;
            }
        }
        let normal: Vec<BigInt> = (0..self.dim)
            .map(|j| {
                let minor: Vec<Vec<T>> = chosen
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let d = det_exact(&minor);
                if j % 2 == 0 { d } else { -d }
            })
            .collect();
        let mut pos = false;
        let mut neg = false;
        for p in &self.points {
            let s: BigInt = p
                .sub(base)
                .iter()
                .zip(&normal)
                .map(|(x, n)| x.to_bigint().expect("integer") * n)
                .sum();
            pos |= s.is_positive();
            neg |= s.is_negative();
            if pos && neg {
                return false;
            }
        }
        true
    }
}

fn label_set_in_facet(label: &ConfigLabel, indices: &[usize]) -> Option<bool> {
    match label {
        ConfigLabel::Cube(l) => Some((0..*l).any(|bit| {
            let first = (indices[0] >> bit) & 1;
            indices.iter().all(|&i| (i >> bit) & 1 == first)
        })),
        ConfigLabel::Simplex(k) => {
            if *k == 0 {
                return Some(false);
            }
            let mut seen = vec![false; k + 1];
            for &i in indices {
                seen[i] = true;
            }
            Some(seen.iter().any(|s| !s))
        }
        ConfigLabel::Product(p, q) => {
            let qn = q.vertex_count()?;
            let ps: Vec<usize> = indices.iter().map(|i| i / qn).collect();
            let qs: Vec<usize> = indices.iter().map(|i| i % qn).collect();
            Some(label_set_in_facet(p, &ps)? || label_set_in_facet(q, &qs)?)
        }
        _ => None,
    }
}

fn canonical_points<T: LatticeScalar>(label: &ConfigLabel) -> Result<Vec<Point<T>>> {
    let to_t = |v: i64| T::from_i64(v).expect("small coordinate fits scalar");
    match label {
        ConfigLabel::Cube(l) => Ok((0..1usize << l)
            .map(|i| Point::new((0..*l).map(|b| to_t(((i >> b) & 1) as i64)).collect()))
            .collect()),
        ConfigLabel::Simplex(k) => Ok((0..=*k)
            .map(|i| Point::new((0..*k).map(|j| to_t((i == j + 1) as i64)).collect()))
            .collect()),
        ConfigLabel::Product(p, q) => {
            let ps = canonical_points::<T>(p)?;
            let qs = canonical_points::<T>(q)?;
            Ok(ps.iter().flat_map(|a| qs.iter().map(move |b| a.concat(b))).collect())
        }
        ConfigLabel::MinkowskiSum(p, m) => {
            if matches!(p.as_ref(), ConfigLabel::MinkowskiSum(..)) {
                return Err(Error::UnsupportedLabel(label.to_string()));
            }
            let base = canonical_points::<T>(p)?;
            let d = base.first().map(|b| b.dim()).unwrap_or(0);
            let mut sums: Vec<Point<T>> = vec![Point::new(vec![T::zero(); d])];
            for _ in 0..*m {
                let mut next: Vec<Point<T>> = sums.iter().flat_map(|s| base.iter().map(move |b| s.add(b))).collect();
                next.sort_by(|a, b| a.coords.iter().rev().cmp(b.coords.iter().rev()));
                next.dedup();
                sums = next;
            }
            Ok(sums)
        }
        ConfigLabel::Custom(_) => Err(Error::UnsupportedLabel(label.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type P = Point<i64>;

    fn pts(v: &[&[i64]]) -> Vec<P> {
        v.iter().map(|c| P::from_i64(c)).collect()
    }

    fn vol(v: &[&[i64]]) -> NormalizedVolume {
        let p = pts(v);
        normalized_volume(&p.iter().collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn volume_examples() {
        assert_eq!(vol(&[&[0, 0], &[1, 0], &[0, 1]]), 1);
        assert_eq!(vol(&[&[0, 0], &[2, 0], &[0, 2]]), 4);
        assert_eq!(vol(&[&[0, 0], &[1, 1], &[2, 2]]), 0);
    }

    #[test]
    fn volume_errors() {
        let p = pts(&[&[0, 0], &[1, 0, 0], &[0, 1]]);
        assert!(matches!(
            normalized_volume(&p.iter().collect::<Vec<_>>()),
            Err(Error::DimensionMismatch { .. })
        ));
        let p = pts(&[&[0, 0], &[1, 0]]);
        assert!(matches!(
            normalized_volume(&p.iter().collect::<Vec<_>>()),
            Err(Error::WrongPointCount { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn rank_examples() {
        let r = |v: &[&[i64]]| {
            let p = pts(v);
            affine_rank(&p.iter().collect::<Vec<_>>()).unwrap()
        };
        assert_eq!(r(&[&[0, 0, 0]]), 0);
        assert_eq!(r(&[&[0, 0], &[1, 0], &[2, 0]]), 1);
        assert_eq!(r(&[&[0, 0], &[1, 0], &[0, 1]]), 2);
        assert!(matches!(affine_rank::<i64>(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn ambient_volumes() {
        let v = |s: &str| ambient_normalized_volume(&s.parse().unwrap()).unwrap();
        assert_eq!(v("product(cube(3),simplex(1))"), 24);
        assert_eq!(v("product(cube(2),simplex(2))"), 12);
        assert_eq!(v("minkowski-sum(cube(2),3)"), 18);
        assert_eq!(v("cube(4)"), 24);
        assert_eq!(v("simplex(5)"), 1);
        assert!(ambient_normalized_volume(&ConfigLabel::Custom("x".into())).is_err());
    }

    #[test]
    fn labels_round_trip() {
        for s in ["cube(3)", "simplex(0)", "product(cube(3),simplex(2))", "minkowski-sum(cube(2),5)"] {
            let l: ConfigLabel = s.parse().unwrap();
            assert_eq!(l.to_string(), s);
        }
        assert!("cube".parse::<ConfigLabel>().is_err());
        assert!("sphere(2)".parse::<ConfigLabel>().is_err());
    }

    #[test]
    fn canonical_orders() {
        let c = PointConfiguration::<i64>::cube(2);
        let got: Vec<Vec<i64>> = c.points().iter().map(|p| p.coords.clone()).collect();
        assert_eq!(got, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
        let p = PointConfiguration::<i64>::cube_times_simplex(1, 3);
        let got: Vec<Vec<i64>> = p.points().iter().map(|p| p.coords.clone()).collect();
        assert_eq!(
            got,
            vec![vec![0, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0], vec![1, 1, 0], vec![1, 0, 1]]
        );
        let m = PointConfiguration::<i64>::from_label(&"minkowski-sum(cube(2),2)".parse().unwrap()).unwrap();
        assert_eq!(m.len(), 9);
        assert_eq!(m.points()[1].coords, vec![1, 0]);
        assert!(m.is_canonical());
    }

    #[test]
    fn boundary_facets() {
        let c = PointConfiguration::<i64>::cube(3);
        assert!(c.lies_in_boundary_facet(&[0, 1, 2]));
        assert!(!c.lies_in_boundary_facet(&[1, 2, 4]));
        let custom = PointConfiguration::new(ConfigLabel::Custom("cube".into()), c.points().to_vec()).unwrap();
        assert!(custom.lies_in_boundary_facet(&[0, 1, 2]));
        assert!(!custom.lies_in_boundary_facet(&[1, 2, 4]));
        let prism = PointConfiguration::<i64>::cube_times_simplex(1, 3);
        // all over v1 and v2: misses v3, so on the facet I × conv(v1, v2)
        assert!(prism.lies_in_boundary_facet(&[0, 1, 3]));
        assert!(!prism.lies_in_boundary_facet(&[0, 1, 5]));
    }

    #[test]
    fn bigint_scalar_agrees() {
        let a = vol(&[&[0, 0, 0], &[1, 2, 0], &[0, 1, 3], &[2, 0, 1]]);
        let b: Vec<Point<BigInt>> = [[0, 0, 0], [1, 2, 0], [0, 1, 3], [2, 0, 1]]
            .iter()
            .map(|c| Point::<BigInt>::from_i64(c))
            .collect();
        assert_eq!(normalized_volume(&b.iter().collect::<Vec<_>>()).unwrap(), a);
    }

    proptest! {
        #[test]
        fn volume_permutation_and_translation_invariant(
            coords in proptest::collection::vec(-3i64..=3, 12),
            shift in proptest::collection::vec(-5i64..=5, 3),
            perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
        ) {
            let p: Vec<P> = coords.chunks(3).map(P::from_i64).collect();
            let base = normalized_volume(&p.iter().collect::<Vec<_>>()).unwrap();
            let permuted: Vec<&P> = perm.iter().map(|&i| &p[i]).collect();
            prop_assert_eq!(normalized_volume(&permuted).unwrap(), base.clone());
            let s = P::from_i64(&shift);
            let moved: Vec<P> = p.iter().map(|q| q.add(&s)).collect();
            prop_assert_eq!(normalized_volume(&moved.iter().collect::<Vec<_>>()).unwrap(), base.clone());
            let rank = affine_rank(&p.iter().collect::<Vec<_>>()).unwrap();
            prop_assert_eq!(rank == 3, !base.is_zero());
        }
    }
}
