//! Triangulating `P × Q` from a triangulation of `Q`, a seed triangulation of
//! `P × Δ^{m-1}` and an `m`-coloring of the vertices of `Q`.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::combinatorics::{binomial, factorial};
use crate::complex::{validate_face_to_face, Simplex, Triangulation};
use crate::error::{Error, Result};
use crate::geometry::{ConfigLabel, LatticeScalar, PointConfiguration};
use crate::staircase::{multi_staircases_with, LiftedCell};

/// Upper limit on the number of colorings enumerated exactly.
pub const COLORING_ENUMERATION_LIMIT: u128 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColoringStrategy {
    /// I.i.d. uniform colors from a ChaCha8 stream seeded with `seed`.
    Random { seed: u64 },
    /// Vertex `v` gets color `v mod m`.
    Balanced,
    /// A user-supplied color per vertex.
    Explicit(Vec<usize>),
}

/// Colors are `0..m`, one per vertex of `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<usize>,
    m: usize,
    strategy: ColoringStrategy,
}

impl Coloring {
    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn strategy(&self) -> &ColoringStrategy {
        &self.strategy
    }

    pub fn color(&self, v: u32) -> usize {
        self.colors[v as usize]
    }
}

pub fn make_coloring(q_vertices: usize, m: usize, strategy: ColoringStrategy) -> Result<Coloring> {
    if m == 0 {
        return Err(Error::InvalidColoring("m must be positive".into()));
    }
    let colors = match &strategy {
        ColoringStrategy::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..q_vertices).map(|_| rng.gen_range(0..m)).collect()
        }
        ColoringStrategy::Balanced => (0..q_vertices).map(|v| v % m).collect(),
        ColoringStrategy::Explicit(map) => {
            if map.len() != q_vertices {
                return Err(Error::InvalidColoring(format!("{} colors for {q_vertices} vertices", map.len())));
            }
            if let Some(bad) = map.iter().find(|&&c| c >= m) {
                return Err(Error::InvalidColoring(format!("color {bad} out of range 0..{m}")));
            }
            map.clone()
        }
    };
    Ok(Coloring { colors, m, strategy })
}

/// A seed simplex split by color: `rows[i]` are the P-vertices over `vᵢ`.
type ColoredCell = Vec<Vec<u32>>;

/// The seed triangulation and its restrictions to the faces
/// `P × conv{vᵢ : i ∈ mask}`, computed on demand.
struct Seed {
    m: usize,
    cells: Vec<ColoredCell>,
    restricted: std::sync::Mutex<HashMap<u64, Arc<Vec<ColoredCell>>>>,
}

impl Seed {
    fn new<T: LatticeScalar>(t0: &Triangulation<T>) -> Result<(Self, PointConfiguration<T>)> {
        let (p, m) = t0
            .config()
            .simplex_product_factor()
            .ok_or_else(|| Error::NotProduct(t0.config().label().to_string()))?;
        if m > 64 {
            return Err(Error::GuardExceeded { what: "colors", value: m as u128, limit: 64 });
        }
        let cells = t0
            .simplices()
            .iter()
            .map(|s| {
                let mut rows = vec![Vec::new(); m];
                for &v in s.vertices() {
                    rows[v as usize % m].push(v / m as u32);
                }
                rows
            })
            .collect();
        Ok((Seed { m, cells, restricted: Default::default() }, p))
    }

    /// Full-dimensional traces of the seed on the face given by `mask`:
    /// exactly the cells with one vertex over every absent color, with those
    /// vertices dropped and duplicates removed.
    fn restricted(&self, mask: u64) -> Arc<Vec<ColoredCell>> {
        if let Some(r) = self.restricted.lock().expect("cache lock").get(&mask) {
            return r.clone();
        }
        let mut seen = BTreeSet::new();
        for cell in &self.cells {
            let ok = (0..self.m).all(|i| mask >> i & 1 == 1 || cell[i].len() == 1);
            if ok {
                let trace: ColoredCell =
                    (0..self.m).map(|i| if mask >> i & 1 == 1 { cell[i].clone() } else { Vec::new() }).collect();
                seen.insert(trace);
            }
        }
        let r = Arc::new(seen.into_iter().collect::<Vec<_>>());
        self.restricted.lock().expect("cache lock").insert(mask, r.clone());
        r
    }
}

fn cell_count(rows: &ColoredCell, k: &[usize]) -> u128 {
    rows.iter()
        .zip(k)
        .filter(|(_, &ki)| ki > 0)
        .map(|(r, &ki)| binomial((ki + r.len()) as i64 - 2, r.len() as i64 - 1))
        .product()
}

fn color_counts(sigma: &Simplex, coloring: &[usize], m: usize) -> Vec<usize> {
    let mut k = vec![0usize; m];
    for &q in sigma.vertices() {
        k[coloring[q as usize]] += 1;
    }
    k
}

fn mask_of(k: &[usize]) -> u64 {
    k.iter().enumerate().filter(|(_, &c)| c > 0).fold(0, |acc, (i, _)| acc | 1 << i)
}

type IndexMap = Box<dyn Fn(u32, u32) -> u32 + Send + Sync>;

/// Output configuration of `P × Q` and the map `(p, q) ↦ index`. Two cubes
/// give the cube `I^{l+q}` with P's coordinates first.
fn product_layout<T: LatticeScalar>(
    p: &PointConfiguration<T>,
    q: &PointConfiguration<T>,
) -> (PointConfiguration<T>, IndexMap) {
    if let (ConfigLabel::Cube(lp), ConfigLabel::Cube(lq)) = (p.label(), q.label()) {
        if p.is_canonical() && q.is_canonical() {
            let lp = *lp;
            return (PointConfiguration::cube(lp + lq), Box::new(move |a, b| a | (b << lp)));
        }
    }
    let nq = q.len() as u32;
    (PointConfiguration::product(p, q), Box::new(move |a, b| a * nq + b))
}

/// Triangulates `P × Q`. `T_Q` is checked to be face-to-face first.
pub fn triangulate_product<T: LatticeScalar>(
    tq: &Triangulation<T>,
    t0: &Triangulation<T>,
    coloring: &Coloring,
) -> Result<Triangulation<T>> {
    let report = validate_face_to_face(tq);
    if !report.is_face_to_face {
        return Err(Error::NotFaceToFace(format!("{} violations", report.violations.len())));
    }
    triangulate_product_prevalidated(tq, t0, coloring)
}

/// [`triangulate_product`] for a `T_Q` the caller has already validated.
pub fn triangulate_product_prevalidated<T: LatticeScalar>(
    tq: &Triangulation<T>,
    t0: &Triangulation<T>,
    coloring: &Coloring,
) -> Result<Triangulation<T>> {
    let (seed, p) = Seed::new(t0)?;
    check_coloring(tq, &seed, coloring)?;
    let (target, index) = product_layout(&p, tq.config());
    let m = seed.m;
    let colors = coloring.colors();
    let simplices: Vec<Simplex> = tq
        .simplices()
        .par_iter()
        .flat_map_iter(|sigma| {
            let mut cols = vec![Vec::new(); m];
            for &q in sigma.vertices() {
                cols[colors[q as usize]].push(q);
            }
            let k: Vec<usize> = cols.iter().map(Vec::len).collect();
            let cells = seed.restricted(mask_of(&k));
            let block_cols: Vec<Vec<u32>> = cols.into_iter().filter(|c| !c.is_empty()).collect();
            let index = &index;
            let out: Vec<Simplex> = cells
                .iter()
                .flat_map(|rows| {
                    let cell = LiftedCell {
                        base_cell: Simplex::default(),
                        block_rows: rows.iter().filter(|r| !r.is_empty()).cloned().collect(),
                        block_cols: block_cols.clone(),
                    };
                    multi_staircases_with(&cell, index)
                })
                .collect();
            out
        })
        .collect();
    Triangulation::new(Arc::new(target), simplices)
}

fn check_coloring<T: LatticeScalar>(tq: &Triangulation<T>, seed: &Seed, coloring: &Coloring) -> Result<()> {
    if coloring.m() != seed.m {
        return Err(Error::MismatchedColors { coloring: coloring.m(), seed: seed.m });
    }
    if coloring.colors().len() != tq.config().len() {
        return Err(Error::LengthMismatch { expected: tq.config().len(), found: coloring.colors().len() });
    }
    Ok(())
}

/// Size of [`triangulate_product`] without materializing it.
pub fn product_size<T: LatticeScalar>(
    tq: &Triangulation<T>,
    t0: &Triangulation<T>,
    coloring: &Coloring,
) -> Result<u128> {
    let (seed, _) = Seed::new(t0)?;
    check_coloring(tq, &seed, coloring)?;
    Ok(size_with(&seed, tq, coloring.colors()))
}

fn size_with<T: LatticeScalar>(seed: &Seed, tq: &Triangulation<T>, colors: &[usize]) -> u128 {
    tq.simplices()
        .iter()
        .map(|sigma| {
            let k = color_counts(sigma, colors, seed.m);
            seed.restricted(mask_of(&k)).iter().map(|rows| cell_count(rows, &k)).sum::<u128>()
        })
        .sum()
}

/// `Σ_σ Σ_τ ∏ C(|σᵢ|+|τᵢ|−2, |τᵢ|−1)` over all seed cells, with the
/// binomial conventions of [`binomial`]. Agrees with [`product_size`] when
/// every cell of `T_Q` misses at most one color; otherwise it can count a
/// face trace once per seed cell containing it.
pub fn formula_size<T: LatticeScalar>(
    tq: &Triangulation<T>,
    t0: &Triangulation<T>,
    coloring: &Coloring,
) -> Result<u128> {
    let (seed, _) = Seed::new(t0)?;
    check_coloring(tq, &seed, coloring)?;
    Ok(tq
        .simplices()
        .iter()
        .map(|sigma| {
            let k = color_counts(sigma, coloring.colors(), seed.m);
            seed.cells
                .iter()
                .map(|rows| {
                    rows.iter()
                        .zip(&k)
                        .map(|(r, &ki)| binomial((ki + r.len()) as i64 - 2, r.len() as i64 - 1))
                        .product::<u128>()
                })
                .sum::<u128>()
        })
        .sum())
}

/// `|T_Q| · t₀ · (n/m + l)^l`.
pub fn size_bound(tq_size: u128, t0: &BigRational, n: usize, m: usize, l: usize) -> Result<BigRational> {
    if m > n {
        return Err(Error::TooManyColors { m, n });
    }
    if m == 0 || l == 0 {
        return Err(Error::InvalidSpec("m and l must be positive".into()));
    }
    let base = BigRational::new(BigInt::from(n), BigInt::from(m)) + BigRational::from_integer(BigInt::from(l));
    let pow = (0..l).fold(BigRational::one(), |acc, _| acc * &base);
    Ok(BigRational::from_integer(BigInt::from(tq_size)) * t0 * pow)
}

/// Both exact computations of the average size over all colorings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectedSize {
    /// Average over every coloring.
    pub enumerated: BigRational,
    /// Sum over cells of multinomial expectations.
    pub multinomial: BigRational,
}

/// Exact average size over all `m^{|vert Q|}` colorings, by enumeration and
/// by per-cell multinomial expectation. Fails if the two disagree.
pub fn exact_expected_size<T: LatticeScalar>(
    tq: &Triangulation<T>,
    t0: &Triangulation<T>,
    m: usize,
) -> Result<ExpectedSize> {
    let (seed, _) = Seed::new(t0)?;
    if seed.m != m {
        return Err(Error::MismatchedColors { coloring: m, seed: seed.m });
    }
    let nv = tq.config().len();
    let total = (m as u128).checked_pow(nv as u32).filter(|&t| t <= COLORING_ENUMERATION_LIMIT).ok_or(
        Error::GuardExceeded {
            what: "colorings",
            value: (m as u128).saturating_pow(nv.min(127) as u32),
            limit: COLORING_ENUMERATION_LIMIT,
        },
    )?;
    let sum: u128 = (0..total)
        .into_par_iter()
        .map(|mut code| {
            let colors: Vec<usize> = (0..nv)
                .map(|_| {
                    let c = (code % m as u128) as usize;
                    code /= m as u128;
                    c
                })
                .collect();
            size_with(&seed, tq, &colors)
        })
        .sum();
    let enumerated = BigRational::new(BigInt::from(sum), BigInt::from(total));
    let multinomial = multinomial_expected_size_seed(&seed, tq, m);
    if enumerated != multinomial {
        return Err(Error::Internal(format!("expected size mismatch: {enumerated} vs {multinomial}")));
    }
    Ok(ExpectedSize { enumerated, multinomial })
}

fn compositions(n: usize, m: usize) -> Vec<Vec<usize>> {
    if m == 1 {
        return vec![vec![n]];
    }
    (0..=n)
        .flat_map(|first| {
            compositions(n - first, m - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn multinomial_expected_size_seed<T: LatticeScalar>(seed: &Seed, tq: &Triangulation<T>, m: usize) -> BigRational {
    let n = tq.dim() + 1;
    let denom = BigInt::from(m).pow(n as u32);
    let n_fact = BigInt::from(factorial(n));
    let per_cell: BigRational = compositions(n, m)
        .into_iter()
        .map(|k| {
            let ways = &n_fact / k.iter().map(|&ki| BigInt::from(factorial(ki))).product::<BigInt>();
            let size: u128 = seed.restricted(mask_of(&k)).iter().map(|rows| cell_count(rows, &k)).sum();
            BigRational::new(ways * BigInt::from(size), denom.clone())
        })
        .fold(BigRational::zero(), |a, b| a + b);
    per_cell * BigRational::from_integer(BigInt::from(tq.len()))
}

/// Exact expected size under i.i.d. uniform colors, without enumerating
/// colorings. Usable for any size of `Q`.
pub fn multinomial_expected_size<T: LatticeScalar>(
    tq: &Triangulation<T>,
    t0: &Triangulation<T>,
    m: usize,
) -> Result<BigRational> {
    let (seed, _) = Seed::new(t0)?;
    if seed.m != m {
        return Err(Error::MismatchedColors { coloring: m, seed: seed.m });
    }
    Ok(multinomial_expected_size_seed(&seed, tq, m))
}

#[derive(Clone, Debug)]
pub struct MonteCarloStats {
    pub samples: usize,
    pub rng_seed: u64,
    /// Per-sample coloring seeds, in sample order.
    pub seeds: Vec<u64>,
    pub sizes: Vec<u128>,
    pub mean: f64,
    pub min: u128,
    pub max: u128,
    /// A coloring achieving `min` (the first in sample order).
    pub best: Coloring,
}

/// Sizes for `samples` random colorings. Sample `i` uses the seed given by
/// the `i`-th output of a ChaCha8 stream seeded with `rng_seed`.
pub fn monte_carlo_size<T: LatticeScalar>(
    tq: &Triangulation<T>,
    t0: &Triangulation<T>,
    m: usize,
    samples: usize,
    rng_seed: u64,
) -> Result<MonteCarloStats> {
    if samples == 0 {
        return Err(Error::InvalidSpec("samples must be at least 1".into()));
    }
    let (seed, _) = Seed::new(t0)?;
    if seed.m != m {
        return Err(Error::MismatchedColors { coloring: m, seed: seed.m });
    }
    let mut master = ChaCha8Rng::seed_from_u64(rng_seed);
    let seeds: Vec<u64> = (0..samples).map(|_| master.next_u64()).collect();
    let nv = tq.config().len();
    let colorings: Vec<Coloring> = seeds
        .iter()
        .map(|&s| make_coloring(nv, m, ColoringStrategy::Random { seed: s }))
        .collect::<Result<_>>()?;
    let sizes: Vec<u128> = colorings.par_iter().map(|c| size_with(&seed, tq, c.colors())).collect();
    let min = *sizes.iter().min().expect("samples >= 1");
    let max = *sizes.iter().max().expect("samples >= 1");
    let mean = sizes.iter().map(|&s| s.to_f64().unwrap_or(f64::NAN)).sum::<f64>() / samples as f64;
    let best_idx = sizes.iter().position(|&s| s == min).expect("min is attained");
    Ok(MonteCarloStats { samples, rng_seed, seeds, sizes, mean, min, max, best: colorings[best_idx].clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::validate_face_to_face;
    use proptest::prelude::*;

    fn square() -> Triangulation<i64> {
        Triangulation::new(
            Arc::new(PointConfiguration::cube(2)),
            vec![Simplex::from([0, 1, 3]), Simplex::from([0, 2, 3])],
        )
        .unwrap()
    }

    fn as_seed(t: &Triangulation<i64>, m: usize) -> Triangulation<i64> {
        // I^l x Δ^0 has the same indices as I^l
        assert_eq!(m, 1);
        let l = t.dim();
        Triangulation::new(Arc::new(PointConfiguration::cube_times_simplex(l, 1)), t.simplices().to_vec()).unwrap()
    }

    #[test]
    fn colorings() {
        let c = make_coloring(8, 2, ColoringStrategy::Balanced).unwrap();
        assert_eq!(c.colors(), &[0, 1, 0, 1, 0, 1, 0, 1]);
        let a = make_coloring(8, 2, ColoringStrategy::Random { seed: 7 }).unwrap();
        let b = make_coloring(8, 2, ColoringStrategy::Random { seed: 7 }).unwrap();
        assert_eq!(a, b);
        for s in [ColoringStrategy::Balanced, ColoringStrategy::Random { seed: 3 }] {
            assert!(make_coloring(4, 1, s).unwrap().colors().iter().all(|&c| c == 0));
        }
        assert!(make_coloring(3, 2, ColoringStrategy::Explicit(vec![0, 2, 1])).is_err());
        assert!(make_coloring(3, 2, ColoringStrategy::Explicit(vec![0, 1])).is_err());
    }

    #[test]
    fn haiman_square_by_square() {
        let tq = square();
        let t0 = as_seed(&square(), 1);
        let c = make_coloring(4, 1, ColoringStrategy::Balanced).unwrap();
        let t = triangulate_product(&tq, &t0, &c).unwrap();
        assert_eq!(t.len(), 24);
        assert_eq!(t.config().label(), &ConfigLabel::Cube(4));
        assert_eq!(product_size(&tq, &t0, &c).unwrap(), 24);
        assert!(validate_face_to_face(&t).is_face_to_face);
    }

    #[test]
    fn bounds() {
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(size_bound(5, &r(14, 3), 4, 2, 3).unwrap(), r(8750, 3));
        assert_eq!(size_bound(2, &r(3, 1), 3, 2, 2).unwrap(), r(147, 2));
        assert_eq!(size_bound(1, &r(5, 2), 3, 3, 2).unwrap(), r(5, 2) * r(9, 1));
        assert!(matches!(size_bound(1, &r(1, 1), 2, 3, 1), Err(Error::TooManyColors { .. })));
    }

    #[test]
    fn compositions_are_complete() {
        assert_eq!(compositions(3, 2).len(), 4);
        assert_eq!(compositions(4, 3).len(), 15);
    }

    proptest! {
        /// E[∏ (kᵢ+tᵢ−1)(kᵢ+tᵢ−2)⋯kᵢ] ≤ (n/m + l)^l for multinomial k and Σtᵢ = l.
        #[test]
        fn falling_power_bound(t in proptest::collection::vec(0usize..4, 1..4), extra in 0usize..4) {
            let m = t.len();
            let l: usize = t.iter().sum();
            prop_assume!(l >= 1);
            let n = m + extra;
            let denom = BigInt::from(m).pow(n as u32);
            let nf = BigInt::from(factorial(n));
            let mut e = BigRational::zero();
            for k in compositions(n, m) {
                let ways = &nf / k.iter().map(|&ki| BigInt::from(factorial(ki))).product::<BigInt>();
                let val: i64 = k.iter().zip(&t).map(|(&ki, &ti)| {
                    (0..ti).map(|j| ki as i64 + ti as i64 - 1 - j as i64).product::<i64>()
                }).product();
                e += BigRational::new(ways * BigInt::from(val), denom.clone());
            }
            let base = BigRational::new(BigInt::from(n), BigInt::from(m)) + BigRational::from_integer(BigInt::from(l));
            let bound = (0..l).fold(BigRational::one(), |a, _| a * &base);
            prop_assert!(e <= bound);
        }
    }
}
