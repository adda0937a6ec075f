//! Staircase triangulations of `Δ^k × Δ^l` and the multi-staircase lift of a
//! triangulation of `P × Δ^{m-1}` to `P × Δ^{n-1}`.

use std::sync::Arc;

use rayon::prelude::*;

use crate::combinatorics::binomial;
use crate::complex::{Simplex, Triangulation};
use crate::error::{Error, Result};
use crate::geometry::{ConfigLabel, LatticeScalar, PointConfiguration};

/// Positive multiplicities `(k₁, …, k_m)`; `n = Σ kᵢ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KVector(Vec<usize>);

impl KVector {
    pub fn new(k: Vec<usize>) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::EmptyInput);
        }
        if k.contains(&0) {
            return Err(Error::ZeroInKVector);
        }
        Ok(KVector(k))
    }

    pub fn ones(m: usize) -> Self {
        KVector(vec![1; m])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    pub fn n(&self) -> usize {
        self.0.iter().sum()
    }

    /// First column of each block in `Δ^{n-1}`.
    pub fn offsets(&self) -> Vec<usize> {
        self.0
            .iter()
            .scan(0, |acc, &k| {
                let o = *acc;
                *acc += k;
                Some(o)
            })
            .collect()
    }
}

/// All monotone lattice paths from `(0,0)` to `(rows-1, cols-1)` in a grid,
/// as `(row, col)` lists. Moves to the next column are tried before moves to
/// the next row, so paths come out in lexicographic order.
pub fn staircase_paths(rows: usize, cols: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(r: usize, c: usize, rows: usize, cols: usize, path: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        path.push((r, c));
        if r + 1 == rows && c + 1 == cols {
            out.push(path.clone());
        } else {
            if c + 1 < cols {
                go(r, c + 1, rows, cols, path, out);
            }
            if r + 1 < rows {
                go(r + 1, c, rows, cols, path, out);
            }
        }
        path.pop();
    }
    let mut out = Vec::new();
    if rows > 0 && cols > 0 {
        go(0, 0, rows, cols, &mut Vec::with_capacity(rows + cols), &mut out);
    }
    out
}

/// The staircase triangulation of `Δ^k × Δ^l`, indices `row * (l+1) + col`.
pub fn staircase_triangulation<T: LatticeScalar>(k: usize, l: usize) -> Triangulation<T> {
    let label = ConfigLabel::product(ConfigLabel::Simplex(k), ConfigLabel::Simplex(l));
    let config = Arc::new(PointConfiguration::from_label(&label).expect("product of simplices is canonical"));
    let simplices = staircase_paths(k + 1, l + 1)
        .into_iter()
        .map(|path| Simplex::new(path.into_iter().map(|(r, c)| (r * (l + 1) + c) as u32)))
        .collect();
    Triangulation::new(config, simplices).expect("staircases have d+1 distinct vertices")
}

/// `π⁻¹(B)` for a simplex `B` of `P × Δ^{m-1}`: block `i` is the grid of
/// P-vertices of `τᵢ` against the columns `v_1^i … v_{kᵢ}^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedCell {
    pub base_cell: Simplex,
    pub block_rows: Vec<Vec<u32>>,
    pub block_cols: Vec<Vec<u32>>,
}

impl LiftedCell {
    /// All `(p, column)` pairs of the cell.
    pub fn vertices(&self) -> Vec<(u32, u32)> {
        self.block_rows
            .iter()
            .zip(&self.block_cols)
            .flat_map(|(rows, cols)| rows.iter().flat_map(move |&p| cols.iter().map(move |&c| (p, c))))
            .collect()
    }

    /// Multi-staircase count of this cell.
    pub fn staircase_count(&self) -> u128 {
        self.block_rows
            .iter()
            .zip(&self.block_cols)
            .map(|(r, c)| binomial((r.len() + c.len()) as i64 - 2, r.len() as i64 - 1))
            .product()
    }
}

/// Lifts a simplex of `P × Δ^{m-1}` (indices `p * m + i`).
pub fn lift_cell(base: &Simplex, m: usize, kvec: &KVector) -> Result<LiftedCell> {
    if kvec.m() != m {
        return Err(Error::LengthMismatch { expected: m, found: kvec.m() });
    }
    let mut block_rows = vec![Vec::new(); m];
    for &v in base.vertices() {
        block_rows[v as usize % m].push(v / m as u32);
    }
    for rows in &mut block_rows {
        rows.sort_unstable();
    }
    let block_cols = kvec
        .offsets()
        .into_iter()
        .zip(kvec.as_slice())
        .map(|(o, &k)| (o as u32..(o + k) as u32).collect())
        .collect();
    Ok(LiftedCell { base_cell: base.clone(), block_rows, block_cols })
}

/// All multi-staircases of a cell, with `(p, column)` mapped to an index
/// of the target configuration by `index`.
pub fn multi_staircases_with(cell: &LiftedCell, index: impl Fn(u32, u32) -> u32) -> Vec<Simplex> {
    let per_block: Vec<Vec<Vec<(usize, usize)>>> = cell
        .block_rows
        .iter()
        .zip(&cell.block_cols)
        .map(|(r, c)| staircase_paths(r.len(), c.len()))
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; per_block.len()];
    if per_block.iter().any(|b| b.is_empty()) {
        return out;
    }
    loop {
        let mut verts = Vec::new();
        for (b, &ci) in choice.iter().enumerate() {
            for &(r, c) in &per_block[b][ci] {
                verts.push(index(cell.block_rows[b][r], cell.block_cols[b][c]));
            }
        }
        out.push(Simplex::new(verts));
        // odometer with the last block fastest
        let mut b = choice.len();
        loop {
            if b == 0 {
                return out;
            }
            b -= 1;
            choice[b] += 1;
            if choice[b] < per_block[b].len() {
                break;
            }
            choice[b] = 0;
        }
    }
}

/// Multi-staircases in `P × Δ^{n-1}` with indices `p * n + column`.
pub fn multi_staircases(cell: &LiftedCell, n: usize) -> Vec<Simplex> {
    multi_staircases_with(cell, |p, c| p * n as u32 + c)
}

/// `∏ C(kᵢ + lᵢ − 2, kᵢ − 1)`.
pub fn multi_staircase_count(lvec: &[usize], kvec: &KVector) -> Result<u128> {
    if lvec.len() != kvec.m() {
        return Err(Error::LengthMismatch { expected: kvec.m(), found: lvec.len() });
    }
    Ok(lvec
        .iter()
        .zip(kvec.as_slice())
        .map(|(&l, &k)| binomial((k + l) as i64 - 2, k as i64 - 1))
        .product())
}

/// Lifts a triangulation of `P × Δ^{m-1}` to `P × Δ^{n-1}`.
pub fn lift_triangulation<T: LatticeScalar>(t0: &Triangulation<T>, kvec: &KVector) -> Result<Triangulation<T>> {
    let (p, m) = t0
        .config()
        .simplex_product_factor()
        .ok_or_else(|| Error::NotProduct(t0.config().label().to_string()))?;
    if kvec.m() != m {
        return Err(Error::LengthMismatch { expected: m, found: kvec.m() });
    }
    let n = kvec.n();
    let target = Arc::new(PointConfiguration::product(&p, &PointConfiguration::simplex(n - 1)));
    let simplices: Vec<Simplex> = t0
        .simplices()
        .par_iter()
        .map(|b| lift_cell(b, m, kvec).map(|cell| multi_staircases(&cell, n)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Triangulation::new(target, simplices)
}

/// Closed-form size of the lift.
pub fn lifted_size<T: LatticeScalar>(t0: &Triangulation<T>, kvec: &KVector) -> Result<u128> {
    let m = kvec.m();
    let mut total = 0u128;
    for s in t0.simplices() {
        let mut l = vec![0usize; m];
        for &v in s.vertices() {
            l[v as usize % m] += 1;
        }
        total += multi_staircase_count(&l, kvec)?;
    }
    Ok(total)
}
