//! Exhaustive enumeration of triangulations of tiny configurations and the
//! minimum of a weight functional over them.

use std::collections::{BTreeMap, HashMap};
use std::cell::RefCell;
use std::ops::ControlFlow;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::complex::{simplex_type, simplices_meet_properly, Simplex, Triangulation};
use crate::error::{Error, Result};
use crate::geometry::{ambient_normalized_volume, LatticeScalar, NormalizedVolume, PointConfiguration};
use crate::linalg::{adjugate, det_exact, rank_exact};

/// Largest candidate pool the oracle accepts.
pub const CANDIDATE_LIMIT: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    /// Sum of `1/∏tᵢ!` (needs a `P × Δ^{m-1}` label).
    Weighted,
    /// Number of simplices.
    Cardinality,
}

#[derive(Clone, Debug)]
pub struct SearchProblem<T> {
    pub config: Arc<PointConfiguration<T>>,
    pub objective: Objective,
}

impl<T: LatticeScalar> SearchProblem<T> {
    pub fn new(config: Arc<PointConfiguration<T>>, objective: Objective) -> Self {
        SearchProblem { config, objective }
    }

    pub fn objective_value(&self, t: &Triangulation<T>) -> Result<BigRational> {
        match self.objective {
            Objective::Cardinality => Ok(BigRational::from_integer(BigInt::from(t.len()))),
            Objective::Weighted => {
                let mut total = BigRational::zero();
                for s in t.simplices() {
                    total += simplex_type(s, &self.config)?.weight();
                }
                Ok(total)
            }
        }
    }
}

/// All full-dimensional simplices on the configuration, in lexicographic
/// order of their vertex tuples.
pub fn candidate_simplices<T: LatticeScalar>(config: &PointConfiguration<T>) -> Result<Vec<Simplex>> {
    let n = config.len();
    let k = config.dim() + 1;
    let count = crate::combinatorics::binomial(n as i64, k as i64);
    if count > (CANDIDATE_LIMIT as u128) * 100 {
        return Err(Error::GuardExceeded { what: "vertex subsets", value: count, limit: CANDIDATE_LIMIT as u128 * 100 });
    }
    let mut out = Vec::new();
    let mut cur: Vec<u32> = Vec::with_capacity(k);
    fn go<T: LatticeScalar>(
        config: &PointConfiguration<T>,
        start: u32,
        k: usize,
        cur: &mut Vec<u32>,
        out: &mut Vec<Simplex>,
    ) {
        if cur.len() == k {
            let p0 = config.point(cur[0]);
            let rows: Vec<Vec<T>> = cur[1..].iter().map(|&v| config.point(v).sub(p0)).collect();
            if !det_exact(&rows).is_zero() {
                out.push(Simplex::new(cur.iter().copied()));
            }
            return;
        }
        for v in start..config.len() as u32 {
            if config.len() as u32 - v < (k - cur.len()) as u32 {
                break;
            }
            cur.push(v);
            go(config, v + 1, k, cur, out);
            cur.pop();
        }
    }
    go(config, 0, k, &mut cur, &mut out);
    if out.len() > CANDIDATE_LIMIT {
        return Err(Error::GuardExceeded { what: "candidate simplices", value: out.len() as u128, limit: CANDIDATE_LIMIT as u128 });
    }
    Ok(out)
}

/// A rational point `y / den` lying on no hyperplane spanned by
/// configuration points, so it is interior to exactly one simplex of any
/// triangulation.
fn generic_interior_point<T: LatticeScalar>(config: &PointConfiguration<T>) -> Result<(Vec<i128>, i128)> {
    let d = config.dim();
    let n = config.len();
    let coords: Vec<Vec<i128>> = config
        .points()
        .iter()
        .map(|p| p.coords.iter().map(|c| c.to_i128()).collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Internal("coordinates exceed i128".into()))?;
    // hyperplanes through affinely independent d-subsets, as (normal, offset)
    let mut planes: Vec<(Vec<BigInt>, BigInt)> = Vec::new();
    let mut cur = Vec::new();
    fn subsets(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            cur.push(i);
            subsets(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    subsets(0, n, d, &mut cur, &mut |s| {
        let rows: Vec<Vec<i128>> =
            s[1..].iter().map(|&i| coords[i].iter().zip(&coords[s[0]]).map(|(a, b)| a - b).collect()).collect();
        if rank_exact(&rows) + 1 != d {
            return;
        }
        let normal: Vec<BigInt> = (0..d)
            .map(|j| {
                let minor: Vec<Vec<i128>> =
                    rows.iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| *x).collect()).collect();
                let v = det_exact(&minor);
                if j % 2 == 0 { v } else { -v }
            })
            .collect();
        let offset: BigInt = normal.iter().zip(&coords[s[0]]).map(|(a, b)| a * BigInt::from(*b)).sum();
        planes.push((normal, offset));
    });
    let centroid_num: Vec<i128> = (0..d).map(|j| coords.iter().map(|c| c[j]).sum()).collect();
    let primes = [1009i128, 1013, 1019, 1021, 1031, 1033, 1039, 1049, 1051, 1061, 1063, 1069, 1087, 1091];
    for attempt in 1..200i128 {
        // y / den = centroid + small distinct offsets
        let den: i128 = n as i128 * 1_000_003 * attempt;
        let y: Vec<i128> = (0..d)
            .map(|j| centroid_num[j] * 1_000_003 * attempt + primes[j % primes.len()] * (j as i128 + 1) + attempt * 7)
            .collect();
        let generic = planes.iter().all(|(normal, offset)| {
            let lhs: BigInt = normal.iter().zip(&y).map(|(a, b)| a * BigInt::from(*b)).sum();
            lhs != offset * BigInt::from(den)
        });
        if generic {
            return Ok((y, den));
        }
    }
    Err(Error::Internal("no generic interior point found".into()))
}

/// Whether `y / den` lies in the interior of the simplex.
fn strictly_contains<T: LatticeScalar>(config: &PointConfiguration<T>, s: &Simplex, y: &[i128], den: i128) -> bool {
    let v = s.vertices();
    let d = config.dim();
    let p = |i: usize| -> Vec<BigInt> { config.point(v[i]).coords.iter().map(|c| c.to_bigint().expect("integer")).collect() };
    let p0 = p(0);
    // columns p_i - p0
    let a: Vec<Vec<BigInt>> = (0..d).map(|r| (1..=d).map(|c| &p(c)[r] - &p0[r]).collect()).collect();
    let Some((det, adj)) = adjugate(&a) else {
        return false;
    };
    let diff: Vec<BigInt> = (0..d).map(|r| BigInt::from(y[r]) - &p0[r] * BigInt::from(den)).collect();
    let sign = det.signum();
    let mut sum = BigInt::zero();
    for row in &adj {
        let s: BigInt = row.iter().zip(&diff).map(|(a, b)| a * b).sum::<BigInt>() * &sign;
        if !s.is_positive() {
            return false;
        }
        sum += s;
    }
    // λ₀ · |det| · den = |det| · den − Σ
    (det.abs() * BigInt::from(den) - sum).is_positive()
}

struct Search<'a, T> {
    config: &'a PointConfiguration<T>,
    candidates: Vec<Simplex>,
    volumes: Vec<NormalizedVolume>,
    by_facet: HashMap<Simplex, Vec<usize>>,
    boundary: RefCell<HashMap<Simplex, bool>>,
    compatible: RefCell<HashMap<(usize, usize), bool>>,
}

impl<T: LatticeScalar> Search<'_, T> {
    fn compatible(&self, a: usize, b: usize) -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&v) = self.compatible.borrow().get(&key) {
            return v;
        }
        let v = simplices_meet_properly(self.config, &self.candidates[a], &self.candidates[b]);
        self.compatible.borrow_mut().insert(key, v);
        v
    }

    fn on_boundary(&self, f: &Simplex) -> bool {
        if let Some(&v) = self.boundary.borrow().get(f) {
            return v;
        }
        let v = self.config.lies_in_boundary_facet(f.vertices());
        self.boundary.borrow_mut().insert(f.clone(), v);
        v
    }

    /// Smallest facet of a chosen simplex that is interior and unmatched.
    fn frontier(&self, chosen: &[usize]) -> Option<Simplex> {
        let mut count: BTreeMap<Simplex, u32> = BTreeMap::new();
        for &c in chosen {
            let s = &self.candidates[c];
            for j in 0..s.len() {
                *count.entry(s.facet(j)).or_insert(0) += 1;
            }
        }
        count.into_iter().find(|(f, c)| *c == 1 && !self.on_boundary(f)).map(|(f, _)| f)
    }

    fn extend(
        &self,
        chosen: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let Some(f) = self.frontier(chosen) else {
            return visit(chosen);
        };
        let options = self.by_facet.get(&f).cloned().unwrap_or_default();
        for c in options {
            if chosen.contains(&c) || !chosen.iter().all(|&o| self.compatible(o, c)) {
                continue;
            }
            chosen.push(c);
            let flow = self.extend(chosen, visit);
            chosen.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Calls `visit` once for every triangulation of the configuration, in a
/// deterministic order. Stops early when `visit` breaks.
pub fn enumerate_triangulations<T: LatticeScalar>(
    problem: &SearchProblem<T>,
    mut visit: impl FnMut(&Triangulation<T>) -> ControlFlow<()>,
) -> Result<()> {
    let config = problem.config.as_ref();
    let candidates = candidate_simplices(config)?;
    let volumes: Vec<NormalizedVolume> = candidates
        .iter()
        .map(|s| {
            let p0 = config.point(s.vertices()[0]);
            let rows: Vec<Vec<T>> = s.vertices()[1..].iter().map(|&v| config.point(v).sub(p0)).collect();
            NormalizedVolume(det_exact(&rows).magnitude().clone())
        })
        .collect();
    let mut by_facet: HashMap<Simplex, Vec<usize>> = HashMap::new();
    for (i, s) in candidates.iter().enumerate() {
        for j in 0..s.len() {
            by_facet.entry(s.facet(j)).or_default().push(i);
        }
    }
    let (y, den) = generic_interior_point(config)?;
    let starts: Vec<usize> =
        (0..candidates.len()).filter(|&i| strictly_contains(config, &candidates[i], &y, den)).collect();
    let search = Search {
        config,
        candidates,
        volumes,
        by_facet,
        boundary: RefCell::new(HashMap::new()),
        compatible: RefCell::new(HashMap::new()),
    };
    let expected = ambient_normalized_volume(config.label()).ok();
    let mut chosen = Vec::new();
    let cfg = problem.config.clone();
    let mut err = None;
    let mut on_complete = |idx: &[usize]| {
        if let Some(e) = &expected {
            let total: NormalizedVolume = idx.iter().map(|&i| search.volumes[i].clone()).sum();
            if &total != e {
                err = Some(Error::Internal(format!("closed complex with volume {total}, expected {e}")));
                return ControlFlow::Break(());
            }
        }
        let mut simplices: Vec<Simplex> = idx.iter().map(|&i| search.candidates[i].clone()).collect();
        simplices.sort();
        match Triangulation::new(cfg.clone(), simplices) {
            Ok(t) => visit(&t),
            Err(e) => {
                err = Some(e);
                ControlFlow::Break(())
            }
        }
    };
    for s in starts {
        chosen.push(s);
        let flow = search.extend(&mut chosen, &mut on_complete);
        chosen.pop();
        if flow.is_break() {
            break;
        }
    }
    match err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Every triangulation, collected.
pub fn all_triangulations<T: LatticeScalar>(problem: &SearchProblem<T>) -> Result<Vec<Triangulation<T>>> {
    let mut out = Vec::new();
    enumerate_triangulations(problem, |t| {
        out.push(t.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Minimum objective value and the first triangulation attaining it.
pub fn min_weighted_size<T: LatticeScalar>(problem: &SearchProblem<T>) -> Result<(BigRational, Triangulation<T>)> {
    let mut best: Option<(BigRational, Triangulation<T>)> = None;
    let mut err = None;
    enumerate_triangulations(problem, |t| match problem.objective_value(t) {
        Ok(v) => {
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, t.clone()));
            }
            ControlFlow::Continue(())
        }
        Err(e) => {
            err = Some(e);
            ControlFlow::Break(())
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    best.ok_or_else(|| Error::Internal("configuration has no triangulation".into()))
}

/// Float view of an objective value, for reporting.
pub fn objective_f64(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConfigLabel;

    fn problem(label: &str, objective: Objective) -> SearchProblem<i64> {
        let label: ConfigLabel = label.parse().unwrap();
        SearchProblem::new(Arc::new(PointConfiguration::from_label(&label).unwrap()), objective)
    }

    #[test]
    fn segment_and_square() {
        assert_eq!(all_triangulations(&problem("cube(1)", Objective::Cardinality)).unwrap().len(), 1);
        assert_eq!(all_triangulations(&problem("cube(2)", Objective::Cardinality)).unwrap().len(), 2);
    }

    #[test]
    fn cube_minimum() {
        let (v, w) = min_weighted_size(&problem("cube(3)", Objective::Cardinality)).unwrap();
        assert_eq!(v, BigRational::from_integer(5.into()));
        assert_eq!(w.len(), 5);
    }

    #[test]
    fn prisms_are_m() {
        for m in 1..=3usize {
            let p = problem(&format!("product(cube(1),simplex({}))", m - 1), Objective::Weighted);
            for t in all_triangulations(&p).unwrap() {
                assert_eq!(p.objective_value(&t).unwrap(), BigRational::from_integer(m.into()));
            }
        }
    }

    #[test]
    fn guard() {
        let p = problem("cube(6)", Objective::Cardinality);
        assert!(matches!(candidate_simplices(&p.config), Err(Error::GuardExceeded { .. })));
    }
}
