//! The recursive cube builder, the product-of-cubes baseline and the
//! per-dimension report.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cayley::mixed_to_triangulation;
use crate::coloring::{make_coloring, monte_carlo_size, product_size, triangulate_product_prevalidated, size_bound, Coloring, ColoringStrategy};
use crate::combinatorics::binomial;
use crate::complex::{efficiency, validate_dissection_with, validate_face_to_face, weighted_size, CheckMode, Triangulation, ValidityReport};
use crate::error::{Error, Result};
use crate::geometry::ambient_normalized_volume;
use crate::seeds::{
    as_simplex_product, known_constants, hadamard_lower, minimal_cube, seed_i3d1, seed_i3d2, square_family, unimodular_cube,
    unimodular_seed, TARGET_I3D1, TARGET_I3D2,
};

/// Dimensions up to which face-to-face is checked by default.
pub const DEFAULT_FACE_CHECK_LIMIT: usize = 6;
/// Largest triangulation checked pair by pair; larger ones use the
/// facet-adjacency certificate.
pub const PAIRWISE_SIZE_LIMIT: usize = 4_096;
/// Largest dimension [`report_table`] builds.
pub const REPORT_DIM_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedChoice {
    /// The 44/3 seed for three colors, the 14/3 seed for two.
    I3d2,
    /// The 14/3 seed; colors are capped at two.
    I3d1,
    /// The planar family, any number of colors; needs `l = 2`.
    SquareFamily,
    /// Unimodular seeds (weighted size `m^l`).
    Unimodular,
}

impl FromStr for SeedChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "i3d2" => Ok(SeedChoice::I3d2),
            "i3d1" => Ok(SeedChoice::I3d1),
            "square_family" | "square-family" => Ok(SeedChoice::SquareFamily),
            "unimodular" => Ok(SeedChoice::Unimodular),
            _ => Err(Error::InvalidSpec(format!("unknown seed {s:?}"))),
        }
    }
}

impl fmt::Display for SeedChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeedChoice::I3d2 => "i3d2",
            SeedChoice::I3d1 => "i3d1",
            SeedChoice::SquareFamily => "square_family",
            SeedChoice::Unimodular => "unimodular",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineColoring {
    /// Vertex `v` gets color `v mod m`.
    Balanced,
    /// Best of `samples` random colorings per step.
    Random,
}

impl FromStr for PipelineColoring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "balanced" => Ok(PipelineColoring::Balanced),
            "random" => Ok(PipelineColoring::Random),
            _ => Err(Error::InvalidSpec(format!("unknown coloring {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineSpec {
    pub d: usize,
    pub l: usize,
    pub m: usize,
    pub seed: SeedChoice,
    pub coloring: PipelineColoring,
    pub rng_seed: u64,
    pub samples: usize,
    /// Face-to-face is checked on the result when `d` is at most this.
    pub face_check_limit: usize,
}

impl PipelineSpec {
    pub fn new(d: usize) -> Self {
        PipelineSpec {
            d,
            l: 3,
            m: 3,
            seed: SeedChoice::I3d2,
            coloring: PipelineColoring::Random,
            rng_seed: 0,
            samples: 16,
            face_check_limit: DEFAULT_FACE_CHECK_LIMIT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidSpec("d must be at least 1".into()));
        }
        if self.l == 0 || self.m == 0 {
            return Err(Error::InvalidSpec("l and m must be positive".into()));
        }
        if self.coloring == PipelineColoring::Random && self.samples == 0 {
            return Err(Error::InvalidSpec("samples must be at least 1".into()));
        }
        match self.seed {
            SeedChoice::I3d1 | SeedChoice::I3d2 if self.l != 3 => {
                Err(Error::InvalidSpec(format!("seed {} needs l = 3", self.seed)))
            }
            SeedChoice::SquareFamily if self.l != 2 => Err(Error::InvalidSpec("square_family needs l = 2".into())),
            SeedChoice::Unimodular if self.l > crate::seeds::UNIMODULAR_CUBE_LIMIT => {
                Err(Error::InvalidSpec(format!("unimodular seeds need l <= {}", crate::seeds::UNIMODULAR_CUBE_LIMIT)))
            }
            _ => Ok(()),
        }
    }

    /// Dimension of the starting cube: `((d-1) mod l) + 1`.
    pub fn base_dim(&self) -> usize {
        (self.d - 1) % self.l + 1
    }

    /// Cube dimensions visited, from the base to `d`.
    pub fn split(&self) -> Vec<usize> {
        (0..).map(|i| self.base_dim() + i * self.l).take_while(|&k| k <= self.d).collect()
    }
}

/// One application of the product construction.
#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub q_dim: usize,
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub seed: String,
    pub seed_weighted_size: String,
    pub colors: Vec<usize>,
    pub q_size: u128,
    pub size: u128,
    /// `|T_Q| · t₀ · (n/m + l)^l`, exact.
    pub bound: String,
    pub bound_f64: f64,
    pub bound_holds: bool,
    pub sampled_mean: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportRow {
    pub d: usize,
    pub size: u128,
    pub efficiency: f64,
    pub bound: Option<f64>,
    pub hadamard: f64,
    pub smith: Option<f64>,
    pub phi_known: Option<u64>,
    pub rho_known: Option<f64>,
    pub haiman_size: Option<u128>,
    pub haiman_efficiency: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationSummary {
    pub mode: String,
    pub is_dissection: bool,
    pub face_to_face_checked: bool,
    pub is_face_to_face: bool,
    pub violations: usize,
}

impl ValidationSummary {
    fn from_report(mode: &str, r: &ValidityReport) -> Self {
        ValidationSummary {
            mode: mode.to_string(),
            is_dissection: r.is_dissection,
            face_to_face_checked: r.face_to_face_checked,
            is_face_to_face: r.is_face_to_face,
            violations: r.violations.len(),
        }
    }

    /// Every check that ran succeeded.
    pub fn passed(&self) -> bool {
        self.is_dissection && (!self.face_to_face_checked || self.is_face_to_face)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub spec: PipelineSpec,
    pub split: Vec<usize>,
    pub notes: Vec<String>,
    pub steps: Vec<StepRecord>,
    pub rows: Vec<ReportRow>,
    pub validation: Option<ValidationSummary>,
}

impl PipelineReport {
    pub fn steps_within_bound(&self) -> bool {
        self.steps.iter().all(|s| s.bound_holds)
    }
}

/// A seed triangulation of `I^l × Δ^{m-1}` and its weighted size.
#[derive(Clone)]
struct LoadedSeed {
    name: String,
    t0: Triangulation<i64>,
    ws: BigRational,
}

struct SeedCache {
    choice: SeedChoice,
    l: usize,
    loaded: Vec<(usize, LoadedSeed)>,
    notes: Vec<String>,
}

impl SeedCache {
    fn new(choice: SeedChoice, l: usize) -> Self {
        SeedCache { choice, l, loaded: Vec::new(), notes: Vec::new() }
    }

    /// Largest usable color count not above `m`.
    fn colors(&self, m: usize) -> usize {
        match self.choice {
            SeedChoice::I3d1 => m.min(2),
            SeedChoice::I3d2 => m.min(3),
            _ => m,
        }
    }

    fn get(&mut self, m: usize) -> Result<LoadedSeed> {
        if let Some((_, s)) = self.loaded.iter().find(|(k, _)| *k == m) {
            return Ok(s.clone());
        }
        let (name, t0) = match (self.choice, m) {
            (_, 1) => {
                let t = if self.l <= 3 { minimal_cube::<i64>(self.l)? } else { unimodular_cube::<i64>(self.l)? };
                (format!("minimal{}", self.l), as_simplex_product(&t)?)
            }
            (SeedChoice::I3d2, 3) => match seed_i3d2() {
                Ok(s) => ("i3d2".to_string(), mixed_to_triangulation(&s)?),
                Err(e) => {
                    self.notes.push(format!("i3d2 unavailable ({e}); using i3d1 with two colors"));
                    return self.get(2);
                }
            },
            (SeedChoice::I3d2 | SeedChoice::I3d1, 2) => ("i3d1".to_string(), mixed_to_triangulation(&seed_i3d1()?)?),
            (SeedChoice::SquareFamily, m) => (format!("square_family({m})"), mixed_to_triangulation(&square_family(m)?)?),
            (SeedChoice::Unimodular, m) => (format!("unimodular({},{m})", self.l), unimodular_seed(self.l, m)?),
            (c, m) => return Err(Error::InvalidSpec(format!("seed {c} has no {m}-color version"))),
        };
        let ws = weighted_size(&t0)?;
        let s = LoadedSeed { name, t0, ws };
        self.loaded.push((m, s.clone()));
        Ok(s)
    }
}

fn start_cube(dim: usize) -> Result<Triangulation<i64>> {
    if dim <= 3 {
        minimal_cube(dim)
    } else {
        unimodular_cube(dim)
    }
}

/// Output of [`build_cube_recursive`].
pub struct PipelineOutput {
    /// `None` when only sizes were requested.
    pub triangulation: Option<Triangulation<i64>>,
    pub report: PipelineReport,
}

/// Builds a triangulation of `I^d` by repeated products with `I^l`, then
/// validates it.
pub fn build_cube_recursive(spec: &PipelineSpec) -> Result<PipelineOutput> {
    let out = run_chain(spec, true)?;
    let t = out.triangulation.as_ref().expect("materialized");
    let expected = ambient_normalized_volume(t.config().label())?;
    let (mode, report) = if spec.d <= spec.face_check_limit {
        ("face-to-face", validate_face_to_face(t))
    } else if t.len() <= PAIRWISE_SIZE_LIMIT {
        ("pairwise dissection", validate_dissection_with(t, &expected, CheckMode::Pairwise))
    } else {
        ("facet-adjacency dissection", validate_dissection_with(t, &expected, CheckMode::FacetAdjacency))
    };
    let mut out = out;
    out.report.validation = Some(ValidationSummary::from_report(mode, &report));
    Ok(out)
}

/// Runs the recursion; the last step is only counted unless `materialize`.
fn run_chain(spec: &PipelineSpec, materialize: bool) -> Result<PipelineOutput> {
    spec.validate()?;
    let split = spec.split();
    let mut seeds = SeedCache::new(spec.seed, spec.l);
    let mut master = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let mut current = start_cube(split[0])?;
    let mut steps = Vec::new();
    let mut rows = vec![row(split[0], current.len() as u128, None)?];
    let mut last_size = current.len() as u128;
    for (i, &d) in split.iter().enumerate().skip(1) {
        let q_dim = split[i - 1];
        let n = q_dim + 1;
        let m = seeds.colors(spec.m.min(n));
        let seed = seeds.get(m)?;
        let m = seed.t0.config().simplex_product_factor().map(|(_, m)| m).unwrap_or(m);
        let step_seed = master.next_u64();
        let (coloring, mean): (Coloring, Option<f64>) = match spec.coloring {
            PipelineColoring::Balanced => (make_coloring(current.config().len(), m, ColoringStrategy::Balanced)?, None),
            PipelineColoring::Random => {
                let stats = monte_carlo_size(&current, &seed.t0, m, spec.samples, step_seed)?;
                (stats.best, Some(stats.mean))
            }
        };
        let last = i + 1 == split.len();
        let size = if last && !materialize {
            product_size(&current, &seed.t0, &coloring)?
        } else {
            let next = triangulate_product_prevalidated(&current, &seed.t0, &coloring)?;
            let size = next.len() as u128;
            current = next;
            size
        };
        let bound = size_bound(last_size, &seed.ws, n, m, spec.l)?;
        let bound_holds = BigRational::from_integer(BigInt::from(size)) <= bound;
        let bound_f64 = bound.to_f64().unwrap_or(f64::NAN);
        steps.push(StepRecord {
            q_dim,
            d,
            n,
            m,
            seed: seed.name.clone(),
            seed_weighted_size: seed.ws.to_string(),
            colors: coloring.colors().to_vec(),
            q_size: last_size,
            size,
            bound: bound.to_string(),
            bound_f64,
            bound_holds,
            sampled_mean: mean,
        });
        rows.push(row(d, size, Some(bound_f64))?);
        last_size = size;
    }
    let triangulation = materialize.then_some(current);
    let report = PipelineReport { spec: spec.clone(), split, notes: seeds.notes, steps, rows, validation: None };
    Ok(PipelineOutput { triangulation, report })
}

fn row(d: usize, size: u128, bound: Option<f64>) -> Result<ReportRow> {
    let known = known_constants(d).ok();
    let haiman = haiman_size(d).ok();
    Ok(ReportRow {
        d,
        size,
        efficiency: efficiency(size, d),
        bound,
        hadamard: hadamard_lower(d),
        smith: known.as_ref().map(|k| k.smith_lower),
        phi_known: known.as_ref().map(|k| k.phi),
        rho_known: known.as_ref().map(|k| k.rho),
        haiman_size: haiman,
        haiman_efficiency: haiman.map(|h| efficiency(h, d)),
    })
}

/// Triangulates `I^{k+l}` from triangulations of `I^k` and `I^l` by
/// refining every product of cells with staircases.
pub fn build_cube_haiman(k: usize, l: usize, tk: &Triangulation<i64>, tl: &Triangulation<i64>) -> Result<Triangulation<i64>> {
    let is_cube = |t: &Triangulation<i64>, d: usize| t.config().is_canonical() && *t.config().label() == crate::geometry::ConfigLabel::Cube(d);
    if !is_cube(tk, k) || !is_cube(tl, l) {
        return Err(Error::InvalidSpec(format!("factors are not triangulations of I^{k} and I^{l}")));
    }
    let t0 = as_simplex_product(tk)?;
    let coloring = make_coloring(tl.config().len(), 1, ColoringStrategy::Balanced)?;
    let out = triangulate_product_prevalidated(tl, &t0, &coloring)?;
    let expected = tk.len() as u128 * tl.len() as u128 * binomial((k + l) as i64, k as i64);
    if out.len() as u128 != expected {
        return Err(Error::Internal(format!("product has {} simplices, expected {expected}", out.len())));
    }
    Ok(out)
}

/// Smallest size reachable by products of minimal triangulations of
/// `I^1`, `I^2`, `I^3`: `H(d) = min_k H(k)·H(d−k)·C(d,k)`.
pub fn haiman_size(d: usize) -> Result<u128> {
    if d == 0 {
        return Err(Error::DimensionOutOfRange(0));
    }
    let mut h: Vec<u128> = vec![0, 1, 2, 5];
    for e in 4..=d {
        let best = (1..e)
            .filter_map(|k| h[k].checked_mul(h[e - k])?.checked_mul(binomial(e as i64, k as i64)))
            .min()
            .ok_or(Error::GuardExceeded { what: "haiman size", value: e as u128, limit: 0 })?;
        h.push(best);
    }
    Ok(h[d])
}

/// Per-dimension rows for `d = 1..=d_max`.
pub fn report_rows(d_max: usize, base: &PipelineSpec) -> Result<Vec<ReportRow>> {
    if d_max == 0 {
        return Err(Error::InvalidSpec("max dimension must be at least 1".into()));
    }
    if d_max > REPORT_DIM_LIMIT {
        return Err(Error::GuardExceeded { what: "report dimension", value: d_max as u128, limit: REPORT_DIM_LIMIT as u128 });
    }
    let mut rows: Vec<Option<ReportRow>> = vec![None; d_max + 1];
    // one chain per residue class; each ends at its largest dimension
    for top in (d_max.saturating_sub(base.l) + 1).max(1)..=d_max {
        let spec = PipelineSpec { d: top, ..base.clone() };
        for r in run_chain(&spec, false)?.report.rows {
            let d = r.d;
            rows[d] = Some(r);
        }
    }
    Ok(rows.into_iter().flatten().collect())
}

pub const CSV_HEADER: &str =
    "d,size,efficiency,bound,hadamard,smith,phi_known,rho_known,haiman_size,haiman_efficiency,target_i3d1,target_i3d2";

/// CSV with the columns of [`CSV_HEADER`]; unknown values are left blank.
pub fn rows_to_csv(rows: &[ReportRow]) -> String {
    fn opt<T: fmt::Display>(v: Option<T>) -> String {
        v.map(|x| x.to_string()).unwrap_or_default()
    }
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.4},{},{:.4},{},{},{},{},{},{:.4},{:.4}\n",
            r.d,
            r.size,
            r.efficiency,
            opt(r.bound.map(|b| format!("{b:.2}"))),
            r.hadamard,
            opt(r.smith.map(|s| format!("{s:.3}"))),
            opt(r.phi_known),
            opt(r.rho_known.map(|s| format!("{s:.3}"))),
            opt(r.haiman_size),
            opt(r.haiman_efficiency.map(|e| format!("{e:.4}"))),
            TARGET_I3D1,
            TARGET_I3D2,
        ));
    }
    out
}

/// [`report_rows`] with the default spec, as CSV.
pub fn report_table(d_max: usize) -> Result<String> {
    Ok(rows_to_csv(&report_rows(d_max, &PipelineSpec::new(d_max))?))
}
