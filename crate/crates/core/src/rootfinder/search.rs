use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::winding::{box_winding, Sample, SampleCache, WindingOptions};
use super::{
    winding_count_jittered, wronskian, wronskian_winding_options, DiskProblem, RootError, SearchBox, EXCLUDED_RADIUS,
};
use crate::radialode::MAX_MODE;

/// Split positions tried in turn; none of them bisects a box symmetric about the real axis.
const SPLIT_FRACTIONS: [f64; 4] = [0.5137, 0.4629, 0.5521, 0.4217];
/// Density multipliers used to recount when a split does not conserve the count.
const RECOUNT_DENSITIES: [f64; 2] = [2.0, 4.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    /// Boundary sampling; derived from the problem when `None`.
    pub winding: Option<WindingOptions>,
    /// Worker threads; the global pool when `None`.
    pub jobs: Option<usize>,
    pub newton_max_iter: usize,
    /// Largest accepted `|W| / (|u₁u₂′| + |u₂u₁′|)`.
    pub residual_tol: f64,
    /// Count-1 boxes are bisected down to this relative width before giving up.
    pub min_width: f64,
    /// Boxes with count ≥ 2 below this relative width are treated as one multiple root.
    pub cluster_width: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            winding: None,
            jobs: None,
            newton_max_iter: 50,
            residual_tol: 1e-8,
            min_width: 1e-9,
            cluster_width: 1e-6,
        }
    }
}

/// A located eigenvalue of one angular mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenvalueRecord {
    pub lambda: Complex64,
    pub m: u32,
    pub multiplicity: u32,
    pub residual: f64,
    #[serde(rename = "box")]
    pub search_box: SearchBox,
}

/// Winding count of the whole region for one mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModeCount {
    pub m: u32,
    pub count: i64,
    /// The counted box, which differs from the requested region after jittering.
    pub region: SearchBox,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnresolvedBox {
    pub m: u32,
    #[serde(rename = "box")]
    pub search_box: SearchBox,
    pub count: i64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Spectrum {
    pub region: SearchBox,
    pub m_max: u32,
    /// Sorted by `(m, Re λ, Im λ)`.
    pub records: Vec<EigenvalueRecord>,
    pub mode_counts: Vec<ModeCount>,
    pub unresolved: Vec<UnresolvedBox>,
    /// Splits whose child counts needed a denser recount.
    pub count_repairs: usize,
    pub evaluations: usize,
}

impl Spectrum {
    /// `Σ_m` winding count of the region.
    pub fn total_count(&self) -> i64 {
        self.mode_counts.iter().map(|c| c.count).sum()
    }

    /// `Σ` multiplicities of the records.
    pub fn total_multiplicity(&self) -> i64 {
        self.records.iter().map(|r| i64::from(r.multiplicity)).sum()
    }

    pub fn is_complete(&self) -> bool {
        self.unresolved.is_empty()
    }
}

/// `⌈1.3·|λ|max·√(max n)·R + 10⌉`, capped at the solver envelope.
pub fn m_max_auto(p: &DiskProblem, region: &SearchBox) -> u32 {
    let v = 1.3 * region.max_modulus() * p.max_index().sqrt() * p.radius + 10.0;
    (v.ceil() as u32).min(MAX_MODE)
}

pub fn find_eigenvalues(p: &DiskProblem, region: &SearchBox, m_max: u32) -> Result<Spectrum, RootError> {
    find_eigenvalues_with(p, region, m_max, &SearchOptions::default())
}

pub fn find_eigenvalues_with(
    p: &DiskProblem,
    region: &SearchBox,
    m_max: u32,
    opts: &SearchOptions,
) -> Result<Spectrum, RootError> {
    region.validate()?;
    if region.min_modulus() < EXCLUDED_RADIUS {
        return Err(RootError::InvalidBox(format!("{region:?} meets the excluded disk |λ| < {EXCLUDED_RADIUS}")));
    }
    if m_max > MAX_MODE {
        return Err(RootError::InvalidBox(format!("mMax {m_max} exceeds {MAX_MODE}")));
    }
    check_not_degenerate(p, region)?;
    let wopts = opts.winding.unwrap_or_else(|| wronskian_winding_options(p));

    let run = || -> Vec<Result<ModeResult, RootError>> {
        (0..=m_max).into_par_iter().map(|m| solve_mode(p, m, region, &wopts, opts)).collect()
    };
    let results = match opts.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| RootError::InvalidProblem(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };

    let mut spectrum = Spectrum {
        region: *region,
        m_max,
        records: Vec::new(),
        mode_counts: Vec::new(),
        unresolved: Vec::new(),
        count_repairs: 0,
        evaluations: 0,
    };
    for r in results {
        let r = r?;
        spectrum.records.extend(r.records);
        spectrum.mode_counts.push(r.count);
        spectrum.unresolved.extend(r.unresolved);
        spectrum.count_repairs += r.repairs;
        spectrum.evaluations += r.evaluations;
    }
    spectrum.records.sort_by(|a, b| {
        a.m.cmp(&b.m).then(a.lambda.re.total_cmp(&b.lambda.re)).then(a.lambda.im.total_cmp(&b.lambda.im))
    });
    Ok(spectrum)
}

/// `W ≡ 0` shows up as exact cancellation at every probe point.
fn check_not_degenerate(p: &DiskProblem, region: &SearchBox) -> Result<(), RootError> {
    let probes = [(0.5, 0.5), (0.13, 0.29), (0.71, 0.83), (0.37, 0.11), (0.91, 0.61)];
    for (fx, fy) in probes {
        let l = Complex64::new(region.re_min + fx * region.width(), region.im_min + fy * region.height());
        for m in [0, 1] {
            if wronskian(p, m, l)?.residual() > 1e-12 {
                return Ok(());
            }
        }
    }
    Err(RootError::Degenerate)
}

struct ModeResult {
    records: Vec<EigenvalueRecord>,
    count: ModeCount,
    unresolved: Vec<UnresolvedBox>,
    repairs: usize,
    evaluations: usize,
}

fn solve_mode(
    p: &DiskProblem,
    m: u32,
    region: &SearchBox,
    wopts: &WindingOptions,
    opts: &SearchOptions,
) -> Result<ModeResult, RootError> {
    let mut cache = SampleCache::new(|l| wronskian(p, m, l).map(|w| w.sample()), wopts.conjugate_symmetric);
    let (count, used) = winding_count_jittered(&mut cache, region, wopts)?;
    let mut records = Vec::new();
    let mut unresolved = Vec::new();
    let mut repairs = 0;
    let mut stack = vec![(used, count)];
    while let Some((b, n)) = stack.pop() {
        if n == 0 {
            continue;
        }
        let scale = 1.0 + b.center().norm();
        let size = b.width().max(b.height());
        let unresolved_box = |reason: &str| UnresolvedBox { m, search_box: b, count: n, reason: reason.into() };
        if n < 0 {
            unresolved.push(unresolved_box("negative winding count"));
            continue;
        }
        if n == 1 || size <= opts.cluster_width * scale {
            match newton(&mut cache, &b, n as u32, opts)? {
                Some((lambda, residual)) => {
                    records.push(EigenvalueRecord { lambda, m, multiplicity: n as u32, residual, search_box: b });
                    continue;
                }
                None if n > 1 || size <= opts.min_width * scale => {
                    unresolved.push(unresolved_box("Newton iteration did not converge inside the box"));
                    continue;
                }
                None => {}
            }
        }
        match split_counted(&mut cache, &b, n, wopts)? {
            Some((children, repaired)) => {
                repairs += usize::from(repaired);
                // right child first so the left one is processed first
                stack.push(children[1]);
                stack.push(children[0]);
            }
            None => unresolved.push(unresolved_box("every split line meets a zero")),
        }
    }
    Ok(ModeResult {
        records: dedup(records),
        count: ModeCount { m, count, region: used },
        unresolved,
        repairs,
        evaluations: cache.evaluations(),
    })
}

type Counted = (SearchBox, i64);

/// Splits `b` and counts both halves. When the halves do not add up to `n` the
/// three boxes are recounted at higher density; the finest counts are kept.
fn split_counted<F>(
    cache: &mut SampleCache<F>,
    b: &SearchBox,
    n: i64,
    wopts: &WindingOptions,
) -> Result<Option<([Counted; 2], bool)>, RootError>
where
    F: FnMut(Complex64) -> Result<Sample, RootError>,
{
    for frac in SPLIT_FRACTIONS {
        let (l, r) = b.split(frac);
        let counted = (|| -> Result<(i64, i64), RootError> {
            Ok((box_winding(cache, &l, wopts)?, box_winding(cache, &r, wopts)?))
        })();
        let (mut cl, mut cr) = match counted {
            Ok(c) => c,
            Err(RootError::BoundaryZero { .. }) => continue,
            Err(e) => return Err(e),
        };
        if cl + cr == n {
            return Ok(Some(([(l, cl), (r, cr)], false)));
        }
        for density in RECOUNT_DENSITIES {
            let dense = WindingOptions { density: wopts.density * density, ..*wopts };
            let parent = box_winding(cache, b, &dense)?;
            cl = box_winding(cache, &l, &dense)?;
            cr = box_winding(cache, &r, &dense)?;
            if cl + cr == parent {
                break;
            }
        }
        return Ok(Some(([(l, cl), (r, cr)], true)));
    }
    Ok(None)
}

/// Newton's method `λ ← λ − p·W/W′` from the box center. Returns the root and
/// its residual when it converges inside the box with a small residual.
fn newton<F>(
    cache: &mut SampleCache<F>,
    b: &SearchBox,
    multiplicity: u32,
    opts: &SearchOptions,
) -> Result<Option<(Complex64, f64)>, RootError>
where
    F: FnMut(Complex64) -> Result<Sample, RootError>,
{
    let center = b.center();
    let reach = 2.0 * b.width().max(b.height());
    let p = f64::from(multiplicity);
    let mut z = center;
    let mut last_step = f64::INFINITY;
    for _ in 0..opts.newton_max_iter {
        let s = cache.direct(z)?;
        let step = p * s.value / s.dvalue;
        if !step.re.is_finite() || !step.im.is_finite() {
            return Ok(None);
        }
        z -= step;
        if (z - center).norm() > reach || z.re <= 0.0 {
            return Ok(None);
        }
        let size = step.norm();
        let tiny = 1e-12 * (1.0 + z.norm());
        // stop at convergence, or once the step stalls at the noise level
        if size <= tiny || (size >= last_step && size <= 1e4 * tiny) {
            break;
        }
        last_step = size;
    }
    let s = cache.direct(z)?;
    let residual = s.relative_magnitude();
    if residual <= opts.residual_tol && b.contains(z, 1e-10 * (1.0 + z.norm())) {
        Ok(Some((z, residual)))
    } else {
        Ok(None)
    }
}

/// Drops records that repeat a root already found in a neighbouring box.
fn dedup(mut records: Vec<EigenvalueRecord>) -> Vec<EigenvalueRecord> {
    records.sort_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re).then(a.lambda.im.total_cmp(&b.lambda.im)));
    let mut kept: Vec<EigenvalueRecord> = Vec::with_capacity(records.len());
    for r in records {
        let radius = 1e-7 * (1.0 + r.lambda.norm());
        if let Some(k) = kept.iter_mut().rev().take_while(|k| r.lambda.re - k.lambda.re <= radius).find(|k| (k.lambda - r.lambda).norm() <= radius) {
            k.multiplicity = k.multiplicity.max(r.multiplicity);
            continue;
        }
        kept.push(r);
    }
    kept
}
