//! Experiment drivers: Weyl counting, strip checks and eigenvalue-free-region scans.

mod selftest;

use std::fmt::Write as _;

use serde::Serialize;

use crate::radialode::ContactFamily;
use crate::rootfinder::{
    find_eigenvalues_with, m_max_auto, DiskProblem, EigenvalueRecord, RootError, SearchBox, SearchOptions, Spectrum,
    EXCLUDED_RADIUS,
};

pub use selftest::{selftest, SelfTestItem};

/// Default half-height of the search window.
pub const DEFAULT_IM_MAX: f64 = 12.0;
/// Default lower cutoff `C0` of the counting function.
pub const DEFAULT_C0: f64 = 0.5;
/// Strip constant = this factor times the largest `|Im λ|` in the calibration window.
pub const STRIP_FACTOR: f64 = 1.5;
/// Parabolic constant = this factor times the largest calibration ratio.
pub const PARABOLIC_FACTOR: f64 = 2.0;
/// Width of the Re-bins used for the growth witness.
pub const WITNESS_BIN: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Root(#[from] RootError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
}

/// Highest angular mode searched.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeLimit {
    Auto,
    Fixed(u32),
}

impl ModeLimit {
    pub fn resolve(&self, p: &DiskProblem, region: &SearchBox) -> u32 {
        match self {
            ModeLimit::Auto => m_max_auto(p, region),
            ModeLimit::Fixed(m) => *m,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentOptions {
    pub im_max: f64,
    pub m_max: ModeLimit,
    pub search: SearchOptions,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self { im_max: DEFAULT_IM_MAX, m_max: ModeLimit::Auto, search: SearchOptions::default() }
    }
}

/// Enumerates eigenvalues in `[re_min, re_max] × [−im_max, im_max]`.
pub fn spectrum(p: &DiskProblem, re_min: f64, re_max: f64, opts: &ExperimentOptions) -> Result<Spectrum, HarnessError> {
    let region = SearchBox::new(re_min, re_max, -opts.im_max, opts.im_max)?;
    let m_max = opts.m_max.resolve(p, &region);
    Ok(find_eigenvalues_with(p, &region, m_max, &opts.search)?)
}

/// Contribution of a record to counting functions: `p·(2 − [m = 0])` for the modes `±m`.
pub fn record_weight(r: &EigenvalueRecord) -> u64 {
    u64::from(r.multiplicity) * if r.m == 0 { 1 } else { 2 }
}

/// `τ = (1/4π) ∫_disk (n₁ + n₂) dA`.
pub fn weyl_constant(p: &DiskProblem) -> f64 {
    (p.n1.area_integral() + p.n2.area_integral()) / (4.0 * std::f64::consts::PI)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CountingResult {
    /// `(r, N(r))` at every jump, nondecreasing.
    pub staircase: Vec<(f64, f64)>,
    pub tau: f64,
    pub c0: f64,
    pub r_max: f64,
    pub n_at_rmax: f64,
    pub rel_err_at_rmax: f64,
    /// Log-log slope of `|N(r) − τr²|` over `r ∈ [r_max/4, r_max]`, descriptive only.
    pub remainder_slope: Option<f64>,
    /// Set when some boxes were left unresolved.
    pub partial: bool,
}

impl CountingResult {
    /// `N(r)`, right-continuous.
    pub fn n_at(&self, r: f64) -> f64 {
        self.staircase.iter().take_while(|(x, _)| *x <= r).last().map_or(0.0, |(_, n)| *n)
    }
}

/// `N(r, C0)` for `r ≤ r_max`, counting `C0 ≤ |λ| ≤ r` with `Re λ > 0`.
pub fn weyl_count(p: &DiskProblem, c0: f64, r_max: f64, opts: &ExperimentOptions) -> Result<CountingResult, HarnessError> {
    check_counting_window(c0, r_max)?;
    let s = spectrum(p, c0, r_max, opts)?;
    weyl_count_from(p, &s, c0, r_max)
}

fn check_counting_window(c0: f64, r_max: f64) -> Result<(), HarnessError> {
    if !(c0 >= EXCLUDED_RADIUS) {
        return Err(HarnessError::Precondition(format!("C0 = {c0} must be at least {EXCLUDED_RADIUS}")));
    }
    if !(r_max > c0) {
        return Err(HarnessError::Precondition(format!("rMax = {r_max} must exceed C0 = {c0}")));
    }
    Ok(())
}

/// Counting function from an already computed spectrum whose region covers `Re λ ∈ [C0, r_max]`.
pub fn weyl_count_from(p: &DiskProblem, s: &Spectrum, c0: f64, r_max: f64) -> Result<CountingResult, HarnessError> {
    check_counting_window(c0, r_max)?;
    if s.region.re_min > c0 || s.region.re_max < r_max {
        return Err(HarnessError::Precondition(format!(
            "spectrum region {:?} does not cover Re λ in [{c0}, {r_max}]",
            s.region
        )));
    }
    let mut hits: Vec<(f64, u64)> = s
        .records
        .iter()
        .map(|r| (r.lambda.norm(), record_weight(r)))
        .filter(|(a, _)| *a >= c0 && *a <= r_max)
        .collect();
    hits.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut staircase: Vec<(f64, f64)> = Vec::new();
    let mut total = 0u64;
    for (r, w) in hits {
        total += w;
        match staircase.last_mut() {
            Some(last) if last.0 == r => last.1 = total as f64,
            _ => staircase.push((r, total as f64)),
        }
    }
    let tau = weyl_constant(p);
    let n = total as f64;
    let rel_err_at_rmax = (n / (r_max * r_max) - tau).abs() / tau;
    Ok(CountingResult {
        remainder_slope: remainder_slope(&staircase, tau, r_max),
        staircase,
        tau,
        c0,
        r_max,
        n_at_rmax: n,
        rel_err_at_rmax,
        partial: !s.is_complete(),
    })
}

/// Least-squares slope of `log|N(r) − τr²|` against `log r` at the jumps in `[r_max/4, r_max]`.
fn remainder_slope(staircase: &[(f64, f64)], tau: f64, r_max: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = staircase
        .iter()
        .filter(|(r, _)| *r >= r_max / 4.0)
        .filter_map(|(r, n)| {
            let d = (n - tau * r * r).abs();
            (d > 0.0).then(|| (r.ln(), d.ln()))
        })
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let k = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StripReport {
    /// Strip constant `C`.
    pub c: f64,
    pub cal_window: (f64, f64),
    pub re_window: (f64, f64),
    pub n_calibration: usize,
    pub n_checked: usize,
    /// Records in the check window with `|Im λ| > C`.
    pub offenders: Vec<EigenvalueRecord>,
    /// Whether `C` lies below the searched `|Im λ|` bound, so the check is not vacuous.
    pub window_covers_c: bool,
    pub partial: bool,
}

impl StripReport {
    pub fn passed(&self) -> bool {
        self.offenders.is_empty()
    }
}

fn require_nondegenerate(p: &DiskProblem) -> Result<(), HarnessError> {
    match p.contact_order {
        Some(0) => Ok(()),
        other => Err(HarnessError::Precondition(format!(
            "the strip check needs n1 != n2 on the boundary (contact order 0), got {other:?}"
        ))),
    }
}

fn window_ok(w: (f64, f64)) -> Result<(), HarnessError> {
    if !(w.0 >= EXCLUDED_RADIUS && w.1 > w.0) {
        return Err(HarnessError::Precondition(format!("bad window [{}, {}]", w.0, w.1)));
    }
    Ok(())
}

/// Calibrates `C = 1.5·max |Im λ|` on `cal_window` and checks that no eigenvalue in
/// `re_window` has `|Im λ| > C`.
pub fn strip_check(
    p: &DiskProblem,
    re_window: (f64, f64),
    cal_window: (f64, f64),
    opts: &ExperimentOptions,
) -> Result<StripReport, HarnessError> {
    require_nondegenerate(p)?;
    window_ok(re_window)?;
    window_ok(cal_window)?;
    let s = spectrum(p, re_window.0.min(cal_window.0), re_window.1.max(cal_window.1), opts)?;
    strip_check_from(p, &s, re_window, cal_window)
}

pub fn strip_check_from(
    p: &DiskProblem,
    s: &Spectrum,
    re_window: (f64, f64),
    cal_window: (f64, f64),
) -> Result<StripReport, HarnessError> {
    require_nondegenerate(p)?;
    window_ok(re_window)?;
    window_ok(cal_window)?;
    let in_window = |r: &&EigenvalueRecord, w: (f64, f64)| r.lambda.re >= w.0 && r.lambda.re <= w.1;
    let cal: Vec<&EigenvalueRecord> = s.records.iter().filter(|r| in_window(r, cal_window)).collect();
    if cal.is_empty() {
        return Err(HarnessError::Calibration(format!(
            "no eigenvalues with Re λ in [{}, {}]",
            cal_window.0, cal_window.1
        )));
    }
    let c = STRIP_FACTOR * cal.iter().map(|r| r.lambda.im.abs()).fold(0.0, f64::max);
    let checked: Vec<&EigenvalueRecord> = s.records.iter().filter(|r| in_window(r, re_window)).collect();
    let offenders = checked.iter().filter(|r| r.lambda.im.abs() > c).map(|r| **r).collect();
    Ok(StripReport {
        c,
        cal_window,
        re_window,
        n_calibration: cal.len(),
        n_checked: checked.len(),
        offenders,
        window_covers_c: c < s.region.im_max.min(-s.region.im_min),
        partial: !s.is_complete(),
    })
}

/// Largest `|Im λ|` among the records with `Re λ ∈ [re_min, re_max)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GrowthWitness {
    pub re_min: f64,
    pub re_max: f64,
    pub max_abs_im: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RegionScanResult {
    pub records: Vec<EigenvalueRecord>,
    pub contact_order: u32,
    pub kappa: f64,
    pub exponent: f64,
    pub calibrated_c: f64,
    pub violations: Vec<EigenvalueRecord>,
    pub growth_witness: Vec<GrowthWitness>,
    pub partial: bool,
}

/// `κ_j = 2/(3j+2)`.
pub fn kappa(j: u32) -> f64 {
    2.0 / (3.0 * f64::from(j) + 2.0)
}

/// Scans `[0.5, re_max] × [−im_max, im_max]` for eigenvalues above the curve
/// `|Im λ| = C·(Re λ + 1)^{1−κ_j}`, with `C` calibrated on `Re λ ≤ re_max/3`.
pub fn scan_free_region(
    f: &ContactFamily,
    re_max: f64,
    im_max: f64,
    opts: &ExperimentOptions,
) -> Result<RegionScanResult, HarnessError> {
    let p = DiskProblem::from_family(f)?;
    require_degenerate(&p)?;
    let s = spectrum(&p, EXCLUDED_RADIUS, re_max, &ExperimentOptions { im_max, ..*opts })?;
    scan_from(&p, &s, re_max)
}

fn require_degenerate(p: &DiskProblem) -> Result<u32, HarnessError> {
    match p.contact_order {
        Some(j) if j >= 1 => Ok(j),
        other => Err(HarnessError::Precondition(format!(
            "the region scan needs boundary contact of order j >= 1, got {other:?}"
        ))),
    }
}

pub fn scan_from(p: &DiskProblem, s: &Spectrum, re_max: f64) -> Result<RegionScanResult, HarnessError> {
    let j = require_degenerate(p)?;
    let kappa = kappa(j);
    let exponent = 1.0 - kappa;
    let curve = |re: f64| (re + 1.0).powf(exponent);
    let cal = s.records.iter().filter(|r| r.lambda.re <= re_max / 3.0);
    let ratio = cal.map(|r| r.lambda.im.abs() / curve(r.lambda.re)).fold(None, |a: Option<f64>, x| Some(a.map_or(x, |a| a.max(x))));
    let Some(ratio) = ratio else {
        return Err(HarnessError::Calibration(format!("no eigenvalues with Re λ <= {}", re_max / 3.0)));
    };
    let calibrated_c = PARABOLIC_FACTOR * ratio;
    let violations = s.records.iter().filter(|r| r.lambda.im.abs() >= calibrated_c * curve(r.lambda.re)).copied().collect();
    Ok(RegionScanResult {
        records: s.records.clone(),
        contact_order: j,
        kappa,
        exponent,
        calibrated_c,
        violations,
        growth_witness: growth_witness(&s.records, re_max),
        partial: !s.is_complete(),
    })
}

/// Largest `|Im λ|` per bin `[10k, 10(k+1))` up to `re_max`.
pub fn growth_witness(records: &[EigenvalueRecord], re_max: f64) -> Vec<GrowthWitness> {
    let bins = (re_max / WITNESS_BIN).ceil() as usize;
    (0..bins)
        .map(|k| {
            let lo = k as f64 * WITNESS_BIN;
            let hi = lo + WITNESS_BIN;
            let inside: Vec<f64> =
                records.iter().filter(|r| r.lambda.re >= lo && r.lambda.re < hi).map(|r| r.lambda.im.abs()).collect();
            GrowthWitness { re_min: lo, re_max: hi, max_abs_im: inside.iter().copied().fold(0.0, f64::max), count: inside.len() }
        })
        .collect()
}

/// Largest `|Im λ|` with `Re λ ∈ [lo, hi]`.
pub fn max_abs_im(records: &[EigenvalueRecord], lo: f64, hi: f64) -> Option<f64> {
    records
        .iter()
        .filter(|r| r.lambda.re >= lo && r.lambda.re <= hi)
        .map(|r| r.lambda.im.abs())
        .fold(None, |a: Option<f64>, x| Some(a.map_or(x, |a| a.max(x))))
}

/// Strip constant `1.5·max |Im λ|` over `Re λ ∈ cal_window`, for any problem.
pub fn strip_constant(records: &[EigenvalueRecord], cal_window: (f64, f64)) -> Option<f64> {
    max_abs_im(records, cal_window.0, cal_window.1).map(|m| STRIP_FACTOR * m)
}

/// `m,re_lambda,im_lambda,multiplicity,residual` rows.
pub fn records_csv(records: &[EigenvalueRecord]) -> String {
    let mut out = String::from("m,re_lambda,im_lambda,multiplicity,residual\n");
    for r in records {
        let _ = writeln!(out, "{},{:e},{:e},{},{:e}", r.m, r.lambda.re, r.lambda.im, r.multiplicity, r.residual);
    }
    out
}

/// Experiment summary; fields that do not apply to a run are `null`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Summary {
    pub kappa: Option<f64>,
    pub exponent: Option<f64>,
    #[serde(rename = "calibratedC")]
    pub calibrated_c: Option<f64>,
    pub n_eigenvalues: usize,
    pub n_violations: usize,
    pub growth_witness: Vec<GrowthWitness>,
    pub tau: f64,
    pub rel_err_at_rmax: Option<f64>,
}

impl Summary {
    pub fn from_scan(p: &DiskProblem, scan: &RegionScanResult, counting: Option<&CountingResult>) -> Self {
        Self {
            kappa: Some(scan.kappa),
            exponent: Some(scan.exponent),
            calibrated_c: Some(scan.calibrated_c),
            n_eigenvalues: scan.records.len(),
            n_violations: scan.violations.len(),
            growth_witness: scan.growth_witness.clone(),
            tau: weyl_constant(p),
            rel_err_at_rmax: counting.map(|c| c.rel_err_at_rmax),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radialode::RadialProfile;
    use num_complex::Complex64;

    fn pair(a: f64, b: f64, r: f64) -> DiskProblem {
        DiskProblem::new(RadialProfile::constant(r, a).unwrap(), RadialProfile::constant(r, b).unwrap()).unwrap()
    }

    fn rec(re: f64, im: f64, m: u32) -> EigenvalueRecord {
        let b = SearchBox::new(0.5, 100.0, -12.0, 12.0).unwrap();
        EigenvalueRecord { lambda: Complex64::new(re, im), m, multiplicity: 1, residual: 0.0, search_box: b }
    }

    fn fake_spectrum(records: Vec<EigenvalueRecord>, re_max: f64) -> Spectrum {
        Spectrum {
            region: SearchBox::new(0.5, re_max, -12.0, 12.0).unwrap(),
            m_max: 10,
            records,
            mode_counts: vec![],
            unresolved: vec![],
            count_repairs: 0,
            evaluations: 0,
        }
    }

    #[test]
    fn weyl_constant_examples() {
        assert!((weyl_constant(&pair(2.0, 1.0, 1.0)) - 0.75).abs() < 1e-15);
        assert!((weyl_constant(&pair(1.0, 1.0, 3.0)) - 4.5).abs() < 1e-14);
        let p = pair(2.0, 1.0, 1.3);
        let q = pair(1.0, 2.0, 1.3);
        assert_eq!(weyl_constant(&p), weyl_constant(&q));
    }

    #[test]
    fn weyl_constant_against_quadrature() {
        let fam = ContactFamily::new(RadialProfile::constant(1.0, 1.0).unwrap(), 0.5, 1).unwrap();
        let p = DiskProblem::from_family(&fam).unwrap();
        // midpoint rule on ∫₀¹ (n₁ + n₂) r dr, exact for this quadratic up to O(h²)
        let k = 200_000;
        let h = 1.0 / k as f64;
        let mut q = 0.0;
        for i in 0..k {
            let r = (i as f64 + 0.5) * h;
            q += (p.n1.eval(r) + p.n2.eval(r)) * r * h;
        }
        let tau_q = 2.0 * std::f64::consts::PI * q / (4.0 * std::f64::consts::PI);
        assert!((weyl_constant(&p) - tau_q).abs() <= 1e-11, "{} vs {tau_q}", weyl_constant(&p));
    }

    #[test]
    fn staircase_weights_and_monotonicity() {
        let p = pair(2.0, 1.0, 1.0);
        let s = fake_spectrum(vec![rec(3.0, 0.0, 0), rec(4.0, 0.5, 2), rec(4.0, -0.5, 2), rec(9.0, 0.1, 1)], 10.0);
        let c = weyl_count_from(&p, &s, 0.5, 5.0).unwrap();
        assert_eq!(c.n_at_rmax, 5.0);
        assert!(c.staircase.windows(2).all(|w| w[0].1 <= w[1].1 && w[0].0 < w[1].0));
        assert_eq!(c.n_at(3.5), 1.0);
        assert_eq!(c.n_at(2.0), 0.0);
        let empty = weyl_count_from(&p, &s, 0.5, 2.0).unwrap();
        assert!(empty.staircase.is_empty() && empty.n_at_rmax == 0.0);
    }

    #[test]
    fn kappa_exponents() {
        assert!((1.0 - kappa(1) - 0.6).abs() < 1e-15);
        assert!((1.0 - kappa(2) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn guards() {
        let nondeg = pair(2.0, 1.0, 1.0);
        let fam = ContactFamily::new(RadialProfile::constant(1.0, 1.0).unwrap(), 1.0, 1).unwrap();
        let deg = DiskProblem::from_family(&fam).unwrap();
        let s = fake_spectrum(vec![rec(3.0, 0.2, 0)], 10.0);
        assert!(matches!(strip_check_from(&deg, &s, (5.0, 10.0), (1.0, 5.0)), Err(HarnessError::Precondition(_))));
        assert!(matches!(scan_from(&nondeg, &s, 10.0), Err(HarnessError::Precondition(_))));
        assert!(matches!(strip_check_from(&nondeg, &s, (5.0, 10.0), (6.0, 9.0)), Err(HarnessError::Calibration(_))));
        assert!(matches!(weyl_count_from(&nondeg, &s, 0.1, 5.0), Err(HarnessError::Precondition(_))));
    }

    #[test]
    fn strip_and_scan_bookkeeping() {
        let nondeg = pair(2.0, 1.0, 1.0);
        let s = fake_spectrum(vec![rec(6.0, 1.0, 0), rec(25.0, 1.4, 3), rec(30.0, 2.0, 1)], 40.0);
        let rep = strip_check_from(&nondeg, &s, (20.0, 40.0), (5.0, 20.0)).unwrap();
        assert_eq!(rep.c, 1.5);
        assert_eq!(rep.offenders.len(), 1);

        let fam = ContactFamily::new(RadialProfile::constant(1.0, 1.0).unwrap(), 1.0, 1).unwrap();
        let deg = DiskProblem::from_family(&fam).unwrap();
        let s = fake_spectrum(vec![rec(3.0, 1.0, 0), rec(20.0, 10.0, 1), rec(25.0, 1.0, 1)], 30.0);
        let scan = scan_from(&deg, &s, 30.0).unwrap();
        assert!((scan.calibrated_c - 2.0 / 4f64.powf(0.6)).abs() < 1e-14);
        assert_eq!(scan.violations.len(), 1);
        assert_eq!(scan.growth_witness.len(), 3);
        assert_eq!(scan.growth_witness[2].max_abs_im, 10.0);
    }

    #[test]
    fn csv_format() {
        let csv = records_csv(&[rec(3.5, -0.25, 2)]);
        assert_eq!(csv, "m,re_lambda,im_lambda,multiplicity,residual\n2,3.5e0,-2.5e-1,1,0e0\n");
    }
}
