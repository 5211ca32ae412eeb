use num_complex::Complex64;

use transeig_core::radialode::{ContactFamily, RadialProfile};
use transeig_core::rootfinder::{
    box_winding, find_eigenvalues, m_max_auto, winding_count, wronskian, wronskian_winding_options, DiskProblem, Sample,
    SampleCache, SearchBox,
};
use transeig_core::specialfn::bessel_j_pair;

fn pair(a: f64, b: f64) -> DiskProblem {
    DiskProblem::new(RadialProfile::constant(1.0, a).unwrap(), RadialProfile::constant(1.0, b).unwrap()).unwrap()
}

#[test]
fn modes_past_the_truncation_bound_are_empty() {
    let p = pair(2.0, 1.0);
    let region = SearchBox::new(0.5, 20.0, -3.0, 3.0).unwrap();
    let bound = m_max_auto(&p, &region);
    for m in [bound + 1, bound + 7, bound + 30] {
        assert_eq!(winding_count(&p, m, &region).unwrap(), 0, "m={m}");
    }
}

#[test]
fn box_around_a_sign_change_holds_the_root() {
    // real-axis sign change of W_0 for the constant (4, 1) pair
    let p = pair(4.0, 1.0);
    let w = |x: f64| {
        let v = wronskian(&p, 0, Complex64::new(x, 0.0)).unwrap();
        v.value.re
    };
    let (mut lo, mut hi) = (0.5, 0.5);
    while w(lo).signum() == w(hi + 0.01).signum() {
        lo = hi;
        hi += 0.01;
    }
    hi += 0.01;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if w(mid).signum() == w(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let b = SearchBox::new(root - 0.05, root + 0.05, -0.05, 0.05).unwrap();
    assert!(winding_count(&p, 0, &b).unwrap() >= 1);
    let s = find_eigenvalues(&p, &b, 0).unwrap();
    assert!(s.records.iter().any(|r| (r.lambda.re - root).abs() < 1e-8 && r.lambda.im.abs() < 1e-8), "{:?}", s.records);
}

#[test]
fn contact_family_spectrum_is_conjugate_closed() {
    let f = ContactFamily::new(RadialProfile::constant(1.0, 1.0).unwrap(), 1.0, 1).unwrap();
    let p = DiskProblem::from_family(&f).unwrap();
    assert_eq!(p.contact_order, Some(1));
    let region = SearchBox::new(0.5, 10.0, -4.0, 4.0).unwrap();
    let s = find_eigenvalues(&p, &region, m_max_auto(&p, &region)).unwrap();
    assert!(s.is_complete());
    assert_eq!(s.total_count(), s.total_multiplicity());
    for r in &s.records {
        let partner = s.records.iter().filter(|o| o.m == r.m).map(|o| (o.lambda - r.lambda.conj()).norm()).fold(f64::INFINITY, f64::min);
        assert!(partner <= 1e-8, "{r:?}");
    }
    let sorted = s.records.windows(2).all(|w| (w[0].m, w[0].lambda.re, w[0].lambda.im) <= (w[1].m, w[1].lambda.re, w[1].lambda.im));
    assert!(sorted);
}

/// `W_m` of the constant (2, 1) disk in closed form, up to a nonzero factor:
/// `J_m(kλ)·λJ_m'(λ) − J_m(λ)·kλJ_m'(kλ)` with `k = √2`.
fn closed_form_21(m: u32, l: Complex64) -> Sample {
    let k = 2f64.sqrt();
    let mf = f64::from(m);
    let jet = |x: Complex64| {
        let p = bessel_j_pair(m, x).unwrap();
        let second = -p.derivative / x - (1.0 - mf * mf / (x * x)) * p.value;
        (p.value, p.derivative, second)
    };
    let (a, da, dda) = jet(k * l);
    let (b, db, ddb) = jet(l);
    let x = a * l * db;
    let y = b * k * l * da;
    let dx = k * da * l * db + a * db + a * l * ddb;
    let dy = db * k * l * da + b * k * da + b * k * l * k * dda;
    Sample { value: x - y, dvalue: dx - dy, scale: x.norm() + y.norm() }
}

#[test]
fn ode_counts_match_bessel_closed_form() {
    let p = pair(2.0, 1.0);
    let b = SearchBox::new(0.5, 20.0, -3.0, 3.0).unwrap();
    let opts = wronskian_winding_options(&p);
    for m in [0u32, 3, 8, 15] {
        let mut cache = SampleCache::new(|l| Ok(closed_form_21(m, l)), true);
        let oracle = box_winding(&mut cache, &b, &opts).unwrap();
        assert_eq!(winding_count(&p, m, &b).unwrap(), oracle, "m={m}");
        let s = find_eigenvalues(&p, &b, m).unwrap();
        let found: i64 = s.records.iter().filter(|r| r.m == m).map(|r| i64::from(r.multiplicity)).sum();
        assert_eq!(found, oracle, "m={m}");
    }
}
