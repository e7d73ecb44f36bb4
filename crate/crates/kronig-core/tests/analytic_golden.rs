//! Frozen reference values for the analytic dispersion route.
//!
//! The rectangular-barrier reference table is V0 = 0.5, a = 10, b = 2
//! (c = 12); the comb reference is alpha = 1, c = 12. Edges quoted to six
//! decimals.

use kronig_core::analytic::{band_edges, dispersion, kp_dispersion, solve_band_energy};
use kronig_core::potentials::{DiracCombParams, KronigPenneyParams, Potential};

const KP_EDGES: [(f64, f64); 7] = [
    (0.030796, 0.037141),
    (0.121302, 0.148295),
    (0.266337, 0.332651),
    (0.459674, 0.588875),
    (0.698950, 0.915166),
    (0.989655, 1.309390),
    (1.342598, 1.767130),
];

const COMB_EDGES: [(f64, f64); 6] = [
    (0.025296, 0.034269),
    (0.102488, 0.137078),
    (0.234797, 0.308425),
    (0.425939, 0.548311),
    (0.679069, 0.856736),
    (0.996470, 1.233701),
];

fn kp_table() -> Potential {
    Potential::KronigPenney(KronigPenneyParams::new(0.5, 10.0, 2.0).unwrap())
}

fn comb_table() -> Potential {
    Potential::DiracComb(DiracCombParams::new(1.0, 12.0).unwrap())
}

#[test]
fn kp_dispersion_hits_band1_reference_edges() {
    // F = +1 at the band-1 bottom and -1 at its top, to the tolerance the
    // six-decimal edge values allow.
    let p = KronigPenneyParams::new(0.5, 10.0, 2.0).unwrap();
    let f_lo = kp_dispersion(0.030796, &p).unwrap();
    let f_hi = kp_dispersion(0.037141, &p).unwrap();
    assert!((f_lo - 1.0).abs() < 1e-3, "F(e_min,1) = {f_lo}");
    assert!((f_hi + 1.0).abs() < 1e-3, "F(e_max,1) = {f_hi}");
}

#[test]
fn comb_dispersion_hits_band1_reference_top() {
    let p = DiracCombParams::new(1.0, 12.0).unwrap();
    let f = kronig_core::analytic::comb_dispersion(0.034269, &p).unwrap();
    assert!((f + 1.0).abs() < 1e-3, "F = {f}");
}

#[test]
fn kp_band_edges_match_reference_to_1e5() {
    let edges = band_edges(&kp_table(), 7).unwrap();
    for (i, &(lo, hi)) in KP_EDGES.iter().enumerate() {
        let e = edges.get(i + 1).unwrap();
        assert!(
            (e.e_min - lo).abs() < 1e-5 && (e.e_max - hi).abs() < 1e-5,
            "band {}: [{}, {}] vs [{lo}, {hi}]",
            i + 1,
            e.e_min,
            e.e_max
        );
    }
}

#[test]
fn comb_band_edges_match_reference_to_1e5() {
    let edges = band_edges(&comb_table(), 6).unwrap();
    for (i, &(lo, hi)) in COMB_EDGES.iter().enumerate() {
        let e = edges.get(i + 1).unwrap();
        assert!(
            (e.e_min - lo).abs() < 1e-5 && (e.e_max - hi).abs() < 1e-5,
            "band {}: [{}, {}] vs [{lo}, {hi}]",
            i + 1,
            e.e_min,
            e.e_max
        );
    }
}

#[test]
fn swapped_well_and_barrier_widths_do_not_match_the_reference() {
    // The width assignment is well a = 10, barrier b = 2: the swapped
    // reading puts band 1 near pi^2/8 instead of 0.0308.
    let swapped = Potential::KronigPenney(KronigPenneyParams::new(0.5, 2.0, 10.0).unwrap());
    let edges = band_edges(&swapped, 1).unwrap();
    let b1 = edges.get(1).unwrap();
    assert!(
        (b1.e_min - KP_EDGES[0].0).abs() > 1e-2,
        "swapped widths unexpectedly reproduce the reference: {}",
        b1.e_min
    );
}

#[test]
fn solve_band_energy_stays_within_dispersion_bound() {
    for pot in [kp_table(), comb_table()] {
        let n_bands = 6;
        let edges = band_edges(&pot, n_bands).unwrap();
        for band in 1..=n_bands {
            for i in 0..=20 {
                let frac = i as f64 / 20.0;
                let e = solve_band_energy(&pot, &edges, band, frac).unwrap();
                let f = dispersion(&pot, e).unwrap();
                assert!(f.abs() <= 1.0, "band {band} frac {frac}: |F| = {}", f.abs());
                let edge = edges.get(band).unwrap();
                assert!(e >= edge.e_min && e <= edge.e_max);
            }
        }
    }
}

#[test]
fn band6_spread_over_ground_state_matches_reference_ratio() {
    let edges = band_edges(&kp_table(), 6).unwrap();
    let e1 = edges.get(1).unwrap().e_min;
    let b6 = edges.get(6).unwrap();
    let ratio = (b6.e_max - b6.e_min) / e1;
    assert!((ratio - 10.38).abs() <= 0.05, "spread ratio {ratio}");
}
