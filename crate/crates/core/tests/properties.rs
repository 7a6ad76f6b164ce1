mod common;

use polar64::analysis::{error_study, sample, SampleDomain};
use polar64::{compress, decompress, BitLayout, PrecisionPolicy};

fn ok(check: common::Check) {
    match check {
        Ok(summary) => println!("{summary}"),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn quantisation_bounds_for_a_million_angle_pairs() {
    ok(common::quantisation_bounds(1_000_000, 1));
}

#[test]
fn round_trip_error_within_first_order_envelope() {
    ok(common::error_envelope(100_000, 2));
}

#[test]
fn quantisation_nodes_round_trip() {
    ok(common::node_round_trip(200_000, 3));
}

#[test]
fn poles_ignore_theta() {
    ok(common::pole_degeneracy(100_000, 4));
}

#[test]
fn stream_rewrite_is_byte_identical() {
    ok(common::stream_byte_identity(500, 5));
}

#[test]
fn relative_error_bounded_on_the_cube() {
    let layout = BitLayout::recommended();
    let policy = PrecisionPolicy::default();
    for v in sample(&SampleDomain::cube(200_000, 6)) {
        let back = decompress(compress(v, &layout, &policy).unwrap(), &layout);
        let rel = v.distance(&back) / v.norm() as f64;
        assert!(rel <= 3e-4, "{v:?} -> {back:?}: {rel:e}");
    }
}

#[test]
fn normalised_error_independent_of_radius() {
    let layout = BitLayout::recommended();
    let policy = PrecisionPolicy::default();
    let means: Vec<f64> = [1e-8, 1e-4, 1.0, 1e4, 1e8]
        .iter()
        .map(|&r| {
            error_study(
                &SampleDomain::shell(r, r, 200_000, 7),
                &layout,
                &policy,
                true,
            )
            .unwrap()
            .mean
        })
        .collect();
    let lo = means.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = means.iter().cloned().fold(0.0, f64::max);
    assert!(hi / lo - 1.0 < 0.05, "{means:?}");
}

#[test]
fn studies_are_reproducible() {
    let layout = BitLayout::recommended();
    let policy = PrecisionPolicy::all_single();
    let d = SampleDomain::cube(150_000, 8);
    assert_eq!(
        error_study(&d, &layout, &policy, true).unwrap(),
        error_study(&d, &layout, &policy, true).unwrap()
    );
}
