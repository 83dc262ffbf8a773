use nalgebra::DMatrix;
use proptest::prelude::*;
use relinv::cocycle::Cochain;
use relinv::frame::{extended_action, extended_frame, solve_frame, ExtendedPoint, CROSS_SECTION};
use relinv::image::{integral_invariant, warp_image, ImageGrid, IntegralSpec};
use relinv::invariants::fundamental_invariants;
use relinv::projective::{apply_config, delta_transform_check, general_position};
use relinv::sampling::{well_conditioned, InstanceSampler};
use relinv::{apply_homography, total_jacobian, Homography, Point2, PointConfig};

fn config_strategy(n: usize) -> impl Strategy<Value = PointConfig> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
        .prop_map(|c| PointConfig::from_coords(&c).unwrap())
        .prop_filter("well conditioned", well_conditioned)
}

fn homography_strategy() -> impl Strategy<Value = Homography> {
    prop::array::uniform9(-0.3..0.3f64).prop_filter_map("invertible", |e| {
        let m = [[1.0 + e[0], e[1], e[2]], [e[3], 1.0 + e[4], e[5]], [e[6], e[7], 1.0 + e[8]]];
        Homography::from_rows(m).ok().filter(|g| g.det().abs() > 0.1)
    })
}

/// `g` keeps every point of `cfg` well away from the horizon.
fn admissible(g: &Homography, cfg: &PointConfig) -> bool {
    let m = g.representative().matrix;
    cfg.points().iter().all(|p| (m[(2, 0)] * p.x + m[(2, 1)] * p.y + m[(2, 2)]).abs() > 0.2)
        && apply_config(g, cfg).map(|c| well_conditioned(&c)).unwrap_or(false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn delta_law_holds(cfg in config_strategy(4), g in homography_strategy()) {
        prop_assume!(admissible(&g, &cfg));
        for (i, j, k) in [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)] {
            prop_assert!(delta_transform_check(&g, &cfg, i, j, k).unwrap() < 1e-9);
        }
    }

    #[test]
    fn absolute_invariants_are_invariant(cfg in config_strategy(6), g in homography_strategy()) {
        prop_assume!(admissible(&g, &cfg));
        let (a1, a2) = fundamental_invariants(&cfg).unwrap();
        let (b1, b2) = fundamental_invariants(&apply_config(&g, &cfg).unwrap()).unwrap();
        for (a, b) in a1.iter().chain(&a2).zip(b1.iter().chain(&b2)) {
            prop_assert!((a - b).abs() <= 1e-8 * a.abs());
        }
    }

    #[test]
    fn frame_hits_the_cross_section(cfg in config_strategy(5)) {
        let rho = solve_frame(&cfg).unwrap().rho;
        let moved = apply_config(&rho, &cfg).unwrap();
        for (p, t) in moved.points().iter().zip(CROSS_SECTION.targets.iter()) {
            prop_assert!((p.x - t.x).abs() < 1e-9 && (p.y - t.y).abs() < 1e-9);
        }
    }

    #[test]
    fn jacobian_is_scale_free(cfg in config_strategy(4), g in homography_strategy(), lambda in 0.1..10.0f64) {
        prop_assume!(admissible(&g, &cfg));
        let a = total_jacobian(&g, &cfg).unwrap().value();
        let b = total_jacobian(&g.scaled(-lambda).unwrap(), &cfg).unwrap().value();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs());
    }
}

/// Determinant of the `2n×2n` derivative of `x ↦ g·x` by central differences.
fn finite_difference_jacobian(g: &Homography, cfg: &PointConfig, h: f64) -> f64 {
    let n = cfg.len();
    let mut jac = DMatrix::zeros(2 * n, 2 * n);
    for col in 0..2 * n {
        let shifted = |step: f64| {
            let mut pts: Vec<Point2> = cfg.points().to_vec();
            if col % 2 == 0 { pts[col / 2].x += step } else { pts[col / 2].y += step }
            pts.iter().map(|p| apply_homography(g, *p).unwrap()).collect::<Vec<_>>()
        };
        let (plus, minus) = (shifted(h), shifted(-h));
        for k in 0..n {
            jac[(2 * k, col)] = (plus[k].x - minus[k].x) / (2.0 * h);
            jac[(2 * k + 1, col)] = (plus[k].y - minus[k].y) / (2.0 * h);
        }
    }
    jac.determinant()
}

#[test]
fn total_jacobian_matches_finite_differences() {
    let mut s = InstanceSampler::new(11);
    for n in 1..=6 {
        for _ in 0..20 {
            let (g, cfg) = s.pair(n);
            let exact = total_jacobian(&g, &cfg).unwrap().value();
            let numeric = finite_difference_jacobian(&g, &cfg, 1e-5);
            assert!((exact - numeric).abs() < 1e-5 * exact.abs(), "n={n}: {exact} vs {numeric}");
        }
    }
}

#[test]
fn affine_maps_scale_delta_by_linear_determinant() {
    let cfg = PointConfig::from_coords(&[(0.1, 0.2), (0.9, -0.3), (-0.5, 0.8)]).unwrap();
    let g = Homography::from_rows([[1.5, 0.3, 0.2], [-0.4, 0.7, -1.0], [0.0, 0.0, 1.0]]).unwrap();
    assert!(delta_transform_check(&g, &cfg, 1, 2, 3).unwrap() < 1e-12);
}

#[test]
fn swapping_extra_points_swaps_invariants() {
    let mut s = InstanceSampler::new(13);
    let cfg = s.config(6);
    let (a1, a2) = fundamental_invariants(&cfg).unwrap();
    let (b1, b2) = fundamental_invariants(&cfg.swapped(5, 6)).unwrap();
    assert_eq!((a1[0], a2[0]), (b1[1], b2[1]));
    assert_eq!((a1[1], a2[1]), (b1[0], b2[0]));
}

#[test]
fn extended_action_is_an_action_only_for_multipliers() {
    let mut s = InstanceSampler::new(17);
    let good = Cochain::total_jacobian();
    let bad = relinv::checks::faulty_multiplier();
    let mut bad_gap: f64 = 0.0;
    for _ in 0..20 {
        let (h, cfg) = s.pair(5);
        let g = s.homography_for(&apply_config(&h, &cfg).unwrap());
        let xp = ExtendedPoint::new(cfg, -1.5).unwrap();
        for (mu, is_good) in [(&good, true), (&bad, false)] {
            let stepwise = extended_action(&g, &extended_action(&h, &xp, mu).unwrap(), mu).unwrap();
            let direct = extended_action(&g.compose(&h), &xp, mu).unwrap();
            let gap = (stepwise.fiber() - direct.fiber()).abs() / direct.fiber().abs();
            if is_good {
                assert!(gap < 1e-9);
            } else {
                bad_gap = bad_gap.max(gap);
            }
        }
    }
    assert!(bad_gap > 1e-3);
}

#[test]
fn extended_frame_on_lifted_cross_section() {
    let xp = ExtendedPoint::new(CROSS_SECTION.config(), 1.0).unwrap();
    let f = extended_frame(&xp, &Cochain::total_jacobian()).unwrap();
    assert!(f.frame.rho.approx_eq(&Homography::identity(), 1e-15));
    assert_eq!(f.gauge_value, 1.0);
}

#[test]
fn orientation_preserving_maps_keep_the_fiber_sign() {
    let mut s = InstanceSampler::new(19);
    for _ in 0..50 {
        let (g, cfg) = s.pair(4);
        let m = g.representative().matrix;
        let s_positive = cfg.points().iter().all(|p| m[(2, 0)] * p.x + m[(2, 1)] * p.y + m[(2, 2)] > 0.0);
        if m.determinant() > 0.0 && s_positive {
            let xp = ExtendedPoint::new(cfg, 0.7).unwrap();
            assert!(extended_action(&g, &xp, &Cochain::total_jacobian()).unwrap().fiber() > 0.0);
        }
    }
}

fn blob() -> ImageGrid {
    ImageGrid::gaussian_blob(24, 24, 0.12, 0.15).unwrap()
}

#[test]
fn integral_is_homogeneous_in_the_image() {
    let img = blob();
    let spec = IntegralSpec::plain(4, 50_000, 5);
    let base = integral_invariant(&img, &spec).unwrap();
    let doubled = integral_invariant(&img.scaled(2.0).unwrap(), &spec).unwrap();
    assert_eq!(doubled.value, 16.0 * base.value);
    assert_eq!(doubled.stderr, 16.0 * base.stderr);
    let zero = integral_invariant(&img.scaled(0.0).unwrap(), &spec).unwrap();
    assert_eq!((zero.value, zero.stderr), (0.0, 0.0));
}

#[test]
fn integral_is_deterministic() {
    let img = blob();
    let spec = IntegralSpec::plain(5, 30_000, 9);
    let a = integral_invariant(&img, &spec).unwrap();
    let b = integral_invariant(&img, &spec).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a, b);
    let other = integral_invariant(&img, &IntegralSpec { seed: 10, ..spec }).unwrap();
    assert_ne!(a.value, other.value);
}

#[test]
fn warp_round_trip() {
    let img = ImageGrid::gaussian_blob(64, 64, 0.15, 0.1).unwrap();
    let g = Homography::from_rows([[1.05, 0.04, -0.03], [-0.03, 0.97, 0.02], [0.05, -0.04, 1.0]]).unwrap();
    let there = warp_image(&img, &g, (64, 64)).unwrap();
    let back = warp_image(&there, &g.inverse(), (64, 64)).unwrap();
    let mae: f64 =
        img.data().iter().zip(back.data()).map(|(a, b)| (a - b).abs()).sum::<f64>() / img.data().len() as f64;
    assert!(mae < 0.02, "mean abs error {mae}");
}

#[test]
fn general_position_of_seeded_configs() {
    let mut s = InstanceSampler::new(23);
    for n in 3..=7 {
        assert!(general_position(&s.config(n)));
    }
}
