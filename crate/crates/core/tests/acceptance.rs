//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_rational::Rational64;
use relinv::cocycle::{d0, d1, gauge_from_multiplier, Cochain, ProjectiveFrame};
use relinv::exact::{q, ExactConfig};
use relinv::expr::Expr;
use relinv::frame::{frame_equivariance_check, invariantize_config};
use relinv::image::{integral_invariant, integral_invariant_with_workers, invariance_experiment, ImageGrid, IntegralSpec};
use relinv::invariants::{
    fundamental_invariants, generator_jacobian, invariantized_jacobian_closed, invariantized_jacobian_direct,
    relative_invariant,
};
use relinv::projective::{
    apply_config, base_deltas, cubed_delta_check, delta_points, delta_transform_check, mixed_transform_check,
};
use relinv::sampling::InstanceSampler;
use relinv::{Homography, PointConfig, CROSS_SECTION, DEFAULT_SEED};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn admissible_pair(s: &mut InstanceSampler, n: usize) -> (Homography, PointConfig) {
    s.pair(n)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let d = d1(&Cochain::total_jacobian()).unwrap();
    let mut s = InstanceSampler::new(DEFAULT_SEED);
    let mut worst: f64 = 0.0;
    for t in 0..1000 {
        let (g2, x) = admissible_pair(&mut s, 4 + t % 3);
        let g1 = s.homography_for(&apply_config(&g2, &x).unwrap());
        worst = worst.max(match d.evaluate(&[g1, g2], &x) {
            Ok(v) => (v - 1.0).abs(),
            Err(_) => f64::INFINITY,
        });
    }
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-9 && elapsed < Duration::from_secs(5),
        format!("1000 triples, max |d1(J) - 1| = {worst:.2e}, {:.2} s", elapsed.as_secs_f64()),
    )
}

fn max_coord_gap(a: &PointConfig, b: &PointConfig) -> f64 {
    a.points()
        .iter()
        .zip(b.points())
        .map(|(p, q)| ((p.x - q.x).abs() / q.x.abs().max(1.0)).max((p.y - q.y).abs() / q.y.abs().max(1.0)))
        .fold(0.0, f64::max)
}

fn criterion_2() -> Outcome {
    let mut s = InstanceSampler::new(DEFAULT_SEED);
    let (mut equi, mut idem) = (0.0_f64, 0.0_f64);
    for t in 0..200 {
        let (g, x) = admissible_pair(&mut s, 4 + t % 3);
        equi = equi.max(frame_equivariance_check(&x, &g).unwrap_or(f64::INFINITY));
        let once = invariantize_config(&x).unwrap();
        idem = idem.max(max_coord_gap(&invariantize_config(&once).unwrap(), &once));
    }
    outcome(equi < 1e-8 && idem < 1e-9, format!("200 trials, equivariance {equi:.2e}, idempotence {idem:.2e}"))
}

fn criterion_3() -> Outcome {
    let mu = Cochain::total_jacobian();
    let mut s = InstanceSampler::new(DEFAULT_SEED);
    let (mut law, mut reinv) = (0.0_f64, 0.0_f64);
    for t in 0..200 {
        let (g, x) = admissible_pair(&mut s, 4 + t % 3);
        let before = invariantized_jacobian_direct(&x).unwrap();
        let after = invariantized_jacobian_direct(&apply_config(&g, &x).unwrap()).unwrap();
        law = law.max(rel(after * mu.at1(&g, &x).unwrap(), before));
        let normalized = invariantize_config(&x).unwrap();
        reinv = reinv.max((invariantized_jacobian_direct(&normalized).unwrap() - 1.0).abs());
    }
    outcome(law < 1e-8 && reinv < 1e-10, format!("200 trials, weight -1 law {law:.2e}, re-invariantized {reinv:.2e}"))
}

fn criterion_4() -> Outcome {
    let mut s = InstanceSampler::new(DEFAULT_SEED);
    let mut worst: f64 = 0.0;
    for n in [5, 6] {
        for _ in 0..100 {
            let x = s.config(n);
            let direct = invariantized_jacobian_direct(&x).unwrap().abs();
            worst = worst.max(rel(invariantized_jacobian_closed(&x).unwrap().abs(), direct));
        }
    }
    let mut worst4: f64 = 0.0;
    for _ in 0..100 {
        let x = s.config(4);
        let p: f64 = base_deltas(&x).iter().product();
        let expected = 1.0 / p.abs();
        worst4 = worst4.max(rel(invariantized_jacobian_direct(&x).unwrap().abs(), expected));
        worst4 = worst4.max(rel(invariantized_jacobian_closed(&x).unwrap().abs(), expected));
    }
    let exact = ExactConfig::from_config(&CROSS_SECTION.config());
    let exact_ok = exact.invariantized_jacobian_direct().unwrap() == q(1)
        && exact.invariantized_jacobian_closed().unwrap() == q(1);
    outcome(
        worst < 1e-8 && worst4 < 1e-8 && exact_ok,
        format!("n=5,6 closed/direct {worst:.2e}; n=4 vs |P|^-1 {worst4:.2e}; cross-section exact = 1: {exact_ok}"),
    )
}

fn criterion_5() -> Outcome {
    let mut s = InstanceSampler::new(DEFAULT_SEED);
    let mut drift: f64 = 0.0;
    for t in 0..100 {
        let (g, x) = admissible_pair(&mut s, 5 + t % 2);
        let (a1, a2) = fundamental_invariants(&x).unwrap();
        let (b1, b2) = fundamental_invariants(&apply_config(&g, &x).unwrap()).unwrap();
        for (b, a) in b1.iter().chain(&b2).zip(a1.iter().chain(&a2)) {
            drift = drift.max(rel(*b, *a));
        }
    }
    let mut min_sv = f64::INFINITY;
    let mut rank_ok = true;
    for t in 0..20 {
        let x = s.config(5 + t % 3);
        let jac: DMatrix<f64> = generator_jacobian(&x, 1e-6).unwrap();
        let sv = jac.singular_values();
        rank_ok &= sv.len() == 2 * (x.len() - 4);
        min_sv = min_sv.min(sv.min());
    }
    outcome(
        drift < 1e-8 && rank_ok && min_sv > 1e-6,
        format!("invariance drift {drift:.2e}; smallest singular value over 20 points {min_sv:.2e}"),
    )
}

fn criterion_6() -> Outcome {
    let mut s = InstanceSampler::new(DEFAULT_SEED);
    let (mut dl, mut mx, mut cube) = (0.0_f64, 0.0_f64, 0.0_f64);
    for t in 0..200 {
        let (g, x) = admissible_pair(&mut s, 5 + t % 2);
        for (i, j, k) in [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4), (1, 4, 5), (3, 4, 5)] {
            dl = dl.max(delta_transform_check(&g, &x, i, j, k).unwrap());
        }
        for i in 5..=x.len() {
            mx = mx.max(mixed_transform_check(&g, &x, i).unwrap());
        }
        let (g3, x3) = admissible_pair(&mut s, 3);
        cube = cube.max(cubed_delta_check(&g3, &x3).unwrap());
    }
    outcome(
        dl < 1e-9 && mx < 1e-9 && cube < 1e-9,
        format!("200 trials, delta {dl:.2e}, mixed {mx:.2e}, n=3 cubed {cube:.2e}"),
    )
}

fn criterion_7() -> Outcome {
    let family: Vec<Expr> = relinv::checks::EXPRESSION_FAMILY.iter().map(|e| e.parse().unwrap()).collect();
    let mu = Cochain::total_jacobian();
    let mut s = InstanceSampler::new(DEFAULT_SEED);
    let mut worst: f64 = 0.0;
    for t in 0..100 {
        let w = t as i64 % 5 - 2;
        let f = &family[(t / 5) % family.len()];
        let (g, x) = admissible_pair(&mut s, 5);
        let eval = |v: &relinv::InvariantVector| f.eval(v);
        let weight = Rational64::from_integer(w);
        let before = relative_invariant(weight, eval, &x).unwrap();
        let after = relative_invariant(weight, eval, &apply_config(&g, &x).unwrap()).unwrap();
        worst = worst.max(rel(after, mu.at1(&g, &x).unwrap().powi(w as i32) * before));
    }
    outcome(worst < 1e-7, format!("100 trials, weights -2..2, {} expressions, {worst:.2e}", family.len()))
}

fn criterion_8() -> Outcome {
    let mu = Cochain::total_jacobian();
    let reproduced = d0(&gauge_from_multiplier(&mu, ProjectiveFrame).unwrap()).unwrap();
    let mut s = InstanceSampler::new(DEFAULT_SEED);
    let mut sign = None;
    let mut worst: f64 = 0.0;
    let mut consistent = true;
    for n in [4, 5] {
        for _ in 0..100 {
            let (g, x) = admissible_pair(&mut s, n);
            let (a, b) = (reproduced.at1(&g, &x).unwrap(), mu.at1(&g, &x).unwrap());
            let ratio_sign = (a / b).signum();
            consistent &= *sign.get_or_insert(ratio_sign) == ratio_sign;
            worst = worst.max(rel(a, ratio_sign * b));
        }
    }
    outcome(
        worst < 1e-8 && consistent,
        format!("n=4,5, 200 trials, {worst:.2e}, global sign {}", sign.unwrap_or(f64::NAN)),
    )
}

fn criterion_9() -> Outcome {
    let img = ImageGrid::gaussian_blob(64, 64, 0.12, 0.15).unwrap();
    let g = Homography::from_rows([[1.02, 0.03, -0.01], [-0.02, 0.98, 0.02], [0.03, -0.02, 1.0]]).unwrap();
    let spec = IntegralSpec::plain(4, 1_000_000, DEFAULT_SEED);
    let start = Instant::now();
    let report = invariance_experiment(&img, &spec, &g, 1).unwrap();
    let elapsed = start.elapsed();
    let parallel = integral_invariant_with_workers(&img, &spec, 4).unwrap();
    let bitwise = parallel == report.original && parallel.value.to_bits() == report.original.value.to_bits();
    outcome(
        report.pass && report.support_inside && bitwise && elapsed < Duration::from_secs(60),
        format!(
            "value {:.4e} ± {:.1e}, warped {:.4e} ± {:.1e}, |diff| {:.2e} < {:.2e}; {:.1} s single-threaded; 4 workers bitwise equal: {bitwise}",
            report.original.value,
            report.original.stderr,
            report.warped.value,
            report.warped.stderr,
            report.difference,
            report.threshold,
            elapsed.as_secs_f64()
        ),
    )
}

/// Pixel-center quadrature of `∫ ∏u / |δ₁₂₃δ₁₂₄δ₁₃₄δ₂₃₄|` over 4-tuples. `|P|` is
/// symmetric in the four points, so unordered tuples are summed and weighted by
/// 4! = 24; tuples with a vanishing determinant are skipped.
fn quadrature(img: &ImageGrid) -> f64 {
    let mut cells = Vec::new();
    for j in 0..img.height() {
        for i in 0..img.width() {
            let u = img.pixel(i, j);
            if u != 0.0 {
                cells.push((img.pixel_center(i, j), u));
            }
        }
    }
    let (sx, sy) = img.spacing();
    let cell = sx * sy;
    let m = cells.len();
    let mut sum = 0.0;
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                for d in c + 1..m {
                    let (p, q, r, t) = (cells[a].0, cells[b].0, cells[c].0, cells[d].0);
                    let prod = delta_points(p, q, r) * delta_points(p, q, t) * delta_points(p, r, t) * delta_points(q, r, t);
                    if prod == 0.0 {
                        continue;
                    }
                    sum += cells[a].1 * cells[b].1 * cells[c].1 * cells[d].1 / prod.abs();
                }
            }
        }
    }
    24.0 * sum * cell.powi(4)
}

fn criterion_10() -> Outcome {
    let img = ImageGrid::gaussian_blob(8, 8, 0.25, 0.0).unwrap();
    let oracle = quadrature(&img);
    let est = integral_invariant(&img, &IntegralSpec::plain(4, 1_000_000, DEFAULT_SEED)).unwrap();
    let diff = (est.value - oracle).abs();
    outcome(
        diff < 3.0 * est.stderr,
        format!(
            "Monte Carlo {:.4e} ± {:.2e} vs quadrature {oracle:.4e}; |diff| = {:.2} stderr (relative stderr {:.2})",
            est.value,
            est.stderr,
            diff / est.stderr,
            est.stderr / est.value
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("cocycle identity of the total Jacobian", criterion_1),
        ("frame equivariance and idempotence", criterion_2),
        ("invariantized Jacobian has weight -1", criterion_3),
        ("closed form vs direct invariantized Jacobian", criterion_4),
        ("fundamental invariants: invariance and rank", criterion_5),
        ("transformation laws of delta and mixed sums", criterion_6),
        ("normal form of relative invariants", criterion_7),
        ("classification round trip", criterion_8),
        ("integral invariance under a projective warp", criterion_9),
        ("Monte Carlo vs pixel-center quadrature", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = std::panic::catch_unwind(run).unwrap_or_else(|_| outcome(false, "panicked"));
        println!("criterion {:>2} {}: {name} — {}", k + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
