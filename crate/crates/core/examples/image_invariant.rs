// Monte-Carlo integral invariant of a blob image and of a warped copy.
//
// $ cargo run --release --example image_invariant -- 200000
use relinv::image::{integral_invariant_with_workers, invariance_experiment, ImageGrid, IntegralSpec};
use relinv::{Homography, DEFAULT_SEED};

fn main() -> relinv::Result<()> {
    let samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200_000);
    let img = ImageGrid::gaussian_blob(64, 64, 0.12, 0.15)?;
    let spec = IntegralSpec::plain(4, samples, DEFAULT_SEED);

    let one = integral_invariant_with_workers(&img, &spec, 1)?;
    let four = integral_invariant_with_workers(&img, &spec, 4)?;
    print!("{one}");
    println!("same bits with 4 workers: {}\n", one.value.to_bits() == four.value.to_bits());

    let g = Homography::from_rows([[1.02, 0.03, -0.01], [-0.02, 0.98, 0.02], [0.03, -0.02, 1.0]])?;
    print!("{}", invariance_experiment(&img, &spec, &g, 4)?);
    // stderr is of the same order as the value: the integrand 1/|P| is not
    // integrable near coincident or collinear tuples
    Ok(())
}
