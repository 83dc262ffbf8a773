// The bar complex: multipliers are cocycles, and the moving frame turns every
// multiplier into a coboundary.
//
// $ cargo run --example cocycle_checks
use relinv::checks::faulty_multiplier;
use relinv::cocycle::{d0, gauge_from_multiplier, is_multiplier, Cochain, ProjectiveFrame};
use relinv::sampling::InstanceSampler;
use relinv::DEFAULT_SEED;

fn main() -> relinv::Result<()> {
    let mu = Cochain::total_jacobian();
    print!("{}", is_multiplier(&mu, 5, 200, DEFAULT_SEED));
    println!();
    print!("{}", is_multiplier(&faulty_multiplier(), 5, 200, DEFAULT_SEED));
    println!();

    // f(x) = 1/mu(rho(x), x) has d0 f = mu
    let f = gauge_from_multiplier(&mu, ProjectiveFrame)?;
    let df = d0(&f)?;
    let mut s = InstanceSampler::new(DEFAULT_SEED);
    for _ in 0..5 {
        let (g, x) = s.pair(4);
        println!("d0 f = {:+.12e}   mu = {:+.12e}", df.at1(&g, &x)?, mu.at1(&g, &x)?);
    }
    Ok(())
}
