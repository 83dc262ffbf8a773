// Exact rational evaluation next to the floating-point path.
//
// $ cargo run --example exact_oracle
use relinv::exact::{to_f64, ExactConfig};
use relinv::invariants::invariantized_jacobian_direct;
use relinv::sampling::InstanceSampler;
use relinv::{CROSS_SECTION, DEFAULT_SEED};

fn main() -> relinv::Result<()> {
    let k = ExactConfig::from_config(&CROSS_SECTION.config());
    println!("cross-section: direct = {}, closed = {}", k.invariantized_jacobian_direct()?, k.invariantized_jacobian_closed()?);

    let mut s = InstanceSampler::new(DEFAULT_SEED);
    for n in 4..=6 {
        let cfg = s.config(n);
        let exact = ExactConfig::from_config(&cfg);
        let direct = exact.invariantized_jacobian_direct()?;
        let closed = exact.invariantized_jacobian_closed()?;
        let float = invariantized_jacobian_direct(&cfg)?;
        println!(
            "n={n}: closed == (-1)^(n-4) direct exactly: {}   float rel. err {:.2e}",
            if n % 2 == 0 { closed == direct } else { closed == -direct.clone() },
            (float - to_f64(&direct)).abs() / to_f64(&direct).abs()
        );
    }
    Ok(())
}
