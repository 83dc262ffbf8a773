// Any relative invariant of weight w is jinv^(-w) * F(I1, I2).
//
// $ cargo run --example relative_invariant -- "I1_5^2 - I2_6" 2
use num_rational::Rational64;
use relinv::expr::Expr;
use relinv::invariants::relative_invariant;
use relinv::sampling::InstanceSampler;
use relinv::{apply_config, total_jacobian, DEFAULT_SEED};

fn main() -> relinv::Result<()> {
    let mut args = std::env::args().skip(1);
    let f: Expr = args.next().as_deref().unwrap_or("1 + I1_5 * I2_5").parse()?;
    let weight: Rational64 = args.next().as_deref().unwrap_or("-1").parse().expect("weight p/q");
    let n = f.max_index().max(5);

    let mut s = InstanceSampler::new(DEFAULT_SEED);
    for _ in 0..5 {
        let (g, cfg) = s.pair(n);
        let a = relative_invariant(weight, |v| f.eval(v), &cfg)?;
        let b = relative_invariant(weight, |v| f.eval(v), &apply_config(&g, &cfg)?)?;
        let j = total_jacobian(&g, &cfg)?.value();
        let predicted = j.powf(*weight.numer() as f64 / *weight.denom() as f64) * a;
        println!("A(x) = {a:+.10e}  A(g.x) = {b:+.10e}  J^w A(x) = {predicted:+.10e}");
    }
    Ok(())
}
