// Fundamental absolute invariants and the invariantized Jacobian.
//
// $ cargo run --example joint_invariants
use relinv::invariants::{
    invariant_vector, invariantized_jacobian_closed, invariantized_jacobian_direct, per_point_invariantized_multipliers,
};
use relinv::sampling::InstanceSampler;
use relinv::{apply_config, total_jacobian, DEFAULT_SEED};

fn main() -> relinv::Result<()> {
    let mut s = InstanceSampler::new(DEFAULT_SEED);
    let (g, cfg) = s.pair(6);

    let v = invariant_vector(&cfg)?;
    let w = invariant_vector(&apply_config(&g, &cfg)?)?;
    println!("x:\n{v}");
    println!("g.x:\n{w}");
    println!("jinv(g.x) * J(g,x) = {:.16e}", w.jinv * total_jacobian(&g, &cfg)?.value());

    for n in 4..=7 {
        let c = s.config(n);
        let direct = invariantized_jacobian_direct(&c)?;
        let closed = invariantized_jacobian_closed(&c)?;
        println!("n={n}: closed/direct = {:+.15}", closed / direct);
    }
    println!("per-point factors: {:?}", per_point_invariantized_multipliers(&cfg)?);
    Ok(())
}
