// Moving frame of a configuration and the invariantization of coordinates.
//
// $ cargo run --example moving_frame
use relinv::frame::{
    closed_form_frame, frame_equivariance_check, invariantize_config, invariantized_coordinates, FrameDenominator,
};
use relinv::sampling::InstanceSampler;
use relinv::{solve_frame, DEFAULT_SEED};

fn main() -> relinv::Result<()> {
    let mut s = InstanceSampler::new(DEFAULT_SEED);
    let (g, cfg) = s.pair(6);

    let frame = solve_frame(&cfg)?;
    println!("rho(x) =\n{}", frame.rho);
    println!("normalization residual: {:e}", frame.residual);
    println!("rho(x).x =\n{}", invariantize_config(&cfg)?);
    for i in 5..=6 {
        let p = invariantized_coordinates(&cfg, i)?;
        println!("closed form  iota(x{i}), iota(y{i}) = {:.12}, {:.12}", p.x, p.y);
    }

    println!("equivariance residual: {:e}", frame_equivariance_check(&cfg, &g)?);

    for variant in [FrameDenominator::Corrected, FrameDenominator::RepeatedRow] {
        let d = closed_form_frame(&cfg, variant).map(|h| h.projective_distance(&frame.rho));
        println!("explicit parameters ({variant:?}) vs solve: {d:?}");
    }
    Ok(())
}
