// Apply a homography to a configuration and look at the Jacobian multiplier.
//
// $ cargo run --example transform_points
use relinv::projective::{delta, denominators};
use relinv::{apply_config, jacobian_point, total_jacobian, Homography, PointConfig};

fn main() -> relinv::Result<()> {
    let cfg = PointConfig::from_coords(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.7, 0.4)])?;
    let g = Homography::from_rows([[1.1, 0.2, 0.05], [-0.1, 0.9, 0.3], [0.2, 0.1, 1.0]])?;

    let moved = apply_config(&g, &cfg)?;
    println!("g =\n{g}");
    println!("g.x =\n{moved}");
    println!("s_i = {:?}", denominators(&g, &cfg)?);
    for (i, p) in cfg.points().iter().enumerate() {
        println!("J(g, p{}) = {:.6}", i + 1, jacobian_point(&g, *p)?.value());
    }
    let j = total_jacobian(&g, &cfg)?.value();
    println!("J(g, x)  = {j:.6}");

    // a rescaled matrix is the same projective map
    let same = total_jacobian(&g.scaled(-3.0)?, &cfg)?.value();
    println!("J(-3g, x) = {same:.6}");

    println!("delta_123: {:.6} -> {:.6}", delta(&cfg, 1, 2, 3)?, delta(&moved, 1, 2, 3)?);
    Ok(())
}
