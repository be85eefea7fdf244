//! Birkhoff-von Neumann: vertices of the N = 2 polytope are permutation matrices.

use mmot_geometry::plans::Dims;
use mmot_geometry::polytope::{build_full_constraints, DEFAULT_BUDGET};

fn main() -> mmot_geometry::Result<()> {
    for l in 2..=4 {
        let system = build_full_constraints(Dims::new(2, l)?, DEFAULT_BUDGET)?;
        let vertices = system.vertices(DEFAULT_BUDGET)?;
        println!("l = {l}: {} vertices", vertices.len());
        if l == 3 {
            for v in &vertices {
                let perm: Vec<usize> = v.weights().keys().map(|t| t[1] + 1).collect();
                println!("  {perm:?}");
            }
        }
    }
    Ok(())
}
