//! The 22 vertices of the symmetric Kantorovich polytope for N = 3 marginals on 3 sites.

use mmot_geometry::plans::Dims;
use mmot_geometry::polytope::{build_constraints, enumerate_vertices};

fn main() -> mmot_geometry::Result<()> {
    let system = build_constraints(Dims::new(3, 3)?);
    println!("{} unknowns, {} constraints, rank {}", system.columns().len(), system.b().len(), system.rank());
    let catalog = enumerate_vertices(&system)?;
    for (name, plan, flags) in catalog.iter() {
        let terms: Vec<String> = plan.alpha().iter().map(|(m, w)| format!("{w} S[{m}]")).collect();
        let tag = if flags.symmetrized_monge { "symmetrized Monge" } else { "" };
        println!("{name:>10}  {:<40} {tag}", terms.join(" + "));
    }
    let monge = catalog.flags().iter().filter(|f| f.symmetrized_monge).count();
    println!("{} vertices, {monge} symmetrized Monge", catalog.len());
    Ok(())
}
