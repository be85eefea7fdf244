//! The Monge polytope: convex hull of the 2-point marginals of symmetrized Monge states.

use mmot_geometry::monge::{self, MongeIndex};
use mmot_geometry::plans::Dims;
use mmot_geometry::polytope;

fn main() -> mmot_geometry::Result<()> {
    let dims = Dims::new(3, 3)?;
    let index = MongeIndex::build(dims)?;
    println!("{} Monge tuples give {} symmetrized Monge states", index.tuple_count(), index.plans().len());
    let vertices = monge::monge_polytope_vertices(dims)?;
    for v in &vertices.entries {
        println!("{:>8}  [{}]", v.name, v.marginal);
    }
    // The mixed vertices sit on the segments from F to C.
    let cat = polytope::enumerate_vertices(&polytope::build_constraints(dims))?;
    let c = cat.get("C").unwrap().two_point_marginal();
    for (mixed, f) in [("T12,T23", "F112"), ("T13,T23", "F113"), ("T12,T13", "F122")] {
        let m = &vertices.get(mixed).unwrap().marginal;
        let gens = [cat.get(f).unwrap().two_point_marginal(), c.clone()];
        let l = polytope::decompose(m, &gens)?.unwrap();
        println!("M2({mixed}) = {} M2({f}) + {} M2(C)", l[0], l[1]);
    }
    Ok(())
}
