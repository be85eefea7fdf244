//! Extreme points of the reduced (2-point marginal) polytope and how the other
//! vertex marginals decompose over them.

use mmot_geometry::plans::Dims;
use num_traits::Zero;
use mmot_geometry::polytope::{self, build_constraints, enumerate_vertices};

fn main() -> mmot_geometry::Result<()> {
    let system = build_constraints(Dims::new(3, 3)?);
    let catalog = enumerate_vertices(&system)?;
    let reduced = polytope::reduced_vertices(&catalog);
    let generators = reduced.marginals();
    for e in &reduced.entries {
        let unique = polytope::preimage_unique(&e.marginal, &system)?;
        println!("{:>5}  [{}]  unique preimage: {unique}", e.name, e.marginal);
    }
    println!("{} distinct marginals among {} vertices", polytope::project_reduced(&catalog).len(), catalog.len());
    for (name, plan, _) in catalog.iter().filter(|(_, _, f)| !f.reduced_extreme) {
        let lambdas = polytope::decompose(&plan.two_point_marginal(), &generators)?.expect("inside the hull");
        let parts: Vec<String> = reduced
            .entries
            .iter()
            .zip(&lambdas)
            .filter(|(_, l)| !l.is_zero())
            .map(|(e, l)| format!("{l} {}", e.name))
            .collect();
        println!("M2({name}) = {}", parts.join(" + "));
    }
    Ok(())
}
