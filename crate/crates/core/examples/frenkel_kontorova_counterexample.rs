//! Spring cost |x - y - 3/4|^2 on X = {1,2,3}: the unique optimal plan is not a
//! symmetrized Monge state.

use mmot_geometry::costs::{minimize_full_certified, minimize_over_catalog, CostSpec, Potential};
use mmot_geometry::exact::rat;
use mmot_geometry::gallery::standard_catalog;
use mmot_geometry::monge;
use mmot_geometry::plans::StateSpace;
use mmot_geometry::polytope::DEFAULT_BUDGET;

fn main() -> mmot_geometry::Result<()> {
    let space = StateSpace::equispaced_line(3, 3)?;
    let cost = CostSpec::new(space, Potential::Spring { a: rat(3, 4) })?;
    let over_vertices = minimize_over_catalog(&cost, standard_catalog())?;
    println!("vertex scan: {:?} at {}", over_vertices.argmin, over_vertices.value);
    let full = minimize_full_certified(&cost, DEFAULT_BUDGET)?;
    let plan = full.minimizer.expect("feasible");
    println!("full LP over 27 tuples: value {}, unique {}", full.value, full.unique);
    for (t, w) in plan.weights() {
        println!("  {w} at {:?}", t.iter().map(|i| i + 1).collect::<Vec<_>>());
    }
    println!("Monge: {}", monge::is_monge(&plan));
    println!("symmetrized Monge: {}", monge::is_symmetrized_monge(&plan.symmetrize())?);
    for name in ["Id", "T12", "C"] {
        println!("cost of {name}: {}", cost.evaluate_symmetric(standard_catalog().get(name).unwrap())?);
    }
    Ok(())
}
