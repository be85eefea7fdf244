//! The continuous FK gas with v(r) = r^4/4 - r^3/3 on [0, 3].

use mmot_geometry::costs::Potential;
use mmot_geometry::fkgas;

fn main() -> mmot_geometry::Result<()> {
    let t = fkgas::triple_min(&Potential::QuarticFk, 300, 1e-8)?;
    println!("triple minimizers {:?}, value {:.12}", t.minimizers, t.min_value);
    let red = fkgas::finite_reduction()?;
    println!(
        "on {{-1,0,1}}: {} with cost {}, best symmetrized Monge {:?} with cost {}, gap {}",
        red.minimizer_name, red.kantorovich_min, red.monge_argmin, red.monge_min, red.gap
    );
    let q = fkgas::quasi_monge_cost(1000, 300)?;
    println!("quasi-Monge plan cost {:.12}", q.cost);
    for m in fkgas::microstructure_sequence(&[1, 2, 4, 8, 16], 16)? {
        println!("nu = {:>2}: I = {:.12}  (exact excess {})", m.nu, m.energy, m.exact_excess);
    }
    Ok(())
}
