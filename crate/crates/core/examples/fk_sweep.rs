//! Minimizers of the spring cost as the equilibrium spacing a runs over [0, 1].

use mmot_geometry::costs::{uniform_grid, Root};
use mmot_geometry::exact::int;
use mmot_geometry::gallery;

fn main() -> mmot_geometry::Result<()> {
    let curves = gallery::fk_sweep(&uniform_grid(&int(0), &int(1), 8)?)?;
    for (name, q) in &curves.curves {
        println!("{name:>5}: {q}");
    }
    for row in &curves.sweep.rows {
        println!("a = {:<4} min {:<6} at {}", row.a.to_string(), row.value.to_string(), row.argmin.join(" "));
    }
    for c in &curves.sweep.crossings {
        let at = match &c.at {
            Root::Exact(q) => q.to_string(),
            Root::Approx(x) => format!("{x:.12}"),
        };
        println!("{} -> {} at a = {at}", c.from, c.to);
    }
    Ok(())
}
