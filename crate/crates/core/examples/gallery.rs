//! Worked examples and seeded property suites, one PASS/FAIL line each.

use mmot_geometry::gallery::{run_suite, GalleryParams};

fn main() -> mmot_geometry::Result<()> {
    for r in run_suite(&GalleryParams::default())? {
        println!("{} {}  {}", if r.pass { "PASS" } else { "FAIL" }, r.example_id, r.computed);
    }
    Ok(())
}
