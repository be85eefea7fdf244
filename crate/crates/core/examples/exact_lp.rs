//! The exact rational simplex on a small transport problem.

use mmot_geometry::exact::{int, lp_solve, rat, RationalMatrix};

fn main() -> mmot_geometry::Result<()> {
    // Ship supplies (1/3, 2/3) to demands (1/2, 1/2) at costs [[1, 3], [2, 1]].
    let a = RationalMatrix::from_rows(vec![
        vec![int(1), int(1), int(0), int(0)],
        vec![int(0), int(0), int(1), int(1)],
        vec![int(1), int(0), int(1), int(0)],
        vec![int(0), int(1), int(0), int(1)],
    ])?;
    let b = [rat(1, 3), rat(2, 3), rat(1, 2), rat(1, 2)];
    let c = [int(1), int(3), int(2), int(1)];
    let res = lp_solve(&c, &a, &b, true)?;
    println!("{:?}: value {:?}", res.status, res.value.map(|v| v.to_string()));
    let x: Vec<String> = res.point.unwrap_or_default().iter().map(|v| v.to_string()).collect();
    println!("plan {x:?}");
    Ok(())
}
