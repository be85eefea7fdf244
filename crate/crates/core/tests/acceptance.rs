//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

mod common;

use std::collections::{BTreeSet, HashSet};
use std::process::Command;
use std::time::{Duration, Instant};

use mmot_geometry::costs::{self, CostSpec, Potential, Root};
use mmot_geometry::exact::{int, rat, Rational};
use mmot_geometry::fkgas;
use mmot_geometry::gallery::{self, GalleryParams};
use mmot_geometry::monge;
use mmot_geometry::plans::{DensePlan, Dims, PairMarginal, StateSpace};
use mmot_geometry::polytope;
use serde_json::Value;

use common::{d33, golden, golden_plan, TABLE};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn mmot(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_mmot"))
        .args(args)
        .output()
        .expect("run mmot");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn c1_symmetric_vertices() -> Check {
    let start = Instant::now();
    let (code, out) = mmot(&["vertices", "--polytope", "symmetric", "-N", "3", "-L", "3"]);
    let cli_time = start.elapsed();
    ensure(code == 0, format!("exit code {code}"))?;
    let v: Value = serde_json::from_slice(&out).map_err(err)?;
    let verts = v["vertices"].as_array().ok_or("no vertex list")?;
    ensure(verts.len() == 22, format!("{} vertices", verts.len()))?;
    let mut seen = BTreeSet::new();
    for row in &TABLE {
        let entry = verts
            .iter()
            .find(|e| e["name"] == row.name)
            .ok_or(format!("{} missing", row.name))?;
        let want = golden_plan(row);
        let got: Vec<(String, String)> = entry["alpha"]
            .as_array()
            .ok_or("alpha")?
            .iter()
            .map(|t| (t[0].as_str().unwrap_or("").to_string(), t[1].as_str().unwrap_or("").to_string()))
            .collect();
        let want: Vec<(String, String)> = want.alpha().iter().map(|(m, w)| (m.to_string(), w.to_string())).collect();
        ensure(got == want, format!("{}: {got:?} != {want:?}", row.name))?;
        ensure(
            entry["symmetrized_monge"] == row.symmetrized_monge,
            format!("{} Monge flag", row.name),
        )?;
        seen.insert(row.name);
    }
    let monge = verts.iter().filter(|e| e["symmetrized_monge"] == true).count();
    ensure(monge == 7 && seen.len() == 22, format!("{monge} symmetrized Monge"))?;
    let t = Instant::now();
    polytope::enumerate_vertices(&polytope::build_constraints(d33())).map_err(err)?;
    let lib_time = t.elapsed();
    ensure(lib_time < Duration::from_secs(1), format!("enumeration took {lib_time:?}"))?;
    Ok(format!(
        "22 vertices match the table, 7 symmetrized Monge, 15 not; enumeration {lib_time:.0?}, CLI {cli_time:.0?}"
    ))
}

const EIGHT: [&str; 8] = ["Id", "T12", "T13", "T23", "C", "F112", "F113", "F122"];

fn c2_reduced_vertices() -> Check {
    let system = polytope::build_constraints(d33());
    let cat = polytope::enumerate_vertices(&system).map_err(err)?;
    let reduced = polytope::reduced_vertices(&cat);
    ensure(reduced.len() == 8, format!("{} extreme points", reduced.len()))?;
    let got: HashSet<PairMarginal> = reduced.marginals().into_iter().collect();
    let want: HashSet<PairMarginal> = EIGHT.iter().map(|n| golden(n).two_point_marginal()).collect();
    ensure(got == want, "extreme points differ from the images of the eight plans")?;
    for m in &got {
        ensure(polytope::preimage_unique(m, &system).map_err(err)?, format!("preimage of [{m}] not unique"))?;
    }
    let monge_marginals = monge::symmetrized_monge_marginals(d33()).map_err(err)?;
    for f in ["F112", "F113", "F122"] {
        ensure(
            !monge_marginals.contains(&golden(f).two_point_marginal()),
            format!("{f} is a symmetrized Monge marginal"),
        )?;
    }
    Ok("8 extreme points = M2{Id,T12,T13,T23,C,F112,F113,F122}, unique preimages, F-marginals not Monge".into())
}

fn m2(name: &str) -> PairMarginal {
    golden(name).two_point_marginal()
}

fn key(i: usize, j: usize, k: usize) -> String {
    let mut v = [i, i, j];
    v.sort();
    let mut w = [k, k, k];
    w.sort();
    format!("{}{}{}", v[0], v[1], v[2])
        + ","
        + &format!("{}{}{}", w[0], w[1], w[2])
}

fn c3_identities() -> Check {
    let mut count = 0;
    for (i, j, k) in [(1, 2, 3), (1, 3, 2), (2, 3, 1), (2, 1, 3), (3, 1, 2), (3, 2, 1)] {
        let (lo, hi) = (i.min(j), i.max(j));
        let kiij_kkk = m2(&format!("K{}", key(i, j, k)));
        let tij = m2(&format!("T{lo}{hi}"));
        let l = polytope::decompose(&kiij_kkk, &[m2("Id"), tij]).map_err(err)?;
        ensure(l == Some(vec![rat(1, 4), rat(3, 4)]), format!("K{}: {l:?}", key(i, j, k)))?;
        let mut jjk = [j, j, k];
        jjk.sort();
        let name = format!("K{},{}{}{}", &key(i, j, k)[..3], jjk[0], jjk[1], jjk[2]);
        // The F-state whose support contains the index iij.
        let iij = &key(i, j, k)[..3];
        let f_row = TABLE
            .iter()
            .find(|r| r.name.starts_with('F') && r.terms.iter().any(|t| t.0 == iij))
            .ok_or(format!("no F-state through {iij}"))?;
        let f = golden_plan(f_row).two_point_marginal();
        let l = polytope::decompose(&m2(&name), &[f, kiij_kkk]).map_err(err)?;
        ensure(l == Some(vec![rat(1, 2), rat(1, 2)]), format!("{name}: {l:?}"))?;
        count += 2;
    }
    for name in ["Id,C", "Id,C′"] {
        let l = polytope::decompose(&m2(name), &[m2("Id"), m2("C")]).map_err(err)?;
        ensure(l == Some(vec![rat(1, 3), rat(2, 3)]), format!("{name}: {l:?}"))?;
        count += 1;
    }
    Ok(format!("{count} identities hold with exact coefficients 1/4,3/4 | 1/2,1/2 | 1/3,2/3"))
}

fn c4_example_1_1() -> Check {
    let cost = CostSpec::new(StateSpace::equispaced_line(3, 3).map_err(err)?, Potential::Spring { a: rat(3, 4) })
        .map_err(err)?;
    let res = costs::minimize_full_certified(&cost, polytope::DEFAULT_BUDGET).map_err(err)?;
    let plan = res.minimizer.ok_or("no minimizer")?;
    let dense_f112 = DensePlan::from_one_based(
        d33(),
        &[
            (vec![1, 1, 2], rat(1, 6)),
            (vec![1, 2, 1], rat(1, 6)),
            (vec![2, 1, 1], rat(1, 6)),
            (vec![2, 3, 3], rat(1, 6)),
            (vec![3, 2, 3], rat(1, 6)),
            (vec![3, 3, 2], rat(1, 6)),
        ],
    )
    .map_err(err)?;
    ensure(res.unique, "minimizer not certified unique")?;
    ensure(plan == dense_f112, "minimizer is not dense F112")?;
    ensure(res.value.as_exact() == Some(&rat(11, 16)), format!("value {}", res.value))?;
    ensure(!monge::is_monge(&plan), "classified Monge")?;
    ensure(!monge::is_symmetrized_monge(&plan.symmetrize()).map_err(err)?, "classified symmetrized Monge")?;
    Ok("unique minimizer = dense F112 (6 atoms of 1/6), value 11/16, not Monge, not symmetrized Monge".into())
}

fn c5_sweep() -> Check {
    let grid: Vec<Rational> = (1..=7).map(|k| rat(k, 8)).collect();
    let curves = gallery::fk_sweep(&grid).map_err(err)?;
    for row in &curves.sweep.rows {
        let want = if row.a < rat(1, 2) { "Id" } else { "F112" };
        if row.a == rat(1, 2) {
            continue;
        }
        ensure(row.argmin == [want], format!("a = {}: {:?}", row.a, row.argmin))?;
    }
    let c = &curves.sweep.crossings;
    ensure(c.len() == 1, format!("{} crossings", c.len()))?;
    ensure(
        c[0].from == "Id" && c[0].to == "F112" && c[0].at == Root::Exact(rat(1, 2)),
        format!("{:?}", c[0]),
    )?;
    let poly = |n: &str| {
        costs::cost_polynomial(&golden(n), &StateSpace::equispaced_line(3, 3).unwrap(), costs::CostFamily::Spring)
            .unwrap()
    };
    ensure(poly("Id").sub(&poly("F112")).roots() == vec![Root::Exact(rat(1, 2))], "Id - F112 root")?;
    Ok("Id unique on a = 1/8,1/4,3/8; F112 unique on 5/8,3/4,7/8; crossing exactly at a = 1/2".into())
}

fn c6_monge_polytope() -> Check {
    let mp = monge::monge_polytope_vertices(d33()).map_err(err)?;
    ensure(mp.len() == 8, format!("{} vertices", mp.len()))?;
    let s = |terms: &[(Vec<usize>, Rational)]| {
        DensePlan::from_one_based(d33(), terms).unwrap().symmetrize().two_point_marginal()
    };
    let third = rat(1, 3);
    let mixed = [
        ("T12,T23", "F112", s(&[(vec![1, 2, 1], third.clone()), (vec![2, 1, 3], third.clone()), (vec![3, 3, 2], third.clone())])),
        ("T13,T23", "F113", s(&[(vec![1, 3, 1], third.clone()), (vec![2, 2, 3], third.clone()), (vec![3, 1, 2], third.clone())])),
        ("T12,T13", "F122", s(&[(vec![1, 2, 3], third.clone()), (vec![2, 1, 2], third.clone()), (vec![3, 3, 1], third.clone())])),
    ];
    let got: HashSet<PairMarginal> = mp.marginals().into_iter().collect();
    let mut want: HashSet<PairMarginal> = ["Id", "T12", "T13", "T23", "C"].iter().map(|n| m2(n)).collect();
    want.extend(mixed.iter().map(|m| m.2.clone()));
    ensure(got == want, "vertex set differs from the expected eight")?;
    let c = m2("C");
    for (name, f, m) in &mixed {
        ensure(mp.get(name).map(|v| &v.marginal) == Some(m), format!("{name} not named"))?;
        let fm = m2(f);
        let l = polytope::decompose(m, &[fm.clone(), c.clone()]).map_err(err)?;
        ensure(l == Some(vec![rat(2, 3), rat(1, 3)]), format!("{name}: {l:?}"))?;
        // Displacement in the (mu12, mu13, mu23) chart: one coordinate moves by 1/6 towards C.
        let shift: Vec<Rational> = m.upper_chart().iter().zip(fm.upper_chart()).map(|(a, b)| a - b).collect();
        let towards: Vec<Rational> = c.upper_chart().iter().zip(fm.upper_chart()).map(|(a, b)| a - b).collect();
        let nonzero: Vec<&Rational> = shift.iter().filter(|x| **x != int(0)).collect();
        ensure(nonzero == [&rat(1, 6)], format!("{name}: chart shift {shift:?}"))?;
        ensure(
            shift.iter().zip(&towards).all(|(s, t)| s * rat(3, 1) == *t),
            format!("{name}: shift not along F->C"),
        )?;
    }
    Ok("8 vertices incl. S1/3(d121+d213+d332); each mixed vertex = 2/3 F + 1/3 C, a 1/6 chart shift towards C".into())
}

fn c7_gallery() -> Check {
    let params = GalleryParams { trials: 1000, seed: None };
    let mut lines = Vec::new();
    for id in gallery::EXAMPLE_IDS {
        let r = gallery::run_gallery_example(id, &params).map_err(err)?;
        ensure(r.pass, format!("example {id} failed: {}", r.computed))?;
        lines.push(id);
    }
    let r44 = gallery::run_gallery_example("4.4", &params).map_err(err)?;
    let allowed: BTreeSet<&str> = ["T12", "T13", "T23", "C"].into();
    for set in r44.computed["argmin_sets_seen"].as_array().ok_or("4.4 summary")? {
        for n in set.as_array().ok_or("4.4 set")? {
            ensure(allowed.contains(n.as_str().unwrap_or("")), format!("4.4 argmin {n}"))?;
        }
    }
    ensure(r44.computed["trials"] == 1000, "4.4 trial count")?;
    let r45 = gallery::run_gallery_example("4.5", &params).map_err(err)?;
    let p = r45.computed["p_star"].as_f64().ok_or("p*")?;
    ensure((p - 2.58496).abs() < 1e-5 && (p - 6f64.log2()).abs() < 1e-10, format!("p* = {p}"))?;
    let r46 = gallery::run_gallery_example("4.6", &params).map_err(err)?;
    ensure(r46.computed["argmin_sets_seen"] == serde_json::json!([["C"]]), "4.6 argmins")?;
    Ok(format!("examples {} pass; p* = {p:.6}; 1000 trials each for 4.3, 4.4, 4.6", lines.join(" ")))
}

fn c8_birkhoff() -> Check {
    for (l, fact) in [(2usize, 2usize), (3, 6), (4, 24)] {
        let sys = polytope::build_full_constraints(Dims::new(2, l).map_err(err)?, polytope::DEFAULT_BUDGET).map_err(err)?;
        let v = sys.vertices(polytope::DEFAULT_BUDGET).map_err(err)?;
        ensure(v.len() == fact, format!("l = {l}: {} vertices", v.len()))?;
        for p in &v {
            ensure(
                p.n_atoms() == l && p.weights().values().all(|w| *w == rat(1, l as i64)),
                format!("l = {l}: non-permutation vertex"),
            )?;
        }
    }
    Ok("N = 2: 2, 6, 24 vertices for l = 2, 3, 4, all permutation matrices".into())
}

fn c9_two_site_segment() -> Check {
    let dims = Dims::new(3, 2).map_err(err)?;
    let cat = polytope::enumerate_vertices(&polytope::build_constraints(dims)).map_err(err)?;
    let reduced = polytope::reduced_vertices(&cat);
    let g1 = DensePlan::from_one_based(dims, &[(vec![1, 1, 1], rat(1, 2)), (vec![2, 2, 2], rat(1, 2))])
        .map_err(err)?
        .symmetrize();
    let g2 = DensePlan::from_one_based(dims, &[(vec![1, 1, 2], rat(1, 2)), (vec![2, 2, 1], rat(1, 2))])
        .map_err(err)?
        .symmetrize();
    let got: HashSet<PairMarginal> = reduced.marginals().into_iter().collect();
    let want: HashSet<PairMarginal> = [g1.two_point_marginal(), g2.two_point_marginal()].into();
    ensure(got == want, "reduced polytope is not the segment [M2 g1, M2 g2]")?;
    ensure(
        monge::is_symmetrized_monge(&g1).map_err(err)? && monge::is_symmetrized_monge(&g2).map_err(err)?,
        "endpoints not symmetrized Monge",
    )?;
    ensure(cat.position(&g1).is_some() && cat.position(&g2).is_some(), "endpoints are not vertices")?;
    Ok(format!(
        "reduced polytope = segment [M2 g1, M2 g2], both symmetrized Monge (the symmetric coefficient polytope itself has {} vertices)",
        cat.len()
    ))
}

fn c10_fkgas() -> Check {
    let t = fkgas::triple_min(&Potential::QuarticFk, 300, 1e-8).map_err(err)?;
    ensure(t.minimizers.len() == 2, format!("{:?}", t.minimizers))?;
    let close = |p: (f64, f64), q: (f64, f64)| (p.0 - q.0).abs() < 1e-9 && (p.1 - q.1).abs() < 1e-9;
    ensure(close(t.minimizers[0], (0.0, 1.0)) && close(t.minimizers[1], (1.0, 0.0)), format!("{:?}", t.minimizers))?;
    ensure((t.min_value + 1.0 / 6.0).abs() < 1e-12, format!("value {}", t.min_value))?;
    let r = fkgas::finite_reduction().map_err(err)?;
    ensure(r.kantorovich_min == rat(-1, 6), format!("Kantorovich min {}", r.kantorovich_min))?;
    ensure(r.gap > int(0), format!("gap {}", r.gap))?;
    let q = fkgas::quasi_monge_cost(1000, 300).map_err(err)?;
    ensure((q.cost + 1.0 / 6.0).abs() < 1e-12, format!("quasi-Monge cost {}", q.cost))?;
    let seq = fkgas::microstructure_sequence(&[1, 2, 4, 8, 16], 16).map_err(err)?;
    let excess: Vec<f64> = seq.iter().map(|m| m.energy + 1.0 / 6.0).collect();
    ensure(excess.iter().all(|e| *e > 0.0), "energy below -1/6")?;
    ensure(excess.windows(2).all(|w| w[1] < w[0]), "energies not decreasing")?;
    ensure(excess.windows(2).all(|w| w[1] / w[0] < 1.0), "gap ratio")?;
    let ratios: Vec<String> = excess.windows(2).take(3).map(|w| format!("{:.3}", w[1] / w[0])).collect();
    Ok(format!(
        "triple minima (0,1),(1,0); Kantorovich -1/6, Monge gap {}; quasi-Monge {:.3e} off; gap ratios {}",
        r.gap,
        (q.cost + 1.0 / 6.0).abs(),
        ratios.join(", ")
    ))
}

fn c11_determinism() -> Check {
    let cost = common::fixture("fk_spring_0p75.json");
    let plan = common::fixture("f112.json");
    let (cost, plan) = (cost.to_str().unwrap(), plan.to_str().unwrap());
    let commands: Vec<Vec<&str>> = vec![
        vec!["vertices", "--polytope", "symmetric", "-N", "3", "-L", "3"],
        vec!["vertices", "--polytope", "symmetric", "--format", "csv"],
        vec!["vertices", "--polytope", "reduced", "--format", "table"],
        vec!["vertices", "--polytope", "monge"],
        vec!["classify", plan],
        vec!["solve", cost, "--full", "--certify-unique"],
        vec!["solve", cost],
        vec!["sweep-fk", "--from", "0", "--to", "1", "--steps", "8"],
        vec!["sweep-fk", "--format", "csv"],
        vec!["gallery", "--trials", "200"],
        vec!["gallery", "--example", "4.4", "--trials", "300", "--seed", "5"],
        vec!["fkgas"],
        vec!["fkgas", "--format", "csv", "--nu", "1,2"],
    ];
    for args in &commands {
        let a = mmot(args);
        let b = mmot(args);
        ensure(a.0 == 0, format!("{args:?} exited {}", a.0))?;
        ensure(a == b, format!("{args:?} differs between runs"))?;
    }
    Ok(format!("{} commands byte-identical across two runs", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("symmetric polytope (22 vertices, table match)", c1_symmetric_vertices),
        ("reduced polytope (8 extreme points)", c2_reduced_vertices),
        ("convex-combination identities", c3_identities),
        ("spring a = 3/4 counterexample", c4_example_1_1),
        ("FK sweep crossing", c5_sweep),
        ("Monge polytope", c6_monge_polytope),
        ("gallery", c7_gallery),
        ("Birkhoff-von Neumann", c8_birkhoff),
        ("N = 3, l = 2 segment", c9_two_site_segment),
        ("FK gas", c10_fkgas),
        ("CLI determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (label, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {label}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {label}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
