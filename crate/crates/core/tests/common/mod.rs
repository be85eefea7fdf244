#![allow(dead_code)]

use mmot_geometry::exact::{rat, Rational};
use mmot_geometry::plans::{Dims, MultiIndex, SymmetricPlan};

pub struct GoldenRow {
    pub name: &'static str,
    /// `(sorted 1-based index, coefficient of S delta_index)`.
    pub terms: &'static [(&'static str, (i64, i64))],
    pub symmetrized_monge: bool,
    pub marginal_extreme: bool,
}

macro_rules! row {
    ($name:expr, $monge:expr, $ext:expr, [$(($idx:expr, $p:expr, $q:expr)),* $(,)?]) => {
        GoldenRow { name: $name, terms: &[$(($idx, ($p, $q))),*], symmetrized_monge: $monge, marginal_extreme: $ext }
    };
}

/// The 22 vertices of the symmetric polytope for N = l = 3, transcribed from the
/// reference table (coefficients of the symmetrized Dirac masses).
pub const TABLE: [GoldenRow; 22] = [
    row!("Id", true, true, [("111", 1, 3), ("222", 1, 3), ("333", 1, 3)]),
    row!("T12", true, true, [("333", 1, 3), ("112", 1, 3), ("122", 1, 3)]),
    row!("T13", true, true, [("222", 1, 3), ("113", 1, 3), ("133", 1, 3)]),
    row!("T23", true, true, [("111", 1, 3), ("223", 1, 3), ("233", 1, 3)]),
    row!("F112", false, true, [("112", 1, 2), ("233", 1, 2)]),
    row!("F113", false, true, [("113", 1, 2), ("223", 1, 2)]),
    row!("F122", false, true, [("122", 1, 2), ("133", 1, 2)]),
    row!("C", true, true, [("123", 1, 1)]),
    row!("K233,111", false, false, [("233", 1, 2), ("111", 1, 3), ("222", 1, 6)]),
    row!("K133,222", false, false, [("133", 1, 2), ("222", 1, 3), ("111", 1, 6)]),
    row!("K122,333", false, false, [("122", 1, 2), ("333", 1, 3), ("111", 1, 6)]),
    row!("K223,111", false, false, [("223", 1, 2), ("111", 1, 3), ("333", 1, 6)]),
    row!("K113,222", false, false, [("113", 1, 2), ("222", 1, 3), ("333", 1, 6)]),
    row!("K112,333", false, false, [("112", 1, 2), ("333", 1, 3), ("222", 1, 6)]),
    row!("K112,223", false, false, [("112", 1, 2), ("223", 1, 4), ("333", 1, 4)]),
    row!("K113,233", false, false, [("113", 1, 2), ("233", 1, 4), ("222", 1, 4)]),
    row!("K223,133", false, false, [("223", 1, 2), ("133", 1, 4), ("111", 1, 4)]),
    row!("K122,113", false, false, [("122", 1, 2), ("113", 1, 4), ("333", 1, 4)]),
    row!("K133,112", false, false, [("133", 1, 2), ("112", 1, 4), ("222", 1, 4)]),
    row!("K233,122", false, false, [("233", 1, 2), ("122", 1, 4), ("111", 1, 4)]),
    row!("Id,C", true, false, [("112", 1, 3), ("133", 1, 3), ("223", 1, 3)]),
    row!("Id,C′", true, false, [("113", 1, 3), ("122", 1, 3), ("233", 1, 3)]),
];

pub fn d33() -> Dims {
    Dims::new(3, 3).unwrap()
}

pub fn index(digits: &str) -> MultiIndex {
    let v: Vec<usize> = digits.bytes().map(|b| (b - b'0') as usize).collect();
    MultiIndex::from_one_based(&v, Dims::new(v.len(), 9).unwrap()).unwrap()
}

pub fn golden_plan(row: &GoldenRow) -> SymmetricPlan {
    let terms: Vec<(Vec<usize>, Rational)> = row
        .terms
        .iter()
        .map(|(idx, (p, q))| (idx.bytes().map(|b| (b - b'0') as usize).collect(), rat(*p, *q)))
        .collect();
    SymmetricPlan::from_one_based(d33(), &terms).unwrap()
}

pub fn golden(name: &str) -> SymmetricPlan {
    golden_plan(TABLE.iter().find(|r| r.name == name).expect("known name"))
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}
