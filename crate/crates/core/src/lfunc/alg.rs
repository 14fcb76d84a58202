//! Exact side of the critical-value identities and the bundled tables of
//! algebraic parts.

use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Deserialize;

use super::LError;
use crate::exact::parse_rational;

pub const APPENDIX_JSON: &str = include_str!("../../data/appendix_tables.json");
pub const FIXTURES_JSON: &str = include_str!("../../data/lfunc_fixtures.json");

fn gamma_int(n: i64) -> BigInt {
    (1..n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// 2^(4(l1−l2)) Γ(l2)Π_iΓ(l2−k_i+1) / (Γ(l1)Π_iΓ(l1−k_i+1)).
pub fn gamma_quotient(l1: i64, l2: i64, k1: i64, k2: i64, k3: i64) -> Result<BigRational, LError> {
    let args = |l: i64| [l, l - k1 + 1, l - k2 + 1, l - k3 + 1];
    for x in args(l1).iter().chain(args(l2).iter()) {
        if *x < 1 {
            return Err(LError::Range(alloc::format!("Γ({}) at a nonpositive integer", x)));
        }
    }
    let prod = |l: i64| args(l).iter().fold(BigInt::one(), |acc, &x| acc * gamma_int(x));
    let e = 4 * (l1 - l2);
    let two = if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    };
    Ok(two * BigRational::new(prod(l2), prod(l1)))
}

/// (L_alg(l1)/L_alg(l2))·gamma_quotient, the predicted value of
/// L(l1)/(π^(4(l1−l2))L(l2)).
pub fn alg_ratio_identity(
    l1: i64,
    l2: i64,
    ks: [i64; 3],
    lalg_l1: &BigRational,
    lalg_l2: &BigRational,
) -> Result<BigRational, LError> {
    if lalg_l2.is_zero() {
        return Err(LError::ZeroDenominator(BigRational::from_integer(BigInt::from(l2))));
    }
    Ok(lalg_l1 / lalg_l2 * gamma_quotient(l1, l2, ks[0], ks[1], ks[2])?)
}

/// s = (k1 + k2 + k3 + r)/2 − 2.
pub fn critical_point(ks: [i64; 3], r: i64) -> i64 {
    (ks.iter().sum::<i64>() + r) / 2 - 2
}

#[derive(Clone, Debug)]
pub struct AppendixRow {
    pub r: i64,
    pub s: i64,
    pub lalg: BigRational,
    pub factored: String,
}

#[derive(Clone, Debug)]
pub struct AppendixTable {
    /// Weights as printed, increasing.
    pub forms: [i64; 3],
    pub rows: Vec<AppendixRow>,
    pub src: String,
}

impl AppendixTable {
    /// Weights in decreasing order, as the triple kind expects.
    pub fn weights_desc(&self) -> [i64; 3] {
        let mut w = self.forms;
        w.sort_unstable_by(|a, b| b.cmp(a));
        w
    }

    /// Consecutive rows (r, r+2) as (upper, lower).
    pub fn pairs(&self) -> impl Iterator<Item = (&AppendixRow, &AppendixRow)> {
        self.rows.windows(2).map(|w| (&w[1], &w[0]))
    }
}

#[derive(Deserialize)]
struct RowWire {
    r: i64,
    s: i64,
    lalg: String,
    factored: String,
}

#[derive(Deserialize)]
struct TableWire {
    forms: [i64; 3],
    rows: Vec<RowWire>,
    src: String,
}

pub fn appendix_tables() -> Vec<AppendixTable> {
    let w: Vec<TableWire> = serde_json::from_str(APPENDIX_JSON).expect("bundled tables parse");
    w.into_iter()
        .map(|t| AppendixTable {
            forms: t.forms,
            rows: t
                .rows
                .into_iter()
                .map(|r| AppendixRow {
                    r: r.r,
                    s: r.s,
                    lalg: parse_rational(&r.lalg).expect("bundled rational"),
                    factored: r.factored,
                })
                .collect(),
            src: t.src,
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct SpinorRatio {
    /// Half-integer s; the ratio is L(w/2+s+1)/(π⁴L(w/2+s−1)).
    pub s: BigRational,
    pub ratio: BigRational,
}

#[derive(Clone, Debug)]
pub struct SpinorTable {
    pub j: u32,
    pub k: u32,
    pub space: String,
    pub rows: Vec<SpinorRatio>,
    pub src: String,
}

impl SpinorTable {
    /// The evaluation points (t1, t2) for a row.
    pub fn points(&self, row: &SpinorRatio) -> (BigRational, BigRational) {
        let w = (self.j + 2 * self.k - 3) as i64;
        let mid = BigRational::new(BigInt::from(w), BigInt::from(2)) + &row.s;
        let one = BigRational::one();
        (&mid + &one, &mid - &one)
    }
}

#[derive(Deserialize)]
struct SpinorRowWire {
    s: String,
    ratio: String,
}

#[derive(Deserialize)]
struct SpinorWire {
    j: u32,
    k: u32,
    space: String,
    rows: Vec<SpinorRowWire>,
    src: String,
}

#[derive(Deserialize)]
pub struct SignConvention {
    pub kind: String,
    pub sign: serde_json::Value,
    pub src: String,
}

#[derive(Deserialize)]
pub struct Reference {
    pub j: u32,
    pub k: u32,
    pub t1: i64,
    pub t2: i64,
    pub decimal: String,
    pub coeffs_required_30: usize,
    pub src: String,
}

#[derive(Deserialize)]
struct FixturesWire {
    signs: Vec<SignConvention>,
    spinor_ratios: Vec<SpinorWire>,
    spinor_reference: Reference,
}

pub struct Fixtures {
    pub signs: Vec<SignConvention>,
    pub spinor: Vec<SpinorTable>,
    pub reference: Reference,
}

pub fn fixtures() -> Fixtures {
    let w: FixturesWire = serde_json::from_str(FIXTURES_JSON).expect("bundled fixtures parse");
    let spinor = w
        .spinor_ratios
        .into_iter()
        .map(|t| SpinorTable {
            j: t.j,
            k: t.k,
            space: t.space,
            rows: t
                .rows
                .into_iter()
                .map(|r| SpinorRatio {
                    s: parse_rational(&r.s).expect("bundled rational"),
                    ratio: parse_rational(&r.ratio).expect("bundled rational"),
                })
                .collect(),
            src: t.src,
        })
        .collect();
    Fixtures { signs: w.signs, spinor, reference: w.spinor_reference }
}
