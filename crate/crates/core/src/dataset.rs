//! Registry of Hecke eigenvalues and traces keyed by (space, operator, index).

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// The records printed in the tables, bundled at compile time.
pub const BUNDLED_JSONL: &str = include_str!("../data/hecke_tables.jsonl");
pub const BUNDLED_NAME: &str = "bundled:hecke_tables.jsonl";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Tp,
    Tp2,
    Tpp,
    TrTp,
    TrTpSquared,
    Composite,
    LambdaP2,
}

impl Op {
    pub const ALL: [Op; 7] = [Op::Tp, Op::Tp2, Op::Tpp, Op::TrTp, Op::TrTpSquared, Op::Composite, Op::LambdaP2];

    pub fn as_str(self) -> &'static str {
        match self {
            Op::Tp => "T(p)",
            Op::Tp2 => "T(p^2)",
            Op::Tpp => "T(p,p)",
            Op::TrTp => "trT(p)",
            Op::TrTpSquared => "trT(p^2_derived)",
            Op::Composite => "composite",
            Op::LambdaP2 => "lambda(p^2)",
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Op {
    type Err = String;
    fn from_str(s: &str) -> Result<Op, String> {
        Op::ALL.iter().copied().find(|o| o.as_str() == s).ok_or_else(|| {
            let names: Vec<&str> = Op::ALL.iter().map(|o| o.as_str()).collect();
            alloc::format!("unknown operator {:?}; expected one of {}", s, names.join(", "))
        })
    }
}

impl Serialize for Op {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Op {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Op, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeRecord {
    pub space: String,
    pub op: Op,
    pub n: u64,
    pub value: BigInt,
    pub src: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire {
    space: String,
    op: Op,
    n: u64,
    value: String,
    src: String,
}

impl HeckeRecord {
    pub fn to_json_line(&self) -> String {
        let w = Wire {
            space: self.space.clone(),
            op: self.op,
            n: self.n,
            value: self.value.to_string(),
            src: self.src.clone(),
        };
        serde_json::to_string(&w).expect("record serializes")
    }
}

pub type Key = (String, Op, u64);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DataError {
    Parse { source: String, line: usize, msg: String },
    Conflict { key: Key, first: (BigInt, String), second: (BigInt, String) },
}

impl fmt::Display for DataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataError::Parse { source, line, msg } => write!(f, "{}:{}: {}", source, line, msg),
            DataError::Conflict { key, first, second } => write!(
                f,
                "conflicting values for ({}, {}, {}): {} [{}] vs {} [{}]",
                key.0, key.1, key.2, first.0, first.1, second.0, second.1
            ),
        }
    }
}

/// A lookup that found nothing. Never replaced by a default value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Miss {
    pub space: String,
    pub op: Op,
    pub n: u64,
}

impl fmt::Display for Miss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no record for {} {} at n = {}", self.space, self.op, self.n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub source: String,
    pub sha256: String,
    pub records: usize,
}

#[derive(Clone, Debug, Default)]
pub struct Dataset {
    records: BTreeMap<Key, HeckeRecord>,
    manifest: Vec<ManifestEntry>,
}

/// Parse JSON-lines text; blank lines and `#` comments are skipped.
pub fn parse_jsonl(text: &str, source: &str) -> Result<Vec<HeckeRecord>, DataError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let err = |msg: String| DataError::Parse { source: source.to_string(), line: i + 1, msg };
        let w: Wire = serde_json::from_str(t).map_err(|e| err(e.to_string()))?;
        let value: BigInt = w.value.trim().parse().map_err(|_| err(alloc::format!("value {:?} is not an integer", w.value)))?;
        if w.src.trim().is_empty() {
            return Err(err("empty provenance".to_string()));
        }
        if w.space.trim().is_empty() {
            return Err(err("empty space label".to_string()));
        }
        if w.n < 2 {
            return Err(err(alloc::format!("index {} is not a prime power", w.n)));
        }
        out.push(HeckeRecord { space: w.space, op: w.op, n: w.n, value, src: w.src });
    }
    Ok(out)
}

impl Dataset {
    pub fn new() -> Dataset {
        Dataset::default()
    }

    pub fn bundled() -> Dataset {
        let mut d = Dataset::new();
        d.add_source(BUNDLED_JSONL, BUNDLED_NAME, "").expect("bundled data is consistent");
        d
    }

    /// Merge the records of one source. On error nothing is inserted.
    pub fn add_source(&mut self, text: &str, source: &str, sha256: &str) -> Result<usize, DataError> {
        let recs = parse_jsonl(text, source)?;
        let mut staged: BTreeMap<Key, HeckeRecord> = BTreeMap::new();
        for r in recs {
            let key = (r.space.clone(), r.op, r.n);
            let prev = staged.get(&key).or_else(|| self.records.get(&key));
            if let Some(p) = prev {
                if p.value != r.value {
                    return Err(DataError::Conflict {
                        key,
                        first: (p.value.clone(), p.src.clone()),
                        second: (r.value, r.src),
                    });
                }
                continue;
            }
            staged.insert(key, r);
        }
        let n = staged.len();
        self.records.extend(staged);
        self.manifest.push(ManifestEntry { source: source.to_string(), sha256: sha256.to_string(), records: n });
        Ok(n)
    }

    pub fn insert(&mut self, r: HeckeRecord) -> Result<(), DataError> {
        let key = (r.space.clone(), r.op, r.n);
        match self.records.get(&key) {
            Some(p) if p.value != r.value => Err(DataError::Conflict {
                key,
                first: (p.value.clone(), p.src.clone()),
                second: (r.value, r.src),
            }),
            Some(_) => Ok(()),
            None => {
                self.records.insert(key, r);
                Ok(())
            }
        }
    }

    pub fn query(&self, space: &str, op: Op, n: u64) -> Result<&BigInt, Miss> {
        self.record(space, op, n).map(|r| &r.value)
    }

    pub fn record(&self, space: &str, op: Op, n: u64) -> Result<&HeckeRecord, Miss> {
        self.records
            .get(&(space.to_string(), op, n))
            .ok_or_else(|| Miss { space: space.to_string(), op, n })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &HeckeRecord> {
        self.records.values()
    }

    pub fn space_records<'a>(&'a self, space: &'a str) -> impl Iterator<Item = &'a HeckeRecord> {
        self.records.values().filter(move |r| r.space == space)
    }

    /// Distinct space labels with their record counts.
    pub fn spaces(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        for r in self.records.values() {
            match out.last_mut() {
                Some((s, c)) if *s == r.space => *c += 1,
                _ => out.push((r.space.clone(), 1)),
            }
        }
        out
    }

    pub fn manifest(&self) -> &[ManifestEntry] {
        &self.manifest
    }

    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for r in self.records.values() {
            s.push_str(&r.to_json_line());
            s.push('\n');
        }
        s
    }
}
