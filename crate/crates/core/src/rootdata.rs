//! Roots, parabolics and weight dictionaries for split SO(n+1,n) and SO(n,n).
//!
//! Half-integral vectors are stored doubled so every pairing is integer
//! arithmetic.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Series {
    B,
    D,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootError {
    RankOutOfRange { series: Series, n: usize },
    NotRegular(Vec<i64>),
    OutOfRange(String),
    NotDominant(Vec<i64>),
    BadLabel(Vec<i64>),
}

impl fmt::Display for RootError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootError::RankOutOfRange { series, n } => write!(f, "rank {} unsupported for series {:?}", n, series),
            RootError::NotRegular(v) => write!(f, "weight {:?} (doubled) is not regular", v),
            RootError::OutOfRange(m) => write!(f, "{}", m),
            RootError::NotDominant(v) => write!(f, "weight {:?} is not dominant", v),
            RootError::BadLabel(v) => write!(f, "{:?} is not a valid infinitesimal-character label", v),
        }
    }
}

/// Vector of half-integers in the e-basis, entry i holding twice coordinate i.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfIntVector {
    pub doubled: Vec<i64>,
}

impl HalfIntVector {
    pub fn from_doubled(doubled: Vec<i64>) -> Self {
        HalfIntVector { doubled }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        HalfIntVector { doubled: v.iter().map(|x| 2 * x).collect() }
    }

    pub fn zero(n: usize) -> Self {
        HalfIntVector { doubled: vec![0; n] }
    }

    pub fn unit(n: usize, i: usize, sign: i64) -> Self {
        let mut v = Self::zero(n);
        v.doubled[i] = 2 * sign;
        v
    }

    pub fn len(&self) -> usize {
        self.doubled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doubled.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        HalfIntVector { doubled: self.doubled.iter().zip(&o.doubled).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        HalfIntVector { doubled: self.doubled.iter().zip(&o.doubled).map(|(a, b)| a - b).collect() }
    }

    /// Coordinate i as an exact rational.
    pub fn coord(&self, i: usize) -> Ratio<i64> {
        Ratio::new(self.doubled[i], 2)
    }

    /// Natural pairing with an integral cocharacter Σ c_i f_i.
    pub fn pair(&self, cochar: &[i64]) -> Ratio<i64> {
        Ratio::new(self.doubled.iter().zip(cochar).map(|(a, b)| a * b).sum(), 2)
    }

    pub fn is_integral(&self) -> bool {
        self.doubled.iter().all(|x| x % 2 == 0)
    }

    /// Dominance for the standard positive systems of B_n and D_n.
    pub fn is_dominant(&self, series: Series) -> bool {
        let v = &self.doubled;
        let n = v.len();
        let decreasing = v.windows(2).take(n.saturating_sub(1)).all(|w| w[0] >= w[1]);
        match series {
            Series::B => decreasing && v.last().map_or(true, |&x| x >= 0),
            Series::D => {
                if n < 2 {
                    return true;
                }
                v[..n - 1].windows(2).all(|w| w[0] >= w[1]) && v[n - 2] >= v[n - 1].abs()
            }
        }
    }

    /// Trivial stabilizer in the Weyl group: no pairing with a coroot is 0.
    pub fn is_regular(&self, series: Series) -> bool {
        positive_roots(series, self.len()).iter().all(|r| self.pair(&coroot(series, r)) != Ratio::from_integer(0))
    }
}

impl fmt::Display for HalfIntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.doubled.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if x % 2 == 0 {
                write!(f, "{}", x / 2)?;
            } else {
                write!(f, "{}/2", x)?;
            }
        }
        write!(f, ")")
    }
}

/// Positive roots for the orderings used throughout: B_n adds the short
/// roots e_i, D_n does not.
pub fn positive_roots(series: Series, n: usize) -> Vec<HalfIntVector> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push(HalfIntVector::unit(n, i, 1).sub(&HalfIntVector::unit(n, j, 1)));
            out.push(HalfIntVector::unit(n, i, 1).add(&HalfIntVector::unit(n, j, 1)));
        }
        if series == Series::B {
            out.push(HalfIntVector::unit(n, i, 1));
        }
    }
    out
}

pub fn simple_roots(series: Series, n: usize) -> Vec<HalfIntVector> {
    let mut out: Vec<HalfIntVector> =
        (0..n.saturating_sub(1)).map(|i| HalfIntVector::unit(n, i, 1).sub(&HalfIntVector::unit(n, i + 1, 1))).collect();
    match series {
        Series::B => out.push(HalfIntVector::unit(n, n - 1, 1)),
        Series::D => out.push(HalfIntVector::unit(n, n - 2, 1).add(&HalfIntVector::unit(n, n - 1, 1))),
    }
    out
}

/// Coroot in the f-basis: γ for long roots, 2γ for the short roots of B_n.
pub fn coroot(series: Series, root: &HalfIntVector) -> Vec<i64> {
    let nz = root.doubled.iter().filter(|&&x| x != 0).count();
    let short = series == Series::B && nz == 1;
    root.doubled.iter().map(|&x| if short { x } else { x / 2 }).collect()
}

/// Coefficients of a root in the simple-root basis.
pub fn simple_coefficients(series: Series, root: &HalfIntVector) -> Vec<i64> {
    let v: Vec<i64> = root.doubled.iter().map(|x| x / 2).collect();
    let n = v.len();
    let mut c = vec![0i64; n];
    let mut acc = 0;
    match series {
        Series::B => {
            for i in 0..n {
                acc += v[i];
                c[i] = acc;
            }
        }
        Series::D => {
            for i in 0..n - 2 {
                acc += v[i];
                c[i] = acc;
            }
            c[n - 1] = (v[n - 2] + v[n - 1] + acc) / 2;
            c[n - 2] = (v[n - 2] - v[n - 1] + acc) / 2;
        }
    }
    c
}

pub fn rho_g(series: Series, n: usize) -> Result<HalfIntVector, RootError> {
    check_rank(series, n)?;
    Ok(match series {
        Series::B => HalfIntVector::from_doubled((0..n).map(|i| (2 * (n - i) - 1) as i64).collect()),
        Series::D => HalfIntVector::from_doubled((0..n).map(|i| (2 * (n - 1 - i)) as i64).collect()),
    })
}

fn check_rank(series: Series, n: usize) -> Result<(), RootError> {
    let ok = match series {
        Series::B => (1..=64).contains(&n),
        Series::D => (3..=64).contains(&n),
    };
    if ok {
        Ok(())
    } else {
        Err(RootError::RankOutOfRange { series, n })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParabolicData {
    pub series: Series,
    pub rank: usize,
    /// Index of the removed simple root.
    pub removed: usize,
    pub alpha: HalfIntVector,
    pub phi_n: Vec<HalfIntVector>,
    /// phi_n_layers[i-1] holds the roots with ⟨α̃, γ̌⟩ = i.
    pub phi_n_layers: Vec<Vec<HalfIntVector>>,
    pub rho_p: HalfIntVector,
    pub alpha_tilde: HalfIntVector,
    /// ⟨ρ_P, α̌⟩ as (numerator, denominator).
    pub pairing_value: (i64, i64),
}

/// The maximal parabolic dropping e₁−e₂ (series B; e₁ when n = 1) or
/// e₂−e₃ (series D).
pub fn parabolic_data(series: Series, n: usize) -> Result<ParabolicData, RootError> {
    check_rank(series, n)?;
    let removed = match series {
        Series::B => 0,
        Series::D => 1,
    };
    let alpha = simple_roots(series, n)[removed].clone();
    let phi_n: Vec<HalfIntVector> = positive_roots(series, n)
        .into_iter()
        .filter(|r| simple_coefficients(series, r)[removed] != 0)
        .collect();
    let sum = phi_n.iter().fold(HalfIntVector::zero(n), |a, r| a.add(r));
    // half-sum: the doubled encoding of Σγ/2 is Σγ's integer coordinates
    let rho_p = HalfIntVector::from_doubled(sum.doubled.iter().map(|x| x / 2).collect());
    let (pairing, alpha_tilde) = if series == Series::B && n == 1 {
        // α = e₁ is short here; keep α̃ = e₁ so that e₁ sits in layer 2
        (Ratio::new(1, 2), HalfIntVector::unit(1, 0, 1))
    } else {
        let pv = rho_p.pair(&coroot(series, &alpha));
        let at: Vec<i64> = rho_p.doubled.iter().map(|&x| (Ratio::from_integer(x) / pv).to_integer()).collect();
        (pv, HalfIntVector::from_doubled(at))
    };
    let mut layers = vec![Vec::new(), Vec::new()];
    for r in &phi_n {
        let i = alpha_tilde.pair(&coroot(series, r));
        let i = i.to_integer();
        assert!(i == 1 || i == 2, "layer index {} outside {{1,2}}", i);
        layers[(i - 1) as usize].push(r.clone());
    }
    Ok(ParabolicData {
        series,
        rank: n,
        removed,
        alpha,
        phi_n,
        phi_n_layers: layers,
        rho_p,
        alpha_tilde,
        pairing_value: (*pairing.numer(), *pairing.denom()),
    })
}

/// Infinitesimal-character label, the doubled coordinates in decreasing
/// order (Δ subscripts).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CRLabel {
    pub weights: Vec<i64>,
}

impl CRLabel {
    /// Strictly decreasing, one parity throughout, positive except that an
    /// even label may end in 0.
    pub fn new(weights: Vec<i64>) -> Result<Self, RootError> {
        let ok = !weights.is_empty()
            && weights.windows(2).all(|w| w[0] > w[1])
            && weights.iter().all(|w| (w - weights[0]) % 2 == 0)
            && weights.iter().all(|&w| w > 0 || (w == 0 && weights[0] % 2 == 0));
        if ok {
            Ok(CRLabel { weights })
        } else {
            Err(RootError::BadLabel(weights))
        }
    }

    /// Sort decreasing then validate.
    pub fn canonical(mut weights: Vec<i64>) -> Result<Self, RootError> {
        weights.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(weights)
    }

    /// Δ_{25,17,11} style rendering.
    pub fn delta(&self) -> String {
        let parts: Vec<String> = self.weights.iter().map(|w| format!("{}", w)).collect();
        format!("Δ_{{{}}}", parts.join(","))
    }

    pub fn as_vector(&self) -> HalfIntVector {
        HalfIntVector::from_doubled(self.weights.clone())
    }
}

impl fmt::Display for CRLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.delta())
    }
}

/// Genus-2 weight (j,k) to Δ_{j+2k−3, j+1}.
pub fn jk_to_cr(j: i64, k: i64) -> Result<CRLabel, RootError> {
    if j < 0 || j % 2 != 0 || k < 3 {
        return Err(RootError::OutOfRange(format!("(j,k) = ({},{}) needs j even ≥ 0 and k ≥ 3", j, k)));
    }
    let a = j + 2 * k - 3;
    let b = j + 1;
    if a == b {
        return Err(RootError::NotRegular(vec![a, b]));
    }
    CRLabel::new(vec![a, b])
}

/// Δ_{j+2k−3, j+1, 2s} for 1/2 < s < (j+1)/2; `two_s` is 2s.
pub fn so43_target(j: i64, k: i64, two_s: i64) -> Result<CRLabel, RootError> {
    let base = jk_to_cr(j, k)?;
    if two_s % 2 == 0 || two_s <= 1 || two_s >= j + 1 {
        return Err(RootError::OutOfRange(format!("s = {}/2 outside the critical range (1/2, {}/2)", two_s, j + 1)));
    }
    let mut w = base.weights;
    if w.contains(&two_s) {
        return Err(RootError::NotRegular(w));
    }
    w.push(two_s);
    CRLabel::new(w)
}

/// Doubled infinitesimal character (ℓ+m−2, k−1+2s, k−1−2s, |ℓ−m|) sorted.
pub fn so44_target(k: i64, l: i64, m: i64, two_s: i64) -> Result<CRLabel, RootError> {
    let a1 = l + m - 2;
    let a2 = (l - m).abs();
    let kk = k - 1;
    let bound = (a1 - kk).min(kk - a2);
    if two_s % 2 == 0 || two_s <= 1 || two_s >= bound {
        return Err(RootError::OutOfRange(format!(
            "s = {}/2 outside (1/2, {}/2) for (k,ℓ,m) = ({},{},{})",
            two_s, bound, k, l, m
        )));
    }
    let w = vec![a1, kk + two_s, kk - two_s, a2];
    let mut sorted = w.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != 4 {
        return Err(RootError::NotRegular(w));
    }
    CRLabel::canonical(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompactGroup {
    SO7,
    SO8,
}

/// doubled(μ + ρ) for a dominant integral highest weight μ.
pub fn mu_plus_rho(group: CompactGroup, mu: &[i64]) -> Result<CRLabel, RootError> {
    let (series, n) = match group {
        CompactGroup::SO7 => (Series::B, 3),
        CompactGroup::SO8 => (Series::D, 4),
    };
    let v = HalfIntVector::from_ints(mu);
    if mu.len() != n || !v.is_dominant(series) || mu.iter().any(|&x| x < 0) {
        return Err(RootError::NotDominant(mu.to_vec()));
    }
    let s = v.add(&rho_g(series, n)?);
    if !s.is_regular(series) {
        return Err(RootError::NotRegular(s.doubled));
    }
    CRLabel::new(s.doubled)
}

/// One row of the ⟨λ + sα̃, γ̌⟩ table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingRow {
    pub root: String,
    pub coroot: String,
    pub pairing: String,
    pub satake: String,
    pub layer: u8,
}

fn vec_string(coeffs: &[(i64, String)], unit2: &str) -> String {
    let mut out = String::new();
    for (c, name) in coeffs {
        if *c == 0 {
            continue;
        }
        let sign = if *c < 0 { "-" } else if out.is_empty() { "" } else { "+" };
        let mag = c.abs();
        if mag == 1 {
            out.push_str(&format!("{}{}", sign, name));
        } else {
            out.push_str(&format!("{}{}{}", sign, mag, name));
        }
    }
    if out.is_empty() {
        String::from(unit2)
    } else {
        out
    }
}

impl ParabolicData {
    /// Coordinate offset where λ's a_j start (e₂ for B, e₃ for D).
    fn tail(&self) -> usize {
        match self.series {
            Series::B => 1,
            Series::D => 2,
        }
    }

    /// Pairing rows, concrete (`generic = false`) or with the tail index
    /// written as j and rows of the same shape merged.
    pub fn pairing_table(&self, generic: bool) -> Vec<PairingRow> {
        let t = self.tail();
        let mut roots = self.phi_n.clone();
        let key = |r: &HalfIntVector| {
            let tail_pos = (t..r.len()).find(|&i| r.doubled[i] != 0);
            let head = (0..t).find(|&i| r.doubled[i] != 0).unwrap_or(0);
            match tail_pos {
                Some(i) => (0, if r.doubled[i] < 0 { 0 } else { 1 }, head, i),
                None => (1, 0, head, 0),
            }
        };
        roots.sort_by_key(|r| key(r));
        let mut rows: Vec<PairingRow> = Vec::new();
        for r in &roots {
            let row = self.row(r, generic);
            if !rows.contains(&row) {
                rows.push(row);
            }
        }
        rows
    }

    fn row(&self, r: &HalfIntVector, generic: bool) -> PairingRow {
        let t = self.tail();
        let cr = coroot(self.series, r);
        let idx = |i: usize| -> String {
            if generic && i >= t {
                format!("j+{}", t)
            } else {
                format!("{}", i + 1)
            }
        };
        let aname = |i: usize| -> String {
            if generic {
                String::from("a_j")
            } else {
                format!("a_{}", i + 1 - t)
            }
        };
        let bname = |i: usize| -> String {
            if generic {
                String::from("β_j")
            } else {
                format!("β_{}", i + 1 - t)
            }
        };
        let fmt_vec = |v: &[i64], sym: char| -> String {
            let mut terms = Vec::new();
            for (i, &c) in v.iter().enumerate() {
                if c != 0 {
                    let b = idx(i);
                    let name = if b.len() == 1 { format!("{}_{}", sym, b) } else { format!("{}_{{{}}}", sym, b) };
                    terms.push((c, name));
                }
            }
            vec_string(&terms, "0")
        };
        let root = fmt_vec(&r.doubled.iter().map(|x| x / 2).collect::<Vec<_>>(), 'e');
        let coroot_s = fmt_vec(&cr, 'f');
        // λ + sα̃ coordinatewise as (κ, a, s) coefficients
        let mut kappa = 0;
        let mut s = 0;
        let mut terms_a: Vec<(i64, String)> = Vec::new();
        for (i, &c) in cr.iter().enumerate() {
            if c == 0 {
                continue;
            }
            s += c * self.alpha_tilde.doubled[i] / 2;
            if i >= t {
                terms_a.push((c, aname(i)));
            } else if self.series == Series::D {
                kappa += if i == 0 { c } else { -c };
            }
        }
        let mut terms = Vec::new();
        terms.push((kappa, String::from("(k-1)/2")));
        terms.extend(terms_a);
        terms.push((s, String::from("s")));
        let pairing = vec_string(&terms, "0");
        // Satake value Π α_p^(c1−c2) Π β^(c_tail)
        let mut sat = String::new();
        if self.series == Series::D {
            match cr[0] - cr[1] {
                0 => {}
                1 => sat.push_str("α_p"),
                e => sat.push_str(&format!("α_p^{{{}}}", e)),
            }
        }
        for (i, &c) in cr.iter().enumerate().skip(t) {
            match c {
                0 => {}
                1 => sat.push_str(&bname(i)),
                e => sat.push_str(&format!("{}^{{{}}}", bname(i), e)),
            }
        }
        if sat.is_empty() {
            sat.push('1');
        }
        let layer = self.alpha_tilde.pair(&cr).to_integer() as u8;
        PairingRow { root, coroot: coroot_s, pairing, satake: sat, layer }
    }

    /// Markdown rendering of the pairing table.
    pub fn pairing_markdown(&self, generic: bool) -> String {
        let mut s = String::from("| γ ∈ Φ_N | γ̌ | ⟨λ+sα̃,γ̌⟩ | Satake value | layer |\n|---|---|---|---|---|\n");
        for r in self.pairing_table(generic) {
            s.push_str(&format!("| {} | {} | {} | {} | {} |\n", r.root, r.coroot, r.pairing, r.satake, r.layer));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn b3() {
        let d = parabolic_data(Series::B, 3).unwrap();
        assert_eq!(d.phi_n.len(), 5);
        assert_eq!(d.rho_p, HalfIntVector::from_doubled(vec![5, 0, 0]));
        assert_eq!(d.pairing_value, (5, 2));
        assert_eq!(d.alpha_tilde, HalfIntVector::from_ints(&[1, 0, 0]));
        assert_eq!(d.phi_n_layers[1], vec![HalfIntVector::from_ints(&[1, 0, 0])]);
    }

    #[test]
    fn b1_and_d4() {
        let d = parabolic_data(Series::B, 1).unwrap();
        assert_eq!(d.phi_n, vec![HalfIntVector::from_ints(&[1])]);
        assert!(d.phi_n_layers[0].is_empty());
        let d = parabolic_data(Series::D, 4).unwrap();
        assert_eq!(d.phi_n.len(), 9);
        assert_eq!(d.rho_p, HalfIntVector::from_doubled(vec![5, 5, 0, 0]));
        assert_eq!(d.alpha_tilde, HalfIntVector::from_ints(&[1, 1, 0, 0]));
        assert_eq!(d.phi_n_layers[1], vec![HalfIntVector::from_ints(&[1, 1, 0, 0])]);
        assert!(parabolic_data(Series::D, 2).is_err());
    }

    #[test]
    fn rho() {
        assert_eq!(rho_g(Series::B, 3).unwrap().to_string(), "(5/2, 3/2, 1/2)");
        assert_eq!(rho_g(Series::D, 4).unwrap().to_string(), "(3, 2, 1, 0)");
        assert_eq!(rho_g(Series::B, 1).unwrap().to_string(), "(1/2)");
    }

    #[test]
    fn labels() {
        assert_eq!(jk_to_cr(10, 9).unwrap().weights, vec![25, 11]);
        assert_eq!(jk_to_cr(4, 10).unwrap().weights, vec![21, 5]);
        assert_eq!(so43_target(16, 6, 11).unwrap().weights, vec![25, 17, 11]);
        assert_eq!(so43_target(12, 7, 5).unwrap().weights, vec![23, 13, 5]);
        assert!(so43_target(16, 6, 17).is_err());
        assert!(so43_target(16, 6, 1).is_err());
        assert_eq!(so44_target(18, 12, 20, 3).unwrap().weights, vec![30, 20, 14, 8]);
        assert_eq!(so44_target(22, 12, 20, 5).unwrap().weights, vec![30, 26, 16, 8]);
        assert_eq!(so44_target(16, 12, 20, 5).unwrap().weights, vec![30, 20, 10, 8]);
        assert_eq!(mu_plus_rho(CompactGroup::SO8, &[10, 10, 6, 2]).unwrap().weights, vec![26, 24, 14, 4]);
        assert_eq!(mu_plus_rho(CompactGroup::SO7, &[0, 0, 0]).unwrap().weights, vec![5, 3, 1]);
        assert!(mu_plus_rho(CompactGroup::SO7, &[1, 2, 0]).is_err());
    }

    #[test]
    fn generic_tables() {
        let b = parabolic_data(Series::B, 3).unwrap().pairing_table(true);
        let got: Vec<(&str, &str, &str, &str)> =
            b.iter().map(|r| (r.root.as_str(), r.coroot.as_str(), r.pairing.as_str(), r.satake.as_str())).collect();
        assert_eq!(
            got,
            vec![
                ("e_1-e_{j+1}", "f_1-f_{j+1}", "-a_j+s", "β_j^{-1}"),
                ("e_1+e_{j+1}", "f_1+f_{j+1}", "a_j+s", "β_j"),
                ("e_1", "2f_1", "2s", "1"),
            ]
        );
        let d = parabolic_data(Series::D, 4).unwrap().pairing_table(true);
        let got: Vec<(&str, &str)> = d.iter().map(|r| (r.root.as_str(), r.pairing.as_str())).collect();
        assert_eq!(
            got,
            vec![
                ("e_1-e_{j+2}", "(k-1)/2-a_j+s"),
                ("e_2-e_{j+2}", "-(k-1)/2-a_j+s"),
                ("e_1+e_{j+2}", "(k-1)/2+a_j+s"),
                ("e_2+e_{j+2}", "-(k-1)/2+a_j+s"),
                ("e_1+e_2", "2s"),
            ]
        );
    }
}
