//! Acceptance criteria 1–11. Runs without the libtest harness so that one
//! PASS/FAIL line per criterion is always printed; exits non-zero if any fail.

use std::time::{Duration, Instant};

use eiscong::{run, Exit};
use eiscong_core::congruence::{self, bundled_cases, CheckOptions};
use eiscong_core::dataset::Dataset;
use eiscong_core::exact::{cf_expand, is_prime_u64, parse_decimal, parse_rational, BigInt, BigRational};
use eiscong_core::forms;
use eiscong_core::lfunc::{self, build_lspec, coeffs_required, evaluate, fe_residual, Evaluator, LKind};
use eiscong_core::mp::Float;
use eiscong_core::rootdata::{parabolic_data, HalfIntVector, Series};

// mpmath, 60 digits
const ZETA2: &str = "1.64493406684822643647241516664602518921894990120679843773556";
const ZETA4: &str = "1.08232323371113819151600369654116790277475095191872690768298";

type Verdict = Result<String, String>;

fn q(s: &str) -> BigRational {
    parse_rational(s).or_else(|| parse_decimal(s).ok().map(|d| d.value)).expect("rational literal")
}

fn rel_err(x: &Float, want: &BigRational) -> f64 {
    let p = x.prec() + 64;
    let w = Float::from_rational(want, p);
    (x.with_prec(p) - w.clone()).abs().to_f64() / w.to_f64().abs()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Instant, limit: Duration) -> Result<Duration, String> {
    let e = t.elapsed();
    ensure(e <= limit, format!("took {:.2?}, limit {:.0?}", e, limit))?;
    Ok(e)
}

fn c1() -> Verdict {
    let t = Instant::now();
    let want = [(12, -24), (16, 216), (18, -528), (20, 456), (22, -288), (26, -48)];
    for (k, a2) in want {
        let got = forms::ap(k, 2).map_err(|e| e.to_string())?;
        ensure(got == BigInt::from(a2), format!("a_2(f{}) = {}", k, got))?;
    }
    for (k, p, v) in [(20, 31, "-104626880141728"), (22, 43, "-193605854685795844"), (22, 73, "-43284759511102937494")] {
        let got = forms::ap(k, p).map_err(|e| e.to_string())?;
        ensure(got.to_string() == v, format!("a_{}(f{}) = {}", p, k, got))?;
    }
    let e = within(t, Duration::from_secs(1))?;
    Ok(format!("nine eigenvalues exact in {:.0?}", e))
}

fn c2() -> Verdict {
    let primes: Vec<u64> = (2..1000u64).filter(|&p| is_prime_u64(p)).collect();
    for &p in &primes {
        let tau = forms::ap(12, p).map_err(|e| e.to_string())?;
        let rhs = BigInt::from(1) + num_traits::pow(BigInt::from(p), 11);
        ensure(((tau - rhs) % 691u32) == BigInt::from(0), format!("fails at p = {}", p))?;
    }
    Ok(format!("{} primes below 1000", primes.len()))
}

const SUITE: [(&str, u64); 10] = [
    ("d25_17_11_mod47", 47),
    ("d25_15_5_mod19", 19),
    ("d23_13_5_mod19", 19),
    ("d25_15_9_mod557", 557),
    ("d25_19_13_mod31", 31),
    ("so8_30_20_14_8_mod31", 31),
    ("so8_30_26_16_8_mod73", 73),
    ("so8_28_24_18_6_mod43", 43),
    ("so8_30_20_10_8_mod19", 19),
    ("so8_26_24_14_4_mod19", 19),
];

fn c3() -> Verdict {
    let t = Instant::now();
    let data = Dataset::bundled();
    let cases = bundled_cases();
    let mut rows = 0;
    for (name, modulus) in SUITE {
        let c = cases.iter().find(|c| c.name == name).ok_or(format!("missing case {}", name))?;
        ensure(c.q == modulus, format!("{}: q = {}", name, c.q))?;
        let r = congruence::check(c, &data, CheckOptions::default()).map_err(|e| format!("{}: {}", name, e))?;
        ensure(r.verdict(), format!("{} fails at {:?}", name, r.failures()))?;
        ensure(r.printed_mismatches().is_empty(), format!("{} differs from the table at {:?}", name, r.printed_mismatches()))?;
        rows += r.rows.len();
    }
    let e = within(t, Duration::from_secs(5))?;
    Ok(format!("10 cases, {} primes, all divisible, in {:.2?}", rows, e))
}

fn c4() -> Verdict {
    let data = Dataset::bundled();
    let cases = bundled_cases();
    let want = [
        ("d25_17_3_sq_mod59", "-384 ± 192√79", "2^8·3^3·5^2·7^2·59"),
        ("d25_17_7_sq_mod1223", "2616 ± 216√641", "2^12·3^4·11·1223"),
        ("d25_19_5_sq_mod103", "3312 ± 240√865", "2^11·3^3·5^3·103"),
    ];
    for (name, pair, norm) in want {
        let c = cases.iter().find(|c| c.name == name).ok_or(format!("missing case {}", name))?;
        let r = congruence::check(c, &data, CheckOptions::default()).map_err(|e| format!("{}: {}", name, e))?;
        ensure(r.verdict(), format!("{} fails", name))?;
        let row = r.rows.iter().find(|r| r.p == 2).ok_or(format!("{}: no p = 2", name))?;
        ensure(row.lhs.render("±") == pair, format!("{}: pair {}", name, row.lhs.render("±")))?;
        let f = row.factorization.as_ref().ok_or(format!("{}: no factorization", name))?;
        let got = f.render("·", None);
        ensure(got.trim_start_matches('-') == norm, format!("{}: norm {}", name, got))?;
    }
    Ok("three pairs, norms and divisibility exact".into())
}

fn c5() -> Verdict {
    let t = Instant::now();
    let kind = LKind::triple(20, 16, 12);
    let l = build_lspec(&kind, 400, None).map_err(|e| e.to_string())?;
    let r = lfunc::eval::ratio(&l, &q("26"), &q("24"), 20).map_err(|e| e.to_string())?;
    let want = q("304/2149875");
    let err = rel_err(&r.value, &want);
    ensure(r.coeffs_used >= 400, format!("{} coefficients", r.coeffs_used))?;
    ensure(err < 1e-10, format!("relative error {:e}", err))?;
    let l8 = build_lspec(&kind, 800, None).map_err(|e| e.to_string())?;
    let fe = fe_residual(&l8, &[q("24"), q("26")], 30).map_err(|e| e.to_string())?;
    ensure(fe < 1e-20, format!("functional-equation residual {:e}", fe))?;
    let e = within(t, Duration::from_secs(60))?;
    Ok(format!("ratio error {:.1e} with {} coefficients, FE residual {:.1e}, {:.1?}", err, r.coeffs_used, fe, e))
}

fn c6() -> Verdict {
    let t = Instant::now();
    let o = run(["eiscong", "report", "appendix_sweep", "--out", "json"]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).map_err(|e| format!("report: {} {}", e, o.stderr))?;
    let pairs = v["pairs"].as_array().ok_or("no pairs")?;
    let mut worst = 0f64;
    for p in pairs {
        let err: f64 = p["rel_err"].as_str().and_then(|s| s.parse().ok()).ok_or("bad rel_err")?;
        worst = worst.max(err);
        ensure(p["pass"] == true, format!("{} s = {}, {}: error {:e}", p["forms"], p["s1"], p["s2"], err))?;
    }
    ensure(v["summary"]["tables"] == 20, "table count")?;
    ensure(pairs.len() == 61, format!("{} pairs", pairs.len()))?;
    ensure(o.code == Exit::Ok, format!("exit {:?}", o.code))?;
    let e = within(t, Duration::from_secs(15 * 60))?;
    Ok(format!("61 pairs over 20 tables, worst relative error {:.1e}, {:.1?}", worst, e))
}

fn c7() -> Verdict {
    let z = build_lspec(&LKind::Zeta, 8, None).map_err(|e| e.to_string())?;
    let mut worst = 0f64;
    for (s, want) in [("2", ZETA2), ("4", ZETA4)] {
        let r = evaluate(&z, &q(s), 30).map_err(|e| e.to_string())?;
        let err = rel_err(&r.value, &q(want));
        ensure(err < 1e-25, format!("zeta({}) error {:e}", s, err))?;
        worst = worst.max(err);
    }
    let sp = build_lspec(&LKind::Spinor { j: 16, k: 6 }, 10, Some(&Dataset::bundled())).map_err(|e| e.to_string())?;
    let n = coeffs_required(&sp, 30);
    ensure((115..=190).contains(&n), format!("coeffs_required = {}", n))?;
    Ok(format!("zeta errors ≤ {:.1e}, coeffs_required(spinor 16,6; 30 digits) = {}", worst, n))
}

fn c8() -> Verdict {
    let dec = "0.0100470823379774368182814145009";
    let o = run(["eiscong", "rationalize", "--decimal", dec]);
    ensure(o.code == Exit::Ok, format!("exit {:?}", o.code))?;
    ensure(o.stdout == "1880/187119 = 2^3·5·47 / (3^2·17·1223)\n", format!("printed {:?}", o.stdout))?;
    let cf = cf_expand(dec, 10).map_err(|e| e.0)?;
    let want: Vec<BigInt> = [0, 99, 1, 1, 7, 2, 6, 1, 6, 1].iter().map(|&x| BigInt::from(x)).collect();
    ensure(cf == want, format!("cf prefix {:?}", cf))?;
    Ok("1880/187119 = 2^3·5·47 / (3^2·17·1223), cf [0,99,1,1,7,2,6,1,6,1,…]".into())
}

fn c9() -> Verdict {
    let l = build_lspec(&LKind::Spinor { j: 16, k: 6 }, 300, Some(&Dataset::bundled())).map_err(|e| e.to_string())?;
    let r = lfunc::eval::ratio(&l, &q("19"), &q("17"), 20).map_err(|e| e.to_string())?;
    let width = 2.0 * r.relative_envelope();
    ensure(r.contains(&q("1880/187119")), format!("interval {} ± {:e} misses 1880/187119", r.value.to_sci(12), r.envelope))?;
    ensure(width < 1e-2, format!("relative width {:e}", width))?;
    Ok(format!("{} ± {:.2e}, relative width {:.2e}", r.value.to_sci(8), r.envelope, width))
}

/// xorshift64*; fixed seed keeps the run reproducible.
struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        self.0 ^= self.0 >> 12;
        self.0 ^= self.0 << 25;
        self.0 ^= self.0 >> 27;
        self.0.wrapping_mul(0x2545_f491_4f6c_dd1d)
    }

    fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }
}

fn c10() -> Verdict {
    let n = 400;
    let full = build_lspec(&LKind::triple(20, 16, 12), n, None).map_err(|e| e.to_string())?;
    let prime_powers: Vec<u64> = (2..=n as u64)
        .filter(|&m| {
            let p = (2..=m).find(|d| m % d == 0).unwrap();
            let mut r = m;
            while r % p == 0 {
                r /= p;
            }
            r == 1 && is_prime_u64(p)
        })
        .collect();
    let points = [q("24"), q("26")];
    let ev = Evaluator::new(&full, &points, 20).map_err(|e| e.to_string())?;
    let base: Vec<_> = points.iter().map(|s| ev.value(s)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let mut rng = Rng(0x9e37_79b9_7f4a_7c15);
    let mut tightest = f64::INFINITY;
    for trial in 0..50 {
        let k = 1 + rng.below(4);
        let mut hidden = Vec::new();
        while hidden.len() < k {
            let m = prime_powers[rng.below(prime_powers.len())];
            if !hidden.contains(&m) {
                hidden.push(m);
            }
        }
        let which = rng.below(2);
        let s = &points[which];
        let h = full.hide(&hidden).map_err(|e| e.to_string())?;
        let r = Evaluator::new(&h, std::slice::from_ref(s), 20).and_then(|e| e.value(s)).map_err(|e| e.to_string())?;
        let b = &base[which];
        let gap = (r.value.clone() - b.value.clone()).abs().to_f64();
        let allowed = r.envelope + b.envelope;
        ensure(gap <= allowed, format!("trial {} hiding {:?} at s = {}: gap {:e} > {:e}", trial, hidden, s, gap, allowed))?;
        if gap > 0.0 {
            tightest = tightest.min(allowed / gap);
        }
    }
    Ok(format!("50 hidings of 1–4 prime powers ≤ {}, smallest envelope/gap {:.1}", n, tightest))
}

fn c11() -> Verdict {
    let v = |x: &[i64]| HalfIntVector::from_ints(x);
    let b = parabolic_data(Series::B, 3).map_err(|e| e.to_string())?;
    let mut phi_b = vec![v(&[1, -1, 0]), v(&[1, 0, -1]), v(&[1, 0, 0]), v(&[1, 1, 0]), v(&[1, 0, 1])];
    let mut got = b.phi_n.clone();
    phi_b.sort();
    got.sort();
    ensure(got == phi_b, "B3 Φ_N")?;
    ensure(b.rho_p == HalfIntVector::from_doubled(vec![5, 0, 0]), "B3 ρ_P")?;
    ensure(b.alpha_tilde == v(&[1, 0, 0]), "B3 α̃")?;
    ensure(b.pairing_value == (5, 2), "B3 ⟨ρ_P, α̌⟩")?;
    ensure(b.phi_n_layers[1] == vec![v(&[1, 0, 0])] && b.phi_n_layers[0].len() == 4, "B3 layers")?;

    let d = parabolic_data(Series::D, 4).map_err(|e| e.to_string())?;
    let mut phi_d = Vec::new();
    for head in [[1, 0], [0, 1]] {
        for j in 2..4 {
            for sign in [-1, 1] {
                let mut x = vec![head[0], head[1], 0, 0];
                x[j] = sign;
                phi_d.push(v(&x));
            }
        }
    }
    phi_d.push(v(&[1, 1, 0, 0]));
    phi_d.sort();
    let mut got = d.phi_n.clone();
    got.sort();
    ensure(got == phi_d, "D4 Φ_N")?;
    ensure(d.rho_p == HalfIntVector::from_doubled(vec![5, 5, 0, 0]), "D4 ρ_P")?;
    ensure(d.alpha_tilde == v(&[1, 1, 0, 0]), "D4 α̃")?;
    ensure(d.pairing_value == (5, 2), "D4 ⟨ρ_P, α̌⟩")?;
    ensure(d.phi_n_layers[1] == vec![v(&[1, 1, 0, 0])] && d.phi_n_layers[0].len() == 8, "D4 layers")?;

    let row = |r: &eiscong_core::rootdata::PairingRow| (r.root.clone(), r.coroot.clone(), r.pairing.clone());
    let tb: Vec<_> = b.pairing_table(true).iter().map(row).collect();
    let want_b = [
        ("e_1-e_{j+1}", "f_1-f_{j+1}", "-a_j+s"),
        ("e_1+e_{j+1}", "f_1+f_{j+1}", "a_j+s"),
        ("e_1", "2f_1", "2s"),
    ];
    ensure(tb == want_b.map(|(a, b, c)| (a.into(), b.into(), c.into())), format!("B3 pairing table {:?}", tb))?;
    let td: Vec<_> = d.pairing_table(true).iter().map(row).collect();
    let want_d = [
        ("e_1-e_{j+2}", "f_1-f_{j+2}", "(k-1)/2-a_j+s"),
        ("e_2-e_{j+2}", "f_2-f_{j+2}", "-(k-1)/2-a_j+s"),
        ("e_1+e_{j+2}", "f_1+f_{j+2}", "(k-1)/2+a_j+s"),
        ("e_2+e_{j+2}", "f_2+f_{j+2}", "-(k-1)/2+a_j+s"),
        ("e_1+e_2", "f_1+f_2", "2s"),
    ];
    ensure(td == want_d.map(|(a, b, c)| (a.into(), b.into(), c.into())), format!("D4 pairing table {:?}", td))?;
    Ok("(B,3) and (D,4): Φ_N, ρ_P, α̃, layers and both pairing tables".into())
}

fn main() {
    // Let `cargo test -- <filter>` skip this target when the filter does not name it.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("newform eigenvalues", c1),
        ("Ramanujan congruence mod 691", c2),
        ("congruence suite", c3),
        ("quadratic eigenvalue pairs", c4),
        ("triple-product worked ratio", c5),
        ("appendix sweep", c6),
        ("zeta values and coefficient budget", c7),
        ("rational reconstruction", c8),
        ("spinor desk-scale interval", c9),
        ("envelope soundness under hiding", c10),
        ("root-data tables", c11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS criterion {}: {}: {}", i + 1, name, detail),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {}: {}", i + 1, name, why)
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
