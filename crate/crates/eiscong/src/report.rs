//! Reproduction reports.

use std::fmt::Write;

use eiscong_core::congruence::{self, bundled_cases, CheckOptions, CongruenceCase, Shape};
use eiscong_core::exact::{BigInt, BigRational};
use eiscong_core::lfunc::eval::ratio_with;
use eiscong_core::lfunc::{alg_ratio_identity, appendix_tables, auto_cutoff, build_lspec, AppendixTable, Evaluator, LKind};
use eiscong_core::mp::Float;
use eiscong_core::rootdata::{parabolic_data, Series};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cli::{Ctx, ReportName};
use crate::commands::check_err;
use crate::lvalue::lerr;
use crate::{json_text, CliError, Exit, Format, Output};

/// Tolerance of the appendix sweep.
pub const SWEEP_TOL: f64 = 1e-8;
const SWEEP_DIGITS: u32 = 12;

pub fn run(ctx: &Ctx, name: ReportName, threads: Option<usize>) -> Result<Output, CliError> {
    let n = threads.unwrap_or(ctx.cfg.threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::usage(format!("thread pool: {}", e)))?;
    let doc = pool.install(|| match name {
        ReportName::Harder41 => suite(ctx, "harder41", |c| c.name == "harder_d21_5_mod41"),
        ReportName::So43Suite => suite(ctx, "so43_suite", |c| c.shape == Shape::So43),
        ReportName::So44Suite => suite(ctx, "so44_suite", |c| c.shape == Shape::So44),
        ReportName::AppendixSweep => appendix_sweep(),
        ReportName::Roots => roots(),
    })?;
    let code = doc.code;
    let text = match ctx.format(Format::Md) {
        Format::Json => json_text(&doc.json),
        _ => doc.md,
    };
    Ok(Output::with_code(code, text))
}

pub struct Doc {
    pub code: Exit,
    pub md: String,
    pub json: Value,
}

fn badge(ok: bool) -> &'static str {
    if ok {
        "**PASS**"
    } else {
        "**FAIL**"
    }
}

enum Outcome {
    Done(Box<congruence::CongruenceReport>),
    Miss(String),
    Error(CliError),
}

fn suite(ctx: &Ctx, title: &str, pick: impl Fn(&CongruenceCase) -> bool) -> Result<Doc, CliError> {
    let cases: Vec<CongruenceCase> = bundled_cases().into_iter().filter(|c| pick(c)).collect();
    let outcomes: Vec<Outcome> = cases
        .par_iter()
        .map(|c| match congruence::check(c, &ctx.data, CheckOptions::default()) {
            Ok(r) => Outcome::Done(Box::new(r)),
            Err(e) => {
                let e = check_err(e);
                if e.code == Exit::Miss {
                    Outcome::Miss(e.msg)
                } else {
                    Outcome::Error(e)
                }
            }
        })
        .collect();

    let mut md = format!("# {}\n\n| case | q | primes | result |\n|---|---|---|---|\n", title);
    let mut body = String::new();
    let mut entries = Vec::new();
    let (mut pass, mut fail, mut miss) = (0usize, 0usize, 0usize);
    for (c, o) in cases.iter().zip(outcomes) {
        match o {
            Outcome::Done(r) => {
                let ok = r.verdict();
                if ok {
                    pass += 1;
                } else {
                    fail += 1;
                }
                let _ = writeln!(md, "| {} | {} | {} | {} |", c.name, r.q, r.rows.len(), badge(ok));
                body.push_str(&r.to_markdown());
                body.push('\n');
                entries.push(json!({"case": c.name, "status": if ok { "pass" } else { "fail" }, "report": r.to_json()}));
            }
            Outcome::Miss(msg) => {
                miss += 1;
                let _ = writeln!(md, "| {} | {} | 0 | **DATA MISS** |", c.name, c.q);
                let _ = writeln!(body, "### {} (q = {})\n\ndata miss: {}\n", c.name, c.q, msg);
                let _ = writeln!(body, "No eigenvalues for this case are bundled. Supply them with `--data FILE` to run the check.\n");
                entries.push(json!({"case": c.name, "status": "data-miss", "missing": msg}));
            }
            Outcome::Error(e) => return Err(e),
        }
    }
    let _ = writeln!(md, "\n{} passed, {} failed, {} missing data\n", pass, fail, miss);
    md.push_str(&body);
    let code = if fail > 0 {
        Exit::Fail
    } else if miss > 0 {
        Exit::Miss
    } else {
        Exit::Ok
    };
    let json = json!({
        "report": title,
        "cases": entries,
        "summary": {"pass": pass, "fail": fail, "data_miss": miss},
    });
    Ok(Doc { code, md, json })
}

/// One consecutive-pair comparison of the sweep.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub forms: [i64; 3],
    pub s_hi: i64,
    pub s_lo: i64,
    pub expected: BigRational,
    pub numeric: String,
    pub rel_err: f64,
    pub rel_envelope: f64,
    pub contained: bool,
}

impl SweepRow {
    pub fn pass(&self) -> bool {
        self.rel_err < SWEEP_TOL && self.contained
    }
}

pub fn sweep_table(tab: &AppendixTable) -> Result<Vec<SweepRow>, CliError> {
    if tab.pairs().next().is_none() {
        return Ok(Vec::new());
    }
    let [k1, k2, k3] = tab.weights_desc();
    let kind = LKind::triple(k1 as u32, k2 as u32, k3 as u32);
    let pts: Vec<f64> = tab.rows.iter().map(|r| r.s as f64).collect();
    let n = auto_cutoff(&kind.gamma_shifts(), kind.weight(), &pts, SWEEP_DIGITS);
    let spec = build_lspec(&kind, n, None).map_err(lerr)?;
    let qs: Vec<BigRational> = tab.rows.iter().map(|r| BigRational::from_integer(BigInt::from(r.s))).collect();
    let ev = Evaluator::new(&spec, &qs, SWEEP_DIGITS).map_err(lerr)?;
    let mut out = Vec::new();
    for (hi, lo) in tab.pairs() {
        let t1 = BigRational::from_integer(BigInt::from(hi.s));
        let t2 = BigRational::from_integer(BigInt::from(lo.s));
        let r = ratio_with(&ev, &spec, &t1, &t2).map_err(lerr)?;
        let want = alg_ratio_identity(hi.s, lo.s, tab.weights_desc(), &hi.lalg, &lo.lalg).map_err(lerr)?;
        let p = r.value.prec() + 64;
        let w = Float::from_rational(&want, p);
        let rel_err = (r.value.with_prec(p) - w.clone()).abs().to_f64() / w.to_f64().abs();
        out.push(SweepRow {
            forms: tab.forms,
            s_hi: hi.s,
            s_lo: lo.s,
            contained: r.contains(&want),
            numeric: r.value.to_sci(15),
            rel_envelope: r.relative_envelope(),
            rel_err,
            expected: want,
        });
    }
    Ok(out)
}

pub fn sweep() -> Result<Vec<(AppendixTable, Vec<SweepRow>)>, CliError> {
    let tabs = appendix_tables();
    let rows: Vec<Result<Vec<SweepRow>, CliError>> = tabs.par_iter().map(sweep_table).collect();
    tabs.into_iter().zip(rows).map(|(t, r)| r.map(|r| (t, r))).collect()
}

fn appendix_sweep() -> Result<Doc, CliError> {
    let res = sweep()?;
    let mut md = String::from("# appendix_sweep\n\n");
    let _ = writeln!(md, "Numeric L(s₁)/(π^(4(s₁−s₂)) L(s₂)) against the exact ratio of the tabulated algebraic parts; tolerance {:e} relative.\n", SWEEP_TOL);
    md.push_str("| forms | s₁ | s₂ | exact | numeric | rel. error | rel. envelope | result |\n|---|---|---|---|---|---|---|---|\n");
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let (mut pass, mut fail) = (0usize, 0usize);
    for (tab, rs) in &res {
        let forms = format!("{}×{}×{}", tab.forms[0], tab.forms[1], tab.forms[2]);
        if rs.is_empty() {
            skipped.push(forms);
            continue;
        }
        for r in rs {
            if r.pass() {
                pass += 1;
            } else {
                fail += 1;
            }
            let _ = writeln!(
                md,
                "| {} | {} | {} | {} | {} | {:.1e} | {:.1e} | {} |",
                forms,
                r.s_hi,
                r.s_lo,
                r.expected,
                r.numeric,
                r.rel_err,
                r.rel_envelope,
                badge(r.pass())
            );
            rows.push(json!({
                "forms": tab.forms,
                "s1": r.s_hi,
                "s2": r.s_lo,
                "exact": r.expected.to_string(),
                "numeric": r.numeric,
                "rel_err": format!("{:.3e}", r.rel_err),
                "rel_envelope": format!("{:.3e}", r.rel_envelope),
                "pass": r.pass(),
            }));
        }
    }
    let _ = writeln!(md, "\n{} tables, {} pairs: {} passed, {} failed", res.len(), pass + fail, pass, fail);
    for f in &skipped {
        let _ = writeln!(md, "- {}: fewer than two nonzero rows, no pair to compare", f);
    }
    let json = json!({
        "report": "appendix_sweep",
        "tolerance": format!("{:e}", SWEEP_TOL),
        "pairs": rows,
        "skipped": skipped,
        "summary": {"tables": res.len(), "pass": pass, "fail": fail},
    });
    Ok(Doc { code: if fail == 0 { Exit::Ok } else { Exit::Fail }, md, json })
}

fn roots() -> Result<Doc, CliError> {
    let mut md = String::from("# roots\n");
    let mut parts = Vec::new();
    for (series, n, name) in [(Series::B, 3, "B3"), (Series::D, 4, "D4")] {
        let d = parabolic_data(series, n).map_err(|e| CliError::usage(e.to_string()))?;
        let _ = writeln!(md, "\n## ({}), ⟨ρ_P, α̌⟩ = {}/{}\n", name, d.pairing_value.0, d.pairing_value.1);
        md.push_str(&d.pairing_markdown(false));
        let rows: Vec<Value> = d
            .pairing_table(false)
            .into_iter()
            .map(|r| json!({"root": r.root, "coroot": r.coroot, "pairing": r.pairing, "satake": r.satake, "layer": r.layer}))
            .collect();
        parts.push(json!({"group": name, "rows": rows}));
    }
    Ok(Doc { code: Exit::Ok, md, json: json!({"report": "roots", "tables": parts}) })
}

#[cfg(test)]
mod tests {
    use crate::{run, Exit};

    #[test]
    fn harder41_is_a_data_miss_document() {
        let o = run(["eiscong", "report", "harder41"]);
        assert_eq!(o.code, Exit::Miss);
        assert!(o.stdout.contains("DATA MISS"), "{}", o.stdout);
    }

    #[test]
    fn suites_pass_and_round_trip() {
        for name in ["so43_suite", "so44_suite", "roots"] {
            let o = run(["eiscong", "report", name]);
            assert_eq!(o.code, Exit::Ok, "{}: {}", name, o.stdout);
            assert!(!o.stdout.contains("FAIL"));
            let o = run(["eiscong", "report", name, "--out", "json"]);
            let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
            assert_eq!(crate::json_text(&v), o.stdout);
        }
    }
}
