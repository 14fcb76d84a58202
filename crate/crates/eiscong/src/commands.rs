//! Exact-arithmetic, forms, data, resolve and congruence commands.

use std::collections::BTreeMap;
use std::fmt::Write;

use eiscong_core::congruence::{self, bundled_cases, CheckError, CheckOptions, CongruenceCase};
use eiscong_core::exact::{cf_expand, parse_decimal, rational_reconstruct, BigInt, BigRational, FactorError, Factorization, Factorizer};
use eiscong_core::forms;
use num_traits::{One, Zero};
use serde_json::json;

use crate::cli::{Ctx, DataCmd, FormsCmd};
use crate::{json_text, load, CliError, Exit, Format, Output};

pub fn seed_manifest(ctx: &Ctx) -> Output {
    let mut by_source: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
    for r in ctx.data.records() {
        *by_source.entry("").or_default().entry(r.src.as_str()).or_default() += 1;
    }
    let provenance = by_source.remove("").unwrap_or_default();
    let sources: Vec<_> = ctx
        .data
        .manifest()
        .iter()
        .map(|m| json!({"source": m.source, "sha256": m.sha256, "records": m.records}))
        .collect();
    match ctx.format(Format::Plain) {
        Format::Json => {
            let prov: Vec<_> = provenance.iter().map(|(s, n)| json!({"src": s, "records": n})).collect();
            Output::ok(json_text(&json!({"sources": sources, "provenance": prov})))
        }
        f => {
            let mut s = String::new();
            if f == Format::Md {
                s.push_str("| source | sha256 | records |\n|---|---|---|\n");
            }
            for m in ctx.data.manifest() {
                if f == Format::Md {
                    let _ = writeln!(s, "| {} | {} | {} |", m.source, m.sha256, m.records);
                } else {
                    let _ = writeln!(s, "{}  {}  {} records", m.sha256, m.source, m.records);
                }
            }
            s.push('\n');
            for (src, n) in &provenance {
                let _ = writeln!(s, "{:>4}  {}", n, src);
            }
            Output::ok(s)
        }
    }
}

fn forms_err(e: forms::FormsError) -> CliError {
    CliError::usage(e.to_string())
}

pub fn forms(ctx: &Ctx, c: FormsCmd) -> Result<Output, CliError> {
    match c {
        FormsCmd::Ap { weight, p } => {
            let a = forms::ap(weight, p).map_err(forms_err)?;
            Ok(Output::ok(match ctx.format(Format::Plain) {
                Format::Json => json_text(&json!({"weight": weight, "p": p, "ap": a.to_string()})),
                Format::Md => format!("a_{}(f_{}) = {}\n", p, weight, a),
                Format::Plain => format!("{}\n", a),
            }))
        }
        FormsCmd::Expand { weight, order } => {
            let f = forms::eigenform(weight, order).map_err(forms_err)?;
            let cs: Vec<String> = f.coeffs().iter().map(|c| c.to_string()).collect();
            Ok(Output::ok(match ctx.format(Format::Plain) {
                Format::Json => json_text(&json!({"weight": weight, "order": order, "coefficients": cs})),
                Format::Md => {
                    let mut s = String::from("| n | a_n |\n|---|---|\n");
                    for (n, c) in cs.iter().enumerate() {
                        let _ = writeln!(s, "| {} | {} |", n, c);
                    }
                    s
                }
                Format::Plain => cs.iter().enumerate().map(|(n, c)| format!("{} {}\n", n, c)).collect(),
            }))
        }
    }
}

pub fn data(ctx: &Ctx, c: DataCmd) -> Result<Output, CliError> {
    let fmt = ctx.format(Format::Plain);
    match c {
        DataCmd::List => {
            let spaces = ctx.data.spaces();
            Ok(Output::ok(match fmt {
                Format::Json => {
                    let v: Vec<_> = spaces.iter().map(|(s, n)| json!({"space": s, "records": n})).collect();
                    json_text(&json!({"spaces": v, "records": ctx.data.len()}))
                }
                Format::Md => {
                    let mut s = String::from("| space | records |\n|---|---|\n");
                    for (sp, n) in &spaces {
                        let _ = writeln!(s, "| {} | {} |", sp, n);
                    }
                    s
                }
                Format::Plain => spaces.iter().map(|(s, n)| format!("{:<24} {}\n", s, n)).collect(),
            }))
        }
        DataCmd::Import { files } => {
            let mut merged = ctx.data.clone();
            let mut rows = Vec::new();
            for f in &files {
                let text = std::fs::read_to_string(f).map_err(|e| CliError::new(Exit::Miss, format!("{}: {}", f.display(), e)))?;
                let before = merged.len();
                merged
                    .add_source(&text, &f.display().to_string(), &load::sha256_hex(text.as_bytes()))
                    .map_err(|e| CliError::new(Exit::Miss, e.to_string()))?;
                rows.push((f.display().to_string(), merged.len() - before));
            }
            Ok(Output::ok(match fmt {
                Format::Json => {
                    let v: Vec<_> = rows.iter().map(|(f, n)| json!({"file": f, "new_records": n})).collect();
                    json_text(&json!({"files": v, "records": merged.len()}))
                }
                _ => {
                    let mut s: String = rows.iter().map(|(f, n)| format!("{}: {} new records, no conflicts\n", f, n)).collect();
                    let _ = writeln!(s, "{} records after merge; pass the files with --data (or list them in the config) to use them", merged.len());
                    s
                }
            }))
        }
        DataCmd::Show { space } => {
            let recs: Vec<_> = ctx.data.space_records(&space).collect();
            if recs.is_empty() {
                return Err(CliError::new(Exit::Miss, format!("no records for space {}", space)));
            }
            Ok(Output::ok(match fmt {
                Format::Json => {
                    let v: Vec<serde_json::Value> =
                        recs.iter().map(|r| serde_json::from_str(&r.to_json_line()).expect("record line is json")).collect();
                    json_text(&json!({"space": space, "records": v}))
                }
                Format::Md => {
                    let mut s = String::from("| op | n | value | src |\n|---|---|---|---|\n");
                    for r in &recs {
                        let _ = writeln!(s, "| {} | {} | {} | {} |", r.op, r.n, r.value, r.src);
                    }
                    s
                }
                Format::Plain => recs.iter().map(|r| format!("{} {} {}\n", r.op, r.n, r.value)).collect(),
            }))
        }
    }
}

pub fn find_case(name: &str) -> Result<CongruenceCase, CliError> {
    let cases = bundled_cases();
    let names: Vec<String> = cases.iter().map(|c| c.name.clone()).collect();
    cases
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| CliError::usage(format!("unknown case {}; known: {}", name, names.join(", "))))
}

pub fn check_err(e: CheckError) -> CliError {
    let code = match e {
        CheckError::Miss(_) => Exit::Miss,
        CheckError::Inconsistent { .. } => Exit::Miss,
        CheckError::Invalid(_) => Exit::Usage,
        CheckError::Factor(_) => Exit::Precision,
        CheckError::Resolve(_) | CheckError::Forms(_) => Exit::Fail,
    };
    CliError::new(code, e.to_string())
}

pub fn resolve(ctx: &Ctx, name: &str, p: Option<u64>) -> Result<Output, CliError> {
    let case = find_case(name)?;
    let prep = congruence::prepare(&case, &ctx.data, CheckOptions::default()).map_err(check_err)?;
    let primes = match p {
        Some(p) if prep.primes.contains(&p) => vec![p],
        Some(p) => return Err(CliError::usage(format!("p = {} is not among the case primes {:?}", p, prep.primes))),
        None => prep.primes.clone(),
    };
    let mut rows = Vec::new();
    for &p in &primes {
        rows.push(prep.row(p).map_err(check_err)?);
    }
    Ok(Output::ok(match ctx.format(Format::Plain) {
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|r| {
                    let steps: Vec<_> = r.steps.iter().map(|s| json!({"label": s.label, "value": s.value})).collect();
                    json!({"p": r.p, "steps": steps, "lhs": r.lhs.render("±")})
                })
                .collect();
            json_text(&json!({"case": case.name, "rows": v}))
        }
        fmt => {
            let mut s = String::new();
            for r in &rows {
                if fmt == Format::Md {
                    let _ = writeln!(s, "#### p = {}\n\n| step | value |\n|---|---|", r.p);
                    for st in &r.steps {
                        let _ = writeln!(s, "| {} | {} |", st.label, st.value);
                    }
                    let _ = writeln!(s, "| eigenvalue | {} |\n", r.lhs.render("±"));
                } else {
                    let _ = writeln!(s, "p = {}", r.p);
                    for st in &r.steps {
                        let _ = writeln!(s, "  {}: {}", st.label, st.value);
                    }
                    let _ = writeln!(s, "  eigenvalue: {}", r.lhs.render("±"));
                }
            }
            s
        }
    }))
}

pub fn congruence_check(ctx: &Ctx, name: &str, q: Option<u64>, pmax: Option<u64>) -> Result<Output, CliError> {
    let case = find_case(name)?;
    let rep = congruence::check(&case, &ctx.data, CheckOptions { q, pmax, skip_factor: false }).map_err(check_err)?;
    let code = if rep.verdict() { Exit::Ok } else { Exit::Fail };
    let text = match ctx.format(Format::Md) {
        Format::Json => json_text(&rep.to_json()),
        Format::Md => rep.to_markdown(),
        Format::Plain => {
            let mut s = String::new();
            for r in &rep.rows {
                let f = r.factorization.as_ref().map(|f| f.render(".", None)).unwrap_or_else(|| "0".into());
                let _ = writeln!(s, "{} {} {}", r.p, f, if r.divisible { "ok" } else { "FAIL" });
            }
            let _ = writeln!(s, "{}", if rep.verdict() { "PASS" } else { "FAIL" });
            s
        }
    };
    Ok(Output::with_code(code, text))
}

pub fn congruence_list(ctx: &Ctx) -> Result<Output, CliError> {
    let cases = bundled_cases();
    Ok(Output::ok(match ctx.format(Format::Plain) {
        Format::Json => {
            let v: Vec<_> = cases.iter().map(|c| json!({"name": c.name, "shape": c.shape.to_string(), "q": c.q})).collect();
            json_text(&json!({"cases": v}))
        }
        _ => cases.iter().map(|c| format!("{:<24} {:<11} q = {}\n", c.name, c.shape.to_string(), c.q)).collect(),
    }))
}

fn parse_int(s: &str, what: &str) -> Result<BigInt, CliError> {
    s.trim().parse().map_err(|_| CliError::usage(format!("{} must be an integer, got {:?}", what, s)))
}

fn factor_with(fz: &Factorizer, n: &BigInt) -> Result<Factorization, CliError> {
    fz.factorize(n).map_err(|e| match e {
        FactorError::Zero => CliError::usage("cannot factor 0"),
        e => CliError::new(Exit::Precision, e.to_string()),
    })
}

/// `2^3·5·47 / (3^2·17·1223)`; the denominator is dropped when it is 1.
pub fn render_fraction(fz: &Factorizer, r: &BigRational) -> Result<String, CliError> {
    let num = if r.numer().is_zero() { "0".to_string() } else { factor_with(fz, r.numer())?.render("·", None) };
    if r.denom().is_one() {
        return Ok(num);
    }
    let d = factor_with(fz, r.denom())?;
    let single = d.factors.len() == 1 && d.factors[0].exp == 1;
    let den = d.render("·", None);
    Ok(if single { format!("{} / {}", num, den) } else { format!("{} / ({})", num, den) })
}

pub fn threshold(ctx: &Ctx, t: Option<&str>) -> Result<BigInt, CliError> {
    let t = parse_int(t.unwrap_or(&ctx.cfg.cf_threshold), "threshold")?;
    if t < BigInt::from(1_000_000) {
        return Err(CliError::usage("threshold must be at least 10^6"));
    }
    Ok(t)
}

pub fn rationalize(ctx: &Ctx, decimal: &str, t: Option<&str>) -> Result<Output, CliError> {
    let t = threshold(ctx, t)?;
    let r = rational_reconstruct(decimal, &t).map_err(|e| CliError::usage(format!("not a decimal: {}", e.0)))?;
    let terms = cf_expand(decimal, 24).map_err(|e| CliError::usage(format!("not a decimal: {}", e.0)))?;
    let cf: Vec<String> = terms.iter().map(|x| x.to_string()).collect();
    // A terminating expansion comes back whole; only accept it when it is
    // shorter than the input.
    let frac = parse_decimal(decimal).map(|d| d.frac_digits).unwrap_or(0);
    let r = r.filter(|r| r.denom() * r.denom() <= num_traits::pow(BigInt::from(10), frac as usize));
    let Some(r) = r else {
        return Err(CliError::new(
            Exit::Precision,
            format!("no convergent before a partial quotient above {} reproduces {}; cf = [{}, …]", t, decimal, cf.join(",")),
        ));
    };
    let fz = Factorizer::new(ctx.cfg.factor_budget);
    let fac = render_fraction(&fz, &r)?;
    Ok(Output::ok(match ctx.format(Format::Plain) {
        Format::Json => json_text(&json!({
            "decimal": decimal,
            "rational": r.to_string(),
            "factored": fac,
            "cf_prefix": cf,
            "threshold": t.to_string(),
        })),
        Format::Md => format!("| decimal | rational | factored |\n|---|---|---|\n| {} | {} | {} |\n\ncontinued fraction: [{}, …]\n", decimal, r, fac, cf.join(", ")),
        Format::Plain => format!("{} = {}\n", r, fac),
    }))
}

pub fn factor(ctx: &Ctx, n: &str) -> Result<Output, CliError> {
    let n = parse_int(n, "n")?;
    let fz = Factorizer::new(ctx.cfg.factor_budget);
    match fz.factorize(&n) {
        Ok(f) => Ok(Output::ok(match ctx.format(Format::Plain) {
            Format::Json => {
                let fs: Vec<_> =
                    f.factors.iter().map(|p| json!({"prime": p.prime.to_string(), "exp": p.exp, "certified": p.certified})).collect();
                json_text(&json!({"n": n.to_string(), "negative": f.negative, "factors": fs}))
            }
            _ => format!("{} = {}\n", n, f.render("·", None)),
        })),
        Err(FactorError::Zero) => Err(CliError::usage("cannot factor 0")),
        Err(FactorError::Budget { partial, cofactor }) => {
            let msg = if partial.factors.is_empty() {
                format!("effort budget exhausted: no factor of {} found (composite)", n)
            } else {
                format!("effort budget exhausted: {} = {} · {} (cofactor unfactored)", n, partial.render("·", None), cofactor)
            };
            Err(CliError::new(Exit::Precision, msg))
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::{run, Exit};

    #[test]
    fn rationalize_reference_decimal() {
        let o = run(["eiscong", "rationalize", "--decimal", "0.0100470823379774368182814145009"]);
        assert_eq!(o.code, Exit::Ok);
        assert_eq!(o.stdout, "1880/187119 = 2^3·5·47 / (3^2·17·1223)\n");
        let o = run(["eiscong", "rationalize", "--decimal", "0.0100470823379774368182814145009", "--threshold", "10"]);
        assert_eq!(o.code, Exit::Usage);
        let o = run(["eiscong", "rationalize", "--decimal", "0.01x"]);
        assert_eq!(o.code, Exit::Usage);
        // Nine digits of π carry no small rational.
        let o = run(["eiscong", "rationalize", "--decimal", "3.141592654"]);
        assert_eq!(o.code, Exit::Precision, "{}", o.stdout);
    }

    #[test]
    fn factor_command() {
        let o = run(["eiscong", "factor", "-104626880141728"]);
        assert_eq!(o.code, Exit::Ok);
        assert!(o.stdout.starts_with("-104626880141728 = -2^5·"), "{}", o.stdout);
        assert_eq!(run(["eiscong", "factor", "0"]).code, Exit::Usage);
        assert_eq!(run(["eiscong", "factor", "x"]).code, Exit::Usage);
    }

    #[test]
    fn congruence_exit_codes() {
        let o = run(["eiscong", "congruence", "check", "--case", "d25_17_11_mod47", "--out", "md"]);
        assert_eq!(o.code, Exit::Ok, "{}", o.stderr);
        assert!(o.stdout.contains("verdict: PASS"));
        assert_eq!(run(["eiscong", "congruence", "check", "--case", "d25_17_11_mod47", "--q", "43"]).code, Exit::Fail);
        assert_eq!(run(["eiscong", "congruence", "check", "--case", "harder_d21_5_mod41"]).code, Exit::Miss);
        assert_eq!(run(["eiscong", "congruence", "check", "--case", "nope"]).code, Exit::Usage);
        assert_eq!(run(["eiscong", "--no-bundled", "congruence", "check", "--case", "d25_17_11_mod47"]).code, Exit::Miss);
    }

    #[test]
    fn resolve_chain() {
        let o = run(["eiscong", "resolve", "--case", "d25_17_3_sq_mod59", "--p", "2"]);
        assert_eq!(o.code, Exit::Ok, "{}", o.stderr);
        assert!(o.stdout.contains("-384 ± 192√79"), "{}", o.stdout);
        assert_eq!(run(["eiscong", "resolve", "--case", "d25_17_3_sq_mod59", "--p", "4"]).code, Exit::Usage);
    }

    #[test]
    fn forms_and_data() {
        let o = run(["eiscong", "forms", "ap", "--weight", "22", "--p", "43"]);
        assert_eq!(o.stdout, "-193605854685795844\n");
        assert_eq!(run(["eiscong", "forms", "ap", "--weight", "14", "--p", "2"]).code, Exit::Usage);
        let o = run(["eiscong", "forms", "expand", "--weight", "12", "--order", "3", "--out", "json"]);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["coefficients"], serde_json::json!(["0", "1", "-24", "252"]));
        let o = run(["eiscong", "data", "show", "D25_17"]);
        assert!(o.stdout.contains("T(p) 2 3600"), "{}", o.stdout);
        assert_eq!(run(["eiscong", "data", "show", "nothing"]).code, Exit::Miss);
        assert_eq!(run(["eiscong", "data", "list"]).code, Exit::Ok);
        let o = run(["eiscong", "--seed-manifest"]);
        assert_eq!(o.code, Exit::Ok);
        assert!(o.stdout.contains("bundled:hecke_tables.jsonl"));
    }
}
