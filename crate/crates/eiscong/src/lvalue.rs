//! `lvalue` subcommands.

use std::fmt::Write;

use eiscong_core::exact::{parse_decimal, parse_rational, rational_reconstruct, BigInt, BigRational, Factorizer};
use eiscong_core::lfunc::eval::ratio_with;
use eiscong_core::lfunc::{auto_cutoff, build_lspec, coeffs_required, fe_residual, EvalResult, Evaluator, LError, LKind, LSpec};
use num_traits::{ToPrimitive, Zero};
use serde_json::json;

use crate::cli::{Ctx, LArgs, LvalueCmd};
use crate::commands::{render_fraction, threshold};
use crate::{json_text, CliError, Exit, Format, Output};

/// Refuse automatic cutoffs beyond this many coefficients.
const MAX_COEFFS: usize = 200_000;

pub fn lerr(e: LError) -> CliError {
    let code = match e {
        LError::MissingFactor(_) => Exit::Miss,
        LError::Insufficient { .. } | LError::DigitsCap { .. } | LError::ZeroDenominator(_) => Exit::Precision,
        LError::Unsupported(_) | LError::Parity(_) | LError::Range(_) | LError::Divergent(_) | LError::Forms(_) => Exit::Usage,
    };
    CliError::new(code, e.to_string())
}

fn point(s: &str) -> Result<BigRational, CliError> {
    parse_rational(s)
        .or_else(|| parse_decimal(s).ok().map(|d| d.value))
        .ok_or_else(|| CliError::usage(format!("not a rational point: {:?}", s)))
}

struct Setup {
    kind: LKind,
    spec: LSpec,
    digits: u32,
}

fn setup(ctx: &Ctx, l: &LArgs, points: &[BigRational]) -> Result<Setup, CliError> {
    let kind: LKind = l.spec.parse().map_err(lerr)?;
    let digits = l.digits.unwrap_or(ctx.cfg.digits);
    if digits == 0 {
        return Err(CliError::usage("--digits must be positive"));
    }
    if digits > ctx.cfg.digits_cap {
        return Err(lerr(LError::DigitsCap { digits, cap: ctx.cfg.digits_cap }));
    }
    let n = match l.coeffs {
        Some(n) => n,
        None => {
            let pts: Vec<f64> = points.iter().map(|p| p.to_f64().unwrap_or(f64::NAN)).collect();
            auto_cutoff(&kind.gamma_shifts(), kind.weight(), &pts, digits)
        }
    };
    if n > MAX_COEFFS {
        return Err(CliError::new(Exit::Precision, format!("{} coefficients needed, more than the {} allowed", n, MAX_COEFFS)));
    }
    let spec = build_lspec(&kind, n, Some(&ctx.data)).map_err(lerr)?;
    Ok(Setup { kind, spec, digits })
}

fn meets(r: &EvalResult, digits: u32) -> bool {
    r.relative_envelope() <= 10f64.powi(-(digits as i32))
}

/// Significant digits the envelope supports.
fn supported_digits(r: &EvalResult) -> u32 {
    let rel = r.relative_envelope();
    if rel <= 0.0 {
        return 60;
    }
    (-rel.log10()).floor().clamp(0.0, 60.0) as u32
}

fn result_json(st: &Setup, r: &EvalResult, label: &str) -> serde_json::Value {
    json!({
        "spec": st.kind.to_string(),
        "quantity": label,
        "value": r.value.to_sci(st.digits),
        "envelope": format!("{:.3e}", r.envelope),
        "relative_envelope": format!("{:.3e}", r.relative_envelope()),
        "digits_requested": st.digits,
        "digits_supported": supported_digits(r),
        "coefficients_used": r.coeffs_used,
        "coefficients_unavailable": st.spec.unavailable().len(),
        "meets_request": meets(r, st.digits),
    })
}

fn result_text(st: &Setup, r: &EvalResult, label: &str, fmt: Format) -> String {
    let mut s = String::new();
    let unavail = st.spec.unavailable().len();
    if fmt == Format::Md {
        let _ = writeln!(s, "| quantity | value | envelope | coefficients |\n|---|---|---|---|");
        let _ = writeln!(s, "| {} | {} | {:.3e} | {} ({} unavailable) |", label, r.value.to_sci(st.digits), r.envelope, r.coeffs_used, unavail);
    } else {
        let _ = writeln!(s, "{} = {} ± {:.3e}", label, r.value.to_sci(st.digits), r.envelope);
        let _ = writeln!(s, "coefficients: {} ({} unavailable)", r.coeffs_used, unavail);
    }
    if !meets(r, st.digits) {
        let _ = writeln!(
            s,
            "precision insufficient: relative envelope {:.3e} supports {} of the {} requested digits",
            r.relative_envelope(),
            supported_digits(r),
            st.digits
        );
    }
    s
}

fn finish(ctx: &Ctx, st: &Setup, r: &EvalResult, label: &str) -> Output {
    let text = match ctx.format(Format::Plain) {
        Format::Json => json_text(&result_json(st, r, label)),
        f => result_text(st, r, label, f),
    };
    Output::with_code(if meets(r, st.digits) { Exit::Ok } else { Exit::Precision }, text)
}

fn ratio_label(st: &Setup, t1: &BigRational, t2: &BigRational) -> String {
    let e = (t1 - t2) * BigRational::new(BigInt::from(st.spec.degree() as i64), BigInt::from(2));
    format!("L({})/(π^{} L({}))", t1, e, t2)
}

fn compute_ratio(st: &Setup, t1: &BigRational, t2: &BigRational) -> Result<EvalResult, CliError> {
    let ev = Evaluator::new(&st.spec, &[t1.clone(), t2.clone()], st.digits).map_err(lerr)?;
    ratio_with(&ev, &st.spec, t1, t2).map_err(lerr)
}

pub fn run(ctx: &Ctx, c: LvalueCmd) -> Result<Output, CliError> {
    match c {
        LvalueCmd::Eval { l, s } => {
            let s = point(&s)?;
            let st = setup(ctx, &l, std::slice::from_ref(&s))?;
            let ev = Evaluator::new(&st.spec, std::slice::from_ref(&s), st.digits).map_err(lerr)?;
            let r = ev.value(&s).map_err(lerr)?;
            Ok(finish(ctx, &st, &r, &format!("L({})", s)))
        }
        LvalueCmd::Ratio { l, l1, l2 } => {
            let (t1, t2) = (point(&l1)?, point(&l2)?);
            let st = setup(ctx, &l, &[t1.clone(), t2.clone()])?;
            let r = compute_ratio(&st, &t1, &t2)?;
            Ok(finish(ctx, &st, &r, &ratio_label(&st, &t1, &t2)))
        }
        LvalueCmd::Rationalize { l, l1, l2, threshold: t } => {
            let t = threshold(ctx, t.as_deref())?;
            let (t1, t2) = (point(&l1)?, point(&l2)?);
            let st = setup(ctx, &l, &[t1.clone(), t2.clone()])?;
            let r = compute_ratio(&st, &t1, &t2)?;
            rationalize(ctx, &st, &r, &ratio_label(&st, &t1, &t2), &t)
        }
        LvalueCmd::Fe { l, probes } => {
            let ps = probes.iter().map(|p| point(p)).collect::<Result<Vec<_>, _>>()?;
            let st = setup(ctx, &l, &ps)?;
            let res = fe_residual(&st.spec, &ps, st.digits).map_err(lerr)?;
            let ok = res <= 10f64.powi(2 - st.digits as i32);
            let text = match ctx.format(Format::Plain) {
                Format::Json => json_text(&json!({
                    "spec": st.kind.to_string(),
                    "probes": ps.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                    "residual": format!("{:.3e}", res),
                    "coefficients_used": st.spec.len(),
                    "sign": st.spec.sign,
                })),
                _ => format!("functional-equation residual {:.3e} ({} coefficients, sign {:+})\n", res, st.spec.len(), st.spec.sign),
            };
            Ok(Output::with_code(if ok { Exit::Ok } else { Exit::Precision }, text))
        }
        LvalueCmd::Coeffs { l } => {
            let kind: LKind = l.spec.parse().map_err(lerr)?;
            let digits = l.digits.unwrap_or(ctx.cfg.digits);
            let spec = build_lspec(&kind, 1, Some(&ctx.data)).map_err(lerr)?;
            let n = coeffs_required(&spec, digits);
            Ok(Output::ok(match ctx.format(Format::Plain) {
                Format::Json => json_text(&json!({"spec": kind.to_string(), "digits": digits, "coefficients_required": n})),
                _ => format!("{}\n", n),
            }))
        }
    }
}

fn rationalize(ctx: &Ctx, st: &Setup, r: &EvalResult, label: &str, t: &BigInt) -> Result<Output, CliError> {
    let sig = supported_digits(r).min(st.digits).max(1);
    let dec = r.value.to_sci(sig);
    let plain = sci_to_plain(&dec);
    let cand = rational_reconstruct(&plain, t).map_err(|e| CliError::new(Exit::Precision, e.0))?;
    let cand = cand.filter(|c| !c.is_zero() && r.contains(c));
    let certified = cand.is_some() && meets(r, st.digits);
    let fz = Factorizer::new(ctx.cfg.factor_budget);
    let factored = match &cand {
        Some(c) => Some(render_fraction(&fz, c)?),
        None => None,
    };
    let text = match ctx.format(Format::Plain) {
        Format::Json => {
            let mut v = result_json(st, r, label);
            v["rational"] = json!(cand.as_ref().map(|c| c.to_string()));
            v["factored"] = json!(factored);
            v["decimal_used"] = json!(plain);
            v["certified"] = json!(certified);
            json_text(&v)
        }
        f => {
            let mut s = result_text(st, r, label, f);
            match (&cand, &factored) {
                (Some(c), Some(fac)) if certified => {
                    let _ = writeln!(s, "{} = {}", c, fac);
                }
                (Some(c), Some(fac)) => {
                    let _ = writeln!(s, "candidate {} = {} (inside the envelope, not certified)", c, fac);
                }
                _ => {
                    let _ = writeln!(s, "no rational with small partial quotients fits the interval");
                }
            }
            s
        }
    };
    Ok(Output::with_code(if certified { Exit::Ok } else { Exit::Precision }, text))
}

/// "1.23e-2" → "123/10000"-compatible plain decimal "0.0123".
fn sci_to_plain(s: &str) -> String {
    let (m, e) = s.split_once('e').unwrap_or((s, "0"));
    let e: i64 = e.parse().unwrap_or(0);
    let neg = m.starts_with('-');
    let m = m.trim_start_matches('-');
    let (a, b) = m.split_once('.').unwrap_or((m, ""));
    let digits = format!("{}{}", a, b);
    let point = a.len() as i64 + e;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
    };
    if neg {
        format!("-{}", body)
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::sci_to_plain;
    use crate::{run, Exit};

    #[test]
    fn sci_rendering() {
        assert_eq!(sci_to_plain("1.0047e-2"), "0.010047");
        assert_eq!(sci_to_plain("-3.5e1"), "-35");
        assert_eq!(sci_to_plain("1.25e0"), "1.25");
        assert_eq!(sci_to_plain("7e3"), "7000");
    }

    #[test]
    fn spinor_ratio_reports_envelope() {
        let o = run(["eiscong", "lvalue", "ratio", "--spec", "spinor:16,6", "--l1", "19", "--l2", "17", "--digits", "30"]);
        assert_eq!(o.code, Exit::Precision, "{}{}", o.stdout, o.stderr);
        assert!(o.stdout.contains("precision insufficient"), "{}", o.stdout);
        assert!(o.stdout.contains("±"));
        let o = run(["eiscong", "lvalue", "ratio", "--spec", "spinor:16,6", "--l1", "19", "--l2", "17", "--digits", "2"]);
        assert_eq!(o.code, Exit::Ok, "{}", o.stdout);
    }

    #[test]
    fn zeta_eval_and_errors() {
        let o = run(["eiscong", "lvalue", "eval", "--spec", "zeta", "--s", "2", "--digits", "25"]);
        assert_eq!(o.code, Exit::Ok, "{}", o.stderr);
        assert!(o.stdout.starts_with("L(2) = 1.644934066848226436472415"), "{}", o.stdout);
        assert_eq!(run(["eiscong", "lvalue", "eval", "--spec", "zeta", "--s", "1"]).code, Exit::Usage);
        assert_eq!(run(["eiscong", "lvalue", "eval", "--spec", "zeta", "--s", "2", "--digits", "80"]).code, Exit::Precision);
        assert_eq!(run(["eiscong", "lvalue", "eval", "--spec", "cusp:3", "--s", "2"]).code, Exit::Usage);
        // Without eigenvalues every spinor coefficient is a generic ball.
        assert_eq!(run(["eiscong", "--no-bundled", "lvalue", "eval", "--spec", "spinor:16,6", "--s", "19"]).code, Exit::Precision);
        let o = run(["eiscong", "lvalue", "coeffs", "--spec", "spinor:16,6", "--digits", "30"]);
        assert_eq!(o.stdout, "146\n");
    }
}
