use std::fmt::Write as _;
use std::io::Write as _;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use hybrid_core::efficiency::imperfect_dominance_scan;
use hybrid_core::incentives::{check_axioms, check_weakly_less_varying, Verifier};
use hybrid_core::mechanisms::{Configured, Mechanism};
use hybrid_core::rational::ratio;
use hybrid_core::scan::{AllocationTable, Misreports, ScanPlan};
use hybrid_core::solver::{curve_csv, Certificate, Solver, SolverOptions};
use hybrid_core::text::parse_profile;
use hybrid_core::{Rational, Scope, Setting, SCHEMA_VERSION};

use crate::args::{self, Command, Format, Global, PairArgs};
use crate::VerdictMismatch;

/// Distance above β_max probed when certifying.
pub fn certify_probe() -> Rational {
    ratio(1, 1_000_000)
}

pub fn run(global: &Global, command: &Command) -> Result<()> {
    let setting = global.setting()?;
    match command {
        Command::Alloc { mech, profile, format } => alloc(global, &setting, mech, profile, *format),
        Command::Verify { mech, r, expect } => {
            let mech = configured(global, mech)?;
            let r = args::rational(r)?;
            let verifier = verifier(global, &setting, &mech)?;
            let report = verifier.verify(&r)?;
            emit_json(global, &report)?;
            check_expect(expect.as_deref(), &report.verdict.to_string())
        }
        Command::Degree { mech, tolerance } => {
            let mech = configured(global, mech)?;
            let tolerance = args::rational(tolerance)?;
            let interval = verifier(global, &setting, &mech)?.degree(&tolerance)?;
            let mut value = serde_json::to_value(&interval)?;
            value["schema_version"] = json!(SCHEMA_VERSION);
            value["mechanism"] = json!(mech.describe());
            if global.decimals.is_some() {
                value["lo_approx"] = json!(global.render(&interval.lo));
                value["hi_approx"] = json!(global.render(&interval.hi));
            }
            emit_json(global, &value)
        }
        Command::Axioms { mech, f, expect } => {
            let g = configured(global, mech)?;
            let scope = Scope::Exhaustive(global.reduction());
            let mut report = check_axioms(&g, &setting, &scope)?;
            if let Some(f) = f {
                let f = configured(global, f)?;
                let wlv = check_weakly_less_varying(&g, &f, &setting, &scope)?;
                report.verdicts.extend(wlv.verdicts);
                report.verdict = report.verdicts.iter().all(|v| v.holds);
            }
            for v in &report.verdicts {
                eprintln!(
                    "{:<22} {:<5} {}",
                    v.axiom.to_string(),
                    if v.holds { "holds" } else { "fails" },
                    v.subject
                );
            }
            emit_json(global, &report)?;
            check_expect(expect.as_deref(), &report.verdict.to_string())
        }
        Command::Compare { g, f, notion, expect } => {
            let g = configured(global, g)?;
            let f = configured(global, f)?;
            let notion = args::notion(notion)?;
            let report = imperfect_dominance_scan(&g, &f, &setting, notion, global.reduction())?;
            let verdict = serde_json::to_value(report.verdict)?
                .as_str()
                .unwrap_or_default()
                .to_string();
            eprintln!(
                "{verdict}: {} strict, {} equal, {} incomparable, {} violations",
                report.profiles.g_strict,
                report.profiles.equal,
                report.profiles.incomparable,
                report.profiles.violations
            );
            emit_json(global, &report)?;
            check_expect(expect.as_deref(), &verdict)
        }
        Command::BetaMax { pair, r } => {
            let r = args::rational(r)?;
            let solver = solver(global, &setting, pair)?;
            let result = solver.beta_max(&r)?;
            let certificate = if pair.no_certify {
                None
            } else {
                Some(certified(&solver, &r, &result.beta_max)?)
            };
            let mut value = serde_json::to_value(&result)?;
            value["certificate"] = serde_json::to_value(&certificate)?;
            if global.decimals.is_some() {
                value["beta_max_approx"] = json!(global.render(&result.beta_max));
            }
            emit_json(global, &value)
        }
        Command::Curve { pair, grid } => {
            let grid = args::parse_grid(grid)?;
            let solver = solver(global, &setting, pair)?;
            let points = solver.curve(&grid)?;
            if !pair.no_certify {
                for p in &points {
                    certified(&solver, &p.r, &p.beta_max)?;
                }
            }
            emit(global, &curve_csv(&points, global.decimals))
        }
        Command::Reproduce(_) => unreachable!("handled by the reproduce module"),
    }
}

pub fn configured(global: &Global, text: &str) -> Result<Configured> {
    Ok(args::mechanism(text)?.with_options(global.eval_options()))
}

fn verifier(global: &Global, setting: &Setting, mech: &Configured) -> Result<Verifier> {
    let plan = ScanPlan::new(setting, &Scope::Exhaustive(global.reduction()), global.budget)?;
    let table = AllocationTable::build(mech, &plan, Misreports::All)?;
    Ok(Verifier::from_parts(mech.describe(), plan, table))
}

pub fn solver(global: &Global, setting: &Setting, pair: &PairArgs) -> Result<Solver> {
    let f = configured(global, &pair.f)?;
    let g = configured(global, &pair.g)?;
    let options = SolverOptions {
        check_admissibility: !pair.no_admissibility_check,
        profile_budget: global.budget,
    };
    Ok(Solver::new(
        &f,
        &g,
        setting,
        &Scope::Exhaustive(global.reduction()),
        options,
    )?)
}

/// Certificate for `beta` at `r`; an invalid certificate is an error.
pub fn certified(solver: &Solver, r: &Rational, beta: &Rational) -> Result<Certificate> {
    let cert = solver.certify(r, beta, &certify_probe())?;
    if !cert.valid {
        bail!("certificate for beta_max = {beta} at r = {r} failed: {cert:?}");
    }
    Ok(cert)
}

fn alloc(global: &Global, setting: &Setting, mech: &str, profile: &str, format: Format) -> Result<()> {
    let mech = configured(global, mech)?;
    let profile = parse_profile(setting, profile).with_context(|| format!("profile '{profile}'"))?;
    let x = mech.allocate(setting, &profile)?;
    match format {
        Format::Json => {
            let mut value = json!({
                "schema_version": SCHEMA_VERSION,
                "mechanism": mech.describe(),
                "setting": setting,
                "profile": profile.display(setting),
                "allocation": x,
            });
            if global.decimals.is_some() {
                let approx: Vec<Vec<String>> = x.rows().map(|r| r.iter().map(|v| global.render(v)).collect()).collect();
                value["allocation_approx"] = json!(approx);
            }
            emit_json(global, &value)
        }
        Format::Csv => {
            let mut out = String::from("agent");
            for j in 0..setting.objects() {
                out.push(',');
                out.push_str(&setting.label(j));
            }
            out.push('\n');
            for (i, row) in x.rows().enumerate() {
                let _ = write!(out, "{i}");
                for v in row {
                    let _ = write!(out, ",{}", global.render(v));
                }
                out.push('\n');
            }
            emit(global, &out)
        }
    }
}

fn check_expect(expect: Option<&str>, found: &str) -> Result<()> {
    match expect {
        Some(e) if !e.eq_ignore_ascii_case(found) => Err(VerdictMismatch {
            expected: e.to_string(),
            found: found.to_string(),
        }
        .into()),
        _ => Ok(()),
    }
}

fn emit_json<T: Serialize>(global: &Global, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(global, &text)
}

fn emit(global: &Global, text: &str) -> Result<()> {
    match &global.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
