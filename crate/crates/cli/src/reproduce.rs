//! `reproduce fig2 | fig3 | examples`: regenerates curve data and re-checks
//! the worked examples, writing everything under one output directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::json;

use hybrid_core::efficiency::{ordinal_dominance, rank_dominance, DominanceResult};
use hybrid_core::mechanisms::Mechanism;
use hybrid_core::rational::{format_rational, parse_rational, ratio};
use hybrid_core::solver::{curve_csv, CurvePoint, Solver, SolverOptions};
use hybrid_core::text::{parse_profile, parse_setting};
use hybrid_core::{Allocation, Rational, Reduction, Scope, Setting, SCHEMA_VERSION};

use crate::args::{self, EngineArg, Global, ReproduceArgs, Target};
use crate::commands::{certified, configured};

pub fn run(global: &Global, r: &ReproduceArgs) -> Result<()> {
    let dir = global.out.clone().unwrap_or_else(|| PathBuf::from("reproduce-out"));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut log = Log::default();
    match r.target {
        Target::Examples => examples(global, &mut log)?,
        Target::Fig2 => fig2(global, r, &dir, &mut log)?,
        Target::Fig3 => fig3(global, r, &dir, &mut log)?,
    }
    let name = match r.target {
        Target::Examples => "examples",
        Target::Fig2 => "fig2",
        Target::Fig3 => "fig3",
    };
    fs::write(dir.join(format!("{name}.txt")), &log.text)?;
    if log.failed > 0 {
        bail!("{} assertion(s) failed", log.failed);
    }
    Ok(())
}

/// Accumulates PASS/FAIL/NOTE lines, echoing each one to stdout.
#[derive(Default)]
struct Log {
    text: String,
    failed: usize,
}

impl Log {
    fn check(&mut self, ok: bool, what: impl AsRef<str>) {
        self.line(if ok { "PASS" } else { "FAIL" }, what.as_ref());
        if !ok {
            self.failed += 1;
        }
    }

    fn note(&mut self, what: impl AsRef<str>) {
        self.line("NOTE", what.as_ref());
    }

    fn line(&mut self, tag: &str, what: &str) {
        println!("{tag}  {what}");
        let _ = writeln!(self.text, "{tag}  {what}");
    }
}

fn matrix(rows: &[&[&str]]) -> Allocation {
    Allocation::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|v| parse_rational(v).expect("literal")).collect())
            .collect(),
    )
    .expect("literal matrix")
}

fn allocate(global: &Global, mech: &str, setting: &Setting, profile: &str) -> Result<Allocation> {
    let m = configured(global, mech)?;
    let p = parse_profile(setting, profile)?;
    Ok(m.allocate(setting, &p)?)
}

fn examples(global: &Global, log: &mut Log) -> Result<()> {
    // Four agents, three objects, two copies of c.
    let s = parse_setting("n=4,m=3,q=1,1,2", false)?;
    let p = "a>b>c;a>b>c;b>a>c;b>a>c";
    let expected_ps = matrix(&[
        &["1/2", "0", "1/2"],
        &["1/2", "0", "1/2"],
        &["0", "1/2", "1/2"],
        &["0", "1/2", "1/2"],
    ]);
    let expected_rsd = matrix(&[
        &["5/12", "1/12", "1/2"],
        &["5/12", "1/12", "1/2"],
        &["1/12", "5/12", "1/2"],
        &["1/12", "5/12", "1/2"],
    ]);
    let ps1 = allocate(global, "ps", &s, p)?;
    let rsd1 = allocate(global, "rsd", &s, p)?;
    log.check(ps1 == expected_ps, format!("example 1: ps at {p} (q=1,1,2)"));
    log.check(rsd1 == expected_rsd, format!("example 1: rsd at {p} (q=1,1,2)"));
    let profile = parse_profile(&s, p)?;
    log.check(
        ordinal_dominance(&ps1, &rsd1, &profile)? == DominanceResult::StrictDominates,
        "example 1: ps strictly ordinally dominates rsd",
    );

    let s = Setting::unit(3, 3)?;
    let p = "a>b>c;b>a>c;b>c>a";
    let eat = matrix(&[&["3/4", "0", "1/4"], &["1/4", "1/2", "1/4"], &["0", "1/2", "1/2"]]);
    let serial = matrix(&[&["5/6", "0", "1/6"], &["1/6", "1/2", "1/3"], &["0", "1/2", "1/2"]]);
    let ps2 = allocate(global, "ps", &s, p)?;
    let rsd2 = allocate(global, "rsd", &s, p)?;
    log.check(ps2 == eat, format!("example 2: ps at {p}"));
    log.check(rsd2 == serial, format!("example 2: rsd at {p}"));
    let profile = parse_profile(&s, p)?;
    log.check(
        ordinal_dominance(&ps2, &rsd2, &profile)? == DominanceResult::Incomparable,
        "example 2: ps and rsd are ordinally incomparable",
    );
    log.check(
        rank_dominance(&rsd2, &ps2, &profile)? == DominanceResult::StrictDominates,
        "example 2: rsd strictly rank-dominates ps",
    );
    let zero_mix = allocate(global, "hybrid(rsd,ps,0)", &s, p)?;
    log.check(zero_mix == rsd2, "example 2: hybrid(rsd,ps,0) equals rsd");

    let truth = "a>b>c;c>a>b;c>a>b";
    let lie = "a>c>b;c>a>b;c>a>b";
    let rv_truth = allocate(global, "rv:10,6,0", &s, truth)?;
    let rv_lie = allocate(global, "rv:10,6,0", &s, lie)?;
    let one = Rational::from_integer(1.into());
    let zero = Rational::from_integer(0.into());
    log.check(
        rv_truth.row(0) == [zero.clone(), one.clone(), zero.clone()],
        format!("example 3: rank value (10,6,0) gives agent 1 object b at {truth}"),
    );
    log.check(
        rv_lie.row(0) == [one, zero.clone(), zero],
        "example 3: reporting a>c>b gets agent 1 object a",
    );

    let s = Setting::unit(6, 6)?;
    let truth = "a>b>c>d>e>f;a>b>c>d>e>f;c>b>f>d>a>e;c>b>f>d>a>e;c>b>f>d>a>e;c>b>f>d>a>e";
    let lie = "a>b>d>c>e>f;a>b>c>d>e>f;c>b>f>d>a>e;c>b>f>d>a>e;c>b>f>d>a>e;c>b>f>d>a>e";
    let before: Vec<Rational> = ["1/2", "1/10", "0", "7/30", "1/6", "0"]
        .iter()
        .map(|v| parse_rational(v).unwrap())
        .collect();
    let after: Vec<Rational> = ["1/2", "1/10", "0", "2/5", "0", "0"]
        .iter()
        .map(|v| parse_rational(v).unwrap())
        .collect();
    let nbm_truth = allocate(global, "nbm", &s, truth)?;
    let nbm_lie = allocate(global, "nbm", &s, lie)?;
    log.check(
        nbm_truth.row(0) == &before[..],
        "example 4: nbm truthful row of agent 1",
    );
    log.check(
        nbm_lie.row(0) == &after[..],
        "example 4: nbm row of agent 1 after swapping c and d",
    );
    log.check(
        allocate(global, "rsd", &s, truth)?.row(0) == &before[..]
            && allocate(global, "rsd", &s, lie)?.row(0) == &before[..],
        "example 4: rsd row of agent 1 is unchanged by the swap",
    );
    Ok(())
}

/// One certified curve, written as `<stem>.csv`.
fn curve(
    global: &Global,
    setting: &Setting,
    reduction: Reduction,
    (f, g): (&str, &str),
    grid: &[Rational],
    dir: &Path,
    stem: &str,
) -> Result<Vec<CurvePoint>> {
    let f = configured(global, f)?;
    let g = configured(global, g)?;
    let options = SolverOptions {
        check_admissibility: true,
        profile_budget: global.budget,
    };
    let solver = Solver::new(&f, &g, setting, &Scope::Exhaustive(reduction), options)?;
    let points = solver.curve(grid)?;
    for p in &points {
        certified(&solver, &p.r, &p.beta_max)?;
    }
    fs::write(dir.join(format!("{stem}.csv")), curve_csv(&points, global.decimals))?;
    Ok(points)
}

fn at(points: &[CurvePoint], r: &Rational) -> Option<Rational> {
    points.iter().find(|p| &p.r == r).map(|p| p.beta_max.clone())
}

fn write_config(dir: &Path, name: &str, target: &str, grid: &[Rational], settings: &[String]) -> Result<()> {
    let config = json!({
        "schema_version": SCHEMA_VERSION,
        "target": target,
        "grid": args::render_grid(grid),
        "settings": settings,
    });
    fs::write(dir.join(name), serde_json::to_string_pretty(&config)? + "\n")?;
    Ok(())
}

fn fig2(global: &Global, r: &ReproduceArgs, dir: &Path, log: &mut Log) -> Result<()> {
    let mut grid = args::parse_grid(&r.grid)?;
    let anchor = ratio(3, 4);
    if !grid.contains(&anchor) {
        grid.push(anchor.clone());
        grid.sort();
    }
    let sizes: &[usize] = if r.large { &[3, 4, 5] } else { &[3, 4] };
    let settings: Vec<String> = sizes.iter().map(|n| format!("n={n},m={n},q=1")).collect();
    write_config(dir, "fig2.json", "fig2", &grid, &settings)?;
    for &n in sizes {
        let s = Setting::unit(n, n)?;
        // Symmetric mechanisms: the anonymous reduction is exact and keeps
        // n = m = 4 within the default budget.
        let reduction = if n >= 5 {
            Reduction::AnonymousNeutral
        } else {
            Reduction::Anonymous
        };
        for g in ["ps", "abm"] {
            let points = curve(
                global,
                &s,
                reduction,
                ("rsd", g),
                &grid,
                dir,
                &format!("fig2_rsd_{g}_n{n}"),
            )?;
            let last = points.last().expect("non-empty grid");
            log.check(
                last.r != Rational::from_integer(1.into()) || last.beta_max == Rational::from_integer(0.into()),
                format!(
                    "fig2 n=m={n} (rsd,{g}): beta_max at r=1 is {}",
                    format_rational(&last.beta_max)
                ),
            );
            let value = at(&points, &anchor).expect("anchor on grid");
            let shown = format!(
                "{} (~{})",
                format_rational(&value),
                hybrid_core::rational::format_decimal(&value, 4)
            );
            if n == 4 && g == "ps" {
                log.check(
                    value >= ratio(3, 10),
                    format!("fig2 n=m=4 (rsd,ps): beta_max at r=3/4 is {shown}, at least 3/10"),
                );
            } else {
                log.note(format!("fig2 n=m={n} (rsd,{g}): beta_max at r=3/4 is {shown}"));
            }
        }
    }
    Ok(())
}

fn fig3(global: &Global, r: &ReproduceArgs, dir: &Path, log: &mut Log) -> Result<()> {
    if global.engine != EngineArg::Recurse {
        return Err(args::usage("fig3 requires the recurse RSD engine"));
    }
    let grid = args::parse_grid(&r.grid)?;
    let copies: &[u64] = if r.large { &[2, 3, 4] } else { &[2, 3] };
    let settings: Vec<String> = copies.iter().map(|q| format!("n={},m=3,q={q}", 3 * q)).collect();
    write_config(dir, "fig3.json", "fig3", &grid, &settings)?;
    let mut curves = Vec::new();
    for (&q, text) in copies.iter().zip(&settings) {
        let s = parse_setting(text, false)?;
        let points = curve(
            global,
            &s,
            Reduction::Anonymous,
            ("rsd", "ps"),
            &grid,
            dir,
            &format!("fig3_rsd_ps_q{q}"),
        )?;
        log.note(format!(
            "fig3 {text}: beta_max at r=1 is {}",
            format_rational(&points.last().expect("non-empty grid").beta_max)
        ));
        curves.push((q, points));
    }
    for pair in curves.windows(2) {
        let (q_lo, lo) = &pair[0];
        let (q_hi, hi) = &pair[1];
        let below: Vec<String> = lo
            .iter()
            .zip(hi)
            .filter(|(a, b)| b.beta_max < a.beta_max)
            .map(|(a, _)| format_rational(&a.r))
            .collect();
        if below.is_empty() {
            log.note(format!(
                "fig3: curve for q={q_hi} lies weakly above q={q_lo} on the whole grid"
            ));
        } else {
            log.note(format!(
                "fig3: curve for q={q_hi} dips below q={q_lo} at r in {{{}}}",
                below.join(", ")
            ));
        }
    }
    Ok(())
}
