use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hybrid_core::efficiency::Notion;
use hybrid_core::mechanisms::{EvalOptions, MechanismSpec, RsdEngine};
use hybrid_core::rational::{format_rational, parse_rational};
use hybrid_core::scan::DEFAULT_PROFILE_BUDGET;
use hybrid_core::text::parse_setting;
use hybrid_core::{Rational, Reduction, Setting};

/// Bad input that clap itself cannot catch (grid syntax, flag combinations).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Parser)]
#[command(
    name = "hybridmech",
    version,
    about = "Exact analysis of hybrid one-sided matching mechanisms"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Setting as `n=<agents>,m=<objects>,q=<cap>[,<cap>...]`.
    #[arg(long, global = true, default_value = "n=3,m=3,q=1")]
    pub setting: String,
    /// Add a dummy object that absorbs any supply shortfall.
    #[arg(long, global = true)]
    pub pad_dummy: bool,
    /// Profile-space reduction for exhaustive scans.
    #[arg(long, global = true, value_enum, default_value_t = ReductionArg::None)]
    pub reduction: ReductionArg,
    /// RSD evaluation engine.
    #[arg(long, global = true, value_enum, default_value_t = EngineArg::Recurse)]
    pub engine: EngineArg,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "HYBRIDMECH_JOBS")]
    pub jobs: Option<usize>,
    /// Render rationals as approximate decimals with this many digits.
    #[arg(long, global = true)]
    pub decimals: Option<usize>,
    /// Largest number of canonical profiles a scan may visit.
    #[arg(long, global = true, default_value_t = DEFAULT_PROFILE_BUDGET)]
    pub budget: u128,
    /// Output file (or directory for `reproduce`); stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReductionArg {
    None,
    Anonymous,
    AnonymousNeutral,
}

impl From<ReductionArg> for Reduction {
    fn from(r: ReductionArg) -> Self {
        match r {
            ReductionArg::None => Reduction::None,
            ReductionArg::Anonymous => Reduction::Anonymous,
            ReductionArg::AnonymousNeutral => Reduction::AnonymousNeutral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Recurse,
    Enumerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Allocation of one mechanism at one profile.
    Alloc {
        #[arg(long)]
        mech: String,
        /// Orders separated by `;`, e.g. `a>b>c;b>a>c;b>c>a`.
        #[arg(long)]
        profile: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Exhaustive URBI(r)-partial-strategyproofness check.
    Verify {
        #[arg(long)]
        mech: String,
        #[arg(long)]
        r: String,
        /// Exit with code 1 unless the verdict equals this value.
        #[arg(long)]
        expect: Option<String>,
    },
    /// Degree of strategyproofness by bisection on r.
    Degree {
        #[arg(long)]
        mech: String,
        #[arg(long, default_value = "1/1048576")]
        tolerance: String,
    },
    /// Swap consistency, weak invariance and lower invariance of a mechanism;
    /// with `--f`, also whether `--mech` is weakly less varying than it.
    Axioms {
        #[arg(long)]
        mech: String,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        expect: Option<String>,
    },
    /// Imperfect dominance of `g` over `f` across all profiles.
    Compare {
        #[arg(long)]
        g: String,
        #[arg(long)]
        f: String,
        #[arg(long, default_value = "ordinal")]
        notion: String,
        /// Expected verdict: `strict`, `weak` or `none`.
        #[arg(long)]
        expect: Option<String>,
    },
    /// Largest mixing factor keeping the hybrid URBI(r)-partially strategyproof.
    BetaMax {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        r: String,
    },
    /// β_max over a grid of r values, as CSV `r,beta_max`.
    Curve {
        #[command(flatten)]
        pair: PairArgs,
        /// `lo..hi` (step = 1/denominator of lo), `lo..hi:step`, or a
        /// comma-separated list.
        #[arg(long, default_value = "1/20..1")]
        grid: String,
    },
    /// Regenerate reference artefacts.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PairArgs {
    /// Strategyproof base mechanism.
    #[arg(long)]
    pub f: String,
    /// Manipulable mechanism mixed in with weight β.
    #[arg(long)]
    pub g: String,
    #[arg(long)]
    pub no_certify: bool,
    #[arg(long)]
    pub no_admissibility_check: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub target: Target,
    /// Include the long-running settings.
    #[arg(long)]
    pub large: bool,
    #[arg(long, default_value = "1/20..1")]
    pub grid: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Fig2,
    Fig3,
    Examples,
}

impl Global {
    pub fn setting(&self) -> Result<Setting> {
        parse_setting(&self.setting, self.pad_dummy).with_context(|| format!("setting '{}'", self.setting))
    }

    pub fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            rsd_engine: match self.engine {
                EngineArg::Recurse => RsdEngine::Recurse,
                EngineArg::Enumerate => RsdEngine::Enumerate,
            },
            ..EvalOptions::default()
        }
    }

    pub fn reduction(&self) -> Reduction {
        self.reduction.into()
    }

    pub fn render(&self, x: &Rational) -> String {
        match self.decimals {
            Some(d) => hybrid_core::rational::format_decimal(x, d),
            None => format_rational(x),
        }
    }
}

pub fn mechanism(text: &str) -> Result<MechanismSpec> {
    text.parse::<MechanismSpec>()
        .with_context(|| format!("mechanism '{text}'"))
}

pub fn rational(text: &str) -> Result<Rational> {
    parse_rational(text).with_context(|| format!("number '{text}'"))
}

pub fn notion(text: &str) -> Result<Notion> {
    text.parse::<Notion>().with_context(|| format!("notion '{text}'"))
}

/// Parses a grid of r values; see [`Command::Curve`].
pub fn parse_grid(text: &str) -> Result<Vec<Rational>> {
    let grid = if let Some((lo, rest)) = text.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((hi, step)) => (hi, Some(step)),
            None => (rest, None),
        };
        let lo = rational(lo.trim())?;
        let hi = rational(hi.trim())?;
        let step = match step {
            Some(s) => rational(s.trim())?,
            None => Rational::new(1.into(), lo.denom().clone()),
        };
        if step <= Rational::from_integer(0.into()) || lo > hi {
            return Err(usage(format!("grid '{text}' is empty")));
        }
        let mut out = Vec::new();
        let mut r = lo;
        while r <= hi {
            out.push(r.clone());
            r += &step;
        }
        out
    } else {
        text.split(',')
            .map(|t| rational(t.trim()))
            .collect::<Result<Vec<_>>>()?
    };
    if grid.is_empty() {
        return Err(usage(format!("grid '{text}' is empty")));
    }
    Ok(grid)
}

/// Comma-separated exact rendering that [`parse_grid`] reads back unchanged.
pub fn render_grid(grid: &[Rational]) -> String {
    grid.iter().map(format_rational).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use hybrid_core::rational::ratio;

    #[test]
    fn grid_forms() {
        assert_eq!(
            parse_grid("1/4..1").unwrap(),
            vec![ratio(1, 4), ratio(1, 2), ratio(3, 4), ratio(1, 1)]
        );
        assert_eq!(
            parse_grid("1/2..1:1/4").unwrap(),
            vec![ratio(1, 2), ratio(3, 4), ratio(1, 1)]
        );
        assert_eq!(parse_grid("1/3, 1").unwrap(), vec![ratio(1, 3), ratio(1, 1)]);
        assert_eq!(parse_grid("1/100..1").unwrap().len(), 100);
        assert!(parse_grid("1..1/2").is_err());
    }

    #[test]
    fn grid_round_trips() {
        let g = parse_grid("1/7..1").unwrap();
        assert_eq!(parse_grid(&render_grid(&g)).unwrap(), g);
    }

    #[test]
    fn mechanism_text_round_trips() {
        for text in [
            "rsd",
            "hybrid(rsd,ps,1/3)",
            "rv:10,6,0",
            "hybrid(rsd,hybrid(ps,abm,1/2),0)",
        ] {
            let m = mechanism(text).unwrap();
            assert_eq!(mechanism(&m.to_string()).unwrap(), m);
        }
    }
}
