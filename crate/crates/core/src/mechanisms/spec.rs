use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{check_beta, convex_combine, Allocation, Profile, Setting};
use crate::rational::{format_rational, parse_rational, Rational};

use super::{abm, constant_equal_shares, nbm, ps, rank_value, rsd, validate_valuation, Mechanism, RsdEngine};

/// A named, parameterized mechanism.
///
/// Textual grammar:
/// `rsd | ps | nbm | abm | const | rv:v1,...,vm | hybrid(<spec>,<spec>,<beta>)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MechanismSpec {
    Rsd,
    Ps,
    Nbm,
    Abm,
    Const,
    /// Rank-value mechanism with a weakly decreasing rank valuation.
    Rv(Vec<Rational>),
    Hybrid(Box<MechanismSpec>, Box<MechanismSpec>, Rational),
}

/// Evaluation knobs that do not change a mechanism's output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalOptions {
    pub rsd_engine: RsdEngine,
    /// Largest `n!` the enumerating engines may visit.
    pub ordering_budget: u128,
    /// Largest `m^n` the rank-value search may visit.
    pub rv_budget: u128,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            rsd_engine: RsdEngine::Recurse,
            ordering_budget: 3_628_800,
            rv_budget: 10_000_000,
        }
    }
}

impl MechanismSpec {
    /// The β-hybrid of two specs.
    pub fn hybrid(f: MechanismSpec, g: MechanismSpec, beta: Rational) -> Result<Self> {
        check_beta(&beta)?;
        Ok(MechanismSpec::Hybrid(Box::new(f), Box::new(g), beta))
    }

    pub fn evaluate(&self, setting: &Setting, profile: &Profile, options: &EvalOptions) -> Result<Allocation> {
        if profile.agents() != setting.agents() || profile.objects() != setting.objects() {
            return Err(Error::ProfileLength {
                expected: setting.agents(),
                found: profile.agents(),
            });
        }
        match self {
            MechanismSpec::Rsd => rsd(profile, setting, options.rsd_engine, options.ordering_budget),
            MechanismSpec::Ps => Ok(ps(profile, setting)),
            MechanismSpec::Nbm => nbm(profile, setting, options.ordering_budget),
            MechanismSpec::Abm => abm(profile, setting, options.ordering_budget),
            MechanismSpec::Const => Ok(constant_equal_shares(setting)),
            MechanismSpec::Rv(v) => rank_value(profile, setting, v, options.rv_budget),
            MechanismSpec::Hybrid(f, g, beta) => {
                use num_traits::{One, Zero};
                if beta.is_zero() {
                    return f.evaluate(setting, profile, options);
                }
                if beta.is_one() {
                    return g.evaluate(setting, profile, options);
                }
                let x = f.evaluate(setting, profile, options)?;
                let y = g.evaluate(setting, profile, options)?;
                convex_combine(&x, &y, beta)
            }
        }
    }

    /// Whether every component is anonymous and neutral, i.e. whether the
    /// symmetry reductions are sound for it. Rank-value lotteries over the
    /// whole argmax set are symmetric as well.
    pub fn is_symmetric(&self) -> bool {
        match self {
            MechanismSpec::Hybrid(f, g, _) => f.is_symmetric() && g.is_symmetric(),
            _ => true,
        }
    }

    /// Binds evaluation options, producing a [`Mechanism`].
    pub fn with_options(self, options: EvalOptions) -> Configured {
        Configured { spec: self, options }
    }
}

impl Mechanism for MechanismSpec {
    fn allocate(&self, setting: &Setting, profile: &Profile) -> Result<Allocation> {
        self.evaluate(setting, profile, &EvalOptions::default())
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}

/// A spec together with the options used to evaluate it.
#[derive(Debug, Clone)]
pub struct Configured {
    pub spec: MechanismSpec,
    pub options: EvalOptions,
}

impl Mechanism for Configured {
    fn allocate(&self, setting: &Setting, profile: &Profile) -> Result<Allocation> {
        self.spec.evaluate(setting, profile, &self.options)
    }

    fn describe(&self) -> String {
        self.spec.to_string()
    }
}

impl fmt::Display for MechanismSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MechanismSpec::Rsd => f.write_str("rsd"),
            MechanismSpec::Ps => f.write_str("ps"),
            MechanismSpec::Nbm => f.write_str("nbm"),
            MechanismSpec::Abm => f.write_str("abm"),
            MechanismSpec::Const => f.write_str("const"),
            MechanismSpec::Rv(v) => {
                let vals: Vec<String> = v.iter().map(format_rational).collect();
                write!(f, "rv:{}", vals.join(","))
            }
            MechanismSpec::Hybrid(a, b, beta) => {
                write!(f, "hybrid({a},{b},{})", format_rational(beta))
            }
        }
    }
}

impl FromStr for MechanismSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut parser = Parser { text: &text, pos: 0 };
        let spec = parser.spec()?;
        if parser.pos != text.len() {
            return Err(Error::parse(parser.pos, "trailing input after mechanism"));
        }
        Ok(spec)
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(Error::parse(self.pos, format!("expected '{token}'")))
        }
    }

    fn spec(&mut self) -> Result<MechanismSpec> {
        let start = self.pos;
        if self.eat("hybrid(") {
            let f = self.spec()?;
            self.expect(",")?;
            let g = self.spec()?;
            self.expect(",")?;
            let beta_pos = self.pos;
            let beta_text = self.number()?.to_string();
            self.expect(")")?;
            let beta = parse_rational(&beta_text).map_err(|_| Error::parse(beta_pos, "bad mixing factor"))?;
            check_beta(&beta).map_err(|e| Error::parse(beta_pos, e.to_string()))?;
            return Ok(MechanismSpec::Hybrid(Box::new(f), Box::new(g), beta));
        }
        if self.eat("rv:") {
            let mut values = Vec::new();
            loop {
                let pos = self.pos;
                let text = self.number()?;
                values.push(parse_rational(text).map_err(|_| Error::parse(pos, "bad rank value"))?);
                // a following number continues the valuation unless it is the
                // final mixing factor of an enclosing hybrid
                let save = self.pos;
                if self.eat(",") && self.starts_number() && !self.number_closes_hybrid() {
                    continue;
                }
                self.pos = save;
                break;
            }
            validate_valuation(&values, values.len()).map_err(|e| Error::parse(start, e.to_string()))?;
            return Ok(MechanismSpec::Rv(values));
        }
        for (name, spec) in [
            ("rsd", MechanismSpec::Rsd),
            ("ps", MechanismSpec::Ps),
            ("nbm", MechanismSpec::Nbm),
            ("abm", MechanismSpec::Abm),
            ("const", MechanismSpec::Const),
        ] {
            if self.eat(name) {
                return Ok(spec);
            }
        }
        Err(Error::parse(start, "unknown mechanism"))
    }

    fn starts_number(&self) -> bool {
        self.rest()
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '.')
    }

    /// True if the number at the cursor is directly followed by `)`.
    fn number_closes_hybrid(&self) -> bool {
        let len = self.number_len();
        self.rest()[len..].starts_with(')')
    }

    fn number_len(&self) -> usize {
        self.rest()
            .find(|c: char| !(c.is_ascii_digit() || c == '/' || c == '.' || c == '-'))
            .unwrap_or(self.rest().len())
    }

    fn number(&mut self) -> Result<&str> {
        let len = self.number_len();
        if len == 0 {
            return Err(Error::parse(self.pos, "expected a number"));
        }
        let start = self.pos;
        self.pos += len;
        Ok(&self.text[start..start + len])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn parses_grammar() {
        assert_eq!("rsd".parse::<MechanismSpec>().unwrap(), MechanismSpec::Rsd);
        assert_eq!("const".parse::<MechanismSpec>().unwrap(), MechanismSpec::Const);
        assert_eq!(
            "rv:10,6,0".parse::<MechanismSpec>().unwrap(),
            MechanismSpec::Rv(vec![int(10), int(6), int(0)])
        );
        let h: MechanismSpec = "hybrid(rsd,ps,1/2)".parse().unwrap();
        assert_eq!(
            h,
            MechanismSpec::hybrid(MechanismSpec::Rsd, MechanismSpec::Ps, ratio(1, 2)).unwrap()
        );
        let nested: MechanismSpec = "hybrid(rv:10,6,0,hybrid(rsd,abm,0/1),3/4)".parse().unwrap();
        assert_eq!(nested.to_string(), "hybrid(rv:10,6,0,hybrid(rsd,abm,0),3/4)");
        let tail: MechanismSpec = "hybrid(rsd,rv:10,6,0,1/4)".parse().unwrap();
        assert_eq!(tail.to_string(), "hybrid(rsd,rv:10,6,0,1/4)");
    }

    #[test]
    fn rejects_bad_specs() {
        assert!("xyz".parse::<MechanismSpec>().is_err());
        assert!("hybrid(rsd,ps,3/2)".parse::<MechanismSpec>().is_err());
        assert!("hybrid(rsd,ps)".parse::<MechanismSpec>().is_err());
        assert!("rv:0,1".parse::<MechanismSpec>().is_err());
        assert!("rsdx".parse::<MechanismSpec>().is_err());
        assert!(MechanismSpec::hybrid(MechanismSpec::Rsd, MechanismSpec::Ps, int(2)).is_err());
    }
}
