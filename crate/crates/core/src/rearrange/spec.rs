use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rearrangement-invariant norm, evaluated on decreasing rearrangements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RISpaceSpec {
    Lp { p: f64 },
    Lorentz { p: f64, q: f64 },
    Linf,
    /// Logarithmically weighted `f**` integral over `(0, domain]`.
    /// `domain = None` uses the domain of whatever function is measured.
    Hbw { s: f64, domain: Option<f64> },
}

impl RISpaceSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::UnsupportedSpec(msg));
        match *self {
            RISpaceSpec::Lp { p } if !(p >= 1.0 && p.is_finite()) => bad(format!("L^p needs 1 <= p < inf, got {p}")),
            RISpaceSpec::Lorentz { p, q } if !(p >= 1.0 && p.is_finite()) => {
                bad(format!("Lorentz L^(p,q) needs 1 <= p < inf, got p = {p} (q = {q})"))
            }
            RISpaceSpec::Lorentz { q, .. } if !(q >= 1.0 && q.is_finite()) => {
                bad(format!("Lorentz L^(p,q) needs 1 <= q < inf, got q = {q}"))
            }
            RISpaceSpec::Hbw { s, .. } if !(s > 1.0 && s.is_finite()) => bad(format!("HBW needs s > 1, got {s}")),
            RISpaceSpec::Hbw { domain: Some(t), .. } if !(t > 0.0 && t.is_finite()) => {
                bad(format!("HBW needs a positive domain, got {t}"))
            }
            _ => Ok(()),
        }
    }
}

impl FromStr for RISpaceSpec {
    type Err = Error;

    /// `lp:2`, `lorentz:2,1`, `linf`, `hbw:2,4.0` (or `hbw:2,T` to follow the measured function).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (kind, args) = s.split_once(':').unwrap_or((s.as_str(), ""));
        let nums: Vec<&str> = if args.is_empty() { vec![] } else { args.split(',').map(str::trim).collect() };
        let num = |x: &str| -> Result<f64> {
            match x {
                "inf" | "infinity" => Ok(f64::INFINITY),
                _ => x.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {x:?} in space spec"))),
            }
        };
        let spec = match (kind, nums.as_slice()) {
            ("lp", ["inf"]) | ("linf", []) => RISpaceSpec::Linf,
            ("lp", [p]) => RISpaceSpec::Lp { p: num(p)? },
            ("lorentz", [p, q]) => RISpaceSpec::Lorentz { p: num(p)?, q: num(q)? },
            ("hbw", [s]) | ("hbw", [s, "t"]) => RISpaceSpec::Hbw { s: num(s)?, domain: None },
            ("hbw", [s, t]) => RISpaceSpec::Hbw { s: num(s)?, domain: Some(num(t)?) },
            _ => return Err(Error::Parse(format!("unrecognized space spec {s:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for RISpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RISpaceSpec::Lp { p } => write!(f, "lp:{p}"),
            RISpaceSpec::Lorentz { p, q } => write!(f, "lorentz:{p},{q}"),
            RISpaceSpec::Linf => write!(f, "linf"),
            RISpaceSpec::Hbw { s, domain: Some(t) } => write!(f, "hbw:{s},{t}"),
            RISpaceSpec::Hbw { s, domain: None } => write!(f, "hbw:{s},T"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cli_syntax() {
        assert_eq!("lp:2".parse::<RISpaceSpec>().unwrap(), RISpaceSpec::Lp { p: 2.0 });
        assert_eq!("lorentz:2,1".parse::<RISpaceSpec>().unwrap(), RISpaceSpec::Lorentz { p: 2.0, q: 1.0 });
        assert_eq!("linf".parse::<RISpaceSpec>().unwrap(), RISpaceSpec::Linf);
        assert_eq!(
            "hbw:2,4".parse::<RISpaceSpec>().unwrap(),
            RISpaceSpec::Hbw { s: 2.0, domain: Some(4.0) }
        );
        assert_eq!("hbw:3,T".parse::<RISpaceSpec>().unwrap(), RISpaceSpec::Hbw { s: 3.0, domain: None });
        for spec in ["lp:2", "lorentz:2,1", "linf", "hbw:2,4", "hbw:3,T"] {
            let parsed: RISpaceSpec = spec.parse().unwrap();
            assert_eq!(parsed.to_string().parse::<RISpaceSpec>().unwrap(), parsed);
        }
    }

    #[test]
    fn rejects_unsupported() {
        assert!(matches!("lorentz:2,inf".parse::<RISpaceSpec>(), Err(Error::UnsupportedSpec(_))));
        assert!(matches!("lp:0.5".parse::<RISpaceSpec>(), Err(Error::UnsupportedSpec(_))));
        assert!(matches!("hbw:1,2".parse::<RISpaceSpec>(), Err(Error::UnsupportedSpec(_))));
        assert!(matches!("orlicz:2".parse::<RISpaceSpec>(), Err(Error::Parse(_))));
    }
}
