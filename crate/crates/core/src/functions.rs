//! Built-in test functions, addressable by short names such as `cone:0.2`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::space::Grid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    /// `Π sin(π x_i)`.
    SinProd,
    /// `max(0, 1 - |x|/R)`.
    Cone { radius: f64 },
    /// `max(0, 1 - |x|²/R²)`.
    Hat { radius: f64 },
    /// `min(1, k|x|)`.
    Fk { k: f64 },
    /// `x_axis`.
    Coord { axis: usize },
    Const { value: f64 },
}

impl Generator {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let norm = || x.iter().map(|v| v * v).sum::<f64>().sqrt();
        match *self {
            Generator::SinProd => x.iter().map(|v| (PI * v).sin()).product(),
            Generator::Cone { radius } => (1.0 - norm() / radius).max(0.0),
            Generator::Hat { radius } => (1.0 - norm().powi(2) / (radius * radius)).max(0.0),
            Generator::Fk { k } => (k * norm()).min(1.0),
            Generator::Coord { axis } => x.get(axis).copied().unwrap_or(0.0),
            Generator::Const { value } => value,
        }
    }

    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        grid.sample(|x| self.eval(x))
    }
}

impl FromStr for Generator {
    type Err = Error;

    /// `sinprod`, `cone:R`, `hat:R`, `fk:k`, `coord:i`, `const:c`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let num = || -> Result<f64> {
            arg.parse::<f64>()
                .map_err(|_| Error::Parse(format!("function {name:?} needs a numeric argument, got {arg:?}")))
        };
        let positive = |v: f64| -> Result<f64> {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse(format!("function {name:?} needs a positive argument, got {v}")))
            }
        };
        match name {
            "sinprod" if arg.is_empty() => Ok(Generator::SinProd),
            "cone" => Ok(Generator::Cone { radius: positive(num()?)? }),
            "hat" => Ok(Generator::Hat { radius: positive(num()?)? }),
            "fk" => Ok(Generator::Fk { k: positive(num()?)? }),
            "coord" => arg
                .parse::<usize>()
                .map(|axis| Generator::Coord { axis })
                .map_err(|_| Error::Parse(format!("coord needs an axis index, got {arg:?}"))),
            "const" => Ok(Generator::Const { value: num()? }),
            _ => Err(Error::Parse(format!("unknown function {s:?}"))),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::SinProd => write!(f, "sinprod"),
            Generator::Cone { radius } => write!(f, "cone:{radius}"),
            Generator::Hat { radius } => write!(f, "hat:{radius}"),
            Generator::Fk { k } => write!(f, "fk:{k}"),
            Generator::Coord { axis } => write!(f, "coord:{axis}"),
            Generator::Const { value } => write!(f, "const:{value}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_evaluates() {
        for s in ["sinprod", "cone:0.2", "hat:0.5", "fk:8", "coord:1", "const:-2"] {
            let g: Generator = s.parse().unwrap();
            assert_eq!(g.to_string().parse::<Generator>().unwrap(), g);
        }
        assert_eq!("fk:4".parse::<Generator>().unwrap().eval(&[0.1, 0.0]), 0.4);
        assert_eq!("fk:4".parse::<Generator>().unwrap().eval(&[0.5, 0.5]), 1.0);
        assert_eq!("cone:0.5".parse::<Generator>().unwrap().eval(&[0.0, 0.25]), 0.5);
        assert!("cone:-1".parse::<Generator>().is_err());
        assert!("blob".parse::<Generator>().is_err());
    }
}
