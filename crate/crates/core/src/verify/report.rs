use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    ReportOnly,
}

/// The ball realizing an infinite or worst ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub center: usize,
    #[serde(with = "num")]
    pub radius: f64,
}

/// Values of both sides outside the validated window; never folded into `best_constant`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    #[serde(with = "num::vec")]
    pub t: Vec<f64>,
    #[serde(with = "num::vec")]
    pub lhs: Vec<f64>,
    #[serde(with = "num::vec")]
    pub rhs: Vec<f64>,
    #[serde(with = "num::vec")]
    pub ratio: Vec<f64>,
}

impl Curve {
    pub fn new(t: Vec<f64>, lhs: Vec<f64>, rhs: Vec<f64>) -> Self {
        let ratio = lhs.iter().zip(&rhs).map(|(&l, &r)| ratio(l, r)).collect();
        Self { t, lhs, rhs, ratio }
    }
}

/// Both sides of an inequality on a grid of masses (or ball ids), with the worst ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    /// Validated range `(0, c2 μ(B0))`.
    pub window: Option<[f64; 2]>,
    #[serde(with = "num::vec")]
    pub t_grid: Vec<f64>,
    #[serde(with = "num::vec")]
    pub lhs: Vec<f64>,
    #[serde(with = "num::vec")]
    pub rhs: Vec<f64>,
    #[serde(with = "num::vec")]
    pub ratio: Vec<f64>,
    #[serde(with = "num")]
    pub best_constant: f64,
    pub pass: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Curve>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// `lhs / rhs`, with `0/0 = 0` and `x/0 = ∞`.
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

impl InequalityReport {
    pub fn new(name: &str, t_grid: Vec<f64>, lhs: Vec<f64>, rhs: Vec<f64>) -> Self {
        debug_assert!(t_grid.len() == lhs.len() && lhs.len() == rhs.len());
        let curve = Curve::new(t_grid, lhs, rhs);
        let best_constant = curve.ratio.iter().copied().fold(0.0, f64::max);
        Self {
            name: name.into(),
            params: BTreeMap::new(),
            window: None,
            t_grid: curve.t,
            lhs: curve.lhs,
            rhs: curve.rhs,
            ratio: curve.ratio,
            best_constant,
            pass: Verdict::ReportOnly,
            witness: None,
            diagnostics: None,
            notes: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }

    pub fn with_window(mut self, lo: f64, hi: f64) -> Self {
        self.window = Some([lo, hi]);
        self
    }

    /// Sets `pass` by comparing `best_constant` with `tolerance`.
    pub fn judge(mut self, tolerance: f64) -> Self {
        self.pass = if self.best_constant <= tolerance { Verdict::Pass } else { Verdict::Fail };
        self.params.insert("tolerance".into(), tolerance.into());
        self
    }

    /// Index of the entry attaining `best_constant`.
    pub fn argmax(&self) -> Option<usize> {
        self.ratio
            .iter()
            .enumerate()
            .filter(|(_, r)| **r == self.best_constant)
            .map(|(i, _)| i)
            .next()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,lhs,rhs,ratio\n");
        for i in 0..self.t_grid.len() {
            out.push_str(&format!("{},{},{},{}\n", self.t_grid[i], self.lhs[i], self.rhs[i], self.ratio[i]));
        }
        out
    }
}

pub(crate) fn check_window(c2: f64) -> Result<()> {
    if c2 > 0.0 && c2 <= 1.0 {
        Ok(())
    } else {
        Err(Error::Argument(format!("c2 must lie in (0, 1], got {c2}")))
    }
}

/// JSON numbers for finite values, the strings `"inf"`, `"-inf"`, `"nan"` otherwise.
pub(crate) mod num {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    fn to_repr(v: f64) -> Repr {
        if v.is_finite() {
            Repr::Num(v)
        } else if v.is_nan() {
            Repr::Text("nan".into())
        } else if v > 0.0 {
            Repr::Text("inf".into())
        } else {
            Repr::Text("-inf".into())
        }
    }

    fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(v) => Ok(v),
            Repr::Text(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(E::custom(format!("expected a number, got {s:?}"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|x| to_repr(*x)))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Vec::<Repr>::deserialize(d)?.into_iter().map(from_repr).collect()
        }
    }
}
