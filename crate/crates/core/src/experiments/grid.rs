//! One-dimensional sweep grids.
//!
//! A grid is written either as an explicit array (`[0.1, 0.2, 0.5]`) or as
//! a generator string: `linspace:a:b:n`, `logspace:a:b:n` (geometric, both
//! ends positive) or `range:a:b:step` (inclusive of `b` up to rounding).

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    values: Vec<f64>,
}

impl Grid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("grid is empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("grid value {v} is not finite")));
        }
        if let Some(w) = values.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!(
                "grid must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { values })
    }

    pub fn linspace(a: f64, b: f64, n: usize) -> Result<Self> {
        match n {
            0 => Err(Error::Config("linspace needs n >= 1".into())),
            1 => Self::new(vec![a]),
            _ => Self::new(
                (0..n)
                    .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                    .collect(),
            ),
        }
    }

    pub fn logspace(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Config(format!(
                "logspace needs positive ends, got {a} and {b}"
            )));
        }
        let (la, lb) = (a.ln(), b.ln());
        let mut g = Self::linspace(la, lb, n)?;
        for v in &mut g.values {
            *v = v.exp();
        }
        // Pin the ends so that e.g. `logspace:0.05:5:20` really contains 5.
        let last = g.values.len() - 1;
        g.values[0] = a;
        g.values[last] = b;
        Self::new(g.values)
    }

    pub fn range(a: f64, b: f64, step: f64) -> Result<Self> {
        if step.is_nan() || step <= 0.0 || b.is_nan() || b < a {
            return Err(Error::Config(format!(
                "range needs step > 0 and b >= a, got {a}:{b}:{step}"
            )));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize + 1;
        Self::new((0..n).map(|i| a + step * i as f64).collect())
    }

    /// Parses a generator string.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number '{s}' in grid '{spec}'")))
        };
        let count = |s: &str| -> Result<usize> {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad count '{s}' in grid '{spec}'")))
        };
        match parts.as_slice() {
            ["linspace", a, b, n] => Self::linspace(num(a)?, num(b)?, count(n)?),
            ["logspace", a, b, n] => Self::logspace(num(a)?, num(b)?, count(n)?),
            ["range", a, b, s] => Self::range(num(a)?, num(b)?, num(s)?),
            _ => Err(Error::Config(format!(
                "unrecognised grid '{spec}' (expected linspace:a:b:n, logspace:a:b:n or range:a:b:step)"
            ))),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Values as positive integers, for counts and optimal-time indices.
    pub fn as_counts(&self, what: &str) -> Result<Vec<u32>> {
        self.values
            .iter()
            .map(|&v| {
                if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                    Ok(v as u32)
                } else {
                    Err(Error::Config(format!(
                        "{what} entries must be positive integers, got {v}"
                    )))
                }
            })
            .collect()
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v:?}")?;
        }
        write!(f, "]")
    }
}
