use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Maximum number of attempts Bob may use per round before the round restarts.
///
/// `Infinite` is the no cut-off protocol; every formula treats it as the
/// limit `n* -> inf` so both protocols share one code path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cutoff {
    Finite(u64),
    Infinite,
}

impl Cutoff {
    pub fn finite(self) -> Option<u64> {
        match self {
            Cutoff::Finite(n) => Some(n),
            Cutoff::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Cutoff::Infinite)
    }

    /// `n*` as a float, `+inf` for the no cut-off protocol.
    pub fn as_f64(self) -> f64 {
        match self {
            Cutoff::Finite(n) => n as f64,
            Cutoff::Infinite => f64::INFINITY,
        }
    }

    /// `(1 - p)^{n*}` evaluated as `exp(n* log1p(-p))`, zero for `n* = inf` and `p > 0`.
    pub(crate) fn survival(self, p: f64) -> f64 {
        match self {
            Cutoff::Finite(n) => (n as f64 * (-p).ln_1p()).exp(),
            Cutoff::Infinite => {
                if p > 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }
}

impl From<u64> for Cutoff {
    fn from(n: u64) -> Self {
        Cutoff::Finite(n)
    }
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cutoff::Finite(n) => write!(f, "{n}"),
            Cutoff::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid cut-off '{0}': expected a positive integer or 'inf'")]
pub struct ParseCutoffError(String);

impl FromStr for Cutoff {
    type Err = ParseCutoffError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Cutoff::Infinite);
        }
        // accept "1e4" style values as long as they are integral
        let n = t
            .parse::<u64>()
            .ok()
            .or_else(|| {
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.fract() == 0.0 && *v >= 1.0 && *v < 1.8e19)
                    .map(|v| v as u64)
            })
            .ok_or_else(|| ParseCutoffError(s.to_string()))?;
        if n == 0 {
            return Err(ParseCutoffError(s.to_string()));
        }
        Ok(Cutoff::Finite(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        assert_eq!("inf".parse::<Cutoff>().unwrap(), Cutoff::Infinite);
        assert_eq!("1000".parse::<Cutoff>().unwrap(), Cutoff::Finite(1000));
        assert_eq!("1e4".parse::<Cutoff>().unwrap(), Cutoff::Finite(10_000));
        assert!("0".parse::<Cutoff>().is_err());
        assert!("2.5".parse::<Cutoff>().is_err());
        assert_eq!(Cutoff::Finite(7).to_string(), "7");
        assert_eq!(Cutoff::Infinite.to_string(), "inf");
    }

    #[test]
    fn survival_limits() {
        assert_eq!(Cutoff::Infinite.survival(0.1), 0.0);
        assert_eq!(Cutoff::Finite(3).survival(1.0), 0.0);
        let s = Cutoff::Finite(10).survival(0.1);
        assert!((s - 0.9f64.powi(10)).abs() < 1e-15);
    }

    #[test]
    fn ordering_puts_infinite_last() {
        assert!(Cutoff::Finite(u64::MAX) < Cutoff::Infinite);
    }
}
