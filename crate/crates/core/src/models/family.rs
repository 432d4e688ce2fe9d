use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainFamily, StochasticMatrix};
use crate::error::{Error, Result};

/// A transform of a base kernel `P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Transform {
    /// `P^k`, `k >= 1`.
    Power(u32),
    /// `a I + (1 - a) P`, `a` in `[0, 1)`.
    Lazy(f64),
}

impl Transform {
    pub fn apply(&self, p: &StochasticMatrix) -> Result<StochasticMatrix> {
        match *self {
            Transform::Power(k) => p.power(k),
            Transform::Lazy(a) => p.lazy(a),
        }
    }
}

impl FromStr for Transform {
    type Err = Error;

    /// `power:K` or `lazy:A`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("transform '{s}': expected power:K or lazy:A"));
        let (kind, arg) = s.trim().split_once(':').ok_or_else(bad)?;
        match kind.trim() {
            "power" => {
                let k: u32 = arg.trim().parse().map_err(|_| bad())?;
                if k == 0 {
                    return Err(bad());
                }
                Ok(Transform::Power(k))
            }
            "lazy" => {
                let a: f64 = arg.trim().parse().map_err(|_| bad())?;
                if !(0.0..1.0).contains(&a) {
                    return Err(bad());
                }
                Ok(Transform::Lazy(a))
            }
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for Transform {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Transform> for String {
    fn from(t: Transform) -> String {
        t.to_string()
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Power(k) => write!(f, "power:{k}"),
            Transform::Lazy(a) => write!(f, "lazy:{a}"),
        }
    }
}

/// `{T_1(P), ..., T_n(P)}`, sharing the stationary law of `P`.
pub fn build_family(p: &StochasticMatrix, spec: &[Transform]) -> Result<ChainFamily> {
    let pi = p.require_stationary()?.clone();
    let members = spec.iter().map(|t| t.apply(p)).collect::<Result<Vec<_>>>()?;
    ChainFamily::new(pi, members)
}

/// Powers `P, P^2, P^4, ..., P^(2^(count-1))`.
pub fn dyadic_powers(count: u32) -> Vec<Transform> {
    (0..count).map(|i| Transform::Power(1 << i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::tests::fixed_chain;

    #[test]
    fn parse_and_display() {
        assert_eq!("power:4".parse::<Transform>().unwrap(), Transform::Power(4));
        assert_eq!(" lazy: 0.25".parse::<Transform>().unwrap(), Transform::Lazy(0.25));
        for bad in ["power:0", "lazy:1", "lazy:-0.1", "cube:3", "power"] {
            assert!(bad.parse::<Transform>().is_err(), "{bad}");
        }
        assert_eq!(Transform::Lazy(0.5).to_string(), "lazy:0.5");
        assert_eq!(dyadic_powers(3), vec![Transform::Power(1), Transform::Power(2), Transform::Power(4)]);
    }

    #[test]
    fn family_examples() {
        let p = fixed_chain();
        let fam = build_family(&p, &[Transform::Power(1)]).unwrap();
        assert_eq!(fam.members()[0], p);

        let id = StochasticMatrix::identity(p.space().clone())
            .with_stationary(p.stationary().unwrap().clone())
            .unwrap();
        let fam = build_family(&id, &[Transform::Lazy(0.5)]).unwrap();
        assert_eq!(fam.members()[0].entries(), id.entries());

        let fam = build_family(&p, &[Transform::Power(2)]).unwrap();
        let n = p.size();
        for x in 0..n {
            for y in 0..n {
                let mut want = 0.0;
                for z in 0..n {
                    want += p.get(x, z) * p.get(z, y);
                }
                assert!((fam.members()[0].get(x, y) - want).abs() < 1e-13);
            }
        }
    }
}
