//! The tail bound for `P(d_N(P_λ ∩ Q, Q) >= ε)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chainstats::BoundParams;
use crate::error::{Error, Result};

/// How `exp(-C2 ε² λ^{1/d} / log³λ ε^d)` is read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundParse {
    /// `ε^d` is a separate factor of the denominator: `log³(λ) · ε^d`.
    #[default]
    A,
    /// `ε^d` sits inside the logarithm: `log³(λ ε^d)`.
    B,
}

impl FromStr for BoundParse {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(BoundParse::A),
            "B" | "b" => Ok(BoundParse::B),
            _ => Err(Error::invalid(format!("bound parse must be A or B, got {s:?}"))),
        }
    }
}

impl fmt::Display for BoundParse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundParse::A => "A",
            BoundParse::B => "B",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundEval {
    pub value: f64,
    /// Whether `K λ^{-1/2d} <= ε <= 8 K log λ`.
    pub in_window: bool,
    pub window: (f64, f64),
}

/// `C1 h^{2d+1} ε^{2(1-d)} λ^{1/d} exp(-C2 ε² λ^{1/d} / (log³λ ε^d))`.
pub fn theorem_bound(eps: f64, lambda: f64, dim: usize, h: f64, params: &BoundParams, parse: BoundParse) -> Result<BoundEval> {
    theorem_bound_eps_power(eps, lambda, dim, h, params, parse, dim as f64)
}

/// The same bound with `ε^p` in place of `ε^d` inside the exponential; the
/// lattice-pair estimate carries `p = 2d`.
pub fn theorem_bound_eps_power(
    eps: f64,
    lambda: f64,
    dim: usize,
    h: f64,
    params: &BoundParams,
    parse: BoundParse,
    power: f64,
) -> Result<BoundEval> {
    if !(eps > 0.0 && h > 0.0 && dim >= 1 && eps.is_finite() && h.is_finite()) {
        return Err(Error::invalid(format!("ε and h must be positive, got ε={eps}, h={h}")));
    }
    if !(lambda > 1.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("λ must exceed 1 for log λ > 0, got {lambda}")));
    }
    params.validate()?;
    let d = dim as f64;
    let root = lambda.powf(1.0 / d);
    let log3 = match parse {
        BoundParse::A => lambda.ln().powi(3) * eps.powf(power),
        BoundParse::B => (lambda * eps.powf(power)).ln().powi(3),
    };
    let prefactor = params.c1 * h.powf(2.0 * d + 1.0) * eps.powf(2.0 * (1.0 - d)) * root;
    let value = prefactor * (-params.c2 * eps * eps * root / log3).exp();
    let window = (params.k * lambda.powf(-1.0 / (2.0 * d)), 8.0 * params.k * lambda.ln());
    Ok(BoundEval {
        value,
        in_window: window.0 <= eps && eps <= window.1,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> BoundParams {
        BoundParams::new(2f64.sqrt(), 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn hand_value() {
        let b = theorem_bound(1.0, std::f64::consts::E, 2, 1.0, &unit(), BoundParse::A).unwrap();
        assert!((b.value - 0.3171).abs() < 1e-4, "{}", b.value);
        let want = 1f64.exp().sqrt() * (-(1f64.exp().sqrt())).exp();
        assert!((b.value - want).abs() < 1e-14);
    }

    #[test]
    fn h_scaling() {
        let a = theorem_bound(0.5, 1e4, 2, 1.0, &unit(), BoundParse::A).unwrap().value;
        let b = theorem_bound(0.5, 1e4, 2, 2.0, &unit(), BoundParse::A).unwrap().value;
        assert!((b / a - 32.0).abs() < 1e-9);
    }

    #[test]
    fn large_eps_vanishes() {
        let at = |eps: f64| theorem_bound(eps, 1e6, 2, 1.0, &unit(), BoundParse::A).unwrap();
        assert!(at(100.0).in_window);
        let values: Vec<f64> = [1.0, 3.0, 10.0, 30.0, 100.0].iter().map(|&e| at(e).value).collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
        assert!(values[4] < 1e-3 * values[0]);
    }

    #[test]
    fn parses_differ() {
        let a = theorem_bound(0.5, 1e4, 2, 1.0, &unit(), BoundParse::A).unwrap().value;
        let b = theorem_bound(0.5, 1e4, 2, 1.0, &unit(), BoundParse::B).unwrap().value;
        assert_ne!(a, b);
        assert_eq!("B".parse::<BoundParse>().unwrap(), BoundParse::B);
        assert!("C".parse::<BoundParse>().is_err());
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(theorem_bound(0.0, 1e4, 2, 1.0, &unit(), BoundParse::A).is_err());
        assert!(theorem_bound(0.5, 1.0, 2, 1.0, &unit(), BoundParse::A).is_err());
        assert!(theorem_bound(0.5, 1e4, 2, -1.0, &unit(), BoundParse::A).is_err());
    }

    #[test]
    fn window_flag() {
        let b = theorem_bound(1e-3, 1e4, 2, 1.0, &unit(), BoundParse::A).unwrap();
        assert!(!b.in_window);
    }
}
