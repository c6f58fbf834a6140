use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::messages::DEFAULT_MAX_CONDITIONS;
use crate::polar::PolarCodeSpec;
use crate::protocol::{lifted_plan, TraceKind};
use crate::scalar::Probability;

/// Exact rational from a decimal literal such as `0.1` or `1e-3`, or a fraction `a/b`.
pub fn parse_probability(text: &str) -> Result<BigRational> {
    let bad = || Error::param(format!("cannot parse probability {text:?}"));
    let t = text.trim();
    let value = if let Some((a, b)) = t.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        BigRational::new(a, b)
    } else {
        let (mantissa, exp) = match t.split_once(['e', 'E']) {
            Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
            None => (t, 0),
        };
        let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let scale = exp - frac.len() as i32;
        let ten = BigRational::from_integer(BigInt::from(10));
        let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
        let base = BigRational::from_integer(digits);
        if scale >= 0 {
            base * pow
        } else {
            base / pow
        }
    };
    if value <= BigRational::zero() || value >= BigRational::one() {
        return Err(Error::param(format!("probability {text} must lie in (0, 1)")));
    }
    Ok(value)
}

/// Headline quantities of the length-4 example.
#[derive(Debug, Clone)]
pub struct TraceReport {
    pub p: BigRational,
    /// `p ⊞ p`.
    pub p1: BigRational,
    /// `p1 ⊞ p1`.
    pub p1_check: BigRational,
    /// `p1 ⊛ p1`, the `u1 = 0` entry of the u2 message.
    pub p1_bit: BigRational,
    pub text: String,
}

/// Full conditional-message trace of the length-4 code with the given frozen set.
pub fn trace_report(p: &BigRational, frozen: &[usize]) -> Result<TraceReport> {
    let spec = PolarCodeSpec::with_frozen(2, frozen.to_vec())?;
    let plan = lifted_plan(&spec, p, DEFAULT_MAX_CONDITIONS)?;
    let entry = |kind: TraceKind, block: usize, first_leaf: usize| {
        plan.trace()
            .iter()
            .find(|e| e.kind == kind && e.block == block && e.first_leaf == first_leaf)
            .map(|e| e.message.probs()[0].clone())
            .ok_or_else(|| Error::invariant("missing trace entry"))
    };
    let p1 = entry(TraceKind::Check, 2, 0)?;
    let p1_check = entry(TraceKind::Check, 1, 0)?;
    let p1_bit = entry(TraceKind::Bit, 1, 1)?;

    let mut text = String::new();
    let labels: Vec<String> = frozen.iter().map(|f| f.to_string()).collect();
    writeln!(text, "N=4 frozen={{{}}} p={} ({})", labels.join(","), p, p.to_f64()).ok();
    for (name, v) in [("p1 = p⊞p", &p1), ("p1⊞p1", &p1_check), ("p1⊛p1", &p1_bit)] {
        writeln!(text, "{name:<10} = {v} = {:.12}", v.to_f64()).ok();
    }
    writeln!(text, "messages:").ok();
    for e in plan.trace() {
        writeln!(text, "  {}", e.describe()).ok();
    }
    writeln!(text, "decisions:").ok();
    for s in plan.steps() {
        writeln!(text, "  u{} {}", s.target + 1, s.decision.dump()).ok();
    }
    Ok(TraceReport { p: p.clone(), p1, p1_check, p1_bit, text })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_probability("0.1").unwrap(), r(1, 10));
        assert_eq!(parse_probability("1/3").unwrap(), r(1, 3));
        assert_eq!(parse_probability("2.5e-2").unwrap(), r(1, 40));
        assert_eq!(parse_probability(".5").unwrap(), r(1, 2));
        for bad in ["0", "1", "abc", "1/0", "-0.2", ""] {
            assert!(parse_probability(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn worked_example_values() {
        let t = trace_report(&r(1, 10), &[1, 3]).unwrap();
        assert_eq!(t.p1, r(9, 50));
        assert_eq!(t.p1_check, r(738, 2500));
        assert_eq!(t.p1_bit, r(81, 1762));
        assert!(t.text.contains("u2 L_F=[1] h=[0,0]"));
    }

    #[test]
    fn uniform_source_is_all_ties() {
        let t = trace_report(&r(1, 2), &[1, 3]).unwrap();
        assert_eq!(t.p1, r(1, 2));
        assert_eq!(t.p1_bit, r(1, 2));
        assert!(t.text.contains("u4 L_F=[1,3] h=[0,0,0,0]"));
    }
}
