//! Non-example fixtures: functions that are deliberately not SQC, used to
//! demonstrate that the checker detects violations.

use std::sync::Arc;

use crate::core::{ExtendedReal, Point};
use crate::error::Error;
use crate::gallery::SqcFunction;
use crate::geometry::ConvexDomain;

/// Constant function on the given domain. Violates the defining inequality
/// on every triple, for every modulus.
pub fn constant(domain: ConvexDomain, value: f64) -> Result<SqcFunction, Error> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter {
            name: "value",
            reason: "must be finite".into(),
        });
    }
    let d = domain.clone();
    Ok(SqcFunction::new(
        format!("constant(value={value}, domain={})", domain.describe()),
        "constant",
        domain,
        None,
        vec![],
        None,
        true,
        Arc::new(move |x: &Point| {
            if d.contains(x) {
                (ExtendedReal::Finite(value), "constant")
            } else {
                (ExtendedReal::Infinity, "outside")
            }
        }),
    ))
}

/// `f(x) = -||x||^2`: quasiconcave, so the inequality fails on most triples.
pub fn negated_quadratic(n: usize) -> Result<SqcFunction, Error> {
    let domain = ConvexDomain::full_space(n)?;
    Ok(SqcFunction::new(
        format!("neg_quadratic(n={n})"),
        "neg_quadratic",
        domain,
        None,
        vec![],
        None,
        true,
        Arc::new(|x: &Point| (ExtendedReal::Finite(-x.norm_squared()), "base")),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_evaluate() {
        let c = constant(ConvexDomain::full_space(2).unwrap(), 5.0).unwrap();
        assert_eq!(c.evaluate(&Point::origin(2)), ExtendedReal::Finite(5.0));
        assert!(c.is_fixture());
        let n = negated_quadratic(2).unwrap();
        assert_eq!(
            n.evaluate(&Point::from_slice(&[1.0, 2.0]).unwrap()),
            ExtendedReal::Finite(-5.0)
        );
    }
}
