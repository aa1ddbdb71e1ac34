use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::team::WeightedTeam;

/// Shannon entropy in bits of the marginal distribution of `xs`, computed on
/// the normalized team with `0 log 0 = 0`.
pub fn entropy<W: Scalar>(team: &WeightedTeam<W>, xs: &[String]) -> Result<f64> {
    let total = team.total();
    if total.is_zero() {
        return Err(Error::ZeroWeightTeam);
    }
    let marginal = team.marginal(xs)?;
    let mut h = 0.0;
    for w in marginal.values() {
        let p = (w.clone() / total.clone()).to_f64();
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    Ok(h.max(0.0))
}

/// Entropy of an explicit probability vector.
pub fn entropy_of(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn known_values() {
        let point = WeightedTeam::from_rows(["x"], [(vec![0], q(1, 1))]).unwrap();
        assert_eq!(entropy(&point, &["x".into()]).unwrap(), 0.0);
        let uniform =
            WeightedTeam::from_rows(["x"], [(vec![0], q(1, 2)), (vec![1], q(1, 2))]).unwrap();
        assert!((entropy(&uniform, &["x".into()]).unwrap() - 1.0).abs() < 1e-15);
        let scaled = uniform.scale_by(&q(3, 1));
        assert!((entropy(&scaled, &["x".into()]).unwrap() - 1.0).abs() < 1e-15);
        let empty = WeightedTeam::<Rational>::empty(["x"]).unwrap();
        assert!(matches!(
            entropy(&empty, &["x".into()]),
            Err(Error::ZeroWeightTeam)
        ));
        assert!((entropy_of(&[0.25; 4]) - 2.0).abs() < 1e-15);
    }
}
