//! Exact arithmetic in cyclotomic fields Q(ζ_n) with certified embeddings.

mod field;
mod interval;
mod rational;

pub use field::{field_arith, field_make, field_sign, format_decimal, FieldElement, FieldSpec, Op, Part};
pub use interval::{pi_enclosure, trig_enclosure, EmbeddedInterval};
pub use rational::{ParseRationalError, Rational};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: Q(zeta_{0}) vs Q(zeta_{1})")]
    SpecMismatch(u32, u32),
    #[error("expected {expected} coefficients, found {found}")]
    BadLength { expected: usize, found: usize },
}

#[derive(Serialize, Deserialize)]
struct ElementDoc {
    conductor: u32,
    coeffs: Vec<String>,
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ElementDoc {
            conductor: self.spec().conductor(),
            coeffs: self.coeffs().iter().map(|c| c.to_string()).collect(),
        }
        .serialize(s)
    }
}

/// Accepts any number of coefficients, read as a polynomial in ζ and reduced.
impl<'de> Deserialize<'de> for FieldElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = ElementDoc::deserialize(d)?;
        if doc.conductor == 0 {
            return Err(D::Error::custom("conductor must be positive"));
        }
        let spec = field_make(doc.conductor);
        let coeffs = doc
            .coeffs
            .iter()
            .map(|c| c.parse::<Rational>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        Ok(FieldElement::from_poly(&spec, &coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip_and_reduction() {
        let k = field_make(10);
        let g = &FieldElement::zeta(&k, 1) + &FieldElement::zeta(&k, 9);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"conductor":10,"coeffs":["1","0","1","-1"]}"#);
        let back: FieldElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        let long: FieldElement =
            serde_json::from_str(r#"{"conductor":10,"coeffs":["0","1","0","0","0","0","0","0","0","1"]}"#).unwrap();
        assert_eq!(long, g);
        assert!(serde_json::from_str::<FieldElement>(r#"{"conductor":10,"coeffs":["1/0"]}"#).is_err());
    }
}
