//! Exact rational arithmetic helpers.
//!
//! Game probabilities, answer fractions and efficiency thresholds are all
//! small rationals (denominators divide products of 8, 16 and 729²-scale
//! counts), so `Ratio<i64>` is exact with huge headroom. Fractions serialize
//! as strings like `"11/16"` so no threshold is ever obscured by rounding.

use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::{de, Deserialize, Deserializer, Serializer};

pub type Frac = Rational64;

/// Shorthand constructor; panics on a zero denominator.
pub fn frac(numer: i64, denom: i64) -> Frac {
    Frac::new(numer, denom)
}

pub fn to_f64(f: Frac) -> f64 {
    f.to_f64().expect("i64 ratio is representable")
}

/// Serde adapter: a `Frac` as an exact fraction string (`"11/16"`, `"1"`).
pub mod frac_str {
    use super::*;

    pub fn serialize<S: Serializer>(f: &Frac, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(f)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Frac, D::Error> {
        let raw = String::deserialize(d)?;
        raw.trim()
            .parse::<Frac>()
            .map_err(|e| de::Error::custom(format!("invalid fraction {raw:?}: {e}")))
    }
}

/// Serde adapter for `Option<Frac>`; `None` serializes as JSON null.
pub mod opt_frac_str {
    use super::*;

    pub fn serialize<S: Serializer>(f: &Option<Frac>, s: S) -> Result<S::Ok, S::Error> {
        match f {
            Some(f) => s.collect_str(f),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Frac>, D::Error> {
        let raw = Option::<String>::deserialize(d)?;
        match raw {
            None => Ok(None),
            Some(raw) => raw
                .trim()
                .parse::<Frac>()
                .map(Some)
                .map_err(|e| de::Error::custom(format!("invalid fraction {raw:?}: {e}"))),
        }
    }
}

/// Serde adapter for `Vec<(Frac, Frac)>` as arrays of fraction-string pairs.
pub mod frac_pairs {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[(Frac, Frac)], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for (a, b) in v {
            seq.serialize_element(&[a.to_string(), b.to_string()])?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(Frac, Frac)>, D::Error> {
        let raw = Vec::<[String; 2]>::deserialize(d)?;
        raw.into_iter()
            .map(|[a, b]| {
                let pa = a
                    .parse::<Frac>()
                    .map_err(|e| de::Error::custom(format!("invalid fraction {a:?}: {e}")))?;
                let pb = b
                    .parse::<Frac>()
                    .map_err(|e| de::Error::custom(format!("invalid fraction {b:?}: {e}")))?;
                Ok((pa, pb))
            })
            .collect()
    }
}
