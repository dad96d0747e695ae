//! Exact rationals travel as `"p/q"` strings, matrices as row lists.

pub mod ratio {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::numerics::{format_ratio, parse_rational, ExactScalar};

    pub fn serialize<S: Serializer>(v: &ExactScalar, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_ratio(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ExactScalar, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

pub mod ratios {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::numerics::{format_ratio, parse_rational, ExactScalar};

    pub fn serialize<S: Serializer>(v: &[ExactScalar], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_ratio))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<ExactScalar>, D::Error> {
        let text = Vec::<String>::deserialize(d)?;
        text.iter().map(|t| parse_rational(t).map_err(serde::de::Error::custom)).collect()
    }
}

pub mod matrix {
    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.row_iter().map(|r| r.iter().copied().collect::<Vec<f64>>()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(DMatrix::from_row_iterator(r, c, rows.into_iter().flatten()))
    }
}
