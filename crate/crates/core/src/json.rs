//! JSON interchange: polynomials as coefficient lists, covers as disk/ball
//! lists. Polynomial coefficients are written with 17 significant digits.

use serde::de::Error as _;
use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::poly::{BivariatePoly, UnivariatePoly, C64};

/// A float written as `{:.16e}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F17(pub f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(S::Error::custom("non-finite float"));
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(S::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for F17 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(F17(f64::deserialize(d)?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub i: usize,
    pub j: usize,
    pub re: F17,
    pub im: F17,
}

/// `{"degz": int, "degw": int, "coeffs": [{"i","j","re","im"}, ...]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub degz: isize,
    pub degw: isize,
    pub coeffs: Vec<TermJson>,
}

impl From<BivariatePoly> for PolyJson {
    fn from(p: BivariatePoly) -> Self {
        PolyJson {
            degz: p.degz(),
            degw: p.degw(),
            coeffs: p
                .terms()
                .map(|(i, j, c)| TermJson { i, j, re: F17(c.re), im: F17(c.im) })
                .collect(),
        }
    }
}

impl From<UnivariatePoly> for PolyJson {
    fn from(p: UnivariatePoly) -> Self {
        PolyJson::from(BivariatePoly::from_univariate_z(&p))
    }
}

impl TryFrom<PolyJson> for BivariatePoly {
    type Error = Error;
    fn try_from(j: PolyJson) -> Result<Self> {
        let terms: Vec<(usize, usize, C64)> =
            j.coeffs.iter().map(|t| (t.i, t.j, C64::new(t.re.0, t.im.0))).collect();
        let p = BivariatePoly::from_terms(&terms)?;
        if p.degz() != j.degz || p.degw() != j.degw {
            return Err(Error::InvalidArgument(format!(
                "declared degrees ({}, {}) disagree with coefficients ({}, {})",
                j.degz,
                j.degw,
                p.degz(),
                p.degw()
            )));
        }
        Ok(p)
    }
}

impl TryFrom<PolyJson> for UnivariatePoly {
    type Error = Error;
    fn try_from(j: PolyJson) -> Result<Self> {
        let b = BivariatePoly::try_from(j)?;
        if b.degw() > 0 {
            return Err(Error::InvalidArgument("univariate polynomial must have degw = 0".into()));
        }
        Ok(b.in_z(C64::new(0.0, 0.0)))
    }
}

/// `[re, im, re, im]` for points of C².
pub mod point4 {
    use super::*;
    use crate::poly::Point2;

    pub fn serialize<S: Serializer>(v: &Point2, s: S) -> std::result::Result<S::Ok, S::Error> {
        [v[0].re, v[0].im, v[1].re, v[1].im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Point2, D::Error> {
        let a = <[f64; 4]>::deserialize(d)?;
        if !a.iter().all(|x| x.is_finite()) {
            return Err(D::Error::custom("non-finite coordinate"));
        }
        Ok([C64::new(a[0], a[1]), C64::new(a[2], a[3])])
    }
}

pub fn to_string_pretty<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

pub fn from_str<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    Ok(serde_json::from_str(s)?)
}
