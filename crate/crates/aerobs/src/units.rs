//! Unit-tagged quantities as written in ledger and scenario files.
//!
//! A dimensional value is a string `"<number> <unit>"`, e.g. `"5 kg"`. A
//! dimensionless value is a bare number. Either form may be wrapped in a
//! table `{ value = ..., oracle = "..." }` recording how a back-solved default
//! was derived. Units are checked against what the key expects and are never
//! converted.

use std::fmt;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Kg,
    W,
    M,
    M2,
    Km2,
    MHz,
    Db,
    Dbm,
    Deg,
    PerDeg,
    KWhPerM2Day,
    WhPerKg,
    KgPerM2,
    KgPerM3,
    MPerS,
    MPerS2,
    RadPerS,
    WPerKg,
}

impl Unit {
    pub fn suffix(self) -> &'static str {
        match self {
            Unit::Kg => "kg",
            Unit::W => "W",
            Unit::M => "m",
            Unit::M2 => "m2",
            Unit::Km2 => "km2",
            Unit::MHz => "MHz",
            Unit::Db => "dB",
            Unit::Dbm => "dBm",
            Unit::Deg => "deg",
            Unit::PerDeg => "per_deg",
            Unit::KWhPerM2Day => "kWh_per_m2_day",
            Unit::WhPerKg => "Wh_per_kg",
            Unit::KgPerM2 => "kg_per_m2",
            Unit::KgPerM3 => "kg_per_m3",
            Unit::MPerS => "m_per_s",
            Unit::MPerS2 => "m_per_s2",
            Unit::RadPerS => "rad_per_s",
            Unit::WPerKg => "W_per_kg",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.suffix())
    }
}

/// A number with an optional unit suffix and optional derivation note.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub unit: Option<String>,
    pub oracle: Option<String>,
}

impl Quantity {
    fn parse(text: &str) -> Result<Self, String> {
        let mut parts = text.split_whitespace();
        let (Some(number), Some(unit), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(format!("expected \"<number> <unit>\", found \"{text}\""));
        };
        let value = number
            .parse::<f64>()
            .map_err(|_| format!("`{number}` is not a number in \"{text}\""))?;
        Ok(Self {
            value,
            unit: Some(unit.to_string()),
            oracle: None,
        })
    }

    /// Value in `unit`, or a message describing the mismatch.
    pub fn expect(&self, unit: Unit) -> Result<f64, String> {
        match self.unit.as_deref() {
            Some(u) if u == unit.suffix() => Ok(self.value),
            Some(u) => Err(format!("unit `{u}` given where `{unit}` is required")),
            None => Err(format!("missing unit, write \"{} {unit}\"", self.value)),
        }
    }

    /// Value of a dimensionless quantity.
    pub fn expect_plain(&self) -> Result<f64, String> {
        match &self.unit {
            None => Ok(self.value),
            Some(u) => Err(format!("dimensionless value expected, found unit `{u}`")),
        }
    }
}

struct QuantityVisitor;

impl<'de> Visitor<'de> for QuantityVisitor {
    type Value = Quantity;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a number, a \"<number> <unit>\" string, or { value, oracle }")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Quantity, E> {
        Ok(Quantity {
            value: v as f64,
            unit: None,
            oracle: None,
        })
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Quantity, E> {
        self.visit_i64(v as i64)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Quantity, E> {
        Ok(Quantity {
            value: v,
            unit: None,
            oracle: None,
        })
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Quantity, E> {
        Quantity::parse(v).map_err(E::custom)
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Quantity, A::Error> {
        let mut value: Option<Quantity> = None;
        let mut oracle = None;
        while let Some(key) = map.next_key::<String>()? {
            match key.as_str() {
                "value" => value = Some(map.next_value::<Quantity>()?),
                "oracle" => oracle = Some(map.next_value::<String>()?),
                other => return Err(de::Error::unknown_field(other, &["value", "oracle"])),
            }
        }
        let mut q = value.ok_or_else(|| de::Error::missing_field("value"))?;
        q.oracle = oracle;
        Ok(q)
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(QuantityVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Deserialize)]
    struct Holder {
        q: Quantity,
    }

    fn q(src: &str) -> Quantity {
        toml::from_str::<Holder>(src).unwrap().q
    }

    #[test]
    fn parses_every_form() {
        assert_eq!(q("q = \"5 kg\"").expect(Unit::Kg), Ok(5.0));
        assert_eq!(q("q = 0.3775").expect_plain(), Ok(0.3775));
        assert_eq!(q("q = 3").expect_plain(), Ok(3.0));
        let tagged = q("q = { value = \"54.05 m2\", oracle = \"fit\" }");
        assert_eq!(tagged.expect(Unit::M2), Ok(54.05));
        assert_eq!(tagged.oracle.as_deref(), Some("fit"));
        assert_eq!(q("q = \"inf m\"").expect(Unit::M), Ok(f64::INFINITY));
    }

    #[test]
    fn unit_mismatch_is_reported() {
        let err = q("q = \"5 g\"").expect(Unit::Kg).unwrap_err();
        assert!(err.contains("`g`") && err.contains("`kg`"));
        assert!(q("q = 5").expect(Unit::Kg).is_err());
        assert!(q("q = \"5 kg\"").expect_plain().is_err());
    }

    #[test]
    fn malformed_strings_rejected() {
        assert!(toml::from_str::<Holder>("q = \"five kg\"").is_err());
        assert!(toml::from_str::<Holder>("q = \"5\"").is_err());
        assert!(toml::from_str::<Holder>("q = \"5 kg extra\"").is_err());
    }
}
