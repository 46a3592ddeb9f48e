use std::fmt;

use serde::{Deserialize, Serialize};

use super::ModelError;

const MICRO: i64 = 1_000_000;

/// Latitude/longitude stored as whole micro-degrees, so six-decimal text
/// survives a parse/format cycle unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeoPoint {
    lat_micro: i32,
    lon_micro: i32,
}

impl GeoPoint {
    /// Rounds to the nearest micro-degree.
    pub fn new(lat: f64, lon: f64) -> Result<Self, ModelError> {
        if !lat.is_finite() || !(-90.0..=90.0).contains(&lat) {
            return Err(ModelError::LatitudeOutOfRange(lat));
        }
        if !lon.is_finite() || !(-180.0..=180.0).contains(&lon) {
            return Err(ModelError::LongitudeOutOfRange(lon));
        }
        Ok(GeoPoint {
            lat_micro: (lat * MICRO as f64).round() as i32,
            lon_micro: (lon * MICRO as f64).round() as i32,
        })
    }

    pub fn from_micro(lat_micro: i32, lon_micro: i32) -> Result<Self, ModelError> {
        let lat = lat_micro as f64 / MICRO as f64;
        let lon = lon_micro as f64 / MICRO as f64;
        if !(-90.0..=90.0).contains(&lat) {
            return Err(ModelError::LatitudeOutOfRange(lat));
        }
        if !(-180.0..=180.0).contains(&lon) {
            return Err(ModelError::LongitudeOutOfRange(lon));
        }
        Ok(GeoPoint { lat_micro, lon_micro })
    }

    pub fn parse(lat: &str, lon: &str) -> Result<Self, ModelError> {
        Self::from_micro(parse_micro(lat)?, parse_micro(lon)?)
    }

    pub fn lat(&self) -> f64 {
        self.lat_micro as f64 / MICRO as f64
    }

    pub fn lon(&self) -> f64 {
        self.lon_micro as f64 / MICRO as f64
    }

    pub fn lat_text(&self) -> String {
        format_micro(self.lat_micro)
    }

    pub fn lon_text(&self) -> String {
        format_micro(self.lon_micro)
    }
}

impl fmt::Display for GeoPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lat_text(), self.lon_text())
    }
}

/// Decimal degrees with at most six fractional digits, optional sign.
fn parse_micro(text: &str) -> Result<i32, ModelError> {
    let bad = |why| ModelError::BadCoordinate(text.to_string(), why);
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() || int_part.len() > 3 || !int_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad("expected decimal degrees"));
    }
    if frac_part.len() > 6 || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad("at most six fractional digits"));
    }
    if body.contains('.') && frac_part.is_empty() {
        return Err(bad("empty fraction"));
    }
    let whole: i64 = int_part.parse().map_err(|_| bad("expected decimal degrees"))?;
    let mut frac: i64 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().map_err(|_| bad("expected decimal degrees"))?
    };
    for _ in frac_part.len()..6 {
        frac *= 10;
    }
    let magnitude = whole * MICRO + frac;
    let value = if negative { -magnitude } else { magnitude };
    i32::try_from(value).map_err(|_| bad("out of range"))
}

fn format_micro(value: i32) -> String {
    let sign = if value < 0 { "-" } else { "" };
    let abs = (value as i64).abs();
    format!("{sign}{}.{:06}", abs / MICRO, abs % MICRO)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminal_coordinates_survive_text_cycle() {
        let p = GeoPoint::parse("1.277109", "103.911774").unwrap();
        assert_eq!(p.lat_text(), "1.277109");
        assert_eq!(p.lon_text(), "103.911774");
        assert!((p.lat() - 1.277109).abs() < 1e-12);
    }

    #[test]
    fn short_fractions_are_padded() {
        let p = GeoPoint::parse("-0.5", "7").unwrap();
        assert_eq!(p.lat_text(), "-0.500000");
        assert_eq!(p.lon_text(), "7.000000");
    }

    #[test]
    fn rejects_bad_text() {
        for bad in ["", "1.2345678", "abc", "1.", "1e3", "--1"] {
            assert!(GeoPoint::parse(bad, "0").is_err(), "{bad}");
        }
        assert!(GeoPoint::parse("91", "0").is_err());
        assert!(GeoPoint::parse("0", "-180.000001").is_err());
    }

    #[test]
    fn float_constructor_matches_text() {
        let p = GeoPoint::new(1.276425, 103.663339).unwrap();
        assert_eq!(p, GeoPoint::parse("1.276425", "103.663339").unwrap());
    }
}
