//! Quantity kinds and the kind registry.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::dimension::Dimension;
use super::parse::{parse_unit_expr, unit_by_symbol};
use super::UnitError;
use crate::decimal::Decimal;

/// Whether values of a kind are positions on an affine scale, differences
/// between such positions, or ordinary linear magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Point,
    Interval,
    Plain,
}

impl Role {
    pub fn keyword(self) -> &'static str {
        match self {
            Role::Point => "point",
            Role::Interval => "interval",
            Role::Plain => "plain",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Role> {
        match s {
            "point" => Some(Role::Point),
            "interval" => Some(Role::Interval),
            "plain" => Some(Role::Plain),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantityKind {
    pub name: String,
    pub dimension: Dimension,
    pub role: Role,
    /// Factor taking a value in this kind's unit to coherent SI.
    pub scale: BigRational,
    /// Added after scaling; nonzero only for point kinds such as °C.
    pub offset: Decimal,
    /// Unit expression the kind's values are written in.
    pub unit: String,
    /// For point kinds: the kind of a difference of two points.
    pub interval: Option<String>,
    /// Nominal kind produced by `mean` (e.g. `MeanTemp` for `Temp`).
    pub mean: Option<String>,
    /// Subtraction carries the precondition `rhs <= lhs` (calendar time).
    pub ordered_difference: bool,
    /// Synthesized by an operator rule rather than registered.
    pub derived: bool,
}

impl QuantityKind {
    pub fn new(name: &str, dimension: Dimension, role: Role, unit: &str) -> Self {
        Self {
            name: name.to_string(),
            dimension,
            role,
            scale: BigRational::one(),
            offset: Decimal::zero(),
            unit: unit.to_string(),
            interval: None,
            mean: None,
            ordered_difference: false,
            derived: false,
        }
    }

    /// Builds a kind whose dimension and scale come from a unit expression.
    pub fn from_unit(name: &str, role: Role, unit: &str) -> Result<Self, UnitError> {
        let expr = parse_unit_expr(unit)?;
        let v = expr.eval();
        let mut k = Self::new(name, v.dimension, role, unit);
        k.scale = v.scale;
        if role == Role::Point {
            k.offset = expr.offset();
        }
        Ok(k)
    }

    pub fn is_real(&self) -> bool {
        self.role == Role::Plain && self.dimension.is_dimensionless()
    }

    /// Value in coherent SI: `v * scale + offset`.
    pub fn to_si(&self, v: &Decimal) -> BigRational {
        v.to_rational() * &self.scale + self.offset.to_rational()
    }

    /// Inverse of [`to_si`](Self::to_si); rounds when the result does not
    /// terminate.
    pub fn from_si(&self, si: &BigRational) -> Decimal {
        Decimal::from_rational(&((si - self.offset.to_rational()) / &self.scale))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KindSummary<'a> {
    pub name: &'a str,
    pub role: Role,
    pub dimension: String,
    pub unit: &'a str,
}

/// Registered quantity kinds, in registration order.
#[derive(Debug, Clone, Default)]
pub struct KindRegistry {
    kinds: Vec<QuantityKind>,
    index: BTreeMap<String, usize>,
    builtin_names: Vec<String>,
}

fn k(name: &str, role: Role, unit: &str) -> QuantityKind {
    QuantityKind::from_unit(name, role, unit).expect("built-in unit parses")
}

impl KindRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Kinds covering the SI base, derived and further units, plus the
    /// calendar-time and temperature point/interval pairs.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        let mut time = k("Time", Role::Point, "s");
        time.interval = Some("TimeInterval".into());
        time.ordered_difference = true;
        let mut temp = k("Temp", Role::Point, "K");
        temp.interval = Some("TempIntv".into());
        temp.mean = Some("MeanTemp".into());
        let mut mean_temp = k("MeanTemp", Role::Point, "K");
        mean_temp.interval = Some("TempIntv".into());
        let mut temp_c = k("TempC", Role::Point, "°C");
        temp_c.interval = Some("TempIntv".into());

        let kinds = [
            k("Real", Role::Plain, "1"),
            k("Bool", Role::Plain, "1"),
            k("Length", Role::Plain, "m"),
            k("Mass", Role::Plain, "kg"),
            time,
            k("TimeInterval", Role::Interval, "s"),
            k("Current", Role::Plain, "A"),
            temp,
            mean_temp,
            temp_c,
            k("TempIntv", Role::Interval, "K"),
            k("Amount", Role::Plain, "mol"),
            k("LuminousIntensity", Role::Plain, "cd"),
            k("Angle", Role::Plain, "rad"),
            k("SolidAngle", Role::Plain, "sr"),
            k("Frequency", Role::Plain, "Hz"),
            k("Force", Role::Plain, "N"),
            k("Pressure", Role::Plain, "Pa"),
            k("Energy", Role::Plain, "J"),
            k("Power", Role::Plain, "W"),
            k("Charge", Role::Plain, "C"),
            k("Voltage", Role::Plain, "V"),
            k("Capacitance", Role::Plain, "F"),
            k("Resistance", Role::Plain, "ohm"),
            k("Conductance", Role::Plain, "S"),
            k("MagneticFlux", Role::Plain, "Wb"),
            k("MagneticFluxDensity", Role::Plain, "T"),
            k("Inductance", Role::Plain, "H"),
            k("LuminousFlux", Role::Plain, "lm"),
            k("Illuminance", Role::Plain, "lx"),
            k("Area", Role::Plain, "m^2"),
            k("Volume", Role::Plain, "m^3"),
            k("Velocity", Role::Plain, "m/s"),
            k("Acceleration", Role::Plain, "m/s^2"),
            k("WaveNumber", Role::Plain, "m^-1"),
            k("MassDensity", Role::Plain, "kg/m^3"),
            k("SpecificVolume", Role::Plain, "m^3/kg"),
            k("CurrentDensity", Role::Plain, "A/m^2"),
            k("MagneticFieldStrength", Role::Plain, "A/m"),
            k("Concentration", Role::Plain, "mol/m^3"),
            k("Luminance", Role::Plain, "cd/m^2"),
            k("MassFraction", Role::Plain, "kg/kg"),
        ];
        for kind in kinds {
            r.insert(kind);
        }
        r.builtin_names = r.kinds.iter().map(|k| k.name.clone()).collect();
        r
    }

    pub fn is_builtin(&self, name: &str) -> bool {
        self.builtin_names.iter().any(|n| n == name)
    }

    /// Inserts or replaces a kind. Point kinds without an interval kind get a
    /// synthesized `<Name>Intv` interval kind.
    pub fn insert(&mut self, mut kind: QuantityKind) {
        if kind.role == Role::Point && kind.interval.is_none() {
            let iname = format!("{}Intv", kind.name);
            if !self.index.contains_key(&iname) {
                let mut ik = QuantityKind::new(&iname, kind.dimension, Role::Interval, &kind.unit);
                ik.scale = kind.scale.clone();
                self.insert(ik);
            }
            kind.interval = Some(iname);
        }
        match self.index.get(&kind.name) {
            Some(&i) => self.kinds[i] = kind,
            None => {
                self.index.insert(kind.name.clone(), self.kinds.len());
                self.kinds.push(kind);
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<&QuantityKind> {
        self.index.get(name).map(|&i| &self.kinds[i])
    }

    pub fn lookup(&self, name: &str) -> Result<&QuantityKind, UnitError> {
        self.get(name).ok_or_else(|| UnitError::UnregisteredKind(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn kinds(&self) -> &[QuantityKind] {
        &self.kinds
    }

    pub fn real(&self) -> QuantityKind {
        self.get("Real").cloned().unwrap_or_else(|| QuantityKind::new("Real", Dimension::DIMENSIONLESS, Role::Plain, "1"))
    }

    pub fn boolean(&self) -> QuantityKind {
        self.get("Bool").cloned().unwrap_or_else(|| QuantityKind::new("Bool", Dimension::DIMENSIONLESS, Role::Plain, "1"))
    }

    /// True when `kind` is the registered kind of that name, or was derived by
    /// an operator rule.
    pub fn knows(&self, kind: &QuantityKind) -> bool {
        kind.derived || self.get(&kind.name) == Some(kind)
    }

    /// A plain kind synthesized for a composite dimension. It borrows the name
    /// of the first registered plain kind with that dimension, or falls back to
    /// the dimension itself.
    pub fn derived(&self, dimension: Dimension, scale: BigRational, unit: String) -> QuantityKind {
        let name = self
            .kinds
            .iter()
            .find(|k| k.role == Role::Plain && k.dimension == dimension && k.name != "Bool")
            .map(|k| k.name.clone())
            .unwrap_or_else(|| format!("[{dimension}]"));
        let mut q = QuantityKind::new(&name, dimension, Role::Plain, &unit);
        q.scale = scale;
        q.derived = true;
        q
    }

    pub fn interval_of(&self, point: &QuantityKind) -> QuantityKind {
        point
            .interval
            .as_deref()
            .and_then(|n| self.get(n))
            .cloned()
            .unwrap_or_else(|| {
                let mut q = QuantityKind::new(&format!("{}Intv", point.name), point.dimension, Role::Interval, &point.unit);
                q.scale = point.scale.clone();
                q.derived = true;
                q
            })
    }

    pub fn mean_of(&self, kind: &QuantityKind) -> QuantityKind {
        kind.mean.as_deref().and_then(|n| self.get(n)).cloned().unwrap_or_else(|| kind.clone())
    }

    /// Parses `"<decimal> [<unit>]"` into a value of `kind`, converting from
    /// the written unit. A bare number is taken to be in the kind's own unit.
    pub fn parse_value(&self, kind: &QuantityKind, text: &str) -> Result<Decimal, UnitError> {
        let text = text.trim();
        let (num, unit) = split_number(text);
        let value: Decimal = num.trim().parse().map_err(|_| UnitError::BadValue(text.to_string()))?;
        let unit = unit.trim();
        if unit.is_empty() {
            return Ok(value);
        }
        let expr = parse_unit_expr(unit)?;
        let u = expr.eval();
        if u.dimension != kind.dimension {
            return Err(UnitError::DimensionMismatch {
                expected: kind.dimension.to_string(),
                found: u.dimension.to_string(),
            });
        }
        let offset = if kind.role == Role::Point { expr.offset() } else { Decimal::zero() };
        if u.scale == kind.scale && offset == kind.offset {
            return Ok(value);
        }
        let si = value.to_rational() * u.scale + offset.to_rational();
        let base = if kind.role == Role::Point { kind.offset.to_rational() } else { BigRational::zero() };
        Ok(Decimal::from_rational(&((si - base) / &kind.scale)))
    }

    pub fn summaries(&self) -> Vec<KindSummary<'_>> {
        self.kinds
            .iter()
            .map(|k| KindSummary { name: &k.name, role: k.role, dimension: k.dimension.to_string(), unit: &k.unit })
            .collect()
    }
}

/// Splits a leading decimal literal (sign, digits, point, exponent) from the
/// unit text that follows it.
fn split_number(text: &str) -> (&str, &str) {
    let b = text.as_bytes();
    let mut i = 0;
    if matches!(b.first(), Some(b'-' | b'+')) {
        i += 1;
    }
    while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
        i += 1;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if matches!(b.get(j), Some(b'-' | b'+')) {
            j += 1;
        }
        if b.get(j).is_some_and(u8::is_ascii_digit) {
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    text.split_at(i)
}

/// Human label for a dimension: the name of a named unit with that dimension
/// when one exists.
pub fn dimension_label(dimension: Dimension) -> &'static str {
    if dimension.is_dimensionless() {
        return "dimensionless";
    }
    const PREFERRED: &[&str] = &["m", "kg", "s", "A", "K", "mol", "cd", "Hz", "N", "Pa", "J", "W", "C", "V", "F", "Ω", "S", "Wb", "T", "H", "lx"];
    for sym in PREFERRED {
        let u = unit_by_symbol(sym).expect("preferred unit exists");
        if u.dimension == dimension {
            return u.name;
        }
    }
    const FURTHER: &[(&str, &str)] = &[
        ("area", "m^2"),
        ("volume", "m^3"),
        ("velocity", "m/s"),
        ("acceleration", "m/s^2"),
        ("wave number", "m^-1"),
        ("mass density", "kg/m^3"),
        ("specific volume", "m^3/kg"),
        ("current density", "A/m^2"),
        ("magnetic field strength", "A/m"),
        ("amount-of-substance concentration", "mol/m^3"),
        ("luminance", "cd/m^2"),
    ];
    for (label, unit) in FURTHER {
        if super::parse::parse_unit(unit).map(|(d, _)| d) == Ok(dimension) {
            return label;
        }
    }
    "derived"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_kinds_resolve() {
        let r = KindRegistry::builtin();
        assert_eq!(r.lookup("Time").unwrap().role, Role::Point);
        assert_eq!(r.lookup("TempC").unwrap().offset, "273.15".parse().unwrap());
        assert!(r.lookup("Nope").is_err());
        assert!(r.is_builtin("Force"));
    }

    #[test]
    fn synthesized_interval_for_point() {
        let mut r = KindRegistry::empty();
        r.insert(QuantityKind::from_unit("LO", Role::Point, "deg").unwrap());
        assert_eq!(r.lookup("LO").unwrap().interval.as_deref(), Some("LOIntv"));
        assert_eq!(r.lookup("LOIntv").unwrap().role, Role::Interval);
    }

    #[test]
    fn parse_values_with_units() {
        let r = KindRegistry::builtin();
        let vel = QuantityKind::from_unit("VEL", Role::Interval, "km/h").unwrap();
        assert_eq!(r.parse_value(&vel, "900 km/h").unwrap(), "900".parse().unwrap());
        assert_eq!(r.parse_value(&vel, "250 m/s").unwrap(), "900".parse().unwrap());
        assert_eq!(r.parse_value(&vel, "12").unwrap(), "12".parse().unwrap());
        let temp = r.lookup("Temp").unwrap();
        assert_eq!(r.parse_value(temp, "10 °C").unwrap(), "283.15".parse().unwrap());
        let tc = r.lookup("TempC").unwrap();
        assert_eq!(r.parse_value(tc, "283.15 K").unwrap(), "10".parse().unwrap());
        assert_eq!(r.parse_value(tc, "-5 degC").unwrap(), "-5".parse().unwrap());
        let ti = r.lookup("TimeInterval").unwrap();
        assert_eq!(r.parse_value(ti, "2 h").unwrap(), "7200".parse().unwrap());
        assert_eq!(r.parse_value(ti, "1.5e3 s").unwrap(), "1500".parse().unwrap());
        assert!(matches!(r.parse_value(ti, "2 m"), Err(UnitError::DimensionMismatch { .. })));
        assert!(matches!(r.parse_value(ti, "abc"), Err(UnitError::BadValue(_))));
    }

    #[test]
    fn degree_sign_value() {
        let r = KindRegistry::builtin();
        let lo = QuantityKind::from_unit("LO", Role::Point, "deg").unwrap();
        assert_eq!(r.parse_value(&lo, "10°").unwrap(), "10".parse().unwrap());
    }

    #[test]
    fn labels() {
        assert_eq!(dimension_label(Dimension([1, 1, -2, 0, 0, 0, 0])), "newton");
        assert_eq!(dimension_label(Dimension([1, 0, -1, 0, 0, 0, 0])), "velocity");
        assert_eq!(dimension_label(Dimension::DIMENSIONLESS), "dimensionless");
        assert_eq!(dimension_label(Dimension([5, 0, 0, 0, 0, 0, 0])), "derived");
    }
}
