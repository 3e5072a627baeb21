//! Unit-expression mini-grammar.
//!
//! ```text
//! expr := term (('*' | '/') term)*
//! term := atom ('^' int)?
//! atom := symbol | '1' | '(' expr ')'
//! ```
//!
//! A symbol is a unit symbol optionally preceded by an SI prefix. Whole-symbol
//! matches win over prefix splits, so `h` is the hour, `Pa` the pascal and
//! `mol` the mole.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::dimension::Dimension;
use super::UnitError;
use crate::decimal::Decimal;

pub struct UnitDef {
    pub symbols: &'static [&'static str],
    pub name: &'static str,
    pub dimension: Dimension,
    /// Scale to coherent SI as a decimal literal.
    pub scale: &'static str,
    /// Additive offset to coherent SI; only the degree Celsius has one.
    pub offset: &'static str,
    pub prefixable: bool,
}

pub struct PrefixDef {
    pub symbols: &'static [&'static str],
    pub name: &'static str,
    pub power: i32,
}

const fn d(e: [i32; 7]) -> Dimension {
    Dimension(e)
}

pub static UNITS: &[UnitDef] = &[
    // base units
    UnitDef { symbols: &["m"], name: "meter", dimension: d([1, 0, 0, 0, 0, 0, 0]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["kg"], name: "kilogram", dimension: d([0, 1, 0, 0, 0, 0, 0]), scale: "1", offset: "0", prefixable: false },
    UnitDef { symbols: &["g"], name: "gram", dimension: d([0, 1, 0, 0, 0, 0, 0]), scale: "0.001", offset: "0", prefixable: true },
    UnitDef { symbols: &["s"], name: "second", dimension: d([0, 0, 1, 0, 0, 0, 0]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["A"], name: "ampere", dimension: d([0, 0, 0, 1, 0, 0, 0]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["K"], name: "kelvin", dimension: d([0, 0, 0, 0, 1, 0, 0]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["mol"], name: "mole", dimension: d([0, 0, 0, 0, 0, 1, 0]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["cd"], name: "candela", dimension: d([0, 0, 0, 0, 0, 0, 1]), scale: "1", offset: "0", prefixable: true },
    // named derived units
    UnitDef { symbols: &["rad"], name: "radian", dimension: d([0; 7]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["sr"], name: "steradian", dimension: d([0; 7]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["Hz"], name: "hertz", dimension: d([0, 0, -1, 0, 0, 0, 0]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["N"], name: "newton", dimension: d([1, 1, -2, 0, 0, 0, 0]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["Pa"], name: "pascal", dimension: d([-1, 1, -2, 0, 0, 0, 0]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["J"], name: "joule", dimension: d([2, 1, -2, 0, 0, 0, 0]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["W"], name: "watt", dimension: d([2, 1, -3, 0, 0, 0, 0]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["C"], name: "coulomb", dimension: d([0, 0, 1, 1, 0, 0, 0]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["V"], name: "volt", dimension: d([2, 1, -3, -1, 0, 0, 0]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["F"], name: "farad", dimension: d([-2, -1, 4, 2, 0, 0, 0]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["Ω", "ohm"], name: "ohm", dimension: d([2, 1, -3, -2, 0, 0, 0]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["S"], name: "siemens", dimension: d([-2, -1, 3, 2, 0, 0, 0]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["Wb"], name: "weber", dimension: d([2, 1, -2, -1, 0, 0, 0]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["T"], name: "tesla", dimension: d([0, 1, -2, -1, 0, 0, 0]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["H"], name: "henry", dimension: d([2, 1, -2, -2, 0, 0, 0]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["°C", "degC"], name: "degree Celsius", dimension: d([0, 0, 0, 0, 1, 0, 0]), scale: "1", offset: "273.15", prefixable: false },
    UnitDef { symbols: &["lm"], name: "lumen", dimension: d([0, 0, 0, 0, 0, 0, 1]), scale: "1", offset: "0", prefixable: true },
    UnitDef { symbols: &["lx"], name: "lux", dimension: d([-2, 0, 0, 0, 0, 0, 1]), scale: "1", offset: "0", prefixable: true },
    // accepted non-SI units needed for everyday attribute values
    UnitDef { symbols: &["min"], name: "minute", dimension: d([0, 0, 1, 0, 0, 0, 0]), scale: "60", offset: "0", prefixable: false },
    UnitDef { symbols: &["h"], name: "hour", dimension: d([0, 0, 1, 0, 0, 0, 0]), scale: "3600", offset: "0", prefixable: false },
    // pi/180 truncated to 34 significant digits
    UnitDef { symbols: &["deg", "°"], name: "degree", dimension: d([0; 7]), scale: "0.01745329251994329576923690768488613", offset: "0", prefixable: false },
];

pub static PREFIXES: &[PrefixDef] = &[
    PrefixDef { symbols: &["da"], name: "deca", power: 1 },
    PrefixDef { symbols: &["h"], name: "hecto", power: 2 },
    PrefixDef { symbols: &["k"], name: "kilo", power: 3 },
    PrefixDef { symbols: &["M"], name: "mega", power: 6 },
    PrefixDef { symbols: &["G"], name: "giga", power: 9 },
    PrefixDef { symbols: &["T"], name: "tera", power: 12 },
    PrefixDef { symbols: &["P"], name: "peta", power: 15 },
    PrefixDef { symbols: &["E"], name: "exa", power: 18 },
    PrefixDef { symbols: &["Z"], name: "zetta", power: 21 },
    PrefixDef { symbols: &["Y"], name: "yotta", power: 24 },
    PrefixDef { symbols: &["d"], name: "deci", power: -1 },
    PrefixDef { symbols: &["c"], name: "centi", power: -2 },
    PrefixDef { symbols: &["m"], name: "milli", power: -3 },
    PrefixDef { symbols: &["µ", "μ", "u"], name: "micro", power: -6 },
    PrefixDef { symbols: &["n"], name: "nano", power: -9 },
    PrefixDef { symbols: &["p"], name: "pico", power: -12 },
    PrefixDef { symbols: &["f"], name: "femto", power: -15 },
    PrefixDef { symbols: &["a"], name: "atto", power: -18 },
    PrefixDef { symbols: &["z"], name: "zepto", power: -21 },
    PrefixDef { symbols: &["y"], name: "yocto", power: -24 },
];

pub fn unit_by_symbol(sym: &str) -> Option<&'static UnitDef> {
    UNITS.iter().find(|u| u.symbols.contains(&sym))
}

pub fn prefix_by_symbol(sym: &str) -> Option<&'static PrefixDef> {
    PREFIXES.iter().find(|p| p.symbols.contains(&sym))
}

impl UnitDef {
    pub fn scale(&self) -> BigRational {
        self.scale.parse::<Decimal>().expect("static unit scale").to_rational()
    }

    pub fn offset(&self) -> Decimal {
        self.offset.parse().expect("static unit offset")
    }
}

fn pow10_rational(power: i32) -> BigRational {
    let p = num_traits::pow(BigInt::from(10u8), power.unsigned_abs() as usize);
    if power >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum UnitExpr {
    One,
    Symbol { prefix: Option<&'static str>, unit: &'static str },
    Mul(Box<UnitExpr>, Box<UnitExpr>),
    Div(Box<UnitExpr>, Box<UnitExpr>),
    Pow(Box<UnitExpr>, i32),
}

/// Dimension and multiplicative scale of a unit expression.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitValue {
    pub dimension: Dimension,
    pub scale: BigRational,
}

impl UnitExpr {
    pub fn eval(&self) -> UnitValue {
        match self {
            UnitExpr::One => UnitValue { dimension: Dimension::DIMENSIONLESS, scale: BigRational::one() },
            UnitExpr::Symbol { prefix, unit } => {
                let def = unit_by_symbol(unit).expect("parsed symbol resolves");
                let mut scale = def.scale();
                if let Some(p) = prefix {
                    scale *= pow10_rational(prefix_by_symbol(p).expect("parsed prefix resolves").power);
                }
                UnitValue { dimension: def.dimension, scale }
            }
            UnitExpr::Mul(a, b) => {
                let (a, b) = (a.eval(), b.eval());
                UnitValue { dimension: a.dimension * b.dimension, scale: a.scale * b.scale }
            }
            UnitExpr::Div(a, b) => {
                let (a, b) = (a.eval(), b.eval());
                UnitValue { dimension: a.dimension / b.dimension, scale: a.scale / b.scale }
            }
            UnitExpr::Pow(a, n) => {
                let a = a.eval();
                UnitValue { dimension: a.dimension.pow(*n), scale: a.scale.pow(*n) }
            }
        }
    }

    /// Offset to coherent SI. Only a bare affine unit (`°C`) has one; inside a
    /// compound expression the unit behaves as an interval.
    pub fn offset(&self) -> Decimal {
        match self {
            UnitExpr::Symbol { prefix: None, unit } => unit_by_symbol(unit).map(UnitDef::offset).unwrap_or_else(Decimal::zero),
            _ => Decimal::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Sym(String),
    Int(i32),
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<Tok>, UnitError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '*' | '·' | '×' => {
                chars.next();
                out.push(Tok::Star);
            }
            '/' => {
                chars.next();
                out.push(Tok::Slash);
            }
            '^' => {
                chars.next();
                out.push(Tok::Caret);
            }
            '(' => {
                chars.next();
                out.push(Tok::LParen);
            }
            ')' => {
                chars.next();
                out.push(Tok::RParen);
            }
            '-' | '0'..='9' => {
                let mut s = String::new();
                s.push(c);
                chars.next();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let n = s.parse().map_err(|_| UnitError::Syntax(text.to_string()))?;
                out.push(Tok::Int(n));
            }
            c if c.is_alphabetic() || c == '°' || c == 'µ' || c == 'Ω' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_alphabetic() || d == '°' || d == 'µ' || d == 'Ω' {
                        s.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Sym(s));
            }
            _ => return Err(UnitError::Syntax(text.to_string())),
        }
    }
    Ok(out)
}

fn resolve_symbol(sym: &str) -> Result<UnitExpr, UnitError> {
    if let Some(def) = unit_by_symbol(sym) {
        return Ok(UnitExpr::Symbol { prefix: None, unit: def.symbols[0] });
    }
    let mut saw_unit_suffix = false;
    for (i, _) in sym.char_indices().skip(1) {
        let (p, u) = sym.split_at(i);
        if let Some(def) = unit_by_symbol(u) {
            saw_unit_suffix |= p.chars().count() <= 2;
            if let Some(pre) = prefix_by_symbol(p) {
                if def.prefixable {
                    return Ok(UnitExpr::Symbol { prefix: Some(pre.symbols[0]), unit: def.symbols[0] });
                }
            }
        }
    }
    if saw_unit_suffix {
        Err(UnitError::UnknownPrefix(sym.to_string()))
    } else {
        Err(UnitError::UnknownUnitSymbol(sym.to_string()))
    }
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    text: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn syntax(&self) -> UnitError {
        UnitError::Syntax(self.text.to_string())
    }

    fn expr(&mut self) -> Result<UnitExpr, UnitError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = UnitExpr::Mul(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    lhs = UnitExpr::Div(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<UnitExpr, UnitError> {
        let atom = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            match self.bump() {
                Some(Tok::Int(n)) => Ok(UnitExpr::Pow(Box::new(atom), n)),
                _ => Err(self.syntax()),
            }
        } else {
            Ok(atom)
        }
    }

    fn atom(&mut self) -> Result<UnitExpr, UnitError> {
        match self.bump() {
            Some(Tok::Int(1)) => Ok(UnitExpr::One),
            Some(Tok::Sym(s)) => resolve_symbol(&s),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(self.syntax()),
                }
            }
            _ => Err(self.syntax()),
        }
    }
}

pub fn parse_unit_expr(text: &str) -> Result<UnitExpr, UnitError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, text };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.syntax());
    }
    Ok(e)
}

/// Parses a unit expression into its dimension vector and scale to coherent SI.
pub fn parse_unit(text: &str) -> Result<(Dimension, BigRational), UnitError> {
    let v = parse_unit_expr(text)?.eval();
    Ok((v.dimension, v.scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn newton_from_base_units() {
        let (dim, scale) = parse_unit("kg*m/s^2").unwrap();
        assert_eq!(dim, Dimension([1, 1, -2, 0, 0, 0, 0]));
        assert_eq!(scale, rat(1, 1));
    }

    #[test]
    fn volt_symbol() {
        let (dim, scale) = parse_unit("V").unwrap();
        assert_eq!(dim, Dimension([2, 1, -3, -1, 0, 0, 0]));
        assert_eq!(scale, rat(1, 1));
    }

    #[test]
    fn kilometre_scale() {
        let (dim, scale) = parse_unit("km").unwrap();
        assert_eq!(dim, Dimension::LENGTH);
        assert_eq!(scale, rat(1000, 1));
    }

    #[test]
    fn dimensionless_one() {
        let (dim, scale) = parse_unit("1").unwrap();
        assert!(dim.is_dimensionless());
        assert_eq!(scale, rat(1, 1));
    }

    #[test]
    fn whole_symbols_beat_prefix_splits() {
        assert_eq!(parse_unit("h").unwrap().1, rat(3600, 1));
        assert_eq!(parse_unit("hPa").unwrap().1, rat(100, 1));
        assert_eq!(parse_unit("mol").unwrap().0, Dimension::AMOUNT);
        assert_eq!(parse_unit("mm").unwrap().1, rat(1, 1000));
        assert_eq!(parse_unit("mg").unwrap().1, rat(1, 1_000_000));
        assert_eq!(parse_unit("km/h").unwrap().1, rat(5, 18));
        assert_eq!(parse_unit("µs").unwrap().1, rat(1, 1_000_000));
        assert_eq!(parse_unit("dam").unwrap().1, rat(10, 1));
    }

    #[test]
    fn parentheses_and_negative_powers() {
        let (dim, _) = parse_unit("(kg*m^2)/(s^3*A)").unwrap();
        assert_eq!(dim, parse_unit("V").unwrap().0);
        assert_eq!(parse_unit("m^-1").unwrap().0, Dimension::LENGTH.recip());
    }

    #[test]
    fn celsius_offset_only_when_bare() {
        assert_eq!(parse_unit_expr("°C").unwrap().offset(), "273.15".parse().unwrap());
        assert_eq!(parse_unit_expr("degC/h").unwrap().offset(), Decimal::zero());
    }

    #[test]
    fn errors() {
        assert_eq!(parse_unit("furlong"), Err(UnitError::UnknownUnitSymbol("furlong".into())));
        assert_eq!(parse_unit("xm"), Err(UnitError::UnknownPrefix("xm".into())));
        assert_eq!(parse_unit("kkg"), Err(UnitError::UnknownPrefix("kkg".into())));
        assert!(matches!(parse_unit("m^"), Err(UnitError::Syntax(_))));
        assert!(matches!(parse_unit("(m"), Err(UnitError::Syntax(_))));
        assert!(matches!(parse_unit(""), Err(UnitError::Syntax(_))));
    }
}
