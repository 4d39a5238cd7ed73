//! PIC-clause typing and the scaled-decimal value model.
//!
//! Every numeric value in the toolkit is an exact scaled integer: a
//! `PIC S9(4)V99` item holding `-12.50` is stored as `-1250` with scale 2.
//! Alphanumeric values are fixed-length byte strings, space-padded on the
//! right. Both the interpreter and the symbolic executor go through the
//! store-back helpers in this module so their truncation behaviour cannot
//! drift apart.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Maximum total digits accepted for a numeric picture. Keeps scaled
/// arithmetic comfortably inside i128.
pub const MAX_DIGITS: u32 = 18;

/// Printable ASCII range used for alphanumeric domains.
pub const CHAR_LO: u8 = 0x20;
pub const CHAR_HI: u8 = 0x7e;
/// Number of distinct printable characters (the base of the string encoding).
pub const CHAR_BASE: i128 = (CHAR_HI - CHAR_LO + 1) as i128;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PicError {
    #[error("malformed picture `{0}`: {1}")]
    MalformedPicture(String, String),
}

/// A resolved PICTURE clause.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "category", rename_all = "camelCase")]
pub enum PicType {
    #[serde(rename_all = "camelCase")]
    Numeric {
        signed: bool,
        int_digits: u32,
        frac_digits: u32,
    },
    #[serde(rename_all = "camelCase")]
    Alphanumeric { length: u32 },
}

impl PicType {
    pub fn is_numeric(&self) -> bool {
        matches!(self, PicType::Numeric { .. })
    }

    pub fn scale(&self) -> u32 {
        match self {
            PicType::Numeric { frac_digits, .. } => *frac_digits,
            PicType::Alphanumeric { .. } => 0,
        }
    }

    pub fn total_digits(&self) -> u32 {
        match self {
            PicType::Numeric {
                int_digits,
                frac_digits,
                ..
            } => int_digits + frac_digits,
            PicType::Alphanumeric { .. } => 0,
        }
    }

    /// Largest scaled magnitude representable, e.g. 9999 for `9(2)V99`.
    pub fn max_scaled(&self) -> i128 {
        match self {
            PicType::Numeric { .. } => pow10(self.total_digits()) - 1,
            PicType::Alphanumeric { length } => str_code_max(*length),
        }
    }

    /// Smallest scaled value representable (0 for unsigned pictures).
    pub fn min_scaled(&self) -> i128 {
        match self {
            PicType::Numeric { signed: true, .. } => -self.max_scaled(),
            _ => 0,
        }
    }

    /// Zero or spaces, the COBOL default for an uninitialized item.
    pub fn default_value(&self) -> Value {
        match self {
            PicType::Numeric { .. } => Value::Num(0),
            PicType::Alphanumeric { length } => Value::Str(" ".repeat(*length as usize)),
        }
    }
}

impl fmt::Display for PicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PicType::Numeric {
                signed,
                int_digits,
                frac_digits,
            } => {
                if *signed {
                    write!(f, "S")?;
                }
                write!(f, "9({int_digits})")?;
                if *frac_digits > 0 {
                    write!(f, "V9({frac_digits})")?;
                }
                Ok(())
            }
            PicType::Alphanumeric { length } => write!(f, "X({length})"),
        }
    }
}

pub fn pow10(n: u32) -> i128 {
    10i128.pow(n)
}

/// Highest base-95 code for a string of `len` characters (all `~`).
pub fn str_code_max(len: u32) -> i128 {
    if len == 0 {
        return 0;
    }
    CHAR_BASE.pow(len) - 1
}

/// Parse a PICTURE string: `S?9...(V9...)?` or `X...`, with `(n)` repetition
/// shorthand. `9(3)V99`, `S9(4)`, `999`, `X(8)` and `XX` are all accepted.
pub fn resolve_pic(picture: &str) -> Result<PicType, PicError> {
    let err = |msg: &str| PicError::MalformedPicture(picture.to_string(), msg.to_string());
    let chars: Vec<char> = picture.trim().to_ascii_uppercase().chars().collect();
    if chars.is_empty() {
        return Err(err("empty picture"));
    }
    let mut pos = 0usize;
    let signed = if chars[0] == 'S' {
        pos = 1;
        true
    } else {
        false
    };

    // One run of a picture character with optional (n) repeats.
    let count_units = |pos: &mut usize, unit: char| -> Result<u32, PicError> {
        let mut total = 0u32;
        while *pos < chars.len() && chars[*pos] == unit {
            *pos += 1;
            if *pos < chars.len() && chars[*pos] == '(' {
                let close = chars[*pos..]
                    .iter()
                    .position(|&c| c == ')')
                    .ok_or_else(|| err("unclosed repetition"))?;
                let digits: String = chars[*pos + 1..*pos + close].iter().collect();
                let n: u32 = digits.parse().map_err(|_| err("bad repetition count"))?;
                if n == 0 {
                    return Err(err("zero repetition"));
                }
                total += n;
                *pos += close + 1;
            } else {
                total += 1;
            }
        }
        Ok(total)
    };

    if pos < chars.len() && chars[pos] == 'X' {
        if signed {
            return Err(err("sign on alphanumeric picture"));
        }
        let length = count_units(&mut pos, 'X')?;
        if pos != chars.len() {
            return Err(err("trailing characters"));
        }
        if length == 0 {
            return Err(err("zero-length picture"));
        }
        return Ok(PicType::Alphanumeric { length });
    }

    let int_digits = count_units(&mut pos, '9')?;
    let mut frac_digits = 0;
    if pos < chars.len() && chars[pos] == 'V' {
        pos += 1;
        frac_digits = count_units(&mut pos, '9')?;
        if frac_digits == 0 {
            return Err(err("V with no fraction digits"));
        }
    }
    if pos != chars.len() {
        return Err(err("trailing characters"));
    }
    if int_digits + frac_digits == 0 {
        return Err(err("no digits"));
    }
    if int_digits + frac_digits > MAX_DIGITS {
        return Err(err("too many digits"));
    }
    Ok(PicType::Numeric {
        signed,
        int_digits,
        frac_digits,
    })
}

/// A concrete runtime value. Numerics carry the scaled integer only; the
/// scale lives in the variable's `PicType`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Num(i128),
    Str(String),
}

impl Value {
    pub fn as_num(&self) -> Option<i128> {
        match self {
            Value::Num(n) => Some(*n),
            Value::Str(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            Value::Num(_) => None,
        }
    }
}

/// Rescale a scaled integer from one decimal scale to another, truncating
/// toward zero when digits are dropped.
pub fn rescale(raw: i128, from_scale: u32, to_scale: u32) -> i128 {
    if from_scale == to_scale {
        raw
    } else if to_scale > from_scale {
        raw * pow10(to_scale - from_scale)
    } else {
        raw / pow10(from_scale - to_scale)
    }
}

/// Store a scaled number into an item: rescale, drop the sign for unsigned
/// pictures, and silently truncate high-order digits past the declared width.
pub fn store_num(raw: i128, from_scale: u32, pic: &PicType) -> i128 {
    let PicType::Numeric {
        signed,
        int_digits,
        frac_digits,
    } = pic
    else {
        panic!("store_num on alphanumeric pic");
    };
    let mut v = rescale(raw, from_scale, *frac_digits);
    let modulus = pow10(int_digits + frac_digits);
    v %= modulus;
    if !signed {
        v = v.abs();
    }
    v
}

/// Store a string into an item: truncate or space-pad on the right.
pub fn store_str(s: &str, pic: &PicType) -> String {
    let PicType::Alphanumeric { length } = pic else {
        panic!("store_str on numeric pic");
    };
    let len = *length as usize;
    let mut out: String = s.chars().take(len).collect();
    while out.chars().count() < len {
        out.push(' ');
    }
    out
}

/// Space-pad both operands to a common length and compare byte-wise.
pub fn compare_str(a: &str, b: &str) -> std::cmp::Ordering {
    let len = a.len().max(b.len());
    let pad = |s: &str| -> Vec<u8> {
        let mut v = s.as_bytes().to_vec();
        v.resize(len, b' ');
        v
    };
    pad(a).cmp(&pad(b))
}

/// Encode a string as a base-95 integer over the printable range. Padding
/// with spaces on the right multiplies the code, so the encoding preserves
/// the byte-wise ordering used by `compare_str`. `None` when the code would
/// not fit i128 (strings past 18 characters).
pub fn try_str_to_code(s: &str) -> Option<i128> {
    let mut code = 0i128;
    for b in s.bytes() {
        let d = b.clamp(CHAR_LO, CHAR_HI) - CHAR_LO;
        code = code.checked_mul(CHAR_BASE)?.checked_add(d as i128)?;
    }
    Some(code)
}

/// Infallible encoding for strings already known to fit (solver domains cap
/// the length).
pub fn str_to_code(s: &str) -> i128 {
    try_str_to_code(s).expect("string code fits i128")
}

pub fn code_to_str(mut code: i128, len: u32) -> String {
    let mut bytes = vec![CHAR_LO; len as usize];
    for i in (0..len as usize).rev() {
        bytes[i] = CHAR_LO + (code % CHAR_BASE) as u8;
        code /= CHAR_BASE;
    }
    String::from_utf8(bytes).expect("printable ascii")
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValueParseError {
    #[error("`{0}` is not a valid value for picture {1}")]
    Invalid(String, String),
}

/// Render a value in the canonical external form: numerics are
/// scale-preserving decimal strings zero-padded to the picture width
/// (`0012.50` for `9(4)V99`), alphanumerics are the exact fixed-length text.
pub fn format_value(v: &Value, pic: &PicType) -> String {
    match (v, pic) {
        (
            Value::Num(raw),
            PicType::Numeric {
                int_digits,
                frac_digits,
                ..
            },
        ) => {
            let neg = *raw < 0;
            let abs = raw.unsigned_abs();
            let digits = format!(
                "{:0width$}",
                abs,
                width = (*int_digits + *frac_digits) as usize
            );
            let (int_part, frac_part) = digits.split_at(digits.len() - *frac_digits as usize);
            let mut out = String::new();
            if neg {
                out.push('-');
            }
            out.push_str(int_part);
            if *frac_digits > 0 {
                out.push('.');
                out.push_str(frac_part);
            }
            out
        }
        (Value::Str(s), PicType::Alphanumeric { .. }) => s.clone(),
        _ => panic!("value/picture category mismatch"),
    }
}

/// Parse an external string back into a value for the given picture.
/// Numeric input is lenient about padding (`12.5` parses against `9(4)V99`)
/// but must fit the picture exactly once scaled.
pub fn parse_value(s: &str, pic: &PicType) -> Result<Value, ValueParseError> {
    match pic {
        PicType::Numeric { .. } => {
            let (raw, scale) = parse_decimal(s)
                .ok_or_else(|| ValueParseError::Invalid(s.to_string(), pic.to_string()))?;
            let target = pic.scale();
            let scaled = if scale <= target {
                raw * pow10(target - scale)
            } else {
                let drop = pow10(scale - target);
                if raw % drop != 0 {
                    return Err(ValueParseError::Invalid(s.to_string(), pic.to_string()));
                }
                raw / drop
            };
            if scaled < pic.min_scaled() || scaled > pic.max_scaled() {
                return Err(ValueParseError::Invalid(s.to_string(), pic.to_string()));
            }
            Ok(Value::Num(scaled))
        }
        PicType::Alphanumeric { .. } => Ok(Value::Str(store_str(s, pic))),
    }
}

/// Parse a plain decimal string to (unscaled integer, scale).
pub fn parse_decimal(s: &str) -> Option<(i128, u32)> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return None;
    }
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let mut raw: i128 = 0;
    for c in int_part.chars().chain(frac_part.chars()) {
        raw = raw.checked_mul(10)?.checked_add((c as u8 - b'0') as i128)?;
    }
    if neg {
        raw = -raw;
    }
    Some((raw, frac_part.len() as u32))
}

/// Exact comparison of two decimal strings at a common scale.
pub fn decimals_equal(a: &str, b: &str) -> bool {
    match (parse_decimal(a), parse_decimal(b)) {
        (Some((ra, sa)), Some((rb, sb))) => {
            let scale = sa.max(sb);
            rescale(ra, sa, scale) == rescale(rb, sb, scale)
        }
        // Non-numeric text falls back to exact byte equality.
        _ => a == b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_basic_pictures() {
        assert_eq!(
            resolve_pic("S9(4)V99"),
            Ok(PicType::Numeric {
                signed: true,
                int_digits: 4,
                frac_digits: 2
            })
        );
        assert_eq!(resolve_pic("X(8)"), Ok(PicType::Alphanumeric { length: 8 }));
        assert_eq!(
            resolve_pic("999"),
            Ok(PicType::Numeric {
                signed: false,
                int_digits: 3,
                frac_digits: 0
            })
        );
        assert_eq!(
            resolve_pic("9(3)V9(2)"),
            Ok(PicType::Numeric {
                signed: false,
                int_digits: 3,
                frac_digits: 2
            })
        );
    }

    #[test]
    fn resolve_rejects_degenerate_pictures() {
        assert!(resolve_pic("9(0)").is_err());
        assert!(resolve_pic("").is_err());
        assert!(resolve_pic("SX(3)").is_err());
        assert!(resolve_pic("9(19)").is_err());
        assert!(resolve_pic("9V").is_err());
        assert!(resolve_pic("Q(3)").is_err());
    }

    #[test]
    fn format_pads_to_picture_width() {
        let pic = resolve_pic("9(4)V99").unwrap();
        assert_eq!(format_value(&Value::Num(1250), &pic), "0012.50");
        let signed = resolve_pic("S9(3)").unwrap();
        assert_eq!(format_value(&Value::Num(-7), &signed), "-007");
    }

    #[test]
    fn parse_is_lenient_about_padding() {
        let pic = resolve_pic("9(4)V99").unwrap();
        assert_eq!(parse_value("12.5", &pic), Ok(Value::Num(1250)));
        assert_eq!(parse_value("0012.50", &pic), Ok(Value::Num(1250)));
        assert!(parse_value("12.345", &pic).is_err());
        assert!(parse_value("ABC", &pic).is_err());
    }

    #[test]
    fn store_num_truncates_silently() {
        let pic = resolve_pic("9(3)").unwrap();
        assert_eq!(store_num(12345, 0, &pic), 345);
        assert_eq!(store_num(-42, 0, &pic), 42); // unsigned drops the sign
        let frac = resolve_pic("9(3)V9").unwrap();
        assert_eq!(store_num(1299, 2, &frac), 129); // 12.99 -> 12.9
    }

    #[test]
    fn string_codes_preserve_padded_ordering() {
        assert!(compare_str("AB", "AB  ") == std::cmp::Ordering::Equal);
        assert!(str_to_code("AB") * CHAR_BASE.pow(2) == str_to_code("AB  "));
        assert_eq!(code_to_str(str_to_code("Y"), 1), "Y");
        assert!(str_to_code("N") < str_to_code("Y"));
    }

    #[test]
    fn decimals_equal_normalizes_scale() {
        assert!(decimals_equal("0012.50", "12.5"));
        assert!(!decimals_equal("0013.00", "0012.50"));
        assert!(decimals_equal("Y", "Y"));
    }
}
