//! Total colorings of an integer window and their text form:
//!
//! ```text
//! lo hi r
//! 0110...
//! ```
//!
//! The second line holds one base-36 digit per point, color of `lo` first.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("empty window [{0}, {1}]")]
    EmptyWindow(i64, i64),
    #[error("color count must be between 1 and 36, got {0}")]
    ColorCount(u32),
    #[error("color {color} at {point} is not below r = {r}")]
    ColorOutOfRange { point: i64, color: u8, r: u32 },
    #[error("expected {expected} colors, found {found}")]
    Length { expected: usize, found: usize },
    #[error("malformed coloring file: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    lo: i64,
    hi: i64,
    r: u32,
    colors: Vec<u8>,
}

impl Coloring {
    pub fn new(lo: i64, hi: i64, r: u32, colors: Vec<u8>) -> Result<Self, ColoringError> {
        if lo > hi {
            return Err(ColoringError::EmptyWindow(lo, hi));
        }
        if !(1..=36).contains(&r) {
            return Err(ColoringError::ColorCount(r));
        }
        let expected = (hi - lo + 1) as usize;
        if colors.len() != expected {
            return Err(ColoringError::Length { expected, found: colors.len() });
        }
        if let Some((i, &color)) = colors.iter().enumerate().find(|(_, &c)| u32::from(c) >= r) {
            return Err(ColoringError::ColorOutOfRange { point: lo + i as i64, color, r });
        }
        Ok(Coloring { lo, hi, r, colors })
    }

    /// Build from a color function over the window.
    pub fn from_fn(lo: i64, hi: i64, r: u32, f: impl Fn(i64) -> u8) -> Result<Self, ColoringError> {
        if lo > hi {
            return Err(ColoringError::EmptyWindow(lo, hi));
        }
        Self::new(lo, hi, r, (lo..=hi).map(f).collect())
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    pub fn get(&self, point: i64) -> Option<u8> {
        if point < self.lo || point > self.hi {
            return None;
        }
        Some(self.colors[(point - self.lo) as usize])
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Self, ColoringError> {
        let malformed = |m: &str| ColoringError::Malformed(m.to_string());
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| malformed("missing header line"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let [lo, hi, r] = fields[..] else { return Err(malformed("header must be \"lo hi r\"")) };
        let lo: i64 = lo.parse().map_err(|_| malformed("lo is not an integer"))?;
        let hi: i64 = hi.parse().map_err(|_| malformed("hi is not an integer"))?;
        let r: u32 = r.parse().map_err(|_| malformed("r is not an integer"))?;
        let body = lines.next().unwrap_or("");
        if lines.next().is_some() {
            return Err(malformed("trailing lines"));
        }
        let colors = body
            .chars()
            .map(|ch| ch.to_digit(36).map(|d| d as u8).ok_or_else(|| malformed("colors must be base-36 digits")))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(lo, hi, r, colors)
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.lo, self.hi, self.r)?;
        for &c in &self.colors {
            let ch = char::from_digit(u32::from(c), 36).expect("colors stay below 36");
            write!(f, "{ch}")?;
        }
        writeln!(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let c = Coloring::new(-2, 2, 12, vec![0, 1, 11, 3, 0]).unwrap();
        assert_eq!(c.to_text(), "-2 2 12\n01b30\n");
        assert_eq!(Coloring::parse(&c.to_text()).unwrap(), c);
        assert_eq!(c.get(0), Some(11));
        assert_eq!(c.get(3), None);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Coloring::parse("1 3 2\n012\n"), Err(ColoringError::ColorOutOfRange { point: 3, .. })));
        assert!(matches!(Coloring::parse("1 3 2\n01\n"), Err(ColoringError::Length { .. })));
        assert!(matches!(Coloring::parse("3 1 2\n"), Err(ColoringError::EmptyWindow(3, 1))));
        assert!(Coloring::parse("1 3\n010").is_err());
    }
}
