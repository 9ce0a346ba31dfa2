//! Exact rational grids: contiguous segments of equal-width cells.

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) mod rational_str {
    use rug::Rational;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        Rational::parse(&text).map(Rational::from).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    #[serde(with = "rational_str")]
    pub start: Rational,
    #[serde(with = "rational_str")]
    pub step: Rational,
    pub count: u64,
}

impl Segment {
    pub fn new(start: Rational, step: Rational, count: u64) -> Self {
        Segment { start, step, count }
    }

    pub fn end(&self) -> Rational {
        Rational::from(&self.start + Rational::from(&self.step * self.count))
    }

    pub fn cell(&self, k: u64) -> (Rational, Rational) {
        let left = Rational::from(&self.start + Rational::from(&self.step * k));
        let right = Rational::from(&left + &self.step);
        (left, right)
    }
}

/// One cell `[left, right]` with its global index.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub index: u64,
    pub left: Rational,
    pub right: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub segments: Vec<Segment>,
}

impl GridSpec {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let grid = GridSpec { segments };
        grid.validate()?;
        Ok(grid)
    }

    pub fn single(start: Rational, step: Rational, count: u64) -> Result<Self> {
        Self::new(vec![Segment::new(start, step, count)])
    }

    /// Steps positive, counts nonzero, each segment starting where the
    /// previous one ends.
    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::InvalidArgument("grid has no segments".into()));
        }
        for (i, s) in self.segments.iter().enumerate() {
            if s.step <= 0 || s.count == 0 {
                return Err(Error::InvalidArgument(format!("segment {i} is empty or has step <= 0")));
            }
            if i > 0 && self.segments[i - 1].end() != s.start {
                return Err(Error::InvalidArgument(format!("gap or overlap before segment {i}")));
            }
        }
        Ok(())
    }

    pub fn start(&self) -> Rational {
        self.segments[0].start.clone()
    }

    pub fn end(&self) -> Rational {
        self.segments.last().map(Segment::end).unwrap_or_default()
    }

    pub fn tiles(&self, a: &Rational, b: &Rational) -> bool {
        self.validate().is_ok() && self.start() == *a && self.end() == *b
    }

    pub fn cell_count(&self) -> u64 {
        self.segments.iter().map(|s| s.count).sum()
    }

    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::with_capacity(self.cell_count() as usize);
        let mut index = 0;
        for s in &self.segments {
            for k in 0..s.count {
                let (left, right) = s.cell(k);
                out.push(Cell { index, left, right });
                index += 1;
            }
        }
        out
    }

    /// Every cell split into `factor` equal parts.
    pub fn refine(&self, factor: u64) -> GridSpec {
        GridSpec {
            segments: self
                .segments
                .iter()
                .map(|s| Segment::new(s.start.clone(), Rational::from(&s.step / factor), s.count * factor))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn three_segment_tiling() {
        let g = GridSpec::new(vec![
            Segment::new(r(117, 1000), r(1, 1000), 718),
            Segment::new(r(835, 1000), r(1, 20000), 1300),
            Segment::new(r(9, 10), r(1, 500000), 5000),
        ])
        .unwrap();
        assert!(g.tiles(&r(117, 1000), &r(91, 100)));
        assert_eq!(g.cell_count(), 7018);
        let cells = g.cells();
        assert_eq!(cells[718].left, r(835, 1000));
        assert!(cells.windows(2).all(|w| w[0].right == w[1].left));
    }

    #[test]
    fn rejects_gaps() {
        let bad = GridSpec::new(vec![
            Segment::new(r(0, 1), r(1, 10), 3),
            Segment::new(r(1, 2), r(1, 10), 3),
        ]);
        assert!(bad.is_err());
        assert!(GridSpec::single(r(0, 1), r(-1, 10), 3).is_err());
    }

    #[test]
    fn refine_keeps_span() {
        let g = GridSpec::single(r(91, 100), r(1, 10000), 900).unwrap();
        let f = g.refine(2);
        assert_eq!(f.cell_count(), 1800);
        assert_eq!(f.end(), g.end());
    }

    #[test]
    fn serde_round_trip() {
        let g = GridSpec::single(r(91, 100), r(1, 10000), 900).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        assert!(text.contains("\"91/100\""));
        let back: GridSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
    }
}
