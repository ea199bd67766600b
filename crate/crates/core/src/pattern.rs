//! Occupancy patterns over the discretised cells, written as bit strings
//! such as `100000100010010010001` (first and last characters are the fixed
//! endpoints A and B).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern(Vec<bool>);

impl Pattern {
    /// Pattern with only the endpoints occupied.
    pub fn endpoints(n_cells: usize) -> Self {
        let mut cells = vec![false; n_cells];
        cells[0] = true;
        cells[n_cells - 1] = true;
        Pattern(cells)
    }

    /// Every cell occupied.
    pub fn filled(n_cells: usize) -> Self {
        Pattern(vec![true; n_cells])
    }

    /// Endpoints plus the given interior cells.
    pub fn with_interior(n_cells: usize, interior: &[usize]) -> Result<Self> {
        let mut p = Self::endpoints(n_cells);
        for &c in interior {
            if c == 0 || c + 1 >= n_cells {
                return Err(Error::InvalidPattern(format!(
                    "cell {c} is not interior for {n_cells} cells"
                )));
            }
            p.0[c] = true;
        }
        Ok(p)
    }

    pub fn from_cells(cells: Vec<bool>) -> Result<Self> {
        let p = Pattern(cells);
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let n = self.0.len();
        if n < 2 {
            return Err(Error::InvalidPattern(format!("need at least 2 cells, got {n}")));
        }
        if !self.0[0] || !self.0[n - 1] {
            return Err(Error::InvalidPattern(format!("endpoints must be occupied in `{self}`")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn cells(&self) -> &[bool] {
        &self.0
    }

    pub fn is_occupied(&self, cell: usize) -> bool {
        self.0[cell]
    }

    pub fn set(&mut self, cell: usize) {
        self.0[cell] = true;
    }

    /// Indices of occupied cells in increasing order.
    pub fn occupied(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn particle_count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Number of particles added between the endpoints.
    pub fn added_count(&self) -> usize {
        self.particle_count().saturating_sub(2)
    }

    pub fn hamming(&self, other: &Pattern) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    /// Spatial mirror image (cell j ↔ cell n-1-j).
    pub fn reversed(&self) -> Pattern {
        Pattern(self.0.iter().rev().copied().collect())
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let cells = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidPattern(format!(
                    "unexpected character {other:?} in `{s}`"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Pattern::from_cells(cells)
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
