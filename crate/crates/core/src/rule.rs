//! Colorings of all of `Z^d` given by closed-form rules.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::lattice::{BoxRegion, Coord, PartialColoring, ProperColoring};

/// A coloring of the whole lattice, evaluated pointwise.
pub trait ColoringRule {
    fn dim(&self) -> usize;
    fn q(&self) -> u32;
    fn color_at(&self, v: &Coord) -> u32;

    /// Evaluate on a window; fails if the evaluation is not proper.
    fn evaluate(&self, region: &BoxRegion) -> Result<ProperColoring> {
        if region.dim() != self.dim() {
            return domain(format!(
                "rule has dimension {}, window has {}",
                self.dim(),
                region.dim()
            ));
        }
        ProperColoring::from_fn(region.clone(), self.q(), |v| self.color_at(v))
    }

    /// The rule restricted to `cells`, as a partial coloring of `region`.
    fn restrict_to<'a>(
        &self,
        region: &BoxRegion,
        cells: impl IntoIterator<Item = &'a Coord>,
    ) -> Result<PartialColoring>
    where
        Self: Sized,
    {
        PartialColoring::from_pairs(
            region.clone(),
            self.q(),
            cells.into_iter().map(|v| (v.clone(), self.color_at(v))),
        )
    }
}

/// `x_i = offset + sum_k weights[k] * i_k  (mod q)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearColoringRule {
    pub q: u32,
    pub weights: Vec<i64>,
    pub offset: i64,
}

impl LinearColoringRule {
    pub fn new(q: u32, weights: Vec<i64>, offset: i64) -> Result<Self> {
        if q < 1 || weights.is_empty() {
            return domain("linear rule needs q >= 1 and at least one weight");
        }
        Ok(LinearColoringRule { q, weights, offset })
    }

    /// Every weight is non-zero mod q, which makes the rule proper.
    pub fn is_proper_rule(&self) -> bool {
        self.weights
            .iter()
            .all(|w| w.rem_euclid(self.q as i64) != 0)
    }

    pub fn with_offset(&self, offset: i64) -> Self {
        LinearColoringRule {
            offset,
            ..self.clone()
        }
    }
}

impl ColoringRule for LinearColoringRule {
    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn q(&self) -> u32 {
        self.q
    }

    fn color_at(&self, v: &Coord) -> u32 {
        debug_assert_eq!(v.dim(), self.dim());
        let s: i64 = self.offset
            + self
                .weights
                .iter()
                .zip(v.as_slice())
                .map(|(w, x)| w * x)
                .sum::<i64>();
        s.rem_euclid(self.q as i64) as u32
    }
}

/// A rule on `Z^r` pulled back to `Z^D` by folding the trailing coordinates:
/// `y(i_1..i_D) = x(i_1, .., i_{r-1}, i_r + .. + i_D)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftedColoringRule {
    pub base: LinearColoringRule,
    pub target_dim: usize,
}

impl LiftedColoringRule {
    pub fn folds(&self) -> usize {
        self.target_dim - self.base.dim()
    }

    /// The lifted rule written as a linear rule on `Z^D`.
    pub fn as_linear(&self) -> LinearColoringRule {
        let mut weights = self.base.weights.clone();
        let last = *weights.last().unwrap();
        weights.extend(std::iter::repeat_n(last, self.folds()));
        LinearColoringRule {
            q: self.base.q,
            weights,
            offset: self.base.offset,
        }
    }

    fn project(&self, v: &Coord) -> Coord {
        let r = self.base.dim();
        let s = v.as_slice();
        let mut out = s[..r - 1].to_vec();
        out.push(s[r - 1..].iter().sum());
        Coord::new(out)
    }
}

impl ColoringRule for LiftedColoringRule {
    fn dim(&self) -> usize {
        self.target_dim
    }

    fn q(&self) -> u32 {
        self.base.q
    }

    fn color_at(&self, v: &Coord) -> u32 {
        self.base.color_at(&self.project(v))
    }
}
