//! Simulated classifier error.
//!
//! A [`ConfusionMatrix`] holds `P(predicted | true)` with columns indexed by
//! the true group and rows by the predicted group, so every column sums to
//! one and `C p = m` maps true proportions to measured ones.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Group;
use crate::quantify::{EdgeVector, PropVector};

const STOCHASTIC_TOL: f64 = 1e-12;
/// Smallest |det| accepted before a matrix is treated as singular.
pub const DET_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct ConfusionMatrix {
    /// `c[predicted][true]`
    c: [[f64; 2]; 2],
}

impl ConfusionMatrix {
    /// Builds from row-major entries `[c(â|a), c(â|b), c(b̂|a), c(b̂|b)]`.
    pub fn from_row_major(entries: [f64; 4]) -> Result<Self> {
        let c = [[entries[0], entries[1]], [entries[2], entries[3]]];
        for (i, &v) in entries.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("confusion entry {i} = {v} is outside [0, 1]")));
            }
        }
        for col in 0..2 {
            let sum = c[0][col] + c[1][col];
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::InvalidParameter(format!("confusion column {col} sums to {sum}")));
            }
        }
        Ok(ConfusionMatrix { c })
    }

    pub fn identity() -> Self {
        ConfusionMatrix {
            c: [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    /// Same error rate for both groups.
    pub fn symmetric(rate: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&rate) {
            return Err(Error::InvalidParameter(format!(
                "misclassification rate {rate} must lie in [0, 0.5)"
            )));
        }
        Ok(ConfusionMatrix {
            c: [[1.0 - rate, rate], [rate, 1.0 - rate]],
        })
    }

    /// `P(predicted | truth)`.
    #[inline]
    pub fn prob(&self, predicted: Group, truth: Group) -> f64 {
        self.c[predicted.index()][truth.index()]
    }

    pub fn row_major(&self) -> [f64; 4] {
        [self.c[0][0], self.c[0][1], self.c[1][0], self.c[1][1]]
    }

    pub fn det(&self) -> f64 {
        self.c[0][0] * self.c[1][1] - self.c[0][1] * self.c[1][0]
    }

    /// Forward map `C p`.
    pub fn apply(&self, p: &PropVector) -> PropVector {
        PropVector::new(
            self.c[0][0] * p.a + self.c[0][1] * p.b,
            self.c[1][0] * p.a + self.c[1][1] * p.b,
        )
    }
}

impl TryFrom<[f64; 4]> for ConfusionMatrix {
    type Error = Error;

    fn try_from(entries: [f64; 4]) -> Result<Self> {
        ConfusionMatrix::from_row_major(entries)
    }
}

impl From<ConfusionMatrix> for [f64; 4] {
    fn from(c: ConfusionMatrix) -> Self {
        c.row_major()
    }
}

pub fn symmetric_confusion(rate: f64) -> Result<ConfusionMatrix> {
    ConfusionMatrix::symmetric(rate)
}

/// Draws one predicted label per node, independently, from the columns of `c`.
pub fn apply_noise<R: Rng + ?Sized>(labels: &[Group], c: &ConfusionMatrix, rng: &mut R) -> Vec<Group> {
    labels
        .iter()
        .map(|&truth| {
            let flip = c.prob(truth.other(), truth);
            // skip the draw when nothing can flip so identity noise consumes no randomness
            if flip > 0.0 && rng.gen::<f64>() < flip {
                truth.other()
            } else {
                truth
            }
        })
        .collect()
}

/// Column-normalized counts of `(predicted, true)` pairs.
pub fn empirical_confusion(truth: &[Group], predicted: &[Group]) -> Result<ConfusionMatrix> {
    if truth.len() != predicted.len() {
        return Err(Error::InvalidParameter(format!(
            "{} true labels but {} predictions",
            truth.len(),
            predicted.len()
        )));
    }
    let mut counts = [[0usize; 2]; 2];
    for (&t, &p) in truth.iter().zip(predicted) {
        counts[p.index()][t.index()] += 1;
    }
    let mut entries = [0.0; 4];
    for g in Group::ALL {
        let col = g.index();
        let total = counts[0][col] + counts[1][col];
        if total == 0 {
            return Err(Error::AbsentClass(g));
        }
        entries[col] = counts[0][col] as f64 / total as f64;
        entries[2 + col] = 1.0 - entries[col];
    }
    ConfusionMatrix::from_row_major(entries)
}

/// Maps true edge-type proportions `(s_aa, s_ab, s_bb)` to measured ones
/// under independent endpoint misclassification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicMatrix {
    pub m: [[f64; 3]; 3],
}

impl DyadicMatrix {
    pub fn from_confusion(c: &ConfusionMatrix) -> Self {
        let aa = c.prob(Group::A, Group::A);
        let ab = c.prob(Group::A, Group::B);
        let ba = c.prob(Group::B, Group::A);
        let bb = c.prob(Group::B, Group::B);
        DyadicMatrix {
            m: [
                [aa * aa, aa * ab, ab * ab],
                [2.0 * aa * ba, aa * bb + ab * ba, 2.0 * ab * bb],
                [ba * ba, ba * bb, bb * bb],
            ],
        }
    }

    pub fn apply(&self, s: &EdgeVector) -> EdgeVector {
        let v = s.to_array();
        let row = |r: usize| self.m[r][0] * v[0] + self.m[r][1] * v[1] + self.m[r][2] * v[2];
        EdgeVector::new(row(0), row(1), row(2))
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Inverse by cofactor expansion.
    pub fn inverse(&self) -> Result<[[f64; 3]; 3]> {
        let det = self.det();
        if det.abs() < DET_GUARD {
            return Err(Error::SingularMatrix { det });
        }
        let m = &self.m;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        // adjugate is the transposed cofactor matrix
        let adj = [
            [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
            [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
            [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
        ];
        Ok(adj.map(|row| row.map(|x| x / det)))
    }
}

pub fn dyadic_matrix(c: &ConfusionMatrix) -> DyadicMatrix {
    DyadicMatrix::from_confusion(c)
}
