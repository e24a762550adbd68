//! Confusion-matrix corrections and derived group measures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Group;
use crate::noise::{dyadic_matrix, ConfusionMatrix, DET_GUARD};

/// Two-group proportion vector. Corrected estimates may leave `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropVector {
    pub a: f64,
    pub b: f64,
}

impl PropVector {
    pub fn new(a: f64, b: f64) -> Self {
        PropVector { a, b }
    }

    /// `(1 - b, b)`.
    pub fn from_minority(b: f64) -> Self {
        PropVector { a: 1.0 - b, b }
    }

    pub fn get(&self, group: Group) -> f64 {
        match group {
            Group::A => self.a,
            Group::B => self.b,
        }
    }

    pub fn sum(&self) -> f64 {
        self.a + self.b
    }

    pub fn in_range(&self) -> bool {
        [self.a, self.b].iter().all(|x| (0.0..=1.0).contains(x))
    }

    /// Clamps to `[0, 1]` and renormalizes. Only meant for display.
    pub fn clipped(&self) -> Self {
        let (a, b) = (self.a.clamp(0.0, 1.0), self.b.clamp(0.0, 1.0));
        let s = a + b;
        PropVector::new(a / s, b / s)
    }
}

/// Edge-type proportions `(aa, ab, bb)`; `ab` counts every mixed edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeVector {
    pub aa: f64,
    pub ab: f64,
    pub bb: f64,
}

impl EdgeVector {
    pub fn new(aa: f64, ab: f64, bb: f64) -> Self {
        EdgeVector { aa, ab, bb }
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.aa, self.ab, self.bb]
    }

    pub fn sum(&self) -> f64 {
        self.aa + self.ab + self.bb
    }

    pub fn in_range(&self) -> bool {
        self.to_array().iter().all(|x| (0.0..=1.0).contains(x))
    }

    pub fn clipped(&self) -> Self {
        let v = self.to_array().map(|x| x.clamp(0.0, 1.0));
        let s: f64 = v.iter().sum();
        EdgeVector::new(v[0] / s, v[1] / s, v[2] / s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomophilyIndex {
    pub value: f64,
    /// Set when an input left `[0, 1]`; the formula is still evaluated.
    pub out_of_range: bool,
}

/// `p̂ = C⁻¹ m̂` in closed form.
pub fn adjust_proportions(measured: &PropVector, c: &ConfusionMatrix) -> Result<PropVector> {
    let det = c.det();
    if det.abs() < DET_GUARD {
        return Err(Error::SingularMatrix { det });
    }
    let (aa, ab) = (c.prob(Group::A, Group::A), c.prob(Group::A, Group::B));
    let (ba, bb) = (c.prob(Group::B, Group::A), c.prob(Group::B, Group::B));
    Ok(PropVector::new(
        (measured.a * bb - measured.b * ab) / det,
        (measured.b * aa - measured.a * ba) / det,
    ))
}

/// `ŝ = M⁻¹ t̂` with `M` the dyadic matrix of `c`.
pub fn adjust_edge_proportions(measured: &EdgeVector, c: &ConfusionMatrix) -> Result<EdgeVector> {
    let inv = dyadic_matrix(c).inverse()?;
    let t = measured.to_array();
    let row = |r: usize| inv[r][0] * t[0] + inv[r][1] * t[1] + inv[r][2] * t[2];
    Ok(EdgeVector::new(row(0), row(1), row(2)))
}

/// Corrects top-quantile group shares exactly like [`adjust_proportions`].
pub fn adjust_visibility(measured_top: &PropVector, c: &ConfusionMatrix) -> Result<PropVector> {
    adjust_proportions(measured_top, c)
}

/// Share of `group`'s edge endpoints that land inside the group,
/// `2 s_gg / (2 s_gg + s_ab)`.
pub fn ingroup_share(edges: &EdgeVector, group: Group) -> Result<f64> {
    let within = match group {
        Group::A => edges.aa,
        Group::B => edges.bb,
    };
    let denom = 2.0 * within + edges.ab;
    if denom.abs() < 1e-15 {
        return Err(Error::NoEndpoints(group));
    }
    Ok(2.0 * within / denom)
}

/// Coleman's index from in-group share `s` and group proportion `p`.
pub fn coleman_homophily(share: f64, proportion: f64) -> Result<HomophilyIndex> {
    if proportion == 0.0 || proportion == 1.0 || !proportion.is_finite() || !share.is_finite() {
        return Err(Error::UndefinedHomophily(proportion));
    }
    let excess = share - proportion;
    let value = if excess >= 0.0 {
        excess / (1.0 - proportion)
    } else {
        excess / proportion
    };
    let out_of_range = !(0.0..=1.0).contains(&share) || !(0.0..1.0).contains(&proportion);
    Ok(HomophilyIndex { value, out_of_range })
}

/// Variance multiplier of corrected proportions, `1 / det(C)²`.
pub fn variance_inflation_nodes(c: &ConfusionMatrix) -> Result<f64> {
    let det = c.det();
    if det.abs() < DET_GUARD {
        return Err(Error::SingularMatrix { det });
    }
    Ok(1.0 / (det * det))
}

/// Variance of the corrected `ŝ_aa` given per-component variances of `t̂`,
/// `Σ_k B[0][k]² var_t[k]` with `B = M⁻¹`.
pub fn variance_inflation_edges(c: &ConfusionMatrix, var_t: [f64; 3]) -> Result<f64> {
    if var_t.iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("variances must be nonnegative, got {var_t:?}")));
    }
    let inv = dyadic_matrix(c).inverse()?;
    Ok((0..3).map(|k| inv[0][k] * inv[0][k] * var_t[k]).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::symmetric_confusion;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn rate(r: f64) -> ConfusionMatrix {
        symmetric_confusion(r).unwrap()
    }

    #[test]
    fn proportion_correction_examples() {
        let p = adjust_proportions(&PropVector::new(0.68, 0.32), &rate(0.2)).unwrap();
        assert_abs_diff_eq!(p.a, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(p.b, 0.2, epsilon = 1e-12);

        let m = PropVector::new(0.37, 0.63);
        assert_eq!(adjust_proportions(&m, &ConfusionMatrix::identity()).unwrap(), m);

        let p = adjust_proportions(&PropVector::new(0.5, 0.5), &rate(0.2)).unwrap();
        assert_abs_diff_eq!(p.b, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn visibility_correction_matches_proportions() {
        let m = PropVector::new(0.9, 0.1);
        assert_eq!(
            adjust_visibility(&m, &rate(0.1)).unwrap(),
            adjust_proportions(&m, &rate(0.1)).unwrap()
        );
        let p = adjust_visibility(&PropVector::new(0.68, 0.32), &rate(0.2)).unwrap();
        assert_abs_diff_eq!(p.b, 0.2, epsilon = 1e-12);
    }

    #[test]
    fn corrected_values_are_flagged_not_clipped() {
        // measured minority share below the error floor
        let p = adjust_proportions(&PropVector::new(0.9, 0.1), &rate(0.2)).unwrap();
        assert!(p.b < 0.0);
        assert!(!p.in_range());
        let c = p.clipped();
        assert_eq!(c, PropVector::new(1.0, 0.0));
    }

    #[test]
    fn singular_matrices_are_refused() {
        let half = ConfusionMatrix::from_row_major([0.5, 0.5, 0.5, 0.5]).unwrap();
        let m = PropVector::new(0.5, 0.5);
        assert!(matches!(adjust_proportions(&m, &half), Err(Error::SingularMatrix { .. })));
        assert!(adjust_edge_proportions(&EdgeVector::new(0.3, 0.4, 0.3), &half).is_err());
        assert!(variance_inflation_nodes(&half).is_err());
    }

    #[test]
    fn edge_correction_round_trip_and_identity() {
        let s = EdgeVector::new(0.7, 0.2, 0.1);
        let t = dyadic_matrix(&rate(0.2)).apply(&s);
        let back = adjust_edge_proportions(&t, &rate(0.2)).unwrap();
        for (x, y) in back.to_array().iter().zip(s.to_array()) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-12);
        }
        assert_eq!(adjust_edge_proportions(&s, &ConfusionMatrix::identity()).unwrap(), s);
    }

    /// Gaussian elimination with partial pivoting, independent of the
    /// cofactor inverse used by the implementation.
    fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
        for col in 0..3 {
            let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
            a.swap(col, pivot);
            b.swap(col, pivot);
            for r in col + 1..3 {
                let f = a[r][col] / a[col][col];
                for k in col..3 {
                    a[r][k] -= f * a[col][k];
                }
                b[r] -= f * b[col];
            }
        }
        let mut x = [0.0; 3];
        for r in (0..3).rev() {
            let tail: f64 = (r + 1..3).map(|k| a[r][k] * x[k]).sum();
            x[r] = (b[r] - tail) / a[r][r];
        }
        x
    }

    #[test]
    fn edge_correction_matches_linear_solve() {
        let third = 1.0 / 3.0;
        let t = EdgeVector::new(third, third, third);
        let s = adjust_edge_proportions(&t, &rate(0.2)).unwrap();
        assert_abs_diff_eq!(s.sum(), 1.0, epsilon = 1e-12);
        let oracle = solve3(dyadic_matrix(&rate(0.2)).m, t.to_array());
        for (x, y) in s.to_array().iter().zip(oracle) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn ingroup_share_examples() {
        assert_eq!(ingroup_share(&EdgeVector::new(1.0, 0.0, 0.0), Group::A).unwrap(), 1.0);
        assert_eq!(ingroup_share(&EdgeVector::new(0.0, 1.0, 0.0), Group::A).unwrap(), 0.0);
        assert_eq!(ingroup_share(&EdgeVector::new(0.0, 1.0, 0.0), Group::B).unwrap(), 0.0);
        assert_abs_diff_eq!(
            ingroup_share(&EdgeVector::new(0.5, 0.3, 0.2), Group::A).unwrap(),
            1.0 / 1.3,
            epsilon = 1e-15
        );
        assert!(matches!(
            ingroup_share(&EdgeVector::new(1.0, 0.0, 0.0), Group::B),
            Err(Error::NoEndpoints(Group::B))
        ));
    }

    #[test]
    fn coleman_examples() {
        assert_eq!(coleman_homophily(1.0, 0.2).unwrap().value, 1.0);
        assert_eq!(coleman_homophily(0.0, 0.39).unwrap().value, -1.0);
        assert_eq!(coleman_homophily(0.3, 0.3).unwrap().value, 0.0);
        assert!(coleman_homophily(0.5, 0.0).is_err());
        assert!(coleman_homophily(0.5, 1.0).is_err());
        let h = coleman_homophily(-0.05, 0.2).unwrap();
        assert!(h.out_of_range);
        assert!(h.value < -1.0);
    }

    #[test]
    fn variance_inflation_values() {
        assert_abs_diff_eq!(variance_inflation_nodes(&rate(0.2)).unwrap(), 2.78, epsilon = 0.01);
        assert_abs_diff_eq!(variance_inflation_nodes(&rate(0.1)).unwrap(), 1.5625, epsilon = 1e-12);
        assert_eq!(variance_inflation_nodes(&ConfusionMatrix::identity()).unwrap(), 1.0);
        assert_eq!(variance_inflation_edges(&ConfusionMatrix::identity(), [0.3, 0.2, 0.1]).unwrap(), 0.3);
        let b00 = dyadic_matrix(&rate(0.2)).inverse().unwrap()[0][0];
        assert_abs_diff_eq!(
            variance_inflation_edges(&rate(0.2), [0.01, 0.0, 0.0]).unwrap(),
            b00 * b00 * 0.01,
            epsilon = 1e-15
        );
        assert!(variance_inflation_edges(&rate(0.2), [-1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn node_inflation_increases_with_rate() {
        let mut last = 0.0;
        for i in 0..50 {
            let v = variance_inflation_nodes(&rate(i as f64 * 0.01)).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    fn confusion_strategy() -> impl Strategy<Value = ConfusionMatrix> {
        (0.0f64..0.45, 0.0f64..0.45)
            .prop_map(|(x, y)| ConfusionMatrix::from_row_major([1.0 - x, y, x, 1.0 - y]).unwrap())
    }

    proptest! {
        #[test]
        fn homophily_sign_and_bounds(s in 0.0f64..=1.0, p in 0.001f64..0.999) {
            let h = coleman_homophily(s, p).unwrap();
            prop_assert!(h.value.abs() <= 1.0 + 1e-12);
            prop_assert_eq!(h.value > 0.0, s > p);
            prop_assert_eq!(h.value < 0.0, s < p);
            prop_assert!(!h.out_of_range);
        }

        #[test]
        fn corrections_preserve_sums(c in confusion_strategy(), x in -0.5f64..1.5, y in -0.5f64..1.5) {
            let p = adjust_proportions(&PropVector::from_minority(x), &c).unwrap();
            prop_assert!((p.sum() - 1.0).abs() < 1e-9);
            let s = adjust_edge_proportions(&EdgeVector::new(x, y, 1.0 - x - y), &c).unwrap();
            prop_assert!((s.sum() - 1.0).abs() < 1e-9);
        }
    }
}
