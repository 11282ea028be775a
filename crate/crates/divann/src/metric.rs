//! Distance functions: the euclidean metric on points and the pluggable
//! similarity measure ρ used by diversity constraints.

use crate::dataset::VectorDataset;
use crate::error::{Error, Result};

/// Euclidean distance with dimension checking. Accumulates in f64 so results
/// match a high-precision recomputation to well under 1e-6 relative error.
pub fn distance(a: &[f32], b: &[f32]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::usage(format!(
            "dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(l2(a, b))
}

/// Unchecked hot-path euclidean distance; callers guarantee equal lengths.
#[inline]
pub(crate) fn l2(a: &[f32], b: &[f32]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0f64;
    for (x, y) in a.iter().zip(b.iter()) {
        let d = *x as f64 - *y as f64;
        acc += d * d;
    }
    acc.sqrt()
}

/// Which similarity measure ρ a diversity constraint is evaluated under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoMode {
    /// ρ(u, v) = 0 if the points share a color, 1 otherwise. Makes
    /// (k', C)-diversity with C in (0, 1] coincide with k'-colorfulness.
    BinaryColor,
    /// ρ(u, v) = euclidean distance between the points.
    Euclidean,
}

impl RhoMode {
    pub fn name(&self) -> &'static str {
        match self {
            RhoMode::BinaryColor => "binary",
            RhoMode::Euclidean => "euclidean",
        }
    }
}

impl std::str::FromStr for RhoMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" | "binary-color" => Ok(RhoMode::BinaryColor),
            "euclidean" | "l2" => Ok(RhoMode::Euclidean),
            other => Err(Error::usage(format!("unknown rho mode '{other}'"))),
        }
    }
}

/// ρ between two dataset points, with id validation.
pub fn rho(ds: &VectorDataset, i: u32, j: u32, mode: RhoMode) -> Result<f64> {
    let n = ds.n() as u32;
    if i >= n || j >= n {
        return Err(Error::usage(format!(
            "point id out of range: {} (n = {})",
            i.max(j),
            n
        )));
    }
    Ok(rho_unchecked(ds, i, j, mode))
}

/// Unchecked hot-path ρ; callers guarantee valid ids.
#[inline]
pub(crate) fn rho_unchecked(ds: &VectorDataset, i: u32, j: u32, mode: RhoMode) -> f64 {
    match mode {
        RhoMode::BinaryColor => {
            if ds.color(i) == ds.color(j) {
                0.0
            } else {
                1.0
            }
        }
        RhoMode::Euclidean => ds.dist(i, j),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::VectorDataset;

    #[test]
    fn classic_3_4_5() {
        let d = distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap();
        assert!((d - 5.0).abs() < 1e-12);
    }

    #[test]
    fn zero_distance_to_self() {
        let p = [1.5f32, -2.25, 0.5];
        assert_eq!(distance(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_usage_error() {
        let e = distance(&[1.0], &[1.0, 2.0]).unwrap_err();
        assert!(matches!(e, Error::Usage(_)));
    }

    #[test]
    fn matches_high_precision_recomputation() {
        // Seedless fixed pseudo-random 16-dim pair; reference computed with
        // Kahan-compensated f64 summation.
        let a: Vec<f32> = (0..16).map(|i| ((i * 37 + 11) % 97) as f32 / 9.7).collect();
        let b: Vec<f32> = (0..16).map(|i| ((i * 53 + 29) % 89) as f32 / 8.3).collect();
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for i in 0..16 {
            let d = a[i] as f64 - b[i] as f64;
            let term = d * d - comp;
            let t = sum + term;
            comp = (t - sum) - term;
            sum = t;
        }
        let reference = sum.sqrt();
        let got = distance(&a, &b).unwrap();
        assert!(
            (got - reference).abs() <= 1e-6 * reference.max(1.0),
            "got {got}, reference {reference}"
        );
    }

    fn two_color_pair() -> VectorDataset {
        VectorDataset::new(1, vec![0.0, 3.0], vec![7, 9]).unwrap()
    }

    #[test]
    fn binary_rho_same_and_different_color() {
        let ds = VectorDataset::new(1, vec![0.0, 3.0], vec![7, 7]).unwrap();
        assert_eq!(rho(&ds, 0, 1, RhoMode::BinaryColor).unwrap(), 0.0);
        let ds2 = two_color_pair();
        assert_eq!(rho(&ds2, 0, 1, RhoMode::BinaryColor).unwrap(), 1.0);
    }

    #[test]
    fn euclidean_rho_equals_distance() {
        let ds = two_color_pair();
        assert_eq!(rho(&ds, 0, 1, RhoMode::Euclidean).unwrap(), 3.0);
    }

    #[test]
    fn invalid_id_is_usage_error() {
        let ds = two_color_pair();
        assert!(matches!(
            rho(&ds, 0, 5, RhoMode::Euclidean),
            Err(Error::Usage(_))
        ));
    }
}
