//! Gaussian radial basis first layer.
//!
//! A [`GaussianLayer`] maps points of `R^{n_d}` into the unit cube of
//! `H^{n_c}` by evaluating one Gaussian kernel per center,
//! `k_i(x) = exp(-||x - c_i||^2 / sigma_i^2)`. Each center carries its own
//! bandwidth, so multi-scale layers are the general case and single-scale
//! layers are the special case of all-equal bandwidths.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{sq_dist, Point};
use crate::linalg::{sym_eigenvalues, Mat};

/// Relative singular-value cutoff for the affine-independence rank test.
const AFFINE_RANK_TOL: f64 = 1e-10;

/// Output of a kernel map: a vector in `H^{n_c}`.
///
/// Components produced by a Gaussian layer always lie in `(0, 1]`; the type
/// itself does not enforce the range so synthetic vectors can be built in
/// tests and by the polynomial layer.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertVector(Vec<f64>);

impl HilbertVector {
    pub fn new(values: Vec<f64>) -> Self {
        HilbertVector(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// Largest component (infinity norm for nonnegative kernel outputs).
    pub fn max_component(&self) -> f64 {
        self.0.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Gaussian kernel evaluation `exp(-||x - c||^2 / sigma^2)`.
///
/// Returns 1 exactly when `x == c` and decays toward 0 with distance.
pub fn gauss_kernel(x: &Point, c: &Point, sigma: f64) -> Result<f64> {
    if x.dim() != c.dim() {
        return Err(Error::Dimension { expected: c.dim(), got: x.dim() });
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Parameter(format!("bandwidth must be positive, got {sigma}")));
    }
    Ok((-sq_dist(x.coords(), c.coords()) / (sigma * sigma)).exp())
}

/// Report from [`GaussianLayer::check_embedding`].
///
/// `satisfies_count` holds when there are at least `n_d + 1` centers;
/// `has_affine_basis` additionally requires some subset of `n_d + 1` centers
/// to be affinely independent, i.e. able to define a coordinate system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbeddingReport {
    pub satisfies_count: bool,
    pub has_affine_basis: bool,
}

/// First-layer center set with per-center bandwidths.
///
/// Immutable after construction; all operations are pure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianLayer {
    centers: Vec<Point>,
    bandwidths: Vec<f64>,
}

impl GaussianLayer {
    /// Build a layer from centers and matching bandwidths.
    ///
    /// Rejects empty center sets, non-positive bandwidths, mixed dimensions,
    /// and duplicate (center, bandwidth) pairs. Duplicates would make two
    /// Hilbert coordinates identical and the downstream LP columns collinear.
    pub fn new(centers: Vec<Point>, bandwidths: Vec<f64>) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::Parameter("layer needs at least one center".into()));
        }
        if centers.len() != bandwidths.len() {
            return Err(Error::Parameter(format!(
                "center/bandwidth count mismatch: {} vs {}",
                centers.len(),
                bandwidths.len()
            )));
        }
        let dim = centers[0].dim();
        for c in &centers {
            if c.dim() != dim {
                return Err(Error::Dimension { expected: dim, got: c.dim() });
            }
        }
        for &s in &bandwidths {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::Parameter(format!("bandwidth must be positive, got {s}")));
            }
        }
        for i in 0..centers.len() {
            for j in (i + 1)..centers.len() {
                if centers[i] == centers[j] && bandwidths[i] == bandwidths[j] {
                    return Err(Error::Parameter(format!(
                        "duplicate center {j} (same coordinates and bandwidth as center {i})"
                    )));
                }
            }
        }
        Ok(GaussianLayer { centers, bandwidths })
    }

    /// All centers share one bandwidth.
    pub fn uniform(centers: Vec<Point>, sigma: f64) -> Result<Self> {
        let n = centers.len();
        GaussianLayer::new(centers, vec![sigma; n])
    }

    /// Number of centers `n_c`.
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Ambient dimension `n_d`.
    pub fn dim(&self) -> usize {
        self.centers[0].dim()
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn bandwidths(&self) -> &[f64] {
        &self.bandwidths
    }

    /// Union of two layers over the same space (fixed grid + data-adaptive
    /// centers form a semi-parametric first layer).
    pub fn merged(&self, other: &GaussianLayer) -> Result<GaussianLayer> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: other.dim() });
        }
        let mut centers = self.centers.clone();
        let mut bandwidths = self.bandwidths.clone();
        centers.extend(other.centers.iter().cloned());
        bandwidths.extend(other.bandwidths.iter().cloned());
        GaussianLayer::new(centers, bandwidths)
    }

    /// Kernel map `x -> [k_1(x), ..., k_{n_c}(x)]`.
    pub fn map(&self, x: &Point) -> Result<HilbertVector> {
        if x.dim() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: x.dim() });
        }
        let values = self
            .centers
            .iter()
            .zip(&self.bandwidths)
            .map(|(c, &s)| (-sq_dist(x.coords(), c.coords()) / (s * s)).exp())
            .collect();
        Ok(HilbertVector(values))
    }

    /// Jacobian of the kernel map at `x`: row `i` is
    /// `-(2 / sigma_i^2) * k_i(x) * (x - c_i)^T`, an `n_c x n_d` matrix.
    pub fn jacobian(&self, x: &Point) -> Result<Mat> {
        if x.dim() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: x.dim() });
        }
        let n_d = self.dim();
        let mut jac = Mat::zeros(self.len(), n_d);
        for (i, (c, &s)) in self.centers.iter().zip(&self.bandwidths).enumerate() {
            let inv_s2 = 1.0 / (s * s);
            let k = (-sq_dist(x.coords(), c.coords()) * inv_s2).exp();
            let scale = -2.0 * inv_s2 * k;
            let row = jac.row_mut(i);
            for d in 0..n_d {
                row[d] = scale * (x.coords()[d] - c.coords()[d]);
            }
        }
        Ok(jac)
    }

    /// Check the embedding conditions: enough centers, and an affinely
    /// independent subset able to define a coordinate system.
    pub fn check_embedding(&self) -> EmbeddingReport {
        let n_d = self.dim();
        let satisfies_count = self.len() >= n_d + 1;
        if !satisfies_count {
            return EmbeddingReport { satisfies_count, has_affine_basis: false };
        }
        // Rank of the differences from the first center via the Gram matrix;
        // singular values are square roots of its eigenvalues.
        let origin = self.centers[0].coords();
        let mut gram = Mat::zeros(n_d, n_d);
        for c in &self.centers[1..] {
            let d: Vec<f64> = c.coords().iter().zip(origin).map(|(a, b)| a - b).collect();
            for i in 0..n_d {
                for j in 0..n_d {
                    gram.set(i, j, gram.get(i, j) + d[i] * d[j]);
                }
            }
        }
        let eig = match sym_eigenvalues(&gram) {
            Ok(e) => e,
            Err(_) => return EmbeddingReport { satisfies_count, has_affine_basis: false },
        };
        let svs: Vec<f64> = eig.iter().map(|l| l.max(0.0).sqrt()).collect();
        let sv_max = svs.iter().cloned().fold(0.0f64, f64::max);
        let rank = svs.iter().filter(|&&s| s > AFFINE_RANK_TOL * sv_max).count();
        EmbeddingReport { satisfies_count, has_affine_basis: rank == n_d }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn layer2() -> GaussianLayer {
        GaussianLayer::uniform(vec![Point::xy(0.0, 0.0), Point::xy(1.0, 0.0)], 1.0).unwrap()
    }

    #[test]
    fn kernel_identity_case() {
        let x = Point::xy(0.3, -1.2);
        assert_eq!(gauss_kernel(&x, &x, 0.7).unwrap(), 1.0);
    }

    #[test]
    fn kernel_at_one_bandwidth() {
        let k = gauss_kernel(&Point::xy(1.0, 0.0), &Point::xy(0.0, 0.0), 1.0).unwrap();
        assert_relative_eq!(k, (-1.0f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(k, 0.3678794412, epsilon = 1e-10);
    }

    #[test]
    fn kernel_hand_evaluated() {
        // ||x - c|| = 2, sigma = 2*sqrt(2): exp(-4/8) = exp(-1/2).
        let k = gauss_kernel(&Point::xy(2.0, 0.0), &Point::xy(0.0, 0.0), 2.0 * 2.0f64.sqrt()).unwrap();
        assert_relative_eq!(k, 0.6065306597, epsilon = 1e-10);
    }

    #[test]
    fn kernel_errors() {
        let x = Point::new(vec![0.0, 0.0, 0.0]).unwrap();
        let c = Point::xy(0.0, 0.0);
        assert!(matches!(gauss_kernel(&x, &c, 1.0), Err(Error::Dimension { .. })));
        assert!(matches!(
            gauss_kernel(&c, &c, 0.0),
            Err(Error::Parameter(_))
        ));
        assert!(gauss_kernel(&c, &c, -1.0).is_err());
    }

    #[test]
    fn map_componentwise() {
        let layer = layer2();
        let z = layer.map(&Point::xy(0.0, 0.0)).unwrap();
        assert_eq!(z.values()[0], 1.0);
        assert_relative_eq!(z.values()[1], (-1.0f64).exp(), epsilon = 1e-15);
        let z = layer.map(&Point::xy(1.0, 0.0)).unwrap();
        assert_relative_eq!(z.values()[0], (-1.0f64).exp(), epsilon = 1e-15);
        assert_eq!(z.values()[1], 1.0);
    }

    #[test]
    fn map_far_points_tend_to_origin() {
        let layer = layer2();
        let z = layer.map(&Point::xy(10.0, 10.0)).unwrap();
        assert!(z.values().iter().all(|&v| v < 1e-60));
        assert!(z.values().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn jacobian_zero_at_center() {
        let layer = layer2();
        let jac = layer.jacobian(&Point::xy(0.0, 0.0)).unwrap();
        assert_eq!(jac.row(0), &[0.0, 0.0]);
    }

    #[test]
    fn jacobian_hand_differentiated() {
        let layer = GaussianLayer::uniform(vec![Point::xy(0.0, 0.0)], 1.0).unwrap();
        let jac = layer.jacobian(&Point::xy(1.0, 0.0)).unwrap();
        assert_relative_eq!(jac.get(0, 0), -2.0 * (-1.0f64).exp(), epsilon = 1e-14);
        assert_eq!(jac.get(0, 1), 0.0);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let centers = vec![
            Point::xy(0.1, -0.4),
            Point::xy(1.3, 0.8),
            Point::xy(-0.7, 0.2),
            Point::xy(0.5, 1.9),
            Point::xy(-1.1, -1.5),
        ];
        let layer = GaussianLayer::new(centers, vec![0.8, 1.0, 1.3, 0.6, 1.7]).unwrap();
        let x = Point::xy(0.37, -0.21);
        let jac = layer.jacobian(&x).unwrap();
        let h = 1e-5;
        for d in 0..2 {
            let mut hi = x.coords().to_vec();
            let mut lo = hi.clone();
            hi[d] += h;
            lo[d] -= h;
            let zh = layer.map(&Point::new(hi).unwrap()).unwrap();
            let zl = layer.map(&Point::new(lo).unwrap()).unwrap();
            for i in 0..layer.len() {
                let fd = (zh.values()[i] - zl.values()[i]) / (2.0 * h);
                let an = jac.get(i, d);
                let denom = an.abs().max(1e-9);
                assert!(
                    ((an - fd) / denom).abs() <= 1e-6,
                    "row {i} axis {d}: analytic {an} vs fd {fd}"
                );
            }
        }
    }

    #[test]
    fn embedding_three_noncollinear() {
        let layer = GaussianLayer::uniform(
            vec![Point::xy(0.0, 0.0), Point::xy(1.0, 0.0), Point::xy(0.0, 1.0)],
            1.0,
        )
        .unwrap();
        let rep = layer.check_embedding();
        assert!(rep.satisfies_count && rep.has_affine_basis);
    }

    #[test]
    fn embedding_collinear() {
        let layer = GaussianLayer::uniform(
            vec![Point::xy(0.0, 0.0), Point::xy(1.0, 0.0), Point::xy(2.0, 0.0)],
            1.0,
        )
        .unwrap();
        let rep = layer.check_embedding();
        assert!(rep.satisfies_count);
        assert!(!rep.has_affine_basis);
    }

    #[test]
    fn embedding_too_few_centers() {
        let rep = layer2().check_embedding();
        assert!(!rep.satisfies_count);
        assert!(!rep.has_affine_basis);
    }

    #[test]
    fn duplicate_centers_rejected() {
        let err = GaussianLayer::uniform(vec![Point::xy(0.0, 0.0), Point::xy(0.0, 0.0)], 1.0);
        assert!(err.is_err());
        // Same coordinates at different bandwidths are distinct Hilbert axes.
        let ok = GaussianLayer::new(
            vec![Point::xy(0.0, 0.0), Point::xy(0.0, 0.0)],
            vec![1.0, 2.0],
        );
        assert!(ok.is_ok());
    }
}
