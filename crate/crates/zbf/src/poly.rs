//! Polynomial second layer over Hilbert vectors.
//!
//! Each coordinate of the layer is a polynomial kernel
//! `(y_j^T z + lambda_j)^{p_j}`; an optional trailing bias coordinate is the
//! constant 1. The default basis places the unit coordinate vectors
//! `e_1..e_{n_c}` at every order, so the layer size grows linearly with the
//! maximum order.

use crate::error::{Error, Result};
use crate::geom::dot;
use crate::kernel::GaussianLayer;
use crate::linalg::Mat;

/// One polynomial kernel coordinate `(y^T z + lambda)^order`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyKernel {
    pub y: Vec<f64>,
    pub lambda: f64,
    pub order: u32,
}

/// Ordered list of polynomial kernels plus an optional bias coordinate.
///
/// Immutable after construction; all operations are pure. Offsets with
/// `-1 < lambda < 0` are accepted but tend to produce poor cutting surfaces;
/// [`PolyLayer::has_negative_lambda`] lets callers surface a warning.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyLayer {
    kernels: Vec<PolyKernel>,
    include_bias: bool,
    input_dim: usize,
    max_order: u32,
}

impl PolyLayer {
    pub fn new(kernels: Vec<PolyKernel>, include_bias: bool) -> Result<Self> {
        let first = kernels
            .first()
            .ok_or_else(|| Error::Parameter("polynomial layer needs at least one kernel".into()))?;
        let input_dim = first.y.len();
        if input_dim == 0 {
            return Err(Error::Parameter("polynomial basis vectors must be non-empty".into()));
        }
        let mut max_order = 0;
        for (j, k) in kernels.iter().enumerate() {
            if k.y.len() != input_dim {
                return Err(Error::Dimension { expected: input_dim, got: k.y.len() });
            }
            if k.order < 1 {
                return Err(Error::Parameter(format!("kernel {j} has order 0; order must be >= 1")));
            }
            if k.y.iter().any(|v| !v.is_finite()) || !k.lambda.is_finite() {
                return Err(Error::Parameter(format!("kernel {j} has non-finite entries")));
            }
            max_order = max_order.max(k.order);
        }
        Ok(PolyLayer { kernels, include_bias, input_dim, max_order })
    }

    /// Standard kernel list for the default basis policy: for each order in
    /// `orders`, the unit vectors `e_1..e_{n_c}` with that order's offset.
    pub fn unit_basis_kernels(n_c: usize, orders: &[u32], lambdas: &[f64]) -> Result<Vec<PolyKernel>> {
        if orders.is_empty() || n_c == 0 {
            return Err(Error::Parameter("unit basis needs n_c >= 1 and at least one order".into()));
        }
        if lambdas.len() != orders.len() {
            return Err(Error::Parameter(format!(
                "need one offset per order: {} orders vs {} offsets",
                orders.len(),
                lambdas.len()
            )));
        }
        let mut kernels = Vec::with_capacity(orders.len() * n_c);
        for (&p, &lambda) in orders.iter().zip(lambdas) {
            for i in 0..n_c {
                let mut y = vec![0.0; n_c];
                y[i] = 1.0;
                kernels.push(PolyKernel { y, lambda, order: p });
            }
        }
        Ok(kernels)
    }

    /// Default basis policy layer.
    pub fn unit_basis(n_c: usize, orders: &[u32], lambdas: &[f64], include_bias: bool) -> Result<Self> {
        PolyLayer::new(Self::unit_basis_kernels(n_c, orders, lambdas)?, include_bias)
    }

    /// Pass-through layer (order-1 unit basis, zero offset, no bias): the
    /// composed machine degenerates to a plain linear function of `z`.
    pub fn identity(n_c: usize) -> Result<Self> {
        PolyLayer::unit_basis(n_c, &[1], &[0.0], false)
    }

    /// Number of output coordinates `N_p` (including the bias if present).
    pub fn output_dim(&self) -> usize {
        self.kernels.len() + usize::from(self.include_bias)
    }

    /// Expected input length `n_c`.
    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn include_bias(&self) -> bool {
        self.include_bias
    }

    pub fn kernels(&self) -> &[PolyKernel] {
        &self.kernels
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn has_negative_lambda(&self) -> bool {
        self.kernels.iter().any(|k| k.lambda < 0.0)
    }

    /// Map a Hilbert vector through the layer: coordinate `j` is
    /// `(y_j^T z + lambda_j)^{p_j}`, with the bias coordinate last.
    pub fn map(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.input_dim {
            return Err(Error::Dimension { expected: self.input_dim, got: z.len() });
        }
        let mut out = Vec::with_capacity(self.output_dim());
        for k in &self.kernels {
            out.push((dot(&k.y, z) + k.lambda).powi(k.order as i32));
        }
        if self.include_bias {
            out.push(1.0);
        }
        Ok(out)
    }

    /// Jacobian of the map at `z`: row `j` is
    /// `p_j (y_j^T z + lambda_j)^{p_j - 1} y_j^T`; the bias row is zero.
    pub fn jacobian(&self, z: &[f64]) -> Result<Mat> {
        if z.len() != self.input_dim {
            return Err(Error::Dimension { expected: self.input_dim, got: z.len() });
        }
        let mut jac = Mat::zeros(self.output_dim(), self.input_dim);
        for (j, k) in self.kernels.iter().enumerate() {
            let base = dot(&k.y, z) + k.lambda;
            let scale = k.order as f64 * base.powi(k.order as i32 - 1);
            let row = jac.row_mut(j);
            for (d, &yd) in k.y.iter().enumerate() {
                row[d] = scale * yd;
            }
        }
        Ok(jac)
    }
}

/// Normalized kernel image `k(x) / ||k(x)||_2` of a training sample, the
/// stock choice for extra basis vectors beyond the unit coordinates.
pub fn normalized_kernel_image(layer: &GaussianLayer, x: &crate::geom::Point) -> Result<Vec<f64>> {
    let z = layer.map(x)?.into_values();
    let n = crate::geom::norm2(&z);
    if n < 1e-300 {
        return Err(Error::Parameter("kernel image too close to the origin to normalize".into()));
    }
    Ok(z.iter().map(|v| v / n).collect())
}

/// Quadratic form `z^T A2 z + b2^T z + c2` produced by expanding an
/// all-order-2 layer against a coefficient vector.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    pub a2: Mat,
    pub b2: Vec<f64>,
    pub c2: f64,
}

impl QuadraticForm {
    pub fn eval(&self, z: &[f64]) -> f64 {
        let az = self.a2.matvec(z);
        dot(z, &az) + dot(&self.b2, z) + self.c2
    }
}

/// Expand `alpha^T p2(z)` into explicit quadratic-form coefficients:
/// `A2 = sum_i alpha_i y_i y_i^T`, `b2 = 2 lambda sum_i alpha_i y_i`,
/// `c2 = lambda^2 sum_i alpha_i`.
///
/// Requires every kernel at order 2 with a shared offset and no bias.
pub fn expand_quadratic(alpha: &[f64], layer: &PolyLayer) -> Result<QuadraticForm> {
    if layer.include_bias() {
        return Err(Error::Parameter("quadratic expansion requires a layer without bias".into()));
    }
    if alpha.len() != layer.output_dim() {
        return Err(Error::Dimension { expected: layer.output_dim(), got: alpha.len() });
    }
    let lambda = layer.kernels()[0].lambda;
    for k in layer.kernels() {
        if k.order != 2 {
            return Err(Error::MixedOrder(k.order));
        }
        if k.lambda != lambda {
            return Err(Error::Parameter("quadratic expansion requires a shared offset".into()));
        }
    }
    let n = layer.input_dim();
    let mut a2 = Mat::zeros(n, n);
    let mut b2 = vec![0.0; n];
    let mut c2 = 0.0;
    for (k, &a) in layer.kernels().iter().zip(alpha) {
        for i in 0..n {
            let yi = k.y[i];
            if yi == 0.0 && a == 0.0 {
                continue;
            }
            b2[i] += 2.0 * lambda * a * yi;
            for j in 0..n {
                a2.set(i, j, a2.get(i, j) + a * yi * k.y[j]);
            }
        }
        c2 += a * lambda * lambda;
    }
    Ok(QuadraticForm { a2, b2, c2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0);
        lo + u * (hi - lo)
    }

    #[test]
    fn single_square_kernel() {
        let layer = PolyLayer::new(
            vec![PolyKernel { y: vec![1.0, 0.0], lambda: 0.0, order: 2 }],
            false,
        )
        .unwrap();
        let out = layer.map(&[0.5, 0.2]).unwrap();
        assert_eq!(out, vec![0.25]);
    }

    #[test]
    fn affine_coordinates_with_bias() {
        let layer = PolyLayer::unit_basis(2, &[1], &[1.0], true).unwrap();
        let out = layer.map(&[0.3, 0.7]).unwrap();
        assert_relative_eq!(out[0], 1.3, epsilon = 1e-15);
        assert_relative_eq!(out[1], 1.7, epsilon = 1e-15);
        assert_eq!(out[2], 1.0);
    }

    #[test]
    fn cubic_hand_evaluated() {
        let layer = PolyLayer::new(
            vec![PolyKernel { y: vec![1.0, 1.0], lambda: 1.0, order: 3 }],
            false,
        )
        .unwrap();
        let out = layer.map(&[0.2, 0.3]).unwrap();
        assert_relative_eq!(out[0], 3.375, epsilon = 1e-12);
    }

    #[test]
    fn jacobian_bias_row_zero() {
        let layer = PolyLayer::unit_basis(2, &[1, 2], &[1.0, 1.0], true).unwrap();
        let jac = layer.jacobian(&[0.4, 0.6]).unwrap();
        let bias_row = jac.row(layer.output_dim() - 1);
        assert!(bias_row.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn jacobian_hand_case() {
        let layer = PolyLayer::new(
            vec![PolyKernel { y: vec![1.0, 0.0], lambda: 0.0, order: 2 }],
            false,
        )
        .unwrap();
        let jac = layer.jacobian(&[0.5, 0.2]).unwrap();
        assert_eq!(jac.row(0), &[1.0, 0.0]);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let n_c = 4;
            let kernels: Vec<PolyKernel> = (0..6)
                .map(|j| PolyKernel {
                    y: (0..n_c).map(|_| uniform(&mut rng, -1.0, 1.0)).collect(),
                    lambda: uniform(&mut rng, 0.0, 1.5),
                    order: 1 + (j % 3) as u32,
                })
                .collect();
            let layer = PolyLayer::new(kernels, true).unwrap();
            let z: Vec<f64> = (0..n_c).map(|_| uniform(&mut rng, 0.0, 1.0)).collect();
            let jac = layer.jacobian(&z).unwrap();
            let h = 1e-6;
            for d in 0..n_c {
                let mut zh = z.clone();
                let mut zl = z.clone();
                zh[d] += h;
                zl[d] -= h;
                let fh = layer.map(&zh).unwrap();
                let fl = layer.map(&zl).unwrap();
                for j in 0..layer.output_dim() {
                    let fd = (fh[j] - fl[j]) / (2.0 * h);
                    let an = jac.get(j, d);
                    let denom = an.abs().max(1e-6);
                    assert!(
                        ((an - fd) / denom).abs() <= 1e-6,
                        "coord {j} axis {d}: analytic {an} vs fd {fd}"
                    );
                }
            }
        }
    }

    #[test]
    fn expand_unit_sphere_form() {
        let layer = PolyLayer::unit_basis(2, &[2], &[0.0], false).unwrap();
        let q = expand_quadratic(&[1.0, 1.0], &layer).unwrap();
        assert_eq!(q.a2.get(0, 0), 1.0);
        assert_eq!(q.a2.get(1, 1), 1.0);
        assert_eq!(q.a2.get(0, 1), 0.0);
        assert!(q.b2.iter().all(|&v| v == 0.0));
        assert_eq!(q.c2, 0.0);
    }

    #[test]
    fn expand_hypersphere_radius() {
        let rho: f64 = 0.5;
        let layer = PolyLayer::unit_basis(3, &[2], &[0.0], false).unwrap();
        let alpha = vec![rho.powi(-2); 3];
        let q = expand_quadratic(&alpha, &layer).unwrap();
        let z = [0.2, 0.1, 0.4];
        let zz: f64 = z.iter().map(|v| v * v).sum();
        assert_relative_eq!(q.eval(&z), zz / (rho * rho), epsilon = 1e-12);
    }

    #[test]
    fn expand_identity_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n_c = 4;
        let lambda = 0.7;
        let mut kernels = PolyLayer::unit_basis_kernels(n_c, &[2], &[lambda]).unwrap();
        for _ in 0..3 {
            kernels.push(PolyKernel {
                y: (0..n_c).map(|_| uniform(&mut rng, -1.0, 1.0)).collect(),
                lambda,
                order: 2,
            });
        }
        let layer = PolyLayer::new(kernels, false).unwrap();
        let alpha: Vec<f64> = (0..layer.output_dim()).map(|_| uniform(&mut rng, -2.0, 2.0)).collect();
        let q = expand_quadratic(&alpha, &layer).unwrap();
        for _ in 0..100 {
            let z: Vec<f64> = (0..n_c).map(|_| uniform(&mut rng, 0.0, 1.0)).collect();
            let direct = dot(&alpha, &layer.map(&z).unwrap());
            assert!(
                (direct - q.eval(&z)).abs() <= 1e-10,
                "direct {direct} vs expanded {}",
                q.eval(&z)
            );
        }
    }

    #[test]
    fn expand_rejects_mixed_orders() {
        let layer = PolyLayer::unit_basis(2, &[1, 2], &[0.0, 0.0], false).unwrap();
        let err = expand_quadratic(&[1.0; 4], &layer);
        assert!(matches!(err, Err(Error::MixedOrder(1))));
    }

    #[test]
    fn unit_basis_sizing() {
        let layer = PolyLayer::unit_basis(5, &[1, 2, 3], &[1.0, 1.0, 1.0], true).unwrap();
        assert_eq!(layer.output_dim(), 3 * 5 + 1);
        assert_eq!(layer.max_order(), 3);
    }
}
