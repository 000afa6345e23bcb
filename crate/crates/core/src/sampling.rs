//! Refinement sampling: restriction of eigenfunctions to the vertices of
//! `G_N`, the trapezoid functional on edge samples, and the closed-form
//! frequency responses that compare the discrete and continuous inner
//! products.

use num_complex::Complex64;
use thiserror::Error;

use crate::eigenbasis::{continuous_inner_product, EdgeWaveFunction};
use crate::graph::{vertex_inner_product, Graph};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplingError {
    #[error("signal has {got} values, expected {expected} at level {level}")]
    ShapeMismatch {
        level: usize,
        expected: usize,
        got: usize,
    },
    #[error("trapezoid needs at least 2 samples, got {got}")]
    TooFewSamples { got: usize },
    #[error("z = {z} is outside the pole-free interval (-pi, pi)")]
    PoleDomain { z: f64 },
    #[error("functions live in different eigenspaces: omega {omega_f} vs {omega_g}")]
    EigenspaceMismatch { omega_f: f64, omega_g: f64 },
    #[error("lambda = {lambda} is outside (0, (N pi)^2] at level {level}")]
    FrequencyOutOfRange { lambda: f64, level: usize },
}

/// Complex values on the vertices of `G_N` in canonical order: original
/// vertices first, then per edge the interior samples `x_1 .. x_{N-1}`
/// from tail to head.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSignal {
    level: usize,
    values: Vec<Complex64>,
}

impl VertexSignal {
    pub fn new(level: usize, values: Vec<Complex64>) -> Self {
        assert!(level >= 1);
        Self { level, values }
    }

    pub fn zeros(graph: &Graph, level: usize) -> Self {
        Self::new(
            level,
            vec![Complex64::new(0.0, 0.0); graph.refined_vertex_count(level)],
        )
    }

    /// Refinement level N.
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn check_shape(&self, graph: &Graph) -> Result<(), SamplingError> {
        let expected = graph.refined_vertex_count(self.level);
        if self.values.len() != expected {
            return Err(SamplingError::ShapeMismatch {
                level: self.level,
                expected,
                got: self.values.len(),
            });
        }
        Ok(())
    }

    /// The N+1 samples of the signal along `edge`, tail to head.
    pub fn edge_samples(&self, graph: &Graph, edge: usize) -> Vec<Complex64> {
        let n = self.level;
        let (tail, head) = graph.edges()[edge];
        let mut samples = Vec::with_capacity(n + 1);
        samples.push(self.values[tail]);
        for i in 1..n {
            samples.push(self.values[graph.interior_index(edge, i, n)]);
        }
        samples.push(self.values[head]);
        samples
    }

    /// Squared norm in the degree-weighted inner product.
    pub fn norm_sq(&self, graph: &Graph) -> f64 {
        vertex_inner_product(graph, self, self)
            .map(|ip| ip.re)
            .unwrap_or(f64::NAN)
    }
}

/// Evaluates an eigenfunction at the vertices of `G_N`: original vertices
/// plus the samples `x_i = i/N` on every edge in canonical order.
pub fn restrict(graph: &Graph, psi: &EdgeWaveFunction, n: usize) -> VertexSignal {
    assert_eq!(psi.edge_count(), graph.edge_count());
    let mut values = vec![Complex64::new(0.0, 0.0); graph.refined_vertex_count(n)];
    let vertex_values = psi.vertex_values(graph);
    values[..graph.vertex_count()].copy_from_slice(&vertex_values);
    for edge in 0..graph.edge_count() {
        for i in 1..n {
            values[graph.interior_index(edge, i, n)] = psi.eval(edge, i as f64 / n as f64);
        }
    }
    VertexSignal::new(n, values)
}

/// Trapezoid functional on N+1 uniform samples:
/// `(1/2N) [f(x_0) + f(x_N) + 2 sum_{n=1}^{N-1} f(x_n)]`.
pub fn trapezoid(edge_samples: &[Complex64]) -> Result<Complex64, SamplingError> {
    if edge_samples.len() < 2 {
        return Err(SamplingError::TooFewSamples {
            got: edge_samples.len(),
        });
    }
    let n = edge_samples.len() - 1;
    let ends = edge_samples[0] + edge_samples[n];
    let interior: Complex64 = edge_samples[1..n].iter().sum();
    Ok((ends + 2.0 * interior) / (2.0 * n as f64))
}

/// `integral_0^1 e^{i theta x} dx`, with a series branch at the removable
/// singularity.
pub(crate) fn unit_exp_integral(theta: f64) -> Complex64 {
    if theta.abs() < 1e-4 {
        let it = Complex64::new(0.0, theta);
        // sum_k (i theta)^k / (k+1)!
        let mut term = Complex64::new(1.0, 0.0);
        let mut acc = term;
        for k in 1..=4 {
            term *= it / k as f64;
            acc += term / (k + 1) as f64;
        }
        return acc;
    }
    let it = Complex64::new(0.0, theta);
    (it.exp() - 1.0) / it
}

/// `integral_0^1 x e^{i theta x} dx`.
pub(crate) fn unit_exp_x_integral(theta: f64) -> Complex64 {
    if theta.abs() < 1e-4 {
        let it = Complex64::new(0.0, theta);
        // sum_k (i theta)^k / (k! (k+2))
        let mut term = Complex64::new(1.0, 0.0);
        let mut acc = term / 2.0;
        for k in 1..=4 {
            term *= it / k as f64;
            acc += term / (k + 2) as f64;
        }
        return acc;
    }
    let it = Complex64::new(0.0, theta);
    let e = it.exp();
    e / it - (e - 1.0) / (it * it)
}

/// `z cot(z)` without the domain restriction of [`m0`]; the caller
/// guarantees `sin(z) != 0`.
pub(crate) fn zcot(z: f64) -> f64 {
    if z.abs() < 1e-2 {
        let z2 = z * z;
        return 1.0 - z2 / 3.0 - z2 * z2 / 45.0 - 2.0 * z2 * z2 * z2 / 945.0;
    }
    z * z.cos() / z.sin()
}

/// Trapezoid frequency response `M_0(z) = M_0(-z) = z cot(z)` on
/// `(-pi, pi)`, the ratio `T_N(e^{i omega x}) / integral_0^1 e^{i omega x}`
/// at `z = omega / 2N`.
pub fn m0(z: f64) -> Result<f64, SamplingError> {
    if z.abs() >= std::f64::consts::PI {
        return Err(SamplingError::PoleDomain { z });
    }
    Ok(zcot(z))
}

/// Residual response after the endpoint-derivative correction:
/// `M_1(z) = 1 - z cot(z) - z^2/3 = O(z^4)`, even and analytic on
/// `(-pi, pi)`.
pub fn m1(z: f64) -> Result<f64, SamplingError> {
    if z.abs() >= std::f64::consts::PI {
        return Err(SamplingError::PoleDomain { z });
    }
    if z.abs() <= 0.5 {
        // Bernoulli-number series, full double precision at |z| = 1/2.
        let z2 = z * z;
        let z4 = z2 * z2;
        return Ok(z4
            * (1.0 / 45.0
                + z2 * (2.0 / 945.0)
                + z4 * (1.0 / 4725.0)
                + z4 * z2 * (2.0 / 93555.0)
                + z4 * z4 * (1382.0 / 638_512_875.0)
                + z4 * z4 * z2 * (4.0 / 18_243_225.0)
                + z4 * z4 * z4 * (3617.0 / 162_826_623_900.0)
                + z4 * z4 * z4 * z2 * (87734.0 / 38_979_295_480_125.0)));
    }
    Ok(1.0 - zcot(z) - z * z / 3.0)
}

/// Closed-form `T_N(e^{i theta x})` on N+1 uniform samples of `[0, 1]`:
/// equals 1 when `theta` is a multiple of `2 N pi` (all samples coincide),
/// and `M_0(theta / 2N) integral_0^1 e^{i theta x}` otherwise.
pub fn trapezoid_exp(theta: f64, n: usize) -> Complex64 {
    let period = 2.0 * std::f64::consts::PI * n as f64;
    let nearest = (theta / period).round();
    if (theta - nearest * period).abs() < 1e-9 {
        return Complex64::new(1.0, 0.0);
    }
    zcot(theta / (2.0 * n as f64)) * unit_exp_integral(theta)
}

/// Analytic `<R_N f, R_N g>_N` for wave-form functions, by splitting the
/// per-edge products into exponentials and applying [`trapezoid_exp`].
/// Zero-frequency inputs must be constant on each edge (eigenfunctions
/// are), since the linear-form trapezoid response is not needed here.
pub fn discrete_wave_inner_product(
    f: &EdgeWaveFunction,
    g: &EdgeWaveFunction,
    n: usize,
) -> Complex64 {
    assert_eq!(f.edge_count(), g.edge_count());
    let edges = f.edge_count();
    let (wf, wg) = (f.omega(), g.omega());
    let zero = Complex64::new(0.0, 0.0);
    let mut acc = zero;
    match (wf == 0.0, wg == 0.0) {
        (false, false) => {
            let t_diff = trapezoid_exp(wf - wg, n);
            let t_sum = trapezoid_exp(wf + wg, n);
            let t_sum_neg = trapezoid_exp(-wf - wg, n);
            let t_diff_neg = trapezoid_exp(-wf + wg, n);
            for edge in 0..edges {
                let (fa, fb) = f.coefficients()[edge];
                let (ga, gb) = g.coefficients()[edge];
                acc += fa * ga.conj() * t_diff
                    + fa * gb.conj() * t_sum
                    + fb * ga.conj() * t_sum_neg
                    + fb * gb.conj() * t_diff_neg;
            }
        }
        (true, false) => {
            let t_neg = trapezoid_exp(-wg, n);
            let t_pos = trapezoid_exp(wg, n);
            for edge in 0..edges {
                let (fa, fb) = f.coefficients()[edge];
                assert_eq!(fb, zero, "zero-frequency input must be constant");
                let (ga, gb) = g.coefficients()[edge];
                acc += fa * (ga.conj() * t_neg + gb.conj() * t_pos);
            }
        }
        (false, true) => return discrete_wave_inner_product(g, f, n).conj(),
        (true, true) => {
            for edge in 0..edges {
                let (fa, fb) = f.coefficients()[edge];
                let (ga, gb) = g.coefficients()[edge];
                assert_eq!(fb, zero, "zero-frequency input must be constant");
                assert_eq!(gb, zero, "zero-frequency input must be constant");
                acc += fa * ga.conj();
            }
        }
    }
    acc / edges as f64
}

/// Side-by-side discrete and continuous inner products of two functions in
/// the same eigenspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerProductComparison {
    pub discrete: Complex64,
    pub continuous: Complex64,
    pub error: f64,
}

/// Restricts both functions to `G_N` and compares the sampled inner
/// product against the analytic continuous one. Exact (to rounding) when
/// `omega` is an integer multiple of pi below Nyquist; at the Nyquist
/// cosine the discrete value is exactly twice the continuous one.
pub fn inner_product_error(
    graph: &Graph,
    f: &EdgeWaveFunction,
    g: &EdgeWaveFunction,
    n: usize,
) -> Result<InnerProductComparison, SamplingError> {
    if (f.omega() - g.omega()).abs() > 1e-9 {
        return Err(SamplingError::EigenspaceMismatch {
            omega_f: f.omega(),
            omega_g: g.omega(),
        });
    }
    let lambda = f.lambda();
    let nyquist = (n as f64 * std::f64::consts::PI).powi(2);
    if lambda.is_nan() || lambda <= 0.0 || lambda > nyquist * (1.0 + 1e-12) {
        return Err(SamplingError::FrequencyOutOfRange { lambda, level: n });
    }
    let rf = restrict(graph, f, n);
    let rg = restrict(graph, g, n);
    let discrete = vertex_inner_product(graph, &rf, &rg).expect("shapes match by construction");
    let continuous = continuous_inner_product(f, g);
    Ok(InnerProductComparison {
        discrete,
        continuous,
        error: (discrete - continuous).norm(),
    })
}
