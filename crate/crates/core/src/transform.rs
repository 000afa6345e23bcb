//! The block-structured Fourier transform of the sampled space.
//!
//! The basis of `H_N` consists of the constant function, the restrictions
//! of every primitive eigenfunction shifted by `2 m pi` for
//! `m = 0 .. N/2 - 1`, and the Nyquist cosine. Per block the Gram matrix
//! is computed analytically through the trapezoid frequency response, and
//! an orthonormalizing matrix `B` turns raw inner products into expansion
//! coefficients via `B* B`.
//!
//! The forward transform reduces, per edge and primitive frequency, to a
//! standard radix-2 DFT of the modulated samples plus an m-independent
//! endpoint correction; the inverse runs the same reduction backwards.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::eigenbasis::{
    primitive_spectrum, shift, BasisError, EdgeWaveFunction, PrimitiveSpectrum,
};
use crate::graph::Graph;
use crate::linalg::{gram_schmidt_from_gram, CMat, LinalgError};
use crate::sampling::{trapezoid_exp, SamplingError, VertexSignal};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("N = {n} is not a power of two >= 4")]
    BadLevel { n: usize },
    #[error("basis dimension {got} does not match dim H_N = {expected}")]
    CompletenessMismatch { expected: usize, got: usize },
    #[error("shape mismatch in {what}: expected {expected}, got {got}")]
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("vector length {len} is not a power of two")]
    NotPowerOfTwo { len: usize },
    #[error("reconstructed values at vertex {vertex} disagree by {residual:e}")]
    InconsistentVertexValue { vertex: usize, residual: f64 },
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FftDirection {
    Forward,
    Inverse,
}

/// Standard radix-2 DFT, `X_m = sum_n v_n exp(-2 pi i m n / N)` for the
/// forward direction; the inverse flips the sign and scales by `1/N`.
/// In-place iterative with bit-reversal permutation.
pub fn radix2_fft(
    v: &[Complex64],
    direction: FftDirection,
) -> Result<Vec<Complex64>, TransformError> {
    if !v.len().is_power_of_two() {
        return Err(TransformError::NotPowerOfTwo { len: v.len() });
    }
    let mut buf = v.to_vec();
    fft_in_place(&mut buf, direction);
    Ok(buf)
}

fn fft_in_place(buf: &mut [Complex64], direction: FftDirection) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    if n <= 1 {
        return;
    }

    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }

    let sign = match direction {
        FftDirection::Forward => -1.0,
        FftDirection::Inverse => 1.0,
    };
    // Twiddle table exp(sign 2 pi i k / n), k < n/2, computed directly to
    // avoid drift from repeated multiplication.
    let half_n = n / 2;
    let twiddles: Vec<Complex64> = (0..half_n)
        .map(|k| Complex64::from_polar(1.0, sign * 2.0 * PI * k as f64 / n as f64))
        .collect();

    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = twiddles[k * step];
                let u = buf[start + k];
                let t = buf[start + k + half] * w;
                buf[start + k] = u + t;
                buf[start + k + half] = u - t;
            }
        }
        len <<= 1;
    }

    if direction == FftDirection::Inverse {
        let scale = 1.0 / n as f64;
        for x in buf.iter_mut() {
            *x *= scale;
        }
    }
}

/// One shifted frequency block of the sampled basis with its Gram and
/// orthonormalization matrices.
#[derive(Debug, Clone)]
pub struct ShiftBlock {
    /// Index into the primitive blocks.
    pub primitive: usize,
    /// Shift count m; the block frequency is `omega_0 + 2 m pi`.
    pub shift: usize,
    pub omega: f64,
    /// `gram[i][j] = <Phi_i, Phi_j>_N`, Hermitian positive definite.
    pub gram: CMat,
    /// Rows `b_i` with `eta_i = sum_j b_ij Phi_j` orthonormal in `H_N`.
    pub ortho: CMat,
    /// `(B* B)^T`, applied to raw inner products to recover expansion
    /// coefficients.
    pub recovery: CMat,
}

impl ShiftBlock {
    pub fn dim(&self) -> usize {
        self.gram.rows()
    }
}

/// The full block basis of `H_N` for one graph and refinement level.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    graph: Graph,
    level: usize,
    primitives: PrimitiveSpectrum,
    blocks: Vec<ShiftBlock>,
    /// The Nyquist cosine `cos(N pi x)`; its restriction has unit norm in
    /// `H_N`, so its block machinery is trivial.
    nyquist: EdgeWaveFunction,
}

impl SpectralBasis {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Refinement level N.
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn primitives(&self) -> &PrimitiveSpectrum {
        &self.primitives
    }

    pub fn blocks(&self) -> &[ShiftBlock] {
        &self.blocks
    }

    pub fn nyquist_function(&self) -> &EdgeWaveFunction {
        &self.nyquist
    }

    /// Total basis dimension: zero mode + shifted blocks + Nyquist.
    pub fn dimension(&self) -> usize {
        2 + self.blocks.iter().map(ShiftBlock::dim).sum::<usize>()
    }

    /// Materializes the j-th basis function of a shifted block.
    pub fn shifted_function(&self, block: &ShiftBlock) -> Vec<EdgeWaveFunction> {
        self.primitives.blocks[block.primitive]
            .functions
            .iter()
            .map(|f| shift(f, block.shift))
            .collect()
    }

    /// Eigenvalue of the discrete operator on the block,
    /// `mu = N^2 (1 - cos(omega / N))`.
    pub fn block_eigenvalue(&self, omega: f64) -> f64 {
        crate::spectrum::delta_n_eigenvalue(omega * omega, self.level)
    }
}

/// Builds the sampled basis: enumerates `m = 0 .. N/2 - 1` per primitive,
/// drops the `omega = N pi` shift of the `2 pi` block except its cosine
/// (the Nyquist block), computes Gram matrices analytically, and verifies
/// the completeness count against `dim H_N`.
pub fn build_basis(graph: &Graph, n: usize) -> Result<SpectralBasis, TransformError> {
    if !n.is_power_of_two() || n < 4 {
        return Err(TransformError::BadLevel { n });
    }
    let primitives = primitive_spectrum(graph)?;
    let edge_count = graph.edge_count() as f64;

    let mut blocks = Vec::new();
    for (k, primitive) in primitives.blocks.iter().enumerate() {
        let dim = primitive.dim();
        let is_two_pi = (primitive.omega - 2.0 * PI).abs() < 1e-9;

        // m-independent coefficient pair sums over edges:
        // pos[i][j] = sum_e A_i conj(B_j), neg[i][j] = sum_e B_i conj(A_j),
        // diag[i][j] = sum_e (A_i conj(A_j) + B_i conj(B_j)).
        let mut diag = CMat::zeros(dim, dim);
        let mut pos = CMat::zeros(dim, dim);
        let mut neg = CMat::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut d = Complex64::new(0.0, 0.0);
                let mut p = Complex64::new(0.0, 0.0);
                let mut q = Complex64::new(0.0, 0.0);
                for e in 0..graph.edge_count() {
                    let (ai, bi) = primitive.functions[i].coefficients()[e];
                    let (aj, bj) = primitive.functions[j].coefficients()[e];
                    d += ai * aj.conj() + bi * bj.conj();
                    p += ai * bj.conj();
                    q += bi * aj.conj();
                }
                diag.set(i, j, d);
                pos.set(i, j, p);
                neg.set(i, j, q);
            }
        }

        for m in 0..n / 2 {
            if is_two_pi && m == n / 2 - 1 {
                continue; // the Nyquist shift; only its cosine survives
            }
            let omega = primitive.omega + 2.0 * PI * m as f64;
            let t_pos = trapezoid_exp(2.0 * omega, n);
            let t_neg = trapezoid_exp(-2.0 * omega, n);
            let mut gram = CMat::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    let value = (diag.get(i, j) + pos.get(i, j) * t_pos + neg.get(i, j) * t_neg)
                        / edge_count;
                    gram.set(i, j, value);
                }
            }
            let ortho = gram_schmidt_from_gram(&gram, 1e-10)?;
            let recovery = ortho.hermitian().mul(&ortho).transpose();
            blocks.push(ShiftBlock {
                primitive: k,
                shift: m,
                omega,
                gram,
                ortho,
                recovery,
            });
        }
    }

    let nyquist = EdgeWaveFunction::new(
        n as f64 * PI,
        vec![(Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)); graph.edge_count()],
    );

    let basis = SpectralBasis {
        graph: graph.clone(),
        level: n,
        primitives,
        blocks,
        nyquist,
    };
    let expected = graph.refined_vertex_count(n);
    if basis.dimension() != expected {
        return Err(TransformError::CompletenessMismatch {
            expected,
            got: basis.dimension(),
        });
    }
    Ok(basis)
}

/// Raw transform coefficients of one shifted block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCoefficients {
    pub primitive: usize,
    pub shift: usize,
    pub omega: f64,
    /// `<f, Phi_j>_N` per basis function.
    pub raw: Vec<Complex64>,
}

/// Block-structured transform values: one complex vector per shifted
/// block, plus the zero and Nyquist coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphDft {
    pub zero: Complex64,
    pub nyquist: Complex64,
    pub blocks: Vec<BlockCoefficients>,
}

fn check_signal(basis: &SpectralBasis, f: &VertexSignal) -> Result<(), TransformError> {
    let expected = basis.graph.refined_vertex_count(basis.level);
    if f.level() != basis.level || f.values().len() != expected {
        return Err(TransformError::ShapeMismatch {
            what: "vertex signal",
            expected,
            got: f.values().len(),
        });
    }
    Ok(())
}

fn check_dft(basis: &SpectralBasis, dft: &GraphDft) -> Result<(), TransformError> {
    if dft.blocks.len() != basis.blocks.len() {
        return Err(TransformError::ShapeMismatch {
            what: "dft blocks",
            expected: basis.blocks.len(),
            got: dft.blocks.len(),
        });
    }
    for (values, block) in dft.blocks.iter().zip(&basis.blocks) {
        if values.raw.len() != block.dim() {
            return Err(TransformError::ShapeMismatch {
                what: "dft block",
                expected: block.dim(),
                got: values.raw.len(),
            });
        }
        if values.primitive != block.primitive || values.shift != block.shift {
            return Err(TransformError::ShapeMismatch {
                what: "dft block order",
                expected: block.primitive,
                got: values.primitive,
            });
        }
    }
    Ok(())
}

/// Direct degree-weighted sum `<f, 1>_N`.
fn zero_coefficient(graph: &Graph, f: &VertexSignal) -> Complex64 {
    let n = f.level();
    let mut acc = Complex64::new(0.0, 0.0);
    for (index, value) in f.values().iter().enumerate() {
        acc += graph.refined_degree(index, n) as f64 * value;
    }
    acc / graph.refined_weight(n)
}

/// Direct degree-weighted sum against the restricted Nyquist cosine,
/// whose values are +1 at original vertices and `(-1)^i` at interior
/// samples.
fn nyquist_coefficient(graph: &Graph, f: &VertexSignal) -> Complex64 {
    let n = f.level();
    let mut acc = Complex64::new(0.0, 0.0);
    for v in 0..graph.vertex_count() {
        acc += graph.degree(v) as f64 * f.values()[v];
    }
    for e in 0..graph.edge_count() {
        for i in 1..n {
            let sign = if i % 2 == 0 { 2.0 } else { -2.0 };
            acc += sign * f.values()[graph.interior_index(e, i, n)];
        }
    }
    acc / graph.refined_weight(n)
}

/// Fast forward transform: per (edge, primitive, sign) one radix-2 DFT of
/// the modulated samples plus the m-independent endpoint correction
/// `(f(1) exp(-+ i omega_0) - f(0)) / 2N` that turns the plain average
/// into the trapezoid sum.
pub fn fft_forward(f: &VertexSignal, basis: &SpectralBasis) -> Result<GraphDft, TransformError> {
    check_signal(basis, f)?;
    let graph = &basis.graph;
    let n = basis.level;
    let edge_count = graph.edge_count();
    let primitive_count = basis.primitives.blocks.len();

    // Per (primitive, edge): spectra of the two modulated sequences and
    // the endpoint corrections.
    let mut spectra_minus = vec![Vec::new(); primitive_count * edge_count];
    let mut spectra_plus = vec![Vec::new(); primitive_count * edge_count];
    let mut corr_minus = vec![Complex64::new(0.0, 0.0); primitive_count * edge_count];
    let mut corr_plus = vec![Complex64::new(0.0, 0.0); primitive_count * edge_count];

    let mut samples = vec![Complex64::new(0.0, 0.0); n];
    for (e, &(tail, head)) in graph.edges().iter().enumerate() {
        samples[0] = f.values()[tail];
        for i in 1..n {
            samples[i] = f.values()[graph.interior_index(e, i, n)];
        }
        let head_value = f.values()[head];

        for (k, primitive) in basis.primitives.blocks.iter().enumerate() {
            let omega0 = primitive.omega;
            let slot = k * edge_count + e;
            let mut minus = vec![Complex64::new(0.0, 0.0); n];
            let mut plus = vec![Complex64::new(0.0, 0.0); n];
            for (i, &s) in samples.iter().enumerate() {
                let phase = Complex64::from_polar(1.0, omega0 * i as f64 / n as f64);
                minus[i] = s / phase;
                plus[i] = s * phase;
            }
            fft_in_place(&mut minus, FftDirection::Forward);
            fft_in_place(&mut plus, FftDirection::Forward);
            let rot = Complex64::from_polar(1.0, omega0);
            corr_minus[slot] = (head_value / rot - samples[0]) / (2.0 * n as f64);
            corr_plus[slot] = (head_value * rot - samples[0]) / (2.0 * n as f64);
            spectra_minus[slot] = minus;
            spectra_plus[slot] = plus;
        }
    }

    let inv_n = 1.0 / n as f64;
    let inv_edges = 1.0 / edge_count as f64;
    let blocks = basis
        .blocks
        .iter()
        .map(|block| {
            let k = block.primitive;
            let m = block.shift;
            let dim = block.dim();
            let mirrored = (n - m) % n;
            let mut raw = vec![Complex64::new(0.0, 0.0); dim];
            for e in 0..edge_count {
                let slot = k * edge_count + e;
                let t_minus = spectra_minus[slot][m] * inv_n + corr_minus[slot];
                let t_plus = spectra_plus[slot][mirrored] * inv_n + corr_plus[slot];
                for (j, target) in raw.iter_mut().enumerate() {
                    let (a, b) = basis.primitives.blocks[k].functions[j].coefficients()[e];
                    *target += a.conj() * t_minus + b.conj() * t_plus;
                }
            }
            for value in &mut raw {
                *value *= inv_edges;
            }
            BlockCoefficients {
                primitive: k,
                shift: m,
                omega: block.omega,
                raw,
            }
        })
        .collect();

    Ok(GraphDft {
        zero: zero_coefficient(graph, f),
        nyquist: nyquist_coefficient(graph, f),
        blocks,
    })
}

/// Recovers per-block expansion coefficients `c = (B* B)^T X` from the raw
/// inner products; constant work per block. The zero and Nyquist blocks
/// are already orthonormal, so their coefficients equal the raw values.
pub fn coefficients(
    dft: &GraphDft,
    basis: &SpectralBasis,
) -> Result<Vec<Vec<Complex64>>, TransformError> {
    check_dft(basis, dft)?;
    Ok(dft
        .blocks
        .iter()
        .zip(&basis.blocks)
        .map(|(values, block)| block.recovery.mul_vec(&values.raw))
        .collect())
}

/// Fast inverse transform: recover coefficients, then per (edge,
/// primitive) inverse-DFT the zero-padded coefficient sequences and
/// modulate by `exp(+- i omega_0 n / N)`; add the zero and Nyquist
/// contributions; original-vertex values are taken from the lowest-index
/// incident edge with cross-edge agreement checked.
pub fn fft_inverse(dft: &GraphDft, basis: &SpectralBasis) -> Result<VertexSignal, TransformError> {
    check_dft(basis, dft)?;
    let graph = &basis.graph;
    let n = basis.level;
    let edge_count = graph.edge_count();
    let primitive_count = basis.primitives.blocks.len();
    let coeffs = coefficients(dft, basis)?;

    // Per (primitive, edge): coefficient sequences alpha_m (positive
    // exponential) and beta_m (negative), zero-padded to length N.
    let zero = Complex64::new(0.0, 0.0);
    let mut alpha = vec![vec![zero; n]; primitive_count * edge_count];
    let mut beta = vec![vec![zero; n]; primitive_count * edge_count];
    for (values, c) in dft.blocks.iter().zip(&coeffs) {
        let k = values.primitive;
        let m = values.shift;
        let functions = &basis.primitives.blocks[k].functions;
        for e in 0..edge_count {
            let slot = k * edge_count + e;
            let mut a_sum = zero;
            let mut b_sum = zero;
            for (j, &cj) in c.iter().enumerate() {
                let (a, b) = functions[j].coefficients()[e];
                a_sum += cj * a;
                b_sum += cj * b;
            }
            alpha[slot][m] = a_sum;
            beta[slot][m] = b_sum;
        }
    }

    // Edge-sample accumulators for n = 0..N-1 plus the head value.
    let mut edge_values = vec![vec![zero; n]; edge_count];
    let mut head_values = vec![zero; edge_count];
    for k in 0..primitive_count {
        let omega0 = basis.primitives.blocks[k].omega;
        let rot = Complex64::from_polar(1.0, omega0);
        for e in 0..edge_count {
            let slot = k * edge_count + e;
            let alpha_sum: Complex64 = alpha[slot].iter().sum();
            let beta_sum: Complex64 = beta[slot].iter().sum();
            fft_in_place(&mut alpha[slot], FftDirection::Inverse);
            fft_in_place(&mut beta[slot], FftDirection::Forward);
            let up = &alpha[slot];
            let down = &beta[slot];
            for i in 0..n {
                let phase = Complex64::from_polar(1.0, omega0 * i as f64 / n as f64);
                edge_values[e][i] += phase * up[i] * n as f64 + down[i] / phase;
            }
            head_values[e] += rot * alpha_sum + beta_sum / rot;
        }
    }

    // Zero mode and Nyquist cosine; both block Grams are the identity, so
    // the raw values are the coefficients.
    for e in 0..edge_count {
        for i in 0..n {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            edge_values[e][i] += dft.zero + sign * dft.nyquist;
        }
        head_values[e] += dft.zero + dft.nyquist;
    }

    // Assemble the canonical signal; reconstructed original-vertex values
    // must agree across incident edges.
    let len = graph.refined_vertex_count(n);
    let mut values = vec![zero; len];
    let mut assigned = vec![false; graph.vertex_count()];
    let scale = edge_values
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max)
        .max(1.0);
    for (e, &(tail, head)) in graph.edges().iter().enumerate() {
        for (vertex, candidate) in [(tail, edge_values[e][0]), (head, head_values[e])] {
            if !assigned[vertex] {
                values[vertex] = candidate;
                assigned[vertex] = true;
            } else {
                let residual = (values[vertex] - candidate).norm();
                if residual > 1e-8 * scale {
                    return Err(TransformError::InconsistentVertexValue { vertex, residual });
                }
            }
        }
        for i in 1..n {
            values[graph.interior_index(e, i, n)] = edge_values[e][i];
        }
    }
    Ok(VertexSignal::new(n, values))
}

/// Squared norm from transform data:
/// `|zero|^2 + sum_blocks |conj(B) X|^2 + |nyquist|^2`.
pub fn parseval_norm(dft: &GraphDft, basis: &SpectralBasis) -> Result<f64, TransformError> {
    check_dft(basis, dft)?;
    let mut acc = dft.zero.norm_sqr() + dft.nyquist.norm_sqr();
    for (values, block) in dft.blocks.iter().zip(&basis.blocks) {
        for i in 0..block.dim() {
            let mut a = Complex64::new(0.0, 0.0);
            for (j, &x) in values.raw.iter().enumerate() {
                a += block.ortho.get(i, j).conj() * x;
            }
            acc += a.norm_sqr();
        }
    }
    Ok(acc)
}

/// Forward transform, zero out blocks whose eigenvalue `lambda = omega^2`
/// fails the predicate, inverse transform.
pub fn spectral_filter(
    f: &VertexSignal,
    basis: &SpectralBasis,
    keep: impl Fn(f64) -> bool,
) -> Result<VertexSignal, TransformError> {
    let mut dft = fft_forward(f, basis)?;
    if !keep(0.0) {
        dft.zero = Complex64::new(0.0, 0.0);
    }
    let nyquist_lambda = (basis.level as f64 * PI).powi(2);
    if !keep(nyquist_lambda) {
        dft.nyquist = Complex64::new(0.0, 0.0);
    }
    for block in &mut dft.blocks {
        if !keep(block.omega * block.omega) {
            block
                .raw
                .iter_mut()
                .for_each(|x| *x = Complex64::new(0.0, 0.0));
        }
    }
    fft_inverse(&dft, basis)
}
