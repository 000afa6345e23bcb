//! Construction of the complete continuous-graph eigenbasis.
//!
//! Away from the squares of integer multiples of pi, eigenfunctions come
//! from lifting vertex eigenvectors through the endpoint interpolation
//! formula, once per arccos branch. At the special frequencies the lift
//! degenerates and the eigenspaces are built combinatorially instead: sine
//! waves on fundamental cycles at even multiples, flow-space sines at odd
//! multiples, and a cosine that never vanishes at vertices (for odd
//! multiples only on bipartite graphs).

use num_complex::Complex64;
use num_rational::Ratio;
use std::f64::consts::PI;
use thiserror::Error;

use crate::graph::{bipartition, spanning_tree_cycles, Graph};
use crate::linalg::{gram_schmidt_from_gram, CMat, LinalgError};
use crate::sampling::{unit_exp_integral, unit_exp_x_integral};
use crate::spectrum::{eigensolve_delta1, SpectrumError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasisError {
    #[error("mu = {mu} outside the open interval (0, 2)")]
    MuOutOfRange { mu: f64 },
    #[error("vertex vector is not an eigenvector: residual {residual:e}")]
    NotAnEigenvector { residual: f64 },
    #[error("vertex vector has {got} entries, expected {expected}")]
    VertexCountMismatch { expected: usize, got: usize },
    #[error("edge length must be positive, got {length}")]
    NonPositiveLength { length: f64 },
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Which arccos preimage of `1 - mu` in `(0, 2 pi)` a lift targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `omega = arccos(1 - mu)` in `(0, pi)`.
    Low,
    /// `omega = 2 pi - arccos(1 - mu)` in `(pi, 2 pi)`.
    High,
}

/// A Laplacian eigenfunction stored as per-edge coefficient pairs in the
/// canonical tail-to-head coordinate.
///
/// For `omega > 0` the pair `(a, b)` on an edge means
/// `f_e(x) = a exp(i omega x) + b exp(-i omega x)`. For `omega = 0` it
/// means the linear form `a + b x` (eigenfunctions use `b = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWaveFunction {
    omega: f64,
    coefficients: Vec<(Complex64, Complex64)>,
}

impl EdgeWaveFunction {
    pub fn new(omega: f64, coefficients: Vec<(Complex64, Complex64)>) -> Self {
        assert!(omega >= 0.0, "frequency must be nonnegative");
        Self {
            omega,
            coefficients,
        }
    }

    /// The constant eigenfunction at omega = 0.
    pub fn constant(graph: &Graph) -> Self {
        Self::new(
            0.0,
            vec![(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)); graph.edge_count()],
        )
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Eigenvalue `lambda = omega^2`.
    pub fn lambda(&self) -> f64 {
        self.omega * self.omega
    }

    pub fn edge_count(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[(Complex64, Complex64)] {
        &self.coefficients
    }

    /// Value at local coordinate `x` on `edge`.
    pub fn eval(&self, edge: usize, x: f64) -> Complex64 {
        let (a, b) = self.coefficients[edge];
        if self.omega == 0.0 {
            a + b * x
        } else {
            let phase = Complex64::new(0.0, self.omega * x).exp();
            a * phase + b / phase
        }
    }

    /// Derivative with respect to the local coordinate.
    pub fn eval_derivative(&self, edge: usize, x: f64) -> Complex64 {
        let (a, b) = self.coefficients[edge];
        if self.omega == 0.0 {
            b
        } else {
            let phase = Complex64::new(0.0, self.omega * x).exp();
            Complex64::new(0.0, self.omega) * (a * phase - b / phase)
        }
    }

    /// Values at the original vertices, read from the lowest-index incident
    /// edge. Continuity across the other incident edges is a construction
    /// invariant checked by the verification suite.
    pub fn vertex_values(&self, graph: &Graph) -> Vec<Complex64> {
        let mut values = vec![None; graph.vertex_count()];
        for (edge, &(tail, head)) in graph.edges().iter().enumerate() {
            if values[tail].is_none() {
                values[tail] = Some(self.eval(edge, 0.0));
            }
            if values[head].is_none() {
                values[head] = Some(self.eval(edge, 1.0));
            }
        }
        values
            .into_iter()
            .map(|v| v.expect("minimum degree 2 leaves no isolated vertex"))
            .collect()
    }

    /// Worst continuity violation over all (vertex, incident edge) pairs.
    pub fn continuity_residual(&self, graph: &Graph) -> f64 {
        let reference = self.vertex_values(graph);
        let mut worst = 0.0f64;
        for (edge, &(tail, head)) in graph.edges().iter().enumerate() {
            worst = worst.max((self.eval(edge, 0.0) - reference[tail]).norm());
            worst = worst.max((self.eval(edge, 1.0) - reference[head]).norm());
        }
        worst
    }

    /// Worst derivative-condition violation: max over vertices of
    /// `|sum of outward derivatives|`.
    pub fn kirchhoff_residual(&self, graph: &Graph) -> f64 {
        let mut sums = vec![Complex64::new(0.0, 0.0); graph.vertex_count()];
        for (edge, &(tail, head)) in graph.edges().iter().enumerate() {
            sums[tail] += self.eval_derivative(edge, 0.0);
            sums[head] -= self.eval_derivative(edge, 1.0);
        }
        sums.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    fn linear_combination(
        omega: f64,
        functions: &[EdgeWaveFunction],
        weights: &[Complex64],
    ) -> EdgeWaveFunction {
        let edges = functions[0].edge_count();
        let mut coefficients = vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); edges];
        for (f, &w) in functions.iter().zip(weights) {
            for (acc, &(a, b)) in coefficients.iter_mut().zip(&f.coefficients) {
                acc.0 += w * a;
                acc.1 += w * b;
            }
        }
        EdgeWaveFunction::new(omega, coefficients)
    }
}

/// Extends a vertex eigenvector with `T^{-1}A v = (1 - mu) v`, `mu` strictly
/// inside `(0, 2)`, to the edge eigenfunction on the chosen branch via the
/// endpoint interpolation
/// `y(0) cos(omega x) + [y(1) - y(0) cos(omega)] sin(omega x)/sin(omega)`.
pub fn lift(
    graph: &Graph,
    vertex_values: &[f64],
    mu: f64,
    branch: Branch,
) -> Result<EdgeWaveFunction, BasisError> {
    if !(mu > 0.0 && mu < 2.0) {
        return Err(BasisError::MuOutOfRange { mu });
    }
    if vertex_values.len() != graph.vertex_count() {
        return Err(BasisError::VertexCountMismatch {
            expected: graph.vertex_count(),
            got: vertex_values.len(),
        });
    }
    let scale = vertex_values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut residual = 0.0f64;
    for v in 0..graph.vertex_count() {
        let mean = graph
            .neighbors(v)
            .iter()
            .map(|&(u, _)| vertex_values[u])
            .sum::<f64>()
            / graph.degree(v) as f64;
        residual = residual.max((mean - (1.0 - mu) * vertex_values[v]).abs());
    }
    if residual > 1e-8 * scale.max(1.0) {
        return Err(BasisError::NotAnEigenvector { residual });
    }

    let base = (1.0 - mu).acos(); // in (0, pi)
    let omega = match branch {
        Branch::Low => base,
        Branch::High => 2.0 * PI - base,
    };
    let (sin_w, cos_w) = omega.sin_cos();
    let coefficients = graph
        .edges()
        .iter()
        .map(|&(tail, head)| {
            let at_tail = vertex_values[tail];
            let slope = (vertex_values[head] - at_tail * cos_w) / sin_w;
            // a cos(omega x) + b sin(omega x) in exponential form.
            let a = Complex64::new(at_tail / 2.0, -slope / 2.0);
            let b = Complex64::new(at_tail / 2.0, slope / 2.0);
            (a, b)
        })
        .collect();
    Ok(EdgeWaveFunction::new(omega, coefficients))
}

/// Frequency shift by `2 m pi`: the coefficient pairs are kept and only the
/// frequency changes, so vertex values are untouched and the vertex
/// conditions transfer.
pub fn shift(psi: &EdgeWaveFunction, m: usize) -> EdgeWaveFunction {
    assert!(psi.omega() > 0.0, "the zero mode is not shifted");
    EdgeWaveFunction::new(psi.omega() + 2.0 * PI * m as f64, psi.coefficients.clone())
}

/// Integral basis of the flow space: edge functions whose unsigned sums
/// vanish at every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowBasis {
    pub vectors: Vec<Vec<i64>>,
}

impl FlowBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// Nullspace of the unsigned vertex-edge incidence matrix over the
/// rationals, denominator-cleared and content-reduced to a canonical
/// integral basis. Elimination pivots in ascending row/column order, so the
/// result is deterministic; each vector's first nonzero entry is positive.
pub fn flow_space(graph: &Graph) -> FlowBasis {
    type Q = Ratio<i128>;
    let rows = graph.vertex_count();
    let cols = graph.edge_count();
    let mut m: Vec<Vec<Q>> = vec![vec![Q::from_integer(0); cols]; rows];
    for (edge, &(tail, head)) in graph.edges().iter().enumerate() {
        m[tail][edge] = Q::from_integer(1);
        m[head][edge] = Q::from_integer(1);
    }

    // Reduced row echelon form with ascending pivot order.
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut next_row = 0;
    for col in 0..cols {
        let Some(pivot_row) = (next_row..rows).find(|&r| m[r][col] != Q::from_integer(0)) else {
            continue;
        };
        m.swap(next_row, pivot_row);
        let inv = m[next_row][col].recip();
        for entry in &mut m[next_row] {
            *entry *= inv;
        }
        for r in 0..rows {
            if r != next_row && m[r][col] != Q::from_integer(0) {
                let factor = m[r][col];
                for c in 0..cols {
                    let sub = factor * m[next_row][c];
                    m[r][c] -= sub;
                }
            }
        }
        pivot_of_col[col] = Some(next_row);
        next_row += 1;
        if next_row == rows {
            break;
        }
    }

    let mut vectors: Vec<Vec<i64>> = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut solution = vec![Q::from_integer(0); cols];
        solution[free] = Q::from_integer(1);
        for col in 0..cols {
            if let Some(row) = pivot_of_col[col] {
                solution[col] = -m[row][free];
            }
        }
        // Clear denominators, reduce by content, normalize the sign.
        let lcm = solution
            .iter()
            .map(|q| *q.denom())
            .fold(1i128, num_integer_lcm);
        let mut ints: Vec<i128> = solution
            .iter()
            .map(|q| q.numer() * (lcm / q.denom()))
            .collect();
        let content = ints
            .iter()
            .map(|v| v.unsigned_abs())
            .fold(0u128, num_integer_gcd_u128);
        if content > 1 {
            for v in &mut ints {
                *v /= content as i128;
            }
        }
        if let Some(first) = ints.iter().find(|v| **v != 0) {
            if *first < 0 {
                for v in &mut ints {
                    *v = -*v;
                }
            }
        }
        vectors.push(
            ints.into_iter()
                .map(|v| i64::try_from(v).expect("flow basis entry fits in i64"))
                .collect(),
        );
    }

    // The defining constraints hold exactly in integer arithmetic.
    for vector in &vectors {
        for v in 0..rows {
            let sum: i64 = graph
                .neighbors(v)
                .iter()
                .map(|&(_, edge)| vector[edge])
                .sum();
            assert_eq!(sum, 0, "flow constraint violated at vertex {v}");
        }
    }
    FlowBasis { vectors }
}

fn num_integer_gcd_u128(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        num_integer_gcd_u128(b, a % b)
    }
}

fn num_integer_lcm(a: i128, b: i128) -> i128 {
    let g = num_integer_gcd_u128(a.unsigned_abs(), b.unsigned_abs()) as i128;
    (a / g) * b
}

fn sine_pair(amplitude: f64) -> (Complex64, Complex64) {
    // amplitude * sin(omega x) in exponential form.
    (
        Complex64::new(0.0, -amplitude / 2.0),
        Complex64::new(0.0, amplitude / 2.0),
    )
}

/// Vertex-vanishing eigenfunctions at `omega = 2 n pi`, one per fundamental
/// cycle: `sin(2 n pi x)` along the cycle, signed by the traversal
/// direction against the canonical orientation.
pub fn cycle_eigenspace(graph: &Graph, n: usize) -> Vec<EdgeWaveFunction> {
    assert!(n >= 1);
    let omega = 2.0 * PI * n as f64;
    spanning_tree_cycles(graph)
        .cycles
        .iter()
        .map(|cycle| {
            let coefficients = cycle
                .signed_incidence
                .iter()
                .map(|&sign| sine_pair(sign as f64))
                .collect();
            EdgeWaveFunction::new(omega, coefficients)
        })
        .collect()
}

/// Vertex-vanishing eigenfunctions at `omega = (2n - 1) pi`, one per flow
/// basis vector: `f(e) sin((2n-1) pi x)` on each edge. Orientation-free
/// because `sin((2n-1) pi (1-x)) = sin((2n-1) pi x)`.
pub fn odd_eigenspace(graph: &Graph, n: usize) -> Vec<EdgeWaveFunction> {
    assert!(n >= 1);
    let omega = (2 * n - 1) as f64 * PI;
    flow_space(graph)
        .vectors
        .iter()
        .map(|flow| {
            let coefficients = flow.iter().map(|&f| sine_pair(f as f64)).collect();
            EdgeWaveFunction::new(omega, coefficients)
        })
        .collect()
}

/// The eigenfunction at `omega = n pi` that vanishes at no vertex:
/// `cos(n pi x)` on every edge for even `n`; for odd `n` it exists exactly
/// when the graph is bipartite, with the sign flipped on edges whose tail
/// is in class 1 (vertex values are +1 on class 0 and -1 on class 1).
pub fn cosine_eigenfunction(graph: &Graph, n: usize) -> Option<EdgeWaveFunction> {
    assert!(n >= 1);
    let omega = n as f64 * PI;
    let cosine = |sign: f64| {
        (
            Complex64::new(sign / 2.0, 0.0),
            Complex64::new(sign / 2.0, 0.0),
        )
    };
    if n.is_multiple_of(2) {
        return Some(EdgeWaveFunction::new(
            omega,
            vec![cosine(1.0); graph.edge_count()],
        ));
    }
    let classes = bipartition(graph)?.classes;
    let coefficients = graph
        .edges()
        .iter()
        .map(|&(tail, _)| cosine(if classes[tail] == 0 { 1.0 } else { -1.0 }))
        .collect();
    Some(EdgeWaveFunction::new(omega, coefficients))
}

/// Analytic inner product `(1/N_E) integral over the graph of f conj(g)`,
/// evaluated in closed form from the coefficients.
pub fn continuous_inner_product(f: &EdgeWaveFunction, g: &EdgeWaveFunction) -> Complex64 {
    assert_eq!(
        f.edge_count(),
        g.edge_count(),
        "functions on the same graph"
    );
    let edges = f.edge_count();
    let mut acc = Complex64::new(0.0, 0.0);
    for edge in 0..edges {
        acc += edge_product_integral(f, g, edge);
    }
    acc / edges as f64
}

/// Per-edge integral of `f_e conj(g_e)` over [0, 1], covering the wave and
/// linear-form branches.
fn edge_product_integral(f: &EdgeWaveFunction, g: &EdgeWaveFunction, edge: usize) -> Complex64 {
    let (fa, fb) = f.coefficients[edge];
    let (ga, gb) = g.coefficients[edge];
    match (f.omega == 0.0, g.omega == 0.0) {
        (false, false) => {
            let (wf, wg) = (f.omega, g.omega);
            fa * ga.conj() * unit_exp_integral(wf - wg)
                + fa * gb.conj() * unit_exp_integral(wf + wg)
                + fb * ga.conj() * unit_exp_integral(-wf - wg)
                + fb * gb.conj() * unit_exp_integral(-wf + wg)
        }
        (true, false) => {
            // (fa + fb x) conj(ga e^{i wg x} + gb e^{-i wg x})
            fa * ga.conj() * unit_exp_integral(-g.omega)
                + fb * ga.conj() * unit_exp_x_integral(-g.omega)
                + fa * gb.conj() * unit_exp_integral(g.omega)
                + fb * gb.conj() * unit_exp_x_integral(g.omega)
        }
        (false, true) => edge_product_integral(g, f, edge).conj(),
        (true, true) => {
            // (fa + fb x)(conj(ga) + conj(gb) x)
            fa * ga.conj() + (fa * gb.conj() + fb * ga.conj()) / 2.0 + fb * gb.conj() / 3.0
        }
    }
}

/// Rescales to edge length `L`: the eigenvalue becomes `lambda / L^2`,
/// vertex values are unchanged and derivatives scale by `1/L`.
pub fn rescale(f: &EdgeWaveFunction, length: f64) -> Result<(EdgeWaveFunction, f64), BasisError> {
    if length.is_nan() || length <= 0.0 {
        return Err(BasisError::NonPositiveLength { length });
    }
    let scaled = if f.omega == 0.0 {
        EdgeWaveFunction::new(
            0.0,
            f.coefficients
                .iter()
                .map(|&(a, b)| (a, b / length))
                .collect(),
        )
    } else {
        EdgeWaveFunction::new(f.omega / length, f.coefficients.clone())
    };
    let lambda = scaled.lambda();
    Ok((scaled, lambda))
}

/// Provenance of a primitive frequency block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockOrigin {
    /// Lifted from the discrete eigenvalue `mu` on the given branch.
    Lifted { mu: f64, branch: Branch },
    /// Flow-space sines plus the bipartite cosine at `omega = pi`.
    FlowAndCosine,
    /// Cycle sines plus the even cosine at `omega = 2 pi`.
    CycleAndCosine,
}

/// One primitive frequency with its orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveBlock {
    pub omega: f64,
    pub origin: BlockOrigin,
    /// Basis of the eigenspace, orthonormal in the continuous inner product.
    pub functions: Vec<EdgeWaveFunction>,
}

impl PrimitiveBlock {
    pub fn dim(&self) -> usize {
        self.functions.len()
    }
}

/// All primitive frequencies in `(0, 2 pi]` with orthonormal bases, plus
/// the constant zero mode.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveSpectrum {
    pub zero_mode: EdgeWaveFunction,
    /// Frequency blocks in ascending omega; the last has omega = 2 pi.
    pub blocks: Vec<PrimitiveBlock>,
}

impl PrimitiveSpectrum {
    /// Total eigenfunction count over the positive primitive frequencies;
    /// equals `2 N_E` on every valid graph.
    pub fn positive_dim_total(&self) -> usize {
        self.blocks.iter().map(PrimitiveBlock::dim).sum()
    }
}

/// Assembles every primitive frequency: both arccos branches of each
/// discrete eigenvalue strictly inside (0, 2), the flow/cosine block at pi
/// when nonempty, and the cycle/cosine block at 2 pi. Each block is
/// orthonormalized in the continuous inner product by modified
/// Gram-Schmidt with reorthogonalization, in construction order.
pub fn primitive_spectrum(graph: &Graph) -> Result<PrimitiveSpectrum, BasisError> {
    let spectrum = eigensolve_delta1(graph)?;
    let mut blocks: Vec<PrimitiveBlock> = Vec::new();

    for cluster in &spectrum.clusters {
        if cluster.value <= 1e-8 || cluster.value >= 2.0 - 1e-8 {
            continue;
        }
        for branch in [Branch::Low, Branch::High] {
            let functions = cluster
                .vectors
                .iter()
                .map(|v| lift(graph, v, cluster.value, branch))
                .collect::<Result<Vec<_>, _>>()?;
            blocks.push(PrimitiveBlock {
                omega: functions[0].omega(),
                origin: BlockOrigin::Lifted {
                    mu: cluster.value,
                    branch,
                },
                functions,
            });
        }
    }

    let mut pi_functions = odd_eigenspace(graph, 1);
    if let Some(cosine) = cosine_eigenfunction(graph, 1) {
        pi_functions.push(cosine);
    }
    if !pi_functions.is_empty() {
        blocks.push(PrimitiveBlock {
            omega: PI,
            origin: BlockOrigin::FlowAndCosine,
            functions: pi_functions,
        });
    }

    let mut two_pi_functions = cycle_eigenspace(graph, 1);
    two_pi_functions.push(cosine_eigenfunction(graph, 2).expect("even cosine always exists"));
    blocks.push(PrimitiveBlock {
        omega: 2.0 * PI,
        origin: BlockOrigin::CycleAndCosine,
        functions: two_pi_functions,
    });

    blocks.sort_by(|x, y| x.omega.total_cmp(&y.omega));

    for block in &mut blocks {
        block.functions = orthonormalize_block(&block.functions)?;
    }

    Ok(PrimitiveSpectrum {
        zero_mode: EdgeWaveFunction::constant(graph),
        blocks,
    })
}

/// Orthonormalizes same-frequency functions under the continuous inner
/// product, keeping the construction order.
fn orthonormalize_block(
    functions: &[EdgeWaveFunction],
) -> Result<Vec<EdgeWaveFunction>, BasisError> {
    let d = functions.len();
    let mut gram = CMat::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let ip = continuous_inner_product(&functions[i], &functions[j]);
            gram.set(i, j, ip);
            if i != j {
                gram.set(j, i, ip.conj());
            }
        }
    }
    let b = gram_schmidt_from_gram(&gram, 1e-10)?;
    let omega = functions[0].omega();
    Ok((0..d)
        .map(|i| EdgeWaveFunction::linear_combination(omega, functions, b.row(i)))
        .collect())
}
