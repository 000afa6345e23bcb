//! Brute-force reference implementations for every fast path: literal
//! summations in fixed left-to-right order, no algebraic shortcuts. Slow
//! by design; the acceptance suite runs them against the fast routines.

use num_complex::Complex64;

use crate::eigenbasis::EdgeWaveFunction;
use crate::sampling::{restrict, VertexSignal};
use crate::transform::{BlockCoefficients, GraphDft, SpectralBasis, TransformError};

/// Every transform coefficient by the direct degree-weighted sum over all
/// vertices of `G_N`; quadratic in the total dimension.
pub fn naive_forward(f: &VertexSignal, basis: &SpectralBasis) -> Result<GraphDft, TransformError> {
    let graph = basis.graph();
    let n = basis.level();
    let expected = graph.refined_vertex_count(n);
    if f.level() != n || f.values().len() != expected {
        return Err(TransformError::ShapeMismatch {
            what: "vertex signal",
            expected,
            got: f.values().len(),
        });
    }

    let weighted_sum = |phi: &VertexSignal| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (index, (fv, pv)) in f.values().iter().zip(phi.values()).enumerate() {
            acc += graph.refined_degree(index, n) as f64 * fv * pv.conj();
        }
        acc / graph.refined_weight(n)
    };

    let zero = weighted_sum(&restrict(graph, &EdgeWaveFunction::constant(graph), n));
    let nyquist = weighted_sum(&restrict(graph, basis.nyquist_function(), n));
    let blocks = basis
        .blocks()
        .iter()
        .map(|block| {
            let raw = basis
                .shifted_function(block)
                .iter()
                .map(|psi| weighted_sum(&restrict(graph, psi, n)))
                .collect();
            BlockCoefficients {
                primitive: block.primitive,
                shift: block.shift,
                omega: block.omega,
                raw,
            }
        })
        .collect();
    Ok(GraphDft {
        zero,
        nyquist,
        blocks,
    })
}

/// Direct triple sum `f(x) = sum_blocks sum_j c_j Phi_j(x)` over blocks,
/// basis functions, and sample points.
pub fn naive_inverse(
    dft: &GraphDft,
    basis: &SpectralBasis,
) -> Result<VertexSignal, TransformError> {
    let graph = basis.graph();
    let n = basis.level();
    let coefficients = crate::transform::coefficients(dft, basis)?;

    let mut out = VertexSignal::zeros(graph, n);
    let add_scaled = |out: &mut VertexSignal, phi: &VertexSignal, c: Complex64| {
        for (o, p) in out.values_mut().iter_mut().zip(phi.values()) {
            *o += c * p;
        }
    };

    add_scaled(
        &mut out,
        &restrict(graph, &EdgeWaveFunction::constant(graph), n),
        dft.zero,
    );
    add_scaled(
        &mut out,
        &restrict(graph, basis.nyquist_function(), n),
        dft.nyquist,
    );
    for (block, c) in basis.blocks().iter().zip(&coefficients) {
        for (psi, &cj) in basis.shifted_function(block).iter().zip(c) {
            add_scaled(&mut out, &restrict(graph, psi, n), cj);
        }
    }
    Ok(out)
}

/// Continuous inner product by composite Simpson quadrature with
/// `points_per_edge` subintervals (even, at least 100); accuracy is fourth
/// order in the spacing.
pub fn quadrature_inner_product(
    f: &EdgeWaveFunction,
    g: &EdgeWaveFunction,
    points_per_edge: usize,
) -> Complex64 {
    assert!(points_per_edge >= 100 && points_per_edge.is_multiple_of(2));
    assert_eq!(f.edge_count(), g.edge_count());
    let edges = f.edge_count();
    let h = 1.0 / points_per_edge as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for edge in 0..edges {
        let sample = |i: usize| {
            let x = i as f64 * h;
            f.eval(edge, x) * g.eval(edge, x).conj()
        };
        let mut acc = sample(0) + sample(points_per_edge);
        for i in 1..points_per_edge {
            let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += weight * sample(i);
        }
        total += acc * h / 3.0;
    }
    total / edges as f64
}

/// Literal double-sum DFT, any length; the reference for the radix-2 path.
pub fn direct_dft(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    (0..n)
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &x) in v.iter().enumerate() {
                let angle = -2.0 * std::f64::consts::PI * (m * i) as f64 / n as f64;
                acc += x * Complex64::from_polar(1.0, angle);
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenbasis::{continuous_inner_product, primitive_spectrum};
    use crate::families;
    use crate::transform::{build_basis, fft_forward, radix2_fft, FftDirection};
    use crate::util::SplitMix64;
    use std::f64::consts::PI;

    #[test]
    fn direct_dft_known_vectors() {
        let mut impulse = vec![Complex64::new(0.0, 0.0); 5];
        impulse[0] = Complex64::new(1.0, 0.0);
        for x in direct_dft(&impulse) {
            assert!((x - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        let ones = vec![Complex64::new(1.0, 0.0); 6];
        let spectrum = direct_dft(&ones);
        assert!((spectrum[0] - Complex64::new(6.0, 0.0)).norm() < 1e-12);
        for x in &spectrum[1..] {
            assert!(x.norm() < 1e-12);
        }
    }

    #[test]
    fn direct_dft_matches_radix2() {
        let mut rng = SplitMix64::new(77);
        let v: Vec<Complex64> = (0..16).map(|_| rng.next_complex()).collect();
        let fast = radix2_fft(&v, FftDirection::Forward).unwrap();
        let slow = direct_dft(&v);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn quadrature_examples() {
        let graph = families::cycle(4).unwrap();
        let one = EdgeWaveFunction::constant(&graph);
        let q = quadrature_inner_product(&one, &one, 100);
        assert!((q - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        // cos(N pi x) self-product integrates to 1/2.
        let cos_n = EdgeWaveFunction::new(
            8.0 * PI,
            vec![(Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)); 4],
        );
        let q = quadrature_inner_product(&cos_n, &cos_n, 10_000);
        assert!((q - Complex64::new(0.5, 0.0)).norm() < 1e-8);

        // Random waves against the analytic route.
        let spectrum = primitive_spectrum(&graph).unwrap();
        for block in &spectrum.blocks {
            for f in &block.functions {
                for g in &block.functions {
                    let analytic = continuous_inner_product(f, g);
                    let numeric = quadrature_inner_product(f, g, 10_000);
                    assert!((analytic - numeric).norm() < 1e-8);
                }
            }
        }

        // Random coefficient pair at omega = pi/2, no vertex conditions.
        let mut rng = SplitMix64::new(13);
        let coeffs: Vec<(Complex64, Complex64)> = (0..4)
            .map(|_| (rng.next_complex(), rng.next_complex()))
            .collect();
        let wave = EdgeWaveFunction::new(PI / 2.0, coeffs);
        let analytic = continuous_inner_product(&wave, &wave);
        let numeric = quadrature_inner_product(&wave, &wave, 10_000);
        assert!((analytic - numeric).norm() < 1e-10);
    }

    #[test]
    fn naive_forward_agrees_on_zero_block() {
        let graph = families::cycle(4).unwrap();
        let basis = build_basis(&graph, 8).unwrap();
        let len = graph.refined_vertex_count(8);
        let f = VertexSignal::new(8, vec![Complex64::new(2.0, -1.0); len]);
        let slow = naive_forward(&f, &basis).unwrap();
        let fast = fft_forward(&f, &basis).unwrap();
        assert!((slow.zero - fast.zero).norm() < 1e-12);
        assert!((slow.zero - Complex64::new(2.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn naive_round_trip() {
        let graph = families::cycle(3).unwrap();
        let basis = build_basis(&graph, 8).unwrap();
        let mut rng = SplitMix64::new(5);
        let f = VertexSignal::new(
            8,
            (0..graph.refined_vertex_count(8))
                .map(|_| rng.next_complex())
                .collect(),
        );
        let back = naive_inverse(&naive_forward(&f, &basis).unwrap(), &basis).unwrap();
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn radix2_matches_direct_dft(
                raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=64),
                log_len in 0u32..=6,
            ) {
                let len = 1usize << log_len;
                let v: Vec<Complex64> = (0..len)
                    .map(|i| {
                        let (re, im) = raw[i % raw.len()];
                        Complex64::new(re, im)
                    })
                    .collect();
                let fast = radix2_fft(&v, FftDirection::Forward).unwrap();
                let slow = direct_dft(&v);
                for (a, b) in fast.iter().zip(&slow) {
                    prop_assert!((a - b).norm() < 1e-11);
                }
            }
        }
    }
}
