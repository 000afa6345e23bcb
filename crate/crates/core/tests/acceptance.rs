//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured quantity once it holds. Run with
//! `cargo test -p mgfft --test acceptance -- --nocapture` to see the
//! measurements.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use mgfft::eigenbasis::BlockOrigin;
use mgfft::oracle::{naive_forward, naive_inverse};
use mgfft::transform::{build_basis, fft_forward, fft_inverse, parseval_norm, GraphDft};
use mgfft::util::SplitMix64;
use mgfft::{
    eigensolve_delta1, families, flow_space, inner_product_error, primitive_spectrum,
    vertex_inner_product, EdgeWaveFunction, Graph, VertexSignal,
};

fn reference_graphs() -> Vec<Graph> {
    vec![
        families::cycle(3).unwrap(),
        families::cycle(4).unwrap(),
        families::bowtie(),
        families::complete_bipartite(4).unwrap(),
    ]
}

fn random_signal(graph: &Graph, n: usize, rng: &mut SplitMix64) -> VertexSignal {
    VertexSignal::new(
        n,
        (0..graph.refined_vertex_count(n))
            .map(|_| rng.next_complex())
            .collect(),
    )
}

fn max_component_diff(a: &GraphDft, b: &GraphDft) -> f64 {
    let mut worst = (a.zero - b.zero).norm().max((a.nyquist - b.nyquist).norm());
    for (x, y) in a.blocks.iter().zip(&b.blocks) {
        for (u, v) in x.raw.iter().zip(&y.raw) {
            worst = worst.max((u - v).norm());
        }
    }
    worst
}

#[test]
fn criterion_01_k42_discrete_spectrum() {
    let start = Instant::now();
    let graph = families::complete_bipartite(4).unwrap();
    let spectrum = eigensolve_delta1(&graph).unwrap();
    let expected = [(0.0, 1usize), (1.0, 4), (2.0, 1)];
    assert_eq!(spectrum.clusters.len(), expected.len());
    let mut worst = 0.0f64;
    for (cluster, &(mu, mult)) in spectrum.clusters.iter().zip(&expected) {
        worst = worst.max((cluster.value - mu).abs());
        assert!(
            (cluster.value - mu).abs() <= 1e-10,
            "mu {} vs {}",
            cluster.value,
            mu
        );
        assert_eq!(cluster.vectors.len(), mult);
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "PASS criterion 01: K(4,2) mu = {{0x1, 1x4, 2x1}}, worst |mu - exact| = {worst:.3e}, {elapsed:?}"
    );
}

#[test]
fn criterion_02_k42_primitive_table() {
    let graph = families::complete_bipartite(4).unwrap();
    let primitives = primitive_spectrum(&graph).unwrap();
    let expected = [
        (PI / 2.0, 4usize),
        (PI, 4),
        (3.0 * PI / 2.0, 4),
        (2.0 * PI, 4),
    ];
    assert_eq!(primitives.blocks.len(), expected.len());
    for (block, &(omega, dim)) in primitives.blocks.iter().zip(&expected) {
        assert!((block.omega - omega).abs() < 1e-12);
        assert_eq!(block.dim(), dim);
    }
    assert_eq!(primitives.positive_dim_total(), 16);
    println!(
        "PASS criterion 02: K(4,2) primitives {{pi/2, pi, 3pi/2, 2pi}} with dims {{4,4,4,4}}, total 16"
    );
}

#[test]
fn criterion_03_bowtie_flow_space() {
    let graph = families::bowtie();
    let basis = flow_space(&graph);
    assert_eq!(basis.dim(), 1);
    // Edge order: two far triangle edges, four edges adjacent to the
    // bridge, and the middle bridge edge (2,3) itself.
    assert_eq!(basis.vectors[0], vec![1, -1, -1, 2, -1, -1, 1]);
    println!(
        "PASS criterion 03: bowtie flow space dim 1, basis {:?}",
        basis.vectors[0]
    );
}

#[test]
fn criterion_04_vertex_relation_for_lifts() {
    let mut worst = 0.0f64;
    for graph in reference_graphs() {
        let primitives = primitive_spectrum(&graph).unwrap();
        for block in &primitives.blocks {
            if !matches!(block.origin, BlockOrigin::Lifted { .. }) {
                continue;
            }
            let cos_w = block.omega.cos();
            for psi in &block.functions {
                let values = psi.vertex_values(&graph);
                for v in 0..graph.vertex_count() {
                    let mean = graph
                        .neighbors(v)
                        .iter()
                        .map(|&(u, _)| values[u])
                        .sum::<Complex64>()
                        / graph.degree(v) as f64;
                    worst = worst.max((cos_w * values[v] - mean).norm());
                }
            }
        }
    }
    assert!(worst <= 1e-9, "worst residual {worst:e}");
    println!("PASS criterion 04: vertex relation residual {worst:.3e} <= 1e-9 on all lifts");
}

#[test]
fn criterion_05_exact_sampling_identities() {
    let n = 8;
    let mut worst_exact = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for graph in reference_graphs() {
        let primitives = primitive_spectrum(&graph).unwrap();
        for block in &primitives.blocks {
            let multiple = block.omega / PI;
            if (multiple - multiple.round()).abs() > 1e-9 {
                continue;
            }
            for f in &block.functions {
                for g in &block.functions {
                    let cmp = inner_product_error(&graph, f, g, n).unwrap();
                    worst_exact = worst_exact.max(cmp.error);
                }
            }
        }
        // Nyquist cosine: discrete exactly twice continuous.
        let cos_n = EdgeWaveFunction::new(
            n as f64 * PI,
            vec![(Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)); graph.edge_count()],
        );
        let cmp = inner_product_error(&graph, &cos_n, &cos_n, n).unwrap();
        worst_ratio = worst_ratio.max((cmp.discrete - 2.0 * cmp.continuous).norm());
    }
    assert!(worst_exact <= 1e-10, "integer-block error {worst_exact:e}");
    assert!(worst_ratio <= 1e-10, "nyquist ratio error {worst_ratio:e}");
    println!(
        "PASS criterion 05: integer-block |discrete - continuous| {worst_exact:.3e}, nyquist 2x residual {worst_ratio:.3e}"
    );
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let len = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (len * sxy - sx * sy) / (len * sxx - sx * sx)
}

/// Stated criterion: the discrete-vs-continuous error of the K(4,2)
/// pi/2-block self inner product should decay at fourth order in N.
///
/// This test fails, and the failure is substantive: for f, g in one
/// eigenspace the sampled defect is proportional to
/// `sum_e [(f conj g)'(1) - (f conj g)'(0)]`, which the vertex conditions
/// force to zero exactly, so the measured errors sit at machine precision
/// for every N (here ~1e-16) and no decay rate exists. The companion test
/// below demonstrates the genuine fourth-order rate of the corrected
/// trapezoid residual on raw exponentials, where the constant is nonzero.
#[test]
fn criterion_06_trapezoid_error_rate() {
    let start = Instant::now();
    let graph = families::complete_bipartite(4).unwrap();
    let primitives = primitive_spectrum(&graph).unwrap();
    let block = &primitives.blocks[0];
    assert!((block.omega - PI / 2.0).abs() < 1e-12);
    let psi = &block.functions[0];

    let levels = [8usize, 16, 32, 64, 128];
    let mut points = Vec::new();
    let mut errors = Vec::new();
    for &n in &levels {
        let cmp = inner_product_error(&graph, psi, psi, n).unwrap();
        errors.push(cmp.error);
        points.push((f64::ln(n as f64), f64::ln(cmp.error.max(f64::MIN_POSITIVE))));
    }
    let slope = least_squares_slope(&points);
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    assert!(
        (slope + 4.0).abs() <= 0.3,
        "slope {slope:.3} outside -4 +- 0.3; measured errors {errors:?} are at machine \
         precision at every N because the same-eigenspace sampling defect is exactly zero \
         (it is a multiple of the edge sum of (f conj g)' endpoint differences, which the \
         vertex conditions annihilate), so no decay rate is measurable"
    );
    println!("PASS criterion 06: error slope {slope:.4} in -4 +- 0.3, {elapsed:?}");
}

/// Companion measurement for the fourth-order claim: on a bare exponential
/// (no vertex conditions in play) the trapezoid error after the
/// endpoint-derivative correction is `M_1(omega/2N) integral`, which does
/// decay at fourth order with a nonzero constant.
#[test]
fn trapezoid_corrected_rate_reference() {
    let omega = PI / 2.0;
    let exact = (Complex64::new(0.0, omega).exp() - 1.0) / Complex64::new(0.0, omega);
    let mut points = Vec::new();
    for n in [8usize, 16, 32, 64, 128] {
        let samples: Vec<Complex64> = (0..=n)
            .map(|i| Complex64::new(0.0, omega * i as f64 / n as f64).exp())
            .collect();
        let discrete = mgfft::trapezoid(&samples).unwrap();
        let derivative_correction = Complex64::new(0.0, omega)
            * (Complex64::new(0.0, omega).exp() - 1.0)
            / (12.0 * (n * n) as f64);
        let residual = (exact - discrete + derivative_correction).norm();
        assert!(residual > 1e-13, "no signal at N = {n}");
        points.push((f64::ln(n as f64), f64::ln(residual)));
    }
    let slope = least_squares_slope(&points);
    assert!((slope + 4.0).abs() <= 0.3, "slope {slope:.3}");
    println!("INFO corrected trapezoid residual slope {slope:.4} in -4 +- 0.3");
}

#[test]
fn criterion_07_completeness() {
    for graph in reference_graphs() {
        for n in [4usize, 8, 16, 32] {
            let basis = build_basis(&graph, n).unwrap();
            assert_eq!(
                basis.dimension(),
                graph.refined_vertex_count(n),
                "{} at N = {n}",
                graph.name()
            );
        }
    }
    println!(
        "PASS criterion 07: basis dimension = N_V + (N-1) N_E on all graphs, N in {{4,8,16,32}}"
    );
}

#[test]
fn criterion_08_oracle_equivalence() {
    let mut rng = SplitMix64::new(0xacce97);
    let mut worst_forward = 0.0f64;
    let mut worst_inverse = 0.0f64;
    for graph in reference_graphs() {
        for n in [8usize, 16, 32] {
            let basis = build_basis(&graph, n).unwrap();
            let f = random_signal(&graph, n, &mut rng);
            let fast = fft_forward(&f, &basis).unwrap();
            let slow = naive_forward(&f, &basis).unwrap();
            worst_forward = worst_forward.max(max_component_diff(&fast, &slow));

            let fast_inv = fft_inverse(&fast, &basis).unwrap();
            let slow_inv = naive_inverse(&fast, &basis).unwrap();
            let diff = fast_inv
                .values()
                .iter()
                .zip(slow_inv.values())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            worst_inverse = worst_inverse.max(diff);
        }
    }
    assert!(worst_forward <= 1e-9, "forward diff {worst_forward:e}");
    assert!(worst_inverse <= 1e-9, "inverse diff {worst_inverse:e}");
    println!(
        "PASS criterion 08: fast vs naive, forward {worst_forward:.3e}, inverse {worst_inverse:.3e}"
    );
}

#[test]
fn criterion_09_round_trip_and_parseval() {
    let n = 64;
    let mut rng = SplitMix64::new(0x70a6);
    let mut worst_rt = 0.0f64;
    let mut worst_parseval = 0.0f64;
    for graph in reference_graphs() {
        let basis = build_basis(&graph, n).unwrap();
        for _ in 0..20 {
            let f = random_signal(&graph, n, &mut rng);
            let dft = fft_forward(&f, &basis).unwrap();
            let back = fft_inverse(&dft, &basis).unwrap();
            let norm = f.norm_sq(&graph).sqrt();
            let diff: f64 = back
                .values()
                .iter()
                .zip(f.values())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            // The difference in the weighted norm is bounded by the plain
            // l2 difference since all weights are at most W.
            worst_rt = worst_rt.max(diff / norm);
            assert!(diff <= 1e-8 * norm, "{}: {diff:e}", graph.name());

            let p = parseval_norm(&dft, &basis).unwrap();
            let direct = vertex_inner_product(&graph, &f, &f).unwrap().re;
            worst_parseval = worst_parseval.max((p - direct).abs());
            assert!((p - direct).abs() <= 1e-8);
        }
    }
    println!(
        "PASS criterion 09: round trip {worst_rt:.3e} <= 1e-8 relative, parseval {worst_parseval:.3e} <= 1e-8"
    );
}

#[test]
fn criterion_10_eigen_relation() {
    let n = 32;
    let mut rng = SplitMix64::new(0xe16e);
    let mut worst = 0.0f64;
    for graph in reference_graphs() {
        let basis = build_basis(&graph, n).unwrap();
        let f = random_signal(&graph, n, &mut rng);
        let transformed = fft_forward(&f, &basis).unwrap();
        let lap = mgfft::apply_delta_n(&graph, &f).unwrap();
        let transformed_lap = fft_forward(&lap, &basis).unwrap();

        let mut err_sq = transformed_lap.zero.norm_sqr(); // mu = 0 block
        let mut norm_sq = transformed.zero.norm_sqr() + transformed.nyquist.norm_sqr();
        let mu_nyq = basis.block_eigenvalue(n as f64 * PI);
        err_sq += (transformed_lap.nyquist - mu_nyq * transformed.nyquist).norm_sqr();
        for (lb, fb) in transformed_lap.blocks.iter().zip(&transformed.blocks) {
            let mu = basis.block_eigenvalue(fb.omega);
            for (lx, x) in lb.raw.iter().zip(&fb.raw) {
                err_sq += (lx - mu * x).norm_sqr();
                norm_sq += x.norm_sqr();
            }
        }
        let rel = err_sq.sqrt() / norm_sq.sqrt();
        worst = worst.max(rel);
        assert!(rel <= 1e-8, "{}: {rel:e}", graph.name());
    }
    println!("PASS criterion 10: ||F(Delta_N f) - mu F(f)|| / ||F(f)|| = {worst:.3e} <= 1e-8");
}

#[test]
fn criterion_11_complexity() {
    let graph = families::complete_bipartite(4).unwrap();
    let mut rng = SplitMix64::new(0xbe9c);

    let time_at = |n: usize, rng: &mut SplitMix64| -> Duration {
        let basis = build_basis(&graph, n).unwrap();
        let f = random_signal(&graph, n, rng);
        // Warm up once, then take the fastest of three runs.
        let mut best = Duration::MAX;
        for round in 0..4 {
            let start = Instant::now();
            let dft = fft_forward(&f, &basis).unwrap();
            let back = fft_inverse(&dft, &basis).unwrap();
            let elapsed = start.elapsed();
            assert!(back.values().len() == f.values().len());
            if round > 0 {
                best = best.min(elapsed);
            }
        }
        best
    };

    let levels = [1usize << 10, 1 << 11, 1 << 12, 1 << 13, 1 << 14];
    let times: Vec<Duration> = levels.iter().map(|&n| time_at(n, &mut rng)).collect();

    let top = times[4];
    assert!(top < Duration::from_secs(2), "N = 2^14 took {top:?}");
    let mut worst_ratio = 0.0f64;
    for i in 0..3 {
        let ratio = times[i + 2].as_secs_f64() / times[i].as_secs_f64().max(1e-9);
        worst_ratio = worst_ratio.max(ratio);
        assert!(
            ratio <= 6.0,
            "t(2^{}) / t(2^{}) = {ratio:.2} exceeds 6",
            12 + i,
            10 + i
        );
    }
    println!(
        "PASS criterion 11: forward+inverse at 2^14 in {top:?}, worst t(4N)/t(N) = {worst_ratio:.2} <= 6"
    );
}
