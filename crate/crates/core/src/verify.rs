//! Self-verification: runs the library's invariants on one graph at one
//! refinement level and reports measured residuals against pinned
//! tolerances. Backs the `verify` CLI command.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::eigenbasis::{
    continuous_inner_product, cycle_eigenspace, flow_space, odd_eigenspace, primitive_spectrum,
    BlockOrigin,
};
use crate::graph::{bipartition, spanning_tree_cycles, vertex_inner_product, Graph};
use crate::linalg::CMat;
use crate::oracle::{naive_forward, naive_inverse};
use crate::sampling::{restrict, trapezoid, VertexSignal};
use crate::spectrum::{apply_delta_n, eigensolve_delta1};
use crate::transform::{build_basis, fft_forward, fft_inverse, parseval_norm};
use crate::util::SplitMix64;

/// One verified invariant with its measured residual.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub detail: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub graph: String,
    pub level: usize,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Recorder {
    scale: f64,
    checks: Vec<Check>,
}

impl Recorder {
    fn residual(&mut self, name: &'static str, residual: f64, tolerance: f64) {
        let tolerance = tolerance * self.scale;
        self.checks.push(Check {
            name,
            passed: residual.is_finite() && residual <= tolerance,
            residual,
            tolerance,
            detail: None,
        });
    }

    fn exact(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(Check {
            name,
            passed,
            residual: if passed { 0.0 } else { f64::INFINITY },
            tolerance: 0.0,
            detail: Some(detail),
        });
    }

    fn failure(&mut self, name: &'static str, detail: String) {
        self.checks.push(Check {
            name,
            passed: false,
            residual: f64::INFINITY,
            tolerance: 0.0,
            detail: Some(detail),
        });
    }
}

fn random_signal(graph: &Graph, n: usize, rng: &mut SplitMix64) -> VertexSignal {
    VertexSignal::new(
        n,
        (0..graph.refined_vertex_count(n))
            .map(|_| rng.next_complex())
            .collect(),
    )
}

/// Runs the full invariant suite. `tolerance_scale` multiplies every
/// residual tolerance (1.0 keeps the pinned defaults); exact integer
/// checks are unaffected.
pub fn run(graph: &Graph, n: usize, tolerance_scale: f64) -> Report {
    let mut r = Recorder {
        scale: tolerance_scale,
        checks: Vec::new(),
    };
    let mut rng = SplitMix64::new(0x6d67_6666);

    // Discrete spectrum structure.
    let spectrum = match eigensolve_delta1(graph) {
        Ok(s) => {
            r.exact(
                "spectrum.multiplicity_sum",
                s.multiplicity_total() == graph.vertex_count(),
                format!("{} of {}", s.multiplicity_total(), graph.vertex_count()),
            );
            let in_range = s.clusters.iter().all(|c| (0.0..=2.0).contains(&c.value));
            r.exact("spectrum.range", in_range, format!("{:?}", s.values()));
            let zero_simple = s
                .clusters
                .first()
                .is_some_and(|c| c.value.abs() < 1e-10 && c.vectors.len() == 1);
            r.exact(
                "spectrum.zero_simple",
                zero_simple,
                "connected graph has a simple zero eigenvalue".into(),
            );
            let has_two = s.clusters.iter().any(|c| (c.value - 2.0).abs() < 1e-8);
            let is_bipartite = bipartition(graph).is_some();
            r.exact(
                "spectrum.two_iff_bipartite",
                has_two == is_bipartite,
                format!("mu=2 present: {has_two}, bipartite: {is_bipartite}"),
            );
            Some(s)
        }
        Err(err) => {
            r.failure("spectrum.solve", err.to_string());
            None
        }
    };

    if let Some(spectrum) = &spectrum {
        // Weighted orthonormality of the full eigenvector set.
        let all: Vec<&Vec<f64>> = spectrum
            .clusters
            .iter()
            .flat_map(|c| c.vectors.iter())
            .collect();
        let w = graph.refined_weight(1);
        let mut worst = 0.0f64;
        for (i, x) in all.iter().enumerate() {
            for (j, y) in all.iter().enumerate() {
                let ip: f64 = (0..graph.vertex_count())
                    .map(|v| graph.degree(v) as f64 * x[v] * y[v])
                    .sum::<f64>()
                    / w;
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - expected).abs());
            }
        }
        r.residual("spectrum.weighted_gram", worst, 1e-10);
    }

    // Combinatorial structure.
    let cycles = spanning_tree_cycles(graph);
    r.exact(
        "cycles.count",
        cycles.cycles.len() == graph.cycle_rank(),
        format!("{} of {}", cycles.cycles.len(), graph.cycle_rank()),
    );
    let flow = flow_space(graph);
    let flow_ok = flow.vectors.iter().all(|vector| {
        (0..graph.vertex_count()).all(|v| {
            graph
                .neighbors(v)
                .iter()
                .map(|&(_, e)| vector[e])
                .sum::<i64>()
                == 0
        })
    });
    r.exact(
        "flow.exact_constraints",
        flow_ok,
        format!("dim {}", flow.dim()),
    );
    r.exact(
        "special.dims_independent_of_n",
        cycle_eigenspace(graph, 1).len() == cycle_eigenspace(graph, 2).len()
            && odd_eigenspace(graph, 1).len() == odd_eigenspace(graph, 2).len(),
        "cycle and flow eigenspace dimensions at n = 1, 2".into(),
    );

    // Primitive eigenbasis.
    let primitives = match primitive_spectrum(graph) {
        Ok(p) => Some(p),
        Err(err) => {
            r.failure("basis.primitive", err.to_string());
            None
        }
    };
    if let Some(primitives) = &primitives {
        r.exact(
            "basis.positive_dim_total",
            primitives.positive_dim_total() == 2 * graph.edge_count(),
            format!(
                "{} of {}",
                primitives.positive_dim_total(),
                2 * graph.edge_count()
            ),
        );

        let mut gram_worst = 0.0f64;
        let mut vertex_conditions = 0.0f64;
        let mut relation_worst = 0.0f64;
        let mut dichotomy = true;
        for block in &primitives.blocks {
            for (i, f) in block.functions.iter().enumerate() {
                for (j, g) in block.functions.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    let ip = continuous_inner_product(f, g);
                    gram_worst = gram_worst.max((ip - Complex64::new(expected, 0.0)).norm());
                }
                vertex_conditions = vertex_conditions
                    .max(f.continuity_residual(graph))
                    .max(f.kirchhoff_residual(graph));
            }
            match block.origin {
                BlockOrigin::Lifted { .. } => {
                    let cos_w = block.omega.cos();
                    for f in &block.functions {
                        let values = f.vertex_values(graph);
                        for v in 0..graph.vertex_count() {
                            let mean = graph
                                .neighbors(v)
                                .iter()
                                .map(|&(u, _)| values[u])
                                .sum::<Complex64>()
                                / graph.degree(v) as f64;
                            relation_worst = relation_worst.max((cos_w * values[v] - mean).norm());
                        }
                    }
                }
                _ => {
                    for f in &block.functions {
                        let values = f.vertex_values(graph);
                        let max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
                        let min = values
                            .iter()
                            .map(|v| v.norm())
                            .fold(f64::INFINITY, f64::min);
                        dichotomy &= max < 1e-10 || min > 1e-10;
                    }
                }
            }
        }
        r.residual("basis.continuous_gram", gram_worst, 1e-10);
        r.residual("basis.vertex_conditions", vertex_conditions, 1e-9);
        r.residual("basis.vertex_relation", relation_worst, 1e-9);
        r.exact(
            "basis.vanishing_dichotomy",
            dichotomy,
            "special-frequency elements vanish at all vertices or none".into(),
        );
    }

    // Trapezoid regrouping of the weighted inner product.
    {
        let f = random_signal(graph, n, &mut rng);
        let g = random_signal(graph, n, &mut rng);
        match vertex_inner_product(graph, &f, &g) {
            Ok(direct) => {
                let mut by_edges = Complex64::new(0.0, 0.0);
                for edge in 0..graph.edge_count() {
                    let fe = f.edge_samples(graph, edge);
                    let ge = g.edge_samples(graph, edge);
                    let product: Vec<Complex64> =
                        fe.iter().zip(&ge).map(|(a, b)| a * b.conj()).collect();
                    by_edges += trapezoid(&product).expect("N + 1 >= 2 samples");
                }
                by_edges /= graph.edge_count() as f64;
                r.residual(
                    "sampling.trapezoid_identity",
                    (direct - by_edges).norm(),
                    1e-12,
                );
            }
            Err(err) => r.failure("sampling.trapezoid_identity", err.to_string()),
        }
    }

    // Exact sampling identities at integer multiples of pi.
    if let Some(primitives) = &primitives {
        let mut worst = 0.0f64;
        for block in &primitives.blocks {
            let multiple = block.omega / PI;
            if (multiple - multiple.round()).abs() > 1e-9 {
                continue;
            }
            for f in &block.functions {
                for g in &block.functions {
                    let rf = restrict(graph, f, n);
                    let rg = restrict(graph, g, n);
                    let discrete = vertex_inner_product(graph, &rf, &rg).expect("shapes match");
                    let continuous = continuous_inner_product(f, g);
                    worst = worst.max((discrete - continuous).norm());
                }
            }
        }
        r.residual("sampling.integer_block_exactness", worst, 1e-10);

        // Nyquist cosine: discrete = 2 x continuous.
        let cos_n = crate::eigenbasis::EdgeWaveFunction::new(
            n as f64 * PI,
            vec![(Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)); graph.edge_count()],
        );
        let rn = restrict(graph, &cos_n, n);
        let discrete = vertex_inner_product(graph, &rn, &rn).expect("shapes match");
        let continuous = continuous_inner_product(&cos_n, &cos_n);
        r.residual(
            "sampling.nyquist_ratio",
            (discrete - 2.0 * continuous).norm(),
            1e-10,
        );
    }

    // Transform machinery.
    match build_basis(graph, n) {
        Ok(basis) => {
            r.exact(
                "transform.completeness",
                basis.dimension() == graph.refined_vertex_count(n),
                format!("{} of {}", basis.dimension(), graph.refined_vertex_count(n)),
            );

            let mut special_gram = 0.0f64;
            let mut ortho_worst = 0.0f64;
            for block in basis.blocks() {
                let identity = CMat::identity(block.dim());
                let multiple = basis.primitives().blocks[block.primitive].omega / PI;
                if (multiple - multiple.round()).abs() < 1e-9 {
                    special_gram = special_gram.max(block.gram.max_abs_diff(&identity));
                }
                let check = block.ortho.mul(&block.gram).mul(&block.ortho.hermitian());
                ortho_worst = ortho_worst.max(check.max_abs_diff(&identity));
            }
            r.residual("transform.special_blocks_orthonormal", special_gram, 1e-9);
            r.residual("transform.b_gram_b_identity", ortho_worst, 1e-9);

            let f = random_signal(graph, n, &mut rng);
            match (fft_forward(&f, &basis), naive_forward(&f, &basis)) {
                (Ok(fast), Ok(slow)) => {
                    let mut worst = (fast.zero - slow.zero)
                        .norm()
                        .max((fast.nyquist - slow.nyquist).norm());
                    for (a, b) in fast.blocks.iter().zip(&slow.blocks) {
                        for (x, y) in a.raw.iter().zip(&b.raw) {
                            worst = worst.max((x - y).norm());
                        }
                    }
                    r.residual("transform.forward_oracle", worst, 1e-9);

                    match (fft_inverse(&fast, &basis), naive_inverse(&fast, &basis)) {
                        (Ok(fast_inv), Ok(slow_inv)) => {
                            let worst = fast_inv
                                .values()
                                .iter()
                                .zip(slow_inv.values())
                                .map(|(a, b)| (a - b).norm())
                                .fold(0.0, f64::max);
                            r.residual("transform.inverse_oracle", worst, 1e-9);

                            let norm = f.norm_sq(graph).sqrt();
                            let diff = fast_inv
                                .values()
                                .iter()
                                .zip(f.values())
                                .map(|(a, b)| (a - b).norm_sqr())
                                .sum::<f64>()
                                .sqrt();
                            r.residual("transform.round_trip", diff / norm.max(1e-30), 1e-8);
                        }
                        (Err(err), _) | (_, Err(err)) => {
                            r.failure("transform.inverse_oracle", err.to_string())
                        }
                    }

                    match parseval_norm(&fast, &basis) {
                        Ok(p) => {
                            let direct = f.norm_sq(graph);
                            r.residual("transform.parseval", (p - direct).abs(), 1e-8);
                        }
                        Err(err) => r.failure("transform.parseval", err.to_string()),
                    }

                    // Blockwise eigen-relation under the discrete operator.
                    let eigen_relation = apply_delta_n(graph, &f)
                        .map_err(|e| e.to_string())
                        .and_then(|lf| fft_forward(&lf, &basis).map_err(|e| e.to_string()));
                    match eigen_relation {
                        Ok(lap) => {
                            let scale = fast
                                .blocks
                                .iter()
                                .flat_map(|b| b.raw.iter())
                                .map(|x| x.norm())
                                .fold(fast.zero.norm().max(fast.nyquist.norm()), f64::max);
                            let mut worst = lap.zero.norm();
                            let mu_nyq = basis.block_eigenvalue(n as f64 * PI);
                            worst = worst.max(
                                (lap.nyquist - mu_nyq * fast.nyquist).norm() / mu_nyq.max(1.0),
                            );
                            for (lb, fb) in lap.blocks.iter().zip(&fast.blocks) {
                                let mu = basis.block_eigenvalue(fb.omega);
                                for (lx, x) in lb.raw.iter().zip(&fb.raw) {
                                    worst = worst.max((lx - mu * x).norm() / mu.max(1.0));
                                }
                            }
                            r.residual("transform.eigen_relation", worst / scale.max(1e-30), 1e-8);
                        }
                        Err(err) => r.failure("transform.eigen_relation", err),
                    }
                }
                (Err(err), _) | (_, Err(err)) => {
                    r.failure("transform.forward_oracle", err.to_string())
                }
            }
        }
        Err(err) => r.failure("transform.build_basis", err.to_string()),
    }

    Report {
        graph: graph.name().to_string(),
        level: n,
        checks: r.checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    #[test]
    fn suite_passes_on_reference_graphs() {
        for graph in [
            families::complete_bipartite(4).unwrap(),
            families::cycle(3).unwrap(),
        ] {
            let report = run(&graph, 8, 1.0);
            for check in &report.checks {
                assert!(
                    check.passed,
                    "{}: {} residual {:e} tol {:e} ({:?})",
                    graph.name(),
                    check.name,
                    check.residual,
                    check.tolerance,
                    check.detail
                );
            }
            assert!(report.passed());
        }
    }
}
