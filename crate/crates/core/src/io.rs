//! Artifact formats. Reading goes through serde; writing is a small
//! hand-rolled emitter so floats always carry 17 significant digits and
//! identical inputs produce byte-identical files.

use num_complex::Complex64;
use serde::Deserialize;
use thiserror::Error;

use crate::eigenbasis::PrimitiveSpectrum;
use crate::graph::{Graph, GraphError};
use crate::sampling::VertexSignal;
use crate::spectrum::DiscreteSpectrum;
use crate::transform::{BlockCoefficients, GraphDft};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// 17 significant digits, enough to reproduce any f64 exactly.
pub fn format_f64(x: f64) -> String {
    assert!(
        x.is_finite(),
        "artifacts must not contain non-finite values"
    );
    format!("{x:.16e}")
}

fn format_complex(z: Complex64) -> String {
    format!("[{},{}]", format_f64(z.re), format_f64(z.im))
}

fn format_complex_list(values: &[Complex64]) -> String {
    let inner: Vec<String> = values.iter().map(|&z| format_complex(z)).collect();
    format!("[{}]", inner.join(","))
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

// ---- graph ----------------------------------------------------------------

#[derive(Deserialize)]
struct GraphFile {
    name: String,
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

pub fn write_graph(graph: &Graph) -> String {
    let edges: Vec<String> = graph
        .edges()
        .iter()
        .map(|&(t, h)| format!("[{t},{h}]"))
        .collect();
    format!(
        "{{\"name\":\"{}\",\"vertex_count\":{},\"edges\":[{}]}}\n",
        escape(graph.name()),
        graph.vertex_count(),
        edges.join(",")
    )
}

pub fn read_graph(text: &str) -> Result<Graph, IoError> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| IoError::Format(e.to_string()))?;
    Ok(Graph::new(file.name, file.vertex_count, file.edges)?)
}

// ---- spectrum --------------------------------------------------------------

pub fn write_spectrum(spectrum: &DiscreteSpectrum) -> String {
    let mu: Vec<String> = spectrum
        .clusters
        .iter()
        .map(|c| format_f64(c.value))
        .collect();
    let multiplicity: Vec<String> = spectrum
        .clusters
        .iter()
        .map(|c| c.vectors.len().to_string())
        .collect();
    let vectors: Vec<String> = spectrum
        .clusters
        .iter()
        .flat_map(|c| c.vectors.iter())
        .map(|v| {
            let entries: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            format_complex_list(&entries)
        })
        .collect();
    format!(
        "{{\"mu\":[{}],\"multiplicity\":[{}],\"vectors\":[{}]}}\n",
        mu.join(","),
        multiplicity.join(","),
        vectors.join(",")
    )
}

// ---- primitive basis --------------------------------------------------------

pub fn write_basis(spectrum: &PrimitiveSpectrum) -> String {
    let mut blocks = Vec::with_capacity(spectrum.blocks.len() + 1);
    let zero_functions = vec![spectrum.zero_mode.clone()];
    let mut emit = |omega: f64, functions: &[crate::eigenbasis::EdgeWaveFunction]| {
        let rendered: Vec<String> = functions
            .iter()
            .map(|f| {
                let pairs: Vec<String> = f
                    .coefficients()
                    .iter()
                    .map(|&(a, b)| format!("[{},{}]", format_complex(a), format_complex(b)))
                    .collect();
                format!("{{\"edge_coeffs\":[{}]}}", pairs.join(","))
            })
            .collect();
        blocks.push(format!(
            "{{\"omega\":{},\"functions\":[{}]}}",
            format_f64(omega),
            rendered.join(",")
        ));
    };
    emit(0.0, &zero_functions);
    for block in &spectrum.blocks {
        emit(block.omega, &block.functions);
    }
    format!("[{}]\n", blocks.join(","))
}

// ---- signals ----------------------------------------------------------------

#[derive(Deserialize)]
struct SignalFile {
    #[serde(rename = "N")]
    n: usize,
    values: Vec<[f64; 2]>,
}

pub fn write_signal_json(signal: &VertexSignal) -> String {
    format!(
        "{{\"N\":{},\"values\":{}}}\n",
        signal.level(),
        format_complex_list(signal.values())
    )
}

pub fn read_signal_json(text: &str) -> Result<VertexSignal, IoError> {
    let file: SignalFile =
        serde_json::from_str(text).map_err(|e| IoError::Format(e.to_string()))?;
    if file.n == 0 {
        return Err(IoError::Format("N must be at least 1".into()));
    }
    Ok(VertexSignal::new(
        file.n,
        file.values
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect(),
    ))
}

/// Rows of `index,re,im` in canonical order, with a header line.
pub fn write_signal_csv(signal: &VertexSignal) -> String {
    let mut out = String::from("index,re,im\n");
    for (index, value) in signal.values().iter().enumerate() {
        out.push_str(&format!(
            "{index},{},{}\n",
            format_f64(value.re),
            format_f64(value.im)
        ));
    }
    out
}

/// Values only; the refinement level is recovered from the graph shape by
/// the caller.
pub fn read_signal_csv(text: &str) -> Result<Vec<Complex64>, IoError> {
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with("index")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(IoError::Format(format!(
                "line {}: expected index,re,im",
                lineno + 1
            )));
        }
        let index: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| IoError::Format(format!("line {}: bad index", lineno + 1)))?;
        if index != values.len() {
            return Err(IoError::Format(format!(
                "line {}: index {} out of order",
                lineno + 1,
                index
            )));
        }
        let re: f64 = fields[1]
            .trim()
            .parse()
            .map_err(|_| IoError::Format(format!("line {}: bad re", lineno + 1)))?;
        let im: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| IoError::Format(format!("line {}: bad im", lineno + 1)))?;
        values.push(Complex64::new(re, im));
    }
    if values.is_empty() {
        return Err(IoError::Format("no samples in csv".into()));
    }
    Ok(values)
}

// ---- transform data -----------------------------------------------------------

#[derive(Deserialize)]
struct DftFile {
    zero: [f64; 2],
    nyquist: [f64; 2],
    blocks: Vec<DftBlockFile>,
}

#[derive(Deserialize)]
struct DftBlockFile {
    k: usize,
    m: usize,
    omega: f64,
    raw: Vec<[f64; 2]>,
}

pub fn write_dft(dft: &GraphDft, coefficients: &[Vec<Complex64>]) -> String {
    assert_eq!(dft.blocks.len(), coefficients.len());
    let blocks: Vec<String> = dft
        .blocks
        .iter()
        .zip(coefficients)
        .map(|(block, coeffs)| {
            format!(
                "{{\"k\":{},\"m\":{},\"omega\":{},\"raw\":{},\"coeffs\":{}}}",
                block.primitive,
                block.shift,
                format_f64(block.omega),
                format_complex_list(&block.raw),
                format_complex_list(coeffs)
            )
        })
        .collect();
    format!(
        "{{\"zero\":{},\"nyquist\":{},\"blocks\":[{}]}}\n",
        format_complex(dft.zero),
        format_complex(dft.nyquist),
        blocks.join(",")
    )
}

pub fn read_dft(text: &str) -> Result<GraphDft, IoError> {
    let file: DftFile = serde_json::from_str(text).map_err(|e| IoError::Format(e.to_string()))?;
    Ok(GraphDft {
        zero: Complex64::new(file.zero[0], file.zero[1]),
        nyquist: Complex64::new(file.nyquist[0], file.nyquist[1]),
        blocks: file
            .blocks
            .into_iter()
            .map(|b| BlockCoefficients {
                primitive: b.k,
                shift: b.m,
                omega: b.omega,
                raw: b
                    .raw
                    .into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect(),
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::util::SplitMix64;

    #[test]
    fn float_format_17_digits() {
        assert_eq!(format_f64(1.0), "1.0000000000000000e0");
        assert_eq!(format_f64(-0.5), "-5.0000000000000000e-1");
        let x = std::f64::consts::PI;
        let parsed: f64 = format_f64(x).parse().unwrap();
        assert_eq!(parsed, x);
    }

    #[test]
    fn graph_round_trip() {
        let graph = families::bowtie();
        let text = write_graph(&graph);
        let back = read_graph(&text).unwrap();
        assert_eq!(back, graph);
        // Identical input gives identical bytes.
        assert_eq!(text, write_graph(&back));
    }

    #[test]
    fn graph_file_validation_errors_surface() {
        let text = r#"{"name":"p3","vertex_count":3,"edges":[[0,1],[1,2]]}"#;
        assert!(matches!(read_graph(text), Err(IoError::Graph(_))));
        assert!(matches!(read_graph("{not json"), Err(IoError::Format(_))));
    }

    #[test]
    fn signal_json_round_trip() {
        let graph = families::cycle(4).unwrap();
        let mut rng = SplitMix64::new(9);
        let signal = VertexSignal::new(
            4,
            (0..graph.refined_vertex_count(4))
                .map(|_| rng.next_complex())
                .collect(),
        );
        let text = write_signal_json(&signal);
        let back = read_signal_json(&text).unwrap();
        assert_eq!(back.level(), 4);
        for (a, b) in back.values().iter().zip(signal.values()) {
            assert_eq!(a, b, "17 digits reproduce f64 exactly");
        }
    }

    #[test]
    fn signal_csv_round_trip() {
        let signal = VertexSignal::new(
            2,
            vec![
                Complex64::new(0.25, -1.5),
                Complex64::new(std::f64::consts::E, 0.0),
            ],
        );
        let text = write_signal_csv(&signal);
        assert!(text.starts_with("index,re,im\n"));
        let values = read_signal_csv(&text).unwrap();
        assert_eq!(values, signal.values());
    }

    #[test]
    fn dft_round_trip() {
        let graph = families::cycle(3).unwrap();
        let basis = crate::transform::build_basis(&graph, 4).unwrap();
        let mut rng = SplitMix64::new(2);
        let f = VertexSignal::new(
            4,
            (0..graph.refined_vertex_count(4))
                .map(|_| rng.next_complex())
                .collect(),
        );
        let dft = crate::transform::fft_forward(&f, &basis).unwrap();
        let coeffs = crate::transform::coefficients(&dft, &basis).unwrap();
        let text = write_dft(&dft, &coeffs);
        let back = read_dft(&text).unwrap();
        assert_eq!(back, dft);
    }
}
