//! Versioned plain-text model files.
//!
//! ```text
//! zenn-model 1
//! shallow-zenn n=1 alpha=1.1000000000000001e0 activation=sine
//! params 4
//! 1.0000000000000000e0
//! ...
//! end
//! ```
//!
//! A document is a header line, one architecture line, its value blocks and a
//! closing `end`. Deep models write `deep layers=K` followed by `K` layer
//! records; a `parallel` layer record is followed by its branch records.
//! Every real number is written with 17 significant digits so parsing restores
//! the exact bits. Lines starting with `#` are comments.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::activation::Activation;
use crate::error::{Result, ZennError};
use crate::layers::{FourierFeatures, KAZeNNEdge, Layer, RandoZeNN};
use crate::model::DeepModel;
use crate::shallow::{NeuronParams, ShallowMLP, ShallowZeNN, PARAMS_PER_NEURON};

pub const FORMAT_MAGIC: &str = "zenn-model";
pub const FORMAT_VERSION: u32 = 1;

/// Any model the file format can hold.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel {
    ShallowZeNN(ShallowZeNN),
    ShallowMLP(ShallowMLP),
    Deep(DeepModel),
}

impl From<ShallowZeNN> for AnyModel {
    fn from(m: ShallowZeNN) -> Self {
        AnyModel::ShallowZeNN(m)
    }
}

impl From<ShallowMLP> for AnyModel {
    fn from(m: ShallowMLP) -> Self {
        AnyModel::ShallowMLP(m)
    }
}

impl From<DeepModel> for AnyModel {
    fn from(m: DeepModel) -> Self {
        AnyModel::Deep(m)
    }
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_block(out: &mut String, name: &str, values: &[f64]) {
    let _ = writeln!(out, "{name} {}", values.len());
    for v in values {
        out.push_str(&real(*v));
        out.push('\n');
    }
}

fn neurons_flat(neurons: &[NeuronParams]) -> Vec<f64> {
    neurons.iter().flat_map(|p| [p.w1, p.b1, p.w2, p.b2]).collect()
}

fn neurons_from(flat: &[f64]) -> Vec<NeuronParams> {
    flat.chunks_exact(PARAMS_PER_NEURON).map(|c| NeuronParams::new(c[0], c[1], c[2], c[3])).collect()
}

/// Renders a model document.
pub fn serialize_model(model: &AnyModel) -> String {
    let mut out = format!("{FORMAT_MAGIC} {FORMAT_VERSION}\n");
    match model {
        AnyModel::ShallowZeNN(m) => {
            let _ = writeln!(out, "shallow-zenn n={} alpha={} activation={}", m.width(), real(m.alpha()), m.activation());
            write_block(&mut out, "params", &neurons_flat(m.neurons()));
        }
        AnyModel::ShallowMLP(m) => {
            let _ = writeln!(out, "shallow-mlp n={} beta={} activation={}", m.width(), real(m.beta()), m.activation());
            write_block(&mut out, "params", &neurons_flat(m.neurons()));
        }
        AnyModel::Deep(m) => {
            let _ = writeln!(out, "deep layers={}", m.layers().len());
            for l in m.layers() {
                write_layer(&mut out, l);
            }
        }
    }
    out.push_str("end\n");
    out
}

fn write_layer(out: &mut String, layer: &Layer) {
    match layer {
        Layer::Dense(l) => {
            let _ = writeln!(
                out,
                "layer dense in={} out={} alpha={} activation={}",
                l.inner.input_dim, l.inner.units, real(l.alpha), l.inner.activation
            );
            write_block(out, "params", &l.inner.params);
        }
        Layer::OZeNN(l) => {
            let _ = writeln!(out, "layer ozenn d={} n={} alpha={} activation={}", l.dim, l.n, real(l.alpha), l.activation);
            write_block(out, "params", &l.params);
        }
        Layer::RadZeNN(l) => {
            let _ = writeln!(
                out,
                "layer radzenn d={} n={} alpha={} activation={}",
                l.inner.input_dim, l.inner.units, real(l.alpha), l.inner.activation
            );
            write_block(out, "params", &l.inner.params);
        }
        Layer::RandoZeNN(l) => {
            let _ = writeln!(
                out,
                "layer randozenn d={} n={} m={} alpha={} activation={}",
                l.inner.input_dim, l.n, l.inner.units, real(l.alpha), l.inner.activation
            );
            let _ = writeln!(out, "indices {}", l.indices.len());
            for row in l.indices.chunks(l.inner.input_dim) {
                let line: Vec<String> = row.iter().map(u32::to_string).collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
            write_block(out, "params", &l.inner.params);
        }
        Layer::Fourier(l) => {
            let _ = writeln!(out, "layer fourier d={} n={} rho={} trainable={}", l.dim, l.n, real(l.rho), l.trainable);
            write_block(out, "frequencies", &l.b);
        }
        Layer::KAZeNN(l) => {
            let e = &l.edges[0];
            let _ = writeln!(
                out,
                "layer kazenn in={} out={} n={} alpha={} activation={}",
                l.input_dim, l.output_dim, e.width(), real(e.alpha()), e.activation()
            );
            let flat: Vec<f64> = l.edges.iter().flat_map(ShallowZeNN::params).collect();
            write_block(out, "params", &flat);
        }
        Layer::Parallel(l) => {
            let _ = writeln!(out, "layer parallel branches={}", l.branches.len());
            for b in &l.branches {
                write_layer(out, b);
            }
        }
    }
}

struct Reader<'a> {
    lines: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

fn malformed(line: usize, msg: impl std::fmt::Display) -> ZennError {
    ZennError::Malformed(format!("line {line}: {msg}"))
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Self { lines: it.peekable() }
    }

    fn next(&mut self) -> Result<(usize, &'a str)> {
        self.lines.next().ok_or_else(|| ZennError::Malformed("unexpected end of document".into()))
    }

    /// Reads `<keyword> k=v ...`.
    fn record(&mut self, keyword: &str) -> Result<(usize, Fields)> {
        let (no, line) = self.next()?;
        let mut parts = line.split_whitespace();
        let head = parts.next().unwrap_or_default();
        if head != keyword {
            return Err(malformed(no, format!("expected `{keyword}`, found `{head}`")));
        }
        Ok((no, Fields::parse(no, parts)?))
    }

    fn block_header(&mut self, name: &str) -> Result<(usize, usize)> {
        let (no, line) = self.next()?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(name) {
            return Err(malformed(no, format!("expected `{name}` block")));
        }
        let count = parts
            .next()
            .and_then(|c| c.parse::<usize>().ok())
            .ok_or_else(|| malformed(no, format!("`{name}` needs a count")))?;
        Ok((no, count))
    }

    fn reals(&mut self, name: &str) -> Result<Vec<f64>> {
        let (_, count) = self.block_header(name)?;
        let mut values = Vec::with_capacity(count);
        while values.len() < count {
            let (no, line) = self.next()?;
            for tok in line.split_whitespace() {
                let v: f64 = tok.parse().map_err(|_| malformed(no, format!("bad number `{tok}`")))?;
                values.push(v);
            }
        }
        if values.len() != count {
            return Err(ZennError::Malformed(format!("`{name}` block holds more than {count} values")));
        }
        Ok(values)
    }

    fn integers(&mut self, name: &str) -> Result<Vec<u32>> {
        let (_, count) = self.block_header(name)?;
        let mut values = Vec::with_capacity(count);
        while values.len() < count {
            let (no, line) = self.next()?;
            for tok in line.split_whitespace() {
                values.push(tok.parse().map_err(|_| malformed(no, format!("bad index `{tok}`")))?);
            }
        }
        if values.len() != count {
            return Err(ZennError::Malformed(format!("`{name}` block holds more than {count} values")));
        }
        Ok(values)
    }
}

struct Fields {
    line: usize,
    map: BTreeMap<String, String>,
}

impl Fields {
    fn parse<'a>(line: usize, parts: impl Iterator<Item = &'a str>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for p in parts {
            let (k, v) = p.split_once('=').ok_or_else(|| malformed(line, format!("expected key=value, found `{p}`")))?;
            map.insert(k.to_string(), v.to_string());
        }
        Ok(Self { line, map })
    }

    fn raw(&self, key: &str) -> Result<&str> {
        self.map.get(key).map(String::as_str).ok_or_else(|| malformed(self.line, format!("missing `{key}`")))
    }

    fn usize(&self, key: &str) -> Result<usize> {
        self.raw(key)?.parse().map_err(|_| malformed(self.line, format!("`{key}` is not an integer")))
    }

    fn real(&self, key: &str) -> Result<f64> {
        self.raw(key)?.parse().map_err(|_| malformed(self.line, format!("`{key}` is not a number")))
    }

    fn activation(&self) -> Result<Activation> {
        self.raw("activation")?.parse().map_err(|e| malformed(self.line, e))
    }

    fn flag(&self, key: &str) -> Result<bool> {
        self.raw(key)?.parse().map_err(|_| malformed(self.line, format!("`{key}` must be true or false")))
    }
}

fn expect_len(what: &str, got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(ZennError::ModelDims(format!("{what}: {got} parameters, architecture needs {expected}")));
    }
    Ok(())
}

/// Parses a model document.
pub fn deserialize_model(text: &str) -> Result<AnyModel> {
    let mut r = Reader::new(text);
    let (no, header) = r.next()?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some(FORMAT_MAGIC) {
        return Err(malformed(no, format!("missing `{FORMAT_MAGIC}` header")));
    }
    let version: u32 = parts
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| malformed(no, "missing format version"))?;
    if version != FORMAT_VERSION {
        return Err(ZennError::VersionMismatch { found: version, expected: FORMAT_VERSION });
    }

    let &(no, kind_line) = r.lines.peek().ok_or_else(|| ZennError::Malformed("missing architecture".into()))?;
    let kind = kind_line.split_whitespace().next().unwrap_or_default();
    let model = match kind {
        "shallow-zenn" => {
            let (_, f) = r.record("shallow-zenn")?;
            let n = f.usize("n")?;
            let params = r.reals("params")?;
            expect_len("shallow-zenn", params.len(), PARAMS_PER_NEURON * n)?;
            AnyModel::ShallowZeNN(ShallowZeNN::new(f.real("alpha")?, f.activation()?, neurons_from(&params))?)
        }
        "shallow-mlp" => {
            let (_, f) = r.record("shallow-mlp")?;
            let n = f.usize("n")?;
            let params = r.reals("params")?;
            expect_len("shallow-mlp", params.len(), PARAMS_PER_NEURON * n)?;
            AnyModel::ShallowMLP(ShallowMLP::new(f.real("beta")?, f.activation()?, neurons_from(&params))?)
        }
        "deep" => {
            let (_, f) = r.record("deep")?;
            let count = f.usize("layers")?;
            let layers = (0..count).map(|_| read_layer(&mut r)).collect::<Result<Vec<_>>>()?;
            AnyModel::Deep(DeepModel::new(layers).map_err(|e| ZennError::ModelDims(e.to_string()))?)
        }
        other => return Err(malformed(no, format!("unknown model kind `{other}`"))),
    };
    let (no, tail) = r.next()?;
    if tail != "end" {
        return Err(malformed(no, "expected `end`"));
    }
    Ok(model)
}

fn read_layer(r: &mut Reader<'_>) -> Result<Layer> {
    let (no, line) = r.next()?;
    let mut parts = line.split_whitespace();
    if parts.next() != Some("layer") {
        return Err(malformed(no, "expected `layer` record"));
    }
    let kind = parts.next().ok_or_else(|| malformed(no, "layer kind missing"))?;
    let f = Fields::parse(no, parts)?;
    let mut layer = match kind {
        "dense" => Layer::dense(f.usize("in")?, f.usize("out")?, f.real("alpha")?, f.activation()?)?,
        "ozenn" => Layer::ozenn(f.usize("d")?, f.usize("n")?, f.real("alpha")?, f.activation()?)?,
        "radzenn" => Layer::radzenn(f.usize("d")?, f.usize("n")?, f.real("alpha")?, f.activation()?)?,
        "randozenn" => {
            let (d, n, m) = (f.usize("d")?, f.usize("n")?, f.usize("m")?);
            let indices = r.integers("indices")?;
            Layer::RandoZeNN(RandoZeNN::with_indices(d, n, m, f.real("alpha")?, f.activation()?, indices)?)
        }
        "fourier" => {
            let (d, n) = (f.usize("d")?, f.usize("n")?);
            let b = r.reals("frequencies")?;
            return Ok(Layer::Fourier(FourierFeatures::with_matrix(d, n, f.real("rho")?, f.flag("trainable")?, b)?));
        }
        "kazenn" => {
            let (din, dout, n) = (f.usize("in")?, f.usize("out")?, f.usize("n")?);
            let (alpha, act) = (f.real("alpha")?, f.activation()?);
            let params = r.reals("params")?;
            let block = PARAMS_PER_NEURON * n;
            expect_len("kazenn", params.len(), block * din * dout)?;
            let edges = params
                .chunks_exact(block)
                .map(|c| ShallowZeNN::new(alpha, act, neurons_from(c)))
                .collect::<Result<Vec<_>>>()?;
            return Ok(Layer::KAZeNN(KAZeNNEdge::from_edges(din, dout, edges)?));
        }
        "parallel" => {
            let count = f.usize("branches")?;
            let branches = (0..count).map(|_| read_layer(r)).collect::<Result<Vec<_>>>()?;
            return Layer::parallel(branches).map_err(|e| ZennError::ModelDims(e.to_string()));
        }
        other => return Err(malformed(no, format!("unknown layer kind `{other}`"))),
    };
    let params = r.reals("params")?;
    expect_len(kind, params.len(), layer.num_params())?;
    layer.set_params(&params)?;
    Ok(layer)
}
