//! Dataset loaders and generators: numeric CSV tables, CIFAR-10 binary
//! batches, graph edge lists with a spectral node embedding, and isotropic
//! Gaussian mixtures.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::index::sample;
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::kmeans::Labeling;
use crate::matrix::{dot, sym_eigen, Matrix};
use crate::rng::rng_from_seed;

/// Points with optional reference labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub points: Matrix,
    pub labels: Option<Labeling>,
    pub name: String,
    pub provenance: String,
}

impl LabeledDataset {
    pub fn new(points: Matrix, labels: Option<Labeling>, name: impl Into<String>, provenance: impl Into<String>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != points.rows() {
                return Err(Error::domain(format!(
                    "{} labels for {} points",
                    l.len(),
                    points.rows()
                )));
            }
        }
        Ok(LabeledDataset {
            points,
            labels,
            name: name.into(),
            provenance: provenance.into(),
        })
    }

    /// Keep `count` rows chosen uniformly without replacement, in their
    /// original order.
    pub fn subsample(&self, count: usize, seed: u64) -> Result<Self> {
        let n = self.points.rows();
        if count > n {
            return Err(Error::Config(format!(
                "cannot subsample {count} rows from {n}"
            )));
        }
        let mut idx = sample(&mut rng_from_seed(seed), n, count).into_vec();
        idx.sort_unstable();
        let labels = self
            .labels
            .as_ref()
            .map(|l| Labeling::new(idx.iter().map(|&i| l.as_slice()[i]).collect(), l.k()))
            .transpose()?;
        Ok(LabeledDataset {
            points: self.points.select_rows(&idx),
            labels,
            name: self.name.clone(),
            provenance: format!("{} (subsample {count}, seed {seed})", self.provenance),
        })
    }
}

/// Read a comma-separated numeric table. Every row must have the same number
/// of fields and every field must parse as a finite real.
pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<Matrix> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    read_csv(path, file, has_header)
}

fn read_csv<R: std::io::Read>(path: &Path, input: R, has_header: bool) -> Result<Matrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::at_line(path, line, e.to_string())
        })?;
        let line = record.position().map_or(rows + 1, |p| p.line() as usize);
        let width = *cols.get_or_insert(record.len());
        if record.len() != width {
            return Err(Error::at_line(
                path,
                line,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                Error::at_line(path, line, format!("field {} ('{field}') is not a number", j + 1))
            })?;
            if !v.is_finite() {
                return Err(Error::at_line(path, line, format!("field {} is not finite", j + 1)));
            }
            data.push(v);
        }
        rows += 1;
    }
    Matrix::new(rows, cols.unwrap_or(0), data)
}

/// Write a matrix as CSV with shortest round-trip number formatting.
pub fn write_csv(path: impl AsRef<Path>, x: &Matrix, header: Option<&[String]>) -> Result<()> {
    let mut s = String::new();
    if let Some(h) = header {
        s.push_str(&h.join(","));
        s.push('\n');
    }
    for row in x.row_iter() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            write!(s, "{v}").expect("writing to a String cannot fail");
        }
        s.push('\n');
    }
    std::fs::write(path, s)?;
    Ok(())
}

pub const CIFAR_RECORD_BYTES: usize = 3073;
pub const CIFAR_PIXELS: usize = 3072;
pub const CIFAR_CLASSES: usize = 10;

/// How raw CIFAR-10 pixel bytes become features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PixelScale {
    /// Divide by 255 so features lie in `[0, 1]`.
    #[default]
    Unit,
    /// Keep byte values `0..=255`.
    Raw,
}

/// Load a CIFAR-10 binary batch with pixels scaled to `[0, 1]`.
pub fn load_cifar10(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    load_cifar10_with(path, PixelScale::Unit)
}

/// Load a CIFAR-10 binary batch: 3073-byte records of one label byte followed
/// by the red, green and blue 32×32 planes.
pub fn load_cifar10_with(path: impl AsRef<Path>, scale: PixelScale) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)?;
    parse_cifar10(path, &bytes, scale)
}

fn parse_cifar10(path: &Path, bytes: &[u8], scale: PixelScale) -> Result<LabeledDataset> {
    if !bytes.len().is_multiple_of(CIFAR_RECORD_BYTES) {
        return Err(Error::at_record(
            path,
            bytes.len() / CIFAR_RECORD_BYTES,
            format!(
                "file length {} is not a multiple of {CIFAR_RECORD_BYTES}",
                bytes.len()
            ),
        ));
    }
    let n = bytes.len() / CIFAR_RECORD_BYTES;
    let factor = match scale {
        PixelScale::Unit => 1.0 / 255.0,
        PixelScale::Raw => 1.0,
    };
    let mut labels = Vec::with_capacity(n);
    let mut data = Vec::with_capacity(n * CIFAR_PIXELS);
    for (i, rec) in bytes.chunks_exact(CIFAR_RECORD_BYTES).enumerate() {
        let label = rec[0] as usize;
        if label >= CIFAR_CLASSES {
            return Err(Error::at_record(path, i, format!("label byte {label} is above 9")));
        }
        labels.push(label);
        data.extend(rec[1..].iter().map(|&b| b as f64 * factor));
    }
    LabeledDataset::new(
        Matrix::new(n, CIFAR_PIXELS, data)?,
        Some(Labeling::new(labels, CIFAR_CLASSES)?),
        "cifar10",
        path.display().to_string(),
    )
}

/// Undirected simple graph on nodes `0..node_count`. Edges are stored with
/// the smaller endpoint first, in insertion order, without duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(node_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for &(u, v) in &edges {
            if u >= v || v >= node_count {
                return Err(Error::domain(format!(
                    "edge ({u}, {v}) must satisfy u < v < {node_count}"
                )));
            }
            if !seen.insert((u, v)) {
                return Err(Error::domain(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Graph { node_count, edges })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.node_count];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    /// Edge-list text that [`load_edge_list`] reads back to an identical graph.
    ///
    /// A self-loop line `w w` introduces node `w` without adding an edge; it is
    /// emitted for isolated nodes and wherever an edge would otherwise
    /// introduce node ids out of order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let mut next = 0;
        for &(u, v) in &self.edges {
            let in_order = if u >= next {
                u == next && v == next + 1
            } else {
                v <= next
            };
            if !in_order {
                while next <= v {
                    writeln!(out, "{next} {next}").expect("String write");
                    next += 1;
                }
            }
            writeln!(out, "{u} {v}").expect("String write");
            next = next.max(v + 1);
        }
        while next < self.node_count {
            writeln!(out, "{next} {next}").expect("String write");
            next += 1;
        }
        out
    }
}

/// Read whitespace-separated integer pairs, one edge per line. Lines starting
/// with `#` and blank lines are skipped. Node ids are compacted to
/// `0..node_count` in order of first appearance; self-loops and repeated
/// edges are dropped, though a self-loop still introduces its node.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(path, &text)
}

fn parse_edge_list(path: &Path, text: &str) -> Result<Graph> {
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let mut endpoint = || -> Result<u64> {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::at_line(path, line_no, "expected two node ids"))?;
            tok.parse()
                .map_err(|_| Error::at_line(path, line_no, format!("'{tok}' is not a node id")))
        };
        let a = endpoint()?;
        let b = endpoint()?;
        if tokens.next().is_some() {
            return Err(Error::at_line(path, line_no, "expected exactly two node ids"));
        }
        let mut compact = |raw: u64| {
            let next = ids.len();
            *ids.entry(raw).or_insert(next)
        };
        let u = compact(a);
        let v = compact(b);
        if u == v {
            continue;
        }
        let e = (u.min(v), u.max(v));
        if seen.insert(e) {
            edges.push(e);
        }
    }
    Graph::new(ids.len(), edges)
}

/// Node coordinates together with the Laplacian eigenvalue of each column.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEmbedding {
    pub coords: Matrix,
    pub eigenvalues: Vec<f64>,
}

/// Eigenvalues below this count as zero when aligning the null space.
const NULL_EIGENVALUE_TOL: f64 = 1e-9;

/// Embed nodes with eigenvectors of the symmetric normalized Laplacian
/// `I − D^{-1/2} A D^{-1/2}`, skipping the first (smallest) eigenvector.
///
/// Isolated nodes get a unit diagonal. When the zero eigenvalue is repeated
/// (a disconnected graph), its eigenspace is re-expressed so that the first
/// basis vector is `D^{1/2}·1`, which is the one discarded.
pub fn spectral_embedding(g: &Graph, dim: usize) -> Result<SpectralEmbedding> {
    let n = g.node_count();
    if dim == 0 || n < dim + 1 {
        return Err(Error::domain(format!(
            "a {dim}-dimensional embedding needs dim >= 1 and at least {} nodes, graph has {n}",
            dim + 1
        )));
    }
    let deg = g.degrees();
    let inv_sqrt: Vec<f64> = deg
        .iter()
        .map(|&d| if d > 0 { 1.0 / (d as f64).sqrt() } else { 0.0 })
        .collect();
    let mut lap = Matrix::identity(n).into_vec();
    for &(u, v) in g.edges() {
        let w = -inv_sqrt[u] * inv_sqrt[v];
        lap[u * n + v] = w;
        lap[v * n + u] = w;
    }
    let pairs = sym_eigen(&Matrix::new(n, n, lap)?)?;

    // ascending order
    let values: Vec<f64> = pairs.eigenvalues.iter().rev().copied().collect();
    let mut vectors: Vec<Vec<f64>> = (0..n).rev().map(|i| pairs.vector(i)).collect();

    let null = values.iter().take_while(|&&l| l.abs() <= NULL_EIGENVALUE_TOL).count();
    let trivial: Vec<f64> = deg.iter().map(|&d| (d as f64).sqrt()).collect();
    let norm = dot(&trivial, &trivial).sqrt();
    if null >= 2 && norm > 0.0 {
        let mut basis = vec![trivial.iter().map(|v| v / norm).collect::<Vec<_>>()];
        for q in &vectors[..null] {
            if basis.len() == null {
                break;
            }
            let mut r = q.clone();
            for b in &basis {
                let c = dot(b, &r);
                r.iter_mut().zip(b).for_each(|(ri, bi)| *ri -= c * bi);
            }
            let rn = dot(&r, &r).sqrt();
            if rn > 1e-6 {
                basis.push(r.into_iter().map(|v| v / rn).collect());
            }
        }
        for (slot, mut b) in vectors.iter_mut().zip(basis) {
            orient(&mut b);
            *slot = b;
        }
    }

    let mut coords = Vec::with_capacity(n * dim);
    for i in 0..n {
        for v in &vectors[1..=dim] {
            coords.push(v[i]);
        }
    }
    Ok(SpectralEmbedding {
        coords: Matrix::new(n, dim, coords)?,
        eigenvalues: values[1..=dim].to_vec(),
    })
}

pub fn spectral_embed(g: &Graph, dim: usize) -> Result<Matrix> {
    Ok(spectral_embedding(g, dim)?.coords)
}

fn orient(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

pub const MAX_MEAN_ATTEMPTS: usize = 10_000;

/// `k` isotropic Gaussian blobs of `n_per` points each in `dim` dimensions.
///
/// Blob means are `separation · u` for random unit directions `u`, accepted
/// only if every pair of means is at least `separation / 2` apart. Points are
/// emitted blob by blob with their blob index as label.
pub fn synth_gmm(k: usize, n_per: usize, dim: usize, separation: f64, sigma: f64, seed: u64) -> Result<LabeledDataset> {
    if k == 0 || n_per == 0 || dim == 0 {
        return Err(Error::Config("k, points per cluster and dim must be at least 1".into()));
    }
    if !(separation > 0.0 && separation.is_finite()) || !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Config("separation and sigma must be positive".into()));
    }
    let mut rng = rng_from_seed(seed);
    let min_gap2 = (separation / 2.0).powi(2);
    let mut means: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut attempts = 0;
    while means.len() < k {
        if attempts >= MAX_MEAN_ATTEMPTS {
            return Err(Error::Config(format!(
                "could not place {k} means {separation} apart in {dim} dimensions after {MAX_MEAN_ATTEMPTS} attempts"
            )));
        }
        attempts += 1;
        let dir: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dot(&dir, &dir).sqrt();
        if norm == 0.0 {
            continue;
        }
        let mean: Vec<f64> = dir.iter().map(|v| separation * v / norm).collect();
        if means.iter().all(|m| crate::matrix::sq_dist(m, &mean) >= min_gap2) {
            means.push(mean);
        }
    }

    let mut data = Vec::with_capacity(k * n_per * dim);
    let mut labels = Vec::with_capacity(k * n_per);
    for (j, mean) in means.iter().enumerate() {
        for _ in 0..n_per {
            for m in mean {
                let z: f64 = rng.sample(StandardNormal);
                data.push(m + sigma * z);
            }
            labels.push(j);
        }
    }
    LabeledDataset::new(
        Matrix::new(k * n_per, dim, data)?,
        Some(Labeling::new(labels, k)?),
        "synth_gmm",
        format!("k={k},n={n_per},dim={dim},sep={separation},sigma={sigma},seed={seed}"),
    )
}
