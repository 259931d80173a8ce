//! The planted lower-bound instances: two bicliques with sparse random cross
//! edges (`Yes`), optionally with a random subset `C′` of `C` completed to
//! `A ∪ B` (`No`), plus the triangle-free padding used to vary `n`.

use crate::generators::complete_bipartite;
use crate::graph::{Graph, Vertex};
use crate::rng::Seed;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardError {
    #[error("m = {0} is not a perfect square")]
    NotSquare(u64),
    #[error("violates t ≥ m·log2(n)/8: t = {t} but m·log2(n)/8 = {bound}")]
    TooFewTriangles { t: u64, bound: f64 },
    #[error("violates t ≤ m^(3/2)/128: t = {t} but m^(3/2)/128 = {bound}")]
    TooManyTriangles { t: u64, bound: f64 },
    #[error("unknown flavor {0:?} (expected yes or no)")]
    UnknownFlavor(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Yes,
    No,
}

impl std::fmt::Display for Flavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Flavor::Yes => "yes",
            Flavor::No => "no",
        })
    }
}

impl std::str::FromStr for Flavor {
    type Err = HardError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "yes" => Ok(Flavor::Yes),
            "no" => Ok(Flavor::No),
            _ => Err(HardError::UnknownFlavor(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardInstanceSpec {
    pub m: u64,
    pub t: u64,
    pub flavor: Flavor,
    pub seed: Seed,
}

fn exact_sqrt(m: u64) -> Option<u64> {
    let r = (m as f64).sqrt().round() as u64;
    (r * r == m).then_some(r)
}

impl HardInstanceSpec {
    pub fn new(m: u64, t: u64, flavor: Flavor, seed: impl Into<Seed>) -> Self {
        Self {
            m,
            t,
            flavor,
            seed: seed.into(),
        }
    }

    pub fn with_flavor(mut self, flavor: Flavor) -> Self {
        self.flavor = flavor;
        self
    }

    /// `√m`, when `m` is a perfect square.
    pub fn side(&self) -> Option<u64> {
        exact_sqrt(self.m)
    }

    /// `4√m`.
    pub fn n(&self) -> Option<usize> {
        self.side().map(|s| 4 * s as usize)
    }

    pub fn validate(&self) -> Result<(), HardError> {
        let n = self.n().ok_or(HardError::NotSquare(self.m))?;
        let m = self.m as f64;
        let lower = m * (n as f64).log2() / 8.0;
        if (self.t as f64) < lower {
            return Err(HardError::TooFewTriangles { t: self.t, bound: lower });
        }
        let upper = m.powf(1.5) / 128.0;
        if self.t as f64 > upper {
            return Err(HardError::TooManyTriangles { t: self.t, bound: upper });
        }
        Ok(())
    }

    /// Probability of each cross edge between `A ∪ B` and `C`.
    pub fn cross_probability(&self) -> f64 {
        (self.t as f64 / (16.0 * (self.m as f64).powf(1.5))).sqrt()
    }

    /// Rate at which members of `C` join `C′` in the `No` flavor.
    pub fn c_prime_rate(&self) -> f64 {
        (32.0 * self.t as f64 / (self.m as f64).powf(1.5)).min(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Part {
    A,
    B,
    C,
    CPrime,
    D,
}

/// One label per vertex of the base instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionLabels {
    pub labels: Vec<Part>,
}

impl PartitionLabels {
    pub fn count(&self, part: Part) -> usize {
        self.labels.iter().filter(|&&p| p == part).count()
    }

    pub fn members(&self, part: Part) -> Vec<Vertex> {
        (0..self.labels.len() as Vertex).filter(|&v| self.labels[v as usize] == part).collect()
    }

    /// `|C|` before `C′` was split off.
    pub fn original_c(&self) -> usize {
        self.count(Part::C) + self.count(Part::CPrime)
    }
}

/// Generate an instance. Randomness is split into three streams (labels,
/// cross edges, `C′`), so the two flavors with one seed share everything but
/// the `C′` completion.
pub fn gen_hard(spec: &HardInstanceSpec) -> Result<(Graph, PartitionLabels), HardError> {
    spec.validate()?;
    let n = spec.n().expect("validated");
    let mut label_rng = spec.seed.stream(0);
    let mut labels: Vec<Part> = (0..n)
        .map(|_| [Part::A, Part::B, Part::C, Part::D][label_rng.gen_range(0..4)])
        .collect();
    let of = |labels: &[Part], p: Part| -> Vec<Vertex> { (0..n as Vertex).filter(|&v| labels[v as usize] == p).collect() };
    let (a, b, c, d) = (of(&labels, Part::A), of(&labels, Part::B), of(&labels, Part::C), of(&labels, Part::D));
    let mut ab: Vec<Vertex> = a.iter().chain(&b).copied().collect();
    ab.sort_unstable();

    let mut edges: Vec<(Vertex, Vertex)> = Vec::with_capacity(2 * spec.m as usize);
    edges.extend(a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))));
    edges.extend(c.iter().flat_map(|&x| d.iter().map(move |&y| (x, y))));

    let q = spec.cross_probability();
    let mut cross_rng = spec.seed.stream(1);
    for &x in &ab {
        for &y in &c {
            if cross_rng.gen_bool(q) {
                edges.push((x, y));
            }
        }
    }

    if spec.flavor == Flavor::No {
        let r = spec.c_prime_rate();
        let mut c_prime_rng = spec.seed.stream(2);
        for &y in &c {
            if c_prime_rng.gen_bool(r) {
                labels[y as usize] = Part::CPrime;
                edges.extend(ab.iter().map(|&x| (x, y)));
            }
        }
    }
    let g = Graph::from_edges(n, edges).expect("generated edges are valid");
    Ok((g, PartitionLabels { labels }))
}

/// Structural audit of a generated instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub a: usize,
    pub b: usize,
    /// `|C|` including `C′`.
    pub c: usize,
    pub c_prime: usize,
    pub d: usize,
    pub edges: usize,
    pub triangles: u64,
    /// Every part within `[√m/2, 2√m]`.
    pub parts_ok: bool,
    /// Edge count within `[m/4, 16m]`.
    pub edges_ok: bool,
    /// `T ≤ t` for `Yes`, `T ≥ 2t` for `No`.
    pub triangles_ok: bool,
    /// `C′` empty for `Yes`; `|C′| ∈ [8t/m, 64t/m]` for `No`.
    pub c_prime_ok: bool,
    /// Informational: `|C′| ≤ 32t/m`, the tighter upper limit also found in
    /// the literature.
    pub c_prime_within_32: bool,
    pub pass: bool,
}

pub fn validate_instance(g: &Graph, labels: &PartitionLabels, spec: &HardInstanceSpec) -> ValidationReport {
    let side = (spec.m as f64).sqrt();
    let (m, t) = (spec.m as f64, spec.t as f64);
    let a = labels.count(Part::A);
    let b = labels.count(Part::B);
    let c = labels.original_c();
    let c_prime = labels.count(Part::CPrime);
    let d = labels.count(Part::D);
    let edges = g.edge_count();
    let triangles = g.count_triangles_exact();
    let parts_ok = [a, b, c, d]
        .iter()
        .all(|&s| (side / 2.0..=2.0 * side).contains(&(s as f64)));
    let edges_ok = (m / 4.0..=16.0 * m).contains(&(edges as f64));
    let (triangles_ok, c_prime_ok) = match spec.flavor {
        Flavor::Yes => (triangles as f64 <= t, c_prime == 0),
        Flavor::No => (
            triangles as f64 >= 2.0 * t,
            (8.0 * t / m..=64.0 * t / m).contains(&(c_prime as f64)),
        ),
    };
    let c_prime_within_32 = c_prime as f64 <= 32.0 * t / m;
    ValidationReport {
        a,
        b,
        c,
        c_prime,
        d,
        edges,
        triangles,
        parts_ok,
        edges_ok,
        triangles_ok,
        c_prime_ok,
        c_prime_within_32,
        pass: parts_ok && edges_ok && triangles_ok && c_prime_ok,
    }
}

/// A hard instance padded with a triangle-free biclique `K_{s,s}`,
/// `s = ⌈√t⌉`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaddedSpec {
    pub base: HardInstanceSpec,
    pub pad_side: usize,
}

impl PaddedSpec {
    pub fn new(base: HardInstanceSpec) -> Self {
        let mut s = (base.t as f64).sqrt() as usize;
        while (s as u64) * (s as u64) < base.t {
            s += 1;
        }
        while s > 0 && ((s - 1) as u64) * ((s - 1) as u64) >= base.t {
            s -= 1;
        }
        Self { base, pad_side: s }
    }
}

/// The base instance followed by the padding biclique on fresh vertices.
/// Labels cover the base vertices only.
pub fn gen_padded(ps: &PaddedSpec) -> Result<(Graph, PartitionLabels), HardError> {
    let (g, labels) = gen_hard(&ps.base)?;
    Ok((g.disjoint_union(&complete_bipartite(ps.pad_side, ps.pad_side)), labels))
}
