//! Seeded instance streams and corpus directories.

use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::canon::{complex_from_triangles, connected_complexes, Triangle, MAX_CANON_VERTICES};
use crate::complex::Complex;
use crate::format::write_sc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `n_triangles` distinct 3-sets drawn uniformly, redrawn until connected.
    RandomPure2,
    /// One representative per isomorphism class with at most `n_vertices`
    /// vertices and at most `n_triangles` triangles.
    EnumerateAll,
    /// Random complexes as in `RandomPure2`, subdivided this many times.
    SubdivideDepth(u32),
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::RandomPure2 => write!(f, "random-pure-2"),
            Mode::EnumerateAll => write!(f, "enumerate-all"),
            Mode::SubdivideDepth(k) => write!(f, "subdivide-depth-{k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub seed: u64,
    pub n_vertices: usize,
    pub n_triangles: usize,
    pub mode: Mode,
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "seed={} n_vertices={} n_triangles={} mode={}",
            self.seed, self.n_vertices, self.n_triangles, self.mode
        )
    }
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("infeasible parameters: {0}")]
    Parameter(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn binomial3(n: usize) -> usize {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Deterministic stream of complexes for `spec`. Random modes are endless;
/// `EnumerateAll` is finite.
pub fn generate(spec: &GeneratorSpec) -> Result<Generator, GenerateError> {
    if spec.n_triangles == 0 {
        return Err(GenerateError::Parameter(
            "n_triangles must be positive".into(),
        ));
    }
    if spec.n_triangles > binomial3(spec.n_vertices) {
        return Err(GenerateError::Parameter(format!(
            "{} triangles do not fit on {} vertices",
            spec.n_triangles, spec.n_vertices
        )));
    }
    let inner = match spec.mode {
        Mode::EnumerateAll => {
            if spec.n_vertices > MAX_CANON_VERTICES {
                return Err(GenerateError::Parameter(format!(
                    "enumeration supports at most {MAX_CANON_VERTICES} vertices"
                )));
            }
            Inner::Listed(connected_complexes(spec.n_vertices, spec.n_triangles).into_iter())
        }
        Mode::RandomPure2 | Mode::SubdivideDepth(_) => {
            Inner::Random(Box::new(ChaCha8Rng::seed_from_u64(spec.seed)))
        }
    };
    Ok(Generator {
        spec: *spec,
        inner,
        last_retries: 0,
    })
}

enum Inner {
    Random(Box<ChaCha8Rng>),
    Listed(std::vec::IntoIter<Vec<Triangle>>),
}

pub struct Generator {
    spec: GeneratorSpec,
    inner: Inner,
    last_retries: u64,
}

impl Generator {
    /// Rejected draws before the most recent random complex.
    pub fn last_retries(&self) -> u64 {
        self.last_retries
    }
}

fn triangles_connected(tris: &[Triangle]) -> bool {
    let mut reached = vec![false; tris.len()];
    reached[0] = true;
    let mut stack = vec![0];
    while let Some(i) = stack.pop() {
        for j in 0..tris.len() {
            if !reached[j] && tris[i].iter().any(|v| tris[j].contains(v)) {
                reached[j] = true;
                stack.push(j);
            }
        }
    }
    reached.into_iter().all(|r| r)
}

fn triple_at(n: usize, mut rank: usize) -> Triangle {
    for a in 0..n {
        for b in a + 1..n {
            let rest = n - b - 1;
            if rank < rest {
                return [a as u8, b as u8, (b + 1 + rank) as u8];
            }
            rank -= rest;
        }
    }
    unreachable!("rank below C(n, 3)")
}

impl Iterator for Generator {
    type Item = Complex;

    fn next(&mut self) -> Option<Complex> {
        let spec = self.spec;
        match &mut self.inner {
            Inner::Listed(it) => it.next().map(|t| complex_from_triangles(&t)),
            Inner::Random(rng) => {
                let total = binomial3(spec.n_vertices);
                let mut retries = 0;
                let tris = loop {
                    let mut tris: Vec<Triangle> = sample(rng.as_mut(), total, spec.n_triangles)
                        .into_iter()
                        .map(|r| triple_at(spec.n_vertices, r))
                        .collect();
                    tris.sort_unstable();
                    if triangles_connected(&tris) {
                        break tris;
                    }
                    retries += 1;
                };
                self.last_retries = retries;
                // unused vertices are dropped; ids follow first appearance
                let rows: Vec<Vec<String>> = tris
                    .iter()
                    .map(|t| t.iter().map(|v| v.to_string()).collect())
                    .collect();
                let mut k = Complex::from_facets(rows).expect("nonempty");
                if let Mode::SubdivideDepth(depth) = spec.mode {
                    k = subdivide(&k, depth);
                }
                Some(k)
            }
        }
    }
}

pub fn subdivide(k: &Complex, depth: u32) -> Complex {
    (0..depth).fold(k.clone(), |k, _| k.barycentric_subdivision())
}

/// Writes `count` instances (fewer if the stream ends) as `NNNN.sc` files
/// and a `manifest.txt` naming the generator parameters and each fingerprint.
pub fn write_corpus(
    dir: &Path,
    spec: &GeneratorSpec,
    count: usize,
) -> Result<usize, GenerateError> {
    fs::create_dir_all(dir)?;
    let mut generator = generate(spec)?;
    let mut manifest = format!("# {spec}\n");
    let mut written = 0;
    while written < count {
        let Some(k) = generator.next() else { break };
        let name = format!("{written:04}.sc");
        fs::write(dir.join(&name), write_sc(&k))?;
        manifest.push_str(&format!("{name} {}", k.fingerprint()));
        if !matches!(spec.mode, Mode::EnumerateAll) {
            manifest.push_str(&format!(" retries={}", generator.last_retries()));
        }
        manifest.push('\n');
        written += 1;
    }
    fs::write(dir.join("manifest.txt"), manifest)?;
    Ok(written)
}
