//! Derived vertex-weight dimensions for benchmark instances.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hypergraph::Hypergraph;

use super::{content_lines, parse_error, parse_int, FormatError, FormatResult};

/// Where a group of weight dimensions comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightSource {
    /// The weights stored in the input file.
    Input,
    /// 1 per vertex.
    Unit,
    /// Number of incident edges.
    Degree,
    /// Whitespace-separated integer columns, one line per vertex.
    File(PathBuf),
    /// `dims` columns of integers drawn uniformly from `lo..=hi`.
    Random { dims: usize, lo: i64, hi: i64, seed: u64 },
}

/// A comma-separated list of [`WeightSource`]s, concatenated in order.
///
/// ```
/// use mcpart::io::WeightSpec;
/// let spec: WeightSpec = "unit,degree,rand:3:1:100".parse().unwrap();
/// assert_eq!(spec.sources().len(), 3);
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSpec(Vec<WeightSource>);

impl WeightSpec {
    pub fn input() -> Self {
        Self(vec![WeightSource::Input])
    }

    pub fn unit_degree() -> Self {
        Self(vec![WeightSource::Unit, WeightSource::Degree])
    }

    pub fn sources(&self) -> &[WeightSource] {
        &self.0
    }
}

impl FromStr for WeightSpec {
    type Err = FormatError;

    fn from_str(s: &str) -> FormatResult<Self> {
        let invalid = |m: String| FormatError::Invalid(m);
        let mut sources = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let source = match part {
                "input" => WeightSource::Input,
                "unit" => WeightSource::Unit,
                "degree" => WeightSource::Degree,
                _ if part.starts_with("file:") && part.len() > 5 => WeightSource::File(PathBuf::from(&part[5..])),
                _ if part.starts_with("rand:") => {
                    let fields: Vec<&str> = part[5..].split(':').collect();
                    if !(3..=4).contains(&fields.len()) {
                        return Err(invalid(format!("`{part}`: expected rand:d:lo:hi[:seed]")));
                    }
                    let num = |t: &str| -> FormatResult<i64> {
                        t.parse().map_err(|_| invalid(format!("`{part}`: `{t}` is not an integer")))
                    };
                    let dims = num(fields[0])?;
                    let (lo, hi) = (num(fields[1])?, num(fields[2])?);
                    let seed = match fields.get(3) {
                        Some(t) => t.parse().map_err(|_| invalid(format!("`{part}`: bad seed `{t}`")))?,
                        None => 0,
                    };
                    if dims < 1 || lo < 0 || lo > hi {
                        return Err(invalid(format!("`{part}`: need d >= 1 and 0 <= lo <= hi")));
                    }
                    WeightSource::Random {
                        dims: dims as usize,
                        lo,
                        hi,
                        seed,
                    }
                }
                _ => {
                    return Err(invalid(format!(
                        "unknown weight source `{part}` (input, unit, degree, file:PATH, rand:d:lo:hi[:seed])"
                    )))
                }
            };
            sources.push(source);
        }
        Ok(Self(sources))
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            match s {
                WeightSource::Input => f.write_str("input")?,
                WeightSource::Unit => f.write_str("unit")?,
                WeightSource::Degree => f.write_str("degree")?,
                WeightSource::File(p) => write!(f, "file:{}", p.display())?,
                WeightSource::Random { dims, lo, hi, seed } => write!(f, "rand:{dims}:{lo}:{hi}:{seed}")?,
            }
        }
        Ok(())
    }
}

fn read_columns(path: &Path, n: usize) -> FormatResult<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::with_capacity(n);
    let mut last = 1;
    for (line, l) in content_lines(&text) {
        last = line;
        if l.trim().is_empty() {
            continue;
        }
        let row = l
            .split_whitespace()
            .map(|t| {
                let w: i64 = parse_int(t, line, "vertex weight")?;
                if w < 0 {
                    return Err(parse_error(line, format!("vertex weight {w} is negative")));
                }
                Ok(w as f64)
            })
            .collect::<FormatResult<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            let first: &Vec<f64> = first;
            if first.len() != row.len() {
                return Err(parse_error(line, format!("expected {} weights, found {}", first.len(), row.len())));
            }
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(parse_error(last, format!("expected {n} weight lines, found {}", rows.len())));
    }
    Ok(rows)
}

/// Returns a copy of `hg` whose weights are the concatenation of the sources
/// of `spec`.
pub fn derive_weights(hg: &Hypergraph, spec: &WeightSpec) -> FormatResult<Hypergraph> {
    let n = hg.num_vertices();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for source in spec.sources() {
        match source {
            WeightSource::Input => {
                for j in 0..hg.dims() {
                    columns.push((0..n).map(|v| hg.weight(v)[j]).collect());
                }
            }
            WeightSource::Unit => columns.push(vec![1.0; n]),
            WeightSource::Degree => columns.push((0..n).map(|v| hg.degree(v) as f64).collect()),
            WeightSource::File(path) => {
                let rows = read_columns(path, n)?;
                let c = rows.first().map_or(0, Vec::len);
                for j in 0..c {
                    columns.push(rows.iter().map(|r| r[j]).collect());
                }
            }
            &WeightSource::Random { dims, lo, hi, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut block = vec![vec![0.0; n]; dims];
                for v in 0..n {
                    for col in block.iter_mut() {
                        col[v] = rng.gen_range(lo..=hi) as f64;
                    }
                }
                columns.extend(block);
            }
        }
    }
    if columns.is_empty() {
        return Err(FormatError::Invalid("weight spec yields no dimensions".into()));
    }
    let d = columns.len();
    let mut flat = Vec::with_capacity(n * d);
    for v in 0..n {
        flat.extend(columns.iter().map(|c| c[v]));
    }
    Ok(hg.with_weights(d, flat)?)
}
