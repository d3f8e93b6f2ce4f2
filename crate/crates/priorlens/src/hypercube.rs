//! Input sets on the Boolean hypercube and bit-packed output patterns.
//!
//! Everything downstream of this module agrees on one canonical ordering:
//! input index `i` of an n-dimensional cube is the point whose coordinates
//! are the binary digits of `i` read most-significant-first. Coordinate 0
//! therefore carries bit `n-1` of the index, and the last coordinate toggles
//! fastest as `i` counts up. Complexity estimates, rank curves and condition
//! trees all turn truth tables into strings through this order; changing it
//! silently would make none of them comparable.
//!
//! Output patterns are stored bit-packed in little-endian 64-bit words so
//! that equality, hashing and popcount stay word-wise even when campaigns
//! hash hundreds of millions of patterns.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest dimension for which a full hypercube is materialized. 2^20 rows of
/// 20 floats is ~168 MB; past that the dense representation stops being
/// sensible.
pub const MAX_CUBE_DIM: usize = 20;

/// Which vertex embedding a constructed cube uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubeKind {
    /// Vertices in {0,1}^n.
    ZeroOne,
    /// Vertices in {-1,+1}^n, the centered image of [`CubeKind::ZeroOne`].
    PlusMinusOne,
}

/// Provenance of an input set. Fast paths and restriction semantics key off
/// this tag rather than re-deriving structure from the raw rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputLabel {
    /// The full {0,1}^n cube in canonical order.
    Hypercube01,
    /// The full {-1,+1}^n cube in canonical order.
    HypercubePm1,
    /// A seeded subsample of a full cube (distinct rows, ascending index).
    Subsample,
    /// Rows loaded from an external file; no structure assumed.
    External,
}

/// An ordered m×n matrix of evaluation points.
///
/// Immutable after construction; safe to share across worker threads.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSet {
    n: usize,
    m: usize,
    label: InputLabel,
    /// Row-major storage: point i occupies `data[i*n .. (i+1)*n]`.
    data: Vec<f64>,
}

impl InputSet {
    /// Input dimension n.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of points m.
    pub fn len(&self) -> usize {
        self.m
    }

    /// True when the set holds no points (never produced by constructors).
    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Provenance tag.
    pub fn label(&self) -> InputLabel {
        self.label
    }

    /// Point `i` as a coordinate slice of length n.
    ///
    /// # Panics
    /// Panics when `i >= len()`.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Iterator over all points in order.
    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n)
    }

    /// Builds an input set from explicit rows; used by the CSV loader and by
    /// tests that need hand-placed points. All rows must share one dimension
    /// and every entry must be finite.
    pub fn from_rows(rows: &[Vec<f64>], label: InputLabel) -> Result<InputSet> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("input set needs at least one row".into()));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::InvalidArgument("input rows must have dimension >= 1".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::InvalidArgument(format!("row {i} contains a non-finite entry")));
                }
                data.push(v);
            }
        }
        Ok(InputSet { n, m: rows.len(), label, data })
    }
}

/// Coordinates of cube vertex `index` in canonical (most-significant-first)
/// order, written into `out` (length n). Coordinate j receives bit `n-1-j`.
fn write_vertex(index: u64, n: usize, kind: CubeKind, out: &mut [f64]) {
    for (j, slot) in out.iter_mut().enumerate() {
        let bit = (index >> (n - 1 - j)) & 1;
        *slot = match kind {
            CubeKind::ZeroOne => bit as f64,
            CubeKind::PlusMinusOne => 2.0 * bit as f64 - 1.0,
        };
    }
}

/// Builds a full hypercube input set, or a seeded subsample of one.
///
/// Vertex `i` of the full cube is `bin(i)` most-significant-bit first, so for
/// n=2 the {0,1} cube reads (0,0), (0,1), (1,0), (1,1). Subsampling draws
/// `size` distinct vertices uniformly without replacement, deterministically
/// in `seed`, and keeps them in ascending index order.
///
/// # Errors
/// Dimension outside [1, 20], subsample size 0 or exceeding 2^n.
pub fn build_input_set(
    n: usize,
    kind: CubeKind,
    subsample: Option<(usize, u64)>,
) -> Result<InputSet> {
    if n == 0 || n > MAX_CUBE_DIM {
        return Err(Error::InvalidArgument(format!(
            "cube dimension {n} outside supported range 1..={MAX_CUBE_DIM}"
        )));
    }
    let full = 1u64 << n;
    let (indices, label): (Vec<u64>, InputLabel) = match subsample {
        None => (
            (0..full).collect(),
            match kind {
                CubeKind::ZeroOne => InputLabel::Hypercube01,
                CubeKind::PlusMinusOne => InputLabel::HypercubePm1,
            },
        ),
        Some((size, seed)) => {
            if size == 0 {
                return Err(Error::InvalidArgument("subsample size must be >= 1".into()));
            }
            if size as u64 > full {
                return Err(Error::InvalidArgument(format!(
                    "subsample size {size} exceeds 2^{n} = {full}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // Floyd's algorithm: `size` distinct values from [0, full) using
            // O(size) memory regardless of n.
            let mut chosen: HashSet<u64> = HashSet::with_capacity(size);
            for j in (full - size as u64)..full {
                let r = rand::Rng::random_range(&mut rng, 0..=j);
                if !chosen.insert(r) {
                    chosen.insert(j);
                }
            }
            let mut indices: Vec<u64> = chosen.into_iter().collect();
            indices.sort_unstable();
            (indices, InputLabel::Subsample)
        }
    };
    let m = indices.len();
    let mut data = vec![0.0; m * n];
    for (row, &idx) in indices.iter().enumerate() {
        write_vertex(idx, n, kind, &mut data[row * n..(row + 1) * n]);
    }
    Ok(InputSet { n, m, label, data })
}

/// Loads an input set from a comma-separated numeric file: one point per
/// line, no header, rectangular. Row order is preserved and the result is
/// labeled [`InputLabel::External`].
///
/// # Errors
/// Empty file, ragged rows, or non-numeric cells (reported with the
/// offending 1-based row index).
pub fn load_input_set(path: &Path) -> Result<InputSet> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_input_csv(&text)
}

/// Parses CSV text into an input set; see [`load_input_set`].
pub fn parse_input_csv(text: &str) -> Result<InputSet> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for cell in line.split(',') {
            let v: f64 = cell.trim().parse().map_err(|_| {
                Error::Parse(format!("row {}: non-numeric cell {:?}", lineno + 1, cell.trim()))
            })?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("row {}: non-finite value", lineno + 1)));
            }
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse(format!(
                    "row {}: {} cells, expected {} (ragged file)",
                    lineno + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("input file holds no rows".into()));
    }
    InputSet::from_rows(&rows, InputLabel::External)
}

/// A bit-packed output vector of a network over an [`InputSet`]; the unit of
/// function identity. Bit `i` is the output on point `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutputPattern {
    m: usize,
    /// Little-endian words: bit i of the pattern is bit `i % 64` of word
    /// `i / 64`.
    words: Vec<u64>,
}

impl OutputPattern {
    /// All-zero pattern of length m.
    pub fn zeros(m: usize) -> OutputPattern {
        OutputPattern { m, words: vec![0; m.div_ceil(64)] }
    }

    /// Builds a pattern from explicit bits.
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> OutputPattern {
        let mut words = Vec::new();
        let mut m = 0;
        for b in bits {
            if m % 64 == 0 {
                words.push(0u64);
            }
            if b {
                *words.last_mut().expect("word pushed above") |= 1u64 << (m % 64);
            }
            m += 1;
        }
        OutputPattern { m, words }
    }

    /// Parses a pattern from a string of '0'/'1' characters (reading order =
    /// canonical input order). Convenience for tests and the CLI.
    pub fn from_bit_str(s: &str) -> Result<OutputPattern> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(Error::Parse(format!("pattern strings use only 0/1, got {c:?}"))),
            }
        }
        if bits.is_empty() {
            return Err(Error::Parse("empty pattern string".into()));
        }
        Ok(OutputPattern::from_bits(bits))
    }

    /// Length m of the pattern.
    pub fn len(&self) -> usize {
        self.m
    }

    /// True when the pattern has zero length (not produced by constructors).
    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Bit `i`.
    ///
    /// # Panics
    /// Panics when `i >= len()`.
    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.m, "bit index {i} out of range for pattern of length {}", self.m);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Sets bit `i`.
    pub fn set_bit(&mut self, i: usize, value: bool) {
        assert!(i < self.m, "bit index {i} out of range for pattern of length {}", self.m);
        if value {
            self.words[i / 64] |= 1u64 << (i % 64);
        } else {
            self.words[i / 64] &= !(1u64 << (i % 64));
        }
    }

    /// Number of inputs mapped to 1 (popcount).
    pub fn t_value(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Binary entropy of the fraction t/m; see [`binary_entropy`].
    pub fn entropy(&self) -> f64 {
        binary_entropy(self.t_value() as f64 / self.m as f64)
    }

    /// The bitwise complement (same length).
    pub fn complement(&self) -> OutputPattern {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        mask_tail(&mut words, self.m);
        OutputPattern { m: self.m, words }
    }

    /// The pattern with bit order reversed (bit i of the result is bit
    /// m-1-i of the input).
    pub fn reversed(&self) -> OutputPattern {
        OutputPattern::from_bits((0..self.m).rev().map(|i| self.bit(i)))
    }

    /// Restriction to the sub-hypercube spanned by the masked coordinates
    /// with all unselected coordinates pinned to 0. Requires the pattern to
    /// live on the full {0,1}^n cube (`m = 2^n`). The result has `2^k` bits
    /// for a k-coordinate mask, in canonical order over the selected
    /// coordinates.
    ///
    /// # Errors
    /// Pattern length not `2^n`, or mask referencing coordinates `>= n`.
    pub fn restrict(&self, n: usize, mask: &SubsetMask) -> Result<OutputPattern> {
        if n == 0 || n > MAX_CUBE_DIM || self.m != 1usize << n {
            return Err(Error::InvalidArgument(format!(
                "restrict needs a full 2^n-bit pattern; got m={} for n={n}",
                self.m
            )));
        }
        mask.validate(n)?;
        let k = mask.coords().len();
        let mut bits = Vec::with_capacity(1usize << k);
        for s in 0..(1usize << k) {
            let mut global = 0usize;
            for (pos, &coord) in mask.coords().iter().enumerate() {
                if (s >> (k - 1 - pos)) & 1 == 1 {
                    global |= 1usize << (n - 1 - coord);
                }
            }
            bits.push(self.bit(global));
        }
        Ok(OutputPattern::from_bits(bits))
    }

    /// Lowercase hex of the packed bits, little-endian bytes: byte j holds
    /// bits 8j..8j+8 of the pattern, least-significant bit first. Length is
    /// stated alongside in any serialized form because trailing zero bits are
    /// not self-describing.
    pub fn to_hex(&self) -> String {
        let nbytes = self.m.div_ceil(8);
        let mut out = String::with_capacity(nbytes * 2);
        for j in 0..nbytes {
            let byte = (self.words[j / 8] >> ((j % 8) * 8)) & 0xff;
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }

    /// Inverse of [`OutputPattern::to_hex`] given the stated length.
    ///
    /// # Errors
    /// Hex length inconsistent with `m`, bad hex digits, or set bits beyond
    /// `m`.
    pub fn from_hex(hex: &str, m: usize) -> Result<OutputPattern> {
        let nbytes = m.div_ceil(8);
        if hex.len() != nbytes * 2 {
            return Err(Error::Parse(format!(
                "hex pattern of length {} does not match m={m} ({} bytes expected)",
                hex.len(),
                nbytes
            )));
        }
        let mut words = vec![0u64; m.div_ceil(64)];
        for j in 0..nbytes {
            let byte = u8::from_str_radix(&hex[2 * j..2 * j + 2], 16)
                .map_err(|_| Error::Parse(format!("bad hex byte at position {}", 2 * j)))?;
            words[j / 8] |= (byte as u64) << ((j % 8) * 8);
        }
        let mut checked = words.clone();
        mask_tail(&mut checked, m);
        if checked != words {
            return Err(Error::Parse("hex pattern has bits set beyond stated length".into()));
        }
        Ok(OutputPattern { m, words })
    }

    /// The pattern as a '0'/'1' string in canonical order.
    pub fn to_bit_str(&self) -> String {
        (0..self.m).map(|i| if self.bit(i) { '1' } else { '0' }).collect()
    }

    /// Raw packed words (little-endian); exposed for byte-order tie-breaking
    /// in rank curves.
    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

/// Zeroes bits at positions >= m in the final word.
fn mask_tail(words: &mut [u64], m: usize) {
    let rem = m % 64;
    if rem != 0 {
        if let Some(last) = words.last_mut() {
            *last &= (1u64 << rem) - 1;
        }
    }
}

/// Binary entropy H(q) = -q log2 q - (1-q) log2 (1-q) in bits, with the
/// limit convention H(0) = H(1) = 0.
pub fn binary_entropy(q: f64) -> f64 {
    if q <= 0.0 || q >= 1.0 {
        return 0.0;
    }
    -q * q.log2() - (1.0 - q) * (1.0 - q).log2()
}

/// A selector over coordinates defining a sub-hypercube through the origin.
/// Coordinates are 0-indexed in canonical order (coordinate 0 is the
/// most-significant index bit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetMask {
    coords: Vec<usize>,
}

impl SubsetMask {
    /// Builds a mask from distinct coordinate indices; stored ascending.
    ///
    /// # Errors
    /// Empty or duplicated coordinate list.
    pub fn new(mut coords: Vec<usize>) -> Result<SubsetMask> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("subset mask needs at least one coordinate".into()));
        }
        coords.sort_unstable();
        if coords.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("subset mask coordinates must be distinct".into()));
        }
        Ok(SubsetMask { coords })
    }

    /// Selected coordinates, ascending.
    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    /// Checks the mask against a dimension.
    pub fn validate(&self, n: usize) -> Result<()> {
        if let Some(&worst) = self.coords.last() {
            if worst >= n {
                return Err(Error::InvalidArgument(format!(
                    "mask coordinate {worst} out of range for dimension {n}"
                )));
            }
        }
        Ok(())
    }
}
