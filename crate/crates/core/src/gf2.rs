//! Dense linear algebra over GF(2).
//!
//! Vectors are bit-packed into `u64` words, bit `i` of the vector living in
//! word `i / 64` at position `i % 64`. Index `0` corresponds to message `x1`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    /// The all-zero vector of length `len`.
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// The unit vector with a single one at `index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    /// Builds a vector with ones at the given positions. Repeated positions
    /// toggle, so `{1, 1}` cancels out.
    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, ones: I) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.toggle(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Packs the low `len` bits of `word` (bit `i` is position `i`).
    pub fn from_u64(len: usize, word: u64) -> Self {
        assert!(len <= WORD_BITS, "from_u64 needs len <= 64, got {len}");
        let mut v = Self::zeros(len);
        if len > 0 {
            let mask = if len == WORD_BITS { u64::MAX } else { (1u64 << len) - 1 };
            v.words[0] = word & mask;
        }
        v
    }

    /// Returns the packed first word; only meaningful when `len <= 64`.
    pub fn to_u64(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "bit index {index} out of range for length {}", self.len);
        (self.words[index / WORD_BITS] >> (index % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < self.len, "bit index {index} out of range for length {}", self.len);
        let mask = 1u64 << (index % WORD_BITS);
        if value {
            self.words[index / WORD_BITS] |= mask;
        } else {
            self.words[index / WORD_BITS] &= !mask;
        }
    }

    pub fn toggle(&mut self, index: usize) {
        assert!(index < self.len, "bit index {index} out of range for length {}", self.len);
        self.words[index / WORD_BITS] ^= 1u64 << (index % WORD_BITS);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Position of the first one, scanning from index 0.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, &w)| k * WORD_BITS + w.trailing_zeros() as usize)
    }

    /// Positions of all ones in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(k * WORD_BITS + bit)
            })
        })
    }

    /// `self += other` over GF(2).
    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Renders the vector as a message combination such as `x1+x7`
    /// (1-based names); the zero vector renders as `0`.
    pub fn combination(&self) -> String {
        let terms: Vec<String> = self.ones().map(|i| format!("x{}", i + 1)).collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }
}

impl Ord for BitVector {
    /// Lexicographic on the bit string read from index 0, with `0 < 1`.
    /// Shorter vectors order first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| {
            for (a, b) in self.words.iter().zip(&other.words) {
                let diff = a ^ b;
                if diff != 0 {
                    let bit = diff.trailing_zeros();
                    // whoever has the 1 at the first difference is larger
                    return if (a >> bit) & 1 == 1 {
                        Ordering::Greater
                    } else {
                        Ordering::Less
                    };
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    /// Parses a string of `0`/`1` characters; `_` and spaces are ignored.
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .filter(|c| *c != '_' && !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit character {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        Ok(BitVector::from_bools(&bits))
    }
}

/// A dense `r × n` matrix over GF(2), stored as rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    ncols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    /// A matrix with `ncols` columns and no rows.
    pub fn empty(ncols: usize) -> Self {
        Self {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            ncols,
            rows: vec![BitVector::zeros(ncols); nrows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            ncols: n,
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    /// Builds a matrix from rows, all of which must have `ncols` entries.
    pub fn from_rows(ncols: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch {
                expected: ncols,
                found: bad.len(),
            });
        }
        Ok(Self { ncols, rows })
    }

    /// Parses rows written as bit strings, e.g. `["1100", "0110"]`.
    pub fn parse_rows(ncols: usize, rows: &[&str]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.parse::<BitVector>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(ncols, parsed)
    }

    /// Unit rows for each listed column, in the order given.
    pub fn unit_rows<I: IntoIterator<Item = usize>>(ncols: usize, indices: I) -> Self {
        Self {
            ncols,
            rows: indices.into_iter().map(|i| BitVector::unit(ncols, i)).collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    pub fn push_row(&mut self, row: BitVector) -> Result<()> {
        if row.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    /// Vertical concatenation `[self; other]`.
    pub fn stack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if other.ncols != self.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: other.ncols,
            });
        }
        let mut rows = Vec::with_capacity(self.rows.len() + other.rows.len());
        rows.extend(self.rows.iter().cloned());
        rows.extend(other.rows.iter().cloned());
        Ok(BitMatrix {
            ncols: self.ncols,
            rows,
        })
    }

    /// Dimension of the row space.
    pub fn rank(&self) -> usize {
        let mut basis = XorBasis::new(self.ncols);
        self.rows.iter().filter(|r| basis.insert(r)).count()
    }

    /// Reduced row echelon form with all-zero rows dropped. Pivots are taken
    /// left to right (lowest column index first).
    pub fn rref(&self) -> BitMatrix {
        let mut rows: Vec<BitVector> = self.rows.clone();
        let mut pivot_row = 0;
        for col in 0..self.ncols {
            let Some(found) = (pivot_row..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(pivot_row, found);
            let pivot = rows[pivot_row].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != pivot_row && row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            pivot_row += 1;
            if pivot_row == rows.len() {
                break;
            }
        }
        rows.truncate(pivot_row);
        BitMatrix {
            ncols: self.ncols,
            rows,
        }
    }

    /// Whether `v` is a GF(2) combination of the rows.
    pub fn row_space_contains(&self, v: &BitVector) -> Result<bool> {
        if v.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: v.len(),
            });
        }
        let basis = XorBasis::from_rows(self.ncols, &self.rows);
        Ok(basis.contains(v))
    }

    /// Drops rows that are zero or dependent on earlier rows.
    pub fn independent_rows(&self) -> BitMatrix {
        let mut basis = XorBasis::new(self.ncols);
        BitMatrix {
            ncols: self.ncols,
            rows: self
                .rows
                .iter()
                .filter(|r| basis.insert(r))
                .cloned()
                .collect(),
        }
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.rows.iter().map(|r| r.to_string()).collect();
        write!(f, "{{{}}}", rows.join(", "))
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix[{}x{}]{}", self.nrows(), self.ncols, self)
    }
}

/// Incrementally built echelon basis of a subspace of GF(2)^n.
///
/// Every stored row has a distinct pivot (its first one) and no other stored
/// row has a one in that pivot column, so reduction yields a canonical
/// representative of each coset.
#[derive(Clone, Debug)]
pub struct XorBasis {
    ncols: usize,
    rows: Vec<BitVector>,
    pivots: Vec<usize>,
}

impl XorBasis {
    pub fn new(ncols: usize) -> Self {
        Self {
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_rows<'a, I: IntoIterator<Item = &'a BitVector>>(ncols: usize, rows: I) -> Self {
        let mut basis = Self::new(ncols);
        for r in rows {
            basis.insert(r);
        }
        basis
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    /// Canonical coset representative of `v` modulo the span.
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        let mut out = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if out.get(p) {
                out.xor_assign(row);
            }
        }
        out
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &BitVector) -> bool {
        debug_assert_eq!(v.len(), self.ncols);
        let reduced = self.reduce(v);
        let Some(p) = reduced.first_one() else {
            return false;
        };
        for row in &mut self.rows {
            if row.get(p) {
                row.xor_assign(&reduced);
            }
        }
        self.rows.push(reduced);
        self.pivots.push(p);
        true
    }
}
