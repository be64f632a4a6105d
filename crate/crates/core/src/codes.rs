//! Block codes `C(n, k)` over GF(q).
//!
//! Three families are supported: evaluation-form Reed–Solomon codes (MDS),
//! seeded random linear codes, and explicit codes given either as a
//! generator matrix or as a full message-to-codeword table (which may be
//! nonlinear). Messages are ordered lexicographically with the first
//! symbol most significant, so message index `i` and the table row `i`
//! refer to the same message.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldElement, FieldError};

/// Upper bound on `q^k` for anything that walks the whole code.
pub const ENUMERATION_GUARD: u64 = 1 << 20;

/// Upper bound on `q^k` for quadratic pairwise scans.
pub const PAIRWISE_GUARD: u64 = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("invalid code dimensions n = {n}, k = {k}")]
    InvalidDimensions { n: usize, k: usize },
    #[error("code length {n} exceeds field size {q}")]
    LengthExceedsField { n: usize, q: u32 },
    #[error("evaluation points are not pairwise distinct")]
    DuplicateEvalPoints,
    #[error("{what}: {size} exceeds guard {limit}")]
    GuardExceeded {
        what: &'static str,
        size: u64,
        limit: u64,
    },
    #[error("message has length {got}, expected {expected}")]
    BadMessageLength { expected: usize, got: usize },
    #[error("symbol {value} out of range for GF({q})")]
    OutOfRange { value: u32, q: u32 },
    #[error("coordinate {0} is out of range or repeated")]
    BadPosition(usize),
    #[error("{positions} positions but {symbols} symbols")]
    ArityMismatch { positions: usize, symbols: usize },
    #[error("generator matrix does not have full row rank")]
    RankDeficient,
    #[error("codeword table must hold q^k = {expected} distinct rows, got {got}")]
    NotInjective { expected: u64, got: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeKind {
    MdsRs,
    RandomLinear,
    Explicit,
}

impl CodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CodeKind::MdsRs => "mds_rs",
            CodeKind::RandomLinear => "random_linear",
            CodeKind::Explicit => "explicit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSpec {
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub d_min: usize,
    pub kind: CodeKind,
}

impl CodeSpec {
    /// `q^k`, saturating at `u64::MAX`.
    pub fn codeword_count(&self) -> u64 {
        (self.q as u64)
            .checked_pow(self.k as u32)
            .unwrap_or(u64::MAX)
    }
}

/// A codeword: exactly `n` field elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Codeword(Vec<FieldElement>);

impl Codeword {
    pub fn new(symbols: Vec<FieldElement>) -> Self {
        Codeword(symbols)
    }

    pub fn symbols(&self) -> &[FieldElement] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_symbols(self) -> Vec<FieldElement> {
        self.0
    }

    pub fn hamming_distance(&self, other: &Codeword) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&s| s != 0).count()
    }
}

impl AsRef<[FieldElement]> for Codeword {
    fn as_ref(&self) -> &[FieldElement] {
        &self.0
    }
}

/// Row-major `k x n` matrix over GF(q).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl GeneratorMatrix {
    pub fn from_rows(rows: Vec<Vec<FieldElement>>) -> Result<Self, CodeError> {
        let k = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if k == 0 || n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(CodeError::InvalidDimensions { n, k });
        }
        Ok(GeneratorMatrix {
            rows: k,
            cols: n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> FieldElement {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[FieldElement] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// Text export: header `G k n q`, then one row per line.
    pub fn to_text(&self, q: u32) -> String {
        let mut out = format!("G {} {} {}\n", self.rows, self.cols, q);
        for r in 0..self.rows {
            push_symbols(&mut out, self.row(r));
        }
        out
    }

    /// Parses the `G k n q` format, returning the matrix and `q`.
    pub fn parse(text: &str) -> Result<(Self, u32), CodeError> {
        let mut lines = content_lines(text);
        let (line_no, header) = lines.next().ok_or(CodeError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "G" {
            return Err(CodeError::Parse {
                line: line_no,
                msg: "expected header `G k n q`".into(),
            });
        }
        let nums = parse_ints(&fields[1..], line_no)?;
        let (k, n, q) = (nums[0] as usize, nums[1] as usize, nums[2] as u32);
        let mut rows = Vec::with_capacity(k);
        for (line_no, line) in lines {
            let row = parse_symbols(line, line_no, n, q)?;
            rows.push(row);
        }
        if rows.len() != k {
            return Err(CodeError::Parse {
                line: line_no,
                msg: format!("expected {k} rows, found {}", rows.len()),
            });
        }
        Ok((GeneratorMatrix::from_rows(rows)?, q))
    }
}

#[derive(Debug, Clone)]
enum Body {
    Linear(GeneratorMatrix),
    Table(Vec<Codeword>),
}

/// A block code with its encoder. Immutable after construction.
#[derive(Debug, Clone)]
pub struct BlockCode {
    spec: CodeSpec,
    field: Arc<Field>,
    body: Body,
    eval_points: Option<Vec<FieldElement>>,
    zero_columns: Vec<usize>,
}

fn guard(what: &'static str, size: u64, limit: u64) -> Result<(), CodeError> {
    if size > limit {
        Err(CodeError::GuardExceeded { what, size, limit })
    } else {
        Ok(())
    }
}

fn check_dims(n: usize, k: usize) -> Result<(), CodeError> {
    if k == 0 || k > n {
        Err(CodeError::InvalidDimensions { n, k })
    } else {
        Ok(())
    }
}

/// Row reduction of `rows` (each of width `width + augmented`) over the
/// first `width` columns. Returns `(rank, consistent)`, where consistency
/// means no reduced row is zero on the left but nonzero in the augmented
/// column.
fn row_reduce(field: &Field, rows: &mut [Vec<FieldElement>], width: usize) -> (usize, bool) {
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = field.inv_unchecked(rows[rank][col]);
        for v in rows[rank].iter_mut() {
            *v = field.mul_unchecked(*v, inv);
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let factor = rows[r][col];
                for c in 0..rows[r].len() {
                    let delta = field.mul_unchecked(factor, rows[rank][c]);
                    rows[r][c] = field.sub_unchecked(rows[r][c], delta);
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    let consistent = rows[rank..]
        .iter()
        .all(|row| row[width..].iter().all(|&v| v == 0));
    (rank, consistent)
}

impl BlockCode {
    /// Reed–Solomon code evaluated at the canonical points `0, 1, ..., n-1`.
    pub fn reed_solomon(field: Arc<Field>, n: usize, k: usize) -> Result<Self, CodeError> {
        check_dims(n, k)?;
        if n as u64 > field.order() as u64 {
            return Err(CodeError::LengthExceedsField {
                n,
                q: field.order(),
            });
        }
        let points = (0..n as u32).map(|x| x as FieldElement).collect();
        Self::reed_solomon_at(field, points, k)
    }

    /// Reed–Solomon code: symbol `j` of the codeword for message
    /// `(m_0, ..., m_{k-1})` is `sum_t m_t * points[j]^t`.
    pub fn reed_solomon_at(
        field: Arc<Field>,
        points: Vec<FieldElement>,
        k: usize,
    ) -> Result<Self, CodeError> {
        let n = points.len();
        check_dims(n, k)?;
        let q = field.order();
        if n as u64 > q as u64 {
            return Err(CodeError::LengthExceedsField { n, q });
        }
        if let Some(&bad) = points.iter().find(|&&x| x as u32 >= q) {
            return Err(CodeError::OutOfRange {
                value: bad as u32,
                q,
            });
        }
        let mut sorted = points.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != n {
            return Err(CodeError::DuplicateEvalPoints);
        }
        let rows = (0..k)
            .map(|t| {
                points
                    .iter()
                    .map(|&x| field.pow_unchecked(x, t as u32))
                    .collect()
            })
            .collect();
        let generator = GeneratorMatrix::from_rows(rows)?;
        let spec = CodeSpec {
            n,
            k,
            q,
            d_min: n - k + 1,
            kind: CodeKind::MdsRs,
        };
        Ok(Self::linear_unchecked(field, generator, spec, Some(points)))
    }

    /// A random linear code: generator sampled uniformly from full-rank
    /// `k x n` matrices by rejection, seeded. Zero columns are allowed and
    /// reported by [`BlockCode::zero_columns`].
    pub fn random_linear(
        field: Arc<Field>,
        n: usize,
        k: usize,
        seed: u64,
    ) -> Result<Self, CodeError> {
        check_dims(n, k)?;
        let q = field.order();
        let count = (q as u64).checked_pow(k as u32).unwrap_or(u64::MAX);
        guard("q^k", count, ENUMERATION_GUARD)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let generator = loop {
            let rows: Vec<Vec<FieldElement>> = (0..k)
                .map(|_| {
                    (0..n)
                        .map(|_| rng.gen_range(0..q) as FieldElement)
                        .collect()
                })
                .collect();
            let mut scratch = rows.clone();
            if row_reduce(&field, &mut scratch, n).0 == k {
                break GeneratorMatrix::from_rows(rows)?;
            }
        };
        let spec = CodeSpec {
            n,
            k,
            q,
            d_min: 0,
            kind: CodeKind::RandomLinear,
        };
        let mut code = Self::linear_unchecked(field, generator, spec, None);
        code.spec.d_min = code.linear_min_weight()?;
        Ok(code)
    }

    /// A linear code from a caller-supplied generator matrix (kind
    /// `explicit`). The matrix must have full row rank.
    pub fn from_generator(
        field: Arc<Field>,
        generator: GeneratorMatrix,
    ) -> Result<Self, CodeError> {
        let (k, n) = (generator.rows(), generator.cols());
        check_dims(n, k)?;
        let q = field.order();
        if let Some(&bad) = generator.data.iter().find(|&&x| x as u32 >= q) {
            return Err(CodeError::OutOfRange {
                value: bad as u32,
                q,
            });
        }
        let mut scratch: Vec<Vec<FieldElement>> =
            (0..k).map(|r| generator.row(r).to_vec()).collect();
        if row_reduce(&field, &mut scratch, n).0 != k {
            return Err(CodeError::RankDeficient);
        }
        let count = (q as u64).checked_pow(k as u32).unwrap_or(u64::MAX);
        guard("q^k", count, ENUMERATION_GUARD)?;
        let spec = CodeSpec {
            n,
            k,
            q,
            d_min: 0,
            kind: CodeKind::Explicit,
        };
        let mut code = Self::linear_unchecked(field, generator, spec, None);
        code.spec.d_min = code.linear_min_weight()?;
        Ok(code)
    }

    /// An explicit, possibly nonlinear code given by its full codeword
    /// table in message order. Requires `q^k <= PAIRWISE_GUARD` so the
    /// minimum distance can be computed.
    pub fn from_codewords(
        field: Arc<Field>,
        n: usize,
        k: usize,
        rows: Vec<Codeword>,
    ) -> Result<Self, CodeError> {
        check_dims(n, k)?;
        let q = field.order();
        let expected = (q as u64).checked_pow(k as u32).unwrap_or(u64::MAX);
        guard("q^k", expected, PAIRWISE_GUARD)?;
        for row in &rows {
            if row.len() != n {
                return Err(CodeError::BadMessageLength {
                    expected: n,
                    got: row.len(),
                });
            }
            if let Some(&bad) = row.symbols().iter().find(|&&x| x as u32 >= q) {
                return Err(CodeError::OutOfRange {
                    value: bad as u32,
                    q,
                });
            }
        }
        let mut sorted = rows.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if rows.len() as u64 != expected || sorted.len() != rows.len() {
            return Err(CodeError::NotInjective {
                expected,
                got: sorted.len(),
            });
        }
        let d_min = if rows.len() < 2 {
            n
        } else {
            let mut best = n;
            for (i, a) in rows.iter().enumerate() {
                for b in &rows[i + 1..] {
                    best = best.min(a.hamming_distance(b));
                }
            }
            best
        };
        let zero_columns = (0..n)
            .filter(|&j| rows.iter().all(|r| r.symbols()[j] == rows[0].symbols()[j]))
            .collect();
        Ok(BlockCode {
            spec: CodeSpec {
                n,
                k,
                q,
                d_min,
                kind: CodeKind::Explicit,
            },
            field,
            body: Body::Table(rows),
            eval_points: None,
            zero_columns,
        })
    }

    fn linear_unchecked(
        field: Arc<Field>,
        generator: GeneratorMatrix,
        spec: CodeSpec,
        eval_points: Option<Vec<FieldElement>>,
    ) -> Self {
        let zero_columns = (0..generator.cols())
            .filter(|&j| (0..generator.rows()).all(|r| generator.get(r, j) == 0))
            .collect();
        BlockCode {
            spec,
            field,
            body: Body::Linear(generator),
            eval_points,
            zero_columns,
        }
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn k(&self) -> usize {
        self.spec.k
    }

    pub fn q(&self) -> u32 {
        self.spec.q
    }

    pub fn d_min(&self) -> usize {
        self.spec.d_min
    }

    pub fn codeword_count(&self) -> u64 {
        self.spec.codeword_count()
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.body, Body::Linear(_))
    }

    pub fn generator(&self) -> Option<&GeneratorMatrix> {
        match &self.body {
            Body::Linear(g) => Some(g),
            Body::Table(_) => None,
        }
    }

    pub fn eval_points(&self) -> Option<&[FieldElement]> {
        self.eval_points.as_deref()
    }

    /// Coordinates on which every codeword carries the same symbol.
    pub fn zero_columns(&self) -> &[usize] {
        &self.zero_columns
    }

    /// Message digits for a lexicographic message index.
    pub fn message_from_index(&self, mut index: u64) -> Vec<FieldElement> {
        let q = self.q() as u64;
        let mut msg = vec![0; self.k()];
        for slot in msg.iter_mut().rev() {
            *slot = (index % q) as FieldElement;
            index /= q;
        }
        msg
    }

    pub fn message_index(&self, message: &[FieldElement]) -> u64 {
        message
            .iter()
            .fold(0u64, |acc, &s| acc * self.q() as u64 + s as u64)
    }

    fn check_message(&self, message: &[FieldElement]) -> Result<(), CodeError> {
        if message.len() != self.k() {
            return Err(CodeError::BadMessageLength {
                expected: self.k(),
                got: message.len(),
            });
        }
        if let Some(&bad) = message.iter().find(|&&s| s as u32 >= self.q()) {
            return Err(CodeError::OutOfRange {
                value: bad as u32,
                q: self.q(),
            });
        }
        Ok(())
    }

    pub fn encode(&self, message: &[FieldElement]) -> Result<Codeword, CodeError> {
        self.check_message(message)?;
        Ok(self.encode_unchecked(message))
    }

    pub(crate) fn encode_unchecked(&self, message: &[FieldElement]) -> Codeword {
        match &self.body {
            Body::Linear(_) => {
                Codeword((0..self.n()).map(|j| self.symbol_at(message, j)).collect())
            }
            Body::Table(rows) => rows[self.message_index(message) as usize].clone(),
        }
    }

    /// Codeword of the message with the given lexicographic index.
    pub fn encode_index(&self, index: u64) -> Codeword {
        match &self.body {
            Body::Table(rows) => rows[index as usize].clone(),
            Body::Linear(_) => self.encode_unchecked(&self.message_from_index(index)),
        }
    }

    /// A single coordinate of the codeword of a (valid) message.
    #[inline]
    pub fn symbol_at(&self, message: &[FieldElement], coord: usize) -> FieldElement {
        match &self.body {
            Body::Linear(g) => {
                let f = &*self.field;
                message.iter().enumerate().fold(0, |acc, (t, &m)| {
                    f.add_unchecked(acc, f.mul_unchecked(m, g.get(t, coord)))
                })
            }
            Body::Table(rows) => rows[self.message_index(message) as usize].symbols()[coord],
        }
    }

    /// All `q^k` codewords in message order.
    pub fn enumerate_codewords(&self) -> Result<Vec<Codeword>, CodeError> {
        guard("q^k", self.codeword_count(), ENUMERATION_GUARD)?;
        Ok(match &self.body {
            Body::Table(rows) => rows.clone(),
            Body::Linear(_) => (0..self.codeword_count())
                .map(|i| self.encode_index(i))
                .collect(),
        })
    }

    fn linear_min_weight(&self) -> Result<usize, CodeError> {
        guard("q^k", self.codeword_count(), ENUMERATION_GUARD)?;
        let mut best = self.n();
        for i in 1..self.codeword_count() {
            best = best.min(self.encode_index(i).weight());
            if best == 1 {
                break;
            }
        }
        Ok(best)
    }

    /// Exact minimum Hamming distance: a weight scan over the nonzero
    /// codewords for linear codes, a pairwise scan otherwise.
    pub fn min_distance(&self) -> Result<usize, CodeError> {
        match &self.body {
            Body::Linear(_) => self.linear_min_weight(),
            Body::Table(rows) => {
                guard("q^k", rows.len() as u64, PAIRWISE_GUARD)?;
                let mut best = self.n();
                for (i, a) in rows.iter().enumerate() {
                    for b in &rows[i + 1..] {
                        best = best.min(a.hamming_distance(b));
                    }
                }
                Ok(best)
            }
        }
    }

    fn check_constraints(
        &self,
        positions: &[usize],
        symbols: &[FieldElement],
    ) -> Result<(), CodeError> {
        if positions.len() != symbols.len() {
            return Err(CodeError::ArityMismatch {
                positions: positions.len(),
                symbols: symbols.len(),
            });
        }
        for (i, &p) in positions.iter().enumerate() {
            if p >= self.n() || positions[..i].contains(&p) {
                return Err(CodeError::BadPosition(p));
            }
        }
        if let Some(&bad) = symbols.iter().find(|&&s| s as u32 >= self.q()) {
            return Err(CodeError::OutOfRange {
                value: bad as u32,
                q: self.q(),
            });
        }
        Ok(())
    }

    /// Number of codewords carrying `symbols[t]` at coordinate
    /// `positions[t]` for every `t`. Linear codes solve the constraint
    /// system on the message; table codes scan.
    pub fn count_matching(
        &self,
        positions: &[usize],
        symbols: &[FieldElement],
    ) -> Result<u64, CodeError> {
        self.check_constraints(positions, symbols)?;
        match &self.body {
            Body::Linear(g) => Ok(self.linear_count(g, positions, symbols)),
            Body::Table(_) => self.count_matching_by_scan(positions, symbols),
        }
    }

    /// Table-scan route for [`BlockCode::count_matching`], available for
    /// every code within the enumeration guard.
    pub fn count_matching_by_scan(
        &self,
        positions: &[usize],
        symbols: &[FieldElement],
    ) -> Result<u64, CodeError> {
        self.check_constraints(positions, symbols)?;
        guard("q^k", self.codeword_count(), ENUMERATION_GUARD)?;
        let hits = |cw: &Codeword| {
            positions
                .iter()
                .zip(symbols)
                .all(|(&p, &s)| cw.symbols()[p] == s)
        };
        Ok(match &self.body {
            Body::Table(rows) => rows.iter().filter(|cw| hits(cw)).count() as u64,
            Body::Linear(_) => (0..self.codeword_count())
                .filter(|&i| hits(&self.encode_index(i)))
                .count() as u64,
        })
    }

    fn linear_count(
        &self,
        g: &GeneratorMatrix,
        positions: &[usize],
        symbols: &[FieldElement],
    ) -> u64 {
        let k = self.k();
        let mut rows: Vec<Vec<FieldElement>> = positions
            .iter()
            .zip(symbols)
            .map(|(&p, &s)| {
                let mut row: Vec<FieldElement> = (0..k).map(|t| g.get(t, p)).collect();
                row.push(s);
                row
            })
            .collect();
        if rows.is_empty() {
            return self.codeword_count();
        }
        let (rank, consistent) = row_reduce(&self.field, &mut rows, k);
        if consistent {
            (self.q() as u64).pow((k - rank) as u32)
        } else {
            0
        }
    }

    /// Rank of the generator columns at `positions` (linear codes only).
    pub fn column_rank(&self, positions: &[usize]) -> Option<usize> {
        let g = self.generator()?;
        if positions.is_empty() {
            return Some(0);
        }
        let mut rows: Vec<Vec<FieldElement>> = positions
            .iter()
            .map(|&p| (0..self.k()).map(|t| g.get(t, p)).collect())
            .collect();
        Some(row_reduce(&self.field, &mut rows, self.k()).0)
    }

    /// A basis of the projection of the code onto `positions`: the
    /// nonzero rows of the reduced generator columns (linear codes only).
    pub(crate) fn projection_basis(&self, positions: &[usize]) -> Option<Vec<Vec<FieldElement>>> {
        let g = self.generator()?;
        let mut rows: Vec<Vec<FieldElement>> = (0..self.k())
            .map(|t| positions.iter().map(|&p| g.get(t, p)).collect())
            .collect();
        let (rank, _) = row_reduce(&self.field, &mut rows, positions.len());
        rows.truncate(rank);
        Some(rows)
    }

    /// Codeword-table export: header `n k q`, then one codeword per line.
    pub fn to_table_text(&self) -> Result<String, CodeError> {
        let rows = self.enumerate_codewords()?;
        let mut out = format!("{} {} {}\n", self.n(), self.k(), self.q());
        for row in &rows {
            push_symbols(&mut out, row.symbols());
        }
        Ok(out)
    }

    /// Parses the `n k q` codeword-table format into an explicit code.
    pub fn parse_table(text: &str) -> Result<Self, CodeError> {
        let mut lines = content_lines(text);
        let (line_no, header) = lines.next().ok_or(CodeError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(CodeError::Parse {
                line: line_no,
                msg: "expected header `n k q`".into(),
            });
        }
        let nums = parse_ints(&fields, line_no)?;
        let (n, k, q) = (nums[0] as usize, nums[1] as usize, nums[2] as u32);
        let field = Arc::new(Field::new(q)?);
        let rows = lines
            .map(|(no, line)| parse_symbols(line, no, n, q).map(Codeword))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_codewords(field, n, k, rows)
    }
}

fn push_symbols(out: &mut String, symbols: &[FieldElement]) {
    for (i, s) in symbols.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{s}");
    }
    out.push('\n');
}

pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_ints(fields: &[&str], line: usize) -> Result<Vec<u64>, CodeError> {
    fields
        .iter()
        .map(|f| {
            f.parse::<u64>().map_err(|_| CodeError::Parse {
                line,
                msg: format!("`{f}` is not a non-negative integer"),
            })
        })
        .collect()
}

fn parse_symbols(
    line: &str,
    line_no: usize,
    n: usize,
    q: u32,
) -> Result<Vec<FieldElement>, CodeError> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != n {
        return Err(CodeError::Parse {
            line: line_no,
            msg: format!("expected {n} symbols, found {}", fields.len()),
        });
    }
    let nums = parse_ints(&fields, line_no)?;
    nums.into_iter()
        .map(|v| {
            if v < q as u64 {
                Ok(v as FieldElement)
            } else {
                Err(CodeError::OutOfRange { value: v as u32, q })
            }
        })
        .collect()
}
