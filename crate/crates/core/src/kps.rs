//! Key assignment and discovery.
//!
//! Every authority `m` hands each node a distinct `k`-symbol ID, which the
//! block code turns into part `m` of the node's key-index ID. Coordinate
//! `i` of the full `M·n` key-index ID, carrying symbol `α`, selects key
//! `f(i) = α·M·n + i` from a single pool of `M·n·q` keys; authority `m`
//! owns the references whose coordinate lies in `[m·n, (m+1)·n)`.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{content_lines, BlockCode, CodeError};
use crate::field::FieldElement;

/// Largest key pool [`make_key_pool`] will materialise.
pub const MAX_POOL: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KpsError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("{nodes} nodes exceed the ID space of {capacity}")]
    TooManyNodes { nodes: u64, capacity: u64 },
    #[error("expected length {expected}, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("key-index IDs of lengths {0} and {1} cannot be compared")]
    LengthMismatch(usize, usize),
    #[error("key pool of {0} keys exceeds the limit")]
    PoolTooLarge(u64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Index into the global key pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KeyRef(pub u64);

impl KeyRef {
    /// Splits the reference back into `(symbol, coordinate)`.
    pub fn decompose(self, authorities: usize, n: usize) -> (u64, usize) {
        let width = (authorities * n) as u64;
        (self.0 / width, (self.0 % width) as usize)
    }

    /// The authority owning this reference.
    pub fn authority(self, authorities: usize, n: usize) -> usize {
        self.decompose(authorities, n).1 / n
    }
}

/// A node's `M·n` key-index symbols, split into `M` parts of `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KeyIndexId {
    symbols: Vec<FieldElement>,
    parts: usize,
}

impl KeyIndexId {
    pub fn new(symbols: Vec<FieldElement>, parts: usize) -> Result<Self, KpsError> {
        if parts == 0 || !symbols.len().is_multiple_of(parts) || symbols.is_empty() {
            return Err(KpsError::BadLength {
                expected: parts.max(1),
                got: symbols.len(),
            });
        }
        Ok(KeyIndexId { symbols, parts })
    }

    pub fn symbols(&self) -> &[FieldElement] {
        &self.symbols
    }

    pub fn parts(&self) -> usize {
        self.parts
    }

    pub fn part_len(&self) -> usize {
        self.symbols.len() / self.parts
    }

    pub fn part(&self, m: usize) -> &[FieldElement] {
        let n = self.part_len();
        &self.symbols[m * n..(m + 1) * n]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRecord {
    pub node_index: usize,
    /// One `k`-symbol ID per authority.
    pub id_parts: Vec<Vec<FieldElement>>,
    pub key_index: KeyIndexId,
    pub key_refs: Vec<KeyRef>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeploymentParams {
    pub nodes: usize,
    pub authorities: usize,
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub q_prime: u64,
}

/// How an authority hands out IDs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdPolicy {
    /// Uniform without replacement, one seeded stream per authority.
    #[default]
    Uniform,
    /// Node `j` gets message `j` from every authority.
    Sequential,
}

/// A deployed network: the code, one record per node and the key
/// alphabet size. Immutable once built.
#[derive(Debug, Clone)]
pub struct Deployment {
    params: DeploymentParams,
    code: Option<Arc<BlockCode>>,
    nodes: Vec<NodeRecord>,
}

/// Concatenates the encodings of each ID part.
pub fn derive_key_index(
    id_parts: &[Vec<FieldElement>],
    code: &BlockCode,
) -> Result<KeyIndexId, KpsError> {
    if id_parts.is_empty() {
        return Err(KpsError::BadLength {
            expected: code.k(),
            got: 0,
        });
    }
    let mut symbols = Vec::with_capacity(id_parts.len() * code.n());
    for part in id_parts {
        if part.len() != code.k() {
            return Err(KpsError::BadLength {
                expected: code.k(),
                got: part.len(),
            });
        }
        symbols.extend_from_slice(code.encode(part)?.symbols());
    }
    KeyIndexId::new(symbols, id_parts.len())
}

/// `{ α_i·M·n + i : 0 <= i < M·n }`, in coordinate order.
pub fn key_refs(ki: &KeyIndexId, authorities: usize, n: usize) -> Result<Vec<KeyRef>, KpsError> {
    let width = authorities * n;
    if ki.symbols().len() != width {
        return Err(KpsError::BadLength {
            expected: width,
            got: ki.symbols().len(),
        });
    }
    Ok(ki
        .symbols()
        .iter()
        .enumerate()
        .map(|(i, &a)| KeyRef(a as u64 * width as u64 + i as u64))
        .collect())
}

/// References of the keys two nodes share: one per coordinate where their
/// key-index IDs agree, in coordinate order.
pub fn discover_common(a: &KeyIndexId, b: &KeyIndexId) -> Result<Vec<KeyRef>, KpsError> {
    let (sa, sb) = (a.symbols(), b.symbols());
    if sa.len() != sb.len() {
        return Err(KpsError::LengthMismatch(sa.len(), sb.len()));
    }
    let width = sa.len() as u64;
    Ok(sa
        .iter()
        .zip(sb)
        .enumerate()
        .filter(|(_, (x, y))| x == y)
        .map(|(i, (&x, _))| KeyRef(x as u64 * width + i as u64))
        .collect())
}

fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

/// Per-node storage in bits: `M·n·⌈log2 q⌉ + M·n·⌈log2 q'⌉`.
pub fn storage_bits(authorities: usize, n: usize, q: u64, q_prime: u64) -> u64 {
    let symbols = (authorities * n) as u64;
    symbols * ceil_log2(q) + symbols * ceil_log2(q_prime)
}

/// The global pool of `M·n·q` placeholder keys in `[0, q')`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPool {
    keys: Vec<u64>,
    authorities: usize,
    n: usize,
}

impl KeyPool {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, r: KeyRef) -> Option<u64> {
        self.keys.get(r.0 as usize).copied()
    }

    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    /// Pool indices owned by authority `m`, ascending.
    pub fn authority_slice(&self, m: usize) -> Vec<usize> {
        (0..self.keys.len())
            .filter(|&idx| KeyRef(idx as u64).authority(self.authorities, self.n) == m)
            .collect()
    }
}

fn authority_rng(seed: u64, m: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(m as u64);
    rng
}

/// Each authority fills its own references from an independent stream.
pub fn make_key_pool(
    authorities: usize,
    n: usize,
    q: u64,
    q_prime: u64,
    seed: u64,
) -> Result<KeyPool, KpsError> {
    if authorities == 0 || n == 0 || q == 0 || q_prime == 0 {
        return Err(KpsError::InvalidParams(
            "pool dimensions must be positive".into(),
        ));
    }
    let width = (authorities * n) as u64;
    let size = width.saturating_mul(q);
    if size > MAX_POOL {
        return Err(KpsError::PoolTooLarge(size));
    }
    let mut keys = vec![0u64; size as usize];
    for m in 0..authorities {
        let mut rng = authority_rng(seed, m);
        for alpha in 0..q {
            for i in m * n..(m + 1) * n {
                keys[(alpha * width + i as u64) as usize] = rng.gen_range(0..q_prime);
            }
        }
    }
    Ok(KeyPool {
        keys,
        authorities,
        n,
    })
}

/// Assigns IDs with the default uniform policy.
pub fn assign_node_ids(
    nodes: usize,
    authorities: usize,
    code: Arc<BlockCode>,
    q_prime: u64,
    seed: u64,
) -> Result<Deployment, KpsError> {
    Deployment::build(nodes, authorities, code, q_prime, seed, IdPolicy::Uniform)
}

impl Deployment {
    pub fn build(
        nodes: usize,
        authorities: usize,
        code: Arc<BlockCode>,
        q_prime: u64,
        seed: u64,
        policy: IdPolicy,
    ) -> Result<Self, KpsError> {
        if authorities == 0 || q_prime == 0 {
            return Err(KpsError::InvalidParams(
                "authorities and q' must be at least 1".into(),
            ));
        }
        let capacity = code.codeword_count();
        if nodes as u64 > capacity {
            return Err(KpsError::TooManyNodes {
                nodes: nodes as u64,
                capacity,
            });
        }
        if capacity > usize::MAX as u64 {
            return Err(KpsError::InvalidParams("ID space too large".into()));
        }
        // messages[m][j]: message index authority m assigns to node j
        let messages: Vec<Vec<u64>> = (0..authorities)
            .map(|m| match policy {
                IdPolicy::Sequential => (0..nodes as u64).collect(),
                IdPolicy::Uniform => {
                    let mut rng = authority_rng(seed, m);
                    index::sample(&mut rng, capacity as usize, nodes)
                        .into_iter()
                        .map(|x| x as u64)
                        .collect()
                }
            })
            .collect();

        let n = code.n();
        let mut records = Vec::with_capacity(nodes);
        for j in 0..nodes {
            let id_parts: Vec<Vec<FieldElement>> = messages
                .iter()
                .map(|per_auth| code.message_from_index(per_auth[j]))
                .collect();
            let key_index = derive_key_index(&id_parts, &code)?;
            let refs = key_refs(&key_index, authorities, n)?;
            records.push(NodeRecord {
                node_index: j,
                id_parts,
                key_index,
                key_refs: refs,
            });
        }
        Ok(Deployment {
            params: DeploymentParams {
                nodes,
                authorities,
                n,
                k: code.k(),
                q: code.q(),
                q_prime,
            },
            code: Some(code),
            nodes: records,
        })
    }

    pub fn params(&self) -> &DeploymentParams {
        &self.params
    }

    /// The code, when known (deployments parsed without one have none).
    pub fn code(&self) -> Option<&Arc<BlockCode>> {
        self.code.as_ref()
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn node(&self, index: usize) -> Option<&NodeRecord> {
        self.nodes.get(index)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn authorities(&self) -> usize {
        self.params.authorities
    }

    pub fn storage_bits(&self) -> u64 {
        let p = &self.params;
        storage_bits(p.authorities, p.n, p.q as u64, p.q_prime)
    }

    /// Line-based export: header `N M n k q q_prime`, then per node its
    /// index, the `M·k` ID symbols and the `M·n` key-index symbols.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut out = format!(
            "{} {} {} {} {} {}\n",
            p.nodes, p.authorities, p.n, p.k, p.q, p.q_prime
        );
        for node in &self.nodes {
            let _ = write!(out, "{}", node.node_index);
            for s in node.id_parts.iter().flatten() {
                let _ = write!(out, " {s}");
            }
            for s in node.key_index.symbols() {
                let _ = write!(out, " {s}");
            }
            out.push('\n');
        }
        out
    }

    /// Inverse of [`Deployment::to_text`]. With a code, the parameters and
    /// every key-index ID are checked against it.
    pub fn parse(text: &str, code: Option<Arc<BlockCode>>) -> Result<Self, KpsError> {
        let perr = |line: usize, msg: String| KpsError::Parse { line, msg };
        let mut lines = content_lines(text);
        let (hline, header) = lines
            .next()
            .ok_or_else(|| perr(1, "missing header".into()))?;
        let h = parse_u64s(header, hline)?;
        if h.len() != 6 {
            return Err(perr(hline, "expected header `N M n k q q_prime`".into()));
        }
        let params = DeploymentParams {
            nodes: h[0] as usize,
            authorities: h[1] as usize,
            n: h[2] as usize,
            k: h[3] as usize,
            q: h[4] as u32,
            q_prime: h[5],
        };
        if params.authorities == 0 || params.n == 0 || params.k == 0 || params.q < 2 {
            return Err(perr(hline, "degenerate parameters".into()));
        }
        if let Some(code) = &code {
            if (code.n(), code.k(), code.q()) != (params.n, params.k, params.q) {
                return Err(perr(hline, "parameters do not match the code".into()));
            }
        }
        let (m, n, k) = (params.authorities, params.n, params.k);
        let mut records = Vec::with_capacity(params.nodes);
        for (line_no, line) in lines {
            let vals = parse_u64s(line, line_no)?;
            if vals.len() != 1 + m * k + m * n {
                return Err(perr(
                    line_no,
                    format!("expected {} fields", 1 + m * k + m * n),
                ));
            }
            if vals[0] as usize != records.len() {
                return Err(perr(
                    line_no,
                    format!("node index {} out of order", vals[0]),
                ));
            }
            if let Some(&bad) = vals[1..].iter().find(|&&v| v >= params.q as u64) {
                return Err(perr(line_no, format!("symbol {bad} out of range")));
            }
            let id_parts: Vec<Vec<FieldElement>> = vals[1..1 + m * k]
                .chunks(k)
                .map(|c| c.iter().map(|&v| v as FieldElement).collect())
                .collect();
            let ki_symbols: Vec<FieldElement> = vals[1 + m * k..]
                .iter()
                .map(|&v| v as FieldElement)
                .collect();
            let key_index = KeyIndexId::new(ki_symbols, m)?;
            if let Some(code) = &code {
                if derive_key_index(&id_parts, code)? != key_index {
                    return Err(perr(
                        line_no,
                        "key-index ID is not the encoding of the ID".into(),
                    ));
                }
            }
            let refs = key_refs(&key_index, m, n)?;
            records.push(NodeRecord {
                node_index: records.len(),
                id_parts,
                key_index,
                key_refs: refs,
            });
        }
        if records.len() != params.nodes {
            return Err(perr(
                hline,
                format!(
                    "header declares {} nodes, found {}",
                    params.nodes,
                    records.len()
                ),
            ));
        }
        for a in 0..m {
            let mut ids: Vec<&Vec<FieldElement>> = records.iter().map(|r| &r.id_parts[a]).collect();
            ids.sort_unstable();
            if ids.windows(2).any(|w| w[0] == w[1]) {
                return Err(perr(
                    hline,
                    format!("authority {a} assigned a duplicate ID"),
                ));
            }
        }
        Ok(Deployment {
            params,
            code,
            nodes: records,
        })
    }
}

fn parse_u64s(line: &str, line_no: usize) -> Result<Vec<u64>, KpsError> {
    line.split_whitespace()
        .map(|f| {
            f.parse::<u64>().map_err(|_| KpsError::Parse {
                line: line_no,
                msg: format!("`{f}` is not a non-negative integer"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn rs_4_123() -> Arc<BlockCode> {
        let f = Arc::new(Field::new(4).unwrap());
        Arc::new(BlockCode::reed_solomon_at(f, vec![1, 2, 3], 2).unwrap())
    }

    #[test]
    fn key_index_and_refs() {
        let code = rs_4_123();
        let ki = derive_key_index(&[vec![1, 2]], &code).unwrap();
        assert_eq!(ki.symbols(), &[3, 2, 0]);
        let refs = key_refs(&ki, 1, 3).unwrap();
        assert_eq!(refs, vec![KeyRef(9), KeyRef(7), KeyRef(2)]);

        let zero = derive_key_index(&[vec![0, 0], vec![0, 0]], &code).unwrap();
        assert_eq!(zero.symbols(), &[0; 6]);
        let zero1 = derive_key_index(&[vec![0, 0]], &code).unwrap();
        assert_eq!(
            key_refs(&zero1, 1, 3).unwrap(),
            vec![KeyRef(0), KeyRef(1), KeyRef(2)]
        );

        let two = derive_key_index(&[vec![1, 2], vec![0, 1]], &code).unwrap();
        let mut expect = vec![3, 2, 0];
        expect.extend_from_slice(code.encode(&[0, 1]).unwrap().symbols());
        assert_eq!(two.symbols(), &expect[..]);
        assert_eq!(two.part(1), &expect[3..]);

        assert!(matches!(
            derive_key_index(&[vec![1]], &code),
            Err(KpsError::BadLength {
                expected: 2,
                got: 1
            })
        ));
        assert!(matches!(
            key_refs(&ki, 2, 3),
            Err(KpsError::BadLength { .. })
        ));
    }

    #[test]
    fn two_authority_reference() {
        // symbol 1 at coordinate 4 with M = 2, n = 3
        let ki = KeyIndexId::new(vec![0, 0, 0, 0, 1, 0], 2).unwrap();
        let refs = key_refs(&ki, 2, 3).unwrap();
        assert_eq!(refs[4], KeyRef(10));
        assert_eq!(KeyRef(10).decompose(2, 3), (1, 4));
        assert_eq!(KeyRef(10).authority(2, 3), 1);
    }

    #[test]
    fn discovery() {
        let a = KeyIndexId::new(vec![3, 2, 0], 1).unwrap();
        let b = KeyIndexId::new(vec![3, 0, 1], 1).unwrap();
        assert_eq!(discover_common(&a, &b).unwrap(), vec![KeyRef(9)]);
        assert_eq!(discover_common(&b, &a).unwrap(), vec![KeyRef(9)]);
        assert_eq!(
            discover_common(&a, &a).unwrap(),
            key_refs(&a, 1, 3).unwrap()
        );
        let c = KeyIndexId::new(vec![3, 0, 1, 1, 1, 1], 2).unwrap();
        assert_eq!(discover_common(&a, &c), Err(KpsError::LengthMismatch(3, 6)));
    }

    #[test]
    fn storage() {
        assert_eq!(storage_bits(1, 30, 32, 64), 330);
        assert_eq!(storage_bits(3, 30, 32, 64), 990);
        assert_eq!(storage_bits(1, 1, 2, 2), 2);
        // non powers of two round up
        assert_eq!(storage_bits(1, 2, 5, 3), 2 * 3 + 2 * 2);
    }

    #[test]
    fn pools() {
        let p = make_key_pool(2, 3, 4, 64, 9).unwrap();
        assert_eq!(p.len(), 24);
        assert_eq!(p, make_key_pool(2, 3, 4, 64, 9).unwrap());
        assert!(p.keys().iter().all(|&k| k < 64));
        let (s0, s1) = (p.authority_slice(0), p.authority_slice(1));
        assert_eq!(s0.len() + s1.len(), 24);
        assert!(s0.iter().all(|i| !s1.contains(i)));
        assert!(s0.iter().all(|&i| (i % 6) < 3));
        assert_eq!(
            make_key_pool(1, 1 << 12, 1 << 13, 2, 0),
            Err(KpsError::PoolTooLarge(1 << 25))
        );
    }

    #[test]
    fn assignment() {
        let code = rs_4_123();
        let d = assign_node_ids(16, 2, code.clone(), 16, 3).unwrap();
        for m in 0..2 {
            let mut ids: Vec<_> = d.nodes().iter().map(|r| r.id_parts[m].clone()).collect();
            ids.sort();
            ids.dedup();
            assert_eq!(ids.len(), 16);
        }
        assert!(matches!(
            assign_node_ids(17, 1, code.clone(), 16, 3),
            Err(KpsError::TooManyNodes {
                nodes: 17,
                capacity: 16
            })
        ));
        let f = Arc::new(Field::new(32).unwrap());
        let big = Arc::new(BlockCode::reed_solomon(f, 30, 2).unwrap());
        let d = assign_node_ids(1000, 3, big, 64, 1).unwrap();
        assert_eq!(d.storage_bits(), 990);
        assert!(d.nodes().iter().all(|r| r.key_refs.len() == 90));
    }

    #[test]
    fn sequential_policy() {
        let code = rs_4_123();
        let d = Deployment::build(4, 1, code.clone(), 2, 0, IdPolicy::Sequential).unwrap();
        assert_eq!(d.node(1).unwrap().id_parts[0], vec![0, 1]);
        assert_eq!(
            d.node(3).unwrap().key_index.symbols(),
            code.encode(&[0, 3]).unwrap().symbols()
        );
    }

    #[test]
    fn export_round_trip() {
        let code = rs_4_123();
        let d = assign_node_ids(10, 2, code.clone(), 64, 5).unwrap();
        let text = d.to_text();
        assert!(text.starts_with("10 2 3 2 4 64\n"));
        let back = Deployment::parse(&text, Some(code.clone())).unwrap();
        assert_eq!(back.nodes(), d.nodes());
        assert_eq!(back.to_text(), text);
        let bare = Deployment::parse(&text, None).unwrap();
        assert_eq!(bare.to_text(), text);
    }

    #[test]
    fn import_rejects_bad_files() {
        let code = rs_4_123();
        assert!(Deployment::parse("2 1 3 2 4 64\n0 1 2 3 2 0\n", None).is_err());
        // wrong encoding
        let bad = "1 1 3 2 4 64\n0 1 2 3 2 1\n";
        assert!(Deployment::parse(bad, None).is_ok());
        assert!(Deployment::parse(bad, Some(code)).is_err());
        // duplicate IDs
        assert!(Deployment::parse("2 1 3 2 4 64\n0 1 2 3 2 0\n1 1 2 3 2 0\n", None).is_err());
        // out of range symbol
        assert!(Deployment::parse("1 1 3 2 4 64\n0 1 5 3 2 0\n", None).is_err());
    }
}
