//! Resilience of key sharing against colluding nodes.
//!
//! A pair of nodes is secure against a collusion when at some coordinate
//! both nodes carry the same symbol and no colluder carries it there. The
//! number `D` of secure pairs of codewords is obtained by
//! inclusion–exclusion over coordinate subsets: for `j` coordinates the
//! pairs agreeing on all of them with collusion-free symbols number
//! `sum over symbol tuples of C(H, 2)`, where `H` counts the codewords
//! carrying that tuple. Two distinct codewords agree on at most
//! `n - d_min` coordinates, so the outer sum stops there.

use std::collections::HashMap;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{BlockCode, CodeError, Codeword, PAIRWISE_GUARD};
use crate::field::FieldElement;

/// Upper bound on the number of coordinate subsets visited by
/// [`exact_pair_count`].
pub const SUBSET_GUARD: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResilienceError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("expected length {expected}, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("{what}: {size} exceeds guard {limit}")]
    GuardExceeded {
        what: &'static str,
        size: u64,
        limit: u64,
    },
    #[error("population of {population} cannot hold a pair and {r} colluders")]
    PopulationTooSmall { population: u64, r: usize },
}

/// Where colluders are drawn from relative to the evaluated pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColluderPlacement {
    /// Colluders never include either node of the pair.
    #[default]
    Disjoint,
    /// Colluders are drawn from the whole population; a pair containing
    /// a colluder is never secure.
    Anywhere,
}

/// Per-coordinate sets of symbols held by none of the colluders, for one
/// authority part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollusionFreeSets {
    q: u32,
    free: Vec<Vec<bool>>,
}

impl CollusionFreeSets {
    /// Every symbol free at every coordinate (no colluders).
    pub fn full(n: usize, q: u32) -> Self {
        CollusionFreeSets {
            q,
            free: vec![vec![true; q as usize]; n],
        }
    }

    /// Builds the sets from explicit membership masks.
    pub fn from_masks(q: u32, free: Vec<Vec<bool>>) -> Result<Self, ResilienceError> {
        if let Some(bad) = free.iter().find(|m| m.len() != q as usize) {
            return Err(ResilienceError::BadLength {
                expected: q as usize,
                got: bad.len(),
            });
        }
        Ok(CollusionFreeSets { q, free })
    }

    pub fn n(&self) -> usize {
        self.free.len()
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn contains(&self, coord: usize, symbol: FieldElement) -> bool {
        self.free[coord][symbol as usize]
    }

    pub fn symbols(&self, coord: usize) -> Vec<FieldElement> {
        (0..self.q as usize)
            .filter(|&s| self.free[coord][s])
            .map(|s| s as FieldElement)
            .collect()
    }

    pub fn size(&self, coord: usize) -> usize {
        self.free[coord].iter().filter(|&&f| f).count()
    }

    /// Pointwise subset relation.
    pub fn is_subset_of(&self, other: &CollusionFreeSets) -> bool {
        self.free
            .iter()
            .zip(&other.free)
            .all(|(a, b)| a.iter().zip(b).all(|(&x, &y)| !x || y))
    }
}

/// `U[i] = [0, q)` minus the colluders' symbols at coordinate `i`.
pub fn collusion_free_sets<S: AsRef<[FieldElement]>>(
    colluders: &[S],
    n: usize,
    q: u32,
) -> Result<CollusionFreeSets, ResilienceError> {
    let mut sets = CollusionFreeSets::full(n, q);
    for c in colluders {
        let c = c.as_ref();
        if c.len() != n {
            return Err(ResilienceError::BadLength {
                expected: n,
                got: c.len(),
            });
        }
        for (i, &s) in c.iter().enumerate() {
            if (s as u32) < q {
                sets.free[i][s as usize] = false;
            }
        }
    }
    Ok(sets)
}

fn choose2(h: u64) -> u64 {
    h * h.saturating_sub(1) / 2
}

/// `C(n, r)` as a float.
pub fn binomial(n: u64, r: u64) -> f64 {
    if r > n {
        return 0.0;
    }
    let r = r.min(n - r);
    (0..r).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64)
}

/// `C(x, r) / C(y, r)` for `x <= y`, as a running product.
fn binomial_ratio(x: u64, y: u64, r: usize) -> f64 {
    let r = r as u64;
    if x < r {
        return 0.0;
    }
    (0..r).fold(1.0, |acc, t| acc * (x - t) as f64 / (y - t) as f64)
}

/// All `j`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, j: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if j > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..j).collect();
    loop {
        out.push(cur.clone());
        let Some(pos) = (0..j).rev().find(|&p| cur[p] != p + n - j) else {
            return out;
        };
        cur[pos] += 1;
        for p in pos + 1..j {
            cur[p] = cur[p - 1] + 1;
        }
    }
}

fn check_sets(code: &BlockCode, u: &CollusionFreeSets) -> Result<(), ResilienceError> {
    if u.n() != code.n() || u.q() != code.q() {
        return Err(ResilienceError::BadLength {
            expected: code.n(),
            got: u.n(),
        });
    }
    Ok(())
}

/// `sum over tuples in prod U[W] of C(H_W(tuple), 2)`.
fn agreeing_pairs_on(
    code: &BlockCode,
    u: &CollusionFreeSets,
    positions: &[usize],
    codebook: &std::sync::OnceLock<Vec<Codeword>>,
) -> Result<u64, CodeError> {
    let lists: Vec<Vec<FieldElement>> = positions.iter().map(|&p| u.symbols(p)).collect();
    let tuples = lists
        .iter()
        .try_fold(1u64, |acc, l| acc.checked_mul(l.len() as u64))
        .unwrap_or(u64::MAX);
    if tuples == 0 {
        return Ok(0);
    }
    if let Some(basis) = code.projection_basis(positions) {
        // Each word of the projected subspace has q^(k - rank) preimages.
        let q = code.q() as u64;
        let span = q.pow(basis.len() as u32);
        let h = choose2(q.pow((code.k() - basis.len()) as u32));
        if tuples == q.pow(positions.len() as u32) {
            return Ok(span * h);
        }
        if span < tuples {
            return Ok(image_hits(code, u, positions, &basis) * h);
        }
    }
    if tuples <= code.codeword_count() {
        let mut digits = vec![0usize; lists.len()];
        let mut tuple: Vec<FieldElement> = lists.iter().map(|l| l[0]).collect();
        let mut total = 0u64;
        loop {
            total += choose2(code.count_matching(positions, &tuple)?);
            // mixed-radix increment
            let mut p = lists.len();
            loop {
                if p == 0 {
                    return Ok(total);
                }
                p -= 1;
                digits[p] += 1;
                if digits[p] < lists[p].len() {
                    tuple[p] = lists[p][digits[p]];
                    break;
                }
                digits[p] = 0;
                tuple[p] = lists[p][0];
            }
        }
    }
    // More tuples than codewords: histogram the projections instead.
    let words = match codebook.get() {
        Some(w) => w,
        None => {
            let w = code.enumerate_codewords()?;
            let _ = codebook.set(w);
            codebook.get().expect("just set")
        }
    };
    let mut hist: HashMap<Vec<FieldElement>, u64> = HashMap::new();
    for w in words {
        let proj: Vec<FieldElement> = positions.iter().map(|&p| w.symbols()[p]).collect();
        if positions.iter().zip(&proj).all(|(&p, &s)| u.contains(p, s)) {
            *hist.entry(proj).or_default() += 1;
        }
    }
    Ok(hist.values().map(|&h| choose2(h)).sum())
}

/// Words of the span of `basis` whose symbols all lie in `u` at `positions`.
fn image_hits(
    code: &BlockCode,
    u: &CollusionFreeSets,
    positions: &[usize],
    basis: &[Vec<FieldElement>],
) -> u64 {
    let field = code.field();
    let q = code.q() as usize;
    let mut coeff = vec![0usize; basis.len()];
    let mut word = vec![0 as FieldElement; positions.len()];
    let inside = |w: &[FieldElement]| positions.iter().zip(w).all(|(&p, &s)| u.contains(p, s));
    let mut hits = inside(&word) as u64;
    loop {
        let mut b = basis.len();
        // mixed-radix step; the word is updated by the change in one coefficient
        loop {
            if b == 0 {
                return hits;
            }
            b -= 1;
            let old = coeff[b] as FieldElement;
            coeff[b] = (coeff[b] + 1) % q;
            let new = coeff[b] as FieldElement;
            for (x, &g) in word.iter_mut().zip(&basis[b]) {
                let delta =
                    field.sub_unchecked(field.mul_unchecked(new, g), field.mul_unchecked(old, g));
                *x = field.add_unchecked(*x, delta);
            }
            if coeff[b] != 0 {
                break;
            }
        }
        hits += inside(&word) as u64;
    }
}

/// Exact number of secure codeword pairs by inclusion–exclusion over
/// coordinate subsets of size `1..=n-d_min`.
pub fn exact_pair_count(code: &BlockCode, u: &CollusionFreeSets) -> Result<u64, ResilienceError> {
    check_sets(code, u)?;
    let n = code.n();
    let depth = n - code.d_min();
    let visited: u64 = (1..=depth)
        .map(|j| binomial(n as u64, j as u64) as u64)
        .sum();
    if visited > SUBSET_GUARD {
        return Err(ResilienceError::GuardExceeded {
            what: "coordinate subsets",
            size: visited,
            limit: SUBSET_GUARD,
        });
    }
    let codebook = std::sync::OnceLock::new();
    let mut d: i128 = 0;
    for j in 1..=depth {
        let level: u64 = combinations(n, j)
            .par_iter()
            .map(|w| agreeing_pairs_on(code, u, w, &codebook))
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
        if j % 2 == 1 {
            d += level as i128;
        } else {
            d -= level as i128;
        }
    }
    debug_assert!(d >= 0);
    Ok(d as u64)
}

/// Inclusion–exclusion carried past `n - d_min`, up to `max_depth`
/// coordinates. Exists to check that the truncated terms vanish.
pub fn pair_count_to_depth(
    code: &BlockCode,
    u: &CollusionFreeSets,
    max_depth: usize,
) -> Result<i128, ResilienceError> {
    check_sets(code, u)?;
    let codebook = std::sync::OnceLock::new();
    let mut d: i128 = 0;
    for j in 1..=max_depth.min(code.n()) {
        let mut level = 0u64;
        for w in combinations(code.n(), j) {
            level += agreeing_pairs_on(code, u, &w, &codebook)?;
        }
        d += if j % 2 == 1 {
            level as i128
        } else {
            -(level as i128)
        };
    }
    Ok(d)
}

/// Secure pairs among an explicit list of words, by direct pairwise scan.
pub fn pair_count_among<S: AsRef<[FieldElement]> + Sync>(
    words: &[S],
    u: &CollusionFreeSets,
) -> u64 {
    (0..words.len())
        .into_par_iter()
        .map(|i| {
            let a = words[i].as_ref();
            words[i + 1..]
                .iter()
                .filter(|b| {
                    a.iter()
                        .zip(b.as_ref())
                        .enumerate()
                        .any(|(c, (x, y))| x == y && u.contains(c, *x))
                })
                .count() as u64
        })
        .sum()
}

/// Independent oracle for [`exact_pair_count`]: tests every unordered
/// pair of codewords.
pub fn brute_force_pair_count(
    code: &BlockCode,
    u: &CollusionFreeSets,
) -> Result<u64, ResilienceError> {
    check_sets(code, u)?;
    let count = code.codeword_count();
    if count > PAIRWISE_GUARD {
        return Err(ResilienceError::GuardExceeded {
            what: "q^k",
            size: count,
            limit: PAIRWISE_GUARD,
        });
    }
    let words = code.enumerate_codewords()?;
    let slices: Vec<&[FieldElement]> = words.iter().map(|w| w.symbols()).collect();
    Ok(pair_count_among(&slices, u))
}

/// MDS collapse of the inclusion–exclusion: every `j <= k` positions are
/// matched by exactly `q^(k-j)` codewords, so the tuple sum is
/// `|prod U| * C(q^(k-j), 2)`.
pub fn mds_pair_count(code: &BlockCode, u: &CollusionFreeSets) -> Result<u64, ResilienceError> {
    check_sets(code, u)?;
    let (n, k, q) = (code.n(), code.k(), code.q() as u64);
    let mut d: i128 = 0;
    for j in 1..k {
        let pairs = choose2(q.pow((k - j) as u32));
        let mut level: u128 = 0;
        for w in combinations(n, j) {
            let tuples: u128 = w.iter().map(|&p| u.size(p) as u128).product();
            level += tuples * pairs as u128;
        }
        d += if j % 2 == 1 {
            level as i128
        } else {
            -(level as i128)
        };
    }
    Ok(d as u64)
}

/// `D / C(q^k, 2)`.
pub fn resilience_probability(d: f64, q: u32, k: usize) -> f64 {
    let total = (q as f64).powi(k as i32);
    if total < 2.0 {
        return 0.0;
    }
    d / (total * (total - 1.0) / 2.0)
}

/// `1 - (1 - p)^M`: the probability that at least one of `M` independent
/// parts succeeds.
pub fn multi_authority(p: f64, authorities: usize) -> f64 {
    // p * sum_{t<M} (1-p)^t, exact at M = 1
    let miss = 1.0 - p;
    let mut term = 1.0;
    let mut sum = 0.0;
    for _ in 0..authorities {
        sum += term;
        term *= miss;
    }
    p * sum
}

/// Average number of collusion-free symbols per coordinate, `q(1 - 1/q)^r`.
pub fn expected_free_symbols(q: u32, r: usize) -> f64 {
    let q = q as f64;
    q * (1.0 - 1.0 / q).powi(r as i32)
}

/// Average secure-pair count of an MDS `(n, k)-q` code under `r`
/// colluders: `sum_{j=1}^{k-1} (-1)^{j-1} u^j C(n, j) C(q^(k-j), 2)`.
pub fn mds_average_pair_count(n: usize, k: usize, q: u32, r: usize) -> f64 {
    let u = expected_free_symbols(q, r);
    (1..k)
        .map(|j| {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            let h = (q as f64).powi((k - j) as i32);
            sign * u.powi(j as i32) * binomial(n as u64, j as u64) * h * (h - 1.0) / 2.0
        })
        .sum()
}

/// Fraction of codeword pairs sharing at least one symbol position.
pub fn sharing_probability(code: &BlockCode) -> Result<f64, ResilienceError> {
    let d = exact_pair_count(code, &CollusionFreeSets::full(code.n(), code.q()))?;
    Ok(resilience_probability(d as f64, code.q(), code.k()))
}

/// `sum over nonempty T ⊆ A of (-1)^{|T|-1} C(avoid(T), r) / C(pool, r)`:
/// the chance that some agreeing coordinate escapes every colluder.
fn secure_given_agreement(
    agreement_len: usize,
    mut avoid: impl FnMut(&[usize]) -> u64,
    pool: u64,
    r: usize,
) -> f64 {
    let mut total = 0.0;
    let mut subset = Vec::with_capacity(agreement_len);
    for mask in 1u32..(1u32 << agreement_len) {
        subset.clear();
        subset.extend((0..agreement_len).filter(|&t| mask >> t & 1 == 1));
        let term = binomial_ratio(avoid(&subset), pool, r);
        if subset.len() % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn pool_size(
    population: u64,
    r: usize,
    placement: ColluderPlacement,
) -> Result<u64, ResilienceError> {
    let offset = match placement {
        ColluderPlacement::Disjoint => 2,
        ColluderPlacement::Anywhere => 0,
    };
    if population < 2 || population - offset.min(population) < r as u64 {
        return Err(ResilienceError::PopulationTooSmall { population, r });
    }
    Ok(population - offset)
}

/// Exact probability that a uniformly random pair of codewords is secure
/// against `r` colluders drawn uniformly without replacement from the code
/// space, placed according to `placement`.
///
/// Linear codes go through the message difference of the pair: the
/// agreement set of two codewords depends only on their difference, and
/// the number of codewords avoiding the pair's symbols on a coordinate set
/// follows from column ranks. Other codes fall back to
/// [`expected_resilience_among`] over the enumerated code.
pub fn expected_resilience(
    code: &BlockCode,
    r: usize,
    placement: ColluderPlacement,
) -> Result<f64, ResilienceError> {
    let total = code.codeword_count();
    let pool = pool_size(total, r, placement)?;
    if !code.is_linear() {
        let words = code.enumerate_codewords()?;
        let slices: Vec<&[FieldElement]> = words.iter().map(|w| w.symbols()).collect();
        return expected_resilience_among(&slices, r, placement);
    }
    if total > crate::codes::ENUMERATION_GUARD {
        return Err(ResilienceError::GuardExceeded {
            what: "q^k",
            size: total,
            limit: crate::codes::ENUMERATION_GUARD,
        });
    }
    let (k, q) = (code.k(), code.q() as u64);
    let mut rank_memo: HashMap<Vec<usize>, u64> = HashMap::new();
    let mut matching = |w: &[usize]| -> u64 {
        *rank_memo
            .entry(w.to_vec())
            .or_insert_with(|| q.pow((k - code.column_rank(w).expect("linear")) as u32))
    };
    let mut prob_memo: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut sum = 0.0;
    for delta in 1..total {
        let diff = code.encode_index(delta);
        let agree: Vec<usize> = (0..code.n()).filter(|&i| diff.symbols()[i] == 0).collect();
        if agree.is_empty() {
            continue;
        }
        if let Some(p) = prob_memo.get(&agree) {
            sum += p;
            continue;
        }
        let p = secure_given_agreement(
            agree.len(),
            |t| {
                // codewords matching the pair on at least one coordinate of t
                let coords: Vec<usize> = t.iter().map(|&x| agree[x]).collect();
                let mut hit: i128 = 0;
                for mask in 1u32..(1u32 << coords.len()) {
                    let w: Vec<usize> = (0..coords.len())
                        .filter(|&b| mask >> b & 1 == 1)
                        .map(|b| coords[b])
                        .collect();
                    let h = matching(&w) as i128;
                    hit += if w.len() % 2 == 1 { h } else { -h };
                }
                total - hit as u64
            },
            pool,
            r,
        );
        prob_memo.insert(agree, p);
        sum += p;
    }
    Ok(sum / (total - 1) as f64)
}

/// [`expected_resilience`] for an explicit population of words (a whole
/// code, or the parts assigned to deployed nodes), by enumerating pairs.
pub fn expected_resilience_among<S: AsRef<[FieldElement]> + Sync>(
    words: &[S],
    r: usize,
    placement: ColluderPlacement,
) -> Result<f64, ResilienceError> {
    let population = words.len() as u64;
    let pool = pool_size(population, r, placement)?;
    if population > PAIRWISE_GUARD {
        return Err(ResilienceError::GuardExceeded {
            what: "population",
            size: population,
            limit: PAIRWISE_GUARD,
        });
    }
    // avoid counts keyed by (coordinates, symbols)
    let avoid_memo: std::sync::Mutex<HashMap<Vec<(usize, FieldElement)>, u64>> = Default::default();
    let avoid_count = |key: &[(usize, FieldElement)]| -> u64 {
        if let Some(&v) = avoid_memo.lock().unwrap().get(key) {
            return v;
        }
        let v = words
            .iter()
            .filter(|c| key.iter().all(|&(i, s)| c.as_ref()[i] != s))
            .count() as u64;
        avoid_memo.lock().unwrap().insert(key.to_vec(), v);
        v
    };
    let sum: f64 = (0..words.len())
        .into_par_iter()
        .map(|x| {
            let a = words[x].as_ref();
            let mut local = 0.0;
            for b in &words[x + 1..] {
                let agree: Vec<(usize, FieldElement)> = a
                    .iter()
                    .zip(b.as_ref())
                    .enumerate()
                    .filter(|(_, (s, t))| s == t)
                    .map(|(i, (&s, _))| (i, s))
                    .collect();
                if agree.is_empty() {
                    continue;
                }
                local += secure_given_agreement(
                    agree.len(),
                    |t| {
                        let key: Vec<(usize, FieldElement)> = t.iter().map(|&i| agree[i]).collect();
                        avoid_count(&key)
                    },
                    pool,
                    r,
                );
            }
            local
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .sum();
    Ok(sum / binomial(population, 2))
}

/// Mean and standard error of [`resilience_probability`] over random
/// collusion sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedResilience {
    pub mean: f64,
    pub stderr: f64,
    /// Mean secure-pair count.
    pub mean_pairs: f64,
    pub sets: usize,
}

/// Draws `sets` collusion sets of `r` distinct codewords (uniform without
/// replacement, one ChaCha8 stream per set) and averages the exact `P_re`
/// of each.
pub fn average_exact_resilience(
    code: &BlockCode,
    r: usize,
    sets: usize,
    seed: u64,
) -> Result<AveragedResilience, ResilienceError> {
    average_resilience_with(code, r, sets, seed, exact_pair_count)
}

/// [`average_exact_resilience`] with another secure-pair counter.
pub fn average_resilience_with<F>(
    code: &BlockCode,
    r: usize,
    sets: usize,
    seed: u64,
    count: F,
) -> Result<AveragedResilience, ResilienceError>
where
    F: Fn(&BlockCode, &CollusionFreeSets) -> Result<u64, ResilienceError> + Sync,
{
    let total = code.codeword_count();
    if r as u64 > total {
        return Err(ResilienceError::PopulationTooSmall {
            population: total,
            r,
        });
    }
    if sets == 0 {
        return Err(ResilienceError::PopulationTooSmall { population: 0, r });
    }
    let counts = (0..sets)
        .into_par_iter()
        .map(|s| {
            let colluders = sample_colluder_words(code, r, seed, s as u64);
            let u = collusion_free_sets(&colluders, code.n(), code.q())?;
            count(code, &u)
        })
        .collect::<Result<Vec<u64>, ResilienceError>>()?;
    // integer sums keep equal counts exactly equal to their mean
    let sum: u128 = counts.iter().map(|&d| d as u128).sum();
    let mean_pairs = sum as f64 / sets as f64;
    let var = if sets > 1 {
        counts
            .iter()
            .map(|&d| (d as f64 - mean_pairs).powi(2))
            .sum::<f64>()
            / (sets - 1) as f64
    } else {
        0.0
    };
    let pairs = binomial(total, 2);
    Ok(AveragedResilience {
        mean: resilience_probability(mean_pairs, code.q(), code.k()),
        stderr: (var / sets as f64).sqrt() / pairs,
        mean_pairs,
        sets,
    })
}

/// `r` distinct codewords sampled uniformly from the code space using
/// stream `stream` of the ChaCha8 generator seeded with `seed`.
pub fn sample_colluder_words(code: &BlockCode, r: usize, seed: u64, stream: u64) -> Vec<Codeword> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    index::sample(&mut rng, code.codeword_count() as usize, r)
        .into_iter()
        .map(|m| code.encode_index(m as u64))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Inclusion–exclusion for one collusion set.
    ExactIe,
    /// Pairwise scan for one collusion set.
    BruteForce,
    /// Closed MDS form with the average free-symbol count.
    MdsAverage,
    /// Exact expectation over uniformly random collusion sets.
    ExpectedIe,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ExactIe => "exact_ie",
            Method::BruteForce => "brute_force",
            Method::MdsAverage => "mds_average",
            Method::ExpectedIe => "expected_ie",
        }
    }
}

/// One evaluated point of the resilience curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ResilienceReport {
    pub r: usize,
    /// Secure-pair count; fractional for the averaged methods.
    pub d: f64,
    pub p_re: f64,
    /// `1 - (1 - p_re)^M`.
    pub p_re_m: f64,
    pub method: Method,
    pub stderr: Option<f64>,
}

impl ResilienceReport {
    pub const CSV_HEADER: &'static str = "r,D,P_re,P_re_M,method,stderr";

    pub fn new(r: usize, d: f64, q: u32, k: usize, authorities: usize, method: Method) -> Self {
        let p_re = resilience_probability(d, q, k);
        ResilienceReport {
            r,
            d,
            p_re,
            p_re_m: multi_authority(p_re, authorities),
            method,
            stderr: None,
        }
    }

    pub fn csv_row(&self) -> String {
        let stderr = self.stderr.map(|s| s.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{}",
            self.r,
            self.d,
            self.p_re,
            self.p_re_m,
            self.method.as_str(),
            stderr
        )
    }
}
