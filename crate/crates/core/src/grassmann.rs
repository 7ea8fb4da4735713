//! Covering Grassmannian codes.
//!
//! An α-(n, k, δ) covering code is a multiset of k-dimensional subspaces of
//! GF(q)^n in which every α codewords together span at least δ + k
//! dimensions. Codewords may repeat: a sub-multiset of size α picks α
//! distinct *positions*, not α distinct subspaces.

use itertools::Itertools;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::ffield::FieldSpec;
use crate::linalg::{gaussian_binomial, span_dim, LinalgError, Matrix, Subspace};

/// Largest Grassmannian we are willing to materialize.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// Default node budget for the brute-force search.
pub const DEFAULT_NODE_LIMIT: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("G({n},{k}) over GF({q}) has {size} elements, above the enumeration cap {cap}")]
    EnumerationCap {
        n: usize,
        k: usize,
        q: u32,
        size: String,
        cap: u64,
    },
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error("code has {size} codewords but alpha = {alpha}; coverage would be vacuous")]
    TooFewCodewords { size: usize, alpha: usize },
    #[error("codeword {index}: {reason}")]
    Codeword { index: usize, reason: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A multiset of subspaces with covering parameters (α, δ).
///
/// Codewords have ambient dimension `n` and dimension at most `k`; codes
/// built from the Grassmannian have dimension exactly `k`, while codes read
/// back from network solutions may contain lower-dimensional row spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringCode {
    field: FieldSpec,
    n: usize,
    k: usize,
    delta: usize,
    alpha: usize,
    codewords: Vec<Subspace>,
}

impl CoveringCode {
    pub fn new(
        field: &FieldSpec,
        n: usize,
        k: usize,
        delta: usize,
        alpha: usize,
        codewords: Vec<Subspace>,
    ) -> Result<Self, CodeError> {
        if k > n {
            return Err(CodeError::Parameters(format!("k = {k} exceeds n = {n}")));
        }
        for (index, c) in codewords.iter().enumerate() {
            let reason = if c.field() != field {
                format!("over GF({}), expected GF({})", c.field().q(), field.q())
            } else if c.ambient() != n {
                format!("ambient {}, expected {n}", c.ambient())
            } else if c.dim() > k {
                format!("dimension {} exceeds k = {k}", c.dim())
            } else {
                continue;
            };
            return Err(CodeError::Codeword { index, reason });
        }
        Ok(Self {
            field: field.clone(),
            n,
            k,
            delta,
            alpha,
            codewords,
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn codewords(&self) -> &[Subspace] {
        &self.codewords
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// True when every codeword has dimension exactly `k`.
    pub fn is_constant_dimension(&self) -> bool {
        self.codewords.iter().all(|c| c.dim() == self.k)
    }

    /// The covering target `δ + k`.
    pub fn required_dim(&self) -> usize {
        self.delta + self.k
    }
}

/// An α-subset of codeword positions that spans too little.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverWitness {
    pub indices: Vec<usize>,
    pub achieved_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverCheck {
    pub covering: bool,
    pub witness: Option<CoverWitness>,
}

/// Number of α-subsets above which verification fans out over threads.
const PARALLEL_THRESHOLD: usize = 2048;

/// Checks the covering property over every α-subset of positions.
///
/// On failure the witness is the violation with the smallest achieved
/// dimension; ties go to the lexicographically first index tuple. The
/// result does not depend on the number of worker threads.
pub fn is_covering_code(code: &CoveringCode) -> Result<CoverCheck, CodeError> {
    let alpha = code.alpha;
    let size = code.len();
    if alpha == 0 || size < alpha {
        return Err(CodeError::TooFewCodewords { size, alpha });
    }
    let target = code.required_dim();
    let floor = code.codewords.iter().map(Subspace::dim).max().unwrap_or(0);

    // Worst violation among the α-subsets whose first index is `first`.
    let scan = |first: usize| -> Result<Option<CoverWitness>, CodeError> {
        let mut worst: Option<CoverWitness> = None;
        for rest in (first + 1..size).combinations(alpha - 1) {
            let mut picked: Vec<&Subspace> = Vec::with_capacity(alpha);
            picked.push(&code.codewords[first]);
            picked.extend(rest.iter().map(|&i| &code.codewords[i]));
            let d = span_dim(&picked)?;
            if d < target && worst.as_ref().is_none_or(|w| d < w.achieved_dim) {
                let mut indices = vec![first];
                indices.extend(rest);
                worst = Some(CoverWitness {
                    indices,
                    achieved_dim: d,
                });
                if d <= floor {
                    break;
                }
            }
        }
        Ok(worst)
    };

    let firsts = 0..=size - alpha;
    let per_first: Vec<Option<CoverWitness>> = if binomial(size, alpha) > PARALLEL_THRESHOLD {
        firsts.into_par_iter().map(scan).collect::<Result<_, _>>()?
    } else {
        firsts.map(scan).collect::<Result<_, _>>()?
    };
    // per-first minima in index order; strict `<` keeps the earliest
    let mut witness: Option<CoverWitness> = None;
    for w in per_first.into_iter().flatten() {
        if witness.as_ref().is_none_or(|b| w.achieved_dim < b.achieved_dim) {
            witness = Some(w);
        }
    }
    Ok(CoverCheck {
        covering: witness.is_none(),
        witness,
    })
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// All `k`-dimensional subspaces of GF(q)^n, each exactly once.
///
/// Ordered by pivot columns (lexicographic), then by the free entries of the
/// RREF basis read row-major. This agrees with `Ord for Subspace`.
pub fn enumerate_grassmannian(
    n: usize,
    k: usize,
    field: &FieldSpec,
) -> Result<Vec<Subspace>, CodeError> {
    enumerate_grassmannian_capped(n, k, field, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_grassmannian_capped(
    n: usize,
    k: usize,
    field: &FieldSpec,
    cap: u64,
) -> Result<Vec<Subspace>, CodeError> {
    if k > n {
        return Err(CodeError::Parameters(format!("k = {k} exceeds n = {n}")));
    }
    let q = field.q();
    let size = gaussian_binomial(n as u64, k as u64, q as u64);
    if size.to_u64().is_none_or(|s| s > cap) {
        return Err(CodeError::EnumerationCap {
            n,
            k,
            q,
            size: size.to_string(),
            cap,
        });
    }
    let mut out = Vec::with_capacity(size.to_usize().unwrap_or(0));
    for pivots in (0..n).combinations(k) {
        // free positions: right of the row's pivot, not in a pivot column
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| {
                let pivots = &pivots;
                (p + 1..n)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let mut digits = vec![0u32; free.len()];
        loop {
            let mut basis = Matrix::zeros(field, k, n);
            for (r, &p) in pivots.iter().enumerate() {
                basis.set(r, p, 1);
            }
            for (&(r, c), &v) in free.iter().zip(&digits) {
                basis.set(r, c, v);
            }
            out.push(Subspace::from_canonical(basis, pivots.clone()));
            // odometer, last free position least significant
            let Some(pos) = digits.iter().rposition(|&d| d + 1 < q) else {
                break;
            };
            digits[pos] += 1;
            digits[pos + 1..].iter_mut().for_each(|d| *d = 0);
        }
    }
    Ok(out)
}

/// Outcome of asking whether a code of a given size exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Found(CoveringCode),
    Refuted,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct BruteForceResult {
    pub size: usize,
    pub code: CoveringCode,
    /// True when the search tree was exhausted within the node limit.
    pub exact: bool,
    pub nodes: u64,
}

fn check_search_params(n: usize, k: usize, delta: usize, alpha: usize) -> Result<(), CodeError> {
    if k > n || delta + k > n {
        return Err(CodeError::Parameters(format!(
            "need delta + k <= n, got delta = {delta}, k = {k}, n = {n}"
        )));
    }
    if delta == 0 {
        // every multiset would qualify; the maximum is unbounded
        return Err(CodeError::Parameters("delta must be at least 1".into()));
    }
    if alpha < 2 {
        return Err(CodeError::Parameters("alpha must be at least 2".into()));
    }
    Ok(())
}

/// Largest α-(n,k,δ) covering code, by depth-first search over
/// non-decreasing sequences of Grassmannian indices.
///
/// Each subspace may appear at most α−1 times (α copies span only k). A
/// partial multiset is extended only if every α-subset touching the new
/// codeword is valid. When the search finishes within `node_limit` the size
/// is exact; otherwise it is the best found. Note that any multiset of fewer
/// than α codewords is vacuously covering, so the result is at least α−1.
pub fn max_covering_code_bruteforce(
    n: usize,
    k: usize,
    delta: usize,
    alpha: usize,
    field: &FieldSpec,
    node_limit: u64,
) -> Result<BruteForceResult, CodeError> {
    check_search_params(n, k, delta, alpha)?;
    let candidates = enumerate_grassmannian(n, k, field)?;
    let mut search = Search::new(&candidates, delta + k, alpha, None, node_limit)?;
    search.run();
    let code = search.best_code(field, n, k, delta);
    Ok(BruteForceResult {
        size: search.best.len(),
        code,
        exact: !search.aborted,
        nodes: search.nodes,
    })
}

/// Decides whether an α-(n,k,δ) covering code with `target` codewords exists.
///
/// Grassmannians above the enumeration cap and searches that exhaust the
/// node limit are reported as inconclusive rather than as errors.
pub fn find_covering_code(
    n: usize,
    k: usize,
    delta: usize,
    alpha: usize,
    field: &FieldSpec,
    target: usize,
    node_limit: u64,
) -> Result<Decision, CodeError> {
    check_search_params(n, k, delta, alpha)?;
    let candidates = match enumerate_grassmannian(n, k, field) {
        Ok(c) => c,
        Err(CodeError::EnumerationCap { .. }) => return Ok(Decision::Inconclusive),
        Err(e) => return Err(e),
    };
    let mut search = Search::new(&candidates, delta + k, alpha, Some(target), node_limit)?;
    search.run();
    Ok(if search.best.len() >= target {
        Decision::Found(search.best_code(field, n, k, delta))
    } else if search.aborted {
        Decision::Inconclusive
    } else {
        Decision::Refuted
    })
}

struct Search<'a> {
    candidates: &'a [Subspace],
    required: usize,
    alpha: usize,
    target: Option<usize>,
    node_limit: u64,
    /// Pairwise compatibility, only for α = 2.
    compat: Option<Vec<Vec<bool>>>,
    nodes: u64,
    aborted: bool,
    done: bool,
    best: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(
        candidates: &'a [Subspace],
        required: usize,
        alpha: usize,
        target: Option<usize>,
        node_limit: u64,
    ) -> Result<Self, CodeError> {
        let compat = if alpha == 2 {
            let rows = candidates
                .iter()
                .map(|a| {
                    candidates
                        .iter()
                        .map(|b| Ok(span_dim(&[a, b])? >= required))
                        .collect::<Result<Vec<bool>, LinalgError>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            Some(rows)
        } else {
            None
        };
        Ok(Self {
            candidates,
            required,
            alpha,
            target,
            node_limit,
            compat,
            nodes: 0,
            aborted: false,
            done: false,
            best: Vec::new(),
        })
    }

    fn run(&mut self) {
        let all: Vec<usize> = (0..self.candidates.len()).collect();
        let mut chosen = Vec::new();
        self.dfs(&mut chosen, &all);
    }

    /// Largest size still reachable from a node cannot exceed this.
    fn reachable(&self, chosen: usize, allowed: usize) -> usize {
        chosen + (self.alpha - 1) * allowed
    }

    fn hopeless(&self, bound: usize) -> bool {
        match self.target {
            Some(t) => bound < t,
            None => bound <= self.best.len(),
        }
    }

    fn dfs(&mut self, chosen: &mut Vec<usize>, allowed: &[usize]) {
        if self.done {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.node_limit {
            self.aborted = true;
            self.done = true;
            return;
        }
        if chosen.len() > self.best.len() {
            self.best = chosen.clone();
            if self.target.is_some_and(|t| chosen.len() >= t) {
                self.done = true;
                return;
            }
        }
        for (pos, &c) in allowed.iter().enumerate() {
            if self.done || self.hopeless(self.reachable(chosen.len(), allowed.len() - pos)) {
                break;
            }
            let next: Vec<usize> = if let Some(compat) = &self.compat {
                allowed[pos + 1..]
                    .iter()
                    .copied()
                    .filter(|&x| compat[c][x])
                    .collect()
            } else {
                if !self.extension_valid(chosen, c) {
                    continue;
                }
                let copies = chosen.iter().filter(|&&x| x == c).count() + 1;
                let from = if copies < self.alpha - 1 { pos } else { pos + 1 };
                allowed[from..].to_vec()
            };
            chosen.push(c);
            self.dfs(chosen, &next);
            chosen.pop();
        }
    }

    /// Every α-subset made of `c` and α−1 already chosen positions is valid.
    fn extension_valid(&self, chosen: &[usize], c: usize) -> bool {
        if chosen.len() + 1 < self.alpha {
            return true;
        }
        chosen.iter().combinations(self.alpha - 1).all(|others| {
            let mut picked: Vec<&Subspace> = others.iter().map(|&&i| &self.candidates[i]).collect();
            picked.push(&self.candidates[c]);
            span_dim(&picked).expect("candidates share one ambient space") >= self.required
        })
    }

    fn best_code(&self, field: &FieldSpec, n: usize, k: usize, delta: usize) -> CoveringCode {
        let codewords = self.best.iter().map(|&i| self.candidates[i].clone()).collect();
        CoveringCode::new(field, n, k, delta, self.alpha, codewords)
            .expect("candidates come from G(n, k)")
    }
}
