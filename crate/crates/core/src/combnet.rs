//! Generalized combination networks (ε,ℓ)-N_{h,r,αℓ+ε}.
//!
//! A source holds `h` messages and feeds `r` middle nodes over `ℓ` parallel
//! links each. Every α-subset of middle nodes feeds its own receiver (ℓ links
//! per middle node), and each receiver also has `ε` direct links from the
//! source. A (q,t)-linear solution assigns an `ℓt x ht` coding matrix `A_i`
//! to every middle node; receivers are indexed by α-subsets of `0..r` in
//! lexicographic order.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ffield::{prime_powers_up_to, FieldSpec};
use crate::grassmann::{
    find_covering_code, is_covering_code, CodeError, CoveringCode, Decision,
};
use crate::linalg::{LinalgError, Matrix, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("invalid network parameters: {0}")]
    Parameters(String),
    #[error("network is {0:?}; operation requires {1}")]
    WrongClass(SolvabilityClass, &'static str),
    #[error("solution shape: {0}")]
    Shape(String),
    #[error("code does not match the network: {0}")]
    CodeMismatch(String),
    #[error("solution fails at receiver {receiver:?}")]
    NotASolution { receiver: Vec<usize> },
    #[error("receiver {receiver:?} cannot decode: {source}")]
    Decode {
        receiver: Vec<usize>,
        source: LinalgError,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// The tuple (h, r, α, ℓ, ε).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NetworkParams {
    pub h: usize,
    pub r: usize,
    pub alpha: usize,
    pub ell: usize,
    pub epsilon: usize,
}

impl NetworkParams {
    pub fn new(h: usize, r: usize, alpha: usize, ell: usize, epsilon: usize) -> Result<Self, NetworkError> {
        let p = Self {
            h,
            r,
            alpha,
            ell,
            epsilon,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), NetworkError> {
        let problem = if self.alpha < 2 {
            "alpha must be at least 2"
        } else if self.r < self.alpha {
            "r must be at least alpha"
        } else if self.h == 0 || self.ell == 0 {
            "h and ell must be positive"
        } else {
            return Ok(());
        };
        Err(NetworkError::Parameters(format!("{problem} (got {self:?})")))
    }

    /// Number of receivers, C(r, α).
    pub fn receivers(&self) -> u128 {
        let k = self.alpha.min(self.r - self.alpha) as u128;
        let n = self.r as u128;
        (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
    }

    /// Receivers as α-subsets of middle nodes, in lexicographic order.
    pub fn receiver_sets(&self) -> impl Iterator<Item = Vec<usize>> {
        (0..self.r).combinations(self.alpha)
    }

    /// Parameters `(n, k, δ)` of the covering code equivalent to a
    /// (q,t)-linear solution: `(ht, ℓt, ht - ℓt - εt)`. `None` when δ would
    /// be negative.
    pub fn code_parameters(&self, t: usize) -> Option<(usize, usize, usize)> {
        let n = self.h * t;
        let k = self.ell * t;
        let delta = n.checked_sub(k)?.checked_sub(self.epsilon * t)?;
        Some((n, k, delta))
    }
}

/// Which of the three solvability regimes a network falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SolvabilityClass {
    /// `h <= ℓ + ε`: the direct links plus one middle node suffice.
    Trivial,
    /// `ℓ + ε < h <= αℓ + ε`.
    Nontrivial,
    /// `h > αℓ + ε`: receivers get fewer than `h` symbols.
    Unsolvable,
}

pub fn classify(params: &NetworkParams) -> SolvabilityClass {
    let NetworkParams {
        h,
        alpha,
        ell,
        epsilon,
        ..
    } = *params;
    if h <= ell + epsilon {
        SolvabilityClass::Trivial
    } else if h > alpha * ell + epsilon {
        SolvabilityClass::Unsolvable
    } else {
        SolvabilityClass::Nontrivial
    }
}

/// Coding matrices `A_1..A_r` of a (q,t)-linear solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSolution {
    params: NetworkParams,
    field: FieldSpec,
    t: usize,
    matrices: Vec<Matrix>,
}

impl LinearSolution {
    pub fn new(
        params: NetworkParams,
        field: &FieldSpec,
        t: usize,
        matrices: Vec<Matrix>,
    ) -> Result<Self, NetworkError> {
        params.validate()?;
        if t == 0 {
            return Err(NetworkError::Shape("t must be at least 1".into()));
        }
        if matrices.len() != params.r {
            return Err(NetworkError::Shape(format!(
                "{} matrices for r = {}",
                matrices.len(),
                params.r
            )));
        }
        let (rows, cols) = (params.ell * t, params.h * t);
        for (i, a) in matrices.iter().enumerate() {
            if a.field() != field || a.rows() != rows || a.cols() != cols {
                return Err(NetworkError::Shape(format!(
                    "A_{i} is {}x{} over GF({}), expected {rows}x{cols} over GF({})",
                    a.rows(),
                    a.cols(),
                    a.field().q(),
                    field.q()
                )));
            }
        }
        Ok(Self {
            params,
            field: field.clone(),
            t,
            matrices,
        })
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn is_scalar(&self) -> bool {
        self.t == 1
    }

    /// Required rank of every receiver's stacked A-block, `(h - ε)t`.
    pub fn required_rank(&self) -> usize {
        self.params.h.saturating_sub(self.params.epsilon) * self.t
    }

    fn stacked(&self, receiver: &[usize]) -> Matrix {
        let blocks: Vec<&Matrix> = receiver.iter().map(|&i| &self.matrices[i]).collect();
        Matrix::vstack(&blocks).expect("shapes validated at construction")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionCheck {
    pub valid: bool,
    /// Lexicographically first failing receiver (0-based middle-node indices).
    pub witness: Option<Vec<usize>>,
}

/// Checks that every receiver's stacked `αℓt x ht` block has rank at least
/// `(h - ε)t`.
pub fn verify_solution(sol: &LinearSolution) -> Result<SolutionCheck, NetworkError> {
    if classify(&sol.params) == SolvabilityClass::Unsolvable {
        return Err(NetworkError::WrongClass(
            SolvabilityClass::Unsolvable,
            "a solvable network",
        ));
    }
    let need = sol.required_rank();
    let receivers: Vec<Vec<usize>> = sol.params.receiver_sets().collect();
    let witness = receivers
        .par_iter()
        .find_first(|rx| sol.stacked(rx).rank() < need)
        .cloned();
    Ok(SolutionCheck {
        valid: witness.is_none(),
        witness,
    })
}

/// A (q,t)-linear solution whose `A_i` are the canonical bases of the
/// codewords, padded with zero rows to `ℓt` rows.
pub fn solution_from_code(
    code: &CoveringCode,
    params: &NetworkParams,
    t: usize,
) -> Result<LinearSolution, NetworkError> {
    params.validate()?;
    let expected = params.code_parameters(t);
    let actual = (code.n(), code.k(), code.delta());
    if expected != Some(actual) || code.alpha() != params.alpha || code.len() != params.r {
        return Err(NetworkError::CodeMismatch(format!(
            "code has (n, k, delta, alpha, size) = ({}, {}, {}, {}, {}), network needs \
             (n, k, delta) = {:?} with alpha = {} and r = {}",
            code.n(),
            code.k(),
            code.delta(),
            code.alpha(),
            code.len(),
            expected,
            params.alpha,
            params.r
        )));
    }
    let rows = params.ell * t;
    let matrices = code
        .codewords()
        .iter()
        .map(|c| {
            let pad = Matrix::zeros(code.field(), rows - c.dim(), code.n());
            Matrix::vstack(&[c.basis(), &pad])
        })
        .collect::<Result<Vec<_>, _>>()?;
    LinearSolution::new(*params, code.field(), t, matrices)
}

/// The covering code formed by the row spaces of the coding matrices.
pub fn code_from_solution(sol: &LinearSolution) -> Result<CoveringCode, NetworkError> {
    let (n, k, delta) = sol.params.code_parameters(sol.t).ok_or_else(|| {
        NetworkError::CodeMismatch("h < ell + epsilon gives a negative delta".into())
    })?;
    let codewords = sol.matrices.iter().map(Matrix::row_space).collect();
    Ok(CoveringCode::new(&sol.field, n, k, delta, sol.params.alpha, codewords)?)
}

/// Greedy completion of one receiver: appends standard basis vectors (in
/// index order) that raise the rank, up to `εt` rows, padding with zeros.
fn complete_receiver(sol: &LinearSolution, receiver: &[usize]) -> Matrix {
    let f = &sol.field;
    let ht = sol.params.h * sol.t;
    let et = sol.params.epsilon * sol.t;
    let mut span = Subspace::from_generators(&sol.stacked(receiver));
    let mut b = Matrix::zeros(f, et, ht);
    let mut filled = 0;
    for j in 0..ht {
        if filled == et || span.dim() == ht {
            break;
        }
        let mut e = Matrix::zeros(f, 1, ht);
        e.set(0, j, 1);
        let grown = span.sum(&e.row_space()).expect("same ambient");
        if grown.dim() > span.dim() {
            b.set(filled, j, 1);
            filled += 1;
            span = grown;
        }
    }
    b
}

/// Direct-link matrices `B_i` (`εt x ht`), one per receiver in lexicographic
/// order, each completing its receiver's system to full rank `ht`.
pub fn derive_direct_link_matrices(sol: &LinearSolution) -> Result<Vec<Matrix>, NetworkError> {
    let check = verify_solution(sol)?;
    if let Some(receiver) = check.witness {
        return Err(NetworkError::NotASolution { receiver });
    }
    Ok(sol
        .params
        .receiver_sets()
        .map(|rx| complete_receiver(sol, &rx))
        .collect())
}

/// What one receiver recovered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceiverOutput {
    pub receiver: Vec<usize>,
    /// `h` decoded messages of length `t`.
    pub messages: Vec<Vec<u32>>,
}

/// Encodes `messages` (h vectors of length t), delivers them over the network
/// and decodes at every receiver by solving its linear system.
///
/// The direct links use the greedy completion of [`derive_direct_link_matrices`]
/// even when the solution is invalid, so an invalid solution surfaces as a
/// [`NetworkError::Decode`] at the first receiver whose system is singular.
pub fn simulate(
    sol: &LinearSolution,
    messages: &[Vec<u32>],
) -> Result<Vec<ReceiverOutput>, NetworkError> {
    let (h, t) = (sol.params.h, sol.t);
    if messages.len() != h || messages.iter().any(|m| m.len() != t) {
        return Err(NetworkError::Shape(format!(
            "expected {h} messages of length {t}"
        )));
    }
    let q = sol.field.q();
    if messages.iter().flatten().any(|&v| v >= q) {
        return Err(NetworkError::Shape(format!("message symbol outside GF({q})")));
    }
    let x: Vec<u32> = messages.concat();
    let middle: Vec<Vec<u32>> = sol
        .matrices
        .iter()
        .map(|a| a.mul_vec(&x))
        .collect::<Result<_, _>>()?;

    sol.params
        .receiver_sets()
        .map(|rx| {
            let b = complete_receiver(sol, &rx);
            let mut system: Vec<&Matrix> = rx.iter().map(|&i| &sol.matrices[i]).collect();
            system.push(&b);
            let system = Matrix::vstack(&system)?;
            let mut y: Vec<u32> = rx.iter().flat_map(|&i| middle[i].iter().copied()).collect();
            y.extend(b.mul_vec(&x)?);
            let decoded = system.solve_unique(&y).map_err(|source| NetworkError::Decode {
                receiver: rx.clone(),
                source,
            })?;
            Ok(ReceiverOutput {
                receiver: rx,
                messages: decoded.chunks(t).map(<[u32]>::to_vec).collect(),
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub solution: Option<LinearSolution>,
    /// 0-based index of the successful trial.
    pub trial: Option<u64>,
    pub trials: u64,
    pub seed: u64,
}

/// Uniformly random coding matrices for one trial. Trial `i` draws from the
/// ChaCha stream `i` of `seed`, so trials are independent of scheduling.
pub fn random_matrices(
    params: &NetworkParams,
    field: &FieldSpec,
    t: usize,
    seed: u64,
    trial: u64,
) -> Vec<Matrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let (rows, cols) = (params.ell * t, params.h * t);
    (0..params.r)
        .map(|_| {
            let data = (0..rows * cols).map(|_| rng.random_range(0..field.q())).collect();
            Matrix::from_flat(field, rows, cols, data).expect("entries drawn below q")
        })
        .collect()
}

/// Draws all `r` coding matrices i.i.d. uniformly per trial and returns the
/// first verifying draw (lowest trial index).
pub fn random_solution_search(
    params: &NetworkParams,
    field: &FieldSpec,
    t: usize,
    trials: u64,
    seed: u64,
) -> Result<SearchOutcome, NetworkError> {
    params.validate()?;
    let class = classify(params);
    if class != SolvabilityClass::Nontrivial {
        return Err(NetworkError::WrongClass(class, "a nontrivial network"));
    }
    if t == 0 {
        return Err(NetworkError::Shape("t must be at least 1".into()));
    }
    let hit = (0..trials).into_par_iter().find_map_first(|trial| {
        let matrices = random_matrices(params, field, t, seed, trial);
        let sol = LinearSolution::new(*params, field, t, matrices).ok()?;
        let ok = verify_solution(&sol).ok()?.valid;
        ok.then_some((trial, sol))
    });
    Ok(SearchOutcome {
        trial: hit.as_ref().map(|(i, _)| *i),
        solution: hit.map(|(_, s)| s),
        trials,
        seed,
    })
}

/// Monte-Carlo count of draws where `α` uniform coding matrices stack to
/// rank below `(h - ε)t`. Draw `i` uses stream `i` of `seed`.
pub fn count_bad_events(
    params: &NetworkParams,
    field: &FieldSpec,
    t: usize,
    draws: u64,
    seed: u64,
) -> Result<u64, NetworkError> {
    let one_receiver = NetworkParams::new(params.h, params.alpha, params.alpha, params.ell, params.epsilon)?;
    let need = params.h.saturating_sub(params.epsilon) * t;
    let bad = (0..draws)
        .into_par_iter()
        .filter(|&draw| {
            let mats = random_matrices(&one_receiver, field, t, seed, draw);
            let blocks: Vec<&Matrix> = mats.iter().collect();
            Matrix::vstack(&blocks).expect("equal widths").rank() < need
        })
        .count();
    Ok(bad as u64)
}

/// Smallest alphabet found by [`compute_qs`] or [`compute_qv`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphabetSearch {
    /// `q` (scalar) or `q^t` (vector); `None` if nothing was found under the cap.
    pub value: Option<u64>,
    /// The `(q, t)` pair achieving `value`.
    pub witness: Option<(u64, usize)>,
    /// True only if every smaller candidate was conclusively refuted.
    pub exact: bool,
    /// Set for trivial networks, which are answered without search.
    pub trivial: bool,
}

fn require_solvable(params: &NetworkParams) -> Result<Option<AlphabetSearch>, NetworkError> {
    params.validate()?;
    match classify(params) {
        SolvabilityClass::Unsolvable => Err(NetworkError::WrongClass(
            SolvabilityClass::Unsolvable,
            "a solvable network",
        )),
        SolvabilityClass::Trivial => Ok(Some(AlphabetSearch {
            value: Some(2),
            witness: Some((2, 1)),
            exact: true,
            trivial: true,
        })),
        SolvabilityClass::Nontrivial => Ok(None),
    }
}

fn decide(
    params: &NetworkParams,
    q: u64,
    t: usize,
    node_limit: u64,
) -> Result<Decision, NetworkError> {
    let field = match FieldSpec::from_order(q) {
        Ok(f) => f,
        Err(_) => return Ok(Decision::Inconclusive),
    };
    let (n, k, delta) = params
        .code_parameters(t)
        .expect("nontrivial networks have positive delta");
    Ok(find_covering_code(
        n,
        k,
        delta,
        params.alpha,
        &field,
        params.r,
        node_limit,
    )?)
}

/// Scans `(q, t)` candidates in the given order and returns the first one
/// admitting a code of `r` codewords.
fn first_solvable(
    params: &NetworkParams,
    candidates: &[(u64, usize)],
    node_limit: u64,
) -> Result<AlphabetSearch, NetworkError> {
    let mut exact = true;
    let mut inconclusive_below: Option<u64> = None;
    for &(q, t) in candidates {
        let size = q.pow(t as u32);
        match decide(params, q, t, node_limit)? {
            Decision::Found(_) => {
                let exact = exact && inconclusive_below.is_none_or(|s| s >= size);
                return Ok(AlphabetSearch {
                    value: Some(size),
                    witness: Some((q, t)),
                    exact,
                    trivial: false,
                });
            }
            Decision::Refuted => {}
            Decision::Inconclusive => {
                if inconclusive_below.is_none() {
                    inconclusive_below = Some(size);
                }
            }
        }
    }
    exact = false;
    Ok(AlphabetSearch {
        value: None,
        witness: None,
        exact,
        trivial: false,
    })
}

/// `q_s`: the smallest field size `q <= q_cap` admitting a (q,1)-linear
/// solution, decided by exhaustive covering-code search.
pub fn compute_qs(
    params: &NetworkParams,
    q_cap: u64,
    node_limit: u64,
) -> Result<AlphabetSearch, NetworkError> {
    if let Some(trivial) = require_solvable(params)? {
        return Ok(trivial);
    }
    let candidates: Vec<(u64, usize)> = prime_powers_up_to(q_cap).into_iter().map(|q| (q, 1)).collect();
    first_solvable(params, &candidates, node_limit)
}

/// `(q, t)` pairs with `q^t <= cap`, ordered by `q^t` then by `t`.
pub fn vector_candidates(cap: u64) -> Vec<(u64, usize)> {
    let mut out = Vec::new();
    for q in prime_powers_up_to(cap) {
        let mut size = q;
        let mut t = 1;
        while size <= cap {
            out.push((q, t));
            t += 1;
            size = match size.checked_mul(q) {
                Some(s) => s,
                None => break,
            };
        }
    }
    out.sort_by_key(|&(q, t)| (q.pow(t as u32), t));
    out
}

/// `q_v`: the smallest `q^t <= qt_cap` admitting a (q,t)-linear solution.
pub fn compute_qv(
    params: &NetworkParams,
    qt_cap: u64,
    node_limit: u64,
) -> Result<AlphabetSearch, NetworkError> {
    if let Some(trivial) = require_solvable(params)? {
        return Ok(trivial);
    }
    first_solvable(params, &vector_candidates(qt_cap), node_limit)
}

/// `q_s`, `q_v` and the gap `log2 q_s - log2 q_v` in bits per link.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapEstimate {
    pub qs: AlphabetSearch,
    pub qv: AlphabetSearch,
    pub q_cap: u64,
    pub qt_cap: u64,
    pub gap: Option<f64>,
}

pub fn estimate_gap(
    params: &NetworkParams,
    q_cap: u64,
    qt_cap: u64,
    node_limit: u64,
) -> Result<GapEstimate, NetworkError> {
    let qs = compute_qs(params, q_cap, node_limit)?;
    let qv = compute_qv(params, qt_cap, node_limit)?;
    let gap = match (qs.value, qv.value) {
        (Some(s), Some(v)) => Some((s as f64).log2() - (v as f64).log2()),
        _ => None,
    };
    Ok(GapEstimate {
        qs,
        qv,
        q_cap,
        qt_cap,
        gap,
    })
}

/// Stacked rank test for a whole code, routed through the covering checker.
pub fn solution_covers(sol: &LinearSolution) -> Result<bool, NetworkError> {
    Ok(is_covering_code(&code_from_solution(sol)?)?.covering)
}
