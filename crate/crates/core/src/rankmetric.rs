//! Gabidulin MRD codes, lifting, and covering codes built from their duals.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::ffield::{poly_rem_monic, poly_to_string, smallest_monic_irreducible, FieldSpec};
use crate::grassmann::{CodeError, CoveringCode};
use crate::linalg::{Matrix, Subspace};

/// Default cap on the number of codewords of a generated rank-metric code.
pub const DEFAULT_CODE_CAP: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RankMetricError {
    #[error("minimum distance {delta} must lie in 1..={max}")]
    DistanceOutOfRange { delta: usize, max: usize },
    #[error("code would have q^{exponent} = {size} codewords, above the cap {cap}")]
    CapExceeded {
        exponent: usize,
        size: String,
        cap: u64,
    },
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// GF(q^m) as polynomials over a base field modulo a pinned irreducible.
///
/// Elements are coefficient vectors of length `m`, lowest degree first; this
/// is also their expansion in the polynomial basis `1, x, ..., x^{m-1}`.
#[derive(Debug, Clone)]
pub struct ExtensionField {
    base: FieldSpec,
    degree: usize,
    modulus: Vec<u32>,
}

impl ExtensionField {
    pub fn new(base: &FieldSpec, degree: usize) -> Self {
        assert!(degree >= 1, "extension degree must be positive");
        Self {
            base: base.clone(),
            degree,
            modulus: smallest_monic_irreducible(base, degree),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus_string(&self) -> String {
        poly_to_string(&self.modulus)
    }

    pub fn zero(&self) -> Vec<u32> {
        vec![0; self.degree]
    }

    /// The basis element `x^j`.
    pub fn monomial(&self, j: usize) -> Vec<u32> {
        let mut v = self.zero();
        v[j] = 1;
        v
    }

    /// Element whose coordinates are the base-`q` digits of `index`.
    pub fn from_index(&self, mut index: u64) -> Vec<u32> {
        let q = self.base.q() as u64;
        (0..self.degree)
            .map(|_| {
                let d = (index % q) as u32;
                index /= q;
                d
            })
            .collect()
    }

    pub fn add(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.base.add_raw(x, y)).collect()
    }

    pub fn mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let f = &self.base;
        let mut prod = vec![0; 2 * self.degree - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = f.add_raw(prod[i + j], f.mul_raw(x, y));
            }
        }
        let mut r = poly_rem_monic(f, &prod, &self.modulus);
        r.resize(self.degree, 0);
        r
    }

    pub fn pow(&self, a: &[u32], mut e: u64) -> Vec<u32> {
        let mut base = a.to_vec();
        let mut acc = self.monomial(0);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `a^(q^i)`.
    pub fn frobenius(&self, a: &[u32], i: usize) -> Vec<u32> {
        let mut x = a.to_vec();
        for _ in 0..i {
            x = self.pow(&x, self.base.q() as u64);
        }
        x
    }
}

/// A linear rank-metric code of `m x n_cols` matrices over GF(q).
#[derive(Debug, Clone)]
pub struct RankMetricCode {
    pub field: FieldSpec,
    pub m: usize,
    pub n_cols: usize,
    pub delta: usize,
    /// Codewords in message-index order.
    pub codewords: Vec<Matrix>,
    /// Degree of the extension field used for evaluation, `max(m, n_cols)`.
    pub extension_degree: usize,
    pub extension_modulus: Vec<u32>,
}

impl RankMetricCode {
    /// Minimum rank of a nonzero codeword; for a linear code this is the
    /// minimum pairwise rank distance.
    pub fn min_rank_distance(&self) -> Option<usize> {
        self.codewords
            .iter()
            .filter(|c| !c.is_zero())
            .map(Matrix::rank)
            .min()
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }
}

/// `q^exponent` if it fits under `cap`.
fn capped_size(q: u32, exponent: usize, cap: u64) -> Result<u64, RankMetricError> {
    let size = num_traits::pow(BigUint::from(q), exponent);
    match size.to_u64() {
        Some(s) if s <= cap => Ok(s),
        _ => Err(RankMetricError::CapExceeded {
            exponent,
            size: size.to_string(),
            cap,
        }),
    }
}

/// Gabidulin code of `m x n_cols` matrices with minimum rank distance `delta`.
pub fn gabidulin_code(
    field: &FieldSpec,
    m: usize,
    n_cols: usize,
    delta: usize,
) -> Result<RankMetricCode, RankMetricError> {
    gabidulin_code_capped(field, m, n_cols, delta, DEFAULT_CODE_CAP)
}

/// Evaluation construction: with `M = max(m, n_cols)` and `N = min(m, n_cols)`,
/// every linearized polynomial `sum_{i<κ} f_i x^{q^i}` over GF(q^M), with
/// `κ = N - δ + 1`, is evaluated at `1, x, ..., x^{N-1}`; the images expanded
/// in the polynomial basis form the columns of an `M x N` codeword. When
/// `m < n_cols` the codewords are transposed back to `m x n_cols`.
pub fn gabidulin_code_capped(
    field: &FieldSpec,
    m: usize,
    n_cols: usize,
    delta: usize,
    cap: u64,
) -> Result<RankMetricCode, RankMetricError> {
    let (big, small) = (m.max(n_cols), m.min(n_cols));
    if delta == 0 || delta > small {
        return Err(RankMetricError::DistanceOutOfRange { delta, max: small });
    }
    let kappa = small - delta + 1;
    let count = capped_size(field.q(), big * kappa, cap)?;
    let ext = ExtensionField::new(field, big);
    let q_big = num_traits::pow(field.q() as u64, big);

    // images[i][j] = (x^j)^(q^i)
    let images: Vec<Vec<Vec<u32>>> = (0..kappa)
        .map(|i| (0..small).map(|j| ext.frobenius(&ext.monomial(j), i)).collect())
        .collect();

    let mut codewords = Vec::with_capacity(count as usize);
    for msg in 0..count {
        let mut rest = msg;
        let coeffs: Vec<Vec<u32>> = (0..kappa)
            .map(|_| {
                let c = ext.from_index(rest % q_big);
                rest /= q_big;
                c
            })
            .collect();
        let mut word = Matrix::zeros(field, big, small);
        for j in 0..small {
            let value = coeffs
                .iter()
                .zip(&images)
                .fold(ext.zero(), |acc, (f, img)| ext.add(&acc, &ext.mul(f, &img[j])));
            for (d, &v) in value.iter().enumerate() {
                word.set(d, j, v);
            }
        }
        codewords.push(if m < n_cols { word.transpose() } else { word });
    }
    Ok(RankMetricCode {
        field: field.clone(),
        m,
        n_cols,
        delta,
        codewords,
        extension_degree: big,
        extension_modulus: ext.modulus.clone(),
    })
}

/// Row space of `[I_k | a]` for a `k x (n-k)` matrix `a`.
pub fn lift(a: &Matrix) -> Subspace {
    let k = a.rows();
    let id = Matrix::identity(a.field(), k);
    let generator = id.hstack(a).expect("identity and a share rows and field");
    Subspace::from_canonical(generator, (0..k).collect())
}

/// A constant-dimension subspace code obtained by lifting.
#[derive(Debug, Clone)]
pub struct LiftedCode {
    pub n: usize,
    pub dim: usize,
    pub delta: usize,
    pub codewords: Vec<Subspace>,
}

/// Lifts every codeword of the Gabidulin code of `k_sub x (n - k_sub)`
/// matrices with minimum rank distance `delta`.
pub fn lifted_mrd_code(
    field: &FieldSpec,
    n: usize,
    k_sub: usize,
    delta: usize,
) -> Result<LiftedCode, RankMetricError> {
    if k_sub == 0 || k_sub >= n {
        return Err(RankMetricError::Parameters(format!(
            "subspace dimension {k_sub} must lie strictly between 0 and n = {n}"
        )));
    }
    let mrd = gabidulin_code(field, k_sub, n - k_sub, delta)?;
    Ok(LiftedCode {
        n,
        dim: k_sub,
        delta,
        codewords: mrd.codewords.iter().map(lift).collect(),
    })
}

/// `(α-1) q^{max{k,n-k}(min{k,n-k}-δ+1)}`, the size of
/// [`covering_code_from_lifted_mrd`].
pub fn lifted_mrd_covering_size(n: usize, k: usize, delta: usize, alpha: usize, q: u32) -> BigUint {
    let m = n - k;
    let exponent = k.max(m) * (k.min(m) + 1 - delta);
    BigUint::from(alpha - 1) * num_traits::pow(BigUint::from(q), exponent)
}

/// An α-(n, k, δ) covering code of size `(α-1) q^{max{k,n-k}(min{k,n-k}-δ+1)}`.
///
/// Lifts a Gabidulin code of `(n-k) x k` matrices to (n-k)-dimensional
/// subspaces, takes their duals (which have dimension k), and returns α−1
/// copies of the resulting set. Any α positions contain two distinct duals,
/// whose sum already has dimension at least k + δ.
pub fn covering_code_from_lifted_mrd(
    field: &FieldSpec,
    n: usize,
    k: usize,
    delta: usize,
    alpha: usize,
) -> Result<CoveringCode, RankMetricError> {
    if delta == 0 || delta > k || delta + k > n || alpha < 2 {
        return Err(RankMetricError::Parameters(format!(
            "need 1 <= delta <= k, delta + k <= n and alpha >= 2 \
             (n = {n}, k = {k}, delta = {delta}, alpha = {alpha})"
        )));
    }
    let lifted = lifted_mrd_code(field, n, n - k, delta)?;
    let duals: Vec<Subspace> = lifted.codewords.iter().map(Subspace::dual).collect();
    let codewords = (0..alpha - 1).flat_map(|_| duals.iter().cloned()).collect();
    Ok(CoveringCode::new(field, n, k, delta, alpha, codewords)?)
}
