//! Closed-form bounds on the number of middle nodes `r`, on the field size
//! needed for a (q,t)-linear solution, and on the scalar-vs-vector gap.
//!
//! Domain violations never abort: every evaluator returns a [`BoundReport`]
//! whose `valid` flag records whether all side conditions held. Integer-valued
//! bounds are exact; the rest are `f64`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::combnet::NetworkParams;
use crate::linalg::{count_rank_matrices, gaussian_binomial};

/// The constant in `[n k]_q < γ q^{k(n-k)}`, rounded up as usually quoted.
pub const GAMMA: f64 = 3.48;

/// Networks with `h <= ℓ + ε` are solvable over any field for any `r`.
const STANDING: &str = "ell + eps < h";

/// Blocklength searches stop here.
pub const MAX_BLOCKLENGTH: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaMode {
    /// Fixed at [`GAMMA`].
    #[default]
    Rounded,
    /// `γ_q = prod_{i>=1} (1 - q^-i)^-1` to machine precision. Bounds that
    /// do not fix `q` use `γ_2`, the largest value.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct BoundConfig {
    pub gamma: GammaMode,
    /// Keep the `+1` that the local-lemma bound usually drops.
    pub local_lemma_plus_one: bool,
}

impl BoundConfig {
    pub fn gamma(&self, q: Option<u64>) -> f64 {
        match self.gamma {
            GammaMode::Rounded => GAMMA,
            GammaMode::Exact => gamma_exact(q.unwrap_or(2)),
        }
    }
}

/// `prod_{i>=1} (1 - q^-i)^-1`.
pub fn gamma_exact(q: u64) -> f64 {
    let q = q as f64;
    let mut prod = 1.0;
    let mut term = 1.0 / q;
    while term > f64::EPSILON / 4.0 {
        prod /= 1.0 - term;
        term /= q;
    }
    prod
}

/// The network shape `(h, ℓ, ε, α)` shared by all bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Shape {
    pub h: u64,
    pub ell: u64,
    pub epsilon: u64,
    pub alpha: u64,
}

impl Shape {
    pub fn new(h: u64, ell: u64, epsilon: u64, alpha: u64) -> Self {
        Self {
            h,
            ell,
            epsilon,
            alpha,
        }
    }

    fn signed(&self) -> (i64, i64, i64, i64) {
        (
            self.h as i64,
            self.ell as i64,
            self.epsilon as i64,
            self.alpha as i64,
        )
    }

    /// `α - floor((h-ε)/ℓ) + 1`, the number of spare middle nodes per
    /// full-span hyperplane.
    pub fn theta(&self) -> i64 {
        let (h, l, e, a) = self.signed();
        a - (h - e).div_euclid(l) + 1
    }

    /// Exponent polynomial of the local-lemma bound:
    /// `(αℓ+ε-h)εt² + (αℓ+2ε-h)t + 1`.
    pub fn local_lemma_exponent(&self, t: u64) -> i64 {
        let (h, l, e, a) = self.signed();
        let t = t as i64;
        (a * l + e - h) * e * t * t + (a * l + 2 * e - h) * t + 1
    }

    /// Exponent of the lifted-MRD bound:
    /// `max{ℓt,(h-ℓ)t} * (min{ℓt,(h-ℓ)t} - (h-ℓ-ε)t + 1)`.
    pub fn lifted_mrd_exponent(&self, t: u64) -> i64 {
        let (h, l, e, _) = self.signed();
        let t = t as i64;
        let (a, b) = (l * t, (h - l) * t);
        a.max(b) * (a.min(b) - (h - l - e) * t + 1)
    }

    /// `((α-1)! / (2eγα))^{1/(α-1)}`.
    pub fn beta(&self, gamma: f64) -> f64 {
        let a = self.alpha as f64;
        let fact: f64 = (1..self.alpha).map(|i| i as f64).product();
        (fact / (2.0 * std::f64::consts::E * gamma * a)).powf(1.0 / (a - 1.0))
    }

    fn solvable_assumptions(&self) -> Vec<Assumption> {
        let (h, l, e, a) = self.signed();
        vec![
            Assumption::new("alpha >= 2", a >= 2),
            Assumption::new("h >= 1 and ell >= 1", h >= 1 && l >= 1),
            Assumption::new(STANDING, l + e < h),
            Assumption::new("h <= alpha*ell + eps", h <= a * l + e),
        ]
    }

    /// Whether the boundary case `h = 2ℓ + ε` applies.
    fn on_boundary(&self) -> bool {
        self.h == 2 * self.ell + self.epsilon
    }
}

impl From<&NetworkParams> for Shape {
    fn from(p: &NetworkParams) -> Self {
        Shape::new(p.h as u64, p.ell as u64, p.epsilon as u64, p.alpha as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assumption {
    pub condition: String,
    pub holds: bool,
}

impl Assumption {
    pub fn new(condition: impl Into<String>, holds: bool) -> Self {
        Self {
            condition: condition.into(),
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum BoundValue {
    Integer(#[serde(serialize_with = "as_string")] BigInt),
    Rational(#[serde(serialize_with = "as_string")] BigRational),
    Real(f64),
    /// The formula has no value here (division by zero, log of a
    /// non-positive number, a search that did not terminate).
    Undefined(String),
}

fn as_string<T: fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl BoundValue {
    fn real(x: f64, what: &str) -> Self {
        if x.is_nan() {
            BoundValue::Undefined(format!("{what} is not a real number here"))
        } else {
            BoundValue::Real(x)
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        match self {
            BoundValue::Integer(v) => v.to_f64(),
            BoundValue::Rational(v) => v.to_f64(),
            BoundValue::Real(v) => Some(*v),
            BoundValue::Undefined(_) => None,
        }
    }

    pub fn as_integer(&self) -> Option<&BigInt> {
        match self {
            BoundValue::Integer(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            BoundValue::Integer(v) => Some(BigRational::from_integer(v.clone())),
            BoundValue::Rational(v) => Some(v.clone()),
            _ => None,
        }
    }

    /// Exact text for integers and rationals; empty otherwise.
    pub fn exact_string(&self) -> String {
        match self {
            BoundValue::Integer(v) => v.to_string(),
            BoundValue::Rational(v) => v.to_string(),
            _ => String::new(),
        }
    }
}

impl fmt::Display for BoundValue {
    /// Integers print exactly, everything else with six decimals.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Integer(v) => write!(f, "{v}"),
            BoundValue::Rational(v) => match v.to_f64() {
                Some(x) => write!(f, "{x:.6}"),
                None => write!(f, "{v}"),
            },
            BoundValue::Real(x) => write!(f, "{x:.6}"),
            BoundValue::Undefined(_) => write!(f, "NA"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: &'static str,
    pub value: BoundValue,
    pub valid: bool,
    pub assumptions: Vec<Assumption>,
    /// Intermediate quantities (exponents, constants, searched blocklengths,
    /// alternative branches) for auditing.
    pub extras: Vec<(String, BoundValue)>,
}

impl BoundReport {
    fn new(name: &'static str, value: BoundValue, assumptions: Vec<Assumption>) -> Self {
        let valid = assumptions.iter().all(|a| a.holds) && !matches!(value, BoundValue::Undefined(_));
        Self {
            name,
            value,
            valid,
            assumptions,
            extras: Vec::new(),
        }
    }

    /// Whether only the standing assumption `ℓ + ε < h` failed.
    pub fn valid_except_standing(&self) -> bool {
        !matches!(self.value, BoundValue::Undefined(_))
            && self
                .assumptions
                .iter()
                .all(|a| a.holds || a.condition == STANDING)
    }

    fn extra(mut self, key: &str, value: BoundValue) -> Self {
        self.extras.push((key.to_string(), value));
        self
    }

    pub fn extra_value(&self, key: &str) -> Option<&BoundValue> {
        self.extras.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// The assumptions joined for one table cell, failed ones marked with `!`.
    pub fn assumptions_string(&self) -> String {
        self.assumptions
            .iter()
            .map(|a| {
                if a.holds {
                    a.condition.clone()
                } else {
                    format!("!({})", a.condition)
                }
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

fn int(v: i64) -> BoundValue {
    BoundValue::Integer(BigInt::from(v))
}

fn big_pow(q: u64, e: u64) -> BigUint {
    num_traits::pow(BigUint::from(q), e as usize)
}

fn q_assumption(q: u64) -> Assumption {
    Assumption::new("q >= 2", q >= 2)
}

fn t_assumption(t: u64) -> Assumption {
    Assumption::new("t >= 1", t >= 1)
}

/// Exact upper bound on `r` from counting full-span hyperplanes:
/// `[(ε+ℓ)t, εt]_q * (θ(q^{ℓt+1}-1)/(q-1) - 1) + floor((h-ε)/ℓ) - 1`.
pub fn middle_nodes_upper_exact(s: &Shape, q: u64, t: u64) -> BoundReport {
    let (h, l, e, a) = s.signed();
    let theta = s.theta();
    let floor = (h - e).div_euclid(l);
    let assumptions = vec![
        Assumption::new("alpha >= 2", a >= 2),
        Assumption::new("h - eps >= 2*ell", h - e >= 2 * l),
        Assumption::new("alpha*ell >= h - eps", a * l >= h - e),
        q_assumption(q),
        t_assumption(t),
    ];
    let value = if q < 2 {
        BoundValue::Undefined("q < 2".into())
    } else {
        let hyperplanes = (big_pow(q, s.ell * t + 1) - 1u32) / (q - 1);
        let per_space = BigInt::from(theta) * BigInt::from(hyperplanes) - 1;
        let spaces = BigInt::from(gaussian_binomial((s.epsilon + s.ell) * t, s.epsilon * t, q));
        BoundValue::Integer(spaces * per_space + floor - 1)
    };
    BoundReport::new("upper_exact", value, assumptions).extra("theta", int(theta))
}

/// Relaxed upper bound: `r < γθ q^{ℓt(εt+1)} + α - θ`.
pub fn middle_nodes_upper_relaxed(s: &Shape, q: u64, t: u64, cfg: &BoundConfig) -> BoundReport {
    let (h, l, e, a) = s.signed();
    let theta = s.theta();
    let gamma = cfg.gamma(Some(q));
    let exponent = (s.ell * t * (s.epsilon * t + 1)) as f64;
    let value = gamma * theta as f64 * (q as f64).powf(exponent) + (a - theta) as f64;
    let assumptions = vec![
        Assumption::new("alpha >= 2", a >= 2),
        Assumption::new("h - eps >= 2*ell", h - e >= 2 * l),
        q_assumption(q),
        t_assumption(t),
    ];
    BoundReport::new("upper_relaxed", BoundValue::real(value, "bound"), assumptions)
        .extra("theta", int(theta))
        .extra("gamma", BoundValue::Real(gamma))
}

/// Upper bound on `r` for `α = 2`: every subspace of dimension
/// `s = 2ℓt - (h-ε)t + 1` lies in at most one codeword, giving
/// `[ht, s]_q / [ℓt, s]_q`. The relaxed form
/// `γ q^{(h-ℓ)(2ℓ+ε-h)t² + (h-ℓ)t}` is reported as the extra `relaxed`.
pub fn pairwise_upper_bound(s: &Shape, q: u64, t: u64, cfg: &BoundConfig) -> BoundReport {
    let (h, l, e, _) = s.signed();
    let ti = t as i64;
    let sub = 2 * l * ti - (h - e) * ti + 1;
    let assumptions = vec![
        Assumption::new("alpha = 2", s.alpha == 2),
        Assumption::new("2*ell*t - (h-eps)*t + 1 >= 0", sub >= 0),
        Assumption::new("h - eps > ell", h - e > l),
        q_assumption(q),
        t_assumption(t),
    ];
    let value = if sub < 0 || q < 2 {
        BoundValue::Undefined("intersection dimension is negative".into())
    } else {
        let num = gaussian_binomial(s.h * t, sub as u64, q);
        let den = gaussian_binomial(s.ell * t, sub as u64, q);
        if den.is_zero() {
            BoundValue::Undefined("no subspace of the intersection dimension fits".into())
        } else {
            let ratio = BigRational::new(num.into(), den.into());
            if ratio.is_integer() {
                BoundValue::Integer(ratio.to_integer())
            } else {
                BoundValue::Rational(ratio)
            }
        }
    };
    let exponent = (h - l) * (2 * l + e - h) * ti * ti + (h - l) * ti;
    let relaxed = cfg.gamma(Some(q)) * (q as f64).powf(exponent as f64);
    BoundReport::new("upper_pairwise", value, assumptions)
        .extra("intersection_dim", int(sub))
        .extra("relaxed", BoundValue::Real(relaxed))
}

/// Sufficient condition from the local lemma: a (q,t)-linear solution exists
/// whenever `r <= β q^{f(t)/(α-1)}`.
pub fn local_lemma_lower_bound(s: &Shape, q: u64, t: u64, cfg: &BoundConfig) -> BoundReport {
    let gamma = cfg.gamma(Some(q));
    let beta = s.beta(gamma);
    let f = s.local_lemma_exponent(t);
    let a = s.alpha as f64;
    let mut value = beta * (q as f64).powf(f as f64 / (a - 1.0));
    if cfg.local_lemma_plus_one {
        value += 1.0;
    }
    let mut assumptions = s.solvable_assumptions();
    assumptions.push(q_assumption(q));
    assumptions.push(t_assumption(t));
    BoundReport::new("lower_local_lemma", BoundValue::real(value, "bound"), assumptions)
        .extra("f", int(f))
        .extra("beta", BoundValue::Real(beta))
}

/// Sufficient condition from the lifted-MRD construction:
/// `r <= (α-1) q^{g(t)}`, exact.
pub fn lifted_mrd_lower_bound(s: &Shape, q: u64, t: u64) -> BoundReport {
    let (h, l, e, a) = s.signed();
    let g = s.lifted_mrd_exponent(t);
    let assumptions = vec![
        Assumption::new("alpha >= 2", a >= 2),
        Assumption::new("h >= 1 and ell >= 1", h >= 1 && l >= 1),
        Assumption::new("h <= 2*ell + eps", h <= 2 * l + e),
        q_assumption(q),
        t_assumption(t),
    ];
    let factor = BigInt::from(a - 1);
    let value = if g >= 0 {
        BoundValue::Integer(factor * BigInt::from(big_pow(q, g as u64)))
    } else {
        let den = BigInt::from(big_pow(q, g.unsigned_abs()));
        BoundValue::Rational(BigRational::new(factor, den))
    };
    let branch = if h <= 2 * l { "h <= 2*ell" } else { "h > 2*ell" };
    let mut report = BoundReport::new("lower_lifted_mrd", value, assumptions).extra("g", int(g));
    report.assumptions.push(Assumption::new(format!("branch {branch}"), true));
    report
}

/// Upper bound on the probability that one receiver's stacked random block
/// is rank deficient: `2γ q^{(h-αℓ-ε)εt² + (h-αℓ-2ε)t - 1}`.
pub fn bad_event_probability_bound(s: &Shape, q: u64, t: u64, cfg: &BoundConfig) -> BoundReport {
    let (h, l, e, a) = s.signed();
    let ti = t as i64;
    let exponent = (h - a * l - e) * e * ti * ti + (h - a * l - 2 * e) * ti - 1;
    let value = 2.0 * cfg.gamma(Some(q)) * (q as f64).powf(exponent as f64);
    let assumptions = vec![
        Assumption::new("alpha >= 2", a >= 2),
        Assumption::new("h >= 1 and ell >= 1", h >= 1 && l >= 1),
        q_assumption(q),
        t_assumption(t),
    ];
    BoundReport::new("bad_event_bound", BoundValue::real(value, "bound"), assumptions)
        .extra("exponent", int(exponent))
}

/// Exact probability that `α` uniform `ℓt x ht` matrices stack to rank
/// below `(h-ε)t`.
pub fn bad_event_probability(s: &Shape, q: u64, t: u64) -> BigRational {
    let rows = s.alpha * s.ell * t;
    let cols = s.h * t;
    let need = s.h.saturating_sub(s.epsilon) * t;
    let bad: BigUint = (0..need).map(|i| count_rank_matrices(rows, cols, i, q)).sum();
    BigRational::new(bad.into(), big_pow(q, rows * cols).into())
}

/// Number of receivers sharing a middle node with a fixed receiver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DependencyDegree {
    /// `α C(r-1, α-1)`.
    #[serde(serialize_with = "as_string")]
    pub bound: BigUint,
    /// `C(r, α) - C(r-α, α)`; this counts the receiver itself.
    #[serde(serialize_with = "as_string")]
    pub exact: BigUint,
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

pub fn dependency_degree(r: u64, alpha: u64) -> DependencyDegree {
    let bound = binomial(r.saturating_sub(1), alpha.saturating_sub(1)) * alpha;
    let exact = binomial(r, alpha) - binomial(r.saturating_sub(alpha), alpha);
    DependencyDegree { bound, exact }
}

fn branch_note(first: bool, split: &str) -> Assumption {
    let text = if first {
        format!("branch {split}")
    } else {
        format!("branch not ({split})")
    };
    Assumption::new(text, true)
}

fn real_or_undefined(x: f64, what: &str) -> BoundValue {
    if x.is_finite() || x == f64::INFINITY {
        BoundValue::real(x, what)
    } else {
        BoundValue::Undefined(format!("{what} is not a real number here"))
    }
}

fn necessary_value(s: &Shape, r: u64, t: u64, gamma: f64, first: bool) -> BoundValue {
    let (_, l, e, a) = s.signed();
    let exp = 1.0 / (l * (e * t as i64 + 1)) as f64;
    let base = if first {
        let theta = s.theta();
        (r as i64 + theta - a) as f64 / (gamma * theta as f64)
    } else {
        r as f64 / (gamma * (a - 1) as f64)
    };
    if base < 0.0 || !base.is_finite() {
        return BoundValue::Undefined("negative or infinite base".into());
    }
    real_or_undefined(base.powf(exp), "bound")
}

/// Necessary condition: any (q,t)-linear solution has
/// `q^t >= ((r+θ-α)/(γθ))^{1/(ℓ(εt+1))}` when `h >= 2ℓ+ε`, and
/// `q^t >= (r/(γ(α-1)))^{1/(ℓ(εt+1))}` otherwise.
pub fn field_size_necessary(s: &Shape, r: u64, t: u64, cfg: &BoundConfig) -> BoundReport {
    let (h, l, e, a) = s.signed();
    let first = h >= 2 * l + e;
    let gamma = cfg.gamma(None);
    let mut assumptions = vec![
        Assumption::new("alpha >= 2", a >= 2),
        Assumption::new("r >= 1", r >= 1),
        t_assumption(t),
        branch_note(first, "h >= 2*ell + eps"),
    ];
    if first {
        assumptions.push(Assumption::new("theta >= 1", s.theta() >= 1));
    }
    let mut report = BoundReport::new(
        "field_necessary",
        necessary_value(s, r, t, gamma, first),
        assumptions,
    );
    if first {
        report = report.extra("theta", int(s.theta()));
    }
    if s.on_boundary() {
        report = report.extra("other_branch", necessary_value(s, r, t, gamma, false));
    }
    report
}

fn sufficient_value(s: &Shape, r: u64, t: u64, gamma: f64, first: bool) -> BoundValue {
    let a = s.alpha as f64;
    let (base, exp) = if first {
        let f = s.local_lemma_exponent(t);
        if f <= 0 {
            return BoundValue::Undefined("local-lemma exponent is not positive".into());
        }
        (r as f64 / s.beta(gamma), (a - 1.0) * t as f64 / f as f64)
    } else {
        let g = s.lifted_mrd_exponent(t);
        if g <= 0 {
            return BoundValue::Undefined("lifted-MRD exponent is not positive".into());
        }
        (r as f64 / (a - 1.0), t as f64 / g as f64)
    };
    real_or_undefined(base.powf(exp), "bound")
}

/// Sufficient condition: a (q,t)-linear solution exists once `q^t` reaches
/// `(r/β)^{(α-1)t/f(t)}` when `h >= 2ℓ+ε`, or `(r/(α-1))^{t/g(t)}` otherwise.
/// On the boundary `h = 2ℓ+ε` the second form is reported as `other_branch`.
pub fn field_size_sufficient(s: &Shape, r: u64, t: u64, cfg: &BoundConfig) -> BoundReport {
    let (h, l, e, a) = s.signed();
    let first = h >= 2 * l + e;
    let gamma = cfg.gamma(None);
    let assumptions = vec![
        Assumption::new("alpha >= 2", a >= 2),
        Assumption::new("r >= 1", r >= 1),
        t_assumption(t),
        Assumption::new("h <= alpha*ell + eps", h <= a * l + e),
        branch_note(first, "h >= 2*ell + eps"),
    ];
    let mut report = BoundReport::new(
        "field_sufficient",
        sufficient_value(s, r, t, gamma, first),
        assumptions,
    );
    report = if first {
        report.extra("f", int(s.local_lemma_exponent(t)))
    } else {
        report.extra("g", int(s.lifted_mrd_exponent(t)))
    };
    if s.on_boundary() {
        report = report
            .extra("g", int(s.lifted_mrd_exponent(t)))
            .extra("other_branch", sufficient_value(s, r, t, gamma, false));
    }
    report
}

/// Smallest `t >= 1` with `pred(t)`, up to [`MAX_BLOCKLENGTH`].
fn first_blocklength(mut pred: impl FnMut(u64) -> bool) -> Option<u64> {
    (1..=MAX_BLOCKLENGTH).find(|&t| pred(t))
}

fn gap_assumptions(s: &Shape, r: u64) -> Vec<Assumption> {
    let mut v = s.solvable_assumptions();
    v.push(Assumption::new("r >= 1", r >= 1));
    v
}

/// Gap lower bound from comparing the necessary scalar field size with the
/// smallest binary blocklength that the sufficient conditions guarantee.
///
/// For `h >= 2ℓ+ε`: `log2((r+θ-α)/(γθ)) / (ℓ(ε+1)) - t`, with `t` the
/// smallest blocklength such that `2^{f(t)/(α-1)} >= r/β`. Otherwise:
/// `log2(r/(γ(α-1))) / (ℓ(ε+1)) - t`, with `t` the smallest blocklength such
/// that `2^{g(t)} >= r/(α-1)`.
pub fn gap_lower_bound(s: &Shape, r: u64, cfg: &BoundConfig) -> BoundReport {
    let (h, l, e, a) = s.signed();
    let first = h >= 2 * l + e;
    let gamma = cfg.gamma(None);
    let per_link = (l * (e + 1)) as f64;
    let mut assumptions = gap_assumptions(s, r);
    assumptions.push(branch_note(first, "h >= 2*ell + eps"));

    let (scalar_bits, t, key) = if first {
        let theta = s.theta();
        let bits = ((r as i64 + theta - a) as f64 / (gamma * theta as f64)).log2();
        let target = (r as f64 / s.beta(gamma)).log2();
        let t = first_blocklength(|t| s.local_lemma_exponent(t) as f64 / (a - 1) as f64 >= target);
        (bits, t, "t_local_lemma")
    } else {
        let bits = (r as f64 / (gamma * (a - 1) as f64)).log2();
        let r_big = BigUint::from(r);
        let t = first_blocklength(|t| {
            let g = s.lifted_mrd_exponent(t);
            g >= 0 && big_pow(2, g as u64) * (a - 1).max(0) as u64 >= r_big
        });
        (bits, t, "t_lifted_mrd")
    };

    match t {
        Some(t) => BoundReport::new(
            "gap_search",
            real_or_undefined(scalar_bits / per_link - t as f64, "bound"),
            assumptions,
        )
        .extra(key, int(t as i64)),
        None => BoundReport::new(
            "gap_search",
            BoundValue::Undefined(format!("no blocklength up to {MAX_BLOCKLENGTH} suffices")),
            assumptions,
        ),
    }
}

/// Closed-form gap lower bound for `ε >= 1`.
///
/// With `L = log2(r/(α-1))`: `(L-2)/(ℓ(ε+1)) - sqrt(L/(ℓε))` when
/// `h <= 2ℓ+ε`, and `log2((r+θ-α)/(γθ))/(ℓ(ε+1)) - sqrt((α-1)log2(r/β) /
/// ((αℓ+ε-h)ε))` otherwise.
pub fn gap_lower_bound_closed_form(s: &Shape, r: u64, cfg: &BoundConfig) -> BoundReport {
    let (h, l, e, a) = s.signed();
    let first = h <= 2 * l + e;
    let gamma = cfg.gamma(None);
    let per_link = (l * (e + 1)) as f64;
    let mut assumptions = gap_assumptions(s, r);
    assumptions.push(Assumption::new("eps >= 1", e >= 1));
    assumptions.push(branch_note(first, "h <= 2*ell + eps"));

    let value = if e == 0 {
        BoundValue::Undefined("needs at least one direct link".into())
    } else if first {
        let big_l = (r as f64 / (a - 1) as f64).log2();
        real_or_undefined((big_l - 2.0) / per_link - (big_l / (l * e) as f64).sqrt(), "bound")
    } else {
        let slack = (a * l + e - h) * e;
        if slack <= 0 {
            BoundValue::Undefined("alpha*ell + eps - h must be positive".into())
        } else {
            let theta = s.theta();
            let scalar = ((r as i64 + theta - a) as f64 / (gamma * theta as f64)).log2();
            let vector = ((a - 1) as f64 * (r as f64 / s.beta(gamma)).log2() / slack as f64).sqrt();
            real_or_undefined(scalar / per_link - vector, "bound")
        }
    };
    BoundReport::new("gap_closed_form", value, assumptions)
}

/// Every bound that applies at a fixed `(q, t)` and `r`, in a fixed order.
pub fn all_bounds(s: &Shape, q: u64, t: u64, r: u64, cfg: &BoundConfig) -> Vec<BoundReport> {
    vec![
        middle_nodes_upper_exact(s, q, t),
        middle_nodes_upper_relaxed(s, q, t, cfg),
        pairwise_upper_bound(s, q, t, cfg),
        local_lemma_lower_bound(s, q, t, cfg),
        lifted_mrd_lower_bound(s, q, t),
        bad_event_probability_bound(s, q, t, cfg),
        field_size_necessary(s, r, t, cfg),
        field_size_sufficient(s, r, t, cfg),
        gap_lower_bound(s, r, cfg),
        gap_lower_bound_closed_form(s, r, cfg),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG: BoundConfig = BoundConfig {
        gamma: GammaMode::Rounded,
        local_lemma_plus_one: false,
    };

    fn real(r: &BoundReport) -> f64 {
        r.value.to_f64().unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn gamma_constants() {
        assert!(close(gamma_exact(2), 3.462746619, 1e-8));
        assert!(gamma_exact(3) < gamma_exact(2));
        assert!(gamma_exact(2) < GAMMA);
        let cfg = BoundConfig {
            gamma: GammaMode::Exact,
            ..CFG
        };
        assert_eq!(cfg.gamma(None), gamma_exact(2));
        assert_eq!(CFG.gamma(Some(5)), GAMMA);
    }

    #[test]
    fn derived_constants() {
        let s = Shape::new(3, 1, 1, 2);
        assert_eq!(s.local_lemma_exponent(1), 2);
        assert!(close(s.beta(GAMMA), 0.026428120773810515, 1e-15));
        assert_eq!(Shape::new(2, 1, 0, 2).local_lemma_exponent(5), 1);
        assert_eq!(Shape::new(3, 1, 1, 2).lifted_mrd_exponent(1), 2);
        assert_eq!(Shape::new(2, 1, 0, 2).lifted_mrd_exponent(1), 1);
        assert_eq!(Shape::new(2, 1, 1, 2).lifted_mrd_exponent(3), 12);
        assert_eq!(Shape::new(4, 1, 0, 4).theta(), 1);
        assert_eq!(Shape::new(4, 1, 0, 5).theta(), 2);
    }

    #[test]
    fn upper_exact_examples() {
        let r = middle_nodes_upper_exact(&Shape::new(4, 1, 0, 2), 2, 1);
        assert_eq!(r.value, int(-1));
        assert!(!r.valid);

        // ε = 0: one ambient space, bound θ(q^{ℓt+1}-1)/(q-1) + floor - 2
        let r = middle_nodes_upper_exact(&Shape::new(4, 1, 0, 4), 2, 1);
        assert_eq!(r.value, int(5));
        assert!(r.valid);
        let r = middle_nodes_upper_exact(&Shape::new(4, 2, 0, 2), 3, 1);
        assert_eq!(r.value, int(13));
    }

    #[test]
    fn upper_relaxed_examples() {
        let r = middle_nodes_upper_relaxed(&Shape::new(4, 1, 0, 4), 2, 1, &CFG);
        assert!(close(real(&r), 9.96, 1e-12));
        assert!(r.valid);
        let next = middle_nodes_upper_relaxed(&Shape::new(4, 1, 0, 5), 2, 1, &CFG);
        assert_eq!(next.extra_value("theta"), Some(&int(2)));
        assert!(!middle_nodes_upper_relaxed(&Shape::new(3, 1, 2, 4), 2, 1, &CFG).valid);
    }

    #[test]
    fn pairwise_examples() {
        let r = pairwise_upper_bound(&Shape::new(2, 1, 0, 2), 2, 1, &CFG);
        assert_eq!(r.value, int(3));
        assert!(r.valid);
        let r = pairwise_upper_bound(&Shape::new(3, 1, 1, 2), 2, 1, &CFG);
        assert_eq!(r.value, int(7));
        let r = pairwise_upper_bound(&Shape::new(4, 2, 1, 2), 2, 1, &CFG);
        assert_eq!(r.extra_value("intersection_dim"), Some(&int(2)));
        assert_eq!(r.value, int(35));
        let bad = pairwise_upper_bound(&Shape::new(5, 1, 0, 2), 2, 1, &CFG);
        assert!(!bad.valid);
        assert!(matches!(bad.value, BoundValue::Undefined(_)));
    }

    #[test]
    fn local_lemma_examples() {
        let r = local_lemma_lower_bound(&Shape::new(3, 1, 1, 2), 11, 1, &CFG);
        assert!(close(real(&r), 3.1978026, 1e-6));
        assert_eq!(r.extra_value("f"), Some(&int(2)));
        assert!(r.valid);
        let plus = BoundConfig {
            local_lemma_plus_one: true,
            ..CFG
        };
        let r1 = local_lemma_lower_bound(&Shape::new(3, 1, 1, 2), 11, 1, &plus);
        assert!(close(real(&r1) - real(&r), 1.0, 1e-12));
    }

    #[test]
    fn lifted_mrd_examples() {
        let r = lifted_mrd_lower_bound(&Shape::new(3, 1, 1, 2), 2, 1);
        assert_eq!(r.value, int(4));
        assert!(r.valid);
        for q in [2, 3, 5] {
            assert_eq!(lifted_mrd_lower_bound(&Shape::new(2, 1, 0, 2), q, 1).value, int(q as i64));
        }
        assert_eq!(lifted_mrd_lower_bound(&Shape::new(3, 1, 1, 3), 2, 1).value, int(8));
        assert!(!lifted_mrd_lower_bound(&Shape::new(4, 1, 1, 3), 2, 1).valid);
    }

    #[test]
    fn bad_event_examples() {
        let r = bad_event_probability_bound(&Shape::new(3, 1, 1, 2), 11, 1, &CFG);
        assert_eq!(r.extra_value("exponent"), Some(&int(-2)));
        assert!(close(real(&r), 2.0 * GAMMA / 121.0, 1e-12));

        let s = Shape::new(2, 1, 0, 2);
        assert_eq!(bad_event_probability(&s, 2, 1), BigRational::new(10.into(), 16.into()));
        assert!(bad_event_probability(&s, 2, 1).to_f64().unwrap() <= real(&bad_event_probability_bound(&s, 2, 1, &CFG)));
        // ε = h: nothing can go wrong
        assert!(bad_event_probability(&Shape::new(2, 1, 2, 2), 3, 1).is_zero());
    }

    #[test]
    fn dependency_examples() {
        let d = dependency_degree(5, 2);
        assert_eq!((d.bound, d.exact), (BigUint::from(8u32), BigUint::from(7u32)));
        let d = dependency_degree(3, 3);
        assert_eq!(d.exact, BigUint::one());
        assert_eq!(binomial(3, 5), BigUint::zero());
    }

    #[test]
    fn field_size_examples() {
        let r = field_size_necessary(&Shape::new(4, 1, 0, 4), 20, 1, &CFG);
        assert!(close(real(&r), 17.0 / 3.48, 1e-12));
        assert!(r.valid);

        let r = field_size_sufficient(&Shape::new(3, 1, 1, 2), 3, 1, &CFG);
        assert!(close(real(&r), 10.654363, 1e-6));

        let r = field_size_sufficient(&Shape::new(2, 1, 0, 2), 3, 1, &CFG);
        assert!(close(real(&r), 113.515449, 1e-5));
        assert!(close(r.extra_value("other_branch").unwrap().to_f64().unwrap(), 3.0, 1e-12));

        let inside = field_size_sufficient(&Shape::new(3, 2, 0, 2), 3, 1, &CFG);
        assert!(inside.extra_value("other_branch").is_none());
        assert_eq!(inside.extra_value("g"), Some(&int(2)));
    }

    #[test]
    fn gap_examples() {
        let s = Shape::new(2, 1, 1, 2);
        let r = gap_lower_bound(&s, 1 << 20, &CFG);
        assert_eq!(r.extra_value("t_lifted_mrd"), Some(&int(4)));
        assert!(close(real(&r), 5.100456, 1e-6));
        // h = ℓ + ε is a trivial network: every r is solvable over GF(2)
        assert!(!r.valid);
        assert!(r.valid_except_standing());

        let c = gap_lower_bound_closed_form(&s, 1 << 20, &CFG);
        assert!(close(real(&c), 9.0 - 20f64.sqrt(), 1e-12));

        let small = gap_lower_bound(&s, 1, &CFG);
        assert!(real(&small) <= 0.0);
        assert_eq!(small.extra_value("t_lifted_mrd"), Some(&int(1)));

        let no_direct = gap_lower_bound_closed_form(&Shape::new(2, 1, 0, 2), 1 << 20, &CFG);
        assert!(!no_direct.valid);
    }

    #[test]
    fn gap_search_that_never_ends() {
        // h = αℓ with ε = 0 makes the local-lemma exponent constant
        let r = gap_lower_bound(&Shape::new(4, 1, 0, 4), 1 << 20, &CFG);
        assert!(matches!(r.value, BoundValue::Undefined(_)));
        assert!(!r.valid);
    }

    #[test]
    fn first_branch_blocklength_is_one_below_threshold() {
        let s = Shape::new(4, 1, 1, 4);
        let beta = s.beta(GAMMA);
        let reach = beta * 2f64.powf(s.local_lemma_exponent(1) as f64 / 3.0);
        let r = gap_lower_bound(&s, reach.floor().max(1.0) as u64, &CFG);
        assert_eq!(r.extra_value("t_local_lemma"), Some(&int(1)));
    }

    #[test]
    fn display_formats() {
        assert_eq!(int(7).to_string(), "7");
        assert_eq!(BoundValue::Real(1.0 / 3.0).to_string(), "0.333333");
        assert_eq!(BoundValue::Undefined("x".into()).to_string(), "NA");
        let rat = BoundValue::Rational(BigRational::new(1.into(), 4.into()));
        assert_eq!(rat.to_string(), "0.250000");
        assert_eq!(rat.exact_string(), "1/4");
    }

    #[test]
    fn report_serializes() {
        let r = pairwise_upper_bound(&Shape::new(2, 1, 0, 2), 2, 1, &CFG);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["value"]["kind"], "integer");
        assert_eq!(json["value"]["value"], "3");
        assert_eq!(json["valid"], true);
    }
}
