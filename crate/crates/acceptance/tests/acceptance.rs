//! Acceptance checks. Runs every criterion, prints one line each, and exits
//! non-zero if any failed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gencomb::bounds::{self, BoundConfig, Shape};
use gencomb::combnet::{self, NetworkParams};
use gencomb::ffield::FieldSpec;
use gencomb::grassmann::{self, enumerate_grassmannian, CoveringCode, DEFAULT_NODE_LIMIT};
use gencomb::linalg::{count_rank_matrices, gaussian_binomial, Matrix};
use gencomb::rankmetric::{covering_code_from_lifted_mrd, lifted_mrd_code, lifted_mrd_covering_size};
use num_bigint::BigUint;
use num_traits::{pow, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn gf(q: u64) -> FieldSpec {
    FieldSpec::from_order(q).unwrap()
}

fn params(h: usize, r: usize, alpha: usize, ell: usize, epsilon: usize) -> NetworkParams {
    NetworkParams::new(h, r, alpha, ell, epsilon).unwrap()
}

fn qbinomial_sandwich() -> Outcome {
    let mut checked = 0;
    for q in [2u64, 3, 4] {
        for n in 0..=8u64 {
            for k in 0..=n {
                let value = gaussian_binomial(n, k, q);
                let base = pow(BigUint::from(q), (k * (n - k)) as usize);
                // value < 3.48 * base, in integers
                if value < base || &value * 100u32 >= &base * 348u32 {
                    return outcome(false, format!("[{n} {k}]_{q} = {value} outside [{base}, 3.48*{base})"));
                }
                checked += 1;
            }
        }
    }
    outcome(true, format!("{checked} binomials"))
}

fn rank_count_partition() -> Outcome {
    for q in [2u64, 3] {
        for m in 1..=4u64 {
            for n in 1..=4u64 {
                let total: BigUint = (0..=m.min(n)).map(|s| count_rank_matrices(m, n, s, q)).sum();
                if total != pow(BigUint::from(q), (m * n) as usize) {
                    return outcome(false, format!("sum over ranks of {m}x{n} over GF({q}) is {total}"));
                }
            }
        }
    }
    let f = gf(2);
    let rank_one = (0..16u32)
        .filter(|bits| {
            let data = (0..4).map(|i| (bits >> i) & 1).collect();
            Matrix::from_flat(&f, 2, 2, data).unwrap().rank() == 1
        })
        .count();
    let formula = count_rank_matrices(2, 2, 1, 2);
    outcome(
        rank_one == 9 && formula == BigUint::from(9u32),
        format!("M(2,2,1,2): enumerated {rank_one}, formula {formula}"),
    )
}

fn lifted_mrd_construction() -> Outcome {
    let mut sizes = Vec::new();
    for (n, k, delta, alpha, q) in [(3, 1, 1, 2, 2u64), (3, 1, 1, 3, 2), (4, 2, 2, 2, 2), (4, 1, 1, 2, 3)] {
        let code = covering_code_from_lifted_mrd(&gf(q), n, k, delta, alpha).unwrap();
        let covering = grassmann::is_covering_code(&code).unwrap().covering;
        let expected = (alpha - 1) * (q as usize).pow((k.max(n - k) * (k.min(n - k) - delta + 1)) as u32);
        let formula = lifted_mrd_covering_size(n, k, delta, alpha, q as u32).to_usize().unwrap();
        if !covering || code.len() != expected || formula != expected {
            return outcome(
                false,
                format!("({n},{k},{delta},{alpha},{q}): covering={covering} size={} expected {expected}", code.len()),
            );
        }
        sizes.push(code.len());
    }
    outcome(true, format!("sizes {sizes:?}"))
}

fn lifted_mrd_distance() -> Outcome {
    let f = gf(2);
    let mut report = Vec::new();
    for delta in [2, 1] {
        let code = lifted_mrd_code(&f, 4, 2, delta).unwrap();
        let mut worst = 0;
        for (i, a) in code.codewords.iter().enumerate() {
            for b in &code.codewords[i + 1..] {
                worst = worst.max(a.intersection_dim(b).unwrap());
            }
        }
        if worst > 2 - delta {
            return outcome(false, format!("delta={delta}: intersection dim {worst} > {}", 2 - delta));
        }
        report.push(format!("delta={delta}: {} codewords, max intersection {worst}", code.codewords.len()));
    }
    outcome(true, report.join(", "))
}

fn oracle_sandwich() -> Outcome {
    let cfg = BoundConfig::default();
    let mut report = Vec::new();
    let mut ok = true;
    // (n, k, δ) = (h, ℓ, h-ℓ-ε) at t = 1
    for ((n, k, delta), (h, ell, eps), want) in [((2, 1, 1), (2u64, 1u64, 0u64), 3usize), ((3, 1, 1), (3, 1, 1), 7)] {
        let b = grassmann::max_covering_code_bruteforce(n, k, delta, 2, &gf(2), DEFAULT_NODE_LIMIT).unwrap();
        let shape = Shape::new(h, ell, eps, 2);
        let lower = bounds::lifted_mrd_lower_bound(&shape, 2, 1).value.to_f64().unwrap();
        let upper = bounds::pairwise_upper_bound(&shape, 2, 1, &cfg);
        let upper_exact = upper.value.as_integer().and_then(|v| v.to_usize());
        ok &= b.exact
            && b.size == want
            && lower <= b.size as f64
            && upper_exact == Some(want)
            && b.size <= want;
        report.push(format!("B_2({n},{k},{delta};2)={} exact={} lower={lower} upper={upper_exact:?}", b.size, b.exact));
    }
    outcome(ok, report.join(", "))
}

fn code_solution_round_trip() -> Outcome {
    let f = gf(2);
    let lines = enumerate_grassmannian(3, 1, &f).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut covering, mut failing) = (0, 0);
    for _ in 0..50 {
        // drawn with replacement so repeated lines exercise failing codes
        let r = rng.random_range(2..=lines.len());
        let words: Vec<_> = (0..r).map(|_| lines[rng.random_range(0..lines.len())].clone()).collect();
        let code = CoveringCode::new(&f, 3, 1, 1, 2, words).unwrap();
        let by_code = grassmann::is_covering_code(&code).unwrap().covering;
        let sol = combnet::solution_from_code(&code, &params(3, r, 2, 1, 1), 1).unwrap();
        let by_network = combnet::verify_solution(&sol).unwrap().valid;
        if by_code != by_network {
            return outcome(false, format!("disagreement on a code of size {r}"));
        }
        if by_code {
            covering += 1;
        } else {
            failing += 1;
        }
    }
    outcome(true, format!("50 agree ({covering} covering, {failing} not)"))
}

fn simulation_soundness() -> Outcome {
    let f = gf(2);
    let three_lines = CoveringCode::new(&f, 2, 1, 1, 2, enumerate_grassmannian(2, 1, &f).unwrap()).unwrap();
    let lifted = covering_code_from_lifted_mrd(&f, 3, 1, 1, 2).unwrap();
    let networks = [
        combnet::solution_from_code(&three_lines, &params(2, 3, 2, 1, 0), 1).unwrap(),
        combnet::solution_from_code(&lifted, &params(3, 4, 2, 1, 1), 1).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut decodes = 0;
    for sol in &networks {
        for _ in 0..100 {
            let msgs: Vec<Vec<u32>> = (0..sol.params().h).map(|_| vec![rng.random_range(0..2)]).collect();
            match combnet::simulate(sol, &msgs) {
                Ok(out) if out.iter().all(|o| o.messages == msgs) => decodes += out.len(),
                Ok(_) => return outcome(false, "wrong decoding"),
                Err(e) => return outcome(false, e.to_string()),
            }
        }
    }
    outcome(true, format!("{decodes} receiver decodings exact"))
}

fn scalar_field_size() -> Outcome {
    let four = combnet::compute_qs(&params(2, 4, 2, 1, 0), 16, DEFAULT_NODE_LIMIT).unwrap();
    let three = combnet::compute_qs(&params(2, 3, 2, 1, 0), 16, DEFAULT_NODE_LIMIT).unwrap();
    outcome(
        four.value == Some(3) && four.exact && three.value == Some(2) && three.exact,
        format!(
            "r=4: {:?} exact={}, r=3: {:?} exact={}",
            four.value, four.exact, three.value, three.exact
        ),
    )
}

fn local_lemma_search() -> Outcome {
    let p = params(3, 3, 2, 1, 1);
    let shape = Shape::from(&p);
    let bound = bounds::local_lemma_lower_bound(&shape, 11, 1, &BoundConfig::default());
    let in_region = (p.r as f64) <= bound.value.to_f64().unwrap();
    let found = combnet::random_solution_search(&p, &gf(11), 1, 1000, 0).unwrap();
    let valid = found
        .solution
        .as_ref()
        .is_some_and(|s| combnet::verify_solution(s).unwrap().valid);
    outcome(
        in_region && valid,
        format!("r=3 <= {} ; found at trial {:?}", bound.value, found.trial),
    )
}

fn monte_carlo_bad_event() -> Outcome {
    let p = params(2, 2, 2, 1, 0);
    let draws = 100_000;
    let bad = combnet::count_bad_events(&p, &gf(2), 1, draws, 10).unwrap();
    let rate = bad as f64 / draws as f64;
    let shape = Shape::from(&p);
    let bound = bounds::bad_event_probability_bound(&shape, 2, 1, &BoundConfig::default())
        .value
        .to_f64()
        .unwrap();
    let exact = bounds::bad_event_probability(&shape, 2, 1);
    outcome(
        rate <= bound,
        format!("empirical {rate:.5} (exact {exact}) <= bound {bound}"),
    )
}

fn gap_consistency() -> Outcome {
    let cfg = BoundConfig::default();
    let mut tuples = Vec::new();
    'outer: for ell in 1..=3u64 {
        for eps in 1..=3u64 {
            for alpha in 2..=4u64 {
                for h in ell + eps + 1..=alpha * ell + eps {
                    for k in [8u32, 12, 16, 20, 24, 28, 32, 40] {
                        let shape = Shape::new(h, ell, eps, alpha);
                        let search = bounds::gap_lower_bound(&shape, 1 << k, &cfg);
                        let closed = bounds::gap_lower_bound_closed_form(&shape, 1 << k, &cfg);
                        if search.valid && closed.valid {
                            tuples.push((shape, k, search.value.to_f64().unwrap(), closed.value.to_f64().unwrap()));
                        }
                        if tuples.len() == 200 {
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    let violations: Vec<_> = tuples.iter().filter(|(_, _, s, c)| c > &(s + 1e-9)).collect();

    let shape = Shape::new(2, 1, 1, 2);
    let ks: Vec<f64> = (10..=30).map(f64::from).collect();
    let ys: Vec<f64> = (10..=30)
        .map(|k| bounds::gap_lower_bound(&shape, 1u64 << k, &cfg).value.to_f64().unwrap())
        .collect();
    let (mk, my) = (ks.iter().sum::<f64>() / 21.0, ys.iter().sum::<f64>() / 21.0);
    let slope = ks.iter().zip(&ys).map(|(x, y)| (x - mk) * (y - my)).sum::<f64>()
        / ks.iter().map(|x| (x - mk).powi(2)).sum::<f64>();
    let target = 1.0 / (1.0 * (1.0 + 1.0));
    let slope_ok = (slope - target).abs() <= 0.1 * target;

    let mut detail = format!(
        "{} of {} tuples have closed form above search bound; slope {slope:.4} vs {target} +-10%",
        violations.len(),
        tuples.len()
    );
    if let Some((s, k, search, closed)) = violations.first() {
        detail.push_str(&format!(
            "; first: (h,ell,eps,alpha)=({},{},{},{}) r=2^{k}: {closed:.3} > {search:.3}",
            s.h, s.ell, s.epsilon, s.alpha
        ));
    }
    outcome(tuples.len() == 200 && violations.is_empty() && slope_ok, detail)
}

fn dependency_count() -> Outcome {
    let mut checked = 0;
    for r in 2..=30u64 {
        for alpha in 2..=r {
            let d = bounds::dependency_degree(r, alpha);
            if d.exact > d.bound {
                return outcome(false, format!("r={r} alpha={alpha}: {} > {}", d.exact, d.bound));
            }
            checked += 1;
        }
    }
    outcome(true, format!("{checked} pairs"))
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("q-binomial sandwich", qbinomial_sandwich, Duration::from_secs(1)),
        ("rank-count partition", rank_count_partition, Duration::from_secs(1)),
        ("lifted-MRD covering construction", lifted_mrd_construction, Duration::from_secs(10)),
        ("lifted-MRD subspace distance", lifted_mrd_distance, Duration::from_secs(5)),
        ("brute-force oracle sandwich", oracle_sandwich, Duration::from_secs(30)),
        ("code/solution round trip", code_solution_round_trip, Duration::from_secs(10)),
        ("simulation soundness", simulation_soundness, Duration::from_secs(5)),
        ("scalar field size exactness", scalar_field_size, Duration::from_secs(30)),
        ("local-lemma regime search", local_lemma_search, Duration::from_secs(10)),
        ("Monte-Carlo bad-event rate", monte_carlo_bad_event, Duration::from_secs(30)),
        ("gap-bound consistency and slope", gap_consistency, Duration::from_secs(5)),
        ("dependency count", dependency_count, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *limit;
        let ok = out.ok && in_time;
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<34} {} ({:.3}s, limit {}s) {}{}",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs(),
            out.detail,
            if in_time { "" } else { " [over time limit]" }
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
