//! Attacks and experiments against the shuffle proof: sum/product
//! counterexample search and transcript forgery, both monotone-test attacks,
//! the response-window infeasibility experiment, and the honest-prover
//! correctness-failure measurement with an exact analytic oracle.

use std::collections::BTreeMap;
use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::elgamal::{encrypt, Ciphertext, Permutation, ShuffleWitness};
use crate::group::{
    mod_inv, primes_in_range, serde_bigint_vec, SecurityParams,
};
use crate::proof::{
    attach_range_proofs, check_sum_product, commit_phase, respond, run_protocol, setup_honest,
    verify, ChallengePrimes, ProofMode, ProtocolRun, ProverState, ShuffleInstance,
};
use crate::seed;
use crate::Error;

/// A prime vector together with a sum/product-equivalent exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackVector {
    #[serde(with = "serde_bigint_vec")]
    pub p: Vec<BigInt>,
    #[serde(with = "serde_bigint_vec")]
    pub rho: Vec<BigInt>,
    pub is_permutation: bool,
}

impl AttackVector {
    /// Build a vector, asserting the sum/product relation holds.
    pub fn new(p: Vec<BigInt>, rho: Vec<BigInt>) -> Self {
        assert!(check_sum_product(&p, &rho), "sum/product relation violated");
        let is_permutation = multiset_equal(&p, &rho);
        AttackVector { p, rho, is_permutation }
    }
}

fn multiset_equal(a: &[BigInt], b: &[BigInt]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    b.sort();
    a == b
}

/// Outcome of one attack or experiment run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttackReport {
    pub attack_name: String,
    pub params: SecurityParams,
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub analytic_bound: Option<f64>,
    pub seed: u64,
    pub details: BTreeMap<String, serde_json::Value>,
}

impl AttackReport {
    fn new(name: &str, params: &SecurityParams, trials: u64, successes: u64, seed: u64) -> Self {
        AttackReport {
            attack_name: name.to_string(),
            params: params.clone(),
            trials,
            successes,
            rate: successes as f64 / trials as f64,
            analytic_bound: None,
            seed,
            details: BTreeMap::new(),
        }
    }
}

/// Enumerate all set partitions of `{0..n-1}` as restricted-growth strings,
/// calling `f` with the block assignment.
fn for_each_partition(n: usize, f: &mut impl FnMut(&[usize], usize)) {
    fn rec(assign: &mut Vec<usize>, max_block: usize, n: usize, f: &mut impl FnMut(&[usize], usize)) {
        if assign.len() == n {
            f(assign, max_block);
            return;
        }
        for b in 0..=max_block {
            assign.push(b);
            rec(assign, max_block.max(b + 1), n, f);
            assign.pop();
        }
    }
    rec(&mut Vec::with_capacity(n), 0, n, f);
}

/// Exhaustive search over the construction space: each `rho` entry is +-1 or
/// a signed product of a sub-multiset of `p`, the sub-multisets partition `p`,
/// and both the sum and the product match. Returns up to `budget`
/// non-permutation vectors.
pub fn search_counterexamples(p: &[BigInt], budget: usize) -> Vec<AttackVector> {
    assert!(budget >= 1);
    let n = p.len();
    let p_sum: BigInt = p.iter().sum();
    let mut seen: HashSet<Vec<BigInt>> = HashSet::new();
    let mut found: Vec<AttackVector> = Vec::new();

    for_each_partition(n, &mut |assign, k| {
        if found.len() >= budget {
            return;
        }
        // block values: product of the primes assigned to each block
        let mut values = vec![BigInt::one(); k];
        for (idx, &b) in assign.iter().enumerate() {
            values[b] *= &p[idx];
        }
        let ones = n - k; // entries left for +-1
        for signs in 0u32..(1 << k) {
            if found.len() >= budget {
                return;
            }
            let mut signed_sum = BigInt::zero();
            let mut neg_blocks = 0u32;
            for (b, v) in values.iter().enumerate() {
                if signs >> b & 1 == 1 {
                    signed_sum -= v;
                    neg_blocks += 1;
                } else {
                    signed_sum += v;
                }
            }
            // need a - b = w with a + b = ones, so w must fit and share parity
            let w = &p_sum - &signed_sum;
            let Some(w) = w.to_i64() else { continue };
            let ones = ones as i64;
            if w.abs() > ones || (w + ones) % 2 != 0 {
                continue;
            }
            let plus = ((ones + w) / 2) as usize;
            let minus = ((ones - w) / 2) as usize;
            // product sign: negative blocks plus -1 entries must be even
            if (neg_blocks as usize + minus) % 2 != 0 {
                continue;
            }
            let mut rho: Vec<BigInt> = values
                .iter()
                .enumerate()
                .map(|(b, v)| if signs >> b & 1 == 1 { -v } else { v.clone() })
                .collect();
            rho.extend(std::iter::repeat(BigInt::one()).take(plus));
            rho.extend(std::iter::repeat(-BigInt::one()).take(minus));
            if multiset_equal(p, &rho) {
                continue;
            }
            let mut key = rho.clone();
            key.sort();
            if seen.insert(key) {
                found.push(AttackVector::new(p.to_vec(), rho));
            }
        }
    });
    found
}

/// Extend a counterexample by honest extra primes: appended to both sides,
/// the sum/product relation is preserved and the vector stays invalid.
pub fn extend_counterexample(vec: &AttackVector, p_extra: &[BigInt]) -> AttackVector {
    let mut p = vec.p.clone();
    let mut rho = vec.rho.clone();
    p.extend_from_slice(p_extra);
    rho.extend_from_slice(p_extra);
    AttackVector::new(p, rho)
}

/// Whether the forging shuffler publishes its outputs before or after the
/// challenge primes are fixed. The adaptive attack needs the primes first;
/// with outputs first the batch equality only holds by luck.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimeOrdering {
    PrimesFirst,
    OutputsFirst,
}

/// Inclusive window for an announcement mask `r` such that `d = c*rho + r`
/// stays in `[0, 2^(K3+K4+K5) - 1]` for every challenge `c`.
pub fn response_window(rho: &BigInt, sec: &SecurityParams) -> Result<(BigInt, BigInt), Error> {
    let (c_lo, c_hi) = sec.challenge_range();
    let m_d = sec.d_modulus();
    // d is monotone in c, so only the window's corner challenges matter
    let (lo, hi) = if rho.is_negative() {
        (-(&c_hi * rho), &m_d - BigInt::one() - &c_lo * rho)
    } else {
        (BigInt::zero(), &m_d - BigInt::one() - &c_hi * rho)
    };
    if lo > hi {
        return Err(Error::EmptyAttackWindow);
    }
    Ok((lo, hi))
}

/// One forged protocol run, with the plaintext exponents kept for inspection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForgeRun {
    pub instance: ShuffleInstance,
    pub run: ProtocolRun,
    /// true iff the decrypted output multiset equals the input multiset
    pub messages_preserved: bool,
}

/// Forge an accepting transcript for a non-permutation `rho`: the attacker
/// plays both message provider and shuffler, publishes fresh encryptions as
/// outputs, and picks all transcript randomness inside windows where no
/// ORIGINAL-mode reduction and no MSBMT bound can bite.
pub fn forge_transcript(
    sec: &SecurityParams,
    vec: &AttackVector,
    mode: ProofMode,
    ordering: PrimeOrdering,
    group_bits: u64,
    seed_val: u64,
) -> Result<ForgeRun, Error> {
    if mode == ProofMode::Fixed {
        return Err(Error::AttackNotApplicable(
            "the bit-decomposition range proof rejects non-permutation exponents".into(),
        ));
    }
    sec.validate()?;
    let n = vec.p.len();
    let params = crate::elgamal::gen_elgamal_params(group_bits, seed_val);
    let hog = crate::group::gen_hidden_order_group(group_bits, seed_val.wrapping_add(1));
    let q = params.q.clone();
    let mut rng = seed::substream(seed_val, "forge");

    // inputs with known exponents: u_j = g^alpha_j, v_j = g^mu_j * y^alpha_j
    let mu: Vec<BigInt> = (0..n).map(|_| seed::below(&mut rng, &q)).collect();
    let alpha: Vec<BigInt> = (0..n).map(|_| seed::below(&mut rng, &q)).collect();
    let inputs: Vec<Ciphertext> = (0..n)
        .map(|j| {
            let m = crate::group::mod_exp(&params.g, &mu[j], &params.p_mod)?;
            encrypt(&params, &m, &alpha[j])
        })
        .collect::<Result<_, _>>()?;

    // outputs are fresh encryptions of attacker-chosen messages g^nu_i; when
    // the primes are known first, one exponent is solved so that
    // sum nu_i*rho_i = sum mu_j*p_j (mod q), which makes the batch check pass
    let mut nu: Vec<BigInt> = (0..n).map(|_| seed::below(&mut rng, &q)).collect();
    let beta: Vec<BigInt> = (0..n).map(|_| seed::below(&mut rng, &q)).collect();
    if ordering == PrimeOrdering::PrimesFirst {
        let target: BigInt = (0..n).map(|j| &mu[j] * &vec.p[j]).sum();
        let partial: BigInt = (1..n).map(|i| &nu[i] * &vec.rho[i]).sum();
        nu[0] = ((target - partial) * mod_inv(&vec.rho[0].mod_floor(&q), &q)?).mod_floor(&q);
    }
    let outputs: Vec<Ciphertext> = (0..n)
        .map(|i| {
            let m = crate::group::mod_exp(&params.g, &nu[i], &params.p_mod)?;
            encrypt(&params, &m, &beta[i])
        })
        .collect::<Result<_, _>>()?;

    let messages_preserved = multiset_equal(
        &mu.iter().map(|m| m.mod_floor(&q)).collect::<Vec<_>>(),
        &nu.iter().map(|m| m.mod_floor(&q)).collect::<Vec<_>>(),
    );

    let instance = ShuffleInstance {
        params: params.clone(),
        hog,
        sec: sec.clone(),
        inputs,
        outputs,
    };
    let primes = ChallengePrimes { p: vec.p.clone() };

    // zero commitment randomness and windowed masks: every response equals
    // its announcement mask plus a value that fits its modulus, so the
    // ORIGINAL reductions are no-ops and the MSBMT bound always holds
    let r: Vec<BigInt> = vec
        .rho
        .iter()
        .map(|rho_i| {
            let (lo, hi) = response_window(rho_i, sec)?;
            Ok(seed::in_range(&mut rng, &lo, &hi))
        })
        .collect::<Result<_, Error>>()?;
    let state = ProverState {
        t: vec![BigInt::zero(); n],
        t_prime: vec![BigInt::zero(); n],
        r,
        s: (0..n).map(|_| seed::below(&mut rng, &sec.e_modulus())).collect(),
        s_prime: (0..n).map(|_| seed::below(&mut rng, &sec.e_modulus())).collect(),
        s_prod: seed::below(&mut rng, &sec.e_prod_modulus(n)),
        s_sum: seed::below(&mut rng, &sec.e_sum_modulus(n)),
        s_u: seed::below(&mut rng, &q),
        s_v: seed::below(&mut rng, &q),
    };

    // a witness whose re-encryption aggregate reproduces the attacker's
    // shared secret S = sum beta_i*rho_i - sum alpha_j*p_j (mod q)
    let s_shared: BigInt = ((0..n).map(|i| &beta[i] * &vec.rho[i]).sum::<BigInt>()
        - (0..n).map(|j| &alpha[j] * &vec.p[j]).sum::<BigInt>())
    .mod_floor(&q);
    let mut reenc = vec![BigInt::zero(); n];
    reenc[0] = (&s_shared * mod_inv(&vec.rho[0].mod_floor(&q), &q)?).mod_floor(&q);
    let witness = ShuffleWitness {
        perm: Permutation::identity(n),
        reenc,
        rho: vec.rho.clone(),
    };

    let mut transcript = commit_phase(&instance, &witness, &primes, &state)?;
    let mut verifier_rng = seed::substream(seed_val, "forge-verifier");
    let (c_lo, c_hi) = sec.challenge_range();
    let c = seed::in_range(&mut verifier_rng, &c_lo, &c_hi);
    respond(&mut transcript, &state, &witness, &q, sec, &c, mode);
    let verdict = verify(&instance, &primes, &transcript, mode)?;
    Ok(ForgeRun {
        instance,
        run: ProtocolRun { primes, transcript, verdict },
        messages_preserved,
    })
}

/// First monotone-test attack: `rho > 2^K3 - 1` with `r` below
/// `2^(K3+K4+K5) - rho*2^K4`, so `d = c*rho + r` passes the upper bound for
/// every challenge.
pub fn monotone_attack_upper(
    sec: &SecurityParams,
    rho: &BigInt,
    trials: u64,
    seed_val: u64,
) -> Result<AttackReport, Error> {
    let window = sec.d_modulus() - (rho << sec.k4);
    if !window.is_positive() {
        return Err(Error::EmptyAttackWindow);
    }
    let mut rng = seed::substream(seed_val, "monotone-upper");
    let r = seed::below(&mut rng, &window);
    let (c_lo, c_hi) = sec.challenge_range();
    let mut successes = 0;
    for _ in 0..trials {
        let c = seed::in_range(&mut rng, &c_lo, &c_hi);
        if crate::range::monotone_test(rho, &r, &c, sec).1 {
            successes += 1;
        }
    }
    let mut report = AttackReport::new("monotone-upper", sec, trials, successes, seed_val);
    report.analytic_bound = Some(1.0);
    report.details.insert("rho".into(), serde_json::json!(rho.to_string()));
    report.details.insert("r".into(), serde_json::json!(r.to_string()));
    Ok(report)
}

/// Second monotone-test attack: a signed window for `r` keeps
/// `d = c*rho + r` inside `[0, 2^(K3+K4+K5) - 1]` for every challenge.
pub fn monotone_attack_bounded(
    sec: &SecurityParams,
    rho: &BigInt,
    trials: u64,
    seed_val: u64,
) -> Result<AttackReport, Error> {
    let (c_lo, c_hi) = sec.challenge_range();
    let lo = -(&c_lo * rho);
    let hi = sec.d_modulus() - BigInt::one() - &c_hi * rho;
    if lo > hi {
        return Err(Error::EmptyAttackWindow);
    }
    let mut rng = seed::substream(seed_val, "monotone-bounded");
    let r = seed::in_range(&mut rng, &lo, &hi);
    let m_d = sec.d_modulus();
    let mut successes = 0;
    for _ in 0..trials {
        let c = seed::in_range(&mut rng, &c_lo, &c_hi);
        let d = &c * rho + &r;
        if !d.is_negative() && d < m_d {
            successes += 1;
        }
    }
    let mut report = AttackReport::new("monotone-bounded", sec, trials, successes, seed_val);
    report.analytic_bound = Some(1.0);
    report.details.insert("rho".into(), serde_json::json!(rho.to_string()));
    report.details.insert("r".into(), serde_json::json!(r.to_string()));
    Ok(report)
}

/// Width bound `2^K3 * (2^K4 - 1 - 2^(K4-1))`: at or above it a cheating
/// `rho = 2^K3` always lands `d` in `[A, B]`; below it, honest provers land
/// in `[A, B]` with probability at most `(B-A+1)/2^(K3+K4+K5)`.
pub fn theorem1_width_bound(sec: &SecurityParams) -> BigInt {
    let c_span = (BigInt::one() << sec.k4) - BigInt::one() - (BigInt::one() << (sec.k4 - 1));
    (BigInt::one() << sec.k3) * c_span
}

/// Acceptance-window experiment. Attack branch when the window is at least
/// the width bound, honest-rate measurement below it.
pub fn theorem1_experiment(
    sec: &SecurityParams,
    a: &BigInt,
    b: &BigInt,
    trials: u64,
    seed_val: u64,
) -> Result<AttackReport, Error> {
    if a > b {
        return Err(Error::BadConfig("empty interval".into()));
    }
    let (c_lo, c_hi) = sec.challenge_range();
    let bound = theorem1_width_bound(sec);
    let mut rng = seed::substream(seed_val, "theorem1");
    if b - a >= bound {
        // attack branch: rho = 2^K3, r anywhere in the forced window
        let rho = BigInt::one() << sec.k3;
        let r_lo = a - &c_lo * &rho;
        let r_hi = b - &c_hi * &rho;
        let mut successes = 0;
        for _ in 0..trials {
            let r = seed::in_range(&mut rng, &r_lo, &r_hi);
            let c = seed::in_range(&mut rng, &c_lo, &c_hi);
            let d = &c * &rho + &r;
            if &d >= a && &d <= b {
                successes += 1;
            }
        }
        let mut report = AttackReport::new("theorem1-attack", sec, trials, successes, seed_val);
        report.analytic_bound = Some(1.0);
        report.details.insert("branch".into(), serde_json::json!("attack"));
        report
            .details
            .insert("width_bound".into(), serde_json::json!(bound.to_string()));
        Ok(report)
    } else {
        // honest branch: measure how often an honest response lands in [A, B]
        let primes = primes_in_range(sec.k3);
        let m_d = sec.d_modulus();
        let mut successes = 0;
        for _ in 0..trials {
            let rho = &primes[(rng.next_u64() % primes.len() as u64) as usize];
            let r = seed::below(&mut rng, &m_d);
            let c = seed::in_range(&mut rng, &c_lo, &c_hi);
            let d = &c * rho + &r;
            if &d >= a && &d <= b {
                successes += 1;
            }
        }
        let ceiling = BigRational::new(b - a + BigInt::one(), m_d)
            .to_f64()
            .unwrap();
        let mut report = AttackReport::new("theorem1-honest", sec, trials, successes, seed_val);
        report.analytic_bound = Some(ceiling);
        report.details.insert("branch".into(), serde_json::json!("honest"));
        report
            .details
            .insert("width_bound".into(), serde_json::json!(bound.to_string()));
        Ok(report)
    }
}

fn rational(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

/// Exact probability that an honest ORIGINAL-mode run is rejected, i.e. that
/// at least one response overflows its modulus. Computed in exact rational
/// arithmetic from the honest randomness ranges, handling the coupling of the
/// chain randomness with the aggregate product response and of the per-index
/// randomness with the aggregate sum response.
pub fn analytic_rejection_probability(sec: &SecurityParams, n: usize) -> Result<f64, Error> {
    sec.validate()?;
    let primes = primes_in_range(sec.k3);
    let np = BigInt::from(primes.len());
    let mu_p = rational(primes.iter().sum(), np.clone());
    let m2_p = rational(primes.iter().map(|p| p * p).sum(), np);
    let max_p = primes.iter().max().unwrap().clone();

    // uniform moments on [0, top]
    let moments = |bits: u32| {
        let top = (BigInt::one() << bits) - BigInt::one();
        let mu = rational(top.clone(), BigInt::from(2));
        let m2 = rational(&top * (BigInt::from(2) * &top + 1), BigInt::from(6));
        (top, mu, m2)
    };
    let (t_top, mu_t, m2_t) = moments(sec.k2);
    let (tp_top, mu_tp, m2_tp) = moments(sec.k2 - sec.k4);

    let m1 = sec.e_modulus();
    let m_d = sec.d_modulus();
    let m_e = sec.e_prod_modulus(n);
    let m_es = sec.e_sum_modulus(n);
    let (c_lo, c_hi) = sec.challenge_range();

    // the per-family overflow probabilities must be genuine probabilities
    // (no clamping), otherwise the linear formulas below are invalid
    let t_agg_max: BigInt = (0..n)
        .map(|i| &t_top * num_traits::pow(max_p.clone(), n - 1 - i))
        .sum();
    if &c_hi * &t_top >= m1
        || &c_hi * &max_p >= m_d
        || &c_hi * &t_agg_max >= m_e
        || &c_hi * BigInt::from(n) * &tp_top >= m_es
    {
        return Err(Error::BadConfig(
            "parameters leave no analytic margin (a response family saturates)".into(),
        ));
    }

    let mut total = BigRational::zero();
    let mut c = c_lo.clone();
    let mut count = 0u32;
    while c <= c_hi {
        let alpha = rational(c.clone(), m1.clone());
        let beta = rational(c.clone(), m_d.clone());
        let gamma = rational(c.clone(), m_e.clone());
        let delta = rational(c.clone(), m_es.clone());

        let f = BigRational::one() - &alpha * &mu_t;
        let tf = &mu_t - &alpha * &m2_t;
        let g = BigRational::one() - &alpha * &mu_tp;
        let tg = &mu_tp - &alpha * &m2_tp;
        let h = BigRational::one() - &beta * &mu_p;
        let w = &mu_p - &beta * &m2_p;

        let powr = |x: &BigRational, k: usize| num_traits::pow(x.clone(), k);
        let shw: BigRational = (1..=n).map(|i| powr(&h, i) * powr(&w, n - i)).sum();
        let nn = BigRational::from(BigInt::from(n));

        let p_none = powr(&f, n) * powr(&g, n) * powr(&h, n)
            - &gamma * &tf * powr(&f, n - 1) * powr(&g, n) * &shw
            - &delta * &nn * &tg * powr(&f, n) * powr(&g, n - 1) * powr(&h, n)
            + &gamma * &delta * &nn * &tf * &tg * powr(&f, n - 1) * powr(&g, n - 1) * &shw;
        total += p_none;
        c += 1;
        count += 1;
    }
    let p_reject =
        BigRational::one() - total / BigRational::from(BigInt::from(count));
    Ok(p_reject.to_f64().unwrap())
}

/// Honest ORIGINAL-mode runs: empirical rejection rate, per-family reduction
/// frequencies, and the exact analytic prediction. An MP2 control over the
/// same seeds is included in the details.
pub fn correctness_failure_experiment(
    sec: &SecurityParams,
    n: usize,
    runs: u64,
    seed_val: u64,
) -> Result<AttackReport, Error> {
    let (instance, witness) = setup_honest(n, sec.clone(), 64, seed_val)?;
    let mut seeds = seed::substream(seed_val, "trial-seeds");
    let mut rejected = 0u64;
    let mut mp2_rejected = 0u64;
    let mut family_reductions: BTreeMap<&str, u64> = BTreeMap::new();
    for name in ["d", "e", "e_prime", "e_prod", "e_sum"] {
        family_reductions.insert(name, 0);
    }
    for _ in 0..runs {
        let trial_seed = seeds.next_u64();
        let run = run_protocol(&instance, &witness, ProofMode::Original, trial_seed)?;
        if !run.verdict.accepted {
            rejected += 1;
        }
        let control = run_protocol(&instance, &witness, ProofMode::Mp2, trial_seed)?;
        if !control.verdict.accepted {
            mp2_rejected += 1;
        }
        // a response was reduced iff the ORIGINAL value differs from MP2's
        let t = &run.transcript;
        let u = &control.transcript;
        if t.d != u.d {
            *family_reductions.get_mut("d").unwrap() += 1;
        }
        if t.e != u.e {
            *family_reductions.get_mut("e").unwrap() += 1;
        }
        if t.e_prime != u.e_prime {
            *family_reductions.get_mut("e_prime").unwrap() += 1;
        }
        if t.e_prod != u.e_prod {
            *family_reductions.get_mut("e_prod").unwrap() += 1;
        }
        if t.e_sum != u.e_sum {
            *family_reductions.get_mut("e_sum").unwrap() += 1;
        }
    }
    let mut report =
        AttackReport::new("correctness-failure", sec, runs, rejected, seed_val);
    report.analytic_bound = Some(analytic_rejection_probability(sec, n)?);
    report.details.insert("n".into(), serde_json::json!(n));
    report
        .details
        .insert("mp2_rejections".into(), serde_json::json!(mp2_rejected));
    report.details.insert(
        "family_reduction_counts".into(),
        serde_json::json!(family_reductions),
    );
    Ok(report)
}

/// Exhaustive permutation-forcing check: over every multiset of in-range
/// primes of length `n` and every vector with entries bounded by
/// `2^K3 - 1` in absolute value, the only sum/product solutions are
/// permutations. Returns the number of non-permutation solutions found.
pub fn permutation_forcing_violations(k3: u32, n: usize) -> Result<u64, Error> {
    let primes = primes_in_range(k3);
    let bound = (BigInt::one() << k3) - BigInt::one();
    let lo = -(bound
        .to_i64()
        .expect("desk-scale bound"));
    let hi = -lo;
    let mut violations = 0u64;

    // multisets of primes: non-decreasing index vectors
    let mut p_multiset = vec![0usize; n];
    loop {
        let p: Vec<BigInt> = p_multiset.iter().map(|&i| primes[i].clone()).collect();
        // rho vectors in non-decreasing order (order is irrelevant to both
        // the sum/product relation and the permutation property)
        let mut rho = vec![lo; n];
        'rho: loop {
            if rho.iter().all(|&v| v != 0) {
                let rho_big: Vec<BigInt> = rho.iter().map(|&v| BigInt::from(v)).collect();
                if check_sum_product(&p, &rho_big) && !multiset_equal(&p, &rho_big) {
                    violations += 1;
                }
            }
            // advance the non-decreasing vector
            for i in (0..n).rev() {
                if rho[i] < hi {
                    rho[i] += 1;
                    let v = rho[i];
                    for slot in rho.iter_mut().skip(i + 1) {
                        *slot = v;
                    }
                    continue 'rho;
                }
            }
            break;
        }
        // advance the prime multiset
        let mut advanced = false;
        for i in (0..n).rev() {
            if p_multiset[i] + 1 < primes.len() {
                p_multiset[i] += 1;
                let v = p_multiset[i];
                for slot in p_multiset.iter_mut().skip(i + 1) {
                    *slot = v;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }
    Ok(violations)
}

/// Check that FIXED mode defeats `vec`: each exponent must carry a range
/// proof for `[-(2^K3 - 1), 2^K3 - 1]`, and out-of-range entries make the
/// proving path fail. If all entries happen to be in range, the transcript
/// forgery itself is attempted and must end in an error or a rejection.
pub fn fixed_mode_rejects(
    sec: &SecurityParams,
    vec: &AttackVector,
    group_bits: u64,
    seed_val: u64,
) -> Result<bool, Error> {
    sec.validate()?;
    let hog = crate::group::gen_hidden_order_group(group_bits, seed_val);
    let bound = (BigInt::one() << sec.k3) - BigInt::one();
    let lo = -bound.clone();
    let mut prng = seed::substream(seed_val, "fixed-attempt-p");
    let mut vrng = seed::substream(seed_val, "fixed-attempt-v");
    for rho_i in &vec.rho {
        let t_prime = seed::below_pow2(&mut prng, sec.k2 - sec.k4);
        let commitment = hog.commit(rho_i, &t_prime)?;
        match crate::range::prove_committed_range(
            &hog, sec, rho_i, &t_prime, &lo, &bound, &mut prng, &mut vrng,
        ) {
            // the honest proving path refuses out-of-range entries
            Err(Error::OutOfRange) => return Ok(true),
            Err(e) => return Err(e),
            Ok(proof) => {
                if !crate::range::verify_committed_range(&hog, &commitment, &lo, &bound, &proof)? {
                    return Ok(true);
                }
            }
        }
    }
    // every entry was provable, so run the full forgery against the FIXED
    // verifier; an unmountable attack counts as a rejection
    match forge_transcript(sec, vec, ProofMode::Mp2, PrimeOrdering::PrimesFirst, group_bits, seed_val)
    {
        Err(Error::EmptyAttackWindow) => Ok(true),
        Err(e) => Err(e),
        Ok(forged) => {
            let n = vec.p.len();
            let state = ProverState {
                t: vec![BigInt::zero(); n],
                t_prime: vec![BigInt::zero(); n],
                r: vec![BigInt::zero(); n],
                s: vec![BigInt::zero(); n],
                s_prime: vec![BigInt::zero(); n],
                s_prod: BigInt::zero(),
                s_sum: BigInt::zero(),
                s_u: BigInt::zero(),
                s_v: BigInt::zero(),
            };
            let witness = ShuffleWitness {
                perm: Permutation::identity(n),
                reenc: vec![BigInt::zero(); n],
                rho: vec.rho.clone(),
            };
            let mut transcript = forged.run.transcript.clone();
            match attach_range_proofs(
                &mut transcript,
                &forged.instance,
                &witness,
                &state,
                &mut prng,
                &mut vrng,
            ) {
                Err(Error::OutOfRange) => Ok(true),
                Err(e) => Err(e),
                Ok(()) => {
                    let verdict =
                        verify(&forged.instance, &forged.run.primes, &transcript, ProofMode::Fixed)?;
                    Ok(!verdict.accepted)
                }
            }
        }
    }
}

/// The two concrete counterexamples used throughout the experiments.
pub fn known_example_1() -> AttackVector {
    AttackVector::new(
        vec![2; 10].into_iter().map(BigInt::from).collect(),
        [4, 4, 4, 4, 2, 2, 1, 1, -1, -1].iter().map(|&v| BigInt::from(v)).collect(),
    )
}

pub fn known_example_2() -> AttackVector {
    AttackVector::new(
        [2, 2, 3, 3, 5, 5, 7, 7, 11, 11].iter().map(|&v| BigInt::from(v)).collect(),
        [22, 22, 15, 15, -7, -7, -1, -1, -1, -1].iter().map(|&v| BigInt::from(v)).collect(),
    )
}
