//! Three-move proof of shuffle in four modes.
//!
//! The prover commits to an exponent vector `rho` (a permutation of the
//! verifier's challenge primes for honest provers) via a product chain and
//! per-index commitments in the hidden-order group, answers a short challenge
//! with linear responses, and the verifier checks the chain, the per-index
//! openings, the aggregate product and sum, and a batched ElGamal
//! product-equality relation.
//!
//! Modes: ORIGINAL reduces every response modulo a power of two (which breaks
//! completeness); MP2 keeps responses in Z; MSBMT adds the upper-bound test
//! `d_i < 2^(K3+K4+K5)`; FIXED adds a real bit-decomposition range proof
//! with bound exponent K = K3.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::elgamal::{Ciphertext, ShuffleWitness};
use crate::group::{
    mod_exp, sample_prime_in_range, serde_bigint, serde_bigint_vec, ElGamalParams,
    HiddenOrderGroup, SecurityParams,
};
use crate::range::{prove_committed_range, verify_committed_range, SignedRangeProof};
use crate::seed;
use crate::Error;

/// Which response discipline the prover and verifier follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProofMode {
    Original,
    Mp2,
    Msbmt,
    Fixed,
}

impl std::str::FromStr for ProofMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_uppercase().as_str() {
            "ORIGINAL" => Ok(ProofMode::Original),
            "MP2" => Ok(ProofMode::Mp2),
            "MSBMT" => Ok(ProofMode::Msbmt),
            "FIXED" => Ok(ProofMode::Fixed),
            other => Err(Error::BadConfig(format!("unknown mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for ProofMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ProofMode::Original => "ORIGINAL",
            ProofMode::Mp2 => "MP2",
            ProofMode::Msbmt => "MSBMT",
            ProofMode::Fixed => "FIXED",
        };
        f.write_str(s)
    }
}

/// Public data of one shuffle run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShuffleInstance {
    pub params: ElGamalParams,
    pub hog: HiddenOrderGroup,
    pub sec: SecurityParams,
    pub inputs: Vec<Ciphertext>,
    pub outputs: Vec<Ciphertext>,
}

impl ShuffleInstance {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

/// The verifier's prime vector: N primes from `[2^(K3-1), 2^K3 - 1]`,
/// repetitions allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChallengePrimes {
    #[serde(with = "serde_bigint_vec")]
    pub p: Vec<BigInt>,
}

impl ChallengePrimes {
    pub fn sample(k3: u32, n: usize, rng: &mut ChaCha20Rng) -> Result<Self, Error> {
        let p = (0..n)
            .map(|_| sample_prime_in_range(k3, rng))
            .collect::<Result<_, _>>()?;
        Ok(ChallengePrimes { p })
    }

    pub fn product(&self) -> BigInt {
        self.p.iter().product()
    }

    pub fn sum(&self) -> BigInt {
        self.p.iter().sum()
    }
}

/// Prover-side randomness for one run.
#[derive(Debug, Clone)]
pub struct ProverState {
    /// chain commitment randomness, `[0, 2^K2 - 1]`
    pub t: Vec<BigInt>,
    /// per-index commitment randomness, `[0, 2^(K2-K4) - 1]` (sized so the
    /// aggregate sum response stays clear of its modulus)
    pub t_prime: Vec<BigInt>,
    /// exponent-response masks, `[0, 2^(K3+K4+K5) - 1]`
    pub r: Vec<BigInt>,
    /// chain announcement masks, `[0, 2^(K2+K4+2*K5) - 1]`
    pub s: Vec<BigInt>,
    pub s_prime: Vec<BigInt>,
    /// aggregate masks matching the product/sum response moduli
    pub s_prod: BigInt,
    pub s_sum: BigInt,
    /// batch-equality masks mod q
    pub s_u: BigInt,
    pub s_v: BigInt,
}

impl ProverState {
    /// Honest randomness. In MSBMT mode the `r_i` window is clipped to
    /// `[0, 2^(K3+K4+K5) - rho_i*2^K4 - 1]` so that `d_i` passes the
    /// upper-bound test for every challenge.
    pub fn sample(
        sec: &SecurityParams,
        q: &BigInt,
        rho: &[BigInt],
        mode: ProofMode,
        rng: &mut ChaCha20Rng,
    ) -> Self {
        let n = rho.len();
        let r = rho
            .iter()
            .map(|rho_i| {
                if mode == ProofMode::Msbmt {
                    let cap = sec.d_modulus() - (rho_i << sec.k4);
                    seed::below(rng, &cap)
                } else {
                    seed::below(rng, &sec.d_modulus())
                }
            })
            .collect();
        ProverState {
            t: (0..n).map(|_| seed::below_pow2(rng, sec.k2)).collect(),
            t_prime: (0..n).map(|_| seed::below_pow2(rng, sec.k2 - sec.k4)).collect(),
            r,
            s: (0..n).map(|_| seed::below(rng, &sec.e_modulus())).collect(),
            s_prime: (0..n).map(|_| seed::below(rng, &sec.e_modulus())).collect(),
            s_prod: seed::below(rng, &sec.e_prod_modulus(n)),
            s_sum: seed::below(rng, &sec.e_sum_modulus(n)),
            s_u: seed::below(rng, q),
            s_v: seed::below(rng, q),
        }
    }
}

/// The full three-move transcript, with commitments and responses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    #[serde(with = "serde_bigint_vec")]
    pub b: Vec<BigInt>,
    #[serde(with = "serde_bigint_vec")]
    pub b_prime: Vec<BigInt>,
    #[serde(with = "serde_bigint_vec")]
    pub gamma: Vec<BigInt>,
    #[serde(with = "serde_bigint_vec")]
    pub gamma_prime: Vec<BigInt>,
    #[serde(with = "serde_bigint")]
    pub gamma_prod: BigInt,
    #[serde(with = "serde_bigint")]
    pub gamma_sum: BigInt,
    #[serde(with = "serde_bigint")]
    pub prod_ann: BigInt,
    #[serde(with = "serde_bigint")]
    pub sum_ann: BigInt,
    #[serde(with = "serde_bigint")]
    pub c: BigInt,
    #[serde(with = "serde_bigint_vec")]
    pub d: Vec<BigInt>,
    #[serde(with = "serde_bigint_vec")]
    pub e: Vec<BigInt>,
    #[serde(with = "serde_bigint_vec")]
    pub e_prime: Vec<BigInt>,
    #[serde(with = "serde_bigint")]
    pub e_prod: BigInt,
    #[serde(with = "serde_bigint")]
    pub e_sum: BigInt,
    #[serde(with = "serde_bigint")]
    pub f_u: BigInt,
    #[serde(with = "serde_bigint")]
    pub f_v: BigInt,
    /// present in FIXED mode only: one range proof per `b'_i`
    pub range_proofs: Option<Vec<SignedRangeProof>>,
}

/// One named verification check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

/// All named checks of one verification, plus the overall verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub checks: Vec<Check>,
    pub accepted: bool,
}

impl Verdict {
    fn from_checks(checks: Vec<Check>) -> Self {
        let accepted = checks.iter().all(|c| c.pass);
        Verdict { checks, accepted }
    }

    /// The names of all failing checks.
    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect()
    }
}

/// First prover move: chain and per-index commitments plus all announcements.
/// Responses are left zeroed; `respond` fills them.
pub fn commit_phase(
    instance: &ShuffleInstance,
    witness: &ShuffleWitness,
    primes: &ChallengePrimes,
    state: &ProverState,
) -> Result<Transcript, Error> {
    let n = instance.len();
    if witness.rho.len() != n || primes.p.len() != n || instance.outputs.len() != n {
        return Err(Error::LengthMismatch);
    }
    let hog = &instance.hog;
    let params = &instance.params;

    let mut b = Vec::with_capacity(n);
    let mut gamma = Vec::with_capacity(n);
    let mut prev = hog.g_c.clone();
    for i in 0..n {
        // b_i = h^t_i * b_{i-1}^rho_i, chain rooted at b_0 = g_c
        let bi = hog.mul(&hog.pow(&hog.h, &state.t[i])?, &hog.pow(&prev, &witness.rho[i])?);
        gamma.push(hog.mul(&hog.pow(&hog.h, &state.s[i])?, &hog.pow(&prev, &state.r[i])?));
        b.push(bi.clone());
        prev = bi;
    }
    let b_prime: Vec<BigInt> = (0..n)
        .map(|i| hog.commit(&witness.rho[i], &state.t_prime[i]))
        .collect::<Result<_, _>>()?;
    let gamma_prime: Vec<BigInt> = (0..n)
        .map(|i| {
            Ok(hog.mul(
                &hog.pow(&hog.h, &state.s_prime[i])?,
                &hog.pow(&hog.g_c, &state.r[i])?,
            ))
        })
        .collect::<Result<_, Error>>()?;
    let gamma_prod = hog.pow(&hog.h, &state.s_prod)?;
    let gamma_sum = hog.pow(&hog.h, &state.s_sum)?;

    // batch-equality announcements in the ElGamal group:
    // prod_ann = g^s_u * prod (u'_i)^r_i, sum_ann = y^s_v * prod (v'_i)^r_i
    let mut prod_ann = mod_exp(&params.g, &state.s_u, &params.p_mod)?;
    let mut sum_ann = mod_exp(&params.y, &state.s_v, &params.p_mod)?;
    for i in 0..n {
        prod_ann = &prod_ann * mod_exp(&instance.outputs[i].u, &state.r[i], &params.p_mod)?
            % &params.p_mod;
        sum_ann = &sum_ann * mod_exp(&instance.outputs[i].v, &state.r[i], &params.p_mod)?
            % &params.p_mod;
    }

    Ok(Transcript {
        b,
        b_prime,
        gamma,
        gamma_prime,
        gamma_prod,
        gamma_sum,
        prod_ann,
        sum_ann,
        c: BigInt::from(0),
        d: Vec::new(),
        e: Vec::new(),
        e_prime: Vec::new(),
        e_prod: BigInt::from(0),
        e_sum: BigInt::from(0),
        f_u: BigInt::from(0),
        f_v: BigInt::from(0),
        range_proofs: None,
    })
}

/// Aggregate chain exponent: `T = sum_i t_i * prod_{j>i} rho_j`, the value
/// with `b_N = h^T * g_c^(prod rho_i)`.
pub fn chain_aggregate(t: &[BigInt], rho: &[BigInt]) -> BigInt {
    let n = t.len();
    let mut total = BigInt::from(0);
    let mut suffix = BigInt::one();
    for i in (0..n).rev() {
        total += &t[i] * &suffix;
        suffix *= &rho[i];
    }
    total
}

/// Third prover move: fill the responses of a committed transcript.
/// In ORIGINAL mode every response is reduced modulo its power-of-two
/// modulus; in the other modes responses stay in Z.
pub fn respond(
    transcript: &mut Transcript,
    state: &ProverState,
    witness: &ShuffleWitness,
    q: &BigInt,
    sec: &SecurityParams,
    c: &BigInt,
    mode: ProofMode,
) {
    let n = witness.rho.len();
    transcript.c = c.clone();
    transcript.d = (0..n).map(|i| c * &witness.rho[i] + &state.r[i]).collect();
    transcript.e = (0..n).map(|i| c * &state.t[i] + &state.s[i]).collect();
    transcript.e_prime = (0..n)
        .map(|i| c * &state.t_prime[i] + &state.s_prime[i])
        .collect();
    let t_aggregate = chain_aggregate(&state.t, &witness.rho);
    transcript.e_prod = c * t_aggregate + &state.s_prod;
    transcript.e_sum = c * state.t_prime.iter().sum::<BigInt>() + &state.s_sum;
    // shared re-encryption aggregate S = sum reenc_i * rho_i mod q
    let s_shared: BigInt = (0..n)
        .map(|i| &witness.reenc[i] * &witness.rho[i])
        .sum::<BigInt>()
        .mod_floor(q);
    transcript.f_u = (&state.s_u - c * &s_shared).mod_floor(q);
    transcript.f_v = (&state.s_v - c * &s_shared).mod_floor(q);

    if mode == ProofMode::Original {
        let m_d = sec.d_modulus();
        let m_e = sec.e_modulus();
        for di in &mut transcript.d {
            *di = di.mod_floor(&m_d);
        }
        for ei in &mut transcript.e {
            *ei = ei.mod_floor(&m_e);
        }
        for ei in &mut transcript.e_prime {
            *ei = ei.mod_floor(&m_e);
        }
        transcript.e_prod = transcript.e_prod.mod_floor(&sec.e_prod_modulus(n));
        transcript.e_sum = transcript.e_sum.mod_floor(&sec.e_sum_modulus(n));
    }
}

/// Attach the FIXED-mode range proofs (`|rho_i| <= 2^K3 - 1` on each `b'_i`).
pub fn attach_range_proofs(
    transcript: &mut Transcript,
    instance: &ShuffleInstance,
    witness: &ShuffleWitness,
    state: &ProverState,
    prover_rng: &mut ChaCha20Rng,
    verifier_rng: &mut ChaCha20Rng,
) -> Result<(), Error> {
    let bound = (BigInt::one() << instance.sec.k3) - BigInt::one();
    let lo = -bound.clone();
    let proofs = (0..witness.rho.len())
        .map(|i| {
            prove_committed_range(
                &instance.hog,
                &instance.sec,
                &witness.rho[i],
                &state.t_prime[i],
                &lo,
                &bound,
                prover_rng,
                verifier_rng,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    transcript.range_proofs = Some(proofs);
    Ok(())
}

/// Verify a transcript: every equation is evaluated as a named check and the
/// verdict accepts iff all pass. Malformed transcripts yield an error, not a
/// rejection.
pub fn verify(
    instance: &ShuffleInstance,
    primes: &ChallengePrimes,
    transcript: &Transcript,
    mode: ProofMode,
) -> Result<Verdict, Error> {
    let n = instance.len();
    if primes.p.len() != n {
        return Err(Error::LengthMismatch);
    }
    for (label, len) in [
        ("b", transcript.b.len()),
        ("b_prime", transcript.b_prime.len()),
        ("gamma", transcript.gamma.len()),
        ("gamma_prime", transcript.gamma_prime.len()),
        ("d", transcript.d.len()),
        ("e", transcript.e.len()),
        ("e_prime", transcript.e_prime.len()),
    ] {
        if len != n {
            return Err(Error::MalformedTranscript(format!(
                "{label} has {len} entries, expected {n}"
            )));
        }
    }
    let hog = &instance.hog;
    let params = &instance.params;
    let c = &transcript.c;
    let mut checks = Vec::new();

    let mut prev = hog.g_c.clone();
    for i in 0..n {
        let lhs = hog.mul(&hog.pow(&transcript.b[i], c)?, &transcript.gamma[i]);
        let rhs = hog.mul(
            &hog.pow(&hog.h, &transcript.e[i])?,
            &hog.pow(&prev, &transcript.d[i])?,
        );
        checks.push(Check { name: format!("CHAIN_{}", i + 1), pass: lhs == rhs });
        prev = transcript.b[i].clone();
    }
    for i in 0..n {
        let lhs = hog.mul(&hog.pow(&transcript.b_prime[i], c)?, &transcript.gamma_prime[i]);
        let rhs = hog.mul(
            &hog.pow(&hog.h, &transcript.e_prime[i])?,
            &hog.pow(&hog.g_c, &transcript.d[i])?,
        );
        checks.push(Check { name: format!("PERINDEX_{}", i + 1), pass: lhs == rhs });
    }

    // PRODUCT: (g_c^(-prod p) * b_N)^c * gamma_prod = h^e_prod
    let base = hog.mul(
        &hog.pow(&hog.g_c, &-primes.product())?,
        &transcript.b[n - 1],
    );
    let lhs = hog.mul(&hog.pow(&base, c)?, &transcript.gamma_prod);
    checks.push(Check {
        name: "PRODUCT".into(),
        pass: lhs == hog.pow(&hog.h, &transcript.e_prod)?,
    });

    // SUM: (g_c^(-sum p) * prod b'_i)^c * gamma_sum = h^e_sum
    let mut b_prime_prod = BigInt::one();
    for bp in &transcript.b_prime {
        b_prime_prod = hog.mul(&b_prime_prod, bp);
    }
    let base = hog.mul(&hog.pow(&hog.g_c, &-primes.sum())?, &b_prime_prod);
    let lhs = hog.mul(&hog.pow(&base, c)?, &transcript.gamma_sum);
    checks.push(Check {
        name: "SUM".into(),
        pass: lhs == hog.pow(&hog.h, &transcript.e_sum)?,
    });

    // BATCH: (prod u_i^p_i)^c * prod_ann = g^f_u * prod (u'_i)^d_i, and the
    // matching v/y equation
    let p_mod = &params.p_mod;
    let mut u_pow = BigInt::one();
    let mut v_pow = BigInt::one();
    for i in 0..n {
        u_pow = u_pow * mod_exp(&instance.inputs[i].u, &primes.p[i], p_mod)? % p_mod;
        v_pow = v_pow * mod_exp(&instance.inputs[i].v, &primes.p[i], p_mod)? % p_mod;
    }
    let mut u_out = BigInt::one();
    let mut v_out = BigInt::one();
    for i in 0..n {
        u_out = u_out * mod_exp(&instance.outputs[i].u, &transcript.d[i], p_mod)? % p_mod;
        v_out = v_out * mod_exp(&instance.outputs[i].v, &transcript.d[i], p_mod)? % p_mod;
    }
    let batch_u = mod_exp(&u_pow, c, p_mod)? * &transcript.prod_ann % p_mod
        == mod_exp(&params.g, &transcript.f_u, p_mod)? * u_out % p_mod;
    let batch_v = mod_exp(&v_pow, c, p_mod)? * &transcript.sum_ann % p_mod
        == mod_exp(&params.y, &transcript.f_v, p_mod)? * v_out % p_mod;
    checks.push(Check { name: "BATCH".into(), pass: batch_u && batch_v });

    if mode == ProofMode::Msbmt {
        let bound = instance.sec.d_modulus();
        for i in 0..n {
            checks.push(Check {
                name: format!("RANGE_{}", i + 1),
                pass: transcript.d[i] < bound,
            });
        }
    }
    if mode == ProofMode::Fixed {
        let proofs = transcript.range_proofs.as_ref().ok_or_else(|| {
            Error::MalformedTranscript("FIXED transcript without range proofs".into())
        })?;
        if proofs.len() != n {
            return Err(Error::MalformedTranscript("range proof count".into()));
        }
        let hi = (BigInt::one() << instance.sec.k3) - BigInt::one();
        let lo = -hi.clone();
        for i in 0..n {
            let pass =
                verify_committed_range(hog, &transcript.b_prime[i], &lo, &hi, &proofs[i])?;
            checks.push(Check { name: format!("RANGEPROOF_{}", i + 1), pass });
        }
    }
    Ok(Verdict::from_checks(checks))
}

/// True iff `rho` matches `p` in both integer sum and integer product.
pub fn check_sum_product(p: &[BigInt], rho: &[BigInt]) -> bool {
    p.len() == rho.len()
        && p.iter().sum::<BigInt>() == rho.iter().sum::<BigInt>()
        && p.iter().product::<BigInt>() == rho.iter().product::<BigInt>()
}

/// One complete interactive run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolRun {
    pub primes: ChallengePrimes,
    pub transcript: Transcript,
    pub verdict: Verdict,
}

/// Run the full protocol with an honest prover: sample the challenge primes,
/// derive `rho` from the witness permutation, commit, answer the challenge,
/// and verify. Deterministic for a fixed seed.
pub fn run_protocol(
    instance: &ShuffleInstance,
    witness: &ShuffleWitness,
    mode: ProofMode,
    seed_val: u64,
) -> Result<ProtocolRun, Error> {
    let n = instance.len();
    let mut verifier_rng = seed::substream(seed_val, "verifier");
    let mut prover_rng = seed::substream(seed_val, "prover");

    let primes = ChallengePrimes::sample(instance.sec.k3, n, &mut verifier_rng)?;
    let mut witness = witness.clone();
    witness.rho = (0..n).map(|i| primes.p[witness.perm.apply(i)].clone()).collect();

    let state = ProverState::sample(
        &instance.sec,
        &instance.params.q,
        &witness.rho,
        mode,
        &mut prover_rng,
    );
    let mut transcript = commit_phase(instance, &witness, &primes, &state)?;
    let (c_lo, c_hi) = instance.sec.challenge_range();
    let c = seed::in_range(&mut verifier_rng, &c_lo, &c_hi);
    respond(&mut transcript, &state, &witness, &instance.params.q, &instance.sec, &c, mode);
    if mode == ProofMode::Fixed {
        attach_range_proofs(
            &mut transcript,
            instance,
            &witness,
            &state,
            &mut prover_rng,
            &mut verifier_rng,
        )?;
    }
    let verdict = verify(instance, &primes, &transcript, mode)?;
    Ok(ProtocolRun { primes, transcript, verdict })
}

/// Build an honest instance/witness pair: fresh groups, random messages,
/// and outputs produced by an honest shuffle.
pub fn setup_honest(
    n: usize,
    sec: SecurityParams,
    group_bits: u64,
    seed_val: u64,
) -> Result<(ShuffleInstance, ShuffleWitness), Error> {
    sec.validate()?;
    let params = crate::elgamal::gen_elgamal_params(group_bits, seed_val);
    let hog = crate::group::gen_hidden_order_group(group_bits, seed_val.wrapping_add(1));
    let mut rng = seed::substream(seed_val, "setup");
    let inputs: Vec<Ciphertext> = (0..n)
        .map(|_| {
            let m = crate::elgamal::encode_message(&params, &seed::below(&mut rng, &params.q));
            let r = seed::below(&mut rng, &params.q);
            crate::elgamal::encrypt(&params, &m, &r)
        })
        .collect::<Result<_, _>>()?;
    let witness = ShuffleWitness::random(&params, n, &mut rng);
    let outputs = crate::elgamal::shuffle(&params, &inputs, &witness)?;
    Ok((ShuffleInstance { params, hog, sec, inputs, outputs }, witness))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn response(c: i64, rho: i64, r: i64, mode: ProofMode, sec: &SecurityParams) -> BigInt {
        let d = bi(c * rho + r);
        if mode == ProofMode::Original {
            d.mod_floor(&sec.d_modulus())
        } else {
            d
        }
    }

    #[test]
    fn response_examples() {
        let sec = SecurityParams::desk();
        assert_eq!(response(12, 11, 5, ProofMode::Mp2, &sec), bi(137));
        // 12*11 + 16300 = 16432; 16432 mod 2^14 = 48
        assert_eq!(response(12, 11, 16300, ProofMode::Original, &sec), bi(48));
        assert_eq!(response(12, 11, 5, ProofMode::Original, &sec), bi(137));
    }

    #[test]
    fn chain_telescopes_with_zero_randomness() {
        let hog = crate::group::gen_hidden_order_group(64, 3);
        let sec = SecurityParams::desk();
        let params = crate::elgamal::gen_elgamal_params(32, 3);
        let mut rng = seed::substream(3, "t");
        let n = 3;
        let inputs: Vec<Ciphertext> = (0..n)
            .map(|_| {
                let m = crate::elgamal::encode_message(&params, &seed::below(&mut rng, &params.q));
                crate::elgamal::encrypt(&params, &m, &seed::below(&mut rng, &params.q)).unwrap()
            })
            .collect();
        let witness = ShuffleWitness::random(&params, n, &mut rng);
        let outputs = crate::elgamal::shuffle(&params, &inputs, &witness).unwrap();
        let instance = ShuffleInstance { params, hog, sec, inputs, outputs };

        let primes = ChallengePrimes { p: vec![bi(11), bi(13), bi(11)] };
        let mut witness = witness;
        witness.rho =
            (0..n).map(|i| primes.p[witness.perm.apply(i)].clone()).collect();
        let zero_state = ProverState {
            t: vec![bi(0); n],
            t_prime: vec![bi(0); n],
            r: vec![bi(0); n],
            s: vec![bi(0); n],
            s_prime: vec![bi(0); n],
            s_prod: bi(0),
            s_sum: bi(0),
            s_u: bi(0),
            s_v: bi(0),
        };
        let transcript = commit_phase(&instance, &witness, &primes, &zero_state).unwrap();
        // all t_i = 0: b_N = g_c^(prod rho_i)
        let expect = instance
            .hog
            .pow(&instance.hog.g_c, &witness.rho.iter().product::<BigInt>())
            .unwrap();
        assert_eq!(transcript.b[n - 1], expect);
        // N = 1 special case: b_1 = g_c^rho_1
        assert_eq!(
            transcript.b[0],
            instance.hog.pow(&instance.hog.g_c, &witness.rho[0]).unwrap()
        );
        assert_eq!(chain_aggregate(&zero_state.t, &witness.rho), bi(0));
    }

    #[test]
    fn chain_aggregate_matches_commitment() {
        // b_N recomputed as h^T * g_c^(prod rho) must equal the chain value
        let hog = crate::group::gen_hidden_order_group(64, 5);
        let mut rng = seed::substream(5, "agg");
        let rho: Vec<BigInt> = vec![bi(11), bi(13), bi(13), bi(11)];
        let t: Vec<BigInt> = (0..4).map(|_| seed::below_pow2(&mut rng, 8)).collect();
        let mut prev = hog.g_c.clone();
        for i in 0..4 {
            prev = hog.mul(
                &hog.pow(&hog.h, &t[i]).unwrap(),
                &hog.pow(&prev, &rho[i]).unwrap(),
            );
        }
        let t_agg = chain_aggregate(&t, &rho);
        let expect = hog.mul(
            &hog.pow(&hog.h, &t_agg).unwrap(),
            &hog.pow(&hog.g_c, &rho.iter().product::<BigInt>()).unwrap(),
        );
        assert_eq!(prev, expect);
    }

    #[test]
    fn honest_completeness_all_modes() {
        let sec = SecurityParams::desk();
        let (instance, witness) = setup_honest(4, sec, 64, 11).unwrap();
        for (i, mode) in [ProofMode::Mp2, ProofMode::Msbmt, ProofMode::Fixed]
            .into_iter()
            .enumerate()
        {
            for trial in 0..10u64 {
                let run = run_protocol(&instance, &witness, mode, 100 + 10 * i as u64 + trial)
                    .unwrap();
                assert!(
                    run.verdict.accepted,
                    "mode {mode} trial {trial} failed: {:?}",
                    run.verdict.failures()
                );
            }
        }
    }

    #[test]
    fn original_mode_reduction_rejects() {
        // at K5 = 0 the response moduli are tight, so reductions are frequent;
        // whenever a reduction changed a value, verification must reject
        let sec = SecurityParams { k5: 0, ..SecurityParams::desk() };
        let (instance, witness) = setup_honest(4, sec, 64, 13).unwrap();
        let mut rejected = 0;
        for trial in 0..50u64 {
            let run = run_protocol(&instance, &witness, ProofMode::Original, 500 + trial).unwrap();
            if !run.verdict.accepted {
                rejected += 1;
            }
        }
        assert!(rejected > 0, "expected at least one reduction-caused rejection");
        // control: MP2 on the same seeds never rejects
        for trial in 0..50u64 {
            let run = run_protocol(&instance, &witness, ProofMode::Mp2, 500 + trial).unwrap();
            assert!(run.verdict.accepted);
        }
    }

    #[test]
    fn sum_product_examples() {
        let p1: Vec<BigInt> = vec![2; 10].into_iter().map(BigInt::from).collect();
        let rho1: Vec<BigInt> =
            [4, 4, 4, 4, 2, 2, 1, 1, -1, -1].iter().map(|&v| bi(v)).collect();
        assert!(check_sum_product(&p1, &rho1));

        let p2: Vec<BigInt> =
            [2, 2, 3, 3, 5, 5, 7, 7, 11, 11].iter().map(|&v| bi(v)).collect();
        let rho2: Vec<BigInt> = [22, 22, 15, 15, -7, -7, -1, -1, -1, -1]
            .iter()
            .map(|&v| bi(v))
            .collect();
        assert!(check_sum_product(&p2, &rho2));

        // permutations pass, single increments fail
        let mut shuffled = p2.clone();
        shuffled.swap(0, 9);
        shuffled.swap(3, 5);
        assert!(check_sum_product(&p2, &shuffled));
        let mut bumped = p2.clone();
        bumped[4] += 1;
        assert!(!check_sum_product(&p2, &bumped));
    }

    #[test]
    fn determinism_same_seed_same_transcript() {
        let (instance, witness) = setup_honest(3, SecurityParams::desk(), 64, 21).unwrap();
        let a = run_protocol(&instance, &witness, ProofMode::Mp2, 9).unwrap();
        let b = run_protocol(&instance, &witness, ProofMode::Mp2, 9).unwrap();
        assert_eq!(a.transcript, b.transcript);
        let c = run_protocol(&instance, &witness, ProofMode::Mp2, 10).unwrap();
        assert_ne!(a.transcript, c.transcript);
    }

    #[test]
    fn transcript_serde_roundtrip() {
        let (instance, witness) = setup_honest(2, SecurityParams::desk(), 64, 31).unwrap();
        let run = run_protocol(&instance, &witness, ProofMode::Fixed, 4).unwrap();
        let json = serde_json::to_string(&run.transcript).unwrap();
        let back: Transcript = serde_json::from_str(&json).unwrap();
        assert_eq!(run.transcript, back);
        // recompute commitments from the serialized transcript: verify again
        let verdict = verify(&instance, &run.primes, &back, ProofMode::Fixed).unwrap();
        assert!(verdict.accepted);
    }

    #[test]
    fn malformed_transcript_is_error_not_rejection() {
        let (instance, witness) = setup_honest(3, SecurityParams::desk(), 64, 41).unwrap();
        let run = run_protocol(&instance, &witness, ProofMode::Mp2, 6).unwrap();
        let mut bad = run.transcript.clone();
        bad.d.pop();
        assert!(matches!(
            verify(&instance, &run.primes, &bad, ProofMode::Mp2),
            Err(Error::MalformedTranscript(_))
        ));
        // FIXED without range proofs is malformed, not merely rejected
        assert!(matches!(
            verify(&instance, &run.primes, &run.transcript, ProofMode::Fixed),
            Err(Error::MalformedTranscript(_))
        ));
    }

    #[test]
    fn tampered_output_rejected() {
        let (instance, witness) = setup_honest(3, SecurityParams::desk(), 64, 51).unwrap();
        let mut tampered = instance.clone();
        // replace one output with a fresh encryption of a different message
        let m = crate::elgamal::encode_message(&tampered.params, &bi(987));
        tampered.outputs[1] =
            crate::elgamal::encrypt(&tampered.params, &m, &bi(123)).unwrap();
        let mut failures = 0;
        for trial in 0..20u64 {
            let run = run_protocol(&tampered, &witness, ProofMode::Mp2, 700 + trial).unwrap();
            if !run.verdict.accepted {
                failures += 1;
            }
        }
        assert_eq!(failures, 20, "BATCH must catch a tampered output");
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("mp2".parse::<ProofMode>().unwrap(), ProofMode::Mp2);
        assert_eq!("FIXED".parse::<ProofMode>().unwrap(), ProofMode::Fixed);
        assert!("bogus".parse::<ProofMode>().is_err());
        assert_eq!(ProofMode::Msbmt.to_string(), "MSBMT");
    }
}
