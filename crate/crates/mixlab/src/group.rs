//! Arbitrary-precision arithmetic, prime generation, and the two algebraic
//! settings the protocol needs: a prime-order ElGamal subgroup and a
//! hidden-order commitment group (squares modulo a two-safe-prime composite).

use std::cell::Cell;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::seed;
use crate::Error;

/// Serde adapter: big integers as decimal strings.
pub mod serde_bigint {
    use num_bigint::BigInt;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Serde adapter: vectors of big integers as decimal strings.
pub mod serde_bigint_vec {
    use num_bigint::BigInt;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter().map(|s| s.parse().map_err(de::Error::custom)).collect()
    }
}

thread_local! {
    static EXP_COUNTER: Cell<u64> = const { Cell::new(0) };
}

/// Instrumentation for the range-proof cost comparison: counts group
/// exponentiations performed through [`counted_pow`] on the current thread.
pub mod exp_counter {
    use super::EXP_COUNTER;

    pub fn reset() {
        EXP_COUNTER.with(|c| c.set(0));
    }

    pub fn get() -> u64 {
        EXP_COUNTER.with(|c| c.get())
    }
}

/// Modular inverse of `a` mod `m`, if it exists.
pub fn mod_inv(a: &BigInt, m: &BigInt) -> Result<BigInt, Error> {
    let a = a.mod_floor(m);
    let ext = a.extended_gcd(m);
    if !ext.gcd.is_one() {
        return Err(Error::NoInverse);
    }
    Ok(ext.x.mod_floor(m))
}

/// `base^exponent mod modulus` in `[0, modulus-1]`. Negative exponents are
/// handled through the modular inverse of `base`.
pub fn mod_exp(base: &BigInt, exponent: &BigInt, modulus: &BigInt) -> Result<BigInt, Error> {
    assert!(modulus >= &BigInt::from(2), "modulus must be >= 2");
    if exponent.is_negative() {
        let inv = mod_inv(base, modulus)?;
        Ok(inv.modpow(&-exponent, modulus))
    } else {
        Ok(base.mod_floor(modulus).modpow(exponent, modulus))
    }
}

/// [`mod_exp`] that also bumps the exponentiation counter. Used on every
/// group operation belonging to a proof, so instrumented counts line up with
/// the cost model. Utility arithmetic (primality tests etc.) stays uncounted.
pub fn counted_pow(base: &BigInt, exponent: &BigInt, modulus: &BigInt) -> Result<BigInt, Error> {
    EXP_COUNTER.with(|c| c.set(c.get() + 1));
    mod_exp(base, exponent, modulus)
}

const SMALL_PRIMES: [u32; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251,
];

fn miller_rabin(n: &BigUint, rounds: u32) -> bool {
    let one = BigUint::one();
    let two = &one + &one;
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    // Witnesses derived deterministically from n so results are reproducible.
    let mut h = sha2::Sha256::new();
    use sha2::Digest;
    h.update(n.to_bytes_le());
    let key: [u8; 32] = h.finalize().into();
    use rand_chacha::rand_core::SeedableRng;
    let mut rng = ChaCha20Rng::from_seed(key);
    for _ in 0..rounds {
        let a = {
            use num_bigint::RandBigInt;
            rng.gen_biguint_range(&two, &n_minus_one)
        };
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        let mut witness = true;
        for _ in 0..s.saturating_sub(1) {
            x = x.modpow(&two, n);
            if x == n_minus_one {
                witness = false;
                break;
            }
        }
        if witness {
            return false;
        }
    }
    true
}

/// Primality test: trial division (complete below 2^16), Miller-Rabin with
/// 40 rounds above.
pub fn is_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    let n = n.magnitude();
    for p in SMALL_PRIMES {
        let p = BigUint::from(p);
        if n == &p {
            return true;
        }
        if (n % p).is_zero() {
            return false;
        }
    }
    if n < &BigUint::from(1u32 << 16) {
        // Fully deterministic at this size: trial-divide up to sqrt(n).
        let m = n.to_u64().unwrap();
        let mut d = 257u64;
        while d * d <= m {
            if m % d == 0 {
                return false;
            }
            d += 2;
        }
        return true;
    }
    miller_rabin(n, 40)
}

/// Random prime with exactly `bits` bits.
pub fn gen_prime(bits: u64, rng: &mut ChaCha20Rng) -> BigInt {
    loop {
        let mut cand = seed::exact_bits(rng, bits);
        cand.set_bit(0, true);
        let cand = BigInt::from(cand);
        if is_prime(&cand) {
            return cand;
        }
    }
}

/// Random safe prime `p = 2q + 1` with exactly `bits` bits; returns `(p, q)`.
pub fn gen_safe_prime(bits: u64, rng: &mut ChaCha20Rng) -> (BigInt, BigInt) {
    loop {
        let mut q = seed::exact_bits(rng, bits - 1);
        q.set_bit(0, true);
        let q = BigInt::from(q);
        if !is_prime(&q) {
            continue;
        }
        let p: BigInt = 2 * &q + 1;
        if is_prime(&p) {
            return (p, q);
        }
    }
}

/// Public parameters of the prime-order ElGamal setting: `p_mod = 2q + 1`,
/// `g` generates the order-`q` subgroup, `y = g^x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElGamalParams {
    #[serde(with = "serde_bigint")]
    pub p_mod: BigInt,
    #[serde(with = "serde_bigint")]
    pub q: BigInt,
    #[serde(with = "serde_bigint")]
    pub g: BigInt,
    #[serde(with = "serde_bigint")]
    pub y: BigInt,
}

impl ElGamalParams {
    pub fn in_subgroup(&self, v: &BigInt) -> bool {
        !v.is_zero() && mod_exp(v, &self.q, &self.p_mod).map(|r| r.is_one()).unwrap_or(false)
    }
}

/// The ElGamal group without a public key, as produced by parameter setup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElGamalGroup {
    #[serde(with = "serde_bigint")]
    pub p_mod: BigInt,
    #[serde(with = "serde_bigint")]
    pub q: BigInt,
    #[serde(with = "serde_bigint")]
    pub g: BigInt,
}

/// Deterministic ElGamal group generation: safe prime modulus and a
/// quadratic-residue generator.
pub fn gen_elgamal_group(bits: u64, seed_val: u64) -> ElGamalGroup {
    assert!(bits >= 8, "bits must be >= 8");
    let mut rng = seed::substream(seed_val, "elgamal-group");
    let (p_mod, q) = gen_safe_prime(bits, &mut rng);
    let g = loop {
        let h = seed::in_range(&mut rng, &BigInt::from(2), &(&p_mod - 2));
        let g = mod_exp(&h, &BigInt::from(2), &p_mod).unwrap();
        if !g.is_one() {
            break g;
        }
    };
    ElGamalGroup { p_mod, q, g }
}

/// Commitment setting: squares modulo a product of two distinct safe primes.
/// `secret_order` belongs to the trusted setup only; prover and verifier
/// roles never read it and it never serializes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HiddenOrderGroup {
    #[serde(with = "serde_bigint")]
    pub modulus: BigInt,
    #[serde(with = "serde_bigint")]
    pub h: BigInt,
    #[serde(with = "serde_bigint")]
    pub g_c: BigInt,
    #[serde(skip)]
    pub secret_order: Option<BigInt>,
}

impl HiddenOrderGroup {
    /// Counted exponentiation in the commitment group.
    pub fn pow(&self, base: &BigInt, exp: &BigInt) -> Result<BigInt, Error> {
        counted_pow(base, exp, &self.modulus)
    }

    /// `h^r * g_c^x mod modulus` (integer commitment; `x` may be negative).
    pub fn commit(&self, x: &BigInt, r: &BigInt) -> Result<BigInt, Error> {
        Ok(self.pow(&self.h, r)? * self.pow(&self.g_c, x)? % &self.modulus)
    }

    pub fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b).mod_floor(&self.modulus)
    }

    pub fn inv(&self, a: &BigInt) -> Result<BigInt, Error> {
        mod_inv(a, &self.modulus)
    }
}

/// Deterministic hidden-order group generation.
pub fn gen_hidden_order_group(bits: u64, seed_val: u64) -> HiddenOrderGroup {
    assert!(bits >= 12, "bits must be >= 12");
    let mut rng = seed::substream(seed_val, "hidden-group");
    let half = bits / 2;
    let (p1, q1) = gen_safe_prime(half, &mut rng);
    let (p2, _q2) = loop {
        let (p2, q2) = gen_safe_prime(bits - half, &mut rng);
        if p2 != p1 {
            break (p2, q2);
        }
    };
    let modulus = &p1 * &p2;
    // order of the group of squares mod p1*p2
    let order: BigInt = (&p1 - 1) * (&p2 - 1) / 4;
    let h = loop {
        let a = seed::in_range(&mut rng, &BigInt::from(2), &(&modulus - 2));
        if a.gcd(&modulus).is_one() {
            let h = mod_exp(&a, &BigInt::from(2), &modulus).unwrap();
            if !h.is_one() {
                break h;
            }
        }
    };
    let x = seed::in_range(&mut rng, &BigInt::one(), &(&order - 1));
    let g_c = mod_exp(&h, &x, &modulus).unwrap();
    let _ = q1; // q1 only pins the safe-prime structure
    HiddenOrderGroup { modulus, h, g_c, secret_order: Some(order) }
}

/// Bit-length security parameters. `k` is the range-proof bound exponent;
/// the FIXED and MSBMT modes tie it to `k3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecurityParams {
    #[serde(rename = "K2")]
    pub k2: u32,
    #[serde(rename = "K3")]
    pub k3: u32,
    #[serde(rename = "K4")]
    pub k4: u32,
    #[serde(rename = "K5")]
    pub k5: u32,
    #[serde(rename = "K")]
    pub k: u32,
}

impl SecurityParams {
    /// Desk-scale defaults; the source scheme fixes none of these.
    pub fn desk() -> Self {
        SecurityParams { k2: 8, k3: 4, k4: 4, k5: 6, k: 4 }
    }

    pub fn with_k3(mut self, k3: u32) -> Self {
        self.k3 = k3;
        self.k = k3;
        self
    }

    pub fn with_k5(mut self, k5: u32) -> Self {
        self.k5 = k5;
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.k3 < 2 {
            return Err(Error::EmptyPrimeRange);
        }
        if self.k4 < 2 {
            return Err(Error::BadConfig("K4 must be >= 2".into()));
        }
        if self.k2 <= self.k4 {
            return Err(Error::BadConfig("K2 must exceed K4".into()));
        }
        Ok(())
    }

    /// Inclusive challenge range `[2^(K4-1), 2^K4 - 1]`.
    pub fn challenge_range(&self) -> (BigInt, BigInt) {
        (BigInt::one() << (self.k4 - 1), (BigInt::one() << self.k4) - 1)
    }

    /// `2^(K3+K4+K5)`, the modulus of the `d` responses and the monotone-test bound.
    pub fn d_modulus(&self) -> BigInt {
        BigInt::one() << (self.k3 + self.k4 + self.k5)
    }

    /// `2^(K2+K4+2*K5)`, the modulus of the per-index `e` responses.
    pub fn e_modulus(&self) -> BigInt {
        BigInt::one() << (self.k2 + self.k4 + 2 * self.k5)
    }

    /// `2^(K2 + N*K3 + K4 + K5 + ceil(log2 N))`, the aggregate product-check modulus.
    pub fn e_prod_modulus(&self, n: usize) -> BigInt {
        BigInt::one() << (self.k2 + n as u32 * self.k3 + self.k4 + self.k5 + ceil_log2(n))
    }

    /// `2^(K2 + K5 + ceil(log2 N))`, the aggregate sum-check modulus.
    pub fn e_sum_modulus(&self, n: usize) -> BigInt {
        BigInt::one() << (self.k2 + self.k5 + ceil_log2(n))
    }
}

pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// All primes in `[2^(k3-1), 2^k3 - 1]`; only usable at small `k3`.
pub fn primes_in_range(k3: u32) -> Vec<BigInt> {
    assert!(k3 <= 24, "enumeration only at desk scale");
    let lo = 1u64 << (k3 - 1);
    let hi = (1u64 << k3) - 1;
    (lo..=hi).map(BigInt::from).filter(is_prime).collect()
}

/// Uniform prime in `[2^(k3-1), 2^k3 - 1]` by rejection sampling.
pub fn sample_prime_in_range(k3: u32, rng: &mut ChaCha20Rng) -> Result<BigInt, Error> {
    if k3 < 2 {
        return Err(Error::EmptyPrimeRange);
    }
    if k3 <= 24 && primes_in_range(k3).is_empty() {
        return Err(Error::EmptyPrimeRange);
    }
    let lo = BigInt::one() << (k3 - 1);
    let hi = (BigInt::one() << k3) - 1;
    loop {
        let cand = seed::in_range(rng, &lo, &hi);
        if is_prime(&cand) {
            return Ok(cand);
        }
    }
}

/// Combined parameter document as written to disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamSet {
    #[serde(flatten)]
    pub elgamal: ElGamalParams,
    #[serde(with = "serde_bigint")]
    pub modulus: BigInt,
    #[serde(with = "serde_bigint")]
    pub h: BigInt,
    #[serde(with = "serde_bigint")]
    pub g_c: BigInt,
    #[serde(flatten)]
    pub security: SecurityParams,
}

impl ParamSet {
    pub fn new(elgamal: ElGamalParams, hog: &HiddenOrderGroup, security: SecurityParams) -> Self {
        ParamSet {
            elgamal,
            modulus: hog.modulus.clone(),
            h: hog.h.clone(),
            g_c: hog.g_c.clone(),
            security,
        }
    }

    pub fn hidden_group(&self) -> HiddenOrderGroup {
        HiddenOrderGroup {
            modulus: self.modulus.clone(),
            h: self.h.clone(),
            g_c: self.g_c.clone(),
            secret_order: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn mod_exp_identity_and_direct() {
        assert_eq!(mod_exp(&bi(5), &bi(0), &bi(23)).unwrap(), bi(1));
        assert_eq!(mod_exp(&bi(2), &bi(10), &bi(1000)).unwrap(), bi(24));
    }

    #[test]
    fn mod_exp_negative_exponent() {
        // extended-gcd oracle: 3 * 8 = 24 = 1 mod 23
        assert_eq!(mod_exp(&bi(3), &bi(-1), &bi(23)).unwrap(), bi(8));
        assert!(matches!(mod_exp(&bi(6), &bi(-1), &bi(24)), Err(Error::NoInverse)));
    }

    #[test]
    fn mod_exp_additive_in_exponent() {
        let mut rng = seed::substream(3, "exp-prop");
        let m = bi(1009);
        for _ in 0..50 {
            let a = seed::in_range(&mut rng, &bi(1), &bi(1008));
            let e1 = seed::in_range(&mut rng, &bi(0), &bi(5000));
            let e2 = seed::in_range(&mut rng, &bi(0), &bi(5000));
            let lhs = mod_exp(&a, &(&e1 + &e2), &m).unwrap();
            let rhs = mod_exp(&a, &e1, &m).unwrap() * mod_exp(&a, &e2, &m).unwrap() % &m;
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn small_prime_enumeration() {
        let p4: Vec<i64> = vec![11, 13];
        assert_eq!(primes_in_range(4), p4.into_iter().map(bi).collect::<Vec<_>>());
        assert_eq!(primes_in_range(3), vec![bi(5), bi(7)]);
        assert_eq!(primes_in_range(2), vec![bi(2), bi(3)]);
    }

    #[test]
    fn sampled_primes_land_in_range() {
        for k3 in [2u32, 3, 4] {
            let set = primes_in_range(k3);
            let mut rng = seed::substream(11, "prime-sample");
            for _ in 0..50 {
                let p = sample_prime_in_range(k3, &mut rng).unwrap();
                assert!(set.contains(&p));
            }
        }
        let mut rng = seed::substream(11, "prime-sample");
        assert!(matches!(sample_prime_in_range(1, &mut rng), Err(Error::EmptyPrimeRange)));
    }

    #[test]
    fn sampled_primes_roughly_uniform() {
        // within 5 percentage points of uniform over 10^4 draws
        for k3 in [2u32, 3, 4] {
            let set = primes_in_range(k3);
            let mut rng = seed::substream(42, "prime-uniform");
            let mut counts: HashMap<BigInt, u64> = HashMap::new();
            let draws = 10_000u64;
            for _ in 0..draws {
                *counts.entry(sample_prime_in_range(k3, &mut rng).unwrap()).or_default() += 1;
            }
            let expect = 1.0 / set.len() as f64;
            for p in &set {
                let freq = *counts.get(p).unwrap_or(&0) as f64 / draws as f64;
                assert!((freq - expect).abs() < 0.05, "k3={k3} p={p} freq={freq}");
            }
        }
    }

    #[test]
    fn elgamal_group_shape() {
        let grp = gen_elgamal_group(16, 5);
        assert!(is_prime(&grp.p_mod));
        assert!(is_prime(&grp.q));
        assert_eq!(grp.p_mod, 2 * &grp.q + 1);
        assert_eq!(mod_exp(&grp.g, &grp.q, &grp.p_mod).unwrap(), bi(1));
        assert!(!grp.g.is_one());
        // determinism
        assert_eq!(grp, gen_elgamal_group(16, 5));
        assert_ne!(grp, gen_elgamal_group(16, 6));
    }

    #[test]
    fn elgamal_group_larger_size() {
        let grp = gen_elgamal_group(96, 9);
        assert!(is_prime(&grp.p_mod));
        assert!(is_prime(&grp.q));
        assert_eq!(grp.p_mod.bits(), 96);
    }

    #[test]
    fn hidden_order_group_shape() {
        let hog = gen_hidden_order_group(16, 5);
        let order = hog.secret_order.clone().unwrap();
        // factorization oracle at toy size: modulus is a product of two
        // distinct safe primes
        let m = hog.modulus.to_u64().unwrap();
        let mut factors = vec![];
        let mut d = 3u64;
        let mut rem = m;
        while d * d <= rem {
            while rem % d == 0 {
                factors.push(d);
                rem /= d;
            }
            d += 2;
        }
        if rem > 1 {
            factors.push(rem);
        }
        assert_eq!(factors.len(), 2);
        assert_ne!(factors[0], factors[1]);
        for f in &factors {
            assert!(is_prime(&bi(*f as i64)));
            assert!(is_prime(&bi((*f as i64 - 1) / 2)));
        }
        assert_eq!(mod_exp(&hog.h, &order, &hog.modulus).unwrap(), bi(1));
        assert_eq!(hog, gen_hidden_order_group(16, 5));
    }

    #[test]
    fn param_serialization_roundtrip_and_field_names() {
        let grp = gen_elgamal_group(16, 1);
        let params = ElGamalParams {
            p_mod: grp.p_mod,
            q: grp.q,
            g: grp.g.clone(),
            y: grp.g,
        };
        let hog = gen_hidden_order_group(16, 1);
        let ps = ParamSet::new(params, &hog, SecurityParams::desk());
        let v = serde_json::to_value(&ps).unwrap();
        for key in ["p_mod", "q", "g", "y", "modulus", "h", "g_c", "K2", "K3", "K4", "K5", "K"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        // secret_order never serializes
        assert!(v.get("secret_order").is_none());
        let back: ParamSet = serde_json::from_value(v).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), serde_json::to_string(&ps).unwrap());
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(10), 4);
        assert_eq!(ceil_log2(16), 4);
    }
}
