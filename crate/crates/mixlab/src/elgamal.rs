//! ElGamal encryption, re-encryption, and the honest shuffle operation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::group::{counted_pow, serde_bigint, ElGamalGroup, ElGamalParams};
use crate::seed;
use crate::Error;

/// One ElGamal ciphertext `(u, v)`, both in the order-q subgroup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ciphertext {
    #[serde(with = "serde_bigint")]
    pub u: BigInt,
    #[serde(with = "serde_bigint")]
    pub v: BigInt,
}

/// A bijection on `{0..n-1}`. Serialized 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self, Error> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &i in &map {
            if i >= n || seen[i] {
                return Err(Error::BadConfig("not a permutation".into()));
            }
            seen[i] = true;
        }
        Ok(Permutation(map))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn random(n: usize, rng: &mut ChaCha20Rng) -> Self {
        use rand::seq::SliceRandom;
        let mut map: Vec<usize> = (0..n).collect();
        map.shuffle(rng);
        Permutation(map)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self, Error> {
        let zero_based: Vec<usize> = v
            .into_iter()
            .map(|i| i.checked_sub(1).ok_or_else(|| Error::BadConfig("1-based index".into())))
            .collect::<Result<_, _>>()?;
        Permutation::new(zero_based)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.0.into_iter().map(|i| i + 1).collect()
    }
}

/// Secret data of one shuffle. For honest provers `rho[i] = p[perm[i]]` once
/// the challenge primes exist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShuffleWitness {
    pub perm: Permutation,
    #[serde(with = "crate::group::serde_bigint_vec")]
    pub reenc: Vec<BigInt>,
    #[serde(with = "crate::group::serde_bigint_vec")]
    pub rho: Vec<BigInt>,
}

impl ShuffleWitness {
    pub fn random(params: &ElGamalParams, n: usize, rng: &mut ChaCha20Rng) -> Self {
        let perm = Permutation::random(n, rng);
        let reenc = (0..n).map(|_| seed::below(rng, &params.q)).collect();
        ShuffleWitness { perm, reenc, rho: vec![] }
    }
}

/// `y = g^secret_key` with `secret_key` drawn from `[1, q-1]`.
pub fn keygen(group: &ElGamalGroup, seed_val: u64) -> (ElGamalParams, BigInt) {
    let mut rng = seed::substream(seed_val, "keygen");
    let x = seed::in_range(&mut rng, &BigInt::one(), &(&group.q - 1));
    let y = counted_pow(&group.g, &x, &group.p_mod).unwrap();
    (
        ElGamalParams {
            p_mod: group.p_mod.clone(),
            q: group.q.clone(),
            g: group.g.clone(),
            y,
        },
        x,
    )
}

/// Full parameter generation: group plus a public key, secret key discarded.
pub fn gen_elgamal_params(bits: u64, seed_val: u64) -> ElGamalParams {
    let group = crate::group::gen_elgamal_group(bits, seed_val);
    keygen(&group, seed_val).0
}

/// Encode a raw value as a subgroup member by squaring it mod `p_mod`.
pub fn encode_message(params: &ElGamalParams, raw: &BigInt) -> BigInt {
    let m = raw.mod_floor(&params.p_mod);
    (&m * &m).mod_floor(&params.p_mod)
}

/// `(u, v) = (g^r, m * y^r)`. `m` must already lie in the subgroup.
pub fn encrypt(params: &ElGamalParams, m: &BigInt, r: &BigInt) -> Result<Ciphertext, Error> {
    if !params.in_subgroup(m) {
        return Err(Error::MessageNotInSubgroup);
    }
    let u = counted_pow(&params.g, r, &params.p_mod)?;
    let v = (m * counted_pow(&params.y, r, &params.p_mod)?).mod_floor(&params.p_mod);
    Ok(Ciphertext { u, v })
}

pub fn decrypt(params: &ElGamalParams, sk: &BigInt, c: &Ciphertext) -> BigInt {
    let shared = counted_pow(&c.u, &-sk.clone(), &params.p_mod).unwrap();
    (&c.v * shared).mod_floor(&params.p_mod)
}

/// `(u * g^r, v * y^r)`; the decryption is unchanged.
pub fn reencrypt(params: &ElGamalParams, c: &Ciphertext, r: &BigInt) -> Ciphertext {
    let u = (&c.u * counted_pow(&params.g, r, &params.p_mod).unwrap()).mod_floor(&params.p_mod);
    let v = (&c.v * counted_pow(&params.y, r, &params.p_mod).unwrap()).mod_floor(&params.p_mod);
    Ciphertext { u, v }
}

/// `output[i] = reencrypt(inputs[perm[i]], reenc[i])`.
pub fn shuffle(
    params: &ElGamalParams,
    inputs: &[Ciphertext],
    witness: &ShuffleWitness,
) -> Result<Vec<Ciphertext>, Error> {
    if inputs.len() != witness.perm.len() || inputs.len() != witness.reenc.len() {
        return Err(Error::LengthMismatch);
    }
    Ok((0..inputs.len())
        .map(|i| reencrypt(params, &inputs[witness.perm.apply(i)], &witness.reenc[i]))
        .collect())
}
