//! Prime-order bilinear group arithmetic with two interchangeable backends.
//!
//! * [`Backend::Mock`]: `G1 = G2 = GT = (Z_q, +)` with `g1 = g2 = 1`,
//!   `exp(b, s) = b·s mod q` and `e(a, b) = a·b mod q`. Discrete logs are the
//!   payloads themselves, which is what the brute-force oracles rely on.
//!   **Insecure by construction.**
//! * [`Backend::Pairing`]: BLS12-381 (type-3 pairing) via arkworks.
//!
//! The group operation is written multiplicatively throughout ([`GroupSuite::mul`],
//! [`GroupSuite::exp`]) regardless of how the backend stores elements.
//!
//! `hash_to_g1` is `g1^(sha256(msg) mod q)` on both backends. This exposes the
//! discrete log of every hashed point and must not be used where BLS security
//! matters; it exists so that both backends agree on every equality.

use std::fmt;

use ark_bls12_381::{g1, g2, Bls12_381, Fq, Fq12, Fq2, Fr, G1Affine, G2Affine};
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::short_weierstrass::SWCurveConfig;
use ark_ec::{AffineRepr, CurveGroup, PrimeGroup};
use ark_ff::{BigInt, Field, PrimeField, Zero};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize, Compress, Validate};
use rand::{Rng, RngCore};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::hashing::{sha256, Digest};

type Gt = PairingOutput<Bls12_381>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("malformed {0} element")]
    MalformedElement(GroupTag),
    #[error("group tag mismatch: expected {expected}, found {found}")]
    TagMismatch { expected: GroupTag, found: GroupTag },
    #[error("invalid encoding: {0}")]
    Encoding(String),
    #[error("mock modulus {0} is not a prime below 2^63")]
    InvalidModulus(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupTag {
    G1,
    G2,
    #[serde(rename = "GT")]
    Gt,
}

impl GroupTag {
    fn byte(self) -> u8 {
        match self {
            GroupTag::G1 => 1,
            GroupTag::G2 => 2,
            GroupTag::Gt => 3,
        }
    }

    fn from_byte(b: u8) -> Option<Self> {
        match b {
            1 => Some(GroupTag::G1),
            2 => Some(GroupTag::G2),
            3 => Some(GroupTag::Gt),
            _ => None,
        }
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupTag::G1 => "G1",
            GroupTag::G2 => "G2",
            GroupTag::Gt => "GT",
        })
    }
}

/// Which arithmetic backs a [`GroupSuite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Mock,
    Pairing,
}

impl std::str::FromStr for Backend {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mock" => Ok(Backend::Mock),
            "pairing" => Ok(Backend::Pairing),
            other => Err(format!("unknown backend `{other}` (expected mock|pairing)")),
        }
    }
}

/// Types with a canonical byte encoding used by digests and sender tags.
pub trait CanonicalBytes {
    fn canonical_bytes(&self) -> Vec<u8>;
}

/// A residue in `[0, q)`. Only a [`ScalarField`] creates reduced values.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Scalar([u64; 4]);

impl Scalar {
    pub const ZERO: Scalar = Scalar([0; 4]);

    /// Fixed-width (32 byte) big-endian encoding.
    pub fn to_be_bytes(&self) -> [u8; 32] {
        let mut out = [0u8; 32];
        for (i, limb) in self.0.iter().rev().enumerate() {
            out[i * 8..i * 8 + 8].copy_from_slice(&limb.to_be_bytes());
        }
        out
    }

    fn from_be_bytes_raw(bytes: &[u8; 32]) -> Self {
        let mut limbs = [0u64; 4];
        for (i, limb) in limbs.iter_mut().enumerate() {
            let start = 32 - (i + 1) * 8;
            *limb = u64::from_be_bytes(bytes[start..start + 8].try_into().expect("8 bytes"));
        }
        Scalar(limbs)
    }

    /// The value when it fits in 64 bits (always true on the mock backend).
    pub fn to_u64(&self) -> Option<u64> {
        (self.0[1] == 0 && self.0[2] == 0 && self.0[3] == 0).then_some(self.0[0])
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; 4]
    }

    fn low(&self) -> u64 {
        self.0[0]
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_u64() {
            Some(v) => write!(f, "Scalar({v})"),
            None => write!(f, "Scalar(0x{})", hex::encode(self.to_be_bytes())),
        }
    }
}

impl CanonicalBytes for Scalar {
    fn canonical_bytes(&self) -> Vec<u8> {
        self.to_be_bytes().to_vec()
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(self.to_be_bytes()))
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let bytes = hex::decode(&s).map_err(serde::de::Error::custom)?;
        let arr: [u8; 32] = bytes
            .try_into()
            .map_err(|_| serde::de::Error::custom("scalar must be 32 bytes"))?;
        Ok(Scalar::from_be_bytes_raw(&arr))
    }
}

/// Arithmetic in `Z_q` for the suite's group order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarField {
    Mock { q: u64 },
    Bls12_381,
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in BASES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn fr_of(s: &Scalar) -> Fr {
    Fr::from_bigint(BigInt::new(s.0)).expect("scalar is reduced modulo r")
}

fn scalar_of(f: Fr) -> Scalar {
    Scalar(f.into_bigint().0)
}

impl ScalarField {
    /// The modulus as 32 big-endian bytes.
    pub fn modulus_be_bytes(&self) -> [u8; 32] {
        match self {
            ScalarField::Mock { q } => Scalar([*q, 0, 0, 0]).to_be_bytes(),
            ScalarField::Bls12_381 => Scalar(Fr::MODULUS.0).to_be_bytes(),
        }
    }

    /// `Some(q)` on the mock backend.
    pub fn small_modulus(&self) -> Option<u64> {
        match self {
            ScalarField::Mock { q } => Some(*q),
            ScalarField::Bls12_381 => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        Scalar::ZERO
    }

    pub fn one(&self) -> Scalar {
        self.from_u64(1)
    }

    pub fn from_u64(&self, v: u64) -> Scalar {
        match self {
            ScalarField::Mock { q } => Scalar([v % q, 0, 0, 0]),
            ScalarField::Bls12_381 => scalar_of(Fr::from(v)),
        }
    }

    /// Accepts a big-endian value only if it is already reduced.
    pub fn from_be_bytes(&self, bytes: &[u8; 32]) -> Option<Scalar> {
        let s = Scalar::from_be_bytes_raw(bytes);
        self.contains(&s).then_some(s)
    }

    /// Interprets a digest as a big-endian integer and reduces it mod q.
    pub fn from_digest(&self, digest: &Digest) -> Scalar {
        match self {
            ScalarField::Mock { q } => {
                let q = *q as u128;
                let r = digest.iter().fold(0u128, |acc, b| (acc * 256 + *b as u128) % q);
                Scalar([r as u64, 0, 0, 0])
            }
            ScalarField::Bls12_381 => scalar_of(Fr::from_be_bytes_mod_order(digest)),
        }
    }

    pub fn contains(&self, s: &Scalar) -> bool {
        match self {
            ScalarField::Mock { q } => s.to_u64().is_some_and(|v| v < *q),
            ScalarField::Bls12_381 => Fr::from_bigint(BigInt::new(s.0)).is_some(),
        }
    }

    pub fn random<R: RngCore + ?Sized>(&self, rng: &mut R) -> Scalar {
        match self {
            ScalarField::Mock { q } => Scalar([rng.gen_range(0..*q), 0, 0, 0]),
            ScalarField::Bls12_381 => {
                let mut wide = [0u8; 64];
                rng.fill_bytes(&mut wide);
                scalar_of(Fr::from_le_bytes_mod_order(&wide))
            }
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match self {
            ScalarField::Mock { q } => {
                Scalar([((a.low() as u128 + b.low() as u128) % *q as u128) as u64, 0, 0, 0])
            }
            ScalarField::Bls12_381 => scalar_of(fr_of(a) + fr_of(b)),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match self {
            ScalarField::Mock { q } => Scalar([(q - a.low()) % q, 0, 0, 0]),
            ScalarField::Bls12_381 => scalar_of(-fr_of(a)),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match self {
            ScalarField::Mock { q } => Scalar([mulmod(a.low(), b.low(), *q), 0, 0, 0]),
            ScalarField::Bls12_381 => scalar_of(fr_of(a) * fr_of(b)),
        }
    }

    pub fn pow(&self, base: &Scalar, exp: u64) -> Scalar {
        match self {
            ScalarField::Mock { q } => Scalar([powmod(base.low(), exp, *q), 0, 0, 0]),
            ScalarField::Bls12_381 => scalar_of(fr_of(base).pow([exp])),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if a.is_zero() {
            return None;
        }
        match self {
            ScalarField::Mock { q } => Some(Scalar([powmod(a.low(), q - 2, *q), 0, 0, 0])),
            ScalarField::Bls12_381 => fr_of(a).inverse().map(scalar_of),
        }
    }
}

#[allow(clippy::large_enum_variant)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Repr {
    Mock(u64),
    G1(G1Affine),
    G2(G2Affine),
    Gt(Gt),
}

/// An element of G1, G2 or GT. Equality is canonical: the pairing backend
/// stores affine points and reduced target-field elements.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct GroupElement {
    tag: GroupTag,
    repr: Repr,
}

impl GroupElement {
    pub fn tag(&self) -> GroupTag {
        self.tag
    }

    /// Payload of a mock element, i.e. its discrete log w.r.t. the generator.
    pub fn mock_value(&self) -> Option<u64> {
        match self.repr {
            Repr::Mock(v) => Some(v),
            _ => None,
        }
    }

    /// Canonical encoding: tag byte, big-endian `u32` payload length, payload.
    pub fn to_bytes(&self) -> Vec<u8> {
        let payload = match &self.repr {
            Repr::Mock(v) => v.to_be_bytes().to_vec(),
            Repr::G1(p) => compressed(p),
            Repr::G2(p) => compressed(p),
            Repr::Gt(p) => compressed(p),
        };
        let mut out = Vec::with_capacity(5 + payload.len());
        out.push(self.tag.byte());
        out.extend_from_slice(&(payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&payload);
        out
    }

    /// Decodes [`GroupElement::to_bytes`]. Subgroup membership is *not*
    /// checked here; use [`GroupSuite::is_member`].
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, GroupError> {
        let err = |m: &str| GroupError::Encoding(m.to_string());
        if bytes.len() < 5 {
            return Err(err("truncated header"));
        }
        let tag = GroupTag::from_byte(bytes[0]).ok_or_else(|| err("unknown tag"))?;
        let len = u32::from_be_bytes(bytes[1..5].try_into().expect("4 bytes")) as usize;
        let payload = &bytes[5..];
        if payload.len() != len {
            return Err(err("length prefix does not match payload"));
        }
        let repr = if len == 8 {
            Repr::Mock(u64::from_be_bytes(payload.try_into().expect("8 bytes")))
        } else {
            let bad = |_| GroupError::MalformedElement(tag);
            match tag {
                GroupTag::G1 => Repr::G1(
                    G1Affine::deserialize_with_mode(payload, Compress::Yes, Validate::No)
                        .map_err(bad)?,
                ),
                GroupTag::G2 => Repr::G2(
                    G2Affine::deserialize_with_mode(payload, Compress::Yes, Validate::No)
                        .map_err(bad)?,
                ),
                GroupTag::Gt => {
                    Repr::Gt(Gt::deserialize_with_mode(payload, Compress::Yes, Validate::No).map_err(bad)?)
                }
            }
        };
        Ok(GroupElement { tag, repr })
    }
}

fn compressed<T: CanonicalSerialize>(value: &T) -> Vec<u8> {
    let mut out = Vec::new();
    value
        .serialize_compressed(&mut out)
        .expect("serializing into a Vec cannot fail");
    out
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.repr {
            Repr::Mock(v) => write!(f, "{}({v})", self.tag),
            _ => {
                let bytes = self.to_bytes();
                write!(f, "{}(0x{}..)", self.tag, hex::encode(&bytes[5..13]))
            }
        }
    }
}

impl CanonicalBytes for GroupElement {
    fn canonical_bytes(&self) -> Vec<u8> {
        self.to_bytes()
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(self.to_bytes()))
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let bytes = hex::decode(&s).map_err(serde::de::Error::custom)?;
        GroupElement::from_bytes(&bytes).map_err(serde::de::Error::custom)
    }
}

/// The system groups `G1 = <g1>`, `G2 = <g2>`, `GT` of prime order `q`, with
/// the pairing `e: G1 × G2 → GT`. Cheap to clone; all operations are pure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupSuite {
    field: ScalarField,
}

impl GroupSuite {
    /// Mock backend over `Z_q`; `q` must be a prime below `2^63`.
    pub fn mock(q: u64) -> Result<Self, GroupError> {
        if q >= 1 << 63 || !is_prime_u64(q) {
            return Err(GroupError::InvalidModulus(q));
        }
        Ok(GroupSuite { field: ScalarField::Mock { q } })
    }

    pub fn bls12_381() -> Self {
        GroupSuite { field: ScalarField::Bls12_381 }
    }

    pub fn new(backend: Backend, q: u64) -> Result<Self, GroupError> {
        match backend {
            Backend::Mock => Self::mock(q),
            Backend::Pairing => Ok(Self::bls12_381()),
        }
    }

    pub fn backend(&self) -> Backend {
        match self.field {
            ScalarField::Mock { .. } => Backend::Mock,
            ScalarField::Bls12_381 => Backend::Pairing,
        }
    }

    /// Identifier recorded in transcripts.
    pub fn curve_name(&self) -> String {
        match self.field {
            ScalarField::Mock { q } => format!("mock-z{q}"),
            ScalarField::Bls12_381 => "bls12-381".to_string(),
        }
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn generator(&self, tag: GroupTag) -> GroupElement {
        let repr = match (self.field, tag) {
            (ScalarField::Mock { .. }, _) => Repr::Mock(1),
            (ScalarField::Bls12_381, GroupTag::G1) => Repr::G1(G1Affine::generator()),
            (ScalarField::Bls12_381, GroupTag::G2) => Repr::G2(G2Affine::generator()),
            (ScalarField::Bls12_381, GroupTag::Gt) => Repr::Gt(Gt::generator()),
        };
        GroupElement { tag, repr }
    }

    pub fn identity(&self, tag: GroupTag) -> GroupElement {
        let repr = match (self.field, tag) {
            (ScalarField::Mock { .. }, _) => Repr::Mock(0),
            (ScalarField::Bls12_381, GroupTag::G1) => Repr::G1(G1Affine::zero()),
            (ScalarField::Bls12_381, GroupTag::G2) => Repr::G2(G2Affine::zero()),
            (ScalarField::Bls12_381, GroupTag::Gt) => Repr::Gt(Gt::zero()),
        };
        GroupElement { tag, repr }
    }

    /// Builds a raw mock element without range checks (it may be a non-member).
    pub fn mock_element(&self, tag: GroupTag, payload: u64) -> GroupElement {
        GroupElement { tag, repr: Repr::Mock(payload) }
    }

    /// A well-formed encoding that fails [`GroupSuite::is_member`]: payload
    /// `q` on the mock backend, an on-curve point outside the prime-order
    /// subgroup (or a non-cyclotomic `GT` value) on the pairing backend.
    pub fn non_member(&self, tag: GroupTag) -> GroupElement {
        match self.field {
            ScalarField::Mock { q } => self.mock_element(tag, q),
            ScalarField::Bls12_381 => {
                let repr = match tag {
                    GroupTag::G1 => Repr::G1(off_subgroup_g1()),
                    GroupTag::G2 => Repr::G2(off_subgroup_g2()),
                    GroupTag::Gt => Repr::Gt(PairingOutput(Fq12::from(2u64))),
                };
                GroupElement { tag, repr }
            }
        }
    }

    /// True iff `x` is a valid element of its tagged prime-order group.
    pub fn is_member(&self, x: &GroupElement) -> bool {
        match (self.field, &x.repr) {
            (ScalarField::Mock { q }, Repr::Mock(v)) => *v < q,
            (ScalarField::Bls12_381, Repr::G1(p)) => {
                x.tag == GroupTag::G1 && p.is_on_curve() && p.is_in_correct_subgroup_assuming_on_curve()
            }
            (ScalarField::Bls12_381, Repr::G2(p)) => {
                x.tag == GroupTag::G2 && p.is_on_curve() && p.is_in_correct_subgroup_assuming_on_curve()
            }
            (ScalarField::Bls12_381, Repr::Gt(p)) => {
                x.tag == GroupTag::Gt && !p.0.is_zero() && p.0.pow(Fr::MODULUS) == Fq12::ONE
            }
            _ => false,
        }
    }

    fn ensure_member(&self, x: &GroupElement) -> Result<(), GroupError> {
        if self.is_member(x) {
            Ok(())
        } else {
            Err(GroupError::MalformedElement(x.tag))
        }
    }

    /// `base^s` in the base's group.
    pub fn exp(&self, base: &GroupElement, s: &Scalar) -> Result<GroupElement, GroupError> {
        self.ensure_member(base)?;
        let repr = match (self.field, &base.repr) {
            (ScalarField::Mock { q }, Repr::Mock(v)) => Repr::Mock(mulmod(*v, s.low(), q)),
            (ScalarField::Bls12_381, Repr::G1(p)) => Repr::G1((*p * fr_of(s)).into_affine()),
            (ScalarField::Bls12_381, Repr::G2(p)) => Repr::G2((*p * fr_of(s)).into_affine()),
            (ScalarField::Bls12_381, Repr::Gt(p)) => Repr::Gt(*p * fr_of(s)),
            _ => unreachable!("membership implies a matching representation"),
        };
        Ok(GroupElement { tag: base.tag, repr })
    }

    /// The group operation `a · b`.
    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        if a.tag != b.tag {
            return Err(GroupError::TagMismatch { expected: a.tag, found: b.tag });
        }
        self.ensure_member(a)?;
        self.ensure_member(b)?;
        let repr = match (self.field, &a.repr, &b.repr) {
            (ScalarField::Mock { q }, Repr::Mock(x), Repr::Mock(y)) => {
                Repr::Mock(((*x as u128 + *y as u128) % q as u128) as u64)
            }
            (_, Repr::G1(x), Repr::G1(y)) => Repr::G1((x.into_group() + y).into_affine()),
            (_, Repr::G2(x), Repr::G2(y)) => Repr::G2((x.into_group() + y).into_affine()),
            (_, Repr::Gt(x), Repr::Gt(y)) => Repr::Gt(*x + *y),
            _ => unreachable!("membership implies a matching representation"),
        };
        Ok(GroupElement { tag: a.tag, repr })
    }

    /// The group inverse `a^{-1}`.
    pub fn inverse(&self, a: &GroupElement) -> Result<GroupElement, GroupError> {
        self.exp(a, &self.field.neg(&self.field.one()))
    }

    /// `e(a, b)` for `a ∈ G1`, `b ∈ G2`.
    pub fn pairing(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        if a.tag != GroupTag::G1 {
            return Err(GroupError::TagMismatch { expected: GroupTag::G1, found: a.tag });
        }
        if b.tag != GroupTag::G2 {
            return Err(GroupError::TagMismatch { expected: GroupTag::G2, found: b.tag });
        }
        self.ensure_member(a)?;
        self.ensure_member(b)?;
        let repr = match (self.field, &a.repr, &b.repr) {
            (ScalarField::Mock { q }, Repr::Mock(x), Repr::Mock(y)) => Repr::Mock(mulmod(*x, *y, q)),
            (_, Repr::G1(x), Repr::G2(y)) => Repr::Gt(Bls12_381::pairing(*x, *y)),
            _ => unreachable!("membership implies a matching representation"),
        };
        Ok(GroupElement { tag: GroupTag::Gt, repr })
    }

    /// `g1^(sha256(msg) mod q)`. Deterministic and backend-uniform, but the
    /// discrete log of the result is public: not a secure hash-to-curve.
    pub fn hash_to_g1(&self, msg: &[u8]) -> GroupElement {
        let s = self.field.from_digest(&sha256(msg));
        self.exp(&self.generator(GroupTag::G1), &s)
            .expect("generator is a member")
    }
}

fn off_subgroup_g1() -> G1Affine {
    (1u64..)
        .find_map(|c| {
            let x = Fq::from(c);
            let y = (x * x * x + g1::Config::COEFF_B).sqrt()?;
            let p = G1Affine::new_unchecked(x, y);
            (p.is_on_curve() && !p.is_in_correct_subgroup_assuming_on_curve()).then_some(p)
        })
        .expect("G1 has a large cofactor")
}

fn off_subgroup_g2() -> G2Affine {
    (1u64..)
        .find_map(|c| {
            let x = Fq2::new(Fq::from(c), Fq::from(0u64));
            let y = (x * x * x + g2::Config::COEFF_B).sqrt()?;
            let p = G2Affine::new_unchecked(x, y);
            (p.is_on_curve() && !p.is_in_correct_subgroup_assuming_on_curve()).then_some(p)
        })
        .expect("G2 has a large cofactor")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashing::derive_rng;

    fn mock() -> GroupSuite {
        GroupSuite::mock(101).unwrap()
    }

    #[test]
    fn mock_exp_examples() {
        let s = mock();
        let f = s.field();
        let g1 = s.generator(GroupTag::G1);
        assert_eq!(s.exp(&g1, &f.from_u64(7)).unwrap().mock_value(), Some(7));
        let five = s.mock_element(GroupTag::G1, 5);
        assert_eq!(s.exp(&five, &f.from_u64(3)).unwrap().mock_value(), Some(15));
        assert_eq!(s.exp(&g1, &f.zero()).unwrap(), s.identity(GroupTag::G1));
        assert_eq!(s.exp(&five, &f.one()).unwrap(), five);
    }

    #[test]
    fn exp_rejects_malformed_base() {
        let s = mock();
        let bad = s.mock_element(GroupTag::G1, 101);
        assert_eq!(
            s.exp(&bad, &s.field().one()),
            Err(GroupError::MalformedElement(GroupTag::G1))
        );
    }

    #[test]
    fn mock_pairing_examples() {
        let s = mock();
        let a = s.mock_element(GroupTag::G1, 3);
        let b = s.mock_element(GroupTag::G2, 4);
        assert_eq!(s.pairing(&a, &b).unwrap().mock_value(), Some(12));
        let g2_id = s.identity(GroupTag::G2);
        assert_eq!(
            s.pairing(&s.generator(GroupTag::G1), &g2_id).unwrap(),
            s.identity(GroupTag::Gt)
        );
        assert!(matches!(
            s.pairing(&b, &a),
            Err(GroupError::TagMismatch { expected: GroupTag::G1, .. })
        ));
    }

    #[test]
    fn membership() {
        let s = mock();
        assert!(s.is_member(&s.mock_element(GroupTag::G1, 100)));
        assert!(!s.is_member(&s.mock_element(GroupTag::G1, 101)));
        let p = GroupSuite::bls12_381();
        for tag in [GroupTag::G1, GroupTag::G2, GroupTag::Gt] {
            assert!(p.is_member(&p.generator(tag)));
            assert!(!p.is_member(&p.non_member(tag)), "{tag}");
        }
        // a mock payload is never a pairing-backend member
        assert!(!p.is_member(&s.generator(GroupTag::G1)));
    }

    #[test]
    fn hash_to_g1_follows_digest_rule() {
        let s = mock();
        // search for a message whose digest reduces to 42
        let msg = (0u32..)
            .map(|i| format!("msg-{i}").into_bytes())
            .find(|m| s.field().from_digest(&sha256(m)).to_u64() == Some(42))
            .unwrap();
        assert_eq!(s.hash_to_g1(&msg).mock_value(), Some(42));
        assert_eq!(s.hash_to_g1(&msg), s.hash_to_g1(&msg));
    }

    #[test]
    fn hash_to_g1_has_no_collisions_on_wide_modulus() {
        let s = GroupSuite::mock(2_147_483_647).unwrap();
        let mut seen = std::collections::HashSet::new();
        for i in 0..100 {
            let h = s.hash_to_g1(format!("m{i}").as_bytes());
            assert!(seen.insert(h.mock_value().unwrap()));
        }
    }

    #[test]
    fn scalar_field_arithmetic() {
        for field in [ScalarField::Mock { q: 101 }, ScalarField::Bls12_381] {
            let a = field.from_u64(40);
            let b = field.from_u64(70);
            let sum = field.add(&a, &b);
            assert_eq!(field.sub(&sum, &b), a);
            let inv = field.inv(&a).unwrap();
            assert_eq!(field.mul(&a, &inv), field.one());
            assert_eq!(field.inv(&field.zero()), None);
            assert_eq!(field.pow(&field.from_u64(2), 10), field.from_u64(1024));
        }
        let f = ScalarField::Mock { q: 101 };
        assert_eq!(f.add(&f.from_u64(60), &f.from_u64(50)).to_u64(), Some(9));
    }

    #[test]
    fn mock_modulus_must_be_prime() {
        assert!(GroupSuite::mock(101).is_ok());
        assert!(GroupSuite::mock(2_147_483_647).is_ok());
        assert_eq!(GroupSuite::mock(100), Err(GroupError::InvalidModulus(100)));
        assert!(GroupSuite::mock(1).is_err());
    }

    #[test]
    fn encoding_round_trips_and_is_tagged() {
        let mut rng = derive_rng(1, "enc", 0);
        for suite in [mock(), GroupSuite::bls12_381()] {
            for tag in [GroupTag::G1, GroupTag::G2, GroupTag::Gt] {
                let x = suite
                    .exp(&suite.generator(tag), &suite.field().random(&mut rng))
                    .unwrap();
                let bytes = x.to_bytes();
                assert_eq!(bytes[0], tag.byte());
                assert_eq!(GroupElement::from_bytes(&bytes).unwrap(), x);
            }
        }
        let s = mock().field().from_u64(5);
        assert_eq!(s.to_be_bytes()[31], 5);
        assert_eq!(s.canonical_bytes().len(), 32);
    }

    #[test]
    fn pairing_backend_bilinearity_sample() {
        let p = GroupSuite::bls12_381();
        let f = p.field();
        let s = f.from_u64(17);
        let g1 = p.generator(GroupTag::G1);
        let g2 = p.generator(GroupTag::G2);
        let lhs = p.pairing(&p.exp(&g1, &s).unwrap(), &g2).unwrap();
        let rhs = p.pairing(&g1, &p.exp(&g2, &s).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(p.pairing(&g1, &p.identity(GroupTag::G2)).unwrap(), p.identity(GroupTag::Gt));
    }
}
