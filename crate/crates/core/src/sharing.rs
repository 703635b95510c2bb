//! Shamir sharing over `Z_q`, Feldman commitments, hash commitments and
//! hashed-ElGamal encryption of sub-shares.

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{GroupElement, GroupError, GroupSuite, GroupTag, Scalar, ScalarField};
use crate::hashing::{sha256, Digest};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SharingError {
    #[error("polynomial degree must be at least 1")]
    ZeroDegree,
    #[error("interpolation needs at least one point")]
    NoPoints,
    #[error("duplicate interpolation index")]
    DuplicateIndex,
    #[error("interpolation index 0 is reserved for the secret")]
    ZeroIndex,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Participant index `j` as a field element.
pub fn index_scalar(field: &ScalarField, j: u32) -> Scalar {
    field.from_u64(j as u64)
}

/// `f(z) = a_0 + a_1 z + … + a_t z^t` over `Z_q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    field: ScalarField,
    coefficients: Vec<Scalar>,
}

impl Polynomial {
    /// Uniformly random polynomial of degree at most `t`.
    pub fn random<R: RngCore + ?Sized>(
        field: ScalarField,
        t: usize,
        rng: &mut R,
    ) -> Result<Self, SharingError> {
        if t == 0 {
            return Err(SharingError::ZeroDegree);
        }
        let coefficients = (0..=t).map(|_| field.random(rng)).collect();
        Ok(Polynomial { field, coefficients })
    }

    pub fn from_coefficients(field: ScalarField, coefficients: Vec<Scalar>) -> Self {
        assert!(!coefficients.is_empty(), "a polynomial has at least one coefficient");
        assert!(coefficients.iter().all(|c| field.contains(c)), "coefficients must be reduced");
        Polynomial { field, coefficients }
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn coefficients(&self) -> &[Scalar] {
        &self.coefficients
    }

    /// Formal degree `t` (number of coefficients minus one).
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `a_0 = f(0)`.
    pub fn secret(&self) -> Scalar {
        self.coefficients[0]
    }

    /// Horner evaluation.
    pub fn evaluate(&self, z: &Scalar) -> Scalar {
        let f = &self.field;
        self.coefficients
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, z), c))
    }

    pub fn evaluate_at(&self, j: u32) -> Scalar {
        self.evaluate(&index_scalar(&self.field, j))
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let f = &self.field;
        let len = self.coefficients.len().max(other.coefficients.len());
        let coefficients = (0..len)
            .map(|k| {
                let a = self.coefficients.get(k).copied().unwrap_or(Scalar::ZERO);
                let b = other.coefficients.get(k).copied().unwrap_or(Scalar::ZERO);
                f.add(&a, &b)
            })
            .collect();
        Polynomial { field: self.field, coefficients }
    }
}

/// Lagrange basis coefficients `λ_i(at)` for the given distinct nonzero indices.
pub fn lagrange_coefficients(
    field: &ScalarField,
    indices: &[Scalar],
    at: &Scalar,
) -> Result<Vec<Scalar>, SharingError> {
    if indices.is_empty() {
        return Err(SharingError::NoPoints);
    }
    if indices.iter().any(Scalar::is_zero) {
        return Err(SharingError::ZeroIndex);
    }
    for (a, x) in indices.iter().enumerate() {
        if indices[a + 1..].contains(x) {
            return Err(SharingError::DuplicateIndex);
        }
    }
    indices
        .iter()
        .map(|xi| {
            let mut num = field.one();
            let mut den = field.one();
            for xm in indices.iter().filter(|xm| *xm != xi) {
                num = field.mul(&num, &field.sub(at, xm));
                den = field.mul(&den, &field.sub(xi, xm));
            }
            let inv = field.inv(&den).expect("indices are distinct");
            Ok(field.mul(&num, &inv))
        })
        .collect()
}

/// Value at `at` of the unique polynomial of degree `< points.len()` through `points`.
pub fn lagrange_interpolate(
    field: &ScalarField,
    points: &[(Scalar, Scalar)],
    at: &Scalar,
) -> Result<Scalar, SharingError> {
    let indices: Vec<Scalar> = points.iter().map(|(x, _)| *x).collect();
    let lambdas = lagrange_coefficients(field, &indices, at)?;
    Ok(points
        .iter()
        .zip(&lambdas)
        .fold(field.zero(), |acc, ((_, y), l)| field.add(&acc, &field.mul(y, l))))
}

/// Interpolation in the exponent: `Π y_i^{λ_i(at)}`.
pub fn interpolate_in_exponent(
    suite: &GroupSuite,
    points: &[(Scalar, GroupElement)],
    at: &Scalar,
) -> Result<GroupElement, SharingError> {
    let field = suite.field();
    let indices: Vec<Scalar> = points.iter().map(|(x, _)| *x).collect();
    let lambdas = lagrange_coefficients(&field, &indices, at)?;
    let tag = points[0].1.tag();
    let mut acc = suite.identity(tag);
    for ((_, y), l) in points.iter().zip(&lambdas) {
        acc = suite.mul(&acc, &suite.exp(y, l)?)?;
    }
    Ok(acc)
}

/// Feldman commitments `X_k = g^{a_k}` in one group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitmentVector {
    pub tag: GroupTag,
    pub elements: Vec<GroupElement>,
}

impl CommitmentVector {
    pub fn commit(suite: &GroupSuite, f: &Polynomial, tag: GroupTag) -> Self {
        let g = suite.generator(tag);
        let elements = f
            .coefficients()
            .iter()
            .map(|a| suite.exp(&g, a).expect("generator is a member"))
            .collect();
        CommitmentVector { tag, elements }
    }

    /// `t`, the committed degree.
    pub fn degree(&self) -> usize {
        self.elements.len().saturating_sub(1)
    }

    pub fn all_members(&self, suite: &GroupSuite) -> bool {
        self.elements
            .iter()
            .all(|x| x.tag() == self.tag && suite.is_member(x))
    }

    /// `Π_k X_k^{j^k}`, i.e. `g^{f(j)}` for honest commitments.
    pub fn evaluate_in_exponent(
        &self,
        suite: &GroupSuite,
        j: &Scalar,
    ) -> Result<GroupElement, GroupError> {
        let mut acc = suite.identity(self.tag);
        for x in self.elements.iter().rev() {
            acc = suite.mul(&suite.exp(&acc, j)?, x)?;
        }
        Ok(acc)
    }

    /// Element-wise product; commitments to `f + g` from commitments to `f` and `g`.
    pub fn combine(&self, suite: &GroupSuite, other: &CommitmentVector) -> Result<Self, GroupError> {
        let len = self.elements.len().max(other.elements.len());
        let id = suite.identity(self.tag);
        let elements = (0..len)
            .map(|k| {
                let a = self.elements.get(k).unwrap_or(&id);
                let b = other.elements.get(k).unwrap_or(&id);
                suite.mul(a, b)
            })
            .collect::<Result<_, _>>()?;
        Ok(CommitmentVector { tag: self.tag, elements })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.elements.len() as u32).to_be_bytes());
        for x in &self.elements {
            out.extend_from_slice(&x.to_bytes());
        }
        out
    }
}

/// Checks `g^x = Π_k X_k^{j^k}`. Malformed commitments never verify.
pub fn verify_subshare(suite: &GroupSuite, j: u32, x: &Scalar, c: &CommitmentVector) -> bool {
    if c.elements.is_empty() || !c.all_members(suite) || !suite.field().contains(x) {
        return false;
    }
    let lhs = suite.exp(&suite.generator(c.tag), x).expect("generator is a member");
    c.evaluate_in_exponent(suite, &index_scalar(&suite.field(), j))
        .is_ok_and(|rhs| rhs == lhs)
}

/// `x_{i,j} = f_i(j)` sent from dealer `i` to recipient `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubShare {
    pub dealer: u32,
    pub recipient: u32,
    pub value: Scalar,
}

/// `H(X)`.
pub fn hash_commit(x: &GroupElement) -> Digest {
    sha256(&x.to_bytes())
}

/// Encryption key `γ^ξ` with `γ = g1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElGamalKeyPair {
    pub secret: Scalar,
    pub public: GroupElement,
}

impl ElGamalKeyPair {
    pub fn generate<R: RngCore + ?Sized>(suite: &GroupSuite, rng: &mut R) -> Self {
        Self::from_secret(suite, suite.field().random(rng))
    }

    pub fn from_secret(suite: &GroupSuite, secret: Scalar) -> Self {
        let public = suite
            .exp(&suite.generator(GroupTag::G1), &secret)
            .expect("generator is a member");
        ElGamalKeyPair { secret, public }
    }
}

/// Hashed ElGamal: `(γ^r, x + H(pk^r) mod q)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElGamalCiphertext {
    pub c1: GroupElement,
    pub c2: Scalar,
}

impl ElGamalCiphertext {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.c1.to_bytes();
        out.extend_from_slice(&self.c2.to_be_bytes());
        out
    }
}

fn mask(suite: &GroupSuite, shared: &GroupElement) -> Scalar {
    suite.field().from_digest(&sha256(&shared.to_bytes()))
}

pub fn elgamal_encrypt<R: RngCore + ?Sized>(
    suite: &GroupSuite,
    x: &Scalar,
    pk: &GroupElement,
    rng: &mut R,
) -> Result<ElGamalCiphertext, GroupError> {
    if pk.tag() != GroupTag::G1 {
        return Err(GroupError::TagMismatch { expected: GroupTag::G1, found: pk.tag() });
    }
    let field = suite.field();
    let r = field.random(rng);
    let shared = suite.exp(pk, &r)?;
    let c1 = suite.exp(&suite.generator(GroupTag::G1), &r)?;
    Ok(ElGamalCiphertext { c1, c2: field.add(x, &mask(suite, &shared)) })
}

pub fn elgamal_decrypt(
    suite: &GroupSuite,
    ct: &ElGamalCiphertext,
    secret: &Scalar,
) -> Result<Scalar, GroupError> {
    let shared = suite.exp(&ct.c1, secret)?;
    Ok(suite.field().sub(&ct.c2, &mask(suite, &shared)))
}
