//! Formal relations between subgroup families, verified over Q through
//! permutation characters, with one-sided local witnesses modulo q.
//!
//! A witness is an integral equivariant map between the two permutation
//! module sums whose determinant is a unit modulo q; its inverse is then
//! equivariant over the localized ring, so the two sides are isomorphic
//! there. The search samples coefficients of the double-coset basis of the
//! integral Hom space. Failure to find one is reported as inconclusive,
//! never as a refutation.

use crate::error::{Error, Result};
use crate::group::{double_cosets, Cosets, PermGroup, QuotientMap, Subgroup};
use crate::linalg::Matrix;
use crate::repmod::{perm_character, Character};
use crate::scalar::Fq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_WITNESS_BUDGET: u64 = 512;

/// Exhaustive F_2 coefficient enumeration replaces sampling below this
/// basis size.
const EXHAUSTIVE_F2_LIMIT: usize = 20;

#[derive(Clone)]
pub struct Relation {
    group: PermGroup,
    plus: Vec<Subgroup>,
    minus: Vec<Subgroup>,
}

impl Relation {
    pub fn new(plus: Vec<Subgroup>, minus: Vec<Subgroup>) -> Result<Relation> {
        let Some(first) = plus.first().or_else(|| minus.first()) else {
            return Err(Error::Internal("empty relation".into()));
        };
        let group = first.group().clone();
        for s in plus.iter().chain(&minus) {
            if !s.group().same_group(&group) {
                return Err(Error::GroupMismatch);
            }
        }
        Ok(Relation { group, plus, minus })
    }

    pub fn single(u: Subgroup, u_prime: Subgroup) -> Result<Relation> {
        Relation::new(vec![u], vec![u_prime])
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn plus(&self) -> &[Subgroup] {
        &self.plus
    }

    pub fn minus(&self) -> &[Subgroup] {
        &self.minus
    }

    pub fn describe(&self) -> String {
        let side = |subs: &[Subgroup], sign: &str| {
            subs.iter()
                .map(|s| s.name().to_string())
                .collect::<Vec<_>>()
                .join(&format!(" {sign} "))
        };
        format!(
            "{} - {} @ {}",
            side(&self.plus, "+"),
            side(&self.minus, "-"),
            self.group.name()
        )
    }

    pub fn plus_character(&self) -> Character {
        self.plus
            .iter()
            .map(perm_character)
            .fold(Character::zero(&self.group), |acc, c| acc.add(&c))
    }

    pub fn minus_character(&self) -> Character {
        self.minus
            .iter()
            .map(perm_character)
            .fold(Character::zero(&self.group), |acc, c| acc.add(&c))
    }

    /// Over Q, the two permutation module sums are isomorphic iff their
    /// characters agree.
    pub fn is_q_relation(&self) -> bool {
        self.plus_character() == self.minus_character()
    }

    pub fn total_plus_dim(&self) -> usize {
        self.plus.iter().map(Subgroup::index_in_group).sum()
    }

    pub fn total_minus_dim(&self) -> usize {
        self.minus.iter().map(Subgroup::index_in_group).sum()
    }
}

impl std::fmt::Debug for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Relation({})", self.describe())
    }
}

/// An integral equivariant map certifying a relation modulo q.
#[derive(Clone)]
pub struct LocalWitness {
    pub q: u64,
    /// Block matrix from the plus-side coset sum to the minus-side coset
    /// sum, row-major.
    pub matrix: Matrix<i64>,
    pub det_residue: u64,
    pub attempts_used: u64,
}

#[derive(Clone)]
pub enum WitnessOutcome {
    Found(LocalWitness),
    /// One-sided: exhausting the budget refutes nothing.
    Inconclusive {
        attempts: u64,
    },
}

struct HeckeBasis {
    /// Dense 0/1 matrices, one per double coset per (plus, minus) block,
    /// each flagged when its double coset contains the identity.
    maps: Vec<(Matrix<i64>, bool)>,
    rows: usize,
    cols: usize,
}

fn hecke_basis(rel: &Relation) -> Result<HeckeBasis> {
    let group = rel.group();
    let plus_cosets: Vec<Cosets> = rel.plus().iter().map(Subgroup::left_cosets).collect();
    let minus_cosets: Vec<Cosets> = rel.minus().iter().map(Subgroup::left_cosets).collect();
    let cols: usize = plus_cosets.iter().map(Cosets::count).sum();
    let rows: usize = minus_cosets.iter().map(Cosets::count).sum();

    let mut maps = Vec::new();
    let mut col_offset = 0;
    for (i, cu) in plus_cosets.iter().enumerate() {
        let mut row_offset = 0;
        for (j, cw) in minus_cosets.iter().enumerate() {
            let dcs = double_cosets(&rel.plus()[i], &rel.minus()[j])?;
            for d in dcs {
                let contains_identity = d.binary_search(&0).is_ok();
                // one representative per minus-coset inside the double coset
                let mut seen = vec![false; cw.count()];
                let mut section = Vec::new();
                for &y in &d {
                    let c = cw.coset_of[y];
                    if !seen[c] {
                        seen[c] = true;
                        section.push(y);
                    }
                }
                let mut m: Matrix<i64> = Matrix::zero(rows, cols);
                for c in 0..cu.count() {
                    let r = cu.reps[c];
                    for &y in &section {
                        let target = cw.coset_of[group.mul_idx(r, y)];
                        m[(row_offset + target, col_offset + c)] = 1;
                    }
                }
                maps.push((m, contains_identity));
            }
            row_offset += cw.count();
        }
        col_offset += cu.count();
    }
    Ok(HeckeBasis { maps, rows, cols })
}

fn combine(basis: &HeckeBasis, coeffs: &[u64]) -> Matrix<i64> {
    let mut m: Matrix<i64> = Matrix::zero(basis.rows, basis.cols);
    for (t, (b, _)) in basis.maps.iter().enumerate() {
        if coeffs[t] == 0 {
            continue;
        }
        let c = coeffs[t] as i64;
        for i in 0..basis.rows {
            for j in 0..basis.cols {
                if b[(i, j)] != 0 {
                    m[(i, j)] += c * b[(i, j)];
                }
            }
        }
    }
    m
}

fn det_mod_q(m: &Matrix<i64>, q: u64) -> u64 {
    let f = Matrix::from_fn(m.rows(), m.cols(), |i, j| Fq::new(m[(i, j)], q));
    f.det_field().expect("square").value()
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Search for a witness that the relation holds over Z localized at q.
///
/// The first attempt is the deterministic candidate with coefficient 1 on
/// every double coset containing the identity; after that, coefficients are
/// sampled uniformly mod q from the seeded stream. For q = 2 with a small
/// basis the sampling is replaced by exhaustive enumeration.
pub fn zq_witness(rel: &Relation, q: u64, budget: u64, seed: u64) -> Result<WitnessOutcome> {
    if !is_prime_u64(q) {
        return Err(Error::NotPrime(q));
    }
    if !rel.is_q_relation() {
        return Err(Error::NotARelation);
    }
    debug_assert_eq!(rel.total_plus_dim(), rel.total_minus_dim());
    let basis = hecke_basis(rel)?;
    let k = basis.maps.len();

    let finish = |m: Matrix<i64>, det: u64, attempts: u64| -> Result<WitnessOutcome> {
        let witness = LocalWitness {
            q,
            matrix: m,
            det_residue: det,
            attempts_used: attempts,
        };
        if !verify_witness(rel, &witness)? {
            return Err(Error::Internal(
                "witness failed independent re-verification".into(),
            ));
        }
        Ok(WitnessOutcome::Found(witness))
    };

    // deterministic first candidate: coefficient 1 on the identity-bearing
    // double coset of every block (the identity map itself when the two
    // sides coincide)
    let identity_coeffs: Vec<u64> = basis
        .maps
        .iter()
        .map(|(_, contains_identity)| u64::from(*contains_identity))
        .collect();
    if identity_coeffs.iter().any(|&c| c != 0) {
        let m = combine(&basis, &identity_coeffs);
        let det = det_mod_q(&m, q);
        if det != 0 {
            return finish(m, det, 0);
        }
    }

    if q == 2 && k < EXHAUSTIVE_F2_LIMIT {
        for mask in 1u64..(1u64 << k) {
            let coeffs: Vec<u64> = (0..k).map(|t| (mask >> t) & 1).collect();
            let m = combine(&basis, &coeffs);
            let det = det_mod_q(&m, q);
            if det != 0 {
                return finish(m, det, mask);
            }
        }
        return Ok(WitnessOutcome::Inconclusive {
            attempts: (1u64 << k) - 1,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=budget {
        let coeffs: Vec<u64> = (0..k).map(|_| rng.gen_range(0..q)).collect();
        if coeffs.iter().all(|&c| c == 0) {
            continue;
        }
        let m = combine(&basis, &coeffs);
        let det = det_mod_q(&m, q);
        if det != 0 {
            return finish(m, det, attempt);
        }
    }
    Ok(WitnessOutcome::Inconclusive { attempts: budget })
}

/// Re-verifies a witness from scratch: fresh coset tables, equivariance on
/// every generator, and the determinant residue.
pub fn verify_witness(rel: &Relation, witness: &LocalWitness) -> Result<bool> {
    let group = rel.group();
    let plus_cosets: Vec<Cosets> = rel.plus().iter().map(Subgroup::left_cosets).collect();
    let minus_cosets: Vec<Cosets> = rel.minus().iter().map(Subgroup::left_cosets).collect();
    let cols: usize = plus_cosets.iter().map(Cosets::count).sum();
    let rows: usize = minus_cosets.iter().map(Cosets::count).sum();
    if witness.matrix.rows() != rows || witness.matrix.cols() != cols {
        return Ok(false);
    }

    let block_perm = |tables: &[Cosets], g: usize, n: usize| -> Matrix<i64> {
        let mut m: Matrix<i64> = Matrix::zero(n, n);
        let mut off = 0;
        for t in tables {
            for c in 0..t.count() {
                m[(off + t.act(g, c), off + c)] = 1;
            }
            off += t.count();
        }
        m
    };

    for &g in group.generator_indices() {
        let p_plus = block_perm(&plus_cosets, g, cols);
        let p_minus = block_perm(&minus_cosets, g, rows);
        if p_minus.mul(&witness.matrix) != witness.matrix.mul(&p_plus) {
            return Ok(false);
        }
    }
    let det = det_mod_q(&witness.matrix, witness.q);
    Ok(det != 0 && det == witness.det_residue)
}

/// Push a relation down a quotient map. When the input is a Q-relation the
/// image is re-verified to be one.
pub fn deflate(rel: &Relation, qmap: &QuotientMap) -> Result<Relation> {
    if !rel.group().same_group(&qmap.source) {
        return Err(Error::GroupMismatch);
    }
    if !qmap.kernel.is_normal() {
        return Err(Error::NotNormal);
    }
    let was_q_relation = rel.is_q_relation();
    let plus = rel
        .plus()
        .iter()
        .map(|u| qmap.image_subgroup(u))
        .collect::<Result<Vec<_>>>()?;
    let minus = rel
        .minus()
        .iter()
        .map(|u| qmap.image_subgroup(u))
        .collect::<Result<Vec<_>>>()?;
    let out = Relation::new(plus, minus)?;
    if was_q_relation && !out.is_q_relation() {
        return Err(Error::Internal(
            "deflation of a Q-relation stopped being one".into(),
        ));
    }
    Ok(out)
}

/// The product of single-pair relations over a prebuilt direct product of
/// the factor groups, re-verified as a Q-relation.
pub fn product_relation_over(product: &PermGroup, factors: &[Relation]) -> Result<Relation> {
    for rel in factors {
        if rel.plus().len() != 1 || rel.minus().len() != 1 {
            return Err(Error::Internal(
                "product relations take single-pair factors".into(),
            ));
        }
        if !rel.is_q_relation() {
            return Err(Error::NotARelation);
        }
    }
    let plus: Vec<Subgroup> = factors.iter().map(|r| r.plus()[0].clone()).collect();
    let minus: Vec<Subgroup> = factors.iter().map(|r| r.minus()[0].clone()).collect();
    let u = crate::group::product_subgroup(product, &plus)?;
    let u_prime = crate::group::product_subgroup(product, &minus)?;
    let out = Relation::single(u, u_prime)?;
    if !out.is_q_relation() {
        return Err(Error::Internal(
            "product of Q-relations stopped being one".into(),
        ));
    }
    Ok(out)
}

/// Product of two single-pair Q-relations over the direct product of their
/// groups.
pub fn product_relation(a: &Relation, b: &Relation, cap: u64) -> Result<(PermGroup, Relation)> {
    let product = PermGroup::direct_product(&[a.group().clone(), b.group().clone()], cap)?;
    let rel = product_relation_over(&product, &[a.clone(), b.clone()])?;
    Ok((product, rel))
}
