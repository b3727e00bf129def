//! Regulator constants of modules with respect to relations, as square
//! classes.
//!
//! The constant compares Gram determinants of one invariant pairing across
//! the fixed spaces of the two subgroup families. Each determinant is only
//! defined up to squares (the basis is arbitrary), so values live in the
//! square-class group of Q and are normalized here to signed squarefree
//! integers for literal equality.

use crate::error::{Error, Result};
use crate::group::{PermGroup, QuotientMap, Subgroup};
use crate::linalg::squarefree_part;
use crate::relations::{self, Relation, WitnessOutcome};
use crate::repmod::{
    canonical_pairing, direct_sum, invariant_pairing, local_family, LocalFamily, Pairing,
    Representation,
};
use crate::scalar::Rat;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

pub const DEFAULT_DIRECT_EVAL_CAP: u64 = 10_000;
pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000;

/// An element of the square-class group of Q, normalized to the unique
/// signed squarefree integer representative.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SquareClass(BigInt);

impl SquareClass {
    pub fn one() -> SquareClass {
        SquareClass(BigInt::one())
    }

    pub fn from_integer(n: i64, factor_bound: u64) -> Result<SquareClass> {
        SquareClass::from_rational(&Rat::from_integer(BigInt::from(n)), factor_bound)
    }

    pub fn from_rational(r: &Rat, factor_bound: u64) -> Result<SquareClass> {
        Ok(SquareClass(squarefree_part(r, factor_bound)?))
    }

    pub fn value(&self) -> &BigInt {
        &self.0
    }

    pub fn mul(&self, other: &SquareClass, factor_bound: u64) -> Result<SquareClass> {
        SquareClass::from_rational(&Rat::from_integer(&self.0 * &other.0), factor_bound)
    }
}

impl std::fmt::Display for SquareClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for SquareClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

/// The regulator constant of a module with respect to a relation, under a
/// chosen pairing. Independent of the pairing and of all basis choices.
pub fn regulator_constant(
    rel: &Relation,
    module: &Representation,
    pairing: &Pairing,
    factor_bound: u64,
) -> Result<SquareClass> {
    if !rel.group().same_group(module.group()) {
        return Err(Error::GroupMismatch);
    }
    if !rel.is_q_relation() {
        return Err(Error::NotARelation);
    }
    let side = |subs: &[Subgroup]| -> Result<Rat> {
        let mut acc = Rat::one();
        for u in subs {
            let basis = module.fixed_subspace(u)?;
            let gram = pairing.gram_on(&basis);
            let det = gram.det()?;
            if det.is_zero() {
                return Err(Error::DegenerateForm);
            }
            let scale = BigInt::from(u.order()).pow(basis.rows() as u32);
            acc *= det / Rat::from_integer(scale);
        }
        Ok(acc)
    };
    let numerator = side(rel.plus())?;
    let denominator = side(rel.minus())?;
    SquareClass::from_rational(&(numerator / denominator), factor_bound)
}

/// The regulator constant of the trivial one-dimensional module: the fixed
/// spaces are everything, and the Gram determinant under any pairing is a
/// fixed value divided by the subgroup order.
pub fn regulator_constant_trivial(rel: &Relation, factor_bound: u64) -> Result<SquareClass> {
    if !rel.is_q_relation() {
        return Err(Error::NotARelation);
    }
    let mut value = Rat::one();
    for u in rel.plus() {
        value /= Rat::from_integer(BigInt::from(u.order()));
    }
    for u in rel.minus() {
        value *= Rat::from_integer(BigInt::from(u.order()));
    }
    SquareClass::from_rational(&value, factor_bound)
}

/// The constant under the canonical pairing and under seeded random
/// pairings must coincide.
pub fn check_pairing_independence(
    rel: &Relation,
    module: &Representation,
    seeds: &[u64],
    factor_bound: u64,
) -> Result<bool> {
    let reference = regulator_constant(
        rel,
        module,
        &canonical_pairing(module, seeds.first().copied().unwrap_or(1))?,
        factor_bound,
    )?;
    for &seed in seeds {
        let pairing = invariant_pairing(module, seed)?;
        if regulator_constant(rel, module, &pairing, factor_bound)? != reference {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Inflation/deflation compatibility: the constant of the inflated module
/// over the big group equals the constant of the module over the quotient,
/// with both sides evaluated independently.
pub fn check_reg1(
    rel: &Relation,
    qmap: &QuotientMap,
    module: &Representation,
    seed: u64,
    factor_bound: u64,
) -> Result<bool> {
    if !module.group().same_group(&qmap.target) {
        return Err(Error::GroupMismatch);
    }
    let inflated = module.inflate(qmap)?;
    let lhs = regulator_constant(
        rel,
        &inflated,
        &canonical_pairing(&inflated, seed)?,
        factor_bound,
    )?;
    let deflated = relations::deflate(rel, qmap)?;
    let rhs = regulator_constant(
        &deflated,
        module,
        &canonical_pairing(module, seed)?,
        factor_bound,
    )?;
    Ok(lhs == rhs)
}

/// Multiplicativity in direct sums, with the direct-sum side evaluated on
/// the block-diagonal pairing.
pub fn check_reg2(
    rel: &Relation,
    v1: &Representation,
    v2: &Representation,
    seed: u64,
    factor_bound: u64,
) -> Result<bool> {
    let c1 = regulator_constant(rel, v1, &canonical_pairing(v1, seed)?, factor_bound)?;
    let c2 = regulator_constant(rel, v2, &canonical_pairing(v2, seed)?, factor_bound)?;
    let product = c1.mul(&c2, factor_bound)?;
    let sum = direct_sum(&[v1.clone(), v2.clone()])?;
    let c_sum = regulator_constant(rel, &sum, &canonical_pairing(&sum, seed)?, factor_bound)?;
    Ok(product == c_sum)
}

#[derive(Clone, Debug)]
pub struct BigGroupConfig {
    pub max_group_order: u64,
    pub direct_eval_cap: u64,
    pub witness_budget: u64,
    pub factor_bound: u64,
    pub seed: u64,
    /// Primes q to run the one-sided local witness search for. Only this
    /// finite list is checked; claims about all q outside the prime set
    /// cannot be exhausted.
    pub q_list: Vec<u64>,
}

impl Default for BigGroupConfig {
    fn default() -> Self {
        BigGroupConfig {
            max_group_order: crate::group::DEFAULT_MAX_GROUP_ORDER,
            direct_eval_cap: DEFAULT_DIRECT_EVAL_CAP,
            witness_budget: relations::DEFAULT_WITNESS_BUDGET,
            factor_bound: DEFAULT_FACTOR_BOUND,
            seed: 1,
            q_list: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalCheck {
    pub q: u64,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub det_mod_q: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BigGroupReport {
    pub primes: Vec<u64>,
    pub group: String,
    pub group_order: usize,
    pub relation: String,
    pub module: String,
    pub predicted: SquareClass,
    /// "skipped" when the group order exceeds the direct evaluation cap.
    pub direct: String,
    pub reduction: SquareClass,
    pub pairing_seeds: Vec<u64>,
    #[serde(rename = "local_witnesses")]
    pub local_checks: Vec<LocalCheck>,
    pub agree: bool,
}

/// The full composite pipeline: for a set of primes, assemble the product
/// group, the product relation, and the summed inflated module; evaluate
/// the regulator constant by the factorwise reduction path always, and
/// directly on the product when the order allows it.
pub fn biggroup(primes: &[u64], config: &BigGroupConfig) -> Result<BigGroupReport> {
    let mut primes: Vec<u64> = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    if primes.is_empty() {
        return Err(Error::Parse {
            input: "{}".into(),
            reason: "the prime set must be nonempty".into(),
        });
    }
    for &p in &primes {
        if ![2, 3, 5, 7].contains(&p) {
            return Err(Error::Parse {
                input: format!("{{{p}}}"),
                reason: "supported primes are 2, 3, 5, 7".into(),
            });
        }
    }

    let families: Vec<LocalFamily> = primes
        .iter()
        .map(|&p| local_family(p, config.max_group_order))
        .collect::<Result<_>>()?;

    // factor relations and their local constants (the reduction path)
    let mut local_constants = Vec::new();
    let mut factor_relations = Vec::new();
    for fam in &families {
        let rel = Relation::single(fam.u.clone(), fam.u_prime.clone())?;
        if !rel.is_q_relation() {
            return Err(Error::NotARelation);
        }
        let pairing = canonical_pairing(&fam.module, config.seed)?;
        local_constants.push(regulator_constant(
            &rel,
            &fam.module,
            &pairing,
            config.factor_bound,
        )?);
        factor_relations.push(rel);
    }
    let mut reduction = SquareClass::one();
    for c in &local_constants {
        reduction = reduction.mul(c, config.factor_bound)?;
    }

    let mut predicted = Rat::one();
    for &p in &primes {
        predicted *= Rat::from_integer(BigInt::from(p));
    }
    let predicted = SquareClass::from_rational(&predicted, config.factor_bound)?;

    // assemble the product side
    let factor_groups: Vec<PermGroup> = families.iter().map(|f| f.group.clone()).collect();
    let (group, relation, module) = if families.len() == 1 {
        (
            families[0].group.clone(),
            factor_relations[0].clone(),
            families[0].module.clone(),
        )
    } else {
        let product = PermGroup::direct_product(&factor_groups, config.max_group_order)?;
        let relation = relations::product_relation_over(&product, &factor_relations)?;
        let mut parts = Vec::new();
        for (f, fam) in families.iter().enumerate() {
            let proj = product.factor_projection(f)?;
            // deflating the product relation must recover the factor relation
            let back = relations::deflate(&relation, &proj)?;
            if !back.plus()[0].same_members(&fam.u) || !back.minus()[0].same_members(&fam.u_prime) {
                return Err(Error::Internal(
                    "projection of the product relation missed its factor".into(),
                ));
            }
            parts.push(fam.module.inflate(&proj)?);
        }
        let module = direct_sum(&parts)?;
        (product, relation, module)
    };

    let direct = if group.order() as u64 <= config.direct_eval_cap {
        let pairing = canonical_pairing(&module, config.seed)?;
        Some(regulator_constant(
            &relation,
            &module,
            &pairing,
            config.factor_bound,
        )?)
    } else {
        None
    };

    let mut local_checks = Vec::new();
    for &q in &config.q_list {
        let check = match relations::zq_witness(&relation, q, config.witness_budget, config.seed)? {
            WitnessOutcome::Found(w) => LocalCheck {
                q,
                status: "witness found".into(),
                det_mod_q: Some(w.det_residue),
            },
            WitnessOutcome::Inconclusive { attempts } => LocalCheck {
                q,
                status: format!("inconclusive after {attempts} attempts"),
                det_mod_q: None,
            },
        };
        local_checks.push(check);
    }

    let agree = reduction == predicted && direct.as_ref().is_none_or(|d| *d == predicted);

    Ok(BigGroupReport {
        primes,
        group: group.name().to_string(),
        group_order: group.order(),
        relation: relation.describe(),
        module: module.label().to_string(),
        predicted,
        direct: direct.map_or_else(|| "skipped".to_string(), |d| d.to_string()),
        reduction,
        pairing_seeds: vec![config.seed],
        local_checks,
        agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named::{make_named_group, GroupSpec};
    use crate::random::random_unimodular;
    use crate::repmod::{module_i2, module_ip, perm_character};
    use crate::scalar::rat_int;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const CAP: u64 = 2_000_000;
    const BOUND: u64 = 1_000_000;

    fn i3_relation() -> (Relation, Representation) {
        let fam = local_family(3, CAP).unwrap();
        (
            Relation::single(fam.u.clone(), fam.u_prime.clone()).unwrap(),
            fam.module,
        )
    }

    #[test]
    fn identical_sides_give_the_trivial_class() {
        let fam = local_family(3, CAP).unwrap();
        let rel = Relation::single(fam.u.clone(), fam.u.clone()).unwrap();
        let pairing = canonical_pairing(&fam.module, 1).unwrap();
        let c = regulator_constant(&rel, &fam.module, &pairing, BOUND).unwrap();
        assert_eq!(c, SquareClass::one());
    }

    #[test]
    fn gl2_3_regulator_constant_is_three() {
        let (rel, i3) = i3_relation();
        let pairing = canonical_pairing(&i3, 1).unwrap();
        let c = regulator_constant(&rel, &i3, &pairing, BOUND).unwrap();
        assert_eq!(c, SquareClass::from_integer(3, BOUND).unwrap());
    }

    #[test]
    fn aff8_regulator_constant_is_two() {
        let fam = local_family(2, CAP).unwrap();
        let rel = Relation::single(fam.u.clone(), fam.u_prime.clone()).unwrap();
        let pairing = canonical_pairing(&fam.module, 1).unwrap();
        let c = regulator_constant(&rel, &fam.module, &pairing, BOUND).unwrap();
        assert_eq!(c, SquareClass::from_integer(2, BOUND).unwrap());
    }

    #[test]
    fn trivial_module_constants() {
        let (rel, _) = i3_relation();
        // equal orders cancel
        assert_eq!(
            regulator_constant_trivial(&rel, BOUND).unwrap(),
            SquareClass::one()
        );
    }

    #[test]
    fn trivial_module_constant_sees_unequal_subgroup_orders() {
        // Klein four-group: 1 + 2 G against the three order-2 subgroups;
        // the orders give (2*2*2) / (1*4*4) whose squarefree part is 2
        let g = make_named_group(
            &GroupSpec::Product(vec![GroupSpec::Sym(2), GroupSpec::Sym(2)]),
            CAP,
        )
        .unwrap();
        let whole = Subgroup::whole(&g);
        let trivial = Subgroup::trivial(&g);
        let order_two: Vec<Subgroup> = (1..4).map(|m| Subgroup::cyclic(&g, m)).collect();
        let rel = Relation::new(vec![trivial, whole.clone(), whole], order_two).unwrap();
        assert!(rel.is_q_relation());
        assert_eq!(
            regulator_constant_trivial(&rel, BOUND).unwrap(),
            SquareClass::from_integer(2, BOUND).unwrap()
        );
        // and it agrees with the full definition on the trivial module
        let trivial_module = Representation::permutation_module(&Subgroup::whole(&g));
        let pairing = canonical_pairing(&trivial_module, 1).unwrap();
        assert_eq!(
            regulator_constant(&rel, &trivial_module, &pairing, BOUND).unwrap(),
            SquareClass::from_integer(2, BOUND).unwrap()
        );
    }

    #[test]
    fn constant_is_independent_of_the_pairing() {
        let (rel, i3) = i3_relation();
        assert!(check_pairing_independence(&rel, &i3, &[1, 2], BOUND).unwrap());
    }

    #[test]
    fn constant_is_invariant_under_unimodular_basis_changes() {
        // changing the basis of a fixed subspace multiplies its Gram
        // determinant by the square of the change-of-basis determinant
        let (rel, i3) = i3_relation();
        let pairing = canonical_pairing(&i3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for u in rel.plus().iter().chain(rel.minus()) {
            let basis = i3.fixed_subspace(u).unwrap();
            let reference = pairing.gram_on(&basis).det().unwrap();
            for _ in 0..3 {
                let change = random_unimodular(basis.rows(), &mut rng);
                let changed = pairing.gram_on(&change.mul(&basis)).det().unwrap();
                let ratio = changed / reference.clone();
                assert_eq!(
                    crate::linalg::squarefree_part(&ratio, BOUND).unwrap(),
                    BigInt::one()
                );
            }
        }
    }

    #[test]
    fn constant_is_invariant_under_conjugating_relation_subgroups() {
        let (rel, i3) = i3_relation();
        let pairing = canonical_pairing(&i3, 1).unwrap();
        let reference = regulator_constant(&rel, &i3, &pairing, BOUND).unwrap();
        for g in [3usize, 11, 29] {
            let conj =
                Relation::single(rel.plus()[0].conjugate_by(g), rel.minus()[0].clone()).unwrap();
            let c = regulator_constant(&conj, &i3, &pairing, BOUND).unwrap();
            assert_eq!(c, reference);
        }
    }

    #[test]
    fn reg1_holds_for_the_two_prime_product() {
        let fam2 = local_family(2, CAP).unwrap();
        let fam3 = local_family(3, CAP).unwrap();
        let product =
            PermGroup::direct_product(&[fam2.group.clone(), fam3.group.clone()], CAP).unwrap();
        let rel2 = Relation::single(fam2.u.clone(), fam2.u_prime.clone()).unwrap();
        let rel3 = Relation::single(fam3.u.clone(), fam3.u_prime.clone()).unwrap();
        let rel = relations::product_relation_over(&product, &[rel2, rel3]).unwrap();

        let proj3 = product.factor_projection(1).unwrap();
        assert!(check_reg1(&rel, &proj3, &fam3.module, 1, BOUND).unwrap());
        let proj2 = product.factor_projection(0).unwrap();
        assert!(check_reg1(&rel, &proj2, &fam2.module, 1, BOUND).unwrap());
    }

    #[test]
    fn reg1_is_trivial_for_the_identity_quotient() {
        let (rel, i3) = i3_relation();
        let g = rel.group().clone();
        let q = crate::group::quotient_group(&g, &Subgroup::trivial(&g)).unwrap();
        // rebuild the module over the quotient copy
        let qu = q.image_subgroup(&rel.plus()[0]).unwrap();
        let qup = q.image_subgroup(&rel.minus()[0]).unwrap();
        let qrel = Relation::single(qu.clone(), qup).unwrap();
        assert!(qrel.is_q_relation());
        let _ = i3;
        // the trivial module over the quotient: both paths must agree
        let trivial_mod = Representation::permutation_module(&Subgroup::whole(&q.target));
        assert!(check_reg1(&rel, &q, &trivial_mod, 1, BOUND).unwrap());
    }

    #[test]
    fn reg2_multiplicativity() {
        let (rel, i3) = i3_relation();
        // square of the class: 3 * 3 = 9 is a square, so the sum gives 1
        assert!(check_reg2(&rel, &i3, &i3, 1, BOUND).unwrap());

        // against the trivial summand nothing changes
        let trivial = Representation::permutation_module(&Subgroup::whole(rel.group()));
        assert!(check_reg2(&rel, &i3, &trivial, 1, BOUND).unwrap());

        // the zero module contributes the trivial class
        let zero = Representation::zero_module(rel.group());
        assert!(check_reg2(&rel, &i3, &zero, 1, BOUND).unwrap());
    }

    #[test]
    fn square_class_arithmetic() {
        let six = SquareClass::from_integer(6, BOUND).unwrap();
        let three = SquareClass::from_integer(3, BOUND).unwrap();
        let two = SquareClass::from_integer(2, BOUND).unwrap();
        assert_eq!(three.mul(&two, BOUND).unwrap(), six);
        assert_eq!(three.mul(&three, BOUND).unwrap(), SquareClass::one());
        assert_eq!(
            SquareClass::from_rational(&rat_int(-18), BOUND).unwrap(),
            SquareClass::from_integer(-2, BOUND).unwrap()
        );
    }

    #[test]
    fn biggroup_single_prime() {
        let report = biggroup(&[3], &BigGroupConfig::default()).unwrap();
        assert_eq!(
            report.predicted,
            SquareClass::from_integer(3, BOUND).unwrap()
        );
        assert_eq!(report.reduction, report.predicted);
        assert_eq!(report.direct, "3");
        assert!(report.agree);
    }

    #[test]
    fn biggroup_rejects_unsupported_primes() {
        assert!(biggroup(&[11], &BigGroupConfig::default()).is_err());
        assert!(biggroup(&[], &BigGroupConfig::default()).is_err());
    }

    #[test]
    fn gassmann_partner_characters_stay_equal_after_deflation() {
        // the partner subgroups project onto partner subgroups
        let fam2 = local_family(2, CAP).unwrap();
        let fam3 = local_family(3, CAP).unwrap();
        let product =
            PermGroup::direct_product(&[fam2.group.clone(), fam3.group.clone()], CAP).unwrap();
        let rel = relations::product_relation_over(
            &product,
            &[
                Relation::single(fam2.u.clone(), fam2.u_prime.clone()).unwrap(),
                Relation::single(fam3.u.clone(), fam3.u_prime.clone()).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(
            perm_character(&rel.plus()[0]),
            perm_character(&rel.minus()[0])
        );
        let _ = (module_ip(3, CAP).unwrap(), module_i2().unwrap());
    }
}
