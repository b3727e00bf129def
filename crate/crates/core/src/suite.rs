//! The verification suite: every headline identity the toolkit is built
//! around, run end to end with exact arithmetic and reported claim by
//! claim. The CLI `reproduce` subcommand and the acceptance test target
//! both drive this module.

use crate::algebra::{check_filling_span, Algebra, SurgeryPlan};
use crate::error::Result;
use crate::group::{PermGroup, Subgroup};
use crate::linalg::Matrix;
use crate::named::{make_named_group, GroupSpec};
use crate::random::IdempotentSampler;
use crate::regulator::{
    biggroup, check_pairing_independence, regulator_constant, BigGroupConfig, SquareClass,
};
use crate::relations::{verify_witness, zq_witness, Relation, WitnessOutcome};
use crate::repmod::{canonical_pairing, embed_in_group_algebra, local_family, perm_character};
use crate::scalar::rat_int;
use crate::surfaces::{
    random_ramification_data, recover_ramification, surface_character, RamificationData, Recovery,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct ClaimOutcome {
    pub id: String,
    pub title: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub max_group_order: u64,
    pub direct_eval_cap: u64,
    pub witness_budget: u64,
    pub factor_bound: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 1,
            max_group_order: crate::group::DEFAULT_MAX_GROUP_ORDER,
            direct_eval_cap: crate::regulator::DEFAULT_DIRECT_EVAL_CAP,
            witness_budget: crate::relations::DEFAULT_WITNESS_BUDGET,
            factor_bound: crate::regulator::DEFAULT_FACTOR_BOUND,
        }
    }
}

fn outcome(
    id: &str,
    title: &str,
    expected: &str,
    body: impl FnOnce() -> Result<(String, bool)>,
) -> ClaimOutcome {
    let (computed, pass) = match body() {
        Ok((computed, pass)) => (computed, pass),
        Err(e) => (format!("error: {e}"), false),
    };
    ClaimOutcome {
        id: id.into(),
        title: title.into(),
        expected: expected.into(),
        computed,
        pass,
    }
}

fn test_groups(cfg: &SuiteConfig) -> Result<Vec<PermGroup>> {
    Ok(vec![
        make_named_group(&GroupSpec::Sym(3), cfg.max_group_order)?,
        make_named_group(&GroupSpec::Dihedral(4), cfg.max_group_order)?,
        make_named_group(&GroupSpec::Quat8, cfg.max_group_order)?,
        crate::named::gl2(3, cfg.max_group_order)?,
    ])
}

/// Regulator constants of the simple modules over gl2(p) equal p, under
/// the canonical pairing and under seeded random pairings.
pub fn claim_gl2_regulator_constants(cfg: &SuiteConfig) -> ClaimOutcome {
    outcome(
        "c1",
        "regulator constant of the (p+1)-dimensional simple gl2(p) module is p, \
         pairing-independently (p = 3, 5, 7)",
        "classes 3, 5, 7",
        || {
            let mut computed = Vec::new();
            let mut pass = true;
            for p in [3u64, 5, 7] {
                let fam = local_family(p, cfg.max_group_order)?;
                let rel = Relation::single(fam.u.clone(), fam.u_prime.clone())?;
                let pairing = canonical_pairing(&fam.module, cfg.seed)?;
                let c = regulator_constant(&rel, &fam.module, &pairing, cfg.factor_bound)?;
                let expected = SquareClass::from_integer(p as i64, cfg.factor_bound)?;
                let independent = check_pairing_independence(
                    &rel,
                    &fam.module,
                    &[cfg.seed, cfg.seed + 1],
                    cfg.factor_bound,
                )?;
                pass &= c == expected && independent;
                computed.push(format!("p={p}: {c} (independent: {independent})"));
            }
            Ok((computed.join("; "), pass))
        },
    )
}

/// The affine-group analogue at p = 2.
pub fn claim_aff8_regulator_constant(cfg: &SuiteConfig) -> ClaimOutcome {
    outcome(
        "c2",
        "regulator constant of the 4-dimensional simple aff8 module is 2, \
         pairing-independently",
        "class 2",
        || {
            let fam = local_family(2, cfg.max_group_order)?;
            let rel = Relation::single(fam.u.clone(), fam.u_prime.clone())?;
            let pairing = canonical_pairing(&fam.module, cfg.seed)?;
            let c = regulator_constant(&rel, &fam.module, &pairing, cfg.factor_bound)?;
            let expected = SquareClass::from_integer(2, cfg.factor_bound)?;
            let independent = check_pairing_independence(
                &rel,
                &fam.module,
                &[cfg.seed, cfg.seed + 1],
                cfg.factor_bound,
            )?;
            Ok((
                format!("{c} (independent: {independent})"),
                c == expected && independent,
            ))
        },
    )
}

/// The composite pipeline: direct evaluation on the order-1536 product
/// agrees with the factorwise reduction for {2,3}, and {2,3,5} reduces to
/// 30 with the direct path skipped by the cap.
pub fn claim_composite_pipeline(cfg: &SuiteConfig) -> ClaimOutcome {
    outcome(
        "c3",
        "product pipeline: {2,3} gives 6 on both evaluation paths; {2,3,5} gives 30 \
         by reduction",
        "6 = 6 (direct = reduction); 30 (reduction, direct skipped)",
        || {
            let config = BigGroupConfig {
                max_group_order: cfg.max_group_order,
                direct_eval_cap: cfg.direct_eval_cap,
                witness_budget: cfg.witness_budget,
                factor_bound: cfg.factor_bound,
                seed: cfg.seed,
                q_list: Vec::new(),
            };
            let six = SquareClass::from_integer(6, cfg.factor_bound)?;
            let thirty = SquareClass::from_integer(30, cfg.factor_bound)?;

            let r23 = biggroup(&[2, 3], &config)?;
            let small_ok = r23.group_order == 1536
                && r23.direct == "6"
                && r23.reduction == six
                && r23.predicted == six;

            let r235 = biggroup(&[2, 3, 5], &config)?;
            let large_ok =
                r235.direct == "skipped" && r235.reduction == thirty && r235.predicted == thirty;

            Ok((
                format!(
                    "{{2,3}}: direct {} reduction {}; {{2,3,5}}: direct {} reduction {}",
                    r23.direct, r23.reduction, r235.direct, r235.reduction
                ),
                small_ok && large_ok,
            ))
        },
    )
}

/// Star decompositions succeed for a batch of idempotents in each test
/// group algebra: averaging, seeded conjugates and splits, and the ideal
/// idempotent of the gl2(3) simple module.
pub fn claim_star_decompositions(cfg: &SuiteConfig) -> ClaimOutcome {
    outcome(
        "c4",
        "Q[G] = Q[G]e + Q[G](1-e*) is a direct sum for 20+ idempotents in \
         Q[S3], Q[D4], Q[Q8], Q[GL2(F3)]",
        "all direct sums, exact",
        || {
            let mut total = 0usize;
            for group in test_groups(cfg)? {
                let algebra = Algebra::group_algebra(&group);
                let mut idempotents = Vec::new();
                idempotents.push(algebra.zero());
                idempotents.push(algebra.one());
                idempotents.push(algebra.averaging_idempotent(&Subgroup::whole(&group))?);
                if group.order() == 48 {
                    let i3 = crate::repmod::module_ip_over(&group, 3)?;
                    let ideal = embed_in_group_algebra(&i3)?;
                    idempotents.push(algebra.idempotent_generating(&ideal)?);
                }
                let mut sampler = IdempotentSampler::new(&group, cfg.seed);
                while idempotents.len() < 20 {
                    idempotents.push(sampler.next_idempotent());
                }
                for e in &idempotents {
                    let report = algebra.check_star_decomposition(e)?;
                    if !report.direct_sum {
                        return Ok((format!("failure in Q[{}]", group.name()), false));
                    }
                }
                total += idempotents.len();
            }
            Ok((format!("{total} idempotents, all direct sums"), true))
        },
    )
}

/// The split-quaternion counterexample: the star decomposition fails, with
/// the sum of the two ideals only 2-dimensional.
pub fn claim_split_quaternion_counterexample(_cfg: &SuiteConfig) -> ClaimOutcome {
    outcome(
        "c5",
        "split-quaternion M2(Q): the decomposition fails at e = E11",
        "direct_sum false, dim(Ae + A(1-iota(e))) = 2",
        || {
            let a = Algebra::split_quaternion();
            let report = a.check_star_decomposition(&a.basis(0))?;
            Ok((
                format!(
                    "direct_sum {}, sum dim {}",
                    report.direct_sum, report.dim_sum
                ),
                !report.direct_sum && report.dim_sum == 2,
            ))
        },
    )
}

/// Trace symmetry under the involution, exhaustively on basis elements of
/// the group algebras; violated by the upper-triangular algebra.
pub fn claim_trace_symmetry(cfg: &SuiteConfig) -> ClaimOutcome {
    outcome(
        "c6",
        "tr(x) = tr(x*) on every group-algebra basis element; fails for the \
         upper-triangular algebra",
        "symmetric on Q[G]; asymmetric at E11",
        || {
            for group in test_groups(cfg)? {
                let a = Algebra::group_algebra(&group);
                for i in 0..a.dim() {
                    let b = a.basis(i);
                    if a.trace(&b) != a.trace(&a.star(&b)?) {
                        return Ok((format!("violated in Q[{}]", group.name()), false));
                    }
                }
            }
            let ut = Algebra::upper_triangular2();
            let e11 = ut.basis(0);
            let lhs = ut.trace(&e11);
            let rhs = ut.trace(&ut.star(&e11)?);
            Ok((
                format!("group algebras symmetric; upper-triangular: tr(E11) = {lhs}, tr(iota(E11)) = {rhs}"),
                lhs == rat_int(2) && rhs == rat_int(1),
            ))
        },
    )
}

/// Local witnesses for the gl2(3) partner relation at the five smallest
/// primes distinct from 3, each independently re-verified.
pub fn claim_local_witnesses(cfg: &SuiteConfig) -> ClaimOutcome {
    outcome(
        "c7",
        "local witnesses for up - up' over gl2(3) at q in {2, 5, 7, 11, 13}",
        "witness found and re-verified for each q",
        || {
            let fam = local_family(3, cfg.max_group_order)?;
            let rel = Relation::single(fam.u, fam.u_prime)?;
            let mut parts = Vec::new();
            for q in [2u64, 5, 7, 11, 13] {
                match zq_witness(&rel, q, cfg.witness_budget, cfg.seed)? {
                    WitnessOutcome::Found(w) => {
                        if !verify_witness(&rel, &w)? {
                            return Ok((format!("q={q}: re-verification failed"), false));
                        }
                        parts.push(format!("q={q}: det={}", w.det_residue));
                    }
                    WitnessOutcome::Inconclusive { attempts } => {
                        return Ok((format!("q={q}: inconclusive after {attempts}"), false));
                    }
                }
            }
            Ok((parts.join(", "), true))
        },
    )
}

/// Surgery plans: gcd-normalized winding numbers and the full filling span
/// for the ideal idempotent of the gl2(3) module and for seeded random
/// idempotents in each test group.
pub fn claim_surgery_plans(cfg: &SuiteConfig) -> ClaimOutcome {
    outcome(
        "c8",
        "winding numbers have gcd 1 and the (1,1)-filling span is full, for the \
         gl2(3) ideal idempotent and 10 seeded idempotents per test group",
        "all plans normalized, all spans full",
        || {
            let mut checked = 0usize;
            for group in test_groups(cfg)? {
                let algebra = Algebra::group_algebra(&group);
                let mut idempotents = Vec::new();
                if group.order() == 48 {
                    let i3 = crate::repmod::module_ip_over(&group, 3)?;
                    let ideal = embed_in_group_algebra(&i3)?;
                    idempotents.push(algebra.idempotent_generating(&ideal)?);
                }
                let mut sampler = IdempotentSampler::new(&group, cfg.seed + 8);
                while idempotents.len() < 10 {
                    let e = sampler.next_idempotent();
                    if e != algebra.one() {
                        idempotents.push(e);
                    }
                }
                for e in &idempotents {
                    let plan = SurgeryPlan::new(e)?;
                    if !plan.reconstructs_complement() {
                        return Ok(("winding numbers do not reconstruct 1 - e".into(), false));
                    }
                    if !check_filling_span(e)? {
                        return Ok((format!("span defect in Q[{}]", group.name()), false));
                    }
                    checked += 1;
                }
            }
            Ok((format!("{checked} plans verified"), true))
        },
    )
}

/// Permutation characters of cyclic subgroup classes are linearly
/// independent, with rank equal to the number of classes.
pub fn claim_cyclic_character_rank(cfg: &SuiteConfig) -> ClaimOutcome {
    outcome(
        "c9",
        "cyclic permutation characters span freely for S3, D4, Q8, GL2(F3), aff8",
        "full rank = number of cyclic classes",
        || {
            let mut groups = test_groups(cfg)?;
            groups.push(make_named_group(&GroupSpec::Aff8, cfg.max_group_order)?);
            let mut parts = Vec::new();
            for group in groups {
                let classes = group.cyclic_subgroup_classes();
                let m = Matrix::from_fn(group.conjugacy_classes().len(), classes.len(), |i, j| {
                    perm_character(&classes[j]).values()[i].clone()
                });
                let rank = m.rank();
                if rank != classes.len() {
                    return Ok((
                        format!(
                            "rank defect for {}: {rank} < {}",
                            group.name(),
                            classes.len()
                        ),
                        false,
                    ));
                }
                parts.push(format!("{}: {rank}", group.name()));
            }
            Ok((parts.join(", "), true))
        },
    )
}

/// The surface character formula inverts: random data round-trips, and the
/// hyperelliptic instance gives (4, -4) recovering genus 0 with six
/// order-2 stabilizers.
pub fn claim_surface_round_trip(cfg: &SuiteConfig) -> ClaimOutcome {
    outcome(
        "c10",
        "surface character round trip on 100 seeded instances per group in \
         {C2, C6, S3, D4}, plus the hyperelliptic instance",
        "all round trips equal; hyperelliptic character (4, -4)",
        || {
            for spec in [
                GroupSpec::Sym(2),
                GroupSpec::Cyclic(6),
                GroupSpec::Sym(3),
                GroupSpec::Dihedral(4),
            ] {
                let group = make_named_group(&spec, cfg.max_group_order)?;
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed + 10);
                for _ in 0..100 {
                    let data = random_ramification_data(&group, &mut rng, 5, 6);
                    let chi = surface_character(&group, &data)?;
                    match recover_ramification(&group, &chi)? {
                        Recovery::Realizable(back) => {
                            if !back.equivalent(&data)? {
                                return Ok((
                                    format!("round trip mismatch over {}", group.name()),
                                    false,
                                ));
                            }
                        }
                        Recovery::NotRealizable { reason } => {
                            return Ok((
                                format!("round trip rejected over {}: {reason}", group.name()),
                                false,
                            ));
                        }
                    }
                }
            }

            let c2 = make_named_group(&GroupSpec::Sym(2), cfg.max_group_order)?;
            let whole = Subgroup::whole(&c2);
            let data = RamificationData::new(0, vec![whole; 6])?;
            let chi = surface_character(&c2, &data)?;
            let chi_ok = chi.values() == [rat_int(4), rat_int(-4)];
            let back_ok = match recover_ramification(&c2, &chi)? {
                Recovery::Realizable(back) => {
                    back.quotient_genus == 0
                        && back.stabilizers.len() == 6
                        && back.stabilizers.iter().all(|s| s.order() == 2)
                }
                Recovery::NotRealizable { .. } => false,
            };
            Ok((
                format!("400 round trips; hyperelliptic {:?}", chi),
                chi_ok && back_ok,
            ))
        },
    )
}

/// Statement of scope: the geometric constructions themselves (surgery,
/// hyperbolization, spectra, torsion) are not computed; this suite
/// verifies exactly the algebraic inputs they consume.
pub fn claim_scope_statement(_cfg: &SuiteConfig) -> ClaimOutcome {
    ClaimOutcome {
        id: "c11".into(),
        title: "scope boundary".into(),
        expected: "statement printed".into(),
        computed: "manifold-level statements (surgery constructions, hyperbolization, \
                   isospectrality, torsion comparisons) are out of scope at desk scale; \
                   the algebraic data they consume is verified exactly by claims c1-c10"
            .into(),
        pass: true,
    }
}

/// All claims in order.
pub fn run_all(cfg: &SuiteConfig) -> Vec<ClaimOutcome> {
    vec![
        claim_gl2_regulator_constants(cfg),
        claim_aff8_regulator_constant(cfg),
        claim_composite_pipeline(cfg),
        claim_star_decompositions(cfg),
        claim_split_quaternion_counterexample(cfg),
        claim_trace_symmetry(cfg),
        claim_local_witnesses(cfg),
        claim_surgery_plans(cfg),
        claim_cyclic_character_rank(cfg),
        claim_surface_round_trip(cfg),
        claim_scope_statement(cfg),
    ]
}

impl ClaimOutcome {
    pub fn render_line(&self) -> String {
        format!(
            "[{}] {}: expected {}; computed {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.expected,
            self.computed
        )
    }
}
