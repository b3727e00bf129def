//! The two-dimensional story: rational characters decompose freely over
//! permutation characters of cyclic subgroups, the first homology character
//! of a branched cover is an explicit combination of them, and inverting
//! that combination recovers the quotient genus and the stabilizer classes.

use crate::error::{Error, Result};
use crate::group::{are_conjugate_subgroups, PermGroup, Subgroup};
use crate::linalg::Matrix;
use crate::repmod::{perm_character, Character};
use crate::scalar::{rat_int, Rat};
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Quotient genus plus the multiset of nontrivial point stabilizers (up to
/// conjugacy) of a branched cover.
#[derive(Clone, Debug)]
pub struct RamificationData {
    pub quotient_genus: usize,
    pub stabilizers: Vec<Subgroup>,
}

impl RamificationData {
    pub fn new(quotient_genus: usize, stabilizers: Vec<Subgroup>) -> Result<RamificationData> {
        for s in &stabilizers {
            if s.order() == 1 {
                return Err(Error::Internal("stabilizers must be nontrivial".into()));
            }
            if !s.is_cyclic() {
                return Err(Error::Internal("stabilizers must be cyclic".into()));
            }
        }
        Ok(RamificationData {
            quotient_genus,
            stabilizers,
        })
    }

    /// Multiset equality of stabilizers up to conjugacy, plus equal genus.
    pub fn equivalent(&self, other: &RamificationData) -> Result<bool> {
        if self.quotient_genus != other.quotient_genus
            || self.stabilizers.len() != other.stabilizers.len()
        {
            return Ok(false);
        }
        let mut used = vec![false; other.stabilizers.len()];
        for s in &self.stabilizers {
            let mut matched = false;
            for (i, t) in other.stabilizers.iter().enumerate() {
                if used[i] {
                    continue;
                }
                if are_conjugate_subgroups(s, t)?.is_some() {
                    used[i] = true;
                    matched = true;
                    break;
                }
            }
            if !matched {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The unique coefficients of a rational character over the permutation
/// characters of the cyclic subgroup classes. Errors when the class
/// function is outside their span.
pub fn artin_decompose(chi: &Character) -> Result<Vec<(Subgroup, Rat)>> {
    let group = chi.group().clone();
    let classes = group.cyclic_subgroup_classes();
    let n_classes = group.conjugacy_classes().len();
    let m = Matrix::from_fn(n_classes, classes.len(), |i, j| {
        perm_character(&classes[j]).values()[i].clone()
    });
    let Some(coeffs) = m.solve(chi.values()) else {
        return Err(Error::NotInCyclicSpan);
    };
    // the permutation characters span freely, so a consistent solution is
    // unique; guard the rank anyway
    if m.rank() != classes.len() {
        return Err(Error::Internal(
            "cyclic permutation characters are not independent".into(),
        ));
    }
    Ok(classes.into_iter().zip(coeffs).collect())
}

/// The homology character of a branched cover with the given quotient
/// genus and stabilizers: twice the trivial character, plus
/// (2 genus - 2 + #stabilizers) copies of the regular character, minus one
/// permutation character per stabilizer.
pub fn surface_character(group: &PermGroup, data: &RamificationData) -> Result<Character> {
    for s in &data.stabilizers {
        if !s.group().same_group(group) {
            return Err(Error::GroupMismatch);
        }
    }
    let perm_whole = perm_character(&Subgroup::whole(group));
    let perm_free = perm_character(&Subgroup::trivial(group));
    let multiplier = rat_int(2 * data.quotient_genus as i64 - 2 + data.stabilizers.len() as i64);
    let mut chi = perm_whole
        .scale(&rat_int(2))
        .add(&perm_free.scale(&multiplier));
    for s in &data.stabilizers {
        chi = chi.sub(&perm_character(s));
    }
    Ok(chi)
}

#[derive(Clone, Debug)]
pub enum Recovery {
    Realizable(RamificationData),
    NotRealizable { reason: String },
}

/// Invert the surface character formula: strip twice the trivial
/// character, decompose over cyclic permutation characters, and read the
/// stabilizer multiset and quotient genus off the coefficients.
pub fn recover_ramification(group: &PermGroup, chi: &Character) -> Result<Recovery> {
    let perm_whole = perm_character(&Subgroup::whole(group));
    let psi = chi.sub(&perm_whole.scale(&rat_int(2)));
    let decomposition = match artin_decompose(&psi) {
        Ok(d) => d,
        Err(Error::NotInCyclicSpan) => {
            return Ok(Recovery::NotRealizable {
                reason: "character is outside the span of cyclic permutation characters".into(),
            })
        }
        Err(e) => return Err(e),
    };

    let mut stabilizers = Vec::new();
    let mut trivial_coeff = Rat::zero();
    for (subgroup, coeff) in decomposition {
        if subgroup.order() == 1 {
            trivial_coeff = coeff;
            continue;
        }
        if coeff.is_zero() {
            continue;
        }
        if !coeff.is_integer() || coeff.is_positive() {
            return Ok(Recovery::NotRealizable {
                reason: format!(
                    "coefficient {coeff} at a nontrivial cyclic class is not a nonpositive integer"
                ),
            });
        }
        let multiplicity = (-coeff.to_integer())
            .try_into()
            .map_err(|_| Error::Internal("multiplicity overflow".into()))?;
        for _ in 0..multiplicity as usize {
            stabilizers.push(subgroup.clone());
        }
        let _: u64 = multiplicity;
    }

    // trivial_coeff = 2 genus - 2 + #stabilizers
    let genus_twice = trivial_coeff + rat_int(2) - rat_int(stabilizers.len() as i64);
    if !genus_twice.is_integer() {
        return Ok(Recovery::NotRealizable {
            reason: "quotient genus is not an integer".into(),
        });
    }
    let genus_twice = genus_twice.to_integer();
    if genus_twice.is_negative() || (&genus_twice % 2) != num_bigint::BigInt::zero() {
        return Ok(Recovery::NotRealizable {
            reason: format!("2 * genus = {genus_twice} is negative or odd"),
        });
    }
    let quotient_genus =
        usize::try_from(genus_twice / 2).map_err(|_| Error::Internal("genus overflow".into()))?;
    Ok(Recovery::Realizable(RamificationData::new(
        quotient_genus,
        stabilizers,
    )?))
}

/// A seeded random instance for round-trip checks: a genus and a multiset
/// of nontrivial cyclic stabilizers.
pub fn random_ramification_data(
    group: &PermGroup,
    rng: &mut ChaCha8Rng,
    max_genus: usize,
    max_points: usize,
) -> RamificationData {
    let nontrivial: Vec<Subgroup> = group
        .cyclic_subgroup_classes()
        .into_iter()
        .filter(|s| s.order() > 1)
        .collect();
    let genus = rng.gen_range(0..=max_genus);
    let count = if nontrivial.is_empty() {
        0
    } else {
        rng.gen_range(0..=max_points)
    };
    let stabilizers = (0..count)
        .map(|_| nontrivial[rng.gen_range(0..nontrivial.len())].clone())
        .collect();
    RamificationData {
        quotient_genus: genus,
        stabilizers,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named::{make_named_group, GroupSpec};
    use rand::SeedableRng;

    const CAP: u64 = 2_000_000;

    #[test]
    fn artin_decomposition_of_indicator_characters() {
        let g = make_named_group(&GroupSpec::Sym(3), CAP).unwrap();
        let classes = g.cyclic_subgroup_classes();
        for (t, c) in classes.iter().enumerate() {
            let chi = perm_character(c);
            let coeffs = artin_decompose(&chi).unwrap();
            for (s, (rep, a)) in coeffs.iter().enumerate() {
                assert!(rep.same_members(&classes[s]));
                assert_eq!(*a, if s == t { rat_int(1) } else { rat_int(0) });
            }
        }
    }

    #[test]
    fn artin_decomposition_of_zero_is_zero() {
        let g = make_named_group(&GroupSpec::Sym(3), CAP).unwrap();
        let coeffs = artin_decompose(&Character::zero(&g)).unwrap();
        assert!(coeffs.iter().all(|(_, a)| a.is_zero()));
    }

    #[test]
    fn artin_decomposition_round_trips_random_combinations() {
        let g = make_named_group(&GroupSpec::Dihedral(4), CAP).unwrap();
        let classes = g.cyclic_subgroup_classes();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let coeffs: Vec<Rat> = (0..classes.len())
                .map(|_| crate::scalar::rat(rng.gen_range(-6i64..=6), rng.gen_range(1i64..=3)))
                .collect();
            let chi = classes
                .iter()
                .zip(&coeffs)
                .map(|(c, a)| perm_character(c).scale(a))
                .fold(Character::zero(&g), |acc, c| acc.add(&c));
            let back = artin_decompose(&chi).unwrap();
            for ((_, a), expected) in back.iter().zip(&coeffs) {
                assert_eq!(a, expected);
            }
        }
    }

    #[test]
    fn cyclic_permutation_characters_have_full_rank() {
        for spec in [
            GroupSpec::Sym(3),
            GroupSpec::Dihedral(4),
            GroupSpec::Quat8,
            GroupSpec::Aff8,
        ] {
            let g = make_named_group(&spec, CAP).unwrap();
            let classes = g.cyclic_subgroup_classes();
            let m = Matrix::from_fn(g.conjugacy_classes().len(), classes.len(), |i, j| {
                perm_character(&classes[j]).values()[i].clone()
            });
            assert_eq!(m.rank(), classes.len(), "rank defect for {spec:?}");
        }
    }

    #[test]
    fn hyperelliptic_character_and_inversion() {
        let g = make_named_group(&GroupSpec::Sym(2), CAP).unwrap();
        let whole = Subgroup::whole(&g);
        let data = RamificationData::new(0, vec![whole.clone(); 6]).unwrap();
        let chi = surface_character(&g, &data).unwrap();
        // genus-2 double cover: the involution acts as -1 on homology
        assert_eq!(chi.values(), &[rat_int(4), rat_int(-4)]);

        match recover_ramification(&g, &chi).unwrap() {
            Recovery::Realizable(back) => {
                assert_eq!(back.quotient_genus, 0);
                assert_eq!(back.stabilizers.len(), 6);
                assert!(back.equivalent(&data).unwrap());
            }
            Recovery::NotRealizable { reason } => panic!("not realizable: {reason}"),
        }
    }

    #[test]
    fn free_actions_and_the_trivial_group() {
        // trivial group, genus tau: chi(1) = 2 tau
        let g = make_named_group(&GroupSpec::Sym(1), CAP).unwrap();
        for tau in [0usize, 1, 5] {
            let data = RamificationData::new(tau, vec![]).unwrap();
            let chi = surface_character(&g, &data).unwrap();
            assert_eq!(chi.values(), &[rat_int(2 * tau as i64)]);
        }

        // unramified double cover of a torus
        let c2 = make_named_group(&GroupSpec::Sym(2), CAP).unwrap();
        let data = RamificationData::new(1, vec![]).unwrap();
        let chi = surface_character(&c2, &data).unwrap();
        assert_eq!(chi.values(), &[rat_int(2), rat_int(2)]);
    }

    #[test]
    fn recovering_twice_the_trivial_character_gives_an_unramified_torus_quotient() {
        let g = make_named_group(&GroupSpec::Sym(2), CAP).unwrap();
        let chi = perm_character(&Subgroup::whole(&g)).scale(&rat_int(2));
        match recover_ramification(&g, &chi).unwrap() {
            Recovery::Realizable(data) => {
                assert_eq!(data.quotient_genus, 1);
                assert!(data.stabilizers.is_empty());
            }
            Recovery::NotRealizable { reason } => panic!("{reason}"),
        }
    }

    #[test]
    fn positive_cyclic_coefficients_are_rejected() {
        let g = make_named_group(&GroupSpec::Sym(2), CAP).unwrap();
        // chi = 2 perm_G + perm_G has coefficient +1 at the nontrivial class
        let chi = perm_character(&Subgroup::whole(&g)).scale(&rat_int(3));
        match recover_ramification(&g, &chi).unwrap() {
            Recovery::NotRealizable { .. } => {}
            Recovery::Realizable(_) => panic!("sign condition missed"),
        }
    }

    #[test]
    fn round_trip_on_seeded_random_instances() {
        for spec in [
            GroupSpec::Sym(2),
            GroupSpec::Cyclic(6),
            GroupSpec::Sym(3),
            GroupSpec::Dihedral(4),
        ] {
            let g = make_named_group(&spec, CAP).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..25 {
                let data = random_ramification_data(&g, &mut rng, 5, 6);
                let chi = surface_character(&g, &data).unwrap();
                // whenever the covering genus is integral (necessary for the
                // data to be realizable), the homology of the closed
                // orientable cover is even-dimensional
                let branch_defect: usize = data
                    .stabilizers
                    .iter()
                    .map(|s| g.order() - s.index_in_group())
                    .sum();
                if branch_defect.is_multiple_of(2) {
                    let dim = chi.values()[0].clone();
                    assert!((dim.clone() / rat_int(2)).is_integer(), "odd dim {dim}");
                }
                match recover_ramification(&g, &chi).unwrap() {
                    Recovery::Realizable(back) => {
                        assert!(back.equivalent(&data).unwrap(), "mismatch for {spec:?}")
                    }
                    Recovery::NotRealizable { reason } => {
                        panic!("round trip failed for {spec:?}: {reason}")
                    }
                }
            }
        }
    }
}
