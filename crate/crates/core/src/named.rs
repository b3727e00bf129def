//! Constructors for the named groups and subgroups used throughout.
//!
//! Matrix groups are realized through their natural permutation action:
//! GL2(F_p) on the nonzero column vectors of F_p^2 (lexicographic point
//! order), and the affine group of Z/8Z on the eight residues. Fixed-point
//! counting for permutation characters is then immediate.

use crate::error::{Error, Result};
use crate::group::{GroupKind, PermGroup, ProductData, Subgroup};
use crate::perm::Permutation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Sym(usize),
    Cyclic(usize),
    Dihedral(usize),
    Quat8,
    Gl2(u64),
    Aff8,
    Product(Vec<GroupSpec>),
}

impl GroupSpec {
    pub fn text(&self) -> String {
        match self {
            GroupSpec::Sym(n) => format!("sym({n})"),
            GroupSpec::Cyclic(n) => format!("cyclic({n})"),
            GroupSpec::Dihedral(n) => format!("dihedral({n})"),
            GroupSpec::Quat8 => "quat8".into(),
            GroupSpec::Gl2(p) => format!("gl2({p})"),
            GroupSpec::Aff8 => "aff8".into(),
            GroupSpec::Product(fs) => fs
                .iter()
                .map(GroupSpec::text)
                .collect::<Vec<_>>()
                .join(" * "),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubgroupSpec {
    Whole,
    Trivial,
    /// Upper-triangular matrices in gl2(p).
    Borel,
    /// Upper-triangular with square upper-left entry.
    Up,
    /// Upper-triangular with square lower-right entry.
    UpPrime,
    /// Diagonal part of aff8: all maps x -> ax.
    U2,
    /// The second Gassmann partner in aff8.
    U2Prime,
    /// Translations by 0 or 4 together with all scalings, in aff8.
    H,
    /// Cyclic subgroup generated by one permutation in cycle notation.
    Cyclic(Vec<Vec<u16>>),
    /// Subgroup generated by a list of permutations in cycle notation.
    Generators(Vec<Vec<Vec<u16>>>),
    Product(Vec<SubgroupSpec>),
}

fn is_prime(n: u64) -> bool {
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

pub fn make_named_group(spec: &GroupSpec, cap: u64) -> Result<PermGroup> {
    match spec {
        GroupSpec::Sym(n) => symmetric(*n, cap),
        GroupSpec::Cyclic(n) => cyclic(*n, cap),
        GroupSpec::Dihedral(n) => dihedral(*n, cap),
        GroupSpec::Quat8 => quaternion8(),
        GroupSpec::Gl2(p) => gl2(*p, cap),
        GroupSpec::Aff8 => aff8(),
        GroupSpec::Product(specs) => {
            let factors: Vec<PermGroup> = specs
                .iter()
                .map(|s| make_named_group(s, cap))
                .collect::<Result<_>>()?;
            PermGroup::direct_product(&factors, cap)
        }
    }
}

fn check_cap(order: u128, cap: u64) -> Result<()> {
    if order > cap as u128 {
        Err(Error::OrderCapExceeded {
            order,
            cap: cap as u128,
        })
    } else {
        Ok(())
    }
}

pub fn symmetric(n: usize, cap: u64) -> Result<PermGroup> {
    if n == 0 {
        return Err(Error::Parse {
            input: "sym(0)".into(),
            reason: "degree must be positive".into(),
        });
    }
    let mut order: u128 = 1;
    for k in 2..=n as u128 {
        order *= k;
    }
    check_cap(order, cap)?;
    let mut gens = Vec::new();
    if n >= 2 {
        gens.push(Permutation::from_cycles(n, &[vec![0, 1]])?);
    }
    if n >= 3 {
        gens.push(Permutation::from_cycles(n, &[(0..n as u16).collect()])?);
    }
    let g = PermGroup::from_generators(n, gens, format!("sym({n})"), cap)?;
    debug_assert_eq!(g.order() as u128, order);
    Ok(g)
}

pub fn cyclic(n: usize, cap: u64) -> Result<PermGroup> {
    if n == 0 {
        return Err(Error::Parse {
            input: "cyclic(0)".into(),
            reason: "order must be positive".into(),
        });
    }
    check_cap(n as u128, cap)?;
    let gens = if n >= 2 {
        vec![Permutation::from_cycles(n, &[(0..n as u16).collect()])?]
    } else {
        Vec::new()
    };
    PermGroup::from_generators(n, gens, format!("cyclic({n})"), cap)
}

pub fn dihedral(n: usize, cap: u64) -> Result<PermGroup> {
    if n < 3 {
        return Err(Error::Parse {
            input: format!("dihedral({n})"),
            reason: "polygon needs at least 3 vertices".into(),
        });
    }
    check_cap(2 * n as u128, cap)?;
    let rotation = Permutation::from_cycles(n, &[(0..n as u16).collect()])?;
    let reflection =
        Permutation::from_images((0..n as u16).map(|i| (n as u16 - i) % n as u16).collect())?;
    let g =
        PermGroup::from_generators(n, vec![rotation, reflection], format!("dihedral({n})"), cap)?;
    debug_assert_eq!(g.order(), 2 * n);
    Ok(g)
}

/// The quaternion group in its regular action on {1,-1,i,-i,j,-j,k,-k}.
pub fn quaternion8() -> Result<PermGroup> {
    let left_i = Permutation::from_images(vec![2, 3, 1, 0, 6, 7, 5, 4])?;
    let left_j = Permutation::from_images(vec![4, 5, 7, 6, 1, 0, 2, 3])?;
    let g = PermGroup::from_generators(8, vec![left_i, left_j], "quat8", 8)?;
    debug_assert_eq!(g.order(), 8);
    Ok(g)
}

/// Lexicographic list of the nonzero vectors of F_p^2.
fn gl2_point(p: u64, x: u64, y: u64) -> usize {
    debug_assert!((x, y) != (0, 0));
    (x * p + y - 1) as usize
}

fn gl2_coords(p: u64, point: usize) -> (u64, u64) {
    let v = point as u64 + 1;
    (v / p, v % p)
}

fn gl2_matrix_perm(p: u64, a: u64, b: u64, c: u64, d: u64) -> Result<Permutation> {
    let degree = (p * p - 1) as usize;
    let mut images = vec![0u16; degree];
    for (pt, slot) in images.iter_mut().enumerate() {
        let (x, y) = gl2_coords(p, pt);
        let nx = (a * x + b * y) % p;
        let ny = (c * x + d * y) % p;
        *slot = gl2_point(p, nx, ny) as u16;
    }
    Permutation::from_images(images)
}

/// Matrix entries of a gl2(p) element, read off the images of the two
/// standard basis vectors.
fn gl2_decode(p: u64, perm: &Permutation) -> (u64, u64, u64, u64) {
    let (a, c) = gl2_coords(p, perm.apply(gl2_point(p, 1, 0)));
    let (b, d) = gl2_coords(p, perm.apply(gl2_point(p, 0, 1)));
    (a, b, c, d)
}

fn least_primitive_root(p: u64) -> u64 {
    'candidate: for g in 2..p {
        let mut x = g;
        for _ in 1..p - 2 {
            x = x * g % p;
            if x == 1 {
                continue 'candidate;
            }
        }
        return g;
    }
    1
}

pub fn gl2(p: u64, cap: u64) -> Result<PermGroup> {
    if !is_prime(p) || p == 2 {
        return Err(Error::NotPrime(p));
    }
    let order = (p * p - 1) as u128 * (p * p - p) as u128;
    check_cap(order, cap)?;
    let degree = (p * p - 1) as usize;
    let root = least_primitive_root(p);
    let gens = vec![
        gl2_matrix_perm(p, 1, 1, 0, 1)?,
        gl2_matrix_perm(p, 1, 0, 1, 1)?,
        gl2_matrix_perm(p, root, 0, 0, 1)?,
    ];
    let g = PermGroup::from_generators(degree, gens, format!("gl2({p})"), cap)?;
    if g.order() as u128 != order {
        return Err(Error::Internal(format!(
            "gl2({p}) closure has order {} instead of {order}",
            g.order()
        )));
    }
    Ok(g.with_kind(GroupKind::Gl2 { p }))
}

fn aff8_perm(a: u64, b: u64) -> Result<Permutation> {
    Permutation::from_images((0..8).map(|x| ((a * x + b) % 8) as u16).collect())
}

fn aff8_decode(perm: &Permutation) -> (u64, u64) {
    let b = perm.apply(0) as u64;
    let a = (perm.apply(1) as u64 + 8 - b) % 8;
    (a, b)
}

/// The affine maps x -> ax + b of Z/8Z, a invertible.
pub fn aff8() -> Result<PermGroup> {
    let gens = vec![aff8_perm(3, 0)?, aff8_perm(5, 0)?, aff8_perm(1, 1)?];
    let g = PermGroup::from_generators(8, gens, "aff8", 32)?;
    debug_assert_eq!(g.order(), 32);
    Ok(g.with_kind(GroupKind::Aff8))
}

fn squares_mod(p: u64) -> Vec<bool> {
    let mut sq = vec![false; p as usize];
    for x in 1..p {
        sq[(x * x % p) as usize] = true;
    }
    sq
}

pub fn make_named_subgroup(group: &PermGroup, spec: &SubgroupSpec) -> Result<Subgroup> {
    match spec {
        SubgroupSpec::Whole => Ok(Subgroup::whole(group)),
        SubgroupSpec::Trivial => Ok(Subgroup::trivial(group)),
        SubgroupSpec::Cyclic(cycles) => {
            let p = Permutation::from_cycles(group.degree(), cycles)?;
            let idx = group.index_of(&p).ok_or_else(|| Error::Parse {
                input: p.to_string(),
                reason: "permutation is not an element of the group".into(),
            })?;
            Ok(Subgroup::cyclic(group, idx))
        }
        SubgroupSpec::Generators(words) => {
            let mut indices = Vec::new();
            for cycles in words {
                let p = Permutation::from_cycles(group.degree(), cycles)?;
                let idx = group.index_of(&p).ok_or_else(|| Error::Parse {
                    input: p.to_string(),
                    reason: "generator is not an element of the group".into(),
                })?;
                indices.push(idx);
            }
            Ok(Subgroup::generated_by(group, &indices, "gens"))
        }
        SubgroupSpec::Borel | SubgroupSpec::Up | SubgroupSpec::UpPrime => {
            let GroupKind::Gl2 { p } = *group.kind() else {
                return Err(Error::Parse {
                    input: format!("{spec:?}"),
                    reason: format!("only defined inside gl2, not {}", group.name()),
                });
            };
            let sq = squares_mod(p);
            let keep = |idx: usize| -> bool {
                let (a, _b, c, d) = gl2_decode(p, group.element(idx));
                match spec {
                    SubgroupSpec::Borel => c == 0,
                    SubgroupSpec::Up => c == 0 && sq[a as usize],
                    SubgroupSpec::UpPrime => c == 0 && sq[d as usize],
                    _ => unreachable!(),
                }
            };
            let members: Vec<usize> = (0..group.order()).filter(|&i| keep(i)).collect();
            let name = match spec {
                SubgroupSpec::Borel => "B",
                SubgroupSpec::Up => "U_p",
                _ => "U_p'",
            };
            Subgroup::from_members(group.clone(), members, name)
        }
        SubgroupSpec::U2 | SubgroupSpec::H => {
            if !matches!(group.kind(), GroupKind::Aff8) {
                return Err(Error::Parse {
                    input: format!("{spec:?}"),
                    reason: format!("only defined inside aff8, not {}", group.name()),
                });
            }
            let keep = |idx: usize| -> bool {
                let (_a, b) = aff8_decode(group.element(idx));
                match spec {
                    SubgroupSpec::U2 => b == 0,
                    SubgroupSpec::H => b % 4 == 0,
                    _ => unreachable!(),
                }
            };
            let members: Vec<usize> = (0..group.order()).filter(|&i| keep(i)).collect();
            let name = if matches!(spec, SubgroupSpec::U2) {
                "U_2"
            } else {
                "H"
            };
            Subgroup::from_members(group.clone(), members, name)
        }
        SubgroupSpec::U2Prime => {
            if !matches!(group.kind(), GroupKind::Aff8) {
                return Err(Error::Parse {
                    input: "u2'".into(),
                    reason: format!("only defined inside aff8, not {}", group.name()),
                });
            }
            let g1 = group
                .index_of(&aff8_perm(7, 0)?)
                .ok_or_else(|| Error::Internal("aff8 misses x -> -x".into()))?;
            let g2 = group
                .index_of(&aff8_perm(3, 4)?)
                .ok_or_else(|| Error::Internal("aff8 misses x -> 3x+4".into()))?;
            Ok(Subgroup::generated_by(group, &[g1, g2], "U_2'"))
        }
        SubgroupSpec::Product(specs) => {
            let GroupKind::Product(data) = group.kind() else {
                return Err(Error::Parse {
                    input: format!("{spec:?}"),
                    reason: "product subgroup spec on a non-product group".into(),
                });
            };
            let data: &ProductData = data;
            if specs.len() != data.factors.len() {
                return Err(Error::Parse {
                    input: format!("{spec:?}"),
                    reason: format!(
                        "expected {} factor specs, got {}",
                        data.factors.len(),
                        specs.len()
                    ),
                });
            }
            let parts: Vec<Subgroup> = specs
                .iter()
                .zip(&data.factors)
                .map(|(s, f)| make_named_subgroup(f, s))
                .collect::<Result<_>>()?;
            crate::group::product_subgroup(group, &parts)
        }
    }
}
