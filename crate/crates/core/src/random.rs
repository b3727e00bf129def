//! Seeded generators for randomized checks.
//!
//! Averaging idempotents are self-adjoint, which makes the star
//! decomposition degenerate as a test subject. The sampler here conjugates
//! them by random invertible elements and splits off orthogonal pieces, so
//! the stream contains genuinely non-self-adjoint idempotents and sums of
//! orthogonal ones.

use crate::algebra::{Algebra, AlgebraElement};
use crate::group::{PermGroup, Subgroup};
use crate::linalg::QMatrix;
use crate::scalar::{rat_int, Rat};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct IdempotentSampler {
    algebra: Algebra,
    pool: Vec<Subgroup>,
    rng: ChaCha8Rng,
}

impl IdempotentSampler {
    pub fn new(group: &PermGroup, seed: u64) -> IdempotentSampler {
        let mut pool = group.cyclic_subgroup_classes();
        pool.push(Subgroup::whole(group));
        IdempotentSampler {
            algebra: Algebra::group_algebra(group),
            pool,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn next_idempotent(&mut self) -> AlgebraElement {
        loop {
            if let Some(e) = self.attempt() {
                debug_assert!(e.is_idempotent().unwrap());
                return e;
            }
        }
    }

    fn attempt(&mut self) -> Option<AlgebraElement> {
        let u = self.pool[self.rng.gen_range(0..self.pool.len())].clone();
        let base = self.algebra.averaging_idempotent(&u).ok()?;
        match self.rng.gen_range(0..4u32) {
            0 => Some(base),
            1 | 2 => self.conjugate(&base),
            _ => {
                let e = self.conjugate(&base)?;
                self.split_piece(&e)
            }
        }
    }

    fn random_invertible(&mut self) -> Option<AlgebraElement> {
        for _ in 0..16 {
            let coords: Vec<Rat> = (0..self.algebra.dim())
                .map(|_| rat_int(self.rng.gen_range(-2i64..=2)))
                .collect();
            let x = self.algebra.from_coords(coords).ok()?;
            if x.is_zero() {
                continue;
            }
            if let Ok(Some(_)) = x.inverse() {
                return Some(x);
            }
        }
        None
    }

    fn conjugate(&mut self, e: &AlgebraElement) -> Option<AlgebraElement> {
        let x = self.random_invertible()?;
        let xinv = x.inverse().ok()??;
        let out = x.mul(e).ok()?.mul(&xinv).ok()?;
        Some(out)
    }

    /// One of the two orthogonal pieces of e, split along a random left
    /// sub-ideal of Ae.
    fn split_piece(&mut self, e: &AlgebraElement) -> Option<AlgebraElement> {
        let full = self
            .algebra
            .left_ideal_basis(std::slice::from_ref(e))
            .ok()?;
        if full.len() < 2 {
            return None;
        }
        for _ in 0..8 {
            let coords: Vec<Rat> = (0..self.algebra.dim())
                .map(|_| rat_int(self.rng.gen_range(-1i64..=1)))
                .collect();
            let w = self.algebra.from_coords(coords).ok()?;
            let z = w.mul(e).ok()?;
            if z.is_zero() {
                continue;
            }
            let sub = self
                .algebra
                .left_ideal_basis(std::slice::from_ref(&z))
                .ok()?;
            if sub.is_empty() || sub.len() >= full.len() {
                continue;
            }
            let (e1, e2) = self.algebra.split_idempotent(e, &sub).ok()?;
            return Some(if self.rng.gen_bool(0.5) { e1 } else { e2 });
        }
        None
    }
}

/// A random nonzero element with small integer coordinates.
pub fn random_element(algebra: &Algebra, rng: &mut ChaCha8Rng) -> AlgebraElement {
    loop {
        let coords: Vec<Rat> = (0..algebra.dim())
            .map(|_| rat_int(rng.gen_range(-3i64..=3)))
            .collect();
        if coords.iter().any(|c| !c.is_zero()) {
            return algebra.from_coords(coords).expect("matching dimension");
        }
    }
}

/// A random determinant +-1 integer matrix, as a product of elementary row
/// operations.
pub fn random_unimodular(dim: usize, rng: &mut ChaCha8Rng) -> QMatrix {
    let mut m = QMatrix::identity(dim);
    if dim < 2 {
        return m;
    }
    for _ in 0..4 * dim {
        let i = rng.gen_range(0..dim);
        let mut j = rng.gen_range(0..dim);
        while j == i {
            j = rng.gen_range(0..dim);
        }
        let c = rat_int(if rng.gen_bool(0.5) { 1 } else { -1 });
        // row_j += c * row_i
        for col in 0..dim {
            let t = m[(j, col)].clone() + c.clone() * m[(i, col)].clone();
            m[(j, col)] = t;
        }
    }
    m
}
