//! Permutations in one-line notation.

use crate::error::{Error, Result};
use std::fmt;

/// A bijection of `{0, .., degree-1}`, stored as the image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Box<[u16]>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u16).collect(),
        }
    }

    /// Build from the image list, checking bijectivity.
    pub fn from_images(images: Vec<u16>) -> Result<Self> {
        let degree = images.len();
        let mut seen = vec![false; degree];
        for &x in &images {
            if (x as usize) >= degree || seen[x as usize] {
                return Err(Error::Internal(format!(
                    "image list {images:?} is not a bijection on 0..{degree}"
                )));
            }
            seen[x as usize] = true;
        }
        Ok(Permutation {
            images: images.into_boxed_slice(),
        })
    }

    /// Build from disjoint-cycle notation on 0-based points.
    pub fn from_cycles(degree: usize, cycles: &[Vec<u16>]) -> Result<Self> {
        let mut images: Vec<u16> = (0..degree as u16).collect();
        for cycle in cycles {
            for (k, &pt) in cycle.iter().enumerate() {
                if pt as usize >= degree {
                    return Err(Error::Internal(format!(
                        "point {pt} exceeds degree {degree}"
                    )));
                }
                images[pt as usize] = cycle[(k + 1) % cycle.len()];
            }
        }
        Permutation::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn images(&self) -> &[u16] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u16 == x)
    }

    /// `self * other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: other
                .images
                .iter()
                .map(|&x| self.images[x as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u16; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x as usize] = i as u16;
        }
        Permutation {
            images: images.into_boxed_slice(),
        }
    }

    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut n = 1;
        while !p.is_identity() {
            p = self.compose(&p);
            n += 1;
        }
        n
    }

    /// Disjoint cycles (length > 1), each rotated to start at its minimum,
    /// sorted by that minimum.
    pub fn cycles(&self) -> Vec<Vec<u16>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start as u16];
            seen[start] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x] = true;
                cycle.push(x as u16);
                x = self.apply(x);
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }
}

impl fmt::Display for Permutation {
    /// Disjoint-cycle notation with 1-based points, `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in cycles {
            let pts: Vec<String> = cycle.iter().map(|p| (p + 1).to_string()).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_applies_right_factor_first() {
        // s = (0 1), t = (0 1 2); (s*t)(0) = s(t(0)) = s(1) = 0
        let s = Permutation::from_cycles(3, &[vec![0, 1]]).unwrap();
        let t = Permutation::from_cycles(3, &[vec![0, 1, 2]]).unwrap();
        let st = s.compose(&t);
        assert_eq!(st.apply(0), 0);
        assert_eq!(st.apply(1), 2);
        assert_eq!(st.apply(2), 1);
    }

    #[test]
    fn inverse_and_order() {
        let t = Permutation::from_cycles(5, &[vec![0, 1, 2], vec![3, 4]]).unwrap();
        assert!(t.compose(&t.inverse()).is_identity());
        assert_eq!(t.order(), 6);
        assert_eq!(Permutation::identity(4).order(), 1);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_images(vec![0, 0, 1]).is_err());
        assert!(Permutation::from_images(vec![0, 3]).is_err());
    }

    #[test]
    fn cycle_notation_display_is_one_based() {
        let t = Permutation::from_cycles(4, &[vec![0, 2], vec![1, 3]]).unwrap();
        assert_eq!(t.to_string(), "(1 3)(2 4)");
        assert_eq!(Permutation::identity(3).to_string(), "()");
    }
}
