//! Structure-constant algebras with involution, and the group algebra Q\[G\].
//!
//! The group algebra carries the star involution extending g -> g^{-1}.
//! Its trace form is anisotropic, which is what makes the idempotent
//! calculus here work: left ideals split off orthogonal complements, so an
//! idempotent generator can be extracted from any left ideal by decomposing
//! the unit.

use crate::error::{Error, Result};
use crate::group::{PermGroup, Subgroup};
use crate::linalg::{Matrix, QMatrix};
use crate::repmod::Character;
use crate::scalar::{rat_int, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::fmt;
use std::sync::{Arc, OnceLock};

#[derive(Clone)]
pub struct Algebra {
    inner: Arc<AlgebraInner>,
}

struct AlgebraInner {
    name: String,
    dim: usize,
    kind: AlgebraKind,
    involution: Option<Involution>,
    star_gram: OnceLock<QMatrix>,
    nondegenerate: OnceLock<bool>,
}

enum AlgebraKind {
    Group(PermGroup),
    /// mul\[(i * dim + j) * dim + k\] = coefficient of e_k in e_i * e_j
    Table {
        mul: Vec<Rat>,
        unit: Vec<Rat>,
    },
}

enum Involution {
    /// Coordinates permuted by g -> g^{-1}.
    GroupInverse,
    Matrix(QMatrix),
}

impl Algebra {
    /// The group algebra Q\[G\] with basis G (element-list order) and the
    /// star involution g -> g^{-1}.
    pub fn group_algebra(group: &PermGroup) -> Algebra {
        Algebra {
            inner: Arc::new(AlgebraInner {
                name: format!("Q[{}]", group.name()),
                dim: group.order(),
                kind: AlgebraKind::Group(group.clone()),
                involution: Some(Involution::GroupInverse),
                star_gram: OnceLock::new(),
                nondegenerate: OnceLock::new(),
            }),
        }
    }

    /// A general structure-constant algebra. Verifies associativity, the
    /// unit, and (when given) the involution laws on all basis elements.
    pub fn from_table(
        name: impl Into<String>,
        dim: usize,
        mul: Vec<Rat>,
        unit: Vec<Rat>,
        involution: Option<QMatrix>,
    ) -> Result<Algebra> {
        if mul.len() != dim * dim * dim || unit.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim * dim,
                got: mul.len(),
            });
        }
        let alg = Algebra {
            inner: Arc::new(AlgebraInner {
                name: name.into(),
                dim,
                kind: AlgebraKind::Table { mul, unit },
                involution: involution.map(Involution::Matrix),
                star_gram: OnceLock::new(),
                nondegenerate: OnceLock::new(),
            }),
        };
        alg.verify_table_axioms()?;
        Ok(alg)
    }

    fn verify_table_axioms(&self) -> Result<()> {
        let dim = self.dim();
        let one = self.one();
        for i in 0..dim {
            let b = self.basis(i);
            if one.mul(&b)? != b || b.mul(&one)? != b {
                return Err(Error::Internal("unit is not a two-sided identity".into()));
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                let ij = self.basis(i).mul(&self.basis(j))?;
                for k in 0..dim {
                    let lhs = ij.mul(&self.basis(k))?;
                    let rhs = self.basis(i).mul(&self.basis(j).mul(&self.basis(k))?)?;
                    if lhs != rhs {
                        return Err(Error::Internal(format!(
                            "associativity fails on basis triple ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        if self.inner.involution.is_some() {
            let one = self.one();
            if self.star(&one)? != one {
                return Err(Error::Internal("involution moves the unit".into()));
            }
            for i in 0..dim {
                let b = self.basis(i);
                if self.star(&self.star(&b)?)? != b {
                    return Err(Error::Internal("involution is not an involution".into()));
                }
                for j in 0..dim {
                    let c = self.basis(j);
                    let lhs = self.star(&b.mul(&c)?)?;
                    let rhs = self.star(&c)?.mul(&self.star(&b)?)?;
                    if lhs != rhs {
                        return Err(Error::Internal(
                            "involution is not an anti-automorphism".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Upper-triangular 2x2 matrices over Q with the involution
    /// (a b; 0 d) -> (d -b; 0 a). Not semisimple; its trace form is not
    /// symmetric.
    pub fn upper_triangular2() -> Algebra {
        // basis E11, E12, E22
        let dim = 3;
        let mut mul = vec![Rat::zero(); dim * dim * dim];
        let mut set = |i: usize, j: usize, k: usize| {
            mul[(i * dim + j) * dim + k] = Rat::one();
        };
        set(0, 0, 0); // E11 E11 = E11
        set(0, 1, 1); // E11 E12 = E12
        set(1, 2, 1); // E12 E22 = E12
        set(2, 2, 2); // E22 E22 = E22
        let unit = vec![Rat::one(), Rat::zero(), Rat::one()];
        let mut iota = QMatrix::zero(3, 3);
        iota[(2, 0)] = Rat::one(); // E11 -> E22
        iota[(1, 1)] = -Rat::one(); // E12 -> -E12
        iota[(0, 2)] = Rat::one(); // E22 -> E11
        Algebra::from_table("upper-triangular 2x2", dim, mul, unit, Some(iota))
            .expect("fixed table is valid")
    }

    /// M2(Q) with the split-quaternion involution (a b; c d) -> (d -b; -c a).
    /// Semisimple, non-degenerate, but isotropic.
    pub fn split_quaternion() -> Algebra {
        // basis E11, E12, E21, E22
        let dim = 4;
        let mut mul = vec![Rat::zero(); dim * dim * dim];
        let e = |r: usize, c: usize| r * 2 + c;
        for r in 0..2 {
            for s in 0..2 {
                for t in 0..2 {
                    for u in 0..2 {
                        if s == t {
                            let idx = (e(r, s) * dim + e(t, u)) * dim + e(r, u);
                            mul[idx] = Rat::one();
                        }
                    }
                }
            }
        }
        let unit = vec![Rat::one(), Rat::zero(), Rat::zero(), Rat::one()];
        let mut iota = QMatrix::zero(4, 4);
        iota[(3, 0)] = Rat::one(); // E11 -> E22
        iota[(1, 1)] = -Rat::one(); // E12 -> -E12
        iota[(2, 2)] = -Rat::one(); // E21 -> -E21
        iota[(0, 3)] = Rat::one(); // E22 -> E11
        Algebra::from_table("split-quaternion M2(Q)", dim, mul, unit, Some(iota))
            .expect("fixed table is valid")
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn group(&self) -> Option<&PermGroup> {
        match &self.inner.kind {
            AlgebraKind::Group(g) => Some(g),
            AlgebraKind::Table { .. } => None,
        }
    }

    pub fn has_involution(&self) -> bool {
        self.inner.involution.is_some()
    }

    pub fn same_algebra(&self, other: &Algebra) -> bool {
        if Arc::ptr_eq(&self.inner, &other.inner) {
            return true;
        }
        // two group-algebra views of the same group are the same algebra
        match (&self.inner.kind, &other.inner.kind) {
            (AlgebraKind::Group(a), AlgebraKind::Group(b)) => a.same_group(b),
            _ => false,
        }
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement {
            algebra: self.clone(),
            coords: vec![Rat::zero(); self.dim()],
        }
    }

    pub fn one(&self) -> AlgebraElement {
        let coords = match &self.inner.kind {
            AlgebraKind::Group(_) => {
                let mut c = vec![Rat::zero(); self.dim()];
                c[0] = Rat::one();
                c
            }
            AlgebraKind::Table { unit, .. } => unit.clone(),
        };
        AlgebraElement {
            algebra: self.clone(),
            coords,
        }
    }

    pub fn basis(&self, i: usize) -> AlgebraElement {
        let mut coords = vec![Rat::zero(); self.dim()];
        coords[i] = Rat::one();
        AlgebraElement {
            algebra: self.clone(),
            coords,
        }
    }

    pub fn from_coords(&self, coords: Vec<Rat>) -> Result<AlgebraElement> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: coords.len(),
            });
        }
        Ok(AlgebraElement {
            algebra: self.clone(),
            coords,
        })
    }

    /// (1/|U|) sum of the elements of U; projects Q\[G\] onto its U-fixed part.
    pub fn averaging_idempotent(&self, u: &Subgroup) -> Result<AlgebraElement> {
        let AlgebraKind::Group(group) = &self.inner.kind else {
            return Err(Error::Internal("averaging needs a group algebra".into()));
        };
        if !u.group().same_group(group) {
            return Err(Error::GroupMismatch);
        }
        let mut coords = vec![Rat::zero(); self.dim()];
        let share = Rat::new(BigInt::one(), BigInt::from(u.order()));
        for &m in u.members() {
            coords[m] = share.clone();
        }
        Ok(AlgebraElement {
            algebra: self.clone(),
            coords,
        })
    }

    /// Trace of left multiplication by x on the algebra.
    pub fn trace(&self, x: &AlgebraElement) -> Rat {
        debug_assert!(self.same_algebra(&x.algebra));
        match &self.inner.kind {
            AlgebraKind::Group(_) => {
                // left multiplication by h fixes the basis vector g iff h = 1
                x.coords[0].clone() * rat_int(self.dim() as i64)
            }
            AlgebraKind::Table { mul, .. } => {
                let dim = self.dim();
                let mut acc = Rat::zero();
                for (i, xi) in x.coords.iter().enumerate() {
                    if xi.is_zero() {
                        continue;
                    }
                    for j in 0..dim {
                        acc += xi * &mul[(i * dim + j) * dim + j];
                    }
                }
                acc
            }
        }
    }

    pub fn star(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        debug_assert!(self.same_algebra(&x.algebra));
        let Some(involution) = &self.inner.involution else {
            return Err(Error::NoInvolution);
        };
        let coords = match involution {
            Involution::GroupInverse => {
                let AlgebraKind::Group(group) = &self.inner.kind else {
                    unreachable!()
                };
                let mut out = vec![Rat::zero(); self.dim()];
                for (g, c) in x.coords.iter().enumerate() {
                    if !c.is_zero() {
                        out[group.inv_idx(g)] = c.clone();
                    }
                }
                out
            }
            Involution::Matrix(m) => m.apply(&x.coords),
        };
        Ok(AlgebraElement {
            algebra: self.clone(),
            coords,
        })
    }

    /// The bilinear form (x, y) -> tr(x * iota(y)).
    pub fn trace_form(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<Rat> {
        let sy = self.star(y)?;
        Ok(self.trace(&x.mul(&sy)?))
    }

    /// Gram matrix of the trace form on the basis.
    pub fn star_gram(&self) -> Result<&QMatrix> {
        if !self.has_involution() {
            return Err(Error::NoInvolution);
        }
        Ok(self.inner.star_gram.get_or_init(|| {
            let dim = self.dim();
            Matrix::from_fn(dim, dim, |i, j| {
                self.trace_form(&self.basis(i), &self.basis(j))
                    .expect("involution present")
            })
        }))
    }

    fn check_nondegenerate(&self) -> Result<()> {
        let ok = *match &self.inner.kind {
            // the star form on Q[G] is |G| times the identity
            AlgebraKind::Group(_) => self.inner.nondegenerate.get_or_init(|| true),
            AlgebraKind::Table { .. } => {
                let gram = self.star_gram()?;
                self.inner
                    .nondegenerate
                    .get_or_init(|| gram.rank() == self.dim())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DegenerateForm)
        }
    }

    /// Canonical basis of the left ideal generated by the given elements.
    pub fn left_ideal_basis(&self, gens: &[AlgebraElement]) -> Result<Vec<AlgebraElement>> {
        let mut rows: Matrix<Rat> = Matrix::zero(0, self.dim());
        for x in gens {
            if !self.same_algebra(&x.algebra) {
                return Err(Error::AlgebraMismatch);
            }
            for i in 0..self.dim() {
                rows.push_row(self.left_translate(i, x).coords);
            }
        }
        Ok(rows
            .row_space_basis()
            .into_iter()
            .map(|coords| AlgebraElement {
                algebra: self.clone(),
                coords,
            })
            .collect())
    }

    pub fn right_ideal_dim(&self, x: &AlgebraElement) -> usize {
        let mut rows: Matrix<Rat> = Matrix::zero(0, self.dim());
        for i in 0..self.dim() {
            rows.push_row(x.mul(&self.basis(i)).expect("same algebra").coords);
        }
        rows.rank()
    }

    /// e_i * x.
    fn left_translate(&self, i: usize, x: &AlgebraElement) -> AlgebraElement {
        match &self.inner.kind {
            AlgebraKind::Group(group) => {
                let mut out = vec![Rat::zero(); self.dim()];
                for (h, c) in x.coords.iter().enumerate() {
                    if !c.is_zero() {
                        out[group.mul_idx(i, h)] = c.clone();
                    }
                }
                AlgebraElement {
                    algebra: self.clone(),
                    coords: out,
                }
            }
            AlgebraKind::Table { .. } => self.basis(i).mul(x).expect("same algebra"),
        }
    }

    /// Orthogonal complement of a spanned subspace with respect to the
    /// trace form: { v : tr(v * iota(x)) = 0 for all x in the span }.
    pub fn orthogonal_complement(&self, span: &[AlgebraElement]) -> Result<Vec<AlgebraElement>> {
        self.check_nondegenerate()?;
        let gram = self.star_gram()?.clone();
        let mut constraints: Matrix<Rat> = Matrix::zero(0, self.dim());
        for x in span {
            if !self.same_algebra(&x.algebra) {
                return Err(Error::AlgebraMismatch);
            }
            // row_i of constraints: phi(e_i, x) as a functional of the first slot
            constraints.push_row(gram.apply(&x.coords));
        }
        Ok(constraints
            .kernel_basis()
            .into_iter()
            .map(|coords| AlgebraElement {
                algebra: self.clone(),
                coords,
            })
            .collect())
    }

    /// Dimensions of Ae, A(1 - iota(e)), their sum and intersection, and
    /// whether they decompose the algebra.
    pub fn check_star_decomposition(&self, e: &AlgebraElement) -> Result<StarDecomposition> {
        if !e.is_idempotent()? {
            return Err(Error::NotIdempotent);
        }
        let left = self.left_ideal_basis(std::slice::from_ref(e))?;
        let complement_gen = self.one().sub(&self.star(e)?);
        let right = self.left_ideal_basis(std::slice::from_ref(&complement_gen))?;

        let mut stacked: Matrix<Rat> = Matrix::zero(0, self.dim());
        for v in left.iter().chain(&right) {
            stacked.push_row(v.coords.clone());
        }
        let dim_sum = stacked.rank();
        let dim_intersection = left.len() + right.len() - dim_sum;
        Ok(StarDecomposition {
            dim_left_ideal: left.len(),
            dim_complement_ideal: right.len(),
            dim_sum,
            dim_intersection,
            direct_sum: dim_sum == self.dim() && dim_intersection == 0,
        })
    }

    /// An idempotent e with Ae equal to the given left ideal, obtained by
    /// decomposing 1 along the ideal and its orthogonal complement.
    pub fn idempotent_generating(&self, ideal: &[AlgebraElement]) -> Result<AlgebraElement> {
        if ideal.is_empty() {
            return Ok(self.zero());
        }
        let complement = self.orthogonal_complement(ideal)?;
        if ideal.len() + complement.len() != self.dim() {
            return Err(Error::DegenerateForm);
        }
        // columns: ideal basis then complement basis; solve for 1
        let cols = ideal.len() + complement.len();
        let m = Matrix::from_fn(self.dim(), cols, |i, j| {
            if j < ideal.len() {
                ideal[j].coords[i].clone()
            } else {
                complement[j - ideal.len()].coords[i].clone()
            }
        });
        let one = self.one();
        let Some(sol) = m.solve(&one.coords) else {
            return Err(Error::Internal(
                "unit does not decompose along ideal + complement".into(),
            ));
        };
        let mut e = self.zero();
        for (t, v) in ideal.iter().enumerate() {
            e = e.add(&v.scale(&sol[t]));
        }
        if !e.is_idempotent()? {
            return Err(Error::Internal(
                "extracted generator is not idempotent".into(),
            ));
        }
        let regenerated = self.left_ideal_basis(std::slice::from_ref(&e))?;
        if coords_matrix(ideal).row_space_basis() != coords_matrix(&regenerated).row_space_basis() {
            return Err(Error::Internal(
                "extracted idempotent generates the wrong ideal".into(),
            ));
        }
        Ok(e)
    }

    /// Split an idempotent as e = e1 + e2 with e1, e2 orthogonal
    /// idempotents, where A e1 is the given left sub-ideal of Ae.
    pub fn split_idempotent(
        &self,
        e: &AlgebraElement,
        sub_ideal: &[AlgebraElement],
    ) -> Result<(AlgebraElement, AlgebraElement)> {
        if !e.is_idempotent()? {
            return Err(Error::NotIdempotent);
        }
        let ae = self.left_ideal_basis(std::slice::from_ref(e))?;
        let perp = self.orthogonal_complement(sub_ideal)?;
        // complement of the sub-ideal inside Ae
        let inside = intersect_row_spaces(&coords_matrix(&ae), &coords_matrix(&perp));
        if sub_ideal.len() + inside.len() != ae.len() {
            return Err(Error::Internal("sub-ideal does not split inside Ae".into()));
        }
        let cols = sub_ideal.len() + inside.len();
        let m = Matrix::from_fn(self.dim(), cols, |i, j| {
            if j < sub_ideal.len() {
                sub_ideal[j].coords[i].clone()
            } else {
                inside[j - sub_ideal.len()][i].clone()
            }
        });
        let Some(sol) = m.solve(&e.coords) else {
            return Err(Error::Internal(
                "idempotent not inside its own ideal".into(),
            ));
        };
        let mut e1 = self.zero();
        for (t, v) in sub_ideal.iter().enumerate() {
            e1 = e1.add(&v.scale(&sol[t]));
        }
        let e2 = e.sub(&e1);
        let zero = self.zero();
        if !e1.is_idempotent()?
            || !e2.is_idempotent()?
            || e1.mul(&e2)? != zero
            || e2.mul(&e1)? != zero
        {
            return Err(Error::Internal(
                "split did not produce an orthogonal pair".into(),
            ));
        }
        Ok((e1, e2))
    }
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Algebra({}, dim {})", self.name(), self.dim())
    }
}

fn coords_matrix(elems: &[AlgebraElement]) -> QMatrix {
    let dim = elems.first().map_or(0, |e| e.coords.len());
    let mut m: QMatrix = Matrix::zero(0, dim);
    for e in elems {
        m.push_row(e.coords.clone());
    }
    m
}

/// Basis of the intersection of two row spaces.
fn intersect_row_spaces(a: &QMatrix, b: &QMatrix) -> Vec<Vec<Rat>> {
    if a.rows() == 0 || b.rows() == 0 {
        return Vec::new();
    }
    let n = a.cols();
    // (x, y) with a^T x = b^T y; the common vector is a^T x
    let combined = Matrix::from_fn(n, a.rows() + b.rows(), |i, j| {
        if j < a.rows() {
            a[(j, i)].clone()
        } else {
            -b[(j - a.rows(), i)].clone()
        }
    });
    let mut rows: QMatrix = Matrix::zero(0, n);
    for v in combined.kernel_basis() {
        let mut w = vec![Rat::zero(); n];
        for (t, coeff) in v.iter().take(a.rows()).enumerate() {
            if coeff.is_zero() {
                continue;
            }
            for c in 0..n {
                w[c] += coeff * &a[(t, c)];
            }
        }
        if w.iter().any(|x| !x.is_zero()) {
            rows.push_row(w);
        }
    }
    rows.row_space_basis()
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct StarDecomposition {
    pub dim_left_ideal: usize,
    pub dim_complement_ideal: usize,
    pub dim_sum: usize,
    pub dim_intersection: usize,
    pub direct_sum: bool,
}

#[derive(Clone)]
pub struct AlgebraElement {
    algebra: Algebra,
    coords: Vec<Rat>,
}

impl AlgebraElement {
    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Rat::is_zero)
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        debug_assert!(self.algebra.same_algebra(&other.algebra));
        AlgebraElement {
            algebra: self.algebra.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        debug_assert!(self.algebra.same_algebra(&other.algebra));
        AlgebraElement {
            algebra: self.algebra.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: &Rat) -> AlgebraElement {
        AlgebraElement {
            algebra: self.algebra.clone(),
            coords: self.coords.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mul(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        if !self.algebra.same_algebra(&other.algebra) {
            return Err(Error::AlgebraMismatch);
        }
        let dim = self.algebra.dim();
        let mut out = vec![Rat::zero(); dim];
        match &self.algebra.inner.kind {
            AlgebraKind::Group(group) => {
                for (i, a) in self.coords.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (j, b) in other.coords.iter().enumerate() {
                        if b.is_zero() {
                            continue;
                        }
                        out[group.mul_idx(i, j)] += a * b;
                    }
                }
            }
            AlgebraKind::Table { mul, .. } => {
                for (i, a) in self.coords.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (j, b) in other.coords.iter().enumerate() {
                        if b.is_zero() {
                            continue;
                        }
                        let ab = a * b;
                        for k in 0..dim {
                            let c = &mul[(i * dim + j) * dim + k];
                            if !c.is_zero() {
                                out[k] += &ab * c;
                            }
                        }
                    }
                }
            }
        }
        Ok(AlgebraElement {
            algebra: self.algebra.clone(),
            coords: out,
        })
    }

    pub fn star(&self) -> Result<AlgebraElement> {
        self.algebra.star(self)
    }

    pub fn trace(&self) -> Rat {
        self.algebra.trace(self)
    }

    pub fn is_idempotent(&self) -> Result<bool> {
        Ok(self.mul(self)? == *self)
    }

    /// Two-sided inverse, or `None` if not invertible.
    pub fn inverse(&self) -> Result<Option<AlgebraElement>> {
        let dim = self.algebra.dim();
        // columns of the left-multiplication matrix
        let mut cols: Vec<Vec<Rat>> = Vec::with_capacity(dim);
        for j in 0..dim {
            cols.push(self.mul(&self.algebra.basis(j))?.coords);
        }
        let m = Matrix::from_fn(dim, dim, |i, j| cols[j][i].clone());
        let one = self.algebra.one();
        let Some(y) = m.solve(&one.coords) else {
            return Ok(None);
        };
        let y = self.algebra.from_coords(y)?;
        if self.mul(&y)? == one && y.mul(self)? == one {
            Ok(Some(y))
        } else {
            Ok(None)
        }
    }

    /// Sparse JSON map {basis_index: "num/den"}.
    pub fn to_sparse_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (i, c) in self.coords.iter().enumerate() {
            if !c.is_zero() {
                map.insert(i.to_string(), serde_json::Value::String(c.to_string()));
            }
        }
        serde_json::Value::Object(map)
    }
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.same_algebra(&other.algebra) && self.coords == other.coords
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{c}*e{i}"))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// One step of the homology bookkeeping attached to a surgery plan.
#[derive(Clone, Debug, serde::Serialize)]
pub struct LedgerEntry {
    pub stage: String,
    pub change: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub character: Option<Character>,
}

/// The algebraic data of the drilling/filling construction: the idempotent,
/// its cleared-denominator winding numbers, and the symbolic homology
/// ledger. No geometry is computed.
pub struct SurgeryPlan {
    pub algebra: Algebra,
    pub idempotent: AlgebraElement,
    pub denominator: BigInt,
    pub winding_numbers: Vec<BigInt>,
    pub ledger: Vec<LedgerEntry>,
    pub note: Option<String>,
}

impl SurgeryPlan {
    /// Winding data for the idempotent e != 1: writes 1 - e as
    /// (1/d) * sum of n_g g with integer n_g of gcd 1, and assembles the
    /// character-level homology ledger.
    pub fn new(e: &AlgebraElement) -> Result<SurgeryPlan> {
        let algebra = e.algebra().clone();
        let Some(group) = algebra.group() else {
            return Err(Error::Internal("surgery plans need a group algebra".into()));
        };
        if !e.is_idempotent()? {
            return Err(Error::NotIdempotent);
        }
        let one = algebra.one();
        if *e == one {
            return Err(Error::IdentityIdempotent);
        }
        let complement = one.sub(e);

        let mut denominator = BigInt::one();
        for c in complement.coords() {
            denominator = denominator.lcm(c.denom());
        }
        let winding_numbers: Vec<BigInt> = complement
            .coords()
            .iter()
            .map(|c| c.numer() * (&denominator / c.denom()))
            .collect();
        let mut content = BigInt::zero();
        for n in &winding_numbers {
            content = content.gcd(n);
        }
        if content != BigInt::one() {
            return Err(Error::Internal(format!(
                "winding numbers have content {content}, expected 1"
            )));
        }

        let estar = e.star()?;
        let estar_ideal = algebra.left_ideal_basis(std::slice::from_ref(&estar))?;
        let added = crate::repmod::left_ideal_character(&algebra, &estar_ideal)?;
        let regular = crate::repmod::regular_character(group);

        let ledger = vec![
            LedgerEntry {
                stage: "H1(N0)".into(),
                change: "base homology of the starting manifold (symbolic)".into(),
                character: None,
            },
            LedgerEntry {
                stage: "H1(N1)".into(),
                change: "adds the regular module Q[G]".into(),
                character: Some(regular.clone()),
            },
            LedgerEntry {
                stage: "H1(N2)".into(),
                change: "adds the left ideal Q[G]e*".into(),
                character: Some(added.clone()),
            },
            LedgerEntry {
                stage: "H1(N3)".into(),
                change: "removes the regular module Q[G]".into(),
                character: Some(regular),
            },
            LedgerEntry {
                stage: "net".into(),
                change: "H1(N3) = H1(N0) + module with this character".into(),
                character: Some(added),
            },
        ];

        let note = if e.is_zero() {
            Some(
                "e = 0: the filling removes exactly what the drilling added; \
                 permitted here, flagged for review"
                    .into(),
            )
        } else {
            None
        };

        Ok(SurgeryPlan {
            algebra,
            idempotent: e.clone(),
            denominator,
            winding_numbers,
            ledger,
            note,
        })
    }

    /// (1/d) * sum n_g g must reconstruct 1 - e exactly.
    pub fn reconstructs_complement(&self) -> bool {
        let one = self.algebra.one();
        let complement = one.sub(&self.idempotent);
        self.winding_numbers
            .iter()
            .zip(complement.coords())
            .all(|(n, c)| &Rat::new(n.clone(), self.denominator.clone()) == c)
    }
}

/// Span test for the (1,1)-filling step: inside Q\[G\]^2 = Q\[G\]m + Q\[G\]l,
/// the translates of (1-e*)m, of e l, and of m + l must fill everything.
pub fn check_filling_span(e: &AlgebraElement) -> Result<bool> {
    let algebra = e.algebra().clone();
    let Some(group) = algebra.group() else {
        return Err(Error::Internal("filling span needs a group algebra".into()));
    };
    if !e.is_idempotent()? {
        return Err(Error::NotIdempotent);
    }
    let n = algebra.dim();
    let one_minus_estar = algebra.one().sub(&e.star()?);
    let mut rows: QMatrix = Matrix::zero(0, 2 * n);

    let padded = |left: Option<&[Rat]>, right: Option<&[Rat]>| {
        let mut row = vec![Rat::zero(); 2 * n];
        if let Some(l) = left {
            row[..n].clone_from_slice(l);
        }
        if let Some(r) = right {
            row[n..].clone_from_slice(r);
        }
        row
    };

    for g in 0..group.order() {
        let gm = algebra.left_translate(g, &one_minus_estar);
        rows.push_row(padded(Some(gm.coords()), None));
    }
    for g in 0..group.order() {
        let gl = algebra.left_translate(g, e);
        rows.push_row(padded(None, Some(gl.coords())));
    }
    let mut diag = vec![Rat::zero(); n];
    for g in 0..group.order() {
        diag[g] = Rat::one();
        let row = padded(Some(&diag), Some(&diag));
        rows.push_row(row);
        diag[g] = Rat::zero();
    }
    Ok(rows.rank() == 2 * n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named::{make_named_group, GroupSpec};
    use crate::perm::Permutation;
    use crate::random::{random_element, IdempotentSampler};
    use crate::scalar::rat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sym(n: usize) -> PermGroup {
        make_named_group(&GroupSpec::Sym(n), 1_000_000).unwrap()
    }

    #[test]
    fn trivial_group_algebra() {
        let a = Algebra::group_algebra(&sym(1));
        assert_eq!(a.dim(), 1);
        let x = a.from_coords(vec![rat(3, 2)]).unwrap();
        assert_eq!(a.star(&x).unwrap(), x);
        assert_eq!(a.trace(&x), rat(3, 2));
    }

    #[test]
    fn sym2_group_algebra_is_commutative_with_trivial_star() {
        let a = Algebra::group_algebra(&sym(2));
        assert_eq!(a.dim(), 2);
        // (a + b s)^2 = (a^2 + b^2) + 2ab s
        let x = a.from_coords(vec![rat_int(2), rat_int(5)]).unwrap();
        let sq = x.mul(&x).unwrap();
        assert_eq!(sq.coords(), &[rat_int(29), rat_int(20)]);
        // every element is self-inverse, so star is the identity
        assert_eq!(a.star(&x).unwrap(), x);
    }

    #[test]
    fn star_swaps_the_three_cycles_in_sym3() {
        let g = sym(3);
        let a = Algebra::group_algebra(&g);
        let rot = g
            .index_of(&Permutation::from_cycles(3, &[vec![0, 1, 2]]).unwrap())
            .unwrap();
        let rot_inv = g.inv_idx(rot);
        assert_ne!(rot, rot_inv);
        let x = a.basis(rot);
        assert_eq!(a.star(&x).unwrap(), a.basis(rot_inv));
        assert_eq!(a.star(&a.one()).unwrap(), a.one());
    }

    #[test]
    fn unit_is_neutral_and_averaging_elements_are_idempotent() {
        let g = sym(3);
        let a = Algebra::group_algebra(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_element(&a, &mut rng);
        assert_eq!(a.one().mul(&x).unwrap(), x);
        assert_eq!(x.mul(&a.one()).unwrap(), x);

        for u in g.cyclic_subgroup_classes() {
            let e = a.averaging_idempotent(&u).unwrap();
            assert!(e.is_idempotent().unwrap());
        }
        // a non-identity basis element is never idempotent
        assert!(!a.basis(1).is_idempotent().unwrap());
        assert!(a.zero().is_idempotent().unwrap());
        assert!(a.one().is_idempotent().unwrap());
    }

    #[test]
    fn trace_is_order_times_identity_coefficient() {
        let g = sym(3);
        let a = Algebra::group_algebra(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_element(&a, &mut rng);
        assert_eq!(a.trace(&x), x.coords()[0].clone() * rat_int(6));
        assert_eq!(a.trace(&a.one()), rat_int(6));

        // cross-check the group-algebra shortcut against the explicit
        // left-multiplication trace
        let mut explicit = Rat::zero();
        for j in 0..a.dim() {
            explicit += x.mul(&a.basis(j)).unwrap().coords()[j].clone();
        }
        assert_eq!(a.trace(&x), explicit);
    }

    #[test]
    fn upper_triangular_trace_and_involution() {
        let a = Algebra::upper_triangular2();
        // x = a E11 + b E12 + d E22 has left-multiplication trace 2a + d
        let x = a
            .from_coords(vec![rat_int(4), rat_int(9), rat_int(-1)])
            .unwrap();
        assert_eq!(a.trace(&x), rat_int(7));

        // the involution breaks trace symmetry at E11
        let e11 = a.basis(0);
        assert_eq!(a.trace(&e11), rat_int(2));
        assert_eq!(a.trace(&a.star(&e11).unwrap()), rat_int(1));
    }

    #[test]
    fn group_algebra_traces_are_star_symmetric() {
        for spec in [GroupSpec::Sym(3), GroupSpec::Quat8, GroupSpec::Dihedral(4)] {
            let g = make_named_group(&spec, 1000).unwrap();
            let a = Algebra::group_algebra(&g);
            for i in 0..a.dim() {
                let b = a.basis(i);
                assert_eq!(a.trace(&b), a.trace(&a.star(&b).unwrap()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            for _ in 0..10 {
                let x = random_element(&a, &mut rng);
                assert_eq!(a.trace(&x), a.trace(&a.star(&x).unwrap()));
            }
        }
    }

    #[test]
    fn involution_laws_hold_on_random_elements() {
        let a = Algebra::group_algebra(&sym(3));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let x = random_element(&a, &mut rng);
            let y = random_element(&a, &mut rng);
            let lhs = a.star(&x.mul(&y).unwrap()).unwrap();
            let rhs = a.star(&y).unwrap().mul(&a.star(&x).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            assert_eq!(a.star(&a.star(&x).unwrap()).unwrap(), x);
        }
    }

    #[test]
    fn trace_form_examples() {
        let g = sym(3);
        let a = Algebra::group_algebra(&g);
        assert_eq!(a.trace_form(&a.one(), &a.one()).unwrap(), rat_int(6));

        // phi(x, x) = |G| * sum of squared coefficients
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = random_element(&a, &mut rng);
        let expected: Rat = x.coords().iter().map(|c| c * c).sum::<Rat>() * rat_int(6);
        assert_eq!(a.trace_form(&x, &x).unwrap(), expected);

        // split quaternions are isotropic: phi(E11, E11) = 0
        let sq = Algebra::split_quaternion();
        let e11 = sq.basis(0);
        assert_eq!(sq.trace_form(&e11, &e11).unwrap(), Rat::zero());
    }

    #[test]
    fn star_form_is_anisotropic_on_group_algebras() {
        use num_traits::Signed;
        for spec in [GroupSpec::Sym(3), GroupSpec::Quat8] {
            let g = make_named_group(&spec, 1000).unwrap();
            let a = Algebra::group_algebra(&g);
            for i in 0..a.dim() {
                assert!(a
                    .trace_form(&a.basis(i), &a.basis(i))
                    .unwrap()
                    .is_positive());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(13);
            for _ in 0..10 {
                let x = random_element(&a, &mut rng);
                assert!(a.trace_form(&x, &x).unwrap().is_positive());
            }
        }
    }

    #[test]
    fn split_quaternion_star_moves_matrix_units() {
        let a = Algebra::split_quaternion();
        assert_eq!(a.star(&a.basis(0)).unwrap(), a.basis(3));
        assert_eq!(a.star(&a.basis(3)).unwrap(), a.basis(0));
        assert_eq!(a.star(&a.basis(1)).unwrap(), a.basis(1).scale(&rat_int(-1)));
    }

    #[test]
    fn left_ideal_dimensions() {
        let g = sym(3);
        let a = Algebra::group_algebra(&g);
        assert_eq!(a.left_ideal_basis(&[a.one()]).unwrap().len(), 6);
        assert_eq!(a.left_ideal_basis(&[]).unwrap().len(), 0);

        let whole = a.averaging_idempotent(&Subgroup::whole(&g)).unwrap();
        assert_eq!(a.left_ideal_basis(&[whole]).unwrap().len(), 1);

        let t = g
            .index_of(&Permutation::from_cycles(3, &[vec![0, 1]]).unwrap())
            .unwrap();
        let e_u = a.averaging_idempotent(&Subgroup::cyclic(&g, t)).unwrap();
        assert_eq!(a.left_ideal_basis(&[e_u]).unwrap().len(), 3);
    }

    #[test]
    fn left_and_right_ideals_of_one_element_have_equal_dimension() {
        let a = Algebra::group_algebra(&sym(3));
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let x = random_element(&a, &mut rng);
            let left = a.left_ideal_basis(std::slice::from_ref(&x)).unwrap().len();
            assert_eq!(left, a.right_ideal_dim(&x));
        }
    }

    #[test]
    fn orthogonal_complement_matches_the_star_formula() {
        let g = make_named_group(&GroupSpec::Quat8, 100).unwrap();
        let a = Algebra::group_algebra(&g);
        // whole algebra and zero ideal
        let all: Vec<AlgebraElement> = (0..a.dim()).map(|i| a.basis(i)).collect();
        assert!(a.orthogonal_complement(&all).unwrap().is_empty());
        assert_eq!(a.orthogonal_complement(&[]).unwrap().len(), a.dim());

        let mut sampler = IdempotentSampler::new(&g, 23);
        for _ in 0..8 {
            let e = sampler.next_idempotent();
            let ideal = a.left_ideal_basis(std::slice::from_ref(&e)).unwrap();
            let perp = a.orthogonal_complement(&ideal).unwrap();
            let expected_gen = a.one().sub(&a.star(&e).unwrap());
            let expected = a
                .left_ideal_basis(std::slice::from_ref(&expected_gen))
                .unwrap();
            assert_eq!(
                coords_matrix(&perp).row_space_basis(),
                coords_matrix(&expected).row_space_basis()
            );
        }
    }

    #[test]
    fn complement_identity_holds_even_without_anisotropy() {
        // the split-quaternion form is non-degenerate but isotropic: the
        // complement of A*E11 is A*(1 - iota(E11)) = A*E11 itself, so the
        // identity holds while the direct sum fails
        let a = Algebra::split_quaternion();
        let e11 = a.basis(0);
        let ideal = a.left_ideal_basis(std::slice::from_ref(&e11)).unwrap();
        assert_eq!(ideal.len(), 2);
        let perp = a.orthogonal_complement(&ideal).unwrap();
        let expected_gen = a.one().sub(&a.star(&e11).unwrap());
        let expected = a
            .left_ideal_basis(std::slice::from_ref(&expected_gen))
            .unwrap();
        assert_eq!(
            coords_matrix(&perp).row_space_basis(),
            coords_matrix(&expected).row_space_basis()
        );
        assert_eq!(
            coords_matrix(&perp).row_space_basis(),
            coords_matrix(&ideal).row_space_basis()
        );
    }

    #[test]
    fn degenerate_trace_forms_are_rejected() {
        // E12 pairs to zero with everything in the upper-triangular
        // algebra, so complement computations must fail loudly
        let a = Algebra::upper_triangular2();
        let e12 = a.basis(1);
        for i in 0..a.dim() {
            assert_eq!(a.trace_form(&e12, &a.basis(i)).unwrap(), Rat::zero());
            assert_eq!(a.trace_form(&a.basis(i), &e12).unwrap(), Rat::zero());
        }
        assert!(matches!(
            a.orthogonal_complement(&[a.basis(0)]),
            Err(Error::DegenerateForm)
        ));
    }

    #[test]
    fn star_decomposition_succeeds_on_group_algebra_idempotents() {
        let g = sym(3);
        let a = Algebra::group_algebra(&g);
        let report = a.check_star_decomposition(&a.zero()).unwrap();
        assert!(report.direct_sum);
        assert_eq!(report.dim_left_ideal, 0);
        assert_eq!(report.dim_complement_ideal, 6);

        let mut sampler = IdempotentSampler::new(&g, 29);
        for _ in 0..10 {
            let e = sampler.next_idempotent();
            let report = a.check_star_decomposition(&e).unwrap();
            assert!(report.direct_sum, "failed on {e:?}");
            assert_eq!(report.dim_sum, 6);
            assert_eq!(report.dim_intersection, 0);
        }

        assert!(matches!(
            a.check_star_decomposition(&a.basis(1)),
            Err(Error::NotIdempotent)
        ));
    }

    #[test]
    fn split_quaternion_is_the_counterexample() {
        let a = Algebra::split_quaternion();
        let e11 = a.basis(0);
        assert!(e11.is_idempotent().unwrap());
        let report = a.check_star_decomposition(&e11).unwrap();
        assert!(!report.direct_sum);
        assert_eq!(report.dim_left_ideal, 2);
        assert_eq!(report.dim_complement_ideal, 2);
        assert_eq!(report.dim_sum, 2);
        assert_eq!(report.dim_intersection, 2);
    }

    #[test]
    fn idempotent_generating_recovers_ideals() {
        let g = sym(3);
        let a = Algebra::group_algebra(&g);
        assert_eq!(a.idempotent_generating(&[]).unwrap(), a.zero());

        let all: Vec<AlgebraElement> = (0..a.dim()).map(|i| a.basis(i)).collect();
        let whole_basis = a.left_ideal_basis(&all).unwrap();
        assert_eq!(a.idempotent_generating(&whole_basis).unwrap(), a.one());

        let mut sampler = IdempotentSampler::new(&g, 31);
        for _ in 0..8 {
            let e = sampler.next_idempotent();
            let ideal = a.left_ideal_basis(std::slice::from_ref(&e)).unwrap();
            let f = a.idempotent_generating(&ideal).unwrap();
            assert!(f.is_idempotent().unwrap());
            let regenerated = a.left_ideal_basis(std::slice::from_ref(&f)).unwrap();
            assert_eq!(
                coords_matrix(&ideal).row_space_basis(),
                coords_matrix(&regenerated).row_space_basis()
            );
        }
    }

    #[test]
    fn surgery_plan_for_the_zero_idempotent() {
        let a = Algebra::group_algebra(&sym(3));
        let plan = SurgeryPlan::new(&a.zero()).unwrap();
        assert_eq!(plan.denominator, BigInt::one());
        assert_eq!(plan.winding_numbers[0], BigInt::one());
        assert!(plan.winding_numbers[1..].iter().all(|n| n.is_zero()));
        assert!(plan.reconstructs_complement());
        assert!(plan.note.is_some());
    }

    #[test]
    fn surgery_plan_for_the_whole_group_averaging_idempotent() {
        let g = sym(3);
        let a = Algebra::group_algebra(&g);
        let e = a.averaging_idempotent(&Subgroup::whole(&g)).unwrap();
        let plan = SurgeryPlan::new(&e).unwrap();
        assert_eq!(plan.denominator, BigInt::from(6));
        assert_eq!(plan.winding_numbers[0], BigInt::from(5));
        assert!(plan.winding_numbers[1..]
            .iter()
            .all(|n| *n == BigInt::from(-1)));
        assert!(plan.reconstructs_complement());
        assert!(plan.note.is_none());

        // the ledger tracks the net added module
        let net = plan.ledger.last().unwrap();
        let chi = net.character.as_ref().unwrap();
        // Q[G]e* for the full averaging idempotent is the trivial module
        assert!(chi.values().iter().all(|v| *v == Rat::one()));
    }

    #[test]
    fn surgery_plan_rejects_the_identity() {
        let a = Algebra::group_algebra(&sym(3));
        assert!(matches!(
            SurgeryPlan::new(&a.one()),
            Err(Error::IdentityIdempotent)
        ));
    }

    #[test]
    fn surgery_plan_windings_are_coprime_for_random_idempotents() {
        let g = make_named_group(&GroupSpec::Dihedral(4), 100).unwrap();
        let a = Algebra::group_algebra(&g);
        let mut sampler = IdempotentSampler::new(&g, 37);
        let mut seen = 0;
        while seen < 8 {
            let e = sampler.next_idempotent();
            if e == a.one() {
                continue;
            }
            seen += 1;
            let plan = SurgeryPlan::new(&e).unwrap();
            let mut content = BigInt::zero();
            for n in &plan.winding_numbers {
                content = content.gcd(n);
            }
            assert_eq!(content, BigInt::one());
            assert!(plan.reconstructs_complement());
        }
    }

    #[test]
    fn filling_span_holds_for_group_algebra_idempotents() {
        for spec in [GroupSpec::Sym(3), GroupSpec::Quat8] {
            let g = make_named_group(&spec, 1000).unwrap();
            let a = Algebra::group_algebra(&g);
            assert!(check_filling_span(&a.zero()).unwrap());
            assert!(check_filling_span(&a.one()).unwrap());
            let mut sampler = IdempotentSampler::new(&g, 41);
            for _ in 0..5 {
                let e = sampler.next_idempotent();
                assert!(check_filling_span(&e).unwrap());
            }
        }
    }

    #[test]
    fn split_idempotent_produces_orthogonal_pairs() {
        let g = sym(3);
        let a = Algebra::group_algebra(&g);
        let zero = a.zero();
        // split the identity along the ideal of a transposition average
        let t = g
            .index_of(&Permutation::from_cycles(3, &[vec![0, 1]]).unwrap())
            .unwrap();
        let e_u = a.averaging_idempotent(&Subgroup::cyclic(&g, t)).unwrap();
        let sub = a.left_ideal_basis(std::slice::from_ref(&e_u)).unwrap();
        let (e1, e2) = a.split_idempotent(&a.one(), &sub).unwrap();
        assert_eq!(e1.add(&e2), a.one());
        assert_eq!(e1.mul(&e2).unwrap(), zero);
        assert_eq!(e2.mul(&e1).unwrap(), zero);
        assert!(e1.is_idempotent().unwrap() && e2.is_idempotent().unwrap());
    }

    #[test]
    fn surgery_ledger_for_the_gl2_ideal_ends_in_the_module_character() {
        let i3 = crate::repmod::module_ip(3, 2_000_000).unwrap();
        let ideal = crate::repmod::embed_in_group_algebra(&i3).unwrap();
        let algebra = ideal[0].algebra().clone();
        let e = algebra.idempotent_generating(&ideal).unwrap();
        let plan = SurgeryPlan::new(&e).unwrap();
        let net = plan.ledger.last().unwrap();
        assert_eq!(net.character.as_ref().unwrap(), &i3.character());
        assert!(plan.reconstructs_complement());
    }

    #[test]
    fn table_axioms_reject_bad_input() {
        // a 1-dimensional "algebra" whose unit is wrong
        let bad = Algebra::from_table("bad", 1, vec![rat_int(2)], vec![rat_int(1)], None);
        assert!(bad.is_err());
    }
}
