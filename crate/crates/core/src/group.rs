//! Finite permutation groups with fully materialized element lists.
//!
//! Element order is frozen at construction: breadth-first closure from the
//! generators for generated groups, and the mixed-radix cartesian order for
//! direct products. Every derived object (cosets, classes, quotients)
//! inherits its order from this list, so all downstream indices are
//! deterministic across runs.

use crate::error::{Error, Result};
use crate::perm::Permutation;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

pub const DEFAULT_MAX_GROUP_ORDER: u64 = 2_000_000;

/// Builds multiplication tables lazily for groups up to this order.
const MUL_TABLE_LIMIT: usize = 4096;

#[derive(Clone)]
pub struct PermGroup {
    inner: Arc<GroupInner>,
}

struct GroupInner {
    name: String,
    degree: usize,
    /// Element indices of the generators.
    generators: Vec<usize>,
    elements: Vec<Permutation>,
    index: Option<HashMap<Permutation, usize>>,
    inverses: Vec<usize>,
    /// For i > 0: elements\[i\] = elements[word_tree\[i\].0] * elements[generators[word_tree\[i\].1]].
    word_tree: Vec<(usize, usize)>,
    kind: GroupKind,
    classes: OnceLock<Classes>,
    mul_table: OnceLock<Vec<u32>>,
}

pub(crate) struct Classes {
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
}

#[derive(Clone)]
pub(crate) enum GroupKind {
    Generic,
    Gl2 { p: u64 },
    Aff8,
    Product(ProductData),
}

#[derive(Clone)]
pub(crate) struct ProductData {
    pub factors: Vec<PermGroup>,
    pub point_offsets: Vec<usize>,
    /// stride\[f\] = product of the orders of the factors after f.
    pub strides: Vec<usize>,
}

impl PermGroup {
    /// Close a generating set by breadth-first search.
    pub fn from_generators(
        degree: usize,
        gens: Vec<Permutation>,
        name: impl Into<String>,
        cap: u64,
    ) -> Result<PermGroup> {
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::Internal(format!(
                    "generator degree {} does not match group degree {degree}",
                    g.degree()
                )));
            }
        }
        let mut elements = vec![Permutation::identity(degree)];
        let mut index: HashMap<Permutation, usize> = HashMap::new();
        index.insert(elements[0].clone(), 0);
        let mut word_tree = vec![(0usize, usize::MAX)];
        let mut gen_indices = Vec::with_capacity(gens.len());

        // seed the generators as children of the identity
        let mut head = 0usize;
        for (gi, g) in gens.iter().enumerate() {
            if let Some(&existing) = index.get(g) {
                gen_indices.push(existing);
                continue;
            }
            elements.push(g.clone());
            index.insert(g.clone(), elements.len() - 1);
            word_tree.push((0, gi));
            gen_indices.push(elements.len() - 1);
        }
        while head < elements.len() {
            let current = elements[head].clone();
            for (gi, g) in gens.iter().enumerate() {
                let product = current.compose(g);
                if let std::collections::hash_map::Entry::Vacant(slot) =
                    index.entry(product.clone())
                {
                    if elements.len() as u64 + 1 > cap {
                        return Err(Error::OrderCapExceeded {
                            order: elements.len() as u128 + 1,
                            cap: cap as u128,
                        });
                    }
                    elements.push(product);
                    slot.insert(elements.len() - 1);
                    word_tree.push((head, gi));
                }
            }
            head += 1;
        }

        let inverses = elements.iter().map(|e| index[&e.inverse()]).collect();

        Ok(PermGroup {
            inner: Arc::new(GroupInner {
                name: name.into(),
                degree,
                generators: gen_indices,
                elements,
                index: Some(index),
                inverses,
                word_tree,
                kind: GroupKind::Generic,
                classes: OnceLock::new(),
                mul_table: OnceLock::new(),
            }),
        })
    }

    pub(crate) fn with_kind(self, kind: GroupKind) -> PermGroup {
        let inner = Arc::try_unwrap(self.inner).unwrap_or_else(|arc| GroupInner {
            name: arc.name.clone(),
            degree: arc.degree,
            generators: arc.generators.clone(),
            elements: arc.elements.clone(),
            index: arc.index.clone(),
            inverses: arc.inverses.clone(),
            word_tree: arc.word_tree.clone(),
            kind: arc.kind.clone(),
            classes: OnceLock::new(),
            mul_table: OnceLock::new(),
        });
        PermGroup {
            inner: Arc::new(GroupInner { kind, ..inner }),
        }
    }

    /// Direct product acting on the disjoint union of the factors' points.
    /// The element list is the cartesian product of the factors' lists in
    /// mixed-radix order, first factor most significant.
    pub fn direct_product(factors: &[PermGroup], cap: u64) -> Result<PermGroup> {
        assert!(!factors.is_empty(), "empty product");
        if factors.len() == 1 {
            return Ok(factors[0].clone());
        }
        let mut order: u128 = 1;
        for f in factors {
            order *= f.order() as u128;
        }
        if order > cap as u128 {
            return Err(Error::OrderCapExceeded {
                order,
                cap: cap as u128,
            });
        }
        let order = order as usize;

        let mut point_offsets = Vec::with_capacity(factors.len());
        let mut degree = 0usize;
        for f in factors {
            point_offsets.push(degree);
            degree += f.degree();
        }
        let mut strides = vec![1usize; factors.len()];
        for f in (0..factors.len() - 1).rev() {
            strides[f] = strides[f + 1] * factors[f + 1].order();
        }
        let data = ProductData {
            factors: factors.to_vec(),
            point_offsets,
            strides,
        };

        // materialize all elements in cartesian order
        let mut elements = Vec::with_capacity(order);
        for idx in 0..order {
            let mut images = vec![0u16; degree];
            for (f, factor) in factors.iter().enumerate() {
                let digit = (idx / data.strides[f]) % factor.order();
                let off = data.point_offsets[f] as u16;
                let p = factor.element(digit);
                for (pt, &img) in p.images().iter().enumerate() {
                    images[data.point_offsets[f] + pt] = img + off;
                }
            }
            elements.push(Permutation::from_images(images)?);
        }

        // inverses componentwise
        let inverses: Vec<usize> = (0..order)
            .map(|idx| {
                let mut out = 0usize;
                for (f, factor) in factors.iter().enumerate() {
                    let digit = (idx / data.strides[f]) % factor.order();
                    out += factor.inv_idx(digit) * data.strides[f];
                }
                out
            })
            .collect();

        // generators: embedded factor generators, in factor order
        let mut generators = Vec::new();
        for (f, factor) in factors.iter().enumerate() {
            for &g in factor.generator_indices() {
                generators.push(g * data.strides[f]);
            }
        }

        // spanning word tree over the fixed cartesian order, via BFS
        let mul = |i: usize, j: usize| -> usize {
            let mut out = 0usize;
            for (f, factor) in factors.iter().enumerate() {
                let a = (i / data.strides[f]) % factor.order();
                let b = (j / data.strides[f]) % factor.order();
                out += factor.mul_idx(a, b) * data.strides[f];
            }
            out
        };
        let mut word_tree = vec![(usize::MAX, usize::MAX); order];
        word_tree[0] = (0, usize::MAX);
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(0usize);
        let mut seen = vec![false; order];
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for (gi, &g) in generators.iter().enumerate() {
                let j = mul(i, g);
                if !seen[j] {
                    seen[j] = true;
                    word_tree[j] = (i, gi);
                    queue.push_back(j);
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::Internal(
                "product generators do not generate the product".into(),
            ));
        }

        let name = factors
            .iter()
            .map(|f| f.name().to_string())
            .collect::<Vec<_>>()
            .join(" x ");

        Ok(PermGroup {
            inner: Arc::new(GroupInner {
                name,
                degree,
                generators,
                elements,
                index: None,
                inverses,
                word_tree,
                kind: GroupKind::Product(data),
                classes: OnceLock::new(),
                mul_table: OnceLock::new(),
            }),
        })
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn degree(&self) -> usize {
        self.inner.degree
    }

    pub fn order(&self) -> usize {
        self.inner.elements.len()
    }

    pub fn element(&self, idx: usize) -> &Permutation {
        &self.inner.elements[idx]
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.inner.elements
    }

    pub fn generator_indices(&self) -> &[usize] {
        &self.inner.generators
    }

    /// (parent, generator position) with element = parent * generator;
    /// `None` for the identity.
    pub fn word_step(&self, idx: usize) -> Option<(usize, usize)> {
        if idx == 0 {
            None
        } else {
            Some(self.inner.word_tree[idx])
        }
    }

    pub fn same_group(&self, other: &PermGroup) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    pub(crate) fn kind(&self) -> &GroupKind {
        &self.inner.kind
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        if p.degree() != self.degree() {
            return None;
        }
        match (&self.inner.index, &self.inner.kind) {
            (Some(map), _) => map.get(p).copied(),
            (None, GroupKind::Product(data)) => {
                let mut idx = 0usize;
                for (f, factor) in data.factors.iter().enumerate() {
                    let off = data.point_offsets[f];
                    let deg = factor.degree();
                    let mut images = Vec::with_capacity(deg);
                    for pt in 0..deg {
                        let img = p.apply(off + pt);
                        if img < off || img >= off + deg {
                            return None;
                        }
                        images.push((img - off) as u16);
                    }
                    let fp = Permutation::from_images(images).ok()?;
                    idx += factor.index_of(&fp)? * data.strides[f];
                }
                Some(idx)
            }
            (None, _) => unreachable!("non-product groups always carry an index"),
        }
    }

    pub fn mul_idx(&self, a: usize, b: usize) -> usize {
        if let Some(table) = self.inner.mul_table.get() {
            return table[a * self.order() + b] as usize;
        }
        if self.order() <= MUL_TABLE_LIMIT {
            let table = self.build_mul_table();
            let r = table[a * self.order() + b] as usize;
            let _ = self.inner.mul_table.set(table);
            return r;
        }
        self.mul_idx_uncached(a, b)
    }

    fn mul_idx_uncached(&self, a: usize, b: usize) -> usize {
        match &self.inner.kind {
            GroupKind::Product(data) => {
                let mut out = 0usize;
                for (f, factor) in data.factors.iter().enumerate() {
                    let x = (a / data.strides[f]) % factor.order();
                    let y = (b / data.strides[f]) % factor.order();
                    out += factor.mul_idx(x, y) * data.strides[f];
                }
                out
            }
            _ => {
                let p = self.inner.elements[a].compose(&self.inner.elements[b]);
                *self
                    .inner
                    .index
                    .as_ref()
                    .expect("indexed group")
                    .get(&p)
                    .expect("closure")
            }
        }
    }

    fn build_mul_table(&self) -> Vec<u32> {
        let n = self.order();
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = self.mul_idx_uncached(a, b) as u32;
            }
        }
        table
    }

    pub fn inv_idx(&self, a: usize) -> usize {
        self.inner.inverses[a]
    }

    /// g x g^{-1}
    pub fn conj_idx(&self, g: usize, x: usize) -> usize {
        self.mul_idx(self.mul_idx(g, x), self.inv_idx(g))
    }

    pub fn element_order(&self, idx: usize) -> usize {
        let mut n = 1;
        let mut x = idx;
        while x != 0 {
            x = self.mul_idx(x, idx);
            n += 1;
        }
        n
    }

    /// Conjugacy classes as sorted index sets, ordered by minimal element.
    pub fn conjugacy_classes(&self) -> &[Vec<usize>] {
        &self.classes().classes
    }

    pub fn class_of(&self, idx: usize) -> usize {
        self.classes().class_of[idx]
    }

    pub fn class_representatives(&self) -> Vec<usize> {
        self.conjugacy_classes().iter().map(|c| c[0]).collect()
    }

    fn classes(&self) -> &Classes {
        self.inner.classes.get_or_init(|| {
            let n = self.order();
            let mut class_of = vec![usize::MAX; n];
            let mut classes = Vec::new();
            // closing each orbit under conjugation by the generators
            // suffices: conjugation by a word is the composite of
            // conjugations by its letters
            for start in 0..n {
                if class_of[start] != usize::MAX {
                    continue;
                }
                let id = classes.len();
                let mut orbit = vec![start];
                class_of[start] = id;
                let mut stack = vec![start];
                while let Some(x) = stack.pop() {
                    for &g in &self.inner.generators {
                        let y = self.conj_idx(g, x);
                        if class_of[y] == usize::MAX {
                            class_of[y] = id;
                            orbit.push(y);
                            stack.push(y);
                        }
                    }
                }
                orbit.sort_unstable();
                classes.push(orbit);
            }
            Classes { classes, class_of }
        })
    }

    /// One representative per conjugacy class of cyclic subgroups. The
    /// representative of each class is the member with the lexicographically
    /// minimal sorted index sequence, and the classes are listed in that
    /// order too.
    pub fn cyclic_subgroup_classes(&self) -> Vec<Subgroup> {
        let n = self.order();
        // distinct cyclic subgroups, and for each element the id of <g>
        let mut sub_ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut subs: Vec<Vec<usize>> = Vec::new();
        let mut sub_of_element = vec![usize::MAX; n];
        for g in 0..n {
            if sub_of_element[g] != usize::MAX {
                continue;
            }
            let mut members = vec![0usize];
            let mut x = g;
            while x != 0 {
                members.push(x);
                x = self.mul_idx(x, g);
            }
            members.sort_unstable();
            let id = *sub_ids.entry(members.clone()).or_insert_with(|| {
                subs.push(members.clone());
                subs.len() - 1
            });
            // every generator of the same subgroup maps to the same id
            for &m in &members {
                if self.cyclic_members(m) == members {
                    sub_of_element[m] = id;
                }
            }
            sub_of_element[g] = id;
        }
        for (g, slot) in sub_of_element.iter_mut().enumerate() {
            if *slot == usize::MAX {
                *slot = sub_ids[&self.cyclic_members(g)];
            }
        }

        // merge conjugate subgroups: <h g h^{-1}> = h <g> h^{-1}
        let mut class_of_sub = vec![usize::MAX; subs.len()];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for s in 0..subs.len() {
            if class_of_sub[s] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let generator = subs[s]
                .iter()
                .copied()
                .find(|&m| self.cyclic_members(m) == subs[s])
                .expect("cyclic subgroup has a generator");
            let mut members_of_class = Vec::new();
            for h in 0..n {
                let t = sub_of_element[self.conj_idx(h, generator)];
                if class_of_sub[t] == usize::MAX {
                    class_of_sub[t] = id;
                    members_of_class.push(t);
                }
            }
            classes.push(members_of_class);
        }

        let mut reps: Vec<Vec<usize>> = classes
            .iter()
            .map(|ids| ids.iter().map(|&t| subs[t].clone()).min().unwrap())
            .collect();
        reps.sort();
        reps.into_iter()
            .map(|members| Subgroup::from_members_unchecked(self.clone(), members, "cyclic"))
            .collect()
    }

    fn cyclic_members(&self, g: usize) -> Vec<usize> {
        let mut members = vec![0usize];
        let mut x = g;
        while x != 0 {
            members.push(x);
            x = self.mul_idx(x, g);
        }
        members.sort_unstable();
        members
    }

    /// Product-group projection onto one factor, as a quotient map whose
    /// kernel is the embedded product of the other factors.
    pub fn factor_projection(&self, factor: usize) -> Result<QuotientMap> {
        let GroupKind::Product(data) = &self.inner.kind else {
            return Err(Error::Internal("not a direct product".into()));
        };
        let target = data.factors[factor].clone();
        let stride = data.strides[factor];
        let ord = target.order();
        let map: Vec<usize> = (0..self.order()).map(|i| (i / stride) % ord).collect();
        let kernel_members: Vec<usize> = (0..self.order())
            .filter(|&i| (i / stride) % ord == 0)
            .collect();
        let kernel = Subgroup::from_members_unchecked(self.clone(), kernel_members, "kernel");
        Ok(QuotientMap {
            source: self.clone(),
            target,
            map: Arc::new(map),
            kernel,
        })
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PermGroup({}, order {}, degree {})",
            self.name(),
            self.order(),
            self.degree()
        )
    }
}

/// A subgroup given by its sorted member-index set.
#[derive(Clone)]
pub struct Subgroup {
    group: PermGroup,
    members: Arc<Vec<usize>>,
    name: String,
}

impl Subgroup {
    /// Verifies closure under products and inverses.
    pub fn from_members(
        group: PermGroup,
        mut members: Vec<usize>,
        name: impl Into<String>,
    ) -> Result<Subgroup> {
        members.sort_unstable();
        members.dedup();
        if members.binary_search(&0).is_err() {
            return Err(Error::Internal("subgroup misses the identity".into()));
        }
        for &a in &members {
            if a >= group.order() {
                return Err(Error::Internal(format!("member {a} out of range")));
            }
            if members.binary_search(&group.inv_idx(a)).is_err() {
                return Err(Error::Internal("subgroup not closed under inverse".into()));
            }
            for &b in &members {
                if members.binary_search(&group.mul_idx(a, b)).is_err() {
                    return Err(Error::Internal("subgroup not closed under product".into()));
                }
            }
        }
        Ok(Subgroup {
            group,
            members: Arc::new(members),
            name: name.into(),
        })
    }

    pub(crate) fn from_members_unchecked(
        group: PermGroup,
        mut members: Vec<usize>,
        name: impl Into<String>,
    ) -> Subgroup {
        members.sort_unstable();
        members.dedup();
        Subgroup {
            group,
            members: Arc::new(members),
            name: name.into(),
        }
    }

    /// Close a set of element indices into a subgroup.
    pub fn generated_by(group: &PermGroup, gens: &[usize], name: impl Into<String>) -> Subgroup {
        let mut members = vec![0usize];
        let mut seen = std::collections::HashSet::new();
        seen.insert(0usize);
        let mut stack: Vec<usize> = Vec::new();
        for &g in gens {
            if seen.insert(g) {
                members.push(g);
                stack.push(g);
            }
        }
        let mut head = 0;
        while head < members.len() {
            let x = members[head];
            head += 1;
            for &g in gens {
                for y in [group.mul_idx(x, g), group.mul_idx(g, x)] {
                    if seen.insert(y) {
                        members.push(y);
                    }
                }
            }
        }
        Subgroup::from_members_unchecked(group.clone(), members, name)
    }

    pub fn trivial(group: &PermGroup) -> Subgroup {
        Subgroup::from_members_unchecked(group.clone(), vec![0], "1")
    }

    pub fn whole(group: &PermGroup) -> Subgroup {
        let members = (0..group.order()).collect();
        Subgroup::from_members_unchecked(group.clone(), members, "G")
    }

    pub fn cyclic(group: &PermGroup, g: usize) -> Subgroup {
        let members = group.cyclic_members(g);
        Subgroup::from_members_unchecked(group.clone(), members, format!("<{}>", group.element(g)))
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn index_in_group(&self) -> usize {
        self.group.order() / self.order()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Subgroup {
        self.name = name.into();
        self
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.members.binary_search(&idx).is_ok()
    }

    pub fn same_members(&self, other: &Subgroup) -> bool {
        self.group.same_group(&other.group) && self.members == other.members
    }

    pub fn conjugate_by(&self, g: usize) -> Subgroup {
        let members = self
            .members
            .iter()
            .map(|&m| self.group.conj_idx(g, m))
            .collect();
        Subgroup::from_members_unchecked(self.group.clone(), members, format!("{}^conj", self.name))
    }

    pub fn is_normal(&self) -> bool {
        self.group.generator_indices().iter().all(|&g| {
            self.members
                .iter()
                .all(|&m| self.contains(self.group.conj_idx(g, m)))
        })
    }

    pub fn is_cyclic(&self) -> bool {
        self.members
            .iter()
            .any(|&m| self.group.element_order(m) == self.order())
    }

    /// Left cosets gU, partitioning the parent group. Coset 0 is U itself;
    /// the sweep over the frozen element order makes block order and
    /// representatives deterministic.
    pub fn left_cosets(&self) -> Cosets {
        let n = self.group.order();
        let mut coset_of = vec![usize::MAX; n];
        let mut blocks = Vec::new();
        let mut reps = Vec::new();
        for g in 0..n {
            if coset_of[g] != usize::MAX {
                continue;
            }
            let id = blocks.len();
            let mut block: Vec<usize> = self
                .members
                .iter()
                .map(|&u| self.group.mul_idx(g, u))
                .collect();
            block.sort_unstable();
            for &x in &block {
                coset_of[x] = id;
            }
            reps.push(g);
            blocks.push(block);
        }
        Cosets {
            subgroup: self.clone(),
            blocks,
            coset_of,
            reps,
        }
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subgroup({} <= {}, order {})",
            self.name,
            self.group.name(),
            self.order()
        )
    }
}

/// A left-coset partition of a group.
pub struct Cosets {
    pub subgroup: Subgroup,
    pub blocks: Vec<Vec<usize>>,
    /// element index -> coset id
    pub coset_of: Vec<usize>,
    /// minimal element of each coset, in block order
    pub reps: Vec<usize>,
}

impl Cosets {
    pub fn count(&self) -> usize {
        self.blocks.len()
    }

    pub fn group(&self) -> &PermGroup {
        self.subgroup.group()
    }

    /// The id of the coset g * (coset c).
    pub fn act(&self, g: usize, c: usize) -> usize {
        self.coset_of[self.group().mul_idx(g, self.reps[c])]
    }
}

/// The subgroup of a direct product built from one subgroup per factor.
pub fn product_subgroup(product: &PermGroup, parts: &[Subgroup]) -> Result<Subgroup> {
    let GroupKind::Product(data) = product.kind() else {
        return Err(Error::Internal("not a direct product".into()));
    };
    if parts.len() != data.factors.len() {
        return Err(Error::DimensionMismatch {
            expected: data.factors.len(),
            got: parts.len(),
        });
    }
    for (part, factor) in parts.iter().zip(&data.factors) {
        if !part.group().same_group(factor) {
            return Err(Error::GroupMismatch);
        }
    }
    let mut members = vec![0usize];
    for (f, part) in parts.iter().enumerate() {
        let stride = data.strides[f];
        members = members
            .iter()
            .flat_map(|&base| part.members().iter().map(move |&m| base + m * stride))
            .collect();
    }
    let name = parts
        .iter()
        .map(|p| p.name().to_string())
        .collect::<Vec<_>>()
        .join(" x ");
    Ok(Subgroup::from_members_unchecked(
        product.clone(),
        members,
        name,
    ))
}

/// Double cosets U g V, as sorted index sets in deterministic order.
pub fn double_cosets(u: &Subgroup, v: &Subgroup) -> Result<Vec<Vec<usize>>> {
    if !u.group().same_group(v.group()) {
        return Err(Error::GroupMismatch);
    }
    let group = u.group();
    let n = group.order();
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for g in 0..n {
        if assigned[g] {
            continue;
        }
        let mut block = Vec::new();
        for &a in u.members() {
            let ag = group.mul_idx(a, g);
            for &b in v.members() {
                let x = group.mul_idx(ag, b);
                if !assigned[x] {
                    assigned[x] = true;
                    block.push(x);
                }
            }
        }
        block.sort_unstable();
        out.push(block);
    }
    Ok(out)
}

/// True with a witness iff g U g^{-1} = V for some g.
pub fn are_conjugate_subgroups(u: &Subgroup, v: &Subgroup) -> Result<Option<usize>> {
    if !u.group().same_group(v.group()) {
        return Err(Error::GroupMismatch);
    }
    if u.order() != v.order() {
        return Ok(None);
    }
    let group = u.group();
    for g in 0..group.order() {
        if u.members()
            .iter()
            .all(|&m| v.contains(group.conj_idx(g, m)))
        {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// A surjection onto a quotient (or factor) group: element index in the
/// source maps to an element index in the target.
#[derive(Clone)]
pub struct QuotientMap {
    pub source: PermGroup,
    pub target: PermGroup,
    pub map: Arc<Vec<usize>>,
    pub kernel: Subgroup,
}

impl QuotientMap {
    pub fn apply(&self, idx: usize) -> usize {
        self.map[idx]
    }

    /// Image of a subgroup of the source in the target.
    pub fn image_subgroup(&self, u: &Subgroup) -> Result<Subgroup> {
        if !u.group().same_group(&self.source) {
            return Err(Error::GroupMismatch);
        }
        let members: Vec<usize> = u.members().iter().map(|&m| self.map[m]).collect();
        Ok(Subgroup::from_members_unchecked(
            self.target.clone(),
            members,
            format!("{}N/N", u.name()),
        ))
    }
}

/// The quotient G/N for normal N, realized as the permutation action on the
/// cosets of N. Faithful because N is the kernel of that action.
pub fn quotient_group(group: &PermGroup, n: &Subgroup) -> Result<QuotientMap> {
    if !n.group().same_group(group) {
        return Err(Error::GroupMismatch);
    }
    if !n.is_normal() {
        return Err(Error::NotNormal);
    }
    let cosets = n.left_cosets();
    let k = cosets.count();
    let coset_perm = |g: usize| -> Permutation {
        let images: Vec<u16> = (0..k).map(|c| cosets.act(g, c) as u16).collect();
        Permutation::from_images(images).expect("coset action is a bijection")
    };
    let gen_perms: Vec<Permutation> = group
        .generator_indices()
        .iter()
        .map(|&g| coset_perm(g))
        .collect();
    let target = PermGroup::from_generators(
        k,
        gen_perms,
        format!("{}/{}", group.name(), n.name()),
        k as u64,
    )?;
    if target.order() != k {
        return Err(Error::Internal(
            "coset action has the wrong order for a normal subgroup".into(),
        ));
    }
    let map: Vec<usize> = (0..group.order())
        .map(|g| {
            target
                .index_of(&coset_perm(g))
                .expect("coset permutation lies in the quotient")
        })
        .collect();
    Ok(QuotientMap {
        source: group.clone(),
        target,
        map: Arc::new(map),
        kernel: n.clone(),
    })
}
