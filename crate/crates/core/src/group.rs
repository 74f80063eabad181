//! Concrete finite p-groups given by permutation generators.
//!
//! A [`GroupTable`] enumerates every element of the group once, in
//! breadth-first order from the generators, so that elements can be
//! addressed by index. Everything downstream (conjugacy classes, power maps,
//! quotients, bisets) works on those indices.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::arith;

/// Default upper bound on the number of elements a closure may produce.
pub const DEFAULT_ELEMENT_CAP: usize = 20_000;

/// Groups up to this order get a cached multiplication table.
const CAYLEY_LIMIT: usize = 1024;

/// Largest elementary abelian rank for which subgroup lattices are enumerated.
pub const MAX_LATTICE_RANK: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("the group is not a p-group (found order {order})")]
    NotAPGroup { order: u64 },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("generators act on different numbers of points ({0} and {1})")]
    DegreeMismatch(usize, usize),
    #[error("closure exceeds the element cap of {cap}")]
    SizeLimit { cap: usize },
    #[error("groups are defined over different primes ({0} and {1})")]
    PrimeMismatch(u64, u64),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("element set is not a subgroup")]
    NotSubgroup,
    #[error("subgroup is not elementary abelian")]
    NotElementaryAbelian,
    #[error("elementary abelian rank {0} exceeds the supported limit {MAX_LATTICE_RANK}")]
    RankLimit(u32),
    #[error("invalid permutation: {0}")]
    BadPermutation(String),
}

/// A bijection of `{0, .., degree - 1}`.
///
/// Products read left to right: `a.compose(b)` applies `a` first, then `b`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, GroupError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(GroupError::BadPermutation(format!(
                    "images {images:?} do not form a bijection"
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation {
            images: images.into_iter().map(|i| i as u32).collect(),
        })
    }

    /// Builds a permutation from disjoint cycles of 0-based points.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self, GroupError> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a >= degree {
                    return Err(GroupError::BadPermutation(format!(
                        "point {} exceeds degree {degree}",
                        a + 1
                    )));
                }
                if touched[a] {
                    return Err(GroupError::BadPermutation(format!(
                        "point {} appears twice",
                        a + 1
                    )));
                }
                touched[a] = true;
                images[a] = cycle[(k + 1) % cycle.len()];
            }
        }
        Self::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: self
                .images
                .iter()
                .map(|&i| other.images[i as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j as usize] = i as u32;
        }
        Permutation { images }
    }

    /// Square-and-multiply power.
    pub fn pow(&self, mut e: u64) -> Permutation {
        let mut acc = Permutation::identity(self.degree());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base);
            }
        }
        acc
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut next = self.image(start);
            while next != start {
                seen[next] = true;
                cycle.push(next);
                next = self.image(next);
            }
            out.push(cycle);
        }
        out
    }

    /// Least common multiple of the cycle lengths.
    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .fold(1, |acc, c| arith::lcm(acc, c.len() as u64))
    }

    /// Acts on `degree + offset + extra` points, moving only `offset..offset + degree`.
    pub fn embed(&self, offset: usize, total: usize) -> Permutation {
        let mut images: Vec<u32> = (0..total as u32).collect();
        for (i, &j) in self.images.iter().enumerate() {
            images[offset + i] = offset as u32 + j;
        }
        Permutation { images }
    }
}

impl fmt::Display for Permutation {
    /// Disjoint-cycle notation with 1-based points; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for cycle in self.cycles().into_iter().filter(|c| c.len() > 1) {
            any = true;
            write!(f, "(")?;
            for (k, a) in cycle.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", a + 1)?;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Conjugacy-class partition of a group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassData {
    class_of: Vec<usize>,
    reps: Vec<usize>,
    sizes: Vec<usize>,
}

impl ClassData {
    pub fn class_of(&self, element: usize) -> usize {
        self.class_of[element]
    }

    /// Representative (the minimal element index) of class `c`.
    pub fn rep(&self, c: usize) -> usize {
        self.reps[c]
    }

    pub fn reps(&self) -> &[usize] {
        &self.reps
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn count(&self) -> usize {
        self.reps.len()
    }

    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.class_of.len())
            .filter(|&x| self.class_of[x] == c)
            .collect()
    }
}

/// A finite p-group with its elements enumerated.
pub struct GroupTable {
    degree: usize,
    elements: Vec<Permutation>,
    index_of: HashMap<Permutation, usize>,
    prime: Option<u64>,
    generators: Vec<usize>,
    inverses: OnceLock<Vec<usize>>,
    classes: OnceLock<ClassData>,
    cayley: OnceLock<Option<Vec<u32>>>,
}

impl fmt::Debug for GroupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupTable")
            .field("order", &self.order())
            .field("prime", &self.prime)
            .field("degree", &self.degree)
            .field("generators", &self.generators)
            .finish()
    }
}

impl Clone for GroupTable {
    fn clone(&self) -> Self {
        GroupTable {
            degree: self.degree,
            elements: self.elements.clone(),
            index_of: self.index_of.clone(),
            prime: self.prime,
            generators: self.generators.clone(),
            inverses: OnceLock::new(),
            classes: OnceLock::new(),
            cayley: OnceLock::new(),
        }
    }
}

/// Closure of `gens` under composition, for a known prime `p`.
pub fn close_generators(gens: &[Permutation], p: u64) -> Result<GroupTable, GroupError> {
    GroupTable::close(gens, Some(p), DEFAULT_ELEMENT_CAP)
}

impl GroupTable {
    /// Closes `gens` under composition.
    ///
    /// With `prime = None` the prime is inferred from the order; a trivial
    /// closure then carries no prime.
    pub fn close(
        gens: &[Permutation],
        prime: Option<u64>,
        cap: usize,
    ) -> Result<GroupTable, GroupError> {
        let degree = gens.first().map_or(0, Permutation::degree);
        Self::close_on(degree, gens, prime, cap)
    }

    /// As [`GroupTable::close`], on a fixed number of points (which matters
    /// when `gens` is empty).
    pub fn close_on(
        degree: usize,
        gens: &[Permutation],
        prime: Option<u64>,
        cap: usize,
    ) -> Result<GroupTable, GroupError> {
        if let Some(g) = gens.iter().find(|g| g.degree() != degree) {
            return Err(GroupError::DegreeMismatch(degree, g.degree()));
        }
        if let Some(p) = prime {
            if !arith::is_prime(p) {
                return Err(GroupError::NotPrime(p));
            }
        }
        // reject mixed-prime generators before doing any closure work
        let mut seen_primes: Vec<u64> = prime.into_iter().collect();
        for g in gens {
            let order = g.order();
            for q in arith::prime_divisors(order) {
                if !seen_primes.contains(&q) {
                    seen_primes.push(q);
                }
                if seen_primes.len() > 1 {
                    return Err(GroupError::NotAPGroup { order });
                }
            }
        }

        let identity = Permutation::identity(degree);
        let mut elements = vec![identity.clone()];
        let mut index_of = HashMap::new();
        index_of.insert(identity, 0usize);
        let mut head = 0;
        while head < elements.len() {
            for g in gens {
                let prod = elements[head].compose(g);
                if !index_of.contains_key(&prod) {
                    if elements.len() >= cap {
                        return Err(GroupError::SizeLimit { cap });
                    }
                    index_of.insert(prod.clone(), elements.len());
                    elements.push(prod);
                }
            }
            head += 1;
        }

        let order = elements.len() as u64;
        let primes = arith::prime_divisors(order);
        let prime = match (prime, primes.as_slice()) {
            (p, []) => p,
            (None, [q]) => Some(*q),
            (Some(p), [q]) if p == *q => Some(p),
            _ => return Err(GroupError::NotAPGroup { order }),
        };

        let mut generators: Vec<usize> = Vec::new();
        for g in gens {
            let i = index_of[g];
            if i != 0 && !generators.contains(&i) {
                generators.push(i);
            }
        }

        Ok(GroupTable {
            degree,
            elements,
            index_of,
            prime,
            generators,
            inverses: OnceLock::new(),
            classes: OnceLock::new(),
            cayley: OnceLock::new(),
        })
    }

    /// The same group with its elements listed in the order `elements`,
    /// which must be a permutation of the current element list with the
    /// identity first.
    pub fn reordered(self, elements: Vec<Permutation>) -> GroupTable {
        assert_eq!(elements.len(), self.order());
        assert!(elements[0].is_identity());
        let index_of: HashMap<Permutation, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        assert_eq!(index_of.len(), elements.len());
        let generators = self
            .generators
            .iter()
            .map(|&g| index_of[&self.elements[g]])
            .collect();
        GroupTable {
            degree: self.degree,
            elements,
            index_of,
            prime: self.prime,
            generators,
            inverses: OnceLock::new(),
            classes: OnceLock::new(),
            cayley: OnceLock::new(),
        }
    }

    pub fn trivial(prime: Option<u64>) -> GroupTable {
        GroupTable::close(&[], prime, 1).expect("trivial closure")
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The prime `p`; `None` only for a trivial group built without one.
    pub fn prime(&self) -> Option<u64> {
        self.prime
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Permutation {
        &self.elements[i]
    }

    pub fn index_of(&self, perm: &Permutation) -> Option<usize> {
        self.index_of.get(perm).copied()
    }

    pub fn generator_indices(&self) -> &[usize] {
        &self.generators
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    fn lookup(&self, perm: &Permutation) -> usize {
        self.index_of[perm]
    }

    fn cayley(&self) -> Option<&[u32]> {
        self.cayley
            .get_or_init(|| {
                let n = self.order();
                (n <= CAYLEY_LIMIT).then(|| {
                    let mut table = Vec::with_capacity(n * n);
                    for a in &self.elements {
                        for b in &self.elements {
                            table.push(self.lookup(&a.compose(b)) as u32);
                        }
                    }
                    table
                })
            })
            .as_deref()
    }

    /// Index of `elements[a] * elements[b]`.
    pub fn mul(&self, a: usize, b: usize) -> usize {
        match self.cayley() {
            Some(t) => t[a * self.order() + b] as usize,
            None => self.lookup(&self.elements[a].compose(&self.elements[b])),
        }
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses.get_or_init(|| {
            self.elements
                .iter()
                .map(|g| self.lookup(&g.inverse()))
                .collect()
        })[a]
    }

    /// `a^e` by square-and-multiply; negative exponents go through the inverse.
    pub fn power(&self, a: usize, e: i64) -> usize {
        let base = if e < 0 {
            self.elements[a].inverse()
        } else {
            self.elements[a].clone()
        };
        self.lookup(&base.pow(e.unsigned_abs()))
    }

    /// `g * x * g^-1`.
    pub fn conjugate(&self, x: usize, g: usize) -> usize {
        let gp = &self.elements[g];
        self.lookup(&gp.compose(&self.elements[x]).compose(&gp.inverse()))
    }

    pub fn commutes(&self, a: usize, b: usize) -> bool {
        let (pa, pb) = (&self.elements[a], &self.elements[b]);
        pa.compose(pb) == pb.compose(pa)
    }

    pub fn element_order(&self, a: usize) -> u64 {
        self.elements[a].order()
    }

    /// Largest element order (the exponent, since the group is a p-group).
    pub fn exponent(&self) -> u64 {
        (0..self.order())
            .map(|i| self.element_order(i))
            .max()
            .unwrap_or(1)
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.generators;
        g.iter()
            .enumerate()
            .all(|(k, &a)| g[k + 1..].iter().all(|&b| self.commutes(a, b)))
    }

    /// Conjugacy classes, computed once and cached.
    pub fn classes(&self) -> &ClassData {
        self.classes.get_or_init(|| conjugacy_classes(self))
    }

    pub fn class_count(&self) -> usize {
        self.classes().count()
    }

    pub fn whole(&self) -> Subgroup<'_> {
        Subgroup {
            parent: self,
            members: (0..self.order()).collect(),
        }
    }

    pub fn trivial_subgroup(&self) -> Subgroup<'_> {
        Subgroup {
            parent: self,
            members: vec![0],
        }
    }
}

/// Conjugacy classes as orbits of conjugation by the generators.
///
/// Classes are numbered by their minimal member, so class 0 is the identity.
pub fn conjugacy_classes(group: &GroupTable) -> ClassData {
    let n = group.order();
    let gens: Vec<(&Permutation, Permutation)> = group
        .generators
        .iter()
        .map(|&g| (&group.elements[g], group.elements[g].inverse()))
        .collect();
    let mut class_of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for x in 0..n {
        if class_of[x] != usize::MAX {
            continue;
        }
        let id = reps.len();
        reps.push(x);
        class_of[x] = id;
        let mut size = 1;
        stack.push(x);
        while let Some(y) = stack.pop() {
            for (g, g_inv) in &gens {
                let z = group.lookup(&g.compose(&group.elements[y]).compose(g_inv));
                if class_of[z] == usize::MAX {
                    class_of[z] = id;
                    size += 1;
                    stack.push(z);
                }
            }
        }
        sizes.push(size);
    }
    ClassData {
        class_of,
        reps,
        sizes,
    }
}

/// A subgroup, stored as the sorted indices of its members in the parent.
#[derive(Clone)]
pub struct Subgroup<'g> {
    parent: &'g GroupTable,
    members: Vec<usize>,
}

impl PartialEq for Subgroup<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.parent, other.parent) && self.members == other.members
    }
}

impl fmt::Debug for Subgroup<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subgroup")
            .field("members", &self.members)
            .finish()
    }
}

/// A subgroup realized as a group in its own right.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub group: GroupTable,
    /// Subgroup element index to parent element index.
    pub into_parent: Vec<usize>,
}

impl<'g> Subgroup<'g> {
    /// Validates that `members` form a subgroup of `parent`.
    pub fn from_members(
        parent: &'g GroupTable,
        mut members: Vec<usize>,
    ) -> Result<Self, GroupError> {
        members.sort_unstable();
        members.dedup();
        if members.first() != Some(&0) || members.iter().any(|&m| m >= parent.order()) {
            return Err(GroupError::NotSubgroup);
        }
        if !parent.order().is_multiple_of(members.len()) {
            return Err(GroupError::NotSubgroup);
        }
        let sub = Subgroup { parent, members };
        // finite, so closure under products implies closure under inverses
        for &a in &sub.members {
            for &b in &sub.members {
                if !sub.contains(parent.mul(a, b)) {
                    return Err(GroupError::NotSubgroup);
                }
            }
        }
        Ok(sub)
    }

    /// Subgroup generated by the given elements.
    pub fn generated(parent: &'g GroupTable, gens: &[usize]) -> Self {
        let mut in_set = vec![false; parent.order()];
        in_set[0] = true;
        let mut members = vec![0usize];
        let mut head = 0;
        while head < members.len() {
            let x = members[head];
            for &g in gens {
                let y = parent.mul(x, g);
                if !in_set[y] {
                    in_set[y] = true;
                    members.push(y);
                }
            }
            head += 1;
        }
        members.sort_unstable();
        Subgroup { parent, members }
    }

    /// Smallest normal subgroup containing `gens`.
    pub fn normal_closure(parent: &'g GroupTable, gens: &[usize]) -> Self {
        let mut current: Vec<usize> = gens.to_vec();
        loop {
            let sub = Self::generated(parent, &current);
            let mut extra = Vec::new();
            for &x in &current {
                for &g in parent.generator_indices() {
                    let c = parent.conjugate(x, g);
                    if !sub.contains(c) && !extra.contains(&c) {
                        extra.push(c);
                    }
                }
            }
            if extra.is_empty() {
                return sub;
            }
            current.extend(extra);
        }
    }

    pub fn parent(&self) -> &'g GroupTable {
        self.parent
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup<'_>) -> bool {
        self.members.iter().all(|&m| other.contains(m))
    }

    pub fn is_normal(&self) -> bool {
        self.parent.generator_indices().iter().all(|&g| {
            self.members
                .iter()
                .all(|&m| self.contains(self.parent.conjugate(m, g)))
        })
    }

    pub fn is_central(&self) -> bool {
        self.members.iter().all(|&m| {
            self.parent
                .generator_indices()
                .iter()
                .all(|&g| self.parent.commutes(m, g))
        })
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.greedy_generators();
        gens.iter()
            .enumerate()
            .all(|(k, &a)| gens[k + 1..].iter().all(|&b| self.parent.commutes(a, b)))
    }

    pub fn is_cyclic(&self) -> bool {
        self.members
            .iter()
            .any(|&m| self.parent.element_order(m) as usize == self.order())
    }

    /// A generating set picked greedily in index order; for an elementary
    /// abelian subgroup this is a basis.
    pub fn greedy_generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = Subgroup::generated(self.parent, &[]);
        for &m in &self.members {
            if span.order() == self.order() {
                break;
            }
            if !span.contains(m) {
                gens.push(m);
                span = Subgroup::generated(self.parent, &gens);
            }
        }
        gens
    }

    /// Realizes the subgroup as a standalone [`GroupTable`].
    pub fn to_group(&self) -> Result<Embedding, GroupError> {
        let gens: Vec<Permutation> = self
            .greedy_generators()
            .iter()
            .map(|&g| self.parent.element(g).clone())
            .collect();
        let group = GroupTable::close_on(
            self.parent.degree(),
            &gens,
            self.parent.prime(),
            self.order(),
        )?;
        let into_parent = group
            .elements()
            .iter()
            .map(|e| self.parent.lookup(e))
            .collect();
        Ok(Embedding { group, into_parent })
    }
}

/// Elements commuting with every generator.
pub fn center(group: &GroupTable) -> Subgroup<'_> {
    let members = (0..group.order())
        .filter(|&x| {
            group
                .generator_indices()
                .iter()
                .all(|&g| group.commutes(x, g))
        })
        .collect();
    Subgroup {
        parent: group,
        members,
    }
}

/// Elements commuting with every member of `set`.
pub fn centralizer<'g>(group: &'g GroupTable, set: &Subgroup<'_>) -> Subgroup<'g> {
    let gens = set.greedy_generators();
    let members = (0..group.order())
        .filter(|&x| gens.iter().all(|&s| group.commutes(x, s)))
        .collect();
    Subgroup {
        parent: group,
        members,
    }
}

/// Central elements `x` with `x^p = 1`.
pub fn omega1_center(group: &GroupTable) -> Subgroup<'_> {
    let p = group.prime().unwrap_or(1);
    let members = center(group)
        .members
        .into_iter()
        .filter(|&x| p == 1 || group.element_order(x) <= p)
        .collect();
    Subgroup {
        parent: group,
        members,
    }
}

/// A quotient group with its projection map.
#[derive(Debug, Clone)]
pub struct QuotientResult {
    pub quotient: GroupTable,
    /// Parent element index to quotient element index.
    pub projection: Vec<usize>,
}

/// `G/N`, realized by the action of `G` on the cosets of `N`.
pub fn quotient(group: &GroupTable, normal: &Subgroup<'_>) -> Result<QuotientResult, GroupError> {
    if !normal.is_normal() {
        return Err(GroupError::NotNormal);
    }
    let n = group.order();
    let mut coset_of = vec![usize::MAX; n];
    let mut coset_reps = Vec::new();
    for x in 0..n {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let id = coset_reps.len();
        coset_reps.push(x);
        for &m in normal.members() {
            coset_of[group.mul(x, m)] = id;
        }
    }
    let action = |g: usize| -> Permutation {
        let images = coset_reps
            .iter()
            .map(|&r| coset_of[group.mul(r, g)])
            .collect();
        Permutation::from_images(images).expect("coset action is a bijection")
    };
    let gens: Vec<Permutation> = group
        .generator_indices()
        .iter()
        .map(|&g| action(g))
        .collect();
    let quotient = GroupTable::close_on(coset_reps.len(), &gens, group.prime(), coset_reps.len())?;
    let coset_image: Vec<usize> = coset_reps
        .iter()
        .map(|&r| quotient.lookup(&action(r)))
        .collect();
    let projection = coset_of.iter().map(|&c| coset_image[c]).collect();
    Ok(QuotientResult {
        quotient,
        projection,
    })
}

/// `G x H` acting on the disjoint union of the two point sets.
pub fn direct_product(g: &GroupTable, h: &GroupTable) -> Result<GroupTable, GroupError> {
    let prime = match (g.prime(), h.prime()) {
        (Some(a), Some(b)) if a != b => return Err(GroupError::PrimeMismatch(a, b)),
        (a, b) => a.or(b),
    };
    let total = g.degree() + h.degree();
    let gens: Vec<Permutation> = g
        .generator_indices()
        .iter()
        .map(|&i| g.element(i).embed(0, total))
        .chain(
            h.generator_indices()
                .iter()
                .map(|&i| h.element(i).embed(g.degree(), total)),
        )
        .collect();
    GroupTable::close_on(total, &gens, prime, g.order() * h.order())
}

/// A subgroup of an elementary abelian group, with its rank.
#[derive(Debug, Clone)]
pub struct RankedSubgroup<'g> {
    pub subgroup: Subgroup<'g>,
    pub rank: u32,
}

/// Every subgroup of the elementary abelian subgroup `e`, enumerated as the
/// subspaces of `F_p^r` in reduced row echelon form, ordered by rank.
pub fn elementary_abelian_subgroups<'g>(
    e: &Subgroup<'g>,
) -> Result<Vec<RankedSubgroup<'g>>, GroupError> {
    let group = e.parent();
    if e.order() == 1 {
        return Ok(vec![RankedSubgroup {
            subgroup: e.clone(),
            rank: 0,
        }]);
    }
    let p = group.prime().ok_or(GroupError::NotElementaryAbelian)?;
    if e.members()
        .iter()
        .skip(1)
        .any(|&m| group.element_order(m) != p)
        || !e.is_abelian()
    {
        return Err(GroupError::NotElementaryAbelian);
    }
    let rank = arith::log_exact(e.order() as u64, p).ok_or(GroupError::NotElementaryAbelian)?;
    if rank > MAX_LATTICE_RANK {
        return Err(GroupError::RankLimit(rank));
    }
    let basis = e.greedy_generators();
    debug_assert_eq!(basis.len(), rank as usize);
    let p_us = p as usize;
    let r = rank as usize;

    // element for each coordinate vector, indexed by sum c_i p^i
    let mut vec_to_elem = vec![0usize; p_us.pow(rank)];
    for (code, slot) in vec_to_elem.iter_mut().enumerate().skip(1) {
        let mut x = 0;
        let mut c = code;
        for &b in &basis {
            let coeff = c % p_us;
            c /= p_us;
            for _ in 0..coeff {
                x = group.mul(x, b);
            }
        }
        *slot = x;
    }

    let mut out = Vec::new();
    for k in 0..=r {
        for pivots in combinations(r, k) {
            // free entries: row i, columns after its pivot that are not pivots
            let free: Vec<(usize, usize)> = (0..k)
                .flat_map(|i| {
                    let pivots = &pivots;
                    (pivots[i] + 1..r)
                        .filter(move |j| !pivots.contains(j))
                        .map(move |j| (i, j))
                })
                .collect();
            for assignment in 0..p_us.pow(free.len() as u32) {
                let mut rows = vec![vec![0usize; r]; k];
                for (i, &piv) in pivots.iter().enumerate() {
                    rows[i][piv] = 1;
                }
                let mut a = assignment;
                for &(i, j) in &free {
                    rows[i][j] = a % p_us;
                    a /= p_us;
                }
                let mut members = Vec::with_capacity(p_us.pow(k as u32));
                for combo in 0..p_us.pow(k as u32) {
                    let mut v = vec![0usize; r];
                    let mut c = combo;
                    for row in &rows {
                        let lambda = c % p_us;
                        c /= p_us;
                        for (vj, rj) in v.iter_mut().zip(row) {
                            *vj = (*vj + lambda * rj) % p_us;
                        }
                    }
                    let code = v.iter().rev().fold(0, |acc, &x| acc * p_us + x);
                    members.push(vec_to_elem[code]);
                }
                members.sort_unstable();
                out.push(RankedSubgroup {
                    subgroup: Subgroup {
                        parent: group,
                        members,
                    },
                    rank: k as u32,
                });
            }
        }
    }
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: usize, p: u64) -> GroupTable {
        let gen = Permutation::from_cycles(n, &[(0..n).collect()]).unwrap();
        close_generators(&[gen], p).unwrap()
    }

    fn elementary(p: u64, rank: usize) -> GroupTable {
        let n = p as usize;
        let deg = n * rank;
        let gens: Vec<Permutation> = (0..rank)
            .map(|i| Permutation::from_cycles(deg, &[(i * n..(i + 1) * n).collect()]).unwrap())
            .collect();
        close_generators(&gens, p).unwrap()
    }

    /// Heisenberg group mod 3 in its right regular representation.
    fn heisenberg3() -> GroupTable {
        let code = |x: usize, y: usize, z: usize| x + 3 * y + 9 * z;
        let gen = |gx: usize, gy: usize, gz: usize| {
            let mut images = vec![0; 27];
            for x in 0..3 {
                for y in 0..3 {
                    for z in 0..3 {
                        images[code(x, y, z)] =
                            code((x + gx) % 3, (y + gy) % 3, (z + gz + x * gy) % 3);
                    }
                }
            }
            Permutation::from_images(images).unwrap()
        };
        close_generators(&[gen(1, 0, 0), gen(0, 1, 0), gen(0, 0, 1)], 3).unwrap()
    }

    #[test]
    fn trivial_closure() {
        let g = close_generators(&[], 3).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.prime(), Some(3));
        assert_eq!(g.class_count(), 1);
        assert_eq!(g.exponent(), 1);
    }

    #[test]
    fn cyclic_nine() {
        let g = cyclic(9, 3);
        assert_eq!(g.order(), 9);
        assert!(g.element(0).is_identity());
        let a = g.generator_indices()[0];
        assert_eq!(g.element_order(a), 9);
        assert_ne!(g.power(a, 4), a);
        assert_eq!(g.power(a, 10), a);
        assert_eq!(g.power(a, 0), 0);
        assert_eq!(g.power(a, -1), g.inverse(a));
        assert_eq!(g.class_count(), 9);
    }

    #[test]
    fn c81_power_wraps() {
        let g = cyclic(81, 3);
        let a = g.generator_indices()[0];
        assert_eq!(g.power(a, 82), a);
        assert_eq!(g.element_order(a), 81);
        assert_eq!(g.exponent(), 81);
        assert_eq!(g.power(0, 17), 0);
    }

    #[test]
    fn closure_errors() {
        let a = Permutation::from_cycles(3, &[vec![0, 1, 2]]).unwrap();
        let b = Permutation::from_cycles(4, &[vec![0, 1]]).unwrap();
        assert_eq!(
            close_generators(&[a.clone(), b], 3).unwrap_err(),
            GroupError::DegreeMismatch(3, 4)
        );
        // S_3 from a 3-cycle and a transposition
        let t = Permutation::from_cycles(3, &[vec![0, 1]]).unwrap();
        assert!(matches!(
            GroupTable::close(&[a.clone(), t], None, 100),
            Err(GroupError::NotAPGroup { .. })
        ));
        // two 3-cycles generate A_4 of order 12
        let c1 = Permutation::from_cycles(4, &[vec![0, 1, 2]]).unwrap();
        let c2 = Permutation::from_cycles(4, &[vec![1, 2, 3]]).unwrap();
        assert_eq!(
            close_generators(&[c1, c2], 3).unwrap_err(),
            GroupError::NotAPGroup { order: 12 }
        );
        let big = Permutation::from_cycles(27, &[(0..27).collect()]).unwrap();
        assert_eq!(
            GroupTable::close(&[big], Some(3), 10).unwrap_err(),
            GroupError::SizeLimit { cap: 10 }
        );
        assert_eq!(
            close_generators(&[a], 4).unwrap_err(),
            GroupError::NotPrime(4)
        );
    }

    #[test]
    fn heisenberg_structure() {
        let g = heisenberg3();
        assert_eq!(g.order(), 27);
        assert_eq!(g.exponent(), 3);
        let classes = g.classes();
        let mut sizes = classes.sizes().to_vec();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 1, 3, 3, 3, 3, 3, 3, 3, 3]);
        let z = center(&g);
        assert_eq!(z.order(), 3);
        assert_eq!(centralizer(&g, &z).order(), 27);
        assert_eq!(omega1_center(&g).order(), 3);
        for x in 0..27 {
            if !z.contains(x) {
                assert_eq!(g.element_order(x), 3);
            }
        }
        let q = quotient(&g, &z).unwrap();
        assert_eq!(q.quotient.order(), 9);
        assert!(q.quotient.is_abelian());
        assert_eq!(q.quotient.exponent(), 3);
        for x in 0..27 {
            for y in 0..27 {
                assert_eq!(
                    q.projection[g.mul(x, y)],
                    q.quotient.mul(q.projection[x], q.projection[y])
                );
            }
        }
    }

    #[test]
    fn quotient_extremes() {
        let g = heisenberg3();
        let whole = quotient(&g, &g.whole()).unwrap();
        assert_eq!(whole.quotient.order(), 1);
        let same = quotient(&g, &g.trivial_subgroup()).unwrap();
        assert_eq!(same.quotient.order(), 27);
        assert_eq!(same.quotient.class_count(), 11);
        let a = g.generator_indices()[0];
        let not_normal = Subgroup::generated(&g, &[a]);
        assert_eq!(
            quotient(&g, &not_normal).unwrap_err(),
            GroupError::NotNormal
        );
    }

    #[test]
    fn products() {
        let c3 = cyclic(3, 3);
        let p = direct_product(&c3, &c3).unwrap();
        assert_eq!(p.order(), 9);
        assert_eq!(p.exponent(), 3);
        let t = GroupTable::trivial(None);
        assert_eq!(direct_product(&c3, &t).unwrap().order(), 3);
        let h = heisenberg3();
        assert_eq!(direct_product(&h, &c3).unwrap().class_count(), 33);
        let c5 = cyclic(5, 5);
        assert_eq!(
            direct_product(&c3, &c5).unwrap_err(),
            GroupError::PrimeMismatch(3, 5)
        );
    }

    #[test]
    fn subgroup_lattice_counts() {
        for (rank, expected) in [(1, 2), (2, 6), (3, 28)] {
            let g = elementary(3, rank);
            let subs = elementary_abelian_subgroups(&g.whole()).unwrap();
            assert_eq!(subs.len(), expected, "rank {rank}");
            for s in &subs {
                assert_eq!(s.subgroup.order(), 3usize.pow(s.rank));
                assert!(Subgroup::from_members(&g, s.subgroup.members().to_vec()).is_ok());
            }
        }
        let g = elementary(3, 3);
        let subs = elementary_abelian_subgroups(&g.whole()).unwrap();
        let by_rank: Vec<usize> = (0..=3)
            .map(|r| subs.iter().filter(|s| s.rank == r).count())
            .collect();
        assert_eq!(by_rank, vec![1, 13, 13, 1]);
        let c9 = cyclic(9, 3);
        assert_eq!(
            elementary_abelian_subgroups(&c9.whole()).unwrap_err(),
            GroupError::NotElementaryAbelian
        );
        let big = elementary(3, 5);
        assert_eq!(
            elementary_abelian_subgroups(&big.whole()).unwrap_err(),
            GroupError::RankLimit(5)
        );
    }

    #[test]
    fn permutation_display() {
        let p = Permutation::from_cycles(6, &[vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        assert_eq!(p.to_string(), "(1 2 3)(4 5 6)");
        assert_eq!(Permutation::identity(3).to_string(), "()");
        assert_eq!(p.order(), 3);
        assert!(Permutation::from_cycles(3, &[vec![0, 1], vec![1, 2]]).is_err());
    }
}
