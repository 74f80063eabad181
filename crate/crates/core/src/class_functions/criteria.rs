//! Invariant spaces of `1 + p^n`, Möbius functions of elementary abelian
//! lattices, and the two conditions characterizing rational biset functors,
//! all evaluated on class functions.

use std::sync::Arc;

use num::{BigInt, Signed, Zero};

use super::bisets::{
    deflation_biset, inflation_biset, restriction_biset, QuotientMap, SubgroupMap,
};
use super::{rational, CfError, ClassFunction, Rational};
use crate::group::{
    center, centralizer, elementary_abelian_subgroups, omega1_center, GroupTable, RankedSubgroup,
    Subgroup,
};
use crate::linalg;

/// Class functions fixed by `s -> s^(1+p^n)`.
#[derive(Debug, Clone)]
pub struct FnSpace {
    pub group: Arc<GroupTable>,
    pub n: u32,
    /// `sigma[c]` is the class of `rep(c)^(1+p^n)`.
    pub sigma: Vec<usize>,
    /// Classes with `sigma[c] == c`; this is `l_n`.
    pub fixed_count: usize,
    /// Number of cycles of `sigma`; the dimension of the invariant space.
    pub orbit_count: usize,
}

/// Builds `sigma` from the power map on class representatives and checks
/// that its cycle count equals the exact kernel dimension of `sigma* - 1`.
pub fn fn_space(group: &Arc<GroupTable>, n: u32) -> Result<FnSpace, CfError> {
    let classes = group.classes();
    let k = classes.count();
    let p = group.prime().unwrap_or(1);
    let e = 1 + p.pow(n) as i64;
    let sigma: Vec<usize> = (0..k)
        .map(|c| classes.class_of(group.power(classes.rep(c), e)))
        .collect();

    let fixed_count = (0..k).filter(|&c| sigma[c] == c).count();
    let mut seen = vec![false; k];
    let mut orbit_count = 0;
    for start in 0..k {
        if seen[start] {
            continue;
        }
        orbit_count += 1;
        let mut c = start;
        while !seen[c] {
            seen[c] = true;
            c = sigma[c];
        }
        if c != start {
            return Err(CfError::Internal(
                "power map on classes is not a permutation".into(),
            ));
        }
    }

    // (sigma* f)(c) = f(sigma(c)); invariants are the kernel of sigma* - 1
    let mut rows = vec![vec![Rational::zero(); k]; k];
    for (c, row) in rows.iter_mut().enumerate() {
        row[sigma[c]] += rational(1);
        row[c] -= rational(1);
    }
    let kernel = linalg::nullity(rows);
    if kernel != orbit_count {
        return Err(CfError::Internal(format!(
            "invariant space has dimension {kernel} but sigma has {orbit_count} cycles"
        )));
    }
    Ok(FnSpace {
        group: Arc::clone(group),
        n,
        sigma,
        fixed_count,
        orbit_count,
    })
}

/// Subgroups of an elementary abelian group with `mu(1, Z)`.
#[derive(Debug, Clone)]
pub struct ElementaryAbelianLattice<'g> {
    pub p: u64,
    pub subgroups: Vec<RankedSubgroup<'g>>,
    pub mu: Vec<i64>,
}

fn closed_form_mu(p: u64, rank: u32) -> i64 {
    let sign = if rank.is_multiple_of(2) { 1 } else { -1 };
    sign * (p as i64).pow(rank * rank.saturating_sub(1) / 2)
}

/// Enumerates the lattice and assigns `mu(1, Z) = (-1)^r p^(r(r-1)/2)`,
/// verified against the recursive definition on the poset.
pub fn mobius_lattice<'g>(e: &Subgroup<'g>) -> Result<ElementaryAbelianLattice<'g>, CfError> {
    let subgroups = elementary_abelian_subgroups(e)?;
    let p = e.parent().prime().unwrap_or(1);
    let mu: Vec<i64> = subgroups
        .iter()
        .map(|s| closed_form_mu(p, s.rank))
        .collect();

    let mut recursive = vec![0i64; subgroups.len()];
    for i in 0..subgroups.len() {
        if subgroups[i].rank == 0 {
            recursive[i] = 1;
            continue;
        }
        let below: i64 = (0..subgroups.len())
            .filter(|&j| {
                subgroups[j].rank < subgroups[i].rank
                    && subgroups[j].subgroup.is_subgroup_of(&subgroups[i].subgroup)
            })
            .map(|j| recursive[j])
            .sum();
        recursive[i] = -below;
    }
    if recursive != mu {
        return Err(CfError::Internal(format!(
            "closed-form Möbius values {mu:?} differ from recursive values {recursive:?}"
        )));
    }
    Ok(ElementaryAbelianLattice { p, subgroups, mu })
}

/// `sum over Z containing z of mu(1, Z) / |Z|`, for every `z` in the top
/// element of the lattice.
pub fn lemma_sums(lattice: &ElementaryAbelianLattice<'_>) -> Vec<(usize, Rational)> {
    let top = lattice
        .subgroups
        .iter()
        .max_by_key(|s| s.rank)
        .expect("lattice is nonempty");
    top.subgroup
        .members()
        .iter()
        .map(|&z| {
            let mut sum = Rational::zero();
            for (s, &mu) in lattice.subgroups.iter().zip(&lattice.mu) {
                if s.subgroup.contains(z) {
                    sum += Rational::new(BigInt::from(mu), BigInt::from(s.subgroup.order()));
                }
            }
            (z, sum)
        })
        .collect()
}

/// For `E` the elements of order dividing `p` in a noncyclic center, forms
/// `S = sum over Z <= E of mu(1, Z) Inf Def f` for every class indicator `f`
/// and returns the largest absolute value of any entry.
pub fn vanishing_sum(group: &Arc<GroupTable>) -> Result<Rational, CfError> {
    if center(group).is_cyclic() {
        return Err(CfError::CyclicCenter);
    }
    let e = omega1_center(group);
    let lattice = mobius_lattice(&e)?;
    let mut terms = Vec::with_capacity(lattice.subgroups.len());
    for (s, &mu) in lattice.subgroups.iter().zip(&lattice.mu) {
        let quot = QuotientMap::new(&s.subgroup)?;
        let def = deflation_biset(group, &quot)?.linear_map();
        let inf = inflation_biset(group, &quot)?.linear_map();
        terms.push((rational(mu), def, inf));
    }
    let mut worst = Rational::zero();
    for c in 0..group.class_count() {
        let f = ClassFunction::indicator(Arc::clone(group), c);
        let mut total = ClassFunction::zero(Arc::clone(group));
        for (mu, def, inf) in &terms {
            let term = inf.apply(&def.apply(&f)?)?;
            total.add_scaled(&term, mu)?;
        }
        worst = worst.max(total.max_abs());
    }
    Ok(worst)
}

/// Rank of `Res^G_{C_G(E)} (+) Def^G_{G/Z}` on class functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectivityReport {
    pub rank: usize,
    pub class_count: usize,
    /// Classes of `C_G(E)` plus classes of `G/Z`.
    pub rows: usize,
}

impl InjectivityReport {
    pub fn is_injective(&self) -> bool {
        self.rank == self.class_count
    }
}

/// `e` must be a normal elementary abelian subgroup of rank 2 and `z <= e` a
/// central subgroup of order `p`.
pub fn res_def_injectivity(
    group: &Arc<GroupTable>,
    e: &Subgroup<'_>,
    z: &Subgroup<'_>,
) -> Result<InjectivityReport, CfError> {
    let bad = |msg: &str| Err(CfError::BadConfiguration(msg.to_string()));
    let p = group.prime().unwrap_or(1) as usize;
    if !std::ptr::eq(e.parent(), &**group) || !std::ptr::eq(z.parent(), &**group) {
        return bad("subgroups belong to a different group");
    }
    if e.order() != p * p
        || !e.is_abelian()
        || e.members()[1..]
            .iter()
            .any(|&x| group.element_order(x) != p as u64)
    {
        return bad("E is not elementary abelian of rank 2");
    }
    if !e.is_normal() {
        return bad("E is not normal");
    }
    if z.order() != p || !z.is_subgroup_of(e) || !z.is_central() {
        return bad("Z is not a central subgroup of order p inside E");
    }

    let c = SubgroupMap::new(&centralizer(group, e))?;
    let quot = QuotientMap::new(z)?;
    let mut rows = restriction_biset(group, &c)?.linear_map().rational_rows();
    rows.extend(deflation_biset(group, &quot)?.linear_map().rational_rows());
    let n_rows = rows.len();
    Ok(InjectivityReport {
        rank: linalg::rank(rows),
        class_count: group.class_count(),
        rows: n_rows,
    })
}

impl ElementaryAbelianLattice<'_> {
    /// True when every Lemma sum vanishes.
    pub fn lemma_holds(&self) -> bool {
        lemma_sums(self).iter().all(|(_, s)| s.is_zero())
    }

    pub fn max_abs_lemma_sum(&self) -> Rational {
        lemma_sums(self)
            .into_iter()
            .map(|(_, s)| s.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}
