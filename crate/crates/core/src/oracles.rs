//! Cross-checks of the decomposition that avoid its code path: counting by
//! element orders for abelian groups, componentwise `l_n` for direct products,
//! and invariant-space dimensions against orbit counts on `Z/p^m`.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::arith;
use crate::class_functions::{fn_space, CfError};
use crate::decomposition::Decomposition;
use crate::group::{direct_product, GroupError, GroupTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("group is not abelian")]
    NotAbelian,
    #[error("{count} elements of order {order} is not a multiple of {divisor}")]
    Indivisible {
        order: u64,
        count: u64,
        divisor: u64,
    },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    ClassFunction(#[from] CfError),
}

/// For abelian `G`, `a_m` is the number of cyclic subgroups of order `p^m`:
/// the elements of that order divided by `p^(m-1)(p-1)`.
pub fn abelian_oracle(group: &GroupTable) -> Result<Decomposition, OracleError> {
    if !group.is_abelian() {
        return Err(OracleError::NotAbelian);
    }
    let mut by_order: BTreeMap<u64, u64> = BTreeMap::new();
    for x in 1..group.order() {
        *by_order.entry(group.element_order(x)).or_default() += 1;
    }
    let p = group.prime();
    let mut multiplicities = BTreeMap::new();
    for (order, count) in by_order {
        let prime = p.expect("nontrivial group has a prime");
        let m = arith::log_exact(order, prime).expect("element orders are p-powers");
        let divisor = prime.pow(m - 1) * (prime - 1);
        if count % divisor != 0 {
            return Err(OracleError::Indivisible {
                order,
                count,
                divisor,
            });
        }
        multiplicities.insert(m, count / divisor);
    }
    Ok(Decomposition {
        p,
        order: group.order() as u64,
        multiplicities,
    })
}

/// `l_n` by testing every class representative for each `n` separately.
fn l_values(group: &GroupTable, r: u32) -> Vec<u64> {
    let classes = group.classes();
    let p = group.prime().unwrap_or(1);
    let mut out = vec![1];
    for n in 1..=r {
        let e = 1 + p.pow(n) as i64;
        let fixed = (0..classes.count())
            .filter(|&c| classes.class_of(group.power(classes.rep(c), e)) == c)
            .count();
        out.push(fixed as u64);
    }
    out
}

fn log_exponent(group: &GroupTable) -> u32 {
    match group.prime() {
        Some(p) => arith::log_exact(group.exponent(), p).unwrap_or(0),
        None => 0,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductReport {
    /// `l_n(G x H)` computed on the product group.
    pub product: Vec<u64>,
    /// `l_n(G) l_n(H)`.
    pub expected: Vec<u64>,
}

impl ProductReport {
    pub fn holds(&self) -> bool {
        self.product == self.expected
    }
}

/// Compares `l_n(G x H)` with `l_n(G) l_n(H)` for `n` up to the exponent of
/// the product.
pub fn product_check(g: &GroupTable, h: &GroupTable) -> Result<ProductReport, OracleError> {
    let gh = direct_product(g, h)?;
    let r = log_exponent(&gh);
    let product = l_values(&gh, r);
    let lg = l_values(g, r);
    let lh = l_values(h, r);
    let expected = lg.iter().zip(&lh).map(|(a, b)| a * b).collect();
    Ok(ProductReport { product, expected })
}

/// Orbit counts of multiplication by `1 + p^n` on `Z/p^m`, by enumeration.
#[derive(Debug, Clone)]
pub struct OrbitCountTable {
    pub p: u64,
    /// `entries[m][n - 1]` for `0 <= m <= max_m`, `1 <= n <= max_n`.
    entries: Vec<Vec<u64>>,
}

impl OrbitCountTable {
    pub fn brute_force(p: u64, max_m: u32, max_n: u32) -> Self {
        let entries = (0..=max_m)
            .map(|m| {
                let modulus = p.pow(m);
                (1..=max_n)
                    .map(|n| {
                        let mult = (1 + p.pow(n)) % modulus.max(1);
                        let mut seen = vec![false; modulus as usize];
                        let mut orbits = 0;
                        for start in 0..modulus {
                            if seen[start as usize] {
                                continue;
                            }
                            orbits += 1;
                            let mut x = start;
                            while !seen[x as usize] {
                                seen[x as usize] = true;
                                x = x * mult % modulus;
                            }
                        }
                        orbits
                    })
                    .collect()
            })
            .collect();
        OrbitCountTable { p, entries }
    }

    pub fn get(&self, m: u32, n: u32) -> u64 {
        self.entries[m as usize][n as usize - 1]
    }

    /// `p^min(m,n) + max(0, m-n) p^(n-1) (p-1)`.
    pub fn closed_form(p: u64, m: u32, n: u32) -> u64 {
        p.pow(m.min(n)) + u64::from(m.saturating_sub(n)) * p.pow(n - 1) * (p - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankConsistencyReport {
    /// Invariant-space dimension for `n = 1..=r`.
    pub observed: Vec<u64>,
    /// `1 + sum a_m (O(m,n) - O(m-1,n))` for `n = 1..=r`.
    pub predicted: Vec<u64>,
}

impl RankConsistencyReport {
    pub fn holds(&self) -> bool {
        self.observed == self.predicted
    }
}

/// Checks that the dimension of the `1 + p^n` invariants of class functions
/// splits over the summands of `decomposition` like the cyclic groups do.
pub fn rank_consistency(
    group: &Arc<GroupTable>,
    decomposition: &Decomposition,
) -> Result<RankConsistencyReport, OracleError> {
    let r = log_exponent(group);
    let Some(p) = group.prime() else {
        return Ok(RankConsistencyReport {
            observed: vec![],
            predicted: vec![],
        });
    };
    let max_m = decomposition
        .multiplicities
        .keys()
        .copied()
        .max()
        .unwrap_or(0);
    let table = OrbitCountTable::brute_force(p, max_m, r.max(1));
    let mut observed = Vec::new();
    let mut predicted = Vec::new();
    for n in 1..=r {
        observed.push(fn_space(group, n)?.orbit_count as u64);
        predicted.push(
            1 + decomposition
                .multiplicities
                .iter()
                .map(|(&m, &a)| a * (table.get(m, n) - table.get(m - 1, n)))
                .sum::<u64>(),
        );
    }
    Ok(RankConsistencyReport {
        observed,
        predicted,
    })
}
