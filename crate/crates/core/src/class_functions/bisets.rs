//! Finite bisets with full action tables, the elementary bisets, and their
//! composition `V x_Q U`.

use std::fmt;
use std::sync::Arc;

use num::{BigInt, Zero};

use super::{same_group, CfError, ClassFunction, Rational};
use crate::group::{quotient, GroupTable, Subgroup};

/// A finite `(Q, P)`-biset: `Q` acts on the left, `P` on the right, and the
/// two actions commute.
#[derive(Clone)]
pub struct BisetTable {
    left: Arc<GroupTable>,
    right: Arc<GroupTable>,
    points: usize,
    /// `left_action[q * points + u] = q.u`
    left_action: Vec<u32>,
    /// `right_action[u * |P| + x] = u.x`
    right_action: Vec<u32>,
}

impl fmt::Debug for BisetTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BisetTable({} points, left order {}, right order {})",
            self.points,
            self.left.order(),
            self.right.order()
        )
    }
}

impl BisetTable {
    /// Tabulates the two actions and checks the biset axioms.
    pub fn new(
        left: Arc<GroupTable>,
        right: Arc<GroupTable>,
        points: usize,
        left_act: impl Fn(usize, usize) -> usize,
        right_act: impl Fn(usize, usize) -> usize,
    ) -> Result<Self, CfError> {
        let mut left_action = Vec::with_capacity(left.order() * points);
        for q in 0..left.order() {
            for u in 0..points {
                left_action.push(left_act(q, u) as u32);
            }
        }
        let mut right_action = Vec::with_capacity(points * right.order());
        for u in 0..points {
            for x in 0..right.order() {
                right_action.push(right_act(u, x) as u32);
            }
        }
        let biset = BisetTable {
            left,
            right,
            points,
            left_action,
            right_action,
        };
        biset.check_axioms()?;
        Ok(biset)
    }

    fn check_axioms(&self) -> Result<(), CfError> {
        let fail = |msg: &str| Err(CfError::NotABiset(msg.to_string()));
        let (q_group, p_group) = (&self.left, &self.right);
        if self
            .left_action
            .iter()
            .chain(&self.right_action)
            .any(|&u| u as usize >= self.points)
        {
            return fail("action leaves the point set");
        }
        for u in 0..self.points {
            if self.left_act(0, u) != u || self.right_act(u, 0) != u {
                return fail("identity does not act trivially");
            }
        }
        // homomorphism checks against generators suffice
        for &g in q_group.generator_indices() {
            for q in 0..q_group.order() {
                let qg = q_group.mul(q, g);
                for u in 0..self.points {
                    if self.left_act(qg, u) != self.left_act(q, self.left_act(g, u)) {
                        return fail("left action is not compatible with multiplication");
                    }
                }
            }
        }
        for &g in p_group.generator_indices() {
            for x in 0..p_group.order() {
                let xg = p_group.mul(x, g);
                for u in 0..self.points {
                    if self.right_act(u, xg) != self.right_act(self.right_act(u, x), g) {
                        return fail("right action is not compatible with multiplication");
                    }
                }
            }
        }
        for &q in q_group.generator_indices() {
            for &x in p_group.generator_indices() {
                for u in 0..self.points {
                    if self.left_act(q, self.right_act(u, x))
                        != self.right_act(self.left_act(q, u), x)
                    {
                        return fail("left and right actions do not commute");
                    }
                }
            }
        }
        Ok(())
    }

    pub fn left(&self) -> &Arc<GroupTable> {
        &self.left
    }

    pub fn right(&self) -> &Arc<GroupTable> {
        &self.right
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn left_act(&self, q: usize, u: usize) -> usize {
        self.left_action[q * self.points + u] as usize
    }

    pub fn right_act(&self, u: usize, x: usize) -> usize {
        self.right_action[u * self.right.order() + x] as usize
    }

    /// The matrix of `CF(U)` on class-indicator bases.
    pub fn linear_map(&self) -> CfMap {
        let (q, p) = (&self.left, &self.right);
        let (q_classes, p_classes) = (q.classes(), p.classes());
        let mut counts = vec![vec![0u64; p_classes.count()]; q_classes.count()];
        for (c, row) in counts.iter_mut().enumerate() {
            let s = q_classes.rep(c);
            for u in 0..self.points {
                let su = self.left_act(s, u);
                let base = u * p.order();
                for x in 0..p.order() {
                    if self.right_action[base + x] as usize == su {
                        row[p_classes.class_of(x)] += 1;
                    }
                }
            }
        }
        CfMap {
            source: Arc::clone(p),
            target: Arc::clone(q),
            counts,
        }
    }
}

/// `CF(U)` as a matrix: `value[c] = (1/|P|) * sum_d counts[c][d] * f[d]`.
#[derive(Debug, Clone)]
pub struct CfMap {
    source: Arc<GroupTable>,
    target: Arc<GroupTable>,
    counts: Vec<Vec<u64>>,
}

impl CfMap {
    pub fn apply(&self, f: &ClassFunction) -> Result<ClassFunction, CfError> {
        if !same_group(f.group(), &self.source) {
            return Err(CfError::GroupMismatch);
        }
        let scale = Rational::new(BigInt::from(1), BigInt::from(self.source.order()));
        let values = self
            .counts
            .iter()
            .map(|row| {
                let mut total = Rational::zero();
                for (&n, v) in row.iter().zip(f.values()) {
                    if n != 0 {
                        total += v * Rational::from_integer(BigInt::from(n));
                    }
                }
                total * &scale
            })
            .collect();
        ClassFunction::new(Arc::clone(&self.target), values)
    }

    /// Rows of the matrix with the `1/|P|` factor applied.
    pub fn rational_rows(&self) -> Vec<Vec<Rational>> {
        let order = BigInt::from(self.source.order());
        self.counts
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&n| Rational::new(BigInt::from(n), order.clone()))
                    .collect()
            })
            .collect()
    }
}

/// A subgroup realized as its own group, with the inclusion map.
#[derive(Debug, Clone)]
pub struct SubgroupMap {
    pub group: Arc<GroupTable>,
    pub into_parent: Vec<usize>,
}

impl SubgroupMap {
    pub fn new(sub: &Subgroup<'_>) -> Result<Self, CfError> {
        let emb = sub.to_group()?;
        Ok(SubgroupMap {
            group: Arc::new(emb.group),
            into_parent: emb.into_parent,
        })
    }
}

/// A quotient `P/N` with its projection.
#[derive(Debug, Clone)]
pub struct QuotientMap {
    pub group: Arc<GroupTable>,
    pub projection: Vec<usize>,
}

impl QuotientMap {
    pub fn new(normal: &Subgroup<'_>) -> Result<Self, CfError> {
        let q = quotient(normal.parent(), normal)?;
        Ok(QuotientMap {
            group: Arc::new(q.quotient),
            projection: q.projection,
        })
    }
}

/// `P` as a `(P, P)`-biset.
pub fn identity_biset(group: &Arc<GroupTable>) -> BisetTable {
    let g = Arc::clone(group);
    BisetTable::new(
        Arc::clone(group),
        Arc::clone(group),
        group.order(),
        |q, u| g.mul(q, u),
        |u, x| g.mul(u, x),
    )
    .expect("identity biset")
}

/// `Res^P_H`: `P` as an `(H, P)`-biset.
pub fn restriction_biset(
    parent: &Arc<GroupTable>,
    sub: &SubgroupMap,
) -> Result<BisetTable, CfError> {
    let g = Arc::clone(parent);
    BisetTable::new(
        Arc::clone(&sub.group),
        Arc::clone(parent),
        parent.order(),
        |h, u| g.mul(sub.into_parent[h], u),
        |u, x| g.mul(u, x),
    )
}

/// `Ind_H^P`: `P` as a `(P, H)`-biset.
pub fn induction_biset(parent: &Arc<GroupTable>, sub: &SubgroupMap) -> Result<BisetTable, CfError> {
    let g = Arc::clone(parent);
    BisetTable::new(
        Arc::clone(parent),
        Arc::clone(&sub.group),
        parent.order(),
        |q, u| g.mul(q, u),
        |u, h| g.mul(u, sub.into_parent[h]),
    )
}

/// `Inf_{P/N}^P`: `P/N` as a `(P, P/N)`-biset.
pub fn inflation_biset(
    parent: &Arc<GroupTable>,
    quot: &QuotientMap,
) -> Result<BisetTable, CfError> {
    let q = Arc::clone(&quot.group);
    BisetTable::new(
        Arc::clone(parent),
        Arc::clone(&quot.group),
        quot.group.order(),
        |g, y| q.mul(quot.projection[g], y),
        |y, z| q.mul(y, z),
    )
}

/// `Def^P_{P/N}`: `P/N` as a `(P/N, P)`-biset.
pub fn deflation_biset(
    parent: &Arc<GroupTable>,
    quot: &QuotientMap,
) -> Result<BisetTable, CfError> {
    let q = Arc::clone(&quot.group);
    BisetTable::new(
        Arc::clone(&quot.group),
        Arc::clone(parent),
        quot.group.order(),
        |z, y| q.mul(z, y),
        |y, g| q.mul(y, quot.projection[g]),
    )
}

/// Transport along an isomorphism `map: source -> target`, as a
/// `(target, source)`-biset.
pub fn iso_biset(
    source: &Arc<GroupTable>,
    target: &Arc<GroupTable>,
    map: &[usize],
) -> Result<BisetTable, CfError> {
    let n = source.order();
    if map.len() != n || target.order() != n {
        return Err(CfError::NotAnIsomorphism);
    }
    let mut hit = vec![false; n];
    for &y in map {
        if y >= n || std::mem::replace(&mut hit[y], true) {
            return Err(CfError::NotAnIsomorphism);
        }
    }
    for x in 0..n {
        for &g in source.generator_indices() {
            if map[source.mul(x, g)] != target.mul(map[x], map[g]) {
                return Err(CfError::NotAnIsomorphism);
            }
        }
    }
    let t = Arc::clone(target);
    BisetTable::new(
        Arc::clone(target),
        Arc::clone(source),
        n,
        |q, y| t.mul(q, y),
        |y, x| t.mul(y, map[x]),
    )
}

/// `V x_Q U`: the `Q`-orbits on `V x U` under `(v, u).q = (v.q, q^-1.u)`.
pub fn compose_bisets(v: &BisetTable, u: &BisetTable) -> Result<BisetTable, CfError> {
    if !same_group(v.right(), u.left()) {
        return Err(CfError::GroupMismatch);
    }
    let q = u.left();
    let (nv, nu) = (v.points(), u.points());
    let code = |a: usize, b: usize| a * nu + b;
    let mut orbit_of = vec![usize::MAX; nv * nu];
    let mut reps: Vec<(usize, usize)> = Vec::new();
    for a in 0..nv {
        for b in 0..nu {
            if orbit_of[code(a, b)] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push((a, b));
            for g in 0..q.order() {
                let va = v.right_act(a, g);
                let ub = u.left_act(q.inverse(g), b);
                orbit_of[code(va, ub)] = id;
            }
        }
    }
    BisetTable::new(
        Arc::clone(v.left()),
        Arc::clone(u.right()),
        reps.len(),
        |r, k| {
            let (a, b) = reps[k];
            orbit_of[code(v.left_act(r, a), b)]
        },
        |k, x| {
            let (a, b) = reps[k];
            orbit_of[code(a, u.right_act(b, x))]
        },
    )
}

#[cfg(test)]
mod tests {
    use super::super::{cf_apply, cf_apply_checked, rational};
    use super::*;
    use crate::constructions::{build, parse_spec};
    use crate::group::{center, Subgroup};

    fn group(spec: &str) -> Arc<GroupTable> {
        Arc::new(build(&parse_spec(spec).unwrap()).unwrap())
    }

    fn sample(g: &Arc<GroupTable>) -> ClassFunction {
        let values = (0..g.class_count())
            .map(|c| {
                Rational::new(
                    BigInt::from(3 * c as i64 + 1),
                    BigInt::from(c as i64 % 3 + 1),
                )
            })
            .collect();
        ClassFunction::new(Arc::clone(g), values).unwrap()
    }

    #[test]
    fn identity_biset_is_identity() {
        for spec in ["C(9)", "ES+(3)", "M(3,3)"] {
            let g = group(spec);
            let f = sample(&g);
            let id = identity_biset(&g);
            assert_eq!(cf_apply(&id, &f).unwrap(), f);
            assert_eq!(cf_apply_checked(&id, &f).unwrap(), f);
        }
    }

    #[test]
    fn restriction_to_trivial_reads_identity_value() {
        let g = group("ES+(3)");
        let f = sample(&g);
        let triv = SubgroupMap::new(&g.trivial_subgroup()).unwrap();
        let res = restriction_biset(&g, &triv).unwrap();
        let out = cf_apply(&res, &f).unwrap();
        assert_eq!(out.values(), &[f.value(0).clone()]);
    }

    #[test]
    fn deflation_to_trivial_averages() {
        let g = group("M(3,3)");
        let f = sample(&g);
        let q = QuotientMap::new(&g.whole()).unwrap();
        let def = deflation_biset(&g, &q).unwrap();
        let out = cf_apply(&def, &f).unwrap();
        let mut total = Rational::zero();
        for x in 0..g.order() {
            total += f.at(x);
        }
        assert_eq!(out.values(), &[total / rational(27)]);
    }

    #[test]
    fn inflation_after_deflation_averages_over_cosets() {
        let g = group("ES+(3)");
        let f = sample(&g);
        let z = center(&g);
        let q = QuotientMap::new(&z).unwrap();
        let def = deflation_biset(&g, &q).unwrap();
        let inf = inflation_biset(&g, &q).unwrap();
        let out = cf_apply(&inf, &cf_apply(&def, &f).unwrap()).unwrap();
        for s in 0..g.order() {
            let mut avg = Rational::zero();
            for &c in z.members() {
                avg += f.at(g.mul(s, c));
            }
            assert_eq!(out.at(s), &(avg / rational(3)), "at {s}");
        }
    }

    #[test]
    fn restriction_in_c9() {
        let g = group("C(9)");
        let f = sample(&g);
        let a = g.generator_indices()[0];
        let h = Subgroup::generated(&g, &[g.power(a, 3)]);
        let hm = SubgroupMap::new(&h).unwrap();
        let out = cf_apply(&restriction_biset(&g, &hm).unwrap(), &f).unwrap();
        for y in 0..hm.group.order() {
            assert_eq!(out.at(y), f.at(hm.into_parent[y]));
        }
    }

    #[test]
    fn composition_with_identity() {
        let g = group("ES+(3)");
        let z = center(&g);
        let q = QuotientMap::new(&z).unwrap();
        let def = deflation_biset(&g, &q).unwrap();
        let left = compose_bisets(&identity_biset(&q.group), &def).unwrap();
        let right = compose_bisets(&def, &identity_biset(&g)).unwrap();
        assert_eq!(left.points(), def.points());
        assert_eq!(right.points(), def.points());
        let f = sample(&g);
        let expected = cf_apply(&def, &f).unwrap();
        assert_eq!(cf_apply(&left, &f).unwrap(), expected);
        assert_eq!(cf_apply(&right, &f).unwrap(), expected);
    }

    #[test]
    fn degenerate_chain_is_constant() {
        // Inf from the trivial quotient after Def to it: constant average
        let g = group("C(9) x C(3)");
        let f = sample(&g);
        let q = QuotientMap::new(&g.whole()).unwrap();
        let chain = compose_bisets(
            &inflation_biset(&g, &q).unwrap(),
            &deflation_biset(&g, &q).unwrap(),
        )
        .unwrap();
        let out = cf_apply(&chain, &f).unwrap();
        assert!(out.values().iter().all(|v| v == out.value(0)));
    }

    #[test]
    fn mismatches_rejected() {
        let g = group("C(9)");
        let h = group("C(3)");
        let id_g = identity_biset(&g);
        let id_h = identity_biset(&h);
        assert_eq!(
            compose_bisets(&id_g, &id_h).unwrap_err(),
            CfError::GroupMismatch
        );
        assert_eq!(
            cf_apply(&id_g, &sample(&h)).unwrap_err(),
            CfError::GroupMismatch
        );
        let bad = BisetTable::new(
            Arc::clone(&h),
            Arc::clone(&h),
            3,
            |_, u| (u + 1) % 3,
            |u, _| u,
        );
        assert!(matches!(bad, Err(CfError::NotABiset(_))));
        assert_eq!(
            iso_biset(&g, &g, &[0; 9]).unwrap_err(),
            CfError::NotAnIsomorphism
        );
    }
}
