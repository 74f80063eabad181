//! Central functions with exact rational values, the biset action on them,
//! and the action of `p`-adic units.
//!
//! A `(Q, P)`-biset `U` sends a central function `f` on `P` to
//! `s -> (1/|P|) * sum { f(x) : u in U, x in P, s.u = u.x }` on `Q`. Every
//! identity the decomposition depends on is checked here with exact equality.

mod bisets;
pub mod chains;
mod criteria;

use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, Signed, Zero};
use thiserror::Error;

use crate::arith;
use crate::group::{GroupError, GroupTable};

pub use bisets::{
    compose_bisets, deflation_biset, identity_biset, induction_biset, inflation_biset, iso_biset,
    restriction_biset, BisetTable, CfMap, QuotientMap, SubgroupMap,
};
pub use criteria::{
    fn_space, lemma_sums, mobius_lattice, res_def_injectivity, vanishing_sum,
    ElementaryAbelianLattice, FnSpace, InjectivityReport,
};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CfError {
    #[error("class function or biset belongs to a different group")]
    GroupMismatch,
    #[error("expected {expected} class values, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("actions do not form a biset: {0}")]
    NotABiset(String),
    #[error("map is not an isomorphism")]
    NotAnIsomorphism,
    #[error("modulus {modulus} is not a multiple of the exponent {exponent}")]
    BadModulus { modulus: u64, exponent: u64 },
    #[error("{zeta} is not a unit modulo {p}")]
    NotAUnit { zeta: i64, p: u64 },
    #[error("center is cyclic")]
    CyclicCenter,
    #[error("bad configuration: {0}")]
    BadConfiguration(String),
    #[error("result is not constant on conjugacy classes of the target")]
    NotCentral,
    #[error("internal check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

pub(crate) fn same_group(a: &GroupTable, b: &GroupTable) -> bool {
    std::ptr::eq(a, b) || a.elements() == b.elements()
}

pub fn rational(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A central function, stored as one value per conjugacy class.
#[derive(Clone)]
pub struct ClassFunction {
    group: Arc<GroupTable>,
    values: Vec<Rational>,
}

impl PartialEq for ClassFunction {
    fn eq(&self, other: &Self) -> bool {
        same_group(&self.group, &other.group) && self.values == other.values
    }
}

impl fmt::Debug for ClassFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.values.iter().map(ToString::to_string).collect();
        write!(f, "ClassFunction[{}]", vals.join(", "))
    }
}

impl ClassFunction {
    pub fn new(group: Arc<GroupTable>, values: Vec<Rational>) -> Result<Self, CfError> {
        let expected = group.class_count();
        if values.len() != expected {
            return Err(CfError::WrongLength {
                expected,
                found: values.len(),
            });
        }
        Ok(ClassFunction { group, values })
    }

    pub fn zero(group: Arc<GroupTable>) -> Self {
        let k = group.class_count();
        ClassFunction {
            group,
            values: vec![Rational::zero(); k],
        }
    }

    /// Characteristic function of class `c`.
    pub fn indicator(group: Arc<GroupTable>, c: usize) -> Self {
        let mut f = Self::zero(group);
        f.values[c] = rational(1);
        f
    }

    pub fn group(&self) -> &Arc<GroupTable> {
        &self.group
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, class: usize) -> &Rational {
        &self.values[class]
    }

    /// Value at an element.
    pub fn at(&self, element: usize) -> &Rational {
        &self.values[self.group.classes().class_of(element)]
    }

    pub fn add_scaled(&mut self, other: &ClassFunction, scale: &Rational) -> Result<(), CfError> {
        if !same_group(&self.group, &other.group) {
            return Err(CfError::GroupMismatch);
        }
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x += scale * y;
        }
        Ok(())
    }

    pub fn max_abs(&self) -> Rational {
        self.values
            .iter()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// Applies `CF(U)` to `f`. The sum is evaluated at one representative per
/// class of the left group.
pub fn cf_apply(biset: &BisetTable, f: &ClassFunction) -> Result<ClassFunction, CfError> {
    biset.linear_map().apply(f)
}

/// Same as [`cf_apply`] but evaluates the sum at every element of the left
/// group and fails if the result is not constant on classes.
pub fn cf_apply_checked(biset: &BisetTable, f: &ClassFunction) -> Result<ClassFunction, CfError> {
    if !same_group(f.group(), biset.right()) {
        return Err(CfError::GroupMismatch);
    }
    let q = biset.left();
    let p = biset.right();
    let scale = Rational::new(BigInt::from(1), BigInt::from(p.order()));
    let mut values: Vec<Option<Rational>> = vec![None; q.class_count()];
    for s in 0..q.order() {
        let mut total = Rational::zero();
        for u in 0..biset.points() {
            let su = biset.left_act(s, u);
            for x in 0..p.order() {
                if biset.right_act(u, x) == su {
                    total += f.at(x);
                }
            }
        }
        total *= &scale;
        let slot = &mut values[q.classes().class_of(s)];
        match slot {
            None => *slot = Some(total),
            Some(v) if *v == total => {}
            Some(_) => return Err(CfError::NotCentral),
        }
    }
    ClassFunction::new(
        Arc::clone(q),
        values
            .into_iter()
            .map(|v| v.expect("every class visited"))
            .collect(),
    )
}

/// An element of `Z_p^x` acting through its residue modulo `p^r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnitAction {
    pub zeta: i64,
    pub modulus: u64,
}

impl UnitAction {
    pub fn new(zeta: i64, p: u64, r: u32) -> Result<Self, CfError> {
        if arith::gcd(zeta.unsigned_abs(), p) != 1 {
            return Err(CfError::NotAUnit { zeta, p });
        }
        Ok(UnitAction {
            zeta,
            modulus: p.pow(r),
        })
    }

    pub fn compose(self, other: UnitAction) -> UnitAction {
        let m = self.modulus.max(other.modulus) as i128;
        UnitAction {
            zeta: ((self.zeta as i128 * other.zeta as i128).rem_euclid(m)) as i64,
            modulus: m as u64,
        }
    }

    /// The inverse unit modulo the same modulus.
    pub fn inverse(self) -> UnitAction {
        let z = self.zeta.rem_euclid(self.modulus as i64) as u64;
        UnitAction {
            zeta: arith::inverse_mod(z, self.modulus).expect("unit") as i64,
            modulus: self.modulus,
        }
    }
}

/// `f -> (s -> f(s^zeta))`.
pub fn zeta_apply(unit: UnitAction, f: &ClassFunction) -> Result<ClassFunction, CfError> {
    let group = f.group();
    let exponent = group.exponent();
    if !unit.modulus.is_multiple_of(exponent) {
        return Err(CfError::BadModulus {
            modulus: unit.modulus,
            exponent,
        });
    }
    let e = unit.zeta.rem_euclid(unit.modulus as i64);
    let classes = group.classes();
    let values = (0..classes.count())
        .map(|c| f.values[classes.class_of(group.power(classes.rep(c), e))].clone())
        .collect();
    ClassFunction::new(Arc::clone(group), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build, parse_spec};

    fn group(spec: &str) -> Arc<GroupTable> {
        Arc::new(build(&parse_spec(spec).unwrap()).unwrap())
    }

    fn sample(g: &Arc<GroupTable>) -> ClassFunction {
        let values = (0..g.class_count())
            .map(|c| {
                Rational::new(
                    BigInt::from(c as i64 * 7 - 5),
                    BigInt::from(c as i64 % 4 + 1),
                )
            })
            .collect();
        ClassFunction::new(Arc::clone(g), values).unwrap()
    }

    #[test]
    fn wrong_length_rejected() {
        let g = group("C(3)");
        assert_eq!(
            ClassFunction::new(g, vec![rational(1)]).unwrap_err(),
            CfError::WrongLength {
                expected: 3,
                found: 1
            }
        );
    }

    #[test]
    fn unit_one_is_identity() {
        let g = group("SD(3,3,1,10)");
        let f = sample(&g);
        let one = UnitAction::new(1, 3, 3).unwrap();
        assert_eq!(zeta_apply(one, &f).unwrap(), f);
    }

    #[test]
    fn unit_action_multiplies() {
        let g = group("M(3,3) x C(3)");
        let f = sample(&g);
        for (a, b) in [(2, 4), (5, 7), (-1, 10), (13, 13)] {
            let za = UnitAction::new(a, 3, 2).unwrap();
            let zb = UnitAction::new(b, 3, 2).unwrap();
            let lhs = zeta_apply(za, &zeta_apply(zb, &f).unwrap()).unwrap();
            let rhs = zeta_apply(za.compose(zb), &f).unwrap();
            assert_eq!(lhs, rhs);
            let back = zeta_apply(za.inverse(), &zeta_apply(za, &f).unwrap()).unwrap();
            assert_eq!(back, f);
        }
    }

    #[test]
    fn unit_action_commutes_with_bisets() {
        let g = group("SD(3,3,1,10)");
        let f = sample(&g);
        let a = g.generator_indices()[0];
        let h = SubgroupMap::new(&crate::group::Subgroup::generated(&g, &[a])).unwrap();
        let z = crate::group::center(&g);
        let q = QuotientMap::new(&z).unwrap();
        let res = restriction_biset(&g, &h).unwrap();
        let def = deflation_biset(&g, &q).unwrap();
        for zeta in [2, 4, 5, 26] {
            let u = UnitAction::new(zeta, 3, 3).unwrap();
            for biset in [&res, &def] {
                let lhs = cf_apply(biset, &zeta_apply(u, &f).unwrap()).unwrap();
                let rhs = zeta_apply(u, &cf_apply(biset, &f).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn checked_apply_agrees() {
        let g = group("ES+(3)");
        let f = sample(&g);
        let q = QuotientMap::new(&crate::group::center(&g)).unwrap();
        let def = deflation_biset(&g, &q).unwrap();
        assert_eq!(
            cf_apply_checked(&def, &f).unwrap(),
            cf_apply(&def, &f).unwrap()
        );
    }

    #[test]
    fn unit_errors() {
        assert_eq!(
            UnitAction::new(6, 3, 2).unwrap_err(),
            CfError::NotAUnit { zeta: 6, p: 3 }
        );
        let g = group("C(27)");
        let z = UnitAction::new(2, 3, 2).unwrap();
        assert_eq!(
            zeta_apply(z, &sample(&g)).unwrap_err(),
            CfError::BadModulus {
                modulus: 9,
                exponent: 27
            }
        );
    }
}
