//! Random chains of elementary bisets, for exercising the composition law
//! `CF(V x_Q U) = CF(V) o CF(U)`.

use std::sync::Arc;

use num::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use super::bisets::{
    compose_bisets, deflation_biset, identity_biset, induction_biset, inflation_biset, iso_biset,
    restriction_biset, BisetTable, QuotientMap, SubgroupMap,
};
use super::{cf_apply, CfError, ClassFunction, Rational};
use crate::group::{GroupTable, Permutation, Subgroup};

/// A sequence of bisets `U_1, .., U_k` where `U_i` goes from the group of
/// step `i - 1` to the group of step `i`.
#[derive(Debug, Clone)]
pub struct Chain {
    pub bisets: Vec<BisetTable>,
    pub steps: Vec<&'static str>,
}

enum Return {
    Induce(Arc<GroupTable>, SubgroupMap),
    Inflate(Arc<GroupTable>, QuotientMap),
    Transport(Arc<GroupTable>, Vec<usize>),
}

/// The same group with its points relabeled and its generators shuffled,
/// plus the isomorphism from `group` to the copy.
fn relabeled_copy(
    group: &Arc<GroupTable>,
    rng: &mut impl Rng,
) -> Result<(Arc<GroupTable>, Vec<usize>), CfError> {
    let mut images: Vec<usize> = (0..group.degree()).collect();
    images.shuffle(rng);
    let sigma = Permutation::from_images(images)?;
    let sigma_inv = sigma.inverse();
    let conj = |g: &Permutation| sigma_inv.compose(g).compose(&sigma);
    let mut gens: Vec<Permutation> = group
        .generator_indices()
        .iter()
        .map(|&g| conj(group.element(g)))
        .collect();
    gens.shuffle(rng);
    let copy = GroupTable::close_on(group.degree(), &gens, group.prime(), group.order())?;
    let map = group
        .elements()
        .iter()
        .map(|e| copy.index_of(&conj(e)).expect("conjugate lies in the copy"))
        .collect();
    Ok((Arc::new(copy), map))
}

/// Builds a chain of `len` elementary bisets starting at `start`.
///
/// Each step restricts to a random subgroup, deflates by a random normal
/// subgroup, transports to a relabeled copy, returns along an earlier step
/// (induction, inflation or inverse transport), or applies the identity.
pub fn random_chain(
    start: &Arc<GroupTable>,
    len: usize,
    rng: &mut impl Rng,
) -> Result<Chain, CfError> {
    let mut current = Arc::clone(start);
    let mut history: Vec<Return> = Vec::new();
    let mut bisets = Vec::with_capacity(len);
    let mut steps = Vec::with_capacity(len);
    while bisets.len() < len {
        let choice = rng.gen_range(0..5);
        let n = current.order();
        match choice {
            0 => {
                let picks: Vec<usize> = (0..rng.gen_range(0..=2))
                    .map(|_| rng.gen_range(0..n))
                    .collect();
                let sub = SubgroupMap::new(&Subgroup::generated(&current, &picks))?;
                bisets.push(restriction_biset(&current, &sub)?);
                steps.push("res");
                let next = Arc::clone(&sub.group);
                history.push(Return::Induce(Arc::clone(&current), sub));
                current = next;
            }
            1 => {
                let normal = Subgroup::normal_closure(&current, &[rng.gen_range(0..n)]);
                let quot = QuotientMap::new(&normal)?;
                bisets.push(deflation_biset(&current, &quot)?);
                steps.push("def");
                let next = Arc::clone(&quot.group);
                history.push(Return::Inflate(Arc::clone(&current), quot));
                current = next;
            }
            2 => {
                let (copy, map) = relabeled_copy(&current, rng)?;
                bisets.push(iso_biset(&current, &copy, &map)?);
                steps.push("iso");
                let mut back = vec![0; map.len()];
                for (x, &y) in map.iter().enumerate() {
                    back[y] = x;
                }
                history.push(Return::Transport(Arc::clone(&current), back));
                current = copy;
            }
            3 => match history.pop() {
                Some(Return::Induce(parent, sub)) => {
                    bisets.push(induction_biset(&parent, &sub)?);
                    steps.push("ind");
                    current = parent;
                }
                Some(Return::Inflate(parent, quot)) => {
                    bisets.push(inflation_biset(&parent, &quot)?);
                    steps.push("inf");
                    current = parent;
                }
                Some(Return::Transport(original, back)) => {
                    bisets.push(iso_biset(&current, &original, &back)?);
                    steps.push("iso");
                    current = original;
                }
                None => continue,
            },
            _ => {
                bisets.push(identity_biset(&current));
                steps.push("id");
            }
        }
    }
    Ok(Chain { bisets, steps })
}

/// A class function with small random rational values.
pub fn random_class_function(group: &Arc<GroupTable>, rng: &mut impl Rng) -> ClassFunction {
    let values = (0..group.class_count())
        .map(|_| {
            Rational::new(
                BigInt::from(rng.gen_range(-20i64..=20)),
                BigInt::from(rng.gen_range(1i64..=9)),
            )
        })
        .collect();
    ClassFunction::new(Arc::clone(group), values).expect("one value per class")
}

impl Chain {
    /// `U_k x ... x U_1` as a single biset.
    pub fn composite(&self) -> Result<BisetTable, CfError> {
        let mut iter = self.bisets.iter();
        let first = iter
            .next()
            .ok_or(CfError::Internal("empty chain".into()))?
            .clone();
        iter.try_fold(first, |acc, next| compose_bisets(next, &acc))
    }

    /// Applies the bisets one after another.
    pub fn apply_stepwise(&self, f: &ClassFunction) -> Result<ClassFunction, CfError> {
        self.bisets
            .iter()
            .try_fold(f.clone(), |acc, b| cf_apply(b, &acc))
    }

    /// True when the composite and the stepwise application agree on `f`.
    pub fn composition_law_holds(&self, f: &ClassFunction) -> Result<bool, CfError> {
        Ok(cf_apply(&self.composite()?, f)? == self.apply_stepwise(f)?)
    }
}
