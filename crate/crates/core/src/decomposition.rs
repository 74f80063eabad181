//! Roquette-category decomposition of a p-group, `p` odd.
//!
//! For every non-identity class with representative `y` we find the least
//! `p^n` such that `y^(1+p^n)` is conjugate to `y`. Cumulative counts of these
//! indices give `l_n`, the number of classes fixed by `s -> s^(1+p^n)`, and the
//! multiplicity of the edge of `C_{p^m}` is
//! `a_m = (l_m - l_{m-1}) / (p^(m-1) (p-1))`.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::group::{ClassData, GroupTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("the order must be odd")]
    OddPrimeRequired,
    #[error("the group must be a p-group (order {order})")]
    NotAPGroup { order: u64 },
    #[error("p^(m-1)(p-1) = {divisor} does not divide {difference} at m = {m}")]
    DivisibilityViolation {
        m: u32,
        difference: u64,
        divisor: u64,
    },
    #[error("power loop for class {class} ran past the exponent")]
    NonTermination { class: usize },
    #[error("multiplicity of p^{m}: difference form gives {difference_form}, counting form gives {counting_form}")]
    FormulaMismatch {
        m: u32,
        difference_form: u64,
        counting_form: u64,
    },
}

/// `l_0, .., l_r` where `p^r` is the exponent of the group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LSequence {
    pub p: u64,
    pub values: Vec<u64>,
}

impl LSequence {
    /// `l_n`, extended past the exponent by its final value.
    pub fn get(&self, n: usize) -> u64 {
        self.values
            .get(n)
            .copied()
            .unwrap_or_else(|| *self.values.last().expect("l_0 is always present"))
    }

    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }
}

/// `1 + sum a_m ∂C_{p^m}`, stored as the nonzero `a_m` keyed by `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub p: Option<u64>,
    pub order: u64,
    pub multiplicities: BTreeMap<u32, u64>,
}

impl Decomposition {
    /// `(q, mult)` pairs starting with the trivial summand `(1, 1)`.
    pub fn summands(&self) -> Vec<(u64, u64)> {
        let p = self.p.unwrap_or(1);
        std::iter::once((1, 1))
            .chain(
                self.multiplicities
                    .iter()
                    .filter(|(_, &a)| a > 0)
                    .map(|(&m, &a)| (p.pow(m), a)),
            )
            .collect()
    }

    pub fn multiplicity(&self, m: u32) -> u64 {
        self.multiplicities.get(&m).copied().unwrap_or(0)
    }

    /// `1 + sum a_m p^(m-1) (p-1)`, which must equal the class count.
    pub fn class_count(&self) -> u64 {
        let p = self.p.unwrap_or(1);
        1 + self
            .multiplicities
            .iter()
            .map(|(&m, &a)| a * p.pow(m - 1) * (p - 1))
            .sum::<u64>()
    }
}

/// Output of the fast algorithm with both multiplicity formulas.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub decomposition: Decomposition,
    pub l_sequence: LSequence,
    /// Least `p^n` per class; `None` for the identity class.
    pub minimal_indices: Vec<Option<u64>>,
    /// Multiplicities from the per-class counting form, before comparison.
    pub counting_form: BTreeMap<u32, u64>,
}

/// Least `p^n` (`n >= 1`) with `rep(c)^(1+p^n)` in class `c`.
///
/// `u` runs through `y^(p^n)` by repeated `p`-th powers and `y * u` is tested
/// for membership in the class.
pub fn minimal_power_index(
    group: &GroupTable,
    classes: &ClassData,
    c: usize,
) -> Result<u64, DecompositionError> {
    let p = group
        .prime()
        .ok_or(DecompositionError::NonTermination { class: c })?;
    let r = arith::log_exact(group.exponent(), p).unwrap_or(0);
    minimal_power_index_bounded(group, classes, c, p, r)
}

fn minimal_power_index_bounded(
    group: &GroupTable,
    classes: &ClassData,
    c: usize,
    p: u64,
    r: u32,
) -> Result<u64, DecompositionError> {
    let y = group.element(classes.rep(c));
    let mut u = y.clone();
    let mut pn = 1u64;
    for _ in 0..r.max(1) {
        pn *= p;
        u = u.pow(p);
        let z = group
            .index_of(&y.compose(&u))
            .expect("power of a group element lies in the group");
        if classes.class_of(z) == c {
            return Ok(pn);
        }
    }
    Err(DecompositionError::NonTermination { class: c })
}

/// `l_n` for `n = 0..=r` by cumulative counting of minimal indices.
pub fn l_sequence(group: &GroupTable) -> Result<LSequence, DecompositionError> {
    analyze(group).map(|a| a.l_sequence)
}

/// Multiplicities `a_m` of the edges of `C_{p^m}`.
pub fn decompose(group: &GroupTable) -> Result<Decomposition, DecompositionError> {
    analyze(group).map(|a| a.decomposition)
}

/// Runs the fast algorithm and cross-checks the two multiplicity formulas.
pub fn analyze(group: &GroupTable) -> Result<Analysis, DecompositionError> {
    let order = group.order() as u64;
    if order == 1 {
        return Ok(Analysis {
            decomposition: Decomposition {
                p: group.prime(),
                order,
                multiplicities: BTreeMap::new(),
            },
            l_sequence: LSequence {
                p: group.prime().unwrap_or(1),
                values: vec![1],
            },
            minimal_indices: vec![None],
            counting_form: BTreeMap::new(),
        });
    }
    let primes = arith::prime_divisors(order);
    if primes.len() != 1 {
        return Err(DecompositionError::NotAPGroup { order });
    }
    let p = primes[0];
    if p == 2 {
        return Err(DecompositionError::OddPrimeRequired);
    }
    let r = arith::log_exact(group.exponent(), p).expect("exponent of a p-group is a p-power");
    let classes = group.classes();

    let mut minimal_indices = vec![None];
    // exactly_at[n] = number of classes whose minimal index is p^n
    let mut exactly_at = vec![0u64; r as usize + 1];
    for c in 1..classes.count() {
        let pn = minimal_power_index_bounded(group, classes, c, p, r)?;
        exactly_at[arith::log_exact(pn, p).expect("p-power") as usize] += 1;
        minimal_indices.push(Some(pn));
    }

    let mut values = vec![1u64];
    for n in 1..=r as usize {
        values.push(values[n - 1] + exactly_at[n]);
    }

    let mut multiplicities = BTreeMap::new();
    let mut counting_form = BTreeMap::new();
    for m in 1..=r {
        let divisor = p.pow(m - 1) * (p - 1);
        let difference = values[m as usize] - values[m as usize - 1];
        if difference % divisor != 0 {
            return Err(DecompositionError::DivisibilityViolation {
                m,
                difference,
                divisor,
            });
        }
        let a = difference / divisor;
        // code form: c_n * p / ((p-1) p^n)
        let pn = p.pow(m);
        let numerator = exactly_at[m as usize] * p;
        let denominator = (p - 1) * pn;
        if !numerator.is_multiple_of(denominator) {
            return Err(DecompositionError::DivisibilityViolation {
                m,
                difference: numerator,
                divisor: denominator,
            });
        }
        let b = numerator / denominator;
        if a != b {
            return Err(DecompositionError::FormulaMismatch {
                m,
                difference_form: a,
                counting_form: b,
            });
        }
        if a > 0 {
            multiplicities.insert(m, a);
        }
        if b > 0 {
            counting_form.insert(m, b);
        }
    }

    Ok(Analysis {
        decomposition: Decomposition {
            p: Some(p),
            order,
            multiplicities,
        },
        l_sequence: LSequence { p, values },
        minimal_indices,
        counting_form,
    })
}

/// `l_n` computed separately for each `n` by testing every class
/// representative, without the minimal-index loop.
pub fn l_value_direct(group: &GroupTable, n: u32) -> u64 {
    if n == 0 {
        return 1;
    }
    let p = group.prime().unwrap_or(1);
    let classes = group.classes();
    let e = 1 + p.pow(n) as i64;
    (0..classes.count())
        .filter(|&c| classes.class_of(group.power(classes.rep(c), e)) == c)
        .count() as u64
}

/// Baseline for benchmarking: for each `n`, scan every element `s` and mark
/// the class of `s` when `s^(1+p^n)` lies in it.
pub fn l_sequence_naive(group: &GroupTable) -> LSequence {
    let p = group.prime().unwrap_or(1);
    let r = if p > 1 {
        arith::log_exact(group.exponent(), p).unwrap_or(0)
    } else {
        0
    };
    let classes = group.classes();
    let mut values = vec![1u64];
    for n in 1..=r {
        let e = 1 + p.pow(n) as i64;
        let mut marked = vec![false; classes.count()];
        for s in 0..group.order() {
            let c = classes.class_of(s);
            if classes.class_of(group.power(s, e)) == c {
                marked[c] = true;
            }
        }
        values.push(marked.iter().filter(|&&m| m).count() as u64);
    }
    LSequence { p, values }
}

/// `[ [ 1, 1 ], [ 3, 4 ], [ 9, 4 ] ]`, the list layout GAP prints.
pub fn render_gap(d: &Decomposition) -> String {
    let parts: Vec<String> = d
        .summands()
        .iter()
        .map(|(q, a)| format!("[ {q}, {a} ]"))
        .collect();
    format!("[ {} ]", parts.join(", "))
}

#[derive(Serialize)]
struct JsonSummand {
    q: u64,
    mult: u64,
}

#[derive(Serialize)]
struct JsonDecomposition {
    p: Option<u64>,
    order: u64,
    summands: Vec<JsonSummand>,
}

/// `{"p":3,"order":81,"summands":[{"q":1,"mult":1},...]}`.
pub fn render_json(d: &Decomposition) -> String {
    let doc = JsonDecomposition {
        p: d.p,
        order: d.order,
        summands: d
            .summands()
            .into_iter()
            .map(|(q, mult)| JsonSummand { q, mult })
            .collect(),
    };
    serde_json::to_string(&doc).expect("plain data serializes")
}
