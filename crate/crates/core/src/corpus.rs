//! Built-in test groups, as spec strings.

/// Reference decompositions of the fifteen groups of order 81, in the
/// order of the external catalog they were computed from.
pub const ORDER_81_LINES: [&str; 15] = [
    "[ [ 1, 1 ], [ 3, 1 ], [ 9, 1 ], [ 27, 1 ], [ 81, 1 ] ]",
    "[ [ 1, 1 ], [ 3, 4 ], [ 9, 12 ] ]",
    "[ [ 1, 1 ], [ 3, 7 ], [ 9, 3 ] ]",
    "[ [ 1, 1 ], [ 3, 7 ], [ 9, 3 ] ]",
    "[ [ 1, 1 ], [ 3, 4 ], [ 9, 3 ], [ 27, 3 ] ]",
    "[ [ 1, 1 ], [ 3, 4 ], [ 9, 4 ] ]",
    "[ [ 1, 1 ], [ 3, 8 ] ]",
    "[ [ 1, 1 ], [ 3, 5 ], [ 9, 1 ] ]",
    "[ [ 1, 1 ], [ 3, 5 ], [ 9, 1 ] ]",
    "[ [ 1, 1 ], [ 3, 5 ], [ 9, 1 ] ]",
    "[ [ 1, 1 ], [ 3, 13 ], [ 9, 9 ] ]",
    "[ [ 1, 1 ], [ 3, 16 ] ]",
    "[ [ 1, 1 ], [ 3, 16 ] ]",
    "[ [ 1, 1 ], [ 3, 13 ], [ 9, 1 ] ]",
    "[ [ 1, 1 ], [ 3, 40 ] ]",
];

/// Groups of order 81 that the spec language can build.
pub const ORDER_81: [&str; 8] = [
    "C(81)",
    "C(9) x C(9)",
    "C(27) x C(3)",
    "C(9) x C(3) x C(3)",
    "EA(3,4)",
    "SD(3,3,1,10)",
    "ES+(3) x C(3)",
    "M(3,3) x C(3)",
];

pub const NONABELIAN: [&str; 14] = [
    "ES+(3)",
    "M(3,3)",
    "SD(3,3,1,10)",
    "SD(3,2,2,4)",
    "ES+(3) x C(3)",
    "M(3,3) x C(3)",
    "M(3,5)",
    "SD(3,3,2,4)",
    "ES+(3) x C(9)",
    "M(3,6)",
    "ES+(3) x ES+(3)",
    "M(3,3) x C(3) x C(3) x C(3)",
    "ES+(5)",
    "M(5,3)",
];

/// Nonincreasing partitions of `n`.
fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every abelian group of order `p^k` for `k <= max_k`, the trivial group
/// first.
pub fn abelian_up_to(p: u64, max_k: u32) -> Vec<String> {
    let mut out = vec!["C(1)".to_string()];
    for k in 1..=max_k {
        for part in partitions(k, k) {
            let exps: Vec<String> = part.iter().map(u32::to_string).collect();
            out.push(format!("Ab({p},[{}])", exps.join(",")));
        }
    }
    out
}

/// All abelian groups of order dividing `3^6` plus samples at `p = 5, 7`.
pub fn abelian() -> Vec<String> {
    let mut out = abelian_up_to(3, 6);
    out.extend(
        [
            "C(625)",
            "Ab(5,[2,2])",
            "Ab(5,[3,1])",
            "Ab(5,[2,1,1])",
            "EA(5,4)",
            "C(343)",
            "Ab(7,[2,1])",
            "EA(7,3)",
        ]
        .map(String::from),
    );
    out
}

pub fn full() -> Vec<String> {
    let mut out = abelian();
    out.extend(NONABELIAN.map(String::from));
    out
}

/// Pairs of corpus groups whose direct product has order at most `3^7`.
pub const PRODUCT_PAIRS: [(&str, &str); 12] = [
    ("C(3)", "C(3)"),
    ("C(9)", "C(3)"),
    ("C(27)", "C(9)"),
    ("Ab(3,[2,1])", "Ab(3,[2,1])"),
    ("EA(3,3)", "C(81)"),
    ("ES+(3)", "C(3)"),
    ("ES+(3)", "ES+(3)"),
    ("M(3,3)", "C(27)"),
    ("SD(3,3,1,10)", "C(3)"),
    ("SD(3,3,1,10)", "ES+(3)"),
    ("SD(3,2,2,4)", "C(9)"),
    ("ES+(5)", "C(5)"),
];
