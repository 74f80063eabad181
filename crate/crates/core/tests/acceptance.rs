//! Acceptance criteria. Each criterion prints one PASS or FAIL line; the
//! process exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num::Zero;
use rand::rngs::StdRng;
use rand::SeedableRng;

use roquette::class_functions::{
    cf_apply, chains, deflation_biset, identity_biset, induction_biset, inflation_biset, iso_biset,
    mobius_lattice, res_def_injectivity, restriction_biset, vanishing_sum, zeta_apply, BisetTable,
    QuotientMap, SubgroupMap, UnitAction,
};
use roquette::cli::unmatched_lines;
use roquette::constructions::{build_with_cap, parse_spec};
use roquette::corpus;
use roquette::decomposition::{analyze, decompose, l_sequence_naive, l_value_direct, render_gap};
use roquette::group::{center, centralizer, GroupTable, Subgroup, DEFAULT_ELEMENT_CAP};
use roquette::oracles::{abelian_oracle, product_check, rank_consistency};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn group(spec: &str) -> Arc<GroupTable> {
    group_with_cap(spec, DEFAULT_ELEMENT_CAP)
}

fn group_with_cap(spec: &str, cap: usize) -> Arc<GroupTable> {
    let parsed = parse_spec(spec).unwrap_or_else(|e| panic!("{spec}: {e}"));
    Arc::new(build_with_cap(&parsed, cap).unwrap_or_else(|e| panic!("{spec}: {e}")))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn order_81_table() -> Outcome {
    let start = Instant::now();
    let mut outputs = Vec::new();
    for spec in corpus::ORDER_81 {
        let g = group(spec);
        let line = render_gap(&decompose(&g).map_err(|e| format!("{spec}: {e}"))?);
        if spec == "SD(3,3,1,10)" {
            ensure(line == "[ [ 1, 1 ], [ 3, 4 ], [ 9, 4 ] ]", || {
                format!("SD(3,3,1,10) gives {line}")
            })?;
        }
        outputs.push(line);
    }
    let unmatched = unmatched_lines(&outputs);
    ensure(unmatched.is_empty(), || {
        format!("no reference line for {unmatched:?}")
    })?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("{} groups matched in {elapsed:.2?}", outputs.len()))
}

fn cyclic_ladder() -> Outcome {
    for p in [3u64, 5, 7] {
        for m in 1..=4u32 {
            let d = decompose(&group(&format!("C({})", p.pow(m)))).map_err(|e| e.to_string())?;
            let expected: BTreeMap<u32, u64> = (1..=m).map(|i| (i, 1)).collect();
            ensure(d.multiplicities == expected, || {
                format!("C({}): {:?}", p.pow(m), d.multiplicities)
            })?;
        }
    }
    Ok("12 cyclic groups".into())
}

fn oracle_equivalence() -> Outcome {
    let specs = corpus::abelian();
    for spec in &specs {
        let g = group(spec);
        let oracle = abelian_oracle(&g).map_err(|e| format!("{spec}: {e}"))?;
        let fast = decompose(&g).map_err(|e| format!("{spec}: {e}"))?;
        ensure(oracle == fast, || {
            format!("{spec}: oracle {oracle:?}, fast {fast:?}")
        })?;
    }
    Ok(format!("{} abelian groups", specs.len()))
}

fn formulas_and_class_count() -> Outcome {
    let specs = corpus::full();
    let mut nonabelian = 0;
    let mut largest_nonabelian = 0;
    for spec in &specs {
        let g = group(spec);
        let analysis = analyze(&g).map_err(|e| format!("{spec}: {e}"))?;
        let d = &analysis.decomposition;
        ensure(analysis.counting_form == d.multiplicities, || {
            format!("{spec}: counting form {:?}", analysis.counting_form)
        })?;
        ensure(d.class_count() == g.class_count() as u64, || {
            format!("{spec}: {} vs {} classes", d.class_count(), g.class_count())
        })?;
        if !g.is_abelian() {
            nonabelian += 1;
            largest_nonabelian = largest_nonabelian.max(g.order());
        }
    }
    ensure(
        specs.len() >= 20 && nonabelian > 0 && largest_nonabelian == 729,
        || {
            format!(
                "corpus too small: {} groups, {nonabelian} nonabelian",
                specs.len()
            )
        },
    )?;
    Ok(format!(
        "{} groups, {nonabelian} nonabelian up to order {largest_nonabelian}",
        specs.len()
    ))
}

fn monotonicity_and_stabilization() -> Outcome {
    let specs = corpus::full();
    for spec in &specs {
        let g = group(spec);
        let l = analyze(&g).map_err(|e| format!("{spec}: {e}"))?.l_sequence;
        let direct: Vec<u64> = (0..l.values.len() as u32)
            .map(|n| l_value_direct(&g, n))
            .collect();
        ensure(l.is_monotone() && direct == l.values, || {
            format!("{spec}: cumulative {:?}, direct {direct:?}", l.values)
        })?;
        let k = g.class_count() as u64;
        let r = l.values.len() as u32 - 1;
        ensure(
            l.get(r as usize) == k && l_value_direct(&g, r + 1) == k,
            || format!("{spec}: l does not stabilize at {k}"),
        )?;
    }
    Ok(format!("{} groups", specs.len()))
}

fn product_multiplicativity() -> Outcome {
    for (a, b) in corpus::PRODUCT_PAIRS {
        let (g, h) = (group(a), group(b));
        ensure(g.order() * h.order() <= 3usize.pow(7), || {
            format!("{a} x {b} is too large")
        })?;
        let r = product_check(&g, &h).map_err(|e| format!("{a} x {b}: {e}"))?;
        ensure(r.holds(), || {
            format!("{a} x {b}: {:?} vs {:?}", r.product, r.expected)
        })?;
    }
    Ok(format!("{} pairs", corpus::PRODUCT_PAIRS.len()))
}

fn rank_consistency_all() -> Outcome {
    let specs = corpus::full();
    for spec in &specs {
        let g = group(spec);
        let d = decompose(&g).map_err(|e| format!("{spec}: {e}"))?;
        let r = rank_consistency(&g, &d).map_err(|e| format!("{spec}: {e}"))?;
        ensure(r.holds(), || {
            format!(
                "{spec}: observed {:?}, predicted {:?}",
                r.observed, r.predicted
            )
        })?;
    }
    Ok(format!("{} groups", specs.len()))
}

fn biset_composition() -> Outcome {
    let mut rng = StdRng::seed_from_u64(20_240_817);
    let groups: Vec<(String, Arc<GroupTable>)> = corpus::full()
        .into_iter()
        .map(|s| {
            let g = group(&s);
            (s, g)
        })
        .filter(|(_, g)| g.order() <= 27)
        .collect();
    let mut chains_checked = 0;
    for round in 0..4 {
        for (spec, g) in &groups {
            let f = chains::random_class_function(g, &mut rng);
            ensure(
                cf_apply(&identity_biset(g), &f).map_err(|e| e.to_string())? == f,
                || format!("{spec}: identity biset is not neutral"),
            )?;
            for len in 2..=4 {
                let chain = chains::random_chain(g, len, &mut rng).map_err(|e| e.to_string())?;
                let f = chains::random_class_function(g, &mut rng);
                let ok = chain.composition_law_holds(&f).map_err(|e| e.to_string())?;
                ensure(ok, || {
                    format!("{spec} round {round}: chain {:?}", chain.steps)
                })?;
                chains_checked += 1;
            }
        }
    }
    ensure(chains_checked >= 100, || {
        format!("only {chains_checked} chains")
    })?;
    Ok(format!(
        "{chains_checked} chains over {} groups",
        groups.len()
    ))
}

/// Identity, restriction, induction, deflation, inflation and a conjugation
/// isomorphism, all with `g` on one side.
fn elementary_bisets(g: &Arc<GroupTable>) -> Result<Vec<BisetTable>, String> {
    let err = |e: roquette::class_functions::CfError| e.to_string();
    let gens = g.generator_indices();
    let mut out = vec![identity_biset(g)];
    let subs = [
        Subgroup::generated(g, &gens[..1]),
        centralizer(g, &Subgroup::generated(g, &gens[..1])),
    ];
    for s in &subs {
        let map = SubgroupMap::new(s).map_err(err)?;
        out.push(restriction_biset(g, &map).map_err(err)?);
        out.push(induction_biset(g, &map).map_err(err)?);
    }
    let normals = [
        center(g),
        Subgroup::normal_closure(g, &gens[gens.len() - 1..]),
    ];
    for n in &normals {
        let map = QuotientMap::new(n).map_err(err)?;
        out.push(deflation_biset(g, &map).map_err(err)?);
        out.push(inflation_biset(g, &map).map_err(err)?);
    }
    let conj: Vec<usize> = (0..g.order()).map(|x| g.conjugate(x, gens[0])).collect();
    out.push(iso_biset(g, g, &conj).map_err(err)?);
    Ok(out)
}

fn unit_action() -> Outcome {
    let mut rng = StdRng::seed_from_u64(81);
    let specs = [
        "C(9)",
        "C(3) x C(3)",
        "ES+(3)",
        "M(3,3)",
        "C(27) x C(3)",
        "SD(3,3,1,10)",
        "M(3,3) x C(3)",
        "ES+(5)",
    ];
    let mut squares = 0;
    for spec in specs {
        let g = group(spec);
        let p = g.prime().expect("nontrivial");
        let r = roquette::arith::log_exact(g.exponent(), p).expect("p-power exponent");
        let units: Vec<i64> = (1..p.pow(r) as i64)
            .filter(|z| z % p as i64 != 0)
            .take(6)
            .collect();
        let bisets = elementary_bisets(&g)?;
        for &z in &units {
            let u = UnitAction::new(z, p, r).map_err(|e| e.to_string())?;
            for &w in &units {
                let v = UnitAction::new(w, p, r).map_err(|e| e.to_string())?;
                let f = chains::random_class_function(&g, &mut rng);
                let lhs = zeta_apply(u, &zeta_apply(v, &f).map_err(|e| e.to_string())?);
                let rhs = zeta_apply(u.compose(v), &f);
                ensure(
                    lhs.map_err(|e| e.to_string())? == rhs.map_err(|e| e.to_string())?,
                    || format!("{spec}: {z} * {w} is not multiplicative"),
                )?;
            }
            for b in &bisets {
                let f = chains::random_class_function(b.right(), &mut rng);
                let one = UnitAction::new(1, p, r).map_err(|e| e.to_string())?;
                ensure(zeta_apply(one, &f).map_err(|e| e.to_string())? == f, || {
                    format!("{spec}: 1 is not neutral")
                })?;
                let lhs = cf_apply(b, &zeta_apply(u, &f).map_err(|e| e.to_string())?);
                let rhs = zeta_apply(u, &cf_apply(b, &f).map_err(|e| e.to_string())?);
                ensure(
                    lhs.map_err(|e| e.to_string())? == rhs.map_err(|e| e.to_string())?,
                    || format!("{spec}: square fails for zeta = {z}"),
                )?;
                squares += 1;
            }
        }
    }
    Ok(format!(
        "{squares} commuting squares on {} groups",
        specs.len()
    ))
}

fn rationality_criterion() -> Outcome {
    for spec in ["C(3) x C(3)", "C(9) x C(3)", "C(3) x ES+(3)"] {
        let worst = vanishing_sum(&group(spec)).map_err(|e| format!("{spec}: {e}"))?;
        ensure(worst.is_zero(), || format!("{spec}: max |S| = {worst}"))?;
    }
    let mut ranks = Vec::new();

    let g = group("ES+(3)");
    let z = center(&g);
    let e = Subgroup::generated(&g, &[z.members()[1], g.generator_indices()[0]]);
    ranks.push(("ES+(3)", res_def_injectivity(&g, &e, &z)));

    let g2 = group("C(3) x C(3)");
    let z2 = Subgroup::generated(&g2, &g2.generator_indices()[..1]);
    ranks.push(("C(3) x C(3)", res_def_injectivity(&g2, &g2.whole(), &z2)));

    let g3 = group("SD(3,3,1,10)");
    let (a, b) = (g3.generator_indices()[0], g3.generator_indices()[1]);
    let a9 = g3.power(a, 9);
    let e3 = Subgroup::generated(&g3, &[a9, b]);
    let z3 = Subgroup::generated(&g3, &[a9]);
    ranks.push(("SD(3,3,1,10)", res_def_injectivity(&g3, &e3, &z3)));

    let mut summary = Vec::new();
    for (spec, report) in ranks {
        let report = report.map_err(|e| format!("{spec}: {e}"))?;
        ensure(report.is_injective(), || {
            format!("{spec}: rank {} of {}", report.rank, report.class_count)
        })?;
        summary.push(format!("{spec} rank {}", report.rank));
    }
    Ok(format!(
        "vanishing sums 0 on 3 groups; {}",
        summary.join(", ")
    ))
}

fn mobius_lemma() -> Outcome {
    for p in [3u64, 5] {
        for r in 2..=3 {
            let g = group(&format!("EA({p},{r})"));
            let lattice = mobius_lattice(&g.whole()).map_err(|e| format!("EA({p},{r}): {e}"))?;
            ensure(lattice.lemma_holds(), || {
                format!("EA({p},{r}): max |sum| = {}", lattice.max_abs_lemma_sum())
            })?;
        }
    }
    Ok("ranks 2 and 3 for p = 3, 5".into())
}

fn performance() -> Outcome {
    let g = group_with_cap("EA(3,8)", 6561);
    let start = Instant::now();
    let d = decompose(&g).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(d.multiplicities == BTreeMap::from([(1, 3280)]), || {
        format!("EA(3,8): {d:?}")
    })?;
    ensure(elapsed < Duration::from_secs(60), || {
        format!("EA(3,8) took {elapsed:?}")
    })?;

    let h = group("EA(3,6)");
    h.class_count();
    let t = Instant::now();
    let fast = analyze(&h).map_err(|e| e.to_string())?.l_sequence;
    let fast_time = t.elapsed();
    let t = Instant::now();
    let naive = l_sequence_naive(&h);
    let naive_time = t.elapsed();
    ensure(fast == naive, || {
        "per-class and per-element l-sequences differ".into()
    })?;
    let speedup = naive_time.as_secs_f64() / fast_time.as_secs_f64().max(1e-9);
    Ok(format!(
        "EA(3,8) in {elapsed:.2?}; EA(3,6) per-class {fast_time:.2?} vs scan {naive_time:.2?} ({speedup:.1}x, target 5x not asserted)"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("order-81 table reproduction", order_81_table),
        ("cyclic ladder", cyclic_ladder),
        ("abelian oracle equivalence", oracle_equivalence),
        (
            "two formulas and class-count identity",
            formulas_and_class_count,
        ),
        (
            "monotonicity and stabilization",
            monotonicity_and_stabilization,
        ),
        ("product multiplicativity", product_multiplicativity),
        ("rank consistency", rank_consistency_all),
        ("biset composition law", biset_composition),
        ("unit action", unit_action),
        ("rationality criterion", rationality_criterion),
        ("Möbius lemma", mobius_lemma),
        ("performance", performance),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!(
                "PASS criterion {:>2} {name}: {detail} [{elapsed:.2?}]",
                i + 1
            ),
            Err(detail) => {
                failures += 1;
                println!(
                    "FAIL criterion {:>2} {name}: {detail} [{elapsed:.2?}]",
                    i + 1
                );
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
