//! End-to-end acceptance checks, one test per criterion. Each test prints a
//! single `criterion N PASS/FAIL` line (visible with `--nocapture`) and
//! enforces its runtime budget.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use amalgam_core::instances::{DisjointSets, PowersetNaming, VectorSpaceF2};
use amalgam_core::kernel::{
    check_axioms_a, check_axioms_c, check_axioms_d, check_prop_base_monotonicity,
    check_theorem_transind, check_theorem_transprime, replay_counterexample, ClassInstance,
    Model, Verdict,
};
use amalgam_core::loose::{
    check_conclusion, check_free_all_enumerations, explicit_prime, find_witness, is_locally_free,
    isomorphic_over_tree, loose_tree_pool, omission_pool, omission_transform, quotient_check,
    swap_transform, validate_witness, LooseTree, LooseTreeError, PoolCase,
};
use amalgam_core::tree::{
    all_enumerations, all_ideals, all_trees, canonical_trees, is_enumeration, neighbor_path,
    Enumeration, TreeIndex, TreeNode,
};

/// Seed for the shared loose-tree pool (criteria 5–8). Fixed so the pool is
/// byte-identical across the tests that re-derive it.
const POOL_SEED: u64 = 0x5eed_0001;
const OMISSION_SEED: u64 = 0x5eed_0002;
const POOL_TARGET: usize = 200;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Prints the criterion's verdict line and panics on failure or a blown budget.
fn conclude(
    criterion: u32,
    budget: Option<Duration>,
    started: Instant,
    result: Result<String, String>,
) {
    let elapsed = started.elapsed();
    let result = result.and_then(|detail| match budget {
        Some(b) if elapsed > b => {
            Err(format!("runtime {elapsed:.1?} exceeds the {b:?} budget"))
        }
        _ => Ok(detail),
    });
    match result {
        Ok(detail) => println!("criterion {criterion} PASS — {detail} ({elapsed:.1?})"),
        Err(msg) => {
            println!("criterion {criterion} FAIL — {msg}");
            panic!("criterion {criterion} failed: {msg}");
        }
    }
}

fn sets4() -> DisjointSets {
    DisjointSets::new(["a", "b", "c", "d"]).expect("within the universe cap")
}

fn space3() -> VectorSpaceF2 {
    VectorSpaceF2::new(3).expect("within the dimension cap")
}

/// Default sharpness bound: the largest carrier in the fragment, so bounded
/// checks can never be cut short below the instance's own scale.
fn default_lambda(inst: &dyn ClassInstance) -> usize {
    inst.fragment().iter().map(|m| m.carrier().len()).max().unwrap_or(0)
}

fn no_fail(report: &amalgam_core::kernel::AxiomReport) -> Result<(), String> {
    for e in &report.entries {
        if e.verdict == Verdict::Fail {
            return Err(format!(
                "{}: {} FAIL — {} (counterexample {:?})",
                report.instance, e.axiom, e.note, e.counterexample
            ));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Criterion 1: neighbor connectivity of enumerations
// ---------------------------------------------------------------------------

/// All-pairs BFS distances in the graph whose vertices are the valid
/// enumerations and whose edges are adjacent transpositions between them.
fn transposition_distances(enums: &[Enumeration]) -> Vec<Vec<Option<usize>>> {
    let index: BTreeMap<&[TreeNode], usize> =
        enums.iter().enumerate().map(|(i, e)| (e.order(), i)).collect();
    let mut adj = vec![Vec::new(); enums.len()];
    for (i, e) in enums.iter().enumerate() {
        for p in 0..e.len().saturating_sub(1) {
            let mut v = e.order().to_vec();
            v.swap(p, p + 1);
            if let Some(&j) = index.get(v.as_slice()) {
                adj[i].push(j);
            }
        }
    }
    let mut dist = vec![vec![None; enums.len()]; enums.len()];
    for (src, row) in dist.iter_mut().enumerate() {
        row[src] = Some(0);
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if row[v].is_none() {
                    row[v] = Some(row[u].unwrap() + 1);
                    queue.push_back(v);
                }
            }
        }
    }
    dist
}

fn criterion_1_body() -> Result<String, String> {
    let trees = all_trees(5, 3, 4);
    ensure!(!trees.is_empty(), "tree generation produced nothing");
    let mut pairs = 0usize;
    let mut max_len = 0usize;
    for tree in &trees {
        let enums = all_enumerations(tree, 5).map_err(|e| e.to_string())?;
        let n = tree.len();
        let cap = n * (n - 1) / 2;
        let dist = if n <= 4 { Some(transposition_distances(&enums)) } else { None };
        for (i, from) in enums.iter().enumerate() {
            for (j, to) in enums.iter().enumerate() {
                let path = neighbor_path(from, to).map_err(|e| e.to_string())?;
                ensure!(
                    path.len() <= cap,
                    "path of length {} exceeds n(n-1)/2 = {cap} on a {n}-node tree",
                    path.len()
                );
                let mut cur = from.order().to_vec();
                for &p in &path {
                    ensure!(p + 1 < cur.len(), "swap position {p} out of range");
                    cur.swap(p, p + 1);
                    ensure!(
                        is_enumeration(tree, &cur),
                        "intermediate listing after swap at {p} is not a valid enumeration"
                    );
                }
                ensure!(cur == to.order(), "path does not end at the target enumeration");
                if let Some(dist) = &dist {
                    ensure!(
                        dist[i][j] == Some(path.len()),
                        "path length {} differs from BFS distance {:?} on a {n}-node tree",
                        path.len(),
                        dist[i][j]
                    );
                }
                pairs += 1;
                max_len = max_len.max(path.len());
            }
        }
    }
    Ok(format!(
        "{} trees, {pairs} enumeration pairs connected; max path length {max_len}",
        trees.len()
    ))
}

#[test]
fn criterion_1_neighbor_connectivity() {
    let t = Instant::now();
    conclude(1, Some(Duration::from_secs(30)), t, criterion_1_body());
}

// ---------------------------------------------------------------------------
// Criterion 2: adequacy suite on the two well-behaved instances
// ---------------------------------------------------------------------------

fn adequacy_report(inst: &dyn ClassInstance) -> Result<String, String> {
    let started = Instant::now();
    let lambda = default_lambda(inst);
    let report = check_axioms_a(inst, lambda)
        .merge(check_axioms_c(inst))
        .merge(check_axioms_d(inst))
        .merge(check_prop_base_monotonicity(inst));
    for required in [
        "A0", "A1", "A2", "A3", "A4", "C1", "C2", "C3i", "C3ii", "C3iii", "C5", "C6", "C7",
        "D1", "D2", "monotonicity4",
    ] {
        ensure!(
            report.entry(required).is_some(),
            "{}: no {required} entry in the merged report",
            report.instance
        );
    }
    no_fail(&report)?;
    let elapsed = started.elapsed();
    ensure!(
        elapsed < Duration::from_secs(300),
        "{}: adequacy run took {elapsed:.1?}, over the per-instance budget",
        report.instance
    );
    Ok(format!("{} clean in {elapsed:.1?}", report.instance))
}

#[test]
fn criterion_2_adequacy_suite() {
    let t = Instant::now();
    let body = || -> Result<String, String> {
        let ds = adequacy_report(&sets4())?;
        let vs = adequacy_report(&space3())?;
        Ok(format!("zero FAIL on both instances: {ds}; {vs}"))
    };
    conclude(2, None, t, body());
}

// ---------------------------------------------------------------------------
// Criterion 3: derived theorems as oracles
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_derived_theorems() {
    let t = Instant::now();
    let body = || -> Result<String, String> {
        let ds = sets4();
        let vs = space3();
        let mut notes = Vec::new();
        for inst in [&ds as &dyn ClassInstance, &vs] {
            let report = check_theorem_transind(inst).merge(check_theorem_transprime(inst));
            for required in ["transind", "transprime"] {
                ensure!(
                    report.entry(required).is_some(),
                    "{}: no {required} entry",
                    report.instance
                );
            }
            no_fail(&report)?;
            notes.push(report.instance.clone());
        }
        Ok(format!("transind + transprime clean on {}", notes.join(" and ")))
    };
    conclude(3, Some(Duration::from_secs(300)), t, body());
}

// ---------------------------------------------------------------------------
// Criterion 4: predicted failure of the naive naming variant
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_predicted_failure() {
    let t = Instant::now();
    let body = || -> Result<String, String> {
        let naive = PowersetNaming::new(2, 2).map_err(|e| e.to_string())?;
        let report = check_axioms_c(&naive);
        let c7 = report.entry("C7").ok_or("variant 2: no C7 entry")?;
        ensure!(
            c7.verdict == Verdict::Fail,
            "variant 2: expected a C7 FAIL, got {:?}",
            c7.verdict
        );
        let ids = c7
            .counterexample
            .clone()
            .ok_or("variant 2: C7 FAIL entry carries no counterexample")?;
        let replayed = replay_counterexample(&naive, "C7", &ids, default_lambda(&naive))
            .map_err(|e| e.to_string())?;
        ensure!(replayed, "variant 2: counterexample {ids:?} does not replay");

        let fixed = PowersetNaming::new(2, 1).map_err(|e| e.to_string())?;
        let report = check_axioms_c(&fixed);
        let c7 = report.entry("C7").ok_or("variant 1: no C7 entry")?;
        ensure!(
            c7.verdict != Verdict::Fail,
            "variant 1: unexpected C7 FAIL ({:?})",
            c7.counterexample
        );
        Ok(format!(
            "variant 2 fails C7 on {ids:?} and the counterexample replays; variant 1 is clean"
        ))
    };
    conclude(4, Some(Duration::from_secs(60)), t, body());
}

// ---------------------------------------------------------------------------
// Criteria 5–8: the shared loose-tree pool over DisjointSets(4)
// ---------------------------------------------------------------------------

fn shared_pool(inst: &dyn ClassInstance) -> Vec<PoolCase> {
    loose_tree_pool(inst, 4, POOL_TARGET, POOL_SEED)
}

fn realize<'a>(
    case: &PoolCase,
    inst: &'a dyn ClassInstance,
) -> Result<LooseTree<'a>, String> {
    case.realize(inst).map_err(|e| format!("pool case failed to realize: {e}"))
}

#[test]
fn criterion_5_enumeration_invariance() {
    let t = Instant::now();
    let body = || -> Result<String, String> {
        let ds = sets4();
        let pool = shared_pool(&ds);
        ensure!(pool.len() >= POOL_TARGET, "pool has only {} cases", pool.len());
        for shape in canonical_trees(4, 3) {
            ensure!(
                pool.iter().any(|c| c.nodes == shape.nodes()),
                "no pool case on the shape {:?}",
                shape.nodes()
            );
        }
        let mut free = 0usize;
        let mut primes_compared = 0usize;
        for case in &pool {
            let lt = realize(case, &ds)?;
            let rep = check_free_all_enumerations(&lt, 8).map_err(|e| e.to_string())?;
            ensure!(
                rep.agrees(),
                "freeness verdicts disagree across enumerations on {case:?}"
            );
            if !rep.all_free() {
                continue;
            }
            free += 1;
            let enums = all_enumerations(lt.index(), 8).map_err(|e| e.to_string())?;
            let primes: Vec<_> = enums
                .iter()
                .map(|e| explicit_prime(&lt, e).map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;
            for p in &primes[1..] {
                ensure!(
                    isomorphic_over_tree(&lt, &primes[0], p),
                    "explicit primes {} and {} are not isomorphic over the tree on {case:?}",
                    primes[0].id(),
                    p.id()
                );
                primes_compared += 1;
            }
        }
        Ok(format!(
            "{} cases over all 8 shapes; verdicts agree on every case; {free} free; \
             {primes_compared} cross-enumeration prime pairs isomorphic",
            pool.len()
        ))
    };
    conclude(5, Some(Duration::from_secs(600)), t, body());
}

#[test]
fn criterion_6_omission_and_swap_soundness() {
    let t = Instant::now();
    let body = || -> Result<String, String> {
        let ds = sets4();
        let mut validation_failures: Vec<String> = Vec::new();

        let omissions = omission_pool(&ds, 4, 120, OMISSION_SEED);
        ensure!(
            omissions.len() >= 100,
            "only {} qualifying omission cases",
            omissions.len()
        );
        for (case, r) in &omissions {
            let lt = realize(case, &ds)?;
            let w = find_witness(&lt, &lt.default_enumeration())
                .ok_or_else(|| format!("omission case is not free: {case:?}"))?;
            match omission_transform(&lt, &w, r) {
                Ok((smaller, w2)) => {
                    let v = validate_witness(&smaller, &w2).map_err(|e| e.to_string())?;
                    ensure!(
                        v.basic && v.refined,
                        "omitted witness fails validation ({:?}) on {case:?}",
                        v.first_failure
                    );
                }
                Err(LooseTreeError::ValidationFailed(msg)) => {
                    validation_failures.push(format!("omission of {r} on {case:?}: {msg}"));
                }
                Err(e) => return Err(format!("omission of {r} on {case:?} errored: {e}")),
            }
        }

        let mut swaps = 0usize;
        for case in &shared_pool(&ds) {
            let lt = realize(case, &ds)?;
            for e in all_enumerations(lt.index(), 8).map_err(|e| e.to_string())? {
                let Some(w) = find_witness(&lt, &e) else { continue };
                for i in 0..e.len().saturating_sub(1) {
                    let (a, b) = (&e.order()[i], &e.order()[i + 1]);
                    let meet = lt.index().meet_of(a, b);
                    if meet.as_ref() == Some(a) || meet.as_ref() == Some(b) {
                        continue;
                    }
                    match swap_transform(&lt, &w, i) {
                        Ok(w2) => {
                            let v = validate_witness(&lt, &w2).map_err(|e| e.to_string())?;
                            ensure!(
                                v.basic && v.refined,
                                "swapped witness fails validation ({:?}) on {case:?}",
                                v.first_failure
                            );
                            ensure!(
                                isomorphic_over_tree(&lt, w.last(), w2.last()),
                                "swap changed the explicit prime non-isomorphically on {case:?}"
                            );
                            swaps += 1;
                        }
                        Err(LooseTreeError::ValidationFailed(msg)) => {
                            validation_failures
                                .push(format!("swap at {i} on {case:?}: {msg}"));
                        }
                        Err(e) => {
                            return Err(format!("swap at {i} on {case:?} errored: {e}"))
                        }
                    }
                }
            }
        }
        ensure!(swaps >= 100, "only {swaps} qualifying swap cases");
        ensure!(
            validation_failures.is_empty(),
            "{} ValidationFailed occurrences: {:?}",
            validation_failures.len(),
            validation_failures
        );
        Ok(format!(
            "{} omission and {swaps} swap cases transform cleanly; 0 ValidationFailed",
            omissions.len()
        ))
    };
    conclude(6, Some(Duration::from_secs(300)), t, body());
}

#[test]
fn criterion_7_quotient_extension() {
    let t = Instant::now();
    // Exhaustive: every canonical shape with ≤ 4 nodes, every fragment
    // ambient, every assignment of submembers of that ambient. Relabeled
    // trees are index-isomorphic to canonical ones, so this quantifies over
    // all free loose trees up to relabeling.
    let body = || -> Result<String, String> {
        let ds = sets4();
        let frag = ds.fragment();
        let mut free_cases = 0usize;
        let mut checks = 0usize;
        for shape in canonical_trees(4, 3) {
            let nodes = shape.nodes().to_vec();
            for ambient in frag {
                let subs: Vec<&Model> =
                    frag.iter().filter(|m| ds.is_sub(m, ambient)).collect();
                let total = subs.len().pow(nodes.len() as u32);
                for mut code in 0..total {
                    let assign: BTreeMap<TreeNode, Model> = nodes
                        .iter()
                        .map(|n| {
                            let m = subs[code % subs.len()].clone();
                            code /= subs.len();
                            (n.clone(), m)
                        })
                        .collect();
                    let Ok(lt) = LooseTree::new(shape.clone(), assign, ambient.clone(), &ds)
                    else {
                        continue;
                    };
                    if find_witness(&lt, &lt.default_enumeration()).is_none() {
                        continue;
                    }
                    free_cases += 1;
                    for ideal in all_ideals(lt.index()) {
                        if ideal.is_empty() {
                            continue;
                        }
                        let where_at = || {
                            format!(
                                "shape {:?}, ambient {}, ideal {:?}",
                                shape.nodes(),
                                ambient.id(),
                                ideal.members()
                            )
                        };
                        let report = quotient_check(&lt, &ideal, 8)
                            .map_err(|e| format!("quotient_check errored on {}: {e}", where_at()))?;
                        ensure!(
                            report.quotient_free && report.quotient_agrees,
                            "quotient is not free on {}",
                            where_at()
                        );
                        ensure!(
                            report.extension_ok,
                            "restricted witness does not extend on {}",
                            where_at()
                        );
                        checks += 1;
                    }
                }
            }
        }
        ensure!(free_cases > 0, "no free loose trees were generated");
        Ok(format!(
            "{free_cases} free loose trees (exhaustive up to relabeling), {checks} \
             (tree, ideal) checks: quotients free and witnesses extend"
        ))
    };
    conclude(7, Some(Duration::from_secs(600)), t, body());
}

#[test]
fn criterion_8_local_freeness_and_conclusion() {
    let t = Instant::now();
    let body = || -> Result<String, String> {
        let ds = sets4();
        let mut free_cases = 0usize;
        for case in &shared_pool(&ds) {
            let lt = realize(case, &ds)?;
            if find_witness(&lt, &lt.default_enumeration()).is_none() {
                // The whole node set is itself an ideal, so a tree that is not
                // free cannot be locally free either (converse direction).
                let locally = is_locally_free(&lt).map_err(|e| e.to_string())?;
                ensure!(!locally, "non-free case reported locally free: {case:?}");
                continue;
            }
            free_cases += 1;
            let locally = is_locally_free(&lt).map_err(|e| e.to_string())?;
            ensure!(locally, "free case is not locally free: {case:?}");
            let report = check_conclusion(&lt, 8).map_err(|e| e.to_string())?;
            ensure!(!report.vacuous, "conclusion vacuous on a free case: {case:?}");
            ensure!(report.prime.is_some(), "no explicit prime on a free case: {case:?}");
            ensure!(
                report.holds(),
                "conclusion does not hold on {case:?}: {:?}",
                report.entries
            );
        }
        ensure!(free_cases > 0, "the pool contains no free cases");
        Ok(format!(
            "{free_cases} free cases: all locally free, conclusion holds on every one"
        ))
    };
    conclude(8, None, t, body());
}
