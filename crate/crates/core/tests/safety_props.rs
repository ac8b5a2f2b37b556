mod common;

use privcalc::kernel::Sym;
use privcalc::policy::{Hierarchy, PermSet, Policy};
use privcalc::safety::{detect_errors, safety_scan, SafetyOptions};
use privcalc::satisfaction::{verify, VerifyOptions};
use privcalc::syntax::{parse_env, parse_policy, parse_system};
use privcalc::typing::{type_system, Gamma, Theta};
use proptest::prelude::*;

fn insert(h: &mut Hierarchy, path: &[Sym], perms: &PermSet) {
    match path.split_first() {
        None => h.perms = h.perms.union(&perms.star()),
        Some((g, rest)) => {
            if h.child(g).is_none() {
                h.children.push(Hierarchy::leaf(g.as_str(), []));
            }
            let c = h.children.iter_mut().find(|c| &c.group == g).unwrap();
            insert(c, rest, perms);
        }
    }
}

/// The least policy granting every entry of `theta` (budgets raised to ω).
fn policy_of(theta: &Theta) -> Policy {
    let mut entries: Vec<(Sym, Hierarchy)> = Vec::new();
    for (t, th) in theta.iter() {
        let Some((root, rest)) = th.path.split_first() else {
            continue;
        };
        let i = match entries.iter().position(|(u, _)| u == t) {
            Some(i) => i,
            None => {
                entries.push((t.clone(), Hierarchy::leaf(root.as_str(), [])));
                entries.len() - 1
            }
        };
        insert(&mut entries[i].1, rest, &th.perms);
    }
    Policy::new(entries)
}

/// Policies with one permission removed somewhere.
fn deletions(p: &Policy) -> Vec<Policy> {
    fn nodes(h: &Hierarchy, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(path.clone());
        for (i, c) in h.children.iter().enumerate() {
            path.push(i);
            nodes(c, path, out);
            path.pop();
        }
    }
    fn at<'a>(h: &'a mut Hierarchy, path: &[usize]) -> &'a mut Hierarchy {
        match path.split_first() {
            None => h,
            Some((i, rest)) => at(&mut h.children[*i], rest),
        }
    }
    let mut out = Vec::new();
    for (ti, (_, h)) in p.entries.iter().enumerate() {
        let mut ns = Vec::new();
        nodes(h, &mut Vec::new(), &mut ns);
        for n in ns {
            let perms: Vec<_> = at(&mut h.clone(), &n).perms.iter().cloned().collect();
            for perm in perms {
                let mut q = p.clone();
                at(&mut q.entries[ti].1, &n).perms.remove(&perm);
                out.push(q);
            }
        }
    }
    out
}

/// Ok(true) when the system was flagged (and then does not satisfy).
fn flagged_implies_unsatisfied(
    policy: &Policy,
    gamma: &Gamma,
    src: &str,
) -> Result<bool, TestCaseError> {
    let s = parse_system(src).unwrap();
    let findings = detect_errors(policy, gamma, &s, SafetyOptions::default());
    if findings.is_empty() {
        return Ok(false);
    }
    if let Ok((_, v)) = verify(policy, gamma, &s, VerifyOptions::default()) {
        prop_assert!(
            !v.satisfied,
            "{}\nflagged {:?} but satisfied",
            src,
            findings
        );
    }
    Ok(true)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn errors_break_satisfaction(seed in any::<u64>()) {
        let (src, _) = common::typed_systems(seed % 100_000, 1, 8).remove(0);
        let src = format!("Top[{src}]");
        let gamma = common::typed_gamma();
        let theta = type_system(&gamma, &parse_system(&src).unwrap()).unwrap().theta;
        let full = policy_of(&theta);
        let s = parse_system(&src).unwrap();
        prop_assert!(verify(&full, &gamma, &s, VerifyOptions::default()).unwrap().1.satisfied);
        prop_assert!(!flagged_implies_unsatisfied(&full, &gamma, &src)?, "least policy flagged: {}", src);
        for p in deletions(&full) {
            flagged_implies_unsatisfied(&p, &gamma, &src)?;
        }
    }
}

#[test]
fn corpus_mutants_break_satisfaction() {
    let mut flagged = 0;
    for c in ["hospital", "etp_central", "etp_decentral", "speedlimit"] {
        let src = common::read_corpus(&format!("{c}.pc"));
        let gamma = parse_env(&common::read_corpus(&format!("{c}.env"))).unwrap();
        let policy = parse_policy(&common::read_corpus(&format!("{c}.ppo"))).unwrap();
        for p in std::iter::once(policy.clone()).chain(deletions(&policy)) {
            flagged += usize::from(flagged_implies_unsatisfied(&p, &gamma, &src).unwrap());
        }
    }
    assert!(flagged >= 10, "only {flagged} flagged mutants");
}

#[test]
fn satisfied_corpus_is_safe() {
    let src = common::read_corpus("hospital.pc");
    let gamma = parse_env(&common::read_corpus("hospital.env")).unwrap();
    let policy = parse_policy(&common::read_corpus("hospital.ppo")).unwrap();
    let s = parse_system(&src).unwrap();
    assert!(
        verify(&policy, &gamma, &s, VerifyOptions::default())
            .unwrap()
            .1
            .satisfied
    );
    let report = safety_scan(&policy, &gamma, &s, 6, SafetyOptions::default());
    assert!(report.safe(), "{:?}", report.findings);
}
