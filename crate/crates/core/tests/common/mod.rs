#![allow(dead_code)]

use gbsknot::orderability::certificate::NodeEntry;
use gbsknot::orderability::Certificate;
use rand::seq::SliceRandom;
use rand::Rng;

pub const MUTATIONS: [&str; 6] = [
    "drop-step",
    "flip-step-inverse",
    "truncate-member",
    "flip-implied-sign",
    "root-conflict",
    "unwitness-branch",
];

/// Applies the named mutation at a random applicable site. Every mutation
/// here breaks some replayed fact, so a sound checker must reject the result.
/// Returns `None` when the certificate has no applicable site.
pub fn mutate<R: Rng>(cert: &Certificate, kind: &str, rng: &mut R) -> Option<Certificate> {
    let mut c = cert.clone();
    let proof_sites: Vec<(usize, usize)> = c
        .classes
        .iter()
        .enumerate()
        .flat_map(|(i, cl)| {
            cl.members
                .iter()
                .enumerate()
                .filter(|(_, m)| !m.proof.is_empty())
                .map(move |(j, _)| (i, j))
        })
        .collect();
    match kind {
        "drop-step" => {
            let &(i, j) = proof_sites.choose(rng)?;
            let p = &mut c.classes[i].members[j].proof;
            let k = rng.gen_range(0..p.len());
            p.remove(k);
        }
        "flip-step-inverse" => {
            let &(i, j) = proof_sites.choose(rng)?;
            let p = &mut c.classes[i].members[j].proof;
            let k = rng.gen_range(0..p.len());
            p[k].inverse = !p[k].inverse;
        }
        "truncate-member" => {
            let &(i, j) = proof_sites.choose(rng)?;
            let w = &mut c.classes[i].members[j].word;
            let mut tokens: Vec<&str> = w.split_whitespace().collect();
            let last = tokens.pop()?;
            // lower the last exponent by one step towards zero
            let (name, e) = match last.split_once('^') {
                Some((n, e)) => (n, e.parse::<i64>().ok()?),
                None => (last, 1),
            };
            let e = e - e.signum();
            let mut out = tokens.join(" ");
            if e != 0 {
                if !out.is_empty() {
                    out.push(' ');
                }
                out.push_str(name);
                if e != 1 {
                    out.push_str(&format!("^{e}"));
                }
            }
            *w = out;
        }
        "flip-implied-sign" => {
            let sites: Vec<usize> = (0..c.nodes.len())
                .filter(|&i| matches!(c.nodes[i], NodeEntry::Implied { .. }))
                .collect();
            let &i = sites.choose(rng)?;
            if let NodeEntry::Implied { positive, .. } = &mut c.nodes[i] {
                *positive = !*positive;
            }
        }
        "root-conflict" => {
            let constraint = c.nodes.iter().find_map(|n| match n {
                NodeEntry::Implied { constraint, .. } | NodeEntry::Conflict { constraint, .. } => {
                    Some(constraint.clone())
                }
                NodeEntry::Branch { .. } => None,
            })?;
            if matches!(c.nodes.first(), Some(NodeEntry::Conflict { .. })) {
                return None;
            }
            c.nodes[0] = NodeEntry::Conflict {
                violation: "product-closure".into(),
                constraint,
            };
        }
        "unwitness-branch" => {
            let branched: Vec<u32> = c
                .nodes
                .iter()
                .filter_map(|n| match n {
                    NodeEntry::Branch { class, .. } => Some(*class),
                    _ => None,
                })
                .collect();
            let &class = branched.choose(rng)?;
            c.classes.iter_mut().find(|cl| cl.id == class)?.witness = None;
        }
        _ => unreachable!("unknown mutation {kind}"),
    }
    Some(c)
}

/// Draws `count` mutants round-robin over the mutation kinds, skipping kinds
/// with no applicable site.
pub fn mutants<R: Rng>(
    certs: &[Certificate],
    count: usize,
    rng: &mut R,
) -> Vec<(usize, &'static str, Certificate)> {
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < count * 100, "too few mutation sites");
        let kind = MUTATIONS[attempts % MUTATIONS.len()];
        let idx = rng.gen_range(0..certs.len());
        if let Some(m) = mutate(&certs[idx], kind, rng) {
            out.push((idx, kind, m));
        }
    }
    out
}
