//! Certificate-producing search for non-left-orderability.
//!
//! A left order on `G` restricts to a sign assignment on every finite ball
//! of the Cayley graph. The engine proves equalities between ball words by
//! bounded relator insertion, then searches all sign assignments of the
//! resulting classes. If every branch dies, the refutation tree together
//! with the equality proofs is a certificate that `G` is not left-orderable.

pub mod ball;
pub mod certificate;
pub mod equality;
pub mod search;
pub mod verify;
pub mod witness;

use std::collections::BTreeSet;

use serde::Serialize;

pub use ball::{enumerate_ball, Ball};
pub use certificate::{Certificate, CertificateKind};
pub use equality::{saturate_equalities, EqualityProof, EqualityStore, SaturationConfig};
pub use verify::{check_certificate, verify_certificate, VerifyError};

use crate::presentations::Presentation;
use certificate::{Assembly, CertificateParams, ClassEntry, MemberEntry};
use search::{build_constraints, Classes, Outcome, Solver};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub radius: usize,
    pub budget: usize,
    pub threads: usize,
    /// Extra letters allowed in intermediate words beyond
    /// `radius + longest relator`.
    pub slack: usize,
    pub max_ball: usize,
    pub max_explored: usize,
    pub max_nodes: usize,
    pub max_hom_candidates: usize,
}

impl SearchConfig {
    pub fn new(radius: usize, budget: usize) -> Self {
        SearchConfig {
            radius,
            budget,
            threads: 1,
            slack: 2,
            max_ball: 50_000,
            max_explored: 2_000_000,
            max_nodes: 1_000_000,
            max_hom_candidates: 20_000,
        }
    }

    /// Applies `GBSKNOT_MAX_BALL`, `GBSKNOT_MAX_EXPLORED`, `GBSKNOT_MAX_NODES`
    /// and `GBSKNOT_MAX_HOMS` when set.
    pub fn with_env_overrides(mut self) -> crate::Result<Self> {
        for (var, slot) in [
            ("GBSKNOT_MAX_BALL", &mut self.max_ball),
            ("GBSKNOT_MAX_EXPLORED", &mut self.max_explored),
            ("GBSKNOT_MAX_NODES", &mut self.max_nodes),
            ("GBSKNOT_MAX_HOMS", &mut self.max_hom_candidates),
        ] {
            if let Ok(v) = std::env::var(var) {
                *slot = v.trim().parse().map_err(|_| {
                    crate::Error::Malformed(format!(
                        "{var} must be a nonnegative integer, got `{v}`"
                    ))
                })?;
            }
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub ball_size: usize,
    pub classes: usize,
    pub merges: usize,
    pub explored_words: usize,
    pub saturation_truncated: bool,
    pub witnessed_classes: usize,
    pub constraints: usize,
    pub nodes: usize,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Certified(Certificate),
    CertifiedTrivial(Certificate),
    Inconclusive,
}

impl SearchOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            SearchOutcome::Certified(_) => "certified",
            SearchOutcome::CertifiedTrivial(_) => "certified-trivial",
            SearchOutcome::Inconclusive => "inconclusive",
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            SearchOutcome::Certified(c) | SearchOutcome::CertifiedTrivial(c) => Some(c),
            SearchOutcome::Inconclusive => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchRun {
    pub outcome: SearchOutcome,
    pub stats: SearchStats,
}

pub fn search_nonlo(pres: &Presentation, cfg: &SearchConfig) -> SearchRun {
    let mut stats = SearchStats::default();
    let inconclusive = |mut stats: SearchStats, reason: String| {
        stats.reason = reason;
        SearchRun {
            outcome: SearchOutcome::Inconclusive,
            stats,
        }
    };
    let ball = match enumerate_ball(pres.alphabet(), cfg.radius, cfg.max_ball) {
        Ok(b) => b,
        Err(e) => return inconclusive(stats, e.to_string()),
    };
    stats.ball_size = ball.len();
    let relators: Vec<Vec<_>> = pres
        .relators()
        .iter()
        .map(|r| r.letters().to_vec())
        .collect();
    let store = saturate_equalities(
        &ball,
        &relators,
        SaturationConfig {
            budget: cfg.budget,
            length_cap: cfg.radius + pres.max_relator_len() + cfg.slack,
            max_explored: cfg.max_explored,
        },
    );
    stats.merges = store.merges();
    stats.explored_words = store.explored;
    stats.saturation_truncated = store.truncated;
    let classes = Classes::from_store(&store, ball.len());
    stats.classes = classes.len();
    let params = CertificateParams {
        radius: cfg.radius,
        budget: cfg.budget,
    };

    let generators: Vec<u32> = pres
        .alphabet()
        .generators()
        .map(|g| {
            ball.lookup(&[crate::words::Letter {
                gen: g,
                inverse: false,
            }])
            .expect("radius >= 1")
        })
        .collect();
    if generators.iter().all(|&g| classes.of[g as usize] == 0) {
        let members = std::iter::once(MemberEntry {
            word: String::new(),
            proof: Vec::new(),
        })
        .chain(generators.iter().map(|&g| MemberEntry {
            word: ball_word(&ball, g),
            proof: certificate::export_proof(
                &ball.alphabet,
                &store.proof(g, 0).expect("identity class"),
            ),
        }))
        .collect();
        let cert = Certificate {
            format: certificate::FORMAT.into(),
            version: certificate::VERSION,
            engine: certificate::engine_id(),
            kind: CertificateKind::TrivialGroup,
            params,
            presentation: pres.export(),
            witnesses: Vec::new(),
            classes: vec![ClassEntry {
                id: 0,
                witness: None,
                members,
            }],
            nodes: Vec::new(),
        };
        stats.reason = "every generator equals the identity".into();
        return SearchRun {
            outcome: SearchOutcome::CertifiedTrivial(cert),
            stats,
        };
    }

    let targets: Vec<Vec<_>> = classes
        .reps
        .iter()
        .map(|&r| ball.word(r).to_vec())
        .collect();
    let (homs, mut witness_of) =
        witness::find_witnesses(pres.rank(), &relators, &targets, cfg.max_hom_candidates);
    witness_of[0] = None;
    let witnessed: Vec<bool> = witness_of.iter().map(|w| w.is_some()).collect();
    stats.witnessed_classes = witnessed.iter().filter(|&&w| w).count();
    let constraints = build_constraints(&ball, &classes);
    stats.constraints = constraints.len();

    let solver = Solver::new(&constraints, witnessed, cfg.max_nodes, cfg.threads > 1);
    let outcome = if cfg.threads > 1 {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
        {
            Ok(pool) => pool.install(|| solver.run()),
            Err(e) => return inconclusive(stats, format!("thread pool: {e}")),
        }
    } else {
        solver.run()
    };
    stats.nodes = solver.nodes.load(std::sync::atomic::Ordering::Relaxed);
    let tree = match outcome {
        Outcome::Refuted(t) => t,
        Outcome::Satisfiable => {
            return inconclusive(
                stats,
                "a consistent sign assignment exists on the witnessed classes".into(),
            )
        }
        Outcome::NodeCap => {
            return inconclusive(stats, format!("search node cap {} reached", cfg.max_nodes))
        }
    };

    let asm = Assembly {
        ball: &ball,
        store: &store,
        classes: &classes,
        constraints: &constraints,
        homs: &homs,
        witness_of: &witness_of,
    };
    let mut used_words = BTreeSet::new();
    let mut used_classes = BTreeSet::new();
    let nodes = asm.nodes(&tree, &mut used_words, &mut used_classes);
    let (witnesses, class_entries) = asm.classes(&used_words, &used_classes);
    let cert = Certificate {
        format: certificate::FORMAT.into(),
        version: certificate::VERSION,
        engine: certificate::engine_id(),
        kind: CertificateKind::NonLeftOrderable,
        params,
        presentation: pres.export(),
        witnesses,
        classes: class_entries,
        nodes,
    };
    stats.reason = "every sign assignment violates a constraint".into();
    SearchRun {
        outcome: SearchOutcome::Certified(cert),
        stats,
    }
}

fn ball_word(ball: &Ball, i: u32) -> String {
    crate::words::render_letters(&ball.alphabet, ball.word(i))
}
