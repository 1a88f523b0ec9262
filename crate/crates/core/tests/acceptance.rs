mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use gbsknot::gbs::{
    match_gbs, slope_threshold, verify_ml_identity, verify_relator_rearrangement, GbsData,
};
use gbsknot::homology::h1_diagnostic;
use gbsknot::orderability::{
    search_nonlo, verify_certificate, Certificate, CertificateKind, SearchConfig, SearchOutcome,
};
use gbsknot::presentations::canonical_relator;
use gbsknot::twisted_torus::{
    ab, derive_ab_presentation, derive_longitude, LongitudeConvention, TwistParams, A, B,
};
use gbsknot::words::{Letter, Word};
use gbsknot::{dehn_fill, Presentation, Slope};
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID: u32 = 8;
const LIMIT_REPLAY: Duration = Duration::from_secs(5);
const LIMIT_ML: Duration = Duration::from_secs(10);
const LIMIT_TORSION: Duration = Duration::from_secs(1);
const LIMIT_NEGATIVE: Duration = Duration::from_secs(60);
const ML_RANGE: i64 = 6;
const RANDOM_GBS: usize = 1000;
const FUZZ_MUTANTS: usize = 500;
const NEGATIVE_RADIUS: usize = 4;
const NEGATIVE_BUDGET: usize = 6;
const DIAGNOSTIC_RADIUS: usize = 3;
const DIAGNOSTIC_BUDGET: usize = 2;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn w(text: &str) -> Word {
    Word::parse(&ab(), text).unwrap()
}

fn ba_pow(k: u32) -> Word {
    w("b a").pow(k as i64)
}

fn c1_replay() -> Check {
    let start = Instant::now();
    for u in 0..=GRID {
        for v in 0..=GRID {
            let params = TwistParams::new(u, v);
            let d = derive_ab_presentation(params).map_err(|e| format!("({u},{v}): {e}"))?;
            ensure!(d.trace.verify().is_ok(), "({u},{v}): trace does not replay");
            let expected = GbsData {
                w1: ba_pow(v + 1),
                m: 1,
                r: u as i64 + 1,
                w2: ba_pow(v),
                n: 1,
                k: 1,
            };
            ensure!(
                d.gbs == expected,
                "({u},{v}): derived data {:?}",
                d.gbs.export()
            );
            let rel = expected.assemble(A, B).unwrap();
            ensure!(
                canonical_relator(&rel) == canonical_relator(&d.presentation.relators()[0]),
                "({u},{v}): relator differs from the assembled expected data"
            );
            let found = match_gbs(&d.relator, A, B).ok_or(format!("({u},{v}): no GBS parse"))?;
            ensure!(
                (found.m, found.r, found.n, found.k) == (1, u as i64 + 1, 1, 1),
                "({u},{v}): exponents {:?}",
                found.export()
            );
            ensure!(
                found == expected.normalized(A),
                "({u},{v}): parse differs from normalized expected data"
            );
            ensure!(
                expected.equivalent(&found, A, B).unwrap(),
                "({u},{v}): parse is not equivalent"
            );

            let l = derive_longitude(params, LongitudeConvention::Literal)
                .map_err(|e| e.to_string())?;
            ensure!(
                l.trace.verify().is_ok(),
                "({u},{v}): longitude trace does not replay"
            );
            let s = 2 * u as i64 + 3 * (3 * v as i64 + 2) + 1;
            let block = ba_pow(v).concat(&w("b").pow(u as i64 + 1)).unwrap();
            let expected_w = Word::product(&ab(), [&block.pow(2), &ba_pow(v), &w("b")]).unwrap();
            ensure!(l.s == s && l.t == -1, "({u},{v}): s = {}, t = {}", l.s, l.t);
            ensure!(l.w == expected_w, "({u},{v}): w = {}", l.w);
            let lon = Word::product(&ab(), [&w("a").pow(-s), &expected_w, &w("a")]).unwrap();
            ensure!(l.longitude == lon, "({u},{v}): longitude = {}", l.longitude);
        }
    }
    let t = start.elapsed();
    ensure!(t < LIMIT_REPLAY, "took {t:?}");
    Ok(format!("81 knots, {t:.2?}"))
}

fn c2_threshold() -> Check {
    for u in 0..=GRID {
        for v in 0..=GRID {
            let params = TwistParams::new(u, v);
            let per = derive_longitude(params, LongitudeConvention::Literal)
                .and_then(|l| l.peripheral())
                .map_err(|e| e.to_string())?;
            let expected = 2 * u as i64 + 3 * (3 * v as i64 + 2);
            ensure!(
                slope_threshold(&per) == expected,
                "({u},{v}): {} != {expected}",
                slope_threshold(&per)
            );
        }
    }
    Ok("81 thresholds exact".into())
}

/// Writes `a^p L^q` with `L = a^-s W a^-t` as a token list, bubble sorts
/// every `a` token to the left of every `W` token, and cancels.
fn ml_oracle(s: i64, t: i64, p: i64, q: i64) -> (i64, i64) {
    let mut tokens: Vec<(bool, i64)> = Vec::new();
    let push_a = |tokens: &mut Vec<(bool, i64)>, e: i64| {
        for _ in 0..e.abs() {
            tokens.push((false, e.signum()));
        }
    };
    push_a(&mut tokens, p);
    for _ in 0..q.abs() {
        if q > 0 {
            push_a(&mut tokens, -s);
            tokens.push((true, 1));
            push_a(&mut tokens, -t);
        } else {
            push_a(&mut tokens, t);
            tokens.push((true, -1));
            push_a(&mut tokens, s);
        }
    }
    let mut swapped = true;
    while swapped {
        swapped = false;
        for i in 1..tokens.len() {
            if tokens[i - 1].0 && !tokens[i].0 {
                tokens.swap(i - 1, i);
                swapped = true;
            }
        }
    }
    tokens.iter().fold(
        (0, 0),
        |(x, y), &(is_w, e)| if is_w { (x, y + e) } else { (x + e, y) },
    )
}

fn c3_ml_identity() -> Check {
    let start = Instant::now();
    let mut cases = 0;
    let r = -ML_RANGE..=ML_RANGE;
    for s in r.clone() {
        for t in r.clone() {
            for p in r.clone() {
                for q in r.clone() {
                    let got = verify_ml_identity(s, t, p, q);
                    let oracle = ml_oracle(s, t, p, q);
                    ensure!(
                        (got.a_exponent, got.w_exponent) == oracle,
                        "s={s} t={t} p={p} q={q}: {got:?} vs {oracle:?}"
                    );
                    ensure!(
                        got.holds == (oracle == (p - (s + t) * q, q)),
                        "s={s} t={t} p={p} q={q}: verdict {}",
                        got.holds
                    );
                    ensure!(got.holds, "s={s} t={t} p={p} q={q}: identity fails");
                    cases += 1;
                }
            }
        }
    }
    let t = start.elapsed();
    ensure!(t < LIMIT_ML, "took {t:?}");
    Ok(format!("{cases} cases, {t:.2?}"))
}

fn random_word<R: Rng>(rng: &mut R, max: usize) -> Word {
    let len = rng.gen_range(0..=max);
    let letters: Vec<Letter> = (0..len)
        .map(|_| Letter {
            gen: if rng.gen() { A } else { B },
            inverse: rng.gen(),
        })
        .collect();
    Word::from_letters(&ab(), &letters)
}

fn c4_rearrangement() -> Check {
    for u in 0..=GRID {
        for v in 0..=GRID {
            let d = derive_ab_presentation(TwistParams::new(u, v)).map_err(|e| e.to_string())?;
            let found = match_gbs(&d.relator, A, B).ok_or("no parse")?;
            for data in [&d.gbs, &found] {
                verify_relator_rearrangement(&d.relator, data, A, B)
                    .map_err(|e| format!("({u},{v}): {e}"))?;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut rejected = 0;
    for i in 0..RANDOM_GBS {
        let data = GbsData {
            w1: random_word(&mut rng, 6),
            m: rng.gen_range(1..=4),
            r: rng.gen_range(-4..=4),
            w2: random_word(&mut rng, 6),
            n: rng.gen_range(1..=4),
            k: rng.gen_range(1..=4),
        };
        let rel = data.assemble(A, B).unwrap();
        let (core, _) = rel.cyclic_reduce();
        let rot = rng.gen_range(0..core.len());
        let shown = if rng.gen() {
            core.rotate(rot)
        } else {
            core.rotate(rot).inverse()
        };
        verify_relator_rearrangement(&shown, &data, A, B)
            .map_err(|e| format!("instance {i}: {e}"))?;
        let mut bad = data.clone();
        match i % 3 {
            0 => bad.m = -bad.m,
            1 => bad.n = -bad.n,
            _ => bad.k = -bad.k,
        }
        ensure!(
            verify_relator_rearrangement(&shown, &bad, A, B).is_err(),
            "mutant {i} accepted: {:?}",
            bad.export()
        );
        rejected += 1;
    }
    Ok(format!(
        "81 grid + {RANDOM_GBS} random witnessed, {rejected} mutants rejected"
    ))
}

/// `|H1|` of the filling from exponent sums alone: the gcd of the 2x2
/// minors of the relation matrix, or `None` if every minor vanishes.
fn order_oracle(pres: &Presentation) -> Option<i64> {
    let rows: Vec<[i64; 2]> = pres
        .relators()
        .iter()
        .map(|r| [r.exponent_sum(A), r.exponent_sum(B)])
        .collect();
    let mut d = 0i64;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            d = d.gcd(&(rows[i][0] * rows[j][1] - rows[i][1] * rows[j][0]));
        }
    }
    (d != 0).then_some(d)
}

fn c5_homology() -> Check {
    let slopes = [(5, 1), (6, 1), (7, 1), (11, 2)];
    let mut lines = Vec::new();
    let check = |u: u32,
                 v: u32,
                 conv: LongitudeConvention,
                 expect_class: i64,
                 expect_order: &dyn Fn(i64, i64) -> i64|
     -> Result<(), String> {
        let params = TwistParams::new(u, v);
        let knot = derive_ab_presentation(params)
            .map_err(|e| e.to_string())?
            .presentation;
        let per = derive_longitude(params, conv)
            .and_then(|l| l.peripheral())
            .map_err(|e| e.to_string())?;
        for &(p, q) in &slopes {
            let filled =
                dehn_fill(&knot, &per, Slope::new(p, q).unwrap()).map_err(|e| e.to_string())?;
            let rep = h1_diagnostic(&filled);
            let want = expect_order(p, q);
            let oracle = order_oracle(&filled.presentation());
            ensure!(
                oracle == Some(want),
                "({u},{v}) {p}/{q} {}: oracle order {oracle:?}, want {want}",
                conv.as_str()
            );
            ensure!(
                rep.computed_order.as_deref() == Some(want.to_string().as_str()),
                "({u},{v}) {p}/{q} {}: computed {}",
                conv.as_str(),
                rep.computed_h1
            );
            ensure!(
                rep.longitude_class == Some(expect_class),
                "({u},{v}): class {:?}",
                rep.longitude_class
            );
            ensure!(
                rep.matches == (want == p.abs()),
                "({u},{v}): match flag {}",
                rep.matches
            );
        }
        Ok(())
    };
    for v in 0..=5 {
        check(0, v, LongitudeConvention::Literal, 0, &|p, _| p.abs())?;
        check(0, v, LongitudeConvention::HomologyCorrected, 0, &|p, _| {
            p.abs()
        })?;
    }
    for u in 1..=3u32 {
        for v in 0..=5 {
            let c = 2 * u as i64;
            check(u, v, LongitudeConvention::Literal, c, &|p, q| {
                (p + c * q).abs()
            })?;
            check(u, v, LongitudeConvention::HomologyCorrected, 0, &|p, _| {
                p.abs()
            })?;
        }
        lines.push(format!("u={u}: literal |p+{}q|", 2 * u));
    }
    Ok(format!(
        "u=0 gives |p|; {}; corrected gives |p|",
        lines.join(", ")
    ))
}

fn torsion_certificates() -> Result<Vec<(Presentation, Certificate, Duration)>, String> {
    let mut out = Vec::new();
    for n in 2..=6usize {
        let pres = Presentation::from_names(&["a"], &[&format!("a^{n}")]).unwrap();
        let start = Instant::now();
        let run = search_nonlo(&pres, &SearchConfig::new(n.div_ceil(2), 1));
        let t = start.elapsed();
        let SearchOutcome::Certified(cert) = run.outcome else {
            return Err(format!(
                "a^{n}: {} ({})",
                run.outcome.label(),
                run.stats.reason
            ));
        };
        out.push((pres, cert, t));
    }
    Ok(out)
}

fn c6_positive_controls() -> Check {
    let certs = torsion_certificates()?;
    for (pres, cert, t) in &certs {
        let name = pres.render_text();
        ensure!(*t < LIMIT_TORSION, "{name}: took {t:?}");
        ensure!(
            cert.kind == CertificateKind::NonLeftOrderable,
            "{name}: kind {:?}",
            cert.kind
        );
        ensure!(
            verify_certificate(cert, pres),
            "{name}: certificate rejected"
        );
    }
    let originals: Vec<Certificate> = certs.iter().map(|(_, c, _)| c.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mutants = common::mutants(&originals, FUZZ_MUTANTS, &mut rng);
    for (idx, kind, m) in &mutants {
        ensure!(
            !verify_certificate(m, &certs[*idx].0),
            "{kind} mutant of a^{} accepted",
            idx + 2
        );
    }
    let slowest = certs.iter().map(|c| c.2).max().unwrap();
    Ok(format!(
        "n=2..6 certified and replayed (slowest {slowest:.2?}), {} mutants rejected",
        mutants.len()
    ))
}

fn c7_negative_controls() -> Check {
    let cases: [(&str, &[&str], &[&str]); 4] = [
        ("F1", &["a"], &[]),
        ("F2", &["a", "b"], &[]),
        ("Z^2", &["a", "b"], &["a b a^-1 b^-1"]),
        ("trefoil", &["a", "b"], &["b a b^-2 a"]),
    ];
    let mut parts = Vec::new();
    for (name, gens, rels) in cases {
        let pres = Presentation::from_names(gens, rels).unwrap();
        let start = Instant::now();
        let run = search_nonlo(&pres, &SearchConfig::new(NEGATIVE_RADIUS, NEGATIVE_BUDGET));
        let t = start.elapsed();
        ensure!(
            matches!(run.outcome, SearchOutcome::Inconclusive),
            "{name}: {}",
            run.outcome.label()
        );
        ensure!(t < LIMIT_NEGATIVE, "{name}: took {t:?}");
        parts.push(format!("{name} {t:.1?}"));
    }
    Ok(format!(
        "inconclusive at radius {NEGATIVE_RADIUS}, budget {NEGATIVE_BUDGET}: {}",
        parts.join(", ")
    ))
}

fn cli(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_gbsknot"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        out.status.code().unwrap_or(-1),
    )
}

fn scratch() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("gbsknot-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn certify_args<'a>(
    slope: &'a str,
    threads: &'a str,
    emit: &'a str,
    radius: &'a str,
    budget: &'a str,
) -> Vec<&'a str> {
    vec![
        "--deterministic",
        "certify-nonlo",
        "--u",
        "0",
        "--v",
        "0",
        "--slope",
        slope,
        "--radius",
        radius,
        "--budget",
        budget,
        "--threads",
        threads,
        "--emit",
        emit,
    ]
}

fn c8_end_to_end() -> Check {
    let dir = scratch();
    let (r, b) = (DIAGNOSTIC_RADIUS.to_string(), DIAGNOSTIC_BUDGET.to_string());
    let mut parts = Vec::new();
    for slope in ["5/1", "6/1", "7/1"] {
        let path = dir.join(format!("c8-{}.json", slope.replace('/', "_")));
        let p = path.to_str().unwrap();
        let (out, code) = cli(&certify_args(slope, "1", p, &r, &b));
        ensure!(code == 0 || code == 1, "{slope}: exit {code}");
        let outcome = out
            .lines()
            .find_map(|l| l.strip_prefix("outcome: "))
            .ok_or(format!("{slope}: no outcome"))?;
        ensure!(
            out.contains("ball: ") && out.contains("search: "),
            "{slope}: statistics missing"
        );
        if code == 0 {
            let (_, vcode) = cli(&["verify-cert", p]);
            ensure!(vcode == 0, "{slope}: emitted certificate fails replay");
        }
        parts.push(format!("{slope} {outcome}"));
    }
    Ok(format!("radius {r}, budget {b}: {}", parts.join(", ")))
}

fn c9_determinism() -> Check {
    let dir = scratch();
    let mut commands: Vec<Vec<String>> = Vec::new();
    let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    for u in 0..=GRID {
        for v in 0..=GRID {
            let (us, vs) = (u.to_string(), v.to_string());
            commands.push(own(&[
                "--deterministic",
                "present",
                "twisted-torus",
                "--u",
                &us,
                "--v",
                &vs,
                "--emit",
                "struct",
            ]));
        }
    }
    commands.push(own(&[
        "--deterministic",
        "sweep",
        "--u-max",
        "8",
        "--v-max",
        "8",
        "--slopes",
        "5,6,7,11/2",
    ]));
    for u in 0..=3 {
        for conv in ["paper", "h1"] {
            let us = u.to_string();
            commands.push(own(&[
                "--deterministic",
                "diagnose-h1",
                "--u",
                &us,
                "--v",
                "1",
                "--slope",
                "11/2",
                "--convention",
                conv,
            ]));
        }
    }
    let run_all = || -> Vec<(String, i32)> {
        commands
            .iter()
            .map(|c| cli(&c.iter().map(String::as_str).collect::<Vec<_>>()))
            .collect()
    };
    let first = run_all();
    let second = run_all();
    ensure!(first == second, "plain command output differs between runs");

    let (r, b) = (DIAGNOSTIC_RADIUS.to_string(), DIAGNOSTIC_BUDGET.to_string());
    let mut certified = 0;
    for slope in ["5/1", "6/1", "7/1"] {
        let mut files = Vec::new();
        let mut outs = Vec::new();
        for threads in ["1", "1", "4"] {
            let path = dir.join(format!(
                "c9-threads{threads}-{}.json",
                slope.replace('/', "_")
            ));
            let _ = std::fs::remove_file(&path);
            let out = cli(&certify_args(
                slope,
                threads,
                path.to_str().unwrap(),
                &r,
                &b,
            ));
            outs.push(out);
            files.push(read_opt(&path));
        }
        ensure!(
            outs[0] == outs[1],
            "{slope}: certify output differs between serial runs"
        );
        ensure!(
            files[0] == files[1],
            "{slope}: certificate differs between serial runs"
        );
        ensure!(
            files[0] == files[2],
            "{slope}: certificate differs between 1 and 4 threads"
        );
        certified += files[0].is_some() as usize;
    }
    for n in 2..=6 {
        let pres = dir.join(format!("c9-t{n}.txt"));
        std::fs::write(&pres, format!("< a | a^{n} >\n")).unwrap();
        let radius = (n as usize).div_ceil(2).to_string();
        let mut files = Vec::new();
        for (tag, threads) in [("a", "1"), ("b", "1"), ("c", "4")] {
            let path = dir.join(format!("c9-t{n}-{tag}.json"));
            let (_, code) = cli(&[
                "--deterministic",
                "certify-nonlo",
                "--presentation",
                pres.to_str().unwrap(),
                "--radius",
                &radius,
                "--budget",
                "1",
                "--threads",
                threads,
                "--emit",
                path.to_str().unwrap(),
            ]);
            ensure!(code == 0, "a^{n}: exit {code}");
            files.push(read_opt(&path));
        }
        ensure!(
            files[0] == files[1] && files[0] == files[2],
            "a^{n}: certificates differ"
        );
        certified += 1;
    }
    std::fs::remove_dir_all(&dir).ok();
    Ok(format!(
        "{} commands stable, {certified} certificates identical across runs and thread counts",
        commands.len()
    ))
}

fn read_opt(p: &Path) -> Option<Vec<u8>> {
    std::fs::read(p).ok()
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("twisted torus replay", c1_replay),
        ("slope threshold", c2_threshold),
        ("meridian-longitude identity", c3_ml_identity),
        ("relator rearrangement", c4_rearrangement),
        ("homology diagnostic", c5_homology),
        ("non-LO positive controls", c6_positive_controls),
        ("non-LO negative controls", c7_negative_controls),
        ("end-to-end filled trefoil", c8_end_to_end),
        ("determinism", c9_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
