//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::*;
use labelled_motifs::corpus::normalize_text;
use labelled_motifs::features::{
    features_mfw_exact, features_v1_exact, features_v2_exact, WordSet,
};
use labelled_motifs::graph::{build_network, WordNetwork};
use labelled_motifs::learn::{cross_validate, fit, stratified_kfold, ClassifierSpec, Model};
use labelled_motifs::motifs::{
    enumerate_triads, labelled_census, LabelledCensus, MotifId, Vocabulary, CATALOG,
};
use num_rational::Ratio;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || {
        format!("took {elapsed:?}, limit {limit:?}")
    })
}

fn all_words(g: &WordNetwork) -> WordSet {
    WordSet {
        words: g.words().to_vec(),
        origin: String::new(),
    }
}

fn fixture() -> Outcome {
    let start = Instant::now();
    let tokens = normalize_text(HARD_TIMES);
    let g = build_network(&tokens);
    let census = labelled_census(&g, &Vocabulary::All);
    let ws = WordSet {
        words: vec!["facts".into()],
        origin: String::new(),
    };
    let v1 = features_v1_exact(&census, &ws);
    let v2 = features_v2_exact(&census, &ws);
    let mfw = features_mfw_exact(&tokens, &ws).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    check(tokens == HARD_TIMES_TOKENS, || format!("tokens {tokens:?}"))?;
    check(g.node_count() == 13 && g.arc_count() == 13, || {
        format!("{} nodes, {} arcs", g.node_count(), g.arc_count())
    })?;
    let mut expected = [0u64; 13];
    expected[1] = 13;
    expected[2] = 1;
    check(census.motif_counts() == &expected, || {
        format!("census {:?}", census.motif_counts())
    })?;
    check(oracle_census(&g).motif == expected, || {
        "oracle disagrees with the fixture".into()
    })?;

    let path = MotifId::new(2).unwrap();
    let orbit = |name: &str| {
        path.entry()
            .orbits()
            .find(|&o| path.entry().orbit_name(o) == name)
            .unwrap()
    };
    let split = [orbit("central"), orbit("sink"), orbit("source")]
        .map(|o| census.word_orbit_count("facts", path, o));
    check(
        census.word_count("facts", path) == 5 && split == [2, 2, 1],
        || {
            format!(
                "facts in motif 2: {} split {split:?}",
                census.word_count("facts", path)
            )
        },
    )?;
    check(v1[1] == Ratio::new(5, 13), || {
        format!("V1 facts|m2 = {}", v1[1])
    })?;
    check(
        v2[2..5] == [Ratio::new(1, 13), Ratio::new(2, 13), Ratio::new(2, 13)],
        || format!("V2 facts|m2 = {:?}", &v2[2..5]),
    )?;
    check(mfw == [Ratio::new(2, 14)], || {
        format!("MFW facts = {mfw:?}")
    })?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("exact; {elapsed:?}"))
}

fn catalog() -> Outcome {
    let start = Instant::now();
    let pairs = [(0usize, 1usize), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)];
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    // Canonical form of an arc set: the smallest relabelled bitmask.
    let mask_of = |arcs: &[(usize, usize)]| -> u32 {
        arcs.iter()
            .map(|a| 1 << pairs.iter().position(|p| p == a).unwrap())
            .sum()
    };
    let canon = |arcs: &[(usize, usize)]| -> u32 {
        perms
            .iter()
            .map(|p| mask_of(&arcs.iter().map(|&(a, b)| (p[a], p[b])).collect::<Vec<_>>()))
            .min()
            .unwrap()
    };
    let mut classes = BTreeSet::new();
    for mask in 0u32..64 {
        let arcs: Vec<(usize, usize)> = (0..6)
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| pairs[b])
            .collect();
        let mut reach = [true, false, false];
        for _ in 0..2 {
            for &(a, b) in &arcs {
                if reach[a] || reach[b] {
                    reach[a] = true;
                    reach[b] = true;
                }
            }
        }
        if reach == [true; 3] {
            classes.insert(canon(&arcs));
        }
    }
    let catalog: BTreeSet<u32> = CATALOG
        .iter()
        .map(|e| {
            canon(
                &e.edges
                    .iter()
                    .map(|&(a, b)| (a as usize, b as usize))
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let orbits: usize = CATALOG.iter().map(|e| e.orbit_count()).sum();
    let count = |m: u8| MotifId::new(m).unwrap().entry().orbit_count();
    let elapsed = start.elapsed();

    check(classes.len() == 13, || format!("{} classes", classes.len()))?;
    check(catalog == classes, || {
        "catalog differs from the generated classes".into()
    })?;
    check(orbits == 30, || format!("{orbits} orbits"))?;
    check(count(9) == 1 && count(13) == 1 && count(2) == 3, || {
        format!(
            "orbit counts m9 {} m13 {} m2 {}",
            count(9),
            count(13),
            count(2)
        )
    })?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("13 classes, 30 orbits; {elapsed:?}"))
}

fn test_networks() -> Vec<WordNetwork> {
    (0..60u64)
        .map(|i| {
            let n = 3 + (i as usize * 7) % 23;
            let density = 0.05 + 0.25 * (i as f64 / 59.0);
            random_digraph(1000 + i, n, density)
        })
        .collect()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let nets = test_networks();
    for (i, g) in nets.iter().enumerate() {
        let found: TriadMap = enumerate_triads(g)
            .map(|t| (t.nodes, (t.motif.get(), t.orbits.map(|o| o.get()))))
            .collect();
        let count = enumerate_triads(g).count();
        let oracle = oracle_triads(g);
        check(count == found.len() && found == oracle, || {
            format!("network {i}: instance sets differ")
        })?;

        let census = labelled_census(g, &Vocabulary::All);
        let expect = oracle_census(g);
        check(census.motif_counts() == &expect.motif, || {
            format!("network {i}: motif counts")
        })?;
        for w in g.words() {
            for m in MotifId::all() {
                let want = expect
                    .word_motif
                    .get(&(w.clone(), m.get()))
                    .copied()
                    .unwrap_or(0);
                check(census.word_count(w, m) == want, || {
                    format!("network {i}: {w} m{m}")
                })?;
                for o in m.entry().orbits() {
                    let want = expect
                        .word_orbit
                        .get(&(w.clone(), m.get(), o.get()))
                        .copied()
                        .unwrap_or(0);
                    check(census.word_orbit_count(w, m, o) == want, || {
                        format!("network {i}: {w} m{m} o{o}")
                    })?;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!("{} networks exact; {elapsed:?}", nets.len()))
}

fn invariants_hold(census: &LabelledCensus, ws: &WordSet) -> Result<(), String> {
    for m in MotifId::all() {
        let n = census.motif_count(m);
        let total: u64 = ws.words.iter().map(|w| census.word_count(w, m)).sum();
        check(total == 3 * n, || {
            format!("m{m}: word sum {total} vs 3*{n}")
        })?;
        for o in m.entry().orbits() {
            let total: u64 = ws
                .words
                .iter()
                .map(|w| census.word_orbit_count(w, m, o))
                .sum();
            let size = m.entry().orbit_size(o) as u64;
            check(total == size * n, || {
                format!("m{m} o{o}: {total} vs {size}*{n}")
            })?;
        }
    }
    let v1 = features_v1_exact(census, ws);
    let v2 = features_v2_exact(census, ws);
    let mut at = 0;
    for wi in 0..ws.len() {
        for m in MotifId::all() {
            let k = m.entry().orbit_count();
            let sum: Ratio<u64> = v2[at..at + k].iter().sum();
            check(sum == v1[wi * 13 + m.index()], || {
                format!("{} m{m}: V1 != sum V2", ws.words[wi])
            })?;
            at += k;
        }
    }
    Ok(())
}

fn census_invariants() -> Outcome {
    let mut nets = test_networks();
    nets.push(build_network(&HARD_TIMES_TOKENS));
    nets.push(build_network(&zipf_tokens(3, 2_000, 400)));
    for (i, g) in nets.iter().enumerate() {
        let census = labelled_census(g, &Vocabulary::All);
        invariants_hold(&census, &all_words(g)).map_err(|e| format!("network {i}: {e}"))?;
    }
    Ok(format!("{} networks exact", nets.len()))
}

fn density(x: f64, mean: f64, var: f64) -> f64 {
    (-(x - mean).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

fn classifiers() -> Outcome {
    let start = Instant::now();
    let data = blobs(2024, 50);
    let folds = stratified_kfold(&data.labels, 10, 7).map_err(|e| e.to_string())?;
    let mut summary = Vec::new();
    for spec in ClassifierSpec::defaults() {
        let report = cross_validate(&spec, &data.labels, &folds, 7, |tr, te| {
            Ok((data.select_rows(tr), data.select_rows(te)))
        })
        .map_err(|e| e.to_string())?;
        check(report.mean_accuracy >= 99.0, || {
            format!("{} mean accuracy {:.2}%", spec.name(), report.mean_accuracy)
        })?;
        summary.push(format!("{} {:.1}%", spec.name(), report.mean_accuracy));
    }

    let m = labelled_motifs::features::FeatureMatrix::new(
        vec!["f".into()],
        vec![vec![0.0], vec![2e-10], vec![1.0], vec![3.0]],
        ["a", "a", "b", "b"].map(String::from).to_vec(),
    )
    .map_err(|e| e.to_string())?;
    let model = fit(&ClassifierSpec::naive_bayes(), &m, 0).map_err(|e| e.to_string())?;
    let Model::NaiveBayes(nb) = &model.model else {
        return Err("naive bayes fitted to another model".into());
    };
    let mut worst: f64 = 0.0;
    for x in [1e-10, 3e-5, -2e-5, 0.5, 1.7] {
        let pa = 0.5 * density(x, 1e-10, 1e-9);
        let pb = 0.5 * density(x, 2.0, 1.0);
        let got = nb.posteriors(&[x]);
        worst = worst
            .max((got[0] - pa / (pa + pb)).abs())
            .max((got[1] - pb / (pa + pb)).abs());
    }
    check(worst <= 1e-12, || {
        format!("naive bayes posterior error {worst:e}")
    })?;

    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!(
        "{}; posterior error {worst:.1e}; {elapsed:?}",
        summary.join(", ")
    ))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let manifest = write_corpus(dir.path(), 10);
    let run = |jobs: &str, name: &str| -> Result<Vec<(String, Vec<u8>)>, String> {
        let out_dir = dir.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_lmotif"))
            .args([
                "evaluate",
                "--in",
                &manifest,
                "--version",
                "v1,v2,mfw",
                "--words",
                "8",
            ])
            .args([
                "--seed",
                "11",
                "--jobs",
                jobs,
                "--out-dir",
                out_dir.to_str().unwrap(),
            ])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(String::from_utf8_lossy(&out.stderr).into_owned());
        }
        let mut files = vec![
            ("stdout".to_string(), out.stdout),
            (
                "accuracy_table.csv".to_string(),
                fs::read(out_dir.join("accuracy_table.csv")).map_err(|e| e.to_string())?,
            ),
        ];
        for e in fs::read_dir(out_dir.join("reports")).map_err(|e| e.to_string())? {
            let e = e.map_err(|e| e.to_string())?;
            let bytes = fs::read(e.path()).map_err(|e| e.to_string())?;
            files.push((e.file_name().to_string_lossy().into_owned(), bytes));
        }
        files.sort();
        Ok(files)
    };
    let a = run("1", "a")?;
    let b = run("1", "b")?;
    let c = run("4", "c")?;
    let d = run("4", "d")?;
    check(a.len() == 14, || format!("{} output files", a.len()))?;
    check(a == b, || "two single-threaded runs differ".into())?;
    check(c == d, || "two 4-thread runs differ".into())?;
    check(a == c, || "1-thread and 4-thread runs differ".into())?;
    Ok(format!("{} files byte-identical across 4 runs", a.len()))
}

fn performance() -> Outcome {
    let tokens = zipf_tokens(8000, 8_000, 100_000);
    let g = build_network(&tokens);
    check((2_000..=4_000).contains(&g.node_count()), || {
        format!("fixture has {} nodes", g.node_count())
    })?;
    let start = Instant::now();
    let census = labelled_census(&g, &Vocabulary::All);
    let elapsed = start.elapsed();
    let instances: u64 = census.motif_counts().iter().sum();
    within(elapsed, Duration::from_secs(2))?;
    Ok(format!(
        "{} nodes, {} arcs, {instances} instances; {elapsed:?}",
        g.node_count(),
        g.arc_count()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("fixture fidelity", fixture),
        ("catalog and orbits", catalog),
        ("oracle equivalence", oracle_equivalence),
        ("census invariants", census_invariants),
        ("classifier sanity", classifiers),
        ("determinism", determinism),
        ("census performance", performance),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome =
            panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({detail})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
