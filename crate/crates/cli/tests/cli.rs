use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mcwm::length::class_length_pmf;
use mcwm::lexicon::{load_lexicon, LoadOptions};
use tempfile::TempDir;

const TINY: &str = "P\tun\t0.7\nP\tre\t0.3\n\
                    R\tbark\t0.5\nR\tmo\t0.3\nR\tlint\t0.2\n\
                    S\ters\t0.6\nS\tal\t0.4\n\
                    E\ts\t0.55\nE\ted\t0.45\n";

fn mcwm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcwm"))
        .args(args)
        .output()
        .expect("spawn mcwm")
}

fn ok(args: &[&str]) -> String {
    let out = mcwm(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    mcwm(args).status.code().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn read(path: PathBuf) -> String {
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn key_value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing in\n{text}"))
        .to_string()
}

fn tiny_lexicon(dir: &Path) -> PathBuf {
    let path = dir.join("tiny.tsv");
    fs::write(&path, TINY).unwrap();
    path
}

#[test]
fn gen_lexicon_paper_size_and_determinism() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let text = ok(&["gen-lexicon", "--paper", "--out", p(&a)]);
    assert!(text.contains("total     615 morphemes"), "{text}");
    ok(&["gen-lexicon", "--out", p(&b)]);
    let lex = read(a.join("lexicon.tsv"));
    assert_eq!(lex, read(b.join("lexicon.tsv")));
    assert_eq!(lex.lines().count(), 616);
}

#[test]
fn validation_errors_exit_one() {
    let tmp = TempDir::new().unwrap();
    let out = p(tmp.path());
    assert_eq!(
        code(&["gen-lexicon", "--set", "lexicon.root.count=0", "--out", out]),
        1
    );
    assert_eq!(
        code(&["generate", "--set", "activations.a_P=1.5", "--out", out]),
        1
    );
    assert_eq!(code(&["generate", "--n-tokens", "0", "--out", out]), 1);
    assert_eq!(
        code(&[
            "generate",
            "--set",
            "lexicon.file=/no/such/file.tsv",
            "--out",
            out
        ]),
        1
    );
    assert_eq!(
        code(&["generate", "--config", "/no/such/config", "--out", out]),
        1
    );
    assert_eq!(code(&["generate", "--frobnicate"]), 1);
    assert_eq!(code(&["corpus", "/no/such/text.txt", "--out", out]), 1);

    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "seed = 3\nactivations.a_Q = 0.5\n").unwrap();
    let res = mcwm(&["generate", "--config", p(&cfg), "--out", out]);
    assert_eq!(res.status.code(), Some(1));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("bad.cfg:2"), "{err}");
}

#[test]
fn infeasible_constraint_exits_two() {
    let tmp = TempDir::new().unwrap();
    let lex = tiny_lexicon(tmp.path());
    let rules = tmp.path().join("rules.tsv");
    fs::write(&rules, "bark\tS\t\nmo\tS\t\nlint\tS\t\n").unwrap();
    let args = [
        "generate",
        "--set",
        &format!("lexicon.file={}", p(&lex)),
        "--set",
        &format!("constraint={}", p(&rules)),
        "--set",
        "activations.a_S=1",
        "--out",
        p(tmp.path()),
    ];
    assert_eq!(code(&args), 2);
}

#[test]
fn generate_writes_tables_and_is_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let c = tmp.path().join("c");
    let summary = ok(&[
        "generate",
        "--n-tokens",
        "20000",
        "--seed",
        "5",
        "--svg",
        "--out",
        p(&a),
    ]);
    ok(&[
        "generate",
        "--n-tokens",
        "20000",
        "--seed",
        "5",
        "--svg",
        "--out",
        p(&b),
    ]);
    ok(&[
        "generate",
        "--n-tokens",
        "20000",
        "--seed",
        "5",
        "--threads",
        "4",
        "--svg",
        "--out",
        p(&c),
    ]);
    for name in [
        "counts.tsv",
        "lengths.tsv",
        "ranks.tsv",
        "fit.txt",
        "loglog.csv",
        "lexicon.tsv",
        "summary.txt",
        "rank_frequency.svg",
    ] {
        let first = read(a.join(name));
        assert_eq!(first, read(b.join(name)), "{name}");
        assert_eq!(first, read(c.join(name)), "{name} with 4 threads");
        assert!(first.lines().next().is_some(), "{name} is empty");
    }
    assert_eq!(key_value(&summary, "tokens_surviving"), "20000");
    assert_eq!(
        read(a.join("counts.tsv")).lines().next(),
        Some("surface\tcount")
    );
}

#[test]
fn single_token_and_survive_never() {
    let tmp = TempDir::new().unwrap();
    let one = tmp.path().join("one");
    ok(&["generate", "--n-tokens", "1", "--out", p(&one)]);
    assert_eq!(read(one.join("counts.tsv")).lines().count(), 2);
    assert_eq!(read(one.join("fit.txt")), "fit=unavailable\n");

    let none = tmp.path().join("none");
    let res = mcwm(&[
        "generate",
        "--set",
        "filter.c=0",
        "--n-tokens",
        "5000",
        "--out",
        p(&none),
    ]);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stdout).contains("warning"));
    for name in ["counts.tsv", "lengths.tsv", "ranks.tsv"] {
        assert_eq!(read(none.join(name)).lines().count(), 1, "{name}");
    }
}

#[test]
fn exact_paper_moments_and_notice() {
    let tmp = TempDir::new().unwrap();
    let text = ok(&["exact", "--out", p(tmp.path())]);
    assert!(text.contains("E[N]=2.700000"), "{text}");
    assert!(text.contains("notice:"), "{text}");
    assert!(!tmp.path().join("words.tsv").exists());
    let n = read(tmp.path().join("n_morphemes.tsv"));
    assert!(n.contains("4\t0.168000000000"), "{n}");
}

#[test]
fn exact_with_zero_activations_is_root_pmf() {
    let tmp = TempDir::new().unwrap();
    ok(&[
        "exact",
        "--set",
        "activations.a_P=0",
        "--set",
        "activations.a_S=0",
        "--set",
        "activations.a_E=0",
        "--out",
        p(tmp.path()),
    ]);
    let l = tmp.path().join("lx");
    ok(&["gen-lexicon", "--out", p(&l)]);
    let (lex, _) = load_lexicon(l.join("lexicon.tsv"), LoadOptions::default()).unwrap();
    let expected = class_length_pmf(lex.roots()).to_tsv();
    assert_eq!(read(tmp.path().join("length_pmf.tsv")), expected);
}

#[test]
fn exact_tiny_lexicon_enumerates_81() {
    let tmp = TempDir::new().unwrap();
    let lex = tiny_lexicon(tmp.path());
    let text = ok(&[
        "exact",
        "--set",
        &format!("lexicon.file={}", p(&lex)),
        "--out",
        p(tmp.path()),
    ]);
    assert_eq!(key_value(&text, "analyses"), "81");
    let sum: f64 = key_value(&text, "probability_sum").parse().unwrap();
    assert!((sum - 1.0).abs() < 1e-12);
    assert_eq!(read(tmp.path().join("words.tsv")).lines().count(), 82);
}

#[test]
fn generate_agrees_with_exact_distribution() {
    let tmp = TempDir::new().unwrap();
    let lex = tiny_lexicon(tmp.path());
    let lex_arg = format!("lexicon.file={}", p(&lex));
    let e = tmp.path().join("e");
    let g = tmp.path().join("g");
    ok(&["exact", "--set", &lex_arg, "--out", p(&e)]);
    let n = 200_000u64;
    ok(&[
        "generate",
        "--set",
        &lex_arg,
        "--n-tokens",
        &n.to_string(),
        "--out",
        p(&g),
    ]);

    let exact: BTreeMap<String, f64> = read(e.join("words_by_surface.tsv"))
        .lines()
        .skip(1)
        .map(|l| {
            let (s, v) = l.split_once('\t').unwrap();
            (s.to_string(), v.parse().unwrap())
        })
        .collect();
    let counts: BTreeMap<String, u64> = read(g.join("counts.tsv"))
        .lines()
        .skip(1)
        .map(|l| {
            let (s, v) = l.split_once('\t').unwrap();
            (s.to_string(), v.parse().unwrap())
        })
        .collect();
    assert!(counts.keys().all(|s| exact.contains_key(s)));
    for (s, q) in &exact {
        let phat = counts.get(s).copied().unwrap_or(0) as f64 / n as f64;
        let se = (q * (1.0 - q) / n as f64).sqrt();
        assert!((phat - q).abs() < 5.0 * se + 1e-9, "{s}: {phat} vs {q}");
    }
}

#[test]
fn compare_identical_and_missing() {
    let tmp = TempDir::new().unwrap();
    let g = tmp.path().join("g");
    ok(&["generate", "--n-tokens", "5000", "--out", p(&g)]);
    let text = ok(&["compare", p(&g), p(&g), "--out", p(&tmp.path().join("c"))]);
    assert!(text.contains("tv_distance=0.000000000"), "{text}");
    assert!(text.contains("alpha_difference=0.000000000"), "{text}");
    assert!(tmp.path().join("c/comparison.txt").exists());

    let res = mcwm(&[
        "compare",
        p(&g),
        p(&tmp.path().join("missing")),
        "--out",
        p(tmp.path()),
    ]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("lengths.tsv"));
}

#[test]
fn corpus_command_tables() {
    let tmp = TempDir::new().unwrap();
    let text = tmp.path().join("t.txt");
    fs::write(&text, "To be, or not to be: that is the question.\n").unwrap();
    let out = tmp.path().join("o");
    let summary = ok(&["corpus", p(&text), "--out", p(&out)]);
    assert_eq!(key_value(&summary, "tokens"), "10");
    let lengths = read(out.join("lengths.tsv"));
    assert!(
        lengths.starts_with("length\tcount\tshare_percent\n2\t6\t60.00\n3\t2\t20.00\n"),
        "{lengths}"
    );
}

#[test]
fn one_point_sweep_matches_generate() {
    let tmp = TempDir::new().unwrap();
    let g = tmp.path().join("g");
    let s = tmp.path().join("s");
    let summary = ok(&[
        "generate",
        "--seed",
        "9",
        "--n-tokens",
        "30000",
        "--out",
        p(&g),
    ]);
    ok(&[
        "sweep",
        "--seed",
        "9",
        "--n-tokens",
        "30000",
        "--set",
        "sweep.activations.a_P=0.4",
        "--out",
        p(&s),
    ]);
    let csv = read(s.join("sweep.csv"));
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    // point, a_P, run_seed, alpha, mode, mean_length, types, tokens_surviving
    assert_eq!(row[2], "9");
    assert_eq!(row[3], key_value(&summary, "alpha"));
    assert_eq!(row[4], key_value(&summary, "mode"));
    assert_eq!(row[5], key_value(&summary, "mean_length"));
    assert_eq!(row[6], key_value(&summary, "types"));
    assert_eq!(row[7], key_value(&summary, "tokens_surviving"));
}

#[test]
fn sweep_over_inflection_activation() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("grid.cfg");
    let mut text = String::new();
    for (class, len) in [("prefix", 2), ("root", 4), ("deriv", 3), ("infl", 2)] {
        text.push_str(&format!(
            "lexicon.{class}.count = 1\nlexicon.{class}.length_min = {len}\nlexicon.{class}.length_max = {len}\n"
        ));
    }
    text.push_str("n_tokens = 1000\nsweep.activations.a_E = 0, 1\n");
    fs::write(&cfg, text).unwrap();
    ok(&["sweep", "--config", p(&cfg), "--out", p(tmp.path())]);
    let csv = read(tmp.path().join("sweep.csv"));
    let mean: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(5).unwrap().parse().unwrap())
        .collect();
    assert_eq!(mean.len(), 2);
    assert!((mean[1] - mean[0] - 2.0).abs() < 1e-9, "{mean:?}");
}

#[test]
fn sweep_refuses_oversized_grid() {
    let tmp = TempDir::new().unwrap();
    let res = mcwm(&[
        "sweep",
        "--set",
        "sweep.seed=1,2,3",
        "--set",
        "sweep.n_tokens=10,20",
        "--set",
        "sweep.max_points=5",
        "--out",
        p(tmp.path()),
    ]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("6 points"));
}
