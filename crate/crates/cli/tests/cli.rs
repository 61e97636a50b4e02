use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bezout_owf::codec::Artifact;
use bezout_owf::{brute_force_invert, AttackOptions, Polynomial, Prime, PublicKey};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bezout-owf"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn keygen(dir: &Path, p: &str, seed: &str) {
    let out = run(
        dir,
        &[
            "keygen", "--p", p, "--seed", seed, "--pub", "k.pub", "--priv", "k.priv",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn count_prints_the_search_space() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["count", "--p", "13", "--mode", "balanced"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "924\n");
    let out = run(dir.path(), &["count", "--p", "5", "--mode", "all"]);
    assert_eq!(stdout(&out), "14\n");
    let out = run(dir.path(), &["count", "--p", "5", "--mode", "some"]);
    assert_eq!(code(&out), 64);
    let out = run(dir.path(), &["count", "--p", "9", "--mode", "all"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn usage_errors_exit_64() {
    let dir = TempDir::new().unwrap();
    for args in [
        &[][..],
        &["frobnicate"][..],
        &["keygen", "--p", "5"][..],
        &["verify", "--pub", "x"][..],
        &["attack", "--pub", "x", "--out", "y", "--workers", "0"][..],
        &[
            "keygen", "--p", "five", "--seed", "1", "--pub", "a", "--priv", "b",
        ][..],
    ] {
        let out = run(dir.path(), args);
        assert_eq!(code(&out), 64, "{args:?}");
        assert!(
            stderr(&out).contains("--help") || stderr(&out).contains("Usage"),
            "{args:?}"
        );
    }
    assert_eq!(code(&run(dir.path(), &["--help"])), 0);
}

#[test]
fn keygen_prove_verify_round_trip() {
    let dir = TempDir::new().unwrap();
    keygen(dir.path(), "5", "42");
    let out = run(
        dir.path(),
        &["prove", "--priv", "k.priv", "--out", "k.proof"],
    );
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("reveals the private factor"));
    let out = run(
        dir.path(),
        &["verify", "--pub", "k.pub", "--proof", "k.proof"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out), "accept\n");
}

#[test]
fn keygen_warns_for_small_primes_and_rejects_bad_ones() {
    let dir = TempDir::new().unwrap();
    let out = run(
        dir.path(),
        &[
            "keygen", "--p", "13", "--seed", "1", "--pub", "a", "--priv", "b",
        ],
    );
    assert!(stderr(&out).contains("experimental"));
    let out = run(
        dir.path(),
        &[
            "keygen", "--p", "67", "--seed", "1", "--pub", "a", "--priv", "b",
        ],
    );
    assert_eq!(code(&out), 0);
    assert!(!stderr(&out).contains("experimental"));
    let out = run(
        dir.path(),
        &[
            "keygen", "--p", "2", "--seed", "1", "--pub", "c", "--priv", "d",
        ],
    );
    assert_eq!(code(&out), 2);
    assert!(!path(&dir, "c").exists() && !path(&dir, "d").exists());
}

#[test]
fn keygen_is_byte_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    keygen(a.path(), "23", "7");
    keygen(b.path(), "23", "7");
    for f in ["k.pub", "k.priv"] {
        assert_eq!(
            fs::read(path(&a, f)).unwrap(),
            fs::read(path(&b, f)).unwrap()
        );
    }
}

#[test]
fn verify_rejects_a_wrong_degree_proof() {
    let dir = TempDir::new().unwrap();
    fs::write(
        path(&dir, "k.pub"),
        "# bezout-owf\nversion=1\nrole=public\np=5\nA=4,3\n",
    )
    .unwrap();
    fs::write(
        path(&dir, "bad.proof"),
        "# bezout-owf\nversion=1\nrole=proof\np=5\nP=4,1\n",
    )
    .unwrap();
    let out = run(
        dir.path(),
        &["verify", "--pub", "k.pub", "--proof", "bad.proof"],
    );
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("check (a)"), "{}", stderr(&out));

    fs::write(
        path(&dir, "q.proof"),
        "# bezout-owf\nversion=1\nrole=proof\np=5\nP=2,3,1\n",
    )
    .unwrap();
    let out = run(
        dir.path(),
        &["verify", "--pub", "k.pub", "--proof", "q.proof"],
    );
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("check (c)"), "{}", stderr(&out));
}

#[test]
fn verify_malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    fs::write(
        path(&dir, "k.pub"),
        "# bezout-owf\nversion=1\nrole=public\np=5\nA=4,3,0\n",
    )
    .unwrap();
    fs::write(
        path(&dir, "ok.proof"),
        "# bezout-owf\nversion=1\nrole=proof\np=5\nP=2,2,1\n",
    )
    .unwrap();
    let out = run(
        dir.path(),
        &["verify", "--pub", "k.pub", "--proof", "ok.proof"],
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 5"), "{}", stderr(&out));

    let out = run(
        dir.path(),
        &["verify", "--pub", "missing.pub", "--proof", "ok.proof"],
    );
    assert_eq!(code(&out), 2);

    fs::write(
        path(&dir, "k.pub"),
        "# bezout-owf\nversion=1\nrole=public\np=7\nA=1\n",
    )
    .unwrap();
    let out = run(
        dir.path(),
        &["verify", "--pub", "k.pub", "--proof", "ok.proof"],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn prove_on_malformed_key_exits_2() {
    let dir = TempDir::new().unwrap();
    fs::write(
        path(&dir, "k.priv"),
        "# bezout-owf\nversion=1\nrole=private\np=5\n",
    )
    .unwrap();
    let out = run(
        dir.path(),
        &["prove", "--priv", "k.priv", "--out", "k.proof"],
    );
    assert_eq!(code(&out), 2);
    assert!(!path(&dir, "k.proof").exists());
}

/// A balanced-degree key at p = 7 with no preimage.
fn orphan_key() -> PublicKey {
    let p = Prime::new(7).unwrap();
    (0..7u64.pow(3))
        .map(|n| Polynomial::new(p, vec![n % 7, n / 7 % 7, n / 49]))
        .filter_map(|a| PublicKey::new(p, a).ok())
        .find(|k| {
            brute_force_invert(k, &AttackOptions::default())
                .unwrap()
                .preimages()
                .is_empty()
        })
        .expect("most keys have no preimage")
}

#[test]
fn attack_exit_codes() {
    let dir = TempDir::new().unwrap();
    keygen(dir.path(), "11", "3");
    let out = run(dir.path(), &["attack", "--pub", "k.pub", "--out", "a.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(path(&dir, "a.csv")).unwrap();
    assert!(csv.starts_with("p,A,rootsP,candidates_tested,pruned,wall_ms\n"));
    let priv_text = fs::read_to_string(path(&dir, "k.priv")).unwrap();
    let roots = priv_text
        .lines()
        .find_map(|l| l.strip_prefix("rootsP="))
        .unwrap();
    assert!(csv.contains(&format!(",{},", roots.replace(',', ";"))));

    fs::write(path(&dir, "o.pub"), orphan_key().to_text()).unwrap();
    let out = run(dir.path(), &["attack", "--pub", "o.pub", "--out", "o.csv"]);
    assert_eq!(code(&out), 3);
    assert!(fs::read_to_string(path(&dir, "o.csv"))
        .unwrap()
        .contains(",,"));

    let out = run(
        dir.path(),
        &[
            "attack", "--pub", "k.pub", "--limit", "100", "--out", "big.csv",
        ],
    );
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("252"));
    assert!(!path(&dir, "big.csv").exists());

    fs::write(path(&dir, "junk.pub"), "hello\n").unwrap();
    let out = run(
        dir.path(),
        &["attack", "--pub", "junk.pub", "--out", "j.csv"],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn attack_output_is_identical_across_workers() {
    let dir = TempDir::new().unwrap();
    keygen(dir.path(), "13", "9");
    let mut outputs = Vec::new();
    for w in ["1", "2", "8"] {
        let file = format!("a{w}.csv");
        let out = run(
            dir.path(),
            &[
                "attack",
                "--pub",
                "k.pub",
                "--workers",
                w,
                "--no-timing",
                "--out",
                &file,
            ],
        );
        assert_eq!(code(&out), 0);
        outputs.push(fs::read(path(&dir, &file)).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn survey_output_is_identical_across_workers() {
    let dir = TempDir::new().unwrap();
    let mut outputs = Vec::new();
    for w in ["1", "2", "8"] {
        let file = format!("s{w}.csv");
        let out = run(
            dir.path(),
            &[
                "survey",
                "--p",
                "11",
                "--mode",
                "all",
                "--pairing",
                "unordered",
                "--workers",
                w,
                "--out",
                &file,
            ],
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        assert!(stdout(&out).starts_with("rows=511 "));
        outputs.push(fs::read(path(&dir, &file)).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));

    let out = run(
        dir.path(),
        &[
            "survey",
            "--p",
            "31",
            "--mode",
            "all",
            "--pairing",
            "ordered",
            "--out",
            "x.csv",
        ],
    );
    assert_eq!(code(&out), 4);
    let out = run(
        dir.path(),
        &[
            "survey",
            "--p",
            "5",
            "--mode",
            "all",
            "--pairing",
            "sideways",
            "--out",
            "x.csv",
        ],
    );
    assert_eq!(code(&out), 64);
}

#[test]
fn lamport_flow() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let out = run(
        d,
        &[
            "lamport-keygen",
            "--p",
            "11",
            "--bits",
            "4",
            "--seed",
            "5",
            "--pub",
            "l.pub",
            "--priv",
            "l.priv",
        ],
    );
    assert_eq!(code(&out), 0);
    let out = run(
        d,
        &[
            "lamport-sign",
            "--priv",
            "l.priv",
            "--msg",
            "1011",
            "--out",
            "l.sig",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(fs::read_to_string(d.join("l.priv"))
        .unwrap()
        .contains("\nused=true\n"));

    let out = run(
        d,
        &[
            "lamport-verify",
            "--pub",
            "l.pub",
            "--msg",
            "1011",
            "--sig",
            "l.sig",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = run(
        d,
        &[
            "lamport-verify",
            "--pub",
            "l.pub",
            "--msg",
            "1010",
            "--sig",
            "l.sig",
        ],
    );
    assert_eq!(code(&out), 1);
    let out = run(
        d,
        &[
            "lamport-verify",
            "--pub",
            "l.pub",
            "--msg",
            "10",
            "--sig",
            "l.sig",
        ],
    );
    assert_eq!(code(&out), 2);

    let out = run(
        d,
        &[
            "lamport-sign",
            "--priv",
            "l.priv",
            "--msg",
            "0000",
            "--out",
            "l2.sig",
        ],
    );
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("already signed"));
    assert!(!d.join("l2.sig").exists());

    let out = run(
        d,
        &[
            "lamport-keygen",
            "--p",
            "11",
            "--bits",
            "0",
            "--seed",
            "5",
            "--pub",
            "z.pub",
            "--priv",
            "z.priv",
        ],
    );
    assert_eq!(code(&out), 2);
    let out = run(
        d,
        &[
            "lamport-keygen",
            "--p",
            "2",
            "--bits",
            "3",
            "--seed",
            "5",
            "--pub",
            "z.pub",
            "--priv",
            "z.priv",
        ],
    );
    assert_eq!(code(&out), 2);

    fs::write(
        d.join("bad.sig"),
        "# bezout-owf\nversion=1\nrole=signature\np=11\n",
    )
    .unwrap();
    let out = run(
        d,
        &[
            "lamport-verify",
            "--pub",
            "l.pub",
            "--msg",
            "1011",
            "--sig",
            "bad.sig",
        ],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn lamport_sign_length_mismatch_leaves_key_unused() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    run(
        d,
        &[
            "lamport-keygen",
            "--p",
            "7",
            "--bits",
            "3",
            "--seed",
            "1",
            "--pub",
            "l.pub",
            "--priv",
            "l.priv",
        ],
    );
    let before = fs::read(d.join("l.priv")).unwrap();
    let out = run(
        d,
        &[
            "lamport-sign",
            "--priv",
            "l.priv",
            "--msg",
            "10",
            "--out",
            "l.sig",
        ],
    );
    assert_eq!(code(&out), 2);
    assert_eq!(fs::read(d.join("l.priv")).unwrap(), before);
}
