use std::fs;
use std::path::PathBuf;

use gradinv::secthree::{datum_violations, parse_datum, run_datum, validate_datum, FormKind};

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/sec3")
}

fn load(dir: PathBuf) -> Vec<(String, String)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .map(|p| {
            (
                p.file_stem().unwrap().to_string_lossy().into_owned(),
                fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

#[test]
fn valid_suite_builds_involutions() {
    let suite = load(data_dir());
    assert!(suite.len() >= 6);
    let mut kinds = [0usize; 2];
    for (name, json) in &suite {
        let dat = parse_datum(json).unwrap();
        let rep = run_datum(&dat).unwrap();
        assert!(rep.ok(dat.kind), "{name}: {rep:?}");
        kinds[(dat.kind == FormKind::Symplectic) as usize] += 1;
    }
    assert!(kinds[0] > 0 && kinds[1] > 0);
}

#[test]
fn invalid_suite_rejected() {
    for (name, json) in load(data_dir().join("invalid")) {
        let dat = parse_datum(&json).unwrap();
        assert!(!validate_datum(&dat), "{name}");
        assert!(!run_datum(&dat).unwrap().valid, "{name}");
    }
}

/// Replacing any `g''_j` or `g_i` so that its defining relation breaks is
/// always rejected.
#[test]
fn perturbed_degrees_rejected() {
    for (name, json) in load(data_dir()) {
        let dat = parse_datum(&json).unwrap();
        let g = dat.group.clone();
        let tau = dat.tau.clone();
        for j in 0..dat.dual_pairs.len() {
            for x in g.elements() {
                let want = g.sub(&g.neg(&tau.apply(&dat.dual_pairs[j].0)), &dat.g0);
                if x == want {
                    continue;
                }
                let mut bad = dat.clone();
                bad.dual_pairs[j].1 = x;
                assert!(!validate_datum(&bad), "{name}: pair {j}");
            }
        }
        for i in 0..dat.self_dual.len() {
            let t_image = dat.t_seq[i]
                .residues()
                .iter()
                .zip(&dat.embedding)
                .fold(g.zero(), |acc, (&k, img)| g.add(&acc, &g.scale(k as i64, img)));
            for x in g.elements() {
                let lhs = g.add(&g.add(&tau.apply(&dat.g0), &tau.apply(&x)), &x);
                if lhs == t_image {
                    continue;
                }
                let mut bad = dat.clone();
                bad.self_dual[i] = x;
                assert!(!datum_violations(&bad).is_empty(), "{name}: self-dual {i}");
            }
        }
    }
}
