use std::time::Instant;

use gradinv::realize::soundness_oracle;

#[test]
fn oracle_pauli_moduli() {
    for n in [2, 3] {
        let start = Instant::now();
        let rep = soundness_oracle(n, 1).unwrap();
        println!("n = {n}: {rep:?} in {:?}", start.elapsed());
        assert!(rep.ok(), "{rep:?}");
        assert_eq!(rep.rejected_checked + rep.accepted, rep.candidates);
    }
}
