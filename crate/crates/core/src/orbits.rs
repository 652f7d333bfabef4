//! `SL₂(ℤ_n)`-conjugacy of 2×2 matrices with `det = -1` and `tr = 0`.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::cyclotomic::mod_inverse;
use crate::error::{Error, Result};

/// A 2×2 matrix over `ℤ_n`, entries row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModMatrix2 {
    n: u64,
    e: [u64; 4],
}

impl ModMatrix2 {
    pub fn new(n: u64, entries: [i64; 4]) -> Self {
        assert!(n >= 1, "modulus must be positive");
        let r = |x: i64| x.rem_euclid(n as i64) as u64;
        ModMatrix2 {
            n,
            e: [r(entries[0]), r(entries[1]), r(entries[2]), r(entries[3])],
        }
    }

    pub fn identity(n: u64) -> Self {
        Self::new(n, [1, 0, 0, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn entries(&self) -> [u64; 4] {
        self.e
    }

    pub fn det(&self) -> u64 {
        let n = self.n as u128;
        let [a, b, c, d] = self.e.map(|x| x as u128);
        ((a * d % n + n * n - b * c % n) % n) as u64
    }

    pub fn trace(&self) -> u64 {
        (self.e[0] + self.e[3]) % self.n
    }

    /// `det = -1` and `tr = 0` modulo `n`.
    pub fn in_locus(&self) -> bool {
        self.det() == (self.n - 1) % self.n && self.trace() == 0
    }

    pub fn mul(&self, o: &ModMatrix2) -> ModMatrix2 {
        assert_eq!(self.n, o.n, "modulus mismatch");
        let n = self.n;
        let [a, b, c, d] = self.e;
        let [p, q, r, s] = o.e;
        let f = |x: u64, y: u64, z: u64, w: u64| ((x * y) % n + (z * w) % n) % n;
        ModMatrix2 {
            n,
            e: [f(a, p, b, r), f(a, q, b, s), f(c, p, d, r), f(c, q, d, s)],
        }
    }

    /// Inverse when the determinant is a unit.
    pub fn inverse(&self) -> Option<ModMatrix2> {
        let n = self.n;
        let inv = mod_inverse(self.det(), n)?;
        let [a, b, c, d] = self.e;
        let s = |x: u64| (x % n * inv) % n;
        let neg = |x: u64| (n - x % n) % n;
        Some(ModMatrix2 {
            n,
            e: [s(d), s(neg(b)), s(neg(c)), s(a)],
        })
    }

    /// `P⁻¹ A P`.
    pub fn conjugate_by(&self, p: &ModMatrix2) -> Option<ModMatrix2> {
        Some(p.inverse()?.mul(self).mul(p))
    }

    /// Reduction modulo a divisor `q` of `n`.
    pub fn reduce(&self, q: u64) -> ModMatrix2 {
        assert!(q >= 1 && self.n.is_multiple_of(q), "{q} does not divide {}", self.n);
        ModMatrix2 {
            n: q,
            e: self.e.map(|x| x % q),
        }
    }

    pub fn rows(&self) -> [[i64; 2]; 2] {
        [
            [self.e[0] as i64, self.e[1] as i64],
            [self.e[2] as i64, self.e[3] as i64],
        ]
    }
}

impl fmt::Display for ModMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.e;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

impl Serialize for ModMatrix2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

/// The orbit representatives `θ₁`, `θ₂` (n even), `θ₃` (4 | n).
pub fn canonical_forms(n: u64) -> Vec<ModMatrix2> {
    let mut out = vec![ModMatrix2::new(n, [1, 0, 0, -1])];
    if n.is_multiple_of(2) {
        out.push(ModMatrix2::new(n, [0, 1, 1, 0]));
    }
    if n.is_multiple_of(4) {
        out.push(ModMatrix2::new(n, [1, 2, (n / 2) as i64, -1]));
    }
    out
}

/// `"theta1"`, `"theta2"`, `"theta3"`, or `None` for non-canonical input.
pub fn canonical_label(a: &ModMatrix2) -> Option<String> {
    canonical_forms(a.n)
        .iter()
        .position(|t| t == a)
        .map(|i| format!("theta{}", i + 1))
}

fn transvections(n: u64) -> [ModMatrix2; 2] {
    [ModMatrix2::new(n, [1, 1, 0, 1]), ModMatrix2::new(n, [1, 0, 1, 1])]
}

/// Finds `θ ∈ O_n` and `P ∈ SL₂(ℤ_n)` with `P⁻¹AP = θ` by breadth-first
/// search over conjugation by the two elementary transvections.
pub fn orbit_reduce(a: &ModMatrix2) -> Result<(ModMatrix2, ModMatrix2)> {
    if !a.in_locus() {
        return Err(Error::NotInLocus);
    }
    let n = a.n;
    let forms = canonical_forms(n);
    let gens = transvections(n);
    let inv: Vec<ModMatrix2> = gens.iter().map(|g| g.inverse().expect("unimodular")).collect();
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(*a);
    queue.push_back((*a, ModMatrix2::identity(n)));
    while let Some((b, q)) = queue.pop_front() {
        if forms.contains(&b) {
            return Ok((b, q));
        }
        for (g, gi) in gens.iter().zip(&inv) {
            let next = gi.mul(&b).mul(g);
            debug_assert!(next.in_locus());
            if seen.insert(next) {
                queue.push_back((next, q.mul(g)));
            }
        }
    }
    Err(Error::InvalidArgument(format!("no canonical form reached from {a}")))
}

/// All matrices of determinant 1 over `ℤ_n`.
pub fn sl2_elements(n: u64) -> Vec<ModMatrix2> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let m = ModMatrix2 { n, e: [a, b, c, d] };
                    if m.det() == 1 % n {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// All matrices in the `det = -1`, `tr = 0` locus.
pub fn locus(n: u64) -> Vec<ModMatrix2> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let m = ModMatrix2 {
                    n,
                    e: [a, b, c, (n - a) % n],
                };
                if m.in_locus() {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// Some `P ∈ SL₂(ℤ_n)` with `PA = BP`, by exhaustion.
pub fn find_conjugator(a: &ModMatrix2, b: &ModMatrix2) -> Option<ModMatrix2> {
    sl2_elements(a.n)
        .into_iter()
        .find(|p| p.mul(a) == b.mul(p))
}

/// No two members of `O_n` are `SL₂(ℤ_n)`-conjugate.
pub fn verify_pairwise_nonconjugate(n: u64) -> bool {
    let forms = canonical_forms(n);
    let sl2 = sl2_elements(n);
    for (i, x) in forms.iter().enumerate() {
        for y in &forms[i + 1..] {
            if sl2.iter().any(|p| p.mul(x) == y.mul(p)) {
                return false;
            }
        }
    }
    true
}

/// A replayed row: `P⁻¹τ'P` should equal `target` with `det P = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub tau: ModMatrix2,
    pub p: ModMatrix2,
    pub target: ModMatrix2,
    pub det_ok: bool,
    pub conjugate_ok: bool,
}

impl TableRow {
    fn new(n: u64, tau: [i64; 4], p: [i64; 4], target: [i64; 4]) -> Self {
        let tau = ModMatrix2::new(n, tau);
        let p = ModMatrix2::new(n, p);
        let target = ModMatrix2::new(n, target);
        let det_ok = p.det() == 1 % n;
        let conjugate_ok = tau.conjugate_by(&p) == Some(target);
        TableRow {
            tau,
            p,
            target,
            det_ok,
            conjugate_ok,
        }
    }

    pub fn ok(&self) -> bool {
        self.det_ok && self.conjugate_ok
    }
}

/// Rows of the 2-power lifting table applicable at `n = 2^i`, followed by
/// the second-case closed forms for `q₁, q₂ ∈ {0, 1}`.
pub fn conjugator_table(i: u32) -> Vec<TableRow> {
    assert!(i >= 2, "the table starts at i = 2");
    let n = 1u64 << i;
    let h = 1i64 << (i - 1); // 2^{i-1}
    let g = 1i64 << (i - 2); // 2^{i-2}
    let t1 = [1, 0, 0, -1];
    let t3 = [1, 2, h, -1];
    let mut rows = vec![
        TableRow::new(n, t1, [1, 0, 0, 1], t1),
        TableRow::new(n, [1, h, 0, -1], [1, g, 0, 1], t1),
        TableRow::new(n, [1, 0, h, -1], [1, 0, g, 1], t1),
    ];
    if i == 2 {
        rows.push(TableRow::new(n, [1, 2, 2, -1], [1, 0, 0, 1], [1, 2, 2, -1]));
        rows.push(TableRow::new(n, [-1, 0, 0, 1], [0, 1, -1, 0], t1));
        rows.push(TableRow::new(n, [-1, 2, 0, 1], [1, 1, -1, 0], t1));
        rows.push(TableRow::new(n, [-1, 0, 2, 1], [0, 1, -1, 1], t1));
    } else {
        rows.push(TableRow::new(n, [1, h, h, -1], [g + 1, g, g, -g + 1], t1));
        rows.push(TableRow::new(n, [1 + h, 0, 0, -1 - h], [1 + g, 1, -g, 1 - h], t3));
        rows.push(TableRow::new(n, [1 + h, h, 0, -1 - h], [1, 1, g, 1 + g], t3));
        rows.push(TableRow::new(n, [1 + h, 0, h, -1 - h], [1, 1 + g, 0, 1], t3));
    }
    rows.push(TableRow::new(n, [1 + h, h, h, -1 - h], [1, 1, 0, 1], t3));

    let t2 = [0, 1, 1, 0];
    for q1 in 0..=1i64 {
        for q2 in 0..=1i64 {
            let tau = [h * q1, 1 + h * q2, 1 - h * q2, -h * q1];
            let p = match i {
                2 => [1 - q2, q2 + 2 * q1 * q2, 2 * q1 - q2, 1 - q2 + 2 * q1 * q2],
                3 => [1, 2 * q2, 4 * q1 + 2 * q2, 1 + 4 * q2],
                _ => [g * q2 - 1, 0, h * q1, -g * q2 - 1],
            };
            rows.push(TableRow::new(n, tau, p, t2));
        }
    }
    rows
}

/// Every row of [`conjugator_table`] checks out.
pub fn verify_conjugator_table(i: u32) -> bool {
    conjugator_table(i).iter().all(TableRow::ok)
}

/// For odd `q`: `[[1,0],[0,-1]] ∼ [[0,1],[1,0]] ∼ [[1,2],[0,-1]]` in `SL₂(ℤ_q)`.
pub fn verify_odd_similarities(q: u64) -> bool {
    if q.is_multiple_of(2) {
        return false;
    }
    let t1 = ModMatrix2::new(q, [1, 0, 0, -1]);
    let others = [ModMatrix2::new(q, [0, 1, 1, 0]), ModMatrix2::new(q, [1, 2, 0, -1])];
    others.iter().all(|b| {
        find_conjugator(b, &t1).is_some_and(|p| t1.conjugate_by(&p) == Some(*b))
    })
}

/// Outcome of an exhaustive orbit sweep at one modulus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitSweep {
    pub n: u64,
    pub locus_size: usize,
    pub all_certified: bool,
    pub forms_reached: usize,
    pub expected_forms: usize,
    pub pairwise_nonconjugate: bool,
}

impl OrbitSweep {
    pub fn ok(&self) -> bool {
        self.all_certified && self.forms_reached == self.expected_forms && self.pairwise_nonconjugate
    }
}

/// Reduces every locus matrix at modulus `n` and re-checks each witness.
pub fn sweep(n: u64) -> OrbitSweep {
    let all = locus(n);
    let mut reached = HashSet::new();
    let mut certified = true;
    for a in &all {
        match orbit_reduce(a) {
            Ok((theta, p)) => {
                certified &= p.det() == 1 % n && a.conjugate_by(&p) == Some(theta);
                reached.insert(theta);
            }
            Err(_) => certified = false,
        }
    }
    OrbitSweep {
        n,
        locus_size: all.len(),
        all_certified: certified,
        forms_reached: reached.len(),
        expected_forms: canonical_forms(n).len(),
        pairwise_nonconjugate: verify_pairwise_nonconjugate(n),
    }
}

/// `Some(i)` when `n = 2^i` with `i ≥ 2`.
pub fn two_power_exponent(n: u64) -> Option<u32> {
    (n >= 4 && n.is_power_of_two()).then(|| n.trailing_zeros())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms_by_modulus() {
        assert_eq!(canonical_forms(3).len(), 1);
        assert_eq!(canonical_forms(2).len(), 2);
        assert_eq!(canonical_forms(4).len(), 3);
        assert_eq!(canonical_forms(4)[2], ModMatrix2::new(4, [1, 2, 2, -1]));
    }

    #[test]
    fn reduce_examples() {
        let t1 = ModMatrix2::new(5, [1, 0, 0, -1]);
        assert_eq!(orbit_reduce(&t1).unwrap(), (t1, ModMatrix2::identity(5)));
        let a = ModMatrix2::new(8, [1, 4, 0, -1]);
        let (theta, p) = orbit_reduce(&a).unwrap();
        assert_eq!(theta, ModMatrix2::new(8, [1, 0, 0, -1]));
        assert_eq!(a.conjugate_by(&p), Some(theta));
        // the table's P works too
        assert_eq!(a.conjugate_by(&ModMatrix2::new(8, [1, 2, 0, 1])), Some(theta));
        let b = ModMatrix2::new(4, [1, 2, 2, -1]);
        assert_eq!(orbit_reduce(&b).unwrap(), (b, ModMatrix2::identity(4)));
        assert_eq!(orbit_reduce(&ModMatrix2::identity(3)), Err(Error::NotInLocus));
    }

    #[test]
    fn nonconjugacy() {
        assert!(verify_pairwise_nonconjugate(2));
        assert!(verify_pairwise_nonconjugate(3));
        assert!(verify_pairwise_nonconjugate(4));
    }

    #[test]
    fn locus_sizes() {
        let sizes: Vec<usize> = (2..=8).map(|n| locus(n).len()).collect();
        assert_eq!(sizes, vec![4, 12, 20, 30, 48, 56, 96]);
    }

    #[test]
    fn table_rows() {
        let rows = conjugator_table(3);
        let row = rows
            .iter()
            .find(|r| r.tau == ModMatrix2::new(8, [1, 4, 4, -1]))
            .unwrap();
        assert_eq!(row.p, ModMatrix2::new(8, [3, 2, 2, -1]));
        assert!(row.ok());
        let rows2 = conjugator_table(2);
        let row = rows2
            .iter()
            .find(|r| r.tau == ModMatrix2::new(4, [-1, 0, 0, 1]))
            .unwrap();
        assert!(row.ok());
        let closed = rows2
            .iter()
            .find(|r| r.tau == ModMatrix2::new(4, [2, 3, 3, 2]))
            .unwrap();
        assert_eq!(closed.p, ModMatrix2::new(4, [0, 3, 1, 2]));
        assert!(closed.ok());
        for i in 2..=5 {
            assert!(verify_conjugator_table(i), "i = {i}");
        }
    }

    #[test]
    fn odd_similarities() {
        for q in [3, 5, 7, 9] {
            assert!(verify_odd_similarities(q));
        }
    }
}
