//! Finite abelian groups `ℤ_{ℓ_1} × … × ℤ_{ℓ_k}` in additive notation.

use std::collections::HashSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::RootOfUnity;
use crate::error::{Error, Result};

/// Largest group for which bijectivity is decided by listing images.
pub const BRUTE_FORCE_LIMIT: u64 = 10_000;
/// Default `|T|` cap for automorphism enumeration.
pub const DEFAULT_ENUM_CAP: u64 = 4096;

/// A direct product of cyclic groups, one per generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FinAbGroup {
    orders: Vec<u64>,
}

/// Residue vector; entry `j` lies in `0..orders[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElem {
    residues: Vec<u64>,
}

impl GroupElem {
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn is_zero(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.residues.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

impl FinAbGroup {
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        if orders.contains(&0) {
            return Err(Error::InvalidArgument("cyclic factor of order 0".into()));
        }
        Ok(FinAbGroup { orders })
    }

    /// `ℤ_n^k`.
    pub fn homogeneous(n: u64, k: usize) -> Self {
        Self::new(vec![n; k]).expect("positive order")
    }

    /// Parses descriptors such as `Z4^2`, `Z2^2xZ3^2` or `1` (trivial group).
    pub fn parse(desc: &str) -> Result<Self> {
        let desc = desc.trim();
        if desc.is_empty() || desc == "1" {
            return Ok(FinAbGroup { orders: Vec::new() });
        }
        let bad = |why: &str| Error::Parse(format!("group descriptor {desc:?}: {why}"));
        let mut orders = Vec::new();
        for factor in desc.split(['x', '×']) {
            let factor = factor.trim();
            let body = factor
                .strip_prefix('Z')
                .or_else(|| factor.strip_prefix('ℤ'))
                .ok_or_else(|| bad("factor must start with Z"))?;
            let (ord, pow) = match body.split_once('^') {
                Some((o, p)) => (o, p.parse::<usize>().map_err(|_| bad("bad exponent"))?),
                None => (body, 1),
            };
            let ord: u64 = ord.parse().map_err(|_| bad("bad order"))?;
            if ord == 0 {
                return Err(bad("order 0"));
            }
            orders.extend(std::iter::repeat_n(ord, pow));
        }
        Ok(FinAbGroup { orders })
    }

    /// Canonical descriptor, grouping consecutive equal orders.
    pub fn descriptor(&self) -> String {
        if self.orders.is_empty() {
            return "1".into();
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.orders.len() {
            let o = self.orders[i];
            let mut j = i;
            while j < self.orders.len() && self.orders[j] == o {
                j += 1;
            }
            parts.push(match j - i {
                1 => format!("Z{o}"),
                k => format!("Z{o}^{k}"),
            });
            i = j;
        }
        parts.join("x")
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    /// `|T|`, saturating at `u64::MAX`.
    pub fn size(&self) -> u64 {
        self.orders
            .iter()
            .try_fold(1u64, |acc, &o| acc.checked_mul(o))
            .unwrap_or(u64::MAX)
    }

    /// Least common multiple of the orders.
    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |acc, &o| acc.lcm(&o))
    }

    /// `Some(n)` when `T = ℤ_n^k` with `k ≥ 1`.
    pub fn homogeneous_order(&self) -> Option<u64> {
        let first = *self.orders.first()?;
        self.orders.iter().all(|&o| o == first).then_some(first)
    }

    pub fn contains(&self, g: &GroupElem) -> bool {
        g.residues.len() == self.orders.len()
            && g.residues.iter().zip(&self.orders).all(|(r, o)| r < o)
    }

    fn check(&self, g: &GroupElem) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "{g} is not an element of {}",
                self.descriptor()
            )))
        }
    }

    pub fn zero(&self) -> GroupElem {
        GroupElem {
            residues: vec![0; self.orders.len()],
        }
    }

    pub fn generator(&self, j: usize) -> GroupElem {
        let mut g = self.zero();
        if self.orders[j] > 1 {
            g.residues[j] = 1;
        }
        g
    }

    /// Reduces an arbitrary integer vector into the group.
    pub fn elem(&self, coords: &[i64]) -> Result<GroupElem> {
        if coords.len() != self.orders.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coordinates, got {}",
                self.orders.len(),
                coords.len()
            )));
        }
        Ok(GroupElem {
            residues: coords
                .iter()
                .zip(&self.orders)
                .map(|(&c, &o)| c.rem_euclid(o as i64) as u64)
                .collect(),
        })
    }

    pub fn add(&self, g: &GroupElem, h: &GroupElem) -> GroupElem {
        GroupElem {
            residues: g
                .residues
                .iter()
                .zip(&h.residues)
                .zip(&self.orders)
                .map(|((a, b), o)| (a + b) % o)
                .collect(),
        }
    }

    pub fn neg(&self, g: &GroupElem) -> GroupElem {
        GroupElem {
            residues: g
                .residues
                .iter()
                .zip(&self.orders)
                .map(|(a, o)| (o - a) % o)
                .collect(),
        }
    }

    pub fn sub(&self, g: &GroupElem, h: &GroupElem) -> GroupElem {
        self.add(g, &self.neg(h))
    }

    pub fn scale(&self, k: i64, g: &GroupElem) -> GroupElem {
        GroupElem {
            residues: g
                .residues
                .iter()
                .zip(&self.orders)
                .map(|(&a, &o)| ((a as i128 * k as i128).rem_euclid(o as i128)) as u64)
                .collect(),
        }
    }

    /// Mixed-radix index with the first coordinate varying fastest.
    pub fn index_of(&self, g: &GroupElem) -> usize {
        let mut idx = 0usize;
        let mut stride = 1usize;
        for (r, o) in g.residues.iter().zip(&self.orders) {
            idx += *r as usize * stride;
            stride *= *o as usize;
        }
        idx
    }

    pub fn element_at(&self, mut idx: usize) -> GroupElem {
        let residues = self
            .orders
            .iter()
            .map(|&o| {
                let r = idx % o as usize;
                idx /= o as usize;
                r as u64
            })
            .collect();
        GroupElem { residues }
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElem> + '_ {
        (0..self.size() as usize).map(|i| self.element_at(i))
    }

    /// Least `k ≥ 1` with `k·g = 0`.
    pub fn element_order(&self, g: &GroupElem) -> u64 {
        g.residues
            .iter()
            .zip(&self.orders)
            .fold(1, |acc, (&r, &o)| acc.lcm(&(o / r.gcd(&o))))
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl TryFrom<String> for FinAbGroup {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        FinAbGroup::parse(&s)
    }
}

impl From<FinAbGroup> for String {
    fn from(g: FinAbGroup) -> String {
        g.descriptor()
    }
}

/// Element order of `g` as a standalone function.
pub fn element_order(t: &FinAbGroup, g: &GroupElem) -> u64 {
    t.element_order(g)
}

// ---------------------------------------------------------------------------
// Endomorphisms

/// An endomorphism of a [`FinAbGroup`] as an integer matrix acting on
/// generator coordinates: entry `(i, j)` is the coefficient of generator `i`
/// in the image of generator `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupMap {
    orders: Vec<u64>,
    entries: Vec<u64>,
}

impl GroupMap {
    /// Builds the map sending generator `j` to `images[j]`.
    pub fn from_images(t: &FinAbGroup, images: &[GroupElem]) -> Result<Self> {
        let k = t.rank();
        if images.len() != k {
            return Err(Error::MalformedMatrix(format!(
                "expected {k} generator images, got {}",
                images.len()
            )));
        }
        let mut entries = vec![0; k * k];
        for (j, img) in images.iter().enumerate() {
            t.check(img)
                .map_err(|_| Error::MalformedMatrix(format!("bad image {img} of generator {j}")))?;
            for i in 0..k {
                entries[i * k + j] = img.residues[i];
            }
        }
        let map = GroupMap {
            orders: t.orders.clone(),
            entries,
        };
        map.ensure_well_defined()?;
        Ok(map)
    }

    /// Row-major matrix whose columns are the generator images.
    pub fn from_row_major(t: &FinAbGroup, entries: &[i64]) -> Result<Self> {
        let k = t.rank();
        if entries.len() != k * k {
            return Err(Error::MalformedMatrix(format!(
                "expected {} entries for a {k}x{k} matrix, got {}",
                k * k,
                entries.len()
            )));
        }
        let reduced = entries
            .iter()
            .enumerate()
            .map(|(idx, &e)| e.rem_euclid(t.orders[idx / k] as i64) as u64)
            .collect();
        let map = GroupMap {
            orders: t.orders.clone(),
            entries: reduced,
        };
        map.ensure_well_defined()?;
        Ok(map)
    }

    /// Row-major list whose `j`-th row is the image of generator `j`.
    pub fn from_image_rows(t: &FinAbGroup, rows: &[i64]) -> Result<Self> {
        let k = t.rank();
        if rows.len() != k * k {
            return Err(Error::MalformedMatrix(format!(
                "expected {} entries, got {}",
                k * k,
                rows.len()
            )));
        }
        let images = rows
            .chunks(k)
            .map(|r| t.elem(r))
            .collect::<Result<Vec<_>>>()?;
        Self::from_images(t, &images)
    }

    pub fn identity(t: &FinAbGroup) -> Self {
        let images: Vec<_> = (0..t.rank()).map(|j| t.generator(j)).collect();
        Self::from_images(t, &images).expect("identity is well defined")
    }

    pub fn negation(t: &FinAbGroup) -> Self {
        let images: Vec<_> = (0..t.rank()).map(|j| t.neg(&t.generator(j))).collect();
        Self::from_images(t, &images).expect("negation is well defined")
    }

    fn ensure_well_defined(&self) -> Result<()> {
        if self.is_well_defined() {
            Ok(())
        } else {
            Err(Error::MalformedMatrix(
                "a generator image has order not dividing the generator's order".into(),
            ))
        }
    }

    /// Each image has order dividing its generator's order.
    pub fn is_well_defined(&self) -> bool {
        let k = self.dim();
        (0..k).all(|j| (0..k).all(|i| (self.orders[j] * self.entry(i, j)).is_multiple_of(self.orders[i])))
    }

    pub fn dim(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.dim() + j]
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn image_of_generator(&self, j: usize) -> GroupElem {
        GroupElem {
            residues: (0..self.dim()).map(|i| self.entry(i, j)).collect(),
        }
    }

    pub fn apply(&self, g: &GroupElem) -> GroupElem {
        let k = self.dim();
        let residues = (0..k)
            .map(|i| {
                let o = self.orders[i] as u128;
                let mut acc = 0u128;
                for j in 0..k {
                    acc += self.entry(i, j) as u128 * g.residues[j] as u128;
                }
                (acc % o) as u64
            })
            .collect();
        GroupElem { residues }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GroupMap) -> GroupMap {
        assert_eq!(self.orders, other.orders, "composing maps on different groups");
        let k = self.dim();
        let mut entries = vec![0; k * k];
        for j in 0..k {
            let img = self.apply(&other.image_of_generator(j));
            for i in 0..k {
                entries[i * k + j] = img.residues[i];
            }
        }
        GroupMap {
            orders: self.orders.clone(),
            entries,
        }
    }

    pub fn is_identity(&self) -> bool {
        let k = self.dim();
        (0..k).all(|i| {
            (0..k).all(|j| {
                let expect = u64::from(i == j) % self.orders[i];
                self.entry(i, j) == expect
            })
        })
    }

    /// Integer determinant of the stored representatives.
    pub fn det_integer(&self) -> i128 {
        let k = self.dim();
        if k == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> = (0..k)
            .map(|i| (0..k).map(|j| self.entry(i, j) as i128).collect())
            .collect();
        // Bareiss fraction-free elimination
        let mut sign = 1i128;
        let mut prev = 1i128;
        for c in 0..k {
            if a[c][c] == 0 {
                match (c + 1..k).find(|&r| a[r][c] != 0) {
                    Some(r) => {
                        a.swap(c, r);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for r in c + 1..k {
                for j in c + 1..k {
                    a[r][j] = (a[r][j] * a[c][c] - a[r][c] * a[c][j]) / prev;
                }
                a[r][c] = 0;
            }
            prev = a[c][c];
        }
        sign * a[k - 1][k - 1]
    }

    /// Determinant reduced modulo `n`.
    pub fn det_mod(&self, n: u64) -> u64 {
        self.det_integer().rem_euclid(n as i128) as u64
    }

    pub fn trace_mod(&self, n: u64) -> u64 {
        ((0..self.dim()).map(|i| self.entry(i, i) as u128).sum::<u128>() % n as u128) as u64
    }

    /// Rows of the matrix as signed integers.
    pub fn rows(&self) -> Vec<Vec<i64>> {
        let k = self.dim();
        (0..k)
            .map(|i| (0..k).map(|j| self.entry(i, j) as i64).collect())
            .collect()
    }
}

impl Serialize for GroupMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl fmt::Display for GroupMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "[{}]", rows.join(";"))
    }
}

fn check_dims(t: &FinAbGroup, a: &GroupMap) -> Result<()> {
    if a.orders != t.orders {
        return Err(Error::MalformedMatrix(format!(
            "map of dimension {} does not act on {}",
            a.dim(),
            t.descriptor()
        )));
    }
    Ok(())
}

/// Decides whether `a` is a bijective endomorphism of `t`.
pub fn is_automorphism(t: &FinAbGroup, a: &GroupMap) -> Result<bool> {
    check_dims(t, a)?;
    if !a.is_well_defined() {
        return Ok(false);
    }
    if let Some(n) = t.homogeneous_order() {
        return Ok(a.det_mod(n).gcd(&n) == 1 || n == 1);
    }
    let size = t.size();
    if size > BRUTE_FORCE_LIMIT {
        return Err(Error::GroupTooLarge {
            size,
            cap: BRUTE_FORCE_LIMIT,
        });
    }
    Ok(is_injective_brute(t, a))
}

fn is_injective_brute(t: &FinAbGroup, a: &GroupMap) -> bool {
    let mut seen = HashSet::with_capacity(t.size() as usize);
    t.elements().all(|g| seen.insert(t.index_of(&a.apply(&g))))
}

/// Constraint on `(det mod n, trace mod n)` for `T = ℤ_n^k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DetTraceFilter {
    pub det: Option<i64>,
    pub trace: Option<i64>,
}

impl DetTraceFilter {
    pub fn det(d: i64) -> Self {
        DetTraceFilter {
            det: Some(d),
            trace: None,
        }
    }

    fn accepts(&self, a: &GroupMap, n: u64) -> bool {
        let want = |v: i64| v.rem_euclid(n as i64) as u64;
        self.det.is_none_or(|d| a.det_mod(n) == want(d))
            && self.trace.is_none_or(|tr| a.trace_mod(n) == want(tr))
    }
}

/// All automorphisms of `t` (optionally filtered), ordered
/// lexicographically by row-major entries.
pub fn enumerate_automorphisms(
    t: &FinAbGroup,
    filter: Option<DetTraceFilter>,
    cap: u64,
) -> Result<Vec<GroupMap>> {
    let size = t.size();
    if size > cap {
        return Err(Error::GroupTooLarge { size, cap });
    }
    let hom = t.homogeneous_order();
    if filter.is_some() && hom.is_none() {
        return Err(Error::ShapeMismatch(
            "determinant filters need a homogeneous group".into(),
        ));
    }
    let k = t.rank();
    // candidate images per generator: elements killed by that generator's order
    let cands: Vec<Vec<GroupElem>> = (0..k)
        .map(|j| {
            t.elements()
                .filter(|h| t.scale(t.orders[j] as i64, h).is_zero())
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; k];
    'outer: loop {
        let images: Vec<GroupElem> = (0..k).map(|j| cands[j][choice[j]].clone()).collect();
        let a = GroupMap::from_images(t, &images)?;
        let ok = match hom {
            Some(n) => {
                let unit = n == 1 || a.det_mod(n).gcd(&n) == 1;
                unit && filter.is_none_or(|f| f.accepts(&a, n))
            }
            None => is_injective_brute(t, &a),
        };
        if ok {
            out.push(a);
        }
        for j in 0..k {
            choice[j] += 1;
            if choice[j] < cands[j].len() {
                continue 'outer;
            }
            choice[j] = 0;
        }
        break;
    }
    out.sort();
    Ok(out)
}

// ---------------------------------------------------------------------------
// Characters

/// A character of `T`, stored by its values on generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character {
    values: Vec<RootOfUnity>,
}

impl Character {
    pub fn new(t: &FinAbGroup, values: Vec<RootOfUnity>) -> Result<Self> {
        if values.len() != t.rank() {
            return Err(Error::ShapeMismatch("one value per generator expected".into()));
        }
        for (v, &o) in values.iter().zip(&t.orders) {
            if o % v.multiplicative_order() != 0 {
                return Err(Error::InvalidArgument(format!(
                    "character value {v} has order not dividing {o}"
                )));
            }
        }
        Ok(Character { values })
    }

    pub fn values(&self) -> &[RootOfUnity] {
        &self.values
    }

    /// Value on generator `j` in `μ_ambient`.
    pub fn on_generator(&self, j: usize, ambient: u64) -> Result<RootOfUnity> {
        self.values[j].lift(ambient)
    }

    /// `χ(g)` as an element of `μ_ambient`.
    pub fn eval(&self, g: &GroupElem, ambient: u64) -> Result<RootOfUnity> {
        let mut acc = RootOfUnity::one(ambient);
        for (v, &r) in self.values.iter().zip(&g.residues) {
            acc = acc * v.lift(ambient)?.pow(r as i64);
        }
        Ok(acc)
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|v| v.is_one())
    }
}

/// All `|T|` characters; the value on generator `j` is `ζ_{ℓ_j}^{k_j}`,
/// ordered lexicographically in `(k_1, …, k_r)`.
pub fn characters(t: &FinAbGroup) -> Vec<Character> {
    let size = t.size() as usize;
    let k = t.rank();
    (0..size)
        .map(|mut idx| {
            let mut exps = vec![0u64; k];
            for j in (0..k).rev() {
                exps[j] = idx as u64 % t.orders[j];
                idx /= t.orders[j] as usize;
            }
            Character {
                values: exps
                    .iter()
                    .zip(&t.orders)
                    .map(|(&e, &o)| RootOfUnity::new(o, e as i64))
                    .collect(),
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Prime components

/// Prime factorization `[(p, e)]` in increasing `p`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn p_part(n: u64, p: u64) -> u64 {
    let mut q = 1;
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
        q *= p;
    }
    q
}

/// The `p`-primary part of `T` together with the restriction of a map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeComponent {
    pub prime: u64,
    /// Generators of `T` whose order is divisible by `prime`.
    pub generators: Vec<usize>,
    pub group: FinAbGroup,
    pub map: GroupMap,
}

impl PrimeComponent {
    /// Image of `g ∈ T` in this component (coordinate-wise reduction).
    pub fn project(&self, g: &GroupElem) -> GroupElem {
        GroupElem {
            residues: self
                .generators
                .iter()
                .zip(&self.group.orders)
                .map(|(&j, &q)| g.residues[j] % q)
                .collect(),
        }
    }
}

/// Primes dividing `|T|`, increasing.
pub fn primes_of(t: &FinAbGroup) -> Vec<u64> {
    let mut ps: Vec<u64> = factorize(t.exponent()).into_iter().map(|(p, _)| p).collect();
    ps.sort_unstable();
    ps
}

/// CRT splitting of `(T, τ)` into primary components.
pub fn split_by_primes(t: &FinAbGroup, tau: &GroupMap) -> Result<Vec<PrimeComponent>> {
    if !is_automorphism(t, tau)? {
        return Err(Error::NotAutomorphism);
    }
    Ok(primes_of(t)
        .into_iter()
        .map(|p| restrict_to_prime(t, tau, p))
        .collect())
}

fn restrict_to_prime(t: &FinAbGroup, tau: &GroupMap, p: u64) -> PrimeComponent {
    let gens: Vec<usize> = (0..t.rank()).filter(|&j| t.orders[j].is_multiple_of(p)).collect();
    let orders: Vec<u64> = gens.iter().map(|&j| p_part(t.orders[j], p)).collect();
    let k = gens.len();
    let mut entries = vec![0u64; k * k];
    for (a, &i) in gens.iter().enumerate() {
        for (b, &j) in gens.iter().enumerate() {
            entries[a * k + b] = tau.entry(i, j) % orders[a];
        }
    }
    PrimeComponent {
        prime: p,
        generators: gens,
        group: FinAbGroup {
            orders: orders.clone(),
        },
        map: GroupMap { orders, entries },
    }
}

/// Inverse of [`split_by_primes`]: rebuilds the map on `T` by CRT.
pub fn reassemble(t: &FinAbGroup, comps: &[PrimeComponent]) -> Result<GroupMap> {
    let k = t.rank();
    let mut entries = vec![0u64; k * k];
    for i in 0..k {
        for j in 0..k {
            let mut residues = Vec::new();
            for c in comps {
                let Some(a) = c.generators.iter().position(|&g| g == i) else {
                    continue;
                };
                let q = c.group.orders[a];
                let v = match c.generators.iter().position(|&g| g == j) {
                    Some(b) => c.map.entry(a, b),
                    None => 0,
                };
                residues.push((v, q));
            }
            entries[i * k + j] = crt(&residues).0 % t.orders[i];
        }
    }
    let map = GroupMap {
        orders: t.orders.clone(),
        entries,
    };
    map.ensure_well_defined()?;
    Ok(map)
}

/// Solves `x ≡ r_i (mod m_i)` for pairwise coprime moduli; returns `(x, Π m_i)`.
pub fn crt(residues: &[(u64, u64)]) -> (u64, u64) {
    let mut x: u128 = 0;
    let mut m: u128 = 1;
    for &(r, q) in residues {
        let q = q as u128;
        // find t with x + m t ≡ r (mod q)
        let inv = crate::cyclotomic::mod_inverse((m % q) as u64, q as u64)
            .expect("moduli must be coprime") as u128;
        let diff = ((r as u128 % q) + q - x % q) % q;
        let t = diff * inv % q;
        x += m * t;
        m *= q;
    }
    (x as u64, m as u64)
}

/// Idempotent `e ∈ ℤ_n` with `e ≡ 1 (mod q)` and `e ≡ 0 (mod n/q)`.
pub fn crt_idempotent(n: u64, q: u64) -> u64 {
    crt(&[(1, q), (0, n / q)]).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_roundtrip() {
        for d in ["Z4^2", "Z2^2xZ3^2", "Z4^2xZ2^2", "Z6", "1"] {
            assert_eq!(FinAbGroup::parse(d).unwrap().descriptor(), d);
        }
        assert_eq!(FinAbGroup::parse("Z2xZ2").unwrap().descriptor(), "Z2^2");
        assert!(FinAbGroup::parse("Q4").is_err());
        assert!(FinAbGroup::parse("Z0").is_err());
    }

    #[test]
    fn element_orders() {
        let t = FinAbGroup::homogeneous(4, 2);
        assert_eq!(t.element_order(&t.elem(&[1, 0]).unwrap()), 4);
        assert_eq!(t.element_order(&t.elem(&[2, 2]).unwrap()), 2);
        assert_eq!(t.element_order(&t.zero()), 1);
    }

    #[test]
    fn index_roundtrip() {
        let t = FinAbGroup::parse("Z2xZ3xZ4").unwrap();
        for i in 0..t.size() as usize {
            assert_eq!(t.index_of(&t.element_at(i)), i);
        }
        assert_eq!(t.element_at(1).residues(), &[1, 0, 0]);
        assert_eq!(t.element_at(2).residues(), &[0, 1, 0]);
    }

    #[test]
    fn automorphism_tests() {
        let t4 = FinAbGroup::homogeneous(4, 2);
        assert!(is_automorphism(&t4, &GroupMap::identity(&t4)).unwrap());
        let shear = GroupMap::from_row_major(&t4, &[1, 1, 0, 1]).unwrap();
        assert!(is_automorphism(&t4, &shear).unwrap());
        let doubling = GroupMap::from_row_major(&t4, &[2, 0, 0, 1]).unwrap();
        assert!(!is_automorphism(&t4, &doubling).unwrap());
        let t2 = FinAbGroup::homogeneous(2, 2);
        assert!(is_automorphism(&t4, &GroupMap::identity(&t2)).is_err());
    }

    #[test]
    fn automorphism_counts() {
        let t2 = FinAbGroup::homogeneous(2, 2);
        let t3 = FinAbGroup::homogeneous(3, 2);
        assert_eq!(enumerate_automorphisms(&t2, None, DEFAULT_ENUM_CAP).unwrap().len(), 6);
        assert_eq!(enumerate_automorphisms(&t3, None, DEFAULT_ENUM_CAP).unwrap().len(), 48);
        let f = DetTraceFilter {
            det: Some(-1),
            trace: Some(0),
        };
        assert_eq!(enumerate_automorphisms(&t3, Some(f), DEFAULT_ENUM_CAP).unwrap().len(), 12);
        let big = FinAbGroup::homogeneous(100, 2);
        assert!(matches!(
            enumerate_automorphisms(&big, None, DEFAULT_ENUM_CAP),
            Err(Error::GroupTooLarge { .. })
        ));
    }

    #[test]
    fn mixed_group_automorphisms_by_brute_force() {
        // Aut(Z2 x Z4) has order 8
        let t = FinAbGroup::parse("Z2xZ4").unwrap();
        let auts = enumerate_automorphisms(&t, None, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(auts.len(), 8);
        let mut sorted = auts.clone();
        sorted.sort();
        assert_eq!(auts, sorted);
    }

    #[test]
    fn ill_defined_maps_are_rejected() {
        // Z2 x Z4: sending the order-2 generator to (0,1) is not a homomorphism
        let t = FinAbGroup::parse("Z2xZ4").unwrap();
        assert!(GroupMap::from_row_major(&t, &[1, 0, 1, 1]).is_err());
    }

    #[test]
    fn character_values() {
        let t = FinAbGroup::homogeneous(2, 2);
        let chars = characters(&t);
        assert_eq!(chars.len(), 4);
        assert!(chars[0].is_trivial());
        let chi = Character::new(&t, vec![RootOfUnity::new(2, 1), RootOfUnity::one(2)]).unwrap();
        let v = chi.eval(&t.elem(&[1, 1]).unwrap(), 2).unwrap();
        assert_eq!(v, RootOfUnity::minus_one(2));
    }

    #[test]
    fn split_z6() {
        let t = FinAbGroup::homogeneous(6, 2);
        let tau = GroupMap::from_row_major(&t, &[1, 2, 3, -1]).unwrap();
        let comps = split_by_primes(&t, &tau).unwrap();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].group.descriptor(), "Z2^2");
        assert_eq!(comps[1].group.descriptor(), "Z3^2");
        assert_eq!(comps[0].map.rows(), vec![vec![1, 0], vec![1, 1]]);
        assert_eq!(comps[1].map.rows(), vec![vec![1, 2], vec![0, 2]]);
        assert_eq!(reassemble(&t, &comps).unwrap(), tau);
    }

    #[test]
    fn split_prime_power_is_single_component() {
        let t = FinAbGroup::homogeneous(8, 2);
        let tau = GroupMap::from_row_major(&t, &[1, 4, 0, 7]).unwrap();
        let comps = split_by_primes(&t, &tau).unwrap();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].group, t);
        assert_eq!(comps[0].map, tau);
    }

    #[test]
    fn crt_idempotents() {
        assert_eq!(crt_idempotent(6, 2), 3);
        assert_eq!(crt_idempotent(6, 3), 4);
        assert_eq!(crt_idempotent(12, 4), 9);
    }
}
