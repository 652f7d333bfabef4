//! Factor sets on symplectically shaped groups, bicharacters, coboundaries
//! and the product of the twisted group algebra.

use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::abgroup::{factorize, FinAbGroup, GroupElem};
use crate::cyclotomic::RootOfUnity;
use crate::error::{Error, Result};

/// One `(a_k, b_k)` pair: both generators have order `order`, and
/// `ε_k = ζ_order^{epsilon_exp}` with `epsilon_exp` a unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PairSpec {
    pub order: u64,
    pub epsilon_exp: u64,
}

impl PairSpec {
    pub fn new(order: u64) -> Self {
        PairSpec {
            order,
            epsilon_exp: 1 % order.max(1),
        }
    }
}

/// `T = ∏ (ℤ_{ℓ_k})^2` with generators ordered `a_1, b_1, a_2, b_2, …`,
/// together with the ambient order `M` in which all scalars live.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymplecticShape {
    pairs: Vec<PairSpec>,
    ambient: u64,
    group: FinAbGroup,
}

/// `2·L²` for the exponent `L`; large enough for every scalar in the
/// classification searches.
pub fn default_ambient(exponent: u64) -> u64 {
    2 * exponent * exponent
}

impl SymplecticShape {
    pub fn new(pairs: Vec<PairSpec>, ambient: u64) -> Result<Self> {
        for p in &pairs {
            if p.order == 0 {
                return Err(Error::InvalidArgument("pair of order 0".into()));
            }
            if ambient == 0 || !ambient.is_multiple_of(p.order) {
                return Err(Error::IncompatibleOrders {
                    order: p.order,
                    ambient,
                });
            }
            if p.epsilon_exp.gcd(&p.order) != 1 && p.order > 1 {
                return Err(Error::InvalidArgument(format!(
                    "epsilon exponent {} is not a unit modulo {}",
                    p.epsilon_exp, p.order
                )));
            }
        }
        let orders = pairs.iter().flat_map(|p| [p.order, p.order]).collect();
        Ok(SymplecticShape {
            pairs,
            ambient,
            group: FinAbGroup::new(orders)?,
        })
    }

    /// Uses the default ambient order.
    pub fn with_pairs(pairs: Vec<PairSpec>) -> Result<Self> {
        let l = pairs.iter().fold(1u64, |acc, p| acc.lcm(&p.order));
        Self::new(pairs, default_ambient(l))
    }

    /// `ℤ_n^2` with `ε = ζ_n`, ambient `2n²`.
    pub fn pauli(n: u64) -> Self {
        Self::with_pairs(vec![PairSpec::new(n)]).expect("valid Pauli shape")
    }

    /// Reads the pairing off a group whose orders come in equal adjacent pairs.
    pub fn from_group(t: &FinAbGroup) -> Result<Self> {
        let o = t.orders();
        if !o.len().is_multiple_of(2) || o.chunks(2).any(|c| c[0] != c[1]) {
            return Err(Error::ShapeMismatch(format!(
                "{} is not of the form ∏ Z_l^2",
                t.descriptor()
            )));
        }
        Self::with_pairs(o.chunks(2).map(|c| PairSpec::new(c[0])).collect())
    }

    /// The trivial shape (no pairs, `T = 0`).
    pub fn trivial() -> Self {
        Self::new(Vec::new(), 2).expect("trivial shape")
    }

    pub fn with_ambient(&self, ambient: u64) -> Result<Self> {
        Self::new(self.pairs.clone(), ambient)
    }

    pub fn pairs(&self) -> &[PairSpec] {
        &self.pairs
    }

    pub fn ambient(&self) -> u64 {
        self.ambient
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    /// `ε_k` in `μ_M`.
    pub fn epsilon(&self, k: usize) -> RootOfUnity {
        let p = self.pairs[k];
        RootOfUnity::new(
            self.ambient,
            (p.epsilon_exp * (self.ambient / p.order)) as i64,
        )
    }

    /// Order of generator `c` (`a_k` is `2k`, `b_k` is `2k+1`).
    pub fn generator_order(&self, c: usize) -> u64 {
        self.pairs[c / 2].order
    }

    /// `Some((p, N))` when every order is a power of the single prime `p`
    /// and `p^N` is the largest of them.
    pub fn p_group(&self) -> Option<(u64, u32)> {
        let mut prime = None;
        let mut top = 0;
        for pair in &self.pairs {
            if pair.order == 1 {
                continue;
            }
            let f = factorize(pair.order);
            if f.len() != 1 {
                return None;
            }
            let (p, e) = f[0];
            match prime {
                None => prime = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
            top = top.max(e);
        }
        prime.map(|p| (p, top))
    }

    /// The `p`-primary part as a shape of its own: pairs whose order is
    /// divisible by `p`, with orders cut down to their `p`-part and `ε_k`
    /// replaced by its `p`-component `ζ_{ℓ_k}^{s_k e}` (`e` the CRT idempotent).
    /// Returns the shape and the indices of the pairs it keeps.
    pub fn prime_component(&self, p: u64) -> Result<(SymplecticShape, Vec<usize>)> {
        let mut pairs = Vec::new();
        let mut kept = Vec::new();
        let mut top = 1;
        for (k, pair) in self.pairs.iter().enumerate() {
            if pair.order % p != 0 {
                continue;
            }
            let mut q = 1;
            while pair.order % (q * p) == 0 {
                q *= p;
            }
            let e = crate::abgroup::crt_idempotent(pair.order, q);
            let x = (e / (pair.order / q)) % q;
            pairs.push(PairSpec {
                order: q,
                epsilon_exp: (pair.epsilon_exp % q) * x % q,
            });
            kept.push(k);
            top = top.max(q);
        }
        Ok((SymplecticShape::new(pairs, default_ambient(top))?, kept))
    }

    /// Exponent of `σ(u, v)` in `μ_M`, without membership checks.
    pub fn sigma_exp(&self, u: &[u64], v: &[u64]) -> u64 {
        let m = self.ambient as u128;
        let mut e: u128 = 0;
        for (k, p) in self.pairs.iter().enumerate() {
            let j = u[2 * k + 1] as u128;
            let i2 = v[2 * k] as u128;
            let w = (p.epsilon_exp * (self.ambient / p.order)) as u128;
            e += w * ((j * i2) % p.order as u128);
        }
        ((m - e % m) % m) as u64
    }

    /// `σ(u, v)` without membership checks.
    pub fn sigma(&self, u: &GroupElem, v: &GroupElem) -> RootOfUnity {
        RootOfUnity::new(self.ambient, self.sigma_exp(u.residues(), v.residues()) as i64)
    }
}

/// The standard cocycle `σ(u,v) = ∏ ε_k^{-j_k i'_k}` where `j_k` is the
/// `b_k`-coordinate of `u` and `i'_k` the `a_k`-coordinate of `v`.
pub fn standard_sigma(shape: &SymplecticShape, u: &GroupElem, v: &GroupElem) -> Result<RootOfUnity> {
    for g in [u, v] {
        if !shape.group.contains(g) {
            return Err(Error::ShapeMismatch(format!(
                "{g} is not an element of {}",
                shape.group
            )));
        }
    }
    Ok(shape.sigma(u, v))
}

/// A 2-cocycle `T × T → μ_M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorSet {
    Standard(SymplecticShape),
    Table {
        group: FinAbGroup,
        ambient: u64,
        /// Row-major by element index.
        values: Vec<RootOfUnity>,
    },
}

impl FactorSet {
    pub fn group(&self) -> &FinAbGroup {
        match self {
            FactorSet::Standard(s) => s.group(),
            FactorSet::Table { group, .. } => group,
        }
    }

    pub fn ambient(&self) -> u64 {
        match self {
            FactorSet::Standard(s) => s.ambient(),
            FactorSet::Table { ambient, .. } => *ambient,
        }
    }

    pub fn eval(&self, u: &GroupElem, v: &GroupElem) -> RootOfUnity {
        match self {
            FactorSet::Standard(s) => s.sigma(u, v),
            FactorSet::Table { group, values, .. } => {
                let n = group.size() as usize;
                values[group.index_of(u) * n + group.index_of(v)]
            }
        }
    }

    /// Explicit table form.
    pub fn to_table(&self) -> FactorSet {
        let group = self.group().clone();
        let elems: Vec<GroupElem> = group.elements().collect();
        let values = elems
            .iter()
            .flat_map(|u| elems.iter().map(move |v| (u, v)))
            .map(|(u, v)| self.eval(u, v))
            .collect();
        FactorSet::Table {
            group,
            ambient: self.ambient(),
            values,
        }
    }

    /// Multiplies the table entry at `(u, v)` by `factor`.
    pub fn perturbed(&self, u: &GroupElem, v: &GroupElem, factor: RootOfUnity) -> FactorSet {
        let FactorSet::Table {
            group,
            ambient,
            mut values,
        } = self.to_table()
        else {
            unreachable!()
        };
        let n = group.size() as usize;
        let idx = group.index_of(u) * n + group.index_of(v);
        values[idx] = values[idx] * factor;
        FactorSet::Table {
            group,
            ambient,
            values,
        }
    }
}

impl Serialize for FactorSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Doc<'a> {
            group: String,
            entries: &'a [RootOfUnity],
        }
        match self.to_table() {
            FactorSet::Table { group, values, .. } => Doc {
                group: group.descriptor(),
                entries: &values,
            }
            .serialize(s),
            FactorSet::Standard(_) => unreachable!(),
        }
    }
}

/// `β_σ(u, v) = σ(u, v) / σ(v, u)`.
pub fn bicharacter_beta(sigma: &FactorSet, u: &GroupElem, v: &GroupElem) -> RootOfUnity {
    sigma.eval(u, v) / sigma.eval(v, u)
}

/// Exhaustive check of `σ(u,v)σ(u+v,w) = σ(u,v+w)σ(v,w)`.
pub fn is_cocycle(sigma: &FactorSet) -> bool {
    let t = sigma.group();
    let elems: Vec<GroupElem> = t.elements().collect();
    for u in &elems {
        for v in &elems {
            let uv = t.add(u, v);
            let s_uv = sigma.eval(u, v);
            for w in &elems {
                let lhs = s_uv * sigma.eval(&uv, w);
                let rhs = sigma.eval(u, &t.add(v, w)) * sigma.eval(v, w);
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

/// `δλ(u, v) = λ(u)λ(v)/λ(u+v)`; `lambda` is indexed by element index.
pub fn coboundary(t: &FinAbGroup, lambda: &[RootOfUnity]) -> Result<FactorSet> {
    let n = t.size() as usize;
    if lambda.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "expected {n} values, got {}",
            lambda.len()
        )));
    }
    let ambient = lambda.first().map_or(1, |r| r.order());
    if lambda.iter().any(|r| r.order() != ambient) {
        return Err(Error::OrderMismatch {
            left: ambient,
            right: lambda.iter().find(|r| r.order() != ambient).unwrap().order(),
        });
    }
    let elems: Vec<GroupElem> = t.elements().collect();
    let mut values = Vec::with_capacity(n * n);
    for u in &elems {
        for v in &elems {
            let w = t.add(u, v);
            values.push(lambda[t.index_of(u)] * lambda[t.index_of(v)] / lambda[t.index_of(&w)]);
        }
    }
    Ok(FactorSet::Table {
        group: t.clone(),
        ambient,
        values,
    })
}

/// `(c₁X_u)(c₂X_v) = c₁c₂σ(u,v) X_{u+v}`.
pub fn twisted_product(
    sigma: &FactorSet,
    a: (&GroupElem, RootOfUnity),
    b: (&GroupElem, RootOfUnity),
) -> (GroupElem, RootOfUnity) {
    let t = sigma.group();
    (t.add(a.0, b.0), a.1 * b.1 * sigma.eval(a.0, b.0))
}

/// A map `T × T → μ_M`, stored as a table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bicharacter {
    group: FinAbGroup,
    values: Vec<RootOfUnity>,
}

impl Bicharacter {
    pub fn from_fn(t: &FinAbGroup, f: impl Fn(&GroupElem, &GroupElem) -> RootOfUnity) -> Self {
        let elems: Vec<GroupElem> = t.elements().collect();
        let values = elems
            .iter()
            .flat_map(|u| elems.iter().map(move |v| (u, v)))
            .map(|(u, v)| f(u, v))
            .collect();
        Bicharacter {
            group: t.clone(),
            values,
        }
    }

    /// `β_σ` of a factor set.
    pub fn of(sigma: &FactorSet) -> Self {
        Self::from_fn(sigma.group(), |u, v| bicharacter_beta(sigma, u, v))
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn eval(&self, u: &GroupElem, v: &GroupElem) -> RootOfUnity {
        let n = self.group.size() as usize;
        self.values[self.group.index_of(u) * n + self.group.index_of(v)]
    }

    /// Multiplicative in each argument.
    pub fn is_bimultiplicative(&self) -> bool {
        let t = &self.group;
        let elems: Vec<GroupElem> = t.elements().collect();
        elems.iter().all(|u| {
            elems.iter().all(|v| {
                elems.iter().all(|w| {
                    self.eval(&t.add(u, v), w) == self.eval(u, w) * self.eval(v, w)
                        && self.eval(u, &t.add(v, w)) == self.eval(u, v) * self.eval(u, w)
                })
            })
        })
    }

    /// `β(u, u) = 1` for all `u`.
    pub fn is_alternating(&self) -> bool {
        self.group.elements().all(|u| self.eval(&u, &u).is_one())
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|v| v.is_one())
    }
}

/// No `t ≠ 0` is orthogonal to all of `T`.
pub fn is_nondegenerate(beta: &Bicharacter) -> bool {
    let t = beta.group();
    let elems: Vec<GroupElem> = t.elements().collect();
    elems
        .iter()
        .filter(|x| !x.is_zero())
        .all(|x| elems.iter().any(|u| !beta.eval(u, x).is_one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_on_generators() {
        let s = SymplecticShape::pauli(3);
        let t = s.group().clone();
        let (a, b) = (t.generator(0), t.generator(1));
        assert!(standard_sigma(&s, &a, &b).unwrap().is_one());
        assert_eq!(standard_sigma(&s, &b, &a).unwrap(), s.epsilon(0).inv());
        for g in t.elements() {
            assert!(standard_sigma(&s, &g, &t.zero()).unwrap().is_one());
        }
        let other = FinAbGroup::homogeneous(2, 3);
        assert!(standard_sigma(&s, &other.generator(0), &a).is_err());
    }

    #[test]
    fn beta_values() {
        let s = SymplecticShape::pauli(4);
        let sigma = FactorSet::Standard(s.clone());
        let t = s.group();
        let (a, b) = (t.generator(0), t.generator(1));
        assert_eq!(bicharacter_beta(&sigma, &a, &b), s.epsilon(0));
        assert_eq!(bicharacter_beta(&sigma, &b, &a), s.epsilon(0).inv());
        assert!(Bicharacter::of(&sigma).is_alternating());
    }

    #[test]
    fn cocycle_and_perturbation() {
        let s = SymplecticShape::pauli(3);
        let sigma = FactorSet::Standard(s.clone());
        assert!(is_cocycle(&sigma));
        let t = s.group();
        let bad = sigma.perturbed(&t.generator(0), &t.generator(1), s.epsilon(0));
        assert!(!is_cocycle(&bad));
    }

    #[test]
    fn coboundaries() {
        let t = FinAbGroup::homogeneous(2, 2);
        let ones = vec![RootOfUnity::one(4); 4];
        let triv = coboundary(&t, &ones).unwrap();
        assert!(Bicharacter::of(&triv).is_trivial());
        let lam: Vec<_> = (0..4).map(|i| RootOfUnity::new(4, i)).collect();
        let d = coboundary(&t, &lam).unwrap();
        assert!(is_cocycle(&d));
        for u in t.elements() {
            assert_eq!(d.eval(&u, &t.zero()), lam[0]);
        }
        assert!(Bicharacter::of(&d).is_trivial());
    }

    #[test]
    fn twisted_products_on_generators() {
        let s = SymplecticShape::pauli(2);
        let sigma = FactorSet::Standard(s.clone());
        let t = s.group();
        let one = RootOfUnity::one(s.ambient());
        let (a, b) = (t.generator(0), t.generator(1));
        let ab = t.add(&a, &b);
        assert_eq!(twisted_product(&sigma, (&a, one), (&b, one)), (ab.clone(), one));
        assert_eq!(
            twisted_product(&sigma, (&b, one), (&a, one)),
            (ab, s.epsilon(0).inv())
        );
        assert_eq!(twisted_product(&sigma, (&t.zero(), one), (&a, one)), (a, one));
    }

    #[test]
    fn nondegeneracy() {
        for n in 2..=5 {
            let sigma = FactorSet::Standard(SymplecticShape::pauli(n));
            assert!(is_nondegenerate(&Bicharacter::of(&sigma)));
        }
        let t = FinAbGroup::homogeneous(2, 2);
        assert!(!is_nondegenerate(&Bicharacter::from_fn(&t, |_, _| RootOfUnity::one(2))));
        let t4 = FinAbGroup::homogeneous(2, 4);
        let half = SymplecticShape::pauli(2);
        let first_pair = Bicharacter::from_fn(&t4, |u, v| {
            let s = FactorSet::Standard(half.clone());
            let pu = half.group().elem(&[u.residues()[0] as i64, u.residues()[1] as i64]).unwrap();
            let pv = half.group().elem(&[v.residues()[0] as i64, v.residues()[1] as i64]).unwrap();
            bicharacter_beta(&s, &pu, &pv)
        });
        assert!(first_pair.is_bimultiplicative());
        assert!(!is_nondegenerate(&first_pair));
    }

    #[test]
    fn p_group_detection() {
        let s = SymplecticShape::with_pairs(vec![PairSpec::new(4), PairSpec::new(2)]).unwrap();
        assert_eq!(s.p_group(), Some((2, 2)));
        assert_eq!(SymplecticShape::pauli(6).p_group(), None);
        assert_eq!(SymplecticShape::pauli(9).p_group(), Some((3, 2)));
    }

    #[test]
    fn table_serialization() {
        let sigma = FactorSet::Standard(SymplecticShape::pauli(2));
        let v: serde_json::Value = serde_json::to_value(&sigma).unwrap();
        assert_eq!(v["group"], "Z2^2");
        assert_eq!(v["entries"].as_array().unwrap().len(), 16);
    }
}
