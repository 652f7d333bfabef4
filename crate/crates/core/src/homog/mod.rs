//! Homogeneous (anti-)automorphisms of a twisted group algebra `F^σ T`,
//! given by `X_c ↦ λ_c X_{τ(c)}` on generators, and the deciders for
//! validity, involutivity, isomorphism and equivalence.

pub mod classify;

use serde::{Deserialize, Serialize};

use crate::abgroup::{
    characters, enumerate_automorphisms, is_automorphism, split_by_primes, DetTraceFilter,
    FinAbGroup, GroupElem, GroupMap, DEFAULT_ENUM_CAP,
};
use crate::cocycle::SymplecticShape;
use crate::cyclotomic::RootOfUnity;
use crate::error::{Error, Result};

pub use classify::{
    classify_direct, classify_pauli, ClassificationReport, EquivalenceClass, InvolutionRep,
    OrbitReport,
};

/// Whether the map reverses products.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapMode {
    Anti,
    Auto,
}

/// `(τ, λ_c)` on the generators of a symplectically shaped `T`; the `λ_c`
/// live in `μ_M` for the shape's ambient order `M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HomMapData {
    pub tau: GroupMap,
    pub lambda: Vec<RootOfUnity>,
    pub mode: MapMode,
}

impl HomMapData {
    /// Checks dimensions and lifts each `λ_c` into `μ_M`.
    pub fn new(
        shape: &SymplecticShape,
        tau: GroupMap,
        lambda: Vec<RootOfUnity>,
        mode: MapMode,
    ) -> Result<Self> {
        if tau.orders() != shape.group().orders() {
            return Err(Error::ShapeMismatch(format!(
                "tau does not act on {}",
                shape.group()
            )));
        }
        if lambda.len() != shape.rank() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} lambda values, got {}",
                shape.rank(),
                lambda.len()
            )));
        }
        let lambda = lambda
            .into_iter()
            .map(|l| l.lift(shape.ambient()))
            .collect::<Result<_>>()?;
        Ok(HomMapData { tau, lambda, mode })
    }

    pub fn anti(shape: &SymplecticShape, tau: GroupMap, lambda: Vec<RootOfUnity>) -> Result<Self> {
        Self::new(shape, tau, lambda, MapMode::Anti)
    }

    /// The identity automorphism.
    pub fn identity(shape: &SymplecticShape) -> Self {
        HomMapData {
            tau: GroupMap::identity(shape.group()),
            lambda: vec![RootOfUnity::one(shape.ambient()); shape.rank()],
            mode: MapMode::Auto,
        }
    }
}

/// Witness for an isomorphism (`phi` absent, `chi` a character) or an
/// equivalence `X_g ↦ χ(g) X_{φ(g)}`; `chi` is indexed by element index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessData {
    pub phi: Option<GroupMap>,
    pub chi: Vec<RootOfUnity>,
}

// ---------------------------------------------------------------------------
// Congruence conditions

/// `P_{c,d} = Σ_k s_k p^{N-i_k} det[[μ_k^c, μ_k^d], [ν_k^c, ν_k^d]] mod p^N`
/// where `μ_k^c, ν_k^c` are the `a_k`, `b_k` coordinates of `τ(c)`, and
/// `ε_k = ζ_{p^{i_k}}^{s_k}`. Equals the exponent of `β(τc, τd)` in `μ_{p^N}`.
pub fn compute_p(shape: &SymplecticShape, tau: &GroupMap, c: usize, d: usize) -> Result<u64> {
    let (p, big_n) = shape.p_group().ok_or_else(|| {
        Error::ShapeMismatch(format!("{} is not a p-group shape", shape.group()))
    })?;
    if tau.orders() != shape.group().orders() {
        return Err(Error::ShapeMismatch("tau does not act on the shape".into()));
    }
    let modulus = p.pow(big_n) as i128;
    let mut acc: i128 = 0;
    for (k, pair) in shape.pairs().iter().enumerate() {
        if pair.order == 1 {
            continue;
        }
        let weight = pair.epsilon_exp as i128 * (modulus / pair.order as i128);
        let mu_c = tau.entry(2 * k, c) as i128;
        let nu_c = tau.entry(2 * k + 1, c) as i128;
        let mu_d = tau.entry(2 * k, d) as i128;
        let nu_d = tau.entry(2 * k + 1, d) as i128;
        acc += weight * (mu_c * nu_d - mu_d * nu_c);
    }
    Ok(acc.rem_euclid(modulus) as u64)
}

/// Required value of `P_{c,d}`: minus (anti) or plus (auto) the exponent of `β(c,d)`.
fn p_target(shape: &SymplecticShape, big_n_mod: u64, c: usize, d: usize, mode: MapMode) -> u64 {
    let beta = if c / 2 != d / 2 || c == d {
        0
    } else {
        let pair = shape.pairs()[c / 2];
        let w = pair.epsilon_exp * (big_n_mod / pair.order) % big_n_mod;
        if c.is_multiple_of(2) {
            w
        } else {
            (big_n_mod - w) % big_n_mod
        }
    };
    match mode {
        MapMode::Auto => beta,
        MapMode::Anti => (big_n_mod - beta) % big_n_mod,
    }
}

/// `β(τc, τd) = β(c, d)^{∓1}` on generators, decided by determinant (single
/// pair), by the `P_{c,d}` congruences (p-group shapes), or componentwise
/// after CRT splitting.
pub fn congruences_hold(shape: &SymplecticShape, tau: &GroupMap, mode: MapMode) -> bool {
    if shape.pairs().iter().all(|p| p.order == 1) {
        return true;
    }
    if shape.pairs().len() == 1 {
        let n = shape.pairs()[0].order;
        let want = match mode {
            MapMode::Anti => n - 1,
            MapMode::Auto => 1 % n,
        };
        return tau.det_mod(n) == want;
    }
    if let Some((p, big_n)) = shape.p_group() {
        let modulus = p.pow(big_n);
        let r = shape.rank();
        return (0..r).all(|c| {
            (0..r).all(|d| {
                compute_p(shape, tau, c, d).expect("p-group shape") == p_target(shape, modulus, c, d, mode)
            })
        });
    }
    let comps = match split_by_primes(shape.group(), tau) {
        Ok(c) => c,
        Err(_) => return false,
    };
    comps.iter().all(|comp| {
        let (sub, _) = shape.prime_component(comp.prime).expect("component shape");
        congruences_hold(&sub, &comp.map, mode)
    })
}

/// Reference check of the commutation relations straight from `β`.
pub fn commutation_holds_direct(shape: &SymplecticShape, tau: &GroupMap, mode: MapMode) -> bool {
    let t = shape.group();
    let beta = |u: &GroupElem, v: &GroupElem| shape.sigma(u, v) / shape.sigma(v, u);
    let r = t.rank();
    (0..r).all(|c| {
        (0..r).all(|d| {
            let (gc, gd) = (t.generator(c), t.generator(d));
            let lhs = beta(&tau.apply(&gc), &tau.apply(&gd));
            let b = beta(&gc, &gd);
            lhs == match mode {
                MapMode::Anti => b.inv(),
                MapMode::Auto => b,
            }
        })
    })
}

/// `σ(τc, τc)^{-ℓ_c(ℓ_c-1)/2}`: the value `λ_c^{ℓ_c}` must take.
pub fn power_target(shape: &SymplecticShape, tau: &GroupMap, c: usize) -> RootOfUnity {
    let h = tau.image_of_generator(c);
    let l = shape.generator_order(c) as i64;
    shape.sigma(&h, &h).pow(-(l * (l - 1) / 2))
}

/// Whether `m` defines a `τ`-homogeneous map of the mode's kind.
pub fn check_homogeneous_map(shape: &SymplecticShape, m: &HomMapData) -> bool {
    let t = shape.group();
    if m.tau.orders() != t.orders()
        || m.lambda.len() != t.rank()
        || m.lambda.iter().any(|l| l.order() != shape.ambient())
        || !m.tau.is_well_defined()
    {
        return false;
    }
    // Beyond the brute-force limit the congruences themselves force bijectivity.
    if let Ok(false) = is_automorphism(t, &m.tau) {
        return false;
    }
    let powers_ok = (0..t.rank()).all(|c| {
        m.lambda[c].pow(shape.generator_order(c) as i64) == power_target(shape, &m.tau, c)
    });
    powers_ok && congruences_hold(shape, &m.tau, m.mode)
}

/// `(λ_c X_h)^k = λ_c^k σ(h,h)^{k(k-1)/2} X_{kh}`.
fn generator_power(
    shape: &SymplecticShape,
    h: &GroupElem,
    lambda: RootOfUnity,
    k: u64,
) -> (GroupElem, RootOfUnity) {
    let k = k as i64;
    let coeff = lambda.pow(k) * shape.sigma(h, h).pow(k * (k - 1) / 2);
    (shape.group().scale(k, h), coeff)
}

/// The coefficient `λ_g` in `ψ(X_g) = λ_g X_{τ(g)}`, obtained by applying
/// `ψ` to the ordered product `X_g = X_{a_1}^{α_1} X_{b_1}^{β_1} ⋯`.
pub fn lambda_extend(shape: &SymplecticShape, m: &HomMapData, g: &GroupElem) -> RootOfUnity {
    let t = shape.group();
    let mut acc = (t.zero(), RootOfUnity::one(shape.ambient()));
    let mut step = |c: usize| {
        let k = g.residues()[c];
        if k == 0 {
            return;
        }
        let (h, coeff) = generator_power(shape, &m.tau.image_of_generator(c), m.lambda[c], k);
        let sigma = shape.sigma(&acc.0, &h);
        acc = (t.add(&acc.0, &h), acc.1 * coeff * sigma);
    };
    match m.mode {
        MapMode::Auto => (0..t.rank()).for_each(&mut step),
        MapMode::Anti => (0..t.rank()).rev().for_each(&mut step),
    }
    debug_assert_eq!(acc.0, m.tau.apply(g));
    acc.1
}

/// `λ_g` for every `g`, by element index.
pub fn lambda_table(shape: &SymplecticShape, m: &HomMapData) -> Vec<RootOfUnity> {
    shape
        .group()
        .elements()
        .map(|g| lambda_extend(shape, m, &g))
        .collect()
}

/// `τ² = id` and `λ_c λ_{τ(c)} = 1` for every generator.
pub fn check_involution(shape: &SymplecticShape, m: &HomMapData) -> Result<bool> {
    if m.mode != MapMode::Anti || !check_homogeneous_map(shape, m) {
        return Err(Error::NotHomogeneousAntiAutomorphism);
    }
    if !m.tau.compose(&m.tau).is_identity() {
        return Ok(false);
    }
    let t = shape.group();
    Ok((0..t.rank()).all(|c| {
        let img = m.tau.image_of_generator(c);
        (m.lambda[c] * lambda_extend(shape, m, &img)).is_one()
    }))
}

/// Dimension of `{x : ψ(x) = x}` for an involution given by its λ-table.
pub fn fixed_space_dimension(shape: &SymplecticShape, m: &HomMapData) -> usize {
    let t = shape.group();
    let table = lambda_table(shape, m);
    let mut dim = 0;
    for (idx, g) in t.elements().enumerate() {
        let img = t.index_of(&m.tau.apply(&g));
        if img == idx {
            dim += usize::from(table[idx].is_one());
        } else if img > idx {
            dim += 1;
        }
    }
    dim
}

// ---------------------------------------------------------------------------
// Isomorphism

fn chi_table(t: &FinAbGroup, chi: &crate::abgroup::Character, ambient: u64) -> Vec<RootOfUnity> {
    t.elements()
        .map(|g| chi.eval(&g, ambient).expect("character order divides ambient"))
        .collect()
}

/// `τ = τ'` and some character satisfies `χ(τc) λ'_c = χ(c) λ_c` on generators.
pub fn are_isomorphic(
    shape: &SymplecticShape,
    m1: &HomMapData,
    m2: &HomMapData,
) -> (bool, Option<WitnessData>) {
    if m1.tau != m2.tau || m1.mode != m2.mode {
        return (false, None);
    }
    let t = shape.group();
    let amb = shape.ambient();
    let images: Vec<usize> = (0..t.rank())
        .map(|c| t.index_of(&m1.tau.image_of_generator(c)))
        .collect();
    for chi in characters(t) {
        let ok = (0..t.rank()).all(|c| {
            let at_tau = chi
                .eval(&t.element_at(images[c]), amb)
                .expect("character order divides ambient");
            let at_c = chi.on_generator(c, amb).expect("character order divides ambient");
            at_tau * m2.lambda[c] == at_c * m1.lambda[c]
        });
        if ok {
            return (
                true,
                Some(WitnessData {
                    phi: None,
                    chi: chi_table(t, &chi, amb),
                }),
            );
        }
    }
    (false, None)
}

/// Re-checks an isomorphism witness from scratch.
pub fn verify_isomorphism_witness(
    shape: &SymplecticShape,
    m1: &HomMapData,
    m2: &HomMapData,
    w: &WitnessData,
) -> bool {
    let t = shape.group();
    if w.phi.is_some() || m1.tau != m2.tau || w.chi.len() != t.size() as usize {
        return false;
    }
    let chi = |g: &GroupElem| w.chi[t.index_of(g)];
    let elems: Vec<GroupElem> = t.elements().collect();
    let multiplicative = elems
        .iter()
        .all(|u| elems.iter().all(|v| chi(&t.add(u, v)) == chi(u) * chi(v)));
    multiplicative
        && (0..t.rank()).all(|c| {
            let gc = t.generator(c);
            chi(&m1.tau.apply(&gc)) * m2.lambda[c] == chi(&gc) * m1.lambda[c]
        })
}

// ---------------------------------------------------------------------------
// Equivalence

/// Automorphisms `φ` of `T` admitting a `φ`-homogeneous automorphism of the
/// algebra (the automorphism-mode congruences).
pub fn admissible_automorphisms(shape: &SymplecticShape) -> Result<Vec<GroupMap>> {
    let t = shape.group();
    if shape.pairs().len() == 1 {
        return enumerate_automorphisms(t, Some(DetTraceFilter::det(1)), DEFAULT_ENUM_CAP);
    }
    Ok(enumerate_automorphisms(t, None, DEFAULT_ENUM_CAP)?
        .into_iter()
        .filter(|phi| congruences_hold(shape, phi, MapMode::Auto))
        .collect())
}

/// `ρ(g, h) = σ(φg, φh) / σ(g, h)`.
fn rho(shape: &SymplecticShape, phi: &GroupMap, g: &GroupElem, h: &GroupElem) -> RootOfUnity {
    shape.sigma(&phi.apply(g), &phi.apply(h)) / shape.sigma(g, h)
}

/// Extends generator values along the canonical path: for `g ≠ 0` with lowest
/// nonzero coordinate `c`, `χ(g) = χ(g - e_c) χ(e_c) ρ(g - e_c, e_c)`.
fn extend_along_path(
    shape: &SymplecticShape,
    phi: &GroupMap,
    gen_values: &[RootOfUnity],
) -> Vec<RootOfUnity> {
    let t = shape.group();
    let n = t.size() as usize;
    let mut chi = vec![RootOfUnity::one(shape.ambient()); n];
    for idx in 1..n {
        let g = t.element_at(idx);
        let c = g.residues().iter().position(|&r| r != 0).expect("nonzero");
        let ec = t.generator(c);
        let h = t.sub(&g, &ec);
        chi[idx] = chi[t.index_of(&h)] * gen_values[c] * rho(shape, phi, &h, &ec);
    }
    chi
}

fn coboundary_matches(shape: &SymplecticShape, phi: &GroupMap, chi: &[RootOfUnity]) -> bool {
    let t = shape.group();
    let elems: Vec<GroupElem> = t.elements().collect();
    elems.iter().enumerate().all(|(i, u)| {
        elems.iter().enumerate().all(|(j, v)| {
            chi[t.index_of(&t.add(u, v))] == chi[i] * chi[j] * rho(shape, phi, u, v)
        })
    })
}

fn equivalence_generator_condition(
    shape: &SymplecticShape,
    m1: &HomMapData,
    m2: &HomMapData,
    phi: &GroupMap,
    chi: &[RootOfUnity],
) -> bool {
    let t = shape.group();
    (0..t.rank()).all(|c| {
        let gc = t.generator(c);
        let lam2 = lambda_extend(shape, m2, &phi.apply(&gc));
        m1.lambda[c] == chi[t.index_of(&gc)] / chi[t.index_of(&m1.tau.apply(&gc))] * lam2
    })
}

/// Searches for `φ` and `χ` with `τ' = φτφ⁻¹`, `δχ = σ∘φ / σ` and
/// `λ_c = χ(c) χ(τc)⁻¹ λ'_{φ(c)}`.
pub fn are_equivalent(
    shape: &SymplecticShape,
    m1: &HomMapData,
    m2: &HomMapData,
) -> Result<(bool, Option<WitnessData>)> {
    let auts = admissible_automorphisms(shape)?;
    Ok(are_equivalent_with(shape, &auts, m1, m2))
}

/// [`are_equivalent`] over a precomputed list of admissible automorphisms.
pub fn are_equivalent_with(
    shape: &SymplecticShape,
    auts: &[GroupMap],
    m1: &HomMapData,
    m2: &HomMapData,
) -> (bool, Option<WitnessData>) {
    if m1.mode != m2.mode {
        return (false, None);
    }
    let t = shape.group();
    let amb = shape.ambient();
    let chars: Vec<Vec<RootOfUnity>> = characters(t).iter().map(|x| chi_table(t, x, amb)).collect();
    for phi in auts {
        if phi.compose(&m1.tau) != m2.tau.compose(phi) {
            continue;
        }
        // wraparound: x_c^ℓ = (∏_{i<ℓ} ρ(i e_c, e_c))^{-1}
        let mut base = Vec::with_capacity(t.rank());
        for c in 0..t.rank() {
            let ec = t.generator(c);
            let l = shape.generator_order(c);
            let mut prod = RootOfUnity::one(amb);
            for i in 1..l {
                prod = prod * rho(shape, phi, &t.scale(i as i64, &ec), &ec);
            }
            match RootOfUnity::nth_roots(prod.inv(), l).first() {
                Some(&x) => base.push(x),
                None => break,
            }
        }
        if base.len() != t.rank() {
            continue;
        }
        let chi0 = extend_along_path(shape, phi, &base);
        if !coboundary_matches(shape, phi, &chi0) {
            continue;
        }
        for xi in &chars {
            let chi: Vec<RootOfUnity> = chi0.iter().zip(xi).map(|(a, b)| *a * *b).collect();
            if equivalence_generator_condition(shape, m1, m2, phi, &chi) {
                return (
                    true,
                    Some(WitnessData {
                        phi: Some(phi.clone()),
                        chi,
                    }),
                );
            }
        }
    }
    (false, None)
}

/// Re-checks an equivalence witness from scratch.
pub fn verify_equivalence_witness(
    shape: &SymplecticShape,
    m1: &HomMapData,
    m2: &HomMapData,
    w: &WitnessData,
) -> bool {
    let t = shape.group();
    let Some(phi) = &w.phi else {
        return false;
    };
    if w.chi.len() != t.size() as usize {
        return false;
    }
    matches!(is_automorphism(t, phi), Ok(true))
        && congruences_hold(shape, phi, MapMode::Auto)
        && phi.compose(&m1.tau) == m2.tau.compose(phi)
        && coboundary_matches(shape, phi, &w.chi)
        && equivalence_generator_condition(shape, m1, m2, phi, &w.chi)
}

// ---------------------------------------------------------------------------
// Degree-preserving / degree-inverting existence

/// Which `τ` to test in [`exists_fixed_or_inverting`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeVariant {
    /// `τ = id`.
    Preserving,
    /// `τ = -id`.
    Inverting,
}

/// Searches `λ` over `μ_M` for a homogeneous anti-automorphism with
/// `τ = id` or `τ = -id`; returns the first one found.
pub fn find_fixed_or_inverting(shape: &SymplecticShape, variant: DegreeVariant) -> Option<HomMapData> {
    let t = shape.group();
    let tau = match variant {
        DegreeVariant::Preserving => GroupMap::identity(t),
        DegreeVariant::Inverting => GroupMap::negation(t),
    };
    let amb = shape.ambient();
    let mut lambda = Vec::with_capacity(t.rank());
    for c in 0..t.rank() {
        let target = power_target(shape, &tau, c);
        let roots = RootOfUnity::nth_roots(target, shape.generator_order(c));
        lambda.push(*roots.first()?);
    }
    debug_assert!(lambda.iter().all(|l| l.order() == amb));
    let m = HomMapData {
        tau,
        lambda,
        mode: MapMode::Anti,
    };
    check_homogeneous_map(shape, &m).then_some(m)
}

pub fn exists_fixed_or_inverting(shape: &SymplecticShape, variant: DegreeVariant) -> bool {
    find_fixed_or_inverting(shape, variant).is_some()
}
