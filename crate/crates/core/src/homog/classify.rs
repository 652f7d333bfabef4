//! Classification of homogeneous involutions for the Pauli grading of
//! `M_n(F)` by `ℤ_n²`.

use std::collections::HashMap;

use serde::Serialize;

use super::{
    admissible_automorphisms, are_equivalent_with, are_isomorphic, check_involution,
    fixed_space_dimension, lambda_extend, power_target, HomMapData, MapMode,
};
use crate::abgroup::{crt_idempotent, factorize, GroupMap};
use crate::cocycle::SymplecticShape;
use crate::cyclotomic::RootOfUnity;
use crate::error::{Error, Result};
use crate::orbits::{canonical_forms, ModMatrix2};

/// Largest `n` accepted by the classification drivers.
pub const DEFAULT_N_CAP: u64 = 16;

/// One isomorphism class of involutions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvolutionRep {
    pub orbit: String,
    pub tau: Vec<Vec<i64>>,
    pub lambda_a: RootOfUnity,
    pub lambda_b: RootOfUnity,
    pub label: String,
    pub iso_class: usize,
    pub equiv_class: usize,
    /// `+1` orthogonal, `-1` symplectic.
    pub epsilon_b: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub label: String,
    pub tau: Vec<Vec<i64>>,
    pub iso_count: usize,
    pub representatives: Vec<InvolutionRep>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceClass {
    pub id: usize,
    pub representative: String,
    pub kind: String,
    pub members: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentSummary {
    pub modulus: u64,
    pub epsilon_exp: u64,
    pub taus: Vec<Vec<Vec<i64>>>,
    pub iso_counts: Vec<usize>,
    pub equivalence_classes: usize,
}

/// Predicted counts and representatives for the Pauli classification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpectedClassification {
    pub equivalence_classes: usize,
    pub iso_counts: Vec<usize>,
    pub representatives: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub n: u64,
    pub ambient: u64,
    pub method: String,
    pub components: Vec<ComponentSummary>,
    pub orbits: Vec<OrbitReport>,
    pub equivalence_classes: usize,
    pub equivalence_representatives: Vec<EquivalenceClass>,
    pub expected: ExpectedClassification,
    /// Each predicted representative is a valid involution, and they fall
    /// one per computed equivalence class.
    pub representatives_match: bool,
    /// Form signs agree with the dimension of the fixed space.
    pub kind_cross_check: bool,
    pub matches: bool,
}

impl ClassificationReport {
    pub fn iso_counts(&self) -> Vec<usize> {
        self.orbits.iter().map(|o| o.iso_count).collect()
    }

    /// Flat table: orbit, λ_a, λ_b, iso id, equivalence id, ε_B.
    pub fn csv_rows(&self) -> Vec<[String; 6]> {
        self.orbits
            .iter()
            .flat_map(|o| o.representatives.iter())
            .map(|r| {
                [
                    r.orbit.clone(),
                    format!("{}:{}", r.lambda_a.order(), r.lambda_a.exp()),
                    format!("{}:{}", r.lambda_b.order(), r.lambda_b.exp()),
                    r.iso_class.to_string(),
                    r.equiv_class.to_string(),
                    r.epsilon_b.to_string(),
                ]
            })
            .collect()
    }
}

/// `1`, `-1`, `eps^k` (with `ε = ζ_n`) or `zM^e`.
pub fn scalar_label(r: RootOfUnity, n: u64) -> String {
    let m = r.order();
    let e = r.exp();
    if e == 0 {
        return "1".into();
    }
    if 2 * e == m {
        return "-1".into();
    }
    let step = m / n;
    if m.is_multiple_of(n) && e.is_multiple_of(step) {
        return match e / step {
            1 => "eps".into(),
            k => format!("eps^{k}"),
        };
    }
    format!("z{m}^{e}")
}

fn rep_label(orbit: &str, la: RootOfUnity, lb: RootOfUnity, n: u64) -> String {
    format!("({orbit}, {}, {})", scalar_label(la, n), scalar_label(lb, n))
}

fn orbit_label(i: usize) -> String {
    format!("theta{}", i + 1)
}

// ---------------------------------------------------------------------------
// Classification of a single ℤ_q² shape

struct ShapeClassification {
    shape: SymplecticShape,
    taus: Vec<GroupMap>,
    iso_reps: Vec<Vec<HomMapData>>,
    equiv_ids: Vec<Vec<usize>>,
    signs: Vec<Vec<i8>>,
    equiv_count: usize,
}

impl ShapeClassification {
    /// Index of the isomorphism representative of `m` among those for `tau_idx`.
    fn locate_iso(&self, tau_idx: usize, m: &HomMapData) -> Option<usize> {
        self.iso_reps[tau_idx]
            .iter()
            .position(|r| are_isomorphic(&self.shape, r, m).0)
    }
}

/// All `τ`-homogeneous involutions of the single-pair shape for the given
/// `τ`'s, grouped into isomorphism classes and equivalence classes.
fn classify_shape(shape: &SymplecticShape, taus: &[GroupMap]) -> Result<ShapeClassification> {
    let auts = admissible_automorphisms(shape)?;
    let mut iso_reps = Vec::new();
    for tau in taus {
        let roots_a = RootOfUnity::nth_roots(power_target(shape, tau, 0), shape.generator_order(0));
        let roots_b = RootOfUnity::nth_roots(power_target(shape, tau, 1), shape.generator_order(1));
        let mut reps: Vec<HomMapData> = Vec::new();
        for &la in &roots_a {
            for &lb in &roots_b {
                let m = HomMapData {
                    tau: tau.clone(),
                    lambda: vec![la, lb],
                    mode: MapMode::Anti,
                };
                if !check_involution(shape, &m).unwrap_or(false) {
                    continue;
                }
                if !reps.iter().any(|r| are_isomorphic(shape, r, &m).0) {
                    reps.push(m);
                }
            }
        }
        iso_reps.push(reps);
    }
    let mut class_reps: Vec<&HomMapData> = Vec::new();
    let mut equiv_ids = Vec::new();
    for reps in &iso_reps {
        let mut ids = Vec::new();
        for m in reps {
            let found = class_reps
                .iter()
                .position(|r| are_equivalent_with(shape, &auts, m, r).0);
            ids.push(found.unwrap_or_else(|| {
                class_reps.push(m);
                class_reps.len() - 1
            }));
        }
        equiv_ids.push(ids);
    }
    let signs = iso_reps
        .iter()
        .map(|reps| {
            reps.iter()
                .map(|m| crate::realize::involution_form_sign(shape, m))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShapeClassification {
        shape: shape.clone(),
        taus: taus.to_vec(),
        equiv_count: class_reps.len(),
        iso_reps,
        equiv_ids,
        signs,
    })
}

fn check_n(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be at least 2, got {n}")));
    }
    if n > DEFAULT_N_CAP {
        return Err(Error::CapExceeded {
            value: n,
            cap: DEFAULT_N_CAP,
        });
    }
    Ok(())
}

fn mod_matrix_to_map(shape: &SymplecticShape, a: &ModMatrix2) -> GroupMap {
    let e = a.entries();
    GroupMap::from_row_major(shape.group(), &[e[0] as i64, e[1] as i64, e[2] as i64, e[3] as i64])
        .expect("2x2 matrix on Z_n^2")
}

/// A full involution on `ℤ_n²` with its class data.
struct FullRep {
    orbit: usize,
    data: HomMapData,
    equiv_key: Vec<usize>,
    iso_key: Vec<usize>,
    sign: i8,
}

/// Predicted representatives as `(orbit, λ_a, λ_b)` in `μ_{2n²}`.
fn predicted(n: u64) -> (Vec<(usize, RootOfUnity, RootOfUnity)>, Vec<usize>, usize) {
    let m = 2 * n * n;
    let one = RootOfUnity::one(m);
    let minus = RootOfUnity::minus_one(m);
    let eps = RootOfUnity::new(m, (m / n) as i64);
    if n % 2 == 1 {
        (vec![(0, one, one)], vec![1], 1)
    } else if n % 4 == 2 {
        (vec![(0, one, one), (0, minus, eps), (1, one, one)], vec![4, 1], 3)
    } else {
        (
            vec![
                (0, one, one),
                (0, one, eps),
                (0, minus, eps),
                (1, one, one),
                (2, eps.pow((n / 4) as i64), eps),
            ],
            vec![4, 1, 1],
            5,
        )
    }
}

/// Classification of involutions on the Pauli-graded `M_n(F)`, computed on
/// the primary components `ℤ_q²` and recombined by CRT.
pub fn classify_pauli(n: u64) -> Result<ClassificationReport> {
    check_n(n)?;
    let full = SymplecticShape::pauli(n);
    let forms = canonical_forms(n);
    let mut comps = Vec::new();
    for (p, e) in factorize(n) {
        let q = p.pow(e);
        let (shape_q, _) = full.prime_component(p)?;
        let mut taus: Vec<GroupMap> = Vec::new();
        let mut tau_index = Vec::new();
        for f in &forms {
            let reduced = mod_matrix_to_map(&shape_q, &f.reduce(q));
            let idx = taus.iter().position(|t| *t == reduced).unwrap_or_else(|| {
                taus.push(reduced);
                taus.len() - 1
            });
            tau_index.push(idx);
        }
        let cls = classify_shape(&shape_q, &taus)?;
        comps.push((q, crt_idempotent(n, q), tau_index, cls));
    }

    let amb = full.ambient();
    let mut reps: Vec<FullRep> = Vec::new();
    for (oi, form) in forms.iter().enumerate() {
        let tau = mod_matrix_to_map(&full, form);
        // cartesian product of component isomorphism classes
        let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
        for (_, _, tau_index, cls) in &comps {
            let count = cls.iso_reps[tau_index[oi]].len();
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    (0..count).map(move |i| {
                        let mut t = t.clone();
                        t.push(i);
                        t
                    })
                })
                .collect();
        }
        for tuple in tuples {
            let mut la = RootOfUnity::one(amb);
            let mut lb = RootOfUnity::one(amb);
            let mut equiv_key = Vec::new();
            let mut sign = 1i8;
            for ((_, _, tau_index, cls), &i) in comps.iter().zip(&tuple) {
                let ti = tau_index[oi];
                let m = &cls.iso_reps[ti][i];
                la = la * m.lambda[0].lift(amb)?;
                lb = lb * m.lambda[1].lift(amb)?;
                equiv_key.push(cls.equiv_ids[ti][i]);
                sign *= cls.signs[ti][i];
            }
            let data = HomMapData {
                tau: tau.clone(),
                lambda: vec![la, lb],
                mode: MapMode::Anti,
            };
            if !check_involution(&full, &data)? {
                return Err(Error::InvalidArgument(format!(
                    "recombined map {} is not an involution",
                    rep_label(&orbit_label(oi), la, lb, n)
                )));
            }
            reps.push(FullRep {
                orbit: oi,
                data,
                equiv_key,
                iso_key: tuple,
                sign,
            });
        }
    }

    let locate = |oi: usize, m: &HomMapData| -> Option<(Vec<usize>, Vec<usize>)> {
        let mut iso_key = Vec::new();
        let mut equiv_key = Vec::new();
        for (q, e, tau_index, cls) in &comps {
            let ti = tau_index[oi];
            let restrict = |c: usize| -> Option<RootOfUnity> {
                let g = full.group().scale(*e as i64, &full.group().generator(c));
                let l = lambda_extend(&full, m, &g);
                let sub = cls.shape.ambient();
                let step = amb / sub;
                l.exp().is_multiple_of(step).then(|| RootOfUnity::new(sub, (l.exp() / step) as i64))
            };
            let comp_data = HomMapData {
                tau: cls.taus[ti].clone(),
                lambda: vec![restrict(0)?, restrict(1)?],
                mode: MapMode::Anti,
            };
            debug_assert_eq!(cls.shape.pairs()[0].order, *q);
            let i = cls.locate_iso(ti, &comp_data)?;
            iso_key.push(i);
            equiv_key.push(cls.equiv_ids[ti][i]);
        }
        Some((iso_key, equiv_key))
    };

    let summaries = comps
        .iter()
        .map(|(q, _, _, cls)| ComponentSummary {
            modulus: *q,
            epsilon_exp: cls.shape.pairs()[0].epsilon_exp,
            taus: cls.taus.iter().map(GroupMap::rows).collect(),
            iso_counts: cls.iso_reps.iter().map(Vec::len).collect(),
            equivalence_classes: cls.equiv_count,
        })
        .collect();

    assemble(n, &full, &forms, reps, summaries, "crt", |oi, m| {
        locate(oi, m)
    })
}

/// The same classification computed directly on `ℤ_n²` without splitting.
pub fn classify_direct(n: u64) -> Result<ClassificationReport> {
    check_n(n)?;
    let full = SymplecticShape::pauli(n);
    let forms = canonical_forms(n);
    let taus: Vec<GroupMap> = forms.iter().map(|f| mod_matrix_to_map(&full, f)).collect();
    let cls = classify_shape(&full, &taus)?;
    let mut reps = Vec::new();
    for (oi, list) in cls.iso_reps.iter().enumerate() {
        for (i, m) in list.iter().enumerate() {
            reps.push(FullRep {
                orbit: oi,
                data: m.clone(),
                equiv_key: vec![cls.equiv_ids[oi][i]],
                iso_key: vec![i],
                sign: cls.signs[oi][i],
            });
        }
    }
    let summaries = vec![ComponentSummary {
        modulus: n,
        epsilon_exp: 1,
        taus: taus.iter().map(GroupMap::rows).collect(),
        iso_counts: cls.iso_reps.iter().map(Vec::len).collect(),
        equivalence_classes: cls.equiv_count,
    }];
    let locate = |oi: usize, m: &HomMapData| {
        let i = cls.locate_iso(oi, m)?;
        Some((vec![i], vec![cls.equiv_ids[oi][i]]))
    };
    assemble(n, &full, &forms, reps, summaries, "direct", locate)
}

fn assemble(
    n: u64,
    full: &SymplecticShape,
    forms: &[ModMatrix2],
    mut reps: Vec<FullRep>,
    components: Vec<ComponentSummary>,
    method: &str,
    locate: impl Fn(usize, &HomMapData) -> Option<(Vec<usize>, Vec<usize>)>,
) -> Result<ClassificationReport> {
    let amb = full.ambient();
    reps.sort_by_key(|r| (r.orbit, r.data.lambda[0].exp(), r.data.lambda[1].exp()));

    // global ids by first appearance
    let mut equiv_ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut iso_ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    for r in &reps {
        let next = equiv_ids.len();
        equiv_ids.entry(r.equiv_key.clone()).or_insert(next);
        let next = iso_ids.len();
        iso_ids.entry((r.orbit, r.iso_key.clone())).or_insert(next);
    }

    let dim_sym = (n * (n + 1) / 2) as usize;
    let dim_skew = (n * (n - 1) / 2) as usize;
    let mut kind_ok = true;
    let mut orbits: Vec<OrbitReport> = forms
        .iter()
        .enumerate()
        .map(|(oi, f)| OrbitReport {
            label: orbit_label(oi),
            tau: mod_matrix_to_map(full, f).rows(),
            iso_count: 0,
            representatives: Vec::new(),
        })
        .collect();
    for r in &reps {
        let dim = fixed_space_dimension(full, &r.data);
        let expected_dim = if r.sign == 1 { dim_sym } else { dim_skew };
        kind_ok &= dim == expected_dim;
        let o = &mut orbits[r.orbit];
        o.representatives.push(InvolutionRep {
            orbit: o.label.clone(),
            tau: o.tau.clone(),
            lambda_a: r.data.lambda[0],
            lambda_b: r.data.lambda[1],
            label: rep_label(&o.label, r.data.lambda[0], r.data.lambda[1], n),
            iso_class: iso_ids[&(r.orbit, r.iso_key.clone())],
            equiv_class: equiv_ids[&r.equiv_key],
            epsilon_b: r.sign,
        });
        o.iso_count += 1;
    }

    let (pred, pred_iso, pred_equiv) = predicted(n);
    let mut pred_labels = Vec::new();
    let mut pred_classes = Vec::new();
    let mut reps_valid = true;
    for &(oi, la, lb) in &pred {
        pred_labels.push(rep_label(&orbit_label(oi), la, lb, n));
        let tau = GroupMap::from_row_major(full.group(), &flat(&orbits[oi].tau))?;
        let m = HomMapData {
            tau,
            lambda: vec![la, lb],
            mode: MapMode::Anti,
        };
        reps_valid &= check_involution(full, &m).unwrap_or(false);
        match locate(oi, &m) {
            Some((_, key)) => pred_classes.push(equiv_ids.get(&key).copied()),
            None => pred_classes.push(None),
        }
    }
    let mut distinct: Vec<usize> = pred_classes.iter().flatten().copied().collect();
    distinct.sort_unstable();
    distinct.dedup();
    let representatives_match = reps_valid
        && pred_classes.iter().all(Option::is_some)
        && distinct.len() == pred.len()
        && distinct.len() == equiv_ids.len();

    let mut classes: Vec<EquivalenceClass> = (0..equiv_ids.len())
        .map(|id| EquivalenceClass {
            id,
            representative: String::new(),
            kind: String::new(),
            members: Vec::new(),
        })
        .collect();
    for o in &orbits {
        for r in &o.representatives {
            let c = &mut classes[r.equiv_class];
            if c.members.is_empty() {
                c.representative = r.label.clone();
                c.kind = if r.epsilon_b == 1 { "orthogonal" } else { "symplectic" }.into();
            }
            c.members.push(r.label.clone());
        }
    }
    for (label, class) in pred_labels.iter().zip(&pred_classes) {
        if let Some(id) = class {
            classes[*id].representative = label.clone();
        }
    }

    let iso_counts: Vec<usize> = orbits.iter().map(|o| o.iso_count).collect();
    let matches = representatives_match
        && kind_ok
        && equiv_ids.len() == pred_equiv
        && iso_counts == pred_iso;
    Ok(ClassificationReport {
        n,
        ambient: amb,
        method: method.into(),
        components,
        orbits,
        equivalence_classes: equiv_ids.len(),
        equivalence_representatives: classes,
        expected: ExpectedClassification {
            equivalence_classes: pred_equiv,
            iso_counts: pred_iso,
            representatives: pred_labels,
        },
        representatives_match,
        kind_cross_check: kind_ok,
        matches,
    })
}

fn flat(rows: &[Vec<i64>]) -> Vec<i64> {
    rows.iter().flatten().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(scalar_label(RootOfUnity::new(32, 0), 4), "1");
        assert_eq!(scalar_label(RootOfUnity::new(32, 16), 4), "-1");
        assert_eq!(scalar_label(RootOfUnity::new(32, 8), 4), "eps");
        assert_eq!(scalar_label(RootOfUnity::new(32, 24), 4), "eps^3");
        assert_eq!(scalar_label(RootOfUnity::new(32, 4), 4), "z32^4");
    }

    #[test]
    fn n3_single_class() {
        let r = classify_pauli(3).unwrap();
        assert_eq!(r.equivalence_classes, 1);
        assert_eq!(r.iso_counts(), vec![1]);
        assert!(r.matches, "{r:#?}");
    }

    #[test]
    fn n2_classes() {
        let r = classify_pauli(2).unwrap();
        assert_eq!(r.equivalence_classes, 3);
        assert_eq!(r.iso_counts(), vec![4, 1]);
        assert!(r.matches, "{r:#?}");
    }

    #[test]
    fn cap_and_range() {
        assert!(matches!(classify_pauli(1), Err(Error::InvalidArgument(_))));
        assert!(matches!(classify_pauli(1000), Err(Error::CapExceeded { .. })));
    }
}
