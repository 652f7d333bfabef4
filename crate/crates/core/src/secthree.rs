//! Gradings `M(D, γ)` on `M_n(D)` for a realized graded-division algebra
//! `D = F^σ T`, involutions `X ↦ Φ^{-1} ψ_0(X^t) Φ`, and the sign of the
//! underlying form.

use serde::{Deserialize, Serialize};

use crate::abgroup::{is_automorphism, FinAbGroup, GroupElem, GroupMap};
use crate::cocycle::SymplecticShape;
use crate::cyclotomic::{CycNum, RootOfUnity};
use crate::error::{Error, Result};
use crate::homog::{check_homogeneous_map, check_involution, HomMapData};
use crate::realize::{
    minimal_field_order, realize_division_algebra_over, realize_hom_map, BasisMap, CycMatrix,
    RealizedAlgebra,
};

/// Orthogonal (`ε_B = +1`) or symplectic (`ε_B = -1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    Orthogonal,
    Symplectic,
}

impl FormKind {
    pub fn sign(self) -> i8 {
        match self {
            FormKind::Orthogonal => 1,
            FormKind::Symplectic => -1,
        }
    }
}

/// An injective homomorphism `T → G`, given by the images of the generators of `T`.
fn check_embedding(g: &FinAbGroup, t: &FinAbGroup, images: &[GroupElem]) -> Result<()> {
    let bad = |why: String| Err(Error::InvalidDatum(format!("embedding: {why}")));
    if images.len() != t.rank() {
        return bad(format!("expected {} images, got {}", t.rank(), images.len()));
    }
    for (c, img) in images.iter().enumerate() {
        if !g.contains(img) {
            return bad(format!("image {img} not in {g}"));
        }
        if !g.scale(t.orders()[c] as i64, img).is_zero() {
            return bad(format!("image of generator {c} has the wrong order"));
        }
    }
    let mut seen = std::collections::HashSet::new();
    for x in t.elements() {
        if !seen.insert(embed_elem(g, images, &x)) {
            return bad("not injective".into());
        }
    }
    Ok(())
}

fn embed_elem(g: &FinAbGroup, images: &[GroupElem], x: &GroupElem) -> GroupElem {
    x.residues()
        .iter()
        .zip(images)
        .fold(g.zero(), |acc, (&k, img)| g.add(&acc, &g.scale(k as i64, img)))
}

/// Identity embedding when `T` and `G` have the same orders; empty for trivial `T`.
pub fn default_embedding(g: &FinAbGroup, t: &FinAbGroup) -> Result<Vec<GroupElem>> {
    if t.rank() == 0 {
        return Ok(Vec::new());
    }
    if t.orders() == g.orders() {
        return Ok((0..t.rank()).map(|c| g.generator(c)).collect());
    }
    Err(Error::InvalidDatum(format!(
        "no embedding of {t} into {g} given"
    )))
}

/// `M_n(D)` with `deg(e_ij ⊗ X_t) = γ_i + ι(t) − γ_j`.
#[derive(Clone, Debug)]
pub struct GradedMatrixAlgebra {
    group: FinAbGroup,
    d: RealizedAlgebra,
    embedding: Vec<GroupElem>,
    gamma: Vec<GroupElem>,
}

/// A basis cell `e_ij ⊗ X_t`, `t` given by its index in `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Cell {
    pub i: usize,
    pub j: usize,
    pub t: usize,
}

pub fn build_grading(
    group: &FinAbGroup,
    d: &RealizedAlgebra,
    gamma: &[GroupElem],
    embedding: &[GroupElem],
) -> Result<GradedMatrixAlgebra> {
    if gamma.is_empty() {
        return Err(Error::InvalidDatum("empty degree sequence".into()));
    }
    if let Some(g) = gamma.iter().find(|g| !group.contains(g)) {
        return Err(Error::InvalidDatum(format!("{g} is not in {group}")));
    }
    check_embedding(group, d.group(), embedding)?;
    Ok(GradedMatrixAlgebra {
        group: group.clone(),
        d: d.clone(),
        embedding: embedding.to_vec(),
        gamma: gamma.to_vec(),
    })
}

impl GradedMatrixAlgebra {
    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn division_algebra(&self) -> &RealizedAlgebra {
        &self.d
    }

    pub fn gamma(&self) -> &[GroupElem] {
        &self.gamma
    }

    /// Number of rows of blocks.
    pub fn n(&self) -> usize {
        self.gamma.len()
    }

    /// `ι(t)` for `t ∈ T`.
    pub fn embed(&self, t: &GroupElem) -> GroupElem {
        embed_elem(&self.group, &self.embedding, t)
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let n = self.n();
        let k = self.d.basis().len();
        (0..n).flat_map(move |i| (0..n).flat_map(move |j| (0..k).map(move |t| Cell { i, j, t })))
    }

    pub fn degree(&self, c: Cell) -> GroupElem {
        let t = self.d.group().element_at(c.t);
        let g = &self.group;
        g.sub(&g.add(&self.gamma[c.i], &self.embed(&t)), &self.gamma[c.j])
    }

    /// Distinct degrees of all cells, sorted by index in `G`.
    pub fn support(&self) -> Vec<GroupElem> {
        let mut idx: Vec<usize> = self
            .cells()
            .map(|c| self.group.index_of(&self.degree(c)))
            .collect();
        idx.sort_unstable();
        idx.dedup();
        idx.into_iter().map(|i| self.group.element_at(i)).collect()
    }

    /// `e_ij ⊗ X_t` as an `nN × nN` matrix.
    pub fn cell_matrix(&self, c: Cell) -> CycMatrix {
        let n = self.n();
        let size = self.d.size();
        let f = self.d.field_order();
        let x = &self.d.basis()[c.t];
        let mut out = CycMatrix::zeros(n * size, n * size, f);
        for r in 0..size {
            for s in 0..size {
                let v = x.get(r, s);
                if !v.is_zero() {
                    out.set(c.i * size + r, c.j * size + s, v.clone());
                }
            }
        }
        out
    }

    /// Coordinates of `a` in the cell basis, nonzero entries only.
    pub fn decompose(&self, a: &CycMatrix) -> Result<Vec<(Cell, CycNum)>> {
        let n = self.n();
        let size = self.d.size();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let block = a.block(i, j, size);
                if block.is_zero() {
                    continue;
                }
                for (t, c) in self.d.coordinates(&block)?.into_iter().enumerate() {
                    if !c.is_zero() {
                        out.push((Cell { i, j, t }, c));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// The data of a candidate `τ`-homogeneous involution on `M(D, γ)`.
#[derive(Clone, Debug)]
pub struct InvolutionDatum {
    pub group: FinAbGroup,
    pub tau: GroupMap,
    pub g0: GroupElem,
    pub psi0: HomMapData,
    pub d_shape: SymplecticShape,
    pub embedding: Vec<GroupElem>,
    /// `g_1, …, g_m`.
    pub self_dual: Vec<GroupElem>,
    /// `(g'_j, g''_j)` for `j = m+1, …, s`.
    pub dual_pairs: Vec<(GroupElem, GroupElem)>,
    /// `t_1, …, t_m` in `T`; named apart from the degree sequence `γ`.
    pub t_seq: Vec<GroupElem>,
    pub kind: FormKind,
}

impl InvolutionDatum {
    /// `γ = (g_1, …, g_m, g'_{m+1}, …, g'_s, g''_{m+1}, …, g''_s)`.
    pub fn gamma(&self) -> Vec<GroupElem> {
        let mut out = self.self_dual.clone();
        out.extend(self.dual_pairs.iter().map(|p| p.0.clone()));
        out.extend(self.dual_pairs.iter().map(|p| p.1.clone()));
        out
    }

    pub fn m(&self) -> usize {
        self.self_dual.len()
    }

    /// Block size `n = m + 2(s − m)`.
    pub fn n(&self) -> usize {
        self.self_dual.len() + 2 * self.dual_pairs.len()
    }

    /// The field over which `D` and `ψ_0` are realized.
    pub fn field_order(&self) -> u64 {
        use num_integer::Integer;
        self.psi0
            .lambda
            .iter()
            .fold(minimal_field_order(&self.d_shape), |acc, l| {
                acc.lcm(&l.multiplicative_order())
            })
    }

    pub fn realize(&self) -> Result<RealizedAlgebra> {
        realize_division_algebra_over(&self.d_shape, self.field_order())
    }
}

/// Every violated condition, in a fixed order; empty iff the datum is valid.
pub fn datum_violations(dat: &InvolutionDatum) -> Vec<String> {
    let mut out = Vec::new();
    let g = &dat.group;
    let t = dat.d_shape.group();
    let tau = &dat.tau;
    if tau.orders() != g.orders() {
        out.push("tau does not act on G".into());
        return out;
    }
    if !matches!(is_automorphism(g, tau), Ok(true)) {
        out.push("tau is not an automorphism of G".into());
    }
    if !tau.compose(tau).is_identity() {
        out.push("tau is not an involution".into());
    }
    if !g.contains(&dat.g0) {
        out.push("g0 is not in G".into());
        return out;
    }
    if tau.apply(&dat.g0) != dat.g0 {
        out.push("tau(g0) != g0".into());
    }
    if let Err(e) = check_embedding(g, t, &dat.embedding) {
        out.push(e.to_string());
        return out;
    }
    if dat.psi0.tau.orders() != t.orders() || dat.psi0.lambda.len() != t.rank() {
        out.push("psi0 does not act on T".into());
        return out;
    }
    if !check_homogeneous_map(&dat.d_shape, &dat.psi0) {
        out.push("psi0 is not a homogeneous anti-automorphism".into());
    } else if !check_involution(&dat.d_shape, &dat.psi0).unwrap_or(false) {
        out.push("psi0 is not an involution".into());
    }
    for c in 0..t.rank() {
        let x = t.generator(c);
        let lhs = embed_elem(g, &dat.embedding, &dat.psi0.tau.apply(&x));
        let rhs = tau.apply(&embed_elem(g, &dat.embedding, &x));
        if lhs != rhs {
            out.push(format!("degree law fails for psi0 on generator {c} of T"));
        }
    }
    for (idx, x) in dat.gamma().iter().enumerate() {
        if !g.contains(x) {
            out.push(format!("gamma entry {idx} is not in G"));
        }
    }
    if !out.is_empty() {
        return out;
    }
    if dat.n() == 0 {
        out.push("empty degree sequence".into());
    }
    if dat.t_seq.len() != dat.m() {
        out.push(format!(
            "t_seq has {} entries, expected m = {}",
            dat.t_seq.len(),
            dat.m()
        ));
    } else {
        let tg0 = tau.apply(&dat.g0);
        for (i, (gi, ti)) in dat.self_dual.iter().zip(&dat.t_seq).enumerate() {
            if !t.contains(ti) {
                out.push(format!("t_{} is not in T", i + 1));
                continue;
            }
            let want = g.add(&g.add(&tg0, &tau.apply(gi)), gi);
            if embed_elem(g, &dat.embedding, ti) != want {
                out.push(format!("t_{0} != tau(g0) + tau(g_{0}) + g_{0}", i + 1));
                continue;
            }
            let lambda = crate::homog::lambda_extend(&dat.d_shape, &dat.psi0, ti);
            if !lambda.is_one() {
                out.push(format!("psi0 does not fix X_t_{}", i + 1));
            }
        }
    }
    for (j, (g1, g2)) in dat.dual_pairs.iter().enumerate() {
        let want = g.sub(&g.neg(&tau.apply(g1)), &dat.g0);
        if *g2 != want {
            out.push(format!("g''_{0} != -tau(g'_{0}) - g0", j + 1));
        }
    }
    if dat.kind == FormKind::Symplectic && dat.m() > 0 {
        out.push("symplectic datum with m > 0".into());
    }
    out
}

pub fn validate_datum(dat: &InvolutionDatum) -> bool {
    datum_violations(dat).is_empty()
}

/// Orthogonal: `diag(X_{t_i}) ⊕ [[0, I], [I, 0]] ⊗ X_0`; symplectic:
/// `[[0, I], [−I, 0]] ⊗ X_0`. The swap blocks are sized by the dual pairs.
pub fn build_phi(dat: &InvolutionDatum, d: &RealizedAlgebra) -> Result<CycMatrix> {
    let v = datum_violations(dat);
    if !v.is_empty() {
        return Err(Error::InvalidDatum(v.join("; ")));
    }
    let size = d.size();
    let f = d.field_order();
    let n = dat.n();
    let m = dat.m();
    let p = dat.dual_pairs.len();
    let zero = CycMatrix::zeros(size, size, f);
    let one = CycMatrix::identity(size, f);
    let mut blocks = vec![vec![zero; n]; n];
    for (i, t) in dat.t_seq.iter().enumerate() {
        blocks[i][i] = d.basis_matrix(t).clone();
    }
    for j in 0..p {
        blocks[m + j][m + p + j] = one.clone();
        blocks[m + p + j][m + j] = match dat.kind {
            FormKind::Orthogonal => one.clone(),
            FormKind::Symplectic => one.neg(),
        };
    }
    CycMatrix::from_blocks(&blocks)
}

/// `ψ_0` applied to every block of the block transpose.
fn psi0_transpose(
    d: &RealizedAlgebra,
    psi0: &BasisMap,
    a: &CycMatrix,
) -> Result<CycMatrix> {
    let size = d.size();
    let n = a.rows() / size;
    let mut blocks = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let b = a.block(j, i, size);
            row.push(if b.is_zero() { b } else { psi0.apply(d, &b)? });
        }
        blocks.push(row);
    }
    CycMatrix::from_blocks(&blocks)
}

/// `X ↦ Φ^{-1} ψ_0(X^t) Φ` on `M_n(D)`.
#[derive(Clone, Debug)]
pub struct PsiMap {
    d: RealizedAlgebra,
    psi0: BasisMap,
    phi: CycMatrix,
    phi_inv: CycMatrix,
}

impl PsiMap {
    pub fn apply(&self, x: &CycMatrix) -> Result<CycMatrix> {
        let y = psi0_transpose(&self.d, &self.psi0, x)?;
        self.phi_inv.mul(&y)?.mul(&self.phi)
    }

    pub fn phi(&self) -> &CycMatrix {
        &self.phi
    }
}

pub fn psi_from_phi(phi: &CycMatrix, d: &RealizedAlgebra, psi0: &BasisMap) -> Result<PsiMap> {
    if phi.rows() != phi.cols() || !phi.rows().is_multiple_of(d.size()) {
        return Err(Error::MalformedMatrix(
            "Phi must be square with a whole number of blocks".into(),
        ));
    }
    Ok(PsiMap {
        d: d.clone(),
        psi0: psi0.clone(),
        phi_inv: phi.inverse()?,
        phi: phi.clone(),
    })
}

/// Result of [`verify_psi`], one flag per property.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PsiCheck {
    pub involutive: bool,
    pub anti_multiplicative: bool,
    pub homogeneous: bool,
}

impl PsiCheck {
    pub fn ok(&self) -> bool {
        self.involutive && self.anti_multiplicative && self.homogeneous
    }
}

/// Checks `ψ² = id`, `ψ(xy) = ψ(y)ψ(x)` and `ψ(A_g) ⊆ A_{τ(g)}` on all basis
/// cells and cell pairs.
pub fn verify_psi(map: &PsiMap, grading: &GradedMatrixAlgebra, tau: &GroupMap) -> Result<PsiCheck> {
    let cells: Vec<Cell> = grading.cells().collect();
    let mats: Vec<CycMatrix> = cells.iter().map(|&c| grading.cell_matrix(c)).collect();
    let images = mats.iter().map(|m| map.apply(m)).collect::<Result<Vec<_>>>()?;
    let mut involutive = true;
    let mut homogeneous = true;
    for ((&c, m), img) in cells.iter().zip(&mats).zip(&images) {
        if involutive && map.apply(img)? != *m {
            involutive = false;
        }
        let target = tau.apply(&grading.degree(c));
        let parts = grading.decompose(img)?;
        if parts.is_empty() || parts.iter().any(|(cell, _)| grading.degree(*cell) != target) {
            homogeneous = false;
        }
    }
    let mut anti_multiplicative = true;
    'outer: for (x, (cx, mx)) in cells.iter().zip(&mats).enumerate() {
        for (y, (cy, my)) in cells.iter().zip(&mats).enumerate() {
            let rhs = images[y].mul(&images[x])?;
            let lhs = if cx.j == cy.i {
                map.apply(&mx.mul(my)?)?
            } else {
                CycMatrix::zeros(rhs.rows(), rhs.cols(), rhs.order())
            };
            if lhs != rhs {
                anti_multiplicative = false;
                break 'outer;
            }
        }
    }
    Ok(PsiCheck {
        involutive,
        anti_multiplicative,
        homogeneous,
    })
}

/// `ε_B` with `ψ_0(Φ^t) = ε_B Φ` (blockwise `ψ_0`).
pub fn form_epsilon(phi: &CycMatrix, d: &RealizedAlgebra, psi0: &BasisMap) -> Result<i8> {
    let y = psi0_transpose(d, psi0, phi)?;
    if phi.is_zero() {
        return Err(Error::SingularMatrix);
    }
    if y == *phi {
        Ok(1)
    } else if y == phi.neg() {
        Ok(-1)
    } else {
        Err(Error::FormNotSymmetric)
    }
}

/// [`form_epsilon`] for `D` trivial, where `ψ_0` is the identity.
pub fn form_epsilon_trivial(phi: &CycMatrix) -> Result<i8> {
    if phi.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let t = phi.transpose();
    if t == *phi {
        Ok(1)
    } else if t == phi.neg() {
        Ok(-1)
    } else {
        Err(Error::FormNotSymmetric)
    }
}

/// Everything produced from a datum: the grading, `Φ`, `ψ` and its checks.
#[derive(Clone, Debug, Serialize)]
pub struct DatumReport {
    pub valid: bool,
    pub violations: Vec<String>,
    pub n: usize,
    pub support: Vec<GroupElem>,
    pub phi: Option<CycMatrix>,
    pub epsilon_b: Option<i8>,
    pub psi: Option<PsiCheck>,
}

impl DatumReport {
    /// Valid, `ψ` passes every check, and `ε_B` agrees with the declared kind.
    pub fn ok(&self, kind: FormKind) -> bool {
        self.valid
            && self.psi.is_some_and(|p| p.ok())
            && self.epsilon_b == Some(kind.sign())
    }
}

/// Validates, builds `Φ` and `ψ`, and runs [`verify_psi`] and [`form_epsilon`].
pub fn run_datum(dat: &InvolutionDatum) -> Result<DatumReport> {
    let violations = datum_violations(dat);
    if !violations.is_empty() {
        return Ok(DatumReport {
            valid: false,
            violations,
            n: dat.n(),
            support: Vec::new(),
            phi: None,
            epsilon_b: None,
            psi: None,
        });
    }
    let d = dat.realize()?;
    let grading = build_grading(&dat.group, &d, &dat.gamma(), &dat.embedding)?;
    let psi0 = realize_hom_map(&d, &dat.psi0)?;
    let phi = build_phi(dat, &d)?;
    let eps = form_epsilon(&phi, &d, &psi0)?;
    let psi = psi_from_phi(&phi, &d, &psi0)?;
    let check = verify_psi(&psi, &grading, &dat.tau)?;
    Ok(DatumReport {
        valid: true,
        violations,
        n: dat.n(),
        support: grading.support(),
        phi: Some(phi),
        epsilon_b: Some(eps),
        psi: Some(check),
    })
}

// ---------------------------------------------------------------------------
// Document format

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Psi0Doc {
    /// Descriptor of `T`, e.g. `Z2^2`; `1` for trivial `D`.
    pub shape: String,
    /// Standard convention: column `j` is the image of generator `j`.
    #[serde(default)]
    pub tau: Vec<Vec<i64>>,
    #[serde(default)]
    pub lambda: Vec<RootOfUnity>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GammaDoc {
    #[serde(default)]
    pub self_dual: Vec<Vec<i64>>,
    #[serde(default)]
    pub dual_pairs: Vec<[Vec<i64>; 2]>,
}

/// On-disk form of an [`InvolutionDatum`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatumDoc {
    #[serde(rename = "G")]
    pub group: String,
    pub tau: Vec<Vec<i64>>,
    pub g0: Vec<i64>,
    pub psi0: Psi0Doc,
    /// Rows are the images in `G` of the generators of `T`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Vec<Vec<i64>>>,
    pub gamma: GammaDoc,
    #[serde(default)]
    pub t_seq: Vec<Vec<i64>>,
    pub kind: FormKind,
}

fn flat_matrix(rows: &[Vec<i64>], k: usize, what: &str) -> Result<Vec<i64>> {
    if rows.len() != k || rows.iter().any(|r| r.len() != k) {
        return Err(Error::InvalidDatum(format!("{what} must be {k}x{k}")));
    }
    Ok(rows.concat())
}

impl DatumDoc {
    pub fn to_datum(&self) -> Result<InvolutionDatum> {
        let group = FinAbGroup::parse(&self.group)?;
        let tau = GroupMap::from_row_major(&group, &flat_matrix(&self.tau, group.rank(), "tau")?)?;
        let t = FinAbGroup::parse(&self.psi0.shape)?;
        let d_shape = if t.rank() == 0 {
            SymplecticShape::trivial()
        } else {
            SymplecticShape::from_group(&t)?
        };
        let t = d_shape.group().clone();
        let psi0_tau =
            GroupMap::from_row_major(&t, &flat_matrix(&self.psi0.tau, t.rank(), "psi0.tau")?)?;
        let lambda = if t.rank() == 0 {
            Vec::new()
        } else {
            self.psi0.lambda.clone()
        };
        let psi0 = HomMapData::anti(&d_shape, psi0_tau, lambda)?;
        let embedding = match &self.embedding {
            Some(rows) => rows
                .iter()
                .map(|r| group.elem(r))
                .collect::<Result<Vec<_>>>()?,
            None => default_embedding(&group, &t)?,
        };
        let elem = |v: &Vec<i64>| group.elem(v);
        Ok(InvolutionDatum {
            g0: group.elem(&self.g0)?,
            self_dual: self.gamma.self_dual.iter().map(elem).collect::<Result<_>>()?,
            dual_pairs: self
                .gamma
                .dual_pairs
                .iter()
                .map(|[a, b]| Ok((group.elem(a)?, group.elem(b)?)))
                .collect::<Result<_>>()?,
            t_seq: self.t_seq.iter().map(|v| t.elem(v)).collect::<Result<_>>()?,
            group,
            tau,
            psi0,
            d_shape,
            embedding,
            kind: self.kind,
        })
    }
}

pub fn parse_datum(json: &str) -> Result<InvolutionDatum> {
    let doc: DatumDoc = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    doc.to_datum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realize::realize_division_algebra;

    fn g(t: &FinAbGroup, v: &[i64]) -> GroupElem {
        t.elem(v).unwrap()
    }

    fn trivial_datum(
        group: &str,
        tau: &[i64],
        self_dual: &[&[i64]],
        pairs: &[(&[i64], &[i64])],
        kind: FormKind,
    ) -> InvolutionDatum {
        let grp = FinAbGroup::parse(group).unwrap();
        let d_shape = SymplecticShape::trivial();
        let t = d_shape.group().clone();
        InvolutionDatum {
            tau: GroupMap::from_row_major(&grp, tau).unwrap(),
            g0: grp.zero(),
            psi0: HomMapData::anti(&d_shape, GroupMap::identity(&t), Vec::new()).unwrap(),
            d_shape,
            embedding: Vec::new(),
            self_dual: self_dual.iter().map(|v| g(&grp, v)).collect(),
            dual_pairs: pairs.iter().map(|(a, b)| (g(&grp, a), g(&grp, b))).collect(),
            t_seq: vec![t.zero(); self_dual.len()],
            group: grp,
            kind,
        }
    }

    #[test]
    fn grading_degrees() {
        let z4 = FinAbGroup::parse("Z4").unwrap();
        let d = realize_division_algebra(&SymplecticShape::trivial()).unwrap();
        let gr = build_grading(&z4, &d, &[g(&z4, &[0]), g(&z4, &[1])], &[]).unwrap();
        assert_eq!(gr.degree(Cell { i: 0, j: 1, t: 0 }), g(&z4, &[3]));
        let z22 = FinAbGroup::parse("Z2^2").unwrap();
        let pd = realize_division_algebra(&SymplecticShape::pauli(2)).unwrap();
        let emb = default_embedding(&z22, pd.group()).unwrap();
        let gr = build_grading(&z22, &pd, &[z22.zero(), z22.zero()], &emb).unwrap();
        for c in gr.cells() {
            assert_eq!(gr.degree(c), pd.group().element_at(c.t));
        }
        assert!(build_grading(&z4, &pd, &[z4.zero()], &[z4.generator(0), z4.generator(0)]).is_err());
    }

    #[test]
    fn validate_examples() {
        let neg = trivial_datum("Z4", &[-1], &[&[0], &[1], &[3]], &[], FormKind::Orthogonal);
        assert!(validate_datum(&neg));
        let pair = trivial_datum("Z4", &[1], &[], &[(&[1], &[3])], FormKind::Orthogonal);
        assert!(validate_datum(&pair));
        let bad = trivial_datum("Z4", &[1], &[], &[(&[1], &[1])], FormKind::Orthogonal);
        assert!(!validate_datum(&bad));
        let symp = trivial_datum("Z4", &[-1], &[&[0]], &[], FormKind::Symplectic);
        assert!(!validate_datum(&symp));
    }

    #[test]
    fn phi_shapes_and_signs() {
        let d = realize_division_algebra(&SymplecticShape::trivial()).unwrap();
        let f = d.field_order();
        let orth = trivial_datum("Z4", &[1], &[], &[(&[1], &[3])], FormKind::Orthogonal);
        let phi = build_phi(&orth, &d).unwrap();
        let want = CycMatrix::from_fn(2, 2, f, |i, j| CycNum::from_int(f, (i != j) as i64)).unwrap();
        assert_eq!(phi, want);
        assert_eq!(form_epsilon_trivial(&phi), Ok(1));
        let symp = trivial_datum("Z4", &[1], &[], &[(&[1], &[3])], FormKind::Symplectic);
        let phi = build_phi(&symp, &d).unwrap();
        assert_eq!(phi.get(1, 0), &CycNum::from_int(f, -1));
        assert_eq!(form_epsilon_trivial(&phi), Ok(-1));
        let one = trivial_datum("Z4", &[-1], &[&[0]], &[], FormKind::Orthogonal);
        assert_eq!(build_phi(&one, &d).unwrap(), CycMatrix::identity(1, f));
    }

    #[test]
    fn symplectic_psi_on_units() {
        let d = realize_division_algebra(&SymplecticShape::trivial()).unwrap();
        let f = d.field_order();
        let symp = trivial_datum("Z4", &[1], &[], &[(&[1], &[3])], FormKind::Symplectic);
        let phi = build_phi(&symp, &d).unwrap();
        let psi = psi_from_phi(&phi, &d, &BasisMap::identity(&d)).unwrap();
        let unit = |i, j| {
            let mut m = CycMatrix::zeros(2, 2, f);
            m.set(i, j, CycNum::one(f));
            m
        };
        assert_eq!(psi.apply(&unit(0, 0)).unwrap(), unit(1, 1));
        assert_eq!(psi.apply(&unit(0, 1)).unwrap(), unit(0, 1).neg());
    }

    #[test]
    fn transpose_checks() {
        let z4 = FinAbGroup::parse("Z4").unwrap();
        let d = realize_division_algebra(&SymplecticShape::trivial()).unwrap();
        let id = BasisMap::identity(&d);
        let phi = CycMatrix::identity(2, d.field_order());
        let psi = psi_from_phi(&phi, &d, &id).unwrap();
        let gr = build_grading(&z4, &d, &[g(&z4, &[0]), g(&z4, &[1])], &[]).unwrap();
        assert!(verify_psi(&psi, &gr, &GroupMap::negation(&z4)).unwrap().ok());
        let check = verify_psi(&psi, &gr, &GroupMap::identity(&z4)).unwrap();
        assert!(check.involutive && check.anti_multiplicative && !check.homogeneous);
    }

    #[test]
    fn pauli_datum_round_trip() {
        let json = r#"{
            "G": "Z2^2",
            "tau": [[1,0],[0,1]],
            "g0": [0,0],
            "psi0": {"shape": "Z2^2", "tau": [[1,0],[0,1]],
                     "lambda": [{"M":8,"e":0},{"M":8,"e":0}]},
            "gamma": {"self_dual": [], "dual_pairs": [[[0,0],[0,0]]]},
            "t_seq": [],
            "kind": "orthogonal"
        }"#;
        let dat = parse_datum(json).unwrap();
        let rep = run_datum(&dat).unwrap();
        assert!(rep.ok(FormKind::Orthogonal), "{rep:?}");
    }

    #[test]
    fn scalar_cells_conjugate_psi0() {
        let json = r#"{
            "G": "Z2^2", "tau": [[1,0],[0,1]], "g0": [0,0],
            "psi0": {"shape": "Z2^2", "tau": [[1,0],[0,1]],
                     "lambda": [{"M":8,"e":0},{"M":8,"e":0}]},
            "gamma": {"self_dual": [[0,0]], "dual_pairs": []},
            "t_seq": [[0,0]], "kind": "orthogonal"
        }"#;
        let dat = parse_datum(json).unwrap();
        let d = dat.realize().unwrap();
        let psi0 = realize_hom_map(&d, &dat.psi0).unwrap();
        let phi = build_phi(&dat, &d).unwrap();
        let psi = psi_from_phi(&phi, &d, &psi0).unwrap();
        for x in d.basis() {
            assert_eq!(psi.apply(x).unwrap(), psi0.apply(&d, x).unwrap());
        }
    }
}
