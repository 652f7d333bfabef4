//! Concrete matrix realization of `F^σ T` for symplectically shaped `T`,
//! used as an independent oracle for the combinatorial deciders.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::abgroup::{FinAbGroup, GroupElem, GroupMap};
use crate::cocycle::SymplecticShape;
use crate::cyclotomic::{CycNum, RootOfUnity};
use crate::error::{Error, Result};
use crate::homog::{check_homogeneous_map, HomMapData, MapMode};

/// Dense matrix over `Q(ζ_M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycMatrix {
    rows: usize,
    cols: usize,
    order: u64,
    entries: Vec<CycNum>,
}

impl CycMatrix {
    pub fn zeros(rows: usize, cols: usize, order: u64) -> Self {
        CycMatrix {
            rows,
            cols,
            order,
            entries: vec![CycNum::zero(order); rows * cols],
        }
    }

    pub fn identity(n: usize, order: u64) -> Self {
        let mut m = Self::zeros(n, n, order);
        for i in 0..n {
            m.entries[i * n + i] = CycNum::one(order);
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        order: u64,
        mut f: impl FnMut(usize, usize) -> CycNum,
    ) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = f(i, j);
                if v.order() != order {
                    return Err(Error::OrderMismatch {
                        left: order,
                        right: v.order(),
                    });
                }
                entries.push(v);
            }
        }
        Ok(CycMatrix {
            rows,
            cols,
            order,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> &CycNum {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycNum) {
        assert_eq!(v.order(), self.order, "cyclotomic order mismatch");
        self.entries[i * self.cols + j] = v;
    }

    fn check_same(&self, other: &CycMatrix) -> Result<()> {
        if self.order != other.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok(())
    }

    /// Product, skipping zero entries on both sides.
    pub fn mul(&self, other: &CycMatrix) -> Result<CycMatrix> {
        self.check_same(other)?;
        if self.cols != other.rows {
            return Err(Error::MalformedMatrix(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = CycMatrix::zeros(self.rows, other.cols, self.order);
        let nz_other: Vec<Vec<usize>> = (0..other.rows)
            .map(|k| {
                (0..other.cols)
                    .filter(|&j| !other.get(k, j).is_zero())
                    .collect()
            })
            .collect();
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for &j in &nz_other[k] {
                    let prod = a * other.get(k, j);
                    out.entries[i * other.cols + j].add_assign_ref(&prod);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &CycMatrix) -> Result<CycMatrix> {
        self.check_same(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::MalformedMatrix("dimension mismatch in sum".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            if !b.is_zero() {
                a.add_assign_ref(b);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> CycMatrix {
        CycMatrix {
            entries: self.entries.iter().map(|e| -e).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, c: &CycNum) -> Result<CycMatrix> {
        if c.order() != self.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: c.order(),
            });
        }
        Ok(CycMatrix {
            entries: self
                .entries
                .iter()
                .map(|e| if e.is_zero() { e.clone() } else { e * c })
                .collect(),
            ..self.clone()
        })
    }

    pub fn transpose(&self) -> CycMatrix {
        let mut out = CycMatrix::zeros(self.cols, self.rows, self.order);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn trace(&self) -> CycNum {
        let mut acc = CycNum::zero(self.order);
        for i in 0..self.rows.min(self.cols) {
            acc.add_assign_ref(self.get(i, i));
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(CycNum::is_zero)
    }

    /// At most one nonzero entry in every row and every column.
    pub fn is_monomial(&self) -> bool {
        let row_ok = (0..self.rows)
            .all(|i| (0..self.cols).filter(|&j| !self.get(i, j).is_zero()).count() <= 1);
        let col_ok = (0..self.cols)
            .all(|j| (0..self.rows).filter(|&i| !self.get(i, j).is_zero()).count() <= 1);
        row_ok && col_ok
    }

    /// Inverse by Gauss-Jordan elimination, with a direct path for
    /// invertible monomial matrices.
    pub fn inverse(&self) -> Result<CycMatrix> {
        if self.rows != self.cols {
            return Err(Error::MalformedMatrix("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        if self.is_monomial() {
            let mut out = CycMatrix::zeros(n, n, self.order);
            for i in 0..n {
                let j = (0..n)
                    .find(|&j| !self.get(i, j).is_zero())
                    .ok_or(Error::SingularMatrix)?;
                out.set(j, i, self.get(i, j).inv()?);
            }
            return Ok(out);
        }
        let mut a = self.clone();
        let mut inv = CycMatrix::identity(n, self.order);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a.get(r, col).is_zero())
                .ok_or(Error::SingularMatrix)?;
            a.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            let p_inv = a.get(col, col).inv()?;
            a.scale_row(col, &p_inv);
            inv.scale_row(col, &p_inv);
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = -a.get(r, col);
                a.add_row_multiple(r, col, &f);
                inv.add_row_multiple(r, col, &f);
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        if r1 == r2 {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(r1 * self.cols + j, r2 * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, c: &CycNum) {
        for j in 0..self.cols {
            let e = &mut self.entries[r * self.cols + j];
            if !e.is_zero() {
                *e = &*e * c;
            }
        }
    }

    /// Row `target += f · row source`.
    fn add_row_multiple(&mut self, target: usize, source: usize, f: &CycNum) {
        for j in 0..self.cols {
            let s = &self.entries[source * self.cols + j];
            if s.is_zero() {
                continue;
            }
            let d = s * f;
            self.entries[target * self.cols + j].add_assign_ref(&d);
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CycMatrix) -> Result<CycMatrix> {
        self.check_same(other)?;
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = CycMatrix::zeros(r, c, self.order);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if b.is_zero() {
                            continue;
                        }
                        out.entries[(i * other.rows + k) * c + j * other.cols + l] = a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Assembles a square grid of equally sized blocks.
    pub fn from_blocks(blocks: &[Vec<CycMatrix>]) -> Result<CycMatrix> {
        let first = blocks
            .first()
            .and_then(|r| r.first())
            .ok_or_else(|| Error::MalformedMatrix("empty block grid".into()))?;
        let (br, bc, order) = (first.rows, first.cols, first.order);
        let grid_c = blocks[0].len();
        let mut out = CycMatrix::zeros(blocks.len() * br, grid_c * bc, order);
        for (bi, row) in blocks.iter().enumerate() {
            if row.len() != grid_c {
                return Err(Error::MalformedMatrix("ragged block grid".into()));
            }
            for (bj, b) in row.iter().enumerate() {
                if (b.rows, b.cols, b.order) != (br, bc, order) {
                    return Err(Error::MalformedMatrix("blocks differ in size".into()));
                }
                for i in 0..br {
                    for j in 0..bc {
                        out.entries[(bi * br + i) * out.cols + bj * bc + j] = b.get(i, j).clone();
                    }
                }
            }
        }
        Ok(out)
    }

    /// The `(bi, bj)` block of size `size × size`.
    pub fn block(&self, bi: usize, bj: usize, size: usize) -> CycMatrix {
        let mut out = CycMatrix::zeros(size, size, self.order);
        for i in 0..size {
            for j in 0..size {
                out.entries[i * size + j] = self.get(bi * size + i, bj * size + j).clone();
            }
        }
        out
    }
}

impl Serialize for CycMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<&[CycNum]> = self.entries.chunks(self.cols.max(1)).collect();
        let mut st = s.serialize_struct("CycMatrix", 4)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        st.serialize_field("M", &self.order)?;
        st.serialize_field("entries", &rows)?;
        st.end()
    }
}

/// `X = diag(ε^{ℓ-1}, …, ε, 1)` and the cyclic shift `Y`, satisfying
/// `X^ℓ = Y^ℓ = I` and `XY = εYX`. Entries live in `Q(ζ_M)`, `M = eps.order()`.
pub fn pauli_generators(l: usize, eps: RootOfUnity) -> Result<(CycMatrix, CycMatrix)> {
    if l == 0 || eps.multiplicative_order() != l as u64 {
        return Err(Error::InvalidArgument(format!(
            "epsilon must have multiplicative order {l}"
        )));
    }
    let m = eps.order();
    let mut x = CycMatrix::zeros(l, l, m);
    let mut y = CycMatrix::zeros(l, l, m);
    for i in 0..l {
        x.set(i, i, CycNum::zeta_pow(m, (eps.exp() * (l - 1 - i) as u64) as i64));
        y.set(i, (i + 1) % l, CycNum::one(m));
    }
    Ok((x, y))
}

/// `F^σ T` as `M_N(Q(ζ_F))` with its basis `X_g = ∏_c G_c^{g_c}`.
#[derive(Clone, Debug)]
pub struct RealizedAlgebra {
    shape: SymplecticShape,
    field_order: u64,
    size: usize,
    basis: Vec<CycMatrix>,
    inverses: Vec<CycMatrix>,
    generators: Vec<CycMatrix>,
}

/// `lcm(2, ℓ_1, …)`: the smallest field that holds every `ε_k` and `-1`.
pub fn minimal_field_order(shape: &SymplecticShape) -> u64 {
    shape.pairs().iter().fold(2u64, |acc, p| acc.lcm(&p.order))
}

/// Realizes over `Q(ζ_{2L})` for the exponent `L` of `T`.
pub fn realize_division_algebra(shape: &SymplecticShape) -> Result<RealizedAlgebra> {
    let f = shape
        .pairs()
        .iter()
        .fold(1u64, |acc, p| acc.lcm(&(2 * p.order)));
    realize_division_algebra_over(shape, f.max(2))
}

pub fn realize_division_algebra_over(
    shape: &SymplecticShape,
    field_order: u64,
) -> Result<RealizedAlgebra> {
    let pairs = shape.pairs();
    let size: usize = pairs.iter().map(|p| p.order as usize).product();
    let mut generators = Vec::with_capacity(2 * pairs.len());
    for (k, pair) in pairs.iter().enumerate() {
        let eps = shape.epsilon(k).restrict(field_order)?;
        let (x, y) = pauli_generators(pair.order as usize, eps)?;
        for g in [x, y] {
            let mut full = CycMatrix::identity(1, field_order);
            for (j, other) in pairs.iter().enumerate() {
                let factor = if j == k {
                    g.clone()
                } else {
                    CycMatrix::identity(other.order as usize, field_order)
                };
                full = full.kron(&factor)?;
            }
            generators.push(full);
        }
    }
    let t = shape.group();
    let mut basis = Vec::with_capacity(t.size() as usize);
    let mut inverses = Vec::with_capacity(t.size() as usize);
    for g in t.elements() {
        let mut x = CycMatrix::identity(size, field_order);
        for (c, &e) in g.residues().iter().enumerate() {
            for _ in 0..e {
                x = x.mul(&generators[c])?;
            }
        }
        inverses.push(x.inverse()?);
        basis.push(x);
    }
    Ok(RealizedAlgebra {
        shape: shape.clone(),
        field_order,
        size,
        basis,
        inverses,
        generators,
    })
}

impl RealizedAlgebra {
    pub fn shape(&self) -> &SymplecticShape {
        &self.shape
    }

    pub fn group(&self) -> &FinAbGroup {
        self.shape.group()
    }

    pub fn field_order(&self) -> u64 {
        self.field_order
    }

    /// Matrix size `N = √|T|`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn basis(&self) -> &[CycMatrix] {
        &self.basis
    }

    pub fn basis_matrix(&self, g: &GroupElem) -> &CycMatrix {
        &self.basis[self.group().index_of(g)]
    }

    pub fn generator_matrix(&self, c: usize) -> &CycMatrix {
        &self.generators[c]
    }

    /// The scalar `r` inside `Q(ζ_F)`.
    pub fn scalar(&self, r: RootOfUnity) -> Result<CycNum> {
        let r = r.restrict(self.field_order)?;
        Ok(CycNum::zeta_pow(self.field_order, r.exp() as i64))
    }

    /// Coordinates in the basis: `a_t = tr(X_t^{-1} A) / N`.
    pub fn coordinates(&self, a: &CycMatrix) -> Result<Vec<CycNum>> {
        let inv_n = BigRational::new(BigInt::from(1), BigInt::from(self.size as i64));
        self.inverses
            .iter()
            .map(|xi| Ok(trace_of_product(xi, a)?.scale(&inv_n)))
            .collect()
    }

    /// `Σ_t a_t X_t`.
    pub fn from_coordinates(&self, coords: &[CycNum]) -> Result<CycMatrix> {
        let mut acc = CycMatrix::zeros(self.size, self.size, self.field_order);
        for (c, x) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                acc = acc.add(&x.scale(c)?)?;
            }
        }
        Ok(acc)
    }

    /// `X_u X_v` as a sparse coordinate vector.
    pub fn product_coordinates(&self, u: usize, v: usize) -> Result<Vec<(usize, CycNum)>> {
        let p = self.basis[u].mul(&self.basis[v])?;
        Ok(self
            .coordinates(&p)?
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect())
    }
}

fn trace_of_product(a: &CycMatrix, b: &CycMatrix) -> Result<CycNum> {
    if a.cols != b.rows || a.rows != b.cols {
        return Err(Error::MalformedMatrix("trace of incompatible product".into()));
    }
    let mut acc = CycNum::zero(a.order);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(i, k);
            let y = b.get(k, i);
            if !x.is_zero() && !y.is_zero() {
                acc.add_assign_ref(&(x * y));
            }
        }
    }
    Ok(acc)
}

impl Serialize for RealizedAlgebra {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            g: &'a GroupElem,
            matrix: &'a CycMatrix,
        }
        let elems: Vec<GroupElem> = self.group().elements().collect();
        let basis: Vec<Entry> = elems
            .iter()
            .zip(&self.basis)
            .map(|(g, m)| Entry { g, matrix: m })
            .collect();
        let mut st = s.serialize_struct("RealizedAlgebra", 4)?;
        st.serialize_field("group", &self.group().descriptor())?;
        st.serialize_field("M", &self.field_order)?;
        st.serialize_field("size", &self.size)?;
        st.serialize_field("basis", &basis)?;
        st.end()
    }
}

/// A linear map on `F^σ T` given by the images of the basis `X_g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisMap {
    images: Vec<CycMatrix>,
}

impl BasisMap {
    pub fn identity(r: &RealizedAlgebra) -> Self {
        BasisMap {
            images: r.basis.clone(),
        }
    }

    pub fn images(&self) -> &[CycMatrix] {
        &self.images
    }

    /// Extends linearly through the coordinates of `a`.
    pub fn apply(&self, r: &RealizedAlgebra, a: &CycMatrix) -> Result<CycMatrix> {
        let coords = r.coordinates(a)?;
        let mut acc = CycMatrix::zeros(r.size, r.size, r.field_order);
        for (c, img) in coords.iter().zip(&self.images) {
            if !c.is_zero() {
                acc = acc.add(&img.scale(c)?)?;
            }
        }
        Ok(acc)
    }
}

/// `X_g ↦ λ_g X_{τ(g)}` with `λ_g` from the extension of the generator data.
/// Errors unless the data define a homogeneous map of the stated mode.
pub fn realize_hom_map(r: &RealizedAlgebra, m: &HomMapData) -> Result<BasisMap> {
    if !check_homogeneous_map(r.shape(), m) {
        return Err(match m.mode {
            MapMode::Anti => Error::NotHomogeneousAntiAutomorphism,
            MapMode::Auto => Error::NotHomogeneousMap,
        });
    }
    let table = crate::homog::lambda_table(r.shape(), m);
    let t = r.group();
    let images = t
        .elements()
        .zip(table)
        .map(|(g, l)| r.basis_matrix(&m.tau.apply(&g)).scale(&r.scalar(l)?))
        .collect::<Result<_>>()?;
    Ok(BasisMap { images })
}

/// Defines the map on generators as `G_c ↦ λ_c X_{τ(e_c)}` and extends it
/// (anti-)multiplicatively through `X_g = ∏ G_c^{g_c}` by matrix products,
/// without consulting any validity test.
pub fn extend_from_generators(
    r: &RealizedAlgebra,
    tau: &GroupMap,
    lambda: &[RootOfUnity],
    mode: MapMode,
) -> Result<BasisMap> {
    let t = r.group();
    if lambda.len() != t.rank() || tau.orders() != t.orders() {
        return Err(Error::ShapeMismatch("generator data do not fit T".into()));
    }
    let gen_images = (0..t.rank())
        .map(|c| {
            r.basis_matrix(&tau.image_of_generator(c))
                .scale(&r.scalar(lambda[c])?)
        })
        .collect::<Result<Vec<_>>>()?;
    // powers[c][k] = (image of G_c)^k
    let mut powers = Vec::with_capacity(t.rank());
    for (c, img) in gen_images.iter().enumerate() {
        let mut list = vec![CycMatrix::identity(r.size, r.field_order)];
        for k in 1..t.orders()[c] as usize {
            list.push(list[k - 1].mul(img)?);
        }
        powers.push(list);
    }
    let images = t
        .elements()
        .map(|g| {
            let mut acc = CycMatrix::identity(r.size, r.field_order);
            for (c, &e) in g.residues().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = &powers[c][e as usize];
                acc = match mode {
                    MapMode::Auto => acc.mul(p)?,
                    MapMode::Anti => p.mul(&acc)?,
                };
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(BasisMap { images })
}

/// Outcome of checking a [`BasisMap`] against the algebra structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MapProperties {
    /// `f(xy) = f(y)f(x)` (anti) or `f(x)f(y)` (auto) on all basis pairs.
    pub multiplicative: bool,
    /// Every `f(X_g)` is a nonzero multiple of `X_{τ(g)}`.
    pub homogeneous: bool,
    /// `f` is bijective; implied by the first two when `τ` is a bijection.
    pub bijective: bool,
}

impl MapProperties {
    pub fn ok(&self) -> bool {
        self.multiplicative && self.homogeneous && self.bijective
    }
}

/// Precomputed structure constants `X_u X_v = c · X_w`.
#[derive(Clone, Debug)]
pub struct ProductTable {
    entries: Vec<Vec<(usize, CycNum)>>,
}

impl ProductTable {
    pub fn new(r: &RealizedAlgebra) -> Result<Self> {
        let n = r.basis.len();
        let mut entries = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                entries.push(r.product_coordinates(u, v)?);
            }
        }
        Ok(ProductTable { entries })
    }

    pub fn get(&self, n: usize, u: usize, v: usize) -> &[(usize, CycNum)] {
        &self.entries[u * n + v]
    }
}

fn is_multiplicative(
    r: &RealizedAlgebra,
    products: &ProductTable,
    map: &BasisMap,
    mode: MapMode,
) -> Result<bool> {
    let n = r.basis.len();
    // generators first and the identity last, so failures surface early
    let t = r.group();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| {
        let w: u64 = t.element_at(i).residues().iter().sum();
        (w == 0, w, i)
    });
    for &u in &order {
        for &v in &order {
            let mut lhs = CycMatrix::zeros(r.size, r.size, r.field_order);
            for (w, c) in products.get(n, u, v) {
                lhs = lhs.add(&map.images[*w].scale(c)?)?;
            }
            let rhs = match mode {
                MapMode::Auto => map.images[u].mul(&map.images[v])?,
                MapMode::Anti => map.images[v].mul(&map.images[u])?,
            };
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `Some(hit)` with `hit[i]` set for every `i` in `τ(T)` when each `f(X_g)`
/// is a nonzero multiple of `X_{τ(g)}`.
fn homogeneous_support(r: &RealizedAlgebra, map: &BasisMap, tau: &GroupMap) -> Result<Option<Vec<bool>>> {
    let t = r.group();
    let mut support = vec![false; r.basis.len()];
    for (g, img) in t.elements().zip(&map.images) {
        let target = t.index_of(&tau.apply(&g));
        if !is_multiple_of(img, &r.basis[target])? {
            return Ok(None);
        }
        support[target] = true;
    }
    Ok(Some(support))
}

/// Every property, each checked in full.
pub fn map_properties(
    r: &RealizedAlgebra,
    products: &ProductTable,
    map: &BasisMap,
    tau: &GroupMap,
    mode: MapMode,
) -> Result<MapProperties> {
    let multiplicative = is_multiplicative(r, products, map, mode)?;
    let support = homogeneous_support(r, map, tau)?;
    let bijective = match &support {
        Some(hit) => hit.iter().all(|&s| s),
        None => rank_of_images(r, map)? == r.basis.len(),
    };
    Ok(MapProperties {
        multiplicative,
        homogeneous: support.is_some(),
        bijective,
    })
}

/// Multiplicativity of the given mode on all basis pairs, and `f(A_g) = A_{τ(g)}`
/// for every `g`. Stops at the first failure.
pub fn verify_map_properties(
    r: &RealizedAlgebra,
    products: &ProductTable,
    map: &BasisMap,
    tau: &GroupMap,
    mode: MapMode,
) -> Result<bool> {
    if !is_multiplicative(r, products, map, mode)? {
        return Ok(false);
    }
    Ok(homogeneous_support(r, map, tau)?.is_some_and(|hit| hit.iter().all(|&s| s)))
}

/// `a = c·x` for some nonzero scalar `c`, where `x` is invertible monomial.
fn is_multiple_of(a: &CycMatrix, x: &CycMatrix) -> Result<bool> {
    let Some(k) = x.entries.iter().position(|e| !e.is_zero()) else {
        return Ok(false);
    };
    if a.entries[k].is_zero() {
        return Ok(false);
    }
    let c = &a.entries[k] * &x.entries[k].inv()?;
    Ok(*a == x.scale(&c)?)
}

fn rank_of_images(r: &RealizedAlgebra, map: &BasisMap) -> Result<usize> {
    let n = r.basis.len();
    let rows = map
        .images
        .iter()
        .map(|img| r.coordinates(img))
        .collect::<Result<Vec<_>>>()?;
    let mut m = CycMatrix::from_fn(n, n, r.field_order, |i, j| rows[i][j].clone())?;
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..n).find(|&i| !m.get(i, col).is_zero()) else {
            continue;
        };
        m.swap_rows(p, rank);
        let inv = m.get(rank, col).inv()?;
        m.scale_row(rank, &inv);
        for i in 0..n {
            if i != rank && !m.get(i, col).is_zero() {
                let f = -m.get(i, col);
                m.add_row_multiple(i, rank, &f);
            }
        }
        rank += 1;
    }
    Ok(rank)
}

/// `f(f(X_g)) = X_g` for every basis element.
pub fn is_involutive(r: &RealizedAlgebra, map: &BasisMap) -> Result<bool> {
    for (x, img) in r.basis.iter().zip(&map.images) {
        if map.apply(r, img)? != *x {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Solves `Φ A_c = X_c^t Φ` for every generator `c`, where `A_c` is the
/// image of `G_c` under an anti-automorphism given on generators. All
/// matrices involved must be monomial; the solution space must be a line.
pub fn intertwiner(r: &RealizedAlgebra, gen_images: &[CycMatrix]) -> Result<CycMatrix> {
    let n = r.size;
    let f = r.field_order;
    let mut uf = WeightedUnionFind::new(n * n, f);
    for (c, a) in gen_images.iter().enumerate() {
        let x = &r.generators[c];
        if !a.is_monomial() || !x.is_monomial() {
            return Err(Error::InvalidArgument("intertwiner needs monomial generators".into()));
        }
        // (Φ A)_{ij} = Φ_{i,k1} A_{k1,j};  (X^t Φ)_{ij} = X_{k2,i} Φ_{k2,j}.
        for i in 0..n {
            for j in 0..n {
                let k1 = (0..n).find(|&k| !a.get(k, j).is_zero());
                let k2 = (0..n).find(|&k| !x.get(k, i).is_zero());
                let (Some(k1), Some(k2)) = (k1, k2) else {
                    return Err(Error::SingularMatrix);
                };
                uf.relate(
                    i * n + k1,
                    a.get(k1, j),
                    k2 * n + j,
                    x.get(k2, i),
                )?;
            }
        }
    }
    let free: Vec<usize> = (0..n * n)
        .filter(|&v| uf.find(v).0 == v && !uf.zero[v])
        .collect();
    if free.len() != 1 {
        return Err(Error::InvalidArgument(format!(
            "intertwiner space has dimension {}",
            free.len()
        )));
    }
    let mut phi = CycMatrix::zeros(n, n, f);
    for v in 0..n * n {
        let (root, w) = uf.find(v);
        if root == free[0] {
            phi.set(v / n, v % n, w);
        }
    }
    Ok(phi)
}

/// Union-find over variables with `x_v = w_v · x_{root(v)}`.
struct WeightedUnionFind {
    parent: Vec<usize>,
    weight: Vec<CycNum>,
    zero: Vec<bool>,
}

impl WeightedUnionFind {
    fn new(n: usize, order: u64) -> Self {
        WeightedUnionFind {
            parent: (0..n).collect(),
            weight: vec![CycNum::one(order); n],
            zero: vec![false; n],
        }
    }

    fn find(&mut self, v: usize) -> (usize, CycNum) {
        let p = self.parent[v];
        if p == v {
            return (v, self.weight[v].clone());
        }
        let (root, wp) = self.find(p);
        let w = &self.weight[v] * &wp;
        self.parent[v] = root;
        self.weight[v] = w.clone();
        (root, w)
    }

    /// Records `α x_u = β x_v`.
    fn relate(&mut self, u: usize, alpha: &CycNum, v: usize, beta: &CycNum) -> Result<()> {
        let (ru, wu) = self.find(u);
        let (rv, wv) = self.find(v);
        let lhs = alpha * &wu;
        let rhs = beta * &wv;
        if ru == rv {
            if lhs != rhs {
                self.zero[ru] = true;
            }
            return Ok(());
        }
        // x_ru = (β w_v / (α w_u)) x_rv
        self.weight[ru] = &rhs * &lhs.inv()?;
        self.parent[ru] = rv;
        self.zero[rv] = self.zero[rv] || self.zero[ru];
        Ok(())
    }
}

/// Tallies from [`soundness_oracle`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SoundnessReport {
    pub n: u64,
    pub candidates: usize,
    pub accepted: usize,
    pub rejected_checked: usize,
    /// Accepted data whose realized map fails a property, or whose
    /// generator extension differs from the λ-table map.
    pub accepted_failures: usize,
    /// Rejected data whose realized map nevertheless passes.
    pub rejected_passes: usize,
    pub involutions_checked: usize,
    pub involution_mismatches: usize,
}

impl SoundnessReport {
    pub fn ok(&self) -> bool {
        self.accepted_failures == 0 && self.rejected_passes == 0 && self.involution_mismatches == 0
    }
}

/// Runs every `τ ∈ M_2(ℤ_n)` and `λ ∈ μ_{2n}^2`, in both modes, through
/// [`check_homogeneous_map`] and compares against the realized map built
/// from generators. Every accepted candidate is checked; every
/// `rejected_stride`-th rejected one is.
pub fn soundness_oracle(n: u64, rejected_stride: usize) -> Result<SoundnessReport> {
    let shape = SymplecticShape::pauli(n);
    let t = shape.group().clone();
    let r = realize_division_algebra(&shape)?;
    let products = ProductTable::new(&r)?;
    let amb = shape.ambient();
    let roots: Vec<RootOfUnity> = (0..2 * n)
        .map(|e| RootOfUnity::new(2 * n, e as i64).lift(amb))
        .collect::<Result<_>>()?;
    let mut rep = SoundnessReport {
        n,
        ..Default::default()
    };
    let mut rejected_seen = 0usize;
    let ni = n as i64;
    for code in 0..ni.pow(4) {
        let entries = [code % ni, code / ni % ni, code / ni.pow(2) % ni, code / ni.pow(3)];
        let tau = GroupMap::from_row_major(&t, &entries)?;
        for mode in [MapMode::Anti, MapMode::Auto] {
            for la in &roots {
                for lb in &roots {
                    let m = HomMapData::new(&shape, tau.clone(), vec![*la, *lb], mode)?;
                    rep.candidates += 1;
                    let accepted = check_homogeneous_map(&shape, &m);
                    if !accepted {
                        rejected_seen += 1;
                        if !(rejected_seen - 1).is_multiple_of(rejected_stride.max(1)) {
                            continue;
                        }
                    }
                    let ext = extend_from_generators(&r, &tau, &m.lambda, mode)?;
                    let passes = verify_map_properties(&r, &products, &ext, &tau, mode)?;
                    if accepted {
                        rep.accepted += 1;
                        if !passes || realize_hom_map(&r, &m)? != ext {
                            rep.accepted_failures += 1;
                        }
                        if mode == MapMode::Anti {
                            rep.involutions_checked += 1;
                            if crate::homog::check_involution(&shape, &m)? != is_involutive(&r, &ext)? {
                                rep.involution_mismatches += 1;
                            }
                        }
                    } else {
                        rep.rejected_checked += 1;
                        if passes {
                            rep.rejected_passes += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Sign `±1` of the form attached to an anti-automorphic involution of
/// `F^σ T`: `+1` orthogonal, `-1` symplectic.
pub fn involution_form_sign(shape: &SymplecticShape, m: &HomMapData) -> Result<i8> {
    if m.mode != MapMode::Anti {
        return Err(Error::NotHomogeneousAntiAutomorphism);
    }
    let field = m
        .lambda
        .iter()
        .fold(minimal_field_order(shape), |acc, l| {
            acc.lcm(&l.multiplicative_order())
        });
    let r = realize_division_algebra_over(shape, field)?;
    let gen_images = (0..shape.rank())
        .map(|c| {
            r.basis_matrix(&m.tau.image_of_generator(c))
                .scale(&r.scalar(m.lambda[c])?)
        })
        .collect::<Result<Vec<_>>>()?;
    let phi = intertwiner(&r, &gen_images)?;
    crate::secthree::form_epsilon_trivial(&phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homog::check_involution;

    fn algebra(n: u64) -> RealizedAlgebra {
        realize_division_algebra(&SymplecticShape::pauli(n)).unwrap()
    }

    #[test]
    fn pauli_relations() {
        for l in 2..6usize {
            let eps = RootOfUnity::primitive(l as u64);
            let (x, y) = pauli_generators(l, eps).unwrap();
            let e = CycNum::zeta_pow(l as u64, 1);
            assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap().scale(&e).unwrap());
            let mut xp = CycMatrix::identity(l, l as u64);
            let mut yp = xp.clone();
            for _ in 0..l {
                xp = xp.mul(&x).unwrap();
                yp = yp.mul(&y).unwrap();
            }
            assert_eq!(xp, CycMatrix::identity(l, l as u64));
            assert_eq!(yp, CycMatrix::identity(l, l as u64));
        }
        assert!(pauli_generators(4, RootOfUnity::new(4, 2)).is_err());
    }

    #[test]
    fn products_match_sigma() {
        for n in [2, 3, 4] {
            let shape = SymplecticShape::pauli(n);
            let r = algebra(n);
            let t = shape.group();
            for u in t.elements() {
                for v in t.elements() {
                    let p = r.basis_matrix(&u).mul(r.basis_matrix(&v)).unwrap();
                    let s = r.scalar(shape.sigma(&u, &v)).unwrap();
                    let expect = r.basis_matrix(&t.add(&u, &v)).scale(&s).unwrap();
                    assert_eq!(p, expect);
                }
            }
        }
    }

    #[test]
    fn coordinates_round_trip() {
        let r = algebra(3);
        let coords: Vec<CycNum> = (0..9)
            .map(|i| CycNum::zeta_pow(r.field_order(), i as i64 * 2 + 1))
            .collect();
        let a = r.from_coordinates(&coords).unwrap();
        assert_eq!(r.coordinates(&a).unwrap(), coords);
    }

    #[test]
    fn inverse_general() {
        let m = 6;
        let a = CycMatrix::from_fn(3, 3, m, |i, j| {
            CycNum::zeta_pow(m, (i * j) as i64).try_add(&CycNum::from_int(m, (i + j) as i64)).unwrap()
        })
        .unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), CycMatrix::identity(3, m));
        let singular = CycMatrix::zeros(2, 2, m);
        assert_eq!(singular.inverse(), Err(Error::SingularMatrix));
    }

    #[test]
    fn hom_map_routes_agree() {
        let shape = SymplecticShape::pauli(2);
        let r = algebra(2);
        let products = ProductTable::new(&r).unwrap();
        let t = shape.group();
        let tau = GroupMap::from_row_major(t, &[1, 0, 1, 1]).unwrap();
        let lambda = vec![RootOfUnity::new(8, 2), RootOfUnity::one(8)];
        let m = HomMapData::anti(&shape, tau.clone(), lambda).unwrap();
        assert!(check_homogeneous_map(&shape, &m));
        let direct = realize_hom_map(&r, &m).unwrap();
        let ext = extend_from_generators(&r, &tau, &m.lambda, MapMode::Anti).unwrap();
        assert_eq!(direct, ext);
        let props = map_properties(&r, &products, &ext, &tau, MapMode::Anti).unwrap();
        assert!(props.ok());
        assert_eq!(
            is_involutive(&r, &ext).unwrap(),
            check_involution(&shape, &m).unwrap()
        );
    }

    #[test]
    fn invalid_map_rejected() {
        let shape = SymplecticShape::pauli(3);
        let r = algebra(3);
        let products = ProductTable::new(&r).unwrap();
        let tau = GroupMap::identity(shape.group());
        let lambda = vec![RootOfUnity::one(18); 2];
        let m = HomMapData::anti(&shape, tau.clone(), lambda).unwrap();
        assert_eq!(
            realize_hom_map(&r, &m),
            Err(Error::NotHomogeneousAntiAutomorphism)
        );
        let ext = extend_from_generators(&r, &tau, &m.lambda, MapMode::Anti).unwrap();
        let props = map_properties(&r, &products, &ext, &tau, MapMode::Anti).unwrap();
        assert!(!props.multiplicative);
        let auto = extend_from_generators(&r, &tau, &m.lambda, MapMode::Auto).unwrap();
        assert!(verify_map_properties(&r, &products, &auto, &tau, MapMode::Auto).unwrap());
    }

    #[test]
    fn oracle_small() {
        let rep = soundness_oracle(2, 1).unwrap();
        assert!(rep.ok(), "{rep:?}");
        assert_eq!(rep.candidates, 16 * 2 * 16);
        assert!(rep.accepted > 0 && rep.involutions_checked > 0);
    }

    #[test]
    fn transpose_sign_on_pauli() {
        // X_a ↦ X_a, X_b ↦ X_b is an orthogonal involution of M_2.
        let shape = SymplecticShape::pauli(2);
        let t = shape.group();
        let tau = GroupMap::identity(t);
        let m = HomMapData::anti(&shape, tau, vec![RootOfUnity::one(8); 2]).unwrap();
        assert!(check_homogeneous_map(&shape, &m));
        assert_eq!(involution_form_sign(&shape, &m).unwrap(), 1);
        // X_a ↦ -X_a, X_b ↦ -X_b: the symplectic involution.
        let m = HomMapData::anti(
            &shape,
            GroupMap::identity(t),
            vec![RootOfUnity::minus_one(8); 2],
        )
        .unwrap();
        assert_eq!(involution_form_sign(&shape, &m).unwrap(), -1);
    }
}
