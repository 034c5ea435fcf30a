//! The left regular representation as dense matrices over GF(p^k), plus the
//! exact linear algebra every downstream construction consumes: rank, kernel,
//! minimal polynomial (per-vector Krylov relations + lcm), and
//! generalized-eigenspace projectors assembled by polynomial CRT.
//!
//! Matrices are row-major flat buffers of field-element limbs; Gaussian
//! elimination picks the first nonzero pivot (the field is exact, there are
//! no stability concerns).

use std::collections::HashMap;

use crate::gf::{FieldCtx, FieldElement, Polynomial};
use crate::hecke::{AlgebraElement, AlgebraParams, NormalWord};
use crate::{Error, Result};

/// Default refusal threshold for the regular-representation dimension.
pub const DEFAULT_SIZE_CAP: u64 = 5000;

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

/// A square matrix over GF(p^k), stored row-major as `dim * dim * k` limbs.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    ctx: FieldCtx,
    dim: usize,
    data: Vec<u64>,
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.dim, self.dim, self.ctx)?;
        for i in 0..self.dim {
            write!(f, "  [")?;
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zero(ctx: &FieldCtx, dim: usize) -> Matrix {
        Matrix {
            ctx: ctx.clone(),
            dim,
            data: vec![0; dim * dim * ctx.k()],
        }
    }

    pub fn identity(ctx: &FieldCtx, dim: usize) -> Matrix {
        let mut m = Matrix::zero(ctx, dim);
        let one = ctx.one();
        for i in 0..dim {
            m.set(i, i, &one);
        }
        m
    }

    pub fn from_fn(ctx: &FieldCtx, dim: usize, f: impl Fn(usize, usize) -> FieldElement) -> Matrix {
        let mut m = Matrix::zero(ctx, dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, &f(i, j));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    #[inline]
    fn off(&self, i: usize, j: usize) -> usize {
        (i * self.dim + j) * self.ctx.k()
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        let o = self.off(i, j);
        self.ctx.from_coeffs(&self.data[o..o + self.ctx.k()])
    }

    pub fn set(&mut self, i: usize, j: usize, v: &FieldElement) {
        let o = self.off(i, j);
        let k = self.ctx.k();
        self.data[o..o + k].copy_from_slice(v.coeffs());
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(&self.ctx, self.dim)
    }

    /// Raw limb buffer, used for canonical hashing of power sequences.
    pub fn raw_data(&self) -> &[u64] {
        &self.data
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        let k = self.ctx.k();
        for (a, b) in out.data.chunks_mut(k).zip(rhs.data.chunks(k)) {
            self.ctx.sl_add(a, b);
        }
        out
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        let k = self.ctx.k();
        for (a, b) in out.data.chunks_mut(k).zip(rhs.data.chunks(k)) {
            self.ctx.sl_sub(a, b);
        }
        out
    }

    pub fn scale(&self, c: &FieldElement) -> Matrix {
        let mut out = Matrix::zero(&self.ctx, self.dim);
        let k = self.ctx.k();
        for (o, a) in out.data.chunks_mut(k).zip(self.data.chunks(k)) {
            self.ctx.sl_mul(o, a, c.coeffs());
        }
        out
    }

    pub fn mat_mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        assert!(self.ctx == rhs.ctx, "field context mismatch");
        let d = self.dim;
        let k = self.ctx.k();
        let mut out = Matrix::zero(&self.ctx, d);
        if k == 1 {
            // Prime-field fast path: accumulate rows in u128, reduce once.
            let p = self.ctx.p() as u128;
            for i in 0..d {
                for j in 0..d {
                    let mut acc: u128 = 0;
                    for l in 0..d {
                        acc += self.data[i * d + l] as u128 * rhs.data[l * d + j] as u128;
                    }
                    out.data[i * d + j] = (acc % p) as u64;
                }
            }
            return out;
        }
        for i in 0..d {
            for l in 0..d {
                let a = &self.data[self.off(i, l)..self.off(i, l) + k];
                if a.iter().all(|&x| x == 0) {
                    continue;
                }
                for j in 0..d {
                    let bo = rhs.off(l, j);
                    let b = &rhs.data[bo..bo + k];
                    let oo = out.off(i, j);
                    // Split borrow: out.data is disjoint from self/rhs.
                    let acc = &mut out.data[oo..oo + k];
                    self.ctx.sl_mul_acc(acc, a, b);
                }
            }
        }
        out
    }

    /// Binary powering; `pow(0)` is the identity.
    pub fn pow(&self, mut m: u64) -> Matrix {
        let mut result = Matrix::identity(&self.ctx, self.dim);
        let mut base = self.clone();
        while m > 0 {
            if m & 1 == 1 {
                result = result.mat_mul(&base);
            }
            m >>= 1;
            if m > 0 {
                base = base.mat_mul(&base);
            }
        }
        result
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                let mut acc = self.ctx.zero();
                for (j, x) in v.iter().enumerate() {
                    acc = &acc + &(&self.get(i, j) * x);
                }
                acc
            })
            .collect()
    }

    /// Row-echelon rank.
    pub fn rank(&self) -> usize {
        let (rank, _, _) = self.rref();
        rank
    }

    /// Reduced row echelon form; returns (rank, rref rows, pivot columns).
    fn rref(&self) -> (usize, Vec<Vec<FieldElement>>, Vec<usize>) {
        let d = self.dim;
        let mut rows: Vec<Vec<FieldElement>> = (0..d)
            .map(|i| (0..d).map(|j| self.get(i, j)).collect())
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0usize;
        for col in 0..d {
            let Some(pr) = (rank..d).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(rank, pr);
            let inv = rows[rank][col].inv().unwrap();
            for x in rows[rank].iter_mut() {
                *x = &*x * &inv;
            }
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && !row[col].is_zero() {
                    let f = row[col].clone();
                    for (x, pc) in row.iter_mut().zip(pivot_row.iter()) {
                        let sub = pc * &f;
                        *x = &*x - &sub;
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        (rank, rows, pivots)
    }

    /// Basis of the right kernel `{v : Mv = 0}` in reduced echelon form.
    pub fn kernel_basis(&self) -> Vec<Vec<FieldElement>> {
        let d = self.dim;
        let (_, rows, pivots) = self.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut out = Vec::new();
        for free in (0..d).filter(|c| !pivot_set.contains(c)) {
            let mut v = vec![self.ctx.zero(); d];
            v[free] = self.ctx.one();
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = -&rows[ri][free];
            }
            out.push(v);
        }
        out
    }

    /// Minimal polynomial, via per-vector Krylov minimal relations and lcm
    /// over the standard basis vectors. Monic; degree at most `dim`.
    pub fn min_poly(&self) -> Polynomial {
        let d = self.dim;
        let mut acc = Polynomial::one(&self.ctx);
        for start in 0..d {
            if acc.degree() == Some(d) {
                break;
            }
            let mut v0 = vec![self.ctx.zero(); d];
            v0[start] = self.ctx.one();
            let g = self.vector_min_poly(&v0);
            acc = poly_lcm(&acc, &g);
        }
        acc
    }

    /// Minimal monic polynomial annihilating the Krylov sequence of `v0`.
    fn vector_min_poly(&self, v0: &[FieldElement]) -> Polynomial {
        let mut ech = KrylovEchelon::new(&self.ctx);
        let mut w = v0.to_vec();
        loop {
            if let Some(poly) = ech.offer(&w) {
                return poly;
            }
            w = self.apply(&w);
            assert!(
                ech.steps() <= self.dim,
                "Krylov sequence failed to close; bug"
            );
        }
    }

    /// Evaluates a polynomial at this matrix (Horner).
    pub fn poly_at(&self, poly: &Polynomial) -> Matrix {
        let mut acc = Matrix::zero(&self.ctx, self.dim);
        for c in poly.coeffs().iter().rev() {
            acc = self.mat_mul(&acc);
            for i in 0..self.dim {
                acc.set(i, i, &(&acc.get(i, i) + c));
            }
        }
        acc
    }

    /// Debug export: array of rows of serialized field elements.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = (0..self.dim)
            .map(|i| {
                serde_json::Value::from(
                    (0..self.dim)
                        .map(|j| self.get(i, j).to_json())
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        serde_json::Value::from(rows)
    }
}

fn poly_lcm(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() || b.is_zero() {
        return Polynomial::zero(a.ctx());
    }
    let (g, _, _) = Polynomial::xgcd(a, b).expect("inputs are nonzero");
    (a * b).divmod(&g).0.monic()
}

/// Incremental echelon over a Krylov sequence `v, Mv, M^2 v, ...` that
/// tracks the combination coefficients of each reduced vector. Feeding the
/// next sequence member returns the minimal monic annihilating polynomial as
/// soon as a linear dependence appears.
pub(crate) struct KrylovEchelon {
    ctx: FieldCtx,
    rows: Vec<(usize, Vec<FieldElement>, Vec<FieldElement>)>,
    step: usize,
}

impl KrylovEchelon {
    pub(crate) fn new(ctx: &FieldCtx) -> KrylovEchelon {
        KrylovEchelon {
            ctx: ctx.clone(),
            rows: Vec::new(),
            step: 0,
        }
    }

    pub(crate) fn steps(&self) -> usize {
        self.step
    }

    /// Offers the next Krylov vector; `Some(p)` means `p(M) v0 = 0` with `p`
    /// monic of degree `steps()`.
    pub(crate) fn offer(&mut self, v: &[FieldElement]) -> Option<Polynomial> {
        let mut cand = v.to_vec();
        let mut combo = vec![self.ctx.zero(); self.step + 1];
        combo[self.step] = self.ctx.one();
        for (pivot, u, ucombo) in &self.rows {
            if cand[*pivot].is_zero() {
                continue;
            }
            let f = cand[*pivot].clone();
            for (c, uu) in cand.iter_mut().zip(u.iter()) {
                let sub = uu * &f;
                *c = &*c - &sub;
            }
            for (i, uc) in ucombo.iter().enumerate() {
                let sub = uc * &f;
                combo[i] = &combo[i] - &sub;
            }
        }
        match cand.iter().position(|x| !x.is_zero()) {
            None => Some(Polynomial::from_coeffs(&self.ctx, combo)),
            Some(pivot) => {
                let inv = cand[pivot].inv().unwrap();
                for c in cand.iter_mut() {
                    *c = &*c * &inv;
                }
                for c in combo.iter_mut() {
                    *c = &*c * &inv;
                }
                self.rows.push((pivot, cand, combo));
                self.step += 1;
                None
            }
        }
    }
}

/// Smallest `s >= 1` with `M^s = 0`, or None when `M` is not nilpotent
/// (a nilpotent `dim x dim` matrix vanishes by the `dim`-th power).
pub fn nilpotency_index(m: &Matrix) -> Option<u64> {
    let mut power = m.clone();
    for s in 1..=m.dim().max(1) as u64 {
        if power.is_zero() {
            return Some(s);
        }
        power = power.mat_mul(m);
    }
    None
}

/// Projector onto the generalized eigenspace of `eigen`: with
/// `min_poly = (x - eigen)^m * h`, `h(eigen) != 0`, returns `g(M)` for the
/// CRT solution `g = 1 mod (x - eigen)^m`, `g = 0 mod h`. Idempotent and
/// commuting with `M`; the zero matrix when `eigen` is not a root.
pub fn crt_projector(m: &Matrix, eigen: &FieldElement) -> Matrix {
    let minp = m.min_poly();
    crt_projector_with_min_poly(m, &minp, eigen)
}

/// As [`crt_projector`], reusing a precomputed minimal polynomial.
pub fn crt_projector_with_min_poly(
    m: &Matrix,
    min_poly: &Polynomial,
    eigen: &FieldElement,
) -> Matrix {
    let ctx = m.ctx();
    let (mult, cofactor) = min_poly.root_multiplicity(eigen);
    if mult == 0 {
        return Matrix::zero(ctx, m.dim());
    }
    if cofactor.degree() == Some(0) {
        // Single generalized eigenspace: the projector is the identity.
        return Matrix::identity(ctx, m.dim());
    }
    let linear = Polynomial::from_coeffs(ctx, vec![-eigen, ctx.one()]);
    let primary = linear.pow(mult as u64);
    let (g, _, v) = Polynomial::xgcd(&primary, &cofactor).expect("nonzero");
    debug_assert_eq!(g.degree(), Some(0), "factors are coprime");
    // v * cofactor = 1 - u * (x - eigen)^mult: 1 on the target block, 0 off it.
    let proj_poly = (&v * &cofactor).rem(min_poly);
    m.poly_at(&proj_poly)
}

// ---------------------------------------------------------------------------
// Regular representation
// ---------------------------------------------------------------------------

/// The algebra acting on itself by left multiplication: the ordered normal
/// word basis plus the matrices of every generator. Immutable after build.
pub struct RegularRep {
    params: AlgebraParams,
    basis: Vec<NormalWord>,
    index: HashMap<NormalWord, usize>,
    gens_t: Vec<Matrix>,
    gens_x: Vec<Matrix>,
}

impl RegularRep {
    /// Builds the representation; refuses dimensions above the cap
    /// (default [`DEFAULT_SIZE_CAP`]).
    pub fn build(params: &AlgebraParams, size_cap: Option<u64>) -> Result<RegularRep> {
        let cap = size_cap.unwrap_or(DEFAULT_SIZE_CAP);
        let dim = params.dim().unwrap_or(u64::MAX);
        if dim > cap {
            return Err(Error::SizeCapExceeded { dim, cap });
        }
        let basis = params.basis();
        let index: HashMap<NormalWord, usize> = basis
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        let mut rep = RegularRep {
            params: params.clone(),
            basis,
            index,
            gens_t: Vec::new(),
            gens_x: Vec::new(),
        };
        for r in 1..params.n() {
            let g = AlgebraElement::gen_t(params, r)?;
            rep.gens_t.push(rep.to_matrix(&g));
        }
        for r in 1..=params.n() {
            let g = AlgebraElement::gen_x(params, r)?;
            rep.gens_x.push(rep.to_matrix(&g));
        }
        Ok(rep)
    }

    pub fn params(&self) -> &AlgebraParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[NormalWord] {
        &self.basis
    }

    /// Matrix of left multiplication by `T_r`.
    pub fn gen_t_matrix(&self, r: usize) -> &Matrix {
        &self.gens_t[r - 1]
    }

    /// Matrix of left multiplication by `X_r`.
    pub fn gen_x_matrix(&self, r: usize) -> &Matrix {
        &self.gens_x[r - 1]
    }

    /// Matrix of left multiplication: column `j` holds the coordinates of
    /// `a * basis[j]`.
    pub fn to_matrix(&self, a: &AlgebraElement) -> Matrix {
        assert!(a.params() == &self.params, "parameter mismatch");
        let ctx = self.params.field();
        let mut m = Matrix::zero(ctx, self.basis.len());
        for (j, b) in self.basis.iter().enumerate() {
            let prod = a * &AlgebraElement::monomial(&self.params, b.clone());
            for (word, c) in prod.terms() {
                let i = *self.index.get(word).expect("closure violation");
                m.set(i, j, c);
            }
        }
        m
    }

    /// Reads an element off a matrix in the image of the representation: the
    /// column over the basis word `1` lists the coordinates of `a * 1 = a`.
    /// Total on all matrices; meaningful only on the image.
    pub fn from_action_on_one(&self, m: &Matrix) -> AlgebraElement {
        let j = *self
            .index
            .get(&NormalWord::identity(self.params.n()))
            .expect("identity word is always in the basis");
        let mut out = AlgebraElement::zero(&self.params);
        for (i, word) in self.basis.iter().enumerate() {
            let c = m.get(i, j);
            if !c.is_zero() {
                out = &out + &AlgebraElement::monomial(&self.params, word.clone()).scale(&c);
            }
        }
        out
    }

    /// Evaluates every defining relation (and the cyclotomic relation) as a
    /// matrix identity. All entries must pass on a sound build; the fixture
    /// hook [`RegularRep::corrupt_for_mutation_testing`] exists to show the
    /// checks can fail.
    pub fn relation_check(&self) -> RelationReport {
        let params = &self.params;
        let n = params.n();
        let ctx = params.field();
        let d = self.dim();
        let ident = Matrix::identity(ctx, d);
        let mut checks = Vec::new();
        let mut push = |name: String, pass: bool| checks.push(RelationCheck { name, pass });

        let deg = params.is_degenerate();
        let q = params.q();
        let q_minus_1 = q - &ctx.one();

        for r in 1..n {
            let t = self.gen_t_matrix(r);
            let tt = t.mat_mul(t);
            if deg {
                push(format!("s{r}^2 = 1"), tt == ident);
            } else {
                let rhs = t.scale(&q_minus_1).add(&ident.scale(q));
                push(format!("T{r}^2 = (q-1)T{r} + q"), tt == rhs);
            }
        }
        for r in 1..n {
            let t = self.gen_t_matrix(r);
            let xr = self.gen_x_matrix(r);
            let xr1 = self.gen_x_matrix(r + 1);
            if deg {
                // s_r x_{r+1} = x_r s_r + 1
                let lhs = t.mat_mul(xr1);
                let rhs = xr.mat_mul(t).add(&ident);
                push(format!("s{r} x{} = x{r} s{r} + 1", r + 1), lhs == rhs);
            } else {
                // T_r X_r T_r = q X_{r+1}
                let lhs = t.mat_mul(xr).mat_mul(t);
                push(
                    format!("T{r} X{r} T{r} = q X{}", r + 1),
                    lhs == xr1.scale(q),
                );
            }
        }
        for r in 1..n {
            let t = self.gen_t_matrix(r);
            for s in 1..=n {
                if s == r || s == r + 1 {
                    continue;
                }
                let x = self.gen_x_matrix(s);
                push(
                    format!("{}{r} X{s} = X{s} {}{r}", tname(deg), tname(deg)),
                    t.mat_mul(x) == x.mat_mul(t),
                );
            }
        }
        for r in 1..n {
            for s in r + 1..n {
                let a = self.gen_t_matrix(r);
                let b = self.gen_t_matrix(s);
                if s == r + 1 {
                    push(
                        format!("braid {}{r},{}{s}", tname(deg), tname(deg)),
                        a.mat_mul(b).mat_mul(a) == b.mat_mul(a).mat_mul(b),
                    );
                } else {
                    push(
                        format!("{}{r} {}{s} commute", tname(deg), tname(deg)),
                        a.mat_mul(b) == b.mat_mul(a),
                    );
                }
            }
        }
        for r in 1..=n {
            for s in r + 1..=n {
                let a = self.gen_x_matrix(r);
                let b = self.gen_x_matrix(s);
                push(format!("X{r} X{s} commute"), a.mat_mul(b) == b.mat_mul(a));
            }
        }
        // Cyclotomic relation on X_1.
        let mut prod = ident.clone();
        let x1 = self.gen_x_matrix(1);
        for &c in params.kappa() {
            let shift = ident.scale(&params.residue_value(c));
            prod = prod.mat_mul(&x1.sub(&shift));
        }
        push("cyclotomic relation on X1".to_string(), prod.is_zero());

        RelationReport { checks }
    }

    /// Test fixture: damages one entry of the last Jucys-Murphy generator
    /// matrix so both the relation checks and the construction-agreement
    /// gates demonstrably fail. Never called on the verify path.
    pub fn corrupt_for_mutation_testing(&mut self) {
        let ctx = self.params.field().clone();
        let one = ctx.one();
        let m = self.gens_x.last_mut().expect("n >= 1");
        let bumped = &m.get(0, 0) + &one;
        m.set(0, 0, &bumped);
    }
}

fn tname(degenerate: bool) -> &'static str {
    if degenerate {
        "s"
    } else {
        "T"
    }
}

/// Outcome of evaluating one defining relation in the regular representation.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RelationCheck {
    pub name: String,
    pub pass: bool,
}

/// Per-relation verdicts for a parameter set.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RelationReport {
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect()
    }
}
