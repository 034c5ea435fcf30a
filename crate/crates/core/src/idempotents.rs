//! The residue idempotents `e(i)`, built three independent ways and
//! cross-validated:
//!
//! 1. **Spectral** — the definition: the product over strands of the
//!    generalized-eigenspace projectors of the Jucys-Murphy matrices at the
//!    residue values `q_{i_r}`, read back into the algebra.
//! 2. **Interpolation** — the product `prod_r L_r(i)^N` of interpolation
//!    factors `L_{i_r,j} = 1 - ((q_{i_r} - x_r)/(q_{i_r} - q_j))^N`, with
//!    `N` large enough (`N = dim` always suffices). A variant restricts the
//!    inner product to residues occurring in the support, which is the form
//!    that remains available when no closed formula applies.
//! 3. **Closed** — the Frobenius-power formulas: degenerate
//!    `F_r = 1 - x_r^{(p-1) p^{s_r}}` (residue 0) or
//!    `-sum_{k=1}^{p-1} x_r^{k p^{s_r}} / i_r^k` (residue nonzero), and
//!    non-degenerate `e^{-n} prod_r sum_{k=0}^{e-1} (X_r^{p^{s_r}} /
//!    q^{p^{s_r} i_r})^k`, exact once `s_r` reaches the nilpotency exponent
//!    `l_r` of `y_r`.
//!
//! Interpolation works in the commutative subalgebra generated by one
//! Jucys-Murphy element: exponents are reduced modulo its minimal
//! polynomial (computed symbolically from element powers, independent of
//! the projector machinery), so the construction never touches matrices.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::time::Instant;

use crate::gf::{FieldElement, Polynomial};
use crate::hecke::{AlgebraElement, AlgebraParams, Flavor};
use crate::regrep::{
    crt_projector_with_min_poly, nilpotency_index, KrylovEchelon, Matrix, RegularRep,
};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Residue sequences
// ---------------------------------------------------------------------------

/// A sequence `(i_1, ..., i_n)` of residues mod e labelling a simultaneous
/// generalized eigenspace of the Jucys-Murphy elements.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ResidueSequence(Vec<u64>);

impl ResidueSequence {
    pub fn new(e: u64, entries: &[u64]) -> ResidueSequence {
        ResidueSequence(entries.iter().map(|&i| i % e).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    /// Residue at strand `r` (1-based).
    pub fn residue(&self, r: usize) -> u64 {
        self.0[r - 1]
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::from(self.0.clone())
    }
}

impl fmt::Debug for ResidueSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v)?;
        }
        write!(f, ")")
    }
}

// ---------------------------------------------------------------------------
// Spectral construction
// ---------------------------------------------------------------------------

/// Per-strand generalized-eigenspace projectors of the Jucys-Murphy matrices
/// and the product projectors over the nonzero residue sequences. Computed
/// once per representation and shared by every downstream check.
pub struct SpectralData {
    params: AlgebraParams,
    /// `strand_proj[r-1][i]`: projector of `X_r` at eigenvalue `q_i`.
    strand_proj: Vec<Vec<Matrix>>,
    /// Nonzero product projectors, keyed by sequence, in lexicographic order.
    support: Vec<(ResidueSequence, Matrix)>,
}

impl SpectralData {
    pub fn compute(rep: &RegularRep) -> SpectralData {
        let params = rep.params().clone();
        let e = params.e();
        let n = params.n();
        let mut strand_proj = Vec::with_capacity(n);
        for r in 1..=n {
            let m = rep.gen_x_matrix(r);
            let minp = m.min_poly();
            let projs: Vec<Matrix> = (0..e)
                .map(|i| crt_projector_with_min_poly(m, &minp, &params.residue_value(i)))
                .collect();
            strand_proj.push(projs);
        }
        // Only residues with a nonzero strand projector can occur.
        let candidates: Vec<Vec<u64>> = strand_proj
            .iter()
            .map(|projs| (0..e).filter(|&i| !projs[i as usize].is_zero()).collect())
            .collect();
        let mut support = Vec::new();
        let mut stack: Vec<u64> = Vec::with_capacity(n);
        cartesian_products(&candidates, &mut stack, &mut |seq: &[u64]| {
            let mut prod = strand_proj[0][seq[0] as usize].clone();
            for (r, &i) in seq.iter().enumerate().skip(1) {
                prod = prod.mat_mul(&strand_proj[r][i as usize]);
                if prod.is_zero() {
                    return;
                }
            }
            if !prod.is_zero() {
                support.push((ResidueSequence(seq.to_vec()), prod));
            }
        });
        support.sort_by(|a, b| a.0.cmp(&b.0));
        SpectralData {
            params,
            strand_proj,
            support,
        }
    }

    pub fn params(&self) -> &AlgebraParams {
        &self.params
    }

    /// Sequences with `e(i) != 0`, lexicographically sorted.
    pub fn support(&self) -> Vec<ResidueSequence> {
        self.support.iter().map(|(s, _)| s.clone()).collect()
    }

    pub fn support_pairs(&self) -> &[(ResidueSequence, Matrix)] {
        &self.support
    }

    /// Projector of `X_r` at residue `i` (1-based strand).
    pub fn strand_projector(&self, r: usize, i: u64) -> &Matrix {
        &self.strand_proj[r - 1][(i % self.params.e()) as usize]
    }

    /// Product projector for a sequence: the stored one if supported, else
    /// freshly multiplied (and zero).
    pub fn projector(&self, seq: &ResidueSequence) -> Matrix {
        if let Some((_, m)) = self.support.iter().find(|(s, _)| s == seq) {
            return m.clone();
        }
        let mut prod = self.strand_proj[0][seq.residue(1) as usize].clone();
        for r in 2..=self.params.n() {
            prod = prod.mat_mul(&self.strand_proj[r - 1][seq.residue(r) as usize]);
        }
        prod
    }

    /// Matrix of `y_r = sum_i (x_r - q_{i_r}) e(i)` (degenerate) or
    /// `sum_i (1 - q^{-i_r} X_r) e(i)` (non-degenerate).
    pub fn y_matrix(&self, rep: &RegularRep, r: usize) -> Matrix {
        let params = &self.params;
        let ctx = params.field();
        let dim = rep.dim();
        let xr = rep.gen_x_matrix(r);
        let ident = Matrix::identity(ctx, dim);
        let mut acc = Matrix::zero(ctx, dim);
        for (seq, proj) in &self.support {
            let i_r = seq.residue(r);
            let factor = match params.flavor() {
                Flavor::Degenerate => xr.sub(&ident.scale(&params.residue_value(i_r))),
                Flavor::NonDegenerate => {
                    let qinv = params.residue_value(i_r).inv().expect("q^i is a unit");
                    ident.sub(&xr.scale(&qinv))
                }
            };
            acc = acc.add(&factor.mat_mul(proj));
        }
        acc
    }

    /// Sum of projectors over supported sequences with residue `i` at
    /// strand `r`; the zero matrix when none match.
    pub fn projector_sum_with_residue(&self, rep: &RegularRep, r: usize, i: u64) -> Matrix {
        let mut acc = Matrix::zero(self.params.field(), rep.dim());
        for (seq, proj) in &self.support {
            if seq.residue(r) == i % self.params.e() {
                acc = acc.add(proj);
            }
        }
        acc
    }

    /// Completeness: the projectors sum to the identity.
    pub fn is_complete(&self, rep: &RegularRep) -> bool {
        let mut acc = Matrix::zero(self.params.field(), rep.dim());
        for (_, proj) in &self.support {
            acc = acc.add(proj);
        }
        acc.is_identity()
    }
}

fn cartesian_products(choices: &[Vec<u64>], stack: &mut Vec<u64>, f: &mut impl FnMut(&[u64])) {
    if stack.len() == choices.len() {
        f(stack);
        return;
    }
    for i in 0..choices[stack.len()].len() {
        let c = choices[stack.len()][i];
        stack.push(c);
        cartesian_products(choices, stack, f);
        stack.pop();
    }
}

/// Sequences with nonzero weight space, computed exactly from the spectral
/// projectors.
pub fn residue_support(rep: &RegularRep) -> Vec<ResidueSequence> {
    SpectralData::compute(rep).support()
}

/// The defining construction: `e(i)` as the product of per-strand
/// generalized-eigenspace projectors, read back into the algebra. Zero
/// exactly when `i` is outside the support.
pub fn e_spectral(rep: &RegularRep, i: &ResidueSequence) -> AlgebraElement {
    let params = rep.params();
    assert_eq!(i.len(), params.n());
    let mut prod: Option<Matrix> = None;
    for r in 1..=params.n() {
        let m = rep.gen_x_matrix(r);
        let minp = m.min_poly();
        let p = crt_projector_with_min_poly(m, &minp, &params.residue_value(i.residue(r)));
        prod = Some(match prod {
            None => p,
            Some(acc) => acc.mat_mul(&p),
        });
    }
    rep.from_action_on_one(&prod.expect("n >= 1"))
}

// ---------------------------------------------------------------------------
// Interpolation construction
// ---------------------------------------------------------------------------

/// Which inner product the interpolation construction runs over.
#[derive(Clone, Copy)]
pub enum InterpolationVariant<'a> {
    /// All residues `j != i_r` in `I`.
    Full,
    /// Only residues occurring at strand `r` among the supported sequences
    /// (the fallback form that stays finite without any field hypotheses).
    SupportRestricted(&'a [ResidueSequence]),
}

/// Precomputed per-strand data for the interpolation products: the
/// Jucys-Murphy element, its minimal polynomial (found symbolically from the
/// element powers), and the power basis below that degree.
pub struct InterpolationEngine {
    params: AlgebraParams,
    strands: Vec<StrandPowers>,
}

struct StrandPowers {
    min_poly: Polynomial,
    powers: Vec<AlgebraElement>,
}

impl InterpolationEngine {
    pub fn new(params: &AlgebraParams) -> Result<InterpolationEngine> {
        let mut strands = Vec::with_capacity(params.n());
        for r in 1..=params.n() {
            let x = AlgebraElement::gen_x(params, r)?;
            let min_poly = element_min_poly(params, &x);
            let deg = min_poly.degree().expect("min poly is nonzero");
            let mut powers = Vec::with_capacity(deg.max(1));
            let mut cur = AlgebraElement::one(params);
            for _ in 0..deg.max(1) {
                powers.push(cur.clone());
                cur = &cur * &x;
            }
            strands.push(StrandPowers { min_poly, powers });
        }
        Ok(InterpolationEngine {
            params: params.clone(),
            strands,
        })
    }

    /// `prod_r L_r(i)^N` with every inner exponent also `N`. With
    /// `N >= dim` this equals the spectral idempotent exactly.
    pub fn e(
        &self,
        i: &ResidueSequence,
        n_exp: u64,
        variant: InterpolationVariant<'_>,
    ) -> Result<AlgebraElement> {
        if n_exp == 0 {
            return Err(Error::InvalidExponent);
        }
        let params = &self.params;
        assert_eq!(i.len(), params.n());
        let ctx = params.field();
        let e = params.e();
        let mut acc = AlgebraElement::one(params);
        for r in 1..=params.n() {
            let strand = &self.strands[r - 1];
            let m = &strand.min_poly;
            let i_r = i.residue(r);
            let qi = params.residue_value(i_r);
            let residues: Vec<u64> = match variant {
                InterpolationVariant::Full => (0..e).filter(|&j| j != i_r).collect(),
                InterpolationVariant::SupportRestricted(support) => {
                    let occurring: BTreeSet<u64> = support.iter().map(|s| s.residue(r)).collect();
                    occurring.into_iter().filter(|&j| j != i_r).collect()
                }
            };
            // (q_{i_r} - z)^N mod m, shared by every factor.
            let base = Polynomial::from_coeffs(ctx, vec![qi.clone(), -&ctx.one()]);
            let base_n = base.pow_mod(n_exp, m);
            let mut l_poly = Polynomial::one(ctx).rem(m);
            for j in residues {
                let denom = &qi - &params.residue_value(j);
                let scale = denom.inv().expect("distinct residue values").pow(n_exp);
                let factor = &Polynomial::one(ctx) - &base_n.scale(&scale);
                l_poly = (&l_poly * &factor).rem(m);
            }
            let l_power = l_poly.pow_mod(n_exp, m);
            // Substitute z^k -> x_r^k.
            let mut elem = AlgebraElement::zero(params);
            for (k, c) in l_power.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    elem = &elem + &strand.powers[k].scale(c);
                }
            }
            acc = &acc * &elem;
        }
        Ok(acc)
    }
}

/// One-shot interpolation product (see [`InterpolationEngine::e`]).
pub fn e_interpolation(
    params: &AlgebraParams,
    i: &ResidueSequence,
    n_exp: u64,
    variant: InterpolationVariant<'_>,
) -> Result<AlgebraElement> {
    InterpolationEngine::new(params)?.e(i, n_exp, variant)
}

/// Minimal monic polynomial of an element under multiplication, found from
/// the linear algebra of its powers in the normal-word basis. Agrees with
/// the matrix minimal polynomial by faithfulness of the regular module but
/// is computed without any representation.
fn element_min_poly(params: &AlgebraParams, a: &AlgebraElement) -> Polynomial {
    let ctx = params.field();
    let basis = params.basis();
    let index: HashMap<_, usize> = basis
        .iter()
        .enumerate()
        .map(|(idx, w)| (w.clone(), idx))
        .collect();
    let coords = |x: &AlgebraElement| -> Vec<FieldElement> {
        let mut v = vec![ctx.zero(); basis.len()];
        for (word, c) in x.terms() {
            v[*index.get(word).expect("closure violation")] = c.clone();
        }
        v
    };
    let mut ech = KrylovEchelon::new(ctx);
    let mut cur = AlgebraElement::one(params);
    loop {
        if let Some(poly) = ech.offer(&coords(&cur)) {
            return poly;
        }
        cur = &cur * a;
        assert!(ech.steps() <= basis.len(), "power sequence failed to close");
    }
}

// ---------------------------------------------------------------------------
// Closed construction
// ---------------------------------------------------------------------------

/// Operation counts backing the efficiency claim for the closed formulas:
/// no matrix inversions ever, and an element-multiplication count bounded by
/// `mul_bound` (of order n * max(p, e) * log(exponent)).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ClosedFormulaStats {
    pub element_muls: u64,
    pub matrix_inversions: u64,
    pub mul_bound: u64,
}

/// Closed Frobenius-power formula for `e(i)` with explicit per-strand
/// exponents `s_r` (exact whenever `s_r >= l_r`).
pub fn e_closed(
    params: &AlgebraParams,
    i: &ResidueSequence,
    s_exponents: &[u32],
) -> Result<AlgebraElement> {
    e_closed_with_stats(params, i, s_exponents).map(|(elem, _)| elem)
}

/// As [`e_closed`], also reporting the operation counts.
pub fn e_closed_with_stats(
    params: &AlgebraParams,
    i: &ResidueSequence,
    s_exponents: &[u32],
) -> Result<(AlgebraElement, ClosedFormulaStats)> {
    assert_eq!(i.len(), params.n());
    if s_exponents.len() != params.n() {
        return Err(Error::InvalidParams(format!(
            "need one exponent per strand, got {} for n = {}",
            s_exponents.len(),
            params.n()
        )));
    }
    let ctx = params.field();
    let p = params.p();
    let e = params.e();
    let mut muls: u64 = 0;
    let mut bound: u64 = params.n() as u64; // final products
    let mut acc: Option<AlgebraElement> = None;
    for r in 1..=params.n() {
        let s = s_exponents[r - 1];
        let p_pow_s = p.checked_pow(s).ok_or(Error::InvalidExponent)?;
        let i_r = i.residue(r);
        let x = AlgebraElement::gen_x(params, r)?;
        let factor = match params.flavor() {
            Flavor::Degenerate => {
                if i_r == 0 {
                    // 1 - x_r^{(p-1) p^s}
                    let exp = p_pow_s.checked_mul(p - 1).ok_or(Error::InvalidExponent)?;
                    bound += 2 * bits(exp) + 2;
                    let power = pow_counted(&x, exp, &mut muls);
                    &AlgebraElement::one(params) - &power
                } else {
                    // -sum_{k=1}^{p-1} x_r^{k p^s} / i_r^k
                    bound += 2 * bits(p_pow_s) + (p - 1) + 2;
                    let u = pow_counted(&x, p_pow_s, &mut muls);
                    let i_inv = ctx.from_u64(i_r).inv().expect("i_r != 0");
                    let mut sum = AlgebraElement::zero(params);
                    let mut u_pow = u.clone();
                    let mut scale = i_inv.clone();
                    for k in 1..=p - 1 {
                        sum = &sum + &u_pow.scale(&scale);
                        if k < p - 1 {
                            muls += 1;
                            u_pow = &u_pow * &u;
                            scale = &scale * &i_inv;
                        }
                    }
                    -&sum
                }
            }
            Flavor::NonDegenerate => {
                // sum_{k=0}^{e-1} (X_r^{p^s} / q^{p^s i_r})^k
                bound += 2 * bits(p_pow_s) + (e - 1) + 2;
                let u = pow_counted(&x, p_pow_s, &mut muls);
                let denom = params
                    .q()
                    .pow((p_pow_s % e) * (i_r % e))
                    .inv()
                    .expect("q is a unit");
                let mut sum = AlgebraElement::one(params);
                let mut u_pow = AlgebraElement::one(params);
                let mut scale = ctx.one();
                for _ in 1..e {
                    muls += 1;
                    u_pow = &u_pow * &u;
                    scale = &scale * &denom;
                    sum = &sum + &u_pow.scale(&scale);
                }
                sum
            }
        };
        acc = Some(match acc {
            None => factor,
            Some(prev) => {
                muls += 1;
                &prev * &factor
            }
        });
    }
    let mut result = acc.expect("n >= 1");
    if params.flavor() == Flavor::NonDegenerate {
        let e_inv = ctx.from_u64(e).inv().expect("gcd(e, p) = 1");
        result = result.scale(&e_inv.pow(params.n() as u64));
    }
    let stats = ClosedFormulaStats {
        element_muls: muls,
        matrix_inversions: 0,
        mul_bound: bound,
    };
    debug_assert!(muls <= bound, "mult count {muls} exceeded bound {bound}");
    Ok((result, stats))
}

fn bits(x: u64) -> u64 {
    64 - u64::from(x.leading_zeros())
}

fn pow_counted(base: &AlgebraElement, mut m: u64, muls: &mut u64) -> AlgebraElement {
    let mut result = AlgebraElement::one(base.params());
    let mut b = base.clone();
    while m > 0 {
        if m & 1 == 1 {
            *muls += 1;
            result = &result * &b;
        }
        m >>= 1;
        if m > 0 {
            *muls += 1;
            b = &b * &b;
        }
    }
    result
}

/// Per-strand nilpotency exponents `l_r` (smallest `l` with
/// `y_r^{p^l} = 0`), the exponents that make the closed formulas exact.
pub fn closed_auto_exponents(rep: &RegularRep, spectral: &SpectralData) -> Result<Vec<u32>> {
    let p = rep.params().p();
    (1..=rep.params().n())
        .map(|r| {
            let y = spectral.y_matrix(rep, r);
            let nil = nilpotency_index(&y).ok_or(Error::NonNilpotent { r })?;
            Ok(smallest_p_power_at_least(p, nil))
        })
        .collect()
}

/// Smallest `l >= 0` with `p^l >= nil`.
pub(crate) fn smallest_p_power_at_least(p: u64, nil: u64) -> u32 {
    let mut l = 0u32;
    let mut pw = 1u64;
    while pw < nil {
        pw = pw.checked_mul(p).expect("nilpotency index is desk-scale");
        l += 1;
    }
    l
}

/// Closed formula in "auto" mode: `s_r = l_r` per strand.
pub fn e_closed_auto(
    rep: &RegularRep,
    spectral: &SpectralData,
    i: &ResidueSequence,
) -> Result<AlgebraElement> {
    let s = closed_auto_exponents(rep, spectral)?;
    e_closed(rep.params(), i, &s)
}

// ---------------------------------------------------------------------------
// The y elements and system verification
// ---------------------------------------------------------------------------

/// `y_r`: the nilpotent part of the Jucys-Murphy element across the weight
/// decomposition.
pub fn y_element(rep: &RegularRep, r: usize) -> AlgebraElement {
    let spectral = SpectralData::compute(rep);
    rep.from_action_on_one(&spectral.y_matrix(rep, r))
}

/// Wall-clock totals per construction, plus the per-sequence split.
#[derive(Debug, Clone)]
pub struct ConstructionTimings {
    pub spectral_ns: u128,
    pub interpolation_ns: u128,
    pub closed_ns: u128,
    pub per_sequence: Vec<SequenceTiming>,
}

#[derive(Debug, Clone)]
pub struct SequenceTiming {
    pub sequence: ResidueSequence,
    pub spectral_ns: u128,
    pub interpolation_ns: u128,
    pub closed_ns: u128,
}

/// Verdicts for one residue sequence.
#[derive(Debug, Clone)]
pub struct SequenceVerdict {
    pub sequence: ResidueSequence,
    pub in_support: bool,
    pub spectral: AlgebraElement,
    /// e(i)^2 = e(i) (trivially true outside the support).
    pub idempotent: bool,
    /// spectral = interpolation(N = dim) = closed(auto).
    pub constructions_equal: bool,
    /// Per strand r: the smallest s with y_r^s e(i) = 0, i.e. the
    /// nilpotency degree of the shifted Jucys-Murphy element on this weight
    /// space. Empty outside the support.
    pub strand_nilpotency: Vec<u64>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct NilpotencyEntry {
    pub r: usize,
    pub nil_index: u64,
    pub l: u32,
}

/// Joint report on the idempotent system: support, per-sequence verdicts,
/// orthogonality/completeness, y-nilpotency data, and construction timings.
pub struct IdempotentReport {
    pub params: AlgebraParams,
    pub dim: usize,
    pub support: Vec<ResidueSequence>,
    pub sequences: Vec<SequenceVerdict>,
    pub orthogonal: bool,
    pub complete: bool,
    pub nilpotency: Vec<NilpotencyEntry>,
    pub closed_stats: ClosedFormulaStats,
    pub timings: ConstructionTimings,
}

impl IdempotentReport {
    pub fn all_pass(&self) -> bool {
        self.orthogonal
            && self.complete
            && self
                .sequences
                .iter()
                .all(|s| s.idempotent && s.constructions_equal)
    }

    /// JSON form; timings are included only on request so that reports are
    /// byte-identical across runs when they need to be.
    pub fn to_json(&self, include_timings: bool) -> serde_json::Value {
        let mut obj = serde_json::json!({
            "v": 1,
            "flavor": self.params.flavor(),
            "p": self.params.p(),
            "k": self.params.field().k(),
            "e": self.params.e(),
            "n": self.params.n(),
            "kappa": self.params.kappa(),
            "dim": self.dim,
            "support": self.support.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
            "sequences": self.sequences.iter().map(|s| serde_json::json!({
                "i": s.sequence.to_json(),
                "in_support": s.in_support,
                "idempotent": s.idempotent,
                "constructions_equal": s.constructions_equal,
                "strand_nilpotency": s.strand_nilpotency,
                "element": s.spectral.to_json(),
            })).collect::<Vec<_>>(),
            "orthogonal": self.orthogonal,
            "complete": self.complete,
            "nilpotency": self.nilpotency,
            "closed_formula_stats": self.closed_stats,
            "all_pass": self.all_pass(),
        });
        if include_timings {
            let t = &self.timings;
            obj["timings_ns"] = serde_json::json!({
                "spectral": t.spectral_ns as u64,
                "interpolation": t.interpolation_ns as u64,
                "closed": t.closed_ns as u64,
                "per_sequence": t.per_sequence.iter().map(|s| serde_json::json!({
                    "i": s.sequence.to_json(),
                    "spectral": s.spectral_ns as u64,
                    "interpolation": s.interpolation_ns as u64,
                    "closed": s.closed_ns as u64,
                })).collect::<Vec<_>>(),
            });
        }
        obj
    }
}

/// Runs the full idempotent-system verification: idempotency, pairwise
/// orthogonality, completeness, three-way construction agreement on the
/// support plus one sample outside it, and y-nilpotency.
pub fn verify_idempotent_system(rep: &RegularRep) -> Result<IdempotentReport> {
    let params = rep.params();
    let spectral = SpectralData::compute(rep);
    let support = spectral.support();
    let pairs = spectral.support_pairs();

    // (i) idempotency and pairwise orthogonality at the projector level.
    let mut orthogonal = true;
    for (a, (_, pa)) in pairs.iter().enumerate() {
        if pa.mat_mul(pa) != *pa {
            orthogonal = false;
        }
        for (_, pb) in pairs.iter().skip(a + 1) {
            if !pa.mat_mul(pb).is_zero() || !pb.mat_mul(pa).is_zero() {
                orthogonal = false;
            }
        }
    }
    // (ii) completeness.
    let complete = spectral.is_complete(rep);

    // (iv) nilpotency data, which also fixes the auto exponents.
    let p = params.p();
    let mut nilpotency = Vec::new();
    for r in 1..=params.n() {
        let y = spectral.y_matrix(rep, r);
        let nil_index = nilpotency_index(&y).ok_or(Error::NonNilpotent { r })?;
        nilpotency.push(NilpotencyEntry {
            r,
            nil_index,
            l: smallest_p_power_at_least(p, nil_index),
        });
    }
    let auto_exps: Vec<u32> = nilpotency.iter().map(|e| e.l).collect();

    // (iii) three-way agreement on the support and one sample outside.
    let engine = InterpolationEngine::new(params)?;
    let n_exp = rep.dim() as u64;
    let mut sequences = Vec::new();
    let mut timings = ConstructionTimings {
        spectral_ns: 0,
        interpolation_ns: 0,
        closed_ns: 0,
        per_sequence: Vec::new(),
    };
    let mut closed_stats: Option<ClosedFormulaStats> = None;
    let mut to_check: Vec<(ResidueSequence, bool)> =
        support.iter().map(|s| (s.clone(), true)).collect();
    if let Some(outside) = first_outside_sequence(params, &support) {
        to_check.push((outside, false));
    }
    let ident = Matrix::identity(params.field(), rep.dim());
    for (seq, in_support) in to_check {
        let t0 = Instant::now();
        let spec_elem = if in_support {
            rep.from_action_on_one(&spectral.projector(&seq))
        } else {
            e_spectral(rep, &seq)
        };
        let spectral_ns = t0.elapsed().as_nanos();

        // Nilpotency degree of (x_r - q_{i_r}) on this weight space.
        let mut strand_nilpotency = Vec::new();
        if in_support {
            let proj = spectral.projector(&seq);
            for r in 1..=params.n() {
                let shift = ident.scale(&params.residue_value(seq.residue(r)));
                let shifted = match params.flavor() {
                    Flavor::Degenerate => rep.gen_x_matrix(r).sub(&shift),
                    Flavor::NonDegenerate => {
                        let qinv = params
                            .residue_value(seq.residue(r))
                            .inv()
                            .expect("q^i is a unit");
                        ident.sub(&rep.gen_x_matrix(r).scale(&qinv))
                    }
                };
                let nil =
                    nilpotency_index(&shifted.mat_mul(&proj)).ok_or(Error::NonNilpotent { r })?;
                strand_nilpotency.push(nil);
            }
        }

        let t1 = Instant::now();
        let interp = engine.e(&seq, n_exp, InterpolationVariant::Full)?;
        let interpolation_ns = t1.elapsed().as_nanos();

        let t2 = Instant::now();
        let (closed, stats) = e_closed_with_stats(params, &seq, &auto_exps)?;
        let closed_ns = t2.elapsed().as_nanos();
        if closed_stats.is_none() {
            closed_stats = Some(stats);
        }

        let idempotent = &spec_elem * &spec_elem == spec_elem;
        let constructions_equal =
            spec_elem == interp && spec_elem == closed && (in_support != spec_elem.is_zero());
        sequences.push(SequenceVerdict {
            sequence: seq.clone(),
            in_support,
            spectral: spec_elem,
            idempotent,
            constructions_equal,
            strand_nilpotency,
        });
        timings.spectral_ns += spectral_ns;
        timings.interpolation_ns += interpolation_ns;
        timings.closed_ns += closed_ns;
        timings.per_sequence.push(SequenceTiming {
            sequence: seq,
            spectral_ns,
            interpolation_ns,
            closed_ns,
        });
    }

    Ok(IdempotentReport {
        params: params.clone(),
        dim: rep.dim(),
        support,
        sequences,
        orthogonal,
        complete,
        nilpotency,
        closed_stats: closed_stats.expect("at least one sequence was checked"),
        timings,
    })
}

/// Lexicographically first sequence in `I^n` outside the support, if any.
fn first_outside_sequence(
    params: &AlgebraParams,
    support: &[ResidueSequence],
) -> Option<ResidueSequence> {
    let e = params.e();
    let n = params.n();
    let total = (e as u128).checked_pow(n as u32)?;
    if support.len() as u128 >= total {
        return None;
    }
    let in_support: BTreeSet<&ResidueSequence> = support.iter().collect();
    let mut seq = vec![0u64; n];
    loop {
        let cand = ResidueSequence(seq.clone());
        if !in_support.contains(&cand) {
            return Some(cand);
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            seq[pos] += 1;
            if seq[pos] < e {
                break;
            }
            seq[pos] = 0;
        }
    }
}
