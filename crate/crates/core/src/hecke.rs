//! Element arithmetic in the cyclotomic Hecke algebra, both flavors.
//!
//! Elements are stored in the Ariki-Koike normal-word basis
//! `{ X_1^{a_1} ... X_n^{a_n} T_w : 0 <= a_t <= l-1, w in S_n }` (degenerate
//! flavor: `x^a s_w`), which has `l^n * n!` members. Products are rewritten
//! into that basis by a straightening engine built from rules derived from
//! the defining relations:
//!
//! * permutation level (right): `T_w T_r = T_{w s_r}` if the length grows,
//!   else `q T_{w s_r} + (q-1) T_w`; degenerate: plain group product;
//! * permutation level (left): `T_r T_w = T_{s_r w}` if the length grows,
//!   else `q T_{s_r w} + (q-1) T_w`;
//! * commuting a generator leftward past an X-monomial:
//!   `T_r X_r^a X_{r+1}^b = X_r^b X_{r+1}^a T_r + (q-1) [
//!   sum_{j=1}^{b} X_r^{b-j} X_{r+1}^{a+j} -
//!   sum_{j=1}^{a} X_r^{j-1} X_{r+1}^{a+b+1-j} ]`, degenerate:
//!   `s_r x_r^a x_{r+1}^b = x_r^b x_{r+1}^a s_r +
//!   sum_{j=1}^{b} x_r^{b-j} x_{r+1}^{a+j-1} -
//!   sum_{j=1}^{a} x_r^{j-1} x_{r+1}^{a+b-j}`;
//! * commuting a single X rightward past `T_w`, by recursion on a reduced
//!   word of `w` with the rank-one rules
//!   `T_r X_r = X_{r+1} T_r - (q-1) X_{r+1}`,
//!   `T_r X_{r+1} = X_r T_r + (q-1) X_{r+1}`
//!   (degenerate: `s_r x_r = x_{r+1} s_r - 1`, `s_r x_{r+1} = x_r s_r + 1`);
//! * exponent overflow at position 1 by the cyclotomic polynomial, and at
//!   position `t > 1` by the descent identities
//!   `X_t^m = q^{-1} T_{t-1} X_{t-1}^m T_{t-1} + q^{-1}(q-1)
//!   sum_{j=1}^{m-1} X_{t-1}^{m-j} X_t^j T_{t-1}`, degenerate:
//!   `x_t^m = s_{t-1} x_{t-1}^m s_{t-1} +
//!   sum_{j=1}^{m} x_{t-1}^{j-1} x_t^{m-j} s_{t-1}`.
//!
//! Every derived rule is checked against the defining relations both as
//! element identities (tests below) and as matrix identities in the regular
//! representation (`regrep::relation_check`).
//!
//! Termination is structural: reducing position `t` only ever spawns
//! reductions at position `t-1` or at position `t` with a strictly smaller
//! exponent, and the inner `T_{t-1}`-multiplications act on elements
//! supported on positions `< t`, whose correction terms stay within basis
//! range. A step budget ("fuel") guards the recursion anyway; exhausting it
//! is a bug, reported by panic.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::gf::{FieldCtx, FieldElement};
use crate::{Error, Result};

/// Rewrite-step budget per public operation. Far beyond anything desk-scale
/// inputs need; exhausting it signals a non-terminating rewrite, i.e. a bug.
const FUEL_BUDGET: u64 = 200_000_000;

struct Fuel(u64);

impl Fuel {
    fn new() -> Fuel {
        Fuel(FUEL_BUDGET)
    }

    #[inline]
    fn burn(&mut self) {
        self.0 = self
            .0
            .checked_sub(1)
            .unwrap_or_else(|| panic!("straightening fuel exhausted; this is a bug"));
    }
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// Degenerate (`q = 1`, generators `x_r`, `s_r`) or non-degenerate
/// (`q != 1`, generators `X_r`, `T_r`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    Degenerate,
    NonDegenerate,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flavor::Degenerate => write!(f, "degenerate"),
            Flavor::NonDegenerate => write!(f, "non-degenerate"),
        }
    }
}

#[derive(Debug)]
struct ParamsInner {
    flavor: Flavor,
    field: FieldCtx,
    q: FieldElement,
    e: u64,
    n: usize,
    kappa: Vec<u64>,
    /// Lower coefficients of the monic cyclotomic polynomial
    /// `prod_c (X - q_{kappa_c}) = X^l + c_{l-1} X^{l-1} + ... + c_0`.
    cyclo_lower: Vec<FieldElement>,
}

/// Validated parameters of a cyclotomic Hecke algebra: flavor, ground field,
/// the parameter q, quantum characteristic e, strand count n, and the
/// multicharge kappa (a multiset of residues mod e, stored sorted).
/// Immutable and cheaply cloneable.
#[derive(Clone)]
pub struct AlgebraParams(Arc<ParamsInner>);

impl PartialEq for AlgebraParams {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.flavor == other.0.flavor
                && self.0.field == other.0.field
                && self.0.q == other.0.q
                && self.0.n == other.0.n
                && self.0.kappa == other.0.kappa)
    }
}
impl Eq for AlgebraParams {}

impl fmt::Debug for AlgebraParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "AlgebraParams({}, {}, q={}, e={}, n={}, kappa={:?})",
            self.0.flavor, self.0.field, self.0.q, self.0.e, self.0.n, self.0.kappa
        )
    }
}

impl AlgebraParams {
    /// Degenerate flavor over the given prime field context: q = 1, e = p.
    pub fn degenerate(field: &FieldCtx, n: usize, kappa: &[u64]) -> Result<AlgebraParams> {
        Self::build(Flavor::Degenerate, field, field.one(), field.p(), n, kappa)
    }

    /// Non-degenerate flavor with parameter `q != 0, 1`; the quantum
    /// characteristic is the multiplicative order of q.
    pub fn non_degenerate(
        field: &FieldCtx,
        q: &FieldElement,
        n: usize,
        kappa: &[u64],
    ) -> Result<AlgebraParams> {
        if q.is_zero() || q.is_one() {
            return Err(Error::InvalidParams(
                "non-degenerate flavor needs q != 0, 1".into(),
            ));
        }
        let e = q.quantum_characteristic()?;
        // ord(q) divides p^k - 1, which is coprime to p, so gcd(e, p) = 1.
        debug_assert!(crate::gf::frobenius_period(field.p(), e).is_ok());
        Self::build(Flavor::NonDegenerate, field, q.clone(), e, n, kappa)
    }

    /// Builds parameters from (flavor, p, e, kappa), constructing the
    /// smallest field GF(p^k) that realizes quantum characteristic e and
    /// picking q deterministically. For the degenerate flavor e must equal p
    /// (pass `None` to default it).
    pub fn from_characteristics(
        flavor: Flavor,
        p: u64,
        e: Option<u64>,
        n: usize,
        kappa: &[u64],
    ) -> Result<AlgebraParams> {
        match flavor {
            Flavor::Degenerate => {
                if let Some(e) = e {
                    if e != p {
                        return Err(Error::InvalidParams(format!(
                            "degenerate flavor forces e = p, got e = {e}, p = {p}"
                        )));
                    }
                }
                let field = FieldCtx::new(p, 1)?;
                Self::degenerate(&field, n, kappa)
            }
            Flavor::NonDegenerate => {
                let e =
                    e.ok_or_else(|| Error::InvalidParams("non-degenerate flavor needs e".into()))?;
                if e < 2 {
                    return Err(Error::InvalidParams(
                        "non-degenerate flavor needs e >= 2".into(),
                    ));
                }
                let k = crate::gf::minimal_extension_degree(p, e)?;
                let field = FieldCtx::new(p, k)?;
                let q = field.element_of_order(e)?;
                Self::non_degenerate(&field, &q, n, kappa)
            }
        }
    }

    fn build(
        flavor: Flavor,
        field: &FieldCtx,
        q: FieldElement,
        e: u64,
        n: usize,
        kappa: &[u64],
    ) -> Result<AlgebraParams> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if n > 200 {
            return Err(Error::InvalidParams("n is far beyond desk scale".into()));
        }
        if kappa.is_empty() {
            return Err(Error::InvalidParams("kappa must be non-empty".into()));
        }
        if kappa.len() > u16::MAX as usize {
            return Err(Error::InvalidParams(
                "kappa is far beyond desk scale".into(),
            ));
        }
        let mut kappa: Vec<u64> = kappa.iter().map(|&c| c % e).collect();
        kappa.sort_unstable();
        let inner = ParamsInner {
            flavor,
            field: field.clone(),
            q,
            e,
            n,
            kappa,
            cyclo_lower: Vec::new(),
        };
        let mut params = AlgebraParams(Arc::new(inner));
        let cyclo = params.compute_cyclo_lower();
        Arc::get_mut(&mut params.0).unwrap().cyclo_lower = cyclo;
        Ok(params)
    }

    fn compute_cyclo_lower(&self) -> Vec<FieldElement> {
        let f = self.field();
        // prod_c (X - q_{kappa_c}), expanded incrementally.
        let mut coeffs = vec![f.one()];
        for &c in &self.0.kappa {
            let root = self.residue_value(c);
            let mut next = vec![f.zero(); coeffs.len() + 1];
            for (i, a) in coeffs.iter().enumerate() {
                next[i + 1] = &next[i + 1] + a;
                next[i] = &next[i] - &(a * &root);
            }
            coeffs = next;
        }
        coeffs.pop(); // drop the monic leading 1
        coeffs
    }

    pub fn flavor(&self) -> Flavor {
        self.0.flavor
    }

    pub fn is_degenerate(&self) -> bool {
        self.0.flavor == Flavor::Degenerate
    }

    pub fn field(&self) -> &FieldCtx {
        &self.0.field
    }

    pub fn p(&self) -> u64 {
        self.0.field.p()
    }

    pub fn q(&self) -> &FieldElement {
        &self.0.q
    }

    /// Quantum characteristic: p in the degenerate flavor, ord(q) otherwise.
    pub fn e(&self) -> u64 {
        self.0.e
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn ell(&self) -> usize {
        self.0.kappa.len()
    }

    pub fn kappa(&self) -> &[u64] {
        &self.0.kappa
    }

    /// `q_i`: the residue `i` evaluated in the field — `i * 1` in the
    /// degenerate flavor, `q^i` otherwise. `i` is reduced mod e.
    pub fn residue_value(&self, i: u64) -> FieldElement {
        let i = i % self.0.e;
        match self.0.flavor {
            Flavor::Degenerate => self.0.field.from_u64(i),
            Flavor::NonDegenerate => self.0.q.pow(i),
        }
    }

    /// Dimension of the algebra, `l^n * n!`, or None on overflow.
    pub fn dim(&self) -> Option<u64> {
        let mut d: u64 = 1;
        for _ in 0..self.0.n {
            d = d.checked_mul(self.ell() as u64)?;
        }
        for m in 1..=self.0.n as u64 {
            d = d.checked_mul(m)?;
        }
        Some(d)
    }

    fn cyclo_lower(&self) -> &[FieldElement] {
        &self.0.cyclo_lower
    }

    /// All normal words in the fixed basis order: exponent vectors in
    /// lexicographic order, then permutations by (length, one-line).
    pub fn basis(&self) -> Vec<NormalWord> {
        let n = self.0.n;
        let ell = self.ell() as u16;
        let mut perms = all_permutations(n);
        perms.sort_by_key(perm_key);
        let mut out = Vec::new();
        let mut exps = vec![0u16; n];
        loop {
            for w in &perms {
                out.push(NormalWord {
                    exps: exps.clone(),
                    w: w.clone(),
                });
            }
            // Increment the exponent vector lexicographically (a_1 major).
            let mut pos = n;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                if exps[pos] + 1 < ell {
                    exps[pos] += 1;
                    for e in exps[pos + 1..].iter_mut() {
                        *e = 0;
                    }
                    break;
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Permutations
// ---------------------------------------------------------------------------

/// A permutation of `{1, ..., n}` in one-line notation (stored 0-based).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation {
            images: (0..n as u8).collect(),
        }
    }

    /// The simple transposition `s_r` swapping `r` and `r + 1` (1-based).
    pub fn simple(n: usize, r: usize) -> Permutation {
        assert!(r >= 1 && r < n);
        let mut p = Permutation::identity(n);
        p.images.swap(r - 1, r);
        p
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, &v)| v as usize == i)
    }

    /// Image of `i` (1-based in, 1-based out).
    pub fn image(&self, i: usize) -> usize {
        self.images[i - 1] as usize + 1
    }

    /// One-line notation, 1-based.
    pub fn one_line(&self) -> Vec<usize> {
        self.images.iter().map(|&v| v as usize + 1).collect()
    }

    /// Coxeter length = inversion count.
    pub fn length(&self) -> usize {
        let mut inv = 0;
        for i in 0..self.images.len() {
            for j in i + 1..self.images.len() {
                if self.images[i] > self.images[j] {
                    inv += 1;
                }
            }
        }
        inv
    }

    /// `self * s_r` (right multiplication): swaps the values in positions
    /// r, r+1 of the one-line notation.
    pub fn mul_simple_right(&self, r: usize) -> Permutation {
        let mut out = self.clone();
        out.images.swap(r - 1, r);
        out
    }

    /// `s_r * self` (left multiplication): swaps the values r and r+1
    /// wherever they occur.
    pub fn mul_simple_left(&self, r: usize) -> Permutation {
        let a = (r - 1) as u8;
        let b = r as u8;
        let mut out = self.clone();
        for v in out.images.iter_mut() {
            if *v == a {
                *v = b;
            } else if *v == b {
                *v = a;
            }
        }
        out
    }

    /// Right multiplication by `s_r` increases length iff the one-line
    /// values at positions r, r+1 are increasing.
    pub fn right_ascent(&self, r: usize) -> bool {
        self.images[r - 1] < self.images[r]
    }

    /// Left multiplication by `s_r` increases length iff the value r occurs
    /// before the value r+1.
    pub fn left_ascent(&self, r: usize) -> bool {
        let pos_a = self
            .images
            .iter()
            .position(|&v| v as usize == r - 1)
            .unwrap();
        let pos_b = self.images.iter().position(|&v| v as usize == r).unwrap();
        pos_a < pos_b
    }

    /// A reduced word `[r_1, ..., r_k]` with `self = s_{r_1} ... s_{r_k}`,
    /// built by stripping the first right descent repeatedly. Deterministic.
    pub fn reduced_word(&self) -> Vec<usize> {
        let mut u = self.clone();
        let mut letters = Vec::with_capacity(self.length());
        'outer: loop {
            for r in 1..u.n() {
                if !u.right_ascent(r) {
                    letters.push(r);
                    u = u.mul_simple_right(r);
                    continue 'outer;
                }
            }
            break;
        }
        letters.reverse();
        letters
    }

    /// (self * rhs)(i) = self(rhs(i)).
    pub fn compose(&self, rhs: &Permutation) -> Permutation {
        assert_eq!(self.n(), rhs.n());
        Permutation {
            images: rhs
                .images
                .iter()
                .map(|&v| self.images[v as usize])
                .collect(),
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.one_line())
    }
}

fn perm_key(w: &Permutation) -> (usize, Vec<u8>) {
    (w.length(), w.images.clone())
}

fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut images: Vec<u8> = (0..n as u8).collect();
    heap_permute(&mut images, n, &mut out);
    out
}

fn heap_permute(arr: &mut Vec<u8>, k: usize, out: &mut Vec<Permutation>) {
    if k <= 1 {
        out.push(Permutation {
            images: arr.clone(),
        });
        return;
    }
    for i in 0..k {
        heap_permute(arr, k - 1, out);
        if k.is_multiple_of(2) {
            arr.swap(i, k - 1);
        } else {
            arr.swap(0, k - 1);
        }
    }
}

// ---------------------------------------------------------------------------
// Normal words and elements
// ---------------------------------------------------------------------------

/// A basis monomial `X_1^{a_1} ... X_n^{a_n} T_w` with all exponents within
/// `[0, l-1]`. Ordered by (exponent vector lex, then permutation by length
/// then one-line), matching the enumeration in [`AlgebraParams::basis`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NormalWord {
    exps: Vec<u16>,
    w: Permutation,
}

impl NormalWord {
    pub fn identity(n: usize) -> NormalWord {
        NormalWord {
            exps: vec![0; n],
            w: Permutation::identity(n),
        }
    }

    pub fn new(exps: Vec<u16>, w: Permutation) -> NormalWord {
        assert_eq!(exps.len(), w.n());
        NormalWord { exps, w }
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    pub fn permutation(&self) -> &Permutation {
        &self.w
    }
}

impl Ord for NormalWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.exps
            .cmp(&other.exps)
            .then_with(|| perm_key(&self.w).cmp(&perm_key(&other.w)))
    }
}

impl PartialOrd for NormalWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for NormalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X^{:?} T{:?}", self.exps, self.w.one_line())
    }
}

/// A sparse linear combination of normal words over GF(p^k), tied to its
/// [`AlgebraParams`]. Zero coefficients are never stored; term order is the
/// canonical basis order.
#[derive(Clone)]
pub struct AlgebraElement {
    params: AlgebraParams,
    terms: BTreeMap<NormalWord, FieldElement>,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params && self.terms == other.terms
    }
}
impl Eq for AlgebraElement {}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (word, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*{:?}", c, word)?;
        }
        Ok(())
    }
}

impl AlgebraElement {
    pub fn zero(params: &AlgebraParams) -> AlgebraElement {
        AlgebraElement {
            params: params.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(params: &AlgebraParams) -> AlgebraElement {
        Self::monomial(params, NormalWord::identity(params.n()))
    }

    pub fn from_scalar(params: &AlgebraParams, c: &FieldElement) -> AlgebraElement {
        Self::one(params).scale(c)
    }

    /// The basis monomial itself; panics if the word is out of basis range.
    pub fn monomial(params: &AlgebraParams, word: NormalWord) -> AlgebraElement {
        assert_eq!(word.exps.len(), params.n());
        assert!(word.exps.iter().all(|&a| (a as usize) < params.ell()));
        let mut terms = BTreeMap::new();
        terms.insert(word, params.field().one());
        AlgebraElement {
            params: params.clone(),
            terms,
        }
    }

    /// Generator `T_r` (degenerate: `s_r`), `1 <= r <= n-1`.
    pub fn gen_t(params: &AlgebraParams, r: usize) -> Result<AlgebraElement> {
        if r < 1 || r >= params.n() {
            return Err(Error::IndexOutOfRange {
                index: r,
                what: "T generator",
            });
        }
        Ok(Self::monomial(
            params,
            NormalWord {
                exps: vec![0; params.n()],
                w: Permutation::simple(params.n(), r),
            },
        ))
    }

    /// Jucys-Murphy generator `X_r` (degenerate: `x_r`), `1 <= r <= n`,
    /// fully reduced into the basis (for `l = 1` this is a T-combination).
    pub fn gen_x(params: &AlgebraParams, r: usize) -> Result<AlgebraElement> {
        if r < 1 || r > params.n() {
            return Err(Error::IndexOutOfRange {
                index: r,
                what: "X generator",
            });
        }
        let mut fuel = Fuel::new();
        Ok(jm_power_normal(params, r, 1, &mut fuel))
    }

    /// `X_r^m` (degenerate `x_r^m`) by repeated squaring.
    pub fn jm_power(params: &AlgebraParams, r: usize, m: u64) -> Result<AlgebraElement> {
        Ok(Self::gen_x(params, r)?.pow(m))
    }

    pub fn params(&self) -> &AlgebraParams {
        &self.params
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&NormalWord, &FieldElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, word: &NormalWord) -> FieldElement {
        self.terms
            .get(word)
            .cloned()
            .unwrap_or_else(|| self.params.field().zero())
    }

    pub fn scale(&self, c: &FieldElement) -> AlgebraElement {
        if c.is_zero() {
            return Self::zero(&self.params);
        }
        AlgebraElement {
            params: self.params.clone(),
            terms: self.terms.iter().map(|(w, a)| (w.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, mut m: u64) -> AlgebraElement {
        let mut result = Self::one(&self.params);
        let mut base = self.clone();
        while m > 0 {
            if m & 1 == 1 {
                result = &result * &base;
            }
            m >>= 1;
            if m > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Canonical JSON form: a list of `{"a": [...], "w": [...], "c": ...}`
    /// terms in basis order, with `w` in 1-based one-line notation.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(word, c)| {
                serde_json::json!({
                    "a": word.exps,
                    "w": word.w.one_line(),
                    "c": c.to_json(),
                })
            })
            .collect();
        serde_json::Value::from(terms)
    }

    fn add_assign_term(&mut self, word: NormalWord, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn add_assign(&mut self, rhs: &AlgebraElement) {
        for (w, c) in &rhs.terms {
            self.add_assign_term(w.clone(), c.clone());
        }
    }
}

impl std::ops::Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert!(self.params == rhs.params, "algebra parameter mismatch");
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl std::ops::Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        let minus_one = -&rhs.params.field().one();
        self + &rhs.scale(&minus_one)
    }
}

impl std::ops::Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        let minus_one = -&self.params.field().one();
        self.scale(&minus_one)
    }
}

impl std::ops::Mul for &AlgebraElement {
    type Output = AlgebraElement;

    /// Exact product, straightened into the normal-word basis.
    ///
    /// Panics if the internal rewrite budget is exhausted, which cannot
    /// happen on valid inputs and indicates a bug in the rewrite rules.
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert!(self.params == rhs.params, "algebra parameter mismatch");
        let params = &self.params;
        let mut fuel = Fuel::new();
        let mut acc = AlgebraElement::zero(params);
        for (word, c) in &rhs.terms {
            // self * c X^a T_v = c * (((self * X_1^{a_1}) ... ) * T_v)
            let mut cur = self.scale(c);
            for (idx, &a) in word.exps.iter().enumerate() {
                for _ in 0..a {
                    cur = gen_x_right_mul(&cur, idx + 1, &mut fuel);
                }
            }
            for r in word.w.reduced_word() {
                cur = gen_t_right_mul(&cur, r, &mut fuel);
            }
            acc.add_assign(&cur);
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Straightening engine
// ---------------------------------------------------------------------------

/// elem * T_r: permutation-level only, no X interaction.
fn gen_t_right_mul(elem: &AlgebraElement, r: usize, fuel: &mut Fuel) -> AlgebraElement {
    let params = &elem.params;
    let f = params.field();
    let mut out = AlgebraElement::zero(params);
    for (word, c) in &elem.terms {
        fuel.burn();
        let longer = word.w.right_ascent(r);
        let moved = word.w.mul_simple_right(r);
        if params.is_degenerate() || longer {
            out.add_assign_term(
                NormalWord {
                    exps: word.exps.clone(),
                    w: moved,
                },
                c.clone(),
            );
        } else {
            // T_w T_r = q T_{w s_r} + (q-1) T_w when the length drops.
            let q = params.q();
            out.add_assign_term(
                NormalWord {
                    exps: word.exps.clone(),
                    w: moved,
                },
                c * q,
            );
            out.add_assign_term(word.clone(), c * &(q - &f.one()));
        }
    }
    out
}

/// T_r * elem: the combined commutation rule at positions (r, r+1), then the
/// left permutation product. Correction monomials can leave basis range and
/// are re-normalized.
fn gen_t_left_mul(r: usize, elem: &AlgebraElement, fuel: &mut Fuel) -> AlgebraElement {
    let params = &elem.params;
    let f = params.field();
    let one = f.one();
    let mut out = AlgebraElement::zero(params);
    for (word, c) in &elem.terms {
        fuel.burn();
        let a = word.exps[r - 1] as u32;
        let b = word.exps[r] as u32;
        // Leading term: swapped exponents, T_r * T_v.
        let mut lead_exps = word.exps.clone();
        lead_exps.swap(r - 1, r);
        let longer = word.w.left_ascent(r);
        let moved = word.w.mul_simple_left(r);
        if params.is_degenerate() || longer {
            out.add_assign_term(
                NormalWord {
                    exps: lead_exps,
                    w: moved,
                },
                c.clone(),
            );
        } else {
            let q = params.q();
            out.add_assign_term(
                NormalWord {
                    exps: lead_exps.clone(),
                    w: moved,
                },
                c * q,
            );
            out.add_assign_term(
                NormalWord {
                    exps: lead_exps,
                    w: word.w.clone(),
                },
                c * &(q - &one),
            );
        }
        // Correction terms: pure X-monomials times T_v.
        let corr_scale = if params.is_degenerate() {
            one.clone()
        } else {
            params.q() - &one
        };
        let push_corr =
            |exp_r: u32, exp_r1: u32, negate: bool, out: &mut AlgebraElement, fuel: &mut Fuel| {
                let mut coeff = c * &corr_scale;
                if negate {
                    coeff = -&coeff;
                }
                let mut exps: Vec<u32> = word.exps.iter().map(|&x| x as u32).collect();
                exps[r - 1] = exp_r;
                exps[r] = exp_r1;
                add_monomial_normalized(out, &coeff, exps, &word.w, fuel);
            };
        if params.is_degenerate() {
            // + sum_{j=1}^{b} x^{b-j} x'^{a+j-1} - sum_{j=1}^{a} x^{j-1} x'^{a+b-j}
            for j in 1..=b {
                push_corr(b - j, a + j - 1, false, &mut out, fuel);
            }
            for j in 1..=a {
                push_corr(j - 1, a + b - j, true, &mut out, fuel);
            }
        } else {
            // + (q-1)[ sum_{j=1}^{b} X^{b-j} X'^{a+j}
            //        - sum_{j=1}^{a} X^{j-1} X'^{a+b+1-j} ]
            for j in 1..=b {
                push_corr(b - j, a + j, false, &mut out, fuel);
            }
            for j in 1..=a {
                push_corr(j - 1, a + b + 1 - j, true, &mut out, fuel);
            }
        }
    }
    out
}

/// elem * X_t: commutes a single X leftward through each T_w by recursion on
/// a reduced word, then folds the existing X-monomials back in.
fn gen_x_right_mul(elem: &AlgebraElement, t: usize, fuel: &mut Fuel) -> AlgebraElement {
    let params = &elem.params;
    let mut out = AlgebraElement::zero(params);
    for (word, c) in &elem.terms {
        fuel.burn();
        let moved = t_word_times_x(params, &word.w, t, fuel);
        // X^a * (T_w X_t rewritten): exponent addition, then normalization.
        for (mword, mc) in &moved.terms {
            let exps: Vec<u32> = word
                .exps
                .iter()
                .zip(mword.exps.iter())
                .map(|(&x, &y)| x as u32 + y as u32)
                .collect();
            add_monomial_normalized(&mut out, &(c * mc), exps, &mword.w, fuel);
        }
    }
    out
}

/// Normal form of `T_w X_t`, by recursion on the reduced word of `w`.
fn t_word_times_x(
    params: &AlgebraParams,
    w: &Permutation,
    t: usize,
    fuel: &mut Fuel,
) -> AlgebraElement {
    fuel.burn();
    if w.is_identity() {
        let mut out = AlgebraElement::zero(params);
        let mut exps = vec![0u32; params.n()];
        exps[t - 1] = 1;
        add_monomial_normalized(&mut out, &params.field().one(), exps, w, fuel);
        return out;
    }
    // Strip the last letter: w = w' s_r with length(w') = length(w) - 1.
    let word = w.reduced_word();
    let r = *word.last().unwrap();
    let w_prev = w.mul_simple_right(r);
    let f = params.field();
    let one = f.one();
    if t != r && t != r + 1 {
        // T_{w'} (T_r X_t) = (T_{w'} X_t) T_r
        let inner = t_word_times_x(params, &w_prev, t, fuel);
        return gen_t_right_mul(&inner, r, fuel);
    }
    if params.is_degenerate() {
        let unit = AlgebraElement::monomial(
            params,
            NormalWord {
                exps: vec![0; params.n()],
                w: w_prev.clone(),
            },
        );
        if t == r {
            // s_r x_r = x_{r+1} s_r - 1
            let inner = t_word_times_x(params, &w_prev, r + 1, fuel);
            let lead = gen_t_right_mul(&inner, r, fuel);
            &lead - &unit
        } else {
            // s_r x_{r+1} = x_r s_r + 1
            let inner = t_word_times_x(params, &w_prev, r, fuel);
            let lead = gen_t_right_mul(&inner, r, fuel);
            &lead + &unit
        }
    } else {
        let q_minus_1 = params.q() - &one;
        if t == r {
            // T_r X_r = X_{r+1} T_r - (q-1) X_{r+1}
            let inner = t_word_times_x(params, &w_prev, r + 1, fuel);
            let lead = gen_t_right_mul(&inner, r, fuel);
            &lead - &inner.scale(&q_minus_1)
        } else {
            // T_r X_{r+1} = X_r T_r + (q-1) X_{r+1}
            let inner_r = t_word_times_x(params, &w_prev, r, fuel);
            let lead = gen_t_right_mul(&inner_r, r, fuel);
            let inner_r1 = t_word_times_x(params, &w_prev, r + 1, fuel);
            &lead + &inner_r1.scale(&q_minus_1)
        }
    }
}

/// Accumulates `coeff * X^exps T_w` into `acc`, reducing any exponent that
/// exceeds `l - 1`. Reduction happens at the highest overflowing position
/// first; the replacement element only involves lower positions, so the
/// recursion descends strictly.
fn add_monomial_normalized(
    acc: &mut AlgebraElement,
    coeff: &FieldElement,
    exps: Vec<u32>,
    w: &Permutation,
    fuel: &mut Fuel,
) {
    fuel.burn();
    if coeff.is_zero() {
        return;
    }
    let params = acc.params.clone();
    let ell = params.ell() as u32;
    let overflow = exps.iter().rposition(|&a| a >= ell);
    let Some(pos) = overflow else {
        acc.add_assign_term(
            NormalWord {
                exps: exps.iter().map(|&a| a as u16).collect(),
                w: w.clone(),
            },
            coeff.clone(),
        );
        return;
    };
    let expansion = jm_power_normal(&params, pos + 1, exps[pos], fuel);
    for (word, c) in &expansion.terms {
        // X^{exps with pos zeroed} * (X^d T_v) * T_w
        let mut new_exps: Vec<u32> = exps.clone();
        new_exps[pos] = 0;
        for (ne, &d) in new_exps.iter_mut().zip(word.exps.iter()) {
            *ne += d as u32;
        }
        let tail = right_mul_by_t_word(&params, &word.w, w, fuel);
        for (tword, tc) in &tail.terms {
            debug_assert!(tword.exps.iter().all(|&x| x == 0));
            add_monomial_normalized(acc, &(&(coeff * c) * tc), new_exps.clone(), &tword.w, fuel);
        }
    }
}

/// `T_v * T_w` as an element (X-free), by right-multiplying along a reduced
/// word of `w`.
fn right_mul_by_t_word(
    params: &AlgebraParams,
    v: &Permutation,
    w: &Permutation,
    fuel: &mut Fuel,
) -> AlgebraElement {
    let mut cur = AlgebraElement::monomial(
        params,
        NormalWord {
            exps: vec![0; params.n()],
            w: v.clone(),
        },
    );
    for r in w.reduced_word() {
        cur = gen_t_right_mul(&cur, r, fuel);
    }
    cur
}

/// Normal form of `X_t^m` for arbitrary `m >= 0`: in-range exponents pass
/// through; position 1 reduces by the cyclotomic polynomial; positions
/// `t > 1` reduce by the descent identity. The result is supported on
/// positions `<= t`.
fn jm_power_normal(params: &AlgebraParams, t: usize, m: u32, fuel: &mut Fuel) -> AlgebraElement {
    fuel.burn();
    let ell = params.ell() as u32;
    let f = params.field();
    if m < ell {
        let mut exps = vec![0u16; params.n()];
        exps[t - 1] = m as u16;
        return AlgebraElement::monomial(
            params,
            NormalWord {
                exps,
                w: Permutation::identity(params.n()),
            },
        );
    }
    if t == 1 {
        // X_1^m = X_1^{m-l} * (-(c_0 + c_1 X_1 + ... + c_{l-1} X_1^{l-1}))
        let mut acc = AlgebraElement::zero(params);
        for (j, cj) in params.cyclo_lower().iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            let part = jm_power_normal(params, 1, m - ell + j as u32, fuel);
            acc.add_assign(&part.scale(&-cj));
        }
        return acc;
    }
    let s = t - 1;
    if params.is_degenerate() {
        // x_t^m = s_{t-1} x_{t-1}^m s_{t-1}
        //         + sum_{j=1}^{m} x_{t-1}^{j-1} x_t^{m-j} s_{t-1}
        let inner = jm_power_normal(params, s, m, fuel);
        let mut acc = gen_t_right_mul(&gen_t_left_mul(s, &inner, fuel), s, fuel);
        for j in 1..=m {
            let b = jm_power_normal(params, t, m - j, fuel);
            let shifted = x_mono_left_mul(&b, s, j - 1, fuel);
            acc.add_assign(&gen_t_right_mul(&shifted, s, fuel));
        }
        acc
    } else {
        // X_t^m = q^{-1} T_{t-1} X_{t-1}^m T_{t-1}
        //         + q^{-1}(q-1) sum_{j=1}^{m-1} X_{t-1}^{m-j} X_t^j T_{t-1}
        let q_inv = params.q().inv().expect("q is a unit");
        let q_minus_1 = params.q() - &f.one();
        let inner = jm_power_normal(params, s, m, fuel);
        let part1 = gen_t_right_mul(&gen_t_left_mul(s, &inner, fuel), s, fuel);
        let mut acc = part1.scale(&q_inv);
        let scale = &q_inv * &q_minus_1;
        for j in 1..m {
            let b = jm_power_normal(params, t, j, fuel);
            let shifted = x_mono_left_mul(&b, s, m - j, fuel);
            acc.add_assign(&gen_t_right_mul(&shifted, s, fuel).scale(&scale));
        }
        acc
    }
}

/// `X_pos^amount * elem` (left multiplication by a one-position X-monomial):
/// exponent addition followed by normalization.
fn x_mono_left_mul(
    elem: &AlgebraElement,
    pos: usize,
    amount: u32,
    fuel: &mut Fuel,
) -> AlgebraElement {
    if amount == 0 {
        return elem.clone();
    }
    let mut out = AlgebraElement::zero(&elem.params);
    for (word, c) in &elem.terms {
        let mut exps: Vec<u32> = word.exps.iter().map(|&x| x as u32).collect();
        exps[pos - 1] += amount;
        add_monomial_normalized(&mut out, c, exps, &word.w, fuel);
    }
    out
}
