//! Nilpotency exponents and eventual periods of the Jucys-Murphy elements:
//! brute-force periods from the power sequence of the matrices, predicted
//! periods from the nilpotency data, and the biconditional checks tying the
//! two together.
//!
//! The brute-force comparator is ground truth: a sequence of powers
//! `M^0, M^1, ...` over a finite field must repeat; the first confirmed
//! repeat `M^a = M^b` (hash first, exact entrywise confirmation second)
//! yields the minimal pre-period `N = a` and period `d = b - a`.

use std::collections::HashMap;
use std::hash::{DefaultHasher, Hash, Hasher};

use crate::hecke::{AlgebraParams, Flavor};
use crate::idempotents::{smallest_p_power_at_least, SpectralData};
use crate::regrep::{nilpotency_index, Matrix, RegularRep};
use crate::{Error, Result};

/// Which branch of the period prediction applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseTag {
    /// Degenerate, some supported sequence has residue 0 at this strand.
    DegenerateWithZeroResidue,
    /// Degenerate, no supported sequence has residue 0 at this strand.
    DegenerateNoZeroResidue,
    /// Non-degenerate with every supported residue zero at this strand:
    /// the period is a plain p-power.
    NonDegeneratePPower,
    /// Non-degenerate general case: the period is e times a p-power.
    NonDegenerateGeneral,
}

impl CaseTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseTag::DegenerateWithZeroResidue => "degenerate-with-zero-residue",
            CaseTag::DegenerateNoZeroResidue => "degenerate-no-zero-residue",
            CaseTag::NonDegeneratePPower => "non-degenerate-p-power",
            CaseTag::NonDegenerateGeneral => "non-degenerate-general",
        }
    }
}

/// Everything measured and predicted for one strand.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PeriodReport {
    pub r: usize,
    /// Smallest s >= 1 with y_r^s = 0.
    pub nil_index: u64,
    /// Smallest l with y_r^{p^l} = 0.
    pub l_r: u32,
    pub n_observed: u64,
    pub d_observed: u64,
    pub n_predicted: u64,
    pub d_predicted: u64,
    /// The headline closed form for the branch: `p^{l_r}(p-1)` degenerate,
    /// `e p^{l_r}` or `p^{l_r}` non-degenerate. Coincides with
    /// `d_predicted` unless the residues occurring at this strand have
    /// small multiplicative order (see `closed_form_agrees`).
    pub d_closed_form: u64,
    /// Whether the headline closed form equals the block prediction. It can
    /// fail only when no supported residue at this strand has full order
    /// p-1 (resp. e), e.g. when only residues 0 and 1 occur.
    pub closed_form_agrees: bool,
    pub case_tag: CaseTag,
    /// Whether the support-based branch condition agrees with the
    /// kappa-based one (r = 1 and kappa all-zero). Informational: the
    /// support condition is the one that decides the branch.
    pub branch_agreement: bool,
    /// Power-vs-nilpotency biconditionals at s = l_r - 1 (both sides must
    /// fail) and s = l_r (both sides must hold).
    pub biconditionals_pass: bool,
    /// Direct power identities: degenerate x_r^{d_r} = 1 when no supported
    /// residue is zero; non-degenerate X_r^{e p^{l_r}} = 1 with minimality.
    pub power_identity_pass: bool,
    pub verdict: bool,
}

impl PeriodReport {
    pub fn csv_header() -> &'static str {
        "flavor,p,e,n,kappa,r,nil_index,l_r,N_obs,d_obs,N_pred,d_pred,case,verdict"
    }

    pub fn csv_row(&self, params: &AlgebraParams) -> String {
        let kappa = params
            .kappa()
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            params.flavor(),
            params.p(),
            params.e(),
            params.n(),
            kappa,
            self.r,
            self.nil_index,
            self.l_r,
            self.n_observed,
            self.d_observed,
            self.n_predicted,
            self.d_predicted,
            self.case_tag.as_str(),
            if self.verdict { "pass" } else { "fail" }
        )
    }
}

/// Nilpotency data of `y_r`: the exact nilpotency index and the exponent
/// `l_r` with `p^{l_r}` the first vanishing p-power.
pub fn nilpotency(rep: &RegularRep, r: usize) -> Result<(u64, u32)> {
    let spectral = SpectralData::compute(rep);
    nilpotency_with(rep, &spectral, r)
}

fn nilpotency_with(rep: &RegularRep, spectral: &SpectralData, r: usize) -> Result<(u64, u32)> {
    let y = spectral.y_matrix(rep, r);
    let nil = nilpotency_index(&y).ok_or(Error::NonNilpotent { r })?;
    Ok((nil, smallest_p_power_at_least(rep.params().p(), nil)))
}

/// Default search bound for the power repeat:
/// `e * p^{ceil(log_p D)} * (p - 1) + D + 1`, which always covers the
/// theoretical period and pre-period.
pub fn default_period_bound(rep: &RegularRep) -> u64 {
    let params = rep.params();
    let p = params.p();
    let d = rep.dim() as u64;
    let l_cap = smallest_p_power_at_least(p, d);
    let p_pow = p.pow(l_cap);
    params.e() * p_pow * (p - 1) + d + 1
}

/// Brute-force eventual period of `X_r`: returns the minimal
/// `(N_observed, d_observed)` with `X_r^N = X_r^{N + d}`. Powers start at
/// the identity (`X_r^0`); repeats are detected by canonical hash and
/// confirmed by exact recomputation before acceptance.
pub fn eventual_period(rep: &RegularRep, r: usize, bound: Option<u64>) -> Result<(u64, u64)> {
    let bound = bound.unwrap_or_else(|| default_period_bound(rep));
    let m = rep.gen_x_matrix(r);
    let mut seen: HashMap<u64, Vec<u64>> = HashMap::new();
    let mut current = Matrix::identity(m.ctx(), m.dim());
    for k in 0..=bound {
        let h = matrix_hash(&current);
        if let Some(earlier) = seen.get(&h) {
            for &a in earlier {
                // Confirm exactly: hash collisions must not produce repeats.
                if m.pow(a) == current {
                    return Ok((a, k - a));
                }
            }
        }
        seen.entry(h).or_default().push(k);
        current = current.mat_mul(m);
    }
    Err(Error::NoRepeatWithinBound { r, bound })
}

fn matrix_hash(m: &Matrix) -> u64 {
    let mut h = DefaultHasher::new();
    m.raw_data().hash(&mut h);
    h.finish()
}

/// Predicted `(N, d, case)` for strand `r`, from the nilpotency data.
pub fn predicted_period(rep: &RegularRep, r: usize) -> Result<(u64, u64, CaseTag)> {
    let spectral = SpectralData::compute(rep);
    let p = predicted_with(rep, &spectral, r)?;
    Ok((p.n, p.d, p.tag))
}

struct Prediction {
    n: u64,
    d: u64,
    d_closed_form: u64,
    tag: CaseTag,
    branch_agreement: bool,
}

/// Block-level prediction. Across the weight decomposition, `x_r` acts on
/// the block of residue `i` as `q_i + (nilpotent of index nu_{r,i})`. A
/// block with `q_i = 0` (degenerate flavor only) settles to zero and fixes
/// the pre-period; every other block is invertible with multiplicative
/// order `ord(q_i) * p^{l_{r,i}}`, and the period is the lcm of those
/// orders. The headline closed form replaces `lcm(ord(q_i))` by `p-1`
/// (resp. `e`) and every block exponent by the global `l_r`; the two agree
/// whenever a full-order residue attains the global nilpotency exponent,
/// which holds in particular for kappa = (0) at every strand beyond the
/// first.
fn predicted_with(rep: &RegularRep, spectral: &SpectralData, r: usize) -> Result<Prediction> {
    let params = rep.params();
    let p = params.p();
    let e = params.e();
    let (_, l) = nilpotency_with(rep, spectral, r)?;
    let p_pow_l = p.pow(l);
    let support = spectral.support_pairs();
    let zero_exists = support.iter().any(|(s, _)| s.residue(r) == 0);
    let all_zero = support.iter().all(|(s, _)| s.residue(r) == 0);
    let occurring: std::collections::BTreeSet<u64> =
        support.iter().map(|(s, _)| s.residue(r)).collect();
    let xr = rep.gen_x_matrix(r);
    let ident = Matrix::identity(params.field(), rep.dim());

    // Per-block p-exponents: smallest l with ((x_r - q_i) e_block)^{p^l} = 0.
    let mut block_l = std::collections::BTreeMap::new();
    for &i in &occurring {
        let block = spectral.projector_sum_with_residue(rep, r, i);
        let shifted = xr.sub(&ident.scale(&params.residue_value(i)));
        let nu = nilpotency_index(&shifted.mat_mul(&block)).ok_or(Error::NonNilpotent { r })?;
        block_l.insert(i, smallest_p_power_at_least(p, nu));
    }

    match params.flavor() {
        Flavor::Degenerate => {
            // Nonzero blocks carry multiplicative order ord(i) * p^{l_i};
            // the zero block is nilpotent and only delays the sequence.
            let mut d = 1u64;
            for &i in occurring.iter().filter(|&&i| i != 0) {
                let ord = params.residue_value(i).multiplicative_order();
                d = lcm_u64(d, ord * p.pow(block_l[&i]));
            }
            let d_closed_form = p_pow_l * (p - 1);
            let tag = if zero_exists {
                CaseTag::DegenerateWithZeroResidue
            } else {
                CaseTag::DegenerateNoZeroResidue
            };
            let n = if zero_exists {
                // N = min{k : x_r^k * sum_{i_r = 0} e(i) = 0}.
                let s0 = spectral.projector_sum_with_residue(rep, r, 0);
                let mut power = s0.clone();
                let mut n = None;
                for k in 0..=rep.dim() as u64 {
                    if power.is_zero() {
                        n = Some(k);
                        break;
                    }
                    power = xr.mat_mul(&power);
                }
                n.ok_or(Error::NonNilpotent { r })?
            } else {
                0
            };
            Ok(Prediction {
                n,
                d,
                d_closed_form,
                tag,
                branch_agreement: true,
            })
        }
        Flavor::NonDegenerate => {
            // Every block is invertible: q^i times a unipotent part, of
            // order ord(q^i) * p^{l_i} = (e / gcd(i, e)) * p^{l_i}.
            let mut d = 1u64;
            for &i in &occurring {
                let ord = if i == 0 {
                    1
                } else {
                    params.residue_value(i).multiplicative_order()
                };
                d = lcm_u64(d, ord * p.pow(block_l[&i]));
            }
            let kappa_branch = r == 1 && params.kappa().iter().all(|&c| c == 0);
            let branch_agreement = all_zero == kappa_branch;
            let (tag, d_closed_form) = if all_zero {
                (CaseTag::NonDegeneratePPower, p_pow_l)
            } else {
                (CaseTag::NonDegenerateGeneral, e * p_pow_l)
            };
            Ok(Prediction {
                n: 0,
                d,
                d_closed_form,
                tag,
                branch_agreement,
            })
        }
    }
}

fn lcm_u64(a: u64, b: u64) -> u64 {
    a / gcd_u64(a, b) * b
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Full per-strand verification: nilpotency, brute force, prediction, the
/// p-power biconditionals at `s = l_r - 1` and `s = l_r`, and the direct
/// power identities.
pub fn verify_periodicity(rep: &RegularRep) -> Result<Vec<PeriodReport>> {
    verify_periodicity_with_bound(rep, None)
}

pub fn verify_periodicity_with_bound(
    rep: &RegularRep,
    bound: Option<u64>,
) -> Result<Vec<PeriodReport>> {
    let params = rep.params();
    let p = params.p();
    let e = params.e();
    let spectral = SpectralData::compute(rep);
    let mut out = Vec::new();
    for r in 1..=params.n() {
        let (nil_index, l_r) = nilpotency_with(rep, &spectral, r)?;
        let (n_observed, d_observed) = eventual_period(rep, r, bound)?;
        let prediction = predicted_with(rep, &spectral, r)?;
        let Prediction {
            n: n_predicted,
            d: d_predicted,
            d_closed_form,
            tag: case_tag,
            branch_agreement,
        } = prediction;

        let xr = rep.gen_x_matrix(r);
        let y = spectral.y_matrix(rep, r);
        let mut biconditionals_pass = true;
        let mut svals = vec![l_r];
        if l_r >= 1 {
            svals.push(l_r - 1);
        }
        for s in svals {
            let p_pow_s = p.pow(s);
            let y_vanishes = y.pow(p_pow_s).is_zero();
            let equivalent = match params.flavor() {
                // x_r^{p^{s+1}} = x_r^{p^s}  <=>  y_r^{p^s} = 0
                Flavor::Degenerate => xr.pow(p_pow_s * p) == xr.pow(p_pow_s),
                // X_r^{e p^s} = 1  <=>  y_r^{p^s} = 0
                Flavor::NonDegenerate => xr.pow(e * p_pow_s).is_identity(),
            };
            if equivalent != y_vanishes {
                biconditionals_pass = false;
            }
            // In the all-zero-residue branch the plain p-power biconditional
            // X_r^{p^s} = 1 <=> y_r^{p^s} = 0 holds as well.
            if params.flavor() == Flavor::NonDegenerate
                && case_tag == CaseTag::NonDegeneratePPower
                && (xr.pow(p_pow_s).is_identity() != y_vanishes)
            {
                biconditionals_pass = false;
            }
        }

        let power_identity_pass = match params.flavor() {
            Flavor::Degenerate => {
                if case_tag == CaseTag::DegenerateNoZeroResidue {
                    // x_r^{d_r} = 1 when no supported residue is zero.
                    xr.pow(d_predicted).is_identity()
                } else {
                    true
                }
            }
            Flavor::NonDegenerate => {
                // X_r^{e p^{l_r}} = 1 always; minimality one level down.
                let holds = xr.pow(e * p.pow(l_r)).is_identity();
                let minimal = l_r == 0 || !xr.pow(e * p.pow(l_r - 1)).is_identity();
                holds && minimal
            }
        };

        let verdict = (n_observed, d_observed) == (n_predicted, d_predicted)
            && biconditionals_pass
            && power_identity_pass;
        out.push(PeriodReport {
            r,
            nil_index,
            l_r,
            n_observed,
            d_observed,
            n_predicted,
            d_predicted,
            d_closed_form,
            closed_form_agrees: d_closed_form == d_predicted,
            case_tag,
            branch_agreement,
            biconditionals_pass,
            power_identity_pass,
            verdict,
        });
    }
    Ok(out)
}
