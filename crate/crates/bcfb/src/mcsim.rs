//! Monte Carlo simulation of the random-coding schemes and the typicality
//! lemmas at small blocklengths.
//!
//! Codebooks are never stored: codeword `i` of a book is regenerated on demand
//! from a generator seeded by the book's key and `i`, so a scan can stop drawing
//! symbols as soon as typicality is ruled out. Trial `t` at blocklength `n`
//! runs on its own stream, which makes results independent of worker count.

use std::collections::HashMap;
use std::sync::Mutex;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::channels::{ChannelError, ChannelSpec, Dmbc};
use crate::info::{Alphabet, ConditionalPmf, InfoError, JointPmf};
use crate::polytope::sig9;
use crate::regions::{
    blahut_arimoto, dueck_theorem3_scheme, induced_joint, AuxiliaryScheme, DueckV0, RegionError, UpdateScheme,
    Variant,
};

/// Default cap on codeword evaluations in one codebook scan.
pub const DEFAULT_RESOURCE_CAP: u64 = 1 << 22;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("sequence {index} has length {got}, expected {expected}")]
    Length { index: usize, got: usize, expected: usize },
    #[error("symbol {value} out of range in sequence {index}")]
    Symbol { index: usize, value: usize },
    #[error("expected {expected} sequences, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("{what} needs {needed:.0} codeword evaluations, cap is {cap}; reduce n*rate by {reduce_bits:.2} bits")]
    Resource { what: String, needed: f64, cap: u64, reduce_bits: f64 },
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

pub type Result<T> = std::result::Result<T, SimError>;

/// Cap from `BCFB_RESOURCE_CAP`, or [`DEFAULT_RESOURCE_CAP`].
pub fn resource_cap() -> u64 {
    std::env::var("BCFB_RESOURCE_CAP")
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .filter(|&c| c > 0)
        .unwrap_or(DEFAULT_RESOURCE_CAP)
}

fn check_budget(what: &str, needed: f64) -> Result<()> {
    let cap = resource_cap();
    if needed > cap as f64 {
        return Err(SimError::Resource {
            what: what.to_string(),
            needed,
            cap,
            reduce_bits: needed.log2() - (cap as f64).log2(),
        });
    }
    Ok(())
}

// ------------------------------------------------------------ typicality

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypicalityParams {
    pub eps: f64,
    pub n: usize,
}

impl TypicalityParams {
    pub fn new(eps: f64, n: usize) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(SimError::Param(format!("eps must lie in (0, 1), got {eps}")));
        }
        if n == 0 {
            return Err(SimError::Param("blocklength must be positive".into()));
        }
        Ok(TypicalityParams { eps, n })
    }

    pub fn marton_encoder(&self) -> f64 {
        self.eps / 32.0
    }

    pub fn lgw_encoder(&self) -> f64 {
        self.eps / 2.0
    }
}

/// Allowed count range `[lo, hi]` for a cell of probability `p`.
fn count_bounds(p: f64, n: usize, eps: f64) -> (u32, u32) {
    if p <= 0.0 {
        return (0, 0);
    }
    let a = n as f64 * p * (1.0 - eps);
    let b = n as f64 * p * (1.0 + eps);
    let lo = (a - 1e-9 * a.max(1.0)).ceil().max(0.0);
    let hi = (b + 1e-9 * b.max(1.0)).floor().min(n as f64);
    (lo as u32, hi as u32)
}

/// Per-cell count bounds of a law at fixed `(n, eps)`.
#[derive(Clone, Debug)]
pub struct TypChecker {
    n: usize,
    sizes: Vec<usize>,
    strides: Vec<usize>,
    lo: Vec<u32>,
    hi: Vec<u32>,
    need: u32,
    feasible: bool,
}

/// Reusable count buffer.
#[derive(Clone, Debug, Default)]
pub struct Scratch {
    counts: Vec<u32>,
    touched: Vec<usize>,
}

impl TypChecker {
    pub fn new(law: &JointPmf, n: usize, eps: f64) -> Self {
        let sizes = law.sizes();
        let mut strides = vec![1; sizes.len()];
        for k in (0..sizes.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * sizes[k + 1];
        }
        let (lo, hi): (Vec<u32>, Vec<u32>) = law.mass().iter().map(|&p| count_bounds(p, n, eps)).unzip();
        let need: u32 = lo.iter().sum();
        let room: u64 = hi.iter().map(|&h| h as u64).sum();
        let feasible = need as usize <= n && room >= n as u64;
        TypChecker { n, sizes, strides, lo, hi, need, feasible }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Whether any sequence tuple at all can be typical.
    pub fn feasible(&self) -> bool {
        self.feasible
    }

    pub fn bounds(&self) -> (&[u32], &[u32]) {
        (&self.lo, &self.hi)
    }

    /// Partial cell index of every position from the known sequences.
    pub fn base(&self, seqs: &[Option<&[usize]>]) -> Vec<usize> {
        let mut base = vec![0; self.n];
        for (k, s) in seqs.iter().enumerate() {
            if let Some(s) = s {
                for (b, &v) in base.iter_mut().zip(s.iter()) {
                    *b += v * self.strides[k];
                }
            }
        }
        base
    }

    fn run(&self, scratch: &mut Scratch, mut cell: impl FnMut(usize) -> usize) -> bool {
        if !self.feasible {
            return false;
        }
        if scratch.counts.len() < self.lo.len() {
            scratch.counts.resize(self.lo.len(), 0);
        }
        let mut deficit = self.need as usize;
        let mut ok = true;
        for j in 0..self.n {
            let c = cell(j);
            scratch.touched.push(c);
            let k = &mut scratch.counts[c];
            *k += 1;
            if *k > self.hi[c] {
                ok = false;
                break;
            }
            if *k <= self.lo[c] {
                deficit -= 1;
            }
            if deficit > self.n - j - 1 {
                ok = false;
                break;
            }
        }
        for &c in &scratch.touched {
            scratch.counts[c] = 0;
        }
        scratch.touched.clear();
        ok
    }

    /// Tests a full tuple; sequences must already be validated.
    pub fn check(&self, seqs: &[&[usize]], scratch: &mut Scratch) -> bool {
        self.run(scratch, |j| seqs.iter().zip(&self.strides).map(|(s, st)| s[j] * st).sum())
    }

    /// Tests `base` completed by the candidate symbols `sym(j)` on `axis`.
    pub fn scan(&self, scratch: &mut Scratch, base: &[usize], axis: usize, mut sym: impl FnMut(usize) -> usize) -> bool {
        let st = self.strides[axis];
        self.run(scratch, |j| base[j] + sym(j) * st)
    }

    fn validate(&self, seqs: &[&[usize]]) -> Result<()> {
        if seqs.len() != self.sizes.len() {
            return Err(SimError::Arity { expected: self.sizes.len(), got: seqs.len() });
        }
        for (index, s) in seqs.iter().enumerate() {
            if s.len() != self.n {
                return Err(SimError::Length { index, got: s.len(), expected: self.n });
            }
            if let Some(&value) = s.iter().find(|&&v| v >= self.sizes[index]) {
                return Err(SimError::Symbol { index, value });
            }
        }
        Ok(())
    }
}

/// Robust joint typicality of `seqs` (one per law axis, in axis order).
pub fn is_jointly_typical(seqs: &[&[usize]], law: &JointPmf, eps: f64) -> Result<bool> {
    if !(eps > 0.0) {
        return Err(SimError::Param(format!("eps must be positive, got {eps}")));
    }
    let n = seqs.first().map(|s| s.len()).unwrap_or(0);
    if n == 0 {
        return Err(SimError::Length { index: 0, got: 0, expected: 1 });
    }
    let checker = TypChecker::new(law, n, eps);
    checker.validate(seqs)?;
    Ok(checker.check(seqs, &mut Scratch::default()))
}

// ------------------------------------------------------------- codebooks

/// I.i.d. (or row-conditional) codebook generated lazily from a key.
#[derive(Clone, Debug)]
pub struct Codebook {
    key: u64,
    n: usize,
    len: u64,
    rows: Vec<Vec<u64>>,
}

fn thresholds(probs: &[f64]) -> Vec<u64> {
    const ONE: u64 = 1 << 32;
    let total: f64 = probs.iter().sum();
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len().saturating_sub(1));
    let mut acc = 0.0;
    probs
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            acc += p;
            if k >= last || total <= 0.0 {
                ONE
            } else {
                ((acc / total) * ONE as f64).round().min(ONE as f64) as u64
            }
        })
        .collect()
}

impl Codebook {
    fn new<R: Rng + ?Sized>(rng: &mut R, n: usize, len: u64, rows: &[Vec<f64>]) -> Self {
        let key = rng.next_u64();
        Codebook { key, n, len, rows: rows.iter().map(|r| thresholds(r)).collect() }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn stream(&self, index: u64) -> Xoshiro256PlusPlus {
        Xoshiro256PlusPlus::seed_from_u64(self.key ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
    }

    fn draw<G: RngCore + ?Sized>(row: &[u64], rng: &mut G) -> usize {
        let r = rng.next_u32() as u64;
        row.iter().position(|&t| r < t).unwrap_or(row.len() - 1)
    }

    /// Symbol source for codeword `index`; `cond[j]` selects the row at `j`.
    fn symbols<'a>(&'a self, index: u64, cond: Option<&'a [usize]>) -> impl FnMut(usize) -> usize + 'a {
        let mut rng = self.stream(index);
        move |j| {
            let row = cond.map_or(0, |c| c[j]);
            Self::draw(&self.rows[row], &mut rng)
        }
    }

    pub fn codeword(&self, index: u64, cond: Option<&[usize]>) -> Vec<usize> {
        let mut f = self.symbols(index, cond);
        (0..self.n).map(&mut f).collect()
    }
}

fn floor_size(n: usize, rate: f64, what: &str) -> Result<u64> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(SimError::Param(format!("{what} rate must be finite and nonnegative, got {rate}")));
    }
    let bits = n as f64 * rate;
    if bits >= 62.0 {
        return Err(SimError::Resource {
            what: what.to_string(),
            needed: bits.exp2(),
            cap: resource_cap(),
            reduce_bits: bits - (resource_cap() as f64).log2(),
        });
    }
    // floor(2^{nR}) with a guard against 2^{k} - ulp.
    let v = (bits.exp2() * (1.0 + 1e-12)).floor() as u64;
    Ok(v.max(1))
}

fn uniform_index<R: Rng + ?Sized>(rng: &mut R, len: u64) -> u64 {
    if len <= 1 {
        0
    } else {
        rng.gen_range(0..len)
    }
}

// ---------------------------------------------------------------- Marton

/// Marton rates in bits per channel use; `r1b`, `r2b` are the binning rates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MartonRates {
    pub r0: f64,
    pub r1p: f64,
    #[serde(default)]
    pub r1c: f64,
    pub r2p: f64,
    #[serde(default)]
    pub r2c: f64,
    #[serde(default)]
    pub r1b: f64,
    #[serde(default)]
    pub r2b: f64,
}

/// Index sets of the data messages plus update indices carried alongside.
///
/// Common index `((m0 * c1 + c1') * c2 + c2') * k0 + k0'`, private index
/// `p_i * k_i + k_i'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub m0: u64,
    pub c: [u64; 2],
    pub p: [u64; 2],
    pub k: [u64; 3],
}

/// Data messages: `M0`, and `Mi = (p[i], c[i])`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Messages {
    pub m0: u64,
    pub c: [u64; 2],
    pub p: [u64; 2],
}

impl Layout {
    pub fn from_rates(r: &MartonRates, n: usize) -> Result<Self> {
        Ok(Layout {
            m0: floor_size(n, r.r0, "R0")?,
            c: [floor_size(n, r.r1c, "R1c")?, floor_size(n, r.r2c, "R2c")?],
            p: [floor_size(n, r.r1p, "R1p")?, floor_size(n, r.r2p, "R2p")?],
            k: [1, 1, 1],
        })
    }

    /// Layout carrying only update indices.
    pub fn update_only(k: [u64; 3]) -> Self {
        Layout { m0: 1, c: [1, 1], p: [1, 1], k }
    }

    pub fn with_update(mut self, k: [u64; 3]) -> Self {
        self.k = k;
        self
    }

    fn mul(a: u64, b: u64) -> Result<u64> {
        a.checked_mul(b).ok_or_else(|| SimError::Param("index set too large".into()))
    }

    pub fn common_len(&self) -> Result<u64> {
        Self::mul(Self::mul(Self::mul(self.m0, self.c[0])?, self.c[1])?, self.k[0])
    }

    pub fn private_len(&self, i: usize) -> Result<u64> {
        Self::mul(self.p[i], self.k[i + 1])
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Messages {
        Messages {
            m0: uniform_index(rng, self.m0),
            c: [uniform_index(rng, self.c[0]), uniform_index(rng, self.c[1])],
            p: [uniform_index(rng, self.p[0]), uniform_index(rng, self.p[1])],
        }
    }

    pub fn pack(&self, m: &Messages, k: [u64; 3]) -> (u64, [u64; 2]) {
        let common = ((m.m0 * self.c[0] + m.c[0]) * self.c[1] + m.c[1]) * self.k[0] + k[0];
        (common, [m.p[0] * self.k[1] + k[1], m.p[1] * self.k[2] + k[2]])
    }

    /// `(m0, [c1, c2], k0)`.
    pub fn unpack_common(&self, common: u64) -> (u64, [u64; 2], u64) {
        let k0 = common % self.k[0];
        let r = common / self.k[0];
        let c2 = r % self.c[1];
        let r = r / self.c[1];
        (r / self.c[0], [r % self.c[0], c2], k0)
    }

    /// `(p_i, k_i)` for receiver index `i` in {0, 1}.
    pub fn unpack_private(&self, i: usize, private: u64) -> (u64, u64) {
        (private / self.k[i + 1], private % self.k[i + 1])
    }
}

/// Index set sizes of a Marton code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSizes {
    pub mc: u64,
    pub mp: [u64; 2],
    pub l: [u64; 2],
}

#[derive(Clone, Debug)]
pub struct MartonCode {
    pub aux: AuxiliaryScheme,
    pub n: usize,
    pub sizes: CodeSizes,
    c0: Codebook,
    c1: Codebook,
    c2: Codebook,
}

/// Draws a Marton code whose index sets are the floors of `2^{n*rate}`.
pub fn gen_marton_code<R: Rng + ?Sized>(
    aux: &AuxiliaryScheme,
    rates: &MartonRates,
    n: usize,
    rng: &mut R,
) -> Result<MartonCode> {
    let layout = Layout::from_rates(rates, n)?;
    let l = [floor_size(n, rates.r1b, "R1'")?, floor_size(n, rates.r2b, "R2'")?];
    let sizes = CodeSizes { mc: layout.common_len()?, mp: [layout.private_len(0)?, layout.private_len(1)?], l };
    MartonCode::with_sizes(aux, sizes, n, rng)
}

impl MartonCode {
    pub fn with_sizes<R: Rng + ?Sized>(aux: &AuxiliaryScheme, sizes: CodeSizes, n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(SimError::Param("blocklength must be positive".into()));
        }
        let s = aux.sizes()?;
        // Codewords are regenerated on demand, so the binding cost is the
        // longest single scan a decoder or encoder will make.
        check_budget("Marton common codebook", sizes.mc as f64)?;
        for i in 0..2 {
            check_budget("Marton private codebook", sizes.mp[i] as f64 * sizes.l[i] as f64)?;
        }
        check_budget("Marton encoder", sizes.l[0] as f64 * sizes.l[1] as f64)?;
        let p0 = aux.law_u.marginalize(&["U0"])?;
        let cond_rows = |name: &str| -> Result<Vec<Vec<f64>>> {
            let j = aux.law_u.marginalize(&["U0", name])?;
            let k = j.sizes()[1];
            Ok((0..s[0])
                .map(|u0| {
                    let row = &j.mass()[u0 * k..(u0 + 1) * k];
                    let tot: f64 = row.iter().sum();
                    if tot > 0.0 {
                        row.iter().map(|p| p / tot).collect()
                    } else {
                        let mut r = vec![0.0; k];
                        r[0] = 1.0;
                        r
                    }
                })
                .collect())
        };
        let c0 = Codebook::new(rng, n, sizes.mc, &[p0.mass().to_vec()]);
        let c1 = Codebook::new(rng, n, sizes.mc * sizes.mp[0] * sizes.l[0], &cond_rows("U1")?);
        let c2 = Codebook::new(rng, n, sizes.mc * sizes.mp[1] * sizes.l[1], &cond_rows("U2")?);
        Ok(MartonCode { aux: aux.clone(), n, sizes, c0, c1, c2 })
    }

    fn book(&self, i: usize) -> &Codebook {
        if i == 0 {
            &self.c1
        } else {
            &self.c2
        }
    }

    fn index(&self, i: usize, mc: u64, mp: u64, l: u64) -> u64 {
        (mc * self.sizes.mp[i] + mp) * self.sizes.l[i] + l
    }

    pub fn u0(&self, mc: u64) -> Vec<usize> {
        self.c0.codeword(mc, None)
    }

    /// Codeword `u_{i+1}(mc, mp, l)` for `i` in {0, 1}.
    pub fn ui(&self, i: usize, mc: u64, mp: u64, l: u64) -> Vec<usize> {
        let u0 = self.u0(mc);
        self.book(i).codeword(self.index(i, mc, mp, l), Some(&u0))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MartonEncoding {
    pub x: Vec<usize>,
    pub u: [Vec<usize>; 3],
    pub l: [u64; 2],
    pub list_len: u64,
    pub fallback: bool,
}

/// Picks a jointly typical `(l1, l2)` pair at `eps/32` uniformly from the
/// list, or a uniform pair when the list is empty.
pub fn marton_encode<R: Rng + ?Sized>(
    code: &MartonCode,
    common: u64,
    private: [u64; 2],
    eps: f64,
    rng: &mut R,
) -> Result<MartonEncoding> {
    let sz = &code.sizes;
    if common >= sz.mc || private[0] >= sz.mp[0] || private[1] >= sz.mp[1] {
        return Err(SimError::Param("message index out of range".into()));
    }
    check_budget("Marton encoder", sz.l[0] as f64 * sz.l[1] as f64)?;
    let params = TypicalityParams::new(eps, code.n)?;
    let e = params.marton_encoder();
    let law = &code.aux.law_u;
    let full = TypChecker::new(law, code.n, e);
    let mut scratch = Scratch::default();
    let u0 = code.u0(common);
    let mut cands: [Vec<(u64, Vec<usize>)>; 2] = [Vec::new(), Vec::new()];
    if full.feasible() {
        for i in 0..2 {
            let name = if i == 0 { "U1" } else { "U2" };
            let marg = TypChecker::new(&law.marginalize(&["U0", name])?, code.n, e);
            let base = marg.base(&[Some(&u0), None]);
            for l in 0..sz.l[i] {
                let idx = code.index(i, common, private[i], l);
                if marg.scan(&mut scratch, &base, 1, code.book(i).symbols(idx, Some(&u0))) {
                    cands[i].push((l, code.book(i).codeword(idx, Some(&u0))));
                }
            }
        }
    }
    let mut list = Vec::new();
    for (l1, w1) in &cands[0] {
        let base = full.base(&[Some(&u0), Some(w1), None]);
        for (l2, w2) in &cands[1] {
            if full.scan(&mut scratch, &base, 2, |j| w2[j]) {
                list.push([*l1, *l2]);
            }
        }
    }
    let list_len = list.len() as u64;
    let (l, fallback) = if list.is_empty() {
        ([uniform_index(rng, sz.l[0]), uniform_index(rng, sz.l[1])], true)
    } else {
        (list[uniform_index(rng, list_len) as usize], false)
    };
    let u1 = code.book(0).codeword(code.index(0, common, private[0], l[0]), Some(&u0));
    let u2 = code.book(1).codeword(code.index(1, common, private[1], l[1]), Some(&u0));
    let x = (0..code.n).map(|j| code.aux.x_of([u0[j], u1[j], u2[j]])).collect();
    Ok(MartonEncoding { x, u: [u0, u1, u2], l, list_len, fallback })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MartonDecoded {
    pub common: u64,
    pub private: u64,
    pub list_len: u64,
    pub fallback: bool,
}

/// Law of `(U0, Ui, Yi)` for the plain decoder of `receiver`.
pub fn marton_decoder_law(aux: &AuxiliaryScheme, ch: &Dmbc, receiver: usize) -> Result<JointPmf> {
    let j = induced_joint(aux, None, ch)?;
    let (u, y) = receiver_axes(receiver)?;
    Ok(j.marginalize(&["U0", u, y])?)
}

fn receiver_axes(receiver: usize) -> Result<(&'static str, &'static str)> {
    match receiver {
        1 => Ok(("U1", "Y1")),
        2 => Ok(("U2", "Y2")),
        r => Err(SimError::Channel(ChannelError::Receiver(r))),
    }
}

/// List decoder of `receiver`. `law` has axes `U0, Ui` followed by one axis
/// per observed sequence in `obs`.
pub fn marton_decode<R: Rng + ?Sized>(
    code: &MartonCode,
    receiver: usize,
    obs: &[&[usize]],
    law: &JointPmf,
    eps: f64,
    rng: &mut R,
) -> Result<MartonDecoded> {
    let (uname, _) = receiver_axes(receiver)?;
    let names = law.names();
    if names.len() != obs.len() + 2 || names[0] != "U0" || names[1] != uname {
        return Err(SimError::Param(format!(
            "decoder law must have axes [U0, {uname}, ...] with {} observation axes, got {names:?}",
            obs.len()
        )));
    }
    let i = receiver - 1;
    let sz = &code.sizes;
    check_budget("Marton decoder (common scan)", sz.mc as f64)?;
    check_budget("Marton decoder (private scan)", sz.mp[i] as f64 * sz.l[i] as f64)?;
    TypicalityParams::new(eps, code.n)?;
    let full = TypChecker::new(law, code.n, eps);
    let mut seqs: Vec<&[usize]> = vec![&[], &[]];
    seqs.extend_from_slice(obs);
    let dummy = vec![0; code.n];
    seqs[0] = &dummy;
    seqs[1] = &dummy;
    full.validate(&seqs)?;
    let keep: Vec<&str> = names.iter().enumerate().filter(|(k, _)| *k != 1).map(|(_, n)| *n).collect();
    let marg = TypChecker::new(&law.marginalize(&keep)?, code.n, eps);
    let mut scratch = Scratch::default();
    let mut list = Vec::new();
    if full.feasible() {
        let mut mopt: Vec<Option<&[usize]>> = vec![None];
        mopt.extend(obs.iter().map(|s| Some(*s)));
        let mbase = marg.base(&mopt);
        for mc in 0..sz.mc {
            if !marg.scan(&mut scratch, &mbase, 0, code.c0.symbols(mc, None)) {
                continue;
            }
            let u0 = code.u0(mc);
            let mut opt: Vec<Option<&[usize]>> = vec![Some(&u0), None];
            opt.extend(obs.iter().map(|s| Some(*s)));
            let base = full.base(&opt);
            for mp in 0..sz.mp[i] {
                for l in 0..sz.l[i] {
                    let idx = code.index(i, mc, mp, l);
                    if full.scan(&mut scratch, &base, 1, code.book(i).symbols(idx, Some(&u0))) {
                        list.push((mc, mp));
                    }
                }
            }
        }
    }
    let list_len = list.len() as u64;
    Ok(if list.is_empty() {
        MartonDecoded {
            common: uniform_index(rng, sz.mc),
            private: uniform_index(rng, sz.mp[i]),
            list_len,
            fallback: true,
        }
    } else {
        let (common, private) = list[uniform_index(rng, list_len) as usize];
        MartonDecoded { common, private, list_len, fallback: false }
    })
}

// ----------------------------------------------------------------- LGW-SI

/// Bin rates `r` and in-bin rates `rb` of the three LGW codebooks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LgwRates {
    pub r: [f64; 3],
    #[serde(default)]
    pub rb: [f64; 3],
}

#[derive(Clone, Debug)]
pub struct LgwCode {
    pub n: usize,
    /// Bins per codebook.
    pub k: [u64; 3],
    /// Codewords per bin.
    pub l: [u64; 3],
    books: [Codebook; 3],
    law: JointPmf,
}

const LGW_AXES: [&str; 6] = ["S", "Y1", "Y2", "V0", "V1", "V2"];

/// Draws an LGW-SI code. `law` has axes `S, Y1, Y2, V0, V1, V2` (any order),
/// `S` being the encoder's source symbol.
pub fn gen_lgw_code<R: Rng + ?Sized>(law: &JointPmf, rates: &LgwRates, n: usize, rng: &mut R) -> Result<LgwCode> {
    if n == 0 {
        return Err(SimError::Param("blocklength must be positive".into()));
    }
    let law = law.marginalize(&LGW_AXES)?;
    let mut k = [0; 3];
    let mut l = [0; 3];
    for v in 0..3 {
        k[v] = floor_size(n, rates.r[v], "LGW bin")?;
        l[v] = floor_size(n, rates.rb[v], "LGW in-bin")?;
        check_budget("LGW codebook", k[v] as f64 * l[v] as f64)?;
    }
    let mk = |v: usize, rng: &mut R| -> Result<Codebook> {
        let pv = law.marginalize(&[LGW_AXES[3 + v]])?;
        Ok(Codebook::new(rng, n, k[v] * l[v], &[pv.mass().to_vec()]))
    };
    let books = [mk(0, rng)?, mk(1, rng)?, mk(2, rng)?];
    Ok(LgwCode { n, k, l, books, law })
}

impl LgwCode {
    pub fn law(&self) -> &JointPmf {
        &self.law
    }

    pub fn codeword(&self, v: usize, bin: u64, l: u64) -> Vec<usize> {
        self.books[v].codeword(bin * self.l[v] + l, None)
    }

    fn source_size(&self) -> usize {
        self.law.sizes()[0]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LgwEncoding {
    pub k: [u64; 3],
    pub l: [u64; 3],
    pub v: [Vec<usize>; 3],
    pub list_len: u64,
    pub fallback: bool,
}

/// Picks codewords with `(S, V0, Vi)` typical at `eps/2` for both `i`.
pub fn lgw_encode<R: Rng + ?Sized>(code: &LgwCode, s: &[usize], eps: f64, rng: &mut R) -> Result<LgwEncoding> {
    let params = TypicalityParams::new(eps, code.n)?;
    let e = params.lgw_encoder();
    if s.len() != code.n {
        return Err(SimError::Length { index: 0, got: s.len(), expected: code.n });
    }
    if let Some(&value) = s.iter().find(|&&v| v >= code.source_size()) {
        return Err(SimError::Symbol { index: 0, value });
    }
    let src = TypChecker::new(&code.law.marginalize(&["S"])?, code.n, e);
    let sv0 = TypChecker::new(&code.law.marginalize(&["S", "V0"])?, code.n, e);
    let svi = [
        TypChecker::new(&code.law.marginalize(&["S", "V0", "V1"])?, code.n, e),
        TypChecker::new(&code.law.marginalize(&["S", "V0", "V2"])?, code.n, e),
    ];
    let mut scratch = Scratch::default();
    // (v0 index, admissible v1 indices, admissible v2 indices)
    let mut hits: Vec<(u64, Vec<u64>, Vec<u64>)> = Vec::new();
    let mut list_len = 0u64;
    if src.check(&[s], &mut scratch) && svi.iter().all(|c| c.feasible()) {
        let base0 = sv0.base(&[Some(s), None]);
        for g in 0..code.books[0].len() {
            if !sv0.scan(&mut scratch, &base0, 1, code.books[0].symbols(g, None)) {
                continue;
            }
            let v0 = code.books[0].codeword(g, None);
            let mut sets = [Vec::new(), Vec::new()];
            for i in 0..2 {
                let base = svi[i].base(&[Some(s), Some(&v0), None]);
                for h in 0..code.books[i + 1].len() {
                    if svi[i].scan(&mut scratch, &base, 2, code.books[i + 1].symbols(h, None)) {
                        sets[i].push(h);
                    }
                }
            }
            let cnt = sets[0].len() as u64 * sets[1].len() as u64;
            if cnt > 0 {
                list_len += cnt;
                let [a, b] = sets;
                hits.push((g, a, b));
            }
        }
    }
    let (idx, fallback) = if list_len == 0 {
        let pick = |v: usize, rng: &mut R| uniform_index(rng, code.books[v].len());
        ([pick(0, rng), pick(1, rng), pick(2, rng)], true)
    } else {
        let mut t = uniform_index(rng, list_len);
        let mut out = [0; 3];
        for (g, a, b) in &hits {
            let cnt = a.len() as u64 * b.len() as u64;
            if t < cnt {
                out = [*g, a[(t / b.len() as u64) as usize], b[(t % b.len() as u64) as usize]];
                break;
            }
            t -= cnt;
        }
        (out, false)
    };
    let mut k = [0; 3];
    let mut l = [0; 3];
    for v in 0..3 {
        k[v] = idx[v] / code.l[v];
        l[v] = idx[v] % code.l[v];
    }
    let v = [
        code.books[0].codeword(idx[0], None),
        code.books[1].codeword(idx[1], None),
        code.books[2].codeword(idx[2], None),
    ];
    Ok(LgwEncoding { k, l, v, list_len, fallback })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LgwDecoded {
    pub v: Vec<usize>,
    /// Typical pairs found, counted up to 2.
    pub matches: usize,
}

/// Reconstruction of `V_receiver` from bin indices and side information.
pub fn lgw_decode<R: Rng + ?Sized>(
    code: &LgwCode,
    receiver: usize,
    k0: u64,
    ki: u64,
    y: &[usize],
    eps: f64,
    rng: &mut R,
) -> Result<LgwDecoded> {
    let (_, yname) = receiver_axes(receiver)?;
    TypicalityParams::new(eps, code.n)?;
    if k0 >= code.k[0] || ki >= code.k[receiver] {
        return Err(SimError::Param("LGW bin index out of range".into()));
    }
    check_budget("LGW decoder", code.l[0] as f64 * code.l[receiver] as f64)?;
    let vname = if receiver == 1 { "V1" } else { "V2" };
    let full = TypChecker::new(&code.law.marginalize(&["V0", vname, yname])?, code.n, eps);
    let marg = TypChecker::new(&code.law.marginalize(&["V0", yname])?, code.n, eps);
    let dummy = vec![0; code.n];
    full.validate(&[&dummy, &dummy, y])?;
    let mut scratch = Scratch::default();
    let mut matches = 0;
    let mut found = 0;
    if full.feasible() {
        let mbase = marg.base(&[None, Some(y)]);
        'outer: for l0 in 0..code.l[0] {
            if !marg.scan(&mut scratch, &mbase, 0, code.books[0].symbols(k0 * code.l[0] + l0, None)) {
                continue;
            }
            let v0 = code.codeword(0, k0, l0);
            let base = full.base(&[Some(&v0), None, Some(y)]);
            for li in 0..code.l[receiver] {
                let h = ki * code.l[receiver] + li;
                if full.scan(&mut scratch, &base, 1, code.books[receiver].symbols(h, None)) {
                    matches += 1;
                    found = h;
                    if matches > 1 {
                        break 'outer;
                    }
                }
            }
        }
    }
    let h = if matches == 1 {
        found
    } else {
        uniform_index(rng, code.books[receiver].len())
    };
    Ok(LgwDecoded { v: code.books[receiver].codeword(h, None), matches })
}

/// Joint law with the `parts` axes merged (row-major) into one axis `S`,
/// followed by `rest`.
pub fn merge_source(j: &JointPmf, parts: &[&str], rest: &[&str]) -> Result<JointPmf> {
    let mut order: Vec<&str> = parts.to_vec();
    order.extend_from_slice(rest);
    let m = j.marginalize(&order)?;
    let sizes = m.sizes();
    let ssize: usize = sizes[..parts.len()].iter().product();
    let mut axes = vec![Alphabet::new("S", ssize)];
    for (k, name) in rest.iter().enumerate() {
        axes.push(Alphabet::new(*name, sizes[parts.len() + k]));
    }
    let mut mass = vec![0.0; axes.iter().map(|a| a.size).product()];
    let out_sizes: Vec<usize> = axes.iter().map(|a| a.size).collect();
    m.for_each_positive(|sym, p| {
        let s = mixed_radix(&sym[..parts.len()], &sizes[..parts.len()]);
        let mut idx = s;
        for (k, &v) in sym[parts.len()..].iter().enumerate() {
            idx = idx * out_sizes[k + 1] + v;
        }
        mass[idx] += p;
    });
    Ok(JointPmf::new(axes, mass)?)
}

fn mixed_radix(sym: &[usize], sizes: &[usize]) -> usize {
    sym.iter().zip(sizes).fold(0, |acc, (&v, &s)| acc * s + v)
}

// ----------------------------------------------------------- block Markov

/// Message rates of the data layer and rates of the update (LGW) layer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BlockRates {
    pub data: MartonRates,
    pub update: LgwRates,
    /// Binning rates of the final block's Marton code.
    #[serde(default)]
    pub last_binning: [f64; 2],
}

#[derive(Clone, Debug)]
pub struct BlockMarkovConfig {
    pub aux: AuxiliaryScheme,
    pub upd: UpdateScheme,
    pub ch: Dmbc,
    pub rates: BlockRates,
    pub b: usize,
    pub gamma: f64,
    pub n: usize,
    pub eps: f64,
    pub seed: u64,
}

impl BlockMarkovConfig {
    pub fn last_len(&self) -> usize {
        (self.gamma * self.n as f64).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.b == 0 {
            return Err(SimError::Param("need at least one data block".into()));
        }
        if !(self.gamma > 1.0) {
            return Err(SimError::Param(format!("gamma must exceed 1, got {}", self.gamma)));
        }
        TypicalityParams::new(self.eps, self.n)?;
        let r = &self.rates.update.r;
        for i in 1..=2 {
            let need = (r[0] + r[i]) / self.gamma;
            if need <= 0.0 {
                continue;
            }
            let w = self.ch.marginal_channel(i)?;
            let rows: Vec<Vec<f64>> = (0..w.given_len()).map(|x| w.row(x).to_vec()).collect();
            let cap = blahut_arimoto(&rows, 1e-9, 10_000);
            if need >= cap {
                return Err(SimError::Param(format!(
                    "last block needs {need:.4} bits/use at receiver {i}, single-user capacity is {cap:.4}; raise gamma"
                )));
            }
        }
        Ok(())
    }

    /// Same data rates over the channel without feedback and with constant
    /// update variables.
    pub fn baseline(&self) -> Result<Self> {
        let ch = self.ch.without_feedback()?;
        let upd = UpdateScheme::constant(Variant::Full, &self.aux, &ch)?;
        let mut rates = self.rates;
        rates.update = LgwRates::default();
        Ok(BlockMarkovConfig { ch, upd, rates, ..self.clone() })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialReport {
    /// `block_errors[b][i]`: receiver `i+1` got `(M0, Mi)` of block `b` wrong.
    pub block_errors: Vec<[bool; 2]>,
    pub error: bool,
    pub marton_fallbacks: usize,
    pub lgw_fallbacks: usize,
    pub lgw_ambiguous: usize,
    pub trials: usize,
}

struct BlockSetup {
    layout: Layout,
    last_layout: Layout,
    sizes: CodeSizes,
    last_sizes: CodeSizes,
    dec_law: [JointPmf; 2],
    last_dec_law: [JointPmf; 2],
    lgw_law: JointPmf,
    source_parts: Vec<usize>,
}

fn block_setup(cfg: &BlockMarkovConfig) -> Result<BlockSetup> {
    cfg.validate()?;
    let n = cfg.n;
    let ur = &cfg.rates.update;
    let mut kbins = [0; 3];
    for v in 0..3 {
        kbins[v] = floor_size(n, ur.r[v], "update")?;
    }
    let layout = Layout::from_rates(&cfg.rates.data, n)?.with_update(kbins);
    let l = [floor_size(n, cfg.rates.data.r1b, "R1'")?, floor_size(n, cfg.rates.data.r2b, "R2'")?];
    let sizes = CodeSizes { mc: layout.common_len()?, mp: [layout.private_len(0)?, layout.private_len(1)?], l };
    let nl = cfg.last_len();
    let last_layout = Layout::update_only(kbins);
    let last_sizes = CodeSizes {
        mc: last_layout.common_len()?,
        mp: [last_layout.private_len(0)?, last_layout.private_len(1)?],
        l: [
            floor_size(nl, cfg.rates.last_binning[0], "last R1'")?,
            floor_size(nl, cfg.rates.last_binning[1], "last R2'")?,
        ],
    };
    let j = induced_joint(&cfg.aux, Some(&cfg.upd), &cfg.ch)?;
    let dec_law = [j.marginalize(&["U0", "U1", "Y1", "V1"])?, j.marginalize(&["U0", "U2", "Y2", "V2"])?];
    let last_dec_law = [marton_decoder_law(&cfg.aux, &cfg.ch, 1)?, marton_decoder_law(&cfg.aux, &cfg.ch, 2)?];
    let parts: &[&str] = match cfg.upd.variant {
        Variant::Full => &["U0", "U1", "U2", "Yt"],
        Variant::Star => &["X", "Yt"],
    };
    let lgw_law = merge_source(&j, parts, &LGW_AXES[1..])?;
    let jm = j.marginalize(parts)?;
    Ok(BlockSetup {
        layout,
        last_layout,
        sizes,
        last_sizes,
        dec_law,
        last_dec_law,
        lgw_law,
        source_parts: jm.sizes(),
    })
}

fn transmit<R: Rng + ?Sized>(ch: &Dmbc, x: &[usize], rng: &mut R) -> Result<[Vec<usize>; 3]> {
    let mut out = [Vec::with_capacity(x.len()), Vec::with_capacity(x.len()), Vec::with_capacity(x.len())];
    for &xj in x {
        let (a, b, c) = ch.sample(xj, rng)?;
        out[0].push(a);
        out[1].push(b);
        out[2].push(c);
    }
    Ok(out)
}

/// One end-to-end run of the block-Markov feedback scheme.
pub fn block_markov_trial<R: Rng + ?Sized>(cfg: &BlockMarkovConfig, rng: &mut R) -> Result<TrialReport> {
    let st = block_setup(cfg)?;
    block_markov_run(cfg, &st, rng)
}

fn block_markov_run<R: Rng + ?Sized>(cfg: &BlockMarkovConfig, st: &BlockSetup, rng: &mut R) -> Result<TrialReport> {
    let (n, b) = (cfg.n, cfg.b);
    let mut report = TrialReport { block_errors: vec![[false; 2]; b], trials: 1, ..Default::default() };
    let mut marton = Vec::with_capacity(b);
    let mut lgw = Vec::with_capacity(b);
    for _ in 0..b {
        marton.push(MartonCode::with_sizes(&cfg.aux, st.sizes, n, rng)?);
        lgw.push(gen_lgw_code(&st.lgw_law, &cfg.rates.update, n, rng)?);
    }
    let last = MartonCode::with_sizes(&cfg.aux, st.last_sizes, cfg.last_len(), rng)?;
    let msgs: Vec<Messages> = (0..b).map(|_| st.layout.random(rng)).collect();

    let mut outputs: Vec<[Vec<usize>; 2]> = Vec::with_capacity(b);
    let mut kprev = [0u64; 3];
    for blk in 0..b {
        let (common, private) = st.layout.pack(&msgs[blk], kprev);
        let enc = marton_encode(&marton[blk], common, private, cfg.eps, rng)?;
        report.marton_fallbacks += usize::from(enc.fallback);
        let [y1, y2, yt] = transmit(&cfg.ch, &enc.x, rng)?;
        let s: Vec<usize> = (0..n)
            .map(|j| match cfg.upd.variant {
                Variant::Full => mixed_radix(&[enc.u[0][j], enc.u[1][j], enc.u[2][j], yt[j]], &st.source_parts),
                Variant::Star => mixed_radix(&[enc.x[j], yt[j]], &st.source_parts),
            })
            .collect();
        let up = lgw_encode(&lgw[blk], &s, cfg.eps, rng)?;
        report.lgw_fallbacks += usize::from(up.fallback);
        kprev = up.k;
        outputs.push([y1, y2]);
    }
    let enc = marton_encode(&last, kprev[0], [kprev[1], kprev[2]], cfg.eps, rng)?;
    report.marton_fallbacks += usize::from(enc.fallback);
    let [ly1, ly2, _] = transmit(&cfg.ch, &enc.x, rng)?;
    let last_out = [ly1, ly2];

    let mut wrong = [false; 2];
    for i in 0..2 {
        let d = marton_decode(&last, i + 1, &[&last_out[i]], &st.last_dec_law[i], cfg.eps, rng)?;
        let (_, _, mut k0) = st.last_layout.unpack_common(d.common);
        let (_, mut ki) = st.last_layout.unpack_private(i, d.private);
        let mut est = vec![Messages::default(); b];
        for blk in (0..b).rev() {
            let y = &outputs[blk][i];
            let vhat = lgw_decode(&lgw[blk], i + 1, k0, ki, y, cfg.eps, rng)?;
            report.lgw_ambiguous += usize::from(vhat.matches > 1);
            let d = marton_decode(&marton[blk], i + 1, &[y, &vhat.v], &st.dec_law[i], cfg.eps, rng)?;
            let (m0, c, k0p) = st.layout.unpack_common(d.common);
            let (p, kip) = st.layout.unpack_private(i, d.private);
            est[blk].m0 = m0;
            est[blk].c[i] = c[i];
            est[blk].p[i] = p;
            report.block_errors[blk][i] = m0 != msgs[blk].m0 || c[i] != msgs[blk].c[i] || p != msgs[blk].p[i];
            k0 = k0p;
            ki = kip;
        }
        let sent: Vec<(u64, u64, u64)> = msgs.iter().map(|m| (m.m0, m.c[i], m.p[i])).collect();
        let got: Vec<(u64, u64, u64)> = est.iter().map(|m| (m.m0, m.c[i], m.p[i])).collect();
        wrong[i] = sent != got;
    }
    report.error = wrong[0] || wrong[1];
    Ok(report)
}

// ----------------------------------------------------------------- lemmas

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaKind {
    Covering,
    Packing,
    MvPacking,
}

impl LemmaKind {
    pub fn name(self) -> &'static str {
        match self {
            LemmaKind::Covering => "covering",
            LemmaKind::Packing => "packing",
            LemmaKind::MvPacking => "mv_packing",
        }
    }
}

/// Exact sampler for the lemma events.
///
/// Given the fixed sequence(s), the probability `p` that one i.i.d. codeword
/// is jointly typical depends only on the fixed type, and factorizes over
/// the fixed symbols (multinomial box probabilities). The event over `M`
/// codewords is then a single Bernoulli draw.
struct LemmaTable {
    /// Per fixed column symbol: bounds over the codeword symbol.
    lo: Vec<Vec<u32>>,
    hi: Vec<Vec<u32>>,
    q: Vec<f64>,
    fixed: Vec<Vec<u64>>,
    fixed_sizes: Vec<usize>,
    ln_fact: Vec<f64>,
}

impl LemmaTable {
    fn new(kind: LemmaKind, law: &JointPmf, n: usize, eps: f64) -> Result<Self> {
        let names = law.names();
        let (var, fixed): (&str, Vec<&str>) = match kind {
            LemmaKind::Covering | LemmaKind::Packing => {
                if names.len() != 2 {
                    return Err(SimError::Param("covering/packing law needs two axes".into()));
                }
                (names[1], vec![names[0]])
            }
            LemmaKind::MvPacking => {
                if names.len() != 3 {
                    return Err(SimError::Param("multivariate packing law needs three axes".into()));
                }
                (names[0], vec![names[1], names[2]])
            }
        };
        let mut order = fixed.clone();
        order.push(var);
        let m = law.marginalize(&order)?;
        let sizes = m.sizes();
        let nv = *sizes.last().unwrap_or(&1);
        let cols: usize = sizes[..fixed.len()].iter().product();
        let (mut lo, mut hi) = (vec![vec![0; nv]; cols], vec![vec![0; nv]; cols]);
        for c in 0..cols {
            for v in 0..nv {
                let (a, b) = count_bounds(m.mass()[c * nv + v], n, eps);
                lo[c][v] = a;
                hi[c][v] = b;
            }
        }
        let q = law.marginalize(&[var])?.mass().to_vec();
        let fixed_rows = fixed
            .iter()
            .map(|f| Ok(thresholds(law.marginalize(&[f])?.mass())))
            .collect::<Result<Vec<_>>>()?;
        let mut ln_fact = vec![0.0; n + 1];
        for k in 1..=n {
            ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
        }
        Ok(LemmaTable { lo, hi, q, fixed: fixed_rows, fixed_sizes: sizes[..fixed.len()].to_vec(), ln_fact })
    }

    fn sample_type(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
        let mut counts = vec![0u32; self.lo.len()];
        for _ in 0..n {
            let sym: Vec<usize> = self.fixed.iter().map(|row| Codebook::draw(row, rng)).collect();
            counts[mixed_radix(&sym, &self.fixed_sizes)] += 1;
        }
        counts
    }

    /// `ln P(one codeword typical | fixed type)`.
    fn ln_p(&self, counts: &[u32]) -> f64 {
        let mut total = 0.0;
        for (c, &cnt) in counts.iter().enumerate() {
            let v = self.ln_box(cnt as usize, &self.lo[c], &self.hi[c]);
            if v == f64::NEG_INFINITY {
                return v;
            }
            total += v;
        }
        total
    }

    fn ln_box(&self, c: usize, lo: &[u32], hi: &[u32]) -> f64 {
        let mut f = vec![f64::NEG_INFINITY; c + 1];
        f[0] = 0.0;
        for (v, &qv) in self.q.iter().enumerate() {
            let mut g = vec![f64::NEG_INFINITY; c + 1];
            let (a, b) = (lo[v] as usize, (hi[v] as usize).min(c));
            let lq = if qv > 0.0 { qv.ln() } else { f64::NEG_INFINITY };
            for (j, &fj) in f.iter().enumerate() {
                if fj == f64::NEG_INFINITY {
                    continue;
                }
                for k in a..=b.min(c - j) {
                    let t = if k == 0 { 0.0 } else { k as f64 * lq - self.ln_fact[k] };
                    if t == f64::NEG_INFINITY {
                        continue;
                    }
                    g[j + k] = log_add(g[j + k], fj + t);
                }
            }
            f = g;
        }
        if f[c] == f64::NEG_INFINITY {
            f[c]
        } else {
            self.ln_fact[c] + f[c]
        }
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Probability that none of `m` independent codewords hits, from `ln p`.
fn none_hit(ln_p: f64, m: f64) -> f64 {
    if ln_p == f64::NEG_INFINITY {
        return 1.0;
    }
    (m * (-ln_p.exp()).ln_1p()).exp()
}

/// Empirical frequency of each lemma's failure event per blocklength:
/// covering, no codeword typical with `X^n`; packing and multivariate
/// packing, some codeword (tuple) typical.
///
/// For [`LemmaKind::MvPacking`] the rates must be `[r1, 0, 0]`, with law axes
/// `U1, U2, U3`.
pub fn lemma_experiment(
    kind: LemmaKind,
    law: &JointPmf,
    rates: &[f64],
    n_list: &[usize],
    trials: usize,
    eps: f64,
    seed: u64,
    workers: Option<usize>,
) -> Result<Vec<ResultRow>> {
    let r = match (kind, rates) {
        (LemmaKind::MvPacking, [r1, r2, r3]) if *r2 == 0.0 && *r3 == 0.0 => *r1,
        (LemmaKind::MvPacking, _) => {
            return Err(SimError::Param("multivariate packing takes rates [r1, 0, 0]".into()));
        }
        (_, [r]) => *r,
        _ => return Err(SimError::Param("covering/packing takes one rate".into())),
    };
    if !(r >= 0.0) {
        return Err(SimError::Param(format!("rate must be nonnegative, got {r}")));
    }
    let mut rows = Vec::new();
    for &n in n_list {
        TypicalityParams::new(eps, n)?;
        let table = LemmaTable::new(kind, law, n, eps)?;
        let bits = n as f64 * r;
        let m = match kind {
            LemmaKind::Covering => bits.exp2().ceil(),
            _ => bits.exp2().floor().max(1.0),
        };
        let cache: Mutex<HashMap<Vec<u32>, f64>> = Mutex::new(HashMap::new());
        let (errors, _) = run_trials(trials, seed, n as u64, workers, |rng| {
            let counts = table.sample_type(n, rng);
            let cached = cache.lock().ok().and_then(|c| c.get(&counts).copied());
            let lp = match cached {
                Some(v) => v,
                None => {
                    let v = table.ln_p(&counts);
                    if let Ok(mut c) = cache.lock() {
                        c.insert(counts, v);
                    }
                    v
                }
            };
            let miss = none_hit(lp, m);
            let event = match kind {
                LemmaKind::Covering => miss,
                _ => 1.0 - miss,
            };
            Ok((rng.gen::<f64>() < event, false))
        })?;
        rows.push(ResultRow::new(n, trials, errors, 0));
    }
    Ok(rows)
}

// ---------------------------------------------------------------- harness

/// RNG of trial `t` in the experiment tagged `tag` (the blocklength).
pub fn trial_rng(seed: u64, tag: u64, t: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    r.set_stream(t as u64);
    r
}

/// Runs `trials` independent trials and sums `(error, fallback)` flags.
pub fn run_trials<F>(trials: usize, seed: u64, tag: u64, workers: Option<usize>, f: F) -> Result<(usize, usize)>
where
    F: Fn(&mut ChaCha8Rng) -> Result<(bool, bool)> + Sync + Send,
{
    let job = || {
        (0..trials)
            .into_par_iter()
            .map(|t| f(&mut trial_rng(seed, tag, t)).map(|(e, fb)| (usize::from(e), usize::from(fb))))
            .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))
    };
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| SimError::Param(format!("thread pool: {e}")))?
            .install(job),
        None => job(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub n: usize,
    pub trials: usize,
    pub errors: usize,
    pub error_rate: f64,
    pub fallback_rate: f64,
}

impl ResultRow {
    pub fn new(n: usize, trials: usize, errors: usize, fallbacks: usize) -> Self {
        let t = trials.max(1) as f64;
        ResultRow { n, trials, errors, error_rate: errors as f64 / t, fallback_rate: fallbacks as f64 / t }
    }
}

/// Auxiliary and update choices referenced from an experiment file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SchemeSpec {
    /// Independent uniform `U0, U1, U2` with `x = (u0 * |U1| + u1) * |U2| + u2`
    /// and constant update variables.
    Uniform { sizes: [usize; 3] },
    /// Dueck channel auxiliaries with the chosen `V0`.
    DueckTheorem3 { v0: DueckV0 },
    Explicit {
        aux: AuxiliaryScheme,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        update: Option<UpdateScheme>,
    },
}

impl SchemeSpec {
    pub fn build(&self, ch: &Dmbc) -> Result<(AuxiliaryScheme, UpdateScheme)> {
        match self {
            SchemeSpec::Uniform { sizes } => {
                let axes = ["U0", "U1", "U2"].iter().zip(sizes).map(|(nm, &s)| Alphabet::new(*nm, s)).collect();
                let law = JointPmf::uniform(axes)?;
                let total: usize = sizes.iter().product();
                if total > ch.input_size() {
                    return Err(SimError::Param(format!(
                        "uniform scheme needs |X| >= {total}, channel has {}",
                        ch.input_size()
                    )));
                }
                let aux = AuxiliaryScheme::new(law, (0..total).collect())?;
                let upd = UpdateScheme::constant(Variant::Full, &aux, ch)?;
                Ok((aux, upd))
            }
            SchemeSpec::DueckTheorem3 { v0 } => Ok(dueck_theorem3_scheme(ch, *v0)?),
            SchemeSpec::Explicit { aux, update } => {
                let upd = match update {
                    Some(u) => u.clone(),
                    None => UpdateScheme::constant(Variant::Full, aux, ch)?,
                };
                Ok((aux.clone(), upd))
            }
        }
    }
}

fn default_eps() -> f64 {
    0.15
}

fn default_gamma() -> f64 {
    4.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Experiment {
    Marton {
        channel: ChannelSpec,
        scheme: SchemeSpec,
        rates: MartonRates,
    },
    Lgw {
        /// Axes `S, Y1, Y2`.
        source: JointPmf,
        /// Given `S`, out `V0, V1, V2`.
        update: ConditionalPmf,
        rates: LgwRates,
    },
    BlockMarkov {
        channel: ChannelSpec,
        scheme: SchemeSpec,
        rates: BlockRates,
        blocks: usize,
        #[serde(default = "default_gamma")]
        gamma: f64,
        /// Run the no-feedback comparison instead.
        #[serde(default)]
        baseline: bool,
    },
    Lemma {
        lemma: LemmaKind,
        law: JointPmf,
        rates: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    #[serde(flatten)]
    pub experiment: Experiment,
    pub n_list: Vec<usize>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).unwrap_or_default();
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Runs every blocklength of an experiment.
pub fn run_experiment(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Vec<ResultRow>> {
    if cfg.trials == 0 || cfg.n_list.is_empty() {
        return Err(SimError::Param("need at least one trial and one blocklength".into()));
    }
    match &cfg.experiment {
        Experiment::Lemma { lemma, law, rates } => {
            lemma_experiment(*lemma, law, rates, &cfg.n_list, cfg.trials, cfg.eps, cfg.seed, workers)
        }
        Experiment::Marton { channel, scheme, rates } => {
            let ch = channel.build()?;
            let (aux, _) = scheme.build(&ch)?;
            marton_experiment(&aux, &ch, rates, &cfg.n_list, cfg.trials, cfg.eps, cfg.seed, workers)
        }
        Experiment::Lgw { source, update, rates } => {
            lgw_experiment(source, update, rates, &cfg.n_list, cfg.trials, cfg.eps, cfg.seed, workers)
        }
        Experiment::BlockMarkov { channel, scheme, rates, blocks, gamma, baseline } => {
            let ch = channel.build()?;
            let (aux, upd) = scheme.build(&ch)?;
            let mut rows = Vec::new();
            for &n in &cfg.n_list {
                let mut bm = BlockMarkovConfig {
                    aux: aux.clone(),
                    upd: upd.clone(),
                    ch: ch.clone(),
                    rates: *rates,
                    b: *blocks,
                    gamma: *gamma,
                    n,
                    eps: cfg.eps,
                    seed: cfg.seed,
                };
                if *baseline {
                    bm = bm.baseline()?;
                }
                rows.push(block_markov_experiment(&bm, cfg.trials, workers)?);
            }
            Ok(rows)
        }
    }
}

/// Error rate of the block-Markov scheme at `cfg.n`; the fallback column
/// counts trials with any encoder fallback.
pub fn block_markov_experiment(cfg: &BlockMarkovConfig, trials: usize, workers: Option<usize>) -> Result<ResultRow> {
    let st = block_setup(cfg)?;
    let (errors, fallbacks) = run_trials(trials, cfg.seed, cfg.n as u64, workers, |rng| {
        let r = block_markov_run(cfg, &st, rng)?;
        Ok((r.error, r.marton_fallbacks + r.lgw_fallbacks > 0))
    })?;
    Ok(ResultRow::new(cfg.n, trials, errors, fallbacks))
}

/// Plain Marton code over `ch`: error when either receiver misses its
/// `(M0, Mi)`.
pub fn marton_experiment(
    aux: &AuxiliaryScheme,
    ch: &Dmbc,
    rates: &MartonRates,
    n_list: &[usize],
    trials: usize,
    eps: f64,
    seed: u64,
    workers: Option<usize>,
) -> Result<Vec<ResultRow>> {
    let laws = [marton_decoder_law(aux, ch, 1)?, marton_decoder_law(aux, ch, 2)?];
    let mut rows = Vec::new();
    for &n in n_list {
        TypicalityParams::new(eps, n)?;
        let layout = Layout::from_rates(rates, n)?;
        // Reject oversize configurations before any trial runs.
        let probe = gen_marton_code(aux, rates, n, &mut trial_rng(seed, n as u64, 0))?;
        check_budget("Marton encoder", probe.sizes.l[0] as f64 * probe.sizes.l[1] as f64)?;
        let (errors, fallbacks) = run_trials(trials, seed, n as u64, workers, |rng| {
            let code = gen_marton_code(aux, rates, n, rng)?;
            let msg = layout.random(rng);
            let (common, private) = layout.pack(&msg, [0; 3]);
            let enc = marton_encode(&code, common, private, eps, rng)?;
            let [y1, y2, _] = transmit(ch, &enc.x, rng)?;
            let mut err = false;
            for (i, y) in [y1, y2].iter().enumerate() {
                let d = marton_decode(&code, i + 1, &[y], &laws[i], eps, rng)?;
                let (m0, c, _) = layout.unpack_common(d.common);
                let (p, _) = layout.unpack_private(i, d.private);
                err |= m0 != msg.m0 || c[i] != msg.c[i] || p != msg.p[i];
            }
            Ok((err, enc.fallback))
        })?;
        rows.push(ResultRow::new(n, trials, errors, fallbacks));
    }
    Ok(rows)
}

/// LGW-SI code on an i.i.d. source: error when some receiver's
/// reconstruction is not typical with the source at `eps`.
pub fn lgw_experiment(
    source: &JointPmf,
    update: &ConditionalPmf,
    rates: &LgwRates,
    n_list: &[usize],
    trials: usize,
    eps: f64,
    seed: u64,
    workers: Option<usize>,
) -> Result<Vec<ResultRow>> {
    let src = source.marginalize(&["S", "Y1", "Y2"])?;
    let law = src.compose(update)?;
    let rows_s = thresholds(src.mass());
    let ssz = src.sizes();
    let sv = [law.marginalize(&["S", "V1"])?, law.marginalize(&["S", "V2"])?];
    let mut rows = Vec::new();
    for &n in n_list {
        TypicalityParams::new(eps, n)?;
        gen_lgw_code(&law, rates, n, &mut trial_rng(seed, n as u64, 0))?;
        let checks = [TypChecker::new(&sv[0], n, eps), TypChecker::new(&sv[1], n, eps)];
        let (errors, fallbacks) = run_trials(trials, seed, n as u64, workers, |rng| {
            let code = gen_lgw_code(&law, rates, n, rng)?;
            let mut seq = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
            for _ in 0..n {
                let mut idx = Codebook::draw(&rows_s, rng);
                let y2 = idx % ssz[2];
                idx /= ssz[2];
                seq[2].push(y2);
                seq[1].push(idx % ssz[1]);
                seq[0].push(idx / ssz[1]);
            }
            let enc = lgw_encode(&code, &seq[0], eps, rng)?;
            let mut err = false;
            let mut scratch = Scratch::default();
            for i in 1..=2 {
                let d = lgw_decode(&code, i, enc.k[0], enc.k[i], &seq[i], eps, rng)?;
                err |= !checks[i - 1].check(&[&seq[0], &d.v], &mut scratch);
            }
            Ok((err, enc.fallback))
        })?;
        rows.push(ResultRow::new(n, trials, errors, fallbacks));
    }
    Ok(rows)
}

/// One row group of a lemma suite: a law, a lemma and a rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaCase {
    pub name: String,
    pub lemma: LemmaKind,
    pub law: JointPmf,
    pub rates: Vec<f64>,
    /// Information quantity the rate is compared against.
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaSuite {
    pub cases: Vec<LemmaCase>,
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub eps: f64,
    pub seed: u64,
}

impl LemmaSuite {
    /// Covering and packing on a doubly symmetric binary source with crossover
    /// 0.1, multivariate packing on `U3 = U1 xor U2`, each at threshold +/- 0.2.
    pub fn standard(seed: u64) -> Result<Self> {
        let dsbs = JointPmf::from_fn(vec![Alphabet::new("X", 2), Alphabet::new("Y", 2)], |s| {
            if s[0] == s[1] {
                0.45
            } else {
                0.05
            }
        })?;
        let xor = JointPmf::from_fn(
            vec![Alphabet::new("U1", 2), Alphabet::new("U2", 2), Alphabet::new("U3", 2)],
            |s| if s[0] ^ s[1] == s[2] { 0.25 } else { 0.0 },
        )?;
        let i = dsbs.mi(&["X"], &["Y"])?;
        let mv = xor.mi(&["U1"], &["U2"])? + xor.mi(&["U3"], &["U1", "U2"])?;
        let mut cases = Vec::new();
        for (kind, law, base) in [(LemmaKind::Covering, &dsbs, i), (LemmaKind::Packing, &dsbs, i), (LemmaKind::MvPacking, &xor, mv)] {
            for (side, d) in [("above", 0.2), ("below", -0.2)] {
                let r = base + d;
                let rates = if kind == LemmaKind::MvPacking { vec![r, 0.0, 0.0] } else { vec![r] };
                cases.push(LemmaCase {
                    name: format!("{}_{side}", kind.name()),
                    lemma: kind,
                    law: law.clone(),
                    rates,
                    threshold: base,
                });
            }
        }
        Ok(LemmaSuite { cases, n_list: vec![50, 100, 200], trials: 2000, eps: 0.4, seed })
    }

    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).unwrap_or_default();
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// One result row per case and blocklength, in case order. Each case runs
    /// on seed `seed + index`.
    pub fn run(&self, workers: Option<usize>) -> Result<Vec<(usize, ResultRow)>> {
        let mut out = Vec::new();
        for (k, c) in self.cases.iter().enumerate() {
            let rows =
                lemma_experiment(c.lemma, &c.law, &c.rates, &self.n_list, self.trials, self.eps, self.seed.wrapping_add(k as u64), workers)?;
            out.extend(rows.into_iter().map(|r| (k, r)));
        }
        Ok(out)
    }

    pub fn csv(&self, rows: &[(usize, ResultRow)]) -> String {
        let mut s = format!("# config_sha256={} seed={}\n", self.hash(), self.seed);
        s.push_str("case,lemma,rate,threshold,n,trials,errors,error_rate\n");
        for (k, r) in rows {
            let c = &self.cases[*k];
            let kind = c.lemma.name();
            s.push_str(&format!(
                "{},{kind},{},{},{},{},{},{}\n",
                c.name,
                sig9(c.rates[0]),
                sig9(c.threshold),
                r.n,
                r.trials,
                r.errors,
                sig9(r.error_rate)
            ));
        }
        s
    }
}

/// Results CSV with a header comment carrying the config hash and seed.
pub fn results_csv(cfg: &ExperimentConfig, rows: &[ResultRow]) -> String {
    let mut s = format!("# config_sha256={} seed={}\n", cfg.hash(), cfg.seed);
    s.push_str("n,trials,errors,error_rate,fallback_rate\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{},{}\n", r.n, r.trials, r.errors, sig9(r.error_rate), sig9(r.fallback_rate)));
    }
    s
}
