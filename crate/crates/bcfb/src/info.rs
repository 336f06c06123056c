//! Finite-alphabet probability laws and Shannon measures.
//!
//! All logarithms are base 2. A [`JointPmf`] is a dense array over a labeled
//! product of alphabets, stored row-major (last axis varies fastest).
//! Inputs whose mass does not sum to one within [`TAU_NORM`] are rejected.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Normalization tolerance on construction.
pub const TAU_NORM: f64 = 1e-9;
/// Numeric tolerance for information identities; values in `[-TAU_NUM, 0)` clamp to 0.
pub const TAU_NUM: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfoError {
    #[error("unknown axis `{0}`")]
    UnknownAxis(String),
    #[error("duplicate axis `{0}`")]
    DuplicateAxis(String),
    #[error("axis `{0}` has size 0")]
    EmptyAlphabet(String),
    #[error("expected {expected} mass entries, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("invalid mass {value} at index {index}")]
    BadMass { value: f64, index: usize },
    #[error("mass sums to {0}, not 1")]
    NotNormalized(f64),
    #[error("axis groups overlap on `{0}`")]
    Overlap(String),
    #[error("conditioning event has zero probability")]
    ZeroEvent,
    #[error("probability {0} outside [0,1]")]
    OutOfRange(f64),
    #[error("symbol {value} out of range for axis `{axis}`")]
    Symbol { axis: String, value: usize },
    #[error("axis mismatch: {0}")]
    Mismatch(String),
    #[error("empty axis list")]
    NoAxes,
}

pub type Result<T> = std::result::Result<T, InfoError>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    pub name: String,
    pub size: usize,
}

impl Alphabet {
    pub fn new(name: impl Into<String>, size: usize) -> Self {
        Alphabet { name: name.into(), size }
    }
}

fn check_axes(axes: &[Alphabet]) -> Result<()> {
    for (i, a) in axes.iter().enumerate() {
        if a.size == 0 {
            return Err(InfoError::EmptyAlphabet(a.name.clone()));
        }
        if axes[..i].iter().any(|b| b.name == a.name) {
            return Err(InfoError::DuplicateAxis(a.name.clone()));
        }
    }
    Ok(())
}

fn volume(axes: &[Alphabet]) -> usize {
    axes.iter().map(|a| a.size).product()
}

fn check_mass(mass: &[f64]) -> Result<()> {
    for (index, &value) in mass.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(InfoError::BadMass { value, index });
        }
    }
    Ok(())
}

/// Odometer over a mixed-radix index space, last digit fastest.
struct Odometer<'a> {
    radix: &'a [usize],
    digits: Vec<usize>,
}

impl<'a> Odometer<'a> {
    fn new(radix: &'a [usize]) -> Self {
        Odometer { radix, digits: vec![0; radix.len()] }
    }

    fn step(&mut self) {
        for k in (0..self.radix.len()).rev() {
            self.digits[k] += 1;
            if self.digits[k] < self.radix[k] {
                return;
            }
            self.digits[k] = 0;
        }
    }
}

fn strides(sizes: &[usize]) -> Vec<usize> {
    let mut s = vec![1; sizes.len()];
    for k in (0..sizes.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * sizes[k + 1];
    }
    s
}

fn plogp_sum(mass: impl Iterator<Item = f64>) -> f64 {
    let h: f64 = mass.filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum();
    clamp(h)
}

fn clamp(v: f64) -> f64 {
    if v < 0.0 && v >= -TAU_NUM {
        0.0
    } else {
        v.max(0.0)
    }
}

#[derive(Deserialize)]
struct RawJoint {
    axes: Vec<Alphabet>,
    mass: Vec<f64>,
}

/// Probability mass over a labeled product of finite alphabets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJoint")]
pub struct JointPmf {
    axes: Vec<Alphabet>,
    mass: Vec<f64>,
}

impl TryFrom<RawJoint> for JointPmf {
    type Error = InfoError;
    fn try_from(r: RawJoint) -> Result<Self> {
        JointPmf::new(r.axes, r.mass)
    }
}

impl JointPmf {
    pub fn new(axes: Vec<Alphabet>, mass: Vec<f64>) -> Result<Self> {
        if axes.is_empty() {
            return Err(InfoError::NoAxes);
        }
        check_axes(&axes)?;
        let expected = volume(&axes);
        if mass.len() != expected {
            return Err(InfoError::Shape { expected, got: mass.len() });
        }
        check_mass(&mass)?;
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > TAU_NORM {
            return Err(InfoError::NotNormalized(total));
        }
        Ok(JointPmf { axes, mass })
    }

    /// Builds a law from a function of the joint symbol tuple.
    pub fn from_fn(axes: Vec<Alphabet>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        check_axes(&axes)?;
        let sizes: Vec<usize> = axes.iter().map(|a| a.size).collect();
        let n = volume(&axes);
        let mut odo = Odometer::new(&sizes);
        let mut mass = Vec::with_capacity(n);
        for _ in 0..n {
            mass.push(f(&odo.digits));
            odo.step();
        }
        JointPmf::new(axes, mass)
    }

    pub fn uniform(axes: Vec<Alphabet>) -> Result<Self> {
        check_axes(&axes)?;
        let n = volume(&axes);
        JointPmf::new(axes, vec![1.0 / n as f64; n])
    }

    pub fn point(axes: Vec<Alphabet>, symbols: &[usize]) -> Result<Self> {
        let target = symbols.to_vec();
        JointPmf::from_fn(axes, |s| if s == target.as_slice() { 1.0 } else { 0.0 })
    }

    /// Single-axis law from a probability vector.
    pub fn single(name: &str, probs: &[f64]) -> Result<Self> {
        JointPmf::new(vec![Alphabet::new(name, probs.len())], probs.to_vec())
    }

    /// Bernoulli(p) on a binary axis.
    pub fn bernoulli(name: &str, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(InfoError::OutOfRange(p));
        }
        JointPmf::single(name, &[1.0 - p, p])
    }

    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.size).collect()
    }

    pub fn names(&self) -> Vec<&str> {
        self.axes.iter().map(|a| a.name.as_str()).collect()
    }

    pub fn has_axis(&self, name: &str) -> bool {
        self.axes.iter().any(|a| a.name == name)
    }

    pub fn axis_pos(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| InfoError::UnknownAxis(name.to_string()))
    }

    pub fn axis(&self, name: &str) -> Result<&Alphabet> {
        Ok(&self.axes[self.axis_pos(name)?])
    }

    /// Flat index of a symbol tuple.
    pub fn index_of(&self, symbols: &[usize]) -> Result<usize> {
        if symbols.len() != self.axes.len() {
            return Err(InfoError::Shape { expected: self.axes.len(), got: symbols.len() });
        }
        let mut idx = 0;
        for (a, &s) in self.axes.iter().zip(symbols) {
            if s >= a.size {
                return Err(InfoError::Symbol { axis: a.name.clone(), value: s });
            }
            idx = idx * a.size + s;
        }
        Ok(idx)
    }

    pub fn prob(&self, symbols: &[usize]) -> Result<f64> {
        Ok(self.mass[self.index_of(symbols)?])
    }

    /// Calls `f(symbols, mass)` for every entry with positive mass.
    pub fn for_each_positive(&self, mut f: impl FnMut(&[usize], f64)) {
        let sizes = self.sizes();
        let mut odo = Odometer::new(&sizes);
        for &m in &self.mass {
            if m > 0.0 {
                f(&odo.digits, m);
            }
            odo.step();
        }
    }

    fn positions(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut pos = Vec::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(InfoError::DuplicateAxis(n.to_string()));
            }
            pos.push(self.axis_pos(n)?);
        }
        Ok(pos)
    }

    /// Marginal on `keep`, with axes in the order given.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPmf> {
        if keep.is_empty() {
            return Err(InfoError::NoAxes);
        }
        let pos = self.positions(keep)?;
        let axes: Vec<Alphabet> = pos.iter().map(|&p| self.axes[p].clone()).collect();
        let mass = self.marginal_mass(&pos);
        Ok(JointPmf { axes, mass })
    }

    fn marginal_mass(&self, pos: &[usize]) -> Vec<f64> {
        let out_sizes: Vec<usize> = pos.iter().map(|&p| self.axes[p].size).collect();
        let out_strides = strides(&out_sizes);
        let mut weight = vec![0usize; self.axes.len()];
        for (k, &p) in pos.iter().enumerate() {
            weight[p] = out_strides[k];
        }
        let mut out = vec![0.0; out_sizes.iter().product()];
        let sizes = self.sizes();
        let mut odo = Odometer::new(&sizes);
        for &m in &self.mass {
            if m > 0.0 {
                let t: usize = odo.digits.iter().zip(&weight).map(|(d, w)| d * w).sum();
                out[t] += m;
            }
            odo.step();
        }
        out
    }

    /// Conditional law given `on = value`; the conditioned axis is dropped.
    pub fn condition(&self, on: &str, value: usize) -> Result<JointPmf> {
        let p = self.axis_pos(on)?;
        if value >= self.axes[p].size {
            return Err(InfoError::Symbol { axis: on.to_string(), value });
        }
        if self.axes.len() == 1 {
            return Err(InfoError::NoAxes);
        }
        let mut total = 0.0;
        let mut mass = Vec::new();
        let sizes = self.sizes();
        let mut odo = Odometer::new(&sizes);
        for &m in &self.mass {
            if odo.digits[p] == value {
                mass.push(m);
                total += m;
            }
            odo.step();
        }
        if total <= 0.0 {
            return Err(InfoError::ZeroEvent);
        }
        mass.iter_mut().for_each(|m| *m /= total);
        let mut axes = self.axes.clone();
        axes.remove(p);
        Ok(JointPmf { axes, mass })
    }

    /// Joint Shannon entropy of the marginal on `axes`, in bits.
    pub fn entropy(&self, axes: &[&str]) -> Result<f64> {
        if axes.is_empty() {
            return Err(InfoError::NoAxes);
        }
        let pos = self.positions(axes)?;
        Ok(plogp_sum(self.marginal_mass(&pos).into_iter()))
    }

    fn entropy_or_zero(&self, axes: &[&str]) -> Result<f64> {
        if axes.is_empty() {
            Ok(0.0)
        } else {
            self.entropy(axes)
        }
    }

    /// H(A|C).
    pub fn conditional_entropy(&self, a: &[&str], c: &[&str]) -> Result<f64> {
        disjoint(a, c)?;
        let ac: Vec<&str> = a.iter().chain(c).copied().collect();
        Ok(clamp(self.entropy(&ac)? - self.entropy_or_zero(c)?))
    }

    /// I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C), clamped at zero.
    pub fn mutual_information(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            return Err(InfoError::NoAxes);
        }
        disjoint(a, b)?;
        disjoint(a, c)?;
        disjoint(b, c)?;
        let ac: Vec<&str> = a.iter().chain(c).copied().collect();
        let bc: Vec<&str> = b.iter().chain(c).copied().collect();
        let abc: Vec<&str> = a.iter().chain(b).chain(c).copied().collect();
        let v = self.entropy(&ac)? + self.entropy(&bc)? - self.entropy(&abc)? - self.entropy_or_zero(c)?;
        Ok(clamp(v))
    }

    /// Shorthand for `mutual_information(a, b, &[])`.
    pub fn mi(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        self.mutual_information(a, b, &[])
    }

    /// Joint law over these axes followed by the channel's output axes.
    pub fn compose(&self, channel: &ConditionalPmf) -> Result<JointPmf> {
        let gpos: Vec<usize> = channel
            .given
            .iter()
            .map(|g| {
                let p = self.axis_pos(&g.name)?;
                if self.axes[p].size != g.size {
                    return Err(InfoError::Mismatch(format!(
                        "axis `{}` has size {} in prior, {} in channel",
                        g.name, self.axes[p].size, g.size
                    )));
                }
                Ok(p)
            })
            .collect::<Result<_>>()?;
        for o in &channel.out {
            if self.has_axis(&o.name) {
                return Err(InfoError::DuplicateAxis(o.name.clone()));
            }
        }
        let out_n = volume(&channel.out);
        let gsizes: Vec<usize> = channel.given.iter().map(|a| a.size).collect();
        let gstrides = strides(&gsizes);
        let mut mass = vec![0.0; self.mass.len() * out_n];
        let sizes = self.sizes();
        let mut odo = Odometer::new(&sizes);
        for (i, &m) in self.mass.iter().enumerate() {
            if m > 0.0 {
                let g: usize = gpos.iter().zip(&gstrides).map(|(&p, s)| odo.digits[p] * s).sum();
                let row = &channel.mass[g * out_n..(g + 1) * out_n];
                for (o, &w) in row.iter().enumerate() {
                    mass[i * out_n + o] = m * w;
                }
            }
            odo.step();
        }
        let total: f64 = mass.iter().sum();
        mass.iter_mut().for_each(|m| *m /= total);
        let mut axes = self.axes.clone();
        axes.extend(channel.out.iter().cloned());
        Ok(JointPmf { axes, mass })
    }

    /// Appends a deterministic axis `name = f(symbols of inputs)`.
    pub fn with_function(
        &self,
        name: &str,
        size: usize,
        inputs: &[&str],
        f: impl Fn(&[usize]) -> usize,
    ) -> Result<JointPmf> {
        let pos = self.positions(inputs)?;
        let given: Vec<Alphabet> = pos.iter().map(|&p| self.axes[p].clone()).collect();
        let ch = ConditionalPmf::deterministic(given, vec![Alphabet::new(name, size)], |g| vec![f(g)])?;
        self.compose(&ch)
    }

    /// Independent product with another law on disjoint axes.
    pub fn product(&self, other: &JointPmf) -> Result<JointPmf> {
        let mut axes = self.axes.clone();
        for a in &other.axes {
            if self.has_axis(&a.name) {
                return Err(InfoError::DuplicateAxis(a.name.clone()));
            }
            axes.push(a.clone());
        }
        let mut mass = Vec::with_capacity(self.mass.len() * other.mass.len());
        for &p in &self.mass {
            for &q in &other.mass {
                mass.push(p * q);
            }
        }
        Ok(JointPmf { axes, mass })
    }

    /// Copy with axis `from` renamed to `to`.
    pub fn rename(&self, from: &str, to: &str) -> Result<JointPmf> {
        let p = self.axis_pos(from)?;
        if from != to && self.has_axis(to) {
            return Err(InfoError::DuplicateAxis(to.to_string()));
        }
        let mut out = self.clone();
        out.axes[p].name = to.to_string();
        Ok(out)
    }

    /// Reorders axes into the given permutation of names.
    pub fn permute(&self, order: &[&str]) -> Result<JointPmf> {
        if order.len() != self.axes.len() {
            return Err(InfoError::Mismatch("permutation must list every axis".into()));
        }
        self.marginalize(order)
    }

    /// Conditional law of `out` given `given`; zero-probability cells get a uniform row.
    pub fn conditional(&self, given: &[&str], out: &[&str]) -> Result<ConditionalPmf> {
        disjoint(given, out)?;
        let order: Vec<&str> = given.iter().chain(out).copied().collect();
        let m = self.marginalize(&order)?;
        let g_axes: Vec<Alphabet> = m.axes[..given.len()].to_vec();
        let o_axes: Vec<Alphabet> = m.axes[given.len()..].to_vec();
        let out_n = volume(&o_axes);
        let mut mass = m.mass;
        for row in mass.chunks_mut(out_n) {
            let t: f64 = row.iter().sum();
            if t > 0.0 {
                row.iter_mut().for_each(|v| *v /= t);
            } else {
                row.iter_mut().for_each(|v| *v = 1.0 / out_n as f64);
            }
        }
        ConditionalPmf::new(g_axes, o_axes, mass)
    }

    /// Total-variation distance to another law on identical axes.
    pub fn tv_distance(&self, other: &JointPmf) -> Result<f64> {
        if self.axes != other.axes {
            return Err(InfoError::Mismatch("axes differ".into()));
        }
        Ok(0.5 * self.mass.iter().zip(&other.mass).map(|(a, b)| (a - b).abs()).sum::<f64>())
    }
}

fn disjoint(a: &[&str], b: &[&str]) -> Result<()> {
    match a.iter().find(|x| b.contains(x)) {
        Some(x) => Err(InfoError::Overlap(x.to_string())),
        None => Ok(()),
    }
}

#[derive(Deserialize)]
struct RawConditional {
    given: Vec<Alphabet>,
    axes: Vec<Alphabet>,
    mass: Vec<f64>,
}

/// Conditional law of `out` axes given `given` axes.
///
/// JSON form: `{"given":[...], "axes":[...], "mass":[...]}` with the mass
/// row-major over given axes followed by output axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConditional")]
pub struct ConditionalPmf {
    given: Vec<Alphabet>,
    #[serde(rename = "axes")]
    out: Vec<Alphabet>,
    mass: Vec<f64>,
}

impl TryFrom<RawConditional> for ConditionalPmf {
    type Error = InfoError;
    fn try_from(r: RawConditional) -> Result<Self> {
        ConditionalPmf::new(r.given, r.axes, r.mass)
    }
}

impl ConditionalPmf {
    pub fn new(given: Vec<Alphabet>, out: Vec<Alphabet>, mass: Vec<f64>) -> Result<Self> {
        if out.is_empty() {
            return Err(InfoError::NoAxes);
        }
        let all: Vec<Alphabet> = given.iter().chain(&out).cloned().collect();
        check_axes(&all)?;
        let expected = volume(&all);
        if mass.len() != expected {
            return Err(InfoError::Shape { expected, got: mass.len() });
        }
        check_mass(&mass)?;
        let out_n = volume(&out);
        for row in mass.chunks(out_n) {
            let t: f64 = row.iter().sum();
            if (t - 1.0).abs() > TAU_NORM {
                return Err(InfoError::NotNormalized(t));
            }
        }
        Ok(ConditionalPmf { given, out, mass })
    }

    pub fn from_fn(
        given: Vec<Alphabet>,
        out: Vec<Alphabet>,
        mut f: impl FnMut(&[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let gsizes: Vec<usize> = given.iter().map(|a| a.size).collect();
        let osizes: Vec<usize> = out.iter().map(|a| a.size).collect();
        let mut mass = Vec::with_capacity(volume(&given) * volume(&out));
        let mut g = Odometer::new(&gsizes);
        for _ in 0..volume(&given) {
            let mut o = Odometer::new(&osizes);
            for _ in 0..volume(&out) {
                mass.push(f(&g.digits, &o.digits));
                o.step();
            }
            g.step();
        }
        ConditionalPmf::new(given, out, mass)
    }

    /// Channel putting all mass on `f(given)`.
    pub fn deterministic(
        given: Vec<Alphabet>,
        out: Vec<Alphabet>,
        f: impl Fn(&[usize]) -> Vec<usize>,
    ) -> Result<Self> {
        ConditionalPmf::from_fn(given, out, |g, o| if f(g) == o { 1.0 } else { 0.0 })
    }

    pub fn given(&self) -> &[Alphabet] {
        &self.given
    }

    pub fn out(&self) -> &[Alphabet] {
        &self.out
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn given_len(&self) -> usize {
        volume(&self.given)
    }

    pub fn out_len(&self) -> usize {
        volume(&self.out)
    }

    /// Output distribution for the flat given-index `g`.
    pub fn row(&self, g: usize) -> &[f64] {
        let n = self.out_len();
        &self.mass[g * n..(g + 1) * n]
    }

    /// Flat index of a given-symbol tuple.
    pub fn given_index(&self, symbols: &[usize]) -> usize {
        symbols.iter().zip(&self.given).fold(0, |acc, (&s, a)| acc * a.size + s)
    }

    /// Splits a flat output index into per-axis symbols.
    pub fn out_symbols(&self, mut idx: usize) -> Vec<usize> {
        let mut s = vec![0; self.out.len()];
        for k in (0..self.out.len()).rev() {
            s[k] = idx % self.out[k].size;
            idx /= self.out[k].size;
        }
        s
    }

    /// Sums out every output axis not in `keep`.
    pub fn marginal_out(&self, keep: &[&str]) -> Result<ConditionalPmf> {
        let prior = JointPmf::uniform(self.given.clone())?;
        let joint = prior.compose(self)?;
        let g: Vec<&str> = self.given.iter().map(|a| a.name.as_str()).collect();
        joint.conditional(&g, keep)
    }

    /// Same law with an output axis renamed.
    pub fn rename_out(&self, from: &str, to: &str) -> Result<ConditionalPmf> {
        let mut c = self.clone();
        let p = c
            .out
            .iter()
            .position(|a| a.name == from)
            .ok_or_else(|| InfoError::UnknownAxis(from.to_string()))?;
        c.out[p].name = to.to_string();
        Ok(c)
    }
}

/// Binary entropy h_b(p) in bits.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(InfoError::OutOfRange(p));
    }
    Ok(plogp_sum([p, 1.0 - p].into_iter()))
}

/// p ⋆ q = p(1-q) + q(1-p).
pub fn binary_convolution(p: f64, q: f64) -> Result<f64> {
    for v in [p, q] {
        if !(0.0..=1.0).contains(&v) {
            return Err(InfoError::OutOfRange(v));
        }
    }
    Ok(p * (1.0 - q) + q * (1.0 - p))
}

/// Entropy of an arbitrary nonnegative vector treated as a pmf.
pub fn entropy_of(probs: &[f64]) -> f64 {
    plogp_sum(probs.iter().copied())
}

pub(crate) fn hb(p: f64) -> f64 {
    entropy_of(&[p.clamp(0.0, 1.0), 1.0 - p.clamp(0.0, 1.0)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bsc_joint(p: f64) -> JointPmf {
        let x = JointPmf::bernoulli("X", 0.5).unwrap();
        let ch = ConditionalPmf::from_fn(
            vec![Alphabet::new("X", 2)],
            vec![Alphabet::new("Y", 2)],
            |g, o| if g[0] == o[0] { 1.0 - p } else { p },
        )
        .unwrap();
        x.compose(&ch).unwrap()
    }

    #[test]
    fn entropy_examples() {
        let u = JointPmf::uniform(vec![Alphabet::new("A", 4)]).unwrap();
        assert!((u.entropy(&["A"]).unwrap() - 2.0).abs() < 1e-12);
        let d = JointPmf::point(vec![Alphabet::new("A", 3)], &[1]).unwrap();
        assert_eq!(d.entropy(&["A"]).unwrap(), 0.0);
        let q = JointPmf::single("A", &[0.5, 0.25, 0.25]).unwrap();
        assert!((q.entropy(&["A"]).unwrap() - 1.5).abs() < 1e-12);
        assert!(matches!(q.entropy(&["B"]), Err(InfoError::UnknownAxis(_))));
    }

    #[test]
    fn bsc_examples() {
        let j = bsc_joint(0.1);
        let m = j.mass();
        assert!((m[0] - 0.45).abs() < 1e-12 && (m[1] - 0.05).abs() < 1e-12);
        let y = j.marginalize(&["Y"]).unwrap();
        assert!((y.mass()[0] - 0.5).abs() < 1e-12);
        let mi = j.mi(&["X"], &["Y"]).unwrap();
        assert!((mi - (1.0 - binary_entropy(0.1).unwrap())).abs() < 1e-12);
        assert!(matches!(j.mutual_information(&["X"], &["X"], &[]), Err(InfoError::Overlap(_))));
        let back = j.marginalize(&["X"]).unwrap();
        assert!((back.mass()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn scalar_helpers() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((binary_entropy(0.25).unwrap() - 0.811_278_124_459_132_9).abs() < 1e-12);
        assert!(binary_entropy(1.5).is_err());
        assert!((binary_convolution(0.2, 0.3).unwrap() - 0.38).abs() < 1e-12);
        assert_eq!(binary_convolution(0.3, 0.0).unwrap(), 0.3);
        assert_eq!(binary_convolution(0.3, 0.5).unwrap(), 0.5);
    }

    #[test]
    fn rejects_unnormalized() {
        let e = JointPmf::single("A", &[0.5, 0.4]).unwrap_err();
        assert!(matches!(e, InfoError::NotNormalized(_)));
        assert!(JointPmf::single("A", &[1.5, -0.5]).is_err());
    }

    #[test]
    fn condition_product() {
        let a = JointPmf::single("A", &[0.2, 0.8]).unwrap();
        let b = JointPmf::single("B", &[0.3, 0.3, 0.4]).unwrap();
        let ab = a.product(&b).unwrap();
        let c = ab.condition("A", 1).unwrap();
        assert!(c.tv_distance(&b).unwrap() < 1e-12);
        let zero = JointPmf::single("A", &[1.0, 0.0]).unwrap().product(&b).unwrap();
        assert_eq!(zero.condition("A", 1).unwrap_err(), InfoError::ZeroEvent);
    }

    #[test]
    fn json_roundtrip() {
        let j = bsc_joint(0.1);
        let s = serde_json::to_string(&j).unwrap();
        assert!(s.starts_with("{\"axes\":[{\"name\":\"X\",\"size\":2}"));
        let back: JointPmf = serde_json::from_str(&s).unwrap();
        assert_eq!(back, j);
        assert!(serde_json::from_str::<JointPmf>(r#"{"axes":[{"name":"A","size":2}],"mass":[0.5,0.6]}"#).is_err());
    }
}
