//! Rate-region formulas for concrete auxiliary choices, searches over small
//! auxiliary families, and the closed-form bounds of the two example channels.
//!
//! Axis names used throughout: `U0 U1 U2` (Marton auxiliaries), `X`, `Y1 Y2`,
//! `Yt` (feedback), `V0 V1 V2` (update auxiliaries), `Z0 Z1 Z2` (Dueck noise).

use crate::channels::{self, ChannelError, Dmbc, FeedbackConfig};
use crate::info::{hb, Alphabet, ConditionalPmf, InfoError, JointPmf, TAU_NUM};
use crate::polytope::{convex_hull_union, region_equal, LinIneqSystem, Orientation, PolyError, RateRegion3};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("alphabet mismatch: {0}")]
    Alphabet(String),
    #[error("update scheme variant {scheme:?} does not match requested {requested:?}")]
    Variant { scheme: Variant, requested: Variant },
    #[error("Dueck condition violated: H({axes}) = {value} > 1")]
    DueckCondition { axes: &'static str, value: f64 },
    #[error("empty grid")]
    EmptyGrid,
    #[error("bad grid parameter `{0}`")]
    Grid(String),
    #[error("Blackwell noise parameter must satisfy 0 <= p < 0.5, got {0}")]
    BlackwellP(f64),
}

pub type Result<T> = std::result::Result<T, RegionError>;

const U: [&str; 3] = ["U0", "U1", "U2"];

/// Marton auxiliaries and the map to the channel input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryScheme {
    /// Law over `U0, U1, U2`.
    pub law_u: JointPmf,
    /// `f[(u0 * |U1| + u1) * |U2| + u2] = x`.
    pub f: Vec<usize>,
}

impl AuxiliaryScheme {
    pub fn new(law_u: JointPmf, f: Vec<usize>) -> Result<Self> {
        let s = Self { law_u, f };
        s.sizes()?;
        Ok(s)
    }

    /// Alphabet sizes of `U0, U1, U2`.
    pub fn sizes(&self) -> Result<[usize; 3]> {
        let names = self.law_u.names();
        if names != U {
            return Err(RegionError::Alphabet(format!("law_u axes must be U0, U1, U2, got {names:?}")));
        }
        let s = self.law_u.sizes();
        if self.f.len() != s[0] * s[1] * s[2] {
            return Err(RegionError::Alphabet(format!(
                "f has {} entries, expected {}",
                self.f.len(),
                s[0] * s[1] * s[2]
            )));
        }
        Ok([s[0], s[1], s[2]])
    }

    pub fn x_of(&self, u: [usize; 3]) -> usize {
        let s = self.law_u.sizes();
        self.f[(u[0] * s[1] + u[1]) * s[2] + u[2]]
    }

    /// Law of `(U0, U1, U2, X)`.
    pub fn joint_ux(&self, x_size: usize) -> Result<JointPmf> {
        self.sizes()?;
        if let Some(&bad) = self.f.iter().find(|&&x| x >= x_size) {
            return Err(RegionError::Alphabet(format!("f maps to {bad}, input alphabet has {x_size}")));
        }
        Ok(self.law_u.with_function("X", x_size, &U, |u| self.x_of([u[0], u[1], u[2]]))?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `P(V | U0 U1 U2 Yt)`.
    Full,
    /// `P(V | X Yt)`.
    Star,
}

impl Variant {
    fn given(self) -> &'static [&'static str] {
        match self {
            Variant::Full => &["U0", "U1", "U2", "Yt"],
            Variant::Star => &["X", "Yt"],
        }
    }
}

/// Update auxiliaries `(V0, V1, V2)` generated from the feedback.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpdateScheme {
    pub variant: Variant,
    pub law_v: ConditionalPmf,
}

impl UpdateScheme {
    pub fn new(variant: Variant, law_v: ConditionalPmf) -> Result<Self> {
        let s = UpdateScheme { variant, law_v };
        s.check()?;
        Ok(s)
    }

    fn check(&self) -> Result<()> {
        let g: Vec<&str> = self.law_v.given().iter().map(|a| a.name.as_str()).collect();
        let o: Vec<&str> = self.law_v.out().iter().map(|a| a.name.as_str()).collect();
        if g != self.variant.given() || o != ["V0", "V1", "V2"] {
            return Err(RegionError::Alphabet(format!(
                "{:?} update law must map {:?} to [V0, V1, V2], got {g:?} to {o:?}",
                self.variant,
                self.variant.given()
            )));
        }
        Ok(())
    }

    fn given_axes(variant: Variant, aux: &[usize; 3], x_size: usize, yt_size: usize) -> Vec<Alphabet> {
        match variant {
            Variant::Full => vec![
                Alphabet::new("U0", aux[0]),
                Alphabet::new("U1", aux[1]),
                Alphabet::new("U2", aux[2]),
                Alphabet::new("Yt", yt_size),
            ],
            Variant::Star => vec![Alphabet::new("X", x_size), Alphabet::new("Yt", yt_size)],
        }
    }

    fn v_axes(v: [usize; 3]) -> Vec<Alphabet> {
        vec![Alphabet::new("V0", v[0]), Alphabet::new("V1", v[1]), Alphabet::new("V2", v[2])]
    }

    /// Single-symbol `V0, V1, V2`.
    pub fn constant(variant: Variant, aux: &AuxiliaryScheme, ch: &Dmbc) -> Result<Self> {
        Self::deterministic(variant, aux, ch, [1, 1, 1], |_| [0, 0, 0])
    }

    /// `V = g(given)`, with `given` ordered as the variant's conditioning axes.
    pub fn deterministic(
        variant: Variant,
        aux: &AuxiliaryScheme,
        ch: &Dmbc,
        v_sizes: [usize; 3],
        g: impl Fn(&[usize]) -> [usize; 3],
    ) -> Result<Self> {
        let given = Self::given_axes(variant, &aux.sizes()?, ch.input_size(), ch.feedback_size());
        let law = ConditionalPmf::deterministic(given, Self::v_axes(v_sizes), |s| g(s).to_vec())?;
        Self::new(variant, law)
    }

    /// Re-expresses a star scheme as `P(V | U, Yt) = P(V | f(U), Yt)`.
    pub fn lift_to_full(&self, aux: &AuxiliaryScheme, ch: &Dmbc) -> Result<Self> {
        if self.variant == Variant::Full {
            return Ok(self.clone());
        }
        let given = Self::given_axes(Variant::Full, &aux.sizes()?, ch.input_size(), ch.feedback_size());
        let out = self.law_v.out().to_vec();
        let star = &self.law_v;
        let law = ConditionalPmf::from_fn(given, out, |g, o| {
            let x = aux.x_of([g[0], g[1], g[2]]);
            let row = star.row(star.given_index(&[x, g[3]]));
            let n2 = star.out()[2].size;
            let n1 = star.out()[1].size;
            row[(o[0] * n1 + o[1]) * n2 + o[2]]
        })?;
        Self::new(Variant::Full, law)
    }
}

/// Full joint over `U0 U1 U2 X Y1 Y2 Yt [V0 V1 V2]`.
pub fn induced_joint(aux: &AuxiliaryScheme, upd: Option<&UpdateScheme>, ch: &Dmbc) -> Result<JointPmf> {
    let j = aux.joint_ux(ch.input_size())?.compose(ch.law())?;
    match upd {
        None => Ok(j),
        Some(u) => {
            u.check()?;
            Ok(j.compose(&u.law_v)?)
        }
    }
}

/// Information constants of the feedback region.
///
/// `m = min_i I(U0; Yi Vi)`, `a_i = I(U0 Ui; Yi Vi)`, `c_i = I(Ui; Yi Vi | U0)`,
/// `t = I(U1; U2 | U0)`, `g_i = I(W; Vi | V0 Yi)`, `k_i = I(W; V0 | Yi)` where
/// `W` is `U0 U1 U2 Yt` (full) or `X Yt` (star). Without `V` axes, `g = k = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RegionConstants {
    pub i0: [f64; 2],
    pub a: [f64; 2],
    pub c: [f64; 2],
    pub t: f64,
    pub g: [f64; 2],
    pub k: [f64; 2],
}

impl RegionConstants {
    pub fn m(&self) -> f64 {
        self.i0[0].min(self.i0[1])
    }

    /// `c1 + c2 + m - t`.
    pub fn s(&self) -> f64 {
        self.c[0] + self.c[1] + self.m() - self.t
    }

    pub fn h(&self, i: usize) -> f64 {
        self.g[i] + self.k[i]
    }

    pub fn kmax(&self) -> f64 {
        self.k[0].max(self.k[1])
    }

    pub fn from_joint(j: &JointPmf, variant: Option<Variant>) -> Result<Self> {
        let has_v = variant.is_some() && j.has_axis("V0");
        let mut rc = RegionConstants { t: j.mutual_information(&["U1"], &["U2"], &["U0"])?, ..Default::default() };
        for i in 0..2 {
            let (y, v, u) = (["Y1", "Y2"][i], ["V1", "V2"][i], ["U1", "U2"][i]);
            let yv: Vec<&str> = if has_v { vec![y, v] } else { vec![y] };
            rc.i0[i] = j.mutual_information(&["U0"], &yv, &[])?;
            rc.a[i] = j.mutual_information(&["U0", u], &yv, &[])?;
            rc.c[i] = j.mutual_information(&[u], &yv, &["U0"])?;
            if has_v {
                let w = variant.unwrap_or(Variant::Full).given_w();
                rc.g[i] = j.mutual_information(w, &[v], &["V0", y])?;
                rc.k[i] = j.mutual_information(w, &["V0"], &[y])?;
            }
        }
        Ok(rc)
    }
}

impl Variant {
    fn given_w(self) -> &'static [&'static str] {
        self.given()
    }
}

fn rate_cap(ch: &Dmbc) -> [f64; 3] {
    let l = |n: usize| 2.0 * (n.max(2) as f64).log2();
    let (c1, c2) = (l(ch.output_size(1)), l(ch.output_size(2)));
    [c1.min(c2), c1, c2]
}

/// Eq.-1 style Marton region from constants (`g`, `k` ignored).
pub fn marton_from_constants(c: &RegionConstants, cap: [f64; 3]) -> RateRegion3 {
    let mut r = RateRegion3::new(Vec::new(), Some(cap));
    r.push([1.0, 0.0, 0.0], c.m());
    r.push([1.0, 1.0, 0.0], c.a[0]);
    r.push([1.0, 0.0, 1.0], c.a[1]);
    r.push([1.0, 1.0, 1.0], c.s());
    r
}

/// No-feedback Marton region for `aux` on `ch`.
pub fn marton_region(aux: &AuxiliaryScheme, ch: &Dmbc) -> Result<RateRegion3> {
    let j = induced_joint(aux, None, ch)?;
    Ok(marton_from_constants(&RegionConstants::from_joint(&j, None)?, rate_cap(ch)))
}

/// Which closed form to use for the feedback region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackForm {
    /// The printed four-line full-variant region.
    Full,
    /// The printed five-line pre-simplification constraint set.
    FullConstraintSet,
    /// Projection of the combined Marton + LGW constraints, computed by elimination.
    FullEliminated,
    Star,
}

/// Feedback region from constants in the chosen form.
pub fn feedback_from_constants(c: &RegionConstants, form: FeedbackForm, cap: [f64; 3]) -> Result<RateRegion3> {
    let mut r = RateRegion3::new(Vec::new(), Some(cap));
    let (m, s, kx) = (c.m(), c.s(), c.kmax());
    match form {
        FeedbackForm::Full => {
            r.push([1.0, 1.0, 0.0], c.a[0] - c.h(0));
            r.push([1.0, 0.0, 1.0], c.a[1] - c.h(1));
            r.push([1.0, 1.0, 1.0], s - c.g[0] - c.g[1] - kx);
            r.push([2.0, 1.0, 1.0], s + m - c.g[0] - c.g[1]);
        }
        FeedbackForm::FullConstraintSet => {
            r.push([1.0, 1.0, 0.0], c.a[0] - c.h(0));
            r.push([1.0, 0.0, 1.0], c.a[1] - c.h(1));
            r.push([1.0, 1.0, 1.0], s - c.g[1] - c.h(0));
            r.push([1.0, 1.0, 1.0], s - c.g[0] - c.h(1));
            r.push([2.0, 1.0, 1.0], s + m - c.h(0) - c.h(1));
        }
        FeedbackForm::FullEliminated => {
            let sys = presplit_system(&PresplitInput::Combined(*c))?;
            return Ok(sys.fm_eliminate_all(PresplitKind::Combined.nuisance())?.to_region3(Some(cap))?);
        }
        FeedbackForm::Star => {
            r.push([1.0, 0.0, 0.0], m - kx);
            r.push([1.0, 1.0, 0.0], c.a[0] - c.g[0] - kx);
            r.push([1.0, 0.0, 1.0], c.a[1] - c.g[1] - kx);
            r.push([1.0, 1.0, 1.0], s - c.g[0] - c.g[1] - kx);
        }
    }
    Ok(r)
}

/// Feedback inner region for a concrete scheme. `Full` uses the printed form.
pub fn feedback_inner(aux: &AuxiliaryScheme, upd: &UpdateScheme, ch: &Dmbc, variant: Variant) -> Result<RateRegion3> {
    let form = match variant {
        Variant::Full => FeedbackForm::Full,
        Variant::Star => FeedbackForm::Star,
    };
    feedback_inner_form(aux, upd, ch, form)
}

pub fn feedback_inner_form(
    aux: &AuxiliaryScheme,
    upd: &UpdateScheme,
    ch: &Dmbc,
    form: FeedbackForm,
) -> Result<RateRegion3> {
    let requested = if form == FeedbackForm::Star { Variant::Star } else { Variant::Full };
    if upd.variant != requested {
        return Err(RegionError::Variant { scheme: upd.variant, requested });
    }
    let c = feedback_constants(aux, upd, ch)?;
    feedback_from_constants(&c, form, rate_cap(ch))
}

pub fn feedback_constants(aux: &AuxiliaryScheme, upd: &UpdateScheme, ch: &Dmbc) -> Result<RegionConstants> {
    let j = induced_joint(aux, Some(upd), ch)?;
    RegionConstants::from_joint(&j, Some(upd.variant))
}

/// Constants of the LGW region with side information.
///
/// `ixv0 = I(X;V0)`, `iv[i] = I(Vi; X V0)`, `dv0[i] = I(V0; Yi)`, `ev[i] = I(Vi; V0 Yi)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LgwConstants {
    pub ixv0: f64,
    pub iv: [f64; 2],
    pub dv0: [f64; 2],
    pub ev: [f64; 2],
}

impl LgwConstants {
    pub fn from_joint(j: &JointPmf) -> Result<Self> {
        let mut c = LgwConstants { ixv0: j.mi(&["X"], &["V0"])?, ..Default::default() };
        for i in 0..2 {
            let (y, v) = (["Y1", "Y2"][i], ["V1", "V2"][i]);
            c.iv[i] = j.mi(&[v], &["X", "V0"])?;
            c.dv0[i] = j.mi(&["V0"], &[y])?;
            c.ev[i] = j.mi(&[v], &["V0", y])?;
        }
        Ok(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LgwVariant {
    Inner,
    Star,
}

/// LGW cost region (an up-set) from constants.
pub fn lgw_from_constants(c: &LgwConstants, variant: LgwVariant, cap: [f64; 3]) -> RateRegion3 {
    let mut r = RateRegion3::new(Vec::new(), Some(cap));
    r.orientation = Orientation::Up;
    for i in 0..2 {
        let mut a = [0.0; 3];
        a[i + 1] = -1.0;
        r.push(a, -(c.iv[i] - c.ev[i]));
    }
    match variant {
        LgwVariant::Inner => {
            for i in 0..2 {
                let mut a = [-1.0, 0.0, 0.0];
                a[i + 1] = -1.0;
                r.push(a, -(c.ixv0 + c.iv[i] - c.dv0[i] - c.ev[i]));
            }
        }
        LgwVariant::Star => {
            let b = (c.ixv0 - c.dv0[0]).max(c.ixv0 - c.dv0[1]);
            r.push([-1.0, 0.0, 0.0], -b);
        }
    }
    r
}

/// LGW region for a source `(X, Y1, Y2)` and an update law given `X` (and optionally a one-symbol `Yt`).
pub fn lgw_inner(upd: &UpdateScheme, source: &JointPmf, variant: LgwVariant) -> Result<RateRegion3> {
    let g: Vec<&str> = upd.law_v.given().iter().map(|a| a.name.as_str()).collect();
    let src = source.marginalize(&["X", "Y1", "Y2"])?;
    let src = match g.as_slice() {
        ["X"] => src,
        ["X", "Yt"] if upd.law_v.given()[1].size == 1 => src.with_function("Yt", 1, &["X"], |_| 0)?,
        _ => {
            return Err(RegionError::Alphabet(format!("LGW update law must be given [X] or [X, Yt(1)], got {g:?}")))
        }
    };
    let j = src.compose(&upd.law_v)?;
    let nx = source.axis("X")?.size;
    let c = 2.0 * (nx.max(2) as f64).log2();
    Ok(lgw_from_constants(&LgwConstants::from_joint(&j)?, variant, [c; 3]))
}

/// Post-elimination Marton region with the `2R0 + R1 + R2` line.
pub fn marton_closed_form(c: &RegionConstants, cap: [f64; 3]) -> RateRegion3 {
    let mut r = RateRegion3::new(Vec::new(), Some(cap));
    r.push([1.0, 1.0, 0.0], c.a[0]);
    r.push([1.0, 0.0, 1.0], c.a[1]);
    r.push([1.0, 1.0, 1.0], c.s());
    r.push([2.0, 1.0, 1.0], c.a[0] + c.a[1] - c.t);
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresplitKind {
    /// Split/bin constraints with `R_{i,p} + R_i' <= I(Ui; Yi | U0)` per receiver.
    Marton,
    /// Same, but with `R_{1,p}` in both receivers' private-packing rows as printed.
    MartonLiteral,
    Lgw,
    Combined,
    CombinedStar,
}

impl PresplitKind {
    /// Variables to eliminate.
    pub fn nuisance(self) -> &'static [&'static str] {
        match self {
            PresplitKind::Marton | PresplitKind::MartonLiteral => &["R1p", "R1c", "R2p", "R2c", "R1b", "R2b"],
            PresplitKind::Lgw => &["Q0", "Q1", "Q2"],
            PresplitKind::Combined | PresplitKind::CombinedStar => &["T0", "T1", "T2"],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PresplitInput {
    Marton(RegionConstants),
    MartonLiteral(RegionConstants),
    Lgw(LgwConstants),
    Combined(RegionConstants),
    CombinedStar(RegionConstants),
}

impl PresplitInput {
    pub fn kind(&self) -> PresplitKind {
        match self {
            PresplitInput::Marton(_) => PresplitKind::Marton,
            PresplitInput::MartonLiteral(_) => PresplitKind::MartonLiteral,
            PresplitInput::Lgw(_) => PresplitKind::Lgw,
            PresplitInput::Combined(_) => PresplitKind::Combined,
            PresplitInput::CombinedStar(_) => PresplitKind::CombinedStar,
        }
    }
}

/// Constraint system before eliminating split, bin or tilde rates.
///
/// Variable names: `R0 R1 R2` plus `R1p R1c R2p R2c R1b R2b` (Marton),
/// `Q0 Q1 Q2` (LGW bin rates), `T0 T1 T2` (update rates). All variables are
/// nonnegative; `Ri = Rip + Ric` enters as two rows.
pub fn presplit_system(input: &PresplitInput) -> Result<LinIneqSystem> {
    let kind = input.kind();
    let mut vars = vec!["R0", "R1", "R2"];
    vars.extend_from_slice(kind.nuisance());
    let mut s = LinIneqSystem::new(&vars)?;
    s.nonneg(&vars)?;
    match *input {
        PresplitInput::Marton(c) | PresplitInput::MartonLiteral(c) => {
            let literal = kind == PresplitKind::MartonLiteral;
            for (r, p, q) in [("R1", "R1p", "R1c"), ("R2", "R2p", "R2c")] {
                s.le(&[(p, 1.0), (q, 1.0), (r, -1.0)], 0.0)?;
                s.ge(&[(p, 1.0), (q, 1.0), (r, -1.0)], 0.0)?;
            }
            s.ge(&[("R1b", 1.0), ("R2b", 1.0)], c.t)?;
            for i in 0..2 {
                let (p, b) = (if literal { "R1p" } else { ["R1p", "R2p"][i] }, ["R1b", "R2b"][i]);
                s.le(&[("R0", 1.0), ("R1c", 1.0), ("R2c", 1.0)], c.a[i])?;
                s.le(&[(p, 1.0), (b, 1.0)], c.c[i])?;
                s.le(&[("R0", 1.0), ("R1c", 1.0), ("R2c", 1.0), (["R1p", "R2p"][i], 1.0), (b, 1.0)], c.a[i])?;
            }
        }
        PresplitInput::Lgw(c) => {
            s.ge(&[("Q0", 1.0), ("R0", 1.0)], c.ixv0)?;
            for i in 0..2 {
                let (q, r) = (["Q1", "Q2"][i], ["R1", "R2"][i]);
                s.ge(&[(q, 1.0), (r, 1.0)], c.iv[i])?;
                s.le(&[("Q0", 1.0), (q, 1.0)], c.dv0[i] + c.ev[i])?;
                s.le(&[(q, 1.0)], c.ev[i])?;
            }
            s.le(&[("Q0", 1.0)], c.dv0[0].min(c.dv0[1]))?;
        }
        PresplitInput::Combined(c) | PresplitInput::CombinedStar(c) => {
            s.le(&[("R0", 1.0), ("T0", 1.0)], c.m())?;
            for i in 0..2 {
                let (r, t) = (["R1", "R2"][i], ["T1", "T2"][i]);
                s.le(&[("R0", 1.0), ("T0", 1.0), (r, 1.0), (t, 1.0)], c.a[i])?;
                s.ge(&[(t, 1.0)], c.g[i])?;
                if kind == PresplitKind::Combined {
                    s.ge(&[("T0", 1.0), (t, 1.0)], c.h(i))?;
                }
            }
            if kind == PresplitKind::CombinedStar {
                s.ge(&[("T0", 1.0)], c.kmax())?;
            }
            let all = ["R0", "R1", "R2", "T0", "T1", "T2"].map(|v| (v, 1.0));
            s.le(&all, c.s())?;
        }
    }
    Ok(s)
}

/// Eliminates the nuisance variables and returns the projected rate region.
pub fn presplit_eliminate(input: &PresplitInput, cap: Option<[f64; 3]>) -> Result<RateRegion3> {
    let s = presplit_system(input)?;
    let mut r = s.fm_eliminate_all(input.kind().nuisance())?.to_region3(cap)?;
    if input.kind() == PresplitKind::Lgw {
        r.orientation = Orientation::Up;
    }
    Ok(r)
}

// ---------------------------------------------------------------- Dueck

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DueckWhich {
    Feedback,
    Nofeedback,
}

/// Sum capacity region at `R0 = 0` with feedback, or the no-feedback corollary.
pub fn dueck_capacity(noise_law: &JointPmf, which: DueckWhich) -> Result<RateRegion3> {
    if !channels::dueck_condition_holds(noise_law)? && which == DueckWhich::Feedback {
        for (axes, pair) in [("Z0,Z1", ["Z0", "Z1"]), ("Z0,Z2", ["Z0", "Z2"])] {
            let value = noise_law.entropy(&pair)?;
            if value > 1.0 + TAU_NUM {
                return Err(RegionError::DueckCondition { axes, value });
            }
        }
    }
    let h01 = noise_law.entropy(&["Z0", "Z1"])?;
    let h02 = noise_law.entropy(&["Z0", "Z2"])?;
    let h012 = noise_law.entropy(&["Z0", "Z1", "Z2"])?;
    let gap = match which {
        DueckWhich::Feedback => 0.0,
        DueckWhich::Nofeedback => noise_law.mutual_information(&["Z1"], &["Z2"], &["Z0"])?,
    };
    let mut r = RateRegion3::new(Vec::new(), Some([4.0; 3]));
    r.push([1.0, 0.0, 0.0], 0.0);
    r.push([0.0, 1.0, 0.0], 2.0 - h01);
    r.push([0.0, 0.0, 1.0], 2.0 - h02);
    r.push([0.0, 1.0, 1.0], 3.0 - h012 - gap);
    Ok(r)
}

/// True iff `I(Z1; Z2 | Z0) <= TAU_NUM`.
pub fn z_markov_chain_holds(noise_law: &JointPmf) -> Result<bool> {
    Ok(noise_law.mutual_information(&["Z1"], &["Z2"], &["Z0"])? <= TAU_NUM)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DueckV0 {
    Z0Z1,
    Z0Z2,
}

/// Auxiliaries: `U` i.i.d. fair bits, `X = (U1, U0, U2)`, `V1 = (X0, X1)`,
/// `V2 = (X0, X2)`, `V0 = (Z0, Z1)` or `(Z0, Z2)` recovered from the feedback.
pub fn dueck_theorem3_scheme(ch: &Dmbc, v0: DueckV0) -> Result<(AuxiliaryScheme, UpdateScheme)> {
    if ch.input_size() != 8 || ch.feedback_size() != 8 {
        return Err(RegionError::Alphabet("Dueck scheme needs |X| = 8 and |Yt| = 8".into()));
    }
    let law_u = JointPmf::uniform(U.iter().map(|n| Alphabet::new(*n, 2)).collect())?;
    let f = (0..8).map(|i| {
        let (u0, u1, u2) = (i >> 2, (i >> 1) & 1, i & 1);
        4 * u1 + 2 * u0 + u2
    });
    let aux = AuxiliaryScheme::new(law_u, f.collect())?;
    let upd = UpdateScheme::deterministic(Variant::Full, &aux, ch, [4, 4, 4], |g| {
        let (u0, u1, u2, yt) = (g[0], g[1], g[2], g[3]);
        let (z1, z0, z2) = (((yt >> 2) & 1) ^ u1, ((yt >> 1) & 1) ^ u0, (yt & 1) ^ u2);
        let v0 = match v0 {
            DueckV0::Z0Z1 => 2 * z0 + z1,
            DueckV0::Z0Z2 => 2 * z0 + z2,
        };
        [v0, 2 * u0 + u1, 2 * u0 + u2]
    })?;
    Ok((aux, upd))
}

/// Hull of the feedback regions for both `V0` choices.
pub fn dueck_theorem3_region(ch: &Dmbc) -> Result<RateRegion3> {
    let mut regions = Vec::new();
    for v0 in [DueckV0::Z0Z1, DueckV0::Z0Z2] {
        let (aux, upd) = dueck_theorem3_scheme(ch, v0)?;
        regions.push(feedback_inner(&aux, &upd, ch, Variant::Full)?);
    }
    Ok(convex_hull_union(&regions[0], &regions[1])?)
}

// ------------------------------------------------------------- Blackwell

/// Sum-rate objective of the `(alpha, beta)` family.
pub fn blackwell_objective(alpha: f64, beta: f64, p: f64) -> f64 {
    let mid = star((alpha + beta) / 2.0, p);
    let t1 = if beta < 1.0 { (1.0 - beta) / 2.0 * hb(alpha / (1.0 - beta)) } else { 0.0 };
    let t2 = if alpha < 1.0 { (1.0 - alpha) / 2.0 * hb(beta / (1.0 - alpha)) } else { 0.0 };
    hb(mid) + t1 + t2 - hb(p)
}

/// Common-rate bound of the family; must be nonnegative.
pub fn blackwell_side(alpha: f64, beta: f64, p: f64) -> f64 {
    hb(star((alpha + beta) / 2.0, p)) - 0.5 * (hb(alpha) + hb(beta)) - hb(p)
}

/// The four bracketed entries of the printed no-feedback bound and their total.
pub fn blackwell_printed_nofb_entries(alpha: f64, p: f64) -> ([f64; 4], f64) {
    let q = 1.0 - p;
    let e = [
        alpha * (p - q).powi(2) + p * q,
        q * q + 2.0 * alpha * p,
        p * p + 2.0 * alpha * q,
        alpha * (p - q).powi(2) + p * q,
    ];
    (e, e.iter().sum())
}

fn star(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

/// Named parameter sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridParam {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub params: Vec<GridParam>,
}

impl GridSpec {
    pub fn alpha_beta(steps: usize) -> Self {
        GridSpec {
            params: vec![
                GridParam { name: "alpha".into(), lo: 0.0, hi: 1.0, steps },
                GridParam { name: "beta".into(), lo: 0.0, hi: 1.0, steps },
            ],
        }
    }

    pub fn param(&self, name: &str) -> Option<&GridParam> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn values(&self, name: &str, default_steps: usize) -> Result<Vec<f64>> {
        let (lo, hi, steps) = match self.param(name) {
            Some(p) => (p.lo, p.hi, p.steps),
            None => (0.0, 1.0, default_steps),
        };
        if steps == 0 || !(lo <= hi) || lo < 0.0 || hi > 1.0 {
            return Err(RegionError::Grid(name.to_string()));
        }
        if steps == 1 {
            return Ok(vec![lo]);
        }
        Ok((0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect())
    }

    /// Points of the `alpha + beta <= 1` triangle, in row-major order.
    pub fn triangle(&self, default_steps: usize) -> Result<Vec<(f64, f64)>> {
        let a = self.values("alpha", default_steps)?;
        let b = self.values("beta", default_steps)?;
        let pts: Vec<(f64, f64)> =
            a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).filter(|(x, y)| x + y <= 1.0 + 1e-12).collect();
        if pts.is_empty() {
            return Err(RegionError::EmptyGrid);
        }
        Ok(pts)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlackwellBounds {
    pub p: f64,
    pub fb_lower: f64,
    pub alpha: f64,
    pub beta: f64,
    pub nofb_upper: f64,
    pub fb_cutset: f64,
}

/// Feedback lower bound, no-feedback cut-set bound and feedback cut-set bound.
pub fn blackwell_bounds(p: f64, grid: &GridSpec) -> Result<BlackwellBounds> {
    if !(0.0..0.5).contains(&p) {
        return Err(RegionError::BlackwellP(p));
    }
    let (fb_lower, alpha, beta) = blackwell_fb_lower(p, grid)?;
    let bp = channels::BlackwellParams { p, feedback: FeedbackConfig::None };
    let nofb_upper = cutset_sum(&channels::make_blackwell_independent(&bp)?)?;
    let fb_cutset = cutset_sum(&channels::make_blackwell(&bp)?)?;
    Ok(BlackwellBounds { p, fb_lower, alpha, beta, nofb_upper, fb_cutset })
}

fn feasible_value(a: f64, b: f64, p: f64) -> f64 {
    if a < 0.0 || b < 0.0 || a + b > 1.0 || blackwell_side(a, b, p) < -TAU_NUM {
        f64::NEG_INFINITY
    } else {
        blackwell_objective(a, b, p)
    }
}

/// Grid maximum of the family objective followed by golden-section line refinement.
pub fn blackwell_fb_lower(p: f64, grid: &GridSpec) -> Result<(f64, f64, f64)> {
    let pts = grid.triangle(200)?;
    let (best, a, b) = pts
        .par_iter()
        .enumerate()
        .map(|(i, &(x, y))| (feasible_value(x, y, p), i, x, y))
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX, 0.0, 0.0),
            |l, r| if r.0 > l.0 || (r.0 == l.0 && r.1 < l.1) { r } else { l },
        )
        .into_tuple();
    if best == f64::NEG_INFINITY {
        return Ok((0.0, 0.0, 0.0));
    }
    let step = grid.param("alpha").map(|g| (g.hi - g.lo) / (g.steps.max(2) - 1) as f64).unwrap_or(1.0 / 199.0);
    let (v, a, b) = refine_2d(|x, y| feasible_value(x, y, p), (best, a, b), step, 24);
    Ok((v.max(0.0), a, b))
}

/// Zooming grid search around a starting point: each round scans a 9x9
/// patch of half-width `width`, recenters on the best point and halves.
fn refine_2d(f: impl Fn(f64, f64) -> f64 + Sync, start: (f64, f64, f64), step: f64, rounds: usize) -> (f64, f64, f64) {
    let (mut best, mut a, mut b) = start;
    let mut width = step;
    for _ in 0..rounds {
        let (ca, cb) = (a, b);
        let pts: Vec<(f64, f64)> = (-4..=4)
            .flat_map(|i| (-4..=4).map(move |j| (ca + width * i as f64 / 4.0, cb + width * j as f64 / 4.0)))
            .collect();
        let vals: Vec<f64> = pts.par_iter().map(|&(x, y)| f(x, y)).collect();
        for (k, v) in vals.into_iter().enumerate() {
            if v > best {
                best = v;
                (a, b) = pts[k];
            }
        }
        width *= 0.5;
    }
    golden_lines(&f, (best, a, b), 4.0 * width)
}

/// Golden-section searches along the axis and diagonal directions; only improvements are kept.
fn golden_lines(f: &impl Fn(f64, f64) -> f64, start: (f64, f64, f64), width: f64) -> (f64, f64, f64) {
    let (mut best, mut a, mut b) = start;
    for (dx, dy) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0)] {
        let g = |t: f64| f(a + t * dx, b + t * dy);
        let t = golden_max(g, -width, width, 40);
        let v = g(t);
        if v > best {
            best = v;
            a += t * dx;
            b += t * dy;
        }
    }
    (best, a, b)
}

trait IntoTuple {
    fn into_tuple(self) -> (f64, f64, f64);
}

impl IntoTuple for (f64, usize, f64, f64) {
    fn into_tuple(self) -> (f64, f64, f64) {
        (self.0, self.2, self.3)
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    [(f(0.0), 0.0), (f(mid), mid), (f1, x1), (f2, x2)]
        .into_iter()
        .fold((f64::NEG_INFINITY, 0.0), |acc, c| if c.0 > acc.0 { c } else { acc })
        .1
}

/// `max_{P_X} I(X; Y1, Y2)` by Blahut-Arimoto.
pub fn cutset_sum(ch: &Dmbc) -> Result<f64> {
    let w = ch.law().marginal_out(&["Y1", "Y2"])?;
    let rows: Vec<Vec<f64>> = (0..w.given_len()).map(|x| w.row(x).to_vec()).collect();
    Ok(blahut_arimoto(&rows, 1e-12, 20_000))
}

/// Capacity in bits of the channel with transition rows `w[x][y]`.
pub fn blahut_arimoto(w: &[Vec<f64>], tol: f64, max_iter: usize) -> f64 {
    let nx = w.len();
    let ny = w[0].len();
    let mut px = vec![1.0 / nx as f64; nx];
    let mut lower = 0.0;
    for _ in 0..max_iter {
        let mut qy = vec![0.0; ny];
        for x in 0..nx {
            for y in 0..ny {
                qy[y] += px[x] * w[x][y];
            }
        }
        let d: Vec<f64> = (0..nx)
            .map(|x| {
                (0..ny)
                    .filter(|&y| w[x][y] > 0.0)
                    .map(|y| w[x][y] * (w[x][y] / qy[y]).log2())
                    .sum::<f64>()
            })
            .collect();
        lower = px.iter().zip(&d).map(|(p, d)| p * d).sum::<f64>();
        let upper = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if upper - lower < tol {
            break;
        }
        let z: f64 = px.iter().zip(&d).map(|(p, d)| p * d.exp2()).sum();
        for x in 0..nx {
            px[x] = px[x] * d[x].exp2() / z;
        }
    }
    lower
}

/// The `(alpha, beta)` family: `U0 ~ Bern(1/2)`, `(U1, U2)` law depending on
/// `U0`, `X = U1 + U2`, and update auxiliaries equal to the deterministic
/// part of each output plus the recovered noise `V0 = Z`.
///
/// `U1` is the deterministic part of `Y1` (`X >= 1`) and `U2` that of `Y2`
/// (`X = 2`), so `Yi = Ui ^ Z`.
pub fn blackwell_scheme(alpha: f64, beta: f64, ch: &Dmbc) -> Result<(AuxiliaryScheme, UpdateScheme)> {
    if ch.input_size() != 3 || ch.feedback_size() != 4 {
        return Err(RegionError::Alphabet("Blackwell scheme needs |X| = 3 and |Yt| = 4".into()));
    }
    if alpha < 0.0 || beta < 0.0 || alpha + beta > 1.0 + 1e-12 {
        return Err(RegionError::Grid(format!("alpha={alpha}, beta={beta}")));
    }
    let mid = (1.0 - alpha - beta).max(0.0);
    let law_u = JointPmf::from_fn(U.iter().map(|n| Alphabet::new(*n, 2)).collect(), |u| {
        // (U1, U2) in order 00, 01, 10, 11; U1 = 1 whenever U2 = 1.
        let t = if u[0] == 0 { [alpha, 0.0, mid, beta] } else { [beta, 0.0, mid, alpha] };
        0.5 * t[2 * u[1] + u[2]]
    })?;
    let f = (0..8).map(|i| ((i >> 1) & 1) + (i & 1)).collect();
    let aux = AuxiliaryScheme::new(law_u, f)?;
    let upd = UpdateScheme::deterministic(Variant::Star, &aux, ch, [2, 2, 2], |g| {
        let (x, yt) = (g[0], g[1]);
        let (d1, d2) = (usize::from(x >= 1), usize::from(x == 2));
        [(yt >> 1) ^ d1, d1, d2]
    })?;
    Ok((aux, upd))
}

#[derive(Clone, Debug)]
pub enum AuxFamily {
    /// `(alpha, beta)` grid over the triangle, then local refinement.
    Blackwell(GridSpec),
    /// The two `V0` choices of the Dueck scheme, combined by convex hull.
    Dueck,
    Custom(Vec<(AuxiliaryScheme, UpdateScheme)>),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    SumRate,
    Weighted([f64; 3]),
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub scheme: (AuxiliaryScheme, UpdateScheme),
    pub region: RateRegion3,
    pub value: f64,
}

fn objective_value(r: &RateRegion3, obj: Objective) -> Result<f64> {
    Ok(match obj {
        Objective::SumRate => {
            let s = r.sum_rate_max()?;
            if s.feasible {
                s.value
            } else {
                f64::NEG_INFINITY
            }
        }
        Objective::Weighted(w) => r.weighted_max(w)?.unwrap_or(f64::NEG_INFINITY),
    })
}

fn evaluate(ch: &Dmbc, aux: &AuxiliaryScheme, upd: &UpdateScheme, obj: Objective) -> Result<(RateRegion3, f64)> {
    let r = feedback_inner(aux, upd, ch, upd.variant)?;
    let v = objective_value(&r, obj)?;
    Ok((r, v))
}

fn best_of(
    ch: &Dmbc,
    candidates: Vec<(AuxiliaryScheme, UpdateScheme)>,
    obj: Objective,
) -> Result<(usize, SearchResult)> {
    if candidates.is_empty() {
        return Err(RegionError::EmptyGrid);
    }
    let evaluated: Vec<(RateRegion3, f64)> =
        candidates.par_iter().map(|(aux, upd)| evaluate(ch, aux, upd, obj)).collect::<Result<_>>()?;
    let mut i = 0;
    for (j, e) in evaluated.iter().enumerate() {
        if e.1 > evaluated[i].1 {
            i = j;
        }
    }
    let (region, value) = evaluated[i].clone();
    Ok((i, SearchResult { scheme: candidates[i].clone(), region, value }))
}

/// Best region over a parametric auxiliary family; ties go to the first candidate.
pub fn aux_grid_search(ch: &Dmbc, family: &AuxFamily, objective: Objective) -> Result<SearchResult> {
    match family {
        AuxFamily::Blackwell(grid) => {
            let pts = grid.triangle(21)?;
            let candidates = pts.iter().map(|&(a, b)| blackwell_scheme(a, b, ch)).collect::<Result<_>>()?;
            let (i, best) = best_of(ch, candidates, objective)?;
            if pts.len() == 1 {
                return Ok(best);
            }
            let step = grid.param("alpha").map(|g| (g.hi - g.lo) / (g.steps.max(2) - 1) as f64).unwrap_or(0.05);
            let f = |a: f64, b: f64| {
                if a < 0.0 || b < 0.0 || a + b > 1.0 {
                    return f64::NEG_INFINITY;
                }
                blackwell_scheme(a, b, ch)
                    .and_then(|(aux, upd)| evaluate(ch, &aux, &upd, objective))
                    .map(|(_, v)| v)
                    .unwrap_or(f64::NEG_INFINITY)
            };
            let (v, a, b) = refine_2d(f, (best.value, pts[i].0, pts[i].1), step, 16);
            if v > best.value {
                let (aux, upd) = blackwell_scheme(a, b, ch)?;
                let (region, value) = evaluate(ch, &aux, &upd, objective)?;
                return Ok(SearchResult { scheme: (aux, upd), region, value });
            }
            Ok(best)
        }
        AuxFamily::Dueck => {
            let scheme = dueck_theorem3_scheme(ch, DueckV0::Z0Z1)?;
            let region = dueck_theorem3_region(ch)?;
            let value = objective_value(&region, objective)?;
            Ok(SearchResult { scheme, region, value })
        }
        AuxFamily::Custom(list) => Ok(best_of(ch, list.clone(), objective)?.1),
    }
}

// ------------------------------------------------------ random generators

fn random_simplex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

/// Random law on `U0 U1 U2` with the given sizes and a random total map into `x_size` symbols.
pub fn random_aux<R: Rng + ?Sized>(rng: &mut R, sizes: [usize; 3], x_size: usize) -> AuxiliaryScheme {
    let n = sizes.iter().product();
    let law_u = JointPmf::new(
        U.iter().zip(sizes).map(|(name, s)| Alphabet::new(*name, s)).collect(),
        random_simplex(rng, n),
    )
    .expect("valid law");
    let f = (0..n).map(|_| rng.gen_range(0..x_size)).collect();
    AuxiliaryScheme { law_u, f }
}

/// Random stochastic update law of the given variant.
pub fn random_update<R: Rng + ?Sized>(
    rng: &mut R,
    variant: Variant,
    aux: &AuxiliaryScheme,
    ch: &Dmbc,
    v_sizes: [usize; 3],
) -> Result<UpdateScheme> {
    let given = UpdateScheme::given_axes(variant, &aux.sizes()?, ch.input_size(), ch.feedback_size());
    let rows: usize = given.iter().map(|a| a.size).product();
    let n_out: usize = v_sizes.iter().product();
    let mass: Vec<f64> = (0..rows).flat_map(|_| random_simplex(rng, n_out)).collect();
    UpdateScheme::new(variant, ConditionalPmf::new(given, UpdateScheme::v_axes(v_sizes), mass)?)
}

/// Random channel with `|X| = nx`, binary outputs and noiseless feedback `Yt = (Y1, Y2)`.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, nx: usize) -> Result<Dmbc> {
    let rows: Vec<Vec<f64>> = (0..nx).map(|_| random_simplex(rng, 4)).collect();
    Ok(Dmbc::from_table([nx, 2, 2, 4], |x| {
        (0..4).map(|o| ((o >> 1, o & 1, o), rows[x][o])).collect()
    })?)
}

/// Which elimination is compared against which closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FmTarget {
    /// Split Marton system against [`marton_closed_form`].
    Marton,
    /// LGW bin-rate system against the `Inner` LGW region.
    Lgw,
    /// Combined Marton + update system against the printed full region.
    Feedback,
    /// Combined system with the star update cost against the star region.
    FeedbackStar,
}

impl FmTarget {
    pub const ALL: [FmTarget; 4] = [FmTarget::Marton, FmTarget::Lgw, FmTarget::Feedback, FmTarget::FeedbackStar];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FmReport {
    pub target: FmTarget,
    pub cases: usize,
    pub passed: usize,
    pub tol: f64,
    /// Indices of the failing cases.
    pub failures: Vec<usize>,
}

impl FmReport {
    pub fn pass(&self) -> bool {
        self.passed == self.cases
    }
}

/// Random information constants drawn from random laws, so that they are
/// jointly realizable.
pub fn random_constants<R: Rng + ?Sized>(rng: &mut R, target: FmTarget) -> Result<PresplitInput> {
    let ch = random_channel(rng, 4)?;
    let aux = random_aux(rng, [2, 2, 2], 4);
    Ok(match target {
        FmTarget::Marton => PresplitInput::Marton(RegionConstants::from_joint(&induced_joint(&aux, None, &ch)?, None)?),
        FmTarget::Lgw => {
            let src = ch.joint(&random_simplex(rng, 4))?.marginalize(&["X", "Y1", "Y2"])?;
            let given = vec![Alphabet::new("X", 4)];
            let out = UpdateScheme::v_axes([2, 2, 2]);
            let mass: Vec<f64> = (0..4).flat_map(|_| random_simplex(rng, 8)).collect();
            let j = src.compose(&ConditionalPmf::new(given, out, mass)?)?;
            PresplitInput::Lgw(LgwConstants::from_joint(&j)?)
        }
        FmTarget::Feedback | FmTarget::FeedbackStar => {
            let variant = if target == FmTarget::Feedback { Variant::Full } else { Variant::Star };
            let upd = random_update(rng, variant, &aux, &ch, [2, 2, 2])?;
            let c = feedback_constants(&aux, &upd, &ch)?;
            if target == FmTarget::Feedback {
                PresplitInput::Combined(c)
            } else {
                PresplitInput::CombinedStar(c)
            }
        }
    })
}

/// Eliminated region and closed form for one constant vector.
pub fn fm_pair(input: &PresplitInput, cap: [f64; 3]) -> Result<(RateRegion3, RateRegion3)> {
    let elim = presplit_eliminate(input, Some(cap))?;
    let closed = match input {
        PresplitInput::Marton(c) | PresplitInput::MartonLiteral(c) => marton_closed_form(c, cap),
        PresplitInput::Lgw(c) => lgw_from_constants(c, LgwVariant::Inner, cap),
        PresplitInput::Combined(c) => feedback_from_constants(c, FeedbackForm::Full, cap)?,
        PresplitInput::CombinedStar(c) => feedback_from_constants(c, FeedbackForm::Star, cap)?,
    };
    Ok((elim, closed))
}

/// Runs `cases` random constant vectors through elimination and compares
/// with the closed form at tolerance `tol`.
pub fn fm_check<R: Rng + ?Sized>(rng: &mut R, target: FmTarget, cases: usize, tol: f64) -> Result<FmReport> {
    let mut failures = Vec::new();
    for k in 0..cases {
        let input = random_constants(rng, target)?;
        let (elim, closed) = fm_pair(&input, [8.0; 3])?;
        if !region_equal(&elim, &closed, tol)? {
            failures.push(k);
        }
    }
    Ok(FmReport { target, cases, passed: cases - failures.len(), tol, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{dueck_correlated_noise, dueck_zero_noise, make_dueck, BlackwellParams, DueckParams};

    #[test]
    fn dueck_reproduction() {
        let fb = dueck_capacity(&dueck_correlated_noise(), DueckWhich::Feedback).unwrap();
        let nofb = dueck_capacity(&dueck_correlated_noise(), DueckWhich::Nofeedback).unwrap();
        assert!((fb.sum_rate_max().unwrap().value - 2.0).abs() < 1e-9);
        assert!((nofb.sum_rate_max().unwrap().value - 1.0).abs() < 1e-9);
        let ch = make_dueck(&DueckParams { noise_law: dueck_correlated_noise(), feedback: FeedbackConfig::Noiseless })
            .unwrap();
        let hull = dueck_theorem3_region(&ch).unwrap();
        assert!((hull.sum_rate_max().unwrap().value - 2.0).abs() < 1e-6);
    }

    #[test]
    fn dueck_zero_noise_region() {
        let fb = dueck_capacity(&dueck_zero_noise(), DueckWhich::Feedback).unwrap();
        let mut want = RateRegion3::new(Vec::new(), Some([4.0; 3]));
        want.push([1.0, 0.0, 0.0], 0.0);
        want.push([0.0, 1.0, 0.0], 2.0);
        want.push([0.0, 0.0, 1.0], 2.0);
        want.push([0.0, 1.0, 1.0], 3.0);
        assert!(region_equal(&fb, &want, 1e-9).unwrap());
    }

    #[test]
    fn blackwell_family_matches_closed_form() {
        let ch = channels::make_blackwell(&BlackwellParams { p: 0.1, feedback: FeedbackConfig::Noiseless }).unwrap();
        for (a, b) in [(0.3, 0.3), (0.2, 0.5), (0.0, 1.0), (0.45, 0.1)] {
            let (aux, upd) = blackwell_scheme(a, b, &ch).unwrap();
            let c = feedback_constants(&aux, &upd, &ch).unwrap();
            let side = c.m() - c.kmax();
            let sum = c.s() - c.g[0] - c.g[1] - c.kmax();
            assert!((side - blackwell_side(a, b, 0.1)).abs() < 1e-9, "{a} {b}: {side} vs {}", blackwell_side(a, b, 0.1));
            assert!((sum - blackwell_objective(a, b, 0.1)).abs() < 1e-9, "{a} {b}: {sum}");
        }
    }

    #[test]
    fn blackwell_p0() {
        let b = blackwell_bounds(0.0, &GridSpec::alpha_beta(200)).unwrap();
        assert!((b.fb_lower - 3f64.log2()).abs() < 1e-4, "{b:?}");
        assert!(b.fb_lower <= b.fb_cutset + 1e-9);
    }
}
