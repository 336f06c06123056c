//! Linear inequality systems, Fourier-Motzkin projection and rate-region geometry.
//!
//! Every row is `coef · x ≤ bound`. Strict inequalities are stored as
//! non-strict; callers back off by [`MU_BACKOFF`] when testing interior points.

use crate::lp::{self, LpOutcome};
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use thiserror::Error;

pub const TAU_GEO: f64 = 1e-9;
pub const MU_BACKOFF: f64 = 1e-6;
const SIGN_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("unknown variable `{0}`")]
    UnknownVar(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVar(String),
    #[error("row has {got} coefficients, system has {expected} variables")]
    Shape { expected: usize, got: usize },
    #[error("non-finite entry in row {0}")]
    NonFinite(usize),
    #[error("region is unbounded along R{0}")]
    Unbounded(usize),
    #[error("system variables {0:?} are not exactly R0, R1, R2")]
    NotRateSystem(Vec<String>),
}

pub type Result<T> = std::result::Result<T, PolyError>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub coef: Vec<f64>,
    pub bound: f64,
}

impl Row {
    fn scale(&self) -> f64 {
        self.coef.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    fn normalized(&self) -> Row {
        let s = self.scale();
        if s < SIGN_EPS {
            return self.clone();
        }
        Row { coef: self.coef.iter().map(|c| c / s).collect(), bound: self.bound / s }
    }

    fn is_constant(&self) -> bool {
        self.scale() < SIGN_EPS
    }
}

/// Named-variable system `A x ≤ b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinIneqSystem {
    pub vars: Vec<String>,
    pub rows: Vec<Row>,
}

impl LinIneqSystem {
    pub fn new<S: AsRef<str>>(vars: &[S]) -> Result<Self> {
        let mut v: Vec<String> = Vec::with_capacity(vars.len());
        for name in vars {
            let name = name.as_ref().to_string();
            if v.contains(&name) {
                return Err(PolyError::DuplicateVar(name));
            }
            v.push(name);
        }
        Ok(LinIneqSystem { vars: v, rows: Vec::new() })
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars.iter().position(|v| v == name).ok_or_else(|| PolyError::UnknownVar(name.to_string()))
    }

    pub fn push_row(&mut self, coef: Vec<f64>, bound: f64) -> Result<()> {
        if coef.len() != self.vars.len() {
            return Err(PolyError::Shape { expected: self.vars.len(), got: coef.len() });
        }
        if !bound.is_finite() || coef.iter().any(|c| !c.is_finite()) {
            return Err(PolyError::NonFinite(self.rows.len()));
        }
        self.rows.push(Row { coef, bound });
        Ok(())
    }

    /// Adds `Σ c·var ≤ bound`.
    pub fn le(&mut self, terms: &[(&str, f64)], bound: f64) -> Result<()> {
        let mut coef = vec![0.0; self.vars.len()];
        for (name, c) in terms {
            coef[self.var_index(name)?] += c;
        }
        self.push_row(coef, bound)
    }

    /// Adds `Σ c·var ≥ bound`.
    pub fn ge(&mut self, terms: &[(&str, f64)], bound: f64) -> Result<()> {
        let neg: Vec<(&str, f64)> = terms.iter().map(|(n, c)| (*n, -c)).collect();
        self.le(&neg, -bound)
    }

    /// Adds `var ≥ 0` for each name.
    pub fn nonneg(&mut self, names: &[&str]) -> Result<()> {
        for n in names {
            self.ge(&[(n, 1.0)], 0.0)?;
        }
        Ok(())
    }

    pub fn satisfies(&self, x: &[f64], tol: f64) -> bool {
        self.rows.iter().all(|r| dot(&r.coef, x) <= r.bound + tol * (1.0 + r.bound.abs()))
    }

    /// True when the system contains the canonical infeasible row `0 ≤ -1`.
    pub fn is_flagged_infeasible(&self) -> bool {
        self.rows.iter().any(|r| r.is_constant() && r.bound < 0.0)
    }

    pub fn is_feasible(&self) -> bool {
        let (a, b) = self.matrix();
        lp::feasible(&a, &b, self.vars.len())
    }

    fn matrix(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        (self.rows.iter().map(|r| r.coef.clone()).collect(), self.rows.iter().map(|r| r.bound).collect())
    }

    fn infeasible_marker(vars: Vec<String>) -> Self {
        let n = vars.len();
        LinIneqSystem { vars, rows: vec![Row { coef: vec![0.0; n], bound: -1.0 }] }
    }

    /// Projects out `var` and prunes redundant rows.
    pub fn fm_eliminate(&self, var: &str) -> Result<LinIneqSystem> {
        let k = self.var_index(var)?;
        let vars: Vec<String> = self.vars.iter().filter(|v| *v != var).cloned().collect();
        let drop_k = |c: &[f64]| -> Vec<f64> {
            c.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, v)| *v).collect()
        };
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut rows = Vec::new();
        for r in &self.rows {
            let c = r.coef[k];
            if c > SIGN_EPS {
                pos.push(r);
            } else if c < -SIGN_EPS {
                neg.push(r);
            } else {
                rows.push(Row { coef: drop_k(&r.coef), bound: r.bound });
            }
        }
        for p in &pos {
            for q in &neg {
                let (a, b) = (p.coef[k], -q.coef[k]);
                let coef: Vec<f64> = p.coef.iter().zip(&q.coef).map(|(x, y)| x / a + y / b).collect();
                rows.push(Row { coef: drop_k(&coef), bound: p.bound / a + q.bound / b });
            }
        }
        let mut out = LinIneqSystem { vars, rows: Vec::new() };
        for r in rows {
            let r = r.normalized();
            if r.is_constant() {
                if r.bound < -TAU_GEO {
                    return Ok(LinIneqSystem::infeasible_marker(out.vars));
                }
                continue;
            }
            out.rows.push(r);
        }
        Ok(out.remove_redundant())
    }

    pub fn fm_eliminate_all(&self, vars: &[&str]) -> Result<LinIneqSystem> {
        let mut s = self.clone();
        for v in vars {
            s = s.fm_eliminate(v)?;
        }
        Ok(s)
    }

    /// Same feasible set with implied rows dropped.
    pub fn remove_redundant(&self) -> LinIneqSystem {
        let n = self.vars.len();
        let mut rows: Vec<Row> = Vec::new();
        for r in &self.rows {
            let r = r.normalized();
            if r.is_constant() {
                if r.bound < -TAU_GEO {
                    return LinIneqSystem::infeasible_marker(self.vars.clone());
                }
                continue;
            }
            let dup = rows.iter().any(|q| {
                q.coef.iter().zip(&r.coef).all(|(a, b)| (a - b).abs() <= 1e-12) && (q.bound - r.bound).abs() <= 1e-12
            });
            if !dup {
                rows.push(r);
            }
        }
        if rows.is_empty() {
            return LinIneqSystem { vars: self.vars.clone(), rows };
        }
        let a: Vec<Vec<f64>> = rows.iter().map(|r| r.coef.clone()).collect();
        let b: Vec<f64> = rows.iter().map(|r| r.bound).collect();
        if !lp::feasible(&a, &b, n) {
            return LinIneqSystem::infeasible_marker(self.vars.clone());
        }
        let mut keep = vec![true; rows.len()];
        for i in 0..rows.len() {
            let (oa, ob): (Vec<Vec<f64>>, Vec<f64>) = (0..rows.len())
                .filter(|&j| j != i && keep[j])
                .map(|j| (rows[j].coef.clone(), rows[j].bound))
                .unzip();
            let redundant = match lp::maximize(&rows[i].coef, &oa, &ob) {
                LpOutcome::Optimal { value, .. } => value <= rows[i].bound + TAU_GEO * (1.0 + rows[i].bound.abs()),
                LpOutcome::Infeasible => true,
                LpOutcome::Unbounded => false,
            };
            if redundant {
                keep[i] = false;
            }
        }
        let rows = rows.into_iter().zip(keep).filter(|(_, k)| *k).map(|(r, _)| r).collect();
        LinIneqSystem { vars: self.vars.clone(), rows }
    }

    /// Reinterprets a system over exactly `R0, R1, R2` as a rate region.
    pub fn to_region3(&self, cap: Option<[f64; 3]>) -> Result<RateRegion3> {
        let mut idx = [0usize; 3];
        if self.vars.len() != 3 {
            return Err(PolyError::NotRateSystem(self.vars.clone()));
        }
        for (i, name) in ["R0", "R1", "R2"].iter().enumerate() {
            idx[i] = self.var_index(name).map_err(|_| PolyError::NotRateSystem(self.vars.clone()))?;
        }
        let hs = self
            .rows
            .iter()
            .map(|r| Halfspace::new([r.coef[idx[0]], r.coef[idx[1]], r.coef[idx[2]]], r.bound))
            .collect();
        Ok(RateRegion3 { halfspaces: hs, cap, orientation: Orientation::Down })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub a: [f64; 3],
    pub b: f64,
}

impl Halfspace {
    /// Builds `a·r ≤ b`, scaled to unit normal when `a` is nonzero.
    pub fn new(a: [f64; 3], b: f64) -> Self {
        let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
        if n < SIGN_EPS {
            return Halfspace { a: [0.0; 3], b: if b < -TAU_GEO { -1.0 } else { 0.0 } };
        }
        Halfspace { a: [a[0] / n, a[1] / n, a[2] / n], b: b / n }
    }

    pub fn eval(&self, r: &[f64; 3]) -> f64 {
        self.a[0] * r[0] + self.a[1] * r[1] + self.a[2] * r[2]
    }

    fn holds(&self, r: &[f64; 3], tol: f64) -> bool {
        self.eval(r) <= self.b + tol * (1.0 + self.b.abs())
    }
}

/// Whether the region is a capacity-style down-set or a cost-style up-set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Down,
    Up,
}

/// Polytope in nonnegative `(R0, R1, R2)` with optional box cap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRegion3 {
    pub halfspaces: Vec<Halfspace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<[f64; 3]>,
    #[serde(default)]
    pub orientation: Orientation,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SumRate {
    pub value: f64,
    pub feasible: bool,
}

impl RateRegion3 {
    pub fn new(halfspaces: Vec<Halfspace>, cap: Option<[f64; 3]>) -> Self {
        RateRegion3 { halfspaces, cap, orientation: Orientation::Down }
    }

    /// `Σ a_i R_i ≤ b`.
    pub fn push(&mut self, a: [f64; 3], b: f64) {
        self.halfspaces.push(Halfspace::new(a, b));
    }

    /// Axis-aligned box `[0, hi]`.
    pub fn boxed(hi: [f64; 3]) -> Self {
        let mut r = RateRegion3::new(Vec::new(), Some(hi));
        for (i, h) in hi.iter().enumerate() {
            let mut a = [0.0; 3];
            a[i] = 1.0;
            r.push(a, *h);
        }
        r
    }

    pub fn with_cap(mut self, cap: [f64; 3]) -> Self {
        self.cap = Some(cap);
        self
    }

    /// All constraints including nonnegativity and the cap.
    fn all_planes(&self) -> Vec<Halfspace> {
        let mut p = self.halfspaces.clone();
        for i in 0..3 {
            let mut a = [0.0; 3];
            a[i] = -1.0;
            p.push(Halfspace { a, b: 0.0 });
            if let Some(c) = self.cap {
                a[i] = 1.0;
                p.push(Halfspace { a, b: c[i] });
            }
        }
        p
    }

    pub fn is_flagged_infeasible(&self) -> bool {
        self.halfspaces.iter().any(|h| h.a == [0.0; 3] && h.b < 0.0)
    }

    pub fn contains_point(&self, r: &[f64; 3]) -> bool {
        self.contains_tol(r, TAU_GEO)
    }

    pub fn contains_tol(&self, r: &[f64; 3], tol: f64) -> bool {
        self.all_planes().iter().all(|h| h.holds(r, tol))
    }

    fn check_bounded(&self) -> Result<()> {
        if self.cap.is_some() {
            return Ok(());
        }
        let planes = self.all_planes();
        let a: Vec<Vec<f64>> = planes.iter().map(|h| h.a.to_vec()).collect();
        let b: Vec<f64> = planes.iter().map(|h| h.b).collect();
        for i in 0..3 {
            let mut c = vec![0.0; 3];
            c[i] = 1.0;
            if lp::maximize(&c, &a, &b) == LpOutcome::Unbounded {
                return Err(PolyError::Unbounded(i));
            }
        }
        Ok(())
    }

    /// Enumerates vertices as feasible intersections of three planes.
    pub fn vertices(&self) -> Result<VertexCloud> {
        self.check_bounded()?;
        if self.is_flagged_infeasible() {
            return Ok(VertexCloud::default());
        }
        let planes = self.all_planes();
        let mut pts: Vec<[f64; 3]> = Vec::new();
        let np = planes.len();
        for i in 0..np {
            for j in i + 1..np {
                for k in j + 1..np {
                    let m = Matrix3::new(
                        planes[i].a[0], planes[i].a[1], planes[i].a[2],
                        planes[j].a[0], planes[j].a[1], planes[j].a[2],
                        planes[k].a[0], planes[k].a[1], planes[k].a[2],
                    );
                    if m.determinant().abs() < SIGN_EPS {
                        continue;
                    }
                    let Some(x) = m.lu().solve(&Vector3::new(planes[i].b, planes[j].b, planes[k].b)) else {
                        continue;
                    };
                    let p = [x[0], x[1], x[2]];
                    if planes.iter().all(|h| h.holds(&p, 1e-9)) && !pts.iter().any(|q| close(q, &p, 1e-8)) {
                        pts.push(p.map(|v| if v.abs() < 1e-12 { 0.0 } else { v }));
                    }
                }
            }
        }
        Ok(VertexCloud { points: pts })
    }

    /// Max of `R1 + R2` on the `R0 = 0` slice.
    pub fn sum_rate_max(&self) -> Result<SumRate> {
        let mut slice = self.clone();
        slice.push([1.0, 0.0, 0.0], 0.0);
        let v = slice.vertices()?;
        if v.points.is_empty() {
            return Ok(SumRate { value: 0.0, feasible: false });
        }
        let value = v.points.iter().map(|p| p[1] + p[2]).fold(f64::NEG_INFINITY, f64::max);
        Ok(SumRate { value, feasible: true })
    }

    /// Max of `w · R` over the region.
    pub fn weighted_max(&self, w: [f64; 3]) -> Result<Option<f64>> {
        let v = self.vertices()?;
        Ok(v.points.iter().map(|p| w[0] * p[0] + w[1] * p[1] + w[2] * p[2]).reduce(f64::max))
    }

    /// True iff every vertex of `self` lies in `other` within `tol`.
    pub fn subset_of(&self, other: &RateRegion3, tol: f64) -> Result<bool> {
        Ok(self.vertices()?.points.iter().all(|p| other.contains_tol(p, tol)))
    }
}

fn close(a: &[f64; 3], b: &[f64; 3], tol: f64) -> bool {
    (0..3).all(|i| (a[i] - b[i]).abs() <= tol)
}

pub fn region_equal(a: &RateRegion3, b: &RateRegion3, tol: f64) -> Result<bool> {
    Ok(a.subset_of(b, tol)? && b.subset_of(a, tol)?)
}

/// Halfspace form of conv(a ∪ b).
pub fn convex_hull_union(a: &RateRegion3, b: &RateRegion3) -> Result<RateRegion3> {
    let mut pts = a.vertices()?.points;
    for p in b.vertices()?.points {
        if !pts.iter().any(|q| close(q, &p, 1e-8)) {
            pts.push(p);
        }
    }
    let cap = match (a.cap, b.cap) {
        (Some(x), Some(y)) => Some([x[0].max(y[0]), x[1].max(y[1]), x[2].max(y[2])]),
        (x, y) => x.or(y),
    };
    let mut out = RateRegion3 { halfspaces: hull_halfspaces(&pts), cap, orientation: a.orientation };
    if pts.is_empty() {
        out.halfspaces = vec![Halfspace { a: [0.0; 3], b: -1.0 }];
    }
    Ok(out)
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> Vector3<f64> {
    Vector3::new(a[0] - b[0], a[1] - b[1], a[2] - b[2])
}

fn hull_halfspaces(pts: &[[f64; 3]]) -> Vec<Halfspace> {
    if pts.is_empty() {
        return Vec::new();
    }
    let n = pts.len() as f64;
    let mean = (0..3).map(|k| pts.iter().map(|p| p[k]).sum::<f64>() / n).collect::<Vec<_>>();
    let centered = nalgebra::DMatrix::from_fn(pts.len(), 3, |i, k| pts[i][k] - mean[k]);
    let svd = centered.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let scale = 1.0 + pts.iter().flat_map(|p| p.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
    let mut dirs: Vec<(f64, Vector3<f64>)> =
        (0..svd.singular_values.len())
            .map(|i| (svd.singular_values[i], Vector3::new(vt[(i, 0)], vt[(i, 1)], vt[(i, 2)])))
            .collect();
    while dirs.len() < 3 {
        let have: Vec<Vector3<f64>> = dirs.iter().map(|d| d.1).collect();
        let e = (0..3)
            .map(|k| {
                let mut v = Vector3::zeros();
                v[k] = 1.0;
                for h in &have {
                    v -= h * h.dot(&v);
                }
                v
            })
            .max_by(|x, y| x.norm().total_cmp(&y.norm()))
            .unwrap();
        dirs.push((0.0, e.normalize()));
    }
    let span: Vec<Vector3<f64>> = dirs.iter().filter(|d| d.0 > 1e-9 * scale).map(|d| d.1).collect();
    let null: Vec<Vector3<f64>> = dirs.iter().filter(|d| d.0 <= 1e-9 * scale).map(|d| d.1).collect();

    let mut hs = Vec::new();
    let p0 = pts[0];
    for nu in &null {
        let b = nu[0] * p0[0] + nu[1] * p0[1] + nu[2] * p0[2];
        hs.push(Halfspace::new([nu[0], nu[1], nu[2]], b));
        hs.push(Halfspace::new([-nu[0], -nu[1], -nu[2]], -b));
    }
    let try_normal = |w: Vector3<f64>, anchor: &[f64; 3], hs: &mut Vec<Halfspace>| {
        if w.norm() < 1e-10 {
            return;
        }
        let w = w.normalize();
        let b = w[0] * anchor[0] + w[1] * anchor[1] + w[2] * anchor[2];
        let vals: Vec<f64> = pts.iter().map(|p| w[0] * p[0] + w[1] * p[1] + w[2] * p[2] - b).collect();
        let tol = 1e-9 * scale;
        let cand = if vals.iter().all(|v| *v <= tol) {
            Halfspace::new([w[0], w[1], w[2]], b)
        } else if vals.iter().all(|v| *v >= -tol) {
            Halfspace::new([-w[0], -w[1], -w[2]], -b)
        } else {
            return;
        };
        if !hs.iter().any(|h| close(&h.a, &cand.a, 1e-9) && (h.b - cand.b).abs() <= 1e-9 * scale) {
            hs.push(cand);
        }
    };
    match span.len() {
        3 => {
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    for k in j + 1..pts.len() {
                        let w = sub(&pts[j], &pts[i]).cross(&sub(&pts[k], &pts[i]));
                        try_normal(w, &pts[i], &mut hs);
                    }
                }
            }
        }
        2 => {
            let nu = null[0];
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    try_normal(sub(&pts[j], &pts[i]).cross(&nu), &pts[i], &mut hs);
                }
            }
        }
        1 => {
            let u = span[0];
            let (lo, hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                let t = u[0] * p[0] + u[1] * p[1] + u[2] * p[2];
                (lo.min(t), hi.max(t))
            });
            hs.push(Halfspace::new([u[0], u[1], u[2]], hi));
            hs.push(Halfspace::new([-u[0], -u[1], -u[2]], -lo));
        }
        _ => {}
    }
    hs
}

/// Point set in rate space.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VertexCloud {
    pub points: Vec<[f64; 3]>,
}

impl VertexCloud {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("R0,R1,R2\n");
        for p in &self.points {
            let _ = writeln!(s, "{},{},{}", sig9(p[0]), sig9(p[1]), sig9(p[2]));
        }
        s
    }
}

/// Float rendered with at most 9 significant digits.
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let v: f64 = format!("{:.8e}", x).parse().unwrap_or(x);
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pairing() {
        let mut s = LinIneqSystem::new(&["x", "y"]).unwrap();
        s.le(&[("y", 1.0), ("x", 1.0)], 1.0).unwrap();
        s.le(&[("y", -1.0)], 0.0).unwrap();
        let p = s.fm_eliminate("y").unwrap();
        assert_eq!(p.vars, vec!["x"]);
        assert_eq!(p.rows.len(), 1);
        assert!((p.rows[0].coef[0] - 1.0).abs() < 1e-12 && (p.rows[0].bound - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_projection() {
        let mut s = LinIneqSystem::new(&["y"]).unwrap();
        s.le(&[("y", -1.0)], -2.0).unwrap();
        s.le(&[("y", 1.0)], 1.0).unwrap();
        let p = s.fm_eliminate("y").unwrap();
        assert!(p.is_flagged_infeasible());
        assert_eq!(p.rows, vec![Row { coef: vec![], bound: -1.0 }]);
    }

    #[test]
    fn dominated_row() {
        let mut s = LinIneqSystem::new(&["x"]).unwrap();
        s.le(&[("x", 1.0)], 1.0).unwrap();
        s.le(&[("x", 1.0)], 2.0).unwrap();
        let r = s.remove_redundant();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].bound, 1.0);
    }

    #[test]
    fn cube_corners() {
        let v = RateRegion3::boxed([1.0; 3]).vertices().unwrap();
        assert_eq!(v.points.len(), 8);
        assert!(v.to_csv().starts_with("R0,R1,R2\n"));
    }

    #[test]
    fn unbounded_is_error() {
        let mut r = RateRegion3::new(Vec::new(), None);
        r.push([1.0, 0.0, 0.0], 1.0);
        assert_eq!(r.vertices(), Err(PolyError::Unbounded(1)));
    }

    #[test]
    fn hull_of_boxes() {
        let a = RateRegion3::boxed([1.0; 3]);
        let b = RateRegion3::boxed([2.0, 0.5, 0.5]);
        let h = convex_hull_union(&a, &b).unwrap();
        assert!(h.contains_point(&[1.5, 0.25, 0.25]));
        assert!(!h.contains_point(&[1.9, 0.9, 0.9]));
        assert!(region_equal(&convex_hull_union(&a, &a).unwrap(), &a, 1e-9).unwrap());
    }

    #[test]
    fn flat_hull() {
        let a = RateRegion3::boxed([0.0, 1.0, 1.0]);
        let mut b = RateRegion3::boxed([0.0, 2.0, 2.0]);
        b.push([0.0, 1.0, 1.0], 2.0);
        let h = convex_hull_union(&a, &b).unwrap();
        assert!(region_equal(&h, &b, 1e-9).unwrap());
        assert!(!h.contains_point(&[0.1, 0.5, 0.5]));
    }

    #[test]
    fn sig_digits() {
        assert_eq!(sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(sig9(2.0), "2");
        assert_eq!(sig9(0.0), "0");
    }
}
