//! Increment laws, hypothesis checks and path sampling.

mod stable;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::site::{check_dim, Site, MAX_DIM};

pub use stable::{power_tail_sum, AliasTable, PowerLawMagnitude, HEAD_CAP, JUMP_CAP};

const PROB_SUM_TOL: f64 = 1e-9;

/// Law of one increment `X_1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum IncrementLaw {
    /// Steps in the positive integers with finite support (d = 1).
    #[serde(rename = "renewal")]
    RenewalFinite { support: Vec<i64>, probs: Vec<f64> },
    /// Nearest-neighbour steps `+-e_i` with probability `1/(2d)` each.
    #[serde(rename = "simple")]
    SimpleWalk { dim: usize },
    /// Finitely many steps, law invariant under negation.
    #[serde(rename = "finite_symmetric")]
    FiniteStepSymmetric {
        dim: usize,
        steps: Vec<Vec<i64>>,
        probs: Vec<f64>,
    },
    /// `P(X = +-k e_i)` proportional to `k^-(1+alpha)`.
    #[serde(rename = "stable")]
    StableTail { dim: usize, alpha: f64 },
}

/// The three limit theorems whose hypotheses are checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// d = 1 renewal walk, centered sum over `sqrt(n)`.
    Renewal,
    /// d = 2 symmetric walk, sum over `sqrt(n log n)`.
    Planar,
    /// Transient walk, functional limit over `sqrt(n)`.
    Transient,
}

impl Theorem {
    pub const ALL: [Theorem; 3] = [Theorem::Renewal, Theorem::Planar, Theorem::Transient];
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::Renewal => "renewal",
            Theorem::Planar => "planar",
            Theorem::Transient => "transient",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    WellFormed,
    RenewalSupport,
    Aperiodic,
    Symmetric,
    NonSingularCovariance,
    DimensionExceedsAlpha,
    TrueDimension,
    LatticeDimension,
    FiniteVariance,
}

/// One failed hypothesis and the theorem it blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub theorem: Theorem,
    pub hypothesis: Hypothesis,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.theorem, self.message)
    }
}

/// Small dense square matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = *v;
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// Determinant by partial-pivot elimination.
    pub fn determinant(&self) -> f64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for c in 0..n {
            let p = (c..n)
                .max_by(|&x, &y| a[x * n + c].abs().total_cmp(&a[y * n + c].abs()))
                .unwrap();
            if a[p * n + c] == 0.0 {
                return 0.0;
            }
            if p != c {
                for k in 0..n {
                    a.swap(p * n + k, c * n + k);
                }
                det = -det;
            }
            let piv = a[c * n + c];
            det *= piv;
            for r in c + 1..n {
                let f = a[r * n + c] / piv;
                for k in c..n {
                    a[r * n + k] -= f * a[c * n + k];
                }
            }
        }
        det
    }

    /// Cholesky succeeds with pivots above `tol`.
    pub fn is_positive_definite(&self, tol: f64) -> bool {
        if !self.is_symmetric(1e-12) {
            return false;
        }
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= tol {
                        return false;
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        true
    }

    /// Numerical rank by elimination with threshold `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        rank_of_rows(
            (0..self.n)
                .map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec())
                .collect(),
            tol,
        )
    }
}

fn rank_of_rows(mut rows: Vec<Vec<f64>>, tol: f64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len())
            .filter(|&r| rows[r][c].abs() > tol)
            .max_by(|&x, &y| rows[x][c].abs().total_cmp(&rows[y][c].abs()))
        else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank {
                let f = rows[r][c] / rows[rank][c];
                let pivot = rows[rank].clone();
                for (x, v) in rows[r][c..cols].iter_mut().zip(&pivot[c..cols]) {
                    *x -= f * v;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl IncrementLaw {
    pub fn dim(&self) -> usize {
        match self {
            IncrementLaw::RenewalFinite { .. } => 1,
            IncrementLaw::SimpleWalk { dim }
            | IncrementLaw::FiniteStepSymmetric { dim, .. }
            | IncrementLaw::StableTail { dim, .. } => *dim,
        }
    }

    /// The theorem this family is built for.
    pub fn target_theorem(&self) -> Theorem {
        match self {
            IncrementLaw::RenewalFinite { .. } => Theorem::Renewal,
            IncrementLaw::StableTail { .. } => Theorem::Transient,
            IncrementLaw::SimpleWalk { dim } | IncrementLaw::FiniteStepSymmetric { dim, .. } => {
                if *dim == 2 {
                    Theorem::Planar
                } else {
                    Theorem::Transient
                }
            }
        }
    }

    /// Interarrival mean `m` of a renewal law.
    pub fn renewal_mean(&self) -> Option<f64> {
        match self {
            IncrementLaw::RenewalFinite { support, probs } => {
                Some(support.iter().zip(probs).map(|(&s, &p)| s as f64 * p).sum())
            }
            _ => None,
        }
    }

    fn steps_and_probs(&self) -> Option<(Vec<Vec<i64>>, Vec<f64>)> {
        match self {
            IncrementLaw::RenewalFinite { support, probs } => {
                Some((support.iter().map(|&s| vec![s]).collect(), probs.clone()))
            }
            IncrementLaw::SimpleWalk { dim } => {
                let mut steps = Vec::with_capacity(2 * dim);
                for i in 0..*dim {
                    for sign in [1, -1] {
                        let mut s = vec![0; *dim];
                        s[i] = sign;
                        steps.push(s);
                    }
                }
                Some((steps, vec![1.0 / (2 * dim) as f64; 2 * dim]))
            }
            IncrementLaw::FiniteStepSymmetric { steps, probs, .. } => {
                Some((steps.clone(), probs.clone()))
            }
            IncrementLaw::StableTail { .. } => None,
        }
    }

    fn well_formedness(&self) -> Vec<String> {
        let mut out = Vec::new();
        let dim = self.dim();
        if dim == 0 || dim > MAX_DIM {
            out.push(format!("dimension {dim} outside 1..={MAX_DIM}"));
            return out;
        }
        let check_probs = |probs: &[f64], n: usize, out: &mut Vec<String>| {
            if probs.len() != n {
                out.push(format!("{} probabilities for {} steps", probs.len(), n));
            }
            if n == 0 {
                out.push("empty support".into());
            }
            if probs.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
                out.push("probabilities must be positive".into());
            }
            let total: f64 = probs.iter().sum();
            if (total - 1.0).abs() > PROB_SUM_TOL {
                out.push(format!("probabilities sum to {total}, not 1"));
            }
        };
        match self {
            IncrementLaw::RenewalFinite { support, probs } => {
                check_probs(probs, support.len(), &mut out)
            }
            IncrementLaw::FiniteStepSymmetric { dim, steps, probs } => {
                check_probs(probs, steps.len(), &mut out);
                if let Some(s) = steps.iter().find(|s| s.len() != *dim) {
                    out.push(format!("step {s:?} does not have {dim} coordinates"));
                }
            }
            IncrementLaw::StableTail { alpha, .. } => {
                if !(*alpha > 0.0 && *alpha < 2.0) {
                    out.push(format!("alpha = {alpha} outside (0, 2)"));
                }
            }
            IncrementLaw::SimpleWalk { .. } => {}
        }
        out
    }

    /// Violations against the law's own target theorem, plus well-formedness.
    pub fn validate(&self) -> Vec<Violation> {
        self.validate_for(self.target_theorem())
    }

    /// Violations of `theorem`'s hypotheses.
    pub fn validate_for(&self, theorem: Theorem) -> Vec<Violation> {
        let mut v = Vec::new();
        let mut push = |h: Hypothesis, msg: String| {
            v.push(Violation {
                theorem,
                hypothesis: h,
                message: msg,
            })
        };
        let malformed = self.well_formedness();
        let ok = malformed.is_empty();
        for m in malformed {
            push(Hypothesis::WellFormed, m);
        }
        if !ok {
            return v;
        }
        let dim = self.dim();

        match theorem {
            Theorem::Renewal => match self {
                IncrementLaw::RenewalFinite { support, .. } => {
                    if support.iter().any(|&s| s < 1) {
                        push(
                            Hypothesis::RenewalSupport,
                            "support must lie in the positive integers".into(),
                        );
                    } else {
                        let g = support.iter().fold(0u64, |g, &s| gcd(g, s as u64));
                        if g != 1 {
                            push(Hypothesis::Aperiodic, format!("gcd={g}, not aperiodic"));
                        }
                    }
                }
                _ => push(
                    Hypothesis::RenewalSupport,
                    "requires a renewal law (d = 1, positive integer steps)".into(),
                ),
            },
            Theorem::Planar => {
                if dim != 2 {
                    push(
                        Hypothesis::LatticeDimension,
                        format!("requires d = 2, got d = {dim}"),
                    );
                }
                match self {
                    IncrementLaw::StableTail { .. } => push(
                        Hypothesis::FiniteVariance,
                        "requires a finite covariance matrix; stable-tail steps have infinite variance".into(),
                    ),
                    IncrementLaw::RenewalFinite { .. } => {
                        push(Hypothesis::Symmetric, "renewal steps are not symmetric".into())
                    }
                    _ => {
                        if let Some(msg) = self.symmetry_defect() {
                            push(Hypothesis::Symmetric, msg);
                        }
                        if let Ok(cov) = self.covariance() {
                            if !cov.is_positive_definite(1e-12) {
                                push(
                                    Hypothesis::NonSingularCovariance,
                                    format!("covariance matrix is singular (det = {})", cov.determinant()),
                                );
                            }
                        }
                    }
                }
                if let Some(msg) = self.dimensionality_defect() {
                    push(Hypothesis::TrueDimension, msg);
                }
            }
            Theorem::Transient => {
                match self {
                    IncrementLaw::StableTail { alpha, .. } => {
                        if (dim as f64) <= *alpha {
                            push(
                                Hypothesis::DimensionExceedsAlpha,
                                format!("requires d>alpha, got d = {dim}, alpha = {alpha}"),
                            );
                        }
                    }
                    _ => {
                        if dim < 3 {
                            push(
                                Hypothesis::LatticeDimension,
                                format!("square-integrable steps require d >= 3, got d = {dim}"),
                            );
                        }
                    }
                }
                if let Some(msg) = self.dimensionality_defect() {
                    push(Hypothesis::TrueDimension, msg);
                }
            }
        }
        v
    }

    fn symmetry_defect(&self) -> Option<String> {
        let IncrementLaw::FiniteStepSymmetric { steps, probs, .. } = self else {
            return None;
        };
        for (s, p) in steps.iter().zip(probs) {
            let neg: Vec<i64> = s.iter().map(|x| -x).collect();
            let q: f64 = steps
                .iter()
                .zip(probs)
                .filter(|(t, _)| **t == neg)
                .map(|(_, q)| *q)
                .sum();
            let p_same: f64 = steps
                .iter()
                .zip(probs)
                .filter(|(t, _)| *t == s)
                .map(|(_, q)| *q)
                .sum();
            if (q - p_same).abs() > PROB_SUM_TOL {
                return Some(format!(
                    "step {s:?} has probability {p} but its negation has {q}"
                ));
            }
        }
        None
    }

    fn dimensionality_defect(&self) -> Option<String> {
        let (steps, _) = self.steps_and_probs()?;
        let rows: Vec<Vec<f64>> = steps
            .iter()
            .map(|s| s.iter().map(|&x| x as f64).collect())
            .collect();
        let r = rank_of_rows(rows, 1e-9);
        (r != self.dim()).then(|| {
            format!(
                "support spans {r} dimensions, walk is not truly {}-dimensional",
                self.dim()
            )
        })
    }

    /// `E[X X^T] - E[X] E[X]^T` for finite-step laws.
    pub fn covariance(&self) -> Result<Matrix> {
        let (steps, probs) = self
            .steps_and_probs()
            .ok_or_else(|| Error::Unsupported("covariance of an infinite-support law".into()))?;
        let d = self.dim();
        let mut mean = vec![0.0; d];
        let mut m = Matrix::zeros(d);
        for (s, p) in steps.iter().zip(&probs) {
            for i in 0..d {
                mean[i] += p * s[i] as f64;
                for j in 0..d {
                    m.data[i * d + j] += p * (s[i] * s[j]) as f64;
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                m.data[i * d + j] -= mean[i] * mean[j];
            }
        }
        Ok(m)
    }

    /// Precomputes sampling tables. Fails on malformed laws.
    pub fn sampler(&self) -> Result<WalkSampler> {
        let malformed = self.well_formedness();
        if !malformed.is_empty() {
            return Err(Error::domain(malformed.join("; ")));
        }
        check_dim(self.dim())?;
        let cumulative = |probs: &[f64]| {
            let mut acc = 0.0;
            let mut c: Vec<f64> = probs
                .iter()
                .map(|p| {
                    acc += p;
                    acc
                })
                .collect();
            *c.last_mut().unwrap() = f64::INFINITY;
            c
        };
        Ok(match self {
            IncrementLaw::RenewalFinite { support, probs } => WalkSampler::Finite {
                dim: 1,
                steps: support.iter().map(|&s| Site::on_axis(0, s)).collect(),
                cumulative: cumulative(probs),
            },
            IncrementLaw::SimpleWalk { dim } => WalkSampler::Simple { dim: *dim },
            IncrementLaw::FiniteStepSymmetric { dim, steps, probs } => WalkSampler::Finite {
                dim: *dim,
                steps: steps
                    .iter()
                    .map(|s| Site::from_slice(s))
                    .collect::<Result<_>>()?,
                cumulative: cumulative(probs),
            },
            IncrementLaw::StableTail { dim, alpha } => WalkSampler::Stable {
                dim: *dim,
                magnitude: Box::new(PowerLawMagnitude::new(*alpha)),
            },
        })
    }
}

/// A law with its sampling tables built; cheap to share across threads.
#[derive(Clone, Debug)]
pub enum WalkSampler {
    Simple {
        dim: usize,
    },
    Finite {
        dim: usize,
        steps: Vec<Site>,
        cumulative: Vec<f64>,
    },
    Stable {
        dim: usize,
        magnitude: Box<PowerLawMagnitude>,
    },
}

impl WalkSampler {
    pub fn dim(&self) -> usize {
        match self {
            WalkSampler::Simple { dim }
            | WalkSampler::Finite { dim, .. }
            | WalkSampler::Stable { dim, .. } => *dim,
        }
    }

    /// One increment.
    #[inline]
    pub fn sample_increment(&self, rng: &mut Stream) -> Site {
        match self {
            WalkSampler::Simple { dim } => {
                let k = rng.small_index(2 * *dim as u32);
                Site::on_axis((k >> 1) as usize, if k & 1 == 0 { 1 } else { -1 })
            }
            WalkSampler::Finite {
                steps, cumulative, ..
            } => {
                let u = rng.uniform();
                let i = cumulative.iter().position(|&c| u < c).unwrap();
                steps[i]
            }
            WalkSampler::Stable { dim, magnitude } => {
                let k = magnitude.sample(rng) as i64;
                let dir = rng.small_index(2 * *dim as u32);
                Site::on_axis((dir >> 1) as usize, if dir & 1 == 0 { k } else { -k })
            }
        }
    }

    /// Streaming positions `S_1, S_2, ...`.
    pub fn positions<'a>(&'a self, rng: &'a mut Stream) -> Positions<'a> {
        Positions {
            sampler: self,
            rng,
            current: Site::ORIGIN,
        }
    }

    /// Materialized path of horizon `n`.
    pub fn sample_path(&self, n: usize, rng: &mut Stream) -> Path {
        Path {
            dim: self.dim(),
            positions: self.positions(rng).take(n).collect(),
        }
    }
}

/// Iterator over walk positions, starting after `S_0 = 0`.
pub struct Positions<'a> {
    sampler: &'a WalkSampler,
    rng: &'a mut Stream,
    current: Site,
}

impl Iterator for Positions<'_> {
    type Item = Site;

    #[inline(always)]
    fn next(&mut self) -> Option<Site> {
        match self.sampler {
            WalkSampler::Simple { dim } => {
                let k = self.rng.small_index(2 * *dim as u32);
                let c = &mut self.current.0[(k >> 1) as usize];
                *c += 1 - 2 * (k & 1) as i64;
            }
            WalkSampler::Stable { dim, magnitude } => {
                let m = magnitude.sample(self.rng) as i64;
                let dir = self.rng.small_index(2 * *dim as u32);
                let c = &mut self.current.0[(dir >> 1) as usize];
                *c = c.saturating_add(if dir & 1 == 0 { m } else { -m });
            }
            WalkSampler::Finite { .. } => {
                let step = self.sampler.sample_increment(self.rng);
                self.current = self.current.add(&step);
            }
        }
        Some(self.current)
    }
}

/// Positions `S_1..S_n` of one path; `S_0 = 0` is implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub dim: usize,
    pub positions: Vec<Site>,
}

impl Path {
    pub fn horizon(&self) -> usize {
        self.positions.len()
    }

    /// Builds a path from coordinate vectors of equal length.
    pub fn from_coords(points: &[Vec<i64>]) -> Result<Path> {
        let dim = points.first().map_or(1, Vec::len);
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::usage("path points have mixed dimensions"));
        }
        Ok(Path {
            dim,
            positions: points
                .iter()
                .map(|p| Site::from_slice(p))
                .collect::<Result<_>>()?,
        })
    }
}

/// Convenience wrapper: validate-free sampling of one path.
pub fn sample_path(law: &IncrementLaw, n: usize, rng: &mut Stream) -> Result<Path> {
    if n == 0 {
        return Err(Error::usage("horizon must be at least 1"));
    }
    Ok(law.sampler()?.sample_path(n, rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn renewal(support: &[i64], probs: &[f64]) -> IncrementLaw {
        IncrementLaw::RenewalFinite {
            support: support.to_vec(),
            probs: probs.to_vec(),
        }
    }

    #[test]
    fn periodic_renewal_is_rejected() {
        let v = renewal(&[2, 4], &[0.5, 0.5]).validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].hypothesis, Hypothesis::Aperiodic);
        assert!(v[0].message.contains("gcd=2"));
        assert!(v[0].message.contains("aperiodic"));
        assert!(renewal(&[2, 3], &[0.5, 0.5]).validate().is_empty());
    }

    #[test]
    fn simple_planar_walk_is_valid() {
        let law = IncrementLaw::SimpleWalk { dim: 2 };
        assert_eq!(law.target_theorem(), Theorem::Planar);
        assert!(law.validate().is_empty());
    }

    #[test]
    fn stable_requires_dimension_above_alpha() {
        let v = IncrementLaw::StableTail { dim: 1, alpha: 1.5 }.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].message.contains("requires d>alpha"));
        assert!(IncrementLaw::StableTail { dim: 1, alpha: 0.8 }
            .validate()
            .is_empty());
    }

    #[test]
    fn simple_covariances_enumerate_steps() {
        let c2 = IncrementLaw::SimpleWalk { dim: 2 }.covariance().unwrap();
        assert_eq!(c2, Matrix::identity(2).scaled(0.5));
        let c3 = IncrementLaw::SimpleWalk { dim: 3 }.covariance().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 / 3.0 } else { 0.0 };
                assert!((c3.get(i, j) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn degenerate_planar_steps_are_flagged() {
        let law = IncrementLaw::FiniteStepSymmetric {
            dim: 2,
            steps: vec![vec![1, 0], vec![-1, 0]],
            probs: vec![0.5, 0.5],
        };
        assert_eq!(law.covariance().unwrap().rank(1e-12), 1);
        let hyps: Vec<Hypothesis> = law.validate().iter().map(|v| v.hypothesis).collect();
        assert!(hyps.contains(&Hypothesis::NonSingularCovariance));
        assert!(hyps.contains(&Hypothesis::TrueDimension));
    }

    #[test]
    fn asymmetric_steps_are_flagged() {
        let law = IncrementLaw::FiniteStepSymmetric {
            dim: 2,
            steps: vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
            probs: vec![0.4, 0.1, 0.25, 0.25],
        };
        let hyps: Vec<Hypothesis> = law.validate().iter().map(|v| v.hypothesis).collect();
        assert_eq!(hyps, vec![Hypothesis::Symmetric]);
    }

    #[test]
    fn malformed_probabilities_are_reported() {
        let v = renewal(&[1, 2], &[0.5, 0.6]).validate();
        assert_eq!(v[0].hypothesis, Hypothesis::WellFormed);
        assert!(renewal(&[1, 2], &[0.5, 0.6]).sampler().is_err());
    }

    #[test]
    fn stable_covariance_is_unsupported() {
        let e = IncrementLaw::StableTail { dim: 3, alpha: 1.0 }.covariance();
        assert!(matches!(e, Err(Error::Unsupported(_))));
    }

    #[test]
    fn unit_renewal_path_is_deterministic() {
        let mut rng = Stream::from_seed(0);
        let p = sample_path(&renewal(&[1], &[1.0]), 5, &mut rng).unwrap();
        let xs: Vec<i64> = p.positions.iter().map(|s| s.0[0]).collect();
        assert_eq!(xs, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn transient_requires_three_dimensions() {
        let v = IncrementLaw::SimpleWalk { dim: 1 }.validate();
        assert_eq!(v[0].hypothesis, Hypothesis::LatticeDimension);
        assert!(IncrementLaw::SimpleWalk { dim: 3 }.validate().is_empty());
        assert!(!IncrementLaw::SimpleWalk { dim: 3 }
            .validate_for(Theorem::Renewal)
            .is_empty());
    }

    #[test]
    fn determinant_of_diagonal() {
        assert!((Matrix::diag(&[1.0, 4.0]).determinant() - 4.0).abs() < 1e-15);
        assert!(Matrix::diag(&[1.0, 4.0]).is_positive_definite(0.0));
        assert!(!Matrix::diag(&[1.0, 0.0]).is_positive_definite(1e-12));
    }
}
