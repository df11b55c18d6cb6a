//! Sparse local times and intersection functionals.
//!
//! `N_n(x)` counts visits at times `1..=n`; the starting point `S_0 = 0` is not
//! counted. Integer functionals are accumulated in `u128` with overflow checks
//! and powers are limited to [`MAX_POWER`].

use std::collections::BTreeMap;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenery::SiteField;
use crate::site::Site;
use crate::walks::Path;

/// Largest exponent accepted by the integer intersection functionals.
pub const MAX_POWER: u32 = 8;

/// Visit counts of one path.
#[derive(Clone, Debug, Default)]
pub struct OccupationTable {
    dim: usize,
    horizon: u64,
    counts: FxHashMap<Site, u64>,
}

impl OccupationTable {
    pub fn new(dim: usize) -> Self {
        OccupationTable {
            dim,
            horizon: 0,
            counts: FxHashMap::default(),
        }
    }

    pub fn with_capacity(dim: usize, cap: usize) -> Self {
        let mut counts = FxHashMap::default();
        counts.reserve(cap);
        OccupationTable {
            dim,
            horizon: 0,
            counts,
        }
    }

    /// Occupation table of a full path.
    pub fn accumulate(path: &Path) -> Self {
        Self::from_positions(path.dim, path.positions.iter().copied())
    }

    pub fn from_positions<I: IntoIterator<Item = Site>>(dim: usize, positions: I) -> Self {
        let mut t = OccupationTable::new(dim);
        for s in positions {
            t.record(s);
        }
        t
    }

    #[inline]
    pub fn record(&mut self, site: Site) {
        *self.counts.entry(site).or_insert(0) += 1;
        self.horizon += 1;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// Number of distinct visited sites.
    pub fn range_size(&self) -> usize {
        self.counts.len()
    }

    #[inline]
    pub fn count(&self, site: &Site) -> u64 {
        self.counts.get(site).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Site, &u64)> {
        self.counts.iter()
    }

    /// Entries sorted by site.
    pub fn sorted(&self) -> Vec<(Site, u64)> {
        let mut v: Vec<(Site, u64)> = self.counts.iter().map(|(s, c)| (*s, *c)).collect();
        v.sort_unstable();
        v
    }

    /// `I_n^[p] = sum_x N_n(x)^p`.
    pub fn self_intersection(&self, p: u32) -> Result<u128> {
        check_power(p, 1)?;
        let mut total: u128 = 0;
        for &c in self.counts.values() {
            total = total
                .checked_add(pow_checked(c, p)?)
                .ok_or_else(|| Error::Overflow("self-intersection exceeds u128".into()))?;
        }
        Ok(total)
    }

    /// Writes `x1,..,xd,count` rows sorted by site.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=self.dim).map(|j| format!("x{j}")).collect();
        header.push("count".into());
        w.write_record(&header)?;
        for (site, c) in self.sorted() {
            let mut rec: Vec<String> = site
                .coords(self.dim)
                .iter()
                .map(|x| x.to_string())
                .collect();
            rec.push(c.to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_power(p: u32, min: u32) -> Result<()> {
    if p < min || p > MAX_POWER {
        return Err(Error::usage(format!(
            "power {p} outside {min}..={MAX_POWER}"
        )));
    }
    Ok(())
}

fn pow_checked(c: u64, p: u32) -> Result<u128> {
    (c as u128)
        .checked_pow(p)
        .ok_or_else(|| Error::Overflow(format!("{c}^{p} exceeds u128")))
}

/// `Q_n^[p,q] = sum_x N1(x)^p N2(x)^q`, iterating the smaller table.
pub fn mutual_intersection(
    a: &OccupationTable,
    b: &OccupationTable,
    p: u32,
    q: u32,
) -> Result<u128> {
    if a.dim != b.dim {
        return Err(Error::usage(format!(
            "tables have dimensions {} and {}",
            a.dim, b.dim
        )));
    }
    check_power(p, 1)?;
    check_power(q, 1)?;
    let (small, large, ps, pl) = if a.counts.len() <= b.counts.len() {
        (a, b, p, q)
    } else {
        (b, a, q, p)
    };
    let mut total: u128 = 0;
    for (site, &cs) in &small.counts {
        let cl = large.count(site);
        if cl == 0 {
            continue;
        }
        let term = pow_checked(cs, ps)?
            .checked_mul(pow_checked(cl, pl)?)
            .ok_or_else(|| Error::Overflow("mutual intersection term exceeds u128".into()))?;
        total = total
            .checked_add(term)
            .ok_or_else(|| Error::Overflow("mutual intersection exceeds u128".into()))?;
    }
    Ok(total)
}

/// `sum_x prod_j N_j(x)` over any number of tables. For renewal replicas this is
/// the size of the intersection of their ranges.
pub fn multi_intersection(tables: &[&OccupationTable]) -> Result<u128> {
    let Some(first) = tables.iter().min_by_key(|t| t.counts.len()) else {
        return Ok(0);
    };
    if tables.iter().any(|t| t.dim != first.dim) {
        return Err(Error::usage("tables have different dimensions"));
    }
    let mut total: u128 = 0;
    'sites: for site in first.counts.keys() {
        let mut prod: u128 = 1;
        for t in tables {
            let c = t.count(site);
            if c == 0 {
                continue 'sites;
            }
            prod = prod
                .checked_mul(c as u128)
                .ok_or_else(|| Error::Overflow("product of local times exceeds u128".into()))?;
        }
        total += prod;
    }
    Ok(total)
}

/// `E N_n(i)` for a renewal law at sites `1..=len`, index 0 holding site 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedLocalTimeTable {
    pub horizon: u64,
    pub values: Vec<f64>,
}

impl ExpectedLocalTimeTable {
    #[inline]
    pub fn get(&self, site: i64) -> f64 {
        if site >= 1 && (site as usize) <= self.values.len() {
            self.values[site as usize - 1]
        } else {
            0.0
        }
    }

    pub fn max_site(&self) -> i64 {
        self.values.len() as i64
    }

    /// `sum_i (E N_n(i))^2`, the expected mutual intersection of two replicas.
    pub fn sum_of_squares(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Quenched mean `sum_i omega_i E N_n(i)` of the sum along the walk.
    pub fn quenched_mean(&self, field: &SiteField) -> f64 {
        let omega = field.window_1d(self.values.len());
        omega.iter().zip(&self.values).map(|(w, e)| w * e).sum()
    }
}

/// `J_n^[p] = sum_i (N_n(i) - E N_n(i))^p` over the union of both supports.
pub fn recentered_moment(
    tab: &OccupationTable,
    expected: &ExpectedLocalTimeTable,
    p: u32,
) -> Result<f64> {
    if tab.dim != 1 {
        return Err(Error::usage(
            "recentered moments are defined for one-dimensional renewal tables",
        ));
    }
    check_power(p, 1)?;
    for site in tab.counts.keys() {
        let i = site.0[0];
        if i < 1 || i > expected.max_site() {
            return Err(Error::Integrity(format!(
                "visited site {i} is not covered by the expected local-time table (1..={})",
                expected.max_site()
            )));
        }
    }
    let mut total = 0.0;
    for (k, e) in expected.values.iter().enumerate() {
        let n = tab.count(&Site::on_axis(0, k as i64 + 1)) as f64;
        total += (n - e).powi(p as i32);
    }
    Ok(total)
}

/// `Z_n = sum_x omega_x N_n(x)`.
pub fn rwrs_sum(tab: &OccupationTable, field: &SiteField) -> Result<f64> {
    if tab.dim != field.dim {
        return Err(Error::usage(format!(
            "table dimension {} differs from field dimension {}",
            tab.dim, field.dim
        )));
    }
    Ok(tab
        .sorted()
        .iter()
        .map(|(s, c)| field.value(s) * *c as f64)
        .sum())
}

/// `Z_n = sum_k omega_{S_k}` evaluated along the path.
pub fn rwrs_sum_streaming<I: IntoIterator<Item = Site>>(positions: I, field: &SiteField) -> f64 {
    positions.into_iter().map(|s| field.value(&s)).sum()
}

/// `Z_[n t]` for each `t` of a sorted grid in (0, 1], in one pass.
pub fn rwrs_partial_sums(path: &Path, field: &SiteField, grid: &[f64]) -> Result<Vec<f64>> {
    if path.dim != field.dim {
        return Err(Error::usage("path and field dimensions differ"));
    }
    let marks = grid_marks(path.horizon() as u64, grid)?;
    Ok(partial_sums_at(
        path.positions.iter().copied(),
        field,
        &marks,
    ))
}

/// Prefix lengths `[n t]` for a sorted grid in (0, 1].
pub fn grid_marks(n: u64, grid: &[f64]) -> Result<Vec<u64>> {
    if grid.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
        return Err(Error::usage("time grid values must lie in (0, 1]"));
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::usage("time grid must be sorted"));
    }
    Ok(grid.iter().map(|t| (n as f64 * t).floor() as u64).collect())
}

/// Partial sums at the given non-decreasing prefix lengths.
pub fn partial_sums_at<I: IntoIterator<Item = Site>>(
    positions: I,
    field: &SiteField,
    marks: &[u64],
) -> Vec<f64> {
    let mut out = Vec::with_capacity(marks.len());
    let mut next = 0;
    let mut z = 0.0;
    while next < marks.len() && marks[next] == 0 {
        out.push(0.0);
        next += 1;
    }
    let last = marks.last().copied().unwrap_or(0);
    for (k, s) in positions.into_iter().enumerate() {
        if next == marks.len() || k as u64 >= last {
            break;
        }
        z += field.value(&s);
        while next < marks.len() && marks[next] == k as u64 + 1 {
            out.push(z);
            next += 1;
        }
    }
    out
}

/// Mutual intersection of two replicas tracked step by step, so that
/// `Q_k` is available at every prefix horizon `k`.
#[derive(Clone, Debug, Default)]
pub struct PairIntersectionTracker {
    first: FxHashMap<Site, u64>,
    second: FxHashMap<Site, u64>,
    q: u128,
    steps: u64,
}

impl PairIntersectionTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Advances both replicas by one step to positions `x` and `y`.
    #[inline]
    pub fn step(&mut self, x: Site, y: Site) {
        let bx = self.second.get(&x).copied().unwrap_or(0);
        let ay = self.first.get(&y).copied().unwrap_or(0);
        self.q += (bx + ay + u64::from(x == y)) as u128;
        *self.first.entry(x).or_insert(0) += 1;
        *self.second.entry(y).or_insert(0) += 1;
        self.steps += 1;
    }

    pub fn q(&self) -> u128 {
        self.q
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }
}

/// Intersection functionals of one replica pair at one horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectionSummary {
    pub n: u64,
    /// `p -> I_n^[p]` of the first replica.
    pub self_intersections: BTreeMap<String, u128>,
    /// `p -> J_n^[p]`, present when an expected local-time table is given.
    pub recentered: BTreeMap<String, f64>,
    /// `"p,q" -> Q_n^[p,q]`.
    pub mutual: BTreeMap<String, u128>,
    /// Size of the range intersection (renewal replicas only).
    pub range_intersection: Option<u128>,
}

impl IntersectionSummary {
    pub fn compute(
        first: &OccupationTable,
        second: &OccupationTable,
        expected: Option<&ExpectedLocalTimeTable>,
        powers: &[u32],
        pairs: &[(u32, u32)],
        renewal: bool,
    ) -> Result<Self> {
        let mut self_intersections = BTreeMap::new();
        let mut recentered = BTreeMap::new();
        for &p in powers {
            self_intersections.insert(p.to_string(), first.self_intersection(p)?);
            if let Some(e) = expected {
                recentered.insert(p.to_string(), recentered_moment(first, e, p)?);
            }
        }
        let mut mutual = BTreeMap::new();
        for &(p, q) in pairs {
            mutual.insert(
                format!("{p},{q}"),
                mutual_intersection(first, second, p, q)?,
            );
        }
        Ok(IntersectionSummary {
            n: first.horizon(),
            self_intersections,
            recentered,
            mutual,
            range_intersection: if renewal {
                Some(multi_intersection(&[first, second])?)
            } else {
                None
            },
        })
    }
}
