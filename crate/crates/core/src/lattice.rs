//! Integer lattice geometry over `[q]^d`.
//!
//! Points of the averaged sets `Z_{m,q,d}` are stored scaled by `m`, so every
//! computation here is exact integer or rational arithmetic.

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{param, Cap, Error, Result};

pub type Rational = Ratio<i64>;

/// A point of `[q]^d`, or of `Z_{m,q,d}` scaled by `m` (coordinates in `[m, mq]`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    coords: Vec<i64>,
    q: u32,
    scale: u32,
}

impl LatticePoint {
    pub fn new(q: u32, coords: Vec<i64>) -> Result<Self> {
        Self::scaled(q, 1, coords)
    }

    /// A point of `Z_{2,q,d}` given by its doubled coordinates.
    pub fn doubled(q: u32, coords: Vec<i64>) -> Result<Self> {
        Self::scaled(q, 2, coords)
    }

    pub fn scaled(q: u32, scale: u32, coords: Vec<i64>) -> Result<Self> {
        if q < 1 || scale < 1 {
            return param(format!("q={q} and scale={scale} must be positive"));
        }
        let (lo, hi) = (scale as i64, scale as i64 * q as i64);
        if let Some(c) = coords.iter().find(|&&c| c < lo || c > hi) {
            return param(format!("coordinate {c} outside [{lo}, {hi}]"));
        }
        Ok(LatticePoint { coords, q, scale })
    }

    /// Inverse of [`LatticePoint::index`].
    pub fn from_index(q: u32, d: usize, scale: u32, index: usize) -> Result<Self> {
        let base = radix(q, scale);
        let size = (base as u128).pow(d as u32);
        if index as u128 >= size {
            return param(format!("index {index} outside a set of {size} points"));
        }
        let mut rem = index as u64;
        let coords = (0..d)
            .map(|_| {
                let digit = rem % base;
                rem /= base;
                digit as i64 + scale as i64
            })
            .collect();
        Ok(LatticePoint { coords, q, scale })
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn d(&self) -> usize {
        self.coords.len()
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn is_doubled(&self) -> bool {
        self.scale == 2
    }

    /// Canonical index: little-endian mixed radix of `coords - scale` in base
    /// `scale*(q-1)+1`.
    pub fn index(&self) -> usize {
        let base = radix(self.q, self.scale) as usize;
        self.coords
            .iter()
            .rev()
            .fold(0usize, |acc, &c| acc * base + (c - self.scale as i64) as usize)
    }
}

fn radix(q: u32, scale: u32) -> u64 {
    scale as u64 * (q as u64 - 1) + 1
}

/// Squared Euclidean norm of an integer vector.
pub fn sq_norm(v: impl IntoIterator<Item = i64>) -> i64 {
    v.into_iter().map(|c| c * c).sum()
}

/// `Σ (x_i - y_i)^2`, in the points' shared scaled units.
pub fn sq_dist(x: &LatticePoint, y: &LatticePoint) -> Result<i64> {
    if x.q != y.q || x.d() != y.d() || x.scale != y.scale {
        return param(format!(
            "mismatched points: (q={}, d={}, scale={}) vs (q={}, d={}, scale={})",
            x.q,
            x.d(),
            x.scale,
            y.q,
            y.d(),
            y.scale
        ));
    }
    Ok(sq_norm(x.coords.iter().zip(&y.coords).map(|(a, b)| a - b)))
}

/// Exact mean of `||x-y||^2` over ordered pairs of `[q]^d`: `d(q^2-1)/6`.
pub fn mean_sq_dist(q: u32, d: u32) -> Result<Rational> {
    if q < 2 || d < 1 {
        return param(format!("mean squared distance needs q>=2, d>=1 (got q={q}, d={d})"));
    }
    let q = q as i64;
    Ok(Rational::new(d as i64 * (q * q - 1), 6))
}

/// A partition of `[0, dq^2]` into half-open intervals of length `r^2`,
/// translated so the mean squared distance sits at the center of its interval.
/// The two end intervals are clipped to the range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalPartition {
    q: u32,
    d: u32,
    length: i64,
    range_max: i64,
    mu: Rational,
    origin: Rational,
    count: usize,
}

impl IntervalPartition {
    pub fn new(q: u32, d: u32, r_sq: u64) -> Result<Self> {
        let mu = mean_sq_dist(q, d)?;
        let range_max = d as i64 * q as i64 * q as i64;
        if r_sq < 1 || r_sq as i64 > range_max {
            return param(format!("interval length r^2={r_sq} must lie in [1, dq^2={range_max}]"));
        }
        let length = r_sq as i64;
        let len = Rational::from_integer(length);
        let centered = mu - len / 2;
        // Largest boundary of the form centered + j*len that is <= 0.
        let shift = (-centered / len).floor();
        let origin = centered + shift * len;
        let mut p = IntervalPartition {
            q,
            d,
            length,
            range_max,
            mu,
            origin,
            count: 0,
        };
        p.count = p.raw_index(Rational::from_integer(range_max)) + 1;
        Ok(p)
    }

    fn raw_index(&self, v: Rational) -> usize {
        ((v - self.origin) / self.length).floor().to_integer() as usize
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// `r^2`.
    pub fn length(&self) -> i64 {
        self.length
    }

    pub fn range_max(&self) -> i64 {
        self.range_max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mu(&self) -> Rational {
        self.mu
    }

    /// Index of the interval containing `v`; `v` must lie in `[0, dq^2]`.
    pub fn interval_index(&self, v: Rational) -> Result<usize> {
        if v < Rational::from_integer(0) || v > Rational::from_integer(self.range_max) {
            return Err(Error::Parameter(format!(
                "value {v} outside [0, {}]",
                self.range_max
            )));
        }
        Ok(self.raw_index(v))
    }

    /// Integer lookup that returns `None` outside the range instead of failing.
    pub fn try_index(&self, v: i64) -> Option<usize> {
        (0..=self.range_max)
            .contains(&v)
            .then(|| self.raw_index(Rational::from_integer(v)))
    }

    pub fn mu_index(&self) -> usize {
        self.raw_index(self.mu)
    }

    /// Unclipped `[lo, hi)` of interval `i`.
    pub fn unclipped_bounds(&self, i: usize) -> (Rational, Rational) {
        let lo = self.origin + Rational::from_integer(i as i64 * self.length);
        (lo, lo + self.length)
    }

    /// Bounds of interval `i` after clipping to `[0, dq^2]`. The last
    /// interval is closed on the right at `dq^2`.
    pub fn bounds(&self, i: usize) -> (Rational, Rational) {
        let (lo, hi) = self.unclipped_bounds(i);
        let zero = Rational::from_integer(0);
        let max = Rational::from_integer(self.range_max);
        (lo.max(zero), hi.min(max))
    }
}

/// A proper coloring of the graph on `[q]^d` joining distinct points at squared
/// distance at most `threshold`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    q: u32,
    d: usize,
    threshold: i64,
    colors: Vec<u32>,
    color_count: u32,
}

impl Coloring {
    pub fn threshold(&self) -> i64 {
        self.threshold
    }

    pub fn color_count(&self) -> u32 {
        self.color_count
    }

    /// Color of the point with canonical index `i`.
    pub fn color(&self, i: usize) -> u32 {
        self.colors[i]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    /// Pairs of points at squared distance `<= threshold` sharing a color.
    pub fn conflicts(&self) -> Vec<(usize, usize)> {
        let pts = all_points(self.q, self.d);
        let mut out = Vec::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if self.colors[i] == self.colors[j] && dist(&pts[i], &pts[j]) <= self.threshold {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_proper(&self) -> bool {
        self.conflicts().is_empty()
    }

    /// Recolors every `b` vertex as `a`. Produces an improper coloring on
    /// purpose; used for fault injection.
    pub fn merge_colors(&self, a: u32, b: u32) -> Coloring {
        let mut c = self.clone();
        for col in &mut c.colors {
            if *col == b {
                *col = a;
            }
        }
        c
    }
}

fn all_points(q: u32, d: usize) -> Vec<Vec<i64>> {
    let n = (q as usize).pow(d as u32);
    (0..n)
        .map(|i| {
            LatticePoint::from_index(q, d, 1, i)
                .expect("index in range")
                .coords
        })
        .collect()
}

fn dist(a: &[i64], b: &[i64]) -> i64 {
    sq_norm(a.iter().zip(b).map(|(x, y)| x - y))
}

fn guard_points(q: u32, d: u32, cap: Cap) -> Result<()> {
    if q < 1 || d < 1 {
        return param(format!("need q>=1 and d>=1 (got q={q}, d={d})"));
    }
    cap.check((q as u128).pow(d))
}

/// Vertex degrees of the squared-distance graph with the given threshold,
/// indexed canonically.
pub fn degrees(q: u32, d: u32, threshold: i64, cap: Cap) -> Result<Vec<usize>> {
    guard_points(q, d, cap)?;
    let pts = all_points(q, d as usize);
    Ok(crate::par::map_range(pts.len(), |i| {
        pts.iter()
            .enumerate()
            .filter(|&(j, p)| j != i && dist(&pts[i], p) <= threshold)
            .count()
    }))
}

/// Greedy coloring in lexicographic order of coordinates (first coordinate
/// most significant), each vertex taking the smallest color not used by an
/// already-colored neighbor.
pub fn greedy_coloring(q: u32, d: u32, threshold: i64, cap: Cap) -> Result<Coloring> {
    guard_points(q, d, cap)?;
    let d = d as usize;
    let pts = all_points(q, d);
    let n = pts.len();
    let lex_to_canonical = |rank: usize| -> usize {
        // Big-endian digits of `rank` are the little-endian digits of the
        // canonical index read backwards.
        let mut rem = rank;
        let mut digits = vec![0usize; d];
        for slot in digits.iter_mut().rev() {
            *slot = rem % q as usize;
            rem /= q as usize;
        }
        digits
            .iter()
            .rev()
            .fold(0usize, |acc, &dg| acc * q as usize + dg)
    };
    let mut colors: Vec<Option<u32>> = vec![None; n];
    let mut used = Vec::new();
    for rank in 0..n {
        let v = lex_to_canonical(rank);
        used.clear();
        for (w, c) in colors.iter().enumerate() {
            if let Some(c) = c {
                if dist(&pts[v], &pts[w]) <= threshold {
                    used.push(*c);
                }
            }
        }
        used.sort_unstable();
        used.dedup();
        let free = used
            .iter()
            .enumerate()
            .find(|&(i, &c)| c != i as u32)
            .map_or(used.len() as u32, |(i, _)| i as u32);
        colors[v] = Some(free);
    }
    let colors: Vec<u32> = colors.into_iter().map(|c| c.expect("all colored")).collect();
    let color_count = colors.iter().max().map_or(0, |&m| m + 1);
    Ok(Coloring {
        q,
        d,
        threshold,
        colors,
        color_count,
    })
}

/// `π^{d/2} (r+1/2)^d / (d/2)!`, an upper bound on the integer points in a
/// `d`-ball of radius `r` (`d` even).
pub fn ball_point_bound(d: u32, r: f64) -> Result<f64> {
    if d == 0 || d.is_odd() {
        return param(format!("ball bound needs a positive even dimension, got {d}"));
    }
    if r.is_nan() || r < 0.0 {
        return param(format!("radius must be non-negative, got {r}"));
    }
    let half = d / 2;
    let factorial: f64 = (1..=half).map(f64::from).product();
    Ok(std::f64::consts::PI.powi(half as i32) * (r + 0.5).powi(d as i32) / factorial)
}
