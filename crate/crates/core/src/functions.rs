//! Weak sub-permutations defined by linear equations over `[q]^d`, and
//! exhaustive line checks for arbitrary 0/1 functions on product domains.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{param, Cap, Error, Result};
use crate::lattice::LatticePoint;
use crate::par;

/// A 0/1 function on `[dims[0]] × … × [dims[k-1]]` (0-based indices).
pub trait BoolFunction: Sync {
    fn dims(&self) -> &[usize];

    /// Unchecked evaluation; `x` must lie in the domain.
    fn eval(&self, x: &[usize]) -> bool;

    fn arity(&self) -> usize {
        self.dims().len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `f_{q,d}` on `([q]^d)^3`: `x + y = 2z`.
    Cube,
    /// `g_{q,d}` on `([q]^d)^2 × Z_{2,q,d}`: `x + y = 2z`.
    Midpoint,
    /// `g_{k,q,d}` on `([q]^d)^{k-1} × Z_{k-1,q,d}`: `x_1 + … + x_{k-1} = (k-1) x_k`.
    KMidpoint,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Cube => "cube",
            Family::Midpoint => "midpoint",
            Family::KMidpoint => "k-midpoint",
        })
    }
}

/// One of the three lattice families, with coordinate tables for both sides
/// of the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSpec {
    family: Family,
    q: u32,
    d: u32,
    k: usize,
    dims: Vec<usize>,
    /// Scale of the last coordinate's points (1 for the cube family).
    last_scale: u32,
    a_coords: Vec<i64>,
    last_coords: Vec<i64>,
}

impl FunctionSpec {
    pub fn cube(q: u32, d: u32) -> Result<Self> {
        Self::build(Family::Cube, 3, q, d, 1)
    }

    pub fn midpoint(q: u32, d: u32) -> Result<Self> {
        Self::build(Family::Midpoint, 3, q, d, 2)
    }

    pub fn k_midpoint(k: usize, q: u32, d: u32) -> Result<Self> {
        if k < 3 {
            return param(format!("k-midpoint family needs k>=3, got {k}"));
        }
        Self::build(Family::KMidpoint, k, q, d, (k - 1) as u32)
    }

    fn build(family: Family, k: usize, q: u32, d: u32, last_scale: u32) -> Result<Self> {
        if q < 2 || d < 1 {
            return param(format!("need q>=2 and d>=1 (got q={q}, d={d})"));
        }
        let n = checked_pow(q as u128, d)?;
        let big_n = checked_pow(last_scale as u128 * (q as u128 - 1) + 1, d)?;
        // Coordinate tables are materialised, so both sides must be small.
        Cap::DEFAULT.check(n * d as u128)?;
        Cap::DEFAULT.check(big_n * d as u128)?;
        let (n, big_n) = (n as usize, big_n as usize);
        let table = |size: usize, scale: u32| -> Vec<i64> {
            (0..size)
                .flat_map(|i| {
                    LatticePoint::from_index(q, d as usize, scale, i)
                        .expect("index in range")
                        .coords()
                        .to_vec()
                })
                .collect()
        };
        let mut dims = vec![n; k - 1];
        dims.push(big_n);
        Ok(FunctionSpec {
            family,
            q,
            d,
            k,
            dims,
            last_scale,
            a_coords: table(n, 1),
            last_coords: table(big_n, last_scale),
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `n = q^d`, the size of each of the first `k-1` coordinates.
    pub fn n(&self) -> usize {
        self.dims[0]
    }

    /// Size of the last coordinate.
    pub fn big_n(&self) -> usize {
        self.dims[self.k - 1]
    }

    /// Points of the last coordinate are stored scaled by this factor.
    pub fn last_scale(&self) -> u32 {
        self.last_scale
    }

    /// Coordinates of the `i`-th point of `[q]^d`.
    pub fn a_coords(&self, i: usize) -> &[i64] {
        let d = self.d as usize;
        &self.a_coords[i * d..(i + 1) * d]
    }

    /// Scaled coordinates of the `j`-th point of the last coordinate.
    pub fn last_coords(&self, j: usize) -> &[i64] {
        let d = self.d as usize;
        &self.last_coords[j * d..(j + 1) * d]
    }

    pub fn a_point(&self, i: usize) -> LatticePoint {
        LatticePoint::new(self.q, self.a_coords(i).to_vec()).expect("table entry in range")
    }

    pub fn last_point(&self, j: usize) -> LatticePoint {
        LatticePoint::scaled(self.q, self.last_scale, self.last_coords(j).to_vec())
            .expect("table entry in range")
    }

    /// Checked evaluation.
    pub fn evaluate(&self, x: &[usize]) -> Result<bool> {
        check_in_domain(&self.dims, x)?;
        Ok(self.eval(x))
    }
}

fn checked_pow(base: u128, exp: u32) -> Result<u128> {
    base.checked_pow(exp)
        .ok_or_else(|| Error::Parameter(format!("{base}^{exp} overflows")))
}

pub(crate) fn check_in_domain(dims: &[usize], x: &[usize]) -> Result<()> {
    if x.len() != dims.len() {
        return param(format!("expected {} coordinates, got {}", dims.len(), x.len()));
    }
    if let Some((i, (&v, &n))) = x.iter().zip(dims).enumerate().find(|(_, (&v, &n))| v >= n) {
        return param(format!("coordinate {i} = {v} outside [0, {n})"));
    }
    Ok(())
}

impl BoolFunction for FunctionSpec {
    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn eval(&self, x: &[usize]) -> bool {
        let d = self.d as usize;
        let m = (self.k - 1) as i64;
        let last = self.last_coords(x[self.k - 1]);
        let (lhs_scale, rhs_scale) = match self.family {
            // x + y = 2z with z plain
            Family::Cube => (1, 2),
            // sum of k-1 points equals (k-1) * z, z stored scaled by k-1
            Family::Midpoint | Family::KMidpoint => (1, 1),
        };
        debug_assert!(self.family == Family::Cube || m == self.last_scale as i64);
        (0..d).all(|c| {
            let s: i64 = x[..self.k - 1].iter().map(|&i| self.a_coords(i)[c]).sum();
            s * lhs_scale == last[c] * rhs_scale
        })
    }
}

/// `Z_{m,q,d}` scaled by `m`, in canonical index order.
pub fn enumerate_z(m: u32, q: u32, d: u32, cap: Cap) -> Result<Vec<LatticePoint>> {
    if m < 2 || q < 2 || d < 1 {
        return param(format!("need m>=2, q>=2, d>=1 (got m={m}, q={q}, d={d})"));
    }
    cap.check(checked_pow(m as u128 * q as u128, d)?)?;
    // Each coordinate of a sum of m points of [q] takes every value in
    // [m, mq], so the scaled set is the full box.
    let size = (m as usize * (q as usize - 1) + 1).pow(d);
    (0..size)
        .map(|j| LatticePoint::from_index(q, d as usize, m, j))
        .collect()
}

/// All 1-entries of `f`, in canonical order.
pub fn ones<F: BoolFunction + ?Sized>(f: &F, cap: Cap) -> Result<Vec<Vec<usize>>> {
    cap.check(par::domain_size(f.dims()))?;
    Ok(par::sweep(f.dims(), |x| f.eval(x).then(|| x.to_vec())))
}

pub fn ones_count<F: BoolFunction + ?Sized>(f: &F, cap: Cap) -> Result<u64> {
    cap.check(par::domain_size(f.dims()))?;
    Ok(par::sweep_count(f.dims(), |x| f.eval(x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LineMode {
    /// Every line holds at most one 1.
    Weak,
    /// Additionally every line in the last dimension holds exactly one 1.
    Sub,
}

/// A line: every coordinate fixed except `free`, which is `None` in `fixed`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LineViolation {
    pub fixed: Vec<Option<usize>>,
    pub ones: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineReport {
    pub dimension: usize,
    /// First violations in canonical order (at most [`MAX_REPORTED`]).
    pub violations: Vec<LineViolation>,
    pub violation_count: usize,
    pub passed: bool,
}

pub const MAX_REPORTED: usize = 32;

/// One report per dimension.
pub fn check_lines<F: BoolFunction + ?Sized>(
    f: &F,
    mode: LineMode,
    cap: Cap,
) -> Result<Vec<LineReport>> {
    let dims = f.dims();
    let k = dims.len();
    let one_entries = ones(f, cap)?;
    let reports = par::map_range(k, |dim| {
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        for x in &one_entries {
            let mut key = x.clone();
            key.remove(dim);
            *counts.entry(key).or_default() += 1;
        }
        let line = |key: &[usize]| -> Vec<Option<usize>> {
            let mut fixed: Vec<Option<usize>> = key.iter().copied().map(Some).collect();
            fixed.insert(dim, None);
            fixed
        };
        let mut bad: BTreeMap<Vec<usize>, usize> = counts
            .iter()
            .filter(|(_, &c)| c > 1)
            .map(|(key, &c)| (key.clone(), c))
            .collect();
        if mode == LineMode::Sub && dim == k - 1 {
            let mut rest = dims.to_vec();
            rest.remove(dim);
            for key in par::sweep(&rest, |key| (!counts.contains_key(key)).then(|| key.to_vec())) {
                bad.insert(key, 0);
            }
        }
        let violation_count = bad.len();
        let violations = bad
            .iter()
            .take(MAX_REPORTED)
            .map(|(key, &ones)| LineViolation {
                fixed: line(key),
                ones,
            })
            .collect();
        LineReport {
            dimension: dim,
            violations,
            violation_count,
            passed: violation_count == 0,
        }
    });
    Ok(reports)
}

pub fn all_passed(reports: &[LineReport]) -> bool {
    reports.iter().all(|r| r.passed)
}
