use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{Board, Protocol, View};
use crate::bits::{width_for, Bits};
use crate::error::{param, Cap, Error, Result};
use crate::functions::{Family, FunctionSpec};
use crate::lattice::{greedy_coloring, sq_norm, Coloring, IntervalPartition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Simple,
    Interval,
    KPlayer,
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProtocolKind::Simple => "simple",
            ProtocolKind::Interval => "interval",
            ProtocolKind::KPlayer => "kplayer",
        })
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(ProtocolKind::Simple),
            "interval" => Ok(ProtocolKind::Interval),
            "kplayer" => Ok(ProtocolKind::KPlayer),
            other => param(format!("unknown protocol {other:?}")),
        }
    }
}

/// Coordinates of the last input as a doubled point (`2z`) for the
/// three-player families.
fn doubled_last_table(f: &FunctionSpec) -> Vec<i64> {
    let factor = 2 / f.last_scale() as i64;
    (0..f.big_n())
        .flat_map(|j| f.last_coords(j).iter().map(move |&c| c * factor))
        .collect()
}

fn require_three_player(f: &FunctionSpec, what: &str) -> Result<()> {
    match f.family() {
        Family::Cube | Family::Midpoint => Ok(()),
        Family::KMidpoint if f.k() == 3 => Ok(()),
        other => param(format!("the {what} protocol needs a three-player family, got {other} with k={}", f.k())),
    }
}

/// `‖2a − w‖²` for a plain point `a` and a doubled point `w`: four times the
/// squared distance from `a` to `w/2`.
fn four_sq_dist(a: &[i64], w: &[i64]) -> i64 {
    sq_norm(a.iter().zip(w).map(|(x, z)| 2 * x - z))
}

/// Send `‖x−y‖²`; the other two players each check one side of the midpoint.
#[derive(Debug, Clone)]
pub struct SimpleProtocol {
    f: FunctionSpec,
    z2: Vec<i64>,
    dist_width: u32,
}

impl SimpleProtocol {
    pub fn new(f: &FunctionSpec) -> Result<Self> {
        require_three_player(f, "simple")?;
        let q = f.q() as u64;
        let max = f.d() as u64 * (q - 1) * (q - 1);
        Ok(SimpleProtocol {
            f: f.clone(),
            z2: doubled_last_table(f),
            dist_width: width_for(max + 1),
        })
    }

    fn z2(&self, j: usize) -> &[i64] {
        let d = self.f.d() as usize;
        &self.z2[j * d..(j + 1) * d]
    }

    /// Width of the last player's message.
    pub fn last_width(&self) -> u32 {
        self.dist_width
    }
}

impl Protocol for SimpleProtocol {
    fn players(&self) -> usize {
        3
    }

    fn last_message(&self, view: &View<'_>) -> (u64, u32) {
        let (x, y) = (self.f.a_coords(view.get(0)), self.f.a_coords(view.get(1)));
        let dist = sq_norm(x.iter().zip(y).map(|(a, b)| a - b));
        (dist as u64, self.dist_width)
    }

    fn next_speaker(&self, board: &Board) -> Option<usize> {
        match board.len() {
            1 => Some(1),
            2 => Some(0),
            _ => None,
        }
    }

    fn message_width(&self, _: &Board) -> u32 {
        1
    }

    fn speak(&self, player: usize, view: &View<'_>, board: &Board) -> u64 {
        // The y-player checks against x, the x-player against y.
        let other = self.f.a_coords(view.get(1 - player));
        let z = self.z2(view.get(2));
        (board[0].value as i64 == four_sq_dist(other, z)) as u64
    }

    fn output(&self, board: &Board) -> bool {
        board.len() == 3 && board[1].value == 1 && board[2].value == 1
    }
}

/// Shared machinery of the interval protocol: the partition `I_r`, the
/// coloring, and the balls used to decode a color.
#[derive(Debug, Clone)]
struct IntervalCore {
    q: u32,
    d: usize,
    a: Vec<i64>,
    partition: IntervalPartition,
    coloring: Coloring,
    balls: Vec<Vec<usize>>,
    index_width: u32,
    color_width: u32,
}

impl IntervalCore {
    fn new(f: &FunctionSpec, r_sq: u64, coloring: Coloring) -> Result<Self> {
        let partition = IntervalPartition::new(f.q(), f.d(), r_sq)?;
        let n = f.n();
        let a: Vec<i64> = (0..n).flat_map(|i| f.a_coords(i).to_vec()).collect();
        if coloring.colors().len() != n {
            return param(format!(
                "coloring covers {} points, expected {n}",
                coloring.colors().len()
            ));
        }
        let d = f.d() as usize;
        let balls = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| {
                        let (x, u) = (&a[i * d..(i + 1) * d], &a[j * d..(j + 1) * d]);
                        sq_norm(x.iter().zip(u).map(|(s, t)| s - t)) <= r_sq as i64
                    })
                    .collect()
            })
            .collect();
        Ok(IntervalCore {
            q: f.q(),
            d,
            index_width: width_for(partition.count() as u64),
            // one extra symbol: the reflected point left the cube
            color_width: width_for(coloring.color_count() as u64 + 1),
            a,
            partition,
            coloring,
            balls,
        })
    }

    fn point(&self, i: usize) -> &[i64] {
        &self.a[i * self.d..(i + 1) * self.d]
    }

    fn distance_index(&self, x: usize, y: usize) -> u64 {
        let s = sq_norm(self.point(x).iter().zip(self.point(y)).map(|(a, b)| a - b));
        self.partition.try_index(s).expect("distance within [0, dq^2]") as u64
    }

    /// Steps 2 and 3: does `4‖a − w/2‖²` fall in interval `index`?
    fn same_interval(&self, a: usize, w: &[i64], index: u64) -> bool {
        self.partition.try_index(four_sq_dist(self.point(a), w)) == Some(index as usize)
    }

    fn reserved_color(&self) -> u64 {
        self.coloring.color_count() as u64
    }

    /// Step 5: color of `w − y`, or the reserved symbol when it leaves `[q]^d`.
    fn reflected_color(&self, y: usize, w: &[i64]) -> u64 {
        let q = self.q as i64;
        let mut idx = 0usize;
        for (&wc, &yc) in w.iter().zip(self.point(y)).rev() {
            let v = wc - yc;
            if !(1..=q).contains(&v) {
                return self.reserved_color();
            }
            idx = idx * q as usize + (v - 1) as usize;
        }
        self.coloring.color(idx) as u64
    }

    /// Step 6: recover `y` from the color and evaluate `x + y = w`.
    fn decode(&self, x: usize, w: &[i64], color: u64) -> bool {
        if color == self.reserved_color() {
            return false;
        }
        let Some(&u) = self.balls[x]
            .iter()
            .find(|&&u| self.coloring.color(u) as u64 == color)
        else {
            return false;
        };
        let (xp, up) = (self.point(x), self.point(u));
        // y = w − u
        xp.iter().zip(w).zip(up).all(|((&xc, &wc), &uc)| xc + (wc - uc) == wc)
    }

    fn cost(&self) -> u32 {
        3 + self.color_width
    }
}

/// Interval-index of `‖x−y‖²`, two interval checks, then a color that pins
/// down `2z − y` inside a small ball around `x`.
#[derive(Debug, Clone)]
pub struct IntervalProtocol {
    core: IntervalCore,
    z2: Vec<i64>,
}

impl IntervalProtocol {
    pub fn new(f: &FunctionSpec, r_sq: u64, cap: Cap) -> Result<Self> {
        let coloring = greedy_coloring(f.q(), f.d(), 4 * r_sq as i64, cap)?;
        Self::with_coloring(f, r_sq, coloring)
    }

    /// Uses `coloring` as given, proper or not.
    pub fn with_coloring(f: &FunctionSpec, r_sq: u64, coloring: Coloring) -> Result<Self> {
        require_three_player(f, "interval")?;
        Ok(IntervalProtocol {
            core: IntervalCore::new(f, r_sq, coloring)?,
            z2: doubled_last_table(f),
        })
    }

    fn z2(&self, j: usize) -> &[i64] {
        &self.z2[j * self.core.d..(j + 1) * self.core.d]
    }
}

impl Protocol for IntervalProtocol {
    fn players(&self) -> usize {
        3
    }

    fn last_message(&self, view: &View<'_>) -> (u64, u32) {
        (self.core.distance_index(view.get(0), view.get(1)), self.core.index_width)
    }

    fn next_speaker(&self, board: &Board) -> Option<usize> {
        match board.len() {
            1 => Some(1),
            2 => Some(0),
            3 if board[1].value == 1 && board[2].value == 1 => Some(0),
            4 => Some(1),
            _ => None,
        }
    }

    fn message_width(&self, board: &Board) -> u32 {
        if board.len() == 3 {
            self.core.color_width
        } else {
            1
        }
    }

    fn speak(&self, player: usize, view: &View<'_>, board: &Board) -> u64 {
        let w = self.z2(view.get(2));
        match (board.len(), player) {
            (1, 1) => self.core.same_interval(view.get(0), w, board[0].value) as u64,
            (2, 0) => self.core.same_interval(view.get(1), w, board[0].value) as u64,
            (3, 0) => self.core.reflected_color(view.get(1), w),
            (4, 1) => self.core.decode(view.get(0), w, board[3].value) as u64,
            other => unreachable!("no step {other:?}"),
        }
    }

    fn output(&self, board: &Board) -> bool {
        board.len() == 5 && board[4].value == 1
    }
}

/// Reduction of `g_{k,q,d}` to the interval protocol on
/// `(x_1, x_2, ((k-1)x_k − x_3 − … − x_{k-1})/2)`.
#[derive(Debug, Clone)]
pub struct KPlayerProtocol {
    f: FunctionSpec,
    core: IntervalCore,
    symmetrize: bool,
}

impl KPlayerProtocol {
    pub fn new(f: &FunctionSpec, r_sq: u64, symmetrize: bool, cap: Cap) -> Result<Self> {
        let coloring = greedy_coloring(f.q(), f.d(), 4 * r_sq as i64, cap)?;
        Self::with_coloring(f, r_sq, symmetrize, coloring)
    }

    pub fn with_coloring(
        f: &FunctionSpec,
        r_sq: u64,
        symmetrize: bool,
        coloring: Coloring,
    ) -> Result<Self> {
        if f.family() != Family::KMidpoint || f.k() < 4 {
            return param(format!(
                "the k-player protocol needs the k-midpoint family with k>3, got {} with k={}",
                f.family(),
                f.k()
            ));
        }
        Ok(KPlayerProtocol {
            core: IntervalCore::new(f, r_sq, coloring)?,
            f: f.clone(),
            symmetrize,
        })
    }

    /// Doubled `z' = ((k-1)x_k − x_3 − … − x_{k-1})/2`, computable by
    /// players 1 and 2.
    fn reduced(&self, view: &View<'_>) -> Vec<i64> {
        let k = self.f.k();
        let mut w = self.f.last_coords(view.get(k - 1)).to_vec();
        for i in 2..k - 1 {
            for (wc, &xc) in w.iter_mut().zip(self.f.a_coords(view.get(i))) {
                *wc -= xc;
            }
        }
        w
    }

    fn in_doubled_box(&self, w: &[i64]) -> bool {
        let q = self.f.q() as i64;
        w.iter().all(|&c| (2..=2 * q).contains(&c))
    }

    /// Strips the symmetrization bit off the last player's message.
    fn interval_part(&self, board: &Board) -> u64 {
        if self.symmetrize {
            board[0].value >> 1
        } else {
            board[0].value
        }
    }
}

impl Protocol for KPlayerProtocol {
    fn players(&self) -> usize {
        self.f.k()
    }

    fn last_message(&self, view: &View<'_>) -> (u64, u32) {
        let idx = self.core.distance_index(view.get(0), view.get(1));
        if !self.symmetrize {
            return (idx, self.core.index_width);
        }
        let k = self.f.k();
        let mu = self.core.partition.mu_index() as u64;
        let all_near_mean = (0..k - 1).all(|i| {
            (i + 1..k - 1).all(|j| self.core.distance_index(view.get(i), view.get(j)) == mu)
        });
        ((idx << 1) | all_near_mean as u64, self.core.index_width + 1)
    }

    fn next_speaker(&self, board: &Board) -> Option<usize> {
        match board.len() {
            1 => Some(0),
            2 if board[1].value == 1 => Some(1),
            3 => Some(0),
            4 if board[2].value == 1 && board[3].value == 1 => Some(0),
            5 => Some(1),
            _ => None,
        }
    }

    fn message_width(&self, board: &Board) -> u32 {
        if board.len() == 4 {
            self.core.color_width
        } else {
            1
        }
    }

    fn speak(&self, player: usize, view: &View<'_>, board: &Board) -> u64 {
        let w = self.reduced(view);
        let idx = self.interval_part(board);
        match (board.len(), player) {
            (1, 0) => self.in_doubled_box(&w) as u64,
            (2, 1) => self.core.same_interval(view.get(0), &w, idx) as u64,
            (3, 0) => self.core.same_interval(view.get(1), &w, idx) as u64,
            (4, 0) => self.core.reflected_color(view.get(1), &w),
            (5, 1) => self.core.decode(view.get(0), &w, board[4].value) as u64,
            other => unreachable!("no step {other:?}"),
        }
    }

    fn output(&self, board: &Board) -> bool {
        board.len() == 6 && board[5].value == 1
    }
}

/// The three concrete protocols behind one type.
#[derive(Debug, Clone)]
pub enum ProtocolSpec {
    Simple(SimpleProtocol),
    Interval(IntervalProtocol),
    KPlayer(KPlayerProtocol),
}

impl ProtocolSpec {
    pub fn simple(f: &FunctionSpec) -> Result<Self> {
        SimpleProtocol::new(f).map(ProtocolSpec::Simple)
    }

    pub fn interval(f: &FunctionSpec, r_sq: u64, cap: Cap) -> Result<Self> {
        IntervalProtocol::new(f, r_sq, cap).map(ProtocolSpec::Interval)
    }

    pub fn kplayer(f: &FunctionSpec, r_sq: u64, symmetrize: bool, cap: Cap) -> Result<Self> {
        KPlayerProtocol::new(f, r_sq, symmetrize, cap).map(ProtocolSpec::KPlayer)
    }

    pub fn build(kind: ProtocolKind, f: &FunctionSpec, r_sq: u64, symmetrize: bool, cap: Cap) -> Result<Self> {
        match kind {
            ProtocolKind::Simple => Self::simple(f),
            ProtocolKind::Interval => Self::interval(f, r_sq, cap),
            ProtocolKind::KPlayer => Self::kplayer(f, r_sq, symmetrize, cap),
        }
    }

    pub fn kind(&self) -> ProtocolKind {
        match self {
            ProtocolSpec::Simple(_) => ProtocolKind::Simple,
            ProtocolSpec::Interval(_) => ProtocolKind::Interval,
            ProtocolSpec::KPlayer(_) => ProtocolKind::KPlayer,
        }
    }

    fn core(&self) -> Option<&IntervalCore> {
        match self {
            ProtocolSpec::Simple(_) => None,
            ProtocolSpec::Interval(p) => Some(&p.core),
            ProtocolSpec::KPlayer(p) => Some(&p.core),
        }
    }

    pub fn partition(&self) -> Option<&IntervalPartition> {
        self.core().map(|c| &c.partition)
    }

    pub fn coloring(&self) -> Option<&Coloring> {
        self.core().map(|c| &c.coloring)
    }

    /// Closed form of `C(P)` for these step layouts.
    pub fn nominal_cost(&self) -> u32 {
        match self {
            ProtocolSpec::Simple(_) => 2,
            ProtocolSpec::Interval(p) => p.core.cost(),
            ProtocolSpec::KPlayer(p) => p.core.cost() + 1,
        }
    }

    /// Last-player transcript naming the interval of the mean, followed by
    /// the symmetrization bit `1` when enabled.
    pub fn mu_transcript(&self) -> Option<Bits> {
        let core = self.core()?;
        let mut b = Bits::from_field(core.partition.mu_index() as u64, core.index_width);
        if let ProtocolSpec::KPlayer(p) = self {
            if p.symmetrize {
                b.push(true);
            }
        }
        Some(b)
    }
}

impl Protocol for ProtocolSpec {
    fn players(&self) -> usize {
        match self {
            ProtocolSpec::Simple(p) => p.players(),
            ProtocolSpec::Interval(p) => p.players(),
            ProtocolSpec::KPlayer(p) => p.players(),
        }
    }

    fn last_message(&self, view: &View<'_>) -> (u64, u32) {
        match self {
            ProtocolSpec::Simple(p) => p.last_message(view),
            ProtocolSpec::Interval(p) => p.last_message(view),
            ProtocolSpec::KPlayer(p) => p.last_message(view),
        }
    }

    fn next_speaker(&self, board: &Board) -> Option<usize> {
        match self {
            ProtocolSpec::Simple(p) => p.next_speaker(board),
            ProtocolSpec::Interval(p) => p.next_speaker(board),
            ProtocolSpec::KPlayer(p) => p.next_speaker(board),
        }
    }

    fn message_width(&self, board: &Board) -> u32 {
        match self {
            ProtocolSpec::Simple(p) => p.message_width(board),
            ProtocolSpec::Interval(p) => p.message_width(board),
            ProtocolSpec::KPlayer(p) => p.message_width(board),
        }
    }

    fn speak(&self, player: usize, view: &View<'_>, board: &Board) -> u64 {
        match self {
            ProtocolSpec::Simple(p) => p.speak(player, view, board),
            ProtocolSpec::Interval(p) => p.speak(player, view, board),
            ProtocolSpec::KPlayer(p) => p.speak(player, view, board),
        }
    }

    fn output(&self, board: &Board) -> bool {
        match self {
            ProtocolSpec::Simple(p) => p.output(board),
            ProtocolSpec::Interval(p) => p.output(board),
            ProtocolSpec::KPlayer(p) => p.output(board),
        }
    }
}
