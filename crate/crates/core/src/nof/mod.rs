//! One-sided Number-On-the-Forehead protocols on a shared blackboard.
//!
//! Player `i` (0-based) sees every coordinate of the input except `x_i`.
//! The last player writes first: its message depends only on what it sees,
//! never on the board, and it is not charged. Every other message may read
//! the board. The output is a function of the final board.

mod augment;
mod protocols;
mod sets;

pub use augment::{augment, Augmented, AugmentedFunction, AugmentedProtocol};
pub use protocols::{IntervalProtocol, KPlayerProtocol, ProtocolKind, ProtocolSpec, SimpleProtocol};
pub use sets::{
    check_star_free, check_symmetric, choose_transcript, last_part_histogram, transcript_set,
    EntrySet, Provenance, Scope, Star, TranscriptChoice,
};

use serde::Serialize;

use crate::bits::Bits;
use crate::error::{Cap, Result};
use crate::functions::{check_in_domain, BoolFunction};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Message {
    pub player: usize,
    pub value: u64,
    pub width: u32,
}

impl Message {
    pub fn bits(&self) -> Bits {
        Bits::from_field(self.value, self.width)
    }
}

/// What one player sees: the input with its own coordinate hidden.
#[derive(Debug, Clone, Copy)]
pub struct View<'a> {
    input: &'a [usize],
    player: usize,
}

impl<'a> View<'a> {
    pub fn new(input: &'a [usize], player: usize) -> Self {
        View { input, player }
    }

    pub fn player(&self) -> usize {
        self.player
    }

    /// Coordinate `i` of the input.
    ///
    /// # Panics
    /// If `i` is the viewer's own coordinate.
    pub fn get(&self, i: usize) -> usize {
        assert_ne!(i, self.player, "player {} read its own forehead", self.player);
        self.input[i]
    }
}

/// Messages written so far.
pub type Board = [Message];

pub trait Protocol: Sync {
    fn players(&self) -> usize;

    /// Width and value of the last player's message.
    fn last_message(&self, view: &View<'_>) -> (u64, u32);

    /// Who writes next, decided from the board alone; `None` ends the run.
    fn next_speaker(&self, board: &Board) -> Option<usize>;

    /// Fixed width of the next message.
    fn message_width(&self, board: &Board) -> u32;

    fn speak(&self, player: usize, view: &View<'_>, board: &Board) -> u64;

    fn output(&self, board: &Board) -> bool;
}

/// Messages of one run in writing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Transcript {
    players: usize,
    messages: Vec<Message>,
}

impl Transcript {
    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    /// Everything on the board.
    pub fn bits(&self) -> Bits {
        self.collect(|_| true)
    }

    /// The last player's part `T_k`.
    pub fn last_part(&self) -> Bits {
        let last = self.players - 1;
        self.collect(|m| m.player == last)
    }

    /// Concatenated messages of the first `k-1` players.
    pub fn charged(&self) -> Bits {
        let last = self.players - 1;
        self.collect(|m| m.player != last)
    }

    pub fn charged_bits(&self) -> u32 {
        let last = self.players - 1;
        self.messages
            .iter()
            .filter(|m| m.player != last)
            .map(|m| m.width)
            .sum()
    }

    fn collect(&self, keep: impl Fn(&Message) -> bool) -> Bits {
        let mut b = Bits::new();
        for m in self.messages.iter().filter(|m| keep(m)) {
            b.push_field(m.value, m.width);
        }
        b
    }
}

/// Runs `p` on `input` from the empty board.
pub fn run<P: Protocol + ?Sized>(p: &P, input: &[usize]) -> (Transcript, bool) {
    let k = p.players();
    assert_eq!(input.len(), k, "input arity");
    let (value, width) = p.last_message(&View::new(input, k - 1));
    resume(p, input, vec![Message { player: k - 1, value, width }])
}

/// Continues a run from an existing board prefix.
pub fn resume<P: Protocol + ?Sized>(
    p: &P,
    input: &[usize],
    mut board: Vec<Message>,
) -> (Transcript, bool) {
    let k = p.players();
    while let Some(player) = p.next_speaker(&board) {
        assert!(player < k - 1, "the last player only speaks first");
        let width = p.message_width(&board);
        let value = p.speak(player, &View::new(input, player), &board);
        assert!(
            width >= 64 || value < (1u64 << width),
            "message {value} does not fit in {width} bits"
        );
        board.push(Message { player, value, width });
    }
    let out = p.output(&board);
    (
        Transcript {
            players: k,
            messages: board,
        },
        out,
    )
}

/// Checked single run.
pub fn run_checked<P: Protocol + ?Sized, F: BoolFunction + ?Sized>(
    p: &P,
    f: &F,
    input: &[usize],
) -> Result<(Transcript, bool)> {
    check_in_domain(f.dims(), input)?;
    Ok(run(p, input))
}

/// `C(P)`: the maximum over all inputs of bits written by the first `k-1`
/// players.
pub fn cost<P: Protocol + ?Sized, F: BoolFunction + ?Sized>(p: &P, f: &F, cap: Cap) -> Result<u32> {
    cap.check(par::domain_size(f.dims()))?;
    Ok(par::sweep_fold(
        f.dims(),
        || 0u32,
        |acc, x| acc.max(run(p, x).0.charged_bits()),
        u32::max,
    ))
}

/// Inputs on which the protocol's output differs from `f`.
pub fn check_correct<P: Protocol + ?Sized, F: BoolFunction + ?Sized>(
    p: &P,
    f: &F,
    cap: Cap,
) -> Result<Vec<Vec<usize>>> {
    cap.check(par::domain_size(f.dims()))?;
    Ok(par::sweep(f.dims(), |x| {
        (run(p, x).1 != f.eval(x)).then(|| x.to_vec())
    }))
}
