//! Folding the charged transcript into the last coordinate.
//!
//! Given `f` on `[n]^{k-1} × [N]` and a protocol of cost `γ`, the augmented
//! function lives on `[n]^{k-1} × [N·2^γ]`, where last index `z·2^γ + t`
//! stands for the pair `(z, t)` and `t` is read as a `γ`-bit string. It is 1
//! exactly when `f` is 1 and `t` is what the first `k-1` players write
//! (right-padded with zeros).

use super::{cost, run, transcript_set, Board, EntrySet, Message, Protocol, ProtocolSpec, Provenance, Scope, View};
use crate::bits::Bits;
use crate::error::{param, Cap, Result};
use crate::functions::{BoolFunction, FunctionSpec};

const MAX_GAMMA: u32 = 40;

fn low_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

#[derive(Debug, Clone)]
pub struct AugmentedFunction {
    base: FunctionSpec,
    protocol: ProtocolSpec,
    gamma: u32,
    dims: Vec<usize>,
}

impl AugmentedFunction {
    pub fn gamma(&self) -> u32 {
        self.gamma
    }

    pub fn base(&self) -> &FunctionSpec {
        &self.base
    }

    /// `(z, t)` for a last-coordinate index.
    pub fn split(&self, j: usize) -> (usize, u64) {
        (j >> self.gamma, j as u64 & low_mask(self.gamma))
    }

    pub fn join(&self, z: usize, t: u64) -> usize {
        (z << self.gamma) | t as usize
    }

    /// The protocol `P'`: the last player writes as in the base protocol,
    /// then each other player spends one bit confirming its own part of `t`.
    pub fn protocol(&self) -> AugmentedProtocol {
        AugmentedProtocol {
            base: self.protocol.clone(),
            gamma: self.gamma,
        }
    }
}

impl BoolFunction for AugmentedFunction {
    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn eval(&self, x: &[usize]) -> bool {
        let k = x.len();
        let (z, t) = self.split(x[k - 1]);
        let mut base_input = x.to_vec();
        base_input[k - 1] = z;
        if !self.base.eval(&base_input) {
            return false;
        }
        run(&self.protocol, &base_input).0.charged().padded_value(self.gamma) == Some(t)
    }
}

#[derive(Debug, Clone)]
pub struct AugmentedProtocol {
    base: ProtocolSpec,
    gamma: u32,
}

impl Protocol for AugmentedProtocol {
    fn players(&self) -> usize {
        self.base.players()
    }

    fn last_message(&self, view: &View<'_>) -> (u64, u32) {
        let k = self.players();
        let mut input: Vec<usize> = (0..k - 1).map(|i| view.get(i)).collect();
        // hidden from the last player either way
        input.push(0);
        self.base.last_message(&View::new(&input, k - 1))
    }

    fn next_speaker(&self, board: &Board) -> Option<usize> {
        let k = self.players();
        (board.len() < k).then(|| board.len() - 1)
    }

    fn message_width(&self, _: &Board) -> u32 {
        1
    }

    fn speak(&self, player: usize, view: &View<'_>, board: &Board) -> u64 {
        let k = self.players();
        let j = view.get(k - 1);
        let (z, t) = (j >> self.gamma, j as u64 & low_mask(self.gamma));
        let mut input = vec![0usize; k];
        for (c, slot) in input.iter_mut().enumerate().take(k - 1) {
            if c != player {
                *slot = view.get(c);
            }
        }
        input[k - 1] = z;
        let base_view = View::new(&input, player);

        // Replay the base board, reading other players' messages from `t`
        // and recomputing our own.
        let mut base_board: Vec<Message> = vec![board[0]];
        let mut used = 0u32;
        while let Some(speaker) = self.base.next_speaker(&base_board) {
            let width = self.base.message_width(&base_board);
            if used + width > self.gamma {
                return 0;
            }
            let value = (t >> (self.gamma - used - width)) & low_mask(width);
            used += width;
            if speaker == player && self.base.speak(player, &base_view, &base_board) != value {
                return 0;
            }
            base_board.push(Message {
                player: speaker,
                value,
                width,
            });
        }
        let padding_clear = t & low_mask(self.gamma - used) == 0;
        (padding_clear && self.base.output(&base_board)) as u64
    }

    fn output(&self, board: &Board) -> bool {
        board.len() == self.players() && board[1..].iter().all(|m| m.value == 1)
    }
}

/// Result of [`augment`].
#[derive(Debug, Clone)]
pub struct Augmented {
    pub function: AugmentedFunction,
    /// `S'`, the image of `S_k(T_k)`.
    pub set: EntrySet,
    pub gamma: u32,
    /// `N' = N·2^γ`.
    pub n_prime: usize,
}

impl Augmented {
    /// Full transcript of `P'` on every entry of `S'`: `T_k` then `k-1` ones.
    pub fn cylinder_pattern(&self, last_part: &Bits) -> Bits {
        let mut b = last_part.clone();
        for _ in 0..self.function.dims.len() - 1 {
            b.push(true);
        }
        b
    }
}

pub fn augment(f: &FunctionSpec, p: &ProtocolSpec, last_part: &Bits, cap: Cap) -> Result<Augmented> {
    let gamma = cost(p, f, cap)?;
    if gamma > MAX_GAMMA {
        return param(format!("protocol cost {gamma} too large to augment (max {MAX_GAMMA})"));
    }
    let n_prime = f
        .big_n()
        .checked_mul(1usize << gamma)
        .ok_or_else(|| crate::error::Error::Parameter("N·2^γ overflows".into()))?;
    let mut dims = f.dims().to_vec();
    *dims.last_mut().expect("non-empty") = n_prime;
    let function = AugmentedFunction {
        base: f.clone(),
        protocol: p.clone(),
        gamma,
        dims,
    };
    let base_set = transcript_set(p, f, last_part, Scope::LastPlayer, cap)?;
    let k = f.k();
    let entries = base_set.iter().map(|x| {
        let charged = run(p, x).0.charged();
        let t = charged.padded_value(gamma).expect("charged bits fit in γ");
        let mut e = x.clone();
        e[k - 1] = function.join(x[k - 1], t);
        e
    });
    let set = EntrySet::new(function.dims.clone(), entries.collect::<Vec<_>>(), Provenance::Augmented)?;
    Ok(Augmented {
        function,
        set,
        gamma,
        n_prime,
    })
}
