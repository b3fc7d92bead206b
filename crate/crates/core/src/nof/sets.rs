use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::Serialize;

use super::{run, Protocol, ProtocolSpec};
use crate::bits::Bits;
use crate::error::{param, Cap, Error, Result};
use crate::functions::{check_in_domain, ones, BoolFunction};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// `S_k(T)`: 1-inputs whose last-player message is `T`.
    LastPlayer,
    /// `S(T)`: 1-inputs whose whole transcript is `T`.
    FullTranscript,
    /// `S'` of the augmented function.
    Augmented,
    Synthetic,
}

/// A finite set of input tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntrySet {
    dims: Vec<usize>,
    entries: BTreeSet<Vec<usize>>,
    provenance: Provenance,
}

impl EntrySet {
    pub fn new(
        dims: Vec<usize>,
        entries: impl IntoIterator<Item = Vec<usize>>,
        provenance: Provenance,
    ) -> Result<Self> {
        if dims.len() < 2 {
            return param("an entry set needs arity at least 2");
        }
        let entries: BTreeSet<Vec<usize>> = entries.into_iter().collect();
        for e in &entries {
            check_in_domain(&dims, e)?;
        }
        Ok(EntrySet {
            dims,
            entries,
            provenance,
        })
    }

    pub fn k(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, x: &[usize]) -> bool {
        self.entries.contains(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.entries.iter()
    }

    /// `p = |S| / (dims[0] · … · dims[k-2])`.
    pub fn density(&self) -> f64 {
        let cells: f64 = self.dims[..self.k() - 1].iter().map(|&d| d as f64).product();
        self.len() as f64 / cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    LastPlayer,
    Full,
}

/// 1-inputs whose last-player (or full) transcript equals `pattern`.
pub fn transcript_set<P, F>(p: &P, f: &F, pattern: &Bits, scope: Scope, cap: Cap) -> Result<EntrySet>
where
    P: Protocol + ?Sized,
    F: BoolFunction + ?Sized,
{
    let candidates = ones(f, cap)?;
    let kept = par::filter_map_slice(&candidates, |x| {
        let (t, _) = run(p, x);
        let bits = match scope {
            Scope::LastPlayer => t.last_part(),
            Scope::Full => t.bits(),
        };
        (&bits == pattern).then(|| x.clone())
    });
    let provenance = match scope {
        Scope::LastPlayer => Provenance::LastPlayer,
        Scope::Full => Provenance::FullTranscript,
    };
    EntrySet::new(f.dims().to_vec(), kept, provenance)
}

/// `|S_k(T)|` for every last-player transcript `T`, in transcript order.
pub fn last_part_histogram<P, F>(p: &P, f: &F, cap: Cap) -> Result<BTreeMap<Bits, usize>>
where
    P: Protocol + ?Sized,
    F: BoolFunction + ?Sized,
{
    let candidates = ones(f, cap)?;
    let parts = par::filter_map_slice(&candidates, |x| Some(run(p, x).0.last_part()));
    let mut hist = BTreeMap::new();
    for t in parts {
        *hist.entry(t).or_insert(0) += 1;
    }
    Ok(hist)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TranscriptChoice {
    /// Most frequent last-player transcript (smallest on ties) for the simple
    /// protocol; the interval of the mean for the interval protocols.
    Auto,
    /// The interval of the mean.
    Mu,
    Explicit(Bits),
}

impl fmt::Display for TranscriptChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TranscriptChoice::Auto => f.write_str("auto"),
            TranscriptChoice::Mu => f.write_str("mu"),
            TranscriptChoice::Explicit(b) => write!(f, "explicit:{b}"),
        }
    }
}

impl FromStr for TranscriptChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(TranscriptChoice::Auto),
            "mu" => Ok(TranscriptChoice::Mu),
            _ => match s.strip_prefix("explicit:") {
                Some(bits) => Ok(TranscriptChoice::Explicit(bits.parse()?)),
                None => param(format!(
                    "transcript must be auto, mu or explicit:<bits>, got {s:?}"
                )),
            },
        }
    }
}

pub fn choose_transcript<F: BoolFunction + ?Sized>(
    p: &ProtocolSpec,
    f: &F,
    choice: &TranscriptChoice,
    cap: Cap,
) -> Result<Bits> {
    match choice {
        TranscriptChoice::Explicit(b) => Ok(b.clone()),
        TranscriptChoice::Mu => p
            .mu_transcript()
            .ok_or_else(|| Error::Parameter(format!("the {} protocol has no interval of the mean", p.kind()))),
        TranscriptChoice::Auto => {
            if let Some(t) = p.mu_transcript() {
                return Ok(t);
            }
            let hist = last_part_histogram(p, f, cap)?;
            // BTreeMap iterates in ascending order, so the first maximum wins.
            let best = hist.iter().fold(None::<(&Bits, usize)>, |best, (t, &c)| match best {
                Some((_, bc)) if bc >= c => best,
                _ => Some((t, c)),
            });
            best.map(|(t, _)| t.clone())
                .ok_or_else(|| Error::Contract("function has no 1-entries".into()))
        }
    }
}

/// Closed under every permutation of the first `k-1` coordinates.
pub fn check_symmetric(s: &EntrySet) -> bool {
    let m = s.k() - 1;
    s.iter().all(|e| {
        (0..m).permutations(m).all(|perm| {
            let mut img: Vec<usize> = perm.iter().map(|&i| e[i]).collect();
            img.push(e[m]);
            s.contains(&img)
        })
    })
}

/// `k` entries `(x_1', x_2, …, x_k), (x_1, x_2', …, x_k), …, (x_1, …, x_k')`
/// with every `x_i' ≠ x_i`. `arms[i]` differs from `center` in coordinate `i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Star {
    pub center: Vec<usize>,
    pub arms: Vec<Vec<usize>>,
}

/// Every star center, with one witness each, in canonical center order.
pub fn check_star_free(s: &EntrySet, cap: Cap) -> Result<Vec<Star>> {
    let k = s.k();
    let entries: Vec<Vec<usize>> = s.iter().cloned().collect();
    let first_values: BTreeSet<usize> = entries.iter().map(|e| e[0]).collect();
    cap.check(entries.len() as u128 * first_values.len() as u128)?;
    let without = |e: &[usize], i: usize| -> Vec<usize> {
        let mut key = e.to_vec();
        key.remove(i);
        key
    };
    let lines: Vec<HashMap<Vec<usize>, Vec<usize>>> = (0..k)
        .map(|i| {
            let mut m: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
            for e in &entries {
                m.entry(without(e, i)).or_default().push(e[i]);
            }
            m
        })
        .collect();
    let found = par::filter_map_slice(&entries, |arm0| {
        let mut stars = Vec::new();
        for &v in first_values.iter().filter(|&&v| v != arm0[0]) {
            let mut center = arm0.clone();
            center[0] = v;
            let arms: Option<Vec<Vec<usize>>> = (1..k)
                .map(|i| {
                    let other = lines[i]
                        .get(&without(&center, i))?
                        .iter()
                        .copied()
                        .find(|&u| u != center[i])?;
                    let mut arm = center.clone();
                    arm[i] = other;
                    Some(arm)
                })
                .collect();
            if let Some(mut rest) = arms {
                let mut all = vec![arm0.clone()];
                all.append(&mut rest);
                stars.push(Star { center, arms: all });
            }
        }
        (!stars.is_empty()).then_some(stars)
    });
    let mut by_center: BTreeMap<Vec<usize>, Star> = BTreeMap::new();
    for star in found.into_iter().flatten() {
        by_center.entry(star.center.clone()).or_insert(star);
    }
    Ok(by_center.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::FunctionSpec;

    fn synthetic(k: usize, n: usize, entries: &[&[usize]]) -> EntrySet {
        EntrySet::new(vec![n; k], entries.iter().map(|e| e.to_vec()), Provenance::Synthetic).unwrap()
    }

    #[test]
    fn symmetry_examples() {
        assert!(!check_symmetric(&synthetic(3, 3, &[&[0, 1, 0]])));
        assert!(check_symmetric(&synthetic(3, 3, &[])));
        assert!(check_symmetric(&synthetic(3, 3, &[&[0, 1, 0], &[1, 0, 0], &[2, 2, 1]])));
    }

    #[test]
    fn star_examples() {
        let s = synthetic(3, 3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let stars = check_star_free(&s, Cap::DEFAULT).unwrap();
        assert_eq!(stars.len(), 1);
        assert_eq!(stars[0].center, vec![0, 0, 0]);
        assert!(check_star_free(&synthetic(3, 3, &[&[1, 2, 0]]), Cap::DEFAULT)
            .unwrap()
            .is_empty());
        // A four-arm star for k = 4.
        let s4 = synthetic(4, 3, &[&[1, 0, 0, 0], &[0, 2, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 2]]);
        assert_eq!(check_star_free(&s4, Cap::DEFAULT).unwrap().len(), 1);
    }

    #[test]
    fn entry_set_rejects_out_of_range() {
        assert!(EntrySet::new(vec![2, 2, 2], vec![vec![0, 2, 0]], Provenance::Synthetic).is_err());
    }

    #[test]
    fn transcript_choice_parsing() {
        assert_eq!("auto".parse::<TranscriptChoice>().unwrap(), TranscriptChoice::Auto);
        assert_eq!(
            "explicit:0110".parse::<TranscriptChoice>().unwrap().to_string(),
            "explicit:0110"
        );
        assert!("explicit:2".parse::<TranscriptChoice>().is_err());
        assert!("best".parse::<TranscriptChoice>().is_err());
    }

    #[test]
    fn simple_auto_picks_most_frequent_distance() {
        let g = FunctionSpec::midpoint(3, 2).unwrap();
        let p = ProtocolSpec::simple(&g).unwrap();
        // histogram of ||x-y||^2 over the 81 ordered pairs of [3]^2
        let mut hist = BTreeMap::new();
        for x in 0..9 {
            for y in 0..9 {
                let (a, b) = (g.a_coords(x), g.a_coords(y));
                let s: i64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
                *hist.entry(s).or_insert(0usize) += 1;
            }
        }
        let max = *hist.values().max().unwrap();
        let t = choose_transcript(&p, &g, &TranscriptChoice::Auto, Cap::DEFAULT).unwrap();
        let s = transcript_set(&p, &g, &t, Scope::LastPlayer, Cap::DEFAULT).unwrap();
        assert_eq!(s.len(), max);
        assert!(choose_transcript(&p, &g, &TranscriptChoice::Mu, Cap::DEFAULT).is_err());
        let never: Bits = "1111111111".parse().unwrap();
        assert!(transcript_set(&p, &g, &never, Scope::LastPlayer, Cap::DEFAULT)
            .unwrap()
            .is_empty());
    }
}
