//! Action sequences: the nodes of the open-loop planning tree.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

/// Action index in `[0, K)`. Planners here are for small action sets.
pub type Action = u8;

/// A finite sequence of actions. The empty sequence is the root.
///
/// `Ord` is the derived lexicographic order on the underlying vector (a
/// strict prefix sorts first), which is exactly the deterministic tie-break
/// order used everywhere in this crate.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionSeq(Vec<Action>);

impl ActionSeq {
    pub fn root() -> Self {
        Self(Vec::new())
    }

    pub fn from_actions(actions: impl Into<Vec<Action>>) -> Self {
        Self(actions.into())
    }

    /// Depth equals the number of actions.
    pub fn depth(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Action> {
        self.0.first().copied()
    }

    pub fn actions(&self) -> &[Action] {
        &self.0
    }

    /// The sequence extended by one action.
    pub fn child(&self, action: Action) -> Self {
        let mut v = self.0.clone();
        v.push(action);
        Self(v)
    }

    /// The first `depth` actions.
    pub fn prefix(&self, depth: u32) -> Self {
        Self(self.0[..depth as usize].to_vec())
    }
}

impl fmt::Display for ActionSeq {
    /// Digit string, e.g. `0110`; the root prints as the empty string.
    /// Actions above 9 (not used by the shipped environments) are
    /// dash-separated to stay unambiguous.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&a| a < 10) {
            for a in &self.0 {
                write!(f, "{a}")?;
            }
        } else {
            for (i, a) in self.0.iter().enumerate() {
                if i > 0 {
                    write!(f, "-")?;
                }
                write!(f, "{a}")?;
            }
        }
        Ok(())
    }
}

/// Error parsing an [`ActionSeq`] from text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseSeqError(pub String);

impl fmt::Display for ParseSeqError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid action sequence: {}", self.0)
    }
}

impl core::error::Error for ParseSeqError {}

impl FromStr for ActionSeq {
    type Err = ParseSeqError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        use alloc::string::ToString;
        if s.is_empty() {
            return Ok(Self::root());
        }
        if s.contains('-') {
            let mut v = Vec::new();
            for part in s.split('-') {
                v.push(part.parse::<u8>().map_err(|_| ParseSeqError(s.to_string()))?);
            }
            return Ok(Self(v));
        }
        let mut v = Vec::with_capacity(s.len());
        for c in s.chars() {
            let d = c.to_digit(10).ok_or_else(|| ParseSeqError(s.to_string()))?;
            v.push(d as Action);
        }
        Ok(Self(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_order_puts_prefix_first() {
        let a = ActionSeq::from_actions([0, 1]);
        let b = ActionSeq::from_actions([0, 1, 0]);
        let c = ActionSeq::from_actions([1]);
        assert!(ActionSeq::root() < a);
        assert!(a < b);
        assert!(b < c);
    }

    #[test]
    fn display_and_parse_round_trip() {
        for s in ["", "0", "0110", "21"] {
            let seq: ActionSeq = s.parse().unwrap();
            assert_eq!(alloc::format!("{seq}"), s);
        }
        assert!("x1".parse::<ActionSeq>().is_err());
    }
}
